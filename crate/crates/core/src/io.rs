//! The `TRACKFIND 1` instance file format.
//!
//! ```text
//! TRACKFIND 1
//! LAYERS 3
//! HITS 3
//! 1 1 0 0 100          # id layer x y z
//! 2 2 0 0 200
//! 3 3 0 0 300
//! SEGMENTS 2
//! 1 2                  # from to
//! 2 3
//! TRIPLETS 1
//! 1 2 3 -5.0000000000000001e-3
//! TRUTH 1              # optional
//! 1 2 3
//! ```
//!
//! Hit ids are 1-based and must appear in order. Coordinates are printed in
//! the shortest form that parses back to the same `f64`; costs with 17
//! significant digits. `#` starts a comment.
//!
//! Files without the header are tried as bare `i j k cost` tuple lists (see
//! [`parse_tuple_list`]).

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geometry::Hit;
use crate::instance::{Instance, TripletSpec};

pub const MAGIC: &str = "TRACKFIND";
pub const VERSION: &str = "1";

pub fn format_instance(instance: &Instance) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{MAGIC} {VERSION}");
    let _ = writeln!(s, "LAYERS {}", instance.num_layers());
    let _ = writeln!(s, "HITS {}", instance.num_hits());
    for h in instance.hits() {
        let [x, y, z] = h.position;
        let _ = writeln!(s, "{} {} {x} {y} {z}", h.id + 1, h.layer);
    }
    let _ = writeln!(s, "SEGMENTS {}", instance.segments().len());
    for seg in instance.segments() {
        let _ = writeln!(s, "{} {}", seg.from + 1, seg.to + 1);
    }
    let _ = writeln!(s, "TRIPLETS {}", instance.triplets().len());
    for t in instance.triplets() {
        let _ = writeln!(s, "{} {} {} {:.16e}", t.i + 1, t.j + 1, t.k + 1, t.cost);
    }
    if let Some(tracks) = instance.truth() {
        let _ = writeln!(s, "TRUTH {}", tracks.len());
        for track in tracks {
            let ids: Vec<String> = track.iter().map(|h| (h + 1).to_string()).collect();
            let _ = writeln!(s, "{}", ids.join(" "));
        }
    }
    s
}

pub fn write_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_instance(instance))?;
    Ok(())
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_instance(&text, path)
}

/// Parse file contents; `path` only labels errors.
pub fn parse_instance(text: &str, path: &Path) -> Result<Instance> {
    let lines = content_lines(text);
    match lines.first() {
        Some((_, first)) if first.split_whitespace().next() == Some(MAGIC) => {
            let found = first.split_whitespace().nth(1).unwrap_or("");
            if found != VERSION || first.split_whitespace().count() != 2 {
                return Err(Error::Version { path: path.to_path_buf(), found: found.to_string() });
            }
            Reader { path, lines: &lines[1..], pos: 0 }.instance()
        }
        Some(_) => parse_tuple_list(text, path).map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: lines[0].0,
            message: format!("expected `{MAGIC} {VERSION}` header"),
        }),
        None => Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: "empty file".into(),
        }),
    }
}

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .filter_map(|(n, l)| {
            let l = l.split('#').next().unwrap_or("").trim();
            (!l.is_empty()).then_some((n + 1, l))
        })
        .collect()
}

struct Reader<'a> {
    path: &'a Path,
    lines: &'a [(usize, &'a str)],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err<T>(&self, line: usize, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            path: self.path.to_path_buf(),
            line,
            message: message.into(),
        })
    }

    fn last_line(&self) -> usize {
        self.lines.last().map_or(1, |l| l.0 + 1)
    }

    fn next_line(&mut self, what: &str) -> Result<(usize, &'a str)> {
        match self.lines.get(self.pos) {
            Some(&l) => {
                self.pos += 1;
                Ok(l)
            }
            None => self.err(self.last_line(), format!("unexpected end of file, expected {what}")),
        }
    }

    fn header(&mut self, keyword: &str) -> Result<usize> {
        let (n, line) = self.next_line(keyword)?;
        let mut it = line.split_whitespace();
        if it.next() != Some(keyword) {
            return self.err(n, format!("expected `{keyword} <count>`"));
        }
        let count = it.next().and_then(|c| c.parse().ok());
        match (count, it.next()) {
            (Some(c), None) => Ok(c),
            _ => self.err(n, format!("expected `{keyword} <count>`")),
        }
    }

    fn fields<const K: usize>(&mut self, what: &str) -> Result<(usize, [&'a str; K])> {
        let (n, line) = self.next_line(what)?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        match <[&str; K]>::try_from(parts) {
            Ok(a) => Ok((n, a)),
            Err(p) => self.err(n, format!("expected {K} fields for {what}, found {}", p.len())),
        }
    }

    fn id(&self, n: usize, field: &str, num_hits: usize) -> Result<usize> {
        match field.parse::<usize>() {
            Ok(id) if id >= 1 && id <= num_hits => Ok(id - 1),
            _ => self.err(n, format!("bad hit id `{field}`")),
        }
    }

    fn float(&self, n: usize, field: &str) -> Result<f64> {
        field.parse().or_else(|_| self.err(n, format!("bad number `{field}`")))
    }

    fn instance(mut self) -> Result<Instance> {
        let num_layers = self.header("LAYERS")?;

        let num_hits = self.header("HITS")?;
        let mut hits = Vec::with_capacity(num_hits);
        for expect in 0..num_hits {
            let (n, [id, layer, x, y, z]) = self.fields::<5>("a hit")?;
            if id.parse::<usize>().ok() != Some(expect + 1) {
                return self.err(n, format!("expected hit id {}, found `{id}`", expect + 1));
            }
            let layer = layer.parse().or_else(|_| self.err(n, format!("bad layer `{layer}`")))?;
            let pos = [self.float(n, x)?, self.float(n, y)?, self.float(n, z)?];
            hits.push(Hit::new(expect, layer, pos));
        }

        let num_segments = self.header("SEGMENTS")?;
        let mut segments = Vec::with_capacity(num_segments);
        for _ in 0..num_segments {
            let (n, [a, b]) = self.fields::<2>("a segment")?;
            segments.push((self.id(n, a, num_hits)?, self.id(n, b, num_hits)?));
        }

        let num_triplets = self.header("TRIPLETS")?;
        let mut triplets = Vec::with_capacity(num_triplets);
        for _ in 0..num_triplets {
            let (n, [i, j, k, c]) = self.fields::<4>("a triplet")?;
            triplets.push(TripletSpec::with_cost(
                self.id(n, i, num_hits)?,
                self.id(n, j, num_hits)?,
                self.id(n, k, num_hits)?,
                self.float(n, c)?,
            ));
        }

        let mut truth = None;
        if self.pos < self.lines.len() {
            let count = self.header("TRUTH")?;
            let mut tracks = Vec::with_capacity(count);
            for _ in 0..count {
                let (n, line) = self.next_line("a truth track")?;
                let track = line
                    .split_whitespace()
                    .map(|f| self.id(n, f, num_hits))
                    .collect::<Result<Vec<_>>>()?;
                tracks.push(track);
            }
            truth = Some(tracks);
        }
        if let Some(&(n, _)) = self.lines.get(self.pos) {
            return self.err(n, "trailing content");
        }

        Instance::new(num_layers, hits, segments, triplets, truth)
    }
}

/// Best-effort reader for bare triplet lists: every content line holds four
/// fields `i j k cost` (whitespace, comma or semicolon separated) with
/// 1-based hit ids. Segments are the pairs the triplets use, layers are the
/// longest-path depth in the segment graph, and hits carry no coordinates.
pub fn parse_tuple_list(text: &str, path: &Path) -> Result<Instance> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: PathBuf::from(path),
        line,
        message,
    };
    let mut rows = Vec::new();
    for (n, line) in content_lines(text) {
        let parts: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == ',' || c == ';')
            .filter(|p| !p.is_empty())
            .collect();
        let [i, j, k, c] = parts[..] else {
            return Err(parse_err(n, format!("expected `i j k cost`, found {} fields", parts.len())));
        };
        let id = |f: &str| match f.parse::<usize>() {
            Ok(v) if v >= 1 => Ok(v - 1),
            _ => Err(parse_err(n, format!("bad hit id `{f}`"))),
        };
        let cost: f64 = c.parse().map_err(|_| parse_err(n, format!("bad cost `{c}`")))?;
        rows.push((id(i)?, id(j)?, id(k)?, cost));
    }
    if rows.is_empty() {
        return Err(parse_err(1, "no tuples".into()));
    }

    let num_hits = rows.iter().map(|&(i, j, k, _)| i.max(j).max(k)).max().unwrap_or(0) + 1;
    let segments: BTreeSet<(usize, usize)> = rows.iter().flat_map(|&(i, j, k, _)| [(i, j), (j, k)]).collect();
    let mut outgoing = vec![Vec::new(); num_hits];
    let mut indegree = vec![0usize; num_hits];
    for &(a, b) in &segments {
        outgoing[a].push(b);
        indegree[b] += 1;
    }
    // longest-path layering in topological order
    let mut layer = vec![1usize; num_hits];
    let mut ready: Vec<usize> = (0..num_hits).filter(|&h| indegree[h] == 0).collect();
    let mut visited = 0;
    while let Some(a) = ready.pop() {
        visited += 1;
        for &b in &outgoing[a] {
            layer[b] = layer[b].max(layer[a] + 1);
            indegree[b] -= 1;
            if indegree[b] == 0 {
                ready.push(b);
            }
        }
    }
    if visited != num_hits {
        return Err(parse_err(1, "segment graph has a cycle".into()));
    }
    let num_layers = layer.iter().copied().max().unwrap_or(1);
    let hits = (0..num_hits).map(|h| Hit::new(h, layer[h], [f64::NAN; 3])).collect();
    let triplets = rows.iter().map(|&(i, j, k, c)| TripletSpec::with_cost(i, j, k, c)).collect();
    Instance::new(num_layers, hits, segments.into_iter().collect(), triplets, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::generate::{generate_event, GeneratorConfig};

    fn p() -> &'static Path {
        Path::new("test.tf")
    }

    #[test]
    fn header_only_round_trip() {
        let inst = Instance::new(1, vec![], vec![], vec![], None).unwrap();
        let text = format_instance(&inst);
        assert_eq!(text, "TRACKFIND 1\nLAYERS 1\nHITS 0\nSEGMENTS 0\nTRIPLETS 0\n");
        assert_eq!(parse_instance(&text, p()).unwrap(), inst);
    }

    #[test]
    fn generated_round_trip() {
        let inst = generate_event(&GeneratorConfig::new(10, 2)).unwrap();
        let text = format_instance(&inst);
        let back = parse_instance(&text, p()).unwrap();
        assert_eq!(back, inst);
        assert_eq!(format_instance(&back), text);
    }

    #[test]
    fn hand_written_file() {
        let text = "\
# one straight track
TRACKFIND 1
LAYERS 3
HITS 3
1 1 0 0 100
2 2 0 0 200
3 3 0 0 300   # last
SEGMENTS 2
1 2
2 3
TRIPLETS 1
1 2 3 -5.0000000000000001e-3
TRUTH 1
1 2 3
";
        let inst = parse_instance(text, p()).unwrap();
        assert_eq!(inst.triplets()[0].cost, -0.005);
        assert_eq!(inst.triplets()[0].cost.to_bits(), (-0.005f64).to_bits());
        assert_eq!(inst.truth().unwrap(), &[vec![0, 1, 2]]);
    }

    #[test]
    fn errors_name_the_line() {
        let text = "TRACKFIND 1\nLAYERS 3\nHITS 2\n1 1 0 0 100\n2 2 0 zero 200\n";
        match parse_instance(text, p()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
        let text = "TRACKFIND 1\nLAYERS 3\nHITS 2\n1 1 0 0 100\n";
        assert!(matches!(parse_instance(text, p()), Err(Error::Parse { line: 5, .. })));
    }

    #[test]
    fn version_mismatch() {
        assert!(matches!(
            parse_instance("TRACKFIND 2\nLAYERS 1\n", p()),
            Err(Error::Version { .. })
        ));
    }

    #[test]
    fn garbage_is_a_parse_error() {
        assert!(matches!(parse_instance("hello world\n", p()), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_instance("", p()), Err(Error::Parse { .. })));
    }

    #[test]
    fn tuple_list_fallback() {
        let text = "1,2,3,-0.5\n2 3 4 -0.25\n5;2;3;-0.1\n";
        let inst = parse_instance(text, p()).unwrap();
        assert_eq!(inst.num_hits(), 5);
        assert_eq!(inst.num_layers(), 4);
        assert_eq!(inst.hits()[4].layer, 1);
        assert_eq!(inst.triplets().len(), 3);
        assert_eq!(inst.triplets()[1].cost, -0.25);
        assert!(!inst.hits()[0].has_position());
    }

    #[test]
    fn fixture_round_trip() {
        let inst = fixtures::crossing_grid(3, 4);
        assert_eq!(parse_instance(&format_instance(&inst), p()).unwrap(), inst);
    }
}
