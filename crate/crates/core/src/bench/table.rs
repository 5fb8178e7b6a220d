//! CSV form of a [`BenchTable`].
//!
//! One row per instance and method, then one `AVERAGE` row per method. The
//! origin of each instance's `S_star` is recorded in a preceding
//! `# reference <instance> <exact|truth>` comment line.

use std::fs;
use std::path::Path;

use super::{BenchRow, BenchTable, Method, MethodSummary, Reference, Status};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 11] = [
    "instance", "no_hits", "method", "S_star", "S", "TP", "TR", "TT", "GAP", "feasible", "seed",
];

const AVERAGE: &str = "AVERAGE";
const REFERENCE_TAG: &str = "# reference ";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn format_csv(table: &BenchTable) -> Result<String> {
    let mut out: Vec<u8> = Vec::new();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    out.extend(take(&mut w)?);

    let mut last_instance: Option<&str> = None;
    for r in &table.rows {
        if last_instance != Some(r.instance.as_str()) {
            last_instance = Some(&r.instance);
            if let Some(reference) = r.reference {
                // quote through the csv writer so names with spaces survive
                let mut n = csv::WriterBuilder::new().quote_style(csv::QuoteStyle::Always).from_writer(Vec::new());
                n.write_record([&r.instance])?;
                let name = n.into_inner().map_err(|e| Error::Io(e.into_error()))?;
                let name = String::from_utf8(name).expect("utf-8");
                out.extend(format!("{REFERENCE_TAG}{} {}\n", name.trim_end(), reference.name()).bytes());
            }
        }
        w.write_record([
            r.instance.clone(),
            r.no_hits.to_string(),
            r.method.name().to_string(),
            opt(r.s_star),
            opt(r.s),
            r.tp.to_string(),
            r.tr.to_string(),
            r.tt.to_string(),
            opt(r.gap),
            r.status.name().to_string(),
            r.seed.to_string(),
        ])?;
        out.extend(take(&mut w)?);
    }
    for s in &table.summary {
        w.write_record([
            AVERAGE.to_string(),
            String::new(),
            s.method.name().to_string(),
            String::new(),
            String::new(),
            s.atp.to_string(),
            s.atr.to_string(),
            s.att.to_string(),
            opt(s.agap),
            format!("{}/{}", s.feasible, s.runs),
            String::new(),
        ])?;
        out.extend(take(&mut w)?);
    }
    Ok(String::from_utf8(out).expect("csv output is utf-8"))
}

fn take(w: &mut csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    let done = std::mem::replace(w, csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new()));
    done.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn write_csv(table: &BenchTable, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_csv(table)?)?;
    Ok(())
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<BenchTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_csv(&text, path)
}

pub fn parse_csv(text: &str, path: &Path) -> Result<BenchTable> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut references: Vec<(String, Reference)> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let Some(rest) = line.strip_prefix(REFERENCE_TAG) else { continue };
        let (name, kind) = rest.rsplit_once(' ').ok_or_else(|| err(n + 1, "bad reference line".into()))?;
        let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(name.as_bytes());
        let name = r
            .records()
            .next()
            .and_then(|x| x.ok())
            .and_then(|x| x.get(0).map(str::to_string))
            .ok_or_else(|| err(n + 1, "bad reference line".into()))?;
        let kind = match kind {
            "exact" => Reference::Exact,
            "truth" => Reference::Truth,
            other => return Err(err(n + 1, format!("unknown reference `{other}`"))),
        };
        references.push((name, kind));
    }

    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.iter().ne(CSV_HEADER) {
        return Err(err(1, "unexpected header".into()));
    }
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| rec.get(i).unwrap_or("");
        let num = |i: usize| -> Result<f64> {
            field(i).parse().map_err(|_| err(line, format!("bad {} `{}`", CSV_HEADER[i], field(i))))
        };
        let opt_num = |i: usize| -> Result<Option<f64>> {
            if field(i).is_empty() {
                Ok(None)
            } else {
                num(i).map(Some)
            }
        };
        let method: Method = field(2).parse().map_err(|_| err(line, format!("bad method `{}`", field(2))))?;
        if field(0) == AVERAGE {
            let (feasible, runs) = field(9)
                .split_once('/')
                .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
                .ok_or_else(|| err(line, format!("bad count `{}`", field(9))))?;
            summary.push(MethodSummary {
                method,
                atp: num(5)?,
                atr: num(6)?,
                att: num(7)?,
                agap: opt_num(8)?,
                feasible,
                runs,
            });
            continue;
        }
        let instance = field(0).to_string();
        rows.push(BenchRow {
            reference: references.iter().find(|(n, _)| *n == instance).map(|(_, r)| *r),
            no_hits: field(1).parse().map_err(|_| err(line, format!("bad no_hits `{}`", field(1))))?,
            method,
            s_star: opt_num(3)?,
            s: opt_num(4)?,
            tp: num(5)?,
            tr: num(6)?,
            tt: num(7)?,
            gap: opt_num(8)?,
            status: Status::parse(field(9)).ok_or_else(|| err(line, format!("bad status `{}`", field(9))))?,
            seed: field(10).parse().map_err(|_| err(line, format!("bad seed `{}`", field(10))))?,
            instance,
        });
    }
    if rows.is_empty() && summary.is_empty() {
        return Err(Error::EmptyCsv);
    }
    Ok(BenchTable { rows, summary })
}
