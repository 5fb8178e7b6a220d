use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instance::Instance;

use super::{check_len, check_weight, triplet_terms, DegreeConstraints, QuadraticTerm};

/// `offset + sum linear_v x_v + sum_{a<b} quadratic_ab x_a x_b` over binary
/// variables.
///
/// Models built from an instance also keep the triplet terms and degree
/// constraints they were expanded from, so energies can be split into the
/// cost part and the penalty part.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    num_vars: usize,
    offset: f64,
    linear: Vec<f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    neighbors: Vec<Vec<(usize, f64)>>,
    alpha: f64,
    gamma: f64,
    cost_terms: Vec<QuadraticTerm>,
    constraints: DegreeConstraints,
}

/// Expand `alpha * cost + gamma * sum (1 - sum x)^2` into QUBO coefficients.
///
/// With `x^2 = x` each squared constraint contributes `gamma` to the offset,
/// `-gamma` to every member's linear coefficient and `2 gamma` to every
/// member pair.
pub fn build_qubm(instance: &Instance, alpha: f64, gamma: f64) -> Result<QuboModel> {
    check_weight("alpha", alpha)?;
    check_weight("gamma", gamma)?;
    let constraints = DegreeConstraints::from_instance(instance)?;
    let cost_terms = triplet_terms(instance, alpha)?;
    let n = instance.segments().len();

    let mut offset = 0.0;
    let mut linear = vec![0.0; n];
    let mut quadratic = BTreeMap::new();
    for t in &cost_terms {
        *quadratic.entry(ordered(t.first, t.second)).or_insert(0.0) += t.coefficient;
    }
    for c in constraints.iter() {
        offset += gamma;
        for (p, &a) in c.vars.iter().enumerate() {
            linear[a] -= gamma;
            for &b in &c.vars[p + 1..] {
                *quadratic.entry(ordered(a, b)).or_insert(0.0) += 2.0 * gamma;
            }
        }
    }

    let mut model = QuboModel::from_parts(n, offset, linear, quadratic)?;
    model.alpha = alpha;
    model.gamma = gamma;
    model.cost_terms = cost_terms;
    model.constraints = constraints;
    Ok(model)
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl QuboModel {
    /// A bare model. Keys must satisfy `a < b < num_vars`.
    pub fn from_parts(
        num_vars: usize,
        offset: f64,
        linear: Vec<f64>,
        quadratic: BTreeMap<(usize, usize), f64>,
    ) -> Result<Self> {
        if linear.len() != num_vars {
            return Err(Error::Dimension { expected: num_vars, actual: linear.len() });
        }
        let mut neighbors = vec![Vec::new(); num_vars];
        for (&(a, b), &q) in &quadratic {
            if a >= b || b >= num_vars {
                return Err(Error::InvalidConfig(format!("bad quadratic key ({a}, {b})")));
            }
            neighbors[a].push((b, q));
            neighbors[b].push((a, q));
        }
        Ok(Self {
            num_vars,
            offset,
            linear,
            quadratic,
            neighbors,
            alpha: 0.0,
            gamma: 0.0,
            cost_terms: Vec::new(),
            constraints: DegreeConstraints::default(),
        })
    }

    /// The bare model over the variables with `keep[v]`, the others fixed to
    /// zero, and the original index of each kept variable.
    pub fn restrict(&self, keep: &[bool]) -> Result<(QuboModel, Vec<usize>)> {
        if keep.len() != self.num_vars {
            return Err(Error::Dimension { expected: self.num_vars, actual: keep.len() });
        }
        let kept: Vec<usize> = (0..self.num_vars).filter(|&v| keep[v]).collect();
        let mut index = vec![usize::MAX; self.num_vars];
        for (i, &v) in kept.iter().enumerate() {
            index[v] = i;
        }
        let linear = kept.iter().map(|&v| self.linear[v]).collect();
        let quadratic = self
            .quadratic
            .iter()
            .filter(|(&(a, b), _)| keep[a] && keep[b])
            .map(|(&(a, b), &q)| ((index[a], index[b]), q))
            .collect();
        let model = QuboModel::from_parts(kept.len(), self.offset, linear, quadratic)?;
        Ok((model, kept))
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    pub fn neighbors(&self, var: usize) -> &[(usize, f64)] {
        &self.neighbors[var]
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn constraints(&self) -> &DegreeConstraints {
        &self.constraints
    }

    pub fn energy(&self, x: &[bool]) -> Result<f64> {
        check_len(self.num_vars, x)?;
        let mut e = self.offset;
        for (v, &l) in self.linear.iter().enumerate() {
            if x[v] {
                e += l;
            }
        }
        for (&(a, b), &q) in &self.quadratic {
            if x[a] && x[b] {
                e += q;
            }
        }
        Ok(e)
    }

    /// `linear_v + sum of q_uv x_u over neighbours u`: the change in energy
    /// from switching `v` on, with everything else fixed.
    pub fn local_field(&self, x: &[bool], var: usize) -> f64 {
        self.linear[var]
            + self.neighbors[var]
                .iter()
                .filter(|(u, _)| x[*u])
                .map(|(_, q)| q)
                .sum::<f64>()
    }

    /// Energy change from flipping `var`.
    pub fn flip_delta(&self, x: &[bool], var: usize) -> f64 {
        let h = self.local_field(x, var);
        if x[var] {
            -h
        } else {
            h
        }
    }

    /// `alpha * sum c x x` over the triplet terms.
    pub fn cost_part(&self, x: &[bool]) -> Result<f64> {
        check_len(self.num_vars, x)?;
        Ok(self
            .cost_terms
            .iter()
            .filter(|t| x[t.first] && x[t.second])
            .map(|t| t.coefficient)
            .sum())
    }

    /// `gamma * sum (1 - sum x)^2`, evaluated directly from the constraints.
    pub fn penalty_part(&self, x: &[bool]) -> Result<f64> {
        check_len(self.num_vars, x)?;
        Ok(self.gamma * self.constraints.squared_violation(x))
    }

    pub fn is_feasible(&self, x: &[bool]) -> Result<bool> {
        check_len(self.num_vars, x)?;
        Ok(self.constraints.is_satisfied(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Energy straight from the penalty formula, no coefficient expansion.
    fn formula_energy(inst: &Instance, alpha: f64, gamma: f64, x: &[bool]) -> f64 {
        let mut cost = 0.0;
        for t in inst.triplets() {
            let (i, j, k) = (t.i, t.j, t.k);
            let a = inst.segment_ordinal(i, j).unwrap();
            let b = inst.segment_ordinal(j, k).unwrap();
            if x[a] && x[b] {
                cost += t.cost;
            }
        }
        let mut pen = 0.0;
        for h in 0..inst.num_hits() {
            let layer = inst.hits()[h].layer;
            if layer > 1 {
                let s: f64 = inst.segments().iter().enumerate().filter(|(v, g)| g.to == h && x[*v]).count() as f64;
                pen += (1.0 - s).powi(2);
            }
            if layer < inst.num_layers() {
                let s: f64 = inst.segments().iter().enumerate().filter(|(v, g)| g.from == h && x[*v]).count() as f64;
                pen += (1.0 - s).powi(2);
            }
        }
        alpha * cost + gamma * pen
    }

    #[test]
    fn restriction_matches_zero_fixed_energy() {
        let inst = fixtures::crossing_grid(3, 4);
        let m = build_qubm(&inst, 100.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let keep: Vec<bool> = (0..m.num_vars()).map(|_| rng.gen_bool(0.6)).collect();
        let (r, kept) = m.restrict(&keep).unwrap();
        assert_eq!(kept.len(), keep.iter().filter(|&&k| k).count());
        for _ in 0..50 {
            let y: Vec<bool> = (0..r.num_vars()).map(|_| rng.gen()).collect();
            let mut x = vec![false; m.num_vars()];
            for (i, &v) in kept.iter().enumerate() {
                x[v] = y[i];
            }
            approx::assert_relative_eq!(r.energy(&y).unwrap(), m.energy(&x).unwrap(), epsilon = 1e-9);
        }
    }

    #[test]
    fn empty_model_is_offset() {
        let m = QuboModel::from_parts(3, 4.5, vec![0.0; 3], BTreeMap::new()).unwrap();
        assert_eq!(m.energy(&[true, false, true]).unwrap(), 4.5);
    }

    #[test]
    fn tiny_linear_model() {
        let m = QuboModel::from_parts(1, 2.0, vec![-3.0], BTreeMap::new()).unwrap();
        assert_eq!(m.energy(&[true]).unwrap(), -1.0);
        assert!(matches!(m.energy(&[true, true]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn rejects_noncanonical_keys() {
        let mut q = BTreeMap::new();
        q.insert((1, 0), 1.0);
        assert!(QuboModel::from_parts(2, 0.0, vec![0.0; 2], q).is_err());
    }

    #[test]
    fn random_model_matches_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(1..12);
            let mut dense = vec![vec![0.0; n]; n];
            let mut q = BTreeMap::new();
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen_bool(0.5) {
                        let v = rng.gen_range(-5.0..5.0);
                        dense[a][b] = v;
                        q.insert((a, b), v);
                    }
                }
            }
            let lin: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let off = rng.gen_range(-5.0..5.0);
            let m = QuboModel::from_parts(n, off, lin.clone(), q).unwrap();
            let x: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
            let mut e = off;
            for a in 0..n {
                if x[a] {
                    e += lin[a];
                    for b in 0..n {
                        if x[b] {
                            e += dense[a][b];
                        }
                    }
                }
            }
            assert!((m.energy(&x).unwrap() - e).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_assignment_counts_constraints() {
        let inst = fixtures::parallel_tracks(2, 3, 100.0, 50.0);
        let gamma = 1.5;
        let m = build_qubm(&inst, 100.0, gamma).unwrap();
        let x = vec![false; m.num_vars()];
        let r = m.constraints().receive.len() as f64;
        let s = m.constraints().send.len() as f64;
        assert!((m.energy(&x).unwrap() - gamma * (r + s)).abs() < 1e-12);
    }

    #[test]
    fn feasible_energy_is_cost() {
        let inst = fixtures::parallel_tracks(2, 4, 100.0, 50.0);
        let m = build_qubm(&inst, 100.0, 1.0).unwrap();
        let x = inst.truth_assignment().unwrap();
        assert_eq!(m.penalty_part(&x).unwrap(), 0.0);
        let e = m.energy(&x).unwrap();
        assert!((e - 100.0 * inst.true_cost().unwrap()).abs() < 1e-9);
        assert!((e - m.cost_part(&x).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn exhaustive_agreement_with_formula() {
        let inst = fixtures::parallel_tracks(2, 3, 100.0, 50.0);
        let (alpha, gamma) = (100.0, 1.0);
        let m = build_qubm(&inst, alpha, gamma).unwrap();
        let n = m.num_vars();
        for bits in 0u32..(1 << n) {
            let x: Vec<bool> = (0..n).map(|v| bits >> v & 1 == 1).collect();
            let expect = formula_energy(&inst, alpha, gamma, &x);
            assert!((m.energy(&x).unwrap() - expect).abs() < 1e-9, "bits {bits:b}");
        }
    }

    #[test]
    fn flip_delta_matches_reevaluation() {
        let inst = fixtures::crossing_grid(3, 4);
        let m = build_qubm(&inst, 100.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut x: Vec<bool> = (0..m.num_vars()).map(|_| rng.gen_bool(0.3)).collect();
        for _ in 0..200 {
            let v = rng.gen_range(0..m.num_vars());
            let before = m.energy(&x).unwrap();
            let d = m.flip_delta(&x, v);
            x[v] = !x[v];
            assert!((m.energy(&x).unwrap() - before - d).abs() < 1e-9);
        }
    }

    #[test]
    fn deterministic_build() {
        let inst = fixtures::crossing_grid(3, 4);
        assert_eq!(build_qubm(&inst, 100.0, 1.0).unwrap(), build_qubm(&inst, 100.0, 1.0).unwrap());
    }
}
