use serde::Serialize;

use crate::error::Result;
use crate::instance::Instance;

use super::{check_len, check_weight, triplet_terms, DegreeConstraints};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Var {
    /// Segment variable, by segment ordinal.
    X(usize),
    /// Product variable, by triplet ordinal.
    Z(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Le,
    Eq,
}

/// `sum coef * var (sense) rhs`, every coefficient `+1` or `-1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearRow {
    pub terms: Vec<(Var, i8)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl LinearRow {
    fn le(terms: Vec<(Var, i8)>, rhs: f64) -> Self {
        Self { terms, sense: Sense::Le, rhs }
    }

    pub fn holds(&self, x: &[bool], z: &[bool]) -> bool {
        let lhs: f64 = self
            .terms
            .iter()
            .map(|&(v, c)| {
                let on = match v {
                    Var::X(i) => x[i],
                    Var::Z(i) => z[i],
                };
                if on {
                    f64::from(c)
                } else {
                    0.0
                }
            })
            .sum();
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Eq => lhs == self.rhs,
        }
    }
}

/// Binary linear program: `min sum objective_t z_t` over the rows.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub num_x: usize,
    pub alpha: f64,
    /// `(first, second)` segment variables whose product `z_t` stands for.
    pub products: Vec<(usize, usize)>,
    /// `alpha * c_t` per product variable.
    pub objective: Vec<f64>,
    pub rows: Vec<LinearRow>,
}

pub fn build_blp(instance: &Instance, alpha: f64) -> Result<LinearModel> {
    check_weight("alpha", alpha)?;
    let constraints = DegreeConstraints::from_instance(instance)?;
    let terms = triplet_terms(instance, alpha)?;

    let mut rows = Vec::with_capacity(constraints.receive.len() + constraints.send.len() + 5 * terms.len());
    for c in constraints.iter() {
        rows.push(LinearRow {
            terms: c.vars.iter().map(|&v| (Var::X(v), 1)).collect(),
            sense: Sense::Eq,
            rhs: 1.0,
        });
    }
    for (t, term) in terms.iter().enumerate() {
        let (a, b, z) = (Var::X(term.first), Var::X(term.second), Var::Z(t));
        rows.push(LinearRow::le(vec![(a, 1), (b, 1), (z, -1)], 1.0));
        rows.push(LinearRow::le(vec![(z, 1), (a, -1)], 0.0));
        rows.push(LinearRow::le(vec![(z, 1), (b, -1)], 0.0));
        rows.push(LinearRow::le(vec![(z, -1)], 0.0));
        rows.push(LinearRow::le(vec![(z, 1)], 1.0));
    }

    Ok(LinearModel {
        num_x: instance.segments().len(),
        alpha,
        products: terms.iter().map(|t| (t.first, t.second)).collect(),
        objective: terms.iter().map(|t| t.coefficient).collect(),
        rows,
    })
}

impl LinearModel {
    pub fn num_z(&self) -> usize {
        self.products.len()
    }

    pub fn objective_value(&self, z: &[bool]) -> Result<f64> {
        check_len(self.num_z(), z)?;
        Ok(self
            .objective
            .iter()
            .zip(z)
            .filter(|(_, &on)| on)
            .map(|(c, _)| c)
            .sum())
    }

    pub fn satisfies(&self, x: &[bool], z: &[bool]) -> Result<bool> {
        check_len(self.num_x, x)?;
        check_len(self.num_z(), z)?;
        Ok(self.rows.iter().all(|r| r.holds(x, z)))
    }

    /// `z_t = x_first * x_second`.
    pub fn products_of(&self, x: &[bool]) -> Result<Vec<bool>> {
        check_len(self.num_x, x)?;
        Ok(self.products.iter().map(|&(a, b)| x[a] && x[b]).collect())
    }

    /// Cheapest product assignment allowed by the product rows at fixed `x`:
    /// `max(0, x_a + x_b - 1) <= z <= min(x_a, x_b)`, chosen per variable.
    pub fn best_z(&self, x: &[bool]) -> Result<Vec<bool>> {
        check_len(self.num_x, x)?;
        Ok(self
            .products
            .iter()
            .zip(&self.objective)
            .map(|(&(a, b), &c)| {
                let (xa, xb) = (u8::from(x[a]), u8::from(x[b]));
                let lower = (xa + xb).saturating_sub(1);
                let upper = xa.min(xb);
                let z = if c < 0.0 { upper } else { lower };
                z == 1
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::formulation::build_qcbm;

    #[test]
    fn glover_truth_table() {
        let inst = fixtures::parallel_tracks(1, 3, 100.0, 0.0);
        let m = build_blp(&inst, 100.0).unwrap();
        assert_eq!(m.num_z(), 1);
        // degree rows are satisfied by [1, 1] only; check the product rows alone
        let product_rows: Vec<&LinearRow> = m.rows.iter().filter(|r| r.sense == Sense::Le).collect();
        assert_eq!(product_rows.len(), 5);
        let ok = |x: [bool; 2], z: bool| product_rows.iter().all(|r| r.holds(&x, &[z]));
        assert!(ok([true, true], true));
        assert!(!ok([true, true], false));
        assert!(ok([true, false], false));
        assert!(!ok([true, false], true));
        assert!(!ok([false, true], true));
        assert!(ok([false, false], false));
        assert!(!ok([false, false], true));
    }

    #[test]
    fn coefficients_are_unit() {
        let inst = fixtures::crossing_grid(3, 4);
        let m = build_blp(&inst, 100.0).unwrap();
        assert!(m.rows.iter().flat_map(|r| &r.terms).all(|&(_, c)| c == 1 || c == -1));
        assert_eq!(m.num_z(), inst.triplets().len());
    }

    #[test]
    fn objective_matches_qcbm_on_feasible_points() {
        let inst = fixtures::parallel_tracks(2, 3, 100.0, 40.0);
        let blp = build_blp(&inst, 100.0).unwrap();
        let qcbm = build_qcbm(&inst, 100.0).unwrap();
        let n = blp.num_x;
        let mut feasible = 0;
        for bits in 0u32..(1 << n) {
            let x: Vec<bool> = (0..n).map(|v| bits >> v & 1 == 1).collect();
            if !qcbm.is_feasible(&x).unwrap() {
                continue;
            }
            feasible += 1;
            let z = blp.products_of(&x).unwrap();
            assert!(blp.satisfies(&x, &z).unwrap());
            assert_eq!(blp.objective_value(&z).unwrap(), qcbm.objective(&x).unwrap());
            assert_eq!(blp.best_z(&x).unwrap(), z);
        }
        // two perfect matchings per gap
        assert_eq!(feasible, 4);
    }
}
