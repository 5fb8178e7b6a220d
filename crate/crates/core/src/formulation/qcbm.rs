use crate::error::Result;
use crate::instance::Instance;

use super::{check_len, check_weight, triplet_terms, DegreeConstraints, QuadraticTerm};

/// Minimise `sum coefficient * x_first * x_second` subject to the degree
/// equalities.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedModel {
    pub num_vars: usize,
    pub alpha: f64,
    pub terms: Vec<QuadraticTerm>,
    pub constraints: DegreeConstraints,
}

pub fn build_qcbm(instance: &Instance, alpha: f64) -> Result<ConstrainedModel> {
    check_weight("alpha", alpha)?;
    let constraints = DegreeConstraints::from_instance(instance)?;
    Ok(ConstrainedModel {
        num_vars: instance.segments().len(),
        alpha,
        terms: triplet_terms(instance, alpha)?,
        constraints,
    })
}

impl ConstrainedModel {
    pub fn objective(&self, x: &[bool]) -> Result<f64> {
        check_len(self.num_vars, x)?;
        Ok(self
            .terms
            .iter()
            .filter(|t| x[t.first] && x[t.second])
            .map(|t| t.coefficient)
            .sum())
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
    use crate::formulation::DEFAULT_ALPHA;

    #[test]
    fn single_track_structure() {
        let inst = fixtures::parallel_tracks(1, 3, 100.0, 0.0);
        let m = build_qcbm(&inst, DEFAULT_ALPHA).unwrap();
        assert_eq!(m.num_vars, 2);
        assert_eq!(m.terms.len(), 1);
        assert_eq!((m.terms[0].first, m.terms[0].second), (0, 1));
        assert!((m.terms[0].coefficient - 100.0 * -0.005).abs() < 1e-12);
        // middle and last hit receive, first and middle hit send
        assert_eq!(m.constraints.receive.len(), 2);
        assert_eq!(m.constraints.send.len(), 2);
        assert!(m.constraints.iter().all(|c| c.vars.len() == 1));
    }

    #[test]
    fn two_track_counts() {
        // 2 hits per layer, 3 layers: 2 * 2 segments per gap, 2 * 2 * 2 triplets
        let inst = fixtures::parallel_tracks(2, 3, 100.0, 50.0);
        let m = build_qcbm(&inst, 1.0).unwrap();
        let by_count: usize = (0..2).map(|_| 2 * 2).sum();
        assert_eq!(m.num_vars, by_count);
        assert_eq!(m.terms.len(), 2 * 2 * 2);
        assert_eq!(m.constraints.receive.len(), 4);
        assert_eq!(m.constraints.send.len(), 4);
    }

    #[test]
    fn objective_is_alpha_times_truth_cost() {
        let inst = fixtures::parallel_tracks(2, 4, 100.0, 80.0);
        let m = build_qcbm(&inst, 100.0).unwrap();
        let x = inst.truth_assignment().unwrap();
        assert!(m.is_feasible(&x).unwrap());
        let obj = m.objective(&x).unwrap();
        assert!((obj - 100.0 * inst.true_cost().unwrap()).abs() < 1e-12);
        assert!(m.objective(&x[1..]).is_err());
    }

    #[test]
    fn rejects_nonpositive_alpha() {
        let inst = fixtures::parallel_tracks(1, 3, 100.0, 0.0);
        assert!(build_qcbm(&inst, 0.0).is_err());
    }
}
