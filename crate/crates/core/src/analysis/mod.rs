//! Executable counterparts of the equilibrium, invariance and convergence
//! results for the reflected-appraisal perception dynamics.

mod conditions;
mod contraction;
mod equilibrium;
mod invariance;
mod star;

pub use conditions::{
    check_condition, check_dominance_necessary, stubborn_gains, ConditionId, ConditionReport,
    DominanceReport, NodeMargin,
};
pub use contraction::{contraction_diagnostic, ContractionReport};
pub use equilibrium::{solve_equilibrium, EquilibriumReport, AGREEMENT_TOL};
pub use invariance::{
    build_invariant_set_h, build_invariant_set_m, one_step_invariance_test, Exit,
    InvarianceReport,
};
pub use star::{
    monotonicity_test_star, star_equilibrium_closed_form, star_full_center_box,
    star_partial_center_box, Direction, MonotonicityReport, StarPartialBox,
};

use nalgebra::DVector;

use crate::error::{Error, Result};

/// Axis-aligned region `{x : mu <= x <= nu}`. Infinite bounds are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalBox {
    pub mu: DVector<f64>,
    pub nu: DVector<f64>,
}

impl IntervalBox {
    pub fn new(mu: DVector<f64>, nu: DVector<f64>) -> Result<Self> {
        if mu.len() != nu.len() {
            return Err(Error::Dimension(format!(
                "box bounds have lengths {} and {}",
                mu.len(),
                nu.len()
            )));
        }
        if let Some(i) = (0..mu.len()).find(|&i| !(mu[i] <= nu[i])) {
            return Err(Error::InvalidStructure(format!(
                "box lower bound exceeds upper bound at coordinate {}",
                i + 1
            )));
        }
        Ok(IntervalBox { mu, nu })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn contains(&self, p: &DVector<f64>) -> bool {
        p.iter().enumerate().all(|(i, &v)| self.mu[i] <= v && v <= self.nu[i])
    }

    /// Copy with every upper bound multiplied by `factor`.
    pub fn scale_upper(&self, factor: f64) -> Self {
        IntervalBox { mu: self.mu.clone(), nu: &self.nu * factor }
    }
}

impl std::fmt::Display for IntervalBox {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.dim() {
            writeln!(f, "  p_{}: [{:.6}, {:.6}]", i + 1, self.mu[i], self.nu[i])?;
        }
        Ok(())
    }
}
