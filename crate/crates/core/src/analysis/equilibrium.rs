use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::fj::step_power_evolution_issue;
use crate::network::InfluenceNetwork;
use crate::perception::{try_run_to_convergence, RunOptions, Status};
use crate::random::{rng, simplex_point};

/// Two converged starts count as the same equilibrium within this sup-norm gap.
pub const AGREEMENT_TOL: f64 = 1e-8;

/// Multistart evidence for a unique equilibrium in the simplex.
///
/// Agreement of all starts corroborates uniqueness; it does not prove it.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub p_star: DVector<f64>,
    /// `||G(p*) - p*||_inf` for the issue-indexed power map `G`.
    pub residual: f64,
    /// Iterations used by the run that produced `p_star`.
    pub iterations: usize,
    pub starts_agreeing: usize,
    pub total_starts: usize,
    pub converged_starts: usize,
    /// Largest pairwise sup-norm gap between converged limits.
    pub spread: f64,
    pub in_simplex: bool,
    pub interior: bool,
}

impl EquilibriumReport {
    pub fn unique_evidence(&self) -> bool {
        self.starts_agreeing == self.total_starts
    }
}

impl std::fmt::Display for EquilibriumReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "[equilibrium]")?;
        let p: Vec<String> = self.p_star.iter().map(|v| format!("{v:.12e}")).collect();
        writeln!(f, "p_star = [{}]", p.join(", "))?;
        writeln!(f, "residual = {:e}", self.residual)?;
        writeln!(f, "iterations = {}", self.iterations)?;
        writeln!(f, "starts_agreeing = {}/{}", self.starts_agreeing, self.total_starts)?;
        writeln!(f, "spread = {:e}", self.spread)?;
        writeln!(f, "in_simplex = {}", self.in_simplex)?;
        writeln!(f, "interior = {}", self.interior)?;
        writeln!(
            f,
            "uniqueness_evidence = {}",
            if self.unique_evidence() { "all starts agree" } else { "starts disagree" }
        )
    }
}

/// Iterates the issue-indexed power evolution from the barycenter and from
/// `multistarts` random simplex points.
pub fn solve_equilibrium(
    net: &InfluenceNetwork,
    multistarts: usize,
    seed: u64,
    opts: RunOptions,
) -> Result<EquilibriumReport> {
    let n = net.n();
    let mut r = rng(seed);
    let mut starts = vec![DVector::from_element(n, 1.0 / n as f64)];
    starts.extend((0..multistarts).map(|_| simplex_point(&mut r, n)));

    let mut limits = Vec::new();
    for x0 in &starts {
        let t = try_run_to_convergence(|x| step_power_evolution_issue(net, x), x0.clone(), opts)?;
        if t.status == Status::Converged {
            limits.push((t.last().clone(), t.iterations()));
        }
    }
    let Some((p_star, iterations)) = limits.first().cloned() else {
        return Err(Error::NoConvergence { max_iter: opts.max_iter });
    };

    let starts_agreeing = limits
        .iter()
        .filter(|(x, _)| (x - &p_star).amax() <= AGREEMENT_TOL)
        .count();
    let mut spread: f64 = 0.0;
    for (i, (x, _)) in limits.iter().enumerate() {
        for (y, _) in &limits[i + 1..] {
            spread = spread.max((x - y).amax());
        }
    }
    let residual = (step_power_evolution_issue(net, &p_star)? - &p_star).amax();
    let in_simplex = (p_star.sum() - 1.0).abs() <= 1e-9 && p_star.min() >= -1e-12;
    let interior = in_simplex && p_star.min() > 0.0;
    Ok(EquilibriumReport {
        p_star,
        residual,
        iterations,
        starts_agreeing,
        total_starts: starts.len(),
        converged_starts: limits.len(),
        spread,
        in_simplex,
        interior,
    })
}
