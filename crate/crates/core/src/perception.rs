//! Distributed perception of social power.
//!
//! Every stepper here computes each node's next perception from that node's
//! [`LocalView`] alone: its own susceptibility, the group size, and for each
//! in-neighbor `j` the pair `(a_j, C_ji)` (plus `gamma_j` when there are no
//! reflected appraisals). The matrix ("compact") forms are kept alongside as
//! an independent route for checking.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fj::influence_matrix;
use crate::network::InfluenceNetwork;

/// Default magnitude beyond which a run is classified as diverged.
pub const DEFAULT_DIVERGENCE_BOUND: f64 = 1e9;

/// What node `node` may know about an in-neighbor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborData {
    pub id: usize,
    pub a: f64,
    /// `C_ji`: the weight the neighbor accords to `node`.
    pub weight: f64,
    /// Only present in the mode without reflected appraisals.
    pub gamma: Option<f64>,
}

impl NeighborData {
    /// `a_j / (1 - a_j) * C_ji`, the neighbor's contribution factor.
    fn gain(&self) -> f64 {
        self.a / (1.0 - self.a) * self.weight
    }
}

/// The complete information set of one node.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalView {
    pub node: usize,
    pub n: usize,
    pub a: f64,
    pub gamma: Option<f64>,
    /// Sorted by ascending id.
    pub in_neighbors: Vec<NeighborData>,
}

impl LocalView {
    /// View for the reflected-appraisal dynamics.
    pub fn reflected(net: &InfluenceNetwork, node: usize) -> Self {
        Self::build(net, node, None)
    }

    /// View for the dynamics with fixed self-appraisals `gamma`.
    pub fn with_gamma(net: &InfluenceNetwork, node: usize, gamma: &DVector<f64>) -> Self {
        Self::build(net, node, Some(gamma))
    }

    fn build(net: &InfluenceNetwork, node: usize, gamma: Option<&DVector<f64>>) -> Self {
        let in_neighbors = net
            .in_neighbors(node)
            .into_iter()
            .map(|j| NeighborData {
                id: j,
                a: net.a()[j],
                weight: net.c()[(j, node)],
                gamma: gamma.map(|g| g[j]),
            })
            .collect();
        LocalView {
            node,
            n: net.n(),
            a: net.a()[node],
            gamma: gamma.map(|g| g[node]),
            in_neighbors,
        }
    }

    pub fn neighbor_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.in_neighbors.iter().map(|d| d.id)
    }

    /// `p_i' = (1-a_i)/n + a_i gamma_i p_i + (1-a_i) sum_j a_j/(1-a_j) C_ji (1-gamma_j) p_j`.
    ///
    /// `neighbor_p` is aligned with `in_neighbors`.
    pub fn update_fixed_appraisal(&self, own_p: f64, neighbor_p: &[f64]) -> f64 {
        debug_assert_eq!(neighbor_p.len(), self.in_neighbors.len());
        let gamma = self.gamma.expect("view built without self-appraisals");
        let mut acc = 0.0;
        for (d, &pj) in self.in_neighbors.iter().zip(neighbor_p) {
            let gj = d.gamma.expect("neighbor without self-appraisal");
            acc += d.gain() * (1.0 - gj) * pj;
        }
        (1.0 - self.a) / self.n as f64 + self.a * gamma * own_p + (1.0 - self.a) * acc
    }

    /// `p_i' = (1-a_i)/n + a_i p_i^2 + (1-a_i) sum_j a_j/(1-a_j) C_ji p_j (1-p_j)`.
    pub fn update_reflected(&self, own_p: f64, neighbor_p: &[f64]) -> f64 {
        debug_assert_eq!(neighbor_p.len(), self.in_neighbors.len());
        let mut acc = 0.0;
        for (d, &pj) in self.in_neighbors.iter().zip(neighbor_p) {
            acc += d.gain() * pj * (1.0 - pj);
        }
        (1.0 - self.a) / self.n as f64 + self.a * own_p * own_p + (1.0 - self.a) * acc
    }
}

fn gather(view: &LocalView, p: &DVector<f64>) -> Vec<f64> {
    view.neighbor_ids().map(|j| p[j]).collect()
}

/// Perception update with fixed self-appraisals, node by node.
pub fn step_perception_no_ra(
    net: &InfluenceNetwork,
    gamma: &DVector<f64>,
    p: &DVector<f64>,
) -> DVector<f64> {
    DVector::from_fn(net.n(), |i, _| {
        let view = LocalView::with_gamma(net, i, gamma);
        view.update_fixed_appraisal(p[i], &gather(&view, p))
    })
}

/// Perception update with reflected appraisals (`gamma = p`), node by node.
/// Serves both the issue-indexed and the single-timescale variant.
pub fn step_perception_ra(net: &InfluenceNetwork, p: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(net.n(), |i, _| {
        let view = LocalView::reflected(net, i);
        view.update_reflected(p[i], &gather(&view, p))
    })
}

fn one_minus(a: &DVector<f64>) -> DVector<f64> {
    a.map(|ai| 1.0 - ai)
}

/// Compact form `(I-A) W(gamma)^T A (I-A)^{-1} p + (I-A) 1/n`.
pub fn no_ra_compact(
    net: &InfluenceNetwork,
    gamma: &DVector<f64>,
    p: &DVector<f64>,
) -> DVector<f64> {
    let n = net.n();
    let a = net.a();
    let stub = one_minus(a);
    let w = influence_matrix(net.c(), gamma);
    let scaled = p.component_div(&stub).component_mul(a);
    let inner = w.transpose() * scaled;
    inner.component_mul(&stub) + stub / n as f64
}

/// Compact form of the reflected-appraisal update (`gamma = p`).
pub fn ra_compact(net: &InfluenceNetwork, p: &DVector<f64>) -> DVector<f64> {
    no_ra_compact(net, p, p)
}

/// Homogeneous-stubbornness update `p' = a W(p)^T p + (1-a)/n 1`.
pub fn step_pagerank_ra(net: &InfluenceNetwork, p: &DVector<f64>) -> Result<DVector<f64>> {
    let a = net.homogeneous_susceptibility().ok_or(Error::NotHomogeneous)?;
    let n = net.n();
    let w = influence_matrix(net.c(), p);
    Ok((w.transpose() * p) * a + DVector::from_element(n, (1.0 - a) / n as f64))
}

/// DeGroot perception `p' = W(gamma)^T p`, kept for comparison only; it
/// converges to the DeGroot power only when `1^T p(0) = 1`.
pub fn step_degroot_perception(
    c: &DMatrix<f64>,
    gamma: &DVector<f64>,
    p: &DVector<f64>,
) -> DVector<f64> {
    influence_matrix(c, gamma).transpose() * p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    Diverged,
    MaxIter,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Converged => "converged",
            Status::Diverged => "diverged",
            Status::MaxIter => "max-iter",
        })
    }
}

/// Whether consecutive states are issues (`s`) or opinion steps (`k`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Timescale {
    Issue,
    Step,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub divergence_bound: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { tol: 1e-12, max_iter: 100_000, divergence_bound: DEFAULT_DIVERGENCE_BOUND }
    }
}

impl RunOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `states[0]` is the initial state.
    pub states: Vec<DVector<f64>>,
    pub status: Status,
    pub timescale: Timescale,
}

impl Trajectory {
    pub fn iterations(&self) -> usize {
        self.states.len() - 1
    }

    pub fn last(&self) -> &DVector<f64> {
        self.states.last().expect("trajectory always holds the initial state")
    }

    pub fn with_timescale(mut self, timescale: Timescale) -> Self {
        self.timescale = timescale;
        self
    }

    /// Fits `||p(t) - target||_inf ~ C lambda^t` by least squares on the log
    /// errors over the states whose error is still above `floor`.
    /// Returns `(C, lambda)`, or `None` with fewer than three usable points.
    pub fn decay_fit(&self, target: &DVector<f64>, floor: f64) -> Option<(f64, f64)> {
        let pts: Vec<(f64, f64)> = self
            .states
            .iter()
            .enumerate()
            .map(|(t, s)| (t as f64, (s - target).amax()))
            .filter(|&(_, e)| e > floor)
            .map(|(t, e)| (t, e.ln()))
            .collect();
        if pts.len() < 3 {
            return None;
        }
        let m = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
        let (mx, my) = (sx / m, sy / m);
        let sxx: f64 = pts.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
        let sxy: f64 = pts.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
        let slope = sxy / sxx;
        Some(((my - slope * mx).exp(), slope.exp()))
    }
}

/// Iterates `stepper` from `p0` until the sup-norm step falls below `tol`,
/// a coordinate exceeds the divergence bound, or `max_iter` steps elapse.
pub fn run_to_convergence<F>(mut stepper: F, p0: DVector<f64>, opts: RunOptions) -> Trajectory
where
    F: FnMut(&DVector<f64>) -> DVector<f64>,
{
    try_run_to_convergence(|p| Ok(stepper(p)), p0, opts)
        .expect("infallible stepper")
}

/// As [`run_to_convergence`] for steppers that can fail (linear solves).
pub fn try_run_to_convergence<F>(
    mut stepper: F,
    p0: DVector<f64>,
    opts: RunOptions,
) -> Result<Trajectory>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    assert!(opts.tol > 0.0 && opts.max_iter >= 1);
    let mut states = vec![p0];
    let mut status = Status::MaxIter;
    for _ in 0..opts.max_iter {
        let cur = states.last().unwrap();
        let next = stepper(cur)?;
        let diverged = next
            .iter()
            .any(|v| !v.is_finite() || v.abs() > opts.divergence_bound);
        let step = (&next - cur).amax();
        states.push(next);
        if diverged {
            status = Status::Diverged;
            break;
        }
        if step < opts.tol {
            status = Status::Converged;
            break;
        }
    }
    Ok(Trajectory { states, status, timescale: Timescale::Issue })
}
