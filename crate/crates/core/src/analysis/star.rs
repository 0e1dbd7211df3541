use nalgebra::DVector;

use super::IntervalBox;
use crate::error::{Error, Result};
use crate::network::{InfluenceNetwork, TopologyClass};
use crate::perception::{run_to_convergence, step_perception_ra, RunOptions, Status};

/// Stable root of `a p^2 - p + (1-a) m = 0`, the smaller one.
fn small_root(a: f64, m: f64) -> Result<f64> {
    let disc = 1.0 - 4.0 * a * (1.0 - a) * m;
    if disc < 0.0 {
        return Err(Error::InvalidStructure(format!(
            "closed form has no real root (discriminant {disc:.3e})"
        )));
    }
    // Rationalized form avoids cancellation for small a.
    Ok(2.0 * (1.0 - a) * m / (1.0 + disc.sqrt()))
}

/// Equilibrium of an isolated partially stubborn leaf, in `((1-a)/n, 1/n)`.
fn leaf_value(a: f64, n: usize) -> Result<f64> {
    small_root(a, 1.0 / n as f64)
}

/// Closed-form equilibrium of the reflected-appraisal dynamics on a star.
///
/// The partially stubborn center case also needs `C_1j = 0` for every
/// partially stubborn leaf `j`.
pub fn star_equilibrium_closed_form(net: &InfluenceNetwork) -> Result<DVector<f64>> {
    let n = net.n();
    let inv_n = 1.0 / n as f64;
    let a = net.a();
    let c = net.c();
    match net.classify_topology() {
        TopologyClass::General => Err(Error::NotStar),
        TopologyClass::StarFullyStubbornCenter(center) => {
            let mut p = DVector::from_element(n, inv_n);
            let mut acc = 0.0;
            for j in (0..n).filter(|&j| j != center && net.is_partially_stubborn(j)) {
                p[j] = leaf_value(a[j], n)?;
                acc += a[j] * (1.0 - p[j]) / (1.0 - a[j] * p[j]);
            }
            p[center] = inv_n + inv_n * acc;
            Ok(p)
        }
        TopologyClass::StarPartiallyStubbornCenter(center) => {
            let leaves_p: Vec<usize> =
                (0..n).filter(|&j| j != center && net.is_partially_stubborn(j)).collect();
            if let Some(&j) = leaves_p.iter().find(|&&j| c[(center, j)] != 0.0) {
                return Err(Error::InvalidStructure(format!(
                    "center {} assigns weight to partially stubborn leaf {}",
                    center + 1,
                    j + 1
                )));
            }
            let mut p = DVector::zeros(n);
            let mut leaf_sum = 0.0;
            for &j in &leaves_p {
                p[j] = leaf_value(a[j], n)?;
                leaf_sum += p[j];
            }
            let vp = (leaves_p.len() + 1) as f64;
            let m = (vp - n as f64 * leaf_sum) / n as f64;
            p[center] = small_root(a[center], m)?;
            let slack = vp / n as f64 - leaf_sum - p[center];
            for j in (0..n).filter(|&j| j != center && net.is_fully_stubborn(j)) {
                p[j] = inv_n + c[(center, j)] * slack;
            }
            Ok(p)
        }
    }
}

fn require_star(net: &InfluenceNetwork, want_full: bool, what: &str) -> Result<usize> {
    match (net.classify_topology(), want_full) {
        (TopologyClass::StarFullyStubbornCenter(c), true) => Ok(c),
        (TopologyClass::StarPartiallyStubbornCenter(c), false) => Ok(c),
        (TopologyClass::General, _) => Err(Error::NotStar),
        (other, _) => Err(Error::WrongTopology {
            condition: what.into(),
            reason: format!("network is a {other}"),
        }),
    }
}

/// Box `[0, 1 + alpha e_center]` for a star with fully stubborn center, and `alpha`.
pub fn star_full_center_box(net: &InfluenceNetwork) -> Result<(IntervalBox, f64)> {
    let center = require_star(net, true, "fully stubborn center box")?;
    let n = net.n();
    let a = net.a();
    let gain: f64 = net.partially_stubborn().iter().map(|&j| a[j] / (1.0 - a[j])).sum();
    let alpha = gain / 4.0 - (n as f64 - 1.0) / n as f64;
    let mut nu = DVector::from_element(n, 1.0);
    nu[center] += alpha;
    IntervalBox::new(DVector::zeros(n), nu).map(|b| (b, alpha))
}

/// Boxes attached to a star with partially stubborn center.
#[derive(Debug, Clone, PartialEq)]
pub struct StarPartialBox {
    pub center: usize,
    /// Lower bound `1/n - |2a_1-1|/(4a_1(1-a_1))` on fully stubborn leaves.
    pub operational: IntervalBox,
    /// The lower bound written as `|2a_1-1|/(4a_1(1-a_1)) - 1/n` on fully stubborn leaves.
    pub statement_mu: DVector<f64>,
    /// Whether `statement_mu <= operational.nu`.
    pub statement_consistent: bool,
    /// Upper corner of the basin `[0, nu']`.
    pub nu_prime: DVector<f64>,
}

pub fn star_partial_center_box(net: &InfluenceNetwork) -> Result<StarPartialBox> {
    let center = require_star(net, false, "partially stubborn center box")?;
    let n = net.n();
    let inv_n = 1.0 / n as f64;
    let a1 = net.a()[center];
    let spread = (2.0 * a1 - 1.0).abs() / (4.0 * a1 * (1.0 - a1));
    let mut mu = DVector::zeros(n);
    let mut statement_mu = DVector::zeros(n);
    let mut nu = DVector::from_element(n, 1.0);
    let mut nu_prime = DVector::from_element(n, 1.0);
    nu[center] = 1.0 / (2.0 * a1);
    nu_prime[center] = 1.0 / (2.0 * a1);
    for j in (0..n).filter(|&j| net.is_fully_stubborn(j)) {
        mu[j] = inv_n - spread;
        statement_mu[j] = spread - inv_n;
        nu[j] = inv_n + a1 / (4.0 * (1.0 - a1));
    }
    let statement_consistent = statement_mu.iter().zip(nu.iter()).all(|(m, v)| m <= v);
    Ok(StarPartialBox {
        center,
        operational: IntervalBox::new(mu, nu)?,
        statement_mu,
        statement_consistent,
        nu_prime,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
    Constant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub p_star: DVector<f64>,
    pub status: Status,
    pub iterations: usize,
    /// Direction of each partially stubborn leaf, from `p(0)` versus `p*`.
    pub leaf_directions: Vec<(usize, Direction)>,
    /// `(step, node)` of the first wrong-way move of a leaf.
    pub first_violation: Option<(usize, usize)>,
    /// Direction implied by the initial leaf values, when they are all on one side.
    pub center_expected: Option<Direction>,
    pub center_observed: Direction,
    /// First step from which the center moves monotonically.
    pub center_monotone_from: usize,
}

impl MonotonicityReport {
    pub fn leaves_monotone(&self) -> bool {
        self.first_violation.is_none()
    }

    pub fn center_consistent(&self) -> bool {
        match self.center_expected {
            Some(d) => self.center_observed == d || self.center_observed == Direction::Constant,
            None => true,
        }
    }
}

/// Moves smaller than this count as stationary.
const MOVE_EPS: f64 = 1e-15;

fn direction_of(delta: f64, scale: f64) -> Direction {
    if delta > MOVE_EPS * scale.max(1.0) {
        Direction::Increasing
    } else if delta < -MOVE_EPS * scale.max(1.0) {
        Direction::Decreasing
    } else {
        Direction::Constant
    }
}

/// Runs the reflected-appraisal dynamics on a star with fully stubborn
/// center and checks leaf monotonicity and eventual center monotonicity.
pub fn monotonicity_test_star(
    net: &InfluenceNetwork,
    p0: &DVector<f64>,
    opts: RunOptions,
) -> Result<MonotonicityReport> {
    let center = require_star(net, true, "star monotonicity")?;
    let p_star = star_equilibrium_closed_form(net)?;
    let traj = run_to_convergence(|p| step_perception_ra(net, p), p0.clone(), opts);
    let leaves: Vec<usize> =
        (0..net.n()).filter(|&j| j != center && net.is_partially_stubborn(j)).collect();

    let leaf_directions: Vec<(usize, Direction)> = leaves
        .iter()
        .map(|&j| (j, direction_of(p_star[j] - p0[j], p_star[j].abs())))
        .collect();

    let mut first_violation = None;
    'outer: for s in 0..traj.states.len().saturating_sub(1) {
        for &(j, dir) in &leaf_directions {
            let (x, y) = (traj.states[s][j], traj.states[s + 1][j]);
            let moved = direction_of(y - x, x.abs());
            let wrong_way = match dir {
                Direction::Increasing => moved == Direction::Decreasing || y > p_star[j] + 1e-12,
                Direction::Decreasing => moved == Direction::Increasing || y < p_star[j] - 1e-12,
                Direction::Constant => moved != Direction::Constant,
            };
            if wrong_way {
                first_violation = Some((s, j));
                break 'outer;
            }
        }
    }

    let center_expected = if leaves.iter().all(|&j| p0[j] <= p_star[j]) {
        Some(Direction::Increasing)
    } else if leaves.iter().all(|&j| p0[j] >= p_star[j]) {
        Some(Direction::Decreasing)
    } else {
        None
    };

    let steps: Vec<Direction> = traj
        .states
        .windows(2)
        .map(|w| direction_of(w[1][center] - w[0][center], w[0][center].abs()))
        .collect();
    let center_observed = steps
        .iter()
        .rev()
        .copied()
        .find(|&d| d != Direction::Constant)
        .unwrap_or(Direction::Constant);
    let center_monotone_from = steps
        .iter()
        .rposition(|&d| d != center_observed && d != Direction::Constant)
        .map_or(0, |k| k + 1);

    Ok(MonotonicityReport {
        p_star,
        status: traj.status,
        iterations: traj.iterations(),
        leaf_directions,
        first_violation,
        center_expected,
        center_observed,
        center_monotone_from,
    })
}
