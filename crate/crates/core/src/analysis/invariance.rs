use nalgebra::DVector;

use super::conditions::stubborn_gains;
use super::IntervalBox;
use crate::error::{Error, Result};
use crate::network::InfluenceNetwork;
use crate::perception::step_perception_ra;
use crate::random::{box_point, rng};

/// Absolute slack for membership after one step, scaled by `max(1, |bound|)`.
pub const EXIT_SLACK: f64 = 1e-12;

/// Keeps the report small on badly non-invariant boxes.
const MAX_RECORDED_EXITS: usize = 32;

/// `H = [0, nu]` with `nu_i = 1/n + b_i/4` on `Vf` and `1/2` on `Vp`.
pub fn build_invariant_set_h(net: &InfluenceNetwork) -> IntervalBox {
    let n = net.n();
    let (b, _) = stubborn_gains(net);
    let nu = DVector::from_fn(n, |i, _| {
        if net.is_fully_stubborn(i) {
            1.0 / n as f64 + b[i] / 4.0
        } else {
            0.5
        }
    });
    IntervalBox { mu: DVector::zeros(n), nu }
}

/// `M = [mu, nu]` with the extremal admissible bounds on `Vf`.
pub fn build_invariant_set_m(net: &InfluenceNetwork) -> IntervalBox {
    let n = net.n();
    let inv_n = 1.0 / n as f64;
    let (b, d) = stubborn_gains(net);
    let a = net.a();
    let mut mu = DVector::zeros(n);
    let mut nu = DVector::zeros(n);
    for i in 0..n {
        if net.is_fully_stubborn(i) {
            mu[i] = inv_n - d[i] / 4.0;
            nu[i] = inv_n + b[i] / 4.0;
        } else {
            mu[i] = -(1.0 - a[i]) / (4.0 * a[i]);
            nu[i] = (1.0 + a[i]) / (4.0 * a[i]);
        }
    }
    IntervalBox { mu, nu }
}

/// A sample whose image left the box.
#[derive(Debug, Clone, PartialEq)]
pub struct Exit {
    pub point: DVector<f64>,
    pub image: DVector<f64>,
    /// Coordinate with the largest excursion.
    pub coordinate: usize,
    /// Distance outside the box along `coordinate`.
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub samples: usize,
    pub exits: usize,
    /// First few exits, capped.
    pub examples: Vec<Exit>,
    pub worst_magnitude: f64,
}

impl InvarianceReport {
    pub fn invariant(&self) -> bool {
        self.exits == 0
    }
}

impl std::fmt::Display for InvarianceReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "[invariance]")?;
        writeln!(f, "samples = {}", self.samples)?;
        writeln!(f, "exits = {}", self.exits)?;
        writeln!(f, "worst_magnitude = {:e}", self.worst_magnitude)?;
        for e in &self.examples {
            writeln!(f, "exit = {{ coordinate = {}, magnitude = {:e} }}", e.coordinate + 1, e.magnitude)?;
        }
        Ok(())
    }
}

fn excursion(bx: &IntervalBox, p: &DVector<f64>) -> Option<(usize, f64)> {
    let mut worst: Option<(usize, f64)> = None;
    for i in 0..p.len() {
        let below = bx.mu[i] - p[i] - EXIT_SLACK * bx.mu[i].abs().max(1.0);
        let above = p[i] - bx.nu[i] - EXIT_SLACK * bx.nu[i].abs().max(1.0);
        let m = below.max(above);
        if m > 0.0 || p[i].is_nan() {
            let m = if p[i].is_nan() { f64::INFINITY } else { m };
            if worst.is_none_or(|(_, w)| m > w) {
                worst = Some((i, m));
            }
        }
    }
    worst
}

/// Draws uniform samples from `bx`, applies one reflected-appraisal step to
/// each, and counts images outside `bx`.
pub fn one_step_invariance_test(
    net: &InfluenceNetwork,
    bx: &IntervalBox,
    samples: usize,
    seed: u64,
) -> Result<InvarianceReport> {
    if bx.dim() != net.n() {
        return Err(Error::Dimension(format!("box has {} coordinates, network {}", bx.dim(), net.n())));
    }
    if let Some(i) = (0..bx.dim()).find(|&i| !bx.mu[i].is_finite() || !bx.nu[i].is_finite()) {
        return Err(Error::UnboundedBox(i + 1));
    }
    let mut r = rng(seed);
    let mut report = InvarianceReport { samples, exits: 0, examples: Vec::new(), worst_magnitude: 0.0 };
    for _ in 0..samples {
        let p = box_point(&mut r, &bx.mu, &bx.nu);
        let image = step_perception_ra(net, &p);
        if let Some((coordinate, magnitude)) = excursion(bx, &image) {
            report.exits += 1;
            report.worst_magnitude = report.worst_magnitude.max(magnitude);
            if report.examples.len() < MAX_RECORDED_EXITS {
                report.examples.push(Exit { point: p, image, coordinate, magnitude });
            }
        }
    }
    Ok(report)
}
