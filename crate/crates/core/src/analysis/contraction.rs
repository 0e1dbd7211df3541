use nalgebra::{DMatrix, DVector};

use crate::network::InfluenceNetwork;
use crate::perception::step_perception_ra;

/// Step used for the central-difference check.
pub const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    /// Jacobian of the reflected-appraisal map at `p`.
    pub df: DMatrix<f64>,
    /// `(I-A)^{-1} df (I-A)`, entries `2 a_i p_i` and `C_ji a_j (1-2p_j)`.
    pub j: DMatrix<f64>,
    /// Max column sum of `|J|`.
    pub norm_1: f64,
    /// `max_j a_j (2|p_j| + |1-2p_j|)`.
    pub norm_formula: f64,
    /// `||FD - df||_max / ||df||_max` for central differences at `FD_STEP`.
    pub fd_rel_error: f64,
}

impl ContractionReport {
    pub fn contracting(&self) -> bool {
        self.norm_1 < 1.0
    }
}

fn analytic_df(net: &InfluenceNetwork, p: &DVector<f64>) -> DMatrix<f64> {
    let n = net.n();
    let (c, a) = (net.c(), net.a());
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * a[i] * p[i]
        } else {
            (1.0 - a[i]) * a[j] / (1.0 - a[j]) * c[(j, i)] * (1.0 - 2.0 * p[j])
        }
    })
}

fn central_differences(net: &InfluenceNetwork, p: &DVector<f64>, h: f64) -> DMatrix<f64> {
    let n = net.n();
    let mut out = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut up = p.clone();
        let mut dn = p.clone();
        up[j] += h;
        dn[j] -= h;
        let col = (step_perception_ra(net, &up) - step_perception_ra(net, &dn)) / (2.0 * h);
        out.set_column(j, &col);
    }
    out
}

pub fn contraction_diagnostic(net: &InfluenceNetwork, p: &DVector<f64>) -> ContractionReport {
    let n = net.n();
    let (c, a) = (net.c(), net.a());
    let df = analytic_df(net, p);
    let j = DMatrix::from_fn(n, n, |i, k| {
        if i == k {
            2.0 * a[i] * p[i]
        } else {
            c[(k, i)] * a[k] * (1.0 - 2.0 * p[k])
        }
    });
    let norm_1 = (0..n).map(|k| j.column(k).abs().sum()).fold(0.0, f64::max);
    let norm_formula = (0..n)
        .map(|k| a[k] * (2.0 * p[k].abs() + (1.0 - 2.0 * p[k]).abs()))
        .fold(0.0, f64::max);
    let fd = central_differences(net, p, FD_STEP);
    let scale = df.amax();
    let fd_rel_error = if scale > 0.0 { (&fd - &df).amax() / scale } else { fd.amax() };
    ContractionReport { df, j, norm_1, norm_formula, fd_rel_error }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_network, rng, NetworkSpec};
    use rand::Rng;

    #[test]
    fn similarity_transform_links_df_and_j() {
        let mut r = rng(11);
        let net = random_network(&mut r, NetworkSpec::dense(5));
        let p = DVector::from_fn(5, |_, _| r.random::<f64>() - 0.2);
        let rep = contraction_diagnostic(&net, &p);
        let ia = DMatrix::from_diagonal(&net.a().map(|v| 1.0 - v));
        let ia_inv = DMatrix::from_diagonal(&net.a().map(|v| 1.0 / (1.0 - v)));
        let back = &ia_inv * &rep.df * &ia;
        assert!((back - &rep.j).amax() < 1e-12);
        assert!((rep.norm_1 - rep.norm_formula).abs() < 1e-12);
        assert!(rep.fd_rel_error < 1e-6, "{}", rep.fd_rel_error);
    }

    #[test]
    fn zero_state() {
        let c = DMatrix::from_row_slice(3, 3, &[0.0, 0.6, 0.4, 0.0, 0.0, 1.0, 0.5, 0.5, 0.0]);
        let net = InfluenceNetwork::new(c.clone(), DVector::from_vec(vec![0.0, 0.4, 0.6])).unwrap();
        let rep = contraction_diagnostic(&net, &DVector::zeros(3));
        for i in 0..3 {
            assert_eq!(rep.j[(i, i)], 0.0);
            for k in (0..3).filter(|&k| k != i) {
                assert_eq!(rep.j[(i, k)], c[(k, i)] * net.a()[k]);
            }
        }
        assert!((rep.norm_1 - 0.6).abs() < 1e-15);
    }
}
