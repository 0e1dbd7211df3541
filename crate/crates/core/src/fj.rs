//! Ground truth for the Friedkin-Johnsen model: opinion updates, social power
//! by direct linear solves, the resolvent `Phi(x) = (I - A W(x))^{-1}`, and
//! the two reflected-appraisal power evolutions (issue-indexed and
//! single-timescale) that the perception dynamics are meant to track.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::network::InfluenceNetwork;

/// `W(x) = diag(x) + (I - diag(x)) C`.
pub fn influence_matrix(c: &DMatrix<f64>, x: &DVector<f64>) -> DMatrix<f64> {
    let n = x.len();
    DMatrix::from_fn(n, n, |i, j| {
        let off = (1.0 - x[i]) * c[(i, j)];
        if i == j {
            x[i] + off
        } else {
            off
        }
    })
}

/// `A W(x)`, with `A = diag(a)`.
fn scaled_influence(net: &InfluenceNetwork, x: &DVector<f64>) -> DMatrix<f64> {
    let mut m = influence_matrix(net.c(), x);
    for (i, mut row) in m.row_iter_mut().enumerate() {
        row *= net.a()[i];
    }
    m
}

fn solve(m: DMatrix<f64>, b: &DVector<f64>, context: &'static str) -> Result<DVector<f64>> {
    m.lu().solve(b).ok_or(Error::SingularSystem { context })
}

/// Opinion state on issue `issue` after `step` updates.
#[derive(Debug, Clone, PartialEq)]
pub struct OpinionState {
    pub y: DVector<f64>,
    pub y0: DVector<f64>,
    pub issue: usize,
    pub step: usize,
}

impl OpinionState {
    pub fn initial(y0: DVector<f64>, issue: usize) -> Self {
        OpinionState { y: y0.clone(), y0, issue, step: 0 }
    }
}

/// One FJ opinion update `y' = A W(gamma) y + (I - A) y0`.
pub fn step_fj_opinions(
    net: &InfluenceNetwork,
    gamma: &DVector<f64>,
    state: &OpinionState,
) -> OpinionState {
    let aw = scaled_influence(net, gamma);
    let anchor = state.y0.component_mul(&net.a().map(|ai| 1.0 - ai));
    OpinionState {
        y: aw * &state.y + anchor,
        y0: state.y0.clone(),
        issue: state.issue,
        step: state.step + 1,
    }
}

/// Limit of the opinion dynamics, `(I - A W)^{-1} (I - A) y0`.
pub fn opinion_limit(
    net: &InfluenceNetwork,
    gamma: &DVector<f64>,
    y0: &DVector<f64>,
) -> Result<DVector<f64>> {
    let n = net.n();
    let m = DMatrix::identity(n, n) - scaled_influence(net, gamma);
    let rhs = y0.component_mul(&net.a().map(|ai| 1.0 - ai));
    solve(m, &rhs, "opinion limit")
}

/// Total-influence matrix `V = (I - A W)^{-1} (I - A)`. Row-stochastic.
pub fn total_influence(net: &InfluenceNetwork, gamma: &DVector<f64>) -> Result<DMatrix<f64>> {
    let n = net.n();
    let m = DMatrix::identity(n, n) - scaled_influence(net, gamma);
    let rhs = DMatrix::from_diagonal(&net.a().map(|ai| 1.0 - ai));
    m.lu()
        .solve(&rhs)
        .ok_or(Error::SingularSystem { context: "total influence" })
}

/// Social power `x = (I - A)(I - W^T A)^{-1} 1/n`.
pub fn compute_social_power(
    net: &InfluenceNetwork,
    gamma: &DVector<f64>,
) -> Result<DVector<f64>> {
    let n = net.n();
    let wt_a = scaled_influence(net, gamma).transpose();
    let m = DMatrix::identity(n, n) - wt_a;
    let z = solve(m, &DVector::from_element(n, 1.0 / n as f64), "social power")?;
    Ok(z.component_mul(&net.a().map(|ai| 1.0 - ai)))
}

/// `Phi(x) = (I - A W(x))^{-1}`. Returns the full matrix, so this is the one
/// place an explicit inverse is formed (column-by-column LU solve).
pub fn compute_phi(net: &InfluenceNetwork, x: &DVector<f64>) -> Result<DMatrix<f64>> {
    let n = net.n();
    let m = DMatrix::identity(n, n) - scaled_influence(net, x);
    m.lu()
        .solve(&DMatrix::identity(n, n))
        .ok_or(Error::SingularSystem { context: "Phi" })
}

/// `eta_l = a_l (1 - x_l) / (1 - a_l x_l)`.
pub fn eta(a: f64, x: f64) -> f64 {
    a * (1.0 - x) / (1.0 - a * x)
}

/// `phi_i(x)`: sum over the partially stubborn cycles of `anchor` of the
/// cycle value times the product of `eta` over the non-anchor nodes.
pub fn psc_weight(net: &InfluenceNetwork, anchor: usize, x: &DVector<f64>) -> Result<f64> {
    let a = net.a();
    let cycles = net.enumerate_pscs(anchor)?;
    Ok(cycles
        .iter()
        .map(|q| {
            q.value * q.interior().iter().map(|&l| eta(a[l], x[l])).product::<f64>()
        })
        .sum())
}

/// Diagonal entry `Phi_ii(x)` computed from cycle sums instead of a solve.
///
/// Only simple cycles enter the sum. This matches the solve exactly when the
/// partially stubborn nodes other than `anchor` induce an acyclic subgraph;
/// otherwise closed walks looping among them are missing and the value is a
/// lower bound.
pub fn phi_diag_via_pscs(net: &InfluenceNetwork, anchor: usize, x: &DVector<f64>) -> Result<f64> {
    let ai = net.a()[anchor];
    let xi = x[anchor];
    let phi = psc_weight(net, anchor, x)?;
    Ok(1.0 / (1.0 - ai * xi - ai * (1.0 - xi) * phi))
}

/// One issue of the reflected-appraisal power evolution:
/// `x' = (I - A)(I - W(x)^T A)^{-1} 1/n`.
pub fn step_power_evolution_issue(
    net: &InfluenceNetwork,
    x: &DVector<f64>,
) -> Result<DVector<f64>> {
    compute_social_power(net, x)
}

/// One step of the single-timescale evolution:
/// `V' = A W(x) V + I - A`, `x' = V'^T 1/n`. Start from `V = I`.
pub fn step_power_evolution_single(
    net: &InfluenceNetwork,
    v: &DMatrix<f64>,
    x: &DVector<f64>,
) -> (DMatrix<f64>, DVector<f64>) {
    let n = net.n();
    let mut next = scaled_influence(net, x) * v;
    for i in 0..n {
        next[(i, i)] += 1.0 - net.a()[i];
    }
    let x_next = next.transpose() * DVector::from_element(n, 1.0 / n as f64);
    (next, x_next)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(v: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(v)
    }

    fn example1() -> (InfluenceNetwork, DVector<f64>) {
        // W(gamma) = [0.2 0.8 0; 0.5 0.5 0; 1 0 0] factors as gamma = (0.2, 0.5, 0)
        // over C = [0 1 0; 1 0 0; 1 0 0].
        let c = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let net = InfluenceNetwork::new(c, dv(&[0.7, 0.9, 0.9])).unwrap();
        (net, dv(&[0.2, 0.5, 0.0]))
    }

    fn example2() -> InfluenceNetwork {
        let c = DMatrix::from_row_slice(3, 3, &[0.0, 0.6, 0.4, 0.0, 0.0, 1.0, 0.5, 0.5, 0.0]);
        InfluenceNetwork::new(c, dv(&[0.0, 0.4, 0.6])).unwrap()
    }

    #[test]
    fn example1_gamma_reproduces_w() {
        let (net, gamma) = example1();
        let w = influence_matrix(net.c(), &gamma);
        let expected = DMatrix::from_row_slice(3, 3, &[0.2, 0.8, 0.0, 0.5, 0.5, 0.0, 1.0, 0.0, 0.0]);
        assert!((w - expected).amax() < 1e-15);
    }

    #[test]
    fn zero_susceptibility_anchors_opinions() {
        let c = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let carrier = InfluenceNetwork::new_unchecked(c, dv(&[0.0, 0.0]));
        let s = OpinionState { y: dv(&[3.0, -1.0]), y0: dv(&[0.5, 0.25]), issue: 4, step: 7 };
        let next = step_fj_opinions(&carrier, &dv(&[0.3, 0.6]), &s);
        assert_eq!(next.y, dv(&[0.5, 0.25]));
        assert_eq!((next.issue, next.step), (4, 8));
    }

    #[test]
    fn opinion_fixed_point_is_preserved() {
        let (net, gamma) = example1();
        let y0 = dv(&[1.0, -2.0, 0.5]);
        let ystar = opinion_limit(&net, &gamma, &y0).unwrap();
        let s = OpinionState { y: ystar.clone(), y0, issue: 0, step: 0 };
        let next = step_fj_opinions(&net, &gamma, &s);
        assert!((next.y - ystar).amax() < 1e-14);
    }

    #[test]
    fn opinions_converge_to_total_influence_times_y0() {
        let (net, gamma) = example1();
        let y0 = dv(&[0.3, 0.9, -0.4]);
        let v = total_influence(&net, &gamma).unwrap();
        let expected = &v * &y0;
        let mut s = OpinionState::initial(y0, 0);
        for _ in 0..10_000 {
            let next = step_fj_opinions(&net, &gamma, &s);
            let done = (&next.y - &s.y).amax() < 1e-12;
            s = next;
            if done {
                break;
            }
        }
        assert!((s.y - expected).amax() < 1e-10);
        for row in v.row_iter() {
            assert!((row.sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_pair_has_equal_power() {
        let c = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let net = InfluenceNetwork::new(c, dv(&[0.5, 0.5])).unwrap();
        let x = compute_social_power(&net, &dv(&[0.0, 0.0])).unwrap();
        assert!((x - dv(&[0.5, 0.5])).amax() < 1e-15);
    }

    #[test]
    fn social_power_matches_column_means_of_v() {
        let (net, gamma) = example1();
        let x = compute_social_power(&net, &gamma).unwrap();
        let v = total_influence(&net, &gamma).unwrap();
        let oracle = v.transpose() * DVector::from_element(3, 1.0 / 3.0);
        assert!((&x - oracle).amax() < 1e-14);
        assert!((x.sum() - 1.0).abs() < 1e-12);
        assert!(x.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn phi_of_fully_stubborn_node_has_unit_diagonal() {
        let net = example2();
        let phi = compute_phi(&net, &dv(&[1.0 / 3.0; 3])).unwrap();
        assert!((phi[(0, 0)] - 1.0).abs() < 1e-15);
        for j in 1..3 {
            assert_eq!(phi[(0, j)], 0.0);
        }
    }

    #[test]
    fn phi_example2_properties() {
        let net = example2();
        let x = dv(&[1.0 / 3.0; 3]);
        let phi = compute_phi(&net, &x).unwrap();
        // Neumann-series oracle: sum_k (A W)^k
        let aw = scaled_influence(&net, &x);
        let mut term = DMatrix::<f64>::identity(3, 3);
        let mut sum = DMatrix::<f64>::identity(3, 3);
        for _ in 0..2000 {
            term = &aw * term;
            sum += &term;
        }
        assert!((&phi - sum).amax() < 1e-12);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(phi[(i, i)] > phi[(j, i)]);
                }
            }
        }
        let rows = &phi * DMatrix::from_diagonal(&net.a().map(|a| 1.0 - a));
        for r in rows.row_iter() {
            assert!((r.sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn psc_diagonal_without_cycles_and_for_fully_stubborn() {
        // chain with fully stubborn node 2 blocks all cycles of node 1
        let c = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
        let net = InfluenceNetwork::new(c, dv(&[0.5, 0.0, 0.3])).unwrap();
        let x = dv(&[0.2, 0.5, 0.3]);
        let d = phi_diag_via_pscs(&net, 0, &x).unwrap();
        assert!((d - 1.0 / (1.0 - 0.5 * 0.2)).abs() < 1e-15);
        assert_eq!(phi_diag_via_pscs(&net, 1, &x).unwrap(), 1.0);
        let phi = compute_phi(&net, &x).unwrap();
        assert!((phi[(0, 0)] - d).abs() < 1e-14);
    }

    #[test]
    fn psc_diagonal_matches_solve_on_example2() {
        let net = example2();
        let x = dv(&[0.2, 0.3, 0.5]);
        let phi = compute_phi(&net, &x).unwrap();
        for i in 0..3 {
            let d = phi_diag_via_pscs(&net, i, &x).unwrap();
            assert!(((d - phi[(i, i)]) / phi[(i, i)]).abs() < 1e-12);
        }
    }

    #[test]
    fn democracy_is_a_fixed_point_for_doubly_stochastic_homogeneous() {
        let c = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
        let net = InfluenceNetwork::new(c, dv(&[0.4, 0.4, 0.4])).unwrap();
        let bary = dv(&[1.0 / 3.0; 3]);
        let next = step_power_evolution_issue(&net, &bary).unwrap();
        assert!((next - bary).amax() < 1e-15);
    }

    #[test]
    fn single_timescale_first_step_is_direct_substitution() {
        let net = example2();
        let x = dv(&[0.3, 0.5, 0.2]);
        let (v1, x1) = step_power_evolution_single(&net, &DMatrix::identity(3, 3), &x);
        let expected_v = scaled_influence(&net, &x)
            + DMatrix::from_diagonal(&net.a().map(|a| 1.0 - a));
        assert!((&v1 - &expected_v).amax() < 1e-15);
        let expected_x = expected_v.transpose() * DVector::from_element(3, 1.0 / 3.0);
        assert!((x1 - expected_x).amax() < 1e-15);
    }

    #[test]
    fn example2_power_evolutions_share_a_limit() {
        let net = example2();
        let mut x = dv(&[0.3, 0.5, 0.2]);
        for _ in 0..10_000 {
            let next = step_power_evolution_issue(&net, &x).unwrap();
            let done = (&next - &x).amax() < 1e-13;
            x = next;
            if done {
                break;
            }
        }
        let mut v = DMatrix::identity(3, 3);
        let mut z = dv(&[0.1, 0.2, 0.7]);
        for _ in 0..10_000 {
            let (v2, z2) = step_power_evolution_single(&net, &v, &z);
            let done = (&z2 - &z).amax() < 1e-13;
            v = v2;
            z = z2;
            if done {
                break;
            }
        }
        assert!((&x - &z).amax() < 1e-10);
        assert!((x.sum() - 1.0).abs() < 1e-12);
        assert!((z.sum() - 1.0).abs() < 1e-10);
        // fixed point of the issue map
        let again = step_power_evolution_issue(&net, &x).unwrap();
        assert!((again - &x).amax() < 1e-12);
    }
}
