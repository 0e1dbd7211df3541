//! Seeded random instances: networks, simplex points and box samples.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::network::InfluenceNetwork;

pub type SimRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of random networks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkSpec {
    pub n: usize,
    /// Upper end of the uniform susceptibility draw.
    pub a_max: f64,
    /// Probability that a node is made fully stubborn (`a_i = 0`).
    pub fully_stubborn_prob: f64,
    /// Probability that an off-diagonal edge is kept before normalization.
    pub edge_prob: f64,
}

impl NetworkSpec {
    /// Dense `C`, `a_i ~ U[0, 0.95]`.
    pub fn dense(n: usize) -> Self {
        NetworkSpec { n, a_max: 0.95, fully_stubborn_prob: 0.0, edge_prob: 1.0 }
    }

    pub fn with_a_max(mut self, a_max: f64) -> Self {
        self.a_max = a_max;
        self
    }

    pub fn with_fully_stubborn(mut self, prob: f64) -> Self {
        self.fully_stubborn_prob = prob;
        self
    }

    pub fn with_edge_prob(mut self, prob: f64) -> Self {
        self.edge_prob = prob;
        self
    }
}

/// Row-normalized nonnegative `C` with zero diagonal; at least one `a_i > 0`.
pub fn random_network(rng: &mut SimRng, spec: NetworkSpec) -> InfluenceNetwork {
    let n = spec.n;
    assert!(n >= 2);
    let mut c = DMatrix::zeros(n, n);
    for i in 0..n {
        loop {
            for j in 0..n {
                c[(i, j)] = if i != j && rng.random::<f64>() < spec.edge_prob {
                    rng.random::<f64>() + 1e-3
                } else {
                    0.0
                };
            }
            if c.row(i).sum() > 0.0 {
                break;
            }
        }
        let s = c.row(i).sum();
        for j in 0..n {
            c[(i, j)] /= s;
        }
    }
    let mut a = DVector::from_fn(n, |_, _| {
        if rng.random::<f64>() < spec.fully_stubborn_prob {
            0.0
        } else {
            rng.random::<f64>() * spec.a_max
        }
    });
    if a.iter().all(|&v| v == 0.0) {
        let k = rng.random_range(0..n);
        a[k] = 0.05 + rng.random::<f64>() * (spec.a_max - 0.05).max(0.0);
    }
    InfluenceNetwork::new(c, a).expect("generator produces valid networks")
}

/// Star with fully stubborn center 0; each leaf is fully stubborn with
/// probability `leaf_fully_stubborn_prob`, otherwise `a ~ U(0, a_max]`.
pub fn random_star_fully_stubborn(
    rng: &mut SimRng,
    n: usize,
    a_max: f64,
    leaf_fully_stubborn_prob: f64,
) -> InfluenceNetwork {
    assert!(n >= 2);
    let mut c = DMatrix::zeros(n, n);
    let w: Vec<f64> = (1..n).map(|_| rng.random::<f64>() + 1e-3).collect();
    let s: f64 = w.iter().sum();
    for j in 1..n {
        c[(0, j)] = w[j - 1] / s;
        c[(j, 0)] = 1.0;
    }
    let mut a = DVector::zeros(n);
    for j in 1..n {
        if rng.random::<f64>() >= leaf_fully_stubborn_prob {
            a[j] = (1.0 - rng.random::<f64>()) * a_max;
        }
    }
    if a.iter().all(|&v| v == 0.0) {
        let k = rng.random_range(1..n);
        a[k] = (1.0 - rng.random::<f64>()) * a_max;
    }
    InfluenceNetwork::new(c, a).expect("generator produces valid stars")
}

/// Uniform point of the simplex (flat Dirichlet).
pub fn simplex_point(rng: &mut SimRng, n: usize) -> DVector<f64> {
    let e = DVector::from_fn(n, |_, _| -(1.0 - rng.random::<f64>()).ln());
    let s = e.sum();
    e / s
}

/// Uniform point of the box `[mu, nu]`. Bounds must be finite.
pub fn box_point(rng: &mut SimRng, mu: &DVector<f64>, nu: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(mu.len(), |i, _| mu[i] + (nu[i] - mu[i]) * rng.random::<f64>())
}
