//! Influence networks: the relative interaction matrix `C`, the susceptibility
//! vector `a`, structural validation, topology classification and the
//! partially stubborn path / cycle machinery.
//!
//! Node indices are 0-based in the API. Anything meant for people to read
//! (`Display` impls, reports, CSV headers) prints them 1-based.

use std::collections::VecDeque;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Tolerance on row sums of `C`.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Default cap on the number of cycles [`InfluenceNetwork::enumerate_pscs`] may return.
pub const DEFAULT_CYCLE_BUDGET: usize = 1_000_000;

/// One violated structural assumption.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    TooFewNodes { n: usize },
    NotSquare { rows: usize, cols: usize },
    LengthMismatch { matrix: usize, susceptibilities: usize },
    NonFinite { row: usize, col: usize },
    NegativeEntry { row: usize, col: usize, value: f64 },
    NonzeroDiagonal { index: usize, value: f64 },
    RowNotStochastic { row: usize, sum: f64 },
    SusceptibilityOutOfRange { index: usize, value: f64 },
    AllFullyStubborn,
}

impl Violation {
    /// Short machine-friendly name of the invariant.
    pub fn name(&self) -> &'static str {
        match self {
            Violation::TooFewNodes { .. } => "min-size",
            Violation::NotSquare { .. } => "square-matrix",
            Violation::LengthMismatch { .. } => "dimension",
            Violation::NonFinite { .. } => "finite-entries",
            Violation::NegativeEntry { .. } => "nonnegativity",
            Violation::NonzeroDiagonal { .. } => "zero-diagonal",
            Violation::RowNotStochastic { .. } => "row-stochasticity",
            Violation::SusceptibilityOutOfRange { .. } => "susceptibility-range",
            Violation::AllFullyStubborn => "assumption-1 (a != 0)",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::TooFewNodes { n } => write!(f, "min-size: need n >= 2, got {n}"),
            Violation::NotSquare { rows, cols } => {
                write!(f, "square-matrix: C is {rows}x{cols}")
            }
            Violation::LengthMismatch { matrix, susceptibilities } => write!(
                f,
                "dimension: C has {matrix} rows but a has {susceptibilities} entries"
            ),
            Violation::NonFinite { row, col } => {
                write!(f, "finite-entries: C[{},{}] is not finite", row + 1, col + 1)
            }
            Violation::NegativeEntry { row, col, value } => write!(
                f,
                "nonnegativity: C[{},{}] = {value}",
                row + 1,
                col + 1
            ),
            Violation::NonzeroDiagonal { index, value } => write!(
                f,
                "zero-diagonal: C[{},{}] = {value}",
                index + 1,
                index + 1
            ),
            Violation::RowNotStochastic { row, sum } => {
                write!(f, "row-stochasticity: row {} sums to {sum}", row + 1)
            }
            Violation::SusceptibilityOutOfRange { index, value } => write!(
                f,
                "susceptibility-range: a_{} = {value} is outside [0, 1)",
                index + 1
            ),
            Violation::AllFullyStubborn => {
                write!(f, "assumption-1: a is the zero vector (everyone fully stubborn)")
            }
        }
    }
}

/// Result of [`validate_network`]. An empty violation list means valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every structural assumption on a candidate `(C, a)` pair and
/// reports all failures. Never errors.
pub fn validate_network(c: &DMatrix<f64>, a: &DVector<f64>) -> ValidationReport {
    let mut violations = Vec::new();
    let (rows, cols) = c.shape();
    if rows != cols {
        violations.push(Violation::NotSquare { rows, cols });
        return ValidationReport { violations };
    }
    if a.len() != rows {
        violations.push(Violation::LengthMismatch {
            matrix: rows,
            susceptibilities: a.len(),
        });
        return ValidationReport { violations };
    }
    if rows < 2 {
        violations.push(Violation::TooFewNodes { n: rows });
    }
    for i in 0..rows {
        let mut sum = 0.0;
        for j in 0..cols {
            let v = c[(i, j)];
            if !v.is_finite() {
                violations.push(Violation::NonFinite { row: i, col: j });
                continue;
            }
            if v < 0.0 {
                violations.push(Violation::NegativeEntry { row: i, col: j, value: v });
            }
            sum += v;
        }
        if c[(i, i)] != 0.0 && c[(i, i)].is_finite() {
            violations.push(Violation::NonzeroDiagonal { index: i, value: c[(i, i)] });
        }
        if sum.is_finite() && (sum - 1.0).abs() > ROW_SUM_TOL {
            violations.push(Violation::RowNotStochastic { row: i, sum });
        }
    }
    for (i, &ai) in a.iter().enumerate() {
        if !(0.0..1.0).contains(&ai) {
            violations.push(Violation::SusceptibilityOutOfRange { index: i, value: ai });
        }
    }
    if a.iter().all(|&ai| ai == 0.0) {
        violations.push(Violation::AllFullyStubborn);
    }
    ValidationReport { violations }
}

/// Options applied before validation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NetworkOptions {
    /// Divide each row of `C` by its sum. Off by default: silent
    /// renormalization hides data errors.
    pub renormalize_rows: bool,
}

/// Star classification of `G(C)`. The center index is 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyClass {
    StarFullyStubbornCenter(usize),
    StarPartiallyStubbornCenter(usize),
    General,
}

impl TopologyClass {
    pub fn center(&self) -> Option<usize> {
        match *self {
            TopologyClass::StarFullyStubbornCenter(c)
            | TopologyClass::StarPartiallyStubbornCenter(c) => Some(c),
            TopologyClass::General => None,
        }
    }
}

impl fmt::Display for TopologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TopologyClass::StarFullyStubbornCenter(c) => {
                write!(f, "star with fully stubborn center {}", c + 1)
            }
            TopologyClass::StarPartiallyStubbornCenter(c) => {
                write!(f, "star with partially stubborn center {}", c + 1)
            }
            TopologyClass::General => write!(f, "general"),
        }
    }
}

/// A directed path or cycle whose interior nodes are all partially stubborn.
#[derive(Debug, Clone, PartialEq)]
pub struct StubbornPath {
    /// Node sequence; for cycles the anchor appears at both ends.
    pub nodes: Vec<usize>,
    /// Product of `C` along consecutive edges.
    pub value: f64,
    pub is_cycle: bool,
}

impl StubbornPath {
    /// Nodes of the cycle other than the anchor (or interior nodes for a path).
    pub fn interior(&self) -> &[usize] {
        &self.nodes[1..self.nodes.len() - 1]
    }
}

impl fmt::Display for StubbornPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let seq: Vec<String> = self.nodes.iter().map(|v| (v + 1).to_string()).collect();
        write!(f, "({}) value={:e}", seq.join(","), self.value)
    }
}

/// A validated influence network. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceNetwork {
    c: DMatrix<f64>,
    a: DVector<f64>,
}

impl InfluenceNetwork {
    pub fn new(c: DMatrix<f64>, a: DVector<f64>) -> Result<Self> {
        Self::with_options(c, a, NetworkOptions::default())
    }

    pub fn with_options(
        mut c: DMatrix<f64>,
        a: DVector<f64>,
        opts: NetworkOptions,
    ) -> Result<Self> {
        if opts.renormalize_rows && c.is_square() {
            for mut row in c.row_iter_mut() {
                let s: f64 = row.iter().sum();
                if s > 0.0 && s.is_finite() {
                    row /= s;
                }
            }
        }
        let report = validate_network(&c, &a);
        if !report.is_valid() {
            return Err(Error::Validation(report));
        }
        Ok(InfluenceNetwork { c, a })
    }

    /// Builds a network from row-major data.
    pub fn from_rows(rows: &[Vec<f64>], a: &[f64]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Validation(ValidationReport {
                violations: vec![Violation::NotSquare {
                    rows: n,
                    cols: rows.iter().map(Vec::len).max().unwrap_or(0),
                }],
            }));
        }
        let c = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::new(c, DVector::from_column_slice(a))
    }

    /// Skips validation. Used for limiting-case computations that only need
    /// the update formulas, never for networks the analysis relies on.
    pub fn new_unchecked(c: DMatrix<f64>, a: DVector<f64>) -> Self {
        InfluenceNetwork { c, a }
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn a(&self) -> &DVector<f64> {
        &self.a
    }

    pub fn is_fully_stubborn(&self, i: usize) -> bool {
        self.a[i] == 0.0
    }

    pub fn is_partially_stubborn(&self, i: usize) -> bool {
        self.a[i] > 0.0
    }

    /// `V_f`, ascending.
    pub fn fully_stubborn(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.is_fully_stubborn(i)).collect()
    }

    /// `V_p`, ascending.
    pub fn partially_stubborn(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.is_partially_stubborn(i)).collect()
    }

    /// In-neighbors of `i`: nodes `j` with `C_ji > 0`, ascending.
    pub fn in_neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n()).filter(|&j| self.c[(j, i)] > 0.0).collect()
    }

    /// Out-neighbors of `i`: nodes `j` with `C_ij > 0`, ascending.
    pub fn out_neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n()).filter(|&j| self.c[(i, j)] > 0.0).collect()
    }

    /// `Some(a)` when every susceptibility equals `a`.
    pub fn homogeneous_susceptibility(&self) -> Option<f64> {
        let a0 = self.a[0];
        self.a.iter().all(|&ai| ai == a0).then_some(a0)
    }

    /// Product of `C` along a node sequence.
    pub fn path_value(&self, nodes: &[usize]) -> f64 {
        nodes.windows(2).map(|w| self.c[(w[0], w[1])]).product()
    }

    pub fn classify_topology(&self) -> TopologyClass {
        let n = self.n();
        let is_center = |k: usize| {
            (0..n).all(|i| (0..n).all(|j| self.c[(i, j)] == 0.0 || i == k || j == k))
        };
        let candidates: Vec<usize> = (0..n).filter(|&k| is_center(k)).collect();
        // Only n = 2 admits two centers; prefer a fully stubborn one.
        let center = candidates
            .iter()
            .copied()
            .find(|&k| self.is_fully_stubborn(k))
            .or_else(|| candidates.first().copied());
        match center {
            Some(k) if self.is_fully_stubborn(k) => TopologyClass::StarFullyStubbornCenter(k),
            Some(k) => TopologyClass::StarPartiallyStubbornCenter(k),
            None => TopologyClass::General,
        }
    }

    /// All partially stubborn cycles of `anchor` with the default budget.
    pub fn enumerate_pscs(&self, anchor: usize) -> Result<Vec<StubbornPath>> {
        self.enumerate_pscs_with_budget(anchor, DEFAULT_CYCLE_BUDGET)
    }

    /// Every simple cycle through `anchor` whose other nodes are partially
    /// stubborn, in lexicographic order of node sequence.
    pub fn enumerate_pscs_with_budget(
        &self,
        anchor: usize,
        cap: usize,
    ) -> Result<Vec<StubbornPath>> {
        let n = self.n();
        assert!(anchor < n, "anchor {anchor} out of range");
        let mut out = Vec::new();
        let mut on_path = vec![false; n];
        let mut path = vec![anchor];
        on_path[anchor] = true;
        // Iterative DFS; each frame holds the next neighbor to try.
        let mut next = vec![0usize];
        while let Some(&cursor) = next.last() {
            let tip = *path.last().unwrap();
            if cursor >= n {
                next.pop();
                let v = path.pop().unwrap();
                if v != anchor {
                    on_path[v] = false;
                }
                continue;
            }
            *next.last_mut().unwrap() += 1;
            let w = cursor;
            if self.c[(tip, w)] <= 0.0 {
                continue;
            }
            if w == anchor {
                if path.len() > 1 {
                    if out.len() == cap {
                        return Err(Error::CycleBudgetExceeded { cap });
                    }
                    let mut nodes = path.clone();
                    nodes.push(anchor);
                    let value = self.path_value(&nodes);
                    out.push(StubbornPath { nodes, value, is_cycle: true });
                }
            } else if !on_path[w] && self.is_partially_stubborn(w) {
                on_path[w] = true;
                path.push(w);
                next.push(0);
            }
        }
        out.sort_by(|x, y| x.nodes.cmp(&y.nodes));
        Ok(out)
    }

    /// True iff a directed path `from -> to` exists whose interior nodes are
    /// all partially stubborn. For `from == to` this asks for a PSC.
    pub fn has_psp(&self, from: usize, to: usize) -> bool {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for w in 0..n {
                if self.c[(u, w)] <= 0.0 {
                    continue;
                }
                if w == to {
                    return true;
                }
                if w != from && !seen[w] && self.is_partially_stubborn(w) {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(rows: &[&[f64]], a: &[f64]) -> InfluenceNetwork {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        InfluenceNetwork::from_rows(&rows, a).unwrap()
    }

    fn example2() -> InfluenceNetwork {
        net(&[&[0.0, 0.6, 0.4], &[0.0, 0.0, 1.0], &[0.5, 0.5, 0.0]], &[0.0, 0.4, 0.6])
    }

    #[test]
    fn minimal_two_node_network_is_valid() {
        let c = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let r = validate_network(&c, &DVector::from_vec(vec![0.5, 0.5]));
        assert!(r.is_valid(), "{r}");
    }

    #[test]
    fn nonzero_diagonal_is_reported() {
        let c = DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 1.0, 0.0]);
        let r = validate_network(&c, &DVector::from_vec(vec![0.5, 0.5]));
        assert_eq!(r.violations.len(), 1);
        assert!(matches!(r.violations[0], Violation::NonzeroDiagonal { index: 0, .. }));
    }

    #[test]
    fn example2_is_valid() {
        let c = DMatrix::from_row_slice(3, 3, &[0.0, 0.6, 0.4, 0.0, 0.0, 1.0, 0.5, 0.5, 0.0]);
        assert!(validate_network(&c, &DVector::from_vec(vec![0.0, 0.4, 0.6])).is_valid());
    }

    #[test]
    fn all_failures_are_collected() {
        let c = DMatrix::from_row_slice(2, 2, &[0.1, 0.99, -0.5, 0.0]);
        let r = validate_network(&c, &DVector::from_vec(vec![0.0, 0.0]));
        let names: Vec<_> = r.violations.iter().map(Violation::name).collect();
        assert!(names.contains(&"zero-diagonal"));
        assert!(names.contains(&"nonnegativity"));
        assert!(names.contains(&"row-stochasticity"));
        assert!(names.contains(&"assumption-1 (a != 0)"));
    }

    #[test]
    fn susceptibility_of_one_is_rejected() {
        let c = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let r = validate_network(&c, &DVector::from_vec(vec![1.0, 0.5]));
        assert!(matches!(
            r.violations[..],
            [Violation::SusceptibilityOutOfRange { index: 0, .. }]
        ));
    }

    #[test]
    fn renormalization_is_opt_in() {
        let c = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 0.5, 0.0]);
        let a = DVector::from_vec(vec![0.5, 0.5]);
        assert!(InfluenceNetwork::new(c.clone(), a.clone()).is_err());
        let opts = NetworkOptions { renormalize_rows: true };
        let g = InfluenceNetwork::with_options(c, a, opts).unwrap();
        assert_eq!(g.c()[(0, 1)], 1.0);
        assert_eq!(g.c()[(1, 0)], 1.0);
    }

    #[test]
    fn topology_examples() {
        let star = net(&[&[0.0, 0.4, 0.6], &[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]], &[0.0, 0.4, 0.8]);
        assert_eq!(star.classify_topology(), TopologyClass::StarFullyStubbornCenter(0));

        let c1 = net(
            &[
                &[0.0, 1.0, 0.0, 0.0],
                &[1.0, 0.0, 0.0, 0.0],
                &[1.0, 0.0, 0.0, 0.0],
                &[1.0, 0.0, 0.0, 0.0],
            ],
            &[0.2, 0.0, 0.7, 0.8],
        );
        assert_eq!(c1.classify_topology(), TopologyClass::StarPartiallyStubbornCenter(0));
        assert_eq!(example2().classify_topology(), TopologyClass::General);
    }

    #[test]
    fn two_node_star_prefers_fully_stubborn_center() {
        let g = net(&[&[0.0, 1.0], &[1.0, 0.0]], &[0.5, 0.0]);
        assert_eq!(g.classify_topology(), TopologyClass::StarFullyStubbornCenter(1));
    }

    #[test]
    fn example2_pscs_of_node3() {
        let g = example2();
        let cycles = g.enumerate_pscs(2).unwrap();
        // node 1 (index 0) is fully stubborn, so 3->1->... cycles are excluded
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].nodes, vec![2, 1, 2]);
        assert!((cycles[0].value - 0.5).abs() < 1e-15);
        assert_eq!(cycles[0].interior(), &[1]);
    }

    #[test]
    fn star_leaf_with_fully_stubborn_center_has_no_psc() {
        let star = net(&[&[0.0, 0.4, 0.6], &[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]], &[0.0, 0.4, 0.8]);
        assert!(star.enumerate_pscs(1).unwrap().is_empty());
        assert!(star.enumerate_pscs(2).unwrap().is_empty());
        // the center itself has cycles through partially stubborn leaves
        assert_eq!(star.enumerate_pscs(0).unwrap().len(), 2);
    }

    #[test]
    fn two_node_unique_cycle() {
        let g = net(&[&[0.0, 1.0], &[1.0, 0.0]], &[0.5, 0.5]);
        let cycles = g.enumerate_pscs(0).unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].nodes, vec![0, 1, 0]);
        assert_eq!(cycles[0].value, 1.0);
    }

    #[test]
    fn cycle_budget_is_enforced() {
        let n = 6;
        let c = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 / (n - 1) as f64 });
        let g = InfluenceNetwork::new(c, DVector::from_element(n, 0.5)).unwrap();
        let all = g.enumerate_pscs(0).unwrap();
        // complete digraph on 6 nodes: sum_{k=1}^{5} 5!/(5-k)! cycles through a node
        assert_eq!(all.len(), 5 + 20 + 60 + 120 + 120);
        assert!(matches!(
            g.enumerate_pscs_with_budget(0, 100),
            Err(Error::CycleBudgetExceeded { cap: 100 })
        ));
        assert!(all.windows(2).all(|w| w[0].nodes < w[1].nodes));
    }

    #[test]
    fn psp_queries() {
        let g = example2();
        assert!(g.has_psp(0, 2)); // direct edge C_13 = 0.4
        // every path into node 2 from node 3 is direct; path 2 -> 1 needs node 3 then edge 3->1
        assert!(g.has_psp(1, 0));
        // 3 -> 2 directly
        assert!(g.has_psp(2, 1));

        // chain 1 -> 2 -> 3 where 2 is fully stubborn: no PSP from 1 to 3
        let chain = net(
            &[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]],
            &[0.5, 0.0, 0.5],
        );
        assert!(!chain.has_psp(0, 2));
        assert!(chain.has_psp(0, 1));
        assert!(!chain.has_psp(0, 0));
        assert!(chain.enumerate_pscs(0).unwrap().is_empty());
    }

    #[test]
    fn display_is_one_based() {
        let g = example2();
        let cyc = &g.enumerate_pscs(2).unwrap()[0];
        assert!(cyc.to_string().starts_with("(3,2,3)"));
        assert_eq!(TopologyClass::StarFullyStubbornCenter(0).to_string(), "star with fully stubborn center 1");
    }
}
