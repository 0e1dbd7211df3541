use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::network::{InfluenceNetwork, TopologyClass};

/// Residual allowed in the left-eigenvector test for democratic power.
pub const DEMOCRACY_TOL: f64 = 1e-10;

/// Sufficient (and one necessary) conditions that can be evaluated on a network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConditionId {
    /// `b_i <= a_i/(1-a_i) + 2(n-2)/n` on partially stubborn nodes.
    Eq15,
    /// `d_i < 1/a_i + 4/n` on partially stubborn nodes.
    Eq16,
    /// Star with partially stubborn center 1:
    /// `sum_{Vp\{1}} a_j/(1-a_j) <= 1/(a_1(1-a_1)) - 4/n`.
    Eq17,
    /// Homogeneous susceptibility `a <= (5n-7)/(8(n-1))`.
    Eq19,
    /// `A(I-A)^{-1} 1` is a left eigenvector of `C` for eigenvalue 1.
    Democracy,
    /// `a_max < 1/(1+2 zeta)` with `zeta = (sum a + 1 - a_min)/n`.
    Eq15Legacy,
    /// Necessary inequality for `p*_node > sigma`.
    Dominance { node: usize, sigma: f64 },
}

impl ConditionId {
    pub fn name(&self) -> String {
        match self {
            ConditionId::Eq15 => "Eq15".into(),
            ConditionId::Eq16 => "Eq16".into(),
            ConditionId::Eq17 => "Eq17".into(),
            ConditionId::Eq19 => "Eq19".into(),
            ConditionId::Democracy => "Democracy".into(),
            ConditionId::Eq15Legacy => "Eq15-legacy".into(),
            ConditionId::Dominance { node, sigma } => format!("Dominance({},{})", node + 1, sigma),
        }
    }

    /// Whether the inequality is strict, so `holds` needs a positive margin.
    pub fn is_strict(&self) -> bool {
        matches!(self, ConditionId::Eq16 | ConditionId::Eq15Legacy | ConditionId::Dominance { .. })
    }
}

impl std::str::FromStr for ConditionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "eq15" => Ok(ConditionId::Eq15),
            "eq16" => Ok(ConditionId::Eq16),
            "eq17" => Ok(ConditionId::Eq17),
            "eq19" => Ok(ConditionId::Eq19),
            "democracy" => Ok(ConditionId::Democracy),
            "eq15-legacy" | "eq15legacy" | "legacy" => Ok(ConditionId::Eq15Legacy),
            other if other.starts_with("dominance:") => {
                // `dominance:<node>:<sigma>` with a 1-based node.
                let bad = || Error::InvalidStructure(format!("expected dominance:<node>:<sigma>, got '{other}'"));
                let mut parts = other["dominance:".len()..].split(':');
                let node: usize = parts.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
                let sigma: f64 = parts.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
                if node == 0 || parts.next().is_some() || !(sigma > 0.0 && sigma < 1.0) {
                    return Err(bad());
                }
                Ok(ConditionId::Dominance { node: node - 1, sigma })
            }
            other => Err(Error::InvalidStructure(format!("unknown condition id '{other}'"))),
        }
    }
}

/// One inequality `lhs <= rhs` (or `<`), with `margin = rhs - lhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeMargin {
    /// `None` for whole-network inequalities.
    pub node: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

impl NodeMargin {
    fn new(node: Option<usize>, lhs: f64, rhs: f64) -> Self {
        NodeMargin { node, lhs, rhs, margin: rhs - lhs }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub id: ConditionId,
    pub holds: bool,
    /// Smallest per-node margin.
    pub margin: f64,
    pub per_node: Vec<NodeMargin>,
    pub notes: Vec<String>,
}

impl ConditionReport {
    fn from_margins(id: ConditionId, per_node: Vec<NodeMargin>, notes: Vec<String>) -> Self {
        let margin = per_node.iter().map(|m| m.margin).fold(f64::INFINITY, f64::min);
        let holds = if id.is_strict() { margin > 0.0 } else { margin >= 0.0 };
        ConditionReport { id, holds, margin, per_node, notes }
    }
}

impl std::fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "[condition.{}]", self.id.name())?;
        writeln!(f, "holds = {}", self.holds)?;
        writeln!(f, "margin = {:.12e}", self.margin)?;
        for m in &self.per_node {
            match m.node {
                Some(i) => writeln!(
                    f,
                    "margin.node{} = {:.12e}  # lhs {:.9e} rhs {:.9e}",
                    i + 1,
                    m.margin,
                    m.lhs,
                    m.rhs
                )?,
                None => writeln!(f, "margin.network = {:.12e}  # lhs {:.9e} rhs {:.9e}", m.margin, m.lhs, m.rhs)?,
            }
        }
        for n in &self.notes {
            writeln!(f, "note = \"{n}\"")?;
        }
        Ok(())
    }
}

/// `b_i = sum_{j in Vp} C_ji a_j/(1-a_j)` and `d_i = sum_{j in Vp} C_ji (1+3a_j)/(4a_j)`.
pub fn stubborn_gains(net: &InfluenceNetwork) -> (DVector<f64>, DVector<f64>) {
    let n = net.n();
    let (c, a) = (net.c(), net.a());
    let mut b = DVector::zeros(n);
    let mut d = DVector::zeros(n);
    for j in net.partially_stubborn() {
        let gb = a[j] / (1.0 - a[j]);
        let gd = (1.0 + 3.0 * a[j]) / (4.0 * a[j]);
        for i in 0..n {
            b[i] += c[(j, i)] * gb;
            d[i] += c[(j, i)] * gd;
        }
    }
    (b, d)
}

pub fn check_condition(net: &InfluenceNetwork, which: ConditionId) -> Result<ConditionReport> {
    let n = net.n();
    let nf = n as f64;
    let a = net.a();
    let (b, d) = stubborn_gains(net);
    let vp = net.partially_stubborn();
    let report = match which {
        ConditionId::Eq15 => {
            let rows = vp
                .iter()
                .map(|&i| NodeMargin::new(Some(i), b[i], a[i] / (1.0 - a[i]) + 2.0 * (nf - 2.0) / nf))
                .collect();
            ConditionReport::from_margins(which, rows, vec![])
        }
        ConditionId::Eq16 => {
            let rows =
                vp.iter().map(|&i| NodeMargin::new(Some(i), d[i], 1.0 / a[i] + 4.0 / nf)).collect();
            ConditionReport::from_margins(which, rows, vec![])
        }
        ConditionId::Eq17 => {
            let TopologyClass::StarPartiallyStubbornCenter(center) = net.classify_topology() else {
                return Err(Error::WrongTopology {
                    condition: which.name(),
                    reason: "requires a star with partially stubborn center".into(),
                });
            };
            let a1 = a[center];
            let lhs: f64 =
                vp.iter().filter(|&&j| j != center).map(|&j| a[j] / (1.0 - a[j])).sum();
            let rhs = 1.0 / (a1 * (1.0 - a1)) - 4.0 / nf;
            let mut notes = vec![format!("center = node {}", center + 1)];
            let blocked: Vec<String> = vp
                .iter()
                .filter(|&&j| j != center && net.c()[(center, j)] != 0.0)
                .map(|j| (j + 1).to_string())
                .collect();
            if blocked.is_empty() {
                notes.push("structural precondition C_1j = 0 on partially stubborn leaves: satisfied".into());
            } else {
                notes.push(format!(
                    "structural precondition C_1j = 0 on partially stubborn leaves: violated at node(s) {}",
                    blocked.join(",")
                ));
            }
            let stmt = (2.0 * a1 - 1.0).abs() / (4.0 * a1 * (1.0 - a1)) - 1.0 / nf;
            let proof = 1.0 / nf - (2.0 * a1 - 1.0).abs() / (4.0 * a1 * (1.0 - a1));
            notes.push(format!("fully stubborn lower bound (statement form) = {stmt:.12e}"));
            notes.push(format!("fully stubborn lower bound (derived form, used) = {proof:.12e}"));
            ConditionReport::from_margins(which, vec![NodeMargin::new(None, lhs, rhs)], notes)
        }
        ConditionId::Eq19 => {
            let Some(h) = net.homogeneous_susceptibility() else {
                return Err(Error::WrongTopology {
                    condition: which.name(),
                    reason: "requires homogeneous susceptibilities".into(),
                });
            };
            let rhs = (5.0 * nf - 7.0) / (8.0 * (nf - 1.0));
            ConditionReport::from_margins(which, vec![NodeMargin::new(None, h, rhs)], vec![])
        }
        ConditionId::Democracy => {
            let v = a.map(|ai| ai / (1.0 - ai));
            let v = &v / v.sum();
            let residual = (net.c().transpose() * &v - &v).amax();
            let notes = vec![format!("||C^T v - v||_inf = {residual:.3e}")];
            ConditionReport::from_margins(which, vec![NodeMargin::new(None, residual, DEMOCRACY_TOL)], notes)
        }
        ConditionId::Eq15Legacy => {
            let a_min = a.min();
            let a_max = a.max();
            let zeta = (a.sum() + 1.0 - a_min) / nf;
            let notes = vec![format!("zeta = {zeta:.12e}")];
            ConditionReport::from_margins(
                which,
                vec![NodeMargin::new(None, a_max, 1.0 / (1.0 + 2.0 * zeta))],
                notes,
            )
        }
        ConditionId::Dominance { node, sigma } => {
            if node >= n {
                return Err(Error::Dimension(format!("node {} out of range 1..={n}", node + 1)));
            }
            let lhs = a[node] / (1.0 - a[node]) + (nf * sigma - 1.0) / (nf * sigma * (1.0 - sigma));
            // Reversed orientation: the inequality reads sum > lhs.
            let gain = b[node];
            let notes = vec![format!(
                "if this fails, node {} cannot hold power above {sigma}",
                node + 1
            )];
            ConditionReport::from_margins(which, vec![NodeMargin::new(Some(node), lhs, gain)], notes)
        }
    };
    Ok(report)
}

/// Outcome of testing the necessary condition for `p*_i > sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct DominanceReport {
    pub node: usize,
    pub sigma: f64,
    pub p_i: f64,
    /// `p*_i > sigma`.
    pub dominant: bool,
    pub condition: ConditionReport,
}

impl DominanceReport {
    /// False only for a counterexample: dominance without the inequality.
    pub fn consistent(&self) -> bool {
        !self.dominant || self.condition.holds
    }
}

pub fn check_dominance_necessary(
    net: &InfluenceNetwork,
    p_star: &DVector<f64>,
    node: usize,
    sigma: f64,
) -> Result<DominanceReport> {
    let condition = check_condition(net, ConditionId::Dominance { node, sigma })?;
    let p_i = p_star[node];
    Ok(DominanceReport { node, sigma, p_i, dominant: p_i > sigma, condition })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn example2() -> InfluenceNetwork {
        let c = DMatrix::from_row_slice(3, 3, &[0.0, 0.6, 0.4, 0.0, 0.0, 1.0, 0.5, 0.5, 0.0]);
        InfluenceNetwork::new(c, DVector::from_vec(vec![0.0, 0.4, 0.6])).unwrap()
    }

    fn example3(c2: bool, a2: bool) -> InfluenceNetwork {
        let mut c = DMatrix::zeros(4, 4);
        c[(0, if c2 { 3 } else { 1 })] = 1.0;
        for j in 1..4 {
            c[(j, 0)] = 1.0;
        }
        let a1 = if a2 { 0.6 } else { 0.2 };
        InfluenceNetwork::new(c, DVector::from_vec(vec![a1, 0.0, 0.7, 0.8])).unwrap()
    }

    #[test]
    fn gains_on_example2() {
        let (b, d) = stubborn_gains(&example2());
        // b_1 = 0.5*1.5, d_1 = 0.5*2.8/2.4
        assert!((b[0] - 0.75).abs() < 1e-15);
        assert!((d[0] - 0.5 * 2.8 / 2.4).abs() < 1e-15);
        // b_2 = 0.5*1.5 = 0.75; b_3 = 1*0.4/0.6
        assert!((b[1] - 0.75).abs() < 1e-15);
        assert!((b[2] - 0.4 / 0.6).abs() < 1e-15);
    }

    #[test]
    fn example2_satisfies_eq15_and_eq16() {
        let net = example2();
        let r15 = check_condition(&net, ConditionId::Eq15).unwrap();
        let r16 = check_condition(&net, ConditionId::Eq16).unwrap();
        assert!(r15.holds, "{r15}");
        assert!(r16.holds, "{r16}");
        assert_eq!(r15.per_node.len(), 2);
    }

    #[test]
    fn eq17_on_example3() {
        let r = check_condition(&example3(false, true), ConditionId::Eq17).unwrap();
        assert!(!r.holds);
        // 0.7/0.3 + 4 vs 1/0.24 - 1
        assert!((r.per_node[0].lhs - (0.7 / 0.3 + 4.0)).abs() < 1e-12);
        assert!((r.per_node[0].rhs - (1.0 / 0.24 - 1.0)).abs() < 1e-12);
        let d = check_condition(&example3(true, true), ConditionId::Eq17).unwrap();
        assert!(d.notes.iter().any(|n| n.contains("violated at node(s) 4")));
    }

    #[test]
    fn eq17_needs_partial_center_star() {
        assert!(matches!(
            check_condition(&example2(), ConditionId::Eq17),
            Err(Error::WrongTopology { .. })
        ));
    }

    #[test]
    fn eq19_boundary_holds_with_zero_margin() {
        let c = DMatrix::from_row_slice(3, 3, &[0.0, 0.5, 0.5, 0.5, 0.0, 0.5, 0.5, 0.5, 0.0]);
        let net = InfluenceNetwork::new(c, DVector::from_element(3, 0.5)).unwrap();
        let r = check_condition(&net, ConditionId::Eq19).unwrap();
        assert!(r.holds);
        assert_eq!(r.margin, 0.0);
        assert!(matches!(check_condition(&example2(), ConditionId::Eq19), Err(Error::WrongTopology { .. })));
    }

    #[test]
    fn democracy_detects_left_eigenvector() {
        let c = DMatrix::from_row_slice(3, 3, &[0.0, 0.5, 0.5, 0.5, 0.0, 0.5, 0.5, 0.5, 0.0]);
        let net = InfluenceNetwork::new(c, DVector::from_element(3, 0.3)).unwrap();
        assert!(check_condition(&net, ConditionId::Democracy).unwrap().holds);
        assert!(!check_condition(&example2(), ConditionId::Democracy).unwrap().holds);
    }

    #[test]
    fn strict_conditions_fail_at_zero_margin() {
        let c = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let net = InfluenceNetwork::new(c, DVector::from_element(2, 0.5)).unwrap();
        // zeta = (1 + 1 - 0.5)/2 = 0.75, bound 1/2.5 = 0.4 < 0.5
        let r = check_condition(&net, ConditionId::Eq15Legacy).unwrap();
        assert!(!r.holds);
        assert!((r.margin - (0.4 - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn dominance_on_example2_is_consistent() {
        let net = example2();
        let p = DVector::from_vec(vec![0.4621312, 0.31763569, 0.22023311]);
        for i in 0..3 {
            let r = check_dominance_necessary(&net, &p, i, 0.5).unwrap();
            assert!(!r.dominant);
            assert!(r.consistent());
        }
    }

    #[test]
    fn condition_ids_parse() {
        assert_eq!("eq15-legacy".parse::<ConditionId>().unwrap(), ConditionId::Eq15Legacy);
        assert_eq!("Eq17".parse::<ConditionId>().unwrap(), ConditionId::Eq17);
        assert!("eq99".parse::<ConditionId>().is_err());
    }

    #[test]
    fn dominance_ids_parse_one_based() {
        let id: ConditionId = "Dominance:2:0.6".parse().unwrap();
        assert_eq!(id, ConditionId::Dominance { node: 1, sigma: 0.6 });
        for bad in ["dominance:0:0.5", "dominance:1", "dominance:1:1.5", "dominance:x:0.5"] {
            assert!(bad.parse::<ConditionId>().is_err(), "{bad}");
        }
    }
}
