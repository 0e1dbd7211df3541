//! Round-based multi-agent execution of the perception dynamics.
//!
//! Each [`Agent`] owns its [`LocalView`], its current value and an inbox keyed
//! by sender. A round is: every agent broadcasts its value to the agents that
//! listen to it, then every agent updates from its inbox and its own state.

use std::collections::BTreeMap;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::network::InfluenceNetwork;
use crate::perception::{LocalView, RunOptions, Status, Timescale, Trajectory};
use crate::scenario::{summarize, Scenario, TrajectorySummary};

/// Agent updates run on the rayon pool from this group size up.
const PARALLEL_AGENTS: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    /// Fixed self-appraisals `gamma`.
    NoRa { gamma: DVector<f64> },
    /// Reflected appraisals.
    Ra,
    /// Reflected appraisals with a common susceptibility, written in
    /// PageRank form.
    Homogeneous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub id: usize,
    pub view: LocalView,
    pub current_p: f64,
    /// Latest value received from each in-neighbor.
    pub inbox: BTreeMap<usize, f64>,
    /// Agents to which this one accords weight; they listen to it.
    listeners: Vec<usize>,
}

impl Agent {
    /// Accepts a message; senders outside the view are refused.
    pub fn receive(&mut self, from: usize, value: f64) -> Result<()> {
        if self.view.in_neighbors.binary_search_by_key(&from, |d| d.id).is_err() {
            return Err(Error::ViewViolation { agent: self.id, foreign: from });
        }
        self.inbox.insert(from, value);
        Ok(())
    }

    pub fn listeners(&self) -> &[usize] {
        &self.listeners
    }

    fn neighbor_values(&self) -> Result<Vec<f64>> {
        if let Some(&foreign) = self.inbox.keys().find(|k| !self.view.neighbor_ids().any(|j| j == **k)) {
            return Err(Error::ViewViolation { agent: self.id, foreign });
        }
        self.view
            .neighbor_ids()
            .map(|j| {
                self.inbox
                    .get(&j)
                    .copied()
                    .ok_or(Error::ViewViolation { agent: self.id, foreign: j })
            })
            .collect()
    }

    fn update(&self, mode: &Mode) -> Result<f64> {
        let q = self.neighbor_values()?;
        Ok(match mode {
            Mode::NoRa { .. } => self.view.update_fixed_appraisal(self.current_p, &q),
            Mode::Ra => self.view.update_reflected(self.current_p, &q),
            Mode::Homogeneous => {
                let v = &self.view;
                let mut acc = self.current_p * self.current_p;
                for (d, &pj) in v.in_neighbors.iter().zip(&q) {
                    acc += d.weight * (1.0 - pj) * pj;
                }
                v.a * acc + (1.0 - v.a) / v.n as f64
            }
        })
    }
}

/// One synchronous round.
#[derive(Debug, Clone, PartialEq)]
pub struct Round {
    pub index: usize,
    pub messages_delivered: usize,
    pub post_state: DVector<f64>,
}

/// A group of agents advancing in lockstep.
#[derive(Debug, Clone)]
pub struct Simulation {
    agents: Vec<Agent>,
    mode: Mode,
    round: usize,
}

impl Simulation {
    pub fn new(net: &InfluenceNetwork, mode: Mode, p0: &DVector<f64>) -> Result<Self> {
        let n = net.n();
        if p0.len() != n {
            return Err(Error::Dimension(format!("initial state has {} entries, network {n}", p0.len())));
        }
        match &mode {
            Mode::NoRa { gamma } if gamma.len() != n => {
                return Err(Error::Dimension(format!("gamma has {} entries, network {n}", gamma.len())))
            }
            Mode::Homogeneous if net.homogeneous_susceptibility().is_none() => {
                return Err(Error::NotHomogeneous)
            }
            _ => {}
        }
        let agents = (0..n)
            .map(|i| Agent {
                id: i,
                view: match &mode {
                    Mode::NoRa { gamma } => LocalView::with_gamma(net, i, gamma),
                    _ => LocalView::reflected(net, i),
                },
                current_p: p0[i],
                inbox: BTreeMap::new(),
                listeners: net.out_neighbors(i),
            })
            .collect();
        Ok(Simulation { agents, mode, round: 0 })
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn state(&self) -> DVector<f64> {
        DVector::from_iterator(self.agents.len(), self.agents.iter().map(|a| a.current_p))
    }

    /// Test hook: pushes a message from `from` into `to`'s inbox as if it
    /// had been delivered, bypassing the broadcast.
    pub fn inject(&mut self, from: usize, to: usize, value: f64) {
        self.agents[to].inbox.insert(from, value);
    }

    fn deliver(&mut self) -> Result<usize> {
        let outgoing: Vec<(usize, f64, Vec<usize>)> = self
            .agents
            .iter()
            .map(|a| (a.id, a.current_p, a.listeners.clone()))
            .collect();
        let mut delivered = 0;
        for (from, value, listeners) in outgoing {
            for to in listeners {
                self.agents[to].receive(from, value)?;
                delivered += 1;
            }
        }
        Ok(delivered)
    }

    pub fn step_round(&mut self) -> Result<Round> {
        let messages_delivered = self.deliver()?;
        let mode = &self.mode;
        let next: Vec<f64> = if self.agents.len() >= PARALLEL_AGENTS {
            self.agents.par_iter().map(|a| a.update(mode)).collect::<Result<_>>()?
        } else {
            self.agents.iter().map(|a| a.update(mode)).collect::<Result<_>>()?
        };
        for (agent, p) in self.agents.iter_mut().zip(next) {
            agent.current_p = p;
        }
        self.round += 1;
        Ok(Round { index: self.round, messages_delivered, post_state: self.state() })
    }
}

/// Runs synchronous rounds until the sup-norm change drops below `tol`,
/// a value leaves the divergence bound, or `max_iter` rounds pass.
pub fn run_distributed(
    net: &InfluenceNetwork,
    mode: Mode,
    p0: &DVector<f64>,
    opts: RunOptions,
) -> Result<Trajectory> {
    let mut sim = Simulation::new(net, mode, p0)?;
    let mut states = vec![p0.clone()];
    let mut status = Status::MaxIter;
    for _ in 0..opts.max_iter {
        let round = sim.step_round()?;
        let prev = states.last().unwrap();
        let step = (&round.post_state - prev).amax();
        let diverged =
            round.post_state.iter().any(|v| !v.is_finite() || v.abs() > opts.divergence_bound);
        states.push(round.post_state);
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

/// Runs every scenario on a pool of `parallelism` threads (0: rayon default).
/// Failures are recorded in the summaries; the batch itself never fails.
pub fn run_batch(scenarios: &[Scenario], parallelism: usize) -> Vec<TrajectorySummary> {
    let work = || scenarios.par_iter().flat_map_iter(summarize).collect();
    match rayon::ThreadPoolBuilder::new().num_threads(parallelism).build() {
        Ok(pool) => pool.install(work),
        Err(_) => scenarios.iter().flat_map(summarize).collect(),
    }
}
