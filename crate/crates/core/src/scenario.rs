//! Scenario files: loading, running, and writing artifacts.
//!
//! A scenario is a TOML document (conventionally with a `.cfg` extension):
//!
//! ```toml
//! name = "example2"
//! mode = "perception_ra"        # see `ScenarioMode`
//! tol = 1e-12                   # optional
//! max_iter = 100000             # optional
//! seed = 0                      # optional; multistarts and invariance samples
//! divergence_bound = 1e9        # optional
//!
//! [network]
//! c = [[0, 0.6, 0.4], [0, 0, 1], [0.5, 0.5, 0]]
//! a = [0, 0.4, 0.6]
//! # gamma = [...]             # required by the fixed-appraisal modes
//!
//! [[initial]]
//! values = [-0.5, -0.3, 0.5]
//!
//! [[initial]]
//! simplex_random = { seed = 3 }
//!
//! [[initial]]
//! uniform_in_box = { mu = [0, 0, 0], nu = [0.5, 0.5, 0.5], seed = 1 }
//!
//! [outputs]
//! trajectory_csv = true
//! equilibrium_report = true
//! condition_report = ["Eq15", "Eq16"]
//! invariant_test = { samples = 10000, set = "M" }
//! stride = { full_until = 10000, every = 10 }
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use crate::analysis::{
    build_invariant_set_h, build_invariant_set_m, check_condition, one_step_invariance_test,
    solve_equilibrium, star_full_center_box, star_partial_center_box, ConditionId, IntervalBox,
};
use crate::error::{Error, Result};
use crate::fj::{
    compute_social_power, step_fj_opinions, step_power_evolution_issue,
    step_power_evolution_single, OpinionState,
};
use crate::network::{InfluenceNetwork, NetworkOptions};
use crate::perception::{
    run_to_convergence, step_pagerank_ra, step_perception_no_ra, step_perception_ra,
    try_run_to_convergence, RunOptions, Status, Timescale, Trajectory, DEFAULT_DIVERGENCE_BOUND,
};
use crate::random::{box_point, rng, simplex_point};
use crate::simkit::{run_distributed, Mode};

/// Exit status of a run whose trajectories all converged, or of a report.
pub const EXIT_OK: i32 = 0;
/// Exit status on an error, including runs that hit `max_iter`.
pub const EXIT_ERROR: i32 = 1;
/// Exit status when some trajectory diverged.
pub const EXIT_DIVERGED: i32 = 2;

/// Multistarts used for the equilibrium report.
pub const REPORT_MULTISTARTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioMode {
    /// Direct social-power solve for `gamma`; no iteration.
    SocialPower,
    PerceptionNoRa,
    PerceptionRa,
    /// Same update as `perception_ra`, indexed by opinion step.
    PerceptionRaSingle,
    PowerEvolution,
    PowerEvolutionSingle,
    PagerankRa,
    /// Opinion dynamics on one issue; initial vectors are the initial opinions.
    FjOpinions,
    DistributedNoRa,
    DistributedRa,
}

impl ScenarioMode {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioMode::SocialPower => "social_power",
            ScenarioMode::PerceptionNoRa => "perception_no_ra",
            ScenarioMode::PerceptionRa => "perception_ra",
            ScenarioMode::PerceptionRaSingle => "perception_ra_single",
            ScenarioMode::PowerEvolution => "power_evolution",
            ScenarioMode::PowerEvolutionSingle => "power_evolution_single",
            ScenarioMode::PagerankRa => "pagerank_ra",
            ScenarioMode::FjOpinions => "fj_opinions",
            ScenarioMode::DistributedNoRa => "distributed_no_ra",
            ScenarioMode::DistributedRa => "distributed_ra",
        }
    }

    pub fn needs_gamma(&self) -> bool {
        matches!(
            self,
            ScenarioMode::SocialPower
                | ScenarioMode::PerceptionNoRa
                | ScenarioMode::FjOpinions
                | ScenarioMode::DistributedNoRa
        )
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    Values(Vec<f64>),
    SimplexRandom { seed: Option<u64> },
    UniformInBox { mu: Vec<f64>, nu: Vec<f64>, seed: Option<u64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum InvariantSet {
    H,
    M,
    /// `[0, 1 + alpha e_1]` on a star with fully stubborn center.
    #[serde(rename = "star_full")]
    StarFull,
    /// Operational box on a star with partially stubborn center.
    #[serde(rename = "star_partial")]
    StarPartial,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantRequest {
    pub samples: usize,
    pub set: InvariantSet,
    /// Multiplies the upper bounds; values above 1 give a falsification control.
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

/// Rows `s <= full_until` are all written, then every `every`-th row; the
/// final row is always written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stride {
    pub full_until: usize,
    pub every: usize,
}

impl Default for Stride {
    fn default() -> Self {
        Stride { full_until: 10_000, every: 10 }
    }
}

impl Stride {
    pub fn keeps(&self, step: usize, last: usize) -> bool {
        step <= self.full_until || step == last || step % self.every.max(1) == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outputs {
    pub trajectory_csv: bool,
    pub equilibrium_report: bool,
    pub condition_report: Vec<ConditionId>,
    pub invariant_test: Option<InvariantRequest>,
    pub stride: Stride,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutputs {
    #[serde(default = "yes")]
    trajectory_csv: bool,
    #[serde(default)]
    equilibrium_report: bool,
    #[serde(default)]
    condition_report: Vec<String>,
    invariant_test: Option<InvariantRequest>,
    stride: Option<Stride>,
}

fn yes() -> bool {
    true
}

impl Default for RawOutputs {
    fn default() -> Self {
        RawOutputs {
            trajectory_csv: true,
            equilibrium_report: false,
            condition_report: Vec::new(),
            invariant_test: None,
            stride: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    c: Vec<Vec<f64>>,
    a: Vec<f64>,
    gamma: Option<Vec<f64>>,
    #[serde(default)]
    renormalize_rows: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    n: Option<usize>,
    mode: ScenarioMode,
    tol: Option<f64>,
    max_iter: Option<usize>,
    seed: Option<u64>,
    divergence_bound: Option<f64>,
    network: RawNetwork,
    #[serde(default)]
    initial: Vec<InitialSpec>,
    #[serde(default)]
    outputs: RawOutputs,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub net: InfluenceNetwork,
    pub gamma: Option<DVector<f64>>,
    pub mode: ScenarioMode,
    pub initial: Vec<InitialSpec>,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub divergence_bound: f64,
    pub outputs: Outputs,
}

/// Command-line replacements for scenario settings.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub seed: Option<u64>,
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    parse_scenario(&text, &path.display().to_string())
}

/// Parses and validates scenario text; `origin` names it in errors.
pub fn parse_scenario(text: &str, origin: &str) -> Result<Scenario> {
    let parse_err = |message: String| Error::Parse { path: origin.to_string(), message };
    let raw: RawScenario = toml::from_str(text).map_err(|e| parse_err(e.to_string()))?;

    let rows = &raw.network.c;
    let n = rows.len();
    if let Some(k) = rows.iter().position(|r| r.len() != n) {
        return Err(parse_err(format!("row {} of c has {} entries, expected {n}", k + 1, rows[k].len())));
    }
    if let Some(declared) = raw.n {
        if declared != n {
            return Err(parse_err(format!("n = {declared} but c has {n} rows")));
        }
    }
    let net = InfluenceNetwork::with_options(
        DMatrix::from_fn(n, n, |i, j| rows[i][j]),
        DVector::from_column_slice(&raw.network.a),
        NetworkOptions { renormalize_rows: raw.network.renormalize_rows },
    )?;
    let gamma = raw.network.gamma.map(DVector::from_vec);
    if let Some(g) = &gamma {
        if g.len() != n {
            return Err(parse_err(format!("gamma has {} entries, expected {n}", g.len())));
        }
    }
    if raw.mode.needs_gamma() && gamma.is_none() {
        return Err(parse_err(format!("mode {} requires network.gamma", raw.mode.name())));
    }
    if raw.mode == ScenarioMode::PagerankRa && net.homogeneous_susceptibility().is_none() {
        return Err(Error::NotHomogeneous);
    }
    if raw.mode != ScenarioMode::SocialPower && raw.initial.is_empty() {
        return Err(parse_err("at least one [[initial]] entry is required".into()));
    }
    for (k, spec) in raw.initial.iter().enumerate() {
        let bad = match spec {
            InitialSpec::Values(v) => v.len() != n,
            InitialSpec::SimplexRandom { .. } => false,
            InitialSpec::UniformInBox { mu, nu, .. } => {
                mu.len() != n
                    || nu.len() != n
                    || mu.iter().zip(nu).any(|(m, v)| !(m.is_finite() && v.is_finite() && m <= v))
            }
        };
        if bad {
            return Err(parse_err(format!("initial entry {} does not fit n = {n}", k + 1)));
        }
    }
    let condition_report = raw
        .outputs
        .condition_report
        .iter()
        .map(|s| s.parse::<ConditionId>().map_err(|e| parse_err(e.to_string())))
        .collect::<Result<Vec<_>>>()?;

    let scn = Scenario {
        name: raw.name,
        net,
        gamma,
        mode: raw.mode,
        initial: raw.initial,
        tol: raw.tol.unwrap_or(1e-12),
        max_iter: raw.max_iter.unwrap_or(100_000),
        seed: raw.seed.unwrap_or(0),
        divergence_bound: raw.divergence_bound.unwrap_or(DEFAULT_DIVERGENCE_BOUND),
        outputs: Outputs {
            trajectory_csv: raw.outputs.trajectory_csv,
            equilibrium_report: raw.outputs.equilibrium_report,
            condition_report,
            invariant_test: raw.outputs.invariant_test,
            stride: raw.outputs.stride.unwrap_or_default(),
        },
    };
    if !(scn.tol > 0.0) || scn.max_iter == 0 {
        return Err(parse_err("tol must be positive and max_iter at least 1".into()));
    }
    Ok(scn)
}

impl Scenario {
    pub fn n(&self) -> usize {
        self.net.n()
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(t) = o.tol {
            self.tol = t;
        }
        if let Some(m) = o.max_iter {
            self.max_iter = m;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions { tol: self.tol, max_iter: self.max_iter, divergence_bound: self.divergence_bound }
    }

    /// Concrete initial vectors; random entries without a seed use the
    /// scenario seed offset by their position.
    pub fn initial_states(&self) -> Vec<DVector<f64>> {
        let n = self.n();
        self.initial
            .iter()
            .enumerate()
            .map(|(k, spec)| match spec {
                InitialSpec::Values(v) => DVector::from_column_slice(v),
                InitialSpec::SimplexRandom { seed } => {
                    simplex_point(&mut rng(seed.unwrap_or(self.seed + k as u64)), n)
                }
                InitialSpec::UniformInBox { mu, nu, seed } => box_point(
                    &mut rng(seed.unwrap_or(self.seed + k as u64)),
                    &DVector::from_column_slice(mu),
                    &DVector::from_column_slice(nu),
                ),
            })
            .collect()
    }

    fn gamma(&self) -> &DVector<f64> {
        self.gamma.as_ref().expect("validated at load")
    }

    /// Runs the scenario's dynamics from `p0`.
    pub fn run_from(&self, p0: &DVector<f64>) -> Result<Trajectory> {
        let net = &self.net;
        let opts = self.run_options();
        let p0 = p0.clone();
        Ok(match self.mode {
            ScenarioMode::SocialPower => Trajectory {
                states: vec![compute_social_power(net, self.gamma())?],
                status: Status::Converged,
                timescale: Timescale::Issue,
            },
            ScenarioMode::PerceptionNoRa => {
                let g = self.gamma();
                run_to_convergence(|p| step_perception_no_ra(net, g, p), p0, opts)
            }
            ScenarioMode::PerceptionRa => run_to_convergence(|p| step_perception_ra(net, p), p0, opts),
            ScenarioMode::PerceptionRaSingle => {
                run_to_convergence(|p| step_perception_ra(net, p), p0, opts)
                    .with_timescale(Timescale::Step)
            }
            ScenarioMode::PowerEvolution => {
                try_run_to_convergence(|x| step_power_evolution_issue(net, x), p0, opts)?
            }
            ScenarioMode::PowerEvolutionSingle => {
                let mut v = DMatrix::identity(self.n(), self.n());
                run_to_convergence(
                    |x| {
                        let (v_next, x_next) = step_power_evolution_single(net, &v, x);
                        v = v_next;
                        x_next
                    },
                    p0,
                    opts,
                )
                .with_timescale(Timescale::Step)
            }
            ScenarioMode::PagerankRa => try_run_to_convergence(|p| step_pagerank_ra(net, p), p0, opts)?,
            ScenarioMode::FjOpinions => {
                let g = self.gamma();
                let y0 = p0.clone();
                run_to_convergence(
                    |y| step_fj_opinions(net, g, &OpinionState { y: y.clone(), y0: y0.clone(), issue: 0, step: 0 }).y,
                    p0,
                    opts,
                )
                .with_timescale(Timescale::Step)
            }
            ScenarioMode::DistributedNoRa => {
                run_distributed(net, Mode::NoRa { gamma: self.gamma().clone() }, &p0, opts)?
            }
            ScenarioMode::DistributedRa => run_distributed(net, Mode::Ra, &p0, opts)?,
        })
    }

    /// Applicable condition margins; conditions that do not apply are skipped.
    pub fn condition_margins(&self) -> Vec<(ConditionId, f64, bool)> {
        let ids = if self.outputs.condition_report.is_empty() {
            vec![ConditionId::Eq15, ConditionId::Eq16, ConditionId::Eq17, ConditionId::Eq19, ConditionId::Democracy]
        } else {
            self.outputs.condition_report.clone()
        };
        ids.into_iter()
            .filter_map(|id| check_condition(&self.net, id).ok().map(|r| (id, r.margin, r.holds)))
            .collect()
    }
}

/// Outcome of one trajectory of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySummary {
    pub scenario: String,
    /// Position of the initial state in the scenario, from 0.
    pub run: usize,
    pub mode: ScenarioMode,
    /// `Err` holds the error message.
    pub status: std::result::Result<Status, String>,
    pub iterations: usize,
    pub final_state: Option<DVector<f64>>,
    pub condition_margins: Vec<(ConditionId, f64, bool)>,
}

impl TrajectorySummary {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Ok(Status::Converged) => EXIT_OK,
            Ok(Status::Diverged) => EXIT_DIVERGED,
            Ok(Status::MaxIter) | Err(_) => EXIT_ERROR,
        }
    }
}

impl std::fmt::Display for TrajectorySummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} run={} mode={} ", self.scenario, self.run + 1, self.mode.name())?;
        match &self.status {
            Ok(s) => write!(f, "status={s} iterations={}", self.iterations)?,
            Err(e) => write!(f, "status=error message=\"{e}\"")?,
        }
        if let Some(p) = &self.final_state {
            let v: Vec<String> = p.iter().map(|x| format!("{x:.9e}")).collect();
            write!(f, " final=[{}]", v.join(","))?;
        }
        for (id, m, h) in &self.condition_margins {
            write!(f, " {}={}({:.3e})", id.name(), if *h { "holds" } else { "fails" }, m)?;
        }
        Ok(())
    }
}

/// Exit status for a set of summaries: error beats divergence beats success.
pub fn combined_exit_code(summaries: &[TrajectorySummary]) -> i32 {
    let codes: Vec<i32> = summaries.iter().map(|s| s.exit_code()).collect();
    if codes.contains(&EXIT_ERROR) {
        EXIT_ERROR
    } else if codes.contains(&EXIT_DIVERGED) {
        EXIT_DIVERGED
    } else {
        EXIT_OK
    }
}

/// Runs every initial state of `scn` and summarizes.
pub fn summarize(scn: &Scenario) -> Vec<TrajectorySummary> {
    let margins = scn.condition_margins();
    let starts = if scn.mode == ScenarioMode::SocialPower && scn.initial.is_empty() {
        vec![DVector::zeros(scn.n())]
    } else {
        scn.initial_states()
    };
    starts
        .iter()
        .enumerate()
        .map(|(run, p0)| {
            let base = TrajectorySummary {
                scenario: scn.name.clone(),
                run,
                mode: scn.mode,
                status: Err(String::new()),
                iterations: 0,
                final_state: None,
                condition_margins: margins.clone(),
            };
            match scn.run_from(p0) {
                Ok(t) => TrajectorySummary {
                    status: Ok(t.status),
                    iterations: t.iterations(),
                    final_state: Some(t.last().clone()),
                    ..base
                },
                Err(e) => TrajectorySummary { status: Err(e.to_string()), ..base },
            }
        })
        .collect()
}

/// CSV with header `step,p_1,...,p_n`, thinned by `stride`.
pub fn trajectory_csv(t: &Trajectory, stride: Stride) -> String {
    let n = t.states.first().map_or(0, |s| s.len());
    let mut out = String::from("step");
    for i in 1..=n {
        let _ = write!(out, ",p_{i}");
    }
    out.push('\n');
    let last = t.states.len() - 1;
    for (s, p) in t.states.iter().enumerate().filter(|(s, _)| stride.keeps(*s, last)) {
        let _ = write!(out, "{s}");
        for v in p.iter() {
            let _ = write!(out, ",{v:.17e}");
        }
        out.push('\n');
    }
    out
}

fn invariant_box(scn: &Scenario, req: &InvariantRequest) -> Result<IntervalBox> {
    let bx = match req.set {
        InvariantSet::H => build_invariant_set_h(&scn.net),
        InvariantSet::M => build_invariant_set_m(&scn.net),
        InvariantSet::StarFull => star_full_center_box(&scn.net)?.0,
        InvariantSet::StarPartial => star_partial_center_box(&scn.net)?.operational,
    };
    Ok(bx.scale_upper(req.scale))
}

/// Structured text report: requested conditions, equilibrium and invariance.
pub fn scenario_report(scn: &Scenario) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(out, "[scenario]");
    let _ = writeln!(out, "name = \"{}\"", scn.name);
    let _ = writeln!(out, "mode = \"{}\"", scn.mode.name());
    let _ = writeln!(out, "n = {}", scn.n());
    let _ = writeln!(out, "topology = \"{}\"", scn.net.classify_topology());
    let _ = writeln!(out);
    for &id in &scn.outputs.condition_report {
        match check_condition(&scn.net, id) {
            Ok(r) => {
                let _ = writeln!(out, "{r}");
            }
            Err(e) => {
                let _ = writeln!(out, "[condition.{}]\nerror = \"{e}\"\n", id.name());
            }
        }
    }
    if scn.outputs.equilibrium_report {
        let rep = solve_equilibrium(&scn.net, REPORT_MULTISTARTS, scn.seed, scn.run_options())?;
        let _ = writeln!(out, "{rep}");
    }
    if let Some(req) = &scn.outputs.invariant_test {
        let bx = invariant_box(scn, req)?;
        let rep = one_step_invariance_test(&scn.net, &bx, req.samples, scn.seed)?;
        let _ = writeln!(out, "[invariance.box]\nset = \"{:?}\"\nscale = {}", req.set, req.scale);
        let _ = write!(out, "{bx}");
        let _ = writeln!(out, "{rep}");
    }
    Ok(out)
}

/// Direct social-power solve for the scenario's `gamma`.
pub fn oracle_report(scn: &Scenario) -> Result<String> {
    let gamma = scn.gamma.as_ref().ok_or_else(|| {
        Error::InvalidStructure(format!("scenario {} has no gamma for a direct solve", scn.name))
    })?;
    let x = compute_social_power(&scn.net, gamma)?;
    let v: Vec<String> = x.iter().map(|x| format!("{x:.17e}")).collect();
    Ok(format!("[oracle]\nname = \"{}\"\nsocial_power = [{}]\n", scn.name, v.join(", ")))
}

/// Files written by [`run_scenario`] and the resulting exit status.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summaries: Vec<TrajectorySummary>,
    pub files: Vec<PathBuf>,
    pub exit_code: i32,
}

fn write_file(path: PathBuf, contents: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    std::fs::write(&path, contents)
        .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    files.push(path);
    Ok(())
}

/// Runs every initial state, writing `<name>_<k>.csv` per trajectory and
/// `<name>_report.txt` into `out_dir`.
pub fn run_scenario(scn: &Scenario, out_dir: &Path) -> Result<RunOutcome> {
    std::fs::create_dir_all(out_dir)
        .map_err(|source| Error::Io { path: out_dir.display().to_string(), source })?;
    let mut files = Vec::new();
    let mut summaries = Vec::new();
    let margins = scn.condition_margins();
    let starts = if scn.mode == ScenarioMode::SocialPower && scn.initial.is_empty() {
        vec![DVector::zeros(scn.n())]
    } else {
        scn.initial_states()
    };
    for (run, p0) in starts.iter().enumerate() {
        let t = scn.run_from(p0)?;
        if scn.outputs.trajectory_csv {
            let path = out_dir.join(format!("{}_{}.csv", scn.name, run + 1));
            write_file(path, &trajectory_csv(&t, scn.outputs.stride), &mut files)?;
        }
        summaries.push(TrajectorySummary {
            scenario: scn.name.clone(),
            run,
            mode: scn.mode,
            status: Ok(t.status),
            iterations: t.iterations(),
            final_state: Some(t.last().clone()),
            condition_margins: margins.clone(),
        });
    }
    let mut report = scenario_report(scn)?;
    let _ = writeln!(report, "[runs]");
    for s in &summaries {
        let _ = writeln!(report, "{s}");
    }
    write_file(out_dir.join(format!("{}_report.txt", scn.name)), &report, &mut files)?;
    let exit_code = combined_exit_code(&summaries);
    Ok(RunOutcome { summaries, files, exit_code })
}

/// Scenario files (`*.cfg`) in `dir`, sorted by name.
pub fn scenario_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir)
        .map_err(|source| Error::Io { path: dir.display().to_string(), source })?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "cfg"))
        .collect();
    files.sort();
    Ok(files)
}
