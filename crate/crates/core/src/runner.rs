//! Run orchestration: configuration, the single-run driver and the
//! convergence-study harness, with CSV/JSON emission.
//!
//! All numbers in CSV files are written with 17 significant digits, so a
//! rerun with an identical configuration produces byte-identical output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::DVector;

use crate::diagnostics::{self, DenseTrace, RunRecord, Snapshot};
use crate::error::{Error, Result};
use crate::fluxes::NumericalFlux;
use crate::kernels::Kernel;
use crate::problems::{problem_by_name, BcKind, Problem, ProblemFlux};
use crate::quadrature::{
    gauss_legendre_rule, gauss_lobatto_rule, trapezoid_rule, QuadratureRule, QuadratureSpec,
};
use crate::semidiscretization::{
    assemble_weak_operator, assemble_weak_operator_2d, build_strong_operator, reference_rule,
    BoundaryMode, StrongOperator, StrongRhs, WeakOperator, WeakRhs,
};
use crate::space::{build_space, NodeSet, RbfSpace};
use crate::time_integration::{cfl_timestep, integrate_to, Scheme, TimeStepConfig};
use crate::Point;

/// Spatial discretization selected for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Strong,
    WeakAnalytical,
    WeakCollocation,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Strong => "strong",
            Method::WeakAnalytical => "weak-analytical",
            Method::WeakCollocation => "weak-collocation",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strong" => Ok(Method::Strong),
            "weak-analytical" => Ok(Method::WeakAnalytical),
            "weak-collocation" => Ok(Method::WeakCollocation),
            _ => Err(Error::Config(format!("unknown method '{s}'"))),
        }
    }
}

/// Node-set selection: `equidistant | random:<seed> | file:<path>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeSpec {
    Equidistant,
    Random { seed: u64 },
    File(PathBuf),
}

impl std::str::FromStr for NodeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "equidistant" {
            return Ok(NodeSpec::Equidistant);
        }
        if let Some(seed) = s.strip_prefix("random:") {
            let seed = seed
                .parse()
                .map_err(|_| Error::Config(format!("bad seed in node spec '{s}'")))?;
            return Ok(NodeSpec::Random { seed });
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(NodeSpec::File(PathBuf::from(path)));
        }
        Err(Error::Config(format!("unknown node spec '{s}'")))
    }
}

/// Everything a run needs, with the defaults used throughout: C = 0.1,
/// ε = 5 for the infinitely smooth kernels, P = 1 for the weak methods and
/// P = 0 for the strong baseline.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub problem: String,
    pub bc: BcKind,
    pub method: Method,
    pub kernel: String,
    pub eps: Option<f64>,
    /// P; defaults to 1 for weak methods and 0 for the strong method.
    pub poly: Option<usize>,
    pub n: usize,
    pub nodes: NodeSpec,
    pub quadrature: Option<QuadratureSpec>,
    pub flux: Option<String>,
    pub cfl: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub snapshots: Vec<f64>,
    pub boundary_mode: Option<BoundaryMode>,
    pub out_dir: Option<PathBuf>,
    pub dump_operators: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            problem: "advect-gauss".into(),
            bc: BcKind::Periodic,
            method: Method::WeakCollocation,
            kernel: "cubic".into(),
            eps: None,
            poly: None,
            n: 20,
            nodes: NodeSpec::Equidistant,
            quadrature: None,
            flux: None,
            cfl: 0.1,
            t_end: 10.0,
            scheme: Scheme::SspRk33,
            snapshots: Vec::new(),
            boundary_mode: None,
            out_dir: None,
            dump_operators: false,
        }
    }
}

impl RunConfig {
    /// Reads a flat `key = value` configuration file. Empty lines and lines
    /// starting with `#` are skipped.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let mut config = RunConfig::default();
        let text = std::fs::read_to_string(path)?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    /// Applies one `key = value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("bad {what} '{value}'"));
        match key {
            "problem" => self.problem = value.to_string(),
            "bc" => {
                self.bc = match value {
                    "periodic" => BcKind::Periodic,
                    "inflow" => BcKind::Inflow,
                    _ => return Err(bad("boundary condition")),
                }
            }
            "method" => self.method = value.parse()?,
            "kernel" => self.kernel = value.to_string(),
            "eps" => self.eps = Some(value.parse().map_err(|_| bad("shape parameter"))?),
            "P" => self.poly = Some(value.parse().map_err(|_| bad("polynomial count"))?),
            "N" => self.n = value.parse().map_err(|_| bad("node count"))?,
            "nodes" => self.nodes = value.parse()?,
            "quadrature" => self.quadrature = Some(value.parse()?),
            "flux" => self.flux = Some(value.to_string()),
            "cfl" => self.cfl = value.parse().map_err(|_| bad("CFL constant"))?,
            "tend" => self.t_end = value.parse().map_err(|_| bad("final time"))?,
            "scheme" => self.scheme = value.parse()?,
            "snapshots" => {
                self.snapshots = value
                    .split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| t.trim().parse().map_err(|_| bad("snapshot list")))
                    .collect::<Result<_>>()?;
            }
            "boundary_mode" => self.boundary_mode = Some(value.parse()?),
            "out" => self.out_dir = Some(PathBuf::from(value)),
            "dump_operators" => {
                self.dump_operators = value.parse().map_err(|_| bad("flag"))?;
            }
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    fn resolved_poly(&self) -> usize {
        self.poly.unwrap_or(match self.method {
            Method::Strong => 0,
            _ => 1,
        })
    }

    fn build_kernel(&self) -> Result<Kernel> {
        let kernel = Kernel::parse(&self.kernel, self.eps)?;
        if !kernel.kind().is_polyharmonic() && self.eps.is_none() {
            // paper-default shape for the smooth kernels
            return Kernel::new(kernel.kind(), 5.0);
        }
        Ok(kernel)
    }

    fn build_nodes(&self, problem: &Problem) -> Result<NodeSet> {
        let domain = *problem.domain();
        match &self.nodes {
            NodeSpec::Equidistant => NodeSet::equidistant(domain, self.n),
            NodeSpec::Random { seed } => NodeSet::random(domain, self.n, *seed),
            NodeSpec::File(path) => {
                let nodes = NodeSet::from_file(path, domain)?;
                if nodes.len() != self.n {
                    log::info!(
                        "node file holds {} points; overriding configured N = {}",
                        nodes.len(),
                        self.n
                    );
                }
                Ok(nodes)
            }
        }
    }

    fn build_flux(&self, problem: &Problem) -> Result<NumericalFlux> {
        let name = self.flux.as_deref().unwrap_or(match &problem.flux {
            ProblemFlux::Scalar { .. } => "upwind",
            ProblemFlux::System { .. } => "rusanov",
        });
        match name {
            "upwind" => {
                let Some(lambda) = problem.advection else {
                    return Err(Error::Config(
                        "the upwind flux needs a linear advection problem".into(),
                    ));
                };
                Ok(NumericalFlux::Upwind { speed: lambda[0] })
            }
            "godunov" => match &problem.flux {
                ProblemFlux::Scalar { flux, .. } => {
                    Ok(NumericalFlux::Godunov { flux: flux.clone() })
                }
                _ => Err(Error::Config("the Godunov flux is scalar".into())),
            },
            "central" => match &problem.flux {
                ProblemFlux::Scalar { flux, .. } => {
                    Ok(NumericalFlux::Central { flux: flux.clone() })
                }
                _ => Err(Error::Config("the central flux is scalar".into())),
            },
            "rusanov" => match &problem.flux {
                ProblemFlux::System { flux, wavespeed } => Ok(NumericalFlux::Rusanov {
                    flux: flux.clone(),
                    wavespeed: wavespeed.clone(),
                }),
                _ => Err(Error::Config(
                    "the Rusanov flux couples system states".into(),
                )),
            },
            _ => Err(Error::Config(format!("unknown flux '{name}'"))),
        }
    }

    fn build_operator(&self, space: &Arc<RbfSpace>) -> Result<WeakOperator> {
        let dim = space.domain().dim();
        let (a, b) = space.domain().bounds(0);
        if dim == 1 {
            let rule = match self.quadrature {
                None => gauss_legendre_rule(a, b, (5 * space.len()).max(100))?,
                Some(QuadratureSpec::Trapezoid(j)) => trapezoid_rule(a, b, j)?,
                Some(QuadratureSpec::Gauss(j)) => gauss_legendre_rule(a, b, j)?,
                Some(QuadratureSpec::Lobatto(j)) => gauss_lobatto_rule(a, b, j)?,
                Some(QuadratureSpec::Reference) => reference_rule(space)?,
            };
            assemble_weak_operator(space.clone(), rule)
        } else {
            let (y0, y1) = space.domain().bounds(1);
            let per_axis =
                |spec: Option<QuadratureSpec>| -> Result<(QuadratureRule, QuadratureRule)> {
                    match spec {
                        None => Ok((trapezoid_rule(a, b, 200)?, trapezoid_rule(y0, y1, 200)?)),
                        Some(QuadratureSpec::Trapezoid(j)) => {
                            Ok((trapezoid_rule(a, b, j)?, trapezoid_rule(y0, y1, j)?))
                        }
                        Some(QuadratureSpec::Gauss(j)) => Ok((
                            gauss_legendre_rule(a, b, j)?,
                            gauss_legendre_rule(y0, y1, j)?,
                        )),
                        Some(QuadratureSpec::Lobatto(j)) => {
                            Ok((gauss_lobatto_rule(a, b, j)?, gauss_lobatto_rule(y0, y1, j)?))
                        }
                        Some(QuadratureSpec::Reference) => Err(Error::Config(
                            "the reference quadrature is one-dimensional; pick a per-axis rule"
                                .into(),
                        )),
                    }
                };
            let (rx, ry) = per_axis(self.quadrature)?;
            assemble_weak_operator_2d(space.clone(), &rx, &ry)
        }
    }

    fn resolved_boundary_mode(&self) -> BoundaryMode {
        self.boundary_mode.unwrap_or(match self.bc {
            BcKind::Inflow => BoundaryMode::InjectInflow,
            BcKind::Periodic => BoundaryMode::None,
        })
    }

    fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0) {
            return Err(Error::Config(format!(
                "CFL constant must be positive, got {}",
                self.cfl
            )));
        }
        if self.t_end < 0.0 {
            return Err(Error::Config(format!(
                "final time must be >= 0, got {}",
                self.t_end
            )));
        }
        if self.n == 0 {
            return Err(Error::Config("node count must be positive".into()));
        }
        if self.boundary_mode == Some(BoundaryMode::InjectInflow) && self.bc != BcKind::Inflow {
            return Err(Error::Config(
                "inject-inflow boundary enforcement needs an inflow problem".into(),
            ));
        }
        Ok(())
    }
}

/// Time/stability data of a finished (or aborted) run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub dt: f64,
    pub steps: usize,
    pub tau_q: f64,
    pub space_condition: f64,
    pub mass_condition: f64,
    pub blow_up: Option<BlowUpInfo>,
    pub final_errors: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy)]
pub struct BlowUpInfo {
    pub t: f64,
    pub stage: usize,
}

/// A finished run: the recorded series plus summary data and the final state.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub record: RunRecord,
    pub summary: RunSummary,
    /// Final state (last finite state if the run blew up), component-major.
    pub final_state: Vec<f64>,
    pub final_time: f64,
}

/// Executes one run: build space → operator → integrate → write outputs.
/// A blow-up terminates gracefully with the partial series (and files, if an
/// output directory is set).
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let problem = problem_by_name(&config.problem, config.bc)?;
    let kernel = config.build_kernel()?;
    let nodes = config.build_nodes(&problem)?;
    let n = nodes.len();
    let space = Arc::new(build_space(kernel, nodes, config.resolved_poly())?);
    let op = config.build_operator(&space)?;
    let flux = config.build_flux(&problem)?;

    let strong_op: Option<StrongOperator> = match config.method {
        Method::Strong => Some(build_strong_operator(
            space.clone(),
            config.resolved_boundary_mode(),
        )?),
        _ => None,
    };

    let max_speed = problem.max_initial_wave_speed(10 * n)?;
    let dt = match cfl_timestep(config.cfl, space.domain().measure(), n, max_speed) {
        Ok(dt) => dt.min(config.t_end.max(f64::MIN_POSITIVE)),
        Err(Error::ZeroWaveSpeed) if config.t_end > 0.0 => config.t_end,
        Err(e) => return Err(e),
    };

    let u0 = DVector::from_column_slice(&problem.initial_state(space.nodes().points()));
    let mut record = RunRecord::default();
    record.record(&op, 0.0, &u0, problem.n_components);

    let ts_config = TimeStepConfig {
        cfl: config.cfl,
        t_end: config.t_end,
        scheme: config.scheme,
        snapshot_times: config.snapshots.clone(),
    };

    let mut snapshot_states: Vec<(f64, DVector<f64>)> = Vec::new();
    let mut wanted: Vec<f64> = config.snapshots.clone();
    wanted.sort_by(f64::total_cmp);
    let eps = 1e-12 * config.t_end.abs().max(1.0);

    let mut steps = 0usize;
    let outcome = {
        let mut on_step = |t: f64, u: &DVector<f64>| {
            steps += 1;
            record.record(&op, t, u, problem.n_components);
            if wanted.iter().any(|&s| (s - t).abs() <= eps) {
                snapshot_states.push((t, u.clone()));
            }
        };
        match config.method {
            Method::Strong => {
                let rhs = StrongRhs {
                    op: strong_op.as_ref().expect("built above"),
                    problem: &problem,
                };
                integrate_to(&rhs, &u0, &ts_config, dt, &mut on_step)
            }
            Method::WeakAnalytical | Method::WeakCollocation => {
                let rhs = WeakRhs {
                    op: &op,
                    flux: &flux,
                    problem: &problem,
                    analytical: config.method == Method::WeakAnalytical,
                };
                integrate_to(&rhs, &u0, &ts_config, dt, &mut on_step)
            }
        }
    };

    let (final_state, final_time, blow_up) = match outcome {
        Ok(u) => (u, config.t_end, None),
        Err(Error::BlowUp { t, stage, last }) => {
            log::warn!("run blew up at t = {t:.6e} (stage {stage})");
            let state = last.map(DVector::from_vec).unwrap_or_else(|| u0.clone());
            let last_time = record.times.last().copied().unwrap_or(0.0);
            (state, last_time, Some(BlowUpInfo { t, stage }))
        }
        Err(e) => return Err(e),
    };

    let final_errors = if blow_up.is_none() {
        match problem.exact_state(final_time, space.nodes().points()) {
            Ok(Some(exact)) => {
                let numeric: Vec<f64> = final_state.iter().take(n).copied().collect();
                Some(diagnostics::error_norms(&exact[..n], &numeric)?)
            }
            Ok(None) => None,
            Err(e) => {
                log::warn!("exact solution unavailable at t = {final_time}: {e}");
                None
            }
        }
    } else {
        None
    };

    record.final_errors = final_errors;
    for (t, u) in snapshot_states {
        let snap = make_snapshot(&problem, &space, t, &u, true)?;
        record.snapshots.push(snap);
    }
    let final_snapshot = make_snapshot(&problem, &space, final_time, &final_state, true)?;

    let summary = RunSummary {
        dt,
        steps,
        tau_q: op.tau_q(),
        space_condition: space.condition(),
        mass_condition: op.mass_condition(),
        blow_up,
        final_errors,
    };

    if let Some(dir) = &config.out_dir {
        std::fs::create_dir_all(dir)?;
        write_series_csv(&dir.join("series.csv"), &record, problem.n_components)?;
        write_solution_csv(&dir.join("solution.csv"), &problem, &final_snapshot)?;
        for (i, snap) in record.snapshots.iter().enumerate() {
            write_solution_csv(&dir.join(format!("snapshot_{i:03}.csv")), &problem, snap)?;
        }
        write_summary_json(&dir.join("summary.json"), config, &summary)?;
        if config.dump_operators {
            let mut f = std::fs::File::create(dir.join("operators.txt"))?;
            op.write_text_dump(&mut f)?;
        }
    }
    record.snapshots.push(final_snapshot);

    Ok(RunOutcome {
        record,
        summary,
        final_state: final_state.as_slice().to_vec(),
        final_time,
    })
}

fn make_snapshot(
    problem: &Problem,
    space: &Arc<RbfSpace>,
    t: f64,
    state: &DVector<f64>,
    dense: bool,
) -> Result<Snapshot> {
    let n = space.len();
    let c = problem.n_components;
    let nodal: Vec<Vec<f64>> = (0..c)
        .map(|comp| state.rows(comp * n, n).as_slice().to_vec())
        .collect();

    let dense = if dense {
        let points = trace_points(space, 10 * n);
        let mut numeric = Vec::with_capacity(c);
        for values in &nodal {
            let interp = space.fit(values)?;
            numeric.push(interp.evaluate(&points));
        }
        let exact = match problem.exact_state(t, &points) {
            Ok(Some(e)) => Some(
                (0..c)
                    .map(|comp| e[comp * points.len()..(comp + 1) * points.len()].to_vec())
                    .collect(),
            ),
            _ => None,
        };
        Some(DenseTrace {
            points,
            numeric,
            exact,
        })
    } else {
        None
    };
    Ok(Snapshot {
        time: t,
        nodal,
        dense,
    })
}

/// Equispaced plotting points: 10N in 1D, a ceil(sqrt(10N))² grid in 2D.
fn trace_points(space: &RbfSpace, count: usize) -> Vec<Point> {
    let (a, b) = space.domain().bounds(0);
    if space.domain().dim() == 1 {
        let m = count.max(2);
        (0..m)
            .map(|i| [a + (b - a) * i as f64 / (m - 1) as f64, 0.0])
            .collect()
    } else {
        let (y0, y1) = space.domain().bounds(1);
        let m = (count as f64).sqrt().ceil() as usize;
        let m = m.max(2);
        let mut pts = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                pts.push([
                    a + (b - a) * i as f64 / (m - 1) as f64,
                    y0 + (y1 - y0) * j as f64 / (m - 1) as f64,
                ]);
            }
        }
        pts
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_series_csv(path: &Path, record: &RunRecord, n_components: usize) -> Result<()> {
    let mut out = String::new();
    if n_components == 1 {
        out.push_str("t,momentum,energy\n");
    } else {
        out.push('t');
        for c in 0..n_components {
            let _ = write!(out, ",momentum_{c}");
        }
        out.push_str(",energy\n");
    }
    for (i, &t) in record.times.iter().enumerate() {
        out.push_str(&fmt(t));
        for m in &record.momentum_series[i] {
            out.push(',');
            out.push_str(&fmt(*m));
        }
        out.push(',');
        out.push_str(&fmt(record.energy_series[i]));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn write_solution_csv(path: &Path, problem: &Problem, snap: &Snapshot) -> Result<()> {
    let Some(dense) = &snap.dense else {
        // nodal-only snapshot
        let mut out = String::new();
        out.push_str(&solution_header(problem, false));
        std::fs::write(path, out)?;
        return Ok(());
    };
    let c = problem.n_components;
    let dim = problem.domain().dim();
    let mut out = solution_header(problem, dense.exact.is_some());
    for (i, p) in dense.points.iter().enumerate() {
        out.push_str(&fmt(p[0]));
        if dim == 2 {
            out.push(',');
            out.push_str(&fmt(p[1]));
        }
        for comp in 0..c {
            out.push(',');
            out.push_str(&fmt(dense.numeric[comp][i]));
        }
        if let Some(exact) = &dense.exact {
            for comp_values in exact.iter() {
                out.push(',');
                out.push_str(&fmt(comp_values[i]));
            }
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn solution_header(problem: &Problem, with_exact: bool) -> String {
    let c = problem.n_components;
    let mut head = String::from("x");
    if problem.domain().dim() == 2 {
        head.push_str(",y");
    }
    if c == 1 {
        head.push_str(",u_numeric");
        if with_exact {
            head.push_str(",u_exact");
        }
    } else {
        for comp in 0..c {
            let _ = write!(head, ",u_numeric_{comp}");
        }
        if with_exact {
            for comp in 0..c {
                let _ = write!(head, ",u_exact_{comp}");
            }
        }
    }
    head.push('\n');
    head
}

fn write_summary_json(path: &Path, config: &RunConfig, summary: &RunSummary) -> Result<()> {
    use serde_json::{json, Map, Value};
    let mut map = Map::new();
    map.insert("problem".into(), json!(config.problem));
    map.insert(
        "bc".into(),
        json!(match config.bc {
            BcKind::Periodic => "periodic",
            BcKind::Inflow => "inflow",
        }),
    );
    map.insert("method".into(), json!(config.method.name()));
    map.insert("kernel".into(), json!(config.kernel));
    if let Some(eps) = config.eps {
        map.insert("eps".into(), json!(eps));
    }
    map.insert("P".into(), json!(config.resolved_poly()));
    map.insert("N".into(), json!(config.n));
    map.insert("cfl".into(), json!(config.cfl));
    map.insert("tend".into(), json!(config.t_end));
    map.insert("dt".into(), json!(summary.dt));
    map.insert("steps".into(), json!(summary.steps));
    map.insert("tau_q".into(), json!(summary.tau_q));
    map.insert("space_condition".into(), json!(summary.space_condition));
    map.insert("mass_condition".into(), json!(summary.mass_condition));
    map.insert("blow_up".into(), json!(summary.blow_up.is_some()));
    if let Some(info) = &summary.blow_up {
        map.insert("blow_up_time".into(), json!(info.t));
        map.insert("blow_up_stage".into(), json!(info.stage));
    }
    if let Some((inf, two)) = summary.final_errors {
        map.insert("err_inf".into(), json!(inf));
        map.insert("err_2".into(), json!(two));
    }
    let text = serde_json::to_string_pretty(&Value::Object(map))
        .map_err(|e| Error::Config(format!("summary serialization failed: {e}")))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// One refinement level of a convergence study.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub n: usize,
    pub err_inf: f64,
    pub err_2: f64,
    /// Order against the previous level; absent on the first row.
    pub order_inf: Option<f64>,
    pub order_2: Option<f64>,
}

/// Error table over a sequence of node counts plus least-squares orders.
/// The fitted orders are absent when any level hits exactly zero error
/// (a manufactured stationary case at round-off).
#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub fit_order_inf: Option<f64>,
    pub fit_order_2: Option<f64>,
}

/// Runs the base configuration at every node count and tabulates the final
/// errors and observed orders. Writes `convergence.csv` when the base
/// configuration has an output directory.
pub fn convergence_study(base: &RunConfig, ns: &[usize]) -> Result<ConvergenceTable> {
    if ns.len() < 2 {
        return Err(Error::Config(
            "a convergence study needs at least two node counts".into(),
        ));
    }
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(ns.len());
    for &n in ns {
        let mut config = base.clone();
        config.n = n;
        config.out_dir = None;
        config.dump_operators = false;
        let outcome = run(&config)?;
        if let Some(info) = outcome.summary.blow_up {
            return Err(Error::BlowUp {
                t: info.t,
                stage: info.stage,
                last: None,
            });
        }
        let (err_inf, err_2) = outcome.summary.final_errors.ok_or_else(|| {
            Error::Config(format!("problem '{}' has no exact solution", base.problem))
        })?;
        let (order_inf, order_2) = match rows.last() {
            Some(prev)
                if err_inf > 0.0 && prev.err_inf > 0.0 && err_2 > 0.0 && prev.err_2 > 0.0 =>
            {
                let ratio = (n as f64 / prev.n as f64).ln();
                (
                    Some((prev.err_inf / err_inf).ln() / ratio),
                    Some((prev.err_2 / err_2).ln() / ratio),
                )
            }
            _ => (None, None),
        };
        rows.push(ConvergenceRow {
            n,
            err_inf,
            err_2,
            order_inf,
            order_2,
        });
    }
    let errs_inf: Vec<f64> = rows.iter().map(|r| r.err_inf).collect();
    let errs_2: Vec<f64> = rows.iter().map(|r| r.err_2).collect();
    let table = ConvergenceTable {
        fit_order_inf: diagnostics::convergence_order(ns, &errs_inf).ok(),
        fit_order_2: diagnostics::convergence_order(ns, &errs_2).ok(),
        rows,
    };
    if let Some(dir) = &base.out_dir {
        std::fs::create_dir_all(dir)?;
        write_convergence_csv(&dir.join("convergence.csv"), &table)?;
    }
    Ok(table)
}

fn write_convergence_csv(path: &Path, table: &ConvergenceTable) -> Result<()> {
    let mut out = String::from("N,err_inf,err_2,order_inf,order_2\n");
    for row in &table.rows {
        let oi = row.order_inf.map(fmt).unwrap_or_default();
        let o2 = row.order_2.map(fmt).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{oi},{o2}",
            row.n,
            fmt(row.err_inf),
            fmt(row.err_2)
        );
    }
    let fi = table.fit_order_inf.map(fmt).unwrap_or_default();
    let f2 = table.fit_order_2.map(fmt).unwrap_or_default();
    let _ = writeln!(out, "fit,,,{fi},{f2}");
    std::fs::write(path, out)?;
    Ok(())
}
