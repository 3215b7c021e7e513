//! The five subcommands. Each one writes its result files and a manifest
//! into the output directory and renders a view for stdout.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use vnfperf_core::jackson::analyze_jackson;
use vnfperf_core::qna::{self, FlowSolution};
use vnfperf_core::sim::{self, SimConfig, SimReport, TraceEvent, TraceKind};
use vnfperf_core::vmme::{self, Analyzer, ScenarioError, SweepRow, VmmeScenario, VmmeSimOptions};
use vnfperf_core::{Method, NetworkSpec, PerfReport, ValidatedNetwork};

use crate::error::CliError;
use crate::format::{to_json, Cell, Table};
use crate::input::{self, Input, Model};
use crate::manifest::{OutputDir, RunManifest};
use crate::parallel::run_replications;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Text,
}

/// Options shared by all commands.
#[derive(Debug, Clone)]
pub struct Global {
    pub output_dir: PathBuf,
    pub format: OutputFormat,
    pub seed: u64,
}

/// How a simulation is run.
#[derive(Debug, Clone, Copy)]
pub struct SimOptions {
    pub packets: u64,
    pub replications: u32,
    pub queue_cap: usize,
    pub threads: usize,
    pub include_epc_delays: bool,
}

impl SimOptions {
    fn config(&self, seed: u64) -> SimConfig {
        let mut cfg = SimConfig::with_packets(seed, self.packets);
        cfg.replications = self.replications;
        cfg.queue_cap = self.queue_cap;
        cfg
    }
}

pub fn analyzer(method: Method) -> Result<Analyzer, CliError> {
    match method {
        Method::Qna => Ok(qna::analyze),
        Method::Jackson => Ok(analyze_jackson),
        Method::Simulation => Err(CliError::Input("simulation is not an analytical method".into())),
    }
}

fn seconds_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

/// Per-queue CSV of an analytical report. The column set is a stable schema.
pub const QUEUE_COLUMNS: [&str; 8] = ["queue_id", "stage", "lambda", "ca2", "rho", "W", "sojourn", "V"];

pub fn queue_table(report: &PerfReport) -> Table {
    let mut t = Table::new(&QUEUE_COLUMNS);
    for q in &report.per_queue {
        t.push(vec![
            q.queue.into(),
            q.stage.into(),
            q.total_arrival_rate.into(),
            q.arrival_scv.into(),
            q.utilization.into(),
            q.mean_wait.into(),
            q.mean_sojourn.into(),
            q.visit_ratio.into(),
        ]);
    }
    t
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveSummary {
    pub method: Method,
    #[serde(rename = "T")]
    pub t: f64,
    pub wall_time: f64,
    pub queues: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explain: Option<FlowSolution>,
}

/// Runs one analytical method, timing it. With `explain` the QNA
/// intermediates are kept.
pub fn solve_one(net: &ValidatedNetwork, method: Method, explain: bool) -> Result<(PerfReport, SolveSummary), CliError> {
    let start = Instant::now();
    let (report, flows) = match method {
        Method::Qna => {
            let (r, f) = qna::analyze_explained(net)?;
            (r, Some(f))
        }
        m => (analyzer(m)?(net)?, None),
    };
    let wall_time = seconds_since(start);
    if let Some(f) = flows.as_ref().filter(|f| !f.clamped.is_empty()) {
        eprintln!("warning: arrival SCV of queue(s) {:?} rounded up from a tiny negative value to 0", f.clamped);
    }
    let flows = flows.filter(|_| explain);
    let summary =
        SolveSummary { method, t: report.mean_response_time, wall_time, queues: report.per_queue.len(), explain: flows };
    Ok((report, summary))
}

pub fn solve(g: &Global, file: &Path, methods: &[Method], explain: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let input = input::load(file)?;
    let net = input.model.network()?;
    let mut manifest = RunManifest::new("solve", &input.path, &input.sha256, g.seed);
    manifest.option("methods", methods.iter().map(|m| m.label()).collect::<Vec<_>>().join(","));
    manifest.option("explain", explain);
    manifest.option("input_kind", input.model.kind());
    let mut dir = OutputDir::create(&g.output_dir, manifest)?;
    let mut results = Vec::new();
    for &m in methods {
        let (report, summary) = solve_one(&net, m, explain)?;
        dir.manifest.wall_time.insert(m.label().into(), summary.wall_time);
        dir.write(&format!("solve-{}-queues.csv", m.label()), &queue_table(&report).to_csv())?;
        dir.write(&format!("solve-{}-summary.json", m.label()), &to_json(&summary))?;
        results.push((report, summary));
    }
    dir.finish()?;

    match g.format {
        OutputFormat::Json => {
            let all: Vec<&SolveSummary> = results.iter().map(|(_, s)| s).collect();
            write!(out, "{}", to_json(&all))?;
        }
        OutputFormat::Csv => {
            let mut columns = vec!["method"];
            columns.extend(QUEUE_COLUMNS);
            let mut t = Table::new(&columns);
            for (r, _) in &results {
                for row in queue_table(r).rows {
                    let mut cells = vec![Cell::from(r.method.label())];
                    cells.extend(row);
                    t.push(cells);
                }
            }
            write!(out, "{}", t.to_csv())?;
        }
        OutputFormat::Text => {
            for (r, s) in &results {
                writeln!(out, "{}: T = {} s", r.method.label(), crate::format::g9(s.t))?;
                write!(out, "{}", queue_table(r).to_text())?;
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

/// Simulates a network (probabilistic routing) or a scenario (procedure
/// level). Replications run in parallel.
pub fn run_simulation(
    model: &Model,
    seed: u64,
    opts: &SimOptions,
    trace_limit: usize,
) -> Result<(SimReport, Vec<TraceEvent>), CliError> {
    let mut cfg = opts.config(seed);
    cfg.trace_limit = trace_limit;
    cfg.check()?;
    let start = Instant::now();
    let (runs, stages) = match model {
        Model::Network(net) => {
            if opts.include_epc_delays {
                return Err(CliError::Input("--include-epc-delays applies to scenario files only".into()));
            }
            let (a, s) = sim::network_distributions(net)?;
            let runs = run_replications(cfg.replications, opts.threads, |r| sim::run_replication(net, &a, &s, &cfg, r))?;
            (runs, sim::stages(net))
        }
        Model::Scenario(sc) => {
            if trace_limit > 0 {
                return Err(CliError::Input("event traces are available for network files only".into()));
            }
            let vo = VmmeSimOptions { include_epc_delays: opts.include_epc_delays };
            let runs = run_replications(cfg.replications, opts.threads, |r| vmme::run_vmme_replication(sc, &cfg, vo, r))?;
            (runs, vmme::vmme_stages(sc))
        }
    };
    let mut report = sim::aggregate(&runs, &stages);
    report.wall_time = seconds_since(start);
    let trace = runs.into_iter().next().map(|r| r.trace).unwrap_or_default();
    Ok((report, trace))
}

pub const SIM_QUEUE_COLUMNS: [&str; 15] = [
    "queue_id",
    "stage",
    "departures",
    "throughput",
    "throughput_hw",
    "rho",
    "rho_hw",
    "W",
    "W_hw",
    "sojourn",
    "sojourn_hw",
    "L",
    "L_hw",
    "V",
    "ca2",
];

pub fn sim_queue_table(r: &SimReport) -> Table {
    let mut t = Table::new(&SIM_QUEUE_COLUMNS);
    for q in &r.per_queue {
        t.push(vec![
            q.metrics.queue.into(),
            q.metrics.stage.into(),
            q.departures.into(),
            q.throughput.mean.into(),
            q.throughput.half_width.into(),
            q.utilization.mean.into(),
            q.utilization.half_width.into(),
            q.mean_wait.mean.into(),
            q.mean_wait.half_width.into(),
            q.mean_sojourn.mean.into(),
            q.mean_sojourn.half_width.into(),
            q.mean_in_system.mean.into(),
            q.mean_in_system.half_width.into(),
            q.metrics.visit_ratio.into(),
            q.metrics.arrival_scv.into(),
        ]);
    }
    t
}

pub const TRACE_COLUMNS: [&str; 4] = ["event_time", "event_type", "queue_id", "packet_id"];

fn trace_table(events: &[TraceEvent]) -> Table {
    let mut t = Table::new(&TRACE_COLUMNS);
    for e in events {
        let kind = match e.kind {
            TraceKind::Arrival => "arrival",
            TraceKind::ServiceStart => "service_start",
            TraceKind::Departure => "departure",
            TraceKind::Exit => "exit",
        };
        t.push(vec![e.time.into(), kind.into(), e.queue.into(), e.packet.into()]);
    }
    t
}

pub fn simulate(
    g: &Global,
    file: &Path,
    opts: &SimOptions,
    trace_limit: Option<usize>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let input = input::load(file)?;
    let mut manifest = RunManifest::new("simulate", &input.path, &input.sha256, g.seed);
    manifest.option("packets", opts.packets);
    manifest.option("replications", opts.replications);
    manifest.option("include_epc_delays", opts.include_epc_delays);
    manifest.option("input_kind", input.model.kind());
    let (report, trace) = run_simulation(&input.model, g.seed, opts, trace_limit.unwrap_or(0))?;
    manifest.wall_time.insert("simulation".into(), report.wall_time);
    let mut dir = OutputDir::create(&g.output_dir, manifest)?;
    dir.write("simulate-summary.json", &to_json(&report))?;
    dir.write("simulate-queues.csv", &sim_queue_table(&report).to_csv())?;
    if trace_limit.is_some() {
        dir.write("simulate-trace.csv", &trace_table(&trace).to_csv())?;
    }
    dir.finish()?;

    match g.format {
        OutputFormat::Json => write!(out, "{}", to_json(&report))?,
        OutputFormat::Csv => write!(out, "{}", sim_queue_table(&report).to_csv())?,
        OutputFormat::Text => {
            let t = &report.mean_response_time;
            writeln!(
                out,
                "simulation: T = {} s ± {} (95%, {} samples)",
                crate::format::g9(t.mean),
                crate::format::g9(t.half_width),
                t.samples
            )?;
            writeln!(
                out,
                "measured packets {}, replications {}, events {}, wall time {} s",
                report.measured_packets,
                report.replications,
                report.events_processed,
                crate::format::g9(report.wall_time)
            )?;
            for (name, v) in &report.extra {
                writeln!(out, "{name}: {v}")?;
            }
            write!(out, "{}", sim_queue_table(&report).to_text())?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub method: Method,
    #[serde(rename = "T")]
    pub t: f64,
    /// Half-width of the 95% interval, simulation only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_half_width: Option<f64>,
    /// Relative error against the simulation, when one was run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub wall_time: f64,
}

/// Analytical methods first, then the simulation row if requested.
pub fn compare_rows(
    model: &Model,
    methods: &[Method],
    sim: Option<(&SimOptions, u64)>,
) -> Result<Vec<CompareRow>, CliError> {
    let net = model.network()?;
    let mut rows = Vec::new();
    for &m in methods {
        let (_, s) = solve_one(&net, m, false)?;
        rows.push(CompareRow { method: m, t: s.t, t_half_width: None, epsilon: None, wall_time: s.wall_time });
    }
    if let Some((opts, seed)) = sim {
        let (report, _) = run_simulation(model, seed, opts, 0)?;
        let t_sim = report.mean_response_time.mean;
        for r in &mut rows {
            r.epsilon = Some(vmme::relative_error(t_sim, r.t));
        }
        rows.push(CompareRow {
            method: Method::Simulation,
            t: t_sim,
            t_half_width: Some(report.mean_response_time.half_width),
            epsilon: None,
            wall_time: report.wall_time,
        });
    }
    Ok(rows)
}

pub fn compare_table(rows: &[CompareRow]) -> Table {
    let with_eps = rows.iter().any(|r| r.method == Method::Simulation);
    let mut t = if with_eps {
        Table::new(&["method", "T", "epsilon", "wall_time"])
    } else {
        Table::new(&["method", "T", "wall_time"])
    };
    for r in rows {
        let mut cells = vec![Cell::from(r.method.label()), r.t.into()];
        if with_eps {
            cells.push(r.epsilon.map_or(Cell::Empty, Cell::Num));
        }
        cells.push(r.wall_time.into());
        t.push(cells);
    }
    t
}

pub fn compare(
    g: &Global,
    file: &Path,
    methods: &[Method],
    sim: Option<&SimOptions>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let input = input::load(file)?;
    let mut manifest = RunManifest::new("compare", &input.path, &input.sha256, g.seed);
    manifest.option("methods", methods.iter().map(|m| m.label()).collect::<Vec<_>>().join(","));
    manifest.option("simulate", sim.is_some());
    if let Some(o) = sim {
        manifest.option("packets", o.packets);
        manifest.option("replications", o.replications);
        manifest.option("include_epc_delays", o.include_epc_delays);
    }
    let rows = compare_rows(&input.model, methods, sim.map(|o| (o, g.seed)))?;
    for r in &rows {
        manifest.wall_time.insert(r.method.label().into(), r.wall_time);
    }
    let table = compare_table(&rows);
    let mut dir = OutputDir::create(&g.output_dir, manifest)?;
    dir.write("compare.csv", &table.to_csv())?;
    dir.write("compare.txt", &table.to_text())?;
    dir.write("compare.json", &to_json(&rows))?;
    dir.finish()?;
    match g.format {
        OutputFormat::Json => write!(out, "{}", to_json(&rows))?,
        OutputFormat::Csv => write!(out, "{}", table.to_csv())?,
        OutputFormat::Text => write!(out, "{}", table.to_text())?,
    }
    Ok(())
}

/// Parses `a:b:step` ranges and single values, comma separated, into a
/// sorted list without duplicates. Values may use exponent notation
/// (`1e5:2e6:1e5`) as long as they are whole numbers.
pub fn parse_users(spec: &str) -> Result<Vec<u64>, CliError> {
    let bad = |why: &str| CliError::Input(format!("--users `{spec}`: {why}"));
    let num = |s: &str| -> Result<u64, CliError> {
        let x: f64 = s.trim().parse().map_err(|_| bad(&format!("`{s}` is not a number")))?;
        if !(x >= 0.0 && x.fract() == 0.0 && x < 1e18) {
            return Err(bad(&format!("`{s}` is not a whole user count")));
        }
        Ok(x as u64)
    };
    let mut users = Vec::new();
    for part in spec.split(',').filter(|p| !p.trim().is_empty()) {
        let fields: Vec<&str> = part.split(':').collect();
        match fields.as_slice() {
            [v] => users.push(num(v)?),
            [a, b, step] => {
                let (a, b, step) = (num(a)?, num(b)?, num(step)?);
                if step == 0 || a > b {
                    return Err(bad("a range needs a <= b and step > 0"));
                }
                if (b - a) / step > 100_000 {
                    return Err(bad("range has too many points"));
                }
                users.extend((0..).map(|i| a + i * step).take_while(|&u| u <= b));
            }
            _ => return Err(bad("expected `a:b:step` or a single value")),
        }
    }
    if users.is_empty() {
        return Err(bad("no user counts"));
    }
    users.sort_unstable();
    users.dedup();
    Ok(users)
}

pub const SWEEP_COLUMNS: [&str; 7] = ["N_U", "K_W", "T", "rho_FE", "rho_W_max", "rho_DB", "scaled_flag"];

pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut t = Table::new(&SWEEP_COLUMNS);
    for r in rows {
        t.push(vec![
            r.num_users.into(),
            r.k_w.into(),
            r.t.into(),
            r.rho_fe.into(),
            r.rho_w_max.into(),
            r.rho_db.into(),
            (r.scaled as u64).into(),
        ]);
    }
    t
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossCheck {
    pub num_users: u64,
    pub k_w: usize,
    pub t_theo: f64,
    pub t_sim: f64,
    pub t_sim_half_width: f64,
    pub epsilon: f64,
    pub wall_time: f64,
}

pub const CROSSCHECK_COLUMNS: [&str; 6] = ["N_U", "K_W", "T_theo", "T_sim", "T_sim_hw", "epsilon"];

fn crosscheck_table(rows: &[CrossCheck]) -> Table {
    let mut t = Table::new(&CROSSCHECK_COLUMNS);
    for c in rows {
        t.push(vec![
            c.num_users.into(),
            c.k_w.into(),
            c.t_theo.into(),
            c.t_sim.into(),
            c.t_sim_half_width.into(),
            c.epsilon.into(),
        ]);
    }
    t
}

/// Simulates the autoscaled configuration at each of `at`.
pub fn cross_check(
    sc: &VmmeScenario,
    rows: &[SweepRow],
    at: &[u64],
    opts: &SimOptions,
    seed: u64,
) -> Result<Vec<CrossCheck>, CliError> {
    let mut out = Vec::new();
    for &nu in at {
        let row = rows
            .iter()
            .find(|r| r.num_users == nu)
            .ok_or_else(|| CliError::Input(format!("--simulate-at {nu} is not a point of the sweep")))?;
        let model = Model::Scenario(sc.clone().with_users(nu).with_workers(row.k_w));
        let (report, _) = run_simulation(&model, seed, opts, 0)?;
        let t_sim = report.mean_response_time.mean;
        out.push(CrossCheck {
            num_users: nu,
            k_w: row.k_w,
            t_theo: row.t,
            t_sim,
            t_sim_half_width: report.mean_response_time.half_width,
            epsilon: vmme::relative_error(t_sim, row.t),
            wall_time: report.wall_time,
        });
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
pub fn sweep(
    g: &Global,
    file: &Path,
    users: &[u64],
    method: Method,
    max_workers: usize,
    simulate_at: &[u64],
    opts: &SimOptions,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let input = input::load(file)?;
    let sc = match &input.model {
        Model::Scenario(sc) => sc.clone(),
        Model::Network(_) => return Err(CliError::Input("sweep needs a scenario file".into())),
    };
    let mut manifest = RunManifest::new("sweep", &input.path, &input.sha256, g.seed);
    manifest.option("users", users.iter().map(|u| u.to_string()).collect::<Vec<_>>().join(","));
    manifest.option("method", method.label());
    manifest.option("max_workers", max_workers);
    if !simulate_at.is_empty() {
        manifest.option("simulate_at", simulate_at.iter().map(|u| u.to_string()).collect::<Vec<_>>().join(","));
        manifest.option("packets", opts.packets);
        manifest.option("replications", opts.replications);
    }
    let start = Instant::now();
    let outcome = vmme::autoscale_sweep(&sc, users, analyzer(method)?, max_workers);
    manifest.wall_time.insert("sweep".into(), seconds_since(start));
    let mut dir = OutputDir::create(&g.output_dir, manifest)?;
    let (rows, failure) = match outcome {
        Ok(table) => (table.rows, None),
        Err(ScenarioError::TargetUnreachable { num_users, k_w, t, rows }) => {
            let e = ScenarioError::TargetUnreachable { num_users, k_w, t, rows: Vec::new() };
            (rows, Some(CliError::from(e)))
        }
        Err(e) => return Err(e.into()),
    };
    let table = sweep_table(&rows);
    dir.write("sweep.csv", &table.to_csv())?;
    let checks = if failure.is_none() && !simulate_at.is_empty() {
        let checks = cross_check(&sc, &rows, simulate_at, opts, g.seed)?;
        for c in &checks {
            dir.manifest.wall_time.insert(format!("simulation@{}", c.num_users), c.wall_time);
        }
        dir.write("sweep-crosscheck.csv", &crosscheck_table(&checks).to_csv())?;
        checks
    } else {
        Vec::new()
    };
    dir.finish()?;

    match g.format {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct View<'a> {
                rows: &'a [SweepRow],
                #[serde(skip_serializing_if = "<[CrossCheck]>::is_empty")]
                cross_checks: &'a [CrossCheck],
            }
            write!(out, "{}", to_json(&View { rows: &rows, cross_checks: &checks }))?;
        }
        OutputFormat::Csv => write!(out, "{}", table.to_csv())?,
        OutputFormat::Text => {
            write!(out, "{}", table.to_text())?;
            if let Some(r) = rows.iter().find(|r| r.fe_saturated) {
                writeln!(
                    out,
                    "FE saturated (rho_FE >= {}) from N_U = {}",
                    crate::format::g9(vmme::FE_SATURATION),
                    r.num_users
                )?;
            }
            if !checks.is_empty() {
                writeln!(out)?;
                write!(out, "{}", crosscheck_table(&checks).to_text())?;
            }
        }
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Checks a file and reports every problem found. Writes no files.
pub fn validate(g: &Global, file: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let text = std::fs::read_to_string(file).map_err(|e| CliError::Input(format!("{}: {e}", file.display())))?;
    // List every violation of a network, not just the summary line.
    if let Ok(spec) = serde_json::from_str::<NetworkSpec>(&text) {
        let violations = spec.violations();
        if !violations.is_empty() {
            for v in &violations {
                writeln!(out, "{v}")?;
            }
            return Err(CliError::Input(format!("{}: {} violation(s)", file.display(), violations.len())));
        }
    }
    let Input { model, .. } = input::load(file)?;
    let summary = match &model {
        Model::Network(net) => {
            let stages = net.queues().iter().map(|q| q.stage).max().unwrap_or(0);
            serde_json::json!({
                "kind": "network",
                "queues": net.len(),
                "stages": stages,
                "external_rate": net.total_external_rate(),
            })
        }
        Model::Scenario(sc) => {
            let (lambda, _) = vmme::external_arrival(&sc.mix);
            serde_json::json!({
                "kind": "scenario",
                "queues": sc.k_fe + sc.k_w + sc.k_db,
                "external_rate": lambda,
                "packets_per_procedure": vmme::mean_packets_per_procedure(&sc.mix),
            })
        }
    };
    match g.format {
        OutputFormat::Json => write!(out, "{}", to_json(&summary))?,
        OutputFormat::Csv => {
            let obj = summary.as_object().expect("object");
            writeln!(out, "{}", obj.keys().cloned().collect::<Vec<_>>().join(","))?;
            let vals: Vec<String> = obj
                .values()
                .map(|v| match v {
                    serde_json::Value::Number(n) if n.is_f64() => crate::format::g9(n.as_f64().unwrap_or(f64::NAN)),
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect();
            writeln!(out, "{}", vals.join(","))?;
        }
        OutputFormat::Text => {
            let obj = summary.as_object().expect("object");
            writeln!(out, "valid {}", obj["kind"].as_str().unwrap_or("?"))?;
            for (k, v) in obj.iter().filter(|(k, _)| *k != "kind") {
                let shown = match v.as_f64() {
                    Some(x) if v.is_f64() => crate::format::g9(x),
                    _ => v.to_string(),
                };
                writeln!(out, "  {k}: {shown}")?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn users_ranges_and_lists() {
        assert_eq!(parse_users("1e5:5e5:2e5").unwrap(), vec![100_000, 300_000, 500_000]);
        assert_eq!(parse_users("2000000,100000,500000:1000000:500000").unwrap(), vec![100_000, 500_000, 1_000_000, 2_000_000]);
        assert_eq!(parse_users("5").unwrap(), vec![5]);
        for bad in ["", "a", "1:2", "5:1:1", "1:5:0", "1.5"] {
            assert!(parse_users(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn compare_without_simulation_has_no_epsilon() {
        let rows = vec![CompareRow { method: Method::Qna, t: 1.0, t_half_width: None, epsilon: None, wall_time: 0.0 }];
        assert_eq!(compare_table(&rows).header, vec!["method", "T", "wall_time"]);
    }
}
