//! Dispatch of a resolved plan to the core library and emission of its
//! artifacts.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};

use optstate_core::basins::{
    grid_scan, observability_check, optimal_point_scan, BasinMode, BasinParams, BasinQuery,
    BasinScanResult, BasinTarget,
};
use optstate_core::dynamics::Point;
use optstate_core::measures::WeakStarMetric;
use optstate_core::parse::parse_point;
use optstate_core::potentials::growth_report;
use optstate_core::report::{
    growth_summary, growth_table, observability_summary, observability_table, orbit_table,
    scan_summary, scan_table, write_file, Summary, Table,
};
use optstate_core::scenarios::{build_scenario, Scenario, SCENARIO_NAMES};
use optstate_core::schedule::default_schedule;
use optstate_core::verify::{run_checks_on, Check};

use crate::plan::{Command, Format, Mode, RunPlan};

pub const SUMMARY_FILE: &str = "summary.txt";
pub const PLAN_FILE: &str = "plan.toml";
/// Wall-clock runtime; kept out of the summary so summaries stay
/// byte-identical across runs.
pub const TIMING_FILE: &str = "timing.txt";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// A verification suite failed.
    VerificationFailed,
}

/// Everything a run produces, before anything touches the disk.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    /// File names relative to the output directory, with contents.
    pub files: Vec<(String, String)>,
    pub stdout: String,
    pub outcome: Outcome,
}

/// Collects tables and summary entries and lays them out per format.
struct Emitter {
    format: Format,
    files: Vec<(String, String)>,
    summary: Summary,
    /// Doc format: tables appended after the summary keys.
    folded: Summary,
}

impl Emitter {
    fn new(format: Format) -> Self {
        Emitter {
            format,
            files: Vec::new(),
            summary: Summary::new(),
            folded: Summary::new(),
        }
    }

    fn table(&mut self, stem: &str, table: &Table) {
        match self.format {
            Format::Csv => self.files.push((format!("{stem}.csv"), table.render())),
            Format::Doc => {
                self.folded.push("table", stem);
                table.append_to(&mut self.folded)
            }
        }
    }

    fn finish(mut self, outcome: Outcome) -> RunOutput {
        self.summary.extend(self.folded.entries());
        let text = self.summary.render();
        self.files.push((SUMMARY_FILE.into(), text.clone()));
        RunOutput {
            files: self.files,
            stdout: text,
            outcome,
        }
    }
}

fn base_point(plan: &RunPlan, s: &Scenario) -> Result<Point> {
    let x = plan
        .x0
        .as_deref()
        .ok_or_else(|| anyhow!("{} needs --x0", plan.command.name()))?;
    Ok(parse_point(x, s.system.space(), x, 0)?)
}

fn required<'a>(value: &'a Option<String>, flag: &str, plan: &RunPlan) -> Result<&'a str> {
    value
        .as_deref()
        .ok_or_else(|| anyhow!("{} needs --{flag}", plan.command.name()))
}

fn eps_stem(prefix: &str, eps: f64) -> String {
    format!("{prefix}-eps{eps}")
}

/// Appends one scan to a multi-scan summary: a `scan` line naming the
/// table, then the scan's keys.
fn push_scan(em: &mut Emitter, stem: &str, r: &BasinScanResult, s: &Scenario) {
    em.summary.push("scan", stem);
    em.summary.extend(scan_summary(r, &[]).entries());
    em.table(stem, &scan_table(r, s.system.space()));
}

/// Runs `plan` without writing anything.
pub fn execute(plan: &RunPlan) -> Result<RunOutput> {
    let mut em = Emitter::new(plan.format);
    let echo = plan.echo();
    if plan.command == Command::Describe {
        let mut out = String::new();
        for name in SCENARIO_NAMES {
            let s = if name == plan.scenario {
                plan.build_scenario()?
            } else {
                build_scenario(name, &[])?
            };
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str(&s.describe());
        }
        return Ok(RunOutput {
            files: Vec::new(),
            stdout: out,
            outcome: Outcome::Success,
        });
    }
    let s = plan.build_scenario()?;
    let f = &s.system;
    let space = f.space();
    let mut outcome = Outcome::Success;
    match plan.command {
        Command::Describe => unreachable!(),
        Command::Orbit => {
            let x = base_point(plan, &s)?;
            let orbit = f.orbit(x, plan.n)?;
            em.table("orbit", &orbit_table(&orbit, space));
            let last = orbit.points()[orbit.len() - 1];
            em.summary
                .push("points", orbit.len())
                .push("first", x)
                .push("last", last)
                .extend(&echo);
        }
        Command::Growth => {
            let phi = s.potential(required(&plan.potential, "potential", plan)?)?;
            let x = base_point(plan, &s)?;
            let r = growth_report(&phi, f, x, plan.n, &default_schedule(plan.n))?;
            em.table("growth", &growth_table(&r));
            em.summary = growth_summary(&r, &echo);
        }
        Command::ScanGrowth => {
            let phi = s.potential(required(&plan.potential, "potential", plan)?)?;
            let grid = s.scan_grid(plan.grid_resolution)?;
            let r = optimal_point_scan(f, &phi, &grid, &default_schedule(plan.n), plan.workers)?;
            em.table("scan", &scan_table(&r, space));
            em.summary = scan_summary(&r, &echo);
        }
        Command::Basin => {
            let mu = s.measure(required(&plan.mu, "mu", plan)?)?;
            let grid = s.scan_grid(plan.grid_resolution)?;
            let mode = match plan.mode {
                Mode::Strong => BasinMode::Strong,
                Mode::Weak => BasinMode::Weak,
            };
            for &eps in &plan.epsilon {
                let query = BasinQuery {
                    target: BasinTarget::Measure(mu.clone()),
                    mode,
                    epsilon: eps,
                    params: BasinParams::new(space, plan.n),
                };
                let r = grid_scan(f, &query, &grid, plan.workers)?;
                push_scan(&mut em, &eps_stem("basin", eps), &r, &s);
            }
            em.summary.extend(&echo);
        }
        Command::Milnor => {
            let k = match &plan.attractor {
                Some(name) => s.attractor(name)?,
                None => s.attractors.first().cloned().ok_or_else(|| {
                    anyhow!("scenario {} has no attractors; pass --attractor", s.name)
                })?,
            };
            let grid = s.scan_grid(plan.grid_resolution)?;
            for &eps in &plan.epsilon {
                let query = BasinQuery {
                    target: BasinTarget::Attractor(k.clone()),
                    mode: BasinMode::Milnor,
                    epsilon: eps,
                    params: BasinParams::new(space, plan.n),
                };
                let r = grid_scan(f, &query, &grid, plan.workers)?;
                push_scan(&mut em, &eps_stem("milnor", eps), &r, &s);
            }
            em.summary.extend(&echo);
        }
        Command::Observability => {
            let mu = s.measure(required(&plan.mu, "mu", plan)?)?;
            let grid = s.scan_grid(plan.grid_resolution)?;
            let mut eps = plan.epsilon.clone();
            eps.sort_by(|a, b| b.total_cmp(a));
            eps.dedup();
            let params = BasinParams::new(space, plan.n);
            let r = observability_check(f, &mu, &eps, &grid, &params, plan.workers)?;
            em.table("observability", &observability_table(&r));
            let mut extra = vec![("grid".to_string(), grid.describe())];
            extra.extend(echo);
            em.summary = observability_summary(&r, &extra);
        }
        Command::Verify => {
            let checks = plan
                .checks
                .iter()
                .map(|c| c.parse::<Check>())
                .collect::<optstate_core::Result<Vec<_>>>()?;
            let x0 = match &plan.x0 {
                Some(_) => Some(base_point(plan, &s)?),
                None => None,
            };
            let potentials = match &plan.potential {
                Some(spec) => vec![s.potential(spec)?],
                None => s.potentials.clone(),
            };
            let results = run_checks_on(&s, &potentials, &checks, plan.seed, x0)?;
            let failures = results.iter().filter(|r| !r.passed).count();
            let table = Table {
                columns: ["check", "target", "statistic", "tolerance", "passed"]
                    .map(String::from)
                    .to_vec(),
                rows: results
                    .iter()
                    .map(|r| {
                        vec![
                            r.check.name().to_string(),
                            r.target.clone(),
                            r.statistic.to_string(),
                            r.tolerance.to_string(),
                            r.passed.to_string(),
                        ]
                    })
                    .collect(),
            };
            em.table("verify", &table);
            em.summary
                .push("passed", failures == 0)
                .push("results", results.len())
                .push("failures", failures)
                .extend(&echo);
            if failures > 0 {
                outcome = Outcome::VerificationFailed;
            }
        }
        Command::Distance => {
            let mu = s.measure(required(&plan.mu, "mu", plan)?)?;
            let nu = s.measure(required(&plan.nu, "nu", plan)?)?;
            let d = WeakStarMetric::default_for(space).distance(&mu, &nu)?;
            em.summary.push("distance", d).extend(&echo);
            let mut out = em.finish(outcome);
            out.stdout = format!("{d}\n");
            return Ok(out);
        }
    }
    Ok(em.finish(outcome))
}

/// Executes `plan`, writes its artifacts and the `plan.toml` echo under
/// the output directory, and prints the summary.
pub fn run(plan: &RunPlan) -> Result<Outcome> {
    let start = Instant::now();
    let out = execute(plan)?;
    let seconds = start.elapsed().as_secs_f64();
    if plan.command != Command::Describe {
        write_file(
            &plan.out.join(TIMING_FILE),
            &format!("runtime_seconds = {seconds:.3}\n"),
        )?;
        let dir: &PathBuf = &plan.out;
        for (name, contents) in &out.files {
            write_file(&dir.join(name), contents)?;
        }
        write_file(&dir.join(PLAN_FILE), &plan.to_toml())
            .with_context(|| "writing the plan echo")?;
    }
    let mut stdout = out.stdout;
    if out.outcome == Outcome::VerificationFailed {
        let _ = writeln!(stdout, "verification failed");
    }
    print!("{stdout}");
    if plan.command != Command::Describe && plan.command != Command::Distance {
        eprintln!(
            "runtime {seconds:.1} s, artifacts in {}",
            plan.out.display()
        );
    }
    Ok(out.outcome)
}
