//! Command-line front end. Each subcommand returns its text summary; CSV
//! output goes to the paths given on the command line.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use clusterlife_core::geometry::{
    balance_ratio, equal_energy_crossing, hull_2d, lifetime_from_weights, min_norm_weights,
    most_balanced, srra_points, surface_sample, EnergyPoint,
};
use clusterlife_core::sim::{simulate, SimPlan, SimTrace};
use clusterlife_core::{
    evaluate_schedule, mcn, nnn, perm, shp_heuristic, solve_lp, EnergyMode, Error, StaticResult,
};

use crate::error::{AppError, Result};
use crate::export::{self, num, order_field, Table};
use crate::parallel::{par_brute_force, par_build_columns, with_threads, THREADS_ENV};
use crate::scenario::{self, load_scenario, CorrelationBlock, EnergyBlock, GenParams, Scenario};

#[derive(Debug, Parser)]
#[command(
    name = "clusterlife",
    version,
    about = "Lifetime of a correlated-data sensor cluster under TDMA polling"
)]
pub struct Cli {
    /// Worker threads for the parallel searches (default: one per core).
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a random scenario file.
    Gen(GenArgs),
    /// Lifetime and time split of one polling order.
    Eval(EvalArgs),
    /// Best single polling order.
    StaticOpt(StaticArgs),
    /// Best mixture of polling orders (linear program over sampled allocations).
    DynamicOpt(DynamicArgs),
    /// Energy-space curves, hull, crossings and point clouds as CSV.
    GeometryExport(GeometryArgs),
    /// Slot-by-slot battery walk of a static order or the dynamic plan.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Shannon,
    Srra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Brute,
    Nnn,
    Mcn,
    Shp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    BitDistance,
    Gaussian,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Energy law; defaults to the scenario's energy block.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// SRRA energy per bit constant; defaults to the scenario value or ln 2.
    #[arg(long)]
    pub c: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub nodes: usize,
    #[arg(long, default_value_t = 4.0)]
    pub side: f64,
    #[arg(long, value_enum, default_value_t = ModelArg::Gaussian)]
    pub model: ModelArg,
    /// Bits per reading for the bit-distance model.
    #[arg(long, default_value_t = 5)]
    pub bits: u32,
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    #[arg(long, default_value_t = 0.5)]
    pub a: f64,
    #[arg(long, default_value_t = 0.0)]
    pub offset: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Shannon)]
    pub mode: ModeArg,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, default_value_t = scenario::DEFAULT_GAMMA)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub battery_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub battery_max: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Comma-separated node ids in polling order.
    #[arg(long, value_delimiter = ',', required = true)]
    pub order: Vec<usize>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StaticArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Brute)]
    pub method: MethodArg,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DynamicArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Allocations sampled per order; defaults to the scenario value or 8.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GeometryArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Lattice steps per axis of the time simplex.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Static order to repeat; without it the dynamic plan is executed.
    #[arg(long, value_delimiter = ',')]
    pub order: Option<Vec<usize>>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

impl ScenarioArgs {
    fn load(&self) -> Result<Scenario> {
        let mut s = load_scenario(&self.scenario)?;
        let c = self.c.or(match s.mode {
            EnergyMode::Srra { c } => Some(c),
            EnergyMode::Shannon => None,
        });
        s.mode = match self.mode {
            None => s.mode,
            Some(ModeArg::Shannon) => EnergyMode::Shannon,
            Some(ModeArg::Srra) => EnergyMode::Srra {
                c: c.unwrap_or(std::f64::consts::LN_2),
            },
        };
        if let (Some(c), EnergyMode::Srra { .. }) = (self.c, s.mode) {
            s.mode = EnergyMode::Srra { c };
        }
        s.mode
            .validate()
            .map_err(|_| AppError::validation("--c", "must be > 0"))?;
        Ok(s)
    }
}

fn mode_name(mode: EnergyMode) -> String {
    match mode {
        EnergyMode::Shannon => "shannon".into(),
        EnergyMode::Srra { c } => format!("srra(c={c})"),
    }
}

fn save(table: &Table, path: &Option<PathBuf>) -> Result<()> {
    match path {
        Some(p) => table.save(p),
        None => Ok(()),
    }
}

pub fn run(cli: &Cli) -> Result<String> {
    let threads = cli.threads;
    if threads == Some(0) {
        return Err(AppError::validation("--threads", "must be >= 1"));
    }
    match &cli.command {
        Command::Gen(a) => gen(a),
        Command::Eval(a) => eval(a),
        Command::StaticOpt(a) => static_opt(a, threads),
        Command::DynamicOpt(a) => dynamic_opt(a, threads),
        Command::GeometryExport(a) => geometry_export(a),
        Command::Simulate(a) => simulate_cmd(a, threads),
    }
}

fn gen(a: &GenArgs) -> Result<String> {
    let correlation = match a.model {
        ModelArg::BitDistance => CorrelationBlock::BitDistance { n: a.bits },
        ModelArg::Gaussian => CorrelationBlock::GaussianField {
            sigma2: a.sigma2,
            a: a.a,
            offset: a.offset,
        },
    };
    let energy = match a.mode {
        ModeArg::Shannon => EnergyBlock::Shannon,
        ModeArg::Srra => EnergyBlock::Srra {
            c: a.c.unwrap_or(std::f64::consts::LN_2),
        },
    };
    let params = GenParams {
        nodes: a.nodes,
        side: a.side,
        correlation,
        energy,
        gamma: a.gamma,
        battery: (a.battery_min, a.battery_max),
    };
    let file = scenario::generate_scenario(a.seed, &params)?;
    // refuse to write a file that would not load
    file.validate()?;
    scenario::save_scenario(&file, &a.out)?;
    Ok(format!(
        "wrote {} nodes to {}\n",
        file.nodes.len(),
        a.out.display()
    ))
}

fn eval(a: &EvalArgs) -> Result<String> {
    let s = a.scenario.load()?;
    let r = evaluate_schedule(&a.order, &s.cluster, s.mode)?;
    let table = export::allocation_table(&r, &s.cluster, s.mode);
    save(&table, &a.csv)?;
    let mut out = String::new();
    writeln!(out, "mode {}", mode_name(s.mode)).unwrap();
    writeln!(out, "order {}", order_field(&r.schedule.order)).unwrap();
    writeln!(out, "lifetime {}", num(r.lifetime)).unwrap();
    if let Some(b) = r.bottleneck {
        writeln!(out, "bottleneck node {b}").unwrap();
    }
    out.push_str(&table.render());
    Ok(out)
}

fn static_search(s: &Scenario, method: MethodArg, threads: Option<usize>) -> Result<StaticResult> {
    match method {
        MethodArg::Brute => with_threads(threads, || par_brute_force(&s.cluster, s.mode))?,
        MethodArg::Nnn => Ok(nnn(&s.cluster, s.mode)?),
        MethodArg::Mcn => Ok(mcn(&s.cluster, s.mode)?),
        MethodArg::Shp => Ok(shp_heuristic(&s.cluster, s.mode)?),
    }
}

fn static_opt(a: &StaticArgs, threads: Option<usize>) -> Result<String> {
    let s = a.scenario.load()?;
    let r = static_search(&s, a.method, threads)?;
    let table = export::allocation_table(&r, &s.cluster, s.mode);
    save(&table, &a.csv)?;
    Ok(format!(
        "mode {}\nmethod {}\norder {}\nlifetime {}\n{}",
        mode_name(s.mode),
        r.method.name(),
        order_field(&r.schedule.order),
        num(r.lifetime),
        table.render()
    ))
}

fn samples(s: &Scenario, flag: Option<usize>) -> Result<usize> {
    let n = flag.unwrap_or(s.file.solver.samples());
    if n == 0 {
        return Err(AppError::validation("--samples", "must be >= 1"));
    }
    Ok(n)
}

fn dynamic_plan(
    s: &Scenario,
    samples: usize,
    threads: Option<usize>,
) -> Result<clusterlife_core::DynamicPlan> {
    let cols = with_threads(threads, || par_build_columns(&s.cluster, s.mode, samples))??;
    Ok(solve_lp(&cols, &s.cluster.energies())?)
}

fn dynamic_opt(a: &DynamicArgs, threads: Option<usize>) -> Result<String> {
    let s = a.scenario.load()?;
    let samples = samples(&s, a.samples)?;
    let stat = with_threads(threads, || par_brute_force(&s.cluster, s.mode))??;
    let plan = dynamic_plan(&s, samples, threads)?;
    let table = export::plan_table(&plan, s.cluster.len());
    save(&table, &a.csv)?;
    let mut out = String::new();
    writeln!(out, "mode {}", mode_name(s.mode)).unwrap();
    writeln!(out, "samples per order {samples}").unwrap();
    writeln!(
        out,
        "static lifetime {} order {}",
        num(stat.lifetime),
        order_field(&stat.schedule.order)
    )
    .unwrap();
    writeln!(out, "dynamic lifetime {}", num(plan.lifetime)).unwrap();
    writeln!(out, "gain {}", num(plan.lifetime / stat.lifetime - 1.0)).unwrap();
    writeln!(out, "orders used {}", plan.support()).unwrap();
    out.push_str(&table.render());
    Ok(out)
}

const SURFACE_MAX_N: usize = 3;

fn geometry_export(a: &GeometryArgs) -> Result<String> {
    let s = a.scenario.load()?;
    let n = s.cluster.len();
    let energies = s.cluster.energies();
    std::fs::create_dir_all(&a.out_dir).map_err(|source| AppError::Write {
        path: a.out_dir.clone(),
        source,
    })?;
    let path = |name: &str| -> PathBuf { a.out_dir.join(name) };
    let mut out = String::new();

    if s.mode.is_srra() {
        let points = srra_points(&s.cluster, s.mode)?;
        let ratios: Vec<f64> = points.iter().map(|p| balance_ratio(p, &energies)).collect();
        export::points_table(&points, n, Some(("balance", &ratios)))
            .save(&path("srra_points.csv"))?;
        let best = most_balanced(&points, &energies).expect("at least one point");
        writeln!(
            out,
            "most balanced order {} ratio {}",
            order_field(&points[best].order),
            num(ratios[best])
        )
        .unwrap();
        summarize_min_norm(&points, &energies, &mut out)?;
        writeln!(out, "wrote {}", path("srra_points.csv").display()).unwrap();
        return Ok(out);
    }

    if n > SURFACE_MAX_N {
        return Err(Error::TooLarge {
            what: "energy surface export",
            size: n,
            limit: SURFACE_MAX_N,
        }
        .into());
    }
    let grid = a.grid.unwrap_or(s.file.solver.grid_density());
    if grid == 0 {
        return Err(AppError::validation("--grid", "must be >= 1"));
    }
    let mut all: Vec<EnergyPoint> = Vec::new();
    for order in perm::all(n) {
        all.extend(surface_sample(&order, &s.cluster, grid)?);
    }
    let surface = path("surfaces.csv");
    export::points_table(&all, n, None).save(&surface)?;
    writeln!(
        out,
        "wrote {} surface points to {}",
        all.len(),
        surface.display()
    )
    .unwrap();

    if n == 2 {
        let pts: Vec<[f64; 2]> = all
            .iter()
            .filter(|p| p.energy.iter().all(|e| e.is_finite()))
            .map(|p| [p.energy[0], p.energy[1]])
            .collect();
        let hull = hull_2d(&pts)?;
        export::hull_table(&hull).save(&path("hull.csv"))?;
        let report = equal_energy_crossing(&s.cluster, [&[0, 1], &[1, 0]])?;
        export::crossings_table(&report).save(&path("crossings.csv"))?;
        let w = &report.crossings[report.winner];
        writeln!(
            out,
            "equal-lifetime crossing winner {} lifetime {}",
            order_field(&w.order),
            num(w.lifetime)
        )
        .unwrap();
        writeln!(
            out,
            "wrote {} and {}",
            path("hull.csv").display(),
            path("crossings.csv").display()
        )
        .unwrap();
    }
    let finite: Vec<EnergyPoint> = all
        .into_iter()
        .filter(|p| p.energy.iter().all(|e| e.is_finite()))
        .collect();
    summarize_min_norm(&finite, &energies, &mut out)?;
    Ok(out)
}

fn summarize_min_norm(points: &[EnergyPoint], energies: &[f64], out: &mut String) -> Result<()> {
    let w = min_norm_weights(points)?;
    let life = lifetime_from_weights(points, &w.weights, energies)?;
    let used = w.weights.iter().filter(|&&v| v > 0.0).count();
    writeln!(
        out,
        "min-norm combination: {used} points, lifetime {}",
        num(life)
    )
    .unwrap();
    Ok(())
}

fn simulate_cmd(a: &SimulateArgs, threads: Option<usize>) -> Result<String> {
    let s = a.scenario.load()?;
    let n = s.cluster.len();
    let energies = s.cluster.energies();
    let (label, analytic, trace): (String, f64, SimTrace) = match &a.order {
        Some(order) => {
            let r = evaluate_schedule(order, &s.cluster, s.mode)?;
            let plan = SimPlan::Static {
                energy: r.energy_by_node(&s.cluster, s.mode),
            };
            (
                format!("static {}", order_field(order)),
                r.lifetime,
                simulate(&plan, &energies)?,
            )
        }
        None => {
            let plan = dynamic_plan(&s, samples(&s, a.samples)?, threads)?;
            (
                "dynamic".into(),
                plan.lifetime,
                simulate(&SimPlan::from_dynamic(&plan), &energies)?,
            )
        }
    };
    save(&export::trace_table(&trace, n), &a.csv)?;
    let mut out = String::new();
    writeln!(out, "plan {label}").unwrap();
    writeln!(out, "analytic lifetime {}", num(analytic)).unwrap();
    writeln!(out, "completed slots {}", trace.completed).unwrap();
    match trace.first_dead {
        Some(k) => writeln!(out, "first node out of energy {k}").unwrap(),
        None => writeln!(out, "plan finished with every node alive").unwrap(),
    }
    Ok(out)
}
