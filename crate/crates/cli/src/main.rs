//! Command-line front end: build plans, evaluate them, solve the exact
//! oracles, compare against the approximation bounds, and rerun the
//! bundled experiments.

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use querylab::eval::{exact_cost, exact_cost_enumeration, exact_cost_smq, monte_carlo_cost};
use querylab::instances::{self, CostModel, RandomConfig};
use querylab::oracle::{optimal_adaptive, optimal_nonadaptive, FinishDistribution};
use querylab::policies::{
    baseline_left_endpoint, baseline_stop_prob, double_greedy_general,
    double_greedy_smqi_general, double_greedy_unit, DEFAULT_Y_SMQ, DEFAULT_Y_SMQI,
};
use querylab::reproduce::{reproduce, Relation, Reproduction, EXPERIMENTS};
use querylab::{Instance, QueryPlan, Variant};

const DEFAULT_EPSILON: f64 = 0.25;

#[derive(Parser)]
#[command(name = "querylab", version, about = "Query policies for stochastic minimum problems")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Policy {
    DgUnit,
    DgGeneral,
    DgSmqi,
    Left,
    Stopprob,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Enum,
    Mc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Smq,
    Smqi,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Smq => Variant::Smq,
            VariantArg::Smqi => Variant::Smqi,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum What {
    Adaptive,
    Nonadaptive,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Gap,
    Fig3,
    Fig4,
    SmqiBad,
    Competitive,
    Random,
}

#[derive(clap::Args)]
struct PolicyArgs {
    #[arg(long, value_enum)]
    policy: Policy,
    /// Geometric base for the general-cost planners; defaults per planner.
    #[arg(long)]
    y: Option<f64>,
    /// Knapsack slack for the general-cost planners.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Build a query plan and write it as JSON.
    Plan {
        instance: PathBuf,
        #[command(flatten)]
        policy: PolicyArgs,
        /// Write the plan here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Price a plan exactly or by Monte Carlo.
    Eval {
        instance: PathBuf,
        plan: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the finish-by-queries curve as CSV here.
        #[arg(long)]
        curve_out: Option<PathBuf>,
    },
    /// Solve for the optimal adaptive and/or non-adaptive policy.
    Oracle {
        instance: PathBuf,
        /// Override the instance's variant.
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        #[arg(long, value_enum, default_value_t = What::Both)]
        what: What,
        /// Write the adaptive policy tree as JSON here.
        #[arg(long)]
        tree_out: Option<PathBuf>,
    },
    /// Ratio of a planner's expected cost to the adaptive optimum.
    Compare {
        instance: PathBuf,
        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// Rerun a bundled experiment; exits nonzero if any check fails.
    Reproduce {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(EXPERIMENTS))]
        name: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write an instance from one of the built-in families.
    Generate {
        #[arg(value_enum)]
        family: Family,
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        /// Parameter of the adaptivity-gap family.
        #[arg(long, default_value_t = 1.0 / 3.0)]
        epsilon: f64,
        /// Maximum support size for random instances.
        #[arg(long, default_value_t = 3)]
        support: usize,
        /// Draw random costs uniformly from [1, max_cost] instead of unit costs.
        #[arg(long)]
        max_cost: Option<f64>,
        /// Override the family's variant.
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("QUERYLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("QUERYLAB_THREADS must be a positive integer, got {raw:?}"))?;
    if threads == 0 {
        bail!("QUERYLAB_THREADS must be a positive integer, got 0");
    }
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    let format = cli.format;
    match cli.command {
        Command::Plan { instance, policy, out } => cmd_plan(&instance, &policy, out.as_deref()),
        Command::Eval {
            instance,
            plan,
            mode,
            samples,
            seed,
            curve_out,
        } => cmd_eval(format, &instance, &plan, mode, samples, seed, curve_out.as_deref()),
        Command::Oracle {
            instance,
            variant,
            what,
            tree_out,
        } => cmd_oracle(format, &instance, variant, what, tree_out.as_deref()),
        Command::Compare { instance, policy } => cmd_compare(format, &instance, &policy),
        Command::Reproduce { name, seed } => cmd_reproduce(format, &name, seed),
        Command::Generate {
            family,
            n,
            delta,
            epsilon,
            support,
            max_cost,
            variant,
            seed,
            out,
        } => {
            let inst = generate(family, n, delta, epsilon, support, max_cost, variant.map(Variant::from), seed)?;
            write_json(&inst, out.as_deref())?;
            Ok(true)
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance> {
    Instance::load(path).with_context(|| format!("reading instance {}", path.display()))
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn write_csv<T: Serialize>(rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(io::stdout());
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn emit<T: Serialize>(format: Format, rows: &[T]) -> Result<()> {
    match format {
        Format::Csv => write_csv(rows),
        Format::Json => write_json(&rows, None),
    }
}

fn build_plan(inst: &Instance, args: &PolicyArgs) -> Result<QueryPlan> {
    Ok(match args.policy {
        Policy::DgUnit => double_greedy_unit(inst)?,
        Policy::DgGeneral => double_greedy_general(inst, args.y.unwrap_or(DEFAULT_Y_SMQ), args.epsilon)?,
        Policy::DgSmqi => double_greedy_smqi_general(inst, args.y.unwrap_or(DEFAULT_Y_SMQI), args.epsilon)?,
        Policy::Left => baseline_left_endpoint(inst),
        Policy::Stopprob => baseline_stop_prob(inst),
    })
}

fn cmd_plan(instance: &Path, args: &PolicyArgs, out: Option<&Path>) -> Result<bool> {
    let inst = load_instance(instance)?;
    let plan = build_plan(&inst, args)?;
    write_json(&plan, out)?;
    Ok(true)
}

#[derive(Serialize)]
struct EvalRow {
    mode: &'static str,
    variant: Variant,
    expected_cost: f64,
    stderr: Option<f64>,
    samples: Option<usize>,
    seed: Option<u64>,
}

#[derive(Serialize)]
struct EvalReport {
    #[serde(flatten)]
    row: EvalRow,
    finish_by_queries: Option<Vec<f64>>,
    finish_by_cost: Option<Vec<(f64, f64)>>,
}

fn cmd_eval(
    format: Format,
    instance: &Path,
    plan: &Path,
    mode: Mode,
    samples: usize,
    seed: u64,
    curve_out: Option<&Path>,
) -> Result<bool> {
    let inst = load_instance(instance)?;
    let plan = QueryPlan::load(plan).with_context(|| format!("reading plan {}", plan.display()))?;
    let (row, finish) = match mode {
        Mode::Exact | Mode::Enum => {
            let ev = if mode == Mode::Exact {
                exact_cost(&inst, &plan)?
            } else {
                exact_cost_enumeration(&inst, &plan)?
            };
            let row = EvalRow {
                mode: if mode == Mode::Exact { "exact" } else { "enum" },
                variant: inst.variant(),
                expected_cost: ev.expected_cost,
                stderr: None,
                samples: None,
                seed: None,
            };
            (row, Some(ev.finish))
        }
        Mode::Mc => {
            let mc = monte_carlo_cost(&inst, &plan, samples, seed)?;
            let row = EvalRow {
                mode: "mc",
                variant: inst.variant(),
                expected_cost: mc.mean,
                stderr: Some(mc.stderr),
                samples: Some(mc.samples),
                seed: Some(mc.seed),
            };
            (row, None)
        }
    };
    if let Some(p) = curve_out {
        let Some(f) = &finish else {
            bail!("--curve-out needs an exact mode");
        };
        std::fs::write(p, f.queries_csv()).with_context(|| format!("writing {}", p.display()))?;
    }
    match format {
        Format::Csv => write_csv(&[row])?,
        Format::Json => write_json(
            &EvalReport {
                row,
                finish_by_queries: finish.as_ref().map(|f| f.by_queries.clone()),
                finish_by_cost: finish.as_ref().map(|f| f.by_cost.clone()),
            },
            None,
        )?,
    }
    Ok(true)
}

#[derive(Serialize)]
struct OracleRow {
    what: &'static str,
    variant: Variant,
    expected_cost: f64,
    order: String,
}

#[derive(Serialize)]
struct OracleReport {
    rows: Vec<OracleRow>,
    adaptive_tree: Option<querylab::oracle::PolicyTree>,
    adaptive_finish: Option<FinishDistribution>,
    nonadaptive_plan: Option<QueryPlan>,
}

fn join_order(order: &[usize]) -> String {
    order.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

fn cmd_oracle(
    format: Format,
    instance: &Path,
    variant: Option<VariantArg>,
    what: What,
    tree_out: Option<&Path>,
) -> Result<bool> {
    let mut inst = load_instance(instance)?;
    if let Some(v) = variant {
        inst = inst.with_variant(v.into());
    }
    let mut report = OracleReport {
        rows: Vec::new(),
        adaptive_tree: None,
        adaptive_finish: None,
        nonadaptive_plan: None,
    };
    if what != What::Nonadaptive {
        let opt = optimal_adaptive(&inst)?;
        report.rows.push(OracleRow {
            what: "adaptive",
            variant: inst.variant(),
            expected_cost: opt.expected_cost,
            order: String::new(),
        });
        if let Some(p) = tree_out {
            write_json(&opt, Some(p))?;
        }
        report.adaptive_finish = Some(querylab::oracle::finish_distribution(&opt.root, &inst));
        report.adaptive_tree = Some(opt.root);
    } else if tree_out.is_some() {
        bail!("--tree-out needs the adaptive oracle");
    }
    if what != What::Adaptive {
        let (plan, cost) = optimal_nonadaptive(&inst)?;
        report.rows.push(OracleRow {
            what: "nonadaptive",
            variant: inst.variant(),
            expected_cost: cost,
            order: join_order(&plan.order),
        });
        report.nonadaptive_plan = Some(plan);
    }
    match format {
        Format::Csv => write_csv(&report.rows)?,
        Format::Json => write_json(&report, None)?,
    }
    Ok(true)
}

#[derive(Serialize)]
struct CompareRow {
    policy: String,
    variant: Variant,
    policy_cost: f64,
    adaptive_cost: f64,
    ratio: f64,
    bound: Option<f64>,
    within_bound: Option<bool>,
}

fn theorem_bound(policy: Policy, inst: &Instance, epsilon: f64) -> Option<f64> {
    match (policy, inst.variant()) {
        (Policy::DgUnit, Variant::Smq) => Some(4.0),
        (Policy::DgGeneral, Variant::Smq) => Some(3.0 + 2.0 * 2f64.sqrt() + epsilon),
        (Policy::DgSmqi, _) => Some(4.0 + 2.0 * 3f64.sqrt() + epsilon),
        _ => None,
    }
}

fn cmd_compare(format: Format, instance: &Path, args: &PolicyArgs) -> Result<bool> {
    let inst = load_instance(instance)?;
    let plan = build_plan(&inst, args)?;
    let cost = match inst.variant() {
        Variant::Smq => exact_cost_smq(&inst, &plan)?,
        Variant::Smqi => exact_cost_enumeration(&inst, &plan)?,
    }
    .expected_cost;
    let opt = optimal_adaptive(&inst)?.expected_cost;
    let ratio = if opt > 0.0 {
        cost / opt
    } else if cost == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    let bound = theorem_bound(args.policy, &inst, args.epsilon);
    let within = bound.map(|b| cost <= b * opt + 1e-12);
    let policy = args
        .policy
        .to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    emit(
        format,
        &[CompareRow {
            policy,
            variant: inst.variant(),
            policy_cost: cost,
            adaptive_cost: opt,
            ratio,
            bound,
            within_bound: within,
        }],
    )?;
    Ok(within.unwrap_or(true))
}

#[derive(Serialize)]
struct ReproduceRow<'a> {
    experiment: &'a str,
    seed: u64,
    kind: &'static str,
    name: &'a str,
    value: f64,
    relation: Option<&'static str>,
    bound: Option<f64>,
    result: Option<&'static str>,
}

fn reproduce_rows(rep: &Reproduction) -> Vec<ReproduceRow<'_>> {
    let mut rows: Vec<ReproduceRow<'_>> = rep
        .measurements
        .iter()
        .map(|m| ReproduceRow {
            experiment: &rep.name,
            seed: rep.seed,
            kind: "measurement",
            name: &m.name,
            value: m.value,
            relation: None,
            bound: None,
            result: None,
        })
        .collect();
    rows.extend(rep.checks.iter().map(|c| ReproduceRow {
        experiment: &rep.name,
        seed: rep.seed,
        kind: "check",
        name: &c.name,
        value: c.value,
        relation: Some(match c.relation {
            Relation::AtLeast => ">=",
            Relation::AtMost => "<=",
        }),
        bound: Some(c.bound),
        result: Some(if c.pass { "PASS" } else { "FAIL" }),
    }));
    rows
}

fn cmd_reproduce(format: Format, name: &str, seed: u64) -> Result<bool> {
    let rep = reproduce(name, seed)?;
    match format {
        Format::Csv => write_csv(&reproduce_rows(&rep))?,
        Format::Json => write_json(&rep, None)?,
    }
    Ok(rep.passed())
}

#[allow(clippy::too_many_arguments)]
fn generate(
    family: Family,
    n: usize,
    delta: f64,
    epsilon: f64,
    support: usize,
    max_cost: Option<f64>,
    variant: Option<Variant>,
    seed: u64,
) -> Result<Instance> {
    let inst = match family {
        Family::Gap => instances::adaptivity_gap(epsilon)?,
        Family::Fig3 => instances::fig3(n, delta)?,
        Family::Fig4 => instances::fig4(n, delta)?,
        Family::SmqiBad => instances::smqi_bad(n, delta)?,
        Family::Competitive => instances::competitive_ratio(n)?,
        Family::Random => {
            let mut cfg = RandomConfig::unit(n, support, variant.unwrap_or(Variant::Smq));
            if let Some(high) = max_cost {
                cfg.cost_model = CostModel::UniformRange { low: 1.0, high };
            }
            instances::random(seed, &cfg)?
        }
    };
    Ok(match variant {
        Some(v) => inst.with_variant(v),
        None => inst,
    })
}
