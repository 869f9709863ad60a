//! `gradest`: evaluate, generate, audit and verify Li-Yau type estimates.

mod scenario;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use gradest::bound::{make_family, EstimateContext, Family, GradientBound};
use gradest::coefficient::{bound_from_b, load_b_table, APreset, CoefficientPreset};
use gradest::conditions::{check_suite, ConditionInputs, Suite, SuiteExtras};
use gradest::manifolds::{radial_heat_solve, LogHeatData, RadialSolution, RadialSolverConfig};
use gradest::numfmt::{csv_row, num};
use gradest::selftest::{run_selftest_with_determinism, solver_error};
use gradest::timefn::{log_grid, TimeFunction};
use gradest::verify::{compare_bounds, find_crossover, verify_bound, TolerancePolicy};

use scenario::{Coefficient, DataSpec, Scenario};

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_CONDITIONS: u8 = 3;

#[derive(Parser)]
#[command(
    name = "gradest",
    version,
    about = "Li-Yau type gradient estimates for the heat equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in bound families.
    Families,
    /// Print (beta, psi, alpha, phi) of one family on a time grid.
    Eval(EvalArgs),
    /// Generate (beta, psi) from a coefficient function b.
    Generate(GenerateArgs),
    /// Audit a condition suite (A, B, Bprime, C).
    Check(CheckArgs),
    /// Check the estimate on model heat-kernel data.
    Verify(VerifyArgs),
    /// Tabulate psi of several families and mark the smallest.
    Compare(CompareArgs),
    /// Find where two families' psi cross inside a bracket.
    Crossover(CrossoverArgs),
    /// Run the radial heat solver and store the result as CSV.
    Solve(SolveArgs),
    /// Run the acceptance suite twice and report.
    Selftest(SelftestArgs),
}

#[derive(Args, Clone, Default)]
struct CtxArgs {
    /// JSON scenario file; explicit flags take precedence over its values.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Dimension.
    #[arg(long)]
    n: Option<u32>,
    /// Ricci lower bound: Ric >= -k g.
    #[arg(long)]
    k: Option<f64>,
    /// Time horizon.
    #[arg(long = "T", visible_alias = "horizon")]
    horizon: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct ParamArgs {
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct GridArgs {
    #[arg(long)]
    t_lo: Option<f64>,
    #[arg(long)]
    t_hi: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args, Clone, Default)]
struct CoefficientArgs {
    /// theta-power, lixu-sinh or qian.
    #[arg(long)]
    preset: Option<String>,
    /// Qian's a(t) for `--preset qian` or suite A: t2, sinh2, power:<p>.
    #[arg(long)]
    a: Option<String>,
    /// CSV table with columns t,b,bprime.
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    ctx: CtxArgs,
    /// Family as `name` or `name:p1:p2`.
    #[arg(long)]
    family: Option<String>,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    ctx: CtxArgs,
    #[command(flatten)]
    coef: CoefficientArgs,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    ctx: CtxArgs,
    #[arg(long)]
    suite: String,
    #[command(flatten)]
    coef: CoefficientArgs,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Write the report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    ctx: CtxArgs,
    #[arg(long)]
    family: Option<String>,
    #[command(flatten)]
    params: ParamArgs,
    /// h3, euclidean, or a solver CSV written by `solve`.
    #[arg(long)]
    data: Option<String>,
    /// Absolute tolerance on G.
    #[arg(long, conflicts_with = "tol_rel")]
    tol_abs: Option<f64>,
    /// Relative tolerance on G, scaled by |f_t| + |grad f|^2.
    #[arg(long)]
    tol_rel: Option<f64>,
    #[arg(long)]
    json: Option<PathBuf>,
    /// CSV with columns r,t,G.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// CSV with columns t,margin.
    #[arg(long)]
    margin: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    ctx: CtxArgs,
    /// Repeat for each family.
    #[arg(long)]
    family: Vec<String>,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Alpha-form table.
    #[arg(long)]
    alpha_out: Option<PathBuf>,
}

#[derive(Args)]
struct CrossoverArgs {
    #[command(flatten)]
    ctx: CtxArgs,
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    #[arg(long, num_args = 2, value_names = ["T_LO", "T_HI"])]
    bracket: Vec<f64>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    nr: Option<usize>,
    #[arg(long)]
    t_start: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    dt0: Option<f64>,
    #[arg(long)]
    growth: Option<f64>,
    #[arg(long)]
    dt_max: Option<f64>,
    #[arg(long)]
    checkpoints: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    /// Text report.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            error,
        }
    }
}

impl From<gradest::Error> for Failure {
    fn from(e: gradest::Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            error: e.into(),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Families => families(),
        Command::Eval(a) => eval(a),
        Command::Generate(a) => generate(a),
        Command::Check(a) => check(a),
        Command::Verify(a) => verify(a),
        Command::Compare(a) => compare(a),
        Command::Crossover(a) => crossover(a),
        Command::Solve(a) => solve(a),
        Command::Selftest(a) => selftest(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

/// Writes via a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .map_err(|e| anyhow!("writing {}: {}", path.display(), e.error))?;
    Ok(())
}

/// Writes to `path`, or prints when there is none.
fn emit(path: Option<&Path>, contents: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => write_atomic(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn load_scenario(path: &Option<PathBuf>) -> anyhow::Result<Option<Scenario>> {
    path.as_deref().map(Scenario::load).transpose()
}

fn context(args: &CtxArgs, sc: Option<&Scenario>) -> anyhow::Result<EstimateContext> {
    let base = sc.map(|s| s.ctx);
    let n = args.n.or(base.map(|c| c.n)).unwrap_or(2);
    let k = args.k.or(base.map(|c| c.k)).unwrap_or(1.0);
    let horizon = args.horizon.or(base.map(|c| c.horizon)).unwrap_or(5.0);
    Ok(EstimateContext::new(n, k, horizon)?)
}

/// Parses `name` or `name:p1:p2`; missing parameters come from the flags.
fn parse_family(
    text: &str,
    flags: &ParamArgs,
    ctx: EstimateContext,
) -> anyhow::Result<GradientBound> {
    let mut parts = text.split(':');
    let name = parts.next().unwrap_or_default();
    let family = Family::from_str(name).map_err(|e| anyhow!("{e}"))?;
    let given: Vec<f64> = parts
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| anyhow!("bad parameter `{p}` in `{text}`"))
        })
        .collect::<anyhow::Result<_>>()?;
    let names = family.param_names();
    if given.len() > names.len() {
        bail!(
            "{} takes {} parameter(s) ({}), got {}",
            family.id(),
            names.len(),
            names.join(", "),
            given.len()
        );
    }
    let mut params = given.clone();
    for name in &names[given.len()..] {
        let v = match *name {
            "beta" => flags.beta,
            "theta" => flags.theta,
            "gamma" => flags.gamma,
            _ => None,
        };
        params.push(v.ok_or_else(|| {
            anyhow!(
                "{} needs `{name}` (use {}:<value> or --{name})",
                family.id(),
                family.id()
            )
        })?);
    }
    if family == Family::GeneratedFromB {
        bail!("generated bounds come from `generate` or a scenario coefficient, not --family");
    }
    Ok(make_family(ctx, family, &params)?)
}

fn scenario_bounds(
    sc: Option<&Scenario>,
    ctx: EstimateContext,
) -> anyhow::Result<Vec<GradientBound>> {
    let Some(sc) = sc else { return Ok(Vec::new()) };
    sc.bounds
        .iter()
        .map(|e| Ok(make_family(ctx, e.family, &e.params)?))
        .collect()
}

fn coefficient(
    args: &CoefficientArgs,
    params: &ParamArgs,
    sc: Option<&Scenario>,
    ctx: &EstimateContext,
) -> anyhow::Result<TimeFunction> {
    if let Some(table) = &args.table {
        return Ok(load_b_table(table, ctx.horizon)?);
    }
    if let Some(name) = &args.preset {
        let preset = match name.as_str() {
            "theta-power" => CoefficientPreset::ThetaPower {
                theta: params
                    .theta
                    .ok_or_else(|| anyhow!("--preset theta-power needs --theta"))?,
            },
            "lixu-sinh" => CoefficientPreset::LixuSinh,
            "qian" => CoefficientPreset::QianFromA {
                a: args
                    .a
                    .clone()
                    .ok_or_else(|| anyhow!("--preset qian needs --a"))?,
            },
            other => bail!("unknown preset `{other}` (theta-power, lixu-sinh, qian)"),
        };
        return Ok(preset.b_function(ctx.k, ctx.horizon)?);
    }
    match sc.and_then(|s| s.coefficient.as_ref()) {
        Some(Coefficient::Preset(p)) => Ok(p.b_function(ctx.k, ctx.horizon)?),
        Some(Coefficient::Table { table }) => Ok(load_b_table(table, ctx.horizon)?),
        None => bail!("no coefficient given (--preset, --table, or a scenario `coefficient`)"),
    }
}

fn time_grid(
    args: &GridArgs,
    sc: Option<&Scenario>,
    lo_default: f64,
    hi_default: f64,
) -> anyhow::Result<Vec<f64>> {
    let g = sc.and_then(|s| s.grid);
    let lo = args.t_lo.or(g.and_then(|g| g.t_lo)).unwrap_or(lo_default);
    let hi = args.t_hi.or(g.and_then(|g| g.t_hi)).unwrap_or(hi_default);
    let points = args.points.or(g.map(|g| g.points)).unwrap_or(50);
    if !(lo > 0.0 && hi > lo) || points < 2 {
        bail!("bad time grid [{lo}, {hi}] with {points} points");
    }
    Ok(log_grid(lo, hi, points))
}

fn families() -> Outcome {
    for f in Family::ALL {
        let params = f.param_names().join(",");
        println!(
            "{:<18} {:<18} {}",
            f.id(),
            if params.is_empty() {
                "-".to_string()
            } else {
                params
            },
            f.summary()
        );
    }
    Ok(())
}

fn eval(a: EvalArgs) -> Outcome {
    let sc = load_scenario(&a.ctx.scenario)?;
    let ctx = context(&a.ctx, sc.as_ref())?;
    let bound = match &a.family {
        Some(f) => parse_family(f, &a.params, ctx)?,
        None => scenario_bounds(sc.as_ref(), ctx)?
            .into_iter()
            .next()
            .ok_or_else(|| anyhow!("no family given (--family or scenario `bounds`)"))?,
    };
    let lo = (bound.t_min() * (1.0 + 1e-6)).max(ctx.horizon * 1e-3);
    let ts = time_grid(&a.grid, sc.as_ref(), lo, ctx.horizon)?;
    let mut out = String::from("t,beta,psi,alpha,phi\n");
    for t in ts {
        let s = bound.evaluate(t)?;
        out.push_str(&csv_row(&[s.t, s.beta, s.psi, s.alpha, s.phi]));
        out.push('\n');
    }
    let path = a.out.or(sc.and_then(|s| s.outputs.csv));
    emit(path.as_deref(), &out)?;
    Ok(())
}

fn generate(a: GenerateArgs) -> Outcome {
    let sc = load_scenario(&a.ctx.scenario)?;
    let ctx = context(&a.ctx, sc.as_ref())?;
    let b = coefficient(&a.coef, &a.params, sc.as_ref(), &ctx)?;
    let bound = bound_from_b(ctx, &b)?;
    let ts = time_grid(&a.grid, sc.as_ref(), ctx.horizon * 1e-3, ctx.horizon)?;
    let mut out = String::from("t,b,beta,psi\n");
    for t in ts {
        let s = bound.evaluate(t)?;
        out.push_str(&csv_row(&[t, b.try_eval(t)?, s.beta, s.psi]));
        out.push('\n');
    }
    let path = a.out.or(sc.and_then(|s| s.outputs.csv));
    emit(path.as_deref(), &out)?;
    Ok(())
}

fn check(a: CheckArgs) -> Outcome {
    let sc = load_scenario(&a.ctx.scenario)?;
    let ctx = context(&a.ctx, sc.as_ref())?;
    let suite = Suite::parse(&a.suite)?;
    let tol = sc.as_ref().map(|s| s.tolerances).unwrap_or_default();
    let extras = SuiteExtras {
        delta: a.delta.or(tol.delta),
        eps: a.eps.or(tol.eps),
    };
    let inputs = match suite {
        Suite::A => {
            let name = a
                .coef
                .a
                .as_deref()
                .ok_or_else(|| anyhow!("suite A needs --a (t2, sinh2, power:<p>)"))?;
            ConditionInputs::a(APreset::parse(name)?.function(ctx.k, ctx.horizon))
        }
        Suite::C => ConditionInputs::b(coefficient(&a.coef, &a.params, sc.as_ref(), &ctx)?),
        Suite::B | Suite::Bprime => {
            // the generated pair with lambda = sqrt(b)
            let b = coefficient(&a.coef, &a.params, sc.as_ref(), &ctx)?;
            let bound = bound_from_b(ctx, &b)?;
            let bb = b.clone();
            let lambda =
                TimeFunction::new(ctx.horizon, move |t| bb.eval(t).sqrt()).with_zero_limit(0.0);
            ConditionInputs::lambda_beta_psi(lambda, bound.beta_fn(), bound.psi_fn())
        }
    };
    let report = check_suite(suite, &inputs, &ctx, &extras)?;
    print!("{}", report.to_table());
    if report.lower_accuracy_derivatives {
        println!("note: some derivatives used one-sided or lower-accuracy stencils");
    }
    let json_path = a.json.or(sc.and_then(|s| s.outputs.json));
    if let Some(p) = json_path {
        write_atomic(&p, &report.to_json())?;
    }
    if report.all_pass() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_CONDITIONS,
            error: anyhow!("condition suite {} did not pass", a.suite),
        })
    }
}

fn model_data(name: Option<&str>, sc: Option<&Scenario>) -> anyhow::Result<LogHeatData> {
    if let Some(name) = name {
        return match name {
            "h3" => Ok(LogHeatData::hyperbolic3_kernel()),
            "euclidean" => bail!("euclidean data needs a dimension; use `euclidean:<n>`"),
            _ => {
                if let Some(n) = name.strip_prefix("euclidean:") {
                    return Ok(LogHeatData::euclidean_gaussian(
                        n.parse().context("bad dimension")?,
                    )?);
                }
                let text = std::fs::read_to_string(name)
                    .with_context(|| format!("reading solver output {name}"))?;
                Ok(LogHeatData::from_solution(RadialSolution::from_csv(&text)?))
            }
        };
    }
    match sc.and_then(|s| s.data.as_ref()) {
        Some(DataSpec::H3) => Ok(LogHeatData::hyperbolic3_kernel()),
        Some(DataSpec::Euclidean) => Ok(LogHeatData::euclidean_gaussian(sc.unwrap().ctx.n)?),
        Some(DataSpec::RadialSolve { config }) => {
            Ok(LogHeatData::from_solution(radial_heat_solve(config)?))
        }
        Some(DataSpec::RadialCsv { path }) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            Ok(LogHeatData::from_solution(RadialSolution::from_csv(&text)?))
        }
        None => bail!("no data given (--data or scenario `data`)"),
    }
}

fn verify(a: VerifyArgs) -> Outcome {
    let sc = load_scenario(&a.ctx.scenario)?;
    let data = model_data(a.data.as_deref(), sc.as_ref())?;
    // the data fixes n unless given
    let mut ctx_args = a.ctx.clone();
    if ctx_args.n.is_none() && sc.is_none() {
        ctx_args.n = Some(data.n);
    }
    let ctx = context(&ctx_args, sc.as_ref())?;
    let bounds = match &a.family {
        Some(f) => vec![parse_family(f, &a.params, ctx)?],
        None => scenario_bounds(sc.as_ref(), ctx)?,
    };
    if bounds.is_empty() {
        return Err(anyhow!("no family given (--family or scenario `bounds`)").into());
    }
    let tol = sc.as_ref().map(|s| s.tolerances).unwrap_or_default();
    let policy = match (a.tol_abs.or(tol.verify_abs), a.tol_rel.or(tol.verify_rel)) {
        (Some(t), _) => Some(TolerancePolicy::Absolute(t)),
        (None, Some(t)) => Some(TolerancePolicy::Relative(t)),
        _ => None,
    };
    let outputs = sc.map(|s| s.outputs).unwrap_or_default();
    let mut failed = Vec::new();
    let mut reports = Vec::new();
    for bound in &bounds {
        let rep = verify_bound(bound, &data, None, policy)?;
        println!(
            "{} on {}: max_G = {} at (r, t) = ({}, {}), violations: {}, {}",
            rep.bound,
            rep.data,
            num(rep.max_g),
            num(rep.argmax.0),
            num(rep.argmax.1),
            rep.violations.len(),
            if rep.passed { "PASS" } else { "FAIL" }
        );
        if !rep.passed {
            failed.push(rep.bound.clone());
        }
        reports.push(rep);
    }
    let single = reports.len() == 1;
    if let Some(p) = a.json.or(outputs.json) {
        let text = if single {
            reports[0].to_json()
        } else {
            serde_json::to_string_pretty(&reports).map_err(anyhow::Error::from)?
        };
        write_atomic(&p, &text)?;
    }
    if let Some(p) = a.csv.or(outputs.csv) {
        write_atomic(
            &p,
            &reports
                .iter()
                .map(|r| r.g_csv())
                .collect::<Vec<_>>()
                .join(""),
        )?;
    }
    if let Some(p) = a.margin.or(outputs.margin) {
        write_atomic(
            &p,
            &reports
                .iter()
                .map(|r| r.margin_csv())
                .collect::<Vec<_>>()
                .join(""),
        )?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_VERIFY,
            error: anyhow!("violations found for {}", failed.join(", ")),
        })
    }
}

fn compare(a: CompareArgs) -> Outcome {
    let sc = load_scenario(&a.ctx.scenario)?;
    let ctx = context(&a.ctx, sc.as_ref())?;
    let mut bounds = a
        .family
        .iter()
        .map(|f| parse_family(f, &ParamArgs::default(), ctx))
        .collect::<anyhow::Result<Vec<_>>>()?;
    if bounds.is_empty() {
        bounds = scenario_bounds(sc.as_ref(), ctx)?;
    }
    if bounds.is_empty() {
        return Err(anyhow!("no families given (--family, repeated, or scenario `bounds`)").into());
    }
    let lo = bounds
        .iter()
        .map(|b| b.t_min())
        .fold(ctx.horizon * 1e-3, f64::max)
        * (1.0 + 1e-6);
    let ts = time_grid(&a.grid, sc.as_ref(), lo, ctx.horizon)?;
    let table = compare_bounds(&bounds, &ts)?;
    let outputs = sc.map(|s| s.outputs).unwrap_or_default();
    emit(a.out.or(outputs.csv).as_deref(), &table.to_csv())?;
    if let Some(p) = a.alpha_out.or(outputs.alpha_csv) {
        write_atomic(&p, &table.alpha_csv())?;
    }
    Ok(())
}

fn crossover(a: CrossoverArgs) -> Outcome {
    let sc = load_scenario(&a.ctx.scenario)?;
    let ctx = context(&a.ctx, sc.as_ref())?;
    let (b1, b2) = (
        parse_family(&a.a, &ParamArgs::default(), ctx)?,
        parse_family(&a.b, &ParamArgs::default(), ctx)?,
    );
    let [lo, hi] = a.bracket[..] else {
        return Err(anyhow!("--bracket takes two times").into());
    };
    let t = find_crossover(&b1, &b2, (lo, hi))?;
    println!("{}", num(t));
    Ok(())
}

fn solve(a: SolveArgs) -> Outcome {
    let sc = load_scenario(&a.scenario)?;
    let mut cfg = match sc.as_ref().and_then(|s| s.data.as_ref()) {
        Some(DataSpec::RadialSolve { config }) => *config,
        _ => RadialSolverConfig::default(),
    };
    if let Some(v) = a.n {
        cfg.n = v;
    }
    if let Some(v) = a.r_max {
        cfg.r_max = v;
    }
    if let Some(v) = a.nr {
        cfg.n_r = v;
    }
    if let Some(v) = a.t_start {
        cfg.t_start = v;
    }
    if let Some(v) = a.t_end {
        cfg.t_end = v;
    }
    if let Some(v) = a.dt0 {
        cfg.dt0 = v;
    }
    if let Some(v) = a.growth {
        cfg.growth = v;
    }
    if a.dt_max.is_some() {
        cfg.dt_max = a.dt_max;
    }
    if let Some(v) = a.checkpoints {
        cfg.checkpoints = v;
    }
    let out = a
        .out
        .or(sc.and_then(|s| s.outputs.csv))
        .ok_or_else(|| anyhow!("`solve` needs --out (or scenario outputs.csv)"))?;
    let sol = radial_heat_solve(&cfg)?;
    write_atomic(&out, &sol.to_csv())?;
    println!(
        "n = {}, {} nodes on [0, {}], {} checkpoints, window t in [{}, {}]",
        sol.n,
        sol.r.len(),
        num(sol.r_max()),
        sol.checkpoint_times().len(),
        num(sol.window.0),
        num(sol.window.1)
    );
    if sol.n == 3 {
        println!(
            "max relative error against the exact kernel (r <= 6, t in [0.5, 2]): {}",
            num(solver_error(&sol)?)
        );
    }
    Ok(())
}

fn selftest(a: SelftestArgs) -> Outcome {
    let report = run_selftest_with_determinism();
    let text = report.render();
    print!("{text}");
    if let Some(p) = &a.out {
        write_atomic(p, &text)?;
    }
    if let Some(p) = &a.json {
        write_atomic(p, &report.to_json())?;
    }
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<String> = report
            .criteria
            .iter()
            .filter(|c| !c.passed())
            .map(|c| c.number.to_string())
            .collect();
        Err(Failure {
            code: EXIT_VERIFY,
            error: anyhow!("failing criteria: {}", failed.join(", ")),
        })
    }
}
