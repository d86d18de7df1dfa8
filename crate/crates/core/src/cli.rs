//! `gptlab` command-line front end.
//!
//! Every command renders to a string first, so identical arguments give
//! byte-identical output whether it goes to stdout or `--out`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{GptError, Result};
use crate::fmt::g12;
use crate::jointopt::{
    exact_joint_feasible, optimize_noise, theorem_check, Feasibility, OptimizerConfig, TheoremReport,
};
use crate::polygon::{self, Address, IdealMeasurement, Order, Site};
use crate::theory::{Theory, TheoryKind, TheoryReport, DEFAULT_TOL};
use crate::uncertainty::{gamma, pur_bound, table_entry, GammaResult, LogBase, PAIRS};
use crate::vector::VecV;

/// Environment variable overriding the default tolerance.
pub const TOL_ENV: &str = "GPTLAB_TOL";

const DEFAULT_SAMPLES: usize = 100;
const DEFAULT_DISC_GRID: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "gptlab", version, about = "Uncertainty relations in regular polygon theories")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Theory order: an integer n >= 3, or "inf" for the disc.
    #[arg(long, global = true)]
    pub theory: Option<String>,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Logarithm base: 2 (bits) or e (nats).
    #[arg(long, global = true, default_value = "2")]
    pub base: LogBase,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true)]
    pub restarts: Option<usize>,

    #[arg(long, global = true)]
    pub samples: Option<usize>,
}

/// Two measurement addresses, positionally or via `--a` / `--b`.
/// With `--theory`, a bare index or angle is accepted.
#[derive(Debug, Clone, Args)]
pub struct Pair {
    #[arg(value_name = "ADDR", num_args = 0..=2)]
    pub addrs: Vec<String>,
    #[arg(long = "a")]
    pub a: Option<String>,
    #[arg(long = "b")]
    pub b: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Landau–Pollak constant of a pair and its maximising vertices.
    Gamma(Pair),
    /// Preparation bound -2 log(γ/2), from --gamma or from a pair.
    PurBound {
        #[arg(long)]
        gamma: Option<f64>,
        #[command(flatten)]
        pair: Pair,
    },
    /// Closed-form and direct (a_x + b_y)(ω_k) tables.
    Tables(Pair),
    /// Minimise the noise sum over approximate joint measurements.
    Optimize {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 2000)]
        max_iters: usize,
    },
    /// Exact joint measurability of a pair.
    Feasible(Pair),
    /// Check the measurement uncertainty relation on random joints.
    TheoremCheck {
        #[command(flatten)]
        pair: Pair,
        /// Also check the optimiser's best joint measurement.
        #[arg(long)]
        optimize: bool,
    },
    /// Structural checks of a theory.
    Validate {
        /// Theory order (same as --theory).
        #[arg(value_name = "THEORY")]
        order: Option<String>,
        /// JSON descriptor of a finite theory.
        #[arg(long)]
        theory_file: Option<PathBuf>,
    },
    /// γ and the preparation bound over a list of theories.
    Sweep {
        /// Comma-separated theory orders.
        #[arg(long, default_value = "8,12,16,20,inf")]
        orders: String,
        #[arg(long, value_enum, default_value = "quarter")]
        pairs: PairSet,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairSet {
    /// `i = 0` against the quarter turn; orders not divisible by 4 are skipped.
    Quarter,
    /// `i = 0` against every `j` (a `--samples` angle grid on the disc).
    All,
}

struct Outcome {
    text: String,
    ok: bool,
}

/// Tolerance from [`TOL_ENV`], or the default.
pub fn tolerance() -> Result<f64> {
    match std::env::var(TOL_ENV) {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
            _ => Err(GptError::Parse(format!("{TOL_ENV}={s:?} is not a positive number"))),
        },
        Err(_) => Ok(DEFAULT_TOL),
    }
}

/// Parses arguments, runs the command and returns the process exit code:
/// 0 on success, 1 when a checked assertion fails, 2 on bad input.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                0
            } else {
                let _ = write!(stderr, "{e}");
                2
            };
        }
    };
    let res = tolerance().and_then(|tol| execute(&cli, tol)).and_then(|o| {
        match &cli.out {
            Some(p) => std::fs::write(p, &o.text)?,
            None => stdout.write_all(o.text.as_bytes())?,
        }
        Ok(o.ok)
    });
    match res {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if !e.violations().is_empty() {
                if let Ok(j) = serde_json::to_string_pretty(e.violations()) {
                    let _ = writeln!(stderr, "{j}");
                }
            }
            2
        }
    }
}

/// Entry point for the binary.
pub fn main_entry() -> i32 {
    run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}

struct Ctx<'a> {
    cli: &'a Cli,
    tol: f64,
}

impl Ctx<'_> {
    fn theory_order(&self) -> Result<Option<Order>> {
        self.cli.theory.as_deref().map(str::parse).transpose()
    }

    fn address(&self, s: &str) -> Result<Address> {
        let fixed = self.theory_order()?;
        let addr: Address = match (s.contains(':'), fixed) {
            (true, _) => s.parse()?,
            (false, Some(o)) => format!("{o}:{s}").parse()?,
            (false, None) => return Err(GptError::Parse(format!("address {s:?} needs \"n:i\" form or --theory"))),
        };
        if let Some(o) = fixed {
            if o != addr.order {
                return Err(GptError::TheoryMismatch(format!("--theory {o} but address {addr}")));
            }
        }
        Ok(addr)
    }

    fn pair(&self, p: &Pair) -> Result<(IdealMeasurement, IdealMeasurement)> {
        let mut pos = p.addrs.iter();
        let a = p.a.as_ref().or_else(|| pos.next());
        let b = p.b.as_ref().or_else(|| pos.next());
        let (Some(a), Some(b)) = (a, b) else {
            return Err(GptError::Parse("two measurement addresses are required".into()));
        };
        if pos.next().is_some() {
            return Err(GptError::Parse("too many measurement addresses".into()));
        }
        let (a, b) = (self.address(a)?, self.address(b)?);
        if a.order != b.order {
            return Err(GptError::TheoryMismatch(format!("{a} and {b}")));
        }
        let theory = Theory::for_order_with_tol(a.order, self.tol)?;
        Ok((IdealMeasurement::new(&theory, a.site)?, IdealMeasurement::new(&theory, b.site)?))
    }

    fn format(&self, default: Format) -> Format {
        self.cli.format.unwrap_or(default)
    }
}

fn execute(cli: &Cli, tol: f64) -> Result<Outcome> {
    let ctx = Ctx { cli, tol };
    match &cli.command {
        Command::Gamma(p) => cmd_gamma(&ctx, p),
        Command::PurBound { gamma, pair } => cmd_pur_bound(&ctx, *gamma, pair),
        Command::Tables(p) => cmd_tables(&ctx, p),
        Command::Optimize { pair, max_iters } => cmd_optimize(&ctx, pair, *max_iters),
        Command::Feasible(p) => cmd_feasible(&ctx, p),
        Command::TheoremCheck { pair, optimize } => cmd_theorem_check(&ctx, pair, *optimize),
        Command::Validate { order, theory_file } => cmd_validate(&ctx, order.as_deref(), theory_file.as_ref()),
        Command::Sweep { orders, pairs } => cmd_sweep(&ctx, orders, *pairs),
    }
}

fn unit(base: LogBase) -> &'static str {
    match base {
        LogBase::Bits => "bits",
        LogBase::Nats => "nats",
    }
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

/// Two-column `key,value` CSV of every scalar in `v`, keys as dotted paths.
fn flat_csv<T: Serialize>(v: &T) -> Result<String> {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        let key = |k: &str| {
            if prefix.is_empty() {
                k.to_string()
            } else {
                format!("{prefix}.{k}")
            }
        };
        match v {
            Value::Object(m) => m.iter().for_each(|(k, x)| walk(&key(k), x, out)),
            Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| walk(&key(&i.to_string()), x, out)),
            Value::Null => {
                let _ = writeln!(out, "{prefix},");
            }
            Value::Number(n) => {
                let s = match (n.as_u64(), n.as_i64()) {
                    (Some(u), _) => u.to_string(),
                    (None, Some(i)) => i.to_string(),
                    _ => g12(n.as_f64().unwrap_or(f64::NAN)),
                };
                let _ = writeln!(out, "{prefix},{s}");
            }
            Value::Bool(b) => {
                let _ = writeln!(out, "{prefix},{b}");
            }
            Value::String(s) => {
                let _ = writeln!(out, "{prefix},{}", csv_field(s));
            }
        }
    }
    let mut out = String::from("key,value\n");
    walk("", &serde_json::to_value(v)?, &mut out);
    Ok(out)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render<T: Serialize>(ctx: &Ctx<'_>, v: &T, default: Format) -> Result<String> {
    match ctx.format(default) {
        Format::Json => json(v),
        Format::Csv => flat_csv(v),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaOut {
    pub a: String,
    pub b: String,
    pub base: LogBase,
    pub gamma: GammaResult,
    pub pur_bound: f64,
}

fn cmd_gamma(ctx: &Ctx<'_>, p: &Pair) -> Result<Outcome> {
    let (a, b) = ctx.pair(p)?;
    let g = gamma(&a, &b)?;
    let out = GammaOut {
        a: a.address().to_string(),
        b: b.address().to_string(),
        base: ctx.cli.base,
        pur_bound: pur_bound(g.gamma, ctx.cli.base)?,
        gamma: g,
    };
    Ok(Outcome {
        text: render(ctx, &out, Format::Json)?,
        ok: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurBoundOut {
    pub gamma: f64,
    pub base: LogBase,
    pub pur_bound: f64,
}

fn cmd_pur_bound(ctx: &Ctx<'_>, g: Option<f64>, p: &Pair) -> Result<Outcome> {
    let g = match g {
        Some(g) => g,
        None => {
            let (a, b) = ctx.pair(p)?;
            gamma(&a, &b)?.gamma
        }
    };
    let out = PurBoundOut {
        gamma: g,
        base: ctx.cli.base,
        pur_bound: pur_bound(g, ctx.cli.base)?,
    };
    Ok(Outcome {
        text: render(ctx, &out, Format::Json)?,
        ok: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    /// Vertex index, or sample index on the disc (`"max"` for the closed-form maximiser).
    pub k: String,
    pub angle: f64,
    /// Entries in `(x, y)` order `00, 01, 10, 11`.
    pub closed_form: [f64; 4],
    pub direct: [f64; 4],
    pub max_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TablesOut {
    pub theory: String,
    pub a: String,
    pub b: String,
    pub rows: Vec<TableRow>,
    pub max_diff: f64,
    /// Largest deviation of `(0,0)+(1,1)` and `(0,1)+(1,0)` from 2.
    pub max_complement_residual: f64,
    pub gamma: GammaResult,
    /// Disc quarter turns only: `θ_i - π/4`, where some `a_x + b_y` peaks.
    pub closed_form_maximizer: Option<f64>,
    pub passed: bool,
}

fn table_row(a: &IdealMeasurement, b: &IdealMeasurement, k: String, site: Site) -> Result<TableRow> {
    let order = a.address().order;
    let w = a.theory().pure_state(site)?.vector();
    let mut closed_form = [0.0; 4];
    let mut direct = [0.0; 4];
    for (c, &(x, y)) in PAIRS.iter().enumerate() {
        closed_form[c] = table_entry(order, a.address().site, b.address().site, site, x, y)?;
        direct[c] = a.effect(x).dot(&w) + b.effect(y).dot(&w);
    }
    let max_diff = closed_form
        .iter()
        .zip(&direct)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);
    Ok(TableRow {
        k,
        angle: polygon::vertex_angle(Address::new(order, site)?),
        closed_form,
        direct,
        max_diff,
    })
}

fn cmd_tables(ctx: &Ctx<'_>, p: &Pair) -> Result<Outcome> {
    let (a, b) = ctx.pair(p)?;
    let theory = Arc::clone(a.theory());
    let mut rows = Vec::new();
    let mut closed_form_maximizer = None;
    match theory.kind() {
        TheoryKind::Polygon(n) => {
            for k in 0..*n {
                rows.push(table_row(&a, &b, k.to_string(), Site::Index(k))?);
            }
        }
        _ => {
            let m = ctx.cli.samples.unwrap_or(DEFAULT_DISC_GRID).max(1);
            for k in 0..m {
                let phi = std::f64::consts::TAU * k as f64 / m as f64;
                rows.push(table_row(&a, &b, k.to_string(), Site::Angle(phi))?);
            }
            let (ti, tj) = (a.source_angle(), b.source_angle());
            let d = polygon::reduce_angle(tj - ti);
            let quarter = [std::f64::consts::FRAC_PI_2, 3.0 * std::f64::consts::FRAC_PI_2];
            if quarter.iter().any(|q| (d - q).abs() <= ctx.tol) {
                let phi = polygon::reduce_angle(ti - std::f64::consts::FRAC_PI_4);
                rows.push(table_row(&a, &b, "max".into(), Site::Angle(phi))?);
                closed_form_maximizer = Some(phi);
            }
        }
    }
    let max_diff = rows.iter().map(|r| r.max_diff).fold(0.0, f64::max);
    let max_complement_residual = rows
        .iter()
        .flat_map(|r| [r.direct[0] + r.direct[3] - 2.0, r.direct[1] + r.direct[2] - 2.0])
        .map(f64::abs)
        .fold(0.0, f64::max);
    let g = gamma(&a, &b)?;
    let maximizer_ok = closed_form_maximizer.is_none_or(|phi| {
        let row = rows.last().expect("maximiser row");
        (row.direct.iter().fold(f64::MIN, |m, v| m.max(*v)) - g.gamma).abs() <= ctx.tol && row.angle == phi
    });
    let passed = max_diff <= ctx.tol && max_complement_residual <= ctx.tol && maximizer_ok;
    let out = TablesOut {
        theory: theory.name(),
        a: a.address().to_string(),
        b: b.address().to_string(),
        rows,
        max_diff,
        max_complement_residual,
        gamma: g,
        closed_form_maximizer,
        passed,
    };
    let text = match ctx.format(Format::Csv) {
        Format::Json => json(&out)?,
        Format::Csv => {
            let mut s = String::from(
                "k,angle,cf_00,cf_01,cf_10,cf_11,direct_00,direct_01,direct_10,direct_11,max_diff\n",
            );
            for r in &out.rows {
                let _ = write!(s, "{},{}", r.k, g12(r.angle));
                for v in r.closed_form.iter().chain(&r.direct) {
                    let _ = write!(s, ",{}", g12(*v));
                }
                let _ = writeln!(s, ",{}", g12(r.max_diff));
            }
            s
        }
    };
    Ok(Outcome { text, ok: passed })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOut {
    pub a: String,
    pub b: String,
    pub base: LogBase,
    pub config: OptimizerConfig,
    pub noise_sum: f64,
    pub bound: f64,
    pub gap: f64,
    pub bound_respected: bool,
    pub extreme_point_noise_sum: Option<f64>,
    pub cells: Vec<Vec<VecV>>,
    pub marginal_a: Vec<VecV>,
    pub marginal_b: Vec<VecV>,
    pub per_restart: Vec<Option<f64>>,
    pub trace: Vec<(usize, f64)>,
}

fn cmd_optimize(ctx: &Ctx<'_>, p: &Pair, max_iters: usize) -> Result<Outcome> {
    let (a, b) = ctx.pair(p)?;
    let config = OptimizerConfig {
        restarts: ctx.cli.restarts.unwrap_or(OptimizerConfig::default().restarts),
        max_iters,
        seed: ctx.cli.seed,
        tol: ctx.tol,
    };
    let r = optimize_noise(&a, &b, &config, ctx.cli.base)?;
    let out = OptimizeOut {
        a: a.address().to_string(),
        b: b.address().to_string(),
        base: ctx.cli.base,
        config,
        noise_sum: r.noise_sum,
        bound: r.bound,
        gap: r.gap,
        bound_respected: r.bound_respected,
        extreme_point_noise_sum: r.extreme_point_noise_sum,
        marginal_a: r.best.row_sums(),
        marginal_b: r.best.col_sums(),
        cells: r.best.cells().to_vec(),
        per_restart: r.per_restart,
        trace: r.trace,
    };
    Ok(Outcome {
        text: render(ctx, &out, Format::Json)?,
        ok: out.bound_respected,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleOut {
    pub a: String,
    pub b: String,
    /// `feasible`, `infeasible` or `undetermined`.
    pub verdict: String,
    pub residual: f64,
    pub surrogate: Option<usize>,
    pub lp_iterations: usize,
    pub witness: Option<Vec<Vec<VecV>>>,
}

fn cmd_feasible(ctx: &Ctx<'_>, p: &Pair) -> Result<Outcome> {
    let (a, b) = ctx.pair(p)?;
    let r = exact_joint_feasible(&a, &b)?;
    let (verdict, witness) = match &r.verdict {
        Feasibility::Feasible(m) => ("feasible", Some(m.cells().to_vec())),
        Feasibility::Infeasible => ("infeasible", None),
        Feasibility::Undetermined => ("undetermined", None),
    };
    let out = FeasibleOut {
        a: a.address().to_string(),
        b: b.address().to_string(),
        verdict: verdict.into(),
        residual: r.residual,
        surrogate: r.surrogate,
        lp_iterations: r.lp_iterations,
        witness,
    };
    Ok(Outcome {
        text: render(ctx, &out, Format::Json)?,
        ok: true,
    })
}

fn cmd_theorem_check(ctx: &Ctx<'_>, p: &Pair, optimize: bool) -> Result<Outcome> {
    let (a, b) = ctx.pair(p)?;
    let config = optimize.then(|| OptimizerConfig {
        restarts: ctx.cli.restarts.unwrap_or(8),
        seed: ctx.cli.seed,
        tol: ctx.tol,
        ..Default::default()
    });
    let samples = ctx.cli.samples.unwrap_or(DEFAULT_SAMPLES);
    let r: TheoremReport = theorem_check(&a, &b, samples, ctx.cli.seed, config.as_ref(), ctx.cli.base)?;
    Ok(Outcome {
        text: render(ctx, &r, Format::Json)?,
        ok: r.passed,
    })
}

fn cmd_validate(ctx: &Ctx<'_>, order: Option<&str>, file: Option<&PathBuf>) -> Result<Outcome> {
    let theory = match (file, order.or(ctx.cli.theory.as_deref())) {
        (Some(path), None) => Theory::from_json(&std::fs::read_to_string(path)?)?,
        (None, Some(o)) => Theory::for_order_with_tol(o.parse()?, ctx.tol)?,
        (Some(_), Some(_)) => return Err(GptError::Parse("give a theory order or --theory-file, not both".into())),
        (None, None) => return Err(GptError::Parse("validate needs a theory".into())),
    };
    let r: TheoryReport = theory.report();
    let text = match ctx.cli.format {
        None => format!(
            "theory: {}\nself-dual: {}\ntransitive: {}\npassed: {}\n",
            r.theory, r.self_dual, r.transitive, r.passed
        ),
        Some(_) => render(ctx, &r, Format::Json)?,
    };
    Ok(Outcome { text, ok: r.passed })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: String,
    pub i: String,
    pub j: String,
    pub gamma: f64,
    pub pur_bound: f64,
    pub max_vertex_k: String,
    pub max_x: usize,
    pub max_y: usize,
    /// `1 + r²/√2` or `1 + 1/√2` for quarter turns, when such a form applies.
    pub closed_form: Option<f64>,
}

/// Closed-form γ for a quarter-turn pair.
pub fn quarter_turn_gamma(order: Order) -> Option<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match order {
        Order::Disc => Some(1.0 + s),
        Order::Polygon(n) if n % 8 == 0 => Some(1.0 + s),
        Order::Polygon(n) if n % 8 == 4 => Some(1.0 + polygon::radius_sq(order) * s),
        Order::Polygon(_) => None,
    }
}

fn sweep_row(theory: &Arc<Theory>, i: Site, j: Site, quarter: bool, base: LogBase) -> Result<SweepRow> {
    let a = IdealMeasurement::new(theory, i)?;
    let b = IdealMeasurement::new(theory, j)?;
    let g = gamma(&a, &b)?;
    let order = a.address().order;
    Ok(SweepRow {
        n: order.to_string(),
        i: i.to_string(),
        j: j.to_string(),
        gamma: g.gamma,
        pur_bound: pur_bound(g.gamma, base)?,
        max_vertex_k: g.maximizer.site.to_string(),
        max_x: g.maximizer.x,
        max_y: g.maximizer.y,
        closed_form: if quarter { quarter_turn_gamma(order) } else { None },
    })
}

fn cmd_sweep(ctx: &Ctx<'_>, orders: &str, pairs: PairSet) -> Result<Outcome> {
    let base = ctx.cli.base;
    let mut rows = Vec::new();
    for o in orders.split(',').filter(|s| !s.trim().is_empty()) {
        let order: Order = o.parse()?;
        let theory = Theory::for_order_with_tol(order, ctx.tol)?;
        match (order, pairs) {
            (Order::Polygon(n), PairSet::Quarter) => {
                if n % 4 == 0 {
                    rows.push(sweep_row(&theory, Site::Index(0), Site::Index(n / 4), true, base)?);
                }
            }
            (Order::Polygon(n), PairSet::All) => {
                for j in 0..n {
                    let quarter = n % 4 == 0 && (j == n / 4 || j == 3 * n / 4);
                    rows.push(sweep_row(&theory, Site::Index(0), Site::Index(j), quarter, base)?);
                }
            }
            (Order::Disc, PairSet::Quarter) => {
                rows.push(sweep_row(&theory, Site::Angle(0.0), Site::Angle(std::f64::consts::FRAC_PI_2), true, base)?);
            }
            (Order::Disc, PairSet::All) => {
                let m = ctx.cli.samples.unwrap_or(DEFAULT_DISC_GRID).max(1);
                for k in 0..m {
                    let quarter = 4 * k == m || 4 * k == 3 * m;
                    let t = std::f64::consts::TAU * k as f64 / m as f64;
                    rows.push(sweep_row(&theory, Site::Angle(0.0), Site::Angle(t), quarter, base)?);
                }
            }
        }
    }
    let ok = rows
        .iter()
        .all(|r| r.closed_form.is_none_or(|c| (c - r.gamma).abs() <= ctx.tol));
    let text = match ctx.format(Format::Csv) {
        Format::Json => json(&rows)?,
        Format::Csv => {
            let mut s = format!(
                "n,i,j,gamma,pur_bound_{},max_vertex_k,max_x,max_y,closed_form\n",
                unit(base)
            );
            for r in &rows {
                let parse_num = |t: &str| t.parse::<f64>().map(g12).unwrap_or_else(|_| t.to_string());
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{}",
                    r.n,
                    parse_num(&r.i),
                    parse_num(&r.j),
                    g12(r.gamma),
                    g12(r.pur_bound),
                    parse_num(&r.max_vertex_k),
                    r.max_x,
                    r.max_y,
                    r.closed_form.map(g12).unwrap_or_default()
                );
            }
            s
        }
    };
    Ok(Outcome { text, ok })
}
