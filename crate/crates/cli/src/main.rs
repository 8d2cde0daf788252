//! `ultragrowth`: evaluate weights, check growth conditions, run the Steps I–V construction.
//!
//! Exit codes: 0 HOLDS, 1 FAILS, 2 INCONCLUSIVE, 3 usage or input error, 4 library error.

mod manifest;

use std::cell::RefCell;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use manifest::RunManifest;
use ultragrowth::constructions::{run_pipeline, HorizonPolicy};
use ultragrowth::entire::{frak_seminorm, linspace, mollify, SampledFunction};
use ultragrowth::growth::{matrix_mixed_condition, mixed_condition, MixedConditionSpec, MixedKind, Quantifier};
use ultragrowth::harmonic::{kappa, poisson};
use ultragrowth::report::SCHEMA;
use ultragrowth::sequences::{
    growth_index, make_jet, make_matrix, make_sequence, quasianalytic_check, relation_check, GrowthIndex, JetSpec, MatrixSpec,
    Relation, SequenceSpec, WeightMatrix, WeightSequence,
};
use ultragrowth::weights::{lambda_series, make_weight_function, omega_assoc, young_conjugate, PreWeightFunction, WeightFnSpec};
use ultragrowth::{ConditionReport, Verdict};

const CATALOG: &str = "\
Conditions:
  SV             Schmets-Valdivia: sup_{i<j} (M_j/(s^j N_i))^{1/(j-i)} T_j / j bounded
  gamma1         strong gamma_1, needs M <= C N
  L              P_N(is) <= omega_M(Cs) + C
  strong_omega1  omega_M(2t) <= omega_N(t) + C
  BMT_kappa      kappa_{omega_N}(r) <= C omega_M(r) + C
  leq | preceq | triangle | equivalent   sequence relations
  mg | dc        mixed moderate growth / derivation closedness
  quasianalytic  sum 1/mu_k = infinity (uses --m only)";

#[derive(Parser)]
#[command(name = "ultragrowth", version, about = "Growth conditions for weight sequences, weight functions and weight matrices")]
struct Cli {
    /// Override the truncation K of every loaded descriptor.
    #[arg(long = "K", global = true)]
    k: Option<usize>,
    /// Quadrature and search tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Omega,
    Lambda,
    Young,
    Poisson,
    Kappa,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Strict,
    Truncate,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate omega_M, lambda_M, the Young conjugate, P_omega or kappa_omega at points.
    Eval {
        #[arg(value_enum)]
        target: Target,
        /// Weight sequence descriptor.
        #[arg(long)]
        seq: Option<PathBuf>,
        /// Weight function descriptor.
        #[arg(long = "fn")]
        func: Option<PathBuf>,
        /// Comma-separated points; poisson takes `x:y` pairs.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        points: Vec<String>,
    },
    /// Check one condition between two sequences or two matrices.
    #[command(after_help = CATALOG)]
    Check {
        condition: String,
        #[arg(long)]
        m: PathBuf,
        #[arg(long)]
        n: Option<PathBuf>,
        /// Roumieu quantifier order for matrices (default is Beurling).
        #[arg(long)]
        roumieu: bool,
    },
    /// Run Steps I-V on a jet and two matrices.
    Pipeline {
        #[arg(long)]
        jet: PathBuf,
        #[arg(long)]
        mm: PathBuf,
        #[arg(long)]
        nn: PathBuf,
        #[arg(long, value_enum, default_value_t = Policy::Truncate)]
        policy: Policy,
    },
    /// Parameter sweeps; `gevrey-grid` checks every condition on Gevrey pairs (s, t).
    Harness {
        name: String,
        #[arg(long, value_delimiter = ',', default_values_t = [1.25, 1.5, 2.0, 3.0])]
        s: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [1.25, 1.5, 2.0, 3.0])]
        t: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = ["SV".to_string(), "L".to_string()])]
        conditions: Vec<String>,
        /// Directory receiving one report per cell.
        #[arg(long)]
        cells: Option<PathBuf>,
    },
    /// Mollify f with E_j * chi f and measure the seminorm of f - f_j.
    Mollify {
        /// `poly:c0,c1,...`, `exp:rate[,scale]` or `gauss:a[,scale]`.
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long)]
        j: u32,
        /// Half-width k of the interval [-k, k].
        #[arg(long, default_value_t = 1.0)]
        interval: f64,
        /// `gevrey:s` weight of the seminorm.
        #[arg(long = "M", default_value = "gevrey:1")]
        m: String,
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
    /// Re-emit saved reports; the exit code is the combined verdict.
    Report { files: Vec<PathBuf> },
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Lib(ultragrowth::Error),
}

impl From<ultragrowth::Error> for CliError {
    fn from(e: ultragrowth::Error) -> Self {
        CliError::Lib(e)
    }
}

type Res<T> = Result<T, CliError>;

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::HoldsTrend => 0,
        Verdict::FailsTrend => 1,
        Verdict::Inconclusive => 2,
    }
}

struct Ctx {
    k: Option<usize>,
    tol: f64,
    format: Format,
    manifest: RefCell<RunManifest>,
}

impl Ctx {
    fn read(&self, path: &Path) -> Res<Value> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        self.manifest.borrow_mut().record(path, &bytes);
        let mut v: Value = serde_json::from_slice(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        if let Some(k) = self.k {
            override_k(&mut v, k);
        }
        Ok(v)
    }

    fn load<T: DeserializeOwned>(&self, path: &Path) -> Res<T> {
        let v = self.read(path)?;
        serde_json::from_value(v).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    /// Resolver for `{"ref": "file.json"}` rows, relative to the referring file.
    fn resolver<'a>(&'a self, base: &'a Path) -> impl Fn(&str) -> ultragrowth::Result<SequenceSpec> + 'a {
        move |rel: &str| {
            let p = base.parent().unwrap_or(Path::new(".")).join(rel);
            self.load(&p).map_err(|e| match e {
                CliError::Lib(e) => e,
                CliError::Input(s) => ultragrowth::Error::InvalidDescriptor(s),
            })
        }
    }

    fn sequence(&self, path: &Path) -> Res<WeightSequence> {
        Ok(make_sequence(&self.load::<SequenceSpec>(path)?)?)
    }

    fn matrix(&self, path: &Path) -> Res<WeightMatrix> {
        let spec: MatrixSpec = self.load(path)?;
        Ok(make_matrix(&spec, &self.resolver(path))?)
    }

    fn weight_fn(&self, seq: &Option<PathBuf>, func: &Option<PathBuf>) -> Res<PreWeightFunction> {
        match (seq, func) {
            (_, Some(f)) => Ok(make_weight_function(&self.load::<WeightFnSpec>(f)?, &self.resolver(f))?),
            (Some(s), None) => Ok(PreWeightFunction::from_sequence(self.sequence(s)?)),
            (None, None) => Err(CliError::Input("need --seq or --fn".into())),
        }
    }

    fn envelope(&self, mut body: Value) -> Value {
        if let Value::Object(map) = &mut body {
            map.insert("schema".into(), json!(SCHEMA));
            map.insert("manifest".into(), self.manifest.borrow().to_value());
        }
        body
    }

    fn footer(&self) -> String {
        format!("# manifest: {}\n", self.manifest.borrow().to_value())
    }

    fn report(&self, r: &ConditionReport) -> String {
        match self.format {
            Format::Json => pretty(&self.envelope(serde_json::to_value(r).expect("report serializes"))),
            Format::Csv => {
                let mut s = format!("# schema: {SCHEMA}\n# condition: {}\n# verdict: {}\n", r.condition, r.verdict.as_str());
                s.push_str(&r.profile_csv());
                s.push_str(&self.footer());
                s
            }
        }
    }
}

fn override_k(v: &mut Value, k: usize) {
    match v {
        Value::Object(map) => {
            if map.get("kind").is_some_and(|x| x.is_string()) {
                map.insert("K".into(), json!(k));
            }
            for (_, child) in map.iter_mut() {
                override_k(child, k);
            }
        }
        Value::Array(a) => a.iter_mut().for_each(|c| override_k(c, k)),
        _ => {}
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn parse_f64(s: &str) -> Res<f64> {
    s.trim().parse().map_err(|_| CliError::Input(format!("not a number: '{s}'")))
}

fn eval(ctx: &Ctx, target: Target, seq: &Option<PathBuf>, func: &Option<PathBuf>, points: &[String]) -> Res<(String, u8)> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let header: &[&str] = match target {
        Target::Omega => {
            let m = ctx.sequence(seq.as_ref().ok_or_else(|| CliError::Input("omega needs --seq".into()))?)?;
            for p in points {
                let t = parse_f64(p)?;
                rows.push(vec![t, omega_assoc(&m, t)?]);
            }
            &["t", "omega"]
        }
        Target::Lambda => {
            let m = ctx.sequence(seq.as_ref().ok_or_else(|| CliError::Input("lambda needs --seq".into()))?)?;
            for p in points {
                let t = parse_f64(p)?;
                let i = lambda_series(&m, t)?;
                rows.push(vec![t, i.lower.exp(), i.upper.exp()]);
            }
            &["t", "lambda_lower", "lambda_upper"]
        }
        Target::Young => {
            let w = ctx.weight_fn(seq, func)?;
            for p in points {
                let x = parse_f64(p)?;
                rows.push(vec![x, young_conjugate(&w, x)?]);
            }
            &["x", "phi_star"]
        }
        Target::Poisson => {
            let w = ctx.weight_fn(seq, func)?;
            for p in points {
                let (x, y) = p.split_once(':').ok_or_else(|| CliError::Input(format!("poisson points are x:y, got '{p}'")))?;
                let z = Complex64::new(parse_f64(x)?, parse_f64(y)?);
                let h = poisson(&w, z, ctx.tol)?;
                rows.push(vec![z.re, z.im, h.value, h.lower, h.upper]);
            }
            &["x", "y", "P", "P_lower", "P_upper"]
        }
        Target::Kappa => {
            let w = ctx.weight_fn(seq, func)?;
            for p in points {
                let r = parse_f64(p)?;
                let e = kappa(&w, r, ctx.tol)?;
                rows.push(vec![r, e.value, e.lower, e.upper]);
            }
            &["r", "kappa", "kappa_lower", "kappa_upper"]
        }
    };
    let out = match ctx.format {
        Format::Csv => {
            let mut s = header.join(",") + "\n";
            for r in &rows {
                let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            s.push_str(&ctx.footer());
            s
        }
        Format::Json => {
            let rows: Vec<Value> =
                rows.iter().map(|r| Value::Object(header.iter().zip(r).map(|(h, v)| (h.to_string(), json!(v))).collect())).collect();
            pretty(&ctx.envelope(json!({ "rows": rows })))
        }
    };
    Ok((out, 0))
}

fn is_matrix(v: &Value) -> bool {
    v.get("rows").is_some()
}

fn check(ctx: &Ctx, condition: &str, m: &Path, n: Option<&Path>, roumieu: bool) -> Res<ConditionReport> {
    let lower = condition.to_ascii_lowercase();
    if lower == "quasianalytic" {
        return Ok(quasianalytic_check(&ctx.sequence(m)?)?);
    }
    let n = n.ok_or_else(|| CliError::Input(format!("{condition} needs --n")))?;
    let relation = match lower.as_str() {
        "leq" => Some(Relation::Leq),
        "preceq" => Some(Relation::Preceq),
        "triangle" => Some(Relation::Triangle),
        "equivalent" => Some(Relation::Equivalent),
        _ => None,
    };
    if let Some(r) = relation {
        return Ok(relation_check(r, &ctx.sequence(m)?, &ctx.sequence(n)?)?);
    }
    match lower.as_str() {
        "mg" => return Ok(growth_index(GrowthIndex::Mg, &ctx.sequence(m)?, &ctx.sequence(n)?)?),
        "dc" => return Ok(growth_index(GrowthIndex::Dc, &ctx.sequence(m)?, &ctx.sequence(n)?)?),
        _ => {}
    }
    let kind: MixedKind = condition.parse()?;
    let mut spec = MixedConditionSpec::new(kind);
    spec.tol = ctx.tol;
    if is_matrix(&ctx.read(m)?) {
        let q = if roumieu { Quantifier::ForallXExistsY } else { Quantifier::ForallYExistsX };
        Ok(matrix_mixed_condition(&spec, &ctx.matrix(m)?, &ctx.matrix(n)?, q)?)
    } else {
        Ok(mixed_condition(&spec, &ctx.sequence(m)?, &ctx.sequence(n)?)?)
    }
}

fn harness(ctx: &Ctx, name: &str, s: &[f64], t: &[f64], conditions: &[String], cells: Option<&Path>) -> Res<String> {
    if name != "gevrey-grid" {
        return Err(CliError::Input(format!("unknown harness '{name}' (available: gevrey-grid)")));
    }
    let k = ctx.k.unwrap_or(2000);
    let mut csv = String::from("s,t,condition,verdict,holds_expected\n");
    if let Some(dir) = cells {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
    }
    for &si in s {
        for &ti in t {
            let m = WeightSequence::gevrey(si, k)?;
            let n = WeightSequence::gevrey(ti, k)?;
            for c in conditions {
                let mut spec = MixedConditionSpec::new(c.parse()?);
                spec.tol = ctx.tol;
                let r = mixed_condition(&spec, &m, &n)?;
                // Gevrey order criterion: every condition holds iff s <= t
                let expected = si <= ti;
                writeln!(csv, "{si},{ti},{},{},{expected}", r.condition, r.verdict.as_str()).expect("string write");
                if let Some(dir) = cells {
                    let path = dir.join(format!("{}_s{si}_t{ti}.json", r.condition));
                    write_atomic(&path, &pretty(&ctx.envelope(serde_json::to_value(&r).expect("report"))))?;
                }
            }
        }
    }
    csv.push_str(&ctx.footer());
    Ok(csv)
}

fn parse_function(spec: &str) -> Res<SampledFunction> {
    let (kind, rest) = spec.split_once(':').ok_or_else(|| CliError::Input(format!("function '{spec}' needs kind:params")))?;
    let nums: Vec<f64> = rest.split(',').map(parse_f64).collect::<Res<_>>()?;
    let scale = nums.get(1).copied().unwrap_or(1.0);
    Ok(match kind {
        "poly" => SampledFunction::polynomial(nums)?,
        "exp" => SampledFunction::Exp { rate: nums[0], scale },
        "gauss" => SampledFunction::Gaussian { a: nums[0], scale },
        _ => return Err(CliError::Input(format!("unknown function kind '{kind}'"))),
    })
}

fn parse_weight(spec: &str, k: usize) -> Res<WeightSequence> {
    match spec.split_once(':') {
        Some(("gevrey", s)) => Ok(WeightSequence::gevrey(parse_f64(s)?, k)?),
        Some(("qgevrey", q)) => Ok(WeightSequence::q_gevrey(parse_f64(q)?, k)?),
        _ => Err(CliError::Input(format!("unknown weight '{spec}' (gevrey:s or qgevrey:q)"))),
    }
}

fn mollify_cmd(ctx: &Ctx, f: &str, j: u32, k: f64, m: &str, grid: usize) -> Res<String> {
    let f = parse_function(f)?;
    let m = parse_weight(m, ctx.k.unwrap_or(64))?;
    let xs = linspace(-k, k, grid.max(2));
    let depth = match &f {
        SampledFunction::Polynomial { coeffs } => coeffs.len().saturating_sub(1).min(ultragrowth::entire::J_MAX),
        _ => 4,
    };
    let fj = mollify(&f, k, j, xs.clone(), depth, ctx.tol.min(1e-10))?;
    let exact = f.tabulate(xs.clone(), depth)?;
    let diff = exact.sub(&fj)?;
    let seminorm = frak_seminorm(&diff, &m, &xs, 0, 1.0)?;
    let summary = json!({
        "j": j,
        "interval": k,
        "weight": m.label(),
        "seminorm_error": seminorm,
        "f_j_at_0": fj.eval_real(0.0),
    });
    Ok(match ctx.format {
        Format::Json => pretty(&ctx.envelope(summary)),
        Format::Csv => {
            let mut s = String::from("x,f,f_j,abs_err\n");
            for &x in &xs {
                let (a, b) = (exact.eval_real(x), fj.eval_real(x));
                writeln!(s, "{x},{a},{b},{}", (a - b).abs()).expect("string write");
            }
            writeln!(s, "# summary: {summary}").expect("string write");
            s.push_str(&ctx.footer());
            s
        }
    })
}

fn report_cmd(ctx: &Ctx, files: &[PathBuf]) -> Res<(String, u8)> {
    if files.is_empty() {
        return Err(CliError::Input("report needs at least one file".into()));
    }
    let mut combined = Verdict::HoldsTrend;
    let mut rows = Vec::new();
    for f in files {
        let v = ctx.read(f)?;
        let r: ConditionReport = serde_json::from_value(v).map_err(|e| CliError::Input(format!("{}: {e}", f.display())))?;
        if r.schema != SCHEMA {
            return Err(CliError::Input(format!("{}: schema '{}' is not {SCHEMA}", f.display(), r.schema)));
        }
        combined = combined.and(r.verdict);
        rows.push((f.display().to_string(), r));
    }
    let out = match ctx.format {
        Format::Csv => {
            let mut s = String::from("file,condition,verdict,truncation\n");
            for (f, r) in &rows {
                writeln!(s, "{f},{},{},{}", r.condition, r.verdict.as_str(), r.truncation).expect("string write");
            }
            s.push_str(&ctx.footer());
            s
        }
        Format::Json => {
            let reports: Vec<Value> = rows.iter().map(|(f, r)| json!({ "file": f, "condition": r.condition, "verdict": r.verdict })).collect();
            pretty(&ctx.envelope(json!({ "verdict": combined, "reports": reports })))
        }
    };
    Ok((out, verdict_code(combined)))
}

fn write_atomic(path: &Path, body: &str) -> Res<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, body).and_then(|_| std::fs::rename(&tmp, path)).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Res<u8> {
    let name = match &cli.command {
        Command::Eval { .. } => "eval",
        Command::Check { .. } => "check",
        Command::Pipeline { .. } => "pipeline",
        Command::Harness { .. } => "harness",
        Command::Mollify { .. } => "mollify",
        Command::Report { .. } => "report",
    };
    let ctx = Ctx { k: cli.k, tol: cli.tol, format: cli.format, manifest: RefCell::new(RunManifest::new(name, cli.k, cli.tol)) };
    let (body, code) = match &cli.command {
        Command::Eval { target, seq, func, points } => eval(&ctx, *target, seq, func, points)?,
        Command::Check { condition, m, n, roumieu } => {
            let r = check(&ctx, condition, m, n.as_deref(), *roumieu)?;
            (ctx.report(&r), verdict_code(r.verdict))
        }
        Command::Pipeline { jet, mm, nn, policy } => {
            let lambda = make_jet(&ctx.load::<JetSpec>(jet)?)?;
            let (mm, nn) = (ctx.matrix(mm)?, ctx.matrix(nn)?);
            let policy = match policy {
                Policy::Strict => HorizonPolicy::Strict,
                Policy::Truncate => HorizonPolicy::Truncate,
            };
            let res = run_pipeline(&lambda, &mm, &nn, policy)?;
            let body = match ctx.format {
                Format::Json => {
                    let mut v = serde_json::to_value(&res).expect("pipeline serializes");
                    v["verdict"] = json!(res.verdict());
                    pretty(&ctx.envelope(v))
                }
                Format::Csv => {
                    let mut s = String::from("j,log_R,log_S,theta,theta_prime,eps\n");
                    for j in 1..=res.horizon {
                        writeln!(s, "{j},{},{},{},{},{}", res.log_r[j], res.log_s[j], res.theta.at(j), res.theta_prime.at(j), res.step2.eps[j - 1])
                            .expect("string write");
                    }
                    s.push_str(&ctx.footer());
                    s
                }
            };
            (body, verdict_code(res.verdict()))
        }
        Command::Harness { name, s, t, conditions, cells } => (harness(&ctx, name, s, t, conditions, cells.as_deref())?, 0),
        Command::Mollify { f, j, interval, m, grid } => (mollify_cmd(&ctx, f, *j, *interval, m, *grid)?, 0),
        Command::Report { files } => report_cmd(&ctx, files)?,
    };
    match &cli.out {
        Some(p) => write_atomic(p, &body)?,
        None => {
            use std::io::Write;
            // a closed pipe (`| head`) is not an error worth a panic
            let _ = std::io::stdout().write_all(body.as_bytes());
        }
    }
    Ok(code)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e:?}: {e}");
            ExitCode::from(4)
        }
    }
}
