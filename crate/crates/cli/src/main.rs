use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use twimo::arith::{sieve_mobius, sieve_von_mangoldt, Sieve};
use twimo::kloosterman::{bilinear_campaign, rows_to_csv, trilinear_campaign, weil_campaign, HeathBrown};
use twimo::mollifier::{conrey_coeffs, preset_two_piece, presets, trimmed_length, CoefficientTable};
use twimo::moments::{
    kappa_csv, kappa_lower_bound, main_term_i, main_term_limit, quadrature_i, EvalMode, KappaConfig, MainTermOptions,
    MomentReport, QuadratureControl, DEFAULT_JET_ORDER, DEFAULT_PAIR_BUDGET,
};
use twimo::special::afe_residual;
use twimo::{Error, ShiftPair};

const EXIT_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_DEGRADED: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "twimo", version, about = "Mollified twisted second moments of ζ")]
struct Cli {
    /// Worker threads (defaults to all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Master seed for randomized campaigns
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Pair budget for main-term double sums
    #[arg(long, global = true, default_value_t = DEFAULT_PAIR_BUDGET)]
    budget: u64,
    /// Also write the output to this file
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Exit with status 4 when any result is flagged as degraded
    #[arg(long, global = true)]
    strict: bool,
    /// key=value file merged under the explicit flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Main term and quadrature of the twisted second moment
    Moment(MomentArgs),
    /// Zero-proportion estimate from the mollified moment
    Kappa(KappaArgs),
    /// Weil certificates and bilinear/trilinear measurements
    Kloosterman(KloostermanArgs),
    /// Approximate functional equation residuals
    Afe(AfeArgs),
    /// Dump a mollifier coefficient table
    Mollifier(MollifierArgs),
    /// Arithmetic tables and the Heath-Brown identity check
    Arith(ArithArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum CoeffChoice {
    Unit,
    Conrey,
    Feng,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MomentMode {
    Jet,
    Pointwise,
    Limit,
    Quadrature,
}

#[derive(Args, Debug)]
struct MomentArgs {
    #[arg(long = "T")]
    t: f64,
    #[arg(long, value_enum, default_value_t = CoeffChoice::Unit)]
    coeffs: CoeffChoice,
    /// Coefficient file (`n a_n` per line); overrides --coeffs
    #[arg(long)]
    coeffs_file: Option<PathBuf>,
    /// Mollifier length exponent
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, value_enum, default_value_t = MomentMode::Jet)]
    mode: MomentMode,
    /// Also run the quadrature oracle and report the relative deviation
    #[arg(long)]
    compare: bool,
    #[arg(long, default_value_t = DEFAULT_JET_ORDER)]
    jet_order: usize,
}

#[derive(Args, Debug)]
struct KappaArgs {
    #[arg(long, default_value = "feng2011")]
    preset: String,
    /// Comma-separated heights
    #[arg(long = "T", value_delimiter = ',', required = true)]
    t: Vec<f64>,
    #[arg(long)]
    r: Option<f64>,
    /// Also report the trivial mollifier at each height
    #[arg(long)]
    trivial: bool,
    #[arg(long, default_value_t = DEFAULT_JET_ORDER)]
    jet_order: usize,
}

#[derive(Args, Debug)]
struct KloostermanArgs {
    /// Run the Weil certificate campaign
    #[arg(long)]
    weil: bool,
    #[arg(long, default_value_t = 2000)]
    cmax: u64,
    #[arg(long, default_value_t = 100)]
    exhaustive: u64,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Bilinear measurement with A = M = N = --size
    #[arg(long)]
    bilinear: bool,
    /// Trilinear measurement with A = B = N = V = --size
    #[arg(long)]
    trilinear: bool,
    #[arg(long, default_value_t = 64)]
    size: u64,
    #[arg(long, default_value_t = 1)]
    rho: u64,
    #[arg(long, default_value_t = 100)]
    trials: u64,
}

#[derive(Args, Debug)]
struct AfeArgs {
    /// Comma-separated heights
    #[arg(long = "t", value_delimiter = ',', required = true)]
    t: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long)]
    truncation: Option<u64>,
}

#[derive(Args, Debug)]
struct MollifierArgs {
    #[arg(long, value_enum, default_value_t = CoeffChoice::Feng)]
    kind: CoeffChoice,
    #[arg(long = "T")]
    t: f64,
    #[arg(long, default_value_t = presets::THETA1)]
    theta1: f64,
    #[arg(long, default_value_t = presets::THETA2)]
    theta2: f64,
    /// Exponent `σ₀ − 1/2` of the weight folded into the values
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    shift: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ArithFn {
    Mobius,
    VonMangoldt,
    Divisors,
    Phi,
}

#[derive(Args, Debug)]
struct ArithArgs {
    #[arg(long, value_enum, default_value_t = ArithFn::Mobius)]
    function: ArithFn,
    #[arg(long, default_value_t = 100)]
    limit: usize,
    /// Check the Heath-Brown identities for every n <= 2U instead
    #[arg(long)]
    heath_brown: Option<u64>,
}

/// A finished command: the text to emit and whether anything degraded.
struct Output {
    body: String,
    degraded: bool,
    failed: bool,
}

impl Output {
    fn ok(body: String) -> Self {
        Self { body, degraded: false, failed: false }
    }
}

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::InvalidResult(_) => EXIT_FAILED,
        _ => EXIT_INVALID,
    }
}

/// Splice `key=value` lines from the config file in as `--key value` flags
/// wherever the command line does not already set them.
fn merge_config(args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let path = match args[pos].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => args.get(pos + 1).cloned().ok_or("--config needs a path")?,
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let mut merged = args.clone();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected key=value", i + 1))?;
        let flag = format!("--{}", key.trim());
        let present = args.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if present {
            continue;
        }
        match value.trim() {
            "true" => merged.push(flag),
            "false" => {}
            v => merged.push(format!("{flag}={v}")),
        }
    }
    Ok(merged)
}

fn report_csv(reports: &[&MomentReport]) -> String {
    let mut out = String::from(
        "method,T,alpha,beta,N,K,value,zeta_plus,zeta_minus,pole_term,t_integral,imaginary,pair_count,residual,error_estimate,panel_count,degraded\n",
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{},{:?},{:?},{:?},{},{},{:?},{:?},{:?},{:?},{:?},{:?},{},{:?},{:?},{},{}",
            r.method.as_str(),
            r.t,
            r.alpha,
            r.beta,
            r.n,
            r.k,
            r.value,
            r.zeta_plus,
            r.zeta_minus,
            r.pole_term,
            r.t_integral,
            r.imaginary,
            r.pair_count,
            r.residual,
            r.error_estimate,
            r.panel_count,
            r.degraded
        );
    }
    out
}

fn render_reports(reports: &[&MomentReport], extra: &[(&str, String)], format: Format) -> Result<String, Error> {
    Ok(match format {
        Format::Text => {
            let blocks: Vec<String> = reports.iter().map(|r| r.to_key_value()).collect();
            let mut out = blocks.join("\n");
            for (k, v) in extra {
                let _ = writeln!(out, "{k}={v}");
            }
            out
        }
        Format::Csv => report_csv(reports),
        Format::Json => {
            let mut value = serde_json::json!({ "reports": reports });
            for (k, v) in extra {
                value[*k] = serde_json::Value::String(v.clone());
            }
            serde_json::to_string_pretty(&value).map_err(|e| Error::Io(e.to_string()))? + "\n"
        }
    })
}

fn moment_coeffs(args: &MomentArgs) -> Result<CoefficientTable, Error> {
    if let Some(path) = &args.coeffs_file {
        return CoefficientTable::load(path);
    }
    match args.coeffs {
        CoeffChoice::Unit => Ok(CoefficientTable::delta_one()),
        CoeffChoice::Conrey => conrey_coeffs(trimmed_length(args.t, args.theta), &presets::p1(), 0.0),
        CoeffChoice::Feng => preset_two_piece(args.t, args.theta, args.theta, 0.0),
    }
}

fn cmd_moment(cli: &Cli, args: &MomentArgs) -> Result<Output, Error> {
    if !(args.t.is_finite() && args.t > 0.0) {
        return Err(Error::InvalidArgument(format!("T = {} must be positive", args.t)));
    }
    let coeffs = moment_coeffs(args)?;
    let opts = MainTermOptions { jet_order: args.jet_order, pair_budget: cli.budget };
    let shifts = ShiftPair::at_height(args.alpha, args.beta, args.t)?;
    let main = match args.mode {
        MomentMode::Jet => main_term_i(&coeffs, &shifts, args.t, EvalMode::Jet, &opts)?,
        MomentMode::Pointwise => main_term_i(&coeffs, &shifts, args.t, EvalMode::Pointwise, &opts)?,
        MomentMode::Limit => main_term_limit(&coeffs, args.t, &opts)?,
        MomentMode::Quadrature => quadrature_i(&coeffs, &shifts, args.t, &QuadratureControl::default())?,
    };
    let mut reports = vec![main];
    let mut extra = Vec::new();
    if args.compare && args.mode != MomentMode::Quadrature {
        let quad = quadrature_i(&coeffs, &shifts, args.t, &QuadratureControl::default())?;
        extra.push(("relative_deviation", format!("{:?}", quad.relative_deviation(&reports[0]))));
        reports.push(quad);
    }
    let degraded = reports.iter().any(|r| r.degraded);
    let refs: Vec<&MomentReport> = reports.iter().collect();
    Ok(Output { body: render_reports(&refs, &extra, cli.format)?, degraded, failed: false })
}

fn cmd_kappa(cli: &Cli, args: &KappaArgs) -> Result<Output, Error> {
    if args.preset != "feng2011" {
        return Err(Error::InvalidArgument(format!("unknown preset {:?}", args.preset)));
    }
    let opts = MainTermOptions { jet_order: args.jet_order, pair_budget: cli.budget };
    let mut rows = Vec::new();
    let mut trivial = Vec::new();
    for &t in &args.t {
        let mut config = KappaConfig::feng2011(t);
        if let Some(r) = args.r {
            config.r = r;
        }
        config.options = opts;
        rows.push(kappa_lower_bound(&config)?);
        if args.trivial {
            let mut base = KappaConfig::trivial(config.r, t);
            base.options = opts;
            trivial.push(kappa_lower_bound(&base)?);
        }
    }
    let body = match cli.format {
        Format::Json => {
            let value = serde_json::json!({ "mollified": rows, "trivial": trivial });
            serde_json::to_string_pretty(&value).map_err(|e| Error::Io(e.to_string()))? + "\n"
        }
        _ => {
            let mut out = kappa_csv(&rows);
            if !trivial.is_empty() {
                out.push('\n');
                out.push_str(&kappa_csv(&trivial));
            }
            out
        }
    };
    Ok(Output::ok(body))
}

fn cmd_kloosterman(cli: &Cli, args: &KloostermanArgs) -> Result<Output, Error> {
    if !(args.weil || args.bilinear || args.trilinear) {
        return Err(Error::InvalidArgument("choose at least one of --weil, --bilinear, --trilinear".into()));
    }
    let mut out = String::new();
    let mut failed = false;
    if args.weil {
        let summary = weil_campaign(args.exhaustive.min(args.cmax), args.cmax, args.samples, cli.seed)?;
        failed = !summary.passed();
        out.push_str("checked,failures,max_ratio\n");
        let _ = writeln!(out, "{},{},{:?}", summary.checked, summary.failures.len(), summary.max_ratio);
        for f in &summary.failures {
            let _ = writeln!(out, "# failure a={} b={} c={} |S|={:?} bound={:?}", f.a, f.b, f.c, f.value.norm(), f.weil_bound);
        }
    }
    if args.bilinear {
        let n = args.size;
        out.push_str(&rows_to_csv(&bilinear_campaign(n, n, n, args.trials, cli.seed)?));
    }
    if args.trilinear {
        let n = args.size as usize;
        out.push_str(&rows_to_csv(&trilinear_campaign(n, n, n, n, args.rho, args.trials, cli.seed)?));
    }
    Ok(Output { body: out, degraded: false, failed })
}

fn cmd_afe(args: &AfeArgs) -> Result<Output, Error> {
    let mut out = String::from("t,alpha,beta,truncation,lhs_re,lhs_im,rhs_re,rhs_im,residual,relative\n");
    for &t in &args.t {
        let shifts = ShiftPair::at_height(args.alpha, args.beta, t)?;
        let r = afe_residual(t, &shifts, args.truncation)?;
        let _ = writeln!(
            out,
            "{:?},{:?},{:?},{},{:?},{:?},{:?},{:?},{:?},{:?}",
            r.t, r.alpha, r.beta, r.truncation, r.lhs.re, r.lhs.im, r.rhs.re, r.rhs.im, r.residual, r.relative
        );
    }
    Ok(Output::ok(out))
}

fn cmd_mollifier(args: &MollifierArgs) -> Result<Output, Error> {
    let table = match args.kind {
        CoeffChoice::Unit => CoefficientTable::delta_one(),
        CoeffChoice::Conrey => conrey_coeffs(trimmed_length(args.t, args.theta1), &presets::p1(), args.shift)?,
        CoeffChoice::Feng => preset_two_piece(args.t, args.theta1, args.theta2, args.shift)?,
    };
    let mut out = String::from("n,a_n\n");
    for (i, a) in table.values().iter().enumerate() {
        let _ = writeln!(out, "{},{:?}", i + 1, a);
    }
    Ok(Output::ok(out))
}

fn cmd_arith(args: &ArithArgs) -> Result<Output, Error> {
    if let Some(u) = args.heath_brown {
        let hb = HeathBrown::new(u)?;
        let sieve = Sieve::new(2 * u as usize)?;
        let mut out = String::from("n,mu,hb_mu,lambda,hb_lambda\n");
        let mut failed = false;
        for n in 1..=2 * u {
            let (mu, lam) = (sieve.mobius(n as usize) as f64, sieve.von_mangoldt(n as usize));
            let (hm, hl) = (hb.mu(n)?, hb.lambda(n)?);
            failed |= (mu - hm).abs() > 1e-9 || (lam - hl).abs() > 1e-9;
            let _ = writeln!(out, "{n},{mu},{hm:?},{lam:?},{hl:?}");
        }
        return Ok(Output { body: out, degraded: false, failed });
    }
    let mut out = String::from("n,value\n");
    let sieve = Sieve::new(args.limit)?;
    let values: Vec<f64> = match args.function {
        ArithFn::Mobius => sieve_mobius(args.limit)?.values().to_vec(),
        ArithFn::VonMangoldt => sieve_von_mangoldt(args.limit)?.values().to_vec(),
        ArithFn::Divisors => (1..=args.limit).map(|n| sieve.divisor_count(n) as f64).collect(),
        ArithFn::Phi => (1..=args.limit).map(|n| sieve.euler_phi(n) as f64).collect(),
    };
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{},{:?}", i + 1, v);
    }
    Ok(Output::ok(out))
}

fn write_out(path: &Path, body: &str) -> Result<(), Error> {
    std::fs::write(path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<Output, Error> {
    match &cli.command {
        Command::Moment(a) => cmd_moment(cli, a),
        Command::Kappa(a) => cmd_kappa(cli, a),
        Command::Kloosterman(a) => cmd_kloosterman(cli, a),
        Command::Afe(a) => cmd_afe(a),
        Command::Mollifier(a) => cmd_mollifier(a),
        Command::Arith(a) => cmd_arith(a),
    }
}

fn main() -> ExitCode {
    let args = match merge_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("error: cannot start {n} worker threads");
            return ExitCode::from(EXIT_INVALID);
        }
    }
    let output = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_for(&e));
        }
    };
    print!("{}", output.body);
    if let Some(path) = &cli.out {
        if let Err(e) = write_out(path, &output.body) {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    }
    if output.failed {
        return ExitCode::from(EXIT_FAILED);
    }
    if cli.strict && output.degraded {
        eprintln!("error: degraded precision under --strict");
        return ExitCode::from(EXIT_DEGRADED);
    }
    ExitCode::SUCCESS
}
