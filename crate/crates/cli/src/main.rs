use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use accessred::formats::{self, CurveRow, ScatterRow};
use accessred::parallel;
use accessred_core::approx::{self, ApproxProtocol, KsvdConfig, KsvdInit};
use accessred_core::bounds::{self, BoundCurve};
use accessred_core::construct::{self, BlockSpec};
use accessred_core::covering::{self, CoveringCode};
use accessred_core::verify::min_access_for_m;
use accessred_core::{Error as CoreError, Protocol, DEFAULT_TOL};
use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Build, verify and bound access-redundancy protocols for ±1 linear computation.
#[derive(Parser)]
#[command(name = "accessred", version)]
struct Cli {
    /// Worker threads for verification (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a protocol and write it as JSON.
    Construct(ConstructArgs),
    /// Check a protocol file against every sign vector.
    Verify(VerifyArgs),
    /// Export one lower-bound curve as CSV.
    Bounds(BoundsArgs),
    /// Build an approximate protocol and report its error.
    Approx(ApproxArgs),
    /// Export bound curves and construction points for the rate-region plot.
    Region(RegionArgs),
    /// Build or check a covering design.
    Design(DesignArgs),
    /// Build a complement-closed covering code.
    Code(CodeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructType {
    /// Systematic nodes plus one parity node (needs --k).
    Trivial,
    /// One node per antipodal class (needs --k0).
    Nonsystematic,
    /// Systematic nodes plus a covering code (--code, or --k0 with optional --radius).
    Covering,
    /// Arbitrary block matrix (--matrix, optional --ell0).
    Custom,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long = "type", value_enum)]
    kind: ConstructType,
    /// Data length for the parity protocol.
    #[arg(long)]
    k: Option<usize>,
    /// Block length.
    #[arg(long)]
    k0: Option<usize>,
    /// Number of blocks.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Block matrix file (`rows cols` header, then rows).
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Access per block for --type custom (default: the smallest that works).
    #[arg(long)]
    ell0: Option<usize>,
    /// Code file, one sign string per line.
    #[arg(long)]
    code: Option<PathBuf>,
    /// Radius for a greedy code when no --code is given (default: repetition code).
    #[arg(long)]
    radius: Option<usize>,
    /// Output file (default: stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Protocol JSON file.
    protocol: PathBuf,
    /// Absolute tolerance on each reconstructed coordinate.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveKind {
    /// Union bound in the large-k limit.
    Thm1,
    /// Covering-design bound at finite k (see --k).
    Thm2,
    /// Entropy bound H(lambda/nu) >= 1/nu.
    Cor1,
    /// Block-construction bound for one k0 (dots).
    Block,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, value_enum)]
    curve: CurveKind,
    /// Block length for --curve block.
    #[arg(long)]
    k0: Option<usize>,
    /// Largest block width scanned for --curve block.
    #[arg(long, default_value_t = 64)]
    n0_max: usize,
    /// Data length for --curve thm2.
    #[arg(long, default_value_t = 200)]
    k: usize,
    /// Redundancy grid NU_MIN:NU_MAX:STEP.
    #[arg(long, default_value = "1:3:0.1")]
    grid: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    /// Covering code with b uncorrected positions per block.
    Covering,
    /// Covering code, codeword nodes only.
    Codeonly,
    /// Drop the last floor(eps*m) blocks of an exact block scheme.
    Discard,
    /// Dictionary learning.
    Ksvd,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Auto,
    Classes,
    Columns,
}

#[derive(Args)]
struct ApproxArgs {
    #[arg(long, value_enum)]
    method: Method,
    /// Code file for covering/codeonly.
    #[arg(long)]
    code: Option<PathBuf>,
    /// Block length for covering/codeonly without --code.
    #[arg(long, default_value_t = 5)]
    k0: usize,
    /// Greedy code radius for covering/codeonly without --code (default: repetition code).
    #[arg(long)]
    radius: Option<usize>,
    /// Uncorrected positions per block.
    #[arg(long, default_value_t = 1)]
    b: usize,
    /// Fraction of blocks to discard.
    #[arg(long)]
    eps: Option<f64>,
    /// Number of blocks.
    #[arg(long)]
    m: Option<usize>,
    /// Block matrix for discard (default: the built-in 5x6 matrix).
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Access per block for --matrix (default: the smallest that works).
    #[arg(long)]
    ell0: Option<usize>,
    /// Data length for ksvd.
    #[arg(long)]
    k: Option<usize>,
    /// Number of nodes for ksvd.
    #[arg(long)]
    n: Option<usize>,
    /// Access for ksvd.
    #[arg(long)]
    ell: Option<usize>,
    /// K-SVD rounds.
    #[arg(long, default_value_t = 30)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "auto")]
    init: InitArg,
    /// Protocol JSON output.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// CSV file with one `label,nu,lambda,epsilon` row for the scatter plot.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct RegionArgs {
    /// Include construction points and block-bound dots as well as the curves.
    #[arg(long)]
    all: bool,
    #[arg(long, default_value = "1:3:0.1")]
    grid: String,
    /// Data length for the finite covering-design curve.
    #[arg(long, default_value_t = 200)]
    k: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DesignArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    ell: Option<usize>,
    /// Check an existing design file instead of building one.
    #[arg(long)]
    check: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CodeArgs {
    #[arg(long)]
    k0: usize,
    #[arg(long)]
    radius: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Verification failed: exit status 1 rather than 2.
#[derive(Debug)]
struct Failed;

impl std::fmt::Display for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("verification failed")
    }
}

impl std::error::Error for Failed {}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::write(p, content).with_context(|| format!("cannot write {}", p.display()))
        }
        _ => stdout(content),
    }
}

/// Writes to stdout; a closed pipe (`accessred ... | head`) is not an error.
fn stdout(content: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(content.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    stdout(&s)
}

fn need<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| anyhow!("missing {flag}"))
}

fn load_code(file: Option<&Path>, k0: Option<usize>, radius: Option<usize>) -> Result<CoveringCode> {
    if let Some(path) = file {
        return formats::parse_code(&read(path)?);
    }
    let k0 = need(k0, "--k0 (or --code)")?;
    Ok(match radius {
        Some(r) => covering::greedy_covering_code(k0, r)?,
        None => CoveringCode::repetition(k0)?,
    })
}

fn load_block(matrix: Option<&Path>, ell0: Option<usize>) -> Result<BlockSpec> {
    let (m, default_ell0) = match matrix {
        Some(path) => (formats::parse_matrix(&read(path)?)?, None),
        None => (construct::shifted_diagonal_5x6(), Some(2)),
    };
    let ell0 = match ell0.or(default_ell0) {
        Some(l) => l,
        None => min_access_for_m(&m)?,
    };
    Ok(construct::custom_block(m, ell0)?)
}

fn construct(args: &ConstructArgs) -> Result<()> {
    let protocol = match args.kind {
        ConstructType::Trivial => construct::trivial_protocol(need(args.k, "--k")?)?,
        ConstructType::Nonsystematic => {
            let spec = construct::nonsystematic_block(need(args.k0, "--k0")?)?;
            construct::expand_blocks(&spec, args.m)?
        }
        ConstructType::Covering => {
            let code = load_code(args.code.as_deref(), args.k0, args.radius)?;
            construct::expand_blocks(&construct::covering_code_block(&code)?, args.m)?
        }
        ConstructType::Custom => {
            let path = need(args.matrix.as_deref(), "--matrix")?;
            let spec = load_block(Some(path), args.ell0)?;
            construct::expand_blocks(&spec, args.m)?
        }
    };
    eprintln!("{}", formats::describe(&protocol));
    emit(args.output.as_deref(), &formats::format_protocol(&protocol)?)
}

#[derive(Serialize)]
struct VerifyReport {
    ok: bool,
    mode: parallel::Mode,
    k: usize,
    n: usize,
    ell: usize,
    checked: u64,
    max_access: usize,
    max_residual: f64,
    witness: Option<String>,
}

fn verify(args: &VerifyArgs) -> Result<()> {
    let file = formats::parse_protocol(&read(&args.protocol)?)?;
    let (k, n, ell) = (file.k, file.n, file.ell);
    let protocol = match file.into_protocol()? {
        Ok(p) => Some(p),
        Err(encoder) => {
            eprintln!("no decoder stored; searching for one with access {ell}");
            match construct::custom_block(encoder, ell) {
                Ok(spec) => Some(construct::expand_blocks(&spec, 1)?),
                Err(CoreError::NotCovered { witness, .. }) => {
                    let report = VerifyReport {
                        ok: false,
                        mode: parallel::Mode::Exhaustive,
                        k,
                        n,
                        ell,
                        checked: witness.bits() + 1,
                        max_access: ell + 1,
                        max_residual: 1.0,
                        witness: Some(witness.to_string()),
                    };
                    print_json(&report)?;
                    return Err(Failed.into());
                }
                Err(e) => return Err(e.into()),
            }
        }
    };
    let protocol = protocol.expect("set above");
    let (mode, r) = parallel::verify(&protocol, args.tol)?;
    let report = VerifyReport {
        ok: r.ok,
        mode,
        k,
        n,
        ell,
        checked: r.checked,
        max_access: r.max_access,
        max_residual: formats::sig12(r.max_residual),
        witness: r.witness.map(|w| w.to_string()),
    };
    print_json(&report)?;
    if report.ok {
        Ok(())
    } else {
        Err(Failed.into())
    }
}

fn bound_curve(kind: CurveKind, grid: &[f64], args: &BoundsArgs) -> Result<BoundCurve> {
    Ok(match kind {
        CurveKind::Thm1 => bounds::thm1_curve(grid)?,
        CurveKind::Thm2 => bounds::thm2_curve(grid, args.k)?,
        CurveKind::Cor1 => bounds::cor1_curve(grid)?,
        CurveKind::Block => bounds::block_bound_curve(need(args.k0, "--k0")?, args.n0_max),
    })
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(str::parse)
        .collect::<Result<_, _>>()
        .with_context(|| format!("bad grid {spec:?}"))?;
    let [min, max, step] = parts[..] else {
        bail!("grid must be NU_MIN:NU_MAX:STEP, got {spec:?}");
    };
    Ok(bounds::grid(min, max, step)?)
}

fn bounds_cmd(args: &BoundsArgs) -> Result<()> {
    let grid = parse_grid(&args.grid)?;
    let curve = bound_curve(args.curve, &grid, args)?;
    let rows = formats::curve_rows(&[curve], &[]);
    emit(args.output.as_deref(), &formats::format_curves(&rows)?)
}

#[derive(Serialize)]
struct ApproxReport {
    method: &'static str,
    k: usize,
    n: usize,
    ell: usize,
    nu: f64,
    lambda: f64,
    epsilon_bound: Option<f64>,
    epsilon_measured: Option<f64>,
}

fn approx_cmd(args: &ApproxArgs) -> Result<()> {
    let (name, built): (&'static str, ApproxProtocol) = match args.method {
        Method::Covering => {
            let code = load_code(args.code.as_deref(), Some(args.k0), args.radius)?;
            let one = approx::approx_covering(&code, args.b)?;
            ("covering", one.repeat(args.m.unwrap_or(1))?)
        }
        Method::Codeonly => {
            let code = load_code(args.code.as_deref(), Some(args.k0), args.radius)?;
            let one = approx::approx_covering_codeonly(&code)?;
            ("codeonly", one.repeat(args.m.unwrap_or(1))?)
        }
        Method::Discard => {
            let spec = load_block(args.matrix.as_deref(), args.ell0)?;
            let eps = need(args.eps, "--eps")?;
            ("discard", approx::discard_blocks(&spec, eps, args.m.unwrap_or(10))?)
        }
        Method::Ksvd => {
            let mut cfg = KsvdConfig::new(
                need(args.k, "--k")?,
                need(args.n, "--n")?,
                need(args.ell, "--ell")?,
                args.iters,
                args.seed,
            );
            cfg.init = match args.init {
                InitArg::Auto => KsvdInit::Auto,
                InitArg::Classes => KsvdInit::AntipodalClasses,
                InitArg::Columns => KsvdInit::Columns,
            };
            let out = approx::ksvd(&cfg)?;
            let p = out.protocol;
            let report = approx_report("ksvd", &p, None, Some(out.epsilon_measured))?;
            return finish_approx(args, &p, report);
        }
    };
    let report = approx_report(name, &built.protocol, Some(built.epsilon_bound), built.epsilon_measured)?;
    finish_approx(args, &built.protocol, report)
}

fn approx_report(
    method: &'static str,
    p: &Protocol,
    bound: Option<f64>,
    measured: Option<f64>,
) -> Result<ApproxReport> {
    let rp = p.rate_point()?;
    Ok(ApproxReport {
        method,
        k: p.k(),
        n: p.n(),
        ell: p.ell(),
        nu: formats::sig12(rp.nu),
        lambda: formats::sig12(rp.lambda),
        epsilon_bound: bound.map(formats::sig12),
        epsilon_measured: measured.map(formats::sig12),
    })
}

fn finish_approx(args: &ApproxArgs, p: &Protocol, report: ApproxReport) -> Result<()> {
    if let Some(path) = &args.output {
        emit(Some(path), &formats::format_protocol(p)?)?;
    }
    if let Some(path) = &args.csv {
        let row = ScatterRow {
            label: report.method.to_string(),
            nu: report.nu,
            lambda: report.lambda,
            epsilon: report.epsilon_measured.or(report.epsilon_bound).unwrap_or(f64::NAN),
        };
        emit(Some(path), &formats::format_scatter(&[row])?)?;
    }
    print_json(&report)?;
    Ok(())
}

fn construction_points() -> Result<Vec<(String, f64, f64)>> {
    let mut points = Vec::new();
    for k0 in 2..=6 {
        let rp = construct::nonsystematic_block(k0)?.rate_point()?;
        points.push((format!("nonsystematic_k0_{k0}"), rp.nu, rp.lambda));
    }
    let rp = construct::custom_block(construct::shifted_diagonal_5x6(), 2)?.rate_point()?;
    points.push(("shifted_diagonal_5x6".into(), rp.nu, rp.lambda));
    for k0 in [3, 5, 7] {
        let rp = construct::covering_code_block(&CoveringCode::repetition(k0)?)?.rate_point()?;
        points.push((format!("covering_repetition_k0_{k0}"), rp.nu, rp.lambda));
    }
    Ok(points)
}

fn region_cmd(args: &RegionArgs) -> Result<()> {
    let grid = parse_grid(&args.grid)?;
    let mut curves = vec![
        bounds::cor1_curve(&grid)?,
        bounds::thm1_curve(&grid)?,
        bounds::thm2_curve(&grid, args.k)?,
    ];
    let mut points = Vec::new();
    if args.all {
        curves.extend([4, 5, 6].map(|k0| bounds::block_bound_curve(k0, 64)));
        points = construction_points()?;
    }
    let rows: Vec<CurveRow> = formats::curve_rows(&curves, &points);
    emit(args.output.as_deref(), &formats::format_curves(&rows)?)
}

fn design_cmd(args: &DesignArgs) -> Result<()> {
    if let Some(path) = &args.check {
        let d = formats::parse_design(&read(path)?)?;
        let ok = d.is_covering();
        print_json(&serde_json::json!({
            "ok": ok,
            "blocks": d.len(),
            "bound": formats::sig12(covering::erdos_spencer_bound(d.n(), d.t(), d.ell())),
        }))?;
        return if ok { Ok(()) } else { Err(Failed.into()) };
    }
    let d = covering::greedy_covering_design(need(args.n, "--n")?, need(args.t, "--t")?, need(args.ell, "--ell")?)?;
    eprintln!("{} blocks", d.len());
    emit(args.output.as_deref(), &formats::format_design(&d))
}

fn code_cmd(args: &CodeArgs) -> Result<()> {
    let code = covering::greedy_covering_code(args.k0, args.radius)?;
    eprintln!("{} words, radius {}", code.len(), code.radius());
    emit(args.output.as_deref(), &formats::format_code(&code))
}

fn run(cli: &Cli) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .context("cannot start thread pool")?;
    match &cli.command {
        Command::Construct(a) => construct(a),
        Command::Verify(a) => verify(a),
        Command::Bounds(a) => bounds_cmd(a),
        Command::Approx(a) => approx_cmd(a),
        Command::Region(a) => region_cmd(a),
        Command::Design(a) => design_cmd(a),
        Command::Code(a) => code_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Failed>() => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
