//! Command-line front end. Flags override values from `--config`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::grid::{make_grid, Grid, GridSpec};
use crate::harness::acceptance::Suite;
use crate::harness::config::{Method, Normalization, RunConfig};
use crate::harness::io::{read_json, read_sinogram, write_json, write_sinogram, write_volume, PhantomFile, Transform};
use crate::harness::phantom::Phantom;
use crate::harness::report::ValidationReport;
use crate::invert_ac::{invert_ac, AcOptions};
use crate::invert_hs::{invert_hypersingular, HypersingularOptions};
use crate::invert_john::{invert, JohnOptions};
use crate::invert_svd::{reconstruct, svd_table, SvdOptions};
use crate::specfun::{formula_constants, SvdIndex};
use crate::xform::{vslice_forward, vslice_full};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "vslice", version, about = "Vertical slice transform on the unit sphere")]
struct Cli {
    /// JSON run configuration; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (overrides VSLICE_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a phantom and write its slice data.
    Forward(ForwardArgs),
    /// Write a phantom description as JSON.
    Phantom(PhantomArgs),
    /// Reconstruct from slice data.
    Invert(InvertArgs),
    /// Print (m, mu, k, c_nu, d_nu, s_nu) as CSV.
    SvdTable(SvdTableArgs),
    /// Print the inversion constants for a dimension as JSON.
    Constants(ConstantsArgs),
    /// Run the acceptance criteria.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
struct PhantomSelect {
    /// even_constant, axial_power, basis, bump, random_basis, or a phantom JSON file.
    #[arg(long)]
    phantom: Option<String>,
    /// Exponent for axial_power.
    #[arg(long)]
    power: Option<f64>,
    /// Index m,mu,k for basis.
    #[arg(long)]
    nu: Option<String>,
    /// Band for random_basis.
    #[arg(long)]
    phantom_band: Option<usize>,
    /// Seed for random_basis.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct GridSelect {
    #[arg(long)]
    n: Option<usize>,
    /// `default` or a GridSpec JSON file.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Debug, Args)]
struct ForwardArgs {
    #[command(flatten)]
    phantom: PhantomSelect,
    #[command(flatten)]
    grid: GridSelect,
    /// Write the full transform V = 2V₊ instead of V₊.
    #[arg(long)]
    full: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PhantomArgs {
    #[command(flatten)]
    phantom: PhantomSelect,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InvertArgs {
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Input slice data (.vsl).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Phantom JSON to validate against.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Validation report destination; printed to stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Reconstructed volume (.vsv).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 1 when rel_l2 exceeds this value.
    #[arg(long)]
    max_error: Option<f64>,
    /// SVD band: m + 2k <= band.
    #[arg(long)]
    band: Option<usize>,
    /// SVD weight parameter; defaults to the grid's.
    #[arg(long)]
    lambda: Option<f64>,
    /// Skip the SVD ill-conditioning guard.
    #[arg(long)]
    force: bool,
    /// Hypersingular inner truncation radius.
    #[arg(long)]
    eps: Option<f64>,
    /// Hypersingular outer truncation radius.
    #[arg(long = "rmax")]
    r_max: Option<f64>,
    /// Finite-difference order of the hypersingular integral.
    #[arg(long)]
    ell: Option<usize>,
    /// Constant used by the n = 2 John formula.
    #[arg(long, value_enum)]
    normalization: Option<Normalization>,
    /// Cartesian nodes per axis for the Laplacian.
    #[arg(long)]
    cartesian_nodes: Option<usize>,
}

#[derive(Debug, Args)]
struct SvdTableArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    band: Option<usize>,
}

#[derive(Debug, Args)]
struct ConstantsArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    ell: Option<usize>,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    /// Run only these criteria (1-12).
    #[arg(long, value_delimiter = ',')]
    only: Vec<u8>,
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit status.
pub fn cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let parsed = match Cli::try_parse_from(argv) {
        Ok(parsed) => parsed,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(parsed) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Status for a failed command: 1 when the data defeats the method, 2 for
/// bad input.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::IllConditioned { .. } | Error::Degenerate(_) => EXIT_VALIDATION,
        _ => EXIT_USAGE,
    }
}

fn execute(parsed: Cli) -> Result<i32> {
    let config = match &parsed.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    configure_threads(parsed.threads.or(config.threads))?;
    match parsed.command {
        Command::Forward(args) => forward(args, &config),
        Command::Phantom(args) => phantom(args, &config),
        Command::Invert(args) => invert_command(args, &config),
        Command::SvdTable(args) => table(args, &config),
        Command::Constants(args) => constants(args, &config),
        Command::Selftest(args) => selftest(args),
    }
}

fn configure_threads(requested: Option<usize>) -> Result<()> {
    let from_env = match std::env::var("VSLICE_THREADS") {
        Ok(text) => Some(
            text.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parameter(format!("VSLICE_THREADS = {text:?} is not a thread count")))?,
        ),
        Err(_) => None,
    };
    if let Some(threads) = requested.or(from_env) {
        if threads == 0 {
            return Err(Error::Parameter("thread count must be positive".into()));
        }
        // a pool installed earlier in the same process stays in place
        if rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().is_err() {
            log::warn!("thread pool already initialized; ignoring thread count {threads}");
        }
    }
    Ok(())
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| Error::Parameter(format!("missing --{flag}")))
}

fn parse_index(text: &str) -> Result<SvdIndex> {
    let parts: Vec<usize> = text
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parameter(format!("index {text:?} is not m,mu,k")))?;
    match parts[..] {
        [m, mu, k] => Ok(SvdIndex::new(m, mu, k)),
        _ => Err(Error::Parameter(format!("index {text:?} is not m,mu,k"))),
    }
}

fn load_phantom_file(path: &Path) -> Result<PhantomFile> {
    let file: PhantomFile = read_json(path)?;
    file.check_version()?;
    Ok(file)
}

/// Resolves the phantom and its dimension from flags, then the config.
fn select_phantom(select: &PhantomSelect, n: Option<usize>, config: &RunConfig) -> Result<(Phantom, usize)> {
    let n = n.or(config.n);
    let Some(kind) = &select.phantom else {
        let phantom = required(config.phantom.clone(), "phantom")?;
        return Ok((phantom, required(n, "n")?));
    };
    let lambda_for = |n: usize| config.lambda.unwrap_or(n as f64 / 2.0);
    let phantom = match kind.as_str() {
        "even_constant" => Phantom::EvenConstant,
        "axial_power" => Phantom::AxialPower { power: required(select.power, "power")? },
        "basis" => Phantom::Basis {
            nu: parse_index(&required(select.nu.clone(), "nu")?)?,
            lambda: lambda_for(required(n, "n")?),
        },
        "bump" => Phantom::default_bump(required(n, "n")?),
        "random_basis" => Phantom::RandomBasis {
            band: required(select.phantom_band, "phantom-band")?,
            lambda: lambda_for(required(n, "n")?),
            seed: select.seed.unwrap_or(0),
        },
        path => {
            let file = load_phantom_file(Path::new(path))?;
            if let Some(n) = n {
                if n != file.n {
                    return Err(Error::Parameter(format!("phantom file is for n = {}, not {n}", file.n)));
                }
            }
            return Ok((file.phantom, file.n));
        }
    };
    Ok((phantom, required(n, "n")?))
}

fn select_grid(select: &GridSelect, n: usize, config: &RunConfig) -> Result<Arc<Grid>> {
    let mut spec = match (select.grid.as_deref(), &config.grid) {
        (Some("default"), _) | (None, None) => GridSpec::default_for(n)?,
        (Some(path), _) => read_json::<GridSpec>(Path::new(path))?,
        (None, Some(spec)) => spec.clone(),
    };
    if spec.n != n {
        return Err(Error::InvalidSpec(format!("grid is for n = {}, phantom for n = {n}", spec.n)));
    }
    if let Some(lambda) = select.lambda.or(config.lambda) {
        spec = spec.with_lambda(lambda);
    }
    make_grid(&spec)
}

fn forward(args: ForwardArgs, config: &RunConfig) -> Result<i32> {
    let out = required(args.out.or(config.out.clone()), "out")?;
    let (phantom, n) = select_phantom(&args.phantom, args.grid.n, config)?;
    let grid = select_grid(&args.grid, n, config)?;
    let field = phantom.field(n)?;
    let full = args.full || config.full.unwrap_or(false);
    let (data, transform) = if full {
        (vslice_full(&field, &grid), Transform::Full)
    } else {
        (vslice_forward(&field, &grid), Transform::Hemispherical)
    };
    write_sinogram(&out, &data, transform)?;
    Ok(EXIT_OK)
}

fn phantom(args: PhantomArgs, config: &RunConfig) -> Result<i32> {
    let out = required(args.out.or(config.out.clone()), "out")?;
    let (phantom, n) = select_phantom(&args.phantom, args.n, config)?;
    phantom.field(n)?;
    write_json(&out, &PhantomFile::new(n, phantom))?;
    Ok(EXIT_OK)
}

fn invert_command(args: InvertArgs, config: &RunConfig) -> Result<i32> {
    let method = required(args.method.or(config.method), "method")?;
    let input = required(args.input.or(config.input.clone()), "in")?;
    let truth_path = args.truth.or(config.truth.clone());
    let report_path = args.report.or(config.report.clone());
    let out = args.out.or(config.out.clone());
    let max_error = args.max_error.or(config.max_error);
    let truth = truth_path.as_deref().map(load_phantom_file).transpose()?;
    if truth.is_none() && (report_path.is_some() || max_error.is_some()) {
        return Err(Error::Parameter("--report and --max-error need --truth".into()));
    }

    let (data, transform) = read_sinogram(&input)?;
    let grid = data.grid().clone();
    let n = grid.n();
    if let Some(file) = &truth {
        if file.n != n {
            return Err(Error::Parameter(format!("truth is for n = {}, data for n = {n}", file.n)));
        }
    }
    // John, hypersingular and SVD act on V₊; analytic continuation on V = 2V₊
    let hemispherical = match transform {
        Transform::Hemispherical => data.clone(),
        Transform::Full => data.scaled(0.5),
    };
    let cartesian_nodes = args.cartesian_nodes.or(config.cartesian_nodes);

    let start = Instant::now();
    let rec = match method {
        Method::John => {
            let mut options = JohnOptions::default_for(n);
            if let Some(nodes) = cartesian_nodes {
                options.cartesian_nodes = nodes;
            }
            if let Some(norm) = args.normalization.or(config.normalization) {
                options.even_normalization = norm.into();
            }
            invert(&hemispherical, &options)?
        }
        Method::Hs => {
            let mut options = HypersingularOptions::default();
            if let Some(nodes) = cartesian_nodes {
                options.cartesian_nodes = nodes;
            }
            if let Some(eps) = args.eps.or(config.eps) {
                options.eps = Some(eps);
            }
            if let Some(r_max) = args.r_max.or(config.r_max) {
                options.r_max = r_max;
            }
            if let Some(ell) = args.ell.or(config.ell) {
                options.ell = ell;
            }
            invert_hypersingular(&hemispherical, &options)?
        }
        Method::Svd => {
            let band = required(args.band.or(config.band), "band")?;
            let lambda = args.lambda.or(config.lambda).unwrap_or(grid.lambda());
            let options = SvdOptions { force: args.force || config.force.unwrap_or(false), ..Default::default() };
            reconstruct(&hemispherical, lambda, band, options)?
        }
        Method::Ac => {
            let mut options = AcOptions::default_for(n);
            if let Some(nodes) = cartesian_nodes {
                options.cartesian_nodes = nodes;
            }
            options.equator_margin = truth.as_ref().and_then(|file| file.phantom.equator_margin());
            let full = match transform {
                Transform::Full => data,
                Transform::Hemispherical => data.scaled(2.0),
            };
            invert_ac(&full, &options)?
        }
    };
    let runtime_ms = start.elapsed().as_millis() as u64;

    if let Some(out) = &out {
        write_volume(out, &rec)?;
    }
    let Some(file) = truth else {
        return Ok(EXIT_OK);
    };
    let truth = file.phantom.sample(&grid)?;
    let report = ValidationReport::new(method.name(), &truth, &rec, runtime_ms)?;
    match &report_path {
        Some(path) => write_json(path, &report)?,
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    if let Some(limit) = max_error {
        if !(report.rel_l2 <= limit) {
            eprintln!("validation failed: rel_l2 {:.3e} exceeds {limit:.3e}", report.rel_l2);
            return Ok(EXIT_VALIDATION);
        }
    }
    Ok(EXIT_OK)
}

fn table(args: SvdTableArgs, config: &RunConfig) -> Result<i32> {
    let n = required(args.n.or(config.n), "n")?;
    let band = required(args.band.or(config.band), "band")?;
    let lambda = args.lambda.or(config.lambda).unwrap_or(n as f64 / 2.0);
    println!("m,mu,k,c_nu,d_nu,s_nu");
    for (nu, c) in svd_table(n, lambda, band)? {
        println!("{},{},{},{},{},{}", nu.m, nu.mu, nu.k, c.c_nu, c.d_nu, c.s_nu);
    }
    Ok(EXIT_OK)
}

fn constants(args: ConstantsArgs, config: &RunConfig) -> Result<i32> {
    let n = required(args.n.or(config.n), "n")?;
    let record = formula_constants(n, args.ell.or(config.ell))?;
    println!("{}", serde_json::to_string_pretty(&record)?);
    Ok(EXIT_OK)
}

fn selftest(args: SelftestArgs) -> Result<i32> {
    let ids: Vec<u8> = if args.only.is_empty() { (1..=12).collect() } else { args.only };
    if let Some(bad) = ids.iter().find(|id| !(1..=12).contains(*id)) {
        return Err(Error::Parameter(format!("no acceptance criterion {bad}")));
    }
    let suite = Suite::new();
    let mut failed = 0;
    for id in ids {
        let outcome = suite.run(id);
        println!("{outcome}");
        if !outcome.passed {
            failed += 1;
        }
    }
    Ok(if failed == 0 { EXIT_OK } else { EXIT_VALIDATION })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_parsing() {
        assert_eq!(parse_index("2, 1,0").unwrap(), SvdIndex::new(2, 1, 0));
        assert!(parse_index("1,2").is_err());
        assert!(parse_index("a,b,c").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Degenerate("x".into())), EXIT_VALIDATION);
        assert_eq!(exit_code(&Error::Format("x".into())), EXIT_USAGE);
        assert_eq!(cli(["vslice", "no-such-command"]), EXIT_USAGE);
        assert_eq!(cli(["vslice", "svd-table", "--n", "2"]), EXIT_USAGE);
        assert_eq!(cli(["vslice", "svd-table", "--n", "2", "--band", "2"]), EXIT_OK);
    }

    #[test]
    fn phantom_selection() {
        let config = RunConfig::default();
        let select = PhantomSelect { phantom: Some("bump".into()), power: None, nu: None, phantom_band: None, seed: None };
        let (p, n) = select_phantom(&select, Some(3), &config).unwrap();
        assert_eq!((p, n), (Phantom::default_bump(3), 3));
        assert!(select_phantom(&select, None, &config).is_err());
        let config = RunConfig { n: Some(2), phantom: Some(Phantom::EvenConstant), ..Default::default() };
        let none = PhantomSelect { phantom: None, power: None, nu: None, phantom_band: None, seed: None };
        assert_eq!(select_phantom(&none, None, &config).unwrap(), (Phantom::EvenConstant, 2));
    }
}
