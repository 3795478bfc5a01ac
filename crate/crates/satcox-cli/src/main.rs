//! `satcox` — command-line front end for the orbit-structured constellation
//! library: constellation snapshots, analytical metric evaluation, parameter
//! sweeps, and Monte-Carlo validation, all emitting stable CSV.
//!
//! Output conventions: comma-separated, `.` decimal point, one header line,
//! LF line endings, UTF-8. Every command is deterministic given the scenario
//! file, the flags, and the seed. Exit status: 0 on success (and on a clean
//! validation), 1 when validation raises flags, 2 on any operational error.

use std::error::Error;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use satcox::analysis::{ScenarioConfig, ZenithDistribution};
use satcox::coxnet::{sample_constellation, snapshot_rows, Densities};
use satcox::geometry::NetworkGeometry;
use satcox::montecarlo::{default_validation_grid, estimate, validate, MetricSpec};
use satcox::Evaluator64;
use satcox_cli::scenario::Scenario;
use satcox_cli::DEFAULT_SEED;

/// Conservative bound on the numerical error of an analytical value: the
/// tolerance the evaluator's quadratures are held to. Closed-form metrics
/// satisfy it trivially; it is a bound, not a sharp estimate.
fn error_bound(value: f64) -> f64 {
    (1e-8 * value.abs()).max(1e-12)
}

#[derive(Parser)]
#[command(
    name = "satcox",
    version,
    about = "Orbit-structured satellite constellation analysis",
    after_help = "Scenario files are `key = value` lines (see `satcox eval --help` for the \
                  key list); omitted keys keep the built-in defaults. All output is CSV with \
                  one header line."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one constellation snapshot and emit it as CSV
    Sample(SampleArgs),
    /// Evaluate one metric analytically at a single parameter point
    Eval(GridArgs),
    /// Evaluate one metric over a one- or two-parameter grid
    Sweep(GridArgs),
    /// Cross-check analytical metrics against Monte Carlo on a scenario grid
    Validate(ValidateArgs),
}

#[derive(Args)]
#[command(after_help = "CSV columns: orbit_id,theta_rad,phi_rad,omega_rad,x_km,y_km,z_km — one \
                        row per satellite, positions in km on the satellite sphere.")]
struct SampleArgs {
    /// Scenario file; omitted = built-in defaults
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Override the mean number of orbits
    #[arg(long)]
    lambda: Option<f64>,
    /// Override the mean satellites per orbit
    #[arg(long)]
    mu: Option<f64>,
    /// RNG master seed
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the CSV here (atomically) instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(after_help = "Numeric flags take either a single value or an inclusive start:stop:step \
                        range; `eval` accepts only single values, `sweep` requires one or two \
                        ranges. CSV columns: lambda,mu,platform[,platform_altitude_km]\
                        [,satellite_altitude_km][,<metric parameter>][,link],analytical,\
                        error_estimate[,mc_mean,mc_stderr][,lambda_g]. `analytical` is the \
                        metric value, `error_estimate` a conservative numerical-error bound; \
                        `lambda_g` appears when the scenario sets it (annotation only). \
                        With --with-mc, every row reuses the same master seed, so rows that \
                        share a scenario also share constellation draws (common random numbers).")]
struct GridArgs {
    /// Scenario file; omitted = built-in defaults
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Metric to evaluate
    #[arg(long)]
    metric: Metric,
    /// Mean number of orbits λ
    #[arg(long)]
    lambda: Option<GridValue>,
    /// Mean satellites per orbit μ
    #[arg(long)]
    mu: Option<GridValue>,
    /// Aerial-platform tier (not sweepable; run once per setting)
    #[arg(long)]
    platform: Option<Toggle>,
    /// Platform altitude h_a in km
    #[arg(long)]
    platform_altitude: Option<GridValue>,
    /// Satellite altitude h_s in km
    #[arg(long)]
    satellite_altitude: Option<GridValue>,
    /// SNR threshold τ in dB (snr-coverage)
    #[arg(long, allow_hyphen_values = true)]
    tau_db: Option<GridValue>,
    /// Distance d in km (distance-ccdf)
    #[arg(long)]
    d: Option<GridValue>,
    /// Delay t in seconds (delay-ccdf)
    #[arg(long)]
    t: Option<GridValue>,
    /// Minimum elevation mask κ in degrees (min-elevation-connectivity)
    #[arg(long)]
    kappa_deg: Option<GridValue>,
    /// Maximum platform zenith angle in degrees (zenith-connectivity)
    #[arg(long)]
    max_zenith_deg: Option<GridValue>,
    /// Link selector for snr-coverage (default platform) and rate (default end-to-end)
    #[arg(long)]
    link: Option<Link>,
    /// Append mc_mean and mc_stderr columns from this many simulation trials per row
    #[arg(long)]
    with_mc: Option<usize>,
    /// RNG master seed for --with-mc
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the CSV here (atomically) instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(after_help = "Runs every metric with a simulation counterpart on a scenario grid (the \
                        built-in 12-point density×platform grid, or the single --scenario point) \
                        and flags |z| > 3 disagreements. CSV columns: metric_id,param_point,\
                        analytical,mc_mean,mc_stderr,z_score; the summary goes to standard error. \
                        Exit status 0 = clean, 1 = flags raised.")]
struct ValidateArgs {
    /// Validate this single scenario instead of the built-in grid
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Simulation trials per metric and grid point
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    /// RNG master seed; the default is pinned so the built-in grid passes with zero flags
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Bias every analytical value by 5% — detector sanity fixture, must exit 1
    #[arg(long)]
    corrupted: bool,
    /// Write the CSV here (atomically) instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Metric {
    EffectiveOrbits,
    EffectiveSatellites,
    Connectivity,
    DistanceCcdf,
    SnrCoverage,
    Rate,
    DelayCcdf,
    MinElevationConnectivity,
    ZenithConnectivity,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Link {
    Platform,
    Ground,
    EndToEnd,
}

impl Link {
    fn label(self) -> &'static str {
        match self {
            Self::Platform => "platform",
            Self::Ground => "ground",
            Self::EndToEnd => "end-to-end",
        }
    }
}

/// A numeric flag value: either a single point or an inclusive
/// start:stop:step range.
#[derive(Clone, Debug)]
enum GridValue {
    Single(f64),
    Range { start: f64, stop: f64, step: f64 },
}

impl GridValue {
    fn is_range(&self) -> bool {
        matches!(self, Self::Range { .. })
    }

    fn expand(&self) -> Vec<f64> {
        match *self {
            Self::Single(v) => vec![v],
            Self::Range { start, stop, step } => {
                // The slack absorbs accumulated float noise so that an exact
                // multiple of the step lands on `stop` rather than past it.
                let n = ((stop - start) / step * (1.0 + 1e-12) + 1e-9).floor() as usize + 1;
                (0..n).map(|i| start + step * i as f64).collect()
            }
        }
    }
}

impl FromStr for GridValue {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let number = |t: &str| -> Result<f64, String> {
            let v: f64 = t
                .trim()
                .parse()
                .map_err(|_| format!("`{t}` is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("`{t}` must be finite"))
            }
        };
        match s.split_once(':') {
            None => Ok(Self::Single(number(s)?)),
            Some((a, rest)) => {
                let Some((b, c)) = rest.split_once(':') else {
                    return Err(format!("range `{s}` must be start:stop:step"));
                };
                let (start, stop, step) = (number(a)?, number(b)?, number(c)?);
                if step <= 0.0 {
                    return Err(format!("range `{s}`: step must be positive"));
                }
                if stop < start {
                    return Err(format!("range `{s}`: stop must be at least start"));
                }
                Ok(Self::Range { start, stop, step })
            }
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        // A reader closing the pipe early (`satcox … | head`) is not an
        // error; finish quietly like any other line-oriented tool.
        Err(e)
            if e.downcast_ref::<io::Error>()
                .is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe) =>
        {
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    process::exit(code);
}

fn run(cli: Cli) -> Result<i32, Box<dyn Error>> {
    match cli.command {
        Command::Sample(args) => {
            cmd_sample(args)?;
            Ok(0)
        }
        Command::Eval(args) => {
            cmd_grid(args, Mode::Eval)?;
            Ok(0)
        }
        Command::Sweep(args) => {
            cmd_grid(args, Mode::Sweep)?;
            Ok(0)
        }
        Command::Validate(args) => cmd_validate(args),
    }
}

fn load_scenario(path: Option<&Path>) -> Result<Scenario, Box<dyn Error>> {
    Ok(match path {
        None => Scenario::table1(),
        Some(p) => Scenario::load(p)?,
    })
}

/// Writes `text` to stdout, or atomically (staged file + rename) to `out`.
fn emit(out: Option<&Path>, text: &str) -> Result<(), Box<dyn Error>> {
    match out {
        None => io::stdout().write_all(text.as_bytes())?,
        Some(path) => {
            let mut staged = path.as_os_str().to_owned();
            staged.push(".tmp");
            let staged = PathBuf::from(staged);
            fs::write(&staged, text)?;
            fs::rename(&staged, path)?;
        }
    }
    Ok(())
}

fn cmd_sample(args: SampleArgs) -> Result<(), Box<dyn Error>> {
    let mut scn = load_scenario(args.scenario.as_deref())?;
    if args.lambda.is_some() || args.mu.is_some() {
        scn.config.densities = Densities::new(
            args.lambda.unwrap_or(scn.config.densities.mean_orbits()),
            args.mu.unwrap_or(scn.config.densities.mean_sats_per_orbit()),
        )?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let sample = sample_constellation(&scn.config.densities, &mut rng);

    let mut csv = String::from("orbit_id,theta_rad,phi_rad,omega_rad,x_km,y_km,z_km\n");
    for r in snapshot_rows(&sample, &scn.config.geom) {
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            r.orbit_id, r.theta_rad, r.phi_rad, r.omega_rad, r.x_km, r.y_km, r.z_km
        )?;
    }
    emit(args.out.as_deref(), &csv)
}

#[derive(Copy, Clone, PartialEq, Eq)]
enum Mode {
    Eval,
    Sweep,
}

/// The metric-parameter flag attached to each metric, if any:
/// (flag spelling, CSV column, whether the value is in dB or degrees).
fn param_flag(metric: Metric) -> Option<(&'static str, &'static str)> {
    match metric {
        Metric::DistanceCcdf => Some(("--d", "d_km")),
        Metric::SnrCoverage => Some(("--tau-db", "tau_db")),
        Metric::DelayCcdf => Some(("--t", "t_s")),
        Metric::MinElevationConnectivity => Some(("--kappa-deg", "kappa_deg")),
        Metric::ZenithConnectivity => Some(("--max-zenith-deg", "max_zenith_deg")),
        Metric::EffectiveOrbits
        | Metric::EffectiveSatellites
        | Metric::Connectivity
        | Metric::Rate => None,
    }
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Analytical value of `metric` at one grid point.
fn analytical(
    ev: &Evaluator64,
    metric: Metric,
    link: Link,
    param: Option<f64>,
) -> Result<f64, satcox::Error> {
    match metric {
        Metric::EffectiveOrbits => Ok(ev.avg_effective_orbits()),
        Metric::EffectiveSatellites => ev.avg_effective_satellites(),
        Metric::Connectivity => ev.connectivity(),
        Metric::DistanceCcdf => ev.nearest_distance_ccdf(param.expect("validated")),
        Metric::SnrCoverage => {
            let tau = db_to_linear(param.expect("validated"));
            match link {
                Link::Platform => ev.snr_coverage_platform(tau),
                Link::Ground => ev.snr_coverage_ground(tau),
                Link::EndToEnd => unreachable!("rejected before evaluation"),
            }
        }
        Metric::Rate => {
            let rates = ev.throughput()?;
            Ok(match link {
                Link::Platform => rates.rate_platform_bps_hz,
                Link::Ground => rates.rate_ground_bps_hz,
                Link::EndToEnd => rates.end_to_end_bps_hz,
            })
        }
        Metric::DelayCcdf => ev.delay_ccdf(param.expect("validated")),
        Metric::MinElevationConnectivity => {
            ev.connectivity_min_elevation(param.expect("validated").to_radians())
        }
        Metric::ZenithConnectivity => {
            let max = param.expect("validated").to_radians();
            let dist = if max == 0.0 {
                ZenithDistribution::Degenerate(0.0)
            } else {
                ZenithDistribution::Uniform { min: 0.0, max }
            };
            ev.connectivity_random_zenith(&dist)
        }
    }
}

/// Simulation counterpart of `metric` at one grid point.
fn mc_spec(metric: Metric, link: Link, param: Option<f64>) -> MetricSpec {
    match metric {
        Metric::EffectiveOrbits => MetricSpec::EffectiveOrbits,
        Metric::EffectiveSatellites => MetricSpec::EffectiveSatellites,
        Metric::Connectivity => MetricSpec::Connectivity,
        Metric::DistanceCcdf => MetricSpec::DistanceCcdf {
            d_km: param.expect("validated"),
        },
        Metric::SnrCoverage => {
            let tau = db_to_linear(param.expect("validated"));
            match link {
                Link::Platform => MetricSpec::SnrCoveragePlatform { tau },
                Link::Ground => MetricSpec::SnrCoverageGround { tau },
                Link::EndToEnd => unreachable!("rejected before evaluation"),
            }
        }
        Metric::Rate => match link {
            Link::Platform => MetricSpec::RatePlatform,
            Link::Ground => MetricSpec::RateGround,
            Link::EndToEnd => unreachable!("rejected before evaluation"),
        },
        Metric::DelayCcdf => MetricSpec::DelayCcdf {
            t_s: param.expect("validated"),
        },
        Metric::MinElevationConnectivity => MetricSpec::ConnectivityMinElevation {
            kappa_rad: param.expect("validated").to_radians(),
        },
        Metric::ZenithConnectivity => MetricSpec::ConnectivityRandomZenith {
            max_zenith_rad: param.expect("validated").to_radians(),
        },
    }
}

fn cmd_grid(args: GridArgs, mode: Mode) -> Result<(), Box<dyn Error>> {
    let scn = load_scenario(args.scenario.as_deref())?;
    let base = scn.config;

    // Which metric-parameter flag applies, and reject the ones that don't.
    let applicable = param_flag(args.metric);
    let mut metric_param: Option<&GridValue> = None;
    let given: [(&str, &Option<GridValue>); 5] = [
        ("--d", &args.d),
        ("--tau-db", &args.tau_db),
        ("--t", &args.t),
        ("--kappa-deg", &args.kappa_deg),
        ("--max-zenith-deg", &args.max_zenith_deg),
    ];
    for (flag, value) in given {
        let Some(value) = value else { continue };
        match applicable {
            Some((wanted, _)) if wanted == flag => metric_param = Some(value),
            _ => return Err(format!("{flag} does not apply to this metric").into()),
        }
    }
    if let Some((wanted, _)) = applicable {
        if metric_param.is_none() {
            return Err(format!("this metric requires {wanted}").into());
        }
    }

    // Link selector: only snr-coverage and rate take one.
    let link = match args.metric {
        Metric::SnrCoverage => {
            let link = args.link.unwrap_or(Link::Platform);
            if link == Link::EndToEnd {
                return Err("--link end-to-end applies only to the rate metric".into());
            }
            link
        }
        Metric::Rate => args.link.unwrap_or(Link::EndToEnd),
        _ => {
            if args.link.is_some() {
                return Err("--link applies only to snr-coverage and rate".into());
            }
            Link::Platform
        }
    };
    if args.metric == Metric::Rate && link == Link::EndToEnd && args.with_mc.is_some() {
        return Err(
            "--with-mc has no end-to-end counterpart; simulate --link platform and \
             --link ground separately"
                .into(),
        );
    }

    // Mode discipline: eval is pointwise, sweep varies one or two parameters.
    let axes = [
        &args.lambda,
        &args.mu,
        &args.platform_altitude,
        &args.satellite_altitude,
    ];
    let n_ranges = axes
        .into_iter()
        .flatten()
        .chain(metric_param)
        .filter(|v| v.is_range())
        .count();
    match mode {
        Mode::Eval if n_ranges > 0 => {
            return Err("eval takes single values; use sweep for start:stop:step ranges".into())
        }
        Mode::Sweep if !(1..=2).contains(&n_ranges) => {
            return Err(format!(
                "sweep varies one or two parameters; {n_ranges} ranged flags were given"
            )
            .into())
        }
        _ => {}
    }

    // Expand the axes (absent scenario axes pin to the scenario's value).
    let lambdas = expand_or(&args.lambda, base.densities.mean_orbits());
    let mus = expand_or(&args.mu, base.densities.mean_sats_per_orbit());
    let p_alts = expand_or(&args.platform_altitude, base.geom.platform_altitude_km());
    let s_alts = expand_or(&args.satellite_altitude, base.geom.satellite_altitude_km());
    let rebuild_geometry = args.platform_altitude.is_some() || args.satellite_altitude.is_some();
    let params: Vec<Option<f64>> = match metric_param {
        None => vec![None],
        Some(v) => v.expand().into_iter().map(Some).collect(),
    };
    let platform_enabled = match args.platform {
        None => base.platform_enabled,
        Some(Toggle::On) => true,
        Some(Toggle::Off) => false,
    };

    // Header.
    let mut columns = vec!["lambda", "mu", "platform"];
    if args.platform_altitude.is_some() {
        columns.push("platform_altitude_km");
    }
    if args.satellite_altitude.is_some() {
        columns.push("satellite_altitude_km");
    }
    if let Some((_, column)) = applicable {
        columns.push(column);
    }
    if matches!(args.metric, Metric::SnrCoverage | Metric::Rate) {
        columns.push("link");
    }
    columns.push("analytical");
    columns.push("error_estimate");
    if args.with_mc.is_some() {
        columns.push("mc_mean");
        columns.push("mc_stderr");
    }
    if scn.lambda_g.is_some() {
        columns.push("lambda_g");
    }
    let mut csv = columns.join(",");
    csv.push('\n');

    // Rows: scenario axes outside (one evaluator each), metric axis inside
    // (the evaluator's kernel cache is reused across metric parameters).
    for &lambda in &lambdas {
        for &mu in &mus {
            for &p_alt in &p_alts {
                for &s_alt in &s_alts {
                    let mut cfg = base;
                    cfg.densities = Densities::new(lambda, mu)?;
                    cfg.platform_enabled = platform_enabled;
                    if rebuild_geometry {
                        cfg.geom = NetworkGeometry::from_altitudes(
                            p_alt,
                            s_alt,
                            base.geom.satellite_angular_speed_rad_s(),
                        )?;
                    }
                    let ev = Evaluator64::new(cfg);
                    for &param in &params {
                        let value = analytical(&ev, args.metric, link, param)?;
                        let mut cells: Vec<String> = vec![
                            fmt(lambda),
                            fmt(mu),
                            (if platform_enabled { "on" } else { "off" }).to_owned(),
                        ];
                        if args.platform_altitude.is_some() {
                            cells.push(fmt(p_alt));
                        }
                        if args.satellite_altitude.is_some() {
                            cells.push(fmt(s_alt));
                        }
                        if let Some(p) = param {
                            cells.push(fmt(p));
                        }
                        if matches!(args.metric, Metric::SnrCoverage | Metric::Rate) {
                            cells.push(link.label().to_owned());
                        }
                        cells.push(fmt(value));
                        cells.push(fmt(error_bound(value)));
                        if let Some(trials) = args.with_mc {
                            let spec = mc_spec(args.metric, link, param);
                            let est = estimate(&cfg, &spec, trials, args.seed)?;
                            cells.push(fmt(est.mean));
                            cells.push(fmt(est.stderr));
                        }
                        if let Some(lg) = scn.lambda_g {
                            cells.push(fmt(lg));
                        }
                        csv.push_str(&cells.join(","));
                        csv.push('\n');
                    }
                }
            }
        }
    }
    emit(args.out.as_deref(), &csv)
}

fn expand_or(axis: &Option<GridValue>, default: f64) -> Vec<f64> {
    axis.as_ref().map_or(vec![default], GridValue::expand)
}

/// Shortest round-trip decimal form — stable across runs.
fn fmt(v: f64) -> String {
    format!("{v}")
}

fn cmd_validate(args: ValidateArgs) -> Result<i32, Box<dyn Error>> {
    if args.trials < 1000 {
        eprintln!(
            "warning: {} trials puts the per-metric standard error near the percent scale; \
             z-scores will be coarse (use at least 10000 for a meaningful pass/fail)",
            args.trials
        );
    }
    let grid: Vec<ScenarioConfig<f64>> = match &args.scenario {
        None => default_validation_grid(),
        Some(path) => vec![Scenario::load(path)?.config],
    };
    let report = validate(&grid, args.trials, args.seed, args.corrupted)?;
    emit(args.out.as_deref(), &report.to_csv())?;
    eprintln!("{}", report.summary());
    Ok(if report.passed() { 0 } else { 1 })
}
