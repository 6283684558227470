//! Command-line front end for the `rcamon` binary.
//!
//! Settings resolve as: command-line flag, then `--config` file
//! (`key = value` lines), then built-in default. `RCAMON_SEED` replaces the
//! built-in default seed.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::boundaries::{critval_de, critval_vostrikova, default_h, Scheme};
use crate::detectors::DetectorKind;
use crate::dgp::Case;
use crate::error::{Error, Result};
use crate::experiment::{power_experiment, power_table_csv, size_experiment, size_table_csv};
use crate::limit_sim::{QuantileRecord, SimPlan};
use crate::model::{fit_wls, fit_wls_covariates, Regime};
use crate::monitor::{
    events_csv, resolve_critical_value, run_to_completion, start_monitor_with, CritvalSource,
    MonitorConfig, Verdict,
};
use crate::series::Series;

pub const SEED_ENV: &str = "RCAMON_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_ALARM: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "rcamon", version, about = "Sequential changepoint monitoring for RCA series")]
pub struct Cli {
    /// File of `key = value` defaults; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the training window and print the estimates.
    Fit(FitArgs),
    /// Monitor the observations after the training window.
    Monitor(MonitorArgs),
    /// Print a critical value together with how it was obtained.
    Critvals(CritvalArgs),
    /// Empirical size over simulated no-change paths.
    SimulateSize(ExperimentArgs),
    /// Empirical power and detection delay after a change at the first
    /// monitored observation.
    SimulatePower(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV file: first column observations, further columns covariates.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Replace observations by log(1 + y).
    #[arg(long)]
    pub log_transform: bool,
    /// Replace covariates by their first differences.
    #[arg(long)]
    pub diff_covariates: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Training length (defaults to the whole series).
    #[arg(long)]
    pub m: Option<usize>,
    /// Estimate covariate loadings as well.
    #[arg(long)]
    pub covariates: bool,
    /// stationary or explosive; selects the covariate boundary scales.
    #[arg(long)]
    pub regime: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct SimArgs {
    /// Monte Carlo replications for simulated critical values.
    #[arg(long)]
    pub sim_reps: Option<usize>,
    #[arg(long)]
    pub n_grid: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Upper end of the open-ended Page simulation window.
    #[arg(long)]
    pub truncation: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MonitorArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Training length.
    #[arg(long)]
    pub m: Option<usize>,
    /// cusum or page.
    #[arg(long)]
    pub detector: Option<String>,
    /// open, closed-long or closed-short.
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long)]
    pub psi: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Monitoring horizon for closed-ended schemes.
    #[arg(long)]
    pub mstar: Option<usize>,
    /// sim, de or vostrikova.
    #[arg(long)]
    pub source: Option<String>,
    /// Use this critical value instead of computing one.
    #[arg(long)]
    pub c: Option<f64>,
    /// Vostrikova bandwidth (default sqrt(log m*)).
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub covariates: bool,
    #[arg(long)]
    pub regime: Option<String>,
    /// Step cap for open-ended monitoring.
    #[arg(long)]
    pub max_steps: Option<usize>,
    #[command(flatten)]
    pub sim: SimArgs,
    /// Event log destination (standard output by default).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CritvalArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub mstar: Option<usize>,
    /// Training length; only the closed long-horizon simulation uses it.
    #[arg(long)]
    pub m: Option<usize>,
    /// sim, de or vostrikova.
    #[arg(long)]
    pub source: Option<String>,
    #[arg(long)]
    pub detector: Option<String>,
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long)]
    pub psi: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
    #[command(flatten)]
    pub sim: SimArgs,
    /// Append the simulated quantile as a CSV record to this file.
    #[arg(long)]
    pub quantile_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Simulation design: I, II or III.
    #[arg(long)]
    pub case: Option<String>,
    /// Comma-separated training lengths.
    #[arg(long)]
    pub m: Option<String>,
    /// Comma-separated horizons.
    #[arg(long)]
    pub mstar: Option<String>,
    /// Comma-separated `detector:psi:source` triples, e.g.
    /// `cusum:0.45:sim,cusum:0.5:de,page:0.25:sim`; the source may also be
    /// `c=<value>`.
    #[arg(long)]
    pub configs: Option<String>,
    /// Replications per cell.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Covariate loading of the simulated series; non-zero enables
    /// covariate-aware monitoring.
    #[arg(long)]
    pub lambda0: Option<f64>,
    /// Comma-separated post-change levels (power only; defaults to the case
    /// presets).
    #[arg(long)]
    pub beta_a: Option<String>,
    #[command(flatten)]
    pub sim: SimArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn execute(cli: &Cli) -> Result<i32> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match &cli.command {
        Command::Fit(a) => cmd_fit(a, &file),
        Command::Monitor(a) => cmd_monitor(a, &file),
        Command::Critvals(a) => cmd_critvals(a, &file),
        Command::SimulateSize(a) => cmd_experiment(a, &file, false),
        Command::SimulatePower(a) => cmd_experiment(a, &file, true),
    }
}

/// `key = value` settings; `#` starts a comment. Keys use the flag names,
/// with `-` and `_` interchangeable.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: HashMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            entries.insert(normalize_key(k), v.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(&normalize_key(key)).map(String::as_str)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("config key `{key}`: cannot parse `{v}`"))),
        }
    }

    /// Flag value, else file value, else `default`.
    fn pick<T: FromStr>(&self, key: &str, flag: Option<T>, default: T) -> Result<T> {
        Ok(match flag {
            Some(v) => v,
            None => self.get(key)?.unwrap_or(default),
        })
    }

    fn pick_opt<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>> {
        Ok(match flag {
            Some(v) => Some(v),
            None => self.get(key)?,
        })
    }

    fn flag(&self, key: &str, flag: bool) -> Result<bool> {
        Ok(flag || self.get::<bool>(key)?.unwrap_or(false))
    }
}

fn normalize_key(k: &str) -> String {
    k.trim().to_ascii_lowercase().replace('-', "_")
}

fn default_seed() -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV} = `{v}` is not an integer"))),
        Err(_) => Ok(SimPlan::default().seed),
    }
}

fn sim_plan(a: &SimArgs, file: &ConfigFile) -> Result<SimPlan> {
    let d = SimPlan::default();
    Ok(SimPlan {
        n_grid: file.pick("n_grid", a.n_grid, d.n_grid)?,
        reps: file.pick("sim_reps", a.sim_reps, d.reps)?,
        seed: file.pick("seed", a.seed, default_seed()?)?,
        truncation_x: file.pick("truncation", a.truncation, d.truncation_x)?,
    })
}

fn parse_detector(s: &str) -> Result<DetectorKind> {
    match s.trim().to_ascii_lowercase().as_str() {
        "cusum" => Ok(DetectorKind::Cusum),
        "page" => Ok(DetectorKind::Page),
        _ => Err(Error::Config(format!("unknown detector `{s}`"))),
    }
}

fn parse_scheme(s: &str) -> Result<Scheme> {
    match s.trim().to_ascii_lowercase().as_str() {
        "open" | "open-ended" => Ok(Scheme::OpenEnded),
        "closed" | "closed-long" | "long" => Ok(Scheme::ClosedLong),
        "closed-short" | "short" => Ok(Scheme::ClosedShort),
        _ => Err(Error::Config(format!("unknown scheme `{s}`"))),
    }
}

fn parse_regime(s: &str) -> Result<Regime> {
    match s.trim().to_ascii_lowercase().as_str() {
        "stationary" => Ok(Regime::Stationary),
        "explosive" => Ok(Regime::Explosive),
        _ => Err(Error::Config(format!("unknown regime `{s}`"))),
    }
}

fn parse_source(s: &str, plan: SimPlan, h: Option<f64>) -> Result<CritvalSource> {
    let s = s.trim().to_ascii_lowercase();
    if let Some(c) = s.strip_prefix("c=") {
        let c = c
            .parse()
            .map_err(|_| Error::Config(format!("bad critical value `{c}`")))?;
        return Ok(CritvalSource::Fixed(c));
    }
    match s.as_str() {
        "sim" | "simulated" => Ok(CritvalSource::Simulated(plan)),
        "de" | "darling-erdos" => Ok(CritvalSource::DarlingErdos),
        "vostrikova" => Ok(CritvalSource::Vostrikova { h }),
        _ => Err(Error::Config(format!("unknown critical value source `{s}`"))),
    }
}

fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad {what} `{}`", v.trim())))
        })
        .collect()
}

/// Parses a `detector:psi:source` experiment column.
pub fn parse_experiment_config(s: &str, plan: SimPlan) -> Result<MonitorConfig> {
    let parts: Vec<&str> = s.split(':').collect();
    let [det, psi, src] = parts.as_slice() else {
        return Err(Error::Config(format!(
            "expected `detector:psi:source`, got `{s}`"
        )));
    };
    let psi: f64 = psi
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad psi `{psi}`")))?;
    let cfg = MonitorConfig::closed_long(parse_detector(det)?, psi, 1, parse_source(src, plan, None)?);
    cfg.validate()?;
    Ok(cfg)
}

fn load_input(a: &InputArgs, file: &ConfigFile) -> Result<Series> {
    let path: PathBuf = file
        .pick_opt("input", a.input.clone())?
        .ok_or_else(|| Error::Config("--input is required".into()))?;
    let series = load_series_csv(&path, file.flag("log_transform", a.log_transform)?)?;
    Ok(if file.flag("diff_covariates", a.diff_covariates)? {
        series.difference_covariates()
    } else {
        series
    })
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_fit(a: &FitArgs, file: &ConfigFile) -> Result<i32> {
    let series = load_input(&a.input, file)?;
    let m = file.pick("m", a.m, series.len())?;
    let (training, _) = series.split_at(m)?;
    let regime = parse_regime(&file.pick("regime", a.regime.clone(), "stationary".into())?)?;
    let fit = if file.flag("covariates", a.covariates)? {
        fit_wls_covariates(&training)?
    } else {
        fit_wls(&training)?
    };
    let mut out = format!(
        "m={}\nbeta_hat={}\ns2_hat={}\ns_hat={}\n",
        fit.m,
        fit.beta_hat,
        fit.s2_hat,
        fit.s_hat()
    );
    if let Some(lambda) = &fit.lambda_hat {
        for (j, l) in lambda.iter().enumerate() {
            out.push_str(&format!("lambda_hat_{}={l}\n", j + 1));
        }
    }
    if let Some((sx2, sxd2)) = fit.boundary_scales(regime) {
        out.push_str(&format!("sx2={sx2}\nsxd2={sxd2}\n"));
    }
    emit(None, &out)?;
    Ok(EXIT_OK)
}

fn cmd_monitor(a: &MonitorArgs, file: &ConfigFile) -> Result<i32> {
    let series = load_input(&a.input, file)?;
    let m: usize = file
        .pick_opt("m", a.m)?
        .ok_or_else(|| Error::Config("--m (training length) is required".into()))?;
    let plan = sim_plan(&a.sim, file)?;
    let h = file.pick_opt("h", a.h)?;
    let critval = match file.pick_opt("c", a.c)? {
        Some(c) => CritvalSource::Fixed(c),
        None => parse_source(&file.pick("source", a.source.clone(), "sim".into())?, plan, h)?,
    };
    let config = MonitorConfig {
        detector: parse_detector(&file.pick("detector", a.detector.clone(), "cusum".into())?)?,
        scheme: parse_scheme(&file.pick("scheme", a.scheme.clone(), "closed-long".into())?)?,
        psi: file.pick("psi", a.psi, 0.0)?,
        alpha: file.pick("alpha", a.alpha, 0.05)?,
        m_star: file.pick_opt("mstar", a.mstar)?,
        critval,
        use_covariates: file.flag("covariates", a.covariates)?,
        regime: parse_regime(&file.pick("regime", a.regime.clone(), "stationary".into())?)?,
        max_steps: file.pick_opt("max_steps", a.max_steps)?,
    };
    let (training, stream) = series.split_at(m)?;
    let crit = resolve_critical_value(&config, m)?;
    let mut engine = start_monitor_with(&training, config, crit)?;
    eprintln!(
        "critical_value={} source={} beta_hat={} s_hat={}",
        crit.value,
        crit.source.as_str(),
        engine.fit().beta_hat,
        engine.fit().s_hat()
    );
    let result = run_to_completion(&mut engine, &stream, None)?;
    let output: Option<PathBuf> = file.pick_opt("output", a.output.clone())?;
    emit(output.as_deref(), &events_csv(&result.events))?;
    Ok(match result.last_verdict() {
        Some(Verdict::Alarm) => EXIT_ALARM,
        _ => EXIT_OK,
    })
}

fn cmd_critvals(a: &CritvalArgs, file: &ConfigFile) -> Result<i32> {
    let alpha = file.pick("alpha", a.alpha, 0.05)?;
    let m_star: Option<usize> = file.pick_opt("mstar", a.mstar)?;
    let source = file.pick("source", a.source.clone(), "sim".into())?;
    let h = file.pick_opt("h", a.h)?;
    let need_horizon = || m_star.ok_or_else(|| Error::Config("--mstar is required".into()));
    let mut out = format!("alpha={alpha}\n");
    match source.trim().to_ascii_lowercase().as_str() {
        "de" | "darling-erdos" => {
            let ms = need_horizon()?;
            out.push_str(&format!(
                "m_star={ms}\nsource=darling-erdos\ncritical_value={}\n",
                critval_de(alpha, ms)?
            ));
        }
        "vostrikova" => {
            let ms = need_horizon()?;
            out.push_str(&format!(
                "m_star={ms}\nsource=vostrikova\nh={}\ncritical_value={}\n",
                h.unwrap_or_else(|| default_h(ms)),
                critval_vostrikova(alpha, ms, h)?
            ));
        }
        "sim" | "simulated" => {
            let plan = sim_plan(&a.sim, file)?;
            let scheme = parse_scheme(&file.pick("scheme", a.scheme.clone(), "closed-long".into())?)?;
            let m = file.pick_opt("m", a.m)?.or(m_star).unwrap_or(1);
            let config = MonitorConfig {
                detector: parse_detector(&file.pick("detector", a.detector.clone(), "cusum".into())?)?,
                scheme,
                psi: file.pick("psi", a.psi, 0.0)?,
                alpha,
                m_star,
                critval: CritvalSource::Simulated(plan),
                use_covariates: false,
                regime: Regime::Stationary,
                max_steps: None,
            };
            config.validate()?;
            let functional = config.functional(m);
            let record = QuantileRecord::compute(&functional, alpha, &plan)?;
            out.push_str(&format!(
                "functional={}\npsi={}\nhorizon_param={}\nsource=simulated\nseed={}\nreps={}\nn_grid={}\ncritical_value={}\n",
                record.functional,
                record.psi,
                record.horizon_param,
                record.seed,
                record.reps,
                record.n_grid,
                record.quantile
            ));
            if let Some(path) = file.pick_opt::<PathBuf>("quantile_csv", a.quantile_csv.clone())? {
                let fresh = !path.exists() || fs::metadata(&path)?.len() == 0;
                let mut f = fs::OpenOptions::new().create(true).append(true).open(&path)?;
                if fresh {
                    writeln!(f, "{}", QuantileRecord::HEADER)?;
                }
                writeln!(f, "{record}")?;
            }
        }
        other => return Err(Error::Config(format!("unknown critical value source `{other}`"))),
    }
    emit(None, &out)?;
    Ok(EXIT_OK)
}

fn cmd_experiment(a: &ExperimentArgs, file: &ConfigFile, power: bool) -> Result<i32> {
    let case_name: String = file
        .pick_opt("case", a.case.clone())?
        .ok_or_else(|| Error::Config("--case is required".into()))?;
    let case = Case::parse(&case_name)
        .ok_or_else(|| Error::Config(format!("unknown case `{case_name}`")))?;
    let lambda0 = file.pick("lambda0", a.lambda0, 0.0)?;
    let params = case.params().with_covariates(lambda0);
    let ms: Vec<usize> = parse_list(&file.pick("m", a.m.clone(), "100".into())?, "m")?;
    let horizons: Vec<usize> = match file.pick_opt::<String>("mstar", a.mstar.clone())? {
        Some(s) => parse_list(&s, "m*")?,
        None => Vec::new(),
    };
    let plan = sim_plan(&a.sim, file)?;
    let configs = file.pick("configs", a.configs.clone(), "cusum:0.45:sim".into())?;
    let mut configs: Vec<MonitorConfig> = configs
        .split(',')
        .map(|c| parse_experiment_config(c, plan))
        .collect::<Result<_>>()?;
    for c in &mut configs {
        c.use_covariates = lambda0 != 0.0;
    }
    let reps = file.pick("reps", a.reps, 1000)?;
    let seed = file.pick("seed", a.sim.seed, default_seed()?)?;
    let betas: Vec<f64> = match file.pick_opt::<String>("beta_a", a.beta_a.clone())? {
        Some(s) => parse_list(&s, "beta_a")?,
        None => case.power_presets().to_vec(),
    };
    let mut rows = Vec::new();
    for &m in &ms {
        let cells = if horizons.is_empty() { vec![m] } else { horizons.clone() };
        for &m_star in &cells {
            if power {
                for &b in &betas {
                    rows.extend(power_experiment(&params, b, m, m_star, &configs, reps, seed)?);
                }
            } else {
                rows.extend(size_experiment(&params, m, m_star, &configs, reps, seed)?);
            }
        }
    }
    let table = if power {
        power_table_csv(&rows)
    } else {
        size_table_csv(&rows)
    };
    let output: Option<PathBuf> = file.pick_opt("output", a.output.clone())?;
    emit(output.as_deref(), &table)?;
    Ok(EXIT_OK)
}

/// Reads a series from CSV. The first column holds the observations, any
/// further columns are covariates, and a non-numeric first row is taken as
/// a header.
pub fn load_series_csv(path: &Path, log_transform: bool) -> Result<Series> {
    let text = fs::read_to_string(path)?;
    parse_series_csv(&text, log_transform)
}

pub fn parse_series_csv(text: &str, log_transform: bool) -> Result<Series> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut values = Vec::new();
    let mut covariates: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let line = record.position().map_or(idx + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().map(|f| f.parse::<f64>()).collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if values.is_empty() && width.is_none() => {
                width = Some(record.len());
                continue;
            }
            Err(e) => {
                return Err(Error::Parse {
                    line,
                    msg: format!("non-numeric field: {e}"),
                })
            }
        };
        match width {
            Some(w) if w != row.len() => {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {w} columns, found {}", row.len()),
                })
            }
            _ => width = Some(row.len()),
        }
        if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
            return Err(Error::Parse {
                line,
                msg: format!("non-finite value {bad}"),
            });
        }
        let mut y = row[0];
        if log_transform {
            if y <= -1.0 {
                return Err(Error::Domain(format!(
                    "log(1 + y) undefined for y = {y} on line {line}"
                )));
            }
            y = y.ln_1p();
        }
        values.push(y);
        if row.len() > 1 {
            covariates.push(row[1..].to_vec());
        }
    }
    if width.is_some_and(|w| w > 1) {
        Series::with_covariates(values, covariates)
    } else {
        Series::new(values)
    }
}

/// Writes a series as CSV with a header line, using shortest round-trip
/// decimal formatting.
pub fn write_series_csv(path: &Path, series: &Series) -> Result<()> {
    fs::write(path, series_csv(series))?;
    Ok(())
}

pub fn series_csv(series: &Series) -> String {
    let mut out = String::from("y");
    for j in 0..series.dim() {
        out.push_str(&format!(",x{}", j + 1));
    }
    out.push('\n');
    for (i, y) in series.values().iter().enumerate() {
        out.push_str(&format!("{y}"));
        if let Some(x) = series.covariate(i) {
            for v in x {
                out.push_str(&format!(",{v}"));
            }
        }
        out.push('\n');
    }
    out
}
