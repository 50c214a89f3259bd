//! Command-line front end: reads a config, runs the analytic and simulated
//! engines over its sweep and writes one CSV per command.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::analysis::{association_prob, coverage_probability, CoverageQuery, Event};
use crate::config::{ConfigError, Mode, RunConfig, SweepVariable};
use crate::geometry::void_prob_cox_disc;
use crate::load::{rate_coverage_with, tier2_load_pmf, LoadModel, RateQuery};
use crate::montecarlo::{
    estimate_association, estimate_coverage, estimate_k_function, estimate_rate_coverage,
    estimate_void_probability, measure_tier2_load,
};
use crate::stats::binomial_ci_halfwidth;
use crate::{equivalent_densities, geometry, Error};

#[derive(Debug, Parser)]
#[command(name = "cv2x", version, about = "Coverage and rate of vehicular networks on random roads")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// SIR coverage probability over the sweep.
    Coverage(Common),
    /// Rate coverage over the sweep.
    Rate(Common),
    /// Association probabilities over the sweep.
    Assoc(Common),
    /// Load distribution of the tagged tier-2 node.
    Load(Common),
    /// Void probability of the tier-2 road process over `radius_km`.
    Voidprob(Common),
    /// K-function of the tier-2 road process over `radius_km`.
    Kfn(Common),
    /// Run both engines and fail on any point outside tolerance.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Quantity to validate; inferred from the sweep when omitted.
        #[arg(long, value_enum)]
        metric: Option<Metric>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Coverage,
    Rate,
    Load,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Analytic,
    Montecarlo,
    Both,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub config: PathBuf,
    /// Output CSV; overrides `run.output`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("numeric error: {0}")]
    Numeric(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("validation failed at {0} point(s)")]
    Breach(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Breach(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

/// Formats with 9 significant digits; empty for a missing value.
pub fn fmt_sig(v: Option<f64>) -> String {
    let Some(x) = v else {
        return String::new();
    };
    if x.is_nan() {
        return "nan".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..9).contains(&e) {
        let s = format!("{:.*}", (8 - e).max(0) as usize, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.8e}")
    }
}

/// One CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    /// Per-row verdict in validate mode.
    pub pass: Option<Vec<bool>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            pass: None,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        if self.pass.is_some() {
            out.push_str(",pass");
        }
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            let fields: Vec<String> = row.iter().map(|v| fmt_sig(*v)).collect();
            out.push_str(&fields.join(","));
            if let Some(p) = &self.pass {
                out.push_str(if p[i] { ",1" } else { ",0" });
            }
            out.push('\n');
        }
        out
    }

    /// Marks rows where `|analytic − mc| > max(tol, ci)`; returns the breach count.
    fn check(&mut self, analytic: usize, mc: usize, ci: usize, tol: f64) -> usize {
        let verdicts: Vec<bool> = self
            .rows
            .iter()
            .map(|r| match (r[analytic], r[mc]) {
                (Some(a), Some(m)) => (a - m).abs() <= tol.max(r[ci].unwrap_or(0.0)),
                _ => false,
            })
            .collect();
        let bad = verdicts.iter().filter(|v| !**v).count();
        self.pass = Some(verdicts);
        bad
    }
}

/// Writes through a temporary file in the same directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

fn sweep_values(cfg: &RunConfig, expect: &[SweepVariable]) -> Result<(SweepVariable, Vec<f64>), CliError> {
    let s = cfg.sweep.as_ref().ok_or_else(|| ConfigError::Invalid {
        key: "sweep.variable",
        unit: "name",
        reason: "this command needs a sweep".into(),
    })?;
    if !expect.is_empty() && !expect.contains(&s.variable) {
        let names: Vec<&str> = expect.iter().map(|v| v.name()).collect();
        return Err(ConfigError::Invalid {
            key: "sweep.variable",
            unit: "name",
            reason: format!("`{}` is not valid here; expected one of {}", s.variable, names.join(", ")),
        }
        .into());
    }
    Ok((s.variable, s.values.clone()))
}

const PARAM_SWEEPS: [SweepVariable; 4] = [
    SweepVariable::B1Db,
    SweepVariable::B2Db,
    SweepVariable::Lambda1PerKm2,
    SweepVariable::Lambda2PerKm,
];

fn with(extra: SweepVariable) -> Vec<SweepVariable> {
    let mut v = PARAM_SWEEPS.to_vec();
    v.push(extra);
    v
}

pub fn coverage_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let (var, xs) = sweep_values(cfg, &with(SweepVariable::BetaDb))?;
    let mut t = Table::new(&[var.name(), "pc_analytic", "pc_mc", "ci95"]);
    let points = xs.iter().map(|&x| cfg.at(x)).collect::<Result<Vec<_>, _>>()?;
    let analytic: Vec<Option<f64>> = if cfg.mode.analytic() {
        points
            .par_iter()
            .map(|pt| {
                let eq = equivalent_densities(&pt.params)?;
                let q = CoverageQuery {
                    beta: pt.beta,
                    quad_tol: cfg.quad_tol,
                    r_max: None,
                };
                Ok(Some(coverage_probability(&pt.params, &eq, q)?.total))
            })
            .collect::<Result<_, Error>>()?
    } else {
        vec![None; xs.len()]
    };
    let mut mc = vec![(None, None); xs.len()];
    if cfg.mode.montecarlo() {
        if var == SweepVariable::BetaDb {
            let betas: Vec<f64> = points.iter().map(|p| p.beta).collect();
            let run = estimate_coverage(&cfg.trial_config(cfg.params.clone())?, &betas)?;
            report_window(&run.window_check);
            for (i, m) in mc.iter_mut().enumerate() {
                *m = (Some(run.curve.estimate[i]), Some(run.curve.ci_halfwidth[i]));
            }
        } else {
            for (pt, m) in points.iter().zip(mc.iter_mut()) {
                let run = estimate_coverage(&cfg.trial_config(pt.params.clone())?, &[pt.beta])?;
                report_window(&run.window_check);
                *m = (Some(run.curve.estimate[0]), Some(run.curve.ci_halfwidth[0]));
            }
        }
    }
    for i in 0..xs.len() {
        t.rows.push(vec![Some(xs[i]), analytic[i], mc[i].0, mc[i].1]);
    }
    Ok(t)
}

fn report_window(w: &Option<crate::montecarlo::WindowCheck>) {
    if let Some(w) = w {
        eprintln!(
            "window check at {:.0} m: P_c {:.4} vs {:.4} at double radius (ci {:.4}) {}",
            w.radius,
            w.pc_at_radius,
            w.pc_at_double,
            w.ci_halfwidth,
            if w.passed() { "ok" } else { "WIDEN WINDOW" }
        );
    }
}

pub fn rate_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let (var, xs) = sweep_values(cfg, &with(SweepVariable::TargetMbps))?;
    let mut t = Table::new(&[var.name(), "rc_analytic", "rc_mc", "ci95"]);
    let points = xs.iter().map(|&x| cfg.at(x)).collect::<Result<Vec<_>, _>>()?;
    let query = |target| RateQuery {
        target_rate: target,
        j_trunc_eps: cfg.load_tail,
        quad_tol: cfg.quad_tol,
        unit_load: false,
    };
    let analytic: Vec<Option<f64>> = if !cfg.mode.analytic() {
        vec![None; xs.len()]
    } else if var == SweepVariable::TargetMbps {
        let eq = equivalent_densities(&cfg.params)?;
        let loads = LoadModel::new(&cfg.params, &eq, cfg.load_tail)?;
        points
            .par_iter()
            .map(|pt| Ok(Some(rate_coverage_with(&cfg.params, &eq, &loads, query(pt.target_rate))?)))
            .collect::<Result<_, Error>>()?
    } else {
        points
            .par_iter()
            .map(|pt| {
                let eq = equivalent_densities(&pt.params)?;
                let loads = LoadModel::new(&pt.params, &eq, cfg.load_tail)?;
                Ok(Some(rate_coverage_with(&pt.params, &eq, &loads, query(pt.target_rate))?))
            })
            .collect::<Result<_, Error>>()?
    };
    let mut mc = vec![(None, None); xs.len()];
    if cfg.mode.montecarlo() {
        if var == SweepVariable::TargetMbps {
            let targets: Vec<f64> = points.iter().map(|p| p.target_rate).collect();
            let run = estimate_rate_coverage(&cfg.trial_config(cfg.params.clone())?, &targets)?;
            for (i, m) in mc.iter_mut().enumerate() {
                *m = (Some(run.curve.estimate[i]), Some(run.curve.ci_halfwidth[i]));
            }
        } else {
            for (pt, m) in points.iter().zip(mc.iter_mut()) {
                let run = estimate_rate_coverage(&cfg.trial_config(pt.params.clone())?, &[pt.target_rate])?;
                *m = (Some(run.curve.estimate[0]), Some(run.curve.ci_halfwidth[0]));
            }
        }
    }
    for i in 0..xs.len() {
        t.rows.push(vec![Some(xs[i]), analytic[i], mc[i].0, mc[i].1]);
    }
    Ok(t)
}

pub fn assoc_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let (var, xs) = sweep_values(cfg, &[])?;
    let mut t = Table::new(&[var.name(), "p_e1", "p_e2", "p_e2_mc", "ci95"]);
    for x in xs {
        let pt = cfg.at(x)?;
        let eq = equivalent_densities(&pt.params)?;
        let (p1, p2) = if cfg.mode.analytic() {
            (Some(association_prob(&eq, Event::E1)), Some(association_prob(&eq, Event::E2)))
        } else {
            (None, None)
        };
        let (m, ci) = if cfg.mode.montecarlo() {
            let run = estimate_association(&cfg.trial_config(pt.params.clone())?)?;
            let f = run.fraction(Event::E2);
            (Some(f), Some(binomial_ci_halfwidth(f, run.n)))
        } else {
            (None, None)
        };
        t.rows.push(vec![Some(x), p1, p2, m, ci]);
    }
    Ok(t)
}

pub fn load_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let p = &cfg.params;
    let eq = equivalent_densities(p)?;
    let mut t = Table::new(&["j", "pmf_analytic", "cdf_analytic", "cdf_mc", "ci95"]);
    let an = if cfg.mode.analytic() {
        Some(tier2_load_pmf(&eq, p.lambda_r, cfg.load_tail)?)
    } else {
        None
    };
    let mc = if cfg.mode.montecarlo() {
        let run = measure_tier2_load(&cfg.trial_config(p.clone())?)?;
        Some((run.pmf(), run.n_tagged))
    } else {
        None
    };
    let max_j = an
        .as_ref()
        .map_or(1, |a| a.max_load())
        .max(mc.as_ref().map_or(1, |m| m.0.max_load()));
    for j in 1..=max_j {
        let pmf = an.as_ref().map(|a| a.probs.get(j).copied().unwrap_or(0.0));
        let cdf = an.as_ref().map(|a| a.cdf(j).min(1.0));
        let (cm, ci) = match &mc {
            Some((m, n)) => {
                let c = m.cdf(j).min(1.0);
                (Some(c), Some(binomial_ci_halfwidth(c, *n)))
            }
            None => (None, None),
        };
        t.rows.push(vec![Some(j as f64), pmf, cdf, cm, ci]);
    }
    Ok(t)
}

pub fn void_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let (_, xs) = sweep_values(cfg, &[SweepVariable::RadiusKm])?;
    let p = &cfg.params;
    let mut t = Table::new(&["radius_km", "void_analytic", "void_mc", "ci95"]);
    for x in xs {
        let r = x * 1e3;
        let a = if cfg.mode.analytic() {
            Some(void_prob_cox_disc(p.lambda_l(), p.lambda_2, r)?)
        } else {
            None
        };
        let (m, ci) = if cfg.mode.montecarlo() {
            let v = estimate_void_probability(p.mu_l, p.lambda_2, r, cfg.trials, cfg.seed)?;
            (Some(v), Some(binomial_ci_halfwidth(v, cfg.trials)))
        } else {
            (None, None)
        };
        t.rows.push(vec![Some(x), a, m, ci]);
    }
    Ok(t)
}

pub fn kfn_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let (_, xs) = sweep_values(cfg, &[SweepVariable::RadiusKm])?;
    let p = &cfg.params;
    let mut t = Table::new(&["radius_km", "k_model_km2", "k_mc_km2", "ci95"]);
    let radii: Vec<f64> = xs.iter().map(|x| x * 1e3).collect();
    let mc = if cfg.mode.montecarlo() {
        Some(estimate_k_function(p.mu_l, p.lambda_2, &radii, cfg.trials, cfg.seed)?)
    } else {
        None
    };
    for (i, (&x, &r)) in xs.iter().zip(&radii).enumerate() {
        let model = if cfg.mode.analytic() {
            Some(geometry::k_function_model(r, p.lambda_l())? * 1e-6)
        } else {
            None
        };
        let (m, ci) = match &mc {
            Some(v) => (Some(v[i].0 * 1e-6), Some(1.96 * v[i].1 * 1e-6)),
            None => (None, None),
        };
        t.rows.push(vec![Some(x), model, m, ci]);
    }
    Ok(t)
}

fn default_output(cmd: &str) -> &'static str {
    match cmd {
        "coverage" => "coverage_curve.csv",
        "rate" => "rate_curve.csv",
        "assoc" => "association.csv",
        "load" => "load_cdf.csv",
        "voidprob" => "void_probability.csv",
        "kfn" => "k_function.csv",
        _ => "validation.csv",
    }
}

fn prepare(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(n) = common.trials {
        if n == 0 {
            return Err(ConfigError::Invalid {
                key: "--trials",
                unit: "count",
                reason: "must be >= 1".into(),
            }
            .into());
        }
        cfg.trials = n;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(m) = common.mode {
        cfg.mode = match m {
            ModeArg::Analytic => Mode::Analytic,
            ModeArg::Montecarlo => Mode::Montecarlo,
            ModeArg::Both => Mode::Both,
        };
    }
    Ok(cfg)
}

fn infer_metric(cfg: &RunConfig) -> Metric {
    match cfg.sweep.as_ref().map(|s| s.variable) {
        None => Metric::Load,
        Some(SweepVariable::TargetMbps) => Metric::Rate,
        Some(_) => Metric::Coverage,
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("CV2X_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| ConfigError::Invalid {
        key: "CV2X_THREADS",
        unit: "count",
        reason: format!("not a non-negative integer: {v:?}"),
    })?;
    if n > 0 {
        // Fails only if a pool already exists, in which case it is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Runs one command and returns the path written.
pub fn execute(command: &Command) -> Result<PathBuf, CliError> {
    configure_threads()?;
    let (name, common, validate) = match command {
        Command::Coverage(c) => ("coverage", c, None),
        Command::Rate(c) => ("rate", c, None),
        Command::Assoc(c) => ("assoc", c, None),
        Command::Load(c) => ("load", c, None),
        Command::Voidprob(c) => ("voidprob", c, None),
        Command::Kfn(c) => ("kfn", c, None),
        Command::Validate { common, metric } => ("validate", common, Some(*metric)),
    };
    let mut cfg = prepare(common)?;
    let validate = validate.map(|m| m.unwrap_or_else(|| infer_metric(&cfg)));
    if validate.is_some() || cfg.mode == Mode::Validate {
        cfg.mode = Mode::Validate;
    }
    let metric = validate.unwrap_or(match name {
        "rate" => Metric::Rate,
        "load" => Metric::Load,
        _ => Metric::Coverage,
    });
    let mut table = match (name, metric) {
        ("validate", Metric::Coverage) | ("coverage", _) => coverage_table(&cfg)?,
        ("validate", Metric::Rate) | ("rate", _) => rate_table(&cfg)?,
        ("validate", Metric::Load) | ("load", _) => load_table(&cfg)?,
        ("assoc", _) => assoc_table(&cfg)?,
        ("voidprob", _) => void_table(&cfg)?,
        ("kfn", _) => kfn_table(&cfg)?,
        _ => unreachable!("every command is matched"),
    };
    let breaches = if cfg.mode == Mode::Validate {
        let (a, m, ci) = match metric {
            Metric::Load => (2, 3, 4),
            _ => (1, 2, 3),
        };
        table.check(a, m, ci, cfg.tol_abs)
    } else {
        0
    };
    let out = common
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from(default_output(name)));
    write_atomic(&out, &table.to_csv())?;
    if cfg.mode == Mode::Validate {
        for (row, ok) in table.rows.iter().zip(table.pass.as_deref().unwrap_or(&[])) {
            let a = row[if metric == Metric::Load { 2 } else { 1 }];
            let m = row[if metric == Metric::Load { 3 } else { 2 }];
            println!(
                "{}={} analytic={} mc={} {}",
                table.header[0],
                fmt_sig(row[0]),
                fmt_sig(a),
                fmt_sig(m),
                if *ok { "PASS" } else { "FAIL" }
            );
        }
    }
    if breaches > 0 {
        return Err(CliError::Breach(breaches));
    }
    Ok(out)
}

/// Entry point shared by the binary and tests.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli.command) {
        Ok(path) => {
            eprintln!("wrote {}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(Some(0.673892286686196)), "0.673892287");
        assert_eq!(fmt_sig(Some(-10.0)), "-10");
        assert_eq!(fmt_sig(Some(1.0)), "1");
        assert_eq!(fmt_sig(Some(123456789.4)), "123456789");
        assert_eq!(fmt_sig(Some(1.5e-7)), "1.50000000e-7");
        assert_eq!(fmt_sig(None), "");
        assert_eq!(fmt_sig(Some(0.0)), "0");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["beta_db", "pc_analytic", "pc_mc", "ci95"]);
        t.rows.push(vec![Some(0.0), Some(0.5), None, None]);
        assert_eq!(t.to_csv(), "beta_db,pc_analytic,pc_mc,ci95\n0,0.5,,\n");
        t.rows[0][2] = Some(0.52);
        t.rows[0][3] = Some(0.01);
        assert_eq!(t.check(1, 2, 3, 0.015), 1);
        assert_eq!(t.to_csv(), "beta_db,pc_analytic,pc_mc,ci95,pass\n0,0.5,0.52,0.01,0\n");
    }
}
