//! Monte-Carlo simulation of the original network: per-node shadowing,
//! biased association, SIR and the loads of serving nodes.
//!
//! Every trial draws from its own counter-based streams (see [`crate::rng`]),
//! and results are collected in trial order, so statistics do not depend on
//! the thread count.

mod cells;
mod network;

use rayon::prelude::*;

pub use cells::{LineCell, Polygon, Tier1Load};
pub use network::{
    associate, sample_candidates, sample_realization, sir, Association, Candidates, LineNode, Realization,
    Tier1Node,
};

use crate::analysis::Event;
use crate::channel::{equivalent_densities, NetworkParams};
use crate::error::{param_error, Result};
use crate::geometry::{empirical_k_from_origin, poisson_count, sample_plp, sample_points_on_lines, SimWindow};
use crate::load::LoadPmf;
use crate::rng::{trial_stream, Purpose};
use crate::stats::binomial_ci_halfwidth;

/// Smallest window radius the defaults allow, meters.
pub const MIN_WINDOW_RADIUS: f64 = 10_000.0;

/// Default window radius: five characteristic radii of the densest relevant
/// planar process, and never below 10 km.
pub fn default_window_radius(p: &NetworkParams) -> Result<f64> {
    let eq = equivalent_densities(p)?;
    let mut r = MIN_WINDOW_RADIUS;
    if eq.lambda1_e > 0.0 {
        r = r.max(5.0 / eq.lambda1_e.sqrt());
    }
    if eq.lambda2_a > 0.0 {
        r = r.max(5.0 / eq.lambda2_a.sqrt());
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub params: NetworkParams,
    pub window: SimWindow,
    pub master_seed: u64,
    pub n_trials: u64,
    /// Also run the window-doubling check.
    pub truncation_check: bool,
    /// Accept a window smaller than [`default_window_radius`].
    pub allow_small_window: bool,
}

impl TrialConfig {
    pub fn new(params: NetworkParams, master_seed: u64, n_trials: u64) -> Result<Self> {
        params.validate()?;
        let window = SimWindow::new(default_window_radius(&params)?)?;
        let cfg = Self {
            params,
            window,
            master_seed,
            n_trials,
            truncation_check: false,
            allow_small_window: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.n_trials == 0 {
            return Err(param_error("n_trials", "must be >= 1"));
        }
        SimWindow::new(self.window.radius)?;
        let need = default_window_radius(&self.params)?;
        if !self.allow_small_window && self.window.radius < need * (1.0 - 1e-12) {
            return Err(param_error(
                "window.radius",
                format!("{} m is below the truncation heuristic of {need} m", self.window.radius),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirOutcome {
    pub event: Event,
    pub sir: f64,
    /// Distance to the serving node, meters.
    pub serving_distance: f64,
    /// Serving distance after absorbing the serving node's shadowing.
    pub effective_distance: f64,
    pub tagged_load: Option<u32>,
    /// The load was measured on a cell clipped by the window.
    pub load_clipped: bool,
    /// Empty realizations discarded before this one.
    pub rejected: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCurve {
    pub x: Vec<f64>,
    pub estimate: Vec<f64>,
    pub ci_halfwidth: Vec<f64>,
    pub n: u64,
}

impl EmpiricalCurve {
    /// Fraction of `values` strictly above each threshold.
    pub fn exceedance(x: &[f64], values: &[f64]) -> Self {
        let n = values.len() as u64;
        let estimate: Vec<f64> = x
            .iter()
            .map(|&t| values.iter().filter(|&&v| v > t).count() as f64 / n.max(1) as f64)
            .collect();
        let ci_halfwidth = estimate.iter().map(|&p| binomial_ci_halfwidth(p, n)).collect();
        Self {
            x: x.to_vec(),
            estimate,
            ci_halfwidth,
            n,
        }
    }
}

fn par_trials<T, F>(n: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

fn outcome(r: &Realization, p: &NetworkParams, a: &Association, limit: f64) -> SirOutcome {
    SirOutcome {
        event: a.event,
        sir: sir(r, p, a, limit),
        serving_distance: a.distance,
        effective_distance: a.effective_distance,
        tagged_load: None,
        load_clipped: false,
        rejected: r.candidates.rejected,
    }
}

fn network(cfg: &TrialConfig, idx: u64) -> (Realization, Association) {
    let mut rng = trial_stream(cfg.master_seed, idx, Purpose::Network);
    let r = sample_realization(&cfg.params, cfg.window, &mut rng);
    let a = associate(&r.candidates, &cfg.params, cfg.window.radius).expect("rejection guarantees a candidate");
    (r, a)
}

/// One trial: realization, association and SIR, without load.
pub fn run_trial(cfg: &TrialConfig, trial_index: u64) -> SirOutcome {
    let (r, a) = network(cfg, trial_index);
    outcome(&r, &cfg.params, &a, cfg.window.radius)
}

/// One trial including the load of the serving node.
pub fn run_trial_with_load(cfg: &TrialConfig, trial_index: u64) -> SirOutcome {
    let p = &cfg.params;
    let (r, a) = network(cfg, trial_index);
    let mut out = outcome(&r, p, &a, cfg.window.radius);
    let mut rng = trial_stream(cfg.master_seed, trial_index, Purpose::Load);
    match a.event {
        Event::E1 => {
            let l = cells::tier1_load(&r, p, a.index, &mut rng);
            out.tagged_load = Some(l.load);
            out.load_clipped = l.clipped;
        }
        Event::E2 => {
            let cell = cells::tagged_tier2_cell(&r.candidates, p, a.index, cfg.window.radius);
            out.tagged_load = Some(cells::tier2_load(&cell, p, cfg.window.radius, &mut rng));
            out.load_clipped = cell.clipped;
        }
    }
    out
}

/// All trials of `cfg`, in trial order.
pub fn simulate(cfg: &TrialConfig) -> Result<Vec<SirOutcome>> {
    cfg.validate()?;
    par_trials(cfg.n_trials, |i| Ok(run_trial(cfg, i)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowCheck {
    pub radius: f64,
    pub pc_at_radius: f64,
    pub pc_at_double: f64,
    pub ci_halfwidth: f64,
    pub n: u64,
}

impl WindowCheck {
    pub fn passed(&self) -> bool {
        (self.pc_at_double - self.pc_at_radius).abs() < self.ci_halfwidth
    }
}

const WINDOW_CHECK_TRIALS: u64 = 5000;

/// Compares coverage at 0 dB in the configured window and in one of twice
/// the radius. Both use the same realizations, sampled in the larger window
/// and restricted to the smaller one.
pub fn window_check(cfg: &TrialConfig) -> Result<WindowCheck> {
    cfg.validate()?;
    let p = &cfg.params;
    let r = cfg.window.radius;
    let big = SimWindow::new(2.0 * r)?;
    let n = cfg.n_trials.min(WINDOW_CHECK_TRIALS);
    let pairs = par_trials(n, |i| {
        let mut rng = trial_stream(cfg.master_seed, i, Purpose::Aux);
        let real = sample_realization(p, big, &mut rng);
        let at = |limit: f64| {
            associate(&real.candidates, p, limit).map_or(false, |a| sir(&real, p, &a, limit) > 1.0)
        };
        Ok((at(r), at(2.0 * r)))
    })?;
    let small = pairs.iter().filter(|x| x.0).count() as f64 / n as f64;
    let large = pairs.iter().filter(|x| x.1).count() as f64 / n as f64;
    Ok(WindowCheck {
        radius: r,
        pc_at_radius: small,
        pc_at_double: large,
        ci_halfwidth: binomial_ci_halfwidth(small, n),
        n,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageRun {
    /// Thresholds in linear scale.
    pub curve: EmpiricalCurve,
    /// Fraction of trials associated with each event.
    pub association: [f64; 2],
    pub rejected: u64,
    pub window_check: Option<WindowCheck>,
}

/// SIR coverage at each linear threshold, all thresholds sharing the trials.
pub fn estimate_coverage(cfg: &TrialConfig, betas: &[f64]) -> Result<CoverageRun> {
    let outs = simulate(cfg)?;
    let sirs: Vec<f64> = outs.iter().map(|o| o.sir).collect();
    let n = outs.len() as f64;
    let e2 = outs.iter().filter(|o| o.event == Event::E2).count() as f64 / n;
    let window_check = if cfg.truncation_check {
        Some(window_check(cfg)?)
    } else {
        None
    };
    Ok(CoverageRun {
        curve: EmpiricalCurve::exceedance(betas, &sirs),
        association: [1.0 - e2, e2],
        rejected: outs.iter().map(|o| o.rejected as u64).sum(),
        window_check,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssociationRun {
    pub n: u64,
    pub counts: [u64; 2],
    /// Effective serving distances, grouped by event.
    pub effective_distances: [Vec<f64>; 2],
    pub rejected: u64,
}

impl AssociationRun {
    pub fn fraction(&self, e: Event) -> f64 {
        self.counts[e.index()] as f64 / self.n as f64
    }
}

/// Association statistics from the candidate prefix of each trial only.
pub fn estimate_association(cfg: &TrialConfig) -> Result<AssociationRun> {
    cfg.validate()?;
    let p = &cfg.params;
    let outs = par_trials(cfg.n_trials, |i| {
        let mut rng = trial_stream(cfg.master_seed, i, Purpose::Network);
        let c = sample_candidates(p, cfg.window, &mut rng);
        let a = associate(&c, p, cfg.window.radius).expect("rejection guarantees a candidate");
        Ok((a, c.rejected))
    })?;
    let mut run = AssociationRun {
        n: cfg.n_trials,
        counts: [0; 2],
        effective_distances: [Vec::new(), Vec::new()],
        rejected: 0,
    };
    for (a, rej) in outs {
        let k = a.event.index();
        run.counts[k] += 1;
        run.effective_distances[k].push(a.effective_distance);
        run.rejected += rej as u64;
    }
    Ok(run)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tier2LoadRun {
    /// Trials associated with a tier-2 node.
    pub n_tagged: u64,
    pub loads: Vec<u32>,
    pub tagged_lengths: Vec<f64>,
    /// Cell lengths of arbitrary typical-line nodes, one per trial when available.
    pub typical_lengths: Vec<f64>,
    pub clipped: u64,
}

impl Tier2LoadRun {
    pub fn pmf(&self) -> LoadPmf {
        empirical_pmf(&self.loads)
    }
}

/// Empirical PMF indexed by load, entry 0 unused.
pub fn empirical_pmf(loads: &[u32]) -> LoadPmf {
    let max = loads.iter().copied().max().unwrap_or(1) as usize;
    let mut probs = vec![0.0; max + 1];
    for &l in loads {
        probs[l as usize] += 1.0;
    }
    let n = loads.len().max(1) as f64;
    probs.iter_mut().for_each(|v| *v /= n);
    LoadPmf { probs }
}

/// Tagged tier-2 loads and cell lengths. Only association candidates are
/// sampled; other roads do not influence a typical-line cell.
pub fn measure_tier2_load(cfg: &TrialConfig) -> Result<Tier2LoadRun> {
    cfg.validate()?;
    let p = &cfg.params;
    let radius = cfg.window.radius;
    let outs = par_trials(cfg.n_trials, |i| {
        let mut rng = trial_stream(cfg.master_seed, i, Purpose::Network);
        let c = sample_candidates(p, cfg.window, &mut rng);
        let a = associate(&c, p, radius).expect("rejection guarantees a candidate");
        let typical = cells::typical_tier2_cell(&c, p, radius / 4.0, radius);
        let tagged = (a.event == Event::E2).then(|| {
            let cell = cells::tagged_tier2_cell(&c, p, a.index, radius);
            let mut lrng = trial_stream(cfg.master_seed, i, Purpose::Load);
            (cell, cells::tier2_load(&cell, p, radius, &mut lrng))
        });
        Ok((typical, tagged))
    })?;
    let mut run = Tier2LoadRun {
        n_tagged: 0,
        loads: Vec::new(),
        tagged_lengths: Vec::new(),
        typical_lengths: Vec::new(),
        clipped: 0,
    };
    for (typical, tagged) in outs {
        if let Some(c) = typical.filter(|c| !c.clipped) {
            run.typical_lengths.push(c.length());
        }
        if let Some((cell, load)) = tagged {
            run.n_tagged += 1;
            run.clipped += cell.clipped as u64;
            run.loads.push(load);
            run.tagged_lengths.push(cell.length());
        }
    }
    Ok(run)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tier1LoadRun {
    pub n_tagged: u64,
    pub loads: Vec<u32>,
    pub road_lengths: Vec<f64>,
    /// Trials whose tagged cell touched the window box.
    pub flagged: u64,
}

impl Tier1LoadRun {
    pub fn mean(&self) -> f64 {
        self.loads.iter().map(|&l| l as f64).sum::<f64>() / self.loads.len().max(1) as f64
    }

    pub fn flagged_fraction(&self) -> f64 {
        self.flagged as f64 / self.n_tagged.max(1) as f64
    }
}

/// Loads of tagged tier-1 nodes over the trials associated with tier 1.
pub fn measure_tier1_load(cfg: &TrialConfig) -> Result<Tier1LoadRun> {
    cfg.validate()?;
    let p = &cfg.params;
    let outs = par_trials(cfg.n_trials, |i| {
        let (r, a) = network(cfg, i);
        if a.event != Event::E1 {
            return Ok(None);
        }
        let mut rng = trial_stream(cfg.master_seed, i, Purpose::Load);
        Ok(Some(cells::tier1_load(&r, p, a.index, &mut rng)))
    })?;
    let mut run = Tier1LoadRun {
        n_tagged: 0,
        loads: Vec::new(),
        road_lengths: Vec::new(),
        flagged: 0,
    };
    for l in outs.into_iter().flatten() {
        run.n_tagged += 1;
        run.flagged += l.clipped as u64;
        run.loads.push(l.load);
        run.road_lengths.push(l.road_length);
    }
    Ok(run)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRun {
    /// Targets in bit/s.
    pub curve: EmpiricalCurve,
    pub mean_load: [f64; 2],
    pub flagged: u64,
}

/// Per-user rate `(W/J) log2(1 + SIR)` with `J` the measured load of the
/// serving node, and its exceedance curve over `targets` (bit/s).
pub fn estimate_rate_coverage(cfg: &TrialConfig, targets: &[f64]) -> Result<RateRun> {
    cfg.validate()?;
    let outs = par_trials(cfg.n_trials, |i| Ok(run_trial_with_load(cfg, i)))?;
    let w = cfg.params.bandwidth;
    let rates: Vec<f64> = outs
        .iter()
        .map(|o| w / o.tagged_load.unwrap_or(1) as f64 * o.sir.ln_1p() / std::f64::consts::LN_2)
        .collect();
    let mut sums = [0.0; 2];
    let mut counts = [0.0; 2];
    for o in &outs {
        sums[o.event.index()] += o.tagged_load.unwrap_or(1) as f64;
        counts[o.event.index()] += 1.0;
    }
    Ok(RateRun {
        curve: EmpiricalCurve::exceedance(targets, &rates),
        mean_load: [sums[0] / counts[0], sums[1] / counts[1]],
        flagged: outs.iter().filter(|o| o.load_clipped).count() as u64,
    })
}

/// Fraction of stationary Cox realizations with no point in `b(o, r)`.
///
/// Only lines hitting the disc matter, so the window is the disc itself.
pub fn estimate_void_probability(mu_l: f64, lambda_p: f64, r: f64, n: u64, seed: u64) -> Result<f64> {
    let window = SimWindow::new(r)?;
    let empty = par_trials(n, |i| {
        let mut rng = trial_stream(seed, i, Purpose::Aux);
        let lines = sample_plp(mu_l, window, &mut rng)?;
        Ok(lines.lines.iter().all(|l| {
            let h = l.chord_half_length(window).unwrap_or(0.0);
            poisson_count(&mut rng, lambda_p * 2.0 * h) == 0
        }))
    })?;
    Ok(empty.iter().filter(|&&e| e).count() as f64 / n as f64)
}

/// Mean count of tier-2 points within each radius of the receiver on the
/// typical road, over `intensity = mu_l lambda_p`, with its standard error.
pub fn estimate_k_function(mu_l: f64, lambda_p: f64, radii: &[f64], n: u64, seed: u64) -> Result<Vec<(f64, f64)>> {
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let window = SimWindow::new(r_max)?;
    let intensity = mu_l * lambda_p;
    if intensity <= 0.0 {
        return Err(param_error("lambda_p", "K-function needs a positive point intensity"));
    }
    let patterns = par_trials(n, |i| {
        let mut rng = trial_stream(seed, i, Purpose::Aux);
        let mut lines = sample_plp(mu_l, window, &mut rng)?;
        lines.push_typical_line();
        sample_points_on_lines(&lines, lambda_p, window, &mut rng)
    })?;
    Ok(radii
        .iter()
        .map(|&r| empirical_k_from_origin(&patterns, r, intensity))
        .collect())
}
