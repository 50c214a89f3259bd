//! Cell lengths and loads of tier-2 and tier-1 nodes, and rate coverage.

use std::f64::consts::PI;

use crate::analysis::{association_prob, joint_coverage, CoverageQuery, Event};
use crate::channel::{EquivalentDensities, NetworkParams};
use crate::error::{ensure_nonneg, param_error, Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::special::poisson_pmf;

/// Tabulated length distribution on a fixed grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CellLengthDist {
    /// Increasing lengths in meters, starting at 0.
    pub grid: Vec<f64>,
    pub pdf: Vec<f64>,
    pub mean: f64,
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

impl CellLengthDist {
    fn from_samples(grid: Vec<f64>, pdf: Vec<f64>) -> Self {
        let mass = trapezoid(&grid, &pdf);
        let first: Vec<f64> = grid.iter().zip(&pdf).map(|(z, f)| z * f).collect();
        let mean = trapezoid(&grid, &first) / mass;
        Self { grid, pdf, mean }
    }

    /// Trapezoidal integral of the tabulated density.
    pub fn mass(&self) -> f64 {
        trapezoid(&self.grid, &self.pdf)
    }

    /// Density at `z` by linear interpolation; zero off the grid.
    pub fn pdf_at(&self, z: f64) -> f64 {
        let g = &self.grid;
        if z < g[0] || z > g[g.len() - 1] {
            return 0.0;
        }
        let i = g.partition_point(|&x| x <= z).clamp(1, g.len() - 1);
        let t = (z - g[i - 1]) / (g[i] - g[i - 1]);
        self.pdf[i - 1] + t * (self.pdf[i] - self.pdf[i - 1])
    }

    /// CDF at the grid points, normalized to end at 1.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = vec![0.0];
        for (xs, ys) in self.grid.windows(2).zip(self.pdf.windows(2)) {
            acc += 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]);
            out.push(acc);
        }
        let total = acc;
        out.iter_mut().for_each(|v| *v /= total);
        out
    }

    /// CDF at `z` by interpolating the grid CDF.
    pub fn cdf_at(&self, z: f64) -> f64 {
        let g = &self.grid;
        if z <= g[0] {
            return 0.0;
        }
        if z >= g[g.len() - 1] {
            return 1.0;
        }
        let c = self.cdf();
        let i = g.partition_point(|&x| x <= z).clamp(1, g.len() - 1);
        let t = (z - g[i - 1]) / (g[i] - g[i - 1]);
        c[i - 1] + t * (c[i] - c[i - 1])
    }
}

fn branch_bounds(z0: f64, k: f64) -> (f64, f64) {
    ((k - 1.0) / (k + 1.0) * z0, (k + 1.0) / (k - 1.0) * z0)
}

/// Half-angles of the two lens arcs for discs `b(z1-point, k z1)` and
/// `b(z0-point, k z0)` with centers `z0 + z1` apart.
fn lens_angles(z0: f64, z1: f64, k: f64) -> (f64, f64) {
    let d = z0 + z1;
    let ct = (d * d + (k * z0).powi(2) - (k * z1).powi(2)) / (2.0 * k * z0 * d);
    let cp = (d * d - (k * z0).powi(2) + (k * z1).powi(2)) / (2.0 * k * z1 * d);
    (ct.clamp(-1.0, 1.0).acos(), cp.clamp(-1.0, 1.0).acos())
}

fn gamma22(z0: f64, z1: f64, k: f64) -> f64 {
    let (theta, phi) = lens_angles(z0, z1, k);
    PI * k * k * z1 * z1
        - (k * z0).powi(2) * (theta - 0.5 * (2.0 * theta).sin())
        - (k * z1).powi(2) * (phi - 0.5 * (2.0 * phi).sin())
}

/// `∂γ22/∂z1`: disc growth minus the arc inside the other disc, plus the
/// shrinking chord as the centers separate.
fn gamma22_dz1(z0: f64, z1: f64, k: f64) -> f64 {
    let (theta, phi) = lens_angles(z0, z1, k);
    2.0 * PI * k * k * z1 - 2.0 * k * k * z1 * phi + 2.0 * k * z0 * theta.sin()
}

/// Area of `b(z1-point, k z1) ∖ b(z0-point, k z0)` in the partial-overlap branch.
pub fn lens_area_gamma22(z0: f64, z1: f64, k: f64) -> Result<f64> {
    if !(k > 1.0) {
        return Err(Error::UnsupportedRegime(format!("k = {k} must exceed 1")));
    }
    let (lo, hi) = branch_bounds(z0, k);
    let slack = 1e-12 * hi.max(1.0);
    if !(z0 > 0.0 && z1 >= lo - slack && z1 <= hi + slack) {
        return Err(Error::BranchDomain(format!(
            "z1 = {z1} outside [{lo}, {hi}] for z0 = {z0}"
        )));
    }
    Ok(gamma22(z0, z1, k))
}

struct CellModel {
    l1: f64,
    l2: f64,
    k: f64,
}

impl CellModel {
    fn new(eq: &EquivalentDensities) -> Result<Self> {
        let k = eq.k();
        if !(k > 1.0) {
            return Err(Error::UnsupportedRegime(format!(
                "exclusion ratio k = {k} <= 1: tier-2 nodes dominate tier 1 everywhere"
            )));
        }
        if !(eq.lambda2_e > 0.0) {
            return Err(param_error("lambda2_e", "tier-2 density must be positive for cell lengths"));
        }
        Ok(Self {
            l1: eq.lambda1_e,
            l2: eq.lambda2_e,
            k,
        })
    }

    fn f_z0(&self, z0: f64) -> f64 {
        let c = self.l1 * PI * self.k * self.k;
        (2.0 * self.l2 + 2.0 * c * z0) * (-2.0 * self.l2 * z0 - c * z0 * z0).exp()
    }

    fn f_z1_inner(&self, z1: f64) -> f64 {
        2.0 * self.l2 * (-2.0 * self.l2 * z1).exp()
    }

    fn f_z1_middle(&self, z0: f64, z1: f64) -> f64 {
        let g = gamma22(z0, z1, self.k);
        let dg = gamma22_dz1(z0, z1, self.k);
        (2.0 * self.l2 + self.l1 * dg) * (-2.0 * self.l2 * z1 - self.l1 * g).exp()
    }

    fn f_z1_outer(&self, z0: f64, z1: f64) -> f64 {
        let c = self.l1 * PI * self.k * self.k;
        (2.0 * self.l2 + 2.0 * c * z1) * (-2.0 * self.l2 * z1 - c * (z1 * z1 - z0 * z0)).exp()
    }

    fn pdf(&self, z: f64, opts: QuadOptions) -> Result<f64> {
        if z <= 0.0 {
            return Ok(0.0);
        }
        let k = self.k;
        let a = (k - 1.0) / (2.0 * k) * z;
        let b = (k + 1.0) / (2.0 * k) * z;
        let outer = integrate(|z0| self.f_z1_outer(z0, z - z0) * self.f_z0(z0), 0.0, a, opts)?;
        let middle = integrate(|z0| self.f_z1_middle(z0, z - z0) * self.f_z0(z0), a, b, opts)?;
        let inner = integrate(|z0| self.f_z1_inner(z - z0) * self.f_z0(z0), b, z, opts)?;
        Ok(outer.value + middle.value + inner.value)
    }
}

fn cell_opts() -> QuadOptions {
    QuadOptions {
        rel_tol: 1e-9,
        abs_tol: 0.0,
        max_panels: 2000,
    }
}

/// Density of the length of a typical tier-2 cell.
pub fn typical_cell_length_pdf(z: f64, eq: &EquivalentDensities) -> Result<f64> {
    CellModel::new(eq)?.pdf(z, cell_opts())
}

/// Number of log-spaced grid points after the leading zero.
pub const CELL_GRID_POINTS: usize = 2048;

/// Upper end of the length grid in units of `1/λ2e`.
///
/// `P(Z0 + Z1 > z) ≤ 2 exp(−λ2e z)`, and the size-biased tail carries an extra
/// factor of order `λ2e z`; 24 keeps both below 1e-8.
const GRID_SPAN: f64 = 24.0;

/// Tabulated typical tier-2 cell-length distribution.
pub fn typical_cell_length(eq: &EquivalentDensities) -> Result<CellLengthDist> {
    let model = CellModel::new(eq)?;
    let lo = 1e-3 / model.l2;
    let hi = GRID_SPAN / model.l2;
    let ratio = (hi / lo).ln();
    let mut grid = Vec::with_capacity(CELL_GRID_POINTS + 1);
    grid.push(0.0);
    for i in 0..CELL_GRID_POINTS {
        grid.push(lo * (ratio * i as f64 / (CELL_GRID_POINTS - 1) as f64).exp());
    }
    let opts = cell_opts();
    let pdf = grid
        .iter()
        .map(|&z| model.pdf(z, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(CellLengthDist::from_samples(grid, pdf))
}

/// Density of the tagged cell length: the typical density biased by length.
pub fn tagged_cell_length_pdf(w: f64, typical: &CellLengthDist) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    w * typical.pdf_at(w) / (typical.mean * typical.mass())
}

/// Tagged cell-length distribution on the typical grid.
pub fn tagged_cell_length(typical: &CellLengthDist) -> CellLengthDist {
    let pdf = typical
        .grid
        .iter()
        .zip(&typical.pdf)
        .map(|(w, f)| w * f)
        .collect();
    let mut d = CellLengthDist::from_samples(typical.grid.clone(), pdf);
    let mass = d.mass();
    d.pdf.iter_mut().for_each(|v| *v /= mass);
    d
}

/// Distribution of the total load `J ≥ 1`, including the typical receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadPmf {
    /// `probs[j] = P(J = j)`; `probs[0]` is always zero.
    pub probs: Vec<f64>,
}

impl LoadPmf {
    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(j, p)| j as f64 * p).sum()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `P(J ≤ j)`.
    pub fn cdf(&self, j: usize) -> f64 {
        self.probs.iter().take(j + 1).sum::<f64>().min(1.0)
    }

    pub fn max_load(&self) -> usize {
        self.probs.len() - 1
    }
}

/// Hard cap on the number of PMF terms.
pub const LOAD_PMF_CAP: usize = 10_000;

/// Poisson mixture over a tagged-length distribution.
pub fn tier2_load_pmf_from(tagged: &CellLengthDist, lambda_r: f64, j_trunc_eps: f64) -> Result<LoadPmf> {
    ensure_nonneg("lambda_r", lambda_r)?;
    let mass = tagged.mass();
    let mut probs = vec![0.0];
    let mut cum = 0.0;
    for j in 0..LOAD_PMF_CAP as u64 {
        let y: Vec<f64> = tagged
            .grid
            .iter()
            .zip(&tagged.pdf)
            .map(|(w, f)| poisson_pmf(j, lambda_r * w) * f)
            .collect();
        let p = trapezoid(&tagged.grid, &y) / mass;
        probs.push(p);
        cum += p;
        if 1.0 - cum < j_trunc_eps {
            return Ok(LoadPmf { probs });
        }
    }
    Err(Error::Truncation {
        cap: LOAD_PMF_CAP,
        tail: 1.0 - cum,
    })
}

/// Load on the tier-2 node serving the typical receiver.
pub fn tier2_load_pmf(eq: &EquivalentDensities, lambda_r: f64, j_trunc_eps: f64) -> Result<LoadPmf> {
    if lambda_r == 0.0 {
        return Ok(LoadPmf {
            probs: vec![0.0, 1.0],
        });
    }
    let typ = typical_cell_length(eq)?;
    tier2_load_pmf_from(&tagged_cell_length(&typ), lambda_r, j_trunc_eps)
}

/// Mean load of the tier-1 node serving the typical receiver.
///
/// `typical` may be `None` only when there is no tier-2 coverage to subtract.
pub fn tier1_mean_load(
    eq: &EquivalentDensities,
    lambda_r: f64,
    mu_l: f64,
    typical: Option<&CellLengthDist>,
) -> Result<f64> {
    ensure_nonneg("lambda_r", lambda_r)?;
    ensure_nonneg("mu_l", mu_l)?;
    if lambda_r == 0.0 {
        return Ok(1.0);
    }
    if !(eq.lambda1_e > 0.0) {
        return Err(param_error("lambda1_e", "tier-1 density must be positive for tier-1 load"));
    }
    let covered = match typical {
        Some(t) => eq.lambda2_e * t.mean,
        None if eq.lambda2_e == 0.0 => 0.0,
        None => return Err(param_error("typical", "cell-length distribution required when lambda2_e > 0")),
    };
    if covered >= 1.0 {
        return Err(Error::ModelRegime { fraction: covered });
    }
    let lambda_l = mu_l / PI;
    let road_in_cell = 1.28 * PI * lambda_l / eq.lambda1_e + 3.216 / (PI * eq.lambda1_e.sqrt());
    Ok(1.0 + lambda_r * road_in_cell * (1.0 - covered))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateQuery {
    /// Target rate, bit/s.
    pub target_rate: f64,
    pub j_trunc_eps: f64,
    pub quad_tol: f64,
    /// Use `J = 1` for both tiers instead of the load model.
    pub unit_load: bool,
}

impl RateQuery {
    pub fn new(target_rate: f64) -> Self {
        Self {
            target_rate,
            j_trunc_eps: 1e-9,
            quad_tol: 1e-8,
            unit_load: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateResult {
    pub total: f64,
    /// Joint contributions `P(rate > T, E_i)`.
    pub joint: [f64; 2],
    pub tier1_mean_load: f64,
    pub tier2_load: LoadPmf,
}

/// Everything in rate coverage that does not depend on the target rate.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadModel {
    pub tier1_mean_load: f64,
    pub tier2_load: LoadPmf,
}

impl LoadModel {
    pub fn new(p: &NetworkParams, eq: &EquivalentDensities, j_trunc_eps: f64) -> Result<Self> {
        let has_e1 = association_prob(eq, Event::E1) > 0.0;
        let has_e2 = association_prob(eq, Event::E2) > 0.0;
        let typical = if eq.lambda2_e > 0.0 && (has_e2 || p.lambda_r > 0.0) {
            Some(typical_cell_length(eq)?)
        } else {
            None
        };
        let tier1_mean_load = if has_e1 {
            tier1_mean_load(eq, p.lambda_r, p.mu_l, typical.as_ref())?
        } else {
            f64::NAN
        };
        let tier2_load = match (&typical, has_e2) {
            (Some(t), true) if p.lambda_r > 0.0 => {
                tier2_load_pmf_from(&tagged_cell_length(t), p.lambda_r, j_trunc_eps)?
            }
            _ => LoadPmf {
                probs: vec![0.0, 1.0],
            },
        };
        Ok(Self {
            tier1_mean_load,
            tier2_load,
        })
    }

    pub fn unit() -> Self {
        Self {
            tier1_mean_load: 1.0,
            tier2_load: LoadPmf {
                probs: vec![0.0, 1.0],
            },
        }
    }
}

fn sir_threshold(target: f64, load: f64, bandwidth: f64) -> f64 {
    (target * load / bandwidth * std::f64::consts::LN_2).exp_m1()
}

fn joint_parts(
    p: &NetworkParams,
    eq: &EquivalentDensities,
    loads: &LoadModel,
    q: RateQuery,
) -> Result<[f64; 2]> {
    if !(q.target_rate.is_finite() && q.target_rate > 0.0) {
        return Err(param_error("target_rate", format!("must be > 0, got {}", q.target_rate)));
    }
    let cq = |beta| CoverageQuery {
        beta,
        quad_tol: q.quad_tol,
        r_max: None,
    };
    let mut joint = [0.0; 2];
    if association_prob(eq, Event::E1) > 0.0 {
        let beta = sir_threshold(q.target_rate, loads.tier1_mean_load, p.bandwidth);
        joint[0] = joint_coverage(p, eq, Event::E1, cq(beta))?;
    }
    if association_prob(eq, Event::E2) > 0.0 {
        for (j, pj) in loads.tier2_load.probs.iter().enumerate().skip(1) {
            if *pj < 1e-15 {
                continue;
            }
            let beta = sir_threshold(q.target_rate, j as f64, p.bandwidth);
            joint[1] += pj * joint_coverage(p, eq, Event::E2, cq(beta))?;
        }
    }
    Ok(joint)
}

/// Rate coverage with a precomputed load model.
pub fn rate_coverage_with(
    p: &NetworkParams,
    eq: &EquivalentDensities,
    loads: &LoadModel,
    q: RateQuery,
) -> Result<f64> {
    let j = joint_parts(p, eq, loads, q)?;
    Ok((j[0] + j[1]).clamp(0.0, 1.0))
}

/// Probability that the per-user rate `(W/J) log2(1 + SIR)` exceeds the target.
pub fn rate_coverage(p: &NetworkParams, eq: &EquivalentDensities, q: RateQuery) -> Result<RateResult> {
    let loads = if q.unit_load {
        LoadModel::unit()
    } else {
        LoadModel::new(p, eq, q.j_trunc_eps)?
    };
    let joint = joint_parts(p, eq, &loads, q)?;
    Ok(RateResult {
        total: (joint[0] + joint[1]).clamp(0.0, 1.0),
        joint,
        tier1_mean_load: loads.tier1_mean_load,
        tier2_load: loads.tier2_load,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::coverage_probability;
    use crate::channel::equivalent_densities;
    use crate::rng::seeded;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn eq() -> EquivalentDensities {
        equivalent_densities(&NetworkParams::default()).unwrap()
    }

    #[test]
    fn area_at_branch_limits() {
        let k = 2.5;
        let z0 = 40.0;
        let (lo, hi) = branch_bounds(z0, k);
        assert!(lens_area_gamma22(z0, lo, k).unwrap().abs() < 1e-9 * (k * z0).powi(2));
        let outer = PI * k * k * (hi * hi - z0 * z0);
        assert_relative_eq!(lens_area_gamma22(z0, hi, k).unwrap(), outer, max_relative = 1e-9);
        assert!(matches!(lens_area_gamma22(z0, 0.5 * lo, k), Err(Error::BranchDomain(_))));
        assert!(matches!(lens_area_gamma22(z0, 20.0, 0.9), Err(Error::UnsupportedRegime(_))));
    }

    #[test]
    fn area_matches_dart_throwing() {
        // k = 2, z0 = z1 = 1: disc of radius 2 at x = 1 minus disc of radius 2 at x = −1.
        let mut rng = seeded(17);
        let n = 2_000_000;
        let mut hits = 0u64;
        for _ in 0..n {
            let x = -1.0 + 4.0 * rng.random::<f64>();
            let y = -2.0 + 4.0 * rng.random::<f64>();
            let in_b1 = (x - 1.0).powi(2) + y * y <= 4.0;
            let in_b0 = (x + 1.0).powi(2) + y * y <= 4.0;
            if in_b1 && !in_b0 {
                hits += 1;
            }
        }
        let frac = hits as f64 / n as f64;
        let se = (frac * (1.0 - frac) / n as f64).sqrt() * 16.0;
        let area = lens_area_gamma22(1.0, 1.0, 2.0).unwrap();
        assert!((frac * 16.0 - area).abs() < 3.0 * se, "{area} vs {}", frac * 16.0);
    }

    #[test]
    fn area_derivative_is_consistent() {
        let k = 3.0;
        for (z0, z1) in [(10.0, 6.0), (10.0, 11.0), (5.0, 9.5)] {
            let h = 1e-5;
            let fd = (gamma22(z0, z1 + h, k) - gamma22(z0, z1 - h, k)) / (2.0 * h);
            assert_relative_eq!(gamma22_dz1(z0, z1, k), fd, max_relative = 1e-6);
        }
        // matches the neighbouring branches at both ends
        let (lo, hi) = branch_bounds(7.0, k);
        assert!(gamma22_dz1(7.0, lo, k).abs() < 1e-6);
        assert_relative_eq!(gamma22_dz1(7.0, hi, k), 2.0 * PI * k * k * hi, max_relative = 1e-6);
    }

    #[test]
    fn typical_pdf_normalizes() {
        let d = typical_cell_length(&eq()).unwrap();
        assert_relative_eq!(d.mass(), 1.0, epsilon = 1e-3);
        assert!(d.pdf.iter().all(|&v| v >= 0.0));
        assert_eq!(typical_cell_length_pdf(0.0, &eq()).unwrap(), 0.0);
    }

    #[test]
    fn vanishing_tier1_gives_gamma2() {
        let mut e = eq();
        e.lambda1_e = 1e-30;
        let l = e.lambda2_e;
        for z in [10.0, 200.0, 700.0, 2500.0] {
            let exact = 4.0 * l * l * z * (-2.0 * l * z).exp();
            assert_relative_eq!(typical_cell_length_pdf(z, &e).unwrap(), exact, max_relative = 1e-6);
        }
        let d = typical_cell_length(&e).unwrap();
        let t = tagged_cell_length(&d);
        assert_relative_eq!(t.mean / d.mean, 1.5, max_relative = 1e-3);
    }

    #[test]
    fn tagged_is_length_biased() {
        let d = typical_cell_length(&eq()).unwrap();
        let t = tagged_cell_length(&d);
        assert_relative_eq!(t.mass(), 1.0, epsilon = 1e-12);
        assert!(t.mean > d.mean);
        let w = 300.0;
        assert_relative_eq!(tagged_cell_length_pdf(w, &d), t.pdf_at(w), max_relative = 1e-3);
    }

    #[test]
    fn load_pmf_properties() {
        let e = eq();
        let unit = tier2_load_pmf(&e, 0.0, 1e-9).unwrap();
        assert_eq!(unit.probs, vec![0.0, 1.0]);
        let d = typical_cell_length(&e).unwrap();
        let t = tagged_cell_length(&d);
        let lr = 15e-3;
        let pmf = tier2_load_pmf_from(&t, lr, 1e-9).unwrap();
        assert_eq!(pmf.probs[0], 0.0);
        assert_relative_eq!(pmf.total(), 1.0, epsilon = 1e-6);
        assert_relative_eq!(pmf.mean(), 1.0 + lr * t.mean, max_relative = 1e-3);
    }

    #[test]
    fn truncation_cap_is_reported() {
        let d = typical_cell_length(&eq()).unwrap();
        let t = tagged_cell_length(&d);
        assert!(matches!(tier2_load_pmf_from(&t, 100.0, 1e-9), Err(Error::Truncation { .. })));
    }

    #[test]
    fn tier1_load_edge_cases() {
        let mut e = eq();
        assert_eq!(tier1_mean_load(&e, 0.0, 1e-2, None).unwrap(), 1.0);
        e.lambda2_e = 0.0;
        let v = tier1_mean_load(&e, 15e-3, 10e-3, None).unwrap();
        let expect = 1.0 + 15e-3 * (1.28 * 10e-3 / e.lambda1_e + 3.216 / (PI * e.lambda1_e.sqrt()));
        assert_relative_eq!(v, expect, max_relative = 1e-14);
        let e = eq();
        let mut d = typical_cell_length(&e).unwrap();
        d.mean = 2.0 / e.lambda2_e;
        assert!(matches!(
            tier1_mean_load(&e, 15e-3, 10e-3, Some(&d)),
            Err(Error::ModelRegime { .. })
        ));
    }

    #[test]
    fn unit_load_rate_equals_coverage() {
        let p = NetworkParams::default();
        let e = eq();
        let t = 2e6;
        let q = RateQuery {
            unit_load: true,
            ..RateQuery::new(t)
        };
        let rc = rate_coverage(&p, &e, q).unwrap().total;
        let beta = 2f64.powf(t / p.bandwidth) - 1.0;
        let pc = coverage_probability(&p, &e, CoverageQuery::new(beta)).unwrap().total;
        assert_relative_eq!(rc, pc, epsilon = 1e-10);
    }

    #[test]
    fn rate_coverage_monotone_in_target() {
        let p = NetworkParams::default();
        let e = eq();
        let loads = LoadModel::new(&p, &e, 1e-9).unwrap();
        let mut last = 1.0;
        for t in [1e6, 5e6, 10e6, 50e6] {
            let v = rate_coverage_with(&p, &e, &loads, RateQuery::new(t)).unwrap();
            assert!(v <= last);
            last = v;
        }
        let tiny = rate_coverage_with(&p, &e, &loads, RateQuery::new(1.0)).unwrap();
        assert!(tiny > 0.999);
    }
}
