//! Poisson line processes, Cox processes on lines and planar PPPs inside a
//! disc window, plus the matching analytic void probabilities and K-function.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{ensure_nonneg, param_error, Result};
use crate::quad::{integrate, QuadOptions};

/// Undirected line `{x : x·(cos θ, sin θ) = ρ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineParam {
    pub rho: f64,
    pub theta: f64,
}

impl LineParam {
    /// The line through the origin along the x-axis.
    pub const TYPICAL: LineParam = LineParam {
        rho: 0.0,
        theta: FRAC_PI_2,
    };

    pub fn foot(&self) -> [f64; 2] {
        [self.rho * self.theta.cos(), self.rho * self.theta.sin()]
    }

    /// Unit vector along the line.
    pub fn direction(&self) -> [f64; 2] {
        [-self.theta.sin(), self.theta.cos()]
    }

    /// Point at signed arc position `t` measured from the foot of the perpendicular.
    pub fn point_at(&self, t: f64) -> [f64; 2] {
        let f = self.foot();
        let d = self.direction();
        [f[0] + t * d[0], f[1] + t * d[1]]
    }

    /// Half-length of the chord cut by the window, or `None` when the line misses it.
    pub fn chord_half_length(&self, window: SimWindow) -> Option<f64> {
        (self.rho < window.radius).then(|| (window.radius.powi(2) - self.rho.powi(2)).sqrt())
    }
}

/// Origin-centred disc that truncates the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimWindow {
    pub radius: f64,
}

impl SimWindow {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(param_error("window.radius", format!("must be > 0, got {radius}")));
        }
        Ok(Self { radius })
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LineSet {
    pub lines: Vec<LineParam>,
    pub includes_typical_line: bool,
}

impl LineSet {
    /// Appends the line through the origin; a second call is a no-op.
    pub fn push_typical_line(&mut self) -> usize {
        if !self.includes_typical_line {
            self.lines.push(LineParam::TYPICAL);
            self.includes_typical_line = true;
        }
        self.typical_index().expect("typical line present")
    }

    pub fn typical_index(&self) -> Option<usize> {
        if !self.includes_typical_line {
            return None;
        }
        self.lines.iter().position(|l| *l == LineParam::TYPICAL)
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Total chord length inside the window per unit window area.
    pub fn line_density_estimate(&self, window: SimWindow) -> f64 {
        let total: f64 = self
            .lines
            .iter()
            .filter_map(|l| l.chord_half_length(window))
            .map(|h| 2.0 * h)
            .sum();
        total / window.area()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointMark {
    pub tier: Tier,
    pub line_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointPattern {
    pub points: Vec<[f64; 2]>,
    pub marks: Vec<PointMark>,
}

impl PointPattern {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn extend(&mut self, other: PointPattern) {
        self.points.extend(other.points);
        self.marks.extend(other.marks);
    }

    /// Number of points within distance `r` of the origin.
    pub fn count_within(&self, r: f64) -> usize {
        let r2 = r * r;
        self.points
            .iter()
            .filter(|p| p[0] * p[0] + p[1] * p[1] <= r2)
            .count()
    }
}

pub(crate) fn poisson_count<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("finite positive mean");
    d.sample(rng) as u64
}

/// Samples the lines of a PLP with line density `mu_l` that hit the window.
///
/// The hitting lines form a PPP of intensity `mu_l / π` on `[0, R) × [0, 2π)`.
pub fn sample_plp<R: Rng + ?Sized>(mu_l: f64, window: SimWindow, rng: &mut R) -> Result<LineSet> {
    ensure_nonneg("mu_l", mu_l)?;
    let lambda_l = mu_l / PI;
    let n = poisson_count(rng, lambda_l * TAU * window.radius);
    let lines = (0..n)
        .map(|_| LineParam {
            rho: window.radius * rng.random::<f64>(),
            theta: TAU * rng.random::<f64>(),
        })
        .collect();
    Ok(LineSet {
        lines,
        includes_typical_line: false,
    })
}

/// Arc positions of a 1D PPP of intensity `lambda_p` on the chord of `line`.
pub fn sample_chord_positions<R: Rng + ?Sized>(
    line: &LineParam,
    lambda_p: f64,
    window: SimWindow,
    rng: &mut R,
) -> Vec<f64> {
    let Some(h) = line.chord_half_length(window) else {
        return Vec::new();
    };
    let n = poisson_count(rng, lambda_p * 2.0 * h);
    (0..n).map(|_| h * (2.0 * rng.random::<f64>() - 1.0)).collect()
}

/// Independent 1D PPPs of intensity `lambda_p` on every chord of `lines`.
pub fn sample_points_on_lines<R: Rng + ?Sized>(
    lines: &LineSet,
    lambda_p: f64,
    window: SimWindow,
    rng: &mut R,
) -> Result<PointPattern> {
    ensure_nonneg("lambda_p", lambda_p)?;
    let mut out = PointPattern::default();
    for (i, line) in lines.lines.iter().enumerate() {
        for t in sample_chord_positions(line, lambda_p, window, rng) {
            out.points.push(line.point_at(t));
            out.marks.push(PointMark {
                tier: Tier::Two,
                line_index: Some(i),
            });
        }
    }
    Ok(out)
}

/// Uniform position in the window disc.
pub(crate) fn uniform_in_disc<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> [f64; 2] {
    let r = radius * rng.random::<f64>().sqrt();
    let phi = TAU * rng.random::<f64>();
    [r * phi.cos(), r * phi.sin()]
}

/// Homogeneous planar PPP of intensity `lambda` (per square meter).
pub fn sample_ppp_2d<R: Rng + ?Sized>(
    lambda: f64,
    window: SimWindow,
    rng: &mut R,
) -> Result<PointPattern> {
    ensure_nonneg("lambda", lambda)?;
    let n = poisson_count(rng, lambda * window.area());
    let mut out = PointPattern::default();
    for _ in 0..n {
        out.points.push(uniform_in_disc(window.radius, rng));
        out.marks.push(PointMark {
            tier: Tier::One,
            line_index: None,
        });
    }
    Ok(out)
}

/// Void probability of the PLP-driven Cox process on the disc `b(o, r)`.
///
/// `lambda_l` is the representation-space intensity (`mu_l / π`). The chord
/// length of `L(ρ, θ)` in the disc is `2√(r² − ρ²)`; the ρ-integral is taken
/// after `ρ = r sin φ`, which removes the square-root endpoint behaviour.
pub fn void_prob_cox_disc(lambda_l: f64, lambda_p: f64, r: f64) -> Result<f64> {
    ensure_nonneg("lambda_l", lambda_l)?;
    ensure_nonneg("lambda_p", lambda_p)?;
    ensure_nonneg("r", r)?;
    if r == 0.0 || lambda_p == 0.0 || lambda_l == 0.0 {
        return Ok(1.0);
    }
    let opts = QuadOptions {
        rel_tol: 1e-9,
        abs_tol: 0.0,
        max_panels: 2000,
    };
    let inner = integrate(
        |phi: f64| {
            let c = phi.cos();
            -(-2.0 * lambda_p * r * c).exp_m1() * c
        },
        0.0,
        FRAC_PI_2,
        opts,
    )?;
    Ok((-TAU * lambda_l * r * inner.value).exp())
}

pub fn void_prob_ppp_disc(lambda_a: f64, r: f64) -> f64 {
    (-lambda_a * PI * r * r).exp()
}

/// Model K-function of a typical-line 1D PPP superposed on a planar PPP:
/// `2r / (π λ_l) + π r²`.
pub fn k_function_model(r: f64, lambda_l: f64) -> Result<f64> {
    ensure_nonneg("r", r)?;
    if !(lambda_l.is_finite() && lambda_l > 0.0) {
        return Err(param_error("lambda_l", format!("must be > 0, got {lambda_l}")));
    }
    Ok(2.0 * r / (PI * lambda_l) + PI * r * r)
}

/// Naive K estimate about the origin: mean count within `r` over `intensity`,
/// with the standard error of that mean.
pub fn empirical_k_from_origin<'a, I>(patterns: I, r: f64, intensity: f64) -> (f64, f64)
where
    I: IntoIterator<Item = &'a PointPattern>,
{
    let counts: Vec<f64> = patterns
        .into_iter()
        .map(|p| p.count_within(r) as f64 / intensity)
        .collect();
    mean_and_se(&counts)
}

pub(crate) fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
