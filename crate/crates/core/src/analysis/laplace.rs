use std::f64::consts::PI;

use super::Event;
use crate::channel::{EquivalentDensities, NetworkParams};
use crate::error::{ensure_nonneg, Result};
use crate::quad::{integrate_tail, integrate_to_infinity, QuadOptions};
use crate::special::{binomial, rising_factorial};

/// One homogeneous interferer population of the Laplace exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Population {
    /// Intensity of the displaced process (1/m or 1/m²).
    pub density: f64,
    /// 1 for the typical-line population, 2 for planar ones.
    pub dim: u32,
    /// Transmit power times antenna gain, W.
    pub power_gain: f64,
    pub m: u32,
    /// Lower integration limit per unit serving distance.
    pub exclusion: f64,
}

impl Population {
    /// `2πλ` for planar populations, `2λ` on the line.
    pub fn measure_weight(&self) -> f64 {
        if self.dim == 2 {
            2.0 * PI * self.density
        } else {
            2.0 * self.density
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceExponentTerms {
    /// Tier-1 main lobe, tier-1 side lobe, typical-line tier 2, planar tier 2.
    pub populations: [Population; 4],
    /// Power-gain product and fading order of the serving link.
    pub serving_power_gain: f64,
    pub serving_m: u32,
}

/// Populations interfering with a receiver served under `event`.
pub fn laplace_terms(p: &NetworkParams, eq: &EquivalentDensities, event: Event) -> LaplaceExponentTerms {
    let (tier1_excl, line_excl) = match event {
        Event::E1 => (1.0, eq.zeta21.powf(1.0 / eq.alpha)),
        Event::E2 => (eq.zeta21.powf(-1.0 / eq.alpha), 1.0),
    };
    let populations = [
        Population {
            density: p.q_c * eq.lambda1_e,
            dim: 2,
            power_gain: p.p1 * p.g1_main,
            m: p.m1,
            exclusion: tier1_excl,
        },
        Population {
            density: (1.0 - p.q_c) * eq.lambda1_e,
            dim: 2,
            power_gain: p.p1 * p.g1_side,
            m: p.m1,
            exclusion: tier1_excl,
        },
        Population {
            density: eq.lambda2_e,
            dim: 1,
            power_gain: p.p2 * p.g2_main,
            m: p.m20,
            exclusion: line_excl,
        },
        Population {
            density: eq.lambda2_a,
            dim: 2,
            power_gain: p.p2 * p.g2_side,
            m: p.m21,
            exclusion: 0.0,
        },
    ];
    let (serving_power_gain, serving_m) = match event {
        Event::E1 => (p.p1 * p.g1_main, p.m1),
        Event::E2 => (p.p2 * p.g2_main, p.m20),
    };
    LaplaceExponentTerms {
        populations,
        serving_power_gain,
        serving_m,
    }
}

/// `∫_{a}^∞ h_n(u) u^{d−1} du` with `x = u^{−α}/m`, `h_0 = 1 − (1+x)^{−m}` and
/// `h_n = x^n (1+x)^{−m−n}`.
pub(crate) fn scaled_integral(n: u32, m: u32, alpha: f64, dim: u32, a: f64, opts: QuadOptions) -> Result<f64> {
    if a.is_infinite() {
        return Ok(0.0);
    }
    let mf = m as f64;
    let nf = n as f64;
    let d1 = dim as f64 - 1.0;
    let f = move |u: f64| -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let lx = -alpha * u.ln() - mf.ln();
        let x = lx.exp();
        let h = if n == 0 {
            -(-mf * x.ln_1p()).exp_m1()
        } else {
            (nf * lx - (mf + nf) * x.ln_1p()).exp()
        };
        h * u.powf(d1)
    };
    let knee = 1.0;
    Ok(integrate_to_infinity(f, a, knee, opts)?.value)
}

/// `s^n η^{(n)}(s)` for n = 0..=n_max, using the dimensionless integrals.
pub(crate) fn scaled_exponent_derivatives(
    terms: &LaplaceExponentTerms,
    alpha: f64,
    s: f64,
    r: f64,
    n_max: u32,
    opts: QuadOptions,
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; n_max as usize + 1];
    if s == 0.0 {
        return Ok(out);
    }
    for pop in &terms.populations {
        let w = pop.measure_weight();
        if w == 0.0 {
            continue;
        }
        let c = s * pop.power_gain;
        let scale = c.powf(1.0 / alpha);
        let a = pop.exclusion * r / scale;
        let cd = scale.powi(pop.dim as i32);
        for n in 0..=n_max {
            let i = scaled_integral(n, pop.m, alpha, pop.dim, a, opts)?;
            let sign = if n == 0 { -1.0 } else if n % 2 == 0 { 1.0 } else { -1.0 };
            // n ≥ 1: −(−1)^{n+1} = (−1)^n
            out[n as usize] += sign * w * rising_factorial(pop.m, n) * cd * i;
        }
    }
    Ok(out)
}

/// Scaled derivatives `A_k = s^k ℒ^{(k)}` from `E_n = s^n η^{(n)}`.
pub(crate) fn scaled_lt_derivatives(e: &[f64]) -> Vec<f64> {
    let mut a = Vec::with_capacity(e.len());
    a.push(e[0].exp());
    for k in 1..e.len() {
        let mut acc = 0.0;
        for j in 0..k {
            acc += binomial(k as u32 - 1, j as u32) * e[k - j] * a[j];
        }
        a.push(acc);
    }
    a
}

/// Exponent `η(s | r, event) = ln ℒ_I(s)` integrated directly in the distance domain.
pub fn laplace_exponent(
    s: f64,
    r: f64,
    p: &NetworkParams,
    eq: &EquivalentDensities,
    event: Event,
    opts: QuadOptions,
) -> Result<f64> {
    ensure_nonneg("s", s)?;
    ensure_nonneg("r", r)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    let terms = laplace_terms(p, eq, event);
    let alpha = eq.alpha;
    let mut eta = 0.0;
    for pop in &terms.populations {
        let w = pop.measure_weight();
        if w == 0.0 {
            continue;
        }
        let m = pop.m as f64;
        let k = s * pop.power_gain / m;
        let d1 = pop.dim as i32 - 1;
        let f = |y: f64| -> f64 {
            if y <= 0.0 {
                return if d1 == 0 { 1.0 } else { 0.0 };
            }
            let x = k * y.powf(-alpha);
            -(-m * x.ln_1p()).exp_m1() * y.powi(d1)
        };
        let lower = pop.exclusion * r;
        let knee = k.powf(1.0 / alpha);
        let v = if lower > 0.0 {
            integrate_tail(f, lower, opts)?.value
        } else {
            integrate_to_infinity(f, 0.0, knee, opts)?.value
        };
        eta -= w * v;
    }
    Ok(eta)
}

/// `ℒ_I^{(k)}(s | r, event)` for k = 0..=k_max.
///
/// At `s = 0` the derivatives are the closed-form moments, which are infinite
/// for populations without an exclusion zone.
pub fn laplace_transform_derivatives(
    s: f64,
    r: f64,
    p: &NetworkParams,
    eq: &EquivalentDensities,
    event: Event,
    k_max: u32,
    opts: QuadOptions,
) -> Result<Vec<f64>> {
    ensure_nonneg("s", s)?;
    ensure_nonneg("r", r)?;
    let terms = laplace_terms(p, eq, event);
    if s > 0.0 {
        let e = scaled_exponent_derivatives(&terms, eq.alpha, s, r, k_max, opts)?;
        let a = scaled_lt_derivatives(&e);
        return Ok(a
            .iter()
            .enumerate()
            .map(|(k, v)| v / s.powi(k as i32))
            .collect());
    }
    // s = 0: η^{(n)}(0) = (−1)^n Σ w (m)_n (PG/m)^n a^{d−αn}/(αn − d)
    let mut eta = vec![0.0; k_max as usize + 1];
    for pop in &terms.populations {
        let w = pop.measure_weight();
        if w == 0.0 {
            continue;
        }
        let a = pop.exclusion * r;
        for n in 1..=k_max {
            let nf = n as f64;
            let d = pop.dim as f64;
            let moment = if a > 0.0 {
                a.powf(d - eq.alpha * nf) / (eq.alpha * nf - d)
            } else {
                f64::INFINITY
            };
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            eta[n as usize] += sign
                * w
                * rising_factorial(pop.m, n)
                * (pop.power_gain / pop.m as f64).powi(n as i32)
                * moment;
        }
    }
    let mut l = vec![1.0];
    for k in 1..=k_max as usize {
        let mut acc = 0.0;
        for j in 0..k {
            acc += binomial(k as u32 - 1, j as u32) * eta[k - j] * l[j];
        }
        l.push(acc);
    }
    Ok(l)
}
