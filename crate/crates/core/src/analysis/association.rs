use std::f64::consts::PI;

use super::Event;
use crate::channel::EquivalentDensities;
use crate::error::{ensure_nonneg, Error, Result};
use crate::special::erfcx;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Coefficient of r² in the tier-1 void exponent seen from a tier-2 server.
fn tier1_exclusion(eq: &EquivalentDensities) -> f64 {
    PI * eq.lambda1_e * eq.zeta21.powf(-2.0 / eq.alpha)
}

fn p_e2(eq: &EquivalentDensities) -> f64 {
    if eq.lambda2_e == 0.0 {
        return 0.0;
    }
    let a = tier1_exclusion(eq);
    if a == 0.0 {
        return 1.0;
    }
    let x = eq.lambda2_e / a.sqrt();
    (SQRT_PI * x * erfcx(x)).min(1.0)
}

/// Probability that the typical receiver associates with tier 1 (`E1`) or with a
/// tier-2 node on its own line (`E2`).
pub fn association_prob(eq: &EquivalentDensities, which: Event) -> f64 {
    match which {
        Event::E2 => p_e2(eq),
        Event::E1 => 1.0 - p_e2(eq),
    }
}

/// Quadratic and linear coefficients `(A, B)` of the exponent of the joint
/// serving-distance density, `exp(−A r² − B r)`.
fn exponent_coefficients(eq: &EquivalentDensities, event: Event) -> (f64, f64) {
    match event {
        Event::E1 => (
            PI * eq.lambda1_e,
            2.0 * eq.zeta21.powf(1.0 / eq.alpha) * eq.lambda2_e,
        ),
        Event::E2 => (tier1_exclusion(eq), 2.0 * eq.lambda2_e),
    }
}

/// Density of the serving distance jointly with the event, `f(r | E) P(E)`.
pub fn serving_joint_pdf(r: f64, eq: &EquivalentDensities, event: Event) -> f64 {
    if r < 0.0 {
        return 0.0;
    }
    let (a, b) = exponent_coefficients(eq, event);
    let e = (-a * r * r - b * r).exp();
    match event {
        Event::E1 => 2.0 * PI * eq.lambda1_e * r * e,
        Event::E2 => 2.0 * eq.lambda2_e * e,
    }
}

fn conditioning(eq: &EquivalentDensities, event: Event) -> Result<f64> {
    let p = association_prob(eq, event);
    if p < 1e-300 {
        return Err(Error::DegenerateConditioning { probability: p });
    }
    Ok(p)
}

/// Serving-distance density conditioned on the association event.
pub fn serving_pdf(r: f64, eq: &EquivalentDensities, event: Event) -> Result<f64> {
    ensure_nonneg("r", r)?;
    let p = conditioning(eq, event)?;
    Ok(serving_joint_pdf(r, eq, event) / p)
}

/// `∫_0^r exp(−A t² − B t) dt` through the scaled erfc.
fn gaussian_partial(a: f64, b: f64, r: f64) -> f64 {
    if a == 0.0 {
        return if b == 0.0 { r } else { -(-b * r).exp_m1() / b };
    }
    let sa = a.sqrt();
    let y = b / (2.0 * sa);
    let tail = erfcx(y + sa * r) * (-a * r * r - b * r).exp();
    SQRT_PI / (2.0 * sa) * (erfcx(y) - tail)
}

/// Conditional serving-distance CDF, in closed form.
pub fn serving_cdf(r: f64, eq: &EquivalentDensities, event: Event) -> Result<f64> {
    ensure_nonneg("r", r)?;
    let p = conditioning(eq, event)?;
    let (a, b) = exponent_coefficients(eq, event);
    let joint = match event {
        // 2A t e = d/dt(−e) − B e
        Event::E1 => -(-a * r * r - b * r).exp_m1() - b * gaussian_partial(a, b, r),
        Event::E2 => 2.0 * eq.lambda2_e * gaussian_partial(a, b, r),
    };
    Ok((joint / p).clamp(0.0, 1.0))
}

/// Radius beyond which the conditional serving-distance tail is below `tol`.
///
/// Uses the bound `P(R > r, E) ≤ exp(−A r² − B r)`.
pub fn r_max(eq: &EquivalentDensities, event: Event, tol: f64) -> Result<f64> {
    let p = conditioning(eq, event)?;
    let (a, b) = exponent_coefficients(eq, event);
    let l = (1.0 / (tol * p)).ln().max(0.0);
    let r = if a > 0.0 {
        (-b + (b * b + 4.0 * a * l).sqrt()) / (2.0 * a)
    } else if b > 0.0 {
        l / b
    } else {
        return Err(Error::DegenerateConditioning { probability: p });
    };
    Ok(r)
}
