use super::association::{association_prob, r_max, serving_joint_pdf};
use super::laplace::{laplace_terms, scaled_integral, scaled_lt_derivatives};
use super::Event;
use crate::channel::{EquivalentDensities, NetworkParams};
use crate::error::{param_error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::special::{ln_factorial, rising_factorial};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageQuery {
    /// Linear SIR threshold.
    pub beta: f64,
    pub quad_tol: f64,
    /// Outer truncation of the serving distance; derived from `quad_tol` when `None`.
    pub r_max: Option<f64>,
}

impl CoverageQuery {
    pub fn new(beta: f64) -> Self {
        Self {
            beta,
            quad_tol: 1e-8,
            r_max: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(param_error("beta", format!("must be finite and > 0, got {}", self.beta)));
        }
        if !(self.quad_tol > 0.0 && self.quad_tol <= 1e-3) {
            return Err(param_error("quad_tol", format!("must lie in (0, 1e-3], got {}", self.quad_tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageResult {
    pub total: f64,
    /// `P(SIR > β | E1)`, `P(SIR > β | E2)`; NaN for an event of probability zero.
    pub conditional: [f64; 2],
    pub association: [f64; 2],
}

/// Polynomial form of `s^n η^{(n)}` at `s = mβr^α/(PG)`: each population
/// contributes `coef · r^dim` because the normalized lower limit does not
/// depend on `r`.
struct ScaledExponent {
    /// `(dim, coefficients for n = 0..m)`
    terms: Vec<(i32, Vec<f64>)>,
    m: usize,
}

impl ScaledExponent {
    fn new(p: &NetworkParams, eq: &EquivalentDensities, event: Event, beta: f64, opts: QuadOptions) -> Result<Self> {
        let t = laplace_terms(p, eq, event);
        let m = t.serving_m as usize;
        let mut terms = Vec::new();
        for pop in &t.populations {
            let w = pop.measure_weight();
            if w == 0.0 {
                continue;
            }
            let k = t.serving_m as f64 * beta * pop.power_gain / t.serving_power_gain;
            let scale = k.powf(1.0 / eq.alpha);
            let a = pop.exclusion / scale;
            let cd = scale.powi(pop.dim as i32);
            let mut coef = Vec::with_capacity(m);
            for n in 0..m as u32 {
                let i = scaled_integral(n, pop.m, eq.alpha, pop.dim, a, opts)?;
                let sign = if n % 2 == 0 && n > 0 { 1.0 } else { -1.0 };
                coef.push(sign * w * rising_factorial(pop.m, n) * cd * i);
            }
            terms.push((pop.dim as i32, coef));
        }
        Ok(Self { terms, m })
    }

    /// `P(SIR > β | r, E) = Σ_{k<m} (−1)^k A_k / k!`.
    fn conditional_ccdf(&self, r: f64) -> f64 {
        let mut e = vec![0.0; self.m];
        for (dim, coef) in &self.terms {
            let rd = r.powi(*dim);
            for (n, c) in coef.iter().enumerate() {
                e[n] += c * rd;
            }
        }
        let a = scaled_lt_derivatives(&e);
        a.iter()
            .enumerate()
            .map(|(k, v)| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * v * (-ln_factorial(k as u64)).exp()
            })
            .sum()
    }
}

fn inner_opts(quad_tol: f64) -> QuadOptions {
    QuadOptions {
        rel_tol: (quad_tol * 1e-2).max(1e-13),
        abs_tol: 0.0,
        max_panels: 4000,
    }
}

/// `P(SIR > β, E)`.
pub fn joint_coverage(p: &NetworkParams, eq: &EquivalentDensities, event: Event, q: CoverageQuery) -> Result<f64> {
    q.validate()?;
    let pe = association_prob(eq, event);
    if pe < 1e-300 {
        return Ok(0.0);
    }
    let rm = match q.r_max {
        Some(r) => r,
        None => r_max(eq, event, q.quad_tol * 1e-2)?,
    };
    let se = ScaledExponent::new(p, eq, event, q.beta, inner_opts(q.quad_tol))?;
    let outer = QuadOptions {
        rel_tol: q.quad_tol,
        abs_tol: 1e-15,
        max_panels: 4000,
    };
    let v = integrate(
        |r| serving_joint_pdf(r, eq, event) * se.conditional_ccdf(r),
        0.0,
        rm,
        outer,
    )?
    .value;
    Ok(v.clamp(0.0, pe))
}

/// `P(SIR > β | E)`.
pub fn conditional_coverage(
    p: &NetworkParams,
    eq: &EquivalentDensities,
    event: Event,
    q: CoverageQuery,
) -> Result<f64> {
    let pe = association_prob(eq, event);
    if pe < 1e-300 {
        return Err(crate::Error::DegenerateConditioning { probability: pe });
    }
    Ok((joint_coverage(p, eq, event, q)? / pe).clamp(0.0, 1.0))
}

/// SIR coverage probability of the typical receiver.
pub fn coverage_probability(p: &NetworkParams, eq: &EquivalentDensities, q: CoverageQuery) -> Result<CoverageResult> {
    let mut total = 0.0;
    let mut conditional = [f64::NAN; 2];
    let mut association = [0.0; 2];
    for ev in Event::BOTH {
        let pe = association_prob(eq, ev);
        association[ev.index()] = pe;
        let j = joint_coverage(p, eq, ev, q)?;
        total += j;
        if pe >= 1e-300 {
            conditional[ev.index()] = (j / pe).clamp(0.0, 1.0);
        }
    }
    Ok(CoverageResult {
        total: total.clamp(0.0, 1.0),
        conditional,
        association,
    })
}
