//! Propagation constants, shadowing moments, equivalent densities and the
//! per-node random draws used by the simulator.

use std::f64::consts::{LN_10, PI};

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{param_error, Error, Result};

/// All model constants in SI units (meters, watts, hertz) and linear scale.
///
/// Shadowing means and deviations stay in dB because the moments are
/// written in terms of the underlying normal.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    /// Mean road length per unit area, 1/m.
    pub mu_l: f64,
    /// Tier-1 density, 1/m².
    pub lambda_1: f64,
    /// Tier-2 density per unit road length, 1/m.
    pub lambda_2: f64,
    /// Receiving-user density per unit road length, 1/m.
    pub lambda_r: f64,
    pub alpha: f64,
    pub p1: f64,
    pub p2: f64,
    pub g1_main: f64,
    pub g1_side: f64,
    pub g2_main: f64,
    pub g2_side: f64,
    pub q_c: f64,
    pub b1: f64,
    pub b2: f64,
    pub m1: u32,
    pub m20: u32,
    pub m21: u32,
    pub omega_1: f64,
    pub omega_20: f64,
    pub omega_21: f64,
    pub sigma_1: f64,
    pub sigma_20: f64,
    pub sigma_21: f64,
    /// Bandwidth, Hz.
    pub bandwidth: f64,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

impl Default for NetworkParams {
    /// Baseline road network: 10 roads/km, 0.5 MBS/km², 4 vehicular nodes/km.
    fn default() -> Self {
        Self {
            mu_l: 10e-3,
            lambda_1: 0.5e-6,
            lambda_2: 4e-3,
            lambda_r: 15e-3,
            alpha: 4.0,
            p1: dbm_to_watts(40.0),
            p2: dbm_to_watts(23.0),
            g1_main: 1.0,
            g1_side: 0.01,
            g2_main: 1.0,
            g2_side: 0.01,
            q_c: 0.05,
            b1: 1.0,
            b2: 1.0,
            m1: 1,
            m20: 1,
            m21: 1,
            omega_1: 0.0,
            omega_20: 0.0,
            omega_21: 0.0,
            sigma_1: 4.0,
            sigma_20: 2.0,
            sigma_21: 4.0,
            bandwidth: 10e6,
        }
    }
}

fn check(name: &'static str, v: f64, positive: bool) -> Result<()> {
    let ok = v.is_finite() && if positive { v > 0.0 } else { v >= 0.0 };
    if ok {
        Ok(())
    } else {
        let bound = if positive { "> 0" } else { ">= 0" };
        Err(param_error(name, format!("must be finite and {bound}, got {v}")))
    }
}

impl NetworkParams {
    /// Representation-space intensity of the line process, `mu_l / π`.
    pub fn lambda_l(&self) -> f64 {
        self.mu_l / PI
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 2.0) {
            return Err(param_error(
                "alpha",
                format!("path-loss exponent must exceed 2 for finite interference, got {}", self.alpha),
            ));
        }
        check("mu_l", self.mu_l, false)?;
        check("lambda_1", self.lambda_1, false)?;
        check("lambda_2", self.lambda_2, false)?;
        check("lambda_r", self.lambda_r, false)?;
        check("p1", self.p1, true)?;
        check("p2", self.p2, true)?;
        check("g1_main", self.g1_main, true)?;
        check("g1_side", self.g1_side, true)?;
        check("g2_main", self.g2_main, true)?;
        check("g2_side", self.g2_side, true)?;
        check("b1", self.b1, true)?;
        check("b2", self.b2, true)?;
        check("bandwidth", self.bandwidth, true)?;
        check("sigma_1", self.sigma_1, false)?;
        check("sigma_20", self.sigma_20, false)?;
        check("sigma_21", self.sigma_21, false)?;
        for (name, v) in [
            ("omega_1", self.omega_1),
            ("omega_20", self.omega_20),
            ("omega_21", self.omega_21),
        ] {
            if !v.is_finite() {
                return Err(param_error(name, "must be finite"));
            }
        }
        if !(0.0..=1.0).contains(&self.q_c) {
            return Err(param_error("q_c", format!("must lie in [0, 1], got {}", self.q_c)));
        }
        for (name, m) in [("m1", self.m1), ("m20", self.m20), ("m21", self.m21)] {
            if m == 0 {
                return Err(param_error(name, "Nakagami parameter must be >= 1"));
            }
        }
        if self.lambda_1 == 0.0 && self.lambda_2 == 0.0 {
            return Err(param_error("lambda_1", "tier-1 and tier-2 densities are both zero"));
        }
        Ok(())
    }

    /// `P2 B2 G2 / (P1 B1 G1)`.
    pub fn zeta21(&self) -> f64 {
        (self.p2 * self.b2 * self.g2_main) / (self.p1 * self.b1 * self.g1_main)
    }
}

/// Densities of the shadow-displaced processes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalentDensities {
    /// Tier-1, 1/m².
    pub lambda1_e: f64,
    /// Tier-2 on the typical line, 1/m.
    pub lambda2_e: f64,
    /// Planar approximation of tier-2 off the typical line, 1/m².
    pub lambda2_a: f64,
    pub zeta21: f64,
    pub alpha: f64,
}

impl EquivalentDensities {
    /// Ratio of exclusion radii `ζ21^{-1/α}`.
    pub fn k(&self) -> f64 {
        self.zeta21.powf(-1.0 / self.alpha)
    }
}

/// `E[X^{-c}]` for `10 log10 X ~ N(omega, sigma²)`.
pub fn lognormal_neg_moment(omega_db: f64, sigma_db: f64, c: f64) -> f64 {
    let s = LN_10 / 10.0;
    (-c * omega_db * s + 0.5 * (c * sigma_db * s).powi(2)).exp()
}

pub fn equivalent_densities(p: &NetworkParams) -> Result<EquivalentDensities> {
    p.validate()?;
    let a = p.alpha;
    Ok(EquivalentDensities {
        lambda1_e: lognormal_neg_moment(p.omega_1, p.sigma_1, 2.0 / a) * p.lambda_1,
        lambda2_e: lognormal_neg_moment(p.omega_20, p.sigma_20, 1.0 / a) * p.lambda_2,
        lambda2_a: lognormal_neg_moment(p.omega_21, p.sigma_21, 2.0 / a)
            * PI
            * p.lambda_l()
            * p.lambda_2,
        zeta21: p.zeta21(),
        alpha: a,
    })
}

/// Gamma(m, 1/m) power gain of Nakagami-m fading, as a sum of `m` unit exponentials.
pub fn sample_nakagami_power_gain<R: Rng + ?Sized>(m: u32, rng: &mut R) -> f64 {
    let m = m.max(1);
    let s: f64 = (0..m).map(|_| -> f64 { Exp1.sample(rng) }).sum();
    s / m as f64
}

/// Linear shadowing factor with `10 log10 X ~ N(omega, sigma²)`.
pub fn sample_shadowing<R: Rng + ?Sized>(omega_db: f64, sigma_db: f64, rng: &mut R) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    db_to_linear(omega_db + sigma_db * z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeClass {
    Tier1,
    /// Tier-2 node on the line through the receiver.
    Tier2Typical,
    /// Tier-2 node on any other line.
    Tier2Other,
}

impl NodeClass {
    pub fn power(&self, p: &NetworkParams) -> f64 {
        match self {
            NodeClass::Tier1 => p.p1,
            _ => p.p2,
        }
    }

    pub fn fading_m(&self, p: &NetworkParams) -> u32 {
        match self {
            NodeClass::Tier1 => p.m1,
            NodeClass::Tier2Typical => p.m20,
            NodeClass::Tier2Other => p.m21,
        }
    }

    /// `(omega, sigma)` of the class shadowing in dB.
    pub fn shadowing(&self, p: &NetworkParams) -> (f64, f64) {
        match self {
            NodeClass::Tier1 => (p.omega_1, p.sigma_1),
            NodeClass::Tier2Typical => (p.omega_20, p.sigma_20),
            NodeClass::Tier2Other => (p.omega_21, p.sigma_21),
        }
    }

    /// Antenna gain toward the receiver. Only tier-1 uses the beam draw.
    pub fn gain(&self, main_lobe: bool, p: &NetworkParams) -> f64 {
        match self {
            NodeClass::Tier1 if main_lobe => p.g1_main,
            NodeClass::Tier1 => p.g1_side,
            NodeClass::Tier2Typical => p.g2_main,
            NodeClass::Tier2Other => p.g2_side,
        }
    }
}

/// Received power at the origin from a node at `position`.
pub fn received_power(
    class: NodeClass,
    position: [f64; 2],
    main_lobe: bool,
    fading: f64,
    shadow: f64,
    p: &NetworkParams,
) -> Result<f64> {
    let d = position[0].hypot(position[1]);
    if d == 0.0 {
        return Err(Error::ZeroDistance);
    }
    Ok(class.power(p) * class.gain(main_lobe, p) * fading * shadow * d.powf(-p.alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use approx::assert_relative_eq;

    #[test]
    fn moment_examples() {
        assert_eq!(lognormal_neg_moment(0.0, 0.0, 0.7), 1.0);
        assert_relative_eq!(lognormal_neg_moment(0.0, 4.0, 0.5), 1.111_864, max_relative = 1e-6);
        assert_relative_eq!(lognormal_neg_moment(3.0, 0.0, 1.0), 0.501_187_2, max_relative = 1e-6);
    }

    #[test]
    fn moment_sign_identity() {
        let (w, s, c) = (2.5, 3.0, 0.4);
        let ratio = lognormal_neg_moment(w, s, c) / lognormal_neg_moment(-w, s, c);
        assert_relative_eq!(ratio, (-2.0 * c * w * LN_10 / 10.0).exp(), max_relative = 1e-14);
    }

    #[test]
    fn moment_matches_sample_mean() {
        let mut rng = seeded(11);
        let n = 400_000;
        let c = 0.5;
        let mean: f64 = (0..n)
            .map(|_| sample_shadowing(1.0, 4.0, &mut rng).powf(-c))
            .sum::<f64>()
            / n as f64;
        assert_relative_eq!(mean, lognormal_neg_moment(1.0, 4.0, c), max_relative = 3e-3);
    }

    #[test]
    fn densities_without_shadowing() {
        let p = NetworkParams {
            sigma_1: 0.0,
            sigma_20: 0.0,
            sigma_21: 0.0,
            ..Default::default()
        };
        let eq = equivalent_densities(&p).unwrap();
        assert_eq!(eq.lambda1_e, p.lambda_1);
        assert_eq!(eq.lambda2_e, p.lambda_2);
        assert_relative_eq!(eq.lambda2_a, PI * p.lambda_l() * p.lambda_2, max_relative = 1e-15);
    }

    #[test]
    fn default_densities() {
        let eq = equivalent_densities(&NetworkParams::default()).unwrap();
        assert_relative_eq!(eq.lambda1_e, 0.555_95e-6, max_relative = 1e-4);
        assert_relative_eq!(eq.zeta21, 10f64.powf(-1.7), max_relative = 1e-12);
    }

    #[test]
    fn zeta_reduces_to_bias_ratio_when_power_gain_products_match() {
        let mut p = NetworkParams::default();
        p.g2_main = p.p1 * p.g1_main / p.p2;
        p.b2 = 3.0;
        p.b1 = 1.5;
        assert_relative_eq!(p.zeta21(), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn zeta_is_scale_free() {
        let p = NetworkParams::default();
        let mut q = p.clone();
        q.p1 *= 7.0;
        q.p2 *= 7.0;
        let (a, b) = (equivalent_densities(&p).unwrap(), equivalent_densities(&q).unwrap());
        assert_eq!(a.zeta21, b.zeta21);
        assert_eq!(a.lambda1_e, b.lambda1_e);
    }

    #[test]
    fn lambda1_e_grows_with_sigma() {
        let mut last = 0.0;
        for s in [0.0, 1.0, 2.0, 4.0, 8.0] {
            let p = NetworkParams {
                sigma_1: s,
                ..Default::default()
            };
            let v = equivalent_densities(&p).unwrap().lambda1_e;
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn validation_rejects_bad_values() {
        let bad = [
            NetworkParams { alpha: 2.0, ..Default::default() },
            NetworkParams { q_c: 1.5, ..Default::default() },
            NetworkParams { m1: 0, ..Default::default() },
            NetworkParams { lambda_1: -1.0, ..Default::default() },
            NetworkParams { p2: 0.0, ..Default::default() },
            NetworkParams { sigma_20: f64::NAN, ..Default::default() },
        ];
        for p in bad {
            assert!(matches!(p.validate(), Err(Error::Parameter { .. })), "{p:?}");
        }
    }

    #[test]
    fn nakagami_moments() {
        let mut rng = seeded(3);
        let n = 1_000_000;
        let xs: Vec<f64> = (0..n).map(|_| sample_nakagami_power_gain(1, &mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01);
        assert!(xs.iter().all(|&x| x > 0.0));

        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| sample_nakagami_power_gain(3, &mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        // Var of the sample variance for Gamma(3, 1/3): (μ4 − σ⁴)/n with μ4 = 3σ⁴(1 + 2/3).
        let sigma2 = 1.0 / 3.0;
        let se = ((5.0 * sigma2 * sigma2 - sigma2 * sigma2) / n as f64).sqrt();
        assert!((var - sigma2).abs() < 3.0 * se, "var {var}");
    }

    #[test]
    fn received_power_branches() {
        let p = NetworkParams::default();
        let v = received_power(NodeClass::Tier1, [1.0, 0.0], true, 1.0, 1.0, &p).unwrap();
        assert_relative_eq!(v, p.p1 * p.g1_main);
        let near = received_power(NodeClass::Tier2Typical, [3.0, 0.0], false, 1.0, 1.0, &p).unwrap();
        let far = received_power(NodeClass::Tier2Typical, [6.0, 0.0], false, 1.0, 1.0, &p).unwrap();
        assert_relative_eq!(near / far, 16.0, max_relative = 1e-12);
        let off_main = received_power(NodeClass::Tier2Other, [0.0, 2.0], true, 1.0, 1.0, &p).unwrap();
        let off_side = received_power(NodeClass::Tier2Other, [0.0, 2.0], false, 1.0, 1.0, &p).unwrap();
        assert_eq!(off_main, off_side);
        assert_relative_eq!(off_main, p.p2 * p.g2_side / 16.0);
        assert_eq!(
            received_power(NodeClass::Tier1, [0.0, 0.0], true, 1.0, 1.0, &p),
            Err(Error::ZeroDistance)
        );
    }
}
