//! One network realization and the SIR seen by the typical receiver.

use std::ops::Range;

use rand::Rng;

use crate::analysis::Event;
use crate::channel::{sample_nakagami_power_gain, sample_shadowing, NetworkParams, NodeClass};
use crate::geometry::{poisson_count, sample_plp, uniform_in_disc, LineParam, LineSet, SimWindow};
use crate::rng::Stream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tier1Node {
    pub pos: [f64; 2],
    pub shadow: f64,
    pub fading: f64,
    pub main_lobe: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineNode {
    pub line: usize,
    /// Arc position from the foot of the perpendicular.
    pub t: f64,
    pub pos: [f64; 2],
    pub shadow: f64,
    pub fading: f64,
}

/// Tier-1 nodes and tier-2 nodes on the typical line: everything association needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidates {
    pub tier1: Vec<Tier1Node>,
    pub on_typical: Vec<LineNode>,
    /// Realizations discarded because neither candidate set had a node.
    pub rejected: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub window: SimWindow,
    /// Typical line first, then the sampled lines in sampling order.
    pub lines: LineSet,
    pub candidates: Candidates,
    /// Tier-2 nodes off the typical line, grouped by line.
    pub off_typical: Vec<LineNode>,
    /// `line_ranges[i]` indexes `off_typical` for line `i`; empty for the typical line.
    pub line_ranges: Vec<Range<usize>>,
}

pub(crate) const TYPICAL_LINE: usize = 0;

fn shadow_for(class: NodeClass, p: &NetworkParams, rng: &mut Stream) -> f64 {
    let (w, s) = class.shadowing(p);
    sample_shadowing(w, s, rng)
}

/// Draws the candidate prefix of the network stream.
///
/// Order: tier-1 count, then per node position, shadowing, fading, beam;
/// then the typical-line count and per node position, shadowing, fading.
/// Empty draws are rejected and redrawn from the same stream.
pub fn sample_candidates(p: &NetworkParams, window: SimWindow, rng: &mut Stream) -> Candidates {
    let mut rejected = 0;
    loop {
        let n1 = poisson_count(rng, p.lambda_1 * window.area());
        let mut tier1 = Vec::with_capacity(n1 as usize);
        for _ in 0..n1 {
            let pos = uniform_in_disc(window.radius, rng);
            let shadow = shadow_for(NodeClass::Tier1, p, rng);
            let fading = sample_nakagami_power_gain(p.m1, rng);
            let main_lobe = rng.random::<f64>() < p.q_c;
            tier1.push(Tier1Node {
                pos,
                shadow,
                fading,
                main_lobe,
            });
        }
        let l0 = LineParam::TYPICAL;
        let n2 = poisson_count(rng, p.lambda_2 * 2.0 * window.radius);
        let mut on_typical = Vec::with_capacity(n2 as usize);
        for _ in 0..n2 {
            let t = window.radius * (2.0 * rng.random::<f64>() - 1.0);
            let shadow = shadow_for(NodeClass::Tier2Typical, p, rng);
            let fading = sample_nakagami_power_gain(p.m20, rng);
            on_typical.push(LineNode {
                line: TYPICAL_LINE,
                t,
                pos: l0.point_at(t),
                shadow,
                fading,
            });
        }
        if tier1.is_empty() && on_typical.is_empty() {
            rejected += 1;
            continue;
        }
        return Candidates {
            tier1,
            on_typical,
            rejected,
        };
    }
}

/// Draws a full realization: the candidate prefix followed by the line
/// process and the tier-2 nodes on every other line.
pub fn sample_realization(p: &NetworkParams, window: SimWindow, rng: &mut Stream) -> Realization {
    let candidates = sample_candidates(p, window, rng);
    let mut lines = LineSet::default();
    lines.push_typical_line();
    let plp = sample_plp(p.mu_l, window, rng).expect("validated line density");
    lines.lines.extend(plp.lines);
    let mut off_typical = Vec::new();
    let mut line_ranges = vec![0..0];
    for (i, line) in lines.lines.iter().enumerate().skip(1) {
        let start = off_typical.len();
        let h = line.chord_half_length(window).unwrap_or(0.0);
        let n = poisson_count(rng, p.lambda_2 * 2.0 * h);
        for _ in 0..n {
            let t = h * (2.0 * rng.random::<f64>() - 1.0);
            let shadow = shadow_for(NodeClass::Tier2Other, p, rng);
            let fading = sample_nakagami_power_gain(p.m21, rng);
            off_typical.push(LineNode {
                line: i,
                t,
                pos: line.point_at(t),
                shadow,
                fading,
            });
        }
        line_ranges.push(start..off_typical.len());
    }
    Realization {
        window,
        lines,
        candidates,
        off_typical,
        line_ranges,
    }
}

/// Serving node chosen by biased average received power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Association {
    pub event: Event,
    /// Index into `tier1` (E1) or `on_typical` (E2).
    pub index: usize,
    pub distance: f64,
    /// Distance after absorbing the serving node's shadowing, `X^{-1/α} d`.
    pub effective_distance: f64,
}

fn norm(p: [f64; 2]) -> f64 {
    p[0].hypot(p[1])
}

/// Effective (shadow-displaced) distance `X^{-1/α} d`.
pub(crate) fn displaced(d: f64, shadow: f64, alpha: f64) -> f64 {
    d * shadow.powf(-1.0 / alpha)
}

/// Associates among candidates within `radius_limit` of the origin.
pub fn associate(c: &Candidates, p: &NetworkParams, radius_limit: f64) -> Option<Association> {
    let a = p.alpha;
    let best = |it: &mut dyn Iterator<Item = (usize, [f64; 2], f64)>| {
        let mut out: Option<(usize, f64, f64)> = None;
        for (i, pos, shadow) in it {
            let d = norm(pos);
            if d > radius_limit {
                continue;
            }
            let de = displaced(d, shadow, a);
            if out.is_none_or(|(_, _, b)| de < b) {
                out = Some((i, d, de));
            }
        }
        out
    };
    let t1 = best(&mut c.tier1.iter().enumerate().map(|(i, n)| (i, n.pos, n.shadow)));
    let t2 = best(&mut c.on_typical.iter().enumerate().map(|(i, n)| (i, n.pos, n.shadow)));
    let zeta = p.zeta21();
    let pick_two = match (t1, t2) {
        (None, None) => return None,
        (Some(_), None) => false,
        (None, Some(_)) => true,
        // B2 P2 G2 de2^{-α} > B1 P1 G1 de1^{-α}
        (Some((_, _, de1)), Some((_, _, de2))) => zeta * de2.powf(-a) > de1.powf(-a),
    };
    let (event, (index, distance, effective_distance)) = if pick_two {
        (Event::E2, t2.unwrap())
    } else {
        (Event::E1, t1.unwrap())
    };
    Some(Association {
        event,
        index,
        distance,
        effective_distance,
    })
}

/// SIR at the origin for a given association, counting every other node
/// within `radius_limit` as an interferer.
pub fn sir(r: &Realization, p: &NetworkParams, assoc: &Association, radius_limit: f64) -> f64 {
    let a = p.alpha;
    let c = &r.candidates;
    let gain = |class: NodeClass, main: bool, pos: [f64; 2], fading: f64, shadow: f64| -> f64 {
        let d = norm(pos);
        if d > radius_limit || d == 0.0 {
            return 0.0;
        }
        class.power(p) * class.gain(main, p) * fading * shadow * d.powf(-a)
    };
    let mut signal = 0.0;
    let mut interference = 0.0;
    for (i, n) in c.tier1.iter().enumerate() {
        if assoc.event == Event::E1 && i == assoc.index {
            signal = gain(NodeClass::Tier1, true, n.pos, n.fading, n.shadow);
        } else {
            interference += gain(NodeClass::Tier1, n.main_lobe, n.pos, n.fading, n.shadow);
        }
    }
    for (i, n) in c.on_typical.iter().enumerate() {
        let v = gain(NodeClass::Tier2Typical, true, n.pos, n.fading, n.shadow);
        if assoc.event == Event::E2 && i == assoc.index {
            signal = v;
        } else {
            interference += v;
        }
    }
    for n in &r.off_typical {
        interference += gain(NodeClass::Tier2Other, false, n.pos, n.fading, n.shadow);
    }
    if interference == 0.0 {
        return f64::INFINITY;
    }
    signal / interference
}
