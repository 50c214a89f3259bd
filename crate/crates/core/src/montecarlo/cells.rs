//! Cells of the shadow-displaced processes and the loads they carry.
//!
//! Shadowing is absorbed into positions: a tier-1 node at `x` moves to
//! `X^{-1/α} x`, and a tier-2 node at arc position `t` on a line moves to
//! `X^{-1/α} t` along that line. Users then associate by biased distance in
//! this displaced picture, the same picture in which the cell-length and
//! load results are stated.

use rand::Rng;

use super::network::{displaced, Candidates, Realization, TYPICAL_LINE};
use crate::channel::{sample_shadowing, NetworkParams};
use crate::geometry::poisson_count;
use crate::rng::Stream;

const BISECT_TOL: f64 = 1e-3;

/// Displaced tier-1 positions.
pub(crate) fn displaced_tier1(c: &Candidates, alpha: f64) -> Vec<[f64; 2]> {
    c.tier1
        .iter()
        .map(|n| {
            let s = n.shadow.powf(-1.0 / alpha);
            [n.pos[0] * s, n.pos[1] * s]
        })
        .collect()
}

/// Displaced arc positions on the typical line, unsorted, in sampling order.
pub(crate) fn displaced_typical(c: &Candidates, alpha: f64) -> Vec<f64> {
    c.on_typical
        .iter()
        .map(|n| displaced(n.t, n.shadow, alpha))
        .collect()
}

fn nearest_tier1(u: [f64; 2], tier1: &[[f64; 2]]) -> f64 {
    tier1
        .iter()
        .map(|y| (u[0] - y[0]).hypot(u[1] - y[1]))
        .fold(f64::INFINITY, f64::min)
}

/// Interval of the typical line served by the tier-2 node at `sorted[idx]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineCell {
    pub left: f64,
    pub right: f64,
    /// The cell ran into the window edge, so its length is a lower bound.
    pub clipped: bool,
}

impl LineCell {
    pub fn length(&self) -> f64 {
        self.right - self.left
    }
}

/// Finds the cell of one typical-line node.
///
/// Along the line, moving away from the node, `d1(u)/k − |u − t|` decreases
/// strictly because `k > 1`, so each side has a single boundary that
/// bisection brackets between the node and the midpoint to its neighbour.
pub(crate) fn typical_line_cell(sorted: &[f64], idx: usize, tier1: &[[f64; 2]], k: f64, limit: f64) -> LineCell {
    let t = sorted[idx];
    let wins = |u: f64| nearest_tier1([u, 0.0], tier1) / k - (u - t).abs() >= 0.0;
    let side = |neighbour: Option<f64>, edge: f64| -> (f64, bool) {
        let (far, clipped) = match neighbour {
            Some(n) => (0.5 * (t + n), false),
            None => (edge, true),
        };
        if wins(far) {
            return (far, clipped);
        }
        let (mut inside, mut outside) = (t, far);
        while (outside - inside).abs() > BISECT_TOL {
            let mid = 0.5 * (inside + outside);
            if wins(mid) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        (0.5 * (inside + outside), false)
    };
    let (right, rc) = side(sorted.get(idx + 1).copied(), limit.max(t));
    let (left, lc) = side(idx.checked_sub(1).map(|i| sorted[i]), (-limit).min(t));
    LineCell {
        left,
        right,
        clipped: lc || rc,
    }
}

fn sorted_copy(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Cell of the tier-2 node serving the typical receiver.
pub(crate) fn tagged_tier2_cell(c: &Candidates, p: &NetworkParams, serving: usize, limit: f64) -> LineCell {
    let te = displaced_typical(c, p.alpha);
    let t_serv = te[serving];
    let sorted = sorted_copy(&te);
    let idx = sorted.partition_point(|&x| x < t_serv);
    let tier1 = displaced_tier1(c, p.alpha);
    let k = p.zeta21().powf(-1.0 / p.alpha);
    typical_line_cell(&sorted, idx, &tier1, k, limit)
}

/// Cell of an arbitrary typical-line node: the first one, in sampling order,
/// whose displaced position lies within `reach` of the origin.
pub(crate) fn typical_tier2_cell(c: &Candidates, p: &NetworkParams, reach: f64, limit: f64) -> Option<LineCell> {
    let te = displaced_typical(c, p.alpha);
    let chosen = *te.iter().find(|t| t.abs() < reach)?;
    let sorted = sorted_copy(&te);
    let idx = sorted.partition_point(|&x| x < chosen);
    let tier1 = displaced_tier1(c, p.alpha);
    let k = p.zeta21().powf(-1.0 / p.alpha);
    Some(typical_line_cell(&sorted, idx, &tier1, k, limit))
}

/// Users on the typical line's chord inside `cell`, plus the typical receiver.
pub(crate) fn tier2_load(cell: &LineCell, p: &NetworkParams, radius: f64, rng: &mut Stream) -> u32 {
    let n = poisson_count(rng, p.lambda_r * 2.0 * radius);
    let mut load = 1;
    for _ in 0..n {
        let u = radius * (2.0 * rng.random::<f64>() - 1.0);
        if u >= cell.left && u <= cell.right {
            load += 1;
        }
    }
    load
}

/// Convex polygon, counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    pub vertices: Vec<[f64; 2]>,
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

impl Polygon {
    pub fn square(half: f64) -> Self {
        Self {
            vertices: vec![[-half, -half], [half, -half], [half, half], [-half, half]],
        }
    }

    /// Keeps the part with `a·x ≤ b`.
    pub fn clip(&mut self, a: [f64; 2], b: f64) {
        let v = &self.vertices;
        let mut out = Vec::with_capacity(v.len() + 1);
        for i in 0..v.len() {
            let p = v[i];
            let q = v[(i + 1) % v.len()];
            let fp = a[0] * p[0] + a[1] * p[1] - b;
            let fq = a[0] * q[0] + a[1] * q[1] - b;
            if fp <= 0.0 {
                out.push(p);
            }
            if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
                let s = fp / (fp - fq);
                out.push([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]);
            }
        }
        self.vertices = out;
    }

    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        0.5 * (0..v.len()).map(|i| cross(v[i], v[(i + 1) % v.len()])).sum::<f64>()
    }

    /// Parameter interval of `origin + t dir` inside the polygon.
    pub fn line_interval(&self, origin: [f64; 2], dir: [f64; 2]) -> Option<(f64, f64)> {
        let v = &self.vertices;
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..v.len() {
            let e = [v[(i + 1) % v.len()][0] - v[i][0], v[(i + 1) % v.len()][1] - v[i][1]];
            let c0 = cross(e, [origin[0] - v[i][0], origin[1] - v[i][1]]);
            let c1 = cross(e, dir);
            // inside when c0 + t c1 ≥ 0
            if c1 == 0.0 {
                if c0 < 0.0 {
                    return None;
                }
            } else if c1 > 0.0 {
                lo = lo.max(-c0 / c1);
            } else {
                hi = hi.min(-c0 / c1);
            }
        }
        (lo < hi).then_some((lo, hi))
    }
}

/// Voronoi cell of `sites[center]` inside the square of half-width `half`;
/// the flag reports contact with the square.
pub(crate) fn voronoi_cell(sites: &[[f64; 2]], center: usize, half: f64) -> (Polygon, bool) {
    let c = sites[center];
    let mut order: Vec<(f64, usize)> = sites
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != center)
        .map(|(i, s)| ((s[0] - c[0]).hypot(s[1] - c[1]), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut poly = Polygon::square(half);
    let reach = |poly: &Polygon| {
        poly.vertices
            .iter()
            .map(|v| (v[0] - c[0]).hypot(v[1] - c[1]))
            .fold(0.0, f64::max)
    };
    let mut r = reach(&poly);
    for (d, i) in order {
        if d > 2.0 * r {
            break;
        }
        let s = sites[i];
        let a = [s[0] - c[0], s[1] - c[1]];
        let b = 0.5 * (s[0] * s[0] + s[1] * s[1] - c[0] * c[0] - c[1] * c[1]);
        poly.clip(a, b);
        r = reach(&poly);
    }
    let touches = poly
        .vertices
        .iter()
        .any(|v| v[0].abs().max(v[1].abs()) >= half * (1.0 - 1e-9));
    (poly, touches)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tier1Load {
    pub load: u32,
    /// Total road length inside the cell.
    pub road_length: f64,
    pub clipped: bool,
}

/// Load of the serving tier-1 node: users on every road segment inside its
/// displaced Voronoi cell whose nearest own-line tier-2 node does not beat it.
pub(crate) fn tier1_load(r: &Realization, p: &NetworkParams, serving: usize, rng: &mut Stream) -> Tier1Load {
    let alpha = p.alpha;
    let k = p.zeta21().powf(-1.0 / alpha);
    let sites = displaced_tier1(&r.candidates, alpha);
    let half = r.window.radius / std::f64::consts::SQRT_2;
    let (cell, clipped) = voronoi_cell(&sites, serving, half);
    let center = sites[serving];
    let typical_te = sorted_copy(&displaced_typical(&r.candidates, alpha));
    let mut load = 1;
    let mut road_length = 0.0;
    for (i, line) in r.lines.lines.iter().enumerate() {
        let Some((lo, hi)) = cell.line_interval(line.foot(), line.direction()) else {
            continue;
        };
        let te = if i == TYPICAL_LINE {
            typical_te.clone()
        } else {
            // Own-line shadowing toward users on this line.
            let nodes = &r.off_typical[r.line_ranges[i].clone()];
            let v: Vec<f64> = nodes
                .iter()
                .map(|n| displaced(n.t, sample_shadowing(p.omega_20, p.sigma_20, rng), alpha))
                .collect();
            sorted_copy(&v)
        };
        let len = hi - lo;
        road_length += len;
        let n = poisson_count(rng, p.lambda_r * len);
        for _ in 0..n {
            let u = lo + len * rng.random::<f64>();
            let x = line.point_at(u);
            let d1 = (x[0] - center[0]).hypot(x[1] - center[1]);
            let j = te.partition_point(|&t| t < u);
            let d2 = [j.checked_sub(1), Some(j)]
                .into_iter()
                .flatten()
                .filter_map(|j| te.get(j))
                .map(|t| (u - t).abs())
                .fold(f64::INFINITY, f64::min);
            if d2 >= d1 / k {
                load += 1;
            }
        }
    }
    Tier1Load {
        load,
        road_length,
        clipped,
    }
}
