//! Two-dimensional concave maximization over a box intersected with
//! half-planes.
//!
//! The maximizer nests two golden-section searches: the inner one computes
//! `g(y) = max_x f(x, y)` over the feasible x-interval at height `y`, the
//! outer one maximizes `g`. Partial maximization of a jointly concave
//! function over a convex set is concave, so both searches are unimodal and
//! the result is the global maximum up to the bracket tolerance. This also
//! holds at non-smooth points such as the kink of a `min(.,.)`, where a
//! coordinate-wise ascent can stall.

use crate::error::{Error, Result};

use super::golden::golden_section_max;

/// `coeffs[0] * x + coeffs[1] * y >= bound`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    pub coeffs: [f64; 2],
    pub bound: f64,
}

impl HalfPlane {
    pub fn contains(&self, p: [f64; 2], slack: f64) -> bool {
        self.coeffs[0] * p[0] + self.coeffs[1] * p[1] >= self.bound - slack
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region2 {
    pub lower: [f64; 2],
    pub upper: [f64; 2],
    pub half_planes: Vec<HalfPlane>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum2 {
    pub point: [f64; 2],
    pub value: f64,
}

impl Region2 {
    pub fn boxed(lower: [f64; 2], upper: [f64; 2]) -> Self {
        Region2 {
            lower,
            upper,
            half_planes: Vec::new(),
        }
    }

    pub fn with_half_plane(mut self, h: HalfPlane) -> Self {
        self.half_planes.push(h);
        self
    }

    pub fn contains(&self, p: [f64; 2], slack: f64) -> bool {
        (0..2).all(|i| p[i] >= self.lower[i] - slack && p[i] <= self.upper[i] + slack)
            && self.half_planes.iter().all(|h| h.contains(p, slack))
    }

    /// Vertices of the feasible polygon (box clipped by every half-plane).
    pub fn polygon(&self) -> Vec<[f64; 2]> {
        let [x0, y0] = self.lower;
        let [x1, y1] = self.upper;
        if x0 > x1 || y0 > y1 {
            return Vec::new();
        }
        let mut poly = vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]];
        for h in &self.half_planes {
            poly = clip(&poly, h);
            if poly.is_empty() {
                break;
            }
        }
        poly
    }

    /// Feasible x-interval on the horizontal line at `y`.
    fn x_interval(&self, y: f64) -> Option<(f64, f64)> {
        let (mut lo, mut hi) = (self.lower[0], self.upper[0]);
        for h in &self.half_planes {
            let [a, b] = h.coeffs;
            let rhs = h.bound - b * y;
            if a > 0.0 {
                lo = lo.max(rhs / a);
            } else if a < 0.0 {
                hi = hi.min(rhs / a);
            } else if rhs > 0.0 {
                return None;
            }
        }
        (lo <= hi).then_some((lo, hi))
    }
}

fn clip(poly: &[[f64; 2]], h: &HalfPlane) -> Vec<[f64; 2]> {
    let value = |p: [f64; 2]| h.coeffs[0] * p[0] + h.coeffs[1] * p[1] - h.bound;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for (i, &cur) in poly.iter().enumerate() {
        let prev = poly[(i + poly.len() - 1) % poly.len()];
        let (vc, vp) = (value(cur), value(prev));
        if vc >= 0.0 {
            if vp < 0.0 {
                out.push(intersect(prev, cur, vp, vc));
            }
            out.push(cur);
        } else if vp >= 0.0 {
            out.push(intersect(prev, cur, vp, vc));
        }
    }
    out
}

fn intersect(p: [f64; 2], q: [f64; 2], vp: f64, vq: f64) -> [f64; 2] {
    let t = vp / (vp - vq);
    [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
}

/// Maximizes a concave `f` over `region`; `tol` is the relative bracket
/// tolerance handed to each golden-section search.
pub fn concave_max_box<F>(f: F, region: &Region2, tol: f64) -> Result<Maximum2>
where
    F: Fn([f64; 2]) -> f64,
{
    let poly = region.polygon();
    if poly.is_empty() {
        return Err(Error::EmptyFeasibleSet);
    }
    let y_lo = poly.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
    let y_hi = poly.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);

    let inner = |y: f64| -> Option<(f64, f64)> {
        let (lo, hi) = region.x_interval(y)?;
        golden_section_max(|x| f([x, y]), lo, hi, tol).ok()
    };
    let (y, _) = golden_section_max(
        |y| inner(y).map_or(f64::NEG_INFINITY, |(_, v)| v),
        y_lo,
        y_hi,
        tol,
    )?;
    // the extreme heights can be single vertices the interval test misses
    // by rounding; fall back to the nearest vertex there
    match inner(y) {
        Some((x, value)) => Ok(Maximum2 {
            point: [x, y],
            value,
        }),
        None => {
            let p = *poly
                .iter()
                .min_by(|a, b| (a[1] - y).abs().total_cmp(&(b[1] - y).abs()))
                .expect("polygon is non-empty");
            Ok(Maximum2 {
                point: p,
                value: f(p),
            })
        }
    }
}
