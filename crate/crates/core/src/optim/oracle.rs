//! Exhaustive reference solvers.
//!
//! These are deliberately naive (enumeration, dense grids, pattern search)
//! and share no code with the production solvers, so they can certify them.
//! The `validate` command and the test suites use them.

use num_complex::Complex64;

use super::region::{Maximum2, Region2};

/// Minimum total cost over all permutations (Heap's algorithm). O(n!).
pub fn brute_force_assignment(cost: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let n = cost.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let score = |p: &[usize]| p.iter().enumerate().map(|(r, &c)| cost[r][c]).sum::<f64>();
    let mut best = (perm.clone(), score(&perm));
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            let s = score(&perm);
            if s < best.1 {
                best = (perm.clone(), s);
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

/// Best of `points` evenly spaced samples on `[lo, hi]` (endpoints included).
pub fn grid_max_1d<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> (f64, f64) {
    let points = points.max(2);
    let step = (hi - lo) / (points - 1) as f64;
    (0..points)
        .map(|k| {
            let x = if k == points - 1 { hi } else { lo + step * k as f64 };
            (x, f(x))
        })
        .fold((lo, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    /// Geometric spacing; requires a strictly positive box.
    Log,
}

fn axis(lo: f64, hi: f64, points: usize, spacing: Spacing) -> Vec<f64> {
    let points = points.max(2);
    (0..points)
        .map(|k| {
            let t = k as f64 / (points - 1) as f64;
            match spacing {
                Spacing::Linear => lo + t * (hi - lo),
                Spacing::Log => lo * (hi / lo).powf(t),
            }
        })
        .collect()
}

/// Dense grid over the bounding box of `region` (infeasible grid points are
/// skipped), followed by a compass search polish from the best grid point.
pub fn grid_max_2d<F: Fn([f64; 2]) -> f64>(
    f: F,
    region: &Region2,
    points: usize,
    spacing: Spacing,
) -> Option<Maximum2> {
    let xs = axis(region.lower[0], region.upper[0], points, spacing);
    let ys = axis(region.lower[1], region.upper[1], points, spacing);
    let mut best: Option<Maximum2> = None;
    for &x in &xs {
        for &y in &ys {
            let p = [x, y];
            if !region.contains(p, 0.0) {
                continue;
            }
            let v = f(p);
            if best.is_none_or(|b| v > b.value) {
                best = Some(Maximum2 { point: p, value: v });
            }
        }
    }
    let mut best = best?;

    // compass search, steps start at one grid cell
    let mut step = [
        (region.upper[0] - region.lower[0]) / points as f64,
        (region.upper[1] - region.lower[1]) / points as f64,
    ];
    let floor = [step[0] * 1e-9, step[1] * 1e-9];
    while step[0] > floor[0] || step[1] > floor[1] {
        let mut improved = false;
        for (dx, dy) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
            let p = [best.point[0] + dx * step[0], best.point[1] + dy * step[1]];
            if !region.contains(p, 0.0) {
                continue;
            }
            let v = f(p);
            if v > best.value {
                best = Maximum2 { point: p, value: v };
                improved = true;
            }
        }
        if !improved {
            step = [step[0] * 0.5, step[1] * 0.5];
        }
    }
    Some(best)
}

/// Largest `|h^H w|^2` over constant-modulus `w` whose phases lie on a
/// `levels`-point grid, with the first phase pinned to zero.
pub fn phase_grid_beam_gain(h: &[Complex64], levels: usize) -> f64 {
    let n = h.len();
    if n == 0 {
        return 0.0;
    }
    let amp = 1.0 / (n as f64).sqrt();
    let phases: Vec<Complex64> = (0..levels)
        .map(|k| Complex64::from_polar(amp, 2.0 * std::f64::consts::PI * k as f64 / levels as f64))
        .collect();
    let mut idx = vec![0usize; n];
    let mut best = 0.0f64;
    loop {
        let s: Complex64 = h
            .iter()
            .zip(&idx)
            .map(|(hn, &k)| hn.conj() * phases[k])
            .sum();
        best = best.max(s.norm_sqr());
        // odometer over entries 1..n
        let mut pos = 1;
        loop {
            if pos >= n {
                return best;
            }
            idx[pos] += 1;
            if idx[pos] < levels {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_two_by_two() {
        let (p, v) = brute_force_assignment(&[vec![4.0, 1.0], vec![2.0, 3.0]]);
        assert_eq!(p, vec![1, 0]);
        assert_eq!(v, 3.0);
    }

    #[test]
    fn grid_1d_finds_endpoint() {
        let (x, _) = grid_max_1d(|x| x, 0.0, 1.0, 11);
        assert_eq!(x, 1.0);
    }

    #[test]
    fn phase_grid_single_antenna() {
        let h = [Complex64::new(0.3, -0.4)];
        assert!((phase_grid_beam_gain(&h, 8) - 0.25).abs() < 1e-15);
    }
}
