//! Julia set pictures and Hausdorff dimension estimates.
//!
//! Two estimators: box counting on a point cloud from inverse iteration, and the root of
//! the pressure `P(s) = lim (1/k) log sum |(p^k)'(z)|^{-s}` over repelling period-`k`
//! points, which is the dimension when the Julia set is hyperbolic.

mod raster;

use std::collections::{HashMap, HashSet};

use num_complex::Complex;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::dynamics::escape_radius;
use crate::polynomial::ComplexPoly;
use crate::scalar::{is_finite, Real};

pub use raster::{
    band_of, render_basins, render_escape, BasinSpec, Cell, Raster, RasterSpec, Viewport,
    DEFAULT_THRESHOLDS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FractalError {
    #[error("raster must have at least one pixel in each direction")]
    EmptyRaster,
    #[error("no attracting cycle and no escaping critical value to build a trap from")]
    NoAttractor,
    #[error("polynomial must have degree at least two")]
    DegreeTooLow,
    #[error("no repelling fixed point found")]
    NoRepellingFixedPoint,
    #[error("box counting needs at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("points are all equal")]
    DegeneratePoints,
    #[error("only {0} scales are below saturation; need three")]
    TooFewScales(usize),
    #[error("period {period} means {count} periodic points at degree {degree}; use max period {cap} or less")]
    PeriodTooHigh {
        period: usize,
        degree: usize,
        count: f64,
        cap: usize,
    },
    #[error("no repelling periodic points of period {0} found")]
    NoPeriodicPoints(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimensionMethod {
    BoxCounting,
    Pressure,
}

impl std::fmt::Display for DimensionMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DimensionMethod::BoxCounting => "box_counting",
            DimensionMethod::Pressure => "pressure",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Diagnostics {
    Box {
        fit_r2: f64,
        scales_used: usize,
    },
    Pressure {
        /// Width of the final bisection bracket.
        bracket: f64,
        /// `|s_k - s_{k-1}|` between the two largest periods.
        drift: f64,
        max_period: usize,
        /// Distinct repelling period-`k` points found, and the expected count `d^k`.
        orbits: usize,
        expected: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimensionEstimate {
    pub value: f64,
    pub method: DimensionMethod,
    pub diagnostics: Diagnostics,
    pub low_confidence: bool,
}

/// Repelling fixed point with the largest multiplier.
pub fn repelling_fixed_point<T: Real>(p: &ComplexPoly<T>) -> Result<Complex<T>, FractalError> {
    if p.degree() < 2 {
        return Err(FractalError::DegreeTooLow);
    }
    let shifted = ComplexPoly::new(
        p.coeffs()
            .iter()
            .enumerate()
            .map(|(k, &a)| if k == 1 { a - Complex::one() } else { a })
            .collect(),
    );
    let roots = shifted
        .raw_roots()
        .map_err(|_| FractalError::NoRepellingFixedPoint)?;
    let deriv = p.derivative();
    roots
        .into_iter()
        .map(|z| (z, deriv.eval(z).norm()))
        .filter(|(_, m)| *m > T::one() && m.is_finite())
        .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite"))
        .map(|(z, _)| z)
        .ok_or(FractalError::NoRepellingFixedPoint)
}

/// All solutions of `p(w) = z`, one per degree.
fn preimages<T: Real>(p: &ComplexPoly<T>, z: Complex<T>) -> Option<Vec<Complex<T>>> {
    p.add_constant(-z).raw_roots().ok()
}

const CLOUD_CHAINS: usize = 8;
const CLOUD_BURN_IN: usize = 32;

/// Points of the Julia set by random inverse iteration from a repelling fixed point.
///
/// Runs independent chains seeded from `rng_seed`, so the result is reproducible.
pub fn julia_cloud<T: Real>(
    p: &ComplexPoly<T>,
    target_points: usize,
    rng_seed: u64,
) -> Result<Vec<Complex<T>>, FractalError> {
    let start = repelling_fixed_point(p)?;
    let per_chain = target_points.div_ceil(CLOUD_CHAINS);
    let chains: Vec<Vec<Complex<T>>> = (0..CLOUD_CHAINS)
        .into_par_iter()
        .map(|chain| {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            rng.set_stream(chain as u64);
            let mut out = Vec::with_capacity(per_chain);
            let mut z = start;
            let mut step = 0;
            while out.len() < per_chain {
                match preimages(p, z) {
                    Some(ws) => z = ws[rng.gen_range(0..ws.len())],
                    None => z = start,
                }
                step += 1;
                if step > CLOUD_BURN_IN {
                    out.push(z);
                }
            }
            out
        })
        .collect();
    let mut points: Vec<Complex<T>> = chains.into_iter().flatten().collect();
    points.truncate(target_points);
    Ok(points)
}

/// Grid cells across the bounding square of the first `uniform_cloud` attempt.
const UNIFORM_GRID: usize = 1024;
/// Points kept per grid cell before a branch is pruned.
const UNIFORM_CELL_CAP: u32 = 4;

/// Julia set points with roughly uniform coverage, by inverse iteration that stops
/// expanding branches through grid cells already holding a few points.
///
/// Random-branch clouds follow the harmonic measure, which leaves the deep fjords of
/// a connected Julia set almost empty and biases box counts low. Pruning saturated
/// cells spends the budget on the sparse parts instead. The grid is refined until
/// `target_points` are collected; branch order is shuffled from `rng_seed`.
pub fn uniform_cloud<T: Real>(
    p: &ComplexPoly<T>,
    target_points: usize,
    rng_seed: u64,
) -> Result<Vec<Complex<T>>, FractalError> {
    let start = repelling_fixed_point(p)?;
    let probe = julia_cloud(p, 4096, rng_seed)?;
    let (mut lo, mut hi) = (to_pair(start), to_pair(start));
    for z in &probe {
        let (x, y) = to_pair(*z);
        lo = (lo.0.min(x), lo.1.min(y));
        hi = (hi.0.max(x), hi.1.max(y));
    }
    let side = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-12) * 1.25;
    let origin = ((lo.0 + hi.0 - side) / 2.0, (lo.1 + hi.1 - side) / 2.0);
    let mut grid = UNIFORM_GRID;
    loop {
        let cell = side / grid as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let mut counts: HashMap<(i64, i64), u32> = HashMap::new();
        let mut out = Vec::with_capacity(target_points);
        let mut stack = vec![start];
        while let Some(z) = stack.pop() {
            let (x, y) = to_pair(z);
            let key = (((x - origin.0) / cell).floor() as i64, ((y - origin.1) / cell).floor() as i64);
            let count = counts.entry(key).or_insert(0);
            if *count >= UNIFORM_CELL_CAP {
                continue;
            }
            *count += 1;
            out.push(z);
            if out.len() >= target_points {
                return Ok(out);
            }
            if let Some(mut ws) = preimages(p, z) {
                ws.shuffle(&mut rng);
                stack.extend(ws);
            }
        }
        if grid >= 1 << 20 {
            return Ok(out);
        }
        grid *= 2;
    }
}

fn to_pair<T: Real>(z: Complex<T>) -> (f64, f64) {
    (z.re.to_f64_lossy(), z.im.to_f64_lossy())
}

#[derive(Clone, Debug)]
pub struct BoxConfig {
    pub scales: usize,
    /// Coarsest box is the bounding box side divided by this.
    pub coarse_divisor: f64,
    /// Finest box is the bounding box side divided by this.
    pub fine_divisor: f64,
    /// Scales with at least this fraction of the points as boxes are dropped.
    pub saturation: f64,
    /// The set is known to be totally disconnected, where box counting is unreliable.
    pub disconnected: bool,
}

impl Default for BoxConfig {
    fn default() -> Self {
        Self {
            scales: 12,
            coarse_divisor: 8.0,
            fine_divisor: 32768.0,
            saturation: 0.25,
            disconnected: false,
        }
    }
}

pub const MIN_BOX_POINTS: usize = 10_000;

/// Slope of `log N(eps)` against `log(1/eps)` over a geometric ladder of box sizes.
pub fn box_dim<T: Real>(points: &[Complex<T>], cfg: &BoxConfig) -> Result<DimensionEstimate, FractalError> {
    if points.len() < MIN_BOX_POINTS {
        return Err(FractalError::TooFewPoints {
            need: MIN_BOX_POINTS,
            got: points.len(),
        });
    }
    let pts: Vec<(f64, f64)> = points
        .iter()
        .map(|z| (z.re.to_f64_lossy(), z.im.to_f64_lossy()))
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let side = (x1 - x0).max(y1 - y0);
    if !(side > 0.0) || !side.is_finite() {
        return Err(FractalError::DegeneratePoints);
    }
    let (lo, hi) = (cfg.coarse_divisor.ln(), cfg.fine_divisor.ln());
    let limit = cfg.saturation * pts.len() as f64;
    let samples: Vec<(f64, f64)> = (0..cfg.scales)
        .into_par_iter()
        .map(|i| {
            let t = if cfg.scales > 1 { i as f64 / (cfg.scales - 1) as f64 } else { 0.0 };
            let eps = side / (lo + t * (hi - lo)).exp();
            let boxes: HashSet<(i64, i64)> = pts
                .iter()
                .map(|&(x, y)| (((x - x0) / eps).floor() as i64, ((y - y0) / eps).floor() as i64))
                .collect();
            (eps, boxes.len() as f64)
        })
        .collect();
    let kept: Vec<(f64, f64)> = samples
        .into_iter()
        .filter(|&(_, n)| n < limit)
        .map(|(eps, n)| ((1.0 / eps).ln(), n.ln()))
        .collect();
    if kept.len() < 3 {
        return Err(FractalError::TooFewScales(kept.len()));
    }
    let (slope, r2) = least_squares(&kept);
    Ok(DimensionEstimate {
        value: slope.clamp(0.0, 2.0),
        method: DimensionMethod::BoxCounting,
        diagnostics: Diagnostics::Box {
            fit_r2: r2,
            scales_used: kept.len(),
        },
        low_confidence: cfg.disconnected || r2 < 0.99,
    })
}

/// Slope and coefficient of determination of the least-squares line.
fn least_squares(xy: &[(f64, f64)]) -> (f64, f64) {
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = xy.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    (slope, r2)
}

/// Most periodic points the pressure estimator will compute for one period.
pub const MAX_PERIODIC_POINTS: usize = 20_000;

#[derive(Clone, Debug, Default)]
pub struct PressureConfig {
    /// Largest period; by default the largest `k` with `degree^k <= 20000`.
    pub max_period: Option<usize>,
    /// Largest attractor multiplier modulus, if known; above 0.9 the estimate is flagged.
    pub attractor_multiplier: f64,
}

/// Largest `k` with `degree^k <= MAX_PERIODIC_POINTS`.
pub fn period_cap(degree: usize) -> usize {
    let mut k = 0;
    let mut count = 1usize;
    while count.saturating_mul(degree) <= MAX_PERIODIC_POINTS {
        count *= degree;
        k += 1;
    }
    k
}

const PULLBACK_ROUNDS: usize = 60;
const LOCAL_NEWTON_STEPS: usize = 12;
const PULLBACK_TOL: f64 = 1e-13;
const PERIODIC_DEDUP: f64 = 1e-8;

/// One node of the backward tree: a point and the index of its image in the level above.
type Node<T> = (Complex<T>, usize);

/// Backward orbit tree of `root`: level `j` holds the `d^j` solutions of `p^j(w) = root`.
fn backward_tree<T: Real>(p: &ComplexPoly<T>, root: Complex<T>, depth: usize) -> Vec<Vec<Node<T>>> {
    let mut levels = vec![vec![(root, 0)]];
    for _ in 0..depth {
        let prev = levels.last().expect("nonempty");
        let next: Vec<Node<T>> = prev
            .par_iter()
            .enumerate()
            .flat_map_iter(|(i, &(z, _))| {
                preimages(p, z)
                    .unwrap_or_default()
                    .into_iter()
                    .map(move |w| (w, i))
            })
            .collect();
        levels.push(next);
    }
    levels
}

/// Solution of `p(u) = v` near `guess`, by Newton with a root-finder fallback.
fn local_preimage<T: Real>(p: &ComplexPoly<T>, v: Complex<T>, guess: Complex<T>) -> Option<Complex<T>> {
    let mut u = guess;
    for _ in 0..LOCAL_NEWTON_STEPS {
        let (pu, du) = p.eval_with_derivative(u);
        let step = (pu - v) / du;
        if !is_finite(step) {
            break;
        }
        u -= step;
        if step.norm() <= T::lit(PULLBACK_TOL) * (T::one() + u.norm()) {
            return Some(u);
        }
    }
    preimages(p, v)?
        .into_iter()
        .min_by(|a, b| (a - guess).norm().partial_cmp(&(b - guess).norm()).expect("finite"))
}

/// Fixed point of the inverse branch of `p^k` along the tree path ending at `leaf`,
/// with `log |(p^k)'|` there, when it is repelling and its orbit stays bounded.
///
/// The branch contracts near a repelling periodic point, so repeated pullback converges
/// to the one periodic point in that branch, where Newton on `p^k - z` would jump between
/// neighbours.
fn branch_periodic_point<T: Real>(
    p: &ComplexPoly<T>,
    levels: &[Vec<Node<T>>],
    k: usize,
    leaf: usize,
    radius: T,
) -> Option<(Complex<T>, f64)> {
    // path[i] is the level-(i + 1) node on the way from the root to the leaf.
    let mut path = vec![Complex::<T>::default(); k];
    let mut idx = leaf;
    for level in (1..=k).rev() {
        let (w, parent) = levels[level][idx];
        path[level - 1] = w;
        idx = parent;
    }
    let mut z = path[k - 1];
    let mut converged = false;
    for _ in 0..PULLBACK_ROUNDS {
        let mut v = z;
        for guess in path.iter_mut() {
            v = local_preimage(p, v, *guess)?;
            *guess = v;
        }
        let moved = (v - z).norm();
        z = v;
        if moved <= T::lit(PULLBACK_TOL) * (T::one() + z.norm()) {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }
    let mut log_d = 0.0;
    let mut u = z;
    for _ in 0..k {
        if u.norm() > radius {
            return None;
        }
        let (pu, du) = p.eval_with_derivative(u);
        log_d += du.norm().to_f64_lossy().ln();
        u = pu;
    }
    (log_d > 0.0 && log_d.is_finite()).then_some((z, log_d))
}

/// Log-multipliers of the distinct repelling period-`k` points, one per backward branch.
fn periodic_spectrum<T: Real>(p: &ComplexPoly<T>, levels: &[Vec<Node<T>>], k: usize) -> Vec<f64> {
    let radius = escape_radius(p);
    let found: Vec<(Complex<T>, f64)> = (0..levels[k].len())
        .into_par_iter()
        .filter_map(|leaf| branch_periodic_point(p, levels, k, leaf, radius))
        .collect();
    let cell = PERIODIC_DEDUP;
    let key = |z: Complex<T>| {
        (
            (z.re.to_f64_lossy() / cell).floor() as i64,
            (z.im.to_f64_lossy() / cell).floor() as i64,
        )
    };
    let mut seen: HashMap<(i64, i64), Vec<Complex<T>>> = HashMap::new();
    let mut logs = Vec::new();
    for (z, log_d) in found {
        let (kx, ky) = key(z);
        let dup = (-1..=1).any(|dx| {
            (-1..=1).any(|dy| {
                seen.get(&(kx + dx, ky + dy))
                    .is_some_and(|v| v.iter().any(|&u| (u - z).norm() < T::lit(cell)))
            })
        });
        if !dup {
            seen.entry((kx, ky)).or_default().push(z);
            logs.push(log_d);
        }
    }
    logs
}

/// `(1/k) log sum exp(-s L_i)` for log-multipliers `L_i`.
fn pressure(logs: &[f64], k: usize, s: f64) -> f64 {
    let m = logs.iter().map(|&l| -s * l).fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logs.iter().map(|&l| (-s * l - m).exp()).sum();
    (m + sum.ln()) / k as f64
}

/// Root of the pressure in `(0, 2)` by bisection; `None` when `P(2) >= 0`.
fn pressure_root(logs: &[f64], k: usize) -> (f64, f64, bool) {
    let (mut lo, mut hi) = (0.0, 2.0);
    if pressure(logs, k, hi) >= 0.0 {
        return (2.0, 0.0, false);
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if pressure(logs, k, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi), hi - lo, true)
}

/// Dimension as the zero of the periodic-orbit pressure at the largest period.
pub fn pressure_dim<T: Real>(p: &ComplexPoly<T>, cfg: &PressureConfig) -> Result<DimensionEstimate, FractalError> {
    let degree = p.degree();
    if degree < 2 {
        return Err(FractalError::DegreeTooLow);
    }
    let cap = period_cap(degree);
    let k = cfg.max_period.unwrap_or(cap);
    if k > cap {
        return Err(FractalError::PeriodTooHigh {
            period: k,
            degree,
            count: (degree as f64).powi(k as i32),
            cap,
        });
    }
    let k = k.max(2);
    let start = repelling_fixed_point(p)?;
    let levels = backward_tree(p, start, k);
    let logs_k = periodic_spectrum(p, &levels, k);
    let logs_prev = periodic_spectrum(p, &levels, k - 1);
    if logs_k.is_empty() || logs_prev.is_empty() {
        return Err(FractalError::NoPeriodicPoints(k));
    }
    let (s_k, bracket, straddles) = pressure_root(&logs_k, k);
    let (s_prev, _, _) = pressure_root(&logs_prev, k - 1);
    let drift = (s_k - s_prev).abs();
    Ok(DimensionEstimate {
        value: s_k,
        method: DimensionMethod::Pressure,
        diagnostics: Diagnostics::Pressure {
            bracket,
            drift,
            max_period: k,
            orbits: logs_k.len(),
            expected: degree.pow(k as u32),
        },
        low_confidence: !straddles || drift > 0.02 || cfg.attractor_multiplier > 0.9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn period_cap_values() {
        assert_eq!(period_cap(5), 6);
        assert_eq!(period_cap(2), 14);
        assert_eq!(period_cap(20000), 1);
    }

    #[test]
    fn least_squares_on_a_line() {
        let (slope, r2) = least_squares(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]);
        assert!((slope - 2.0).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pressure_of_constant_multipliers() {
        // 2^k points, each with multiplier 2^k: P(s) = (1 - s) log 2.
        let k = 4;
        let logs = vec![k as f64 * 2f64.ln(); 1 << k];
        let (s, width, ok) = pressure_root(&logs, k);
        assert!(ok && width < 1e-12);
        assert!((s - 1.0).abs() < 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn pressure_decreases_and_its_root_straddles(
            logs in proptest::collection::vec(0.05f64..8.0, 2..200),
            k in 1usize..8,
            a in 0.0f64..2.0,
            b in 0.0f64..2.0,
        ) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            proptest::prop_assume!(hi - lo > 1e-9);
            proptest::prop_assert!(pressure(&logs, k, hi) < pressure(&logs, k, lo));
            let (s, width, ok) = pressure_root(&logs, k);
            if ok {
                proptest::prop_assert!(width < 1e-12);
                proptest::prop_assert!(pressure(&logs, k, s - 1e-9) > 0.0);
                proptest::prop_assert!(pressure(&logs, k, (s + 1e-9).min(2.0)) <= 1e-9);
            } else {
                proptest::prop_assert!(pressure(&logs, k, 2.0) >= 0.0);
            }
        }
    }
}
