//! Fates of the critical values `+1` and `-1` under iteration, and the resulting
//! taxonomy and connectedness of the Julia set.

use std::fmt;

use num_complex::Complex;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::polynomial::ComplexPoly;
use crate::scalar::{is_finite, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("cycle refinement for period {period} diverged; last iterate {last}")]
    RefineDiverged { period: usize, last: Complex<f64> },
    #[error("period must be at least one")]
    ZeroPeriod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FateKind {
    AttractingPoint,
    AttractingCycle,
    Escape,
    Undetermined,
}

impl fmt::Display for FateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FateKind::AttractingPoint => "attracting_point",
            FateKind::AttractingCycle => "attracting_cycle",
            FateKind::Escape => "escape",
            FateKind::Undetermined => "undetermined",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Confidence {
    Ok,
    Low,
}

impl fmt::Display for Confidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Confidence::Ok => "ok",
            Confidence::Low => "low",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalOrbitFate<T: Real> {
    pub kind: FateKind,
    /// Empty unless the orbit converges to a point or cycle.
    pub cycle_points: Vec<Complex<T>>,
    pub period: usize,
    /// Product of `p'` over the cycle.
    pub multiplier: Complex<T>,
    pub iterations_used: usize,
    /// Low when the cycle came from the loose second pass or was not refined.
    pub confidence: Confidence,
}

impl<T: Real> CriticalOrbitFate<T> {
    fn without_cycle(kind: FateKind, iterations_used: usize) -> Self {
        Self {
            kind,
            cycle_points: Vec::new(),
            period: 1,
            multiplier: Complex::zero(),
            iterations_used,
            confidence: Confidence::Ok,
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self.kind, FateKind::AttractingPoint | FateKind::AttractingCycle)
    }

    /// Same period and every point of one cycle within `tol` of a point of the other.
    pub fn same_cycle(&self, other: &Self, tol: T) -> bool {
        self.is_bounded()
            && other.is_bounded()
            && self.period == other.period
            && self.cycle_points.iter().all(|&a| {
                other
                    .cycle_points
                    .iter()
                    .any(|&b| (a - b).norm() < tol)
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Taxonomy {
    G1,
    G2,
    G3,
    G4,
    S1,
    S2,
    S3,
    Undetermined,
}

impl fmt::Display for Taxonomy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Taxonomy::G1 => "g1",
            Taxonomy::G2 => "g2",
            Taxonomy::G3 => "g3",
            Taxonomy::G4 => "g4",
            Taxonomy::S1 => "s1",
            Taxonomy::S2 => "s2",
            Taxonomy::S3 => "s3",
            Taxonomy::Undetermined => "undetermined",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connectedness {
    Connected,
    InfinitelyManyComponents,
    TotallyDisconnected,
    Unknown,
}

impl fmt::Display for Connectedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Connectedness::Connected => "connected",
            Connectedness::InfinitelyManyComponents => "infinitely_many_components",
            Connectedness::TotallyDisconnected => "totally_disconnected",
            Connectedness::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicsClassification<T: Real> {
    pub fate_plus: CriticalOrbitFate<T>,
    pub fate_minus: CriticalOrbitFate<T>,
    pub taxonomy: Taxonomy,
    pub connectedness: Connectedness,
}

impl<T: Real> DynamicsClassification<T> {
    /// Distinct attracting cycles, each listed once.
    pub fn attractors(&self) -> Vec<&CriticalOrbitFate<T>> {
        let mut out = Vec::new();
        for f in [&self.fate_plus, &self.fate_minus] {
            if f.is_bounded() && !out.iter().any(|g: &&CriticalOrbitFate<T>| g.same_cycle(f, T::lit(SAME_CYCLE_TOL))) {
                out.push(f);
            }
        }
        out
    }

    /// Largest multiplier modulus over the attractors, zero if there are none.
    pub fn max_multiplier(&self) -> T {
        self.attractors()
            .iter()
            .map(|f| f.multiplier.norm())
            .fold(T::zero(), T::max)
    }
}

#[derive(Clone, Debug)]
pub struct OrbitConfig {
    pub max_iter: usize,
    pub tol: f64,
    /// Tolerance of the second pass for weakly attracting cycles.
    pub fallback_tol: f64,
    pub fallback_max_period: usize,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        Self {
            max_iter: 200_000,
            tol: 1e-9,
            fallback_tol: 1e-6,
            fallback_max_period: 64,
        }
    }
}

const SAME_CYCLE_TOL: f64 = 1e-6;
const REFINE_TOL: f64 = 1e-12;
const REFINE_MAX_STEPS: usize = 60;

/// `R = max(1, (2 + sum_{i<n} |a_i|) / |a_n|)`; beyond it `|p(z)| >= 2|z|`.
pub fn escape_radius<T: Real>(p: &ComplexPoly<T>) -> T {
    let n = p.degree();
    let tail = p.coeffs()[..n]
        .iter()
        .fold(T::lit(2.0), |acc, a| acc + a.norm());
    (tail / p.leading().norm()).max(T::one())
}

/// `p^k(z)` and the derivative of `p^k` at `z`.
fn iterate_with_derivative<T: Real>(p: &ComplexPoly<T>, z: Complex<T>, k: usize) -> (Complex<T>, Complex<T>) {
    let mut w = z;
    let mut d = Complex::one();
    for _ in 0..k {
        let (v, dv) = p.eval_with_derivative(w);
        d *= dv;
        w = v;
    }
    (w, d)
}

fn iterate<T: Real>(p: &ComplexPoly<T>, z: Complex<T>, k: usize) -> Complex<T> {
    (0..k).fold(z, |w, _| p.eval(w))
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            out.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Newton on `p^k(z) - z`; returns the cycle starting at the polished point and its
/// multiplier.
pub fn refine_cycle<T: Real>(
    p: &ComplexPoly<T>,
    period: usize,
    guess: Complex<T>,
) -> Result<(Vec<Complex<T>>, Complex<T>), DynamicsError> {
    if period == 0 {
        return Err(DynamicsError::ZeroPeriod);
    }
    let mut z = guess;
    let mut best = (z, T::infinity());
    for _ in 0..REFINE_MAX_STEPS {
        let (w, d) = iterate_with_derivative(p, z, period);
        let f = w - z;
        let size = f.norm();
        if !size.is_finite() {
            break;
        }
        if size < best.1 {
            best = (z, size);
        }
        if size < T::lit(REFINE_TOL) * (T::one() + z.norm()) {
            break;
        }
        let slope = d - Complex::one();
        if slope.is_zero() {
            break;
        }
        z -= f / slope;
    }
    // Rounding in long compositions can keep |F| slightly above the target.
    let floor = T::epsilon() * T::lit(1e4) * T::from_usize(period) * (T::one() + best.0.norm());
    if !(best.1 < T::lit(REFINE_TOL).max(floor)) {
        return Err(DynamicsError::RefineDiverged {
            period,
            last: crate::scalar::to_c64(z),
        });
    }
    let mut points = Vec::with_capacity(period);
    let mut w = best.0;
    let mut mult = Complex::one();
    for _ in 0..period {
        points.push(w);
        let (v, dv) = p.eval_with_derivative(w);
        mult *= dv;
        w = v;
    }
    Ok((points, mult))
}

/// Shortest period `d | period` with `|p^d(z) - z| < tol`.
fn minimize_period<T: Real>(p: &ComplexPoly<T>, z: Complex<T>, mut period: usize, tol: T) -> usize {
    for q in prime_factors(period) {
        while period.is_multiple_of(q) && (iterate(p, z, period / q) - z).norm() < tol {
            period /= q;
        }
    }
    period
}

/// Turns a detected near-cycle into a fate, refining it when possible.
fn cycle_fate<T: Real>(
    p: &ComplexPoly<T>,
    z: Complex<T>,
    period: usize,
    tol: T,
    iterations_used: usize,
    confidence: Confidence,
) -> CriticalOrbitFate<T> {
    let mut period = minimize_period(p, z, period, tol * T::lit(10.0));
    let refined = refine_cycle(p, period, z).and_then(|(pts, m)| {
        // Near multiplier -1 the doubled period closes first; the polished point shows
        // the true one.
        let exact = minimize_period(p, pts[0], period, T::lit(1e-9) * (T::one() + pts[0].norm()));
        if exact == period {
            Ok((pts, m))
        } else {
            period = exact;
            refine_cycle(p, period, pts[0])
        }
    });
    let (points, multiplier, confidence) = match refined {
        Ok((pts, m)) => (pts, m, confidence),
        Err(_) => {
            let (_, m) = iterate_with_derivative(p, z, period);
            let mut pts = Vec::with_capacity(period);
            let mut w = z;
            for _ in 0..period {
                pts.push(w);
                w = p.eval(w);
            }
            (pts, m, Confidence::Low)
        }
    };
    let kind = if !(multiplier.norm() < T::one()) {
        FateKind::Undetermined
    } else if period == 1 {
        FateKind::AttractingPoint
    } else {
        FateKind::AttractingCycle
    };
    CriticalOrbitFate {
        kind,
        cycle_points: points,
        period,
        multiplier,
        iterations_used,
        confidence,
    }
}

/// Iterates `z0` until escape or until Brent's method finds a repeat within `tol`.
pub fn iterate_orbit<T: Real>(
    p: &ComplexPoly<T>,
    z0: Complex<T>,
    max_iter: usize,
    tol: T,
) -> CriticalOrbitFate<T> {
    let radius = escape_radius(p);
    let escaped = |z: Complex<T>| !is_finite(z) || z.norm() > radius;
    if escaped(z0) {
        return CriticalOrbitFate::without_cycle(FateKind::Escape, 0);
    }
    let mut tortoise = z0;
    let mut hare = p.eval(z0);
    let mut power = 1;
    let mut lam = 1;
    let mut steps = 1;
    loop {
        if escaped(hare) {
            return CriticalOrbitFate::without_cycle(FateKind::Escape, steps);
        }
        if (hare - tortoise).norm() < tol {
            return cycle_fate(p, hare, lam, tol, steps, Confidence::Ok);
        }
        if steps >= max_iter {
            return CriticalOrbitFate::without_cycle(FateKind::Undetermined, steps);
        }
        if power == lam {
            tortoise = hare;
            power *= 2;
            lam = 0;
        }
        hare = p.eval(hare);
        lam += 1;
        steps += 1;
    }
}

/// [`iterate_orbit`], followed for bounded undetermined orbits by a loose search for the
/// shortest near-period up to `fallback_max_period` from the final iterate.
pub fn critical_fate<T: Real>(p: &ComplexPoly<T>, z0: Complex<T>, cfg: &OrbitConfig) -> CriticalOrbitFate<T> {
    let fate = iterate_orbit(p, z0, cfg.max_iter, T::lit(cfg.tol));
    if fate.kind != FateKind::Undetermined || !fate.cycle_points.is_empty() {
        return fate;
    }
    let z = iterate(p, z0, cfg.max_iter);
    if !is_finite(z) || z.norm() > escape_radius(p) {
        return CriticalOrbitFate::without_cycle(FateKind::Escape, cfg.max_iter);
    }
    let tol = T::lit(cfg.fallback_tol);
    let mut w = z;
    for k in 1..=cfg.fallback_max_period {
        w = p.eval(w);
        if (w - z).norm() < tol {
            return cycle_fate(p, z, k, tol, 2 * cfg.max_iter + k, Confidence::Low);
        }
    }
    CriticalOrbitFate::without_cycle(FateKind::Undetermined, 2 * cfg.max_iter + cfg.fallback_max_period)
}

/// Taxonomy and connectedness from the two critical fates.
pub fn combine<T: Real>(plus: CriticalOrbitFate<T>, minus: CriticalOrbitFate<T>) -> DynamicsClassification<T> {
    use FateKind::*;
    let tol = T::lit(SAME_CYCLE_TOL);
    let taxonomy = match (plus.kind, minus.kind) {
        (Undetermined, _) | (_, Undetermined) => Taxonomy::Undetermined,
        (Escape, Escape) => Taxonomy::G4,
        (Escape, _) | (_, Escape) => Taxonomy::S3,
        (AttractingPoint, AttractingPoint) => Taxonomy::G1,
        (AttractingPoint, AttractingCycle) | (AttractingCycle, AttractingPoint) => Taxonomy::S1,
        (AttractingCycle, AttractingCycle) => {
            if plus.same_cycle(&minus, tol) {
                if plus.period == 2 {
                    Taxonomy::G2
                } else {
                    Taxonomy::G3
                }
            } else {
                Taxonomy::S2
            }
        }
    };
    let connectedness = match taxonomy {
        Taxonomy::Undetermined => Connectedness::Unknown,
        Taxonomy::G4 => Connectedness::TotallyDisconnected,
        Taxonomy::S3 => Connectedness::InfinitelyManyComponents,
        _ => Connectedness::Connected,
    };
    DynamicsClassification {
        fate_plus: plus,
        fate_minus: minus,
        taxonomy,
        connectedness,
    }
}

/// Imaginary parts below this fraction of the largest coefficient count as rounding noise.
const REAL_COEFF_TOL: f64 = 1e-12;

/// `p` with negligible imaginary parts dropped, so real orbits stay exactly real.
///
/// A real critical value of a real polynomial has a real orbit. Keeping rounding-level
/// imaginary parts lets a bounded orbit on a repelling stretch of the real line drift off
/// the axis and escape.
pub fn realify<T: Real>(p: &ComplexPoly<T>) -> Option<ComplexPoly<T>> {
    let scale = p.coeffs().iter().map(|a| a.norm()).fold(T::zero(), T::max);
    let noise = p.coeffs().iter().map(|a| a.im.abs()).fold(T::zero(), T::max);
    (noise <= T::lit(REAL_COEFF_TOL) * scale).then(|| {
        ComplexPoly::new(p.coeffs().iter().map(|a| Complex::new(a.re, T::zero())).collect())
    })
}

/// Classifies a Shabat polynomial by the fates of its critical values.
pub fn classify<T: Real>(p: &ComplexPoly<T>, cfg: &OrbitConfig) -> DynamicsClassification<T> {
    let real = realify(p);
    let p = real.as_ref().unwrap_or(p);
    let one = Complex::<T>::one();
    let (plus, minus) = rayon::join(|| critical_fate(p, one, cfg), || critical_fate(p, -one, cfg));
    combine(plus, minus)
}
