//! Multi-start Newton search for the Zapponi-form Shabat polynomials of a passport or a
//! specific tree.

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::seed::{conformal_layout, layout, random_unknowns, unknowns_from_layout};
use super::system::{Normalization, ResidualSystem};
use super::{identify_tree, SZSolution, ShabatError};
use crate::plane_tree::{enumerate_colored_trees, Passport, PlaneTree};
use crate::polynomial::RootCluster;
use crate::scalar::Real;

const ACCEPT_RESIDUAL: f64 = 1e-9;
const DEDUP_DISTANCE: f64 = 1e-6;
const RESTARTS_PER_TREE: usize = 200;
/// Above this size the passport's trees are not enumerated.
const ENUMERATION_LIMIT: usize = 11;
const UNENUMERATED_BUDGET: usize = 2000;

#[derive(Clone, Debug)]
pub struct SolveConfig {
    /// Restart budget; by default 200 per tree with the passport.
    pub budget: Option<usize>,
    pub rng_seed: u64,
    pub max_newton_steps: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            budget: None,
            rng_seed: 0,
            max_newton_steps: 60,
        }
    }
}

/// Colored plane trees realizing exactly this passport, or `None` when too large to list.
fn trees_with_passport(passport: &Passport) -> Option<Vec<PlaneTree>> {
    let n = passport.edge_count();
    (n <= ENUMERATION_LIMIT).then(|| {
        enumerate_colored_trees(n)
            .into_iter()
            .filter(|t| &t.colored_passport() == passport)
            .collect()
    })
}

/// `(all, non-symmetric)` counts of colored plane trees with this passport.
pub fn count_trees_with_passport(passport: &Passport) -> Option<(usize, usize)> {
    trees_with_passport(passport).map(|trees| {
        let nonsym = trees
            .iter()
            .filter(|t| !t.symmetry_flags().rotational)
            .count();
        (trees.len(), nonsym)
    })
}

fn to_solution<T: Real>(sys: &ResidualSystem, u: &[Complex<T>], residual: T) -> Option<SZSolution<T>> {
    let (xs, ys, a) = sys.split(u);
    let all: Vec<Complex<T>> = xs.iter().chain(ys).copied().collect();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if (all[i] - all[j]).norm() < T::lit(DEDUP_DISTANCE) {
                return None;
            }
        }
    }
    if !(a.norm() > T::zero()) || !a.norm().is_finite() {
        return None;
    }
    let poly = sys.polynomial(u);
    let one = Complex::new(T::one(), T::zero());
    let clusters = |pts: &[Complex<T>], mults: &[usize], value: Complex<T>| -> Vec<RootCluster<T>> {
        pts.iter()
            .zip(mults)
            .map(|(&z, &m)| RootCluster {
                location: z,
                multiplicity: m,
                residual: (poly.eval(z) - value).norm(),
            })
            .collect()
    };
    Some(SZSolution {
        white: clusters(xs, &sys.passport().white, one),
        black: clusters(ys, &sys.passport().black, -one),
        leading: a,
        residual,
        poly,
    })
}

/// Largest distance from a white vertex of `a` to the nearest equal-degree white vertex
/// of `b`.
fn vertex_distance<T: Real>(a: &SZSolution<T>, b: &SZSolution<T>) -> T {
    a.white
        .iter()
        .map(|ca| {
            b.white
                .iter()
                .filter(|cb| cb.multiplicity == ca.multiplicity)
                .map(|cb| (ca.location - cb.location).norm())
                .fold(T::infinity(), T::min)
        })
        .fold(T::zero(), T::max)
}

/// Below this relative size the centered white sum counts as zero.
const DEGENERATE_SUM: f64 = 1e-8;

enum Outcome {
    /// Index of a new distinct Zapponi-form solution.
    Zapponi(usize),
    /// A Shabat polynomial whose centered white sum vanishes, with its tree.
    Degenerate(PlaneTree),
    Rejected,
}

/// Newton runs on the anchored system, converted to Zapponi form when it exists.
struct Search<'a, T: Real> {
    sys: &'a ResidualSystem,
    zapponi: ResidualSystem,
    cfg: &'a SolveConfig,
    found: Vec<SZSolution<T>>,
    degenerate: Vec<String>,
    best_residuals: Vec<f64>,
    restarts: usize,
}

impl<'a, T: Real> Search<'a, T> {
    fn new(sys: &'a ResidualSystem, cfg: &'a SolveConfig) -> Self {
        let zapponi = ResidualSystem::with_normalization(sys.passport(), Normalization::Zapponi)
            .expect("passport already validated");
        Self {
            sys,
            zapponi,
            cfg,
            found: Vec::new(),
            degenerate: Vec::new(),
            best_residuals: Vec::new(),
            restarts: 0,
        }
    }

    fn distinct(&self) -> usize {
        self.found.len() + self.degenerate.len()
    }

    fn record_residual(&mut self, r: T) {
        let r = r.to_f64_lossy();
        self.best_residuals.push(if r.is_finite() { r } else { f64::INFINITY });
        self.best_residuals.sort_by(|a, b| a.total_cmp(b));
        self.best_residuals.truncate(5);
    }

    fn attempt(&mut self, start: Vec<Complex<T>>) -> Outcome {
        self.restarts += 1;
        let run = self.sys.newton(start, self.cfg.max_newton_steps);
        self.record_residual(run.residual);
        if !(run.residual < T::lit(ACCEPT_RESIDUAL)) {
            return Outcome::Rejected;
        }
        let (xs, ys, a) = self.sys.split(&run.unknowns);
        let sum = xs.iter().fold(Complex::<T>::zero(), |acc, &x| acc + x);
        let size = xs
            .iter()
            .chain(ys)
            .map(|z| z.norm())
            .fold(T::zero(), T::max);
        if sum.norm() <= T::lit(DEGENERATE_SUM) * (T::one() + size) {
            let poly = self.sys.polynomial(&run.unknowns);
            let Ok(tree) = identify_tree(&poly) else {
                return Outcome::Rejected;
            };
            let code = tree.plane_code();
            if !self.degenerate.contains(&code) {
                self.degenerate.push(code);
            }
            return Outcome::Degenerate(tree);
        }
        // With the weighted white sum at zero the black sum is the negated white sum, so
        // dividing by it gives the Zapponi normalization.
        let scale = sum.inv();
        let mut u: Vec<Complex<T>> = xs.iter().chain(ys).map(|&z| z * scale).collect();
        u.push(a * sum.powu(self.sys.edges() as u32));
        // A small white sum spreads the vertices out, so the residual is judged relative
        // to the coefficient size.
        let polished = self.zapponi.newton(u, self.cfg.max_newton_steps);
        let scale = self.zapponi.coefficient_scale(&polished.unknowns);
        if !(polished.residual < T::lit(ACCEPT_RESIDUAL) * scale) {
            return Outcome::Rejected;
        }
        let Some(sol) = to_solution(&self.zapponi, &polished.unknowns, polished.residual) else {
            return Outcome::Rejected;
        };
        if self
            .found
            .iter()
            .any(|f| vertex_distance(f, &sol) < T::lit(DEDUP_DISTANCE))
        {
            return Outcome::Rejected;
        }
        self.found.push(sol);
        Outcome::Zapponi(self.found.len() - 1)
    }

    fn exhausted(&self) -> ShabatError {
        ShabatError::Exhausted {
            restarts: self.restarts,
            best_residuals: self.best_residuals.clone(),
        }
    }
}

/// Every white degree equal, or every black degree equal, forces the centered white sum
/// to vanish.
fn equal_degrees(passport: &Passport) -> bool {
    let flat = |d: &[usize]| d.windows(2).all(|w| w[0] == w[1]);
    flat(&passport.white) || flat(&passport.black)
}

fn degenerate_error(what: &str) -> ShabatError {
    ShabatError::NoZapponiForm(format!("{what} centered white vertex sum zero"))
}

/// `(terms per constraint, weight exponent)` for the conformal seeds, best first.
const CONFORMAL_VARIANTS: [(usize, f64); 4] = [(2, 1.0), (1, 0.0), (4, 3.0), (3, 1.0)];
const JITTER_SCALES: [f64; 3] = [0.05, 0.15, 0.3];

/// Deterministic seeds for one tree: conformal layouts, then radial layouts from each root.
fn tree_seeds<T: Real>(sys: &ResidualSystem, tree: &PlaneTree) -> Vec<Vec<Complex<T>>> {
    let m = tree.edge_count() - 1;
    let conformal = CONFORMAL_VARIANTS
        .iter()
        .filter_map(|&(k, w)| conformal_layout(tree, k * m, w));
    let radial = (0..tree.vertex_count()).map(|root| layout(tree, root));
    conformal
        .chain(radial)
        .map(|pos| unknowns_from_layout(sys, tree, &pos))
        .collect()
}

/// The primary conformal seed perturbed by noise proportional to the vertex spacing.
fn jittered_seed<T: Real>(
    sys: &ResidualSystem,
    tree: &PlaneTree,
    round: usize,
    rng: &mut impl Rng,
) -> Option<Vec<Complex<T>>> {
    let (k, w) = CONFORMAL_VARIANTS[0];
    let mut pos = conformal_layout(tree, k * (tree.edge_count() - 1), w)?;
    let spacing = pos
        .iter()
        .enumerate()
        .flat_map(|(i, a)| pos[i + 1..].iter().map(move |b| (a - b).norm()))
        .fold(f64::INFINITY, f64::min);
    let sigma = JITTER_SCALES[round % JITTER_SCALES.len()] * spacing;
    for z in pos.iter_mut() {
        *z += Complex::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * (2.0 * sigma);
    }
    Some(unknowns_from_layout(sys, tree, &pos))
}

/// All Zapponi-form solutions for the passport, up to relabeling equal-degree vertices.
///
/// Stops once the number of distinct solutions equals the number of non-symmetric
/// colored trees with the passport (when that number is known) or the budget runs out.
pub fn solve_passport<T: Real>(
    passport: &Passport,
    cfg: &SolveConfig,
) -> Result<Vec<SZSolution<T>>, ShabatError> {
    let sys = ResidualSystem::with_normalization(passport, Normalization::Anchored)?;
    if equal_degrees(passport) {
        return Err(degenerate_error("equal vertex degrees make the"));
    }
    let trees = trees_with_passport(passport);
    let expected = trees.as_ref().map(|ts| {
        ts.iter()
            .filter(|t| !t.symmetry_flags().rotational)
            .count()
    });
    if expected == Some(0) {
        return Err(ShabatError::NoZapponiForm(format!(
            "every tree with passport {passport} is symmetric"
        )));
    }
    let budget = cfg.budget.unwrap_or_else(|| match &trees {
        Some(ts) => RESTARTS_PER_TREE * ts.len().max(1),
        None => UNENUMERATED_BUDGET,
    });
    let mut search = Search::<T>::new(&sys, cfg);
    let done = |s: &Search<T>| expected.is_some_and(|e| s.distinct() >= e);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    if let Some(ts) = &trees {
        let asym: Vec<&PlaneTree> = ts.iter().filter(|t| !t.symmetry_flags().rotational).collect();
        let seeds: Vec<Vec<Vec<Complex<T>>>> = asym.iter().map(|t| tree_seeds(&sys, t)).collect();
        // Round-robin over the trees so every tree gets its best seeds first.
        let rounds = seeds.iter().map(Vec::len).max().unwrap_or(0);
        'deterministic: for r in 0..rounds {
            for list in &seeds {
                if search.restarts >= budget || done(&search) {
                    break 'deterministic;
                }
                if let Some(seed) = list.get(r) {
                    search.attempt(seed.clone());
                }
            }
        }
        let mut round = 0;
        while search.restarts < budget / 2 && !done(&search) {
            for t in &asym {
                if let Some(seed) = jittered_seed(&sys, t, round, &mut rng) {
                    search.attempt(seed);
                }
            }
            round += 1;
        }
    }
    while search.restarts < budget && !done(&search) {
        search.attempt(random_unknowns(&sys, &mut rng));
    }
    if search.found.is_empty() {
        if !search.degenerate.is_empty() {
            return Err(degenerate_error("every solution found has its"));
        }
        return Err(search.exhausted());
    }
    Ok(search.found)
}

/// The unique Zapponi-form Shabat polynomial whose tree is `tree` (colors respected).
pub fn solve_tree<T: Real>(tree: &PlaneTree, cfg: &SolveConfig) -> Result<SZSolution<T>, ShabatError> {
    if tree.edge_count() < 2 {
        return Err(ShabatError::TooFewEdges(tree.edge_count()));
    }
    if tree.symmetry_flags().rotational {
        return Err(ShabatError::NoZapponiForm(
            "the tree has a rotation symmetry about a vertex".into(),
        ));
    }
    let passport = tree.colored_passport();
    let sys = ResidualSystem::with_normalization(&passport, Normalization::Anchored)?;
    if equal_degrees(&passport) {
        return Err(degenerate_error("equal vertex degrees make the"));
    }
    let target = tree.plane_code();
    let mut search = Search::<T>::new(&sys, cfg);
    let check = |search: &mut Search<T>, seed: Vec<Complex<T>>| -> Option<Result<SZSolution<T>, ShabatError>> {
        match search.attempt(seed) {
            Outcome::Zapponi(idx) => {
                let sol = &search.found[idx];
                match identify_tree(&sol.poly) {
                    Ok(t) if t.plane_code() == target => Some(Ok(sol.clone())),
                    _ => None,
                }
            }
            Outcome::Degenerate(t) if t.plane_code() == target => {
                Some(Err(degenerate_error("the Shabat polynomial has its")))
            }
            _ => None,
        }
    };
    for seed in tree_seeds(&sys, tree) {
        if let Some(res) = check(&mut search, seed) {
            return res;
        }
    }
    let budget = cfg.budget.unwrap_or_else(|| match trees_with_passport(&passport) {
        Some(ts) => RESTARTS_PER_TREE * ts.len().max(1),
        None => UNENUMERATED_BUDGET,
    });
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut round = 0;
    while search.restarts < budget / 2 {
        let Some(seed) = jittered_seed(&sys, tree, round, &mut rng) else {
            break;
        };
        if let Some(res) = check(&mut search, seed) {
            return res;
        }
        round += 1;
    }
    while search.restarts < budget {
        if let Some(res) = check(&mut search, random_unknowns(&sys, &mut rng)) {
            return res;
        }
    }
    Err(search.exhausted())
}
