//! Batch analysis of plane trees: solve, classify, estimate dimensions, render, persist.

pub mod fixtures;
mod report;
mod store;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{classify, DynamicsClassification, OrbitConfig, Taxonomy};
use crate::fractal::{
    box_dim, julia_cloud, pressure_dim, render_basins, render_escape, uniform_cloud, BasinSpec,
    BoxConfig, PressureConfig, RasterSpec, Viewport,
};
use crate::plane_tree::{enumerate_trees, PlaneTree, SymmetryFlags};
use crate::record::{ClassificationRecord, DimensionRecord, SolutionRecord};
use crate::shabat::{solve_tree, ShabatError, SolveConfig};

pub use fixtures::{caterpillar, fixture, fixtures_with_prefix, reference_trees};
pub use report::{format_poly, markdown_report, series_table};
pub use store::{record_key, Store};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("store I/O at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("record for {code} fails validation: {reason}")]
    Invalid { code: String, reason: String },
    #[error("edge count {0} is outside 2..={1}; raise the cap to go further")]
    EdgeCount(usize, usize),
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

/// Why a record has no Zapponi-form solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingReason {
    /// A rotation symmetry rules the Zapponi form out.
    Symmetric,
    /// The solver ran out of restarts.
    Exhausted,
    /// The Shabat polynomial exists but its white vertices sum to zero once centered.
    NoZapponiForm,
}

#[derive(Clone, Debug)]
pub struct RenderConfig {
    pub width: usize,
    pub height: usize,
    pub max_iter: u32,
    /// Fixed viewport; by default a square around a small Julia cloud.
    pub viewport: Option<Viewport>,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            width: 400,
            height: 400,
            max_iter: 200,
            viewport: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CatalogConfig {
    pub solve: SolveConfig,
    pub orbit: OrbitConfig,
    /// Run both dimension estimators.
    pub dims: bool,
    pub cloud_points: usize,
    pub cloud_seed: u64,
    pub pressure_max_period: Option<usize>,
    /// Render escape and basin images into the store.
    pub render: Option<RenderConfig>,
    /// Recompute records already in the store.
    pub force: bool,
    /// Largest edge count `run_catalog` accepts.
    pub max_edges: usize,
    /// Worker threads; the global pool when unset.
    pub jobs: Option<usize>,
}

impl Default for CatalogConfig {
    fn default() -> Self {
        Self {
            solve: SolveConfig::default(),
            orbit: OrbitConfig::default(),
            dims: false,
            cloud_points: 200_000,
            cloud_seed: 0,
            pressure_max_period: None,
            render: None,
            force: false,
            max_edges: 8,
            jobs: None,
        }
    }
}

/// One tree's analysis. Stage failures are kept in `failures`, keyed by stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogRecord {
    pub tree_code: String,
    /// Colored passport of the tree as coded (white degrees first).
    pub passport: String,
    pub symmetry: SymmetryFlags,
    pub sz: Option<SolutionRecord>,
    pub reason: Option<MissingReason>,
    pub classification: Option<ClassificationRecord>,
    pub dims: Vec<DimensionRecord>,
    /// Paths relative to the store root.
    pub artifacts: Vec<String>,
    pub failures: BTreeMap<String, String>,
    /// Seconds per stage.
    pub timings: BTreeMap<String, f64>,
}

/// Largest Zapponi defect accepted when a stored solution is re-validated.
pub const STORED_DEFECT_TOL: f64 = 1e-8;

impl CatalogRecord {
    pub fn taxonomy(&self) -> Option<&str> {
        self.classification.as_ref().map(|c| c.taxonomy.as_str())
    }

    /// Checks the record's cross-field invariants and its solution's Zapponi identities.
    pub fn validate(&self) -> Result<(), CatalogError> {
        let bad = |reason: String| CatalogError::Invalid {
            code: self.tree_code.clone(),
            reason,
        };
        if self.sz.is_some() == self.reason.is_some() {
            return Err(bad("exactly one of sz and reason must be present".into()));
        }
        if self.classification.is_some() && self.sz.is_none() {
            return Err(bad("classification without a solution".into()));
        }
        if let Some(sz) = &self.sz {
            if sz.tree_code != self.tree_code {
                return Err(bad(format!("solution is for {}", sz.tree_code)));
            }
            let sol = sz.to_solution();
            let defect = sol.defects().max();
            if !(defect < STORED_DEFECT_TOL) {
                return Err(bad(format!("Zapponi defect {defect:.3e}")));
            }
            let one = Complex::new(1.0, 0.0);
            let vertices = sol.white.iter().map(|c| (c, one)).chain(sol.black.iter().map(|c| (c, -one)));
            for (c, value) in vertices {
                let z = c.location;
                let scale: f64 = sol.poly.coeffs().iter().rev().fold(0.0, |acc, a| acc * z.norm() + a.norm());
                let miss = (sol.poly.eval(z) - value).norm();
                if !(miss <= STORED_DEFECT_TOL * scale) {
                    return Err(bad(format!("p({z}) misses {value} by {miss:.3e}")));
                }
            }
        }
        if let Some(c) = &self.classification {
            let expected = match c.taxonomy.as_str() {
                "undetermined" => "unknown",
                "g4" => "totally_disconnected",
                "s3" => "infinitely_many_components",
                "g1" | "g2" | "g3" | "s1" | "s2" => "connected",
                other => return Err(bad(format!("unknown taxonomy {other}"))),
            };
            if c.connectedness != expected {
                return Err(bad(format!("{} with {}", c.taxonomy, c.connectedness)));
            }
        }
        for d in &self.dims {
            if !(0.0..=2.0).contains(&d.value) {
                return Err(bad(format!("dimension {} out of range", d.value)));
            }
        }
        Ok(())
    }
}

/// Square viewport around a small Julia cloud, padded by a fifth on each side.
fn auto_viewport(p: &crate::Poly, seed: u64) -> Option<Viewport> {
    let cloud = julia_cloud(p, 4096, seed).ok()?;
    let (mut lo, mut hi) = ((f64::MAX, f64::MAX), (f64::MIN, f64::MIN));
    for z in &cloud {
        lo = (lo.0.min(z.re), lo.1.min(z.im));
        hi = (hi.0.max(z.re), hi.1.max(z.im));
    }
    let half = 0.6 * (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-6);
    Some(Viewport::square(
        Complex::new((lo.0 + hi.0) / 2.0, (lo.1 + hi.1) / 2.0),
        half,
    ))
}

/// Output of [`analyze_tree`]: the record plus rendered images to be written by a store.
pub struct Analysis {
    pub record: CatalogRecord,
    pub images: Vec<(String, crate::fractal::Raster)>,
}

fn timed<R>(timings: &mut BTreeMap<String, f64>, stage: &str, f: impl FnOnce() -> R) -> R {
    let t = Instant::now();
    let r = f();
    timings.insert(stage.into(), t.elapsed().as_secs_f64());
    r
}

/// Runs the full pipeline on one tree; never fails, stage errors land in the record.
pub fn analyze_tree(tree: &PlaneTree, cfg: &CatalogConfig) -> Analysis {
    let tree_code = tree.plane_code();
    let mut timings = BTreeMap::new();
    let mut failures = BTreeMap::new();
    let symmetry = tree.symmetry_flags();
    let mut record = CatalogRecord {
        tree_code: tree_code.clone(),
        passport: tree.colored_passport().to_string(),
        symmetry,
        sz: None,
        reason: None,
        classification: None,
        dims: Vec::new(),
        artifacts: Vec::new(),
        failures: BTreeMap::new(),
        timings: BTreeMap::new(),
    };
    let mut images = Vec::new();
    if symmetry.rotational {
        record.reason = Some(MissingReason::Symmetric);
        return Analysis { record, images };
    }
    let solved = timed(&mut timings, "solve", || solve_tree::<f64>(tree, &cfg.solve));
    let sol = match solved {
        Ok(s) => s,
        Err(e) => {
            record.reason = Some(match e {
                ShabatError::NoZapponiForm(_) => MissingReason::NoZapponiForm,
                _ => MissingReason::Exhausted,
            });
            failures.insert("solve".into(), e.to_string());
            record.failures = failures;
            record.timings = timings;
            return Analysis { record, images };
        }
    };
    record.sz = Some(SolutionRecord::new(
        record.passport.clone(),
        tree_code.clone(),
        &sol,
    ));
    let class: DynamicsClassification<f64> =
        timed(&mut timings, "classify", || classify(&sol.poly, &cfg.orbit));
    record.classification = Some((&class).into());

    if cfg.dims {
        let box_cfg = BoxConfig {
            disconnected: class.taxonomy == Taxonomy::G4,
            ..BoxConfig::default()
        };
        let est = timed(&mut timings, "box_dim", || {
            uniform_cloud(&sol.poly, cfg.cloud_points, cfg.cloud_seed)
                .and_then(|cloud| box_dim(&cloud, &box_cfg))
        });
        match est {
            Ok(d) => record.dims.push((&d).into()),
            Err(e) => {
                failures.insert("box_dim".into(), e.to_string());
            }
        }
        if class.taxonomy == Taxonomy::Undetermined {
            failures.insert(
                "pressure_dim".into(),
                "skipped: critical fates undetermined, hyperbolicity unknown".into(),
            );
        } else {
            let pcfg = PressureConfig {
                max_period: cfg.pressure_max_period,
                attractor_multiplier: class.max_multiplier(),
            };
            match timed(&mut timings, "pressure_dim", || pressure_dim(&sol.poly, &pcfg)) {
                Ok(d) => record.dims.push((&d).into()),
                Err(e) => {
                    failures.insert("pressure_dim".into(), e.to_string());
                }
            }
        }
    }

    if let Some(rc) = &cfg.render {
        let key = record_key(&tree_code);
        let viewport = rc
            .viewport
            .or_else(|| auto_viewport(&sol.poly, cfg.cloud_seed));
        match viewport.ok_or(crate::fractal::FractalError::NoRepellingFixedPoint)
            .and_then(|v| RasterSpec::new(rc.width, rc.height, v))
        {
            Ok(spec) => {
                let escape = timed(&mut timings, "render_escape", || {
                    render_escape(&sol.poly, spec, rc.max_iter)
                });
                images.push((format!("images/{key}-escape.ppm"), escape));
                let basin = BasinSpec {
                    max_iter: rc.max_iter,
                    ..BasinSpec::default()
                };
                match timed(&mut timings, "render_basins", || {
                    render_basins(&sol.poly, &class, spec, &basin)
                }) {
                    Ok(r) => images.push((format!("images/{key}-basins.ppm"), r)),
                    Err(e) => {
                        failures.insert("render_basins".into(), e.to_string());
                    }
                }
            }
            Err(e) => {
                failures.insert("render".into(), e.to_string());
            }
        }
        record.artifacts = images.iter().map(|(p, _)| p.clone()).collect();
    }
    record.failures = failures;
    record.timings = timings;
    Analysis { record, images }
}

fn with_pool<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R, CatalogError> {
    match jobs {
        None => Ok(f()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| CatalogError::Pool(e.to_string())),
    }
}

/// Analyzes `trees` into the store, skipping codes already present unless forced.
/// Returns the records in input order.
pub fn run_trees(
    trees: &[PlaneTree],
    cfg: &CatalogConfig,
    store_path: &Path,
) -> Result<Vec<CatalogRecord>, CatalogError> {
    let store = Store::open(store_path)?;
    let todo: Vec<&PlaneTree> = trees
        .iter()
        .filter(|t| cfg.force || !store.contains(&t.plane_code()))
        .collect();
    let written: Vec<Result<(), CatalogError>> = with_pool(cfg.jobs, || {
        todo.par_iter()
            .map(|t| store.write_analysis(&analyze_tree(t, cfg)))
            .collect()
    })?;
    written.into_iter().collect::<Result<(), _>>()?;
    store.refresh_index()?;
    trees.iter().map(|t| store.load(&t.plane_code())).collect()
}

/// Every plane tree with `n_edges` edges, one per color-swap pair.
pub fn run_catalog(
    n_edges: usize,
    cfg: &CatalogConfig,
    store_path: &Path,
) -> Result<Vec<CatalogRecord>, CatalogError> {
    if !(2..=cfg.max_edges).contains(&n_edges) {
        return Err(CatalogError::EdgeCount(n_edges, cfg.max_edges));
    }
    run_trees(&enumerate_trees(n_edges), cfg, store_path)
}

/// The caterpillars `<n, m | 2, 1, ..., 1>` for `n` in `ns`, paired with `n`.
pub fn run_series(
    m: usize,
    ns: impl IntoIterator<Item = usize>,
    cfg: &CatalogConfig,
    store_path: &Path,
) -> Result<Vec<(usize, CatalogRecord)>, CatalogError> {
    let ns: Vec<usize> = ns.into_iter().collect();
    let trees: Vec<PlaneTree> = ns.iter().map(|&n| caterpillar(n, m)).collect();
    let records = run_trees(&trees, cfg, store_path)?;
    Ok(ns.into_iter().zip(records).collect())
}
