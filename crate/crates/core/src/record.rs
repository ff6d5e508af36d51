//! Plain `f64` records used for JSON output and the catalog store.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dynamics::{CriticalOrbitFate, DynamicsClassification};
use crate::fractal::{DimensionEstimate, Diagnostics};
use crate::polynomial::{ComplexPoly, RootCluster};
use crate::scalar::{to_c64, Real};
use crate::shabat::SZSolution;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexRecord {
    pub re: f64,
    pub im: f64,
}

impl ComplexRecord {
    pub fn to_complex(self) -> Complex<f64> {
        Complex::new(self.re, self.im)
    }
}

impl<T: Real> From<Complex<T>> for ComplexRecord {
    fn from(z: Complex<T>) -> Self {
        let z = to_c64(z);
        Self { re: z.re, im: z.im }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub re: f64,
    pub im: f64,
    pub mult: usize,
}

impl<T: Real> From<&RootCluster<T>> for VertexRecord {
    fn from(c: &RootCluster<T>) -> Self {
        let z = to_c64(c.location);
        Self {
            re: z.re,
            im: z.im,
            mult: c.multiplicity,
        }
    }
}

/// A Zapponi-form solution; coefficients are ascending `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub passport: String,
    pub tree_code: String,
    pub coefficients: Vec<[f64; 2]>,
    pub white: Vec<VertexRecord>,
    pub black: Vec<VertexRecord>,
    pub residual: f64,
}

impl SolutionRecord {
    pub fn new<T: Real>(passport: String, tree_code: String, sol: &SZSolution<T>) -> Self {
        Self {
            passport,
            tree_code,
            coefficients: sol
                .poly
                .coeffs()
                .iter()
                .map(|&a| {
                    let a = to_c64(a);
                    [a.re, a.im]
                })
                .collect(),
            white: sol.white.iter().map(VertexRecord::from).collect(),
            black: sol.black.iter().map(VertexRecord::from).collect(),
            residual: sol.residual.to_f64_lossy(),
        }
    }

    pub fn poly(&self) -> ComplexPoly<f64> {
        ComplexPoly::new(
            self.coefficients
                .iter()
                .map(|&[re, im]| Complex::new(re, im))
                .collect(),
        )
    }

    /// Rebuilds the solution for re-validation.
    pub fn to_solution(&self) -> SZSolution<f64> {
        let cluster = |v: &VertexRecord| RootCluster {
            location: Complex::new(v.re, v.im),
            multiplicity: v.mult,
            residual: 0.0,
        };
        let poly = self.poly();
        SZSolution {
            leading: poly.leading(),
            poly,
            white: self.white.iter().map(cluster).collect(),
            black: self.black.iter().map(cluster).collect(),
            residual: self.residual,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FateRecord {
    pub kind: String,
    pub period: usize,
    pub multiplier: ComplexRecord,
    pub points: Vec<ComplexRecord>,
    pub iterations: usize,
    pub confidence: String,
}

impl<T: Real> From<&CriticalOrbitFate<T>> for FateRecord {
    fn from(f: &CriticalOrbitFate<T>) -> Self {
        Self {
            kind: f.kind.to_string(),
            period: f.period,
            multiplier: f.multiplier.into(),
            points: f.cycle_points.iter().map(|&z| z.into()).collect(),
            iterations: f.iterations_used,
            confidence: f.confidence.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub taxonomy: String,
    pub connectedness: String,
    pub plus: FateRecord,
    pub minus: FateRecord,
}

impl<T: Real> From<&DynamicsClassification<T>> for ClassificationRecord {
    fn from(c: &DynamicsClassification<T>) -> Self {
        Self {
            taxonomy: c.taxonomy.to_string(),
            connectedness: c.connectedness.to_string(),
            plus: (&c.fate_plus).into(),
            minus: (&c.fate_minus).into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionRecord {
    pub method: String,
    pub value: f64,
    pub confidence: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fit_r2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scales_used: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bracket: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_period: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub orbits: Option<usize>,
}

impl From<&DimensionEstimate> for DimensionRecord {
    fn from(d: &DimensionEstimate) -> Self {
        let mut rec = Self {
            method: d.method.to_string(),
            value: d.value,
            confidence: if d.low_confidence { "low" } else { "ok" }.into(),
            fit_r2: None,
            scales_used: None,
            bracket: None,
            drift: None,
            max_period: None,
            orbits: None,
        };
        match d.diagnostics {
            Diagnostics::Box { fit_r2, scales_used } => {
                rec.fit_r2 = Some(fit_r2);
                rec.scales_used = Some(scales_used);
            }
            Diagnostics::Pressure {
                bracket,
                drift,
                max_period,
                orbits,
                ..
            } => {
                rec.bracket = Some(bracket);
                rec.drift = Some(drift);
                rec.max_period = Some(max_period);
                rec.orbits = Some(orbits);
            }
        }
        rec
    }
}
