//! Escape-time and basin rasters, and their PPM output.

use std::io::{self, Write};
use std::str::FromStr;

use num_complex::Complex;
use rayon::prelude::*;

use super::FractalError;
use crate::dynamics::{escape_radius, DynamicsClassification};
use crate::polynomial::ComplexPoly;
use crate::scalar::{from_c64, is_finite, Real};

/// Axis-aligned rectangle given by its center and half-extents.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Viewport {
    pub center: Complex<f64>,
    pub half_width: f64,
    pub half_height: f64,
}

impl Viewport {
    pub fn square(center: Complex<f64>, half: f64) -> Self {
        Self {
            center,
            half_width: half,
            half_height: half,
        }
    }
}

impl FromStr for Viewport {
    type Err = String;

    /// `cx,cy,hw,hh`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
            .collect::<Result<_, _>>()?;
        match parts[..] {
            [cx, cy, hw, hh] if hw > 0.0 && hh > 0.0 => Ok(Self {
                center: Complex::new(cx, cy),
                half_width: hw,
                half_height: hh,
            }),
            [_, _, _, _] => Err("half-extents must be positive".into()),
            _ => Err(format!("expected cx,cy,hw,hh, got {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RasterSpec {
    pub width: usize,
    pub height: usize,
    pub viewport: Viewport,
}

impl RasterSpec {
    pub fn new(width: usize, height: usize, viewport: Viewport) -> Result<Self, FractalError> {
        if width == 0 || height == 0 {
            return Err(FractalError::EmptyRaster);
        }
        Ok(Self {
            width,
            height,
            viewport,
        })
    }

    /// Center of pixel `(col, row)`; row 0 is the top edge.
    pub fn pixel_center(&self, col: usize, row: usize) -> Complex<f64> {
        let v = &self.viewport;
        let x = v.center.re - v.half_width + (col as f64 + 0.5) * 2.0 * v.half_width / self.width as f64;
        let y = v.center.im + v.half_height - (row as f64 + 0.5) * 2.0 * v.half_height / self.height as f64;
        Complex::new(x, y)
    }

    pub fn pixel_size(&self) -> f64 {
        (2.0 * self.viewport.half_width / self.width as f64)
            .max(2.0 * self.viewport.half_height / self.height as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    /// Iteration at which the point entered the trap (or escaped), if it did.
    pub escaped_at: Option<u32>,
    /// Which attractor ball was entered; `None` for escape and for no entry.
    pub attractor_id: Option<usize>,
    pub band: u8,
}

#[derive(Clone, Debug)]
pub struct Raster {
    pub spec: RasterSpec,
    /// Row-major, top row first.
    pub cells: Vec<Cell>,
    pub thresholds: Vec<u32>,
}

/// Band boundaries of the default coloring: at most 5 steps, 6 to 7, 8 to 10, later.
pub const DEFAULT_THRESHOLDS: [u32; 3] = [5, 7, 10];

/// Number of thresholds the entry time exceeds; no entry gets the band after the last.
pub fn band_of(entry: Option<u32>, thresholds: &[u32]) -> u8 {
    match entry {
        Some(k) => thresholds.iter().filter(|&&t| k > t).count() as u8,
        None => thresholds.len() as u8 + 1,
    }
}

impl Raster {
    pub fn cell(&self, col: usize, row: usize) -> &Cell {
        &self.cells[row * self.spec.width + col]
    }

    /// Pixels that never entered the trap.
    pub fn bounded_count(&self) -> usize {
        self.cells.iter().filter(|c| c.escaped_at.is_none()).count()
    }

    /// Row-major 8-bit RGB; bands map to white, green, light red, deep red, then blue
    /// for points that never entered the trap.
    pub fn to_rgb(&self) -> Vec<u8> {
        const PALETTE: [[u8; 3]; 5] = [
            [255, 255, 255],
            [40, 170, 60],
            [240, 110, 110],
            [150, 20, 30],
            [30, 50, 170],
        ];
        let never = self.thresholds.len() as u8 + 1;
        let mut buf = Vec::with_capacity(self.cells.len() * 3);
        for c in &self.cells {
            let idx = if c.band == never {
                PALETTE.len() - 1
            } else {
                (c.band as usize).min(PALETTE.len() - 2)
            };
            buf.extend_from_slice(&PALETTE[idx]);
        }
        buf
    }

    /// Binary PPM (P6) of [`Raster::to_rgb`].
    pub fn write_ppm<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "P6\n{} {}\n255\n", self.spec.width, self.spec.height)?;
        out.write_all(&self.to_rgb())?;
        out.flush()
    }
}

fn render_rows<F>(spec: RasterSpec, thresholds: &[u32], entry: F) -> Raster
where
    F: Fn(Complex<f64>) -> (Option<u32>, Option<usize>) + Sync,
{
    let cells = (0..spec.height)
        .into_par_iter()
        .flat_map_iter(|row| {
            let entry = &entry;
            (0..spec.width).map(move |col| {
                let (escaped_at, attractor_id) = entry(spec.pixel_center(col, row));
                Cell {
                    escaped_at,
                    attractor_id,
                    band: band_of(escaped_at, thresholds),
                }
            })
        })
        .collect();
    Raster {
        spec,
        cells,
        thresholds: thresholds.to_vec(),
    }
}

/// Per pixel, the first iteration with `|z| > escape_radius(p)`, or none within `max_iter`.
pub fn render_escape<T: Real>(p: &ComplexPoly<T>, spec: RasterSpec, max_iter: u32) -> Raster {
    let radius = escape_radius(p);
    render_rows(spec, &DEFAULT_THRESHOLDS, |z0| {
        let mut z: Complex<T> = from_c64(z0);
        for k in 0..=max_iter {
            if !is_finite(z) || z.norm() > radius {
                return (Some(k), None);
            }
            if k < max_iter {
                z = p.eval(z);
            }
        }
        (None, None)
    })
}

/// Trap set and coloring for [`render_basins`].
#[derive(Clone, Debug)]
pub struct BasinSpec {
    /// Radius of the balls around attractor points.
    pub trap_radius: f64,
    /// Points beyond this modulus count as trapped at infinity; the escape radius if unset.
    pub escape_cutoff: Option<f64>,
    pub thresholds: Vec<u32>,
    pub max_iter: u32,
}

impl Default for BasinSpec {
    fn default() -> Self {
        Self {
            trap_radius: 0.01,
            escape_cutoff: None,
            thresholds: DEFAULT_THRESHOLDS.to_vec(),
            max_iter: 1000,
        }
    }
}

/// First-entry times into `{|z| > cutoff}` union the balls around every attractor point.
pub fn render_basins<T: Real>(
    p: &ComplexPoly<T>,
    classification: &DynamicsClassification<T>,
    spec: RasterSpec,
    basin: &BasinSpec,
) -> Result<Raster, FractalError> {
    let attractors = classification.attractors();
    let escapes = [&classification.fate_plus, &classification.fate_minus]
        .iter()
        .any(|f| f.kind == crate::dynamics::FateKind::Escape);
    if attractors.is_empty() && !escapes {
        return Err(FractalError::NoAttractor);
    }
    let centers: Vec<(usize, Complex<T>)> = attractors
        .iter()
        .enumerate()
        .flat_map(|(id, f)| f.cycle_points.iter().map(move |&z| (id, z)))
        .collect();
    let cutoff = basin
        .escape_cutoff
        .map(T::lit)
        .unwrap_or_else(|| escape_radius(p));
    let trap = T::lit(basin.trap_radius);
    Ok(render_rows(spec, &basin.thresholds, |z0| {
        let mut z: Complex<T> = from_c64(z0);
        for k in 0..=basin.max_iter {
            if !is_finite(z) || z.norm() > cutoff {
                return (Some(k), None);
            }
            if let Some(&(id, _)) = centers.iter().find(|(_, c)| (z - c).norm() < trap) {
                return (Some(k), Some(id));
            }
            if k < basin.max_iter {
                z = p.eval(z);
            }
        }
        (None, None)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bands_follow_thresholds() {
        let t = DEFAULT_THRESHOLDS;
        let bands: Vec<u8> = [0, 5, 6, 7, 8, 10, 11].iter().map(|&k| band_of(Some(k), &t)).collect();
        assert_eq!(bands, vec![0, 0, 1, 1, 2, 2, 3]);
        assert_eq!(band_of(None, &t), 4);
    }

    #[test]
    fn viewport_parsing() {
        let v: Viewport = "0,0.5,2,1".parse().unwrap();
        assert_eq!(v.center, Complex::new(0.0, 0.5));
        assert!("0,0,-1,1".parse::<Viewport>().is_err());
        assert!("0,0,1".parse::<Viewport>().is_err());
    }

    #[test]
    fn ppm_header() {
        let spec = RasterSpec::new(3, 2, Viewport::square(Complex::new(0.0, 0.0), 1.0)).unwrap();
        let p = ComplexPoly::<f64>::from_real(&[0.0, 0.0, 1.0]);
        let r = render_escape(&p, spec, 10);
        let mut buf = Vec::new();
        r.write_ppm(&mut buf).unwrap();
        assert!(buf.starts_with(b"P6\n3 2\n255\n"));
        assert_eq!(buf.len(), 11 + 18);
    }
}
