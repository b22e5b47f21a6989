//! Star-convex centroidal profiles.
//!
//! A shape is described by the radial distance of its farthest boundary
//! point along `N` uniformly spaced rays cast from the inner center, the
//! center of the largest inscribed circle.

use std::f64::consts::{SQRT_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Boundary, Point, Shape};

pub const DEFAULT_N: usize = 360;
pub const DEFAULT_GRID_STEP: f64 = 0.25;

/// `N` nonnegative radii sampled counterclockwise at
/// `angle0 + i * 2π / N` around `center`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarContour {
    pub center: Point,
    pub angle0: f64,
    radii: Vec<f64>,
}

impl StarContour {
    pub fn new(center: Point, angle0: f64, radii: Vec<f64>) -> Result<StarContour> {
        if radii.len() < 3 {
            return Err(Error::InvalidN(radii.len()));
        }
        if let Some((i, r)) = radii
            .iter()
            .enumerate()
            .find(|(_, r)| !(r.is_finite() && **r >= 0.0))
        {
            return Err(Error::InvalidShape(format!("radius {i} is {r}")));
        }
        if !center.is_finite() || !angle0.is_finite() {
            return Err(Error::InvalidShape("non-finite center or angle".into()));
        }
        Ok(StarContour {
            center,
            angle0,
            radii,
        })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn into_radii(self) -> Vec<f64> {
        self.radii
    }

    pub fn n(&self) -> usize {
        self.radii.len()
    }

    pub fn angle(&self, i: usize) -> f64 {
        sample_angle(self.angle0, i, self.n())
    }

    /// Same center and angular frame, new radii (e.g. a reconstruction).
    pub fn with_radii(&self, radii: Vec<f64>) -> Result<StarContour> {
        if radii.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: radii.len(),
            });
        }
        StarContour::new(self.center, self.angle0, radii)
    }

    /// Polygon vertices `center + r_i (cos θ_i, sin θ_i)`, counterclockwise.
    pub fn vertices(&self) -> Vec<Point> {
        self.radii
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let a = self.angle(i);
                Point::new(self.center.x + r * a.cos(), self.center.y + r * a.sin())
            })
            .collect()
    }
}

pub fn sample_angle(angle0: f64, i: usize, n: usize) -> f64 {
    angle0 + i as f64 * TAU / n as f64
}

/// Extraction parameters. `center: None` means the inner center is computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractOptions {
    pub n: usize,
    pub angle0: f64,
    pub grid_step: f64,
    pub center: Option<Point>,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            n: DEFAULT_N,
            angle0: 0.0,
            grid_step: DEFAULT_GRID_STEP,
            center: None,
        }
    }
}

impl ExtractOptions {
    pub fn with_n(n: usize) -> Self {
        ExtractOptions {
            n,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerCenter {
    pub point: Point,
    /// Distance from `point` to the nearest boundary segment.
    pub radius: f64,
}

/// Finds the center of the largest inscribed circle to `grid_step` resolution.
///
/// Starts from a coarse grid over the bounding box and refines by 3x per
/// level. A cell is subdivided only while its optimistic bound (center
/// distance plus half diagonal) can still beat the best point found, so the
/// global maximum is never pruned. Ties go to the smallest `(y, x)`.
pub fn compute_inner_center(shape: &Shape, grid_step: f64) -> Result<InnerCenter> {
    inner_center_of(&shape.boundary(), grid_step)
}

pub(crate) fn inner_center_of(boundary: &Boundary, grid_step: f64) -> Result<InnerCenter> {
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "grid step must be positive, got {grid_step}"
        )));
    }
    if boundary.is_empty() {
        return Err(Error::EmptyShape);
    }
    let bbox = boundary.bbox().ok_or(Error::EmptyShape)?;
    let extent = bbox.width().max(bbox.height());
    if extent <= 0.0 {
        return Err(Error::EmptyShape);
    }

    let mut step = grid_step;
    while extent / step > 32.0 {
        step *= 3.0;
    }
    let cols = (bbox.width() / step).ceil().max(1.0) as usize;
    let rows = (bbox.height() / step).ceil().max(1.0) as usize;

    let mut best: Option<InnerCenter> = None;
    let consider = |p: Point, d: f64, best: &mut Option<InnerCenter>| {
        if d <= 0.0 {
            return;
        }
        let better = match best {
            None => true,
            Some(b) => d > b.radius || (d == b.radius && (p.y, p.x) < (b.point.y, b.point.x)),
        };
        if better {
            *best = Some(InnerCenter {
                point: p,
                radius: d,
            });
        }
    };

    let mut cells: Vec<(Point, f64)> = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let p = Point::new(
                bbox.min.x + (c as f64 + 0.5) * step,
                bbox.min.y + (r as f64 + 0.5) * step,
            );
            let d = boundary.signed_distance(p);
            consider(p, d, &mut best);
            cells.push((p, d));
        }
    }

    while step > grid_step * (1.0 + 1e-12) {
        let floor = best.map_or(0.0, |b| b.radius);
        let half_diag = step * SQRT_2 / 2.0;
        let sub = step / 3.0;
        let mut next = Vec::new();
        for &(p, d) in &cells {
            if d + half_diag < floor || d + half_diag <= 0.0 {
                continue;
            }
            for dy in [-1.0, 0.0, 1.0] {
                for dx in [-1.0, 0.0, 1.0] {
                    let q = Point::new(p.x + dx * sub, p.y + dy * sub);
                    let dq = if dx == 0.0 && dy == 0.0 {
                        d
                    } else {
                        boundary.signed_distance(q)
                    };
                    consider(q, dq, &mut best);
                    next.push((q, dq));
                }
            }
        }
        cells = next;
        step = sub;
    }

    let centroid = boundary.centroid().ok_or(Error::EmptyShape)?;
    match best {
        Some(found) if found.radius >= grid_step => Ok(found),
        other => {
            let fallback = if boundary.contains(centroid) {
                centroid
            } else {
                other.map_or(centroid, |b| b.point)
            };
            Err(Error::DegenerateShape {
                fallback,
                radius: other.map_or(0.0, |b| b.radius),
                grid_step,
            })
        }
    }
}

/// Casts `opts.n` rays from the center and records the farthest boundary hit
/// along each. Rays that meet no boundary get radius 0.
pub fn extract_star_contour(shape: &Shape, opts: &ExtractOptions) -> Result<StarContour> {
    extract_from_boundary(&shape.boundary(), opts)
}

pub(crate) fn extract_from_boundary(
    boundary: &Boundary,
    opts: &ExtractOptions,
) -> Result<StarContour> {
    if opts.n < 3 {
        return Err(Error::InvalidN(opts.n));
    }
    if boundary.is_empty() {
        return Err(Error::EmptyShape);
    }
    let center = match opts.center {
        Some(c) => {
            if !c.is_finite() || !boundary.contains(c) {
                return Err(Error::CenterOutsideShape(c));
            }
            c
        }
        None => inner_center_of(boundary, opts.grid_step)?.point,
    };
    let radii = (0..opts.n)
        .map(|i| {
            boundary
                .farthest_hit(center, sample_angle(opts.angle0, i, opts.n))
                .unwrap_or(0.0)
        })
        .collect();
    StarContour::new(center, opts.angle0, radii)
}

/// Renders a star contour back to a polygon shape. Zero radii collapse onto
/// the center, so the result is returned as raw vertices rather than a
/// validated [`Shape`] when it has no area.
pub fn contour_to_polygon(contour: &StarContour) -> Vec<Point> {
    contour.vertices()
}

/// [`contour_to_polygon`] wrapped as a validated shape; fails only for
/// zero-area contours.
pub fn contour_to_shape(contour: &StarContour) -> Result<Shape> {
    Shape::polygon(contour.vertices())
}
