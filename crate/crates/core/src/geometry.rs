//! Planar primitives shared by extraction and evaluation: points, polygon
//! rings, raster masks and the boundary queries run against them.
//!
//! Coordinates are pixel units. Orientation is measured in the raw
//! coordinate frame: a ring is counterclockwise when its shoelace area is
//! positive, and angles grow from +x towards +y.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn of_points<'a>(points: impl IntoIterator<Item = &'a Point>) -> Option<BBox> {
        let mut iter = points.into_iter();
        let first = *iter.next()?;
        let mut bbox = BBox {
            min: first,
            max: first,
        };
        for p in iter {
            bbox.min.x = bbox.min.x.min(p.x);
            bbox.min.y = bbox.min.y.min(p.y);
            bbox.max.x = bbox.max.x.max(p.x);
            bbox.max.y = bbox.max.y.max(p.y);
        }
        Some(bbox)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }
}

/// Shoelace signed area; positive for counterclockwise rings.
pub fn signed_area(ring: &[Point]) -> f64 {
    let n = ring.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    acc / 2.0
}

/// Area-weighted centroid of a ring.
pub fn ring_centroid(ring: &[Point]) -> Point {
    let n = ring.len();
    let area = signed_area(ring);
    if area.abs() < f64::EPSILON {
        let (sx, sy) = ring
            .iter()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
        return Point::new(sx / n as f64, sy / n as f64);
    }
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        let cross = a.x * b.y - b.x * a.y;
        cx += (a.x + b.x) * cross;
        cy += (a.y + b.y) * cross;
    }
    Point::new(cx / (6.0 * area), cy / (6.0 * area))
}

/// Binary raster. Cell `(col, row)` covers
/// `[origin.x + col*s, origin.x + (col+1)*s] x [origin.y + row*s, origin.y + (row+1)*s]`
/// where `s = pixel_size`. Cells are stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mask {
    pub width: usize,
    pub height: usize,
    pub data: Vec<bool>,
    pub origin: Point,
    pub pixel_size: f64,
}

impl Mask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Mask> {
        Mask::with_frame(width, height, data, Point::new(0.0, 0.0), 1.0)
    }

    pub fn with_frame(
        width: usize,
        height: usize,
        data: Vec<bool>,
        origin: Point,
        pixel_size: f64,
    ) -> Result<Mask> {
        if data.len() != width * height {
            return Err(Error::InvalidShape(format!(
                "mask has {} cells, expected {}x{}",
                data.len(),
                width,
                height
            )));
        }
        if !(pixel_size > 0.0 && pixel_size.is_finite()) || !origin.is_finite() {
            return Err(Error::InvalidShape(
                "mask frame must be finite with positive pixel size".into(),
            ));
        }
        if !data.iter().any(|&v| v) {
            return Err(Error::EmptyShape);
        }
        Ok(Mask {
            width,
            height,
            data,
            origin,
            pixel_size,
        })
    }

    pub fn get(&self, col: isize, row: isize) -> bool {
        if col < 0 || row < 0 || col as usize >= self.width || row as usize >= self.height {
            return false;
        }
        self.data[row as usize * self.width + col as usize]
    }

    /// Traces the pixel-edge boundary of every 4-connected foreground
    /// component. Outer boundaries come out counterclockwise; hole
    /// boundaries (clockwise) are dropped.
    pub fn outer_rings(&self) -> Vec<Vec<Point>> {
        trace_mask(self)
            .into_iter()
            .filter(|ring| signed_area(ring) > 0.0)
            .map(|ring| {
                ring.into_iter()
                    .map(|p| {
                        Point::new(
                            self.origin.x + p.x * self.pixel_size,
                            self.origin.y + p.y * self.pixel_size,
                        )
                    })
                    .collect()
            })
            .collect()
    }
}

// Directions on the pixel lattice, counterclockwise order.
const DIRS: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

fn trace_mask(mask: &Mask) -> Vec<Vec<Point>> {
    use std::collections::BTreeMap;

    // Directed edges with foreground on the left, keyed by start vertex.
    let mut outgoing: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    let mut edges: Vec<((i64, i64), usize)> = Vec::new();
    for row in 0..mask.height as isize {
        for col in 0..mask.width as isize {
            if !mask.get(col, row) {
                continue;
            }
            let (c, r) = (col as i64, row as i64);
            let mut push = |start: (i64, i64), dir: usize| {
                outgoing.entry(start).or_default().push(edges.len());
                edges.push((start, dir));
            };
            if !mask.get(col, row - 1) {
                push((c, r), 0);
            }
            if !mask.get(col + 1, row) {
                push((c + 1, r), 1);
            }
            if !mask.get(col, row + 1) {
                push((c + 1, r + 1), 2);
            }
            if !mask.get(col - 1, row) {
                push((c, r + 1), 3);
            }
        }
    }

    let mut used = vec![false; edges.len()];
    let mut rings = Vec::new();
    for first in 0..edges.len() {
        if used[first] {
            continue;
        }
        let mut ring: Vec<(i64, i64)> = Vec::new();
        let mut current = first;
        loop {
            used[current] = true;
            let (start, dir) = edges[current];
            ring.push(start);
            let end = (start.0 + DIRS[dir].0, start.1 + DIRS[dir].1);
            let candidates = &outgoing[&end];
            // Prefer the sharpest left turn so diagonal neighbours stay apart.
            let next = [1usize, 0, 3].iter().find_map(|turn| {
                let want = (dir + turn) % 4;
                candidates
                    .iter()
                    .copied()
                    .find(|&e| !used[e] && edges[e].1 == want)
            });
            match next {
                Some(e) => current = e,
                None => break,
            }
        }
        rings.push(simplify_collinear(&ring));
    }
    rings
}

fn simplify_collinear(ring: &[(i64, i64)]) -> Vec<Point> {
    let n = ring.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let prev = ring[(i + n - 1) % n];
        let cur = ring[i];
        let next = ring[(i + 1) % n];
        let cross = (cur.0 - prev.0) * (next.1 - cur.1) - (cur.1 - prev.1) * (next.0 - cur.0);
        if cross != 0 {
            out.push(Point::new(cur.0 as f64, cur.1 as f64));
        }
    }
    out
}

/// An object annotation: polygon rings or a raster mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Polygons(Vec<Vec<Point>>),
    Mask(Mask),
}

impl Shape {
    /// Validates the rings and reorients each one counterclockwise.
    pub fn from_rings(rings: Vec<Vec<Point>>) -> Result<Shape> {
        if rings.is_empty() {
            return Err(Error::EmptyShape);
        }
        let mut out = Vec::with_capacity(rings.len());
        for (i, mut ring) in rings.into_iter().enumerate() {
            if ring.len() >= 2 && ring.first() == ring.last() {
                ring.pop();
            }
            if ring.len() < 3 {
                return Err(Error::InvalidShape(format!(
                    "ring {i} has {} vertices",
                    ring.len()
                )));
            }
            if ring.iter().any(|p| !p.is_finite()) {
                return Err(Error::InvalidShape(format!(
                    "ring {i} has non-finite coordinates"
                )));
            }
            let area = signed_area(&ring);
            if area == 0.0 {
                return Err(Error::InvalidShape(format!("ring {i} has zero area")));
            }
            if area < 0.0 {
                ring.reverse();
            }
            out.push(ring);
        }
        Ok(Shape::Polygons(out))
    }

    pub fn polygon(ring: Vec<Point>) -> Result<Shape> {
        Shape::from_rings(vec![ring])
    }

    pub fn from_mask(mask: Mask) -> Shape {
        Shape::Mask(mask)
    }

    /// Outer boundary rings in pixel coordinates.
    pub fn boundary(&self) -> Boundary {
        match self {
            Shape::Polygons(rings) => Boundary::new(rings.clone()),
            Shape::Mask(mask) => Boundary::new(mask.outer_rings()),
        }
    }

    pub fn bbox(&self) -> Option<BBox> {
        match self {
            Shape::Polygons(rings) => BBox::of_points(rings.iter().flatten()),
            Shape::Mask(mask) => {
                let rings = mask.outer_rings();
                BBox::of_points(rings.iter().flatten())
            }
        }
    }

    /// Polygon rings clipped to `[0, width] × [0, height]`; rings that
    /// vanish are dropped. Masks are returned unchanged.
    pub fn clipped(&self, width: f64, height: f64) -> Result<Shape> {
        match self {
            Shape::Polygons(rings) => {
                let kept: Vec<Vec<Point>> = rings
                    .iter()
                    .map(|r| clip_ring(r, 0.0, 0.0, width, height))
                    .filter(|r| r.len() >= 3 && signed_area(r) != 0.0)
                    .collect();
                Shape::from_rings(kept)
            }
            Shape::Mask(_) => Ok(self.clone()),
        }
    }

    /// Total vertex count over all rings (mask shapes count traced vertices).
    pub fn vertex_count(&self) -> usize {
        match self {
            Shape::Polygons(rings) => rings.iter().map(Vec::len).sum(),
            Shape::Mask(mask) => mask.outer_rings().iter().map(Vec::len).sum(),
        }
    }
}

/// Closed boundary rings prepared for ray and distance queries.
#[derive(Debug, Clone)]
pub struct Boundary {
    rings: Vec<Vec<Point>>,
}

impl Boundary {
    pub fn new(rings: Vec<Vec<Point>>) -> Boundary {
        Boundary { rings }
    }

    pub fn rings(&self) -> &[Vec<Point>] {
        &self.rings
    }

    pub fn is_empty(&self) -> bool {
        self.rings.iter().all(|r| r.len() < 3)
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.rings.iter().flat_map(|ring| {
            let n = ring.len();
            (0..n).map(move |i| (ring[i], ring[(i + 1) % n]))
        })
    }

    pub fn bbox(&self) -> Option<BBox> {
        BBox::of_points(self.rings.iter().flatten())
    }

    /// Area-weighted centroid over all rings.
    pub fn centroid(&self) -> Option<Point> {
        let mut total = 0.0;
        let (mut cx, mut cy) = (0.0, 0.0);
        for ring in &self.rings {
            let a = signed_area(ring).abs();
            let c = ring_centroid(ring);
            total += a;
            cx += a * c.x;
            cy += a * c.y;
        }
        (total > 0.0).then(|| Point::new(cx / total, cy / total))
    }

    /// Inside test: a point is inside the shape when it is inside any ring
    /// (crossing-number test per ring).
    pub fn contains(&self, p: Point) -> bool {
        self.rings.iter().any(|ring| ring_contains(ring, p))
    }

    /// Euclidean distance from `p` to the nearest boundary segment.
    pub fn distance(&self, p: Point) -> f64 {
        self.segments()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Signed distance: positive inside, negative outside.
    pub fn signed_distance(&self, p: Point) -> f64 {
        let d = self.distance(p);
        if self.contains(p) {
            d
        } else {
            -d
        }
    }

    /// Largest parameter `t >= 0` such that `origin + t*(cos angle, sin angle)`
    /// lies on the boundary, or `None` when the ray misses every segment.
    pub fn farthest_hit(&self, origin: Point, angle: f64) -> Option<f64> {
        let dir = Point::new(angle.cos(), angle.sin());
        self.segments()
            .filter_map(|(a, b)| ray_segment_hit(origin, dir, a, b))
            .fold(None, |best: Option<f64>, t| {
                Some(best.map_or(t, |b| b.max(t)))
            })
    }
}

pub fn ring_contains(ring: &[Point], p: Point) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if p.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.distance(&a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.distance(&Point::new(a.x + t * dx, a.y + t * dy))
}

// Relative slack on the segment parameter so rays through a vertex hit both
// incident edges.
const SEGMENT_SLACK: f64 = 1e-9;

/// Distance along the unit ray `origin + t*dir` to segment `ab`, if hit.
/// Collinear overlaps report the farther overlapping endpoint.
pub fn ray_segment_hit(origin: Point, dir: Point, a: Point, b: Point) -> Option<f64> {
    let e = Point::new(b.x - a.x, b.y - a.y);
    let w = Point::new(a.x - origin.x, a.y - origin.y);
    let denom = dir.x * e.y - dir.y * e.x;
    let scale = e.x.hypot(e.y).max(w.x.hypot(w.y)).max(1.0);
    if denom.abs() <= 1e-12 * e.x.hypot(e.y) {
        // Parallel: only collinear segments count.
        let offset = w.x * dir.y - w.y * dir.x;
        if offset.abs() > 1e-9 * scale {
            return None;
        }
        let ta = w.x * dir.x + w.y * dir.y;
        let tb = (b.x - origin.x) * dir.x + (b.y - origin.y) * dir.y;
        let t = ta.max(tb);
        return (t >= 0.0).then_some(t);
    }
    let t = (w.x * e.y - w.y * e.x) / denom;
    let u = (w.x * dir.y - w.y * dir.x) / denom;
    if t < -SEGMENT_SLACK * scale || !(-SEGMENT_SLACK..=1.0 + SEGMENT_SLACK).contains(&u) {
        return None;
    }
    Some(t.max(0.0))
}

/// Sutherland-Hodgman clip of a ring against the axis-aligned box
/// `[x0, x1] × [y0, y1]`. The result may be empty.
pub fn clip_ring(ring: &[Point], x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Point> {
    // Each edge as (inside test, intersection along the edge).
    let edges: [(fn(Point, f64) -> f64, f64); 4] = [
        (|p, c| p.x - c, x0),
        (|p, c| c - p.x, x1),
        (|p, c| p.y - c, y0),
        (|p, c| c - p.y, y1),
    ];
    let mut out = ring.to_vec();
    for (side, c) in edges {
        let input = std::mem::take(&mut out);
        for (i, &cur) in input.iter().enumerate() {
            let prev = input[(i + input.len() - 1) % input.len()];
            let (dc, dp) = (side(cur, c), side(prev, c));
            if (dc >= 0.0) != (dp >= 0.0) {
                let t = dp / (dp - dc);
                out.push(Point::new(
                    prev.x + t * (cur.x - prev.x),
                    prev.y + t * (cur.y - prev.y),
                ));
            }
            if dc >= 0.0 {
                out.push(cur);
            }
        }
    }
    out
}
