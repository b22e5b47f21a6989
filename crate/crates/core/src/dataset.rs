//! Annotation corpora: COCO-style JSON input, a seeded synthetic generator,
//! contour extraction per instance, grouping into contour matrices, and the
//! contour CSV interchange format.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::TAU;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::{extract_star_contour, sample_angle, ExtractOptions, StarContour};
use crate::eigenbasis::ContourMatrix;
use crate::error::{Error, Result};
use crate::geometry::{Point, Shape};
use crate::serial;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub id: u64,
    pub category: String,
    pub shape: Shape,
    pub image_width: u32,
    pub image_height: u32,
}

impl InstanceRecord {
    /// The record with its polygons clipped to the image rectangle.
    pub fn clipped_to_image(&self) -> Result<InstanceRecord> {
        if self.image_width == 0 || self.image_height == 0 {
            return Err(Error::InvalidShape(format!(
                "instance {} has no image size",
                self.id
            )));
        }
        Ok(InstanceRecord {
            shape: self
                .shape
                .clipped(self.image_width as f64, self.image_height as f64)?,
            ..self.clone()
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grouping {
    #[default]
    Universal,
    PerCategory,
}

impl std::str::FromStr for Grouping {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "universal" => Ok(Grouping::Universal),
            "per-category" | "per_category" | "categorical" => Ok(Grouping::PerCategory),
            other => Err(Error::Config(format!(
                "unknown grouping '{other}' (use universal or per-category)"
            ))),
        }
    }
}

/// Category filter: `include` (when nonempty) keeps only the listed
/// categories, `exclude` drops the listed ones.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CategoryFilter {
    #[serde(default)]
    pub include: Vec<String>,
    #[serde(default)]
    pub exclude: Vec<String>,
}

impl CategoryFilter {
    pub fn accepts(&self, category: &str) -> bool {
        (self.include.is_empty() || self.include.iter().any(|c| c == category))
            && !self.exclude.iter().any(|c| c == category)
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if !self.include.is_empty() {
            parts.push(format!("include={}", self.include.join(",")));
        }
        if !self.exclude.is_empty() {
            parts.push(format!("exclude={}", self.exclude.join(",")));
        }
        if parts.is_empty() {
            "no category filter".into()
        } else {
            parts.join(" ")
        }
    }

    /// Logs filter entries that name no category in the corpus.
    pub fn warn_unknown<'a>(&self, known: impl IntoIterator<Item = &'a str>) {
        let known: BTreeSet<&str> = known.into_iter().collect();
        for c in self.include.iter().chain(&self.exclude) {
            if !known.contains(c.as_str()) {
                log::warn!("category filter names unknown category '{c}'");
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub filter: CategoryFilter,
    pub extract: ExtractOptions,
    pub grouping: Grouping,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            filter: CategoryFilter::default(),
            extract: ExtractOptions::default(),
            grouping: Grouping::Universal,
        }
    }
}

// ---------------------------------------------------------------------------
// COCO-style documents

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CocoDocument {
    #[serde(default)]
    pub images: Vec<CocoImage>,
    pub annotations: Vec<CocoAnnotation>,
    pub categories: Vec<CocoCategory>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CocoImage {
    pub id: u64,
    pub width: u32,
    pub height: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file_name: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CocoAnnotation {
    pub id: u64,
    pub image_id: u64,
    pub category_id: u64,
    pub segmentation: serde_json::Value,
    #[serde(default)]
    pub iscrowd: u8,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CocoCategory {
    pub id: u64,
    pub name: String,
}

fn parse_error(path: &Path, e: &serde_json::Error) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Reads a COCO-style annotation file: one record per non-crowd polygon
/// annotation whose category passes the filter. Records are sorted by id.
pub fn load_annotations(path: &Path, filter: &CategoryFilter) -> Result<Vec<InstanceRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let doc: CocoDocument = serde_json::from_str(&text).map_err(|e| parse_error(path, &e))?;
    records_from_document(&doc, filter)
}

pub fn records_from_document(
    doc: &CocoDocument,
    filter: &CategoryFilter,
) -> Result<Vec<InstanceRecord>> {
    let categories: HashMap<u64, &str> = doc
        .categories
        .iter()
        .map(|c| (c.id, c.name.as_str()))
        .collect();
    let images: HashMap<u64, &CocoImage> = doc.images.iter().map(|i| (i.id, i)).collect();
    filter.warn_unknown(categories.values().copied());

    let mut records = Vec::new();
    for ann in &doc.annotations {
        let category = *categories
            .get(&ann.category_id)
            .ok_or(Error::UnknownCategoryId {
                annotation: ann.id,
                category_id: ann.category_id,
            })?;
        if ann.iscrowd != 0 || !filter.accepts(category) {
            continue;
        }
        let Some(rings) = polygon_rings(&ann.segmentation) else {
            log::warn!(
                "annotation {}: segmentation is not a polygon list, skipped",
                ann.id
            );
            continue;
        };
        let shape = match Shape::from_rings(rings) {
            Ok(s) => s,
            Err(e) => {
                log::warn!("annotation {}: {e}, skipped", ann.id);
                continue;
            }
        };
        let (w, h) = images
            .get(&ann.image_id)
            .map_or((0, 0), |i| (i.width, i.height));
        records.push(InstanceRecord {
            id: ann.id,
            category: category.to_string(),
            shape,
            image_width: w,
            image_height: h,
        });
    }
    records.sort_by_key(|r| r.id);
    Ok(records)
}

/// `[[x0, y0, x1, y1, ...], ...]` into rings; `None` for RLE or other forms.
fn polygon_rings(seg: &serde_json::Value) -> Option<Vec<Vec<Point>>> {
    let polys = seg.as_array()?;
    let mut rings = Vec::with_capacity(polys.len());
    for poly in polys {
        let coords: Vec<f64> = poly
            .as_array()?
            .iter()
            .map(|v| v.as_f64())
            .collect::<Option<_>>()?;
        if coords.len() % 2 != 0 {
            return None;
        }
        rings.push(
            coords
                .chunks_exact(2)
                .map(|xy| Point::new(xy[0], xy[1]))
                .collect(),
        );
    }
    Some(rings)
}

/// Writes records as a COCO-style document (one image per record).
pub fn to_coco_document(records: &[InstanceRecord]) -> CocoDocument {
    let names: BTreeSet<&str> = records.iter().map(|r| r.category.as_str()).collect();
    let ids: BTreeMap<&str, u64> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (*n, i as u64 + 1))
        .collect();
    let mut images = Vec::new();
    let mut annotations = Vec::new();
    for r in records {
        let rings: Vec<Vec<Point>> = match &r.shape {
            Shape::Polygons(rings) => rings.clone(),
            Shape::Mask(m) => m.outer_rings(),
        };
        let seg: Vec<Vec<f64>> = rings
            .iter()
            .map(|ring| ring.iter().flat_map(|p| [p.x, p.y]).collect())
            .collect();
        images.push(CocoImage {
            id: r.id,
            width: r.image_width,
            height: r.image_height,
            file_name: None,
        });
        annotations.push(CocoAnnotation {
            id: r.id,
            image_id: r.id,
            category_id: ids[r.category.as_str()],
            segmentation: serde_json::to_value(seg).expect("finite coordinates"),
            iscrowd: 0,
        });
    }
    CocoDocument {
        images,
        annotations,
        categories: ids
            .into_iter()
            .map(|(name, id)| CocoCategory {
                id,
                name: name.into(),
            })
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// Synthetic corpora

/// Random star polygons `r(θ) = b (1 + Σ_k a_k cos(kθ + φ_k)) (1 + ε(θ))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub count: usize,
    pub seed: u64,
    /// Inclusive range for the number of active harmonics per shape.
    pub harmonics: (usize, usize),
    /// Upper bound on `Σ_k a_k` (relative to the base radius).
    pub amplitude: f64,
    /// Amplitude bound of harmonic `k` decays as `k^-smoothness`.
    pub smoothness: f64,
    /// Per-vertex relative radial noise bound.
    pub noise: f64,
    /// Half-width of the phase window around each category's reference
    /// phases. `π` gives independent uniform phases.
    pub phase_jitter: f64,
    /// Inclusive range for the base radius in pixels.
    pub base_radius: (f64, f64),
    /// Polygon vertices per shape.
    pub vertices: usize,
    /// Category names assigned round-robin.
    pub categories: Vec<String>,
    /// Square canvas side; centers are placed so every shape fits.
    pub image_size: u32,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            count: 500,
            seed: 0,
            harmonics: (1, 6),
            amplitude: 0.5,
            smoothness: 1.0,
            noise: 0.0,
            phase_jitter: 0.5,
            base_radius: (40.0, 80.0),
            vertices: 360,
            categories: vec!["synthetic".into()],
            image_size: 512,
        }
    }
}

/// A generated shape with the parameters needed to check extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthShape {
    pub record: InstanceRecord,
    pub center: Point,
    /// Radius of each polygon vertex, vertex `i` at angle `2πi / vertices`.
    pub radii: Vec<f64>,
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.count == 0 {
            return bad("count must be at least 1".into());
        }
        if self.harmonics.0 > self.harmonics.1 {
            return bad(format!("harmonic range {:?} is empty", self.harmonics));
        }
        if !(self.base_radius.0 > 0.0
            && self.base_radius.0 <= self.base_radius.1
            && self.base_radius.1.is_finite())
        {
            return bad(format!(
                "base radius range {:?} must be positive and ordered",
                self.base_radius
            ));
        }
        if !(self.amplitude >= 0.0 && self.noise >= 0.0 && self.noise < 1.0) {
            return bad("amplitude must be >= 0 and noise in [0, 1)".into());
        }
        if self.harmonics.1 > 0 && self.amplitude >= 1.0 {
            return bad(format!(
                "amplitude {} admits r <= 0 (need < 1)",
                self.amplitude
            ));
        }
        if !(0.0..=std::f64::consts::PI).contains(&self.phase_jitter) {
            return bad(format!(
                "phase jitter {} must lie in [0, pi]",
                self.phase_jitter
            ));
        }
        if self.vertices < 3 {
            return bad("need at least 3 vertices".into());
        }
        if self.categories.is_empty() {
            return bad("need at least one category".into());
        }
        let margin = self.base_radius.1 * (1.0 + self.amplitude) * (1.0 + self.noise);
        if 2.0 * margin > self.image_size as f64 {
            return bad(format!(
                "image size {} cannot hold shapes of radius {margin}",
                self.image_size
            ));
        }
        Ok(())
    }
}

/// Seeded random star-convex polygons. Each shape draws its own base
/// radius, harmonic count, amplitudes and phases.
pub fn generate_synthetic(params: &SynthParams) -> Result<Vec<SynthShape>> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let weights: Vec<f64> = (1..=params.harmonics.1.max(1))
        .map(|k| (k as f64).powf(-params.smoothness))
        .collect();
    let weight_sum: f64 = weights.iter().sum();
    let size = params.image_size as f64;
    let reference_phases: Vec<Vec<f64>> = params
        .categories
        .iter()
        .map(|_| weights.iter().map(|_| rng.random_range(0.0..TAU)).collect())
        .collect();

    let mut shapes = Vec::with_capacity(params.count);
    for idx in 0..params.count {
        let base = rng.random_range(params.base_radius.0..=params.base_radius.1);
        let active = rng.random_range(params.harmonics.0..=params.harmonics.1);
        let phases = &reference_phases[idx % params.categories.len()];
        let terms: Vec<(usize, f64, f64)> = (1..=active)
            .map(|k| {
                let bound = params.amplitude * weights[k - 1] / weight_sum;
                let jitter = rng.random_range(-params.phase_jitter..=params.phase_jitter);
                (k, rng.random_range(0.0..=bound), phases[k - 1] + jitter)
            })
            .collect();
        let margin = base * (1.0 + params.amplitude) * (1.0 + params.noise);
        let center = Point::new(
            rng.random_range(margin..=size - margin),
            rng.random_range(margin..=size - margin),
        );
        let radii: Vec<f64> = (0..params.vertices)
            .map(|i| {
                let theta = sample_angle(0.0, i, params.vertices);
                let wave: f64 = terms
                    .iter()
                    .map(|&(k, a, phi)| a * (k as f64 * theta + phi).cos())
                    .sum();
                let eps = if params.noise > 0.0 {
                    rng.random_range(-params.noise..=params.noise)
                } else {
                    0.0
                };
                base * (1.0 + wave) * (1.0 + eps)
            })
            .collect();
        let ring: Vec<Point> = radii
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let theta = sample_angle(0.0, i, params.vertices);
                Point::new(center.x + r * theta.cos(), center.y + r * theta.sin())
            })
            .collect();
        let record = InstanceRecord {
            id: idx as u64 + 1,
            category: params.categories[idx % params.categories.len()].clone(),
            shape: Shape::polygon(ring)?,
            image_width: params.image_size,
            image_height: params.image_size,
        };
        shapes.push(SynthShape {
            record,
            center,
            radii,
        });
    }
    Ok(shapes)
}

// ---------------------------------------------------------------------------
// Extraction and grouping

/// A star contour tagged with its source instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourRecord {
    pub id: u64,
    pub category: String,
    pub contour: StarContour,
}

/// Extracts one contour per record. Failures are logged and reported back
/// as `(id, reason)` instead of aborting.
pub fn extract_contours(
    records: &[InstanceRecord],
    opts: &ExtractOptions,
) -> (Vec<ContourRecord>, Vec<(u64, String)>) {
    let results: Vec<_> = records
        .par_iter()
        .map(|r| (r, extract_star_contour(&r.shape, opts)))
        .collect();
    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for (r, res) in results {
        match res {
            Ok(contour) => ok.push(ContourRecord {
                id: r.id,
                category: r.category.clone(),
                contour,
            }),
            Err(e) => {
                log::warn!("instance {}: {e}, skipped", r.id);
                failed.push((r.id, e.to_string()));
            }
        }
    }
    ok.sort_by_key(|c| c.id);
    (ok, failed)
}

/// Splits contours into groups keyed by category (or one `"universal"`
/// group), preserving record order within each group.
pub fn group_contours(
    contours: &[ContourRecord],
    grouping: Grouping,
) -> BTreeMap<String, Vec<&ContourRecord>> {
    let mut groups: BTreeMap<String, Vec<&ContourRecord>> = BTreeMap::new();
    for c in contours {
        let key = match grouping {
            Grouping::Universal => "universal".to_string(),
            Grouping::PerCategory => c.category.clone(),
        };
        groups.entry(key).or_default().push(c);
    }
    groups
}

/// One contour matrix per group (columns in record order).
pub fn build_contour_matrices(
    contours: &[ContourRecord],
    grouping: Grouping,
) -> Result<BTreeMap<String, ContourMatrix>> {
    let mut out = BTreeMap::new();
    for (key, members) in group_contours(contours, grouping) {
        if members.is_empty() {
            return Err(Error::EmptyGroup(key));
        }
        let cols: Vec<Vec<f64>> = members.iter().map(|c| c.contour.radii().to_vec()).collect();
        let matrix = ContourMatrix::from_columns(&cols)?.with_group(key.clone());
        out.insert(key, matrix);
    }
    Ok(out)
}

/// Extraction followed by grouping; fails if nothing survives.
pub fn build_contour_matrix(
    records: &[InstanceRecord],
    spec: &CorpusSpec,
) -> Result<BTreeMap<String, ContourMatrix>> {
    let kept: Vec<InstanceRecord> = records
        .iter()
        .filter(|r| spec.filter.accepts(&r.category))
        .cloned()
        .collect();
    if kept.is_empty() {
        return Err(Error::NoInstances(spec.filter.describe()));
    }
    let (contours, _) = extract_contours(&kept, &spec.extract);
    if contours.is_empty() {
        return Err(Error::EmptyGroup("all instances failed extraction".into()));
    }
    build_contour_matrices(&contours, spec.grouping)
}

// ---------------------------------------------------------------------------
// Contour CSV: id,category,cx,cy,N,angle0,r_1..r_N

pub fn contour_csv_header(n: usize) -> Vec<String> {
    let mut h: Vec<String> = ["id", "category", "cx", "cy", "N", "angle0"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    h.extend((1..=n).map(|i| format!("r_{i}")));
    h
}

pub fn write_contours_csv(path: &Path, contours: &[ContourRecord]) -> Result<()> {
    let bytes = contours_csv_bytes(contours)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Contour CSV in memory. Reals use Rust's shortest round-trip formatting.
pub fn contours_csv_bytes(contours: &[ContourRecord]) -> Result<Vec<u8>> {
    let n = contours.first().map_or(0, |c| c.contour.n());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(contour_csv_header(n))?;
    for c in contours {
        if c.contour.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: c.contour.n(),
            });
        }
        let mut row = vec![
            c.id.to_string(),
            c.category.clone(),
            c.contour.center.x.to_string(),
            c.contour.center.y.to_string(),
            n.to_string(),
            c.contour.angle0.to_string(),
        ];
        row.extend(c.contour.radii().iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.into_inner()
        .map_err(|e| Error::Config(format!("CSV buffer: {e}")))
}

pub fn read_contours_csv(path: &Path) -> Result<Vec<ContourRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_contours_csv(file, path)
}

pub fn parse_contours_csv(reader: impl std::io::Read, path: &Path) -> Result<Vec<ContourRecord>> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers()?.clone();
    let fixed = ["id", "category", "cx", "cy", "N", "angle0"];
    if header.len() < fixed.len() || header.iter().zip(fixed).any(|(a, b)| a != b) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            column: 1,
            message: format!("expected header starting with {}", fixed.join(",")),
        });
    }
    let mut out = Vec::new();
    for (row_idx, row) in r.records().enumerate() {
        let row = row?;
        let line = row_idx + 2;
        let field_err = |col: usize, what: &str| Error::Parse {
            path: path.to_path_buf(),
            line,
            column: col + 1,
            message: format!("invalid {what}"),
        };
        let num = |col: usize| -> Result<f64> {
            row.get(col)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| field_err(col, "number"))
        };
        let id: u64 = row
            .get(0)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| field_err(0, "id"))?;
        let category = row.get(1).unwrap_or_default().to_string();
        let n: usize = row
            .get(4)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| field_err(4, "N"))?;
        if row.len() != 6 + n {
            return Err(field_err(
                row.len(),
                &format!("row length (expected {} fields)", 6 + n),
            ));
        }
        let radii = (6..6 + n).map(num).collect::<Result<Vec<_>>>()?;
        let contour = StarContour::new(Point::new(num(2)?, num(3)?), num(5)?, radii)?;
        out.push(ContourRecord {
            id,
            category,
            contour,
        });
    }
    Ok(out)
}

/// Coefficient vectors or decoded patterns as CSV rows
/// `label,v_1..v_k` with 17-significant-digit reals.
pub fn vectors_csv(label: &str, prefix: &str, rows: &[(String, Vec<f64>)]) -> String {
    let width = rows.first().map_or(0, |r| r.1.len());
    let mut out = String::from(label);
    for i in 1..=width {
        out.push_str(&format!(",{prefix}_{i}"));
    }
    out.push('\n');
    for (key, values) in rows {
        out.push_str(key);
        for v in values {
            out.push(',');
            out.push_str(&serial::fmt_f64(*v));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(json: &str) -> CocoDocument {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn triangle_document() {
        let d = doc(r#"{"images":[{"id":1,"width":10,"height":10}],
            "annotations":[{"id":7,"image_id":1,"category_id":3,"segmentation":[[0,0,4,0,0,3]],"iscrowd":0}],
            "categories":[{"id":3,"name":"car"}]}"#);
        let recs = records_from_document(&d, &CategoryFilter::default()).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].category, "car");
        assert_eq!(recs[0].shape.vertex_count(), 3);
        assert_eq!((recs[0].image_width, recs[0].image_height), (10, 10));
    }

    #[test]
    fn crowd_annotations_are_dropped() {
        let d = doc(r#"{"annotations":[{"id":1,"image_id":1,"category_id":1,
            "segmentation":{"counts":[1,2],"size":[2,2]},"iscrowd":1}],
            "categories":[{"id":1,"name":"x"}]}"#);
        assert!(records_from_document(&d, &CategoryFilter::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn unknown_category_is_an_error() {
        let d = doc(
            r#"{"annotations":[{"id":4,"image_id":1,"category_id":9,"segmentation":[[0,0,1,0,0,1]]}],
            "categories":[{"id":1,"name":"x"}]}"#,
        );
        assert!(matches!(
            records_from_document(&d, &CategoryFilter::default()),
            Err(Error::UnknownCategoryId {
                annotation: 4,
                category_id: 9
            })
        ));
    }

    #[test]
    fn filter_excludes_category() {
        let d = doc(r#"{"annotations":[
            {"id":1,"image_id":1,"category_id":1,"segmentation":[[0,0,1,0,0,1]]},
            {"id":2,"image_id":1,"category_id":2,"segmentation":[[0,0,1,0,0,1]]}],
            "categories":[{"id":1,"name":"car"},{"id":2,"name":"misc"}]}"#);
        let filter = CategoryFilter {
            include: vec![],
            exclude: vec!["misc".into()],
        };
        let recs = records_from_document(&d, &filter).unwrap();
        assert_eq!(recs.iter().map(|r| r.id).collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn multi_ring_segmentation_is_one_shape() {
        let d = doc(r#"{"annotations":[{"id":1,"image_id":1,"category_id":1,
            "segmentation":[[0,0,1,0,0,1],[5,5,6,5,5,6]]}],"categories":[{"id":1,"name":"x"}]}"#);
        let recs = records_from_document(&d, &CategoryFilter::default()).unwrap();
        assert!(matches!(&recs[0].shape, Shape::Polygons(r) if r.len() == 2));
    }

    #[test]
    fn zero_harmonics_give_circles() {
        let params = SynthParams {
            count: 1,
            harmonics: (0, 0),
            ..Default::default()
        };
        let s = &generate_synthetic(&params).unwrap()[0];
        let r0 = s.radii[0];
        assert!(s.radii.iter().all(|r| (r - r0).abs() < 1e-12));
    }

    #[test]
    fn synthetic_is_deterministic() {
        let p = SynthParams {
            count: 5,
            seed: 17,
            noise: 0.01,
            ..Default::default()
        };
        assert_eq!(
            generate_synthetic(&p).unwrap(),
            generate_synthetic(&p).unwrap()
        );
    }

    #[test]
    fn synthetic_rejects_nonpositive_radius_bounds() {
        for bad in [
            SynthParams {
                amplitude: 1.0,
                ..Default::default()
            },
            SynthParams {
                base_radius: (0.0, 5.0),
                ..Default::default()
            },
            SynthParams {
                count: 0,
                ..Default::default()
            },
            SynthParams {
                noise: 1.0,
                ..Default::default()
            },
        ] {
            assert!(matches!(
                generate_synthetic(&bad),
                Err(Error::InvalidParams(_))
            ));
        }
    }

    #[test]
    fn grouping_partitions() {
        let params = SynthParams {
            count: 4,
            categories: vec!["a".into(), "b".into()],
            ..Default::default()
        };
        let records: Vec<_> = generate_synthetic(&params)
            .unwrap()
            .into_iter()
            .map(|s| s.record)
            .collect();
        let spec = CorpusSpec {
            extract: ExtractOptions::with_n(36),
            grouping: Grouping::PerCategory,
            ..Default::default()
        };
        let per = build_contour_matrix(&records, &spec).unwrap();
        assert_eq!(per.len(), 2);
        assert!(per.values().all(|m| m.l() == 2));
        let uni = build_contour_matrix(
            &records,
            &CorpusSpec {
                grouping: Grouping::Universal,
                ..spec
            },
        )
        .unwrap();
        assert_eq!(uni["universal"].l(), 4);
    }

    #[test]
    fn empty_after_filter() {
        let records: Vec<_> = generate_synthetic(&SynthParams {
            count: 2,
            ..Default::default()
        })
        .unwrap()
        .into_iter()
        .map(|s| s.record)
        .collect();
        let spec = CorpusSpec {
            filter: CategoryFilter {
                include: vec!["nothing".into()],
                exclude: vec![],
            },
            ..Default::default()
        };
        assert!(matches!(
            build_contour_matrix(&records, &spec),
            Err(Error::NoInstances(_))
        ));
    }

    #[test]
    fn csv_round_trip_is_bitwise() {
        let c = StarContour::new(
            Point::new(1.0 / 3.0, 2.5),
            0.1,
            vec![0.1, 1.0 / 7.0, 3.0, 1e-17],
        )
        .unwrap();
        let rec = ContourRecord {
            id: 3,
            category: "a,b".into(),
            contour: c,
        };
        let bytes = contours_csv_bytes(std::slice::from_ref(&rec)).unwrap();
        let back = parse_contours_csv(&bytes[..], Path::new("mem")).unwrap();
        assert_eq!(back, vec![rec]);
    }

    #[test]
    fn csv_bad_header() {
        let err = parse_contours_csv(&b"a,b\n1,2\n"[..], Path::new("mem")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }
}
