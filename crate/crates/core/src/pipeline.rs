//! File-level pipeline behind the command-line tool: synthesize, extract,
//! fit, codec, cluster and eval. Every function here reads its inputs from
//! disk, writes its artifacts, and embeds the resolved configuration plus
//! input checksums in each artifact.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clustering::{centroid_contours, kmeans, DEFAULT_K, DEFAULT_MAX_ITER};
use crate::contour::{ExtractOptions, StarContour, DEFAULT_GRID_STEP, DEFAULT_N};
use crate::dataset::{
    build_contour_matrices, contours_csv_bytes, extract_contours, generate_synthetic,
    load_annotations, read_contours_csv, to_coco_document, vectors_csv, CategoryFilter,
    ContourRecord, Grouping, InstanceRecord, SynthParams,
};
use crate::descriptors::{DescriptorKind, DescriptorModel};
use crate::eigenbasis::{EigenBasis, Spectrum};
use crate::error::{Error, Result};
use crate::evaluation::{
    boundary_fscore_points, clustering_fscore, f_curve, resample_rings, star_references, EvalSuite,
    GroundTruth, ToleranceRule,
};
use crate::geometry::{Point, Shape};
use crate::provenance::{build_timestamp, InputChecksum, Provenance};
use crate::serial;

pub const DEFAULT_M: usize = 16;
pub const DEFAULT_SWEEP: &str = "4:36:4";

/// Parameters for every command. Unset fields fall back to defaults;
/// values from a config file are overridden by command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub contours: Option<PathBuf>,
    pub basis: Option<PathBuf>,
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,

    pub n: Option<usize>,
    pub angle0: Option<f64>,
    pub grid_step: Option<f64>,
    pub include: Option<Vec<String>>,
    pub exclude: Option<Vec<String>>,
    pub group: Option<Grouping>,
    /// Clip annotation polygons to their image rectangle (off by default).
    pub clip: Option<bool>,

    pub m: Option<usize>,
    pub m_sweep: Option<String>,
    pub descriptor: Option<String>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub max_iter: Option<usize>,
    pub tol: Option<String>,
    pub gt: Option<GroundTruth>,
    pub split: Option<Split>,
    pub holdout_fraction: Option<f64>,
    pub cluster_k: Option<usize>,

    pub count: Option<usize>,
    pub harmonics: Option<String>,
    pub amplitude: Option<f64>,
    pub smoothness: Option<f64>,
    pub noise: Option<f64>,
    pub phase_jitter: Option<f64>,
    pub radius: Option<String>,
    pub vertices: Option<usize>,
    pub categories: Option<Vec<String>>,
    pub image_size: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Split {
    /// Fit and evaluate on the same contours.
    #[default]
    Train,
    /// Fit on a seeded random subset, evaluate on the rest.
    Heldout,
}

impl std::str::FromStr for Split {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "heldout" | "held-out" => Ok(Split::Heldout),
            other => Err(Error::Config(format!(
                "unknown split '{other}' (use train or heldout)"
            ))),
        }
    }
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f; } )*
    };
}

impl RunConfig {
    pub fn from_toml_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(mut self, top: RunConfig) -> RunConfig {
        overlay!(
            self,
            top,
            input,
            contours,
            basis,
            out,
            n,
            angle0,
            grid_step,
            include,
            exclude,
            group,
            m,
            m_sweep,
            descriptor,
            k,
            seed,
            max_iter,
            tol,
            gt,
            split,
            holdout_fraction,
            cluster_k,
            count,
            harmonics,
            amplitude,
            smoothness,
            noise,
            radius,
            vertices,
            categories,
            image_size
        );
        self
    }

    pub fn n(&self) -> usize {
        self.n.unwrap_or(DEFAULT_N)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn m(&self) -> usize {
        self.m.unwrap_or(DEFAULT_M)
    }

    pub fn extract_options(&self) -> Result<ExtractOptions> {
        let opts = ExtractOptions {
            n: self.n(),
            angle0: self.angle0.unwrap_or(0.0),
            grid_step: self.grid_step.unwrap_or(DEFAULT_GRID_STEP),
            center: None,
        };
        if opts.n < 3 {
            return Err(Error::InvalidN(opts.n));
        }
        Ok(opts)
    }

    pub fn filter(&self) -> CategoryFilter {
        CategoryFilter {
            include: self.include.clone().unwrap_or_default(),
            exclude: self.exclude.clone().unwrap_or_default(),
        }
    }

    pub fn tolerance(&self) -> Result<ToleranceRule> {
        self.tol
            .as_deref()
            .map_or(Ok(ToleranceRule::default()), ToleranceRule::parse)
    }

    pub fn sweep(&self) -> Result<Vec<usize>> {
        parse_sweep(self.m_sweep.as_deref().unwrap_or(DEFAULT_SWEEP))
    }

    pub fn descriptor_kinds(&self) -> Result<Vec<DescriptorKind>> {
        match self.descriptor.as_deref().unwrap_or("eigencontour") {
            "all" => Ok(DescriptorKind::ALL.to_vec()),
            s => Ok(vec![s.parse()?]),
        }
    }

    pub fn synth_params(&self) -> Result<SynthParams> {
        let d = SynthParams::default();
        let harmonics = match &self.harmonics {
            Some(s) => parse_range(s, "harmonics")?,
            None => d.harmonics,
        };
        let radius = match &self.radius {
            Some(s) => parse_range(s, "radius")?,
            None => d.base_radius,
        };
        Ok(SynthParams {
            count: self.count.unwrap_or(d.count),
            seed: self.seed(),
            harmonics,
            amplitude: self.amplitude.unwrap_or(d.amplitude),
            smoothness: self.smoothness.unwrap_or(d.smoothness),
            noise: self.noise.unwrap_or(d.noise),
            phase_jitter: self.phase_jitter.unwrap_or(d.phase_jitter),
            base_radius: radius,
            vertices: self.vertices.unwrap_or(d.vertices),
            categories: self.categories.clone().unwrap_or(d.categories),
            image_size: self.image_size.unwrap_or(d.image_size),
        })
    }

    fn require_out(&self) -> Result<&Path> {
        self.out
            .as_deref()
            .ok_or_else(|| Error::Config("missing --out".into()))
    }

    /// Config with defaults filled in, as echoed into artifacts.
    fn echo(&self, command: &str) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let serde_json::Value::Object(map) = &mut v {
            map.retain(|_, val| !val.is_null());
            map.insert("command".into(), command.into());
        }
        v
    }
}

/// `start:stop:step` (inclusive stop) or a comma-separated list.
pub fn parse_sweep(spec: &str) -> Result<Vec<usize>> {
    let bad = || {
        Error::Config(format!(
            "malformed M sweep '{spec}' (expected start:stop:step, e.g. 4:36:4)"
        ))
    };
    let values: Vec<usize> = if spec.contains(':') {
        let parts: Vec<usize> = spec
            .split(':')
            .map(|p| p.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        if step == 0 || start == 0 || stop < start {
            return Err(bad());
        }
        (start..=stop).step_by(step).collect()
    } else {
        spec.split(',')
            .map(|p| p.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if values.is_empty() || values.contains(&0) || values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad());
    }
    Ok(values)
}

fn parse_range<T: std::str::FromStr + PartialOrd + Copy>(s: &str, what: &str) -> Result<(T, T)> {
    let bad = || Error::Config(format!("malformed {what} range '{s}' (expected lo:hi)"));
    let (lo, hi) = s.split_once(':').unwrap_or((s, s));
    let lo: T = lo.trim().parse().map_err(|_| bad())?;
    let hi: T = hi.trim().parse().map_err(|_| bad())?;
    if hi < lo {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// `dir/stem{suffix}.ext`, keeping the original extension (or `ext`).
pub fn sibling(path: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn provenance(
    cfg: &RunConfig,
    command: &str,
    inputs: &[&Path],
    dataset: String,
) -> Result<Provenance> {
    Ok(Provenance {
        dataset,
        group_key: None,
        num_contours: 0,
        timestamp: build_timestamp(),
        inputs: inputs
            .iter()
            .map(|p| InputChecksum::of_file(p))
            .collect::<Result<_>>()?,
        config: Some(cfg.echo(command)),
    })
}

/// What a command wrote.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub skipped: Vec<(u64, String)>,
}

// ---------------------------------------------------------------------------

/// `synth`: writes a synthetic COCO-style corpus.
pub fn cmd_synth(cfg: &RunConfig) -> Result<Outcome> {
    let out = cfg.require_out()?;
    let shapes = generate_synthetic(&cfg.synth_params()?)?;
    let records: Vec<InstanceRecord> = shapes.into_iter().map(|s| s.record).collect();
    write(out, serial::to_json(&to_coco_document(&records))?)?;
    Ok(Outcome {
        written: vec![out.to_path_buf()],
        ..Default::default()
    })
}

fn load_filtered(cfg: &RunConfig, input: &Path) -> Result<Vec<InstanceRecord>> {
    let filter = cfg.filter();
    let records = clip_records(cfg, load_annotations(input, &filter)?);
    if records.is_empty() {
        return Err(Error::NoInstances(filter.describe()));
    }
    Ok(records)
}

fn clip_records(cfg: &RunConfig, records: Vec<InstanceRecord>) -> Vec<InstanceRecord> {
    if !cfg.clip.unwrap_or(false) {
        return records;
    }
    records
        .into_iter()
        .filter_map(|r| match r.clipped_to_image() {
            Ok(c) => Some(c),
            Err(e) => {
                log::warn!("instance {}: {e} after clipping, skipped", r.id);
                None
            }
        })
        .collect()
}

/// Contours from `--contours` (CSV) or extracted from `--input` (annotations).
fn load_contours(cfg: &RunConfig) -> Result<(Vec<ContourRecord>, PathBuf, Vec<(u64, String)>)> {
    if let Some(path) = &cfg.contours {
        let filter = cfg.filter();
        let contours: Vec<ContourRecord> = read_contours_csv(path)?
            .into_iter()
            .filter(|c| filter.accepts(&c.category))
            .collect();
        if contours.is_empty() {
            return Err(Error::NoInstances(filter.describe()));
        }
        return Ok((contours, path.clone(), vec![]));
    }
    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| Error::Config("need --contours or --input".into()))?;
    let opts = cfg.extract_options()?;
    let records = load_filtered(cfg, input)?;
    let (contours, failed) = extract_contours(&records, &opts);
    if contours.is_empty() {
        return Err(Error::NoInstances(
            "every instance failed extraction".into(),
        ));
    }
    Ok((contours, input.clone(), failed))
}

/// `extract`: annotations to contour CSV.
pub fn cmd_extract(cfg: &RunConfig) -> Result<Outcome> {
    let out = cfg.require_out()?;
    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| Error::Config("missing --input".into()))?;
    let opts = cfg.extract_options()?;
    let records = load_filtered(cfg, input)?;
    let (contours, skipped) = extract_contours(&records, &opts);
    if contours.is_empty() {
        return Err(Error::NoInstances(
            "every instance failed extraction".into(),
        ));
    }
    write(out, contours_csv_bytes(&contours)?)?;
    Ok(Outcome {
        written: vec![out.to_path_buf()],
        skipped,
    })
}

/// `fit`: one basis file per group. Per-category outputs are named
/// `<stem>_<category>.json`.
pub fn cmd_fit(cfg: &RunConfig) -> Result<Outcome> {
    let out = cfg.require_out()?;
    let (contours, source, skipped) = load_contours(cfg)?;
    let grouping = cfg.group.unwrap_or_default();
    let matrices = build_contour_matrices(&contours, grouping)?;
    let angle0 = contours[0].contour.angle0;
    let base = provenance(cfg, "fit", &[&source], dataset_name(&source))?;

    let mut written = Vec::new();
    for (key, matrix) in matrices {
        let mut basis = Spectrum::of(&matrix).basis(cfg.m())?;
        basis.angle0 = angle0;
        basis.provenance = Provenance {
            group_key: Some(key.clone()),
            num_contours: matrix.l(),
            ..base.clone()
        };
        let path = match grouping {
            Grouping::Universal => out.to_path_buf(),
            Grouping::PerCategory => sibling(out, &format!("_{}", sanitize(&key)), "json"),
        };
        write(&path, basis.to_json()?)?;
        written.push(path);
    }
    Ok(Outcome { written, skipped })
}

fn descriptor_from(
    cfg: &RunConfig,
    kind: DescriptorKind,
    n: usize,
) -> Result<(DescriptorModel, Vec<PathBuf>)> {
    match kind {
        DescriptorKind::Eigencontour => {
            let path = cfg
                .basis
                .as_ref()
                .ok_or_else(|| Error::Config("eigencontour descriptor needs --basis".into()))?;
            let mut basis = EigenBasis::load(path)?;
            if let Some(m) = cfg.m {
                basis = basis.truncated(m)?;
            }
            if basis.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: basis.n(),
                    found: n,
                });
            }
            Ok((DescriptorModel::Eigencontour(basis), vec![path.clone()]))
        }
        DescriptorKind::CentroidalSubsample => {
            Ok((DescriptorModel::centroidal(n, cfg.m())?, vec![]))
        }
        DescriptorKind::Chebyshev => Ok((DescriptorModel::chebyshev(n, cfg.m())?, vec![])),
    }
}

/// `codec`: encodes and decodes every contour with a basis. Writes the
/// reconstructed contour CSV to `--out`, coefficients to
/// `<stem>_coeffs.csv`, and a per-instance error table to `<stem>_errors.csv`.
pub fn cmd_codec(cfg: &RunConfig) -> Result<Outcome> {
    let out = cfg.require_out()?;
    let (contours, _, skipped) = load_contours(cfg)?;
    let n = contours[0].contour.n();
    let basis = match descriptor_from(cfg, DescriptorKind::Eigencontour, n)?.0 {
        DescriptorModel::Eigencontour(b) => b,
        _ => unreachable!(),
    };
    let rule = cfg.tolerance()?;

    let mut recon = Vec::with_capacity(contours.len());
    let mut coeffs = Vec::with_capacity(contours.len());
    let mut errors =
        String::from("id,category,l2_error,max_abs_error,clamped,precision,recall,f\n");
    for c in &contours {
        let code = basis.encode(c.contour.radii())?;
        let raw = basis.decode_unclamped(&code)?;
        let clamped = raw.iter().filter(|v| **v < 0.0).count();
        let decoded = basis.decode(&code)?;
        let diff = c
            .contour
            .radii()
            .iter()
            .zip(&decoded)
            .map(|(a, b)| (a - b).abs());
        let (l2, max_abs) = diff.fold((0.0, 0.0f64), |(s, m), d| (s + d * d, m.max(d)));
        let rebuilt = c.contour.with_radii(decoded)?;
        let gt = c.contour.vertices();
        let score = boundary_fscore_points(&rebuilt.vertices(), &gt, rule.resolve(&gt))?;
        errors.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            c.id,
            csv_field(&c.category),
            serial::fmt_f64(l2.sqrt()),
            serial::fmt_f64(max_abs),
            clamped,
            serial::fmt_f64(score.precision),
            serial::fmt_f64(score.recall),
            serial::fmt_f64(score.f),
        ));
        coeffs.push((c.id.to_string(), code.values));
        recon.push(ContourRecord {
            id: c.id,
            category: c.category.clone(),
            contour: rebuilt,
        });
    }
    let coeff_path = sibling(out, "_coeffs", "csv");
    let error_path = sibling(out, "_errors", "csv");
    write(out, contours_csv_bytes(&recon)?)?;
    write(&coeff_path, vectors_csv("id", "c", &coeffs))?;
    write(&error_path, errors)?;
    Ok(Outcome {
        written: vec![out.to_path_buf(), coeff_path, error_path],
        skipped,
    })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `cluster`: k-means on descriptor coefficients. Writes the model JSON to
/// `--out` and decoded centroid contours to `<stem>_centroids.csv`.
pub fn cmd_cluster(cfg: &RunConfig) -> Result<Outcome> {
    let out = cfg.require_out()?;
    let (contours, source, skipped) = load_contours(cfg)?;
    let n = contours[0].contour.n();
    let kind = match cfg.descriptor_kinds()?.as_slice() {
        [k] => *k,
        _ => return Err(Error::Config("cluster takes a single descriptor".into())),
    };
    let (descriptor, extra_inputs) = descriptor_from(cfg, kind, n)?;
    let codes: Vec<Vec<f64>> = contours
        .iter()
        .map(|c| descriptor.encode(c.contour.radii()))
        .collect::<Result<_>>()?;
    let k = cfg.k.unwrap_or(DEFAULT_K);
    let mut model = kmeans(
        &codes,
        k,
        cfg.seed(),
        cfg.max_iter.unwrap_or(DEFAULT_MAX_ITER),
    )?;
    model.descriptor_ref = descriptor.reference();
    let mut inputs: Vec<&Path> = vec![&source];
    inputs.extend(extra_inputs.iter().map(PathBuf::as_path));
    model.provenance = Provenance {
        num_contours: contours.len(),
        ..provenance(cfg, "cluster", &inputs, dataset_name(&source))?
    };

    let patterns = centroid_contours(&model, &descriptor)?;
    let rows: Vec<(String, Vec<f64>)> = patterns
        .into_iter()
        .enumerate()
        .map(|(i, r)| (i.to_string(), r))
        .collect();
    let centroid_path = sibling(out, "_centroids", "csv");
    write(out, model.to_json()?)?;
    write(&centroid_path, vectors_csv("cluster", "r", &rows))?;
    Ok(Outcome {
        written: vec![out.to_path_buf(), centroid_path],
        skipped,
    })
}

/// Deterministic train/eval partition of contour indices.
pub fn split_indices(
    len: usize,
    split: Split,
    fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    match split {
        Split::Train => Ok(((0..len).collect(), (0..len).collect())),
        Split::Heldout => {
            if !(fraction > 0.0 && fraction < 1.0) {
                return Err(Error::Config(format!(
                    "holdout fraction {fraction} must be in (0, 1)"
                )));
            }
            let mut idx: Vec<usize> = (0..len).collect();
            idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let n_eval = ((len as f64) * fraction).round() as usize;
            if n_eval == 0 || n_eval == len {
                return Err(Error::TooFewPoints {
                    needed: 2,
                    have: len,
                });
            }
            let mut eval = idx.split_off(len - n_eval);
            idx.sort_unstable();
            eval.sort_unstable();
            Ok((idx, eval))
        }
    }
}

/// `eval`: F-vs-M curves (and optionally the clustering protocol). Writes
/// the JSON suite to `--out` and one `M,mean_f` CSV per descriptor to
/// `<stem>_<descriptor>.csv`.
pub fn cmd_eval(cfg: &RunConfig) -> Result<Outcome> {
    let out = cfg.require_out()?;
    let sweep = cfg.sweep()?;
    let kinds = cfg.descriptor_kinds()?;
    let rule = cfg.tolerance()?;
    let gt_mode = cfg.gt.unwrap_or_default();
    let (suite, skipped) = evaluate(cfg, &sweep, &kinds, rule, gt_mode)?;

    let mut written = vec![out.to_path_buf()];
    suite.save(out)?;
    for report in &suite.reports {
        let path = sibling(out, &format!("_{}", report.descriptor), "csv");
        write(&path, report.to_csv())?;
        written.push(path);
    }
    Ok(Outcome { written, skipped })
}

/// The in-memory part of [`cmd_eval`].
pub fn evaluate(
    cfg: &RunConfig,
    sweep: &[usize],
    kinds: &[DescriptorKind],
    rule: ToleranceRule,
    gt_mode: GroundTruth,
) -> Result<(EvalSuite, Vec<(u64, String)>)> {
    let (contours, source, skipped) = load_contours(cfg)?;
    let (train_idx, eval_idx) = split_indices(
        contours.len(),
        cfg.split.unwrap_or_default(),
        cfg.holdout_fraction.unwrap_or(0.2),
        cfg.seed(),
    )?;
    let pick = |idx: &[usize]| -> Vec<StarContour> {
        idx.iter().map(|&i| contours[i].contour.clone()).collect()
    };
    let train = pick(&train_idx);
    let eval = pick(&eval_idx);
    let references = match gt_mode {
        GroundTruth::StarContour => star_references(&eval),
        GroundTruth::RawPolygon => raw_references(
            cfg,
            &eval_idx.iter().map(|&i| contours[i].id).collect::<Vec<_>>(),
        )?,
    };

    let mut reports = Vec::new();
    for &kind in kinds {
        reports.push(f_curve(
            &train,
            &eval,
            &references,
            kind,
            sweep,
            rule,
            gt_mode,
        )?);
    }

    let mut clustering = Vec::new();
    if let Some(k) = cfg.cluster_k {
        let n = train[0].n();
        let m = cfg.m();
        let spectrum = kinds
            .contains(&DescriptorKind::Eigencontour)
            .then(|| -> Result<Spectrum> {
                let cols: Vec<Vec<f64>> = train.iter().map(|c| c.radii().to_vec()).collect();
                Ok(Spectrum::of(
                    &crate::eigenbasis::ContourMatrix::from_columns(&cols)?,
                ))
            })
            .transpose()?;
        for &kind in kinds {
            let descriptor = match kind {
                DescriptorKind::Eigencontour => {
                    DescriptorModel::Eigencontour(spectrum.as_ref().unwrap().basis(m)?)
                }
                DescriptorKind::CentroidalSubsample => DescriptorModel::centroidal(n, m)?,
                DescriptorKind::Chebyshev => DescriptorModel::chebyshev(n, m)?,
            };
            let codes: Vec<Vec<f64>> = train
                .iter()
                .map(|c| descriptor.encode(c.radii()))
                .collect::<Result<_>>()?;
            let mut model = kmeans(
                &codes,
                k,
                cfg.seed(),
                cfg.max_iter.unwrap_or(DEFAULT_MAX_ITER),
            )?;
            model.descriptor_ref = descriptor.reference();
            clustering.push((
                kind,
                clustering_fscore(&eval, &references, &model, &descriptor, rule)?,
            ));
        }
    }

    let mut inputs = vec![source.as_path()];
    if gt_mode == GroundTruth::RawPolygon {
        if let Some(input) = cfg.input.as_deref().filter(|p| *p != source) {
            inputs.push(input);
        }
    }
    let prov = Provenance {
        num_contours: contours.len(),
        ..provenance(cfg, "eval", &inputs, dataset_name(&source))?
    };
    Ok((
        EvalSuite {
            reports,
            clustering,
            provenance: prov,
        },
        skipped,
    ))
}

/// Annotation polygons resampled to `N` points, in the order of `ids`.
fn raw_references(cfg: &RunConfig, ids: &[u64]) -> Result<Vec<Vec<Point>>> {
    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| Error::Config("raw-polygon ground truth needs --input".into()))?;
    let records = clip_records(cfg, load_annotations(input, &cfg.filter())?);
    let by_id: BTreeMap<u64, &InstanceRecord> = records.iter().map(|r| (r.id, r)).collect();
    let n = cfg.n();
    ids.iter()
        .map(|id| {
            let rec = by_id.get(id).ok_or_else(|| {
                Error::Config(format!("instance {id} not found in {}", input.display()))
            })?;
            let rings = match &rec.shape {
                Shape::Polygons(r) => r.clone(),
                Shape::Mask(m) => m.outer_rings(),
            };
            Ok(resample_rings(&rings, n))
        })
        .collect()
}
