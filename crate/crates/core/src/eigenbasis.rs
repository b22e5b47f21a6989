//! Eigencontours: the left singular vectors of a contour matrix.
//!
//! The matrix `A = [r_1 .. r_L]` holds one radii vector per column. Its SVD
//! `A = U Σ Vᵀ` gives an orthonormal basis `U` ordered by singular value;
//! the first `M` columns span the rank-M eigencontour space. `A` is not
//! mean-centered. Contours are encoded by projection, `c = U_Mᵀ r`, and
//! decoded by `max(U_M c, 0)`.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::provenance::{sha256_hex, Provenance};
use crate::serial;

pub const BASIS_FORMAT_VERSION: u32 = 1;

/// Tolerance on `‖U_Mᵀ U_M − I‖_max` for a basis to be accepted.
pub const ORTHONORMALITY_TOL: f64 = 1e-9;

/// `N x L` matrix of radii, one training contour per column.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourMatrix {
    data: DMatrix<f64>,
    pub group_key: Option<String>,
}

impl ContourMatrix {
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<ContourMatrix> {
        let first = columns.first().ok_or(Error::EmptyMatrix)?;
        let n = first.len();
        if let Some(bad) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        let data = DMatrix::from_fn(n, columns.len(), |i, j| columns[j][i]);
        ContourMatrix::new(data)
    }

    pub fn new(data: DMatrix<f64>) -> Result<ContourMatrix> {
        if data.ncols() == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.nrows() < 3 {
            return Err(Error::InvalidN(data.nrows()));
        }
        if data.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidMatrix(
                "entries must be finite and nonnegative".into(),
            ));
        }
        Ok(ContourMatrix {
            data,
            group_key: None,
        })
    }

    /// Accepts signed entries. Used for pre-clamp reconstructions and for
    /// algebraic checks on arbitrary matrices.
    pub fn new_unchecked_sign(data: DMatrix<f64>) -> Result<ContourMatrix> {
        if data.ncols() == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix("entries must be finite".into()));
        }
        Ok(ContourMatrix {
            data,
            group_key: None,
        })
    }

    pub fn with_group(mut self, key: impl Into<String>) -> Self {
        self.group_key = Some(key.into());
        self
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn l(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.data.column(j).iter().copied().collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.l()).map(|j| self.column(j)).collect()
    }
}

/// Orthonormal `N x M` eigencontour basis plus the full singular spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    u: DMatrix<f64>,
    singular_values: Vec<f64>,
    pub angle0: f64,
    pub provenance: Provenance,
}

/// Full thin SVD of a contour matrix; truncate it to any `M` without refitting.
#[derive(Debug, Clone)]
pub struct Spectrum {
    u: DMatrix<f64>,
    singular_values: Vec<f64>,
    group_key: Option<String>,
    num_contours: usize,
}

impl Spectrum {
    pub fn of(a: &ContourMatrix) -> Spectrum {
        let (u, singular_values) = sorted_svd(a.data());
        Spectrum {
            u,
            singular_values,
            group_key: a.group_key.clone(),
            num_contours: a.l(),
        }
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn max_rank(&self) -> usize {
        self.singular_values.len()
    }

    pub fn basis(&self, m: usize) -> Result<EigenBasis> {
        let max = self.max_rank();
        if m == 0 || m > max {
            return Err(Error::InvalidM {
                m,
                reason: format!("must satisfy 1 <= M <= min(N, L) = {max}"),
            });
        }
        Ok(EigenBasis {
            u: self.u.columns(0, m).into_owned(),
            singular_values: self.singular_values.clone(),
            angle0: 0.0,
            provenance: Provenance {
                group_key: self.group_key.clone(),
                num_contours: self.num_contours,
                ..Default::default()
            },
        })
    }
}

/// Thin SVD with singular values sorted nonincreasing and each left vector
/// signed so that its largest-magnitude entry (first on ties) is positive.
fn sorted_svd(a: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let (u, sv) = thin_svd(a);
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]).then(i.cmp(&j)));

    let mut out = DMatrix::zeros(a.nrows(), order.len());
    for (dst, &src) in order.iter().enumerate() {
        let col = u.column(src);
        let mut pivot = 0;
        for (i, v) in col.iter().enumerate() {
            if v.abs() > col[pivot].abs() {
                pivot = i;
            }
        }
        let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
        out.set_column(dst, &(col * sign));
    }
    let values = order.iter().map(|&i| sv[i].max(0.0)).collect();
    (out, values)
}

/// Left singular vectors and singular values, computed sequentially so the
/// result does not depend on the thread count.
pub(crate) fn thin_svd(a: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    use faer::dyn_stack::{MemBuffer, MemStack};
    use faer::linalg::svd::{self, ComputeSvdVectors};

    let (m, n) = a.shape();
    let size = m.min(n);
    let src = faer::MatRef::from_column_major_slice(a.as_slice(), m, n);
    let mut u = faer::Mat::<f64>::zeros(m, size);
    let mut s = faer::diag::Diag::<f64>::zeros(size);
    let par = faer::Par::Seq;
    let scratch = svd::svd_scratch::<f64>(
        m,
        n,
        ComputeSvdVectors::Thin,
        ComputeSvdVectors::No,
        par,
        Default::default(),
    );
    let mut buf = MemBuffer::new(scratch);
    svd::svd(
        src,
        s.as_mut(),
        Some(u.as_mut()),
        None,
        par,
        MemStack::new(&mut buf),
        Default::default(),
    )
    .expect("SVD of a finite matrix converges");
    let values = (0..size).map(|k| s[k]).collect();
    (DMatrix::from_fn(m, size, |i, j| u[(i, j)]), values)
}

/// Best rank-M basis of `a`: its first `M` left singular vectors.
pub fn fit_eigenbasis(a: &ContourMatrix, m: usize) -> Result<EigenBasis> {
    let max = a.n().min(a.l());
    if m == 0 || m > max {
        return Err(Error::InvalidM {
            m,
            reason: format!("must satisfy 1 <= M <= min(N, L) = {max}"),
        });
    }
    Spectrum::of(a).basis(m)
}

/// Projection coefficients tied to the basis that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    pub values: Vec<f64>,
    pub basis_id: String,
}

impl std::ops::Deref for CoefficientVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.values
    }
}

impl EigenBasis {
    /// Wraps an explicit basis matrix. Columns must be orthonormal.
    pub fn from_parts(u: DMatrix<f64>, singular_values: Vec<f64>) -> Result<EigenBasis> {
        let basis = EigenBasis {
            u,
            singular_values,
            angle0: 0.0,
            provenance: Provenance::default(),
        };
        basis.validate()?;
        Ok(basis)
    }

    fn validate(&self) -> Result<()> {
        let (n, m) = self.u.shape();
        if n < 3 {
            return Err(Error::InvalidN(n));
        }
        if m == 0 || m > n {
            return Err(Error::InvalidM {
                m,
                reason: format!("basis has N = {n}"),
            });
        }
        if self.singular_values.len() < m {
            return Err(Error::InvalidParams(format!(
                "{} singular values for M = {m}",
                self.singular_values.len()
            )));
        }
        if self.singular_values.windows(2).any(|w| w[1] > w[0])
            || self.singular_values.iter().any(|s| !(*s >= 0.0))
        {
            return Err(Error::InvalidParams(
                "singular values must be nonnegative and nonincreasing".into(),
            ));
        }
        let err = self.orthonormality_error();
        if !(err <= ORTHONORMALITY_TOL) {
            return Err(Error::InvalidParams(format!(
                "basis columns not orthonormal (max deviation {err:e})"
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    pub fn m(&self) -> usize {
        self.u.ncols()
    }

    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// The `k`-th eigencontour (0-based).
    pub fn eigencontour(&self, k: usize) -> Vec<f64> {
        self.u.column(k).iter().copied().collect()
    }

    pub fn orthonormality_error(&self) -> f64 {
        let gram = self.u.transpose() * &self.u;
        let eye = DMatrix::<f64>::identity(self.m(), self.m());
        (gram - eye).amax()
    }

    /// Leading `m` columns of this basis.
    pub fn truncated(&self, m: usize) -> Result<EigenBasis> {
        if m == 0 || m > self.m() {
            return Err(Error::InvalidM {
                m,
                reason: format!("basis holds {} eigencontours", self.m()),
            });
        }
        Ok(EigenBasis {
            u: self.u.columns(0, m).into_owned(),
            ..self.clone()
        })
    }

    /// Content hash of the basis matrix, used to tag coefficient vectors.
    pub fn id(&self) -> String {
        let mut bytes = Vec::with_capacity(16 + 8 * self.u.len());
        bytes.extend_from_slice(&(self.n() as u64).to_le_bytes());
        bytes.extend_from_slice(&(self.m() as u64).to_le_bytes());
        for v in self.u.iter() {
            bytes.extend_from_slice(&v.to_bits().to_le_bytes());
        }
        sha256_hex(&bytes)[..16].to_string()
    }

    fn check_len(&self, expected: usize, found: usize) -> Result<()> {
        if expected != found {
            return Err(Error::DimensionMismatch { expected, found });
        }
        Ok(())
    }

    /// `c = U_Mᵀ r`.
    pub fn encode(&self, radii: &[f64]) -> Result<CoefficientVector> {
        Ok(CoefficientVector {
            values: self.project(radii)?,
            basis_id: self.id(),
        })
    }

    /// `U_Mᵀ r` as a plain vector.
    pub fn project(&self, radii: &[f64]) -> Result<Vec<f64>> {
        self.check_len(self.n(), radii.len())?;
        let r = DVector::from_column_slice(radii);
        Ok((self.u.tr_mul(&r)).iter().copied().collect())
    }

    /// `U_M c` without the nonnegativity clamp.
    pub fn decode_unclamped(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        self.check_len(self.m(), coeffs.len())?;
        let c = DVector::from_column_slice(coeffs);
        Ok((&self.u * c).iter().copied().collect())
    }

    /// `max(U_M c, 0)` elementwise.
    pub fn decode(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        let mut r = self.decode_unclamped(coeffs)?;
        for v in &mut r {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(r)
    }

    /// Projects every column of `a` onto the basis and decodes it (clamped).
    pub fn rank_m_reconstruct(&self, a: &ContourMatrix) -> Result<ContourMatrix> {
        let mut out = self.reconstruct_unclamped(a)?;
        out.apply(|v| {
            if *v < 0.0 {
                *v = 0.0
            }
        });
        let mut m = ContourMatrix::new(out)?;
        m.group_key = a.group_key.clone();
        Ok(m)
    }

    /// `U_M U_Mᵀ A`.
    pub fn reconstruct_unclamped(&self, a: &ContourMatrix) -> Result<DMatrix<f64>> {
        self.check_len(self.n(), a.n())?;
        Ok(&self.u * self.u.tr_mul(a.data()))
    }

    /// `Σ_{k>M} σ_k²`: the squared Frobenius error of the best rank-M
    /// approximation of the fitted matrix.
    pub fn tail_energy(&self) -> f64 {
        self.singular_values[self.m()..].iter().map(|s| s * s).sum()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serial::to_json(&BasisFile::from(self))?;
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<EigenBasis> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: BasisFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        file.try_into()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serial::to_json(&BasisFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<EigenBasis> {
        let file: BasisFile = serde_json::from_str(text)?;
        file.try_into()
    }
}

/// On-disk basis document.
#[derive(Debug, Serialize, Deserialize)]
struct BasisFile {
    version: u32,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    #[serde(serialize_with = "serial::f64_full")]
    angle0: f64,
    orientation: String,
    #[serde(serialize_with = "serial::vec_full")]
    singular_values: Vec<f64>,
    #[serde(rename = "U", serialize_with = "serial::rows_full")]
    u: Vec<Vec<f64>>,
    provenance: Provenance,
}

impl From<&EigenBasis> for BasisFile {
    fn from(b: &EigenBasis) -> Self {
        BasisFile {
            version: BASIS_FORMAT_VERSION,
            n: b.n(),
            m: b.m(),
            angle0: b.angle0,
            orientation: "counterclockwise".into(),
            singular_values: b.singular_values.clone(),
            u: (0..b.n())
                .map(|i| b.u.row(i).iter().copied().collect())
                .collect(),
            provenance: b.provenance.clone(),
        }
    }
}

impl TryFrom<BasisFile> for EigenBasis {
    type Error = Error;

    fn try_from(f: BasisFile) -> Result<EigenBasis> {
        if f.version != BASIS_FORMAT_VERSION {
            return Err(Error::InvalidParams(format!(
                "unsupported basis version {}",
                f.version
            )));
        }
        if f.orientation != "counterclockwise" {
            return Err(Error::InvalidParams(format!(
                "unsupported orientation '{}'",
                f.orientation
            )));
        }
        if f.u.len() != f.n {
            return Err(Error::DimensionMismatch {
                expected: f.n,
                found: f.u.len(),
            });
        }
        if let Some(row) = f.u.iter().find(|r| r.len() != f.m) {
            return Err(Error::DimensionMismatch {
                expected: f.m,
                found: row.len(),
            });
        }
        let u = DMatrix::from_fn(f.n, f.m, |i, j| f.u[i][j]);
        let mut basis = EigenBasis::from_parts(u, f.singular_values)?;
        basis.angle0 = f.angle0;
        basis.provenance = f.provenance;
        Ok(basis)
    }
}
