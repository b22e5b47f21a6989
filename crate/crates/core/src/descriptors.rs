//! Contour descriptors sharing one encode/decode contract: eigencontours
//! and two fixed-basis baselines, uniform ray subsampling and a Chebyshev
//! series fit of the radial signature.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::eigenbasis::EigenBasis;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DescriptorKind {
    Eigencontour,
    CentroidalSubsample,
    Chebyshev,
}

impl DescriptorKind {
    pub const ALL: [DescriptorKind; 3] = [
        DescriptorKind::Eigencontour,
        DescriptorKind::CentroidalSubsample,
        DescriptorKind::Chebyshev,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            DescriptorKind::Eigencontour => "eigencontour",
            DescriptorKind::CentroidalSubsample => "centroidal_subsample",
            DescriptorKind::Chebyshev => "chebyshev",
        }
    }
}

impl fmt::Display for DescriptorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DescriptorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eigencontour" | "eigen" => Ok(DescriptorKind::Eigencontour),
            "centroidal_subsample" | "centroidal" | "subsample" => {
                Ok(DescriptorKind::CentroidalSubsample)
            }
            "chebyshev" | "cheby" => Ok(DescriptorKind::Chebyshev),
            other => Err(Error::Config(format!("unknown descriptor '{other}'"))),
        }
    }
}

/// Sample indices `round(i * N / M)`, `i = 0..M`.
fn subsample_indices(n: usize, m: usize) -> Vec<usize> {
    (0..m)
        .map(|i| ((i * n) as f64 / m as f64).round() as usize)
        .collect()
}

fn check_m(m: usize, n: usize, min: usize) -> Result<()> {
    if m < min {
        return Err(Error::InvalidM {
            m,
            reason: format!("must be at least {min}"),
        });
    }
    if m > n {
        return Err(Error::InvalidM {
            m,
            reason: format!("exceeds contour resolution N = {n}"),
        });
    }
    Ok(())
}

/// Radii at `M` uniformly spaced rays.
pub fn centroidal_encode(radii: &[f64], m: usize) -> Result<Vec<f64>> {
    check_m(m, radii.len(), 3)?;
    Ok(subsample_indices(radii.len(), m)
        .into_iter()
        .map(|i| radii[i])
        .collect())
}

/// Periodic linear interpolation of subsampled rays back onto `N` rays,
/// clamped at zero.
pub fn centroidal_decode(samples: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut out = centroidal_decode_unclamped(samples, n)?;
    clamp(&mut out);
    Ok(out)
}

pub fn centroidal_decode_unclamped(samples: &[f64], n: usize) -> Result<Vec<f64>> {
    let m = samples.len();
    if n < 3 {
        return Err(Error::InvalidN(n));
    }
    check_m(m, n, 1)?;
    let knots = subsample_indices(n, m);
    let mut out = vec![0.0; n];
    for j in 0..m {
        let start = knots[j];
        let end = if j + 1 < m { knots[j + 1] } else { n };
        let (a, b) = (samples[j], samples[(j + 1) % m]);
        let span = (end - start) as f64;
        for (k, slot) in out[start..end].iter_mut().enumerate() {
            let t = k as f64 / span;
            *slot = a + t * (b - a);
        }
    }
    Ok(out)
}

/// Maps ray index `i` of `N` to `[-1, 1)` through `θ = 2πi/N`, `x = (θ − π)/π`.
pub fn chebyshev_abscissa(i: usize, n: usize) -> f64 {
    let theta = TAU * i as f64 / n as f64;
    (theta - PI) / PI
}

/// `T_0(x) .. T_{m-1}(x)` by the three-term recurrence.
pub fn chebyshev_row(x: f64, m: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(m);
    for k in 0..m {
        let v = match k {
            0 => 1.0,
            1 => x,
            _ => 2.0 * x * t[k - 1] - t[k - 2],
        };
        t.push(v);
    }
    t
}

/// Discrete least-squares Chebyshev fit for a fixed `(N, M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevModel {
    n: usize,
    m: usize,
    design: DMatrix<f64>,
    // (XᵀX)⁻¹Xᵀ via QR, so encoding is a single matrix-vector product.
    solver: DMatrix<f64>,
}

// Smallest accepted ratio of extreme singular values of the design matrix.
const RANK_TOL: f64 = 1e-10;

impl ChebyshevModel {
    pub fn new(n: usize, m: usize) -> Result<ChebyshevModel> {
        if n < 3 {
            return Err(Error::InvalidN(n));
        }
        check_m(m, n, 1)?;
        let mut design = DMatrix::zeros(n, m);
        for i in 0..n {
            let row = chebyshev_row(chebyshev_abscissa(i, n), m);
            for (k, v) in row.into_iter().enumerate() {
                design[(i, k)] = v;
            }
        }
        let (_, sv) = crate::eigenbasis::thin_svd(&design);
        let smax = sv.iter().cloned().fold(0.0, f64::max);
        let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(smin > RANK_TOL * smax) {
            return Err(Error::IllConditioned(format!(
                "Chebyshev design with N = {n}, M = {m} has condition number {:e}",
                smax / smin
            )));
        }
        let qr = design.clone().qr();
        let r = qr.r();
        let q = qr.q();
        let r_inv = r
            .solve_upper_triangular(&DMatrix::identity(m, m))
            .ok_or_else(|| Error::IllConditioned(format!("singular R for N = {n}, M = {m}")))?;
        let solver = r_inv * q.transpose();
        Ok(ChebyshevModel {
            n,
            m,
            design,
            solver,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn encode(&self, radii: &[f64]) -> Result<Vec<f64>> {
        if radii.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: radii.len(),
            });
        }
        let r = DVector::from_column_slice(radii);
        Ok((&self.solver * r).iter().copied().collect())
    }

    pub fn decode_unclamped(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        if coeffs.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: coeffs.len(),
            });
        }
        let c = DVector::from_column_slice(coeffs);
        Ok((&self.design * c).iter().copied().collect())
    }
}

/// Least-squares Chebyshev coefficients of the radial signature.
pub fn chebyshev_encode(radii: &[f64], m: usize) -> Result<Vec<f64>> {
    ChebyshevModel::new(radii.len(), m)?.encode(radii)
}

/// Evaluates a Chebyshev series at `N` uniform angles, clamped at zero.
pub fn chebyshev_decode(coeffs: &[f64], n: usize) -> Result<Vec<f64>> {
    if n < 3 {
        return Err(Error::InvalidN(n));
    }
    let mut out: Vec<f64> = (0..n)
        .map(|i| {
            chebyshev_row(chebyshev_abscissa(i, n), coeffs.len())
                .iter()
                .zip(coeffs)
                .map(|(t, c)| t * c)
                .sum()
        })
        .collect();
    clamp(&mut out);
    Ok(out)
}

fn clamp(v: &mut [f64]) {
    for x in v {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
}

/// A parameterized descriptor: encodes `N` radii into `M` numbers and back.
#[derive(Debug, Clone, PartialEq)]
pub enum DescriptorModel {
    Eigencontour(EigenBasis),
    CentroidalSubsample { n: usize, m: usize },
    Chebyshev(ChebyshevModel),
}

impl DescriptorModel {
    pub fn centroidal(n: usize, m: usize) -> Result<DescriptorModel> {
        if n < 3 {
            return Err(Error::InvalidN(n));
        }
        check_m(m, n, 3)?;
        Ok(DescriptorModel::CentroidalSubsample { n, m })
    }

    pub fn chebyshev(n: usize, m: usize) -> Result<DescriptorModel> {
        Ok(DescriptorModel::Chebyshev(ChebyshevModel::new(n, m)?))
    }

    pub fn kind(&self) -> DescriptorKind {
        match self {
            DescriptorModel::Eigencontour(_) => DescriptorKind::Eigencontour,
            DescriptorModel::CentroidalSubsample { .. } => DescriptorKind::CentroidalSubsample,
            DescriptorModel::Chebyshev(_) => DescriptorKind::Chebyshev,
        }
    }

    pub fn m(&self) -> usize {
        match self {
            DescriptorModel::Eigencontour(b) => b.m(),
            DescriptorModel::CentroidalSubsample { m, .. } => *m,
            DescriptorModel::Chebyshev(c) => c.m(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            DescriptorModel::Eigencontour(b) => b.n(),
            DescriptorModel::CentroidalSubsample { n, .. } => *n,
            DescriptorModel::Chebyshev(c) => c.n(),
        }
    }

    pub fn encode(&self, radii: &[f64]) -> Result<Vec<f64>> {
        if radii.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: radii.len(),
            });
        }
        match self {
            DescriptorModel::Eigencontour(b) => b.project(radii),
            DescriptorModel::CentroidalSubsample { m, .. } => centroidal_encode(radii, *m),
            DescriptorModel::Chebyshev(c) => c.encode(radii),
        }
    }

    pub fn decode_unclamped(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        if coeffs.len() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                found: coeffs.len(),
            });
        }
        match self {
            DescriptorModel::Eigencontour(b) => b.decode_unclamped(coeffs),
            DescriptorModel::CentroidalSubsample { n, .. } => {
                centroidal_decode_unclamped(coeffs, *n)
            }
            DescriptorModel::Chebyshev(c) => c.decode_unclamped(coeffs),
        }
    }

    /// Decoded radii, clamped to be nonnegative.
    pub fn decode(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        let mut r = self.decode_unclamped(coeffs)?;
        clamp(&mut r);
        Ok(r)
    }

    pub fn reconstruct(&self, radii: &[f64]) -> Result<Vec<f64>> {
        self.decode(&self.encode(radii)?)
    }

    /// Short identifier recorded alongside cluster models.
    pub fn reference(&self) -> String {
        match self {
            DescriptorModel::Eigencontour(b) => format!("eigencontour:{}", b.id()),
            DescriptorModel::CentroidalSubsample { n, m } => {
                format!("centroidal_subsample:N={n}:M={m}")
            }
            DescriptorModel::Chebyshev(c) => format!("chebyshev:N={}:M={}", c.n(), c.m()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsample_index_arithmetic() {
        let r: Vec<f64> = (1..=8).map(f64::from).collect();
        assert_eq!(centroidal_encode(&r, 4).unwrap(), vec![1.0, 3.0, 5.0, 7.0]);
        assert_eq!(centroidal_encode(&r, 8).unwrap(), r);
    }

    #[test]
    fn subsample_rejects_small_or_large_m() {
        let r = vec![1.0; 8];
        assert!(matches!(
            centroidal_encode(&r, 2),
            Err(Error::InvalidM { m: 2, .. })
        ));
        assert!(matches!(
            centroidal_encode(&r, 9),
            Err(Error::InvalidM { m: 9, .. })
        ));
    }

    #[test]
    fn constant_contour_survives_subsampling() {
        let r = vec![5.0; 360];
        let v = centroidal_encode(&r, 36).unwrap();
        assert_eq!(v, vec![5.0; 36]);
        assert_eq!(centroidal_decode(&v, 360).unwrap(), r);
    }

    #[test]
    fn interpolation_identity_at_full_resolution() {
        let r: Vec<f64> = (0..12).map(|i| (i * 7 % 5) as f64).collect();
        assert_eq!(centroidal_decode(&r, 12).unwrap(), r);
    }

    #[test]
    fn interpolation_clamps() {
        let out = centroidal_decode(&[-1.0, 2.0, 2.0], 6).unwrap();
        assert!(out.iter().all(|v| *v >= 0.0));
        assert_eq!(out[0], 0.0);
    }

    #[test]
    fn chebyshev_constant() {
        let c = chebyshev_encode(&vec![5.0; 64], 6).unwrap();
        assert!((c[0] - 5.0).abs() < 1e-12);
        assert!(c[1..].iter().all(|v| v.abs() < 1e-12));
        assert_eq!(
            chebyshev_decode(&[5.0, 0.0, 0.0], 10).unwrap(),
            vec![5.0; 10]
        );
    }

    #[test]
    fn chebyshev_linear_signature() {
        let n = 90;
        let r: Vec<f64> = (0..n)
            .map(|i| 2.0 * chebyshev_abscissa(i, n) + 1.0)
            .collect();
        let c = chebyshev_encode(&r, 5).unwrap();
        let want = [1.0, 2.0, 0.0, 0.0, 0.0];
        for (a, b) in c.iter().zip(want) {
            assert!((a - b).abs() < 1e-9, "{c:?}");
        }
    }

    #[test]
    fn chebyshev_zero_vector() {
        assert_eq!(chebyshev_decode(&[0.0; 4], 8).unwrap(), vec![0.0; 8]);
    }

    #[test]
    fn chebyshev_ill_conditioned_when_m_too_large() {
        // Degree 40 on 40 nodes is interpolation on nearly clustered points of
        // a non-Chebyshev grid.
        assert!(matches!(
            ChebyshevModel::new(40, 40),
            Err(Error::IllConditioned(_))
        ));
    }

    #[test]
    fn model_contract() {
        let r: Vec<f64> = (0..36).map(|i| 3.0 + (i as f64 / 5.0).sin()).collect();
        for model in [
            DescriptorModel::centroidal(36, 9).unwrap(),
            DescriptorModel::chebyshev(36, 9).unwrap(),
        ] {
            let v = model.encode(&r).unwrap();
            assert_eq!(v.len(), 9);
            let back = model.decode(&v).unwrap();
            assert_eq!(back.len(), 36);
            assert!(back.iter().all(|x| *x >= 0.0));
        }
    }

    #[test]
    fn kind_parsing() {
        assert_eq!(
            "eigencontour".parse::<DescriptorKind>().unwrap(),
            DescriptorKind::Eigencontour
        );
        assert_eq!(
            "centroidal".parse::<DescriptorKind>().unwrap(),
            DescriptorKind::CentroidalSubsample
        );
        assert!("fourier".parse::<DescriptorKind>().is_err());
    }
}
