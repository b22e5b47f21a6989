//! Eigencontours: compact, data-driven descriptors for object boundaries.
//!
//! A boundary is converted to a star-convex centroidal profile (the
//! farthest boundary distance along `N` uniform rays from the inner center).
//! Stacking the profiles of a corpus gives a contour matrix whose leading
//! left singular vectors, the eigencontours, span the best rank-M subspace.
//! Contours are then described by `M` projection coefficients.
//!
//! Modules:
//!
//! - [`geometry`], [`contour`]: shapes, inner center, ray casting.
//! - [`eigenbasis`]: fitting, encoding and decoding.
//! - [`descriptors`]: the shared descriptor contract plus the
//!   uniform-subsampling and Chebyshev baselines.
//! - [`clustering`]: k-means in coefficient space.
//! - [`evaluation`]: boundary F-measure, F-vs-M curves, AUC-F.
//! - [`dataset`]: COCO-style input, synthetic corpora, contour CSV.
//! - [`pipeline`]: the file-level commands used by the `eigencontours` binary.
//!
//! ```
//! use eigencontours::prelude::*;
//!
//! let params = SynthParams { count: 40, seed: 1, ..Default::default() };
//! let shapes = generate_synthetic(&params).unwrap();
//! let opts = ExtractOptions::with_n(90);
//! let contours: Vec<StarContour> = shapes
//!     .iter()
//!     .map(|s| extract_star_contour(&s.record.shape, &opts).unwrap())
//!     .collect();
//! let cols: Vec<Vec<f64>> = contours.iter().map(|c| c.radii().to_vec()).collect();
//! let basis = fit_eigenbasis(&ContourMatrix::from_columns(&cols).unwrap(), 8).unwrap();
//! let code = basis.encode(contours[0].radii()).unwrap();
//! let radii = basis.decode(&code).unwrap();
//! assert_eq!((code.len(), radii.len()), (8, 90));
//! ```

pub mod clustering;
pub mod contour;
pub mod dataset;
pub mod descriptors;
pub mod eigenbasis;
pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod pipeline;
pub mod provenance;
pub mod serial;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::clustering::{
        centroid_contours, kmeans, kmeans_from, nearest_centroid, ClusterModel,
    };
    pub use crate::contour::{
        compute_inner_center, contour_to_polygon, extract_star_contour, ExtractOptions,
        InnerCenter, StarContour,
    };
    pub use crate::dataset::{
        build_contour_matrix, generate_synthetic, load_annotations, CategoryFilter, CorpusSpec,
        Grouping, InstanceRecord, SynthParams,
    };
    pub use crate::descriptors::{
        centroidal_decode, centroidal_encode, chebyshev_decode, chebyshev_encode, DescriptorKind,
        DescriptorModel,
    };
    pub use crate::eigenbasis::{
        fit_eigenbasis, CoefficientVector, ContourMatrix, EigenBasis, Spectrum,
    };
    pub use crate::error::{Error, Result};
    pub use crate::evaluation::{
        auc_f, boundary_fscore, boundary_fscore_points, clustering_fscore, f_curve,
        star_references, EvalReport, FScore, GroundTruth, ToleranceRule,
    };
    pub use crate::geometry::{Mask, Point, Shape};
}
