//! K-means in eigencontour space, then score every shape against its
//! nearest centroid.
//!
//! ```text
//! cargo run --release --example cluster_patterns -- [k] [m]
//! ```

use eigencontours::prelude::*;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let k = args.next().map_or(Ok(20), |s| s.parse()).expect("k");
    let m = args.next().map_or(Ok(12), |s| s.parse()).expect("m");

    let shapes = generate_synthetic(&SynthParams {
        count: 400,
        seed: 2,
        ..Default::default()
    })?;
    let opts = ExtractOptions::default();
    let contours: Vec<StarContour> = shapes
        .iter()
        .map(|s| extract_star_contour(&s.record.shape, &opts))
        .collect::<Result<_>>()?;
    let columns: Vec<Vec<f64>> = contours.iter().map(|c| c.radii().to_vec()).collect();
    let descriptor =
        DescriptorModel::Eigencontour(fit_eigenbasis(&ContourMatrix::from_columns(&columns)?, m)?);

    let points: Vec<Vec<f64>> = columns
        .iter()
        .map(|r| descriptor.encode(r))
        .collect::<Result<_>>()?;
    let model = kmeans(&points, k, 0, 100)?;
    println!(
        "k-means: K={} M={} iterations={} converged={}",
        model.k, model.m, model.iterations, model.converged
    );
    println!("inertia {:.3}", model.inertia);

    let mut sizes = vec![0usize; model.k];
    for &a in &model.assignments {
        sizes[a] += 1;
    }
    let prototypes = centroid_contours(&model, &descriptor)?;
    println!("{:>4} {:>6} {:>10} {:>10}", "id", "size", "min r", "max r");
    for (j, radii) in prototypes.iter().enumerate() {
        let lo = radii.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = radii.iter().copied().fold(0.0, f64::max);
        println!("{j:>4} {:>6} {lo:>10.2} {hi:>10.2}", sizes[j]);
    }

    let references = star_references(&contours);
    let eval = clustering_fscore(
        &contours,
        &references,
        &model,
        &descriptor,
        ToleranceRule::default(),
    )?;
    println!(
        "nearest-centroid F {:.4} (P {:.4}, R {:.4})",
        eval.mean_f, eval.mean_precision, eval.mean_recall
    );
    Ok(())
}
