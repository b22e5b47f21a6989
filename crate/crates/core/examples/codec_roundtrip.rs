//! Encode a contour, decode it back, and measure what was lost.
//!
//! ```text
//! cargo run --release --example codec_roundtrip -- [m]
//! ```

use eigencontours::prelude::*;

fn main() -> Result<()> {
    let m = std::env::args()
        .nth(1)
        .map_or(Ok(12), |s| s.parse())
        .expect("m");

    let shapes = generate_synthetic(&SynthParams {
        count: 200,
        seed: 1,
        ..Default::default()
    })?;
    let opts = ExtractOptions::default();
    let contours: Vec<StarContour> = shapes
        .iter()
        .map(|s| extract_star_contour(&s.record.shape, &opts))
        .collect::<Result<_>>()?;
    let columns: Vec<Vec<f64>> = contours.iter().map(|c| c.radii().to_vec()).collect();
    let basis = fit_eigenbasis(&ContourMatrix::from_columns(&columns)?, m)?;

    let contour = &contours[0];
    let code = basis.encode(contour.radii())?;
    let radii = basis.decode(&code)?;
    let decoded = contour.with_radii(radii.clone())?;

    println!("{} radii -> {} coefficients", contour.n(), code.len());
    println!("coefficients: {:.3?}", code.values);

    let l2 = contour
        .radii()
        .iter()
        .zip(&radii)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let coeff_norm = code.iter().map(|c| c * c).sum::<f64>().sqrt();
    let radii_norm = radii.iter().map(|r| r * r).sum::<f64>().sqrt();
    println!("reconstruction L2 error {l2:.4}");
    println!("|c| = {coeff_norm:.6}, |decoded| = {radii_norm:.6}");

    let references = star_references(std::slice::from_ref(contour));
    let tol = ToleranceRule::default().resolve(&references[0]);
    let f = boundary_fscore_points(&contour_to_polygon(&decoded), &references[0], tol)?;
    println!(
        "boundary F at {tol:.2} px: {:.4} (P {:.4}, R {:.4})",
        f.f, f.precision, f.recall
    );
    Ok(())
}
