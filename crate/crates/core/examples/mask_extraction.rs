//! Contours from a binary raster instead of polygons.
//!
//! ```text
//! cargo run --example mask_extraction
//! ```

use eigencontours::prelude::*;

fn main() -> Result<()> {
    // An ellipse with a slot cut into its right side.
    let (w, h) = (64usize, 48usize);
    let mut data = vec![false; w * h];
    for row in 0..h {
        for col in 0..w {
            let x = col as f64 + 0.5 - 32.0;
            let y = row as f64 + 0.5 - 24.0;
            let r = (x * x / 1.6 + y * y).sqrt();
            let notch = x > 8.0 && y.abs() < 3.0;
            data[row * w + col] = r < 18.0 && !notch;
        }
    }
    let shape = Shape::from_mask(Mask::new(w, h, data)?);

    let center = compute_inner_center(&shape, 0.25)?;
    println!(
        "inner center ({:.2}, {:.2}), inscribed radius {:.2}",
        center.point.x, center.point.y, center.radius
    );

    let contour = extract_star_contour(&shape, &ExtractOptions::with_n(36))?;
    for (i, r) in contour.radii().iter().enumerate() {
        let deg = contour.angle(i).to_degrees();
        println!(
            "{deg:>6.1} deg  {r:>7.3}  {}",
            "#".repeat((r * 2.0).round() as usize)
        );
    }
    Ok(())
}
