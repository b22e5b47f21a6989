//! Star-convex profiles from a COCO-style annotation file.
//!
//! ```text
//! cargo run --example extract_contours -- annotations.json [n]
//! ```
//!
//! Without arguments a small synthetic corpus is used.

use std::path::Path;

use eigencontours::prelude::*;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let input = args.next();
    let n = args.next().map_or(Ok(360), |s| s.parse()).expect("n");

    let records: Vec<InstanceRecord> = match &input {
        Some(path) => load_annotations(Path::new(path), &CategoryFilter::default())?,
        None => generate_synthetic(&SynthParams {
            count: 8,
            ..Default::default()
        })?
        .into_iter()
        .map(|s| s.record)
        .collect(),
    };

    let opts = ExtractOptions::with_n(n);
    println!(
        "{:>6} {:>12} {:>18} {:>10} {:>10} {:>10}",
        "id", "category", "center", "inscribed", "min r", "max r"
    );
    for record in &records {
        let center = match compute_inner_center(&record.shape, opts.grid_step) {
            Ok(c) => c,
            Err(e) => {
                println!("{:>6} {:>12} skipped: {e}", record.id, record.category);
                continue;
            }
        };
        let contour = extract_star_contour(&record.shape, &opts)?;
        let r = contour.radii();
        let lo = r.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = r.iter().copied().fold(0.0, f64::max);
        println!(
            "{:>6} {:>12} {:>18} {:>10.2} {:>10.2} {:>10.2}",
            record.id,
            record.category,
            format!("({:.1}, {:.1})", center.point.x, center.point.y),
            center.radius,
            lo,
            hi
        );
    }
    Ok(())
}
