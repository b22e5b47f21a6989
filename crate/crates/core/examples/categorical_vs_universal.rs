//! One basis for all categories against one basis per category, each
//! scored on its own category at the same dimension.
//!
//! ```text
//! cargo run --release --example categorical_vs_universal -- [m]
//! ```

use eigencontours::prelude::*;

fn main() -> Result<()> {
    let m = std::env::args()
        .nth(1)
        .map_or(Ok(6), |s| s.parse())
        .expect("m");

    let params = SynthParams {
        count: 600,
        categories: vec!["round".into(), "spiky".into(), "oblong".into()],
        ..Default::default()
    };
    let records: Vec<InstanceRecord> = generate_synthetic(&params)?
        .into_iter()
        .map(|s| s.record)
        .collect();
    let universal_spec = CorpusSpec::default();
    let per_category_spec = CorpusSpec {
        grouping: Grouping::PerCategory,
        ..Default::default()
    };

    let universal = fit_eigenbasis(
        &build_contour_matrix(&records, &universal_spec)?["universal"],
        m,
    )?;
    let groups = build_contour_matrix(&records, &per_category_spec)?;

    println!(
        "{:>8} {:>6} {:>12} {:>12}",
        "category", "L", "universal", "categorical"
    );
    for (category, a) in &groups {
        let own = fit_eigenbasis(a, m)?;
        let contours: Vec<StarContour> = a
            .columns()
            .into_iter()
            .map(|r| StarContour::new(Point::new(0.0, 0.0), 0.0, r))
            .collect::<Result<_>>()?;
        let references = star_references(&contours);
        let mut scores = Vec::new();
        for basis in [&universal, &own] {
            let descriptor = DescriptorModel::Eigencontour(basis.clone());
            let mut total = 0.0;
            for (c, gt) in contours.iter().zip(&references) {
                let decoded = c.with_radii(descriptor.reconstruct(c.radii())?)?;
                let tol = ToleranceRule::default().resolve(gt);
                total += boundary_fscore_points(&contour_to_polygon(&decoded), gt, tol)?.f;
            }
            scores.push(total / contours.len() as f64);
        }
        println!(
            "{category:>8} {:>6} {:>12.4} {:>12.4}",
            a.l(),
            scores[0],
            scores[1]
        );
    }
    Ok(())
}
