//! F-vs-M curves for the three descriptor families on a synthetic corpus.
//!
//! ```text
//! cargo run --release --example descriptor_comparison -- [count] [seed]
//! ```

use eigencontours::prelude::*;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let count = args.next().map_or(Ok(500), |s| s.parse()).expect("count");
    let seed = args.next().map_or(Ok(0), |s| s.parse()).expect("seed");

    let shapes = generate_synthetic(&SynthParams {
        count,
        seed,
        ..Default::default()
    })?;
    let opts = ExtractOptions::default();
    let contours: Vec<StarContour> = shapes
        .iter()
        .map(|s| extract_star_contour(&s.record.shape, &opts))
        .collect::<Result<_>>()?;
    let references = star_references(&contours);
    let sweep: Vec<usize> = (4..=36).step_by(4).collect();

    let mut reports = Vec::new();
    for kind in DescriptorKind::ALL {
        let report = f_curve(
            &contours,
            &contours,
            &references,
            kind,
            &sweep,
            ToleranceRule::default(),
            GroundTruth::StarContour,
        )?;
        reports.push(report);
    }

    print!("{:>4}", "M");
    for r in &reports {
        print!(" {:>22}", r.descriptor.as_str());
    }
    println!();
    for (i, m) in sweep.iter().enumerate() {
        print!("{m:>4}");
        for r in &reports {
            print!(" {:>22.4}", r.curve[i].mean_f);
        }
        println!();
    }
    print!("{:>4}", "AUC");
    for r in &reports {
        print!(" {:>22.2}", r.auc_f);
    }
    println!();
    Ok(())
}
