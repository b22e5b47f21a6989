//! Fit an eigencontour basis and look at its spectrum.
//!
//! ```text
//! cargo run --release --example fit_basis -- [m] [out.json]
//! ```

use std::path::Path;

use eigencontours::prelude::*;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let m = args.next().map_or(Ok(16), |s| s.parse()).expect("m");
    let out = args.next();

    let records: Vec<InstanceRecord> = generate_synthetic(&SynthParams {
        count: 300,
        ..Default::default()
    })?
    .into_iter()
    .map(|s| s.record)
    .collect();
    let matrices = build_contour_matrix(&records, &CorpusSpec::default())?;
    let a = &matrices["universal"];
    println!("contour matrix: {} x {}", a.n(), a.l());

    let spectrum = Spectrum::of(a);
    let sv = spectrum.singular_values();
    let total: f64 = sv.iter().map(|s| s * s).sum();
    let mut acc = 0.0;
    println!("{:>3} {:>14} {:>10}", "k", "sigma", "energy");
    for (k, s) in sv.iter().take(m.max(20)).enumerate() {
        acc += s * s;
        println!("{:>3} {:>14.6} {:>9.5}%", k + 1, s, 100.0 * acc / total);
    }

    let basis = spectrum.basis(m)?;
    println!("basis {}: N={} M={}", basis.id(), basis.n(), basis.m());
    println!("orthonormality error {:.2e}", basis.orthonormality_error());
    println!(
        "tail energy {:.6e} ({:.2e} of total)",
        basis.tail_energy(),
        basis.tail_energy() / total
    );

    let first = basis.eigencontour(0);
    println!(
        "u_1 is nearly constant: min {:.5} max {:.5}",
        first.iter().copied().fold(f64::INFINITY, f64::min),
        first.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    );

    if let Some(path) = out {
        basis.save(Path::new(&path))?;
        println!("wrote {path}");
    }
    Ok(())
}
