//! How the detected vacuum variance depends on the probe duration Δt.
//! Each duration maps to a rectangular detection band Δω = 2π/Δt around
//! the carrier; shorter probes admit more vacuum modes. On a lossless
//! crystal the noise is purely transverse; on an absorbing crystal at
//! room temperature the longitudinal (phonon-like) modes contribute a
//! small extra share fed by the LO resonance and the thermal tail.
//!
//! Run with: cargo run --release --example duration_sweep

use eosvac::signal::{duration_sweep, DurationMapping, ExperimentConfig};

fn show(points: &[eosvac::signal::DurationPoint]) {
    println!(
        "{:>10} {:>14} {:>14} {:>14} {:>9}",
        "dt [fs]", "total", "transverse", "longitudinal", "lon/total"
    );
    for p in points {
        println!(
            "{:>10.1} {:>14.6e} {:>14.6e} {:>14.6e} {:>9.2e}",
            p.delta_t * 1e15,
            p.variance_total,
            p.variance_transverse,
            p.variance_longitudinal,
            p.variance_longitudinal / p.variance_total
        );
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let durations: Vec<f64> = [10.0, 20.0, 40.0, 80.0, 160.0, 320.0]
        .iter()
        .map(|fs| fs * 1e-15)
        .collect();

    println!("Lossless sub-cycle configuration (7 µm crystal, T = 0):");
    let lossless = ExperimentConfig::riek2015();
    show(&duration_sweep(&lossless, &durations, DurationMapping::InverseDuration)?);
    println!("(no absorption, so no longitudinal modes at all; the variance");
    println!(" falls steeply as longer probes close the detection band)\n");

    println!("Absorbing thermal configuration (3 mm crystal, T = 300 K):");
    let lossy = ExperimentConfig::benea2019();
    show(&duration_sweep(&lossy, &durations, DurationMapping::InverseDuration)?);
    println!("(with damping on, the longitudinal modes contribute a small");
    println!(" share fed by the LO resonance near 6.18 THz and by the thermal");
    println!(" low-frequency tail; the detection band's triangular spectral");
    println!(" weight suppresses both, so the share stays well below 1e-4 and");
    println!(" dips where the band edge grazes the resonance)");
    Ok(())
}
