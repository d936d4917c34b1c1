//! Synthesize the delay-scan observable S²(δt) from a model spectrum by a
//! cosine transform, invert the scan back to a spectrum on the conjugate
//! frequency grid, and compare the roundtrip against direct evaluation.
//! This is the numerical core of extracting spectra from measured scans:
//! the inversion never sees the model, only the synthesized samples.
//!
//! Run with: cargo run --release --example delay_scan_roundtrip

use eosvac::constants::thz_from_omega;
use eosvac::scan::{spectrum_from_delay_scan, synthesize_delay_scan};
use eosvac::signal::{
    evaluate_point, evaluate_spectrum, linear_grid, log_grid, ExperimentConfig, SignalComponent,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig::benea2019();
    let omegas = log_grid(
        eosvac::constants::omega_from_thz(0.1),
        eosvac::constants::omega_from_thz(6.0),
        256,
    );
    let spectrum = evaluate_spectrum(&cfg, SignalComponent::Absorptive, &omegas)?;

    // ±1 ps covers the ~THz structure of the thermal spectrum.
    let delays = linear_grid(-1.0e-12, 1.0e-12, 401);
    let scan = synthesize_delay_scan(&spectrum, &delays)?;
    println!("Synthesized scan: {} delays, step {:.2} fs", scan.delays.len(), scan.dt_step * 1e15);
    println!(
        "zero-delay S² = {:.6e} (the integrated spectrum)",
        scan.values[scan.delays.len() / 2]
    );
    for (d_fs, label) in [(0.0, "center"), (250.0, ""), (500.0, ""), (1000.0, "edge")] {
        let i = scan
            .delays
            .iter()
            .position(|&d| (d * 1e15 - d_fs).abs() < 1e-6)
            .unwrap();
        println!("  S²({:>6.0} fs) = {:>13.6e} {label}", d_fs, scan.values[i]);
    }

    let inverted = spectrum_from_delay_scan(&scan)?;
    println!(
        "\nInverted back onto {} conjugate frequency bins (0 to {:.2} THz):",
        inverted.omegas.len(),
        thz_from_omega(*inverted.omegas.last().unwrap())
    );
    for w in &inverted.warnings {
        println!("  note: {w}");
    }

    // Compare against direct model evaluation inside the synthesis band.
    let (lo, hi) = (omegas[0], *omegas.last().unwrap());
    let mut peak = 0.0f64;
    let mut worst = (0.0f64, 0.0f64);
    println!(
        "{:>9} {:>14} {:>14} {:>12}",
        "f [THz]", "inverted", "direct", "resid/peak"
    );
    let direct: Vec<f64> = inverted
        .omegas
        .iter()
        .map(|&w| {
            if w < lo || w > hi {
                Ok(0.0)
            } else {
                evaluate_point(&cfg, SignalComponent::Absorptive, w).map(|(v, _)| v)
            }
        })
        .collect::<Result<_, _>>()?;
    for &d in &direct {
        peak = peak.max(d.abs());
    }
    for (i, &w) in inverted.omegas.iter().enumerate() {
        if w < lo || w > hi {
            continue;
        }
        let resid = (inverted.values[i] - direct[i]).abs() / peak;
        if resid > worst.1 {
            worst = (w, resid);
        }
        println!(
            "{:>9.3} {:>14.6e} {:>14.6e} {:>12.3e}",
            thz_from_omega(w),
            inverted.values[i],
            direct[i],
            resid
        );
    }
    println!(
        "\nworst roundtrip residual inside the band: {:.3e} of the peak, at {:.3} THz",
        worst.1,
        thz_from_omega(worst.0)
    );
    println!("\nThe residual here is truncation leakage, not inversion error:");
    println!("thermal noise at sub-THz frequencies decorrelates slowly, so a");
    println!("±1 ps window clips the scan while it is still a few percent of");
    println!("its peak (hence the warning above). For scans that decay inside");
    println!("the window the same inversion recovers interior points to better");
    println!("than 1e-4 of the peak.");
    Ok(())
}
