//! The thermal, absorptive preset: a 3 mm crystal at room temperature
//! probed by an 80 fs pulse. The mode-summed spectrum splits exactly into
//! a "first" part (modes that arrive from outside the interaction volume)
//! and a "second" part (modes sourced inside it); the second part carries
//! almost all of the detected noise for thick crystals. Separately, the
//! same total splits by polarization into transverse and longitudinal
//! shares, the latter peaking sharply at the LO phonon frequency where
//! the permittivity crosses zero.
//!
//! Run with: cargo run --release --example absorptive_split

use eosvac::constants::omega_from_thz;
use eosvac::signal::{evaluate_point, ExperimentConfig, SignalComponent};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig::benea2019();

    println!("Mode-origin split of s²(Ω) (3 mm ZnTe, 300 K, 80 fs probe):");
    println!(
        "{:>9} {:>14} {:>14} {:>14} {:>9}",
        "f [THz]", "total", "first", "second", "2nd/total"
    );
    for f in [0.5, 1.0, 1.5, 2.0, 2.5, 3.0] {
        let omega = omega_from_thz(f);
        let (total, _) = evaluate_point(&cfg, SignalComponent::Absorptive, omega)?;
        let (first, _) = evaluate_point(&cfg, SignalComponent::AbsorptiveFirst, omega)?;
        let (second, _) = evaluate_point(&cfg, SignalComponent::AbsorptiveSecond, omega)?;
        println!(
            "{f:>9.1} {total:>14.6e} {first:>14.6e} {second:>14.6e} {:>9.5}",
            second / total
        );
    }

    println!("\nPolarization split near the LO resonance (6.18 THz):");
    println!(
        "{:>9} {:>14} {:>14} {:>14} {:>9}",
        "f [THz]", "total", "transverse", "longitudinal", "lon/total"
    );
    for f in [2.0, 5.0, 6.17, 6.18, 6.19, 6.5] {
        let omega = omega_from_thz(f);
        let (total, _) = evaluate_point(&cfg, SignalComponent::Absorptive, omega)?;
        let (lon, _) = evaluate_point(&cfg, SignalComponent::Longitudinal, omega)?;
        let (tr, _) = evaluate_point(&cfg, SignalComponent::Transverse, omega)?;
        println!(
            "{f:>9.2} {total:>14.6e} {tr:>14.6e} {lon:>14.6e} {:>9.5}",
            lon / total
        );
    }
    println!("\nAway from the resonance the longitudinal share is negligible;");
    println!("exactly at the zero of Re ε it spikes by orders of magnitude,");
    println!("with a half width set by the phonon damping.");
    Ok(())
}
