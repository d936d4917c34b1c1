//! Compare every lossless evaluator of the signal spectrum s²(Ω) on the
//! sub-cycle sampling preset: the full non-paraxial reference, the
//! laser-paraxial reduction, its Taylor expansion, the plain paraxial
//! form, and the paraxial form with the hard radial cutoff.
//!
//! The full evaluator integrates nested frequency/angle quadratures, so
//! this samples a handful of frequencies rather than a dense grid (the
//! `spectrum` subcommand of the bundled binary writes full grids).
//!
//! Run with: cargo run --release --example spectrum_approximations

use eosvac::constants::omega_from_thz;
use eosvac::signal::{evaluate_point, ExperimentConfig, SignalComponent};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig::riek2015();
    let comps = [
        SignalComponent::Full,
        SignalComponent::LaserParaxial,
        SignalComponent::Taylor,
        SignalComponent::Paraxial,
        SignalComponent::ParaxialCutoff,
    ];

    println!("s²(Ω) per evaluator, and its ratio to the full reference");
    println!("(7 µm crystal, 3 µm waist, 255 THz carrier, 150 THz detection band)\n");
    print!("{:>9}", "f [THz]");
    for c in comps {
        print!(" {:>16}", c.name());
    }
    println!();

    for f in [1.0, 5.0, 20.0, 50.0] {
        let omega = omega_from_thz(f);
        let mut values = Vec::new();
        for c in comps {
            let (v, _err) = evaluate_point(&cfg, c, omega)?;
            values.push(v);
        }
        print!("{f:>9.1}");
        for v in &values {
            print!(" {:>16.6e}", v);
        }
        println!();
        print!("{:>9}", "ratio");
        for v in &values {
            print!(" {:>16.4}", v / values[0]);
        }
        println!("\n");
    }

    println!("The reduced evaluators track the reference at the few-percent");
    println!("level through the band center but drift at the edges: the");
    println!("paraxial forms overshoot at low frequency, where strongly");
    println!("non-collinear vacuum modes still phase-match, and the hard");
    println!("cutoff discards real signal at high frequency.");
    Ok(())
}
