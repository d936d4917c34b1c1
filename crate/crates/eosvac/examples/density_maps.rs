//! Where does the detected vacuum noise come from? Two maps answer that:
//! a transverse (x, y) map of probe filter × field correlation at a fixed
//! frequency, and an axial-spectral (z, Ω) map whose correlation factor
//! oscillates along z with zero crossings spaced by π c / (n(Ω) Ω).
//!
//! Run with: cargo run --release --example density_maps

use eosvac::constants::{omega_from_thz, C};
use eosvac::signal::{density_maps_xy, density_maps_z_omega, linear_grid, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig::riek2015();

    // Transverse map at 300 THz across ±2 waists.
    let omega = omega_from_thz(300.0);
    let xs = linear_grid(-6.0e-6, 6.0e-6, 61);
    let xy = density_maps_xy(&cfg, omega, &xs, &xs)?;
    println!("Transverse density at 300 THz (3 µm waist):");
    println!("  filter peak      = {:.6e}", xy.filter_peak);
    println!("  correlation peak = {:.6e}", xy.correlation_peak);
    println!("  density peak     = {:.6e}", xy.density_peak);
    println!("\n  radial profile along y = 0 (each field normalized to unit peak):");
    let j0 = xs.len() / 2;
    println!("  {:>9} {:>10} {:>12} {:>10}", "x [um]", "filter", "correlation", "density");
    for i in (j0..xs.len()).step_by(3) {
        let k = xy.idx(i, j0);
        println!(
            "  {:>9.2} {:>10.5} {:>12.5} {:>10.5}",
            xs[i] * 1e6,
            xy.filter[k],
            xy.correlation[k],
            xy.density[k]
        );
    }
    println!("  (the filter follows the 3 µm probe beam, while the vacuum");
    println!("   correlation at an optical frequency oscillates and decays on");
    println!("   a sub-micrometre scale — their product localizes the density");
    println!("   tightly around the beam axis)");

    // Axial-spectral map: the correlation oscillates along z, its zero
    // crossings spaced by half the medium wavelength pi*c/(n Omega).
    let zs = linear_grid(0.0, 7.0e-6, 141);
    let oms = linear_grid(omega_from_thz(30.0), omega_from_thz(150.0), 5);
    let zw = density_maps_z_omega(&cfg, &zs, &oms)?;
    println!("\nAxial correlation vs frequency (7 µm crystal):");
    println!(
        "  {:>9} {:>18} {:>18}",
        "f [THz]", "zero spacing [um]", "pi*c/(n*Om) [um]"
    );
    for (j, &w) in oms.iter().enumerate() {
        let col: Vec<f64> = (0..zs.len()).map(|i| zw.correlation[zw.idx(i, j)]).collect();
        let mut crossings = Vec::new();
        for i in 1..col.len() {
            if col[i - 1].signum() != col[i].signum() {
                let t = col[i - 1] / (col[i - 1] - col[i]);
                crossings.push(zs[i - 1] + t * (zs[i] - zs[i - 1]));
            }
        }
        let spacing = if crossings.len() >= 2 {
            let last = crossings.len() - 1;
            (crossings[last] - crossings[last - 1]) * 1e6
        } else {
            f64::NAN
        };
        let n = cfg.thz_index.index(w)?.re;
        let analytic = std::f64::consts::PI * C / (n * w) * 1e6;
        println!(
            "  {:>9.1} {:>18.3} {:>18.3}",
            w / (2.0e12 * std::f64::consts::PI),
            spacing,
            analytic
        );
    }
    println!("  (the spacing approaches the half medium wavelength away from");
    println!("   the source; high frequencies decorrelate within a fraction of");
    println!("   the crystal, which is what limits the sampling bandwidth)");
    Ok(())
}
