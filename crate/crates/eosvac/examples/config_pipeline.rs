//! Drive the same pipeline the `eosvac` binary runs, from Rust: resolve a
//! layered configuration (preset → config file → overrides), run one
//! command, and inspect the deterministic CSV it writes. Useful as a
//! template for embedding the tool in batch jobs.
//!
//! Run with: cargo run --release --example config_pipeline

use eosvac::config::RunConfig;
use eosvac::run::cmd_variance;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // A config file that starts from a preset and tweaks it. On disk this
    // would be `eosvac variance --config my.cfg`.
    let dir = std::env::temp_dir().join("eosvac-config-pipeline");
    std::fs::create_dir_all(&dir)?;
    let cfg_path = dir.join("my.cfg");
    std::fs::write(
        &cfg_path,
        "preset = riek2015\n\
         \n\
         # double the preset crystal length\n\
         [crystal]\n\
         length_um = 14.0\n\
         \n\
         [components]\n\
         list = paraxial, paraxial-cutoff\n",
    )?;

    // --set overrides beat the file; the output dir goes to a temp path.
    let sets = vec![format!("output.dir={}", dir.join("out").display())];
    let rc = RunConfig::load(Some(&cfg_path), None, &sets)?;

    println!("Resolved configuration (preset keys after layering):");
    for (k, v) in rc.effective_keys() {
        if k.starts_with("crystal.") || k.starts_with("components.") {
            println!("  {k} = {v}");
        }
    }

    let out = cmd_variance(&rc)?;
    for note in &out.notes {
        println!("{note}");
    }
    for file in &out.files {
        println!("\nwrote {}:", file.display());
        let text = std::fs::read_to_string(file)?;
        for line in text.lines().filter(|l| !l.starts_with('#')) {
            println!("  {line}");
        }
        let header_lines = text.lines().filter(|l| l.starts_with('#')).count();
        println!("  ({header_lines} header lines record the full configuration)");
    }
    Ok(())
}
