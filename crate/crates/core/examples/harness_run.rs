//! Drives the experiment harness from code: loads a config, applies an
//! override (any KEY=VALUE arguments), and runs the residual command into a temporary directory.

use dnls_trains::harness::{run, Command, ExperimentConfig};

fn main() -> dnls_trains::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/family_m8.toml");
    let mut overrides: Vec<String> = std::env::args().skip(1).collect();
    if overrides.is_empty() {
        overrides.push("time.samples=9".into());
    }
    let cfg = ExperimentConfig::load(path.as_ref(), &overrides)?;
    let out = std::env::temp_dir().join("dnls-lab-harness-example");
    let summary = run(Command::Residual, &cfg, &out)?;
    for f in &summary.files {
        println!("wrote {}", f.display());
    }
    let report = std::fs::read_to_string(out.join("report.toml"))?;
    let result = report.split("[result]").nth(1).unwrap_or_default();
    println!("[result]{result}");
    Ok(())
}
