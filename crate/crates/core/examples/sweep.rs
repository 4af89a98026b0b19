//! Seeded positivity sweep driven through the run-configuration layer.

use interwave::cli::{run_config, RunConfig};

fn main() -> interwave::Result<()> {
    let text = include_str!("configs/sweep.toml");
    let cfg = RunConfig::from_toml(text)?;
    let out = std::env::temp_dir().join("interwave_sweep");
    for f in run_config("sweep", &cfg, &out)? {
        println!("{}", f.display());
    }
    println!("{}", std::fs::read_to_string(out.join("sweep.json")).map_err(|e| interwave::Error::Config(e.to_string()))?);
    Ok(())
}
