//! Runs an experiment from a JSON config, exactly as the command-line tool
//! does, and prints the serialized output.
//!
//! `cargo run --release --example config_driven -- [config.json]`

use privloss::harness::{load_config, parse_config, run};

const DEFAULT: &str = r#"{
  "mechanism": "exponential",
  "epsilon0": 1.5,
  "mode": "loss-profile",
  "n": 20000,
  "grid_points": 21,
  "seed": 8
}"#;

fn main() -> privloss::Result<()> {
    let config = match std::env::args().nth(1) {
        Some(path) => load_config(path.as_ref())?,
        None => parse_config(DEFAULT)?,
    };
    print!("{}", run(&config)?);
    Ok(())
}
