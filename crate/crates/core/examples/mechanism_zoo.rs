//! Lists the mechanism zoo with each mechanism's declared privacy level.
//!
//! `cargo run --release --example mechanism_zoo`

use privloss::mechanisms::{catalog, MechanismKind, MechanismSpec};

fn main() -> privloss::Result<()> {
    for entry in catalog() {
        let params: Vec<_> = entry.params.iter().map(|p| p.name).collect();
        println!(
            "{:<22} {:<26} -> {:<28} params: {}",
            entry.name,
            entry.input,
            entry.output,
            params.join(", ")
        );
    }
    println!();
    for kind in MechanismKind::ALL {
        let mech = MechanismSpec::with_epsilon(kind, 0.7).build()?;
        let level = mech.true_epsilon().map_or("unknown".to_string(), |e| format!("{e:.4}"));
        println!("{:<22} built for 0.7 -> true epsilon {level}", kind.name());
    }
    Ok(())
}
