//! Generates the adjacent-input presets and round-trips one through JSON.
//!
//! `cargo run --release --example pair_patterns`

use privloss::mechanisms::MechanismKind;
use privloss::patterns::{cube_grid_neighborhood, table1_pairs, PairPreset, PatternSet};

fn main() -> privloss::Result<()> {
    let table = table1_pairs(6)?;
    for p in &table.pairs {
        println!("{:>2} {:<24} {} vs {}", p.id, p.name, p.pair.x, p.pair.x_prime);
    }

    let cube = cube_grid_neighborhood(3)?;
    println!("\ncube grid around (1/2,1/2,1/2): {} neighbours", cube.len());

    let svt = PairPreset::SvtPatterns.generate(10, MechanismKind::Svt2)?;
    println!("sparse vector preset at d=10: {} pairs", svt.len());

    let json = table.to_json();
    let back = PatternSet::from_json(&json)?;
    assert_eq!(back.len(), table.len());
    println!("JSON form ({} bytes) reloads with adjacency re-checked", json.len());
    Ok(())
}
