//! Data-centric audit: the lower bound for the privacy level of one fixed
//! input against its whole neighbourhood.
//!
//! `cargo run --release --example data_centric`

use privloss::harness::{run_data_centric, AuditConfig, Mode};
use privloss::mechanisms::MechanismKind;

fn main() -> privloss::Result<()> {
    let mut config = AuditConfig::for_mechanism(MechanismKind::ReportNoisyMax, 1.5, Mode::DataCentric)?;
    config.repetitions = 10;
    let table = run_data_centric(&config)?;
    println!(
        "{} over {} ({} neighbours), {} runs: median LB {:.4}, max {:.4}, global level 1.5",
        table.mechanism,
        config.pairs.name,
        config.pairs.len(),
        table.repetitions(),
        table.median(),
        table.lbs.last().unwrap()
    );
    Ok(())
}
