//! Audits the four sparse vector variants: the private ones stay below
//! their claimed level, the broken ones overshoot it.
//!
//! `cargo run --release --example detect_broken_svt`

use privloss::harness::{run_cdf, AuditConfig, Mode};
use privloss::mechanisms::MechanismKind;

fn main() -> privloss::Result<()> {
    let eps = 0.7;
    for kind in [
        MechanismKind::Svt2,
        MechanismKind::Svt4,
        MechanismKind::Svt5,
        MechanismKind::Svt6,
    ] {
        let mut config = AuditConfig::for_mechanism(kind, eps, Mode::Cdf)?;
        config.repetitions = 5;
        let table = run_cdf(&config)?;
        let verdict = if table.cdf_at(eps) < 0.5 {
            "violates its claim"
        } else {
            "consistent with its claim"
        };
        println!(
            "{:<5} claimed {eps}: median LB {:>8.4}  -> {verdict}",
            table.mechanism,
            table.median()
        );
    }
    Ok(())
}
