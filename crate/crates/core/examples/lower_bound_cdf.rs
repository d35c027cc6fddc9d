//! Repeated audits: the empirical distribution of the lower bound and how
//! often it stays below the true level.
//!
//! `cargo run --release --example lower_bound_cdf -- [mechanism] [epsilon0] [repetitions]`

use privloss::harness::{run_cdf, AuditConfig, Mode};
use privloss::mechanisms::MechanismKind;

fn main() -> privloss::Result<()> {
    let mut args = std::env::args().skip(1);
    let kind = MechanismKind::from_name(&args.next().unwrap_or_else(|| "report_noisy_max".into()))?;
    let eps: f64 = args
        .next()
        .map_or(0.7, |s| s.parse().expect("epsilon0 must be a number"));
    let reps: usize = args
        .next()
        .map_or(50, |s| s.parse().expect("repetitions must be an integer"));

    let mut config = AuditConfig::for_mechanism(kind, eps, Mode::Cdf)?;
    config.repetitions = reps;
    let table = run_cdf(&config)?;
    for q in [0.05, 0.25, 0.5, 0.75, 0.95] {
        let i = ((q * reps as f64).ceil() as usize).clamp(1, reps) - 1;
        println!("quantile {q:<4}: {:.4}", table.lbs[i]);
    }
    println!("P(LB <= {eps}) = {:.3} over {reps} audits", table.cdf_at(eps));
    Ok(())
}
