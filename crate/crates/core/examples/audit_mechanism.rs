//! Full two-stage audit of a zoo mechanism with its default preset: the
//! per-pair first-stage table, the selected pair and the lower bound.
//!
//! `cargo run --release --example audit_mechanism -- [mechanism] [epsilon0]`

use privloss::harness::{run_audit, AuditConfig, Mode};
use privloss::mechanisms::MechanismKind;

fn main() -> privloss::Result<()> {
    let mut args = std::env::args().skip(1);
    let kind = MechanismKind::from_name(&args.next().unwrap_or_else(|| "laplace".into()))?;
    let eps: f64 = args
        .next()
        .map_or(1.5, |s| s.parse().expect("epsilon0 must be a number"));

    let config = AuditConfig::for_mechanism(kind, eps, Mode::Audit)?;
    let report = run_audit(&config)?;
    println!(
        "{} at epsilon0 = {eps}: n = {}, N = {}",
        report.mechanism, report.n, report.big_n
    );
    for p in &report.pairs {
        let mark = if p.pair_id == report.pairs[report.selected].pair_id {
            "*"
        } else {
            " "
        };
        println!("{mark} {:<24} estimate {:.4} at t = {}", p.name, p.epsilon_hat, p.t_hat);
    }
    println!(
        "\nsecond stage at t = {}: loss {:.4}, sigma {:.3}, c_N {:.2}\nlower bound (alpha = {}): {:.4}",
        report.t_hat_max, report.loss_star, report.sigma_hat, report.c_n, report.alpha, report.lb
    );
    Ok(())
}
