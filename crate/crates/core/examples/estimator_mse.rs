//! Mean squared error of the data-specific estimate against the analytic
//! level, across sample sizes.
//!
//! `cargo run --release --example estimator_mse`

use privloss::harness::{run_mse, AuditConfig, Mode};
use privloss::mechanisms::MechanismKind;

fn main() -> privloss::Result<()> {
    for kind in [MechanismKind::Laplace, MechanismKind::ContinuousNoisyMax] {
        let mut config = AuditConfig::for_mechanism(kind, 1.5, Mode::Mse)?;
        config.repetitions = 20;
        config.n_list = vec![1_000, 5_000, 20_000];
        let table = run_mse(&config)?;
        println!(
            "{} pair {} (true level {}):",
            table.mechanism, table.pair, table.true_epsilon
        );
        for row in &table.rows {
            println!(
                "  n = {:>6}: MSE {:.4}  RMSE {:.4}  mean |error| {:.4}",
                row.n, row.mse, row.rmse, row.mean_abs_error
            );
        }
    }
    Ok(())
}
