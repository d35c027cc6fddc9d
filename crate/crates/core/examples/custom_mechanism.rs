//! Auditing a user-supplied black box: implement `Mechanism::sample` and
//! hand it to the two-stage procedure. Here a noisy mean whose noise is
//! scaled for the wrong sensitivity, so it leaks twice its claimed level.
//!
//! `cargo run --release --example custom_mechanism`

use privloss::density::{Sample, SpaceTag};
use privloss::loss::EvalGrid;
use privloss::mechanisms::{Input, Mechanism};
use privloss::mpl::{mpl, MplSettings};
use privloss::patterns::shift_pairs;
use privloss::statcore::{sample_laplace, AuditRng};

/// Releases `2·s + Lap(1/ε)` while claiming `ε`-privacy for `s ∈ [0, 1]`.
struct DoubledQuery {
    epsilon: f64,
}

impl Mechanism for DoubledQuery {
    fn name(&self) -> &str {
        "doubled_query"
    }

    fn output_space(&self) -> SpaceTag {
        SpaceTag::Continuous { dim: 1 }
    }

    fn sample(&self, input: &Input, n: usize, rng: &mut AuditRng) -> privloss::Result<Sample> {
        let s = input.as_scalar()?;
        let draws = (0..n)
            .map(|_| sample_laplace(1.0 / self.epsilon, rng).map(|z| 2.0 * s + z))
            .collect::<privloss::Result<Vec<_>>>()?;
        Sample::scalar(draws)
    }
}

fn main() -> privloss::Result<()> {
    let mech = DoubledQuery { epsilon: 0.5 };
    let pairs = shift_pairs("shifts", &[0.0], 0.25, 4)?;
    let grid = EvalGrid::interval(-1.0, 3.0, 2001)?;
    let report = mpl(
        &mech,
        &pairs,
        20_000,
        50_000,
        &grid,
        0.05,
        &MplSettings::default(),
        &AuditRng::new(5),
    )?;
    println!(
        "claimed 0.5, lower bound {:.4} from pair {} at t = {}",
        report.lb, report.pairs[report.selected].name, report.t_hat_max
    );
    if report.lb > mech.epsilon {
        println!("the claim is refuted at the 95% level");
    }
    Ok(())
}
