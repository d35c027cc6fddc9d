//! Data-specific estimate for one pair: the empirical loss over the grid
//! next to the analytic loss, and its maximiser.
//!
//! `cargo run --release --example loss_profile`

use privloss::loss::{dpl, EvalGrid};
use privloss::mechanisms::{AdjacentPair, Input, LaplaceMechanism, Mechanism};
use privloss::statcore::AuditRng;

fn main() -> privloss::Result<()> {
    let mech = LaplaceMechanism::new(1.5)?;
    let pair = AdjacentPair::statistics(Input::Scalar(0.0), Input::Scalar(1.0))?;
    let grid = EvalGrid::interval(-1.0, 1.0, 2001)?;
    let profile = dpl(&mech, &pair, 20_000, &grid, &AuditRng::new(3))?;

    println!("{:>6} {:>9} {:>9}", "t", "estimate", "analytic");
    for (i, t) in grid.points().enumerate().step_by(200) {
        let analytic = mech.analytic_loss(&pair.x, &pair.x_prime, &t).unwrap();
        println!("{:>6} {:>9.4} {analytic:>9.4}", t.to_string(), profile.values[i]);
    }
    println!(
        "\nmax empirical loss {:.4} at t = {} (true level {})",
        profile.epsilon_hat,
        profile.t_hat,
        mech.pair_epsilon(&pair.x, &pair.x_prime).unwrap()
    );
    Ok(())
}
