//! Asymptotic lower confidence bound for the loss at a single point, from
//! two large samples with a shared undersmoothed bandwidth.
//!
//! `cargo run --release --example pointwise_interval`

use privloss::density::{tkde_build, BandwidthMode, BandwidthRule, Location};
use privloss::mechanisms::{Input, LaplaceMechanism, Mechanism};
use privloss::mpl::{nu, pointwise_ci};
use privloss::statcore::{AuditRng, Kernel};

fn main() -> privloss::Result<()> {
    let mech = LaplaceMechanism::new(1.0)?;
    let (n, big_n) = (20_000, 50_000);
    let rng = AuditRng::new(11);
    let xs = mech.sample(&Input::Scalar(0.0), big_n, &mut rng.split(0))?;
    let ys = mech.sample(&Input::Scalar(1.0), big_n, &mut rng.split(1))?;
    let mode = BandwidthMode::Inference {
        nu: nu(n, big_n),
        gamma: 0.02,
    };
    let h = BandwidthRule::default().pooled(&[&xs, &ys], mode)?;
    let k = Kernel::gaussian(1)?;
    let fx = tkde_build(&xs, h, k, 0.0)?;
    let fy = tkde_build(&ys, h, k, 0.0)?;

    let t = Location::Real(-0.5);
    for alpha in [0.01, 0.05, 0.25] {
        let ci = pointwise_ci(&fx, &fy, &t, alpha)?;
        println!(
            "alpha {alpha:<5} loss {:.4}  sigma {:.3}  c_N {:.2}  lower bound {:.4}",
            ci.loss, ci.sigma_hat, ci.c_n, ci.lb
        );
    }
    println!(
        "true loss at t = -0.5: {}",
        mech.analytic_loss(&Input::Scalar(0.0), &Input::Scalar(1.0), &t)
            .unwrap()
    );
    Ok(())
}
