//! Truncated kernel and discrete density estimates, with their default
//! bandwidth and floor schedules.
//!
//! `cargo run --release --example density_estimates`

use privloss::density::{
    default_bandwidth, default_floor, tdde_build, tkde_build, BandwidthMode, Location, Sample, ScheduleMode,
};
use privloss::mechanisms::{Input, LaplaceMechanism, Mechanism, ReportNoisyMax};
use privloss::statcore::{AuditRng, Kernel};

fn main() -> privloss::Result<()> {
    let mut rng = AuditRng::new(7);

    let laplace = LaplaceMechanism::new(1.0)?;
    let xs = laplace.sample(&Input::Scalar(0.0), 20_000, &mut rng)?;
    let h = default_bandwidth(&xs, BandwidthMode::Estimation)?;
    let tau = default_floor(xs.len(), xs.space(), ScheduleMode::Estimation);
    let f = tkde_build(&xs, h, Kernel::gaussian(1)?, tau)?;
    println!("Laplace(1) sample, n = 20000: bandwidth {h:.4}, floor {tau}");
    for t in [-3.0, -1.0, 0.0, 1.0, 3.0, 12.0] {
        let truth = 0.5 * f64::exp(-f64::abs(t));
        println!(
            "  t = {t:>5}: estimate {:.5}, truth {truth:.5}",
            f.eval(&Location::Real(t))?
        );
    }

    let rnm = ReportNoisyMax::new(1.5, 6)?;
    let ys = rnm.sample(&Input::query(&[2, 1, 1, 1, 1, 1]), 20_000, &mut rng)?;
    let g = tdde_build(&ys, 1e-3)?;
    let exact = rnm.probabilities(&[2, 1, 1, 1, 1, 1]);
    println!("\nReport Noisy Max (2,1,1,1,1,1), n = 20000:");
    for (s, p) in rnm.alphabet().unwrap().into_iter().zip(exact) {
        println!(
            "  symbol {s}: frequency {:.4}, exact {p:.4}",
            g.eval(&Location::Symbol(s))?
        );
    }

    let unseen = tdde_build(&Sample::discrete(vec![1, 1, 2])?, 0.01)?;
    println!(
        "\nsymbol never observed evaluates to the floor: {}",
        unseen.eval(&Location::Symbol(9))?
    );
    Ok(())
}
