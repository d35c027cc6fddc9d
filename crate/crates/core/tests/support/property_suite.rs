use proptest::prelude::*;

use privloss::density::{tdde_build, tkde_build, Location, Sample};
use privloss::harness::CdfTable;
use privloss::loss::{dpl_with_streams, empirical_loss_at, loss_profile, EstimationSettings, EvalGrid};
use privloss::mechanisms::{
    AdjacentPair, Input, LaplaceMechanism, Mechanism, MechanismKind, MechanismSpec, ReportNoisyMax,
};
use privloss::mpl::{ci_from_values, mpl, mpl_with_streams, AuditReport, MplSettings};
use privloss::patterns::{
    binary_neighborhood, cube_grid_neighborhood, shift_pairs, staircase_pairs, table1_pairs, PairPreset, PatternSet,
};
use privloss::statcore::{std_normal_cdf, std_normal_quantile, AuditRng, Kernel};

fn gaussian_sample(seed: u64, n: usize, spread: f64) -> Sample {
    let mut rng = AuditRng::new(seed);
    let v = (0..n)
        .map(|_| privloss::statcore::sample_gaussian(0.0, spread, &mut rng).unwrap())
        .collect();
    Sample::scalar(v).unwrap()
}

fn trapezoid(f: impl Fn(f64) -> f64, lo: f64, hi: f64, m: usize) -> f64 {
    let h = (hi - lo) / m as f64;
    let inner: f64 = (1..m).map(|i| f(lo + i as f64 * h)).sum();
    h * (inner + 0.5 * (f(lo) + f(hi)))
}

fn small_audit(mech: &dyn Mechanism, pairs: &PatternSet, grid: &EvalGrid, alpha: f64, seed: u64) -> AuditReport {
    mpl(
        mech,
        pairs,
        2_000,
        4_000,
        grid,
        alpha,
        &MplSettings::default(),
        &AuditRng::new(seed),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn quantile_inverts_cdf(x in -4.0f64..4.0) {
        prop_assert!((std_normal_quantile(std_normal_cdf(x)).unwrap() - x).abs() < 1e-6);
    }

    #[test]
    fn kernel_decreases_along_rays(dir in prop::collection::vec(-1.0f64..1.0, 2), r in 0.0f64..5.0, dr in 0.01f64..2.0) {
        let k = Kernel::gaussian(2).unwrap();
        let at = |s: f64| k.eval(&[dir[0] * s, dir[1] * s]).unwrap();
        prop_assert!(at(r) >= 0.0);
        prop_assert!(at(r + dr) <= at(r));
    }

    #[test]
    fn distinct_split_keys_diverge(seed in any::<u64>(), a in any::<u64>(), b in any::<u64>()) {
        prop_assume!(a != b);
        let root = AuditRng::new(seed);
        let (mut x, mut y) = (root.split(a), root.split(b));
        let same = (0..10_000).filter(|_| x.open_unit() == y.open_unit()).count();
        prop_assert!(same < 10_000);
    }

    #[test]
    fn kde_integrates_to_one(seed in any::<u64>(), n in 20usize..400, spread in 0.2f64..3.0, h in 0.05f64..1.0) {
        let s = gaussian_sample(seed, n, spread);
        let f = tkde_build(&s, h, Kernel::gaussian(1).unwrap(), 0.0).unwrap();
        let reach = 10.0 * spread + 15.0 * h;
        let mass = trapezoid(|t| f.raw(&Location::Real(t)).unwrap(), -reach, reach, 20_000);
        prop_assert!((mass - 1.0).abs() < 1e-3, "mass {mass}");
    }

    #[test]
    fn frequencies_sum_to_one(values in prop::collection::vec(0u64..12, 1..300), tau in 0.0f64..0.2) {
        let s = Sample::discrete(values.clone()).unwrap();
        let f = tdde_build(&s, tau).unwrap();
        let privloss::density::DensityEstimate::Discrete(d) = &f else { unreachable!() };
        let total: u64 = d.counts().iter().map(|&(_, c)| c).sum();
        prop_assert_eq!(total as usize, values.len());
        let sum: f64 = d.counts().iter().map(|&(s, _)| d.frequency(s)).sum();
        prop_assert!((sum - 1.0).abs() < 1e-12);
        for sym in 0u64..14 {
            let at = Location::Symbol(sym);
            let raw = f.raw(&at).unwrap();
            prop_assert_eq!(f.eval(&at).unwrap(), raw.max(tau));
            prop_assert!(f.eval(&at).unwrap() >= raw);
            if tau > 0.0 {
                prop_assert!(f.eval(&at).unwrap() >= tau);
            }
        }
    }

    #[test]
    fn kde_floor_and_permutation(seed in any::<u64>(), tau in 0.0f64..0.1, t in -8.0f64..8.0) {
        let s = gaussian_sample(seed, 200, 1.0);
        let k = Kernel::gaussian(1).unwrap();
        let f = tkde_build(&s, 0.3, k, tau).unwrap();
        let at = Location::Real(t);
        prop_assert_eq!(f.eval(&at).unwrap(), f.raw(&at).unwrap().max(tau));
        prop_assert!(f.eval(&at).unwrap() >= tau);
        let Sample::Continuous { values, .. } = &s else { unreachable!() };
        let mut rev = values.clone();
        rev.reverse();
        let g = tkde_build(&Sample::scalar(rev).unwrap(), 0.3, k, tau).unwrap();
        let (a, b) = (f.raw(&at).unwrap(), g.raw(&at).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
    }

    #[test]
    fn loss_is_symmetric_under_swap(seed in any::<u64>(), shift in 0.1f64..1.0) {
        let mech = LaplaceMechanism::new(1.0).unwrap();
        let pair = AdjacentPair::statistics(Input::Scalar(0.0), Input::Scalar(shift)).unwrap();
        let grid = EvalGrid::interval(-1.0, 1.0, 201).unwrap();
        let st = EstimationSettings::default();
        let root = AuditRng::new(seed);
        let p = dpl_with_streams(&mech, &pair, 500, &grid, &st, &mut root.split(0), &mut root.split(1)).unwrap();
        let q = dpl_with_streams(&mech, &pair.swapped(), 500, &grid, &st, &mut root.split(1), &mut root.split(0)).unwrap();
        prop_assert_eq!(&p.values, &q.values);
        prop_assert_eq!(p.argmax, q.argmax);
        prop_assert_eq!(p.epsilon_hat, q.epsilon_hat);
    }

    #[test]
    fn discrete_loss_is_symmetric_under_swap(seed in any::<u64>()) {
        let mech = ReportNoisyMax::new(1.5, 6).unwrap();
        let pair = AdjacentPair::queries(&[1, 1, 1, 1, 1, 1], &[2, 0, 0, 0, 0, 0]).unwrap();
        let grid = EvalGrid::symbols(mech.alphabet().unwrap()).unwrap();
        let st = EstimationSettings::default();
        let root = AuditRng::new(seed);
        let p = dpl_with_streams(&mech, &pair, 300, &grid, &st, &mut root.split(0), &mut root.split(1)).unwrap();
        let q = dpl_with_streams(&mech, &pair.swapped(), 300, &grid, &st, &mut root.split(1), &mut root.split(0)).unwrap();
        prop_assert_eq!(&p.values, &q.values);
        prop_assert_eq!(p.t_hat, q.t_hat);
    }

    #[test]
    fn profile_values_are_consistent(seed in any::<u64>()) {
        let a = gaussian_sample(seed, 300, 1.0);
        let b = gaussian_sample(seed ^ 0x9e37, 300, 1.3);
        let k = Kernel::gaussian(1).unwrap();
        let fa = tkde_build(&a, 0.25, k, 1e-3).unwrap();
        let fb = tkde_build(&b, 0.3, k, 1e-3).unwrap();
        let grid = EvalGrid::interval(-1.0, 1.0, 101).unwrap();
        let p = loss_profile(&fa, &fb, &grid).unwrap();
        prop_assert!(p.values.iter().all(|&v| v >= 0.0));
        prop_assert_eq!(p.epsilon_hat, p.values.iter().cloned().fold(0.0, f64::max));
        prop_assert_eq!(p.values[p.argmax], p.epsilon_hat);
        prop_assert!(p.values[..p.argmax].iter().all(|&v| v < p.epsilon_hat));
        for (i, t) in grid.points().enumerate().step_by(10) {
            let direct = empirical_loss_at(&fa, &fb, &t).unwrap();
            prop_assert!((direct - p.values[i]).abs() < 1e-9, "{direct} vs {}", p.values[i]);
        }
    }

    #[test]
    fn argmax_ties_go_to_the_first_point(xs in prop::collection::vec(0u64..4, 50..200), ys in prop::collection::vec(2u64..8, 50..200)) {
        // a floor above every frequency makes the whole profile flat
        let fx = tdde_build(&Sample::discrete(xs).unwrap(), 1.0).unwrap();
        let fy = tdde_build(&Sample::discrete(ys).unwrap(), 1.0).unwrap();
        let grid = EvalGrid::symbols((0..8).collect()).unwrap();
        let p = loss_profile(&fx, &fy, &grid).unwrap();
        prop_assert_eq!(p.argmax, 0);
        prop_assert_eq!(p.t_hat, Location::Symbol(0));
    }

    #[test]
    fn enlarging_the_grid_never_lowers_the_estimate(seed in any::<u64>(), g in 3usize..200) {
        let a = gaussian_sample(seed, 300, 1.0);
        let b = gaussian_sample(seed.wrapping_add(1), 300, 1.0);
        let k = Kernel::gaussian(1).unwrap();
        let fa = tkde_build(&a, 0.3, k, 1e-3).unwrap();
        let fb = tkde_build(&b, 0.3, k, 1e-3).unwrap();
        // 2g-1 points on the same interval contain every point of the g grid
        let coarse = loss_profile(&fa, &fb, &EvalGrid::interval(-1.0, 1.0, g).unwrap()).unwrap();
        let fine = loss_profile(&fa, &fb, &EvalGrid::interval(-1.0, 1.0, 2 * g - 1).unwrap()).unwrap();
        prop_assert!(fine.epsilon_hat >= coarse.epsilon_hat - 1e-12);
    }

    #[test]
    fn enlarging_the_alphabet_never_lowers_the_estimate(xs in prop::collection::vec(0u64..10, 20..200), ys in prop::collection::vec(0u64..10, 20..200), cut in 1u64..10) {
        let fx = tdde_build(&Sample::discrete(xs).unwrap(), 1e-3).unwrap();
        let fy = tdde_build(&Sample::discrete(ys).unwrap(), 1e-3).unwrap();
        let small = loss_profile(&fx, &fy, &EvalGrid::symbols((0..cut).collect()).unwrap()).unwrap();
        let big = loss_profile(&fx, &fy, &EvalGrid::symbols((0..10).collect()).unwrap()).unwrap();
        prop_assert!(big.epsilon_hat >= small.epsilon_hat);
    }

    #[test]
    fn ci_is_monotone_in_alpha(fx in 0.01f64..0.9, fy in 0.01f64..0.9, a1 in 0.001f64..0.49, gap in 0.001f64..0.5) {
        let a2 = (a1 + gap).min(0.999);
        prop_assume!(fx != fy);
        let lo = ci_from_values(fx, fy, 10_000, None, privloss::density::SpaceTag::Discrete, a1).unwrap();
        let hi = ci_from_values(fx, fy, 10_000, None, privloss::density::SpaceTag::Discrete, a2).unwrap();
        prop_assert!(lo.lb < hi.lb);
        prop_assert!(lo.lb < lo.loss);
    }

    #[test]
    fn cdf_levels_are_i_over_r(lbs in prop::collection::vec(prop_oneof![Just(0.5), -1.0f64..2.0], 1..60)) {
        let reports: Vec<AuditReport> = lbs.iter().map(|&lb| fake_report(lb)).collect();
        let t = CdfTable::from_reports("x", reports, None, None, 0.05);
        let r = lbs.len();
        for (i, &level) in t.levels.iter().enumerate() {
            prop_assert_eq!(level, (i + 1) as f64 / r as f64);
        }
        prop_assert!(t.lbs.windows(2).all(|w| w[0] <= w[1]));
        let mut sorted = lbs.clone();
        sorted.sort_by(f64::total_cmp);
        prop_assert_eq!(t.lbs, sorted);
    }

    #[test]
    fn table1_and_staircases_are_adjacent(d in 2usize..24) {
        for set in [table1_pairs(d).unwrap(), staircase_pairs(d).unwrap()] {
            for p in &set.pairs {
                prop_assert!(p.pair.is_adjacent().unwrap(), "{} {}", set.name, p.name);
            }
        }
    }

    #[test]
    fn neighbourhoods_are_adjacent(d in 1usize..10, k in 1usize..5) {
        for set in [binary_neighborhood(d).unwrap(), cube_grid_neighborhood(k).unwrap()] {
            for p in &set.pairs {
                prop_assert!(p.pair.is_adjacent().unwrap());
                prop_assert!(p.pair.x != p.pair.x_prime);
            }
        }
        prop_assert_eq!(binary_neighborhood(d).unwrap().len(), (1 << d) - 1);
        prop_assert_eq!(cube_grid_neighborhood(k).unwrap().len(), 3usize.pow(k as u32) - 1);
    }

    #[test]
    fn shift_pairs_are_adjacent(base in prop::collection::vec(-2.0f64..2.0, 1..4), count in 1usize..12) {
        let set = shift_pairs("s", &base, 1.0 / count as f64, count).unwrap();
        prop_assert_eq!(set.len(), count);
        for p in &set.pairs {
            prop_assert!(p.pair.is_adjacent().unwrap());
        }
    }

    #[test]
    fn mechanism_outputs_stay_in_space(seed in any::<u64>(), eps in 0.1f64..2.0) {
        for kind in MechanismKind::ALL {
            let spec = MechanismSpec::with_epsilon(kind, eps);
            let m = spec.build().unwrap();
            let set = PairPreset::default_for(kind).generate(spec.input_len(), kind).unwrap();
            let x = &set.pairs[0].pair.x;
            let a = m.sample(x, 50, &mut AuditRng::new(seed)).unwrap();
            let b = m.sample(x, 50, &mut AuditRng::new(seed)).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(a.space(), m.output_space());
            if let (Some(alpha), Sample::Discrete(v)) = (m.alphabet(), &a) {
                prop_assert!(v.iter().all(|s| alpha.contains(s)), "{}", m.name());
            }
        }
    }
}

fn fake_report(lb: f64) -> AuditReport {
    AuditReport {
        mechanism: "x".into(),
        pairs: vec![],
        selected: 0,
        x_max: Input::Scalar(0.0),
        x_prime_max: Input::Scalar(0.0),
        t_hat_max: Location::Real(0.0),
        epsilon_hat_max: 0.0,
        f_x_star: 0.0,
        f_x_prime_star: 0.0,
        loss_star: 0.0,
        sigma_hat: 0.0,
        c_n: 0.0,
        alpha: 0.05,
        lb,
        bandwidth_max: None,
        unstable_location: false,
        n: 0,
        big_n: 0,
        seed: 0,
        runtime_ms: 0,
        config: serde_json::Value::Null,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn audit_bound_is_monotone_in_alpha(seed in any::<u64>(), a1 in 0.01f64..0.3, gap in 0.01f64..0.2) {
        let mech = LaplaceMechanism::new(1.0).unwrap();
        let pairs = shift_pairs("laplace", &[0.0], 0.5, 2).unwrap();
        let grid = EvalGrid::interval(-1.0, 1.0, 201).unwrap();
        let lo = small_audit(&mech, &pairs, &grid, a1, seed);
        let hi = small_audit(&mech, &pairs, &grid, a1 + gap, seed);
        prop_assert_eq!(lo.t_hat_max, hi.t_hat_max);
        prop_assert!(lo.lb < hi.lb);
    }

    #[test]
    fn report_fields_satisfy_the_bound_identity(seed in any::<u64>(), alpha in 0.01f64..0.49) {
        let mech = ReportNoisyMax::new(1.0, 6).unwrap();
        let pairs = table1_pairs(6).unwrap();
        let grid = EvalGrid::symbols(mech.alphabet().unwrap()).unwrap();
        let r = small_audit(&mech, &pairs, &grid, alpha, seed);
        let z = std_normal_quantile(alpha).unwrap();
        prop_assert!((r.lb - (r.loss_star + z * r.sigma_hat / r.c_n)).abs() < 1e-12);
        prop_assert!(r.lb < r.loss_star);
        let best = r.pairs.iter().map(|p| p.epsilon_hat).fold(f64::MIN, f64::max);
        prop_assert_eq!(r.pairs[r.selected].epsilon_hat, best);
        prop_assert!(r.pairs[..r.selected].iter().all(|p| p.epsilon_hat < best));
    }

    #[test]
    fn stage_two_stream_leaves_stage_one_alone(seed in any::<u64>(), other in any::<u64>()) {
        prop_assume!(seed != other);
        let mech = LaplaceMechanism::new(0.7).unwrap();
        let pairs = shift_pairs("laplace", &[0.0], 0.25, 4).unwrap();
        let grid = EvalGrid::interval(-1.0, 1.0, 201).unwrap();
        let s1 = AuditRng::new(seed).split(1);
        let st = MplSettings::default();
        let a = mpl_with_streams(&mech, &pairs, 2_000, 4_000, &grid, 0.05, &st, &s1, &AuditRng::new(seed).split(2)).unwrap();
        let b = mpl_with_streams(&mech, &pairs, 2_000, 4_000, &grid, 0.05, &st, &s1, &AuditRng::new(other)).unwrap();
        prop_assert_eq!(&a.pairs, &b.pairs);
        prop_assert_eq!(a.t_hat_max, b.t_hat_max);
        prop_assert_eq!(a.selected, b.selected);
        prop_assert!(a.f_x_star != b.f_x_star);
    }
}
