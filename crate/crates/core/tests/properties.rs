use bumpflow::analysis::{poincare_check, random_gaussian_case};
use bumpflow::{Cutoff, FarfieldTriple, GasLaw, Mesh, TruncatedProfile, UpstreamProfile, WallShape};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bernoulli_inversion_round_trips(gamma in 1.05f64..4.0, log_s in -3.0f64..3.0, t in 0.0f64..1.0) {
        let gas = GasLaw::new(gamma).unwrap();
        let s = 10f64.powf(log_s);
        let env = gas.envelope(s).unwrap();
        let lo = env.rho_sonic * 1.001;
        let rho = lo + (env.rho_stagnation - lo) * t;
        let m_sq = (2.0 * rho * rho * (s - gas.enthalpy(rho).unwrap())).max(0.0);
        let back = gas.invert_bernoulli(m_sq, s).unwrap();
        prop_assert!(((back - rho) / rho).abs() <= 1e-10);
    }

    #[test]
    fn inversion_decreases_with_momentum(gamma in 1.05f64..4.0, s in 0.1f64..10.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let gas = GasLaw::new(gamma).unwrap();
        let sig2 = gas.sigma(s).unwrap().powi(2);
        let (m1, m2) = (a.min(b) * sig2, a.max(b) * sig2);
        let r1 = gas.invert_bernoulli(m1, s).unwrap();
        let r2 = gas.invert_bernoulli(m2, s).unwrap();
        let env = gas.envelope(s).unwrap();
        prop_assert!(r1 >= r2);
        prop_assert!(r2 >= env.rho_sonic && r1 <= env.rho_stagnation);
    }

    #[test]
    fn supersonic_momentum_rejected(gamma in 1.05f64..4.0, s in 0.1f64..10.0, over in 1e-6f64..1.0) {
        let gas = GasLaw::new(gamma).unwrap();
        let sig2 = gas.sigma(s).unwrap().powi(2);
        prop_assert!(gas.invert_bernoulli(sig2 * (1.0 + over), s).is_err());
    }

    #[test]
    fn cutoff_is_odd_monotone_and_capped(eps in 0.01f64..0.25, x in -2.0f64..2.0, dx in 0.0f64..0.5) {
        let z = Cutoff::from_eps(eps).unwrap();
        prop_assert_eq!(z.eval(-x), -z.eval(x));
        prop_assert!(z.eval(x + dx) >= z.eval(x) - 1e-15);
        prop_assert!(z.eval(x).abs() <= x.abs().min(z.cap()) + 1e-15);
        if x.abs() <= z.t0() {
            prop_assert_eq!(z.eval(x), x);
        }
    }

    #[test]
    fn stream_function_inverts(a in 0.0f64..2.0, p in 1.0f64..3.0, factor in 1.5f64..50.0, l in 3.0f64..12.0, t in 0.0f64..1.0) {
        let profile = UpstreamProfile::convex_decay(1.0, a, p).unwrap();
        let rho0 = factor * GasLaw::new(2.0).unwrap().rho_star(profile.max_speed());
        let tp = TruncatedProfile::new(&profile, rho0, l).unwrap();
        let x = t * l;
        let psi = tp.barpsi(x).unwrap();
        prop_assert!((tp.kappa(psi).unwrap() - x).abs() <= 1e-9 * l);
        prop_assert!((tp.barpsi(l).unwrap() - tp.mass_flux()).abs() <= 1e-12 * tp.mass_flux());
        prop_assert!(tp.u0l(x) > 0.0);
    }

    #[test]
    fn random_gaussian_sums_satisfy_poincare(seed in any::<u64>(), li in 0usize..4) {
        let l = [2.5, 3.0, 4.0, 6.0][li];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = poincare_check(&random_gaussian_case(&mut rng, l)).unwrap();
        prop_assert!(r.holds, "{:?}", r);
    }

    #[test]
    fn mesh_elements_positive(h in 0.05f64..1.5, corner in any::<bool>()) {
        let wall = if corner { WallShape::corner_bump(h).unwrap() } else { WallShape::smooth_bump(h).unwrap() };
        let mesh = Mesh::build(&wall, 4.0, 4.0, 32, 16).unwrap();
        for e in mesh.elements() {
            prop_assert!(e.load.iter().all(|&w| w > 0.0));
            prop_assert!((0..4).all(|a| e.stiffness[a][a] > 0.0));
        }
        let area = mesh.area();
        prop_assert!(area < 8.0 * 4.0 && area > 8.0 * 4.0 - h);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn farfield_shift_bounded_by_wall_height(a in 0.0f64..1.0, factor in 3.0f64..40.0, j in 0.05f64..1.0) {
        let profile = UpstreamProfile::convex_decay(1.0, a, 1.0).unwrap();
        let gas = GasLaw::new(2.0).unwrap();
        let rho0 = factor * gas.rho_star(profile.max_speed());
        let tp = TruncatedProfile::new(&profile, rho0, 8.0).unwrap();
        let triple = FarfieldTriple::solve(&tp, &gas, j).unwrap();
        let r = triple.verify(&tp, &gas);
        prop_assert!(r.rho1 < rho0);
        prop_assert!(r.shift_ok && r.chi_increasing && r.gap_ok && r.subsonic, "{:?}", r);
        prop_assert!(r.bernoulli_residual.max(r.mass_residual) <= 1e-8 * tp.mass_flux());
    }
}
