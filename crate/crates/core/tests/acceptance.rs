//! Acceptance suite. Each test prints one `[PASS]`/`[FAIL]` line before asserting.

use std::sync::{Arc, OnceLock};
use std::time::Instant;

use bumpflow::analysis::{
    bernoulli_roundtrip, grid_convergence, poincare_batch, poincare_check, random_gaussian_case, PoincareCase,
    Reference,
};
use bumpflow::continuation::{geometric_grid, locate_critical, scan, CriticalAlternative};
use bumpflow::diagnostics::{
    bernoulli_identity, default_seeds, energy_norms, farfield_decay, positivity_and_kutta, primitives,
    trace_streamline, vorticity_check, PrimitiveFields, StreamlineEnd,
};
use bumpflow::solver::{check_bounds, picard_solve};
use bumpflow::{
    Cutoff, FarfieldTriple, FlowState, GasLaw, Mesh, ProblemSetup, SolveReport, SolverConfig, TruncatedProfile,
    UpstreamProfile, WallShape,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn verdict(name: &str, pass: bool, detail: String) {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}: {detail}");
}

fn gas2() -> GasLaw {
    GasLaw::new(2.0).unwrap()
}

fn convex() -> UpstreamProfile {
    UpstreamProfile::convex_decay(1.0, 1.0, 1.0).unwrap()
}

fn setup(wall: &WallShape, l: f64, n: f64, nx: usize, ny: usize, rho0: f64, cfg: SolverConfig) -> ProblemSetup {
    let mesh = Mesh::build(wall, l, n, nx, ny).unwrap();
    ProblemSetup::new(gas2(), &convex(), rho0, mesh, cfg).unwrap()
}

type Solved = (ProblemSetup, FlowState, SolveReport);

fn solve(s: ProblemSetup) -> Solved {
    let (state, rep) = picard_solve(&s, &s.default_init()).unwrap();
    (s, state, rep)
}

/// Solve warm-started from a coarser solution on the same window.
fn solve_from(s: ProblemSetup, coarse: &Solved) -> Solved {
    let init = coarse.0.mesh().transfer(&coarse.1.psi, s.mesh());
    let (state, rep) = picard_solve(&s, &init).unwrap();
    (s, state, rep)
}

/// Smooth bump of height 1/4 at `rho0 = 64 = 32 rho_star` on a 257 x 129 mesh with `L = N = 8`.
fn standard() -> &'static Solved {
    static CELL: OnceLock<Solved> = OnceLock::new();
    CELL.get_or_init(|| {
        solve(setup(&WallShape::smooth_bump(0.25).unwrap(), 8.0, 8.0, 256, 128, 64.0, SolverConfig::default()))
    })
}

fn max_node_mach(f: &PrimitiveFields) -> f64 {
    f.mach.iter().copied().fold(0.0, f64::max)
}

#[test]
fn bernoulli_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let t = Instant::now();
    let rt = bernoulli_roundtrip(&mut rng, 100_000, 0.0);
    let secs = t.elapsed().as_secs_f64();
    verdict(
        "bernoulli round trip",
        rt.failures == 0 && rt.max_rel <= 1e-10 && secs < 5.0,
        format!("{} samples, max rel {:.2e}, {secs:.2} s", rt.samples, rt.max_rel),
    );
}

#[test]
fn flat_wall_exactness() {
    let profile = UpstreamProfile::constant(1.0).unwrap();
    let mesh = Mesh::build(&WallShape::flat(), 8.0, 8.0, 128, 64).unwrap();
    let s = ProblemSetup::new(gas2(), &profile, 20.0, mesh, SolverConfig::default()).unwrap();
    let (state, _) = picard_solve(&s, &s.default_init()).unwrap();
    let m = s.mesh();
    let err = (0..m.node_count())
        .map(|k| {
            let (i, j) = m.node_ij(k);
            (state.psi[k] - 20.0 * m.position(i, j).1).abs()
        })
        .fold(0.0, f64::max)
        / s.mass_flux();

    let coarse = setup(&WallShape::flat(), 8.0, 4.0, 32, 16, 64.0, SolverConfig::default());
    let tp = coarse.tprofile().clone();
    let exact = move |_: f64, x2: f64| tp.barpsi(x2).unwrap();
    let study = grid_convergence(&coarse, 3, Reference::Exact(&exact)).unwrap();
    let in_range = study.orders.iter().all(|o| (1.7..=2.3).contains(o));
    verdict(
        "flat wall exactness",
        err <= 1e-9 && study.monotone && in_range,
        format!("constant profile error {err:.2e} m_L; convex profile errors {:.3e} orders {:.3?}", study.errors[2], study.orders),
    );
}

#[test]
fn maximum_principle_bounds() {
    let gas = gas2();
    let rho0 = 4.0 * gas.rho_star(convex().max_speed());
    let wall = WallShape::smooth_bump(0.25).unwrap();
    let tol = 1e-3 * rho0;
    let run = |cutoff: Cutoff| {
        let s = setup(&wall, 8.0, 8.0, 256, 128, rho0, SolverConfig { cutoff: Some(cutoff), ..SolverConfig::default() });
        let t = Instant::now();
        let (s, state, rep) = solve(s);
        let secs = t.elapsed().as_secs_f64();
        let triple = FarfieldTriple::solve(s.tprofile(), s.gas(), wall.max_height()).unwrap();
        (check_bounds(&s, &state, &triple), rep, secs)
    };
    let (default_bounds, default_rep, _) = run(Cutoff::default());
    println!(
        "[INFO] maximum principle with default cutoff thresholds: M_ratio {:.3} (truncation active {}), worst violation {:.3e}",
        default_rep.m_ratio,
        default_rep.truncation_active,
        default_bounds.max()
    );
    let cutoff = Cutoff::from_eps(1.0 / 16.0).unwrap();
    // the comparison needs psi_bar itself to solve the truncated problem
    let tp = TruncatedProfile::new(&convex(), rho0, 8.0).unwrap();
    let upstream_ratio = (0..=800)
        .map(|k| {
            let u = tp.u0l(8.0 * k as f64 / 800.0);
            let s = 0.5 * u * u + gas.enthalpy(rho0).unwrap();
            rho0 * u / gas.sigma(s).unwrap()
        })
        .fold(0.0, f64::max);
    let (b, rep, secs) = run(cutoff);
    verdict(
        "maximum principle bounds",
        upstream_ratio < cutoff.t0() && b.max() <= tol && secs < 60.0,
        format!(
            "eps_n 1/16, upstream ratio {upstream_ratio:.3} < t0 {:.3}, bump M_ratio {:.3}, violations {:.2e} / {:.2e} / {:.2e} (tol {tol:.1e}), {secs:.1} s",
            cutoff.t0(), rep.m_ratio, b.above_upstream, b.below_farfield, b.negative
        ),
    );
}

/// `rho1` for a constant profile from mass and Bernoulli matching, by plain bisection.
fn constant_rho1_oracle(gas: &GasLaw, rho0: f64, ubar: f64, l: f64, j: f64) -> f64 {
    let g = gas.gamma();
    let h = |r: f64| g * r.powf(g - 1.0) / (g - 1.0);
    let s = 0.5 * ubar * ubar + h(rho0);
    let flux = |r: f64| r * (2.0 * (s - h(r))).sqrt();
    let target = rho0 * ubar * l / (l - j);
    let (mut lo, mut hi) = ((2.0 * (g - 1.0) * s / (g * (g + 1.0))).powf(1.0 / (g - 1.0)), rho0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if flux(mid) < target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn farfield_triple() {
    let gas = gas2();
    let tp = TruncatedProfile::new(&UpstreamProfile::constant(1.0).unwrap(), 5.0, 10.0).unwrap();
    let triple = FarfieldTriple::solve(&tp, &gas, 1.0).unwrap();
    let r = triple.verify(&tp, &gas);
    let oracle = constant_rho1_oracle(&gas, 5.0, 1.0, 10.0, 1.0);
    let res = r.bernoulli_residual.max(r.mass_residual) / tp.mass_flux();

    let convex_tp = TruncatedProfile::new(&convex(), 4.0 * gas.rho_star(2.0), 8.0).unwrap();
    let mut worst = (f64::MAX, f64::MIN);
    for j in [0.25, 1.0] {
        let t = FarfieldTriple::solve(&convex_tp, &gas, j).unwrap();
        for k in 0..=2000 {
            let x = 8.0 * k as f64 / 2000.0;
            let d = t.chi(x) - x;
            worst.0 = worst.0.min(d);
            worst.1 = worst.1.max(d - j);
        }
    }
    verdict(
        "far-field triple",
        (r.rho1 - oracle).abs() <= 1e-6 && (oracle - 4.933).abs() < 5e-4 && res <= 1e-8 && worst.0 >= -1e-12 && worst.1 <= 1e-12,
        format!(
            "rho1 {:.9} vs oracle {oracle:.9}, residual {res:.1e} m_L, convex min(chi - s) {:.1e}, max(chi - s - J) {:.1e}",
            r.rho1, worst.0, worst.1
        ),
    );
}

#[test]
fn euler_equivalence() {
    let wall = WallShape::smooth_bump(0.25).unwrap();
    let coarse = solve(setup(&wall, 8.0, 4.0, 512, 256, 64.0, SolverConfig::default()));
    let fine = solve_from(setup(&wall, 8.0, 4.0, 1024, 512, 64.0, SolverConfig::default()), &coarse);
    let fc = primitives(&coarse.0, &coarse.1);
    let ff = primitives(&fine.0, &fine.1);
    let vc = vorticity_check(&coarse.0, &coarse.1, &fc);
    let vf = vorticity_check(&fine.0, &fine.1, &ff);
    let b = bernoulli_identity(&fine.0, &fine.1, &ff);
    let lines: Vec<_> = default_seeds(fine.0.mesh())
        .into_iter()
        .map(|seed| trace_streamline(fine.0.mesh(), &fine.1.psi, &ff, seed))
        .collect();
    let all_out = lines.iter().all(|l| l.end == StreamlineEnd::Outflow);
    let b_drift = lines.iter().map(|l| l.bernoulli_drift()).fold(0.0, f64::max);
    let w_drift = lines.iter().map(|l| l.vorticity_drift()).fold(0.0, f64::max);
    verdict(
        "euler equivalence",
        !coarse.2.truncation_active
            && !fine.2.truncation_active
            && b.relative() <= 1e-3
            && lines.len() == 10
            && all_out
            && b_drift <= 1e-3
            && w_drift <= 5e-3
            && vf.median_rel <= 0.05
            && vf.median_rel < vc.median_rel,
        format!(
            "1025x513: Bernoulli identity {:.1e}, drifts B {b_drift:.1e} omega/rho {w_drift:.1e}; vorticity median {:.1e} -> {:.1e}",
            b.relative(),
            vc.median_rel,
            vf.median_rel
        ),
    );
}

#[test]
fn subsonicity_and_positivity() {
    let mut worst_mach: f64 = 0.0;
    let mut min_u = f64::MAX;
    let mut all_certified = true;
    let mut record = |s: &Solved| -> Vec<f64> {
        let f = primitives(&s.0, &s.1);
        let p = positivity_and_kutta(&s.0, &f);
        all_certified &= !s.2.truncation_active;
        worst_mach = worst_mach.max(max_node_mach(&f));
        min_u = min_u.min(p.min_interior_u);
        p.corner_speeds
    };
    record(standard());
    let wall = WallShape::corner_bump(0.25).unwrap();
    let mut speeds = Vec::new();
    let mut prev: Option<Solved> = None;
    for n in [128, 256, 512] {
        let s = setup(&wall, 8.0, 4.0, n, n / 2, 128.0, SolverConfig::default());
        let solved = match &prev {
            Some(c) => solve_from(s, c),
            None => solve(s),
        };
        speeds.push(record(&solved));
        prev = Some(solved);
    }
    let decreasing = (0..2).all(|c| speeds.windows(2).all(|w| w[1][c] < w[0][c]));
    verdict(
        "subsonicity and positivity",
        all_certified && worst_mach < 1.0 && min_u > 0.0 && decreasing,
        format!(
            "max node mach {worst_mach:.3}, min interior u {min_u:.3}, corner speeds {:.3} -> {:.3} -> {:.3}",
            speeds[0][0], speeds[1][0], speeds[2][0]
        ),
    );
}

#[test]
fn farfield_decay_and_energy() {
    let base = standard();
    let wide = solve(setup(&WallShape::smooth_bump(0.25).unwrap(), 16.0, 16.0, 512, 256, 64.0, SolverConfig::default()));
    let fb = primitives(&base.0, &base.1);
    let fw = primitives(&wide.0, &wide.1);
    let decay = farfield_decay(&base.0, &base.1, &fb).strictly_decreasing()
        && farfield_decay(&wide.0, &wide.1, &fw).strictly_decreasing();
    let (e1, m1) = energy_norms(&base.0, &base.1);
    let (e2, m2) = energy_norms(&wide.0, &wide.1);
    let de = ((e2 - e1) / e1).abs();
    let dm = ((m2 - m1) / m1).abs();
    verdict(
        "far-field decay and energy saturation",
        !wide.2.truncation_active && decay && de < 0.05 && dm < 0.05,
        format!("slab sups decreasing {decay}, energy change {:.2}%, momentum deviation change {:.2}%", 100.0 * de, 100.0 * dm),
    );
}

#[test]
fn empirical_uniqueness() {
    let (s, a, _) = standard();
    let (b, _) = picard_solve(s, &s.blend_init()).unwrap();
    let diff = a.psi.iter().zip(&b.psi).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / s.mass_flux();
    verdict("empirical uniqueness", diff <= 1e-6, format!("max |psi_a - psi_b| = {diff:.2e} m_L"));
}

#[test]
fn large_density_scaling() {
    let wall = WallShape::smooth_bump(0.25).unwrap();
    let mut details = Vec::new();
    let mut pass = true;
    for (gamma, lo, hi) in [(2.0, 40.0, 400.0), (1.4, 1e4, 1e5)] {
        let gas = GasLaw::new(gamma).unwrap();
        let rs = gas.rho_star(convex().max_speed());
        let mesh = Mesh::build(&wall, 8.0, 4.0, 128, 64).unwrap();
        let s = ProblemSetup::new(gas, &convex(), hi * rs, mesh, SolverConfig::default()).unwrap();
        let r = scan(&s, &geometric_grid(hi * rs, lo * rs, 5).unwrap()).unwrap();
        let want = -(gamma - 1.0) / 2.0;
        let slope = r.slope.unwrap_or(f64::NAN);
        pass &= r.entries.iter().all(|e| e.certified()) && ((slope - want) / want).abs() <= 0.2;
        details.push(format!("gamma {gamma}: slope {slope:.4} vs {want:.2}"));
    }
    verdict("large-density scaling", pass, details.join(", "));
}

/// Density at which the uniform flat-wall flow reaches `M_ratio = t0`.
fn flat_threshold_oracle(gas: &GasLaw, ubar: f64, t0: f64) -> f64 {
    let g = gas.gamma();
    let ratio = |r: f64| {
        let s = 0.5 * ubar * ubar + g * r.powf(g - 1.0) / (g - 1.0);
        let sonic = (2.0 * (g - 1.0) * s / (g * (g + 1.0))).powf(1.0 / (g - 1.0));
        r * ubar / (g.sqrt() * sonic.powf(0.5 * (g + 1.0)))
    };
    let (mut lo, mut hi) = (gas.rho_star(ubar) * 1.0001, 1e6);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) > t0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn critical_density_bisection() {
    let gas = gas2();
    let flat_mesh = Mesh::build(&WallShape::flat(), 4.0, 4.0, 32, 16).unwrap();
    let constant = UpstreamProfile::constant(1.0).unwrap();
    let flat = ProblemSetup::new(gas, &constant, 8.0, flat_mesh, SolverConfig::default()).unwrap();
    let oracle = flat_threshold_oracle(&gas, 1.0, 0.5);
    let rs_flat = gas.rho_star(1.0);
    let fr = locate_critical(&flat, 4.0, 8.0, 1e-3 * rs_flat).unwrap();
    let flat_rel = (fr.estimate().unwrap_or(f64::NAN) - oracle).abs() / oracle;

    let rs = gas.rho_star(convex().max_speed());
    let bump = setup(&WallShape::smooth_bump(0.25).unwrap(), 8.0, 4.0, 128, 64, 64.0 * rs, SolverConfig::default());
    let br = locate_critical(&bump, 4.0 * rs, 64.0 * rs, 1e-3 * rs).unwrap();
    verdict(
        "critical density bisection",
        flat_rel <= 1e-3
            && br.width() <= 1e-3 * rs
            && br.monotone
            && br.alternative == CriticalAlternative::ThresholdReached,
        format!(
            "flat {:.6} vs closed form {oracle:.6} (rel {flat_rel:.1e}); bump [{:.5}, {:.5}] width {:.1e}, {}",
            fr.hi,
            br.lo,
            br.hi,
            br.width(),
            br.alternative
        ),
    );
}

#[test]
fn weighted_poincare() {
    let t = Instant::now();
    let closed = poincare_check(&PoincareCase::constant(1.0, 3.0)).unwrap();
    let decaying = poincare_check(&PoincareCase::new(
        0.0,
        None,
        4.0,
        Arc::new(|s: f64| s * (-s).exp()),
        Arc::new(|s: f64| (1.0 - s) * (-s).exp()),
    ))
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut cases = Vec::new();
    for l in [2.5, 3.0, 4.0, 6.0] {
        cases.extend((0..25).map(|_| random_gaussian_case(&mut rng, l)));
    }
    let results = poincare_batch(&cases).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let held = results.iter().filter(|r| r.holds && r.grid_change < 1e-6).count();
    let slack = results.iter().map(|r| r.lhs / r.rhs).filter(|x| x.is_finite()).fold(0.0, f64::max);
    verdict(
        "weighted poincare",
        closed.holds
            && (closed.lhs - 0.5).abs() < 1e-9
            && (closed.rhs - 1.0).abs() < 1e-12
            && decaying.holds
            && held == cases.len()
            && secs < 2.0,
        format!(
            "closed form {:.9} <= {:.1}, {held}/{} random hold (max lhs/rhs {slack:.3}), {secs:.2} s",
            closed.lhs,
            closed.rhs,
            cases.len()
        ),
    );
}
