use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::farfield::FarfieldTriple;
use crate::gas::GasLaw;
use crate::geometry::{Mesh, WallShape};
use crate::upstream::UpstreamProfile;

fn setup(wall: WallShape, profile: UpstreamProfile, rho0: f64, l: f64, nx: usize, ny: usize) -> ProblemSetup {
    let mesh = Mesh::build(&wall, l, 4.0, nx, ny).unwrap();
    ProblemSetup::new(GasLaw::new(2.0).unwrap(), &profile, rho0, mesh, SolverConfig::default()).unwrap()
}

#[test]
fn flat_constant_is_scaled_laplacian() {
    let s = setup(WallShape::flat(), UpstreamProfile::constant(1.0).unwrap(), 20.0, 4.0, 32, 16);
    let (sys, cells) = assemble(&s, &s.default_init()).unwrap();
    assert!(cells.density.iter().all(|h| (h - 20.0).abs() < 1e-10));
    let lap = assemble_frozen(s.mesh(), &vec![1.0 / 20.0; s.mesh().cell_count()], &vec![0.0; s.mesh().cell_count()], s.boundary()).unwrap();
    for r in 0..sys.matrix.rows() {
        for o in 0..9 {
            assert!((sys.matrix.row(r)[o] - lap.matrix.row(r)[o]).abs() < 1e-12);
        }
    }
}

#[test]
fn constant_dirichlet_data_reproduced() {
    let wall = WallShape::smooth_bump(0.5).unwrap();
    let mesh = Mesh::build(&wall, 4.0, 4.0, 32, 32).unwrap();
    let n = mesh.cell_count();
    let sigma: Vec<f64> = (0..n).map(|c| 1.0 + 0.5 * ((c as f64) * 0.37).sin()).collect();
    let data = vec![2.5; mesh.node_count()];
    let sys = assemble_frozen(&mesh, &sigma, &vec![0.0; n], &data).unwrap();
    let (x, _) = linear_solve(&sys, None, 1e-12).unwrap();
    assert!(x.iter().all(|v| (v - 2.5).abs() < 1e-9));
}

#[test]
fn assembled_matrix_is_spd() {
    let wall = WallShape::corner_bump(0.5).unwrap();
    let s = setup(wall, UpstreamProfile::convex_decay(1.0, 1.0, 1.0).unwrap(), 16.0, 4.0, 32, 32);
    let (sys, _) = assemble(&s, &s.default_init()).unwrap();
    assert!(sys.matrix.asymmetry() < 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let v: Vec<f64> = (0..sys.matrix.rows()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        assert!(sys.matrix.quadratic_form(&v) > 0.0);
    }
}

#[test]
fn manufactured_laplacian_second_order() {
    let mut errs = Vec::new();
    for level in 0..3 {
        let (nx, ny) = (32 << level, 16 << level);
        let l = 3.0;
        let mesh = Mesh::build(&WallShape::flat(), l, 4.0, nx, ny).unwrap();
        let exact = |x1: f64, x2: f64| (PI * x2 / l).sin() * (PI * (x1 + 3.5) / 8.0).sin();
        let k2 = (PI / l).powi(2) + (PI / 8.0).powi(2);
        let n = mesh.cell_count();
        let r: Vec<f64> = (0..n)
            .map(|c| {
                let [a, _, _, d] = mesh.cell_nodes(c);
                let (p, q) = (mesh.node_ij(a), mesh.node_ij(d));
                let (x1a, x2a) = mesh.position(p.0, p.1);
                let (x1b, x2b) = mesh.position(q.0, q.1);
                -k2 * exact(0.5 * (x1a + x1b), 0.5 * (x2a + x2b))
            })
            .collect();
        let sys = assemble_frozen(&mesh, &vec![1.0; n], &r, &vec![0.0; mesh.node_count()]).unwrap();
        let (x, rep) = linear_solve(&sys, None, 1e-12).unwrap();
        assert!(rep.residual <= 1e-12);
        let ni = nx - 1;
        let err = x
            .iter()
            .enumerate()
            .map(|(row, v)| {
                let (x1, x2) = mesh.position(row % ni + 1, row / ni + 1);
                (v - exact(x1, x2)).abs()
            })
            .fold(0.0, f64::max);
        errs.push(err);
    }
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 2.0).abs() < 0.3, "{errs:?}");
    }
}

#[test]
fn flat_constant_exact_in_two_iterations() {
    for rho0 in [0.8, 5.0, 20.0] {
        let s = setup(WallShape::flat(), UpstreamProfile::constant(1.0).unwrap(), rho0, 4.0, 32, 16);
        let (state, rep) = picard_solve(&s, &s.default_init()).unwrap();
        assert!(rep.iterations <= 2, "{rep:?}");
        assert!(rep.linear_residual <= 1e-10);
        let m = s.mesh();
        for (k, p) in state.psi.iter().enumerate() {
            let (i, j) = m.node_ij(k);
            assert!((p - rho0 * m.position(i, j).1).abs() <= 1e-9 * s.mass_flux());
        }
    }
}

#[test]
fn certificate_closed_forms() {
    let s5 = setup(WallShape::flat(), UpstreamProfile::constant(1.0).unwrap(), 5.0, 4.0, 32, 16);
    let (st, rep) = picard_solve(&s5, &s5.default_init()).unwrap();
    let want = 5.0 / 9.260_129_588_726_07;
    assert!((rep.m_ratio - want).abs() < 1e-9, "{}", rep.m_ratio);
    assert!(rep.truncation_active);
    assert!(certify(&s5, &st).truncation_active);

    let s20 = setup(WallShape::flat(), UpstreamProfile::constant(1.0).unwrap(), 20.0, 4.0, 32, 16);
    let (_, rep) = picard_solve(&s20, &s20.default_init()).unwrap();
    assert!((rep.m_ratio - 0.285_111_244_04).abs() < 1e-9);
    assert!(!rep.truncation_active);
    assert!((rep.max_mach - 1.0 / 40f64.sqrt()).abs() < 1e-9);

    let mut still = st.clone();
    still.cells.gradient.iter_mut().for_each(|g| *g = [0.0, 0.0]);
    assert_eq!(certify(&s5, &still).m_ratio, 0.0);
}

#[test]
fn flat_bounds_vanish() {
    let s = setup(WallShape::flat(), UpstreamProfile::convex_decay(1.0, 1.0, 1.0).unwrap(), 30.0, 6.0, 32, 32);
    let (state, _) = picard_solve(&s, &s.default_init()).unwrap();
    let triple = FarfieldTriple::solve(s.tprofile(), s.gas(), 0.0).unwrap();
    let v = check_bounds(&s, &state, &triple);
    assert!(v.max() < 1e-3 * s.rho0(), "{v:?}");
}

#[test]
fn symmetric_bump_gives_symmetric_psi() {
    let s = setup(WallShape::smooth_bump(0.5).unwrap(), UpstreamProfile::constant(1.0).unwrap(), 10.0, 4.0, 64, 32);
    let (state, _) = picard_solve(&s, &s.default_init()).unwrap();
    let m = s.mesh();
    for j in 0..=m.ny() {
        for i in 0..=m.nx() {
            let d = state.psi[m.node(i, j)] - state.psi[m.node(m.nx() - i, j)];
            assert!(d.abs() < 1e-8 * s.mass_flux());
        }
    }
}

#[test]
fn cap_reached_is_reported() {
    let mut cfg = SolverConfig::default();
    cfg.max_iters = 1;
    cfg.picard_tol = 1e-15;
    let mesh = Mesh::build(&WallShape::smooth_bump(0.5).unwrap(), 4.0, 4.0, 32, 16).unwrap();
    let s = ProblemSetup::new(GasLaw::new(2.0).unwrap(), &UpstreamProfile::constant(1.0).unwrap(), 10.0, mesh, cfg).unwrap();
    assert!(matches!(picard_solve(&s, &s.default_init()), Err(crate::Error::NoConvergence { .. })));
    let (_, rep) = picard_iterate(&s, &s.default_init()).unwrap();
    assert!(!rep.converged);
}
