mod common;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use vibro_core::assembly::{BlockSystem, Coefficient, LoadTerm, OperatorTerm, Part, PlaneWaveLoad};
use vibro_core::config::MorSettings;
use vibro_core::dense::orthogonalize;
use vibro_core::materials::LossFactorTable;
use vibro_core::math::{dot, norm2};
use vibro_core::mesh::Discretisation;
use vibro_core::mor::{
    build_local_roms, candidate_points, greedy_expand, krylov_block, project, relative_error, rom_sweep,
    verification_points, FullOrderModel, ReducedModel,
};
use vibro_core::solvers::NoClock;
use vibro_core::sparse::CsrMatrix;
use vibro_core::C64;

use common::plan;

fn loss(eta: f64) -> Coefficient {
    Coefficient::Loss(LossFactorTable { id: "eta".into(), samples: vec![[1.0, eta], [1e4, eta]] })
}

/// Fixed-fixed spring-mass chain of `n` unit masses, loaded at the first
/// mass; resonances `2√k sin(jπ / 2(n+1)) / 2π`.
fn chain(n: usize, k: f64, eta: f64) -> BlockSystem {
    let mut kt = Vec::new();
    let mut mt = Vec::new();
    for i in 0..n {
        kt.push((i, i, 2.0 * k));
        if i + 1 < n {
            kt.push((i, i + 1, -k));
            kt.push((i + 1, i, -k));
        }
        mt.push((i, i, 1.0));
    }
    let terms = vec![
        OperatorTerm { label: "k".into(), part: Part::Stiffness, coefficient: loss(eta), matrix: CsrMatrix::from_triplets(n, n, kt) },
        OperatorTerm { label: "m".into(), part: Part::Mass, coefficient: Coefficient::One, matrix: CsrMatrix::from_triplets(n, n, mt) },
    ];
    let load = PlaneWaveLoad { amplitude: 1.0, wave_speed: 343.0, terms: vec![LoadTerm { s: 0.0, entries: vec![(0, 1.0)] }] };
    BlockSystem::from_terms(n, terms, load, (0..n).step_by(5).collect())
}

/// Chain whose 200 masses resonate from about 23 Hz upwards.
fn dense_chain() -> BlockSystem {
    chain(200, 8.9e7, 0.02)
}

fn coarse_slice() -> BlockSystem {
    let cfg = common::slice(0.3, [[0.05, 0.003], [0.05, 0.05], [0.05, 0.008], [0.1, 0.1]]);
    BlockSystem::build(&cfg, &Discretisation::build(&cfg, 0).unwrap()).unwrap()
}

fn settings(tol: f64, max_points: usize, moments: usize) -> MorSettings {
    MorSettings { tol, max_points, moments_per_point: moments, ..MorSettings::default() }
}

#[test]
fn moments_are_matched() {
    let sys = dense_chain();
    let fom = FullOrderModel::new(&sys, 0).unwrap();
    let fj = 100.0;
    let m = 3;
    let block = krylov_block(&fom, fj, m, false).unwrap();
    assert_eq!(block.vectors.len(), m);
    let rom = ReducedModel::from_basis(&sys, &block.vectors, [90.0, 110.0], 0);
    let err = |f: f64| relative_error(&fom.response(f).unwrap(), &rom.response(f).unwrap()).value;
    assert!(err(fj) < 1e-8, "{}", err(fj));
    // error ~ (ω² − ω_j²)^m near the expansion point
    let (e1, e2) = (err(fj + 0.4), err(fj + 0.2));
    let ratio = e1 / e2;
    assert!((6.0..10.0).contains(&ratio), "{e1} / {e2} = {ratio}");
}

#[test]
fn krylov_blocks_are_orthonormal() {
    let sys = coarse_slice();
    let fom = FullOrderModel::new(&sys, 0).unwrap();
    for second_order in [false, true] {
        let b = krylov_block(&fom, 180.0, 6, second_order).unwrap();
        assert_eq!(b.vectors.len(), 6);
        for (i, u) in b.vectors.iter().enumerate() {
            for (j, v) in b.vectors.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(u, v) - want).norm() < 1e-12, "second order {second_order}: ({i}, {j})");
            }
        }
    }
}

#[test]
fn single_resonance_needs_one_point() {
    // a lone mass on a spring: the response is one vector at every frequency
    let sys = chain(1, 4e5, 0.05);
    let fom = FullOrderModel::new(&sys, 0).unwrap();
    let p = plan(10.0, 300.0, 2.0, &[10.0, 300.0]);
    let grid = vibro_core::config::frequency_grid(&p);
    let cands = candidate_points(&grid, [10.0, 300.0], 4);
    let out = greedy_expand(&fom, &settings(1e-10, 12, 1), [10.0, 300.0], &cands, true).unwrap();
    assert!(out.rom.converged);
    assert!(out.rom.expansion_points.len() <= 2);
    let errs: Vec<f64> = verification_points(&grid, [10.0, 300.0], 4)
        .iter()
        .map(|&f| relative_error(&fom.response(f).unwrap(), &out.rom.response(f).unwrap()).value)
        .collect();
    assert!(errs.iter().all(|&e| e < 1e-10));
}

#[test]
fn infinite_tolerance_stops_after_the_first_block() {
    let sys = dense_chain();
    let fom = FullOrderModel::new(&sys, 0).unwrap();
    let grid = vibro_core::config::frequency_grid(&plan(50.0, 150.0, 2.0, &[50.0, 150.0]));
    let cands = candidate_points(&grid, [50.0, 150.0], 4);
    for m in [1, 3, 5] {
        let out = greedy_expand(&fom, &settings(f64::INFINITY, 12, m), [50.0, 150.0], &cands, true).unwrap();
        assert_eq!(out.rom.dim(), m);
        assert_eq!(out.rom.expansion_points, vec![100.0]);
        assert!(out.rom.converged);
    }
}

#[test]
fn identity_columns_pick_out_entries() {
    let sys = coarse_slice();
    let cols = [3usize, 17, 250, sys.n - 1];
    let basis: Vec<Vec<C64>> = cols
        .iter()
        .map(|&c| {
            let mut v = vec![C64::default(); sys.n];
            v[c] = C64::new(1.0, 0.0);
            v
        })
        .collect();
    let rom = ReducedModel::from_basis(&sys, &basis, [20.0, 400.0], 0);
    let f = 123.0;
    let a = sys.operator(f).unwrap();
    let ar = rom.operator(f).unwrap();
    let b = sys.load_vector(f);
    let br = rom.load_vector(f);
    for (i, &ci) in cols.iter().enumerate() {
        for (j, &cj) in cols.iter().enumerate() {
            // test rows are weighted: entries of L A
            let want = a.get(ci, cj) * rom.weights()[ci];
            assert!((ar[(i, j)] - want).norm() <= 1e-14 * want.norm().max(1e-300));
        }
        let want = b[ci] * rom.weights()[ci];
        assert!((br[i] - want).norm() <= 1e-14 * want.norm().max(1e-300));
    }
}

fn random_orthonormal(rng: &mut StdRng, n: usize, r: usize) -> Vec<Vec<C64>> {
    let mut q = Vec::new();
    while q.len() < r {
        let mut v: Vec<C64> = (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        if orthogonalize(&q, &mut v, 1e-8).is_some() {
            q.push(v);
        }
    }
    q
}

#[test]
fn full_unitary_basis_reproduces_the_full_model() {
    let sys = chain(40, 8.9e7, 0.02);
    let fom = FullOrderModel::new(&sys, 0).unwrap();
    let mut rng = StdRng::seed_from_u64(17);
    let basis = random_orthonormal(&mut rng, sys.n, sys.n);
    let rom = ReducedModel::from_basis(&sys, &basis, [10.0, 1000.0], 0);
    for f in [10.0, 77.0, 350.0, 999.0] {
        let e = relative_error(&fom.response(f).unwrap(), &rom.response(f).unwrap()).value;
        assert!(e < 1e-12, "{f} Hz: {e}");
        let x = rom.expand(&rom.solve(f).unwrap()).unwrap();
        let r = sys.operator(f).unwrap().residual(&x, &sys.load_vector(f));
        assert!(norm2(&r) <= 1e-10 * norm2(&sys.load_vector(f)));
    }
}

#[test]
fn affine_reduced_model_equals_projection() {
    let sys = coarse_slice();
    let mut rng = StdRng::seed_from_u64(4);
    let basis = random_orthonormal(&mut rng, sys.n, 12);
    let rom = ReducedModel::from_basis(&sys, &basis, [20.0, 400.0], 0);
    for f in [20.0, 95.0, 258.0, 400.0] {
        let (a, b) = project(&sys, &basis, rom.weights(), f).unwrap();
        let ar = rom.operator(f).unwrap();
        let scale = a.max_abs();
        for i in 0..12 {
            for j in 0..12 {
                assert!((ar[(i, j)] - a[(i, j)]).norm() <= 1e-12 * scale, "{f} Hz ({i}, {j})");
            }
        }
        let d: Vec<C64> = rom.load_vector(f).iter().zip(&b).map(|(x, y)| x - y).collect();
        assert!(norm2(&d) <= 1e-12 * norm2(&b));
    }
}

#[test]
fn coupled_projection_is_stable_near_the_expansion_point() {
    let sys = coarse_slice();
    let fom = FullOrderModel::new(&sys, 0).unwrap();
    let block = krylov_block(&fom, 150.0, 1, false).unwrap();
    let rom = ReducedModel::from_basis(&sys, &block.vectors, [140.0, 160.0], 0);
    let y = fom.response(150.2).unwrap();
    let e = relative_error(&y, &rom.response(150.2).unwrap()).value;
    assert!(e < 1e-2, "{e}");
}

#[test]
fn automatic_windows_split_a_dense_band() {
    let sys = dense_chain();
    let p = plan(20.0, 400.0, 2.0, &[20.0, 400.0]);
    let s = MorSettings { candidate_stride: 2, ..settings(1e-3, 3, 2) };
    let roms = build_local_roms(&[sys], &[0], &p, &s).unwrap();
    assert!(roms.len() >= 2, "{} windows", roms.len());
    assert_eq!(roms[0].window[0], 20.0);
    assert_eq!(roms[roms.len() - 1].window[1], 400.0);
    assert!(roms.windows(2).all(|w| w[0].window[1] == w[1].window[0]));
}

#[test]
fn shared_edge_belongs_to_the_lower_window() {
    let sys = chain(30, 8.9e7, 0.02);
    let fom = FullOrderModel::new(&sys, 0).unwrap();
    let lo = ReducedModel::from_basis(&sys, &krylov_block(&fom, 100.0, 4, false).unwrap().vectors, [50.0, 150.0], 0);
    let hi = ReducedModel::from_basis(&sys, &krylov_block(&fom, 200.0, 4, false).unwrap().vectors, [150.0, 250.0], 0);
    let out = rom_sweep(&[lo, hi], &[140.0, 150.0, 160.0], &NoClock).unwrap();
    let windows: Vec<usize> = out.records.iter().map(|r| r.window).collect();
    assert_eq!(windows, vec![0, 0, 1]);
    assert_eq!(out.seams.len(), 1);
    assert_eq!((out.seams[0].f, out.seams[0].lower, out.seams[0].upper), (150.0, 0, 1));
    assert!(!out.seams[0].cross_level);
    assert!(rom_sweep(&out_of_range(&sys), &[300.0], &NoClock).is_err());
}

fn out_of_range(sys: &BlockSystem) -> Vec<ReducedModel> {
    vec![ReducedModel::empty(sys, [10.0, 20.0], 0)]
}
