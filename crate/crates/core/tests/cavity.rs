mod common;

use nalgebra::{DMatrix, SymmetricEigen};
use vibro_core::assembly::BlockSystem;
use vibro_core::mesh::Discretisation;
use vibro_core::sparse::CsrMatrix;
use vibro_core::C64;

fn block(a: &CsrMatrix<C64>, r: (usize, usize)) -> DMatrix<f64> {
    let n = r.1 - r.0;
    let mut m = DMatrix::zeros(n, n);
    for (i, j, v) in a.triplets() {
        if (r.0..r.1).contains(&i) && (r.0..r.1).contains(&j) {
            assert!(v.im == 0.0);
            m[(i - r.0, j - r.0)] += v.re;
        }
    }
    m
}

/// Natural frequencies of `K x = ω² M x` on one block, sorted.
fn block_frequencies(sys: &BlockSystem, d: usize) -> Vec<f64> {
    let k = block(&sys.stiffness(100.0).unwrap(), sys.blocks[d]);
    let m = block(&sys.mass(100.0).unwrap(), sys.blocks[d]);
    let l = m.cholesky().expect("mass is positive definite").l();
    let li = l.clone().try_inverse().unwrap();
    let s = &li * k * li.transpose();
    let s = (&s + s.transpose()) * 0.5;
    let mut f: Vec<f64> =
        SymmetricEigen::new(s).eigenvalues.iter().map(|w2| w2.max(0.0).sqrt() / (2.0 * std::f64::consts::PI)).collect();
    f.sort_by(|a, b| a.partial_cmp(b).unwrap());
    f
}

fn analytic(c: f64, lx: f64, ly: f64, count: usize) -> Vec<f64> {
    let mut f = Vec::new();
    for m in 0..10 {
        for n in 0..10 {
            f.push(0.5 * c * ((m as f64 / lx).powi(2) + (n as f64 / ly).powi(2)).sqrt());
        }
    }
    f.sort_by(|a, b| a.partial_cmp(b).unwrap());
    f.truncate(count);
    f
}

#[test]
fn rigid_cavity_resonances() {
    let (lx, ly) = (0.6, 0.4);
    let cfg = common::cavity(lx, ly, 0.05);
    cfg.validate().unwrap();
    let sys = BlockSystem::build(&cfg, &Discretisation::build(&cfg, 0).unwrap()).unwrap();
    let got = block_frequencies(&sys, 1);
    let want = analytic(343.0, lx, ly, 10);
    assert!(got[0] < 1e-3, "constant pressure mode at {} Hz", got[0]);
    for (g, w) in got[1..].iter().zip(&want[1..]) {
        assert!((g - w).abs() <= 0.01 * w, "{g} Hz vs {w} Hz");
    }
}

#[test]
fn refinement_approaches_the_analytic_mode() {
    let (lx, ly) = (0.5, 0.3);
    let want = analytic(343.0, lx, ly, 4);
    let err = |h: f64| {
        let cfg = common::cavity(lx, ly, h);
        let sys = BlockSystem::build(&cfg, &Discretisation::build(&cfg, 0).unwrap()).unwrap();
        let got = block_frequencies(&sys, 1);
        (got[3] - want[3]).abs() / want[3]
    };
    let (coarse, fine) = (err(0.1), err(0.05));
    assert!(fine < coarse, "{fine} vs {coarse}");
}
