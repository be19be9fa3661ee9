use nalgebra::{DMatrix, SymmetricEigen};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use vibro_core::element::{
    elastic_stiffness, gauss, rect_element, scalar_laplace, scalar_mass, ElementGeometry, NODE_REF,
};

/// Unit square with every node moved by up to `amp` and the curved edges
/// that follow; rejected unless the Jacobian stays positive on a fine grid.
fn distorted(rng: &mut StdRng, amp: f64) -> ElementGeometry {
    loop {
        let mut g = rect_element(0.0, 0.0, 1.0, 1.0);
        for p in g.nodes.iter_mut() {
            p[0] += rng.random_range(-amp..amp);
            p[1] += rng.random_range(-amp..amp);
        }
        let ok = (0..=20).all(|i| {
            (0..=20).all(|j| g.det_jacobian(-1.0 + 0.1 * i as f64, -1.0 + 0.1 * j as f64) > 0.05)
        });
        if ok {
            return g;
        }
    }
}

fn eigenvalues(k: &[[f64; 18]; 18]) -> Vec<f64> {
    let m = DMatrix::from_fn(18, 18, |i, j| k[i][j]);
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

#[test]
fn inverse_map_round_trip() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let g = distorted(&mut rng, 0.12);
        for _ in 0..20 {
            let xi = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let x = g.map(xi[0], xi[1]);
            let r = g.inverse_map(x, 0).unwrap();
            let y = g.map(r[0], r[1]);
            worst = worst.max((y[0] - x[0]).hypot(y[1] - x[1]));
            assert!((r[0] - xi[0]).abs() < 1e-9 && (r[1] - xi[1]).abs() < 1e-9);
        }
    }
    assert!(worst < 1e-10, "worst forward(inverse(x)) error {worst}");
}

#[test]
fn inverse_map_rejects_outside_points() {
    let g = rect_element(0.0, 0.0, 2.0, 1.0);
    assert!(g.inverse_map([2.5, 0.5], 3).is_err());
    let r = g.inverse_map([1.5, 0.25], 0).unwrap();
    assert!((r[0] - 0.5).abs() < 1e-14 && (r[1] + 0.5).abs() < 1e-14);
}

#[test]
fn elastic_stiffness_has_three_rigid_modes() {
    let mut rng = StdRng::seed_from_u64(3);
    for g in [rect_element(0.0, 0.0, 0.05, 0.003), distorted(&mut rng, 0.1)] {
        let ev = eigenvalues(&elastic_stiffness(&g, 70e9, 0.33, 1.0, 0).unwrap());
        let scale = ev[17];
        assert!(ev[..3].iter().all(|v| v.abs() < 1e-10 * scale), "{ev:?}");
        assert!(ev[3] > 1e-8 * scale, "{ev:?}");
    }
}

#[test]
fn rigid_motions_are_stress_free() {
    let g = rect_element(0.2, 0.1, 0.7, 0.4);
    let k = elastic_stiffness(&g, 1.0, 0.25, 1.0, 0).unwrap();
    // rotation about the origin: u = (−y, x)
    let mut u = [0.0; 18];
    for (a, p) in g.nodes.iter().enumerate() {
        u[2 * a] = -p[1];
        u[2 * a + 1] = p[0];
    }
    for row in &k {
        let f: f64 = row.iter().zip(&u).map(|(a, b)| a * b).sum();
        assert!(f.abs() < 1e-13);
    }
}

#[test]
fn scalar_matrices_integrate_exactly() {
    let g = rect_element(0.0, 0.0, 0.3, 0.2);
    let m = scalar_mass(&g, 0).unwrap();
    let area: f64 = m.iter().flatten().sum();
    assert!((area - 0.06).abs() < 1e-15);
    let l = scalar_laplace(&g, 0).unwrap();
    for row in &l {
        assert!(row.iter().sum::<f64>().abs() < 1e-13);
    }
    // ∫ |∇x|² = area for the linear field u = x
    let x: Vec<f64> = g.nodes.iter().map(|p| p[0]).collect();
    let e: f64 = (0..9).map(|a| (0..9).map(|b| x[a] * l[a][b] * x[b]).sum::<f64>()).sum();
    assert!((e - 0.06).abs() < 1e-14);
}

#[test]
fn gauss_rules_integrate_polynomials() {
    for (n, deg) in [(1, 1), (2, 3), (3, 5), (5, 9)] {
        let q = gauss(n);
        for p in 0..=deg {
            let got: f64 = q.iter().map(|(t, w)| w * t.powi(p)).sum();
            let want = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
            assert!((got - want).abs() < 1e-14, "{n}-point rule, degree {p}");
        }
    }
    assert_eq!(NODE_REF.len(), 9);
}
