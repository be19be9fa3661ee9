use std::collections::BTreeMap;

use vibro_core::config::Rect;
use vibro_core::mesh::{generate_mesh, Mesh};
use vibro_core::mortar::{conforming_entries, coupling_entries, detect_interfaces, entry_matrix};

fn skin_and_fluid(ns: usize, nf: usize) -> (Mesh, Mesh) {
    let w = 1.2;
    let s = generate_mesh(&Rect::new(0.0, 0.0, w, 0.004), [w / ns as f64, 0.004]).unwrap();
    let f = generate_mesh(&Rect::new(0.0, 0.004, w, 0.5), [w / nf as f64, 0.1]).unwrap();
    assert_eq!((s.nx, f.nx), (ns, nf));
    (s, f)
}

#[test]
fn conforming_limit() {
    let t0 = std::time::Instant::now();
    for n in [1, 4, 12] {
        let (s, f) = skin_and_fluid(n, n);
        let itf = detect_interfaces(&s, &f, 3).unwrap();
        let a = entry_matrix(&coupling_entries(&itf, &s, &f), s.nodes.len(), f.nodes.len());
        let b = entry_matrix(&conforming_entries(&s, &f, 3).unwrap(), s.nodes.len(), f.nodes.len());
        let mut worst = 0.0f64;
        for (i, j, v) in a.triplets() {
            worst = worst.max((v - b.get(i, j)).abs());
        }
        for (i, j, v) in b.triplets() {
            worst = worst.max((v - a.get(i, j)).abs());
        }
        assert!(worst < 1e-10, "{n} elements: max |Δ| = {worst}");
    }
    assert!(t0.elapsed().as_secs_f64() < 1.0);
}

/// `∫ N_b` of every trace node of a quadratic 1D mesh: `ℓ/6` at element
/// ends (summed over neighbours) and `2ℓ/3` at mid nodes.
fn trace_integrals(mesh: &Mesh, y: f64) -> BTreeMap<usize, f64> {
    let mut out = BTreeMap::new();
    let on: Vec<usize> = (0..mesh.nodes.len()).filter(|&k| (mesh.nodes[k][1] - y).abs() < 1e-12).collect();
    let mut xs: Vec<(f64, usize)> = on.iter().map(|&k| (mesh.nodes[k][0], k)).collect();
    xs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for e in xs.windows(3).step_by(2) {
        let l = e[2].0 - e[0].0;
        *out.entry(e[0].1).or_insert(0.0) += l / 6.0;
        *out.entry(e[1].1).or_insert(0.0) += 2.0 * l / 3.0;
        *out.entry(e[2].1).or_insert(0.0) += l / 6.0;
    }
    out
}

#[test]
fn partition_of_unity() {
    for (ns, nf) in [(6, 6), (12, 6), (6, 12), (9, 6), (6, 9)] {
        let (s, f) = skin_and_fluid(ns, nf);
        let itf = detect_interfaces(&s, &f, 3).unwrap();
        let entries = coupling_entries(&itf, &s, &f);
        // normal out of the fluid is −y, so every entry carries a minus sign
        let mut by_fluid: BTreeMap<usize, f64> = BTreeMap::new();
        let mut by_structure: BTreeMap<usize, f64> = BTreeMap::new();
        for &(a, c, b, v) in &entries {
            assert_eq!(c, 1);
            *by_fluid.entry(b).or_insert(0.0) -= v;
            *by_structure.entry(a).or_insert(0.0) -= v;
        }
        for (sums, oracle) in [(by_fluid, trace_integrals(&f, 0.004)), (by_structure, trace_integrals(&s, 0.004))] {
            assert_eq!(sums.len(), oracle.len());
            for (k, want) in &oracle {
                let got = sums[k];
                assert!((got - want).abs() < 1e-12, "{ns}:{nf} node {k}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn total_coupling_is_the_interface_length() {
    let (s, f) = skin_and_fluid(7, 5);
    let itf = detect_interfaces(&s, &f, 3).unwrap();
    let total: f64 = coupling_entries(&itf, &s, &f).iter().map(|e| e.3).sum();
    assert!((total + 1.2).abs() < 1e-12);
}

#[test]
fn partial_overlap_is_cut_to_the_shared_segment() {
    let s = generate_mesh(&Rect::new(0.0, 0.0, 1.0, 0.01), [0.25, 0.01]).unwrap();
    let f = generate_mesh(&Rect::new(0.4, 0.01, 2.0, 1.0), [0.4, 0.5]).unwrap();
    let itf = detect_interfaces(&s, &f, 3).unwrap();
    assert!((itf.segment.lo - 0.4).abs() < 1e-15 && (itf.segment.hi - 1.0).abs() < 1e-15);
    let covered: f64 = itf.elements.iter().map(|e| e.length()).sum();
    assert!((covered - 0.6).abs() < 1e-12);
}
