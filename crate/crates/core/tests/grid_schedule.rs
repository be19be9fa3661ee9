mod common;

use proptest::prelude::*;
use vibro_core::config::{frequency_grid, FrequencyPlan};
use vibro_core::mesh::{build_schedule, level_supports, SUPPORTS_REQUIRED};
use vibro_core::Error;

use common::{plan, small_slice};

fn three_level_slice() -> vibro_core::config::ModelConfig {
    let mut cfg = small_slice();
    let sizes = [
        [[0.06, 0.003], [0.05, 0.05], [0.08, 0.008], [0.2, 0.2]],
        [[0.04, 0.003], [0.03, 0.03], [0.05, 0.008], [0.1, 0.1]],
        [[0.02, 0.003], [0.02, 0.02], [0.03, 0.008], [0.03, 0.03]],
    ];
    for (d, dom) in cfg.domains.iter_mut().enumerate() {
        dom.levels = sizes.iter().map(|l| l[d]).collect();
    }
    cfg.frequency = plan(10.0, 1000.0, 2.0, &[10.0, 258.0, 578.0, 1000.0]);
    cfg
}

#[test]
fn every_band_meets_the_criterion_on_its_level() {
    let cfg = three_level_slice();
    cfg.validate().unwrap();
    let s = build_schedule(&cfg).unwrap();
    let grid = frequency_grid(&cfg.frequency);
    assert_eq!(grid.len(), 496);
    for p in &grid {
        let sizes = &s.levels[s.band_level[p.band]];
        assert!(level_supports(&cfg, sizes, p.f).unwrap() >= SUPPORTS_REQUIRED, "{} Hz", p.f);
    }
    assert!(s.band_level.windows(2).all(|w| w[0] <= w[1]));
    // a coarser level serves the first band
    assert!(s.band_level[0] < s.band_level[2]);
}

#[test]
fn switch_frequency_is_the_last_feasible_grid_point() {
    let cfg = three_level_slice();
    let s = build_schedule(&cfg).unwrap();
    for (l, sw) in s.f_switch.iter().enumerate() {
        let ok = |f: f64| level_supports(&cfg, &s.levels[l], f).unwrap() >= SUPPORTS_REQUIRED;
        match sw {
            None => assert!(ok(cfg.frequency.f_max)),
            Some(f) => {
                assert!(ok(*f));
                assert!(!ok(f + cfg.frequency.delta_f));
            }
        }
    }
}

#[test]
fn infeasible_finest_level_is_reported() {
    let mut cfg = three_level_slice();
    for d in &mut cfg.domains {
        let last = d.levels.len() - 1;
        d.levels[last] = d.levels[0];
    }
    assert!(matches!(build_schedule(&cfg), Err(Error::Infeasible(_))));
}

proptest! {
    #[test]
    fn grid_count(f_min in 1.0f64..100.0, df in 0.1f64..10.0, steps in 0usize..500) {
        let f_max = f_min + steps as f64 * df;
        let p = FrequencyPlan { f_min, f_max, delta_f: df, band_edges: vec![f_min, f_max] };
        let g = frequency_grid(&p);
        prop_assert_eq!(g.len(), steps + 1);
        prop_assert!(g.windows(2).all(|w| w[0].f < w[1].f));
    }

    #[test]
    fn bands_are_monotone(cut in 0.05f64..0.95, cut2 in 0.05f64..0.95) {
        let (a, b) = if cut < cut2 { (cut, cut2) } else { (cut2, cut) };
        prop_assume!(b - a > 0.01);
        let e1 = 10.0 + a * 990.0;
        let e2 = 10.0 + b * 990.0;
        let p = plan(10.0, 1000.0, 2.0, &[10.0, e1, e2, 1000.0]);
        let g = frequency_grid(&p);
        prop_assert!(g.windows(2).all(|w| w[0].band <= w[1].band));
        for x in &g {
            let (lo, hi) = p.band_range(x.band);
            prop_assert!(x.f <= hi && (x.f > lo || x.band == 0));
        }
    }
}
