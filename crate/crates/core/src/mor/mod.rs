//! Model order reduction of the frequency sweep.
//!
//! Moments of the full system are computed from the plane-wave load at a
//! sequence of expansion frequencies picked greedily where the current
//! reduced model is worst. The projected model keeps one dense `r × r`
//! matrix per stored operator term, so evaluating it at a new frequency
//! applies the exact frequency-dependent coefficients to fixed reduced
//! matrices. Local models cover windows of the band; a sweep stitches them
//! together.

mod fom;
mod greedy;
mod krylov;
mod reduced;
mod sweep;

pub use fom::FullOrderModel;
pub use greedy::{build_local_roms, candidate_points, greedy_expand, verification_points, verify_rom, GreedyOutcome};
pub use krylov::{krylov_block, KrylovBlock};
pub use reduced::{project, test_weights, ErrorSample, ReducedLoad, ReducedModel, ReducedTerm, ROM_FORMAT_VERSION};
pub use sweep::{rom_sweep, RomRecord, RomSweep, Seam};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{norm2, C64};

/// Tolerance on window edge coincidence, Hz.
pub const WINDOW_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativeError {
    pub value: f64,
    /// `‖y‖ = 0`: `value` is the absolute error
    pub absolute: bool,
}

/// `‖y − y_R‖ / ‖y‖`, falling back to the absolute error when `y = 0`.
pub fn relative_error(y: &[C64], y_rom: &[C64]) -> RelativeError {
    assert_eq!(y.len(), y_rom.len());
    let diff: Vec<C64> = y.iter().zip(y_rom).map(|(a, b)| a - b).collect();
    let d = norm2(&diff);
    let n = norm2(y);
    if n > 0.0 {
        RelativeError { value: d / n, absolute: false }
    } else {
        RelativeError { value: d, absolute: true }
    }
}

/// Largest error of `(f, ε)` samples as `(f_argmax, ε_max)`.
pub fn max_error(samples: &[(f64, f64)]) -> Option<(f64, f64)> {
    samples.iter().copied().fold(None, |best, (f, e)| match best {
        Some((_, b)) if b >= e => best,
        _ => Some((f, e)),
    })
}

/// Explicit windows must be ordered, non-empty, contiguous and cover
/// `[f_lo, f_hi]`.
pub fn validate_windows(windows: &[[f64; 2]], f_lo: f64, f_hi: f64) -> Result<()> {
    if windows.is_empty() {
        return Err(Error::Validation("mor windows: empty list".into()));
    }
    for w in windows {
        if !(w[0] < w[1]) {
            return Err(Error::Validation(format!("mor window [{}, {}] is empty", w[0], w[1])));
        }
    }
    for p in windows.windows(2) {
        if (p[0][1] - p[1][0]).abs() > WINDOW_TOL {
            return Err(Error::Validation(format!(
                "mor windows not contiguous: [{}, {}] then [{}, {}]",
                p[0][0], p[0][1], p[1][0], p[1][1]
            )));
        }
    }
    if windows[0][0] > f_lo + WINDOW_TOL || windows[windows.len() - 1][1] < f_hi - WINDOW_TOL {
        return Err(Error::Validation(format!("mor windows do not cover [{f_lo}, {f_hi}]")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub enum WindowMode {
    Explicit(Vec<[f64; 2]>),
    Auto,
}

/// Initial window list for a band. Explicit windows are validated and
/// returned as given; the automatic plan starts from the whole band and is
/// refined by bisection while building (see [`build_local_roms`]).
pub fn window_plan(band: [f64; 2], mode: &WindowMode) -> Result<Vec<[f64; 2]>> {
    if !(band[0] < band[1]) {
        return Err(Error::Validation(format!("band [{}, {}] is empty", band[0], band[1])));
    }
    match mode {
        WindowMode::Explicit(w) => {
            validate_windows(w, band[0], band[1])?;
            Ok(w.clone())
        }
        WindowMode::Auto => Ok(vec![band]),
    }
}

pub(crate) fn in_window(f: f64, w: [f64; 2]) -> bool {
    f >= w[0] - WINDOW_TOL && f <= w[1] + WINDOW_TOL
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_error_examples() {
        let y = [C64::new(1.0, 2.0), C64::new(-3.0, 0.5)];
        assert_eq!(relative_error(&y, &y).value, 0.0);
        let y2: Vec<C64> = y.iter().map(|v| v * 1.01).collect();
        assert!((relative_error(&y, &y2).value - 0.01).abs() < 1e-14);
        let z = [C64::new(0.0, 0.0)];
        let e = relative_error(&z, &[C64::new(0.0, 3.0)]);
        assert!(e.absolute);
        assert_eq!(e.value, 3.0);
    }

    #[test]
    fn max_error_reports_frequency_and_value() {
        assert_eq!(max_error(&[(10.0, 0.1), (12.0, 0.3), (14.0, 0.2)]), Some((12.0, 0.3)));
        assert_eq!(max_error(&[]), None);
    }

    #[test]
    fn windows() {
        let w = [[258.0, 418.0], [418.0, 578.0]];
        assert_eq!(window_plan([258.0, 578.0], &WindowMode::Explicit(w.to_vec())).unwrap(), w.to_vec());
        assert_eq!(window_plan([10.0, 258.0], &WindowMode::Auto).unwrap(), vec![[10.0, 258.0]]);
        assert!(validate_windows(&[[258.0, 400.0], [418.0, 578.0]], 258.0, 578.0).is_err());
        assert!(validate_windows(&[[258.0, 418.0]], 258.0, 578.0).is_err());
        assert!(validate_windows(&[[300.0, 200.0]], 200.0, 300.0).is_err());
    }
}
