//! Scalar helpers that work without `std`.

pub use num_complex::Complex64 as C64;

pub const PI: f64 = core::f64::consts::PI;
pub const TAU: f64 = core::f64::consts::TAU;

/// Reference pressure for sound pressure levels, Pa.
pub const P_REF: f64 = 20e-6;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn log10(x: f64) -> f64 {
    libm::log10(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

#[inline]
pub fn cis(phase: f64) -> C64 {
    C64::new(libm::cos(phase), libm::sin(phase))
}

#[inline]
pub fn angular(f: f64) -> f64 {
    TAU * f
}

/// Euclidean norm of a complex vector.
pub fn norm2(v: &[C64]) -> f64 {
    let mut scale = 0.0f64;
    let mut ssq = 1.0f64;
    for z in v {
        for a in [z.re, z.im] {
            if a != 0.0 {
                let a = abs(a);
                if scale < a {
                    ssq = 1.0 + ssq * (scale / a) * (scale / a);
                    scale = a;
                } else {
                    ssq += (a / scale) * (a / scale);
                }
            }
        }
    }
    scale * sqrt(ssq)
}

/// `⟨a, b⟩ = aᴴ b`.
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `y += alpha * x`
pub fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Sound pressure level of a set of complex pressure amplitudes,
/// `20·log10(p_rms / 20 µPa)` with `p_rms² = mean(|p|²) / 2`.
pub fn spl(pressures: &[C64]) -> f64 {
    if pressures.is_empty() {
        return f64::NEG_INFINITY;
    }
    let ms = pressures.iter().map(|p| p.norm_sqr()).sum::<f64>() / (2.0 * pressures.len() as f64);
    10.0 * log10(ms / (P_REF * P_REF))
}
