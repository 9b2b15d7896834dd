use super::eigen::{pauli_components, require_hermitian};
use super::{c, ComplexMatrix};
use crate::error::{Error, Result};

const TAYLOR_ORDER: usize = 12;
const SCALED_NORM_TARGET: f64 = 0.5;

/// Matrix exponential by scaling and squaring around a 12th-order Taylor core.
///
/// The number of squarings `s` is the smallest with `‖A‖₁ / 2^s ≤ 0.5`, where
/// the truncation error of the core is below `1e-14` relative.
pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_finite() {
        return Err(Error::InvalidArgument("expm of a non-finite matrix".into()));
    }
    let norm = a.norm_one();
    let squarings = if norm <= SCALED_NORM_TARGET {
        0
    } else {
        (norm / SCALED_NORM_TARGET).log2().ceil() as i32
    };
    let scaled = *a * 0.5f64.powi(squarings);

    let id = ComplexMatrix::identity(a.dim())?;
    // Horner: I + X(I + X/2(I + X/3(...)))
    let mut acc = id;
    for k in (1..=TAYLOR_ORDER).rev() {
        acc = id + scaled * acc * (1.0 / k as f64);
    }
    for _ in 0..squarings {
        acc = acc * acc;
    }
    Ok(acc)
}

/// `exp(−iHt)` for a Hermitian 2×2 `H` (rad/s) and time `t` (s), evaluated in
/// closed form from `H = a·I + b·σ`:
/// `exp(−iHt) = e^{−iat} (cos(|b|t)·I − i sin(|b|t)·b̂·σ)`.
pub fn unitary_2x2(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if h.dim() != 2 {
        return Err(Error::InvalidArgument("unitary_2x2 needs a 2×2 matrix".into()));
    }
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be finite, got {t}")));
    }
    require_hermitian(h)?;
    let (a, b) = pauli_components(h);
    let r = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    let rt = r * t;
    // sin(rt)/r without dividing by a vanishing r.
    let sinc_t = if rt.abs() < 1e-8 {
        t * (1.0 - rt * rt / 6.0)
    } else {
        rt.sin() / r
    };
    let id = ComplexMatrix::identity(2)?;
    let rot = id * rt.cos() - ComplexMatrix::pauli_dot(b) * c(0.0, sinc_t);
    let phase = c(0.0, -a * t).exp();
    Ok(rot * phase)
}
