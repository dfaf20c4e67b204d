//! Kronig–Penney closed forms for `q = α Σ δ(x − n)`.

use crate::propagator::Mat2;
use crate::scalar::Real;

/// `(cos s x, sin s x / s)` and their λ-continuation, with `s = √λ`.
fn cos_sinc<T: Real>(lambda: T) -> (T, T, T) {
    if lambda > T::zero() {
        let s = lambda.sqrt();
        let (sin, cos) = s.sin_cos();
        (cos, sin / s, -s * sin)
    } else if lambda < T::zero() {
        let t = (-lambda).sqrt();
        let (sinh, cosh) = (t.sinh(), t.cosh());
        (cosh, sinh / t, t * sinh)
    } else {
        (T::one(), T::one(), T::zero())
    }
}

/// Period map of `−u'' = λu` in `(u, u')` coordinates.
pub fn free_transfer<T: Real>(lambda: T) -> Mat2<T> {
    let (c, sinc, d) = cos_sinc(lambda);
    Mat2::new(c, sinc, d, c)
}

/// `2cos s + α sin s / s`, `s = √λ`, continued through `λ = 0` (value `2 + α`)
/// to `2cosh t + α sinh t / t` for `λ = −t² < 0`.
pub fn kp_discriminant<T: Real>(alpha: T, lambda: T) -> T {
    let (c, sinc, _) = cos_sinc(lambda);
    T::two() * c + alpha * sinc
}

/// Classical period map from `0⁺` to `1⁺`: free flight across the cell, then
/// the jump `u' ↦ u' + αu` at the delta.
pub fn kp_transfer<T: Real>(alpha: T, lambda: T) -> Mat2<T> {
    let jump = Mat2::new(T::one(), T::zero(), alpha, T::one());
    jump * free_transfer(lambda)
}

/// Period map in `(u, u' − Qu)` coordinates for the sawtooth primitive
/// `Q = α(1/2 − x)` on `(0, 1)`, from `x = 0` to `x = 1`.
///
/// At both ends `u' = u^[1] ± (α/2) u` with the signs arranged so the map is
/// `S F S` with `S = [[1, 0], [α/2, 1]]`; note `S² = J`, so its trace equals
/// that of [`kp_transfer`].
pub fn kp_quasi_transfer<T: Real>(alpha: T, lambda: T) -> Mat2<T> {
    let s = Mat2::new(T::one(), T::zero(), T::half() * alpha, T::one());
    s * free_transfer(lambda) * s
}
