//! Smooth cut-off functions built from the transition
//!
//! ```text
//! S(x) = e(x) / (e(x) + e(1 - x)),   e(x) = exp(-1/x) for x > 0, 0 otherwise
//! ```
//!
//! which is `C^∞`, equals 0 for `x ≤ 0` and 1 for `x ≥ 1`. With it,
//!
//! ```text
//! f(s) = S(4s - 1)        on [1/4, 1/2]      g(τ) = 1           on [0, 1]
//!      = 1                on [1/2, 2/3]           = S(2 - τ)    on [1, 2]
//!      = S(12 (3/4 - s))  on [2/3, 3/4]           = 0           on [2, ∞)
//!      = 0                elsewhere
//! ```

/// `S`, `S'`, `S''` at `x`.
pub fn smooth_step(x: f64) -> (f64, f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if x >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let y = 1.0 - x;
    // S = 1 / (1 + exp(1/x - 1/y)) evaluated without overflow
    let d = 1.0 / x - 1.0 / y;
    let (s, one_minus) = if d > 0.0 {
        let e = (-d).exp();
        (e / (1.0 + e), 1.0 / (1.0 + e))
    } else {
        let e = d.exp();
        (1.0 / (1.0 + e), e / (1.0 + e))
    };
    let q = 1.0 / (x * x) + 1.0 / (y * y);
    let dq = -2.0 / (x * x * x) + 2.0 / (y * y * y);
    let w = s * one_minus;
    (s, w * q, w * ((one_minus - s) * q * q + dq))
}

/// `S(x)(1 - S(x))`, accurate when either factor is tiny.
pub fn step_product(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let d = 1.0 / x - 1.0 / (1.0 - x);
    let e = (-d.abs()).exp();
    e / ((1.0 + e) * (1.0 + e))
}

/// The time cut-off `f` and its derivative.
pub fn time_cutoff(s: f64) -> (f64, f64) {
    if s <= 0.25 || s >= 0.75 {
        (0.0, 0.0)
    } else if s < 0.5 {
        let (v, d, _) = smooth_step(4.0 * s - 1.0);
        (v, 4.0 * d)
    } else if s <= 2.0 / 3.0 {
        (1.0, 0.0)
    } else {
        let (v, d, _) = smooth_step(12.0 * (0.75 - s));
        (v, -12.0 * d)
    }
}

/// The space cut-off `g` and its first two derivatives.
pub fn space_cutoff(tau: f64) -> (f64, f64, f64) {
    if tau <= 1.0 {
        (1.0, 0.0, 0.0)
    } else if tau >= 2.0 {
        (0.0, 0.0, 0.0)
    } else {
        let (v, d, dd) = smooth_step(2.0 - tau);
        (v, -d, dd)
    }
}
