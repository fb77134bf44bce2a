//! Extended-precision scalars for the mode-contraction sums.
//!
//! Contracting two weight-type operators sums Gram-weighted products whose
//! individual terms grow like `x^{-(n + r)m}` while the sum telescopes down
//! to `O(x^m)`: at mode `m = 12` and `x = 0.3` the terms exceed the result
//! by some twelve orders of magnitude, so `f64` term evaluation leaves only
//! a few correct digits in the sum — far short of the `1e-10` agreement the
//! contraction oracle must certify.  The mode magnitudes and Gram entries
//! are therefore computed and summed at 128 bits and rounded to `f64` once,
//! after the cancellation has already happened.  Everything downstream of
//! the contraction stays in ordinary `f64`.

use dashu_float::FBig;

/// Multiprecision real scalar (binary mantissa, 128-bit working precision).
pub(crate) type Mp = FBig;

const PREC_BITS: usize = 128;

/// Lift a finite `f64` into the working precision.  The `f64` value itself
/// is taken as exact — the closed-form comparisons use the same value.
pub(crate) fn mp(v: f64) -> Mp {
    Mp::try_from(v)
        .expect("multiprecision lift of a non-finite value")
        .with_precision(PREC_BITS)
        .value()
}

/// Round to the nearest `f64`.
pub(crate) fn mp_f64(v: &Mp) -> f64 {
    v.to_f64().value()
}

/// `x^e` for real `e` at working precision.
pub(crate) fn xpow_mp(x: &Mp, e: f64) -> Mp {
    x.powf(&mp(e))
}

/// Symmetric `x`-integer `[a]_x = (x^a - x^{-a}) / (x - x^{-1})` at working
/// precision.
pub(crate) fn x_number_mp(a: f64, x: &Mp) -> Mp {
    (xpow_mp(x, a) - xpow_mp(x, -a)) / (x - mp(1.0) / x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn telescoping_survives_at_working_precision() {
        // [2m]x^{-m} - [m]x^{-2m} = [m]: the identity behind the weight-pair
        // contractions, with terms ~x^{-3m} cancelling to ~x^{-m}.  In f64
        // the residual relative error is ~1e-3 at m = 12; here it must be
        // below f64 resolution.
        let x = mp(0.3);
        let m = 12.0;
        let lhs = x_number_mp(2.0 * m, &x) * xpow_mp(&x, -m)
            - x_number_mp(m, &x) * xpow_mp(&x, -2.0 * m);
        let rhs = x_number_mp(m, &x);
        let rel = mp_f64(&((lhs - &rhs) / rhs)).abs();
        assert!(rel < 1e-22, "telescoping residual {rel:e}");
    }

    #[test]
    fn round_trip_and_powers_match_f64_scale() {
        let x = mp(0.3);
        assert_eq!(mp_f64(&x), 0.3);
        // f64::powf itself is only correct to ~1 ulp; the extended-precision
        // power should sit within a few ulps of it.
        let p = xpow_mp(&x, 5.5);
        let f = 0.3f64.powf(5.5);
        assert!((mp_f64(&p) - f).abs() < 1e-15 * f);
        // Exactness of the f64 lift: 0.1's binary value, not its decimal.
        let y = mp(0.1);
        assert_eq!(mp_f64(&y), 0.1);
    }
}
