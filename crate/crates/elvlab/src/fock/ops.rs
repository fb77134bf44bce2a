//! The five basic exponential operators of the free-field realization.
//!
//! Each basic operator has the shape
//!
//! ```text
//! X(v) = e^{ s (iQ_w + P_w (log z + offset)) }
//!        : exp( sum_{m != 0} (coefficient of B^c_m) B^c_m ) :        z = x^{2v},
//! ```
//!
//! i.e. zero-mode data (a charge vector `s * w` in the weight lattice and a
//! possible displacement `offset` of the momentum's logarithmic argument)
//! plus, for every mode `m >= 1` and color `c`, one annihilation coefficient
//! (of `B^c_{+m}`) and one creation coefficient (of `B^c_{-m}`).
//!
//! The five kinds:
//!
//! * [`OpKind::UAlpha`] — unprimed-level screening operator attached to the
//!   simple root `alpha_j`; mode sum `+ sum (1/m)(B^j_m - B^{j+1}_m)(x^j z)^{-m}`.
//! * [`OpKind::UOmega`] — unprimed-level weight operator attached to the
//!   fundamental weight `omega_j`; mode sum
//!   `- sum (1/m) sum_{k<=j} x^{(j-2k+1)m} B^k_m z^{-m}`.
//! * [`OpKind::VAlpha`], [`OpKind::VOmega`] — the primed-level partners,
//!   obtained by substituting the level-transformed modes
//!   `A^j_m = (-1)^m [r m]_x / [(r-1) m]_x * B^j_m` and flipping the overall
//!   sign of the mode sum.
//! * [`OpKind::WAlpha`] — the half-level auxiliary screener: level transform
//!   `O^j_m = [m]_x / [(r-1) m]_x * B^j_m`, negative mode sum, and momentum
//!   argument `log((-1)^r z) = log z + i pi r`.
//!
//! The zero-mode charges are `-b1 alpha_j`, `+b1 omega_j`, `-b2 alpha_j`,
//! `+b2 omega_j`, `-b0 alpha_j` respectively, where `b1 = -sqrt((r-1)/r)`,
//! `b2 = sqrt(r/(r-1))` are the two roots of `t^2 - b0 t - 1` and
//! `b0 = 1/sqrt(r(r-1))`.  Charges are stored in traceless ambient
//! coordinates so the plain Euclidean dot product computes lattice pairings.

use std::f64::consts::PI;

use serde::Serialize;

use super::precise::{mp, mp_f64, x_number_mp, xpow_mp, Mp};
use crate::error::{Error, Result};
use crate::params::{ModelParams, C};
use crate::weights::{alpha_coords, omega_coords};

/// Selector for the five basic exponential operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum OpKind {
    /// Unprimed-level screening operator on the simple root `alpha_j`.
    UAlpha,
    /// Unprimed-level weight operator on the fundamental weight `omega_j`.
    UOmega,
    /// Primed-level screening operator on `alpha_j`.
    VAlpha,
    /// Primed-level weight operator on `omega_j`.
    VOmega,
    /// Half-level auxiliary screening operator on `alpha_j`.
    WAlpha,
}

/// Level transform multiplier `(-1)^m [r m]_x / [(r-1) m]_x` carrying the
/// unprimed color bosons to their primed-level partners.
///
/// Even in `m` as a function on modes (`m` and `-m` get the same multiplier),
/// which is why a single table per positive mode suffices.
pub fn a_transform(m: usize, params: &ModelParams) -> f64 {
    mp_f64(&a_transform_mp(m, &mp(params.x()), params.r))
}

pub(crate) fn a_transform_mp(m: usize, x: &Mp, r: f64) -> Mp {
    let mf = m as f64;
    let t = x_number_mp(r * mf, x) / x_number_mp((r - 1.0) * mf, x);
    if m % 2 == 0 {
        t
    } else {
        -t
    }
}

/// Level transform multiplier `[m]_x / [(r-1) m]_x` for the half-level
/// auxiliary bosons.  Also even in `m`.
pub fn o_transform(m: usize, params: &ModelParams) -> f64 {
    mp_f64(&o_transform_mp(m, &mp(params.x()), params.r))
}

pub(crate) fn o_transform_mp(m: usize, x: &Mp, r: f64) -> Mp {
    let mf = m as f64;
    x_number_mp(mf, x) / x_number_mp((r - 1.0) * mf, x)
}

/// A basic exponential operator with explicit mode-coefficient maps.
///
/// `ann[m-1][c-1]` is the coefficient of the annihilation mode `B^c_{+m}` in
/// the exponent, `cre[m-1][c-1]` that of the creation mode `B^c_{-m}`, for
/// `1 <= m <= cutoff` and colors `1 <= c <= n`.  The zero-mode exponential is
/// `exp(sum_c charge[c-1] (iQ_c + P_c (log z + log_offset)))` in traceless
/// ambient coordinates.
#[derive(Debug, Clone)]
pub struct FreeFieldOperator {
    /// Which of the five displayed operators this is.
    pub kind: OpKind,
    /// Root/weight index `j` in `1..=n-1`.
    pub j: usize,
    /// Spectral parameter `v`; the operator argument is `z = x^{2v}`.
    pub v: C,
    /// Zero-mode charge vector in traceless ambient coordinates.
    pub charge: Vec<f64>,
    /// Displacement of the momentum's logarithmic argument (`i pi r` for the
    /// half-level screener, `0` otherwise).
    pub log_offset: C,
    /// Number of positive modes tabulated.
    pub cutoff: usize,
    /// `ann[m-1][c-1]`: coefficient of `B^c_{+m}`.
    pub ann: Vec<Vec<C>>,
    /// `cre[m-1][c-1]`: coefficient of `B^c_{-m}`.
    pub cre: Vec<Vec<C>>,
    /// The `z`-stripped magnitude of `ann`, at extended precision:
    /// `ann[m-1][c-1] = ann_mag[m-1][c-1] * z^{-m}` with `ann_mag` real.
    /// Contraction sums use these so the `x`-power cancellations happen
    /// before any rounding to `f64`.
    pub(crate) ann_mag: Vec<Vec<Mp>>,
    /// The `z`-stripped magnitude of `cre`:
    /// `cre[m-1][c-1] = cre_mag[m-1][c-1] * z^{+m}`.
    pub(crate) cre_mag: Vec<Vec<Mp>>,
}

impl FreeFieldOperator {
    /// Number of colors `n`.
    pub fn n(&self) -> usize {
        self.charge.len()
    }

    /// The multiplicative argument `z = x^{2v}`.
    pub fn z(&self, params: &ModelParams) -> C {
        params.z_of_v(self.v)
    }

    /// Zero-mode lattice shifts `(unprimed, primed)` this operator applies to
    /// a highest-weight sector, in traceless ambient coordinates.
    ///
    /// Screening operators lower their sector label by `alpha_j` (the
    /// unprimed label for `UAlpha`, the primed one for `VAlpha`, both for
    /// `WAlpha`); weight operators raise theirs by `omega_j`.
    pub fn sector_shift(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.n();
        let zero = vec![0.0; n];
        let neg = |v: Vec<f64>| v.into_iter().map(|c| -c).collect::<Vec<f64>>();
        Ok(match self.kind {
            OpKind::UAlpha => (neg(alpha_coords(self.j, n)?), zero),
            OpKind::UOmega => (omega_coords(self.j, n)?, zero),
            OpKind::VAlpha => (zero, neg(alpha_coords(self.j, n)?)),
            OpKind::VOmega => (zero, omega_coords(self.j, n)?),
            OpKind::WAlpha => {
                let a = alpha_coords(self.j, n)?;
                (neg(a.clone()), neg(a))
            }
        })
    }
}

/// Build a basic operator with modes tabulated up to `cutoff`.
///
/// `j` must lie in `1..=n-1` (simple roots and fundamental weights share the
/// same index range) and `cutoff >= 1`.
pub fn build_basic_op(
    kind: OpKind,
    j: usize,
    v: C,
    cutoff: usize,
    params: &ModelParams,
) -> Result<FreeFieldOperator> {
    let n = params.n;
    if j < 1 || j >= n {
        return Err(Error::domain(format!(
            "operator index must lie in 1..={}, got {j}",
            n - 1
        )));
    }
    if cutoff == 0 {
        return Err(Error::domain("mode cutoff must be >= 1"));
    }
    let r = params.r;
    let beta1 = -((r - 1.0) / r).sqrt();
    let beta2 = (r / (r - 1.0)).sqrt();
    let beta0 = 1.0 / (r * (r - 1.0)).sqrt();
    let z = params.z_of_v(v);

    let (scale, coords, log_offset) = match kind {
        OpKind::UAlpha => (-beta1, alpha_coords(j, n)?, C::new(0.0, 0.0)),
        OpKind::UOmega => (beta1, omega_coords(j, n)?, C::new(0.0, 0.0)),
        OpKind::VAlpha => (-beta2, alpha_coords(j, n)?, C::new(0.0, 0.0)),
        OpKind::VOmega => (beta2, omega_coords(j, n)?, C::new(0.0, 0.0)),
        OpKind::WAlpha => (-beta0, alpha_coords(j, n)?, C::new(0.0, PI * r)),
    };
    let charge: Vec<f64> = coords.iter().map(|c| scale * c).collect();

    // Mode tables.  The z^{±m} factor is kept symbolic: per mode and color
    // only a real magnitude is computed (at extended precision, so downstream
    // contraction sums can cancel x-powers exactly), and the public complex
    // tables are magnitude * z^{∓m}.
    let x_mp = mp(params.x());
    let mut ann_mag = vec![vec![mp(0.0); n]; cutoff];
    let mut cre_mag = vec![vec![mp(0.0); n]; cutoff];
    for m in 1..=cutoff {
        let mf = m as f64;
        match kind {
            OpKind::UAlpha | OpKind::VAlpha | OpKind::WAlpha => {
                // s * sum_{m != 0} (1/m) (T^j_m - T^{j+1}_m) (x^j z)^{-m},
                // T in {B, A, O} with multiplier t(m).
                let (s, t) = match kind {
                    OpKind::UAlpha => (1.0, mp(1.0)),
                    OpKind::VAlpha => (-1.0, a_transform_mp(m, &x_mp, params.r)),
                    OpKind::WAlpha => (-1.0, o_transform_mp(m, &x_mp, params.r)),
                    _ => unreachable!(),
                };
                let st = mp(s / mf) * t;
                let down = st.clone() * xpow_mp(&x_mp, -(j as f64) * mf);
                let up = st * xpow_mp(&x_mp, j as f64 * mf);
                ann_mag[m - 1][j - 1] = down.clone();
                ann_mag[m - 1][j] = -down;
                cre_mag[m - 1][j - 1] = -up.clone();
                cre_mag[m - 1][j] = up;
            }
            OpKind::UOmega | OpKind::VOmega => {
                // s * sum_{m != 0} (1/m) sum_{k<=j} x^{(j-2k+1)m} T^k_m z^{-m}.
                let (s, t) = match kind {
                    OpKind::UOmega => (-1.0, mp(1.0)),
                    OpKind::VOmega => (1.0, a_transform_mp(m, &x_mp, params.r)),
                    _ => unreachable!(),
                };
                let st = mp(s / mf) * t;
                for k in 1..=j {
                    let e = (j as f64 - 2.0 * k as f64 + 1.0) * mf;
                    ann_mag[m - 1][k - 1] = st.clone() * xpow_mp(&x_mp, e);
                    cre_mag[m - 1][k - 1] = -(st.clone() * xpow_mp(&x_mp, -e));
                }
            }
        }
    }
    let zero = C::new(0.0, 0.0);
    let mut ann = vec![vec![zero; n]; cutoff];
    let mut cre = vec![vec![zero; n]; cutoff];
    for m in 1..=cutoff {
        let mi = m as i32;
        let down = z.powi(-mi);
        let up = z.powi(mi);
        for c in 0..n {
            ann[m - 1][c] = mp_f64(&ann_mag[m - 1][c]) * down;
            cre[m - 1][c] = mp_f64(&cre_mag[m - 1][c]) * up;
        }
    }

    Ok(FreeFieldOperator {
        kind,
        j,
        v,
        charge,
        log_offset,
        cutoff,
        ann,
        cre,
        ann_mag,
        cre_mag,
    })
}
