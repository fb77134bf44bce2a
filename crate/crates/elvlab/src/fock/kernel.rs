//! Kernel descriptors: the scalar meromorphic content of an operator chain.
//!
//! A product `X_1(v_1) ... X_L(v_L)` of basic operators normal-orders to the
//! product of all pairwise scalars.  For integrand work what matters is not
//! the value but the *geometry*: in which variable ratios the scalar has
//! poles, on which side of the integration contour each pole family lies,
//! and where the scalar vanishes.  [`assemble_kernel`] derives all of that
//! from the pair classification alone and returns it in serializable form,
//! so the contour bookkeeping that justifies each integrand is data, not
//! prose.
//!
//! What gets recorded depends on how each factor is used in the displayed
//! integrands:
//!
//! * **Weight/screening pairs** (`ScreenU`, `ScreenV`) only occur with the
//!   screening variable integrated and a hopping-kernel bracket attached, so
//!   the cataloged laws are the *net* ones of that dressed combination: the
//!   scalar's numerator zeros cancel the bracket's backward pole ladder
//!   exactly, leaving for the unprimed family poles at
//!   `z_b = x^{+(1+2kr)} z_a` (inside the contour around `0`) and
//!   `z_b = x^{-(1+2kr)} z_a` (outside), `k >= 0`, and for the primed family
//!   poles at `z_b = x^{-1+2k(r-1)} z_a` (inside) and
//!   `z_b = x^{1-2k(r-1)} z_a` (outside) — the primed inside lattice *starts*
//!   at the slightly-outside point `x^{-1} z_a` and marches inward.  No zero
//!   rows survive the cancellation.
//! * **Same-root screening pairs** (`SameRootU`, `SameRootV`) enter the
//!   exchange and commutation identities undressed, so their own meromorphy
//!   is recorded: one outside pole family (`z_b = x^{-(2r-2+2kr)} z_a`
//!   unprimed, `z_b = x^{-(2r+2k(r-1))} z_a` primed) and the
//!   coinciding-point zero `z_b = z_a` plus its product lattice
//!   (`z_b = x^{-(2+2kr)} z_a` unprimed, `z_b = x^{2-2k(r-1)} z_a` primed).
//! * **Mixed same-root pairs**: two single poles `z_b = -x^{±1} z_a`, inside
//!   exactly when the primed operator stands on the left — the two orderings
//!   of the pair are expansions of the same rational function on opposite
//!   sides of these poles, which is what the delta-identity commutator
//!   measures.  The mixed linear pair records its zero at `z_b = -z_a`.
//! * **Weight/weight pairs and half-level screener pairs**: no catalog rows.
//!   Their left argument is a head variable that no displayed contour ever
//!   integrates (the screener's argument is moreover pinned to another chain
//!   variable), so no contour routes around their poles.

use serde::Serialize;

use super::ope::{classify_pair, closed_form_scalar, PairId};
use super::ops::{FreeFieldOperator, OpKind};
use crate::error::{Error, Result};
use crate::params::{ModelParams, C};

/// Which side of the integration contour a pole family lies on, for a
/// contour separating `0` from `infinity` in the ratio `z_var / z_base`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ContourSide {
    /// Enclosed together with the origin.
    Inside,
    /// Excluded, toward infinity.
    Outside,
}

/// One geometric family of poles `z_var = coeff * step^k * z_base`, `k >= 0`.
#[derive(Debug, Clone, Serialize)]
pub struct PoleLaw {
    /// Index (into the chain) of the variable the law constrains.
    pub var: usize,
    /// Index of the reference variable.
    pub base: usize,
    /// Location of the `k = 0` pole as a multiple of `z_base`.
    pub coeff: C,
    /// Multiplicative spacing of the family; `1.0` collapses it to the
    /// single `k = 0` point.
    pub step: f64,
    /// Human-readable statement of the law.
    pub law: String,
    /// Side of the contour of `z_var` on which the family lies.
    pub side: ContourSide,
}

/// One geometric family of zeros `z_var = coeff * step^k * z_base`, `k >= 0`.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroLaw {
    /// Index of the constrained variable.
    pub var: usize,
    /// Index of the reference variable.
    pub base: usize,
    /// Location of the `k = 0` zero as a multiple of `z_base`.
    pub coeff: C,
    /// Multiplicative spacing; `1.0` collapses to a single point.
    pub step: f64,
    /// Human-readable statement of the law.
    pub law: String,
}

/// One nontrivial pairwise factor of a chain.
#[derive(Debug, Clone, Serialize)]
pub struct FactorEntry {
    /// Index of the left operator in the chain.
    pub left: usize,
    /// Index of the right operator.
    pub right: usize,
    /// Classified scalar form of the ordered pair.
    pub pair: PairId,
}

/// Serializable scalar content of one operator chain: which classified
/// factors appear, where their poles lie relative to the integration
/// contours, and where the scalar vanishes.
#[derive(Debug, Clone, Serialize)]
pub struct KernelDescriptor {
    /// `(kind, index, spectral parameter)` of each chain operator.
    pub ops: Vec<(OpKind, usize, C)>,
    /// All non-commuting ordered pairs with their classifications.
    pub factors: Vec<FactorEntry>,
    /// Net pole-location laws with contour side tags.
    pub poles: Vec<PoleLaw>,
    /// Zero-location laws of the surviving numerator factors.
    pub zeros: Vec<ZeroLaw>,
}

impl KernelDescriptor {
    /// Evaluate the chain scalar at the stored spectral points: the product
    /// of the classified pairwise closed forms.
    pub fn eval(&self, params: &ModelParams) -> Result<C> {
        let mut acc = C::new(1.0, 0.0);
        for factor in &self.factors {
            let (_, _, v_left) = self.ops[factor.left];
            let (_, _, v_right) = self.ops[factor.right];
            acc *= closed_form_scalar(factor.pair, v_left, v_right, params)?;
        }
        Ok(acc)
    }
}

/// Normal-ordering scalar of a whole chain: the product of the pairwise
/// closed forms over all ordered pairs `(a, b)` with `a < b`.
pub fn chain_scalar(ops: &[FreeFieldOperator], params: &ModelParams) -> Result<C> {
    let mut acc = C::new(1.0, 0.0);
    for a in 0..ops.len() {
        for b in a + 1..ops.len() {
            let pair = classify_pair(&ops[a], &ops[b])?;
            acc *= closed_form_scalar(pair, ops[a].v, ops[b].v, params)?;
        }
    }
    Ok(acc)
}

/// Classify every ordered pair of a chain and derive the pole/zero catalog.
///
/// Errors if the chain is empty or contains a pair outside the product
/// table.  A single operator yields an empty catalog.
pub fn assemble_kernel(
    ops: &[FreeFieldOperator],
    params: &ModelParams,
) -> Result<KernelDescriptor> {
    if ops.is_empty() {
        return Err(Error::domain("kernel assembly needs at least one operator"));
    }
    let x = params.x();
    let r = params.r;
    let mut factors = Vec::new();
    let mut poles = Vec::new();
    let mut zeros = Vec::new();

    for a in 0..ops.len() {
        for b in a + 1..ops.len() {
            let pair = classify_pair(&ops[a], &ops[b])?;
            if pair == PairId::Commuting {
                continue;
            }
            factors.push(FactorEntry {
                left: a,
                right: b,
                pair,
            });
            match pair {
                // Net laws of the dressed screening factor (scalar plus
                // hopping-kernel bracket): the backward bracket ladder is
                // cancelled by the scalar's numerator zeros.
                PairId::ScreenU => {
                    poles.push(PoleLaw {
                        var: b,
                        base: a,
                        coeff: C::new(x, 0.0),
                        step: params.xpow(2.0 * r),
                        law: format!("z{b} = x^(1+2kr) z{a}, k >= 0"),
                        side: ContourSide::Inside,
                    });
                    poles.push(PoleLaw {
                        var: b,
                        base: a,
                        coeff: C::new(params.xpow(-1.0), 0.0),
                        step: params.xpow(-2.0 * r),
                        law: format!("z{b} = x^(-(1+2kr)) z{a}, k >= 0"),
                        side: ContourSide::Outside,
                    });
                }
                PairId::ScreenV => {
                    poles.push(PoleLaw {
                        var: b,
                        base: a,
                        coeff: C::new(params.xpow(-1.0), 0.0),
                        step: params.xpow(2.0 * (r - 1.0)),
                        law: format!("z{b} = x^(-1+2k(r-1)) z{a}, k >= 0"),
                        side: ContourSide::Inside,
                    });
                    poles.push(PoleLaw {
                        var: b,
                        base: a,
                        coeff: C::new(x, 0.0),
                        step: params.xpow(-2.0 * (r - 1.0)),
                        law: format!("z{b} = x^(1-2k(r-1)) z{a}, k >= 0"),
                        side: ContourSide::Outside,
                    });
                }
                // Bare meromorphy of the undressed same-root scalars.
                PairId::SameRootU => {
                    poles.push(PoleLaw {
                        var: b,
                        base: a,
                        coeff: C::new(params.xpow(-(2.0 * r - 2.0)), 0.0),
                        step: params.xpow(-2.0 * r),
                        law: format!("z{b} = x^(-(2r-2+2kr)) z{a}, k >= 0"),
                        side: ContourSide::Outside,
                    });
                    zeros.push(ZeroLaw {
                        var: b,
                        base: a,
                        coeff: C::new(1.0, 0.0),
                        step: 1.0,
                        law: format!("z{b} = z{a}"),
                    });
                    zeros.push(ZeroLaw {
                        var: b,
                        base: a,
                        coeff: C::new(params.xpow(-2.0), 0.0),
                        step: params.xpow(-2.0 * r),
                        law: format!("z{b} = x^(-(2+2kr)) z{a}, k >= 0"),
                    });
                }
                PairId::SameRootV => {
                    poles.push(PoleLaw {
                        var: b,
                        base: a,
                        coeff: C::new(params.xpow(-2.0 * r), 0.0),
                        step: params.xpow(-2.0 * (r - 1.0)),
                        law: format!("z{b} = x^(-(2r+2k(r-1))) z{a}, k >= 0"),
                        side: ContourSide::Outside,
                    });
                    zeros.push(ZeroLaw {
                        var: b,
                        base: a,
                        coeff: C::new(1.0, 0.0),
                        step: 1.0,
                        law: format!("z{b} = z{a}"),
                    });
                    zeros.push(ZeroLaw {
                        var: b,
                        base: a,
                        coeff: C::new(params.xpow(2.0), 0.0),
                        step: params.xpow(-2.0 * (r - 1.0)),
                        law: format!("z{b} = x^(2-2k(r-1)) z{a}, k >= 0"),
                    });
                }
                PairId::SameRootMixed => {
                    // The two orderings expand the same rational factor on
                    // opposite sides of these poles; the primed-left order
                    // is the one whose contour encloses them.
                    let side = if matches!(ops[a].kind, OpKind::VAlpha | OpKind::VOmega) {
                        ContourSide::Inside
                    } else {
                        ContourSide::Outside
                    };
                    for (coeff, name) in [(x, "x"), (1.0 / x, "x^(-1)")] {
                        poles.push(PoleLaw {
                            var: b,
                            base: a,
                            coeff: C::new(-coeff, 0.0),
                            step: 1.0,
                            law: format!("z{b} = -{name} z{a}"),
                            side,
                        });
                    }
                }
                PairId::LinearMixed => {
                    zeros.push(ZeroLaw {
                        var: b,
                        base: a,
                        coeff: C::new(-1.0, 0.0),
                        step: 1.0,
                        law: format!("z{b} = -z{a}"),
                    });
                }
                // Weight/weight factors carry only head variables (never
                // integrated) and half-level screener factors have pinned
                // arguments: no catalog rows.
                PairId::OmegaOmegaU { .. }
                | PairId::OmegaOmegaV { .. }
                | PairId::OmegaOmegaMixed { .. }
                | PairId::WBeforeV
                | PairId::VBeforeW
                | PairId::UBeforeW
                | PairId::WBeforeU
                | PairId::Commuting => {}
            }
        }
    }

    Ok(KernelDescriptor {
        ops: ops.iter().map(|op| (op.kind, op.j, op.v)).collect(),
        factors,
        poles,
        zeros,
    })
}
