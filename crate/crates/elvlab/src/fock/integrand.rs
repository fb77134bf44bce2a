//! Scalar integrands of the displayed contour-integral operators.
//!
//! Each half-transfer operator is a multiple contour integral over an
//! ordered chain of basic operators dressed with hopping kernels and
//! sector-dependent bracket factors.  On any fixed weight sector the
//! operator-valued integrand reduces to a scalar: the chain's
//! normal-ordering scalar ([`chain_scalar`]) times the displayed kernels
//! evaluated at that sector's scalars.  Those reductions, with the sector
//! data supplied externally via [`SectorScalars`], are what this module
//! computes — valuable because each operator has *two* displayed chain
//! orderings whose equality is a nontrivial consequence of the exchange
//! relations, checked here point-by-point.
//!
//! The six selectors:
//!
//! * [`IntegrandKind::TypeI`] — the unprimed ladder
//!   `U_w1(v_0) U_a1(v_1) .. U_aμ(v_μ)` with kernels
//!   `f(v_{j+1} - v_j, K_{j μ})` and the `1/[K_{j μ}]` bracket weights;
//! * [`IntegrandKind::TypeIDual`] — the descending unprimed ladder headed by
//!   `U_w(n-1)(v_0 - n/2)`, with kernels `f(v_j - v_{j+1}, K_{μ j})` and the
//!   overall constant `(-1)^{n-1-μ} / c_n`;
//! * [`IntegrandKind::TypeII`], [`IntegrandKind::TypeIIDual`] — the primed
//!   partners (kernels `f*`, scalars `L`, constant `c'_n`, bracket weights
//!   `[1]'/[L_{j μ}]'` on the dual);
//! * [`IntegrandKind::BoseLambda`] — the pure screening chain
//!   `U_a(μ+1) .. U_aν` conjugated by the unprimed bracket product `G_K`,
//!   with kernels `f(v_{j+1} - v_j, K_{j ν})`;
//! * [`IntegrandKind::LambdaRepII`] — the mixed-level chain
//!   `W_a(n-1)(u - (r-1)/2) V_a(n-2)(v_{n-2}) .. V_a(μ+1)(v_{μ+1})`
//!   conjugated by `G_K G'^{-1}_L`, with kernels `f*(v_j - v_{j+1}, L_{μ j})`
//!   where the terminal argument is pinned at `v_{n-1} = u + i pi / (2 eps)`,
//!   and an explicit bracket prefactor.
//!
//! [`vertex_integrand`] evaluates the first displayed ordering,
//! [`reflected_integrand`] the second (reversed-chain) one where a second
//! form is displayed — the last two selectors have a single form and return
//! a domain error from the reflected entry point.

use std::f64::consts::PI;

use super::kernel::chain_scalar;
use super::ops::{build_basic_op, FreeFieldOperator, OpKind};
use crate::elliptic::{bracket, g_j, g_star_j, kernel, qpoch, KernelKind};
use crate::error::{Error, Result};
use crate::params::{Level, ModelParams, C};
use crate::weights::SectorScalars;

const POLE_ABS: f64 = 1e-11;

/// Selector for the displayed contour-integral operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrandKind {
    /// Unprimed half-transfer component, ascending ladder from weight index 1.
    TypeI,
    /// Unprimed dual component, descending ladder from weight index `n - 1`.
    TypeIDual,
    /// Primed half-transfer component.
    TypeII,
    /// Primed dual component.
    TypeIIDual,
    /// Pure unprimed screening chain under the `G_K` sandwich.
    BoseLambda,
    /// Half-level screener followed by a descending primed screening chain
    /// under the `G_K G'^{-1}_L` sandwich.
    LambdaRepII,
}

/// The two overall normalization constants of the dual components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantKind {
    /// `c_n = x^{(r-1)(n-1)/(2rn)} g_{n-1}(x^n)
    ///        / ( (x^2; x^{2r})^n (x^{2r}; x^{2r})^{2n-3} )`.
    CN,
    /// `c'_n = x^{r(n-1)/(2(r-1))}
    ///         ( (x^{2r}; x^{2r-2}) / (x^{2r-2}; x^{2r-2}) )^n g*_{n-1}(x^n)`.
    CPrimeN,
}

/// Evaluate a dual-component normalization constant.  Both are finite and
/// strictly positive for every `x` in `(0, 1)`.
pub fn constants(which: ConstantKind, params: &ModelParams) -> Result<C> {
    let n = params.n;
    let nf = n as f64;
    let r = params.r;
    let tol = params.prod_tol;
    match which {
        ConstantKind::CN => {
            let pre = params.xpow((r - 1.0) / r * (nf - 1.0) / (2.0 * nf));
            let head = g_j(n - 1, C::new(params.xpow(nf), 0.0), params)?;
            let q = params.xpow(2.0 * r);
            let e1 = qpoch(C::new(params.xpow(2.0), 0.0), &[q], tol)?;
            let e2 = qpoch(C::new(q, 0.0), &[q], tol)?;
            Ok(pre * head / (e1.powi(n as i32) * e2.powi(2 * n as i32 - 3)))
        }
        ConstantKind::CPrimeN => {
            let pre = params.xpow(r * (nf - 1.0) / (2.0 * (r - 1.0)));
            let head = g_star_j(n - 1, C::new(params.xpow(nf), 0.0), params)?;
            let q = params.xpow(2.0 * r - 2.0);
            let num = qpoch(C::new(params.xpow(2.0 * r), 0.0), &[q], tol)?;
            let den = qpoch(C::new(q, 0.0), &[q], tol)?;
            Ok(pre * (num / den).powi(n as i32) * head)
        }
    }
}

/// First displayed ordering of the selected operator's scalar integrand.
///
/// `mu` is the component index, `v0` the operator's spectral parameter, and
/// `zs` the multiplicative integration variables (one per chain screening;
/// the required count depends on the selector).  Sector-dependent scalars
/// come from `sector`; the integrand is linear in none of them, so they are
/// taken as exact inputs.
pub fn vertex_integrand(
    which: IntegrandKind,
    mu: usize,
    v0: C,
    zs: &[C],
    sector: &SectorScalars,
    params: &ModelParams,
) -> Result<C> {
    integrand_impl(which, mu, v0, zs, sector, params, false)
}

/// Second displayed (reversed-chain) ordering of the integrand.  Equal to
/// [`vertex_integrand`] as a function — that equality is the exchange-algebra
/// consistency check.  The two sandwich chains have a single displayed form
/// and return a domain error here.
pub fn reflected_integrand(
    which: IntegrandKind,
    mu: usize,
    v0: C,
    zs: &[C],
    sector: &SectorScalars,
    params: &ModelParams,
) -> Result<C> {
    integrand_impl(which, mu, v0, zs, sector, params, true)
}

fn integrand_impl(
    which: IntegrandKind,
    mu: usize,
    v0: C,
    zs: &[C],
    sector: &SectorScalars,
    params: &ModelParams,
    reflected: bool,
) -> Result<C> {
    let n = params.n;
    if sector.k_mat.len() != n || sector.l_mat.len() != n {
        return Err(Error::domain("sector scalars sized for a different n"));
    }
    match which {
        IntegrandKind::TypeI => ladder_integrand(false, false, mu, v0, zs, sector, params, reflected),
        IntegrandKind::TypeIDual => ladder_integrand(false, true, mu, v0, zs, sector, params, reflected),
        IntegrandKind::TypeII => ladder_integrand(true, false, mu, v0, zs, sector, params, reflected),
        IntegrandKind::TypeIIDual => ladder_integrand(true, true, mu, v0, zs, sector, params, reflected),
        IntegrandKind::BoseLambda => {
            if reflected {
                return Err(Error::domain(
                    "the screening-chain integrand has a single displayed form",
                ));
            }
            bose_lambda_integrand(mu, v0, zs, sector, params)
        }
        IntegrandKind::LambdaRepII => {
            if reflected {
                return Err(Error::domain(
                    "the mixed-chain integrand has a single displayed form",
                ));
            }
            lambda_rep_ii_integrand(mu, v0, zs, sector, params)
        }
    }
}

/// Shared body of the four half-transfer component integrands.
#[allow(clippy::too_many_arguments)]
fn ladder_integrand(
    primed: bool,
    dual: bool,
    mu: usize,
    v0: C,
    zs: &[C],
    sector: &SectorScalars,
    params: &ModelParams,
    reflected: bool,
) -> Result<C> {
    let n = params.n;
    if mu > n - 1 {
        return Err(Error::domain(format!(
            "component index {mu} outside 0..={}",
            n - 1
        )));
    }
    let expected = if dual { n - 1 - mu } else { mu };
    if zs.len() != expected {
        return Err(Error::domain(format!(
            "selector needs {expected} integration variables, got {}",
            zs.len()
        )));
    }
    let (omega_kind, alpha_kind, fkind) = if primed {
        (OpKind::VOmega, OpKind::VAlpha, KernelKind::FStar)
    } else {
        (OpKind::UOmega, OpKind::UAlpha, KernelKind::F)
    };
    let scal = if primed { &sector.l_mat } else { &sector.k_mat };

    let mut acc;
    if !dual {
        // Chain v-list: v_0 = v0, then one v per screening.
        let mut vs = vec![v0];
        for z in zs {
            vs.push(params.v_of_z(*z));
        }
        let mut ops = vec![build_basic_op(omega_kind, 1, vs[0], 1, params)?];
        for j in 1..=mu {
            ops.push(build_basic_op(alpha_kind, j, vs[j], 1, params)?);
        }
        if reflected {
            ops.reverse();
        }
        acc = chain_scalar(&ops, params)?;
        if reflected && mu % 2 == 1 {
            acc = -acc;
        }
        for j in 0..mu {
            let w = C::new(scal[j][mu], 0.0);
            acc *= if reflected {
                kernel(fkind, vs[j] - vs[j + 1], C::new(1.0, 0.0) - w, params)?
            } else {
                kernel(fkind, vs[j + 1] - vs[j], w, params)?
            };
        }
        if !primed {
            // The unprimed component carries the 1/[K_{j mu}] weights.
            for j in 0..n {
                if j == mu {
                    continue;
                }
                let b = bracket(C::new(sector.k_mat[j][mu], 0.0), Level::R, params)?;
                if b.norm() < POLE_ABS {
                    return Err(Error::Pole {
                        function: "vertex_integrand",
                        location: format!("sector bracket [K_({j},{mu})] in the component weights"),
                        denominator_abs: b.norm(),
                    });
                }
                acc /= b;
            }
        }
    } else {
        // Dual chain: v_j for j = mu+1 ..= n-1 are integrated, v_n is pinned.
        let mut vs = vec![C::new(0.0, 0.0); n + 1];
        for (offset, z) in zs.iter().enumerate() {
            vs[mu + 1 + offset] = params.v_of_z(*z);
        }
        vs[n] = v0 - C::new(n as f64 / 2.0, 0.0);
        let mut ops = vec![build_basic_op(omega_kind, n - 1, vs[n], 1, params)?];
        for j in (mu + 1..=n - 1).rev() {
            ops.push(build_basic_op(alpha_kind, j, vs[j], 1, params)?);
        }
        if reflected {
            ops.reverse();
        }
        acc = chain_scalar(&ops, params)?;
        if !reflected && (n - 1 - mu) % 2 == 1 {
            acc = -acc;
        }
        let constant = constants(
            if primed {
                ConstantKind::CPrimeN
            } else {
                ConstantKind::CN
            },
            params,
        )?;
        acc /= constant;
        for j in mu + 1..=n - 1 {
            let w = C::new(scal[mu][j], 0.0);
            acc *= if reflected {
                kernel(fkind, vs[j + 1] - vs[j], C::new(1.0, 0.0) - w, params)?
            } else {
                kernel(fkind, vs[j] - vs[j + 1], w, params)?
            };
        }
        if primed {
            // The primed dual carries the [1]'/[L_{j mu}]' weights.
            let unit = bracket(C::new(1.0, 0.0), Level::RMinus1, params)?;
            for j in 0..n {
                if j == mu {
                    continue;
                }
                let b = bracket(C::new(sector.l_mat[j][mu], 0.0), Level::RMinus1, params)?;
                if b.norm() < POLE_ABS {
                    return Err(Error::Pole {
                        function: "vertex_integrand",
                        location: format!("sector bracket [L_({j},{mu})]' in the component weights"),
                        denominator_abs: b.norm(),
                    });
                }
                acc *= unit / b;
            }
        }
    }
    Ok(acc)
}

/// Product over all sector pairs of `[scal_{ab} + delta_a - delta_b]` over
/// `[scal_{ab}]` at the given level — the scalar left over when the chain is
/// conjugated by the full bracket product `G`.
fn bracket_ratio_product(
    mat: &[Vec<f64>],
    delta: &[f64],
    level: Level,
    params: &ModelParams,
) -> Result<C> {
    let n = delta.len();
    let mut acc = C::new(1.0, 0.0);
    for a in 0..n {
        for b in a + 1..n {
            let base = bracket(C::new(mat[a][b], 0.0), level, params)?;
            if base.norm() < POLE_ABS {
                return Err(Error::Pole {
                    function: "bracket_ratio_product",
                    location: format!("sector bracket at difference {}", mat[a][b]),
                    denominator_abs: base.norm(),
                });
            }
            let moved = bracket(C::new(mat[a][b] + delta[a] - delta[b], 0.0), level, params)?;
            acc *= moved / base;
        }
    }
    Ok(acc)
}

/// Accumulated zero-mode shifts of a chain, ambient coordinates.
fn chain_shifts(ops: &[FreeFieldOperator]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = ops[0].n();
    let mut dk = vec![0.0; n];
    let mut dl = vec![0.0; n];
    for op in ops {
        let (a, b) = op.sector_shift()?;
        for i in 0..n {
            dk[i] += a[i];
            dl[i] += b[i];
        }
    }
    Ok((dk, dl))
}

fn bose_lambda_integrand(
    mu: usize,
    v0: C,
    zs: &[C],
    sector: &SectorScalars,
    params: &ModelParams,
) -> Result<C> {
    let n = params.n;
    let nu = mu + zs.len();
    if zs.is_empty() {
        return Err(Error::domain(
            "the screening chain needs at least one integration variable",
        ));
    }
    if nu > n - 1 {
        return Err(Error::domain(format!(
            "chain endpoint {nu} outside {}..={}",
            mu + 1,
            n - 1
        )));
    }
    // v_mu = v0 is the external argument; v_{mu+1} .. v_nu are integrated.
    let mut vs = vec![C::new(0.0, 0.0); nu + 1];
    vs[mu] = v0;
    for (offset, z) in zs.iter().enumerate() {
        vs[mu + 1 + offset] = params.v_of_z(*z);
    }
    let mut ops = Vec::new();
    for j in mu + 1..=nu {
        ops.push(build_basic_op(OpKind::UAlpha, j, vs[j], 1, params)?);
    }
    let mut acc = chain_scalar(&ops, params)?;
    for j in mu..nu {
        acc *= kernel(
            KernelKind::F,
            vs[j + 1] - vs[j],
            C::new(sector.k_mat[j][nu], 0.0),
            params,
        )?;
    }
    let (dk, _) = chain_shifts(&ops)?;
    acc *= bracket_ratio_product(&sector.k_mat, &dk, Level::R, params)?;
    Ok(acc)
}

fn lambda_rep_ii_integrand(
    mu: usize,
    v0: C,
    zs: &[C],
    sector: &SectorScalars,
    params: &ModelParams,
) -> Result<C> {
    let n = params.n;
    let r = params.r;
    if mu + 2 > n {
        return Err(Error::domain(format!(
            "component index {mu} outside 0..={}",
            n - 2
        )));
    }
    if zs.len() != n - 2 - mu {
        return Err(Error::domain(format!(
            "selector needs {} integration variables, got {}",
            n - 2 - mu,
            zs.len()
        )));
    }
    let u = v0;
    // v_{mu+1} .. v_{n-2} are integrated; the terminal kernel argument is
    // pinned a quarter of the imaginary period above u.
    let mut vs = vec![C::new(0.0, 0.0); n];
    for (offset, z) in zs.iter().enumerate() {
        vs[mu + 1 + offset] = params.v_of_z(*z);
    }
    vs[n - 1] = u + C::new(0.0, PI / (2.0 * params.eps));

    let mut ops = vec![build_basic_op(
        OpKind::WAlpha,
        n - 1,
        u - C::new((r - 1.0) / 2.0, 0.0),
        1,
        params,
    )?];
    for j in (mu + 1..=n - 2).rev() {
        ops.push(build_basic_op(OpKind::VAlpha, j, vs[j], 1, params)?);
    }
    let mut acc = chain_scalar(&ops, params)?;
    for j in mu + 1..=n - 2 {
        acc *= kernel(
            KernelKind::FStar,
            vs[j] - vs[j + 1],
            C::new(sector.l_mat[mu][j], 0.0),
            params,
        )?;
    }

    // Bracket prefactor.
    let x = params.x();
    let sgn = if (n - mu) % 2 == 1 { -1.0 } else { 1.0 };
    let q2r = params.xpow(2.0 * r);
    let euler = qpoch(C::new(q2r, 0.0), &[q2r], params.prod_tol)?.powi(3);
    let head = bracket(C::new(sector.k_mat[n - 2][n - 1], 0.0), Level::R, params)?;
    let tail_num = bracket(
        C::new(sector.l_mat[mu][n - 1] - 1.0, 0.0),
        Level::RMinus1,
        params,
    )?;
    let tail_den = bracket(C::new(1.0, 0.0), Level::RMinus1, params)?;
    acc *= sgn * head / ((x.recip() - x) * euler) * tail_num / tail_den;

    // G_K G'^{-1}_L sandwich.
    let (dk, dl) = chain_shifts(&ops)?;
    acc *= bracket_ratio_product(&sector.k_mat, &dk, Level::R, params)?;
    acc /= bracket_ratio_product(&sector.l_mat, &dl, Level::RMinus1, params)?;
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{draw_generic, SectorScalars};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn desk(n: usize) -> ModelParams {
        ModelParams::from_x(n, 5.5, 0.3).unwrap()
    }

    fn generic_sector(n: usize, seed: u64, params: &ModelParams) -> SectorScalars {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = draw_generic(&mut rng, n, Level::R);
        let l = draw_generic(&mut rng, n, Level::RMinus1);
        SectorScalars::from_weights(&k, &l, params).unwrap()
    }

    fn zs_of_vs(vs: &[f64], params: &ModelParams) -> Vec<C> {
        vs.iter()
            .map(|v| params.z_of_v(C::new(*v, 0.0)))
            .collect()
    }

    #[test]
    fn type_i_collapses_to_bracket_weights_at_mu_zero() {
        for n in [2usize, 3] {
            let params = desk(n);
            let sector = generic_sector(n, 11 + n as u64, &params);
            let v0 = C::new(0.37, 0.0);
            let got = vertex_integrand(IntegrandKind::TypeI, 0, v0, &[], &sector, &params).unwrap();
            let mut want = C::new(1.0, 0.0);
            for j in 1..n {
                want /= bracket(C::new(sector.k_mat[j][0], 0.0), Level::R, &params).unwrap();
            }
            assert!(
                (got - want).norm() < 1e-12 * (1.0 + want.norm()),
                "mu = 0 integrand {got} vs bracket product {want} at n = {n}"
            );
        }
    }

    #[test]
    fn both_display_orderings_agree() {
        // The reversed-chain forms differ per factor (reversed pair scalars,
        // reflected kernel arguments, a global sign) yet must agree as
        // functions — the exchange-algebra consistency of each display.
        for n in [2usize, 3] {
            let params = desk(n);
            let sector = generic_sector(n, 1000 + n as u64, &params);
            let v0 = C::new(0.45, 0.0);
            let vpool = [0.22, 0.08];
            for mu in 1..n {
                let zs = zs_of_vs(&vpool[..mu], &params);
                for kind in [IntegrandKind::TypeI, IntegrandKind::TypeII] {
                    let a = vertex_integrand(kind, mu, v0, &zs, &sector, &params).unwrap();
                    let b = reflected_integrand(kind, mu, v0, &zs, &sector, &params).unwrap();
                    assert!(
                        (a - b).norm() < 1e-9 * (1.0 + a.norm()),
                        "{kind:?} mu={mu} n={n}: {a} vs {b}"
                    );
                }
            }
            for mu in 0..n {
                let zs = zs_of_vs(&vpool[..n - 1 - mu], &params);
                for kind in [IntegrandKind::TypeIDual, IntegrandKind::TypeIIDual] {
                    let a = vertex_integrand(kind, mu, v0, &zs, &sector, &params).unwrap();
                    let b = reflected_integrand(kind, mu, v0, &zs, &sector, &params).unwrap();
                    assert!(
                        (a - b).norm() < 1e-9 * (1.0 + a.norm()),
                        "{kind:?} mu={mu} n={n}: {a} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn dual_components_at_top_index_reduce_to_constants() {
        for n in [2usize, 3] {
            let params = desk(n);
            let sector = generic_sector(n, 7 + n as u64, &params);
            let v0 = C::new(0.29, 0.0);
            let mu = n - 1;
            let got =
                vertex_integrand(IntegrandKind::TypeIDual, mu, v0, &[], &sector, &params).unwrap();
            let want = C::new(1.0, 0.0) / constants(ConstantKind::CN, &params).unwrap();
            assert!((got - want).norm() < 1e-12 * (1.0 + want.norm()));

            let got =
                vertex_integrand(IntegrandKind::TypeIIDual, mu, v0, &[], &sector, &params).unwrap();
            let unit = bracket(C::new(1.0, 0.0), Level::RMinus1, &params).unwrap();
            let mut want = C::new(1.0, 0.0) / constants(ConstantKind::CPrimeN, &params).unwrap();
            for j in 0..n - 1 {
                want *= unit
                    / bracket(C::new(sector.l_mat[j][mu], 0.0), Level::RMinus1, &params).unwrap();
            }
            assert!((got - want).norm() < 1e-12 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn constants_are_positive_for_all_couplings() {
        for n in [2usize, 3] {
            for i in 0..10 {
                let x = 0.05 + 0.065 * i as f64;
                let params = ModelParams::from_x(n, 5.5, x).unwrap();
                for which in [ConstantKind::CN, ConstantKind::CPrimeN] {
                    let c = constants(which, &params).unwrap();
                    assert!(c.re.is_finite() && c.im.is_finite());
                    assert!(c.re > 0.0, "{which:?} = {c} at x = {x}, n = {n}");
                    assert!(c.im.abs() < 1e-12 * c.re);
                }
            }
        }
    }

    #[test]
    fn screening_chain_is_finite_and_validates_lengths() {
        let params = desk(3);
        let sector = generic_sector(3, 99, &params);
        let v0 = C::new(0.4, 0.0);
        let zs = zs_of_vs(&[0.18], &params);
        let val = vertex_integrand(IntegrandKind::BoseLambda, 1, v0, &zs, &sector, &params)
            .unwrap();
        assert!(val.norm() > 0.0 && val.re.is_finite() && val.im.is_finite());
        // Two steps starting at mu = 0.
        let zs2 = zs_of_vs(&[0.18, 0.05], &params);
        let val2 =
            vertex_integrand(IntegrandKind::BoseLambda, 0, v0, &zs2, &sector, &params).unwrap();
        assert!(val2.norm() > 0.0);
        // Wrong variable counts and the missing second form both error.
        assert!(
            vertex_integrand(IntegrandKind::BoseLambda, 1, v0, &[], &sector, &params).is_err()
        );
        assert!(
            vertex_integrand(IntegrandKind::BoseLambda, 2, v0, &zs, &sector, &params).is_err()
        );
        assert!(
            reflected_integrand(IntegrandKind::BoseLambda, 1, v0, &zs, &sector, &params).is_err()
        );
    }

    #[test]
    fn mixed_chain_is_finite_at_both_sizes() {
        // n = 2: the chain is the bare half-level screener; n = 3 adds one
        // integrated primed screening with the pinned terminal kernel.
        let params2 = desk(2);
        let sector2 = generic_sector(2, 5, &params2);
        let v0 = C::new(0.33, 0.0);
        let val2 = vertex_integrand(IntegrandKind::LambdaRepII, 0, v0, &[], &sector2, &params2)
            .unwrap();
        assert!(val2.norm() > 0.0 && val2.re.is_finite());

        let params3 = desk(3);
        let sector3 = generic_sector(3, 6, &params3);
        let zs = zs_of_vs(&[0.15], &params3);
        let val3 = vertex_integrand(IntegrandKind::LambdaRepII, 0, v0, &zs, &sector3, &params3)
            .unwrap();
        assert!(val3.norm() > 0.0 && val3.re.is_finite());
        let val3b = vertex_integrand(IntegrandKind::LambdaRepII, 1, v0, &[], &sector3, &params3)
            .unwrap();
        assert!(val3b.norm() > 0.0);
        assert!(
            vertex_integrand(IntegrandKind::LambdaRepII, 2, v0, &[], &sector3, &params3).is_err()
        );
        assert!(
            reflected_integrand(IntegrandKind::LambdaRepII, 0, v0, &zs, &sector3, &params3)
                .is_err()
        );
    }
}
