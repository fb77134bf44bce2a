//! The vertex-face correspondence: intertwining vectors, their duals, and
//! the residuals of the exchange relations that transport the vertex
//! R-matrix into the face weights (and the twisted pair into each other).
//!
//! Index conventions, fixed by the duality relations:
//!
//! * `t(v)^a_{a - bar_eps_mu}` is a *column* vector in the vertex space with
//!   components `t^nu`; the upper index is the base weight, the lower index
//!   the descended weight.
//! * `t*_mu(v)^{a - bar_eps_nu}_a` is a *row* vector; the lower index is the
//!   base weight, the upper index the descended weight.  Rows are recovered
//!   as the matrix inverse of the column family, so both completeness
//!   relations hold by construction and are pinned by tests.

use std::f64::consts::PI;

use crate::elliptic::theta;
use crate::error::{Error, Result};
use crate::lattice::{face_weight, r_matrix, twisted, twisted_face_weight, FaceWeightQuery, RMatrix};
use crate::params::{ModelParams, C};
use crate::weights::WeightVec;

/// One intertwining vector `t(v)^a_{a - bar_eps_mu}` (column in the vertex
/// space).
#[derive(Debug, Clone)]
pub struct IntertwinerColumn {
    /// Components indexed by the vertex-space index `nu`.
    pub vec: Vec<C>,
    /// Spectral argument.
    pub v: C,
    /// Base weight `a`.
    pub a: WeightVec,
    /// Descent color `mu`.
    pub mu: usize,
}

/// Diagonal gauge phase attached to the descent `a -> a - bar_eps_mu`:
/// `prod_{j=mu+1}^{n-1} (-1)^{a_{mu j}}` with `(-1)^A := exp(pi i A)`.
///
/// Every component of an intertwining vector carries this factor.  It is
/// what makes the face weights at a diagonal-square configuration come out
/// real, and it is also the exact discrepancy between the contraction form
/// of a tail link and its bracket-ratio closed form, so both modules share
/// this single definition.
pub fn column_phase(a: &WeightVec, mu: usize) -> C {
    let n = a.n();
    let exp: f64 = ((mu + 1)..n).map(|j| a.bar[mu] - a.bar[j]).sum();
    (C::new(0.0, PI) * exp).exp()
}

/// Evaluate the intertwining vector
///
/// ```text
/// t^nu(v)^a_{a - bar_eps_mu}
///   = prod_{j=mu+1}^{n-1} (-1)^{a_{mu j}}
///     * theta[n/2, 1/2 + nu/n](v/(n r) + a_bar[mu]/r; pi i/(n eps r))
/// ```
///
/// with `(-1)^A := exp(pi i A)` (see [`column_phase`]).
pub fn intertwiner(
    v: C,
    a: &WeightVec,
    mu: usize,
    params: &ModelParams,
) -> Result<IntertwinerColumn> {
    let n = params.n;
    if a.n() != n {
        return Err(Error::domain("intertwiner weight must have length n"));
    }
    if mu >= n {
        return Err(Error::domain(format!("descent color {mu} out of range 0..{n}")));
    }
    let nf = n as f64;
    let tau = C::new(0.0, PI / (nf * params.eps * params.r));
    let sign = column_phase(a, mu);
    let arg = v / (nf * params.r) + a.bar[mu] / params.r;
    let mut vec = Vec::with_capacity(n);
    for nu in 0..n {
        let t = theta(nf / 2.0, 0.5 + nu as f64 / nf, arg, tau, params.theta_terms)?;
        vec.push(sign * t);
    }
    Ok(IntertwinerColumn {
        vec,
        v,
        a: a.clone(),
        mu,
    })
}

/// Solve a complex linear system `M X = I` by Gaussian elimination with
/// partial pivoting, returning the inverse.
fn invert(mut m: Vec<Vec<C>>, context: &'static str) -> Result<Vec<Vec<C>>> {
    let n = m.len();
    let mut inv: Vec<Vec<C>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) })
                .collect()
        })
        .collect();
    let scale = m
        .iter()
        .flat_map(|row| row.iter().map(|e| e.norm()))
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    for col in 0..n {
        let (pivot_row, pivot_abs) = (col..n)
            .map(|r| (r, m[r][col].norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if pivot_abs < 1e-13 * scale {
            return Err(Error::Degenerate {
                context,
                pivot_abs,
            });
        }
        m.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let piv = m[col][col];
        for j in 0..n {
            m[col][j] /= piv;
            inv[col][j] /= piv;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = m[r][col];
            if factor.norm() == 0.0 {
                continue;
            }
            for j in 0..n {
                let mcj = m[col][j];
                let icj = inv[col][j];
                m[r][j] -= factor * mcj;
                inv[r][j] -= factor * icj;
            }
        }
    }
    Ok(inv)
}

/// The dual intertwining vectors at base weight `a`.
///
/// Returns the `n x n` array `D[nu][mu] = t*_mu(v)^{a - bar_eps_nu}_a`,
/// the matrix inverse of `T[nu][sigma] = t^nu(v)^a_{a - bar_eps_sigma}`, so
/// that both completeness relations hold:
///
/// ```text
/// sum_mu t*_mu(v)^{a - bar_eps_nu}_a  t^mu(v)^a_{a - bar_eps_nu'} = delta_{nu nu'}
/// sum_nu t^mu(v)^a_{a - bar_eps_nu}   t*_mu'(v)^{a - bar_eps_nu}_a = delta_{mu mu'}
/// ```
pub fn dual_intertwiner(v: C, a: &WeightVec, params: &ModelParams) -> Result<Vec<Vec<C>>> {
    let n = params.n;
    let mut t: Vec<Vec<C>> = vec![vec![C::new(0.0, 0.0); n]; n];
    for sigma in 0..n {
        let col = intertwiner(v, a, sigma, params)?;
        for nu in 0..n {
            t[nu][sigma] = col.vec[nu];
        }
    }
    invert(t, "dual_intertwiner")
}

/// Which correspondence residual to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrespondenceKind {
    /// `R(v1-v2) t(v1)^d_a (x) t(v2)^c_d = sum_b t(v1)^c_b (x) t(v2)^b_a W[c d; b a | v1-v2]`.
    Vf,
    /// `t*(v1)^b_c (x) t*(v2)^a_b R(v1-v2) = sum_d W[c d; b a | v1-v2] t*(v1)^a_d (x) t*(v2)^d_c`.
    DualVf,
    /// The dual relation with every object twisted:
    /// `t'*(v1)^b_c (x) t'*(v2)^a_b S(v1-v2) = sum_d W'[c d; b a | v1-v2] t'*(v1)^a_d (x) t'*(v2)^d_c`.
    SVf,
}

/// Residual of one vertex-face exchange relation, maximized over all
/// admissible two-step squares based at `a_context` and over both tensor
/// components, normalized by the largest compared entry.
pub fn correspondence_residual(
    which: CorrespondenceKind,
    v1: C,
    v2: C,
    a_context: &WeightVec,
    params: &ModelParams,
) -> Result<f64> {
    let n = params.n;
    if a_context.n() != n {
        return Err(Error::domain("context weight must have length n"));
    }
    let v12 = v1 - v2;
    let rm: RMatrix = match which {
        CorrespondenceKind::Vf | CorrespondenceKind::DualVf => r_matrix(v12, params)?,
        CorrespondenceKind::SVf => twisted(v12, params)?,
    };
    let wface = |q: &FaceWeightQuery| -> Result<C> {
        match which {
            CorrespondenceKind::SVf => twisted_face_weight(q, params),
            _ => face_weight(q, params),
        }
    };
    let dual_at = |v: C, base: &WeightVec| -> Result<Vec<Vec<C>>> {
        match which {
            CorrespondenceKind::SVf => dual_intertwiner(v, base, &params.twisted()?),
            _ => dual_intertwiner(v, base, params),
        }
    };

    let a = a_context;
    let mut worst = 0.0_f64;
    let mut scale = 0.0_f64;

    for sigma in 0..n {
        for tau in 0..n {
            match which {
                CorrespondenceKind::Vf => {
                    // d = a + eps_sigma, c = d + eps_tau.
                    let d = a.shifted_up(sigma);
                    let c = d.shifted_up(tau);
                    let t1 = intertwiner(v1, &d, sigma, params)?; // t(v1)^d_a
                    let t2 = intertwiner(v2, &c, tau, params)?; // t(v2)^c_d
                    for i in 0..n {
                        for k in 0..n {
                            let mut lhs = C::new(0.0, 0.0);
                            for j in 0..n {
                                for l in 0..n {
                                    lhs += rm.entry(i, k, j, l) * t1.vec[j] * t2.vec[l];
                                }
                            }
                            let mut rhs = C::new(0.0, 0.0);
                            for lam in 0..n {
                                let b = a.shifted_up(lam);
                                let Some(gam) = b.step_up_to(&c) else {
                                    continue;
                                };
                                let w = wface(&FaceWeightQuery {
                                    c: c.clone(),
                                    d: d.clone(),
                                    b: b.clone(),
                                    a: a.clone(),
                                    v: v12,
                                })?;
                                let u1 = intertwiner(v1, &c, gam, params)?; // t(v1)^c_b
                                let u2 = intertwiner(v2, &b, lam, params)?; // t(v2)^b_a
                                rhs += u1.vec[i] * u2.vec[k] * w;
                            }
                            worst = worst.max((lhs - rhs).norm());
                            scale = scale.max(lhs.norm()).max(rhs.norm());
                        }
                    }
                }
                CorrespondenceKind::DualVf | CorrespondenceKind::SVf => {
                    // b = a + eps_sigma, c = b + eps_tau (descents read
                    // downward: a = b - eps_sigma, b = c - eps_tau).
                    let b = a.shifted_up(sigma);
                    let c = b.shifted_up(tau);
                    let dual_c = dual_at(v1, &c)?; // rows nu: t*(v1)^{c - eps_nu}_c
                    let dual_b = dual_at(v2, &b)?;
                    for j in 0..n {
                        for l in 0..n {
                            let mut lhs = C::new(0.0, 0.0);
                            for i in 0..n {
                                for k in 0..n {
                                    // t*(v1)^b_c has row index tau; t*(v2)^a_b row sigma.
                                    lhs += dual_c[tau][i] * dual_b[sigma][k] * rm.entry(i, k, j, l);
                                }
                            }
                            let mut rhs = C::new(0.0, 0.0);
                            for lam in 0..n {
                                let d = a.shifted_up(lam);
                                let Some(kap) = d.step_up_to(&c) else {
                                    continue;
                                };
                                let w = wface(&FaceWeightQuery {
                                    c: c.clone(),
                                    d: d.clone(),
                                    b: b.clone(),
                                    a: a.clone(),
                                    v: v12,
                                })?;
                                let dual_d = dual_at(v1, &d)?; // t*(v1)^a_d: row lam at base d
                                let dual_c2 = dual_at(v2, &c)?; // t*(v2)^d_c: row kap at base c
                                rhs += w * dual_d[lam][j] * dual_c2[kap][l];
                            }
                            worst = worst.max((lhs - rhs).norm());
                            scale = scale.max(lhs.norm()).max(rhs.norm());
                        }
                    }
                }
            }
        }
    }
    Ok(worst / scale.max(1.0))
}
