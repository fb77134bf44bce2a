//! Lattice weight systems: the Z/nZ-symmetric vertex R-matrix, the face
//! (interaction-round-a-face) Boltzmann weights, their star-triangle /
//! Yang-Baxter residuals, and the twisted variants used by the level-shifted
//! weight system.
//!
//! Conventions:
//!
//! * `R(v) (e_j (x) e_l) = sum_{ik} R^{ik}_{jl} e_i (x) e_k`; entries are
//!   stored as a rank-4 array indexed `(i, k, j, l)`.
//! * Theta characteristics entering the vertex weights use the *raw* integer
//!   differences `k-i`, `j-k`, `j-i`.  They must never be reduced modulo
//!   `n`: `theta[1/2, b+1] = -theta[1/2, b]`, so reduction flips entry signs
//!   and breaks the Yang-Baxter equation.
//! * Entries additionally carry the gauge sign `(-1)^{(j+l)-(i+k)}`
//!   (conjugation by `diag((-1)^j)` on both legs).  The Yang-Baxter equation
//!   cannot see this choice; the vertex-face exchange relations pin it for
//!   odd `n`, and it is trivial for even `n`.
//! * Face weights `W[c d; b a | v]` are indexed by the four corner weights
//!   of a unit square with admissible ascending edges `a -> b -> c` and
//!   `a -> d -> c`.

use std::f64::consts::PI;

use crate::elliptic::{bracket, comm_factor, theta, CommFactorKind};
use crate::error::{Error, Result};
use crate::params::{Level, ModelParams, C};
use crate::weights::WeightVec;

/// Magnitude below which a weight denominator counts as a pole.
const POLE_ABS: f64 = 1e-11;

/// Dense rank-4 vertex weight array.
#[derive(Debug, Clone)]
pub struct RMatrix {
    /// Symmetry order `n`.
    pub n: usize,
    /// Spectral argument the matrix was built at.
    pub v: C,
    entries: Vec<C>,
}

impl RMatrix {
    fn zeros(n: usize, v: C) -> Self {
        RMatrix {
            n,
            v,
            entries: vec![C::new(0.0, 0.0); n * n * n * n],
        }
    }

    #[inline]
    fn idx(&self, i: usize, k: usize, j: usize, l: usize) -> usize {
        ((i * self.n + k) * self.n + j) * self.n + l
    }

    /// Entry `R^{ik}_{jl}`.
    #[inline]
    pub fn entry(&self, i: usize, k: usize, j: usize, l: usize) -> C {
        self.entries[self.idx(i, k, j, l)]
    }

    fn set(&mut self, i: usize, k: usize, j: usize, l: usize, val: C) {
        let at = self.idx(i, k, j, l);
        self.entries[at] = val;
    }

    /// Number of entries with magnitude above `tol`.
    pub fn nonzero_count(&self, tol: f64) -> usize {
        self.entries.iter().filter(|e| e.norm() > tol).count()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    /// Negate every entry in place (used by the twisted system).
    fn negate(&mut self) {
        for e in self.entries.iter_mut() {
            *e = -*e;
        }
    }
}

/// Build the Z/nZ-symmetric vertex R-matrix at spectral argument `v`.
///
/// ```text
/// R(v) = [1]/[1-v] * r_1(v) * Rbar(v)
/// Rbar(v)^{ik}_{jl} = delta_{i+k = j+l mod n} * h(v)
///     * theta[1/2, 1/2+(k-i)/n]((1-v)/(n r); tau_n)
///     / ( theta[1/2, 1/2+(j-k)/n](v/(n r); tau_n)
///       * theta[1/2, 1/2+(j-i)/n](1/(n r); tau_n) )
/// ```
///
/// with `tau_n = pi i/(n eps r)` and
/// `h(v) = prod_{j=0}^{n-1} theta[1/2, 1/2+j/n](v/(n r); tau_n)
///       / prod_{j=1}^{n-1} theta[1/2, 1/2+j/n](0; tau_n)`.
///
/// At `v = 0` every diagonal-in-`(j,k)` entry is an exact `0/0`; the
/// analytic limit is the permutation operator `P`, returned directly.
pub fn r_matrix(v: C, params: &ModelParams) -> Result<RMatrix> {
    let n = params.n;
    let mut rm = RMatrix::zeros(n, v);
    if v.norm() == 0.0 {
        // R(0) = P: P(e_j (x) e_l) = e_l (x) e_j, i.e. entry(i,k,j,l) = [j==k][i==l].
        for j in 0..n {
            for l in 0..n {
                rm.set(l, j, j, l, C::new(1.0, 0.0));
            }
        }
        return Ok(rm);
    }

    let nf = n as f64;
    let nr = nf * params.r;
    let tau = C::new(0.0, PI / (nf * params.eps * params.r));
    let terms = params.theta_terms;
    let th = |c: f64, arg: C| theta(0.5, 0.5 + c / nf, arg, tau, terms);

    // h(v): numerator over all n characteristics, denominator over the n-1
    // nonzero ones (the j = 0 factor would be the odd theta at 0).
    let mut h = C::new(1.0, 0.0);
    for j in 0..n {
        h *= th(j as f64, v / nr)?;
    }
    for j in 1..n {
        h /= th(j as f64, C::new(0.0, 0.0))?;
    }

    let b1 = bracket(C::new(1.0, 0.0), Level::R, params)?;
    let b1v = bracket(C::new(1.0, 0.0) - v, Level::R, params)?;
    if b1v.norm() < POLE_ABS {
        return Err(Error::Pole {
            function: "r_matrix",
            location: format!("[1-v] at v = {v}"),
            denominator_abs: b1v.norm(),
        });
    }
    let scale = b1 / b1v * comm_factor(CommFactorKind::RJ, 1, v, params)?;

    let one = C::new(1.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                for l in 0..n {
                    if (i + k) % n != (j + l) % n {
                        continue;
                    }
                    let num = th((k as f64) - (i as f64), (one - v) / nr)?;
                    let d1 = th((j as f64) - (k as f64), v / nr)?;
                    let d2 = th((j as f64) - (i as f64), one / nr)?;
                    if d1.norm() < 1e-280 || d2.norm() < 1e-280 {
                        return Err(Error::Pole {
                            function: "r_matrix",
                            location: format!("theta denominator at (i,k,j,l)=({i},{k},{j},{l})"),
                            denominator_abs: d1.norm().min(d2.norm()),
                        });
                    }
                    // Gauge fixed by the face correspondence: conjugation by
                    // diag((-1)^j) on each leg.  The factor is (-1)^{(j+l)-(i+k)},
                    // i.e. -1 exactly on charge-wrapping transitions for odd n
                    // (trivial for even n, and invisible to the Yang-Baxter
                    // equation, which this conjugation preserves).
                    let wrap = (j + l) as i64 - (i + k) as i64;
                    let sign = if wrap.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    rm.set(i, k, j, l, sign * scale * h * num / (d1 * d2));
                }
            }
        }
    }
    Ok(rm)
}

/// The twisted vertex weights `S(v) = -R(v)|_{r -> r-1}`.
pub fn twisted(v: C, params: &ModelParams) -> Result<RMatrix> {
    let mut s = r_matrix(v, &params.twisted()?)?;
    s.negate();
    Ok(s)
}

/// Residual of the vertex Yang-Baxter equation
/// `R12(v1-v2) R13(v1) R23(v2) = R23(v2) R13(v1) R12(v1-v2)`
/// over all `n^6` components, normalized by the largest component.
pub fn ybe_residual_vertex(v1: C, v2: C, params: &ModelParams) -> Result<f64> {
    let r12 = r_matrix(v1 - v2, params)?;
    let r13 = r_matrix(v1, params)?;
    let r23 = r_matrix(v2, params)?;
    ybe_residual_vertex_with(&r12, &r13, &r23)
}

/// Same residual for prebuilt weight arrays (used by the twisted system).
pub fn ybe_residual_vertex_with(r12: &RMatrix, r13: &RMatrix, r23: &RMatrix) -> Result<f64> {
    let n = r12.n;
    if r13.n != n || r23.n != n {
        return Err(Error::domain("YBE factors must share n"));
    }
    let mut worst = 0.0_f64;
    let mut scale = 0.0_f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let mut lhs = C::new(0.0, 0.0);
                            let mut rhs = C::new(0.0, 0.0);
                            for p in 0..n {
                                for q in 0..n {
                                    for s in 0..n {
                                        lhs += r12.entry(a, b, p, q)
                                            * r13.entry(p, c, j, s)
                                            * r23.entry(q, s, k, l);
                                        rhs += r23.entry(b, c, q, s)
                                            * r13.entry(a, s, p, l)
                                            * r12.entry(p, q, j, k);
                                    }
                                }
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

/// Corner data for one face weight `W[c d; b a | v]`.
///
/// The square has ascending admissible edges `a -> b -> c` and
/// `a -> d -> c`; non-admissible corner configurations have weight zero.
#[derive(Debug, Clone)]
pub struct FaceWeightQuery {
    /// Top-left corner (two steps above `a`).
    pub c: WeightVec,
    /// Top-right corner (one step above `a`, on the `d`-path).
    pub d: WeightVec,
    /// Bottom-left corner (one step above `a`, on the `b`-path).
    pub b: WeightVec,
    /// Base corner.
    pub a: WeightVec,
    /// Spectral argument.
    pub v: C,
}

/// Evaluate one face Boltzmann weight.
///
/// With `beta = step(a -> b)`, `delta = step(a -> d)`, `gamma = step(b -> c)`:
///
/// ```text
/// all four steps equal (mu):            W = r_1(v)
/// beta != delta, gamma = delta:          W = r_1(v) [v] [a_{delta beta} + 1]
///                                              / ( [1-v] [a_{delta beta}] )
/// beta = delta = mu, gamma = nu != mu:   W = r_1(v) [1] [v + a_{mu nu}]
///                                              / ( [1-v] [a_{mu nu}] )
/// ```
///
/// where `a_{mu nu}` are bar-coordinate differences of the *base* corner.
/// At `v = 0` these weights reduce exactly to `delta_{b d}`.
pub fn face_weight(q: &FaceWeightQuery, params: &ModelParams) -> Result<C> {
    let zero = C::new(0.0, 0.0);
    let n = params.n;
    if q.a.n() != n || q.b.n() != n || q.c.n() != n || q.d.n() != n {
        return Err(Error::domain("face weight corners must have length n"));
    }
    let (beta, delta, gamma, gamma2) = match (
        q.a.step_up_to(&q.b),
        q.a.step_up_to(&q.d),
        q.b.step_up_to(&q.c),
        q.d.step_up_to(&q.c),
    ) {
        (Some(b), Some(d), Some(g), Some(g2)) => (b, d, g, g2),
        _ => return Ok(zero),
    };

    let r1 = comm_factor(CommFactorKind::RJ, 1, q.v, params)?;
    if beta == delta && gamma == beta && gamma2 == beta {
        return Ok(r1);
    }

    let br = |w: C| bracket(w, Level::R, params);
    let b1mv = br(C::new(1.0, 0.0) - q.v)?;
    if b1mv.norm() < POLE_ABS {
        return Err(Error::Pole {
            function: "face_weight",
            location: format!("[1-v] at v = {}", q.v),
            denominator_abs: b1mv.norm(),
        });
    }

    if beta != delta && gamma == delta && gamma2 == beta {
        // Crossing square: mu = delta (d-side color), nu = beta (b-side color).
        let amn = q.a.bar[delta] - q.a.bar[beta];
        let bden = br(C::new(amn, 0.0))?;
        if bden.norm() < POLE_ABS {
            return Err(Error::Pole {
                function: "face_weight",
                location: format!("[a_mu_nu] with a_mu_nu = {amn}"),
                denominator_abs: bden.norm(),
            });
        }
        return Ok(r1 * br(q.v)? * br(C::new(amn + 1.0, 0.0))? / (b1mv * bden));
    }

    if beta == delta && gamma == gamma2 && gamma != beta {
        // Parallel square: mu = beta, nu = gamma.
        let amn = q.a.bar[beta] - q.a.bar[gamma];
        let bden = br(C::new(amn, 0.0))?;
        if bden.norm() < POLE_ABS {
            return Err(Error::Pole {
                function: "face_weight",
                location: format!("[a_mu_nu] with a_mu_nu = {amn}"),
                denominator_abs: bden.norm(),
            });
        }
        return Ok(r1 * br(C::new(1.0, 0.0))? * br(q.v + amn)? / (b1mv * bden));
    }

    Ok(zero)
}

/// The twisted face weights `W'[...] = -W[...]|_{r -> r-1}`.
pub fn twisted_face_weight(q: &FaceWeightQuery, params: &ModelParams) -> Result<C> {
    Ok(-face_weight(q, &params.twisted()?)?)
}

/// Internal: face YBE residual for a fixed base corner, with a selectable
/// weight evaluator (plain or twisted).
fn face_ybe_at_base(
    v1: C,
    v2: C,
    base: &WeightVec,
    params: &ModelParams,
    twisted_weights: bool,
) -> Result<(f64, f64)> {
    let n = params.n;
    let wv = |c: &WeightVec, d: &WeightVec, b: &WeightVec, a: &WeightVec, v: C| -> Result<C> {
        let q = FaceWeightQuery {
            c: c.clone(),
            d: d.clone(),
            b: b.clone(),
            a: a.clone(),
            v,
        };
        if twisted_weights {
            twisted_face_weight(&q, params)
        } else {
            face_weight(&q, params)
        }
    };

    let v12 = v1 - v2;
    let mut worst = 0.0_f64;
    let mut scale = 0.0_f64;
    let a = base;
    // External hexagon: two ascending 3-step paths a -> b -> c -> d and
    // a -> f -> e -> d around the six boundary corners.
    for p1 in 0..n {
        let b = a.shifted_up(p1);
        for p2 in 0..n {
            let c = b.shifted_up(p2);
            for p3 in 0..n {
                let d = c.shifted_up(p3);
                for q1 in 0..n {
                    let f = a.shifted_up(q1);
                    for q2 in 0..n {
                        let e = f.shifted_up(q2);
                        if e.step_up_to(&d).is_none() {
                            continue;
                        }
                        // LHS: internal corner g adjacent above a.
                        let mut lhs = C::new(0.0, 0.0);
                        for lam in 0..n {
                            let g = a.shifted_up(lam);
                            lhs += wv(&d, &e, &c, &g, v1)?
                                * wv(&c, &g, &b, a, v2)?
                                * wv(&e, &f, &g, a, v12)?;
                        }
                        // RHS: internal corner g adjacent above b.
                        let mut rhs = C::new(0.0, 0.0);
                        for lam in 0..n {
                            let g = b.shifted_up(lam);
                            rhs += wv(&g, &f, &b, a, v1)?
                                * wv(&d, &e, &g, &f, v2)?
                                * wv(&d, &g, &c, &b, v12)?;
                        }
                        worst = worst.max((lhs - rhs).norm());
                        scale = scale.max(lhs.norm()).max(rhs.norm());
                    }
                }
            }
        }
    }
    Ok((worst, scale))
}

/// Residual of the face Yang-Baxter (star-triangle) equation
///
/// ```text
/// sum_g W[d e; c g | v1] W[c g; b a | v2] W[e f; g a | v1-v2]
///   = sum_g W[g f; b a | v1] W[d e; g f | v2] W[d g; c b | v1-v2]
/// ```
///
/// maximized over every admissible external hexagon whose base corner is
/// reachable from `a` in at most `height - 1` ascending steps (the equation
/// is local, so `height = 1` — hexagons based at `a` itself — is the
/// standard check).
pub fn ybe_residual_face(
    v1: C,
    v2: C,
    a: &WeightVec,
    height: usize,
    params: &ModelParams,
) -> Result<f64> {
    ybe_residual_face_impl(v1, v2, a, height, params, false)
}

/// Twisted-weight variant of [`ybe_residual_face`] (checks `W'`).
pub fn ybe_residual_face_twisted(
    v1: C,
    v2: C,
    a: &WeightVec,
    height: usize,
    params: &ModelParams,
) -> Result<f64> {
    ybe_residual_face_impl(v1, v2, a, height, params, true)
}

fn ybe_residual_face_impl(
    v1: C,
    v2: C,
    a: &WeightVec,
    height: usize,
    params: &ModelParams,
    twisted_weights: bool,
) -> Result<f64> {
    if height < 1 {
        return Err(Error::domain("face YBE height must be >= 1"));
    }
    if a.n() != params.n {
        return Err(Error::domain("base weight must have length n"));
    }
    // Seed corners: a itself, plus everything reachable in < height steps.
    let mut bases = vec![a.clone()];
    let mut frontier = vec![a.clone()];
    for _ in 1..height {
        let mut next = Vec::new();
        for w in &frontier {
            for mu in 0..params.n {
                next.push(w.shifted_up(mu));
            }
        }
        bases.extend(next.iter().cloned());
        frontier = next;
    }
    let mut worst = 0.0_f64;
    let mut scale = 0.0_f64;
    for base in &bases {
        let (w, s) = face_ybe_at_base(v1, v2, base, params, twisted_weights)?;
        worst = worst.max(w);
        scale = scale.max(s);
    }
    Ok(worst / scale.max(1.0))
}
