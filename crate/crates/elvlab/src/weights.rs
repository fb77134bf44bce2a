//! Weight-lattice bookkeeping: weights of the underlying rank-`(n-1)`
//! system, admissible descent paths, sector scalars and normalization
//! products.
//!
//! A weight `a` is stored through its *bar coordinates*
//! `bar[mu] = <a + rho, eps_mu>`, where `eps_mu` is the orthonormal ambient
//! basis, `bar_eps_mu = eps_mu - (1/n) sum_nu eps_nu` the traceless
//! projections, and `rho` the half-sum with `rho_bar[mu] = (n-1)/2 - mu`.
//! Every formula in the crate consumes either pairwise differences
//! `a_{mu nu} = bar[mu] - bar[nu]` or single bar coordinates, so the bar
//! vector is the complete description.
//!
//! Admissible single steps *subtract* a projected basis vector:
//! `a -> a - bar_eps_mu` (paths descend).  Because
//! `sum_mu bar_eps_mu = 0`, descending through all `n` colors returns to the
//! start, which is exactly the periodicity of the tail ground state.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::elliptic::{bracket, qpoch};
use crate::error::{Error, Result};
use crate::params::{Level, ModelParams, C};

/// A weight in bar coordinates, tagged by the elliptic level it lives at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVec {
    /// Bar coordinates `bar[mu] = <a + rho, eps_mu>`, length `n`.
    pub bar: Vec<f64>,
    /// Elliptic level tag: `Level::R` for the unprimed (vertex) sector,
    /// `Level::RMinus1` for the primed (tail boundary) sector.
    pub level: Level,
}

impl WeightVec {
    /// Build from explicit bar coordinates.
    pub fn from_bars(bar: Vec<f64>, level: Level) -> Result<Self> {
        if bar.len() < 2 {
            return Err(Error::domain("weight needs n >= 2 coordinates"));
        }
        Ok(WeightVec { bar, level })
    }

    /// The zero weight `a = 0`, i.e. bar coordinates of `rho`:
    /// `bar[mu] = (n-1)/2 - mu`, so `a_{mu nu} = nu - mu`.
    pub fn rho(n: usize, level: Level) -> Self {
        let bar = (0..n).map(|mu| (n as f64 - 1.0) / 2.0 - mu as f64).collect();
        WeightVec { bar, level }
    }

    /// Number of colors `n`.
    pub fn n(&self) -> usize {
        self.bar.len()
    }

    /// The weight shifted *up* one admissible step: `a + bar_eps_mu`.
    pub fn shifted_up(&self, mu: usize) -> Self {
        let n = self.n() as f64;
        let mut bar = self.bar.clone();
        for (nu, b) in bar.iter_mut().enumerate() {
            *b += if nu == mu { 1.0 - 1.0 / n } else { -1.0 / n };
        }
        WeightVec { bar, level: self.level }
    }

    /// The weight shifted *down* one admissible step: `a - bar_eps_mu`.
    pub fn shifted_down(&self, mu: usize) -> Self {
        let n = self.n() as f64;
        let mut bar = self.bar.clone();
        for (nu, b) in bar.iter_mut().enumerate() {
            *b -= if nu == mu { 1.0 - 1.0 / n } else { -1.0 / n };
        }
        WeightVec { bar, level: self.level }
    }

    /// Matrix of pairwise differences `a_{mu nu} = bar[mu] - bar[nu]`.
    pub fn pair_diffs(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        (0..n)
            .map(|mu| (0..n).map(|nu| self.bar[mu] - self.bar[nu]).collect())
            .collect()
    }

    /// If `other = self + bar_eps_mu` for some color `mu`, return it.
    pub fn step_up_to(&self, other: &WeightVec) -> Option<usize> {
        let n = self.n();
        if other.n() != n {
            return None;
        }
        'color: for mu in 0..n {
            let cand = self.shifted_up(mu);
            for nu in 0..n {
                if (cand.bar[nu] - other.bar[nu]).abs() > 1e-9 {
                    continue 'color;
                }
            }
            return Some(mu);
        }
        None
    }

    /// Maximum distance of any pairwise difference from the integer lattice.
    ///
    /// Generic weights keep this bounded away from zero so that brackets of
    /// differences stay away from their zeros.
    pub fn genericity(&self) -> f64 {
        let n = self.n();
        let mut worst = f64::INFINITY;
        for mu in 0..n {
            for nu in 0..n {
                if mu == nu {
                    continue;
                }
                let d = self.bar[mu] - self.bar[nu];
                let frac = (d - d.round()).abs();
                worst = worst.min(frac);
            }
        }
        worst
    }
}

/// Free-function form of [`WeightVec::shifted_up`].
pub fn shift(a: &WeightVec, mu: usize) -> WeightVec {
    a.shifted_up(mu)
}

/// Free-function form of [`WeightVec::pair_diffs`].
pub fn pair_diffs(a: &WeightVec) -> Vec<Vec<f64>> {
    a.pair_diffs()
}

/// Draw a generic weight: `rho` plus mean-centered offsets uniform in
/// `[0.1, 0.9]`, redrawn until every pairwise difference sits at least
/// `0.05` away from the integer lattice.
///
/// The offsets are re-centered so that `sum_mu bar[mu] = 0`: the shifted
/// coordinates live in the traceless weight space, and the one-column link
/// weights rely on that normalization (only pairwise differences enter the
/// lattice weights themselves, so those are insensitive to the centering).
pub fn draw_generic(rng: &mut impl Rng, n: usize, level: Level) -> WeightVec {
    loop {
        let mut w = WeightVec::rho(n, level);
        let offsets: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..0.9)).collect();
        let mean = offsets.iter().sum::<f64>() / n as f64;
        for (b, u) in w.bar.iter_mut().zip(&offsets) {
            *b += u - mean;
        }
        if w.genericity() > 0.05 {
            return w;
        }
    }
}

/// A weight-lattice path descending one admissible step at a time:
/// `a_{j+1} = a_j - bar_eps_{steps[j]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissiblePath {
    /// Starting weight `a_0`.
    pub start: WeightVec,
    /// Colors of the descending steps.
    pub steps: Vec<usize>,
}

impl AdmissiblePath {
    /// Build a path, validating the step colors.
    pub fn new(start: WeightVec, steps: Vec<usize>) -> Result<Self> {
        let n = start.n();
        if let Some(&bad) = steps.iter().find(|&&s| s >= n) {
            return Err(Error::domain(format!("step color {bad} out of range 0..{n}")));
        }
        Ok(AdmissiblePath { start, steps })
    }

    /// The ground-state tail path based at `xi`: step colors
    /// `n-1, n-2, ..., 1, 0, n-1, ...`, so that
    /// `a_1 = xi + omega_{n-1}, a_2 = xi + omega_{n-2}, ...` and the path is
    /// periodic with period `n` (`omega_mu = sum_{nu < mu} bar_eps_nu`).
    pub fn ground_tail(xi: WeightVec, len: usize) -> Self {
        let n = xi.n();
        let steps = (0..len).map(|j| (n - 1 - (j % n)) % n).collect();
        AdmissiblePath { start: xi, steps }
    }

    /// Number of weights on the path (steps + 1).
    pub fn len(&self) -> usize {
        self.steps.len() + 1
    }

    /// True when the path has no steps.
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Weight after `j` descending steps (`0 <= j <= steps.len()`).
    pub fn weight_at(&self, j: usize) -> WeightVec {
        let mut w = self.start.clone();
        for &mu in self.steps.iter().take(j) {
            w = w.shifted_down(mu);
        }
        w
    }
}

/// Sector scalars attached to a pair of weights `(k, l)`:
///
/// ```text
/// K_{mu nu}  = <eps_mu - eps_nu, k> = k_bar[mu] - k_bar[nu]
/// L_{mu nu}  = <eps_mu - eps_nu, l> = l_bar[mu] - l_bar[nu]
/// pi_{mu nu} = r L_{mu nu} - (r-1) K_{mu nu}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorScalars {
    /// Level-`r` differences `K_{mu nu}`.
    pub k_mat: Vec<Vec<f64>>,
    /// Level-`(r-1)` differences `L_{mu nu}`.
    pub l_mat: Vec<Vec<f64>>,
    /// Mixed scalars `pi_{mu nu} = r L - (r-1) K`.
    pub pi: Vec<Vec<f64>>,
}

impl SectorScalars {
    /// Build the scalars from the unprimed sector weight `k` and the primed
    /// sector weight `l`.
    pub fn from_weights(k: &WeightVec, l: &WeightVec, params: &ModelParams) -> Result<Self> {
        if k.n() != params.n || l.n() != params.n {
            return Err(Error::domain("sector weights must have length n"));
        }
        if k.level != Level::R || l.level != Level::RMinus1 {
            return Err(Error::domain(
                "sector scalars need k at Level::R and l at Level::RMinus1",
            ));
        }
        let k_mat = k.pair_diffs();
        let l_mat = l.pair_diffs();
        let n = params.n;
        let pi = (0..n)
            .map(|mu| {
                (0..n)
                    .map(|nu| params.r * l_mat[mu][nu] - (params.r - 1.0) * k_mat[mu][nu])
                    .collect()
            })
            .collect();
        Ok(SectorScalars { k_mat, l_mat, pi })
    }
}

/// Which normalization product to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormProductKind {
    /// `G_a = prod_{mu < nu} [a_{mu nu}]` (level `r` brackets).
    GA,
    /// `G'_xi = prod_{mu < nu} [xi_{mu nu}]'` (level `r-1` brackets).
    GXiPrime,
    /// `b_l = ( (x^{2r}; x^{2r}) / (x^{2r-2}; x^{2r-2}) )^{(n-1)(n-2)/2} G'_xi`.
    BL,
    /// The level constant `chi = (x^{2n}; x^{2n}) / (x^2; x^2)`
    /// (independent of the weight).
    ChiLevel,
}

/// Evaluate a normalization product for the weight `a`.
pub fn norm_products(a: &WeightVec, which: NormProductKind, params: &ModelParams) -> Result<C> {
    if a.n() != params.n {
        return Err(Error::domain("weight length must equal n"));
    }
    let n = params.n;
    let pair_prod = |level: Level| -> Result<C> {
        let mut acc = C::new(1.0, 0.0);
        for mu in 0..n {
            for nu in (mu + 1)..n {
                acc *= bracket(C::new(a.bar[mu] - a.bar[nu], 0.0), level, params)?;
            }
        }
        Ok(acc)
    };
    match which {
        NormProductKind::GA => {
            if a.level != Level::R {
                return Err(Error::domain("G_a expects a Level::R weight"));
            }
            pair_prod(Level::R)
        }
        NormProductKind::GXiPrime => {
            if a.level != Level::RMinus1 {
                return Err(Error::domain("G'_xi expects a Level::RMinus1 weight"));
            }
            pair_prod(Level::RMinus1)
        }
        NormProductKind::BL => {
            if a.level != Level::RMinus1 {
                return Err(Error::domain("b_l expects a Level::RMinus1 weight"));
            }
            let qr = params.xpow(2.0 * params.r);
            let qr1 = params.xpow(2.0 * (params.r - 1.0));
            let euler_r = qpoch(C::new(qr, 0.0), &[qr], params.prod_tol)?;
            let euler_r1 = qpoch(C::new(qr1, 0.0), &[qr1], params.prod_tol)?;
            let exp = ((n - 1) * (n - 2) / 2) as i32;
            Ok((euler_r / euler_r1).powi(exp) * pair_prod(Level::RMinus1)?)
        }
        NormProductKind::ChiLevel => {
            let q2n = params.xpow(2.0 * n as f64);
            let q2 = params.xpow(2.0);
            let num = qpoch(C::new(q2n, 0.0), &[q2n], params.prod_tol)?;
            let den = qpoch(C::new(q2, 0.0), &[q2], params.prod_tol)?;
            Ok(num / den)
        }
    }
}

/// Ambient coordinates of the root `alpha_mu = eps_{mu-1} - eps_mu`
/// (`1 <= mu <= n-1`).
pub fn alpha_coords(mu: usize, n: usize) -> Result<Vec<f64>> {
    if mu < 1 || mu >= n {
        return Err(Error::domain(format!("alpha index {mu} outside 1..={}", n - 1)));
    }
    let mut v = vec![0.0; n];
    v[mu - 1] = 1.0;
    v[mu] = -1.0;
    Ok(v)
}

/// Ambient coordinates of the fundamental weight
/// `omega_mu = sum_{nu=0}^{mu-1} bar_eps_nu` (`1 <= mu <= n-1`).
pub fn omega_coords(mu: usize, n: usize) -> Result<Vec<f64>> {
    if mu < 1 || mu >= n {
        return Err(Error::domain(format!("omega index {mu} outside 1..={}", n - 1)));
    }
    let frac = mu as f64 / n as f64;
    Ok((0..n)
        .map(|k| if k < mu { 1.0 - frac } else { -frac })
        .collect())
}

/// Euclidean pairing in ambient coordinates (`<eps_mu, eps_nu> = delta`).
pub fn inner(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}
