//! Backward shifts with operator weights and their formal right inverses.
//!
//! `T z = (S_1^{-1} z_1, S_2^{-1} z_2, …)` and `U y = (0, S_1 y_0, S_2 y_1, …)`.
//! Powers are evaluated per block: block `m` of `T^n z` is
//! `S_{m+1}^{-1} ··· S_{m+n}^{-1} z_{m+n}`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::space::{dist, InnerVec, NormSpec, OuterVec};
use crate::weights::{m_bound, Params, Schedule};
use crate::{Error, Index, Result};

/// A backward shift whose weights can be composed in closed form.
pub trait WeightedShift {
    /// `(outer, inner)` norms of the underlying `⊕_Y X`.
    fn norms(&self) -> (NormSpec, NormSpec);

    /// Largest block index the weights are defined for, if bounded.
    fn horizon(&self) -> Option<Index>;

    /// `S_{t+r} ··· S_{t+1} x`: carries block `t` to block `t + r`.
    fn push(&self, x: &InnerVec, t: Index, r: Index) -> Result<InnerVec>;

    /// `S_{t-r+1}^{-1} ··· S_t^{-1} x`: carries block `t` to block `t - r`.
    fn pull(&self, x: &InnerVec, t: Index, r: Index) -> Result<InnerVec>;

    fn norm(&self, z: &OuterVec) -> f64 {
        let (p, q) = self.norms();
        z.norm(p, q)
    }

    fn check_block(&self, b: Index) -> Result<()> {
        match self.horizon() {
            Some(h) if b > h => Err(Error::Horizon { index: b, horizon: h }),
            _ => Ok(()),
        }
    }
}

/// `T^n z`.
pub fn t_pow<S: WeightedShift + ?Sized>(sys: &S, n: Index, z: &OuterVec) -> Result<OuterVec> {
    let mut out = OuterVec::new();
    for (b, x) in z.blocks() {
        sys.check_block(b)?;
        if b >= n {
            out.set_block(b - n, sys.pull(x, b, n)?);
        }
    }
    Ok(out)
}

/// `U^n y`.
pub fn u_pow<S: WeightedShift + ?Sized>(sys: &S, n: Index, y: &OuterVec) -> Result<OuterVec> {
    let mut out = OuterVec::new();
    for (t, x) in y.blocks() {
        let dst = t.checked_add(n).ok_or(Error::Overflow("block index"))?;
        sys.check_block(dst)?;
        out.set_block(dst, sys.push(x, t, n)?);
    }
    Ok(out)
}

/// `U^shift base`, kept unevaluated.
///
/// Summands of constructed vectors sit at block indices far beyond anything a
/// round trip through `f64` survives, so `T^n U^s = U^{s-n}` is applied
/// symbolically and only the result is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shifted {
    pub base: OuterVec,
    pub shift: Index,
}

impl Shifted {
    pub fn new(base: OuterVec, shift: Index) -> Self {
        Shifted { base, shift }
    }

    /// `T^n U^shift base`, still unevaluated when `n ≤ shift`.
    pub fn t_pow<S: WeightedShift + ?Sized>(&self, sys: &S, n: Index) -> Result<Shifted> {
        if n <= self.shift {
            Ok(Shifted::new(self.base.clone(), self.shift - n))
        } else {
            Ok(Shifted::new(t_pow(sys, n - self.shift, &self.base)?, 0))
        }
    }

    pub fn eval<S: WeightedShift + ?Sized>(&self, sys: &S) -> Result<OuterVec> {
        if self.shift == 0 {
            return Ok(self.base.clone());
        }
        u_pow(sys, self.shift, &self.base)
    }
}

/// `T^n (∑ summands)` evaluated.
pub fn orbit_point<S: WeightedShift + ?Sized>(
    sys: &S,
    summands: &[Shifted],
    n: Index,
) -> Result<OuterVec> {
    let mut acc = OuterVec::new();
    for s in summands {
        let v = s.t_pow(sys, n)?.eval(sys)?;
        acc = crate::space::add(&acc, &v);
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitRow {
    pub n: Index,
    pub distance: f64,
    pub relative: f64,
}

/// Distances `‖T^n x - target‖` for the given times.
pub fn orbit_trace<S, I>(sys: &S, summands: &[Shifted], target: &OuterVec, times: I) -> Result<Vec<OrbitRow>>
where
    S: WeightedShift + ?Sized,
    I: IntoIterator<Item = Index>,
{
    let (p, q) = sys.norms();
    let tn = target.norm(p, q);
    let mut rows = Vec::new();
    for n in times {
        let d = dist(&orbit_point(sys, summands, n)?, target, p, q);
        rows.push(OrbitRow { n, distance: d, relative: if tn > 0.0 { d / tn } else { d } });
    }
    Ok(rows)
}

/// The operator `T` of the construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftOperator {
    pub params: Params,
    pub schedule: Schedule,
    pub outer: NormSpec,
    pub inner: NormSpec,
}

impl ShiftOperator {
    pub fn new(params: Params, schedule: Schedule, outer: NormSpec, inner: NormSpec) -> Result<Self> {
        params.validate()?;
        if schedule.deltas != params.deltas {
            return Err(Error::InvalidParams("schedule does not match params".into()));
        }
        Ok(ShiftOperator { params, schedule, outer, inner })
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }

    pub fn apply_t(&self, z: &OuterVec) -> Result<OuterVec> {
        t_pow(self, 1, z)
    }

    pub fn apply_t_pow(&self, n: Index, z: &OuterVec) -> Result<OuterVec> {
        t_pow(self, n, z)
    }

    pub fn apply_u(&self, y: &OuterVec) -> Result<OuterVec> {
        u_pow(self, 1, y)
    }

    pub fn apply_u_pow(&self, n: Index, y: &OuterVec) -> Result<OuterVec> {
        u_pow(self, n, y)
    }

    /// `C = sup_j ‖S_j^{-1}‖` as bounded by the triangle inequality; with a
    /// 1-unconditional outer basis this bounds `‖T‖`.
    pub fn t_norm_bound(&self) -> f64 {
        let (a, b) = (self.params.alpha, self.params.b);
        a * (1.0 + 3.0 * b) + b
    }

    /// `((|λ| - sup_k ‖w_k‖)/M(d), ‖T^n w - λ(e_0, 0, …)‖)`.
    ///
    /// The first entry is a lower bound for the second whenever the schedule
    /// covers the orbit.
    pub fn non_hyp_lower_bound(&self, w: &OuterVec, lambda: f64, n: Index) -> Result<(f64, f64)> {
        let m = m_bound(&self.params);
        let lhs = (crate::math::abs(lambda) - w.max_block_norm(self.inner)) / m;
        let target = OuterVec::single(0, InnerVec::unit(0).scaled(lambda));
        let rhs = dist(&self.apply_t_pow(n, w)?, &target, self.outer, self.inner);
        Ok((lhs, rhs))
    }
}

impl WeightedShift for ShiftOperator {
    fn norms(&self) -> (NormSpec, NormSpec) {
        (self.outer, self.inner)
    }

    fn horizon(&self) -> Option<Index> {
        Some(self.schedule.horizon())
    }

    fn push(&self, x: &InnerVec, t: Index, r: Index) -> Result<InnerVec> {
        if r == 0 {
            return Ok(x.clone());
        }
        self.schedule.apply_product(t + 1, t + r, x, self.params.alpha, false)
    }

    fn pull(&self, x: &InnerVec, t: Index, r: Index) -> Result<InnerVec> {
        if r == 0 {
            return Ok(x.clone());
        }
        self.schedule.apply_product(t - r + 1, t, x, self.params.alpha, true)
    }
}
