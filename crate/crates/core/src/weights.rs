//! Block schedule and the operator weights `S_j`.
//!
//! Every `S_j` is `D_{k,σ,β} ± N_k` for the block `k` containing `j`, where
//! `D_{k,σ,β}` fixes `e_0`, multiplies `e_{k²}` by `β` and every other
//! coordinate by `σ`, and `N_k = e_{k²}^* ⊗ e_0`. All `σ, β` are integer
//! powers of `α`, so descriptors store exponents and nothing overflows until a
//! value is actually materialized.
//!
//! Products of consecutive weights are evaluated per block: the product over
//! a full block is the identity, and a partial block product is again of the
//! form "fix `e_0`, scale the generic coordinates, act on `span{e_0, e_{k²}}`
//! by an upper triangular 2×2 map" ([`BlockMap`]).

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::math::{abs, powi};
use crate::space::{InnerVec, NormSpec};
use crate::{Error, Index, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub epsilon: f64,
    pub alpha: f64,
    pub d: u32,
    /// `sup ‖e_n^*‖`; canonical bases give 1.
    pub b: f64,
    pub deltas: Vec<Index>,
}

impl Params {
    pub fn new(epsilon: f64, alpha: f64, d: u32) -> Self {
        Params { epsilon, alpha, d, b: 1.0, deltas: Vec::new() }
    }

    /// Smallest `d ≥ 2` with `2α^{-d}b < ε`.
    pub fn auto_d(epsilon: f64, alpha: f64, b: f64) -> Option<u32> {
        if !(alpha > 1.0) || !(epsilon > 0.0) {
            return None;
        }
        (2..=4096u32).find(|&d| 2.0 * powi(alpha, -(d as i128)) * b < epsilon)
    }

    /// Checks everything except the deltas.
    pub fn validate_base(&self) -> Result<()> {
        let bad = |m: alloc::string::String| Err(Error::InvalidParams(m));
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon must lie in (0,1), got {}", self.epsilon));
        }
        if !(self.alpha > 1.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be a finite number > 1, got {}", self.alpha));
        }
        if self.d < 2 {
            return bad(format!("d must be at least 2, got {}", self.d));
        }
        if self.b != 1.0 {
            return bad(format!("only canonical bases are supported (b = 1), got {}", self.b));
        }
        if !(self.perturbation_ratio() < self.epsilon) {
            return bad(format!(
                "2*alpha^-d*b = {} must be < epsilon = {}",
                self.perturbation_ratio(),
                self.epsilon
            ));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_base()?;
        for (i, &delta) in self.deltas.iter().enumerate() {
            let k = i as Index + 1;
            if delta <= k {
                return Err(Error::InvalidParams(format!("delta_{k} = {delta} must exceed {k}")));
            }
        }
        Ok(())
    }

    /// `2α^{-d}b`, the relative size of the perturbations `z^k - x^k`.
    pub fn perturbation_ratio(&self) -> f64 {
        2.0 * powi(self.alpha, -(self.d as i128)) * self.b
    }
}

/// `M(d) = 1 + 3b + 2bα^d`, the uniform bound on `‖S_j···S_1‖`.
pub fn m_bound(params: &Params) -> f64 {
    1.0 + 3.0 * params.b + 2.0 * params.b * powi(params.alpha, params.d as i128)
}

/// Block boundaries `n_k` and `n'_k`, with `n_0 = n'_0 = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub d: Index,
    pub deltas: Vec<Index>,
    pub n: Vec<Index>,
    pub nprime: Vec<Index>,
}

impl Schedule {
    pub fn empty(d: u32) -> Self {
        Schedule { d: d as Index, deltas: Vec::new(), n: alloc::vec![0], nprime: alloc::vec![0] }
    }

    /// Appends block `K+1` with the given `Δ`.
    pub fn push(&mut self, delta: Index) -> Result<()> {
        let last = *self.nprime.last().expect("n'_0 always present");
        let step = self
            .d
            .checked_add(1)
            .and_then(|s| s.checked_add(delta))
            .ok_or(Error::Overflow("schedule length"))?;
        let nk = last.checked_add(step).ok_or(Error::Overflow("n_k"))?;
        let npk = nk.checked_add(step).ok_or(Error::Overflow("n'_k"))?;
        self.deltas.push(delta);
        self.n.push(nk);
        self.nprime.push(npk);
        Ok(())
    }

    /// Number of blocks `K`.
    pub fn blocks(&self) -> usize {
        self.deltas.len()
    }

    /// `n'_K`, the largest weight index available.
    pub fn horizon(&self) -> Index {
        *self.nprime.last().unwrap()
    }

    pub fn delta(&self, k: usize) -> Index {
        self.deltas[k - 1]
    }

    /// Block `k` with `n'_{k-1} < j ≤ n'_k`, and the offset `j - n'_{k-1}`.
    pub fn locate(&self, j: Index) -> Result<(usize, Index)> {
        if j == 0 || j > self.horizon() {
            return Err(Error::Horizon { index: j, horizon: self.horizon() });
        }
        let k = self.nprime.partition_point(|&np| np < j);
        Ok((k, j - self.nprime[k - 1]))
    }

    /// `n_k = (2k-1)(d+1) + Δ_k + 2∑_{j<k} Δ_j`, independent of the recurrence.
    pub fn closed_form_n(&self, k: usize) -> Option<Index> {
        let k_ = k as Index;
        let mut acc = (2 * k_ - 1).checked_mul(self.d + 1)?.checked_add(self.delta(k))?;
        for j in 1..k {
            acc = acc.checked_add(self.delta(j).checked_mul(2)?)?;
        }
        Some(acc)
    }

    pub fn check_closed_form(&self) -> bool {
        (1..=self.blocks()).all(|k| self.closed_form_n(k) == Some(self.n[k]))
            && self.nprime.windows(2).all(|w| w[0] < w[1])
            && self.n.iter().skip(1).zip(self.nprime.iter().skip(1)).all(|(a, b)| a < b)
    }
}

/// Builds the schedule for `params.deltas`, rejecting invalid parameters.
pub fn build_schedule(params: &Params) -> Result<Schedule> {
    params.validate()?;
    let mut s = Schedule::empty(params.d);
    for &delta in &params.deltas {
        s.push(delta)?;
    }
    debug_assert!(s.check_closed_form());
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankOne {
    None,
    MinusN,
    PlusN,
}

impl RankOne {
    pub fn sign(self) -> f64 {
        match self {
            RankOne::None => 0.0,
            RankOne::MinusN => -1.0,
            RankOne::PlusN => 1.0,
        }
    }
}

/// Which of the seven positions inside a block a weight occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightCase {
    Lead,
    FirstKick,
    Decay,
    Regrow,
    SecondKick,
    Settle,
    Close,
}

impl WeightCase {
    pub fn label(self) -> &'static str {
        match self {
            WeightCase::Lead => "lead",
            WeightCase::FirstKick => "kick-",
            WeightCase::Decay => "decay",
            WeightCase::Regrow => "regrow",
            WeightCase::SecondKick => "kick+",
            WeightCase::Settle => "settle",
            WeightCase::Close => "close",
        }
    }
}

/// `S_j = D_{k, α^{sigma_exp}, α^{beta_exp}} ± N_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightDescriptor {
    pub j: Index,
    pub k: usize,
    pub case: WeightCase,
    pub sigma_exp: i128,
    pub beta_exp: i128,
    pub rank_one: RankOne,
}

impl WeightDescriptor {
    pub fn sigma(&self, alpha: f64) -> f64 {
        powi(alpha, self.sigma_exp)
    }

    pub fn beta(&self, alpha: f64) -> f64 {
        powi(alpha, self.beta_exp)
    }

    pub fn special_index(&self) -> Index {
        (self.k as Index) * (self.k as Index)
    }

    pub fn is_rank_one(&self) -> bool {
        self.rank_one != RankOne::None
    }

    /// `S_j x`, or `S_j^{-1} x` when `inverse` is set.
    pub fn apply(&self, alpha: f64, x: &InnerVec, inverse: bool) -> Result<InnerVec> {
        let sign = self.rank_one.sign();
        let sq = self.special_index();
        let (gen, spec) = if inverse {
            (powi(alpha, -self.sigma_exp), powi(alpha, -self.beta_exp))
        } else {
            (powi(alpha, self.sigma_exp), powi(alpha, self.beta_exp))
        };
        let xs = x.get(sq);
        let mut out = InnerVec::new();
        for (p, v) in x.iter() {
            if p == 0 {
                out.add_at(0, v);
            } else if p == sq {
                out.add_at(sq, spec * v);
            } else if v != 0.0 {
                out.add_at(p, gen * v);
            }
        }
        if sign != 0.0 && xs != 0.0 {
            // (D + sN)^{-1} = D^{-1} - s β^{-1} N
            let kick = if inverse { -sign * spec * xs } else { sign * xs };
            out.add_at(0, kick);
        }
        finite(out, "single weight")
    }
}

impl fmt::Display for WeightDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flag = match self.rank_one {
            RankOne::None => "none",
            RankOne::MinusN => "-N",
            RankOne::PlusN => "+N",
        };
        write!(
            f,
            "j={} case={} k={} sigma=alpha^{} beta=alpha^{} rank_one={}",
            self.j,
            self.case.label(),
            self.k,
            self.sigma_exp,
            self.beta_exp,
            flag
        )
    }
}

fn finite(v: InnerVec, what: &'static str) -> Result<InnerVec> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(what))
    }
}

impl Schedule {
    /// Descriptor of `S_j`.
    pub fn weight(&self, j: Index) -> Result<WeightDescriptor> {
        let (k, r) = self.locate(j)?;
        let d = self.d;
        let delta = self.delta(k);
        let len = self.block_len(k);
        let (case, sigma_exp, beta_exp, rank_one) = if r <= d {
            (WeightCase::Lead, -1, 1, RankOne::None)
        } else if r == d + 1 {
            (WeightCase::FirstKick, -1, 0, RankOne::MinusN)
        } else if r <= d + 1 + delta {
            (WeightCase::Decay, -1, -1, RankOne::None)
        } else if r <= d + 1 + 2 * delta {
            (WeightCase::Regrow, -1, 1, RankOne::None)
        } else if r == d + 2 + 2 * delta {
            (WeightCase::SecondKick, -1, 0, RankOne::PlusN)
        } else if r < len {
            (WeightCase::Settle, -1, -1, RankOne::None)
        } else {
            (WeightCase::Close, (len - 1) as i128, -1, RankOne::None)
        };
        Ok(WeightDescriptor { j, k, case, sigma_exp, beta_exp, rank_one })
    }

    /// `n'_k - n'_{k-1}`.
    pub fn block_len(&self, k: usize) -> Index {
        self.nprime[k] - self.nprime[k - 1]
    }

    /// Closed form of the prefix product `S_{n'_{k-1}+r} ··· S_{n'_{k-1}+1}`.
    pub fn prefix(&self, k: usize, r: Index, alpha: f64) -> BlockMap {
        let d = self.d as i128;
        let delta = self.delta(k) as i128;
        let len = self.block_len(k) as i128;
        let r = r as i128;
        let kick = -powi(alpha, d);
        let (generic_exp, special_exp, gamma) = if r == 0 || r == len {
            (0, 0, 0.0)
        } else if r <= d {
            (-r, r, 0.0)
        } else if r <= d + 1 + delta {
            (-r, d - (r - d - 1), kick)
        } else if r <= d + 1 + 2 * delta {
            (-r, d - delta + (r - d - 1 - delta), kick)
        } else {
            (-r, d - (r - d - 2 - 2 * delta), 0.0)
        };
        BlockMap { k, generic_exp, special_exp, gamma }
    }

    /// `S_hi ··· S_lo` restricted to block `k` (both offsets inside the block).
    fn segment(&self, k: usize, r_lo: Index, r_hi: Index, alpha: f64) -> BlockMap {
        let hi = self.prefix(k, r_hi, alpha);
        let lo = self.prefix(k, r_lo - 1, alpha);
        let gamma = if hi.gamma == lo.gamma {
            0.0
        } else {
            (hi.gamma - lo.gamma) * powi(alpha, -lo.special_exp)
        };
        BlockMap {
            k,
            generic_exp: hi.generic_exp - lo.generic_exp,
            special_exp: hi.special_exp - lo.special_exp,
            gamma,
        }
    }

    /// The nontrivial block factors of `S_hi ··· S_lo`, in application order.
    ///
    /// Full blocks are the identity and are skipped.
    pub fn product_factors(&self, lo: Index, hi: Index, alpha: f64) -> Result<Vec<BlockMap>> {
        if lo == 0 || lo > hi {
            return Err(Error::Horizon { index: lo, horizon: self.horizon() });
        }
        let (k_lo, r_lo) = self.locate(lo)?;
        let (k_hi, r_hi) = self.locate(hi)?;
        let mut out = Vec::new();
        if k_lo == k_hi {
            if !(r_lo == 1 && r_hi == self.block_len(k_lo)) {
                out.push(self.segment(k_lo, r_lo, r_hi, alpha));
            }
            return Ok(out);
        }
        if r_lo != 1 {
            out.push(self.segment(k_lo, r_lo, self.block_len(k_lo), alpha));
        }
        if r_hi != self.block_len(k_hi) {
            out.push(self.segment(k_hi, 1, r_hi, alpha));
        }
        Ok(out)
    }

    /// `S_hi ··· S_lo x`, or `S_lo^{-1} ··· S_hi^{-1} x` when `inverse` is set.
    ///
    /// An empty range (`hi = lo - 1`) is the identity.
    pub fn apply_product(
        &self,
        lo: Index,
        hi: Index,
        x: &InnerVec,
        alpha: f64,
        inverse: bool,
    ) -> Result<InnerVec> {
        if hi + 1 == lo {
            return Ok(x.clone());
        }
        let factors = self.product_factors(lo, hi, alpha)?;
        let mut v = x.clone();
        if inverse {
            for f in factors.iter().rev() {
                v = f.apply_inverse(alpha, &v);
            }
        } else {
            for f in &factors {
                v = f.apply(alpha, &v);
            }
        }
        finite(v, "weight product")
    }
}

/// Map fixing `e_0`, scaling `e_p` (`p ∉ {0,k²}`) by `α^{generic_exp}` and
/// sending `e_{k²}` to `α^{special_exp} e_{k²} + gamma · e_0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockMap {
    pub k: usize,
    pub generic_exp: i128,
    pub special_exp: i128,
    pub gamma: f64,
}

impl BlockMap {
    fn special_index(&self) -> Index {
        (self.k as Index) * (self.k as Index)
    }

    pub fn apply(&self, alpha: f64, x: &InnerVec) -> InnerVec {
        let sq = self.special_index();
        let gen = powi(alpha, self.generic_exp);
        let spec = powi(alpha, self.special_exp);
        let mut out = InnerVec::new();
        for (p, v) in x.iter() {
            if p == 0 {
                out.add_at(0, v);
            } else if p == sq {
                out.add_at(sq, spec * v);
                if self.gamma != 0.0 {
                    out.add_at(0, self.gamma * v);
                }
            } else {
                out.add_at(p, gen * v);
            }
        }
        out
    }

    pub fn apply_inverse(&self, alpha: f64, x: &InnerVec) -> InnerVec {
        let sq = self.special_index();
        let gen = powi(alpha, -self.generic_exp);
        let spec = powi(alpha, -self.special_exp);
        let mut out = InnerVec::new();
        for (p, v) in x.iter() {
            if p == 0 {
                out.add_at(0, v);
            } else if p == sq {
                out.add_at(sq, spec * v);
                if self.gamma != 0.0 {
                    out.add_at(0, -self.gamma * spec * v);
                }
            } else {
                out.add_at(p, gen * v);
            }
        }
        out
    }
}

/// Triangle-inequality bound on `‖S_j^{-1}‖` for the case of `S_j`.
pub fn norm_bound_s_inv(w: &WeightDescriptor, params: &Params) -> f64 {
    let (a, b) = (params.alpha, params.b);
    if w.is_rank_one() {
        a * (1.0 + 2.0 * b) + 2.0 * b
    } else {
        a * (1.0 + 3.0 * b) + b
    }
}

/// Largest ratio `‖A u‖ / ‖u‖` over the probes.
pub fn empirical_norm<F>(op: F, probes: &[InnerVec], q: NormSpec) -> Result<f64>
where
    F: Fn(&InnerVec) -> Result<InnerVec>,
{
    let mut best = 0.0f64;
    for u in probes {
        let nu = u.norm(q);
        if nu == 0.0 {
            continue;
        }
        best = best.max(op(u)?.norm(q) / nu);
    }
    Ok(best)
}

/// Probe vectors for norm estimates on block `k`.
///
/// `random` unit vectors supported on `{0, …, window}` with mixed signs (half
/// dense, half with three entries), plus `e_0`, `e_{k²}`, `e_0 ± e_{k²}`, which
/// pin down the only non-diagonal action.
pub fn probes(k: usize, window: Index, random: usize, seed: u64, q: NormSpec) -> Vec<InnerVec> {
    let sq = (k as Index) * (k as Index);
    let mut out = alloc::vec![
        InnerVec::unit(0),
        InnerVec::unit(sq),
        InnerVec::from_pairs([(0, 1.0), (sq, 1.0)]),
        InnerVec::from_pairs([(0, 1.0), (sq, -1.0)]),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..random {
        let v = if t % 2 == 0 {
            InnerVec::from_pairs((0..=window).map(|i| (i, rng.gen_range(-1.0..1.0))))
        } else {
            InnerVec::from_pairs((0..3).map(|_| {
                let i = rng.gen_range(0..=window as u64) as Index;
                (i, rng.gen_range(-1.0..1.0))
            }))
        };
        let n = v.norm(q);
        if n > 0.0 {
            out.push(v.scaled(1.0 / n));
        }
    }
    out
}

/// Sanity helper: `|a - b| ≤ tol` for all coordinates of two inner vectors.
pub fn max_abs_diff(a: &InnerVec, b: &InnerVec) -> f64 {
    a.axpy(-1.0, b).iter().map(|(_, v)| abs(v)).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sched(d: u32, deltas: &[Index]) -> Schedule {
        let mut p = Params::new(0.3, 2.0, d);
        p.deltas = deltas.to_vec();
        build_schedule(&p).unwrap()
    }

    #[test]
    fn schedule_examples() {
        let s = sched(3, &[10, 12]);
        assert_eq!(s.n, vec![0, 14, 44]);
        assert_eq!(s.nprime, vec![0, 28, 60]);
        assert!(s.check_closed_form());
        assert_eq!(s.closed_form_n(1), Some(14));
        let e = sched(3, &[]);
        assert_eq!((e.n.clone(), e.nprime.clone()), (vec![0], vec![0]));
    }

    #[test]
    fn params_validation() {
        let mut p = Params::new(0.3, 2.0, 3);
        p.deltas = vec![1];
        assert!(matches!(build_schedule(&p), Err(Error::InvalidParams(_))));
        let p = Params::new(0.2, 2.0, 3);
        assert!(p.validate().is_err(), "2*2^-3 = 0.25 is not < 0.2");
        assert_eq!(Params::auto_d(0.2, 2.0, 1.0), Some(4));
        assert_eq!(Params::auto_d(0.3, 2.0, 1.0), Some(3));
        assert!(Params::new(1.5, 2.0, 3).validate().is_err());
        assert!(Params::new(0.3, 1.0, 3).validate().is_err());
        assert!(Params::new(0.9, 2.0, 1).validate().is_err());
    }

    #[test]
    fn weight_examples() {
        let s = sched(3, &[10]);
        let w1 = s.weight(1).unwrap();
        assert_eq!((w1.k, w1.sigma(2.0), w1.beta(2.0), w1.rank_one), (1, 0.5, 2.0, RankOne::None));
        let w4 = s.weight(4).unwrap();
        assert_eq!((w4.k, w4.sigma(2.0), w4.beta(2.0), w4.rank_one), (1, 0.5, 1.0, RankOne::MinusN));
        let w28 = s.weight(28).unwrap();
        assert_eq!(w28.case, WeightCase::Close);
        assert_eq!((w28.sigma(2.0), w28.beta(2.0)), (2f64.powi(27), 0.5));
        assert!(s.weight(0).is_err());
        assert!(matches!(s.weight(29), Err(Error::Horizon { .. })));
    }

    #[test]
    fn case_boundaries_follow_table() {
        let (d, delta) = (3u128, 10u128);
        let s = sched(3, &[delta]);
        let nk = s.n[1];
        let expect = |j: Index| -> WeightCase {
            if j <= d {
                WeightCase::Lead
            } else if j == d + 1 {
                WeightCase::FirstKick
            } else if j <= nk {
                WeightCase::Decay
            } else if j <= nk + delta {
                WeightCase::Regrow
            } else if j == nk + delta + 1 {
                WeightCase::SecondKick
            } else if j <= nk + d + delta {
                WeightCase::Settle
            } else {
                WeightCase::Close
            }
        };
        for j in 1..=s.horizon() {
            assert_eq!(s.weight(j).unwrap().case, expect(j), "j={j}");
        }
    }

    #[test]
    fn q0_and_inverse_examples() {
        let s = sched(3, &[10, 12]);
        for j in 1..=s.horizon() {
            let w = s.weight(j).unwrap();
            assert_eq!(w.apply(2.0, &InnerVec::unit(0), false).unwrap(), InnerVec::unit(0));
        }
        let w4 = s.weight(4).unwrap();
        let got = w4.apply(2.0, &InnerVec::unit(1), true).unwrap();
        assert_eq!(got, InnerVec::from_pairs([(0, 1.0), (1, 1.0)]));
        let w = s.weight(2).unwrap();
        assert_eq!(w.apply(2.0, &InnerVec::unit(7), false).unwrap(), InnerVec::from_pairs([(7, 0.5)]));
    }

    #[test]
    fn products_examples() {
        let s = sched(3, &[10, 12]);
        let e5 = InnerVec::unit(5);
        assert_eq!(s.apply_product(1, s.nprime[1], &e5, 2.0, false).unwrap(), e5);
        let e4 = InnerVec::unit(4);
        assert_eq!(s.apply_product(1, s.nprime[2], &e4, 2.0, false).unwrap(), e4);
        let i = s.nprime[1] + 2;
        let got = s.apply_product(1, i, &e5, 2.0, true).unwrap();
        assert_eq!(got, InnerVec::from_pairs([(5, 4.0)]));
    }

    #[test]
    fn closed_form_matches_sequential_on_small_blocks() {
        let s = sched(3, &[9, 11, 14]);
        let alpha = 1.5;
        let x = InnerVec::from_pairs([(0, 0.3), (1, -1.0), (4, 2.0), (9, 0.7), (5, 1.25)]);
        for lo in 1..=s.horizon() {
            for hi in lo..=s.horizon().min(lo + 45) {
                let mut seq = x.clone();
                for j in lo..=hi {
                    seq = s.weight(j).unwrap().apply(alpha, &seq, false).unwrap();
                }
                let fast = s.apply_product(lo, hi, &x, alpha, false).unwrap();
                let scale = seq.norm(NormSpec::Sup).max(1.0);
                assert!(max_abs_diff(&seq, &fast) <= 1e-9 * scale, "lo={lo} hi={hi}");
                let back = s.apply_product(lo, hi, &fast, alpha, true).unwrap();
                assert!(max_abs_diff(&back, &x) <= 1e-9 * scale, "inverse lo={lo} hi={hi}");
            }
        }
    }

    #[test]
    fn bounds_substitution() {
        let mut p = Params::new(0.3, 2.0, 3);
        assert_eq!(m_bound(&p), 20.0);
        p.d = 4;
        assert_eq!(m_bound(&p), 36.0);
        let p = Params::new(0.3, 2.0, 3);
        let s = sched(3, &[10]);
        assert_eq!(norm_bound_s_inv(&s.weight(1).unwrap(), &p), 9.0);
        assert_eq!(norm_bound_s_inv(&s.weight(4).unwrap(), &p), 8.0);
        let near_one = Params { alpha: 1.0 + 1e-12, ..Params::new(0.9, 2.0, 3) };
        assert!((m_bound(&near_one) - 6.0).abs() < 1e-9);
    }

    #[test]
    fn empirical_norm_of_diagonal() {
        let s = sched(3, &[10]);
        let w = s.weight(1).unwrap();
        let q = NormSpec::P(2.0);
        let pr = probes(1, 5, 200, 7, q);
        let n = empirical_norm(|u| w.apply(2.0, u, false), &pr, q).unwrap();
        assert!(n <= 2.0 + 1e-9);
        assert!(n >= 2.0 - 1e-12, "e_1 probe hits beta = 2 exactly");
    }
}
