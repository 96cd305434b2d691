//! The dense family `x^k`, its perturbations `z^k = x^k + v^k`, and the
//! adaptive choice of the block lengths `Δ_k`.
//!
//! `Δ_k` is chosen so that `U^{n_k} z^k` is tiny (so `z^k` is an admissible
//! `D₂` element) and also `U^{n_k - n_i} z^k` for every earlier block `i ≥ 2`.
//! The second family of conditions keeps the contribution of later summands
//! small at every earlier hit time of the criterion engine.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::math::powi;
use crate::shift::ShiftOperator;
use crate::space::{dist, sub, InnerVec, NormSpec, OuterVec};
use crate::weights::{Params, Schedule};
use crate::{Error, Index, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub delta_min: Index,
    pub cap: Index,
    /// Extra bits demanded beyond `2^{-k}` for every residual.
    pub tail_bits: u32,
    pub seed: u64,
    /// Every `fresh_every`-th family member comes from the enumeration, the
    /// others replay the focus list.
    pub fresh_every: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { delta_min: 8, cap: 1 << 100, tail_bits: 40, seed: 0, fresh_every: 8 }
    }
}

/// `x^2, x^3, …, x^K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseFamily {
    pub members: Vec<OuterVec>,
    /// For each member, the focus index it replays, if any.
    pub replays: Vec<Option<usize>>,
}

impl DenseFamily {
    pub fn get(&self, k: usize) -> &OuterVec {
        &self.members[k - 2]
    }

    pub fn max_k(&self) -> usize {
        self.members.len() + 1
    }

    pub fn replay_of(&self, k: usize) -> Option<usize> {
        self.replays[k - 2]
    }
}

/// Whether `x` has blocks and inner support inside `{0, …, k-1}`.
pub fn fits_shape(x: &OuterVec, k: usize) -> bool {
    let k = k as Index;
    x.max_block().is_none_or(|b| b < k) && x.max_inner_index().is_none_or(|i| i < k)
}

/// Fresh element number `t` of the dyadic enumeration, clipped to shape `k`.
///
/// Level `L = 1 + ⌊log₂(t+1)⌋` fixes the resolution `2^{-L}`; the number of
/// blocks and coordinates is geometric, values lie in `[-2, 2]`. Every
/// finitely supported dyadic vector of resolution `2^{-L}` and range `[-2,2]`
/// has positive probability at each level from `L` on.
pub fn fresh_element(t: u64, k: usize, seed: u64) -> OuterVec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t);
    let level = 1 + (64 - (t + 1).leading_zeros() - 1) as i32;
    let span = 1i64 << (level + 1);
    let denom = libm::ldexp(1.0, -level);
    let geometric = |rng: &mut ChaCha8Rng| {
        let mut n = 1;
        while n < k && rng.gen_bool(0.5) {
            n += 1;
        }
        n
    };
    let nb = geometric(&mut rng);
    let nd = geometric(&mut rng);
    loop {
        let mut z = OuterVec::new();
        for b in 0..nb {
            let mut x = InnerVec::new();
            for i in 0..nd {
                if nb * nd == 1 || rng.gen_bool(0.5) {
                    x.set(i as Index, rng.gen_range(-span..=span) as f64 * denom);
                }
            }
            z.set_block(b as Index, x);
        }
        if !z.is_zero() {
            return z;
        }
    }
}

/// `x^2, …, x^K`: the focus list replayed in order (cyclically), with a
/// fresh enumerated element at every `fresh_every`-th position and wherever
/// the next focus vector does not fit the shape yet.
pub fn gen_dense_family(k_max: usize, seed: u64, focus: &[OuterVec], fresh_every: usize) -> DenseFamily {
    let mut members = Vec::new();
    let mut replays = Vec::new();
    let mut next_focus = 0usize;
    let mut fresh = 0u64;
    for k in 2..=k_max {
        let pos = k - 2;
        let fresh_slot = focus.is_empty() || (fresh_every > 0 && pos % fresh_every == fresh_every - 1);
        let candidate = if fresh_slot { None } else { Some(next_focus % focus.len()) };
        match candidate {
            Some(f) if fits_shape(&focus[f], k) && !focus[f].is_zero() => {
                members.push(focus[f].clone());
                replays.push(Some(f));
                next_focus += 1;
            }
            _ => {
                members.push(fresh_element(fresh, k, seed));
                replays.push(None);
                fresh += 1;
            }
        }
    }
    DenseFamily { members, replays }
}

/// `v_j^k = c_j^k e_{k²}`.
pub fn build_v(k: usize, j: Index, x_block: &InnerVec, schedule: &Schedule, params: &Params) -> Result<InnerVec> {
    Ok(InnerVec::from_pairs([(sq(k), coefficient(k, j, x_block, schedule, params)?)]))
}

fn sq(k: usize) -> Index {
    (k as Index) * (k as Index)
}

/// `c_j^k`, following the four ranges of `j` inside block `l`.
pub fn coefficient(k: usize, j: Index, x: &InnerVec, schedule: &Schedule, params: &Params) -> Result<f64> {
    if j >= k as Index {
        return Err(Error::InvalidParams(format!("block {j} of z^{k} must be below {k}")));
    }
    let (l, _) = schedule.locate(j + 1)?;
    let base = schedule.nprime[l - 1];
    let n_l = schedule.n[l];
    let delta = schedule.delta(l) as i128;
    let d = schedule.d as i128;
    let a = params.alpha;
    let lead = -(d + (j - base) as i128);
    let x0 = x.get(0);
    let xl = x.get(sq(l));
    let value = if j <= base + schedule.d {
        x0
    } else if j <= n_l {
        x0 + powi(a, (j - base) as i128 - (d + 1)) * xl
    } else if j <= n_l + schedule.delta(l) {
        x0 + powi(a, delta - (j - n_l) as i128) * xl
    } else {
        x0
    };
    Ok(powi(a, lead) * value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensePair {
    pub k: usize,
    pub x: OuterVec,
    pub v: OuterVec,
    pub z: OuterVec,
    pub coeffs: Vec<f64>,
    pub support_bound: usize,
}

impl DensePair {
    /// Builds `z^k` from `x^k`; needs blocks `1..k-1` of the schedule.
    pub fn new(k: usize, x: OuterVec, schedule: &Schedule, params: &Params) -> Result<Self> {
        if !fits_shape(&x, k) || x.is_zero() {
            return Err(Error::InvalidParams(format!("x^{k} is zero or has the wrong shape")));
        }
        let mut v = OuterVec::new();
        let mut coeffs = Vec::with_capacity(k);
        for j in 0..k as Index {
            let c = coefficient(k, j, &x.block(j), schedule, params)?;
            coeffs.push(c);
            v.set_block(j, InnerVec::from_pairs([(sq(k), c)]));
        }
        let z = crate::space::add(&x, &v);
        Ok(DensePair { k, x, v, z, coeffs, support_bound: k })
    }

    /// `‖z^k - x^k‖ / ‖x^k‖`.
    pub fn perturbation_ratio(&self, p: NormSpec, q: NormSpec) -> f64 {
        sub(&self.z, &self.x).norm(p, q) / self.x.norm(p, q)
    }
}

/// Residual norms of the conditions on `Δ_k`, all compared against `threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaResiduals {
    /// `‖S_{n_k+j} ··· S_{j+1} z^k_j‖` for `j = 0..k`.
    pub item3: Vec<f64>,
    /// `max_j ‖S_{n_k-n_i+j} ··· S_{j+1} z^k_j‖` for earlier blocks `i = 2..k`.
    pub tail: Vec<f64>,
    pub threshold: f64,
}

impl DeltaResiduals {
    pub fn worst(&self) -> f64 {
        self.item3.iter().chain(self.tail.iter()).fold(0.0, |m, &r| m.max(r))
    }

    pub fn ok(&self) -> bool {
        self.worst() <= self.threshold
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaChoice {
    pub k: usize,
    pub delta: Index,
    pub residuals: DeltaResiduals,
    /// Largest rejected value below `delta`, with its worst residual.
    pub rejected_below: Option<(Index, f64)>,
    pub evaluations: usize,
}

/// Evaluates every residual for block `k` with `Δ_k = delta`.
///
/// `schedule` must hold exactly blocks `1..k-1`.
pub fn delta_residuals(
    k: usize,
    schedule: &Schedule,
    z: &OuterVec,
    params: &Params,
    q: NormSpec,
    delta: Index,
    tail_bits: u32,
) -> Result<DeltaResiduals> {
    let mut s = schedule.clone();
    s.push(delta)?;
    let nk = s.n[k];
    let a = params.alpha;
    let threshold = libm::ldexp(1.0, -(k as i32) - tail_bits as i32);
    let blocks: Vec<(Index, &InnerVec)> = z.blocks().collect();
    let push = |x: &InnerVec, j: Index, r: Index| -> Result<f64> {
        Ok(s.apply_product(j + 1, j + r, x, a, false)?.norm(q))
    };
    let mut item3 = Vec::with_capacity(k);
    for j in 0..k as Index {
        let x = z.block(j);
        item3.push(if x.is_empty() { 0.0 } else { push(&x, j, nk)? });
    }
    let mut tail = Vec::new();
    for i in 2..k {
        let r = nk - s.n[i];
        let mut worst = 0.0f64;
        for &(j, x) in &blocks {
            worst = worst.max(push(x, j, r)?);
        }
        tail.push(worst);
    }
    Ok(DeltaResiduals { item3, tail, threshold })
}

/// Smallest-found `Δ_k` (doubling from `max(k+1, delta_min)`, then bisection)
/// meeting every residual condition.
pub fn choose_delta(
    k: usize,
    schedule: &Schedule,
    z: &OuterVec,
    params: &Params,
    q: NormSpec,
    search: &SearchConfig,
) -> Result<DeltaChoice> {
    let start = search.delta_min.max(k as Index + 1);
    let mut evaluations = 0usize;
    let mut eval = |delta: Index| {
        evaluations += 1;
        delta_residuals(k, schedule, z, params, q, delta, search.tail_bits)
    };
    let mut hi = start;
    let mut best = loop {
        if hi > search.cap {
            let r = eval(search.cap)?;
            if r.ok() {
                hi = search.cap;
                break r;
            }
            return Err(Error::DeltaCap { k, cap: search.cap, residual: r.worst() });
        }
        let r = eval(hi)?;
        if r.ok() {
            break r;
        }
        hi = hi.checked_mul(2).ok_or(Error::Overflow("delta"))?;
    };
    let mut rejected_below = None;
    if hi > start {
        let mut lo = (hi / 2).max(start - 1);
        if lo >= start {
            rejected_below = Some((lo, eval(lo)?.worst()));
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            let r = eval(mid)?;
            if r.ok() {
                hi = mid;
                best = r;
            } else {
                rejected_below = Some((mid, r.worst()));
                lo = mid;
            }
        }
    }
    Ok(DeltaChoice { k, delta: hi, residuals: best, rejected_below, evaluations })
}

/// The finished operator with its family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assembly {
    pub op: ShiftOperator,
    pub family: DenseFamily,
    pub pairs: Vec<DensePair>,
    pub choices: Vec<DeltaChoice>,
    pub d1: String,
}

impl Assembly {
    pub fn pair(&self, k: usize) -> &DensePair {
        &self.pairs[k - 2]
    }
}

/// Builds blocks `1..=K` with `Δ_1 = max(2, delta_min)` and `Δ_k` from
/// [`choose_delta`], together with `z^2, …, z^K`.
pub fn assemble_families(
    k_max: usize,
    params: &Params,
    outer: NormSpec,
    inner: NormSpec,
    search: &SearchConfig,
    focus: &[OuterVec],
) -> Result<Assembly> {
    params.validate_base()?;
    if k_max < 2 {
        return Err(Error::InvalidParams(format!("need K >= 2, got {k_max}")));
    }
    let family = gen_dense_family(k_max, search.seed, focus, search.fresh_every);
    let mut schedule = Schedule::empty(params.d);
    schedule.push(search.delta_min.max(2))?;
    let mut pairs = Vec::new();
    let mut choices = Vec::new();
    for k in 2..=k_max {
        let pair = DensePair::new(k, family.get(k).clone(), &schedule, params)?;
        let choice = choose_delta(k, &schedule, &pair.z, params, inner, search)?;
        schedule.push(choice.delta)?;
        pairs.push(pair);
        choices.push(choice);
    }
    let mut full = params.clone();
    full.deltas = schedule.deltas.clone();
    let op = ShiftOperator::new(full, schedule, outer, inner)?;
    let d1 = String::from("finitely supported sequences (y_i): y_i = 0 for all i >= N");
    Ok(Assembly { op, family, pairs, choices, d1 })
}

/// Indices `k` with `‖z^k - w‖ ≤ ρ‖w‖`.
pub fn d2_witnesses(pairs: &[DensePair], w: &OuterVec, rho: f64, p: NormSpec, q: NormSpec) -> Vec<usize> {
    let r = rho * w.norm(p, q);
    pairs.iter().filter(|pr| dist(&pr.z, w, p, q) <= r).map(|pr| pr.k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::build_schedule;
    use alloc::vec;

    fn params() -> Params {
        Params::new(0.3, 2.0, 3)
    }

    #[test]
    fn family_shape_and_nonzero() {
        let fam = gen_dense_family(60, 3, &[], 8);
        for k in 2..=60 {
            let x = fam.get(k);
            assert!(!x.is_zero());
            assert!(fits_shape(x, k), "k={k}");
        }
        let first = fam.get(2);
        assert!(first.max_block().unwrap() <= 1 && first.max_inner_index().unwrap() <= 1);
        assert_eq!(gen_dense_family(60, 3, &[], 8), fam);
    }

    #[test]
    fn family_replays_focus_in_order() {
        let f0 = OuterVec::single(0, InnerVec::unit(0));
        let f1 = OuterVec::single(3, InnerVec::unit(2));
        let fam = gen_dense_family(20, 1, &[f0.clone(), f1.clone()], 4);
        let seen: Vec<Option<usize>> = (2..=20).map(|k| fam.replay_of(k)).collect();
        assert_eq!(seen[0], Some(0));
        assert_eq!(seen[1], None, "f1 needs k >= 4");
        assert_eq!(seen[2], Some(1));
        assert_eq!(seen[3], None, "fresh slot");
        assert_eq!(fam.get(4), &f1);
    }

    #[test]
    fn fresh_stream_is_dense_for_scalar_targets() {
        let fam = gen_dense_family(4000, 11, &[], 8);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let v: f64 = rng.gen_range(0.25..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let w = OuterVec::single(0, InnerVec::unit(0).scaled(v));
            let best = fam
                .members
                .iter()
                .map(|x| dist(x, &w, NormSpec::P(2.0), NormSpec::P(2.0)))
                .fold(f64::INFINITY, f64::min);
            assert!(best <= 0.05 * v.abs(), "target {v}: best {best}");
        }
    }

    #[test]
    fn build_v_examples() {
        let mut p = params();
        p.deltas = vec![10, 12];
        let s = build_schedule(&p).unwrap();
        let v = build_v(5, 0, &InnerVec::unit(0), &s, &p).unwrap();
        assert_eq!(v, InnerVec::from_pairs([(25, 0.125)]));
        let v = build_v(5, 2, &InnerVec::unit(3), &s, &p).unwrap();
        assert!(v.is_empty());
        assert!(build_v(5, 5, &InnerVec::unit(0), &s, &p).is_err());
    }

    #[test]
    fn coefficient_cancels_e0_and_is_small() {
        let mut p = params();
        p.deltas = vec![9, 11];
        let s = build_schedule(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let k = 40;
        for j in 0..k as Index {
            let (l, _) = s.locate(j + 1).unwrap();
            let x = InnerVec::from_pairs([(0, rng.gen_range(-2.0..2.0)), (sq(l), rng.gen_range(-2.0..2.0)), (2, 1.0)]);
            let c = coefficient(k, j, &x, &s, &p).unwrap();
            let base = s.nprime[l - 1];
            let h = s.apply_product(base + 1, j, &x, 2.0, true).unwrap();
            let expect = powi(2.0, -(3 + (j - base) as i128)) * h.get(0);
            assert!((c - expect).abs() <= 1e-12 * (1.0 + expect.abs()), "j={j}");
            assert!(c.abs() <= p.perturbation_ratio() * x.norm(NormSpec::P(2.0)) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn delta_choice_meets_conditions() {
        let p = params();
        let q = NormSpec::P(2.0);
        let search = SearchConfig::default();
        let a = assemble_families(8, &p, q, q, &search, &[]).unwrap();
        for c in &a.choices {
            assert!(c.delta > c.k as Index);
            assert!(c.residuals.ok());
            if let Some((below, worst)) = c.rejected_below {
                assert!(below < c.delta && worst > c.residuals.threshold);
            }
        }
        for pr in &a.pairs {
            assert!(pr.perturbation_ratio(q, q) <= p.perturbation_ratio() + 1e-12);
            assert!(pr.z.max_block().unwrap() < pr.k as Index);
        }
        let b = assemble_families(8, &p, q, q, &search, &[]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn d2_never_contains_zero_and_finds_focus() {
        let p = params();
        let q = NormSpec::P(2.0);
        let w = OuterVec::from_blocks([(0, InnerVec::from_pairs([(0, 0.5), (1, -1.0)]))]);
        let search = SearchConfig { fresh_every: 4, ..SearchConfig::default() };
        let a = assemble_families(12, &p, q, q, &search, &[w.clone()]).unwrap();
        let rho = p.perturbation_ratio() * 1.05;
        assert!(d2_witnesses(&a.pairs, &w, rho, q, q).len() >= 3);
        assert!(a.pairs.iter().all(|pr| !pr.z.is_zero()));
    }
}
