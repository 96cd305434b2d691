//! Constructive ε-hypercyclicity criterion.
//!
//! [`build_vector`] runs the inductive construction of `x̄ = ∑ x_k` with
//! `x_k = S_{n(m_k)} y_{m_k}` on any [`WeightedShift`], checking every
//! inequality directly instead of through continuity radii. The same engine
//! drives the Rolewicz operator `λB`, the operator of the construction, and
//! the direct-sum experiment.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::construction::{gen_dense_family, Assembly};
use crate::math::{abs, pow, powi};
use crate::shift::{orbit_point, Shifted, WeightedShift};
use crate::space::{dist, InnerVec, NormSpec, OuterVec};
use crate::{Error, Index, Result};

/// `λB` on scalar sequences, stored as blocks with the single coordinate 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rolewicz {
    pub lambda: f64,
    pub p: NormSpec,
}

impl WeightedShift for Rolewicz {
    fn norms(&self) -> (NormSpec, NormSpec) {
        (self.p, NormSpec::P(2.0))
    }

    fn horizon(&self) -> Option<Index> {
        None
    }

    fn push(&self, x: &InnerVec, _t: Index, r: Index) -> Result<InnerVec> {
        Ok(x.scaled(powi(self.lambda, -(r as i128))))
    }

    fn pull(&self, x: &InnerVec, _t: Index, r: Index) -> Result<InnerVec> {
        let y = x.scaled(powi(self.lambda, r as i128));
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Overflow("Rolewicz power"))
        }
    }
}

/// Data of the criterion: the enumerated `D₂ = {y_k}`, times `n(k)`, right
/// maps `S_{n(k)} = U^{n(k)}` of the system, and the relative radius `ε'`
/// within which every nonzero target is approached by `D₂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionInstance<S> {
    pub name: String,
    pub system: S,
    pub d2: Vec<OuterVec>,
    pub times: Vec<Index>,
    /// Index of each `y_k` in the source enumeration.
    pub labels: Vec<usize>,
    pub radius: f64,
}

impl<S: WeightedShift> CriterionInstance<S> {
    pub fn check(&self) -> Result<()> {
        if self.d2.len() != self.times.len() || self.d2.len() != self.labels.len() {
            return Err(Error::InvalidParams("d2, times and labels differ in length".into()));
        }
        if self.times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParams("times must increase strictly".into()));
        }
        if self.d2.iter().any(OuterVec::is_zero) {
            return Err(Error::InvalidParams("d2 contains zero".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.d2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d2.is_empty()
    }

    pub fn norm(&self, z: &OuterVec) -> f64 {
        self.system.norm(z)
    }
}

/// The operator of the construction with `D₂ = {z^k}` and `n(k) = n_k`.
pub fn shift_instance(asm: &Assembly, radius: f64) -> CriterionInstance<crate::shift::ShiftOperator> {
    CriterionInstance {
        name: String::from("weighted shift"),
        system: asm.op.clone(),
        d2: asm.pairs.iter().map(|p| p.z.clone()).collect(),
        times: asm.pairs.iter().map(|p| asm.op.schedule.n[p.k]).collect(),
        labels: asm.pairs.iter().map(|p| p.k).collect(),
        radius,
    }
}

/// Keeps coordinate 0 of every block (a scalar sequence).
fn scalar_part(z: &OuterVec) -> OuterVec {
    OuterVec::from_blocks(z.blocks().map(|(n, x)| {
        let v = x.iter().next().map_or(0.0, |(_, v)| v);
        (n, InnerVec::from_pairs([(0, v)]))
    }))
}

/// `T = λB`, `S_n = λ^{-n} F^n`, `n(k) = k`, and `D₂` the dyadic scalar
/// sequences (replaying `focus` as in the dense family).
pub fn make_rolewicz(
    p: NormSpec,
    lambda: f64,
    horizon: usize,
    seed: u64,
    focus: &[OuterVec],
    fresh_every: usize,
) -> Result<CriterionInstance<Rolewicz>> {
    if !(lambda > 1.0 && lambda.is_finite()) {
        return Err(Error::InvalidParams(format!("lambda must be > 1, got {lambda}")));
    }
    let focus: Vec<OuterVec> = focus.iter().map(scalar_part).collect();
    let fam = gen_dense_family(horizon + 1, seed, &focus, fresh_every);
    let mut d2 = Vec::new();
    for x in &fam.members {
        let y = scalar_part(x);
        d2.push(if y.is_zero() { OuterVec::single(0, InnerVec::unit(0)) } else { y });
    }
    Ok(CriterionInstance {
        name: format!("Rolewicz {lambda}B"),
        system: Rolewicz { lambda, p },
        times: (1..=d2.len() as Index).collect(),
        labels: (0..d2.len()).collect(),
        d2,
        radius: 0.0,
    })
}

impl CriterionInstance<Rolewicz> {
    /// Same operator and `D₂`, with `n(k)` replaced by the given increasing times.
    pub fn with_times(&self, times: &[Index]) -> Self {
        let n = times.len().min(self.d2.len());
        CriterionInstance {
            name: self.name.clone(),
            system: self.system,
            d2: self.d2[..n].to_vec(),
            times: times[..n].to_vec(),
            labels: self.labels[..n].to_vec(),
            radius: self.radius,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BuildConfig {
    /// `η_k = eta_scale / (k+1)³`.
    pub eta_scale: f64,
    /// Later summands must satisfy `‖T^{n(m_i)} x_k‖ ≤ 2^{-(k+1)-tail_bits}`.
    pub tail_bits: u32,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig { eta_scale: libm::ldexp(1.0, -20), tail_bits: 40 }
    }
}

impl BuildConfig {
    pub fn eta(&self, k: usize) -> f64 {
        self.eta_scale / pow(k as f64 + 1.0, 3.0)
    }

    pub fn tau(&self, k: usize) -> f64 {
        libm::ldexp(1.0, -(k as i32) - 1 - self.tail_bits as i32)
    }
}

/// One inequality checked during a construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub step: usize,
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub strict: bool,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(step: usize, name: &str, lhs: f64, rhs: f64, strict: bool) -> Self {
        let pass = if strict { lhs < rhs } else { lhs <= rhs };
        CheckRecord { step, name: String::from(name), lhs, rhs, strict, pass }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetRow {
    pub index: usize,
    pub target: OuterVec,
    pub target_norm: f64,
    /// Label of the `D₂` element used.
    pub d2_label: usize,
    pub time: Index,
    pub achieved: f64,
    pub relative: f64,
    /// `(j+1)η_j + ε'‖z_j‖ + ∑_{k>j} τ_k + tail`.
    pub certified: f64,
    pub certified_relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypVectorCertificate {
    pub summands: Vec<Shifted>,
    /// `m_k`, as positions in the instance.
    pub hit_indices: Vec<usize>,
    /// `n(m_k)`.
    pub hit_times: Vec<Index>,
    pub eta: Vec<f64>,
    /// Bound for `∑_{k ≥ K} ‖T^{n(m_j)} x_k‖` over the summands not computed.
    pub tail_bound: f64,
    pub radius: f64,
    pub rows: Vec<TargetRow>,
    pub checks: Vec<CheckRecord>,
}

impl HypVectorCertificate {
    pub fn sound(&self) -> bool {
        self.checks.iter().all(|c| c.pass) && self.rows.iter().all(|r| r.achieved <= r.certified)
    }
}

/// Inductive construction of an ε'-hypercyclic vector approximating each
/// target at its own hit time.
///
/// For target `z_j` the smallest admissible position `m_j > m_{j-1}` is taken;
/// admissibility is the conjunction of every check listed in the certificate.
pub fn build_vector<S: WeightedShift>(
    inst: &CriterionInstance<S>,
    targets: &[OuterVec],
    cfg: &BuildConfig,
) -> Result<HypVectorCertificate> {
    inst.check()?;
    let sys = &inst.system;
    let mut summands: Vec<Shifted> = Vec::new();
    let mut hit_indices = Vec::new();
    let mut hit_times: Vec<Index> = Vec::new();
    let mut eta = Vec::new();
    let mut checks = Vec::new();
    let mut next = 0usize;
    for (j, z) in targets.iter().enumerate() {
        if z.is_zero() {
            return Err(Error::InvalidParams(format!("target {j} is zero")));
        }
        let eta_j = cfg.eta(j);
        let tau_j = cfg.tau(j);
        let zn = inst.norm(z);
        let mut last_failure = String::from("no candidate left within the horizon");
        let mut accepted = None;
        for m in next..inst.len() {
            let y = &inst.d2[m];
            let n = inst.times[m];
            let mut rec = Vec::new();
            rec.push(CheckRecord::new(j, "target_radius", inst.norm(&crate::space::sub(z, y)), inst.radius * zn, false));
            if !rec[0].pass {
                continue;
            }
            let x = Shifted::new(y.clone(), n);
            rec.push(CheckRecord::new(j, "right_map_small", inst.norm(&x.eval(sys)?), eta_j, true));
            let back = x.t_pow(sys, n)?.eval(sys)?;
            rec.push(CheckRecord::new(j, "right_inverse", inst.norm(&crate::space::sub(&back, y)), eta_j, true));
            for xi in &summands {
                let v = xi.t_pow(sys, n)?.eval(sys)?;
                rec.push(CheckRecord::new(j, "earlier_summand_at_new_time", inst.norm(&v), eta_j, true));
            }
            for &ni in &hit_times {
                let v = x.t_pow(sys, ni)?.eval(sys)?;
                rec.push(CheckRecord::new(j, "new_summand_at_earlier_time", inst.norm(&v), tau_j, false));
            }
            if let Some(bad) = rec.iter().find(|c| !c.pass) {
                last_failure = format!("{} failed at position {m}: {:e} vs {:e}", bad.name, bad.lhs, bad.rhs);
                continue;
            }
            accepted = Some((m, x, rec));
            break;
        }
        let Some((m, x, rec)) = accepted else {
            return Err(Error::NoAdmissible { step: j, reason: last_failure });
        };
        checks.extend(rec);
        summands.push(x);
        hit_indices.push(m);
        hit_times.push(inst.times[m]);
        eta.push(eta_j);
        next = m + 1;
    }
    let big_k = targets.len();
    let tail_bound = libm::ldexp(1.0, -(big_k as i32) - cfg.tail_bits as i32);
    let mut rows = Vec::new();
    for (j, z) in targets.iter().enumerate() {
        let n = hit_times[j];
        let achieved = dist(&orbit_point(sys, &summands, n)?, z, sys.norms().0, sys.norms().1);
        let zn = inst.norm(z);
        let later: f64 = (j + 1..big_k).map(|k| cfg.tau(k)).sum();
        let certified = (j as f64 + 1.0) * eta[j] + inst.radius * zn + later + tail_bound;
        rows.push(TargetRow {
            index: j,
            target: z.clone(),
            target_norm: zn,
            d2_label: inst.labels[hit_indices[j]],
            time: n,
            achieved,
            relative: achieved / zn,
            certified,
            certified_relative: certified / zn,
        });
    }
    Ok(HypVectorCertificate { summands, hit_indices, hit_times, eta, tail_bound, radius: inst.radius, rows, checks })
}

/// Subsequence `m(k)` of the instance's times with `‖S_{m(k)} y_k‖ ≤ 1/k` and
/// `‖T^{m(k)} S_{m(k)} y_k - y_k‖ ≤ 1/k` for `k = 1..=k_max`, evaluated
/// directly (the right maps must be representable in `f64`).
pub fn refine_schedule<S: WeightedShift + Clone>(
    inst: &CriterionInstance<S>,
    k_max: usize,
) -> Result<(CriterionInstance<S>, Vec<CheckRecord>)> {
    inst.check()?;
    let sys = &inst.system;
    let mut times = Vec::new();
    let mut checks = Vec::new();
    let mut pos = 0usize;
    for k in 1..=k_max {
        let y = inst.d2.get(k - 1).ok_or_else(|| Error::NoAdmissible {
            step: k,
            reason: String::from("not enough D2 elements"),
        })?;
        let bound = 1.0 / k as f64;
        let mut found = None;
        while pos < inst.times.len() {
            let m = inst.times[pos];
            pos += 1;
            let sy = crate::shift::u_pow(sys, m, y)?;
            let back = crate::shift::t_pow(sys, m, &sy)?;
            let a = CheckRecord::new(k, "right_map_le_1/k", inst.norm(&sy), bound, false);
            let b = CheckRecord::new(k, "right_inverse_le_1/k", inst.norm(&crate::space::sub(&back, y)), bound, false);
            if a.pass && b.pass {
                found = Some((m, a, b));
                break;
            }
        }
        let Some((m, a, b)) = found else {
            return Err(Error::NoAdmissible { step: k, reason: String::from("time horizon exhausted") });
        };
        times.push(m);
        checks.push(a);
        checks.push(b);
    }
    let refined = CriterionInstance {
        name: format!("{} (refined)", inst.name),
        system: inst.system.clone(),
        d2: inst.d2[..k_max].to_vec(),
        times,
        labels: inst.labels[..k_max].to_vec(),
        radius: inst.radius,
    };
    refined.check()?;
    Ok((refined, checks))
}

/// `(i,j) ⪯ (k,l)`: `i+j < k+l`, or `i+j = k+l` and `i ≥ k`.
pub fn precedes(a: (usize, usize), b: (usize, usize)) -> bool {
    let (sa, sb) = (a.0 + a.1, b.0 + b.1);
    sa < sb || (sa == sb && a.0 >= b.0)
}

/// All pairs `(k,l)` with `k < classes`, `l < w_len`, sorted by `⪯`.
pub fn diagonal_order(classes: usize, w_len: usize) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = (0..classes).flat_map(|k| (0..w_len).map(move |l| (k, l))).collect();
    pairs.sort_by(|a, b| {
        if a == b {
            core::cmp::Ordering::Equal
        } else if precedes(*a, *b) {
            core::cmp::Ordering::Less
        } else {
            core::cmp::Ordering::Greater
        }
    });
    pairs
}

/// The `D₂` replay order for the direct-sum experiment: `v_k` for every pair
/// `(k,l)` in `⪯` order.
pub fn product_focus(v_targets: &[OuterVec], w_len: usize) -> Vec<OuterVec> {
    diagonal_order(v_targets.len(), w_len).into_iter().map(|(k, _)| v_targets[k].clone()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProductConfig {
    /// `ρ(k,l) = rho0 / (r+1)^4` with `r` the rank of `(k,l)` under `⪯`.
    pub rho0: f64,
}

impl Default for ProductConfig {
    fn default() -> Self {
        ProductConfig { rho0: libm::ldexp(1.0, -20) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductRow {
    pub w_index: usize,
    pub v_index: usize,
    pub best_time: Index,
    pub first: f64,
    pub second: f64,
    /// `max(‖T^n x - a‖, ‖S^n y - b‖) / max(‖a‖, ‖b‖)`.
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstFactorRow {
    pub class: usize,
    pub w_index: usize,
    pub best_time: Index,
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductCertificate {
    pub pairs: Vec<(usize, usize)>,
    /// `m(k,l)`.
    pub times: Vec<Index>,
    pub rho: Vec<f64>,
    pub x_summands: Vec<Shifted>,
    pub y_certificate: HypVectorCertificate,
    pub checks: Vec<CheckRecord>,
    pub product_rows: Vec<ProductRow>,
    pub first_factor_rows: Vec<FirstFactorRow>,
}

/// Direct-sum construction: `y` from the ε-criterion instance with targets
/// `v_k` in `⪯` order, and `x = ∑ x_{k,l}` with `x_{k,l} = U_{m(k,l)} w_l` on
/// the hypercyclic factor, where `m(k,l)` is the hit time of pair `(k,l)`.
///
/// The class `ℕ_k` is the set of hit times of the pairs `(k, ·)`.
#[allow(clippy::too_many_arguments)]
pub fn build_product_vector<H: WeightedShift, E: WeightedShift>(
    hc: &H,
    eps: &CriterionInstance<E>,
    w_targets: &[OuterVec],
    v_targets: &[OuterVec],
    product_targets: &[(usize, usize)],
    build: &BuildConfig,
    cfg: &ProductConfig,
) -> Result<ProductCertificate> {
    let pairs = diagonal_order(v_targets.len(), w_targets.len());
    let y_targets: Vec<OuterVec> = pairs.iter().map(|&(k, _)| v_targets[k].clone()).collect();
    let y_cert = build_vector(eps, &y_targets, build)?;
    let times = y_cert.hit_times.clone();
    let rho: Vec<f64> = (0..pairs.len()).map(|r| cfg.rho0 / pow(r as f64 + 1.0, 4.0)).collect();
    let norm_x = |z: &OuterVec| hc.norm(z);
    let mut xs: Vec<Shifted> = Vec::new();
    let mut checks = Vec::new();
    for (r, &(k, l)) in pairs.iter().enumerate() {
        let m = times[r];
        let w = &w_targets[l];
        let x = Shifted::new(w.clone(), m);
        let xv = x.eval(hc)?;
        let mut rec = Vec::new();
        if r > 0 {
            rec.push(CheckRecord::new(r, "time_increases", times[r - 1] as f64, m as f64, true));
        }
        for (i, xi) in xs.iter().enumerate() {
            let v = xi.t_pow(hc, m)?.eval(hc)?;
            rec.push(CheckRecord::new(r, "earlier_summand_le_rho", norm_x(&v), rho[r], false));
            let u = x.t_pow(hc, times[i])?.eval(hc)?;
            rec.push(CheckRecord::new(r, "new_summand_le_2^-(k+l)", norm_x(&u), libm::ldexp(1.0, -((k + l) as i32)), false));
        }
        rec.push(CheckRecord::new(r, "right_map_lt_rho", norm_x(&xv), rho[r], true));
        rec.push(CheckRecord::new(r, "summand_le_rho", norm_x(&xv), rho[r], false));
        let back = x.t_pow(hc, m)?.eval(hc)?;
        rec.push(CheckRecord::new(r, "hit_le_rho", norm_x(&crate::space::sub(&back, w)), rho[r], false));
        let kl = (k + l) as f64;
        rec.push(CheckRecord::new(r, "rho_decay", kl * kl * kl * rho[r], cfg.rho0 / (r as f64 + 1.0), false));
        if let Some(bad) = rec.iter().find(|c| !c.pass) {
            return Err(Error::NoAdmissible {
                step: r,
                reason: format!("pair ({k},{l}): {} ({:e} vs {:e})", bad.name, bad.lhs, bad.rhs),
            });
        }
        checks.extend(rec);
        xs.push(x);
    }

    let x_orbit: Vec<OuterVec> = times.iter().map(|&n| orbit_point(hc, &xs, n)).collect::<Result<_>>()?;
    let y_orbit: Vec<OuterVec> =
        times.iter().map(|&n| orbit_point(&eps.system, &y_cert.summands, n)).collect::<Result<_>>()?;
    let mut product_rows = Vec::new();
    for &(l, k) in product_targets {
        let (a, b) = (&w_targets[l], &v_targets[k]);
        let scale = norm_x(a).max(eps.norm(b));
        let mut best = ProductRow { w_index: l, v_index: k, best_time: 0, first: 0.0, second: 0.0, relative: f64::INFINITY };
        for (t, &n) in times.iter().enumerate() {
            let first = norm_x(&crate::space::sub(&x_orbit[t], a));
            let second = eps.norm(&crate::space::sub(&y_orbit[t], b));
            let rel = first.max(second) / scale;
            if rel < best.relative {
                best = ProductRow { w_index: l, v_index: k, best_time: n, first, second, relative: rel };
            }
        }
        product_rows.push(best);
    }
    let mut first_factor_rows = Vec::new();
    for class in 0..v_targets.len() {
        for (l, w) in w_targets.iter().enumerate() {
            let wn = norm_x(w);
            let mut best = FirstFactorRow { class, w_index: l, best_time: 0, relative: f64::INFINITY };
            for (t, &(k, _)) in pairs.iter().enumerate() {
                if k != class {
                    continue;
                }
                let rel = norm_x(&crate::space::sub(&x_orbit[t], w)) / wn;
                if rel < best.relative {
                    best = FirstFactorRow { class, w_index: l, best_time: times[t], relative: rel };
                }
            }
            first_factor_rows.push(best);
        }
    }
    Ok(ProductCertificate { pairs, times, rho, x_summands: xs, y_certificate: y_cert, checks, product_rows, first_factor_rows })
}

/// Diagonal isomorphism scaling `e_{n,i}` by `pattern[i mod len]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalIso {
    pub pattern: Vec<f64>,
}

impl DiagonalIso {
    pub fn new(pattern: Vec<f64>) -> Result<Self> {
        if pattern.is_empty() || pattern.iter().any(|s| !(s.is_finite() && abs(*s) > 0.0)) {
            return Err(Error::Isomorphism(String::from("scales must be finite and nonzero")));
        }
        Ok(DiagonalIso { pattern })
    }

    pub fn identity() -> Self {
        DiagonalIso { pattern: alloc::vec![1.0] }
    }

    fn scale(&self, i: Index) -> f64 {
        self.pattern[(i % self.pattern.len() as Index) as usize]
    }

    pub fn apply(&self, z: &OuterVec) -> OuterVec {
        OuterVec::from_blocks(
            z.blocks().map(|(n, x)| (n, InnerVec::from_pairs(x.iter().map(|(i, v)| (i, self.scale(i) * v))))),
        )
    }

    pub fn norm(&self) -> f64 {
        self.pattern.iter().map(|s| abs(*s)).fold(0.0, f64::max)
    }

    pub fn inverse_norm(&self) -> f64 {
        1.0 / self.pattern.iter().map(|s| abs(*s)).fold(f64::INFINITY, f64::min)
    }

    /// `‖J‖ ‖J^{-1}‖`.
    pub fn condition(&self) -> f64 {
        self.norm() * self.inverse_norm()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugatedRow {
    pub index: usize,
    pub time: Index,
    pub relative: f64,
    pub certified_relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugatedCertificate {
    pub multiplier: f64,
    pub rows: Vec<ConjugatedRow>,
}

/// Transports a certificate for `T` to `J T J^{-1}` with hypercyclic vector
/// `J x̄` and targets `J z`: relative bounds are multiplied by `‖J‖‖J^{-1}‖`,
/// achieved errors are re-evaluated directly.
pub fn conjugate_certificate<S: WeightedShift>(
    sys: &S,
    cert: &HypVectorCertificate,
    iso: &DiagonalIso,
) -> Result<ConjugatedCertificate> {
    let multiplier = iso.condition();
    let (p, q) = sys.norms();
    let mut rows = Vec::new();
    for row in &cert.rows {
        let diff = crate::space::sub(&orbit_point(sys, &cert.summands, row.time)?, &row.target);
        let achieved = iso.apply(&diff).norm(p, q);
        let tn = iso.apply(&row.target).norm(p, q);
        rows.push(ConjugatedRow {
            index: row.index,
            time: row.time,
            relative: achieved / tn,
            certified_relative: multiplier * row.certified_relative,
        });
    }
    Ok(ConjugatedCertificate { multiplier, rows })
}
