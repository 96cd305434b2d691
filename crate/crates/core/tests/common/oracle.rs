//! Reference weighted shift written straight from the block recurrences.
//!
//! Coordinates are stored as `(mantissa, exponent of α)` so that long runs of
//! `1/α` factors never underflow, and products are taken one weight at a time.

#![allow(dead_code)]

use std::collections::BTreeMap;

pub struct OracleSchedule {
    pub d: u128,
    pub deltas: Vec<u128>,
    pub n: Vec<u128>,
    pub nprime: Vec<u128>,
}

/// `(k, σ exponent, β exponent, sign of the N_k term)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleWeight {
    pub k: usize,
    pub sigma: i128,
    pub beta: i128,
    pub kick: i8,
}

impl OracleSchedule {
    pub fn new(d: u32, deltas: &[u128]) -> Self {
        let d = d as u128;
        let mut n = vec![0];
        let mut nprime = vec![0];
        for &delta in deltas {
            let nk = nprime.last().unwrap() + d + 1 + delta;
            n.push(nk);
            nprime.push(nk + d + 1 + delta);
        }
        OracleSchedule { d, deltas: deltas.to_vec(), n, nprime }
    }

    pub fn weight(&self, j: u128) -> OracleWeight {
        let k = (1..self.nprime.len()).find(|&k| j <= self.nprime[k]).expect("j inside the schedule");
        let (start, nk, delta, d) = (self.nprime[k - 1], self.n[k], self.deltas[k - 1], self.d);
        let w = |sigma, beta, kick| OracleWeight { k, sigma, beta, kick };
        if j <= start + d {
            w(-1, 1, 0)
        } else if j == start + d + 1 {
            w(-1, 0, -1)
        } else if j <= nk {
            w(-1, -1, 0)
        } else if j <= nk + delta {
            w(-1, 1, 0)
        } else if j == nk + delta + 1 {
            w(-1, 0, 1)
        } else if j < self.nprime[k] {
            w(-1, -1, 0)
        } else {
            w((self.nprime[k] - start - 1) as i128, -1, 0)
        }
    }

    /// `S_hi ··· S_lo x` for `x` given as `(coordinate, value)` pairs.
    pub fn product(&self, alpha: f64, lo: u128, hi: u128, x: &[(u128, f64)]) -> BTreeMap<u128, f64> {
        self.walk(alpha, lo, hi, x, |_, _| {})
    }

    /// `‖S_j ··· S_1 x‖₂` for `j = 1..=hi`.
    pub fn prefix_norms(&self, alpha: f64, hi: u128, x: &[(u128, f64)]) -> Vec<f64> {
        let mut out = Vec::new();
        self.walk(alpha, 1, hi, x, |_, v| {
            out.push(v.values().map(|&(m, e)| (m * alpha.powf(e as f64)).powi(2)).sum::<f64>().sqrt())
        });
        out
    }

    fn walk(
        &self,
        alpha: f64,
        lo: u128,
        hi: u128,
        x: &[(u128, f64)],
        mut each: impl FnMut(u128, &BTreeMap<u128, (f64, i128)>),
    ) -> BTreeMap<u128, f64> {
        let mut v: BTreeMap<u128, (f64, i128)> = BTreeMap::new();
        for &(p, a) in x {
            v.entry(p).or_insert((0.0, 0)).0 += a;
        }
        for j in lo..=hi {
            let w = self.weight(j);
            let sq = (w.k * w.k) as u128;
            let carried = v.get(&sq).map_or(0.0, |&(m, e)| m * alpha.powf(e as f64));
            for (&p, entry) in v.iter_mut() {
                if p == sq {
                    entry.1 += w.beta;
                } else if p != 0 {
                    entry.1 += w.sigma;
                }
            }
            if w.kick != 0 && carried != 0.0 {
                v.entry(0).or_insert((0.0, 0)).0 += w.kick as f64 * carried;
            }
            each(j, &v);
        }
        v.into_iter()
            .map(|(p, (m, e))| (p, if m == 0.0 { 0.0 } else { m * alpha.powf(e as f64) }))
            .filter(|&(_, a)| a != 0.0)
            .collect()
    }
}

pub fn l2(v: &BTreeMap<u128, f64>) -> f64 {
    v.values().map(|a| a * a).sum::<f64>().sqrt()
}

pub fn l2_diff(v: &BTreeMap<u128, f64>, x: &[(u128, f64)]) -> f64 {
    let mut d = v.clone();
    for &(p, a) in x {
        *d.entry(p).or_insert(0.0) -= a;
    }
    l2(&d)
}
