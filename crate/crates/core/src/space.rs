//! Finitely supported vectors of the inner space `X` and of `⊕_Y X`.
//!
//! Both `X` and `Y` use canonical coordinate bases, so coordinate functionals
//! have norm one and the basis of `Y` is normalized and 1-unconditional for
//! every `ℓᵖ` and for `c₀`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::math::{abs, pow, sqrt};
use crate::Index;

/// Exponent of a sequence norm: `ℓᵖ` with `p ≥ 1`, or the sup norm of `c₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormSpec {
    P(f64),
    Sup,
}

impl NormSpec {
    pub fn new(p: f64) -> Option<Self> {
        if p.is_finite() && p >= 1.0 {
            Some(NormSpec::P(p))
        } else if p == f64::INFINITY {
            Some(NormSpec::Sup)
        } else {
            None
        }
    }

    /// Norm of a finite sequence of magnitudes.
    pub fn combine<I: IntoIterator<Item = f64>>(&self, values: I) -> f64 {
        match *self {
            NormSpec::Sup => values.into_iter().fold(0.0, |m, v| m.max(abs(v))),
            NormSpec::P(p) => {
                let vals: alloc::vec::Vec<f64> = values.into_iter().map(abs).collect();
                let max = vals.iter().fold(0.0f64, |m, &v| m.max(v));
                if max == 0.0 {
                    return 0.0;
                }
                if !max.is_finite() {
                    return f64::INFINITY;
                }
                // scaled to keep tiny and huge entries representable
                if p == 1.0 {
                    vals.iter().sum()
                } else if p == 2.0 {
                    max * sqrt(vals.iter().map(|v| (v / max) * (v / max)).sum::<f64>())
                } else {
                    max * pow(vals.iter().map(|v| pow(v / max, p)).sum::<f64>(), 1.0 / p)
                }
            }
        }
    }
}

impl Default for NormSpec {
    fn default() -> Self {
        NormSpec::P(2.0)
    }
}

impl Serialize for NormSpec {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        match *self {
            NormSpec::P(p) => s.serialize_f64(p),
            NormSpec::Sup => s.serialize_str("sup"),
        }
    }
}

impl<'de> Deserialize<'de> for NormSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        struct NormVisitor;
        impl Visitor<'_> for NormVisitor {
            type Value = NormSpec;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number p >= 1 or the string \"sup\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> core::result::Result<NormSpec, E> {
                NormSpec::new(v).ok_or_else(|| E::custom("norm exponent must be >= 1"))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> core::result::Result<NormSpec, E> {
                self.visit_f64(v as f64)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> core::result::Result<NormSpec, E> {
                self.visit_f64(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> core::result::Result<NormSpec, E> {
                match v {
                    "sup" | "SUP" | "inf" => Ok(NormSpec::Sup),
                    _ => Err(E::custom(String::from("unknown norm symbol"))),
                }
            }
        }
        d.deserialize_any(NormVisitor)
    }
}

/// Finitely supported element of `X`, stored as nonzero coordinates.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InnerVec {
    entries: BTreeMap<Index, f64>,
}

impl InnerVec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Canonical basis vector `e_i`.
    pub fn unit(i: Index) -> Self {
        let mut v = Self::new();
        v.set(i, 1.0);
        v
    }

    pub fn from_pairs<I: IntoIterator<Item = (Index, f64)>>(pairs: I) -> Self {
        let mut v = Self::new();
        for (i, x) in pairs {
            v.add_at(i, x);
        }
        v
    }

    pub fn get(&self, i: Index) -> f64 {
        self.entries.get(&i).copied().unwrap_or(0.0)
    }

    /// Overwrites coordinate `i`; zero removes it.
    pub fn set(&mut self, i: Index, value: f64) {
        if value == 0.0 {
            self.entries.remove(&i);
        } else {
            self.entries.insert(i, value);
        }
    }

    pub fn add_at(&mut self, i: Index, value: f64) {
        let v = self.get(i) + value;
        self.set(i, v);
    }

    pub fn iter(&self) -> impl Iterator<Item = (Index, f64)> + '_ {
        self.entries.iter().map(|(&i, &x)| (i, x))
    }

    pub fn support(&self) -> impl Iterator<Item = Index> + '_ {
        self.entries.keys().copied()
    }

    pub fn max_index(&self) -> Option<Index> {
        self.entries.keys().next_back().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.values().all(|x| x.is_finite())
    }

    pub fn norm(&self, q: NormSpec) -> f64 {
        inner_norm(self, q)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::from_pairs(self.iter().map(|(i, x)| (i, c * x)))
    }

    /// `self + c * other`
    pub fn axpy(&self, c: f64, other: &InnerVec) -> Self {
        let mut out = self.clone();
        for (i, x) in other.iter() {
            out.add_at(i, c * x);
        }
        out
    }
}

/// Finitely supported element `(x_n)_n` of `⊕_Y X`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OuterVec {
    blocks: BTreeMap<Index, InnerVec>,
}

impl OuterVec {
    pub fn new() -> Self {
        Self::default()
    }

    /// The vector with a single nonzero block.
    pub fn single(n: Index, x: InnerVec) -> Self {
        let mut z = Self::new();
        z.set_block(n, x);
        z
    }

    pub fn from_blocks<I: IntoIterator<Item = (Index, InnerVec)>>(blocks: I) -> Self {
        let mut z = Self::new();
        for (n, x) in blocks {
            let merged = z.block(n).axpy(1.0, &x);
            z.set_block(n, merged);
        }
        z
    }

    pub fn block(&self, n: Index) -> InnerVec {
        self.blocks.get(&n).cloned().unwrap_or_default()
    }

    pub fn block_ref(&self, n: Index) -> Option<&InnerVec> {
        self.blocks.get(&n)
    }

    pub fn set_block(&mut self, n: Index, x: InnerVec) {
        if x.is_empty() {
            self.blocks.remove(&n);
        } else {
            self.blocks.insert(n, x);
        }
    }

    pub fn blocks(&self) -> impl Iterator<Item = (Index, &InnerVec)> + '_ {
        self.blocks.iter().map(|(&n, x)| (n, x))
    }

    pub fn max_block(&self) -> Option<Index> {
        self.blocks.keys().next_back().copied()
    }

    pub fn max_inner_index(&self) -> Option<Index> {
        self.blocks.values().filter_map(|x| x.max_index()).max()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.blocks.values().all(InnerVec::is_finite)
    }

    pub fn norm(&self, p: NormSpec, q: NormSpec) -> f64 {
        outer_norm(self, p, q)
    }

    /// Largest inner norm over blocks, `sup_k ‖w_k‖_X`.
    pub fn max_block_norm(&self, q: NormSpec) -> f64 {
        self.blocks.values().map(|x| x.norm(q)).fold(0.0, f64::max)
    }
}

pub fn inner_norm(x: &InnerVec, q: NormSpec) -> f64 {
    q.combine(x.entries.values().copied())
}

/// `‖(x_n)_n‖ = ‖∑ ‖x_n‖_X f_n‖_Y` for canonical `f_n`.
pub fn outer_norm(z: &OuterVec, p: NormSpec, q: NormSpec) -> f64 {
    p.combine(z.blocks.values().map(|x| inner_norm(x, q)))
}

pub fn add(z1: &OuterVec, z2: &OuterVec) -> OuterVec {
    axpy(z1, 1.0, z2)
}

pub fn sub(z1: &OuterVec, z2: &OuterVec) -> OuterVec {
    axpy(z1, -1.0, z2)
}

/// `z1 + c * z2`, pruning cancelled entries and empty blocks.
pub fn axpy(z1: &OuterVec, c: f64, z2: &OuterVec) -> OuterVec {
    let mut out = z1.clone();
    for (n, x) in z2.blocks() {
        let merged = out.block(n).axpy(c, x);
        out.set_block(n, merged);
    }
    out
}

pub fn scale(c: f64, z: &OuterVec) -> OuterVec {
    let mut out = OuterVec::new();
    for (n, x) in z.blocks() {
        out.set_block(n, x.scaled(c));
    }
    out
}

pub fn dist(z1: &OuterVec, z2: &OuterVec, p: NormSpec, q: NormSpec) -> f64 {
    outer_norm(&sub(z1, z2), p, q)
}
