//! Exact sparse multi-leg operators and slot-bound operator chains.
//!
//! Multi-indices are packed mixed-radix with leg 0 most significant. An
//! operator stores, for every input multi-index, the list of outputs with
//! their coefficients. Chains are kept in written order: the rightmost
//! factor applies first.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::Ring;

/// Mixed-radix packing of multi-indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Radix {
    dims: Vec<usize>,
    weights: Vec<u64>,
    size: u64,
}

impl Radix {
    pub fn new(dims: &[usize]) -> Result<Self> {
        let mut weights = vec![0u64; dims.len()];
        let mut acc: u64 = 1;
        for (i, &d) in dims.iter().enumerate().rev() {
            if d == 0 {
                return Err(Error::DimensionMismatch("zero-dimensional leg".into()));
            }
            weights[i] = acc;
            acc = acc
                .checked_mul(d as u64)
                .filter(|&a| a <= 1 << 62)
                .ok_or_else(|| Error::TooLarge("multi-index space exceeds 2^62".into()))?;
        }
        Ok(Radix {
            dims: dims.to_vec(),
            weights,
            size: acc,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn pack(&self, idx: &[usize]) -> Result<u64> {
        if idx.len() != self.dims.len() {
            return Err(Error::ArityMismatch {
                expected: self.dims.len(),
                found: idx.len(),
            });
        }
        let mut out = 0;
        for (i, (&x, &d)) in idx.iter().zip(&self.dims).enumerate() {
            if x >= d {
                return Err(Error::DimensionMismatch(format!("index {x} out of range {d} on leg {i}")));
            }
            out += x as u64 * self.weights[i];
        }
        Ok(out)
    }

    pub fn unpack(&self, mut v: u64) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (o, &w) in out.iter_mut().zip(&self.weights) {
            *o = (v / w) as usize;
            v %= w;
        }
        out
    }

    #[inline]
    pub fn get(&self, v: u64, leg: usize) -> usize {
        ((v / self.weights[leg]) % self.dims[leg] as u64) as usize
    }

    #[inline]
    pub fn set(&self, v: u64, leg: usize, x: usize) -> u64 {
        let old = self.get(v, leg) as u64;
        v - old * self.weights[leg] + x as u64 * self.weights[leg]
    }
}

/// A sparse linear map on a tensor product of legs.
///
/// `entry(input, output)` is the coefficient of the output basis vector in
/// the image of the input basis vector.
#[derive(Clone, Debug)]
pub struct SparseOperator<S> {
    radix: Radix,
    columns: HashMap<u64, Vec<(u64, S)>>,
}

impl<S: Ring> SparseOperator<S> {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        Ok(SparseOperator {
            radix: Radix::new(&dims)?,
            columns: HashMap::new(),
        })
    }

    pub fn identity(dims: Vec<usize>) -> Result<Self> {
        let mut op = SparseOperator::new(dims)?;
        for v in 0..op.radix.size {
            op.columns.insert(v, vec![(v, S::one())]);
        }
        Ok(op)
    }

    /// Permutation operator `e_x -> e_{perm(x)}` on a single leg.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let mut op = SparseOperator::new(vec![perm.len()])?;
        for (x, &y) in perm.iter().enumerate() {
            op.add_entry(&[x], &[y], S::one())?;
        }
        Ok(op)
    }

    /// Swap of two legs of equal dimension.
    pub fn swap(dim: usize) -> Result<Self> {
        let mut op = SparseOperator::new(vec![dim, dim])?;
        for a in 0..dim {
            for b in 0..dim {
                op.add_entry(&[a, b], &[b, a], S::one())?;
            }
        }
        Ok(op)
    }

    pub fn dims(&self) -> &[usize] {
        self.radix.dims()
    }

    pub fn legs(&self) -> usize {
        self.radix.dims().len()
    }

    pub fn radix(&self) -> &Radix {
        &self.radix
    }

    pub fn add_entry(&mut self, input: &[usize], output: &[usize], value: S) -> Result<()> {
        let i = self.radix.pack(input)?;
        let o = self.radix.pack(output)?;
        self.add_packed(i, o, value);
        Ok(())
    }

    pub fn add_packed(&mut self, input: u64, output: u64, value: S) {
        if value.is_zero() {
            return;
        }
        let col = self.columns.entry(input).or_default();
        match col.iter_mut().position(|(o, _)| *o == output) {
            Some(p) => {
                col[p].1.add_assign_ref(&value);
                if col[p].1.is_zero() {
                    col.remove(p);
                }
            }
            None => col.push((output, value)),
        }
        if col.is_empty() {
            self.columns.remove(&input);
        }
    }

    pub fn entry(&self, input: &[usize], output: &[usize]) -> Result<S> {
        let i = self.radix.pack(input)?;
        let o = self.radix.pack(output)?;
        Ok(self
            .column(i)
            .iter()
            .find(|(x, _)| *x == o)
            .map(|(_, s)| s.clone())
            .unwrap_or_else(S::zero))
    }

    #[inline]
    pub fn column(&self, input: u64) -> &[(u64, S)] {
        self.columns.get(&input).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn nnz(&self) -> usize {
        self.columns.values().map(Vec::len).sum()
    }

    /// All entries as sorted `(input, output, value)` triplets.
    pub fn triplets(&self) -> Vec<(u64, u64, S)> {
        let mut out: Vec<(u64, u64, S)> = self
            .columns
            .iter()
            .flat_map(|(i, col)| col.iter().map(move |(o, s)| (*i, *o, s.clone())))
            .collect();
        out.sort_by_key(|t| (t.0, t.1));
        out
    }

    pub fn support(&self) -> BTreeSet<(u64, u64)> {
        self.triplets().into_iter().map(|(i, o, _)| (i, o)).collect()
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> SparseOperator<T> {
        let mut out = SparseOperator {
            radix: self.radix.clone(),
            columns: HashMap::new(),
        };
        for (i, col) in &self.columns {
            for (o, s) in col {
                out.add_packed(*i, *o, f(s));
            }
        }
        out
    }

    /// Operator product `self * rhs` (rhs applies first).
    pub fn compose(&self, rhs: &SparseOperator<S>) -> Result<Self> {
        if self.dims() != rhs.dims() {
            return Err(Error::DimensionMismatch("compose: leg dimensions differ".into()));
        }
        let mut out = SparseOperator::new(self.dims().to_vec())?;
        for (i, col) in &rhs.columns {
            for (mid, a) in col {
                for (o, b) in self.column(*mid) {
                    out.add_packed(*i, *o, b.mul_ref(a));
                }
            }
        }
        Ok(out)
    }

    /// Tensor product; legs of `self` come first.
    pub fn kron(&self, other: &SparseOperator<S>) -> Result<Self> {
        let mut dims = self.dims().to_vec();
        dims.extend_from_slice(other.dims());
        let mut out = SparseOperator::new(dims)?;
        let scale = other.radix.size();
        for (i1, c1) in &self.columns {
            for (o1, a) in c1 {
                for (i2, c2) in &other.columns {
                    for (o2, b) in c2 {
                        out.add_packed(i1 * scale + i2, o1 * scale + o2, a.mul_ref(b));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Reorder legs: new leg `k` is old leg `order[k]`.
    pub fn permute_legs(&self, order: &[usize]) -> Result<Self> {
        let n = self.legs();
        let mut seen = order.to_vec();
        seen.sort();
        if seen != (0..n).collect::<Vec<_>>() {
            return Err(Error::Invalid(format!("{order:?} is not a leg permutation")));
        }
        let dims: Vec<usize> = order.iter().map(|&k| self.dims()[k]).collect();
        let mut out = SparseOperator::new(dims)?;
        let target = out.radix.clone();
        let re = |v: u64| -> u64 {
            let idx = self.radix.unpack(v);
            let new: Vec<usize> = order.iter().map(|&k| idx[k]).collect();
            target.pack(&new).expect("in range")
        };
        for (i, col) in &self.columns {
            for (o, s) in col {
                out.add_packed(re(*i), re(*o), s.clone());
            }
        }
        Ok(out)
    }

    /// Conjugate every leg by the basis permutation `perm` (an operator `A`
    /// with `A e_x = e_{perm(x)}`): returns `A^{⊗k} · self · (A^{-1})^{⊗k}`
    /// when `inverse_right`, else `A^{⊗k} · self · A^{⊗k}`.
    pub fn conjugate_legs(&self, perm: &[usize], inverse_right: bool) -> Result<Self> {
        let d = perm.len();
        if self.dims().iter().any(|&x| x != d) {
            return Err(Error::DimensionMismatch("conjugation: leg dimension differs from permutation size".into()));
        }
        let mut inv = vec![0; d];
        for (x, &y) in perm.iter().enumerate() {
            inv[y] = x;
        }
        // (A W B)(in, out) = W(b(in), a^{-1}(out))
        let right: &[usize] = if inverse_right { &inv } else { perm };
        let map_all = |v: u64, p: &[usize]| -> u64 {
            let idx: Vec<usize> = self.radix.unpack(v).into_iter().map(|x| p[x]).collect();
            self.radix.pack(&idx).unwrap()
        };
        let mut right_inv = vec![0; d];
        for (x, &y) in right.iter().enumerate() {
            right_inv[y] = x;
        }
        let mut out = SparseOperator::new(self.dims().to_vec())?;
        for (i, col) in &self.columns {
            for (o, s) in col {
                out.add_packed(map_all(*i, &right_inv), map_all(*o, perm), s.clone());
            }
        }
        Ok(out)
    }

    /// Dense grid `grid[output][input]` for small operators.
    pub fn dense(&self) -> Result<Vec<Vec<S>>> {
        let n = self.radix.size();
        if n > 256 {
            return Err(Error::TooLarge(format!("dense view of {n}x{n} operator")));
        }
        let mut grid = vec![vec![S::zero(); n as usize]; n as usize];
        for (i, col) in &self.columns {
            for (o, s) in col {
                grid[*o as usize][*i as usize] = s.clone();
            }
        }
        Ok(grid)
    }

    /// Sparse triplets as JSON `[input, output, value]`.
    pub fn triplets_json(&self, value: impl Fn(&S) -> Value) -> Value {
        Value::Array(
            self.triplets()
                .iter()
                .map(|(i, o, s)| Value::Array(vec![Value::from(*i), Value::from(*o), value(s)]))
                .collect(),
        )
    }
}

impl<S: Ring> PartialEq for SparseOperator<S> {
    fn eq(&self, other: &Self) -> bool {
        self.dims() == other.dims() && self.triplets() == other.triplets()
    }
}

/// A linear combination of packed ambient basis states, sorted by state.
pub type Combination<S> = Vec<(u64, S)>;

fn normalize<S: Ring>(mut v: Vec<(u64, S)>) -> Combination<S> {
    v.sort_by_key(|t| t.0);
    let mut out: Vec<(u64, S)> = Vec::with_capacity(v.len());
    for (k, s) in v {
        match out.last_mut() {
            Some((lk, ls)) if *lk == k => ls.add_assign_ref(&s),
            _ => out.push((k, s)),
        }
    }
    out.retain(|(_, s)| !s.is_zero());
    out
}

/// Operators bound to ambient slots, in written order.
#[derive(Clone, Debug)]
pub struct AmbientChain<'a, S> {
    radix: Radix,
    factors: Vec<(&'a SparseOperator<S>, Vec<usize>)>,
}

impl<'a, S: Ring> AmbientChain<'a, S> {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        Ok(AmbientChain {
            radix: Radix::new(&dims)?,
            factors: Vec::new(),
        })
    }

    /// Build from factors in written order (the last one applies first).
    pub fn from_written(
        dims: Vec<usize>,
        factors: Vec<(&'a SparseOperator<S>, Vec<usize>)>,
    ) -> Result<Self> {
        let mut c = AmbientChain::new(dims)?;
        for (op, slots) in factors {
            c.push_left(op, slots)?;
        }
        Ok(c)
    }

    /// Append a factor on the left, i.e. applied after everything so far.
    pub fn push_left(&mut self, op: &'a SparseOperator<S>, slots: Vec<usize>) -> Result<()> {
        if slots.len() != op.legs() {
            return Err(Error::Binding(format!(
                "operator has {} legs, bound to {} slots",
                op.legs(),
                slots.len()
            )));
        }
        let mut sorted = slots.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != slots.len() {
            return Err(Error::Binding(format!("repeated slot in {slots:?}")));
        }
        for (leg, &s) in slots.iter().enumerate() {
            let d = *self
                .radix
                .dims()
                .get(s)
                .ok_or_else(|| Error::Binding(format!("slot {s} outside ambient")))?;
            if d != op.dims()[leg] {
                return Err(Error::DimensionMismatch(format!(
                    "leg {leg} has dimension {}, slot {s} has {d}",
                    op.dims()[leg]
                )));
            }
        }
        self.factors.push((op, slots));
        Ok(())
    }

    pub fn dims(&self) -> &[usize] {
        self.radix.dims()
    }

    pub fn radix(&self) -> &Radix {
        &self.radix
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn slots(&self) -> Vec<Vec<usize>> {
        self.factors.iter().map(|(_, s)| s.clone()).collect()
    }

    /// Image of a packed basis state.
    pub fn apply_packed(&self, state: u64) -> Combination<S> {
        let mut cur: Combination<S> = vec![(state, S::one())];
        for (op, slots) in self.factors.iter().rev() {
            let mut next = Vec::new();
            for (st, c) in &cur {
                let mut local = 0u64;
                for (leg, &s) in slots.iter().enumerate() {
                    local = local * op.dims()[leg] as u64 + self.radix.get(*st, s) as u64;
                }
                for (out, w) in op.column(local) {
                    let mut ns = *st;
                    let mut rest = *out;
                    for (leg, &s) in slots.iter().enumerate().rev() {
                        let d = op.dims()[leg] as u64;
                        ns = self.radix.set(ns, s, (rest % d) as usize);
                        rest /= d;
                    }
                    next.push((ns, w.mul_ref(c)));
                }
            }
            cur = normalize(next);
            if cur.is_empty() {
                break;
            }
        }
        cur
    }

    pub fn apply(&self, state: &[usize]) -> Result<Vec<(Vec<usize>, S)>> {
        let p = self.radix.pack(state)?;
        Ok(self
            .apply_packed(p)
            .into_iter()
            .map(|(k, s)| (self.radix.unpack(k), s))
            .collect())
    }

    /// Apply to a formal combination of basis states.
    pub fn apply_combination(&self, input: &[(u64, S)]) -> Combination<S> {
        let mut acc = Vec::new();
        for (st, c) in input {
            for (o, w) in self.apply_packed(*st) {
                acc.push((o, w.mul_ref(c)));
            }
        }
        normalize(acc)
    }

    /// The composite as a single operator on all ambient slots.
    pub fn to_operator(&self) -> Result<SparseOperator<S>> {
        if self.radix.size() > 1 << 20 {
            return Err(Error::TooLarge("chain too large to materialize".into()));
        }
        let mut op = SparseOperator::new(self.radix.dims().to_vec())?;
        for i in 0..self.radix.size() {
            for (o, s) in self.apply_packed(i) {
                op.add_packed(i, o, s);
            }
        }
        Ok(op)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquationWitness {
    pub input: Vec<usize>,
    pub lhs: Vec<(Vec<usize>, String)>,
    pub rhs: Vec<(Vec<usize>, String)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquationReport {
    pub equation: String,
    pub holds: bool,
    pub inputs_checked: u64,
    pub nonzero_inputs: u64,
    pub nonzero_entries: u64,
    /// Nonzero entry values of the left side, rendered, with multiplicities.
    pub entries_histogram: BTreeMap<String, u64>,
    pub mismatched_inputs: u64,
    pub runtime_ms: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<EquationWitness>,
}

impl EquationReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// Every nonzero entry has the same rendered value `v`.
    pub fn all_entries_equal(&self, v: &str) -> bool {
        self.entries_histogram.len() == 1 && self.entries_histogram.contains_key(v)
    }
}

#[derive(Default)]
struct Partial {
    nonzero_inputs: u64,
    nonzero_entries: u64,
    mismatched: u64,
    histogram: BTreeMap<String, u64>,
    first_mismatch: Option<u64>,
}

impl Partial {
    fn merge(mut self, o: Partial) -> Partial {
        self.nonzero_inputs += o.nonzero_inputs;
        self.nonzero_entries += o.nonzero_entries;
        self.mismatched += o.mismatched;
        for (k, v) in o.histogram {
            *self.histogram.entry(k).or_default() += v;
        }
        self.first_mismatch = match (self.first_mismatch, o.first_mismatch) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self
    }
}

/// Compare two chains on every ambient basis input.
pub fn check_equation<S: Ring>(
    name: &str,
    lhs: &AmbientChain<'_, S>,
    rhs: &AmbientChain<'_, S>,
) -> Result<EquationReport> {
    if lhs.dims() != rhs.dims() {
        return Err(Error::DimensionMismatch("the two sides use different ambient slots".into()));
    }
    let start = Instant::now();
    let total = lhs.radix.size();
    if total > 1 << 32 {
        return Err(Error::TooLarge(format!("{total} ambient inputs")));
    }
    const CHUNK: u64 = 1 << 14;
    let chunks = total.div_ceil(CHUNK);
    let part = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut p = Partial::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let l = lhs.apply_packed(i);
                let r = rhs.apply_packed(i);
                if !l.is_empty() {
                    p.nonzero_inputs += 1;
                    p.nonzero_entries += l.len() as u64;
                    for (_, s) in &l {
                        *p.histogram.entry(s.to_string()).or_default() += 1;
                    }
                }
                if l != r {
                    p.mismatched += 1;
                    if p.first_mismatch.is_none() {
                        p.first_mismatch = Some(i);
                    }
                }
            }
            p
        })
        .reduce(Partial::default, Partial::merge);
    let witness = part.first_mismatch.map(|i| {
        let render = |c: Combination<S>| -> Vec<(Vec<usize>, String)> {
            c.into_iter()
                .map(|(k, s)| (lhs.radix.unpack(k), s.to_string()))
                .collect()
        };
        EquationWitness {
            input: lhs.radix.unpack(i),
            lhs: render(lhs.apply_packed(i)),
            rhs: render(rhs.apply_packed(i)),
        }
    });
    Ok(EquationReport {
        equation: name.to_string(),
        holds: part.mismatched == 0,
        inputs_checked: total,
        nonzero_inputs: part.nonzero_inputs,
        nonzero_entries: part.nonzero_entries,
        entries_histogram: part.histogram,
        mismatched_inputs: part.mismatched,
        runtime_ms: start.elapsed().as_millis(),
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Laurent;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn int(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn radix_roundtrip() {
        let r = Radix::new(&[2, 3, 16]).unwrap();
        for v in 0..r.size() {
            assert_eq!(r.pack(&r.unpack(v)).unwrap(), v);
        }
        assert_eq!(r.pack(&[1, 0, 0]).unwrap(), 48);
        assert!(r.pack(&[2, 0, 0]).is_err());
        let v = r.pack(&[1, 2, 5]).unwrap();
        assert_eq!(r.get(v, 1), 2);
        assert_eq!(r.unpack(r.set(v, 1, 0)), vec![1, 0, 5]);
    }

    #[test]
    fn empty_chain_is_identity() {
        let c: AmbientChain<'_, BigInt> = AmbientChain::new(vec![2, 3]).unwrap();
        assert_eq!(c.apply(&[1, 2]).unwrap(), vec![(vec![1, 2], int(1))]);
        let d: AmbientChain<'_, BigInt> = AmbientChain::new(vec![2, 3]).unwrap();
        let rep = check_equation("empty", &c, &d).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.entries_histogram.get("1"), Some(&6));
    }

    #[test]
    fn compose_matches_chain() {
        let mut a: SparseOperator<BigInt> = SparseOperator::new(vec![2, 2]).unwrap();
        a.add_entry(&[0, 0], &[1, 1], int(2)).unwrap();
        a.add_entry(&[0, 0], &[0, 1], int(1)).unwrap();
        a.add_entry(&[1, 0], &[1, 0], int(3)).unwrap();
        a.add_entry(&[0, 1], &[0, 0], int(1)).unwrap();
        let sq = a.compose(&a).unwrap();
        let chain = AmbientChain::from_written(vec![2, 2], vec![(&a, vec![0, 1]), (&a, vec![0, 1])]).unwrap();
        assert_eq!(chain.to_operator().unwrap(), sq);
        assert_eq!(sq.entry(&[0, 0], &[0, 0]).unwrap(), int(1));
    }

    #[test]
    fn slot_binding_errors() {
        let a: SparseOperator<BigInt> = SparseOperator::new(vec![2, 2]).unwrap();
        let mut c = AmbientChain::new(vec![2, 2, 3]).unwrap();
        assert!(c.push_left(&a, vec![0]).is_err());
        assert!(c.push_left(&a, vec![0, 0]).is_err());
        assert!(c.push_left(&a, vec![0, 2]).is_err());
        assert!(c.push_left(&a, vec![0, 5]).is_err());
        assert!(c.push_left(&a, vec![1, 0]).is_ok());
        assert!(c.apply(&[0, 0]).is_err());
    }

    #[test]
    fn legs_are_swapped_by_binding() {
        // operator that maps (x, y) -> (x, x)
        let mut a: SparseOperator<BigInt> = SparseOperator::new(vec![2, 2]).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                a.add_entry(&[x, y], &[x, x], int(1)).unwrap();
            }
        }
        let c1 = AmbientChain::from_written(vec![2, 2], vec![(&a, vec![0, 1])]).unwrap();
        let c2 = AmbientChain::from_written(vec![2, 2], vec![(&a, vec![1, 0])]).unwrap();
        assert_eq!(c1.apply(&[1, 0]).unwrap(), vec![(vec![1, 1], int(1))]);
        assert_eq!(c2.apply(&[1, 0]).unwrap(), vec![(vec![0, 0], int(1))]);
        let rep = check_equation("swapped", &c1, &c2).unwrap();
        assert!(!rep.holds);
        let w = rep.witness.unwrap();
        assert_eq!(w.input, vec![0, 1]);
    }

    #[test]
    fn permute_legs_matches_swap_conjugation() {
        let mut a: SparseOperator<BigInt> = SparseOperator::new(vec![2, 3]).unwrap();
        a.add_entry(&[1, 2], &[0, 1], int(5)).unwrap();
        a.add_entry(&[0, 0], &[1, 1], int(-1)).unwrap();
        let p = a.permute_legs(&[1, 0]).unwrap();
        assert_eq!(p.dims(), &[3, 2]);
        assert_eq!(p.entry(&[2, 1], &[1, 0]).unwrap(), int(5));
        assert_eq!(p.permute_legs(&[1, 0]).unwrap(), a);
        assert!(a.permute_legs(&[0, 0]).is_err());
    }

    #[test]
    fn conjugation_matches_explicit_product() {
        let perm = vec![2, 0, 1];
        let mut w: SparseOperator<BigInt> = SparseOperator::new(vec![3, 3]).unwrap();
        w.add_entry(&[0, 1], &[2, 2], int(1)).unwrap();
        w.add_entry(&[1, 1], &[0, 2], int(4)).unwrap();
        w.add_entry(&[2, 0], &[2, 0], int(7)).unwrap();
        let a = SparseOperator::<BigInt>::permutation(&perm).unwrap();
        let aa = a.kron(&a).unwrap();
        let mut inv = vec![0; 3];
        for (x, &y) in perm.iter().enumerate() {
            inv[y] = x;
        }
        let ainv = SparseOperator::<BigInt>::permutation(&inv).unwrap();
        let ai = ainv.kron(&ainv).unwrap();
        let explicit = aa.compose(&w).unwrap().compose(&ai).unwrap();
        assert_eq!(w.conjugate_legs(&perm, true).unwrap(), explicit);
        let explicit2 = aa.compose(&w).unwrap().compose(&aa).unwrap();
        assert_eq!(w.conjugate_legs(&perm, false).unwrap(), explicit2);
    }

    #[test]
    fn dense_grid() {
        let s = SparseOperator::<BigInt>::swap(2).unwrap();
        let g = s.dense().unwrap();
        assert_eq!(g[1][2], int(1));
        assert_eq!(g[0][0], int(1));
        assert_eq!(g[1][1], int(0));
    }

    fn arb_op() -> impl Strategy<Value = SparseOperator<Laurent>> {
        proptest::collection::vec((0usize..4, 0usize..4, -3i64..=3, 1i64..=3), 0..8).prop_map(|es| {
            let mut op = SparseOperator::new(vec![2, 2]).unwrap();
            for (i, o, e, c) in es {
                op.add_entry(&[i / 2, i % 2], &[o / 2, o % 2], Laurent::monomial(e, c)).unwrap();
            }
            op
        })
    }

    proptest! {
        #[test]
        fn apply_is_linear(a in arb_op(), b in arb_op(), s1 in 0u64..8, s2 in 0u64..8, k1 in -3i64..4, k2 in -3i64..4) {
            let chain = AmbientChain::from_written(vec![2, 2, 2], vec![(&a, vec![0, 2]), (&b, vec![1, 2])]).unwrap();
            let c1 = Laurent::monomial(1, k1);
            let c2 = Laurent::constant(k2);
            let combined = chain.apply_combination(&normalize(vec![(s1, c1.clone()), (s2, c2.clone())]));
            let mut separate = Vec::new();
            for (o, w) in chain.apply_packed(s1) { separate.push((o, w.mul_ref(&c1))); }
            for (o, w) in chain.apply_packed(s2) { separate.push((o, w.mul_ref(&c2))); }
            prop_assert_eq!(combined, normalize(separate));
        }

        #[test]
        fn specialization_commutes_with_composition(a in arb_op(), b in arb_op()) {
            let at1 = |l: &Laurent| l.eval_at_one();
            let before = a.compose(&b).unwrap().map(at1);
            let after = a.map(at1).compose(&b.map(at1)).unwrap();
            prop_assert_eq!(before, after);
        }
    }
}
