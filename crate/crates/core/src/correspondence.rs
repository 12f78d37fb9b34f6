//! Finite set-theoretic correspondences, their slot-bound composition and
//! the n-simplex equation checker.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::hypercube::SimplexLayout;
use crate::scalar::{Laurent, Ring};
use crate::tensor::{check_equation, AmbientChain, EquationReport, Radix, SparseOperator};

pub type Color = u32;
pub type Tuple = Vec<Color>;

/// Ordered finite color set; the order fixes the basis order downstream.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColorSet {
    labels: Vec<String>,
}

impl ColorSet {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Invalid("empty color set".into()));
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::Invalid("repeated color label".into()));
        }
        Ok(ColorSet { labels })
    }

    /// Ising spins `{+1, -1}`, `+1` first.
    pub fn ising() -> Self {
        ColorSet {
            labels: vec!["+".into(), "-".into()],
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, c: Color) -> &str {
        &self.labels[c as usize]
    }

    pub fn index_of(&self, label: &str) -> Option<Color> {
        self.labels.iter().position(|l| l == label).map(|i| i as Color)
    }

    /// Tuples of length `k`, first component most significant.
    pub fn power(&self, k: usize) -> Result<ColorSet> {
        let size = (self.len() as u64)
            .checked_pow(k as u32)
            .filter(|&s| s <= 1 << 20)
            .ok_or_else(|| Error::TooLarge(format!("{}^{k} colors", self.len())))?;
        let labels = (0..size)
            .map(|v| {
                self.decode(v as Color, k)
                    .iter()
                    .map(|&c| self.label(c).to_string())
                    .collect::<String>()
            })
            .collect();
        Ok(ColorSet { labels })
    }

    pub fn encode(&self, tuple: &[Color]) -> Color {
        tuple
            .iter()
            .fold(0, |acc, &c| acc * self.len() as Color + c)
    }

    pub fn decode(&self, mut v: Color, k: usize) -> Tuple {
        let b = self.len() as Color;
        let mut out = vec![0; k];
        for slot in out.iter_mut().rev() {
            *slot = v % b;
            v /= b;
        }
        out
    }

    pub fn render(&self, t: &[Color]) -> Vec<String> {
        t.iter().map(|&c| self.label(c).to_string()).collect()
    }
}

/// A relation between input and output tuples of length `arity`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correspondence {
    arity: usize,
    colors: usize,
    pairs: BTreeSet<(Tuple, Tuple)>,
}

impl Correspondence {
    pub fn new(arity: usize, colors: usize, pairs: impl IntoIterator<Item = (Tuple, Tuple)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (i, o) in pairs {
            if i.len() != arity || o.len() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    found: i.len().max(o.len()),
                });
            }
            if i.iter().chain(&o).any(|&c| c as usize >= colors) {
                return Err(Error::Invalid(format!("color outside 0..{colors}")));
            }
            set.insert((i, o));
        }
        Ok(Correspondence {
            arity,
            colors,
            pairs: set,
        })
    }

    /// Graph of a map on `colors^arity`.
    pub fn from_fn(arity: usize, colors: usize, f: impl Fn(&[Color]) -> Vec<Tuple>) -> Result<Self> {
        let radix = Radix::new(&vec![colors; arity])?;
        let mut pairs = Vec::new();
        for v in 0..radix.size() {
            let input: Tuple = radix.unpack(v).into_iter().map(|x| x as Color).collect();
            for o in f(&input) {
                pairs.push((input.clone(), o));
            }
        }
        Correspondence::new(arity, colors, pairs)
    }

    pub fn identity(arity: usize, colors: usize) -> Result<Self> {
        Correspondence::from_fn(arity, colors, |i| vec![i.to_vec()])
    }

    /// `(a, b) -> (b, a)`.
    pub fn swap(colors: usize) -> Result<Self> {
        Correspondence::from_fn(2, colors, |i| vec![vec![i[1], i[0]]])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn colors(&self) -> usize {
        self.colors
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, input: &[Color], output: &[Color]) -> bool {
        self.pairs.contains(&(input.to_vec(), output.to_vec()))
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(Tuple, Tuple)> {
        self.pairs.iter()
    }

    /// Input tuple -> sorted outputs.
    pub fn fanout(&self) -> HashMap<Tuple, Vec<Tuple>> {
        let mut m: HashMap<Tuple, Vec<Tuple>> = HashMap::new();
        for (i, o) in &self.pairs {
            m.entry(i.clone()).or_default().push(o.clone());
        }
        m
    }

    /// Histogram `fiber size -> number of inputs` over inputs in the domain.
    pub fn fiber_sizes(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for outs in self.fanout().values() {
            *h.entry(outs.len()).or_insert(0) += 1;
        }
        h
    }

    /// Every input in the domain has exactly one output.
    pub fn is_partial_map(&self) -> bool {
        self.fiber_sizes().keys().all(|&k| k == 1)
    }

    pub fn domain_size(&self) -> usize {
        self.fanout().len()
    }

    /// Apply a color relabeling to every component of every tuple.
    pub fn relabel(&self, f: impl Fn(Color) -> Color) -> Result<Self> {
        Correspondence::new(
            self.arity,
            self.colors,
            self.pairs.iter().map(|(i, o)| {
                (
                    i.iter().map(|&c| f(c)).collect(),
                    o.iter().map(|&c| f(c)).collect(),
                )
            }),
        )
    }

    pub fn to_json(&self, colors: &ColorSet) -> Value {
        Value::Array(
            self.pairs
                .iter()
                .map(|(i, o)| serde_json::json!([colors.render(i), colors.render(o)]))
                .collect(),
        )
    }

    pub fn from_json(v: &Value, colors: &ColorSet) -> Result<Self> {
        let bad = || Error::Invalid("expected a list of [input, output] tuples".into());
        let arr = v.as_array().ok_or_else(bad)?;
        let parse = |t: &Value| -> Result<Tuple> {
            t.as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|c| {
                    c.as_str()
                        .and_then(|s| colors.index_of(s))
                        .ok_or_else(|| Error::Invalid(format!("unknown color {c}")))
                })
                .collect()
        };
        let mut pairs = Vec::new();
        let mut arity = None;
        for p in arr {
            let pa = p.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
            let i = parse(&pa[0])?;
            let o = parse(&pa[1])?;
            arity.get_or_insert(i.len());
            pairs.push((i, o));
        }
        Correspondence::new(arity.unwrap_or(0), colors.len(), pairs)
    }
}

/// The Ising Yang-Baxter correspondence: `(a, b) -> (c, d)` iff `ab = cd`.
pub fn ising_r() -> Correspondence {
    Correspondence::from_fn(2, 2, |i| {
        let parity = (i[0] + i[1]) % 2;
        (0..4u32)
            .map(|v| vec![v >> 1, v & 1])
            .filter(|o| (o[0] + o[1]) % 2 == parity)
            .collect()
    })
    .expect("valid relation")
}

/// Operator legs bound to ambient slots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlotBinding(pub Vec<usize>);

impl SlotBinding {
    fn validate(&self, arity: usize, slots: usize) -> Result<()> {
        if self.0.len() != arity {
            return Err(Error::ArityMismatch {
                expected: arity,
                found: self.0.len(),
            });
        }
        let set: BTreeSet<usize> = self.0.iter().copied().collect();
        if set.len() != self.0.len() || self.0.iter().any(|&s| s >= slots) {
            return Err(Error::Binding(format!("invalid binding {:?} over {slots} slots", self.0)));
        }
        Ok(())
    }
}

struct PreparedFactor {
    strides: Vec<u64>,
    colors: u64,
    /// Digit shifts when the color count is a power of two.
    shifts: Option<Vec<u32>>,
    /// Local input key -> ambient contributions of the outputs.
    table: Vec<Vec<u64>>,
}

impl PreparedFactor {
    /// Local key of `state` and the ambient contribution of the bound slots.
    #[inline]
    fn read(&self, state: u64) -> (usize, u64) {
        if let Some(shifts) = &self.shifts {
            let bits = self.colors.trailing_zeros();
            let mask = self.colors - 1;
            let mut key = 0u64;
            let mut here = 0u64;
            for &sh in shifts {
                let d = state >> sh & mask;
                key = key << bits | d;
                here |= d << sh;
            }
            return (key as usize, here);
        }
        let mut key = 0u64;
        let mut here = 0u64;
        for &st in &self.strides {
            let d = state / st % self.colors;
            key = key * self.colors + d;
            here += d * st;
        }
        (key as usize, here)
    }
}

/// Correspondences bound to ambient slots, in application order.
pub(crate) struct RelChain {
    pub(crate) radix: Radix,
    factors: Vec<PreparedFactor>,
}

impl RelChain {
    pub(crate) fn new(slots: usize, colors: usize, applied: &[(&Correspondence, SlotBinding)]) -> Result<Self> {
        let radix = Radix::new(&vec![colors; slots])?;
        let k = colors as u64;
        let mut factors = Vec::new();
        for (c, b) in applied {
            b.validate(c.arity(), slots)?;
            if c.colors() != colors {
                return Err(Error::DimensionMismatch(format!(
                    "correspondence over {} colors in an ambient of {colors}",
                    c.colors()
                )));
            }
            let local = k
                .checked_pow(c.arity() as u32)
                .filter(|&x| x <= 1 << 20)
                .ok_or_else(|| Error::TooLarge("correspondence input space".into()))?;
            let strides: Vec<u64> = b.0.iter().map(|&s| k.pow((slots - 1 - s) as u32)).collect();
            let mut table = vec![Vec::new(); local as usize];
            for (i, o) in c.pairs() {
                let key = i.iter().fold(0u64, |a, &x| a * k + x as u64);
                let contrib: u64 = o.iter().zip(&strides).map(|(&x, st)| x as u64 * st).sum();
                table[key as usize].push(contrib);
            }
            let shifts = k
                .is_power_of_two()
                .then(|| strides.iter().map(|st| st.trailing_zeros()).collect());
            factors.push(PreparedFactor {
                strides,
                colors: k,
                shifts,
                table,
            });
        }
        Ok(RelChain { radix, factors })
    }

    pub(crate) fn image(&self, state: u64) -> Vec<u64> {
        let Some(first) = self.factors.first() else {
            return vec![state];
        };
        let (key, here) = first.read(state);
        let outs = &first.table[key];
        if outs.is_empty() {
            return Vec::new();
        }
        let mut cur: Vec<u64> = outs.iter().map(|c| state - here + c).collect();
        cur.sort_unstable();
        cur.dedup();
        for f in &self.factors[1..] {
            let mut next = Vec::with_capacity(cur.len() * 2);
            for &st in &cur {
                let (key, here) = f.read(st);
                next.extend(f.table[key].iter().map(|c| st - here + c));
            }
            next.sort_unstable();
            next.dedup();
            cur = next;
            if cur.is_empty() {
                break;
            }
        }
        cur
    }
}

/// Relational composite of a chain given in written order (the rightmost
/// element applies first), over `slots` ambient slots of `colors` colors.
pub fn compose(chain: &[(&Correspondence, SlotBinding)], slots: usize, colors: usize) -> Result<Correspondence> {
    let applied: Vec<(&Correspondence, SlotBinding)> =
        chain.iter().rev().map(|(c, b)| (*c, b.clone())).collect();
    let rc = RelChain::new(slots, colors, &applied)?;
    if rc.radix.size() > 1 << 20 {
        return Err(Error::TooLarge("ambient too large to materialize a composite".into()));
    }
    let mut pairs = Vec::new();
    for v in 0..rc.radix.size() {
        let input: Tuple = rc.radix.unpack(v).into_iter().map(|x| x as Color).collect();
        for o in rc.image(v) {
            pairs.push((
                input.clone(),
                rc.radix.unpack(o).into_iter().map(|x| x as Color).collect(),
            ));
        }
    }
    Correspondence::new(slots, colors, pairs)
}

#[derive(Clone, Debug, Serialize)]
pub struct SimplexWitness {
    pub input: Vec<Color>,
    pub output: Vec<Color>,
    /// `"left-only"` or `"right-only"`.
    pub side: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimplexReport {
    pub n: usize,
    pub holds: bool,
    pub slots: usize,
    pub colors: usize,
    pub left_written: Vec<String>,
    pub right_written: Vec<String>,
    pub inputs_checked: u64,
    pub left_pairs: u64,
    pub right_pairs: u64,
    pub runtime_ms: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<SimplexWitness>,
}

#[derive(Default)]
struct SimplexPartial {
    left: u64,
    right: u64,
    first: Option<(u64, u64, bool)>,
}

/// Check the n-simplex equation for `r` using slot bindings derived from the
/// two simplices of the (n+1)-cube.
pub fn check_n_simplex(r: &Correspondence, n: usize) -> Result<SimplexReport> {
    if r.arity() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            found: r.arity(),
        });
    }
    let start = Instant::now();
    let layout = SimplexLayout::new(n)?;
    let bind = |chain: &[(crate::FaceWord, Vec<usize>)]| -> Vec<(&Correspondence, SlotBinding)> {
        chain.iter().map(|(_, s)| (r, SlotBinding(s.clone()))).collect()
    };
    let slots = layout.slots.len();
    let left = RelChain::new(slots, r.colors(), &bind(&layout.left))?;
    let right = RelChain::new(slots, r.colors(), &bind(&layout.right))?;
    let total = left.radix.size();
    if total > 1 << 28 {
        return Err(Error::TooLarge(format!("{total} ambient inputs")));
    }
    const CHUNK: u64 = 1 << 14;
    let part = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut p = SimplexPartial::default();
            for v in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let a = left.image(v);
                let b = right.image(v);
                p.left += a.len() as u64;
                p.right += b.len() as u64;
                if a != b && p.first.is_none() {
                    let only_a = a.iter().find(|x| b.binary_search(x).is_err());
                    let only_b = b.iter().find(|x| a.binary_search(x).is_err());
                    p.first = Some(match (only_a, only_b) {
                        (Some(&x), Some(&y)) if y < x => (v, y, false),
                        (Some(&x), _) => (v, x, true),
                        (None, Some(&y)) => (v, y, false),
                        (None, None) => unreachable!(),
                    });
                }
            }
            p
        })
        .reduce(SimplexPartial::default, |mut a, b| {
            a.left += b.left;
            a.right += b.right;
            a.first = match (a.first, b.first) {
                (Some(x), Some(y)) => Some(if x.0 <= y.0 { x } else { y }),
                (x, y) => x.or(y),
            };
            a
        });
    let unpack = |v: u64| -> Vec<Color> { left.radix.unpack(v).into_iter().map(|x| x as Color).collect() };
    Ok(SimplexReport {
        n,
        holds: part.first.is_none(),
        slots,
        colors: r.colors(),
        left_written: SimplexLayout::written(&layout.left),
        right_written: SimplexLayout::written(&layout.right),
        inputs_checked: total,
        left_pairs: part.left,
        right_pairs: part.right,
        runtime_ms: start.elapsed().as_millis(),
        witness: part.first.map(|(i, o, is_left)| SimplexWitness {
            input: unpack(i),
            output: unpack(o),
            side: if is_left { "left-only" } else { "right-only" }.into(),
        }),
    })
}

/// The 0/1 matrix of a correspondence: entry(in, out) = 1 iff (in, out) is in it.
pub fn associated_matrix(c: &Correspondence) -> Result<SparseOperator<BigInt>> {
    let mut op = SparseOperator::new(vec![c.colors(); c.arity()])?;
    for (i, o) in c.pairs() {
        let i: Vec<usize> = i.iter().map(|&x| x as usize).collect();
        let o: Vec<usize> = o.iter().map(|&x| x as usize).collect();
        op.add_entry(&i, &o, BigInt::from(1))?;
    }
    Ok(op)
}

/// Dense grid (`grid[out][in]`) for arity <= 2, sparse triplets otherwise.
pub fn matrix_json(c: &Correspondence) -> Result<Value> {
    let m = associated_matrix(c)?;
    if c.arity() <= 2 {
        let grid = m.dense()?;
        Ok(serde_json::json!({
            "format": "dense",
            "rows_are": "output",
            "grid": grid.iter().map(|row| row.iter().map(|x| x.to_string().parse::<i64>().unwrap()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }))
    } else {
        Ok(serde_json::json!({
            "format": "triplets",
            "dims": m.dims(),
            "entries": m.triplets_json(|x| Value::from(x.to_string().parse::<i64>().unwrap())),
        }))
    }
}

/// `R(t) = 1 ⊗ 1 + t σ ⊗ σ` with exact polynomial entries.
pub fn r_poly() -> SparseOperator<Laurent> {
    let mut op = SparseOperator::new(vec![2, 2]).unwrap();
    for x in 0..2 {
        for y in 0..2 {
            op.add_entry(&[x, y], &[x, y], Laurent::one()).unwrap();
            op.add_entry(&[x, y], &[1 - x, 1 - y], Laurent::var()).unwrap();
        }
    }
    op
}

/// `1 + t^3 + (t + t^2)(σσ1 + σ1σ + 1σσ)` assembled from Kronecker products.
pub fn r_poly_expansion() -> SparseOperator<Laurent> {
    let mut sigma = SparseOperator::new(vec![2]).unwrap();
    sigma.add_entry(&[0], &[1], Laurent::one()).unwrap();
    sigma.add_entry(&[1], &[0], Laurent::one()).unwrap();
    let id = SparseOperator::<Laurent>::identity(vec![2]).unwrap();
    let k3 = |a: &SparseOperator<Laurent>, b: &SparseOperator<Laurent>, c: &SparseOperator<Laurent>| {
        a.kron(b).unwrap().kron(c).unwrap()
    };
    let one = k3(&id, &id, &id);
    let terms = [k3(&sigma, &sigma, &id), k3(&sigma, &id, &sigma), k3(&id, &sigma, &sigma)];
    let mut out = one.map(|s| s.mul_ref(&Laurent::from_terms([(0, 1), (3, 1)])));
    let c = Laurent::from_terms([(1, 1), (2, 1)]);
    for t in &terms {
        for (i, o, s) in t.triplets() {
            out.add_packed(i, o, s.mul_ref(&c));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct PolyYbeReport {
    pub holds: bool,
    pub lhs_matches_expansion: bool,
    pub rhs_matches_expansion: bool,
    pub identity_at_zero: bool,
    /// Entry values of either side at t = 1.
    pub entries_at_one: BTreeMap<String, usize>,
    pub equation: EquationReport,
}

impl PolyYbeReport {
    pub fn passed(&self) -> bool {
        self.holds && self.lhs_matches_expansion && self.rhs_matches_expansion && self.identity_at_zero
    }
}

pub fn check_r_poly_ybe() -> Result<PolyYbeReport> {
    let r = r_poly();
    let lhs = AmbientChain::from_written(vec![2; 3], vec![(&r, vec![0, 1]), (&r, vec![0, 2]), (&r, vec![1, 2])])?;
    let rhs = AmbientChain::from_written(vec![2; 3], vec![(&r, vec![1, 2]), (&r, vec![0, 2]), (&r, vec![0, 1])])?;
    let equation = check_equation("R12(t) R13(t) R23(t) = R23(t) R13(t) R12(t)", &lhs, &rhs)?;
    let expansion = r_poly_expansion();
    let lhs_op = lhs.to_operator()?;
    let rhs_op = rhs.to_operator()?;
    let at_zero = lhs_op.map(|s| Laurent::constant(s.coeff(0)));
    let identity_at_zero = at_zero == SparseOperator::identity(vec![2; 3])?;
    let mut entries_at_one = BTreeMap::new();
    for (_, _, s) in lhs_op.triplets() {
        *entries_at_one.entry(s.eval_at_one().to_string()).or_insert(0) += 1;
    }
    Ok(PolyYbeReport {
        holds: equation.holds,
        lhs_matches_expansion: lhs_op == expansion,
        rhs_matches_expansion: rhs_op == expansion,
        identity_at_zero,
        entries_at_one,
        equation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: Color = 0;
    const M: Color = 1;

    #[test]
    fn ising_relation() {
        let r = ising_r();
        assert_eq!(r.len(), 8);
        assert!(r.contains(&[P, M], &[M, P]));
        assert!(r.contains(&[P, P], &[M, M]));
        assert!(!r.contains(&[P, P], &[P, M]));
        for (i, o) in r.pairs() {
            assert_eq!((i[0] + i[1]) % 2, (o[0] + o[1]) % 2);
        }
        assert_eq!(r.fiber_sizes(), BTreeMap::from([(2, 4)]));
    }

    #[test]
    fn ising_matrix_is_printed_r_m() {
        let m = associated_matrix(&ising_r()).unwrap();
        let grid: Vec<Vec<i64>> = m
            .dense()
            .unwrap()
            .iter()
            .map(|r| r.iter().map(|x| x.to_string().parse().unwrap()).collect())
            .collect();
        assert_eq!(
            grid,
            vec![vec![1, 0, 0, 1], vec![0, 1, 1, 0], vec![0, 1, 1, 0], vec![1, 0, 0, 1]]
        );
        // column of e1 ⊗ e1
        let chain = AmbientChain::from_written(vec![2, 2], vec![(&m, vec![0, 1])]).unwrap();
        let img = chain.apply(&[0, 0]).unwrap();
        assert_eq!(img, vec![(vec![0, 0], BigInt::from(1)), (vec![1, 1], BigInt::from(1))]);
        let id = associated_matrix(&Correspondence::identity(2, 2).unwrap()).unwrap();
        assert_eq!(id, SparseOperator::identity(vec![2, 2]).unwrap());
    }

    #[test]
    fn compose_examples() {
        let id = Correspondence::identity(2, 2).unwrap();
        let c = compose(&[(&id, SlotBinding(vec![0, 1])), (&id, SlotBinding(vec![0, 1]))], 2, 2).unwrap();
        assert_eq!(c, id);

        let single = Correspondence::new(2, 2, [(vec![P, P], vec![M, M])]).unwrap();
        let c = compose(&[(&single, SlotBinding(vec![0, 1]))], 3, 2).unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.contains(&[P, P, P], &[M, M, P]));
        assert!(c.contains(&[P, P, M], &[M, M, M]));

        let r = ising_r();
        let b = |s: &[usize]| SlotBinding(s.to_vec());
        let l = compose(&[(&r, b(&[0, 1])), (&r, b(&[0, 2])), (&r, b(&[1, 2]))], 3, 2).unwrap();
        let rr = compose(&[(&r, b(&[1, 2])), (&r, b(&[0, 2])), (&r, b(&[0, 1]))], 3, 2).unwrap();
        assert_eq!(l, rr);
    }

    #[test]
    fn compose_rejects_bad_bindings() {
        let r = ising_r();
        assert!(compose(&[(&r, SlotBinding(vec![0]))], 3, 2).is_err());
        assert!(compose(&[(&r, SlotBinding(vec![0, 0]))], 3, 2).is_err());
        assert!(compose(&[(&r, SlotBinding(vec![0, 3]))], 3, 2).is_err());
    }

    #[test]
    fn matrix_product_counts_realizations() {
        let r = ising_r();
        let b = |s: &[usize]| SlotBinding(s.to_vec());
        let rel = compose(&[(&r, b(&[0, 1])), (&r, b(&[1, 2]))], 3, 2).unwrap();
        let m = associated_matrix(&r).unwrap();
        let chain = AmbientChain::from_written(vec![2; 3], vec![(&m, vec![0, 1]), (&m, vec![1, 2])]).unwrap();
        let prod = chain.to_operator().unwrap();
        let support: BTreeSet<(u64, u64)> = prod.support();
        let rel_support: BTreeSet<(u64, u64)> = rel
            .pairs()
            .map(|(i, o)| {
                let p = |t: &Tuple| t.iter().fold(0u64, |a, &x| a * 2 + x as u64);
                (p(i), p(o))
            })
            .collect();
        assert_eq!(support, rel_support);
    }

    #[test]
    fn simplex_checks() {
        let rep = check_n_simplex(&ising_r(), 2).unwrap();
        assert!(rep.holds, "{rep:?}");
        assert_eq!(rep.slots, 3);
        for n in 2..=3 {
            assert!(check_n_simplex(&Correspondence::identity(n, 2).unwrap(), n).unwrap().holds);
        }
        assert!(check_n_simplex(&Correspondence::swap(2).unwrap(), 2).unwrap().holds);
        assert!(check_n_simplex(&Correspondence::swap(3).unwrap(), 2).unwrap().holds);
        assert!(check_n_simplex(&ising_r(), 3).is_err());
    }

    #[test]
    fn non_solution_is_detected() {
        // (+,+) -> (+,-) extended to an asymmetric bijection
        let bad = Correspondence::new(
            2,
            2,
            [
                (vec![P, P], vec![P, M]),
                (vec![P, M], vec![M, M]),
                (vec![M, P], vec![M, P]),
                (vec![M, M], vec![P, P]),
            ],
        )
        .unwrap();
        let rep = check_n_simplex(&bad, 2).unwrap();
        assert!(!rep.holds);
        let w = rep.witness.unwrap();
        assert_eq!(w.input.len(), 3);
    }

    #[test]
    fn poly_ybe() {
        let rep = check_r_poly_ybe().unwrap();
        assert!(rep.passed(), "{rep:?}");
        // every nonzero entry specializes to 2 at t = 1
        assert_eq!(rep.entries_at_one, BTreeMap::from([("2".to_string(), 32)]));
    }

    #[test]
    fn json_forms() {
        let cs = ColorSet::ising();
        let r = ising_r();
        let j = r.to_json(&cs);
        assert_eq!(j.as_array().unwrap().len(), 8);
        assert_eq!(j[0], serde_json::json!([["+", "+"], ["+", "+"]]));
        assert_eq!(Correspondence::from_json(&j, &cs).unwrap(), r);
        let m = matrix_json(&r).unwrap();
        assert_eq!(m["grid"][0], serde_json::json!([1, 0, 0, 1]));
    }

    #[test]
    fn color_powers() {
        let x4 = ColorSet::ising().power(4).unwrap();
        assert_eq!(x4.len(), 16);
        assert_eq!(x4.label(0), "++++");
        assert_eq!(x4.label(0b1010), "-+-+");
        let x = ColorSet::ising();
        assert_eq!(x.encode(&[1, 0, 1, 0]), 10);
        assert_eq!(x.decode(10, 4), vec![1, 0, 1, 0]);
    }
}
