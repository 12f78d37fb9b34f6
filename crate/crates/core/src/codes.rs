//! Binary words on the hypercube: induced cycles, chain codes, minimum
//! distance and the distance audit of the chosen-edge subgraph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourcube::{chosen_set, Side};
use crate::hypercube::FaceWord;

/// Coil in the 4-cube carried by the chosen-edge subgraph.
pub const REFERENCE_COIL: [&str; 8] = ["0100", "1100", "1101", "1001", "0001", "0011", "0111", "0110"];

/// Words at the subdivision points of the chosen-edge subgraph.
pub const DISTANCE_TWO_CODE: [&str; 6] = ["1111", "0011", "1001", "0000", "1100", "0110"];

/// Word `b_0 b_1 ... b_{n-1}` as bits, axis 0 in bit 0.
pub fn parse_word(s: &str) -> Result<u16> {
    if s.is_empty() || s.len() > 16 {
        return Err(Error::Invalid(format!("word {s:?} must have 1..=16 letters")));
    }
    s.chars().enumerate().try_fold(0u16, |w, (i, c)| match c {
        '0' => Ok(w),
        '1' => Ok(w | 1 << i),
        _ => Err(Error::Invalid(format!("word {s:?} is not binary"))),
    })
}

pub fn render_word(n: usize, w: u16) -> String {
    (0..n).map(|i| if w >> i & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn hamming(a: u16, b: u16) -> usize {
    (a ^ b).count_ones() as usize
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BinaryWordCode {
    pub n: usize,
    pub words: BTreeSet<u16>,
}

impl BinaryWordCode {
    pub fn parse<S: AsRef<str>>(words: &[S]) -> Result<Self> {
        let n = words.first().map(|w| w.as_ref().len()).unwrap_or(0);
        let mut set = BTreeSet::new();
        for w in words {
            let w = w.as_ref().trim();
            if w.len() != n {
                return Err(Error::Invalid(format!("word {w:?} does not have length {n}")));
            }
            if !set.insert(parse_word(w)?) {
                return Err(Error::Invalid(format!("duplicate word {w:?}")));
            }
        }
        Ok(BinaryWordCode { n, words: set })
    }

    pub fn min_distance(&self) -> Result<usize> {
        if self.words.len() < 2 {
            return Err(Error::Invalid("minimum distance needs at least two words".into()));
        }
        Ok(self
            .words
            .iter()
            .tuple_combinations()
            .map(|(&a, &b)| hamming(a, b))
            .min()
            .unwrap())
    }

    pub fn is_complement_closed(&self) -> bool {
        let mask = if self.n == 16 { u16::MAX } else { (1u16 << self.n) - 1 };
        self.words.iter().all(|w| self.words.contains(&(!w & mask)))
    }

    pub fn translate(&self, by: u16) -> Self {
        BinaryWordCode { n: self.n, words: self.words.iter().map(|w| w ^ by).collect() }
    }

    pub fn rendered(&self) -> Vec<String> {
        self.words.iter().map(|&w| render_word(self.n, w)).collect()
    }
}

/// Closed walk given by its vertex sequence (the last vertex joins the first).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleInCube {
    pub n: usize,
    pub vertices: Vec<u16>,
}

impl CycleInCube {
    pub fn parse<S: AsRef<str>>(n: usize, words: &[S]) -> Result<Self> {
        let vertices = words
            .iter()
            .map(|w| {
                let w = w.as_ref();
                if w.len() != n {
                    return Err(Error::Invalid(format!("vertex {w:?} is not in I^{n}")));
                }
                parse_word(w)
            })
            .collect::<Result<_>>()?;
        Ok(CycleInCube { n, vertices })
    }

    /// Builds the cycle from an edge set; every vertex must have degree 2 and
    /// the edges must form one cycle.
    pub fn from_edges(edges: &[FaceWord]) -> Result<Self> {
        let n = edges.first().map(|e| e.len()).ok_or_else(|| Error::Invalid("empty edge set".into()))?;
        let mut adj: BTreeMap<u16, Vec<u16>> = BTreeMap::new();
        for e in edges {
            if e.dim() != 1 || e.len() != n {
                return Err(Error::Invalid(format!("{e} is not an edge of I^{n}")));
            }
            let v = e.vertices();
            adj.entry(v[0]).or_default().push(v[1]);
            adj.entry(v[1]).or_default().push(v[0]);
        }
        if adj.values().any(|a| a.len() != 2) {
            return Err(Error::Invalid("edge set is not 2-regular".into()));
        }
        let start = *adj.keys().next().unwrap();
        let mut cycle = vec![start];
        let mut prev = start;
        let mut cur = adj[&start][0];
        while cur != start {
            cycle.push(cur);
            let next = adj[&cur].iter().copied().find(|&x| x != prev).unwrap_or(adj[&cur][0]);
            prev = cur;
            cur = next;
        }
        if cycle.len() != adj.len() {
            return Err(Error::Invalid("edge set has more than one cycle".into()));
        }
        Ok(CycleInCube { n, vertices: cycle }.canonical())
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn rendered(&self) -> Vec<String> {
        self.vertices.iter().map(|&v| render_word(self.n, v)).collect()
    }

    /// Starts at the textually least vertex and steps to its lesser neighbour.
    pub fn canonical(&self) -> Self {
        let m = self.len();
        if m == 0 {
            return self.clone();
        }
        let words = self.rendered();
        let start = (0..m).min_by(|&a, &b| words[a].cmp(&words[b])).unwrap();
        let fwd = &words[(start + 1) % m];
        let back = &words[(start + m - 1) % m];
        let vertices = if fwd <= back {
            (0..m).map(|k| self.vertices[(start + k) % m]).collect()
        } else {
            (0..m).map(|k| self.vertices[(start + m - k) % m]).collect()
        };
        CycleInCube { n: self.n, vertices }
    }

    pub fn edges(&self) -> Vec<(u16, u16)> {
        let m = self.len();
        (0..m).map(|i| (self.vertices[i], self.vertices[(i + 1) % m])).collect()
    }

    fn cycle_distance(&self, i: usize, j: usize) -> usize {
        let d = i.abs_diff(j);
        d.min(self.len() - d)
    }
}

/// Why a sequence fails to be an induced cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CycleDefect {
    TooShort,
    RepeatedVertex(String),
    NotAdjacent(String, String),
    Chord(String, String),
}

pub fn induced_cycle_defect(cycle: &CycleInCube) -> Option<CycleDefect> {
    let m = cycle.len();
    let r = |v: u16| render_word(cycle.n, v);
    if m < 4 {
        return Some(CycleDefect::TooShort);
    }
    let mut seen = BTreeSet::new();
    for &v in &cycle.vertices {
        if !seen.insert(v) {
            return Some(CycleDefect::RepeatedVertex(r(v)));
        }
    }
    for (a, b) in cycle.edges() {
        if hamming(a, b) != 1 {
            return Some(CycleDefect::NotAdjacent(r(a), r(b)));
        }
    }
    (0..m)
        .tuple_combinations()
        .find(|&(i, j)| cycle.cycle_distance(i, j) > 1 && hamming(cycle.vertices[i], cycle.vertices[j]) == 1)
        .map(|(i, j)| CycleDefect::Chord(r(cycle.vertices[i]), r(cycle.vertices[j])))
}

pub fn is_induced_cycle(n: usize, cycle: &CycleInCube) -> bool {
    cycle.n == n && cycle.vertices.iter().all(|&v| n == 16 || v >> n == 0) && induced_cycle_defect(cycle).is_none()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainCodeReport {
    pub n: usize,
    pub k: usize,
    pub holds: bool,
    pub pairs_checked: usize,
    /// First pair at cycle distance `>= k` but Hamming distance `< k`.
    pub witness: Option<(String, String)>,
}

/// Pairs at cycle distance at least `k` must be at Hamming distance at least `k`.
pub fn chain_code_check(cycle: &CycleInCube, k: usize) -> ChainCodeReport {
    let m = cycle.len();
    let mut pairs_checked = 0;
    let mut witness = None;
    for i in 0..m {
        for j in i + 1..m {
            if cycle.cycle_distance(i, j) < k {
                continue;
            }
            pairs_checked += 1;
            if witness.is_none() && hamming(cycle.vertices[i], cycle.vertices[j]) < k {
                witness = Some((render_word(cycle.n, cycle.vertices[i]), render_word(cycle.n, cycle.vertices[j])));
            }
        }
    }
    ChainCodeReport { n: cycle.n, k, holds: witness.is_none(), pairs_checked, witness }
}

/// Undirected graph on vertices of `I^n` given by edge words.
#[derive(Clone, Debug)]
pub struct CubeSubgraph {
    pub n: usize,
    pub adj: BTreeMap<u16, BTreeSet<u16>>,
}

impl CubeSubgraph {
    pub fn new(edges: &BTreeSet<FaceWord>) -> Result<Self> {
        let n = edges.iter().next().map(|e| e.len()).unwrap_or(0);
        let mut adj: BTreeMap<u16, BTreeSet<u16>> = BTreeMap::new();
        for e in edges {
            if e.dim() != 1 || e.len() != n {
                return Err(Error::Invalid(format!("{e} is not an edge of I^{n}")));
            }
            let v = e.vertices();
            adj.entry(v[0]).or_default().insert(v[1]);
            adj.entry(v[1]).or_default().insert(v[0]);
        }
        Ok(CubeSubgraph { n, adj })
    }

    /// The subgraph of the chosen edges of one chain.
    pub fn chosen(side: Side) -> Self {
        Self::new(&chosen_set(side)).expect("chosen edges are edges")
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(|a| a.len()).sum::<usize>() / 2
    }

    pub fn has_edge(&self, a: u16, b: u16) -> bool {
        self.adj.get(&a).is_some_and(|s| s.contains(&b))
    }

    pub fn vertices_of_degree(&self, d: usize) -> BTreeSet<u16> {
        self.adj.iter().filter(|(_, a)| a.len() == d).map(|(&v, _)| v).collect()
    }

    /// Distances from `src` within the subgraph.
    pub fn bfs(&self, src: u16) -> BTreeMap<u16, usize> {
        let mut dist = BTreeMap::from([(src, 0)]);
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            let d = dist[&v];
            for &w in self.adj.get(&v).into_iter().flatten() {
                if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(w) {
                    e.insert(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Edges of the cycle inside the subgraph, out of its length.
    pub fn contains_cycle(&self, cycle: &CycleInCube) -> (usize, usize) {
        let inside = cycle.edges().iter().filter(|&&(a, b)| self.has_edge(a, b)).count();
        (inside, cycle.len())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairDistances {
    pub a: String,
    pub b: String,
    /// `None` when the pair is disconnected in the subgraph.
    pub subgraph: Option<usize>,
    pub cube: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistanceAudit {
    pub vertices: usize,
    pub edges: usize,
    pub pairs: Vec<PairDistances>,
    /// `d_sub <= 2  =>  d_cube <= 2`.
    pub stated_holds: bool,
    pub stated_counterexamples: Vec<PairDistances>,
    /// `d_cube <= 2  =>  d_sub <= 2`.
    pub converse_holds: bool,
    pub converse_counterexamples: Vec<PairDistances>,
}

/// Distances over all vertex pairs covered by the subgraph, in both graphs.
pub fn subgraph_distance_audit(g: &CubeSubgraph) -> DistanceAudit {
    let verts: Vec<u16> = g.adj.keys().copied().collect();
    let mut pairs = Vec::new();
    for (i, &a) in verts.iter().enumerate() {
        let dist = g.bfs(a);
        for &b in &verts[i + 1..] {
            pairs.push(PairDistances {
                a: render_word(g.n, a),
                b: render_word(g.n, b),
                subgraph: dist.get(&b).copied(),
                cube: hamming(a, b),
            });
        }
    }
    let within = |d: Option<usize>| d.is_some_and(|d| d <= 2);
    let stated: Vec<PairDistances> =
        pairs.iter().filter(|p| within(p.subgraph) && p.cube > 2).cloned().collect();
    let converse: Vec<PairDistances> =
        pairs.iter().filter(|p| p.cube <= 2 && !within(p.subgraph)).cloned().collect();
    DistanceAudit {
        vertices: verts.len(),
        edges: g.edge_count(),
        stated_holds: stated.is_empty(),
        stated_counterexamples: stated,
        converse_holds: converse.is_empty(),
        converse_counterexamples: converse,
        pairs,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoilReport {
    pub cycle: Vec<String>,
    pub induced: bool,
    pub defect: Option<CycleDefect>,
    pub chain_code: ChainCodeReport,
    /// Cycle edges lying in the chosen-edge subgraph, out of the cycle length.
    pub edges_in_subgraph: (usize, usize),
}

pub fn coil_report(cycle: &CycleInCube, k: usize) -> CoilReport {
    CoilReport {
        cycle: cycle.rendered(),
        induced: is_induced_cycle(cycle.n, cycle),
        defect: induced_cycle_defect(cycle),
        chain_code: chain_code_check(cycle, k),
        edges_in_subgraph: CubeSubgraph::chosen(Side::Left).contains_cycle(cycle),
    }
}

pub fn reference_coil() -> CycleInCube {
    CycleInCube::parse(4, &REFERENCE_COIL).expect("valid words")
}

pub fn distance_two_code() -> BinaryWordCode {
    BinaryWordCode::parse(&DISTANCE_TWO_CODE).expect("valid words")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cyc(n: usize, w: &[&str]) -> CycleInCube {
        CycleInCube::parse(n, w).unwrap()
    }

    fn gray(n: usize) -> CycleInCube {
        CycleInCube { n, vertices: (0..1u16 << n).map(|i| i ^ (i >> 1)).collect() }
    }

    #[test]
    fn words_round_trip() {
        assert_eq!(parse_word("1000").unwrap(), 1);
        assert_eq!(render_word(4, 1), "1000");
        assert!(parse_word("10a").is_err());
    }

    #[test]
    fn reference_coil_is_induced() {
        let c = reference_coil();
        assert!(is_induced_cycle(4, &c));
        let r = chain_code_check(&c, 2);
        assert!(r.holds, "{r:?}");
        assert_eq!(r.pairs_checked, 20);
    }

    #[test]
    fn square_is_induced() {
        assert!(is_induced_cycle(2, &cyc(2, &["00", "10", "11", "01"])));
    }

    #[test]
    fn hexagons_in_the_3_cube() {
        // avoids an antipodal pair: no chord
        assert!(is_induced_cycle(3, &cyc(3, &["000", "100", "110", "111", "011", "001"])));
        let c = cyc(3, &["000", "100", "110", "010", "011", "001"]);
        assert_eq!(induced_cycle_defect(&c), Some(CycleDefect::Chord("000".into(), "010".into())));
        let r = chain_code_check(&c, 2);
        assert!(!r.holds);
        assert_eq!(r.witness, Some(("000".into(), "010".into())));
    }

    #[test]
    fn malformed_cycles() {
        assert_eq!(induced_cycle_defect(&cyc(2, &["00", "10"])), Some(CycleDefect::TooShort));
        assert!(matches!(
            induced_cycle_defect(&cyc(3, &["000", "100", "110", "000"])),
            Some(CycleDefect::RepeatedVertex(_))
        ));
        assert!(matches!(
            induced_cycle_defect(&cyc(3, &["000", "110", "111", "001"])),
            Some(CycleDefect::NotAdjacent(_, _))
        ));
        assert!(!is_induced_cycle(4, &cyc(3, &["000", "100", "110", "010"])));
    }

    #[test]
    fn hamiltonian_cycles_pass_k1() {
        for n in 2..=5 {
            assert!(chain_code_check(&gray(n), 1).holds);
        }
        assert!(!chain_code_check(&gray(4), 2).holds);
    }

    #[test]
    fn distance_two_code_properties() {
        let c = distance_two_code();
        assert_eq!(c.min_distance().unwrap(), 2);
        assert!(c.is_complement_closed());
        let ends = BinaryWordCode::parse(&["0000", "1111"]).unwrap();
        assert_eq!(ends.min_distance().unwrap(), 4);
        assert!(BinaryWordCode::parse(&["0000"]).unwrap().min_distance().is_err());
        assert!(BinaryWordCode::parse(&["000", "0000"]).is_err());
        assert!(BinaryWordCode::parse(&["01", "01"]).is_err());
    }

    #[test]
    fn code_is_the_subdivision_points() {
        for side in [Side::Left, Side::Right] {
            let g = CubeSubgraph::chosen(side);
            assert_eq!(g.edge_count(), 12);
            assert_eq!(g.adj.len(), 10);
            assert_eq!(g.vertices_of_degree(2), distance_two_code().words);
            assert_eq!(g.vertices_of_degree(3).len(), 4);
        }
    }

    #[test]
    fn coil_lies_in_the_left_subgraph() {
        let rep = coil_report(&reference_coil(), 2);
        assert_eq!(rep.edges_in_subgraph, (8, 8));
        assert_eq!(CubeSubgraph::chosen(Side::Right).contains_cycle(&reference_coil()), (0, 8));
    }

    #[test]
    fn distance_audit() {
        let a = subgraph_distance_audit(&CubeSubgraph::chosen(Side::Left));
        assert_eq!(a.pairs.len(), 45);
        assert!(a.stated_holds);
        assert!(a.pairs.iter().all(|p| p.subgraph.is_some_and(|d| d >= p.cube)));
        // the converse also holds: cube-close pairs stay close in the subgraph
        assert!(a.converse_holds, "{:?}", a.converse_counterexamples);
        let close = a.pairs.iter().filter(|p| p.cube <= 2).count();
        assert!(close > 0);
    }

    #[test]
    fn cycle_from_edges_is_canonical() {
        let c = reference_coil();
        let edges: Vec<FaceWord> = c
            .edges()
            .iter()
            .map(|&(a, b)| {
                let axis = (a ^ b).trailing_zeros() as usize;
                FaceWord::vertex(4, a).release(axis).unwrap()
            })
            .collect();
        let back = CycleInCube::from_edges(&edges).unwrap();
        assert_eq!(back, c.canonical());
        assert_eq!(back.rendered()[0], "0001");
    }

    proptest! {
        #[test]
        fn induced_is_rotation_and_reversal_invariant(rot in 0usize..8, rev: bool, flip in 0u16..16) {
            let c = reference_coil();
            let mut v: Vec<u16> = (0..8).map(|k| c.vertices[(k + rot) % 8] ^ flip).collect();
            if rev {
                v.reverse();
            }
            let moved = CycleInCube { n: 4, vertices: v };
            prop_assert!(is_induced_cycle(4, &moved));
            prop_assert!(chain_code_check(&moved, 2).holds);
            let base = CycleInCube { n: 4, vertices: c.vertices.iter().map(|v| v ^ flip).collect() };
            prop_assert_eq!(moved.canonical(), base.canonical());
        }

        #[test]
        fn min_distance_invariant(by in 0u16..16, perm in Just([0usize, 1, 2, 3]).prop_shuffle()) {
            let c = distance_two_code();
            prop_assert_eq!(c.translate(by).min_distance().unwrap(), 2);
            let permuted = BinaryWordCode {
                n: 4,
                words: c.words.iter().map(|&w| (0..4).fold(0u16, |m, i| m | ((w >> i & 1) << perm[i]))).collect(),
            };
            prop_assert_eq!(permuted.min_distance().unwrap(), 2);
        }
    }
}
