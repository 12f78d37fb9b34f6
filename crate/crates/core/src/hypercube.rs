//! Face combinatorics of the N-cube.
//!
//! A face is a word over `{0, 1, *}`; axis 0 is the leftmost symbol. The
//! incoming/outgoing orientation of a facet is decided by the rank of the
//! fixed coordinate among the face's own free axes and the alternating
//! sequence `tau = (0, 1, 0, 1, ...)`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest cube dimension accepted by [`enumerate_faces`].
pub const MAX_ENUM_DIM: usize = 8;
/// Largest cube dimension accepted by the graph constructions.
pub const MAX_GRAPH_DIM: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    Zero,
    One,
    Star,
}

impl Sym {
    pub fn as_char(self) -> char {
        match self {
            Sym::Zero => '0',
            Sym::One => '1',
            Sym::Star => '*',
        }
    }
}

/// A face of the N-cube, stored as two bit masks (free axes and fixed ones).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FaceWord {
    len: u8,
    free: u16,
    ones: u16,
}

impl FaceWord {
    pub fn new(syms: &[Sym]) -> Result<Self> {
        if syms.len() > 16 {
            return Err(Error::InvalidFaceWord(format!("length {} > 16", syms.len())));
        }
        let mut free = 0u16;
        let mut ones = 0u16;
        for (axis, s) in syms.iter().enumerate() {
            match s {
                Sym::Star => free |= 1 << axis,
                Sym::One => ones |= 1 << axis,
                Sym::Zero => {}
            }
        }
        Ok(FaceWord {
            len: syms.len() as u8,
            free,
            ones,
        })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let syms = s
            .chars()
            .map(|c| match c {
                '0' => Ok(Sym::Zero),
                '1' => Ok(Sym::One),
                '*' => Ok(Sym::Star),
                _ => Err(Error::InvalidFaceWord(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        FaceWord::new(&syms)
    }

    /// The whole cube `**...*`.
    pub fn full(len: usize) -> Self {
        FaceWord {
            len: len as u8,
            free: ((1u32 << len) - 1) as u16,
            ones: 0,
        }
    }

    /// A vertex; bit `a` of `bits` is the coordinate on axis `a`.
    pub fn vertex(len: usize, bits: u16) -> Self {
        FaceWord {
            len: len as u8,
            free: 0,
            ones: bits & (((1u32 << len) - 1) as u16),
        }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dim(&self) -> usize {
        self.free.count_ones() as usize
    }

    pub fn free_mask(&self) -> u16 {
        self.free
    }

    pub fn ones_mask(&self) -> u16 {
        self.ones
    }

    pub fn sym(&self, axis: usize) -> Sym {
        if self.free >> axis & 1 == 1 {
            Sym::Star
        } else if self.ones >> axis & 1 == 1 {
            Sym::One
        } else {
            Sym::Zero
        }
    }

    pub fn is_free(&self, axis: usize) -> bool {
        self.free >> axis & 1 == 1
    }

    pub fn free_axes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&a| self.is_free(a))
    }

    pub fn fixed_axes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&a| !self.is_free(a))
    }

    /// 1-based rank of `axis` among the free axes.
    pub fn rank_of(&self, axis: usize) -> Option<usize> {
        if !self.is_free(axis) {
            return None;
        }
        Some((self.free & ((1u16 << axis) - 1)).count_ones() as usize + 1)
    }

    pub fn axis_of_rank(&self, rank: usize) -> Option<usize> {
        self.free_axes().nth(rank.checked_sub(1)?)
    }

    /// Fix a free axis to `value`.
    pub fn fix(&self, axis: usize, value: u8) -> Option<Self> {
        if !self.is_free(axis) {
            return None;
        }
        let mut out = *self;
        out.free &= !(1 << axis);
        if value != 0 {
            out.ones |= 1 << axis;
        }
        Some(out)
    }

    /// Free a fixed axis.
    pub fn release(&self, axis: usize) -> Option<Self> {
        if axis >= self.len() || self.is_free(axis) {
            return None;
        }
        let mut out = *self;
        out.free |= 1 << axis;
        out.ones &= !(1 << axis);
        Some(out)
    }

    pub fn value(&self, axis: usize) -> Option<u8> {
        if self.is_free(axis) || axis >= self.len() {
            None
        } else {
            Some((self.ones >> axis & 1) as u8)
        }
    }

    /// All facets, ordered by rank of the fixed axis, then value.
    pub fn facets(&self) -> Vec<FaceWord> {
        self.free_axes()
            .flat_map(|a| [self.fix(a, 0).unwrap(), self.fix(a, 1).unwrap()])
            .collect()
    }

    /// All faces of one dimension more that contain this face.
    pub fn parents(&self) -> Vec<FaceWord> {
        self.fixed_axes().map(|a| self.release(a).unwrap()).collect()
    }

    /// If `facet` is a facet of `self`, the axis it fixes and the value.
    pub fn facet_coordinate(&self, facet: &FaceWord) -> Option<(usize, u8)> {
        if facet.len != self.len || facet.dim() + 1 != self.dim() {
            return None;
        }
        let diff = self.free & !facet.free;
        if diff.count_ones() != 1 || facet.free & !self.free != 0 {
            return None;
        }
        let keep = !self.free;
        if (self.ones & keep) != (facet.ones & keep) {
            return None;
        }
        let axis = diff.trailing_zeros() as usize;
        Some((axis, (facet.ones >> axis & 1) as u8))
    }

    /// Face containment (`other` is a face of `self`).
    pub fn contains(&self, other: &FaceWord) -> bool {
        if self.len != other.len || other.free & !self.free != 0 {
            return false;
        }
        let keep = !self.free;
        (self.ones & keep) == (other.ones & keep)
    }

    pub fn contains_vertex(&self, bits: u16) -> bool {
        let keep = !self.free & (((1u32 << self.len) - 1) as u16);
        bits & keep == self.ones & keep
    }

    /// Vertex bit patterns of the face.
    pub fn vertices(&self) -> Vec<u16> {
        let axes: Vec<usize> = self.free_axes().collect();
        (0..1u32 << axes.len())
            .map(|m| {
                let mut v = self.ones;
                for (i, &a) in axes.iter().enumerate() {
                    if m >> i & 1 == 1 {
                        v |= 1 << a;
                    }
                }
                v
            })
            .collect()
    }

    /// Apply an axis permutation: the symbol on axis `a` moves to `perm[a]`.
    pub fn permute_axes(&self, perm: &[usize]) -> FaceWord {
        let mut syms = vec![Sym::Zero; self.len()];
        for (a, &p) in perm.iter().enumerate().take(self.len()) {
            syms[p] = self.sym(a);
        }
        FaceWord::new(&syms).unwrap()
    }

    /// Index reversal `a -> len-1-a`.
    pub fn reversed(&self) -> FaceWord {
        let perm: Vec<usize> = (0..self.len()).rev().collect();
        self.permute_axes(&perm)
    }

    /// Drop the fixed axes of `cube`, giving this face in cube-local coordinates.
    pub fn localize(&self, cube: &FaceWord) -> Option<FaceWord> {
        if !cube.contains(self) {
            return None;
        }
        let syms: Vec<Sym> = cube.free_axes().map(|a| self.sym(a)).collect();
        FaceWord::new(&syms).ok()
    }

    /// Inverse of [`FaceWord::localize`].
    pub fn globalize(&self, cube: &FaceWord) -> Option<FaceWord> {
        if self.len() != cube.dim() {
            return None;
        }
        let mut syms: Vec<Sym> = (0..cube.len()).map(|a| cube.sym(a)).collect();
        for (local, axis) in cube.free_axes().enumerate() {
            syms[axis] = self.sym(local);
        }
        FaceWord::new(&syms).ok()
    }
}

impl Ord for FaceWord {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.len().min(other.len());
        for a in 0..n {
            match self.sym(a).cmp(&other.sym(a)) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for FaceWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FaceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in 0..self.len() {
            write!(f, "{}", self.sym(a).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for FaceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FaceWord({self})")
    }
}

impl FromStr for FaceWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FaceWord::parse(s)
    }
}

impl Serialize for FaceWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FaceWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        FaceWord::parse(&s).map_err(serde::de::Error::custom)
    }
}

fn check_range(what: &'static str, value: usize, min: usize, max: usize) -> Result<()> {
    if value < min || value > max {
        Err(Error::DimensionOutOfRange {
            what,
            value,
            min,
            max,
        })
    } else {
        Ok(())
    }
}

/// All faces of dimension `k` of the `n`-cube, in canonical text order.
pub fn enumerate_faces(n: usize, k: usize) -> Result<Vec<FaceWord>> {
    check_range("cube dimension", n, 0, MAX_ENUM_DIM)?;
    check_range("face dimension", k, 0, n)?;
    let mut out = Vec::new();
    for free in 0u32..1 << n {
        if free.count_ones() as usize != k {
            continue;
        }
        let fixed = !free & ((1 << n) - 1);
        // iterate subsets of fixed
        let mut sub = fixed;
        loop {
            out.push(FaceWord {
                len: n as u8,
                free: free as u16,
                ones: sub as u16,
            });
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & fixed;
        }
    }
    out.sort();
    Ok(out)
}

/// `tau(r)` for a 1-based rank: 0 on odd ranks, 1 on even ranks.
pub fn tau(rank: usize) -> u8 {
    if rank % 2 == 1 {
        0
    } else {
        1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Incoming,
    Outgoing,
}

pub fn orientation(face: &FaceWord, facet: &FaceWord) -> Result<Orientation> {
    let (axis, value) = face.facet_coordinate(facet).ok_or_else(|| Error::NotAFacet {
        face: face.to_string(),
        facet: facet.to_string(),
    })?;
    let rank = face.rank_of(axis).expect("fixed axis is free in face");
    Ok(if value == tau(rank) {
        Orientation::Incoming
    } else {
        Orientation::Outgoing
    })
}

/// Incoming facets in leg order: descending rank of the fixed coordinate.
///
/// Leg `j` of the incoming list and leg `j` of [`outgoing_facets`] fix the
/// same axis, so they share an ambient slot.
pub fn incoming_facets(face: &FaceWord) -> Vec<FaceWord> {
    let axes: Vec<usize> = face.free_axes().collect();
    (1..=axes.len())
        .rev()
        .map(|r| face.fix(axes[r - 1], tau(r)).unwrap())
        .collect()
}

pub fn outgoing_facets(face: &FaceWord) -> Vec<FaceWord> {
    let axes: Vec<usize> = face.free_axes().collect();
    (1..=axes.len())
        .rev()
        .map(|r| face.fix(axes[r - 1], 1 - tau(r)).unwrap())
        .collect()
}

/// Order of facets inside one face color `(i_1..i_k, o_1..o_k)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FacetOrder {
    /// Ascending rank of the fixed coordinate within each block.
    #[default]
    Ascending,
    Descending,
}

/// The `2k` facets of a face in face-color order: incoming block, then outgoing.
pub fn face_color_facets(face: &FaceWord, order: FacetOrder) -> Vec<FaceWord> {
    let axes: Vec<usize> = face.free_axes().collect();
    let ranks: Vec<usize> = match order {
        FacetOrder::Ascending => (1..=axes.len()).collect(),
        FacetOrder::Descending => (1..=axes.len()).rev().collect(),
    };
    let mut out: Vec<FaceWord> = ranks
        .iter()
        .map(|&r| face.fix(axes[r - 1], tau(r)).unwrap())
        .collect();
    out.extend(
        ranks
            .iter()
            .map(|&r| face.fix(axes[r - 1], 1 - tau(r)).unwrap()),
    );
    out
}

pub fn is_absolutely_incoming(n: usize, f: &FaceWord) -> bool {
    f.len() == n
        && f.dim() < n
        && f.parents()
            .iter()
            .all(|p| orientation(p, f).unwrap() == Orientation::Incoming)
}

pub fn is_absolutely_outgoing(n: usize, f: &FaceWord) -> bool {
    f.len() == n
        && f.dim() < n
        && f.parents()
            .iter()
            .all(|p| orientation(p, f).unwrap() == Orientation::Outgoing)
}

/// Closed-form absolutely-incoming pattern: the t-th fixed position `j_t`
/// (1-based, ascending) carries `tau(j_t - (t - 1))`.
pub fn matches_tau_pattern(f: &FaceWord) -> bool {
    f.fixed_axes()
        .enumerate()
        .all(|(t, axis)| f.value(axis) == Some(tau(axis + 1 - t)))
}

/// Faces (of any dimension below `n`) where the rank-based definition and
/// the closed-form pattern disagree.
pub fn tau_pattern_divergences(n: usize) -> Result<Vec<FaceWord>> {
    check_range("cube dimension", n, 1, MAX_GRAPH_DIM)?;
    let mut out = Vec::new();
    for k in 0..n {
        for f in enumerate_faces(n, k)? {
            if is_absolutely_incoming(n, &f) != matches_tau_pattern(&f) {
                out.push(f);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphEdge {
    pub from: FaceWord,
    pub to: FaceWord,
    pub via: Option<FaceWord>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FaceGraph {
    pub vertices: Vec<FaceWord>,
    pub edges: Vec<GraphEdge>,
}

impl FaceGraph {
    /// Weakly connected components, each sorted; components ordered by first vertex.
    pub fn weak_components(&self) -> Vec<Vec<FaceWord>> {
        let index: HashMap<FaceWord, usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (*v, i))
            .collect();
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut c = x;
            while p[c] != r {
                let next = p[c];
                p[c] = r;
                c = next;
            }
            r
        }
        for e in &self.edges {
            let a = find(&mut parent, index[&e.from]);
            let b = find(&mut parent, index[&e.to]);
            if a != b {
                parent[a] = b;
            }
        }
        let mut groups: BTreeMap<usize, Vec<FaceWord>> = BTreeMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(*v);
        }
        let mut comps: Vec<Vec<FaceWord>> = groups
            .into_values()
            .map(|mut c| {
                c.sort();
                c
            })
            .collect();
        comps.sort();
        comps
    }

    pub fn has_edge(&self, from: &FaceWord, to: &FaceWord) -> bool {
        self.edges.iter().any(|e| &e.from == from && &e.to == to)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("graph serializes")
    }
}

/// One of the two simplices of `G_{n+1}`, with its vertices in chain order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimplexComponent {
    pub chain: Vec<FaceWord>,
    pub is_tournament: bool,
    pub is_transitive: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentDecomposition {
    pub n: usize,
    pub graph: FaceGraph,
    pub components: usize,
    pub left: SimplexComponent,
    pub right: SimplexComponent,
}

/// Expected left chain: facet k fixes axis k to `tau(k)`.
pub fn expected_left_chain(n: usize) -> Vec<FaceWord> {
    let cube = FaceWord::full(n + 1);
    (0..=n).map(|a| cube.fix(a, tau(a + 1)).unwrap()).collect()
}

/// Expected right chain in flow order: last axis first, fixed to `1 - tau`.
pub fn expected_right_chain(n: usize) -> Vec<FaceWord> {
    let cube = FaceWord::full(n + 1);
    (0..=n)
        .rev()
        .map(|a| cube.fix(a, 1 - tau(a + 1)).unwrap())
        .collect()
}

fn tournament_order(graph: &FaceGraph, comp: &[FaceWord]) -> SimplexComponent {
    let mut is_tournament = true;
    let mut outdeg: BTreeMap<FaceWord, usize> = comp.iter().map(|v| (*v, 0)).collect();
    for (i, a) in comp.iter().enumerate() {
        for b in &comp[i + 1..] {
            let ab = graph.has_edge(a, b);
            let ba = graph.has_edge(b, a);
            if ab == ba {
                is_tournament = false;
            }
            if ab {
                *outdeg.get_mut(a).unwrap() += 1;
            }
            if ba {
                *outdeg.get_mut(b).unwrap() += 1;
            }
        }
    }
    let mut chain: Vec<FaceWord> = comp.to_vec();
    chain.sort_by(|a, b| outdeg[b].cmp(&outdeg[a]).then(a.cmp(b)));
    // transitive iff the out-degrees are k-1, k-2, ..., 0 and every edge goes forward
    let k = chain.len();
    let degrees_ok = chain.iter().enumerate().all(|(i, v)| outdeg[v] == k - 1 - i);
    let forward_ok = chain
        .iter()
        .enumerate()
        .all(|(i, a)| chain[i + 1..].iter().all(|b| graph.has_edge(a, b)));
    SimplexComponent {
        chain,
        is_tournament,
        is_transitive: is_tournament && degrees_ok && forward_ok,
    }
}

/// The facet graph `G_{n+1}` of the (n+1)-cube and its two simplices.
pub fn component_graph(n: usize) -> Result<ComponentDecomposition> {
    check_range("simplex level", n, 1, 5)?;
    let vertices = enumerate_faces(n + 1, n)?;
    let mut edges = Vec::new();
    for (i, a) in vertices.iter().enumerate() {
        for b in &vertices[i + 1..] {
            let shared = match intersection(a, b) {
                Some(f) if f.dim() + 1 == n => f,
                _ => continue,
            };
            let oa = orientation(a, &shared)?;
            let ob = orientation(b, &shared)?;
            match (oa, ob) {
                (Orientation::Outgoing, Orientation::Incoming) => edges.push(GraphEdge {
                    from: *a,
                    to: *b,
                    via: Some(shared),
                }),
                (Orientation::Incoming, Orientation::Outgoing) => edges.push(GraphEdge {
                    from: *b,
                    to: *a,
                    via: Some(shared),
                }),
                _ => {}
            }
        }
    }
    let graph = FaceGraph { vertices, edges };
    let comps = graph.weak_components();
    let left_start = FaceWord::full(n + 1).fix(0, 0).unwrap();
    let mut left = None;
    let mut right = None;
    for c in &comps {
        let sc = tournament_order(&graph, c);
        if c.contains(&left_start) {
            left = Some(sc);
        } else {
            right = Some(sc);
        }
    }
    let missing = || Error::Structural(format!("G_{} does not split into two components", n + 1));
    Ok(ComponentDecomposition {
        n,
        components: comps.len(),
        left: left.ok_or_else(missing)?,
        right: right.ok_or_else(missing)?,
        graph,
    })
}

/// Intersection of two faces of the same cube, if nonempty.
pub fn intersection(a: &FaceWord, b: &FaceWord) -> Option<FaceWord> {
    if a.len != b.len {
        return None;
    }
    let both_fixed = !a.free & !b.free;
    if (a.ones ^ b.ones) & both_fixed != 0 {
        return None;
    }
    Some(FaceWord {
        len: a.len,
        free: a.free & b.free,
        ones: (a.ones & !a.free) | (b.ones & !b.free),
    })
}

/// Tie-breaking rule for topological orders.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TieBreak {
    /// Smallest canonical text first.
    #[default]
    Forward,
    /// Largest canonical text first.
    Reverse,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowGraph {
    pub cube_dim: usize,
    pub face_dim: usize,
    pub graph: FaceGraph,
    pub order: Vec<FaceWord>,
}

/// The graph on (n-1)-faces and n-faces of the N-cube: facet -> face when the
/// facet is incoming, face -> facet when outgoing. Fails with a witness cycle.
pub fn flow_graph(cube_dim: usize, n: usize, tie: TieBreak) -> Result<FlowGraph> {
    check_range("cube dimension", cube_dim, 1, MAX_GRAPH_DIM)?;
    check_range("face dimension", n, 1, cube_dim)?;
    let mut vertices = enumerate_faces(cube_dim, n - 1)?;
    let faces = enumerate_faces(cube_dim, n)?;
    vertices.extend(faces.iter().copied());
    vertices.sort();
    let mut edges = Vec::new();
    for g in &faces {
        for f in g.facets() {
            match orientation(g, &f)? {
                Orientation::Incoming => edges.push(GraphEdge {
                    from: f,
                    to: *g,
                    via: None,
                }),
                Orientation::Outgoing => edges.push(GraphEdge {
                    from: *g,
                    to: f,
                    via: None,
                }),
            }
        }
    }
    let graph = FaceGraph { vertices, edges };
    let order = topological_order(&graph, tie)?;
    Ok(FlowGraph {
        cube_dim,
        face_dim: n,
        graph,
        order,
    })
}

/// Kahn's algorithm with deterministic tie-breaking; on failure returns a cycle.
pub fn topological_order(graph: &FaceGraph, tie: TieBreak) -> Result<Vec<FaceWord>> {
    let mut indeg: BTreeMap<FaceWord, usize> = graph.vertices.iter().map(|v| (*v, 0)).collect();
    let mut succ: HashMap<FaceWord, Vec<FaceWord>> = HashMap::new();
    for e in &graph.edges {
        *indeg.get_mut(&e.to).expect("edge endpoint is a vertex") += 1;
        succ.entry(e.from).or_default().push(e.to);
    }
    let mut ready: BTreeSet<FaceWord> = indeg
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(v, _)| *v)
        .collect();
    let mut order = Vec::with_capacity(graph.vertices.len());
    while let Some(v) = match tie {
        TieBreak::Forward => ready.pop_first(),
        TieBreak::Reverse => ready.pop_last(),
    } {
        order.push(v);
        for w in succ.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            let d = indeg.get_mut(w).unwrap();
            *d -= 1;
            if *d == 0 {
                ready.insert(*w);
            }
        }
    }
    if order.len() == graph.vertices.len() {
        return Ok(order);
    }
    // walk backwards along remaining in-edges until a vertex repeats
    let remaining: BTreeSet<FaceWord> = indeg
        .iter()
        .filter(|(_, &d)| d > 0)
        .map(|(v, _)| *v)
        .collect();
    let mut pred: HashMap<FaceWord, FaceWord> = HashMap::new();
    for e in &graph.edges {
        if remaining.contains(&e.from) && remaining.contains(&e.to) {
            pred.entry(e.to).or_insert(e.from);
        }
    }
    let mut seen: Vec<FaceWord> = Vec::new();
    let mut cur = *remaining.iter().next().unwrap();
    while !seen.contains(&cur) {
        seen.push(cur);
        cur = pred[&cur];
    }
    let start = seen.iter().position(|v| *v == cur).unwrap();
    let mut cycle: Vec<String> = seen[start..].iter().rev().map(|v| v.to_string()).collect();
    cycle.push(cycle[0].clone());
    Err(Error::Cycle(cycle))
}

/// Facet classes of the k-th term of the left chain of the (n+1)-cube.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub k: usize,
    pub facet: FaceWord,
    pub absolutely_incoming: usize,
    pub inner_incoming: usize,
    pub absolutely_outgoing: usize,
    pub inner_outgoing: usize,
}

impl CensusRow {
    pub fn counts(&self) -> (usize, usize, usize, usize) {
        (
            self.absolutely_incoming,
            self.inner_incoming,
            self.absolutely_outgoing,
            self.inner_outgoing,
        )
    }
}

pub fn i_configuration_census(n: usize) -> Result<Vec<CensusRow>> {
    check_range("simplex level", n, 1, 5)?;
    let cube = n + 1;
    let mut rows = Vec::new();
    for (i, g) in expected_left_chain(n).into_iter().enumerate() {
        let k = i + 1;
        let inc = incoming_facets(&g);
        let out = outgoing_facets(&g);
        let abs_in = inc.iter().filter(|f| is_absolutely_incoming(cube, f)).count();
        let abs_out = out.iter().filter(|f| is_absolutely_outgoing(cube, f)).count();
        let row = CensusRow {
            k,
            facet: g,
            absolutely_incoming: abs_in,
            inner_incoming: inc.len() - abs_in,
            absolutely_outgoing: abs_out,
            inner_outgoing: out.len() - abs_out,
        };
        let expected = (n + 1 - k, k - 1, k - 1, n + 1 - k);
        if row.counts() != expected {
            return Err(Error::Structural(format!(
                "census of term {k} ({g}) is {:?}, expected {:?}",
                row.counts(),
                expected
            )));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Ambient slot layout of the n-simplex equation on the (n+1)-cube.
///
/// Slots are the (n-1)-subsets of axes (the free directions of the
/// (n-1)-faces), numbered in colexicographic order; each facet's operator is
/// bound to the slots of its incoming facets in leg order.
#[derive(Clone, Debug, Serialize)]
pub struct SimplexLayout {
    pub n: usize,
    /// Free-axis masks of the slots, in slot order.
    pub slots: Vec<u16>,
    /// Left chain in application order (first applied first).
    pub left: Vec<(FaceWord, Vec<usize>)>,
    /// Right chain in application order.
    pub right: Vec<(FaceWord, Vec<usize>)>,
}

impl SimplexLayout {
    pub fn new(n: usize) -> Result<Self> {
        let dec = component_graph(n)?;
        let mut slots: Vec<u16> = enumerate_faces(n + 1, n - 1)?
            .iter()
            .map(|f| f.free_mask())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        slots.sort();
        let slot_of = |f: &FaceWord| slots.iter().position(|&m| m == f.free_mask()).unwrap();
        let bind = |g: &FaceWord| -> Result<Vec<usize>> {
            let ins: Vec<usize> = incoming_facets(g).iter().map(slot_of).collect();
            let outs: Vec<usize> = outgoing_facets(g).iter().map(slot_of).collect();
            if ins != outs {
                return Err(Error::Binding(format!("facet {g}: in/out slots differ")));
            }
            Ok(ins)
        };
        let left = dec
            .left
            .chain
            .iter()
            .map(|g| Ok((*g, bind(g)?)))
            .collect::<Result<Vec<_>>>()?;
        let right = dec
            .right
            .chain
            .iter()
            .map(|g| Ok((*g, bind(g)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(SimplexLayout {
            n,
            slots,
            left,
            right,
        })
    }

    /// Slot of a free-direction set given as 1-based axes.
    pub fn slot_of_directions(&self, dirs: &[usize]) -> Option<usize> {
        let mask = dirs.iter().fold(0u16, |m, &d| m | 1 << (d - 1));
        self.slots.iter().position(|&m| m == mask)
    }

    /// Slot permutation induced by the axis reversal `a -> n - a`.
    pub fn reversal_on_slots(&self) -> Vec<usize> {
        let len = self.n + 1;
        self.slots
            .iter()
            .map(|&m| {
                let rev = (0..len).fold(0u16, |acc, a| {
                    if m >> a & 1 == 1 {
                        acc | 1 << (len - 1 - a)
                    } else {
                        acc
                    }
                });
                self.slots.iter().position(|&x| x == rev).unwrap()
            })
            .collect()
    }

    /// Written form: rightmost factor applies first.
    pub fn written(chain: &[(FaceWord, Vec<usize>)]) -> Vec<String> {
        chain
            .iter()
            .rev()
            .map(|(g, s)| {
                let ids: String = s.iter().map(|i| (i + 1).to_string()).collect();
                format!("{g}_{ids}")
            })
            .collect()
    }
}
