//! Edge combinatorics of the 4-cube, the chosen-edge tables, the spectral
//! weight matrix `W` and the twisted tetrahedron equation.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypercube::{
    enumerate_faces, face_color_facets, incoming_facets, outgoing_facets, tau, FaceWord, FacetOrder,
    Orientation, SimplexLayout,
};
use crate::recursion::{simplex_chains, Lifted};
use crate::scalar::{Laurent, Ring};
use crate::tensor::{check_equation, AmbientChain, EquationReport, SparseOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    Left,
    Right,
}

/// Cubes of the left and right chains in application order.
pub const LEFT_CUBES: [&str; 4] = ["0***", "*1**", "**0*", "***1"];
pub const RIGHT_CUBES: [&str; 4] = ["***0", "**1*", "*0**", "1***"];

/// Edges of each cube that both chains cover, as printed (column per cube).
const SHARED_LEFT: [[&str; 6]; 4] = [
    ["001*", "000*", "00*0", "01*0", "0*10", "0*11"],
    ["111*", "011*", "11*0", "11*1", "*110", "*100"],
    ["100*", "110*", "1*00", "0*00", "*000", "*001"],
    ["10*1", "00*1", "1*11", "1*01", "*011", "*111"],
];
const SHARED_RIGHT: [[&str; 6]; 4] = [
    ["*100", "*110", "0*00", "1*00", "01*0", "00*0"],
    ["*111", "*011", "0*11", "0*10", "011*", "111*"],
    ["*001", "*000", "00*1", "10*1", "000*", "001*"],
    ["1*01", "1*11", "11*1", "11*0", "110*", "100*"],
];

/// Chosen edges per cube, in printed row order.
const CHOSEN_LEFT: [[&str; 3]; 4] = [
    ["01*0", "000*", "0*11"],
    ["011*", "*100", "11*1"],
    ["0*00", "110*", "*001"],
    ["00*1", "*111", "1*01"],
];
const CHOSEN_RIGHT: [[&str; 3]; 4] = [
    ["1*00", "00*0", "*110"],
    ["0*10", "111*", "*011"],
    ["001*", "*000", "10*1"],
    ["100*", "1*11", "11*0"],
];

fn fw(s: &str) -> FaceWord {
    FaceWord::parse(s).expect("table entry")
}

pub fn chain_cubes(side: Side) -> Vec<FaceWord> {
    match side {
        Side::Left => LEFT_CUBES.iter().map(|s| fw(s)).collect(),
        Side::Right => RIGHT_CUBES.iter().map(|s| fw(s)).collect(),
    }
}

fn cube_position(cube: &FaceWord, side: Side) -> Result<usize> {
    chain_cubes(side)
        .iter()
        .position(|c| c == cube)
        .ok_or_else(|| Error::NotInChain {
            cube: cube.to_string(),
            side: format!("{side:?}"),
        })
}

/// Printed shared-edge column of a chain cube.
pub fn printed_shared(cube: &FaceWord, side: Side) -> Result<Vec<FaceWord>> {
    let k = cube_position(cube, side)?;
    let col = match side {
        Side::Left => SHARED_LEFT[k],
        Side::Right => SHARED_RIGHT[k],
    };
    Ok(col.iter().map(|s| fw(s)).collect())
}

/// The three chosen edges of a chain cube, in printed order.
pub fn chosen_edges(cube: &FaceWord, side: Side) -> Result<Vec<FaceWord>> {
    let k = cube_position(cube, side)?;
    let col = match side {
        Side::Left => CHOSEN_LEFT[k],
        Side::Right => CHOSEN_RIGHT[k],
    };
    Ok(col.iter().map(|s| fw(s)).collect())
}

pub fn chosen_set(side: Side) -> BTreeSet<FaceWord> {
    chain_cubes(side)
        .iter()
        .flat_map(|c| chosen_edges(c, side).unwrap())
        .collect()
}

fn cube_edges(cube: &FaceWord) -> Vec<FaceWord> {
    enumerate_faces(4, 1)
        .unwrap()
        .into_iter()
        .filter(|e| cube.contains(e))
        .collect()
}

/// Edges covered by both chains. Per cube, a chain holds the shared edges no
/// other cube of that chain contains, plus its own chosen edges; every shared
/// edge lying in two cubes of a chain is chosen by exactly one of them.
#[derive(Clone, Debug, Serialize)]
pub struct SharedEdges {
    pub all: BTreeSet<FaceWord>,
    pub left: Vec<(FaceWord, BTreeSet<FaceWord>)>,
    pub right: Vec<(FaceWord, BTreeSet<FaceWord>)>,
}

pub fn shared_edges() -> SharedEdges {
    let cover = |side: Side| -> BTreeSet<FaceWord> { chain_cubes(side).iter().flat_map(cube_edges).collect() };
    let l = cover(Side::Left);
    let r = cover(Side::Right);
    let all: BTreeSet<FaceWord> = l.intersection(&r).copied().collect();
    let per = |side: Side| {
        let cubes = chain_cubes(side);
        cubes
            .iter()
            .map(|c| {
                let chosen = chosen_edges(c, side).unwrap();
                let set = cube_edges(c)
                    .into_iter()
                    .filter(|e| all.contains(e))
                    .filter(|e| chosen.contains(e) || cubes.iter().filter(|d| d.contains(e)).count() == 1)
                    .collect();
                (*c, set)
            })
            .collect()
    };
    SharedEdges {
        left: per(Side::Left),
        right: per(Side::Right),
        all,
    }
}

/// Free axes of a cube as 1-based positions.
pub fn directions(cube: &FaceWord) -> Vec<usize> {
    cube.free_axes().map(|a| a + 1).collect()
}

/// Chosen edges in cube-local coordinates for a direction triple, read from
/// the left chain (the right chain agrees; see the structural audit).
pub fn local_choice(dirs: &[usize]) -> Result<Vec<FaceWord>> {
    let cube = chain_cubes(Side::Left)
        .into_iter()
        .find(|c| directions(c) == dirs)
        .ok_or_else(|| Error::Invalid(format!("no chain cube with directions {dirs:?}")))?;
    Ok(chosen_edges(&cube, Side::Left)?
        .iter()
        .map(|e| e.localize(&cube).unwrap())
        .collect())
}

/// The chosen edge inside each 2-face of the local 3-cube.
pub fn face_edge_map(local: &[FaceWord]) -> Result<BTreeMap<FaceWord, FaceWord>> {
    let mut m = BTreeMap::new();
    for f in enumerate_faces(3, 2)? {
        let hits: Vec<&FaceWord> = local.iter().filter(|e| f.contains(e)).collect();
        if hits.len() != 1 {
            return Err(Error::Structural(format!("face {f} holds {} chosen edges", hits.len())));
        }
        m.insert(f, *hits[0]);
    }
    Ok(m)
}

// ---------------------------------------------------------------- formula

/// How the edge-choice symbols are read off faces and edges. Every flag adds
/// one to the quantity modulo 2, except where noted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Convention {
    pub m_shift: bool,
    pub n_shift: bool,
    pub i_shift: bool,
    pub j_shift: bool,
    pub k_shift: bool,
    pub d_flip: bool,
    pub l_flip: bool,
    /// `s` is the in/out direction of the edge rather than its value.
    pub s_direction: bool,
    pub s_flip: bool,
    /// Face positions `m, n` counted among all four axes instead of the cube's.
    pub absolute_face_positions: bool,
    /// `d` is the value of the face's fixed coordinate rather than its orientation.
    pub d_value: bool,
}

impl Convention {
    pub fn all() -> Vec<Convention> {
        (0u32..1 << 11)
            .map(|b| {
                let f = |k: u32| b >> k & 1 == 1;
                Convention {
                    m_shift: f(0),
                    n_shift: f(1),
                    i_shift: f(2),
                    j_shift: f(3),
                    k_shift: f(4),
                    d_flip: f(5),
                    l_flip: f(6),
                    s_direction: f(7),
                    s_flip: f(8),
                    absolute_face_positions: f(9),
                    d_value: f(10),
                }
            })
            .collect()
    }

    /// The literal reading: parameters as printed, `s` the fixed value.
    pub fn literal() -> Convention {
        Convention::all()[0]
    }
}

/// The edge-choice pair `(l, s)`, modulo 2.
pub fn edge_choice_formula(m: u8, n: u8, d: u8, i: u8, j: u8, k: u8) -> (u8, u8) {
    let l = m * (i + j + 1) + n * (j + k + 1) + (i + j + d);
    let s = m * ((d + 1) * (i + j) + 1) + n * (d * (j + k) + 1) + (d * (i + j) + (j + k) + 1);
    (l % 2, s % 2)
}

/// The edge of `face` (a 2-face of chain cube `cube`) picked by the formula.
pub fn formula_edge(cube: &FaceWord, face: &FaceWord, conv: Convention) -> Result<FaceWord> {
    let dirs = directions(cube);
    let (i, j, k) = (dirs[0], dirs[1] - 1, dirs[2] - 2);
    let axes: Vec<usize> = face.free_axes().collect();
    let (p, q) = if conv.absolute_face_positions {
        (axes[0] + 1, axes[1] + 1)
    } else {
        (cube.rank_of(axes[0]).unwrap(), cube.rank_of(axes[1]).unwrap())
    };
    let (m, n) = (p, q - 1);
    let d = if conv.d_value {
        cube.facet_coordinate(face).unwrap().1 as usize
    } else {
        match crate::hypercube::orientation(cube, face)? {
            Orientation::Incoming => 0,
            Orientation::Outgoing => 1,
        }
    };
    let b = |x: usize, flip: bool| ((x % 2) as u8) ^ flip as u8;
    let (l, s) = edge_choice_formula(
        b(m, conv.m_shift),
        b(n, conv.n_shift),
        b(d, conv.d_flip),
        b(i, conv.i_shift),
        b(j, conv.j_shift),
        b(k, conv.k_shift),
    );
    let l = (l ^ conv.l_flip as u8) as usize;
    let s = s ^ conv.s_flip as u8;
    let value = if conv.s_direction {
        // s = 0: incoming edge of the face
        tau(l + 1) ^ s
    } else {
        s
    };
    Ok(face.fix(axes[l], value).unwrap())
}

#[derive(Clone, Debug, Serialize)]
pub struct CalibrationReport {
    pub conventions_tried: usize,
    pub faces_per_convention: usize,
    pub matching: Vec<Convention>,
    pub best_mismatches: usize,
    pub best: Vec<Convention>,
    /// Mismatching faces of the first best convention.
    pub best_witness: Vec<FaceMismatch>,
}

impl CalibrationReport {
    pub fn reproduced(&self) -> bool {
        !self.matching.is_empty()
    }
}

/// (side, cube, face, table edge, formula edge).
pub type FaceMismatch = (Side, String, String, String, String);

fn convention_mismatches(conv: Convention) -> Result<Vec<FaceMismatch>> {
    let mut bad = Vec::new();
    for side in [Side::Left, Side::Right] {
        for cube in chain_cubes(side) {
            let chosen = chosen_edges(&cube, side)?;
            for face in enumerate_faces(4, 2)?.into_iter().filter(|f| cube.contains(f)) {
                let table: Vec<&FaceWord> = chosen.iter().filter(|e| face.contains(e)).collect();
                let got = formula_edge(&cube, &face, conv)?;
                if table.len() != 1 || *table[0] != got {
                    bad.push((
                        side,
                        cube.to_string(),
                        face.to_string(),
                        table.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","),
                        got.to_string(),
                    ));
                }
            }
        }
    }
    Ok(bad)
}

/// Search every convention and keep those reproducing both tables.
pub fn calibrate_formula() -> Result<CalibrationReport> {
    let convs = Convention::all();
    let scored: Vec<(Convention, usize)> = convs
        .par_iter()
        .map(|&c| Ok((c, convention_mismatches(c)?.len())))
        .collect::<Result<_>>()?;
    let best_mismatches = scored.iter().map(|x| x.1).min().unwrap_or(0);
    let best: Vec<Convention> = scored.iter().filter(|x| x.1 == best_mismatches).map(|x| x.0).collect();
    let matching = if best_mismatches == 0 { best.clone() } else { Vec::new() };
    let best_witness = convention_mismatches(best[0])?;
    Ok(CalibrationReport {
        conventions_tried: convs.len(),
        faces_per_convention: 48,
        matching,
        best_mismatches,
        best,
        best_witness,
    })
}

// ---------------------------------------------------------------- audit

#[derive(Clone, Debug, Serialize)]
pub struct PropertyCheck {
    pub name: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertiesReport {
    pub checks: Vec<PropertyCheck>,
    /// Cubes whose chosen edges are pairwise vertex-disjoint.
    pub pairwise_non_adjacent: BTreeMap<String, bool>,
}

impl PropertiesReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn adjacent(a: &FaceWord, b: &FaceWord) -> bool {
    let va = a.vertices();
    b.vertices().iter().any(|v| va.contains(v))
}

fn dominates(set: &[FaceWord], edges: &[FaceWord]) -> bool {
    edges.iter().all(|e| set.iter().any(|s| adjacent(s, e)))
}

fn check(name: &str, witness: Option<String>) -> PropertyCheck {
    PropertyCheck {
        name: name.into(),
        holds: witness.is_none(),
        witness,
    }
}

pub fn structural_properties_audit() -> Result<PropertiesReport> {
    let mut checks = Vec::new();

    // the choice depends only on the direction triple
    let mut w = None;
    for l in chain_cubes(Side::Left) {
        let r = chain_cubes(Side::Right)
            .into_iter()
            .find(|r| r.free_mask() == l.free_mask())
            .unwrap();
        let loc = |c: &FaceWord, s: Side| -> BTreeSet<FaceWord> {
            chosen_edges(c, s).unwrap().iter().map(|e| e.localize(c).unwrap()).collect()
        };
        if loc(&l, Side::Left) != loc(&r, Side::Right) {
            w.get_or_insert(format!("{l} and {r} choose different local edges"));
        }
    }
    checks.push(check("direction_only", w));

    // three different directions per cube
    let mut w = None;
    for side in [Side::Left, Side::Right] {
        for c in chain_cubes(side) {
            let e = chosen_edges(&c, side)?;
            let masks: BTreeSet<u16> = e.iter().map(|x| x.free_mask()).collect();
            if masks.len() != 3 || e.iter().any(|x| !c.contains(x)) {
                w.get_or_insert(format!("{c}: {e:?}"));
            }
        }
    }
    checks.push(check("three_directions", w));

    // reversal maps the left set onto the right set
    let left = chosen_set(Side::Left);
    let right = chosen_set(Side::Right);
    let rev: BTreeSet<FaceWord> = left.iter().map(|e| e.reversed()).collect();
    checks.push(check(
        "reversal",
        (rev != right).then(|| format!("{:?}", rev.symmetric_difference(&right).collect::<Vec<_>>())),
    ));

    // disjoint, and together the shared edges
    let shared = shared_edges();
    let union: BTreeSet<FaceWord> = left.union(&right).copied().collect();
    let disjoint = left.is_disjoint(&right);
    checks.push(check(
        "partition_of_shared",
        (!disjoint || union != shared.all || left.len() != 12).then(|| {
            format!(
                "|L|={} |R|={} |L∩R|={} |L∪R|={} |shared|={}",
                left.len(),
                right.len(),
                left.intersection(&right).count(),
                union.len(),
                shared.all.len()
            )
        }),
    ));

    // minimal dominating sets
    let mut w = None;
    let mut pairwise = BTreeMap::new();
    for side in [Side::Left, Side::Right] {
        for c in chain_cubes(side) {
            let e = chosen_edges(&c, side)?;
            let all = cube_edges(&c);
            if !dominates(&e, &all) {
                w.get_or_insert(format!("{c} not dominated"));
            }
            for skip in 0..3 {
                let sub: Vec<FaceWord> = e.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, x)| *x).collect();
                if dominates(&sub, &all) {
                    w.get_or_insert(format!("{c}: {sub:?} already dominates"));
                }
            }
            let na = (0..3).all(|a| (a + 1..3).all(|b| !adjacent(&e[a], &e[b])));
            pairwise.insert(format!("{side:?}:{c}"), na);
        }
    }
    checks.push(check("minimal_dominating", w));

    // chosen edges lie among the shared ones, and the printed shared columns
    // partition the shared set
    let mut w = None;
    for (side, per) in [(Side::Left, &shared.left), (Side::Right, &shared.right)] {
        let mut seen = BTreeSet::new();
        for (c, set) in per {
            for e in set {
                if !seen.insert(*e) {
                    w.get_or_insert(format!("{e} attributed twice"));
                }
            }
            let printed: BTreeSet<FaceWord> = printed_shared(c, side)?.into_iter().collect();
            if &printed != set {
                w.get_or_insert(format!("{c}: printed shared column differs"));
            }
            if chosen_edges(c, side)?.iter().any(|e| !set.contains(e)) {
                w.get_or_insert(format!("{c}: chosen edge outside shared set"));
            }
        }
        if seen != shared.all {
            w.get_or_insert(format!("{side:?} columns do not cover the shared edges"));
        }
    }
    checks.push(check("within_shared", w));

    Ok(PropertiesReport {
        checks,
        pairwise_non_adjacent: pairwise,
    })
}

/// Star-notation table: a header row of cubes, one row per chosen edge.
pub fn star_table(side: Side) -> String {
    let cubes = chain_cubes(side);
    let cols: Vec<Vec<FaceWord>> = cubes.iter().map(|c| chosen_edges(c, side).unwrap()).collect();
    let mut out = cubes.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" | ");
    for row in 0..3 {
        out.push('\n');
        out.push_str(&cols.iter().map(|c| c[row].to_string()).collect::<Vec<_>>().join(" | "));
    }
    out
}

// ---------------------------------------------------------------- operators

/// Which slot permutation of `V_f` realizes the edge relabeling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum AVariant {
    /// `(i1 i2)(o1 o2)`.
    SwapWithinBlocks,
    /// `(i1 o2)(i2 o1)`: the map actually induced by reversing the axes of
    /// a 2-face, which turns incoming edges into outgoing ones.
    Reversal,
}

impl AVariant {
    pub fn all() -> [AVariant; 2] {
        [AVariant::SwapWithinBlocks, AVariant::Reversal]
    }

    /// Image of each of the four face-color slots.
    pub fn slot_map(self) -> [usize; 4] {
        match self {
            AVariant::SwapWithinBlocks => [1, 0, 3, 2],
            AVariant::Reversal => [3, 2, 1, 0],
        }
    }

    /// Basis permutation of `V_f` (slot 0 is the most significant bit).
    pub fn basis_permutation(self) -> Vec<usize> {
        let sm = self.slot_map();
        (0..16)
            .map(|x| {
                (0..4).fold(0, |acc, slot| {
                    let bit = x >> (3 - slot) & 1;
                    acc | bit << (3 - sm[slot])
                })
            })
            .collect()
    }
}

pub fn a_operator(variant: AVariant) -> SparseOperator<Laurent> {
    SparseOperator::permutation(&variant.basis_permutation()).unwrap()
}

/// `W(dirs)`: the matrix of `Phi` with each entry multiplied by `u` to the
/// sum, over the six faces, of the spin of that face's chosen edge.
pub fn build_w(phi: &Lifted, dirs: &[usize]) -> Result<SparseOperator<Laurent>> {
    if phi.n != 2 || phi.order != FacetOrder::Ascending {
        return Err(Error::Invalid("W is built from the ascending-order lift of a 2-simplex solution".into()));
    }
    let edge_of = face_edge_map(&local_choice(dirs)?)?;
    let cube = FaceWord::full(3);
    let ins = incoming_facets(&cube);
    let outs = outgoing_facets(&cube);
    // position of the chosen edge within each leg's face color (MSB first)
    let pos = |f: &FaceWord| -> usize {
        face_color_facets(f, FacetOrder::Ascending)
            .iter()
            .position(|e| *e == edge_of[f])
            .unwrap()
    };
    let in_pos: Vec<usize> = ins.iter().map(pos).collect();
    let out_pos: Vec<usize> = outs.iter().map(pos).collect();
    let spin = |c: u32, p: usize| -> i64 {
        if c >> (3 - p) & 1 == 0 {
            1
        } else {
            -1
        }
    };
    let mut op = SparseOperator::new(vec![16; 3])?;
    for (i, o) in phi.correspondence.pairs() {
        let e: i64 = i.iter().zip(&in_pos).map(|(&c, &p)| spin(c, p)).sum::<i64>()
            + o.iter().zip(&out_pos).map(|(&c, &p)| spin(c, p)).sum::<i64>();
        let iu: Vec<usize> = i.iter().map(|&x| x as usize).collect();
        let ou: Vec<usize> = o.iter().map(|&x| x as usize).collect();
        op.add_entry(&iu, &ou, Laurent::monomial(e, 1))?;
    }
    Ok(op)
}

/// One factor of a written chain: operator label, directions, 1-based slots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factor {
    pub twisted: bool,
    pub dirs: Vec<usize>,
    pub slots: Vec<usize>,
}

impl Factor {
    pub fn render(&self) -> String {
        let d: Vec<String> = self.dirs.iter().map(|x| x.to_string()).collect();
        let s: String = self.slots.iter().map(|x| (x + 1).to_string()).collect();
        format!("W{}_{}({})", if self.twisted { "^A" } else { "" }, s, d.join(","))
    }
}

/// The two written chains of the twisted equation, plus the inner chain of
/// its slot-conjugated form.
#[derive(Clone, Debug, Serialize)]
pub struct TwistedLayout {
    /// Written order, rightmost applies first.
    pub lhs: Vec<Factor>,
    pub rhs: Vec<Factor>,
    /// Written chain sandwiched between `P16 P25` in the conjugated form.
    pub conjugated_inner: Vec<Factor>,
    /// 0-based slot permutation of the axis reversal.
    pub reversal: Vec<usize>,
}

impl TwistedLayout {
    pub fn new() -> Result<Self> {
        let layout = SimplexLayout::new(3)?;
        let rev = layout.reversal_on_slots();
        // right chain in application order
        let applied: Vec<(Vec<usize>, Vec<usize>)> = layout
            .right
            .iter()
            .map(|(g, s)| (directions(g), s.clone()))
            .collect();
        let rhs = applied
            .iter()
            .rev()
            .map(|(d, s)| Factor {
                twisted: false,
                dirs: d.clone(),
                slots: s.clone(),
            })
            .collect();
        let lhs = applied
            .iter()
            .map(|(d, s)| Factor {
                twisted: true,
                dirs: d.clone(),
                slots: s.iter().map(|&x| rev[x]).collect(),
            })
            .collect();
        let conjugated_inner = applied
            .iter()
            .map(|(d, s)| Factor {
                twisted: true,
                dirs: d.clone(),
                slots: s.clone(),
            })
            .collect();
        Ok(TwistedLayout {
            lhs,
            rhs,
            conjugated_inner,
            reversal: rev,
        })
    }

    pub fn render(chain: &[Factor]) -> String {
        chain.iter().map(Factor::render).collect::<Vec<_>>().join(" ")
    }
}

/// `W` and `W^A` for every direction triple, keyed by directions.
pub struct WeightSet {
    pub plain: BTreeMap<Vec<usize>, SparseOperator<Laurent>>,
    pub twisted: BTreeMap<Vec<usize>, SparseOperator<Laurent>>,
    pub swap: SparseOperator<Laurent>,
}

impl WeightSet {
    pub fn new(phi: &Lifted, variant: AVariant) -> Result<Self> {
        let perm = variant.basis_permutation();
        let mut plain = BTreeMap::new();
        let mut twisted = BTreeMap::new();
        for dirs in [vec![1, 2, 3], vec![1, 2, 4], vec![1, 3, 4], vec![2, 3, 4]] {
            let w = build_w(phi, &dirs)?;
            twisted.insert(dirs.clone(), w.conjugate_legs(&perm, false)?);
            plain.insert(dirs, w);
        }
        Ok(WeightSet {
            plain,
            twisted,
            swap: SparseOperator::swap(16)?,
        })
    }

    /// Apply `f` to every operator (e.g. `u -> 1`).
    pub fn map<T: Ring>(&self, f: impl Fn(&Laurent) -> T + Copy) -> MappedWeights<T> {
        MappedWeights {
            plain: self.plain.iter().map(|(k, v)| (k.clone(), v.map(f))).collect(),
            twisted: self.twisted.iter().map(|(k, v)| (k.clone(), v.map(f))).collect(),
            swap: self.swap.map(f),
        }
    }
}

pub struct MappedWeights<T> {
    pub plain: BTreeMap<Vec<usize>, SparseOperator<T>>,
    pub twisted: BTreeMap<Vec<usize>, SparseOperator<T>>,
    pub swap: SparseOperator<T>,
}

fn chain_of<'a, T: Ring>(
    plain: &'a BTreeMap<Vec<usize>, SparseOperator<T>>,
    twisted: &'a BTreeMap<Vec<usize>, SparseOperator<T>>,
    factors: &[Factor],
) -> Result<Vec<(&'a SparseOperator<T>, Vec<usize>)>> {
    factors
        .iter()
        .map(|f| {
            let m = if f.twisted { twisted } else { plain };
            let op = m
                .get(&f.dirs)
                .ok_or_else(|| Error::Invalid(format!("no operator for {:?}", f.dirs)))?;
            Ok((op, f.slots.clone()))
        })
        .collect()
}

/// The three chains: twisted left side, plain right side and the
/// `P16 P25`-conjugated left side.
pub fn twisted_chains<'a, T: Ring>(
    plain: &'a BTreeMap<Vec<usize>, SparseOperator<T>>,
    twisted: &'a BTreeMap<Vec<usize>, SparseOperator<T>>,
    swap: &'a SparseOperator<T>,
    layout: &TwistedLayout,
) -> Result<(AmbientChain<'a, T>, AmbientChain<'a, T>, AmbientChain<'a, T>)> {
    let dims = vec![16; 6];
    let lhs = AmbientChain::from_written(dims.clone(), chain_of(plain, twisted, &layout.lhs)?)?;
    let rhs = AmbientChain::from_written(dims.clone(), chain_of(plain, twisted, &layout.rhs)?)?;
    let mut conj = vec![(swap, vec![0, 5]), (swap, vec![1, 4])];
    conj.extend(chain_of(plain, twisted, &layout.conjugated_inner)?);
    conj.push((swap, vec![0, 5]));
    conj.push((swap, vec![1, 4]));
    let conj = AmbientChain::from_written(dims, conj)?;
    Ok((lhs, rhs, conj))
}

/// How the two sides relate when they are not equal.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Residual {
    pub same_support: bool,
    pub equal_at_one: bool,
    /// `lhs(u) = rhs(1/u)` entrywise.
    pub equal_after_inversion: bool,
    /// `lhs = u^k rhs` for a single `k`, if any.
    pub global_monomial: Option<i64>,
    pub mismatched_inputs: u64,
}

/// Compare two chains entrywise under several weaker relations.
pub fn residual_relation(lhs: &AmbientChain<'_, Laurent>, rhs: &AmbientChain<'_, Laurent>) -> Residual {
    #[derive(Default)]
    struct Acc {
        support: bool,
        at_one: bool,
        inversion: bool,
        ratios: BTreeSet<Option<i64>>,
        mismatched: u64,
    }
    let total = lhs.radix().size();
    const CHUNK: u64 = 1 << 14;
    let acc = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut a = Acc {
                support: true,
                at_one: true,
                inversion: true,
                ..Default::default()
            };
            for v in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let l = lhs.apply_packed(v);
                let r = rhs.apply_packed(v);
                if l == r {
                    continue;
                }
                a.mismatched += 1;
                let lk: Vec<u64> = l.iter().map(|x| x.0).collect();
                let rk: Vec<u64> = r.iter().map(|x| x.0).collect();
                if lk != rk {
                    a.support = false;
                    a.at_one = false;
                    a.inversion = false;
                    a.ratios.insert(None);
                    continue;
                }
                for ((_, x), (_, y)) in l.iter().zip(&r) {
                    if x.eval_at_one() != y.eval_at_one() {
                        a.at_one = false;
                    }
                    if *x != y.reflect() {
                        a.inversion = false;
                    }
                    let ratio = match (x.is_monomial(), y.is_monomial()) {
                        _ if x.min_exponent().zip(y.min_exponent()).is_none() => None,
                        _ => {
                            let k = x.min_exponent().unwrap() - y.min_exponent().unwrap();
                            (*x == y.mul_ref(&Laurent::monomial(k, 1))).then_some(k)
                        }
                    };
                    a.ratios.insert(ratio);
                }
            }
            a
        })
        .reduce(
            || Acc {
                support: true,
                at_one: true,
                inversion: true,
                ..Default::default()
            },
            |mut a, b| {
                a.support &= b.support;
                a.at_one &= b.at_one;
                a.inversion &= b.inversion;
                a.ratios.extend(b.ratios);
                a.mismatched += b.mismatched;
                a
            },
        );
    let global_monomial = if acc.mismatched == 0 {
        Some(0)
    } else if acc.ratios.len() == 1 {
        *acc.ratios.iter().next().unwrap()
    } else {
        None
    };
    Residual {
        same_support: acc.support,
        equal_at_one: acc.at_one,
        equal_after_inversion: acc.inversion,
        global_monomial,
        mismatched_inputs: acc.mismatched,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistedReport {
    pub variant: AVariant,
    pub lhs_written: String,
    pub rhs_written: String,
    pub equation: EquationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<Residual>,
    /// The same equation with `u -> 1`.
    pub at_one: EquationReport,
}

impl TwistedReport {
    pub fn holds(&self) -> bool {
        self.equation.holds
    }
}

/// The twisted equation for one choice of `A`, exact in `u`.
pub fn check_twisted_tetrahedron(phi: &Lifted, variant: AVariant) -> Result<TwistedReport> {
    let layout = TwistedLayout::new()?;
    let ws = WeightSet::new(phi, variant)?;
    let (lhs, rhs, _) = twisted_chains(&ws.plain, &ws.twisted, &ws.swap, &layout)?;
    let lw = TwistedLayout::render(&layout.lhs);
    let rw = TwistedLayout::render(&layout.rhs);
    let equation = check_equation(&format!("{lw} = {rw}"), &lhs, &rhs)?;
    let residual = (!equation.holds).then(|| residual_relation(&lhs, &rhs));
    let ints = ws.map(|x| x.eval_at_one());
    let (l1, r1, _) = twisted_chains(&ints.plain, &ints.twisted, &ints.swap, &layout)?;
    let at_one = check_equation(&format!("{lw} = {rw} at u = 1"), &l1, &r1)?;
    Ok(TwistedReport {
        variant,
        lhs_written: lw,
        rhs_written: rw,
        equation,
        residual,
        at_one,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub variant: AVariant,
    pub swaps_commute: bool,
    pub conjugated_written: String,
    /// The conjugated left side equals the relabeled left side as operators.
    pub sides_identical: EquationReport,
    /// The conjugated form checked against the right side on its own.
    pub conjugated_equation: EquationReport,
}

impl EquivalenceReport {
    pub fn holds(&self) -> bool {
        self.swaps_commute && self.sides_identical.holds
    }
}

pub fn check_tte_equivalence(phi: &Lifted, variant: AVariant) -> Result<EquivalenceReport> {
    let layout = TwistedLayout::new()?;
    let ws = WeightSet::new(phi, variant)?;
    let (lhs, rhs, conj) = twisted_chains(&ws.plain, &ws.twisted, &ws.swap, &layout)?;
    let p16 = ws.swap.clone();
    let a = AmbientChain::from_written(vec![16; 6], vec![(&p16, vec![0, 5]), (&p16, vec![1, 4])])?;
    let b = AmbientChain::from_written(vec![16; 6], vec![(&p16, vec![1, 4]), (&p16, vec![0, 5])])?;
    let swaps_commute = check_equation("P16 P25 = P25 P16", &a, &b)?.holds;
    let cw = format!("P16 P25 {} P16 P25", TwistedLayout::render(&layout.conjugated_inner));
    let sides_identical = check_equation(&format!("{cw} = {}", TwistedLayout::render(&layout.lhs)), &conj, &lhs)?;
    let conjugated_equation = check_equation(&format!("{cw} = {}", TwistedLayout::render(&layout.rhs)), &conj, &rhs)?;
    Ok(EquivalenceReport {
        variant,
        swaps_commute,
        conjugated_written: cw,
        sides_identical,
        conjugated_equation,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    /// Reversal maps the right chain cubes onto the left chain cubes in order.
    pub cubes: bool,
    /// Reversal maps the right chosen-edge set onto the left one.
    pub edges: bool,
    /// Left-side subscripts are the reversal images of the right side's.
    pub subscripts: bool,
    /// `Phi` is invariant under reversing its legs and applying `A` on each.
    pub phi_symmetric: BTreeMap<String, bool>,
}

/// Index reversal `1<->4, 2<->3` on the chain data.
pub fn reversal_symmetry(phi: &Lifted) -> Result<SymmetryReport> {
    let l = chain_cubes(Side::Left);
    let r: Vec<FaceWord> = chain_cubes(Side::Right).iter().map(|c| c.reversed()).collect();
    let edges = chosen_set(Side::Right).iter().map(|e| e.reversed()).collect::<BTreeSet<_>>() == chosen_set(Side::Left);
    let t = TwistedLayout::new()?;
    let subscripts = t
        .lhs
        .iter()
        .zip(t.rhs.iter().rev())
        .all(|(a, b)| a.slots == b.slots.iter().map(|&x| t.reversal[x]).collect::<Vec<_>>());
    let mut phi_symmetric = BTreeMap::new();
    for v in AVariant::all() {
        let perm = v.basis_permutation();
        let image = reverse_legs(&phi.correspondence, &perm)?;
        phi_symmetric.insert(format!("{v:?}"), image == phi.correspondence);
    }
    Ok(SymmetryReport {
        cubes: l == r,
        edges,
        subscripts,
        phi_symmetric,
    })
}

fn reverse_legs(
    c: &crate::correspondence::Correspondence,
    perm: &[usize],
) -> Result<crate::correspondence::Correspondence> {
    crate::correspondence::Correspondence::new(
        c.arity(),
        c.colors(),
        c.pairs().map(|(i, o)| {
            (
                i.iter().rev().map(|&x| perm[x as usize] as u32).collect(),
                o.iter().rev().map(|&x| perm[x as usize] as u32).collect(),
            )
        }),
    )
}

/// `W` at `u = 1` is the matrix of `Phi`.
pub fn w_specializes_to_phi(phi: &Lifted, dirs: &[usize]) -> Result<bool> {
    let w = build_w(phi, dirs)?;
    let m = crate::recursion::phi_matrix(phi)?;
    Ok(w.map(|x| x.eval_at_one()) == m)
}

/// The tetrahedron check for `W` itself at `u = 1` through [`simplex_chains`].
pub fn phi_matrix_equation(phi: &Lifted) -> Result<EquationReport> {
    let m: SparseOperator<BigInt> = crate::recursion::phi_matrix(phi)?;
    let layout = SimplexLayout::new(3)?;
    let (l, r) = simplex_chains(&m, &layout)?;
    check_equation("tetrahedron", &l, &r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recursion::phi;

    #[test]
    fn shared_edges_match_print() {
        let s = shared_edges();
        assert_eq!(s.all.len(), 24);
        assert!(!s.all.contains(&fw("1*10")));
        for v in ["1010", "0101"] {
            let bits = u16::from_str_radix(&v.chars().rev().collect::<String>(), 2).unwrap();
            assert!(s.all.iter().all(|e| !e.contains_vertex(bits)));
        }
        let first: BTreeSet<FaceWord> = ["001*", "000*", "00*0", "01*0", "0*10", "0*11"].iter().map(|x| fw(x)).collect();
        assert_eq!(s.left[0].1, first);
        for (_, set) in s.left.iter().chain(&s.right) {
            assert_eq!(set.len(), 6);
        }
    }

    #[test]
    fn chosen_edge_lookup() {
        let set = |v: &[&str]| v.iter().map(|x| fw(x)).collect::<BTreeSet<_>>();
        let got = |c: &str, s: Side| chosen_edges(&fw(c), s).unwrap().into_iter().collect::<BTreeSet<_>>();
        assert_eq!(got("0***", Side::Left), set(&["01*0", "000*", "0*11"]));
        assert_eq!(got("***0", Side::Right), set(&["1*00", "00*0", "*110"]));
        assert_eq!(got("***1", Side::Left), set(&["00*1", "*111", "1*01"]));
        assert!(matches!(chosen_edges(&fw("***0"), Side::Left), Err(Error::NotInChain { .. })));
    }

    #[test]
    fn local_choices() {
        let s = |v: &[&str]| v.iter().map(|x| fw(x)).collect::<BTreeSet<_>>();
        let l = |d: &[usize]| local_choice(d).unwrap().into_iter().collect::<BTreeSet<_>>();
        assert_eq!(l(&[1, 2, 3]), s(&["00*", "*11", "1*0"]));
        assert_eq!(l(&[2, 3, 4]), s(&["00*", "*11", "1*0"]));
        assert_eq!(l(&[1, 3, 4]), s(&["01*", "*00", "1*1"]));
        assert_eq!(l(&[1, 2, 4]), s(&["0*0", "11*", "*01"]));
        for d in [[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]] {
            let m = face_edge_map(&local_choice(&d).unwrap()).unwrap();
            let mut counts: BTreeMap<FaceWord, usize> = BTreeMap::new();
            for e in m.values() {
                *counts.entry(*e).or_default() += 1;
            }
            assert_eq!(counts.len(), 3);
            assert!(counts.values().all(|&c| c == 2));
        }
    }

    #[test]
    fn properties() {
        let rep = structural_properties_audit().unwrap();
        assert!(rep.all_hold(), "{rep:?}");
        assert_eq!(rep.checks.len(), 6);
    }

    #[test]
    fn literal_formula_at_zero() {
        for d in 0..2 {
            for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                assert_eq!(edge_choice_formula(0, 0, d, i, j, 0).0, (i + j + d) % 2);
            }
        }
    }

    #[test]
    fn calibration_runs() {
        let rep = calibrate_formula().unwrap();
        assert_eq!(rep.conventions_tried, 2048);
        if rep.reproduced() {
            assert_eq!(rep.best_mismatches, 0);
        } else {
            assert_eq!(rep.best_witness.len(), rep.best_mismatches);
        }
    }

    #[test]
    fn a_operator_facts() {
        for v in AVariant::all() {
            let a = a_operator(v);
            assert_eq!(a.compose(&a).unwrap(), SparseOperator::identity(vec![16]).unwrap());
            let p = v.basis_permutation();
            // (+,-,+,-) -> (-,+,-,+)
            assert_eq!(p[0b0101], 0b1010);
            let flip: Vec<usize> = (0..16).map(|x| x ^ 15).collect();
            let f = SparseOperator::<Laurent>::permutation(&flip).unwrap();
            assert_eq!(a.compose(&f).unwrap(), f.compose(&a).unwrap());
        }
    }

    #[test]
    fn w_entries() {
        let p = phi().unwrap();
        for d in [[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]] {
            let w = build_w(&p, &d).unwrap();
            assert!(w_specializes_to_phi(&p, &d).unwrap());
            assert_eq!(w.support(), crate::recursion::phi_matrix(&p).unwrap().support());
            assert!(w.triplets().iter().all(|(_, _, x)| x.is_monomial() && x.is_even()));
            assert_eq!(w.column(0).iter().find(|(o, _)| *o == 0).unwrap().1, Laurent::monomial(6, 1));
        }
    }

    #[test]
    fn twisted_layout_subscripts() {
        let t = TwistedLayout::new().unwrap();
        assert_eq!(
            TwistedLayout::render(&t.rhs),
            "W_356(2,3,4) W_246(1,3,4) W_145(1,2,4) W_123(1,2,3)"
        );
        assert_eq!(
            TwistedLayout::render(&t.lhs),
            "W^A_653(1,2,3) W^A_642(1,2,4) W^A_541(1,3,4) W^A_321(2,3,4)"
        );
        assert_eq!(
            TwistedLayout::render(&t.conjugated_inner),
            "W^A_123(1,2,3) W^A_145(1,2,4) W^A_246(1,3,4) W^A_356(2,3,4)"
        );
    }

    #[test]
    fn reversal_data() {
        let p = phi().unwrap();
        let rep = reversal_symmetry(&p).unwrap();
        assert!(rep.cubes && rep.edges && rep.subscripts, "{rep:?}");
    }

    #[test]
    fn star_tables() {
        let t = star_table(Side::Left);
        assert_eq!(t.lines().next().unwrap(), "0*** | *1** | **0* | ***1");
        assert_eq!(t.lines().nth(1).unwrap(), "01*0 | 011* | 0*00 | 00*1");
    }
}
