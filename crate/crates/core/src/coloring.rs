//! Admissible colorings of the (n-1)-faces of the N-cube.
//!
//! Colorings are found by depth-first extension over the n-faces in flow
//! order. An n-face whose incoming facets are not yet all colored can only
//! be waiting on absolutely incoming faces; those are branched over lazily
//! from the inputs in the domain of `R`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::correspondence::{Color, ColorSet, Correspondence, RelChain, SlotBinding};
use crate::error::{Error, Result};
use crate::hypercube::{
    enumerate_faces, flow_graph, incoming_facets, is_absolutely_incoming, is_absolutely_outgoing,
    outgoing_facets, FaceWord, TieBreak,
};

const UNSET: Color = Color::MAX;

/// A total coloring, indexed like [`ColoringProblem::faces`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CubeColoring(pub Vec<Color>);

impl CubeColoring {
    pub fn to_json(&self, faces: &[FaceWord], colors: &ColorSet) -> Value {
        let mut m = Map::new();
        for (f, &c) in faces.iter().zip(&self.0) {
            m.insert(f.to_string(), Value::from(colors.label(c)));
        }
        Value::Object(m)
    }
}

/// Colors of the absolutely incoming faces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Seed(pub BTreeMap<FaceWord, Color>);

#[derive(Clone, Debug)]
struct Cell {
    face: FaceWord,
    inc: Vec<usize>,
    out: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ColoringProblem<'a> {
    pub cube_dim: usize,
    pub n: usize,
    pub r: &'a Correspondence,
    faces: Vec<FaceWord>,
    index: HashMap<FaceWord, usize>,
    cells: Vec<Cell>,
    seeds: Vec<usize>,
    fanout: HashMap<Vec<Color>, Vec<Vec<Color>>>,
    domain: Vec<Vec<Color>>,
}

impl<'a> ColoringProblem<'a> {
    pub fn new(cube_dim: usize, n: usize, r: &'a Correspondence) -> Result<Self> {
        if r.arity() != n {
            return Err(Error::ArityMismatch {
                expected: n,
                found: r.arity(),
            });
        }
        if cube_dim < n {
            return Err(Error::DimensionOutOfRange {
                what: "cube dimension",
                value: cube_dim,
                min: n,
                max: 6,
            });
        }
        let flow = flow_graph(cube_dim, n, TieBreak::Forward)?;
        let faces = enumerate_faces(cube_dim, n - 1)?;
        let index: HashMap<FaceWord, usize> = faces.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        let cells = flow
            .order
            .iter()
            .filter(|g| g.dim() == n)
            .map(|g| Cell {
                face: *g,
                inc: incoming_facets(g).iter().map(|f| index[f]).collect(),
                out: outgoing_facets(g).iter().map(|f| index[f]).collect(),
            })
            .collect();
        let seeds = faces
            .iter()
            .enumerate()
            .filter(|(_, f)| is_absolutely_incoming(cube_dim, f))
            .map(|(i, _)| i)
            .collect();
        let mut fanout: HashMap<Vec<Color>, Vec<Vec<Color>>> = r.fanout();
        for outs in fanout.values_mut() {
            outs.sort();
        }
        let mut domain: Vec<Vec<Color>> = fanout.keys().cloned().collect();
        domain.sort();
        Ok(ColoringProblem {
            cube_dim,
            n,
            r,
            faces,
            index,
            cells,
            seeds,
            fanout,
            domain,
        })
    }

    /// All (n-1)-faces in canonical order.
    pub fn faces(&self) -> &[FaceWord] {
        &self.faces
    }

    pub fn face_index(&self, f: &FaceWord) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn seed_faces(&self) -> Vec<FaceWord> {
        self.seeds.iter().map(|&i| self.faces[i]).collect()
    }

    /// n-faces in the propagation order.
    pub fn cell_order(&self) -> Vec<FaceWord> {
        self.cells.iter().map(|c| c.face).collect()
    }

    /// Every seed over the color set, in lexicographic order.
    pub fn all_seeds(&self) -> Result<Vec<Seed>> {
        let k = self.r.colors() as u64;
        let total = k
            .checked_pow(self.seeds.len() as u32)
            .filter(|&t| t <= 1 << 24)
            .ok_or_else(|| Error::TooLarge("seed space".into()))?;
        Ok((0..total)
            .map(|mut v| {
                let mut m = BTreeMap::new();
                for &s in self.seeds.iter().rev() {
                    m.insert(self.faces[s], (v % k) as Color);
                    v /= k;
                }
                Seed(m)
            })
            .collect())
    }

    fn seeded(&self, seed: &Seed) -> Result<Vec<Color>> {
        let keys: BTreeSet<FaceWord> = seed.0.keys().copied().collect();
        let expected: BTreeSet<FaceWord> = self.seed_faces().into_iter().collect();
        if keys != expected {
            return Err(Error::Invalid(format!(
                "seed keys {:?} differ from the absolutely incoming faces {:?}",
                keys, expected
            )));
        }
        let mut col = vec![UNSET; self.faces.len()];
        for (f, &c) in &seed.0 {
            if c as usize >= self.r.colors() {
                return Err(Error::Invalid(format!("color {c} out of range")));
            }
            col[self.index[f]] = c;
        }
        Ok(col)
    }

    /// All admissible completions of a seed.
    pub fn propagate(&self, seed: &Seed) -> Result<BTreeSet<CubeColoring>> {
        let mut col = self.seeded(seed)?;
        let mut out = BTreeSet::new();
        self.dfs(0, &mut col, &mut |c| {
            out.insert(CubeColoring(c.to_vec()));
        });
        Ok(out)
    }

    /// The whole of `C_N^{n-1}(X, R)`, seeds branched lazily; parallel over
    /// the choices at the first n-face.
    pub fn enumerate_all(&self) -> BTreeSet<CubeColoring> {
        let blank = vec![UNSET; self.faces.len()];
        let Some(first) = self.cells.first() else {
            return BTreeSet::new();
        };
        let starts: Vec<Vec<Color>> = self
            .domain
            .iter()
            .map(|input| {
                let mut c = blank.clone();
                for (&f, &x) in first.inc.iter().zip(input) {
                    c[f] = x;
                }
                c
            })
            .collect();
        starts
            .into_par_iter()
            .map(|mut c| {
                let mut found = BTreeSet::new();
                self.dfs(0, &mut c, &mut |x| {
                    found.insert(CubeColoring(x.to_vec()));
                });
                found
            })
            .reduce(BTreeSet::new, |mut a, mut b| {
                if a.len() < b.len() {
                    std::mem::swap(&mut a, &mut b);
                }
                a.extend(b);
                a
            })
    }

    fn dfs(&self, k: usize, col: &mut Vec<Color>, emit: &mut dyn FnMut(&[Color])) {
        let Some(cell) = self.cells.get(k) else {
            emit(col);
            return;
        };
        let unset: Vec<usize> = (0..cell.inc.len()).filter(|&j| col[cell.inc[j]] == UNSET).collect();
        if unset.is_empty() {
            let input: Vec<Color> = cell.inc.iter().map(|&f| col[f]).collect();
            self.extend_outputs(k, cell, &input, col, emit);
            return;
        }
        for input in &self.domain {
            let fits = cell
                .inc
                .iter()
                .zip(input)
                .all(|(&f, &x)| col[f] == UNSET || col[f] == x);
            if !fits {
                continue;
            }
            for &j in &unset {
                col[cell.inc[j]] = input[j];
            }
            self.extend_outputs(k, cell, input, col, emit);
            for &j in &unset {
                col[cell.inc[j]] = UNSET;
            }
        }
    }

    fn extend_outputs(&self, k: usize, cell: &Cell, input: &[Color], col: &mut Vec<Color>, emit: &mut dyn FnMut(&[Color])) {
        let Some(outs) = self.fanout.get(input) else {
            return;
        };
        for o in outs {
            let mut written = Vec::new();
            let mut ok = true;
            for (&f, &x) in cell.out.iter().zip(o) {
                if col[f] == UNSET {
                    col[f] = x;
                    written.push(f);
                } else if col[f] != x {
                    ok = false;
                    break;
                }
            }
            if ok {
                self.dfs(k + 1, col, emit);
            }
            for f in written {
                col[f] = UNSET;
            }
        }
    }

    /// Check every n-face of a total coloring against `R`.
    pub fn is_admissible(&self, c: &CubeColoring) -> bool {
        self.cells.iter().all(|cell| {
            let i: Vec<Color> = cell.inc.iter().map(|&f| c.0[f]).collect();
            let o: Vec<Color> = cell.out.iter().map(|&f| c.0[f]).collect();
            self.r.contains(&i, &o)
        })
    }
}

/// Ising edge colorings induced by vertex spins, one per global-flip class.
pub fn vertex_shortcut(cube_dim: usize) -> Result<BTreeSet<CubeColoring>> {
    if !(1..=4).contains(&cube_dim) {
        return Err(Error::DimensionOutOfRange {
            what: "cube dimension",
            value: cube_dim,
            min: 1,
            max: 4,
        });
    }
    let edges = enumerate_faces(cube_dim, 1)?;
    let ends: Vec<(u16, u16)> = edges
        .iter()
        .map(|e| {
            let v = e.vertices();
            (v[0], v[1])
        })
        .collect();
    let nv = 1u32 << cube_dim;
    // vertex 0 pinned to +1 picks one representative per flip class
    Ok((0u64..1 << (nv - 1))
        .into_par_iter()
        .map(|half| {
            let sigma = half << 1;
            CubeColoring(
                ends.iter()
                    .map(|&(a, b)| ((sigma >> a) ^ (sigma >> b)) as Color & 1)
                    .collect(),
            )
        })
        .collect())
}

/// One propagation route from the absolutely incoming front to the
/// absolutely outgoing one.
#[derive(Clone, Debug, Serialize)]
pub struct Way {
    pub tie: String,
    /// n-faces in application order with their front slots in leg order.
    pub steps: Vec<(FaceWord, Vec<usize>)>,
}

/// Front slots are the free-direction sets of (n-1)-faces, ascending by mask.
pub fn front_slots(cube_dim: usize, n: usize) -> Result<Vec<u16>> {
    Ok(enumerate_faces(cube_dim, n - 1)?
        .iter()
        .map(|f| f.free_mask())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect())
}

/// Greedy sweep: repeatedly apply the least (or greatest) n-face whose
/// incoming facets all sit in the current front.
pub fn greedy_way(cube_dim: usize, n: usize, tie: TieBreak) -> Result<Way> {
    let slots = front_slots(cube_dim, n)?;
    let slot_of = |f: &FaceWord| slots.iter().position(|&m| m == f.free_mask()).unwrap();
    let faces = enumerate_faces(cube_dim, n - 1)?;
    let mut front: Vec<FaceWord> = vec![FaceWord::full(0); slots.len()];
    let mut seen = vec![false; slots.len()];
    for f in faces.iter().filter(|f| is_absolutely_incoming(cube_dim, f)) {
        let s = slot_of(f);
        if seen[s] {
            return Err(Error::Structural(format!("two absolutely incoming faces in slot {s}")));
        }
        seen[s] = true;
        front[s] = *f;
    }
    if seen.iter().any(|x| !x) {
        return Err(Error::Structural("absolutely incoming faces do not fill the front".into()));
    }
    let mut cells = enumerate_faces(cube_dim, n)?;
    if tie == TieBreak::Reverse {
        cells.reverse();
    }
    let mut steps = Vec::new();
    loop {
        if front.iter().all(|f| is_absolutely_outgoing(cube_dim, f)) {
            break;
        }
        let next = cells.iter().find(|g| {
            incoming_facets(g)
                .iter()
                .all(|f| front[slot_of(f)] == *f)
        });
        let Some(&g) = next else {
            return Err(Error::Structural(format!(
                "sweep stalled at front {:?}",
                front.iter().map(|f| f.to_string()).collect::<Vec<_>>()
            )));
        };
        let bind: Vec<usize> = incoming_facets(&g).iter().map(slot_of).collect();
        for f in outgoing_facets(&g) {
            front[slot_of(&f)] = f;
        }
        steps.push((g, bind));
    }
    Ok(Way {
        tie: format!("{tie:?}").to_lowercase(),
        steps,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditMismatch {
    pub seed: BTreeMap<String, String>,
    /// First absolutely outgoing face whose reachable colors differ.
    pub face: String,
    pub forward_colors: Vec<String>,
    pub reverse_colors: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub cube_dim: usize,
    pub n: usize,
    pub independent: bool,
    pub seeds_checked: u64,
    pub forward_steps: usize,
    pub reverse_steps: usize,
    pub forward_way: Vec<String>,
    pub reverse_way: Vec<String>,
    pub runtime_ms: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mismatch: Option<AuditMismatch>,
}

/// Compare the outgoing colorings reachable from each seed along the forward
/// and reverse greedy sweeps.
pub fn path_independence_audit(cube_dim: usize, n: usize, r: &Correspondence, colors: &ColorSet) -> Result<AuditReport> {
    let start = Instant::now();
    let fwd = greedy_way(cube_dim, n, TieBreak::Forward)?;
    let rev = greedy_way(cube_dim, n, TieBreak::Reverse)?;
    let slots = front_slots(cube_dim, n)?;
    let chain = |w: &Way| RelChain::new(slots.len(), r.colors(), &w.steps.iter().map(|(_, s)| (r, SlotBinding(s.clone()))).collect::<Vec<_>>());
    let a = chain(&fwd)?;
    let b = chain(&rev)?;
    let total = a.radix.size();
    let bad = (0..total).into_par_iter().find_first(|&v| a.image(v) != b.image(v));
    let faces = enumerate_faces(cube_dim, n - 1)?;
    let start_front: Vec<FaceWord> = slots
        .iter()
        .map(|&m| *faces.iter().find(|f| f.free_mask() == m && is_absolutely_incoming(cube_dim, f)).unwrap())
        .collect();
    let end_front: Vec<FaceWord> = slots
        .iter()
        .map(|&m| *faces.iter().find(|f| f.free_mask() == m && is_absolutely_outgoing(cube_dim, f)).unwrap())
        .collect();
    let mismatch = bad.map(|v| {
        let ia = a.image(v);
        let ib = b.image(v);
        let per_slot = |img: &[u64], s: usize| -> BTreeSet<usize> { img.iter().map(|&x| a.radix.get(x, s)).collect() };
        let s = (0..slots.len())
            .find(|&s| per_slot(&ia, s) != per_slot(&ib, s))
            .unwrap_or(0);
        let render = |set: BTreeSet<usize>| set.into_iter().map(|c| colors.label(c as Color).to_string()).collect();
        AuditMismatch {
            seed: start_front
                .iter()
                .enumerate()
                .map(|(i, f)| (f.to_string(), colors.label(a.radix.get(v, i) as Color).to_string()))
                .collect(),
            face: end_front[s].to_string(),
            forward_colors: render(per_slot(&ia, s)),
            reverse_colors: render(per_slot(&ib, s)),
        }
    });
    let written = |w: &Way| w.steps.iter().map(|(g, _)| g.to_string()).collect();
    Ok(AuditReport {
        cube_dim,
        n,
        independent: mismatch.is_none(),
        seeds_checked: total,
        forward_steps: fwd.steps.len(),
        reverse_steps: rev.steps.len(),
        forward_way: written(&fwd),
        reverse_way: written(&rev),
        runtime_ms: start.elapsed().as_millis(),
        mismatch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correspondence::ising_r;

    fn swap_bad() -> Correspondence {
        Correspondence::new(
            2,
            2,
            [
                (vec![0, 0], vec![0, 1]),
                (vec![0, 1], vec![1, 1]),
                (vec![1, 0], vec![1, 0]),
                (vec![1, 1], vec![0, 0]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn single_square_has_two_completions() {
        let r = ising_r();
        let p = ColoringProblem::new(2, 2, &r).unwrap();
        assert_eq!(p.seed_faces().len(), 2);
        for seed in p.all_seeds().unwrap() {
            assert_eq!(p.propagate(&seed).unwrap().len(), 2);
        }
    }

    #[test]
    fn three_cube_count_and_shortcut() {
        let r = ising_r();
        let p = ColoringProblem::new(3, 2, &r).unwrap();
        let mut all = BTreeSet::new();
        for seed in p.all_seeds().unwrap() {
            all.extend(p.propagate(&seed).unwrap());
        }
        assert_eq!(all.len(), 128);
        assert_eq!(all, vertex_shortcut(3).unwrap());
        assert_eq!(p.enumerate_all(), all);
    }

    #[test]
    fn shortcut_sizes() {
        assert_eq!(vertex_shortcut(2).unwrap().len(), 8);
        let all_up = vertex_shortcut(3).unwrap();
        assert!(all_up.contains(&CubeColoring(vec![0; 12])));
    }

    #[test]
    fn squares_have_product_plus_one() {
        let r = ising_r();
        let p = ColoringProblem::new(4, 2, &r).unwrap();
        let all = p.enumerate_all();
        assert_eq!(all, vertex_shortcut(4).unwrap());
        for sq in enumerate_faces(4, 2).unwrap() {
            let idx: Vec<usize> = sq.facets().iter().map(|e| p.face_index(e).unwrap()).collect();
            for c in all.iter().take(500) {
                assert_eq!(idx.iter().map(|&i| c.0[i]).sum::<u32>() % 2, 0);
            }
        }
    }

    #[test]
    fn maps_are_deterministic() {
        for r in [Correspondence::identity(2, 2).unwrap(), Correspondence::swap(2).unwrap()] {
            let p = ColoringProblem::new(4, 2, &r).unwrap();
            for seed in p.all_seeds().unwrap() {
                assert_eq!(p.propagate(&seed).unwrap().len(), 1);
            }
        }
    }

    #[test]
    fn identity_repeats_colors_along_directions() {
        let r = Correspondence::identity(2, 2).unwrap();
        let p = ColoringProblem::new(3, 2, &r).unwrap();
        for seed in p.all_seeds().unwrap() {
            let c = p.propagate(&seed).unwrap().into_iter().next().unwrap();
            for (i, f) in p.faces().iter().enumerate() {
                let src = seed.0.iter().find(|(s, _)| s.free_mask() == f.free_mask()).unwrap();
                assert_eq!(c.0[i], *src.1);
            }
        }
    }

    #[test]
    fn ways_reach_the_outgoing_front() {
        for (cube, n) in [(3, 2), (4, 2), (4, 3), (5, 2)] {
            let f = greedy_way(cube, n, TieBreak::Forward).unwrap();
            let r = greedy_way(cube, n, TieBreak::Reverse).unwrap();
            assert_eq!(f.steps.len(), r.steps.len());
        }
        // on the (n+1)-cube the two sweeps are the two simplices
        let f = greedy_way(3, 2, TieBreak::Forward).unwrap();
        let names: Vec<String> = f.steps.iter().map(|(g, _)| g.to_string()).collect();
        assert_eq!(names.len(), 3);
    }

    #[test]
    fn audit_passes_for_solutions() {
        let cs = ColorSet::ising();
        assert!(path_independence_audit(4, 2, &ising_r(), &cs).unwrap().independent);
        assert!(path_independence_audit(4, 2, &Correspondence::swap(2).unwrap(), &cs).unwrap().independent);
    }

    #[test]
    fn audit_catches_non_solution() {
        let cs = ColorSet::ising();
        let rep = path_independence_audit(4, 2, &swap_bad(), &cs).unwrap();
        assert!(!rep.independent);
        let m = rep.mismatch.unwrap();
        assert_ne!(m.forward_colors, m.reverse_colors);
    }

    #[test]
    fn seed_keys_are_validated() {
        let r = ising_r();
        let p = ColoringProblem::new(3, 2, &r).unwrap();
        let bad = Seed(BTreeMap::from([(FaceWord::parse("00*").unwrap(), 0)]));
        assert!(p.propagate(&bad).is_err());
    }

    #[test]
    fn coloring_json() {
        let c = CubeColoring(vec![0, 1]);
        let faces = vec![FaceWord::parse("0*").unwrap(), FaceWord::parse("1*").unwrap()];
        let j = c.to_json(&faces, &ColorSet::ising());
        assert_eq!(j["1*"], "-");
    }
}
