//! Periodic cubic lattices: spin sum, plaquette-constrained edge sum split by
//! holonomy sector, and the closed network of `W` weights over 3-cells.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fourcube::{build_w, face_edge_map, local_choice};
use crate::hypercube::{enumerate_faces, face_color_facets, incoming_facets, outgoing_facets, FaceWord, FacetOrder};
use crate::recursion::Lifted;
use crate::scalar::Laurent;

pub const MAX_SPIN_BITS: usize = 27;
pub const MAX_EDGE_BITS: usize = 25;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorusLattice {
    pub sizes: [usize; 3],
}

/// Which spin pairs enter the Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
pub enum BondConvention {
    /// One bond per axis edge: `3 * |V|` bonds, doubled when a side is 2.
    #[default]
    AxisEdges,
    /// One bond per unordered nearest-neighbour pair.
    DistinctPairs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
pub enum EdgeMethod {
    #[default]
    Auto,
    Exhaustive,
    SpinImage,
}

impl TorusLattice {
    pub fn new(sizes: [usize; 3]) -> Result<Self> {
        if sizes.iter().any(|&l| l < 2) {
            return Err(Error::Invalid(format!("lattice sides must be at least 2, got {sizes:?}")));
        }
        Ok(TorusLattice { sizes })
    }

    /// Parses `L1xL2xL3`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(['x', 'X'])
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Invalid(format!("bad lattice size {s:?}")))?;
        let sizes: [usize; 3] = parts
            .try_into()
            .map_err(|_| Error::Invalid(format!("lattice size needs three sides: {s:?}")))?;
        Self::new(sizes)
    }

    pub fn vertices(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn edges(&self) -> usize {
        3 * self.vertices()
    }

    pub fn vertex(&self, c: [usize; 3]) -> usize {
        let [l1, l2, l3] = self.sizes;
        c[0] % l1 + l1 * (c[1] % l2 + l2 * (c[2] % l3))
    }

    pub fn coords(&self, v: usize) -> [usize; 3] {
        let [l1, l2, _] = self.sizes;
        [v % l1, (v / l1) % l2, v / (l1 * l2)]
    }

    /// `v + steps` on the torus.
    pub fn shift(&self, v: usize, steps: [usize; 3]) -> usize {
        let c = self.coords(v);
        self.vertex([c[0] + steps[0], c[1] + steps[1], c[2] + steps[2]])
    }

    fn step(axis: usize) -> [usize; 3] {
        let mut s = [0; 3];
        s[axis] = 1;
        s
    }

    /// Edge from `v` to `v + e_axis`.
    pub fn edge(&self, axis: usize, v: usize) -> usize {
        axis * self.vertices() + v
    }

    pub fn edge_ends(&self, e: usize) -> (usize, usize) {
        let (axis, v) = (e / self.vertices(), e % self.vertices());
        (v, self.shift(v, Self::step(axis)))
    }

    /// Each plaquette as its four edges.
    pub fn plaquettes(&self) -> Vec<[usize; 4]> {
        let mut out = Vec::with_capacity(self.edges());
        for v in 0..self.vertices() {
            for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                out.push([
                    self.edge(a, v),
                    self.edge(b, self.shift(v, Self::step(a))),
                    self.edge(a, self.shift(v, Self::step(b))),
                    self.edge(b, v),
                ]);
            }
        }
        out
    }

    /// Lattice edge for a local edge word of the cell based at `v`.
    pub fn cell_edge(&self, v: usize, local: &FaceWord) -> usize {
        let axis = local.free_axes().next().expect("edge word has one free axis");
        let mut steps = [0; 3];
        for a in local.fixed_axes() {
            steps[a] = local.value(a).unwrap() as usize;
        }
        self.edge(axis, self.shift(v, steps))
    }

    fn bonds(&self, conv: BondConvention) -> Vec<(usize, usize)> {
        let all = (0..self.edges()).map(|e| self.edge_ends(e));
        match conv {
            BondConvention::AxisEdges => all.collect(),
            BondConvention::DistinctPairs => {
                let mut seen = std::collections::BTreeSet::new();
                all.filter(|&(a, b)| seen.insert((a.min(b), a.max(b)))).collect()
            }
        }
    }

    /// Straight cycle along `axis` through the line at `base`.
    fn straight_cycle(&self, axis: usize, base: usize) -> Vec<usize> {
        (0..self.sizes[axis])
            .map(|t| {
                let mut s = [0; 3];
                s[axis] = t;
                self.edge(axis, self.shift(base, s))
            })
            .collect()
    }

    /// Edge mask flipping every `axis` edge that crosses the plane `x_axis = 0`.
    fn sector_generator(&self, axis: usize) -> Vec<usize> {
        (0..self.vertices())
            .filter(|&v| self.coords(v)[axis] == self.sizes[axis] - 1)
            .map(|v| self.edge(axis, v))
            .collect()
    }
}

/// Edge bits induced by a vertex bit assignment (`bit 1` is spin `-1`).
pub fn spin_to_edges(lat: &TorusLattice, spins: &[bool]) -> Vec<bool> {
    (0..lat.edges())
        .map(|e| {
            let (a, b) = lat.edge_ends(e);
            spins[a] ^ spins[b]
        })
        .collect()
}

pub fn is_admissible(lat: &TorusLattice, edges: &[bool]) -> bool {
    lat.plaquettes()
        .iter()
        .all(|p| !(edges[p[0]] ^ edges[p[1]] ^ edges[p[2]] ^ edges[p[3]]))
}

/// Holonomy sector of an admissible configuration; errors if two parallel
/// straight cycles disagree.
pub fn sector(lat: &TorusLattice, edges: &[bool]) -> Result<u8> {
    let mut out = 0u8;
    for axis in 0..3 {
        let mut value = None;
        for base in (0..lat.vertices()).filter(|&v| lat.coords(v)[axis] == 0) {
            let h = lat.straight_cycle(axis, base).iter().fold(false, |acc, &e| acc ^ edges[e]);
            match value {
                None => value = Some(h),
                Some(prev) if prev != h => {
                    return Err(Error::Structural(format!("sector along axis {axis} depends on the cycle")))
                }
                _ => {}
            }
        }
        if value == Some(true) {
            out |= 1 << axis;
        }
    }
    Ok(out)
}

/// Dense exponent histogram merged across threads.
#[derive(Clone, Debug)]
struct Histogram {
    offset: i64,
    counts: Vec<u64>,
}

impl Histogram {
    fn new(max_abs: i64) -> Self {
        Histogram { offset: max_abs, counts: vec![0; (2 * max_abs + 1) as usize] }
    }

    fn add(&mut self, exponent: i64, count: u64) {
        self.counts[(exponent + self.offset) as usize] += count;
    }

    fn merge(mut self, other: Histogram) -> Histogram {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self
    }

    fn to_laurent(&self) -> Laurent {
        Laurent::from_terms(
            self.counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| (i as i64 - self.offset, c)),
        )
    }
}

const CHUNK: u64 = 1 << 14;

fn sweep<F>(bits: usize, max_abs: i64, f: F) -> Histogram
where
    F: Fn(u64, &mut Histogram) + Sync,
{
    let total = 1u64 << bits;
    let chunks = total.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .fold(
            || Histogram::new(max_abs),
            |mut h, c| {
                for x in c * CHUNK..((c + 1) * CHUNK).min(total) {
                    f(x, &mut h);
                }
                h
            },
        )
        .reduce(|| Histogram::new(max_abs), Histogram::merge)
}

fn edge_mask(list: &[usize]) -> u64 {
    list.iter().fold(0u64, |m, &e| m | 1 << e)
}

/// `sum over spin configs of u^(sum over bonds sigma_i sigma_j)`.
pub fn z_spin(lat: &TorusLattice, conv: BondConvention) -> Result<Laurent> {
    let v = lat.vertices();
    if v > MAX_SPIN_BITS {
        return Err(Error::TooLarge(format!("2^{v} spin configurations exceed 2^{MAX_SPIN_BITS}")));
    }
    let bonds: Vec<(u64, u64)> = lat.bonds(conv).into_iter().map(|(a, b)| (1 << a, 1 << b)).collect();
    let nb = bonds.len() as i64;
    let h = sweep(v, nb, |x, h| {
        let unsatisfied = bonds.iter().filter(|(a, b)| (x & a == 0) != (x & b == 0)).count() as i64;
        h.add(nb - 2 * unsatisfied, 1);
    });
    Ok(h.to_laurent())
}

/// Edge configurations as 64-bit masks (needs `|E| <= 64`).
struct EdgeSystem {
    plaquettes: Vec<u64>,
    gradients: Vec<u64>,
    generators: [u64; 3],
    cycles: [Vec<u64>; 3],
    edges: usize,
}

impl EdgeSystem {
    fn new(lat: &TorusLattice) -> Result<Self> {
        if lat.edges() > 64 {
            return Err(Error::TooLarge(format!("{} edges exceed the 64-bit mask", lat.edges())));
        }
        let gradients = (0..lat.vertices())
            .map(|v| {
                let row: Vec<usize> = (0..lat.edges())
                    .filter(|&e| {
                        let (a, b) = lat.edge_ends(e);
                        (a == v) != (b == v)
                    })
                    .collect();
                edge_mask(&row)
            })
            .collect();
        let cycles = [0, 1, 2].map(|axis| {
            (0..lat.vertices())
                .filter(|&v| lat.coords(v)[axis] == 0)
                .map(|b| edge_mask(&lat.straight_cycle(axis, b)))
                .collect()
        });
        Ok(EdgeSystem {
            plaquettes: lat.plaquettes().iter().map(|p| edge_mask(p)).collect(),
            gradients,
            generators: [0, 1, 2].map(|a| edge_mask(&lat.sector_generator(a))),
            cycles,
            edges: lat.edges(),
        })
    }

    fn admissible(&self, x: u64) -> bool {
        self.plaquettes.iter().all(|p| (x & p).count_ones().is_multiple_of(2))
    }

    fn sector(&self, x: u64) -> Option<u8> {
        let mut s = 0u8;
        for (axis, cyc) in self.cycles.iter().enumerate() {
            let first = (x & cyc[0]).count_ones() % 2;
            if cyc.iter().any(|c| (x & c).count_ones() % 2 != first) {
                return None;
            }
            s |= (first as u8) << axis;
        }
        Some(s)
    }

    fn spin_sum(&self, x: u64) -> i64 {
        self.edges as i64 - 2 * x.count_ones() as i64
    }

    /// Every admissible configuration exactly once: gradients of spin
    /// configurations with vertex 0 up, times the 8 sector generators.
    fn admissible_configs(&self) -> impl ParallelIterator<Item = u64> + '_ {
        let free = self.gradients.len() - 1;
        (0..1u64 << free).into_par_iter().flat_map_iter(move |s| {
            let base = (0..free)
                .filter(|i| s >> i & 1 == 1)
                .fold(0u64, |m, i| m ^ self.gradients[i + 1]);
            (0..8u8).map(move |h| {
                (0..3).filter(|a| h >> a & 1 == 1).fold(base, |m, a| m ^ self.generators[a])
            })
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeSum {
    pub method: EdgeMethod,
    /// Indexed by sector bits (bit `a` set when the axis-`a` cycle is `-1`).
    pub sectors: [Laurent; 8],
    pub admissible: u64,
}

impl EdgeSum {
    pub fn total(&self) -> Laurent {
        self.sectors.iter().fold(Laurent::zero(), |acc, s| acc + s.clone())
    }

    pub fn trivial(&self) -> &Laurent {
        &self.sectors[0]
    }
}

/// `sum over plaquette-admissible edge configs of u^(sum of edge spins)`.
pub fn z_edge(lat: &TorusLattice, method: EdgeMethod) -> Result<EdgeSum> {
    let sys = EdgeSystem::new(lat)?;
    let e = lat.edges() as i64;
    let method = match method {
        EdgeMethod::Auto if lat.edges() <= MAX_EDGE_BITS => EdgeMethod::Exhaustive,
        EdgeMethod::Auto => EdgeMethod::SpinImage,
        m => m,
    };
    let per_sector: Vec<Histogram> = match method {
        EdgeMethod::Exhaustive => {
            if lat.edges() > MAX_EDGE_BITS {
                return Err(Error::TooLarge(format!(
                    "2^{} edge configurations exceed 2^{MAX_EDGE_BITS}",
                    lat.edges()
                )));
            }
            let total = 1u64 << lat.edges();
            let chunks = total.div_ceil(CHUNK);
            let empty = || vec![Histogram::new(e); 8];
            let merge = |a: Vec<Histogram>, b: Vec<Histogram>| a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect();
            (0..chunks)
                .into_par_iter()
                .map(|c| -> Result<Vec<Histogram>> {
                    let mut hs = empty();
                    for x in c * CHUNK..((c + 1) * CHUNK).min(total) {
                        if sys.admissible(x) {
                            let s = sys.sector(x).ok_or_else(|| {
                                Error::Structural(format!("ill-defined sector for edge configuration {x:#x}"))
                            })?;
                            hs[s as usize].add(sys.spin_sum(x), 1);
                        }
                    }
                    Ok(hs)
                })
                .try_reduce(empty, |a, b| Ok(merge(a, b)))?
        }
        _ => {
            if lat.vertices() - 1 > MAX_SPIN_BITS {
                return Err(Error::TooLarge(format!("spin image over {} vertices", lat.vertices())));
            }
            let found: Vec<(u8, i64)> = sys
                .admissible_configs()
                .map(|x| {
                    debug_assert!(sys.admissible(x));
                    sys.sector(x)
                        .map(|s| (s, sys.spin_sum(x)))
                        .ok_or_else(|| Error::Structural(format!("ill-defined sector for {x:#x}")))
                })
                .collect::<Result<_>>()?;
            let mut hs = vec![Histogram::new(e); 8];
            for (s, x) in found {
                hs[s as usize].add(x, 1);
            }
            hs
        }
    };
    let sectors: [Laurent; 8] = std::array::from_fn(|i| per_sector[i].to_laurent());
    let admissible = per_sector.iter().map(|h| h.counts.iter().sum::<u64>()).sum();
    Ok(EdgeSum { method, sectors, admissible })
}

/// Per-cell lookup: 12 local edge bits to the `W` entry `(exponent, coeff)`.
struct CellTable {
    /// Lattice edge of each local edge, per cell.
    cells: Vec<[usize; 12]>,
    entries: Vec<Option<(i64, i64)>>,
}

impl CellTable {
    fn new(lat: &TorusLattice, phi: &Lifted, dirs: &[usize]) -> Result<Self> {
        let w = build_w(phi, dirs)?;
        let local_edges = enumerate_faces(3, 1)?;
        let pos = |e: &FaceWord| local_edges.iter().position(|x| x == e).unwrap();
        let cube = FaceWord::full(3);
        let legs = |faces: Vec<FaceWord>| -> Vec<Vec<usize>> {
            faces
                .iter()
                .map(|f| face_color_facets(f, FacetOrder::Ascending).iter().map(pos).collect())
                .collect()
        };
        let (ins, outs) = (legs(incoming_facets(&cube)), legs(outgoing_facets(&cube)));
        let color = |bits: usize, leg: &[usize]| -> usize {
            leg.iter().fold(0, |c, &p| (c << 1) | (bits >> p & 1))
        };
        let entries = (0..1usize << 12)
            .map(|bits| -> Result<Option<(i64, i64)>> {
                let i: Vec<usize> = ins.iter().map(|l| color(bits, l)).collect();
                let o: Vec<usize> = outs.iter().map(|l| color(bits, l)).collect();
                let v = w.entry(&i, &o)?;
                if v.is_zero() {
                    return Ok(None);
                }
                if !v.is_monomial() {
                    return Err(Error::Binding(format!("W entry {v} is not a monomial")));
                }
                let (e, c) = v.terms().next().unwrap();
                let c = i64::try_from(c.clone()).map_err(|_| Error::Binding("W coefficient overflow".into()))?;
                Ok(Some((e, c)))
            })
            .collect::<Result<_>>()?;
        let cells = (0..lat.vertices())
            .map(|v| std::array::from_fn(|k| lat.cell_edge(v, &local_edges[k])))
            .collect();
        Ok(CellTable { cells, entries })
    }

    fn weight(&self, x: u64) -> Option<(i64, i64)> {
        let mut exp = 0;
        let mut coeff = 1;
        for cell in &self.cells {
            let bits = cell.iter().enumerate().fold(0usize, |b, (k, &e)| b | ((x >> e & 1) as usize) << k);
            let (e, c) = self.entries[bits]?;
            exp += e;
            coeff *= c;
        }
        Some((exp, coeff))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NetworkSum {
    pub dirs: Vec<usize>,
    pub value: Laurent,
    /// Configurations with nonzero product that are not admissible, and the
    /// reverse; both zero when the support matches (exhaustive sweep only).
    pub support_checked: bool,
    pub extra_support: u64,
    pub missing_support: u64,
}

/// Closed network of `W(dirs)` over all 3-cells, every plaquette shared by two
/// cells as the outgoing leg of one and the incoming leg of the other.
pub fn z_network(lat: &TorusLattice, phi: &Lifted, dirs: &[usize]) -> Result<NetworkSum> {
    let sys = EdgeSystem::new(lat)?;
    let table = CellTable::new(lat, phi, dirs)?;
    let max_abs = 6 * lat.vertices() as i64;
    if lat.edges() <= MAX_EDGE_BITS {
        let total = 1u64 << lat.edges();
        let chunks = total.div_ceil(CHUNK);
        let zero = || (Histogram::new(max_abs), 0u64, 0u64);
        let (h, extra, missing) = (0..chunks)
            .into_par_iter()
            .fold(zero, |(mut h, mut extra, mut missing), c| {
                for x in c * CHUNK..((c + 1) * CHUNK).min(total) {
                    let adm = sys.admissible(x);
                    match table.weight(x) {
                        Some((e, k)) => {
                            h.add(e, k as u64);
                            extra += u64::from(!adm);
                        }
                        None => missing += u64::from(adm),
                    }
                }
                (h, extra, missing)
            })
            .reduce(zero, |a, b| (a.0.merge(b.0), a.1 + b.1, a.2 + b.2));
        return Ok(NetworkSum {
            dirs: dirs.to_vec(),
            value: h.to_laurent(),
            support_checked: true,
            extra_support: extra,
            missing_support: missing,
        });
    }
    let terms: Vec<Option<(i64, i64)>> = sys.admissible_configs().map(|x| table.weight(x)).collect();
    let mut h = Histogram::new(max_abs);
    let mut missing = 0;
    for t in terms {
        match t {
            Some((e, k)) => h.add(e, k as u64),
            None => missing += 1,
        }
    }
    Ok(NetworkSum {
        dirs: dirs.to_vec(),
        value: h.to_laurent(),
        support_checked: false,
        extra_support: 0,
        missing_support: missing,
    })
}

/// How many cells choose each lattice edge under the local choice for `dirs`.
pub fn choice_coverage(lat: &TorusLattice, dirs: &[usize]) -> Result<BTreeMap<usize, usize>> {
    let local = local_choice(dirs)?;
    face_edge_map(&local)?;
    let mut m: BTreeMap<usize, usize> = (0..lat.edges()).map(|e| (e, 0)).collect();
    for v in 0..lat.vertices() {
        for e in &local {
            *m.get_mut(&lat.cell_edge(v, e)).unwrap() += 1;
        }
    }
    Ok(m)
}

#[derive(Clone, Debug, Serialize)]
pub struct Relation {
    pub sizes: [usize; 3],
    pub dirs: Vec<usize>,
    pub z_spin: Laurent,
    pub z_edge_sectors: [Laurent; 8],
    pub z_network: Laurent,
    /// `z_network(u) = c * sum over sectors of z_edge(u^kappa)`, if found.
    pub kappa: Option<i64>,
    pub c: Option<i64>,
    pub spin_is_twice_trivial: bool,
    pub coverage_exact: bool,
    /// Multiplicity to number of edges with it.
    pub coverage_histogram: BTreeMap<usize, usize>,
    pub support_matches: Option<bool>,
}

impl Relation {
    pub fn found(&self) -> bool {
        self.kappa.is_some() && self.spin_is_twice_trivial
    }

    pub fn to_json(&self) -> Value {
        let sectors: BTreeMap<String, Value> = self
            .z_edge_sectors
            .iter()
            .enumerate()
            .map(|(i, s)| (format!("{:03b}", i), s.to_json()))
            .collect();
        json!({
            "sizes": self.sizes,
            "dirs": self.dirs,
            "z_spin": self.z_spin.to_json(),
            "z_edge_sectors": sectors,
            "z_network": self.z_network.to_json(),
            "kappa": self.kappa,
            "c": self.c,
            "spin_is_twice_trivial": self.spin_is_twice_trivial,
            "coverage_exact": self.coverage_exact,
            "coverage_histogram": self.coverage_histogram,
            "support_matches": self.support_matches,
        })
    }
}

/// Measures the exact relations between the three sums on one lattice.
pub fn relate(lat: &TorusLattice, phi: &Lifted, dirs: &[usize]) -> Result<Relation> {
    let zs = z_spin(lat, BondConvention::AxisEdges)?;
    let ze = z_edge(lat, EdgeMethod::Auto)?;
    let zn = z_network(lat, phi, dirs)?;
    let total = ze.total();
    let mut found = None;
    'search: for kappa in [1i64, 2] {
        let scaled = total.substitute_power(kappa);
        if scaled.is_zero() {
            continue;
        }
        // c is forced by the leading coefficients
        let top = scaled.max_exponent().unwrap();
        let ratio = zn.value.coeff(top);
        let base = scaled.coeff(top);
        if ratio.clone() % base.clone() != 0.into() {
            continue;
        }
        let c = i64::try_from(ratio / base).unwrap_or(0);
        if c != 0 && scaled.scale(c) == zn.value {
            found = Some((kappa, c));
            break 'search;
        }
    }
    let coverage = choice_coverage(lat, dirs)?;
    let mut coverage_histogram = BTreeMap::new();
    for &k in coverage.values() {
        *coverage_histogram.entry(k).or_insert(0) += 1;
    }
    Ok(Relation {
        sizes: lat.sizes,
        dirs: dirs.to_vec(),
        spin_is_twice_trivial: zs == ze.trivial().scale(2),
        z_spin: zs,
        z_edge_sectors: ze.sectors.clone(),
        z_network: zn.value,
        kappa: found.map(|f| f.0),
        c: found.map(|f| f.1),
        coverage_exact: coverage.values().all(|&k| k == 1),
        coverage_histogram,
        support_matches: zn.support_checked.then_some(zn.extra_support == 0 && zn.missing_support == 0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recursion::phi;
    use proptest::prelude::*;

    fn l222() -> TorusLattice {
        TorusLattice::new([2, 2, 2]).unwrap()
    }

    /// Second implementation: explicit coordinates and a map of monomials.
    fn naive_z_spin(lat: &TorusLattice) -> BTreeMap<i64, u64> {
        let [l1, l2, l3] = lat.sizes;
        let mut out = BTreeMap::new();
        for cfg in 0u64..1 << lat.vertices() {
            let s = |x: usize, y: usize, z: usize| -> i64 {
                let v = (x % l1) + l1 * ((y % l2) + l2 * (z % l3));
                if cfg >> v & 1 == 0 {
                    1
                } else {
                    -1
                }
            };
            let mut h = 0;
            for z in 0..l3 {
                for y in 0..l2 {
                    for x in 0..l1 {
                        h += s(x, y, z) * (s(x + 1, y, z) + s(x, y + 1, z) + s(x, y, z + 1));
                    }
                }
            }
            *out.entry(h).or_insert(0) += 1;
        }
        out
    }

    #[test]
    fn lattice_shape() {
        let lat = l222();
        assert_eq!(lat.edges(), 3 * lat.vertices());
        let ps = lat.plaquettes();
        assert_eq!(ps.len(), 24);
        let mut per_edge = vec![0; lat.edges()];
        for p in &ps {
            for &e in p {
                per_edge[e] += 1;
            }
        }
        assert!(per_edge.iter().all(|&k| k == 4));
        assert_eq!(TorusLattice::parse("2x2x4").unwrap().sizes, [2, 2, 4]);
        assert!(TorusLattice::parse("2x2").is_err());
    }

    #[test]
    fn spin_sum_small() {
        let z = z_spin(&l222(), BondConvention::AxisEdges).unwrap();
        assert_eq!(z.eval_at_one(), 256.into());
        assert_eq!(z.max_exponent(), Some(24));
        assert_eq!(z.coeff(24), 2.into());
        assert!(z.is_palindromic());
        let naive = Laurent::from_terms(naive_z_spin(&l222()));
        assert_eq!(z, naive);
    }

    #[test]
    fn spin_sum_matches_naive_on_other_shapes() {
        for s in [[2, 2, 3], [3, 2, 2], [2, 3, 3]] {
            let lat = TorusLattice::new(s).unwrap();
            let z = z_spin(&lat, BondConvention::AxisEdges).unwrap();
            assert_eq!(z, Laurent::from_terms(naive_z_spin(&lat)), "{s:?}");
        }
    }

    #[test]
    fn distinct_pair_bonds_halve_at_side_two() {
        let z = z_spin(&l222(), BondConvention::DistinctPairs).unwrap();
        assert_eq!(z.max_exponent(), Some(12));
        let doubled = z_spin(&l222(), BondConvention::AxisEdges).unwrap();
        assert_eq!(z.substitute_power(2), doubled);
    }

    #[test]
    fn spin_cap() {
        let big = TorusLattice::new([4, 4, 4]).unwrap();
        assert!(matches!(z_spin(&big, BondConvention::AxisEdges), Err(Error::TooLarge(_))));
        assert!(matches!(z_edge(&big, EdgeMethod::Exhaustive), Err(Error::TooLarge(_))));
    }

    #[test]
    fn edge_sum_small() {
        let ze = z_edge(&l222(), EdgeMethod::Exhaustive).unwrap();
        assert_eq!(ze.admissible, 1024);
        assert_eq!(ze.total().eval_at_one(), 1024.into());
        assert_eq!(ze.trivial().eval_at_one(), 128.into());
        for s in &ze.sectors {
            assert_eq!(s.eval_at_one(), 128.into());
        }
        let zs = z_spin(&l222(), BondConvention::AxisEdges).unwrap();
        assert_eq!(ze.trivial().scale(2), zs);
    }

    #[test]
    fn edge_methods_agree() {
        let a = z_edge(&l222(), EdgeMethod::Exhaustive).unwrap();
        let b = z_edge(&l222(), EdgeMethod::SpinImage).unwrap();
        assert_eq!(a.sectors, b.sectors);
        assert_eq!(b.admissible, 1024);
    }

    #[test]
    fn spin_image_is_two_to_one_and_trivial() {
        let lat = l222();
        let mut seen: BTreeMap<Vec<bool>, usize> = BTreeMap::new();
        for cfg in 0u32..256 {
            let spins: Vec<bool> = (0..8).map(|v| cfg >> v & 1 == 1).collect();
            let edges = spin_to_edges(&lat, &spins);
            assert!(is_admissible(&lat, &edges));
            assert_eq!(sector(&lat, &edges).unwrap(), 0);
            *seen.entry(edges).or_default() += 1;
        }
        assert_eq!(seen.len(), 128);
        assert!(seen.values().all(|&k| k == 2));
    }

    #[test]
    fn larger_lattice_via_spin_image() {
        let lat = TorusLattice::new([2, 2, 4]).unwrap();
        let ze = z_edge(&lat, EdgeMethod::Auto).unwrap();
        assert_eq!(ze.method, EdgeMethod::SpinImage);
        assert_eq!(ze.admissible, 1 << 18);
        let zs = z_spin(&lat, BondConvention::AxisEdges).unwrap();
        assert_eq!(ze.trivial().scale(2), zs);
    }

    #[test]
    fn coverage_is_exact() {
        for d in [[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]] {
            let cov = choice_coverage(&l222(), &d).unwrap();
            assert_eq!(cov.len(), 24);
            assert!(cov.values().all(|&k| k == 1), "{d:?}");
        }
    }

    #[test]
    fn network_relation() {
        let phi = phi().unwrap();
        let rel = relate(&l222(), &phi, &[1, 2, 3]).unwrap();
        assert_eq!(rel.support_matches, Some(true));
        assert_eq!(rel.z_network.eval_at_one(), 1024.into());
        assert!(rel.z_network.is_even());
        assert_eq!(rel.kappa, Some(2));
        assert_eq!(rel.c, Some(1));
        assert!(rel.spin_is_twice_trivial);
        assert!(rel.coverage_exact);
        assert!(rel.found());
    }

    proptest! {
        #[test]
        fn random_edge_configs_sector_rule(x in 0u64..1 << 24, s in 0u32..256) {
            let lat = l222();
            let sys = EdgeSystem::new(&lat).unwrap();
            let edges: Vec<bool> = (0..24).map(|e| x >> e & 1 == 1).collect();
            prop_assert_eq!(is_admissible(&lat, &edges), sys.admissible(x));
            // admissible configs are a gradient times a sector generator product
            let spins: Vec<bool> = (0..8).map(|v| s >> v & 1 == 1).collect();
            let g = spin_to_edges(&lat, &spins);
            prop_assert!(is_admissible(&lat, &g));
            if sys.admissible(x) {
                prop_assert!(sector(&lat, &edges).is_ok());
            }
        }

        #[test]
        fn histogram_independent_of_partition(bits in 4usize..10) {
            let f = |x: u64, h: &mut Histogram| h.add((x.count_ones() as i64) - 5, 1);
            let a = sweep(bits, 16, f).to_laurent();
            let mut b = Histogram::new(16);
            for x in 0..1u64 << bits {
                f(x, &mut b);
            }
            prop_assert_eq!(a, b.to_laurent());
        }
    }
}
