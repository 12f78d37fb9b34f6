//! Uniform check reports and the runners behind each check id.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::codes::{coil_report, distance_two_code, reference_coil, subgraph_distance_audit, CubeSubgraph};
use crate::coloring::{path_independence_audit, vertex_shortcut, ColoringProblem};
use crate::correspondence::{check_n_simplex, check_r_poly_ybe, ising_r, ColorSet};
use crate::error::{Error, Result};
use crate::fourcube::{
    calibrate_formula, chain_cubes, check_tte_equivalence, check_twisted_tetrahedron, chosen_edges, star_table,
    structural_properties_audit, w_specializes_to_phi, AVariant, Side,
};
use crate::hypercube::{component_graph, expected_left_chain, expected_right_chain};
use crate::lattice::{relate, z_edge, z_network, z_spin, BondConvention, EdgeMethod, TorusLattice};
use crate::recursion::{check_lifted_solution, check_tetrahedron_matrix, image_coincidence, phi, phi_matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Not reproduced, but the criterion accepts a documented finding.
    Finding,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub check: String,
    pub params: Value,
    pub holds: bool,
    pub status: Status,
    pub counts: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram: Option<BTreeMap<String, u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub details: Value,
    pub runtime_ms: u128,
}

impl Report {
    fn new(check: &str, params: Value, status: Status) -> Self {
        Report {
            check: check.to_string(),
            params,
            holds: status != Status::Fail,
            status,
            counts: BTreeMap::new(),
            histogram: None,
            witness: None,
            details: Value::Null,
            runtime_ms: 0,
        }
    }

    fn count(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.counts.insert(key.to_string(), v.into());
        self
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn summary_line(&self) -> String {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Finding => "FINDING",
        };
        format!("{tag} {} ({} ms)", self.check, self.runtime_ms)
    }
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckId {
    YbeCorr,
    YbePoly,
    SimplexComponents,
    ColoringDeterminism,
    RecursionImage,
    Tetrahedron,
    Tables,
    Calibrate,
    Properties,
    Tte,
    TteEquivalence,
    Partition,
    Relate,
    Codes,
}

impl CheckId {
    pub const ALL: [CheckId; 14] = [
        CheckId::YbeCorr,
        CheckId::YbePoly,
        CheckId::SimplexComponents,
        CheckId::ColoringDeterminism,
        CheckId::RecursionImage,
        CheckId::Tetrahedron,
        CheckId::Tables,
        CheckId::Calibrate,
        CheckId::Properties,
        CheckId::Tte,
        CheckId::TteEquivalence,
        CheckId::Partition,
        CheckId::Relate,
        CheckId::Codes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::YbeCorr => "ybe-corr",
            CheckId::YbePoly => "ybe-poly",
            CheckId::SimplexComponents => "simplex-components",
            CheckId::ColoringDeterminism => "coloring-determinism",
            CheckId::RecursionImage => "recursion-image",
            CheckId::Tetrahedron => "tetrahedron",
            CheckId::Tables => "tables",
            CheckId::Calibrate => "calibrate",
            CheckId::Properties => "properties",
            CheckId::Tte => "tte",
            CheckId::TteEquivalence => "tte-equivalence",
            CheckId::Partition => "partition",
            CheckId::Relate => "relate",
            CheckId::Codes => "codes",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown check {s:?}")))
    }
}

/// Which sum the `partition` check evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PartitionMethod {
    #[default]
    All,
    Spin,
    Edge,
    Network,
}

impl FromStr for PartitionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Self::All),
            "spin" => Ok(Self::Spin),
            "edge" => Ok(Self::Edge),
            "network" => Ok(Self::Network),
            _ => Err(Error::Invalid(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub lattice: TorusLattice,
    pub dirs: Vec<usize>,
    pub method: PartitionMethod,
    pub variant: AVariant,
    /// Also run the other `A` in the `tte` check and report it as a finding.
    pub compare_variants: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            lattice: TorusLattice::new([2, 2, 2]).unwrap(),
            dirs: vec![1, 2, 3],
            method: PartitionMethod::All,
            variant: AVariant::Reversal,
            compare_variants: true,
        }
    }
}

pub fn parse_dirs(s: &str) -> Result<Vec<usize>> {
    let d: Vec<usize> = s
        .trim_matches(|c| c == '(' || c == ')')
        .split(',')
        .map(|x| x.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Invalid(format!("bad direction triple {s:?}")))?;
    let ok = d.len() == 3 && d.windows(2).all(|w| w[0] < w[1]) && d.iter().all(|&x| (1..=4).contains(&x));
    if !ok {
        return Err(Error::Invalid(format!("directions must be three increasing values in 1..=4: {s:?}")));
    }
    Ok(d)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializes")
}

/// Runs one check; multi-part checks return several reports.
pub fn run_check(id: CheckId, opts: &Options) -> Result<Vec<Report>> {
    let start = Instant::now();
    let mut reports = match id {
        CheckId::YbeCorr => vec![ybe_corr()?],
        CheckId::YbePoly => vec![ybe_poly()?],
        CheckId::SimplexComponents => vec![simplex_components()?],
        CheckId::ColoringDeterminism => vec![coloring_determinism()?],
        CheckId::RecursionImage => vec![recursion_image()?],
        CheckId::Tetrahedron => vec![tetrahedron()?],
        CheckId::Tables => vec![tables()?],
        CheckId::Calibrate => vec![calibrate()?],
        CheckId::Properties => vec![properties()?],
        CheckId::Tte => tte(opts)?,
        CheckId::TteEquivalence => vec![tte_equivalence(opts)?],
        CheckId::Partition => vec![partition(opts)?],
        CheckId::Relate => vec![relate_check(opts)?],
        CheckId::Codes => vec![codes()?],
    };
    let ms = start.elapsed().as_millis();
    if reports.len() == 1 {
        reports[0].runtime_ms = ms;
    } else {
        for r in &mut reports {
            if r.runtime_ms == 0 {
                r.runtime_ms = ms;
            }
        }
    }
    Ok(reports)
}

fn ybe_corr() -> Result<Report> {
    let s = check_n_simplex(&ising_r(), 2)?;
    let mut r = Report::new("ybe-corr", json!({"n": 2}), status(s.holds))
        .count("inputs", s.inputs_checked)
        .count("left_pairs", s.left_pairs)
        .count("right_pairs", s.right_pairs);
    r.witness = s.witness.as_ref().map(to_value);
    r.details = to_value(&s);
    Ok(r)
}

fn ybe_poly() -> Result<Report> {
    let p = check_r_poly_ybe()?;
    let mut r = Report::new("ybe-poly", json!({"r": "1 + t s(x)s"}), status(p.passed()))
        .count("nonzero_entries", p.equation.nonzero_entries);
    r.histogram = Some(p.equation.entries_histogram.clone());
    r.witness = p.equation.witness.as_ref().map(to_value);
    r.details = to_value(&p);
    Ok(r)
}

fn simplex_components() -> Result<Report> {
    let mut rows = Vec::new();
    let mut ok = true;
    for n in 2..=5 {
        let d = component_graph(n)?;
        let left_ok = d.left.is_transitive && d.left.chain == expected_left_chain(n);
        let right_ok = d.right.is_transitive && d.right.chain == expected_right_chain(n);
        let row_ok = d.components == 2 && left_ok && right_ok && d.left.chain.len() == n + 1;
        ok &= row_ok;
        rows.push(json!({
            "n": n,
            "components": d.components,
            "left": d.left.chain.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            "right": d.right.chain.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            "left_transitive": d.left.is_transitive,
            "right_transitive": d.right.is_transitive,
            "matches_expected": left_ok && right_ok,
        }));
    }
    let mut r = Report::new("simplex-components", json!({"n": [2, 5]}), status(ok)).count("levels", 4);
    r.details = Value::Array(rows);
    Ok(r)
}

fn coloring_determinism() -> Result<Report> {
    let rel = ising_r();
    let p = ColoringProblem::new(3, 2, &rel)?;
    let seeds = p.all_seeds()?;
    let mut all = BTreeSet::new();
    for s in &seeds {
        all.extend(p.propagate(s)?);
    }
    let shortcut = vertex_shortcut(3)?;
    let audit = path_independence_audit(4, 2, &rel, &ColorSet::ising())?;
    let ok = all.len() == 128 && all == shortcut && audit.independent;
    let mut r = Report::new("coloring-determinism", json!({"cube": 3, "audit_cube": 4, "n": 2}), status(ok))
        .count("seeds", seeds.len())
        .count("colorings", all.len())
        .count("shortcut", shortcut.len())
        .count("audit_seeds", audit.seeds_checked);
    r.witness = audit.mismatch.as_ref().map(to_value);
    r.details = json!({"equals_shortcut": all == shortcut, "audit": to_value(&audit)});
    Ok(r)
}

fn recursion_image() -> Result<Report> {
    let w = phi()?;
    let sol = check_lifted_solution(&w)?;
    let img = image_coincidence(&ising_r(), &w, 4)?;
    let ok = w.support() == 128 && w.is_partial_map() && sol.holds && img.coincides();
    let mut r = Report::new("recursion-image", json!({"n": 2, "cube": 4}), status(ok))
        .count("support", w.support())
        .count("tetrahedron_inputs", sol.inputs_checked)
        .count("image", img.image_size)
        .count("lifted_colorings", img.lifted_colorings);
    r.histogram = Some(w.fibers.iter().map(|(k, v)| (format!("outputs={k}"), *v as u64)).collect());
    if !w.is_partial_map() {
        let (input, outs) = w
            .correspondence
            .fanout()
            .into_iter()
            .filter(|(_, o)| o.len() > 1)
            .min()
            .expect("multi-valued input");
        r.witness = Some(json!({"reason": "input with several outputs", "input": input, "outputs": outs}));
    }
    r.details = json!({"phi": w.summary(), "tetrahedron": to_value(&sol), "image": to_value(&img)});
    Ok(r)
}

fn tetrahedron() -> Result<Report> {
    let m = phi_matrix(&phi()?)?;
    let e = check_tetrahedron_matrix(&m)?;
    let ok = e.holds && e.all_entries_equal("2");
    let mut r = Report::new("tetrahedron", json!({"slots": 6, "dim": 16}), status(ok))
        .count("inputs", e.inputs_checked)
        .count("nonzero_entries", e.nonzero_entries);
    r.histogram = Some(e.entries_histogram.clone());
    r.witness = e.witness.as_ref().map(to_value);
    r.details = e.to_json();
    Ok(r)
}

fn tables() -> Result<Report> {
    let mut ok = true;
    let mut sides = serde_json::Map::new();
    for side in [Side::Left, Side::Right] {
        let mut seen = BTreeSet::new();
        for cube in chain_cubes(side) {
            for e in chosen_edges(&cube, side)? {
                ok &= e.dim() == 1 && cube.contains(&e) && seen.insert(e);
            }
        }
        ok &= seen.len() == 12;
        sides.insert(format!("{side:?}").to_lowercase(), Value::String(star_table(side)));
    }
    let mut r = Report::new("tables", json!({"emit": "star"}), status(ok)).count("edges_per_side", 12);
    r.details = Value::Object(sides);
    Ok(r)
}

fn calibrate() -> Result<Report> {
    let c = calibrate_formula()?;
    let st = if c.reproduced() { Status::Pass } else { Status::Finding };
    let mut r = Report::new("calibrate", json!({}), st)
        .count("conventions", c.conventions_tried)
        .count("faces", c.faces_per_convention)
        .count("matching", c.matching.len())
        .count("nearest_mismatches", c.best_mismatches);
    if !c.reproduced() {
        r.witness = Some(to_value(&c.best_witness));
    }
    r.details = to_value(&c);
    Ok(r)
}

fn properties() -> Result<Report> {
    let p = structural_properties_audit()?;
    let mut r = Report::new("properties", json!({}), status(p.all_hold())).count("checks", p.checks.len());
    r.witness = p.checks.iter().find(|c| !c.holds).map(to_value);
    r.details = to_value(&p);
    Ok(r)
}

fn variant_name(v: AVariant) -> &'static str {
    match v {
        AVariant::Reversal => "reversal",
        AVariant::SwapWithinBlocks => "swap-within-blocks",
    }
}

fn tte(opts: &Options) -> Result<Vec<Report>> {
    let w = phi()?;
    let specializes = w_specializes_to_phi(&w, &opts.dirs)?;
    let mut out = Vec::new();
    let variants: Vec<AVariant> = if opts.compare_variants {
        std::iter::once(opts.variant)
            .chain(AVariant::all().into_iter().filter(|v| *v != opts.variant))
            .collect()
    } else {
        vec![opts.variant]
    };
    for (k, v) in variants.into_iter().enumerate() {
        let t0 = Instant::now();
        let t = check_twisted_tetrahedron(&w, v)?;
        let at_one_ok = t.at_one.holds && t.at_one.all_entries_equal("2");
        let ok = t.holds() && at_one_ok && specializes;
        let (name, st) = if k == 0 {
            ("tte".to_string(), status(ok))
        } else {
            (format!("tte[{}]", variant_name(v)), if ok { Status::Pass } else { Status::Finding })
        };
        let mut r = Report::new(&name, json!({"a": variant_name(v)}), st)
            .count("inputs", t.equation.inputs_checked)
            .count("nonzero_entries", t.equation.nonzero_entries)
            .count("mismatched_inputs", t.equation.mismatched_inputs);
        r.histogram = Some(t.equation.entries_histogram.clone());
        r.witness = t.equation.witness.as_ref().map(to_value);
        r.details = json!({
            "lhs": t.lhs_written,
            "rhs": t.rhs_written,
            "residual": t.residual,
            "at_one": {"holds": t.at_one.holds, "histogram": t.at_one.entries_histogram},
            "w_at_one_is_phi": specializes,
        });
        r.runtime_ms = t0.elapsed().as_millis();
        out.push(r);
    }
    Ok(out)
}

fn tte_equivalence(opts: &Options) -> Result<Report> {
    let e = check_tte_equivalence(&phi()?, opts.variant)?;
    let ok = e.holds() && e.conjugated_equation.holds;
    let mut r = Report::new("tte-equivalence", json!({"a": variant_name(opts.variant)}), status(ok))
        .count("inputs", e.sides_identical.inputs_checked);
    r.witness = e
        .sides_identical
        .witness
        .as_ref()
        .or(e.conjugated_equation.witness.as_ref())
        .map(to_value);
    r.details = to_value(&e);
    Ok(r)
}

fn partition(opts: &Options) -> Result<Report> {
    let lat = &opts.lattice;
    let params = json!({"size": lat.sizes, "dirs": opts.dirs});
    let mut details = serde_json::Map::new();
    let mut ok = true;
    let m = opts.method;
    if matches!(m, PartitionMethod::All | PartitionMethod::Spin) {
        let z = z_spin(lat, BondConvention::AxisEdges)?;
        ok &= z.eval_at_one() == num_bigint::BigInt::from(1u64) << lat.vertices() && z.is_palindromic();
        details.insert("z_spin".into(), z.to_json());
        details.insert(
            "z_spin_distinct_pairs".into(),
            z_spin(lat, BondConvention::DistinctPairs)?.to_json(),
        );
    }
    if matches!(m, PartitionMethod::All | PartitionMethod::Edge) {
        let ze = z_edge(lat, EdgeMethod::Auto)?;
        let sectors: BTreeMap<String, Value> =
            ze.sectors.iter().enumerate().map(|(i, s)| (format!("{i:03b}"), s.to_json())).collect();
        details.insert("z_edge_method".into(), json!(format!("{:?}", ze.method).to_lowercase()));
        details.insert("z_edge_sectors".into(), to_value(&sectors));
        details.insert("admissible".into(), json!(ze.admissible));
    }
    if matches!(m, PartitionMethod::All | PartitionMethod::Network) {
        let zn = z_network(lat, &phi()?, &opts.dirs)?;
        ok &= zn.missing_support == 0 && zn.extra_support == 0;
        details.insert("z_network".into(), to_value(&zn));
    }
    let mut r = Report::new("partition", params, status(ok)).count("vertices", lat.vertices());
    if let Some(a) = details.get("admissible") {
        r = r.count("admissible", a.clone());
    }
    r.details = Value::Object(details);
    Ok(r)
}

fn relate_check(opts: &Options) -> Result<Report> {
    let rel = relate(&opts.lattice, &phi()?, &opts.dirs)?;
    let ok = rel.found() && rel.coverage_exact && rel.support_matches != Some(false);
    let mut r = Report::new("relate", json!({"size": opts.lattice.sizes, "dirs": opts.dirs}), status(ok))
        .count("kappa", json!(rel.kappa))
        .count("c", json!(rel.c));
    r.histogram = Some(rel.coverage_histogram.iter().map(|(k, v)| (format!("chosen_by={k}"), *v as u64)).collect());
    if !rel.found() {
        r.witness = Some(json!({"z_network": rel.z_network.to_json(), "z_spin": rel.z_spin.to_json()}));
    }
    r.details = rel.to_json();
    Ok(r)
}

fn codes() -> Result<Report> {
    let coil = coil_report(&reference_coil(), 2);
    let code = distance_two_code();
    let d = code.min_distance()?;
    let audit = subgraph_distance_audit(&CubeSubgraph::chosen(Side::Left));
    let ok = coil.induced && coil.chain_code.holds && d == 2;
    let mut r = Report::new("codes", json!({"n": 4, "k": 2}), status(ok))
        .count("min_distance", d)
        .count("pairs", audit.pairs.len())
        .count("stated_counterexamples", audit.stated_counterexamples.len())
        .count("converse_counterexamples", audit.converse_counterexamples.len());
    r.details = json!({
        "coil": to_value(&coil),
        "code": code.rendered(),
        "complement_closed": code.is_complement_closed(),
        "distance_audit": {
            "stated_holds": audit.stated_holds,
            "converse_holds": audit.converse_holds,
            "pairs": to_value(&audit.pairs),
        },
    });
    Ok(r)
}
