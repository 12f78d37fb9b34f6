//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use tetralab_core::codes::{
    chain_code_check, distance_two_code, is_induced_cycle, reference_coil, subgraph_distance_audit, CubeSubgraph,
};
use tetralab_core::coloring::{path_independence_audit, vertex_shortcut, ColoringProblem};
use tetralab_core::correspondence::{check_n_simplex, check_r_poly_ybe, ising_r, ColorSet};
use tetralab_core::fourcube::{
    calibrate_formula, check_tte_equivalence, check_twisted_tetrahedron, structural_properties_audit,
    w_specializes_to_phi, AVariant, Side,
};
use tetralab_core::hypercube::{component_graph, expected_left_chain, expected_right_chain};
use tetralab_core::lattice::{relate, z_edge, z_spin, BondConvention, EdgeMethod, TorusLattice};
use tetralab_core::recursion::{check_lifted_solution, check_tetrahedron_matrix, image_coincidence, phi, phi_matrix};
use tetralab_core::FaceWord;

type Criterion = (&'static str, fn() -> Outcome, Duration);

struct Outcome {
    ok: bool,
    note: String,
}

fn outcome(ok: bool, note: impl Into<String>) -> Outcome {
    Outcome { ok, note: note.into() }
}

fn words(f: &[FaceWord]) -> Vec<String> {
    f.iter().map(|x| x.to_string()).collect()
}

fn c1() -> Outcome {
    let r = check_n_simplex(&ising_r(), 2).unwrap();
    outcome(r.holds, format!("inputs {}, pairs {}/{}", r.inputs_checked, r.left_pairs, r.right_pairs))
}

fn c2() -> Outcome {
    let p = check_r_poly_ybe().unwrap();
    outcome(
        p.passed(),
        format!("identity in t {}, expansion {}/{}", p.holds, p.lhs_matches_expansion, p.rhs_matches_expansion),
    )
}

fn c3() -> Outcome {
    let mut ok = true;
    for n in 2..=5 {
        let d = component_graph(n).unwrap();
        ok &= d.components == 2
            && d.left.is_transitive
            && d.right.is_transitive
            && d.left.chain.len() == n + 1
            && d.right.chain.len() == n + 1
            && d.left.chain == expected_left_chain(n)
            && d.right.chain == expected_right_chain(n);
        if n == 3 {
            ok &= words(&d.left.chain) == ["0***", "*1**", "**0*", "***1"]
                && words(&d.right.chain) == ["***0", "**1*", "*0**", "1***"];
        }
    }
    outcome(ok, "n = 2..5")
}

fn c4() -> Outcome {
    let r = ising_r();
    let p = ColoringProblem::new(3, 2, &r).unwrap();
    let mut all = BTreeSet::new();
    for s in p.all_seeds().unwrap() {
        all.extend(p.propagate(&s).unwrap());
    }
    let shortcut = vertex_shortcut(3).unwrap();
    let audit = path_independence_audit(4, 2, &r, &ColorSet::ising()).unwrap();
    outcome(
        all.len() == 128 && all == shortcut && audit.independent,
        format!("colorings {}, equal to shortcut {}, N=4 audit {}", all.len(), all == shortcut, audit.independent),
    )
}

fn c5() -> Outcome {
    let w = phi().unwrap();
    let sol = check_lifted_solution(&w).unwrap();
    let img = image_coincidence(&ising_r(), &w, 4).unwrap();
    let ok = w.support() == 128 && w.is_partial_map() && sol.holds && img.coincides();
    outcome(
        ok,
        format!(
            "support {}, partial map {} (outputs per input {:?}), tetrahedron {}, image {}",
            w.support(),
            w.is_partial_map(),
            w.fibers,
            sol.holds,
            img.coincides()
        ),
    )
}

fn c6() -> Outcome {
    let e = check_tetrahedron_matrix(&phi_matrix(&phi().unwrap()).unwrap()).unwrap();
    outcome(
        e.holds && e.all_entries_equal("2") && e.inputs_checked == 1 << 24,
        format!("inputs {}, entries {:?}", e.inputs_checked, e.entries_histogram),
    )
}

fn c7() -> Outcome {
    let cal = calibrate_formula().unwrap();
    let documented = cal.reproduced()
        || (cal.best_mismatches > 0 && cal.best_witness.len() == cal.best_mismatches && !cal.best.is_empty());
    let props = structural_properties_audit().unwrap();
    let dominating = props.get("minimal_dominating").is_some_and(|c| c.holds);
    outcome(
        documented && props.all_hold() && dominating,
        if cal.reproduced() {
            format!("formula reproduced by {} conventions, properties {}", cal.matching.len(), props.all_hold())
        } else {
            format!(
                "formula not reproduced by any of {} conventions (nearest: {} of {} faces differ), properties {}",
                cal.conventions_tried,
                cal.best_mismatches,
                cal.faces_per_convention,
                props.all_hold()
            )
        },
    )
}

fn c8() -> Outcome {
    let w = phi().unwrap();
    let t = check_twisted_tetrahedron(&w, AVariant::Reversal).unwrap();
    let e = check_tte_equivalence(&w, AVariant::Reversal).unwrap();
    let at_one = t.at_one.holds && t.at_one.all_entries_equal("2") && t.at_one.nonzero_entries == 8192;
    let specializes = [[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]]
        .iter()
        .all(|d| w_specializes_to_phi(&w, d).unwrap());
    let ok = t.holds() && e.holds() && e.conjugated_equation.holds && at_one && specializes;
    let mut note = format!(
        "exact in u {}, conjugated form {}, forms identical {}, u=1 entries {:?}",
        t.holds(),
        e.conjugated_equation.holds,
        e.holds(),
        t.at_one.entries_histogram
    );
    if let Some(r) = &t.residual {
        note.push_str(&format!(", residual {r:?}, witness {:?}", t.equation.witness));
    }
    outcome(ok, note)
}

fn c9() -> Outcome {
    let lat = TorusLattice::new([2, 2, 2]).unwrap();
    let zs = z_spin(&lat, BondConvention::AxisEdges).unwrap();
    let ze = z_edge(&lat, EdgeMethod::Exhaustive).unwrap();
    let rel = relate(&lat, &phi().unwrap(), &[1, 2, 3]).unwrap();
    let ok = zs.eval_at_one() == 256.into()
        && ze.admissible == 1024
        && ze.trivial().eval_at_one() == 128.into()
        && zs == ze.trivial().scale(2)
        && rel.found()
        && rel.coverage_exact
        && rel.support_matches == Some(true);
    outcome(
        ok,
        format!(
            "z_spin(1) {}, admissible {}, trivial {}, kappa {:?}, c {:?}, coverage exact {}",
            zs.eval_at_one(),
            ze.admissible,
            ze.trivial().eval_at_one(),
            rel.kappa,
            rel.c,
            rel.coverage_exact
        ),
    )
}

fn c10() -> Outcome {
    let coil = reference_coil();
    let induced = is_induced_cycle(4, &coil);
    let chain = chain_code_check(&coil, 2);
    let d = distance_two_code().min_distance().unwrap();
    let audit = subgraph_distance_audit(&CubeSubgraph::chosen(Side::Left));
    let both = audit.pairs.len() == 45 && audit.edges == 12;
    outcome(
        induced && chain.holds && d == 2 && both,
        format!(
            "induced {induced}, (4,2) {}, min distance {d}, stated {} converse {}",
            chain.holds, audit.stated_holds, audit.converse_holds
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("correspondence YBE", c1, Duration::from_secs(1)),
        ("polynomial YBE", c2, Duration::from_secs(1)),
        ("two transitive simplices", c3, Duration::from_secs(10)),
        ("coloring engine", c4, Duration::from_secs(60)),
        ("recursion", c5, Duration::from_secs(300)),
        ("tetrahedron matrix equation", c6, Duration::from_secs(600)),
        ("tables and formula", c7, Duration::from_secs(10)),
        ("twisted tetrahedron equation", c8, Duration::from_secs(1800)),
        ("partition reconciliation", c9, Duration::from_secs(300)),
        ("codes", c10, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (k, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        let took = start.elapsed();
        let ok = o.ok && took <= *budget;
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {:>2} {name}: {} [{:.2}s / {}s]",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            o.note,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
