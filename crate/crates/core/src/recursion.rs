//! The lift `rho_n`: an n-simplex solution `R` on `X` gives an
//! (n+1)-simplex correspondence on `X^(2n)` by reading the colors of the
//! n-faces of colored (n+1)-cubes.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::Value;

use crate::coloring::{ColoringProblem, CubeColoring};
use crate::correspondence::{associated_matrix, check_n_simplex, Color, ColorSet, Correspondence, SimplexReport};
use crate::error::{Error, Result};
use crate::hypercube::{enumerate_faces, face_color_facets, incoming_facets, outgoing_facets, FaceWord, FacetOrder, SimplexLayout};
use crate::scalar::Ring;
use crate::tensor::{check_equation, AmbientChain, EquationReport, SparseOperator};

/// Encode the face color of `face` under a coloring of its (n-1)-faces.
/// The first facet in face-color order is the most significant digit.
pub fn face_color(
    problem: &ColoringProblem<'_>,
    coloring: &CubeColoring,
    face: &FaceWord,
    order: FacetOrder,
) -> Color {
    let k = problem.r.colors() as Color;
    face_color_facets(face, order)
        .iter()
        .fold(0, |acc, f| acc * k + coloring.0[problem.face_index(f).expect("facet of the cube")])
}

#[derive(Clone, Debug)]
pub struct Lifted {
    pub n: usize,
    pub order: FacetOrder,
    pub colors: ColorSet,
    pub correspondence: Correspondence,
    /// Colorings of the (n+1)-cube that were read.
    pub colorings: usize,
    /// `outputs per input -> number of inputs`.
    pub fibers: BTreeMap<usize, usize>,
}

impl Lifted {
    pub fn support(&self) -> usize {
        self.correspondence.len()
    }

    /// rho is injective on colorings iff every coloring gave a distinct pair.
    pub fn injective(&self) -> bool {
        self.colorings == self.support()
    }

    pub fn is_partial_map(&self) -> bool {
        self.correspondence.is_partial_map()
    }

    pub fn summary(&self) -> Value {
        serde_json::json!({
            "n": self.n,
            "facet_order": format!("{:?}", self.order).to_lowercase(),
            "colorings": self.colorings,
            "support": self.support(),
            "injective": self.injective(),
            "domain": self.correspondence.domain_size(),
            "fibers": self.fibers,
            "partial_map": self.is_partial_map(),
        })
    }
}

/// `rho_n(R)`; fails unless `R` solves the n-simplex equation.
pub fn rho(r: &Correspondence, n: usize, base: &ColorSet, order: FacetOrder) -> Result<Lifted> {
    let check = check_n_simplex(r, n)?;
    if !check.holds {
        return Err(Error::NotASolution(format!("R fails the {n}-simplex equation")));
    }
    rho_unchecked(r, n, base, order)
}

fn rho_unchecked(r: &Correspondence, n: usize, base: &ColorSet, order: FacetOrder) -> Result<Lifted> {
    let problem = ColoringProblem::new(n + 1, n, r)?;
    let colorings = problem.enumerate_all();
    let cube = FaceWord::full(n + 1);
    let ins = incoming_facets(&cube);
    let outs = outgoing_facets(&cube);
    let pairs: Vec<(Vec<Color>, Vec<Color>)> = colorings
        .iter()
        .map(|c| {
            (
                ins.iter().map(|g| face_color(&problem, c, g, order)).collect(),
                outs.iter().map(|g| face_color(&problem, c, g, order)).collect(),
            )
        })
        .collect();
    let colors = base.power(2 * n)?;
    let correspondence = Correspondence::new(n + 1, colors.len(), pairs)?;
    Ok(Lifted {
        n,
        order,
        fibers: correspondence.fiber_sizes(),
        colors,
        correspondence,
        colorings: colorings.len(),
    })
}

/// The (n+1)-simplex check of a lifted correspondence.
pub fn check_lifted_solution(w: &Lifted) -> Result<SimplexReport> {
    check_n_simplex(&w.correspondence, w.n + 1)
}

#[derive(Clone, Debug, Serialize)]
pub struct ImageReport {
    pub cube_dim: usize,
    pub n: usize,
    pub base_colorings: usize,
    pub image_size: usize,
    pub lifted_colorings: usize,
    /// Image inside the lifted colorings.
    pub image_in_lifted: bool,
    /// Lifted colorings inside the image.
    pub lifted_in_image: bool,
    pub runtime_ms: u128,
}

impl ImageReport {
    pub fn coincides(&self) -> bool {
        self.image_in_lifted && self.lifted_in_image
    }
}

/// Compare `rho(C_N^{n-1}(X, R))` with `C_N^n(X^{2n}, W)` by two-sided inclusion.
pub fn image_coincidence(r: &Correspondence, w: &Lifted, cube_dim: usize) -> Result<ImageReport> {
    let start = Instant::now();
    let n = w.n;
    let base = ColoringProblem::new(cube_dim, n, r)?;
    let base_colorings = base.enumerate_all();
    let lifted_problem = ColoringProblem::new(cube_dim, n + 1, &w.correspondence)?;
    let n_faces = enumerate_faces(cube_dim, n)?;
    debug_assert_eq!(lifted_problem.faces(), n_faces.as_slice());
    let image: BTreeSet<CubeColoring> = base_colorings
        .iter()
        .map(|c| CubeColoring(n_faces.iter().map(|g| face_color(&base, c, g, w.order)).collect()))
        .collect();
    let lifted = lifted_problem.enumerate_all();
    Ok(ImageReport {
        cube_dim,
        n,
        base_colorings: base_colorings.len(),
        image_size: image.len(),
        lifted_colorings: lifted.len(),
        image_in_lifted: image.is_subset(&lifted),
        lifted_in_image: lifted.is_subset(&image),
        runtime_ms: start.elapsed().as_millis(),
    })
}

/// `Phi = rho_2(R)` for the Ising correspondence.
pub fn phi() -> Result<Lifted> {
    rho(&crate::correspondence::ising_r(), 2, &ColorSet::ising(), FacetOrder::Ascending)
}

/// 0/1 matrix of `Phi` on three legs of dimension 16.
pub fn phi_matrix(phi: &Lifted) -> Result<SparseOperator<BigInt>> {
    associated_matrix(&phi.correspondence)
}

/// Triplets `[input, output, 1]`; each index has 12 bits, leg 1 in the top
/// nibble, and within a leg `(i1, i2, o1, o2)` from high bit to low, bit
/// value 0 for spin +1.
pub fn phi_triplets_json(m: &SparseOperator<BigInt>) -> Value {
    serde_json::json!({
        "legs": m.dims(),
        "encoding": "12-bit: leg1<<8 | leg2<<4 | leg3; leg = i1<<3 | i2<<2 | o1<<1 | o2; bit 0 = +1",
        "entries": m.triplets_json(|x| Value::from(x.to_string().parse::<i64>().unwrap_or(0))),
    })
}

/// Both sides of the n-simplex equation for one operator, bound by the
/// cube layout. Chains are in written order.
pub fn simplex_chains<'a, S: Ring>(
    op: &'a SparseOperator<S>,
    layout: &SimplexLayout,
) -> Result<(AmbientChain<'a, S>, AmbientChain<'a, S>)> {
    let d = op.dims()[0];
    let written = |chain: &[(FaceWord, Vec<usize>)]| -> Vec<(&'a SparseOperator<S>, Vec<usize>)> {
        chain.iter().rev().map(|(_, s)| (op, s.clone())).collect()
    };
    Ok((
        AmbientChain::from_written(vec![d; layout.slots.len()], written(&layout.left))?,
        AmbientChain::from_written(vec![d; layout.slots.len()], written(&layout.right))?,
    ))
}

/// The tetrahedron equation for the matrix of `Phi` over 6 slots of dimension 16.
pub fn check_tetrahedron_matrix(m: &SparseOperator<BigInt>) -> Result<EquationReport> {
    let layout = SimplexLayout::new(3)?;
    let (lhs, rhs) = simplex_chains(m, &layout)?;
    let name = format!(
        "{} = {}",
        SimplexLayout::written(&layout.left).join(" "),
        SimplexLayout::written(&layout.right).join(" ")
    );
    check_equation(&name, &lhs, &rhs)
}

/// Basis permutation of one leg taking the ascending face-color encoding to
/// the descending one.
pub fn facet_order_permutation(n: usize, colors: usize) -> Vec<usize> {
    let size = colors.pow(2 * n as u32);
    (0..size)
        .map(|v| {
            let mut digits: Vec<usize> = (0..2 * n).rev().map(|k| v / colors.pow(k as u32) % colors).collect();
            digits[..n].reverse();
            digits[n..].reverse();
            digits.iter().fold(0, |a, &d| a * colors + d)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CovarianceReport {
    pub conjugate: bool,
    pub alternate_solves: bool,
}

/// Re-lift with descending facet order; the result must be the per-leg
/// conjugate of the original and solve the same equation.
pub fn leg_order_covariance(r: &Correspondence, n: usize, base: &ColorSet) -> Result<CovarianceReport> {
    let asc = rho(r, n, base, FacetOrder::Ascending)?;
    let desc = rho(r, n, base, FacetOrder::Descending)?;
    let perm = facet_order_permutation(n, base.len());
    let conj = asc.correspondence.relabel(|c| perm[c as usize] as Color)?;
    Ok(CovarianceReport {
        conjugate: conj == desc.correspondence,
        alternate_solves: check_lifted_solution(&desc)?.holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correspondence::ising_r;

    #[test]
    fn phi_support_and_fibers() {
        let p = phi().unwrap();
        assert_eq!(p.colorings, 128);
        assert_eq!(p.support(), 128);
        assert!(p.injective());
        // the vertex opposite the shared corner of the three incoming squares
        // is unconstrained, so every admissible input has two outputs
        assert_eq!(p.fibers, BTreeMap::from([(2, 64)]));
        assert!(!p.is_partial_map());
    }

    #[test]
    fn phi_is_a_tetrahedron_solution() {
        let p = phi().unwrap();
        assert!(check_lifted_solution(&p).unwrap().holds);
    }

    #[test]
    fn phi_matrix_shape() {
        let p = phi().unwrap();
        let m = phi_matrix(&p).unwrap();
        assert_eq!(m.dims(), &[16, 16, 16]);
        assert_eq!(m.nnz(), 128);
        assert!(m.triplets().iter().all(|(_, _, x)| *x == BigInt::from(1)));
        let col = m.column(0);
        assert!(col.iter().any(|(o, _)| *o == 0));
        let j = phi_triplets_json(&m);
        assert_eq!(j["entries"].as_array().unwrap().len(), 128);
    }

    #[test]
    fn lifted_identity_replicates_inputs() {
        let id = Correspondence::identity(2, 2).unwrap();
        let w = rho(&id, 2, &ColorSet::ising(), FacetOrder::Ascending).unwrap();
        assert!(w.is_partial_map());
        for (i, o) in w.correspondence.pairs() {
            assert_eq!(i, o);
        }
        assert!(check_lifted_solution(&w).unwrap().holds);
    }

    #[test]
    fn lifted_swap_solves() {
        let s = Correspondence::swap(2).unwrap();
        let w = rho(&s, 2, &ColorSet::ising(), FacetOrder::Ascending).unwrap();
        assert!(check_lifted_solution(&w).unwrap().holds);
    }

    #[test]
    fn rho_rejects_non_solutions() {
        let bad = Correspondence::new(
            2,
            2,
            [
                (vec![0, 0], vec![0, 1]),
                (vec![0, 1], vec![1, 1]),
                (vec![1, 0], vec![1, 0]),
                (vec![1, 1], vec![0, 0]),
            ],
        )
        .unwrap();
        assert!(matches!(
            rho(&bad, 2, &ColorSet::ising(), FacetOrder::Ascending),
            Err(Error::NotASolution(_))
        ));
    }

    #[test]
    fn image_coincides_on_the_four_cube() {
        let p = phi().unwrap();
        let rep = image_coincidence(&ising_r(), &p, 4).unwrap();
        assert_eq!(rep.base_colorings, 32768);
        assert_eq!(rep.image_size, 32768);
        assert!(rep.coincides(), "{rep:?}");
    }

    #[test]
    fn order_permutation_is_involutive() {
        let p = facet_order_permutation(2, 2);
        // (i1,i2,o1,o2) -> (i2,i1,o2,o1)
        assert_eq!(p[0b1000], 0b0100);
        assert_eq!(p[0b0010], 0b0001);
        for (x, &y) in p.iter().enumerate() {
            assert_eq!(p[y], x);
        }
    }

    #[test]
    fn covariance() {
        let rep = leg_order_covariance(&ising_r(), 2, &ColorSet::ising()).unwrap();
        assert!(rep.conjugate && rep.alternate_solves);
    }
}
