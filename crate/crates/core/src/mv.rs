//! Betti numbers of the whole manifold, assembled from the cut pieces.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::cohomology::{alternating_sum, complement_cohomology, fold_component_invariants, CohomologyError, ToricCohomology};
use crate::invariants::{detect_prismatic, is_orientable, lattice_quotient_nx, InvariantError};
use crate::lattice::AbelianGroup;
use crate::template::OrigamiTemplate;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MvError {
    #[error("closed form needs a 4-dimensional manifold, got dimension {0}")]
    WrongDimension(usize),
    #[error("template is not prismatic")]
    NotPrismatic,
    #[error("template has dangling edges")]
    DanglingEdges,
    #[error("template graph has an odd cycle, so the manifold is not orientable")]
    NonOrientable,
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Betti {
    Known(u64),
    Unknown,
}

impl Betti {
    pub fn value(self) -> Option<u64> {
        match self {
            Betti::Known(v) => Some(v),
            Betti::Unknown => None,
        }
    }
}

impl fmt::Display for Betti {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Betti::Known(v) => write!(f, "{v}"),
            Betti::Unknown => write!(f, "?"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BettiMethod {
    ClosedFormDim4,
    KunnethPrismatic,
    ConstraintSolved,
    Underdetermined,
}

impl BettiMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            BettiMethod::ClosedFormDim4 => "closed_form_dim4",
            BettiMethod::KunnethPrismatic => "kunneth_prismatic",
            BettiMethod::ConstraintSolved => "constraint_solved",
            BettiMethod::Underdetermined => "underdetermined",
        }
    }

    pub fn provenance(self) -> &'static str {
        match self {
            BettiMethod::ClosedFormDim4 => {
                "four-dimensional closed form: b1 = b3 = 1 + R - L, b2 = #fixed points + 2R - 2L, or (1,2,2,2,1) when prismatic"
            }
            BettiMethod::KunnethPrismatic => "Kunneth formula for T^2 x Y with Y the toric manifold of the fiber polytope",
            BettiMethod::ConstraintSolved => {
                "Mayer-Vietoris bookkeeping over the cut pieces: fixed low degrees, Poincare duality and the alternating-sum identity"
            }
            BettiMethod::Underdetermined => {
                "Mayer-Vietoris bookkeeping over the cut pieces leaves some degrees open; residual relations listed"
            }
        }
    }
}

impl fmt::Display for BettiMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `Σ_k coeffs[k]·b^k = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearRelation {
    pub coeffs: BTreeMap<usize, i64>,
    pub rhs: i64,
}

impl LinearRelation {
    pub fn equal(a: usize, b: usize) -> Self {
        LinearRelation {
            coeffs: BTreeMap::from([(a, 1), (b, -1)]),
            rhs: 0,
        }
    }

    fn substitute(&self, fixed: &[Option<u64>]) -> LinearRelation {
        let mut coeffs = BTreeMap::new();
        let mut rhs = self.rhs;
        for (&k, &c) in &self.coeffs {
            match fixed[k] {
                Some(v) => rhs -= c * v as i64,
                None => *coeffs.entry(k).or_insert(0) += c,
            }
        }
        coeffs.retain(|_, c| *c != 0);
        LinearRelation { coeffs, rhs }
    }

    pub fn holds(&self, betti: &[u64]) -> bool {
        self.coeffs.iter().map(|(&k, &c)| c * betti[k] as i64).sum::<i64>() == self.rhs
    }
}

impl fmt::Display for LinearRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(usize, i64)> = self.coeffs.iter().map(|(&k, &c)| (k, c)).collect();
        if let [(a, 1), (b, -1)] = terms[..] {
            if self.rhs == 0 {
                return write!(f, "b{a} = b{b}");
            }
        }
        for (i, &(k, c)) in terms.iter().enumerate() {
            let sign = if c < 0 { "-" } else { "+" };
            match (i, c.abs()) {
                (0, 1) if c < 0 => write!(f, "-b{k}")?,
                (0, 1) => write!(f, "b{k}")?,
                (0, _) => write!(f, "{c} b{k}")?,
                (_, 1) => write!(f, " {sign} b{k}")?,
                (_, m) => write!(f, " {sign} {m} b{k}")?,
            }
        }
        if terms.is_empty() {
            write!(f, "0")?;
        }
        write!(f, " = {}", self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiReport {
    /// Real dimension `2n` of the manifold.
    pub dim: usize,
    pub betti: Vec<Betti>,
    pub method: BettiMethod,
    pub constraints: Vec<LinearRelation>,
    /// Torsion of `H²(M; Z)`; absent when the manifold is not orientable.
    pub torsion_h2: Option<AbelianGroup>,
    pub euler_characteristic: i64,
    pub orientable: bool,
    pub notes: Vec<String>,
}

impl BettiReport {
    pub fn values(&self) -> Option<Vec<u64>> {
        self.betti.iter().map(|b| b.value()).collect()
    }

    pub fn is_determined(&self) -> bool {
        self.values().is_some()
    }
}

fn known(values: &[u64]) -> Vec<Betti> {
    values.iter().map(|&v| Betti::Known(v)).collect()
}

fn fixed_point_count(t: &OrigamiTemplate) -> i64 {
    t.orbit_space_summary().fixed_point_count as i64
}

pub fn betti_dim4(t: &OrigamiTemplate) -> Result<BettiReport, MvError> {
    if t.dim() != 2 {
        return Err(MvError::WrongDimension(2 * t.dim()));
    }
    if t.has_dangling_edges() {
        return Err(MvError::DanglingEdges);
    }
    if !is_orientable(t) {
        return Err(MvError::NonOrientable);
    }
    let stats = t.graph_stats();
    let chi = fixed_point_count(t);
    let values: Vec<u64> = if detect_prismatic(t)?.prismatic {
        vec![1, 2, 2, 2, 1]
    } else {
        let ell = stats.cycle_rank as u64;
        let b2 = chi + 2 * stats.edge_count as i64 - 2 * stats.vertex_count as i64;
        assert!(b2 >= 0, "negative second Betti number");
        vec![1, ell, b2 as u64, ell, 1]
    };
    let betti_usize: Vec<usize> = values.iter().map(|&v| v as usize).collect();
    assert_eq!(alternating_sum(&betti_usize), chi);
    Ok(BettiReport {
        dim: 4,
        betti: known(&values),
        method: BettiMethod::ClosedFormDim4,
        constraints: Vec::new(),
        torsion_h2: Some(lattice_quotient_nx(t).torsion()),
        euler_characteristic: chi,
        orientable: true,
        notes: Vec::new(),
    })
}

pub fn betti_prismatic(t: &OrigamiTemplate) -> Result<BettiReport, MvError> {
    let info = detect_prismatic(t)?;
    let Some(fiber) = info.fiber else {
        return Err(MvError::NotPrismatic);
    };
    let n = t.dim();
    let h = fiber.h_vector();
    let torus = [1i64, 2, 1];
    let values: Vec<u64> = (0..=2 * n)
        .map(|k| {
            (0..=2)
                .filter(|&j| j <= k && (k - j) % 2 == 0 && (k - j) / 2 < h.len())
                .map(|j| torus[j] * h[(k - j) / 2])
                .sum::<i64>() as u64
        })
        .collect();
    let chi = fixed_point_count(t);
    assert_eq!(chi, 0, "a prismatic manifold has no fixed points");
    Ok(BettiReport {
        dim: 2 * n,
        betti: known(&values),
        method: BettiMethod::KunnethPrismatic,
        constraints: Vec::new(),
        torsion_h2: Some(AbelianGroup::trivial()),
        euler_characteristic: chi,
        orientable: true,
        notes: Vec::new(),
    })
}

/// The rank data and identities available from the Mayer–Vietoris sequence
/// of the cover by neighbourhoods of the pieces `A_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MvSystem {
    /// Real dimension `2n`.
    pub dim: usize,
    /// Betti numbers of `A_i`, degrees `0..=2n`, per template vertex.
    pub a_ranks: Vec<Vec<usize>>,
    /// Betti numbers of the fold components, degrees `0..=2n−1`, per
    /// ordinary edge.
    pub z_ranks: Vec<Vec<usize>>,
    pub fixed: Vec<Option<u64>>,
    pub relations: Vec<LinearRelation>,
    pub orientable: bool,
    pub euler_characteristic: i64,
}

pub fn mv_constraint_system(t: &OrigamiTemplate) -> Result<MvSystem, MvError> {
    if t.has_dangling_edges() {
        return Err(MvError::DanglingEdges);
    }
    let n = t.dim();
    let top = 2 * n;
    let orientable = is_orientable(t);
    let mut a_ranks = Vec::new();
    for v in 0..t.vertices().len() {
        let folds = t.fold_facets(v);
        let p = t.polytope(v);
        a_ranks.push(if folds.is_empty() {
            ToricCohomology::new(p).betti()
        } else {
            complement_cohomology(p, &folds)?.betti()
        });
    }
    let mut z_ranks = Vec::new();
    for (_, [a, _]) in t.ordinary_edges() {
        z_ranks.push(fold_component_invariants(t.polytope(a.vertex), a.facet)?.betti);
    }
    let chi_a: i64 = a_ranks.iter().map(|r| alternating_sum(r)).sum();
    let chi_z: i64 = z_ranks.iter().map(|r| alternating_sum(r)).sum();
    assert_eq!(chi_z, 0);
    let chi = fixed_point_count(t);
    assert_eq!(chi_a - chi_z, chi, "Euler characteristic is not additive over the pieces");

    let mut fixed = vec![None; top + 1];
    if t.ordinary_edges().next().is_none() {
        for (k, &b) in a_ranks[0].iter().enumerate() {
            fixed[k] = Some(b as u64);
        }
    } else {
        fixed[0] = Some(1);
        if orientable {
            let b1 = (t.graph_stats().cycle_rank + lattice_quotient_nx(t).free_rank()) as u64;
            fixed[1] = Some(b1);
            fixed[top - 1] = Some(b1);
            fixed[top] = Some(1);
        } else {
            fixed[top] = Some(0);
        }
    }
    let mut relations = Vec::new();
    if orientable {
        for k in 0..n {
            relations.push(LinearRelation::equal(k, top - k));
        }
    }
    relations.push(LinearRelation {
        coeffs: (0..=top).map(|k| (k, if k % 2 == 0 { 1 } else { -1 })).collect(),
        rhs: chi_a - chi_z,
    });
    Ok(MvSystem {
        dim: top,
        a_ranks,
        z_ranks,
        fixed,
        relations,
        orientable,
        euler_characteristic: chi,
    })
}

/// Solves the constraint system without any further rank information.
pub fn solve_constraints(system: &MvSystem) -> (Vec<Betti>, BettiMethod, Vec<LinearRelation>) {
    let residual: Vec<LinearRelation> = system
        .relations
        .iter()
        .map(|r| r.substitute(&system.fixed))
        .collect();
    for r in &residual {
        assert!(!r.coeffs.is_empty() || r.rhs == 0, "fixed Betti numbers violate {r}");
    }
    let open: Vec<LinearRelation> = residual.into_iter().filter(|r| !r.coeffs.is_empty()).collect();
    let unknown: Vec<usize> = (0..=system.dim).filter(|&k| system.fixed[k].is_none()).collect();
    if unknown.is_empty() {
        let betti = system.fixed.iter().map(|v| Betti::Known(v.unwrap())).collect();
        return (betti, BettiMethod::ConstraintSolved, Vec::new());
    }

    // Identify unknowns tied by equalities, then read the single remaining
    // alternating relation in terms of class representatives.
    let mut class_of: BTreeMap<usize, usize> = unknown.iter().map(|&k| (k, k)).collect();
    let mut other = Vec::new();
    for r in &open {
        let terms: Vec<(usize, i64)> = r.coeffs.iter().map(|(&k, &c)| (k, c)).collect();
        match terms[..] {
            [(a, 1), (b, -1)] if r.rhs == 0 => {
                let (ra, rb) = (class_of[&a], class_of[&b]);
                let (lo, hi) = (ra.min(rb), ra.max(rb));
                for c in class_of.values_mut() {
                    if *c == hi {
                        *c = lo;
                    }
                }
            }
            _ => other.push(r.clone()),
        }
    }
    let mut candidates: Vec<Vec<Option<u64>>> = Vec::new();
    if let [alt] = &other[..] {
        let mut coeff: BTreeMap<usize, i64> = BTreeMap::new();
        for (&k, &c) in &alt.coeffs {
            *coeff.entry(class_of[&k]).or_insert(0) += c;
        }
        coeff.retain(|_, c| *c != 0);
        let reps: BTreeSet<usize> = class_of.values().copied().collect();
        let all_covered = reps.iter().all(|r| coeff.contains_key(r));
        let same_sign = coeff.values().all(|&c| c > 0) || coeff.values().all(|&c| c < 0);
        if all_covered && same_sign {
            let flip = if coeff.values().all(|&c| c < 0) { -1 } else { 1 };
            let target = alt.rhs * flip;
            let weights: Vec<(usize, i64)> = coeff.iter().map(|(&k, &c)| (k, c * flip)).collect();
            let mut assignment = BTreeMap::new();
            enumerate_solutions(&weights, target, &mut assignment, &mut |sol| {
                let values = (0..=system.dim)
                    .map(|k| system.fixed[k].or_else(|| sol.get(&class_of[&k]).map(|&v| v as u64)))
                    .collect();
                candidates.push(values);
            });
        }
    }
    match &candidates[..] {
        [single] => {
            let betti = single.iter().map(|v| Betti::Known(v.expect("all classes assigned"))).collect();
            (betti, BettiMethod::ConstraintSolved, Vec::new())
        }
        _ => {
            let betti = system
                .fixed
                .iter()
                .map(|v| v.map_or(Betti::Unknown, Betti::Known))
                .collect();
            (betti, BettiMethod::Underdetermined, open)
        }
    }
}

fn enumerate_solutions(
    weights: &[(usize, i64)],
    target: i64,
    assignment: &mut BTreeMap<usize, i64>,
    emit: &mut dyn FnMut(&BTreeMap<usize, i64>),
) {
    let Some((&(class, w), rest)) = weights.split_first() else {
        if target == 0 {
            emit(assignment);
        }
        return;
    };
    let mut v = 0;
    while v * w <= target {
        assignment.insert(class, v);
        enumerate_solutions(rest, target - v * w, assignment, emit);
        v += 1;
    }
    assignment.remove(&class);
}

pub fn solve_betti(t: &OrigamiTemplate) -> Result<BettiReport, MvError> {
    if t.has_dangling_edges() {
        return Err(MvError::DanglingEdges);
    }
    let orientable = is_orientable(t);
    if orientable && t.dim() == 2 {
        return betti_dim4(t);
    }
    if orientable && detect_prismatic(t)?.prismatic {
        return betti_prismatic(t);
    }
    let system = mv_constraint_system(t)?;
    let (betti, method, constraints) = solve_constraints(&system);
    let mut notes = Vec::new();
    if !orientable {
        notes.push("template graph has an odd cycle: the manifold is not orientable, so b^top = 0 and no duality is used".into());
    }
    if method == BettiMethod::Underdetermined {
        notes.push("connecting maps of the Mayer-Vietoris sequence are not computed; every solution of the residual relations is possible a priori".into());
    }
    if let Some(values) = betti.iter().map(|b| b.value()).collect::<Option<Vec<u64>>>() {
        let as_usize: Vec<usize> = values.iter().map(|&v| v as usize).collect();
        assert_eq!(alternating_sum(&as_usize), system.euler_characteristic);
    }
    Ok(BettiReport {
        dim: system.dim,
        betti,
        method,
        constraints,
        torsion_h2: orientable.then(|| lattice_quotient_nx(t).torsion()),
        euler_characteristic: system.euler_characteristic,
        orientable,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_display() {
        assert_eq!(LinearRelation::equal(2, 4).to_string(), "b2 = b4");
        let r = LinearRelation {
            coeffs: BTreeMap::from([(2, 1), (3, -1), (4, 1)]),
            rhs: 6,
        };
        assert_eq!(r.to_string(), "b2 - b3 + b4 = 6");
        let r = LinearRelation {
            coeffs: BTreeMap::from([(1, -1), (2, 2)]),
            rhs: -3,
        };
        assert_eq!(r.to_string(), "-b1 + 2 b2 = -3");
    }

    fn system(fixed: Vec<Option<u64>>, relations: Vec<LinearRelation>) -> MvSystem {
        MvSystem {
            dim: fixed.len() - 1,
            a_ranks: Vec::new(),
            z_ranks: Vec::new(),
            fixed,
            relations,
            orientable: true,
            euler_characteristic: 0,
        }
    }

    fn alternating(top: usize, rhs: i64) -> LinearRelation {
        LinearRelation {
            coeffs: (0..=top).map(|k| (k, if k % 2 == 0 { 1 } else { -1 })).collect(),
            rhs,
        }
    }

    #[test]
    fn single_unknown_class_is_solved() {
        let s = system(
            vec![Some(1), Some(1), None, Some(1), Some(1)],
            vec![LinearRelation::equal(0, 4), LinearRelation::equal(1, 3), alternating(4, 4)],
        );
        let (betti, method, _) = solve_constraints(&s);
        assert_eq!(method, BettiMethod::ConstraintSolved);
        assert_eq!(betti[2], Betti::Known(4));
    }

    #[test]
    fn mixed_signs_stay_open() {
        let s = system(
            vec![Some(1), Some(1), None, None, None, Some(1), Some(1)],
            vec![
                LinearRelation::equal(0, 6),
                LinearRelation::equal(1, 5),
                LinearRelation::equal(2, 4),
                alternating(6, 6),
            ],
        );
        let (betti, method, residual) = solve_constraints(&s);
        assert_eq!(method, BettiMethod::Underdetermined);
        assert_eq!(betti[3], Betti::Unknown);
        let shown: Vec<String> = residual.iter().map(ToString::to_string).collect();
        assert_eq!(shown, vec!["b2 = b4", "b2 - b3 + b4 = 6"]);
    }

    #[test]
    fn same_sign_with_one_solution() {
        let s = system(
            vec![Some(1), None, None, None, Some(0)],
            vec![alternating(4, 1)],
        );
        let (_, method, _) = solve_constraints(&s);
        assert_eq!(method, BettiMethod::Underdetermined);
        let s = system(vec![Some(1), None, Some(0)], vec![alternating(2, 0)]);
        let (betti, method, _) = solve_constraints(&s);
        assert_eq!(method, BettiMethod::ConstraintSolved);
        assert_eq!(betti[1], Betti::Known(1));
    }
}
