//! Fundamental group, first homology, prismatic structure and Euler
//! characteristic of the manifold described by a template.

use std::fmt;

use thiserror::Error;

use crate::lattice::{cokernel_structure, AbelianGroup};
use crate::polytope::DelzantPolytope;
use crate::template::OrigamiTemplate;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("template has dangling edges and cycles; the fundamental group is only known for trees")]
    BoundaryWithCycles,
    #[error("template graph has an odd cycle, so the manifold is not orientable")]
    NonOrientable,
    #[error("template has dangling edges")]
    DanglingEdges,
    #[error("lattice quotient is Z but the template is not a prism cycle: {0}")]
    StructuralContradiction(String),
}

/// `π₁(M) ≅ cyclic_part × F_free_rank`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pi1Descriptor {
    pub cyclic_part: AbelianGroup,
    pub free_rank: usize,
}

impl Pi1Descriptor {
    pub fn is_trivial(&self) -> bool {
        self.cyclic_part.is_trivial() && self.free_rank == 0
    }
}

impl fmt::Display for Pi1Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.cyclic_part.is_trivial() {
            parts.push(self.cyclic_part.to_string());
        }
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("F_{r}")),
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" x "))
        }
    }
}

/// `N / N_X`, where `N_X` is spanned by the normals of the orbit-space facets.
pub fn lattice_quotient_nx(t: &OrigamiTemplate) -> AbelianGroup {
    cokernel_structure(&t.orbit_space_summary().normal_matrix)
}

pub fn is_orientable(t: &OrigamiTemplate) -> bool {
    t.graph_stats().bipartite
}

pub fn fundamental_group(t: &OrigamiTemplate) -> Result<Pi1Descriptor, InvariantError> {
    let stats = t.graph_stats();
    if !stats.bipartite {
        return Err(InvariantError::NonOrientable);
    }
    if stats.dangling_count > 0 && stats.cycle_rank > 0 {
        return Err(InvariantError::BoundaryWithCycles);
    }
    let cyclic_part = lattice_quotient_nx(t);
    assert!(
        cyclic_part.is_cyclic(),
        "N/N_X = {cyclic_part} is not trivial, finite cyclic or infinite cyclic"
    );
    if stats.acyclic && stats.dangling_count == 0 {
        assert!(cyclic_part.is_trivial(), "acyclic template with N/N_X = {cyclic_part}");
    }
    Ok(Pi1Descriptor {
        cyclic_part,
        free_rank: stats.cycle_rank,
    })
}

/// Non-orientable manifolds are never simply connected.
pub fn simply_connected(t: &OrigamiTemplate) -> Result<bool, InvariantError> {
    match fundamental_group(t) {
        Ok(g) => Ok(g.is_trivial()),
        Err(InvariantError::NonOrientable) => Ok(false),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstHomology {
    pub group: AbelianGroup,
    /// Torsion subgroup of `H²(M; Z)`.
    pub h2_torsion: AbelianGroup,
}

pub fn first_homology(t: &OrigamiTemplate) -> Result<FirstHomology, InvariantError> {
    let pi1 = fundamental_group(t)?;
    Ok(FirstHomology {
        group: AbelianGroup::free(pi1.free_rank).direct_sum(&pi1.cyclic_part),
        h2_torsion: pi1.cyclic_part.torsion(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrismaticInfo {
    pub prismatic: bool,
    pub fiber: Option<DelzantPolytope>,
}

pub fn detect_prismatic(t: &OrigamiTemplate) -> Result<PrismaticInfo, InvariantError> {
    if t.has_dangling_edges() {
        return Err(InvariantError::DanglingEdges);
    }
    if !is_orientable(t) {
        return Err(InvariantError::NonOrientable);
    }
    if !lattice_quotient_nx(t).is_infinite_cyclic() {
        return Ok(PrismaticInfo {
            prismatic: false,
            fiber: None,
        });
    }
    let contradiction = |msg: String| Err(InvariantError::StructuralContradiction(msg));
    let stats = t.graph_stats();
    if stats.vertex_count != stats.edge_count {
        return contradiction(format!(
            "graph has {} vertices and {} edges",
            stats.vertex_count, stats.edge_count
        ));
    }
    for (v, tv) in t.vertices().iter().enumerate() {
        let folds = t.fold_facets(v);
        let p = &tv.polytope;
        let [a, b] = folds[..] else {
            return contradiction(format!("`{}` has {} fold facets", tv.id, folds.len()));
        };
        let others: Vec<usize> = (0..p.facet_count()).filter(|f| !folds.contains(f)).collect();
        let covers = |s: usize| p.adjacent_facets(s).iter().copied().collect::<Vec<_>>() == others;
        if !covers(a) || !covers(b) {
            return contradiction(format!("fold facets of `{}` are not the two caps of a prism", tv.id));
        }
    }
    let first = t.fold_facets(0)[0];
    let (fiber, _) = t
        .polytope(0)
        .facet_subpolytope(first)
        .expect("fold facet index is valid");
    Ok(PrismaticInfo {
        prismatic: true,
        fiber: Some(fiber),
    })
}

/// Number of torus-fixed points, which is the Euler characteristic.
pub fn euler_characteristic(t: &OrigamiTemplate) -> Result<i64, InvariantError> {
    if t.has_dangling_edges() {
        return Err(InvariantError::DanglingEdges);
    }
    let chi = t.orbit_space_summary().fixed_point_count as i64;
    assert_ne!(chi, 1, "a toric origami manifold cannot have Euler characteristic 1");
    Ok(chi)
}
