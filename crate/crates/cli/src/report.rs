//! Reports for each subcommand, as serializable records with a text
//! rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use origami_core::cohomology::{complement_cohomology, fold_component_invariants, ToricCohomology};
use origami_core::invariants::{
    detect_prismatic, euler_characteristic, first_homology, fundamental_group, is_orientable, lattice_quotient_nx,
    simply_connected,
};
use origami_core::lattice::AbelianGroup;
use origami_core::mv::solve_betti;
use origami_core::polytope::DelzantPolytope;
use origami_core::template::{OrigamiTemplate, RawTemplate, ValidationIssue, ValidationReport};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupJson {
    pub free_rank: usize,
    pub torsion: Vec<String>,
    pub display: String,
}

impl From<&AbelianGroup> for GroupJson {
    fn from(g: &AbelianGroup) -> Self {
        GroupJson {
            free_rank: g.free_rank(),
            torsion: g.invariant_factors().iter().map(|x| x.to_string()).collect(),
            display: g.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IssueJson {
    pub kind: &'static str,
    pub message: String,
}

fn issue_kind(issue: &ValidationIssue) -> &'static str {
    use ValidationIssue::*;
    match issue {
        NoVertices => "no_vertices",
        DuplicateVertexId(_) => "duplicate_vertex_id",
        DuplicateEdgeId(_) => "duplicate_edge_id",
        DimensionMismatch { .. } => "dimension_mismatch",
        InvalidPolytope { .. } => "invalid_polytope",
        MalformedEdge { .. } => "malformed_edge",
        UnknownVertex { .. } => "unknown_vertex",
        FacetOutOfRange { .. } => "facet_out_of_range",
        LoopEdge { .. } => "loop_edge",
        FacetMismatch { .. } => "facet_mismatch",
        LocalDisagreement { .. } => "local_disagreement",
        FacetReused { .. } => "facet_reused",
        FoldFacetsIntersect { .. } => "fold_facets_intersect",
        Disconnected { .. } => "disconnected",
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphJson {
    pub vertices: usize,
    pub edges: usize,
    pub dangling_edges: usize,
    pub cycle_rank: usize,
    pub acyclic: bool,
    pub bipartite: bool,
}

fn graph_json(t: &OrigamiTemplate) -> GraphJson {
    let s = t.graph_stats();
    GraphJson {
        vertices: s.vertex_count,
        edges: s.edge_count,
        dangling_edges: s.dangling_count,
        cycle_rank: s.cycle_rank,
        acyclic: s.acyclic,
        bipartite: s.bipartite,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidateReport {
    pub command: &'static str,
    pub valid: bool,
    pub polytope_dimension: usize,
    pub manifold_dimension: usize,
    pub graph: Option<GraphJson>,
    pub orbit_space_facets: Option<usize>,
    pub fixed_points: Option<usize>,
    pub issues: Vec<IssueJson>,
    pub note: Option<String>,
}

pub fn validate_report(raw: &RawTemplate, result: &Result<OrigamiTemplate, ValidationReport>, note: Option<String>) -> ValidateReport {
    let (graph, facets, fixed, issues) = match result {
        Ok(t) => {
            let orbit = (!t.has_dangling_edges()).then(|| t.orbit_space_summary());
            (
                Some(graph_json(t)),
                orbit.as_ref().map(|o| o.facet_classes.len()),
                orbit.as_ref().map(|o| o.fixed_point_count),
                Vec::new(),
            )
        }
        Err(report) => (
            None,
            None,
            None,
            report
                .issues
                .iter()
                .map(|i| IssueJson {
                    kind: issue_kind(i),
                    message: i.to_string(),
                })
                .collect(),
        ),
    };
    ValidateReport {
        command: "validate",
        valid: result.is_ok(),
        polytope_dimension: raw.dim,
        manifold_dimension: 2 * raw.dim,
        graph,
        orbit_space_facets: facets,
        fixed_points: fixed,
        issues,
        note,
    }
}

impl ValidateReport {
    pub fn text(&self) -> String {
        let mut out = String::new();
        if self.valid {
            let g = self.graph.as_ref().expect("valid reports carry graph data");
            writeln!(out, "valid template for a {}-manifold", self.manifold_dimension).unwrap();
            writeln!(
                out,
                "graph: {} vertices, {} edges, {} dangling, cycle rank {}",
                g.vertices, g.edges, g.dangling_edges, g.cycle_rank
            )
            .unwrap();
            if let (Some(f), Some(p)) = (self.orbit_space_facets, self.fixed_points) {
                writeln!(out, "orbit space: {f} facets, {p} fixed points").unwrap();
            }
        } else {
            writeln!(out, "invalid template: {} issue(s)", self.issues.len()).unwrap();
            for i in &self.issues {
                writeln!(out, "  [{}] {}", i.kind, i.message).unwrap();
            }
        }
        push_note(&mut out, &self.note);
        out
    }
}

fn push_note(out: &mut String, note: &Option<String>) {
    if let Some(n) = note {
        writeln!(out, "note: {n}").unwrap();
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Pi1Json {
    pub cyclic_part: GroupJson,
    pub free_rank: usize,
    pub display: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberJson {
    pub dimension: usize,
    pub facets: usize,
    pub vertices: usize,
    pub h_vector: Vec<i64>,
}

fn fiber_json(p: &DelzantPolytope) -> FiberJson {
    FiberJson {
        dimension: p.dim(),
        facets: p.facet_count(),
        vertices: p.vertex_count(),
        h_vector: p.h_vector().to_vec(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantsReport {
    pub command: &'static str,
    pub manifold_dimension: usize,
    pub graph: GraphJson,
    pub lattice_quotient: GroupJson,
    pub fundamental_group: Option<Pi1Json>,
    pub first_homology: Option<GroupJson>,
    pub h2_torsion: Option<GroupJson>,
    pub orientable: bool,
    pub simply_connected: Option<bool>,
    pub prismatic: Option<bool>,
    pub fiber: Option<FiberJson>,
    pub euler_characteristic: Option<i64>,
    pub provenance: BTreeMap<&'static str, &'static str>,
    pub notes: Vec<String>,
    pub note: Option<String>,
}

pub fn invariants_report(t: &OrigamiTemplate, note: Option<String>) -> InvariantsReport {
    let mut notes = Vec::new();
    let mut record = |e: &dyn std::fmt::Display| {
        let s = e.to_string();
        if !notes.contains(&s) {
            notes.push(s);
        }
    };
    let pi1 = fundamental_group(t).map_err(|e| record(&e)).ok();
    let h1 = first_homology(t).map_err(|e| record(&e)).ok();
    let sc = simply_connected(t).map_err(|e| record(&e)).ok();
    let prismatic = detect_prismatic(t).map_err(|e| record(&e)).ok();
    let chi = euler_characteristic(t).map_err(|e| record(&e)).ok();
    let provenance = BTreeMap::from([
        ("fundamental_group", "pi1(M) = N/N_X x pi1(X), where pi1(X) is free of rank 1 + R - L"),
        ("first_homology", "abelianization of pi1(M)"),
        ("h2_torsion", "torsion of H^2(M) equals the torsion of N/N_X"),
        ("simply_connected", "M is simply connected exactly when the template graph is a tree"),
        ("prismatic", "N/N_X = Z exactly when M splits as T^2 x Y over a fiber polytope"),
        ("euler_characteristic", "number of torus-fixed points of M"),
    ]);
    InvariantsReport {
        command: "invariants",
        manifold_dimension: 2 * t.dim(),
        graph: graph_json(t),
        lattice_quotient: (&lattice_quotient_nx(t)).into(),
        fundamental_group: pi1.map(|p| Pi1Json {
            cyclic_part: (&p.cyclic_part).into(),
            free_rank: p.free_rank,
            display: p.to_string(),
        }),
        first_homology: h1.as_ref().map(|h| (&h.group).into()),
        h2_torsion: h1.as_ref().map(|h| (&h.h2_torsion).into()),
        orientable: is_orientable(t),
        simply_connected: sc,
        prismatic: prismatic.as_ref().map(|p| p.prismatic),
        fiber: prismatic.as_ref().and_then(|p| p.fiber.as_ref()).map(fiber_json),
        euler_characteristic: chi,
        provenance,
        notes,
        note,
    }
}

fn or_unknown<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map_or_else(|| "not computed".into(), ToString::to_string)
}

impl InvariantsReport {
    pub fn text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "manifold dimension: {}", self.manifold_dimension).unwrap();
        writeln!(
            out,
            "template graph: L = {}, R = {}, cycle rank {}, {} dangling",
            self.graph.vertices, self.graph.edges, self.graph.cycle_rank, self.graph.dangling_edges
        )
        .unwrap();
        writeln!(out, "N/N_X: {}", self.lattice_quotient.display).unwrap();
        writeln!(out, "pi1: {}", or_unknown(&self.fundamental_group.as_ref().map(|p| &p.display))).unwrap();
        writeln!(out, "H1: {}", or_unknown(&self.first_homology.as_ref().map(|g| &g.display))).unwrap();
        writeln!(out, "torsion of H2: {}", or_unknown(&self.h2_torsion.as_ref().map(|g| &g.display))).unwrap();
        writeln!(out, "orientable: {}", self.orientable).unwrap();
        writeln!(out, "simply connected: {}", or_unknown(&self.simply_connected)).unwrap();
        writeln!(out, "prismatic: {}", or_unknown(&self.prismatic)).unwrap();
        if let Some(f) = &self.fiber {
            writeln!(
                out,
                "fiber polytope: dimension {}, {} facets, {} vertices, h = {:?}",
                f.dimension, f.facets, f.vertices, f.h_vector
            )
            .unwrap();
        }
        writeln!(out, "Euler characteristic: {}", or_unknown(&self.euler_characteristic)).unwrap();
        for n in &self.notes {
            writeln!(out, "* {n}").unwrap();
        }
        push_note(&mut out, &self.note);
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BettiJson {
    pub command: &'static str,
    pub manifold_dimension: usize,
    /// `null` marks an undetermined Betti number.
    pub betti: Option<Vec<Option<u64>>>,
    pub method: Option<&'static str>,
    pub provenance: Option<&'static str>,
    pub constraints: Vec<String>,
    pub torsion_h2: Option<GroupJson>,
    pub euler_characteristic: Option<i64>,
    pub orientable: bool,
    pub notes: Vec<String>,
    pub note: Option<String>,
}

pub fn betti_report(t: &OrigamiTemplate, note: Option<String>) -> BettiJson {
    match solve_betti(t) {
        Ok(r) => BettiJson {
            command: "betti",
            manifold_dimension: r.dim,
            betti: Some(r.betti.iter().map(|b| b.value()).collect()),
            method: Some(r.method.as_str()),
            provenance: Some(r.method.provenance()),
            constraints: r.constraints.iter().map(ToString::to_string).collect(),
            torsion_h2: r.torsion_h2.as_ref().map(Into::into),
            euler_characteristic: Some(r.euler_characteristic),
            orientable: r.orientable,
            notes: r.notes,
            note,
        },
        Err(e) => BettiJson {
            command: "betti",
            manifold_dimension: 2 * t.dim(),
            betti: None,
            method: None,
            provenance: None,
            constraints: Vec::new(),
            torsion_h2: None,
            euler_characteristic: None,
            orientable: is_orientable(t),
            notes: vec![e.to_string()],
            note,
        },
    }
}

impl BettiJson {
    pub fn text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "manifold dimension: {}", self.manifold_dimension).unwrap();
        match &self.betti {
            Some(b) => {
                let shown: Vec<String> = b.iter().map(|x| x.map_or("?".into(), |v| v.to_string())).collect();
                writeln!(out, "betti: ({})", shown.join(", ")).unwrap();
            }
            None => writeln!(out, "betti: not computed").unwrap(),
        }
        if let Some(m) = self.method {
            writeln!(out, "method: {m}").unwrap();
        }
        if let Some(p) = self.provenance {
            writeln!(out, "provenance: {p}").unwrap();
        }
        for c in &self.constraints {
            writeln!(out, "relation: {c}").unwrap();
        }
        if let Some(t) = &self.torsion_h2 {
            writeln!(out, "torsion of H2: {}", t.display).unwrap();
        }
        writeln!(out, "Euler characteristic: {}", or_unknown(&self.euler_characteristic)).unwrap();
        writeln!(out, "orientable: {}", self.orientable).unwrap();
        for n in &self.notes {
            writeln!(out, "* {n}").unwrap();
        }
        push_note(&mut out, &self.note);
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplementJson {
    pub groups: Vec<String>,
    pub betti: Vec<usize>,
    pub euler_characteristic: i64,
    pub prismatic: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PieceJson {
    pub polytope: String,
    pub fold_facets: Vec<usize>,
    pub h_vector: Vec<i64>,
    pub toric_betti: Vec<usize>,
    pub complement: Option<ComplementJson>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FoldJson {
    pub edge: String,
    pub polytope: String,
    pub facet: usize,
    pub dangling: bool,
    pub base_h_vector: Vec<i64>,
    pub betti: Vec<usize>,
    pub euler_class: Vec<String>,
    pub dim4_type: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CutpiecesReport {
    pub command: &'static str,
    pub manifold_dimension: usize,
    pub pieces: Vec<PieceJson>,
    pub folds: Vec<FoldJson>,
    pub note: Option<String>,
}

pub fn cutpieces_report(t: &OrigamiTemplate, note: Option<String>) -> CutpiecesReport {
    let pieces = t
        .vertices()
        .iter()
        .enumerate()
        .map(|(v, tv)| {
            let p = &tv.polytope;
            let folds = t.fold_facets(v);
            let (complement, error) = if folds.is_empty() {
                (None, None)
            } else {
                match complement_cohomology(p, &folds) {
                    Ok(c) => (
                        Some(ComplementJson {
                            groups: c.groups.iter().map(ToString::to_string).collect(),
                            betti: c.betti(),
                            euler_characteristic: c.euler_characteristic(),
                            prismatic: c.prismatic,
                        }),
                        None,
                    ),
                    Err(e) => (None, Some(e.to_string())),
                }
            };
            PieceJson {
                polytope: tv.id.clone(),
                fold_facets: folds,
                h_vector: p.h_vector().to_vec(),
                toric_betti: ToricCohomology::new(p).betti(),
                complement,
                error,
            }
        })
        .collect();
    let folds = t
        .edges()
        .iter()
        .map(|e| {
            let end = e.ends.as_slice()[0];
            let z = fold_component_invariants(t.polytope(end.vertex), end.facet).expect("fold facets are in range");
            FoldJson {
                edge: e.id.clone(),
                polytope: t.vertices()[end.vertex].id.clone(),
                facet: end.facet,
                dangling: e.ends.is_dangling(),
                base_h_vector: z.base.h_vector().to_vec(),
                betti: z.betti,
                euler_class: z.euler_class.iter().map(ToString::to_string).collect(),
                dim4_type: z.dim4_type.map(|d| d.to_string()),
            }
        })
        .collect();
    CutpiecesReport {
        command: "cutpieces",
        manifold_dimension: 2 * t.dim(),
        pieces,
        folds,
        note,
    }
}

impl CutpiecesReport {
    pub fn text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "manifold dimension: {}", self.manifold_dimension).unwrap();
        for p in &self.pieces {
            writeln!(out, "piece `{}`: fold facets {:?}, toric betti {:?}", p.polytope, p.fold_facets, p.toric_betti).unwrap();
            if let Some(c) = &p.complement {
                writeln!(
                    out,
                    "  complement: ({}), euler {}, prismatic {}",
                    c.groups.join(", "),
                    c.euler_characteristic,
                    c.prismatic
                )
                .unwrap();
            }
            if let Some(e) = &p.error {
                writeln!(out, "  complement: {e}").unwrap();
            }
        }
        for f in &self.folds {
            let kind = if f.dangling { " (boundary)" } else { "" };
            write!(out, "fold `{}`{kind}: facet {} of `{}`, betti {:?}", f.edge, f.facet, f.polytope, f.betti).unwrap();
            if let Some(d) = &f.dim4_type {
                write!(out, ", {d}").unwrap();
            }
            writeln!(out).unwrap();
        }
        push_note(&mut out, &self.note);
        out
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// The template multigraph in DOT. Dangling edges end at an unlabeled node
/// of shape `none`.
pub fn export_dot(t: &OrigamiTemplate) -> String {
    let mut out = String::from("graph origami {\n");
    for (v, tv) in t.vertices().iter().enumerate() {
        writeln!(out, "  v{v} [label={}];", quote(&tv.id)).unwrap();
    }
    for (k, e) in t.edges().iter().enumerate() {
        match e.ends.as_slice() {
            [a, b] => writeln!(
                out,
                "  v{} -- v{} [label={}];",
                a.vertex,
                b.vertex,
                quote(&format!("{}: F{} | F{}", e.id, a.facet, b.facet))
            )
            .unwrap(),
            [a] => {
                writeln!(out, "  d{k} [shape=none, label=\"\"];").unwrap();
                writeln!(out, "  v{} -- d{k} [label={}];", a.vertex, quote(&format!("{}: F{}", e.id, a.facet))).unwrap();
            }
            _ => unreachable!("edges have one or two ends"),
        }
    }
    out.push_str("}\n");
    out
}
