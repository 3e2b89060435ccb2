//! Origami templates: polytope-labelled multigraphs whose edges are fold
//! facets, with validation and the combinatorics of the orbit space.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use petgraph::algo::{connected_components, is_bipartite_undirected};
use petgraph::graph::{NodeIndex, UnGraph};

use crate::lattice::IntMatrix;
use crate::polytope::{build_polytope, DelzantPolytope, Halfspace, PolytopeError};

/// Unvalidated template data, as read from a file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTemplate {
    pub dim: usize,
    pub polytopes: Vec<RawPolytope>,
    pub edges: Vec<RawEdge>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawPolytope {
    pub id: String,
    pub halfspaces: Vec<Halfspace>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawEdge {
    pub id: String,
    pub ends: Vec<RawEnd>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawEnd {
    pub polytope: String,
    pub facet: usize,
}

impl RawEnd {
    pub fn new(polytope: impl Into<String>, facet: usize) -> Self {
        RawEnd {
            polytope: polytope.into(),
            facet,
        }
    }
}

/// One end of a template edge: a facet of the polytope at a template vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeEnd {
    pub vertex: usize,
    pub facet: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeEnds {
    Ordinary([EdgeEnd; 2]),
    Dangling(EdgeEnd),
}

impl EdgeEnds {
    pub fn as_slice(&self) -> &[EdgeEnd] {
        match self {
            EdgeEnds::Ordinary(ends) => ends,
            EdgeEnds::Dangling(end) => std::slice::from_ref(end),
        }
    }

    pub fn is_dangling(&self) -> bool {
        matches!(self, EdgeEnds::Dangling(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemplateVertex {
    pub id: String,
    pub polytope: DelzantPolytope,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemplateEdge {
    pub id: String,
    pub ends: EdgeEnds,
}

/// A validated origami template.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrigamiTemplate {
    dim: usize,
    vertices: Vec<TemplateVertex>,
    edges: Vec<TemplateEdge>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidationIssue {
    NoVertices,
    DuplicateVertexId(String),
    DuplicateEdgeId(String),
    DimensionMismatch { vertex: String, expected: usize, found: usize },
    InvalidPolytope { vertex: String, source: PolytopeError },
    MalformedEdge { edge: String, ends: usize },
    UnknownVertex { edge: String, vertex: String },
    FacetOutOfRange { edge: String, vertex: String, facet: usize },
    LoopEdge { edge: String },
    FacetMismatch { edge: String },
    LocalDisagreement { edge: String },
    FacetReused { vertex: String, facet: usize },
    FoldFacetsIntersect { vertex: String, first: String, second: String },
    Disconnected { components: usize },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ValidationIssue::*;
        match self {
            NoVertices => write!(f, "template has no polytopes"),
            DuplicateVertexId(id) => write!(f, "duplicate polytope id `{id}`"),
            DuplicateEdgeId(id) => write!(f, "duplicate edge id `{id}`"),
            DimensionMismatch { vertex, expected, found } => {
                write!(f, "polytope `{vertex}` has dimension {found}, expected {expected}")
            }
            InvalidPolytope { vertex, source } => write!(f, "polytope `{vertex}`: {source}"),
            MalformedEdge { edge, ends } => write!(f, "edge `{edge}` has {ends} ends, expected 1 or 2"),
            UnknownVertex { edge, vertex } => write!(f, "edge `{edge}` refers to unknown polytope `{vertex}`"),
            FacetOutOfRange { edge, vertex, facet } => {
                write!(f, "edge `{edge}` refers to facet {facet} of `{vertex}`, which does not exist")
            }
            LoopEdge { edge } => write!(f, "edge `{edge}` is a loop"),
            FacetMismatch { edge } => write!(f, "edge `{edge}` joins facets that are different half-spaces"),
            LocalDisagreement { edge } => {
                write!(f, "polytopes joined by edge `{edge}` do not agree near the fold facet")
            }
            FacetReused { vertex, facet } => {
                write!(f, "facet {facet} of `{vertex}` is used by more than one edge")
            }
            FoldFacetsIntersect { vertex, first, second } => {
                write!(f, "fold facets of edges `{first}` and `{second}` meet in `{vertex}`")
            }
            Disconnected { components } => write!(f, "template graph has {components} components"),
        }
    }
}

/// Every problem found while validating a template.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

pub fn validate_template(raw: &RawTemplate) -> Result<OrigamiTemplate, ValidationReport> {
    let mut issues = Vec::new();
    if raw.polytopes.is_empty() {
        issues.push(ValidationIssue::NoVertices);
    }

    let mut index_of: BTreeMap<&str, usize> = BTreeMap::new();
    let mut built: Vec<Option<DelzantPolytope>> = Vec::new();
    for (i, rp) in raw.polytopes.iter().enumerate() {
        if index_of.insert(rp.id.as_str(), i).is_some() {
            issues.push(ValidationIssue::DuplicateVertexId(rp.id.clone()));
        }
        if let Some(h) = rp.halfspaces.iter().find(|h| h.normal.len() != raw.dim) {
            issues.push(ValidationIssue::DimensionMismatch {
                vertex: rp.id.clone(),
                expected: raw.dim,
                found: h.normal.len(),
            });
            built.push(None);
            continue;
        }
        match build_polytope(rp.halfspaces.clone()) {
            Ok(p) => built.push(Some(p)),
            Err(source) => {
                issues.push(ValidationIssue::InvalidPolytope {
                    vertex: rp.id.clone(),
                    source,
                });
                built.push(None);
            }
        }
    }

    let mut edge_ids = BTreeSet::new();
    let mut edges = Vec::new();
    for re in &raw.edges {
        if !edge_ids.insert(re.id.as_str()) {
            issues.push(ValidationIssue::DuplicateEdgeId(re.id.clone()));
        }
        if re.ends.is_empty() || re.ends.len() > 2 {
            issues.push(ValidationIssue::MalformedEdge {
                edge: re.id.clone(),
                ends: re.ends.len(),
            });
            continue;
        }
        let mut ends = Vec::new();
        for end in &re.ends {
            let Some(&v) = index_of.get(end.polytope.as_str()) else {
                issues.push(ValidationIssue::UnknownVertex {
                    edge: re.id.clone(),
                    vertex: end.polytope.clone(),
                });
                continue;
            };
            if let Some(p) = &built[v] {
                if end.facet >= p.facet_count() {
                    issues.push(ValidationIssue::FacetOutOfRange {
                        edge: re.id.clone(),
                        vertex: end.polytope.clone(),
                        facet: end.facet,
                    });
                    continue;
                }
            }
            ends.push(EdgeEnd {
                vertex: v,
                facet: end.facet,
            });
        }
        if ends.len() == re.ends.len() {
            let ends = match ends[..] {
                [a] => EdgeEnds::Dangling(a),
                [a, b] => EdgeEnds::Ordinary([a, b]),
                _ => unreachable!(),
            };
            edges.push(TemplateEdge {
                id: re.id.clone(),
                ends,
            });
        }
    }
    if !issues.is_empty() {
        return Err(ValidationReport { issues });
    }

    let vertices: Vec<TemplateVertex> = raw
        .polytopes
        .iter()
        .zip(built)
        .map(|(rp, p)| TemplateVertex {
            id: rp.id.clone(),
            polytope: p.expect("all polytopes built"),
        })
        .collect();

    for e in &edges {
        let EdgeEnds::Ordinary([a, b]) = e.ends else {
            continue;
        };
        if a.vertex == b.vertex {
            issues.push(ValidationIssue::LoopEdge { edge: e.id.clone() });
            continue;
        }
        let (pa, pb) = (&vertices[a.vertex].polytope, &vertices[b.vertex].polytope);
        if !same_hyperplane(pa.facet(a.facet), pb.facet(b.facet)) {
            issues.push(ValidationIssue::FacetMismatch { edge: e.id.clone() });
        } else if pa.local_fan_at_facet(a.facet) != pb.local_fan_at_facet(b.facet) {
            issues.push(ValidationIssue::LocalDisagreement { edge: e.id.clone() });
        }
    }

    let mut uses: BTreeMap<EdgeEnd, Vec<usize>> = BTreeMap::new();
    for (k, e) in edges.iter().enumerate() {
        for end in e.ends.as_slice() {
            uses.entry(*end).or_default().push(k);
        }
    }
    for (end, users) in &uses {
        if users.len() > 1 {
            issues.push(ValidationIssue::FacetReused {
                vertex: vertices[end.vertex].id.clone(),
                facet: end.facet,
            });
        }
    }
    let ends: Vec<(&EdgeEnd, usize)> = uses.iter().map(|(end, users)| (end, users[0])).collect();
    for (i, (x, ex)) in ends.iter().enumerate() {
        for (y, ey) in &ends[i + 1..] {
            if x.vertex != y.vertex || ex == ey {
                continue;
            }
            let p = &vertices[x.vertex].polytope;
            if p.is_face(&[x.facet, y.facet]) {
                issues.push(ValidationIssue::FoldFacetsIntersect {
                    vertex: vertices[x.vertex].id.clone(),
                    first: edges[*ex].id.clone(),
                    second: edges[*ey].id.clone(),
                });
            }
        }
    }

    let template = OrigamiTemplate {
        dim: raw.dim,
        vertices,
        edges,
    };
    if !template.vertices.is_empty() {
        let components = connected_components(&template.graph());
        if components > 1 {
            issues.push(ValidationIssue::Disconnected { components });
        }
    }
    if issues.is_empty() {
        Ok(template)
    } else {
        Err(ValidationReport { issues })
    }
}

fn same_hyperplane(a: &Halfspace, b: &Halfspace) -> bool {
    a == b || (a.normal.iter().zip(&b.normal).all(|(x, y)| *x == -y) && a.offset == -&b.offset)
}

/// Counts attached to the template graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphStats {
    /// Number of template vertices.
    pub vertex_count: usize,
    /// Number of ordinary (non-dangling) edges.
    pub edge_count: usize,
    /// Cycle rank `1 + R − L`.
    pub cycle_rank: usize,
    pub acyclic: bool,
    pub bipartite: bool,
    pub dangling_count: usize,
}

/// A facet of the orbit space: non-fold polytope facets glued across folds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitFacetClass {
    pub members: Vec<EdgeEnd>,
    pub normal: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitSpaceSummary {
    pub facet_classes: Vec<OrbitFacetClass>,
    /// One column per facet class.
    pub normal_matrix: IntMatrix,
    pub fixed_point_count: usize,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl OrigamiTemplate {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[TemplateVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[TemplateEdge] {
        &self.edges
    }

    pub fn polytope(&self, v: usize) -> &DelzantPolytope {
        &self.vertices[v].polytope
    }

    pub fn has_dangling_edges(&self) -> bool {
        self.edges.iter().any(|e| e.ends.is_dangling())
    }

    pub fn ordinary_edges(&self) -> impl Iterator<Item = (usize, [EdgeEnd; 2])> + '_ {
        self.edges.iter().enumerate().filter_map(|(k, e)| match e.ends {
            EdgeEnds::Ordinary(ends) => Some((k, ends)),
            EdgeEnds::Dangling(_) => None,
        })
    }

    /// Facets of the polytope at `v` used by any edge, dangling ones included.
    pub fn fold_facets(&self, v: usize) -> Vec<usize> {
        let set: BTreeSet<usize> = self
            .edges
            .iter()
            .flat_map(|e| e.ends.as_slice().iter())
            .filter(|end| end.vertex == v)
            .map(|end| end.facet)
            .collect();
        set.into_iter().collect()
    }

    /// The template graph; node `i` is template vertex `i` and edge weights
    /// are indices into [`OrigamiTemplate::edges`].
    pub fn graph(&self) -> UnGraph<(), usize> {
        let mut g = UnGraph::with_capacity(self.vertices.len(), self.edges.len());
        for _ in &self.vertices {
            g.add_node(());
        }
        for (k, [a, b]) in self.ordinary_edges() {
            g.add_edge(NodeIndex::new(a.vertex), NodeIndex::new(b.vertex), k);
        }
        g
    }

    pub fn graph_stats(&self) -> GraphStats {
        let l = self.vertices.len();
        let r = self.ordinary_edges().count();
        let cycle_rank = 1 + r - l;
        let g = self.graph();
        GraphStats {
            vertex_count: l,
            edge_count: r,
            cycle_rank,
            acyclic: cycle_rank == 0,
            bipartite: is_bipartite_undirected(&g, NodeIndex::new(0)),
            dangling_count: self.edges.len() - r,
        }
    }

    pub fn orbit_space_summary(&self) -> OrbitSpaceSummary {
        let folds: Vec<Vec<usize>> = (0..self.vertices.len()).map(|v| self.fold_facets(v)).collect();
        let mut items: Vec<EdgeEnd> = Vec::new();
        for (v, tv) in self.vertices.iter().enumerate() {
            for facet in 0..tv.polytope.facet_count() {
                if !folds[v].contains(&facet) {
                    items.push(EdgeEnd { vertex: v, facet });
                }
            }
        }
        let position: BTreeMap<EdgeEnd, usize> = items.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let mut uf = UnionFind::new(items.len());
        for (_, [a, b]) in self.ordinary_edges() {
            let (pa, pb) = (self.polytope(a.vertex), self.polytope(b.vertex));
            for &fa in pa.adjacent_facets(a.facet) {
                let fb = pb
                    .adjacent_facets(b.facet)
                    .iter()
                    .copied()
                    .find(|&fb| pb.facet(fb) == pa.facet(fa))
                    .expect("agreeing polytopes share adjacent facets");
                let x = position[&EdgeEnd { vertex: a.vertex, facet: fa }];
                let y = position[&EdgeEnd { vertex: b.vertex, facet: fb }];
                uf.union(x, y);
            }
        }
        let mut groups: BTreeMap<usize, Vec<EdgeEnd>> = BTreeMap::new();
        for (i, item) in items.iter().enumerate() {
            groups.entry(uf.find(i)).or_default().push(*item);
        }
        let facet_classes: Vec<OrbitFacetClass> = groups
            .into_values()
            .map(|members| {
                let first = members[0];
                let normal = self.polytope(first.vertex).facet(first.facet).normal.clone();
                for m in &members {
                    assert_eq!(self.polytope(m.vertex).facet(m.facet).normal, normal);
                }
                OrbitFacetClass { members, normal }
            })
            .collect();
        let normal_matrix = IntMatrix::from_columns(self.dim, facet_classes.iter().map(|c| c.normal.clone()).collect());

        let mut fixed_point_count = 0;
        for (v, tv) in self.vertices.iter().enumerate() {
            for vertex in tv.polytope.vertices() {
                let on_folds = vertex.facets.iter().filter(|f| folds[v].contains(f)).count();
                assert!(on_folds <= 1, "a vertex lies on two fold facets");
                if on_folds == 0 {
                    fixed_point_count += 1;
                }
            }
        }
        OrbitSpaceSummary {
            facet_classes,
            normal_matrix,
            fixed_point_count,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_at(x0: i64, y1: i64) -> Vec<Halfspace> {
        vec![
            Halfspace::from_ints(&[-1, 0], -x0),
            Halfspace::from_ints(&[1, 0], x0 + 1),
            Halfspace::from_ints(&[0, -1], 0),
            Halfspace::from_ints(&[0, 1], y1),
        ]
    }

    fn raw(polytopes: Vec<(&str, Vec<Halfspace>)>, edges: Vec<(&str, Vec<RawEnd>)>) -> RawTemplate {
        RawTemplate {
            dim: 2,
            polytopes: polytopes
                .into_iter()
                .map(|(id, halfspaces)| RawPolytope {
                    id: id.into(),
                    halfspaces,
                })
                .collect(),
            edges: edges
                .into_iter()
                .map(|(id, ends)| RawEdge { id: id.into(), ends })
                .collect(),
        }
    }

    #[test]
    fn two_squares_two_edges() {
        let t = validate_template(&raw(
            vec![("a", square_at(0, 1)), ("b", square_at(0, 1))],
            vec![
                ("e", vec![RawEnd::new("a", 0), RawEnd::new("b", 0)]),
                ("f", vec![RawEnd::new("a", 1), RawEnd::new("b", 1)]),
            ],
        ))
        .unwrap();
        let stats = t.graph_stats();
        assert_eq!((stats.vertex_count, stats.edge_count, stats.cycle_rank), (2, 2, 1));
        assert!(stats.bipartite && !stats.acyclic);
        let orbit = t.orbit_space_summary();
        assert_eq!(orbit.facet_classes.len(), 2);
        assert_eq!(orbit.fixed_point_count, 0);
    }

    #[test]
    fn local_disagreement() {
        let wide = vec![
            Halfspace::from_ints(&[-1, 0], 1),
            Halfspace::from_ints(&[1, 0], 0),
            Halfspace::from_ints(&[0, -1], 0),
            Halfspace::from_ints(&[0, 1], 2),
        ];
        let report = validate_template(&raw(
            vec![("a", square_at(0, 1)), ("b", wide)],
            vec![("e", vec![RawEnd::new("a", 0), RawEnd::new("b", 1)])],
        ))
        .unwrap_err();
        assert_eq!(report.issues, vec![ValidationIssue::LocalDisagreement { edge: "e".into() }]);
    }

    #[test]
    fn structural_rejections() {
        let report = validate_template(&raw(
            vec![("a", square_at(0, 1)), ("b", square_at(0, 1)), ("c", square_at(5, 1))],
            vec![
                ("e", vec![RawEnd::new("a", 0), RawEnd::new("a", 0)]),
                ("f", vec![RawEnd::new("a", 1), RawEnd::new("b", 3)]),
                ("g", vec![RawEnd::new("b", 0)]),
            ],
        ))
        .unwrap_err();
        let issues = &report.issues;
        assert!(issues.contains(&ValidationIssue::LoopEdge { edge: "e".into() }));
        assert!(issues.contains(&ValidationIssue::FacetMismatch { edge: "f".into() }));
        assert!(issues.contains(&ValidationIssue::FacetReused {
            vertex: "a".into(),
            facet: 0
        }));
        assert!(issues.contains(&ValidationIssue::FoldFacetsIntersect {
            vertex: "b".into(),
            first: "g".into(),
            second: "f".into()
        }));
        assert!(issues.contains(&ValidationIssue::Disconnected { components: 2 }));
    }

    #[test]
    fn single_triangle() {
        let t = validate_template(&raw(
            vec![(
                "t",
                vec![
                    Halfspace::from_ints(&[-1, 0], 0),
                    Halfspace::from_ints(&[0, -1], 0),
                    Halfspace::from_ints(&[1, 1], 1),
                ],
            )],
            vec![],
        ))
        .unwrap();
        let orbit = t.orbit_space_summary();
        assert_eq!(orbit.facet_classes.len(), 3);
        assert_eq!(orbit.fixed_point_count, 3);
        assert!(t.graph_stats().acyclic);
    }
}
