//! Exact Delzant polytopes given by half-spaces.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lattice::{hermite_normal_form, integer_kernel, rational_rank, IntMatrix};

/// The half-space `{x : ⟨normal, x⟩ ≤ offset}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Halfspace {
    pub normal: Vec<BigInt>,
    pub offset: BigRational,
}

impl Halfspace {
    pub fn new(normal: Vec<BigInt>, offset: BigRational) -> Self {
        Halfspace { normal, offset }
    }

    pub fn from_ints(normal: &[i64], offset: i64) -> Self {
        Halfspace {
            normal: normal.iter().map(|&x| BigInt::from(x)).collect(),
            offset: BigRational::from_integer(offset.into()),
        }
    }

    pub fn value_at(&self, point: &[BigRational]) -> BigRational {
        dot_rational(&self.normal, point)
    }
}

impl fmt::Display for Halfspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<({}), x> <= {}", self.normal.iter().join(", "), self.offset)
    }
}

/// A vertex with its exact coordinates and the (sorted) facets through it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub coords: Vec<BigRational>,
    pub facets: Vec<usize>,
}

/// A nonempty face, named by the set of facets whose intersection it is.
/// The empty set names the polytope itself.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceRef {
    pub facets: Vec<usize>,
}

impl FaceRef {
    pub fn codim(&self) -> usize {
        self.facets.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error("polytope must have dimension at least 1")]
    ZeroDimension,
    #[error("half-space {0} has a normal of the wrong length")]
    InconsistentDimension(usize),
    #[error("normal of half-space {0} is not primitive")]
    NonPrimitiveNormal(usize),
    #[error("half-space {0} is redundant")]
    RedundantHalfspace(usize),
    #[error("polytope is empty")]
    Empty,
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("polytope is not full-dimensional")]
    NotFullDimensional,
    #[error("polytope is not simple at vertex {}", fmt_point(.vertex))]
    NotSimple { vertex: Vec<BigRational> },
    #[error("polytope is not smooth at vertex {}: |det| = {determinant}", fmt_point(.vertex))]
    NotSmooth {
        vertex: Vec<BigRational>,
        determinant: BigInt,
    },
    #[error("facet index {0} out of range")]
    InvalidFacet(usize),
}

pub fn fmt_point(p: &[BigRational]) -> String {
    format!("({})", p.iter().join(", "))
}

/// A simple, smooth, bounded, full-dimensional rational polytope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelzantPolytope {
    dim: usize,
    facets: Vec<Halfspace>,
    vertices: Vec<Vertex>,
    faces: Vec<FaceRef>,
    f_vector: Vec<usize>,
    h_vector: Vec<i64>,
    adjacency: Vec<BTreeSet<usize>>,
}

/// Face lattice with its counting vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceData {
    pub faces: Vec<FaceRef>,
    pub f_vector: Vec<usize>,
    pub h_vector: Vec<i64>,
}

fn dot_rational(u: &[BigInt], x: &[BigRational]) -> BigRational {
    u.iter()
        .zip(x)
        .map(|(a, b)| b * BigRational::from_integer(a.clone()))
        .fold(BigRational::zero(), |acc, t| acc + t)
}

fn to_rational_rows(rows: &[&Vec<BigInt>]) -> Vec<Vec<BigRational>> {
    rows.iter()
        .map(|r| r.iter().cloned().map(BigRational::from_integer).collect())
        .collect()
}

/// Solves a square system; `None` when singular.
fn solve_square(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip();
        for i in 0..n {
            if i == col || a[i][col].is_zero() {
                continue;
            }
            let factor = &a[i][col] * &inv;
            for j in col..n {
                let delta = &factor * &a[col][j];
                a[i][j] -= delta;
            }
            let delta = &factor * &b[col];
            b[i] -= delta;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

fn rational_rows_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, piv);
        for i in rank + 1..rows.len() {
            if rows[i][col].is_zero() {
                continue;
            }
            let factor = &rows[i][col] / &rows[rank][col];
            for j in col..ncols {
                let delta = &factor * &rows[rank][j];
                rows[i][j] -= delta;
            }
        }
        rank += 1;
    }
    rank
}

fn affine_rank(points: &[&Vec<BigRational>]) -> usize {
    let Some((first, rest)) = points.split_first() else {
        return 0;
    };
    let diffs = rest
        .iter()
        .map(|p| p.iter().zip(first.iter()).map(|(a, b)| a - b).collect())
        .collect();
    rational_rows_rank(diffs)
}

/// Points of `{Ax ≤ c}` cut out by `cols` linearly independent tight rows.
/// Requires `A` (given as rows) to have full column rank.
fn enumerate_vertices(rows: &[Vec<BigInt>], offsets: &[BigRational], cols: usize) -> Vec<Vertex> {
    let mut found: BTreeMap<Vec<BigRational>, ()> = BTreeMap::new();
    for subset in (0..rows.len()).combinations(cols) {
        let a = to_rational_rows(&subset.iter().map(|&i| &rows[i]).collect::<Vec<_>>());
        let b = subset.iter().map(|&i| offsets[i].clone()).collect();
        let Some(x) = solve_square(a, b) else { continue };
        if rows
            .iter()
            .zip(offsets)
            .all(|(u, c)| dot_rational(u, &x) <= *c)
        {
            found.insert(x, ());
        }
    }
    found
        .into_keys()
        .map(|coords| {
            let facets = rows
                .iter()
                .zip(offsets)
                .enumerate()
                .filter(|(_, (u, c))| dot_rational(u, &coords) == **c)
                .map(|(i, _)| i)
                .collect();
            Vertex { coords, facets }
        })
        .collect()
}

/// Feasibility of `{Ax ≤ c}` for an arbitrary-rank `A`, by restricting to a
/// set of independent columns (every value of `Ax` is attained there).
fn is_feasible(normals: &IntMatrix, offsets: &[BigRational]) -> bool {
    let mut chosen: Vec<usize> = Vec::new();
    for j in 0..normals.cols() {
        let mut trial = chosen.clone();
        trial.push(j);
        if rational_rank(&normals.select_columns(&trial)) == trial.len() {
            chosen = trial;
        }
    }
    let reduced = normals.select_columns(&chosen);
    !enumerate_vertices(&reduced.row_vecs(), offsets, chosen.len()).is_empty()
}

/// Whether the cone `{y : Ay ≤ 0}` of a full-column-rank `A` contains a
/// nonzero direction; checked on its extreme rays.
fn has_recession_direction(rows: &[Vec<BigInt>], n: usize) -> bool {
    for subset in (0..rows.len()).combinations(n - 1) {
        let sub = IntMatrix::from_rows_with_cols(n, subset.iter().map(|&i| rows[i].clone()).collect());
        let kernel = integer_kernel(&sub);
        if kernel.cols() != 1 {
            continue;
        }
        let y = kernel.column(0);
        for sign in [BigInt::one(), -BigInt::one()] {
            let dir: Vec<BigInt> = y.iter().map(|x| x * &sign).collect();
            let ok = rows.iter().all(|u| {
                let s: BigInt = u.iter().zip(&dir).map(|(a, b)| a * b).sum();
                !s.is_positive()
            });
            if ok {
                return true;
            }
        }
    }
    false
}

/// Validates half-spaces and builds the polytope with all derived data.
pub fn build_polytope(halfspaces: Vec<Halfspace>) -> Result<DelzantPolytope, PolytopeError> {
    let n = halfspaces.first().map_or(0, |h| h.normal.len());
    if n == 0 {
        return Err(PolytopeError::ZeroDimension);
    }
    for (i, h) in halfspaces.iter().enumerate() {
        if h.normal.len() != n {
            return Err(PolytopeError::InconsistentDimension(i));
        }
    }
    for (i, h) in halfspaces.iter().enumerate() {
        let g = h.normal.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if !g.is_one() {
            return Err(PolytopeError::NonPrimitiveNormal(i));
        }
    }
    for (i, h) in halfspaces.iter().enumerate() {
        if halfspaces[..i].contains(h) {
            return Err(PolytopeError::RedundantHalfspace(i));
        }
    }

    let rows: Vec<Vec<BigInt>> = halfspaces.iter().map(|h| h.normal.clone()).collect();
    let offsets: Vec<BigRational> = halfspaces.iter().map(|h| h.offset.clone()).collect();
    let normals = IntMatrix::from_rows(rows.clone());
    if rational_rank(&normals) < n {
        return Err(if is_feasible(&normals, &offsets) {
            PolytopeError::Unbounded
        } else {
            PolytopeError::Empty
        });
    }
    let vertices = enumerate_vertices(&rows, &offsets, n);
    if vertices.is_empty() {
        return Err(PolytopeError::Empty);
    }
    if has_recession_direction(&rows, n) {
        return Err(PolytopeError::Unbounded);
    }
    let all: Vec<&Vec<BigRational>> = vertices.iter().map(|v| &v.coords).collect();
    if affine_rank(&all) < n {
        return Err(PolytopeError::NotFullDimensional);
    }
    for i in 0..halfspaces.len() {
        let on: Vec<&Vec<BigRational>> = vertices
            .iter()
            .filter(|v| v.facets.contains(&i))
            .map(|v| &v.coords)
            .collect();
        if on.len() < n || affine_rank(&on) < n - 1 {
            return Err(PolytopeError::RedundantHalfspace(i));
        }
    }
    for v in &vertices {
        if v.facets.len() != n {
            return Err(PolytopeError::NotSimple {
                vertex: v.coords.clone(),
            });
        }
    }
    for v in &vertices {
        let det = IntMatrix::from_rows(v.facets.iter().map(|&i| rows[i].clone()).collect())
            .determinant()
            .abs();
        if !det.is_one() {
            return Err(PolytopeError::NotSmooth {
                vertex: v.coords.clone(),
                determinant: det,
            });
        }
    }
    Ok(DelzantPolytope::assemble(n, halfspaces, vertices))
}

/// Convenience constructor from integer data.
pub fn build_polytope_from_ints(normals: &[&[i64]], offsets: &[i64]) -> Result<DelzantPolytope, PolytopeError> {
    assert_eq!(normals.len(), offsets.len());
    build_polytope(
        normals
            .iter()
            .zip(offsets)
            .map(|(u, &c)| Halfspace::from_ints(u, c))
            .collect(),
    )
}

fn h_from_f(n: usize, f_with_top: &[usize]) -> Vec<i64> {
    // Σ_k f_k (t−1)^k, expanded binomially.
    let mut h = vec![0i64; n + 1];
    for (k, &fk) in f_with_top.iter().enumerate() {
        let mut binom = 1i64;
        for j in 0..=k {
            let sign = if (k - j) % 2 == 0 { 1 } else { -1 };
            h[j] += sign * binom * fk as i64;
            binom = binom * (k - j) as i64 / (j + 1) as i64;
        }
    }
    h
}

impl DelzantPolytope {
    fn assemble(dim: usize, facets: Vec<Halfspace>, vertices: Vec<Vertex>) -> Self {
        let mut face_set: BTreeSet<Vec<usize>> = BTreeSet::new();
        for v in &vertices {
            for mask in 0u32..(1 << v.facets.len()) {
                let sub = v
                    .facets
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask & (1 << b) != 0)
                    .map(|(_, &i)| i)
                    .collect();
                face_set.insert(sub);
            }
        }
        let mut faces: Vec<FaceRef> = face_set.into_iter().map(|facets| FaceRef { facets }).collect();
        faces.sort_by(|a, b| b.codim().cmp(&a.codim()).then_with(|| a.cmp(b)));

        let mut counts = vec![0usize; dim + 1];
        for face in &faces {
            counts[dim - face.codim()] += 1;
        }
        let h_vector = h_from_f(dim, &counts);
        let f_vector = counts[..dim].to_vec();

        let mut adjacency = vec![BTreeSet::new(); facets.len()];
        for v in &vertices {
            for (&a, &b) in v.facets.iter().tuple_combinations() {
                adjacency[a].insert(b);
                adjacency[b].insert(a);
            }
        }
        let p = DelzantPolytope {
            dim,
            facets,
            vertices,
            faces,
            f_vector,
            h_vector,
            adjacency,
        };
        p.assert_face_counts();
        p
    }

    /// The 0-dimensional polytope, which arises as a facet of a segment.
    pub fn point() -> Self {
        Self::assemble(
            0,
            Vec::new(),
            vec![Vertex {
                coords: Vec::new(),
                facets: Vec::new(),
            }],
        )
    }

    fn assert_face_counts(&self) {
        let total: i64 = self.h_vector.iter().sum();
        assert_eq!(total, self.vertices.len() as i64, "sum of h-vector must equal f0");
        let n = self.dim;
        for k in 0..=n {
            assert_eq!(self.h_vector[k], self.h_vector[n - k], "Dehn-Sommerville fails");
        }
        if n >= 1 {
            assert_eq!(self.h_vector[1], self.facets.len() as i64 - n as i64);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facet_count(&self) -> usize {
        self.facets.len()
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    pub fn facet(&self, i: usize) -> &Halfspace {
        &self.facets[i]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn faces(&self) -> &[FaceRef] {
        &self.faces
    }

    pub fn f_vector(&self) -> &[usize] {
        &self.f_vector
    }

    pub fn h_vector(&self) -> &[i64] {
        &self.h_vector
    }

    pub fn face_data(&self) -> FaceData {
        FaceData {
            faces: self.faces.clone(),
            f_vector: self.f_vector.clone(),
            h_vector: self.h_vector.clone(),
        }
    }

    /// Facets meeting `F_s`, excluding `s` itself.
    pub fn adjacent_facets(&self, s: usize) -> &BTreeSet<usize> {
        &self.adjacency[s]
    }

    /// Whether the facets in `set` have a common point.
    pub fn is_face(&self, set: &[usize]) -> bool {
        self.vertices
            .iter()
            .any(|v| set.iter().all(|i| v.facets.contains(i)))
    }

    pub fn vertices_on_facet(&self, s: usize) -> usize {
        self.vertices.iter().filter(|v| v.facets.contains(&s)).count()
    }

    /// Facet normals as the columns of an `n × d` matrix.
    pub fn normal_matrix(&self) -> IntMatrix {
        IntMatrix::from_columns(self.dim, self.facets.iter().map(|h| h.normal.clone()).collect())
    }

    /// The half-space of `F_s` together with those of all adjacent facets.
    pub fn local_fan_at_facet(&self, s: usize) -> Result<BTreeSet<Halfspace>, PolytopeError> {
        if s >= self.facets.len() {
            return Err(PolytopeError::InvalidFacet(s));
        }
        let mut out = BTreeSet::new();
        out.insert(self.facets[s].clone());
        for &j in &self.adjacency[s] {
            out.insert(self.facets[j].clone());
        }
        Ok(out)
    }

    /// `F_s` as an `(n−1)`-dimensional Delzant polytope in the lattice
    /// `u_s^⊥ ∩ Z^n`, together with the facet of `p` that each of its facets
    /// comes from.
    pub fn facet_subpolytope(&self, s: usize) -> Result<(DelzantPolytope, Vec<usize>), PolytopeError> {
        if s >= self.facets.len() {
            return Err(PolytopeError::InvalidFacet(s));
        }
        if self.dim == 1 {
            return Ok((DelzantPolytope::point(), Vec::new()));
        }
        let basis = self.facet_lattice_basis(s);
        let origin = &self
            .vertices
            .iter()
            .find(|v| v.facets.contains(&s))
            .expect("every facet carries a vertex")
            .coords;
        let mut halfspaces = Vec::new();
        let mut correspondence = Vec::new();
        for &j in &self.adjacency[s] {
            let u = &self.facets[j].normal;
            let normal = basis.transpose().mul_vec(u);
            let offset = &self.facets[j].offset - dot_rational(u, origin);
            halfspaces.push(Halfspace::new(normal, offset));
            correspondence.push(j);
        }
        let sub = build_polytope(halfspaces).expect("a facet of a Delzant polytope is Delzant");
        Ok((sub, correspondence))
    }

    /// Hermite-reduced basis of `u_s^⊥ ∩ Z^n`, as the columns of an
    /// `n × (n−1)` matrix.
    pub fn facet_lattice_basis(&self, s: usize) -> IntMatrix {
        let u = IntMatrix::from_rows(vec![self.facets[s].normal.clone()]);
        let kernel = integer_kernel(&u);
        hermite_normal_form(&kernel.transpose()).transpose()
    }
}
