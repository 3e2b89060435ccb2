//! Integral cohomology of toric pieces from the Stanley–Reisner
//! presentation, and of the complements of fold divisors.
//!
//! A degree-`k` class of the toric manifold over `P` is written in the
//! variables `y_0 … y_{d−1}`, one per facet. Cohomological degree is `2k`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lattice::{cokernel_structure, integer_kernel, rational_rank, smith_full, AbelianGroup, IntMatrix};
use crate::polytope::DelzantPolytope;

/// Exponent vector over the facet variables.
pub type Monomial = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("degree {degree} is outside 0..={dim}")]
    DegreeOutOfRange { degree: usize, dim: usize },
    #[error("fold set is empty")]
    EmptyFoldSet,
    #[error("facet index {0} out of range")]
    InvalidFacet(usize),
    #[error("fold facets {0} and {1} intersect")]
    FoldFacetsIntersect(usize, usize),
    #[error("facet {0} cannot be a fold facet of this polytope")]
    NotAFoldContext(usize),
    #[error("H^{degree} of the complement has rank {found}, closed form gives {expected}")]
    ClosedFormMismatch { degree: usize, expected: i64, found: i64 },
}

/// A Z-basis of the degree-`k` part of the cohomology ring, with the data
/// to move between monomials and quotient coordinates.
#[derive(Clone, Debug)]
pub struct GradedBasis {
    degree: usize,
    monomials: Vec<Monomial>,
    index: BTreeMap<Monomial, usize>,
    relations: IntMatrix,
    to_quotient: IntMatrix,
    lifts: Vec<Vec<BigInt>>,
}

fn face_monomials(p: &DelzantPolytope, k: usize) -> Vec<Monomial> {
    let d = p.facet_count();
    if k == 0 {
        return vec![vec![0; d]];
    }
    (0..d)
        .combinations_with_replacement(k)
        .filter_map(|vars| {
            let support: Vec<usize> = vars.iter().copied().dedup().collect();
            if !p.is_face(&support) {
                return None;
            }
            let mut m = vec![0u32; d];
            for v in vars {
                m[v] += 1;
            }
            Some(m)
        })
        .collect()
}

pub fn graded_basis(p: &DelzantPolytope, k: usize) -> Result<GradedBasis, CohomologyError> {
    let n = p.dim();
    if k > n {
        return Err(CohomologyError::DegreeOutOfRange { degree: k, dim: n });
    }
    let monomials = face_monomials(p, k);
    let index: BTreeMap<Monomial, usize> = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let mut rows = Vec::new();
    if k >= 1 {
        for lower in face_monomials(p, k - 1) {
            for i in 0..n {
                let mut row = vec![BigInt::zero(); monomials.len()];
                for (j, h) in p.facets().iter().enumerate() {
                    if h.normal[i].is_zero() {
                        continue;
                    }
                    let mut m = lower.clone();
                    m[j] += 1;
                    if let Some(&idx) = index.get(&m) {
                        row[idx] += &h.normal[i];
                    }
                }
                rows.push(row);
            }
        }
    }
    let relations = IntMatrix::from_rows_with_cols(monomials.len(), rows);
    let smith = smith_full(&relations);
    let diagonal = smith.form.diagonal();
    assert!(
        diagonal.iter().all(One::is_one),
        "degree-{k} cohomology has torsion {diagonal:?}"
    );
    let rank = diagonal.len();
    let h = monomials.len() - rank;
    assert_eq!(h as i64, p.h_vector()[k], "degree-{k} rank differs from h_{k}");
    let free: Vec<usize> = (rank..monomials.len()).collect();
    let to_quotient = smith.form.v.select_columns(&free);
    let lifts = free.iter().map(|&i| smith.v_inv.row(i).to_vec()).collect();
    Ok(GradedBasis {
        degree: k,
        monomials,
        index,
        relations,
        to_quotient,
        lifts,
    })
}

impl GradedBasis {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Face-supported monomials spanning this degree.
    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    /// Relations in monomial coordinates, one per row.
    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn rank(&self) -> usize {
        self.lifts.len()
    }

    /// A monomial-coordinate representative of basis element `t`.
    pub fn lift(&self, t: usize) -> &[BigInt] {
        &self.lifts[t]
    }

    pub fn monomial_index(&self, m: &[u32]) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Quotient coordinates of a vector in monomial coordinates.
    pub fn project(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.to_quotient.transpose().mul_vec(x)
    }

    /// Quotient coordinates of a single monomial; zero if its support is a
    /// nonface.
    pub fn project_monomial(&self, m: &[u32]) -> Vec<BigInt> {
        let mut x = vec![BigInt::zero(); self.monomials.len()];
        if let Some(i) = self.monomial_index(m) {
            x[i] = BigInt::one();
        }
        self.project(&x)
    }
}

/// A linear map between graded pieces; column `j` is the image of source
/// basis element `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    pub matrix: IntMatrix,
    pub source_degree: usize,
    pub target_degree: usize,
}

/// All graded pieces of the cohomology of one toric manifold.
#[derive(Clone, Debug)]
pub struct ToricCohomology {
    bases: Vec<GradedBasis>,
}

impl ToricCohomology {
    pub fn new(p: &DelzantPolytope) -> Self {
        ToricCohomology {
            bases: (0..=p.dim())
                .map(|k| graded_basis(p, k).expect("degree in range"))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.bases.len() - 1
    }

    pub fn basis(&self, k: usize) -> &GradedBasis {
        &self.bases[k]
    }

    pub fn betti(&self) -> Vec<usize> {
        (0..=2 * self.dim())
            .map(|j| if j % 2 == 0 { self.bases[j / 2].rank() } else { 0 })
            .collect()
    }

    /// Product of two monomial-coordinate vectors of degrees `i` and `j`.
    fn product(&self, a: &[BigInt], i: usize, b: &[BigInt], j: usize) -> Vec<BigInt> {
        let target = &self.bases[i + j];
        let mut out = vec![BigInt::zero(); target.monomials.len()];
        for (ma, ca) in self.bases[i].monomials.iter().zip(a) {
            if ca.is_zero() {
                continue;
            }
            for (mb, cb) in self.bases[j].monomials.iter().zip(b) {
                if cb.is_zero() {
                    continue;
                }
                let m: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                if let Some(idx) = target.monomial_index(&m) {
                    out[idx] += ca * cb;
                }
            }
        }
        out
    }

    fn lift_class(&self, k: usize, c: &[BigInt]) -> Vec<BigInt> {
        let basis = &self.bases[k];
        assert_eq!(c.len(), basis.rank(), "class has wrong length");
        let mut out = vec![BigInt::zero(); basis.monomials.len()];
        for (t, ct) in c.iter().enumerate() {
            for (o, l) in out.iter_mut().zip(basis.lift(t)) {
                *o += ct * l;
            }
        }
        out
    }

    /// Cup product with a degree-1 class `c` (in quotient coordinates), from
    /// degree `k` to degree `k + 1`.
    pub fn multiply_by_class(&self, c: &[BigInt], k: usize) -> GradedMap {
        let n = self.dim();
        assert!(n >= 1 && k <= n, "degree out of range");
        let source_rank = self.bases[k].rank();
        if k == n {
            return GradedMap {
                matrix: IntMatrix::zeros(0, source_rank),
                source_degree: k,
                target_degree: k + 1,
            };
        }
        let lifted = self.lift_class(1, c);
        let target = &self.bases[k + 1];
        let columns: Vec<Vec<BigInt>> = (0..source_rank)
            .map(|s| target.project(&self.product(&lifted, 1, self.bases[k].lift(s), k)))
            .collect();
        for row in self.bases[k].relations.row_vecs() {
            let image = target.project(&self.product(&lifted, 1, &row, k));
            assert!(image.iter().all(Zero::is_zero), "product depends on the lift");
        }
        for row in self.bases[1].relations.row_vecs() {
            for s in 0..source_rank {
                let image = target.project(&self.product(&row, 1, self.bases[k].lift(s), k));
                assert!(image.iter().all(Zero::is_zero), "product depends on the class representative");
            }
        }
        GradedMap {
            matrix: IntMatrix::from_columns(target.rank(), columns),
            source_degree: k,
            target_degree: k + 1,
        }
    }
}

pub fn multiply_by_class(p: &DelzantPolytope, c: &[BigInt], k: usize) -> Result<GradedMap, CohomologyError> {
    if p.dim() == 0 || k > p.dim() {
        return Err(CohomologyError::DegreeOutOfRange { degree: k, dim: p.dim() });
    }
    Ok(ToricCohomology::new(p).multiply_by_class(c, k))
}

/// A fold divisor `B_s` over the facet `F_s`.
#[derive(Clone, Debug)]
pub struct FoldPiece {
    pub facet: usize,
    pub base: DelzantPolytope,
    /// `correspondence[t]` is the facet of `P` cutting out facet `t` of `F_s`.
    pub correspondence: Vec<usize>,
    pub cohomology: ToricCohomology,
}

fn fold_pieces(p: &DelzantPolytope, folds: &[usize]) -> Result<Vec<FoldPiece>, CohomologyError> {
    if folds.is_empty() {
        return Err(CohomologyError::EmptyFoldSet);
    }
    let sorted: Vec<usize> = folds.iter().copied().sorted().dedup().collect();
    for &s in &sorted {
        if s >= p.facet_count() {
            return Err(CohomologyError::InvalidFacet(s));
        }
    }
    for (&a, &b) in sorted.iter().tuple_combinations() {
        if p.is_face(&[a, b]) {
            return Err(CohomologyError::FoldFacetsIntersect(a, b));
        }
    }
    Ok(sorted
        .into_iter()
        .map(|s| {
            let (base, correspondence) = p.facet_subpolytope(s).expect("facet in range");
            let cohomology = ToricCohomology::new(&base);
            FoldPiece {
                facet: s,
                base,
                correspondence,
                cohomology,
            }
        })
        .collect())
}

/// `φ̃_k` with the column range belonging to each fold facet.
#[derive(Clone, Debug)]
pub struct PhiTilde {
    pub map: GradedMap,
    pub blocks: Vec<(usize, Range<usize>)>,
}

fn phi_matrix(y: &ToricCohomology, pieces: &[FoldPiece], k: usize) -> PhiTilde {
    let target = y.basis(k);
    let d = target.monomials.first().map_or(0, Vec::len);
    let mut columns = Vec::new();
    let mut blocks = Vec::new();
    for piece in pieces {
        let start = columns.len();
        if k - 1 <= piece.cohomology.dim() {
            let source = piece.cohomology.basis(k - 1);
            let push_forward = |x: &[BigInt]| {
                let mut out = vec![BigInt::zero(); target.monomials.len()];
                for (m, c) in source.monomials.iter().zip(x) {
                    if c.is_zero() {
                        continue;
                    }
                    let mut ym = vec![0u32; d];
                    ym[piece.facet] += 1;
                    for (t, &e) in m.iter().enumerate() {
                        ym[piece.correspondence[t]] += e;
                    }
                    if let Some(idx) = target.monomial_index(&ym) {
                        out[idx] += c;
                    }
                }
                target.project(&out)
            };
            for row in source.relations.row_vecs() {
                assert!(push_forward(&row).iter().all(Zero::is_zero), "phi~ depends on the lift");
            }
            for t in 0..source.rank() {
                columns.push(push_forward(source.lift(t)));
            }
        }
        blocks.push((piece.facet, start..columns.len()));
    }
    PhiTilde {
        map: GradedMap {
            matrix: IntMatrix::from_columns(target.rank(), columns),
            source_degree: k - 1,
            target_degree: k,
        },
        blocks,
    }
}

/// `φ̃_k : ⊕_{s∈S} H^{2k−2}(B_s) → H^{2k}(Y)`.
pub fn phi_tilde(p: &DelzantPolytope, folds: &[usize], k: usize) -> Result<PhiTilde, CohomologyError> {
    if k == 0 || k > p.dim() {
        return Err(CohomologyError::DegreeOutOfRange { degree: k, dim: p.dim() });
    }
    let pieces = fold_pieces(p, folds)?;
    Ok(phi_matrix(&ToricCohomology::new(p), &pieces, k))
}

/// Cohomology of `Y ∖ B` for a set of disjoint fold divisors.
#[derive(Clone, Debug)]
pub struct ComplementCohomology {
    /// `H^j` for `j = 0..=2n`.
    pub groups: Vec<AbelianGroup>,
    pub prismatic: bool,
    pub pieces: Vec<FoldPiece>,
    /// Kernel of `φ̃_k` (a basis of `H^{2k−1}`) at index `k − 1`, in the
    /// source coordinates of `φ̃_k`.
    pub kernels: Vec<IntMatrix>,
    pub phi: Vec<PhiTilde>,
}

impl ComplementCohomology {
    pub fn betti(&self) -> Vec<usize> {
        self.groups.iter().map(AbelianGroup::free_rank).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        alternating_sum(&self.betti())
    }

    pub fn has_torsion(&self) -> bool {
        self.groups.iter().any(|g| !g.is_free())
    }
}

pub(crate) fn alternating_sum(betti: &[usize]) -> i64 {
    betti
        .iter()
        .enumerate()
        .map(|(j, &b)| if j % 2 == 0 { b as i64 } else { -(b as i64) })
        .sum()
}

pub fn complement_euler(p: &DelzantPolytope, folds: &[usize]) -> Result<i64, CohomologyError> {
    let pieces = fold_pieces(p, folds)?;
    Ok(p.vertex_count() as i64 - pieces.iter().map(|x| x.base.vertex_count() as i64).sum::<i64>())
}

/// Whether the normals of the facets outside `folds` span a sublattice with
/// quotient `Z`.
pub fn complement_is_prismatic(p: &DelzantPolytope, folds: &[usize]) -> bool {
    let others: Vec<usize> = (0..p.facet_count()).filter(|f| !folds.contains(f)).collect();
    cokernel_structure(&p.normal_matrix().select_columns(&others)).is_infinite_cyclic()
}

pub fn complement_cohomology(p: &DelzantPolytope, folds: &[usize]) -> Result<ComplementCohomology, CohomologyError> {
    let pieces = fold_pieces(p, folds)?;
    let y = ToricCohomology::new(p);
    let n = p.dim();
    let mut groups = vec![AbelianGroup::trivial(); 2 * n + 1];
    groups[0] = AbelianGroup::free(1);
    let mut kernels = Vec::new();
    let mut phi = Vec::new();
    for k in 1..=n {
        let map = phi_matrix(&y, &pieces, k);
        let m = &map.map.matrix;
        let rank = rational_rank(m);
        let kernel = integer_kernel(m);
        assert_eq!(kernel.cols(), m.cols() - rank);
        groups[2 * k - 1] = AbelianGroup::free(kernel.cols());
        groups[2 * k] = cokernel_structure(m);
        assert_eq!(
            kernel.cols() as i64 - m.cols() as i64 + m.rows() as i64 - groups[2 * k].free_rank() as i64,
            0,
            "four-term sequence is not exact in degree {k}"
        );
        kernels.push(kernel);
        phi.push(map);
    }
    let out = ComplementCohomology {
        groups,
        prismatic: complement_is_prismatic(p, &pieces.iter().map(|x| x.facet).collect::<Vec<_>>()),
        pieces,
        kernels,
        phi,
    };
    let expected_chi =
        p.vertex_count() as i64 - out.pieces.iter().map(|x| x.base.vertex_count() as i64).sum::<i64>();
    assert_eq!(out.euler_characteristic(), expected_chi, "Euler characteristic is not additive");

    let (d, r) = (p.facet_count() as i64, out.pieces.len() as i64);
    let n_ = n as i64;
    let closed: [(usize, i64); 5] = if out.prismatic {
        [(0, 1), (1, 1), (2, d - n_ - 1), (2 * n - 1, 1), (2 * n, 0)]
    } else {
        [(0, 1), (1, 0), (2, d - n_ - r), (2 * n - 1, r - 1), (2 * n, 0)]
    };
    for (degree, expected) in closed {
        let found = out.groups[degree].free_rank() as i64;
        if found != expected {
            return Err(CohomologyError::ClosedFormMismatch { degree, expected, found });
        }
    }
    Ok(out)
}

/// Topology of a fold component in dimension 3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Dim4FoldType {
    S1xS2,
    S3,
    Lens(BigInt),
}

impl fmt::Display for Dim4FoldType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dim4FoldType::S1xS2 => write!(f, "S^1 x S^2"),
            Dim4FoldType::S3 => write!(f, "S^3"),
            Dim4FoldType::Lens(p) => write!(f, "L({p};1)"),
        }
    }
}

/// The circle bundle `Z_s → B_s` over a fold divisor.
#[derive(Clone, Debug)]
pub struct FoldComponent {
    pub facet: usize,
    pub base: DelzantPolytope,
    /// Euler class in the degree-1 quotient coordinates of `B_s`, up to sign.
    pub euler_class: Vec<BigInt>,
    /// Rational Betti numbers of `Z_s`, degrees `0..=2n−1`.
    pub betti: Vec<usize>,
    pub dim4_type: Option<Dim4FoldType>,
}

fn restricted_divisor(
    p: &DelzantPolytope,
    s: usize,
    v: &[BigInt],
    correspondence: &[usize],
    base: &ToricCohomology,
) -> Vec<BigInt> {
    let dot = |u: &[BigInt]| -> BigInt { u.iter().zip(v).map(|(a, b)| a * b).sum() };
    assert!(dot(&p.facet(s).normal).is_one());
    let degree1 = base.basis(1);
    let mut x = vec![BigInt::zero(); degree1.monomials.len()];
    for (t, &j) in correspondence.iter().enumerate() {
        let mut m = vec![0u32; correspondence.len()];
        m[t] = 1;
        let idx = degree1.monomial_index(&m).expect("every facet variable is a monomial");
        x[idx] -= dot(&p.facet(j).normal);
    }
    degree1.project(&x)
}

pub fn fold_component_invariants(p: &DelzantPolytope, s: usize) -> Result<FoldComponent, CohomologyError> {
    if s >= p.facet_count() {
        return Err(CohomologyError::NotAFoldContext(s));
    }
    let n = p.dim();
    let (base, correspondence) = p.facet_subpolytope(s).expect("facet in range");
    let bc = ToricCohomology::new(&base);

    let (euler_class, betti) = if n == 1 {
        (Vec::new(), vec![1, 1])
    } else {
        let row = IntMatrix::from_rows(vec![p.facet(s).normal.clone()]);
        let smith = smith_full(&row);
        let sign = smith.form.u.get(0, 0).clone();
        let v: Vec<BigInt> = smith.form.v.column(0).iter().map(|x| x * &sign).collect();
        let e = restricted_divisor(p, s, &v, &correspondence, &bc);
        let kernel = integer_kernel(&row);
        for w in kernel.column_vecs() {
            let shifted: Vec<BigInt> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
            assert_eq!(
                restricted_divisor(p, s, &shifted, &correspondence, &bc),
                e,
                "Euler class depends on the chosen relation"
            );
        }
        let ranks: Vec<usize> = (0..n)
            .map(|m| {
                if m + 1 < n {
                    rational_rank(&bc.multiply_by_class(&e, m).matrix)
                } else {
                    0
                }
            })
            .collect();
        let mut betti = Vec::with_capacity(2 * n);
        for m in 0..n {
            let h = bc.basis(m).rank();
            betti.push(h - if m == 0 { 0 } else { ranks[m - 1] });
            betti.push(h - ranks[m]);
        }
        (e, betti)
    };
    assert_eq!(betti[0], 1);
    assert_eq!(betti[2 * n - 1], 1);
    assert_eq!(alternating_sum(&betti), 0, "fold component has nonzero Euler characteristic");

    let dim4_type = (n == 2).then(|| match euler_class[0].abs() {
        p if p.is_zero() => Dim4FoldType::S1xS2,
        p if p.is_one() => Dim4FoldType::S3,
        p => Dim4FoldType::Lens(p),
    });
    Ok(FoldComponent {
        facet: s,
        base,
        euler_class,
        betti,
        dim4_type,
    })
}
