//! Exact integer linear algebra.
//!
//! Everything here works over arbitrary-precision integers. Matrices of any
//! shape are accepted, including ones with zero rows or zero columns, which
//! stand for the trivial span or the trivial kernel.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense integer matrix stored in row-major order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from its rows. All rows must have the same length; an
    /// empty list gives the 0×0 matrix (use [`IntMatrix::zeros`] for `0×c`).
    pub fn from_rows<T: Into<BigInt>>(rows: Vec<Vec<T>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            assert_eq!(row.len(), ncols, "ragged rows");
            data.extend(row.into_iter().map(Into::into));
        }
        IntMatrix {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    /// Builds an `nrows × columns.len()` matrix from its columns.
    pub fn from_columns<T: Into<BigInt>>(nrows: usize, columns: Vec<Vec<T>>) -> Self {
        let ncols = columns.len();
        let mut m = Self::zeros(nrows, ncols);
        for (j, col) in columns.into_iter().enumerate() {
            assert_eq!(col.len(), nrows, "column length mismatch");
            for (i, x) in col.into_iter().enumerate() {
                m.data[i * ncols + j] = x.into();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_columns(self.rows, cols.iter().map(|&j| self.column(j)).collect())
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[target] += factor * row[source]`
    pub(crate) fn add_row_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let delta = factor * self.get(source, j);
            self.data[target * self.cols + j] += delta;
        }
    }

    /// `col[target] += factor * col[source]`
    pub(crate) fn add_col_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let delta = factor * self.get(i, source);
            self.data[i * self.cols + target] += delta;
        }
    }

    pub(crate) fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        out
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{}x{}{}", self.rows, self.cols, self)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// A finitely generated abelian group `Z^r ⊕ Z/d₁ ⊕ … ⊕ Z/dₖ` with
/// `2 ≤ d₁ | d₂ | … | dₖ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    free_rank: usize,
    invariant_factors: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup {
            free_rank: 0,
            invariant_factors: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup {
            free_rank: rank,
            invariant_factors: Vec::new(),
        }
    }

    /// `Z/k`; `k = 0` gives `Z` and `k = ±1` the trivial group.
    pub fn cyclic(k: impl Into<BigInt>) -> Self {
        Self::new(0, [k.into()])
    }

    /// Canonical form of `Z^free_rank ⊕ ⨁ Z/cᵢ` for arbitrary integers `cᵢ`
    /// (a zero `cᵢ` adds a free summand, units are dropped).
    pub fn new(free_rank: usize, cyclic_orders: impl IntoIterator<Item = BigInt>) -> Self {
        let orders: Vec<BigInt> = cyclic_orders.into_iter().collect();
        let diag = {
            let mut m = IntMatrix::zeros(orders.len(), orders.len());
            for (i, c) in orders.iter().enumerate() {
                m.set(i, i, c.clone());
            }
            m
        };
        let quotient = cokernel_structure(&diag);
        AbelianGroup {
            free_rank: free_rank + quotient.free_rank,
            invariant_factors: quotient.invariant_factors,
        }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    /// `Z`, exactly.
    pub fn is_infinite_cyclic(&self) -> bool {
        self.free_rank == 1 && self.invariant_factors.is_empty()
    }

    /// Trivial, finite cyclic or infinite cyclic.
    pub fn is_cyclic(&self) -> bool {
        matches!((self.free_rank, self.invariant_factors.len()), (0, 0) | (0, 1) | (1, 0))
    }

    pub fn torsion(&self) -> AbelianGroup {
        AbelianGroup {
            free_rank: 0,
            invariant_factors: self.invariant_factors.clone(),
        }
    }

    pub fn direct_sum(&self, other: &AbelianGroup) -> AbelianGroup {
        Self::new(
            self.free_rank + other.free_rank,
            self.invariant_factors
                .iter()
                .chain(&other.invariant_factors)
                .cloned(),
        )
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.invariant_factors {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Smith normal form `d = u·m·v` with `u`, `v` unimodular.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// Nonzero diagonal entries `d₁ | d₂ | …`, all positive.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().len()
    }
}

pub(crate) struct SmithFull {
    pub form: SmithForm,
    pub v_inv: IntMatrix,
}

/// Smallest nonzero `|a[i][j]|` with `i, j ≥ t`, ties by lowest `(i, j)`.
fn find_pivot(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            let better = match best {
                None => true,
                Some((bi, bj)) => x.abs() < a.get(bi, bj).abs(),
            };
            if better {
                best = Some((i, j));
            }
        }
    }
    best
}

pub(crate) fn smith_full(m: &IntMatrix) -> SmithFull {
    let (r, c) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    let mut v_inv = IntMatrix::identity(c);

    for t in 0..r.min(c) {
        loop {
            let Some((pi, pj)) = find_pivot(&a, t) else {
                return SmithFull {
                    form: SmithForm { d: a, u, v },
                    v_inv,
                };
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);

            let mut clean = true;
            for i in t + 1..r {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let q = -a.get(i, t).div_floor(a.get(t, t));
                a.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                clean &= a.get(i, t).is_zero();
            }
            for j in t + 1..c {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let q = -a.get(t, j).div_floor(a.get(t, t));
                a.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                v_inv.add_row_multiple(t, j, &-&q);
                clean &= a.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            // Row and column t are cleared; enforce the divisibility chain.
            let p = a.get(t, t).clone();
            let offender =
                (t + 1..r).find(|&i| (t + 1..c).any(|j| !a.get(i, j).is_multiple_of(&p)));
            match offender {
                Some(i) => {
                    a.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithFull {
        form: SmithForm { d: a, u, v },
        v_inv,
    }
}

/// Smith normal form of any integer matrix.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    smith_full(m).form
}

/// Isomorphism type of `Z^n / span(columns of generators)`.
pub fn cokernel_structure(generators: &IntMatrix) -> AbelianGroup {
    let diag = smith_normal_form(generators).diagonal();
    AbelianGroup {
        free_rank: generators.rows() - diag.len(),
        invariant_factors: diag.into_iter().filter(|x| !x.is_one()).collect(),
    }
}

/// Basis of `{x ∈ Z^cols : m·x = 0}` as the columns of the result, in
/// Hermite-reduced form.
pub fn integer_kernel(m: &IntMatrix) -> IntMatrix {
    let smith = smith_normal_form(m);
    let rank = smith.rank();
    let basis_rows: Vec<Vec<BigInt>> = (rank..m.cols()).map(|j| smith.v.column(j)).collect();
    if basis_rows.is_empty() {
        return IntMatrix::zeros(m.cols(), 0);
    }
    hermite_normal_form(&IntMatrix::from_rows(basis_rows)).transpose()
}

/// Row-style Hermite normal form: the unique echelon basis of the lattice
/// spanned by the rows of `m`, with positive pivots and the entries above
/// each pivot reduced into `[0, pivot)`. Zero rows are dropped.
pub fn hermite_normal_form(m: &IntMatrix) -> IntMatrix {
    let mut a = m.clone();
    let (r, c) = (a.rows(), a.cols());
    let mut p = 0;
    for j in 0..c {
        if p == r {
            break;
        }
        loop {
            let pivot = (p..r)
                .filter(|&i| !a.get(i, j).is_zero())
                .min_by(|&x, &y| a.get(x, j).abs().cmp(&a.get(y, j).abs()));
            let Some(pi) = pivot else { break };
            a.swap_rows(p, pi);
            let mut clean = true;
            for i in p + 1..r {
                if a.get(i, j).is_zero() {
                    continue;
                }
                let q = -a.get(i, j).div_floor(a.get(p, j));
                a.add_row_multiple(i, p, &q);
                clean &= a.get(i, j).is_zero();
            }
            if clean {
                break;
            }
        }
        if a.get(p, j).is_zero() {
            continue;
        }
        if a.get(p, j).is_negative() {
            a.negate_row(p);
        }
        for i in 0..p {
            let q = -a.get(i, j).div_floor(a.get(p, j));
            a.add_row_multiple(i, p, &q);
        }
        p += 1;
    }
    IntMatrix::from_rows_with_cols(c, (0..p).map(|i| a.row(i).to_vec()).collect())
}

impl IntMatrix {
    pub(crate) fn from_rows_with_cols(cols: usize, rows: Vec<Vec<BigInt>>) -> Self {
        if rows.is_empty() {
            return Self::zeros(0, cols);
        }
        Self::from_rows(rows)
    }
}

/// Rank over the rationals, by fraction-free elimination.
pub fn rational_rank(m: &IntMatrix) -> usize {
    let mut a = m.clone();
    let (r, c) = (a.rows(), a.cols());
    let mut rank = 0;
    let mut prev = BigInt::one();
    for j in 0..c {
        if rank == r {
            break;
        }
        let Some(pi) = (rank..r).find(|&i| !a.get(i, j).is_zero()) else {
            continue;
        };
        a.swap_rows(rank, pi);
        for i in rank + 1..r {
            for k in j + 1..c {
                let v = (a.get(i, k) * a.get(rank, j) - a.get(i, j) * a.get(rank, k)) / &prev;
                a.set(i, k, v);
            }
            a.set(i, j, BigInt::zero());
        }
        prev = a.get(rank, j).clone();
        rank += 1;
    }
    rank
}
