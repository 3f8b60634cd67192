//! Exact rational linear algebra.
//!
//! Dense matrices over arbitrary-precision rationals with deterministic
//! Gaussian elimination (pivots in column order, first nonzero row), exact
//! kernels and images, solving with infeasibility certificates, and homology
//! of finite chain complexes. Everything downstream of this module reduces to
//! these primitives, so all of them are exact: no floats, no rounding, ever.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::par;

/// Exact rational scalar. Always stored in lowest terms with positive
/// denominator (maintained by `num_rational`).
pub type Rat = BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Rational from a numerator/denominator pair.
pub fn ratio(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical string form: `"p"` for integers, `"p/q"` otherwise.
pub fn rat_to_string(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse the canonical string form. Accepts `"p"` and `"p/q"` with q > 0
/// after sign normalisation.
pub fn rat_from_string(s: &str) -> Result<Rat, LinAlgError> {
    let bad = || LinAlgError::ParseRational(s.to_string());
    match s.split_once('/') {
        None => {
            let n: BigInt = s.trim().parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(n))
        }
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    /// Operand shapes do not match the operation.
    DimMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    /// `solve` target is outside the column span; carries a certificate row
    /// combination y with yᵀM = 0 and yᵀb ≠ 0.
    Infeasible { certificate: Vec<Rat> },
    /// Composite of consecutive differentials is not zero.
    InvalidComplex { degree: i64 },
    /// A rational literal failed to parse.
    ParseRational(String),
}

impl fmt::Display for LinAlgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinAlgError::DimMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected:?}, got {got:?}")
            }
            LinAlgError::Infeasible { .. } => write!(f, "linear system is infeasible"),
            LinAlgError::InvalidComplex { degree } => {
                write!(f, "not a chain complex: d∘d ≠ 0 out of degree {degree}")
            }
            LinAlgError::ParseRational(s) => write!(f, "cannot parse rational {s:?}"),
        }
    }
}

impl std::error::Error for LinAlgError {}

/// Dense exact rational matrix, row major. 0×n and n×0 shapes are legal.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| rat_to_string(self.at(r, c))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Rat) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        RatMatrix { rows, cols, data }
    }

    /// Build from integer rows; panics on ragged input. Test/fixture helper.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| rat(rows[i][j]))
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn column_vector(v: &[Rat]) -> Self {
        RatMatrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Rat {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn column(&self, c: usize) -> Vec<Rat> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a -= b;
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = -a.clone();
        }
        out
    }

    pub fn scale(&self, s: &Rat) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    /// Matrix product; the row-sliced inner loop runs in parallel for large
    /// operands.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "product shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let rows = self.rows;
        let cols = other.cols;
        let inner = self.cols;
        let mut out = Self::zeros(rows, cols);
        if rows * cols * inner >= 8192 {
            par::for_each_chunk_mut(&mut out.data, cols.max(1), |r, chunk| {
                if cols == 0 {
                    return;
                }
                for k in 0..inner {
                    let a = self.at(r, k);
                    if a.is_zero() {
                        continue;
                    }
                    for c in 0..cols {
                        let b = other.at(k, c);
                        if !b.is_zero() {
                            chunk[c] += a * b;
                        }
                    }
                }
            });
        } else {
            for r in 0..rows {
                for k in 0..inner {
                    let a = self.at(r, k);
                    if a.is_zero() {
                        continue;
                    }
                    for c in 0..cols {
                        let b = other.at(k, c);
                        if !b.is_zero() {
                            let idx = r * cols + c;
                            out.data[idx] += a * b;
                        }
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                let mut acc = Rat::zero();
                for c in 0..self.cols {
                    let a = self.at(r, c);
                    if !a.is_zero() && !v[c].is_zero() {
                        acc += a * &v[c];
                    }
                }
                acc
            })
            .collect()
    }

    /// Horizontal concatenation [self | other].
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self.at(r, c).clone()
            } else {
                other.at(r, c - self.cols).clone()
            }
        })
    }

    /// Vertical concatenation [self; other].
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        RatMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Stack a list of matrices vertically; requires equal column counts
    /// (an empty list yields a 0×`cols` matrix).
    pub fn vstack_all(cols: usize, mats: &[RatMatrix]) -> Self {
        let mut out = Self::zeros(0, cols);
        for m in mats {
            out = out.vstack(m);
        }
        out
    }

    /// Copy of the sub-block of selected columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |r, c| self.at(r, cols[c]).clone())
    }

    /// Embed into `total` rows starting at `offset` (zero elsewhere).
    pub fn embed_rows(&self, total: usize, offset: usize) -> Self {
        assert!(offset + self.rows <= total);
        Self::from_fn(total, self.cols, |r, c| {
            if r >= offset && r < offset + self.rows {
                self.at(r - offset, c).clone()
            } else {
                Rat::zero()
            }
        })
    }

    /// Reduced row echelon form computed in place; returns pivot column
    /// indices in ascending order. Deterministic: columns scanned left to
    /// right, pivot = first row with a nonzero entry.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let rows = self.rows;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut next_row = 0usize;
        for col in 0..cols {
            if next_row >= rows {
                break;
            }
            let mut pivot_row = None;
            for r in next_row..rows {
                if !self.at(r, col).is_zero() {
                    pivot_row = Some(r);
                    break;
                }
            }
            let Some(pr) = pivot_row else { continue };
            if pr != next_row {
                for c in 0..cols {
                    self.data.swap(pr * cols + c, next_row * cols + c);
                }
            }
            let inv = {
                let p = self.at(next_row, col).clone();
                Rat::one() / p
            };
            if !inv.is_one() {
                for c in col..cols {
                    let idx = next_row * cols + c;
                    if !self.data[idx].is_zero() {
                        self.data[idx] *= &inv;
                    }
                }
            }
            // Eliminate every other row; rows are independent, so this is the
            // data-parallel inner loop.
            let pivot_row_copy: Vec<Rat> =
                self.data[next_row * cols..(next_row + 1) * cols].to_vec();
            let work = rows * (cols - col);
            if work >= 16384 && par::is_parallel() {
                par::for_each_chunk_mut(&mut self.data, cols, |r, row| {
                    if r == next_row || row[col].is_zero() {
                        return;
                    }
                    let factor = row[col].clone();
                    for c in col..cols {
                        if !pivot_row_copy[c].is_zero() {
                            let delta = &factor * &pivot_row_copy[c];
                            row[c] -= delta;
                        }
                    }
                });
            } else {
                for r in 0..rows {
                    if r == next_row || self.at(r, col).is_zero() {
                        continue;
                    }
                    let factor = self.at(r, col).clone();
                    for c in col..cols {
                        if !pivot_row_copy[c].is_zero() {
                            let idx = r * cols + c;
                            let delta = &factor * &pivot_row_copy[c];
                            self.data[idx] -= delta;
                        }
                    }
                }
            }
            pivots.push(col);
            next_row += 1;
        }
        pivots
    }

    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    /// Exact rank (dimension of the column space).
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the kernel as matrix columns, deterministic: one column per
    /// free variable, free variables in ascending column order.
    pub fn kernel_basis(&self) -> RatMatrix {
        let (r, pivots) = self.rref();
        let n = self.cols;
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let mut k = RatMatrix::zeros(n, free.len());
        for (j, &fc) in free.iter().enumerate() {
            k.set(fc, j, Rat::one());
            for (row, &pc) in pivots.iter().enumerate() {
                let v = r.at(row, fc);
                if !v.is_zero() {
                    k.set(pc, j, -v.clone());
                }
            }
        }
        k
    }

    /// Basis of the column space: the pivot columns of the original matrix.
    pub fn image_basis(&self) -> RatMatrix {
        let (_, pivots) = self.rref();
        self.select_columns(&pivots)
    }

    /// Invert a square matrix; `None` when singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&RatMatrix::identity(n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots.iter().take(n).enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        Some(RatMatrix::from_fn(n, n, |i, j| r.at(i, n + j).clone()))
    }
}

/// Result of a feasible [`solve`]: one particular solution plus a kernel
/// basis spanning the full solution set.
#[derive(Debug, Clone)]
pub struct Solution {
    pub particular: Vec<Rat>,
    pub kernel: RatMatrix,
}

/// Solve M·x = b exactly. On infeasibility returns a certificate y with
/// yᵀM = 0 and yᵀb ≠ 0.
pub fn solve(m: &RatMatrix, b: &[Rat]) -> Result<Solution, LinAlgError> {
    if b.len() != m.rows() {
        return Err(LinAlgError::DimMismatch {
            expected: (m.rows(), 1),
            got: (b.len(), 1),
        });
    }
    let sol = solve_many(m, &RatMatrix::column_vector(b))?;
    Ok(Solution {
        particular: sol.0.column(0),
        kernel: sol.1,
    })
}

/// Multi-RHS solve: returns (X, kernel basis) with M·X = B column-wise, or an
/// infeasibility certificate for the first offending column.
pub fn solve_many(m: &RatMatrix, b: &RatMatrix) -> Result<(RatMatrix, RatMatrix), LinAlgError> {
    assert_eq!(m.rows(), b.rows(), "solve_many shape mismatch");
    let n = m.cols();
    let aug = m.hstack(b);
    let (r, pivots) = aug.rref();
    // Pivots inside the coefficient block are M's pivots; a pivot beyond it
    // flags an inconsistent row.
    let m_pivots: Vec<usize> = pivots.iter().copied().filter(|&c| c < n).collect();
    let rank = m_pivots.len();
    for (row, &p) in pivots.iter().enumerate() {
        if p >= n {
            // Row `row` of the reduced system reads 0 = nonzero. Recover the
            // certificate by solving yᵀM = 0 with yᵀb matching this row: run
            // the same elimination on [M | I].
            let tracked = m.hstack(&RatMatrix::identity(m.rows()));
            let (tr, _) = tracked.rref();
            // Find a row of tr whose M-part is zero but whose combination
            // applied to b is nonzero.
            for rr in 0..tr.rows() {
                let m_zero = (0..n).all(|c| tr.at(rr, c).is_zero());
                if !m_zero {
                    continue;
                }
                let y: Vec<Rat> = (0..m.rows()).map(|c| tr.at(rr, n + c).clone()).collect();
                let yb: Vec<Rat> = (0..b.cols())
                    .map(|bc| {
                        let mut acc = Rat::zero();
                        for (i, yi) in y.iter().enumerate() {
                            if !yi.is_zero() {
                                acc += yi * b.at(i, bc);
                            }
                        }
                        acc
                    })
                    .collect();
                if yb.iter().any(|v| !v.is_zero()) {
                    return Err(LinAlgError::Infeasible { certificate: y });
                }
            }
            // Elimination said infeasible; certificate extraction must find a
            // witness row, so this is unreachable on exact arithmetic.
            unreachable!("inconsistent rref without certificate row {row}");
        }
    }
    let mut x = RatMatrix::zeros(n, b.cols());
    for bc in 0..b.cols() {
        for (row, &pc) in m_pivots.iter().enumerate() {
            let v = r.at(row, n + bc);
            if !v.is_zero() {
                x.set(pc, bc, v.clone());
            }
        }
    }
    let _ = rank;
    Ok((x, m.kernel_basis()))
}

/// Coordinates of the columns of `v` in the subspace spanned by the columns
/// of `basis`; errors when a column lies outside the span. The basis is
/// expected to have full column rank, which makes coordinates unique.
pub fn express_in_basis(basis: &RatMatrix, v: &RatMatrix) -> Result<RatMatrix, LinAlgError> {
    let (x, _) = solve_many(basis, v)?;
    Ok(x)
}

/// Canonical right inverse of a surjective matrix (pivot-order
/// deterministic); `None` when the matrix is not surjective.
pub fn right_inverse(m: &RatMatrix) -> Option<RatMatrix> {
    solve_many(m, &RatMatrix::identity(m.rows())).ok().map(|(x, _)| x)
}

/// Chain orientation: `Chain` differentials lower the degree, `Cochain`
/// differentials raise it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Chain,
    Cochain,
}

/// Finite complex of Q-vector spaces over a contiguous degree range.
///
/// `dims[i]` is the dimension in degree `lo + i`. For `Chain` orientation,
/// `maps[i]` is the differential from degree `lo+i+1` to `lo+i`; for
/// `Cochain`, from `lo+i` to `lo+i+1`.
#[derive(Debug, Clone)]
pub struct ChainComplexQ {
    pub lo: i64,
    pub dims: Vec<usize>,
    pub maps: Vec<RatMatrix>,
    pub orientation: Orientation,
}

impl ChainComplexQ {
    pub fn new(
        lo: i64,
        dims: Vec<usize>,
        maps: Vec<RatMatrix>,
        orientation: Orientation,
    ) -> Result<Self, LinAlgError> {
        assert_eq!(maps.len() + 1, dims.len().max(1), "map count mismatch");
        for (i, m) in maps.iter().enumerate() {
            let (tgt, src) = match orientation {
                Orientation::Chain => (dims[i], dims[i + 1]),
                Orientation::Cochain => (dims[i + 1], dims[i]),
            };
            if (m.rows(), m.cols()) != (tgt, src) {
                return Err(LinAlgError::DimMismatch {
                    expected: (tgt, src),
                    got: (m.rows(), m.cols()),
                });
            }
        }
        let c = ChainComplexQ {
            lo,
            dims,
            maps,
            orientation,
        };
        c.validate()?;
        Ok(c)
    }

    /// Check d∘d = 0 for every consecutive pair.
    pub fn validate(&self) -> Result<(), LinAlgError> {
        for i in 0..self.maps.len().saturating_sub(1) {
            let composite = match self.orientation {
                Orientation::Chain => self.maps[i].mul(&self.maps[i + 1]),
                Orientation::Cochain => self.maps[i + 1].mul(&self.maps[i]),
            };
            if !composite.is_zero() {
                return Err(LinAlgError::InvalidComplex {
                    degree: self.lo + i as i64 + 1,
                });
            }
        }
        Ok(())
    }

    pub fn degree_count(&self) -> usize {
        self.dims.len()
    }

    /// Differential leaving degree-index `i` (towards lower degree for chain
    /// complexes, higher for cochain). `None` at the range end.
    fn map_out(&self, i: usize) -> Option<&RatMatrix> {
        match self.orientation {
            Orientation::Chain => (i > 0).then(|| &self.maps[i - 1]),
            Orientation::Cochain => (i + 1 < self.dims.len()).then(|| &self.maps[i]),
        }
    }

    fn map_in(&self, i: usize) -> Option<&RatMatrix> {
        match self.orientation {
            Orientation::Chain => (i + 1 < self.dims.len()).then(|| &self.maps[i]),
            Orientation::Cochain => (i > 0).then(|| &self.maps[i - 1]),
        }
    }

    /// Exact homology in every degree, with deterministic representative
    /// bases: kernel vectors (free columns in order) completing a pivot-order
    /// image basis.
    pub fn homology(&self) -> Vec<HomologyDegree> {
        par::map_range(self.dims.len(), |i| self.homology_at(i))
    }

    fn homology_at(&self, i: usize) -> HomologyDegree {
        let dim_i = self.dims[i];
        let cycles = match self.map_out(i) {
            Some(d) => d.kernel_basis(),
            None => RatMatrix::identity(dim_i),
        };
        let boundaries = match self.map_in(i) {
            Some(d) => d.image_basis(),
            None => RatMatrix::zeros(dim_i, 0),
        };
        // Representatives: kernel columns that grow the rank of the image
        // basis, scanned in order.
        let combined = boundaries.hstack(&cycles);
        let (_, pivots) = combined.rref();
        let rep_cols: Vec<usize> = pivots
            .iter()
            .copied()
            .filter(|&c| c >= boundaries.cols())
            .map(|c| c - boundaries.cols())
            .collect();
        let reps = cycles.select_columns(&rep_cols);
        HomologyDegree {
            degree: self.lo + i as i64,
            dim: reps.cols(),
            representatives: reps,
            cycles,
            boundaries,
        }
    }
}

/// Homology of one degree: dimension plus a representative basis (columns of
/// `representatives`, coordinates in the ambient degree space).
#[derive(Debug, Clone)]
pub struct HomologyDegree {
    pub degree: i64,
    pub dim: usize,
    pub representatives: RatMatrix,
    pub cycles: RatMatrix,
    pub boundaries: RatMatrix,
}

impl HomologyDegree {
    /// Class of an ambient vector in the representative basis; errors when
    /// the vector is not a cycle. Boundary components are discarded.
    pub fn class_of(&self, v: &[Rat]) -> Result<Vec<Rat>, LinAlgError> {
        let basis = self.boundaries.hstack(&self.representatives);
        let coords = express_in_basis(&basis, &RatMatrix::column_vector(v))?;
        Ok((self.boundaries.cols()..basis.cols())
            .map(|r| coords.at(r, 0).clone())
            .collect())
    }
}

/// Map induced on homology by a chain map given levelwise; `levels[i]` sends
/// degree `src.lo + i` of the source into the matching degree of the target.
/// Returns one matrix per shared degree index. Errors when a representative
/// does not map to a cycle (the input is not a chain map).
pub fn induced_on_homology(
    src: &[HomologyDegree],
    tgt: &[HomologyDegree],
    levels: &[RatMatrix],
) -> Result<Vec<RatMatrix>, LinAlgError> {
    assert_eq!(src.len(), tgt.len());
    assert_eq!(src.len(), levels.len());
    let mut out = Vec::with_capacity(src.len());
    for i in 0..src.len() {
        let mapped = levels[i].mul(&src[i].representatives);
        let mut m = RatMatrix::zeros(tgt[i].dim, src[i].dim);
        for c in 0..mapped.cols() {
            let class = tgt[i].class_of(&mapped.column(c))?;
            for (r, v) in class.into_iter().enumerate() {
                m.set(r, c, v);
            }
        }
        out.push(m);
    }
    Ok(out)
}

/// True when every induced matrix is a square isomorphism.
pub fn all_isomorphisms(ms: &[RatMatrix]) -> bool {
    ms.iter()
        .all(|m| m.rows() == m.cols() && m.rank() == m.rows())
}

/// Euler characteristic Σ (−1)^degree · dim, from raw dimensions.
pub fn euler_characteristic(lo: i64, dims: &[usize]) -> Rat {
    let mut acc = Rat::zero();
    for (i, &d) in dims.iter().enumerate() {
        let deg = lo + i as i64;
        let sign = if deg.rem_euclid(2) == 0 { 1 } else { -1 };
        acc += rat(sign * d as i64);
    }
    acc
}

/// Matrix-level abs helper used by witnesses in reports.
pub fn rat_abs(x: &Rat) -> Rat {
    x.abs()
}

/// Degree-indexed (co)homology dimensions with optional representative
/// bases, serialized as {"dims": {"degree": dim}, "representatives": …}.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CohomologyReport {
    pub dims: std::collections::BTreeMap<i64, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub representatives: Option<std::collections::BTreeMap<i64, Vec<Vec<String>>>>,
}

impl CohomologyReport {
    pub fn from_homology(h: &[HomologyDegree], with_reps: bool) -> Self {
        let dims = h.iter().map(|d| (d.degree, d.dim)).collect();
        let representatives = with_reps.then(|| {
            h.iter()
                .map(|d| {
                    let reps: Vec<Vec<String>> = (0..d.representatives.cols())
                        .map(|c| {
                            d.representatives.column(c).iter().map(rat_to_string).collect()
                        })
                        .collect();
                    (d.degree, reps)
                })
                .collect()
        });
        CohomologyReport {
            dims,
            representatives,
        }
    }

    pub fn dim(&self, degree: i64) -> usize {
        self.dims.get(&degree).copied().unwrap_or(0)
    }
}
