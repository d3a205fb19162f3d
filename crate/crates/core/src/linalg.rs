//! Exact integer linear algebra: determinants, Cramer's rule, the Hadamard
//! bound, integer dependencies between vectors and coefficient reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::vector::TermVector;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix is {0}x{1}, expected a square matrix")]
    NotSquare(usize, usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vectors are linearly dependent")]
    Dependent,
    #[error("vectors are linearly independent")]
    Independent,
}

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
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

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(x));
            }
        }
        m
    }

    /// The matrix whose columns are the given vectors (all of dimension `dim`).
    pub fn from_columns(columns: &[&TermVector], dim: usize) -> Self {
        let mut m = Self::zeros(dim, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for i in 0..dim {
                m.set(i, j, BigInt::from(c.get(i)));
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

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.data
            .iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Copy with column `j` replaced by `column`.
    pub fn with_column(&self, j: usize, column: &[BigInt]) -> Self {
        let mut m = self.clone();
        for (i, x) in column.iter().enumerate() {
            m.set(i, j, x.clone());
        }
        m
    }

    fn row_vec(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }
}

/// Fraction-free (Bareiss) elimination.
pub fn determinant(m: &IntMatrix) -> Result<BigInt, LinalgError> {
    if m.rows != m.cols {
        return Err(LinalgError::NotSquare(m.rows, m.cols));
    }
    let n = m.rows;
    let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| m.row_vec(i)).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let x = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = x / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    Ok(if n == 0 { sign } else { sign * &a[n - 1][n - 1] })
}

/// `h(n, C) = n! · Cⁿ`
pub fn hadamard_bound(n: usize, c: &BigInt) -> BigInt {
    let mut h = BigInt::one();
    for i in 1..=n {
        h *= BigInt::from(i) * c;
    }
    h
}

/// The unique rational solution of `m·x = b`, or `None` when `m` is singular.
pub fn cramer_solve(m: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigRational>>, LinalgError> {
    if m.rows != m.cols {
        return Err(LinalgError::NotSquare(m.rows, m.cols));
    }
    if b.len() != m.rows {
        return Err(LinalgError::DimensionMismatch {
            expected: m.rows,
            got: b.len(),
        });
    }
    let det = determinant(m)?;
    if det.is_zero() {
        return Ok(None);
    }
    let x = (0..m.cols)
        .map(|j| {
            let dj = determinant(&m.with_column(j, b)).expect("square");
            BigRational::new(dj, det.clone())
        })
        .collect();
    Ok(Some(x))
}

/// Row echelon form over the rationals; returns the pivot columns.
fn pivots(rows: &mut [Vec<BigRational>]) -> Vec<usize> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let lead = rows[r][c].clone();
        for i in r + 1..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let f = &rows[i][c] / &lead;
            for j in c..cols {
                let x = &rows[r][j] * &f;
                rows[i][j] -= x;
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivot_cols
}

fn small_rank(vs: &[&TermVector]) -> Option<usize> {
    // Fraction-free elimination in i128 with row content removal; gives up on
    // overflow so the caller can fall back to big rationals.
    let dim = vs.first()?.dim();
    let mut rows: Vec<Vec<i128>> = vs
        .iter()
        .map(|v| v.entries().iter().map(|&x| x as i128).collect())
        .collect();
    let mut rank = 0;
    for c in 0..dim {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(rank, p);
        for i in rank + 1..rows.len() {
            let f = rows[i][c];
            if f == 0 {
                continue;
            }
            let lead = rows[rank][c];
            let mut g = 0i128;
            for j in 0..dim {
                let x = rows[i][j]
                    .checked_mul(lead)?
                    .checked_sub(rows[rank][j].checked_mul(f)?)?;
                rows[i][j] = x;
                g = g.gcd(&x);
            }
            if g > 1 {
                rows[i].iter_mut().for_each(|x| *x /= g);
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    Some(rank)
}

/// Rank over the rationals of a list of vectors of equal dimension.
pub fn rank(vs: &[&TermVector]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    if let Some(r) = small_rank(vs) {
        return r;
    }
    let mut rows: Vec<Vec<BigRational>> = vs
        .iter()
        .map(|v| {
            v.entries()
                .iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect()
        })
        .collect();
    pivots(&mut rows).len()
}

pub fn is_linearly_independent(vs: &[&TermVector]) -> bool {
    rank(vs) == vs.len()
}

/// Solves `Σ cᵢ pᵢ = v` over ℕ for a fixed independent family `p`, reusing
/// the adjugate of a nonsingular square subsystem across right-hand sides.
#[derive(Clone, Debug)]
pub struct LatticeSolver {
    periods: Vec<TermVector>,
    dim: usize,
    /// Rows of the ambient space forming a nonsingular square subsystem.
    rows: Vec<usize>,
    det: BigInt,
    adjugate: Vec<Vec<BigInt>>,
    small: Option<(i128, Vec<Vec<i128>>)>,
}

impl LatticeSolver {
    pub fn new(periods: &[TermVector], dim: usize) -> Result<Self, LinalgError> {
        if let Some(p) = periods.iter().find(|p| p.dim() != dim) {
            return Err(LinalgError::DimensionMismatch {
                expected: dim,
                got: p.dim(),
            });
        }
        let refs: Vec<&TermVector> = periods.iter().collect();
        if !is_linearly_independent(&refs) {
            return Err(LinalgError::Dependent);
        }
        let k = periods.len();
        // Greedily pick k coordinates whose restriction stays independent.
        let mut rows = Vec::with_capacity(k);
        for i in 0..dim {
            if rows.len() == k {
                break;
            }
            let mut trial = rows.clone();
            trial.push(i);
            let restricted: Vec<TermVector> = (0..trial.len())
                .map(|r| {
                    TermVector::from_vec(periods.iter().map(|p| p.get(trial[r])).collect())
                })
                .collect();
            let rr: Vec<&TermVector> = restricted.iter().collect();
            if rank(&rr) == trial.len() {
                rows = trial;
            }
        }
        debug_assert_eq!(rows.len(), k);
        let mut m = IntMatrix::zeros(k, k);
        for (r, &i) in rows.iter().enumerate() {
            for (c, p) in periods.iter().enumerate() {
                m.set(r, c, BigInt::from(p.get(i)));
            }
        }
        let det = determinant(&m)?;
        // adj[c][r] = (-1)^{r+c} det(minor without row r, column c)
        let mut adjugate = vec![vec![BigInt::zero(); k]; k];
        for r in 0..k {
            for c in 0..k {
                let mut minor = IntMatrix::zeros(k - 1, k - 1);
                for (mi, ri) in (0..k).filter(|&x| x != r).enumerate() {
                    for (mj, cj) in (0..k).filter(|&x| x != c).enumerate() {
                        minor.set(mi, mj, m.get(ri, cj).clone());
                    }
                }
                let d = determinant(&minor)?;
                adjugate[c][r] = if (r + c) % 2 == 0 { d } else { -d };
            }
        }
        let small = det.to_i128().and_then(|d| {
            let adj: Option<Vec<Vec<i128>>> = adjugate
                .iter()
                .map(|row| row.iter().map(|x| x.to_i64().map(i128::from)).collect())
                .collect();
            adj.map(|a| (d, a))
        });
        Ok(LatticeSolver {
            periods: periods.to_vec(),
            dim,
            rows,
            det,
            adjugate,
            small,
        })
    }

    pub fn periods(&self) -> &[TermVector] {
        &self.periods
    }

    /// The unique coefficients if they are nonnegative integers.
    pub fn solve(&self, v: &TermVector) -> Option<Vec<u64>> {
        debug_assert_eq!(v.dim(), self.dim);
        if self.periods.is_empty() {
            return v.is_zero().then(Vec::new);
        }
        let coeffs = match &self.small {
            Some((det, adj)) => self.solve_small(*det, adj, v),
            None => None,
        };
        let coeffs = match coeffs {
            Some(c) => c?,
            None => self.solve_big(v)?,
        };
        // The square subsystem fixes the coefficients; check the rest.
        for i in 0..self.dim {
            let mut s: i128 = 0;
            for (c, p) in coeffs.iter().zip(&self.periods) {
                s += *c as i128 * p.get(i) as i128;
            }
            if s != v.get(i) as i128 {
                return None;
            }
        }
        Some(coeffs)
    }

    fn solve_small(&self, det: i128, adj: &[Vec<i128>], v: &TermVector) -> Option<Option<Vec<u64>>> {
        let mut out = Vec::with_capacity(adj.len());
        for row in adj {
            let mut s: i128 = 0;
            for (a, &r) in row.iter().zip(&self.rows) {
                s = s.checked_add(a.checked_mul(v.get(r) as i128)?)?;
            }
            if s % det != 0 {
                return Some(None);
            }
            let x = s / det;
            if x < 0 || x > u64::MAX as i128 {
                return Some(None);
            }
            out.push(x as u64);
        }
        Some(Some(out))
    }

    fn solve_big(&self, v: &TermVector) -> Option<Vec<u64>> {
        let mut out = Vec::with_capacity(self.adjugate.len());
        for row in &self.adjugate {
            let s: BigInt = row
                .iter()
                .zip(&self.rows)
                .map(|(a, &r)| a * BigInt::from(v.get(r)))
                .sum();
            let (q, rem) = s.div_rem(&self.det);
            if !rem.is_zero() || q.is_negative() {
                return None;
            }
            out.push(q.to_u64()?);
        }
        Some(out)
    }
}

/// Coefficients `c ∈ ℕ^P` with `Σ cᵢ pᵢ = v`, if any. Periods must be
/// linearly independent.
pub fn nonneg_integer_solve(
    periods: &[TermVector],
    v: &TermVector,
) -> Result<Option<Vec<u64>>, LinalgError> {
    Ok(LatticeSolver::new(periods, v.dim())?.solve(v))
}

/// Indices of a minimal dependent subset: the shortest dependent prefix,
/// then elements dropped in input order while dependence survives.
fn minimal_dependent_subset(p: &[TermVector]) -> Option<Vec<usize>> {
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..p.len() {
        chosen.push(i);
        let refs: Vec<&TermVector> = chosen.iter().map(|&j| &p[j]).collect();
        if !is_linearly_independent(&refs) {
            break;
        }
        if i + 1 == p.len() {
            return None;
        }
    }
    let mut k = 0;
    while k < chosen.len() {
        let mut trial = chosen.clone();
        trial.remove(k);
        let refs: Vec<&TermVector> = trial.iter().map(|&j| &p[j]).collect();
        if !trial.is_empty() && !is_linearly_independent(&refs) {
            chosen = trial;
        } else {
            k += 1;
        }
    }
    Some(chosen)
}

/// Integer `α` with `Σ αᵥ v = 0`, supported on a minimal dependent subset,
/// with `‖α‖∞ ≤ h(dim, C)` and first nonzero entry positive.
pub fn find_integer_dependency(p: &[TermVector], dim: usize) -> Result<Vec<BigInt>, LinalgError> {
    if let Some(q) = p.iter().find(|q| q.dim() != dim) {
        return Err(LinalgError::DimensionMismatch {
            expected: dim,
            got: q.dim(),
        });
    }
    let circuit = minimal_dependent_subset(p).ok_or(LinalgError::Independent)?;
    let mut alpha = vec![BigInt::zero(); p.len()];
    if circuit.len() == 1 {
        alpha[circuit[0]] = BigInt::one();
        return Ok(alpha);
    }

    // Rational kernel vector β of the circuit, fixing the last entry to 1.
    let last = *circuit.last().unwrap();
    let rest: Vec<usize> = circuit[..circuit.len() - 1].to_vec();
    let beta = circuit_kernel(p, &rest, last, dim);

    // u carries the largest |β|; first such in input order.
    let mut u_pos = 0;
    for (i, b) in beta.iter().enumerate() {
        if b.abs() > beta[u_pos].abs() {
            u_pos = i;
        }
    }
    let u = circuit[u_pos];
    let p0: Vec<usize> = circuit.iter().copied().filter(|&i| i != u).collect();

    // Extend P₀ to a basis with unit vectors.
    let mut basis: Vec<TermVector> = p0.iter().map(|&i| p[i].clone()).collect();
    for e in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut trial = basis.clone();
        trial.push(TermVector::unit(dim, e));
        let refs: Vec<&TermVector> = trial.iter().collect();
        if is_linearly_independent(&refs) {
            basis = trial;
        }
    }
    let cols: Vec<&TermVector> = basis.iter().collect();
    let m = IntMatrix::from_columns(&cols, dim);
    let det_m = determinant(&m)?;
    let u_col: Vec<BigInt> = p[u].entries().iter().map(|&x| BigInt::from(x)).collect();
    alpha[u] = det_m;
    for (j, &v) in p0.iter().enumerate() {
        alpha[v] = -determinant(&m.with_column(j, &u_col))?;
    }

    let g = alpha.iter().fold(BigInt::zero(), |g, a| g.gcd(a));
    if !g.is_zero() && !g.is_one() {
        for a in &mut alpha {
            *a /= &g;
        }
    }
    if alpha.iter().find(|a| !a.is_zero()).is_some_and(|a| a.is_negative()) {
        for a in &mut alpha {
            *a = -&*a;
        }
    }
    Ok(alpha)
}

/// Kernel of the circuit as rationals, indexed like `rest` followed by `last`,
/// normalized so that the coefficient of `last` is 1.
fn circuit_kernel(p: &[TermVector], rest: &[usize], last: usize, dim: usize) -> Vec<BigRational> {
    // Solve Σ x_i rest_i = -last on independent rows; rest is independent.
    let rest_vecs: Vec<TermVector> = rest.iter().map(|&i| p[i].clone()).collect();
    let k = rest.len();
    let mut rows = Vec::new();
    for i in 0..dim {
        if rows.len() == k {
            break;
        }
        let mut trial: Vec<usize> = rows.clone();
        trial.push(i);
        let restricted: Vec<TermVector> = trial
            .iter()
            .map(|&r| TermVector::from_vec(rest_vecs.iter().map(|v| v.get(r)).collect()))
            .collect();
        let refs: Vec<&TermVector> = restricted.iter().collect();
        if rank(&refs) == trial.len() {
            rows = trial;
        }
    }
    let mut m = IntMatrix::zeros(k, k);
    let mut b = Vec::with_capacity(k);
    for (r, &i) in rows.iter().enumerate() {
        for (c, v) in rest_vecs.iter().enumerate() {
            m.set(r, c, BigInt::from(v.get(i)));
        }
        b.push(BigInt::from(-p[last].get(i)));
    }
    let mut x = cramer_solve(&m, &b)
        .expect("square")
        .expect("independent rows give a nonsingular system");
    x.push(BigRational::one());
    x
}

/// Result of coefficient reduction: `Σ n′ᵥ v = Σ nᵥ v`, the vectors in `p0`
/// are independent, and every coefficient outside `p0` is at most `h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub coefficients: Vec<u64>,
    pub p0: Vec<usize>,
    pub h: BigInt,
}

/// Repeatedly subtracts an integer dependency among the vectors whose
/// coefficient is at least `H = h(dim, C)` until those vectors are
/// independent.
pub fn reduce_multiplicities(
    p: &[TermVector],
    n: &[u64],
    c: u64,
    dim: usize,
) -> Result<Reduction, LinalgError> {
    if n.len() != p.len() {
        return Err(LinalgError::DimensionMismatch {
            expected: p.len(),
            got: n.len(),
        });
    }
    let h = hadamard_bound(dim, &BigInt::from(c));
    // With C = 0 every vector is zero; a threshold of 1 still terminates.
    let threshold = h.clone().max(BigInt::one());
    let mut n: Vec<BigInt> = n.iter().map(|&k| BigInt::from(k)).collect();
    loop {
        let star: Vec<usize> = (0..p.len()).filter(|&i| n[i] >= threshold).collect();
        let vecs: Vec<TermVector> = star.iter().map(|&i| p[i].clone()).collect();
        let refs: Vec<&TermVector> = vecs.iter().collect();
        if is_linearly_independent(&refs) {
            let coefficients = n
                .iter()
                .map(|k| k.to_u64().expect("coefficients never grow past the input sum"))
                .collect();
            return Ok(Reduction {
                coefficients,
                p0: star,
                h,
            });
        }
        let alpha = find_integer_dependency(&vecs, dim)?;
        let t = star
            .iter()
            .zip(&alpha)
            .filter(|(_, a)| a.is_positive())
            .map(|(&i, a)| &n[i] / a)
            .min()
            .expect("a dependency has a positive entry");
        for (&i, a) in star.iter().zip(&alpha) {
            n[i] -= &t * a;
        }
    }
}
