//! Sparse exact linear algebra over `Rational`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: matrix has {rows} rows, right-hand side has length {rhs}")]
    Dimension { rows: usize, rhs: usize },
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    OutOfBounds { row: usize, col: usize, rows: usize, cols: usize },
}

/// Sparse vector of fixed length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseVector {
    pub len: usize,
    entries: BTreeMap<usize, Rational>,
}

impl SparseVector {
    pub fn zeros(len: usize) -> Self {
        SparseVector { len, entries: BTreeMap::new() }
    }

    pub fn from_dense(v: &[Rational]) -> Self {
        let mut out = SparseVector::zeros(v.len());
        for (i, c) in v.iter().enumerate() {
            out.set(i, c.clone());
        }
        out
    }

    /// Unit vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut out = SparseVector::zeros(len);
        out.set(i, Rational::from(1));
        out
    }

    pub fn set(&mut self, i: usize, c: Rational) {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        if c.is_zero() {
            self.entries.remove(&i);
        } else {
            self.entries.insert(i, c);
        }
    }

    pub fn get(&self, i: usize) -> Rational {
        self.entries.get(&i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.entries.iter().map(|(i, c)| (*i, c))
    }

    pub fn to_dense(&self) -> Vec<Rational> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

/// Row-major sparse matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BTreeMap<usize, Rational>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, data: vec![BTreeMap::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SparseMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i].insert(i, Rational::from(1));
        }
        m
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = SparseMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, c) in r.iter().enumerate() {
                if !c.is_zero() {
                    m.data[i].insert(j, c.clone());
                }
            }
        }
        m
    }

    pub fn set(&mut self, row: usize, col: usize, c: Rational) -> Result<(), LinalgError> {
        if row >= self.rows || col >= self.cols {
            return Err(LinalgError::OutOfBounds { row, col, rows: self.rows, cols: self.cols });
        }
        if c.is_zero() {
            self.data[row].remove(&col);
        } else {
            self.data[row].insert(col, c);
        }
        Ok(())
    }

    pub fn get(&self, row: usize, col: usize) -> Rational {
        self.data[row].get(&col).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn mul_vec(&self, v: &SparseVector) -> SparseVector {
        let mut out = SparseVector::zeros(self.rows);
        for (i, row) in self.data.iter().enumerate() {
            let mut acc = Rational::zero();
            for (j, c) in row {
                let x = v.get(*j);
                if !x.is_zero() {
                    acc += &(c * &x);
                }
            }
            out.set(i, acc);
        }
        out
    }
}

/// Solve `m * v = rhs` exactly.
///
/// Gauss-Jordan elimination, pivoting on the lowest-index nonzero row of each
/// column in turn; free variables are set to zero. `Ok(None)` means the system
/// is inconsistent.
pub fn solve_linear(m: &SparseMatrix, rhs: &SparseVector) -> Result<Option<SparseVector>, LinalgError> {
    if rhs.len != m.rows {
        return Err(LinalgError::Dimension { rows: m.rows, rhs: rhs.len });
    }
    let mut rows: Vec<(BTreeMap<usize, Rational>, Rational)> =
        m.data.iter().enumerate().map(|(i, r)| (r.clone(), rhs.get(i))).collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut next = 0;
    for col in 0..m.cols {
        let Some(p) = (next..rows.len()).find(|&i| rows[i].0.contains_key(&col)) else {
            continue;
        };
        rows.swap(next, p);
        let inv = rows[next].0[&col].recip();
        let (prow, pb) = {
            let (r, b) = &rows[next];
            let r: BTreeMap<usize, Rational> = r.iter().map(|(j, c)| (*j, c * &inv)).collect();
            (r, b * &inv)
        };
        rows[next] = (prow.clone(), pb.clone());
        for i in 0..rows.len() {
            if i == next {
                continue;
            }
            let Some(f) = rows[i].0.get(&col).cloned() else {
                continue;
            };
            let (r, b) = &mut rows[i];
            for (j, c) in &prow {
                let e = r.entry(*j).or_insert_with(Rational::zero);
                *e -= &(&f * c);
                if e.is_zero() {
                    r.remove(j);
                }
            }
            *b -= &(&f * &pb);
        }
        pivots.push((next, col));
        next += 1;
        if next == rows.len() {
            break;
        }
    }
    if rows[next..].iter().any(|(_, b)| !b.is_zero()) {
        return Ok(None);
    }
    let mut sol = SparseVector::zeros(m.cols);
    for (r, c) in pivots {
        sol.set(c, rows[r].1.clone());
    }
    Ok(Some(sol))
}

/// Rank by fraction-free row reduction of a dense copy.
pub fn rank(m: &SparseMatrix) -> usize {
    let mut rows: Vec<Vec<Rational>> = (0..m.rows).map(|i| (0..m.cols).map(|j| m.get(i, j)).collect()).collect();
    let mut r = 0;
    for col in 0..m.cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for row in rows.iter_mut().skip(r + 1) {
            if row[col].is_zero() {
                continue;
            }
            let f = &row[col] / &pivot[col];
            for (x, y) in row.iter_mut().zip(&pivot) {
                *x -= &(&f * y);
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn r(n: i64) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn identity_system() {
        let sol = solve_linear(&SparseMatrix::identity(3), &SparseVector::unit(3, 0)).unwrap();
        assert_eq!(sol, Some(SparseVector::unit(3, 0)));
    }

    #[test]
    fn upper_triangular() {
        let m = SparseMatrix::from_dense(&[vec![r(1), r(1)], vec![r(0), r(1)]]);
        let sol = solve_linear(&m, &SparseVector::from_dense(&[r(3), r(1)])).unwrap().unwrap();
        assert_eq!(sol.to_dense(), vec![r(2), r(1)]);
    }

    #[test]
    fn inconsistent_singular() {
        let m = SparseMatrix::from_dense(&[vec![r(1), r(2)], vec![r(2), r(4)]]);
        let sol = solve_linear(&m, &SparseVector::from_dense(&[r(1), r(3)])).unwrap();
        assert_eq!(sol, None);
    }

    #[test]
    fn rational_pivots_and_free_columns() {
        let m = SparseMatrix::from_dense(&[vec![r(0), r(2), r(4)], vec![r(0), r(3), r(1)]]);
        let rhs = SparseVector::from_dense(&[r(1), q(1, 2)]);
        let sol = solve_linear(&m, &rhs).unwrap().unwrap();
        assert_eq!(m.mul_vec(&sol), rhs);
        assert_eq!(sol.get(0), r(0));
    }

    #[test]
    fn ranks() {
        assert_eq!(rank(&SparseMatrix::identity(3)), 3);
        assert_eq!(rank(&SparseMatrix::from_dense(&[vec![r(1), r(2)], vec![r(2), r(4)]])), 1);
        assert_eq!(rank(&SparseMatrix::zeros(2, 3)), 0);
    }

    #[test]
    fn dimension_error() {
        assert!(solve_linear(&SparseMatrix::identity(2), &SparseVector::zeros(3)).is_err());
    }
}
