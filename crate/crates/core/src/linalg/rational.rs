//! Dense and sparse linear algebra over Q.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Row-major dense matrix over Q.
#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<Q>>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![vec![Q::zero(); cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = Q::one();
        }
        m
    }

    pub fn from_rows(data: Vec<Vec<Q>>, cols: usize) -> Self {
        QMatrix {
            rows: data.len(),
            cols,
            data,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i][j]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j][i] = self.data[i][j].clone();
            }
        }
        t
    }

    pub fn mul(&self, o: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, o.rows);
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o.data[k][j];
                    if !b.is_zero() {
                        out.data[i][j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        self.data
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Q::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn sub_scalar_identity(&self, c: &Q) -> QMatrix {
        let mut m = self.clone();
        for i in 0..m.rows.min(m.cols) {
            m.data[i][i] -= c;
        }
        m
    }

    /// Reduces in place to reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self.data[i][c].is_zero()) else {
                continue;
            };
            self.data.swap(r, pr);
            let inv = self.data[r][c].recip();
            for x in self.data[r].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
            let pivot_row = self.data[r].clone();
            for i in 0..self.rows {
                if i != r && !self.data[i][c].is_zero() {
                    let f = self.data[i][c].clone();
                    for (x, y) in self.data[i].iter_mut().zip(&pivot_row) {
                        if !y.is_zero() {
                            *x -= &f * y;
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right kernel {x : A x = 0}, as vectors of length `cols`.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Q::zero(); self.cols];
                v[f] = Q::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -m.data[r][f].clone();
                }
                v
            })
            .collect()
    }

    /// Solves X A = B for X given that each row of B lies in the row space of A.
    pub fn solve_left(a: &QMatrix, b: &QMatrix) -> Option<QMatrix> {
        // X A = B  <=>  A^T X^T = B^T
        let at = a.transpose();
        let bt = b.transpose();
        let n = at.cols;
        let mut aug = QMatrix::zeros(at.rows, n + bt.cols);
        for i in 0..at.rows {
            for j in 0..n {
                aug.data[i][j] = at.data[i][j].clone();
            }
            for j in 0..bt.cols {
                aug.data[i][n + j] = bt.data[i][j].clone();
            }
        }
        let pivots = aug.rref();
        if pivots.iter().any(|&p| p >= n) {
            return None;
        }
        let mut xt = QMatrix::zeros(n, bt.cols);
        for (r, &pc) in pivots.iter().enumerate() {
            for j in 0..bt.cols {
                xt.data[pc][j] = aug.data[r][n + j].clone();
            }
        }
        Some(xt.transpose())
    }
}

/// Sparse row vector over Q.
pub type SparseVec = BTreeMap<usize, Q>;

pub fn sparse_axpy(y: &mut SparseVec, a: &Q, x: &SparseVec) {
    for (k, v) in x {
        let e = y.entry(*k).or_insert_with(Q::zero);
        *e += a * v;
        if e.is_zero() {
            y.remove(k);
        }
    }
}

/// Incremental sparse echelon form: pivot of each row is its smallest column.
#[derive(Default, Debug, Clone)]
pub struct SparseEchelon {
    pub rows: BTreeMap<usize, SparseVec>,
}

impl SparseEchelon {
    pub fn reduce(&self, mut v: SparseVec) -> SparseVec {
        let mut cursor = 0usize;
        loop {
            let next = v.range(cursor..).map(|(k, _)| *k).find(|k| self.rows.contains_key(k));
            let Some(c) = next else { break };
            let coef = v[&c].clone();
            let row = &self.rows[&c];
            sparse_axpy(&mut v, &(-coef), row);
            cursor = c + 1;
        }
        v
    }

    /// Adds a relation; returns false if it was already dependent.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let mut v = self.reduce(v);
        let Some((&c, lead)) = v.iter().next() else {
            return false;
        };
        let inv = lead.recip();
        for x in v.values_mut() {
            *x *= &inv;
        }
        self.rows.insert(c, v);
        true
    }

    /// For each column, its expression in terms of the free (non-pivot) columns.
    pub fn solve_all(&self, ncols: usize) -> (Vec<usize>, Vec<SparseVec>) {
        let free: Vec<usize> = (0..ncols).filter(|c| !self.rows.contains_key(c)).collect();
        let free_pos: BTreeMap<usize, usize> =
            free.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut expr: Vec<Option<SparseVec>> = vec![None; ncols];
        for (&c, &i) in &free_pos {
            let mut e = SparseVec::new();
            e.insert(i, Q::one());
            expr[c] = Some(e);
        }
        for (&c, row) in self.rows.iter().rev() {
            let mut e = SparseVec::new();
            for (k, v) in row {
                if *k == c {
                    continue;
                }
                let sub = expr[*k].as_ref().expect("later columns solved first");
                sparse_axpy(&mut e, &(-v.clone()), sub);
            }
            expr[c] = Some(e);
        }
        (free, expr.into_iter().map(|e| e.unwrap()).collect())
    }
}

pub fn is_integral(x: &Q) -> bool {
    x.denom().is_one()
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_rank_one() {
        let m = QMatrix::from_rows(vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)]], 3);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn sparse_echelon_solves() {
        // x0 + x1 = 0, x1 - x2 = 0  => x0 = -x2, x1 = x2.
        let mut e = SparseEchelon::default();
        e.insert([(0, q(1)), (1, q(1))].into_iter().collect());
        e.insert([(1, q(1)), (2, q(-1))].into_iter().collect());
        let (free, expr) = e.solve_all(3);
        assert_eq!(free, vec![2]);
        assert_eq!(expr[0].get(&0), Some(&q(-1)));
        assert_eq!(expr[1].get(&0), Some(&q(1)));
    }

    #[test]
    fn solve_left_recovers() {
        let a = QMatrix::from_rows(vec![vec![q(1), q(0)], vec![q(1), q(1)]], 2);
        let x = QMatrix::from_rows(vec![vec![q(2), q(-1)]], 2);
        let b = x.mul(&a);
        assert_eq!(QMatrix::solve_left(&a, &b).unwrap(), x);
    }
}
