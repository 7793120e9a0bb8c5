//! Square matrices of polynomials: Jacobians, minors and determinants.

use std::sync::Arc;

use num_rational::BigRational;

use crate::linalg::RatMatrix;
use crate::poly::{Polynomial, Ring};

/// A square matrix with polynomial entries over a common ring. The pipeline
/// uses 4×4 matrices with the block view `[[A, B], [C, D]]`, `A` the upper-left
/// 2×2 block; the determinant helpers accept any size.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    n: usize,
    entries: Vec<Polynomial>,
}

impl std::ops::Index<(usize, usize)> for PolyMatrix {
    type Output = Polynomial;
    fn index(&self, (i, j): (usize, usize)) -> &Polynomial {
        &self.entries[i * self.n + j]
    }
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn index_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

impl PolyMatrix {
    /// Row-major entries; the count must be a perfect square.
    pub fn from_entries(entries: Vec<Polynomial>) -> Self {
        let n = (entries.len() as f64).sqrt().round() as usize;
        assert_eq!(n * n, entries.len(), "entry count is not a square");
        assert!(n > 0, "empty matrix");
        let ring = entries[0].ring().clone();
        assert!(entries.iter().all(|e| **e.ring() == *ring), "entries from different rings");
        PolyMatrix { n, entries }
    }

    pub fn identity(ring: &Arc<Ring>, n: usize) -> Self {
        let entries = (0..n * n)
            .map(|k| if k / n == k % n { Polynomial::one(ring) } else { Polynomial::zero(ring) })
            .collect();
        PolyMatrix { n, entries }
    }

    pub fn zero(ring: &Arc<Ring>, n: usize) -> Self {
        PolyMatrix { n, entries: vec![Polynomial::zero(ring); n * n] }
    }

    pub fn from_rational(ring: &Arc<Ring>, m: &RatMatrix) -> Self {
        assert!(m.is_square());
        let n = m.rows();
        let entries = (0..n * n).map(|k| Polynomial::constant(ring, m[(k / n, k % n)].clone())).collect();
        PolyMatrix { n, entries }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.entries[0].ring()
    }

    pub fn entries(&self) -> &[Polynomial] {
        &self.entries
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        assert_eq!(rows.len(), cols.len(), "submatrix must be square");
        let entries = rows.iter().flat_map(|&i| cols.iter().map(move |&j| self[(i, j)].clone())).collect();
        PolyMatrix { n: rows.len(), entries }
    }

    /// Upper-left 2×2 block `A`.
    pub fn block_a(&self) -> PolyMatrix {
        self.submatrix(&[0, 1], &[0, 1])
    }

    pub fn mul(&self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Polynomial::zero(self.ring());
                for k in 0..n {
                    if !self[(i, k)].is_zero() && !rhs[(k, j)].is_zero() {
                        acc = &acc + &(&self[(i, k)] * &rhs[(k, j)]);
                    }
                }
                entries.push(acc);
            }
        }
        PolyMatrix { n, entries }
    }

    pub fn evaluate(&self, point: &[BigRational]) -> RatMatrix {
        let n = self.n;
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self[(i, j)].evaluate(point);
            }
        }
        m
    }

    /// Exact determinant by cofactor expansion along the first row.
    pub fn det(&self) -> Polynomial {
        self.det_with(&|p| p)
    }

    /// Cofactor expansion along row `row`.
    pub fn det_along_row(&self, row: usize) -> Polynomial {
        let n = self.n;
        if n == 1 {
            return self.entries[0].clone();
        }
        let mut acc = Polynomial::zero(self.ring());
        let rows: Vec<usize> = (0..n).filter(|&i| i != row).collect();
        for j in 0..n {
            if self[(row, j)].is_zero() {
                continue;
            }
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor = self.submatrix(&rows, &cols).det();
            let term = &self[(row, j)] * &minor;
            acc = if (row + j) % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        acc
    }

    /// Cofactor expansion that passes every intermediate product through
    /// `reduce` (e.g. a normal form modulo an ideal).
    pub fn det_with(&self, reduce: &dyn Fn(Polynomial) -> Polynomial) -> Polynomial {
        let n = self.n;
        if n == 1 {
            return reduce(self.entries[0].clone());
        }
        if n == 2 {
            let a = reduce(&self[(0, 0)] * &self[(1, 1)]);
            let b = reduce(&self[(0, 1)] * &self[(1, 0)]);
            return &a - &b;
        }
        let rows: Vec<usize> = (1..n).collect();
        let mut acc = Polynomial::zero(self.ring());
        for j in 0..n {
            if self[(0, j)].is_zero() {
                continue;
            }
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor = self.submatrix(&rows, &cols).det_with(reduce);
            let term = reduce(&self[(0, j)] * &minor);
            acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        acc
    }

    /// All `k`×`k` minors, row subsets outermost, both in lexicographic order
    /// of their index sets.
    pub fn minors(&self, k: usize) -> Vec<Polynomial> {
        let subsets = index_subsets(self.n, k);
        let mut out = Vec::with_capacity(subsets.len() * subsets.len());
        for rows in &subsets {
            for cols in &subsets {
                out.push(self.submatrix(rows, cols).det());
            }
        }
        out
    }

    /// Minor obtained by deleting row `i` and column `j` (0-based). No
    /// cofactor sign is applied.
    pub fn deletion_minor(&self, i: usize, j: usize) -> Polynomial {
        let rows: Vec<usize> = (0..self.n).filter(|&r| r != i).collect();
        let cols: Vec<usize> = (0..self.n).filter(|&c| c != j).collect();
        self.submatrix(&rows, &cols).det()
    }

    /// `(h44, h43, h34, h33)`: the 3×3 minors deleting one of rows 3-4 and
    /// one of columns 3-4, unsigned.
    pub fn corner_minors(&self) -> [Polynomial; 4] {
        assert_eq!(self.n, 4, "corner minors need a 4x4 matrix");
        [
            self.deletion_minor(3, 3),
            self.deletion_minor(3, 2),
            self.deletion_minor(2, 3),
            self.deletion_minor(2, 2),
        ]
    }

    /// `l1 * self * l2` with constant rational `l1`, `l2`.
    pub fn sandwich(l1: &RatMatrix, m: &PolyMatrix, l2: &RatMatrix) -> PolyMatrix {
        let ring = m.ring().clone();
        PolyMatrix::from_rational(&ring, l1).mul(m).mul(&PolyMatrix::from_rational(&ring, l2))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Polynomial::is_zero)
    }
}

/// `Df`: entry `(i, j)` is `∂f_i/∂x_j`.
pub fn jacobian(f: &[Polynomial]) -> PolyMatrix {
    let n = f.len();
    assert!(n > 0);
    assert_eq!(f[0].ring().nvars(), n, "jacobian needs as many components as variables");
    let entries = f.iter().flat_map(|fi| (0..n).map(move |j| fi.derivative(j))).collect();
    PolyMatrix::from_entries(entries)
}

/// `l1 * m * l2`.
pub fn sandwich(l1: &RatMatrix, m: &PolyMatrix, l2: &RatMatrix) -> PolyMatrix {
    PolyMatrix::sandwich(l1, m, l2)
}
