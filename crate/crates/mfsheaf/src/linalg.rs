//! Exact dense linear algebra over the active field.
//!
//! Everything reduces to Gaussian elimination with unit-preferring pivoting;
//! the matrices that arise here are incidence-like (multiplication by small
//! forms), so preferring +/-1 pivots keeps rational entries from growing.

use crate::field::{FieldSpec, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    pub field: FieldSpec,
    pub nrows: usize,
    pub ncols: usize,
    pub a: Vec<Vec<Scalar>>,
}

impl Mat {
    pub fn zero(field: FieldSpec, nrows: usize, ncols: usize) -> Mat {
        Mat {
            field,
            nrows,
            ncols,
            a: vec![vec![Scalar::zero(field); ncols]; nrows],
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Mat {
        let mut m = Mat::zero(field, n, n);
        for i in 0..n {
            m.a[i][i] = Scalar::one(field);
        }
        m
    }

    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<Scalar>>) -> Mat {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        for r in &rows {
            assert_eq!(r.len(), ncols);
        }
        Mat { field, nrows, ncols, a: rows }
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.ncols, other.nrows);
        let mut out = Mat::zero(self.field, self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                if self.a[i][k].is_zero() {
                    continue;
                }
                for j in 0..other.ncols {
                    if other.a[k][j].is_zero() {
                        continue;
                    }
                    out.a[i][j] = out.a[i][j].add(&self.a[i][k].mul(&other.a[k][j]));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.ncols, v.len());
        (0..self.nrows)
            .map(|i| {
                let mut acc = Scalar::zero(self.field);
                for j in 0..self.ncols {
                    if !self.a[i][j].is_zero() && !v[j].is_zero() {
                        acc = acc.add(&self.a[i][j].mul(&v[j]));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zero(self.field, self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out.a[j][i] = self.a[i][j].clone();
            }
        }
        out
    }

    /// Horizontal concatenation [self | other].
    pub fn hcat(&self, other: &Mat) -> Mat {
        assert_eq!(self.nrows, other.nrows);
        let mut rows = Vec::with_capacity(self.nrows);
        for i in 0..self.nrows {
            let mut r = self.a[i].clone();
            r.extend(other.a[i].iter().cloned());
            rows.push(r);
        }
        Mat::from_rows(self.field, rows)
    }

    /// Reduced row echelon form; returns pivot column indices.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.ncols {
            if row == m.nrows {
                break;
            }
            // Prefer +/-1 pivots to limit coefficient growth over Q.
            let mut pick: Option<usize> = None;
            for r in row..m.nrows {
                if m.a[r][col].is_zero() {
                    continue;
                }
                if m.a[r][col].abs_is_small_int(1) {
                    pick = Some(r);
                    break;
                }
                if pick.is_none() {
                    pick = Some(r);
                }
            }
            let Some(p) = pick else { continue };
            m.a.swap(row, p);
            let inv = m.a[row][col].inv().unwrap();
            for j in col..m.ncols {
                m.a[row][j] = m.a[row][j].mul(&inv);
            }
            for r in 0..m.nrows {
                if r != row && !m.a[r][col].is_zero() {
                    let f = m.a[r][col].clone();
                    for j in col..m.ncols {
                        if !m.a[row][j].is_zero() {
                            m.a[r][j] = m.a[r][j].sub(&f.mul(&m.a[row][j]));
                        }
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel. rank + kernel dim = ncols.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        let mut free: Vec<usize> = (0..self.ncols).filter(|c| !pivots.contains(c)).collect();
        free.sort_unstable();
        let mut out = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![Scalar::zero(self.field); self.ncols];
            v[fc] = Scalar::one(self.field);
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = r.a[prow][fc].neg();
            }
            out.push(v);
        }
        out
    }

    /// One solution of `self * x = b`, if consistent.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.nrows);
        let bm = Mat::from_rows(self.field, b.iter().map(|c| vec![c.clone()]).collect());
        let aug = self.hcat(&bm);
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.ncols) {
            return None; // inconsistent
        }
        let mut x = vec![Scalar::zero(self.field); self.ncols];
        for (prow, &pcol) in pivots.iter().enumerate() {
            x[pcol] = r.a[prow][self.ncols].clone();
        }
        Some(x)
    }
}

/// A subspace of a coordinate space, held in reduced row echelon form so
/// membership and canonical reduction are single passes.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub field: FieldSpec,
    pub ambient_dim: usize,
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn from_spanning(field: FieldSpec, ambient_dim: usize, vectors: &[Vec<Scalar>]) -> Self {
        let m = Mat::from_rows(
            field,
            vectors
                .iter()
                .map(|v| {
                    assert_eq!(v.len(), ambient_dim);
                    v.clone()
                })
                .collect(),
        );
        if vectors.is_empty() {
            return Subspace { field, ambient_dim, rows: Vec::new(), pivots: Vec::new() };
        }
        let (r, pivots) = m.rref();
        let rows = r.a.into_iter().take(pivots.len()).collect();
        Subspace { field, ambient_dim, rows, pivots }
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// Canonical residual of `v` modulo the subspace; zero iff `v` lies in it.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.ambient_dim);
        let mut out = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !out[p].is_zero() {
                let f = out[p].clone();
                for j in 0..self.ambient_dim {
                    if !row[j].is_zero() {
                        out[j] = out[j].sub(&f.mul(&row[j]));
                    }
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce(v).iter().all(|c| c.is_zero())
    }

    /// Coordinates of the residual on the non-pivot axes: a basis-independent
    /// chart of the quotient space.
    pub fn quotient_coords(&self, v: &[Scalar]) -> Vec<Scalar> {
        let red = self.reduce(v);
        self.complement_positions()
            .into_iter()
            .map(|j| red[j].clone())
            .collect()
    }

    pub fn complement_positions(&self) -> Vec<usize> {
        (0..self.ambient_dim)
            .filter(|j| !self.pivots.contains(j))
            .collect()
    }

    pub fn quotient_dim(&self) -> usize {
        self.ambient_dim - self.dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Scalar {
        Scalar::from_i64(FieldSpec::Q, n)
    }

    #[test]
    fn identity_rank_and_kernel() {
        let m = Mat::identity(FieldSpec::Q, 3);
        assert_eq!(m.rank(), 3);
        assert!(m.kernel_basis().is_empty());
    }

    #[test]
    fn zero_matrix_kernel() {
        let m = Mat::zero(FieldSpec::Q, 2, 5);
        assert_eq!(m.rank(), 0);
        assert_eq!(m.kernel_basis().len(), 5);
    }

    #[test]
    fn rank_plus_nullity_is_ncols() {
        let rows = vec![
            vec![q(1), q(2), q(3), q(4)],
            vec![q(2), q(4), q(6), q(8)],
            vec![q(0), q(1), q(1), q(0)],
        ];
        let m = Mat::from_rows(FieldSpec::Q, rows);
        assert_eq!(m.rank() + m.kernel_basis().len(), m.ncols);
        for k in m.kernel_basis() {
            assert!(m.mul_vec(&k).iter().all(|c| c.is_zero()));
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = Mat::from_rows(
            FieldSpec::Q,
            vec![vec![q(1), q(1)], vec![q(1), q(-1)], vec![q(2), q(0)]],
        );
        let x = m.solve(&[q(3), q(1), q(4)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![q(3), q(1), q(4)]);
        assert!(m.solve(&[q(3), q(1), q(5)]).is_none());
    }

    #[test]
    fn subspace_reduction_is_canonical() {
        let s = Subspace::from_spanning(
            FieldSpec::Q,
            3,
            &[vec![q(1), q(1), q(0)], vec![q(0), q(0), q(1)]],
        );
        assert_eq!(s.dim(), 2);
        assert_eq!(s.quotient_dim(), 1);
        assert!(s.contains(&[q(2), q(2), q(7)]));
        let c = s.quotient_coords(&[q(1), q(4), q(0)]);
        assert_eq!(c, vec![q(3)]);
    }
}
