//! Degree-decorated matrices of forms: maps of split bundles
//! `⊕ O(a_j) -> ⊕ O(b_i)` on projective space, their graded piece slices,
//! determinants, and presentation surgery (minimalization, redundant-column
//! removal).

use crate::field::{FieldSpec, Scalar};
use crate::linalg::Mat;
use crate::poly::{binomial, monomial_basis, monomial_index, piece_dim, Form};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GradedError {
    #[error("degree mismatch: entry ({row},{col}) has degree {found}, expected {expected}")]
    DegreeMismatch {
        row: usize,
        col: usize,
        expected: i64,
        found: i64,
    },
    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),
}

/// The polynomial ring a matrix lives over.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ring {
    pub field: FieldSpec,
    pub vars: Vec<String>,
}

impl Ring {
    pub fn new(field: FieldSpec, vars: &[&str]) -> Ring {
        Ring {
            field,
            vars: vars.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// k[x,y,z,w], the coordinate ring of P^3.
    pub fn p3(field: FieldSpec) -> Ring {
        Ring::new(field, &["x", "y", "z", "w"])
    }

    /// k[x,y,z], the coordinate ring of the plane H.
    pub fn p2(field: FieldSpec) -> Ring {
        Ring::new(field, &["x", "y", "z"])
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var(&self, i: usize) -> Form {
        Form::variable(self.field, self.nvars(), i)
    }

    /// Dimension of the projective space Proj of this ring.
    pub fn proj_dim(&self) -> i64 {
        self.nvars() as i64 - 1
    }
}

/// A matrix of forms with row (target) and column (source) twists; the
/// (i,j) entry is homogeneous of degree `rows[i] - cols[j]` or zero.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedMatrix {
    pub ring: Ring,
    /// Target twists b_i.
    pub rows: Vec<i64>,
    /// Source twists a_j.
    pub cols: Vec<i64>,
    pub entries: Vec<Vec<Form>>,
}

impl GradedMatrix {
    pub fn new(
        ring: Ring,
        rows: Vec<i64>,
        cols: Vec<i64>,
        entries: Vec<Vec<Form>>,
    ) -> Result<GradedMatrix, GradedError> {
        let m = GradedMatrix { ring, rows, cols, entries };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), GradedError> {
        assert_eq!(self.entries.len(), self.rows.len());
        for (i, row) in self.entries.iter().enumerate() {
            assert_eq!(row.len(), self.cols.len());
            for (j, e) in row.iter().enumerate() {
                let expected = self.rows[i] - self.cols[j];
                if e.is_zero() {
                    continue;
                }
                if e.degree != expected {
                    return Err(GradedError::DegreeMismatch {
                        row: i,
                        col: j,
                        expected,
                        found: e.degree,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn zero_sized(ring: Ring, rows: Vec<i64>, cols: Vec<i64>) -> GradedMatrix {
        let entries = rows
            .iter()
            .map(|&b| {
                cols.iter()
                    .map(|&a| Form::zero(ring.field, ring.nvars(), b - a))
                    .collect()
            })
            .collect();
        GradedMatrix { ring, rows, cols, entries }
    }

    /// f * identity with source twists `rows - deg f`.
    pub fn scalar_diag(ring: Ring, rows: &[i64], f: &Form) -> GradedMatrix {
        let cols: Vec<i64> = rows.iter().map(|&b| b - f.degree).collect();
        let mut m = GradedMatrix::zero_sized(ring, rows.to_vec(), cols);
        for i in 0..m.rows.len() {
            m.entries[i][i] = f.clone();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|e| e.is_zero())
    }

    /// Degree of the determinant of a square matrix: sum b_i - sum a_j.
    pub fn det_degree(&self) -> i64 {
        self.rows.iter().sum::<i64>() - self.cols.iter().sum::<i64>()
    }

    pub fn twist(&self, t: i64) -> GradedMatrix {
        GradedMatrix {
            ring: self.ring.clone(),
            rows: self.rows.iter().map(|b| b + t).collect(),
            cols: self.cols.iter().map(|a| a + t).collect(),
            entries: self.entries.clone(),
        }
    }

    pub fn matmul(&self, other: &GradedMatrix) -> GradedMatrix {
        assert_eq!(self.ring, other.ring);
        assert_eq!(
            self.cols, other.rows,
            "inner twists must agree for a graded product"
        );
        let mut out = GradedMatrix::zero_sized(self.ring.clone(), self.rows.clone(), other.cols.clone());
        for i in 0..self.nrows() {
            for j in 0..other.ncols() {
                let mut acc = Form::zero(self.ring.field, self.ring.nvars(), self.rows[i] - other.cols[j]);
                for k in 0..self.ncols() {
                    if self.entries[i][k].is_zero() || other.entries[k][j].is_zero() {
                        continue;
                    }
                    acc = acc.add(&self.entries[i][k].mul(&other.entries[k][j]));
                }
                out.entries[i][j] = acc;
            }
        }
        out
    }

    pub fn sub(&self, other: &GradedMatrix) -> GradedMatrix {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a.sub(b)).collect())
            .collect();
        GradedMatrix {
            ring: self.ring.clone(),
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            entries,
        }
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, other: &GradedMatrix) -> GradedMatrix {
        assert_eq!(self.ring, other.ring);
        let rows: Vec<i64> = self.rows.iter().chain(&other.rows).copied().collect();
        let cols: Vec<i64> = self.cols.iter().chain(&other.cols).copied().collect();
        let mut out = GradedMatrix::zero_sized(self.ring.clone(), rows, cols);
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                out.entries[i][j] = self.entries[i][j].clone();
            }
        }
        for i in 0..other.nrows() {
            for j in 0..other.ncols() {
                out.entries[self.nrows() + i][self.ncols() + j] = other.entries[i][j].clone();
            }
        }
        out
    }

    /// The scalar matrix of the degree-`t` slice
    /// `⊕ S_{a_j + t} -> ⊕ S_{b_i + t}` in the fixed monomial bases.
    pub fn piece_map(&self, t: i64) -> Mat {
        let nv = self.ring.nvars();
        let field = self.ring.field;
        let row_dims: Vec<usize> = self.rows.iter().map(|&b| piece_dim(nv, b + t)).collect();
        let col_dims: Vec<usize> = self.cols.iter().map(|&a| piece_dim(nv, a + t)).collect();
        let nrows: usize = row_dims.iter().sum();
        let ncols: usize = col_dims.iter().sum();
        let mut out = Mat::zero(field, nrows, ncols);
        let mut row_off = 0;
        for (i, &rd) in row_dims.iter().enumerate() {
            let mut col_off = 0;
            for (j, &cd) in col_dims.iter().enumerate() {
                let e = &self.entries[i][j];
                if !e.is_zero() && rd > 0 && cd > 0 {
                    write_mult_block(&mut out, row_off, col_off, e, self.cols[j] + t);
                }
                col_off += cd;
            }
            row_off += rd;
        }
        out
    }

    /// Exact determinant as a form of degree `det_degree()`; fraction-free
    /// Bareiss for order >= 4, cofactor expansion below.
    pub fn det_poly(&self) -> Form {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.nrows();
        let nv = self.ring.nvars();
        let field = self.ring.field;
        if n == 0 {
            return Form::one(field, nv);
        }
        if n < 4 {
            return det_cofactor(self, &(0..n).collect::<Vec<_>>(), &(0..n).collect::<Vec<_>>());
        }
        // Bareiss: all divisions are exact.
        let mut a: Vec<Vec<Form>> = self.entries.clone();
        let mut prev = Form::one(field, nv);
        let mut sign = false;
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                    return Form::zero(field, nv, self.det_degree());
                };
                a.swap(k, p);
                sign = !sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[k][k].mul(&a[i][j]).sub(&a[i][k].mul(&a[k][j]));
                    a[i][j] = num
                        .div_exact(&prev)
                        .expect("Bareiss division is exact by construction");
                }
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        if sign {
            d.neg()
        } else {
            d
        }
    }

    /// Repeatedly pivots on unit (degree-0) entries, deleting one row and one
    /// column per pivot; the cokernel is unchanged up to isomorphism. Pivot
    /// choice: first unit in row-major order.
    pub fn minimalize(&self) -> GradedMatrix {
        let mut m = self.clone();
        loop {
            let mut pivot = None;
            'scan: for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    if m.entries[i][j].is_unit() {
                        pivot = Some((i, j));
                        break 'scan;
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break };
            // Normalize the pivot row so the pivot is 1.
            let inv = Form::constant(
                m.ring.field,
                m.ring.nvars(),
                m.entries[pi][pj].coeffs[0].inv().unwrap(),
            );
            for j in 0..m.ncols() {
                if !m.entries[pi][j].is_zero() {
                    m.entries[pi][j] = m.entries[pi][j].mul(&inv);
                }
            }
            // Clear the pivot column with row operations.
            for i in 0..m.nrows() {
                if i == pi || m.entries[i][pj].is_zero() {
                    continue;
                }
                let f = m.entries[i][pj].clone();
                for j in 0..m.ncols() {
                    if !m.entries[pi][j].is_zero() {
                        let delta = f.mul(&m.entries[pi][j]);
                        m.entries[i][j] = m.entries[i][j].sub(&delta);
                    }
                }
            }
            // Column operations only touch row pi now; just drop row and column.
            m.rows.remove(pi);
            m.entries.remove(pi);
            m.cols.remove(pj);
            for row in &mut m.entries {
                row.remove(pj);
            }
        }
        m
    }

    /// Drops columns that are graded combinations of the remaining ones; the
    /// cokernel is unchanged. Scans left to right, restarting after each
    /// removal, so the result is deterministic.
    pub fn drop_redundant_columns(&self) -> GradedMatrix {
        let mut m = self.clone();
        'outer: loop {
            for j in 0..m.ncols() {
                if m.column_is_redundant(j) {
                    m.cols.remove(j);
                    for row in &mut m.entries {
                        row.remove(j);
                    }
                    continue 'outer;
                }
            }
            break;
        }
        m
    }

    fn column_is_redundant(&self, j: usize) -> bool {
        if self.ncols() <= 1 {
            return self.entries.iter().all(|r| r[j].is_zero());
        }
        let mut rest = self.clone();
        rest.cols.remove(j);
        for row in &mut rest.entries {
            row.remove(j);
        }
        // Solve rest * q = col_j at the single relevant degree slice.
        let t = -self.cols[j];
        let piece = rest.piece_map(t);
        let nv = self.ring.nvars();
        let mut b = Vec::new();
        for (i, &bi) in self.rows.iter().enumerate() {
            let e = &self.entries[i][j];
            let dim = piece_dim(nv, bi + t);
            if e.is_zero() {
                b.extend(vec![Scalar::zero(self.ring.field); dim]);
            } else {
                b.extend(e.coeffs.iter().cloned());
            }
        }
        piece.solve(&b).is_some()
    }

    /// Entry-wise substitution of the variables by linear forms of a new ring.
    pub fn substitute(&self, images: &[Form], new_ring: &Ring) -> GradedMatrix {
        let entries = self
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| e.substitute_linear(images, new_ring.nvars()))
                    .collect()
            })
            .collect();
        GradedMatrix {
            ring: new_ring.clone(),
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            entries,
        }
    }

    /// Reduction modulo the last variable: images of all entries in the ring
    /// with that variable set to zero (used for restriction to a hyperplane).
    pub fn reduce_mod_last_var(&self, new_ring: &Ring) -> GradedMatrix {
        assert_eq!(new_ring.nvars() + 1, self.ring.nvars());
        let mut images: Vec<Form> = (0..new_ring.nvars()).map(|i| new_ring.var(i)).collect();
        images.push(Form::zero(new_ring.field, new_ring.nvars(), 1));
        self.substitute(&images, new_ring)
    }

    pub fn render(&self) -> Vec<Vec<String>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|e| e.render(&self.ring.vars)).collect())
            .collect()
    }
}

fn det_cofactor(m: &GradedMatrix, rows: &[usize], cols: &[usize]) -> Form {
    let nv = m.ring.nvars();
    let field = m.ring.field;
    if rows.is_empty() {
        return Form::one(field, nv);
    }
    if rows.len() == 1 {
        return m.entries[rows[0]][cols[0]].clone();
    }
    let deg: i64 = rows.iter().map(|&i| m.rows[i]).sum::<i64>()
        - cols.iter().map(|&j| m.cols[j]).sum::<i64>();
    let mut acc = Form::zero(field, nv, deg);
    let sub_rows = &rows[1..];
    for (k, &j) in cols.iter().enumerate() {
        let e = &m.entries[rows[0]][j];
        if e.is_zero() {
            continue;
        }
        let sub_cols: Vec<usize> = cols
            .iter()
            .enumerate()
            .filter(|&(kk, _)| kk != k)
            .map(|(_, &c)| c)
            .collect();
        let minor = det_cofactor(m, sub_rows, &sub_cols);
        let term = e.mul(&minor);
        acc = if k % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// Writes the multiplication-by-`form` block `S_src -> S_{src+deg}` into `out`.
fn write_mult_block(out: &mut Mat, row_off: usize, col_off: usize, form: &Form, src_deg: i64) {
    let nv = form.nvars;
    let dst_deg = src_deg + form.degree;
    let src = monomial_basis(nv, src_deg);
    let fb = monomial_basis(nv, form.degree);
    for (j, s) in src.iter().enumerate() {
        for (k, c) in form.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let expo: Vec<u8> = s.iter().zip(&fb[k]).map(|(a, b)| a + b).collect();
            let i = monomial_index(nv, dst_deg, &expo);
            out.a[row_off + i][col_off + j] = out.a[row_off + i][col_off + j].add(c);
        }
    }
}

/// dim H^0(O_{P^n}(d)).
pub fn h0_line_bundle(n: i64, d: i64) -> i64 {
    binomial(d + n, n)
}

/// dim H^n(O_{P^n}(d)) by duality.
pub fn htop_line_bundle(n: i64, d: i64) -> i64 {
    binomial(-d - 1, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_form;

    fn w_matrix(field: FieldSpec) -> GradedMatrix {
        let ring = Ring::p3(field);
        let w = ring.var(3);
        GradedMatrix::new(ring, vec![0], vec![-1], vec![vec![w]]).unwrap()
    }

    #[test]
    fn piece_map_of_w_has_rank_four_on_linear_slice() {
        // Multiplication by w from S_1 to S_2: 10 x 4 of rank 4.
        let m = w_matrix(FieldSpec::Q).piece_map(2);
        assert_eq!((m.nrows, m.ncols), (10, 4));
        assert_eq!(m.rank(), 4);
    }

    #[test]
    fn piece_map_of_zero_matrix_is_zero() {
        let ring = Ring::p3(FieldSpec::Q);
        let m = GradedMatrix::zero_sized(ring, vec![0], vec![-1]).piece_map(2);
        assert_eq!(m.rank(), 0);
    }

    #[test]
    fn direct_sum_piece_map_is_block_diagonal() {
        let a = w_matrix(FieldSpec::Q);
        let s = a.direct_sum(&a);
        let p = s.piece_map(2);
        assert_eq!((p.nrows, p.ncols), (20, 8));
        assert_eq!(p.rank(), 8);
    }

    #[test]
    fn det_of_curve_presentation_is_w_squared() {
        let ring = Ring::p3(FieldSpec::Q);
        let w = ring.var(3);
        let g = parse_form("x^2 + y*z", FieldSpec::Q, &ring.vars, None).unwrap();
        let m = GradedMatrix::new(
            ring.clone(),
            vec![-1, -2],
            vec![-2, -3],
            vec![
                vec![w.clone(), g],
                vec![Form::zero(FieldSpec::Q, 4, 0), w.clone()],
            ],
        )
        .unwrap();
        assert_eq!(m.det_poly(), w.mul(&w));
    }

    #[test]
    fn bareiss_agrees_with_cofactor_on_random_slices() {
        use rand::SeedableRng;
        let field = FieldSpec::Fp(101);
        let ring = Ring::p3(field);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let mut m = GradedMatrix::zero_sized(ring.clone(), vec![0; 4], vec![-1; 4]);
            for i in 0..4 {
                for j in 0..4 {
                    let mut f = Form::zero(field, 4, 1);
                    for c in f.coeffs.iter_mut() {
                        *c = Scalar::random(field, &mut rng);
                    }
                    m.entries[i][j] = f;
                }
            }
            let det = m.det_poly();
            // Schwartz-Zippel style cross-check at a random point.
            let point: Vec<Scalar> = (0..4).map(|_| Scalar::random(field, &mut rng)).collect();
            let lhs = det.eval(&point);
            let eval_rows: Vec<Vec<Scalar>> = m
                .entries
                .iter()
                .map(|r| r.iter().map(|e| e.eval(&point)).collect())
                .collect();
            let rhs = numeric_det(field, eval_rows);
            assert_eq!(lhs, rhs);
        }
    }

    fn numeric_det(field: FieldSpec, mut a: Vec<Vec<Scalar>>) -> Scalar {
        let n = a.len();
        let mut det = Scalar::one(field);
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
                return Scalar::zero(field);
            };
            if p != k {
                a.swap(k, p);
                det = det.neg();
            }
            det = det.mul(&a[k][k]);
            let inv = a[k][k].inv().unwrap();
            for r in k + 1..n {
                let f = a[r][k].mul(&inv);
                for c in k..n {
                    let delta = f.mul(&a[k][c]);
                    a[r][c] = a[r][c].sub(&delta);
                }
            }
        }
        det
    }

    #[test]
    fn minimalize_pivots_unit_to_w_squared() {
        let field = FieldSpec::Q;
        let ring = Ring::p3(field);
        let w = ring.var(3);
        let one = Form::one(field, 4);
        let m = GradedMatrix::new(
            ring,
            vec![-1, 0],
            vec![-2, -1],
            vec![
                vec![w.clone(), one],
                vec![Form::zero(field, 4, 1), w.clone()],
            ],
        )
        .unwrap();
        let r = m.minimalize();
        assert_eq!((r.nrows(), r.ncols()), (1, 1));
        assert!(r.entries[0][0].proportional_to(&w.mul(&w)));
    }

    #[test]
    fn minimalize_leaves_minimal_presentations_alone() {
        let ring = Ring::p3(FieldSpec::Q);
        let w = ring.var(3);
        let g = parse_form("x^2 - z^2", FieldSpec::Q, &ring.vars, None).unwrap();
        let m = GradedMatrix::new(
            ring,
            vec![-1, -2],
            vec![-2, -3],
            vec![
                vec![w.clone(), g],
                vec![Form::zero(FieldSpec::Q, 4, 0), w],
            ],
        )
        .unwrap();
        assert_eq!(m.minimalize(), m);
    }

    #[test]
    fn identity_padding_is_removed() {
        let ring = Ring::p3(FieldSpec::Q);
        let w = ring.var(3);
        let base = GradedMatrix::new(ring.clone(), vec![0], vec![-2], vec![vec![w.mul(&w)]]).unwrap();
        let pad = GradedMatrix::scalar_diag(ring, &[1], &Form::one(FieldSpec::Q, 4));
        let padded = base.direct_sum(&pad);
        assert_eq!(padded.minimalize(), base);
    }

    #[test]
    fn redundant_column_is_dropped() {
        // col0 = -y*col1 + x*col2 in the reduced nonlayered presentation.
        let field = FieldSpec::Q;
        let ring = Ring::p3(field);
        let x = ring.var(0);
        let y = ring.var(1);
        let w = ring.var(3);
        let z40 = |d: i64| Form::zero(field, 4, d);
        let m = GradedMatrix::new(
            ring,
            vec![0, 0, 0],
            vec![-2, -1, -1, -1],
            vec![
                vec![y.mul(&w).neg(), w.clone(), z40(1), z40(1)],
                vec![x.mul(&w), z40(1), w.clone(), z40(1)],
                vec![z40(2), x.neg(), y.neg(), w.clone()],
            ],
        )
        .unwrap();
        let r = m.drop_redundant_columns();
        assert_eq!((r.nrows(), r.ncols()), (3, 3));
        assert_eq!(r.cols, vec![-1, -1, -1]);
    }
}
