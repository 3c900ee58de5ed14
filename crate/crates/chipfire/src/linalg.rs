//! Exact dense linear algebra over the integers and rationals.
//!
//! Everything in this module is exact: determinants use fraction-free
//! (Bareiss) elimination, inverses are computed over `BigRational`, and
//! Smith normal forms come with the unimodular transforms that produced
//! them. Matrices are immutable values; operations return new matrices.
//!
//! ```
//! use chipfire::linalg::IntMatrix;
//! let a = IntMatrix::from_i64(2, 2, &[2, 1, 1, 2]);
//! assert_eq!(a.det().unwrap(), 3.into());
//! let snf = a.smith_normal_form();
//! assert_eq!(snf.d, vec![1.into(), 3.into()]);
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

/// Dense rational matrix, row-major. Entries are always in lowest terms
/// (`BigRational` normalizes on construction).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

/// Smith normal form `u * a * v = diag(d)` with `u`, `v` unimodular,
/// `d[i] >= 0` and `d[i] | d[i+1]`.
#[derive(Debug, Clone)]
pub struct SNFDecomposition {
    pub d: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must match dimensions");
        IntMatrix { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        Self::new(rows, cols, entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rational(&self) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| BigRational::from(x.clone())).collect(),
        }
    }

    /// Exact determinant via Bareiss fraction-free elimination.
    pub fn det(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "determinant of {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.data.clone();
        let idx = |i: usize, j: usize| i * n + j;
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[idx(k, k)].is_zero() {
                // pivot search down the column
                match (k + 1..n).find(|&i| !a[idx(i, k)].is_zero()) {
                    Some(i) => {
                        for j in 0..n {
                            a.swap(idx(k, j), idx(i, j));
                        }
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[idx(i, j)] * &a[idx(k, k)] - &a[idx(i, k)] * &a[idx(k, j)];
                    // Bareiss: division is exact
                    a[idx(i, j)] = num / &prev;
                }
                a[idx(i, k)] = BigInt::zero();
            }
            prev = a[idx(k, k)].clone();
        }
        Ok(sign * a[idx(n - 1, n - 1)].clone())
    }

    /// Exact inverse as a rational matrix (Gauss-Jordan).
    pub fn invert(&self) -> Result<RatMatrix> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "inverse of {}x{} matrix",
                self.rows, self.cols
            )));
        }
        self.to_rational().invert()
    }

    pub fn mat_vec(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "mat_vec: {} columns vs vector of length {}",
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "mul: {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = &self[(i, k)];
                if aik.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = aik * &other[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        Ok(out)
    }

    /// Smith normal form with accumulated transforms. Always defined for
    /// integer matrices; invariant factors are sign-normalized to be
    /// nonnegative and satisfy the divisibility chain.
    pub fn smith_normal_form(&self) -> SNFDecomposition {
        let mut a = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut v = IntMatrix::identity(self.cols);
        let n = self.rows.min(self.cols);

        for t in 0..n {
            loop {
                // pivot: minimal nonzero absolute value in the trailing block
                let mut pivot: Option<(usize, usize)> = None;
                for i in t..a.rows {
                    for j in t..a.cols {
                        if !a[(i, j)].is_zero()
                            && pivot
                                .map(|(pi, pj)| a[(i, j)].abs() < a[(pi, pj)].abs())
                                .unwrap_or(true)
                        {
                            pivot = Some((i, j));
                        }
                    }
                }
                let Some((pi, pj)) = pivot else { break };
                if pi != t {
                    a.swap_rows(t, pi);
                    u.swap_rows(t, pi);
                }
                if pj != t {
                    a.swap_cols(t, pj);
                    v.swap_cols(t, pj);
                }

                let mut dirty = false;
                for i in t + 1..a.rows {
                    if !a[(i, t)].is_zero() {
                        let q = div_round(&a[(i, t)], &a[(t, t)]);
                        a.row_axpy(i, t, &-&q);
                        u.row_axpy(i, t, &-&q);
                        if !a[(i, t)].is_zero() {
                            dirty = true;
                        }
                    }
                }
                for j in t + 1..a.cols {
                    if !a[(t, j)].is_zero() {
                        let q = div_round(&a[(t, j)], &a[(t, t)]);
                        a.col_axpy(j, t, &-&q);
                        v.col_axpy(j, t, &-&q);
                        if !a[(t, j)].is_zero() {
                            dirty = true;
                        }
                    }
                }
                if dirty {
                    continue;
                }
                // row and column t are clear; enforce divisibility of the rest
                let mut fixed = true;
                'outer: for i in t + 1..a.rows {
                    for j in t + 1..a.cols {
                        if !(&a[(i, j)] % &a[(t, t)]).is_zero() {
                            a.row_axpy(t, i, &BigInt::one());
                            u.row_axpy(t, i, &BigInt::one());
                            fixed = false;
                            break 'outer;
                        }
                    }
                }
                if fixed {
                    break;
                }
            }
            if a[(t, t)].is_negative() {
                a.scale_row(t, &-BigInt::one());
                u.scale_row(t, &-BigInt::one());
            }
        }

        let d = (0..n).map(|i| a[(i, i)].clone()).collect();
        SNFDecomposition { d, u, v }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// row[i] += q * row[j]
    fn row_axpy(&mut self, i: usize, j: usize, q: &BigInt) {
        for c in 0..self.cols {
            let t = q * &self[(j, c)];
            self[(i, c)] += t;
        }
    }

    /// col[i] += q * col[j]
    fn col_axpy(&mut self, i: usize, j: usize, q: &BigInt) {
        for r in 0..self.rows {
            let t = q * &self[(r, j)];
            self[(r, i)] += t;
        }
    }

    fn scale_row(&mut self, i: usize, s: &BigInt) {
        for c in 0..self.cols {
            let t = s * &self[(i, c)];
            self[(i, c)] = t;
        }
    }
}

/// Quotient that minimizes the remainder's absolute value.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let q = a / b;
    let r = a - &q * b;
    if &r.abs() * 2 > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigRational>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must match dimensions");
        RatMatrix { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        IntMatrix::identity(n).to_rational()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Exact Gauss-Jordan inverse.
    pub fn invert(&self) -> Result<RatMatrix> {
        if self.rows != self.cols {
            return Err(Error::Dimension(format!(
                "inverse of {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RatMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&i| !a[(i, col)].is_zero())
                .ok_or(Error::Singular)?;
            if pivot != col {
                a.swap_rows(col, pivot);
                inv.swap_rows(col, pivot);
            }
            let p = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] /= &p;
                inv[(col, j)] /= &p;
            }
            for i in 0..n {
                if i == col || a[(i, col)].is_zero() {
                    continue;
                }
                let f = a[(i, col)].clone();
                for j in 0..n {
                    let t = &f * &a[(col, j)];
                    a[(i, j)] -= t;
                    let t = &f * &inv[(col, j)];
                    inv[(i, j)] -= t;
                }
            }
        }
        Ok(inv)
    }

    pub fn mat_vec(&self, x: &[BigRational]) -> Result<Vec<BigRational>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "mat_vec: {} columns vs vector of length {}",
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn mat_vec_int(&self, x: &[BigInt]) -> Result<Vec<BigRational>> {
        let xr: Vec<BigRational> = x.iter().map(|v| BigRational::from(v.clone())).collect();
        self.mat_vec(&xr)
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "mul: {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = vec![BigRational::zero(); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = &self[(i, k)];
                if aik.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = aik * &other[(k, j)];
                    data[i * other.cols + j] += t;
                }
            }
        }
        Ok(RatMatrix::new(self.rows, other.cols, data))
    }

    /// Converts to an integer matrix if every entry is integral.
    pub fn to_integer(&self) -> Result<IntMatrix> {
        let mut data = Vec::with_capacity(self.data.len());
        for e in &self.data {
            if !e.is_integer() {
                return Err(Error::NonIntegral(format!("entry {e}")));
            }
            data.push(e.to_integer());
        }
        Ok(IntMatrix::new(self.rows, self.cols, data))
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

/// Parses "p/q" or "p" into a rational; used by tests and the CLI.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.parse().ok()?;
            let q: BigInt = q.parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().ok()?;
            Some(BigRational::from(p))
        }
    }
}

/// Renders a rational as "p/q" (or "p" when integral).
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl SNFDecomposition {
    /// Checks `u * a * v == diag(d)` against the source matrix.
    pub fn verify(&self, a: &IntMatrix) -> bool {
        let Ok(uav) = self.u.mul(a).and_then(|m| m.mul(&self.v)) else {
            return false;
        };
        for i in 0..uav.rows() {
            for j in 0..uav.cols() {
                let expect = if i == j { self.d[i].clone() } else { BigInt::zero() };
                if uav[(i, j)] != expect {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, e: &[i64]) -> IntMatrix {
        IntMatrix::from_i64(rows, cols, e)
    }

    #[test]
    fn det_small_cases() {
        assert_eq!(m(2, 2, &[2, 1, 1, 2]).det().unwrap(), 3.into());
        // reduced signed Laplacian of the worked 4-cycle-with-chord example
        assert_eq!(m(3, 3, &[2, 1, 0, 1, 3, -1, 0, -1, 2]).det().unwrap(), 8.into());
        assert_eq!(IntMatrix::identity(5).det().unwrap(), 1.into());
        assert_eq!(m(2, 2, &[1, 2, 2, 4]).det().unwrap(), 0.into());
    }

    #[test]
    fn det_rejects_nonsquare() {
        assert!(m(2, 3, &[1, 2, 3, 4, 5, 6]).det().is_err());
    }

    #[test]
    fn invert_times_source_is_identity() {
        let a = m(2, 2, &[2, 1, 1, 2]);
        let inv = a.invert().unwrap();
        let prod = a.to_rational().mul(&inv).unwrap();
        assert_eq!(prod, RatMatrix::identity(2));
        let expected: Vec<BigRational> = ["2/3", "-1/3", "-1/3", "2/3"]
            .iter()
            .map(|s| parse_rational(s).unwrap())
            .collect();
        assert_eq!(inv, RatMatrix::new(2, 2, expected));
    }

    #[test]
    fn invert_identity() {
        let i = IntMatrix::identity(4);
        assert_eq!(i.invert().unwrap(), RatMatrix::identity(4));
    }

    #[test]
    fn invert_singular_errors() {
        assert!(matches!(m(2, 2, &[1, 2, 2, 4]).invert(), Err(Error::Singular)));
    }

    #[test]
    fn l_times_m_inverse_matches_worked_example() {
        let l = m(3, 3, &[2, 1, 0, 1, 3, -1, 0, -1, 2]);
        let mm = m(3, 3, &[2, -1, 0, -1, 3, -1, 0, -1, 2]);
        let lm_inv = l.to_rational().mul(&mm.invert().unwrap()).unwrap();
        let expected: Vec<BigRational> = ["3/2", "1", "1/2", "5/4", "3/2", "1/4", "0", "0", "1"]
            .iter()
            .map(|s| parse_rational(s).unwrap())
            .collect();
        assert_eq!(lm_inv, RatMatrix::new(3, 3, expected));
    }

    #[test]
    fn snf_hand_checked() {
        let a = m(2, 2, &[2, 1, 1, 2]);
        let snf = a.smith_normal_form();
        assert_eq!(snf.d, vec![BigInt::from(1), BigInt::from(3)]);
        assert!(snf.verify(&a));

        let id = IntMatrix::identity(4);
        let snf = id.smith_normal_form();
        assert_eq!(snf.d, vec![BigInt::one(); 4]);

        // worked 3-vertex example with K = Z_12
        let h = m(3, 3, &[3, 1, -1, 1, 2, -1, -1, -1, 3]);
        let snf = h.smith_normal_form();
        assert_eq!(snf.d, vec![1.into(), 1.into(), 12.into()]);
        assert!(snf.verify(&h));
    }

    #[test]
    fn mat_vec_examples() {
        let id = IntMatrix::identity(3);
        let x = vec![BigInt::from(4), BigInt::from(-1), BigInt::from(7)];
        assert_eq!(id.mat_vec(&x).unwrap(), x);
        assert!(id.mat_vec(&x[..2].to_vec()).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_matrix(n: usize) -> impl Strategy<Value = IntMatrix> {
            proptest::collection::vec(-5i64..=5, n * n)
                .prop_map(move |v| IntMatrix::from_i64(n, n, &v))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn inverse_roundtrip(a in (2usize..=6).prop_flat_map(small_matrix)) {
                prop_assume!(!a.det().unwrap().is_zero());
                let inv = a.invert().unwrap();
                let prod = a.to_rational().mul(&inv).unwrap();
                prop_assert_eq!(prod, RatMatrix::identity(a.rows()));
            }

            #[test]
            fn snf_invariants(a in (1usize..=5).prop_flat_map(small_matrix)) {
                let snf = a.smith_normal_form();
                prop_assert!(snf.verify(&a));
                prop_assert_eq!(snf.u.det().unwrap().abs(), BigInt::one());
                prop_assert_eq!(snf.v.det().unwrap().abs(), BigInt::one());
                for w in snf.d.windows(2) {
                    prop_assert!(!w[0].is_negative());
                    if w[0].is_zero() {
                        prop_assert!(w[1].is_zero());
                    } else {
                        prop_assert!((&w[1] % &w[0]).is_zero());
                    }
                }
                let prod: BigInt = snf.d.iter().product();
                prop_assert_eq!(prod.abs(), a.det().unwrap().abs());
            }

            #[test]
            fn det_multiplicative(
                a in (2usize..=4).prop_flat_map(small_matrix),
                b in proptest::collection::vec(-5i64..=5, 16),
            ) {
                let n = a.rows();
                let b = IntMatrix::from_i64(n, n, &b[..n * n]);
                let ab = a.mul(&b).unwrap();
                prop_assert_eq!(ab.det().unwrap(), a.det().unwrap() * b.det().unwrap());
            }
        }
    }
}
