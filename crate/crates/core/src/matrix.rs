//! Dense matrices over Gaussian rationals.
//!
//! Every operation is exact. Instance dimensions are desk-scale (tens, not
//! thousands), so storage is dense row-major with no sparse formats; the
//! multiply kernel only skips zero entries, which is what makes
//! permutation-like Kraus operators cheap.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{GaussianRational, Rational};

#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<GaussianRational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<GaussianRational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![GaussianRational::zero(); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for k in 0..dim {
            m.set(k, k, GaussianRational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Integer-valued test/helper constructor.
    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&n| GaussianRational::from_int(n)).collect())
                .collect(),
        )
        .expect("literal rows are rectangular")
    }

    pub fn diag(values: &[GaussianRational]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (k, v) in values.iter().enumerate() {
            m.set(k, k, v.clone());
        }
        m
    }

    /// The projector |e_k><e_k| in dimension `dim` (0-based index).
    pub fn basis_projector(dim: usize, k: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        m.set(k, k, GaussianRational::one());
        m
    }

    /// |u><v| for column vectors given as slices.
    pub fn outer(u: &[GaussianRational], v: &[GaussianRational]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (r, ur) in u.iter().enumerate() {
            if ur.is_zero() {
                continue;
            }
            for (c, vc) in v.iter().enumerate() {
                m.set(r, c, ur * &vc.conj());
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &GaussianRational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: GaussianRational) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[GaussianRational] {
        &self.entries
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.entries.iter().all(GaussianRational::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    if r == c {
                        self.get(r, c).is_one()
                    } else {
                        self.get(r, c).is_zero()
                    }
                })
            })
    }

    /// Exact matrix product.
    pub fn mat_mul(&self, rhs: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = RatMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let bkj = rhs.get(k, j);
                    if bkj.is_zero() {
                        continue;
                    }
                    let idx = i * rhs.cols + j;
                    let prod = aik * bkj;
                    out.entries[idx] += &prod;
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> RatMatrix {
        let mut out = RatMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    /// Kronecker product, left-factor index major: entry
    /// `(i*b.rows + k, j*b.cols + l)` equals `a[i,j] * b[k,l]`.
    pub fn kron(&self, rhs: &RatMatrix) -> RatMatrix {
        let mut out = RatMatrix::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let aij = self.get(i, j);
                if aij.is_zero() {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        let bkl = rhs.get(k, l);
                        if bkl.is_zero() {
                            continue;
                        }
                        out.set(i * rhs.rows + k, j * rhs.cols + l, aij * bkl);
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Result<GaussianRational> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut t = GaussianRational::zero();
        for k in 0..self.rows {
            t += self.get(k, k);
        }
        Ok(t)
    }

    /// Squared Hilbert-Schmidt norm: sum of |entry|^2.
    pub fn hs_norm_sq(&self) -> Rational {
        let mut s = Rational::zero();
        for e in &self.entries {
            if !e.is_zero() {
                s += e.norm_sq();
            }
        }
        s
    }

    pub fn scale(&self, s: &GaussianRational) -> RatMatrix {
        self.map(|e| e * s)
    }

    pub fn scale_rat(&self, s: &Rational) -> RatMatrix {
        self.map(|e| e.mul_rat(s))
    }

    pub fn map(&self, f: impl Fn(&GaussianRational) -> GaussianRational) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Result<RatMatrix> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut acc = RatMatrix::identity(self.rows);
        for _ in 0..n {
            acc = acc.mat_mul(self)?;
        }
        Ok(acc)
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && *self == self.dagger()
    }

    pub fn is_unitary(&self) -> bool {
        self.is_square()
            && self
                .dagger()
                .mat_mul(self)
                .map(|p| p.is_identity())
                .unwrap_or(false)
    }

    /// Tr(A·B) without forming the full product.
    pub fn trace_product(&self, rhs: &RatMatrix) -> Result<GaussianRational> {
        if self.cols != rhs.rows || self.rows != rhs.cols {
            return Err(Error::DimensionMismatch(
                "trace of product needs compatible shapes".into(),
            ));
        }
        let mut t = GaussianRational::zero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik.is_zero() {
                    continue;
                }
                let bki = rhs.get(k, i);
                if bki.is_zero() {
                    continue;
                }
                let prod = aik * bki;
                t += &prod;
            }
        }
        Ok(t)
    }

    /// Elementary symmetric functions e_1..e_n of the eigenvalues, computed
    /// exactly by the Faddeev-LeVerrier recurrence. Requires Hermitian input
    /// so the values are guaranteed real.
    pub fn eigen_symmetric_functions(&self) -> Result<Vec<Rational>> {
        if !self.is_hermitian() {
            return Err(Error::NotHermitian);
        }
        let n = self.rows;
        let mut es = Vec::with_capacity(n);
        let mut m = self.clone();
        let mut c: GaussianRational;
        for k in 1..=n {
            if k > 1 {
                m = self.mat_mul(&m)?;
            }
            // c_k = -tr(M_k)/k; M_{k+1} = A (M_k + c_k I)
            let t = m.trace()?;
            c = (-&t).mul_rat(&Rational::new(BigInt::one(), BigInt::from(k)));
            debug_assert!(c.is_real(), "char-poly coefficient of Hermitian matrix");
            // e_k = (-1)^k c_k
            let e = if k % 2 == 0 {
                c.re.clone()
            } else {
                -c.re.clone()
            };
            es.push(e);
            if k < n {
                for d in 0..n {
                    let v = m.get(d, d) + &c;
                    m.set(d, d, v);
                }
            }
        }
        Ok(es)
    }

    /// Exact positive-semidefiniteness test for Hermitian matrices: with
    /// characteristic polynomial l^n - e1 l^(n-1) + e2 l^(n-2) - ..., the
    /// matrix is PSD iff every e_k >= 0.
    pub fn psd_check(&self) -> Result<bool> {
        Ok(self
            .eigen_symmetric_functions()?
            .iter()
            .all(|e| !e.is_negative()))
    }
}

impl Add for &RatMatrix {
    type Output = RatMatrix;
    fn add(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape");
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &RatMatrix {
    type Output = RatMatrix;
    fn sub(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape");
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &RatMatrix {
    type Output = RatMatrix;
    fn neg(self) -> RatMatrix {
        self.map(|e| -e)
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        self.mat_mul(rhs).expect("shape-compatible product")
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}
