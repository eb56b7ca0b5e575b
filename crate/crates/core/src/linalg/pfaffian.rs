use std::ops::{Div, Mul, MulAssign, Neg, Sub};

use nalgebra::{DMatrix, Scalar};
use num_complex::Complex64;

use crate::error::{FgsError, Result};

/// Scalars accepted by [`pfaffian`].
pub trait PfaffianScalar:
    Scalar
    + Copy
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + MulAssign
    + std::ops::AddAssign
    + std::ops::Add<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn modulus(self) -> f64;
}

impl PfaffianScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl PfaffianScalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// Pfaffian of an antisymmetric matrix by skew Gaussian elimination
/// (Parlett-Reid) with partial pivoting.
///
/// Odd dimensions give zero and the empty matrix gives one.
pub fn pfaffian<T: PfaffianScalar>(a: &DMatrix<T>) -> Result<T> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(FgsError::InvalidInput(format!(
            "Pfaffian needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    let mut scale = 1.0f64;
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let aij = a[(i, j)].modulus();
            let s = (a[(i, j)] + a[(j, i)]).modulus();
            if !aij.is_finite() {
                return Err(FgsError::InvalidInput("Pfaffian input has non-finite entries".into()));
            }
            scale = scale.max(aij);
            asym = asym.max(s);
        }
    }
    if asym > 1e-10 * scale {
        return Err(FgsError::InvalidInput(format!(
            "Pfaffian input is not antisymmetric (residual {asym:e})"
        )));
    }
    if n == 0 {
        return Ok(T::one());
    }
    if n % 2 == 1 {
        return Ok(T::zero());
    }

    let mut m = a.clone();
    let mut pf = T::one();
    let mut k = 0;
    while k + 1 < n {
        let mut kp = k + 1;
        let mut best = m[(k + 1, k)].modulus();
        for i in (k + 2)..n {
            let v = m[(i, k)].modulus();
            if v > best {
                best = v;
                kp = i;
            }
        }
        if kp != k + 1 {
            m.swap_rows(k + 1, kp);
            m.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let piv = m[(k, k + 1)];
        if piv == T::zero() {
            return Ok(T::zero());
        }
        pf *= piv;
        if k + 2 < n {
            let tau: Vec<T> = ((k + 2)..n).map(|j| m[(k, j)] / piv).collect();
            let col: Vec<T> = ((k + 2)..n).map(|i| m[(i, k + 1)]).collect();
            let len = n - k - 2;
            for jj in 0..len {
                for ii in 0..len {
                    let upd = tau[ii] * col[jj] - col[ii] * tau[jj];
                    m[(k + 2 + ii, k + 2 + jj)] += upd;
                }
            }
        }
        k += 2;
    }
    Ok(pf)
}
