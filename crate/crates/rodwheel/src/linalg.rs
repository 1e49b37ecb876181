//! Small fixed-size matrix kernels: generic 3×3 helpers for the kinematics
//! and a dense LU solver with partial pivoting for the 8×8 multiplier system.

use thiserror::Error;

use crate::ad::Real;

pub type Mat3<T> = [[T; 3]; 3];
pub type Vec3<T> = [T; 3];

#[inline]
pub fn mat3_mul<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

/// aᵀ·b without materializing the transpose.
#[inline]
pub fn mat3_tmul<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[0][i] * b[0][j] + a[1][i] * b[1][j] + a[2][i] * b[2][j];
        }
    }
    out
}

#[inline]
pub fn mat3_vec<T: Real>(a: &Mat3<T>, v: &Vec3<T>) -> Vec3<T> {
    [
        a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2],
        a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
        a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2],
    ]
}

#[inline]
pub fn dot3<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Relative pivot threshold: a pivot below `PIVOT_RTOL · max|A|` is singular.
pub const PIVOT_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum LinalgError {
    #[error("singular matrix: pivot {pivot:.3e} below {threshold:.3e} at column {column}")]
    SingularPivot {
        column: usize,
        pivot: f64,
        threshold: f64,
    },
}

/// Solve `A x = b` by LU factorization with partial (row) pivoting.
///
/// No structure exploitation; intended for tiny systems where robustness is
/// all that matters.
#[allow(clippy::needless_range_loop)]
pub fn lu_solve<const N: usize>(
    mut a: [[f64; N]; N],
    mut b: [f64; N],
) -> Result<[f64; N], LinalgError> {
    let mut scale = 0.0f64;
    for row in &a {
        for &x in row {
            scale = scale.max(x.abs());
        }
    }
    let threshold = PIVOT_RTOL * scale;

    for col in 0..N {
        let mut pivot_row = col;
        let mut pivot_mag = a[col][col].abs();
        for r in col + 1..N {
            let mag = a[r][col].abs();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag <= threshold || pivot_mag == 0.0 {
            return Err(LinalgError::SingularPivot {
                column: col,
                pivot: pivot_mag,
                threshold,
            });
        }
        if pivot_row != col {
            a.swap(col, pivot_row);
            b.swap(col, pivot_row);
        }
        let pivot = a[col][col];
        for r in col + 1..N {
            let m = a[r][col] / pivot;
            if m == 0.0 {
                continue;
            }
            a[r][col] = 0.0;
            for j in col + 1..N {
                a[r][j] -= m * a[col][j];
            }
            b[r] -= m * b[col];
        }
    }

    let mut x = [0.0; N];
    for i in (0..N).rev() {
        let mut acc = b[i];
        for j in i + 1..N {
            acc -= a[i][j] * x[j];
        }
        x[i] = acc / a[i][i];
    }
    Ok(x)
}

#[inline]
pub fn matvec<const N: usize>(a: &[[f64; N]; N], x: &[f64; N]) -> [f64; N] {
    let mut out = [0.0; N];
    for i in 0..N {
        let mut acc = 0.0;
        for j in 0..N {
            acc += a[i][j] * x[j];
        }
        out[i] = acc;
    }
    out
}

#[inline]
pub fn norm_inf<const N: usize>(v: &[f64; N]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}
