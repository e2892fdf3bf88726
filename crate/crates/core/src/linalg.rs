//! Tiny dense linear algebra on fixed-size arrays.

use crate::scalar::Real;

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` for (numerically) singular systems.
pub fn solve<F: Real, const M: usize>(mut a: [[F; M]; M], mut b: [F; M]) -> Option<[F; M]> {
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(F::zero(), |m, x| m.max(x.abs()));
    if !(scale > F::zero()) || !scale.is_finite() {
        return None;
    }
    for col in 0..M {
        let pivot = (col..M)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() <= F::epsilon() * scale * F::lit(16.0) {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..M {
            let f = a[row][col] / a[col][col];
            for k in col..M {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = [F::zero(); M];
    for row in (0..M).rev() {
        let mut s = b[row];
        for k in row + 1..M {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

pub type Mat2<F> = [[F; 2]; 2];

pub fn mat2_mul<F: Real>(a: &Mat2<F>, b: &Mat2<F>) -> Mat2<F> {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

pub fn det2<F: Real>(a: &Mat2<F>) -> F {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn identity<F: Real, const M: usize>() -> [[F; M]; M] {
    let mut m = [[F::zero(); M]; M];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = F::one();
    }
    m
}

/// Least-squares solve of the normal equations `(AᵀA) x = Aᵀb` via Cholesky.
///
/// `gram` is the symmetric positive definite matrix `AᵀA` in row-major order
/// with dimension `n`; it is overwritten by its factor.
pub fn cholesky_solve<F: Real>(gram: &mut [F], rhs: &[F], n: usize) -> Option<Vec<F>> {
    for j in 0..n {
        let mut d = gram[j * n + j];
        for k in 0..j {
            d -= gram[j * n + k] * gram[j * n + k];
        }
        if !(d > F::zero()) {
            return None;
        }
        let d = d.sqrt();
        gram[j * n + j] = d;
        for i in j + 1..n {
            let mut s = gram[i * n + j];
            for k in 0..j {
                s -= gram[i * n + k] * gram[j * n + k];
            }
            gram[i * n + j] = s / d;
        }
    }
    let mut y = rhs.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] = y[i] - gram[i * n + k] * y[k];
        }
        y[i] = y[i] / gram[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] = y[i] - gram[k * n + i] * y[k];
        }
        y[i] = y[i] / gram[i * n + i];
    }
    Some(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_pivoted_system() {
        let a: [[f64; 3]; 3] = [[0.0, 2.0, 1.0], [1.0, 1.0, 0.0], [3.0, 0.0, 1.0]];
        let x = [1.0, -2.0, 0.5];
        let b = [
            a[0][0] * x[0] + a[0][1] * x[1] + a[0][2] * x[2],
            a[1][0] * x[0] + a[1][1] * x[1] + a[1][2] * x[2],
            a[2][0] * x[0] + a[2][1] * x[1] + a[2][2] * x[2],
        ];
        let got = solve(a, b).unwrap();
        for i in 0..3 {
            assert!((got[i] - x[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_detected() {
        assert!(solve([[1.0, 2.0], [2.0, 4.0]], [1.0, 1.0]).is_none());
        assert!(solve([[0.0_f64]], [1.0]).is_none());
    }

    #[test]
    fn cholesky_matches_direct() {
        let mut g = vec![4.0_f64, 2.0, 2.0, 3.0];
        let x = cholesky_solve(&mut g, &[2.0, 1.0], 2).unwrap();
        assert!((4.0 * x[0] + 2.0 * x[1] - 2.0).abs() < 1e-14);
        assert!((2.0 * x[0] + 3.0 * x[1] - 1.0).abs() < 1e-14);
    }
}
