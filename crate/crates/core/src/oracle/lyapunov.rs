//! Dense solver for `A V + V A^T + D = 0`.
//!
//! The equation is vectorized column-major into `(I ⊗ A + A ⊗ I) vec(V) =
//! -vec(D)` and solved by LU with partial pivoting, followed by one step of
//! iterative refinement.

use crate::model::Mat8;
use crate::scalar::Scalar;

const N: usize = 8;
const NN: usize = N * N;

/// Row-major LU factors of a square matrix with its row permutation.
struct Lu<T> {
    n: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    fn factor(mut a: Vec<T>, n: usize) -> Option<Self> {
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, a[i * n + k].abs()))
                .fold(
                    (k, T::neg_infinity()),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if pivot == T::zero() || !pivot.is_finite() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let akk = a[k * n + k];
            for i in k + 1..n {
                let factor = a[i * n + k] / akk;
                a[i * n + k] = factor;
                if factor != T::zero() {
                    for j in k + 1..n {
                        let u = a[k * n + j];
                        a[i * n + j] -= factor * u;
                    }
                }
            }
        }
        Some(Self { n, lu: a, perm })
    }

    fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }
}

/// `A V + V A^T + D`.
pub fn lyapunov_residual<T: Scalar>(a: &Mat8<T>, v: &Mat8<T>, d: &Mat8<T>) -> Mat8<T> {
    a * v + v * a.transpose() + d
}

pub fn frobenius<T: Scalar>(m: &Mat8<T>) -> T {
    m.iter().fold(T::zero(), |s, &x| s + x * x).sqrt()
}

fn vec_index(i: usize, j: usize) -> usize {
    i + N * j
}

/// Solves the continuous Lyapunov equation. Returns `None` when the
/// vectorized operator is singular, i.e. when two eigenvalues of `A` sum to
/// zero.
pub fn solve_continuous_lyapunov<T: Scalar>(a: &Mat8<T>, d: &Mat8<T>) -> Option<Mat8<T>> {
    // V is unchanged by a common rescaling of A and D; normalize rates to O(1).
    let scale = a.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
    if scale == T::zero() {
        return None;
    }
    let a_s = a.map(|x| x / scale);
    let d_s = d.map(|x| x / scale);

    let mut op = vec![T::zero(); NN * NN];
    for j in 0..N {
        for i in 0..N {
            let row = vec_index(i, j);
            // (I ⊗ A): sum_k A_ik V_kj
            for k in 0..N {
                op[row * NN + vec_index(k, j)] += a_s[(i, k)];
            }
            // (A ⊗ I): sum_l V_il A_jl
            for l in 0..N {
                op[row * NN + vec_index(i, l)] += a_s[(j, l)];
            }
        }
    }
    let lu = Lu::factor(op, NN)?;

    let rhs: Vec<T> = (0..NN).map(|k| -d_s[(k % N, k / N)]).collect();
    let mut v = to_mat(&lu.solve(&rhs));

    let r = lyapunov_residual(&a_s, &v, &d_s);
    let correction: Vec<T> = (0..NN).map(|k| -r[(k % N, k / N)]).collect();
    v += to_mat(&lu.solve(&correction));

    Some((v + v.transpose()) * T::half())
}

fn to_mat<T: Scalar>(x: &[T]) -> Mat8<T> {
    Mat8::from_fn(|i, j| x[vec_index(i, j)])
}
