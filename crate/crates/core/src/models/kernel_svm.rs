use serde::{Deserialize, Serialize};

use super::linalg::squared_distance;
use super::spec::KernelSvmParams;
use super::{Matrix, Standardizer};
use crate::scalar::{sigmoid, Scalar};

const TAU: f64 = 1e-12;

/// RBF-kernel SVM trained by SMO with second-order working-set selection.
///
/// `gamma = 1 / (d * Var(X))` over the standardized learn matrix. Kernel rows
/// are computed on demand, so memory stays linear in the sample count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSvm<T> {
    scaler: Standardizer<T>,
    support: Matrix<T>,
    /// `alpha_i * y_i` for each support vector
    coef: Vec<T>,
    rho: T,
    gamma: T,
    iterations: usize,
}

struct Problem<'a, T> {
    z: &'a Matrix<T>,
    gamma: T,
}

impl<T: Scalar> Problem<'_, T> {
    fn kernel_row(&self, i: usize, out: &mut [T]) {
        let xi = self.z.row(i);
        for (t, o) in out.iter_mut().enumerate() {
            *o = (-self.gamma * squared_distance(xi, self.z.row(t))).exp();
        }
    }
}

impl<T: Scalar> KernelSvm<T> {
    pub(crate) fn fit(x: &Matrix<T>, y: &[u8], params: &KernelSvmParams) -> Self {
        let scaler = Standardizer::fit(x);
        let z = scaler.transform_matrix(x);
        let n = y.len();
        let d = z.n_cols();

        let values = z.as_slice();
        let count = T::from_count(values.len());
        let mean = values.iter().copied().sum::<T>() / count;
        let var = values.iter().map(|v| (*v - mean) * (*v - mean)).sum::<T>() / count;
        let gamma = if var > T::zero() {
            T::one() / (T::from_count(d) * var)
        } else {
            T::one()
        };

        let c = T::lit(params.c);
        let eps = T::lit(params.tol);
        let tau = T::lit(TAU);
        let sign: Vec<T> = y.iter().map(|&v| if v == 1 { T::one() } else { -T::one() }).collect();
        let problem = Problem { z: &z, gamma };

        let mut alpha = vec![T::zero(); n];
        // gradient of 0.5 a'Qa - e'a
        let mut grad = vec![-T::one(); n];
        let mut k_i = vec![T::zero(); n];
        let mut k_j = vec![T::zero(); n];
        let mut iterations = 0;

        let up = |a: T, s: T| if s > T::zero() { a < c } else { a > T::zero() };
        let low = |a: T, s: T| if s > T::zero() { a > T::zero() } else { a < c };

        while iterations < params.max_iter {
            // i: maximal violator in the up set
            let mut g_max = T::neg_infinity();
            let mut i_sel = None;
            for t in 0..n {
                if up(alpha[t], sign[t]) {
                    let v = -sign[t] * grad[t];
                    if v >= g_max {
                        g_max = v;
                        i_sel = Some(t);
                    }
                }
            }
            let Some(i) = i_sel else { break };
            problem.kernel_row(i, &mut k_i);

            // j: second-order choice in the low set
            let mut g_max2 = T::neg_infinity();
            let mut best_obj = T::infinity();
            let mut j_sel = None;
            for t in 0..n {
                if low(alpha[t], sign[t]) {
                    let v = -sign[t] * grad[t];
                    g_max2 = g_max2.max(-v);
                    let diff = g_max - v;
                    if diff > T::zero() {
                        let mut quad = T::lit(2.0) - T::lit(2.0) * k_i[t];
                        if quad <= T::zero() {
                            quad = tau;
                        }
                        let obj = -(diff * diff) / quad;
                        if obj <= best_obj {
                            best_obj = obj;
                            j_sel = Some(t);
                        }
                    }
                }
            }
            let Some(j) = j_sel else { break };
            if g_max + g_max2 < eps {
                break;
            }
            iterations += 1;
            problem.kernel_row(j, &mut k_j);

            let (yi, yj) = (sign[i], sign[j]);
            let q_ij = yi * yj * k_i[j];
            let (old_i, old_j) = (alpha[i], alpha[j]);
            if yi != yj {
                let mut quad = T::lit(2.0) + T::lit(2.0) * q_ij;
                if quad <= T::zero() {
                    quad = tau;
                }
                let delta = (-grad[i] - grad[j]) / quad;
                let diff = alpha[i] - alpha[j];
                alpha[i] += delta;
                alpha[j] += delta;
                if diff > T::zero() {
                    if alpha[j] < T::zero() {
                        alpha[j] = T::zero();
                        alpha[i] = diff;
                    }
                } else if alpha[i] < T::zero() {
                    alpha[i] = T::zero();
                    alpha[j] = -diff;
                }
                if diff > T::zero() {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = c - diff;
                    }
                } else if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = c + diff;
                }
            } else {
                let mut quad = T::lit(2.0) - T::lit(2.0) * q_ij;
                if quad <= T::zero() {
                    quad = tau;
                }
                let delta = (grad[i] - grad[j]) / quad;
                let sum = alpha[i] + alpha[j];
                alpha[i] -= delta;
                alpha[j] += delta;
                if sum > c {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = sum - c;
                    }
                } else if alpha[j] < T::zero() {
                    alpha[j] = T::zero();
                    alpha[i] = sum;
                }
                if sum > c {
                    if alpha[j] > c {
                        alpha[j] = c;
                        alpha[i] = sum - c;
                    }
                } else if alpha[i] < T::zero() {
                    alpha[i] = T::zero();
                    alpha[j] = sum;
                }
            }
            let d_i = alpha[i] - old_i;
            let d_j = alpha[j] - old_j;
            for t in 0..n {
                grad[t] += sign[t] * (yi * k_i[t] * d_i + yj * k_j[t] * d_j);
            }
        }

        let rho = {
            let mut ub = T::infinity();
            let mut lb = T::neg_infinity();
            let mut free_sum = T::zero();
            let mut free = 0usize;
            for t in 0..n {
                let yg = sign[t] * grad[t];
                if alpha[t] >= c {
                    if sign[t] < T::zero() {
                        ub = ub.min(yg);
                    } else {
                        lb = lb.max(yg);
                    }
                } else if alpha[t] <= T::zero() {
                    if sign[t] > T::zero() {
                        ub = ub.min(yg);
                    } else {
                        lb = lb.max(yg);
                    }
                } else {
                    free += 1;
                    free_sum += yg;
                }
            }
            if free > 0 {
                free_sum / T::from_count(free)
            } else {
                (ub + lb) / T::lit(2.0)
            }
        };

        let keep: Vec<usize> = (0..n).filter(|&t| alpha[t] > T::zero()).collect();
        KernelSvm {
            scaler,
            support: z.select_rows(&keep),
            coef: keep.iter().map(|&t| alpha[t] * sign[t]).collect(),
            rho,
            gamma,
            iterations,
        }
    }

    pub fn decision(&self, x: &[T]) -> T {
        let q = self.scaler.transform(x);
        self.support
            .rows()
            .zip(&self.coef)
            .fold(-self.rho, |acc, (sv, a)| {
                acc + *a * (-self.gamma * squared_distance(sv, &q)).exp()
            })
    }

    pub fn score(&self, x: &[T]) -> T {
        sigmoid(self.decision(x))
    }

    pub fn support_count(&self) -> usize {
        self.coef.len()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }
}
