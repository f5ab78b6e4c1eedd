use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::spec::MlpParams;
use super::{Matrix, Standardizer};
use crate::scalar::{sigmoid, softplus, Scalar};

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

/// One hidden ReLU layer and a sigmoid output, trained with Adam on the
/// log loss plus `alpha/2 |W|^2`. Stops when the epoch loss has not improved
/// by `tol` for `patience` consecutive epochs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mlp<T> {
    scaler: Standardizer<T>,
    /// hidden x inputs, row-major
    w1: Vec<T>,
    b1: Vec<T>,
    w2: Vec<T>,
    b2: T,
    epochs: usize,
}

struct Adam<T> {
    m: Vec<T>,
    v: Vec<T>,
}

impl<T: Scalar> Adam<T> {
    fn new(len: usize) -> Self {
        Adam {
            m: vec![T::zero(); len],
            v: vec![T::zero(); len],
        }
    }

    fn step(&mut self, params: &mut [T], grads: &[T], lr_t: T) {
        let b1 = T::lit(BETA1);
        let b2 = T::lit(BETA2);
        let eps = T::lit(ADAM_EPS);
        for ((p, g), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            *m = b1 * *m + (T::one() - b1) * *g;
            *v = b2 * *v + (T::one() - b2) * *g * *g;
            *p -= lr_t * *m / (v.sqrt() + eps);
        }
    }
}

impl<T: Scalar> Mlp<T> {
    fn hidden_into(&self, z: &[T], h: &mut [T]) {
        let d = z.len();
        for (k, hk) in h.iter_mut().enumerate() {
            let w = &self.w1[k * d..(k + 1) * d];
            let a = w.iter().zip(z).fold(self.b1[k], |acc, (wi, xi)| acc + *wi * *xi);
            *hk = a.max(T::zero());
        }
    }

    fn output(&self, h: &[T]) -> T {
        self.w2.iter().zip(h).fold(self.b2, |acc, (w, v)| acc + *w * *v)
    }

    pub(crate) fn fit(x: &Matrix<T>, y: &[u8], params: &MlpParams, seed: u64) -> Self {
        let scaler = Standardizer::fit(x);
        let z = scaler.transform_matrix(x);
        let n = y.len();
        let d = z.n_cols();
        let hidden = params.hidden;
        let targets: Vec<T> = y.iter().map(|&v| T::from_u8(v).unwrap()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let bound1 = (6.0 / (d + hidden) as f64).sqrt();
        let bound2 = (6.0 / (hidden + 1) as f64).sqrt();
        let mut uniform = |b: f64| T::lit(rng.random_range(-b..b));
        let mut net = Mlp {
            scaler,
            w1: (0..hidden * d).map(|_| uniform(bound1)).collect(),
            b1: (0..hidden).map(|_| uniform(bound1)).collect(),
            w2: (0..hidden).map(|_| uniform(bound2)).collect(),
            b2: uniform(bound2),
            epochs: 0,
        };

        let alpha = T::lit(params.alpha);
        let tol = T::lit(params.tol);
        let batch = params.batch_size.min(n).max(1);
        let n_params = hidden * d + hidden + hidden + 1;
        let mut adam = Adam::new(n_params);
        let mut theta = vec![T::zero(); n_params];
        let mut grads = vec![T::zero(); n_params];
        let mut h = vec![T::zero(); hidden];
        let mut order: Vec<usize> = (0..n).collect();
        let mut best_loss = T::infinity();
        let mut stalled = 0;
        let mut t: i32 = 0;

        for epoch in 0..params.max_iter {
            net.epochs = epoch + 1;
            order.shuffle(&mut rng);
            let mut epoch_loss = T::zero();
            for chunk in order.chunks(batch) {
                let m = T::from_count(chunk.len());
                grads.iter_mut().for_each(|g| *g = T::zero());
                let (g_w1, rest) = grads.split_at_mut(hidden * d);
                let (g_b1, rest) = rest.split_at_mut(hidden);
                let (g_w2, g_b2) = rest.split_at_mut(hidden);
                let mut batch_loss = T::zero();
                for &i in chunk {
                    let row = z.row(i);
                    net.hidden_into(row, &mut h);
                    let out = net.output(&h);
                    batch_loss += softplus(out) - targets[i] * out;
                    let delta = (sigmoid(out) - targets[i]) / m;
                    g_b2[0] += delta;
                    for k in 0..hidden {
                        g_w2[k] += delta * h[k];
                        if h[k] > T::zero() {
                            let back = delta * net.w2[k];
                            g_b1[k] += back;
                            let gw = &mut g_w1[k * d..(k + 1) * d];
                            for (g, xi) in gw.iter_mut().zip(row) {
                                *g += back * *xi;
                            }
                        }
                    }
                }
                let sq: T = net.w1.iter().chain(&net.w2).map(|w| *w * *w).sum();
                batch_loss += T::half() * alpha * sq;
                for (g, w) in g_w1.iter_mut().zip(&net.w1) {
                    *g += alpha * *w / m;
                }
                for (g, w) in g_w2.iter_mut().zip(&net.w2) {
                    *g += alpha * *w / m;
                }
                epoch_loss += batch_loss;

                t += 1;
                let correction = (T::one() - T::lit(BETA2).powi(t)).sqrt() / (T::one() - T::lit(BETA1).powi(t));
                let lr_t = T::lit(params.learning_rate) * correction;
                net.pack(&mut theta);
                adam.step(&mut theta, &grads, lr_t);
                net.unpack(&theta);
            }
            epoch_loss /= T::from_count(n);

            if epoch_loss > best_loss - tol {
                stalled += 1;
            } else {
                stalled = 0;
            }
            if epoch_loss < best_loss {
                best_loss = epoch_loss;
            }
            if stalled > params.patience {
                break;
            }
        }
        net
    }

    fn pack(&self, theta: &mut [T]) {
        let (a, rest) = theta.split_at_mut(self.w1.len());
        let (b, rest) = rest.split_at_mut(self.b1.len());
        let (c, e) = rest.split_at_mut(self.w2.len());
        a.copy_from_slice(&self.w1);
        b.copy_from_slice(&self.b1);
        c.copy_from_slice(&self.w2);
        e[0] = self.b2;
    }

    fn unpack(&mut self, theta: &[T]) {
        let (a, rest) = theta.split_at(self.w1.len());
        let (b, rest) = rest.split_at(self.b1.len());
        let (c, e) = rest.split_at(self.w2.len());
        self.w1.copy_from_slice(a);
        self.b1.copy_from_slice(b);
        self.w2.copy_from_slice(c);
        self.b2 = e[0];
    }

    pub fn score(&self, x: &[T]) -> T {
        let z = self.scaler.transform(x);
        let mut h = vec![T::zero(); self.b1.len()];
        self.hidden_into(&z, &mut h);
        sigmoid(self.output(&h))
    }

    pub fn epochs(&self) -> usize {
        self.epochs
    }
}
