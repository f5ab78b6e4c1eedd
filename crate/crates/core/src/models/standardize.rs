use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::scalar::Scalar;

/// Per-feature mean and standard deviation captured from the learn set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer<T> {
    mean: Vec<T>,
    scale: Vec<T>,
}

impl<T: Scalar> Standardizer<T> {
    pub fn fit(x: &Matrix<T>) -> Self {
        let n = T::from_count(x.n_rows().max(1));
        let d = x.n_cols();
        let mut mean = vec![T::zero(); d];
        for row in x.rows() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += *v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![T::zero(); d];
        for row in x.rows() {
            for j in 0..d {
                let c = row[j] - mean[j];
                var[j] += c * c;
            }
        }
        let scale = var
            .into_iter()
            .map(|v| {
                let s = (v / n).sqrt();
                // constant columns pass through centred
                if s > T::epsilon() * T::lit(16.0) {
                    s
                } else {
                    T::one()
                }
            })
            .collect();
        Standardizer { mean, scale }
    }

    pub fn transform_into(&self, x: &[T], out: &mut Vec<T>) {
        out.clear();
        out.extend(
            x.iter()
                .zip(self.mean.iter().zip(&self.scale))
                .map(|(v, (m, s))| (*v - *m) / *s),
        );
    }

    pub fn transform(&self, x: &[T]) -> Vec<T> {
        let mut out = Vec::with_capacity(x.len());
        self.transform_into(x, &mut out);
        out
    }

    pub fn transform_matrix(&self, x: &Matrix<T>) -> Matrix<T> {
        x.map_rows(|r| self.transform(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_mean_unit_variance() {
        let x = Matrix::from_rows([[1.0f64, 5.0], [3.0, 5.0], [5.0, 5.0]]);
        let s = Standardizer::fit(&x);
        let z = s.transform_matrix(&x);
        let col0 = z.column(0);
        assert!((col0.iter().sum::<f64>()).abs() < 1e-12);
        let var: f64 = col0.iter().map(|v| v * v).sum::<f64>() / 3.0;
        assert!((var - 1.0).abs() < 1e-12);
        assert_eq!(z.column(1), vec![0.0; 3]);
    }
}
