use serde::{Deserialize, Serialize};

/// Dense row-major matrix, one row per sample.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    data: Vec<T>,
    cols: usize,
}

impl<T: Copy> Matrix<T> {
    pub fn new(data: Vec<T>, cols: usize) -> Self {
        assert!(cols > 0 || data.is_empty(), "zero-width matrix with data");
        if cols > 0 {
            assert_eq!(data.len() % cols, 0, "data length is not a multiple of cols");
        }
        Matrix { data, cols }
    }

    pub fn from_rows<I, R>(rows: I) -> Self
    where
        I: IntoIterator<Item = R>,
        R: AsRef<[T]>,
    {
        let mut data = Vec::new();
        let mut cols = None;
        for row in rows {
            let row = row.as_ref();
            match cols {
                None => cols = Some(row.len()),
                Some(c) => assert_eq!(c, row.len(), "ragged rows"),
            }
            data.extend_from_slice(row);
        }
        Matrix {
            data,
            cols: cols.unwrap_or(0),
        }
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.data.len().checked_div(self.cols).unwrap_or(0)
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        (0..self.n_rows()).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Matrix::from_rows(idx.iter().map(|&i| self.row(i)))
    }

    pub fn map_rows<U: Copy>(&self, mut f: impl FnMut(&[T]) -> Vec<U>) -> Matrix<U> {
        Matrix::from_rows(self.rows().map(&mut f))
    }
}
