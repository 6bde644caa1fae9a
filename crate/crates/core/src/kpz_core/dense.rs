use num_complex::Complex64 as C;
use rayon::prelude::*;

/// Row-major dense complex matrix.
#[derive(Debug, Clone)]
pub(crate) struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C>,
}

impl Mat {
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C + Sync) -> Self {
        let data = (0..rows * cols)
            .into_par_iter()
            .map(|k| f(k / cols, k % cols))
            .collect();
        Mat { rows, cols, data }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[C] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `self · other`; each output row is accumulated in a fixed order.
    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let p = other.cols;
        let mut data = vec![C::new(0.0, 0.0); self.rows * p];
        data.par_chunks_mut(p).enumerate().for_each(|(i, out)| {
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == C::new(0.0, 0.0) {
                    continue;
                }
                for (o, &b) in out.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        });
        Mat {
            rows: self.rows,
            cols: p,
            data,
        }
    }

    pub fn sum(&self) -> C {
        self.data.iter().sum()
    }
}
