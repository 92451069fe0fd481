use super::CsrMatrix;

/// Cholesky factor `L` of a symmetric positive-definite banded matrix,
/// stored row by row over the band `j in i-bw ..= i`.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    lower: Vec<f64>,
}

impl BandCholesky {
    /// Returns `None` if a pivot is not strictly positive.
    pub fn factor(a: &CsrMatrix) -> Option<Self> {
        let n = a.n_rows();
        let bw = a.bandwidth();
        let w = bw + 1;
        let mut lower = vec![0.0; n * w];
        // lower[i * w + (j + bw - i)] holds L[i][j]
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    lower[i * w + (j + bw - i)] = v;
                }
            }
        }
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let mut s = lower[i * w + (j + bw - i)];
                let k0 = j0.max(j.saturating_sub(bw));
                for k in k0..j {
                    s -= lower[i * w + (k + bw - i)] * lower[j * w + (k + bw - j)];
                }
                if j == i {
                    if !(s > 0.0) || !s.is_finite() {
                        return None;
                    }
                    lower[i * w + bw] = s.sqrt();
                } else {
                    lower[i * w + (j + bw - i)] = s / lower[j * w + bw];
                }
            }
        }
        Some(Self { n, bw, lower })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.lower[i * w + (k + bw - i)] * y[k];
            }
            y[i] = s / self.lower[i * w + bw];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n.min(i + bw + 1) {
                s -= self.lower[k * w + (i + bw - k)] * y[k];
            }
            y[i] = s / self.lower[i * w + bw];
        }
        y
    }
}
