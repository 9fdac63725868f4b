use num_complex::Complex64;

/// LU factors of a square band matrix, without pivoting.
///
/// Only used for `I + c H` with `|c| (2d + ||V||) < 1`, which is strictly
/// diagonally dominant, so elimination is stable without row exchanges.
#[derive(Clone, Debug)]
pub struct BandedLu {
    n: usize,
    b: usize,
    data: Vec<Complex64>,
}

impl BandedLu {
    /// Factors the matrix whose entries inside the band are given by `entry(i, j)`.
    pub fn factor(n: usize, b: usize, entry: impl Fn(usize, usize) -> Complex64) -> Self {
        let w = 2 * b + 1;
        let mut data = vec![Complex64::new(0.0, 0.0); n * w];
        for i in 0..n {
            let lo = i.saturating_sub(b);
            let hi = (i + b).min(n - 1);
            for j in lo..=hi {
                data[i * w + j + b - i] = entry(i, j);
            }
        }
        for k in 0..n {
            let pivot = data[k * w + b];
            let end = (k + b).min(n - 1);
            for i in k + 1..=end {
                let ik = i * w + k + b - i;
                if data[ik] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let l = data[ik] / pivot;
                data[ik] = l;
                for j in k + 1..=end {
                    let u = data[k * w + j + b - k];
                    data[i * w + j + b - i] -= l * u;
                }
            }
        }
        BandedLu { n, b, data }
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let (n, b) = (self.n, self.b);
        let w = 2 * b + 1;
        let mut x = rhs.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(b);
            let mut acc = x[i];
            for j in lo..i {
                acc -= self.data[i * w + j + b - i] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let hi = (i + b).min(n - 1);
            let mut acc = x[i];
            for j in i + 1..=hi {
                acc -= self.data[i * w + j + b - i] * x[j];
            }
            x[i] = acc / self.data[i * w + b];
        }
        x
    }
}
