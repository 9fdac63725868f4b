use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How reads outside the window are treated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryPolicy {
    #[default]
    ZeroPadding,
}

/// The sites `j` of `Z^d` with `max_k |j_k| <= M`, stored row-major with the
/// last coordinate varying fastest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeWindow {
    d: usize,
    half_width: usize,
    #[serde(default)]
    boundary: BoundaryPolicy,
}

impl LatticeWindow {
    pub fn new(d: usize, half_width: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        if half_width < 2 {
            return Err(Error::InvalidParameter(format!(
                "half-width must be at least 2, got {half_width}"
            )));
        }
        let side = 2 * half_width + 1;
        if side.checked_pow(d as u32).is_none_or(|n| n > 1 << 28) {
            return Err(Error::InvalidParameter(format!(
                "window with d={d}, M={half_width} is too large"
            )));
        }
        Ok(LatticeWindow {
            d,
            half_width,
            boundary: BoundaryPolicy::ZeroPadding,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn boundary_policy(&self) -> BoundaryPolicy {
        self.boundary
    }

    pub fn side(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn len(&self) -> usize {
        self.side().pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index offset of a unit step along axis `k`.
    pub fn stride(&self, k: usize) -> usize {
        self.side().pow((self.d - 1 - k) as u32)
    }

    pub fn contains(&self, j: &[i64]) -> bool {
        let m = self.half_width as i64;
        j.len() == self.d && j.iter().all(|&c| c.abs() <= m)
    }

    pub fn index(&self, j: &[i64]) -> Option<usize> {
        if !self.contains(j) {
            return None;
        }
        let m = self.half_width as i64;
        let side = self.side();
        Some(j.iter().fold(0usize, |acc, &c| acc * side + (c + m) as usize))
    }

    /// Coordinates of the site stored at `idx`.
    pub fn site(&self, idx: usize) -> Vec<i64> {
        let mut out = vec![0i64; self.d];
        self.site_into(idx, &mut out);
        out
    }

    pub fn site_into(&self, mut idx: usize, out: &mut [i64]) {
        let side = self.side();
        let m = self.half_width as i64;
        for k in (0..self.d).rev() {
            out[k] = (idx % side) as i64 - m;
            idx /= side;
        }
    }

    /// Squared Euclidean norm of the site at `idx`.
    pub fn norm_sq(&self, idx: usize) -> i64 {
        let side = self.side();
        let m = self.half_width as i64;
        let mut idx = idx;
        let mut s = 0;
        for _ in 0..self.d {
            let c = (idx % side) as i64 - m;
            s += c * c;
            idx /= side;
        }
        s
    }

    /// Sup-norm of the site at `idx`.
    pub fn sup_norm(&self, idx: usize) -> i64 {
        let side = self.side();
        let m = self.half_width as i64;
        let mut idx = idx;
        let mut s = 0;
        for _ in 0..self.d {
            s = s.max(((idx % side) as i64 - m).abs());
            idx /= side;
        }
        s
    }

    /// Neighbor `j +- e_k` of site `idx`, or `None` when it falls outside.
    pub fn neighbor(&self, idx: usize, k: usize, forward: bool) -> Option<usize> {
        let side = self.side();
        let stride = self.stride(k);
        let c = (idx / stride) % side;
        if forward {
            (c + 1 < side).then(|| idx + stride)
        } else {
            (c > 0).then(|| idx - stride)
        }
    }

    pub fn origin(&self) -> usize {
        (self.len() - 1) / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_round_trip() {
        let w = LatticeWindow::new(2, 3).unwrap();
        assert_eq!(w.len(), 49);
        for idx in 0..w.len() {
            assert_eq!(w.index(&w.site(idx)), Some(idx));
        }
        assert_eq!(w.site(w.origin()), vec![0, 0]);
        assert_eq!(w.site(1), vec![-3, -2]);
    }

    #[test]
    fn rejects_small_windows() {
        assert!(LatticeWindow::new(0, 5).is_err());
        assert!(LatticeWindow::new(1, 1).is_err());
    }

    #[test]
    fn neighbors_respect_edges() {
        let w = LatticeWindow::new(2, 2).unwrap();
        let corner = w.index(&[2, 2]).unwrap();
        assert_eq!(w.neighbor(corner, 0, true), None);
        assert_eq!(w.neighbor(corner, 1, true), None);
        assert_eq!(w.neighbor(corner, 0, false), w.index(&[1, 2]));
        assert_eq!(w.neighbor(corner, 1, false), w.index(&[2, 1]));
    }
}
