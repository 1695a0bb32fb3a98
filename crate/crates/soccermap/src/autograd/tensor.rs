//! The shape-tagged numeric grid that every layer consumes and produces.

use super::Real;

/// A dense `(nx, ny, channels)` array over the pitch grid, row-major with
/// the channel index fastest: `data[(ix * ny + iy) * ch + c]`.
///
/// `nx` counts cells along the field length (x), `ny` along the width (y).
#[derive(Clone, Debug, PartialEq)]
pub struct GridTensor<R> {
    nx: usize,
    ny: usize,
    ch: usize,
    data: Vec<R>,
}

impl<R: Real> GridTensor<R> {
    pub fn zeros(nx: usize, ny: usize, ch: usize) -> Self {
        GridTensor {
            nx,
            ny,
            ch,
            data: vec![R::zero(); nx * ny * ch],
        }
    }

    pub fn from_vec(nx: usize, ny: usize, ch: usize, data: Vec<R>) -> Self {
        assert_eq!(
            data.len(),
            nx * ny * ch,
            "grid data length {} does not match shape {}x{}x{}",
            data.len(),
            nx,
            ny,
            ch
        );
        GridTensor { nx, ny, ch, data }
    }

    pub fn filled(nx: usize, ny: usize, ch: usize, v: R) -> Self {
        GridTensor {
            nx,
            ny,
            ch,
            data: vec![v; nx * ny * ch],
        }
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.nx, self.ny, self.ch)
    }
    #[inline]
    pub fn nx(&self) -> usize {
        self.nx
    }
    #[inline]
    pub fn ny(&self) -> usize {
        self.ny
    }
    #[inline]
    pub fn channels(&self) -> usize {
        self.ch
    }
    #[inline]
    pub fn numel(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn idx(&self, ix: usize, iy: usize, c: usize) -> usize {
        debug_assert!(ix < self.nx && iy < self.ny && c < self.ch);
        (ix * self.ny + iy) * self.ch + c
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize, c: usize) -> R {
        self.data[self.idx(ix, iy, c)]
    }

    #[inline]
    pub fn set(&mut self, ix: usize, iy: usize, c: usize, v: R) {
        let i = self.idx(ix, iy, c);
        self.data[i] = v;
    }

    pub fn data(&self) -> &[R] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [R] {
        &mut self.data
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Convert between engine precisions.
    pub fn cast<T: Real>(&self) -> GridTensor<T> {
        GridTensor {
            nx: self.nx,
            ny: self.ny,
            ch: self.ch,
            data: self.data.iter().map(|v| T::from_f64(v.as_f64())).collect(),
        }
    }
}
