//! Dense row-major rasters shared by every stage of the pipeline.
//!
//! Pixel `(row, col)` covers the unit square `[col, col+1) x [row, row+1)` and
//! is sampled at its center `(col + 0.5, row + 0.5)`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }
}

impl<T: Clone + Default> Grid<T> {
    pub fn new(width: usize, height: usize) -> Self {
        Self::filled(width, height, T::default())
    }
}

impl<T> Grid<T> {
    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {width}x{height} grid",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                data.push(f(row, col));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.data[row * self.width + col]
    }

    #[inline]
    pub fn get_mut(&mut self, row: usize, col: usize) -> &mut T {
        &mut self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.data[row * self.width + col] = value;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn same_shape<U>(&self, other: &Grid<U>) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Grid<U> {
        Grid {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(f).collect(),
        }
    }
}

/// Binary raster; `true` marks a set pixel.
pub type BinaryMask = Grid<bool>;

impl BinaryMask {
    pub fn count_set(&self) -> usize {
        self.data.iter().filter(|&&v| v).count()
    }

    /// Sets every pixel that is set in `other`.
    pub fn union_with(&mut self, other: &BinaryMask) {
        debug_assert!(self.same_shape(other));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a |= b;
        }
    }

    /// Nearest-neighbour resampling to a new shape.
    pub fn resize_nearest(&self, width: usize, height: usize) -> BinaryMask {
        resize_nearest(self, width, height)
    }
}

/// Nearest-neighbour resampling: destination pixel centers are mapped back
/// into the source grid and the covering source pixel is copied. Exactly
/// invertible for integer up/down ratios.
pub fn resize_nearest<T: Clone>(src: &Grid<T>, width: usize, height: usize) -> Grid<T> {
    assert!(
        src.width > 0 && src.height > 0 || width * height == 0,
        "cannot resample an empty grid"
    );
    let sx = src.width as f64 / width as f64;
    let sy = src.height as f64 / height as f64;
    Grid::from_fn(width, height, |row, col| {
        let r = (((row as f64 + 0.5) * sy) as usize).min(src.height - 1);
        let c = (((col as f64 + 0.5) * sx) as usize).min(src.width - 1);
        src.get(r, c).clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_round_trip_at_integer_ratio() {
        let g = Grid::from_fn(3, 2, |r, c| (r * 3 + c) as u8);
        let up = resize_nearest(&g, 12, 8);
        assert_eq!(*up.get(7, 11), 5);
        assert_eq!(*up.get(0, 3), 0);
        assert_eq!(*up.get(0, 4), 1);
        let down = resize_nearest(&up, 3, 2);
        assert_eq!(down, g);
    }

    #[test]
    fn from_vec_rejects_bad_length() {
        assert!(Grid::from_vec(2, 2, vec![0u8; 3]).is_err());
    }
}
