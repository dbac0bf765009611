//! Image planes, raster traversal, and the per-pixel side planes that the
//! encoder and decoder both fill while coding.

use crate::error::{Result, ScfError};

/// An RGB triple. Ordering is lexicographic over (r, g, b).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Color {
    pub r: u16,
    pub g: u16,
    pub b: u16,
}

impl Color {
    pub const ZERO: Color = Color { r: 0, g: 0, b: 0 };

    pub const fn new(r: u16, g: u16, b: u16) -> Self {
        Color { r, g, b }
    }

    #[inline]
    pub fn component(self, k: usize) -> u16 {
        match k {
            0 => self.r,
            1 => self.g,
            2 => self.b,
            _ => panic!("component index {k} out of range"),
        }
    }

    #[inline]
    pub fn set_component(&mut self, k: usize, v: u16) {
        match k {
            0 => self.r = v,
            1 => self.g = v,
            2 => self.b = v,
            _ => panic!("component index {k} out of range"),
        }
    }

    pub fn components(self) -> [u16; 3] {
        [self.r, self.g, self.b]
    }
}

/// Causal template positions A..F as (dx, dy) offsets from the current pixel.
///
/// ```text
///        F
///     C  B  D
///  E  A  X
/// ```
pub const TEMPLATE: [(i32, i32); 6] = [(-1, 0), (0, -1), (-1, -1), (1, -1), (-2, 0), (0, -2)];

/// Largest supported component depth in bits.
pub const MAX_DEPTH: u8 = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: usize,
    height: usize,
    depth: u8,
    pixels: Vec<Color>,
}

impl Image {
    /// Creates an image filled with `fill`.
    pub fn new(width: usize, height: usize, depth: u8, fill: Color) -> Result<Self> {
        Self::from_pixels(width, height, depth, vec![fill; width.saturating_mul(height)])
    }

    pub fn from_pixels(width: usize, height: usize, depth: u8, pixels: Vec<Color>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(ScfError::InvalidImage(format!(
                "dimensions must be nonzero, got {width}x{height}"
            )));
        }
        if depth == 0 || depth > MAX_DEPTH {
            return Err(ScfError::UnsupportedDepth(depth));
        }
        if pixels.len() != width * height {
            return Err(ScfError::InvalidImage(format!(
                "expected {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        let max = max_value(depth);
        if let Some(c) = pixels
            .iter()
            .find(|c| c.r > max || c.g > max || c.b > max)
        {
            return Err(ScfError::InvalidImage(format!(
                "color {c:?} exceeds {depth}-bit range"
            )));
        }
        Ok(Image { width, height, depth, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn depth(&self) -> u8 {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    /// Largest representable component value, `2^depth - 1`.
    pub fn max_value(&self) -> u16 {
        max_value(self.depth)
    }

    pub fn pixels(&self) -> &[Color] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Color {
        self.pixels[j * self.width + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, c: Color) {
        self.pixels[j * self.width + i] = c;
    }

    /// Pixel at `(i + dx, j + dy)`, or [`Color::ZERO`] when that position is
    /// outside the image.
    #[inline]
    pub fn neighbor(&self, i: usize, j: usize, dx: i32, dy: i32) -> Color {
        match offset(i, j, dx, dy, self.width, self.height) {
            Some((x, y)) => self.get(x, y),
            None => Color::ZERO,
        }
    }

    pub fn raster_scan(&self) -> RasterScan {
        raster_scan(self.width, self.height)
    }

    /// Number of distinct colors in the image.
    pub fn unique_colors(&self) -> usize {
        let mut seen: Vec<Color> = self.pixels.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }
}

pub fn max_value(depth: u8) -> u16 {
    ((1u32 << depth) - 1) as u16
}

#[inline]
pub(crate) fn offset(
    i: usize,
    j: usize,
    dx: i32,
    dy: i32,
    width: usize,
    height: usize,
) -> Option<(usize, usize)> {
    let x = i as i64 + dx as i64;
    let y = j as i64 + dy as i64;
    if x < 0 || y < 0 || x >= width as i64 || y >= height as i64 {
        None
    } else {
        Some((x as usize, y as usize))
    }
}

/// Row-major traversal: left to right, then top to bottom.
#[derive(Debug, Clone)]
pub struct RasterScan {
    width: usize,
    height: usize,
    next: usize,
}

pub fn raster_scan(width: usize, height: usize) -> RasterScan {
    RasterScan { width, height, next: 0 }
}

impl Iterator for RasterScan {
    type Item = (usize, usize);

    fn next(&mut self) -> Option<(usize, usize)> {
        if self.width == 0 || self.next >= self.width * self.height {
            return None;
        }
        let pos = (self.next % self.width, self.next / self.width);
        self.next += 1;
        Some(pos)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rem = (self.width * self.height).saturating_sub(self.next);
        (rem, Some(rem))
    }
}

impl ExactSizeIterator for RasterScan {}

/// Per-pixel state written once, right after each pixel is coded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SidePlanes {
    width: usize,
    height: usize,
    map_error: Vec<[i32; 3]>,
    new_color: Vec<bool>,
}

impl SidePlanes {
    pub fn new(width: usize, height: usize) -> Self {
        SidePlanes {
            width,
            height,
            map_error: vec![[0; 3]; width * height],
            new_color: vec![false; width * height],
        }
    }

    /// MAP prediction error of component `k` at `(i + dx, j + dy)`; 0 off-image.
    #[inline]
    pub fn map_error(&self, i: usize, j: usize, dx: i32, dy: i32, k: usize) -> i32 {
        match offset(i, j, dx, dy, self.width, self.height) {
            Some((x, y)) => self.map_error[y * self.width + x][k],
            None => 0,
        }
    }

    /// Whether the pixel at `(i + dx, j + dy)` introduced a new color; false off-image.
    #[inline]
    pub fn new_color(&self, i: usize, j: usize, dx: i32, dy: i32) -> bool {
        match offset(i, j, dx, dy, self.width, self.height) {
            Some((x, y)) => self.new_color[y * self.width + x],
            None => false,
        }
    }

    pub fn record(&mut self, i: usize, j: usize, map_error: [i32; 3], new_color: bool) {
        let idx = j * self.width + i;
        self.map_error[idx] = map_error;
        self.new_color[idx] = new_color;
    }

    pub(crate) fn row(&self, j: usize) -> (&[[i32; 3]], &[bool]) {
        let r = j * self.width..(j + 1) * self.width;
        (&self.map_error[r.clone()], &self.new_color[r])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gradient(w: usize, h: usize) -> Image {
        let px = (0..w * h)
            .map(|n| Color::new((n % 256) as u16, (n / 7 % 256) as u16, 3))
            .collect();
        Image::from_pixels(w, h, 8, px).unwrap()
    }

    #[test]
    fn neighbor_substitutes_zero_off_image() {
        let img = Image::new(8, 4, 8, Color::new(9, 9, 9)).unwrap();
        assert_eq!(img.neighbor(0, 0, -1, 0), Color::ZERO);
        assert_eq!(img.neighbor(5, 0, 1, -1), Color::ZERO);
        assert_eq!(img.neighbor(7, 2, 1, 0), Color::ZERO);
        assert_eq!(img.neighbor(3, 2, 0, 0), Color::new(9, 9, 9));
    }

    #[test]
    fn neighbor_identity_and_offsets() {
        let img = gradient(10, 5);
        assert_eq!(img.neighbor(4, 3, 0, 0), img.get(4, 3));
        assert_eq!(img.neighbor(4, 3, 1, -1), img.get(5, 2));
        assert_eq!(img.neighbor(4, 3, -2, 0), img.get(2, 3));
    }

    #[test]
    fn raster_order() {
        let v: Vec<_> = raster_scan(2, 2).collect();
        assert_eq!(v, vec![(0, 0), (1, 0), (0, 1), (1, 1)]);
        assert_eq!(raster_scan(1, 1).collect::<Vec<_>>(), vec![(0, 0)]);
        assert_eq!(raster_scan(3, 1).collect::<Vec<_>>(), vec![(0, 0), (1, 0), (2, 0)]);
        assert_eq!(raster_scan(0, 3).count(), 0);
    }

    #[test]
    fn template_is_causal() {
        for &(dx, dy) in &TEMPLATE {
            assert!(dy < 0 || (dy == 0 && dx < 0), "offset ({dx},{dy}) is not causal");
        }
    }

    #[test]
    fn rejects_bad_images() {
        assert!(Image::new(0, 3, 8, Color::ZERO).is_err());
        assert!(Image::new(3, 0, 8, Color::ZERO).is_err());
        assert!(matches!(
            Image::new(2, 2, 17, Color::ZERO),
            Err(ScfError::UnsupportedDepth(17))
        ));
        assert!(Image::from_pixels(1, 1, 8, vec![Color::new(256, 0, 0)]).is_err());
        assert!(Image::from_pixels(2, 1, 8, vec![Color::ZERO]).is_err());
    }

    #[test]
    fn color_order_is_lexicographic() {
        let mut v = vec![Color::new(1, 0, 0), Color::new(0, 5, 5), Color::new(0, 5, 1)];
        v.sort();
        assert_eq!(v, vec![Color::new(0, 5, 1), Color::new(0, 5, 5), Color::new(1, 0, 0)]);
    }

    #[test]
    fn side_planes_off_image_defaults() {
        let mut sp = SidePlanes::new(3, 3);
        sp.record(0, 0, [4, -2, 7], true);
        assert_eq!(sp.map_error(1, 0, -1, 0, 1), -2);
        assert!(sp.new_color(1, 1, -1, -1));
        assert_eq!(sp.map_error(0, 0, -1, 0, 0), 0);
        assert!(!sp.new_color(0, 0, 0, -1));
    }
}
