//! Label rasters and binary masks.
//!
//! Annotation pixels follow the YouTube-VOS convention: 0 is background,
//! 1..=254 are object ids and 255 marks an ignore region that is excluded
//! from every metric. [`MaskFrame`] carries one frame's raw labels;
//! [`BinaryMask`] is the per-object view all metric code operates on.

use std::io::Cursor;

use crate::error::{Error, Result};

/// Label value marking pixels excluded from all metrics.
pub const IGNORE_LABEL: u8 = 255;

/// One frame's multi-object label raster (row-major, pixel value = object id).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskFrame {
    width: u32,
    height: u32,
    labels: Vec<u8>,
}

impl MaskFrame {
    /// Wrap a raw label buffer. Fails if the buffer does not hold exactly
    /// `width * height` values.
    pub fn new(width: u32, height: u32, labels: Vec<u8>) -> Result<Self> {
        let expected = width as usize * height as usize;
        if labels.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "label buffer holds {} values, raster is {}x{}",
                labels.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            labels,
        })
    }

    /// Decode an 8-bit grayscale or palette-indexed PNG. The label of pixel
    /// `i` is its raw sample value; palette colors are never resolved.
    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut decoder = png::Decoder::new(Cursor::new(bytes));
        // Raw samples: palette indices must survive untouched.
        decoder.set_transformations(png::Transformations::IDENTITY);
        let mut reader = decoder
            .read_info()
            .map_err(|e| Error::Decode(e.to_string()))?;
        let info = reader.info();
        let bit_depth = info.bit_depth as u8;
        if bit_depth != 8 {
            return Err(Error::UnsupportedDepth { found: bit_depth });
        }
        match info.color_type {
            png::ColorType::Grayscale | png::ColorType::Indexed => {}
            other => return Err(Error::UnsupportedColorType(format!("{other:?}"))),
        }
        let (width, height) = (info.width, info.height);
        let size = reader
            .output_buffer_size()
            .ok_or_else(|| Error::Decode("output size overflow".into()))?;
        let mut labels = vec![0u8; size];
        reader
            .next_frame(&mut labels)
            .map_err(|e| Error::Decode(e.to_string()))?;
        labels.truncate(width as usize * height as usize);
        Self::new(width, height, labels)
    }

    /// Encode as a palette-indexed 8-bit PNG using the standard VOC colormap,
    /// so labels round-trip through [`MaskFrame::decode`] exactly.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        {
            let mut encoder = png::Encoder::new(&mut out, self.width, self.height);
            encoder.set_color(png::ColorType::Indexed);
            encoder.set_depth(png::BitDepth::Eight);
            encoder.set_palette(voc_palette().to_vec());
            let mut writer = encoder.write_header().expect("png header");
            writer
                .write_image_data(&self.labels)
                .expect("png image data");
        }
        out
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn resolution(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Binary view of one object: true where the raster equals `object_id`.
    pub fn object_mask(&self, object_id: u8) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            data: self.labels.iter().map(|&l| l == object_id).collect(),
        }
    }

    /// Pixels carrying the ignore label.
    pub fn ignore_mask(&self) -> BinaryMask {
        self.object_mask(IGNORE_LABEL)
    }

    /// Distinct label values present in the raster, ascending.
    pub fn distinct_labels(&self) -> Vec<u8> {
        let mut seen = [false; 256];
        for &l in &self.labels {
            seen[l as usize] = true;
        }
        (0..=255u8).filter(|&l| seen[l as usize]).collect()
    }
}

/// A single object's foreground mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    data: Vec<bool>,
}

impl BinaryMask {
    /// All-background mask.
    pub fn empty(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            data: vec![false; width as usize * height as usize],
        }
    }

    /// Build from a per-pixel predicate over `(x, y)`.
    pub fn from_fn(width: u32, height: u32, f: impl Fn(u32, u32) -> bool) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    /// Build from a row-major boolean buffer.
    pub fn from_data(width: u32, height: u32, data: Vec<bool>) -> Result<Self> {
        if data.len() != width as usize * height as usize {
            return Err(Error::ShapeMismatch(format!(
                "mask buffer holds {} values, raster is {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn resolution(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.data[y as usize * self.width as usize + x as usize]
    }

    /// Number of foreground pixels.
    pub fn area(&self) -> u64 {
        self.data.iter().filter(|&&b| b).count() as u64
    }

    /// True when no pixel is foreground.
    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    /// Unweighted mean of foreground pixel coordinates, `None` when empty.
    pub fn centroid(&self) -> Option<(f64, f64)> {
        let mut sum_x = 0u64;
        let mut sum_y = 0u64;
        let mut count = 0u64;
        for y in 0..self.height {
            let row = y as usize * self.width as usize;
            for x in 0..self.width {
                if self.data[row + x as usize] {
                    sum_x += x as u64;
                    sum_y += y as u64;
                    count += 1;
                }
            }
        }
        if count == 0 {
            None
        } else {
            Some((sum_x as f64 / count as f64, sum_y as f64 / count as f64))
        }
    }

    /// Foreground of `self` with `other`'s foreground removed.
    pub fn minus(&self, other: &BinaryMask) -> Result<BinaryMask> {
        check_same_dims(self, other)?;
        Ok(BinaryMask {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a && !b)
                .collect(),
        })
    }

    /// Iterate foreground pixel coordinates in row-major order.
    pub fn foreground(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let width = self.width;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| ((i as u32) % width, (i as u32) / width))
    }
}

pub(crate) fn check_same_dims(a: &BinaryMask, b: &BinaryMask) -> Result<()> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::DimensionMismatch(
            a.width, a.height, b.width, b.height,
        ));
    }
    Ok(())
}

/// Standard VOC/DAVIS 256-entry colormap (bit-reversal construction), used
/// for palette-indexed annotation PNGs.
pub fn voc_palette() -> [u8; 768] {
    let mut palette = [0u8; 768];
    for (i, chunk) in palette.chunks_exact_mut(3).enumerate() {
        let mut c = i as u32;
        let (mut r, mut g, mut b) = (0u8, 0u8, 0u8);
        for shift in 0..8 {
            r |= ((c & 1) as u8) << (7 - shift);
            g |= (((c >> 1) & 1) as u8) << (7 - shift);
            b |= (((c >> 2) & 1) as u8) << (7 - shift);
            c >>= 3;
        }
        chunk.copy_from_slice(&[r, g, b]);
    }
    palette
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decode_all_zero_raster() {
        let frame = MaskFrame::new(4, 4, vec![0; 16]).unwrap();
        let decoded = MaskFrame::decode(&frame.encode()).unwrap();
        assert_eq!(decoded.resolution(), (4, 4));
        assert!(decoded.labels().iter().all(|&l| l == 0));
    }

    #[test]
    fn decode_is_identity_on_samples() {
        let frame = MaskFrame::new(2, 2, vec![0, 1, 1, 2]).unwrap();
        let decoded = MaskFrame::decode(&frame.encode()).unwrap();
        assert_eq!(decoded.labels(), &[0, 1, 1, 2]);
    }

    #[test]
    fn decode_rejects_low_bit_depth() {
        // 1-bit grayscale PNG written by hand through the png crate.
        let mut bytes = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut bytes, 8, 1);
            enc.set_color(png::ColorType::Grayscale);
            enc.set_depth(png::BitDepth::One);
            let mut w = enc.write_header().unwrap();
            w.write_image_data(&[0b1010_1010]).unwrap();
        }
        match MaskFrame::decode(&bytes) {
            Err(Error::UnsupportedDepth { found: 1 }) => {}
            other => panic!("expected UnsupportedDepth, got {other:?}"),
        }
    }

    #[test]
    fn decode_rejects_rgb() {
        let mut bytes = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut bytes, 1, 1);
            enc.set_color(png::ColorType::Rgb);
            enc.set_depth(png::BitDepth::Eight);
            let mut w = enc.write_header().unwrap();
            w.write_image_data(&[10, 20, 30]).unwrap();
        }
        match MaskFrame::decode(&bytes) {
            Err(Error::UnsupportedColorType(_)) => {}
            other => panic!("expected UnsupportedColorType, got {other:?}"),
        }
    }

    #[test]
    fn decode_rejects_corrupt_stream() {
        assert!(matches!(
            MaskFrame::decode(b"not a png"),
            Err(Error::Decode(_))
        ));
    }

    #[test]
    fn object_and_ignore_masks() {
        let frame = MaskFrame::new(4, 1, vec![0, 3, 3, 255]).unwrap();
        let mask = frame.object_mask(3);
        assert_eq!(mask.data(), &[false, true, true, false]);
        assert_eq!(frame.ignore_mask().area(), 1);
        assert_eq!(frame.distinct_labels(), vec![0, 3, 255]);
    }

    #[test]
    fn centroid_is_mean_of_coordinates() {
        let mask = BinaryMask::from_fn(5, 5, |x, y| (x, y) == (1, 2) || (x, y) == (3, 2));
        assert_eq!(mask.centroid(), Some((2.0, 2.0)));
        assert_eq!(BinaryMask::empty(5, 5).centroid(), None);
    }

    #[test]
    fn palette_has_voc_fixed_points() {
        let p = voc_palette();
        assert_eq!(&p[0..3], &[0, 0, 0]);
        assert_eq!(&p[3..6], &[128, 0, 0]);
        assert_eq!(&p[6..9], &[0, 128, 0]);
        assert_eq!(&p[45..48], &[192, 128, 128]);
    }

    proptest::proptest! {
        /// Labels survive an encode/decode round-trip exactly.
        #[test]
        fn encode_decode_round_trip(
            width in 1u32..24,
            height in 1u32..24,
            seed in proptest::prelude::any::<u64>(),
        ) {
            let n = (width * height) as usize;
            let mut state = seed | 1;
            let labels: Vec<u8> = (0..n)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (state >> 56) as u8
                })
                .collect();
            let frame = MaskFrame::new(width, height, labels.clone()).unwrap();
            let decoded = MaskFrame::decode(&frame.encode()).unwrap();
            proptest::prop_assert_eq!(decoded.labels(), labels.as_slice());
        }
    }
}
