//! 64-bit perceptual image hash.
//!
//! The recipe is normative and bit-exact; a hash stored in a corpus must be
//! reproducible from the original image bytes by any implementation of these
//! steps:
//!
//! 1. Decode the image and convert to RGB8.
//! 2. Resize to 32×32 by box averaging: destination pixel (x, y) is the
//!    unweighted mean of all source pixels whose centers fall in the source
//!    rectangle `[x·w/32, (x+1)·w/32) × [y·h/32, (y+1)·h/32)` (rectangle
//!    edges rounded so every source pixel belongs to exactly one cell and
//!    every cell is nonempty).
//! 3. Grayscale with ITU-R BT.601 luminance: `0.299·R + 0.587·G + 0.114·B`,
//!    computed in f64, no rounding.
//! 4. Orthonormal 2-D DCT-II of the 32×32 luminance matrix.
//! 5. Take the top-left 8×8 block of coefficients (lowest frequencies) and
//!    the median of those 64 values *excluding* the DC term at (0,0). With
//!    63 values the median is the 32nd smallest.
//! 6. Bit `row·8 + col` (bit 0 = least significant) is 1 iff
//!    `coefficient(row, col) > median`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PhashError {
    #[error("undecodable image: {0}")]
    Undecodable(String),
}

/// A 64-bit perceptual hash; deterministic for identical input bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PerceptualHash(u64);

impl PerceptualHash {
    pub fn from_value(v: u64) -> Self {
        PerceptualHash(v)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn hamming(self, other: PerceptualHash) -> u32 {
        (self.0 ^ other.0).count_ones()
    }
}

const SIZE: usize = 32;
const BLOCK: usize = 8;

/// Hash an encoded image per the module recipe.
pub fn phash64(image_bytes: &[u8]) -> Result<PerceptualHash, PhashError> {
    let img = image::load_from_memory(image_bytes)
        .map_err(|e| PhashError::Undecodable(e.to_string()))?;
    let rgb = img.to_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);

    let mut luma = [[0f64; SIZE]; SIZE];
    for y in 0..SIZE {
        let y0 = y * h / SIZE;
        let y1 = ((y + 1) * h / SIZE).max(y0 + 1).min(h.max(1));
        for x in 0..SIZE {
            let x0 = x * w / SIZE;
            let x1 = ((x + 1) * w / SIZE).max(x0 + 1).min(w.max(1));
            let mut sum = 0f64;
            let mut count = 0f64;
            for sy in y0..y1 {
                for sx in x0..x1 {
                    let p = rgb.get_pixel(sx as u32, sy as u32);
                    sum += 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64;
                    count += 1.0;
                }
            }
            luma[y][x] = sum / count;
        }
    }

    Ok(hash_luma(&luma))
}

/// Steps 4-6 of the recipe, exposed for tests that construct the luminance
/// matrix directly.
pub fn hash_luma(luma: &[[f64; SIZE]; SIZE]) -> PerceptualHash {
    let coeffs = dct2d(luma);

    let mut low = [0f64; BLOCK * BLOCK];
    for (r, row) in coeffs.iter().take(BLOCK).enumerate() {
        for (c, &v) in row.iter().take(BLOCK).enumerate() {
            low[r * BLOCK + c] = v;
        }
    }
    let mut non_dc: Vec<f64> = low[1..].to_vec();
    non_dc.sort_by(|a, b| a.partial_cmp(b).expect("finite coefficients"));
    let median = non_dc[non_dc.len() / 2]; // 63 values -> index 31, the 32nd smallest

    let mut bits = 0u64;
    for (i, &v) in low.iter().enumerate() {
        if v > median {
            bits |= 1 << i;
        }
    }
    PerceptualHash(bits)
}

/// Orthonormal 2-D DCT-II: rows, then columns.
fn dct2d(input: &[[f64; SIZE]; SIZE]) -> [[f64; SIZE]; SIZE] {
    // cos_table[k][n] = cos(pi/N * (n + 0.5) * k)
    let mut cos_table = [[0f64; SIZE]; SIZE];
    for (k, row) in cos_table.iter_mut().enumerate() {
        for (n, v) in row.iter_mut().enumerate() {
            *v = (std::f64::consts::PI / SIZE as f64 * (n as f64 + 0.5) * k as f64).cos();
        }
    }
    let scale = |k: usize| -> f64 {
        if k == 0 {
            (1.0 / SIZE as f64).sqrt()
        } else {
            (2.0 / SIZE as f64).sqrt()
        }
    };

    let mut rows = [[0f64; SIZE]; SIZE];
    for y in 0..SIZE {
        for k in 0..SIZE {
            let mut acc = 0f64;
            for n in 0..SIZE {
                acc += input[y][n] * cos_table[k][n];
            }
            rows[y][k] = scale(k) * acc;
        }
    }
    let mut out = [[0f64; SIZE]; SIZE];
    for x in 0..SIZE {
        for k in 0..SIZE {
            let mut acc = 0f64;
            for n in 0..SIZE {
                acc += rows[n][x] * cos_table[k][n];
            }
            out[k][x] = scale(k) * acc;
        }
    }
    out
}
