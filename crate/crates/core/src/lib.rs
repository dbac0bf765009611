//! Lossless screen-content image coding.
//!
//! Pixels are coded in raster order by one of three stages: a pattern
//! model keyed on the six causal neighbors, a global color palette, or
//! component-wise residual coding of prediction errors. Two optional
//! refinements, both on by default, are range-pruned residual histograms
//! and a new-color escape model conditioned on neighboring new colors.
//!
//! ```
//! use scf_core::{decode, encode, CodecConfig, Color, Image};
//!
//! let img = Image::new(16, 16, 8, Color::new(200, 30, 30)).unwrap();
//! let bytes = encode(&img, &CodecConfig::default()).unwrap();
//! assert_eq!(decode(&bytes).unwrap(), img);
//! ```

pub mod bench;
pub mod codec;
pub mod coder;
pub mod corpus;
pub mod error;
pub mod image;
pub mod palette;
pub mod pattern;
pub mod ppm;
pub mod residual;

pub use codec::{
    decode, decode_traced, decode_with_stats, encode, encode_traced, encode_with_stats,
    BitstreamHeader, CodecConfig, Stage, StageStats,
};
pub use error::{Result, ScfError};
pub use image::{Color, Image};

/// 64-bit finalizer used for model-state digests.
#[inline]
pub(crate) fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}
