//! Obstacle-aware Voronoi coverage control of a multi-agent team tracking a
//! time-varying Gaussian-mixture reference density.

// `!(x > 0.0)` is used on purpose so that NaN takes the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod control;
pub mod density;
pub mod engine;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod gmm;
pub mod linalg;
pub mod output;
pub mod quadrature;
pub mod scenario;

pub use error::{Error, Result};
pub use exec::Execution;
pub use linalg::{SymMat2, Vec2};

/// Derive an independent seed for `(stream, index)` from a base seed.
///
/// splitmix64 finalizer over a mixed input; distinct streams and indices give
/// statistically unrelated seeds.
pub fn mix_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut z = seed
        ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ index.wrapping_mul(0xc2b2_ae3d_27d4_eb4f).rotate_left(31);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
