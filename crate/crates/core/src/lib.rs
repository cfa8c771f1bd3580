//! Iterative decoders for binary product codes built from (extended) BCH
//! components, with a Monte Carlo BER harness.
//!
//! ```
//! use pcfec::bch::ComponentCode;
//! use pcfec::product::{BitMatrix, ProductCode};
//!
//! let pc = ProductCode::new(ComponentCode::new(4, 2, false).unwrap());
//! let c = pc.encode(&BitMatrix::from_fn(7, |i, j| ((i + j) % 2) as u8));
//! assert!(pc.is_codeword(&c));
//! ```

pub mod analysis;
pub mod bch;
pub mod channel;
pub mod decoders;
pub mod gf2m;
pub mod gmdd;
mod par;
pub mod product;
pub mod sim;

pub use par::{parallel_enabled, with_workers};
