//! Video compression by underdetermined source mixing.
//!
//! Groups of `n` source frames are mixed pixelwise into `m < n` frames by a
//! known matrix. The decoder moves the mixed frames into the Haar domain,
//! recovers the sparse detail subbands by assigning every coefficient column
//! to the subspace spanned by `m - 1` mixing columns, and recovers the dense
//! approximation subband with the pseudo-inverse.
//!
//! The crate is `no_std` (it needs `alloc`). File formats and the command
//! line tool live in the `ubssvc` crate.

#![no_std]
// `!(a > b)` is used on purpose so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![warn(missing_debug_implementations)]

extern crate alloc;

mod combinations;
mod error;
pub mod linalg;
pub mod metrics;
pub mod mixcore;
pub mod pipeline;
pub mod sca;
pub mod wavelet;

pub use combinations::{binomial, Combinations};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use metrics::{frame_mse, frame_psnr, sequence_report, QualityReport};
pub use mixcore::{
    check_sparsity, generalized_inverse, mix_block, validate_mixing_matrix, Frame, FrameBlock,
    MixedBlock, MixingMatrix, SparsityReport, ValidationReport,
};
pub use pipeline::{
    decode_sequence, encode_sequence, roundtrip_eval, CodecConfig, EncodedSequence, PadPolicy,
    QuantMode, Quantization, RoundtripReport, TailPolicy,
};
pub use sca::{
    build_hyperplanes, classify_column, column_residual, reconstruct_column, recover_block,
    recover_dense, ColumnAssignment, Hyperplane, HyperplaneSet, RecoveryStats,
};
pub use wavelet::{haar_forward, haar_inverse, SubbandImage};
