//! Frame sequences and the mixed-stream container on disk.

mod container;
mod pgm;
mod sequence;

pub use container::{
    decode_container, encode_container, read_container, write_container, HEADER_LEN, MAGIC, VERSION,
};
pub use pgm::{decode_pgm, encode_pgm};
pub use sequence::{
    expand_pattern, read_raw_planar, read_sequence, write_raw_planar, write_sequence, Origin,
    SequenceInput, SequenceSource,
};
