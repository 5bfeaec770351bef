//! Space-time polar coded modulation over fading MIMO channels.
//!
//! The crate covers the full link: binary polar transform with SC / SCL /
//! CRC-aided list decoding ([`polar`]), QAM constellations with set-partition
//! labeling and level-wise soft demapping ([`modem`]), Rayleigh fast-fading
//! channel generation with QR-based successive interference cancellation
//! ([`mimo`]), reliability evaluation and frozen-set selection over
//! capacity-equivalent AWGN channels ([`construction`]), the end-to-end coded
//! modulation scheme ([`stpcm`]) and a reproducible Monte-Carlo block-error
//! simulation harness ([`sim`]).

pub mod construction;
mod error;
pub mod mimo;
pub mod modem;
mod numerics;
pub mod polar;
pub mod rng;
pub mod sim;
pub mod stpcm;

pub use error::Error;

pub use construction::CodeConstruction;
pub use mimo::{ChannelRealization, NoiseModel};
pub use modem::Constellation;
pub use polar::{CrcSpec, DecoderPath, PolarCode};
pub use sim::{BlerRecord, DecoderKind, SimConfig};
pub use stpcm::{PairInterleaver, StpcmCodec, StpcmFrame};
