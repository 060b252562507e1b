//! Expurgated pulse position modulation.
//!
//! Builds equidistant slot codebooks from cyclic symmetric block designs,
//! demodulates them with a cyclic differential correlator, and compares them
//! with PPM, multipulse PPM and OOK through union bounds and Monte-Carlo
//! simulation over an AWGN channel.
//!
//! ```
//! use eppm_core::design::qr_difference_set;
//! use eppm_core::constellation::build_eppm;
//! use eppm_core::transceiver::{demodulate, modulate};
//!
//! let design = qr_difference_set(11).unwrap();
//! let eppm = build_eppm(&design.expand());
//! assert_eq!(eppm.min_distance(), 6);
//! let frame = modulate(3, &eppm).unwrap();
//! assert_eq!(demodulate(&frame, &eppm), 3);
//! ```

pub mod analysis;
pub mod channel;
pub mod constellation;
pub mod design;
pub mod error;
pub mod transceiver;

pub use error::{Error, Result};
