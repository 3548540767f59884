//! Polar-format focusing for terahertz video SAR.
//!
//! Two focusers share one echo model and one set of spectral primitives:
//!
//! ```text
//! scene ──► echo::simulate ──► PhaseHistory ─┬─► pfa_cs::focus_cs      (FFT + chirp multiplies only)
//!                                            ├─► pfa_interp::focus_interp (windowed-sinc regridding)
//!                                            └─► analysis::oracle_image   (direct nonuniform DFT)
//!                                                          │
//!                                   analysis::quality_report (IRW / PSLR / ISLR)
//! ```

pub mod analysis;
pub mod dsp;
pub mod echo;
pub mod error;
pub mod formats;
pub mod geometry;
pub mod image;
pub mod pfa_cs;
pub mod pfa_interp;

pub use error::{MetricError, Result, VsarError};

/// Propagation speed in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;
