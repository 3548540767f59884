//! Spectral primitives shared by the focusers: unitary FFTs along a matrix
//! axis, center shifts, spectral oversampling and a Kaiser-windowed sinc
//! interpolator.

mod engine;
mod interp;
mod matrix;

pub use engine::{
    bin_frequency, fft_vec, fftshift_axis, fftshift_vec, shifted_zero_index, Axis, Direction,
    OpCounts, SpectralEngine,
};
pub use interp::{bessel_i0, oversample_1d, sinc, Interpolated, SincKernel};
pub use matrix::{relative_error, ComplexMatrix};

pub(crate) use engine::fft_lines;
