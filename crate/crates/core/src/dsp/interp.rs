use std::f64::consts::PI;

use num_complex::Complex64;

use super::engine::{fft_vec, Direction, SpectralEngine};
use crate::error::{Result, VsarError};

/// Windowed-sinc kernel: truncated sinc times a Kaiser window spanning
/// `taps` samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SincKernel {
    taps: usize,
    beta: f64,
}

impl Default for SincKernel {
    fn default() -> Self {
        Self { taps: 8, beta: 4.0 }
    }
}

impl SincKernel {
    pub fn new(taps: usize, beta: f64) -> Result<Self> {
        if taps < 4 || taps % 2 != 0 {
            return Err(VsarError::InvalidParameter {
                name: "taps",
                reason: format!("must be even and >= 4, got {taps}"),
            });
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(VsarError::InvalidParameter {
                name: "kaiser_beta",
                reason: format!("must be finite and non-negative, got {beta}"),
            });
        }
        Ok(Self { taps, beta })
    }

    pub fn taps(&self) -> usize {
        self.taps
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Kernel weight at offset `d` samples from the query.
    pub fn weight(&self, d: f64) -> f64 {
        let half = self.taps as f64 / 2.0;
        let x = d / half;
        if x.abs() > 1.0 {
            return 0.0;
        }
        sinc(d) * bessel_i0(self.beta * (1.0 - x * x).sqrt()) / bessel_i0(self.beta)
    }
}

/// Normalized sinc, `sin(pi x) / (pi x)`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

/// Modified Bessel function of the first kind, order zero (power series).
pub fn bessel_i0(x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= (half / k) * (half / k);
        sum += term;
        if term < sum * 1e-17 {
            return sum;
        }
        k += 1.0;
    }
}

/// Result of [`SpectralEngine::sinc_interp`]: values plus a flag for every
/// query that fell outside the sample support and was zero-filled.
#[derive(Debug, Clone, PartialEq)]
pub struct Interpolated {
    pub values: Vec<Complex64>,
    pub outside: Vec<bool>,
}

// Queries this close outside [0, n-1] are clamped onto the support, so grid
// edges computed in floating point do not flicker in and out.
const SUPPORT_SLACK: f64 = 1e-9;

impl SpectralEngine {
    /// Interpolates `samples` (on grid positions `0..n`) at fractional
    /// `queries`, in sample-index units. Taps that fall off the ends of the
    /// array contribute zero.
    pub fn sinc_interp(
        &self,
        samples: &[Complex64],
        queries: &[f64],
        kernel: &SincKernel,
    ) -> Interpolated {
        let n = samples.len();
        let half = (kernel.taps / 2) as i64;
        let mut values = Vec::with_capacity(queries.len());
        let mut outside = Vec::with_capacity(queries.len());
        let mut evals = 0u64;
        for &q in queries {
            if n == 0 || !q.is_finite() || q < -SUPPORT_SLACK || q > (n - 1) as f64 + SUPPORT_SLACK {
                values.push(Complex64::new(0.0, 0.0));
                outside.push(true);
                continue;
            }
            let q = q.clamp(0.0, (n - 1) as f64);
            let base = q.floor() as i64;
            let mut acc = Complex64::new(0.0, 0.0);
            for i in (base - half + 1)..=(base + half) {
                if i < 0 || i >= n as i64 {
                    continue;
                }
                evals += 1;
                acc += samples[i as usize] * kernel.weight(q - i as f64);
            }
            values.push(acc);
            outside.push(false);
        }
        self.add_kernel_evals(evals);
        Interpolated { values, outside }
    }

    /// Band-limited interpolation by spectral zero padding; output sample
    /// `factor * i` reproduces input sample `i`.
    pub fn oversample_1d(&self, v: &[Complex64], factor: usize) -> Result<Vec<Complex64>> {
        oversample_1d(v, factor)
    }
}

pub fn oversample_1d(v: &[Complex64], factor: usize) -> Result<Vec<Complex64>> {
    if factor == 0 {
        return Err(VsarError::InvalidParameter {
            name: "factor",
            reason: "oversampling factor must be >= 1".into(),
        });
    }
    let n = v.len();
    if factor == 1 || n == 0 {
        return Ok(v.to_vec());
    }
    let long = n * factor;
    let spec = fft_vec(v, Direction::Forward);
    let gain = (factor as f64).sqrt();
    let mut padded = vec![Complex64::new(0.0, 0.0); long];
    let positive = n.div_ceil(2);
    for k in 0..positive {
        padded[k] = spec[k] * gain;
    }
    for k in positive..n {
        padded[long - (n - k)] = spec[k] * gain;
    }
    if n % 2 == 0 {
        // split the Nyquist bin between +n/2 and -n/2
        let nyq = spec[n / 2] * gain * 0.5;
        padded[n / 2] = nyq;
        padded[long - n / 2] = nyq;
    }
    Ok(fft_vec(&padded, Direction::Inverse))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::matrix::relative_error;
    use proptest::prelude::*;

    fn tone(f: f64, positions: impl Iterator<Item = f64>) -> Vec<Complex64> {
        positions
            .map(|t| Complex64::from_polar(1.0, 2.0 * PI * f * t))
            .collect()
    }

    #[test]
    fn kernel_validation() {
        assert!(SincKernel::new(6, 4.0).is_ok());
        assert!(SincKernel::new(2, 4.0).is_err());
        assert!(SincKernel::new(7, 4.0).is_err());
        assert!(SincKernel::new(8, f64::NAN).is_err());
    }

    #[test]
    fn bessel_reference_values() {
        // Abramowitz & Stegun table 9.8
        assert!((bessel_i0(0.0) - 1.0).abs() < 1e-15);
        assert!((bessel_i0(1.0) - 1.266_065_877_752_008_4).abs() < 1e-14);
        assert!((bessel_i0(4.0) - 11.301_921_952_136_33).abs() < 1e-11);
    }

    #[test]
    fn on_grid_queries_reproduce_samples() {
        let e = SpectralEngine::new();
        let s: Vec<Complex64> = (0..32)
            .map(|i| Complex64::new((i as f64 * 0.7).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let q: Vec<f64> = (0..32).map(|i| i as f64).collect();
        let out = e.sinc_interp(&s, &q, &SincKernel::default());
        assert!(relative_error(&out.values, &s) < 1e-6);
        assert!(out.outside.iter().all(|o| !o));
    }

    #[test]
    fn half_integer_tone_error_below_minus_50_db() {
        // slowly varying tone, away from the array ends
        let f = 0.05;
        let n = 256;
        let s = tone(f, (0..n).map(|i| i as f64));
        let q: Vec<f64> = (20..n - 20).map(|i| i as f64 + 0.5).collect();
        let truth = tone(f, q.iter().copied());
        let e = SpectralEngine::new();
        let out = e.sinc_interp(&s, &q, &SincKernel::new(8, 4.0).unwrap());
        let err_db = 20.0 * relative_error(&out.values, &truth).log10();
        assert!(err_db < -50.0, "error {err_db} dB");
    }

    #[test]
    fn outside_queries_zero_filled_and_masked() {
        let e = SpectralEngine::new();
        let s = vec![Complex64::new(1.0, 1.0); 10];
        let out = e.sinc_interp(&s, &[-1.0, -0.01, 9.5, 42.0], &SincKernel::default());
        assert!(out.values.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
        assert!(out.outside.iter().all(|o| *o));
    }

    #[test]
    fn error_decreases_with_taps_on_tone_corpus() {
        let e = SpectralEngine::new();
        let n = 256;
        let freqs = [0.05, 0.1, 0.2, 0.3];
        let q: Vec<f64> = (24..n - 24).map(|i| i as f64 + 0.5).collect();
        let mut errs = Vec::new();
        for taps in [4, 8, 16] {
            let k = SincKernel::new(taps, 4.0).unwrap();
            let mut num = 0.0;
            let mut den = 0.0;
            for &f in &freqs {
                let s = tone(f, (0..n).map(|i| i as f64));
                let truth = tone(f, q.iter().copied());
                let out = e.sinc_interp(&s, &q, &k);
                num += out
                    .values
                    .iter()
                    .zip(&truth)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>();
                den += truth.iter().map(|z| z.norm_sqr()).sum::<f64>();
            }
            errs.push((num / den).sqrt());
        }
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    }

    #[test]
    fn counts_kernel_evaluations() {
        let e = SpectralEngine::new();
        let s = vec![Complex64::new(1.0, 0.0); 64];
        e.sinc_interp(&s, &[10.25, 20.5], &SincKernel::default());
        assert_eq!(e.counts().kernel_evals, 16);
    }

    #[test]
    fn oversample_factor_one_is_identity() {
        let v = tone(0.13, (0..17).map(|i| i as f64));
        assert_eq!(oversample_1d(&v, 1).unwrap(), v);
        assert!(oversample_1d(&v, 0).is_err());
    }

    #[test]
    fn oversample_pure_tone_stays_on_bin() {
        let n = 32;
        let k = 5;
        let v = tone(k as f64 / n as f64, (0..n).map(|i| i as f64));
        let up = oversample_1d(&v, 4).unwrap();
        let expect = tone(k as f64 / (4 * n) as f64, (0..4 * n).map(|i| i as f64));
        assert!(relative_error(&up, &expect) < 1e-12);
        let spec = fft_vec(&up, Direction::Forward);
        let peak = spec
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap()
            .0;
        assert_eq!(peak, k);
    }

    /// Direct trigonometric-interpolant evaluation, O(n) per point.
    fn dirichlet_oracle(v: &[Complex64], t: f64) -> Complex64 {
        let n = v.len();
        let nf = n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let mut coef = Complex64::new(0.0, 0.0);
            for (i, x) in v.iter().enumerate() {
                coef += x * Complex64::from_polar(1.0, -2.0 * PI * (k * i) as f64 / nf);
            }
            let kk = k as f64;
            if n % 2 == 0 && k == n / 2 {
                acc += coef * 0.5 * (Complex64::from_polar(1.0, 2.0 * PI * kk * t / nf)
                    + Complex64::from_polar(1.0, -2.0 * PI * kk * t / nf));
            } else {
                let sk = if kk < nf / 2.0 { kk } else { kk - nf };
                acc += coef * Complex64::from_polar(1.0, 2.0 * PI * sk * t / nf);
            }
        }
        acc / nf
    }

    #[test]
    fn oversample_matches_dirichlet_interpolant() {
        for n in [12usize, 15] {
            let mut v = vec![Complex64::new(0.0, 0.0); n];
            for i in (0..n).step_by(4) {
                v[i] = Complex64::new(1.0, 0.0);
            }
            v[1] = Complex64::new(0.0, 0.5);
            let factor = 3;
            let up = oversample_1d(&v, factor).unwrap();
            for (j, z) in up.iter().enumerate() {
                let t = j as f64 / factor as f64;
                assert!((z - dirichlet_oracle(&v, t)).norm() < 1e-12, "n={n} j={j}");
            }
        }
    }

    proptest! {
        #[test]
        fn oversample_reproduces_samples_and_is_linear(
            a in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..40),
            factor in 1usize..6,
            s in -3.0f64..3.0,
        ) {
            let u: Vec<Complex64> = a.iter().map(|&(x, y)| Complex64::new(x, y)).collect();
            let w: Vec<Complex64> = a.iter().map(|&(x, y)| Complex64::new(y, -x)).collect();
            let up = oversample_1d(&u, factor).unwrap();
            prop_assert_eq!(up.len(), u.len() * factor);
            let strided: Vec<Complex64> = up.iter().step_by(factor).copied().collect();
            prop_assert!(relative_error(&strided, &u) < 1e-9);

            let mix: Vec<Complex64> = u.iter().zip(&w).map(|(x, y)| x * s + y * 2.0).collect();
            let lhs = oversample_1d(&mix, factor).unwrap();
            let uw = oversample_1d(&w, factor).unwrap();
            let rhs: Vec<Complex64> = up.iter().zip(&uw).map(|(x, y)| x * s + y * 2.0).collect();
            prop_assert!(relative_error(&lhs, &rhs) < 1e-10);
        }
    }
}
