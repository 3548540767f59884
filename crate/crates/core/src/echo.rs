//! Dechirped point-target phase histories for one frame.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dsp::ComplexMatrix;
use crate::error::{Result, VsarError};
use crate::geometry::{
    delta_range_exact, delta_range_planar, frame_pulse_angles, FrameGeometry, PointTarget,
    RadarParams, Scene,
};

/// Whether the residual video phase is still present in the samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RvpState {
    Raw,
    Removed,
}

impl RvpState {
    pub fn name(self) -> &'static str {
        match self {
            RvpState::Raw => "raw",
            RvpState::Removed => "removed",
        }
    }
}

/// Differential-range model used when synthesizing echoes.
///
/// `Planar` exists so oracle tests can build histories whose phase is exactly
/// linear in target position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeModel {
    #[default]
    Exact,
    Planar,
}

/// Phase history of one frame, `[pulses x fast-time samples]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseHistory {
    matrix: ComplexMatrix,
    tau_hat: Vec<f64>,
    theta: Vec<f64>,
    params: RadarParams,
    geom: FrameGeometry,
    rvp_state: RvpState,
}

impl PhaseHistory {
    pub fn new(
        matrix: ComplexMatrix,
        params: RadarParams,
        geom: FrameGeometry,
        rvp_state: RvpState,
    ) -> Result<Self> {
        let expect = (geom.n_pulses(), params.n_fast());
        if matrix.shape() != expect {
            return Err(VsarError::ShapeMismatch {
                rows: expect.0,
                cols: expect.1,
                len: matrix.rows() * matrix.cols(),
            });
        }
        Ok(Self {
            matrix,
            tau_hat: params.fast_time_axis(),
            theta: frame_pulse_angles(&geom),
            params,
            geom,
            rvp_state,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
    pub fn tau_hat(&self) -> &[f64] {
        &self.tau_hat
    }
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }
    pub fn params(&self) -> &RadarParams {
        &self.params
    }
    pub fn geometry(&self) -> &FrameGeometry {
        &self.geom
    }
    pub fn rvp_state(&self) -> RvpState {
        self.rvp_state
    }

    /// Same axes and metadata, new samples.
    pub(crate) fn with_matrix(&self, matrix: ComplexMatrix, rvp_state: RvpState) -> Self {
        debug_assert_eq!(matrix.shape(), self.matrix.shape());
        Self {
            matrix,
            tau_hat: self.tau_hat.clone(),
            theta: self.theta.clone(),
            params: self.params,
            geom: self.geom,
            rvp_state,
        }
    }

    /// Adds circular complex white Gaussian noise at `snr_db` relative to the
    /// mean sample power (unit power when the history is all zero).
    pub fn with_noise(&self, snr_db: f64, seed: u64) -> Result<Self> {
        if !snr_db.is_finite() {
            return Err(VsarError::InvalidParameter {
                name: "snr_db",
                reason: "must be finite".into(),
            });
        }
        let n = (self.matrix.rows() * self.matrix.cols()) as f64;
        let mut signal_power = self.matrix.energy() / n;
        if signal_power == 0.0 {
            signal_power = 1.0;
        }
        let sigma = (signal_power * 10f64.powf(-snr_db / 10.0) / 2.0).sqrt();
        let normal = Normal::new(0.0, sigma).map_err(|e| VsarError::InvalidParameter {
            name: "snr_db",
            reason: e.to_string(),
        })?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<Complex64> = self
            .matrix
            .as_slice()
            .iter()
            .map(|z| z + Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng)))
            .collect();
        let m = ComplexMatrix::new(self.matrix.rows(), self.matrix.cols(), data)?;
        Ok(self.with_matrix(m, self.rvp_state))
    }
}

/// Simulates the dechirped echo of `scene` with the exact range model.
///
/// `Removed` yields the RVP-free history; `Raw` additionally carries the
/// residual video phase `exp(+j 4 pi K dR^2 / c^2)`.
pub fn simulate(
    scene: &Scene,
    p: &RadarParams,
    g: &FrameGeometry,
    state: RvpState,
) -> Result<PhaseHistory> {
    simulate_with(scene, p, g, state, RangeModel::Exact)
}

pub fn simulate_with(
    scene: &Scene,
    p: &RadarParams,
    g: &FrameGeometry,
    state: RvpState,
    model: RangeModel,
) -> Result<PhaseHistory> {
    scene.validate()?;
    let tau = p.fast_time_axis();
    let theta = frame_pulse_angles(g);
    let c = p.speed_of_light();
    let k = p.chirp_rate();
    // slack keeps the boundary samples against rounding in dR
    let half_tr = p.pulse_width_s() / 2.0 * (1.0 + 1e-9);
    let kw = 4.0 * PI / c;
    let rvp = 4.0 * PI * k / (c * c);
    let targets: &[PointTarget] = &scene.targets;

    let m = ComplexMatrix::from_fn(g.n_pulses(), p.n_fast(), |n, col| {
        let t = tau[col];
        let mut acc = Complex64::new(0.0, 0.0);
        for tg in targets {
            let dr = match model {
                RangeModel::Exact => delta_range_exact(g, tg, theta[n]),
                RangeModel::Planar => delta_range_planar(g, tg, theta[n]),
            };
            if (t - 2.0 * dr / c).abs() > half_tr {
                continue;
            }
            let mut phase = -kw * (p.carrier_hz() + k * t) * dr;
            if state == RvpState::Raw {
                phase += rvp * dr * dr;
            }
            acc += Complex64::from_polar(tg.amplitude, phase);
        }
        acc
    })?;
    PhaseHistory::new(m, *p, *g, state)
}
