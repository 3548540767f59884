//! Focused complex images.

use serde::{Deserialize, Serialize};

use crate::dsp::{shifted_zero_index, ComplexMatrix};
use crate::error::{Result, VsarError};

/// Which focuser produced an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Cs,
    Interp,
    Oracle,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Cs => "cs",
            Method::Interp => "interp",
            Method::Oracle => "oracle",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = VsarError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cs" => Ok(Method::Cs),
            "interp" => Ok(Method::Interp),
            "oracle" => Ok(Method::Oracle),
            other => Err(VsarError::InvalidParameter {
                name: "method",
                reason: format!("unknown method `{other}` (expected cs, interp or oracle)"),
            }),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Focused image in the frame rotated to `theta_k`.
///
/// Rows run along the frame's cross-range axis `y'` and columns along its
/// range axis `x'`. The scene centre sits at
/// `(shifted_zero_index(rows), shifted_zero_index(cols))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexImage {
    matrix: ComplexMatrix,
    dx_m: f64,
    dy_m: f64,
    theta_k_rad: f64,
}

impl ComplexImage {
    pub fn new(matrix: ComplexMatrix, dx_m: f64, dy_m: f64, theta_k_rad: f64) -> Result<Self> {
        for (name, v) in [("dx_m", dx_m), ("dy_m", dy_m)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(VsarError::InvalidParameter {
                    name,
                    reason: format!("pixel spacing must be positive, got {v}"),
                });
            }
        }
        if !theta_k_rad.is_finite() {
            return Err(VsarError::InvalidParameter {
                name: "theta_k_rad",
                reason: "must be finite".into(),
            });
        }
        Ok(Self {
            matrix,
            dx_m,
            dy_m,
            theta_k_rad,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }
    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }
    /// Range (column) pixel spacing, m.
    pub fn dx_m(&self) -> f64 {
        self.dx_m
    }
    /// Cross-range (row) pixel spacing, m.
    pub fn dy_m(&self) -> f64 {
        self.dy_m
    }
    pub fn theta_k_rad(&self) -> f64 {
        self.theta_k_rad
    }

    /// Image-frame coordinates of a (possibly fractional) pixel position.
    pub fn pixel_to_xy(&self, row: f64, col: f64) -> (f64, f64) {
        let r0 = shifted_zero_index(self.rows()) as f64;
        let c0 = shifted_zero_index(self.cols()) as f64;
        ((col - c0) * self.dx_m, (row - r0) * self.dy_m)
    }

    /// Fractional pixel position `(row, col)` of image-frame coordinates.
    pub fn xy_to_pixel(&self, x: f64, y: f64) -> (f64, f64) {
        let r0 = shifted_zero_index(self.rows()) as f64;
        let c0 = shifted_zero_index(self.cols()) as f64;
        (r0 + y / self.dy_m, c0 + x / self.dx_m)
    }
}
