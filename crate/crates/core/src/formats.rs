//! Binary dumps of phase histories (`VSARPH1`) and complex images (`VSARIM1`).
//!
//! Both are little-endian: an 8-byte magic, a fixed header, then samples as
//! interleaved `f32` (re, im) pairs in row-major order. Samples are quantized
//! to `f32` on write, so `read(write(x))` is the quantized matrix and a second
//! write reproduces the first byte for byte.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::dsp::ComplexMatrix;
use crate::echo::{PhaseHistory, RvpState};
use crate::error::{Result, VsarError};
use crate::geometry::{FrameGeometry, RadarParams};
use crate::image::ComplexImage;

pub const PHASE_HISTORY_MAGIC: &[u8; 8] = b"VSARPH1\0";
pub const IMAGE_MAGIC: &[u8; 8] = b"VSARIM1\0";

fn io_err(e: std::io::Error) -> VsarError {
    VsarError::Format(e.to_string())
}

fn write_samples<W: Write>(w: &mut W, m: &ComplexMatrix) -> Result<()> {
    let mut buf = Vec::with_capacity(m.as_slice().len() * 8);
    for z in m.as_slice() {
        buf.extend_from_slice(&(z.re as f32).to_le_bytes());
        buf.extend_from_slice(&(z.im as f32).to_le_bytes());
    }
    w.write_all(&buf).map_err(io_err)
}

fn read_samples<R: Read>(r: &mut R, rows: usize, cols: usize) -> Result<ComplexMatrix> {
    let n = rows
        .checked_mul(cols)
        .ok_or_else(|| VsarError::Format("dimensions overflow".into()))?;
    let mut buf = vec![0u8; n * 8];
    r.read_exact(&mut buf).map_err(io_err)?;
    let data = buf
        .chunks_exact(8)
        .map(|b| {
            let re = f32::from_le_bytes([b[0], b[1], b[2], b[3]]);
            let im = f32::from_le_bytes([b[4], b[5], b[6], b[7]]);
            Complex64::new(re as f64, im as f64)
        })
        .collect();
    ComplexMatrix::new(rows, cols, data)
}

fn read_magic<R: Read>(r: &mut R, magic: &[u8; 8]) -> Result<()> {
    let mut m = [0u8; 8];
    r.read_exact(&mut m).map_err(io_err)?;
    if &m != magic {
        return Err(VsarError::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&m),
            String::from_utf8_lossy(magic)
        )));
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(io_err)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(io_err)?;
    Ok(f64::from_le_bytes(b))
}

fn to_u32(v: usize, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| VsarError::Format(format!("{what} {v} does not fit in u32")))
}

pub fn write_phase_history<W: Write>(w: &mut W, ph: &PhaseHistory) -> Result<()> {
    let p = ph.params();
    let g = ph.geometry();
    let mut head = Vec::with_capacity(8 + 9 + 11 * 8);
    head.extend_from_slice(PHASE_HISTORY_MAGIC);
    head.extend_from_slice(&to_u32(ph.matrix().rows(), "n_pulses")?.to_le_bytes());
    head.extend_from_slice(&to_u32(ph.matrix().cols(), "n_fast")?.to_le_bytes());
    head.push(match ph.rvp_state() {
        RvpState::Raw => 0,
        RvpState::Removed => 1,
    });
    for v in [
        p.carrier_hz(),
        p.bandwidth_hz(),
        p.sample_rate_hz(),
        p.pulse_width_s(),
        p.prf_hz(),
        p.speed_of_light(),
        g.slant_range_m(),
        g.grazing_rad(),
        g.speed_m_per_s(),
        g.center_azimuth_rad(),
        g.angle_step_rad(),
    ] {
        head.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&head).map_err(io_err)?;
    write_samples(w, ph.matrix())
}

pub fn read_phase_history<R: Read>(r: &mut R) -> Result<PhaseHistory> {
    read_magic(r, PHASE_HISTORY_MAGIC)?;
    let rows = read_u32(r)? as usize;
    let cols = read_u32(r)? as usize;
    let mut state = [0u8; 1];
    r.read_exact(&mut state).map_err(io_err)?;
    let state = match state[0] {
        0 => RvpState::Raw,
        1 => RvpState::Removed,
        other => return Err(VsarError::Format(format!("unknown rvp_state byte {other}"))),
    };
    let mut v = [0.0; 11];
    for x in v.iter_mut() {
        *x = read_f64(r)?;
    }
    let p = RadarParams::new(v[0], v[1], v[2], v[3], v[4], v[5])?;
    let g = FrameGeometry::with_angle_step(v[6], v[7], v[8], v[9], rows, v[10])?;
    let m = read_samples(r, rows, cols)?;
    PhaseHistory::new(m, p, g, state)
}

pub fn write_image<W: Write>(w: &mut W, img: &ComplexImage) -> Result<()> {
    let mut head = Vec::with_capacity(8 + 8 + 24);
    head.extend_from_slice(IMAGE_MAGIC);
    head.extend_from_slice(&to_u32(img.rows(), "rows")?.to_le_bytes());
    head.extend_from_slice(&to_u32(img.cols(), "cols")?.to_le_bytes());
    for v in [img.dx_m(), img.dy_m(), img.theta_k_rad()] {
        head.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&head).map_err(io_err)?;
    write_samples(w, img.matrix())
}

pub fn read_image<R: Read>(r: &mut R) -> Result<ComplexImage> {
    read_magic(r, IMAGE_MAGIC)?;
    let rows = read_u32(r)? as usize;
    let cols = read_u32(r)? as usize;
    let dx = read_f64(r)?;
    let dy = read_f64(r)?;
    let theta = read_f64(r)?;
    let m = read_samples(r, rows, cols)?;
    ComplexImage::new(m, dx, dy, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::echo::simulate;
    use crate::geometry::Scene;

    fn sample_history() -> PhaseHistory {
        let p = RadarParams::table1();
        let g = FrameGeometry::new(&p, 2500.0, 0.7, 100.0, 0.3, 8).unwrap();
        simulate(&Scene::default_grid(), &p, &g, RvpState::Raw).unwrap()
    }

    #[test]
    fn phase_history_round_trip_is_stable_after_quantization() {
        let ph = sample_history();
        let mut a = Vec::new();
        write_phase_history(&mut a, &ph).unwrap();
        assert_eq!(&a[..8], PHASE_HISTORY_MAGIC);
        assert_eq!(a.len(), 8 + 9 + 88 + ph.matrix().as_slice().len() * 8);
        let back = read_phase_history(&mut a.as_slice()).unwrap();
        assert_eq!(back.params(), ph.params());
        assert_eq!(back.geometry(), ph.geometry());
        assert_eq!(back.rvp_state(), RvpState::Raw);
        for (x, y) in back.matrix().as_slice().iter().zip(ph.matrix().as_slice()) {
            assert_eq!(x.re, y.re as f32 as f64);
            assert_eq!(x.im, y.im as f32 as f64);
        }
        let mut b = Vec::new();
        write_phase_history(&mut b, &back).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn image_round_trip() {
        let m = ComplexMatrix::from_fn(3, 4, |r, c| Complex64::new(r as f64 * 0.5, -(c as f64))).unwrap();
        let img = ComplexImage::new(m, 0.08, 0.09, 0.785).unwrap();
        let mut a = Vec::new();
        write_image(&mut a, &img).unwrap();
        let back = read_image(&mut a.as_slice()).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        let ph = sample_history();
        let mut a = Vec::new();
        write_phase_history(&mut a, &ph).unwrap();
        let mut bad = a.clone();
        bad[0] = b'X';
        assert!(matches!(read_phase_history(&mut bad.as_slice()), Err(VsarError::Format(_))));
        a.truncate(a.len() - 3);
        assert!(matches!(read_phase_history(&mut a.as_slice()), Err(VsarError::Format(_))));
        assert!(read_image(&mut &b"VSARPH1\0"[..]).is_err());
    }
}
