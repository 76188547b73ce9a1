//! Binary sinogram (`.vsl`) and volume (`.vsv`) files, and JSON helpers.
//!
//! Layout, all little-endian: 8-byte magic, u32 version, u32 flags, then
//! n (u32), λ (f64), n_angular (u32), n_t (u32), n_radial (u32),
//! radial rule (u32), t rule (u32), the direction coordinates, the axis
//! nodes (t for sinograms, radii for volumes) and the values in row-major
//! (direction-major) order.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use ndarray::Array2;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{make_grid, Grid, GridSpec, RadialRule, SliceData, SphereFunction, TRule};
use crate::harness::phantom::Phantom;
use crate::harness::report::SCHEMA_VERSION;

const SINOGRAM_MAGIC: &[u8; 8] = b"VSLICE\0S";
const VOLUME_MAGIC: &[u8; 8] = b"VSLICE\0V";
const FORMAT_VERSION: u32 = 1;
const FLAG_FULL: u32 = 1;

/// Which transform a sinogram holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    /// V₊, integration over the upper half of each slice.
    Hemispherical,
    /// V = 2V₊.
    Full,
}

struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, len: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Format("file is truncated".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn f64s(&mut self, count: usize) -> Result<Vec<f64>> {
        (0..count).map(|_| self.f64()).collect()
    }
}

fn encode(magic: &[u8; 8], flags: u32, grid: &Grid, axis: &[f64], values: &Array2<f64>) -> Vec<u8> {
    let spec = grid.spec();
    let mut w = Writer(Vec::with_capacity(64 + 8 * values.len()));
    w.0.extend_from_slice(magic);
    w.u32(FORMAT_VERSION);
    w.u32(flags);
    w.u32(spec.n as u32);
    w.f64(grid.lambda());
    w.u32(spec.n_angular as u32);
    w.u32(spec.n_t as u32);
    w.u32(spec.n_radial as u32);
    w.u32(match spec.radial_rule {
        RadialRule::GaussJacobi => 0,
        RadialRule::Uniform => 1,
    });
    w.u32(match spec.t_rule {
        TRule::GaussLegendre => 0,
        TRule::Chebyshev => 1,
    });
    for i in 0..grid.n_dirs() {
        for &c in grid.directions().point(i) {
            w.f64(c);
        }
    }
    for &a in axis {
        w.f64(a);
    }
    for &v in values.iter() {
        w.f64(v);
    }
    w.0
}

fn bitwise_equal(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

// returns grid, flags and values; `volume` selects the axis
fn decode(bytes: &[u8], magic: &[u8; 8], volume: bool) -> Result<(Arc<Grid>, u32, Array2<f64>)> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(8)? != magic {
        return Err(Error::Format("bad magic number".into()));
    }
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported format version {version}")));
    }
    let flags = r.u32()?;
    let n = r.u32()? as usize;
    let lambda = r.f64()?;
    let n_angular = r.u32()? as usize;
    let n_t = r.u32()? as usize;
    let n_radial = r.u32()? as usize;
    let radial_rule = match r.u32()? {
        0 => RadialRule::GaussJacobi,
        1 => RadialRule::Uniform,
        other => return Err(Error::Format(format!("unknown radial rule {other}"))),
    };
    let t_rule = match r.u32()? {
        0 => TRule::GaussLegendre,
        1 => TRule::Chebyshev,
        other => return Err(Error::Format(format!("unknown t rule {other}"))),
    };
    // λ = n/2 is stored explicitly but is the grid default
    let lambda = if lambda == n as f64 / 2.0 { None } else { Some(lambda) };
    let spec = GridSpec { n, n_angular, n_radial, n_t, radial_rule, t_rule, lambda };
    let grid = make_grid(&spec).map_err(|e| Error::Format(format!("header describes an invalid grid: {e}")))?;
    let dirs = r.f64s(grid.n_dirs() * n)?;
    let stored: Vec<f64> = (0..grid.n_dirs()).flat_map(|i| grid.directions().point(i).to_vec()).collect();
    let axis_nodes = if volume { grid.radii() } else { grid.t_nodes() };
    let axis = r.f64s(axis_nodes.len())?;
    if !bitwise_equal(&dirs, &stored) || !bitwise_equal(&axis, axis_nodes) {
        return Err(Error::Format("node coordinates differ from the grid rebuilt from the header".into()));
    }
    let shape = (grid.n_dirs(), axis_nodes.len());
    let values = r.f64s(shape.0 * shape.1)?;
    if r.pos != bytes.len() {
        return Err(Error::Format("trailing bytes after the value block".into()));
    }
    Ok((grid, flags, Array2::from_shape_vec(shape, values).expect("shape")))
}

pub fn encode_sinogram(data: &SliceData, transform: Transform) -> Vec<u8> {
    let flags = if transform == Transform::Full { FLAG_FULL } else { 0 };
    encode(SINOGRAM_MAGIC, flags, data.grid(), data.grid().t_nodes(), data.values())
}

pub fn decode_sinogram(bytes: &[u8]) -> Result<(SliceData, Transform)> {
    let (grid, flags, values) = decode(bytes, SINOGRAM_MAGIC, false)?;
    let transform = if flags & FLAG_FULL != 0 { Transform::Full } else { Transform::Hemispherical };
    Ok((SliceData::new(grid, values)?, transform))
}

pub fn encode_volume(f: &SphereFunction) -> Vec<u8> {
    encode(VOLUME_MAGIC, 0, f.grid(), f.grid().radii(), f.values())
}

pub fn decode_volume(bytes: &[u8]) -> Result<SphereFunction> {
    let (grid, _, values) = decode(bytes, VOLUME_MAGIC, true)?;
    SphereFunction::new(grid, values)
}

pub fn write_sinogram(path: &Path, data: &SliceData, transform: Transform) -> Result<()> {
    Ok(fs::write(path, encode_sinogram(data, transform))?)
}

pub fn read_sinogram(path: &Path) -> Result<(SliceData, Transform)> {
    decode_sinogram(&fs::read(path)?)
}

pub fn write_volume(path: &Path, f: &SphereFunction) -> Result<()> {
    Ok(fs::write(path, encode_volume(f))?)
}

pub fn read_volume(path: &Path) -> Result<SphereFunction> {
    decode_volume(&fs::read(path)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(fs::write(path, text)?)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Phantom description as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhantomFile {
    pub schema_version: u32,
    pub n: usize,
    pub phantom: Phantom,
}

impl PhantomFile {
    pub fn new(n: usize, phantom: Phantom) -> Self {
        Self { schema_version: SCHEMA_VERSION, n, phantom }
    }

    pub fn check_version(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Format(format!("unsupported schema version {}", self.schema_version)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xform::vslice_forward;

    fn grid() -> Arc<Grid> {
        make_grid(&GridSpec::default_for(2).unwrap().scaled(1, 8)).unwrap()
    }

    #[test]
    fn sinogram_round_trip_is_bitwise() {
        let g = grid();
        let data = vslice_forward(&|xp: &[f64], z: f64| 1.0 + xp[0] * z * z, &g);
        let bytes = encode_sinogram(&data, Transform::Full);
        let (back, transform) = decode_sinogram(&bytes).unwrap();
        assert_eq!(transform, Transform::Full);
        assert!(bitwise_equal(back.values().as_slice().unwrap(), data.values().as_slice().unwrap()));
        assert_eq!(back.grid().spec(), g.spec());
    }

    #[test]
    fn corrupted_files_are_rejected() {
        let g = grid();
        let bytes = encode_sinogram(&SliceData::zeros(g.clone()), Transform::Hemispherical);
        assert!(matches!(decode_sinogram(&bytes[..bytes.len() - 3]), Err(Error::Format(_))));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode_sinogram(&bad), Err(Error::Format(_))));
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(matches!(decode_sinogram(&extra), Err(Error::Format(_))));
        // a volume is not a sinogram
        let vol = encode_volume(&SphereFunction::zeros(g));
        assert!(matches!(decode_sinogram(&vol), Err(Error::Format(_))));
        assert!(decode_volume(&vol).is_ok());
    }
}
