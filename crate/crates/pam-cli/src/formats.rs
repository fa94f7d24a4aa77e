//! Binary file formats for RF frames and energy maps, plus a grayscale
//! renderer. All numeric payloads are little-endian; samples are stored as
//! 32-bit IEEE-754, so file-level round-trips are bitwise lossless and
//! frame-level round-trips are lossless for f32-representable data (which
//! includes anything previously read from a file).
//!
//! RF layout (64-byte header, then channel-major f32 samples):
//!
//! ```text
//! offset  size  field
//!      0     8  magic "PAMRF\0\0\0"
//!      8     4  version = 1 (u32)
//!     12     4  array model tag (u32)
//!     16     4  n_channels (u32)
//!     20     4  n_samples (u32)
//!     24     8  sample_rate, Hz (f64)
//!     32     8  speed of sound, m/s (f64)
//!     40     8  density, kg/m^3 (f64)
//!     48     8  t_start, s (f64)
//!     56     8  seed (u64)
//! ```
//!
//! Map layout (56-byte header, then row-major-in-z f32 values):
//!
//! ```text
//! offset  size  field
//!      0     8  magic "PAMMAP\0\0"
//!      8     4  version = 1 (u32)
//!     12     4  method tag (u32)
//!     16     4  nx (u32)
//!     20     4  nz (u32)
//!     24    32  x0, z0, dx, dz, m (f64 each)
//! ```

use crate::error::{CliError, Result};
use ndarray::Array2;
use pam_core::arrays::{ArrayModel, ImagingGrid, Medium};
use pam_core::beamform::{EnergyMap, Method};
use pam_core::cavsim::RFFrame;
use std::path::Path;

const RF_MAGIC: &[u8; 8] = b"PAMRF\0\0\0";
const MAP_MAGIC: &[u8; 8] = b"PAMMAP\0\0";
const FORMAT_VERSION: u32 = 1;

/// Sequential reader over a loaded file that reports byte offsets in its
/// errors.
struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    path: String,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(CliError::Format(format!(
                "{}: truncated at byte offset {}: {what} needs {n} bytes, {} remain",
                self.path,
                self.pos,
                self.buf.len() - self.pos
            )));
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn magic(&mut self, expect: &[u8; 8], kind: &str) -> Result<()> {
        let got = self.take(8, "magic")?;
        if got != expect {
            return Err(CliError::Format(format!(
                "{}: not a {kind} file (bad magic at byte offset 0)",
                self.path
            )));
        }
        Ok(())
    }

    fn version(&mut self) -> Result<()> {
        let at = self.pos;
        let v = self.u32("version")?;
        if v != FORMAT_VERSION {
            return Err(CliError::Format(format!(
                "{}: unsupported version {v} at byte offset {at} (expected {FORMAT_VERSION})",
                self.path
            )));
        }
        Ok(())
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    /// Reads exactly `count` f32 payload values and requires the file to
    /// end there.
    fn f32_payload(&mut self, count: usize, what: &str) -> Result<Vec<f64>> {
        let bytes = self.take(4 * count, what)?;
        if self.pos != self.buf.len() {
            return Err(CliError::Format(format!(
                "{}: {} trailing bytes after the payload at byte offset {}",
                self.path,
                self.buf.len() - self.pos,
                self.pos
            )));
        }
        Ok(bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect())
    }
}

fn load(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path)
        .map_err(|e| CliError::Format(format!("cannot read {}: {e}", path.display())))
}

fn store(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// Writes an RF frame; samples narrow to f32.
pub fn write_rf(frame: &RFFrame, path: &Path) -> Result<()> {
    let (n, t) = (frame.n_channels(), frame.n_samples());
    let mut out = Vec::with_capacity(64 + 4 * n * t);
    out.extend_from_slice(RF_MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&frame.model.tag().to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&(t as u32).to_le_bytes());
    out.extend_from_slice(&frame.sample_rate.to_le_bytes());
    out.extend_from_slice(&frame.medium.sos.to_le_bytes());
    out.extend_from_slice(&frame.medium.density.to_le_bytes());
    out.extend_from_slice(&frame.t_start.to_le_bytes());
    out.extend_from_slice(&frame.seed.to_le_bytes());
    for j in 0..n {
        for i in 0..t {
            out.extend_from_slice(&(frame.data[[j, i]] as f32).to_le_bytes());
        }
    }
    store(path, &out)
}

/// Reads an RF frame written by [`write_rf`].
pub fn read_rf(path: &Path) -> Result<RFFrame> {
    let buf = load(path)?;
    let mut r = Reader {
        buf: &buf,
        pos: 0,
        path: path.display().to_string(),
    };
    r.magic(RF_MAGIC, "pam RF")?;
    r.version()?;
    let model_at = r.pos;
    let model = ArrayModel::from_tag(r.u32("array model")?).map_err(|e| {
        CliError::Format(format!("{}: {e} at byte offset {model_at}", path.display()))
    })?;
    let n = r.u32("channel count")? as usize;
    let t = r.u32("sample count")? as usize;
    let sample_rate = r.f64("sample rate")?;
    let sos = r.f64("speed of sound")?;
    let density = r.f64("density")?;
    let t_start = r.f64("start time")?;
    let seed = r.u64("seed")?;
    if n == 0 || t == 0 {
        return Err(CliError::Format(format!(
            "{}: empty frame ({n} channels x {t} samples)",
            path.display()
        )));
    }
    let medium = Medium::new(sos, density).map_err(|e| {
        CliError::Format(format!("{}: bad medium in header: {e}", path.display()))
    })?;
    let flat = r.f32_payload(n * t, "sample payload")?;
    Ok(RFFrame {
        model,
        data: Array2::from_shape_vec((n, t), flat).expect("shape checked above"),
        sample_rate,
        t_start,
        medium,
        seed,
    })
}

/// Writes an energy map; values narrow to f32.
pub fn write_map(map: &EnergyMap, path: &Path) -> Result<()> {
    let g = &map.grid;
    if g.is_empty() {
        return Err(CliError::Format(format!(
            "refusing to write {}: map grid has zero size ({} x {})",
            path.display(),
            g.nx,
            g.nz
        )));
    }
    let mut out = Vec::with_capacity(56 + 4 * g.len());
    out.extend_from_slice(MAP_MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&map.method.tag().to_le_bytes());
    out.extend_from_slice(&(g.nx as u32).to_le_bytes());
    out.extend_from_slice(&(g.nz as u32).to_le_bytes());
    out.extend_from_slice(&g.x0.to_le_bytes());
    out.extend_from_slice(&g.z0.to_le_bytes());
    out.extend_from_slice(&g.dx.to_le_bytes());
    out.extend_from_slice(&g.dz.to_le_bytes());
    for iz in 0..g.nz {
        for ix in 0..g.nx {
            out.extend_from_slice(&(map.values[[iz, ix]] as f32).to_le_bytes());
        }
    }
    store(path, &out)
}

/// Reads an energy map written by [`write_map`].
pub fn read_map(path: &Path) -> Result<EnergyMap> {
    let buf = load(path)?;
    let mut r = Reader {
        buf: &buf,
        pos: 0,
        path: path.display().to_string(),
    };
    r.magic(MAP_MAGIC, "pam map")?;
    r.version()?;
    let method_at = r.pos;
    let method = Method::from_tag(r.u32("method")?).map_err(|e| {
        CliError::Format(format!("{}: {e} at byte offset {method_at}", path.display()))
    })?;
    let nx = r.u32("nx")? as usize;
    let nz = r.u32("nz")? as usize;
    let x0 = r.f64("x0")?;
    let z0 = r.f64("z0")?;
    let dx = r.f64("dx")?;
    let dz = r.f64("dz")?;
    if nx == 0 || nz == 0 {
        return Err(CliError::Format(format!(
            "{}: empty map grid ({nx} x {nz})",
            path.display()
        )));
    }
    let flat = r.f32_payload(nx * nz, "map payload")?;
    Ok(EnergyMap {
        grid: ImagingGrid {
            x0,
            z0,
            nx,
            nz,
            dx,
            dz,
        },
        values: Array2::from_shape_vec((nz, nx), flat).expect("shape checked above"),
        method,
    })
}

/// Renders a map as an 8-bit binary portable graymap with logarithmic
/// compression: pixel = 255 * clamp(1 + (10 log10(v / max)) / dyn_range, 0, 1),
/// rounded half-up, so the peak maps to 255 and everything at or below
/// -dyn_range dB maps to 0. An all-zero map renders black with a warning.
pub fn render_map(map: &EnergyMap, dyn_range_db: f64, path: &Path) -> Result<()> {
    if !(dyn_range_db > 0.0) {
        return Err(CliError::Config(format!(
            "dynamic range must be positive, got {dyn_range_db} dB"
        )));
    }
    let g = &map.grid;
    let max = map.max_value();
    let mut out = format!("P5\n{} {}\n255\n", g.nx, g.nz).into_bytes();
    if max <= 0.0 {
        eprintln!(
            "warning: map for {} has no positive energy; rendering black",
            path.display()
        );
        out.resize(out.len() + g.len(), 0);
        return store(path, &out);
    }
    for iz in 0..g.nz {
        for ix in 0..g.nx {
            let v = map.values[[iz, ix]];
            let rel = 1.0 + 10.0 * (v / max).log10() / dyn_range_db;
            out.push((255.0 * rel.clamp(0.0, 1.0) + 0.5).floor() as u8);
        }
    }
    store(path, &out)
}
