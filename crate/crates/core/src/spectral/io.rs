//! Binary field files (`HMF1`) with a JSON sidecar.
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic      4 bytes  "HMF1"
//! n          u32
//! L          f64
//! ncomp      u32
//! layout     u32      1 = one spectral slice, 2 = space-time
//! [layout 2] n_t u32, t_final f64
//! payload    (re f64, im f64) per coefficient, component-major,
//!            row-major FFT index order; slices in time order for layout 2
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::SpectralField;
use super::grid::Grid;
use crate::error::{Error, Result};
use crate::spacetime::SpaceTimeField;

pub const MAGIC: &[u8; 4] = b"HMF1";
pub const LAYOUT_SLICE: u32 = 1;
pub const LAYOUT_SPACETIME: u32 = 2;

/// Metadata written next to every field file as `<file>.json`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Sidecar {
    pub n: usize,
    pub box_length: f64,
    pub ncomp: usize,
    pub layout: String,
    pub operation: String,
    pub provenance: serde_json::Value,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn header(out: &mut Vec<u8>, grid: &Grid, ncomp: usize, layout: u32) {
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(grid.n() as u32).to_le_bytes());
    out.extend_from_slice(&grid.box_length().to_le_bytes());
    out.extend_from_slice(&(ncomp as u32).to_le_bytes());
    out.extend_from_slice(&layout.to_le_bytes());
}

fn payload(out: &mut Vec<u8>, f: &SpectralField) {
    for z in f.coeffs() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(bytes).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_sidecar(path: &Path, sc: &Sidecar) -> Result<()> {
    let p = sidecar_path(path);
    let text = serde_json::to_string_pretty(sc).map_err(|e| Error::Format(e.to_string()))?;
    std::fs::write(&p, text).map_err(|e| Error::io(&p, e))
}

pub fn write_field(path: &Path, f: &SpectralField, operation: &str, provenance: serde_json::Value) -> Result<()> {
    let mut bytes = Vec::with_capacity(24 + 16 * f.coeffs().len());
    header(&mut bytes, f.grid(), f.ncomp(), LAYOUT_SLICE);
    payload(&mut bytes, f);
    write_bytes(path, &bytes)?;
    write_sidecar(
        path,
        &Sidecar {
            n: f.grid().n(),
            box_length: f.grid().box_length(),
            ncomp: f.ncomp(),
            layout: "slice".into(),
            operation: operation.into(),
            provenance,
        },
    )
}

pub fn write_spacetime(path: &Path, f: &SpaceTimeField, operation: &str, provenance: serde_json::Value) -> Result<()> {
    let mut bytes = Vec::new();
    header(&mut bytes, f.grid(), f.ncomp(), LAYOUT_SPACETIME);
    bytes.extend_from_slice(&(f.n_t() as u32).to_le_bytes());
    bytes.extend_from_slice(&f.t_final().to_le_bytes());
    for s in f.slices() {
        payload(&mut bytes, s);
    }
    write_bytes(path, &bytes)?;
    write_sidecar(
        path,
        &Sidecar {
            n: f.grid().n(),
            box_length: f.grid().box_length(),
            ncomp: f.ncomp(),
            layout: "spacetime".into(),
            operation: operation.into(),
            provenance,
        },
    )
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        if self.pos + k > self.buf.len() {
            return Err(Error::Format(format!("truncated file at byte {}", self.pos)));
        }
        let s = &self.buf[self.pos..self.pos + k];
        self.pos += k;
        Ok(s)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn coeffs(&mut self, count: usize) -> Result<Vec<Complex64>> {
        let raw = self.take(16 * count)?;
        Ok(raw
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect())
    }
}

enum Parsed {
    Slice(SpectralField),
    SpaceTime(SpaceTimeField),
}

fn parse(buf: &[u8]) -> Result<Parsed> {
    let mut c = Cursor { buf, pos: 0 };
    if c.take(4)? != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let n = c.u32()? as usize;
    let l = c.f64()?;
    let ncomp = c.u32()? as usize;
    let layout = c.u32()?;
    let grid = Grid::new(n, l).map_err(|e| Error::Format(e.to_string()))?;
    if !matches!(ncomp, 1 | 3 | 9) {
        return Err(Error::Format(format!("bad component count {ncomp}")));
    }
    let count = ncomp * grid.len();
    let out = match layout {
        LAYOUT_SLICE => {
            let f = SpectralField::from_coeffs(&grid, ncomp, c.coeffs(count)?).map_err(|e| Error::Format(e.to_string()))?;
            Parsed::Slice(f)
        }
        LAYOUT_SPACETIME => {
            let n_t = c.u32()? as usize;
            let t_final = c.f64()?;
            let mut slices = Vec::with_capacity(n_t);
            for _ in 0..n_t {
                slices.push(SpectralField::from_coeffs(&grid, ncomp, c.coeffs(count)?).map_err(|e| Error::Format(e.to_string()))?);
            }
            Parsed::SpaceTime(SpaceTimeField::new(t_final, slices).map_err(|e| Error::Format(e.to_string()))?)
        }
        other => return Err(Error::Format(format!("unknown layout tag {other}"))),
    };
    if c.pos != buf.len() {
        return Err(Error::Format(format!("{} trailing bytes", buf.len() - c.pos)));
    }
    Ok(out)
}

fn read_all(path: &Path) -> Result<Vec<u8>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut buf = Vec::new();
    BufReader::new(file).read_to_end(&mut buf).map_err(|e| Error::io(path, e))?;
    Ok(buf)
}

/// Read a single-slice field. Solenoidal flag is restored when the data allows it.
pub fn read_field(path: &Path) -> Result<SpectralField> {
    match parse(&read_all(path)?)? {
        Parsed::Slice(mut f) => {
            if f.ncomp() == 3 {
                let _ = f.mark_solenoidal();
            }
            Ok(f)
        }
        Parsed::SpaceTime(_) => Err(Error::Format("expected a single slice, found space-time layout".into())),
    }
}

pub fn read_spacetime(path: &Path) -> Result<SpaceTimeField> {
    match parse(&read_all(path)?)? {
        Parsed::SpaceTime(f) => Ok(f),
        Parsed::Slice(_) => Err(Error::Format("expected space-time layout, found a single slice".into())),
    }
}

pub fn read_sidecar(path: &Path) -> Result<Sidecar> {
    let p = sidecar_path(path);
    let text = std::fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(e.to_string()))
}
