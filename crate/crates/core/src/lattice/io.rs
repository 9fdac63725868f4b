//! Binary field format: `d` and `M` as little-endian u64, then one
//! `(re, im)` pair of little-endian f64 per site in window order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::LatticeField;
use super::window::LatticeWindow;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSidecar {
    pub dimension: usize,
    pub half_width: usize,
    pub site_count: usize,
    pub byte_order: String,
    pub layout: String,
    pub norm: f64,
    pub boundary_mass: f64,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub metadata: serde_json::Map<String, serde_json::Value>,
}

pub fn write_field<W: Write>(field: &LatticeField, mut out: W) -> Result<()> {
    let w = field.window();
    out.write_all(&(w.dim() as u64).to_le_bytes())?;
    out.write_all(&(w.half_width() as u64).to_le_bytes())?;
    for v in field.values() {
        out.write_all(&v.re.to_le_bytes())?;
        out.write_all(&v.im.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_field<R: Read>(mut input: R) -> Result<LatticeField> {
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    let d = u64::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    let m = u64::from_le_bytes(word) as usize;
    let window = LatticeWindow::new(d, m)?;
    let mut values = Vec::with_capacity(window.len());
    for _ in 0..window.len() {
        input.read_exact(&mut word)?;
        let re = f64::from_le_bytes(word);
        input.read_exact(&mut word)?;
        let im = f64::from_le_bytes(word);
        values.push(Complex64::new(re, im));
    }
    LatticeField::from_values(window, values)
}

/// Writes `<stem>.field` and `<stem>.json`, returning both paths.
pub fn save_field(
    field: &LatticeField,
    stem: &Path,
    metadata: serde_json::Map<String, serde_json::Value>,
) -> Result<(PathBuf, PathBuf)> {
    let bin = stem.with_extension("field");
    let json = stem.with_extension("json");
    write_field(field, BufWriter::new(File::create(&bin)?))?;
    let w = field.window();
    let sidecar = FieldSidecar {
        dimension: w.dim(),
        half_width: w.half_width(),
        site_count: w.len(),
        byte_order: "little-endian".into(),
        layout: "u64 d, u64 M, then (f64 re, f64 im) per site, row-major, last coordinate fastest".into(),
        norm: field.norm(),
        boundary_mass: field.boundary_mass(),
        metadata,
    };
    let mut f = BufWriter::new(File::create(&json)?);
    serde_json::to_writer_pretty(&mut f, &sidecar)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok((bin, json))
}

pub fn load_field(path: &Path) -> Result<LatticeField> {
    read_field(BufReader::new(File::open(path).map_err(Error::from)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_bytes() {
        let w = LatticeWindow::new(2, 3).unwrap();
        let f = LatticeField::from_fn(w, |j| Complex64::new(j[0] as f64 * 0.1, -(j[1] as f64)));
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 16 * w.len());
        assert_eq!(&buf[..8], &2u64.to_le_bytes());
        assert_eq!(read_field(buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn truncated_input_is_an_error() {
        let w = LatticeWindow::new(1, 3).unwrap();
        let mut buf = Vec::new();
        write_field(&LatticeField::delta(w), &mut buf).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(read_field(buf.as_slice()).is_err());
    }
}
