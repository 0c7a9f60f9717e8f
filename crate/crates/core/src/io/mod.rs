//! On-disk formats.
//!
//! Datasets are directories holding a small `header.txt` plus raw
//! little-endian float32 planes, row-major:
//!
//! - **T3 dataset** (`format=t3`): planes `T11 T22 T33 T12_re T12_im T13_re
//!   T13_im T23_re T23_im`, one `<name>.f32` file each; diagonal planes must
//!   be non-negative.
//! - **SLC dataset** (`format=slc`): planes `hh_re hh_im hv_re hv_im vv_re
//!   vv_im`.
//! - **H/A/alpha export** (`format=haa`): planes `H A alpha`, no-data
//!   pixels written as -1.
//!
//! Masks and class maps travel as binary PGM/PPM (see [`pnm`]), models as
//! plain text (see [`model`]), pipeline configuration as flat `key=value`
//! text (see [`config`]).

pub mod config;
pub mod model;
pub mod pnm;

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::decomposition::HaaRaster;
use crate::error::{Error, Result};
use crate::speckle::SlcRaster;
use crate::types::{CoherencyRaster, HermitianMatrix3, ScatteringSample};

pub const T3_PLANES: [&str; 9] = [
    "T11", "T22", "T33", "T12_re", "T12_im", "T13_re", "T13_im", "T23_re", "T23_im",
];

pub const SLC_PLANES: [&str; 6] = ["hh_re", "hh_im", "hv_re", "hv_im", "vv_re", "vv_im"];

pub const HAA_PLANES: [&str; 3] = ["H", "A", "alpha"];

/// No-data marker in H/A/alpha exports (all three live in non-negative ranges).
pub const HAA_NO_DATA: f32 = -1.0;

struct Header {
    format: String,
    width: usize,
    height: usize,
    looks: u32,
}

fn header_path(dir: &Path) -> PathBuf {
    dir.join("header.txt")
}

fn plane_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("{name}.f32"))
}

fn write_header(dir: &Path, format: &str, width: usize, height: usize, looks: u32) -> Result<()> {
    let path = header_path(dir);
    let text = format!(
        "format={format}\nwidth={width}\nheight={height}\nlooks={looks}\nbyteorder=little\n"
    );
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

fn read_header(dir: &Path) -> Result<Header> {
    let path = header_path(dir);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut format = None;
    let mut width = None;
    let mut height = None;
    let mut looks = None;
    let mut offset = 0u64;
    for line in text.lines() {
        let line_offset = offset;
        offset += line.len() as u64 + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed
            .split_once('=')
            .ok_or_else(|| Error::format(&path, line_offset, format!("expected key=value, got '{trimmed}'")))?;
        let bad = |what: &str| Error::format(&path, line_offset, format!("bad {what} value '{value}'"));
        match key {
            "format" => format = Some(value.to_string()),
            "width" => width = Some(value.parse().map_err(|_| bad("width"))?),
            "height" => height = Some(value.parse().map_err(|_| bad("height"))?),
            "looks" => looks = Some(value.parse().map_err(|_| bad("looks"))?),
            "byteorder" => {
                if value != "little" {
                    return Err(Error::format(
                        &path,
                        line_offset,
                        format!("unsupported byte order '{value}'"),
                    ));
                }
            }
            other => {
                return Err(Error::format(
                    &path,
                    line_offset,
                    format!("unknown header key '{other}'"),
                ))
            }
        }
    }
    let missing = |what: &str| Error::format(&path, 0, format!("missing header key '{what}'"));
    let header = Header {
        format: format.ok_or_else(|| missing("format"))?,
        width: width.ok_or_else(|| missing("width"))?,
        height: height.ok_or_else(|| missing("height"))?,
        looks: looks.ok_or_else(|| missing("looks"))?,
    };
    header
        .width
        .checked_mul(header.height)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::format(&path, 0, "raster dimensions overflow"))?;
    Ok(header)
}

fn write_plane(path: &Path, data: &[f32]) -> Result<()> {
    let mut bytes = Vec::with_capacity(data.len() * 4);
    for v in data {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn read_plane(path: &Path, expected_len: usize) -> Result<Vec<f32>> {
    let mut file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes).map_err(|e| Error::io(path, e))?;
    if bytes.len() != expected_len * 4 {
        return Err(Error::format(
            path,
            bytes.len().min(expected_len * 4) as u64,
            format!("plane holds {} bytes, expected {}", bytes.len(), expected_len * 4),
        ));
    }
    let mut out = Vec::with_capacity(expected_len);
    for (i, chunk) in bytes.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
        if !v.is_finite() {
            return Err(Error::format(path, (i * 4) as u64, "non-finite sample"));
        }
        out.push(v);
    }
    Ok(out)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Write a coherency raster as a T3 dataset directory.
pub fn write_t3(dir: &Path, raster: &CoherencyRaster) -> Result<()> {
    ensure_dir(dir)?;
    write_header(dir, "t3", raster.width(), raster.height(), raster.looks())?;
    let n = raster.pixels().len();
    let mut planes: Vec<Vec<f32>> = (0..9).map(|_| Vec::with_capacity(n)).collect();
    for m in raster.pixels() {
        let f = crate::svm::FeatureVector::from_matrix(m);
        for (plane, v) in planes.iter_mut().zip(&f.0) {
            plane.push(*v as f32);
        }
    }
    for (name, plane) in T3_PLANES.iter().zip(&planes) {
        write_plane(&plane_path(dir, name), plane)?;
    }
    Ok(())
}

/// Read a T3 dataset directory.
pub fn read_t3(dir: &Path) -> Result<CoherencyRaster> {
    let header = read_header(dir)?;
    if header.format != "t3" {
        return Err(Error::format(
            header_path(dir),
            0,
            format!("expected format=t3, found '{}'", header.format),
        ));
    }
    let len = header.width * header.height;
    let mut planes = Vec::with_capacity(9);
    for name in T3_PLANES {
        let path = plane_path(dir, name);
        let plane = read_plane(&path, len)?;
        planes.push(plane);
    }
    for (p, name) in planes.iter().take(3).zip(T3_PLANES) {
        if let Some(i) = p.iter().position(|&v| v < 0.0) {
            return Err(Error::format(
                plane_path(dir, name),
                (i * 4) as u64,
                format!("negative diagonal value {}", p[i]),
            ));
        }
    }
    let mut data = Vec::with_capacity(len);
    for i in 0..len {
        data.push(HermitianMatrix3::new(
            [planes[0][i] as f64, planes[1][i] as f64, planes[2][i] as f64],
            [
                Complex64::new(planes[3][i] as f64, planes[4][i] as f64),
                Complex64::new(planes[5][i] as f64, planes[6][i] as f64),
                Complex64::new(planes[7][i] as f64, planes[8][i] as f64),
            ],
        ));
    }
    CoherencyRaster::new(header.width, header.height, header.looks, data)
}

/// Write a single-look complex raster as an SLC dataset directory.
pub fn write_slc(dir: &Path, slc: &SlcRaster) -> Result<()> {
    ensure_dir(dir)?;
    write_header(dir, "slc", slc.width(), slc.height(), 1)?;
    let n = slc.samples().len();
    let mut planes: Vec<Vec<f32>> = (0..6).map(|_| Vec::with_capacity(n)).collect();
    for s in slc.samples() {
        let values = [
            s.s_hh.re, s.s_hh.im, s.s_hv.re, s.s_hv.im, s.s_vv.re, s.s_vv.im,
        ];
        for (plane, v) in planes.iter_mut().zip(values) {
            plane.push(v as f32);
        }
    }
    for (name, plane) in SLC_PLANES.iter().zip(&planes) {
        write_plane(&plane_path(dir, name), plane)?;
    }
    Ok(())
}

/// Read an SLC dataset directory.
pub fn read_slc(dir: &Path) -> Result<SlcRaster> {
    let header = read_header(dir)?;
    if header.format != "slc" {
        return Err(Error::format(
            header_path(dir),
            0,
            format!("expected format=slc, found '{}'", header.format),
        ));
    }
    let len = header.width * header.height;
    let mut planes = Vec::with_capacity(6);
    for name in SLC_PLANES {
        planes.push(read_plane(&plane_path(dir, name), len)?);
    }
    let mut data = Vec::with_capacity(len);
    for i in 0..len {
        data.push(ScatteringSample::new(
            Complex64::new(planes[0][i] as f64, planes[1][i] as f64),
            Complex64::new(planes[2][i] as f64, planes[3][i] as f64),
            Complex64::new(planes[4][i] as f64, planes[5][i] as f64),
        ));
    }
    SlcRaster::new(header.width, header.height, data)
}

/// Export the decomposition planes; masked pixels become [`HAA_NO_DATA`].
pub fn write_haa(dir: &Path, haa: &HaaRaster, looks: u32) -> Result<()> {
    ensure_dir(dir)?;
    write_header(dir, "haa", haa.width(), haa.height(), looks)?;
    let n = haa.pixels().len();
    let mut planes: Vec<Vec<f32>> = (0..3).map(|_| Vec::with_capacity(n)).collect();
    for px in haa.pixels() {
        match px {
            Some(h) => {
                planes[0].push(h.entropy as f32);
                planes[1].push(h.anisotropy as f32);
                planes[2].push(h.mean_alpha as f32);
            }
            None => {
                for plane in planes.iter_mut() {
                    plane.push(HAA_NO_DATA);
                }
            }
        }
    }
    for (name, plane) in HAA_PLANES.iter().zip(&planes) {
        write_plane(&plane_path(dir, name), plane)?;
    }
    Ok(())
}
