//! Binary PGM (P5) label masks and PPM (P6) class maps.
//!
//! Masks store the raw label byte (0 = unlabeled). Class maps paint classes
//! with [`CLASS_PALETTE`]; class ids above 12 wrap around the palette, so
//! maps round-trip losslessly only for up to 12 classes.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::wishart::{ClassMap, LabelMask};

/// Class colors, class id 1 first. Classes beyond the palette cycle.
pub const CLASS_PALETTE: [[u8; 3]; 12] = [
    [200, 30, 30],   // 1: red
    [30, 160, 30],   // 2: green
    [30, 60, 200],   // 3: blue
    [230, 190, 40],  // 4: yellow
    [170, 40, 190],  // 5: purple
    [40, 190, 190],  // 6: cyan
    [240, 130, 30],  // 7: orange
    [120, 80, 40],   // 8: brown
    [240, 120, 170], // 9: pink
    [110, 210, 80],  // 10: light green
    [90, 90, 90],    // 11: gray
    [20, 20, 80],    // 12: navy
];

pub fn class_color(class_id: u8) -> [u8; 3] {
    debug_assert!(class_id >= 1);
    CLASS_PALETTE[((class_id - 1) as usize) % CLASS_PALETTE.len()]
}

fn write_pnm(path: &Path, magic: &str, width: usize, height: usize, data: &[u8]) -> Result<()> {
    let mut bytes = format!("{magic}\n{width} {height}\n255\n").into_bytes();
    bytes.extend_from_slice(data);
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

struct PnmHeader {
    magic: [u8; 2],
    width: usize,
    height: usize,
    maxval: usize,
    data_offset: usize,
}

/// Whitespace/comment-tolerant netpbm header parsing.
fn parse_pnm_header(path: &Path, bytes: &[u8]) -> Result<PnmHeader> {
    if bytes.len() < 2 {
        return Err(Error::format(path, 0, "file too short for a PNM header"));
    }
    let magic = [bytes[0], bytes[1]];
    if &magic != b"P5" && &magic != b"P6" {
        return Err(Error::format(path, 0, "not a binary PGM/PPM file"));
    }
    let mut pos = 2usize;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        // Skip whitespace and comments.
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while let Some(&b) = bytes.get(pos) {
                        pos += 1;
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                Some(_) => break,
                None => return Err(Error::format(path, pos as u64, "truncated PNM header")),
            }
        }
        let start = pos;
        while let Some(b) = bytes.get(pos) {
            if b.is_ascii_digit() {
                pos += 1;
            } else {
                break;
            }
        }
        if pos == start {
            return Err(Error::format(path, pos as u64, "expected decimal value in PNM header"));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).unwrap();
        *field = text
            .parse()
            .map_err(|_| Error::format(path, start as u64, format!("bad header value '{text}'")))?;
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::format(path, pos as u64, "missing raster separator")),
    }
    Ok(PnmHeader {
        magic,
        width: fields[0],
        height: fields[1],
        maxval: fields[2],
        data_offset: pos,
    })
}

fn read_pnm(path: &Path, expect_magic: &[u8; 2], channels: usize) -> Result<(usize, usize, Vec<u8>)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let header = parse_pnm_header(path, &bytes)?;
    if &header.magic != expect_magic {
        return Err(Error::format(
            path,
            0,
            format!(
                "expected {} file, found {}",
                String::from_utf8_lossy(expect_magic),
                String::from_utf8_lossy(&header.magic)
            ),
        ));
    }
    if header.maxval == 0 || header.maxval > 255 {
        return Err(Error::format(path, 2, format!("unsupported maxval {}", header.maxval)));
    }
    let expected = header.width * header.height * channels;
    let data = &bytes[header.data_offset..];
    if data.len() != expected {
        return Err(Error::format(
            path,
            (header.data_offset + data.len().min(expected)) as u64,
            format!("raster holds {} bytes, expected {expected}", data.len()),
        ));
    }
    Ok((header.width, header.height, data.to_vec()))
}

/// Write a label mask as binary PGM; the byte value is the label.
pub fn write_mask(path: &Path, mask: &LabelMask) -> Result<()> {
    write_pnm(path, "P5", mask.width(), mask.height(), mask.labels())
}

/// Read a label mask from binary PGM.
pub fn read_mask(path: &Path) -> Result<LabelMask> {
    let (width, height, data) = read_pnm(path, b"P5", 1)?;
    LabelMask::new(width, height, data)
}

/// Write a class map as binary PPM using the class palette.
pub fn write_class_map(path: &Path, map: &ClassMap) -> Result<()> {
    let mut rgb = Vec::with_capacity(map.classes().len() * 3);
    for &class in map.classes() {
        rgb.extend_from_slice(&class_color(class));
    }
    write_pnm(path, "P6", map.width(), map.height(), &rgb)
}

/// Read a class map back from a palette PPM. Also accepts a PGM whose bytes
/// are class labels directly (auto-detected from the magic).
pub fn read_class_map(path: &Path) -> Result<ClassMap> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let header = parse_pnm_header(path, &bytes)?;
    match &header.magic {
        b"P5" => {
            let (width, height, data) = read_pnm(path, b"P5", 1)?;
            ClassMap::new(width, height, data)
        }
        b"P6" => {
            let (width, height, rgb) = read_pnm(path, b"P6", 3)?;
            let mut classes = Vec::with_capacity(width * height);
            for (i, px) in rgb.chunks_exact(3).enumerate() {
                let color = [px[0], px[1], px[2]];
                let class = CLASS_PALETTE
                    .iter()
                    .position(|c| *c == color)
                    .map(|idx| (idx + 1) as u8)
                    .ok_or_else(|| {
                        Error::format(
                            path,
                            (header.data_offset + i * 3) as u64,
                            format!("color ({}, {}, {}) is not in the class palette", px[0], px[1], px[2]),
                        )
                    })?;
                classes.push(class);
            }
            ClassMap::new(width, height, classes)
        }
        _ => unreachable!("parse_pnm_header only admits P5/P6"),
    }
}
