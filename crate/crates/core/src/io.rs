//! On-disk formats: PMAP float maps, NDJSON instance lists, PGM masks.
//!
//! PMAP layout, all little-endian: `b"PMAP"`, `u16` version (1), `u32`
//! height, `u32` width, `u32` channels, then `height * width * channels`
//! `f32` values, row-major and channel-last. The header is 18 bytes.

use std::io::{BufRead, Read, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::loss::{MapKind, ProbMap};
use crate::raster::Grid;

pub const PMAP_MAGIC: &[u8; 4] = b"PMAP";
pub const PMAP_VERSION: u16 = 1;
pub const PMAP_HEADER_LEN: usize = 18;

/// Writes `map` as PMAP. Values are narrowed to `f32`.
pub fn write_pmap<W: Write>(mut w: W, map: &ProbMap) -> Result<()> {
    let mut buf = Vec::with_capacity(PMAP_HEADER_LEN + 4 * map.as_slice().len());
    buf.extend_from_slice(PMAP_MAGIC);
    buf.extend_from_slice(&PMAP_VERSION.to_le_bytes());
    for dim in [map.height(), map.width(), map.channels()] {
        let d = u32::try_from(dim).map_err(|_| Error::Format(format!("dimension {dim} exceeds u32")))?;
        buf.extend_from_slice(&d.to_le_bytes());
    }
    for &v in map.as_slice() {
        buf.extend_from_slice(&(v as f32).to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4-byte slice"))
}

/// Parses a PMAP buffer. Diagnostics name the byte offset of the first
/// inconsistency.
pub fn parse_pmap(bytes: &[u8], kind: MapKind) -> Result<ProbMap> {
    if bytes.len() < PMAP_HEADER_LEN {
        return Err(Error::Format(format!(
            "PMAP header truncated: {} of {PMAP_HEADER_LEN} bytes (offset {})",
            bytes.len(),
            bytes.len()
        )));
    }
    if &bytes[..4] != PMAP_MAGIC {
        return Err(Error::Format(format!("bad PMAP magic {:?} at offset 0", &bytes[..4])));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != PMAP_VERSION {
        return Err(Error::Format(format!("unsupported PMAP version {version} at offset 4")));
    }
    let (h, w, c) = (u32_at(bytes, 6) as usize, u32_at(bytes, 10) as usize, u32_at(bytes, 14) as usize);
    if c == 0 {
        return Err(Error::Format("zero channels at offset 14".into()));
    }
    let expected = h
        .checked_mul(w)
        .and_then(|n| n.checked_mul(c))
        .and_then(|n| n.checked_mul(4))
        .and_then(|n| n.checked_add(PMAP_HEADER_LEN))
        .ok_or_else(|| Error::Format(format!("PMAP dimensions {h}x{w}x{c} overflow")))?;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "PMAP {h}x{w}x{c} needs {expected} bytes, found {}; first inconsistency at offset {}",
            bytes.len(),
            expected.min(bytes.len())
        )));
    }
    let mut data = Vec::with_capacity(h * w * c);
    for (k, chunk) in bytes[PMAP_HEADER_LEN..].chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().expect("4-byte chunk"));
        if !v.is_finite() {
            return Err(Error::Format(format!(
                "non-finite value {v} at offset {}",
                PMAP_HEADER_LEN + 4 * k
            )));
        }
        data.push(f64::from(v));
    }
    ProbMap::new(w, h, c, kind, data)
}

pub fn read_pmap<R: Read>(mut r: R, kind: MapKind) -> Result<ProbMap> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    parse_pmap(&bytes, kind)
}

/// One JSON object per line.
pub fn write_ndjson<W: Write, T: Serialize>(mut w: W, items: &[T]) -> Result<()> {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).map_err(|e| Error::Format(e.to_string()))?);
        out.push('\n');
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}

/// Reads one object per non-blank line; errors carry the 1-based line.
pub fn read_ndjson<R: BufRead, T: DeserializeOwned>(r: R) -> Result<Vec<T>> {
    let mut items = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        items.push(
            serde_json::from_str(&line).map_err(|e| Error::Format(format!("line {}: {e}", i + 1)))?,
        );
    }
    Ok(items)
}

/// Binary 8-bit PGM (`P5`, maxval 255).
pub fn write_pgm<W: Write>(mut w: W, img: &Grid<u8>) -> Result<()> {
    let mut buf = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    buf.extend_from_slice(img.as_slice());
    w.write_all(&buf)?;
    Ok(())
}

/// Reads the `P5` files written by [`write_pgm`]; comments are not supported.
pub fn parse_pgm(bytes: &[u8]) -> Result<Grid<u8>> {
    let mut fields = Vec::with_capacity(4);
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format(format!("PGM header truncated at offset {pos}")));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).unwrap_or("").to_string());
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    if fields[0] != "P5" {
        return Err(Error::Format(format!("PGM magic {:?} is not P5", fields[0])));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| Error::Format(format!("bad PGM field {s:?}")));
    let (w, h, max) = (num(&fields[1])?, num(&fields[2])?, num(&fields[3])?);
    if max != 255 {
        return Err(Error::Format(format!("PGM maxval {max} unsupported")));
    }
    let data = bytes.get(pos..).unwrap_or(&[]);
    if data.len() != w * h {
        return Err(Error::Format(format!(
            "PGM {w}x{h} needs {} raster bytes, found {}",
            w * h,
            data.len()
        )));
    }
    Grid::from_vec(w, h, data.to_vec())
}
