//! File formats: the self-describing binary field dump and PGM images.
//!
//! Field dump layout (all values little-endian): an 8-byte magic
//! `b"SLFIELD1"`, then `nx`, `ny`, `dx`, `dy` as four `f64` (sample counts
//! stored as floats, spacings in meters), then `nx*ny` samples row-major in
//! `y` as interleaved re/im `f64` pairs.
//!
//! PGM export writes binary P5 with 16-bit samples (big-endian per the PGM
//! standard) holding `|E|^2` normalized to its peak. The reader accepts 8-
//! and 16-bit P5 with comments.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::Grid2D;

const FIELD_MAGIC: &[u8; 8] = b"SLFIELD1";

/// Write a field dump to `path`.
pub fn write_field_dump(path: impl AsRef<Path>, field: &ComplexField) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(FIELD_MAGIC)?;
    let g = field.grid();
    for v in [g.nx() as f64, g.ny() as f64, g.dx(), g.dy()] {
        w.write_all(&v.to_le_bytes())?;
    }
    for v in field.values() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Read a field dump written by [`write_field_dump`].
pub fn read_field_dump(path: impl AsRef<Path>) -> Result<ComplexField> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != FIELD_MAGIC {
        return Err(Error::InvalidField("bad field-dump magic".into()));
    }
    let mut f64_buf = [0u8; 8];
    let mut read_f64 = |r: &mut BufReader<File>| -> Result<f64> {
        r.read_exact(&mut f64_buf)?;
        Ok(f64::from_le_bytes(f64_buf))
    };
    let nx = read_f64(&mut r)?;
    let ny = read_f64(&mut r)?;
    let dx = read_f64(&mut r)?;
    let dy = read_f64(&mut r)?;
    if !(nx.fract() == 0.0 && ny.fract() == 0.0 && nx >= 2.0 && ny >= 2.0) {
        return Err(Error::InvalidField("bad field-dump dimensions".into()));
    }
    let grid = Grid2D::new(nx as usize, ny as usize, dx, dy)?;
    let mut values = Vec::with_capacity(grid.len());
    let mut buf = [0u8; 16];
    for _ in 0..grid.len() {
        r.read_exact(&mut buf)?;
        let re = f64::from_le_bytes(buf[0..8].try_into().unwrap());
        let im = f64::from_le_bytes(buf[8..16].try_into().unwrap());
        values.push(Complex64::new(re, im));
    }
    ComplexField::new(grid, values)
}

/// Write `|E|^2`, normalized to its peak, as a 16-bit binary PGM. Row 0 of
/// the image is the top of the field (largest y).
pub fn write_intensity_pgm(path: impl AsRef<Path>, field: &ComplexField) -> Result<()> {
    let g = field.grid();
    let intensity = field.intensity();
    let peak = intensity.iter().cloned().fold(0.0f64, f64::max);
    let scale = if peak > 0.0 { 65535.0 / peak } else { 0.0 };
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{} {}\n65535\n", g.nx(), g.ny())?;
    for iy in (0..g.ny()).rev() {
        for ix in 0..g.nx() {
            let v = (intensity[g.idx(ix, iy)] * scale).round() as u16;
            w.write_all(&v.to_be_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// A raw grayscale image straight from a PGM file.
pub struct PgmImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u32,
    /// Row-major, row 0 first (top).
    pub samples: Vec<u32>,
}

/// Read a binary (P5) PGM with 8- or 16-bit samples.
pub fn read_pgm(path: impl AsRef<Path>) -> Result<PgmImage> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    let mut pos = 0usize;

    let mut token = |bytes: &[u8]| -> Result<String> {
        // skip whitespace and '#' comments
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::MalformedPgm("unexpected end of header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };

    if token(&bytes)? != "P5" {
        return Err(Error::MalformedPgm("not a binary PGM (P5)".into()));
    }
    let parse = |s: String| -> Result<u32> {
        s.parse()
            .map_err(|_| Error::MalformedPgm(format!("bad header number {s:?}")))
    };
    let width = parse(token(&bytes)?)? as usize;
    let height = parse(token(&bytes)?)? as usize;
    let maxval = parse(token(&bytes)?)?;
    if width == 0 || height == 0 || maxval == 0 || maxval > 65535 {
        return Err(Error::MalformedPgm("bad dimensions or maxval".into()));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;

    let n = width * height;
    let wide = maxval > 255;
    let needed = n * if wide { 2 } else { 1 };
    if bytes.len() < pos + needed {
        return Err(Error::MalformedPgm("truncated raster".into()));
    }
    let raster = &bytes[pos..pos + needed];
    let samples = if wide {
        raster
            .chunks_exact(2)
            .map(|c| u32::from(u16::from_be_bytes([c[0], c[1]])))
            .collect()
    } else {
        raster.iter().map(|&b| u32::from(b)).collect()
    };
    Ok(PgmImage {
        width,
        height,
        maxval,
        samples,
    })
}

/// Write an 8-bit binary PGM from raw bytes (used for bundled mask assets
/// and tests).
pub fn write_pgm_u8(
    path: impl AsRef<Path>,
    width: usize,
    height: usize,
    samples: &[u8],
) -> Result<()> {
    if samples.len() != width * height {
        return Err(Error::MalformedPgm("sample count mismatch".into()));
    }
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{width} {height}\n255\n")?;
    w.write_all(samples)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_dump_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.fld");
        let g = Grid2D::new(12, 7, 4e-6, 6e-6).unwrap();
        let f = ComplexField::from_fn(g, |x, y| Complex64::new(x * 1e6, y * 1e6 - 0.5));
        write_field_dump(&path, &f).unwrap();
        let back = read_field_dump(&path).unwrap();
        assert_eq!(back.grid(), f.grid());
        assert_eq!(back.values(), f.values());
    }

    #[test]
    fn pgm_round_trips_8_and_16_bit() {
        let dir = tempfile::tempdir().unwrap();
        let p8 = dir.path().join("m8.pgm");
        write_pgm_u8(&p8, 3, 2, &[0, 128, 255, 10, 20, 30]).unwrap();
        let img = read_pgm(&p8).unwrap();
        assert_eq!((img.width, img.height, img.maxval), (3, 2, 255));
        assert_eq!(img.samples, vec![0, 128, 255, 10, 20, 30]);

        let p16 = dir.path().join("m16.pgm");
        let g = Grid2D::new(4, 3, 1e-6, 1e-6).unwrap();
        let f = ComplexField::from_fn(g, |x, y| Complex64::new((x + y) * 1e6 + 4.0, 0.0));
        write_intensity_pgm(&p16, &f).unwrap();
        let img = read_pgm(&p16).unwrap();
        assert_eq!((img.width, img.height, img.maxval), (4, 3, 65535));
        assert_eq!(img.samples.iter().max(), Some(&65535));
    }

    #[test]
    fn pgm_reader_handles_comments_and_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.pgm");
        std::fs::write(&p, b"P5 # binary gray\n# another comment\n2 2\n255\n\x01\x02\x03\x04")
            .unwrap();
        let img = read_pgm(&p).unwrap();
        assert_eq!(img.samples, vec![1, 2, 3, 4]);

        let bad = dir.path().join("bad.pgm");
        std::fs::write(&bad, b"P2\n2 2\n255\n1 2 3 4").unwrap();
        assert!(read_pgm(&bad).is_err());
        let trunc = dir.path().join("trunc.pgm");
        std::fs::write(&trunc, b"P5\n4 4\n255\n\x01\x02").unwrap();
        assert!(read_pgm(&trunc).is_err());
    }
}
