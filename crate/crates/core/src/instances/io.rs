//! 8-bit image and volume files: binary PGM for 2D, raw bytes plus a
//! `<file>.hdr` text header holding `nx ny nz` for 3D.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::set::Subset;

use super::ImageVolume;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse { line: 0, msg: msg.into() }
}

/// Reads a binary (P5) PGM with maxval 255.
pub fn read_pgm(path: &Path) -> Result<ImageVolume> {
    let bytes = std::fs::read(path)?;
    parse_pgm(&bytes)
}

pub(crate) fn parse_pgm(bytes: &[u8]) -> Result<ImageVolume> {
    let mut pos = 0;
    let mut token = || -> Result<String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(parse_err("truncated PGM header"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    let magic = token()?;
    if magic != "P5" {
        return Err(parse_err(format!("expected a binary PGM (P5), found '{magic}'")));
    }
    let number = |t: String, what: &str| -> Result<usize> {
        t.parse().map_err(|_| parse_err(format!("invalid PGM {what} '{t}'")))
    };
    let width = number(token()?, "width")?;
    let height = number(token()?, "height")?;
    let maxval = number(token()?, "maxval")?;
    if maxval != 255 {
        return Err(parse_err(format!("only 8-bit PGM (maxval 255) is supported, got {maxval}")));
    }
    // exactly one whitespace byte separates the header from the raster
    let data_start = pos + 1;
    let len = width * height;
    if bytes.len() < data_start + len {
        return Err(parse_err(format!("PGM raster truncated: expected {len} bytes")));
    }
    ImageVolume::new(vec![width, height], bytes[data_start..data_start + len].to_vec())
}

pub fn write_pgm(path: &Path, width: usize, height: usize, data: &[u8]) -> Result<()> {
    if data.len() != width * height {
        return Err(Error::LengthMismatch { expected: width * height, actual: data.len() });
    }
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(data);
    std::fs::write(path, out)?;
    Ok(())
}

/// `<path>.hdr`.
pub fn header_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(".hdr");
    PathBuf::from(s)
}

/// Reads raw voxels; dimensions come from the sidecar header.
pub fn read_raw_volume(path: &Path) -> Result<ImageVolume> {
    let hdr = std::fs::read_to_string(header_path(path))?;
    let dims: Vec<usize> = hdr
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(format!("invalid volume header entry '{t}'"))))
        .collect::<Result<_>>()?;
    if dims.len() != 3 {
        return Err(parse_err(format!("volume header must hold 'nx ny nz', got {} values", dims.len())));
    }
    let data = std::fs::read(path)?;
    let n: usize = dims.iter().product();
    if data.len() != n {
        return Err(parse_err(format!("volume has {} bytes, header implies {n}", data.len())));
    }
    ImageVolume::new(dims, data)
}

pub fn write_raw_volume(path: &Path, dims: &[usize], data: &[u8]) -> Result<()> {
    if dims.len() != 3 {
        return Err(Error::InvalidArgument("raw volumes are 3D".into()));
    }
    let n: usize = dims.iter().product();
    if data.len() != n {
        return Err(Error::LengthMismatch { expected: n, actual: data.len() });
    }
    std::fs::write(path, data)?;
    std::fs::write(header_path(path), format!("{} {} {}\n", dims[0], dims[1], dims[2]))?;
    Ok(())
}

/// PGM for `.pgm` paths, raw + header otherwise.
pub fn read_volume(path: &Path) -> Result<ImageVolume> {
    let is_pgm = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    if is_pgm {
        read_pgm(path)
    } else {
        read_raw_volume(path)
    }
}

/// Writes `255` for members of `set`, `0` elsewhere: PGM for 2D grids,
/// raw + header for 3D.
pub fn write_mask(path: &Path, dims: &[usize], set: &Subset) -> Result<()> {
    let n: usize = dims.iter().product();
    if set.ground_size() != n {
        return Err(Error::LengthMismatch { expected: n, actual: set.ground_size() });
    }
    let data: Vec<u8> = set.members().iter().map(|&b| if b { 255 } else { 0 }).collect();
    match dims.len() {
        2 => write_pgm(path, dims[0], dims[1], &data),
        3 => write_raw_volume(path, dims, &data),
        k => Err(Error::InvalidArgument(format!("masks are 2D or 3D, got {k} dimensions"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("sfm-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn pgm_round_trip() {
        let p = tmp("a.pgm");
        let data: Vec<u8> = (0..12).map(|i| (i * 20) as u8).collect();
        write_pgm(&p, 4, 3, &data).unwrap();
        let img = read_pgm(&p).unwrap();
        assert_eq!(img.dims, vec![4, 3]);
        assert_eq!(img.intensities, data);
    }

    #[test]
    fn pgm_header_comments() {
        let mut bytes = b"P5\n# made by hand\n2 1\n255\n".to_vec();
        bytes.extend_from_slice(&[7, 9]);
        let img = parse_pgm(&bytes).unwrap();
        assert_eq!(img.intensities, vec![7, 9]);
        assert!(parse_pgm(b"P2\n2 1\n255\n7 9").is_err());
        assert!(parse_pgm(b"P5\n2 1\n65535\n").is_err());
        assert!(parse_pgm(b"P5\n4 4\n255\n\x01").is_err());
    }

    #[test]
    fn raw_round_trip_and_mask() {
        let p = tmp("v.raw");
        let data: Vec<u8> = (0..24).map(|i| i as u8).collect();
        write_raw_volume(&p, &[4, 3, 2], &data).unwrap();
        assert_eq!(std::fs::read_to_string(header_path(&p)).unwrap(), "4 3 2\n");
        let v = read_volume(&p).unwrap();
        assert_eq!(v.dims, vec![4, 3, 2]);
        assert_eq!(v.intensities, data);

        let m = tmp("m.pgm");
        write_mask(&m, &[2, 2], &Subset::from_indices(4, &[1, 2]).unwrap()).unwrap();
        assert_eq!(read_pgm(&m).unwrap().intensities, vec![0, 255, 255, 0]);
    }
}
