//! Binary PPM (P6, maxval 255) reader and writer.

use std::io::{Read, Write};

use crate::error::{Result, ScfError};
use crate::image::{Color, Image};

pub fn read_ppm<R: Read>(mut reader: R) -> Result<Image> {
    let mut data = Vec::new();
    reader.read_to_end(&mut data)?;
    parse_ppm(&data)
}

pub fn parse_ppm(data: &[u8]) -> Result<Image> {
    let mut pos = 0usize;
    if data.len() < 2 || &data[..2] != b"P6" {
        return Err(ScfError::Ppm("missing P6 magic".into()));
    }
    pos += 2;
    let width = header_field(data, &mut pos)?;
    let height = header_field(data, &mut pos)?;
    let maxval = header_field(data, &mut pos)?;
    if maxval != 255 {
        return Err(ScfError::Ppm(format!("unsupported maxval {maxval}, expected 255")));
    }
    // exactly one whitespace byte separates the header from the raster
    match data.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(ScfError::Ppm("missing whitespace after maxval".into())),
    }
    if width == 0 || height == 0 {
        return Err(ScfError::Ppm(format!("empty image {width}x{height}")));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| ScfError::Ppm("dimensions overflow".into()))?;
    let raster = &data[pos..];
    if raster.len() < count * 3 {
        return Err(ScfError::Ppm(format!(
            "raster truncated: need {} bytes, have {}",
            count * 3,
            raster.len()
        )));
    }
    let pixels = raster[..count * 3]
        .chunks_exact(3)
        .map(|p| Color::new(p[0] as u16, p[1] as u16, p[2] as u16))
        .collect();
    Image::from_pixels(width, height, 8, pixels)
}

fn header_field(data: &[u8], pos: &mut usize) -> Result<usize> {
    // skip whitespace and comments
    loop {
        match data.get(*pos) {
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(b'#') => {
                while let Some(&b) = data.get(*pos) {
                    *pos += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            }
            Some(_) => break,
            None => return Err(ScfError::Ppm("unexpected end of header".into())),
        }
    }
    let start = *pos;
    while data.get(*pos).is_some_and(u8::is_ascii_digit) {
        *pos += 1;
    }
    if start == *pos {
        return Err(ScfError::Ppm(format!("expected a number at byte {start}")));
    }
    std::str::from_utf8(&data[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| ScfError::Ppm("header number out of range".into()))
}

pub fn write_ppm<W: Write>(mut writer: W, img: &Image) -> Result<()> {
    if img.depth() != 8 {
        return Err(ScfError::UnsupportedDepth(img.depth()));
    }
    write!(writer, "P6\n{} {}\n255\n", img.width(), img.height())?;
    let mut raster = Vec::with_capacity(img.len() * 3);
    for c in img.pixels() {
        raster.extend_from_slice(&[c.r as u8, c.g as u8, c.b as u8]);
    }
    writer.write_all(&raster)?;
    Ok(())
}

pub fn encode_ppm(img: &Image) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    write_ppm(&mut out, img)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let px = (0..12u16).map(|n| Color::new(n, 255 - n, n * 20)).collect();
        let img = Image::from_pixels(4, 3, 8, px).unwrap();
        let bytes = encode_ppm(&img).unwrap();
        assert!(bytes.starts_with(b"P6\n4 3\n255\n"));
        assert_eq!(parse_ppm(&bytes).unwrap(), img);
    }

    #[test]
    fn header_comments() {
        let mut bytes = b"P6 # a comment\n2 # w\n1\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3, 4, 5, 6]);
        let img = parse_ppm(&bytes).unwrap();
        assert_eq!(img.get(1, 0), Color::new(4, 5, 6));
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_ppm(b"P3\n1 1\n255\n").is_err());
        assert!(parse_ppm(b"P6\n1 1\n65535\n\0\0\0\0\0\0").is_err());
        assert!(parse_ppm(b"P6\n2 2\n255\n\0\0\0").is_err());
        assert!(parse_ppm(b"P6\n0 2\n255\n").is_err());
        assert!(parse_ppm(b"P6\n").is_err());
    }
}
