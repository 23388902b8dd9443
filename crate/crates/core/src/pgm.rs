//! Netpbm grayscale (PGM) reading and writing, ASCII `P2` and binary `P5`.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::image::GrayImage;

/// Largest pixel count accepted from a header, to avoid giant allocations on
/// hostile input.
pub const MAX_PIXELS: usize = 1 << 28;

#[derive(Debug, Error)]
pub enum PgmError {
    #[error("unsupported magic {found:?} at byte 0, expected P2 or P5")]
    UnsupportedMagic { found: String },
    #[error("unexpected end of header at byte {offset}")]
    TruncatedHeader { offset: usize },
    #[error("invalid {field} at byte {offset}")]
    InvalidHeaderField { field: &'static str, offset: usize },
    #[error("maxval {maxval} at byte {offset} outside 1..=65535")]
    InvalidMaxval { maxval: u64, offset: usize },
    #[error("image of {width}x{height} exceeds the {MAX_PIXELS} pixel limit")]
    TooLarge { width: usize, height: usize },
    #[error("pixel data truncated at byte {offset}: got {got} of {expected} samples")]
    TruncatedData { offset: usize, got: usize, expected: usize },
    #[error("sample {value} at byte {offset} exceeds maxval {maxval}")]
    SampleOutOfRange { value: u32, maxval: u32, offset: usize },
    #[error("unsupported output maxval {0}, expected 255 or 65535")]
    UnsupportedMaxval(u32),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Parses an unsigned decimal token after optional whitespace and comments.
    fn number(&mut self, field: &'static str) -> Result<(u64, usize), PgmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        if start >= self.data.len() {
            return Err(PgmError::TruncatedHeader { offset: start });
        }
        let mut value: u64 = 0;
        while let Some(&b) = self.data.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u64::from(b - b'0')))
                .ok_or(PgmError::InvalidHeaderField { field, offset: start })?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(PgmError::InvalidHeaderField { field, offset: start });
        }
        Ok((value, start))
    }
}

/// Decodes a PGM byte buffer. Samples map to `s / maxval`.
pub fn decode_pgm(data: &[u8]) -> Result<GrayImage, PgmError> {
    let magic = data.get(..2).unwrap_or(data);
    let binary = match magic {
        b"P2" => false,
        b"P5" => true,
        _ => {
            return Err(PgmError::UnsupportedMagic {
                found: String::from_utf8_lossy(magic).into_owned(),
            })
        }
    };
    let mut cur = Cursor { data, pos: 2 };
    if !data.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(PgmError::InvalidHeaderField {
            field: "separator after magic",
            offset: 2,
        });
    }
    let (width, w_off) = cur.number("width")?;
    let (height, h_off) = cur.number("height")?;
    let (maxval, m_off) = cur.number("maxval")?;
    if width == 0 {
        return Err(PgmError::InvalidHeaderField {
            field: "width",
            offset: w_off,
        });
    }
    if height == 0 {
        return Err(PgmError::InvalidHeaderField {
            field: "height",
            offset: h_off,
        });
    }
    if maxval == 0 || maxval > 65535 {
        return Err(PgmError::InvalidMaxval { maxval, offset: m_off });
    }
    let (width, height) = (width as usize, height as usize);
    let count = width
        .checked_mul(height)
        .filter(|&n| n <= MAX_PIXELS)
        .ok_or(PgmError::TooLarge { width, height })?;
    let maxval = maxval as u32;
    let m = f64::from(maxval);

    let mut pixels = Vec::with_capacity(count.min(data.len()));
    if binary {
        match data.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            _ => {
                return Err(PgmError::InvalidHeaderField {
                    field: "separator before raster",
                    offset: cur.pos,
                })
            }
        }
        let bytes_per = if maxval > 255 { 2 } else { 1 };
        let raster = &data[cur.pos..];
        let available = raster.len() / bytes_per;
        if available < count {
            return Err(PgmError::TruncatedData {
                offset: data.len(),
                got: available,
                expected: count,
            });
        }
        for (i, chunk) in raster.chunks_exact(bytes_per).take(count).enumerate() {
            let value = match chunk {
                [b] => u32::from(*b),
                [hi, lo] => u32::from(u16::from_be_bytes([*hi, *lo])),
                _ => unreachable!(),
            };
            if value > maxval {
                return Err(PgmError::SampleOutOfRange {
                    value,
                    maxval,
                    offset: cur.pos + i * bytes_per,
                });
            }
            pixels.push(f64::from(value) / m);
        }
    } else {
        for got in 0..count {
            let (value, offset) = cur.number("sample").map_err(|e| match e {
                PgmError::TruncatedHeader { offset } => PgmError::TruncatedData {
                    offset,
                    got,
                    expected: count,
                },
                other => other,
            })?;
            if value > u64::from(maxval) {
                return Err(PgmError::SampleOutOfRange {
                    value: value.min(u64::from(u32::MAX)) as u32,
                    maxval,
                    offset,
                });
            }
            pixels.push(value as f64 / m);
        }
    }
    Ok(GrayImage::new(width, height, pixels).expect("decoded samples lie in [0, 1]"))
}

/// Encodes as binary `P5`. Each intensity is stored as `round(v * maxval)`,
/// halves rounding up.
pub fn encode_pgm(img: &GrayImage, maxval: u32) -> Result<Vec<u8>, PgmError> {
    if maxval != 255 && maxval != 65535 {
        return Err(PgmError::UnsupportedMaxval(maxval));
    }
    let header = format!("P5\n{} {}\n{}\n", img.width(), img.height(), maxval);
    let bytes_per = if maxval > 255 { 2 } else { 1 };
    let mut out = Vec::with_capacity(header.len() + img.len() * bytes_per);
    out.extend_from_slice(header.as_bytes());
    let m = f64::from(maxval);
    for &v in img.pixels() {
        let s = (v * m + 0.5).floor().clamp(0.0, m) as u32;
        if bytes_per == 1 {
            out.push(s as u8);
        } else {
            out.extend_from_slice(&(s as u16).to_be_bytes());
        }
    }
    Ok(out)
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage, PgmError> {
    let path = path.as_ref();
    let data = fs::read(path).map_err(|source| PgmError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode_pgm(&data)
}

pub fn save_pgm(img: &GrayImage, path: impl AsRef<Path>, maxval: u32) -> Result<(), PgmError> {
    let path = path.as_ref();
    let bytes = encode_pgm(img, maxval)?;
    fs::write(path, bytes).map_err(|source| PgmError::Io {
        path: path.display().to_string(),
        source,
    })
}
