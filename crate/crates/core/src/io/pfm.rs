//! Grayscale Portable FloatMap (`Pf`) images.
//!
//! Header `Pf\n<width> <height>\n<scale>\n`, then `height` rows of `width`
//! 32-bit floats, bottom row first. A negative scale marks little-endian
//! data; files are always written little-endian with scale `-1.0`.

use std::fs;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

/// Encodes `data` (indexed `[row, col]`, row 0 at the top).
pub fn encode_pfm(data: &Array2<f32>) -> Result<Vec<u8>> {
    if data.iter().any(|v| v.is_nan()) {
        return Err(Error::Pfm("NaN values cannot be written".into()));
    }
    let (h, w) = data.dim();
    let mut out = format!("Pf\n{w} {h}\n-1.0\n").into_bytes();
    out.reserve(4 * w * h);
    for row in data.rows().into_iter().rev() {
        for v in row {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn decode_pfm(bytes: &[u8]) -> Result<Array2<f32>> {
    let mut pos = 0;
    let mut token = || -> Result<String> {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Pfm("truncated header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    match token()?.as_str() {
        "Pf" => {}
        "PF" => return Err(Error::Pfm("grayscale PFM required".into())),
        other => return Err(Error::Pfm(format!("bad magic {other:?}"))),
    }
    let dim = |t: String| t.parse::<usize>().map_err(|_| Error::Pfm(format!("bad dimension {t:?}")));
    let w = dim(token()?)?;
    let h = dim(token()?)?;
    let scale_text = token()?;
    let scale: f64 = scale_text
        .parse()
        .map_err(|_| Error::Pfm(format!("bad scale {scale_text:?}")))?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::Pfm(format!("bad scale {scale_text:?}")));
    }
    // exactly one whitespace byte separates the header from the data
    let data = bytes.get(pos + 1..).ok_or_else(|| Error::Pfm("missing data".into()))?;
    let count = w.checked_mul(h).ok_or_else(|| Error::Pfm("dimensions overflow".into()))?;
    if data.len() != 4 * count {
        return Err(Error::Pfm(format!("expected {} data bytes, found {}", 4 * count, data.len())));
    }
    let little = scale < 0.0;
    let mut out = Array2::zeros((h, w));
    for (i, chunk) in data.chunks_exact(4).enumerate() {
        let b = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little { f32::from_le_bytes(b) } else { f32::from_be_bytes(b) };
        out[[h - 1 - i / w, i % w]] = v;
    }
    Ok(out)
}

pub fn write_pfm(path: &Path, data: &Array2<f32>) -> Result<()> {
    fs::write(path, encode_pfm(data)?)?;
    Ok(())
}

pub fn read_pfm(path: &Path) -> Result<Array2<f32>> {
    decode_pfm(&fs::read(path)?)
}

/// Narrows to `f32` and writes.
pub fn write_pfm_f64(path: &Path, data: &Array2<f64>) -> Result<()> {
    write_pfm(path, &data.mapv(|v| v as f32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_and_order() {
        let a = Array2::from_shape_vec((2, 2), vec![1.0f32, 2.0, 3.0, 4.0]).unwrap();
        let bytes = encode_pfm(&a).unwrap();
        assert!(bytes.starts_with(b"Pf\n2 2\n-1.0\n"));
        let body = &bytes[12..];
        // bottom row first
        assert_eq!(&body[..4], &3.0f32.to_le_bytes());
        assert_eq!(decode_pfm(&bytes).unwrap(), a);
    }

    #[test]
    fn rejects_colour_and_nan() {
        let err = decode_pfm(b"PF\n1 1\n-1.0\n\0\0\0\0\0\0\0\0\0\0\0\0").unwrap_err();
        assert!(err.to_string().contains("grayscale PFM required"));
        let a = Array2::from_elem((1, 1), f32::NAN);
        assert!(encode_pfm(&a).is_err());
        assert!(decode_pfm(b"Pf\n2 2\n-1.0\n\0\0").is_err());
        assert!(decode_pfm(b"P5\n").is_err());
    }

    #[test]
    fn big_endian_input() {
        let mut bytes = b"Pf\n1 1\n1.0\n".to_vec();
        bytes.extend_from_slice(&2.5f32.to_be_bytes());
        assert_eq!(decode_pfm(&bytes).unwrap()[[0, 0]], 2.5);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.pfm");
        let a = Array2::from_shape_fn((3, 5), |(r, c)| (r * 5 + c) as f32 * 0.1);
        write_pfm(&p, &a).unwrap();
        assert_eq!(read_pfm(&p).unwrap(), a);
    }

    proptest! {
        #[test]
        fn bit_exact(h in 1usize..6, w in 1usize..6, bits in proptest::collection::vec(any::<u32>(), 36)) {
            let vals: Vec<f32> = bits.iter().take(h * w).map(|b| f32::from_bits(*b)).map(|v| if v.is_nan() { 0.0 } else { v }).collect();
            let a = Array2::from_shape_vec((h, w), vals).unwrap();
            let back = decode_pfm(&encode_pfm(&a).unwrap()).unwrap();
            prop_assert!(a.iter().zip(back.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }
}
