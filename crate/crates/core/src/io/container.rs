use std::fs;
use std::path::Path;

use num_complex::Complex;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub(crate) const PREFIX: u64 = 12;

pub(crate) fn write<H: Serialize>(path: &Path, magic: &[u8; 8], header: &H, payload: &[u8]) -> Result<()> {
    let json = serde_json::to_vec(header)?;
    let len = u32::try_from(json.len()).map_err(|_| Error::domain("header longer than 4 GiB"))?;
    let mut out = Vec::with_capacity(12 + json.len() + payload.len());
    out.extend_from_slice(magic);
    out.extend_from_slice(&len.to_le_bytes());
    out.extend_from_slice(&json);
    out.extend_from_slice(payload);
    fs::write(path, out)?;
    Ok(())
}

/// Parsed container: header plus payload bytes and the payload's file offset.
pub(crate) struct Parsed<H> {
    pub header: H,
    pub payload: Vec<u8>,
    pub payload_offset: u64,
}

pub(crate) fn read<H: DeserializeOwned>(path: &Path, magic: &[u8; 8]) -> Result<Parsed<H>> {
    let bytes = fs::read(path)?;
    parse(bytes, magic)
}

pub(crate) fn parse<H: DeserializeOwned>(mut bytes: Vec<u8>, magic: &[u8; 8]) -> Result<Parsed<H>> {
    if bytes.len() < 12 {
        return Err(Error::format(0, format!("file is {} bytes; magic and header length need 12", bytes.len())));
    }
    if &bytes[..8] != magic {
        return Err(Error::format(
            0,
            format!("magic: expected {:?}, found {:?}", String::from_utf8_lossy(magic), String::from_utf8_lossy(&bytes[..8])),
        ));
    }
    let len = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let end = 12 + len;
    if bytes.len() < end {
        return Err(Error::format(8, format!("header length: declares {len} bytes but only {} follow", bytes.len() - 12)));
    }
    let header = serde_json::from_slice(&bytes[12..end]).map_err(|e| Error::format(PREFIX, format!("header: {e}")))?;
    let payload = bytes.split_off(end);
    Ok(Parsed { header, payload, payload_offset: end as u64 })
}

pub(crate) fn push_complex<T: Real>(out: &mut Vec<u8>, values: &[Complex<T>]) {
    for v in values {
        out.extend_from_slice(&v.re.to_f64_lossy().to_le_bytes());
        out.extend_from_slice(&v.im.to_f64_lossy().to_le_bytes());
    }
}

/// Decodes exactly `count` complex values; `field` names the payload in
/// diagnostics.
pub(crate) fn take_complex<T: Real>(bytes: &[u8], offset: u64, count: usize, field: &str) -> Result<Vec<Complex<T>>> {
    let want = count * 16;
    if bytes.len() != want {
        return Err(Error::format(
            offset,
            format!("{field}: expected {want} bytes ({count} complex values), found {}", bytes.len()),
        ));
    }
    let mut out = Vec::with_capacity(count);
    for (k, chunk) in bytes.chunks_exact(16).enumerate() {
        let re = f64::from_le_bytes(chunk[..8].try_into().unwrap());
        let im = f64::from_le_bytes(chunk[8..].try_into().unwrap());
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::Data(format!("{field}: non-finite value at entry {k} (byte {})", offset + 16 * k as u64)));
        }
        out.push(Complex::new(T::lit(re), T::lit(im)));
    }
    Ok(out)
}

pub(crate) fn to_pairs<T: Real>(values: &[Complex<T>]) -> Vec<[f64; 2]> {
    values.iter().map(|c| [c.re.to_f64_lossy(), c.im.to_f64_lossy()]).collect()
}

pub(crate) fn from_pairs<T: Real>(values: &[[f64; 2]], field: &str) -> Result<Vec<Complex<T>>> {
    values
        .iter()
        .enumerate()
        .map(|(k, p)| {
            if p[0].is_finite() && p[1].is_finite() {
                Ok(Complex::new(T::lit(p[0]), T::lit(p[1])))
            } else {
                Err(Error::Data(format!("{field}[{k}] is not finite")))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_short_and_bad_magic() {
        assert!(matches!(parse::<u32>(vec![0; 5], b"ABCDEFGH"), Err(Error::Format { offset: 0, .. })));
        let mut b = b"ABCDEFGX".to_vec();
        b.extend_from_slice(&1u32.to_le_bytes());
        b.push(b'1');
        assert!(matches!(parse::<u32>(b.clone(), b"ABCDEFGH"), Err(Error::Format { offset: 0, .. })));
        b[7] = b'H';
        assert_eq!(parse::<u32>(b.clone(), b"ABCDEFGH").unwrap().header, 1);
        b[8] = 9;
        assert!(matches!(parse::<u32>(b, b"ABCDEFGH"), Err(Error::Format { offset: 8, .. })));
    }

    #[test]
    fn complex_payload_checks() {
        let mut buf = Vec::new();
        push_complex(&mut buf, &[Complex::new(1.5f64, -0.25)]);
        assert_eq!(take_complex::<f64>(&buf, 20, 1, "x").unwrap(), vec![Complex::new(1.5, -0.25)]);
        let err = take_complex::<f64>(&buf[..15], 20, 1, "x").unwrap_err().to_string();
        assert!(err.contains("expected 16 bytes") && err.contains("found 15"), "{err}");
        push_complex(&mut buf, &[Complex::new(f64::NAN, 0.0)]);
        assert!(matches!(take_complex::<f64>(&buf, 0, 2, "x"), Err(Error::Data(_))));
    }
}
