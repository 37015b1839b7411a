use so3_pca::{Error, Result};

/// Parses `L=<int>,band=<float>`; the band accepts `pi`, `<k>pi` or `<k>*pi`.
pub fn parse_spec(text: &str) -> Result<(usize, f64)> {
    let mut l = None;
    let mut band = None;
    for part in text.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Domain(format!("spec field {part:?}: expected key=value")))?;
        match key.trim() {
            "L" | "l" => {
                l = Some(value.trim().parse::<usize>().map_err(|_| Error::Domain(format!("spec L: {value:?} is not an integer")))?)
            }
            "band" | "band_limit" => band = Some(parse_band(value.trim())?),
            other => return Err(Error::Domain(format!("spec: unknown field {other:?}"))),
        }
    }
    match (l, band) {
        (Some(l), Some(b)) => Ok((l, b)),
        _ => Err(Error::Domain(format!("spec {text:?}: need both L and band"))),
    }
}

fn parse_band(v: &str) -> Result<f64> {
    let bad = || Error::Domain(format!("spec band: {v:?} is not a number"));
    match v.strip_suffix("pi") {
        Some(k) => {
            let k = k.trim_end_matches('*').trim();
            let factor = if k.is_empty() { 1.0 } else { k.parse::<f64>().map_err(|_| bad())? };
            Ok(factor * std::f64::consts::PI)
        }
        None => v.parse::<f64>().map_err(|_| bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn forms() {
        assert_eq!(parse_spec("L=4,band=6pi").unwrap(), (4, 6.0 * PI));
        assert_eq!(parse_spec("L=2, band=2*pi").unwrap(), (2, 2.0 * PI));
        assert_eq!(parse_spec("band=pi,L=0").unwrap(), (0, PI));
        assert_eq!(parse_spec("L=3,band=12.5").unwrap(), (3, 12.5));
        assert!(parse_spec("L=3").is_err());
        assert!(parse_spec("L=x,band=1").is_err());
        assert!(parse_spec("L=3,band=1,q=2").is_err());
    }
}
