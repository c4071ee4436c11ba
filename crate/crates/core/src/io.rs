//! Text encodings shared by the result writers.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Formats a complex number as `re+imj` (e.g. `0.5-1.25j`), using the
/// shortest representation that parses back to the same value.
pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:?}{}{:?}j", z.re, sign, z.im.abs())
}

/// Parses the `re+imj` encoding produced by [`format_complex`].
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::domain(format!("malformed complex number '{s}'"));
    let body = s.trim().strip_suffix('j').ok_or_else(bad)?;
    // The sign separating the parts is the last '+' or '-' not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let re: f64 = body[..split].parse().map_err(|_| bad())?;
    let im: f64 = body[split..].parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}
