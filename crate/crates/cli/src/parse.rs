//! Command-line value syntax: complex tokens `re+imj`, comma lists and
//! `a:b` pairs.

use num_complex::Complex64;

use crate::error::{CliError, Result};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn real(token: &str, whole: &str) -> Result<f64> {
    token.parse::<f64>().map_err(|_| usage(format!("cannot parse {whole:?} as a number")))
}

/// Parses `1.5`, `2j`, `-j`, `0.3-1.2j`, `1e-3+4e2j`. `i` is accepted in
/// place of `j`, and `−` (U+2212) in place of `-`.
pub fn complex(token: &str) -> Result<Complex64> {
    let s: String = token.replace('\u{2212}', "-").chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(usage("empty complex number"));
    }
    let Some(body) = s.strip_suffix(['j', 'i']) else {
        return Ok(Complex64::new(real(&s, token)?, 0.0));
    };
    // split at the last sign that is not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => real(other, token)?,
    };
    Ok(Complex64::new(real(re, token)?, im))
}

/// Comma-separated complex numbers; an empty string is an empty list.
pub fn complex_list(text: &str) -> Result<Vec<Complex64>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(complex).collect()
}

/// Comma-separated real numbers.
pub fn real_list(text: &str) -> Result<Vec<f64>> {
    complex_list(text)?
        .into_iter()
        .map(|z| {
            if z.im == 0.0 {
                Ok(z.re)
            } else {
                Err(usage(format!("expected a real shift, got {z}")))
            }
        })
        .collect()
}

/// `a:b` pairs, comma-separated.
pub fn pairs(text: &str) -> Result<Vec<(Complex64, Complex64)>> {
    if text.trim().is_empty() {
        return Err(usage("at least one a:b pair is required"));
    }
    text.split(',')
        .map(|p| {
            let (a, b) = p.split_once(':').ok_or_else(|| usage(format!("expected a:b, got {p:?}")))?;
            Ok((complex(a)?, complex(b)?))
        })
        .collect()
}

/// Comma-separated positive orders, returned sorted and deduplicated.
pub fn n_list(text: &str) -> Result<Vec<usize>> {
    let mut ns = text
        .split(',')
        .map(|t| {
            let n: usize = t.trim().parse().map_err(|_| usage(format!("cannot parse {t:?} as an order n")))?;
            if n == 0 {
                return Err(usage("orders must be at least 1"));
            }
            Ok(n)
        })
        .collect::<Result<Vec<_>>>()?;
    ns.sort_unstable();
    ns.dedup();
    Ok(ns)
}
