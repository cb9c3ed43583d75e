//! Number and list syntax accepted on the command line.
//!
//! Reals may be plain floats, fractions (`5/4`) or multiples of pi
//! (`pi`, `8pi`, `8*pi`, `pi/2`). Lists are comma separated; a list entry of
//! the form `lo:hi:n` expands to `n` evenly spaced values including both ends.

use std::f64::consts::PI;

fn atom(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Some(head) = s.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*').trim();
        let k = match head {
            "" | "+" => 1.0,
            "-" => -1.0,
            h => h
                .parse::<f64>()
                .map_err(|e| format!("bad number `{s}`: {e}"))?,
        };
        return Ok(k * PI);
    }
    s.parse::<f64>()
        .map_err(|e| format!("bad number `{s}`: {e}"))
}

pub fn real(s: &str) -> Result<f64, String> {
    let v = match s.split_once('/') {
        Some((num, den)) => atom(num)? / atom(den)?,
        None => atom(s)?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not a finite number"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealList(pub Vec<f64>);

pub fn real_list(s: &str) -> Result<RealList, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [one] => out.push(real(one)?),
            [lo, hi, n] => {
                let (lo, hi) = (real(lo)?, real(hi)?);
                let n: usize = n
                    .trim()
                    .parse()
                    .map_err(|e| format!("bad count in `{item}`: {e}"))?;
                match n {
                    0 => return Err(format!("empty range `{item}`")),
                    1 => out.push(lo),
                    _ => out.extend((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)),
                }
            }
            _ => {
                return Err(format!(
                    "bad list entry `{item}`; expected a number or lo:hi:n"
                ))
            }
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(RealList(out))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignList(pub Vec<i8>);

/// Symbols in `{-1, 0, 1}`, written as numbers or `+`, `-`, `0`.
pub fn sign_list(s: &str) -> Result<SignList, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let v = match item {
            "+" | "+1" | "1" => 1,
            "-" | "-1" => -1,
            "0" => 0,
            _ => return Err(format!("symbol `{item}` not in {{-1, 0, 1}}")),
        };
        out.push(v);
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(SignList(out))
}
