//! Token-level parsing and printing of scalars for both arithmetic modes.

use liplift_core::{Rational, Scalar};
use num_bigint::BigInt;
use num_traits::Zero;

pub trait TextScalar: Scalar {
    fn parse_token(token: &str) -> Result<Self, String>;

    fn render(&self) -> String {
        self.to_string()
    }
}

impl TextScalar for f64 {
    fn parse_token(token: &str) -> Result<Self, String> {
        if token.contains('/') {
            return Err(format!("fraction `{token}` requires --mode rational"));
        }
        match token.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(format!("`{token}` is not a finite number")),
        }
    }
}

impl TextScalar for Rational {
    /// Accepts integers, `p/q` fractions and exact decimals (`-1.25`, `3e-2`).
    fn parse_token(token: &str) -> Result<Self, String> {
        if let Some((p, q)) = token.split_once('/') {
            let p: BigInt = p
                .parse()
                .map_err(|_| format!("bad numerator in `{token}`"))?;
            let q: BigInt = q
                .parse()
                .map_err(|_| format!("bad denominator in `{token}`"))?;
            if q.is_zero() {
                return Err(format!("zero denominator in `{token}`"));
            }
            return Ok(Rational::new(p, q));
        }
        parse_decimal(token).ok_or_else(|| format!("`{token}` is not a number"))
    }
}

fn parse_decimal(token: &str) -> Option<Rational> {
    let (mantissa, exponent) = match token.find(['e', 'E']) {
        Some(i) => (&token[..i], token[i + 1..].parse::<i32>().ok()?),
        None => (token, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let all: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(all);
    let factor = Rational::from_integer(num_traits::pow(ten, scale.unsigned_abs() as usize));
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    if negative {
        value = -value;
    }
    Some(value)
}
