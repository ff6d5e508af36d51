use std::str::FromStr;

use num_complex::Complex;
use thiserror::Error;

use super::ComplexPoly;
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParsePolyError {
    #[error("empty coefficient list")]
    Empty,
    #[error("coefficient {index}: cannot parse `{token}`")]
    BadCoefficient { index: usize, token: String },
    #[error("leading coefficient is zero")]
    ZeroLeading,
}

fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().ok()?;
            let den: f64 = den.trim().parse().ok()?;
            (den != 0.0).then_some(num / den)
        }
        None => s.parse().ok(),
    }
}

fn parse_imag(s: &str) -> Option<f64> {
    let body = s.trim().strip_suffix('i')?;
    match body.trim() {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        b => parse_real(b),
    }
}

/// Parses `x`, `yi`, `x+yi`, `x-yi`, where each part may be a rational `p/q`.
pub(crate) fn parse_complex(token: &str) -> Option<Complex<f64>> {
    let t: String = token.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return None;
    }
    if !t.ends_with('i') {
        return parse_real(&t).map(|re| Complex::new(re, 0.0));
    }
    let bytes = t.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Some(Complex::new(parse_real(&t[..k])?, parse_imag(&t[k..])?)),
        None => parse_imag(&t).map(|im| Complex::new(0.0, im)),
    }
}

impl<T: Real> FromStr for ComplexPoly<T> {
    type Err = ParsePolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().is_empty() {
            return Err(ParsePolyError::Empty);
        }
        let coeffs = s
            .split(',')
            .enumerate()
            .map(|(index, token)| {
                parse_complex(token)
                    .map(crate::scalar::from_c64)
                    .ok_or_else(|| ParsePolyError::BadCoefficient {
                        index,
                        token: token.trim().to_string(),
                    })
            })
            .collect::<Result<Vec<Complex<T>>, _>>()?;
        let poly = ComplexPoly::new(coeffs);
        if poly.degree() > 0 || poly.coeffs[0] != Complex::new(T::zero(), T::zero()) {
            Ok(poly)
        } else {
            Err(ParsePolyError::ZeroLeading)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_tokens() {
        assert_eq!(parse_complex("1.5"), Some(Complex::new(1.5, 0.0)));
        assert_eq!(parse_complex("-2i"), Some(Complex::new(0.0, -2.0)));
        assert_eq!(parse_complex("3-4i"), Some(Complex::new(3.0, -4.0)));
        assert_eq!(parse_complex("1/2+3/4i"), Some(Complex::new(0.5, 0.75)));
        assert_eq!(parse_complex("-i"), Some(Complex::new(0.0, -1.0)));
        assert_eq!(parse_complex("1e-3+2e-2i"), Some(Complex::new(1e-3, 2e-2)));
        assert_eq!(parse_complex("-1e+2"), Some(Complex::new(-100.0, 0.0)));
        assert_eq!(parse_complex("abc"), None);
        assert_eq!(parse_complex("1/0"), None);
    }

    #[test]
    fn polynomial_round_trip_through_display() {
        let p: ComplexPoly<f64> = "0,-15/4,0,10,0,-12".parse().unwrap();
        assert_eq!(p.degree(), 5);
        assert_eq!(p.coeff(1), Complex::new(-3.75, 0.0));
        let q: ComplexPoly<f64> = format!("{p:.17}").parse().unwrap();
        assert_eq!(p, q);
        let z: ComplexPoly<f64> = "1+2i, -0.5i".parse().unwrap();
        assert_eq!(z.coeff(1), Complex::new(0.0, -0.5));
    }

    #[test]
    fn bad_token_reports_index() {
        let err = "1,2,x".parse::<ComplexPoly<f64>>().unwrap_err();
        assert_eq!(
            err,
            ParsePolyError::BadCoefficient {
                index: 2,
                token: "x".into()
            }
        );
    }
}
