//! Text input of reals: `p/q`, decimals, and surds such as `(17+1*sqrt(2))/41`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{BigRational, IntervalReal, NumericError, QuadSurd, RealScalar};

/// Input class of a real written as text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RealFormat {
    /// Decide from the syntax: `sqrt` means surd, a `.` means decimal.
    Auto,
    Rational,
    /// A decimal is the interval of one unit in its last digit, centred on it.
    Decimal,
    Surd,
}

impl FromStr for RealFormat {
    type Err = NumericError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(RealFormat::Auto),
            "rational" => Ok(RealFormat::Rational),
            "decimal" => Ok(RealFormat::Decimal),
            "surd" => Ok(RealFormat::Surd),
            _ => Err(NumericError::Parse(s.to_string())),
        }
    }
}

pub fn parse_real(text: &str, format: RealFormat) -> Result<RealScalar, NumericError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || NumericError::Parse(text.to_string());
    let format = match format {
        RealFormat::Auto if s.contains("sqrt") => RealFormat::Surd,
        RealFormat::Auto if s.contains('.') => RealFormat::Decimal,
        RealFormat::Auto => RealFormat::Rational,
        f => f,
    };
    match format {
        RealFormat::Rational => parse_rational(&s).map(RealScalar::Rational).ok_or_else(err),
        RealFormat::Decimal => parse_decimal(&s).ok_or_else(err),
        RealFormat::Surd => parse_surd(&s).map(RealScalar::from).ok_or_else(err),
        RealFormat::Auto => unreachable!(),
    }
}

impl FromStr for RealScalar {
    type Err = NumericError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_real(s, RealFormat::Auto)
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('+').unwrap_or(s);
    if digits.is_empty() || digits == "-" {
        return None;
    }
    digits.parse().ok()
}

fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(parse_int(n)?, d))
        }
        None => parse_int(s).map(BigRational::from_integer),
    }
}

fn parse_decimal(s: &str) -> Option<RealScalar> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let scale = BigInt::from(10).pow(frac_part.len() as u32);
    let mantissa: BigInt = format!("0{int_part}{frac_part}").parse().ok()?;
    let mantissa = if neg { -mantissa } else { mantissa };
    let center = BigRational::new(mantissa, scale.clone());
    let half_ulp = BigRational::new(BigInt::one(), scale * 2);
    Some(RealScalar::Interval(IntervalReal::fixed(
        &center - &half_ulp,
        &center + &half_ulp,
    )))
}

/// Splits at the last `/` that is outside parentheses.
fn split_top_level_div(s: &str) -> (&str, Option<&str>) {
    let mut depth = 0i32;
    let mut split = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => split = Some(i),
            _ => {}
        }
    }
    match split {
        Some(i) => (&s[..i], Some(&s[i + 1..])),
        None => (s, None),
    }
}

fn strip_outer_parens(s: &str) -> &str {
    let mut cur = s;
    while cur.starts_with('(') && cur.ends_with(')') {
        // only strip when the parens match each other
        let inner = &cur[1..cur.len() - 1];
        let mut depth = 0i32;
        let balanced = inner.chars().all(|c| {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            depth >= 0
        });
        if !balanced {
            break;
        }
        cur = inner;
    }
    cur
}

/// Accepts sums of integer terms and `[k*]sqrt(d)` terms, optionally over `/r`.
fn parse_surd(s: &str) -> Option<QuadSurd> {
    let (num, den) = split_top_level_div(s);
    let r = match den {
        Some(d) => parse_int(strip_outer_parens(d))?,
        None => BigInt::one(),
    };
    let num = strip_outer_parens(num);
    let mut p = BigInt::zero();
    let mut q = BigInt::zero();
    let mut radicand: Option<BigInt> = None;
    let bytes: Vec<char> = num.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let mut sign = 1;
        while i < bytes.len() && (bytes[i] == '+' || bytes[i] == '-') {
            if bytes[i] == '-' {
                sign = -sign;
            }
            i += 1;
        }
        let start = i;
        let mut depth = 0;
        while i < bytes.len() {
            match bytes[i] {
                '(' => depth += 1,
                ')' => depth -= 1,
                '+' | '-' if depth == 0 => break,
                _ => {}
            }
            i += 1;
        }
        let term: String = bytes[start..i].iter().collect();
        if term.is_empty() {
            return None;
        }
        if let Some(pos) = term.find("sqrt(") {
            let coef = match term[..pos].strip_suffix('*') {
                Some(c) => parse_int(c)?,
                None if pos == 0 => BigInt::one(),
                None => return None,
            };
            let d = parse_int(term[pos + 5..].strip_suffix(')')?)?;
            match &radicand {
                Some(existing) if *existing != d => return None,
                _ => radicand = Some(d),
            }
            q += coef * sign;
        } else {
            p += parse_int(&term)? * sign;
        }
    }
    QuadSurd::new(p, q, radicand.unwrap_or_else(BigInt::one), r).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_three_forms() {
        let r = parse_real("3/10", RealFormat::Auto).unwrap();
        assert_eq!(r.as_rational().unwrap(), &BigRational::new(3.into(), 10.into()));
        let s = parse_real("(17+1*sqrt(2))/41", RealFormat::Auto).unwrap();
        assert_eq!(s.to_string(), "(17+1*sqrt(2))/41");
        let g = parse_real("(1+sqrt(5))/2", RealFormat::Auto).unwrap();
        assert_eq!(g.to_string(), "(1+1*sqrt(5))/2");
        let h = parse_real("-sqrt(3)/2", RealFormat::Auto).unwrap();
        assert_eq!(h.to_string(), "(0-1*sqrt(3))/2");
        let d = parse_real("0.449127", RealFormat::Auto).unwrap();
        let i = d.approx(10).unwrap();
        assert_eq!(i.width(), BigRational::new(1.into(), 1_000_000.into()));
        assert!(i.contains(&BigRational::new(449127.into(), 1_000_000.into())));
    }

    #[test]
    fn explicit_format_overrides_syntax() {
        // "2" as a decimal is the interval [1.5, 2.5]
        let d = parse_real("2", RealFormat::Decimal).unwrap();
        let i = d.approx(1).unwrap();
        assert_eq!(i.lo(), &BigRational::new(3.into(), 2.into()));
        assert!(parse_real("1.5", RealFormat::Rational).is_err());
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "1/0", "sqrt(2)+sqrt(3)", "abc", "(1+2*sqrt(2)", "1..2", "-"] {
            assert!(parse_real(bad, RealFormat::Auto).is_err(), "{bad}");
        }
    }

    #[test]
    fn surd_with_square_radicand_collapses() {
        let s = parse_real("(1+sqrt(9))/2", RealFormat::Surd).unwrap();
        assert_eq!(s.as_rational().unwrap(), &BigRational::from_integer(2.into()));
    }
}
