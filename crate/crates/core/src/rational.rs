//! Exact rational helpers: the `p/q` text form and integer scaling of costs.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Parses `"p/q"` or `"p"`. Whitespace is not accepted.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::parse("rational", format!("malformed rational {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::parse(
            "rational",
            format!("zero denominator in {text:?}"),
        ));
    }
    Ok(Rational::new(num, den))
}

/// Canonical text: `p` for integers, otherwise `p/q` with `q > 0`, gcd 1.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

pub fn from_int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Common denominator scaling of a cost vector so shortest-path code can work
/// on machine integers. `scaled[i] / denominator == costs[i]`.
#[derive(Debug, Clone)]
pub struct ScaledCosts {
    pub denominator: BigInt,
    pub scaled: Vec<u128>,
}

impl ScaledCosts {
    pub fn new(costs: &[Rational]) -> Result<Self> {
        let mut denominator = BigInt::one();
        for c in costs {
            denominator = denominator.lcm(c.denom());
        }
        let mut scaled = Vec::with_capacity(costs.len());
        for c in costs {
            if c.is_negative() {
                return Err(Error::InvalidInput("negative arc cost".into()));
            }
            let v = (c * Rational::from_integer(denominator.clone())).to_integer();
            let v = v
                .to_u128()
                .filter(|v| *v <= u64::MAX as u128)
                .ok_or_else(|| Error::InvalidInput("arc cost too large".into()))?;
            scaled.push(v);
        }
        Ok(ScaledCosts {
            denominator,
            scaled,
        })
    }

    pub fn to_rational(&self, scaled: u128) -> Rational {
        Rational::new(BigInt::from(scaled), self.denominator.clone())
    }
}

/// `Σ costs[i] * x[i]` exactly.
pub fn dot_cost(costs: &[Rational], x: &[i64]) -> Rational {
    costs
        .iter()
        .zip(x)
        .fold(Rational::zero(), |acc, (c, &v)| acc + c * from_int(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_normalise() {
        assert_eq!(format_rational(&parse_rational("4/6").unwrap()), "2/3");
        assert_eq!(format_rational(&parse_rational("3/-6").unwrap()), "-1/2");
        assert_eq!(format_rational(&parse_rational("8/4").unwrap()), "2");
        assert_eq!(format_rational(&parse_rational("0").unwrap()), "0");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/2").is_err());
        assert!(parse_rational(" 1").is_err());
    }

    #[test]
    fn scaling() {
        let costs = vec![
            parse_rational("1/2").unwrap(),
            parse_rational("1/3").unwrap(),
            from_int(2),
        ];
        let s = ScaledCosts::new(&costs).unwrap();
        assert_eq!(s.denominator, BigInt::from(6));
        assert_eq!(s.scaled, vec![3, 2, 12]);
        assert_eq!(s.to_rational(5), parse_rational("5/6").unwrap());
        assert!(ScaledCosts::new(&[from_int(-1)]).is_err());
    }
}
