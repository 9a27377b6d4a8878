use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A finite literal in a local field.
///
/// `d0,d1,…@v` stands for `Σ d_j π^{v+j}`; a leading `-` negates the sum.
/// A bare integer such as `-1` or `3` is the image of that integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Digits { negative: bool, digits: Vec<u32>, valuation: i64 },
    Integer(i64),
}

impl Scalar {
    pub fn digits(digits: Vec<u32>, valuation: i64) -> Self {
        Scalar::Digits { negative: false, digits, valuation }
    }

    /// `π^v`.
    pub fn uniformizer_power(v: i64) -> Self {
        Scalar::digits(vec![1], v)
    }
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || Error::Scenario(format!("malformed scalar literal {s:?}"));
        if let Some((lhs, rhs)) = s.split_once('@') {
            let (negative, lhs) = match lhs.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, lhs),
            };
            let valuation: i64 = rhs.trim().parse().map_err(|_| bad())?;
            let digits = lhs
                .split(',')
                .map(|d| d.trim().parse::<u32>().map_err(|_| bad()))
                .collect::<Result<Vec<_>, _>>()?;
            if digits.is_empty() {
                return Err(bad());
            }
            Ok(Scalar::Digits { negative, digits, valuation })
        } else {
            s.parse::<i64>().map(Scalar::Integer).map_err(|_| bad())
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Integer(n) => write!(f, "{n}"),
            Scalar::Digits { negative, digits, valuation } => {
                if *negative {
                    f.write_str("-")?;
                }
                let body: Vec<String> = digits.iter().map(u32::to_string).collect();
                write!(f, "{}@{}", body.join(","), valuation)
            }
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_digit_strings_and_integers() {
        assert_eq!(
            "1,0,1@-3".parse::<Scalar>().unwrap(),
            Scalar::Digits { negative: false, digits: vec![1, 0, 1], valuation: -3 }
        );
        assert_eq!(
            "-1@0".parse::<Scalar>().unwrap(),
            Scalar::Digits { negative: true, digits: vec![1], valuation: 0 }
        );
        assert_eq!("-1".parse::<Scalar>().unwrap(), Scalar::Integer(-1));
        assert!("1,x@0".parse::<Scalar>().is_err());
        assert!("@2".parse::<Scalar>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["1,1@0", "-2,0,1@5", "7", "-3"] {
            let x: Scalar = s.parse().unwrap();
            assert_eq!(x.to_string(), s);
        }
    }
}
