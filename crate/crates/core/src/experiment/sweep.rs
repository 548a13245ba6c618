use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// Longest sweep accepted from text; guards against `0:1e12:1`.
pub const MAX_POINTS: usize = 100_000;

/// Non-empty, strictly increasing list of finite values.
///
/// Parses from `a:b:step` (inclusive of `b` up to rounding), a comma list
/// `a,b,c`, or a single number.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep(Vec<f64>);

impl Sweep {
    pub fn new(values: Vec<f64>) -> Result<Self, String> {
        if values.is_empty() {
            return Err("sweep is empty".into());
        }
        if values.len() > MAX_POINTS {
            return Err(format!("sweep has more than {MAX_POINTS} points"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(format!("sweep value {v} is not finite"));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err("sweep values must be strictly increasing".into());
        }
        Ok(Self(values))
    }

    pub fn single(v: f64) -> Self {
        Self(vec![v])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.0[0]
    }
}

fn parse_number(s: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| format!("`{}` is not a number", s.trim()))
}

impl FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() != 3 {
                return Err(format!("range `{s}` must be start:stop:step"));
            }
            let (a, b, step) = (parse_number(parts[0])?, parse_number(parts[1])?, parse_number(parts[2])?);
            if !(step > 0.0) || !step.is_finite() {
                return Err(format!("range step {step} must be positive"));
            }
            if !(b >= a) || !a.is_finite() || !b.is_finite() {
                return Err(format!("range `{s}` must have finite start <= stop"));
            }
            let span = (b - a) / step;
            if span >= MAX_POINTS as f64 {
                return Err(format!("range `{s}` has more than {MAX_POINTS} points"));
            }
            let n = (span + 1e-9).floor() as usize;
            Sweep::new((0..=n).map(|i| a + i as f64 * step).collect())
        } else {
            Sweep::new(s.split(',').map(parse_number).collect::<Result<_, _>>()?)
        }
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl Serialize for Sweep {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Sweep {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct SweepVisitor;

        impl<'de> Visitor<'de> for SweepVisitor {
            type Value = Sweep;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number, a list of numbers, or a \"start:stop:step\" string")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Sweep, E> {
                Sweep::new(vec![v]).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Sweep, E> {
                self.visit_f64(v as f64)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Sweep, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Sweep, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Sweep, A::Error> {
                let mut values = Vec::new();
                while let Some(v) = seq.next_element::<f64>()? {
                    if values.len() >= MAX_POINTS {
                        return Err(de::Error::custom("sweep too long"));
                    }
                    values.push(v);
                }
                Sweep::new(values).map_err(de::Error::custom)
            }
        }

        d.deserialize_any(SweepVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ranges() {
        assert_eq!("0:20:5".parse::<Sweep>().unwrap().values(), &[0.0, 5.0, 10.0, 15.0, 20.0]);
        assert_eq!("0:1:0.1".parse::<Sweep>().unwrap().len(), 11);
        assert_eq!("0:9:3".parse::<Sweep>().unwrap().values(), &[0.0, 3.0, 6.0, 9.0]);
        assert_eq!("0:10:3".parse::<Sweep>().unwrap().values(), &[0.0, 3.0, 6.0, 9.0]);
        assert_eq!("15".parse::<Sweep>().unwrap().values(), &[15.0]);
        assert_eq!("8, 16,32".parse::<Sweep>().unwrap().values(), &[8.0, 16.0, 32.0]);
    }

    #[test]
    fn rejects() {
        for bad in ["", "1:0:1", "0:1:0", "0:1:-1", "a", "1,1", "2,1", "0:1", "0:1e12:1", "nan", "0:inf:1"] {
            assert!(bad.parse::<Sweep>().is_err(), "{bad}");
        }
    }

    #[test]
    fn json_forms() {
        let a: Sweep = serde_json::from_str("\"0:10:5\"").unwrap();
        let b: Sweep = serde_json::from_str("[0, 5, 10]").unwrap();
        let c: Sweep = serde_json::from_str("7").unwrap();
        assert_eq!(a, b);
        assert_eq!(c.values(), &[7.0]);
        assert!(serde_json::from_str::<Sweep>("[]").is_err());
        assert!(serde_json::from_str::<Sweep>("[3, 1]").is_err());
        assert_eq!(serde_json::to_string(&b).unwrap(), "[0.0,5.0,10.0]");
    }

    proptest! {
        #[test]
        fn parsed_ranges_are_valid(a in -100.0f64..100.0, len in 0.0f64..50.0, step in 0.01f64..10.0) {
            let s = format!("{a}:{}:{step}", a + len);
            let sw: Sweep = s.parse().unwrap();
            prop_assert!(sw.values().windows(2).all(|w| w[1] > w[0]));
            prop_assert!(*sw.values().last().unwrap() <= a + len + 1e-6 * step);
            prop_assert_eq!(sw.first(), a);
        }
    }
}
