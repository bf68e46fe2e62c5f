use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

const MANTISSAS: [u8; 3] = [1, 2, 5];

/// Relative distance within which a computed value is treated as a ladder
/// value (ratios like `p0 / p2` rarely land bit-exactly).
const SNAP: f64 = 1e-9;

/// A value `m x 10^e` with `m` in `{1, 2, 5}`: three points per decade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ladder {
    mantissa: u8,
    exponent: i32,
}

impl Ladder {
    pub fn new(mantissa: u8, exponent: i32) -> Result<Self> {
        if !MANTISSAS.contains(&mantissa) || !(-300..=300).contains(&exponent) {
            return Err(Error::InvalidArgument(format!(
                "{mantissa}e{exponent} is not a 1-2-5 ladder value"
            )));
        }
        Ok(Self { mantissa, exponent })
    }

    pub fn mantissa(self) -> u8 {
        self.mantissa
    }

    pub fn exponent(self) -> i32 {
        self.exponent
    }

    /// The closest `f64`, parsed from the decimal form so that e.g. `2e-3`
    /// is the same number a user types.
    pub fn value(self) -> f64 {
        format!("{}e{}", self.mantissa, self.exponent)
            .parse()
            .expect("ladder literal parses")
    }

    pub fn log10(self) -> f64 {
        f64::from(self.mantissa).log10() + f64::from(self.exponent)
    }

    /// Ladder value equal to `v` up to rounding noise, if any.
    pub fn snap(v: f64) -> Option<Self> {
        let lo = Self::floor(v)?;
        [lo, lo.next_up()]
            .into_iter()
            .find(|l| (l.value() - v).abs() <= SNAP * v)
    }

    /// Ladder value exactly equal to `v`.
    pub fn exact(v: f64) -> Option<Self> {
        let lo = Self::floor(v)?;
        [lo, lo.next_up()].into_iter().find(|l| l.value() == v)
    }

    /// Largest ladder value `<= v`.
    fn floor(v: f64) -> Option<Self> {
        if !(v > 0.0) || !v.is_finite() {
            return None;
        }
        let mut e = v.log10().floor() as i32;
        // Guard against log10 landing one decade off near powers of ten.
        if format!("1e{e}").parse::<f64>().unwrap() > v {
            e -= 1;
        }
        let mut best = Ladder {
            mantissa: 1,
            exponent: e,
        };
        for m in MANTISSAS {
            let l = Ladder {
                mantissa: m,
                exponent: e,
            };
            if l.value() <= v {
                best = l;
            }
        }
        Some(best)
    }

    pub fn next_up(self) -> Self {
        match self.mantissa {
            1 => Ladder {
                mantissa: 2,
                ..self
            },
            2 => Ladder {
                mantissa: 5,
                ..self
            },
            _ => Ladder {
                mantissa: 1,
                exponent: self.exponent + 1,
            },
        }
    }

    pub fn next_down(self) -> Self {
        match self.mantissa {
            5 => Ladder {
                mantissa: 2,
                ..self
            },
            2 => Ladder {
                mantissa: 1,
                ..self
            },
            _ => Ladder {
                mantissa: 5,
                exponent: self.exponent - 1,
            },
        }
    }

    /// Every ladder value in `[lo, hi]`.
    pub fn range(lo: Ladder, hi: Ladder) -> Vec<Ladder> {
        let mut out = Vec::new();
        let mut l = lo;
        while l <= hi {
            out.push(l);
            l = l.next_up();
        }
        out
    }
}

impl Ord for Ladder {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.exponent, self.mantissa).cmp(&(other.exponent, other.mantissa))
    }
}

impl PartialOrd for Ladder {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical text: plain decimals from `0.01` to `500`, otherwise `2e-3`
/// style.
impl fmt::Display for Ladder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m, e) = (self.mantissa, self.exponent);
        match e {
            -2 => write!(f, "0.0{m}"),
            -1 => write!(f, "0.{m}"),
            0 => write!(f, "{m}"),
            1 => write!(f, "{m}0"),
            2 => write!(f, "{m}00"),
            _ => write!(f, "{m}e{e}"),
        }
    }
}

impl FromStr for Ladder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("'{s}' is not a number")))?;
        Ladder::exact(v)
            .ok_or_else(|| Error::InvalidArgument(format!("'{s}' is not a 1-2-5 ladder value")))
    }
}

impl Serialize for Ladder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ladder {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Ladder;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a 1-2-5 ladder value as a number or string")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Ladder, E> {
                v.parse().map_err(E::custom)
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Ladder, E> {
                Ladder::exact(v)
                    .ok_or_else(|| E::custom(format!("{v} is not a 1-2-5 ladder value")))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Ladder, E> {
                self.visit_f64(v as f64)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Ladder, E> {
                self.visit_f64(v as f64)
            }
        }
        d.deserialize_any(V)
    }
}

/// One database axis and its allowed range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    R0,
    R1,
    P2,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::R0, Axis::R1, Axis::P2];

    pub fn range(self) -> (Ladder, Ladder) {
        let l = |m, e| Ladder {
            mantissa: m,
            exponent: e,
        };
        match self {
            Axis::R0 => (l(1, -2), l(2, 2)),
            Axis::R1 => (l(1, -2), l(1, 0)),
            Axis::P2 => (l(1, -4), l(2, -2)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::R0 => "r0",
            Axis::R1 => "r1",
            Axis::P2 => "p2",
        }
    }

    pub fn contains(self, l: Ladder) -> bool {
        let (lo, hi) = self.range();
        lo <= l && l <= hi
    }

    /// Every ladder value of the axis.
    pub fn values(self) -> Vec<Ladder> {
        let (lo, hi) = self.range();
        Ladder::range(lo, hi)
    }
}

/// Ladder values bracketing a query on one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: Ladder,
    pub hi: Ladder,
    /// The query, after clamping into the axis range.
    pub value: f64,
    pub clamped: bool,
}

/// Nearest ladder values below and above `v` on `axis`; a ladder value gives
/// `lo == hi`. Queries outside the axis clamp to its edge.
pub fn ladder_neighbors(v: f64, axis: Axis) -> Result<Bracket> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "{} must be positive, got {v}",
            axis.name()
        )));
    }
    let (min, max) = axis.range();
    if v < min.value() * (1.0 - SNAP) {
        return Ok(Bracket {
            lo: min,
            hi: min,
            value: min.value(),
            clamped: true,
        });
    }
    if v > max.value() * (1.0 + SNAP) {
        return Ok(Bracket {
            lo: max,
            hi: max,
            value: max.value(),
            clamped: true,
        });
    }
    if let Some(l) = Ladder::snap(v) {
        return Ok(Bracket {
            lo: l,
            hi: l,
            value: l.value(),
            clamped: false,
        });
    }
    let lo = Ladder::floor(v).expect("positive finite");
    Ok(Bracket {
        lo,
        hi: lo.next_up(),
        value: v,
        clamped: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> Ladder {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_text() {
        for (m, e, s) in [
            (2, -3, "2e-3"),
            (5, -2, "0.05"),
            (1, -2, "0.01"),
            (2, -1, "0.2"),
            (1, 0, "1"),
            (5, 1, "50"),
            (2, 2, "200"),
            (1, 3, "1e3"),
            (1, -4, "1e-4"),
        ] {
            let v = Ladder::new(m, e).unwrap();
            assert_eq!(v.to_string(), s);
            assert_eq!(l(s), v);
        }
        assert_eq!(l("0.002"), l("2e-3"));
        assert!("3e-3".parse::<Ladder>().is_err());
        assert!("abc".parse::<Ladder>().is_err());
        assert!(Ladder::new(3, 0).is_err());
    }

    #[test]
    fn neighbors() {
        let b = ladder_neighbors(0.3, Axis::R0).unwrap();
        assert_eq!((b.lo, b.hi, b.clamped), (l("0.2"), l("0.5"), false));
        let b = ladder_neighbors(0.2, Axis::R0).unwrap();
        assert_eq!((b.lo, b.hi), (l("0.2"), l("0.2")));
        let b = ladder_neighbors(300.0, Axis::R0).unwrap();
        assert_eq!((b.lo, b.hi, b.clamped), (l("200"), l("200"), true));
        let b = ladder_neighbors(1e-5, Axis::P2).unwrap();
        assert_eq!((b.lo, b.hi, b.clamped), (l("1e-4"), l("1e-4"), true));
        let b = ladder_neighbors(0.1, Axis::P2).unwrap();
        assert_eq!(b.hi, l("0.02"));
        let b = ladder_neighbors(10.0 / 3.0, Axis::R0).unwrap();
        assert_eq!((b.lo, b.hi), (l("2"), l("5")));
        let b = ladder_neighbors(100.66666666666667, Axis::R0).unwrap();
        assert_eq!((b.lo, b.hi), (l("100"), l("200")));
        // Ratios that are ladder values up to rounding snap onto the grid.
        let b = ladder_neighbors(2e-3 / 1e-3 * (1.0 + 1e-15), Axis::R0).unwrap();
        assert_eq!((b.lo, b.hi), (l("2"), l("2")));
        assert!(ladder_neighbors(0.0, Axis::R1).is_err());
    }

    #[test]
    fn exact_membership_round_trips() {
        for axis in Axis::ALL {
            for v in axis.values() {
                assert_eq!(Ladder::exact(v.value()), Some(v));
                assert_eq!(v.to_string().parse::<Ladder>().unwrap(), v);
                let b = ladder_neighbors(v.value(), axis).unwrap();
                assert_eq!((b.lo, b.hi), (v, v));
            }
        }
        assert_eq!(Axis::R0.values().len(), 14);
        assert_eq!(Axis::R1.values().len(), 7);
        assert_eq!(Axis::P2.values().len(), 8);
    }

    #[test]
    fn ordering() {
        assert!(l("5e-3") < l("0.01"));
        assert!(l("1") < l("2"));
        assert_eq!(l("5").next_up(), l("10"));
        assert_eq!(l("0.1").next_down(), l("0.05"));
    }
}
