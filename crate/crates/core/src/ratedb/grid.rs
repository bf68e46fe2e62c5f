use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ladder::{Axis, Ladder};
use super::DbKey;
use crate::error::{Error, Result};

pub const DISTANCES: [u32; 4] = [3, 4, 5, 6];

/// A single grid point named explicitly rather than through the product of
/// the axis lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridPoint {
    pub d: u32,
    pub r0: Ladder,
    pub r1: Ladder,
    pub p2: Ladder,
}

/// Points to simulate: the product `distances x r0 x r1 x p2` plus any
/// extra points, with the stopping rule per point.
///
/// ```json
/// {
///   "distances": [3, 5],
///   "p2": ["1e-3", 0.002],
///   "r0": [1, 2],
///   "r1": [1],
///   "extra": [{"d": 3, "r0": 100, "r1": 1, "p2": "1e-3"}],
///   "target_fails": 100,
///   "shot_cap": 1000000
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub distances: Vec<u32>,
    #[serde(default)]
    pub p2: Vec<Ladder>,
    #[serde(default)]
    pub r0: Vec<Ladder>,
    #[serde(default)]
    pub r1: Vec<Ladder>,
    #[serde(default)]
    pub extra: Vec<GridPoint>,
    #[serde(default = "default_target_fails")]
    pub target_fails: u64,
    #[serde(default = "default_shot_cap")]
    pub shot_cap: u64,
}

fn default_target_fails() -> u64 {
    100
}

fn default_shot_cap() -> u64 {
    2_000_000
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            distances: Vec::new(),
            p2: Vec::new(),
            r0: Vec::new(),
            r1: Vec::new(),
            extra: Vec::new(),
            target_fails: default_target_fails(),
            shot_cap: default_shot_cap(),
        }
    }
}

fn lad(s: &str) -> Ladder {
    s.parse().expect("built-in ladder literal")
}

impl GridSpec {
    /// The desk-scale grid: a coarse product around the useful region plus
    /// the corners needed to check against published numbers.
    pub fn desk_default() -> Self {
        let mut extra = Vec::new();
        for r0 in ["100", "200"] {
            extra.push(GridPoint {
                d: 3,
                r0: lad(r0),
                r1: lad("1"),
                p2: lad("1e-3"),
            });
        }
        for d in DISTANCES {
            for r0 in ["2", "5"] {
                extra.push(GridPoint {
                    d,
                    r0: lad(r0),
                    r1: lad("1"),
                    p2: lad("1e-3"),
                });
            }
        }
        Self {
            distances: DISTANCES.to_vec(),
            p2: ["2e-3", "5e-3", "0.01", "0.02"].map(lad).to_vec(),
            r0: ["0.5", "1", "2", "5"].map(lad).to_vec(),
            r1: ["0.2", "0.5", "1"].map(lad).to_vec(),
            extra,
            ..Self::default()
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let check_d = |d: u32| {
            if DISTANCES.contains(&d) {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "distance {d} is outside the database range 3..=6"
                )))
            }
        };
        let check_axis = |axis: Axis, v: Ladder| {
            if axis.contains(v) {
                Ok(())
            } else {
                let (lo, hi) = axis.range();
                Err(Error::InvalidArgument(format!(
                    "{} = {v} is outside [{lo}, {hi}]",
                    axis.name()
                )))
            }
        };
        for &d in &self.distances {
            check_d(d)?;
        }
        for (axis, values) in [(Axis::R0, &self.r0), (Axis::R1, &self.r1), (Axis::P2, &self.p2)] {
            for &v in values {
                check_axis(axis, v)?;
            }
        }
        for p in &self.extra {
            check_d(p.d)?;
            check_axis(Axis::R0, p.r0)?;
            check_axis(Axis::R1, p.r1)?;
            check_axis(Axis::P2, p.p2)?;
            // r0 * p2 is a syndrome error probability.
            if p.r0.value() * p.p2.value() > 0.5 {
                return Err(Error::InvalidArgument(format!(
                    "r0 = {} at p2 = {} gives a syndrome error rate above 1/2",
                    p.r0, p.p2
                )));
            }
        }
        if self.target_fails == 0 || self.shot_cap == 0 {
            return Err(Error::InvalidArgument(
                "target_fails and shot_cap must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Distinct points in key order. Product points whose syndrome rate
    /// `r0 * p2` exceeds 1/2 are skipped.
    pub fn points(&self) -> Vec<DbKey> {
        let mut set = BTreeSet::new();
        for &d in &self.distances {
            for &r0 in &self.r0 {
                for &r1 in &self.r1 {
                    for &p2 in &self.p2 {
                        if r0.value() * p2.value() <= 0.5 {
                            set.insert(DbKey { d, r0, r1, p2 });
                        }
                    }
                }
            }
        }
        for p in &self.extra {
            set.insert(DbKey {
                d: p.d,
                r0: p.r0,
                r1: p.r1,
                p2: p.p2,
            });
        }
        set.into_iter().collect()
    }
}
