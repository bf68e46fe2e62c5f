//! Logical error rates at any distance from the database: log-space
//! interpolation at `d = 3..=6`, then separate exponential fits for odd and
//! even distances.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::error_model::{reduce, GateErrorModel, ReducedRates, Sector};
use crate::ratedb::{ladder_neighbors, Axis, Bracket, DbKey, Ladder, RateDatabase, DISTANCES};

/// Largest distance [`solve_distance`] considers.
pub const MAX_DISTANCE: u32 = 1001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Warning {
    /// A ratio or rate fell outside the database axes and was clamped.
    Clamped,
    AsymmetricCnot,
    /// A database corner has fewer than 100 failures, or a zero rate.
    LowConfidence,
    /// The fitted per-distance ratio is not below one.
    AboveThreshold,
}

impl Warning {
    pub fn name(self) -> &'static str {
        match self {
            Warning::Clamped => "clamped",
            Warning::AsymmetricCnot => "asymmetric_cnot",
            Warning::LowConfidence => "low_confidence",
            Warning::AboveThreshold => "above_threshold",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interpolation {
    pub value: f64,
    pub warnings: BTreeSet<Warning>,
}

fn bracket(v: f64, axis: Axis) -> Result<Bracket> {
    if v == 0.0 {
        // Below every axis; same policy as any other undershoot.
        let (lo, _) = axis.range();
        return Ok(Bracket {
            lo,
            hi: lo,
            value: lo.value(),
            clamped: true,
        });
    }
    ladder_neighbors(v, axis)
}

/// Corner weights along one axis, linear in `log10`.
fn axis_weights(b: &Bracket) -> Vec<(Ladder, f64)> {
    if b.lo == b.hi {
        return vec![(b.lo, 1.0)];
    }
    let t = (b.value.log10() - b.lo.log10()) / (b.hi.log10() - b.lo.log10());
    let t = t.clamp(0.0, 1.0);
    vec![(b.lo, 1.0 - t), (b.hi, t)]
}

/// Rate of `sector` at distance `d` for arbitrary ratios, interpolated
/// trilinearly in `log10` of the axes and of the rate between the up to eight
/// bracketing grid points.
///
/// On-grid queries return the stored value unchanged. Corners with a zero
/// rate switch the combination to linear in the rate.
pub fn interpolate(db: &RateDatabase, d: u32, r0: f64, r1: f64, p2: f64, sector: Sector) -> Result<Interpolation> {
    if !DISTANCES.contains(&d) {
        return Err(Error::InvalidArgument(format!("database distances are 3..=6, got {d}")));
    }
    let b0 = bracket(r0, Axis::R0)?;
    let b1 = bracket(r1, Axis::R1)?;
    let b2 = bracket(p2, Axis::P2)?;
    let mut warnings = BTreeSet::new();
    if b0.clamped || b1.clamped || b2.clamped {
        warnings.insert(Warning::Clamped);
    }

    let mut corners = Vec::with_capacity(8);
    for &(l0, w0) in &axis_weights(&b0) {
        for &(l1, w1) in &axis_weights(&b1) {
            for &(l2, w2) in &axis_weights(&b2) {
                let key = DbKey::new(d, l0, l1, l2);
                let e = db.get(&key).ok_or_else(|| key.missing())?;
                if e.low_confidence {
                    warnings.insert(Warning::LowConfidence);
                }
                corners.push((e.rate(sector), w0 * w1 * w2));
            }
        }
    }

    let first = corners[0].0;
    if corners.iter().all(|&(p, _)| p == first) {
        return Ok(Interpolation { value: first, warnings });
    }
    let lo = corners.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let hi = corners.iter().map(|c| c.0).fold(0.0, f64::max);
    let value = if lo > 0.0 {
        let log: f64 = corners.iter().map(|&(p, w)| w * p.log10()).sum();
        10f64.powf(log)
    } else {
        warnings.insert(Warning::LowConfidence);
        corners.iter().map(|&(p, w)| w * p).sum()
    };
    Ok(Interpolation {
        value: value.clamp(lo, hi),
        warnings,
    })
}

/// Exponential fits through distances 3, 5 (odd) and 4, 6 (even).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtrapolationFit {
    pub x: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub y: f64,
    #[serde(rename = "D")]
    pub d_coef: f64,
    /// Rates at `d = 3, 4, 5, 6` the fit was built from.
    pub small: [f64; 4],
    pub above_threshold: bool,
}

/// `x = p5 / p3`, `C = p3 / x^2`, `y = p6 / p4`, `D = p4 / y^2`.
pub fn fit(p3: f64, p4: f64, p5: f64, p6: f64) -> Result<ExtrapolationFit> {
    for (d, p) in [(3, p3), (4, p4), (5, p5), (6, p6)] {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "rate at d={d} must be positive to fit, got {p}"
            )));
        }
    }
    let x = p5 / p3;
    let y = p6 / p4;
    Ok(ExtrapolationFit {
        x,
        c: p3 / (x * x),
        y,
        d_coef: p4 / (y * y),
        small: [p3, p4, p5, p6],
        above_threshold: x >= 1.0 || y >= 1.0,
    })
}

impl ExtrapolationFit {
    /// Rate at distance `d`: the fitted inputs for `d <= 6`, otherwise
    /// `C x^k` (odd) or `D y^k` (even) with `k = (d + 1) / 2`.
    pub fn evaluate(&self, d: u32) -> Result<f64> {
        match d {
            0..=2 => Err(Error::InvalidArgument(format!("distance must be at least 3, got {d}"))),
            3..=6 => Ok(self.small[d as usize - 3]),
            _ if self.above_threshold => Err(Error::AboveThreshold(format!(
                "x = {}, y = {}",
                self.x, self.y
            ))),
            _ => {
                let k = d.div_ceil(2) as i32;
                Ok(if d % 2 == 1 {
                    self.c * self.x.powi(k)
                } else {
                    self.d_coef * self.y.powi(k)
                })
            }
        }
    }
}

/// Reduced coordinates of one sector and what the database says about them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorEstimate {
    pub r0: f64,
    pub r1: f64,
    pub p2: f64,
    /// Interpolated rates at `d = 3..=6`, where the database has them.
    pub small: [Option<f64>; 4],
    pub fit: Option<ExtrapolationFit>,
}

/// Per-round logical error rates at one distance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub d: u32,
    pub p_xl: f64,
    pub p_zl: f64,
    pub warnings: BTreeSet<Warning>,
    pub rates: ReducedRates,
    /// `None` for a sector without noise.
    pub x: Option<SectorEstimate>,
    pub z: Option<SectorEstimate>,
}

fn sector_ratios(rates: &ReducedRates, sector: Sector) -> Result<Option<(f64, f64, f64)>> {
    let (p0, p1, p2) = rates.sector(sector);
    if p0 == 0.0 && p1 == 0.0 && p2 == 0.0 {
        return Ok(None);
    }
    if p2 == 0.0 {
        return Err(Error::InvalidArgument(format!(
            "{sector:?} sector has p2 = 0 but p0 = {p0}, p1 = {p1}; the database is indexed by ratios to p2"
        )));
    }
    Ok(Some((p0 / p2, p1 / p2, p2)))
}

/// Interpolates every small distance it can. Returns the rate and warnings
/// at `need` (or at all four when `need` is `None`) and the sector summary.
fn sector_estimate(
    db: &RateDatabase,
    (r0, r1, p2): (f64, f64, f64),
    sector: Sector,
    need: Option<u32>,
    warnings: &mut BTreeSet<Warning>,
) -> Result<SectorEstimate> {
    let mut small = [None; 4];
    for d in DISTANCES {
        match interpolate(db, d, r0, r1, p2, sector) {
            Ok(i) => {
                if need.is_none_or(|n| n == d) {
                    warnings.extend(i.warnings);
                }
                small[d as usize - 3] = Some(i.value);
            }
            Err(e) if need.is_none_or(|n| n == d) => return Err(e),
            Err(_) => {}
        }
    }
    let fit = match small {
        [Some(a), Some(b), Some(c), Some(d)] => fit(a, b, c, d).ok(),
        _ => None,
    };
    if need.is_none() && fit.is_none() {
        return Err(Error::InvalidArgument(format!(
            "{sector:?} rates at d = 3..=6 must be positive to extrapolate"
        )));
    }
    if fit.is_some_and(|f| f.above_threshold) {
        warnings.insert(Warning::AboveThreshold);
    }
    Ok(SectorEstimate {
        r0,
        r1,
        p2,
        small,
        fit,
    })
}

/// Logical X and Z error rates per round at distance `d` for a gate error
/// model.
pub fn estimate(db: &RateDatabase, model: &GateErrorModel, d: u32) -> Result<Estimate> {
    if d < 3 {
        return Err(Error::InvalidArgument(format!("distance must be at least 3, got {d}")));
    }
    let rates = reduce(model);
    let mut warnings = BTreeSet::new();
    if rates.asymmetry_warning {
        warnings.insert(Warning::AsymmetricCnot);
    }
    let need = (d <= 6).then_some(d);
    let mut per_sector = [None, None];
    let mut p = [0.0; 2];
    for (i, sector) in Sector::BOTH.into_iter().enumerate() {
        let Some(coords) = sector_ratios(&rates, sector)? else {
            continue;
        };
        let s = sector_estimate(db, coords, sector, need, &mut warnings)?;
        p[i] = match (need, &s.fit) {
            (Some(n), _) => s.small[n as usize - 3].expect("interpolated at the requested distance"),
            (None, Some(f)) => f.evaluate(d)?,
            (None, None) => unreachable!("sector_estimate requires a fit beyond d = 6"),
        };
        per_sector[i] = Some(s);
    }
    let [x, z] = per_sector;
    Ok(Estimate {
        d,
        p_xl: p[0],
        p_zl: p[1],
        warnings,
        rates,
        x,
        z,
    })
}

/// Smallest distance whose logical X and Z rates per round are both at most
/// `target`.
pub fn solve_distance(db: &RateDatabase, model: &GateErrorModel, target: f64) -> Result<u32> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidArgument(format!("target must lie in (0, 1), got {target}")));
    }
    let rates = reduce(model);
    let mut fits = Vec::new();
    for sector in Sector::BOTH {
        if let Some(coords) = sector_ratios(&rates, sector)? {
            let s = sector_estimate(db, coords, sector, None, &mut BTreeSet::new())?;
            let f = s.fit.expect("fit present when all distances are required");
            if f.above_threshold {
                return Err(Error::AboveThreshold(format!(
                    "{sector:?} sector: x = {}, y = {}",
                    f.x, f.y
                )));
            }
            fits.push(f);
        }
    }
    for d in 3..=MAX_DISTANCE {
        let mut worst: f64 = 0.0;
        for f in &fits {
            worst = worst.max(f.evaluate(d)?);
        }
        if worst <= target {
            return Ok(d);
        }
    }
    Err(Error::NoSolution(format!(
        "no distance up to {MAX_DISTANCE} reaches {target:e}"
    )))
}
