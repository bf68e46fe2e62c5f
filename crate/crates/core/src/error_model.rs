//! Per-gate Pauli error models and their reduction to the six scalar rates
//! (`p0`, `p1`, `p2` for each of the X and Z sectors) that parameterize the
//! rate database.
//!
//! X and Z errors are treated independently: a `Y` counts as both. For the
//! CNOT, the twelve X-carrying two-qubit Paulis fold into three derived rates
//! (`IX`, `XI`, `XX` patterns); these are raised to a common maximum before
//! being rescaled to an equivalent 15-component depolarizing rate.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{check_probability, Error, Result, SUM_SLACK};

/// Default max/min ratio of a derived CNOT triple above which the reduction
/// warns that estimates will be pessimistic.
pub const DEFAULT_ASYMMETRY_THRESHOLD: f64 = 2.0;

/// One of the four single-qubit Paulis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    #[inline]
    pub fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    #[inline]
    pub fn has_z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'i',
            Pauli::X => 'x',
            Pauli::Y => 'y',
            Pauli::Z => 'z',
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// The 15 nontrivial (control, target) Pauli pairs in `IX, IY, ..., ZZ` order.
pub fn two_qubit_paulis() -> impl Iterator<Item = (Pauli, Pauli)> {
    Pauli::ALL
        .into_iter()
        .flat_map(|a| Pauli::ALL.into_iter().map(move |b| (a, b)))
        .filter(|&(a, b)| !(a == Pauli::I && b == Pauli::I))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingleQubitChannel {
    px: f64,
    py: f64,
    pz: f64,
}

impl SingleQubitChannel {
    pub fn new(px: f64, py: f64, pz: f64) -> Result<Self> {
        check_probability("px", px)?;
        check_probability("py", py)?;
        check_probability("pz", pz)?;
        let total = px + py + pz;
        if total > 1.0 + SUM_SLACK {
            return Err(Error::InvalidProbability {
                field: "px+py+pz".into(),
                value: total,
            });
        }
        Ok(Self { px, py, pz })
    }

    /// Each Pauli with probability `p / 3`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        check_probability("p", p)?;
        Self::new(p / 3.0, p / 3.0, p / 3.0)
    }

    pub fn zero() -> Self {
        Self {
            px: 0.0,
            py: 0.0,
            pz: 0.0,
        }
    }

    pub fn px(&self) -> f64 {
        self.px
    }
    pub fn py(&self) -> f64 {
        self.py
    }
    pub fn pz(&self) -> f64 {
        self.pz
    }
}

/// A classical flip of the prepared state or of the reported outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlipChannel {
    flip: f64,
}

impl FlipChannel {
    pub fn new(flip: f64) -> Result<Self> {
        Ok(Self {
            flip: check_probability("flip", flip)?,
        })
    }

    pub fn zero() -> Self {
        Self { flip: 0.0 }
    }

    pub fn flip(&self) -> f64 {
        self.flip
    }
}

/// CNOT error channel; the first Pauli of each pair acts on the control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitChannel {
    p: [[f64; 4]; 4],
}

impl TwoQubitChannel {
    pub fn new(entries: impl IntoIterator<Item = ((Pauli, Pauli), f64)>) -> Result<Self> {
        let mut p = [[0.0; 4]; 4];
        for ((a, b), value) in entries {
            if a == Pauli::I && b == Pauli::I {
                return Err(Error::InvalidArgument(
                    "the identity pair is not an error".into(),
                ));
            }
            let name = format!("{}{}", a.letter(), b.letter());
            p[a.index()][b.index()] = check_probability(&name, value)?;
        }
        let total: f64 = p.iter().flatten().sum();
        if total > 1.0 + SUM_SLACK {
            return Err(Error::InvalidProbability {
                field: "cnot total".into(),
                value: total,
            });
        }
        Ok(Self { p })
    }

    /// All 15 entries equal to `p / 15`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        check_probability("p", p)?;
        Self::new(two_qubit_paulis().map(|pair| (pair, p / 15.0)))
    }

    pub fn zero() -> Self {
        Self { p: [[0.0; 4]; 4] }
    }

    pub fn get(&self, control: Pauli, target: Pauli) -> f64 {
        self.p[control.index()][target.index()]
    }

    /// Derived X rates `(p'_IX, p'_XI, p'_XX)`: every Pauli pair is binned by
    /// which of its two qubits carry an X component.
    pub fn derived_x(&self) -> [f64; 3] {
        self.derived(Pauli::has_x)
    }

    /// Derived Z rates `(p'_ZI, p'_IZ, p'_ZZ)` in control-only, target-only,
    /// both order (the first entry is the control-only pattern).
    pub fn derived_z(&self) -> [f64; 3] {
        let [target_only, control_only, both] = self.derived(Pauli::has_z);
        [control_only, target_only, both]
    }

    // Returns (target only, control only, both).
    fn derived(&self, component: fn(Pauli) -> bool) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (a, b) in two_qubit_paulis() {
            let slot = match (component(a), component(b)) {
                (false, true) => 0,
                (true, false) => 1,
                (true, true) => 2,
                (false, false) => continue,
            };
            out[slot] += self.get(a, b);
        }
        out
    }
}

impl Serialize for TwoQubitChannel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(15))?;
        for (a, b) in two_qubit_paulis() {
            let key = format!("{}{}", a.letter(), b.letter());
            map.serialize_entry(&key, &self.get(a, b))?;
        }
        map.end()
    }
}

/// Error channels for the eight gate types of the syndrome extraction cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateErrorModel {
    pub init: FlipChannel,
    pub meas: FlipChannel,
    pub hadamard: SingleQubitChannel,
    pub cnot: TwoQubitChannel,
    pub id_init: SingleQubitChannel,
    pub id_had: SingleQubitChannel,
    pub id_meas: SingleQubitChannel,
    /// Carried for completeness; boundary CNOT-duration idles are ignored by
    /// the reduction.
    pub id_cnot: SingleQubitChannel,
}

impl GateErrorModel {
    pub fn zero() -> Self {
        Self {
            init: FlipChannel::zero(),
            meas: FlipChannel::zero(),
            hadamard: SingleQubitChannel::zero(),
            cnot: TwoQubitChannel::zero(),
            id_init: SingleQubitChannel::zero(),
            id_had: SingleQubitChannel::zero(),
            id_meas: SingleQubitChannel::zero(),
            id_cnot: SingleQubitChannel::zero(),
        }
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    /// Parses either the full per-gate form or the `{"depolarizing": p,
    /// "meas": pm}` shorthand.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Model("top level must be an object".into()))?;
        if obj.contains_key("depolarizing") {
            return parse_shorthand(obj);
        }
        parse_full(obj)
    }
}

fn number(value: &Value, field: &str) -> Result<f64> {
    value
        .as_f64()
        .ok_or_else(|| Error::Model(format!("field \"{field}\" must be a number")))
}

fn check_keys(obj: &Map<String, Value>, allowed: &[&str], context: &str) -> Result<()> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::Model(format!("unknown field \"{context}{key}\"")));
        }
    }
    Ok(())
}

fn parse_shorthand(obj: &Map<String, Value>) -> Result<GateErrorModel> {
    check_keys(obj, &["depolarizing", "meas"], "")?;
    let probability = |key: &str| -> Result<f64> {
        let x = number(&obj[key], key)?;
        check_probability(key, x)
            .map_err(|_| Error::Model(format!("field \"{key}\" is not a probability: {x}")))
    };
    let p = probability("depolarizing")?;
    let meas = if obj.contains_key("meas") {
        Some(probability("meas")?)
    } else {
        None
    };
    depolarizing_model(p, meas)
}

fn parse_flip(obj: &Map<String, Value>, key: &str) -> Result<FlipChannel> {
    let Some(v) = obj.get(key) else {
        return Ok(FlipChannel::zero());
    };
    // A bare number is accepted for the flip channels.
    if let Some(x) = v.as_f64() {
        return FlipChannel::new(x).map_err(|_| Error::Model(format!("field \"{key}\" is not a probability: {x}")));
    }
    let inner = v
        .as_object()
        .ok_or_else(|| Error::Model(format!("field \"{key}\" must be an object")))?;
    check_keys(inner, &["flip"], &format!("{key}."))?;
    let flip = match inner.get("flip") {
        Some(x) => number(x, &format!("{key}.flip"))?,
        None => 0.0,
    };
    FlipChannel::new(flip)
        .map_err(|_| Error::Model(format!("field \"{key}.flip\" is not a probability: {flip}")))
}

fn parse_single(obj: &Map<String, Value>, key: &str) -> Result<SingleQubitChannel> {
    let Some(v) = obj.get(key) else {
        return Ok(SingleQubitChannel::zero());
    };
    let inner = v
        .as_object()
        .ok_or_else(|| Error::Model(format!("field \"{key}\" must be an object")))?;
    check_keys(inner, &["px", "py", "pz"], &format!("{key}."))?;
    let mut p = [0.0; 3];
    for (slot, name) in ["px", "py", "pz"].iter().enumerate() {
        if let Some(x) = inner.get(*name) {
            p[slot] = number(x, &format!("{key}.{name}"))?;
            if check_probability(name, p[slot]).is_err() {
                return Err(Error::Model(format!(
                    "field \"{key}.{name}\" is not a probability: {}",
                    p[slot]
                )));
            }
        }
    }
    SingleQubitChannel::new(p[0], p[1], p[2])
        .map_err(|e| Error::Model(format!("field \"{key}\": {e}")))
}

fn parse_cnot(obj: &Map<String, Value>) -> Result<TwoQubitChannel> {
    let Some(v) = obj.get("cnot") else {
        return Ok(TwoQubitChannel::zero());
    };
    let inner = v
        .as_object()
        .ok_or_else(|| Error::Model("field \"cnot\" must be an object".into()))?;
    let mut entries = Vec::with_capacity(15);
    for (key, value) in inner {
        let pair = two_qubit_paulis()
            .find(|(a, b)| format!("{}{}", a.letter(), b.letter()) == *key)
            .ok_or_else(|| Error::Model(format!("unknown field \"cnot.{key}\"")))?;
        let x = number(value, &format!("cnot.{key}"))?;
        if check_probability(key, x).is_err() {
            return Err(Error::Model(format!(
                "field \"cnot.{key}\" is not a probability: {x}"
            )));
        }
        entries.push((pair, x));
    }
    TwoQubitChannel::new(entries).map_err(|e| Error::Model(format!("field \"cnot\": {e}")))
}

fn parse_full(obj: &Map<String, Value>) -> Result<GateErrorModel> {
    check_keys(
        obj,
        &[
            "init", "meas", "hadamard", "cnot", "id_init", "id_had", "id_meas", "id_cnot",
        ],
        "",
    )?;
    Ok(GateErrorModel {
        init: parse_flip(obj, "init")?,
        meas: parse_flip(obj, "meas")?,
        hadamard: parse_single(obj, "hadamard")?,
        cnot: parse_cnot(obj)?,
        id_init: parse_single(obj, "id_init")?,
        id_had: parse_single(obj, "id_had")?,
        id_meas: parse_single(obj, "id_meas")?,
        id_cnot: parse_single(obj, "id_cnot")?,
    })
}

/// Depolarizing noise of strength `p` on every gate, optionally with a
/// distinct measurement flip probability.
pub fn depolarizing_model(p: f64, p_meas: Option<f64>) -> Result<GateErrorModel> {
    let single = SingleQubitChannel::depolarizing(p)?;
    Ok(GateErrorModel {
        init: FlipChannel::new(p)?,
        meas: FlipChannel::new(p_meas.unwrap_or(p))?,
        hadamard: single,
        cnot: TwoQubitChannel::depolarizing(p)?,
        id_init: single,
        id_had: single,
        id_meas: single,
        id_cnot: single,
    })
}

/// `(p'_X, p'_Z)`: a Y error contributes to both.
pub fn fold_single(ch: &SingleQubitChannel) -> (f64, f64) {
    (ch.px + ch.py, ch.pz + ch.py)
}

/// Outcome of balancing one derived CNOT triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CnotReduction {
    pub p2x: f64,
    pub p2z: f64,
    /// `max / min` of the derived X triple; infinite when only the minimum is zero.
    pub asym_x: f64,
    pub asym_z: f64,
}

fn balance(triple: [f64; 3]) -> (f64, f64) {
    let max = triple.iter().copied().fold(0.0, f64::max);
    let min = triple.iter().copied().fold(f64::INFINITY, f64::min);
    let asym = if max == 0.0 {
        1.0
    } else if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    };
    // Raise every member to the max, then scale 12 fundamental rates to 15.
    (15.0 * max / 4.0, asym)
}

pub fn reduce_cnot(ch: &TwoQubitChannel) -> CnotReduction {
    let (p2x, asym_x) = balance(ch.derived_x());
    let (p2z, asym_z) = balance(ch.derived_z());
    CnotReduction {
        p2x,
        p2z,
        asym_x,
        asym_z,
    }
}

/// Data-qubit idle errors lumped into per-gate depolarizing-equivalent rates.
pub fn reduce_data_idle(
    id_init: &SingleQubitChannel,
    id_had: &SingleQubitChannel,
    id_meas: &SingleQubitChannel,
) -> (f64, f64) {
    let (ix, iz) = fold_single(id_init);
    let (hx, hz) = fold_single(id_had);
    let (mx, mz) = fold_single(id_meas);
    (
        3.0 * (ix + 2.0 * hx + mx) / 8.0,
        3.0 * (iz + 2.0 * hz + mz) / 8.0,
    )
}

/// Per-cycle syndrome error rates. Only X-stabilizer syndromes carry the two
/// Hadamards, so only `p0z` sees them.
pub fn reduce_syndrome(
    init: &FlipChannel,
    meas: &FlipChannel,
    had: &SingleQubitChannel,
) -> (f64, f64) {
    let (hx, hz) = fold_single(had);
    (init.flip + meas.flip, init.flip + hx + hz + meas.flip)
}

/// Error sector: X errors are caught by Z stabilizers and vice versa.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sector {
    X,
    Z,
}

impl Sector {
    pub const BOTH: [Sector; 2] = [Sector::X, Sector::Z];

    pub fn other(self) -> Self {
        match self {
            Sector::X => Sector::Z,
            Sector::Z => Sector::X,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedRates {
    pub p0x: f64,
    pub p0z: f64,
    pub p1x: f64,
    pub p1z: f64,
    pub p2x: f64,
    pub p2z: f64,
    pub asym_x: f64,
    pub asym_z: f64,
    pub asymmetry_warning: bool,
}

impl ReducedRates {
    /// `(p0, p1, p2)` for one sector.
    pub fn sector(&self, sector: Sector) -> (f64, f64, f64) {
        match sector {
            Sector::X => (self.p0x, self.p1x, self.p2x),
            Sector::Z => (self.p0z, self.p1z, self.p2z),
        }
    }

    /// `(r0, r1)` for one sector, or `None` when `p2` is zero.
    pub fn ratios(&self, sector: Sector) -> Option<(f64, f64)> {
        let (p0, p1, p2) = self.sector(sector);
        (p2 > 0.0).then(|| (p0 / p2, p1 / p2))
    }
}

pub fn reduce(model: &GateErrorModel) -> ReducedRates {
    reduce_with_threshold(model, DEFAULT_ASYMMETRY_THRESHOLD)
}

pub fn reduce_with_threshold(model: &GateErrorModel, asymmetry_threshold: f64) -> ReducedRates {
    let (p0x, p0z) = reduce_syndrome(&model.init, &model.meas, &model.hadamard);
    let (p1x, p1z) = reduce_data_idle(&model.id_init, &model.id_had, &model.id_meas);
    let cnot = reduce_cnot(&model.cnot);
    ReducedRates {
        p0x,
        p0z,
        p1x,
        p1z,
        p2x: cnot.p2x,
        p2z: cnot.p2z,
        asym_x: cnot.asym_x,
        asym_z: cnot.asym_z,
        asymmetry_warning: cnot.asym_x.max(cnot.asym_z) > asymmetry_threshold,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        if a == b {
            0.0
        } else {
            (a - b).abs() / a.abs().max(b.abs())
        }
    }

    #[test]
    fn fold_single_examples() {
        let ch = SingleQubitChannel::new(1e-3, 1e-3, 1e-3).unwrap();
        assert_eq!(fold_single(&ch), (2e-3, 2e-3));
        assert_eq!(fold_single(&SingleQubitChannel::zero()), (0.0, 0.0));
        let ch = SingleQubitChannel::new(1e-3, 0.0, 2e-3).unwrap();
        assert_eq!(fold_single(&ch), (1e-3, 2e-3));
    }

    #[test]
    fn channel_validation() {
        assert!(SingleQubitChannel::new(-0.1, 0.0, 0.0).is_err());
        assert!(SingleQubitChannel::new(0.5, 0.4, 0.2).is_err());
        assert!(SingleQubitChannel::new(f64::NAN, 0.0, 0.0).is_err());
        assert!(FlipChannel::new(1.5).is_err());
        assert!(TwoQubitChannel::new([((Pauli::X, Pauli::X), 0.6), ((Pauli::Z, Pauli::I), 0.6)]).is_err());
        assert!(TwoQubitChannel::new([((Pauli::I, Pauli::I), 0.1)]).is_err());
        assert!(TwoQubitChannel::depolarizing(1.0).is_ok());
    }

    #[test]
    fn cnot_depolarizing_fixed_point() {
        let r = reduce_cnot(&TwoQubitChannel::depolarizing(1e-3).unwrap());
        assert!(rel(r.p2x, 1e-3) <= 1e-15);
        assert!(rel(r.p2z, 1e-3) <= 1e-15);
        assert_eq!((r.asym_x, r.asym_z), (1.0, 1.0));
    }

    #[test]
    fn cnot_asymmetric_triple() {
        let ch = TwoQubitChannel::new([
            ((Pauli::I, Pauli::X), 1e-4),
            ((Pauli::X, Pauli::I), 1e-5),
            ((Pauli::X, Pauli::X), 1e-6),
        ])
        .unwrap();
        let r = reduce_cnot(&ch);
        assert_eq!(r.p2x, 15.0 * 1e-4 / 4.0);
        assert!(rel(r.p2x, 3.75e-4) < 1e-15);
        assert!(rel(r.asym_x, 100.0) < 1e-12);
        assert_eq!(r.p2z, 0.0);
        assert_eq!(r.asym_z, 1.0);
    }

    #[test]
    fn cnot_zero_and_unbounded() {
        let r = reduce_cnot(&TwoQubitChannel::zero());
        assert_eq!((r.p2x, r.p2z, r.asym_x, r.asym_z), (0.0, 0.0, 1.0, 1.0));
        let ch = TwoQubitChannel::new([((Pauli::I, Pauli::X), 1e-3)]).unwrap();
        let r = reduce_cnot(&ch);
        assert!(r.asym_x.is_infinite());
        assert_eq!(r.p2x, 15.0 * 1e-3 / 4.0);
    }

    #[test]
    fn derived_triples_membership() {
        // Y on the target contributes to the target-only X rate and the
        // target-only Z rate.
        let ch = TwoQubitChannel::new([((Pauli::I, Pauli::Y), 0.1)]).unwrap();
        assert_eq!(ch.derived_x(), [0.1, 0.0, 0.0]);
        assert_eq!(ch.derived_z(), [0.0, 0.1, 0.0]);
        let ch = TwoQubitChannel::new([((Pauli::Y, Pauli::X), 0.1)]).unwrap();
        assert_eq!(ch.derived_x(), [0.0, 0.0, 0.1]);
        assert_eq!(ch.derived_z(), [0.1, 0.0, 0.0]);
    }

    #[test]
    fn data_idle_examples() {
        let dep = SingleQubitChannel::depolarizing(1e-3).unwrap();
        let (x, z) = reduce_data_idle(&dep, &dep, &dep);
        assert!(rel(x, 1e-3) < 1e-15 && rel(z, 1e-3) < 1e-15);
        let zero = SingleQubitChannel::zero();
        assert_eq!(reduce_data_idle(&zero, &zero, &zero), (0.0, 0.0));
        let ch = SingleQubitChannel::new(8e-4, 0.0, 0.0).unwrap();
        let (x, z) = reduce_data_idle(&ch, &ch, &ch);
        assert!(rel(x, 1.2e-3) < 1e-15);
        assert_eq!(z, 0.0);
    }

    #[test]
    fn syndrome_examples() {
        let had = SingleQubitChannel::depolarizing(1e-3).unwrap();
        let (p0x, p0z) = reduce_syndrome(
            &FlipChannel::new(1e-3).unwrap(),
            &FlipChannel::new(1e-3).unwrap(),
            &had,
        );
        assert!(rel(p0x, 2e-3) < 1e-15);
        assert!(rel(p0z, 2e-3 + 4e-3 / 3.0) < 1e-15);
        let (p0x, _) = reduce_syndrome(
            &FlipChannel::new(1e-3).unwrap(),
            &FlipChannel::new(0.1).unwrap(),
            &had,
        );
        assert!(rel(p0x, 0.101) < 1e-15);
        let zero = reduce_syndrome(&FlipChannel::zero(), &FlipChannel::zero(), &SingleQubitChannel::zero());
        assert_eq!(zero, (0.0, 0.0));
    }

    #[test]
    fn reduce_depolarizing_model() {
        let r = reduce(&depolarizing_model(1e-3, None).unwrap());
        assert!(rel(r.p2x, 1e-3) < 1e-12 && rel(r.p2z, 1e-3) < 1e-12);
        assert!(rel(r.p1x, 1e-3) < 1e-12 && rel(r.p1z, 1e-3) < 1e-12);
        assert!(rel(r.p0x, 2e-3) < 1e-12);
        assert!(rel(r.p0z, 3.333_333_333_333_333e-3) < 1e-12);
        assert!(!r.asymmetry_warning);

        let r = reduce(&depolarizing_model(1e-3, Some(0.1)).unwrap());
        let (r0, r1) = r.ratios(Sector::X).unwrap();
        assert!(rel(r0, 101.0) < 1e-12);
        assert!(rel(r1, 1.0) < 1e-12);

        let r = reduce(&GateErrorModel::zero());
        assert_eq!(r.p0x + r.p0z + r.p1x + r.p1z + r.p2x + r.p2z, 0.0);
        assert_eq!((r.asym_x, r.asym_z), (1.0, 1.0));
        assert!(!r.asymmetry_warning);
        assert_eq!(depolarizing_model(0.0, None).unwrap(), GateErrorModel::zero());
    }

    #[test]
    fn json_full_and_shorthand() {
        let full = r#"{
            "init": {"flip": 0.001}, "meas": {"flip": 0.001},
            "hadamard": {"px": 0.0005, "pz": 0.0005},
            "cnot": {"ix": 0.0001, "zz": 0.0002},
            "id_init": {"px": 0.001}
        }"#;
        let m = GateErrorModel::from_json_str(full).unwrap();
        assert_eq!(m.cnot.get(Pauli::I, Pauli::X), 1e-4);
        assert_eq!(m.cnot.get(Pauli::Z, Pauli::Z), 2e-4);
        assert_eq!(m.cnot.get(Pauli::X, Pauli::X), 0.0);
        assert_eq!(m.hadamard.py(), 0.0);
        assert_eq!(m.id_meas, SingleQubitChannel::zero());

        let short = GateErrorModel::from_json_str(r#"{"depolarizing": 0.001, "meas": 0.1}"#).unwrap();
        assert_eq!(short, depolarizing_model(1e-3, Some(0.1)).unwrap());
    }

    #[test]
    fn json_errors_name_the_field() {
        let err = GateErrorModel::from_json_str(r#"{"cnot": {"qq": 0.1}}"#).unwrap_err();
        assert!(err.to_string().contains("cnot.qq"), "{err}");
        let err = GateErrorModel::from_json_str(r#"{"hadamard": {"px": 2.0}}"#).unwrap_err();
        assert!(err.to_string().contains("hadamard.px"), "{err}");
        let err = GateErrorModel::from_json_str(r#"{"bogus": 1}"#).unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
        let err = GateErrorModel::from_json_str(r#"{"meas": {"flip": "x"}}"#).unwrap_err();
        assert!(err.to_string().contains("meas.flip"), "{err}");
    }

    fn arb_cnot() -> impl Strategy<Value = TwoQubitChannel> {
        proptest::collection::vec(0.0..1.0f64, 15).prop_map(|raw| {
            let scale: f64 = raw.iter().sum::<f64>().max(1.0) * 10.0;
            TwoQubitChannel::new(two_qubit_paulis().zip(raw.iter().map(|v| v / scale))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn fold_single_is_monotone(px in 0.0..0.3f64, py in 0.0..0.3f64, pz in 0.0..0.3f64, bump in 0.0..0.05f64, which in 0usize..3) {
            let base = SingleQubitChannel::new(px, py, pz).unwrap();
            let mut p = [px, py, pz];
            p[which] += bump;
            let up = SingleQubitChannel::new(p[0], p[1], p[2]).unwrap();
            let (bx, bz) = fold_single(&base);
            let (ux, uz) = fold_single(&up);
            prop_assert!(ux >= bx && uz >= bz);
        }

        #[test]
        fn depolarizing_cnot_is_fixed_point(p in 0.0..1.0f64) {
            let r = reduce_cnot(&TwoQubitChannel::depolarizing(p).unwrap());
            prop_assert!(rel(r.p2x, p) <= 1e-15);
            prop_assert!(rel(r.p2z, p) <= 1e-15);
            prop_assert_eq!((r.asym_x, r.asym_z), (1.0, 1.0));
        }

        #[test]
        fn balancing_never_lowers(ch in arb_cnot()) {
            let r = reduce_cnot(&ch);
            let [a, b, c] = ch.derived_x();
            let unbalanced = 5.0 * (a + b + c) / 4.0;
            prop_assert!(r.p2x >= unbalanced * (1.0 - 1e-12));
            let [a, b, c] = ch.derived_z();
            prop_assert!(r.p2z >= 5.0 * (a + b + c) / 4.0 * (1.0 - 1e-12));
        }

        #[test]
        fn z_only_permutation_keeps_p2x(ch in arb_cnot(), perm in Just([0usize, 1, 2]).prop_shuffle()) {
            let z_only = [(Pauli::I, Pauli::Z), (Pauli::Z, Pauli::I), (Pauli::Z, Pauli::Z)];
            let vals: Vec<f64> = z_only.iter().map(|&(a, b)| ch.get(a, b)).collect();
            let permuted = TwoQubitChannel::new(two_qubit_paulis().map(|pair| {
                let v = match z_only.iter().position(|&q| q == pair) {
                    Some(i) => vals[perm[i]],
                    None => ch.get(pair.0, pair.1),
                };
                (pair, v)
            })).unwrap();
            prop_assert_eq!(reduce_cnot(&ch).p2x, reduce_cnot(&permuted).p2x);
        }

        #[test]
        fn reduce_is_deterministic(p in 0.0..0.2f64, pm in 0.0..0.2f64) {
            let m = depolarizing_model(p, Some(pm)).unwrap();
            let a = reduce(&m);
            let b = reduce(&m);
            prop_assert_eq!(format!("{a:?}"), format!("{b:?}"));
        }
    }
}
