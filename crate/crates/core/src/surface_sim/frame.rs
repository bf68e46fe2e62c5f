use rand::Rng;
use serde::Serialize;

use super::layout::{Layout, StabKind};
use super::schedule::{CycleSchedule, Op, StabRef};
use crate::error::{check_probability, Result};
use crate::error_model::{Pauli, Sector};

/// Error rates driving one simulation, in the reduced parameterization:
/// `p0` per syndrome per round, `p1` per data idle gate (depolarizing
/// equivalent), `p2` per CNOT.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimRates {
    pub p0x: f64,
    pub p0z: f64,
    pub p1x: f64,
    pub p1z: f64,
    pub p2: f64,
}

impl SimRates {
    pub fn new(p0x: f64, p0z: f64, p1x: f64, p1z: f64, p2: f64) -> Result<Self> {
        Ok(Self {
            p0x: check_probability("p0x", p0x)?,
            p0z: check_probability("p0z", p0z)?,
            p1x: check_probability("p1x", p1x)?,
            p1z: check_probability("p1z", p1z)?,
            p2: check_probability("p2", p2)?,
        })
    }

    /// Balanced rates of a database grid point.
    pub fn balanced(r0: f64, r1: f64, p2: f64) -> Result<Self> {
        Self::new(r0 * p2, r0 * p2, r1 * p2, r1 * p2, p2)
    }

    pub fn zero() -> Self {
        Self {
            p0x: 0.0,
            p0z: 0.0,
            p1x: 0.0,
            p1z: 0.0,
            p2: 0.0,
        }
    }

    /// Syndrome outcome flip probability for a stabilizer kind.
    pub fn outcome_flip(&self, kind: StabKind) -> f64 {
        match kind {
            StabKind::Z => self.p0x,
            StabKind::X => self.p0z,
        }
    }

    /// Per-slot probability of an X (or Z) component on an idle data qubit:
    /// the marginal of a depolarizing channel of strength `p1`.
    pub fn idle_marginal(&self, sector: Sector) -> f64 {
        let p1 = match sector {
            Sector::X => self.p1x,
            Sector::Z => self.p1z,
        };
        2.0 * p1 / 3.0
    }

    pub fn is_zero(&self) -> bool {
        self.p0x == 0.0 && self.p0z == 0.0 && self.p1x == 0.0 && self.p1z == 0.0 && self.p2 == 0.0
    }
}

/// Position of an operation: round, step within the round, op within the step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Site {
    pub round: usize,
    pub step: usize,
    pub op: usize,
}

/// Supplies the errors that follow each noisy operation.
pub trait NoiseSource {
    fn cnot(&mut self, site: Site) -> Option<(Pauli, Pauli)>;
    /// `(x, z)` components to apply to an idle data qubit.
    fn data_idle(&mut self, site: Site) -> (bool, bool);
    fn outcome_flip(&mut self, site: Site, stab: StabRef) -> bool;
}

pub struct Noiseless;

impl NoiseSource for Noiseless {
    #[inline]
    fn cnot(&mut self, _: Site) -> Option<(Pauli, Pauli)> {
        None
    }
    #[inline]
    fn data_idle(&mut self, _: Site) -> (bool, bool) {
        (false, false)
    }
    #[inline]
    fn outcome_flip(&mut self, _: Site, _: StabRef) -> bool {
        false
    }
}

const TWO_QUBIT: [(Pauli, Pauli); 15] = {
    use Pauli::*;
    [
        (I, X),
        (I, Y),
        (I, Z),
        (X, I),
        (X, X),
        (X, Y),
        (X, Z),
        (Y, I),
        (Y, X),
        (Y, Y),
        (Y, Z),
        (Z, I),
        (Z, X),
        (Z, Y),
        (Z, Z),
    ]
};

/// Stochastic noise: uniform 15-way depolarizing after CNOTs, independent X
/// and Z components at data idles, and a classical flip of each outcome.
pub struct RandomNoise<'a, R> {
    rates: &'a SimRates,
    idle_x: f64,
    idle_z: f64,
    rng: R,
}

impl<'a, R: Rng> RandomNoise<'a, R> {
    pub fn new(rates: &'a SimRates, rng: R) -> Self {
        Self {
            rates,
            idle_x: rates.idle_marginal(Sector::X),
            idle_z: rates.idle_marginal(Sector::Z),
            rng,
        }
    }

    #[inline]
    fn bernoulli(&mut self, p: f64) -> bool {
        p > 0.0 && self.rng.random::<f64>() < p
    }
}

impl<R: Rng> NoiseSource for RandomNoise<'_, R> {
    #[inline]
    fn cnot(&mut self, _: Site) -> Option<(Pauli, Pauli)> {
        let p = self.rates.p2;
        if p == 0.0 {
            return None;
        }
        let u: f64 = self.rng.random();
        if u < p {
            let k = ((u / p) * 15.0) as usize;
            Some(TWO_QUBIT[k.min(14)])
        } else {
            None
        }
    }

    #[inline]
    fn data_idle(&mut self, _: Site) -> (bool, bool) {
        (self.bernoulli(self.idle_x), self.bernoulli(self.idle_z))
    }

    #[inline]
    fn outcome_flip(&mut self, _: Site, stab: StabRef) -> bool {
        self.bernoulli(self.rates.outcome_flip(stab.kind))
    }
}

/// Pauli frame over every qubit of a layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliFrame {
    pub x: Vec<bool>,
    pub z: Vec<bool>,
}

impl PauliFrame {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            x: vec![false; num_qubits],
            z: vec![false; num_qubits],
        }
    }

    pub fn clear(&mut self) {
        self.x.fill(false);
        self.z.fill(false);
    }

    #[inline]
    pub fn apply(&mut self, qubit: usize, p: Pauli) {
        self.x[qubit] ^= p.has_x();
        self.z[qubit] ^= p.has_z();
    }

    /// Whether the residual error of `sector` overlaps `support` oddly.
    pub fn parity(&self, sector: Sector, support: &[usize]) -> bool {
        let bits = match sector {
            Sector::X => &self.x,
            Sector::Z => &self.z,
        };
        support.iter().fold(false, |acc, &q| acc ^ bits[q])
    }
}

/// Runs one round of the cycle, writing outcome-flip bits relative to the
/// noiseless reference into `z_out` / `x_out` (indexed by stabilizer).
pub fn run_round<N: NoiseSource>(
    schedule: &CycleSchedule,
    frame: &mut PauliFrame,
    round: usize,
    noise: &mut N,
    z_out: &mut [bool],
    x_out: &mut [bool],
) {
    for (step_idx, step) in schedule.steps().iter().enumerate() {
        for (op_idx, op) in step.ops.iter().enumerate() {
            let site = Site {
                round,
                step: step_idx,
                op: op_idx,
            };
            match *op {
                Op::Init { qubit } => {
                    frame.x[qubit] = false;
                    frame.z[qubit] = false;
                }
                Op::Hadamard { qubit } => {
                    std::mem::swap(&mut frame.x[qubit], &mut frame.z[qubit]);
                }
                Op::Cnot {
                    control, target, ..
                } => {
                    frame.x[target] ^= frame.x[control];
                    frame.z[control] ^= frame.z[target];
                    if let Some((pc, pt)) = noise.cnot(site) {
                        frame.apply(control, pc);
                        frame.apply(target, pt);
                    }
                }
                Op::Measure { qubit, stab } => {
                    let flipped = frame.x[qubit] ^ noise.outcome_flip(site, stab);
                    match stab.kind {
                        StabKind::Z => z_out[stab.index] = flipped,
                        StabKind::X => x_out[stab.index] = flipped,
                    }
                }
                Op::Idle { qubit, kind } => {
                    if schedule.is_noisy_idle(qubit, kind) {
                        let (ex, ez) = noise.data_idle(site);
                        frame.x[qubit] ^= ex;
                        frame.z[qubit] ^= ez;
                    }
                }
            }
        }
    }
}

/// A detection event: stabilizer index (within its kind) and round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DetectionEvent {
    pub stab: usize,
    pub round: usize,
}

/// Outcomes and detection events of a multi-round run.
#[derive(Debug, Clone, Serialize)]
pub struct SyndromeRecord {
    pub rounds: usize,
    /// `outcomes_z[s][r]`: flip bit of Z stabilizer `s` in round `r`.
    pub outcomes_z: Vec<Vec<bool>>,
    pub outcomes_x: Vec<Vec<bool>>,
}

impl SyndromeRecord {
    /// Events of the stabilizers detecting `sector` errors; round 0 compares
    /// against the noiseless reference.
    pub fn detection_events(&self, sector: Sector) -> Vec<DetectionEvent> {
        let outcomes = match sector {
            Sector::X => &self.outcomes_z,
            Sector::Z => &self.outcomes_x,
        };
        let mut events = Vec::new();
        for round in 0..self.rounds {
            for (stab, row) in outcomes.iter().enumerate() {
                let prev = round.checked_sub(1).is_some_and(|r| row[r]);
                if row[round] != prev {
                    events.push(DetectionEvent { stab, round });
                }
            }
        }
        events
    }
}

/// Runs `rounds` rounds with `noise` followed by one noiseless readout round,
/// from a clean frame. Returns the record (of `rounds + 1` rounds) and the
/// final frame.
pub fn simulate<N: NoiseSource>(
    layout: &Layout,
    schedule: &CycleSchedule,
    noise: &mut N,
    rounds: usize,
) -> (SyndromeRecord, PauliFrame) {
    let nz = layout.z_stabilizers().len();
    let nx = layout.x_stabilizers().len();
    let mut frame = PauliFrame::new(layout.num_qubits());
    let mut outcomes_z = vec![vec![false; rounds + 1]; nz];
    let mut outcomes_x = vec![vec![false; rounds + 1]; nx];
    let mut z = vec![false; nz];
    let mut x = vec![false; nx];
    for round in 0..=rounds {
        if round < rounds {
            run_round(schedule, &mut frame, round, noise, &mut z, &mut x);
        } else {
            run_round(schedule, &mut frame, round, &mut Noiseless, &mut z, &mut x);
        }
        for (s, &bit) in z.iter().enumerate() {
            outcomes_z[s][round] = bit;
        }
        for (s, &bit) in x.iter().enumerate() {
            outcomes_x[s][round] = bit;
        }
    }
    (
        SyndromeRecord {
            rounds: rounds + 1,
            outcomes_z,
            outcomes_x,
        },
        frame,
    )
}

/// Injects a fixed list of faults at given sites; everything else is noiseless.
#[derive(Debug, Clone, Default)]
pub struct InjectedFaults {
    pub cnot: Vec<(Site, (Pauli, Pauli))>,
    pub idle: Vec<(Site, (bool, bool))>,
    pub flips: Vec<Site>,
}

impl NoiseSource for InjectedFaults {
    fn cnot(&mut self, site: Site) -> Option<(Pauli, Pauli)> {
        let mut acc: Option<(Pauli, Pauli)> = None;
        for &(s, (a, b)) in &self.cnot {
            if s == site {
                acc = Some(match acc {
                    None => (a, b),
                    Some((c, t)) => (compose(c, a), compose(t, b)),
                });
            }
        }
        acc
    }

    fn data_idle(&mut self, site: Site) -> (bool, bool) {
        self.idle
            .iter()
            .filter(|(s, _)| *s == site)
            .fold((false, false), |(x, z), (_, (ex, ez))| (x ^ ex, z ^ ez))
    }

    fn outcome_flip(&mut self, site: Site, _: StabRef) -> bool {
        self.flips.iter().filter(|&&s| s == site).count() % 2 == 1
    }
}

/// Product of two Paulis, ignoring phase.
pub fn compose(a: Pauli, b: Pauli) -> Pauli {
    let x = a.has_x() ^ b.has_x();
    let z = a.has_z() ^ b.has_z();
    match (x, z) {
        (false, false) => Pauli::I,
        (true, false) => Pauli::X,
        (true, true) => Pauli::Y,
        (false, true) => Pauli::Z,
    }
}
