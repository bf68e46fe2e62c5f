use serde::Serialize;

use super::frame::{simulate, InjectedFaults, Site, SimRates};
use super::layout::Layout;
use super::schedule::{CycleSchedule, Op, StabRef};
use crate::error_model::{two_qubit_paulis, Pauli, Sector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FaultKind {
    Cnot {
        stab: StabRef,
        control: usize,
        target: usize,
        pauli: (Pauli, Pauli),
    },
    DataIdle {
        qubit: usize,
        sector: Sector,
    },
    OutcomeFlip {
        stab: StabRef,
    },
}

/// Detection event relative to the round in which the fault occurred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct RelativeEvent {
    pub stab: usize,
    pub dt: usize,
}

/// One elementary fault placed in round 0 together with its syndrome
/// signature and its effect on the logical operators.
#[derive(Debug, Clone, Serialize)]
pub struct SingleFault {
    pub step: usize,
    pub op: usize,
    pub kind: FaultKind,
    pub x_events: Vec<RelativeEvent>,
    pub z_events: Vec<RelativeEvent>,
    /// Logical flip of the X and Z sectors.
    pub flips: [bool; 2],
}

impl SingleFault {
    pub fn events(&self, sector: Sector) -> &[RelativeEvent] {
        match sector {
            Sector::X => &self.x_events,
            Sector::Z => &self.z_events,
        }
    }

    pub fn flips(&self, sector: Sector) -> bool {
        match sector {
            Sector::X => self.flips[0],
            Sector::Z => self.flips[1],
        }
    }

    pub fn probability(&self, rates: &SimRates) -> f64 {
        match self.kind {
            FaultKind::Cnot { .. } => rates.p2 / 15.0,
            FaultKind::DataIdle { sector, .. } => rates.idle_marginal(sector),
            FaultKind::OutcomeFlip { stab } => rates.outcome_flip(stab.kind),
        }
    }

    /// Noise source placing this fault in `round`.
    pub fn inject(&self, round: usize) -> InjectedFaults {
        let site = Site {
            round,
            step: self.step,
            op: self.op,
        };
        let mut noise = InjectedFaults::default();
        match self.kind {
            FaultKind::Cnot { pauli, .. } => noise.cnot.push((site, pauli)),
            FaultKind::DataIdle { sector, .. } => {
                noise.idle.push((site, (sector == Sector::X, sector == Sector::Z)))
            }
            FaultKind::OutcomeFlip { .. } => noise.flips.push(site),
        }
        noise
    }
}

/// Every elementary fault of one round of `schedule`, each simulated in
/// isolation from a clean state.
pub fn enumerate_single_faults(layout: &Layout, schedule: &CycleSchedule) -> Vec<SingleFault> {
    let mut out = Vec::new();
    for (step, s) in schedule.steps().iter().enumerate() {
        for (op, o) in s.ops.iter().enumerate() {
            let kinds: Vec<FaultKind> = match *o {
                Op::Cnot {
                    control,
                    target,
                    stab,
                } => two_qubit_paulis()
                    .map(|pauli| FaultKind::Cnot {
                        stab,
                        control,
                        target,
                        pauli,
                    })
                    .collect(),
                Op::Idle { qubit, kind } if schedule.is_noisy_idle(qubit, kind) => Sector::BOTH
                    .map(|sector| FaultKind::DataIdle { qubit, sector })
                    .to_vec(),
                Op::Measure { stab, .. } => vec![FaultKind::OutcomeFlip { stab }],
                _ => Vec::new(),
            };
            for kind in kinds {
                let mut fault = SingleFault {
                    step,
                    op,
                    kind,
                    x_events: Vec::new(),
                    z_events: Vec::new(),
                    flips: [false; 2],
                };
                let (rec, frame) = simulate(layout, schedule, &mut fault.inject(0), 1);
                let rel = |sector| {
                    rec.detection_events(sector)
                        .into_iter()
                        .map(|e| RelativeEvent {
                            stab: e.stab,
                            dt: e.round,
                        })
                        .collect()
                };
                fault.x_events = rel(Sector::X);
                fault.z_events = rel(Sector::Z);
                fault.flips = Sector::BOTH.map(|s| frame.parity(s, layout.failure_support(s)));
                out.push(fault);
            }
        }
    }
    out
}
