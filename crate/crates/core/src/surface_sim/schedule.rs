use serde::Serialize;

use super::layout::{Direction, Layout, StabKind};

/// Index of a stabilizer within its kind's list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StabRef {
    pub kind: StabKind,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum IdleKind {
    Init,
    Had,
    Meas,
    Cnot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StepKind {
    SynInit,
    SynHad1,
    Cnot(Direction),
    SynHad2,
    SynMeas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Op {
    Init { qubit: usize },
    Hadamard { qubit: usize },
    Cnot { control: usize, target: usize, stab: StabRef },
    Measure { qubit: usize, stab: StabRef },
    Idle { qubit: usize, kind: IdleKind },
}

impl Op {
    pub fn qubits(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match *self {
            Op::Init { qubit }
            | Op::Hadamard { qubit }
            | Op::Measure { qubit, .. }
            | Op::Idle { qubit, .. } => (qubit, None),
            Op::Cnot {
                control, target, ..
            } => (control, Some(target)),
        };
        std::iter::once(a).chain(b)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Step {
    pub kind: StepKind,
    pub ops: Vec<Op>,
}

/// The eight time steps of one round of syndrome extraction, all stabilizers
/// measured simultaneously.
///
/// Z-stabilizer circuits use the data qubit as CNOT control, X-stabilizer
/// circuits use the syndrome qubit as control and are wrapped in Hadamards.
/// Where a syndrome has no data neighbor in the current direction it idles
/// for a CNOT duration instead.
#[derive(Debug, Clone, Serialize)]
pub struct CycleSchedule {
    num_data: usize,
    steps: Vec<Step>,
}

impl CycleSchedule {
    pub fn new(layout: &Layout) -> Self {
        let num_data = layout.num_data();
        let data_idle = |kind| (0..num_data).map(move |qubit| Op::Idle { qubit, kind });
        let all_stabs = || {
            [StabKind::Z, StabKind::X].into_iter().flat_map(|kind| {
                layout
                    .stabilizers(kind)
                    .iter()
                    .enumerate()
                    .map(move |(index, s)| (StabRef { kind, index }, s))
            })
        };

        let mut steps = Vec::with_capacity(8);

        let mut ops: Vec<Op> = all_stabs()
            .map(|(_, s)| Op::Init { qubit: s.ancilla })
            .collect();
        ops.extend(data_idle(IdleKind::Init));
        steps.push(Step {
            kind: StepKind::SynInit,
            ops,
        });

        let hadamard_step = |kind| {
            let mut ops: Vec<Op> = all_stabs()
                .map(|(r, s)| match r.kind {
                    StabKind::X => Op::Hadamard { qubit: s.ancilla },
                    StabKind::Z => Op::Idle {
                        qubit: s.ancilla,
                        kind: IdleKind::Had,
                    },
                })
                .collect();
            ops.extend(data_idle(IdleKind::Had));
            Step { kind, ops }
        };
        steps.push(hadamard_step(StepKind::SynHad1));

        for (slot, dir) in Direction::ORDER.into_iter().enumerate() {
            let mut busy = vec![false; num_data];
            let mut ops = Vec::new();
            for (stab, s) in all_stabs() {
                match s.neighbors[slot] {
                    Some(q) => {
                        busy[q] = true;
                        let (control, target) = match stab.kind {
                            StabKind::Z => (q, s.ancilla),
                            StabKind::X => (s.ancilla, q),
                        };
                        ops.push(Op::Cnot {
                            control,
                            target,
                            stab,
                        });
                    }
                    None => ops.push(Op::Idle {
                        qubit: s.ancilla,
                        kind: IdleKind::Cnot,
                    }),
                }
            }
            ops.extend(
                (0..num_data)
                    .filter(|&q| !busy[q])
                    .map(|qubit| Op::Idle {
                        qubit,
                        kind: IdleKind::Cnot,
                    }),
            );
            steps.push(Step {
                kind: StepKind::Cnot(dir),
                ops,
            });
        }

        steps.push(hadamard_step(StepKind::SynHad2));

        let mut ops: Vec<Op> = all_stabs()
            .map(|(stab, s)| Op::Measure {
                qubit: s.ancilla,
                stab,
            })
            .collect();
        ops.extend(data_idle(IdleKind::Meas));
        steps.push(Step {
            kind: StepKind::SynMeas,
            ops,
        });

        Self { num_data, steps }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn num_data(&self) -> usize {
        self.num_data
    }

    /// Whether an idle op carries data-qubit idle noise. CNOT-duration idles
    /// and syndrome-qubit idles are noiseless.
    #[inline]
    pub fn is_noisy_idle(&self, qubit: usize, kind: IdleKind) -> bool {
        qubit < self.num_data && kind != IdleKind::Cnot
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_steps_in_order() {
        let l = Layout::new(3).unwrap();
        let s = CycleSchedule::new(&l);
        let kinds: Vec<StepKind> = s.steps().iter().map(|s| s.kind).collect();
        assert_eq!(
            kinds,
            vec![
                StepKind::SynInit,
                StepKind::SynHad1,
                StepKind::Cnot(Direction::North),
                StepKind::Cnot(Direction::West),
                StepKind::Cnot(Direction::East),
                StepKind::Cnot(Direction::South),
                StepKind::SynHad2,
                StepKind::SynMeas,
            ]
        );
    }

    #[test]
    fn every_qubit_once_per_step() {
        for d in 3..=5 {
            let l = Layout::new(d).unwrap();
            let s = CycleSchedule::new(&l);
            for step in s.steps() {
                let mut seen = vec![0; l.num_qubits()];
                for op in &step.ops {
                    for q in op.qubits() {
                        seen[q] += 1;
                    }
                }
                assert!(seen.iter().all(|&c| c == 1), "{:?}", step.kind);
            }
        }
    }

    #[test]
    fn cnot_orientation() {
        let l = Layout::new(4).unwrap();
        let s = CycleSchedule::new(&l);
        let mut cnots = 0;
        for step in s.steps() {
            for op in &step.ops {
                if let Op::Cnot {
                    control,
                    target,
                    stab,
                } = *op
                {
                    cnots += 1;
                    let anc = l.stabilizers(stab.kind)[stab.index].ancilla;
                    match stab.kind {
                        StabKind::Z => assert!(target == anc && control < l.num_data()),
                        StabKind::X => assert!(control == anc && target < l.num_data()),
                    }
                }
            }
        }
        let weight: usize = [StabKind::X, StabKind::Z]
            .iter()
            .flat_map(|&k| l.stabilizers(k))
            .map(|s| s.support().count())
            .sum();
        assert_eq!(cnots, weight);
    }
}
