//! Pauli-frame simulation of the planar surface code under circuit noise,
//! decoded by minimum-weight perfect matching.

pub mod faults;
pub mod frame;
pub mod layout;
pub mod schedule;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::error_model::Sector;
use crate::exec::Execution;
use crate::matcher::{Decoder, MatchingGraph};
use faults::{enumerate_single_faults, SingleFault};
use frame::{run_round, NoiseSource, Noiseless, PauliFrame, RandomNoise, SimRates};
use layout::{Layout, StabKind};
use schedule::CycleSchedule;

/// Failure count below which a per-round estimate is flagged.
pub const CONFIDENT_FAILS: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimResult {
    pub shots: u64,
    pub rounds: usize,
    pub fails_x: u64,
    pub fails_z: u64,
    pub p_xl: f64,
    pub p_zl: f64,
    pub stderr_x: f64,
    pub stderr_z: f64,
    pub low_confidence: bool,
}

impl SimResult {
    pub fn from_counts(shots: u64, rounds: usize, fails_x: u64, fails_z: u64) -> Self {
        let denom = shots as f64 * rounds as f64;
        let rate = |f: u64| if shots == 0 { 0.0 } else { f as f64 / denom };
        let stderr = |f: u64| {
            if f == 0 {
                0.0
            } else {
                (f as f64).sqrt() / denom
            }
        };
        Self {
            shots,
            rounds,
            fails_x,
            fails_z,
            p_xl: rate(fails_x),
            p_zl: rate(fails_z),
            stderr_x: stderr(fails_x),
            stderr_z: stderr(fails_z),
            low_confidence: fails_x.min(fails_z) < CONFIDENT_FAILS,
        }
    }

    pub fn rate(&self, sector: Sector) -> f64 {
        match sector {
            Sector::X => self.p_xl,
            Sector::Z => self.p_zl,
        }
    }

    pub fn stderr(&self, sector: Sector) -> f64 {
        match sector {
            Sector::X => self.stderr_x,
            Sector::Z => self.stderr_z,
        }
    }

    pub fn fails(&self, sector: Sector) -> u64 {
        match sector {
            Sector::X => self.fails_x,
            Sector::Z => self.fails_z,
        }
    }
}

/// Rounds per shot targeting at most 0.1 expected failures per shot, given a
/// per-round rate estimate.
pub fn default_rounds(d: usize, p_hat: f64) -> usize {
    if !(p_hat > 0.0) {
        return 10 * d;
    }
    let want = (0.1 / p_hat).ceil();
    if want >= (10 * d) as f64 {
        10 * d
    } else {
        (want as usize).max(d)
    }
}

/// A fixed distance, rate set and rounds per shot, with its decoding graphs.
#[derive(Debug, Clone)]
pub struct Experiment {
    layout: Layout,
    schedule: CycleSchedule,
    faults: Vec<SingleFault>,
    rates: SimRates,
    rounds: usize,
    graphs: [MatchingGraph; 2],
}

struct Scratch<'e> {
    frame: PauliFrame,
    cur: [Vec<bool>; 2],
    prev: [Vec<bool>; 2],
    events: [Vec<usize>; 2],
    decoders: [Decoder<'e>; 2],
}

impl Experiment {
    pub fn new(d: usize, rates: SimRates, rounds: usize) -> Result<Self> {
        let layout = Layout::new(d)?;
        let schedule = CycleSchedule::new(&layout);
        let faults = enumerate_single_faults(&layout, &schedule);
        Self::assemble(layout, schedule, faults, rates, rounds)
    }

    fn assemble(
        layout: Layout,
        schedule: CycleSchedule,
        faults: Vec<SingleFault>,
        rates: SimRates,
        rounds: usize,
    ) -> Result<Self> {
        if rounds == 0 {
            return Err(Error::InvalidArgument("rounds must be at least 1".into()));
        }
        let build = |sector| {
            let n = layout.stabilizers(StabKind::detecting(sector)).len();
            MatchingGraph::build(&faults, n, &rates, sector, rounds)
        };
        let graphs = [build(Sector::X)?, build(Sector::Z)?];
        Ok(Self {
            layout,
            schedule,
            faults,
            rates,
            rounds,
            graphs,
        })
    }

    /// Same circuit and rates with a different number of rounds per shot.
    pub fn with_rounds(&self, rounds: usize) -> Result<Self> {
        Self::assemble(
            self.layout.clone(),
            self.schedule.clone(),
            self.faults.clone(),
            self.rates,
            rounds,
        )
    }

    /// Chooses rounds per shot from a pilot run of `pilot_shots` shots at
    /// `d` rounds (see [`default_rounds`]).
    pub fn auto_rounds(d: usize, rates: SimRates, pilot_shots: u64, seed: u64, exec: Execution) -> Result<Self> {
        let pilot = Self::new(d, rates, d)?;
        let r = pilot.run(pilot_shots, seed ^ 0x005e_ed0f_9170, exec)?;
        let rounds = default_rounds(d, r.p_xl.max(r.p_zl));
        if rounds == d {
            Ok(pilot)
        } else {
            pilot.with_rounds(rounds)
        }
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn schedule(&self) -> &CycleSchedule {
        &self.schedule
    }

    pub fn faults(&self) -> &[SingleFault] {
        &self.faults
    }

    pub fn rates(&self) -> &SimRates {
        &self.rates
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn graph(&self, sector: Sector) -> &MatchingGraph {
        match sector {
            Sector::X => &self.graphs[0],
            Sector::Z => &self.graphs[1],
        }
    }

    fn scratch(&self) -> Scratch<'_> {
        let nz = self.layout.z_stabilizers().len();
        let nx = self.layout.x_stabilizers().len();
        Scratch {
            frame: PauliFrame::new(self.layout.num_qubits()),
            cur: [vec![false; nz], vec![false; nx]],
            prev: [vec![false; nz], vec![false; nx]],
            events: [Vec::new(), Vec::new()],
            decoders: [Decoder::new(&self.graphs[0]), Decoder::new(&self.graphs[1])],
        }
    }

    /// Runs shot `shot` of the stream identified by `seed`, returning the
    /// logical failure bits of the X and Z sectors.
    fn shot(&self, seed: u64, shot: u64, s: &mut Scratch<'_>) -> Result<[bool; 2]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(shot);
        self.run_shot(&mut RandomNoise::new(&self.rates, rng), s)
    }

    fn run_shot<N: NoiseSource>(&self, noise: &mut N, s: &mut Scratch<'_>) -> Result<[bool; 2]> {
        s.frame.clear();
        for i in 0..2 {
            s.prev[i].fill(false);
            s.events[i].clear();
        }
        for round in 0..=self.rounds {
            let [z, x] = &mut s.cur;
            if round < self.rounds {
                run_round(&self.schedule, &mut s.frame, round, noise, z, x);
            } else {
                run_round(&self.schedule, &mut s.frame, round, &mut Noiseless, z, x);
            }
            // Z stabilizers detect the X sector and come first in `cur`.
            for i in 0..2 {
                let n = s.cur[i].len();
                for stab in 0..n {
                    if s.cur[i][stab] != s.prev[i][stab] {
                        s.events[i].push(round * n + stab);
                    }
                }
                std::mem::swap(&mut s.cur[i], &mut s.prev[i]);
            }
        }
        let mut fail = [false; 2];
        for (i, sector) in Sector::BOTH.into_iter().enumerate() {
            let m = s.decoders[i].decode(&s.events[i])?;
            fail[i] = apply_correction(m.flip, &s.frame, &self.layout, sector);
        }
        Ok(fail)
    }

    /// Runs one shot with caller-supplied noise and decodes it, returning the
    /// logical failure bits of the X and Z sectors.
    pub fn run_with_noise<N: NoiseSource>(&self, noise: &mut N) -> Result<[bool; 2]> {
        self.run_shot(noise, &mut self.scratch())
    }

    /// Runs shots `start..start + count`, returning `(fails_x, fails_z)`.
    pub fn run_range(&self, start: u64, count: u64, seed: u64, exec: Execution) -> Result<(u64, u64)> {
        let shot = |s: &mut Scratch<'_>, i: u64| -> Result<(u64, u64)> {
            let [x, z] = self.shot(seed, i, s)?;
            Ok((u64::from(x), u64::from(z)))
        };
        exec.map_reduce(
            start..start + count,
            || self.scratch(),
            shot,
            |a, b| (a.0 + b.0, a.1 + b.1),
        )
    }

    pub fn run(&self, shots: u64, seed: u64, exec: Execution) -> Result<SimResult> {
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        let (fx, fz) = self.run_range(0, shots, seed, exec)?;
        Ok(SimResult::from_counts(shots, self.rounds, fx, fz))
    }

    /// Runs shots in growing batches until both sectors reach `target_fails`
    /// or `shot_cap` shots were spent. The outcome only depends on the shot
    /// count reached, not on the batching.
    pub fn run_until(&self, target_fails: u64, shot_cap: u64, seed: u64, exec: Execution) -> Result<SimResult> {
        if shot_cap == 0 {
            return Err(Error::InvalidArgument("shot cap must be at least 1".into()));
        }
        let (mut shots, mut fx, mut fz) = (0u64, 0u64, 0u64);
        let mut batch = 1000u64.min(shot_cap);
        while shots < shot_cap && fx.min(fz) < target_fails {
            let n = batch.min(shot_cap - shots);
            let (x, z) = self.run_range(shots, n, seed, exec)?;
            shots += n;
            fx += x;
            fz += z;
            let worst = fx.min(fz);
            // Aim for the target in one more batch once failures show up.
            batch = if worst == 0 {
                shots * 2
            } else {
                let need = (target_fails.saturating_sub(worst) as f64 * shots as f64 / worst as f64 * 1.1) as u64;
                need.clamp(1000, shots * 4)
            };
        }
        Ok(SimResult::from_counts(shots, self.rounds, fx, fz))
    }
}

/// Logical failure bit of one sector: predicted flip of the correction XOR
/// the flip actually accumulated in the frame.
pub fn apply_correction(correction_flip: bool, frame: &PauliFrame, layout: &Layout, sector: Sector) -> bool {
    correction_flip ^ frame.parity(sector, layout.failure_support(sector))
}

/// Convenience wrapper: builds the experiment and runs `shots` shots.
pub fn run_monte_carlo(d: usize, rates: SimRates, shots: u64, rounds: usize, seed: u64) -> Result<SimResult> {
    Experiment::new(d, rates, rounds)?.run(shots, seed, Execution::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounds_policy() {
        assert_eq!(default_rounds(3, 0.0), 30);
        assert_eq!(default_rounds(3, 1e-3), 30);
        assert_eq!(default_rounds(3, 0.01), 10);
        assert_eq!(default_rounds(3, 0.02), 5);
        assert_eq!(default_rounds(3, 0.5), 3);
        assert_eq!(default_rounds(5, 0.004), 25);
    }

    #[test]
    fn result_statistics() {
        let r = SimResult::from_counts(1000, 10, 100, 0);
        assert_eq!(r.p_xl, 0.01);
        assert_eq!(r.stderr_x, 0.001);
        assert_eq!(r.p_zl, 0.0);
        assert_eq!(r.stderr_z, 0.0);
        assert!(r.low_confidence);
        assert!(!SimResult::from_counts(10, 1, 100, 120).low_confidence);
    }

    #[test]
    fn noiseless_never_fails() {
        for d in [3, 4] {
            let r = run_monte_carlo(d, SimRates::zero(), 50, 3, 7).unwrap();
            assert_eq!((r.fails_x, r.fails_z), (0, 0));
        }
    }

    #[test]
    fn deterministic_and_partition_independent() {
        let rates = SimRates::balanced(1.0, 1.0, 5e-3).unwrap();
        let e = Experiment::new(3, rates, 3).unwrap();
        let a = e.run(400, 11, Execution::Sequential).unwrap();
        let b = e.run(400, 11, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let (x1, z1) = e.run_range(0, 150, 11, Execution::Sequential).unwrap();
        let (x2, z2) = e.run_range(150, 250, 11, Execution::Sequential).unwrap();
        assert_eq!((x1 + x2, z1 + z2), (a.fails_x, a.fails_z));
        assert!(a.fails_x > 0);
    }
}
