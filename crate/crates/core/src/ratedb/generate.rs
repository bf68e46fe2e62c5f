use super::db::{DbEntry, DbKey, RateDatabase};
use super::grid::GridSpec;
use crate::error::Result;
use crate::exec::Execution;
use crate::surface_sim::frame::SimRates;
use crate::surface_sim::Experiment;

#[derive(Debug, Clone, Copy)]
pub struct GenerateOptions {
    pub seed: u64,
    /// Shots of the pilot run that picks rounds per shot.
    pub pilot_shots: u64,
    pub exec: Execution,
}

impl GenerateOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            pilot_shots: 1000,
            exec: Execution::default(),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one grid point: depends on the master seed and the canonical key
/// text only, so a point's result does not depend on what else is generated.
pub fn point_seed(master: u64, key: &DbKey) -> u64 {
    // FNV-1a over the canonical key.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in format!("{},{},{},{}", key.d, key.r0, key.r1, key.p2).bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(master ^ splitmix64(h))
}

/// Simulates one grid point at balanced rates until both sectors reach the
/// failure target or the shot cap.
pub fn simulate_point(key: &DbKey, target_fails: u64, shot_cap: u64, opts: &GenerateOptions) -> Result<DbEntry> {
    let rates = SimRates::balanced(key.r0.value(), key.r1.value(), key.p2.value())?;
    let seed = point_seed(opts.seed, key);
    let exp = Experiment::auto_rounds(key.d as usize, rates, opts.pilot_shots, seed, opts.exec)?;
    let r = exp.run_until(target_fails, shot_cap, seed, opts.exec)?;
    Ok(DbEntry::from_sim(&r))
}

/// Builds a database over every point of `spec`. `progress` sees each entry
/// as it completes along with `(done, total)`.
pub fn generate(
    spec: &GridSpec,
    opts: &GenerateOptions,
    mut progress: impl FnMut(&DbKey, &DbEntry, usize, usize),
) -> Result<RateDatabase> {
    spec.validate()?;
    let points = spec.points();
    let mut db = RateDatabase::new();
    db.seed = Some(opts.seed);
    db.version = Some(env!("CARGO_PKG_VERSION").to_string());
    for (i, key) in points.iter().enumerate() {
        let entry = simulate_point(key, spec.target_fails, spec.shot_cap, opts)?;
        progress(key, &entry, i + 1, points.len());
        db.insert(*key, entry)?;
    }
    Ok(db)
}
