use std::collections::btree_map::{self, BTreeMap};
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::ladder::Ladder;
use crate::error::{Error, Result};
use crate::error_model::Sector;
use crate::surface_sim::{SimResult, CONFIDENT_FAILS};

pub const HEADER: &str = "d,r0,r1,p2,shots,rounds,fails_x,fails_z,p_xl,p_zl,low_confidence";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DbKey {
    pub d: u32,
    pub r0: Ladder,
    pub r1: Ladder,
    pub p2: Ladder,
}

impl DbKey {
    pub fn new(d: u32, r0: Ladder, r1: Ladder, p2: Ladder) -> Self {
        Self { d, r0, r1, p2 }
    }

    /// Parses canonical or numeric axis text, e.g. `DbKey::parse(3, "2", "1", "1e-3")`.
    pub fn parse(d: u32, r0: &str, r1: &str, p2: &str) -> Result<Self> {
        Ok(Self {
            d,
            r0: r0.parse()?,
            r1: r1.parse()?,
            p2: p2.parse()?,
        })
    }

    pub(crate) fn missing(&self) -> Error {
        Error::MissingEntry {
            d: self.d,
            r0: self.r0.to_string(),
            r1: self.r1.to_string(),
            p2: self.p2.to_string(),
        }
    }
}

impl std::fmt::Display for DbKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "d={}, r0={}, r1={}, p2={}", self.d, self.r0, self.r1, self.p2)
    }
}

/// Measured per-round logical error rates at one grid point.
///
/// An entry with `shots == 0` carries rates supplied from elsewhere (for
/// example published tables) rather than measured here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DbEntry {
    pub shots: u64,
    pub rounds: usize,
    pub fails_x: u64,
    pub fails_z: u64,
    pub p_xl: f64,
    pub p_zl: f64,
    pub low_confidence: bool,
}

impl DbEntry {
    pub fn from_sim(r: &SimResult) -> Self {
        Self {
            shots: r.shots,
            rounds: r.rounds,
            fails_x: r.fails_x,
            fails_z: r.fails_z,
            p_xl: r.p_xl,
            p_zl: r.p_zl,
            low_confidence: r.low_confidence,
        }
    }

    /// Externally supplied rates with no sampling record.
    pub fn seeded(p_xl: f64, p_zl: f64) -> Result<Self> {
        let e = Self {
            shots: 0,
            rounds: 0,
            fails_x: 0,
            fails_z: 0,
            p_xl,
            p_zl,
            low_confidence: false,
        };
        e.validate().map_err(Error::InvalidArgument)?;
        Ok(e)
    }

    pub fn rate(&self, sector: Sector) -> f64 {
        match sector {
            Sector::X => self.p_xl,
            Sector::Z => self.p_zl,
        }
    }

    /// Standard error of the rate; zero for seeded entries and for sectors
    /// without failures.
    pub fn stderr(&self, sector: Sector) -> f64 {
        if self.shots == 0 {
            return 0.0;
        }
        let f = match sector {
            Sector::X => self.fails_x,
            Sector::Z => self.fails_z,
        };
        (f as f64).sqrt() / (self.shots as f64 * self.rounds as f64)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        for (name, p) in [("p_xl", self.p_xl), ("p_zl", self.p_zl)] {
            if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
                return Err(format!("{name} = {p} is not a probability"));
            }
        }
        if self.shots == 0 {
            if self.fails_x != 0 || self.fails_z != 0 || self.low_confidence {
                return Err("an entry without shots cannot record failures or low confidence".into());
            }
            return Ok(());
        }
        if self.rounds == 0 {
            return Err("rounds must be positive when shots are recorded".into());
        }
        let trials = self.shots as f64 * self.rounds as f64;
        for (name, f, p) in [("x", self.fails_x, self.p_xl), ("z", self.fails_z, self.p_zl)] {
            if f > self.shots {
                return Err(format!("fails_{name} exceeds shots"));
            }
            let want = f as f64 / trials;
            if (p - want).abs() > 1e-9 * want {
                return Err(format!("p_{name}l = {p} disagrees with fails_{name} / (shots * rounds) = {want}"));
            }
        }
        let low = self.fails_x.min(self.fails_z) < CONFIDENT_FAILS;
        if low != self.low_confidence {
            return Err(format!("low_confidence must be {low} for these failure counts"));
        }
        Ok(())
    }
}

/// Logical error rates keyed by grid point. Immutable once loaded.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RateDatabase {
    entries: BTreeMap<DbKey, DbEntry>,
    /// Master seed the entries were generated with, if any.
    pub seed: Option<u64>,
    /// Version of the generator that wrote the file.
    pub version: Option<String>,
}

impl RateDatabase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &DbKey) -> Option<&DbEntry> {
        self.entries.get(key)
    }

    pub fn entries(&self) -> btree_map::Iter<'_, DbKey, DbEntry> {
        self.entries.iter()
    }

    /// Adds an entry; keys must be new.
    pub fn insert(&mut self, key: DbKey, entry: DbEntry) -> Result<()> {
        entry
            .validate()
            .map_err(|m| Error::InvalidArgument(format!("{key}: {m}")))?;
        match self.entries.entry(key) {
            btree_map::Entry::Occupied(_) => Err(Error::InvalidArgument(format!("duplicate key {key}"))),
            btree_map::Entry::Vacant(v) => {
                v.insert(entry);
                Ok(())
            }
        }
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        if self.seed.is_some() || self.version.is_some() {
            out.push('#');
            if let Some(s) = self.seed {
                write!(out, " seed={s}").unwrap();
            }
            if let Some(v) = &self.version {
                write!(out, " version={v}").unwrap();
            }
            out.push('\n');
        }
        out.push_str(HEADER);
        out.push('\n');
        for (k, e) in &self.entries {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{:e},{:e},{}",
                k.d, k.r0, k.r1, k.p2, e.shots, e.rounds, e.fails_x, e.fails_z, e.p_xl, e.p_zl, e.low_confidence
            )
            .unwrap();
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text)
    }

    /// Parses database text. Row numbers in errors are file line numbers.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut db = Self::new();
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let row_err = |row: usize, message: String| Error::DatabaseRow { row, message };

        let mut next = lines.next();
        if let Some((row, line)) = next {
            if let Some(meta) = line.strip_prefix('#') {
                for field in meta.split_whitespace() {
                    match field.split_once('=') {
                        Some(("seed", v)) => {
                            db.seed = Some(v.parse().map_err(|_| row_err(row, format!("bad seed '{v}'")))?)
                        }
                        Some(("version", v)) => db.version = Some(v.to_string()),
                        _ => return Err(row_err(row, format!("unknown metadata '{field}'"))),
                    }
                }
                next = lines.next();
            }
        }
        match next {
            Some((_, h)) if h.trim_end_matches('\r') == HEADER => {}
            Some((row, h)) => return Err(row_err(row, format!("expected header '{HEADER}', found '{h}'"))),
            None => return Err(row_err(1, "missing header".into())),
        }

        for (row, line) in lines {
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let (key, entry) = parse_row(line).map_err(|m| row_err(row, m))?;
            entry.validate().map_err(|m| row_err(row, m))?;
            if db.entries.insert(key, entry).is_some() {
                return Err(row_err(row, format!("duplicate key {key}")));
            }
        }
        Ok(db)
    }

    /// Pairs of entries where a rate drops by more than two standard errors
    /// as one noise axis (r0, r1 or p2) steps up with the others fixed.
    pub fn monotonicity_violations(&self) -> Vec<(DbKey, DbKey, Sector)> {
        let mut out = Vec::new();
        for (&k, e) in &self.entries {
            let ups = [
                DbKey { r0: k.r0.next_up(), ..k },
                DbKey { r1: k.r1.next_up(), ..k },
                DbKey { p2: k.p2.next_up(), ..k },
            ];
            for up in ups {
                let Some(u) = self.entries.get(&up) else {
                    continue;
                };
                for s in Sector::BOTH {
                    let sigma = e.stderr(s).hypot(u.stderr(s));
                    if u.rate(s) < e.rate(s) - 2.0 * sigma {
                        out.push((k, up, s));
                    }
                }
            }
        }
        out
    }
}

fn parse_row(line: &str) -> std::result::Result<(DbKey, DbEntry), String> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 11 {
        return Err(format!("expected 11 fields, found {}", fields.len()));
    }
    fn num<T: std::str::FromStr>(name: &str, s: &str) -> std::result::Result<T, String> {
        s.parse().map_err(|_| format!("{name}: cannot parse '{s}'"))
    }
    let lad = |name: &str, s: &str| -> std::result::Result<Ladder, String> {
        s.parse::<Ladder>().map_err(|_| format!("{name}: '{s}' is not a 1-2-5 ladder value"))
    };
    let key = DbKey {
        d: num("d", fields[0])?,
        r0: lad("r0", fields[1])?,
        r1: lad("r1", fields[2])?,
        p2: lad("p2", fields[3])?,
    };
    let entry = DbEntry {
        shots: num("shots", fields[4])?,
        rounds: num("rounds", fields[5])?,
        fails_x: num("fails_x", fields[6])?,
        fails_z: num("fails_z", fields[7])?,
        p_xl: num("p_xl", fields[8])?,
        p_zl: num("p_zl", fields[9])?,
        low_confidence: num("low_confidence", fields[10])?,
    };
    Ok((key, entry))
}
