use serde::Serialize;

use crate::error::{Error, Result};
use crate::error_model::Sector;

/// Lattice site `(row, col)` on the `(2d-1) x (2d-1)` grid; row 0 is North.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Coord {
    pub row: usize,
    pub col: usize,
}

/// CNOT interaction order of every syndrome qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Direction {
    North,
    West,
    East,
    South,
}

impl Direction {
    pub const ORDER: [Direction; 4] = [
        Direction::North,
        Direction::West,
        Direction::East,
        Direction::South,
    ];
}

/// Stabilizer type: `Z` stabilizers detect X errors, `X` stabilizers detect Z
/// errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum StabKind {
    X,
    Z,
}

impl StabKind {
    /// The stabilizer type that detects errors of `sector`.
    pub fn detecting(sector: Sector) -> Self {
        match sector {
            Sector::X => StabKind::Z,
            Sector::Z => StabKind::X,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Stabilizer {
    pub kind: StabKind,
    pub pos: Coord,
    /// Qubit index of the syndrome qubit.
    pub ancilla: usize,
    /// Data qubit indices in `N, W, E, S` order; `None` past the boundary.
    pub neighbors: [Option<usize>; 4],
}

impl Stabilizer {
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.neighbors.iter().flatten().copied()
    }
}

/// Planar surface code of distance `d`.
///
/// Qubits are numbered data first, then Z-stabilizer syndromes, then
/// X-stabilizer syndromes. Z stabilizers sit on odd-row/even-column sites and
/// X stabilizers on even-row/odd-column sites, so Z stabilizers are truncated
/// on the West and East edges and X stabilizers on the North and South edges.
/// The logical X operator is then the column-0 chain of data qubits and the
/// logical Z operator the row-0 chain.
#[derive(Debug, Clone, Serialize)]
pub struct Layout {
    d: usize,
    data: Vec<Coord>,
    z_stabs: Vec<Stabilizer>,
    x_stabs: Vec<Stabilizer>,
    logical_x: Vec<usize>,
    logical_z: Vec<usize>,
}

impl Layout {
    pub fn new(d: usize) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidArgument(format!(
                "code distance must be at least 3, got {d}"
            )));
        }
        let n = 2 * d - 1;
        let mut data_index = vec![None; n * n];
        let mut data = Vec::with_capacity(d * d + (d - 1) * (d - 1));
        for row in 0..n {
            for col in 0..n {
                if (row + col) % 2 == 0 {
                    data_index[row * n + col] = Some(data.len());
                    data.push(Coord { row, col });
                }
            }
        }

        let at = |row: isize, col: isize| -> Option<usize> {
            if row < 0 || col < 0 || row >= n as isize || col >= n as isize {
                return None;
            }
            data_index[row as usize * n + col as usize]
        };
        let mut next_ancilla = data.len();
        let mut stabs = |kind: StabKind| -> Vec<Stabilizer> {
            let mut out = Vec::new();
            for row in 0..n {
                for col in 0..n {
                    let here = match kind {
                        StabKind::Z => row % 2 == 1 && col % 2 == 0,
                        StabKind::X => row % 2 == 0 && col % 2 == 1,
                    };
                    if !here {
                        continue;
                    }
                    let (r, c) = (row as isize, col as isize);
                    out.push(Stabilizer {
                        kind,
                        pos: Coord { row, col },
                        ancilla: next_ancilla,
                        neighbors: [at(r - 1, c), at(r, c - 1), at(r, c + 1), at(r + 1, c)],
                    });
                    next_ancilla += 1;
                }
            }
            out
        };
        let z_stabs = stabs(StabKind::Z);
        let x_stabs = stabs(StabKind::X);

        let logical_x = (0..n)
            .step_by(2)
            .map(|row| data_index[row * n].expect("column 0 even rows hold data"))
            .collect();
        let logical_z = (0..n)
            .step_by(2)
            .map(|col| data_index[col].expect("row 0 even columns hold data"))
            .collect();

        Ok(Self {
            d,
            data,
            z_stabs,
            x_stabs,
            logical_x,
            logical_z,
        })
    }

    pub fn distance(&self) -> usize {
        self.d
    }

    pub fn data_qubits(&self) -> &[Coord] {
        &self.data
    }

    pub fn num_data(&self) -> usize {
        self.data.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.data.len() + self.z_stabs.len() + self.x_stabs.len()
    }

    pub fn z_stabilizers(&self) -> &[Stabilizer] {
        &self.z_stabs
    }

    pub fn x_stabilizers(&self) -> &[Stabilizer] {
        &self.x_stabs
    }

    pub fn stabilizers(&self, kind: StabKind) -> &[Stabilizer] {
        match kind {
            StabKind::Z => &self.z_stabs,
            StabKind::X => &self.x_stabs,
        }
    }

    /// Data qubits supporting the logical X operator.
    pub fn logical_x(&self) -> &[usize] {
        &self.logical_x
    }

    /// Data qubits supporting the logical Z operator.
    pub fn logical_z(&self) -> &[usize] {
        &self.logical_z
    }

    /// Support on which a residual error of `sector` is tested for a logical
    /// flip: X errors are caught by the logical Z operator and vice versa.
    pub fn failure_support(&self, sector: Sector) -> &[usize] {
        match sector {
            Sector::X => &self.logical_z,
            Sector::Z => &self.logical_x,
        }
    }
}
