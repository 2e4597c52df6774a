//! Pareto dominance and the bounded solution archive used by the
//! multi-objective annealer.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::BitVector;

/// Objective values of one solution, all minimised.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EnergyVector(pub Vec<i64>);

impl EnergyVector {
    pub fn new(values: Vec<i64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<[i64; 2]> for EnergyVector {
    fn from(v: [i64; 2]) -> Self {
        Self(v.to_vec())
    }
}

/// Pairwise relation between two energy vectors under minimisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dominance {
    Equivalent,
    Dominates,
    DominatedBy,
    Incomparable,
}

/// Relation of `u` to `v`.
pub fn compare(u: &EnergyVector, v: &EnergyVector) -> Result<Dominance> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: u.len(), actual: v.len() });
    }
    Ok(compare_values(u.values(), v.values()))
}

pub(crate) fn compare_values<T: PartialOrd>(u: &[T], v: &[T]) -> Dominance {
    let mut better = false;
    let mut worse = false;
    for (a, b) in u.iter().zip(v) {
        if a < b {
            better = true;
        } else if a > b {
            worse = true;
        }
    }
    match (better, worse) {
        (false, false) => Dominance::Equivalent,
        (true, false) => Dominance::Dominates,
        (false, true) => Dominance::DominatedBy,
        (true, true) => Dominance::Incomparable,
    }
}

/// `u` strictly dominates `v`.
pub fn dominates(u: &EnergyVector, v: &EnergyVector) -> bool {
    compare_values(u.values(), v.values()) == Dominance::Dominates
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub solution: BitVector,
    pub energies: EnergyVector,
}

impl ArchiveEntry {
    pub fn new(solution: BitVector, energies: EnergyVector) -> Self {
        Self { solution, energies }
    }
}

/// What an archive update did with the candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateOutcome {
    Replaced(usize),
    Appended,
    Rejected,
}

/// How the archive admits accepted solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArchivePolicy {
    /// Replace the first dominated entry, else append while there is room.
    Explore,
    /// Admit only non-dominated candidates, replacing a random dominated entry.
    Exploit,
}

/// Fixed-capacity store of solutions in insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Archive {
    capacity: usize,
    entries: Vec<ArchiveEntry>,
}

impl Archive {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::InvalidParameter("archive capacity must be at least 1".into()));
        }
        Ok(Self { capacity, entries: Vec::with_capacity(capacity) })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<ArchiveEntry> {
        self.entries
    }

    fn contains_solution(&self, x: &BitVector) -> bool {
        self.entries.iter().any(|e| &e.solution == x)
    }

    /// Explorative update: `x` replaces the first entry (in insertion order)
    /// it dominates; otherwise it is appended if there is room.
    pub fn update_explore(&mut self, x: ArchiveEntry) -> UpdateOutcome {
        if self.contains_solution(&x.solution) {
            return UpdateOutcome::Rejected;
        }
        if let Some(pos) = self.entries.iter().position(|y| dominates(&x.energies, &y.energies)) {
            self.entries[pos] = x;
            return UpdateOutcome::Replaced(pos);
        }
        if self.entries.len() < self.capacity {
            self.entries.push(x);
            return UpdateOutcome::Appended;
        }
        UpdateOutcome::Rejected
    }

    /// Exploitative update: ignored when any entry dominates `x`; otherwise
    /// `x` replaces a uniformly chosen entry it dominates, or is appended if
    /// it dominates none and there is room.
    pub fn update_exploit<R: Rng + ?Sized>(&mut self, x: ArchiveEntry, rng: &mut R) -> UpdateOutcome {
        if self.contains_solution(&x.solution) {
            return UpdateOutcome::Rejected;
        }
        let dominated: Vec<usize> = self
            .entries
            .iter()
            .enumerate()
            .filter(|(_, y)| dominates(&x.energies, &y.energies))
            .map(|(i, _)| i)
            .collect();
        if self.entries.iter().any(|z| dominates(&z.energies, &x.energies)) {
            return UpdateOutcome::Rejected;
        }
        if !dominated.is_empty() {
            let pos = dominated[rng.random_range(0..dominated.len())];
            self.entries[pos] = x;
            return UpdateOutcome::Replaced(pos);
        }
        if self.entries.len() < self.capacity {
            self.entries.push(x);
            return UpdateOutcome::Appended;
        }
        UpdateOutcome::Rejected
    }

    pub fn update<R: Rng + ?Sized>(&mut self, policy: ArchivePolicy, x: ArchiveEntry, rng: &mut R) -> UpdateOutcome {
        match policy {
            ArchivePolicy::Explore => self.update_explore(x),
            ArchivePolicy::Exploit => self.update_exploit(x, rng),
        }
    }

    /// Pushes without any dominance check, still honouring capacity and
    /// duplicate suppression. Used to seed the archive with the start vector.
    pub fn seed(&mut self, x: ArchiveEntry) -> UpdateOutcome {
        if self.entries.len() >= self.capacity || self.contains_solution(&x.solution) {
            return UpdateOutcome::Rejected;
        }
        self.entries.push(x);
        UpdateOutcome::Appended
    }
}

/// Entries not dominated by any other entry, in input order.
///
/// Entries with equivalent energies are all kept; bit-identical solutions
/// are kept once.
pub fn nondominated_filter(entries: &[ArchiveEntry]) -> Vec<ArchiveEntry> {
    let mut out: Vec<ArchiveEntry> = Vec::new();
    for (i, e) in entries.iter().enumerate() {
        let dominated = entries
            .iter()
            .enumerate()
            .any(|(j, o)| j != i && dominates(&o.energies, &e.energies));
        if !dominated && !out.iter().any(|kept| kept.solution == e.solution) {
            out.push(e.clone());
        }
    }
    out
}

/// Indices of the points not dominated by any other point.
pub fn nondominated_indices<T: PartialOrd>(points: &[Vec<T>]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| {
            !points
                .iter()
                .enumerate()
                .any(|(j, p)| j != i && compare_values(p, &points[i]) == Dominance::Dominates)
        })
        .collect()
}
