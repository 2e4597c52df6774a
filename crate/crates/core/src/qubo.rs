//! QUBO matrices, energies and incremental single-flip deltas.
//!
//! A [`QuboMatrix`] stores the upper triangle of `Q` (entry `(i, j)` with
//! `i <= j`) plus a constant term, so that
//!
//! ```text
//! E(x) = sum_{i <= j} Q[i][j] * x_i * x_j + constant
//! ```
//!
//! Annealers never evaluate `E` directly inside their loops. They build a
//! [`CouplingMatrix`] once and keep a [`DeltaState`] that holds the energy
//! change of every single-bit flip, updated in `O(m)` per applied flip.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary solution vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitVector(Vec<bool>);

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self(vec![false; len])
    }

    /// Builds a vector from 0/1 integers; any nonzero value counts as 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        Self(bits.iter().map(|&b| b != 0).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.0[i] = value;
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    /// Copy of `self` with bit `i` toggled.
    pub fn flipped(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.flip(i);
        out
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.0.iter().map(|&b| u8::from(b)).collect()
    }
}

impl From<Vec<bool>> for BitVector {
    fn from(bits: Vec<bool>) -> Self {
        Self(bits)
    }
}

/// Upper-triangular QUBO coefficient matrix with a constant offset.
///
/// Storage is dense row-major `m * m`; only cells with `i <= j` are ever
/// nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuboMatrix {
    size: usize,
    coeffs: Vec<i64>,
    constant: i64,
}

impl QuboMatrix {
    pub fn zeros(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyMatrix);
        }
        Ok(Self {
            size,
            coeffs: vec![0; size * size],
            constant: 0,
        })
    }

    /// Canonicalises an arbitrary square matrix: `Q[i][j] + Q[j][i]` is folded
    /// into the upper triangle.
    pub fn from_dense(rows: &[Vec<i64>], constant: i64) -> Result<Self> {
        let mut q = Self::zeros(rows.len())?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != q.size {
                return Err(Error::RaggedMatrix {
                    row: i,
                    len: row.len(),
                    expected: q.size,
                });
            }
            for (j, &v) in row.iter().enumerate() {
                q.add(i, j, v);
            }
        }
        q.constant = constant;
        Ok(q)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn constant(&self) -> i64 {
        self.constant
    }

    pub fn set_constant(&mut self, constant: i64) {
        self.constant = constant;
    }

    /// Coefficient of `x_i * x_j`, order-insensitive.
    pub fn get(&self, i: usize, j: usize) -> i64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.coeffs[a * self.size + b]
    }

    /// Adds `value` to the coefficient of `x_i * x_j`, folding into the triangle.
    pub fn add(&mut self, i: usize, j: usize, value: i64) {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.coeffs[a * self.size + b] += value;
    }

    pub fn set(&mut self, i: usize, j: usize, value: i64) {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.coeffs[a * self.size + b] = value;
    }

    /// Iterates over all stored `(i, j, value)` with `i <= j`, zeros included.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        (0..self.size).flat_map(move |i| (i..self.size).map(move |j| (i, j, self.get(i, j))))
    }

    /// The upper triangle as a dense square matrix (lower part zero).
    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        (0..self.size)
            .map(|i| {
                (0..self.size)
                    .map(|j| if i <= j { self.get(i, j) } else { 0 })
                    .collect()
            })
            .collect()
    }

    pub fn max_abs_coefficient(&self) -> i64 {
        self.coeffs.iter().map(|v| v.abs()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0 && self.coeffs.iter().all(|&v| v == 0)
    }

    /// Full evaluation of `x^T Q x + constant`.
    pub fn energy(&self, x: &BitVector) -> Result<i64> {
        self.check_len(x)?;
        let bits = x.as_slice();
        let mut total = self.constant;
        for i in (0..self.size).filter(|&i| bits[i]) {
            let row = &self.coeffs[i * self.size..(i + 1) * self.size];
            total += row[i];
            total += (i + 1..self.size)
                .filter(|&j| bits[j])
                .map(|j| row[j])
                .sum::<i64>();
        }
        Ok(total)
    }

    /// `self + factor * other`, coefficients and constants alike.
    pub fn add_scaled(&self, other: &QuboMatrix, factor: i64) -> Result<QuboMatrix> {
        if other.size != self.size {
            return Err(Error::DimensionMismatch {
                expected: self.size,
                actual: other.size,
            });
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| a + factor * b)
            .collect();
        Ok(QuboMatrix {
            size: self.size,
            coeffs,
            constant: self.constant + factor * other.constant,
        })
    }

    /// Applies `f` to every coefficient and to the constant.
    pub fn map(&self, f: impl Fn(i64) -> i64) -> QuboMatrix {
        QuboMatrix {
            size: self.size,
            coeffs: self.coeffs.iter().map(|&v| f(v)).collect(),
            constant: f(self.constant),
        }
    }

    /// Elementwise combination of two equally sized matrices.
    pub fn zip_with(&self, other: &QuboMatrix, f: impl Fn(i64, i64) -> i64) -> Result<QuboMatrix> {
        if other.size != self.size {
            return Err(Error::DimensionMismatch {
                expected: self.size,
                actual: other.size,
            });
        }
        Ok(QuboMatrix {
            size: self.size,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            constant: f(self.constant, other.constant),
        })
    }

    fn check_len(&self, x: &BitVector) -> Result<()> {
        if x.len() != self.size {
            return Err(Error::DimensionMismatch {
                expected: self.size,
                actual: x.len(),
            });
        }
        Ok(())
    }
}

/// Symmetric coupling view `P` of a QUBO.
///
/// Off-diagonal `P[i][j] = P[j][i]` is the single triangular coupling between
/// `i` and `j`; the diagonal holds the linear terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingMatrix {
    size: usize,
    rows: Vec<i64>,
    constant: i64,
}

impl CouplingMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn constant(&self) -> i64 {
        self.constant
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.rows[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.rows[i * self.size..(i + 1) * self.size]
    }

    /// Energy from the coupling view; agrees with [`QuboMatrix::energy`].
    pub fn energy(&self, x: &BitVector) -> Result<i64> {
        check_len(self.size, x)?;
        let bits = x.as_slice();
        let mut total = self.constant;
        for i in (0..self.size).filter(|&i| bits[i]) {
            let row = self.row(i);
            total += row[i];
            total += (i + 1..self.size).filter(|&j| bits[j]).map(|j| row[j]).sum::<i64>();
        }
        Ok(total)
    }
}

/// Builds `P` from `Q`: the triangle mirrored, linear terms on the diagonal.
pub fn build_couplings(q: &QuboMatrix) -> CouplingMatrix {
    let m = q.size();
    let mut rows = vec![0; m * m];
    for (i, j, v) in q.upper_entries() {
        rows[i * m + j] = v;
        rows[j * m + i] = v;
    }
    CouplingMatrix {
        size: m,
        rows,
        constant: q.constant(),
    }
}

/// Energy change of every single-bit flip of `x`.
///
/// `deltas[i] = (1 - 2 x_i) * (P[i][i] + sum_{j != i} P[i][j] x_j)`
pub fn flip_deltas(p: &CouplingMatrix, x: &BitVector) -> Result<Vec<i64>> {
    check_len(p.size, x)?;
    let bits = x.as_slice();
    Ok((0..p.size)
        .map(|i| {
            let row = p.row(i);
            let field: i64 = row[i]
                + row
                    .iter()
                    .zip(bits)
                    .enumerate()
                    .filter(|&(j, (_, &b))| b && j != i)
                    .map(|(_, (&v, _))| v)
                    .sum::<i64>();
            if bits[i] {
                -field
            } else {
                field
            }
        })
        .collect())
}

fn check_len(size: usize, x: &BitVector) -> Result<()> {
    if x.len() != size {
        return Err(Error::DimensionMismatch {
            expected: size,
            actual: x.len(),
        });
    }
    Ok(())
}

/// Current solution plus per-objective energies and flip deltas.
///
/// Invariant: for every objective `k` and index `i`,
/// `energies[k] + deltas[k][i]` is the energy of `x` with bit `i` flipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaState {
    x: BitVector,
    energies: Vec<i64>,
    deltas: Vec<Vec<i64>>,
}

impl DeltaState {
    /// Evaluates `x` from scratch under every coupling matrix.
    pub fn new(x: BitVector, couplings: &[&CouplingMatrix]) -> Result<Self> {
        let mut energies = Vec::with_capacity(couplings.len());
        let mut deltas = Vec::with_capacity(couplings.len());
        for p in couplings {
            energies.push(p.energy(&x)?);
            deltas.push(flip_deltas(p, &x)?);
        }
        Ok(Self { x, energies, deltas })
    }

    /// Replaces the current solution and recomputes everything from scratch.
    pub fn reset(&mut self, x: BitVector, couplings: &[&CouplingMatrix]) -> Result<()> {
        *self = Self::new(x, couplings)?;
        Ok(())
    }

    pub fn x(&self) -> &BitVector {
        &self.x
    }

    pub fn energies(&self) -> &[i64] {
        &self.energies
    }

    pub fn energy(&self, objective: usize) -> i64 {
        self.energies[objective]
    }

    pub fn deltas(&self, objective: usize) -> &[i64] {
        &self.deltas[objective]
    }

    pub fn num_objectives(&self) -> usize {
        self.energies.len()
    }

    /// Toggles bit `i` and updates energies and deltas in `O(m)` per objective.
    ///
    /// `couplings` must be the same matrices, in the same order, the state
    /// was built from.
    pub fn apply_flip(&mut self, i: usize, couplings: &[&CouplingMatrix]) {
        debug_assert_eq!(couplings.len(), self.energies.len());
        // +1 when bit i turns on, -1 when it turns off
        let step: i64 = if self.x.get(i) { -1 } else { 1 };
        let bits = self.x.as_slice();
        for (k, p) in couplings.iter().enumerate() {
            self.energies[k] += self.deltas[k][i];
            let row = p.row(i);
            let deltas = &mut self.deltas[k];
            for (j, d) in deltas.iter_mut().enumerate() {
                if j == i {
                    *d = -*d;
                } else if bits[j] {
                    *d -= row[j] * step;
                } else {
                    *d += row[j] * step;
                }
            }
        }
        self.x.flip(i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, m: usize) -> QuboMatrix {
        let rows: Vec<Vec<i64>> = (0..m)
            .map(|_| (0..m).map(|_| rng.random_range(-20..=20)).collect())
            .collect();
        QuboMatrix::from_dense(&rows, rng.random_range(-50..=50)).unwrap()
    }

    fn random_bits(rng: &mut ChaCha8Rng, m: usize) -> BitVector {
        BitVector::from((0..m).map(|_| rng.random_bool(0.5)).collect::<Vec<_>>())
    }

    #[test]
    fn all_zero_vector_gives_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = random_matrix(&mut rng, 7);
        assert_eq!(q.energy(&BitVector::zeros(7)).unwrap(), q.constant());
    }

    #[test]
    fn energy_rejects_wrong_length() {
        let q = QuboMatrix::zeros(4).unwrap();
        assert_eq!(
            q.energy(&BitVector::zeros(3)),
            Err(Error::DimensionMismatch { expected: 4, actual: 3 })
        );
    }

    #[test]
    fn zero_size_is_rejected() {
        assert_eq!(QuboMatrix::zeros(0), Err(Error::EmptyMatrix));
    }

    #[test]
    fn couplings_of_small_matrix() {
        let q = QuboMatrix::from_dense(&[vec![1, 2], vec![0, 3]], 0).unwrap();
        let p = build_couplings(&q);
        assert_eq!(p.row(0), &[1, 2]);
        assert_eq!(p.row(1), &[2, 3]);
    }

    #[test]
    fn couplings_of_diagonal_matrix() {
        let q = QuboMatrix::from_dense(&[vec![4, 0, 0], vec![0, -1, 0], vec![0, 0, 9]], 2).unwrap();
        let p = build_couplings(&q);
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { q.get(i, i) } else { 0 };
                assert_eq!(p.get(i, j), expected);
            }
        }
    }

    #[test]
    fn deltas_at_zero_vector_are_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q = random_matrix(&mut rng, 9);
        let p = build_couplings(&q);
        let d = flip_deltas(&p, &BitVector::zeros(9)).unwrap();
        for (i, &di) in d.iter().enumerate() {
            assert_eq!(di, q.get(i, i));
        }
    }

    #[test]
    fn deltas_match_full_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let q = random_matrix(&mut rng, 8);
            let p = build_couplings(&q);
            let x = random_bits(&mut rng, 8);
            let base = q.energy(&x).unwrap();
            let d = flip_deltas(&p, &x).unwrap();
            for (i, &di) in d.iter().enumerate() {
                assert_eq!(q.energy(&x.flipped(i)).unwrap() - base, di);
            }
        }
    }

    #[test]
    fn double_flip_restores_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let q = random_matrix(&mut rng, 12);
        let p = build_couplings(&q);
        let state = DeltaState::new(random_bits(&mut rng, 12), &[&p]).unwrap();
        for i in 0..12 {
            let mut s = state.clone();
            s.apply_flip(i, &[&p]);
            s.apply_flip(i, &[&p]);
            assert_eq!(s, state);
        }
    }

    #[test]
    fn incremental_state_matches_recompute() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let q1 = random_matrix(&mut rng, 10);
        let q2 = random_matrix(&mut rng, 10);
        let (p1, p2) = (build_couplings(&q1), build_couplings(&q2));
        let mut state = DeltaState::new(random_bits(&mut rng, 10), &[&p1, &p2]).unwrap();
        for _ in 0..200 {
            let i = rng.random_range(0..10);
            state.apply_flip(i, &[&p1, &p2]);
            let fresh = DeltaState::new(state.x().clone(), &[&p1, &p2]).unwrap();
            assert_eq!(state, fresh);
            assert_eq!(state.energy(0), q1.energy(state.x()).unwrap());
            assert_eq!(state.energy(1), q2.energy(state.x()).unwrap());
        }
    }

    #[test]
    fn add_scaled_rejects_size_mismatch() {
        let a = QuboMatrix::zeros(2).unwrap();
        let b = QuboMatrix::zeros(3).unwrap();
        assert!(a.add_scaled(&b, 1).is_err());
    }
}
