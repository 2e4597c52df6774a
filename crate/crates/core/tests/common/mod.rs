//! Independent oracles shared by the integration tests. Nothing here calls
//! the solver code paths being checked; energies come straight from the
//! stored coefficients and optima from exhaustive enumeration.

#![allow(dead_code)]

use moqubo_core::anneal::AnnealParams;
use moqubo_core::qap::QapInstance;
use moqubo_core::qubo::{BitVector, QuboMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The 3-facility example: flows H, distances D.
pub fn worked_instance() -> QapInstance {
    QapInstance::new(
        "worked",
        vec![vec![0, 3, 4], vec![3, 0, 6], vec![4, 6, 0]],
        vec![vec![vec![0, 1, 2], vec![1, 0, 1], vec![2, 1, 0]]],
        None,
    )
    .unwrap()
}

pub fn printed_cost_matrix() -> Vec<Vec<i64>> {
    vec![
        vec![0, 0, 0, 0, 6, 8, 0, 12, 16],
        vec![0, 0, 0, 6, 0, 12, 12, 0, 24],
        vec![0, 0, 0, 8, 12, 0, 16, 24, 0],
        vec![0, 0, 0, 0, 0, 0, 0, 6, 8],
        vec![0, 0, 0, 0, 0, 0, 6, 0, 12],
        vec![0, 0, 0, 0, 0, 0, 8, 12, 0],
        vec![0; 9],
        vec![0; 9],
        vec![0; 9],
    ]
}

pub fn printed_constraint_matrix() -> Vec<Vec<i64>> {
    vec![
        vec![-2, 2, 2, 2, 0, 0, 2, 0, 0],
        vec![0, -2, 2, 0, 2, 0, 0, 2, 0],
        vec![0, 0, -2, 0, 0, 2, 0, 0, 2],
        vec![0, 0, 0, -2, 2, 2, 2, 0, 0],
        vec![0, 0, 0, 0, -2, 2, 0, 2, 0],
        vec![0, 0, 0, 0, 0, -2, 0, 0, 2],
        vec![0, 0, 0, 0, 0, 0, -2, 2, 2],
        vec![0, 0, 0, 0, 0, 0, 0, -2, 2],
        vec![0, 0, 0, 0, 0, 0, 0, 0, -2],
    ]
}

/// `sum_{i<=j} q_ij x_i x_j + constant` over a list of stored entries.
pub struct EntryOracle {
    entries: Vec<(usize, usize, i64)>,
    constant: i64,
}

impl EntryOracle {
    pub fn new(q: &QuboMatrix) -> Self {
        Self { entries: q.upper_entries().filter(|e| e.2 != 0).collect(), constant: q.constant() }
    }

    pub fn energy_bits(&self, x: &[bool]) -> i64 {
        self.constant + self.entries.iter().filter(|(i, j, _)| x[*i] && x[*j]).map(|e| e.2).sum::<i64>()
    }

    pub fn energy(&self, x: &BitVector) -> i64 {
        self.energy_bits(x.as_slice())
    }
}

/// Energy of a square matrix read literally as `x^T A x + c`.
pub fn dense_energy(a: &[Vec<i64>], c: i64, x: &[bool]) -> i64 {
    let mut e = c;
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if x[i] && x[j] {
                e += v;
            }
        }
    }
    e
}

pub fn bits_of(code: u64, m: usize) -> Vec<bool> {
    (0..m).map(|i| code >> i & 1 == 1).collect()
}

/// Minimum energy over all `2^m` vectors and every vector attaining it.
pub fn exhaustive_minimum(q: &QuboMatrix) -> (i64, Vec<Vec<bool>>) {
    let m = q.size();
    assert!(m <= 20, "exhaustive search over 2^{m} is too large");
    let oracle = EntryOracle::new(q);
    let mut best = i64::MAX;
    let mut argmin = Vec::new();
    for code in 0..1u64 << m {
        let x = bits_of(code, m);
        let e = oracle.energy_bits(&x);
        if e < best {
            best = e;
            argmin.clear();
        }
        if e == best {
            argmin.push(x);
        }
    }
    (best, argmin)
}

/// All permutations of `0..n`, by recursion.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                go(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// `sum_{i,j} h_ij d_{sigma_i sigma_j}`, straight from the definition.
pub fn direct_cost(inst: &QapInstance, k: usize, sigma: &[usize]) -> i64 {
    let h = inst.flow(k);
    let d = inst.distances();
    let n = sigma.len();
    let mut total = 0;
    for i in 0..n {
        for j in 0..n {
            total += h[i][j] * d[sigma[i]][sigma[j]];
        }
    }
    total
}

/// Row `i` holds a single one in column `sigma_i`.
pub fn one_hot(sigma: &[usize]) -> Vec<bool> {
    let n = sigma.len();
    let mut x = vec![false; n * n];
    for (i, &u) in sigma.iter().enumerate() {
        x[i * n + u] = true;
    }
    x
}

pub fn is_permutation_matrix(x: &[bool], n: usize) -> bool {
    (0..n).all(|i| (0..n).filter(|&u| x[i * n + u]).count() == 1)
        && (0..n).all(|u| (0..n).filter(|&i| x[i * n + u]).count() == 1)
}

/// `u` is no worse everywhere and better somewhere.
pub fn dominates(u: &[i64], v: &[i64]) -> bool {
    u.iter().zip(v).all(|(a, b)| a <= b) && u.iter().zip(v).any(|(a, b)| a < b)
}

/// Distinct non-dominated cost vectors of every permutation, sorted.
pub fn true_front(inst: &QapInstance) -> Vec<Vec<i64>> {
    let costs: Vec<Vec<i64>> = permutations(inst.n())
        .iter()
        .map(|s| (0..inst.num_objectives()).map(|k| direct_cost(inst, k, s)).collect())
        .collect();
    let mut front: Vec<Vec<i64>> = costs
        .iter()
        .filter(|c| !costs.iter().any(|o| dominates(o, c)))
        .cloned()
        .collect();
    front.sort();
    front.dedup();
    front
}

pub fn random_qubo(rng: &mut impl Rng, m: usize, span: i64) -> QuboMatrix {
    let mut q = QuboMatrix::zeros(m).unwrap();
    for i in 0..m {
        for j in i..m {
            q.set(i, j, rng.random_range(-span..=span));
        }
    }
    q.set_constant(rng.random_range(-span..=span));
    q
}

pub fn random_bits(rng: &mut impl Rng, m: usize) -> BitVector {
    BitVector::from((0..m).map(|_| rng.random_bool(0.5)).collect::<Vec<_>>())
}

/// A schedule scaled to the coefficient magnitudes of small test matrices,
/// cooling to `delta0 / 1000` after 70% of the iterations.
pub fn scaled_params(i_max: u64, delta0: f64, seed: u64) -> AnnealParams {
    let delta_f = delta0 * 1e-3;
    let xi = 1.0 - (delta_f / delta0).powf(1.0 / (0.7 * i_max as f64));
    AnnealParams { i_max, delta0, delta_f, xi, beta: delta0 / 50.0, seed }
}
