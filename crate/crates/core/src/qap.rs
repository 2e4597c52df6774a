//! Bi-objective quadratic assignment instances and their QUBO encodings.
//!
//! Solutions use the two-way one-hot encoding: bit `i * n + u` is set iff
//! facility `i` sits at location `u`. Indices are 0-based throughout; the
//! text format and [`Permutation::to_one_based`] use 1-based locations.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseErrorKind, Result};
use crate::qubo::{build_couplings, BitVector, QuboMatrix};

/// Largest objective coefficient after normalisation.
pub const NORMALIZATION_TARGET: i64 = 1 << 23;

/// A QAP instance with one or more flow matrices sharing a distance matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QapInstance {
    n: usize,
    flows: Vec<Vec<Vec<i64>>>,
    distances: Vec<Vec<i64>>,
    name: String,
    correlation: Option<f64>,
}

impl QapInstance {
    pub fn new(
        name: impl Into<String>,
        distances: Vec<Vec<i64>>,
        flows: Vec<Vec<Vec<i64>>>,
        correlation: Option<f64>,
    ) -> Result<Self> {
        let n = distances.len();
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        if flows.is_empty() {
            return Err(Error::InvalidParameter("at least one flow matrix is required".into()));
        }
        for m in std::iter::once(&distances).chain(flows.iter()) {
            if m.len() != n {
                return Err(Error::DimensionMismatch { expected: n, actual: m.len() });
            }
            for (r, row) in m.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::RaggedMatrix { row: r, len: row.len(), expected: n });
                }
            }
        }
        if let Some(rho) = correlation {
            if !(-1.0..=1.0).contains(&rho) {
                return Err(Error::CorrelationOutOfRange(rho));
            }
        }
        Ok(Self {
            n,
            flows,
            distances,
            name: name.into(),
            correlation,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// QUBO dimension `n^2`.
    pub fn qubo_size(&self) -> usize {
        self.n * self.n
    }

    pub fn num_objectives(&self) -> usize {
        self.flows.len()
    }

    pub fn flow(&self, k: usize) -> &[Vec<i64>] {
        &self.flows[k]
    }

    pub fn distances(&self) -> &[Vec<i64>] {
        &self.distances
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn correlation(&self) -> Option<f64> {
        self.correlation
    }

    fn check_objective(&self, k: usize) -> Result<()> {
        if k >= self.flows.len() {
            return Err(Error::ObjectiveOutOfRange { index: k, count: self.flows.len() });
        }
        Ok(())
    }
}

/// Assignment of facilities to locations; `sigma[i]` is facility `i`'s location.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(sigma: Vec<usize>) -> Result<Self> {
        let n = sigma.len();
        let mut seen = vec![false; n];
        for &s in &sigma {
            if s >= n || seen[s] {
                return Err(Error::InvalidPermutation(format!("{sigma:?} is not a bijection on 0..{n}")));
            }
            seen[s] = true;
        }
        Ok(Self(sigma))
    }

    pub fn from_one_based(sigma: &[usize]) -> Result<Self> {
        if sigma.contains(&0) {
            return Err(Error::InvalidPermutation("1-based permutation contains 0".into()));
        }
        Self::new(sigma.iter().map(|&s| s - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|&s| s + 1).collect()
    }
}

/// `f_k(sigma) = sum_i sum_j h_kij * d[sigma_i][sigma_j]`.
pub fn qap_cost(inst: &QapInstance, sigma: &Permutation, k: usize) -> Result<i64> {
    inst.check_objective(k)?;
    if sigma.len() != inst.n {
        return Err(Error::DimensionMismatch { expected: inst.n, actual: sigma.len() });
    }
    let h = &inst.flows[k];
    let s = sigma.as_slice();
    let mut total = 0;
    for i in 0..inst.n {
        for j in 0..inst.n {
            total += h[i][j] * inst.distances[s[i]][s[j]];
        }
    }
    Ok(total)
}

pub fn encode_permutation(sigma: &Permutation) -> BitVector {
    let n = sigma.len();
    let mut x = BitVector::zeros(n * n);
    for (i, &u) in sigma.as_slice().iter().enumerate() {
        x.set(i * n + u, true);
    }
    x
}

/// Decodes a two-way one-hot vector; `Ok(None)` when some row or column of
/// the `n x n` reshape does not sum to exactly one.
pub fn decode_solution(x: &BitVector, n: usize) -> Result<Option<Permutation>> {
    if x.len() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, actual: x.len() });
    }
    let mut sigma = Vec::with_capacity(n);
    let mut col_counts = vec![0usize; n];
    for i in 0..n {
        let mut assigned = None;
        for u in 0..n {
            if x.get(i * n + u) {
                if assigned.is_some() {
                    return Ok(None);
                }
                assigned = Some(u);
                col_counts[u] += 1;
            }
        }
        match assigned {
            Some(u) => sigma.push(u),
            None => return Ok(None),
        }
    }
    if col_counts.iter().any(|&c| c != 1) {
        return Ok(None);
    }
    Ok(Some(Permutation(sigma)))
}

/// QUBO of `c_k(x) = sum h_kij d_uv x_iu x_jv` with constant 0.
pub fn build_cost_qubo(inst: &QapInstance, k: usize) -> Result<QuboMatrix> {
    inst.check_objective(k)?;
    let n = inst.n;
    let h = &inst.flows[k];
    let d = &inst.distances;
    let mut q = QuboMatrix::zeros(n * n)?;
    for i in 0..n {
        for j in 0..n {
            let hij = h[i][j];
            if hij == 0 {
                continue;
            }
            for u in 0..n {
                for v in 0..n {
                    let c = hij * d[u][v];
                    if c != 0 {
                        q.add(i * n + u, j * n + v, c);
                    }
                }
            }
        }
    }
    Ok(q)
}

/// QUBO of the row/column one-hot penalty; zero exactly on permutations.
///
/// Expanding `(1 - sum x)^2` gives `-1` on each diagonal entry per line the
/// variable belongs to, `+2` per same-line pair, and constant `2n`.
pub fn build_constraint_qubo(n: usize) -> Result<QuboMatrix> {
    let mut g = QuboMatrix::zeros(n * n)?;
    for i in 0..n {
        for u in 0..n {
            let a = i * n + u;
            g.add(a, a, -2);
            for v in u + 1..n {
                g.add(a, i * n + v, 2);
            }
            for j in i + 1..n {
                g.add(a, j * n + u, 2);
            }
        }
    }
    g.set_constant(2 * n as i64);
    Ok(g)
}

/// Upper bound `w` on the cost change of any single flip.
pub fn flip_change_bound(cost: &QuboMatrix) -> i64 {
    let p = build_couplings(cost);
    (0..p.size())
        .map(|i| {
            let row = p.row(i);
            let (neg, pos) = row
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold((0i64, 0i64), |(neg, pos), (_, &c)| (neg + c.min(0), pos + c.max(0)));
            (-row[i] - neg).max(row[i] + pos)
        })
        .max()
        .unwrap_or(0)
}

/// Penalty weight `alpha = ceil(w / 2)`.
///
/// Any infeasible vector one flip from feasibility has constraint energy at
/// least 2, so half the flip bound suffices.
pub fn penalty_weight(cost: &QuboMatrix) -> i64 {
    let w = flip_change_bound(cost);
    (w + 1).div_euclid(2)
}

/// Penalty weights for the aggregated cost and for each objective alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PenaltyWeights {
    pub alpha: i64,
    pub alpha1: i64,
    pub alpha2: i64,
}

impl PenaltyWeights {
    pub fn new(aggregate: &QuboMatrix, first: &QuboMatrix, second: &QuboMatrix) -> Self {
        Self {
            alpha: penalty_weight(aggregate),
            alpha1: penalty_weight(first),
            alpha2: penalty_weight(second),
        }
    }
}

/// Scales coefficients and constant by `target / max|coefficient|`, rounding
/// half away from zero.
pub fn normalize_qubo(q: &QuboMatrix, target: i64) -> Result<QuboMatrix> {
    let max = q.max_abs_coefficient();
    if max == 0 {
        return Err(Error::AllZeroMatrix);
    }
    let (num, den) = (target as i128, max as i128);
    Ok(q.map(|v| {
        let scaled = v as i128 * num;
        let rounded = if scaled >= 0 {
            (2 * scaled + den) / (2 * den)
        } else {
            -((-2 * scaled + den) / (2 * den))
        };
        rounded as i64
    }))
}

/// Parses the canonical instance format.
///
/// ```text
/// # name: example          (optional metadata comments)
/// # correlation: 0.75
/// 3                        n
/// 1                        K, number of flow matrices
/// 0 3 4                    n rows of the distance matrix
/// ...
/// 0 1 2                    K blocks of n flow rows
/// ...
/// ```
pub fn parse_instance(text: &str) -> Result<QapInstance> {
    let mut name = String::new();
    let mut correlation = None;
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let (content, comment) = match raw.find('#') {
            Some(pos) => (&raw[..pos], Some(&raw[pos + 1..])),
            None => (raw, None),
        };
        if let Some(comment) = comment {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("name:") {
                name = v.trim().to_string();
            } else if let Some(v) = comment.strip_prefix("correlation:") {
                correlation = v.trim().parse::<f64>().ok();
            }
        }
        let content = content.trim();
        if !content.is_empty() {
            lines.push((line_no, content));
        }
    }
    let last_line = text.lines().count().max(1);
    let mut it = lines.into_iter();

    let mut header = |what: &'static str| -> Result<usize> {
        let (line, content) = it
            .next()
            .ok_or(Error::Parse { line: last_line, kind: ParseErrorKind::Truncated(what) })?;
        let row = parse_row(line, content)?;
        if row.len() != 1 {
            return Err(Error::Parse {
                line,
                kind: ParseErrorKind::RowLength { expected: 1, found: row.len() },
            });
        }
        if row[0] < 1 {
            return Err(Error::Parse { line, kind: ParseErrorKind::BadHeader(row[0]) });
        }
        Ok(row[0] as usize)
    };
    let n = header("header line n")?;
    let k = header("header line K")?;

    let mut read_matrix = |what: &'static str| -> Result<Vec<Vec<i64>>> {
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            let (line, content) = it
                .next()
                .ok_or(Error::Parse { line: last_line, kind: ParseErrorKind::Truncated(what) })?;
            let row = parse_row(line, content)?;
            if row.len() != n {
                return Err(Error::Parse {
                    line,
                    kind: ParseErrorKind::RowLength { expected: n, found: row.len() },
                });
            }
            if let Some(&neg) = row.iter().find(|&&v| v < 0) {
                return Err(Error::Parse { line, kind: ParseErrorKind::NegativeEntry(neg) });
            }
            rows.push(row);
        }
        Ok(rows)
    };
    let distances = read_matrix("distance matrix")?;
    let flows = (0..k).map(|_| read_matrix("flow matrix")).collect::<Result<Vec<_>>>()?;
    if let Some((line, content)) = it.next() {
        return Err(Error::Parse { line, kind: ParseErrorKind::TrailingData(content.to_string()) });
    }
    QapInstance::new(name, distances, flows, correlation)
}

fn parse_row(line: usize, content: &str) -> Result<Vec<i64>> {
    content
        .split_whitespace()
        .map(|tok| {
            tok.parse::<i64>()
                .map_err(|_| Error::Parse { line, kind: ParseErrorKind::NotAnInteger(tok.to_string()) })
        })
        .collect()
}

/// Writes the canonical format read by [`parse_instance`].
pub fn write_instance(inst: &QapInstance) -> String {
    let mut out = String::new();
    if !inst.name.is_empty() {
        let _ = writeln!(out, "# name: {}", inst.name);
    }
    if let Some(rho) = inst.correlation {
        let _ = writeln!(out, "# correlation: {rho}");
    }
    let _ = writeln!(out, "{}", inst.n);
    let _ = writeln!(out, "{}", inst.flows.len());
    let write_matrix = |out: &mut String, m: &[Vec<i64>]| {
        out.push('\n');
        for row in m {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
    };
    write_matrix(&mut out, &inst.distances);
    for f in &inst.flows {
        write_matrix(&mut out, f);
    }
    out
}

/// Random instance whose flow matrices are correlated with coefficient `rho`.
///
/// Each off-diagonal flow pair draws a shared standard normal and one noise
/// term per objective; objective `k > 0` mixes them as
/// `rho * shared + sqrt(1 - rho^2) * noise_k`. Values are mapped affinely to
/// integers around 50 and clipped to `[0, 100]`. Distances are uniform in
/// `[1, 100]`. All matrices are symmetric with zero diagonal.
pub fn generate_instance(n: usize, objectives: usize, rho: f64, seed: u64) -> Result<QapInstance> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::CorrelationOutOfRange(rho));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("instance size must be at least 1".into()));
    }
    if objectives == 0 {
        return Err(Error::InvalidParameter("at least one objective is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new_inclusive(1i64, 100).expect("valid range");
    let mut distances = vec![vec![0i64; n]; n];
    let mut flows = vec![vec![vec![0i64; n]; n]; objectives];
    let mix = (1.0 - rho * rho).max(0.0).sqrt();
    for i in 0..n {
        for j in i + 1..n {
            let d = dist.sample(&mut rng);
            distances[i][j] = d;
            distances[j][i] = d;
            let shared: f64 = StandardNormal.sample(&mut rng);
            for (k, flow) in flows.iter_mut().enumerate() {
                let noise: f64 = StandardNormal.sample(&mut rng);
                let z = if k == 0 { shared } else { rho * shared + mix * noise };
                let h = (50.0 + 16.0 * z).round().clamp(0.0, 100.0) as i64;
                flow[i][j] = h;
                flow[j][i] = h;
            }
        }
    }
    QapInstance::new(
        format!("gen.n{n}.rho{rho}.s{seed}"),
        distances,
        flows,
        Some(rho),
    )
}
