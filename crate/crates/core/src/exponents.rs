//! Exponent sequences and their block partitions.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Relative slack on open ratio inequalities.
pub const RATIO_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ExponentSequence {
    values: Vec<f64>,
}

impl TryFrom<Vec<f64>> for ExponentSequence {
    type Error = Error;
    fn try_from(values: Vec<f64>) -> Result<Self> {
        ExponentSequence::new(values)
    }
}

impl From<ExponentSequence> for Vec<f64> {
    fn from(s: ExponentSequence) -> Self {
        s.values
    }
}

impl ExponentSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySequence);
        }
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(invalid("exponents must be finite and positive"));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("exponents must be strictly increasing"));
        }
        Ok(ExponentSequence { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> Result<f64> {
        self.values.get(i).copied().ok_or(Error::IndexOutOfRange { index: i, len: self.len() })
    }

    /// Σ 1/λ_k over the stored prefix.
    pub fn reciprocal_sum(&self) -> f64 {
        self.values.iter().map(|v| 1.0 / v).sum()
    }

    /// Index of an exponent, matched to within 1e-14 relative.
    pub fn index_of(&self, lambda: f64) -> Option<usize> {
        let i = self.values.partition_point(|v| *v < lambda * (1.0 - 1e-14));
        (i < self.len() && (self.values[i] - lambda).abs() <= 1e-14 * lambda).then_some(i)
    }

    /// Smallest consecutive ratio λ_{j+1}/λ_j, or +∞ for one element.
    pub fn min_ratio(&self) -> f64 {
        self.values.windows(2).map(|w| w[1] / w[0]).fold(f64::INFINITY, f64::min)
    }
}

pub fn make_geometric(lambda0: f64, ratio: f64, count: usize) -> Result<ExponentSequence> {
    if !(ratio > 1.0) {
        return Err(Error::InvalidLacunarity(ratio));
    }
    if count == 0 {
        return Err(Error::EmptySequence);
    }
    if !(lambda0 > 0.0) {
        return Err(invalid("lambda0 must be positive"));
    }
    ExponentSequence::new((0..count).map(|k| lambda0 * ratio.powi(k as i32)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "PartitionRecord", try_from = "PartitionRecord")]
pub struct BlockPartition {
    seq: ExponentSequence,
    /// Inclusive index ranges.
    blocks: Vec<(usize, usize)>,
    n: usize,
    q: f64,
    q_prime: Option<f64>,
    onset: usize,
}

#[derive(Serialize, Deserialize)]
struct PartitionRecord {
    values: Vec<f64>,
    blocks: Vec<[usize; 2]>,
    #[serde(rename = "N")]
    n: usize,
    q: f64,
    q_prime: Option<f64>,
    onset_index: usize,
}

impl From<BlockPartition> for PartitionRecord {
    fn from(p: BlockPartition) -> Self {
        PartitionRecord {
            blocks: p.blocks.iter().map(|&(a, b)| [a, b]).collect(),
            values: p.seq.values,
            n: p.n,
            q: p.q,
            q_prime: p.q_prime,
            onset_index: p.onset,
        }
    }
}

impl TryFrom<PartitionRecord> for BlockPartition {
    type Error = Error;
    fn try_from(r: PartitionRecord) -> Result<Self> {
        let sizes: Vec<usize> = r.blocks.iter().map(|b| b[1] + 1 - b[0]).collect();
        let mut p = validate_quasi_lacunary(&ExponentSequence::new(r.values)?, &sizes, r.q)?;
        if let Some(qp) = r.q_prime {
            p = p.with_q_prime(qp)?;
        }
        Ok(p)
    }
}

impl BlockPartition {
    pub fn seq(&self) -> &ExponentSequence {
        &self.seq
    }

    pub fn blocks(&self) -> &[(usize, usize)] {
        &self.blocks
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Largest block size.
    pub fn max_block(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn q_prime(&self) -> Option<f64> {
        self.q_prime
    }

    pub fn onset_index(&self) -> usize {
        self.onset
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|&(a, b)| b + 1 - a).collect()
    }

    pub fn block(&self, k: usize) -> Result<&[f64]> {
        let &(a, b) = self
            .blocks
            .get(k)
            .ok_or(Error::IndexOutOfRange { index: k, len: self.blocks.len() })?;
        Ok(&self.seq.values[a..=b])
    }

    /// Largest exponent of block k.
    pub fn endpoint(&self, k: usize) -> f64 {
        self.seq.values[self.blocks[k].1]
    }

    /// Largest exponent of block k−1, or 0 for the first block.
    pub fn lower_endpoint(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.endpoint(k - 1)
        }
    }

    pub fn endpoints(&self) -> Vec<f64> {
        (0..self.n_blocks()).map(|k| self.endpoint(k)).collect()
    }

    /// Endpoint ratios endpoint(k+1)/endpoint(k).
    pub fn ratios(&self) -> Vec<f64> {
        (1..self.n_blocks()).map(|k| self.endpoint(k) / self.endpoint(k - 1)).collect()
    }

    /// Block index containing sequence index `i`.
    pub fn block_of_index(&self, i: usize) -> Option<usize> {
        let k = self.blocks.partition_point(|&(_, b)| b < i);
        (k < self.blocks.len() && self.blocks[k].0 <= i).then_some(k)
    }

    pub fn with_q_prime(mut self, q_prime: f64) -> Result<Self> {
        if !(q_prime > 1.0) {
            return Err(invalid("q_prime must exceed 1"));
        }
        self.q_prime = Some(q_prime);
        Ok(self)
    }

    /// Keeps only the first `m` blocks.
    pub fn prefix(&self, m: usize) -> Result<BlockPartition> {
        if m == 0 || m > self.n_blocks() {
            return Err(Error::IndexOutOfRange { index: m, len: self.n_blocks() });
        }
        let last = self.blocks[m - 1].1;
        let seq = ExponentSequence::new(self.seq.values[..=last].to_vec())?;
        let mut p = validate_quasi_lacunary(&seq, &self.block_sizes()[..m], self.q)?;
        p.q_prime = self.q_prime;
        Ok(p)
    }

    /// Singleton blocks over the whole sequence.
    pub fn lacunary(seq: &ExponentSequence, q: f64) -> Result<BlockPartition> {
        validate_quasi_lacunary(seq, &vec![1; seq.len()], q)
    }
}

pub fn validate_quasi_lacunary(
    seq: &ExponentSequence,
    block_sizes: &[usize],
    q: f64,
) -> Result<BlockPartition> {
    if !(q > 1.0) {
        return Err(Error::InvalidLacunarity(q));
    }
    if block_sizes.is_empty() || block_sizes.contains(&0) {
        return Err(invalid("block sizes must be positive"));
    }
    if block_sizes.iter().sum::<usize>() != seq.len() {
        return Err(invalid(format!(
            "block sizes sum to {} but the sequence has {} terms",
            block_sizes.iter().sum::<usize>(),
            seq.len()
        )));
    }
    let mut blocks = Vec::with_capacity(block_sizes.len());
    let mut start = 0;
    for &s in block_sizes {
        blocks.push((start, start + s - 1));
        start += s;
    }
    let mut part = BlockPartition {
        seq: seq.clone(),
        blocks,
        n: *block_sizes.iter().max().unwrap(),
        q,
        q_prime: None,
        onset: 0,
    };
    let ratios = part.ratios();
    let passes = |r: f64| r > q * (1.0 - RATIO_TOL);
    // Onset: first k such that every ratio from k on passes.
    let onset = ratios.iter().rposition(|&r| !passes(r)).map_or(0, |i| i + 1);
    if !ratios.is_empty() && onset == ratios.len() {
        return Err(Error::NotQuasiLacunary(format!(
            "last endpoint ratio {:.6} does not exceed q = {q}",
            ratios[ratios.len() - 1]
        )));
    }
    part.onset = onset;
    Ok(part)
}

/// Whether every endpoint ratio from the onset on stays ≤ q′; otherwise the
/// first violating block index.
pub fn check_subgeometric(part: &BlockPartition, q_prime: f64) -> (bool, Option<usize>) {
    let bad = part
        .ratios()
        .iter()
        .enumerate()
        .skip(part.onset)
        .find(|(_, &r)| r > q_prime * (1.0 + RATIO_TOL))
        .map(|(k, _)| k);
    (bad.is_none(), bad)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Below,
    Above,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LacunarySum {
    pub value: f64,
    pub empty_tail: bool,
}

/// (Σ_{j≤i} λ_j^κ)/λ_i^κ for `Below`, (Σ_{j>i} λ_j^{−κ})/λ_i^{−κ} for `Above`.
pub fn lacunary_sum_ratio(
    seq: &ExponentSequence,
    kappa: f64,
    i: usize,
    direction: Direction,
) -> Result<LacunarySum> {
    if !(kappa > 0.0) {
        return Err(invalid("kappa must be positive"));
    }
    let li = seq.get(i)?.ln();
    let v = seq.values();
    let value = match direction {
        Direction::Below => v[..=i].iter().map(|l| (kappa * (l.ln() - li)).exp()).sum(),
        Direction::Above => v[i + 1..].iter().map(|l| (kappa * (li - l.ln())).exp()).sum(),
    };
    Ok(LacunarySum { value, empty_tail: direction == Direction::Above && i + 1 == v.len() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeltaParams {
    pub n: usize,
    pub kappa: f64,
    pub tau: f64,
    pub beta: f64,
    pub a: usize,
}

impl DeltaParams {
    /// Exponent (1−τ)(1−β)/(n−1) carried by each ε.
    pub fn eps_power(&self) -> f64 {
        (1.0 - self.tau) * (1.0 - self.beta) / (self.n as f64 - 1.0)
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(invalid("n must be at least 2"));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) || !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(invalid("tau and beta must lie in (0,1)"));
        }
        if !(self.kappa > 0.0) || self.a == 0 {
            return Err(invalid("kappa must be positive and A at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeltaCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// lhs/rhs, or 1 when both vanish.
    pub ratio: f64,
    /// Hölder constant bounding the ratio for this sequence and parameters.
    pub constant: f64,
    pub empty: bool,
}

/// Both sides of the windowed Hölder estimate for the tail (`Above`) or head
/// (`Below`) sums around index i, summed over the stored prefix only.
///
/// The right-hand side is a sum over multi-indices (k_1..k_{n−1}) of a product
/// of identical factors, so it is evaluated as the (n−1)-th power of one sum.
pub fn delta_lemma_check(
    lambda: &ExponentSequence,
    eps: &[f64],
    params: DeltaParams,
    i: usize,
    direction: Direction,
) -> Result<DeltaCheck> {
    params.validate()?;
    let len = lambda.len();
    if eps.len() < len {
        return Err(invalid("eps must be at least as long as lambda"));
    }
    if eps[..len].iter().any(|e| !(*e > 0.0)) {
        return Err(invalid("eps must be positive"));
    }
    if i >= len {
        return Err(Error::IndexOutOfRange { index: i, len });
    }
    let e = params.eps_power();
    let m = (params.n - 1) as i32;
    let a = params.a;
    let lam = lambda.values();
    let kap = params.kappa;
    let window = |lo: usize, hi: usize| -> f64 { eps[lo..hi.min(len)].iter().sum::<f64>().powf(e) };
    let (lhs_base, rhs_base) = match direction {
        Direction::Above => {
            let lhs: f64 = (i + 1..len).map(|j| lam[j].powf(-kap) * eps[j].powf(e)).sum();
            let mut rhs = 0.0;
            let mut k = 0;
            while i + k * a < len && i + 1 < len {
                let start = i + k * a;
                rhs += window(start, start + a) * lam[start].powf(-kap);
                k += 1;
            }
            (lhs, rhs)
        }
        Direction::Below => {
            let lhs: f64 = (1..=i).map(|j| lam[j].powf(kap) * eps[j].powf(e)).sum();
            let mut rhs = 0.0;
            for k in 0..=i / a {
                let top = i - k * a;
                let bottom = top.saturating_sub(a);
                if top > bottom {
                    rhs += window(bottom, top) * lam[top].powf(kap);
                }
            }
            (lhs, rhs)
        }
    };
    let (lhs, rhs) = (lhs_base.powi(m), rhs_base.powi(m));
    let empty = lhs == 0.0 && rhs == 0.0;
    let ratio = if empty { 1.0 } else { lhs / rhs };

    let eta = 1.0 / (1.0 - e);
    let decay = lambda.min_ratio().powf(-eta * kap);
    let constant = match direction {
        Direction::Above => (1.0 - decay).powf(-(m as f64) / eta),
        Direction::Below => {
            let holder = (decay / (1.0 - decay)).powf(1.0 / eta);
            let rho = eps[..len].windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
            (holder + rho.powf(e)).powi(m)
        }
    };
    Ok(DeltaCheck { lhs, rhs, ratio, constant, empty })
}
