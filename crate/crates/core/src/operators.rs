//! Operators on Müntz polynomials, given by their images of monomials.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exponents::{BlockPartition, ExponentSequence};
use crate::measures::monomial_lp_norm;
use crate::muntz_poly::MuntzPolynomial;
use crate::trend::summable_trend;

pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-12;

/// Row-wise record of how a truncated kernel was cut off.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationCertificate {
    pub tol: f64,
    /// Norm L^s((1−t)^{γ−1}dt) in which the dropped tails are measured.
    pub norm_exponent: f64,
    pub gamma: f64,
    /// Last retained target index per row.
    pub horizon: Vec<usize>,
    /// Triangle-inequality bound on each dropped tail, relative to the retained row norm.
    pub relative_tail: Vec<f64>,
}

impl TruncationCertificate {
    pub fn max_relative_tail(&self) -> f64 {
        self.relative_tail.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelOperator {
    pub name: String,
    seq: ExponentSequence,
    /// rows[k] lists (n, c_n(k)); source indices beyond the rows map to 0.
    rows: Vec<Vec<(usize, f64)>>,
    pub truncation_tol: f64,
    pub positive: bool,
    /// γ of the measure (1−t)^{γ−1}dt the construction is designed for.
    pub paired_gamma: Option<f64>,
    pub certificate: Option<TruncationCertificate>,
}

impl KernelOperator {
    pub fn new(name: &str, seq: ExponentSequence, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        if rows.iter().flatten().any(|&(n, c)| n >= seq.len() || !c.is_finite()) {
            return Err(invalid("kernel entries must be finite and index the sequence"));
        }
        let positive = rows.iter().flatten().all(|&(_, c)| c >= 0.0);
        Ok(KernelOperator {
            name: name.to_string(),
            seq,
            rows,
            truncation_tol: DEFAULT_TRUNCATION_TOL,
            positive,
            paired_gamma: None,
            certificate: None,
        })
    }

    pub fn seq(&self) -> &ExponentSequence {
        &self.seq
    }

    pub fn row(&self, k: usize) -> &[(usize, f64)] {
        self.rows.get(k).map_or(&[], |r| r.as_slice())
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Kernel rows as {k: [[n, c], ...]}.
    pub fn rows_json(&self) -> serde_json::Value {
        let map: BTreeMap<String, Vec<(usize, f64)>> =
            self.rows.iter().enumerate().map(|(k, r)| (k.to_string(), r.clone())).collect();
        serde_json::to_value(map).expect("plain data")
    }

    fn with_pairing(mut self, gamma: f64) -> Self {
        self.paired_gamma = Some(gamma);
        self
    }

    pub fn apply(&self, f: &MuntzPolynomial) -> Result<MuntzPolynomial> {
        let mut acc = vec![0.0; self.seq.len()];
        for &(l, a) in f.terms() {
            let k = self.seq.index_of(l).ok_or(Error::UnknownExponent(l))?;
            for &(n, c) in self.row(k) {
                acc[n] += a * c;
            }
        }
        let v = self.seq.values();
        MuntzPolynomial::new(acc.iter().enumerate().filter(|(_, c)| **c != 0.0).map(|(n, &c)| (v[n], c)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilationOperator {
    pub name: String,
    pub weights: Vec<f64>,
    pub scales: Vec<f64>,
    /// Σ|c_n|^p/μ_n^γ for the (p, γ) it was built with.
    pub constant: f64,
    /// Σ|c_n| over the dropped tail, when known analytically.
    pub dropped_weight: f64,
    pub paired_gamma: Option<f64>,
}

impl DilationOperator {
    /// Σ_n c_n·f(t^{μ_n}).
    pub fn apply(&self, f: &MuntzPolynomial) -> Result<MuntzPolynomial> {
        let mut terms = Vec::with_capacity(f.len() * self.scales.len());
        for (&c, &m) in self.weights.iter().zip(&self.scales) {
            terms.extend(f.terms().iter().map(|&(l, a)| (l * m, a * c)));
        }
        MuntzPolynomial::new(terms)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Operator {
    Kernel(KernelOperator),
    Dilation(DilationOperator),
}

impl Operator {
    pub fn apply(&self, f: &MuntzPolynomial) -> Result<MuntzPolynomial> {
        match self {
            Operator::Kernel(k) => k.apply(f),
            Operator::Dilation(d) => d.apply(f),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Operator::Kernel(k) => &k.name,
            Operator::Dilation(d) => &d.name,
        }
    }

    pub fn paired_gamma(&self) -> Option<f64> {
        match self {
            Operator::Kernel(k) => k.paired_gamma,
            Operator::Dilation(d) => d.paired_gamma,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Operator::Kernel(k) => k.positive,
            Operator::Dilation(d) => d.weights.iter().all(|c| *c >= 0.0),
        }
    }
}

impl From<KernelOperator> for Operator {
    fn from(k: KernelOperator) -> Self {
        Operator::Kernel(k)
    }
}

impl From<DilationOperator> for Operator {
    fn from(d: DilationOperator) -> Self {
        Operator::Dilation(d)
    }
}

pub fn apply(t: &Operator, f: &MuntzPolynomial) -> Result<MuntzPolynomial> {
    t.apply(f)
}

pub fn identity(seq: &ExponentSequence) -> KernelOperator {
    let rows = (0..seq.len()).map(|k| vec![(k, 1.0)]).collect();
    KernelOperator::new("identity", seq.clone(), rows).expect("valid rows")
}

pub fn zero(seq: &ExponentSequence) -> KernelOperator {
    KernelOperator::new("zero", seq.clone(), vec![Vec::new(); seq.len()]).expect("valid rows")
}

pub fn diagonal(seq: &ExponentSequence, entries: &[f64]) -> Result<KernelOperator> {
    if entries.len() > seq.len() {
        return Err(invalid("more diagonal entries than exponents"));
    }
    let rows = entries.iter().enumerate().map(|(k, &d)| if d == 0.0 { vec![] } else { vec![(k, d)] }).collect();
    KernelOperator::new("diagonal", seq.clone(), rows)
}

/// Diagonal operator whose per-monomial ratio
/// ‖T t^{λ_k}‖_{L^r((1−t)^{γ−1})}/‖t^{λ_k}‖_{L^{r/β}((1−t)^{α−1})} equals ε_k^{(1−β)/r}.
pub fn diagonal_with_profile(
    seq: &ExponentSequence,
    eps: &[f64],
    r: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
) -> Result<KernelOperator> {
    if eps.iter().any(|e| !(*e > 0.0)) || !(beta > 0.0 && beta < 1.0) {
        return Err(invalid("profile needs positive eps and 0 < beta < 1"));
    }
    let v = seq.values();
    let entries: Vec<f64> = eps
        .iter()
        .enumerate()
        .map(|(k, e)| {
            e.powf((1.0 - beta) / r) * monomial_lp_norm(v[k], 1.0, r / beta, alpha) / monomial_lp_norm(v[k], 1.0, r, gamma)
        })
        .collect();
    let mut op = diagonal(seq, &entries)?.with_pairing(gamma);
    op.name = "diagonal-profile".into();
    Ok(op)
}

fn require_lacunary(part: &BlockPartition) -> Result<()> {
    if part.max_block() != 1 {
        return Err(invalid("construction needs a lacunary (singleton-block) partition"));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleParams {
    pub r: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub eps: f64,
    /// Extra decay exponent of the supercritical kernel.
    #[serde(default)]
    pub eta: f64,
}

/// c_n(k) = λ_k^{−βα/r}·λ_n^{γ/r}·1_{1≤n≤k}/n^{(1+ε)/r}.
pub fn make_counterexample_subcritical(part: &BlockPartition, prm: CounterexampleParams) -> Result<KernelOperator> {
    require_lacunary(part)?;
    let CounterexampleParams { r, alpha, beta, gamma, eps, .. } = prm;
    if !(beta >= 1.0 && r > beta && alpha > 0.0 && gamma > 0.0 && eps > 0.0 && eps < 1.0) {
        return Err(invalid("need beta >= 1, r > beta, alpha, gamma > 0 and eps in (0,1)"));
    }
    let v = part.seq().values();
    let rows = (0..v.len())
        .map(|k| {
            (1..=k)
                .map(|n| {
                    let ln_c = (-beta * alpha * v[k].ln() + gamma * v[n].ln()) / r - (1.0 + eps) / r * (n as f64).ln();
                    (n, ln_c.exp())
                })
                .collect()
        })
        .collect();
    Ok(KernelOperator::new("subcritical-counterexample", part.seq().clone(), rows)?.with_pairing(gamma))
}

/// c_n(k) = 1_{1≤n≤k}·n^{−(1+ε)/r}·k^{−(1−β)(1+η)/r}·λ_k^{−αβ/r}·λ_n^{γ/r}.
pub fn make_counterexample_supercritical(part: &BlockPartition, prm: CounterexampleParams) -> Result<KernelOperator> {
    require_lacunary(part)?;
    let CounterexampleParams { r, alpha, beta, gamma, eps, eta } = prm;
    if !(r > 1.0 && beta > 0.0 && beta < 1.0 && alpha > 0.0 && gamma > 0.0 && eps > 0.0 && eta > 0.0) {
        return Err(invalid("need r > 1, 0 < beta < 1 and positive alpha, gamma, eps, eta"));
    }
    let v = part.seq().values();
    let rows = (0..v.len())
        .map(|k| {
            let kk = (k as f64).ln();
            (1..=k)
                .map(|n| {
                    let ln_c = (-alpha * beta * v[k].ln() + gamma * v[n].ln()) / r
                        - (1.0 + eps) / r * (n as f64).ln()
                        - (1.0 - beta) * (1.0 + eta) / r * kk;
                    (n, ln_c.exp())
                })
                .collect()
        })
        .collect();
    Ok(KernelOperator::new("supercritical-counterexample", part.seq().clone(), rows)?.with_pairing(gamma))
}

/// ε_k = 1/((k+2)·ln²(k+2)), the 1/(k ln²k) profile shifted to start at k = 0.
pub fn default_eps(count: usize) -> Vec<f64> {
    (0..count).map(|k| {
        let m = (k + 2) as f64;
        1.0 / (m * m.ln().powi(2))
    }).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupercriticalExample {
    pub p: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Number of source rows; the sequence must extend further to hold the tails.
    pub rows: usize,
    /// Exponent s of the L^s((1−t)^{γ−1}dt) norm the truncation is certified in.
    pub norm_exponent: f64,
    pub truncation_tol: f64,
    /// Partial sums of ε above this, without a summable trend, are rejected.
    pub eps_cap: f64,
}

impl SupercriticalExample {
    pub fn new(p: f64, beta: f64, gamma: f64, rows: usize) -> Self {
        SupercriticalExample {
            p,
            beta,
            gamma,
            rows,
            norm_exponent: p,
            truncation_tol: DEFAULT_TRUNCATION_TOL,
            eps_cap: 4.0,
        }
    }
}

/// T(t^{λ_k}) = Σ_{n≥k} (ε_k ε_n)^{(1−β)/(2p)} t^{λ_n}, each row cut where the
/// remaining terms weigh less than the tolerance in the certified norm.
pub fn make_example_supercritical(
    part: &BlockPartition,
    cfg: &SupercriticalExample,
    eps: &[f64],
) -> Result<KernelOperator> {
    require_lacunary(part)?;
    let SupercriticalExample { p, beta, gamma, rows, norm_exponent: s, truncation_tol: tol, eps_cap } = *cfg;
    if !(p > 0.0 && beta > 0.0 && beta < 1.0 && gamma > 0.0 && s > 0.0 && tol > 0.0) {
        return Err(invalid("need p, gamma, s, tol > 0 and 0 < beta < 1"));
    }
    let v = part.seq().values();
    let len = v.len();
    if eps.len() < len || eps[..len].iter().any(|e| !(*e > 0.0)) {
        return Err(invalid("eps must be positive and cover the sequence"));
    }
    let total: f64 = eps[..len].iter().sum();
    if total > eps_cap && !summable_trend(&eps[..len]) {
        return Err(invalid(format!("eps looks non-summable: partial sum {total:.4} exceeds cap {eps_cap}")));
    }
    if rows == 0 || rows > len {
        return Err(invalid("row count must be between 1 and the sequence length"));
    }
    let e = (1.0 - beta) / (2.0 * p);
    let mut kernel = Vec::with_capacity(rows);
    let mut horizon = Vec::with_capacity(rows);
    let mut relative_tail = Vec::with_capacity(rows);
    for k in 0..rows {
        let coeff = |n: usize| (eps[k] * eps[n]).powf(e);
        let weight: Vec<f64> = (k..len).map(|n| coeff(n) * monomial_lp_norm(v[n], 1.0, s, gamma)).collect();
        // Suffix sums bound each possible dropped tail by the triangle inequality.
        let mut suffix = vec![0.0; weight.len() + 1];
        for j in (0..weight.len()).rev() {
            suffix[j] = suffix[j + 1] + weight[j];
        }
        // Beyond the stored prefix, continue the last ratio geometrically.
        let beyond = match weight.len() {
            n if n >= 2 && weight[n - 1] < weight[n - 2] => {
                let rho = weight[n - 1] / weight[n - 2];
                weight[n - 1] * rho / (1.0 - rho)
            }
            _ => f64::INFINITY,
        };
        let retained_floor = weight[0];
        let cut = (0..weight.len()).find(|&j| suffix[j + 1] + beyond <= tol * retained_floor);
        let Some(j) = cut else {
            return Err(Error::Truncation { bound: (suffix[1] + beyond) / retained_floor });
        };
        horizon.push(k + j);
        relative_tail.push((suffix[j + 1] + beyond) / retained_floor);
        kernel.push((k..=k + j).map(|n| (n, coeff(n))).collect());
    }
    let mut op = KernelOperator::new("supercritical-example", part.seq().clone(), kernel)?.with_pairing(gamma);
    op.truncation_tol = tol;
    op.certificate = Some(TruncationCertificate { tol, norm_exponent: s, gamma, horizon, relative_tail });
    Ok(op)
}

/// Σ_n c_n f(t^{μ_n}) together with C = Σ|c_n|^p/μ_n^γ.
pub fn make_dilation_example(c: &[f64], mu_scales: &[f64], gamma: f64, p: f64) -> Result<DilationOperator> {
    if c.len() != mu_scales.len() || mu_scales.iter().any(|m| !(*m > 0.0)) || c.iter().any(|x| !x.is_finite()) {
        return Err(invalid("weights and positive scales must pair up"));
    }
    let constant = c.iter().zip(mu_scales).map(|(c, m)| c.abs().powf(p) / m.powf(gamma)).sum();
    Ok(DilationOperator {
        name: "dilation".into(),
        weights: c.to_vec(),
        scales: mu_scales.to_vec(),
        constant,
        dropped_weight: 0.0,
        paired_gamma: Some(gamma),
    })
}

/// c_n = 2^{−n}, μ_n = 2^n for n = 1..=terms; the dropped weight is 2^{−terms}.
pub fn default_dilation(terms: usize, gamma: f64, p: f64) -> Result<DilationOperator> {
    let c: Vec<f64> = (1..=terms).map(|n| 0.5f64.powi(n as i32)).collect();
    let m: Vec<f64> = (1..=terms).map(|n| 2f64.powi(n as i32)).collect();
    let mut d = make_dilation_example(&c, &m, gamma, p)?;
    d.dropped_weight = 0.5f64.powi(terms as i32);
    Ok(d)
}
