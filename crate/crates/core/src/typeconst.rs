//! Restricted and global type constants, decoupling and Bernstein ratios.

use std::cell::RefCell;
use std::ops::Range;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exponents::BlockPartition;
use crate::measures::{check_mx_gamma, default_eps_grid, lp_norm, monomial_lp_norm, DistributionOpts, LevelGrid, Measure};
use crate::muntz_poly::{golden_max, sup_norm, MuntzPolynomial};
use crate::operators::Operator;
use crate::par::{try_map_range, Exec};
use crate::rng::task_rng;
use crate::sphere::{maximize, SphereOpts};
use crate::trend::{geometric_tail, summable_trend};

/// θ with 1/r = (1−θ)/p + θ/q.
pub fn interpolation_theta(p: f64, q: f64, r: f64) -> Result<f64> {
    if !(0.0 < p && p < r && r < q && q.is_finite()) {
        return Err(invalid(format!("need 0 < p < r < q, got p={p}, r={r}, q={q}")));
    }
    let theta = q * (r - p) / (r * (q - p));
    let lhs = 1.0 / r;
    let rhs = (1.0 - theta) / p + theta / q;
    assert!((lhs - rhs).abs() <= 1e-14 * lhs, "interpolation identity off: {lhs} vs {rhs}");
    Ok(theta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// β ≥ 1 and β ≤ p < r < q.
    Subcritical,
    /// 0 < β < 1 and 1 < p < r < q.
    Supercritical,
}

/// Exponents and measures of an interpolation problem: T maps
/// L^{s/β}((1−t)^{α−1}dt) into L^s(μ) for s ∈ {p, r, q}.
#[derive(Clone, Debug)]
pub struct InterpolationConfig {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub mu: Measure,
}

impl InterpolationConfig {
    pub fn new(p: f64, q: f64, r: f64, alpha: f64, beta: f64, mu: Measure) -> Result<Self> {
        let theta = interpolation_theta(p, q, r)?;
        if !(alpha > 0.0 && beta > 0.0) {
            return Err(invalid("alpha and beta must be positive"));
        }
        if beta >= 1.0 && p < beta {
            return Err(invalid("subcritical regime needs beta <= p"));
        }
        if beta < 1.0 && p <= 1.0 {
            return Err(invalid("supercritical regime needs p > 1"));
        }
        Ok(InterpolationConfig { p, q, r, theta, alpha, beta, mu })
    }

    /// Measures and weights only, for constants at a single exponent; the
    /// interpolation exponents are left undefined (NaN).
    pub fn norms_only(alpha: f64, beta: f64, mu: Measure) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0) {
            return Err(invalid("alpha and beta must be positive"));
        }
        Ok(InterpolationConfig { p: f64::NAN, q: f64::NAN, r: f64::NAN, theta: f64::NAN, alpha, beta, mu })
    }

    pub fn regime(&self) -> Regime {
        if self.beta >= 1.0 {
            Regime::Subcritical
        } else {
            Regime::Supercritical
        }
    }

    /// The source measure (1−t)^{α−1}dt.
    pub fn source(&self) -> Measure {
        Measure::jacobi(self.alpha).expect("alpha validated")
    }

    /// ‖f‖ in L^{s/β}((1−t)^{α−1}dt); closed form for monomials.
    pub fn source_norm(&self, f: &MuntzPolynomial, s: f64) -> Result<f64> {
        match f.terms() {
            [] => Ok(0.0),
            [(l, a)] => Ok(monomial_lp_norm(*l, *a, s / self.beta, self.alpha)),
            _ => lp_norm(f, s / self.beta, &self.source()),
        }
    }

    pub fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.p, "q": self.q, "r": self.r, "theta": self.theta,
            "alpha": self.alpha, "beta": self.beta, "regime": self.regime(),
            "mu": self.mu.describe(),
        })
    }
}

/// sup over levels of level·μ(|g| > level)^{1/s}: levels sup·2^{−j} for
/// j = 0..=40, then golden refinement in ln(level) around the best one.
pub fn weak_quasi_norm(g: &MuntzPolynomial, mu: &Measure, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(invalid("weak exponent must be positive"));
    }
    if g.is_zero() || mu.is_zero() {
        return Ok(0.0);
    }
    let grid = LevelGrid::new(g, &DistributionOpts::default());
    let sup = sup_norm(g).max(grid.sampled_max());
    let failure = RefCell::new(None);
    let h = |ln_level: f64| {
        let level = ln_level.exp();
        match grid.distribution(mu, level) {
            Ok(m) => level * m.powf(1.0 / s),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let top = sup.ln();
    let ln2 = std::f64::consts::LN_2;
    let scan: Vec<f64> = (0..=40).map(|j| h(top - j as f64 * ln2)).collect();
    let (j, best) = scan.iter().enumerate().fold((0, 0.0), |a, (j, &v)| if v > a.1 { (j, v) } else { a });
    let lo = top - (j + 1) as f64 * ln2;
    let hi = top - (j as f64 - 1.0).max(0.0) * ln2;
    let refined = golden_max(h, lo, hi).1;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(best.max(refined))
}

/// One block F_k of the source space together with its images under T.
struct BlockProblem<'a> {
    exps: Vec<f64>,
    images: Vec<MuntzPolynomial>,
    s: f64,
    cfg: &'a InterpolationConfig,
}

impl<'a> BlockProblem<'a> {
    fn new(op: &Operator, part: &BlockPartition, k: usize, s: f64, cfg: &'a InterpolationConfig) -> Result<Self> {
        let exps = part.block(k)?.to_vec();
        let images = exps.iter().map(|&l| op.apply(&MuntzPolynomial::monomial(l, 1.0)?)).collect::<Result<_>>()?;
        Ok(BlockProblem { exps, images, s, cfg })
    }

    fn dim(&self) -> usize {
        self.exps.len()
    }

    fn source(&self, c: &[f64]) -> Result<MuntzPolynomial> {
        MuntzPolynomial::new(self.exps.iter().copied().zip(c.iter().copied()).collect())
    }

    fn image(&self, c: &[f64]) -> MuntzPolynomial {
        self.images.iter().zip(c).fold(MuntzPolynomial::zero(), |acc, (g, &a)| acc.add(&g.scale(a)))
    }

    fn denominator(&self, c: &[f64]) -> Result<f64> {
        self.cfg.source_norm(&self.source(c)?, self.s)
    }

    fn strong(&self, c: &[f64]) -> Result<f64> {
        let num = lp_norm(&self.image(c), self.s, &self.cfg.mu)?;
        ratio(num, self.denominator(c)?)
    }

    fn weak(&self, c: &[f64]) -> Result<f64> {
        let num = weak_quasi_norm(&self.image(c), &self.cfg.mu, self.s)?;
        ratio(num, self.denominator(c)?)
    }
}

fn ratio(num: f64, den: f64) -> Result<f64> {
    if num == 0.0 {
        return Ok(0.0);
    }
    if !(den > 0.0) {
        return Err(Error::UndefinedConstant("source norm vanished".into()));
    }
    Ok(num / den)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantKind {
    RestrictedStrong,
    RestrictedWeak,
    GlobalStrongLower,
}

impl ConstantKind {
    fn tag(self) -> u64 {
        self as u64
    }
}

fn restricted(
    kind: ConstantKind,
    op: &Operator,
    part: &BlockPartition,
    k: usize,
    s: f64,
    cfg: &InterpolationConfig,
    opts: &SphereOpts,
) -> Result<f64> {
    if !(s > 0.0) {
        return Err(invalid("exponent must be positive"));
    }
    let prob = BlockProblem::new(op, part, k, s, cfg)?;
    let f = |c: &[f64]| match kind {
        ConstantKind::RestrictedWeak => prob.weak(c),
        _ => prob.strong(c),
    };
    Ok(maximize(f, prob.dim(), opts, &[kind.tag(), k as u64])?.value)
}

/// sup over f ∈ F_k of ‖Tf‖_{L^s(μ)}/‖f‖_{L^{s/β}(ν_{α−1})}.
pub fn restricted_strong_constant(
    op: &Operator,
    part: &BlockPartition,
    k: usize,
    s: f64,
    cfg: &InterpolationConfig,
    opts: &SphereOpts,
) -> Result<f64> {
    restricted(ConstantKind::RestrictedStrong, op, part, k, s, cfg, opts)
}

/// As the strong constant with ‖Tf‖ replaced by the weak L^s quasi-norm.
pub fn restricted_weak_constant(
    op: &Operator,
    part: &BlockPartition,
    k: usize,
    s: f64,
    cfg: &InterpolationConfig,
    opts: &SphereOpts,
) -> Result<f64> {
    restricted(ConstantKind::RestrictedWeak, op, part, k, s, cfg, opts)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KConstant {
    pub k: usize,
    #[serde(rename = "C")]
    pub c: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Method {
    pub restarts: usize,
    pub samples: usize,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeConstantReport {
    pub kind: ConstantKind,
    /// Target exponent s; the source space is L^{s/β}.
    pub r: f64,
    pub p_over_beta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub constants: Vec<KConstant>,
    pub sup: f64,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_eps: Option<f64>,
}

impl TypeConstantReport {
    pub fn values(&self) -> Vec<f64> {
        self.constants.iter().map(|c| c.c).collect()
    }
}

/// Restricted constants for every block index in `ks`.
pub fn restricted_constants(
    kind: ConstantKind,
    op: &Operator,
    part: &BlockPartition,
    ks: Range<usize>,
    s: f64,
    cfg: &InterpolationConfig,
    opts: &SphereOpts,
) -> Result<TypeConstantReport> {
    if kind == ConstantKind::GlobalStrongLower {
        return Err(invalid("use strong_constant_lower_bound for global constants"));
    }
    let ks: Vec<usize> = ks.collect();
    let vals = try_map_range(opts.exec, ks.len(), |i| restricted(kind, op, part, ks[i], s, cfg, opts))?;
    let constants: Vec<KConstant> = ks.iter().zip(&vals).map(|(&k, &c)| KConstant { k, c }).collect();
    Ok(TypeConstantReport {
        kind,
        r: s,
        p_over_beta: s / cfg.beta,
        alpha: cfg.alpha,
        beta: cfg.beta,
        sup: vals.iter().copied().fold(0.0, f64::max),
        constants,
        method: Method { restarts: opts.restarts, samples: opts.samples, tolerance: opts.rel_improvement },
        eps: None,
        c_eps: None,
    })
}

/// f_N = Σ_{k=1}^{N} λ_k^{αβ/r} t^{λ_k}.
pub fn witness(part: &BlockPartition, n: usize, r: f64, cfg: &InterpolationConfig) -> Result<MuntzPolynomial> {
    let v = part.seq().values();
    if n == 0 || n >= v.len() {
        return Err(Error::IndexOutOfRange { index: n, len: v.len() });
    }
    let e = cfg.alpha * cfg.beta / r;
    MuntzPolynomial::new(v[1..=n].iter().map(|&l| (l, l.powf(e))).collect())
}

/// Witnesses f_N for N = 1, 2, 4, … below the sequence length, then
/// `n_random` polynomials Σ_{k<m} z_k t^{λ_k}/‖t^{λ_k}‖ with m uniform
/// and z_k standard normal. Larger `n_random` extends the same stream.
pub fn default_family(
    part: &BlockPartition,
    r: f64,
    cfg: &InterpolationConfig,
    n_random: usize,
    seed: u64,
) -> Result<Vec<MuntzPolynomial>> {
    let v = part.seq().values();
    let mut out = Vec::new();
    let mut n = 1;
    while n < v.len() {
        out.push(witness(part, n, r, cfg)?);
        n *= 2;
    }
    for i in 0..n_random {
        let mut rng = task_rng(seed, &[ConstantKind::GlobalStrongLower.tag(), i as u64]);
        let m = rng.random_range(1..=v.len());
        let terms = v[..m]
            .iter()
            .map(|&l| {
                let z: f64 = rng.sample(StandardNormal);
                (l, z / monomial_lp_norm(l, 1.0, r / cfg.beta, cfg.alpha))
            })
            .collect();
        out.push(MuntzPolynomial::new(terms)?);
    }
    Ok(out)
}

/// ‖Tf‖_{L^r(μ)}/‖f‖_{L^{r/β}(ν_{α−1})} for each family member.
pub fn family_ratios(
    op: &Operator,
    r: f64,
    cfg: &InterpolationConfig,
    family: &[MuntzPolynomial],
    exec: Exec,
) -> Result<Vec<f64>> {
    try_map_range(exec, family.len(), |i| {
        let f = &family[i];
        if f.is_zero() {
            return Ok(0.0);
        }
        let num = lp_norm(&op.apply(f)?, r, &cfg.mu)?;
        ratio(num, cfg.source_norm(f, r)?)
    })
}

/// Largest family ratio: a lower bound on the global strong constant.
pub fn strong_constant_lower_bound(
    op: &Operator,
    r: f64,
    cfg: &InterpolationConfig,
    family: &[MuntzPolynomial],
    exec: Exec,
) -> Result<f64> {
    if family.is_empty() {
        return Err(invalid("family must be nonempty"));
    }
    Ok(family_ratios(op, r, cfg, family, exec)?.into_iter().fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecouplingRow {
    pub blocks: usize,
    pub samples: usize,
    pub c_low: f64,
    pub c_high: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecouplingReport {
    pub p: f64,
    pub alpha: f64,
    pub samples: usize,
    pub c_low: f64,
    pub c_high: f64,
    pub by_blocks: Vec<DecouplingRow>,
    pub ratios: Vec<f64>,
}

pub const MAX_DECOUPLING_BLOCKS: usize = 12;

fn norm_p(f: &MuntzPolynomial, p: f64, mu: &Measure, alpha: f64) -> Result<f64> {
    match f.terms() {
        [(l, a)] => Ok(monomial_lp_norm(*l, *a, p, alpha)),
        _ => lp_norm(f, p, mu),
    }
}

/// ‖Σ f_k‖_{L^p(ν_{α−1})}/(Σ‖f_k‖^p)^{1/p} for block coefficient vectors
/// `coeffs[k]` on blocks 0, 1, ….
pub fn decoupling_sample(part: &BlockPartition, coeffs: &[Vec<f64>], p: f64, alpha: f64) -> Result<f64> {
    if !(p >= 1.0 && alpha > 0.0) {
        return Err(invalid("decoupling needs p >= 1 and alpha > 0"));
    }
    let mu = Measure::jacobi(alpha)?;
    let mut sum = MuntzPolynomial::zero();
    let mut norms = Vec::with_capacity(coeffs.len());
    for (k, c) in coeffs.iter().enumerate() {
        let exps = part.block(k)?;
        if exps.len() != c.len() {
            return Err(invalid(format!("block {k} has {} exponents, got {} coefficients", exps.len(), c.len())));
        }
        let fk = MuntzPolynomial::new(exps.iter().copied().zip(c.iter().copied()).collect())?;
        norms.push(norm_p(&fk, p, &mu, alpha)?);
        sum = sum.add(&fk);
    }
    // Scaled ℓ^p sum, exact for a single block.
    let m = norms.iter().copied().fold(0.0, f64::max);
    let den = m * norms.iter().map(|n| (n / m).powf(p)).sum::<f64>().powf(1.0 / p);
    ratio(norm_p(&sum, p, &mu, alpha)?, den)
}

fn decoupling_draws(
    part: &BlockPartition,
    p: f64,
    alpha: f64,
    blocks: usize,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<Vec<f64>> {
    let sizes = part.block_sizes();
    try_map_range(exec, samples, |i| {
        let mut rng = task_rng(seed, &[blocks as u64, i as u64]);
        let coeffs: Vec<Vec<f64>> =
            (0..blocks).map(|k| (0..sizes[k]).map(|_| rng.sample(StandardNormal)).collect()).collect();
        decoupling_sample(part, &coeffs, p, alpha)
    })
}

fn interval(rs: &[f64]) -> (f64, f64) {
    (rs.iter().copied().fold(f64::INFINITY, f64::min), rs.iter().copied().fold(0.0, f64::max))
}

/// Range of the decoupling ratio over random tuples on the first
/// min(12, #blocks) blocks with standard-normal coefficients. Sample i has
/// its own stream, so a longer run extends a shorter one.
pub fn decoupling_ratio(
    part: &BlockPartition,
    p: f64,
    alpha: f64,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<DecouplingReport> {
    if samples < 100 {
        return Err(invalid("decoupling needs at least 100 samples"));
    }
    let blocks = part.n_blocks().min(MAX_DECOUPLING_BLOCKS);
    let ratios = decoupling_draws(part, p, alpha, blocks, samples, seed, exec)?;
    let (c_low, c_high) = interval(&ratios);
    Ok(DecouplingReport {
        p,
        alpha,
        samples,
        c_low,
        c_high,
        by_blocks: vec![DecouplingRow { blocks, samples, c_low, c_high }],
        ratios,
    })
}

/// The decoupling interval for each block count 2..=min(12, #blocks).
pub fn decoupling_profile(
    part: &BlockPartition,
    p: f64,
    alpha: f64,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<Vec<DecouplingRow>> {
    let cap = part.n_blocks().min(MAX_DECOUPLING_BLOCKS);
    if cap < 2 {
        return Err(invalid("decoupling needs at least two blocks"));
    }
    (2..=cap)
        .map(|b| {
            let (c_low, c_high) = interval(&decoupling_draws(part, p, alpha, b, samples, seed, exec)?);
            Ok(DecouplingRow { blocks: b, samples, c_low, c_high })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernsteinParams {
    pub p: f64,
    pub q: f64,
    /// Exponent of the weight (1−x)^{α_w} in the L^q norm.
    pub alpha_w: f64,
    pub beta: f64,
    pub samples: usize,
    /// Smallest admissible block index.
    pub k0: usize,
    pub seed: u64,
}

impl BernsteinParams {
    /// δ = (1+α_w)/q − β/p.
    pub fn delta(&self) -> f64 {
        (1.0 + self.alpha_w) / self.q - self.beta / self.p
    }
}

/// Empirical sup over f ∈ F_k of ‖f‖_{L^p(μ)}/(λ_{n_k}^δ·‖f‖_{L^q((1−x)^{α_w}dx)}),
/// λ_{n_k} being the top exponent of the block.
pub fn bernstein_constant(part: &BlockPartition, k: usize, prm: &BernsteinParams, mu: &Measure) -> Result<f64> {
    let BernsteinParams { p, q, alpha_w, beta, samples, k0, seed } = *prm;
    if !(p > 0.0 && q > 0.0 && alpha_w > -1.0 && beta > 0.0 && samples >= 1) {
        return Err(invalid("need p, q, beta > 0, alpha_w > -1 and at least one sample"));
    }
    if k < k0 {
        return Err(Error::Precondition(format!("block {k} is below k0 = {k0}")));
    }
    if !check_mx_gamma(mu, beta, &default_eps_grid())?.verdict {
        return Err(Error::Precondition(format!("measure fails the M_(x^{beta}) condition")));
    }
    let exps = part.block(k)?;
    let weight = Measure::jacobi(alpha_w + 1.0)?;
    let scale = part.endpoint(k).powf(prm.delta());
    let one = |c: &[f64]| -> Result<f64> {
        let f = MuntzPolynomial::new(exps.iter().copied().zip(c.iter().copied()).collect())?;
        let den = norm_p(&f, q, &weight, alpha_w + 1.0)? * scale;
        ratio(lp_norm(&f, p, mu)?, den)
    };
    if exps.len() == 1 {
        return one(&[1.0]);
    }
    let mut best: f64 = 0.0;
    for i in 0..samples {
        let mut rng = task_rng(seed, &[k as u64, i as u64]);
        let c: Vec<f64> = (0..exps.len()).map(|_| rng.sample(StandardNormal)).collect();
        best = best.max(one(&c)?);
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonProfile {
    pub s: f64,
    pub beta: f64,
    pub ks: Vec<usize>,
    /// Restricted strong constants C_s(k).
    pub constants: Vec<f64>,
    /// Normaliser max_k C_s(k).
    pub c_s: f64,
    pub eps: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// Last partial sum, standing in for C_ε.
    pub c_eps: f64,
    /// Summability surrogate on ε (geometric tail or Bertrand test).
    pub summable: bool,
    /// Strict geometric-tail test alone.
    pub geometric: bool,
}

/// ε_k = (C_s(k)/C_s)^{s/(1−β)} from restricted strong constants at exponent s.
pub fn epsilon_profile(
    op: &Operator,
    part: &BlockPartition,
    cfg: &InterpolationConfig,
    s: f64,
    ks: Range<usize>,
    opts: &SphereOpts,
) -> Result<EpsilonProfile> {
    let beta = cfg.beta;
    if !(beta > 0.0 && beta < 1.0) {
        return Err(invalid("epsilon profile needs 0 < beta < 1"));
    }
    if ![cfg.p, cfg.q, cfg.r].iter().any(|x| (x - s).abs() <= 1e-12 * s) {
        return Err(invalid("s must be one of p, q, r"));
    }
    let report = restricted_constants(ConstantKind::RestrictedStrong, op, part, ks, s, cfg, opts)?;
    let constants = report.values();
    let c_s = report.sup;
    let eps: Vec<f64> = constants
        .iter()
        .map(|c| if c_s == 0.0 { 0.0 } else { (c / c_s).powf(s / (1.0 - beta)) })
        .collect();
    let partial_sums: Vec<f64> = eps
        .iter()
        .scan(0.0, |a, e| {
            *a += e;
            Some(*a)
        })
        .collect();
    Ok(EpsilonProfile {
        s,
        beta,
        ks: report.constants.iter().map(|c| c.k).collect(),
        c_s,
        c_eps: partial_sums.last().copied().unwrap_or(0.0),
        summable: summable_trend(&eps),
        geometric: geometric_tail(&eps),
        constants,
        eps,
        partial_sums,
    })
}
