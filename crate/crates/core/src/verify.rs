//! Experiment runners. Each returns a self-contained report whose verdicts
//! can be recomputed from its raw tables.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exponents::{check_subgeometric, make_geometric, BlockPartition};
use crate::measures::{check_a_condition, check_b_condition, check_mx_gamma, default_eps_grid, monomial_lp_norm, Measure};
use crate::operators::{make_counterexample_subcritical, make_counterexample_supercritical, CounterexampleParams, Operator};
use crate::par::Exec;
use crate::sphere::SphereOpts;
use crate::trend::{bounded_trend_with, loglog_fit, summable_trend, tends_to_zero, Fit, TREND_FACTOR, TREND_WINDOW};
use crate::typeconst::{
    default_family, epsilon_profile, family_ratios, restricted_constants, ConstantKind, InterpolationConfig, Regime,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Half-width of slope windows.
    pub slope: f64,
    pub trend_factor: f64,
    pub trend_window: usize,
    /// Largest relative change of a slack constant when the sample doubles.
    pub k_stability: f64,
    pub r2_min: f64,
    /// Relative slack allowed in weak ≤ strong.
    pub markov: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            slope: 0.05,
            trend_factor: TREND_FACTOR,
            trend_window: TREND_WINDOW,
            k_stability: 0.2,
            r2_min: 0.99,
            markov: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn bounded(&self, v: &[f64]) -> bool {
        bounded_trend_with(v, self.trend_window, self.trend_factor)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    /// Worst of several statuses: any FAIL, else any INCONCLUSIVE.
    pub fn combine<I: IntoIterator<Item = Status>>(it: I) -> Status {
        it.into_iter().max().unwrap_or(Status::Pass)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub id: String,
    pub parameters: serde_json::Value,
    pub tables: BTreeMap<String, Table>,
    pub fits: BTreeMap<String, Fit>,
    pub verdicts: Vec<Verdict>,
    pub status: Status,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_clock_s: Option<f64>,
}

impl ExperimentReport {
    fn new(id: &str, parameters: serde_json::Value, seed: u64) -> Self {
        ExperimentReport {
            id: id.to_string(),
            parameters,
            tables: BTreeMap::new(),
            fits: BTreeMap::new(),
            verdicts: Vec::new(),
            status: Status::Pass,
            seed,
            wall_clock_s: None,
        }
    }

    fn verdict(&mut self, name: &str, status: Status, detail: impl Into<String>) {
        self.verdicts.push(Verdict { name: name.to_string(), status, detail: detail.into() });
    }

    fn finish(mut self, started: Instant) -> Self {
        self.status = Status::combine(self.verdicts.iter().map(|v| v.status));
        self.wall_clock_s = Some(started.elapsed().as_secs_f64());
        self
    }

    pub fn get(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    /// The report without timing, identical across runs with equal inputs.
    pub fn deterministic(&self) -> Self {
        ExperimentReport { wall_clock_s: None, ..self.clone() }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOpts {
    pub seed: u64,
    pub exec: Exec,
    pub sphere: SphereOpts,
    pub tol: Tolerances,
}

impl RunOpts {
    pub fn new(seed: u64, exec: Exec) -> Self {
        RunOpts { seed, exec, sphere: SphereOpts { seed, exec, ..SphereOpts::default() }, tol: Tolerances::default() }
    }
}

impl Default for RunOpts {
    fn default() -> Self {
        RunOpts::new(0, Exec::default())
    }
}

/// Blocks whose monomials all have images under T.
fn active_blocks(op: &Operator, part: &BlockPartition) -> usize {
    match op {
        Operator::Kernel(k) => part.blocks().iter().take_while(|b| b.1 < k.n_rows()).count(),
        Operator::Dilation(_) => part.n_blocks(),
    }
}

fn family_partition(op: &Operator, part: &BlockPartition) -> Result<(BlockPartition, usize)> {
    let m = active_blocks(op, part);
    if m == 0 {
        return Err(invalid("operator acts on no block of the partition"));
    }
    Ok((part.prefix(m)?, m))
}

struct Slack {
    k: f64,
    k_doubled: f64,
    lower: f64,
    lower_doubled: f64,
}

impl Slack {
    fn change(&self) -> f64 {
        if self.k == self.k_doubled {
            0.0
        } else {
            ((self.k_doubled - self.k) / self.k).abs()
        }
    }
}

/// Lower bounds on C_r from the default family and from its doubling, and
/// the slack K = L/bound for each.
fn slack(
    rep: &mut ExperimentReport,
    op: &Operator,
    part: &BlockPartition,
    cfg: &InterpolationConfig,
    r: f64,
    family_size: usize,
    bound: f64,
    opts: &RunOpts,
) -> Result<Slack> {
    let big = default_family(part, r, cfg, 2 * family_size, opts.seed)?;
    let ratios = family_ratios(op, r, cfg, &big, opts.exec)?;
    let n_small = big.len() - family_size;
    let lower = ratios[..n_small].iter().copied().fold(0.0, f64::max);
    let lower_doubled = ratios.iter().copied().fold(0.0, f64::max);
    let mut t = Table::new(&["member", "ratio"]);
    ratios.iter().enumerate().for_each(|(i, &v)| t.push(vec![i as f64, v]));
    rep.tables.insert("family".into(), t);
    let k_of = |l: f64| if l == 0.0 { 0.0 } else { l / bound };
    Ok(Slack { k: k_of(lower), k_doubled: k_of(lower_doubled), lower, lower_doubled })
}

fn slack_verdict(rep: &mut ExperimentReport, s: &Slack, bound: f64, tol: &Tolerances) {
    let finite = s.lower == 0.0 || (bound > 0.0 && bound.is_finite());
    let ok = finite && s.k.is_finite() && s.change() < tol.k_stability;
    rep.verdict(
        "bound",
        Status::from_bool(ok),
        format!(
            "L={:.6e} (doubled {:.6e}) <= K*{:.6e} with K={:.6} (doubled {:.6}, change {:.3})",
            s.lower,
            s.lower_doubled,
            bound,
            s.k,
            s.k_doubled,
            s.change()
        ),
    );
}

fn constants_table(ks: &[usize], cols: &[(&str, &[f64])]) -> Table {
    let mut names = vec!["k"];
    names.extend(cols.iter().map(|c| c.0));
    let mut t = Table::new(&names);
    for (i, &k) in ks.iter().enumerate() {
        let mut row = vec![k as f64];
        row.extend(cols.iter().map(|c| c.1[i]));
        t.push(row);
    }
    t
}

/// Strong type r with C_r ≤ K·C_p^{1−θ}C_q^θ, C_s the sup of restricted weak constants.
pub fn run_theorem_a_check(
    op: &Operator,
    part: &BlockPartition,
    cfg: &InterpolationConfig,
    family_size: usize,
    opts: &RunOpts,
) -> Result<ExperimentReport> {
    let started = Instant::now();
    if cfg.regime() != Regime::Subcritical {
        return Err(invalid("theorem A check needs beta >= 1"));
    }
    let (fpart, m) = family_partition(op, part)?;
    let mut rep = ExperimentReport::new(
        "thmA",
        serde_json::json!({"operator": op.name(), "config": cfg.describe(), "family_size": family_size,
            "blocks": m, "tolerances": opts.tol}),
        opts.seed,
    );
    let wp = restricted_constants(ConstantKind::RestrictedWeak, op, part, 0..m, cfg.p, cfg, &opts.sphere)?;
    let wq = restricted_constants(ConstantKind::RestrictedWeak, op, part, 0..m, cfg.q, cfg, &opts.sphere)?;
    let (vp, vq) = (wp.values(), wq.values());
    let ks: Vec<usize> = (0..m).collect();
    rep.tables.insert("restricted_weak".into(), constants_table(&ks, &[("C_p", &vp), ("C_q", &vq)]));
    if !(opts.tol.bounded(&vp) && opts.tol.bounded(&vq)) {
        rep.verdict("precondition", Status::Inconclusive, "restricted weak constants show a growth trend");
        return Ok(rep.finish(started));
    }
    rep.verdict("precondition", Status::Pass, "restricted weak constants bounded");
    let bound = wp.sup.powf(1.0 - cfg.theta) * wq.sup.powf(cfg.theta);
    rep.parameters["C_p"] = wp.sup.into();
    rep.parameters["C_q"] = wq.sup.into();
    rep.parameters["bound"] = bound.into();
    let s = slack(&mut rep, op, &fpart, cfg, cfg.r, family_size, bound, opts)?;
    slack_verdict(&mut rep, &s, bound, &opts.tol);
    rep.parameters["K"] = s.k.into();
    Ok(rep.finish(started))
}

/// C_r ≤ K·C_ε^{(1−β)/r}C_p^{1−θ}C_q^θ with ε_k from the restricted strong constants.
pub fn run_theorem_b_check(
    op: &Operator,
    part: &BlockPartition,
    cfg: &InterpolationConfig,
    family_size: usize,
    opts: &RunOpts,
) -> Result<ExperimentReport> {
    let started = Instant::now();
    if cfg.regime() != Regime::Supercritical {
        return Err(invalid("theorem B check needs 0 < beta < 1"));
    }
    let (fpart, m) = family_partition(op, part)?;
    let mut rep = ExperimentReport::new(
        "thmB",
        serde_json::json!({"operator": op.name(), "config": cfg.describe(), "family_size": family_size,
            "blocks": m, "tolerances": opts.tol}),
        opts.seed,
    );
    let prof_p = epsilon_profile(op, part, cfg, cfg.p, 0..m, &opts.sphere)?;
    let prof_q = epsilon_profile(op, part, cfg, cfg.q, 0..m, &opts.sphere)?;
    let ks: Vec<usize> = (0..m).collect();
    rep.tables.insert(
        "epsilon".into(),
        constants_table(
            &ks,
            &[("eps_p", &prof_p.eps), ("partial_sum_p", &prof_p.partial_sums), ("eps_q", &prof_q.eps)],
        ),
    );
    if !(prof_p.summable && prof_q.summable) {
        rep.verdict("precondition", Status::Inconclusive, "epsilon profile lacks a summable trend");
        return Ok(rep.finish(started));
    }
    rep.verdict("precondition", Status::Pass, "epsilon profiles summable");
    let wp = restricted_constants(ConstantKind::RestrictedWeak, op, part, 0..m, cfg.p, cfg, &opts.sphere)?.values();
    let wq = restricted_constants(ConstantKind::RestrictedWeak, op, part, 0..m, cfg.q, cfg, &opts.sphere)?.values();
    let normalised = |w: &[f64], s: f64| {
        w.iter()
            .zip(&prof_p.eps)
            .map(|(&c, &e)| if c == 0.0 { 0.0 } else { c / e.powf((1.0 - cfg.beta) / s) })
            .fold(0.0, f64::max)
    };
    let (c_p, c_q) = (normalised(&wp, cfg.p), normalised(&wq, cfg.q));
    let c_eps = prof_p.c_eps;
    rep.tables.insert("restricted_weak".into(), constants_table(&ks, &[("W_p", &wp), ("W_q", &wq)]));
    let bound = c_eps.powf((1.0 - cfg.beta) / cfg.r) * c_p.powf(1.0 - cfg.theta) * c_q.powf(cfg.theta);
    for (key, v) in [("C_p", c_p), ("C_q", c_q), ("C_eps", c_eps), ("bound", bound)] {
        rep.parameters[key] = v.into();
    }
    let s = slack(&mut rep, op, &fpart, cfg, cfg.r, family_size, bound, opts)?;
    slack_verdict(&mut rep, &s, bound, &opts.tol);
    rep.parameters["K"] = s.k.into();
    Ok(rep.finish(started))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Subcritical,
    Supercritical,
}

impl Which {
    /// Exponent by which ‖Tf_N‖/‖f_N‖ is asserted to grow.
    pub fn predicted_divergence(self, prm: &CounterexampleParams) -> f64 {
        let CounterexampleParams { r, beta, eps, eta, .. } = *prm;
        match self {
            Which::Subcritical => (1.0 - eps / r) - beta / r,
            Which::Supercritical => (beta - eps / r - (1.0 - beta) * eta) - beta / r,
        }
    }
}

fn check_dyadic(n_list: &[usize]) -> Result<()> {
    let dyadic = n_list.len() >= 4 && n_list[0] >= 1 && n_list.windows(2).all(|w| w[1] == 2 * w[0]);
    if !dyadic {
        return Err(invalid("N list needs at least 4 dyadically spaced values"));
    }
    Ok(())
}

/// Growth of ‖Tf_N‖/‖f_N‖ for the counterexample kernels with
/// f_N = Σ_{k=1}^N λ_k^{αβ/r} t^{λ_k}, λ_k = 2^k. Both norms use the
/// decoupled closed forms over singleton blocks.
pub fn run_counterexample_growth(
    which: Which,
    prm: &CounterexampleParams,
    n_list: &[usize],
    opts: &RunOpts,
) -> Result<ExperimentReport> {
    let started = Instant::now();
    check_dyadic(n_list)?;
    let n_max = *n_list.last().unwrap();
    let seq = make_geometric(1.0, 2.0, n_max + 1)?;
    let part = BlockPartition::lacunary(&seq, 1.5)?;
    let kernel = match which {
        Which::Subcritical => make_counterexample_subcritical(&part, *prm)?,
        Which::Supercritical => make_counterexample_supercritical(&part, *prm)?,
    };
    let CounterexampleParams { r, alpha, beta, gamma, .. } = *prm;
    let predicted = which.predicted_divergence(prm);
    let mut rep = ExperimentReport::new(
        "growth",
        serde_json::json!({"which": which, "params": prm, "N_list": n_list, "predicted_divergence": predicted,
            "tolerances": opts.tol}),
        opts.seed,
    );
    let v = seq.values();
    let s_src = r / beta;
    let a: Vec<f64> = v.iter().map(|l| l.powf(alpha * beta / r)).collect();
    let mut t = Table::new(&["N", "norm_f", "norm_Tf", "ratio"]);
    for &n in n_list {
        let norm_f = (1..=n)
            .map(|k| (a[k] * monomial_lp_norm(v[k], 1.0, s_src, alpha)).powf(s_src))
            .sum::<f64>()
            .powf(1.0 / s_src);
        let mut b = vec![0.0; n_max + 1];
        for (k, ak) in a.iter().enumerate().take(n + 1).skip(1) {
            for &(j, c) in kernel.row(k) {
                b[j] += ak * c;
            }
        }
        let norm_tf = b
            .iter()
            .enumerate()
            .map(|(j, bj)| (bj.abs() * monomial_lp_norm(v[j], 1.0, r, gamma)).powf(r))
            .sum::<f64>()
            .powf(1.0 / r);
        t.push(vec![n as f64, norm_f, norm_tf, norm_tf / norm_f]);
    }
    let ns = t.column("N").unwrap();
    let fit = |col: &str| loglog_fit(&ns, &t.column(col).unwrap()).ok_or_else(|| invalid("degenerate fit"));
    let (ff, ft, fr) = (fit("norm_f")?, fit("norm_Tf")?, fit("ratio")?);
    rep.tables.insert("growth".into(), t);
    rep.fits.insert("s_f".into(), ff);
    rep.fits.insert("s_T".into(), ft);
    rep.fits.insert("ratio".into(), fr);
    let tol = &opts.tol;
    let r2_ok = [ff, ft, fr].iter().all(|f| f.r2 >= tol.r2_min);
    let gate = |ok: bool| if r2_ok { Status::from_bool(ok) } else { Status::Inconclusive };
    let want_f = beta / r;
    rep.verdict(
        "source_slope",
        gate((ff.slope - want_f).abs() <= tol.slope),
        format!("s_f = {:.4} (want {want_f:.4} ± {}), R² = {:.5}", ff.slope, tol.slope, ff.r2),
    );
    rep.verdict(
        "divergence",
        gate(ft.slope - ff.slope >= predicted - tol.slope),
        format!("s_T − s_f = {:.4} >= {predicted:.4} − {}", ft.slope - ff.slope, tol.slope),
    );
    // The kernel is of restricted strong type: per-block constants stay bounded.
    let cfg = InterpolationConfig::norms_only(alpha, beta, Measure::jacobi(gamma)?)?;
    let op: Operator = kernel.into();
    let rs = restricted_constants(ConstantKind::RestrictedStrong, &op, &part, 1..n_max + 1, r, &cfg, &opts.sphere)?;
    let ks: Vec<usize> = (1..=n_max).collect();
    let vals = rs.values();
    rep.tables.insert("restricted_strong".into(), constants_table(&ks, &[("C_r", &vals)]));
    rep.verdict(
        "restricted_bounded",
        Status::from_bool(tol.bounded(&vals)),
        format!("max C_r(k) = {:.6}, last = {:.6}", rs.sup, vals.last().unwrap()),
    );
    Ok(rep.finish(started))
}

/// ε_k^{(1−β)/r} := ‖T t^{λ_k}‖_{L^r(μ)}/‖t^{λ_k}‖_{L^{r/β}(ν_{α−1})} must be summable.
pub fn run_necessity_check(
    op: &Operator,
    part: &BlockPartition,
    cfg: &InterpolationConfig,
    k_max: usize,
    opts: &RunOpts,
) -> Result<ExperimentReport> {
    let started = Instant::now();
    if !op.is_positive() {
        return Err(Error::Precondition("operator is not positive".into()));
    }
    if cfg.regime() != Regime::Supercritical {
        return Err(invalid("necessity check needs 0 < beta < 1"));
    }
    if part.max_block() != 1 {
        return Err(invalid("necessity check needs a lacunary partition"));
    }
    let m = active_blocks(op, part).min(k_max + 1);
    let mut rep = ExperimentReport::new(
        "necessity",
        serde_json::json!({"operator": op.name(), "config": cfg.describe(), "k_max": k_max}),
        opts.seed,
    );
    let rs = restricted_constants(ConstantKind::RestrictedStrong, op, part, 0..m, cfg.r, cfg, &opts.sphere)?;
    let ratios = rs.values();
    let eps: Vec<f64> = ratios.iter().map(|c| c.powf(cfg.r / (1.0 - cfg.beta))).collect();
    let sums: Vec<f64> = eps
        .iter()
        .scan(0.0, |a, e| {
            *a += e;
            Some(*a)
        })
        .collect();
    let ks: Vec<usize> = (0..m).collect();
    rep.tables.insert("epsilon".into(), constants_table(&ks, &[("ratio", &ratios), ("eps", &eps), ("partial_sum", &sums)]));
    let ok = summable_trend(&eps);
    rep.verdict(
        "summable",
        Status::from_bool(ok),
        format!("partial sum {:.6} over {m} blocks", sums.last().copied().unwrap_or(0.0)),
    );
    Ok(rep.finish(started))
}

/// Hypothesis (B or A condition) against boundedness of the inclusion's
/// restricted constants, plus the M_{x^{αβ}} equivalence on test measures.
pub fn run_embedding_corollaries(
    mu: &Measure,
    part: &BlockPartition,
    alpha: f64,
    beta: f64,
    p: f64,
    r_list: &[f64],
    opts: &RunOpts,
) -> Result<ExperimentReport> {
    let started = Instant::now();
    if r_list.is_empty() {
        return Err(invalid("r list is empty"));
    }
    let n = part.max_block() as f64;
    let threshold = if beta >= 1.0 { beta } else { 1.0 };
    let in_range = |r: f64| if p * n <= threshold { r >= threshold } else { r > p * n };
    if let Some(r) = r_list.iter().find(|r| !in_range(**r)) {
        return Err(invalid(format!("r = {r} lies outside the corollary's range")));
    }
    let mut rep = ExperimentReport::new(
        "embed",
        serde_json::json!({"mu": mu.describe(), "alpha": alpha, "beta": beta, "p": p, "r_list": r_list,
            "N": part.max_block(), "q_prime": part.q_prime()}),
        opts.seed,
    );
    let cond = if beta >= 1.0 {
        check_b_condition(mu, p, part, alpha, beta)?
    } else {
        check_a_condition(mu, p, part, alpha, beta)?
    };
    let ks: Vec<usize> = cond.rows.iter().map(|r| r.k).collect();
    rep.tables.insert("condition".into(), constants_table(&ks, &[("value", &cond.values()), ("partial_sum", &cond.partial_sums)]));
    let hypothesis = cond.verdict_tail;
    rep.parameters["hypothesis"] = hypothesis.into();
    rep.parameters["condition_compact"] = cond.compact.into();

    let id: Operator = crate::operators::identity(part.seq()).into();
    let mut all_bounded = true;
    let mut compact = true;
    for (i, &r) in r_list.iter().enumerate() {
        let cfg = InterpolationConfig::norms_only(alpha, beta, mu.clone())?;
        let rs = restricted_constants(ConstantKind::RestrictedStrong, &id, part, 0..part.n_blocks(), r, &cfg, &opts.sphere)?;
        let vals = rs.values();
        let bounded = opts.tol.bounded(&vals);
        all_bounded &= bounded;
        compact &= tends_to_zero(&vals);
        let fam = default_family(part, r, &cfg, 50, opts.seed.wrapping_add(i as u64))?;
        let lower = family_ratios(&id, r, &cfg, &fam, opts.exec)?.into_iter().fold(0.0, f64::max);
        rep.tables.insert(format!("restricted_r{r}"), constants_table(&ks, &[("C_r", &vals)]));
        rep.parameters[format!("lower_bound_r{r}")] = lower.into();
        rep.parameters[format!("bounded_r{r}")] = bounded.into();
    }
    rep.parameters["compact"] = compact.into();
    rep.parameters["sequence_length"] = part.seq().len().into();
    rep.verdict(
        "hypothesis_matches_boundedness",
        Status::from_bool(hypothesis == all_bounded),
        format!("condition holds: {hypothesis}; constants bounded for every r: {all_bounded}"),
    );

    if beta >= 1.0 {
        if part.q_prime().is_none() {
            return Err(Error::Precondition("the M_(x^ab) equivalence needs a subgeometric partition".into()));
        }
        let ab = alpha * beta;
        let tests = [("mu", mu.clone()), ("jacobi", Measure::jacobi(ab)?), ("atom_at_1", Measure::atom(1.0, 1.0)?)];
        let mut t = Table::new(&["measure", "mx_verdict", "mx_constant", "bounded"]);
        let mut agree = true;
        for (j, (_, m)) in tests.iter().enumerate() {
            let mx = check_mx_gamma(m, ab, &default_eps_grid())?;
            let cfg = InterpolationConfig::norms_only(alpha, beta, m.clone())?;
            let mut bounded = true;
            for &r in r_list.iter().filter(|r| **r >= beta) {
                let vals = restricted_constants(ConstantKind::RestrictedStrong, &id, part, 0..part.n_blocks(), r, &cfg, &opts.sphere)?
                    .values();
                bounded &= opts.tol.bounded(&vals);
            }
            agree &= mx.verdict == bounded;
            t.push(vec![j as f64, mx.verdict as u8 as f64, mx.constant, bounded as u8 as f64]);
        }
        rep.parameters["equivalence_measures"] = serde_json::json!(tests.iter().map(|t| t.0).collect::<Vec<_>>());
        rep.tables.insert("equivalence".into(), t);
        rep.verdict("mx_equivalence", Status::from_bool(agree), "M_(x^ab) membership matches embedding boundedness");
    }
    Ok(rep.finish(started))
}

/// Limiting case r = β: ‖Tf‖_{L^β(μ)} ≤ K‖f‖_{L^1(ν_{α−1})} on sampled multi-block f.
pub fn run_remark_strong_limit(
    op: &Operator,
    part: &BlockPartition,
    cfg: &InterpolationConfig,
    samples: usize,
    opts: &RunOpts,
) -> Result<ExperimentReport> {
    let started = Instant::now();
    let beta = cfg.beta;
    if beta < 1.0 {
        return Err(invalid("the limiting case needs beta >= 1"));
    }
    let (fpart, m) = family_partition(op, part)?;
    let mut rep = ExperimentReport::new(
        "remark_strong",
        serde_json::json!({"operator": op.name(), "config": cfg.describe(), "samples": samples}),
        opts.seed,
    );
    let rs = restricted_constants(ConstantKind::RestrictedStrong, op, part, 0..m, beta, cfg, &opts.sphere)?;
    let vals = rs.values();
    let ks: Vec<usize> = (0..m).collect();
    rep.tables.insert("restricted_strong".into(), constants_table(&ks, &[("C_beta", &vals)]));
    if !opts.tol.bounded(&vals) {
        rep.verdict("precondition", Status::Inconclusive, "restricted constants at r = beta show growth");
        return Ok(rep.finish(started));
    }
    rep.verdict("precondition", Status::Pass, "restricted constants at r = beta bounded");
    let s = slack(&mut rep, op, &fpart, cfg, beta, samples, 1.0, opts)?;
    slack_verdict(&mut rep, &s, 1.0, &opts.tol);
    rep.parameters["K"] = s.k.into();
    Ok(rep.finish(started))
}

/// One operator of the block-level interpolation suite.
pub struct SuiteCase {
    pub name: String,
    pub op: Operator,
    pub part: BlockPartition,
    pub cfg: InterpolationConfig,
}

/// Per block: C_r(k) ≤ K·W_p(k)^{1−θ}W_q(k)^θ with the ratio sequence bounded,
/// and W_r(k) ≤ C_r(k) (Markov).
pub fn run_interpolation_suite(cases: &[SuiteCase], k_max: usize, opts: &RunOpts) -> Result<ExperimentReport> {
    let started = Instant::now();
    let mut rep = ExperimentReport::new(
        "interpolation",
        serde_json::json!({"cases": cases.iter().map(|c| serde_json::json!({"name": c.name,
            "config": c.cfg.describe()})).collect::<Vec<_>>(), "k_max": k_max, "tolerances": opts.tol}),
        opts.seed,
    );
    for case in cases {
        let m = active_blocks(&case.op, &case.part).min(k_max + 1);
        let c = &case.cfg;
        let get = |kind, s| restricted_constants(kind, &case.op, &case.part, 0..m, s, c, &opts.sphere).map(|r| r.values());
        let strong = get(ConstantKind::RestrictedStrong, c.r)?;
        let weak_r = get(ConstantKind::RestrictedWeak, c.r)?;
        let wp = get(ConstantKind::RestrictedWeak, c.p)?;
        let wq = get(ConstantKind::RestrictedWeak, c.q)?;
        let ratio: Vec<f64> = (0..m)
            .map(|k| {
                let b = wp[k].powf(1.0 - c.theta) * wq[k].powf(c.theta);
                if strong[k] == 0.0 {
                    0.0
                } else {
                    strong[k] / b
                }
            })
            .collect();
        let ks: Vec<usize> = (0..m).collect();
        rep.tables.insert(
            case.name.clone(),
            constants_table(&ks, &[("strong_r", &strong), ("weak_r", &weak_r), ("weak_p", &wp), ("weak_q", &wq), ("ratio", &ratio)]),
        );
        let k = ratio.iter().copied().fold(0.0, f64::max);
        rep.parameters[format!("K_{}", case.name)] = k.into();
        rep.verdict(
            &format!("{}_interpolation", case.name),
            Status::from_bool(opts.tol.bounded(&ratio)),
            format!("K = {k:.6}"),
        );
        let markov = (0..m).all(|k| weak_r[k] <= strong[k] * (1.0 + opts.tol.markov));
        rep.verdict(&format!("{}_markov", case.name), Status::from_bool(markov), "weak <= strong per block");
    }
    Ok(rep.finish(started))
}

/// Block structure of a partition with its lacunarity checks.
pub fn run_sequence_report(part: &BlockPartition, seed: u64) -> Result<ExperimentReport> {
    let started = Instant::now();
    let mut rep = ExperimentReport::new("seq", serde_json::to_value(part).map_err(|e| invalid(e.to_string()))?, seed);
    let mut t = Table::new(&["k", "lambda", "block"]);
    for (i, &l) in part.seq().values().iter().enumerate() {
        t.push(vec![i as f64, l, part.block_of_index(i).expect("index in range") as f64]);
    }
    rep.tables.insert("sequence".into(), t);
    let mut b = Table::new(&["k", "lo", "hi", "endpoint"]);
    for (k, &(lo, hi)) in part.blocks().iter().enumerate() {
        b.push(vec![k as f64, lo as f64, hi as f64, part.endpoint(k)]);
    }
    rep.tables.insert("blocks".into(), b);
    let mut r = Table::new(&["k", "ratio"]);
    part.ratios().iter().enumerate().for_each(|(k, &x)| r.push(vec![(k + 1) as f64, x]));
    rep.tables.insert("ratios".into(), r);
    rep.verdict(
        "quasi_lacunary",
        Status::Pass,
        format!("endpoint ratios exceed q = {} from block {} on", part.q(), part.onset_index()),
    );
    if let Some(qp) = part.q_prime() {
        let (ok, bad) = check_subgeometric(part, qp);
        let detail = match bad {
            None => format!("endpoint ratios stay <= {qp}"),
            Some(k) => format!("ratio into block {} exceeds {qp}", k + 1),
        };
        rep.verdict("subgeometric", Status::from_bool(ok), detail);
    }
    Ok(rep.finish(started))
}

/// Moments of μ at pλ_k in closed form against quadrature, the B or A
/// condition and M_{x^{αβ}} membership, and optionally the L^p(μ) norm of
/// Σ a_k t^{λ_k}.
pub fn run_norm_report(
    part: &BlockPartition,
    mu: &Measure,
    p: f64,
    alpha: f64,
    beta: f64,
    coefficients: Option<&[f64]>,
    seed: u64,
) -> Result<ExperimentReport> {
    let started = Instant::now();
    let mut rep = ExperimentReport::new(
        "norm",
        serde_json::json!({"mu": mu.describe(), "p": p, "alpha": alpha, "beta": beta}),
        seed,
    );
    let mut t = Table::new(&["k", "lambda", "closed_form", "quadrature", "rel_err"]);
    let mut worst = 0.0f64;
    for (k, &l) in part.seq().values().iter().enumerate() {
        let (c, q) = (mu.moment(p * l)?, mu.moment_quadrature(p * l)?);
        let err = if c == q { 0.0 } else { ((q - c) / c).abs() };
        worst = worst.max(err);
        t.push(vec![k as f64, l, c, q, err]);
    }
    rep.tables.insert("moments".into(), t);
    rep.verdict("moment_oracle", Status::from_bool(worst <= 1e-9), format!("max relative error {worst:.3e}"));

    let cond = if beta >= 1.0 {
        check_b_condition(mu, p, part, alpha, beta)?
    } else {
        check_a_condition(mu, p, part, alpha, beta)?
    };
    let ks: Vec<usize> = cond.rows.iter().map(|r| r.k).collect();
    let lam: Vec<f64> = cond.rows.iter().map(|r| r.lambda_nk).collect();
    rep.tables.insert(
        "condition".into(),
        constants_table(&ks, &[("lambda_nk", &lam), ("value", &cond.values()), ("partial_sum", &cond.partial_sums)]),
    );
    rep.parameters["condition"] = serde_json::json!({"kind": cond.condition, "holds": cond.verdict_tail,
        "sup": cond.sup, "sum": cond.sum, "compact": cond.compact});
    let mx = check_mx_gamma(mu, alpha * beta, &default_eps_grid())?;
    rep.parameters["mx"] = serde_json::json!({"gamma": mx.gamma, "constant": mx.constant, "holds": mx.verdict});

    if let Some(a) = coefficients {
        let v = part.seq().values();
        if a.len() > v.len() {
            return Err(invalid("more coefficients than exponents"));
        }
        let f = crate::muntz_poly::MuntzPolynomial::new(v.iter().copied().zip(a.iter().copied()).collect())?;
        let norm = crate::measures::lp_norm(&f, p, mu)?;
        let bound: f64 = f
            .terms()
            .iter()
            .map(|&(l, c)| crate::measures::lp_norm(&crate::muntz_poly::MuntzPolynomial::monomial(l, c)?, p, mu))
            .sum::<Result<f64>>()?;
        rep.parameters["norm"] = norm.into();
        if p >= 1.0 {
            rep.verdict(
                "triangle",
                Status::from_bool(norm <= bound * (1.0 + 1e-12)),
                format!("{norm:.6e} <= {bound:.6e}"),
            );
        }
    }
    Ok(rep.finish(started))
}

/// Restricted constants of one kind over the active blocks, or the sampled
/// global lower bound.
pub fn run_typeconst_report(
    kind: ConstantKind,
    op: &Operator,
    part: &BlockPartition,
    cfg: &InterpolationConfig,
    s: f64,
    k_max: usize,
    family_size: usize,
    opts: &RunOpts,
) -> Result<ExperimentReport> {
    let started = Instant::now();
    let (fpart, m) = family_partition(op, part)?;
    let m = m.min(k_max + 1);
    let mut rep = ExperimentReport::new(
        "typeconst",
        serde_json::json!({"operator": op.name(), "kind": kind, "s": s, "alpha": cfg.alpha, "beta": cfg.beta,
            "mu": cfg.mu.describe(), "k_max": k_max}),
        opts.seed,
    );
    if kind == ConstantKind::GlobalStrongLower {
        let fam = default_family(&fpart, s, cfg, family_size, opts.seed)?;
        let ratios = family_ratios(op, s, cfg, &fam, opts.exec)?;
        let lower = ratios.iter().copied().fold(0.0, f64::max);
        let mut t = Table::new(&["member", "ratio"]);
        ratios.iter().enumerate().for_each(|(i, &v)| t.push(vec![i as f64, v]));
        rep.tables.insert("family".into(), t);
        rep.parameters["lower_bound"] = lower.into();
        rep.verdict("finite", Status::from_bool(lower.is_finite()), format!("C_s >= {lower:.6e}"));
        return Ok(rep.finish(started));
    }
    let tc = restricted_constants(kind, op, part, 0..m, s, cfg, &opts.sphere)?;
    let vals = tc.values();
    let ks: Vec<usize> = (0..m).collect();
    rep.tables.insert("constants".into(), constants_table(&ks, &[("C", &vals)]));
    let bounded = opts.tol.bounded(&vals);
    rep.parameters["report"] = serde_json::to_value(&tc).map_err(|e| invalid(e.to_string()))?;
    rep.verdict(
        "bounded",
        if bounded { Status::Pass } else { Status::Inconclusive },
        format!("sup {:.6e}; growth trend: {}", tc.sup, !bounded),
    );
    Ok(rep.finish(started))
}

/// λ_k = 2^k, k < count, in singleton blocks.
pub fn dyadic_partition(count: usize) -> Result<BlockPartition> {
    BlockPartition::lacunary(&make_geometric(1.0, 2.0, count)?, 1.5)
}

/// Exponents beyond the last row that hold the truncated kernel tails.
pub const EXAMPLE_TAIL: usize = 220;

/// The infinite-kernel supercritical example with β = 1/2, α = 1, γ = αβ,
/// p = 3/2, q = 5/2, r = 2 and ε_k = 1/((k+2)ln²(k+2)), acting on `rows` blocks.
pub fn example_supercritical_case(rows: usize) -> Result<SuiteCase> {
    use crate::operators::{default_eps, make_example_supercritical, SupercriticalExample};
    let (p, q, r, alpha, beta) = (1.5, 2.5, 2.0, 1.0, 0.5);
    let gamma = alpha * beta;
    let part = dyadic_partition(rows + EXAMPLE_TAIL)?;
    let mut ex = SupercriticalExample::new(p, beta, gamma, rows);
    ex.norm_exponent = q;
    let op = make_example_supercritical(&part, &ex, &default_eps(part.seq().len()))?;
    let cfg = InterpolationConfig::new(p, q, r, alpha, beta, Measure::jacobi(gamma)?)?;
    Ok(SuiteCase { name: "example_supercritical".into(), op: op.into(), part, cfg })
}

/// Identity, dilation, subcritical counterexample, supercritical example and
/// a weighted diagonal, each with the exponents it is designed for.
pub fn default_suite(k_max: usize) -> Result<Vec<SuiteCase>> {
    use crate::operators::{default_dilation, diagonal, identity};
    let part = dyadic_partition(k_max + 1)?;
    let seq = part.seq().clone();
    let lebesgue = || InterpolationConfig::new(1.5, 4.0, 2.0, 1.0, 1.0, Measure::lebesgue());
    let sub = CounterexampleParams { r: 2.0, alpha: 1.0, beta: 1.0, gamma: 1.0, eps: 0.2, eta: 0.0 };
    let (gamma, r) = (1.5, 2.0);
    let weights: Vec<f64> = seq.values().iter().map(|l| l.powf((gamma - 1.0) / r)).collect();
    Ok(vec![
        SuiteCase { name: "identity".into(), op: identity(&seq).into(), part: part.clone(), cfg: lebesgue()? },
        SuiteCase {
            name: "dilation".into(),
            op: default_dilation(40, 1.0, 1.5)?.into(),
            part: part.clone(),
            cfg: lebesgue()?,
        },
        SuiteCase {
            name: "subcritical_counterexample".into(),
            op: make_counterexample_subcritical(&part, sub)?.into(),
            part: part.clone(),
            cfg: lebesgue()?,
        },
        example_supercritical_case(k_max + 1)?,
        SuiteCase {
            name: "diagonal".into(),
            op: diagonal(&seq, &weights)?.into(),
            part,
            cfg: InterpolationConfig::new(1.5, 4.0, r, 1.0, 1.0, Measure::jacobi(gamma)?)?,
        },
    ])
}
