//! Positive measures on [0,1]: a Jacobi weight (1−t)^{γ−1}dt or a general
//! density, plus point masses.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exponents::BlockPartition;
use crate::muntz_poly::{grid_x_min, u_grid, MuntzPolynomial};
use crate::quadrature::{integrate, panels, Abscissa, QuadOpts, Segment};
use crate::special::{jacobi_moment, ln_beta};
use crate::trend::{bounded_trend, geometric_tail, tends_to_zero};

pub type DensityFn = dyn Fn(Abscissa) -> f64 + Send + Sync;

#[derive(Clone)]
pub struct Density {
    pub f: Arc<DensityFn>,
    /// h such that the density behaves like (1−t)^{h−1} at t = 1.
    pub singular_exponent: Option<f64>,
}

#[derive(Clone, Default)]
pub struct Measure {
    jacobi_gamma: Option<f64>,
    density: Option<Density>,
    /// (location, mass); the location is kept as a (t, 1−t) pair.
    atoms: Vec<(Abscissa, f64)>,
}

impl fmt::Debug for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serde_json::to_string(&self.describe()).unwrap_or_default())
    }
}

/// Declarative form used by configs and reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MeasureSpec {
    Jacobi { gamma: f64 },
    Atom { location: f64, mass: f64 },
    Mixture { gamma: Option<f64>, atoms: Vec<(f64, f64)> },
    Zero,
}

impl MeasureSpec {
    pub fn build(&self) -> Result<Measure> {
        match self {
            MeasureSpec::Jacobi { gamma } => Measure::jacobi(*gamma),
            MeasureSpec::Atom { location, mass } => Measure::zero().with_atom(*location, *mass),
            MeasureSpec::Mixture { gamma, atoms } => {
                let mut m = match gamma {
                    Some(g) => Measure::jacobi(*g)?,
                    None => Measure::zero(),
                };
                for &(l, w) in atoms {
                    m = m.with_atom(l, w)?;
                }
                Ok(m)
            }
            MeasureSpec::Zero => Ok(Measure::zero()),
        }
    }
}

type Weight<'a> = Box<dyn Fn(Abscissa) -> f64 + 'a>;

impl Measure {
    pub fn zero() -> Self {
        Measure::default()
    }

    pub fn lebesgue() -> Self {
        Measure { jacobi_gamma: Some(1.0), ..Measure::default() }
    }

    pub fn jacobi(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(invalid("Jacobi exponent must be positive"));
        }
        Ok(Measure { jacobi_gamma: Some(gamma), ..Measure::default() })
    }

    pub fn atom(location: f64, mass: f64) -> Result<Self> {
        Measure::zero().with_atom(location, mass)
    }

    pub fn density<F>(f: F, singular_exponent: Option<f64>) -> Result<Self>
    where
        F: Fn(Abscissa) -> f64 + Send + Sync + 'static,
    {
        if singular_exponent.is_some_and(|h| !(h > 0.0)) {
            return Err(invalid("singular exponent hint must be positive"));
        }
        Ok(Measure {
            density: Some(Density { f: Arc::new(f), singular_exponent }),
            ..Measure::default()
        })
    }

    pub fn with_atom(mut self, location: f64, mass: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&location) || !(mass > 0.0 && mass.is_finite()) {
            return Err(invalid("atoms need a location in [0,1] and positive mass"));
        }
        self.atoms.push((Abscissa::from_t(location), mass));
        Ok(self)
    }

    /// Atom at 1 − x, placed without rounding the distance to 1.
    pub fn with_atom_near_one(mut self, x: f64, mass: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) || !(mass > 0.0) {
            return Err(invalid("atoms need a location in [0,1] and positive mass"));
        }
        self.atoms.push((Abscissa::from_x(x), mass));
        Ok(self)
    }

    pub fn jacobi_gamma(&self) -> Option<f64> {
        self.jacobi_gamma
    }

    pub fn atoms(&self) -> Vec<(f64, f64)> {
        self.atoms.iter().map(|(a, m)| (a.t, *m)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.jacobi_gamma.is_none() && self.density.is_none() && self.atoms.is_empty()
    }

    pub fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "jacobi_gamma": self.jacobi_gamma,
            "density": self.density.as_ref().map(|d| serde_json::json!({
                "singular_exponent": d.singular_exponent
            })),
            "atoms": self.atoms(),
        })
    }

    /// Weight of the absolutely continuous part and the exponent used to
    /// flatten its endpoint behaviour.
    fn continuous(&self) -> Option<(Weight<'_>, f64)> {
        if let Some(g) = self.jacobi_gamma {
            let w: Box<dyn Fn(Abscissa) -> f64> =
                if g == 1.0 { Box::new(|_| 1.0) } else { Box::new(move |a: Abscissa| a.x.powf(g - 1.0)) };
            Some((w, g))
        } else {
            self.density
                .as_ref()
                .map(|d| (Box::new(|a: Abscissa| (d.f)(a)) as Box<dyn Fn(Abscissa) -> f64>, d.singular_exponent.unwrap_or(1.0)))
        }
    }

    /// μ({t ∈ [a, b]}).
    pub fn interval_mass(&self, a: Abscissa, b: Abscissa) -> Result<f64> {
        let mut total = 0.0;
        if a.t > b.t {
            return Ok(0.0);
        }
        if let Some(g) = self.jacobi_gamma {
            total += (a.x.powf(g) - b.x.powf(g)) / g;
        } else if let Some((w, h)) = self.continuous() {
            let segs: Vec<Segment> = panels(1.0, h).iter().filter_map(|s| s.clip(a, b)).collect();
            total += integrate(&w, &segs, &QuadOpts::default())?.value;
        }
        for (loc, m) in &self.atoms {
            let inside = if loc.t <= 0.5 { loc.t >= a.t && loc.t <= b.t } else { loc.x <= a.x && loc.x >= b.x };
            if inside {
                total += m;
            }
        }
        Ok(total)
    }

    pub fn total_mass(&self) -> Result<f64> {
        self.moment(0.0)
    }

    pub fn moment(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("moment order {s} is negative")));
        }
        let cont = match self.jacobi_gamma {
            Some(g) => jacobi_moment(s, g),
            None => self.continuous_moment_quadrature(s)?,
        };
        Ok(cont + self.atom_moment(s))
    }

    /// Same as [`Measure::moment`] but integrates the Jacobi part numerically.
    pub fn moment_quadrature(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("moment order {s} is negative")));
        }
        Ok(self.continuous_moment_quadrature(s)? + self.atom_moment(s))
    }

    fn atom_moment(&self, s: f64) -> f64 {
        self.atoms.iter().map(|(a, m)| m * if s == 0.0 { 1.0 } else { (s * a.ln_t()).exp() }).sum()
    }

    fn continuous_moment_quadrature(&self, s: f64) -> Result<f64> {
        let Some((w, h)) = self.continuous() else { return Ok(0.0) };
        let f = |a: Abscissa| if s == 0.0 { w(a) } else { (s * a.ln_t()).exp() * w(a) };
        Ok(integrate(f, &panels(s, h), &QuadOpts::default())?.value)
    }

    /// ∫|f|^p dμ.
    pub fn integral_pow(&self, f: &MuntzPolynomial, p: f64) -> Result<f64> {
        if !(p > 0.0) {
            return Err(Error::Domain(format!("exponent p = {p} must be positive")));
        }
        if f.is_zero() {
            return Ok(0.0);
        }
        let mut total = 0.0;
        if let Some((w, h)) = self.continuous() {
            let g = |a: Abscissa| {
                let v = f.eval_at(a).abs();
                if v == 0.0 {
                    0.0
                } else {
                    v.powf(p) * w(a)
                }
            };
            total += integrate(g, &panels(p * f.max_exponent(), h), &QuadOpts::default())?.value;
        }
        for (a, m) in &self.atoms {
            total += m * f.eval_at(*a).abs().powf(p);
        }
        Ok(total)
    }
}

pub fn moment(mu: &Measure, s: f64) -> Result<f64> {
    mu.moment(s)
}

/// (∫|f|^p dμ)^{1/p} by quadrature.
pub fn lp_norm(f: &MuntzPolynomial, p: f64, mu: &Measure) -> Result<f64> {
    Ok(mu.integral_pow(f, p)?.powf(1.0 / p))
}

/// Closed form ‖a·t^λ‖ in L^p((1−t)^{γ−1}dt).
pub fn monomial_lp_norm(lambda: f64, a: f64, p: f64, gamma: f64) -> f64 {
    a.abs() * (ln_beta(p * lambda + 1.0, gamma) / p).exp()
}

#[derive(Clone, Copy, Debug)]
pub struct DistributionOpts {
    pub per_side: usize,
    pub t_min: f64,
}

impl Default for DistributionOpts {
    fn default() -> Self {
        DistributionOpts { per_side: 2048, t_min: 2f64.powi(-100) }
    }
}

/// Bisects a sign change of `g` between parameters `a` (where `ga` holds) and `b`.
fn bisect<G: Fn(f64) -> bool>(g: G, mut a: f64, mut b: f64) -> f64 {
    let ga = g(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if !(m != a && m != b) || (b - a).abs() <= 1e-13 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if g(m) == ga {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// μ({t : |f(t)| > level}).
pub fn distribution(f: &MuntzPolynomial, mu: &Measure, level: f64) -> Result<f64> {
    distribution_with(f, mu, level, &DistributionOpts::default())
}

/// Superlevel set {|f| > level} as closed t-intervals.
pub fn superlevel_set(f: &MuntzPolynomial, level: f64, opts: &DistributionOpts) -> Vec<(Abscissa, Abscissa)> {
    LevelGrid::new(f, opts).superlevel_set(level)
}

/// |f| sampled once on the log grid, for repeated superlevel queries.
pub struct LevelGrid<'a> {
    f: &'a MuntzPolynomial,
    x_min: f64,
    grid: Vec<f64>,
    vals: Vec<f64>,
    end_val: f64,
}

impl<'a> LevelGrid<'a> {
    pub fn new(f: &'a MuntzPolynomial, opts: &DistributionOpts) -> Self {
        if f.is_zero() {
            return LevelGrid { f, x_min: 0.0, grid: Vec::new(), vals: Vec::new(), end_val: 0.0 };
        }
        let x_min = grid_x_min(f.max_exponent());
        let grid = u_grid(opts.per_side, opts.t_min, x_min);
        let vals = grid.iter().map(|&u| f.eval_at(Abscissa::from_u(u)).abs()).collect();
        LevelGrid { f, x_min, grid, vals, end_val: f.coefficient_sum().abs() }
    }

    /// Largest sampled value of |f|, including t = 1.
    pub fn sampled_max(&self) -> f64 {
        self.vals.iter().copied().fold(self.end_val, f64::max)
    }

    pub fn superlevel_set(&self, level: f64) -> Vec<(Abscissa, Abscissa)> {
        if self.grid.is_empty() {
            return Vec::new();
        }
        let f = self.f;
        let grid = &self.grid;
        let above_u = |u: f64| f.eval_at(Abscissa::from_u(u)).abs() > level;
        // Final stretch 1 − t ∈ [0, x_min] is parametrised linearly in x.
        let above_x = |x: f64| f.eval_at(Abscissa::from_x(x)).abs() > level;
        let flags: Vec<bool> = self.vals.iter().map(|&v| v > level).collect();
        let end_flag = self.end_val > level;

        let mut out = Vec::new();
        let mut start: Option<Abscissa> = flags[0].then(|| Abscissa::from_t(0.0));
        for i in 1..grid.len() {
            if flags[i] != flags[i - 1] {
                let u = bisect(above_u, grid[i - 1], grid[i]);
                let cross = Abscissa::from_u(u);
                if flags[i] {
                    start = Some(cross);
                } else if let Some(s) = start.take() {
                    out.push((s, cross));
                }
            }
        }
        let last = *flags.last().unwrap();
        if last != end_flag {
            let x = bisect(above_x, self.x_min, 0.0);
            let cross = Abscissa::from_x(x);
            if end_flag {
                start = Some(cross);
            } else if let Some(s) = start.take() {
                out.push((s, cross));
            }
        }
        if let Some(s) = start {
            out.push((s, Abscissa::from_x(0.0)));
        }
        out
    }

    /// μ({|f| > level}).
    pub fn distribution(&self, mu: &Measure, level: f64) -> Result<f64> {
        if !(level > 0.0) {
            return Err(Error::Domain(format!("level {level} must be positive")));
        }
        self.superlevel_set(level).into_iter().try_fold(0.0, |acc, (a, b)| Ok(acc + mu.interval_mass(a, b)?))
    }
}

pub fn distribution_with(f: &MuntzPolynomial, mu: &Measure, level: f64, opts: &DistributionOpts) -> Result<f64> {
    LevelGrid::new(f, opts).distribution(mu, level)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MxReport {
    pub gamma: f64,
    pub eps: Vec<f64>,
    pub ratios: Vec<f64>,
    pub constant: f64,
    pub verdict: bool,
}

pub fn default_eps_grid() -> Vec<f64> {
    (1..=30).map(|j| 2f64.powi(-j)).collect()
}

/// Max over the grid of μ([1−ε,1])/ε^γ. The verdict needs a finite maximum,
/// the two smallest-ε ratios within a factor 10 of each other, and no growth
/// trend as ε shrinks.
pub fn check_mx_gamma(mu: &Measure, gamma: f64, eps_grid: &[f64]) -> Result<MxReport> {
    if eps_grid.is_empty() || eps_grid.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
        return Err(invalid("eps grid must be nonempty with values in (0,1)"));
    }
    if !(gamma > 0.0) {
        return Err(invalid("gamma must be positive"));
    }
    let mut eps = eps_grid.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    let ratios = eps
        .iter()
        .map(|&e| Ok(mu.interval_mass(Abscissa::from_x(e), Abscissa::from_x(0.0))? / e.powf(gamma)))
        .collect::<Result<Vec<f64>>>()?;
    let constant = ratios.iter().copied().fold(0.0, f64::max);
    let n = ratios.len();
    let stable = n < 2 || {
        let (a, b) = (ratios[n - 2], ratios[n - 1]);
        (a == 0.0 && b == 0.0) || (a > 0.0 && b > 0.0 && (a / b).max(b / a) < 10.0)
    };
    let verdict = constant.is_finite() && stable && bounded_trend(&ratios);
    Ok(MxReport { gamma, eps, ratios, constant, verdict })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    B,
    A,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentRow {
    pub k: usize,
    pub lambda_nk: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport {
    pub condition: Condition,
    pub p: f64,
    pub alpha: f64,
    pub beta: f64,
    pub rows: Vec<MomentRow>,
    /// Running sums of the values (the A-condition series).
    pub partial_sums: Vec<f64>,
    pub sup: f64,
    pub sum: f64,
    /// Verdict over every stored block.
    pub verdict: bool,
    /// Verdict over blocks from max(onset, K/2) on.
    pub verdict_tail: bool,
    /// Values trend to zero.
    pub compact: bool,
}

impl MomentReport {
    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }
}

fn moment_rows<F: Fn(f64, f64) -> f64>(mu: &Measure, p: f64, part: &BlockPartition, term: F) -> Result<Vec<MomentRow>> {
    (0..part.n_blocks())
        .map(|k| {
            let l = part.endpoint(k);
            Ok(MomentRow { k, lambda_nk: l, value: term(l, mu.moment(p * l)?) })
        })
        .collect()
}

fn tail_start(part: &BlockPartition) -> usize {
    part.onset_index().max(part.n_blocks() / 2)
}

fn finish(condition: Condition, p: f64, alpha: f64, beta: f64, rows: Vec<MomentRow>, tail: usize) -> MomentReport {
    let values: Vec<f64> = rows.iter().map(|r| r.value).collect();
    let partial_sums: Vec<f64> = values
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect();
    let sup = values.iter().copied().fold(0.0, f64::max);
    let sum = partial_sums.last().copied().unwrap_or(0.0);
    let test = |v: &[f64]| match condition {
        Condition::B => bounded_trend(v),
        Condition::A => geometric_tail(v),
    };
    let tail = tail.min(values.len().saturating_sub(1));
    MomentReport {
        condition,
        p,
        alpha,
        beta,
        verdict: sup.is_finite() && test(&values),
        verdict_tail: test(&values[tail..]) || (condition == Condition::A && test(&values)),
        compact: tends_to_zero(&values),
        rows,
        partial_sums,
        sup,
        sum,
    }
}

/// λ_{n_k}^{αβ}·∫t^{pλ_{n_k}}dμ over the block endpoints; bounded ⇔ condition holds.
pub fn check_b_condition(mu: &Measure, p: f64, part: &BlockPartition, alpha: f64, beta: f64) -> Result<MomentReport> {
    if !(p > 0.0 && alpha > 0.0 && beta >= 1.0) {
        return Err(invalid("B condition needs p > 0, alpha > 0, beta >= 1"));
    }
    let ab = alpha * beta;
    let rows = moment_rows(mu, p, part, |l, m| if m == 0.0 { 0.0 } else { (ab * l.ln() + m.ln()).exp() })?;
    Ok(finish(Condition::B, p, alpha, beta, rows, tail_start(part)))
}

/// Terms λ_{n_k}^{αβ/(1−β)}·(∫t^{pλ_{n_k}}dμ)^{1/(1−β)}; summable ⇔ condition holds.
pub fn check_a_condition(mu: &Measure, p: f64, part: &BlockPartition, alpha: f64, beta: f64) -> Result<MomentReport> {
    if !(p > 0.0 && alpha > 0.0 && beta > 0.0 && beta < 1.0) {
        return Err(invalid("A condition needs p > 0, alpha > 0, 0 < beta < 1"));
    }
    let e = 1.0 / (1.0 - beta);
    let ab = alpha * beta;
    let rows = moment_rows(mu, p, part, |l, m| if m == 0.0 { 0.0 } else { (e * (ab * l.ln() + m.ln())).exp() })?;
    Ok(finish(Condition::A, p, alpha, beta, rows, tail_start(part)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::make_geometric;
    use crate::special::ln_gamma;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn poly(terms: &[(f64, f64)]) -> MuntzPolynomial {
        MuntzPolynomial::new(terms.to_vec()).unwrap()
    }

    fn lacunary(count: usize) -> BlockPartition {
        BlockPartition::lacunary(&make_geometric(1.0, 2.0, count).unwrap(), 1.5).unwrap()
    }

    #[test]
    fn moment_examples() {
        assert!(rel(Measure::lebesgue().moment(2.0).unwrap(), 1.0 / 3.0) < 1e-14);
        assert!(rel(Measure::jacobi(2.0).unwrap().moment(3.0).unwrap(), 0.05) < 1e-14);
        let a = Measure::atom(1.0, 1.0).unwrap();
        for s in [0.0, 1.0, 1e9] {
            assert_eq!(a.moment(s).unwrap(), 1.0);
        }
        assert!(matches!(a.moment(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn density_moment_by_quadrature() {
        // Density 2t on [0,1]: ∫t^s·2t dt = 2/(s+2).
        let mu = Measure::density(|a| 2.0 * a.t, None).unwrap();
        for s in [0.0, 1.0, 100.0, 1e8] {
            assert!(rel(mu.moment(s).unwrap(), 2.0 / (s + 2.0)) < 1e-10);
        }
        // Density with a hinted (1−t)^{−1/2} singularity.
        let mu = Measure::density(|a| a.x.powf(-0.5), Some(0.5)).unwrap();
        assert!(rel(mu.moment(1e6).unwrap(), 0.001772453186235668119940666563667979164969) < 1e-10);
    }

    #[test]
    fn moment_routes_agree() {
        for g in [0.5, 1.0, 2.0] {
            let mu = Measure::jacobi(g).unwrap();
            for s in [0.0, 1.0, 10.0, 1e3, 1e6, 2f64.powi(60)] {
                let a = mu.moment(s).unwrap();
                let b = mu.moment_quadrature(s).unwrap();
                assert!(rel(b, a) < 1e-10, "gamma={g} s={s}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn lp_norm_examples() {
        let n = lp_norm(&poly(&[(1.0, 1.0)]), 2.0, &Measure::lebesgue()).unwrap();
        assert!(rel(n, (1.0f64 / 3.0).sqrt()) < 1e-12);
        assert_eq!(lp_norm(&MuntzPolynomial::zero(), 2.0, &Measure::lebesgue()).unwrap(), 0.0);
        assert!(lp_norm(&poly(&[(1.0, 1.0)]), 0.0, &Measure::lebesgue()).is_err());
        let mu = Measure::jacobi(0.5).unwrap();
        let q = lp_norm(&poly(&[(1e4, 1.0)]), 2.0, &mu).unwrap();
        assert!(rel(q, monomial_lp_norm(1e4, 1.0, 2.0, 0.5)) < 1e-9);
    }

    #[test]
    fn lp_norm_with_atoms() {
        let mu = Measure::lebesgue().with_atom(0.5, 2.0).unwrap();
        let f = poly(&[(1.0, 1.0)]);
        let want = (1.0 / 3.0 + 2.0 * 0.25f64).sqrt();
        assert!(rel(lp_norm(&f, 2.0, &mu).unwrap(), want) < 1e-12);
    }

    #[test]
    fn distribution_examples() {
        let f = poly(&[(1.0, 1.0)]);
        assert!((distribution(&f, &Measure::lebesgue(), 0.25).unwrap() - 0.75).abs() < 1e-12);
        let d = distribution(&f, &Measure::jacobi(2.0).unwrap(), 0.5).unwrap();
        assert!((d - 0.125).abs() < 1e-12);
        assert_eq!(distribution(&f, &Measure::lebesgue(), 1.5).unwrap(), 0.0);
    }

    #[test]
    fn distribution_of_interior_bump() {
        // t^λ − t^{2λ} > 3/16 ⇔ t^λ ∈ (1/4, 3/4).
        let l = 1e5;
        let f = poly(&[(l, 1.0), (2.0 * l, -1.0)]);
        let want = 0.75f64.powf(1.0 / l) - 0.25f64.powf(1.0 / l);
        let got = distribution(&f, &Measure::lebesgue(), 3.0 / 16.0).unwrap();
        assert!(rel(got, want) < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn density_interval_mass() {
        let mu = Measure::density(|_| 1.0, None).unwrap();
        let m = mu.interval_mass(Abscissa::from_t(0.25), Abscissa::from_x(0.0)).unwrap();
        assert!((m - 0.75).abs() < 1e-13);
    }

    #[test]
    fn mx_examples() {
        for g in [0.5, 1.0, 2.5] {
            let r = check_mx_gamma(&Measure::jacobi(g).unwrap(), g, &default_eps_grid()).unwrap();
            assert!(r.verdict && (r.constant - 1.0 / g).abs() < 1e-12);
        }
        let r = check_mx_gamma(&Measure::atom(1.0, 1.0).unwrap(), 1.0, &default_eps_grid()).unwrap();
        assert!(!r.verdict);
        assert!(check_mx_gamma(&Measure::lebesgue(), 1.0, &[]).is_err());
    }

    #[test]
    fn b_condition_examples() {
        let part = lacunary(40);
        let (alpha, beta, p) = (1.0, 1.0, 2.0);
        let r = check_b_condition(&Measure::jacobi(alpha * beta).unwrap(), p, &part, alpha, beta).unwrap();
        assert!(r.verdict && r.verdict_tail && !r.compact);
        let limit = ln_gamma(alpha * beta).exp() / p.powf(alpha * beta);
        assert!(rel(*r.values().last().unwrap(), limit) < 1e-9);

        let r = check_b_condition(&Measure::atom(1.0, 1.0).unwrap(), p, &part, alpha, beta).unwrap();
        assert!(!r.verdict);

        let r = check_b_condition(&Measure::jacobi(1.5).unwrap(), p, &part, alpha, beta).unwrap();
        assert!(r.verdict && r.compact);
    }

    #[test]
    fn a_condition_examples() {
        let part = lacunary(40);
        let (alpha, beta, p) = (1.0, 0.5, 1.0);
        let r = check_a_condition(&Measure::jacobi(alpha * beta + 0.5).unwrap(), p, &part, alpha, beta).unwrap();
        assert!(r.verdict && r.sum.is_finite());
        let r = check_a_condition(&Measure::atom(1.0, 1.0).unwrap(), p, &part, alpha, beta).unwrap();
        assert!(!r.verdict);
        let r = check_a_condition(&Measure::zero(), p, &part, alpha, beta).unwrap();
        assert!(r.verdict && r.sum == 0.0);
        let r = check_a_condition(&Measure::jacobi(alpha * beta).unwrap(), p, &part, alpha, beta).unwrap();
        assert!(!r.verdict);
    }

    #[test]
    fn spec_round_trip() {
        let s: MeasureSpec = serde_json::from_str(r#"{"kind":"mixture","gamma":0.5,"atoms":[[1.0,2.0]]}"#).unwrap();
        let m = s.build().unwrap();
        assert_eq!(m.jacobi_gamma(), Some(0.5));
        assert_eq!(m.atoms(), vec![(1.0, 2.0)]);
    }

    fn arb_poly() -> impl Strategy<Value = MuntzPolynomial> {
        prop::collection::vec((0u32..24, -3.0f64..3.0), 1..6).prop_map(|v| {
            MuntzPolynomial::new(v.into_iter().map(|(e, a)| (2f64.powi(e as i32), a)).collect()).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn markov_inequality(f in arb_poly(), p in 1.0f64..4.0, frac in 0.01f64..0.99) {
            prop_assume!(!f.is_zero());
            let mu = Measure::jacobi(0.5).unwrap();
            let level = frac * crate::muntz_poly::sup_norm(&f);
            let d = distribution(&f, &mu, level).unwrap();
            let n = mu.integral_pow(&f, p).unwrap();
            prop_assert!(level.powf(p) * d <= n * (1.0 + 1e-9));
        }
    }
}
