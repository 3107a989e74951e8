//! Müntz polynomials Σ a_k t^{λ_k} with exponents up to ~2^100.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exponents::BlockPartition;
use crate::quadrature::Abscissa;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct MuntzPolynomial {
    /// (λ, a) pairs, λ strictly increasing, a ≠ 0.
    terms: Vec<(f64, f64)>,
}

impl TryFrom<Vec<(f64, f64)>> for MuntzPolynomial {
    type Error = Error;
    fn try_from(terms: Vec<(f64, f64)>) -> Result<Self> {
        MuntzPolynomial::new(terms)
    }
}

impl From<MuntzPolynomial> for Vec<(f64, f64)> {
    fn from(p: MuntzPolynomial) -> Self {
        p.terms
    }
}

impl MuntzPolynomial {
    /// Sorts the terms, merges equal exponents and drops zero coefficients.
    pub fn new(mut terms: Vec<(f64, f64)>) -> Result<Self> {
        if terms.iter().any(|&(l, a)| !(l.is_finite() && l > 0.0) || !a.is_finite()) {
            return Err(invalid("exponents must be positive and coefficients finite"));
        }
        terms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(terms.len());
        for (l, a) in terms {
            match out.last_mut() {
                Some(last) if last.0 == l => last.1 += a,
                _ => out.push((l, a)),
            }
        }
        out.retain(|&(_, a)| a != 0.0);
        Ok(MuntzPolynomial { terms: out })
    }

    pub fn zero() -> Self {
        MuntzPolynomial::default()
    }

    pub fn monomial(lambda: f64, a: f64) -> Result<Self> {
        MuntzPolynomial::new(vec![(lambda, a)])
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_exponent(&self) -> f64 {
        self.terms.last().map_or(0.0, |t| t.0)
    }

    pub fn coefficient_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.1).sum()
    }

    pub fn scale(&self, c: f64) -> MuntzPolynomial {
        if c == 0.0 {
            return MuntzPolynomial::zero();
        }
        MuntzPolynomial { terms: self.terms.iter().map(|&(l, a)| (l, c * a)).collect() }
    }

    pub fn add(&self, other: &MuntzPolynomial) -> MuntzPolynomial {
        let mut all = self.terms.clone();
        all.extend_from_slice(&other.terms);
        MuntzPolynomial::new(all).expect("terms already validated")
    }

    /// Value at a point given as a (t, 1−t) pair.
    pub fn eval_at(&self, a: Abscissa) -> f64 {
        if a.t <= 0.0 {
            return 0.0;
        }
        if a.x <= 0.0 {
            return self.coefficient_sum();
        }
        let lt = a.ln_t();
        self.terms.iter().map(|&(l, c)| c * (l * lt).exp()).sum()
    }
}

pub fn evaluate(f: &MuntzPolynomial, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("t = {t} lies outside [0,1]")));
    }
    Ok(f.eval_at(Abscissa::from_t(t)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockPolynomial {
    pub block_index: usize,
    pub poly: MuntzPolynomial,
}

/// Splits f into its block components, in block order; empty blocks are omitted.
pub fn block_decompose(f: &MuntzPolynomial, part: &BlockPartition) -> Result<Vec<BlockPolynomial>> {
    let mut grouped: Vec<(usize, Vec<(f64, f64)>)> = Vec::new();
    for &(l, a) in f.terms() {
        let i = part.seq().index_of(l).ok_or(Error::UnknownExponent(l))?;
        let k = part.block_of_index(i).ok_or(Error::UnknownExponent(l))?;
        match grouped.last_mut() {
            Some((kk, terms)) if *kk == k => terms.push((l, a)),
            _ => grouped.push((k, vec![(l, a)])),
        }
    }
    grouped
        .into_iter()
        .map(|(k, terms)| Ok(BlockPolynomial { block_index: k, poly: MuntzPolynomial::new(terms)? }))
        .collect()
}

impl BlockPolynomial {
    pub fn new(part: &BlockPartition, block_index: usize, coeffs: &[f64]) -> Result<Self> {
        let exps = part.block(block_index)?;
        if coeffs.len() != exps.len() {
            return Err(invalid("one coefficient per block exponent is required"));
        }
        let poly = MuntzPolynomial::new(exps.iter().copied().zip(coeffs.iter().copied()).collect())?;
        Ok(BlockPolynomial { block_index, poly })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GridOpts {
    pub per_side: usize,
    /// Number of best brackets refined by golden section.
    pub refine: usize,
    pub t_min: f64,
}

impl Default for GridOpts {
    fn default() -> Self {
        GridOpts { per_side: 256, refine: 3, t_min: 2f64.powi(-100) }
    }
}

/// Smallest 1−t resolved by the grids for a polynomial with top exponent λ.
pub fn grid_x_min(lambda_max: f64) -> f64 {
    1e-6f64.min(1e-3 / lambda_max.max(1.0))
}

/// Log-spaced nodes in the unified coordinate u covering [t_min, 1 − x_min].
pub fn u_grid(per_side: usize, t_min: f64, x_min: f64) -> Vec<f64> {
    let lo = (2.0 * t_min).ln();
    let hi = -(2.0 * x_min).ln();
    let n = per_side.max(2);
    let mut out: Vec<f64> = (0..n).map(|i| lo * (1.0 - i as f64 / (n - 1) as f64)).collect();
    out.extend((1..n).map(|i| hi * i as f64 / (n - 1) as f64));
    out
}

/// Golden-section maximisation of `g` over [a, b].
pub fn golden_max<G: Fn(f64) -> f64>(g: G, mut a: f64, mut b: f64) -> (f64, f64) {
    const R: f64 = 0.618_033_988_749_894_8;
    let mut c = b - R * (b - a);
    let mut d = a + R * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-13 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - R * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + R * (b - a);
            gd = g(d);
        }
    }
    if gc >= gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

/// Maximises `g(u)` over a sampled grid, refining the best brackets.
pub(crate) fn grid_max<G: Fn(f64) -> f64>(g: G, grid: &[f64], refine: usize) -> f64 {
    let vals: Vec<f64> = grid.iter().map(|&u| g(u)).collect();
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
    let mut best = vals.iter().copied().fold(0.0, f64::max);
    for &i in order.iter().take(refine) {
        let a = grid[i.saturating_sub(1)];
        let b = grid[(i + 1).min(grid.len() - 1)];
        if b > a {
            best = best.max(golden_max(&g, a, b).1);
        }
    }
    best
}

pub fn sup_norm(f: &MuntzPolynomial) -> f64 {
    sup_norm_with(f, &GridOpts::default())
}

pub fn sup_norm_with(f: &MuntzPolynomial, opts: &GridOpts) -> f64 {
    if f.is_zero() {
        return 0.0;
    }
    let grid = u_grid(opts.per_side, opts.t_min, grid_x_min(f.max_exponent()));
    let g = |u: f64| f.eval_at(Abscissa::from_u(u)).abs();
    grid_max(g, &grid, opts.refine).max(f.coefficient_sum().abs())
}

/// Empirical constant in |f_k(t)| ≤ C·t^{(λ_prev+1)/N}·‖f_k‖_∞ over t ∈ [1e-6, 1],
/// where λ_prev is the top exponent of the previous block (0 for the first).
pub fn pointwise_bound_constant(
    fk: &BlockPolynomial,
    part: &BlockPartition,
    grid_size: usize,
) -> Result<f64> {
    if fk.poly.is_zero() {
        return Err(Error::UndefinedConstant("zero block polynomial".into()));
    }
    if grid_size < 64 {
        return Err(invalid("grid_size must be at least 64"));
    }
    let k = fk.block_index;
    part.block(k)?;
    // Normalising by the leading coefficient makes the constant scale-free.
    let lead = fk.poly.terms().iter().map(|t| t.1).fold(0.0, |m: f64, a| if a.abs() > m.abs() { a } else { m });
    let poly = fk.poly.scale(1.0 / lead);
    let expo = (part.lower_endpoint(k) + 1.0) / part.max_block() as f64;
    let sup = sup_norm(&poly);
    let grid = u_grid(grid_size, 1e-6, grid_x_min(poly.max_exponent()));
    let g = |u: f64| {
        let a = Abscissa::from_u(u);
        let v = poly.eval_at(a).abs();
        if v == 0.0 {
            0.0
        } else {
            (v.ln() - expo * a.ln_t()).exp()
        }
    };
    let at_one = poly.coefficient_sum().abs();
    Ok(grid_max(g, &grid, 3).max(at_one) / sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::{make_geometric, validate_quasi_lacunary, ExponentSequence};
    use proptest::prelude::*;

    fn poly(terms: &[(f64, f64)]) -> MuntzPolynomial {
        MuntzPolynomial::new(terms.to_vec()).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        let f = poly(&[(1e6, 1.0)]);
        // The double nearest 1 − 1e-6, and the exact distance 1e-6.
        let v = evaluate(&f, 1.0 - 1e-6).unwrap();
        assert!(((v - 0.3678792572210664712039009715025372136695) / v).abs() < 1e-13);
        let v = f.eval_at(Abscissa::from_x(1e-6));
        assert!(((v - 0.3678792572316450942857981252703696595794) / v).abs() < 1e-13);
        let g = poly(&[(2.0, 3.0), (5.0, -1.0)]);
        assert_eq!(evaluate(&g, 1.0).unwrap(), 2.0);
        assert_eq!(evaluate(&g, 0.0).unwrap(), 0.0);
        assert!(matches!(evaluate(&g, 1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn huge_exponents_do_not_overflow() {
        let f = poly(&[(2f64.powi(60), 1.0), (2f64.powi(100), -2.0)]);
        let v = f.eval_at(Abscissa::from_x(2f64.powi(-60)));
        assert!((v - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn construction_normalises() {
        let f = poly(&[(4.0, 1.0), (1.0, 2.0), (4.0, -1.0), (2.0, 0.0)]);
        assert_eq!(f.terms(), &[(1.0, 2.0)]);
        assert!(MuntzPolynomial::new(vec![(0.0, 1.0)]).is_err());
    }

    #[test]
    fn decomposition_examples() {
        let p = validate_quasi_lacunary(&ExponentSequence::new(vec![1.0, 4.0]).unwrap(), &[1, 1], 2.0)
            .unwrap();
        let f = poly(&[(1.0, 1.0), (4.0, 1.0)]);
        let b = block_decompose(&f, &p).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!((b[0].block_index, b[0].poly.terms()), (0, &[(1.0, 1.0)][..]));

        let s = ExponentSequence::new(vec![1.0, 1.1, 4.0]).unwrap();
        let p = validate_quasi_lacunary(&s, &[2, 1], 2.0).unwrap();
        let f = poly(&[(1.0, 2.0), (1.1, -1.0), (4.0, 1.0)]);
        let b = block_decompose(&f, &p).unwrap();
        assert_eq!(b[0].poly.terms(), &[(1.0, 2.0), (1.1, -1.0)]);
        assert_eq!(b[1].poly.terms(), &[(4.0, 1.0)]);

        let p = BlockPartition::lacunary(&make_geometric(1.0, 2.0, 3).unwrap(), 1.5).unwrap();
        assert_eq!(block_decompose(&poly(&[(3.0, 1.0)]), &p), Err(Error::UnknownExponent(3.0)));
    }

    #[test]
    fn sup_norm_examples() {
        for l in [0.5, 1.0, 1e3, 2f64.powi(60)] {
            assert_eq!(sup_norm(&poly(&[(l, 1.0)])), 1.0);
        }
        let f = poly(&[(2.0, 1.0), (3.0, -1.0)]);
        assert!((sup_norm(&f) - 4.0 / 27.0).abs() < 1e-12);
        assert_eq!(sup_norm(&poly(&[(7.0, -5.0)])), 5.0);
        assert_eq!(sup_norm(&MuntzPolynomial::zero()), 0.0);
    }

    #[test]
    fn sup_norm_interior_peak_at_huge_scale() {
        // t^λ − t^{2λ} peaks at t^λ = 1/2 with value 1/4.
        let l = 2f64.powi(50);
        let f = poly(&[(l, 1.0), (2.0 * l, -1.0)]);
        assert!((sup_norm(&f) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn pointwise_constant_examples() {
        let p = BlockPartition::lacunary(&make_geometric(1.0, 2.0, 12).unwrap(), 1.5).unwrap();
        for k in [0, 3, 11] {
            let fk = BlockPolynomial::new(&p, k, &[1.0]).unwrap();
            let c = pointwise_bound_constant(&fk, &p, 64).unwrap();
            assert!((c - 1.0).abs() < 1e-12, "k={k}: {c}");
        }
        let s = ExponentSequence::new(vec![1.0, 2.0, 2.2, 8.0]).unwrap();
        let p = validate_quasi_lacunary(&s, &[1, 2, 1], 2.0).unwrap();
        let fk = BlockPolynomial::new(&p, 1, &[1.0, -1.0]).unwrap();
        let c = pointwise_bound_constant(&fk, &p, 128).unwrap();
        assert!(c.is_finite() && c > 0.0);
        let scaled = BlockPolynomial { block_index: 1, poly: fk.poly.scale(10.0) };
        assert_eq!(pointwise_bound_constant(&scaled, &p, 128).unwrap(), c);
        let zero = BlockPolynomial { block_index: 1, poly: MuntzPolynomial::zero() };
        assert!(matches!(pointwise_bound_constant(&zero, &p, 128), Err(Error::UndefinedConstant(_))));
    }

    #[test]
    fn json_is_pair_list() {
        let f = poly(&[(1.0, 2.0), (4.0, -1.0)]);
        assert_eq!(serde_json::to_string(&f).unwrap(), "[[1.0,2.0],[4.0,-1.0]]");
        let back: MuntzPolynomial = serde_json::from_str("[[4.0,-1.0],[1.0,2.0]]").unwrap();
        assert_eq!(back, f);
    }

    fn arb_poly() -> impl Strategy<Value = MuntzPolynomial> {
        prop::collection::vec((0u32..40, -5.0f64..5.0), 1..8).prop_map(|v| {
            MuntzPolynomial::new(v.into_iter().map(|(e, a)| (1.7f64.powi(e as i32), a)).collect())
                .unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn evaluation_is_linear(f in arb_poly(), g in arb_poly(), t in 0.0f64..=1.0) {
            let lhs = evaluate(&f.add(&g), t).unwrap();
            let rhs = evaluate(&f, t).unwrap() + evaluate(&g, t).unwrap();
            let scale: f64 = f.terms().iter().chain(g.terms()).map(|x| x.1.abs()).sum();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1e-300));
        }

        #[test]
        fn sup_norm_is_homogeneous_and_dominates(f in arb_poly(), c in -20.0f64..20.0, t in 0.0f64..=1.0) {
            prop_assume!(c.abs() > 1e-3 && !f.is_zero());
            let s = sup_norm(&f);
            prop_assert!((sup_norm(&f.scale(c)) - c.abs() * s).abs() <= 1e-10 * c.abs() * s);
            prop_assert!(evaluate(&f, t).unwrap().abs() <= s * (1.0 + 1e-12));
        }
    }
}
