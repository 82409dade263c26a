//! Desk-scale checks of the inequalities behind the exponential sum bounds.
//!
//! Exact statements (the nu inequality, the cone-lemma hypothesis, the
//! vanishing of sums without critical point, the trivial lemma) are checked
//! in rational arithmetic and report every failure. Asymptotic statements of
//! the form `|X| < c * shape` are fitted: the report carries the largest
//! observed ratio `|X| / shape` over the grid, together with a stability
//! figure comparing the fit on the lower half of the prime range against the
//! fit on all of it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{is_prime, rational_string, to_f64, twist_set};
use crate::decomp::{cone_sums, for_each_covector, tail_bound, Mode};
use crate::error::{Error, Result};
use crate::field::GaloisField;
use crate::linalg::rank;
use crate::lp::{Relation, RationalLp};
use crate::newton::{nondegenerate_for_prime, sigma_of_support, NewtonPolyhedron};
use crate::poly::{ModularPolynomial, Polynomial, QuasiWeights};
use crate::sums::{affine_sum_ext, e_sum, e_sum_ext, s_sum, t_sum, Budget, ExpSumValue, UnitTwist};

/// Tolerance for rounding a fitted slope to an integer dimension.
pub const SLOPE_TOLERANCE: f64 = 0.25;
/// A fitted constant may grow by this factor when the prime range doubles.
pub const STABILITY_FACTOR: f64 = 1.2;

/// Which units `u` to use for `psi(u x / p^m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwistPolicy {
    One,
    /// All units for `p <= 31`, eight spread-out units otherwise.
    Default,
    /// Every unit mod `p`.
    All,
}

impl TwistPolicy {
    pub fn twists(&self, p: u64) -> Vec<u64> {
        match self {
            TwistPolicy::One => vec![1],
            TwistPolicy::Default => twist_set(p),
            TwistPolicy::All => (1..p).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundOptions {
    pub budget: Budget,
    pub twists: TwistPolicy,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions { budget: Budget::default(), twists: TwistPolicy::Default }
    }
}

/// One fitted data point: the largest value over the twists at `(p, q, m, face)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint {
    /// Which quantity: "S", "T", "A", "B", "torus", "affine", "cone", ...
    pub what: String,
    pub p: u64,
    pub q: u64,
    pub m: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub face: Option<usize>,
    pub twists: usize,
    /// Upper estimate of the quantity (value plus error bound).
    pub value: f64,
    pub shape: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stability {
    pub p0: u64,
    pub c0: f64,
    pub p1: u64,
    pub c1: f64,
    /// `c1 / c0`; 1 when both vanish.
    pub growth: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub label: String,
    /// `(p, #{x in F_p^n on the locus})`.
    pub counts: Vec<(u64, u64)>,
    pub slope: f64,
    /// Largest deviation of `ln(count + 1)` from the fitted line.
    pub residual: f64,
    /// Rounded slope; `-1` for an empty locus; `None` if inconclusive.
    pub dimension: Option<i64>,
}

impl DimensionEstimate {
    pub fn get(&self) -> Result<i64> {
        self.dimension.ok_or(Error::InconclusiveDimension(self.slope))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheckReport {
    pub id: String,
    pub polynomial: Option<String>,
    /// Number of exact instances checked (for exact statements).
    pub checked: usize,
    pub grid: Vec<GridPoint>,
    pub fitted_c: Option<f64>,
    pub stability: Option<Stability>,
    /// Smallest exact slack over the checked instances.
    pub min_margin: Option<String>,
    pub dimensions: Vec<DimensionEstimate>,
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

impl BoundCheckReport {
    fn new(id: &str, f: Option<&Polynomial>) -> Self {
        BoundCheckReport {
            id: id.to_string(),
            polynomial: f.map(ToString::to_string),
            checked: 0,
            grid: Vec::new(),
            fitted_c: None,
            stability: None,
            min_margin: None,
            dimensions: Vec::new(),
            violations: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    /// Largest ratio over grid points with `p <= p_max`.
    pub fn fitted_up_to(&self, p_max: u64) -> Option<f64> {
        self.grid.iter().filter(|g| g.p <= p_max).map(|g| g.ratio).reduce(f64::max)
    }

    /// Largest ratio over grid points of one kind.
    pub fn fitted_for(&self, what: &str) -> Option<f64> {
        self.grid.iter().filter(|g| g.what == what).map(|g| g.ratio).reduce(f64::max)
    }

    /// Sets the fitted constant, the stability figure and flags unfittable points.
    fn finish_fit(&mut self) {
        self.grid.sort_by(|a, b| (a.p, a.q, a.m, a.face, &a.what).cmp(&(b.p, b.q, b.m, b.face, &b.what)));
        for g in &self.grid {
            if !g.ratio.is_finite() {
                self.violations.push(format!("{} at p={} q={} m={}: shape {} cannot absorb {}", g.what, g.p, g.q, g.m, g.shape, g.value));
            }
        }
        self.fitted_c = self.grid.iter().map(|g| g.ratio).reduce(f64::max);
        let Some(p1) = self.grid.iter().map(|g| g.p).max() else {
            return;
        };
        let p0 = (p1 + 1) / 2;
        let c1 = self.fitted_c.unwrap_or(0.0);
        let Some(c0) = self.fitted_up_to(p0) else {
            return;
        };
        let growth = if c1 == 0.0 { 1.0 } else if c0 == 0.0 { f64::INFINITY } else { c1 / c0 };
        let stable = growth <= STABILITY_FACTOR;
        if !stable {
            self.notes.push(format!("fitted constant grows by {growth:.3} from p <= {p0} to p <= {p1}"));
        }
        self.stability = Some(Stability { p0, c0, p1, c1, growth, stable });
    }
}

fn ratio(value: f64, shape: f64) -> f64 {
    if value <= 0.0 {
        0.0
    } else {
        value / shape
    }
}

/// `|value| + error` as an upper estimate.
fn upper(v: &ExpSumValue) -> f64 {
    if v.is_exactly_zero() {
        return 0.0;
    }
    let (r, e) = v.magnitude();
    r + e
}

fn max_over_twists(base: &ExpSumValue, twists: &[u64]) -> f64 {
    twists.iter().map(|&u| upper(&base.twisted(u))).fold(0.0, f64::max)
}

fn q_rat(x: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// `nu(k) >= sigma(h) (N(k) + 1) - sigma(h_tau)` for every `k` with
/// `F(k) = tau` and `nu(k) <= cap`; `faces = None` checks every face.
pub fn check_nu_inequality(h: &Polynomial, faces: Option<&[usize]>, cap: u32) -> Result<BoundCheckReport> {
    let poly = NewtonPolyhedron::new(h)?;
    let n = poly.n;
    let sigma = poly.sigma().clone();
    let wanted: Vec<bool> = match faces {
        Some(ids) => {
            let mut w = vec![false; poly.faces.len()];
            for &id in ids {
                *w.get_mut(id).ok_or(Error::IndexOutOfRange { index: id, n: poly.faces.len() })? = true;
            }
            w
        }
        None => vec![true; poly.faces.len()],
    };
    let sigma_tau: Vec<BigRational> =
        poly.faces.iter().map(|t| sigma_of_support(n, &t.support_points)).collect::<Result<_>>()?;
    let mut report = BoundCheckReport::new("nu-inequality", Some(h));
    let mut min_margin: Option<BigRational> = None;
    for first in 0..=cap as u64 {
        for_each_covector(n, cap as u64, 0, first, &mut |k, nu| {
            let (nk, face) = poly.classify(k);
            if !wanted[face] {
                return;
            }
            report.checked += 1;
            let rhs = &sigma * q_rat(nk + 1) - &sigma_tau[face];
            let margin = q_rat(nu) - rhs;
            if margin.is_negative() {
                report.violations.push(format!("k={k:?} face {face}: nu={nu} < {}", rational_string(&(q_rat(nu) - &margin))));
            }
            if min_margin.as_ref().is_none_or(|m| &margin < m) {
                min_margin = Some(margin);
            }
        });
    }
    report.min_margin = min_margin.as_ref().map(rational_string);
    report.notes.push(format!("sigma = {}", rational_string(&sigma)));
    Ok(report)
}

/// A rational polyhedral cone in `R_+^n` and a linear form `L` on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConeSpec {
    pub generators: Vec<Vec<u64>>,
    pub linear_form: Vec<u64>,
}

impl ConeSpec {
    fn dim(&self) -> usize {
        self.linear_form.len()
    }

    /// `k` is a positive combination of all generators.
    pub fn relative_interior_contains(&self, k: &[u64]) -> bool {
        let r = self.generators.len();
        let n = self.dim();
        let mut obj = vec![0i64; r + 1];
        obj[r] = -1;
        let mut lp = RationalLp::new(r + 1).minimize_int(&obj);
        for j in 0..n {
            let mut row: Vec<i64> = self.generators.iter().map(|g| g[j] as i64).collect();
            row.push(0);
            lp.constrain_int(&row, Relation::Eq, k[j] as i64);
        }
        for i in 0..r {
            let mut row = vec![0i64; r + 1];
            row[i] = 1;
            row[r] = -1;
            lp.constrain_int(&row, Relation::Ge, 0);
        }
        let mut cap = vec![0i64; r + 1];
        cap[r] = 1;
        lp.constrain_int(&cap, Relation::Le, 1);
        lp.solve().optimal().is_some_and(|s| s.x[r].is_positive())
    }

    pub fn evaluate(&self, k: &[u64]) -> u64 {
        self.linear_form.iter().zip(k).map(|(a, b)| a * b).sum()
    }

    /// `dim {k in C : nu(k) = sigma L(k)}`.
    pub fn equality_dimension(&self, sigma: &BigRational) -> usize {
        let vals: Vec<BigRational> = self
            .generators
            .iter()
            .map(|g| q_rat(g.iter().sum()) - sigma * q_rat(self.evaluate(g)))
            .collect();
        let pos = vals.iter().any(Signed::is_positive);
        let neg = vals.iter().any(Signed::is_negative);
        let rows = |gs: Vec<&Vec<u64>>| -> usize {
            rank(&gs.iter().map(|g| g.iter().map(|&v| q_rat(v)).collect()).collect::<Vec<_>>())
        };
        if pos && neg {
            // the hyperplane cuts through the cone
            rows(self.generators.iter().collect()) - 1
        } else {
            rows(self.generators.iter().zip(&vals).filter(|(_, v)| v.is_zero()).map(|(g, _)| g).collect())
        }
    }
}

/// `sum_{k in C^int, L(k) = m} q^-nu(k) <= c q^(-m sigma - gamma) (m+1)^max(0, e-1)`,
/// after checking the hypothesis `nu(k) >= L(k) sigma + gamma` on `C^int`
/// up to `nu(k) <= cap`.
pub fn check_cone_lemma(
    cone: &ConeSpec,
    sigma: &BigRational,
    gamma: &BigRational,
    q_grid: &[u64],
    m_grid: &[u32],
    cap: u32,
) -> Result<BoundCheckReport> {
    let n = cone.dim();
    if n == 0 || cone.generators.iter().any(|g| g.len() != n) {
        return Err(Error::InvalidInput("generators and linear form must share a dimension".into()));
    }
    let mut report = BoundCheckReport::new("cone-lemma", None);
    let mut interior: Vec<(Vec<u64>, u64)> = Vec::new();
    for first in 0..=cap as u64 {
        for_each_covector(n, cap as u64, 0, first, &mut |k, nu| {
            if k.iter().any(|&v| v > 0) && cone.relative_interior_contains(k) {
                interior.push((k.to_vec(), nu));
            }
        });
    }
    report.checked = interior.len();
    let mut min_margin: Option<BigRational> = None;
    for (k, nu) in &interior {
        let margin = q_rat(*nu) - sigma * q_rat(cone.evaluate(k)) - gamma;
        if margin.is_negative() {
            report.violations.push(format!("precondition fails at k={k:?}: nu={nu}"));
        }
        if min_margin.as_ref().is_none_or(|m| &margin < m) {
            min_margin = Some(margin);
        }
    }
    report.min_margin = min_margin.as_ref().map(rational_string);
    let e = cone.equality_dimension(sigma);
    report.notes.push(format!("e = {e}"));
    let bounded = cone.linear_form.iter().all(|&a| a > 0);
    let (sf, gf) = (to_f64(sigma), to_f64(gamma));
    for &q in q_grid {
        for &m in m_grid {
            let mut lhs = BigRational::zero();
            for (k, nu) in &interior {
                if cone.evaluate(k) == m as u64 {
                    lhs += BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(q), *nu as usize));
                }
            }
            if !(bounded && m <= cap) {
                lhs += tail_bound(n, q, cap);
            }
            let shape = (q as f64).powf(-(m as f64) * sf - gf) * ((m + 1) as f64).powi(e.saturating_sub(1) as i32);
            let value = to_f64(&lhs);
            report.grid.push(GridPoint { what: "cone".into(), p: q, q, m, face: None, twists: 1, value, shape, ratio: ratio(value, shape) });
        }
    }
    report.finish_fit();
    Ok(report)
}

/// `A_tau <= c |y|^-sigma |ord y|^(kappa-1)` and
/// `B_tau <= c |y|^-sigma q^sigma(f_tau) |ord y|^(kappa-1)` over the grid.
pub fn check_ab_bounds(f: &Polynomial, p_grid: &[u64], m_grid: &[u32], mode: Mode, depth: u32) -> Result<BoundCheckReport> {
    let poly = NewtonPolyhedron::new(f)?;
    let n = poly.n;
    let sigma = to_f64(poly.sigma());
    let kappa = poly.kappa() as i32;
    let sigma_tau: Vec<f64> = poly
        .faces
        .iter()
        .map(|t| sigma_of_support(n, &t.support_points).map(|s| to_f64(&s)))
        .collect::<Result<_>>()?;
    let mut report = BoundCheckReport::new(if mode == Mode::Global { "ab-global" } else { "ab-local" }, Some(f));
    let cells: Vec<(u64, u32)> = p_grid.iter().flat_map(|&p| m_grid.iter().map(move |&m| (p, m))).collect();
    let parts: Vec<Vec<GridPoint>> = cells
        .par_iter()
        .map(|&(p, m)| -> Result<Vec<GridPoint>> {
            let sums = cone_sums(&poly, p, m, depth, mode, false)?;
            let base = (p as f64).powf(-(m as f64) * sigma) * (m as f64).powi(kappa - 1);
            let mut out = Vec::new();
            for t in poly.faces.iter().filter(|t| t.compact || mode == Mode::Global) {
                let a = crate::interval::round_up(&sums.a[t.id].hi);
                let b = crate::interval::round_up(&sums.b[t.id].hi);
                let shape_b = base * (p as f64).powf(sigma_tau[t.id]);
                out.push(GridPoint { what: "A".into(), p, q: p, m, face: Some(t.id), twists: 1, value: a, shape: base, ratio: ratio(a, base) });
                out.push(GridPoint { what: "B".into(), p, q: p, m, face: Some(t.id), twists: 1, value: b, shape: shape_b, ratio: ratio(b, shape_b) });
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    report.grid = parts.into_iter().flatten().collect();
    report.finish_fit();
    Ok(report)
}

/// `|S(1/p^m)| p^(m sigma) / m^(kappa-1)` (or `T` in local mode) over
/// certified primes, every twist of the policy.
pub fn fit_mt1(f: &Polynomial, p_grid: &[u64], m_grid: &[u32], mode: Mode, opts: &BoundOptions) -> Result<BoundCheckReport> {
    let poly = NewtonPolyhedron::new(f)?;
    let sigma = to_f64(poly.sigma());
    let kappa = poly.kappa() as i32;
    let local = mode == Mode::Local;
    let mut report = BoundCheckReport::new(if local { "mt1-local" } else { "mt1-global" }, Some(f));
    report.notes.push(format!("sigma = {}, kappa = {}", rational_string(poly.sigma()), poly.kappa()));
    let mut certified = Vec::new();
    for &p in p_grid {
        if nondegenerate_for_prime(f, &poly.faces, p, local)?.certified {
            certified.push(p);
        } else {
            report.notes.push(format!("p={p} excluded: degenerate face mod p"));
        }
    }
    let cells: Vec<(u64, u32)> = certified.iter().flat_map(|&p| m_grid.iter().map(move |&m| (p, m))).collect();
    let results: Vec<(u64, u32, Result<ExpSumValue>)> = cells
        .par_iter()
        .map(|&(p, m)| {
            let v = if local { t_sum(f, p, m, UnitTwist::ONE, opts.budget) } else { s_sum(f, p, m, UnitTwist::ONE, opts.budget) };
            (p, m, v)
        })
        .collect();
    for (p, m, v) in results {
        match v {
            Ok(v) => {
                let twists = opts.twists.twists(p);
                let value = max_over_twists(&v, &twists);
                let shape = (p as f64).powf(-(m as f64) * sigma) * (m as f64).powi(kappa - 1);
                let what = if local { "T" } else { "S" };
                report.grid.push(GridPoint { what: what.into(), p, q: p, m, face: None, twists: twists.len(), value, shape, ratio: ratio(value, shape) });
            }
            Err(Error::BudgetExceeded { points, .. }) | Err(Error::ModulusTooLarge(points)) => {
                report.notes.push(format!("p={p} m={m} skipped: {points} points over budget"));
            }
            Err(e) => return Err(e),
        }
    }
    report.finish_fit();
    Ok(report)
}

/// Number of points of `F_p^n` where every polynomial in `polys` vanishes.
pub fn count_common_zeros(polys: &[Polynomial], n: usize, p: u64) -> u64 {
    let reduced: Vec<ModularPolynomial> = polys.iter().map(|g| ModularPolynomial::new(g, p)).collect();
    if n == 0 {
        return u64::from(reduced.iter().all(|g| g.evaluate(&[]) == 0));
    }
    (0..p)
        .into_par_iter()
        .map(|first| {
            let mut x = vec![0u64; n];
            x[0] = first;
            let mut table = Vec::new();
            let mut count = 0u64;
            loop {
                if reduced.iter().all(|g| {
                    g.powers(&x, &mut table);
                    g.evaluate_with(&table) == 0
                }) {
                    count += 1;
                }
                let mut j = n - 1;
                loop {
                    if j == 0 {
                        return count;
                    }
                    x[j] += 1;
                    if x[j] < p {
                        break;
                    }
                    x[j] = 0;
                    j -= 1;
                }
            }
        })
        .sum()
}

/// Dimension of the common zero locus of `polys` in affine `n`-space, from
/// the slope of `ln(count + 1)` against `ln p`.
pub fn locus_dim_estimate(label: &str, polys: &[Polynomial], n: usize, p_grid: &[u64]) -> Result<DimensionEstimate> {
    if p_grid.len() < 2 {
        return Err(Error::InvalidInput("need at least two primes".into()));
    }
    if let Some(&p) = p_grid.iter().find(|&&p| !is_prime(p)) {
        return Err(Error::NotPrime(p));
    }
    let counts: Vec<(u64, u64)> = p_grid.iter().map(|&p| (p, count_common_zeros(polys, n, p))).collect();
    let xs: Vec<f64> = counts.iter().map(|&(p, _)| (p as f64).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&(_, c)| (c as f64 + 1.0).ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let residual = xs.iter().zip(&ys).map(|(x, y)| (y - my - slope * (x - mx)).abs()).fold(0.0, f64::max);
    let dimension = if counts.iter().all(|&(_, c)| c == 0) {
        Some(-1)
    } else if (slope - slope.round()).abs() <= SLOPE_TOLERANCE {
        Some(slope.round() as i64)
    } else {
        None
    };
    Ok(DimensionEstimate { label: label.to_string(), counts, slope, residual, dimension })
}

/// Dimension of `{grad h = 0}`.
pub fn critical_dim_estimate(h: &Polynomial, p_grid: &[u64]) -> Result<DimensionEstimate> {
    locus_dim_estimate("critical locus", &h.partial_derivatives(), h.num_vars(), p_grid)
}

fn origin_is_critical(h: &Polynomial) -> bool {
    h.linear_terms().is_empty()
}

fn dimension_of(h: &Polynomial, p_grid: &[u64], report: &mut BoundCheckReport) -> Result<i64> {
    let dim_primes: Vec<u64> = p_grid.iter().copied().filter(|&p| p >= 3).collect();
    let est = critical_dim_estimate(h, if dim_primes.len() >= 2 { &dim_primes } else { p_grid })?;
    let d = est.get();
    report.dimensions.push(est);
    d
}

/// Torus and affine sums of a quasi-homogeneous `h` against
/// `a q^((-n+d)/2)`, over prime fields in the grid and the listed extension
/// orders, every unit twist.
pub fn check_katz_bounds(h: &Polynomial, p_grid: &[u64], q_list: &[u64], opts: &BoundOptions) -> Result<BoundCheckReport> {
    h.quasi_weights()?;
    let n = h.num_vars() as f64;
    let mut report = BoundCheckReport::new("katz", Some(h));
    if !origin_is_critical(h) {
        report.notes.push("0 is not a critical point; the locus may be empty (d = -1)".into());
    }
    let d = dimension_of(h, p_grid, &mut report)? as f64;
    let exponent = (-n + d) / 2.0;
    let prime_points: Vec<Vec<GridPoint>> = p_grid
        .par_iter()
        .map(|&p| -> Result<Vec<GridPoint>> {
            let twists: Vec<u64> = (1..p).collect();
            let shape = (p as f64).powf(exponent);
            let e = e_sum(h, p, UnitTwist::ONE, opts.budget)?;
            let a = s_sum(h, p, 1, UnitTwist::ONE, opts.budget)?;
            let (ve, va) = (max_over_twists(&e, &twists), max_over_twists(&a, &twists));
            Ok(vec![
                GridPoint { what: "torus".into(), p, q: p, m: 1, face: None, twists: twists.len(), value: ve, shape, ratio: ratio(ve, shape) },
                GridPoint { what: "affine".into(), p, q: p, m: 1, face: None, twists: twists.len(), value: va, shape, ratio: ratio(va, shape) },
            ])
        })
        .collect::<Result<_>>()?;
    report.grid.extend(prime_points.into_iter().flatten());
    for &q in q_list {
        let field = GaloisField::builtin(q)?;
        let p = field.characteristic();
        let shape = (q as f64).powf(exponent);
        let twists: Vec<u64> = (1..p).collect();
        let e = e_sum_ext(h, &field, UnitTwist::ONE, opts.budget)?;
        let a = affine_sum_ext(h, &field, UnitTwist::ONE, opts.budget)?;
        let (ve, va) = (max_over_twists(&e, &twists), max_over_twists(&a, &twists));
        report.grid.push(GridPoint { what: "torus".into(), p, q, m: 1, face: None, twists: twists.len(), value: ve, shape, ratio: ratio(ve, shape) });
        report.grid.push(GridPoint { what: "affine".into(), p, q, m: 1, face: None, twists: twists.len(), value: va, shape, ratio: ratio(va, shape) });
    }
    report.finish_fit();
    Ok(report)
}

fn certified_primes(f: &Polynomial, poly: &NewtonPolyhedron, p_grid: &[u64], report: &mut BoundCheckReport) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for &p in p_grid {
        if nondegenerate_for_prime(f, &poly.faces, p, true)?.certified {
            out.push(p);
        } else {
            report.notes.push(format!("p={p} excluded: degenerate compact face mod p"));
        }
    }
    Ok(out)
}

/// Torus and affine sums of a nondegenerate quasi-homogeneous `f` against
/// `a p^-sigma(f)`.
pub fn check_quasinondeg_bound(f: &Polynomial, p_grid: &[u64], opts: &BoundOptions) -> Result<BoundCheckReport> {
    f.quasi_weights()?;
    let poly = NewtonPolyhedron::new(f)?;
    let sigma = to_f64(poly.sigma());
    let mut report = BoundCheckReport::new("quasinondeg", Some(f));
    let primes = certified_primes(f, &poly, p_grid, &mut report)?;
    let parts: Vec<Vec<GridPoint>> = primes
        .par_iter()
        .map(|&p| -> Result<Vec<GridPoint>> {
            let twists = opts.twists.twists(p);
            let shape = (p as f64).powf(-sigma);
            let e = e_sum(f, p, UnitTwist::ONE, opts.budget)?;
            let a = s_sum(f, p, 1, UnitTwist::ONE, opts.budget)?;
            let (ve, va) = (max_over_twists(&e, &twists), max_over_twists(&a, &twists));
            Ok(vec![
                GridPoint { what: "torus".into(), p, q: p, m: 1, face: None, twists: twists.len(), value: ve, shape, ratio: ratio(ve, shape) },
                GridPoint { what: "affine".into(), p, q: p, m: 1, face: None, twists: twists.len(), value: va, shape, ratio: ratio(va, shape) },
            ])
        })
        .collect::<Result<_>>()?;
    report.grid = parts.into_iter().flatten().collect();
    report.finish_fit();
    Ok(report)
}

/// Per-face torus bound `|E(f_tau)| < c p^-sigma(f_tau)` for every face.
pub fn check_face_torus_bounds(f: &Polynomial, p_grid: &[u64], opts: &BoundOptions) -> Result<BoundCheckReport> {
    let poly = NewtonPolyhedron::new(f)?;
    let n = poly.n;
    let mut report = BoundCheckReport::new("face-torus", Some(f));
    let mut primes = Vec::new();
    for &p in p_grid {
        if nondegenerate_for_prime(f, &poly.faces, p, false)?.certified {
            primes.push(p);
        } else {
            report.notes.push(format!("p={p} excluded: degenerate face mod p"));
        }
    }
    let faces: Vec<(usize, Polynomial, f64)> = poly
        .faces
        .iter()
        .map(|t| Ok((t.id, t.restrict(f), to_f64(&sigma_of_support(n, &t.support_points)?))))
        .collect::<Result<_>>()?;
    let parts: Vec<Vec<GridPoint>> = primes
        .par_iter()
        .map(|&p| -> Result<Vec<GridPoint>> {
            let twists = opts.twists.twists(p);
            faces
                .iter()
                .map(|(id, ft, st)| {
                    let e = e_sum(ft, p, UnitTwist::ONE, opts.budget)?;
                    let value = max_over_twists(&e, &twists);
                    let shape = (p as f64).powf(-st);
                    Ok(GridPoint { what: "torus".into(), p, q: p, m: 1, face: Some(*id), twists: twists.len(), value, shape, ratio: ratio(value, shape) })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    report.grid = parts.into_iter().flatten().collect();
    report.finish_fit();
    Ok(report)
}

/// Weights shared by every polynomial in the list, from one linear program
/// over all supports (each polynomial keeps its own weighted degree).
pub fn common_quasi_weights(polys: &[Polynomial]) -> Result<(Vec<u64>, Vec<u64>)> {
    let n = polys.first().map(Polynomial::num_vars).ok_or_else(|| Error::InvalidInput("empty list".into()))?;
    if polys.iter().any(|f| f.num_vars() != n) {
        return Err(Error::InvalidInput("polynomials live in different numbers of variables".into()));
    }
    let k = polys.len();
    let vars = n + k;
    let mut lp = RationalLp::new(vars).minimize_int(&vec![1; vars]);
    for j in 0..n {
        let mut row = vec![0; vars];
        row[j] = 1;
        lp.constrain_int(&row, Relation::Ge, 1);
    }
    for (i, f) in polys.iter().enumerate() {
        for (e, _) in f.terms() {
            let mut row: Vec<i64> = e.0.iter().map(|&v| i64::from(v)).collect();
            row.resize(vars, 0);
            row[n + i] = -1;
            lp.constrain_int(&row, Relation::Eq, 0);
        }
    }
    let sol = lp.solve().optimal().ok_or(Error::NotQuasiHomogeneous)?;
    let lcm = sol.x.iter().fold(BigInt::one(), |acc, v| num_integer::Integer::lcm(&acc, v.denom()));
    let ints: Vec<BigInt> = sol.x.iter().map(|v| (v * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| num_integer::Integer::gcd(&acc, v));
    let ints: Vec<u64> = ints.iter().map(|v| (v / &g).to_u64().expect("weight fits")).collect();
    Ok((ints[..n].to_vec(), ints[n..].to_vec()))
}

/// `dim X <= dim Y + 1` for `X = {f_1 = .. = f_(d-1) = 0}` and
/// `Y = {f_1 = .. = f_d = 0}`, on point-count estimates.
pub fn check_intersect_lemma(polys: &[Polynomial], p_grid: &[u64]) -> Result<BoundCheckReport> {
    let (weights, _) = common_quasi_weights(polys)?;
    let last = polys.last().expect("nonempty after weights");
    if last.is_constant() {
        return Err(Error::ConstantPolynomial);
    }
    let n = last.num_vars();
    let mut report = BoundCheckReport::new("intersect", None);
    report.notes.push(format!("shared weights {weights:?}"));
    let x = locus_dim_estimate("X", &polys[..polys.len() - 1], n, p_grid)?;
    let y = locus_dim_estimate("Y", polys, n, p_grid)?;
    let (dx, dy) = (x.get()?, y.get()?);
    report.checked = 1;
    if dx > dy + 1 {
        report.violations.push(format!("dim X = {dx} > dim Y + 1 = {}", dy + 1));
    }
    report.dimensions = vec![x, y];
    Ok(report)
}

/// `dim C_g <= dim C_f + 1` for `g = f(x_1 y, x_2, .., x_n)`.
pub fn check_intersect_and_fg(f: &Polynomial, p_grid: &[u64]) -> Result<BoundCheckReport> {
    f.quasi_weights()?;
    if !origin_is_critical(f) {
        return Err(Error::OriginNotCritical);
    }
    let g = f.substitute_torus(0)?;
    let mut report = BoundCheckReport::new("critical-locus-fg", Some(f));
    let cf = locus_dim_estimate("C_f", &f.partial_derivatives(), f.num_vars(), p_grid)?;
    let cg = locus_dim_estimate("C_g", &g.partial_derivatives(), g.num_vars(), p_grid)?;
    let (df, dg) = (cf.get()?, cg.get()?);
    report.checked = 1;
    if dg > df + 1 {
        report.violations.push(format!("dim C_g = {dg} > dim C_f + 1 = {}", df + 1));
    }
    report.notes.push(format!("g = {g}"));
    report.dimensions = vec![cf, cg];
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrivlemCase {
    OriginCritical,
    LinearTerm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrivlemVerdict {
    pub case: TrivlemCase,
    pub origin_critical: bool,
    /// `(1-based variable, coefficient)` of the terms `a_i x_i`.
    pub linear_terms: Vec<(usize, String)>,
    /// Exactly one alternative holds.
    pub exclusive: bool,
}

/// Which alternative holds for a nonconstant quasi-homogeneous `f`: 0 is a
/// critical point, or `f` has a term `a_i x_i`.
pub fn check_trivlem(f: &Polynomial) -> Result<TrivlemVerdict> {
    f.quasi_weights()?;
    let n = f.num_vars();
    let zero = vec![BigInt::zero(); n];
    let origin_critical = f.partial_derivatives().iter().all(|d| d.evaluate(&zero).is_zero());
    let linear_terms: Vec<(usize, String)> = f.linear_terms().into_iter().map(|(i, c)| (i + 1, c.to_string())).collect();
    let exclusive = origin_critical != !linear_terms.is_empty();
    let case = if origin_critical { TrivlemCase::OriginCritical } else { TrivlemCase::LinearTerm };
    Ok(TrivlemVerdict { case, origin_critical, linear_terms, exclusive })
}

/// Sums at `ord y = -1, -2` against `c p^(-m (n-d)/2) m^(n-1)`; when 0 is not
/// critical the sums must vanish exactly.
pub fn check_mt2(h: &Polynomial, p_grid: &[u64], opts: &BoundOptions) -> Result<BoundCheckReport> {
    h.quasi_weights()?;
    let n = h.num_vars();
    let mut report = BoundCheckReport::new("mt2", Some(h));
    let d = dimension_of(h, p_grid, &mut report)?;
    let critical = origin_is_critical(h);
    let linear = h.linear_terms();
    let exponent = -((n as f64) - d as f64) / 2.0;
    let cells: Vec<(u64, u32)> = p_grid.iter().flat_map(|&p| [1u32, 2].map(move |m| (p, m))).collect();
    let results: Vec<(u64, u32, Result<ExpSumValue>)> =
        cells.par_iter().map(|&(p, m)| (p, m, s_sum(h, p, m, UnitTwist::ONE, opts.budget))).collect();
    for (p, m, v) in results {
        let v = match v {
            Ok(v) => v,
            Err(Error::BudgetExceeded { points, .. }) | Err(Error::ModulusTooLarge(points)) => {
                report.notes.push(format!("p={p} m={m} skipped: {points} points over budget"));
                continue;
            }
            Err(e) => return Err(e),
        };
        let twists = opts.twists.twists(p);
        if !critical && linear.iter().any(|(_, c)| !(c % BigInt::from(p)).is_zero()) {
            report.checked += 1;
            for &u in &twists {
                if !v.twisted(u).is_exactly_zero() {
                    report.violations.push(format!("S(u/p^{m}) != 0 at p={p}, u={u}"));
                }
            }
        }
        let value = max_over_twists(&v, &twists);
        let shape = (p as f64).powf(m as f64 * exponent) * (m as f64).powi(n as i32 - 1);
        report.grid.push(GridPoint { what: "S".into(), p, q: p, m, face: None, twists: twists.len(), value, shape, ratio: ratio(value, shape) });
    }
    report.finish_fit();
    Ok(report)
}

/// Quasi-homogeneity with the weights reported.
pub fn weights_of(f: &Polynomial) -> Result<QuasiWeights> {
    f.quasi_weights()
}
