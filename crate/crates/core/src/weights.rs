//! Weight functions `g(y)` and their pairings `∫ density(y) g(y) dy` with a
//! signed measure.
//!
//! Three backends are available and are selected by [`pair`]:
//! exact rational integration for polynomial weights, closed-form
//! exponential moments for `cosh` and exponential sums, and adaptive
//! Gauss–Legendre quadrature for everything else. Each backend is also
//! callable directly so they can be checked against one another.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;

use crate::measures::SignedMeasure;
use crate::poly::{
    format_rational, from_f64, int, isolate_roots, midpoint, parse_rational, rat, to_f64, Polynomial,
    Rational,
};

/// Global floor added to every mollified indicator so the weight stays positive.
pub const BUMP_FLOOR: f64 = 1e-6;

/// Gauss–Legendre order per panel.
pub const GL_ORDER: usize = 32;

/// Maximum number of panels the adaptive quadrature may use.
pub const PANEL_BUDGET: usize = 1 << 16;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum WeightError {
    #[error("cannot parse weight {0:?}")]
    Parse(String),
    #[error("invalid weight parameters: {0}")]
    Invalid(String),
    #[error("tolerance must be positive and finite, got {0}")]
    Tolerance(f64),
    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound}")]
    Convergence { estimate: f64, error_bound: f64 },
}

/// An admissible weight `g` of the `y` coordinate.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightSpec {
    Constant(Rational),
    Polynomial(Polynomial),
    /// `cosh(a·y)`.
    Cosh {
        a: f64,
    },
    /// `1 / cosh(y)`.
    Sech,
    /// `Σ c·exp(r·y)` over `(c, r)` terms.
    ExpSum(Vec<(f64, f64)>),
    /// Smoothed `1_[lo, hi]` plus [`BUMP_FLOOR`]; with `symmetrize` the mirror
    /// image `1_[-hi, -lo]` is added as well.
    MollifiedIndicator {
        lo: f64,
        hi: f64,
        eps: f64,
        symmetrize: bool,
    },
}

impl WeightSpec {
    pub fn constant(c: i64) -> Self {
        WeightSpec::Constant(int(c))
    }

    pub fn cosh(a: f64) -> Self {
        WeightSpec::Cosh { a }
    }

    pub fn bump(lo: f64, hi: f64, eps: f64, symmetrize: bool) -> Result<Self, WeightError> {
        let w = WeightSpec::MollifiedIndicator { lo, hi, eps, symmetrize };
        w.check()?;
        Ok(w)
    }

    fn check(&self) -> Result<(), WeightError> {
        match self {
            WeightSpec::Cosh { a } if !a.is_finite() => {
                Err(WeightError::Invalid(format!("cosh rate {a} is not finite")))
            }
            WeightSpec::ExpSum(terms) => {
                if terms.is_empty() {
                    return Err(WeightError::Invalid("empty exponential sum".into()));
                }
                if terms.iter().any(|(c, r)| !c.is_finite() || !r.is_finite()) {
                    return Err(WeightError::Invalid("non-finite exponential term".into()));
                }
                Ok(())
            }
            WeightSpec::MollifiedIndicator { lo, hi, eps, .. } => {
                if !(lo.is_finite() && hi.is_finite() && eps.is_finite()) {
                    return Err(WeightError::Invalid("non-finite bump parameter".into()));
                }
                if lo >= hi {
                    return Err(WeightError::Invalid(format!("bump needs lo < hi, got {lo} >= {hi}")));
                }
                if *eps <= 0.0 {
                    return Err(WeightError::Invalid(format!("bump width must be positive, got {eps}")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Structural evenness, decided from the parameters alone.
    pub fn is_even(&self) -> bool {
        match self {
            WeightSpec::Constant(_) | WeightSpec::Cosh { .. } | WeightSpec::Sech => true,
            WeightSpec::Polynomial(p) => p.is_even(),
            WeightSpec::ExpSum(terms) => {
                let coef =
                    |rate: f64| -> f64 { terms.iter().filter(|(_, r)| *r == rate).map(|(c, _)| c).sum() };
                terms.iter().all(|(_, r)| coef(*r) == coef(-*r))
            }
            WeightSpec::MollifiedIndicator { lo, hi, symmetrize, .. } => *symmetrize || *lo == -*hi,
        }
    }

    /// `c·g` for `c > 0`, when the result is expressible as a weight.
    pub fn scaled(&self, c: f64) -> Option<Self> {
        if !(c.is_finite() && c > 0.0) {
            return None;
        }
        match self {
            WeightSpec::Constant(k) => Some(WeightSpec::Constant(k * from_f64(c).ok()?)),
            WeightSpec::Polynomial(p) => Some(WeightSpec::Polynomial(p.scale(&from_f64(c).ok()?))),
            WeightSpec::Cosh { a } => Some(WeightSpec::ExpSum(vec![(c / 2.0, *a), (c / 2.0, -*a)])),
            WeightSpec::ExpSum(t) => Some(WeightSpec::ExpSum(t.iter().map(|(k, r)| (k * c, *r)).collect())),
            WeightSpec::Sech | WeightSpec::MollifiedIndicator { .. } => None,
        }
    }

    /// Points where the weight changes character sharply; quadrature panels are
    /// split there.
    fn kinks(&self) -> Vec<f64> {
        match self {
            WeightSpec::MollifiedIndicator { lo, hi, eps, symmetrize } => {
                let mut k = vec![lo - eps / 2.0, lo + eps / 2.0, hi - eps / 2.0, hi + eps / 2.0];
                if *symmetrize {
                    let mirrored: Vec<f64> = k.iter().map(|x| -x).collect();
                    k.extend(mirrored);
                }
                k
            }
            _ => Vec::new(),
        }
    }

    /// An upper bound for `|g|` on `[lo, hi]`.
    pub fn sup_bound(&self, lo: f64, hi: f64) -> f64 {
        let m = lo.abs().max(hi.abs());
        match self {
            WeightSpec::Constant(c) => to_f64(c).abs(),
            WeightSpec::Polynomial(p) => {
                p.coeffs_f64().iter().enumerate().map(|(i, c)| c.abs() * m.powi(i as i32)).sum()
            }
            WeightSpec::Cosh { a } => (a * m).cosh(),
            WeightSpec::Sech => 1.0,
            // With nonnegative coefficients the sum is convex, so the endpoints dominate.
            WeightSpec::ExpSum(t) if t.iter().all(|(c, _)| *c >= 0.0) => {
                eval_weight(self, lo).max(eval_weight(self, hi))
            }
            WeightSpec::ExpSum(t) => t.iter().map(|(c, r)| c.abs() * (r.abs() * m).exp()).sum(),
            WeightSpec::MollifiedIndicator { symmetrize, .. } => {
                BUMP_FLOOR + if *symmetrize { 2.0 } else { 1.0 }
            }
        }
    }
}

/// C^∞ step: 0 for `t ≤ 0`, 1 for `t ≥ 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

fn bump(y: f64, lo: f64, hi: f64, eps: f64) -> f64 {
    smooth_step((y - lo) / eps + 0.5) * smooth_step((hi - y) / eps + 0.5)
}

/// Pointwise value `g(y)`.
pub fn eval_weight(g: &WeightSpec, y: f64) -> f64 {
    match g {
        WeightSpec::Constant(c) => to_f64(c),
        WeightSpec::Polynomial(p) => p.eval_f64(y),
        WeightSpec::Cosh { a } => (a * y).cosh(),
        WeightSpec::Sech => 1.0 / y.cosh(),
        WeightSpec::ExpSum(t) => t.iter().map(|(c, r)| c * (r * y).exp()).sum(),
        WeightSpec::MollifiedIndicator { lo, hi, eps, symmetrize } => {
            let mut v = BUMP_FLOOR + bump(y, *lo, *hi, *eps);
            if *symmetrize {
                v += bump(-y, *lo, *hi, *eps);
            }
            v
        }
    }
}

/// Whether `g > 0` on `[a, b]`.
///
/// Exact for polynomial weights. For exponential sums with some negative
/// coefficient the interval is sampled with a Lipschitz margin, doubling the
/// sample count until the margin is met or a budget runs out.
pub fn validate_positive_on(g: &WeightSpec, a: &Rational, b: &Rational) -> bool {
    if a > b || g.check().is_err() {
        return false;
    }
    match g {
        WeightSpec::Constant(c) => c.is_positive(),
        WeightSpec::Polynomial(p) => {
            if p.is_zero() || !p.eval(a).is_positive() {
                return false;
            }
            let width = b - a;
            let res = if width.is_zero() { int(1) } else { width };
            matches!(isolate_roots(p, a, b, &res), Ok(r) if r.is_empty())
        }
        WeightSpec::Cosh { .. } | WeightSpec::Sech | WeightSpec::MollifiedIndicator { .. } => true,
        WeightSpec::ExpSum(terms) => {
            if terms.iter().all(|(c, _)| *c >= 0.0) {
                return terms.iter().any(|(c, _)| *c > 0.0);
            }
            let (lo, hi) = (to_f64(a), to_f64(b));
            let m = lo.abs().max(hi.abs());
            let lipschitz: f64 = terms.iter().map(|(c, r)| (c * r).abs() * (r.abs() * m).exp()).sum();
            let mut n = 64usize;
            while n <= 1 << 20 {
                let h = (hi - lo) / n as f64;
                let values: Vec<f64> = (0..=n).map(|i| eval_weight(g, lo + h * i as f64)).collect();
                let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
                if min <= 0.0 {
                    return false;
                }
                if min > lipschitz * h / 2.0 {
                    return true;
                }
                n *= 2;
            }
            false
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairingMethod {
    ExactRational,
    ClosedForm,
    Quadrature,
}

impl fmt::Display for PairingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairingMethod::ExactRational => "exact_rational",
            PairingMethod::ClosedForm => "closed_form",
            PairingMethod::Quadrature => "quadrature",
        })
    }
}

/// `∫ density · g` together with how it was obtained.
#[derive(Clone, Debug, PartialEq)]
pub struct PairingResult {
    pub value: f64,
    /// Present exactly when `method` is [`PairingMethod::ExactRational`].
    pub exact: Option<Rational>,
    pub method: PairingMethod,
    pub error_bound: f64,
}

impl PairingResult {
    fn exact(v: Rational) -> Self {
        Self { value: to_f64(&v), exact: Some(v), method: PairingMethod::ExactRational, error_bound: 0.0 }
    }

    /// `c·self`, keeping exactness.
    pub fn scaled(&self, c: &Rational) -> Self {
        let cf = to_f64(c);
        Self {
            value: self.value * cf,
            exact: self.exact.as_ref().map(|e| e * c),
            method: self.method,
            error_bound: self.error_bound * cf.abs(),
        }
    }
}

/// Pairs a measure with a weight, choosing the backend from the weight kind.
///
/// The result satisfies `|error| ≤ tol·(1 + |value|)`.
pub fn pair(m: &SignedMeasure, g: &WeightSpec, tol: f64) -> Result<PairingResult, WeightError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(WeightError::Tolerance(tol));
    }
    g.check()?;
    if let Some(r) = pair_exact(m, g) {
        return Ok(r);
    }
    if let Some(r) = pair_closed_form(m, g) {
        if r.error_bound <= tol * (1.0 + r.value.abs()) {
            return Ok(r);
        }
    }
    pair_quadrature(m, g, tol)
}

/// Exact rational pairing; `None` for non-polynomial weights.
pub fn pair_exact(m: &SignedMeasure, g: &WeightSpec) -> Option<PairingResult> {
    let v = match g {
        WeightSpec::Constant(c) => m.density.total() * c,
        WeightSpec::Polynomial(p) => m.density.mul_poly(p).total(),
        _ => return None,
    };
    Some(PairingResult::exact(v))
}

fn exp_terms(g: &WeightSpec) -> Option<Vec<(f64, f64)>> {
    match g {
        WeightSpec::Cosh { a } => Some(vec![(0.5, *a), (0.5, -*a)]),
        WeightSpec::ExpSum(t) => Some(t.clone()),
        _ => None,
    }
}

/// `∫_{-h}^{h} q(u) e^{r u} du` for `q` given by ascending f64 coefficients,
/// with a magnitude estimate for rounding error.
fn centered_exp_moment(q: &[f64], r: f64, h: f64) -> (f64, f64) {
    if q.is_empty() {
        return (0.0, 0.0);
    }
    if r == 0.0 || (r * h).abs() <= 1.0 {
        // Σ_k q_k Σ_n r^n/n! ∫ u^{k+n}, only even k+n survive.
        let mut total = 0.0;
        let mut mag = 0.0;
        for (k, qk) in q.iter().enumerate() {
            if *qk == 0.0 {
                continue;
            }
            let mut coef = 1.0; // r^n / n!
            let mut hp = h.powi(k as i32 + 1); // h^{k+n+1}
            let mut s = 0.0;
            for n in 0..200 {
                if (k + n) % 2 == 0 {
                    let term = coef * 2.0 * hp / (k + n + 1) as f64;
                    s += term;
                    if n > 1 && term.abs() <= 1e-18 * s.abs() {
                        break;
                    }
                }
                if r == 0.0 {
                    break;
                }
                coef *= r / (n + 1) as f64;
                hp *= h;
            }
            total += qk * s;
            mag += (qk * s).abs();
        }
        return (total, mag);
    }
    // Repeated integration by parts: e^{ru} Σ_j (-1)^j q^{(j)}(u) / r^{j+1}.
    let mut derivs = vec![q.to_vec()];
    while derivs.last().is_some_and(|d| d.len() > 1) {
        let d = derivs.last().expect("nonempty");
        derivs.push(d.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect());
    }
    let horner = |c: &[f64], x: f64| c.iter().rev().fold(0.0, |acc, v| acc * x + v);
    let anti = |u: f64| -> (f64, f64) {
        let mut s = 0.0;
        let mut mag = 0.0;
        let mut rp = r;
        for (j, d) in derivs.iter().enumerate() {
            let t = horner(d, u) / rp;
            let t = if j % 2 == 0 { t } else { -t };
            s += t;
            mag += t.abs();
            rp *= r;
        }
        let e = (r * u).exp();
        (e * s, e * mag)
    };
    let (fh, mh) = anti(h);
    let (fl, ml) = anti(-h);
    (fh - fl, mh + ml)
}

/// Closed-form pairing for `cosh` and exponential-sum weights.
///
/// Each piece is recentred at its midpoint; short pieces use the moment
/// series, long ones the integration-by-parts antiderivative.
pub fn pair_closed_form(m: &SignedMeasure, g: &WeightSpec) -> Option<PairingResult> {
    let terms = exp_terms(g)?;
    let mut value = 0.0;
    let mut magnitude = 0.0;
    let mut max_degree = 0;
    for (lo, hi, p) in m.density.segments() {
        if p.is_zero() {
            continue;
        }
        let c = midpoint(lo, hi);
        let h = to_f64(&((hi - lo) / int(2)));
        let q = p.taylor_shift(&c).coeffs_f64();
        max_degree = max_degree.max(q.len());
        let cf = to_f64(&c);
        for (coef, r) in &terms {
            let (v, mag) = centered_exp_moment(&q, *r, h);
            let scale = coef * (r * cf).exp();
            value += scale * v;
            magnitude += (scale * mag).abs();
        }
    }
    Some(PairingResult {
        value,
        exact: None,
        method: PairingMethod::ClosedForm,
        error_bound: 8.0 * f64::EPSILON * magnitude * (max_degree as f64 + 2.0),
    })
}

static GAUSS_LEGENDRE: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| gauss_legendre(GL_ORDER));

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl_panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let (nodes, weights) = &*GAUSS_LEGENDRE;
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    let mut mag = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        let v = w * f(c + h * x);
        s += v;
        mag += v.abs();
    }
    (s * h, mag * h.abs())
}

struct Panel {
    a: f64,
    b: f64,
    piece: usize,
    left: f64,
    right: f64,
    err: f64,
    mag: f64,
}

impl Panel {
    fn new(f: &dyn Fn(f64) -> f64, a: f64, b: f64, piece: usize, whole: f64) -> Self {
        let mid = 0.5 * (a + b);
        let (left, ml) = gl_panel(f, a, mid);
        let (right, mr) = gl_panel(f, mid, b);
        Self { a, b, piece, left, right, err: (whole - left - right).abs(), mag: ml + mr }
    }

    fn value(&self) -> f64 {
        self.left + self.right
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Adaptive Gauss–Legendre pairing, valid for every weight kind.
///
/// Panels start at density breakpoints and weight kinks; the panel with the
/// largest estimated error is bisected until the total estimate meets
/// `tol·(1 + |value|)` or [`PANEL_BUDGET`] is reached.
pub fn pair_quadrature(m: &SignedMeasure, g: &WeightSpec, tol: f64) -> Result<PairingResult, WeightError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(WeightError::Tolerance(tol));
    }
    g.check()?;
    let pieces: Vec<Vec<f64>> = m.density.pieces().iter().map(Polynomial::coeffs_f64).collect();
    let kinks = g.kinks();
    let integrands: Vec<Box<dyn Fn(f64) -> f64 + '_>> = pieces
        .iter()
        .map(|c| {
            Box::new(move |y: f64| c.iter().rev().fold(0.0, |acc, v| acc * y + v) * eval_weight(g, y))
                as Box<dyn Fn(f64) -> f64>
        })
        .collect();
    let mut heap = BinaryHeap::new();
    for (i, (lo, hi, _)) in m.density.segments().enumerate() {
        let (lo, hi) = (to_f64(lo), to_f64(hi));
        let mut cuts = vec![lo];
        let mut inner: Vec<f64> = kinks.iter().cloned().filter(|k| *k > lo && *k < hi).collect();
        inner.sort_by(f64::total_cmp);
        cuts.extend(inner);
        cuts.push(hi);
        for w in cuts.windows(2) {
            let f = &*integrands[i];
            let (whole, _) = gl_panel(f, w[0], w[1]);
            heap.push(Panel::new(f, w[0], w[1], i, whole));
        }
    }
    let totals = |heap: &BinaryHeap<Panel>| -> (f64, f64, f64) {
        heap.iter().fold((0.0, 0.0, 0.0), |(v, e, m), p| (v + p.value(), e + p.err, m + p.mag))
    };
    loop {
        let (value, err, mag) = totals(&heap);
        let floor = 64.0 * f64::EPSILON * mag;
        let target = (tol * (1.0 + value.abs())).max(floor);
        if err <= target {
            return Ok(PairingResult {
                value,
                exact: None,
                method: PairingMethod::Quadrature,
                error_bound: err + floor,
            });
        }
        if heap.len() >= PANEL_BUDGET {
            return Err(WeightError::Convergence { estimate: value, error_bound: err + floor });
        }
        // Split the worst panels in a batch to keep the bookkeeping cheap.
        let batch = (heap.len() / 8).max(1);
        for _ in 0..batch {
            let Some(p) = heap.pop() else { break };
            let f = &*integrands[p.piece];
            let mid = 0.5 * (p.a + p.b);
            heap.push(Panel::new(f, p.a, mid, p.piece, p.left));
            heap.push(Panel::new(f, mid, p.b, p.piece, p.right));
        }
    }
}

/// Cases with a known closed form for `μ(cosh(a·))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClosedFormCase {
    /// The quadric threefold `Q³`, catalog case 3-2-18.
    Q3,
    /// Mori–Mukai 2-29, catalog case 3-2-19.
    MM2_29,
}

impl ClosedFormCase {
    pub fn dm_id(self) -> &'static str {
        match self {
            ClosedFormCase::Q3 => "3-2-18",
            ClosedFormCase::MM2_29 => "3-2-19",
        }
    }

    pub fn from_dm_id(id: &str) -> Option<Self> {
        match id {
            "3-2-18" => Some(ClosedFormCase::Q3),
            "3-2-19" => Some(ClosedFormCase::MM2_29),
            _ => None,
        }
    }
}

#[derive(Clone, Copy)]
enum Hyp {
    Poly,
    Sinh,
    Cosh,
}

/// `c · a^power · hyp(freq·a)`.
struct Term {
    c: (i64, i64),
    power: u32,
    hyp: Hyp,
    freq: i64,
}

struct ClosedForm {
    prefactor: i64,
    terms: Vec<Term>,
}

const fn term(c: (i64, i64), power: u32, hyp: Hyp, freq: i64) -> Term {
    Term { c, power, hyp, freq }
}

/// The bracketed part of each closed form, `μ(g_a) = prefactor · E(a) / a⁴`.
/// For 2-29 the product `sinh(a)cosh(2a)` is expanded as `(sinh 3a − sinh a)/2`.
fn closed_form(case: ClosedFormCase) -> ClosedForm {
    match case {
        ClosedFormCase::Q3 => ClosedForm {
            prefactor: -16,
            terms: vec![
                term((6, 1), 2, Hyp::Poly, 0),
                term((1, 1), 1, Hyp::Sinh, 3),
                term((-2, 1), 0, Hyp::Cosh, 3),
                term((2, 1), 0, Hyp::Poly, 0),
            ],
        },
        ClosedFormCase::MM2_29 => ClosedForm {
            prefactor: 32,
            terms: vec![
                term((-1, 1), 0, Hyp::Cosh, 1),
                term((1, 1), 0, Hyp::Cosh, 3),
                term((-2, 1), 1, Hyp::Sinh, 1),
                term((-1, 2), 1, Hyp::Sinh, 3),
                term((1, 2), 1, Hyp::Sinh, 1),
                term((-1, 1), 2, Hyp::Cosh, 1),
            ],
        },
    }
}

const SERIES_TERMS: usize = 40;

/// Exact Taylor coefficients of `prefactor · E(a) / a⁴` about `a = 0`, in powers of `a²`.
fn series_coefficients(case: ClosedFormCase) -> Vec<Rational> {
    let form = closed_form(case);
    let n = SERIES_TERMS + 4;
    let mut e = vec![Rational::zero(); n + 1];
    for t in &form.terms {
        let c = rat(t.c.0, t.c.1);
        match t.hyp {
            Hyp::Poly => e[t.power as usize] += c,
            Hyp::Sinh | Hyp::Cosh => {
                let parity = if matches!(t.hyp, Hyp::Sinh) { 1 } else { 0 };
                let mut fact = int(1);
                let mut fpow = int(1);
                for k in 0..=n {
                    if k > 0 {
                        fact *= int(k as i64);
                        fpow *= int(t.freq);
                    }
                    let idx = k + t.power as usize;
                    if k % 2 == parity && idx <= n {
                        e[idx] += &c * &fpow / &fact;
                    }
                }
            }
        }
    }
    debug_assert!(e[..4].iter().all(Zero::is_zero));
    debug_assert!(e.iter().skip(1).step_by(2).all(Zero::is_zero));
    // Even function of `a`: keep the coefficients of a^0, a^2, ... after division by a⁴.
    e[4..].iter().step_by(2).map(|c| c * int(form.prefactor)).collect()
}

static SERIES: Lazy<[Vec<Rational>; 2]> =
    Lazy::new(|| [series_coefficients(ClosedFormCase::Q3), series_coefficients(ClosedFormCase::MM2_29)]);

fn series_for(case: ClosedFormCase) -> &'static [Rational] {
    match case {
        ClosedFormCase::Q3 => &SERIES[0],
        ClosedFormCase::MM2_29 => &SERIES[1],
    }
}

/// Exact value of the closed form at `a = 0`, the limit of the series.
pub fn mu_ga_limit(case: ClosedFormCase) -> Rational {
    series_for(case)[0].clone()
}

/// `μ(cosh(a·))` from the closed form. For `|a| ≤ 1` the removable
/// singularity at zero is avoided by summing the exact Taylor series.
pub fn mu_ga_closed_form(case: ClosedFormCase, a: f64) -> f64 {
    let a = a.abs();
    if a <= 1.0 {
        let coeffs = series_for(case);
        let a2 = a * a;
        return coeffs.iter().rev().fold(0.0, |acc, c| acc * a2 + c.to_f64().unwrap_or(f64::NAN));
    }
    let form = closed_form(case);
    let e: f64 = form
        .terms
        .iter()
        .map(|t| {
            let c = t.c.0 as f64 / t.c.1 as f64;
            let h = match t.hyp {
                Hyp::Poly => 1.0,
                Hyp::Sinh => (t.freq as f64 * a).sinh(),
                Hyp::Cosh => (t.freq as f64 * a).cosh(),
            };
            c * a.powi(t.power as i32) * h
        })
        .sum();
    form.prefactor as f64 * e / a.powi(4)
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::Constant(c) => write!(f, "const:{}", format_rational(c)),
            WeightSpec::Polynomial(p) => {
                let coeffs: Vec<String> = if p.is_zero() {
                    vec!["0".into()]
                } else {
                    p.coeffs().iter().map(format_rational).collect()
                };
                write!(f, "poly:{}", coeffs.join(","))
            }
            WeightSpec::Cosh { a } => write!(f, "cosh:a={a}"),
            WeightSpec::Sech => f.write_str("sech"),
            WeightSpec::ExpSum(t) => {
                let parts: Vec<String> = t.iter().map(|(c, r)| format!("({c},{r})")).collect();
                write!(f, "expsum:{}", parts.join(";"))
            }
            WeightSpec::MollifiedIndicator { lo, hi, eps, symmetrize } => {
                write!(f, "bump:lo={lo},hi={hi},eps={eps},sym={symmetrize}")
            }
        }
    }
}

fn parse_f64(s: &str) -> Result<f64, WeightError> {
    let v: f64 = s.trim().parse().map_err(|_| WeightError::Parse(s.to_string()))?;
    if !v.is_finite() {
        return Err(WeightError::Parse(s.to_string()));
    }
    Ok(v)
}

fn key_values(body: &str) -> Result<Vec<(&str, &str)>, WeightError> {
    body.split(',')
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| WeightError::Parse(kv.to_string()))
        })
        .collect()
}

impl FromStr for WeightSpec {
    type Err = WeightError;

    /// Parses `const:1`, `poly:1,0,2`, `cosh:a=1.5`, `sech`,
    /// `expsum:(c,r);(c,r)` and `bump:lo=1.5,hi=3,eps=0.05,sym=true`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || WeightError::Parse(s.to_string());
        let (kind, body) = s.split_once(':').unwrap_or((s, ""));
        let spec = match kind.trim() {
            "sech" if body.trim().is_empty() => WeightSpec::Sech,
            "const" => WeightSpec::Constant(parse_rational(body.trim()).map_err(|_| bad())?),
            "poly" => {
                let coeffs = body
                    .split(',')
                    .map(|c| parse_rational(c.trim()))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| bad())?;
                WeightSpec::Polynomial(Polynomial::new(coeffs))
            }
            "cosh" => {
                let body = body.trim();
                let a = body.strip_prefix("a=").unwrap_or(body);
                WeightSpec::Cosh { a: parse_f64(a)? }
            }
            "expsum" => {
                let terms = body
                    .split(';')
                    .map(|t| {
                        let inner =
                            t.trim().strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
                        let (c, r) = inner.split_once(',').ok_or_else(bad)?;
                        Ok((parse_f64(c)?, parse_f64(r)?))
                    })
                    .collect::<Result<Vec<_>, WeightError>>()?;
                WeightSpec::ExpSum(terms)
            }
            "bump" => {
                let (mut lo, mut hi, mut eps, mut sym) = (None, None, None, false);
                for (k, v) in key_values(body)? {
                    match k {
                        "lo" => lo = Some(parse_f64(v)?),
                        "hi" => hi = Some(parse_f64(v)?),
                        "eps" => eps = Some(parse_f64(v)?),
                        "sym" => sym = v.parse().map_err(|_| bad())?,
                        _ => return Err(bad()),
                    }
                }
                WeightSpec::MollifiedIndicator {
                    lo: lo.ok_or_else(bad)?,
                    hi: hi.ok_or_else(bad)?,
                    eps: eps.ok_or_else(bad)?,
                    symmetrize: sym,
                }
            }
            _ => return Err(bad()),
        };
        spec.check()?;
        Ok(spec)
    }
}
