//! Weighted K-stability verdicts from the two scalar conditions `ν(g) = 0`
//! and `μ(g) > 0`, threshold search along the `cosh` family, and
//! weight-insensitivity certificates `μ + λν ≥ 0`.

use std::fmt;

use num_traits::Zero;

use crate::measures::{CaseKind, MeasureError, MeasurePair};
use crate::poly::{
    from_f64, int, is_nonnegative_on, isolate_roots, midpoint, rat, to_f64, PieceProof, PiecewisePoly,
    Polynomial, Rational,
};
use crate::weights::{
    mu_ga_closed_form, mu_ga_limit, pair, pair_quadrature, validate_positive_on, ClosedFormCase,
    PairingResult, WeightError, WeightSpec,
};

/// Default relative tolerance for verdicts.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum StabilityError {
    #[error("weight {0} is not positive on the support")]
    NonPositiveWeight(String),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("no sign change on [{lo}, {hi}]: mu = {f_lo} and {f_hi}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("{0} is not symmetric under y -> -y, so even weights do not kill the Futaki term")]
    NotSymmetric(String),
    #[error("no destabilizing weight within {0} attempts")]
    SearchFailed(usize),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Polystable,
    StrictlySemistable,
    Unstable,
    FutakiNonzero,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Polystable => "polystable",
            Classification::StrictlySemistable => "strictly_semistable",
            Classification::Unstable => "unstable",
            Classification::FutakiNonzero => "futaki_nonzero",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityVerdict {
    /// `ν(g)`.
    pub futaki: PairingResult,
    /// `μ(g)`.
    pub margin: PairingResult,
    pub classification: Classification,
    pub tolerance: f64,
}

impl StabilityVerdict {
    fn decide(futaki: f64, margin: f64, tolerance: f64) -> Classification {
        if futaki.abs() > tolerance {
            Classification::FutakiNonzero
        } else if margin > tolerance {
            Classification::Polystable
        } else if margin < -tolerance {
            Classification::Unstable
        } else {
            Classification::StrictlySemistable
        }
    }
}

/// Tolerance used by [`classify`]: `rel_tol · (‖μ‖₁ + ‖ν‖₁) · sup g`, and never
/// below the error bounds of the two pairings.
pub fn verdict_tolerance(case: &MeasurePair, g: &WeightSpec, rel_tol: f64) -> f64 {
    let (lo, hi) = case.mu.density.support_f64();
    let mass = case.mu.density.abs_mass() + case.nu.density.abs_mass();
    rel_tol * mass * g.sup_bound(lo, hi)
}

/// Classifies `case` against the weight `g`.
///
/// When `g` is structurally even and the case is symmetric under `y ↦ −y`,
/// `ν(g)` is set to an exact zero instead of being integrated.
pub fn classify(
    case: &MeasurePair,
    g: &WeightSpec,
    rel_tol: f64,
) -> Result<StabilityVerdict, StabilityError> {
    if !(rel_tol.is_finite() && rel_tol > 0.0) {
        return Err(WeightError::Tolerance(rel_tol).into());
    }
    let (lo, hi) = case.support();
    if !validate_positive_on(g, lo, hi) {
        return Err(StabilityError::NonPositiveWeight(g.to_string()));
    }
    let pair_tol = rel_tol * 1e-3;
    let margin = pair(&case.mu, g, pair_tol)?;
    let futaki = if g.is_even() && case.y_symmetric {
        PairingResult {
            value: 0.0,
            exact: Some(Rational::zero()),
            method: crate::weights::PairingMethod::ExactRational,
            error_bound: 0.0,
        }
    } else {
        pair(&case.nu, g, pair_tol)?
    };
    let tolerance = verdict_tolerance(case, g, rel_tol).max(margin.error_bound).max(futaki.error_bound);
    let classification = StabilityVerdict::decide(futaki.value, margin.value, tolerance);
    Ok(StabilityVerdict { futaki, margin, classification, tolerance })
}

/// `ξ₁·(−μ(g)) + ξ₂·ν(g)`. Semistability means this is `≤ 0` on the
/// half-plane `ξ₁ ≥ 0`.
pub fn pairing_along(
    case: &MeasurePair,
    xi: (f64, f64),
    g: &WeightSpec,
    tol: f64,
) -> Result<f64, StabilityError> {
    let mu = pair(&case.mu, g, tol)?.value;
    let nu = if g.is_even() && case.y_symmetric { 0.0 } else { pair(&case.nu, g, tol)?.value };
    Ok(-xi.0 * mu + xi.1 * nu)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdResult {
    pub a0: f64,
    /// Final bracket, with `μ` of opposite signs at the two ends.
    pub bracket: (f64, f64),
    /// `μ(g_{a0})` from the closed form.
    pub residual: f64,
    pub iterations: usize,
    /// `μ(g_{a0})` recomputed by adaptive quadrature.
    pub cross_check: f64,
}

/// Finds `a₀` with `μ(cosh(a₀·)) = 0` inside `bracket`.
///
/// Bisects to a short bracket, then switches to the Illinois variant of
/// regula falsi, which keeps the bracket while converging superlinearly.
/// Stops when `|μ| ≤ tol·μ(1)`.
pub fn find_threshold(
    case: ClosedFormCase,
    bracket: (f64, f64),
    tol: f64,
) -> Result<ThresholdResult, StabilityError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(WeightError::Tolerance(tol).into());
    }
    let (mut lo, mut hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(StabilityError::Invalid(format!("bracket ({lo}, {hi})")));
    }
    let f = |a: f64| mu_ga_closed_form(case, a);
    let (mut f_lo, mut f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 || f_hi == 0.0 || f_lo.signum() == f_hi.signum() {
        if f_lo == 0.0 || f_hi == 0.0 {
            let a0 = if f_lo == 0.0 { lo } else { hi };
            return Ok(threshold_result(case, a0, (lo, hi), 0.0, 0));
        }
        return Err(StabilityError::Bracket { lo, hi, f_lo, f_hi });
    }
    let target = tol * to_f64(&mu_ga_limit(case)).abs();
    let mut iterations = 0;
    while hi - lo > 1e-3 * (1.0 + lo.abs()) {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
    }
    let mut side = 0i8;
    let (mut a, mut fa) = if f_lo.abs() < f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
    while fa.abs() > target && iterations < 200 {
        iterations += 1;
        a = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if !(a > lo && a < hi) {
            a = 0.5 * (lo + hi);
        }
        fa = f(a);
        if fa == 0.0 {
            lo = a;
            hi = a;
            break;
        }
        if fa.signum() == f_lo.signum() {
            lo = a;
            f_lo = fa;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = a;
            f_hi = fa;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
        if hi - lo <= 4.0 * f64::EPSILON * a.abs() {
            break;
        }
    }
    Ok(threshold_result(case, a, (lo, hi), fa, iterations))
}

fn threshold_result(
    case: ClosedFormCase,
    a0: f64,
    bracket: (f64, f64),
    residual: f64,
    iterations: usize,
) -> ThresholdResult {
    let cross_check = MeasurePair::by_id(case.dm_id())
        .and_then(|p| pair_quadrature(&p.mu, &WeightSpec::cosh(a0), 1e-13).ok())
        .map_or(f64::NAN, |r| r.value);
    ThresholdResult { a0, bracket, residual, iterations, cross_check }
}

/// Exact evidence that `μ + λν` is a positive measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub lambda: Rational,
    pub combined_density: PiecewisePoly,
    pub proofs: Vec<PieceProof>,
}

impl Certificate {
    /// Re-derives the combined density and its sign proof from scratch.
    pub fn verify(&self, case: &MeasurePair) -> bool {
        let expected = case.mu.density.add(&case.nu.density.scale(&self.lambda));
        if !expected.same_function(&self.combined_density) {
            return false;
        }
        check_lambda(case, &self.lambda).is_some_and(|c| c.proofs == self.proofs)
    }
}

fn check_lambda(case: &MeasurePair, lambda: &Rational) -> Option<Certificate> {
    let combined = case.mu.density.add(&case.nu.density.scale(lambda));
    // Cheap rejection before the exact proof.
    for (lo, hi, p) in combined.segments() {
        if p.eval(&midpoint(lo, hi)) < Rational::zero() {
            return None;
        }
    }
    let (lo, hi) = combined.support();
    let report = is_nonnegative_on(&combined, &lo.clone(), &hi.clone());
    if !report.nonnegative || report.has_zero_piece {
        return None;
    }
    Some(Certificate { lambda: lambda.clone(), combined_density: combined, proofs: report.proofs })
}

/// The order in which `λ` values are tried: `0`, then `2` and `2/3`, then
/// the grid `lo + (hi − lo)·k/grid` for `k = 0..=grid`.
pub fn lambda_candidates(lambda_range: (&Rational, &Rational), grid: usize) -> Vec<Rational> {
    let (lo, hi) = lambda_range;
    let mut out = vec![int(0), int(2), rat(2, 3)];
    let n = int(grid.max(1) as i64);
    for k in 0..=grid.max(1) {
        out.push(lo + (hi - lo) * int(k as i64) / &n);
    }
    let mut seen = std::collections::HashSet::new();
    out.retain(|x| seen.insert(x.clone()));
    out
}

/// Searches for `λ` with `μ + λν ≥ 0`, not identically zero on any piece.
///
/// `None` only means no candidate worked; it is not a proof that the case is
/// weight-sensitive.
pub fn insensitivity_certificate(
    case: &MeasurePair,
    lambda_range: (&Rational, &Rational),
    grid: usize,
) -> Option<Certificate> {
    lambda_candidates(lambda_range, grid).iter().find_map(|l| check_lambda(case, l))
}

/// Default search set used by [`insensitivity_certificate`] callers.
pub fn default_lambda_range() -> (Rational, Rational) {
    (int(-10), int(10))
}

/// Finds an even weight with `ν(g) = 0` and `μ(g) < 0`.
///
/// Quadrics use a symmetrized bump on `[(n−2)/(n−3), n−2]` whose edge width is
/// halved from a quarter of the interval; every other symmetric case uses
/// `cosh(a·)` with `a` doubled from 1.
pub fn destabilizing_weight(
    case: &MeasurePair,
    budget: usize,
    rel_tol: f64,
) -> Result<(WeightSpec, StabilityVerdict), StabilityError> {
    if !case.y_symmetric {
        return Err(StabilityError::NotSymmetric(case.label.clone()));
    }
    let candidates: Box<dyn Iterator<Item = WeightSpec>> = match case.kind {
        CaseKind::Quadric { n } => {
            let lo = (n - 2) as f64 / (n - 3) as f64;
            let hi = (n - 2) as f64;
            let eps0 = (hi - lo) / 4.0;
            Box::new(
                (0..budget)
                    .filter_map(move |i| WeightSpec::bump(lo, hi, eps0 / 2f64.powi(i as i32), true).ok()),
            )
        }
        _ => Box::new((0..budget).map(|i| WeightSpec::cosh(2f64.powi(i as i32)))),
    };
    for g in candidates {
        let v = classify(case, &g, rel_tol)?;
        if v.classification == Classification::Unstable {
            return Ok((g, v));
        }
    }
    Err(StabilityError::SearchFailed(budget))
}

/// `t₀` for the log pair, where `μ_t(1)` vanishes.
#[derive(Clone, Debug, PartialEq)]
pub struct LogPairThreshold {
    pub t0: f64,
    /// Rational interval containing `t₀`, no wider than the requested tolerance.
    pub interval: (Rational, Rational),
    /// `μ_t(1)` as a polynomial in `t`.
    pub mass_polynomial: Polynomial,
}

impl LogPairThreshold {
    /// A rational point of the isolating interval.
    pub fn t0_rational(&self) -> Rational {
        midpoint(&self.interval.0, &self.interval.1)
    }
}

fn lagrange(points: &[(Rational, Rational)]) -> Polynomial {
    let mut out = Polynomial::zero();
    for (i, (xi, yi)) in points.iter().enumerate() {
        let mut basis = Polynomial::constant(yi.clone());
        for (j, (xj, _)) in points.iter().enumerate() {
            if i != j {
                let factor = Polynomial::affine(-xj.clone(), int(1)).scale(&(int(1) / (xi - xj)));
                basis = &basis * &factor;
            }
        }
        out = &out + &basis;
    }
    out
}

/// Locates `t₀ ∈ (0, 1)` with `μ_{t₀}(1) = 0`.
///
/// `μ_t(1)` is computed exactly from the log-pair polytopes at seven rational
/// `t` and interpolated (the slice bounds are affine in `t`, so the mass is a
/// polynomial of degree at most six); its root in `(0, 1)` is then isolated
/// exactly and refined to `tol`.
pub fn logpair_t0(tol: f64) -> Result<LogPairThreshold, StabilityError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(WeightError::Tolerance(tol).into());
    }
    let mut points = Vec::new();
    for k in 0..7 {
        let t = rat(k, 8);
        let case = MeasurePair::logpair(&t)?;
        points.push((t, case.mu.density.total()));
    }
    let mass = lagrange(&points);
    let res = from_f64(tol).map_err(|_| WeightError::Tolerance(tol))?;
    let roots =
        isolate_roots(&mass, &int(0), &int(1), &res).map_err(|e| StabilityError::Invalid(e.to_string()))?;
    let root = roots
        .into_iter()
        .find(|r| r.lo > int(0) && r.hi < int(1))
        .ok_or_else(|| StabilityError::Invalid("no log-pair threshold in (0, 1)".into()))?;
    Ok(LogPairThreshold { t0: root.midpoint_f64(), interval: (root.lo, root.hi), mass_polynomial: mass })
}
