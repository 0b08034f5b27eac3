//! Signed measures `μ` and `ν` obtained by integrating a moment polytope
//! fibre by fibre, and the built-in case catalog.
//!
//! For a polytope `P` with Duistermaat–Heckman density `x^k` and point
//! `κ = (κ_x, κ_y)`, the densities in `y` are
//!
//! ```text
//! ν(y) = (y − κ_y) ∫_{slice(y)} x^k dx
//! μ(y) =           ∫_{slice(y)} (x − κ_x) x^k dx
//! ```
//!
//! Both are polynomial between consecutive vertex heights, since slice
//! endpoints are affine there. The global constant of the density is dropped:
//! every stability verdict is invariant under positive rescaling.

use std::fmt;

use once_cell::sync::Lazy;

use crate::geometry::{GeometryError, MomentPolytope, Point};
use crate::poly::{format_rational, int, PiecewisePoly, Polynomial, Rational};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MeasureError {
    #[error("log-pair coefficient t = {0} outside the accepted range [0, 1)")]
    LogPairRange(String),
    #[error("quadric family needs n >= 5, got {0}")]
    QuadricRange(i64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    Mu,
    Nu,
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasureKind::Mu => "mu",
            MeasureKind::Nu => "nu",
        })
    }
}

/// A density in `y`, tagged with which of the two measures it is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedMeasure {
    pub density: PiecewisePoly,
    pub kind: MeasureKind,
    pub origin: String,
}

impl SignedMeasure {
    pub fn support(&self) -> (&Rational, &Rational) {
        self.density.support()
    }
}

/// Antiderivative of `x^k · (x − shift)` in `x`.
fn fibre_antiderivative(k: u32, shift: &Rational) -> Polynomial {
    let xk = Polynomial::monomial(int(1), k as usize);
    (&xk * &Polynomial::affine(-shift.clone(), int(1))).antiderivative()
}

fn fibre_density(
    polytope: &MomentPolytope,
    piece: impl Fn(&Polynomial, &Polynomial) -> Polynomial,
) -> PiecewisePoly {
    let bps = polytope.y_breakpoints();
    let pieces = bps
        .windows(2)
        .map(|w| {
            let (left, right) =
                polytope.boundaries_between(&w[0], &w[1]).expect("breakpoints lie inside the y-range");
            piece(&left, &right)
        })
        .collect();
    PiecewisePoly::new(bps, pieces).expect("vertex heights are sorted and distinct")
}

/// `ν` density of a polytope.
pub fn nu_density(polytope: &MomentPolytope) -> SignedMeasure {
    let k = polytope.dh_exponent();
    let anti = Polynomial::monomial(int(1) / int(k as i64 + 1), k as usize + 1);
    let height = Polynomial::affine(-polytope.kappa().y.clone(), int(1));
    let density = fibre_density(polytope, |l, r| &height * &(&anti.compose(r) - &anti.compose(l)));
    SignedMeasure { density, kind: MeasureKind::Nu, origin: String::new() }
}

/// `μ` density of a polytope.
pub fn mu_density(polytope: &MomentPolytope) -> SignedMeasure {
    let anti = fibre_antiderivative(polytope.dh_exponent(), &polytope.kappa().x);
    let density = fibre_density(polytope, |l, r| &anti.compose(r) - &anti.compose(l));
    SignedMeasure { density, kind: MeasureKind::Mu, origin: String::new() }
}

/// One of the built-in rank-two threefold cases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseData {
    pub dm_id: &'static str,
    pub mori_mukai: &'static str,
    /// Vertices in the order they are listed; `polytope` stores them
    /// counterclockwise.
    pub listed_vertices: Vec<Point>,
    pub polytope: MomentPolytope,
    pub notes: Vec<&'static str>,
}

const HALF_PLANE_NOTE: &str =
    "valuation cone is a half-plane: unique equivariant special test configuration up to twist";

fn threefold(dm_id: &'static str, mm: &'static str, vs: &[(i64, i64)], extra: &[&'static str]) -> CaseData {
    let listed_vertices: Vec<Point> = vs.iter().map(|&(x, y)| Point::from_i64(x, y)).collect();
    let polytope = MomentPolytope::new(listed_vertices.clone(), Point::from_i64(2, 0), 1)
        .expect("catalog polytopes are valid");
    let mut notes = vec![HALF_PLANE_NOTE];
    notes.extend_from_slice(extra);
    CaseData { dm_id, mori_mukai: mm, listed_vertices, polytope, notes }
}

static CATALOG: Lazy<Vec<CaseData>> = Lazy::new(|| {
    vec![
        threefold(
            "3-2-3",
            "4-8",
            &[(0, -1), (4, -1), (4, 0), (2, 1), (0, 1)],
            &["blowup of P1xP1xP1 along a curve of degree (0,1,1)"],
        ),
        threefold(
            "3-2-4",
            "1-16",
            &[(0, 0), (3, -3), (3, 3)],
            &["quadric threefold Q3, first rank-two spherical action"],
        ),
        threefold(
            "3-2-5",
            "2-32",
            &[(0, 0), (2, -2), (4, 0), (2, 2)],
            &["divisor W of bidegree (1,1) in P2xP2"],
        ),
        threefold("3-2-6", "2-31", &[(0, 0), (2, -2), (3, -1), (3, 3)], &["blowup of Q3 along a line"]),
        threefold(
            "3-2-8",
            "3-24",
            &[(0, 0), (1, -1), (3, -1), (4, 0), (2, 2)],
            &["complete intersection of degrees (1,1,0) and (0,1,1) in P1xP2xP2"],
        ),
        threefold(
            "3-2-9",
            "3-20",
            &[(0, 0), (2, -2), (3, -1), (3, 1), (2, 2)],
            &["blowup of Q3 in two disjoint lines"],
        ),
        threefold(
            "3-2-11",
            "4-7",
            &[(0, 0), (1, -1), (3, -1), (4, 0), (3, 1), (1, 1)],
            &["blowup of W along curves of degree (1,0) and (0,1)"],
        ),
        threefold(
            "3-2-17",
            "3-22",
            &[(0, -1), (2, -1), (6, -1), (6, 0), (2, 1), (0, 1)],
            &["blowup of P1xP2 along a conic in a P2 fibre"],
        ),
        threefold(
            "3-2-18",
            "1-16",
            &[(0, -3), (6, 0), (0, 3)],
            &[
                "quadric threefold Q3, second rank-two spherical action",
                "central fibre: singular quadric x0*x2 - x1^2 = 0, Gorenstein toric, reflexive ID 2",
            ],
        ),
        threefold(
            "3-2-19",
            "2-29",
            &[(0, 3), (4, 1), (4, -1), (0, -3)],
            &["blowup of Q3 along a conic", "central fibre: Gorenstein toric, reflexive ID 19"],
        ),
        threefold("3-2-21", "2-30", &[(0, 3), (6, 0), (4, -1), (0, -1)], &["blowup of Q3 at a point"]),
        threefold(
            "3-2-23",
            "3-19",
            &[(0, -1), (4, -1), (6, 0), (4, 1), (0, 1)],
            &["blowup of Q3 at two points not on a line"],
        ),
    ]
});

/// The twelve built-in threefold cases.
pub fn catalog() -> &'static [CaseData] {
    &CATALOG
}

pub fn find_case(dm_id: &str) -> Option<&'static CaseData> {
    catalog().iter().find(|c| c.dm_id == dm_id)
}

pub fn cases_by_mori_mukai(mm: &str) -> Vec<&'static CaseData> {
    catalog().iter().filter(|c| c.mori_mukai == mm).collect()
}

fn check_logpair_t(t: &Rational) -> Result<(), MeasureError> {
    if *t < int(0) || *t >= int(1) {
        return Err(MeasureError::LogPairRange(format_rational(t)));
    }
    Ok(())
}

/// Polytope of the 2-29 log pair `(X, tE)`: vertices `±(0, 3)`, `±(4 − 2t, 1 + t)`.
pub fn logpair_polytope(t: &Rational) -> Result<MomentPolytope, MeasureError> {
    check_logpair_t(t)?;
    let x = int(4) - int(2) * t;
    let y = int(1) + t;
    Ok(MomentPolytope::new(
        vec![
            Point::from_i64(0, 3),
            Point::from_i64(0, -3),
            Point::new(x.clone(), -y.clone()),
            Point::new(x, y),
        ],
        Point::from_i64(2, 0),
        1,
    )?)
}

/// `(μ_t, ν_t)` for the log pair.
pub fn logpair_measures(t: &Rational) -> Result<(SignedMeasure, SignedMeasure), MeasureError> {
    let p = logpair_polytope(t)?;
    let origin = format!("logpair t={}", format_rational(t));
    let mut mu = mu_density(&p);
    let mut nu = nu_density(&p);
    mu.origin = origin.clone();
    nu.origin = origin;
    Ok((mu, nu))
}

fn check_quadric_n(n: i64) -> Result<(), MeasureError> {
    if n < 5 {
        return Err(MeasureError::QuadricRange(n));
    }
    Ok(())
}

/// Triangle `x ≥ 0, x ≤ 2n − 4 ± 2y` for the quadric `Q^{n−2}`, with
/// `κ = (2n − 8, 0)` and density `x^{n−4}`.
pub fn quadric_polytope(n: i64) -> Result<MomentPolytope, MeasureError> {
    check_quadric_n(n)?;
    Ok(MomentPolytope::new(
        vec![Point::from_i64(0, -(n - 2)), Point::from_i64(2 * n - 4, 0), Point::from_i64(0, n - 2)],
        Point::from_i64(2 * n - 8, 0),
        (n - 4) as u32,
    )?)
}

/// Even-folded `μ` density of `Q^{n−2}` from its closed form
/// `4/((n−2)(n−3)) · (2n−4−2y)^{n−3} (n−2−(n−3)y)` on `[0, n−2]`.
pub fn quadric_mu_density(n: i64) -> Result<SignedMeasure, MeasureError> {
    check_quadric_n(n)?;
    let c = int(4) / int((n - 2) * (n - 3));
    let base = Polynomial::affine(int(2 * n - 4), int(-2)).pow((n - 3) as u32);
    let affine = Polynomial::affine(int(n - 2), int(-(n - 3)));
    let density = PiecewisePoly::single(int(0), int(n - 2), (&base * &affine).scale(&c)).expect("n - 2 > 0");
    Ok(SignedMeasure { density, kind: MeasureKind::Mu, origin: format!("quadric n={n} (even-folded)") })
}

/// Where a [`MeasurePair`] came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CaseKind {
    Threefold { dm_id: String },
    LogPair { t: Rational },
    Quadric { n: i64 },
    Custom,
}

/// Both measures of one case, ready for pairing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurePair {
    pub label: String,
    pub kind: CaseKind,
    pub polytope: MomentPolytope,
    pub mu: SignedMeasure,
    pub nu: SignedMeasure,
    pub y_symmetric: bool,
}

impl MeasurePair {
    pub fn from_polytope(label: impl Into<String>, kind: CaseKind, polytope: MomentPolytope) -> Self {
        let label = label.into();
        let mut mu = mu_density(&polytope);
        let mut nu = nu_density(&polytope);
        mu.origin = label.clone();
        nu.origin = label.clone();
        let y_symmetric = polytope.is_y_symmetric() && polytope.kappa().y == int(0);
        Self { label, kind, polytope, mu, nu, y_symmetric }
    }

    pub fn for_case(case: &CaseData) -> Self {
        Self::from_polytope(
            case.dm_id,
            CaseKind::Threefold { dm_id: case.dm_id.to_string() },
            case.polytope.clone(),
        )
    }

    pub fn by_id(dm_id: &str) -> Option<Self> {
        find_case(dm_id).map(Self::for_case)
    }

    pub fn logpair(t: &Rational) -> Result<Self, MeasureError> {
        let p = logpair_polytope(t)?;
        Ok(Self::from_polytope(
            format!("logpair t={}", format_rational(t)),
            CaseKind::LogPair { t: t.clone() },
            p,
        ))
    }

    pub fn quadric(n: i64) -> Result<Self, MeasureError> {
        let p = quadric_polytope(n)?;
        Ok(Self::from_polytope(format!("quadric n={n}"), CaseKind::Quadric { n }, p))
    }

    pub fn support(&self) -> (&Rational, &Rational) {
        self.mu.support()
    }
}
