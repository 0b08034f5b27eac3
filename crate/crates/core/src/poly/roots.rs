//! Real-root isolation on rational intervals and exact sign certification.
//!
//! Roots are isolated per square-free factor with Descartes' rule of signs
//! applied to the Möbius image of each candidate interval, then refined by
//! sign bisection. No floating point is involved anywhere in this module.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use super::piecewise::PiecewisePoly;
use super::polynomial::Polynomial;
use super::rational::{int, midpoint, to_f64, Rational};
use super::PolyError;

/// A closed interval holding exactly one real root. `lo == hi` means the
/// root is known exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: Rational,
    pub hi: Rational,
    /// Multiplicity of the root in the polynomial it was isolated from.
    pub multiplicity: usize,
}

impl RootInterval {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        midpoint(&self.lo, &self.hi)
    }

    pub fn midpoint_f64(&self) -> f64 {
        to_f64(&self.midpoint())
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    fn overlaps(&self, other: &RootInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// Upper bound on the number of roots of `p` in the open interval `(lo, hi)`,
/// exact when it is 0 or 1.
pub fn descartes_bound(p: &Polynomial, lo: &Rational, hi: &Rational) -> usize {
    let on_unit = p.compose(&Polynomial::affine(lo.clone(), hi - lo));
    on_unit.reversed().taylor_shift(&Rational::one()).sign_variations()
}

fn sign(x: &Rational) -> Ordering {
    x.cmp(&Rational::zero())
}

/// Sign of `s` immediately to the right of `x` (for `dir = Greater`) or left
/// (`dir = Less`), assuming `s` is square-free and nonzero.
fn one_sided_sign(s: &Polynomial, x: &Rational, dir: Ordering) -> Ordering {
    let v = s.eval(x);
    if !v.is_zero() {
        return sign(&v);
    }
    let d = sign(&s.derivative().eval(x));
    if dir == Ordering::Greater {
        d
    } else {
        d.reverse()
    }
}

/// Shrinks `(lo, hi)`, which holds exactly one simple root of the square-free
/// `s` in its interior, until its width is at most `resolution` and neither
/// endpoint is itself a root.
fn refine(s: &Polynomial, lo: Rational, hi: Rational, resolution: &Rational) -> (Rational, Rational) {
    let (mut lo, mut hi) = (lo, hi);
    let left_sign = one_sided_sign(s, &lo, Ordering::Greater);
    loop {
        let endpoint_root = s.eval(&lo).is_zero() || s.eval(&hi).is_zero();
        if &hi - &lo <= *resolution && !endpoint_root {
            return (lo, hi);
        }
        let m = midpoint(&lo, &hi);
        let v = s.eval(&m);
        if v.is_zero() {
            return (m.clone(), m);
        }
        if sign(&v) == left_sign {
            lo = m;
        } else {
            hi = m;
        }
    }
}

fn isolate_square_free(s: &Polynomial, a: &Rational, b: &Rational) -> Vec<(Rational, Rational)> {
    let mut found = Vec::new();
    if s.eval(a).is_zero() {
        found.push((a.clone(), a.clone()));
    }
    if a != b && s.eval(b).is_zero() {
        found.push((b.clone(), b.clone()));
    }
    if a == b {
        return found;
    }
    let mut stack = vec![(a.clone(), b.clone())];
    while let Some((lo, hi)) = stack.pop() {
        match descartes_bound(s, &lo, &hi) {
            0 => {}
            1 => found.push((lo, hi)),
            _ => {
                let m = midpoint(&lo, &hi);
                if s.eval(&m).is_zero() {
                    found.push((m.clone(), m.clone()));
                }
                stack.push((lo, m.clone()));
                stack.push((m, hi));
            }
        }
    }
    found
}

/// Isolates every real root of `p` in the closed interval `[a, b]`.
///
/// Each returned interval contains exactly one distinct root, the intervals
/// are pairwise disjoint, sorted, and have width at most `resolution`.
/// Roots at `a` or `b` are reported as exact point intervals.
pub fn isolate_roots(
    p: &Polynomial,
    a: &Rational,
    b: &Rational,
    resolution: &Rational,
) -> Result<Vec<RootInterval>, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    if a > b {
        return Err(PolyError::ArgumentOrder);
    }
    if !resolution.is_positive() {
        return Err(PolyError::Resolution);
    }

    struct Tracked {
        factor: usize,
        root: RootInterval,
    }

    let factors = p.square_free_decomposition();
    let mut tracked: Vec<Tracked> = Vec::new();
    for (fi, (mult, s)) in factors.iter().enumerate() {
        for (lo, hi) in isolate_square_free(s, a, b) {
            let (lo, hi) = if lo == hi { (lo, hi) } else { refine(s, lo, hi, resolution) };
            tracked.push(Tracked { factor: fi, root: RootInterval { lo, hi, multiplicity: *mult } });
        }
    }

    // Distinct factors have distinct roots, so overlapping intervals separate
    // under further refinement.
    loop {
        tracked.sort_by(|x, y| x.root.lo.cmp(&y.root.lo));
        let clash = tracked.windows(2).position(|w| w[0].root.overlaps(&w[1].root));
        let Some(i) = clash else { break };
        for j in [i, i + 1] {
            let t = &mut tracked[j];
            if !t.root.is_exact() {
                let s = &factors[t.factor].1;
                let half = t.root.width() / int(2);
                let (lo, hi) = refine(s, t.root.lo.clone(), t.root.hi.clone(), &half);
                t.root.lo = lo;
                t.root.hi = hi;
            }
        }
    }
    Ok(tracked.into_iter().map(|t| t.root).collect())
}

/// Sign evidence for one clipped piece of a piecewise polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceProof {
    pub lo: Rational,
    pub hi: Rational,
    /// Isolated roots of the piece inside `[lo, hi]`.
    pub roots: Vec<RootInterval>,
    /// Rational sample points with exact values, at least one in every maximal
    /// root-free subinterval. The piece has constant sign on each of those.
    pub samples: Vec<(Rational, Rational)>,
    pub identically_zero: bool,
}

impl PieceProof {
    pub fn is_nonnegative(&self) -> bool {
        self.samples.iter().all(|(_, v)| !v.is_negative())
    }
}

/// Outcome of [`is_nonnegative_on`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonnegativityReport {
    pub nonnegative: bool,
    /// True if some piece vanishes identically on a subinterval of positive length.
    pub has_zero_piece: bool,
    /// A point where the function is negative, when there is one.
    pub counterexample: Option<Rational>,
    pub proofs: Vec<PieceProof>,
}

fn prove_piece(p: &Polynomial, lo: &Rational, hi: &Rational) -> PieceProof {
    if p.is_zero() {
        return PieceProof {
            lo: lo.clone(),
            hi: hi.clone(),
            roots: Vec::new(),
            samples: Vec::new(),
            identically_zero: true,
        };
    }
    let roots = isolate_roots(p, lo, hi, &(hi - lo)).expect("nonzero piece on ordered interval");
    let mut gaps = Vec::new();
    let mut left = lo.clone();
    for r in &roots {
        if left < r.lo {
            gaps.push((left.clone(), r.lo.clone()));
        }
        left = r.hi.clone();
    }
    if &left < hi {
        gaps.push((left, hi.clone()));
    }
    // Every root-free open stretch of the piece contains a gap midpoint or an
    // endpoint of a non-degenerate isolating interval (never itself a root).
    let mut points: Vec<Rational> = gaps.into_iter().map(|(l, h)| midpoint(&l, &h)).collect();
    for r in roots.iter().filter(|r| !r.is_exact()) {
        points.push(r.lo.clone());
        points.push(r.hi.clone());
    }
    points.sort();
    points.dedup();
    let samples = points
        .into_iter()
        .map(|m| {
            let v = p.eval(&m);
            (m, v)
        })
        .collect();
    PieceProof { lo: lo.clone(), hi: hi.clone(), roots, samples, identically_zero: false }
}

/// Decides exactly whether `p ≥ 0` on `[a, b] ∩ support(p)`.
///
/// Each piece is checked on its closed interval. Sign is sampled in each gap
/// between isolating intervals and at their endpoints, which suffices because
/// a polynomial cannot change sign away from its roots.
pub fn is_nonnegative_on(p: &PiecewisePoly, a: &Rational, b: &Rational) -> NonnegativityReport {
    let Some(clipped) = p.restrict(a, b) else {
        return NonnegativityReport {
            nonnegative: true,
            has_zero_piece: false,
            counterexample: None,
            proofs: Vec::new(),
        };
    };
    let proofs: Vec<PieceProof> =
        clipped.segments().map(|(lo, hi, piece)| prove_piece(piece, lo, hi)).collect();
    let counterexample =
        proofs.iter().flat_map(|pr| pr.samples.iter()).find(|(_, v)| v.is_negative()).map(|(x, _)| x.clone());
    NonnegativityReport {
        nonnegative: counterexample.is_none(),
        has_zero_piece: proofs.iter().any(|pr| pr.identically_zero),
        counterexample,
        proofs,
    }
}
