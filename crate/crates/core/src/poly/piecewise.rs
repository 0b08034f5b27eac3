use std::fmt;

use num_traits::Zero;

use super::polynomial::Polynomial;
use super::rational::{format_rational, int, midpoint, to_f64, Rational};
use super::roots::isolate_roots;
use super::PolyError;

/// Piecewise polynomial over strictly increasing rational breakpoints.
///
/// Piece `i` lives on `[breakpoints[i], breakpoints[i + 1]]`. Outside
/// `[breakpoints[0], breakpoints[k]]` the function is zero. At an interior
/// breakpoint the right-hand piece wins; the final breakpoint uses the last piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewisePoly {
    breakpoints: Vec<Rational>,
    pieces: Vec<Polynomial>,
}

impl PiecewisePoly {
    pub fn new(breakpoints: Vec<Rational>, pieces: Vec<Polynomial>) -> Result<Self, PolyError> {
        if breakpoints.len() < 2 || pieces.len() + 1 != breakpoints.len() {
            return Err(PolyError::PieceCount { breakpoints: breakpoints.len(), pieces: pieces.len() });
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PolyError::UnsortedBreakpoints);
        }
        Ok(Self { breakpoints, pieces })
    }

    /// A single polynomial on `[lo, hi]`.
    pub fn single(lo: Rational, hi: Rational, p: Polynomial) -> Result<Self, PolyError> {
        Self::new(vec![lo, hi], vec![p])
    }

    /// Builds from `(lo, hi, poly)` triples that tile an interval without gaps.
    pub fn from_segments(
        segments: impl IntoIterator<Item = (Rational, Rational, Polynomial)>,
    ) -> Result<Self, PolyError> {
        let mut breakpoints: Vec<Rational> = Vec::new();
        let mut pieces = Vec::new();
        for (lo, hi, p) in segments {
            match breakpoints.last() {
                None => breakpoints.push(lo),
                Some(last) if *last == lo => {}
                Some(_) => return Err(PolyError::UnsortedBreakpoints),
            }
            breakpoints.push(hi);
            pieces.push(p);
        }
        Self::new(breakpoints, pieces)
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Polynomial] {
        &self.pieces
    }

    /// `(lo, hi, piece)` for every piece.
    pub fn segments(&self) -> impl Iterator<Item = (&Rational, &Rational, &Polynomial)> {
        self.breakpoints.windows(2).zip(&self.pieces).map(|(w, p)| (&w[0], &w[1], p))
    }

    pub fn support(&self) -> (&Rational, &Rational) {
        (&self.breakpoints[0], self.breakpoints.last().expect("at least two breakpoints"))
    }

    pub fn support_f64(&self) -> (f64, f64) {
        let (lo, hi) = self.support();
        (to_f64(lo), to_f64(hi))
    }

    fn piece_index(&self, x: &Rational) -> Option<usize> {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return None;
        }
        let k = self.pieces.len();
        // number of interior breakpoints <= x
        let idx = self.breakpoints[1..k].partition_point(|b| b <= x);
        Some(idx)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        match self.piece_index(x) {
            Some(i) => self.pieces[i].eval(x),
            None => Rational::zero(),
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let (lo, hi) = self.support_f64();
        if !(lo..=hi).contains(&x) {
            return 0.0;
        }
        let k = self.pieces.len();
        let idx = self.breakpoints[1..k].partition_point(|b| to_f64(b) <= x);
        self.pieces[idx].eval_f64(x)
    }

    /// Exact `∫_a^b p(y) dy`, clipped to the support.
    pub fn integrate(&self, a: &Rational, b: &Rational) -> Result<Rational, PolyError> {
        if a > b {
            return Err(PolyError::ArgumentOrder);
        }
        let mut total = Rational::zero();
        for (lo, hi, p) in self.segments() {
            let l = if lo > a { lo } else { a };
            let h = if hi < b { hi } else { b };
            if l < h {
                total += p.integrate(l, h);
            }
        }
        Ok(total)
    }

    /// Integral over the whole support.
    pub fn total(&self) -> Rational {
        self.segments().map(|(lo, hi, p)| p.integrate(lo, hi)).sum()
    }

    /// Same function on the union of breakpoints, with zero pieces filling any
    /// gap outside one operand's support.
    pub fn refine_to(&self, breakpoints: &[Rational]) -> Vec<Polynomial> {
        breakpoints
            .windows(2)
            .map(|w| {
                let m = midpoint(&w[0], &w[1]);
                match self.piece_index(&m) {
                    Some(i) => self.pieces[i].clone(),
                    None => Polynomial::zero(),
                }
            })
            .collect()
    }

    fn union_breakpoints(&self, other: &Self) -> Vec<Rational> {
        let mut all: Vec<Rational> = self.breakpoints.iter().chain(&other.breakpoints).cloned().collect();
        all.sort();
        all.dedup();
        all
    }

    fn combine(&self, other: &Self, f: impl Fn(&Polynomial, &Polynomial) -> Polynomial) -> Self {
        let bps = self.union_breakpoints(other);
        let left = self.refine_to(&bps);
        let right = other.refine_to(&bps);
        let pieces = left.iter().zip(&right).map(|(a, b)| f(a, b)).collect();
        Self { breakpoints: bps, pieces }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map_pieces(|p| p.scale(c))
    }

    /// Multiplies every piece by `q`.
    pub fn mul_poly(&self, q: &Polynomial) -> Self {
        self.map_pieces(|p| p * q)
    }

    pub fn map_pieces(&self, f: impl Fn(&Polynomial) -> Polynomial) -> Self {
        Self { breakpoints: self.breakpoints.clone(), pieces: self.pieces.iter().map(f).collect() }
    }

    /// `y ↦ p(-y)`.
    pub fn reflect(&self) -> Self {
        Self {
            breakpoints: self.breakpoints.iter().rev().map(|b| -b).collect(),
            pieces: self.pieces.iter().rev().map(Polynomial::reflect).collect(),
        }
    }

    /// Restriction to `[a, b] ∩ support`, or `None` when that has empty interior.
    pub fn restrict(&self, a: &Rational, b: &Rational) -> Option<Self> {
        let (lo, hi) = self.support();
        let l = if lo > a { lo.clone() } else { a.clone() };
        let h = if hi < b { hi.clone() } else { b.clone() };
        if l >= h {
            return None;
        }
        let mut bps = vec![l.clone()];
        bps.extend(self.breakpoints.iter().filter(|x| **x > l && **x < h).cloned());
        bps.push(h);
        let pieces = self.refine_to(&bps);
        Some(Self { breakpoints: bps, pieces })
    }

    /// `p(y) + p(-y)` restricted to `y ≥ 0`. Pairing an even weight against
    /// this over `[0, ∞)` equals pairing against `p` over the whole line.
    pub fn fold_even(&self) -> Option<Self> {
        let sum = self.add(&self.reflect());
        let (_, hi) = sum.support();
        let hi = hi.clone();
        sum.restrict(&Rational::zero(), &hi)
    }

    /// Merges adjacent pieces that carry the same polynomial.
    pub fn simplified(&self) -> Self {
        let mut bps = vec![self.breakpoints[0].clone()];
        let mut pieces: Vec<Polynomial> = Vec::new();
        for (_, hi, p) in self.segments() {
            if pieces.last() == Some(p) {
                *bps.last_mut().expect("nonempty") = hi.clone();
            } else {
                pieces.push(p.clone());
                bps.push(hi.clone());
            }
        }
        Self { breakpoints: bps, pieces }
    }

    /// Equality as functions: same support and equal pieces after aligning
    /// breakpoints.
    pub fn same_function(&self, other: &Self) -> bool {
        if self.support() != other.support() {
            return false;
        }
        let bps = self.union_breakpoints(other);
        self.refine_to(&bps) == other.refine_to(&bps)
    }

    pub fn is_even(&self) -> bool {
        self.same_function(&self.reflect())
    }

    pub fn is_odd(&self) -> bool {
        let neg = self.reflect().scale(&int(-1));
        self.same_function(&neg)
    }

    /// `∫ |p(y)| dy` in floating point, splitting at isolated real roots.
    pub fn abs_mass(&self) -> f64 {
        let mut total = 0.0;
        for (lo, hi, p) in self.segments() {
            if p.is_zero() {
                continue;
            }
            let width = hi - lo;
            let roots = isolate_roots(p, lo, hi, &(width / int(1_000_000_000))).unwrap_or_default();
            let mut cuts = vec![lo.clone()];
            cuts.extend(roots.iter().map(|r| r.midpoint()));
            cuts.push(hi.clone());
            for w in cuts.windows(2) {
                total += to_f64(&p.integrate(&w[0], &w[1])).abs();
            }
        }
        total
    }
}

impl fmt::Display for PiecewisePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .segments()
            .map(|(lo, hi, p)| format!("({p})·1[{}, {}]", format_rational(lo), format_rational(hi)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational::rat;

    fn table_3_2_3_nu() -> PiecewisePoly {
        // 8y on [-1,0], 2y(2-y)^2 on [0,1]
        PiecewisePoly::new(
            vec![int(-1), int(0), int(1)],
            vec![Polynomial::from_i64(&[0, 8]), Polynomial::from_roots(int(2), &[int(0), int(2), int(2)])],
        )
        .unwrap()
    }

    #[test]
    fn construction_checks() {
        assert!(PiecewisePoly::new(vec![int(0)], vec![]).is_err());
        assert!(PiecewisePoly::new(vec![int(0), int(1)], vec![]).is_err());
        assert!(matches!(
            PiecewisePoly::new(vec![int(1), int(0)], vec![Polynomial::zero()]),
            Err(PolyError::UnsortedBreakpoints)
        ));
    }

    #[test]
    fn eval_outside_support_is_zero() {
        let p = table_3_2_3_nu();
        assert_eq!(p.eval(&int(-2)), int(0));
        assert_eq!(p.eval(&int(2)), int(0));
        assert_eq!(p.eval(&rat(-1, 2)), int(-4));
        assert_eq!(p.eval(&int(1)), int(2));
        assert_eq!(p.eval_f64(0.5), 2.0 * 0.5 * 1.5 * 1.5);
    }

    #[test]
    fn definite_integral_examples() {
        let p = PiecewisePoly::single(int(-1), int(0), Polynomial::from_i64(&[0, 8])).unwrap();
        assert_eq!(p.integrate(&int(-1), &int(0)).unwrap(), int(-4));
        assert_eq!(p.integrate(&rat(-1, 3), &rat(-1, 3)).unwrap(), int(0));
        let tri = PiecewisePoly::single(int(0), int(6), Polynomial::identity()).unwrap();
        assert_eq!(tri.integrate(&int(0), &int(6)).unwrap(), int(18));
        assert!(matches!(tri.integrate(&int(1), &int(0)), Err(PolyError::ArgumentOrder)));
        // clipped to support
        assert_eq!(tri.integrate(&int(-10), &int(10)).unwrap(), int(18));
    }

    #[test]
    fn addition_refines_breakpoints() {
        let a = PiecewisePoly::single(int(0), int(2), Polynomial::from_i64(&[1])).unwrap();
        let b = PiecewisePoly::single(int(1), int(3), Polynomial::from_i64(&[0, 1])).unwrap();
        let s = a.add(&b);
        assert_eq!(s.breakpoints(), &[int(0), int(1), int(2), int(3)]);
        assert_eq!(s.eval(&rat(3, 2)), rat(5, 2));
        assert_eq!(s.eval(&rat(5, 2)), rat(5, 2));
        assert_eq!(s.eval(&rat(1, 2)), int(1));
        assert_eq!(s.total(), a.total() + b.total());
    }

    #[test]
    fn reflection_and_parity() {
        let nu = table_3_2_3_nu();
        assert!(!nu.is_odd());
        let sym = PiecewisePoly::new(
            vec![int(-3), int(0), int(3)],
            vec![
                Polynomial::from_roots(int(2), &[int(0), int(-3), int(-3)]),
                Polynomial::from_roots(int(2), &[int(0), int(3), int(3)]),
            ],
        )
        .unwrap();
        assert!(sym.is_odd());
        assert!(!sym.is_even());
        assert_eq!(sym.total(), int(0));
    }

    #[test]
    fn fold_even_doubles_even_functions() {
        let even = PiecewisePoly::new(
            vec![int(-2), int(0), int(2)],
            vec![Polynomial::from_i64(&[2, 1]), Polynomial::from_i64(&[2, -1])],
        )
        .unwrap();
        let folded = even.fold_even().unwrap();
        assert!(folded
            .same_function(&PiecewisePoly::single(int(0), int(2), Polynomial::from_i64(&[4, -2])).unwrap()));
    }

    #[test]
    fn simplification_and_alignment() {
        let split = PiecewisePoly::new(
            vec![int(-1), int(0), int(1)],
            vec![Polynomial::from_i64(&[0, 8]), Polynomial::from_i64(&[0, 8])],
        )
        .unwrap();
        let whole = PiecewisePoly::single(int(-1), int(1), Polynomial::from_i64(&[0, 8])).unwrap();
        assert!(split.same_function(&whole));
        assert_eq!(split.simplified(), whole);
        let shorter = PiecewisePoly::single(int(-1), int(0), Polynomial::from_i64(&[0, 8])).unwrap();
        assert!(!shorter.same_function(&whole));
    }

    #[test]
    fn abs_mass_of_sign_changing_piece() {
        let p = PiecewisePoly::single(int(-1), int(1), Polynomial::identity()).unwrap();
        assert!((p.abs_mass() - 1.0).abs() < 1e-9);
    }
}
