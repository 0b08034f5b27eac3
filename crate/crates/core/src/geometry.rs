//! Two-dimensional moment polytopes in `(x, y)` coordinates and their
//! horizontal slices.
//!
//! `x` is the coordinate along half the positive root and `y` the coordinate
//! along the central character, so weights are functions of `y` alone and the
//! Duistermaat–Heckman density is a power of `x`.

use num_traits::{Signed, Zero};

use crate::poly::{format_rational, int, Polynomial, Rational};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GeometryError {
    #[error("a polytope needs at least three vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertices do not form a convex polygon with nonempty interior")]
    NotConvex,
    #[error("polytope leaves the half-plane x >= 0")]
    NegativeX,
    #[error("kappa ({0}, {1}) lies outside the polytope")]
    KappaOutside(String, String),
    #[error("y = {y} is outside [{lo}, {hi}]")]
    OutOfRange { y: String, lo: String, hi: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Self { x, y }
    }

    pub fn from_i64(x: i64, y: i64) -> Self {
        Self::new(int(x), int(y))
    }

    fn reflected(&self) -> Self {
        Self::new(self.x.clone(), -&self.y)
    }
}

fn cross(o: &Point, a: &Point, b: &Point) -> Rational {
    (&a.x - &o.x) * (&b.y - &o.y) - (&a.y - &o.y) * (&b.x - &o.x)
}

/// Horizontal section `{x : (x, y) ∈ P}` of a polytope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slice {
    pub y: Rational,
    pub x_lo: Rational,
    pub x_hi: Rational,
}

impl Slice {
    pub fn length(&self) -> Rational {
        &self.x_hi - &self.x_lo
    }
}

/// Convex moment polytope with its barycentre-like point `kappa` and the
/// exponent `k` of the Duistermaat–Heckman density `x^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentPolytope {
    vertices: Vec<Point>,
    kappa: Point,
    dh_exponent: u32,
}

impl MomentPolytope {
    /// Validates convexity, nonempty interior, `x ≥ 0` and `kappa ∈ P`.
    /// Vertices may be given in either orientation and are stored
    /// counterclockwise. Collinear boundary points are allowed.
    pub fn new(vertices: Vec<Point>, kappa: Point, dh_exponent: u32) -> Result<Self, GeometryError> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeometryError::TooFewVertices(n));
        }
        let twice_area: Rational = (0..n)
            .map(|i| {
                let (a, b) = (&vertices[i], &vertices[(i + 1) % n]);
                &a.x * &b.y - &b.x * &a.y
            })
            .sum();
        if twice_area.is_zero() {
            return Err(GeometryError::NotConvex);
        }
        let mut vertices = vertices;
        if twice_area.is_negative() {
            vertices.reverse();
        }
        for i in 0..n {
            let turn = cross(&vertices[i], &vertices[(i + 1) % n], &vertices[(i + 2) % n]);
            if turn.is_negative() {
                return Err(GeometryError::NotConvex);
            }
        }
        let mut sorted = vertices.clone();
        sorted.sort_by(|a, b| a.y.cmp(&b.y).then(a.x.cmp(&b.x)));
        sorted.dedup();
        if sorted.len() != n {
            return Err(GeometryError::NotConvex);
        }
        if vertices.iter().any(|v| v.x.is_negative()) {
            return Err(GeometryError::NegativeX);
        }
        let polytope = Self { vertices, kappa, dh_exponent };
        // all-left-turn star polygons wind more than once
        if !polytope.is_simple() {
            return Err(GeometryError::NotConvex);
        }
        if !polytope.contains(&polytope.kappa) {
            return Err(GeometryError::KappaOutside(
                format_rational(&polytope.kappa.x),
                format_rational(&polytope.kappa.y),
            ));
        }
        Ok(polytope)
    }

    /// Convex polygons traverse their boundary once: the y-coordinate rises
    /// along one chain and falls along the other.
    fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        let mut changes = 0;
        let mut last = None;
        for i in 0..n {
            let d = (&self.vertices[(i + 1) % n].y - &self.vertices[i].y).signum();
            if d.is_zero() {
                continue;
            }
            if last.as_ref().is_some_and(|l| *l != d) {
                changes += 1;
            }
            last = Some(d);
        }
        // count the wrap-around change
        let first = (0..n)
            .map(|i| (&self.vertices[(i + 1) % n].y - &self.vertices[i].y).signum())
            .find(|d| !d.is_zero());
        if let (Some(f), Some(l)) = (first, last) {
            if f != l {
                changes += 1;
            }
        }
        changes <= 2
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn kappa(&self) -> &Point {
        &self.kappa
    }

    pub fn dh_exponent(&self) -> u32 {
        self.dh_exponent
    }

    pub fn y_range(&self) -> (Rational, Rational) {
        let ys = self.vertices.iter().map(|v| &v.y);
        let lo = ys.clone().min().expect("nonempty").clone();
        let hi = ys.max().expect("nonempty").clone();
        (lo, hi)
    }

    /// Closed containment test.
    pub fn contains(&self, p: &Point) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| !cross(&self.vertices[i], &self.vertices[(i + 1) % n], p).is_negative())
    }

    /// Sorted distinct vertex y-coordinates. Between consecutive values both
    /// slice endpoints are affine in `y`.
    pub fn y_breakpoints(&self) -> Vec<Rational> {
        let mut ys: Vec<Rational> = self.vertices.iter().map(|v| v.y.clone()).collect();
        ys.sort();
        ys.dedup();
        ys
    }

    pub fn slice_at(&self, y: &Rational) -> Result<Slice, GeometryError> {
        let (lo, hi) = self.y_range();
        if y < &lo || y > &hi {
            return Err(GeometryError::OutOfRange {
                y: format_rational(y),
                lo: format_rational(&lo),
                hi: format_rational(&hi),
            });
        }
        let n = self.vertices.len();
        let mut xs: Vec<Rational> = Vec::new();
        for i in 0..n {
            let (a, b) = (&self.vertices[i], &self.vertices[(i + 1) % n]);
            let (ylo, yhi) = if a.y <= b.y { (&a.y, &b.y) } else { (&b.y, &a.y) };
            if y < ylo || y > yhi {
                continue;
            }
            if a.y == b.y {
                xs.push(a.x.clone());
                xs.push(b.x.clone());
            } else {
                let t = (y - &a.y) / (&b.y - &a.y);
                xs.push(&a.x + t * (&b.x - &a.x));
            }
        }
        let x_lo = xs.iter().min().expect("y within range hits an edge").clone();
        let x_hi = xs.iter().max().expect("y within range hits an edge").clone();
        Ok(Slice { y: y.clone(), x_lo, x_hi })
    }

    /// Affine left and right slice boundaries on `[y0, y1]`, which must lie
    /// between consecutive breakpoints.
    pub fn boundaries_between(
        &self,
        y0: &Rational,
        y1: &Rational,
    ) -> Result<(Polynomial, Polynomial), GeometryError> {
        let s0 = self.slice_at(y0)?;
        let s1 = self.slice_at(y1)?;
        let line = |v0: &Rational, v1: &Rational| {
            let slope = (v1 - v0) / (y1 - y0);
            Polynomial::affine(v0 - &slope * y0, slope)
        };
        Ok((line(&s0.x_lo, &s1.x_lo), line(&s0.x_hi, &s1.x_hi)))
    }

    /// True iff the vertex set is invariant under `(x, y) ↦ (x, -y)`.
    pub fn is_y_symmetric(&self) -> bool {
        let mut a: Vec<&Point> = self.vertices.iter().collect();
        let mut b: Vec<Point> = self.vertices.iter().map(Point::reflected).collect();
        let key = |p: &Point| (p.x.clone(), p.y.clone());
        a.sort_by_key(|p| key(p));
        b.sort_by_key(key);
        a.into_iter().zip(&b).all(|(p, q)| p == q)
    }

    /// Shoelace area.
    pub fn area(&self) -> Rational {
        let n = self.vertices.len();
        let twice: Rational = (0..n)
            .map(|i| {
                let (a, b) = (&self.vertices[i], &self.vertices[(i + 1) % n]);
                &a.x * &b.y - &b.x * &a.y
            })
            .sum();
        twice / int(2)
    }
}
