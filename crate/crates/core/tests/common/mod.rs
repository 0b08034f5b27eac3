//! Reference densities written out by hand as factored piecewise polynomials.
//! Independent of the fibre-integration code path.

#![allow(dead_code)]

use wkstab_core::poly::{int, rat, PiecewisePoly, Polynomial, Rational};

/// `c · Π (a + b·y)` for the listed `(a, b)` factors.
pub fn factored(c: Rational, factors: &[(i64, i64)]) -> Polynomial {
    factors.iter().fold(Polynomial::constant(c), |acc, &(a, b)| &acc * &Polynomial::from_i64(&[a, b]))
}

pub fn pw(segments: Vec<(i64, i64, Polynomial)>) -> PiecewisePoly {
    PiecewisePoly::from_segments(segments.into_iter().map(|(l, h, p)| (int(l), int(h), p))).unwrap()
}

const Y: (i64, i64) = (0, 1);

pub struct Row {
    pub id: &'static str,
    pub mu: PiecewisePoly,
    pub nu: PiecewisePoly,
}

fn minus_quadric_tail() -> Polynomial {
    // (4/3)(y+3)^2(2y+3)
    factored(rat(4, 3), &[(3, 1), (3, 1), (3, 2)])
}

fn plus_quadric_tail() -> Polynomial {
    // (4/3)(y-3)^2(3-2y)
    factored(rat(4, 3), &[(-3, 1), (-3, 1), (3, -2)])
}

pub fn table() -> Vec<Row> {
    let cube_lo = || factored(rat(2, 3), &[(2, 1), (2, 1), (2, 1)]);
    let cube_hi = || factored(rat(-2, 3), &[(-2, 1), (-2, 1), (-2, 1)]);
    let sq_lo = || factored(rat(1, 3), &[Y, Y, (3, 1)]);
    let sq_hi = || factored(rat(-1, 3), &[Y, Y, (-3, 1)]);
    let nu_lo2 = || factored(int(4), &[Y, (2, 1)]);
    let nu_hi2 = || factored(int(4), &[Y, (2, -1)]);
    let nu_mid3 = || factored(rat(1, 2), &[Y, (3, -1), (3, 1)]);
    let nu_lo3 = || factored(int(2), &[Y, (3, 1), (3, 1)]);
    let nu_hi3 = || factored(int(2), &[Y, (3, -1), (3, -1)]);
    vec![
        Row {
            id: "3-2-3",
            mu: pw(vec![
                (-1, 0, factored(rat(16, 3), &[])),
                (0, 1, factored(rat(4, 3), &[(1, -2), (2, -1), (2, -1)])),
            ]),
            nu: pw(vec![(-1, 0, factored(int(8), &[Y])), (0, 1, factored(int(2), &[Y, (2, -1), (2, -1)]))]),
        },
        Row {
            id: "3-2-4",
            mu: pw(vec![(-3, 0, sq_lo()), (0, 3, sq_hi())]),
            nu: pw(vec![(-3, 3, nu_mid3())]),
        },
        Row {
            id: "3-2-5",
            mu: pw(vec![(-2, 0, cube_lo()), (0, 2, cube_hi())]),
            nu: pw(vec![(-2, 0, nu_lo2()), (0, 2, nu_hi2())]),
        },
        Row {
            id: "3-2-6",
            mu: pw(vec![(-2, -1, cube_lo()), (-1, 0, sq_lo()), (0, 3, sq_hi())]),
            nu: pw(vec![(-2, -1, nu_lo2()), (-1, 3, nu_mid3())]),
        },
        Row {
            id: "3-2-8",
            mu: pw(vec![(-1, 0, cube_lo()), (0, 2, cube_hi())]),
            nu: pw(vec![(-1, 0, nu_lo2()), (0, 2, nu_hi2())]),
        },
        Row {
            id: "3-2-9",
            mu: pw(vec![(-2, -1, cube_lo()), (-1, 0, sq_lo()), (0, 1, sq_hi()), (1, 2, cube_hi())]),
            nu: pw(vec![(-2, -1, nu_lo2()), (-1, 1, nu_mid3()), (1, 2, nu_hi2())]),
        },
        Row {
            id: "3-2-11",
            mu: pw(vec![(-1, 0, cube_lo()), (0, 1, cube_hi())]),
            nu: pw(vec![(-1, 0, nu_lo2()), (0, 1, nu_hi2())]),
        },
        Row {
            id: "3-2-17",
            mu: pw(vec![
                (-1, 0, factored(int(36), &[])),
                (0, 1, factored(rat(4, 3), &[(3, -2), (3, -2), (3, -4)])),
            ]),
            nu: pw(vec![(-1, 0, factored(int(18), &[Y])), (0, 1, factored(int(2), &[Y, (3, -2), (3, -2)]))]),
        },
        Row {
            id: "3-2-18",
            mu: pw(vec![(-3, 0, minus_quadric_tail()), (0, 3, plus_quadric_tail())]),
            nu: pw(vec![(-3, 0, nu_lo3()), (0, 3, nu_hi3())]),
        },
        Row {
            id: "3-2-19",
            mu: pw(vec![
                (-3, -1, minus_quadric_tail()),
                (-1, 1, factored(rat(16, 3), &[])),
                (1, 3, plus_quadric_tail()),
            ]),
            nu: pw(vec![(-3, -1, nu_lo3()), (-1, 1, factored(int(8), &[Y])), (1, 3, nu_hi3())]),
        },
        Row {
            id: "3-2-21",
            mu: pw(vec![(-1, 0, minus_quadric_tail()), (0, 3, plus_quadric_tail())]),
            nu: pw(vec![(-1, 0, nu_lo3()), (0, 3, nu_hi3())]),
        },
        Row {
            id: "3-2-23",
            mu: pw(vec![(-1, 0, minus_quadric_tail()), (0, 1, plus_quadric_tail())]),
            nu: pw(vec![(-1, 0, nu_lo3()), (0, 1, nu_hi3())]),
        },
    ]
}

/// Dense rational sampling: `count` evenly spaced points across `[lo, hi]`
/// (both ends included), returning the smallest value seen.
pub fn min_by_sampling(p: &PiecewisePoly, count: i64) -> Rational {
    let (lo, hi) = p.support();
    let (lo, hi) = (lo.clone(), hi.clone());
    (0..count)
        .map(|i| {
            let x = &lo + (&hi - &lo) * int(i) / int(count - 1);
            p.eval(&x)
        })
        .min()
        .unwrap()
}
