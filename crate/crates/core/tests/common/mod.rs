//! Shared property checks and input strategies. Each check returns a
//! `TestCaseResult` so it runs both under `proptest!` and a bare runner.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use mixdisc::adisc::{a_discriminant, dual_samples, vanishes_on, DiscMethod, DiscriminantArtifact, Hints};
use mixdisc::lattice::{LatticeConfig, Polygon};
use mixdisc::poly::{PencilForm, SparsePoly, VarTable};
use mixdisc::resultants::{macaulay_resultant, sylvester_resultant, univariate_discriminant, UniPoly};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::TestCaseResult;

/// Cases per property.
pub const CASES: u32 = 200;

pub fn xyz() -> Arc<VarTable> {
    VarTable::new(["x", "y", "z"]).unwrap()
}

pub fn points_strategy() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-6i64..=6, -6i64..=6), 3..9)
}

/// `v = 2i + p - 2` on the hull of random lattice points, with interior and
/// boundary counts taken from independent enumeration.
pub fn pick_relation(points: &[(i64, i64)]) -> TestCaseResult {
    let hull = Polygon::hull(points);
    prop_assume!(hull.is_ok());
    let p = hull.unwrap();
    let (v, b, i) = (p.normalized_area(), p.lattice_perimeter(), p.interior_points());
    prop_assert_eq!(v, 2 * i + b - 2);
    prop_assert_eq!(p.lattice_points().len() as i64, i + b);
    Ok(())
}

/// Degree and `(a, b, coefficient)` triples of a form in x, y, z; the
/// z-exponent is `e - a - b`.
pub fn form_strategy() -> impl Strategy<Value = (u32, Vec<(u32, u32, i64)>)> {
    (1u32..=5).prop_flat_map(|e| {
        let term = (0..=e, 0..=e, -20i64..=20).prop_map(move |(a, b, c)| (a.min(e), b.min(e - a.min(e)), c));
        (Just(e), prop::collection::vec(term, 1..8))
    })
}

pub fn form(e: u32, terms: &[(u32, u32, i64)]) -> SparsePoly {
    let t = terms.iter().map(|&(a, b, c)| (vec![a, b, e - a - b], BigInt::from(c)));
    SparsePoly::from_terms(&xyz(), t.collect::<Vec<_>>()).unwrap()
}

/// `Σ x_i ∂f/∂x_i = e·f` for a form of degree `e`.
pub fn euler_relation(e: u32, terms: &[(u32, u32, i64)]) -> TestCaseResult {
    let f = form(e, terms);
    let vars = xyz();
    let lhs = (0..3).fold(SparsePoly::zero(&vars), |acc, i| acc + SparsePoly::var(&vars, i) * f.partial(i));
    prop_assert_eq!(lhs, f.scale(&BigInt::from(e)));
    Ok(())
}

pub fn poly_strategy() -> impl Strategy<Value = Vec<(u32, u32, u32, i64)>> {
    prop::collection::vec((0u32..=3, 0u32..=3, 0u32..=3, -9i64..=9), 1..7)
}

pub fn poly(terms: &[(u32, u32, u32, i64)]) -> SparsePoly {
    let t = terms.iter().map(|&(a, b, c, k)| (vec![a, b, c], BigInt::from(k)));
    SparsePoly::from_terms(&xyz(), t.collect::<Vec<_>>()).unwrap()
}

/// `(a·b) / b = a` exactly.
pub fn divide_round_trip(a: &[(u32, u32, u32, i64)], b: &[(u32, u32, u32, i64)]) -> TestCaseResult {
    let (a, b) = (poly(a), poly(b));
    prop_assume!(!b.is_zero());
    let q = (&a * &b).exact_divide(&b);
    prop_assert!(q.is_ok());
    prop_assert_eq!(q.unwrap(), a);
    Ok(())
}

pub fn planted_strategy() -> impl Strategy<Value = (i64, Vec<i64>)> {
    (-5i64..=5, prop::collection::vec(-9i64..=9, 1..5))
}

fn mul_coeffs(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `Disc((x - r)²·g) = 0`.
pub fn planted_univariate(r: i64, g: &[i64]) -> TestCaseResult {
    let mut g: Vec<BigInt> = g.iter().map(|&c| BigInt::from(c)).collect();
    if g.last().is_some_and(Zero::is_zero) {
        *g.last_mut().unwrap() = BigInt::from(1);
    }
    let lin = [BigInt::from(-r), BigInt::from(1)];
    let f = mul_coeffs(&mul_coeffs(&lin, &lin), &g);
    let d = univariate_discriminant(&UniPoly::from_integers(&f).unwrap()).unwrap();
    prop_assert!(d.is_zero(), "discriminant {} for r = {}", d, r);
    Ok(())
}

/// Configurations with known discriminants used for section sampling.
pub fn sample_configs() -> &'static [(LatticeConfig, DiscriminantArtifact)] {
    static CELL: OnceLock<Vec<(LatticeConfig, DiscriminantArtifact)>> = OnceLock::new();
    CELL.get_or_init(|| {
        [
            Polygon::unit_square().lattice_points(),
            Polygon::f1_trapezoid().lattice_points(),
            LatticeConfig::dilated_simplex(2, 2),
            LatticeConfig::dilated_simplex(1, 3),
            LatticeConfig::dilated_simplex(1, 4),
        ]
        .into_iter()
        .map(|c| {
            let da = a_discriminant(&c, DiscMethod::Auto, &Hints::default()).unwrap();
            (c, da)
        })
        .collect()
    })
}

/// `D_A` vanishes on a polynomial with a planted singular point on the torus.
pub fn planted_section(which: usize, seed: u64) -> TestCaseResult {
    let (config, da) = &sample_configs()[which % sample_configs().len()];
    let s = dual_samples(config, 1, seed).unwrap().remove(0);
    prop_assert!(vanishes_on(&da.poly, &s), "{} does not vanish", da.poly);
    prop_assert!(da.poly.eval(&s.coeffs).is_zero());
    Ok(())
}

pub fn binary_pair_strategy() -> impl Strategy<Value = (Vec<i64>, Vec<i64>)> {
    (1usize..=4).prop_flat_map(|e| (prop::collection::vec(-9i64..=9, e + 1), prop::collection::vec(-9i64..=9, e + 1)))
}

fn binary_form(a: &[BigInt]) -> PencilForm {
    let e = a.len() as u32 - 1;
    let vars = VarTable::new(Vec::<String>::new()).unwrap();
    let coeffs: BTreeMap<Vec<u32>, SparsePoly> = a
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (vec![e - i as u32, i as u32], SparsePoly::constant(&vars, c.clone())))
        .collect();
    PencilForm { r: 1, degree: e, vars, coeffs }
}

fn both_resultants(a: &[BigInt], b: &[BigInt]) -> (BigInt, BigInt) {
    let s = sylvester_resultant(&UniPoly::from_integers(a).unwrap(), &UniPoly::from_integers(b).unwrap()).unwrap();
    let m = macaulay_resultant(&[binary_form(a), binary_form(b)]).unwrap();
    (s.constant_value().unwrap_or_default(), m.constant_value().unwrap_or_default())
}

/// Ratio of the two resultant conventions for degree `e`, read off the
/// pair `1 + t^e`, `2 + t^e`.
pub fn resultant_sign(e: usize) -> BigInt {
    let mut a = vec![BigInt::zero(); e + 1];
    let mut b = a.clone();
    a[0] = 1.into();
    b[0] = 2.into();
    a[e] = 1.into();
    b[e] = 1.into();
    let (s, m) = both_resultants(&a, &b);
    assert!(!m.is_zero());
    assert_eq!(s.clone() * s.clone(), m.clone() * m.clone(), "reference pair differs beyond sign");
    s / m
}

/// Sylvester and Macaulay agree, up to the fixed per-degree sign, on
/// binary forms of equal degree with nonzero leading coefficients.
pub fn sylvester_macaulay(a: &[i64], b: &[i64]) -> TestCaseResult {
    let fix = |v: &[i64]| -> Vec<BigInt> {
        let mut w: Vec<BigInt> = v.iter().map(|&c| BigInt::from(c)).collect();
        if w.last().is_some_and(Zero::is_zero) {
            *w.last_mut().unwrap() = BigInt::from(1);
        }
        w
    };
    let (a, b) = (fix(a), fix(b));
    let (s, m) = both_resultants(&a, &b);
    prop_assert_eq!(s, resultant_sign(a.len() - 1) * m);
    Ok(())
}
