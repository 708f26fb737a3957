//! Sylvester and Macaulay resultants, univariate and homogeneous
//! discriminants.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::linalg::bareiss_det;
use crate::poly::{PencilForm, SparsePoly, VarTable};

/// Denominator of the cubic-resolvent formula for the quartic discriminant.
pub const QUARTIC_RESOLVENT_DENOMINATOR: i64 = 27;

/// Univariate polynomial with polynomial coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<SparsePoly>,
}

impl UniPoly {
    /// Trailing zero coefficients are trimmed; at least one must be nonzero.
    pub fn new(mut coeffs: Vec<SparsePoly>) -> Result<UniPoly> {
        while coeffs.last().is_some_and(SparsePoly::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::ZeroLeadingCoefficient);
        }
        let t = coeffs[0].vars().clone();
        if coeffs.iter().any(|c| c.vars().names() != t.names()) {
            return Err(Error::VarTableMismatch);
        }
        Ok(UniPoly { coeffs })
    }

    /// Integer coefficients over an empty variable table.
    pub fn from_integers(cs: &[BigInt]) -> Result<UniPoly> {
        let t = VarTable::new(Vec::<String>::new())?;
        UniPoly::new(cs.iter().map(|c| SparsePoly::constant(&t, c.clone())).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[SparsePoly] {
        &self.coeffs
    }

    pub fn leading(&self) -> &SparsePoly {
        &self.coeffs[self.coeffs.len() - 1]
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        self.coeffs[0].vars()
    }

    pub fn derivative(&self) -> Result<UniPoly> {
        if self.degree() == 0 {
            return Err(Error::ZeroLeadingCoefficient);
        }
        UniPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.scale(&BigInt::from(i))).collect())
    }
}

/// Determinant of the Sylvester matrix of `f` and `g`, so that
/// `Res(f, g) = lc(f)^deg g · Π g(roots of f)`.
pub fn sylvester_resultant(f: &UniPoly, g: &UniPoly) -> Result<SparsePoly> {
    if f.vars().names() != g.vars().names() {
        return Err(Error::VarTableMismatch);
    }
    let (m, k) = (f.degree(), g.degree());
    let t = f.vars().clone();
    if m == 0 {
        return Ok(f.leading().pow(k as u32));
    }
    if k == 0 {
        return Ok(g.leading().pow(m as u32));
    }
    let n = m + k;
    let zero = SparsePoly::zero(&t);
    let mut rows = Vec::with_capacity(n);
    for i in 0..k {
        let mut row = vec![zero.clone(); n];
        for (j, c) in f.coeffs.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![zero.clone(); n];
        for (j, c) in g.coeffs.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    Ok(bareiss_det(rows, SparsePoly::one(&t)))
}

fn generic_cache() -> &'static Mutex<HashMap<(usize, u32), SparsePoly>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), SparsePoly>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Normalized discriminant of the generic univariate polynomial
/// `u_0 + u_1 t + … + u_δ t^δ`, over variables `u_0..u_δ`.
pub fn generic_univariate_discriminant(delta: u32) -> SparsePoly {
    if let Some(p) = generic_cache().lock().unwrap().get(&(1, delta)) {
        return p.clone();
    }
    let t = VarTable::indexed("u", delta as usize + 1);
    let p = if delta == 0 {
        SparsePoly::one(&t)
    } else {
        let f = UniPoly::new((0..=delta as usize).map(|i| SparsePoly::var(&t, i)).collect()).unwrap();
        let raw = raw_discriminant(&f).unwrap();
        let (c, prim) = raw.content_and_primitive().unwrap();
        assert!(c.abs().is_one(), "generic discriminant is primitive");
        prim
    };
    generic_cache().lock().unwrap().insert((1, delta), p.clone());
    p
}

fn raw_discriminant(f: &UniPoly) -> Result<SparsePoly> {
    let res = sylvester_resultant(f, &f.derivative()?)?;
    res.exact_divide(f.leading()).map_err(|e| Error::InvalidInput(format!("Res(f,f')/lc failed: {e}")))
}

/// Sign relating `Res(f, f')/lc(f)` to the normalized discriminant.
fn discriminant_sign(delta: u32) -> BigInt {
    static SIGNS: OnceLock<Mutex<HashMap<u32, bool>>> = OnceLock::new();
    let signs = SIGNS.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&neg) = signs.lock().unwrap().get(&delta) {
        return if neg { -BigInt::one() } else { BigInt::one() };
    }
    let g = generic_univariate_discriminant(delta);
    let t = VarTable::indexed("u", delta as usize + 1);
    let f = UniPoly::new((0..=delta as usize).map(|i| SparsePoly::var(&t, i)).collect()).unwrap();
    let neg = raw_discriminant(&f).unwrap() != g;
    signs.lock().unwrap().insert(delta, neg);
    if neg {
        -BigInt::one()
    } else {
        BigInt::one()
    }
}

/// Discriminant of a univariate polynomial, normalized so that the generic
/// discriminant is primitive with the crate's sign convention. Specialized
/// inputs are not re-normalized, so numeric values stay meaningful.
pub fn univariate_discriminant(f: &UniPoly) -> Result<SparsePoly> {
    let delta = f.degree() as u32;
    if delta == 0 {
        return Ok(SparsePoly::one(f.vars()));
    }
    if delta <= 6 && f.coeffs.iter().any(|c| !c.is_constant()) {
        let g = generic_univariate_discriminant(delta);
        return g.compose(&f.coeffs);
    }
    Ok(raw_discriminant(f)?.scale(&discriminant_sign(delta)))
}

/// `(4p³ − q²)/27` for the cubic resolvent invariants of
/// `Δ_0 + Δ_1 t + Δ_2 t² + Δ_3 t³ + Δ_4 t⁴`.
pub fn quartic_resolvent_discriminant(d: &[SparsePoly; 5]) -> Result<SparsePoly> {
    if d[4].is_zero() {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let c = |x: i64| BigInt::from(x);
    let p = (&d[4] * &d[0]).scale(&c(12)) - (&d[3] * &d[1]).scale(&c(3)) + &d[2] * &d[2];
    let q = (&(&d[4] * &d[2]) * &d[0]).scale(&c(72)) + (&(&d[3] * &d[2]) * &d[1]).scale(&c(9))
        - (&(&d[4] * &d[1]) * &d[1]).scale(&c(27))
        - (&(&d[0] * &d[3]) * &d[3]).scale(&c(27))
        - (&(&d[2] * &d[2]) * &d[2]).scale(&c(2));
    let num = (&(&p * &p) * &p).scale(&c(4)) - &q * &q;
    Ok(num.div_scalar(&c(QUARTIC_RESOLVENT_DENOMINATOR)).expect("4p^3 - q^2 is divisible by 27"))
}

/// Monomials of degree `d` in `nvars` variables, in a fixed order.
pub fn monomials_of_degree(nvars: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    fn rec(i: usize, rem: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = rem;
            out.push(cur.clone());
            return;
        }
        for v in (0..=rem).rev() {
            cur[i] = v;
            rec(i + 1, rem - v, cur, out);
        }
    }
    if nvars == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, d, &mut cur, &mut out);
    out
}

/// Homogeneous resultant `Res_{e,…,e}(F_0,…,F_r)` of `r+1` forms of equal
/// degree, as the Macaulay determinant divided by its extraneous minor.
pub fn macaulay_resultant(forms: &[PencilForm]) -> Result<SparsePoly> {
    let first = forms.first().ok_or_else(|| Error::InvalidInput("no forms".into()))?;
    let r = first.r;
    let e = first.degree;
    if r < 1 || forms.len() != r + 1 {
        return Err(Error::InvalidInput("need r+1 forms in r+1 variables with r ≥ 1".into()));
    }
    if forms.iter().any(|f| f.r != r || f.degree != e || f.vars.names() != first.vars.names()) {
        return Err(Error::InvalidInput("forms must share variables and degree".into()));
    }
    let t = first.vars.clone();
    if e == 0 {
        let mut acc = SparsePoly::one(&t);
        for f in forms {
            acc = &acc * &f.coefficient(&vec![0; r + 1]);
        }
        return Ok(acc);
    }
    let big_d = (r as u32 + 1) * (e - 1) + 1;
    let monos = monomials_of_degree(r + 1, big_d);
    let index: HashMap<&Vec<u32>, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let zero = SparsePoly::zero(&t);
    for rot in 0..=r {
        let order: Vec<usize> = (0..=r).map(|k| (k + rot) % (r + 1)).collect();
        let mut rows = Vec::with_capacity(monos.len());
        let mut reduced = Vec::with_capacity(monos.len());
        for m in &monos {
            let divisible: Vec<usize> = order.iter().copied().filter(|&i| m[i] >= e).collect();
            let i = divisible[0];
            reduced.push(divisible.len() == 1);
            let mut shift = m.clone();
            shift[i] -= e;
            let mut row = vec![zero.clone(); monos.len()];
            for (alpha, c) in &forms[i].coeffs {
                let col: Vec<u32> = alpha.iter().zip(&shift).map(|(a, s)| a + s).collect();
                row[index[&col]] = c.clone();
            }
            rows.push(row);
        }
        let keep: Vec<usize> = (0..monos.len()).filter(|&k| !reduced[k]).collect();
        let minor: Vec<Vec<SparsePoly>> = keep.iter().map(|&i| keep.iter().map(|&j| rows[i][j].clone()).collect()).collect();
        let ext = bareiss_det(minor, SparsePoly::one(&t));
        if ext.is_zero() {
            continue;
        }
        let det = bareiss_det(rows, SparsePoly::one(&t));
        return det.exact_divide(&ext).map_err(|err| Error::InvalidInput(format!("Macaulay quotient not exact: {err}")));
    }
    perturbed_macaulay(forms)
}

/// Fallback when every extraneous minor vanishes: resultant of
/// `F_i + s·λ_i^e` as a polynomial in `s`, evaluated at `s = 0`.
fn perturbed_macaulay(forms: &[PencilForm]) -> Result<SparsePoly> {
    let t = forms[0].vars.clone();
    let s_name = "__perturb_s";
    if t.index_of(s_name).is_some() {
        return Err(Error::ResultantDegenerate);
    }
    let mut names = t.names().to_vec();
    names.push(s_name.to_string());
    let ts = VarTable::new(names)?;
    let s = SparsePoly::var(&ts, t.len());
    let r = forms[0].r;
    let e = forms[0].degree;
    let mut lifted = Vec::with_capacity(forms.len());
    for (i, f) in forms.iter().enumerate() {
        let mut g = f.map_coefficients(&ts, |c| c.embed(&ts))?;
        let mut key = vec![0u32; r + 1];
        key[i] = e;
        let cur = g.coefficient(&key);
        g.coeffs.insert(key, &cur + &s);
        lifted.push(g);
    }
    let res = macaulay_resultant(&lifted)?;
    let mut images: Vec<SparsePoly> = (0..t.len()).map(|k| SparsePoly::var(&t, k)).collect();
    images.push(SparsePoly::zero(&t));
    if t.is_empty() {
        return Ok(SparsePoly::constant(&t, res.eval(&[num_traits::Zero::zero()])));
    }
    res.compose(&images)
}

/// Collect homogeneous polynomials in the `lambda` variables as forms and
/// take their Macaulay resultant.
pub fn macaulay_resultant_polys(forms: &[SparsePoly], lambda: &[usize]) -> Result<SparsePoly> {
    let pencils = forms.iter().map(|f| f.collect_as_pencil(lambda)).collect::<Result<Vec<_>>>()?;
    let e = pencils.iter().map(|p| p.degree).max().unwrap_or(0);
    // zero forms collect with degree 0; give them the common degree
    let pencils: Vec<PencilForm> = pencils
        .into_iter()
        .map(|mut p| {
            if p.is_zero() {
                p.degree = e;
            }
            p
        })
        .collect();
    macaulay_resultant(&pencils)
}

/// Partial derivative of a form with respect to `λ_i`.
pub fn pencil_partial(h: &PencilForm, i: usize) -> PencilForm {
    let mut coeffs = BTreeMap::new();
    for (alpha, c) in &h.coeffs {
        if alpha[i] > 0 {
            let mut a = alpha.clone();
            a[i] -= 1;
            coeffs.insert(a, c.scale(&BigInt::from(alpha[i])));
        }
    }
    PencilForm { r: h.r, degree: h.degree.saturating_sub(1), vars: h.vars.clone(), coeffs }
}

fn generic_form_vars(r: usize, delta: u32) -> (Arc<VarTable>, Vec<Vec<u32>>) {
    let monos = monomials_of_degree(r + 1, delta);
    let names = monos.iter().map(|m| {
        let s: Vec<String> = m.iter().map(|x| x.to_string()).collect();
        format!("u_{{{}}}", s.join(","))
    });
    (VarTable::new(names).unwrap(), monos)
}

/// Normalized discriminant of the generic form of degree δ in r+1
/// variables, for the cases small enough to expand (r = 1, or δ = 2).
fn generic_homogeneous_discriminant(r: usize, delta: u32) -> Option<(SparsePoly, Vec<Vec<u32>>)> {
    if r == 1 {
        let g = generic_univariate_discriminant(delta);
        let monos = (0..=delta).map(|i| vec![delta - i, i]).collect();
        return Some((g, monos));
    }
    if delta != 2 {
        return None;
    }
    let (t, monos) = generic_form_vars(r, delta);
    if let Some(p) = generic_cache().lock().unwrap().get(&(r, delta)) {
        return Some((p.clone(), monos));
    }
    let mut coeffs = BTreeMap::new();
    for (k, m) in monos.iter().enumerate() {
        coeffs.insert(m.clone(), SparsePoly::var(&t, k));
    }
    let h = PencilForm { r, degree: delta, vars: t.clone(), coeffs };
    let partials: Vec<PencilForm> = (0..=r).map(|i| pencil_partial(&h, i)).collect();
    let res = macaulay_resultant(&partials).ok()?;
    let g = res.normalized();
    generic_cache().lock().unwrap().insert((r, delta), g.clone());
    Some((g, monos))
}

/// Discriminant of a form in `λ_0..λ_r`. For r = 0 this is the coefficient;
/// for r = 1 and for quadrics the normalized generic discriminant is
/// composed with the coefficients; otherwise the resultant of the partial
/// derivatives is returned, which differs from the normalized discriminant
/// by a fixed nonzero integer.
pub fn homogeneous_discriminant(h: &PencilForm) -> Result<SparsePoly> {
    if h.degree == 0 {
        return Err(Error::InvalidInput("discriminant needs degree at least 1".into()));
    }
    if h.r == 0 {
        return Ok(h.coefficient(&[h.degree]));
    }
    if let Some((g, monos)) = generic_homogeneous_discriminant(h.r, h.degree) {
        let images: Vec<SparsePoly> = monos.iter().map(|m| h.coefficient(m)).collect();
        return g.compose(&images);
    }
    let partials: Vec<PencilForm> = (0..=h.r).map(|i| pencil_partial(h, i)).collect();
    macaulay_resultant(&partials)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(names: &[&str]) -> Arc<VarTable> {
        VarTable::new(names.iter().copied()).unwrap()
    }

    fn uni(t: &Arc<VarTable>, cs: &[&str]) -> UniPoly {
        UniPoly::new(cs.iter().map(|c| SparsePoly::parse(t, c).unwrap()).collect()).unwrap()
    }

    #[test]
    fn small_resultants() {
        let t = table(&["a", "b"]);
        let r = sylvester_resultant(&uni(&t, &["-a", "1"]), &uni(&t, &["-b", "1"])).unwrap();
        assert_eq!(r.to_string(), "a - b");
        let t = table(&["a_0", "a_1", "a_2", "b_0", "b_1"]);
        let r = sylvester_resultant(&uni(&t, &["a_0", "a_1", "a_2"]), &uni(&t, &["b_0", "b_1"])).unwrap();
        assert_eq!(r, SparsePoly::parse(&t, "a_0*b_1^2 - a_1*b_0*b_1 + a_2*b_0^2").unwrap());
    }

    #[test]
    fn generic_discriminants() {
        let g2 = generic_univariate_discriminant(2);
        assert_eq!(g2.to_string(), "-4*u_0*u_2 + u_1^2");
        let g3 = generic_univariate_discriminant(3);
        assert_eq!(g3.total_degree(), Some(4));
        assert_eq!(g3.len(), 5);
        let g4 = generic_univariate_discriminant(4);
        assert_eq!(g4.total_degree(), Some(6));
        assert_eq!(g4.len(), 16);
    }

    #[test]
    fn concrete_discriminants() {
        let x = |v: &[i64]| UniPoly::from_integers(&v.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>()).unwrap();
        assert!(univariate_discriminant(&x(&[1, -2, 1])).unwrap().is_zero());
        assert_eq!(univariate_discriminant(&x(&[-1, 0, 1])).unwrap().constant_value(), Some(BigInt::from(4)));
    }

    #[test]
    fn homogeneous_quadric_pencil() {
        let t = table(&["D_0", "D_1", "D_2"]);
        let mut coeffs = BTreeMap::new();
        coeffs.insert(vec![0, 2], SparsePoly::var(&t, 0));
        coeffs.insert(vec![1, 1], SparsePoly::var(&t, 1));
        coeffs.insert(vec![2, 0], SparsePoly::var(&t, 2));
        let h = PencilForm { r: 1, degree: 2, vars: t.clone(), coeffs };
        assert_eq!(homogeneous_discriminant(&h).unwrap(), SparsePoly::parse(&t, "D_1^2 - 4*D_0*D_2").unwrap());
        let mut c0 = BTreeMap::new();
        c0.insert(vec![3], SparsePoly::var(&t, 1));
        let h0 = PencilForm { r: 0, degree: 3, vars: t.clone(), coeffs: c0 };
        assert_eq!(homogeneous_discriminant(&h0).unwrap(), SparsePoly::var(&t, 1));
    }

    #[test]
    fn linear_macaulay_is_determinant() {
        let names: Vec<String> = (0..9).map(|k| format!("a_{k}")).collect();
        let t = VarTable::new(names).unwrap();
        let forms: Vec<PencilForm> = (0..3)
            .map(|i| {
                let mut c = BTreeMap::new();
                for j in 0..3 {
                    let mut e = vec![0u32; 3];
                    e[j] = 1;
                    c.insert(e, SparsePoly::var(&t, 3 * i + j));
                }
                PencilForm { r: 2, degree: 1, vars: t.clone(), coeffs: c }
            })
            .collect();
        let res = macaulay_resultant(&forms).unwrap();
        let m: Vec<Vec<SparsePoly>> = (0..3).map(|i| (0..3).map(|j| SparsePoly::var(&t, 3 * i + j)).collect()).collect();
        assert_eq!(res, bareiss_det(m, SparsePoly::one(&t)));
    }

    #[test]
    fn ternary_quadric_matches_half_hessian() {
        let t = table(&["h00", "h01", "h02", "h11", "h12", "h22"]);
        let v = |s: &str| SparsePoly::parse(&t, s).unwrap();
        let mut coeffs = BTreeMap::new();
        coeffs.insert(vec![2, 0, 0], v("h00"));
        coeffs.insert(vec![1, 1, 0], v("h01"));
        coeffs.insert(vec![1, 0, 1], v("h02"));
        coeffs.insert(vec![0, 2, 0], v("h11"));
        coeffs.insert(vec![0, 1, 1], v("h12"));
        coeffs.insert(vec![0, 0, 2], v("h22"));
        let h = PencilForm { r: 2, degree: 2, vars: t.clone(), coeffs };
        let d = homogeneous_discriminant(&h).unwrap();
        let two = |s: &str| v(s).scale(&BigInt::from(2));
        let m = vec![
            vec![two("h00"), v("h01"), v("h02")],
            vec![v("h01"), two("h11"), v("h12")],
            vec![v("h02"), v("h12"), two("h22")],
        ];
        let oracle = bareiss_det(m, SparsePoly::one(&t)).normalized();
        assert_eq!(d.normalized(), oracle);
        assert_eq!(d.total_degree(), Some(3));
    }

    #[test]
    fn singular_ternary_quartic_has_zero_resultant() {
        // λ_0² · (generic-looking quadric) is singular at (1:0:0)
        let t = VarTable::new(Vec::<String>::new()).unwrap();
        let lam = table(&["l0", "l1", "l2"]);
        let q = SparsePoly::parse(&lam, "3*l0^2 + 2*l0*l1 - 5*l1^2 + 7*l1*l2 + l2^2 - 4*l0*l2").unwrap();
        let f = &SparsePoly::parse(&lam, "l0^2").unwrap() * &q;
        let h = f.collect_as_pencil(&[0, 1, 2]).unwrap();
        let h = h.map_coefficients(&t, |c| Ok(SparsePoly::constant(&t, c.constant_value().unwrap()))).unwrap();
        let partials: Vec<PencilForm> = (0..3).map(|i| pencil_partial(&h, i)).collect();
        assert!(macaulay_resultant(&partials).unwrap().is_zero());
    }

    #[test]
    fn resolvent_route() {
        let x = |v: &[i64]| {
            v.iter().map(|&c| SparsePoly::constant(&VarTable::new(Vec::<String>::new()).unwrap(), c)).collect::<Vec<_>>()
        };
        // (t−1)(t−2)(t−3)(t−4) = t⁴ − 10t³ + 35t² − 50t + 24
        let d = x(&[24, -50, 35, -10, 1]);
        let arr: [SparsePoly; 5] = d.clone().try_into().unwrap();
        let v = quartic_resolvent_discriminant(&arr).unwrap().constant_value().unwrap();
        // Π_{i<j} (r_i − r_j)² over roots 1..4
        let mut prod = BigInt::one();
        for i in 1..=4i64 {
            for j in (i + 1)..=4 {
                prod *= BigInt::from((i - j) * (i - j));
            }
        }
        assert_eq!(v, prod);
        let z = x(&[0, 0, 2, -3, 1]);
        let arr: [SparsePoly; 5] = z.try_into().unwrap();
        assert!(quartic_resolvent_discriminant(&arr).unwrap().is_zero());
    }
}
