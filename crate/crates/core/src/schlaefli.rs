//! Iterated discriminants of pencils, mixed discriminants through the
//! Cayley trick, divisibility and factor checks, smoothness certificates
//! and multiple-root classification.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::adisc::{
    a_discriminant, closed_form, parse_rational, rational_string, DiscMethod, DiscriminantArtifact, Hints, InterpolationOptions,
    Method,
};
use crate::degrees::{deg_md_simplex, plane_deg_md};
use crate::error::{Error, Result};
use crate::lattice::{cayley, LatticeConfig, Polygon};
use crate::linalg::{nullspace_integer, rank_rational};
use crate::poly::{PencilForm, SparsePoly, VarTable};
use crate::resultants::{homogeneous_discriminant, sylvester_resultant, UniPoly};

/// Ratio between the normalized quartic discriminant and the classical
/// one produced by the cubic resolvent. The largest single exponent of the
/// generic quartic discriminant sits on `-27·u_1^4`, so normalization flips
/// the classical sign.
pub const QUARTIC_ROUTE_RATIO: i64 = -1;

/// Default cap on the predicted number of terms of a symbolic expansion.
pub const DEFAULT_SYMBOLIC_CAP: u128 = 5_000_000;

/// Coefficient variables `c_{i,j}`: polynomial `i`, point `j`.
pub fn system_vars(r: usize, npoints: usize) -> Arc<VarTable> {
    let names = (0..=r).flat_map(|i| (0..npoints).map(move |j| format!("c_{{{i},{j}}}")));
    VarTable::new(names).expect("distinct names")
}

fn lambda_vars(r: usize) -> Vec<String> {
    (0..=r).map(|i| format!("lambda_{i}")).collect()
}

/// Coefficients of a system of `r+1` polynomials on a common support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coefficients {
    Symbolic,
    Concrete(Vec<Vec<BigRational>>),
}

/// The system `p_0 = … = p_r = 0` with support `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemSpec {
    pub config: LatticeConfig,
    pub r: usize,
    pub coefficients: Coefficients,
}

#[derive(Serialize, Deserialize)]
struct SystemJson {
    config: LatticeConfig,
    systems: Vec<Vec<String>>,
}

impl SystemSpec {
    pub fn symbolic(config: &LatticeConfig, r: usize) -> SystemSpec {
        SystemSpec { config: config.clone(), r, coefficients: Coefficients::Symbolic }
    }

    pub fn concrete(config: &LatticeConfig, polys: Vec<Vec<BigRational>>) -> Result<SystemSpec> {
        if polys.is_empty() {
            return Err(Error::InvalidInput("at least one polynomial required".into()));
        }
        if polys.iter().any(|p| p.len() != config.len()) {
            return Err(Error::InvalidInput(format!("each coefficient vector needs {} entries", config.len())));
        }
        Ok(SystemSpec { config: config.clone(), r: polys.len() - 1, coefficients: Coefficients::Concrete(polys) })
    }

    pub fn from_integers(config: &LatticeConfig, polys: &[Vec<i64>]) -> Result<SystemSpec> {
        let q = polys.iter().map(|p| p.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect();
        SystemSpec::concrete(config, q)
    }

    pub fn from_json_str(s: &str) -> Result<SystemSpec> {
        let j: SystemJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let polys =
            j.systems.iter().map(|p| p.iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
        SystemSpec::concrete(&j.config, polys)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let Coefficients::Concrete(p) = &self.coefficients else {
            return Err(Error::InvalidInput("only concrete systems serialize".into()));
        };
        let j = SystemJson {
            config: self.config.clone(),
            systems: p.iter().map(|v| v.iter().map(rational_string).collect()).collect(),
        };
        Ok(serde_json::to_string_pretty(&j).expect("system serializes"))
    }

    pub fn vars(&self) -> Arc<VarTable> {
        system_vars(self.r, self.config.len())
    }

    fn concrete_polys(&self) -> Result<&[Vec<BigRational>]> {
        match &self.coefficients {
            Coefficients::Concrete(p) => Ok(p),
            Coefficients::Symbolic => Err(Error::InvalidInput("a concrete system is required".into())),
        }
    }
}

fn require_nondefective(da: &DiscriminantArtifact) -> Result<()> {
    if da.defective || da.poly.is_constant() {
        return Err(Error::Defective);
    }
    Ok(())
}

/// `D_A(λ_0 p_0 + … + λ_r p_r)` as a form of degree `δ` in the `λ_i`, with
/// coefficients in the variables `c_{i,j}`.
pub fn pencil_substitute(da: &DiscriminantArtifact, r: usize) -> Result<PencilForm> {
    require_nondefective(da)?;
    let n = da.config.len();
    let sys = system_vars(r, n);
    let mut names: Vec<String> = sys.names().to_vec();
    names.extend(lambda_vars(r));
    let table = VarTable::new(names)?;
    let lambda: Vec<usize> = (0..=r).map(|i| sys.len() + i).collect();
    let images: Vec<SparsePoly> = (0..n)
        .map(|j| {
            (0..=r).fold(SparsePoly::zero(&table), |acc, i| {
                acc + SparsePoly::var(&table, i * n + j) * SparsePoly::var(&table, lambda[i])
            })
        })
        .collect();
    let composed = da.poly.compose(&images)?;
    let delta = da.degree().unwrap_or(0);
    let pencil = composed.collect_as_pencil(&lambda)?;
    if pencil.degree != delta {
        return Err(Error::NotHomogeneous(delta));
    }
    pencil.map_coefficients(&sys, |c| c.with_table(&sys))
}

/// Per-block degree `δ(δ-1)^r` of the iterated discriminant.
pub fn id_block_degree(delta: u32, r: usize) -> u128 {
    u128::from(delta) * u128::from(delta.saturating_sub(1)).pow(r as u32)
}

fn binom(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Bound on the number of terms of the symbolic iterated discriminant.
pub fn symbolic_size_bound(npoints: usize, delta: u32, r: usize) -> u128 {
    let w = id_block_degree(delta, r);
    let per_block = binom(w + npoints as u128 - 1, npoints as u128 - 1);
    (0..=r).fold(1u128, |acc, _| acc.saturating_mul(per_block))
}

/// Symbolic iterated discriminant `D_{δΔ_r}(D_A(P_λ))`, normalized. The zero
/// polynomial is returned when the construction vanishes identically.
pub fn iterated_discriminant(spec: &SystemSpec, da: &DiscriminantArtifact, cap: u128) -> Result<DiscriminantArtifact> {
    if spec.coefficients != Coefficients::Symbolic {
        return Err(Error::InvalidInput("use iterated_discriminant_at for concrete systems".into()));
    }
    require_nondefective(da)?;
    let delta = da.degree().unwrap_or(0);
    let bound = symbolic_size_bound(spec.config.len(), delta, spec.r);
    if bound > cap {
        return Err(Error::SymbolicCapExceeded { bound, cap });
    }
    let pencil = pencil_substitute(da, spec.r)?;
    let predicted = u32::try_from((spec.r as u128 + 1) * id_block_degree(delta, spec.r)).ok();
    let raw = if pencil.is_zero() { SparsePoly::zero(&spec.vars()) } else { homogeneous_discriminant(&pencil)? };
    Ok(DiscriminantArtifact::from_raw(&spec.config, raw, Method::Schlaefli, predicted))
}

/// Integer multiples `s_i·p_i` of rational coefficient vectors.
fn integer_scaled(polys: &[Vec<BigRational>]) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let mut ints = Vec::new();
    let mut scales = Vec::new();
    for p in polys {
        let s = p.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        ints.push(p.iter().map(|q| (q * BigRational::from_integer(s.clone())).to_integer()).collect());
        scales.push(s);
    }
    (ints, scales)
}

/// Value of the iterated discriminant at concrete rational coefficients.
/// The coefficients are specialized first, so the outer discriminant runs
/// on a numeric form in the `λ_i`.
pub fn iterated_discriminant_at(spec: &SystemSpec, da: &DiscriminantArtifact) -> Result<BigRational> {
    require_nondefective(da)?;
    let polys = spec.concrete_polys()?;
    let (ints, scales) = integer_scaled(polys);
    let r = spec.r;
    let table = VarTable::new(lambda_vars(r))?;
    let images: Vec<SparsePoly> = (0..spec.config.len())
        .map(|j| (0..=r).fold(SparsePoly::zero(&table), |acc, i| acc + SparsePoly::var(&table, i).scale(&ints[i][j])))
        .collect();
    let form = da.poly.compose(&images)?;
    if form.is_zero() {
        return Ok(BigRational::zero());
    }
    let pencil = form.collect_as_pencil(&(0..=r).collect::<Vec<_>>())?;
    let value =
        homogeneous_discriminant(&pencil)?.constant_value().ok_or_else(|| Error::InvalidInput("non-numeric result".into()))?;
    let delta = da.degree().unwrap_or(0);
    let w = id_block_degree(delta, r) as usize;
    let den = scales.iter().fold(BigInt::one(), |acc, s| acc * num_traits::pow(s.clone(), w));
    Ok(BigRational::new(value, den))
}

/// Dispatch choice for [`mixed_discriminant`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixedMethod {
    Auto,
    Closed,
    CayleyInterpolate,
    Resultant,
}

/// 2×2×2 hyperdeterminant of `a[i][j][k]`.
pub fn hyperdeterminant_222(a: &[[[SparsePoly; 2]; 2]; 2]) -> SparsePoly {
    let v = |i: usize, j: usize, k: usize| &a[i][j][k];
    let sq = |i, j, k, l, m, n| (v(i, j, k) * v(l, m, n)).pow(2);
    let quad = |p: [(usize, usize, usize); 4]| {
        p.iter().fold(SparsePoly::one(a[0][0][0].vars()), |acc, &(i, j, k)| acc * v(i, j, k).clone())
    };
    let squares = sq(0, 0, 0, 1, 1, 1) + sq(0, 0, 1, 1, 1, 0) + sq(0, 1, 0, 1, 0, 1) + sq(1, 0, 0, 0, 1, 1);
    let twos = quad([(0, 0, 0), (0, 0, 1), (1, 1, 0), (1, 1, 1)])
        + quad([(0, 0, 0), (0, 1, 0), (1, 0, 1), (1, 1, 1)])
        + quad([(0, 0, 0), (1, 0, 0), (0, 1, 1), (1, 1, 1)])
        + quad([(0, 0, 1), (0, 1, 0), (1, 0, 1), (1, 1, 0)])
        + quad([(0, 0, 1), (1, 0, 0), (0, 1, 1), (1, 1, 0)])
        + quad([(0, 1, 0), (1, 0, 0), (0, 1, 1), (1, 0, 1)]);
    let fours = quad([(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]) + quad([(0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 1)]);
    squares - twos.scale(&BigInt::from(2)) + fours.scale(&BigInt::from(4))
}

/// Points of a one-dimensional configuration forming a contiguous run.
fn contiguous_line(config: &LatticeConfig) -> bool {
    config.dim() == 1 && config.points().windows(2).all(|w| (w[0][0] - w[1][0]).abs() == 1)
}

fn is_unit_square(config: &LatticeConfig) -> bool {
    *config == Polygon::unit_square().lattice_points()
}

/// Degree of the mixed discriminant predicted by closed formulas.
pub fn predicted_md_degree(config: &LatticeConfig, r: usize) -> Option<u32> {
    let n = config.dim();
    let min: Vec<i64> = (0..n).map(|i| config.points().iter().map(|p| p[i]).min().unwrap_or(0)).collect();
    let shifted: Vec<Vec<i64>> = config.points().iter().map(|p| p.iter().zip(&min).map(|(a, m)| a - m).collect()).collect();
    let d = shifted.iter().map(|p| p.iter().sum::<i64>()).max()?;
    if d >= 1 && LatticeConfig::new(n, shifted).ok()? == LatticeConfig::dilated_simplex(n, d as u32) {
        return u32::try_from(deg_md_simplex(n as u32, d as u32, r as u32)).ok();
    }
    if n == 2 && r == 1 {
        let pts: Vec<(i64, i64)> = config.points().iter().map(|p| (p[0], p[1])).collect();
        let poly = Polygon::hull(&pts).ok()?;
        if poly.lattice_points() == *config && poly.is_smooth() {
            return u32::try_from(plane_deg_md(&poly).ok()?).ok();
        }
    }
    None
}

/// Mixed discriminant of `r+1` polynomials with common support, over the
/// variables `c_{i,j}`.
pub fn mixed_discriminant(
    config: &LatticeConfig,
    r: usize,
    method: MixedMethod,
    degree_hint: Option<u32>,
    opts: &InterpolationOptions,
) -> Result<DiscriminantArtifact> {
    let vars = system_vars(r, config.len());
    let da = closed_form(config)?;
    if da.as_ref().is_some_and(|a| a.defective) || !crate::adisc::cayley_nondefective(r, config.affine_rank(), 0)?.0 {
        return Ok(DiscriminantArtifact::defective(config, &vars));
    }
    let var = |i: usize, j: usize| SparsePoly::var(&vars, i * config.len() + j);
    if r == 1 && matches!(method, MixedMethod::Auto | MixedMethod::Closed) && is_unit_square(config) {
        let idx = |x: i64, y: i64| config.index_of(&[x, y]).unwrap();
        let a: [[[SparsePoly; 2]; 2]; 2] =
            std::array::from_fn(|i| std::array::from_fn(|x| std::array::from_fn(|y| var(i, idx(x as i64, y as i64)))));
        return Ok(DiscriminantArtifact::from_raw(config, hyperdeterminant_222(&a), Method::ClosedForm, Some(4)));
    }
    if r == 1 && matches!(method, MixedMethod::Auto | MixedMethod::Closed | MixedMethod::Resultant) && contiguous_line(config) {
        let mut order: Vec<usize> = (0..config.len()).collect();
        order.sort_by_key(|&j| config.points()[j][0]);
        let f = UniPoly::new(order.iter().map(|&j| var(0, j)).collect())?;
        let g = UniPoly::new(order.iter().map(|&j| var(1, j)).collect())?;
        let d = 2 * (config.len() as u32 - 1);
        return Ok(DiscriminantArtifact::from_raw(config, sylvester_resultant(&f, &g)?, Method::ClosedForm, Some(d)));
    }
    if matches!(method, MixedMethod::Closed | MixedMethod::Resultant) {
        return Err(Error::NoMethodAvailable("no closed form for this mixed discriminant".into()));
    }
    let degree = degree_hint
        .or_else(|| predicted_md_degree(config, r))
        .ok_or_else(|| Error::NoMethodAvailable("no predicted degree; pass one to interpolate".into()))?;
    let per_block = degree / (r as u32 + 1);
    if per_block * (r as u32 + 1) != degree {
        return Err(Error::InvalidInput("degree must split evenly over the blocks".into()));
    }
    let cc = cayley(&vec![config.clone(); r + 1])?;
    let blocks: Vec<(Vec<usize>, u32)> =
        (0..=r).map(|i| ((0..cc.block.len()).filter(|&k| cc.block[k] == i).collect(), per_block)).collect();
    let hints = Hints { degree: Some(degree), multidegree: Some(blocks), interpolation: opts.clone() };
    let art = a_discriminant(&cc.config, DiscMethod::Interpolate, &hints)?;
    // rename Cayley point k to c_{block, source}
    let names: Vec<String> = (0..cc.block.len()).map(|k| format!("c_{{{},{}}}", cc.block[k], cc.source[k])).collect();
    let poly = art.poly.with_table(&VarTable::new(names)?)?.embed(&vars)?;
    Ok(DiscriminantArtifact { config: config.clone(), poly, method: Method::Cayley, ..art })
}

/// Outcome of a factorization check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorVerdict {
    /// The mixed discriminant divides; no factor was tested.
    Divides,
    /// `ID = constant · MD · h^μ`.
    Matched,
    /// The quotient is not `constant · h^μ`.
    Mismatch,
    /// Division left a remainder.
    NotDivisible,
}

/// A matched extra factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchedFactor {
    pub h: SparsePoly,
    pub mu: u32,
    pub constant: BigRational,
}

/// Result of dividing an iterated by a mixed discriminant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorReport {
    pub id: SparsePoly,
    pub md: SparsePoly,
    pub quotient: Option<SparsePoly>,
    pub factor: Option<MatchedFactor>,
    pub verdict: FactorVerdict,
    /// Largest power of the candidate dividing the quotient, when probed.
    pub multiplicity_probe: Option<u32>,
}

impl FactorReport {
    pub fn to_json_string(&self) -> String {
        let j = json!({
            "verdict": self.verdict,
            "id_degree": self.id.total_degree(),
            "md_degree": self.md.total_degree(),
            "quotient": self.quotient.as_ref().map(|q| q.to_string()),
            "quotient_degree": self.quotient.as_ref().and_then(SparsePoly::total_degree),
            "factor": self.factor.as_ref().map(|f| json!({
                "h": f.h.to_string(),
                "mu": f.mu,
                "constant": rational_string(&f.constant),
            })),
            "multiplicity_probe": self.multiplicity_probe,
        });
        serde_json::to_string_pretty(&j).expect("report serializes")
    }
}

fn align(p: &SparsePoly, target: &Arc<VarTable>) -> Result<SparsePoly> {
    if p.vars().names() == target.names() {
        p.with_table(target)
    } else {
        p.embed(target)
    }
}

/// Exact division `ID / MD`.
pub fn divisibility_check(id: &SparsePoly, md: &SparsePoly) -> Result<FactorReport> {
    let md_aligned = align(md, id.vars())?;
    let (quotient, verdict) = match id.exact_divide(&md_aligned) {
        Ok(q) => (Some(q), FactorVerdict::Divides),
        Err(_) => (None, FactorVerdict::NotDivisible),
    };
    Ok(FactorReport { id: id.clone(), md: md_aligned, quotient, factor: None, verdict, multiplicity_probe: None })
}

/// Constant `c` with `quotient = c · candidate^μ`, if one exists.
pub fn factor_match(quotient: &SparsePoly, candidate: &SparsePoly, mu: u32) -> Result<Option<BigRational>> {
    if mu == 0 {
        return Err(Error::InvalidInput("μ must be positive".into()));
    }
    let cand = align(candidate, quotient.vars())?.pow(mu);
    let (Some((qm, qc)), Some((cm, cc))) = (quotient.leading_term(), cand.leading_term()) else {
        return Ok(None);
    };
    if qm != cm || quotient.len() != cand.len() {
        return Ok(None);
    }
    let c = BigRational::new(qc.clone(), cc.clone());
    let ok = quotient.scale(c.denom()) == cand.scale(c.numer());
    Ok(ok.then_some(c))
}

/// Largest `μ` such that `h^μ` divides `p` exactly.
pub fn probe_multiplicity(p: &SparsePoly, h: &SparsePoly) -> Result<u32> {
    if h.is_constant() {
        return Err(Error::InvalidInput("probe factor must be nonconstant".into()));
    }
    let h = align(h, p.vars())?;
    let mut cur = p.clone();
    let mut mu = 0;
    while !cur.is_zero() {
        match cur.exact_divide(&h) {
            Ok(q) => {
                cur = q;
                mu += 1;
            }
            Err(_) => break,
        }
    }
    Ok(mu)
}

/// Full check: divide, then match the quotient against `candidate^μ` and
/// probe the multiplicity of the candidate.
pub fn factor_report(id: &SparsePoly, md: &SparsePoly, candidate: Option<&SparsePoly>, mu: u32) -> Result<FactorReport> {
    let mut rep = divisibility_check(id, md)?;
    if let (Some(q), Some(h)) = (rep.quotient.clone(), candidate) {
        match factor_match(&q, h, mu)? {
            Some(c) => {
                rep.verdict = FactorVerdict::Matched;
                rep.factor = Some(MatchedFactor { h: align(h, q.vars())?, mu, constant: c });
            }
            None => rep.verdict = FactorVerdict::Mismatch,
        }
        rep.multiplicity_probe = Some(probe_multiplicity(&q, h)?);
    }
    Ok(rep)
}

/// Independent elimination of the triple-root condition for a pencil of
/// two cubics, over the variables `c_{i,j}` of the configuration
/// `{0, 1, 2, 3}`.
///
/// `p_λ'' = 0` is solved by `λ = (p_1'', -p_0'')`; substituting into `p_λ`
/// and `p_λ'` leaves `F` of degree 3 and `G` of degree 2 in `x`. Their
/// resultant carries extraneous powers of `a_2 b_3 - a_3 b_2`, which are
/// divided out.
pub fn cusp_chow_oracle_cubic() -> Result<SparsePoly> {
    let config = LatticeConfig::dilated_simplex(1, 3);
    let vars = system_vars(1, 4);
    let coef = |i: usize, e: i64| SparsePoly::var(&vars, i * 4 + config.index_of(&[e]).unwrap());
    let zero = SparsePoly::zero(&vars);
    let p = |i: usize| -> Vec<SparsePoly> { (0..4).map(|e| coef(i, e)).collect() };
    let deriv =
        |c: &[SparsePoly]| -> Vec<SparsePoly> { c.iter().enumerate().skip(1).map(|(k, x)| x.scale(&BigInt::from(k))).collect() };
    let mul = |a: &[SparsePoly], b: &[SparsePoly]| -> Vec<SparsePoly> {
        let mut out = vec![zero.clone(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
        out
    };
    let sub = |a: Vec<SparsePoly>, b: Vec<SparsePoly>| -> Vec<SparsePoly> {
        let n = a.len().max(b.len());
        (0..n).map(|k| a.get(k).unwrap_or(&zero) - b.get(k).unwrap_or(&zero)).collect()
    };
    let (p0, p1) = (p(0), p(1));
    let (d0, d1) = (deriv(&p0), deriv(&p1));
    let (dd0, dd1) = (deriv(&d0), deriv(&d1));
    let f = sub(mul(&dd1, &p0), mul(&dd0, &p1));
    let g = sub(mul(&dd1, &d0), mul(&dd0, &d1));
    let res = sylvester_resultant(&UniPoly::new(f)?, &UniPoly::new(g)?)?;
    let l = &coef(0, 2) * &coef(1, 3) - &coef(0, 3) * &coef(1, 2);
    let mut cur = res;
    while let Ok(q) = cur.exact_divide(&l) {
        cur = q;
    }
    Ok(cur.normalized())
}

/// Outcome of an evaluation-mode certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// Nonzero iterated discriminant: the intersection is smooth.
    Smooth(BigRational),
    /// Zero value; nothing is claimed.
    Inconclusive,
}

/// Evaluation-mode smoothness certificate for a concrete system.
pub fn smoothness_certificate(spec: &SystemSpec, da: &DiscriminantArtifact) -> Result<Certificate> {
    let v = iterated_discriminant_at(spec, da)?;
    Ok(if v.is_zero() { Certificate::Inconclusive } else { Certificate::Smooth(v) })
}

/// Kind of a candidate common root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootClass {
    Transverse,
    NondegenerateMultiple,
    Degenerate,
}

/// Value and gradient of `Σ c_j x^{a_j}` at a point that may have zero
/// coordinates, as long as no negative power of zero is needed.
pub fn eval_with_gradient(
    config: &LatticeConfig,
    coeffs: &[BigRational],
    x: &[BigRational],
) -> Result<(BigRational, Vec<BigRational>)> {
    let n = config.dim();
    if x.len() != n || coeffs.len() != config.len() {
        return Err(Error::InvalidInput("point or coefficient vector has the wrong length".into()));
    }
    let pow = |b: &BigRational, e: i64| -> Result<BigRational> {
        if e >= 0 {
            Ok(num_traits::pow(b.clone(), e as usize))
        } else if b.is_zero() {
            Err(Error::InvalidInput("negative power of a zero coordinate".into()))
        } else {
            Ok(num_traits::pow(b.recip(), (-e) as usize))
        }
    };
    let mut val = BigRational::zero();
    let mut grad = vec![BigRational::zero(); n];
    for (a, c) in config.points().iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        let mut m = c.clone();
        for (xi, &ai) in x.iter().zip(a) {
            m *= pow(xi, ai)?;
        }
        val += m;
        for i in 0..n {
            if a[i] == 0 {
                continue;
            }
            let mut t = c * BigRational::from_integer(a[i].into());
            for (k, (xk, &ak)) in x.iter().zip(a).enumerate() {
                t *= pow(xk, if k == i { ak - 1 } else { ak })?;
            }
            grad[i] += t;
        }
    }
    Ok((val, grad))
}

/// Classify `x` as a common root of a concrete system. Zero coordinates
/// are accepted when the support has no negative exponents. When `lambda`
/// is given for a multiple root it must be a dependency of the gradients.
pub fn multiple_root_classify(spec: &SystemSpec, x: &[BigRational], lambda: Option<&[BigRational]>) -> Result<RootClass> {
    let polys = spec.concrete_polys()?;
    let mut grads = Vec::new();
    for p in polys {
        let (v, g) = eval_with_gradient(&spec.config, p, x)?;
        if !v.is_zero() {
            return Ok(RootClass::Transverse);
        }
        grads.push(g);
    }
    let r = spec.r;
    let rank = |cols: &[usize]| rank_rational(cols.iter().map(|&i| grads[i].clone()).collect());
    let all: Vec<usize> = (0..=r).collect();
    let full = rank(&all);
    if full == r + 1 {
        return Ok(RootClass::Transverse);
    }
    let subsets_ok = full == r && (0..=r).all(|skip| rank(&all.iter().copied().filter(|&i| i != skip).collect::<Vec<_>>()) == r);
    let class = if subsets_ok { RootClass::NondegenerateMultiple } else { RootClass::Degenerate };
    if let Some(l) = lambda {
        if l.len() != r + 1 || l.iter().all(Zero::is_zero) {
            return Err(Error::InvalidInput("λ must be a nonzero vector with one entry per polynomial".into()));
        }
        let combo: Vec<BigRational> = (0..spec.config.dim()).map(|k| (0..=r).map(|i| &l[i] * &grads[i][k]).sum()).collect();
        if !combo.iter().all(Zero::is_zero) {
            return Err(Error::InvalidInput("λ is not a dependency of the gradients".into()));
        }
    }
    Ok(class)
}

/// Two polynomials on `config` with a common root at the torus point `u`
/// where their gradients agree; coefficients drawn at random from the
/// solution lattice.
pub fn tangent_pair_sample<R: Rng>(config: &LatticeConfig, u: &[BigRational], rng: &mut R) -> Result<[Vec<BigInt>; 2]> {
    if u.len() != config.dim() || u.iter().any(Zero::is_zero) {
        return Err(Error::InvalidInput("witness must be a torus point of the right dimension".into()));
    }
    let m = config.len();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let mut basis_rows = Vec::new();
    for j in 0..m {
        let mut e = vec![BigRational::zero(); m];
        e[j] = BigRational::one();
        basis_rows.push(eval_with_gradient(config, &e, u)?);
    }
    // p_0(u) = 0, p_1(u) = 0, grad p_0(u) = grad p_1(u)
    let mut r0 = vec![BigRational::zero(); 2 * m];
    let mut r1 = vec![BigRational::zero(); 2 * m];
    for j in 0..m {
        r0[j] = basis_rows[j].0.clone();
        r1[m + j] = basis_rows[j].0.clone();
    }
    rows.push(r0);
    rows.push(r1);
    for i in 0..config.dim() {
        let mut row = vec![BigRational::zero(); 2 * m];
        for j in 0..m {
            row[j] = basis_rows[j].1[i].clone();
            row[m + j] = -basis_rows[j].1[i].clone();
        }
        rows.push(row);
    }
    let int_rows: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let l = r.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            r.iter().map(|q| (q * BigRational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect();
    let basis = nullspace_integer(&int_rows, 2 * m);
    loop {
        let mut v = vec![BigInt::zero(); 2 * m];
        for b in &basis {
            let k = BigInt::from(rng.gen_range(-9i64..=9));
            for (x, y) in v.iter_mut().zip(b) {
                *x += &k * y;
            }
        }
        let (p0, p1) = v.split_at(m);
        if p0.iter().any(|x| !x.is_zero()) && p1.iter().any(|x| !x.is_zero()) && p0 != p1 {
            return Ok([p0.to_vec(), p1.to_vec()]);
        }
    }
}

/// Coefficients `Δ_0..Δ_4` of `det(M_0 + t M_1)` for two quadric surfaces
/// given on the configuration `2Δ_3`; `M_i` is the symmetric matrix of the
/// homogenized quadric.
pub fn quadric_pencil_coefficients(config: &LatticeConfig, p0: &[BigRational], p1: &[BigRational]) -> Result<[BigRational; 5]> {
    if *config != LatticeConfig::dilated_simplex(3, 2) || p0.len() != 10 || p1.len() != 10 {
        return Err(Error::InvalidInput("expects two quadrics on 2Δ_3".into()));
    }
    let matrix = |p: &[BigRational]| -> Vec<Vec<BigRational>> {
        let mut m = vec![vec![BigRational::zero(); 4]; 4];
        for (j, pt) in config.points().iter().enumerate() {
            let mut e = vec![2 - pt.iter().sum::<i64>()];
            e.extend(pt);
            let idx: Vec<usize> = e.iter().enumerate().flat_map(|(k, &x)| std::iter::repeat_n(k, x as usize)).collect();
            if idx[0] == idx[1] {
                m[idx[0]][idx[0]] = p[j].clone();
            } else {
                let h = &p[j] / BigRational::from_integer(2.into());
                m[idx[0]][idx[1]] = h.clone();
                m[idx[1]][idx[0]] = h;
            }
        }
        m
    };
    let (m0, m1) = (matrix(p0), matrix(p1));
    // det at t = 0..4, then Lagrange interpolation
    let vals: Vec<BigRational> = (0..5i64)
        .map(|t| {
            let tq = BigRational::from_integer(t.into());
            let m: Vec<Vec<BigRational>> = (0..4).map(|i| (0..4).map(|k| &m0[i][k] + &tq * &m1[i][k]).collect()).collect();
            crate::linalg::bareiss_det(m, BigRational::one())
        })
        .collect();
    let mut coeffs: [BigRational; 5] = std::array::from_fn(|_| BigRational::zero());
    for (i, v) in vals.iter().enumerate() {
        // basis polynomial Π_{k≠i} (t - k)/(i - k)
        let mut basis = vec![BigRational::one()];
        let mut den = BigRational::one();
        for k in 0..5i64 {
            if k as usize == i {
                continue;
            }
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (d, c) in basis.iter().enumerate() {
                next[d + 1] += c;
                next[d] -= c * BigRational::from_integer(k.into());
            }
            basis = next;
            den *= BigRational::from_integer((i as i64 - k).into());
        }
        for (d, c) in basis.iter().enumerate() {
            coeffs[d] += v * c / &den;
        }
    }
    Ok(coeffs)
}

/// Integer vector proportional to rationals, with the scale used.
pub fn clear_denominators(v: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let l = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    (v.iter().map(|q| (q * BigRational::from_integer(l.clone())).to_integer()).collect(), l)
}

/// Map from variable name to its integer value, for evaluating artifacts.
pub fn assignment(vars: &Arc<VarTable>, polys: &[Vec<BigInt>]) -> Result<Vec<BigInt>> {
    let m = polys.first().map_or(0, Vec::len);
    let mut values: HashMap<String, BigInt> = HashMap::new();
    for (i, p) in polys.iter().enumerate() {
        for (j, c) in p.iter().enumerate() {
            values.insert(format!("c_{{{i},{j}}}"), c.clone());
        }
    }
    if values.len() != polys.len() * m {
        return Err(Error::InvalidInput("ragged coefficient vectors".into()));
    }
    vars.names().iter().map(|n| values.get(n).cloned().ok_or_else(|| Error::UnknownVariable(n.clone()))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(x: i64) -> BigRational {
        BigRational::from_integer(x.into())
    }

    fn square() -> LatticeConfig {
        Polygon::unit_square().lattice_points()
    }

    #[test]
    fn square_pencil_and_id() {
        let a = square();
        let da = closed_form(&a).unwrap().unwrap();
        let pencil = pencil_substitute(&da, 1).unwrap();
        assert_eq!(pencil.degree, 2);
        assert_eq!(pencil.coeffs.len(), 3);
        let id = iterated_discriminant(&SystemSpec::symbolic(&a, 1), &da, DEFAULT_SYMBOLIC_CAP).unwrap();
        assert_eq!(id.degree(), Some(4));
        let md = mixed_discriminant(&a, 1, MixedMethod::Auto, None, &InterpolationOptions::default()).unwrap();
        assert_eq!(id.poly, md.poly);
        let tangent = SystemSpec::from_integers(&a, &[vec![1, 1, -2, -1], vec![1, 1, -3, -2]]).unwrap();
        assert_eq!(smoothness_certificate(&tangent, &da).unwrap(), Certificate::Inconclusive);
        let x = [q(-1), q(0)];
        assert_eq!(multiple_root_classify(&tangent, &x, Some(&[q(1), q(-1)])).unwrap(), RootClass::NondegenerateMultiple);
        let generic = SystemSpec::from_integers(&a, &[vec![3, -1, 4, 1], vec![-5, 9, 2, 6]]).unwrap();
        assert!(matches!(smoothness_certificate(&generic, &da).unwrap(), Certificate::Smooth(_)));
        let same = SystemSpec::from_integers(&a, &[vec![3, -1, 4, 1], vec![3, -1, 4, 1]]).unwrap();
        assert_eq!(smoothness_certificate(&same, &da).unwrap(), Certificate::Inconclusive);
    }

    #[test]
    fn evaluation_matches_symbolic() {
        let a = square();
        let da = closed_form(&a).unwrap().unwrap();
        let id = iterated_discriminant(&SystemSpec::symbolic(&a, 1), &da, DEFAULT_SYMBOLIC_CAP).unwrap();
        let pts = [vec![3i64, -1, 4, 1], vec![-5, 9, 2, 6]];
        let spec = SystemSpec::from_integers(&a, &pts).unwrap();
        let v = iterated_discriminant_at(&spec, &da).unwrap();
        let vals =
            assignment(id.poly.vars(), &pts.iter().map(|p| p.iter().map(|&x| BigInt::from(x)).collect()).collect::<Vec<_>>())
                .unwrap();
        assert_eq!(v, BigRational::from_integer(id.poly.eval(&vals)));
        let half: Vec<Vec<BigRational>> =
            vec![pts[0].iter().map(|&x| BigRational::new(x.into(), 2.into())).collect(), pts[1].iter().map(|&x| q(x)).collect()];
        let w = iterated_discriminant_at(&SystemSpec::concrete(&a, half).unwrap(), &da).unwrap();
        assert_eq!(w * q(4), v);
    }

    #[test]
    fn univariate_pairs() {
        let a = LatticeConfig::dilated_simplex(1, 2);
        let da = closed_form(&a).unwrap().unwrap();
        let id = iterated_discriminant(&SystemSpec::symbolic(&a, 1), &da, DEFAULT_SYMBOLIC_CAP).unwrap();
        let md = mixed_discriminant(&a, 1, MixedMethod::Auto, None, &InterpolationOptions::default()).unwrap();
        let rep = divisibility_check(&id.poly, &md.poly).unwrap();
        assert!(rep.quotient.unwrap().is_constant());
    }

    #[test]
    fn f1_pencil_is_cubic() {
        let f1 = Polygon::f1_trapezoid().lattice_points();
        let da = closed_form(&f1).unwrap().unwrap();
        let p = pencil_substitute(&da, 1).unwrap();
        assert_eq!((p.degree, p.coeffs.len()), (3, 4));
        let id = iterated_discriminant(&SystemSpec::symbolic(&f1, 1), &da, DEFAULT_SYMBOLIC_CAP).unwrap();
        assert_eq!(id.degree(), Some(12));
        let blocks = vec![(0..5).collect::<Vec<_>>(), (5..10).collect()];
        assert_eq!(id.poly.multidegree(&blocks).unwrap(), vec![6, 6]);
    }

    #[test]
    fn oracle_shape() {
        let o = cusp_chow_oracle_cubic().unwrap();
        assert_eq!(o.total_degree(), Some(6));
        let blocks = vec![(0..4).collect::<Vec<_>>(), (4..8).collect()];
        assert_eq!(o.multidegree(&blocks).unwrap(), vec![3, 3]);
        // (x-1)^3 and 2(x-1)^3 in the order of 3Δ_1
        let a = LatticeConfig::dilated_simplex(1, 3);
        let cube = |s: i64| -> Vec<BigInt> {
            let by_exp = [-1, 3, -3, 1];
            (0..4).map(|j| BigInt::from(s * by_exp[a.points()[j][0] as usize])).collect()
        };
        let vals = assignment(o.vars(), &[cube(1), cube(2)]).unwrap();
        assert!(o.eval(&vals).is_zero());
    }

    #[test]
    fn root_classes() {
        let a = LatticeConfig::dilated_simplex(1, 2);
        let coeff = |c0: i64, c1: i64, c2: i64| -> Vec<i64> { a.points().iter().map(|p| [c0, c1, c2][p[0] as usize]).collect() };
        let same = SystemSpec::from_integers(&a, &[coeff(-1, 0, 1), coeff(-1, 0, 1)]).unwrap();
        assert_eq!(multiple_root_classify(&same, &[q(1)], None).unwrap(), RootClass::NondegenerateMultiple);
        let deg = SystemSpec::from_integers(&a, &[coeff(1, -2, 1), coeff(-1, 1, 0)]).unwrap();
        assert_eq!(multiple_root_classify(&deg, &[q(1)], None).unwrap(), RootClass::Degenerate);
        assert_eq!(multiple_root_classify(&deg, &[q(2)], None).unwrap(), RootClass::Transverse);
    }

    #[test]
    fn factor_matching() {
        let t = VarTable::new(["x", "y"]).unwrap();
        let x = SparsePoly::var(&t, 0);
        let y = SparsePoly::var(&t, 1);
        let h = &x + &y;
        let q = h.pow(3).scale(&BigInt::from(-6));
        assert_eq!(factor_match(&q, &h, 3).unwrap(), Some(q_rat(-6)));
        assert_eq!(factor_match(&x.pow(2), &x, 3).unwrap(), None);
        assert_eq!(probe_multiplicity(&(&q * &y), &h).unwrap(), 3);
    }

    fn q_rat(x: i64) -> BigRational {
        q(x)
    }

    #[test]
    fn tangent_pairs_kill_the_square_hyperdeterminant() {
        let a = square();
        let md = mixed_discriminant(&a, 1, MixedMethod::Closed, None, &InterpolationOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let u = crate::adisc::random_witness(2, &mut rng);
            let [p0, p1] = tangent_pair_sample(&a, &u, &mut rng).unwrap();
            let vals = assignment(md.poly.vars(), &[p0, p1]).unwrap();
            assert!(md.poly.eval(&vals).is_zero());
        }
    }

    #[test]
    fn quadric_pencil_routes_agree() {
        let a = LatticeConfig::dilated_simplex(3, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut rand_vec = || -> Vec<BigRational> {
            (0..10).map(|_| BigRational::new(rng.gen_range(-9..=9).into(), rng.gen_range(1..=4).into())).collect()
        };
        let (p0, p1) = (rand_vec(), rand_vec());
        let d = quadric_pencil_coefficients(&a, &p0, &p1).unwrap();
        let (ints, _) = clear_denominators(&d);
        let t = VarTable::new(Vec::<String>::new()).unwrap();
        let cs: Vec<SparsePoly> = ints.iter().map(|c| SparsePoly::constant(&t, c.clone())).collect();
        let uni = crate::resultants::univariate_discriminant(&UniPoly::new(cs.clone()).unwrap()).unwrap();
        let res = crate::resultants::quartic_resolvent_discriminant(&[
            cs[0].clone(),
            cs[1].clone(),
            cs[2].clone(),
            cs[3].clone(),
            cs[4].clone(),
        ])
        .unwrap();
        assert_eq!(uni, res.scale(&BigInt::from(QUARTIC_ROUTE_RATIO)), "{ints:?}");
    }

    #[test]
    fn cap_is_enforced() {
        let a = LatticeConfig::dilated_simplex(3, 2);
        let da = closed_form(&a).unwrap().unwrap();
        assert!(matches!(
            iterated_discriminant(&SystemSpec::symbolic(&a, 1), &da, DEFAULT_SYMBOLIC_CAP),
            Err(Error::SymbolicCapExceeded { .. })
        ));
    }
}
