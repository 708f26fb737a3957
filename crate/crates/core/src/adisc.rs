//! The A-discriminant engine: closed forms, singular-section sampling on
//! the dual variety, exact interpolation, and defectivity probes.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{simplex_product_points, LatticeConfig, Polygon};
use crate::linalg::{crt, large_primes, nullspace_integer, nullspace_mod, rank_rational, rational_reconstruct};
use crate::poly::{bigint_mod, mulmod, powmod, Monomial, PencilForm, SparsePoly, VarTable};
use crate::resultants::{homogeneous_discriminant, sylvester_resultant, UniPoly};

/// Sign convention applied to every normalized discriminant.
pub const SIGN_CONVENTION: &str =
    "primitive; the coefficient of the term with the largest single exponent (ties: graded-lex first) is positive";

/// Coefficient-variable naming printed in every artifact header.
pub const NAMING_CONVENTION: &str =
    "c_j: coefficient of point j in canonical order (ascending coordinate sum, then lexicographically descending); c_{i,j}: point j of polynomial i";

/// How a discriminant was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    ResultantOfPartials,
    Interpolated,
    Cayley,
    Schlaefli,
    Defective,
}

/// A normalized discriminant together with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscriminantArtifact {
    pub config: LatticeConfig,
    /// Normalized polynomial; `1` when defective, `0` for an identically
    /// vanishing iterated discriminant.
    pub poly: SparsePoly,
    pub method: Method,
    pub predicted_degree: Option<u32>,
    /// The unnormalized quantity equals `prefactor · poly`.
    pub prefactor: BigRational,
    pub defective: bool,
}

#[derive(Serialize, Deserialize)]
struct ArtifactJson {
    config: LatticeConfig,
    method: Method,
    degree: Option<u32>,
    predicted_degree: Option<u32>,
    prefactor: String,
    defective: bool,
    sign_convention: String,
    #[serde(default)]
    naming: String,
    poly: SparsePoly,
}

impl DiscriminantArtifact {
    pub fn defective(config: &LatticeConfig, vars: &Arc<VarTable>) -> DiscriminantArtifact {
        DiscriminantArtifact {
            config: config.clone(),
            poly: SparsePoly::one(vars),
            method: Method::Defective,
            predicted_degree: None,
            prefactor: BigRational::one(),
            defective: true,
        }
    }

    /// Normalize `raw` and record the removed content as prefactor.
    pub fn from_raw(config: &LatticeConfig, raw: SparsePoly, method: Method, predicted: Option<u32>) -> DiscriminantArtifact {
        let (prefactor, poly) = match raw.content_and_primitive() {
            Ok((c, p)) => (BigRational::from_integer(c), p),
            Err(_) => (BigRational::one(), raw),
        };
        DiscriminantArtifact { config: config.clone(), poly, method, predicted_degree: predicted, prefactor, defective: false }
    }

    pub fn degree(&self) -> Option<u32> {
        self.poly.total_degree()
    }

    pub fn to_json_string(&self) -> String {
        let j = ArtifactJson {
            config: self.config.clone(),
            method: self.method,
            degree: self.degree(),
            predicted_degree: self.predicted_degree,
            prefactor: rational_string(&self.prefactor),
            defective: self.defective,
            sign_convention: SIGN_CONVENTION.to_string(),
            naming: NAMING_CONVENTION.to_string(),
            poly: self.poly.clone(),
        };
        serde_json::to_string_pretty(&j).expect("artifact serializes")
    }

    pub fn from_json_str(s: &str) -> Result<DiscriminantArtifact> {
        let j: ArtifactJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(DiscriminantArtifact {
            config: j.config,
            poly: j.poly,
            method: j.method,
            predicted_degree: j.predicted_degree,
            prefactor: parse_rational(&j.prefactor)?,
            defective: j.defective,
        })
    }
}

pub fn rational_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Coefficient variables `c_0..c_N` of a configuration.
pub fn coefficient_vars(config: &LatticeConfig) -> Arc<VarTable> {
    VarTable::indexed("c", config.len())
}

/// A section singular at a torus point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualSample {
    pub witness: Vec<BigRational>,
    pub coeffs: Vec<BigInt>,
}

fn monomial_at(a: &[i64], u: &[BigRational]) -> BigRational {
    let mut v = BigRational::one();
    for (&e, x) in a.iter().zip(u) {
        if e >= 0 {
            v *= num_traits::pow(x.clone(), e as usize);
        } else {
            v /= num_traits::pow(x.clone(), (-e) as usize);
        }
    }
    v
}

fn clear_denominators(row: &[BigRational]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    row.iter().map(|q| (q * BigRational::from_integer(l.clone())).to_integer()).collect()
}

fn condition_rows(config: &LatticeConfig, u: &[BigRational]) -> Vec<Vec<BigInt>> {
    let vals: Vec<BigRational> = config.points().iter().map(|a| monomial_at(a, u)).collect();
    let mut rows = vec![clear_denominators(&vals)];
    for i in 0..config.dim() {
        let r: Vec<BigRational> =
            config.points().iter().zip(&vals).map(|(a, v)| v * BigRational::from_integer(BigInt::from(a[i]))).collect();
        rows.push(clear_denominators(&r));
    }
    rows
}

/// Value of `Σ c_j x^{a_j}` and its gradient at `u`.
pub fn value_and_gradient(config: &LatticeConfig, coeffs: &[BigRational], u: &[BigRational]) -> (BigRational, Vec<BigRational>) {
    let mut val = BigRational::zero();
    let mut grad = vec![BigRational::zero(); config.dim()];
    for (a, c) in config.points().iter().zip(coeffs) {
        let m = monomial_at(a, u) * c;
        for i in 0..config.dim() {
            if a[i] != 0 {
                grad[i] += &m * BigRational::from_integer(BigInt::from(a[i])) / &u[i];
            }
        }
        val += m;
    }
    (val, grad)
}

/// Random witness with odd coordinates in `[-19, 19]`.
pub fn random_witness<R: Rng>(n: usize, rng: &mut R) -> Vec<BigRational> {
    (0..n)
        .map(|_| {
            let k: i64 = rng.gen_range(0..20);
            BigRational::from_integer(BigInt::from(2 * k - 19))
        })
        .collect()
}

/// A random section of `A` singular at `u`.
pub fn singular_section_sample<R: Rng>(config: &LatticeConfig, u: &[BigRational], rng: &mut R) -> Result<DualSample> {
    if u.len() != config.dim() {
        return Err(Error::InvalidInput("witness has the wrong dimension".into()));
    }
    if u.iter().any(Zero::is_zero) {
        return Err(Error::InvalidInput("witness has a zero coordinate".into()));
    }
    let basis = nullspace_integer(&condition_rows(config, u), config.len());
    if basis.is_empty() {
        return Err(Error::NullspaceEmpty);
    }
    loop {
        let mut c = vec![BigInt::zero(); config.len()];
        for b in &basis {
            let mut k: i64 = rng.gen_range(-9..=9);
            if k == 0 {
                k = 1;
            }
            let k = BigInt::from(k);
            for (x, y) in c.iter_mut().zip(b) {
                *x += &k * y;
            }
        }
        let g = c.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if g.is_zero() {
            continue;
        }
        let c: Vec<BigInt> = c.iter().map(|x| x / &g).collect();
        let cq: Vec<BigRational> = c.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        let (v, grad) = value_and_gradient(config, &cq, u);
        assert!(v.is_zero() && grad.iter().all(Zero::is_zero), "sample is singular at its witness");
        return Ok(DualSample { witness: u.to_vec(), coeffs: c });
    }
}

/// Draw samples at fresh random witnesses, one RNG stream per sample.
pub fn dual_samples(config: &LatticeConfig, count: usize, seed: u64) -> Result<Vec<DualSample>> {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..count).map(|_| master.gen()).collect();
    seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let u = random_witness(config.dim(), &mut rng);
            singular_section_sample(config, &u, &mut rng)
        })
        .collect()
}

/// Knobs for [`interpolate_discriminant`].
#[derive(Debug, Clone)]
pub struct InterpolationOptions {
    pub seed: u64,
    pub sample_budget: usize,
    /// Weight classes up to this many unknowns are solved by exact
    /// fraction-free elimination; larger ones modularly with exact checks.
    pub exact_class_limit: usize,
}

impl Default for InterpolationOptions {
    fn default() -> Self {
        InterpolationOptions { seed: 0, sample_budget: 20_000, exact_class_limit: 40 }
    }
}

fn compositions(nvars: usize, d: u32) -> Vec<Vec<u32>> {
    crate::resultants::monomials_of_degree(nvars, d)
}

fn basis_monomials(nvars: usize, degree: u32, blocks: Option<&[(Vec<usize>, u32)]>) -> Result<Vec<Vec<u32>>> {
    let Some(blocks) = blocks else {
        return Ok(compositions(nvars, degree));
    };
    let mut seen = vec![false; nvars];
    for (vs, _) in blocks {
        for &v in vs {
            if v >= nvars || seen[v] {
                return Err(Error::InvalidInput("multidegree blocks must partition the variables".into()));
            }
            seen[v] = true;
        }
    }
    if seen.iter().any(|s| !s) || blocks.iter().map(|b| b.1).sum::<u32>() != degree {
        return Err(Error::InvalidInput("multidegree blocks must cover the variables and sum to the degree".into()));
    }
    let mut out = vec![vec![0u32; nvars]];
    for (vs, d) in blocks {
        let parts = compositions(vs.len(), *d);
        let mut next = Vec::with_capacity(out.len() * parts.len());
        for m in &out {
            for p in &parts {
                let mut e = m.clone();
                for (&v, &x) in vs.iter().zip(p) {
                    e[v] = x;
                }
                next.push(e);
            }
        }
        out = next;
    }
    Ok(out)
}

struct ClassSolution {
    dim: usize,
    /// Normalized integer coefficients when the dimension is 1.
    vector: Option<Vec<BigInt>>,
}

fn monomial_value(e: &[u32], c: &[BigInt]) -> BigInt {
    let mut v = BigInt::one();
    for (&x, y) in e.iter().zip(c) {
        if x > 0 {
            v *= num_traits::pow(y.clone(), x as usize);
        }
    }
    v
}

fn monomial_value_mod(e: &[u32], c: &[u64], p: u64) -> u64 {
    let mut v = 1u64;
    for (&x, &y) in e.iter().zip(c) {
        if x > 0 {
            v = mulmod(v, powmod(y, x as u64, p), p);
        }
    }
    v
}

fn primitive_vector(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        v
    } else {
        v.into_iter().map(|x| x / &g).collect()
    }
}

fn solve_class_exact(monos: &[&Vec<u32>], samples: &[DualSample], rows: usize) -> ClassSolution {
    let m: Vec<Vec<BigInt>> =
        samples[..rows].iter().map(|s| monos.iter().map(|e| monomial_value(e, &s.coeffs)).collect()).collect();
    let ns = nullspace_integer(&m, monos.len());
    let dim = ns.len();
    let vector = if dim == 1 { Some(primitive_vector(ns[0].clone())) } else { None };
    ClassSolution { dim, vector }
}

fn class_rows_mod(monos: &[&Vec<u32>], samples: &[DualSample], rows: usize, p: u64) -> Vec<Vec<u64>> {
    samples[..rows]
        .iter()
        .map(|s| {
            let c: Vec<u64> = s.coeffs.iter().map(|x| bigint_mod(x, p)).collect();
            monos.iter().map(|e| monomial_value_mod(e, &c, p)).collect()
        })
        .collect()
}

fn solve_class_modular(monos: &[&Vec<u32>], samples: &[DualSample], rows: usize, primes: &[u64]) -> ClassSolution {
    let first = nullspace_mod(&class_rows_mod(monos, samples, rows, primes[0]), monos.len(), primes[0]);
    if first.len() != 1 {
        return ClassSolution { dim: first.len(), vector: None };
    }
    let free = first[0].iter().position(|&x| x == 1).expect("basis vector has a unit entry");
    let mut residues: Vec<BigInt> = first[0].iter().map(|&x| BigInt::from(x)).collect();
    let mut modulus = BigInt::from(primes[0]);
    let mut previous: Option<Vec<BigRational>> = None;
    for &p in &primes[1..] {
        let ns = nullspace_mod(&class_rows_mod(monos, samples, rows, p), monos.len(), p);
        if ns.len() != 1 || ns[0][free] == 0 {
            continue;
        }
        let scale = crate::linalg::inv_mod(ns[0][free], p);
        let mut next_mod = modulus.clone();
        for (res, &x) in residues.iter_mut().zip(&ns[0]) {
            let (r, m) = crt(res, &modulus, mulmod(x, scale, p), p);
            *res = r;
            next_mod = m;
        }
        modulus = next_mod;
        let rec: Option<Vec<BigRational>> = residues.iter().map(|a| rational_reconstruct(a, &modulus)).collect();
        if let Some(rec) = rec {
            if previous.as_ref() == Some(&rec) {
                let l = rec.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
                let ints: Vec<BigInt> = rec.iter().map(|q| (q * BigRational::from_integer(l.clone())).to_integer()).collect();
                let ints = primitive_vector(ints);
                // exact check against every sample row
                let ok = samples[..rows]
                    .iter()
                    .all(|s| monos.iter().zip(&ints).map(|(e, c)| c * monomial_value(e, &s.coeffs)).sum::<BigInt>().is_zero());
                if ok {
                    return ClassSolution { dim: 1, vector: Some(ints) };
                }
            }
            previous = Some(rec);
        }
    }
    ClassSolution { dim: 1, vector: None }
}

/// Interpolate the discriminant of degree `degree` from singular sections,
/// optionally restricted to fixed block degrees.
pub fn interpolate_discriminant(
    config: &LatticeConfig,
    degree: u32,
    multidegree: Option<&[(Vec<usize>, u32)]>,
    opts: &InterpolationOptions,
) -> Result<DiscriminantArtifact> {
    if degree == 0 {
        return Err(Error::InvalidInput("degree must be positive".into()));
    }
    let nvars = config.len();
    let basis = basis_monomials(nvars, degree, multidegree)?;
    let mut classes: BTreeMap<Vec<i64>, Vec<&Vec<u32>>> = BTreeMap::new();
    for e in &basis {
        let mut w = vec![0i64; config.dim()];
        for (j, &x) in e.iter().enumerate() {
            if x > 0 {
                for (wi, ai) in w.iter_mut().zip(&config.points()[j]) {
                    *wi += x as i64 * ai;
                }
            }
        }
        classes.entry(w).or_default().push(e);
    }
    let largest = classes.values().map(Vec::len).max().unwrap_or(0);
    let wanted = (largest * 5).div_ceil(4) + 2;
    let count = wanted.min(opts.sample_budget);
    let samples = dual_samples(config, count, opts.seed)?;
    let primes = large_primes(24);
    let entries: Vec<(&Vec<i64>, &Vec<&Vec<u32>>)> = classes.iter().collect();
    let solutions: Vec<ClassSolution> = entries
        .par_iter()
        .map(|(_, monos)| {
            let rows = ((monos.len() * 5).div_ceil(4) + 2).min(samples.len());
            if rows < monos.len() {
                return ClassSolution { dim: monos.len() - rows, vector: None };
            }
            if monos.len() <= opts.exact_class_limit {
                solve_class_exact(monos, &samples, rows)
            } else {
                solve_class_modular(monos, &samples, rows, &primes)
            }
        })
        .collect();
    let total: usize = solutions.iter().map(|s| s.dim).sum();
    if total == 0 {
        return Err(Error::NullspaceEmpty);
    }
    if total != 1 {
        return Err(Error::InterpolationInconclusive { dimension: total });
    }
    let (k, sol) = solutions.iter().enumerate().find(|(_, s)| s.dim == 1).unwrap();
    let vector = sol.vector.as_ref().ok_or(Error::InterpolationInconclusive { dimension: 1 })?;
    let monos = entries[k].1;
    let vars = coefficient_vars(config);
    let mut map = HashMap::new();
    for (e, c) in monos.iter().zip(vector) {
        if !c.is_zero() {
            map.insert(Monomial::from_exps(e)?, c.clone());
        }
    }
    let raw = SparsePoly::from_monomials(&vars, map);
    let mut art = DiscriminantArtifact::from_raw(config, raw, Method::Interpolated, Some(degree));
    art.prefactor = BigRational::one();
    Ok(art)
}

/// Evaluate a polynomial in `c_0..c_N` at a sample.
pub fn vanishes_on(poly: &SparsePoly, sample: &DualSample) -> bool {
    poly.eval(&sample.coeffs).is_zero()
}

/// Minimal Hessian corank of singular sections at random torus points.
pub fn katz_corank_probe(config: &LatticeConfig, trials: usize, seed: u64) -> Result<usize> {
    if trials == 0 {
        return Err(Error::InvalidInput("at least one trial required".into()));
    }
    let n = config.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = n;
    for _ in 0..trials {
        let u = random_witness(n, &mut rng);
        let coeffs = match singular_section_sample(config, &u, &mut rng) {
            Ok(s) => s.coeffs,
            // no singular sections at all: the Hessian of the zero section
            Err(Error::NullspaceEmpty) => vec![BigInt::zero(); config.len()],
            Err(e) => return Err(e),
        };
        let mut h = vec![vec![BigRational::zero(); n]; n];
        for (a, c) in config.points().iter().zip(&coeffs) {
            if c.is_zero() {
                continue;
            }
            let m = monomial_at(a, &u) * BigRational::from_integer(c.clone());
            for i in 0..n {
                for k in 0..n {
                    let f = a[i] * (a[k] - i64::from(i == k));
                    if f != 0 {
                        h[i][k] += &m * BigRational::from_integer(BigInt::from(f)) / (&u[i] * &u[k]);
                    }
                }
            }
        }
        best = best.min(n - rank_rational(h));
        if best == 0 {
            break;
        }
    }
    Ok(best)
}

/// Defect of the Cayley configuration of `r+1` copies of a non-defective
/// `A` with `dim X_A = dim`: `max(r+dim, 2r, dim) − (r+dim)`.
pub fn cayley_nondefective(r: usize, dim: usize, def_a: usize) -> Result<(bool, usize)> {
    if def_a > 0 {
        return Err(Error::HypothesisViolation("the configuration itself must be non-defective".into()));
    }
    let defect = (r + dim).max(2 * r).max(dim) - (r + dim);
    Ok((defect == 0, defect))
}

/// Dispatch choice for [`a_discriminant`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscMethod {
    Auto,
    Closed,
    Interpolate,
    Partials,
}

/// Optional information for [`a_discriminant`].
#[derive(Debug, Clone, Default)]
pub struct Hints {
    pub degree: Option<u32>,
    pub multidegree: Option<Vec<(Vec<usize>, u32)>>,
    pub interpolation: InterpolationOptions,
}

fn is_affinely_independent(config: &LatticeConfig) -> bool {
    config.affine_rank() + 1 == config.len()
}

/// Points of `config` lie on two adjacent parallel lines along `axis`, each
/// line a contiguous run of at least two points. Returns point indices of
/// the two rows, ordered along the other coordinate.
fn two_row_split(config: &LatticeConfig, axis: usize) -> Option<[Vec<usize>; 2]> {
    if config.dim() != 2 {
        return None;
    }
    let other = 1 - axis;
    let lo = config.points().iter().map(|p| p[axis]).min()?;
    let mut rows: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (j, p) in config.points().iter().enumerate() {
        match p[axis] - lo {
            0 => rows[0].push(j),
            1 => rows[1].push(j),
            _ => return None,
        }
    }
    for row in rows.iter_mut() {
        if row.len() < 2 {
            return None;
        }
        row.sort_by_key(|&j| config.points()[j][other]);
        let first = config.points()[row[0]][other];
        if row.iter().enumerate().any(|(k, &j)| config.points()[j][other] != first + k as i64) {
            return None;
        }
    }
    Some(rows)
}

fn dilated_simplex_shape(config: &LatticeConfig) -> Option<(usize, u32)> {
    let n = config.dim();
    let min: Vec<i64> = (0..n).map(|i| config.points().iter().map(|p| p[i]).min().unwrap()).collect();
    let d: i64 = config.points().iter().map(|p| p.iter().zip(&min).map(|(a, m)| a - m).sum::<i64>()).max()?;
    if d < 1 {
        return None;
    }
    let shifted: Vec<Vec<i64>> = config.points().iter().map(|p| p.iter().zip(&min).map(|(a, m)| a - m).collect()).collect();
    let cand = LatticeConfig::dilated_simplex(n, d as u32);
    (LatticeConfig::new(n, shifted).ok()? == cand).then_some((n, d as u32))
}

fn segre_square_shape(config: &LatticeConfig) -> Option<(usize, usize)> {
    let n = config.dim();
    for m in 1..n {
        let k = n - m;
        if let Ok(c) = simplex_product_points(&[1, 1], &[m, k]) {
            if c == *config {
                return Some((m, k));
            }
        }
    }
    None
}

/// Closed-form discriminant, if the configuration is in the registry.
/// `Ok(None)` means no closed form applies.
pub fn closed_form(config: &LatticeConfig) -> Result<Option<DiscriminantArtifact>> {
    let vars = coefficient_vars(config);
    if is_affinely_independent(config) {
        return Ok(Some(DiscriminantArtifact::defective(config, &vars)));
    }
    if let Some((m, k)) = segre_square_shape(config) {
        if m != k {
            return Ok(Some(DiscriminantArtifact::defective(config, &vars)));
        }
        // c at point (e_i, e_j) fills a square matrix
        let unit = |i: usize, len: usize| {
            let mut v = vec![0i64; len];
            if i > 0 {
                v[i - 1] = 1;
            }
            v
        };
        let mut rows = Vec::new();
        for i in 0..=m {
            let mut row = Vec::new();
            for j in 0..=m {
                let mut p = unit(i, m);
                p.extend(unit(j, m));
                row.push(SparsePoly::var(&vars, config.index_of(&p).unwrap()));
            }
            rows.push(row);
        }
        let det = crate::linalg::bareiss_det(rows, SparsePoly::one(&vars));
        return Ok(Some(DiscriminantArtifact::from_raw(config, det, Method::ClosedForm, Some(m as u32 + 1))));
    }
    for axis in [1usize, 0] {
        if let Some(rows) = two_row_split(config, axis) {
            let f0 = UniPoly::new(rows[0].iter().map(|&j| SparsePoly::var(&vars, j)).collect())?;
            let f1 = UniPoly::new(rows[1].iter().map(|&j| SparsePoly::var(&vars, j)).collect())?;
            let res = sylvester_resultant(&f0, &f1)?;
            let deg = (rows[0].len() + rows[1].len() - 2) as u32;
            return Ok(Some(DiscriminantArtifact::from_raw(config, res, Method::ClosedForm, Some(deg))));
        }
    }
    if let Some(art) = simplex_by_partials(config)? {
        return Ok(Some(art));
    }
    Ok(None)
}

/// `dΔ_n` through the discriminant of the homogenized generic form.
fn simplex_by_partials(config: &LatticeConfig) -> Result<Option<DiscriminantArtifact>> {
    let Some((n, d)) = dilated_simplex_shape(config) else {
        return Ok(None);
    };
    if !(n == 1 && d <= 6 || d == 2) {
        return Ok(None);
    }
    let vars = coefficient_vars(config);
    let min: Vec<i64> = (0..n).map(|i| config.points().iter().map(|p| p[i]).min().unwrap()).collect();
    let mut coeffs = BTreeMap::new();
    for (j, p) in config.points().iter().enumerate() {
        let a: Vec<u32> = p.iter().zip(&min).map(|(x, m)| (x - m) as u32).collect();
        let mut key = vec![d - a.iter().sum::<u32>()];
        key.extend(a);
        coeffs.insert(key, SparsePoly::var(&vars, j));
    }
    let h = PencilForm { r: n, degree: d, vars: vars.clone(), coeffs };
    let raw = homogeneous_discriminant(&h)?;
    let predicted = (n as u32 + 1) * (d - 1).pow(n as u32);
    let method = if n == 1 { Method::ClosedForm } else { Method::ResultantOfPartials };
    Ok(Some(DiscriminantArtifact::from_raw(config, raw, method, Some(predicted))))
}

/// Degree predicted from the planar formula when `config` is the full set
/// of lattice points of a smooth polygon.
pub fn plane_degree_hint(config: &LatticeConfig) -> Option<u32> {
    if config.dim() != 2 {
        return None;
    }
    let pts: Vec<(i64, i64)> = config.points().iter().map(|p| (p[0], p[1])).collect();
    let poly = Polygon::hull(&pts).ok()?;
    if poly.lattice_points() != *config || !poly.is_smooth() {
        return None;
    }
    let d = crate::degrees::plane_delta(&poly).ok()?;
    u32::try_from(d).ok()
}

/// Largest degree tried by degree discovery.
pub const DISCOVERY_CAP: u32 = 8;

/// Compute `D_A`.
pub fn a_discriminant(config: &LatticeConfig, method: DiscMethod, hints: &Hints) -> Result<DiscriminantArtifact> {
    match method {
        DiscMethod::Closed => {
            closed_form(config)?.ok_or_else(|| Error::NoMethodAvailable("no closed form for this configuration".into()))
        }
        DiscMethod::Partials => simplex_by_partials(config)?
            .ok_or_else(|| Error::NoMethodAvailable("not a dilated simplex of expandable size".into())),
        DiscMethod::Interpolate => {
            if is_affinely_independent(config) {
                return Ok(DiscriminantArtifact::defective(config, &coefficient_vars(config)));
            }
            let md = hints.multidegree.as_deref();
            match hints.degree.or_else(|| plane_degree_hint(config)) {
                Some(d) => interpolate_discriminant(config, d, md, &hints.interpolation),
                None => {
                    let mut last = Error::NullspaceEmpty;
                    for d in 1..=DISCOVERY_CAP {
                        match interpolate_discriminant(config, d, None, &hints.interpolation) {
                            Ok(a) => return Ok(a),
                            Err(Error::NullspaceEmpty) => last = Error::NullspaceEmpty,
                            Err(e) => return Err(e),
                        }
                    }
                    Err(last)
                }
            }
        }
        DiscMethod::Auto => {
            if let Some(a) = closed_form(config)? {
                return Ok(a);
            }
            let degree = hints.degree.or_else(|| plane_degree_hint(config)).ok_or_else(|| {
                Error::NoMethodAvailable("no closed form and no degree hint; pass a degree to interpolate".into())
            })?;
            if katz_corank_probe(config, 5, hints.interpolation.seed)? > 0 {
                return Ok(DiscriminantArtifact::defective(config, &coefficient_vars(config)));
            }
            interpolate_discriminant(config, degree, hints.multidegree.as_deref(), &hints.interpolation)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn q(x: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(x))
    }

    fn square() -> LatticeConfig {
        Polygon::unit_square().lattice_points()
    }

    #[test]
    fn samples_by_hand() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = LatticeConfig::dilated_simplex(1, 2);
        let s = singular_section_sample(&a, &[q(3)], &mut rng).unwrap();
        let sign = if s.coeffs[2].is_negative() { -1 } else { 1 };
        let c: Vec<i64> = s.coeffs.iter().map(|x| i64::try_from(x * sign).unwrap()).collect();
        assert_eq!(c, vec![9, -6, 1]);
        let s = singular_section_sample(&square(), &[q(1), q(1)], &mut rng).unwrap();
        let sign = if s.coeffs[0].is_negative() { -1 } else { 1 };
        let c: Vec<i64> = s.coeffs.iter().map(|x| i64::try_from(x * sign).unwrap()).collect();
        assert_eq!(c, vec![1, -1, -1, 1]);
        let tri = LatticeConfig::dilated_simplex(2, 1);
        assert_eq!(singular_section_sample(&tri, &[q(1), q(3)], &mut rng), Err(Error::NullspaceEmpty));
        assert!(singular_section_sample(&square(), &[q(0), q(3)], &mut rng).is_err());
    }

    #[test]
    fn interpolation_reproduces_closed_forms() {
        let opts = InterpolationOptions::default();
        let sq = interpolate_discriminant(&square(), 2, None, &opts).unwrap();
        assert_eq!(sq.poly.to_string(), "c_0*c_3 - c_1*c_2");
        let f1 = Polygon::f1_trapezoid().lattice_points();
        let i = interpolate_discriminant(&f1, 3, None, &opts).unwrap();
        assert_eq!(i.poly, closed_form(&f1).unwrap().unwrap().poly);
        let forced = InterpolationOptions { exact_class_limit: 0, ..opts.clone() };
        assert_eq!(interpolate_discriminant(&f1, 3, None, &forced).unwrap().poly, i.poly);
        assert_eq!(interpolate_discriminant(&square(), 1, None, &opts), Err(Error::NullspaceEmpty));
        assert!(matches!(interpolate_discriminant(&square(), 4, None, &opts), Err(Error::InterpolationInconclusive { .. })));
    }

    #[test]
    fn conic_matches_half_hessian() {
        let a = LatticeConfig::dilated_simplex(2, 2);
        let i = interpolate_discriminant(&a, 3, None, &InterpolationOptions::default()).unwrap();
        let c = closed_form(&a).unwrap().unwrap();
        assert_eq!(i.poly, c.poly);
        assert_eq!(c.method, Method::ResultantOfPartials);
    }

    #[test]
    fn registry() {
        let a = LatticeConfig::dilated_simplex(1, 2);
        assert_eq!(a_discriminant(&a, DiscMethod::Auto, &Hints::default()).unwrap().poly.to_string(), "-4*c_0*c_2 + c_1^2");
        let lin = LatticeConfig::dilated_simplex(2, 1);
        let d = a_discriminant(&lin, DiscMethod::Auto, &Hints::default()).unwrap();
        assert!(d.defective && d.poly.is_one());
        let seg = simplex_product_points(&[1, 1], &[1, 2]).unwrap();
        assert!(a_discriminant(&seg, DiscMethod::Auto, &Hints::default()).unwrap().defective);
        let odd = LatticeConfig::new(2, vec![vec![0, 0], vec![3, 1], vec![1, 3], vec![2, 2], vec![1, 0]]).unwrap();
        assert!(matches!(a_discriminant(&odd, DiscMethod::Auto, &Hints::default()), Err(Error::NoMethodAvailable(_))));
    }

    #[test]
    fn probes() {
        assert_eq!(katz_corank_probe(&LatticeConfig::dilated_simplex(2, 2), 5, 0).unwrap(), 0);
        assert_eq!(katz_corank_probe(&LatticeConfig::dilated_simplex(2, 1), 3, 0).unwrap(), 2);
        assert_eq!(katz_corank_probe(&square(), 5, 0).unwrap(), 0);
        assert_eq!(cayley_nondefective(1, 2, 0).unwrap(), (true, 0));
        assert_eq!(cayley_nondefective(3, 2, 0).unwrap(), (false, 1));
        assert_eq!(cayley_nondefective(0, 5, 0).unwrap(), (true, 0));
        assert!(cayley_nondefective(1, 2, 1).is_err());
    }

    #[test]
    fn artifact_json_round_trip() {
        let a = closed_form(&square()).unwrap().unwrap();
        let back = DiscriminantArtifact::from_json_str(&a.to_json_string()).unwrap();
        assert_eq!(a, back);
        assert_eq!(parse_rational("-3/6").unwrap(), BigRational::new((-1).into(), 2.into()));
    }
}
