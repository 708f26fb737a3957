//! Closed-form degree arithmetic: mixed and iterated discriminant degrees
//! for dilated simplices, Segre-Veronese products and smooth polygons.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::adisc::cayley_nondefective;
use crate::error::{Error, Result};
use crate::lattice::{enumerate_no_interior_polygons, Polygon};
use crate::poly::{SparsePoly, VarTable};

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Degree of the mixed discriminant of `r+1` polynomials with support `dΔ_n`:
/// `(n+1)·C(n,r)·d^r·(d-1)^(n-r)`, and `0` when `r > n`.
pub fn deg_md_simplex(n: u32, d: u32, r: u32) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    BigInt::from(n + 1)
        * binomial(n.into(), r.into())
        * num_traits::pow(BigInt::from(d), r as usize)
        * num_traits::pow(BigInt::from(d) - 1, (n - r) as usize)
}

/// Truncated bivariate power series, `c[i][j]` the coefficient of `x^i y^j`.
#[derive(Debug, Clone)]
struct Series {
    c: Vec<Vec<BigInt>>,
}

impl Series {
    fn zero(nx: usize, ny: usize) -> Series {
        Series { c: vec![vec![BigInt::zero(); ny + 1]; nx + 1] }
    }

    fn mul(&self, o: &Series) -> Series {
        let (nx, ny) = (self.c.len() - 1, self.c[0].len() - 1);
        let mut out = Series::zero(nx, ny);
        for i in 0..=nx {
            for j in 0..=ny {
                if self.c[i][j].is_zero() {
                    continue;
                }
                for k in 0..=nx - i {
                    for l in 0..=ny - j {
                        out.c[i + k][j + l] += &self.c[i][j] * &o.c[k][l];
                    }
                }
            }
        }
        out
    }

    /// Inverse of a series with constant term 1.
    fn inverse(&self) -> Series {
        let (nx, ny) = (self.c.len() - 1, self.c[0].len() - 1);
        assert!(self.c[0][0].is_one(), "constant term must be 1");
        let mut inv = Series::zero(nx, ny);
        for i in 0..=nx {
            for j in 0..=ny {
                if i == 0 && j == 0 {
                    inv.c[0][0] = BigInt::one();
                    continue;
                }
                let mut s = BigInt::zero();
                for k in 0..=i {
                    for l in 0..=j {
                        if (k, l) != (0, 0) {
                            s += &self.c[k][l] * &inv.c[i - k][j - l];
                        }
                    }
                }
                inv.c[i][j] = -s;
            }
        }
        inv
    }
}

/// Coefficient of `x^r y^n` in `1/(1-(d-1)y-dxy)^2`, by exact truncated
/// series arithmetic. Agrees with [`deg_md_simplex`].
pub fn series_coefficient(n: u32, d: u32, r: u32) -> BigInt {
    let (nx, ny) = (r as usize, n as usize);
    let mut base = Series::zero(nx, ny);
    base.c[0][0] = BigInt::one();
    if ny >= 1 {
        base.c[0][1] = BigInt::one() - BigInt::from(d);
        if nx >= 1 {
            base.c[1][1] = -BigInt::from(d);
        }
    }
    base.mul(&base).inverse().c[nx][ny].clone()
}

/// Degree `(r+1)·δ·(δ-1)^r` of the iterated discriminant.
pub fn deg_id(delta: &BigInt, r: u32) -> BigInt {
    if delta.is_zero() {
        return BigInt::zero();
    }
    BigInt::from(r + 1) * delta * num_traits::pow(delta - 1, r as usize)
}

/// Parameters of `P^r × P^{k_1}(d_1) × … × P^{k_ℓ}(d_ℓ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SVParams {
    pub r: u32,
    pub d: Vec<u32>,
    pub k: Vec<u32>,
}

impl SVParams {
    pub fn new(r: u32, d: Vec<u32>, k: Vec<u32>) -> Result<SVParams> {
        if d.is_empty() || d.len() != k.len() {
            return Err(Error::InvalidInput("d and k must be nonempty and of equal length".into()));
        }
        if d.iter().chain(&k).any(|&x| x == 0) {
            return Err(Error::InvalidInput("d_i and k_i must be positive".into()));
        }
        Ok(SVParams { r, d, k })
    }

    pub fn ell(&self) -> usize {
        self.d.len()
    }

    /// `κ = (r, k_1, …, k_ℓ)`.
    pub fn kappa(&self) -> Vec<u32> {
        std::iter::once(self.r).chain(self.k.iter().copied()).collect()
    }
}

impl fmt::Display for SVParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r={} d={:?} k={:?}", self.r, self.d, self.k)
    }
}

/// Characteristic vectors of the nonempty subsets of `{0, …, ℓ}`.
pub fn family_b(ell: usize) -> Vec<Vec<u32>> {
    subsets(ell + 1)
}

/// Characteristic vectors of the nonempty subsets of `{1, …, ℓ}`,
/// written over coordinates `1..=ℓ`.
pub fn family_c(ell: usize) -> Vec<Vec<u32>> {
    subsets(ell)
}

/// Family B without the singleton `{0}`, which never contributes.
pub fn family_b_without_zero(ell: usize) -> Vec<Vec<u32>> {
    let mut f = family_b(ell);
    f.retain(|v| !(v[0] == 1 && v[1..].iter().all(|&x| x == 0)));
    f
}

fn subsets(len: usize) -> Vec<Vec<u32>> {
    (1u32..(1 << len)).map(|mask| (0..len).map(|i| (mask >> i) & 1).collect()).collect()
}

/// A partition of `κ`: pairs `(index into family, multiplicity)` with
/// positive multiplicity, indices ascending.
pub type Partition = Vec<(usize, u32)>;

type Memo = HashMap<(usize, Vec<u32>), Arc<Vec<Partition>>>;

fn partitions_from(i: usize, rem: &[u32], family: &[Vec<u32>], memo: &mut Memo) -> Arc<Vec<Partition>> {
    if rem.iter().all(|&x| x == 0) {
        return Arc::new(vec![Vec::new()]);
    }
    if i == family.len() {
        return Arc::new(Vec::new());
    }
    let key = (i, rem.to_vec());
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let v = &family[i];
    let max_m = v.iter().zip(rem).filter(|(&a, _)| a > 0).map(|(&a, &b)| b / a).min().unwrap_or(0);
    let mut out = Vec::new();
    let mut cur = rem.to_vec();
    for m in 0..=max_m {
        if m > 0 {
            for (c, &a) in cur.iter_mut().zip(v) {
                *c -= a;
            }
        }
        for tail in partitions_from(i + 1, &cur, family, memo).iter() {
            let mut p = Vec::with_capacity(tail.len() + 1);
            if m > 0 {
                p.push((i, m));
            }
            p.extend_from_slice(tail);
            out.push(p);
        }
    }
    let out = Arc::new(out);
    memo.insert(key, out.clone());
    out
}

/// All ways of writing `κ` as a nonnegative combination of `family`,
/// enumerated by lexicographic backtracking with memoization on the
/// remaining vector.
pub fn enumerate_partitions(kappa: &[u32], family: &[Vec<u32>]) -> Result<Vec<Partition>> {
    if family.iter().any(|v| v.len() != kappa.len() || v.iter().all(|&x| x == 0)) {
        return Err(Error::InvalidInput("family vectors must be nonzero and match κ in length".into()));
    }
    let mut memo = Memo::new();
    Ok(partitions_from(0, kappa, family, &mut memo).as_ref().clone())
}

/// `Σ_P (1+Σm)! Π (w_Ω-1)^m / m!` where `w_Ω` is the weight of each family
/// vector. Each summand is checked to be a nonnegative integer.
fn partition_sum(kappa: &[u32], family: &[Vec<u32>], weights: &[BigInt]) -> Result<BigInt> {
    let mut total = BigInt::zero();
    for p in enumerate_partitions(kappa, family)? {
        let big_m: u64 = p.iter().map(|&(_, m)| u64::from(m)).sum();
        let mut num = factorial(big_m + 1);
        let mut den = BigInt::one();
        for &(i, m) in &p {
            num *= num_traits::pow(&weights[i] - 1, m as usize);
            den *= factorial(m.into());
        }
        let (q, rem) = num.div_rem(&den);
        assert!(rem.is_zero() && !q.is_negative(), "summand is a nonnegative integer");
        total += q;
    }
    Ok(total)
}

fn d_omega(v: &[u32], d: &[u32]) -> BigInt {
    v.iter().zip(d).filter(|(&x, _)| x == 1).map(|(_, &w)| BigInt::from(w)).sum()
}

/// Mixed discriminant degree for `SVParams`, summing over partitions of `κ`
/// into characteristic vectors of subsets of `{0, …, ℓ}` with `d_0 = 1`.
pub fn deg_md_segre_veronese(p: &SVParams) -> Result<BigInt> {
    let fam = family_b(p.ell());
    let mut dd = vec![1u32];
    dd.extend(&p.d);
    let w: Vec<BigInt> = fam.iter().map(|v| d_omega(v, &dd)).collect();
    partition_sum(&p.kappa(), &fam, &w)
}

/// Degree of the discriminant of `P^{k_1}(d_1) × … × P^{k_ℓ}(d_ℓ)`.
pub fn delta_segre_veronese(d: &[u32], k: &[u32]) -> Result<BigInt> {
    if d.is_empty() || d.len() != k.len() {
        return Err(Error::InvalidInput("d and k must be nonempty and of equal length".into()));
    }
    let fam = family_c(d.len());
    let w: Vec<BigInt> = fam.iter().map(|v| d_omega(v, d)).collect();
    partition_sum(k, &fam, &w)
}

fn symbolic_partition_sum(
    kappa: &[u32],
    family: &[Vec<u32>],
    weights: &[SparsePoly],
    vars: &Arc<VarTable>,
) -> Result<SparsePoly> {
    let mut total = SparsePoly::zero(vars);
    for p in enumerate_partitions(kappa, family)? {
        let big_m: u64 = p.iter().map(|&(_, m)| u64::from(m)).sum();
        let mut coeff = factorial(big_m + 1);
        let mut term = SparsePoly::one(vars);
        for &(i, m) in &p {
            coeff /= factorial(m.into());
            term = term * (&weights[i] - &SparsePoly::one(vars)).pow(m);
        }
        total = total + term.scale(&coeff);
    }
    Ok(total)
}

fn symbolic_weights(fam: &[Vec<u32>], vars: &Arc<VarTable>, offset_zero: bool) -> Vec<SparsePoly> {
    fam.iter()
        .map(|v| {
            let mut s = SparsePoly::zero(vars);
            for (i, &x) in v.iter().enumerate() {
                if x == 1 {
                    s = if offset_zero && i == 0 {
                        s + SparsePoly::one(vars)
                    } else {
                        s + SparsePoly::var(vars, if offset_zero { i - 1 } else { i })
                    };
                }
            }
            s
        })
        .collect()
}

/// [`deg_md_segre_veronese`] as a polynomial in `d_1, …, d_ℓ`.
pub fn deg_md_segre_veronese_symbolic(r: u32, k: &[u32]) -> Result<SparsePoly> {
    let vars = VarTable::new((1..=k.len()).map(|i| format!("d_{i}")))?;
    let fam = family_b(k.len());
    let w = symbolic_weights(&fam, &vars, true);
    let kappa: Vec<u32> = std::iter::once(r).chain(k.iter().copied()).collect();
    symbolic_partition_sum(&kappa, &fam, &w, &vars)
}

/// [`delta_segre_veronese`] as a polynomial in `d_1, …, d_ℓ`.
pub fn delta_segre_veronese_symbolic(k: &[u32]) -> Result<SparsePoly> {
    let vars = VarTable::new((1..=k.len()).map(|i| format!("d_{i}")))?;
    let fam = family_c(k.len());
    let w = symbolic_weights(&fam, &vars, false);
    symbolic_partition_sum(k, &fam, &w, &vars)
}

/// Comparison of the two degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Equal,
    IdGreater,
    MdGreater,
    /// Excluded from comparison by the defectivity guard.
    Excluded,
}

fn ser_big<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_big_opt<S: Serializer>(x: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

/// Computed degrees with the formula route and the comparison verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeReport {
    pub label: String,
    #[serde(serialize_with = "ser_big")]
    pub deg_md: BigInt,
    #[serde(serialize_with = "ser_big_opt")]
    pub delta: Option<BigInt>,
    #[serde(serialize_with = "ser_big")]
    pub deg_id: BigInt,
    pub defective: bool,
    pub verdict: Verdict,
    pub formula: String,
    /// Why a row was excluded, if it was.
    pub guard: Option<String>,
}

fn verdict(md: &BigInt, id: &BigInt) -> Verdict {
    match id.cmp(md) {
        std::cmp::Ordering::Equal => Verdict::Equal,
        std::cmp::Ordering::Greater => Verdict::IdGreater,
        std::cmp::Ordering::Less => Verdict::MdGreater,
    }
}

impl DegreeReport {
    pub fn new(label: String, deg_md: BigInt, delta: Option<BigInt>, deg_id: BigInt, formula: &str) -> DegreeReport {
        let v = verdict(&deg_md, &deg_id);
        DegreeReport { label, deg_md, delta, deg_id, defective: false, verdict: v, formula: formula.into(), guard: None }
    }

    fn excluded(mut self, why: &str) -> DegreeReport {
        self.defective = true;
        self.verdict = Verdict::Excluded;
        self.guard = Some(why.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn table_header() -> String {
        format!("{:<32} {:>12} {:>10} {:>14}  {}", "params", "deg_MD", "delta", "deg_ID", "verdict")
    }

    pub fn table_row(&self) -> String {
        let delta = self.delta.as_ref().map_or("-".to_string(), ToString::to_string);
        let v = match self.verdict {
            Verdict::Equal => "equal",
            Verdict::IdGreater => "ID > MD",
            Verdict::MdGreater => "MD > ID",
            Verdict::Excluded => "excluded",
        };
        format!("{:<32} {:>12} {:>10} {:>14}  {}", self.label, self.deg_md, delta, self.deg_id, v)
    }
}

/// Report for `dΔ_n` with `r+1` polynomials.
pub fn simplex_report(n: u32, d: u32, r: u32) -> DegreeReport {
    let md = deg_md_simplex(n, d, r);
    let delta = BigInt::from(n + 1) * num_traits::pow(BigInt::from(d) - 1, n as usize);
    let id = deg_id(&delta, r);
    DegreeReport::new(format!("n={n} d={d} r={r}"), md, Some(delta), id, "simplex closed form")
}

/// Report for Segre-Veronese parameters, with the defectivity guard applied.
pub fn sv_report(p: &SVParams) -> Result<DegreeReport> {
    let md = deg_md_segre_veronese(p)?;
    let delta = delta_segre_veronese(&p.d, &p.k)?;
    let id = deg_id(&delta, p.r);
    let rep = DegreeReport::new(p.to_string(), md.clone(), Some(delta), id.clone(), "partition sums");
    let dim: u32 = p.k.iter().sum();
    if md.is_zero() {
        return Ok(rep.excluded("mixed discriminant degree is 0"));
    }
    if id.is_zero() {
        return Ok(rep.excluded("iterated discriminant degree is 0"));
    }
    if !cayley_nondefective(p.r as usize, dim as usize, 0)?.0 {
        return Ok(rep.excluded("Cayley configuration is defective (r exceeds the dimension)"));
    }
    Ok(rep)
}

/// All parameter sets within the bounds, one per multiset of factors.
pub fn sv_grid(r_max: u32, ell_max: usize, d_max: u32, k_max: u32) -> Vec<SVParams> {
    let pairs: Vec<(u32, u32)> = (1..=d_max).flat_map(|d| (1..=k_max).map(move |k| (d, k))).collect();
    let mut out = Vec::new();
    fn rec(start: usize, left: usize, pairs: &[(u32, u32)], cur: &mut Vec<(u32, u32)>, out: &mut Vec<Vec<(u32, u32)>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if left == 0 {
            return;
        }
        for i in start..pairs.len() {
            cur.push(pairs[i]);
            rec(i, left - 1, pairs, cur, out);
            cur.pop();
        }
    }
    let mut factors = Vec::new();
    rec(0, ell_max, &pairs, &mut Vec::new(), &mut factors);
    for r in 1..=r_max {
        for f in &factors {
            out.push(SVParams { r, d: f.iter().map(|x| x.0).collect(), k: f.iter().map(|x| x.1).collect() });
        }
    }
    out.sort();
    out
}

/// Evaluate every parameter set in the bounds and report equality verdicts.
pub fn conjecture_scan(r_max: u32, ell_max: usize, d_max: u32, k_max: u32) -> Result<Vec<(SVParams, DegreeReport)>> {
    if r_max == 0 || ell_max == 0 || d_max == 0 || k_max == 0 {
        return Err(Error::InvalidInput("scan bounds must be at least 1".into()));
    }
    sv_grid(r_max, ell_max, d_max, k_max).into_par_iter().map(|p| sv_report(&p).map(|rep| (p, rep))).collect()
}

/// Whether `p` belongs to one of the three conjectured equality families.
pub fn in_conjectured_family(p: &SVParams) -> bool {
    let case1 = (p.r == 1 || p.r == 2) && p.d == [1, 1] && p.k[0] == p.k[1];
    let case2 = p.r == 1 && p.d == [1, 1, 1] && p.k == [1, 1, 1];
    let case3 = p.r == 1 && p.d == [2];
    case1 || case2 || case3
}

/// For `r = 1` and every `d_i ≥ 2`: equality only at `ℓ = 1, d = (2)`.
/// Returns each parameter set with its report and whether it agrees.
pub fn product_inequality_check(grid: &[SVParams]) -> Result<Vec<(SVParams, DegreeReport, bool)>> {
    grid.iter()
        .map(|p| {
            if p.r != 1 || p.d.iter().any(|&d| d < 2) {
                return Err(Error::HypothesisViolation(format!("{p}: needs r = 1 and all d_i >= 2")));
            }
            let rep = sv_report(p)?;
            let eq_expected = p.d == [2];
            let ok = if eq_expected { rep.verdict == Verdict::Equal } else { rep.verdict == Verdict::IdGreater };
            Ok((p.clone(), rep, ok))
        })
        .collect()
}

/// Single-simplex grid `d ∈ [2, d_max]`, `1 ≤ r ≤ n ≤ n_max`: equality
/// exactly at `d = 2, r = 1`, and `deg ID > (r+1)!·deg MD` when `d > 2`.
pub fn simplex_grid_check(d_max: u32, n_max: u32) -> Vec<(DegreeReport, bool)> {
    let mut out = Vec::new();
    for d in 2..=d_max {
        for n in 1..=n_max {
            for r in 1..=n {
                let rep = simplex_report(n, d, r);
                let ok = if d == 2 && r == 1 {
                    rep.verdict == Verdict::Equal
                } else {
                    rep.verdict == Verdict::IdGreater && (d == 2 || rep.deg_id > factorial((r + 1).into()) * &rep.deg_md)
                };
                out.push((rep, ok));
            }
        }
    }
    out
}

fn require_smooth(p: &Polygon) -> Result<()> {
    if !p.is_smooth() {
        return Err(Error::HypothesisViolation("planar degree formulas need a smooth polygon".into()));
    }
    Ok(())
}

/// `δ_A = 3v - 2p + V` for a smooth polygon, cross-checked against
/// `v + 4(i-1) + V`.
pub fn plane_delta(p: &Polygon) -> Result<i64> {
    require_smooth(p)?;
    let (v, per, big_v, i) = (p.normalized_area(), p.lattice_perimeter(), p.vertex_count() as i64, p.interior_points());
    let a = 3 * v - 2 * per + big_v;
    assert_eq!(a, v + 4 * (i - 1) + big_v, "Pick's relation");
    Ok(a)
}

/// `deg MD(A, A) = 6v - 2p` for a smooth polygon, cross-checked against
/// `4(v + i - 1)`.
pub fn plane_deg_md(p: &Polygon) -> Result<i64> {
    require_smooth(p)?;
    let (v, per, i) = (p.normalized_area(), p.lattice_perimeter(), p.interior_points());
    let a = 6 * v - 2 * per;
    assert_eq!(a, 4 * (v + i - 1), "Pick's relation");
    Ok(a)
}

/// Report for a smooth polygon with two polynomials.
pub fn plane_report(p: &Polygon) -> Result<DegreeReport> {
    let delta = plane_delta(p)?;
    let md = plane_deg_md(p)?;
    let id = deg_id(&BigInt::from(delta), 1);
    let label = format!("polygon {:?}", p.vertices());
    Ok(DegreeReport::new(label, md.into(), Some(delta.into()), id, "planar formulas"))
}

/// Smooth, non-degenerate polygons without interior points up to normalized
/// area `a_max` satisfying `2(v-1) = (v+V-4)(v+V-5)`, up to equivalence.
pub fn equal_degree_polygons(a_max: i64) -> Result<Vec<Polygon>> {
    if a_max < 2 {
        return Err(Error::InvalidInput("a_max must be at least 2".into()));
    }
    Ok(enumerate_no_interior_polygons(a_max)
        .into_iter()
        .filter(|p| p.is_smooth() && !p.is_degenerate())
        .filter(|p| {
            let (v, big_v) = (p.normalized_area(), p.vertex_count() as i64);
            2 * (v - 1) == (v + big_v - 4) * (v + big_v - 5)
        })
        .collect())
}

/// Convert to `u64`, failing on overflow.
pub fn to_u64(x: &BigInt) -> Result<u64> {
    x.to_u64().ok_or_else(|| Error::InvalidInput(format!("{x} does not fit in 64 bits")))
}
