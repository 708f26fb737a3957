//! Sparse multivariate polynomials with big-integer coefficients.
//!
//! Terms are kept sorted in graded-lex descending order with respect to the
//! variable order of the owning [`VarTable`], so equality, hashing and
//! printing are canonical.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Ordered list of distinct variable names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarTable {
    names: Vec<String>,
}

impl VarTable {
    pub fn new<I, S>(names: I) -> Result<Arc<VarTable>>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = std::collections::HashSet::new();
        for n in &names {
            if n.is_empty() || !seen.insert(n.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate or empty variable name `{n}`")));
            }
        }
        Ok(Arc::new(VarTable { names }))
    }

    /// Variables `prefix_0 .. prefix_{n-1}`.
    pub fn indexed(prefix: &str, n: usize) -> Arc<VarTable> {
        Arc::new(VarTable { names: (0..n).map(|i| format!("{prefix}_{i}")).collect() })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

fn same_table(a: &Arc<VarTable>, b: &Arc<VarTable>) -> bool {
    Arc::ptr_eq(a, b) || a.names == b.names
}

pub type Exps = SmallVec<[u8; 24]>;

/// Exponent vector. The derived order is graded-lex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    degree: u32,
    exps: Exps,
}

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        Monomial { degree: 0, exps: SmallVec::from_elem(0, nvars) }
    }

    pub fn var(nvars: usize, i: usize) -> Monomial {
        let mut m = Monomial::one(nvars);
        m.exps[i] = 1;
        m.degree = 1;
        m
    }

    pub fn from_exps(exps: &[u32]) -> Result<Monomial> {
        let mut e = Exps::with_capacity(exps.len());
        let mut degree = 0u32;
        for &x in exps {
            let b = u8::try_from(x).map_err(|_| Error::InvalidInput(format!("exponent {x} exceeds 255")))?;
            e.push(b);
            degree += x;
        }
        Ok(Monomial { degree, exps: e })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exps(&self) -> &[u8] {
        &self.exps
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i] as u32
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let exps = self
            .exps
            .iter()
            .zip(other.exps.iter())
            .map(|(a, b)| a.checked_add(*b).expect("exponent overflow (degree above 255)"))
            .collect();
        Monomial { degree: self.degree + other.degree, exps }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    /// `self / other`, assuming `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Monomial {
        let exps = self.exps.iter().zip(other.exps.iter()).map(|(a, b)| a - b).collect();
        Monomial { degree: self.degree - other.degree, exps }
    }

    fn max_exp(&self) -> u8 {
        self.exps.iter().copied().max().unwrap_or(0)
    }
}

/// Why an exact division failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisionFailure {
    pub reason: String,
}

impl fmt::Display for DivisionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.reason)
    }
}

/// Sparse polynomial over the integers.
#[derive(Debug, Clone)]
pub struct SparsePoly {
    vars: Arc<VarTable>,
    terms: Vec<(Monomial, BigInt)>,
}

impl PartialEq for SparsePoly {
    fn eq(&self, other: &Self) -> bool {
        same_table(&self.vars, &other.vars) && self.terms == other.terms
    }
}

impl Eq for SparsePoly {}

impl std::hash::Hash for SparsePoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.vars.names.hash(state);
        self.terms.hash(state);
    }
}

const PAR_THRESHOLD: usize = 1 << 16;

fn sorted_from_map(map: HashMap<Monomial, BigInt>) -> Vec<(Monomial, BigInt)> {
    let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    terms
}

fn merge(a: &[(Monomial, BigInt)], b: &[(Monomial, BigInt)], negate_b: bool) -> Vec<(Monomial, BigInt)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Greater => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Less => {
                let c = if negate_b { -&b[j].1 } else { b[j].1.clone() };
                out.push((b[j].0.clone(), c));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let c = if negate_b { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                if !c.is_zero() {
                    out.push((a[i].0.clone(), c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend(a[i..].iter().cloned());
    for t in &b[j..] {
        let c = if negate_b { -&t.1 } else { t.1.clone() };
        out.push((t.0.clone(), c));
    }
    out
}

fn mul_terms(a: &[(Monomial, BigInt)], b: &[(Monomial, BigInt)]) -> Vec<(Monomial, BigInt)> {
    let mut map: HashMap<Monomial, BigInt> = HashMap::with_capacity(a.len() * b.len() / 2 + 1);
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m = ma.mul(mb);
            let c = ca * cb;
            match map.get_mut(&m) {
                Some(v) => *v += c,
                None => {
                    map.insert(m, c);
                }
            }
        }
    }
    sorted_from_map(map)
}

impl SparsePoly {
    pub fn zero(vars: &Arc<VarTable>) -> SparsePoly {
        SparsePoly { vars: vars.clone(), terms: Vec::new() }
    }

    pub fn one(vars: &Arc<VarTable>) -> SparsePoly {
        SparsePoly::constant(vars, BigInt::one())
    }

    pub fn constant(vars: &Arc<VarTable>, c: impl Into<BigInt>) -> SparsePoly {
        let c = c.into();
        let terms = if c.is_zero() { Vec::new() } else { vec![(Monomial::one(vars.len()), c)] };
        SparsePoly { vars: vars.clone(), terms }
    }

    pub fn var(vars: &Arc<VarTable>, i: usize) -> SparsePoly {
        assert!(i < vars.len(), "variable index out of range");
        SparsePoly { vars: vars.clone(), terms: vec![(Monomial::var(vars.len(), i), BigInt::one())] }
    }

    pub fn var_named(vars: &Arc<VarTable>, name: &str) -> Result<SparsePoly> {
        let i = vars.index_of(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(SparsePoly::var(vars, i))
    }

    /// Build from (exponent vector, coefficient) pairs; like terms are combined.
    pub fn from_terms<I>(vars: &Arc<VarTable>, terms: I) -> Result<SparsePoly>
    where
        I: IntoIterator<Item = (Vec<u32>, BigInt)>,
    {
        let mut map: HashMap<Monomial, BigInt> = HashMap::new();
        for (e, c) in terms {
            if e.len() != vars.len() {
                return Err(Error::InvalidInput(format!("exponent vector of length {} for {} variables", e.len(), vars.len())));
            }
            *map.entry(Monomial::from_exps(&e)?).or_insert_with(BigInt::zero) += c;
        }
        Ok(SparsePoly { vars: vars.clone(), terms: sorted_from_map(map) })
    }

    pub(crate) fn from_monomials(vars: &Arc<VarTable>, map: HashMap<Monomial, BigInt>) -> SparsePoly {
        SparsePoly { vars: vars.clone(), terms: sorted_from_map(map) }
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn terms(&self) -> &[(Monomial, BigInt)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.degree == 0)
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.degree == 0 && self.terms[0].1.is_one()
    }

    /// Constant value, if the polynomial is constant.
    pub fn constant_value(&self) -> Option<BigInt> {
        match self.terms.as_slice() {
            [] => Some(BigInt::zero()),
            [(m, c)] if m.degree == 0 => Some(c.clone()),
            _ => None,
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.first().map(|t| t.0.degree)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.terms.iter().all(|t| t.0.degree == self.terms[0].0.degree)
    }

    pub fn leading_term(&self) -> Option<&(Monomial, BigInt)> {
        self.terms.first()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|t| t.0.exp(var)).max().unwrap_or(0)
    }

    pub fn try_add(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.check_table(other)?;
        Ok(SparsePoly { vars: self.vars.clone(), terms: merge(&self.terms, &other.terms, false) })
    }

    pub fn try_sub(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.check_table(other)?;
        Ok(SparsePoly { vars: self.vars.clone(), terms: merge(&self.terms, &other.terms, true) })
    }

    pub fn try_mul(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.check_table(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(SparsePoly::zero(&self.vars));
        }
        if other.terms.len() == 1 {
            return Ok(self.mul_term(&other.terms[0].0, &other.terms[0].1));
        }
        if self.terms.len() == 1 {
            return Ok(other.mul_term(&self.terms[0].0, &self.terms[0].1));
        }
        let (big, small) = if self.len() >= other.len() { (self, other) } else { (other, self) };
        let terms = if big.len() * small.len() >= PAR_THRESHOLD && big.len() >= 8 {
            let chunk = big.len().div_ceil(rayon::current_num_threads().max(1) * 2).max(1);
            let parts: Vec<Vec<(Monomial, BigInt)>> = big.terms.par_chunks(chunk).map(|c| mul_terms(c, &small.terms)).collect();
            let mut parts = parts;
            while parts.len() > 1 {
                parts =
                    parts.par_chunks(2).map(|p| if p.len() == 2 { merge(&p[0], &p[1], false) } else { p[0].clone() }).collect();
            }
            parts.pop().unwrap_or_default()
        } else {
            mul_terms(&big.terms, &small.terms)
        };
        Ok(SparsePoly { vars: self.vars.clone(), terms })
    }

    fn check_table(&self, other: &SparsePoly) -> Result<()> {
        if same_table(&self.vars, &other.vars) {
            Ok(())
        } else {
            Err(Error::VarTableMismatch)
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &BigInt) -> SparsePoly {
        if c.is_zero() {
            return SparsePoly::zero(&self.vars);
        }
        let terms = self.terms.iter().map(|(tm, tc)| (tm.mul(m), tc * c)).collect();
        SparsePoly { vars: self.vars.clone(), terms }
    }

    pub fn scale(&self, c: &BigInt) -> SparsePoly {
        if c.is_zero() {
            return SparsePoly::zero(&self.vars);
        }
        SparsePoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    /// Divide every coefficient by `c`; `None` unless all divide exactly.
    pub fn div_scalar(&self, c: &BigInt) -> Option<SparsePoly> {
        if c.is_zero() {
            return None;
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, x) in &self.terms {
            let (q, r) = x.div_rem(c);
            if !r.is_zero() {
                return None;
            }
            terms.push((m.clone(), q));
        }
        Some(SparsePoly { vars: self.vars.clone(), terms })
    }

    pub fn pow(&self, e: u32) -> SparsePoly {
        let mut acc = SparsePoly::one(&self.vars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative with respect to variable index `var`.
    pub fn partial(&self, var: usize) -> SparsePoly {
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exps[var];
            if e > 0 {
                let mut nm = m.clone();
                nm.exps[var] -= 1;
                nm.degree -= 1;
                terms.push((nm, c * BigInt::from(e)));
            }
        }
        // lowering one exponent preserves the relative order of the survivors
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        SparsePoly { vars: self.vars.clone(), terms }
    }

    pub fn partial_named(&self, name: &str) -> Result<SparsePoly> {
        let i = self.vars.index_of(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(self.partial(i))
    }

    /// Replace variable `j` by `images[j]`; all images must share one table.
    pub fn compose(&self, images: &[SparsePoly]) -> Result<SparsePoly> {
        if images.len() != self.vars.len() {
            return Err(Error::InvalidInput("one image per variable required".into()));
        }
        let target = match images.first() {
            Some(p) => p.vars.clone(),
            None => {
                return Ok(self.clone());
            }
        };
        if images.iter().any(|p| !same_table(&p.vars, &target)) {
            return Err(Error::VarTableMismatch);
        }
        let mut powers: Vec<Vec<SparsePoly>> = images.iter().map(|p| vec![SparsePoly::one(&target), p.clone()]).collect();
        let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
        for (m, c) in &self.terms {
            let mut prod = SparsePoly::constant(&target, c.clone());
            for (j, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[j].len() <= e as usize {
                    let next = &powers[j][powers[j].len() - 1] * &images[j];
                    powers[j].push(next);
                }
                prod = &prod * &powers[j][e as usize];
                if prod.is_zero() {
                    break;
                }
            }
            for (pm, pc) in prod.terms {
                match acc.get_mut(&pm) {
                    Some(v) => *v += pc,
                    None => {
                        acc.insert(pm, pc);
                    }
                }
            }
        }
        Ok(SparsePoly::from_monomials(&target, acc))
    }

    /// Substitute variables by name. Unassigned variables map to the
    /// same-named variable of the target table, which is the table of the
    /// assigned images (or `target` when given).
    pub fn substitute(&self, assignment: &HashMap<String, SparsePoly>, target: Option<&Arc<VarTable>>) -> Result<SparsePoly> {
        let table = match (target, assignment.values().next()) {
            (Some(t), _) => t.clone(),
            (None, Some(p)) => p.vars.clone(),
            (None, None) => return Ok(self.clone()),
        };
        let mut images = Vec::with_capacity(self.vars.len());
        for name in &self.vars.names {
            match assignment.get(name) {
                Some(p) => {
                    if !same_table(&p.vars, &table) {
                        return Err(Error::VarTableMismatch);
                    }
                    images.push(p.clone());
                }
                None => images.push(SparsePoly::var_named(&table, name)?),
            }
        }
        for k in assignment.keys() {
            if self.vars.index_of(k).is_none() {
                return Err(Error::UnknownVariable(k.clone()));
            }
        }
        self.compose(&images)
    }

    /// Re-express over a table containing every variable of `self` by name.
    pub fn embed(&self, target: &Arc<VarTable>) -> Result<SparsePoly> {
        let map: Vec<usize> = self
            .vars
            .names
            .iter()
            .map(|n| target.index_of(n).ok_or_else(|| Error::UnknownVariable(n.clone())))
            .collect::<Result<_>>()?;
        let mut out = HashMap::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut e = vec![0u32; target.len()];
            for (j, &x) in m.exps.iter().enumerate() {
                e[map[j]] = x as u32;
            }
            out.insert(Monomial::from_exps(&e)?, c.clone());
        }
        Ok(SparsePoly::from_monomials(target, out))
    }

    /// Rename variables positionally onto a table of the same length.
    pub fn with_table(&self, target: &Arc<VarTable>) -> Result<SparsePoly> {
        if target.len() != self.vars.len() {
            return Err(Error::VarTableMismatch);
        }
        Ok(SparsePoly { vars: target.clone(), terms: self.terms.clone() })
    }

    pub fn eval(&self, point: &[BigInt]) -> BigInt {
        assert_eq!(point.len(), self.vars.len(), "point dimension mismatch");
        let mut cache: Vec<Vec<BigInt>> = point.iter().map(|x| vec![BigInt::one(), x.clone()]).collect();
        let mut total = BigInt::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (j, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while cache[j].len() <= e as usize {
                    let next = &cache[j][cache[j].len() - 1] * &point[j];
                    cache[j].push(next);
                }
                v *= &cache[j][e as usize];
            }
            total += v;
        }
        total
    }

    pub fn eval_rational(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.vars.len(), "point dimension mismatch");
        // clear denominators per variable, then evaluate over the integers
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut v = BigRational::from_integer(c.clone());
            for (j, &e) in m.exps.iter().enumerate() {
                if e > 0 {
                    v *= num_traits::pow(point[j].clone(), e as usize);
                }
            }
            total += v;
        }
        total
    }

    /// Evaluate modulo the prime `p` (< 2^63).
    pub fn eval_mod(&self, point: &[u64], p: u64) -> u64 {
        let mut total: u64 = 0;
        for (m, c) in &self.terms {
            let mut v = bigint_mod(c, p);
            for (j, &e) in m.exps.iter().enumerate() {
                if e > 0 {
                    v = mulmod(v, powmod(point[j], e as u64, p), p);
                }
            }
            total = addmod(total, v, p);
        }
        total
    }

    /// Exact quotient `self / den`; the remainder must vanish.
    pub fn exact_divide(&self, den: &SparsePoly) -> std::result::Result<SparsePoly, DivisionFailure> {
        if !same_table(&self.vars, &den.vars) {
            return Err(DivisionFailure { reason: "variable tables differ".into() });
        }
        let (lm, lc) = match den.terms.first() {
            Some(t) => t.clone(),
            None => return Err(DivisionFailure { reason: "division by zero".into() }),
        };
        if den.terms.len() == 1 {
            let mut terms = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                if !lm.divides(m) {
                    return Err(DivisionFailure { reason: "monomial not divisible".into() });
                }
                let (q, r) = c.div_rem(&lc);
                if !r.is_zero() {
                    return Err(DivisionFailure { reason: "coefficient not divisible".into() });
                }
                terms.push((m.div(&lm), q));
            }
            return Ok(SparsePoly { vars: self.vars.clone(), terms });
        }
        let mut rem: BTreeMap<Monomial, BigInt> = self.terms.iter().cloned().collect();
        let mut q = Vec::new();
        let rest = &den.terms[1..];
        while let Some((m, c)) = rem.pop_last() {
            if !lm.divides(&m) {
                return Err(DivisionFailure {
                    reason: format!(
                        "leading remainder term {} is not divisible by {}",
                        self.render_monomial(&m),
                        self.render_monomial(&lm)
                    ),
                });
            }
            let (qc, r) = c.div_rem(&lc);
            if !r.is_zero() {
                return Err(DivisionFailure { reason: format!("coefficient {c} not divisible by {lc}") });
            }
            let qm = m.div(&lm);
            for (dm, dc) in rest {
                let key = qm.mul(dm);
                let delta = &qc * dc;
                match rem.get_mut(&key) {
                    Some(v) => {
                        *v -= delta;
                        if v.is_zero() {
                            rem.remove(&key);
                        }
                    }
                    None => {
                        rem.insert(key, -delta);
                    }
                }
            }
            q.push((qm, qc));
        }
        Ok(SparsePoly { vars: self.vars.clone(), terms: q })
    }

    /// Index of the term that fixes the sign convention: the largest single
    /// exponent wins, ties broken by graded-lex order.
    fn sign_term_index(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, (m, _)) in self.terms.iter().enumerate() {
            match best {
                None => best = Some(i),
                Some(b) => {
                    // terms are graded-lex descending, so earlier wins ties
                    if m.max_exp() > self.terms[b].0.max_exp() {
                        best = Some(i);
                    }
                }
            }
        }
        best
    }

    /// Coefficient that the sign convention makes positive.
    pub fn sign_coefficient(&self) -> Option<&BigInt> {
        self.sign_term_index().map(|i| &self.terms[i].1)
    }

    /// Content with sign, and the primitive part whose sign coefficient is positive.
    pub fn content_and_primitive(&self) -> Result<(BigInt, SparsePoly)> {
        let idx = self.sign_term_index().ok_or(Error::ZeroPolynomial)?;
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        if self.terms[idx].1.is_negative() {
            g = -g;
        }
        let prim = self.div_scalar(&g).expect("content divides every coefficient");
        Ok((g, prim))
    }

    /// Primitive part under the sign convention; zero stays zero.
    pub fn normalized(&self) -> SparsePoly {
        match self.content_and_primitive() {
            Ok((_, p)) => p,
            Err(_) => self.clone(),
        }
    }

    /// Per-block maximal degree; blocks must partition the variables.
    pub fn multidegree(&self, blocks: &[Vec<usize>]) -> Result<Vec<u32>> {
        let mut owner = vec![usize::MAX; self.vars.len()];
        for (b, block) in blocks.iter().enumerate() {
            for &v in block {
                if v >= owner.len() || owner[v] != usize::MAX {
                    return Err(Error::InvalidInput("blocks must partition the variables".into()));
                }
                owner[v] = b;
            }
        }
        if owner.contains(&usize::MAX) {
            return Err(Error::InvalidInput("blocks must cover the variable table".into()));
        }
        let mut out = vec![0u32; blocks.len()];
        for (m, _) in &self.terms {
            let mut d = vec![0u32; blocks.len()];
            for (j, &e) in m.exps.iter().enumerate() {
                d[owner[j]] += e as u32;
            }
            for (o, x) in out.iter_mut().zip(d) {
                *o = (*o).max(x);
            }
        }
        Ok(out)
    }

    /// Group terms by their exponents in the `lambda` variables.
    pub fn collect_as_pencil(&self, lambda: &[usize]) -> Result<PencilForm> {
        let rest: Vec<usize> = (0..self.vars.len()).filter(|i| !lambda.contains(i)).collect();
        let coeff_vars = VarTable::new(rest.iter().map(|&i| self.vars.names[i].clone()))?;
        let degree = self.terms.first().map(|(m, _)| lambda.iter().map(|&l| m.exp(l)).sum::<u32>()).unwrap_or(0);
        let mut groups: BTreeMap<Vec<u32>, HashMap<Monomial, BigInt>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let le: Vec<u32> = lambda.iter().map(|&l| m.exp(l)).collect();
            if le.iter().sum::<u32>() != degree {
                return Err(Error::NotHomogeneous(degree));
            }
            let ce: Vec<u32> = rest.iter().map(|&i| m.exp(i)).collect();
            groups.entry(le).or_default().insert(Monomial::from_exps(&ce)?, c.clone());
        }
        let coeffs = groups.into_iter().map(|(k, v)| (k, SparsePoly::from_monomials(&coeff_vars, v))).collect();
        Ok(PencilForm { r: lambda.len().saturating_sub(1), degree, vars: coeff_vars, coeffs })
    }

    fn render_monomial(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (j, &e) in m.exps.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(self.vars.names[j].clone()),
                _ => parts.push(format!("{}^{}", self.vars.names[j], e)),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            vars: self.vars.names.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermJson { coeff: c.to_string(), exp: m.exps.iter().map(|&e| e as u32).collect() })
                .collect(),
        }
    }

    pub fn from_json(j: &PolyJson) -> Result<SparsePoly> {
        let vars = VarTable::new(j.vars.iter().cloned())?;
        let terms = j
            .terms
            .iter()
            .map(|t| {
                let c: BigInt = t.coeff.parse().map_err(|_| Error::Parse(format!("bad coefficient `{}`", t.coeff)))?;
                Ok((t.exp.clone(), c))
            })
            .collect::<Result<Vec<_>>>()?;
        SparsePoly::from_terms(&vars, terms)
    }

    /// Parse text such as `c_1^2 - 4*c_0*c_2` over the given table.
    pub fn parse(vars: &Arc<VarTable>, text: &str) -> Result<SparsePoly> {
        parse::parse_poly(vars, text)
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.degree == 0 {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                f.write_str(&self.render_monomial(m))?;
            } else {
                write!(f, "{abs}*{}", self.render_monomial(m))?;
            }
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $call:ident) => {
        impl std::ops::$tr<&SparsePoly> for &SparsePoly {
            type Output = SparsePoly;
            fn $method(self, rhs: &SparsePoly) -> SparsePoly {
                self.$call(rhs).expect("operands must share a variable table")
            }
        }
        impl std::ops::$tr<SparsePoly> for SparsePoly {
            type Output = SparsePoly;
            fn $method(self, rhs: SparsePoly) -> SparsePoly {
                self.$call(&rhs).expect("operands must share a variable table")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl std::ops::Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        SparsePoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl std::ops::Neg for SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        -&self
    }
}

/// JSON form of a polynomial; coefficients are decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub exp: Vec<u32>,
}

impl Serialize for SparsePoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SparsePoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        SparsePoly::from_json(&j).map_err(serde::de::Error::custom)
    }
}

/// A form in `λ_0..λ_r` whose coefficients are polynomials in other variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PencilForm {
    pub r: usize,
    pub degree: u32,
    /// Table of the coefficient polynomials.
    pub vars: Arc<VarTable>,
    /// λ-exponent vector (length r+1, sum = degree) to coefficient.
    pub coeffs: BTreeMap<Vec<u32>, SparsePoly>,
}

impl PencilForm {
    pub fn coefficient(&self, lambda_exps: &[u32]) -> SparsePoly {
        self.coeffs.get(lambda_exps).cloned().unwrap_or_else(|| SparsePoly::zero(&self.vars))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(SparsePoly::is_zero)
    }

    /// True when every coefficient is a constant.
    pub fn is_numeric(&self) -> bool {
        self.coeffs.values().all(SparsePoly::is_constant)
    }

    /// Apply `f` to every coefficient.
    pub fn map_coefficients<F>(&self, vars: &Arc<VarTable>, mut f: F) -> Result<PencilForm>
    where
        F: FnMut(&SparsePoly) -> Result<SparsePoly>,
    {
        let mut coeffs = BTreeMap::new();
        for (k, v) in &self.coeffs {
            let nv = f(v)?;
            if !nv.is_zero() {
                coeffs.insert(k.clone(), nv);
            }
        }
        Ok(PencilForm { r: self.r, degree: self.degree, vars: vars.clone(), coeffs })
    }
}

pub(crate) fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn addmod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

pub(crate) fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    r
}

pub(crate) fn bigint_mod(c: &BigInt, p: u64) -> u64 {
    let m = c.mod_floor(&BigInt::from(p));
    let (_, digits) = m.to_u64_digits();
    digits.first().copied().unwrap_or(0)
}

mod parse {
    use super::*;

    pub(super) fn parse_poly(vars: &Arc<VarTable>, text: &str) -> Result<SparsePoly> {
        let s: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut terms: Vec<(Vec<u32>, BigInt)> = Vec::new();
        let mut i = 0;
        while i < s.len() {
            let mut sign = BigInt::one();
            while i < s.len() && (s[i] == '+' || s[i] == '-') {
                if s[i] == '-' {
                    sign = -sign;
                }
                i += 1;
            }
            let start = i;
            let mut depth = 0i32;
            while i < s.len() {
                match s[i] {
                    '{' => depth += 1,
                    '}' => depth -= 1,
                    '+' | '-' if depth == 0 => break,
                    _ => {}
                }
                i += 1;
            }
            let term: String = s[start..i].iter().collect();
            if term.is_empty() {
                return Err(Error::Parse(format!("empty term in `{text}`")));
            }
            let mut coeff = sign;
            let mut exps = vec![0u32; vars.len()];
            for factor in split_factors(&term) {
                if factor.chars().all(|c| c.is_ascii_digit()) {
                    let c: BigInt = factor.parse().map_err(|_| Error::Parse(factor.clone()))?;
                    coeff *= c;
                    continue;
                }
                let (name, e) = match factor.rfind('^') {
                    Some(p) => {
                        let e: u32 = factor[p + 1..].parse().map_err(|_| Error::Parse(format!("bad exponent in `{factor}`")))?;
                        (&factor[..p], e)
                    }
                    None => (factor.as_str(), 1),
                };
                let idx = vars.index_of(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
                exps[idx] += e;
            }
            terms.push((exps, coeff));
        }
        SparsePoly::from_terms(vars, terms)
    }

    fn split_factors(term: &str) -> Vec<String> {
        let mut out = Vec::new();
        let mut cur = String::new();
        let mut depth = 0;
        for c in term.chars() {
            match c {
                '{' => depth += 1,
                '}' => depth -= 1,
                _ => {}
            }
            if c == '*' && depth == 0 {
                out.push(std::mem::take(&mut cur));
            } else {
                cur.push(c);
            }
        }
        out.push(cur);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(names: &[&str]) -> Arc<VarTable> {
        VarTable::new(names.iter().copied()).unwrap()
    }

    #[test]
    fn products_and_display() {
        let v = t(&["x"]);
        let x = SparsePoly::var(&v, 0);
        let one = SparsePoly::one(&v);
        assert_eq!((&(&x + &one) * &(&x - &one)).to_string(), "x^2 - 1");
        let c = t(&["c_1"]);
        let c1 = SparsePoly::var(&c, 0);
        assert_eq!((&c1 * &c1).to_string(), "c_1^2");
        let ab = t(&["x", "a_0", "a_1", "a_2", "b_0", "b_1"]);
        let f = SparsePoly::parse(&ab, "a_0 + a_1*x + a_2*x^2").unwrap();
        let g = SparsePoly::parse(&ab, "b_0 + b_1*x").unwrap();
        assert_eq!((&f * &g).len(), 6);
        let expect = SparsePoly::parse(&ab, "a_0*b_0 + a_0*b_1*x + a_1*b_0*x + a_1*b_1*x^2 + a_2*b_0*x^2 + a_2*b_1*x^3").unwrap();
        assert_eq!(&f * &g, expect);
    }

    #[test]
    fn partials() {
        let v = t(&["c_0", "c_1", "c_2"]);
        let d = SparsePoly::parse(&v, "c_1^2 - 4*c_0*c_2").unwrap();
        assert_eq!(d.partial(1).to_string(), "2*c_1");
        let x = t(&["x"]);
        assert_eq!(SparsePoly::parse(&x, "x^3").unwrap().partial(0).to_string(), "3*x^2");
    }

    #[test]
    fn division() {
        let v = t(&["x"]);
        let num = SparsePoly::parse(&v, "x^2 - 1").unwrap();
        let den = SparsePoly::parse(&v, "x - 1").unwrap();
        assert_eq!(num.exact_divide(&den).unwrap().to_string(), "x + 1");
        let x2 = SparsePoly::parse(&v, "x^2").unwrap();
        assert!(x2.exact_divide(&SparsePoly::parse(&v, "x + 1").unwrap()).is_err());
    }

    #[test]
    fn content() {
        let v = t(&["x"]);
        let (c, p) = SparsePoly::parse(&v, "6*x^2 + 4*x").unwrap().content_and_primitive().unwrap();
        assert_eq!(c, BigInt::from(2));
        assert_eq!(p.to_string(), "3*x^2 + 2*x");
        let w = t(&["c_0", "c_1", "c_2"]);
        let (c, p) = SparsePoly::parse(&w, "-c_1^2 + 4*c_0*c_2").unwrap().content_and_primitive().unwrap();
        assert_eq!(c, BigInt::from(-1));
        assert_eq!(p, SparsePoly::parse(&w, "c_1^2 - 4*c_0*c_2").unwrap());
        let (c, p) = SparsePoly::constant(&w, 12).content_and_primitive().unwrap();
        assert_eq!(c, BigInt::from(12));
        assert!(p.is_one());
        assert!(SparsePoly::zero(&w).content_and_primitive().is_err());
    }

    #[test]
    fn multidegree_and_pencil() {
        let v = t(&["x", "y"]);
        let p = SparsePoly::parse(&v, "x^2*y^3").unwrap();
        assert_eq!(p.multidegree(&[vec![0], vec![1]]).unwrap(), vec![2, 3]);
        assert!(p.multidegree(&[vec![0]]).is_err());
        let w = t(&["l_0", "l_1", "a", "b"]);
        let q = SparsePoly::parse(&w, "a*l_0^2 + 3*b*l_0*l_1 + a*b*l_1^2").unwrap();
        let pf = q.collect_as_pencil(&[0, 1]).unwrap();
        assert_eq!(pf.degree, 2);
        assert_eq!(pf.coeffs.len(), 3);
        assert_eq!(pf.coefficient(&[1, 1]).to_string(), "3*b");
        let bad = SparsePoly::parse(&w, "l_0 + l_1^2").unwrap();
        assert!(bad.collect_as_pencil(&[0, 1]).is_err());
    }

    #[test]
    fn substitution() {
        let v = t(&["c_0", "c_1", "c_2"]);
        let d = SparsePoly::parse(&v, "c_1^2 - 4*c_0*c_2").unwrap();
        assert_eq!(d.substitute(&HashMap::new(), None).unwrap(), d);
        let w = t(&["l_0", "l_1", "a_0", "a_1", "a_2", "b_0", "b_1", "b_2"]);
        let mut asg = HashMap::new();
        for j in 0..3 {
            let img = SparsePoly::parse(&w, &format!("l_0*a_{j} + l_1*b_{j}")).unwrap();
            asg.insert(format!("c_{j}"), img);
        }
        let s = d.substitute(&asg, None).unwrap();
        let pf = s.collect_as_pencil(&[0, 1]).unwrap();
        assert_eq!(pf.coeffs.len(), 3);
        assert_eq!(pf.degree, 2);
        let e = t(&["z"]);
        let mut nums = HashMap::new();
        for (j, n) in [(0, 1), (1, 5), (2, 2)] {
            nums.insert(format!("c_{j}"), SparsePoly::constant(&e, n));
        }
        assert_eq!(d.substitute(&nums, None).unwrap().constant_value(), Some(BigInt::from(17)));
    }

    #[test]
    fn parse_and_json_round_trip() {
        let v = t(&["c_{0,0}", "c_{1,0}"]);
        let p = SparsePoly::parse(&v, "-3*c_{0,0}^2*c_{1,0} + 7").unwrap();
        assert_eq!(p.to_string(), "-3*c_{0,0}^2*c_{1,0} + 7");
        let s = serde_json::to_string(&p).unwrap();
        let q: SparsePoly = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn table_mismatch_is_an_error() {
        let a = SparsePoly::var(&t(&["x"]), 0);
        let b = SparsePoly::var(&t(&["y"]), 0);
        assert_eq!(a.try_add(&b), Err(Error::VarTableMismatch));
    }
}
