//! Lattice configurations, lattice polygons and the Cayley construction.

use std::collections::BTreeSet;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite set of distinct integer points in `Z^dim`, kept in canonical
/// order: ascending coordinate sum, then lexicographically descending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawConfig")]
pub struct LatticeConfig {
    dim: usize,
    points: Vec<Vec<i64>>,
}

#[derive(Deserialize)]
struct RawConfig {
    dim: usize,
    points: Vec<Vec<i64>>,
}

impl TryFrom<RawConfig> for LatticeConfig {
    type Error = Error;
    fn try_from(r: RawConfig) -> Result<Self> {
        LatticeConfig::new(r.dim, r.points)
    }
}

fn canonical_cmp(a: &[i64], b: &[i64]) -> std::cmp::Ordering {
    let sa: i64 = a.iter().sum();
    let sb: i64 = b.iter().sum();
    sa.cmp(&sb).then_with(|| b.cmp(a))
}

impl LatticeConfig {
    pub fn new(dim: usize, mut points: Vec<Vec<i64>>) -> Result<LatticeConfig> {
        if dim == 0 {
            return Err(Error::InvalidConfig("dimension must be positive".into()));
        }
        if points.is_empty() {
            return Err(Error::InvalidConfig("configuration is empty".into()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::InvalidConfig(format!("point {p:?} does not have length {dim}")));
        }
        points.sort_by(|a, b| canonical_cmp(a, b));
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidConfig("repeated point".into()));
        }
        Ok(LatticeConfig { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, p: &[i64]) -> Option<usize> {
        self.points.iter().position(|q| q == p)
    }

    /// Dimension of the affine span of the points.
    pub fn affine_rank(&self) -> usize {
        use num_rational::BigRational;
        let base = &self.points[0];
        let rows: Vec<Vec<BigRational>> = self.points[1..]
            .iter()
            .map(|p| p.iter().zip(base).map(|(a, b)| BigRational::from_integer((a - b).into())).collect())
            .collect();
        crate::linalg::rank_rational(rows)
    }

    /// Lattice points of `d·Δ_n`.
    pub fn dilated_simplex(n: usize, d: u32) -> LatticeConfig {
        let mut pts = Vec::new();
        let mut cur = vec![0i64; n];
        fn rec(i: usize, rem: i64, cur: &mut Vec<i64>, pts: &mut Vec<Vec<i64>>) {
            if i == cur.len() {
                pts.push(cur.clone());
                return;
            }
            for v in 0..=rem {
                cur[i] = v;
                rec(i + 1, rem - v, cur, pts);
            }
            cur[i] = 0;
        }
        rec(0, d as i64, &mut cur, &mut pts);
        LatticeConfig::new(n, pts).expect("simplex points are distinct")
    }
}

/// A Cayley configuration with per-point block bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyConfig {
    pub config: LatticeConfig,
    pub r: usize,
    /// Block index of each point of `config`.
    pub block: Vec<usize>,
    /// Index of each point within its source configuration.
    pub source: Vec<usize>,
}

impl CayleyConfig {
    /// Position in `config` of point `j` of block `i`.
    pub fn position(&self, block: usize, source: usize) -> Option<usize> {
        (0..self.block.len()).find(|&k| self.block[k] == block && self.source[k] == source)
    }
}

/// Lift `A_0..A_r` to `e_i × A_i` in `Z^{r+n}` (lift coordinates first, `e_0 = 0`).
pub fn cayley(configs: &[LatticeConfig]) -> Result<CayleyConfig> {
    let first = configs.first().ok_or_else(|| Error::InvalidConfig("no configurations".into()))?;
    let n = first.dim;
    if configs.iter().any(|c| c.dim != n) {
        return Err(Error::InvalidConfig("mixed ambient dimensions".into()));
    }
    let r = configs.len() - 1;
    let mut pts = Vec::new();
    let mut tags = Vec::new();
    for (i, c) in configs.iter().enumerate() {
        for (j, p) in c.points.iter().enumerate() {
            let mut q = vec![0i64; r];
            if i > 0 {
                q[i - 1] = 1;
            }
            q.extend_from_slice(p);
            tags.push((q.clone(), i, j));
            pts.push(q);
        }
    }
    let config = LatticeConfig::new(n + r, pts)?;
    let mut block = vec![0; config.len()];
    let mut source = vec![0; config.len()];
    for (q, i, j) in tags {
        let k = config.index_of(&q).expect("lifted point present");
        block[k] = i;
        source[k] = j;
    }
    Ok(CayleyConfig { config, r, block, source })
}

/// Lattice points of `d_1Δ_{k_1} × … × d_ℓΔ_{k_ℓ}`.
pub fn simplex_product_points(d: &[u32], k: &[usize]) -> Result<LatticeConfig> {
    if d.is_empty() || d.len() != k.len() {
        return Err(Error::InvalidInput("d and k must be nonempty and of equal length".into()));
    }
    let factors: Vec<LatticeConfig> = d.iter().zip(k).map(|(&di, &ki)| LatticeConfig::dilated_simplex(ki, di)).collect();
    let mut pts: Vec<Vec<i64>> = vec![Vec::new()];
    for f in &factors {
        let mut next = Vec::with_capacity(pts.len() * f.len());
        for p in &pts {
            for q in &f.points {
                let mut v = p.clone();
                v.extend_from_slice(q);
                next.push(v);
            }
        }
        pts = next;
    }
    LatticeConfig::new(k.iter().sum(), pts)
}

/// Strictly convex lattice polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPolygon")]
pub struct Polygon {
    vertices: Vec<(i64, i64)>,
}

#[derive(Deserialize)]
struct RawPolygon {
    vertices: Vec<(i64, i64)>,
}

impl TryFrom<RawPolygon> for Polygon {
    type Error = Error;
    fn try_from(r: RawPolygon) -> Result<Self> {
        Polygon::new(r.vertices)
    }
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

impl Polygon {
    /// Validate a counterclockwise, strictly convex vertex list.
    pub fn new(vertices: Vec<(i64, i64)>) -> Result<Polygon> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidPolygon("fewer than three vertices".into()));
        }
        for i in 0..n {
            let c = cross(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            if c <= 0 {
                return Err(Error::InvalidPolygon(format!(
                    "not strictly convex counterclockwise at vertex {:?}",
                    vertices[(i + 1) % n]
                )));
            }
        }
        let p = Polygon { vertices };
        if p.shoelace() <= 0 {
            return Err(Error::InvalidPolygon("nonpositive area".into()));
        }
        if p.winding_ok() {
            Ok(p)
        } else {
            Err(Error::InvalidPolygon("vertex list winds more than once".into()))
        }
    }

    fn winding_ok(&self) -> bool {
        // angles of consecutive edges must increase by less than a full turn in total
        let n = self.vertices.len();
        let v0 = self.vertices[0];
        (1..n - 1).all(|i| cross(v0, self.vertices[i], self.vertices[i + 1]) > 0)
    }

    /// Convex hull of a point set (at least three non-collinear points).
    pub fn hull(points: &[(i64, i64)]) -> Result<Polygon> {
        let mut pts: Vec<(i64, i64)> = points.to_vec();
        pts.sort();
        pts.dedup();
        if pts.len() < 3 {
            return Err(Error::InvalidPolygon("fewer than three distinct points".into()));
        }
        let mut lower: Vec<(i64, i64)> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<(i64, i64)> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Polygon::new(lower)
    }

    pub fn unit_square() -> Polygon {
        Polygon::new(vec![(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap()
    }

    pub fn dilated_triangle(d: i64) -> Polygon {
        Polygon::new(vec![(0, 0), (d, 0), (0, d)]).unwrap()
    }

    /// The trapezoid `conv((0,0),(2,0),(1,1),(0,1))`.
    pub fn f1_trapezoid() -> Polygon {
        Polygon::new(vec![(0, 0), (2, 0), (1, 1), (0, 1)]).unwrap()
    }

    pub fn vertices(&self) -> &[(i64, i64)] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    fn shoelace(&self) -> i64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
                a.0 * b.1 - a.1 * b.0
            })
            .sum()
    }

    /// Twice the Euclidean area.
    pub fn normalized_area(&self) -> i64 {
        self.shoelace()
    }

    /// Number of lattice points on the boundary.
    pub fn lattice_perimeter(&self) -> i64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
                (b.0 - a.0).gcd(&(b.1 - a.1))
            })
            .sum()
    }

    fn bbox(&self) -> (i64, i64, i64, i64) {
        let xs = self.vertices.iter().map(|v| v.0);
        let ys = self.vertices.iter().map(|v| v.1);
        (xs.clone().min().unwrap(), xs.max().unwrap(), ys.clone().min().unwrap(), ys.max().unwrap())
    }

    fn side_signs(&self, q: (i64, i64)) -> impl Iterator<Item = i64> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| cross(self.vertices[i], self.vertices[(i + 1) % n], q))
    }

    /// Strict-interior lattice points, by enumeration.
    pub fn interior_points(&self) -> i64 {
        let (x0, x1, y0, y1) = self.bbox();
        let mut count = 0;
        for x in x0..=x1 {
            for y in y0..=y1 {
                if self.side_signs((x, y)).all(|s| s > 0) {
                    count += 1;
                }
            }
        }
        count
    }

    /// All lattice points of the polygon, as a configuration.
    pub fn lattice_points(&self) -> LatticeConfig {
        let (x0, x1, y0, y1) = self.bbox();
        let mut pts = Vec::new();
        for x in x0..=x1 {
            for y in y0..=y1 {
                if self.side_signs((x, y)).all(|s| s >= 0) {
                    pts.push(vec![x, y]);
                }
            }
        }
        LatticeConfig::new(2, pts).expect("distinct lattice points")
    }

    fn primitive_dir(a: (i64, i64), b: (i64, i64)) -> (i64, i64) {
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let g = dx.gcd(&dy);
        (dx / g, dy / g)
    }

    /// Every vertex cone is spanned by a lattice basis.
    pub fn is_smooth(&self) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let v = self.vertices[i];
            let a = Self::primitive_dir(v, self.vertices[(i + 1) % n]);
            let b = Self::primitive_dir(v, self.vertices[(i + n - 1) % n]);
            (a.0 * b.1 - a.1 * b.0).abs() == 1
        })
    }

    /// Normalized area at most 1 (the unimodular triangle).
    pub fn is_degenerate(&self) -> bool {
        self.normalized_area() <= 1
    }

    /// Canonical representative under affine unimodular equivalence, as a
    /// sorted vertex list.
    pub fn normal_form(&self) -> Vec<(i64, i64)> {
        let n = self.vertices.len();
        let mut best: Option<Vec<(i64, i64)>> = None;
        for i in 0..n {
            let v = self.vertices[i];
            let next = self.vertices[(i + 1) % n];
            let prev = self.vertices[(i + n - 1) % n];
            for (along, other) in [(next, prev), (prev, next)] {
                let d = Self::primitive_dir(v, along);
                let ext = i64::extended_gcd(&d.0, &d.1);
                let (s, t) = if ext.gcd == 1 { (ext.x, ext.y) } else { (-ext.x, -ext.y) };
                let mut row2 = (-d.1, d.0);
                let w = (other.0 - v.0, other.1 - v.1);
                let mut wy = row2.0 * w.0 + row2.1 * w.1;
                if wy < 0 {
                    row2 = (-row2.0, -row2.1);
                    wy = -wy;
                }
                let wx = s * w.0 + t * w.1;
                let k = -Integer::div_floor(&wx, &wy);
                let mut img: Vec<(i64, i64)> = self
                    .vertices
                    .iter()
                    .map(|p| {
                        let q = (p.0 - v.0, p.1 - v.1);
                        let y = row2.0 * q.0 + row2.1 * q.1;
                        let x = s * q.0 + t * q.1 + k * y;
                        (x, y)
                    })
                    .collect();
                img.sort();
                if best.as_ref().is_none_or(|b| img < *b) {
                    best = Some(img);
                }
            }
        }
        best.expect("polygon has vertices")
    }

    pub fn equivalent(&self, other: &Polygon) -> bool {
        self.normal_form() == other.normal_form()
    }
}

/// `2Δ_2` together with the trapezoids `conv((0,0),(0,1),(a,0),(b,1))`,
/// `a_max ≥ a ≥ b ≥ 0`, `a ≥ 1`, deduplicated up to lattice equivalence.
pub fn enumerate_no_interior_polygons(a_max: i64) -> Vec<Polygon> {
    let mut out = vec![Polygon::dilated_triangle(2)];
    let mut seen: BTreeSet<Vec<(i64, i64)>> = BTreeSet::new();
    seen.insert(out[0].normal_form());
    for a in 1..=a_max.max(0) {
        for b in 0..=a {
            let p = Polygon::hull(&[(0, 0), (0, 1), (a, 0), (b, 1)]).expect("trapezoid is two-dimensional");
            if seen.insert(p.normal_form()) {
                out.push(p);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order() {
        let c = LatticeConfig::new(2, vec![vec![1, 1], vec![0, 1], vec![1, 0], vec![0, 0]]).unwrap();
        assert_eq!(c.points(), &[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert!(LatticeConfig::new(2, vec![vec![0, 0], vec![0, 0]]).is_err());
        assert!(LatticeConfig::new(2, vec![vec![0]]).is_err());
        let q = LatticeConfig::dilated_simplex(3, 2);
        assert_eq!(q.len(), 10);
        assert_eq!(q.points()[4], vec![2, 0, 0]);
        assert_eq!(q.points()[5], vec![1, 1, 0]);
    }

    #[test]
    fn cayley_of_cubics() {
        let a = LatticeConfig::dilated_simplex(1, 3);
        let c = cayley(&[a.clone(), a.clone()]).unwrap();
        let pts: BTreeSet<Vec<i64>> = c.config.points().iter().cloned().collect();
        let want: BTreeSet<Vec<i64>> = (0..2).flat_map(|i| (0..4).map(move |j| vec![i, j])).collect();
        assert_eq!(pts, want);
        let k = c.position(1, 2).unwrap();
        assert_eq!(c.config.points()[k], vec![1, 2]);
        let solo = cayley(std::slice::from_ref(&a)).unwrap();
        assert_eq!(solo.config, a);
        assert!(cayley(&[a, LatticeConfig::dilated_simplex(2, 1)]).is_err());
    }

    #[test]
    fn polygon_counts() {
        let sq = Polygon::unit_square();
        assert_eq!((sq.normalized_area(), sq.lattice_perimeter(), sq.interior_points()), (2, 4, 0));
        let t2 = Polygon::dilated_triangle(2);
        assert_eq!((t2.normalized_area(), t2.lattice_perimeter(), t2.interior_points()), (4, 6, 0));
        let f1 = Polygon::f1_trapezoid();
        assert_eq!((f1.normalized_area(), f1.lattice_perimeter(), f1.interior_points()), (3, 5, 0));
        assert_eq!(Polygon::dilated_triangle(3).interior_points(), 1);
        assert!(sq.is_smooth() && t2.is_smooth());
        assert!(!Polygon::hull(&[(0, 0), (4, 0), (0, 1)]).unwrap().is_smooth());
        assert!(Polygon::new(vec![(0, 0), (0, 1), (1, 0)]).is_err());
        assert!(Polygon::new(vec![(0, 0), (1, 0), (2, 0), (0, 1)]).is_err());
        assert_eq!(f1.lattice_points().len(), 5);
    }

    #[test]
    fn normal_forms() {
        let a = Polygon::hull(&[(0, 0), (0, 1), (2, 0), (1, 1)]).unwrap();
        assert!(a.equivalent(&Polygon::f1_trapezoid()));
        let moved = Polygon::hull(&[(3, 5), (4, 5), (5, 6), (3, 6)]).unwrap();
        assert!(moved.equivalent(&Polygon::f1_trapezoid()));
        assert!(!Polygon::unit_square().equivalent(&Polygon::f1_trapezoid()));
        let sheared = Polygon::hull(&[(0, 0), (1, 0), (3, 1), (2, 1)]).unwrap();
        assert!(sheared.equivalent(&Polygon::unit_square()));
    }

    #[test]
    fn enumeration() {
        let one = enumerate_no_interior_polygons(1);
        assert_eq!(one.len(), 3);
        assert!(one.iter().any(|p| p.equivalent(&Polygon::unit_square())));
        assert!(one.iter().all(|p| p.interior_points() == 0));
        assert!(enumerate_no_interior_polygons(2).iter().any(|p| p.equivalent(&Polygon::f1_trapezoid())));
    }

    #[test]
    fn simplex_products() {
        assert_eq!(simplex_product_points(&[1], &[1]).unwrap().points(), &[vec![0], vec![1]]);
        assert_eq!(simplex_product_points(&[1, 1], &[1, 1]).unwrap().len(), 4);
        assert_eq!(simplex_product_points(&[2], &[3]).unwrap(), LatticeConfig::dilated_simplex(3, 2));
        assert_eq!(simplex_product_points(&[2, 3], &[2, 1]).unwrap().len(), 6 * 4);
    }
}
