//! Brute-force cross-checks of the polygon enumeration and search.

use std::collections::BTreeSet;

use mixdisc::degrees::{equal_degree_polygons, plane_report, Verdict};
use mixdisc::lattice::{enumerate_no_interior_polygons, Polygon};

const BOX: i64 = 4;
const A_MAX: i64 = 8;

/// Hulls of every 3- and 4-subset of the lattice box.
fn box_polygons() -> Vec<Polygon> {
    let pts: Vec<(i64, i64)> = (0..=BOX).flat_map(|x| (0..=BOX).map(move |y| (x, y))).collect();
    let n = pts.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if let Ok(p) = Polygon::hull(&[pts[a], pts[b], pts[c]]) {
                    out.push(p);
                }
                for d in c + 1..n {
                    if let Ok(p) = Polygon::hull(&[pts[a], pts[b], pts[c], pts[d]]) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

#[test]
fn no_interior_polygons_are_enumerated() {
    let known: BTreeSet<_> = enumerate_no_interior_polygons(A_MAX).iter().map(Polygon::normal_form).collect();
    for p in box_polygons() {
        if p.interior_points() == 0 && p.normalized_area() <= A_MAX {
            assert!(known.contains(&p.normal_form()), "{:?} missing from the enumeration", p.vertices());
        }
    }
}

#[test]
fn equal_degree_search_matches_brute_force() {
    let mut brute = BTreeSet::new();
    for p in box_polygons() {
        if p.interior_points() == 0
            && p.is_smooth()
            && !p.is_degenerate()
            && p.normalized_area() <= A_MAX
            && plane_report(&p).unwrap().verdict == Verdict::Equal
        {
            brute.insert(p.normal_form());
        }
    }
    let found: BTreeSet<_> = equal_degree_polygons(A_MAX).unwrap().iter().map(Polygon::normal_form).collect();
    assert_eq!(found, brute);
    assert_eq!(found.len(), 2);
}

#[test]
fn normal_form_is_invariant() {
    let p = Polygon::new(vec![(0, 0), (3, 0), (1, 1), (0, 1)]).unwrap();
    let moved: Vec<(i64, i64)> = p.vertices().iter().map(|&(x, y)| (2 * x + y + 5, x + y - 3)).collect();
    let q = Polygon::hull(&moved).unwrap();
    assert!(p.equivalent(&q));
    assert!(!p.equivalent(&Polygon::unit_square()));
}
