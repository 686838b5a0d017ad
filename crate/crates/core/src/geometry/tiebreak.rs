//! Canonical triangulation of a convex polygon.
//!
//! A triangle is the lexicographically sorted triple of its vertices and a
//! triangulation is compared as the sorted list of its triangles. For points
//! in convex position every set of pairwise interior-disjoint triangles
//! extends to a full triangulation, and all triangulations have the same
//! size, so scanning candidate triangles in increasing order and keeping each
//! one compatible with those already kept yields the minimum.

use std::cmp::Ordering;

use super::predicates::orient;

fn lex(a: [f64; 2], b: [f64; 2]) -> Ordering {
    a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1]))
}

/// Cyclic positions `[p0, p1, p2]` (increasing): whether triangle `b` lies in
/// one of the three pockets cut off by `a`, i.e. they share no interior.
fn disjoint(a: [usize; 3], b: [usize; 3], m: usize) -> bool {
    let arcs = [(a[0], a[1]), (a[1], a[2]), (a[2], a[0] + m)];
    arcs.iter().any(|&(lo, hi)| {
        b.iter().all(|&q| {
            let q1 = if q < lo { q + m } else { q };
            q1 >= lo && q1 <= hi
        })
    })
}

/// Lexicographically smallest triangulation of points in convex position.
/// Returns counterclockwise index triples into `pts`.
pub fn lexicographic_min_triangulation(pts: &[[f64; 2]]) -> Vec<[usize; 3]> {
    let m = pts.len();
    if m < 3 {
        return Vec::new();
    }
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |s, p| (s.0 + p[0], s.1 + p[1]));
    let (cx, cy) = (sx / m as f64, sy / m as f64);
    let mut cyc: Vec<usize> = (0..m).collect();
    cyc.sort_by(|&i, &j| {
        let ai = (pts[i][1] - cy).atan2(pts[i][0] - cx);
        let aj = (pts[j][1] - cy).atan2(pts[j][0] - cx);
        ai.total_cmp(&aj)
    });
    let mut pos = vec![0usize; m];
    for (k, &i) in cyc.iter().enumerate() {
        pos[i] = k;
    }
    let mut by_lex: Vec<usize> = (0..m).collect();
    by_lex.sort_by(|&i, &j| lex(pts[i], pts[j]));

    let mut chosen: Vec<[usize; 3]> = Vec::with_capacity(m - 2);
    'outer: for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                let tri = [by_lex[a], by_lex[b], by_lex[c]];
                let mut cp = tri.map(|i| pos[i]);
                cp.sort_unstable();
                if chosen.iter().all(|t| {
                    let mut tp = t.map(|i| pos[i]);
                    tp.sort_unstable();
                    disjoint(tp, cp, m)
                }) {
                    chosen.push(tri);
                    if chosen.len() == m - 2 {
                        break 'outer;
                    }
                }
            }
        }
    }
    chosen
        .into_iter()
        .map(|[a, b, c]| if orient(pts[a], pts[b], pts[c]) > 0.0 { [a, b, c] } else { [a, c, b] })
        .collect()
}
