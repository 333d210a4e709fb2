//! Bowyer–Watson Delaunay triangulation of a planar point set.

use std::collections::HashMap;

struct Tri {
    v: [usize; 3],
    center: [f64; 2],
    radius2: f64,
}

fn circumcircle(p: &[[f64; 2]], v: [usize; 3]) -> ([f64; 2], f64) {
    let [a, b, c] = [p[v[0]], p[v[1]], p[v[2]]];
    let (bx, by) = (b[0] - a[0], b[1] - a[1]);
    let (cx, cy) = (c[0] - a[0], c[1] - a[1]);
    let d = 2.0 * (bx * cy - by * cx);
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    ([a[0] + ux, a[1] + uy], ux * ux + uy * uy)
}

/// Counter-clockwise triangles whose vertices are indices into `points`.
pub(crate) fn triangulate(points: &[[f64; 2]]) -> Vec<[usize; 3]> {
    let n = points.len();
    if n < 3 {
        return Vec::new();
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let mid = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
    let mut all: Vec<[f64; 2]> = points.to_vec();
    all.push([mid[0] - 40.0 * span, mid[1] - 30.0 * span]);
    all.push([mid[0] + 40.0 * span, mid[1] - 30.0 * span]);
    all.push([mid[0], mid[1] + 40.0 * span]);

    let make = |all: &[[f64; 2]], v: [usize; 3]| {
        let (center, radius2) = circumcircle(all, v);
        Tri { v, center, radius2 }
    };
    let mut tris = vec![make(&all, [n, n + 1, n + 2])];

    // insert in a coarse grid order so cavities stay local
    let cells = (n as f64).sqrt().ceil().max(1.0);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| {
        let cx = (((points[i][0] - lo[0]) / span) * cells).floor() as i64;
        let cy = (((points[i][1] - lo[1]) / span) * cells).floor() as i64;
        let cx = if cy % 2 == 0 { cx } else { cells as i64 - cx };
        (cy, cx)
    });

    let mut edge_count: HashMap<(usize, usize), u32> = HashMap::new();
    for &pi in &order {
        let p = all[pi];
        let mut bad = Vec::new();
        let mut keep = Vec::with_capacity(tris.len() + 2);
        for t in tris.drain(..) {
            let dx = p[0] - t.center[0];
            let dy = p[1] - t.center[1];
            if dx * dx + dy * dy < t.radius2 * (1.0 - 1e-12) {
                bad.push(t.v);
            } else {
                keep.push(t);
            }
        }
        tris = keep;
        edge_count.clear();
        for v in &bad {
            for k in 0..3 {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                *edge_count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        for v in &bad {
            for k in 0..3 {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                if edge_count[&(a.min(b), a.max(b))] == 1 {
                    tris.push(make(&all, [a, b, pi]));
                }
            }
        }
    }
    tris.into_iter().filter(|t| t.v.iter().all(|&i| i < n)).map(|t| t.v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_grid_covers_hull() {
        let mut pts = Vec::new();
        for i in 0..6 {
            for j in 0..5 {
                // slight shear removes cocircular ties
                pts.push([i as f64 + 0.01 * j as f64, j as f64 + 0.013 * i as f64]);
            }
        }
        let tris = triangulate(&pts);
        assert_eq!(tris.len(), 2 * 5 * 4);
        let area: f64 = tris
            .iter()
            .map(|t| {
                let [a, b, c] = [pts[t[0]], pts[t[1]], pts[t[2]]];
                0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
            })
            .inspect(|&a| assert!(a > 0.0))
            .sum();
        assert!(area > 19.0);
    }

    #[test]
    fn empty_circumcircles() {
        let pts: Vec<[f64; 2]> = (0..60)
            .map(|k| {
                let t = k as f64 * 2.399;
                let r = (k as f64 / 60.0).sqrt();
                [r * t.cos(), r * t.sin()]
            })
            .collect();
        let tris = triangulate(&pts);
        for t in &tris {
            let (c, r2) = circumcircle(&pts, *t);
            for (i, p) in pts.iter().enumerate() {
                if t.contains(&i) {
                    continue;
                }
                let d2 = (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2);
                assert!(d2 >= r2 * (1.0 - 1e-9));
            }
        }
    }
}
