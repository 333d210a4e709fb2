use super::delaunay::triangulate;
use super::geometry::{polygon_signed_area, Domain2D, Shape};
use crate::error::{Error, Result};
use std::collections::{HashMap, VecDeque};
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

pub const MIN_ANGLE_DEGREES: f64 = 20.0;
const SMOOTHING_PASSES: usize = 6;
/// Refuse meshes whose estimated node count exceeds this.
pub const MAX_MESH_NODES: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<[f64; 2]>,
    /// Counter-clockwise index triples.
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<[usize; 2]>,
    /// Longest edge length.
    pub h: f64,
}

fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl Mesh {
    /// Builds the boundary edge list and size from nodes and triangles. No validation.
    pub fn new(nodes: Vec<[f64; 2]>, triangles: Vec<[usize; 3]>) -> Self {
        let mut count: HashMap<(usize, usize), (u32, [usize; 2])> = HashMap::new();
        let mut h = 0.0_f64;
        for t in &triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let e = count.entry((a.min(b), a.max(b))).or_insert((0, [a, b]));
                e.0 += 1;
                if let (Some(&pa), Some(&pb)) = (nodes.get(a), nodes.get(b)) {
                    h = h.max(dist(pa, pb));
                }
            }
        }
        let mut boundary_edges: Vec<[usize; 2]> = count.values().filter(|(c, _)| *c == 1).map(|(_, e)| *e).collect();
        boundary_edges.sort_unstable();
        Self { nodes, triangles, boundary_edges, h }
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        signed_area(self.nodes[a], self.nodes[b], self.nodes[c])
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Index range, positive orientation and edge conformity.
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        let mut edges: HashMap<(usize, usize), u32> = HashMap::new();
        for (ti, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&i| i >= n) || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::Mesh(format!("triangle {ti} has invalid vertex indices {t:?}")));
            }
            if !(self.triangle_area(ti) > 0.0) {
                return Err(Error::Mesh(format!("triangle {ti} has non-positive area")));
            }
            for k in 0..3 {
                let directed = (t[k], t[(k + 1) % 3]);
                let c = edges.entry(directed).or_insert(0);
                *c += 1;
                if *c > 1 {
                    return Err(Error::Mesh(format!("edge {directed:?} is used twice with the same orientation")));
                }
            }
        }
        let mut used = vec![false; n];
        for t in &self.triangles {
            for &i in t {
                used[i] = true;
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::Mesh(format!("node {i} belongs to no triangle")));
        }
        Ok(())
    }

    pub fn min_angle_degrees(&self) -> f64 {
        let mut worst = 180.0_f64;
        for t in &self.triangles {
            for k in 0..3 {
                let p = self.nodes[t[k]];
                let a = self.nodes[t[(k + 1) % 3]];
                let b = self.nodes[t[(k + 2) % 3]];
                let u = [a[0] - p[0], a[1] - p[1]];
                let v = [b[0] - p[0], b[1] - p[1]];
                let cos = (u[0] * v[0] + u[1] * v[1]) / (u[0].hypot(u[1]) * v[0].hypot(v[1]));
                worst = worst.min(cos.clamp(-1.0, 1.0).acos().to_degrees());
            }
        }
        worst
    }

    /// Largest distance from a negated node to its nearest node.
    pub fn symmetry_defect(&self) -> f64 {
        let locator = NodeGrid::new(&self.nodes, self.h.max(1e-12));
        self.nodes
            .iter()
            .map(|p| locator.nearest_distance([-p[0], -p[1]]))
            .fold(0.0, f64::max)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.nodes.len());
        for p in &self.nodes {
            let _ = writeln!(s, "{:?} {:?}", p[0], p[1]);
        }
        let _ = writeln!(s, "{}", self.triangles.len());
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let mut next = |what: &str| lines.next().ok_or_else(|| Error::Parse(format!("unexpected end of mesh text, expected {what}")));
        let count = |(i, l): (usize, &str)| {
            l.trim().parse::<usize>().map_err(|e| Error::Parse(format!("line {}: bad count {l:?}: {e}", i + 1)))
        };
        let n = count(next("node count")?)?;
        let mut nodes = Vec::with_capacity(n);
        for _ in 0..n {
            let (i, l) = next("node line")?;
            let v: Vec<f64> = l
                .split_whitespace()
                .map(|w| w.parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", i + 1))))
                .collect::<Result<_>>()?;
            if v.len() != 2 {
                return Err(Error::Parse(format!("line {}: expected two coordinates", i + 1)));
            }
            nodes.push([v[0], v[1]]);
        }
        let t = count(next("triangle count")?)?;
        let mut triangles = Vec::with_capacity(t);
        for _ in 0..t {
            let (i, l) = next("triangle line")?;
            let v: Vec<usize> = l
                .split_whitespace()
                .map(|w| w.parse::<usize>().map_err(|e| Error::Parse(format!("line {}: {e}", i + 1))))
                .collect::<Result<_>>()?;
            if v.len() != 3 || v.iter().any(|&k| k >= n) {
                return Err(Error::Parse(format!("line {}: expected three node indices below {n}", i + 1)));
            }
            triangles.push([v[0], v[1], v[2]]);
        }
        Ok(Self::new(nodes, triangles))
    }

    /// Reverse Cuthill–McKee renumbering, shrinking the matrix envelope.
    pub fn renumber_rcm(&mut self) {
        let n = self.nodes.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        let bfs = |start: usize, visited: &mut Vec<bool>| {
            let mut order = vec![start];
            visited[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
                next.sort_by_key(|&w| (adj[w].len(), w));
                for w in next {
                    visited[w] = true;
                    order.push(w);
                    queue.push_back(w);
                }
            }
            order
        };
        let mut visited = vec![false; n];
        let mut order = Vec::with_capacity(n);
        while order.len() < n {
            let seed = (0..n).filter(|&i| !visited[i]).min_by_key(|&i| (adj[i].len(), i)).unwrap();
            // pseudo-peripheral start: last node reached from the seed
            let mut scratch = visited.clone();
            let far = *bfs(seed, &mut scratch).last().unwrap();
            order.extend(bfs(far, &mut visited));
        }
        order.reverse();
        let mut new_index = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let nodes = order.iter().map(|&old| self.nodes[old]).collect();
        let triangles = self.triangles.iter().map(|t| [new_index[t[0]], new_index[t[1]], new_index[t[2]]]).collect();
        *self = Mesh::new(nodes, triangles);
    }
}

/// Uniform bucket grid over node positions.
struct NodeGrid<'a> {
    nodes: &'a [[f64; 2]],
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl<'a> NodeGrid<'a> {
    fn new(nodes: &'a [[f64; 2]], cell: f64) -> Self {
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in nodes.iter().enumerate() {
            buckets.entry(Self::key(p, cell)).or_default().push(i);
        }
        Self { nodes, cell, buckets }
    }

    fn key(p: &[f64; 2], cell: f64) -> (i64, i64) {
        ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64)
    }

    fn nearest_distance(&self, p: [f64; 2]) -> f64 {
        let (kx, ky) = Self::key(&p, self.cell);
        let mut best = f64::INFINITY;
        for ring in 0..64i64 {
            for dx in -ring..=ring {
                for dy in -ring..=ring {
                    if dx.abs().max(dy.abs()) != ring {
                        continue;
                    }
                    if let Some(list) = self.buckets.get(&(kx + dx, ky + dy)) {
                        for &i in list {
                            best = best.min(dist(self.nodes[i], p));
                        }
                    }
                }
            }
            if best <= ring as f64 * self.cell {
                break;
            }
        }
        best
    }
}

/// Point location by a bucket grid of triangle bounding boxes.
pub struct MeshLocator<'a> {
    mesh: &'a Mesh,
    origin: [f64; 2],
    cell: f64,
    dims: (usize, usize),
    buckets: Vec<Vec<usize>>,
}

impl<'a> MeshLocator<'a> {
    pub fn new(mesh: &'a Mesh) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &mesh.nodes {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let cell = mesh.h.max(1e-12);
        let dims = (((hi[0] - lo[0]) / cell).floor() as usize + 1, ((hi[1] - lo[1]) / cell).floor() as usize + 1);
        let mut buckets = vec![Vec::new(); dims.0 * dims.1];
        for (ti, t) in mesh.triangles.iter().enumerate() {
            let xs = t.map(|i| mesh.nodes[i][0]);
            let ys = t.map(|i| mesh.nodes[i][1]);
            let fmin = |v: [f64; 3]| v.iter().copied().fold(f64::INFINITY, f64::min);
            let fmax = |v: [f64; 3]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let i0 = ((fmin(xs) - lo[0]) / cell).floor() as usize;
            let i1 = (((fmax(xs) - lo[0]) / cell).floor() as usize).min(dims.0 - 1);
            let j0 = ((fmin(ys) - lo[1]) / cell).floor() as usize;
            let j1 = (((fmax(ys) - lo[1]) / cell).floor() as usize).min(dims.1 - 1);
            for i in i0..=i1 {
                for j in j0..=j1 {
                    buckets[j * dims.0 + i].push(ti);
                }
            }
        }
        Self { mesh, origin: lo, cell, dims, buckets }
    }

    /// Triangle containing `p` and the barycentric coordinates of `p` in it.
    pub fn locate(&self, p: [f64; 2]) -> Option<(usize, [f64; 3])> {
        let fi = ((p[0] - self.origin[0]) / self.cell).floor();
        let fj = ((p[1] - self.origin[1]) / self.cell).floor();
        if fi < 0.0 || fj < 0.0 || fi as usize >= self.dims.0 || fj as usize >= self.dims.1 {
            return None;
        }
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &ti in &self.buckets[fj as usize * self.dims.0 + fi as usize] {
            let [a, b, c] = self.mesh.triangles[ti].map(|i| self.mesh.nodes[i]);
            let area = signed_area(a, b, c);
            let l = [signed_area(p, b, c) / area, signed_area(a, p, c) / area, signed_area(a, b, p) / area];
            let worst = l.iter().copied().fold(f64::INFINITY, f64::min);
            if best.is_none_or(|(_, _, w)| worst > w) {
                best = Some((ti, l, worst));
            }
        }
        best.filter(|(_, _, w)| *w >= -1e-10).map(|(t, l, _)| (t, l))
    }
}

/// Builds a conforming, origin-symmetric mesh of `domain` with edges of length about `target_h`.
pub fn mesh_domain(domain: &Domain2D, target_h: f64) -> Result<Mesh> {
    if !(target_h > 0.0 && target_h.is_finite()) {
        return Err(Error::Argument(format!("mesh size must be positive, got {target_h}")));
    }
    if !(domain.area() > 0.0) {
        return Err(Error::Mesh("degenerate domain with zero area".into()));
    }
    if target_h >= domain.inradius() {
        return Err(Error::Argument(format!("mesh size {target_h} is not below the inradius {}", domain.inradius())));
    }
    // one node per equilateral lattice cell of area (√3/2)h²
    let estimate = domain.area() / (0.75f64.sqrt() * target_h * target_h);
    if estimate > MAX_MESH_NODES as f64 {
        return Err(Error::Argument(format!(
            "mesh size {target_h} would need about {estimate:.3e} nodes (limit {MAX_MESH_NODES})"
        )));
    }
    let mut mesh = match &domain.shape {
        Shape::Disk { radius } => disk_mesh(*radius, target_h),
        Shape::Annulus { inner, outer } => annulus_mesh(*inner, *outer, target_h),
        Shape::Rectangle { a, b } => rectangle_mesh(*a, *b, target_h),
        Shape::Ellipse { a, b } => unstructured_mesh(domain, ellipse_boundary(*a, *b, target_h), true, target_h)?,
        Shape::Polygon { vertices } => {
            let (points, paired) = polygon_boundary(vertices, domain.symmetric, target_h);
            unstructured_mesh(domain, points, paired, target_h)?
        }
    };
    mesh.renumber_rcm();
    mesh.validate()?;
    let angle = mesh.min_angle_degrees();
    if angle < MIN_ANGLE_DEGREES {
        return Err(Error::Mesh(format!("minimum angle {angle:.2} degrees is below {MIN_ANGLE_DEGREES}")));
    }
    Ok(mesh)
}

/// Triangles between two closed rings of nodes. Ring positions are given as
/// `(2j + shift) / (2 count)` turns, compared in integers so the pattern is exactly
/// invariant under a half turn when both counts are even.
fn zip_rings(inner: (&[usize], usize), outer: (&[usize], usize), tris: &mut Vec<[usize; 3]>) {
    let (a_nodes, sa) = inner;
    let (b_nodes, sb) = outer;
    let (a, b) = (a_nodes.len(), b_nodes.len());
    if a == 1 {
        for j in 0..b {
            tris.push([a_nodes[0], b_nodes[j], b_nodes[(j + 1) % b]]);
        }
        return;
    }
    let (mut i, mut j) = (0usize, 0usize);
    // start from the pair whose angles are closest at angle zero
    while i < a || j < b {
        let next_a = (2 * (i + 1) + sa) * b;
        let next_b = (2 * (j + 1) + sb) * a;
        if j < b && (i == a || next_b < next_a) {
            tris.push([a_nodes[i % a], b_nodes[j % b], b_nodes[(j + 1) % b]]);
            j += 1;
        } else {
            tris.push([a_nodes[i % a], b_nodes[j % b], a_nodes[(i + 1) % a]]);
            i += 1;
        }
    }
}

fn ring(nodes: &mut Vec<[f64; 2]>, radius: f64, count: usize, shift: usize) -> Vec<usize> {
    (0..count)
        .map(|j| {
            let t = TAU * (2 * j + shift) as f64 / (2 * count) as f64;
            nodes.push([radius * t.cos(), radius * t.sin()]);
            nodes.len() - 1
        })
        .collect()
}

fn disk_mesh(radius: f64, h: f64) -> Mesh {
    let rings = (radius / h - 1e-9).ceil().max(1.0) as usize;
    let mut nodes = vec![[0.0, 0.0]];
    let mut tris = Vec::new();
    let mut previous = vec![0usize];
    for k in 1..=rings {
        let current = ring(&mut nodes, radius * k as f64 / rings as f64, 6 * k, 0);
        zip_rings((&previous, 0), (&current, 0), &mut tris);
        previous = current;
    }
    Mesh::new(nodes, tris)
}

fn annulus_mesh(inner: f64, outer: f64, h: f64) -> Mesh {
    let layers = ((outer - inner) / h - 1e-9).ceil().max(1.0) as usize;
    let dr = (outer - inner) / layers as f64;
    // tangential spacing of an equilateral triangle with height dr
    let tangential = dr * 2.0 / 3f64.sqrt();
    let mut nodes = Vec::new();
    let mut tris = Vec::new();
    let mut previous: Option<(Vec<usize>, usize)> = None;
    for k in 0..=layers {
        let r = inner + k as f64 * dr;
        let count = 2 * ((PI * r / tangential).ceil() as usize).max(3);
        let shift = k % 2;
        let current = ring(&mut nodes, r, count, shift);
        if let Some((prev, prev_shift)) = &previous {
            zip_rings((prev, *prev_shift), (&current, shift), &mut tris);
        }
        previous = Some((current, shift));
    }
    Mesh::new(nodes, tris)
}

fn rectangle_mesh(a: f64, b: f64, h: f64) -> Mesh {
    let nx = 2 * (a / h - 1e-9).ceil().max(1.0) as usize;
    let ny = 2 * (b / h - 1e-9).ceil().max(1.0) as usize;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            // symmetric formula so that x(i) = -x(nx - i) exactly
            let x = a * (2 * i as i64 - nx as i64) as f64 / nx as f64;
            let y = b * (2 * j as i64 - ny as i64) as f64 / ny as f64;
            nodes.push([x, y]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut tris = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (p00, p10, p01, p11) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
            // alternating diagonals: invariant under half and quarter turns when nx, ny are even
            if (i + j) % 2 == 0 {
                tris.push([p00, p10, p11]);
                tris.push([p00, p11, p01]);
            } else {
                tris.push([p00, p10, p01]);
                tris.push([p10, p11, p01]);
            }
        }
    }
    Mesh::new(nodes, tris)
}

/// Boundary samples of an ellipse at roughly uniform arc length; the second half is
/// the negation of the first.
fn ellipse_boundary(a: f64, b: f64, h: f64) -> Vec<[f64; 2]> {
    let fine = 8192;
    let mut cumulative = vec![0.0];
    let point = |t: f64| [a * t.cos(), b * t.sin()];
    for k in 1..=fine {
        let t0 = PI * (k - 1) as f64 / fine as f64;
        let t1 = PI * k as f64 / fine as f64;
        let last = *cumulative.last().unwrap();
        cumulative.push(last + dist(point(t0), point(t1)));
    }
    let half = cumulative[fine];
    let count = (half / h).ceil().max(3.0) as usize;
    let mut first = Vec::with_capacity(count);
    for k in 0..count {
        let s = half * k as f64 / count as f64;
        let idx = cumulative.partition_point(|&c| c < s).clamp(1, fine);
        let frac = (s - cumulative[idx - 1]) / (cumulative[idx] - cumulative[idx - 1]);
        let t = PI * (idx as f64 - 1.0 + frac) / fine as f64;
        first.push(if k == 0 { [a, 0.0] } else { point(t) });
    }
    let second: Vec<[f64; 2]> = first.iter().map(|p| [-p[0], -p[1]]).collect();
    first.extend(second);
    first
}

/// Boundary samples of a polygon. For symmetric polygons the second half is the
/// negation of the first, and the returned flag says so.
fn polygon_boundary(vertices: &[[f64; 2]], symmetric: bool, h: f64) -> (Vec<[f64; 2]>, bool) {
    let n = vertices.len();
    let sample = |range: std::ops::Range<usize>| {
        let mut out = Vec::new();
        for i in range {
            let p = vertices[i % n];
            let q = vertices[(i + 1) % n];
            let pieces = (dist(p, q) / h).ceil().max(1.0) as usize;
            for k in 0..pieces {
                let s = k as f64 / pieces as f64;
                out.push([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]);
            }
        }
        out
    };
    if symmetric && n % 2 == 0 {
        let mut first = sample(0..n / 2);
        let second: Vec<[f64; 2]> = first.iter().map(|p| [-p[0], -p[1]]).collect();
        first.extend(second);
        (first, true)
    } else {
        (sample(0..n), false)
    }
}

fn distance_to_polyline(p: [f64; 2], boundary: &[[f64; 2]]) -> f64 {
    let n = boundary.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let a = boundary[i];
        let b = boundary[(i + 1) % n];
        let e = [b[0] - a[0], b[1] - a[1]];
        let len2 = e[0] * e[0] + e[1] * e[1];
        let t = (((p[0] - a[0]) * e[0] + (p[1] - a[1]) * e[1]) / len2).clamp(0.0, 1.0);
        best = best.min(dist(p, [a[0] + t * e[0], a[1] + t * e[1]]));
    }
    best
}

/// Delaunay mesh of boundary samples plus a hexagonal interior lattice through the
/// origin, smoothed, then made exactly symmetric by keeping the triangles whose
/// centroid lies in the upper half-plane and adding their reflections.
fn unstructured_mesh(domain: &Domain2D, boundary: Vec<[f64; 2]>, paired: bool, h: f64) -> Result<Mesh> {
    let nb = boundary.len();
    let mut points = boundary.clone();
    // partner[i] is the index of -points[i] when the point set is paired
    let mut partner: Vec<usize> = (0..nb).map(|i| (i + nb / 2) % nb).collect();

    let row = h * 3f64.sqrt() / 2.0;
    let reach = points.iter().map(|p| p[0].abs().max(p[1].abs())).fold(0.0, f64::max);
    let jmax = (reach / row).ceil() as i64 + 1;
    let imax = (reach / h).ceil() as i64 + jmax + 1;
    let keep = |p: [f64; 2]| domain.contains(p) && distance_to_polyline(p, &boundary) >= 0.55 * h;
    if keep([0.0, 0.0]) {
        points.push([0.0, 0.0]);
        partner.push(points.len() - 1);
    }
    for j in 0..=jmax {
        for i in -imax..=imax {
            if j == 0 && i <= 0 {
                continue;
            }
            let p = [(i as f64 + 0.5 * j as f64) * h, j as f64 * row];
            if !keep(p) {
                continue;
            }
            let q = [-p[0], -p[1]];
            if paired && keep(q) {
                let k = points.len();
                points.push(p);
                points.push(q);
                partner.push(k + 1);
                partner.push(k);
            } else if !paired {
                points.push(p);
                partner.push(usize::MAX);
                if keep(q) {
                    points.push(q);
                    partner.push(usize::MAX);
                }
            }
        }
    }

    let inside_tris = |points: &[[f64; 2]]| -> Vec<[usize; 3]> {
        triangulate(points)
            .into_iter()
            .filter(|t| {
                let c = [
                    (points[t[0]][0] + points[t[1]][0] + points[t[2]][0]) / 3.0,
                    (points[t[0]][1] + points[t[1]][1] + points[t[2]][1]) / 3.0,
                ];
                domain.contains(c) && signed_area(points[t[0]], points[t[1]], points[t[2]]) > 1e-14 * h * h
            })
            .collect()
    };

    let mut tris = inside_tris(&points);
    for _ in 0..SMOOTHING_PASSES {
        let mut sum = vec![[0.0; 2]; points.len()];
        let mut deg = vec![0usize; points.len()];
        for t in &tris {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                for (u, v) in [(a, b), (b, a)] {
                    sum[u][0] += points[v][0];
                    sum[u][1] += points[v][1];
                    deg[u] += 1;
                }
            }
        }
        let mut moved = points.clone();
        for i in nb..points.len() {
            if deg[i] > 0 {
                let target = [sum[i][0] / deg[i] as f64, sum[i][1] / deg[i] as f64];
                if domain.contains(target) {
                    moved[i] = target;
                }
            }
        }
        if paired {
            for i in nb..points.len() {
                let j = partner[i];
                if i <= j {
                    let p = [(moved[i][0] - moved[j][0]) / 2.0, (moved[i][1] - moved[j][1]) / 2.0];
                    moved[i] = p;
                    moved[j] = [-p[0], -p[1]];
                }
            }
        }
        points = moved;
        tris = inside_tris(&points);
    }

    if paired {
        let mut symmetric = Vec::with_capacity(tris.len());
        for t in &tris {
            let cx = points[t[0]][0] + points[t[1]][0] + points[t[2]][0];
            let cy = points[t[0]][1] + points[t[1]][1] + points[t[2]][1];
            if cy > 0.0 || (cy == 0.0 && cx > 0.0) {
                symmetric.push(*t);
                symmetric.push([partner[t[0]], partner[t[1]], partner[t[2]]]);
            }
        }
        tris = symmetric;
    }

    let mesh = Mesh::new(points, tris);
    mesh.validate()?;
    let hull = polygon_signed_area(&boundary);
    if (mesh.area() - hull).abs() > 1e-9 * hull {
        return Err(Error::Mesh(format!("triangulation covers area {} but the boundary encloses {hull}", mesh.area())));
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zipper_counts() {
        let m = disk_mesh(1.0, 0.25);
        // 1 + 3N(N+1) nodes and 6N² triangles
        assert_eq!(m.nodes.len(), 1 + 3 * 4 * 5);
        assert_eq!(m.triangles.len(), 6 * 16);
        m.validate().unwrap();
        assert!((m.area() - PI).abs() < 0.1);
    }

    #[test]
    fn text_round_trip() {
        let m = rectangle_mesh(1.0, 0.5, 0.25);
        let back = Mesh::from_text(&m.to_text()).unwrap();
        assert_eq!(back, m);
        assert!(matches!(Mesh::from_text("2\n0 0\n1 1\n1\n0 1 5\n"), Err(Error::Parse(_))));
        assert!(matches!(Mesh::from_text("1\n0 zero\n"), Err(Error::Parse(_))));
    }

    #[test]
    fn locator_finds_vertices_and_rejects_outside() {
        let m = disk_mesh(1.0, 0.2);
        let loc = MeshLocator::new(&m);
        for (i, p) in m.nodes.iter().enumerate().step_by(7) {
            let (t, l) = loc.locate(*p).unwrap();
            let k = m.triangles[t].iter().position(|&v| v == i).unwrap();
            assert!((l[k] - 1.0).abs() < 1e-12);
        }
        assert!(loc.locate([2.0, 0.0]).is_none());
    }
}
