//! Lower envelope of a height field on an `n x n` lattice from the lower
//! facets of the 3-D convex hull of its graph points (quickhull).

use std::collections::HashMap;

/// Coplanarity tolerance on coordinates scaled into the unit cube.
pub(crate) const HULL_EPS: f64 = 1e-10;

type P3 = [f64; 3];

#[inline]
fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
fn cross(a: P3, b: P3) -> P3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
fn dot(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn norm(a: P3) -> f64 {
    dot(a, a).sqrt()
}

struct Face {
    v: [u32; 3],
    normal: P3,
    offset: f64,
    outside: Vec<u32>,
    alive: bool,
    stamp: u32,
}

impl Face {
    #[inline]
    fn dist(&self, p: P3) -> f64 {
        dot(self.normal, p) - self.offset
    }
}

/// Facets of a 3-D convex hull as triples of point indices, oriented with
/// outward normals.
pub(crate) struct Hull {
    pub(crate) faces: Vec<([u32; 3], P3)>,
}

struct Builder<'a> {
    pts: &'a [P3],
    faces: Vec<Face>,
    edges: HashMap<(u32, u32), u32>,
    stamp: u32,
}

impl<'a> Builder<'a> {
    fn add_face(&mut self, v: [u32; 3]) -> u32 {
        let [a, b, c] = v.map(|k| self.pts[k as usize]);
        let nrm = cross(sub(b, a), sub(c, a));
        let len = norm(nrm);
        let normal = if len > 0.0 {
            [nrm[0] / len, nrm[1] / len, nrm[2] / len]
        } else {
            [0.0, 0.0, 0.0]
        };
        let id = self.faces.len() as u32;
        self.faces.push(Face {
            v,
            normal,
            offset: dot(normal, a),
            outside: Vec::new(),
            alive: true,
            stamp: 0,
        });
        for k in 0..3 {
            self.edges.insert((v[k], v[(k + 1) % 3]), id);
        }
        id
    }

    fn kill_face(&mut self, id: u32) {
        let v = self.faces[id as usize].v;
        self.faces[id as usize].alive = false;
        for k in 0..3 {
            let e = (v[k], v[(k + 1) % 3]);
            if self.edges.get(&e) == Some(&id) {
                self.edges.remove(&e);
            }
        }
    }

    /// Assigns each candidate to the new face it lies farthest outside of.
    fn assign(&mut self, candidates: &[u32], targets: &[u32]) {
        for &p in candidates {
            let pt = self.pts[p as usize];
            let mut best = None;
            let mut best_d = HULL_EPS;
            for &f in targets {
                let d = self.faces[f as usize].dist(pt);
                if d > best_d {
                    best_d = d;
                    best = Some(f);
                }
            }
            if let Some(f) = best {
                self.faces[f as usize].outside.push(p);
            }
        }
    }
}

fn initial_simplex(pts: &[P3]) -> Option<[u32; 4]> {
    let n = pts.len();
    if n < 4 {
        return None;
    }
    // farthest pair among the axis extremes
    let mut ext = [0usize; 6];
    for (k, p) in pts.iter().enumerate() {
        for ax in 0..3 {
            if p[ax] < pts[ext[2 * ax]][ax] {
                ext[2 * ax] = k;
            }
            if p[ax] > pts[ext[2 * ax + 1]][ax] {
                ext[2 * ax + 1] = k;
            }
        }
    }
    let (mut a, mut b, mut best) = (0, 0, -1.0);
    for &i in &ext {
        for &j in &ext {
            let d = norm(sub(pts[i], pts[j]));
            if d > best {
                best = d;
                a = i;
                b = j;
            }
        }
    }
    if best <= HULL_EPS {
        return None;
    }
    let dir = sub(pts[b], pts[a]);
    let (mut c, mut best) = (0, -1.0);
    for (k, p) in pts.iter().enumerate() {
        let d = norm(cross(dir, sub(*p, pts[a])));
        if d > best {
            best = d;
            c = k;
        }
    }
    if best / norm(dir) <= HULL_EPS {
        return None;
    }
    let nrm = cross(dir, sub(pts[c], pts[a]));
    let len = norm(nrm);
    let (mut d_idx, mut best) = (0, -1.0);
    for (k, p) in pts.iter().enumerate() {
        let d = (dot(nrm, sub(*p, pts[a])) / len).abs();
        if d > best {
            best = d;
            d_idx = k;
        }
    }
    if best <= HULL_EPS {
        return None;
    }
    Some([a as u32, b as u32, c as u32, d_idx as u32])
}

/// Quickhull. Returns `None` when the points are coplanar within tolerance.
pub(crate) fn convex_hull(pts: &[P3]) -> Option<Hull> {
    let [a, b, c, d] = initial_simplex(pts)?;
    let mut bld = Builder {
        pts,
        faces: Vec::new(),
        edges: HashMap::new(),
        stamp: 0,
    };
    // orient (a, b, c) so that d lies below it
    let nrm = cross(sub(pts[b as usize], pts[a as usize]), sub(pts[c as usize], pts[a as usize]));
    let (b, c) = if dot(nrm, sub(pts[d as usize], pts[a as usize])) > 0.0 {
        (c, b)
    } else {
        (b, c)
    };
    let init = [
        bld.add_face([a, b, c]),
        bld.add_face([b, a, d]),
        bld.add_face([c, b, d]),
        bld.add_face([a, c, d]),
    ];
    let rest: Vec<u32> = (0..pts.len() as u32)
        .filter(|k| ![a, b, c, d].contains(k))
        .collect();
    bld.assign(&rest, &init);

    let mut stack: Vec<u32> = init.to_vec();
    while let Some(fid) = stack.pop() {
        let face = &bld.faces[fid as usize];
        if !face.alive || face.outside.is_empty() {
            continue;
        }
        let eye = *face
            .outside
            .iter()
            .max_by(|&&p, &&q| {
                face.dist(pts[p as usize])
                    .partial_cmp(&face.dist(pts[q as usize]))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        let eye_pt = pts[eye as usize];

        // faces visible from the eye, grown from the seed face
        bld.stamp += 1;
        let stamp = bld.stamp;
        let mut visible = vec![fid];
        bld.faces[fid as usize].stamp = stamp;
        let mut horizon: Vec<(u32, u32)> = Vec::new();
        let mut k = 0;
        while k < visible.len() {
            let f = visible[k];
            k += 1;
            let v = bld.faces[f as usize].v;
            for e in 0..3 {
                let (p, q) = (v[e], v[(e + 1) % 3]);
                let Some(&nb) = bld.edges.get(&(q, p)) else {
                    continue;
                };
                if bld.faces[nb as usize].stamp == stamp {
                    continue;
                }
                if bld.faces[nb as usize].dist(eye_pt) > HULL_EPS {
                    bld.faces[nb as usize].stamp = stamp;
                    visible.push(nb);
                }
            }
        }
        for &f in &visible {
            let v = bld.faces[f as usize].v;
            for e in 0..3 {
                let (p, q) = (v[e], v[(e + 1) % 3]);
                match bld.edges.get(&(q, p)) {
                    Some(&nb) if bld.faces[nb as usize].stamp == stamp => {}
                    _ => horizon.push((p, q)),
                }
            }
        }
        let mut orphans: Vec<u32> = Vec::new();
        for &f in &visible {
            orphans.append(&mut bld.faces[f as usize].outside);
            bld.kill_face(f);
        }
        let new_faces: Vec<u32> = horizon
            .iter()
            .map(|&(p, q)| bld.add_face([p, q, eye]))
            .collect();
        orphans.retain(|&p| p != eye);
        bld.assign(&orphans, &new_faces);
        stack.extend(new_faces.iter().copied());
    }

    Some(Hull {
        faces: bld
            .faces
            .into_iter()
            .filter(|f| f.alive)
            .map(|f| (f.v, f.normal))
            .collect(),
    })
}

#[inline]
fn orient(p: (i64, i64), q: (i64, i64), r: (i64, i64)) -> i64 {
    (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0)
}

pub(crate) fn lower_envelope(n: usize, f: &[f64]) -> Vec<f64> {
    let (lo, hi) = f
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let range = hi - lo;
    if range <= 0.0 {
        return f.to_vec();
    }
    let scale = 1.0 / (n - 1) as f64;
    let pts: Vec<P3> = (0..n * n)
        .map(|k| {
            [
                (k / n) as f64 * scale,
                (k % n) as f64 * scale,
                (f[k] - lo) / range,
            ]
        })
        .collect();
    let Some(hull) = convex_hull(&pts) else {
        // coplanar samples are their own envelope
        return f.to_vec();
    };
    let ij = |k: u32| ((k as usize / n) as i64, (k as usize % n) as i64);

    let mut env = vec![f64::NEG_INFINITY; n * n];
    let mut planes: Vec<([u32; 3], i64)> = Vec::new();
    for (v, normal) in &hull.faces {
        if normal[2] >= 0.0 {
            continue;
        }
        let (p0, p1, p2) = (ij(v[0]), ij(v[1]), ij(v[2]));
        let area = orient(p0, p1, p2);
        if area == 0 {
            continue;
        }
        planes.push((*v, area));
        let (z0, z1, z2) = (f[v[0] as usize], f[v[1] as usize], f[v[2] as usize]);
        let (imin, imax) = (p0.0.min(p1.0).min(p2.0), p0.0.max(p1.0).max(p2.0));
        let (jmin, jmax) = (p0.1.min(p1.1).min(p2.1), p0.1.max(p1.1).max(p2.1));
        let sign = area.signum();
        for i in imin..=imax {
            for j in jmin..=jmax {
                let p = (i, j);
                let w0 = orient(p1, p2, p) * sign;
                let w1 = orient(p2, p0, p) * sign;
                let w2 = orient(p0, p1, p) * sign;
                if w0 < 0 || w1 < 0 || w2 < 0 {
                    continue;
                }
                let total = (w0 + w1 + w2) as f64;
                let val = (w0 as f64 * z0 + w1 as f64 * z1 + w2 as f64 * z2) / total;
                let k = i as usize * n + j as usize;
                if val > env[k] {
                    env[k] = val;
                }
            }
        }
    }
    for k in 0..n * n {
        if env[k] == f64::NEG_INFINITY {
            // not covered by any rasterized facet; use the supporting planes
            let p = ij(k as u32);
            for (v, area) in &planes {
                let (p0, p1, p2) = (ij(v[0]), ij(v[1]), ij(v[2]));
                let w0 = orient(p1, p2, p) as f64;
                let w1 = orient(p2, p0, p) as f64;
                let w2 = orient(p0, p1, p) as f64;
                let val = (w0 * f[v[0] as usize] + w1 * f[v[1] as usize] + w2 * f[v[2] as usize])
                    / *area as f64;
                env[k] = env[k].max(val);
            }
        }
        env[k] = env[k].min(f[k]);
    }
    env
}
