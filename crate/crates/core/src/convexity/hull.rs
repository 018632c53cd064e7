//! Convex hulls of point samples with exact orientation predicates.

use std::collections::HashMap;

use robust::{orient2d, orient3d, Coord, Coord3D};

use crate::error::{Error, Result};
use crate::tangent::Vec3;

/// A hull facet: an edge (n=1, third index unused) or a triangle (n=2),
/// counter-clockwise seen from outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Facet {
    pub vertices: [usize; 3],
    /// Outward unit normal.
    pub normal: Vec3,
    /// normal · x on the facet plane.
    pub offset: f64,
}

impl Facet {
    /// Signed distance from `p` to the facet plane, positive inside.
    pub fn depth(&self, p: &Vec3) -> f64 {
        self.offset - self.normal.dot(p)
    }
}

#[derive(Debug, Clone)]
pub struct Hull {
    pub dimension: usize,
    /// Indices of input points that are hull vertices, ascending.
    pub vertices: Vec<usize>,
    pub facets: Vec<Facet>,
}

impl Hull {
    pub fn is_vertex(&self, i: usize) -> bool {
        self.vertices.binary_search(&i).is_ok()
    }

    /// Distance from an interior point to the hull boundary (0 outside).
    pub fn depth(&self, p: &Vec3) -> f64 {
        self.facets
            .iter()
            .map(|f| f.depth(p))
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
    }
}

fn c2(p: &Vec3) -> Coord<f64> {
    Coord { x: p.x, y: p.y }
}

fn c3(p: &Vec3) -> Coord3D<f64> {
    Coord3D {
        x: p.x,
        y: p.y,
        z: p.z,
    }
}

/// Exact sign of the turn a → b → c in the xy-plane (positive = left turn).
pub fn turn(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    orient2d(c2(a), c2(b), c2(c))
}

pub fn hull(dimension: usize, points: &[Vec3]) -> Result<Hull> {
    match dimension {
        1 => hull_2d(points),
        2 => hull_3d(points),
        _ => Err(Error::Unsupported(format!("hull in dimension {dimension}"))),
    }
}

/// Monotone chain; collinear points are not vertices.
pub fn hull_2d(points: &[Vec3]) -> Result<Hull> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .x
            .total_cmp(&points[b].x)
            .then(points[a].y.total_cmp(&points[b].y))
    });
    order.dedup_by(|a, b| points[*a].x == points[*b].x && points[*a].y == points[*b].y);
    if order.len() < 3 {
        return Err(Error::DegenerateHull("fewer than three distinct points".into()));
    }
    let mut chain: Vec<usize> = Vec::with_capacity(order.len() + 1);
    let build = |seq: &mut dyn Iterator<Item = usize>, chain: &mut Vec<usize>, floor: usize| {
        for i in seq {
            while chain.len() >= floor + 2
                && turn(&points[chain[chain.len() - 2]], &points[chain[chain.len() - 1]], &points[i]) <= 0.0
            {
                chain.pop();
            }
            chain.push(i);
        }
    };
    build(&mut order.iter().copied(), &mut chain, 0);
    let lower = chain.len();
    build(&mut order.iter().rev().skip(1).copied(), &mut chain, lower - 1);
    chain.pop();
    if chain.len() < 3 {
        return Err(Error::DegenerateHull("all points collinear".into()));
    }
    let k = chain.len();
    let facets = (0..k)
        .map(|j| {
            let (a, b) = (chain[j], chain[(j + 1) % k]);
            let d = points[b] - points[a];
            let normal = Vec3::new(d.y, -d.x, 0.0).normalize();
            Facet {
                vertices: [a, b, usize::MAX],
                normal,
                offset: normal.dot(&points[a]),
            }
        })
        .collect();
    chain.sort_unstable();
    Ok(Hull {
        dimension: 1,
        vertices: chain,
        facets,
    })
}

struct Face {
    v: [usize; 3],
    alive: bool,
    outside: Vec<usize>,
}

/// Incremental hull with conflict lists (quickhull order).
pub fn hull_3d(points: &[Vec3]) -> Result<Hull> {
    let n = points.len();
    if n < 4 {
        return Err(Error::DegenerateHull("fewer than four points".into()));
    }
    let orient = |a: usize, b: usize, c: usize, p: &Vec3| orient3d(c3(&points[a]), c3(&points[b]), c3(&points[c]), c3(p));

    // initial tetrahedron
    let by = |key: &dyn Fn(&Vec3) -> f64| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| key(&points[a]).total_cmp(&key(&points[b])));
        idx
    };
    let xs = by(&|p| p.x);
    let i0 = xs[0];
    let i1 = (0..n)
        .max_by(|&a, &b| (points[a] - points[i0]).norm().total_cmp(&(points[b] - points[i0]).norm()))
        .unwrap();
    let line = points[i1] - points[i0];
    let i2 = (0..n)
        .max_by(|&a, &b| {
            let da = line.cross(&(points[a] - points[i0])).norm();
            let db = line.cross(&(points[b] - points[i0])).norm();
            da.total_cmp(&db)
        })
        .unwrap();
    let i3 = (0..n)
        .max_by(|&a, &b| orient(i0, i1, i2, &points[a]).abs().total_cmp(&orient(i0, i1, i2, &points[b]).abs()))
        .unwrap();
    if orient(i0, i1, i2, &points[i3]) == 0.0 {
        return Err(Error::DegenerateHull("all points coplanar".into()));
    }
    let interior = (points[i0] + points[i1] + points[i2] + points[i3]) / 4.0;
    let mut faces: Vec<Face> = Vec::new();
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    let add_face = |faces: &mut Vec<Face>, edges: &mut HashMap<(usize, usize), usize>, v: [usize; 3]| {
        let id = faces.len();
        for k in 0..3 {
            edges.insert((v[k], v[(k + 1) % 3]), id);
        }
        faces.push(Face {
            v,
            alive: true,
            outside: Vec::new(),
        });
        id
    };
    for [a, b, c] in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        let v = if orient(a, b, c, &interior) > 0.0 { [a, b, c] } else { [a, c, b] };
        add_face(&mut faces, &mut edges, v);
    }
    let used = [i0, i1, i2, i3];
    for p in 0..n {
        if used.contains(&p) {
            continue;
        }
        if let Some(f) = (0..4).find(|&f| {
            let v = faces[f].v;
            orient(v[0], v[1], v[2], &points[p]) < 0.0
        }) {
            faces[f].outside.push(p);
        }
    }

    let height = |v: [usize; 3], p: &Vec3| {
        let nrm = (points[v[1]] - points[v[0]]).cross(&(points[v[2]] - points[v[0]]));
        nrm.dot(&(p - points[v[0]]))
    };
    let mut cursor = 0;
    while cursor < faces.len() {
        if !faces[cursor].alive || faces[cursor].outside.is_empty() {
            cursor += 1;
            continue;
        }
        let fv = faces[cursor].v;
        let apex = *faces[cursor]
            .outside
            .iter()
            .max_by(|&&a, &&b| height(fv, &points[a]).total_cmp(&height(fv, &points[b])))
            .unwrap();
        let p = points[apex];
        // visible region by flood fill
        let mut visible = vec![cursor];
        let mut seen = std::collections::HashSet::from([cursor]);
        let mut k = 0;
        while k < visible.len() {
            let v = faces[visible[k]].v;
            for e in 0..3 {
                let twin = edges[&(v[(e + 1) % 3], v[e])];
                if seen.insert(twin) {
                    let w = faces[twin].v;
                    if orient(w[0], w[1], w[2], &p) < 0.0 {
                        visible.push(twin);
                    }
                }
            }
            k += 1;
        }
        let vis_set: std::collections::HashSet<usize> = visible.iter().copied().collect();
        let mut horizon = Vec::new();
        let mut orphans = Vec::new();
        for &f in &visible {
            let v = faces[f].v;
            for e in 0..3 {
                let (a, b) = (v[e], v[(e + 1) % 3]);
                if !vis_set.contains(&edges[&(b, a)]) {
                    horizon.push((a, b));
                }
            }
            faces[f].alive = false;
            orphans.append(&mut faces[f].outside);
        }
        for &f in &visible {
            let v = faces[f].v;
            for e in 0..3 {
                let key = (v[e], v[(e + 1) % 3]);
                if edges.get(&key) == Some(&f) {
                    edges.remove(&key);
                }
            }
        }
        let new_faces: Vec<usize> = horizon
            .iter()
            .map(|&(a, b)| add_face(&mut faces, &mut edges, [a, b, apex]))
            .collect();
        for q in orphans {
            if q == apex {
                continue;
            }
            if let Some(&f) = new_faces.iter().find(|&&f| {
                let v = faces[f].v;
                orient(v[0], v[1], v[2], &points[q]) < 0.0
            }) {
                faces[f].outside.push(q);
            }
        }
    }

    let mut vertices = Vec::new();
    let facets: Vec<Facet> = faces
        .iter()
        .filter(|f| f.alive)
        .map(|f| {
            vertices.extend_from_slice(&f.v);
            let [a, b, c] = f.v;
            let normal = (points[b] - points[a]).cross(&(points[c] - points[a])).normalize();
            Facet {
                vertices: f.v,
                normal,
                offset: normal.dot(&points[a]),
            }
        })
        .collect();
    vertices.sort_unstable();
    vertices.dedup();
    Ok(Hull {
        dimension: 2,
        vertices,
        facets,
    })
}
