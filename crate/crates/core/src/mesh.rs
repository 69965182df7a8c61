//! Triangle meshes with region tags and the cotangent mean curvature.

use std::collections::HashMap;

use nalgebra::{Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type EdgeMap = HashMap<(usize, usize), Vec<(usize, usize, usize)>>;

pub type Vec3 = Vector3<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionTag {
    Delaunay,
    Base,
    Collar,
}

/// Faces are counterclockwise seen from the side `vertex_normals` point to.
#[derive(Debug, Clone, Default)]
pub struct SurfaceMesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[usize; 3]>,
    pub vertex_normals: Vec<Vec3>,
    pub region_tags: Vec<RegionTag>,
}

impl SurfaceMesh {
    pub fn new(
        vertices: Vec<Vec3>,
        faces: Vec<[usize; 3]>,
        vertex_normals: Vec<Vec3>,
        region_tags: Vec<RegionTag>,
    ) -> Result<Self> {
        let m = Self {
            vertices,
            faces,
            vertex_normals,
            region_tags,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Index bounds, per-vertex array lengths and nonzero face areas.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if self.vertex_normals.len() != n || self.region_tags.len() != n {
            return Err(Error::InvalidGrid(format!(
                "{} vertices but {} normals and {} tags",
                n,
                self.vertex_normals.len(),
                self.region_tags.len()
            )));
        }
        for (k, f) in self.faces.iter().enumerate() {
            if f.iter().any(|&i| i >= n) {
                return Err(Error::InvalidGrid(format!(
                    "face {k} indexes past {n} vertices"
                )));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::InvalidGrid(format!("face {k} repeats a vertex")));
            }
            if self.face_area(k) <= 0.0 {
                return Err(Error::InvalidGrid(format!("face {k} has zero area")));
            }
        }
        Ok(())
    }

    pub fn face_area(&self, k: usize) -> f64 {
        let [a, b, c] = self.faces[k];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        0.5 * (pb - pa).cross(&(pc - pa)).norm()
    }

    /// Disjoint union; the other mesh's indices are shifted.
    pub fn append(&mut self, other: &SurfaceMesh) {
        let off = self.vertices.len();
        self.vertices.extend_from_slice(&other.vertices);
        self.vertex_normals.extend_from_slice(&other.vertex_normals);
        self.region_tags.extend_from_slice(&other.region_tags);
        self.faces.extend(
            other
                .faces
                .iter()
                .map(|f| [f[0] + off, f[1] + off, f[2] + off]),
        );
    }

    pub fn rigid_motion(&mut self, rot: &Rotation3<f64>, shift: &Vec3) {
        for v in &mut self.vertices {
            *v = rot * *v + shift;
        }
        for n in &mut self.vertex_normals {
            *n = rot * *n;
        }
    }

    /// Undirected edge -> list of (face, directed edge as stored).
    fn edge_faces(&self) -> EdgeMap {
        let mut map = EdgeMap::new();
        for (k, f) in self.faces.iter().enumerate() {
            for e in 0..3 {
                let (a, b) = (f[e], f[(e + 1) % 3]);
                map.entry((a.min(b), a.max(b))).or_default().push((k, a, b));
            }
        }
        map
    }

    /// True for vertices on a boundary edge (an edge with a single face).
    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut flag = vec![false; self.vertices.len()];
        for (&(a, b), fs) in &self.edge_faces() {
            if fs.len() == 1 {
                flag[a] = true;
                flag[b] = true;
            }
        }
        flag
    }

    /// Edge manifoldness, consistent orientation and single-fan vertex links.
    pub fn check_manifold(&self) -> Result<()> {
        let edges = self.edge_faces();
        for (&(a, b), fs) in &edges {
            if fs.len() > 2 {
                return Err(Error::NonManifold(format!(
                    "edge ({a}, {b}) shared by {} faces",
                    fs.len()
                )));
            }
            if fs.len() == 2 && fs[0].1 == fs[1].1 {
                return Err(Error::NonManifold(format!(
                    "faces {} and {} disagree in orientation along ({a}, {b})",
                    fs[0].0, fs[1].0
                )));
            }
        }
        // each vertex: incident faces connected through shared edges at that vertex
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); self.vertices.len()];
        for (k, f) in self.faces.iter().enumerate() {
            for &v in f {
                incident[v].push(k);
            }
        }
        for (v, fs) in incident.iter().enumerate() {
            if fs.len() <= 1 {
                continue;
            }
            let mut seen = vec![false; fs.len()];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(i) = stack.pop() {
                for &w in self.faces[fs[i]].iter().filter(|&&w| w != v) {
                    for &(g, _, _) in &edges[&(v.min(w), v.max(w))] {
                        if let Some(j) = fs.iter().position(|&x| x == g) {
                            if !seen[j] {
                                seen[j] = true;
                                stack.push(j);
                            }
                        }
                    }
                }
            }
            if seen.iter().any(|s| !s) {
                return Err(Error::NonManifold(format!(
                    "vertex {v} joins separate fans"
                )));
            }
        }
        Ok(())
    }
}

/// Builds a structured mesh on an `n_rows × n_cols` grid that is periodic in
/// the column index. `point(i, j)` returns position and normal.
/// `flip` reverses the winding.
pub fn periodic_grid<F>(
    n_rows: usize,
    n_cols: usize,
    flip: bool,
    tag: RegionTag,
    point: F,
) -> SurfaceMesh
where
    F: Fn(usize, usize) -> (Vec3, Vec3) + Sync,
{
    use rayon::prelude::*;
    let rows: Vec<Vec<(Vec3, Vec3)>> = (0..n_rows)
        .into_par_iter()
        .map(|i| (0..n_cols).map(|j| point(i, j)).collect())
        .collect();
    let mut vertices = Vec::with_capacity(n_rows * n_cols);
    let mut normals = Vec::with_capacity(n_rows * n_cols);
    for row in rows {
        for (p, n) in row {
            vertices.push(p);
            normals.push(n);
        }
    }
    let idx = |i: usize, j: usize| i * n_cols + (j % n_cols);
    let mut faces = Vec::with_capacity(2 * (n_rows - 1) * n_cols);
    for i in 0..n_rows.saturating_sub(1) {
        for j in 0..n_cols {
            let (a, b, c, d) = (idx(i, j), idx(i, j + 1), idx(i + 1, j + 1), idx(i + 1, j));
            if flip {
                faces.push([a, c, b]);
                faces.push([a, d, c]);
            } else {
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            }
        }
    }
    let n = vertices.len();
    SurfaceMesh {
        vertices,
        faces,
        vertex_normals: normals,
        region_tags: vec![tag; n],
    }
}

/// Subdivided icosahedron projected to the sphere of the given radius,
/// outward normals.
pub fn icosphere(subdivisions: u32, radius: f64) -> SurfaceMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Vec3> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|p| Vec3::new(p[0], p[1], p[2]).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<Vec3>| -> usize {
            *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                verts.push((verts[a] + verts[b]).normalize());
                verts.len() - 1
            })
        };
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    let n = verts.len();
    SurfaceMesh {
        vertex_normals: verts.clone(),
        vertices: verts.into_iter().map(|v| v * radius).collect(),
        faces,
        region_tags: vec![RegionTag::Base; n],
    }
}

#[derive(Debug, Clone)]
pub struct DiscreteCurvature {
    /// Mean curvature per vertex (average of principal curvatures).
    pub h: Vec<f64>,
    /// Boundary vertices; their values are not reliable.
    pub boundary: Vec<bool>,
}

impl DiscreteCurvature {
    /// Largest `|H - target|` over non-boundary vertices accepted by `keep`.
    pub fn max_interior_error<F: Fn(usize) -> bool>(&self, target: f64, keep: F) -> f64 {
        self.h
            .iter()
            .enumerate()
            .filter(|&(i, _)| !self.boundary[i] && keep(i))
            .map(|(_, h)| (h - target).abs())
            .fold(0.0, f64::max)
    }
}

fn cot(u: &Vec3, v: &Vec3) -> f64 {
    u.dot(v) / u.cross(v).norm()
}

/// Cotangent Laplacian with mixed Voronoi areas. The sign comes from the
/// stored vertex normals: a sphere with outward normals gets `H = 1/R`.
pub fn discrete_mean_curvature(mesh: &SurfaceMesh) -> Result<DiscreteCurvature> {
    mesh.check_manifold()?;
    let n = mesh.vertices.len();
    let mut lap = vec![Vec3::zeros(); n];
    let mut area = vec![0.0; n];
    for f in &mesh.faces {
        let p = [
            mesh.vertices[f[0]],
            mesh.vertices[f[1]],
            mesh.vertices[f[2]],
        ];
        let tri_area = 0.5 * (p[1] - p[0]).cross(&(p[2] - p[0])).norm();
        let mut cots = [0.0; 3];
        let mut obtuse = None;
        for k in 0..3 {
            let (a, b, c) = (p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
            cots[k] = cot(&(b - a), &(c - a));
            if (b - a).dot(&(c - a)) < 0.0 {
                obtuse = Some(k);
            }
        }
        for k in 0..3 {
            // edge opposite corner k joins the other two corners
            let (i, j) = (f[(k + 1) % 3], f[(k + 2) % 3]);
            let d = mesh.vertices[j] - mesh.vertices[i];
            lap[i] += cots[k] * d;
            lap[j] -= cots[k] * d;
        }
        for k in 0..3 {
            let a = match obtuse {
                None => {
                    let (b, c) = ((k + 1) % 3, (k + 2) % 3);
                    let ab2 = (p[b] - p[k]).norm_squared();
                    let ac2 = (p[c] - p[k]).norm_squared();
                    (ab2 * cots[c] + ac2 * cots[b]) / 8.0
                }
                Some(o) if o == k => tri_area / 2.0,
                Some(_) => tri_area / 4.0,
            };
            area[f[k]] += a;
        }
    }
    let boundary = mesh.boundary_vertices();
    let h = (0..n)
        .map(|i| {
            if area[i] == 0.0 {
                return f64::NAN;
            }
            // lap = Σ (cot α + cot β)(x_j - x_i) = -2A · 2H n_out
            let k = -lap[i] / (2.0 * area[i]);
            let mag = 0.5 * k.norm();
            if k.dot(&mesh.vertex_normals[i]) < 0.0 {
                -mag
            } else {
                mag
            }
        })
        .collect();
    Ok(DiscreteCurvature { h, boundary })
}
