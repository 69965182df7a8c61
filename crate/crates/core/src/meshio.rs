//! ASCII OBJ and PLY writers, with small loaders for round-trip checks.
//!
//! OBJ faces are grouped (`g delaunay`, `g base`, `g collar`) by the region of
//! their first vertex; PLY carries the region as an extra `uchar region`
//! vertex property.

use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mesh::{RegionTag, SurfaceMesh, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Ply,
}

impl FromStr for MeshFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Ok(Self::Obj),
            "ply" => Ok(Self::Ply),
            other => Err(Error::InvalidParameter(format!(
                "unknown mesh format '{other}'"
            ))),
        }
    }
}

fn tag_name(t: RegionTag) -> &'static str {
    match t {
        RegionTag::Delaunay => "delaunay",
        RegionTag::Base => "base",
        RegionTag::Collar => "collar",
    }
}

fn tag_code(t: RegionTag) -> u8 {
    match t {
        RegionTag::Delaunay => 0,
        RegionTag::Base => 1,
        RegionTag::Collar => 2,
    }
}

fn tag_from_code(c: u8) -> Result<RegionTag> {
    match c {
        0 => Ok(RegionTag::Delaunay),
        1 => Ok(RegionTag::Base),
        2 => Ok(RegionTag::Collar),
        _ => Err(Error::Parse(format!("unknown region code {c}"))),
    }
}

pub fn write_obj<W: Write>(mesh: &SurfaceMesh, mut w: W) -> Result<()> {
    writeln!(
        w,
        "# vertices {} faces {}",
        mesh.vertex_count(),
        mesh.face_count()
    )?;
    for v in &mesh.vertices {
        writeln!(w, "v {} {} {}", v.x, v.y, v.z)?;
    }
    for n in &mesh.vertex_normals {
        writeln!(w, "vn {} {} {}", n.x, n.y, n.z)?;
    }
    for tag in [RegionTag::Delaunay, RegionTag::Base, RegionTag::Collar] {
        let mut group = mesh
            .faces
            .iter()
            .filter(|f| mesh.region_tags[f[0]] == tag)
            .peekable();
        if group.peek().is_none() {
            continue;
        }
        writeln!(w, "g {}", tag_name(tag))?;
        for f in group {
            let (a, b, c) = (f[0] + 1, f[1] + 1, f[2] + 1);
            writeln!(w, "f {a}//{a} {b}//{b} {c}//{c}")?;
        }
    }
    Ok(())
}

pub fn write_ply<W: Write>(mesh: &SurfaceMesh, mut w: W) -> Result<()> {
    writeln!(w, "ply")?;
    writeln!(w, "format ascii 1.0")?;
    writeln!(w, "element vertex {}", mesh.vertex_count())?;
    for p in ["x", "y", "z", "nx", "ny", "nz"] {
        writeln!(w, "property double {p}")?;
    }
    writeln!(w, "property uchar region")?;
    writeln!(w, "element face {}", mesh.face_count())?;
    writeln!(w, "property list uchar int vertex_indices")?;
    writeln!(w, "end_header")?;
    for i in 0..mesh.vertex_count() {
        let (v, n) = (mesh.vertices[i], mesh.vertex_normals[i]);
        writeln!(
            w,
            "{} {} {} {} {} {} {}",
            v.x,
            v.y,
            v.z,
            n.x,
            n.y,
            n.z,
            tag_code(mesh.region_tags[i])
        )?;
    }
    for f in &mesh.faces {
        writeln!(w, "3 {} {} {}", f[0], f[1], f[2])?;
    }
    Ok(())
}

pub fn export_mesh(mesh: &SurfaceMesh, format: MeshFormat) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match format {
        MeshFormat::Obj => write_obj(mesh, &mut buf)?,
        MeshFormat::Ply => write_ply(mesh, &mut buf)?,
    }
    Ok(buf)
}

pub fn save_mesh(mesh: &SurfaceMesh, path: &Path, format: MeshFormat) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    match format {
        MeshFormat::Obj => write_obj(mesh, &mut w)?,
        MeshFormat::Ply => write_ply(mesh, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn parse_f(tok: Option<&str>, line: usize) -> Result<f64> {
    tok.ok_or_else(|| Error::Parse(format!("line {line}: missing number")))?
        .parse()
        .map_err(|e| Error::Parse(format!("line {line}: {e}")))
}

fn parse_vec(it: &mut std::str::SplitWhitespace, line: usize) -> Result<Vec3> {
    Ok(Vec3::new(
        parse_f(it.next(), line)?,
        parse_f(it.next(), line)?,
        parse_f(it.next(), line)?,
    ))
}

pub fn read_obj(text: &str) -> Result<SurfaceMesh> {
    let mut vertices = Vec::new();
    let mut normals = Vec::new();
    let mut faces = Vec::new();
    let mut face_tags = Vec::new();
    let mut current = RegionTag::Base;
    for (ln, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => vertices.push(parse_vec(&mut it, ln + 1)?),
            Some("vn") => normals.push(parse_vec(&mut it, ln + 1)?),
            Some("g") => {
                current = match it.next() {
                    Some("delaunay") => RegionTag::Delaunay,
                    Some("collar") => RegionTag::Collar,
                    _ => RegionTag::Base,
                }
            }
            Some("f") => {
                let idx: Vec<usize> = it
                    .map(|t| {
                        t.split('/')
                            .next()
                            .and_then(|x| x.parse::<usize>().ok())
                            .filter(|&x| x >= 1)
                            .map(|x| x - 1)
                            .ok_or_else(|| Error::Parse(format!("line {}: bad face index", ln + 1)))
                    })
                    .collect::<Result<_>>()?;
                if idx.len() != 3 {
                    return Err(Error::Parse(format!(
                        "line {}: only triangles supported",
                        ln + 1
                    )));
                }
                faces.push([idx[0], idx[1], idx[2]]);
                face_tags.push(current);
            }
            _ => {}
        }
    }
    if normals.is_empty() {
        normals = vec![Vec3::zeros(); vertices.len()];
    }
    let mut tags = vec![None; vertices.len()];
    for (f, t) in faces.iter().zip(&face_tags) {
        if let Some(slot) = tags.get_mut(f[0]) {
            slot.get_or_insert(*t);
        }
    }
    let tags = tags
        .into_iter()
        .map(|t| t.unwrap_or(RegionTag::Base))
        .collect();
    SurfaceMesh::new(vertices, faces, normals, tags)
}

pub fn read_ply(text: &str) -> Result<SurfaceMesh> {
    let mut lines = text.lines().enumerate();
    if lines.next().map(|l| l.1.trim()) != Some("ply") {
        return Err(Error::Parse("missing ply magic".into()));
    }
    let (mut nv, mut nf) = (0usize, 0usize);
    for (ln, line) in lines.by_ref() {
        let mut it = line.split_whitespace();
        match (it.next(), it.next()) {
            (Some("format"), Some(f)) if f != "ascii" => {
                return Err(Error::Parse(format!("line {}: only ascii PLY", ln + 1)))
            }
            (Some("element"), Some("vertex")) => nv = parse_f(it.next(), ln + 1)? as usize,
            (Some("element"), Some("face")) => nf = parse_f(it.next(), ln + 1)? as usize,
            (Some("end_header"), _) => break,
            _ => {}
        }
    }
    let mut vertices = Vec::with_capacity(nv);
    let mut normals = Vec::with_capacity(nv);
    let mut tags = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| Error::Parse("truncated vertex list".into()))?;
        let mut it = line.split_whitespace();
        vertices.push(parse_vec(&mut it, ln + 1)?);
        normals.push(parse_vec(&mut it, ln + 1)?);
        tags.push(match it.next() {
            Some(c) => tag_from_code(
                c.parse()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", ln + 1)))?,
            )?,
            None => RegionTag::Base,
        });
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| Error::Parse("truncated face list".into()))?;
        let v: Vec<usize> = line
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", ln + 1)))
            })
            .collect::<Result<_>>()?;
        if v.len() != 4 || v[0] != 3 {
            return Err(Error::Parse(format!(
                "line {}: only triangles supported",
                ln + 1
            )));
        }
        faces.push([v[1], v[2], v[3]]);
    }
    SurfaceMesh::new(vertices, faces, normals, tags)
}
