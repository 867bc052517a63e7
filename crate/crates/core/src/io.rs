//! Mesh files and animation frames.
//!
//! OBJ output holds `v x y z` lines at 17 significant digits, 1-based
//! `f i j k` faces and `# edge class <label> i j` comments for the labeled
//! edges, after a comment naming the tool and its parameters.

use std::fmt::Write as _;

use nalgebra::Point3;

use crate::error::{Error, Result};
use crate::geometry::{Coords, EdgeClass, LabeledEdge, Mesh};
use crate::snap::SnapResult;
use crate::sweep::fmt_f64;

pub fn write_obj(mesh: &Mesh, description: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# sandglass {} {description}", env!("CARGO_PKG_VERSION"));
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {} {} {}", fmt_f64(v.x), fmt_f64(v.y), fmt_f64(v.z));
    }
    for f in &mesh.faces {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    for e in &mesh.edges {
        let _ = writeln!(out, "# edge class {} {} {}", e.class.as_str(), e.a + 1, e.b + 1);
    }
    out
}

fn parse_index(tok: &str, count: usize, line: usize) -> Result<usize> {
    // accept `i`, `i/t` and `i/t/n`
    let head = tok.split('/').next().unwrap_or(tok);
    let i: usize = head.parse().map_err(|_| Error::Parse(format!("line {line}: bad index {tok:?}")))?;
    if i == 0 || i > count {
        return Err(Error::Parse(format!("line {line}: index {i} out of range")));
    }
    Ok(i - 1)
}

/// Parse an OBJ written by [`write_obj`] (or any triangle OBJ). Without
/// edge annotations the edges are derived from the faces.
pub fn read_obj(text: &str) -> Result<Mesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let mut labeled = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        match toks.as_slice() {
            ["v", x, y, z, ..] => {
                let p = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("line {line}: bad number {s:?}")));
                vertices.push(Point3::new(p(x)?, p(y)?, p(z)?));
            }
            ["f", a, b, c] => {
                let n = vertices.len();
                faces.push([parse_index(a, n, line)?, parse_index(b, n, line)?, parse_index(c, n, line)?]);
            }
            ["f", ..] => return Err(Error::Parse(format!("line {line}: only triangles are supported"))),
            ["#", "edge", "class", label, a, b] => {
                let class = EdgeClass::parse(label)
                    .ok_or_else(|| Error::Parse(format!("line {line}: unknown edge class {label:?}")))?;
                labeled.push((class, *a, *b, line));
            }
            _ => {}
        }
    }
    let mut mesh = Mesh::from_faces(vertices, faces);
    if !labeled.is_empty() {
        let n = mesh.vertices.len();
        mesh.edges = labeled
            .into_iter()
            .map(|(class, a, b, line)| {
                let (a, b) = (parse_index(a, n, line)?, parse_index(b, n, line)?);
                Ok(LabeledEdge { a: a.min(b), b: a.max(b), class })
            })
            .collect::<Result<_>>()?;
    }
    Ok(mesh)
}

/// Shapes sampled uniformly by arc length along the snap path from the open
/// to the closed state; the first and last are the endpoints.
pub fn sample_path(path: &[Coords], frames: usize) -> Result<Vec<Coords>> {
    if frames < 2 {
        return Err(Error::InvalidSpec(format!("need at least 2 frames, got {frames}")));
    }
    if path.len() < 2 {
        return Err(Error::InvalidSpec("path has fewer than two nodes".into()));
    }
    let mut s = vec![0.0; path.len()];
    for k in 1..path.len() {
        s[k] = s[k - 1] + path[k].distance(&path[k - 1]);
    }
    let total = s[path.len() - 1];
    let mut out = Vec::with_capacity(frames);
    let mut seg = 0;
    for f in 0..frames {
        if f == 0 {
            out.push(path[0]);
            continue;
        }
        if f == frames - 1 {
            out.push(path[path.len() - 1]);
            continue;
        }
        let t = total * f as f64 / (frames - 1) as f64;
        while seg < path.len() - 2 && s[seg + 1] < t {
            seg += 1;
        }
        let span = s[seg + 1] - s[seg];
        let w = if span > 0.0 { (t - s[seg]) / span } else { 0.0 };
        let (a, b) = (path[seg].to_vector(), path[seg + 1].to_vector());
        out.push(Coords::from_vector(&(a + (b - a) * w)));
    }
    Ok(out)
}

/// Animation frames of a snap, all with the face winding of the open state.
pub fn animate(snap: &SnapResult, frames: usize) -> Result<Vec<Mesh>> {
    let shapes = sample_path(snap.path(), frames)?;
    let sk = snap.spec.skeleton();
    let reference = Mesh::sandglass(sk, &shapes[0]);
    Ok(shapes
        .iter()
        .map(|x| {
            let mut m = Mesh::sandglass(sk, x);
            if m.faces != reference.faces {
                m.flip();
            }
            m
        })
        .collect())
}
