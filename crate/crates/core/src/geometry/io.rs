//! Plain-text mesh and polyline files.
//!
//! Mesh: header `V T E`, then `V` lines `x y`, `T` lines `i j k`, `E` lines
//! `i j tag loop_id` with `tag` one of `SIGMA` / `GAMMA`.
//! Polyline: one `x y` line per vertex.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use super::{BoundaryEdge, BoundaryTag, Point, TriangleMesh};
use crate::error::{Error, Result};

pub fn write_mesh<W: Write>(mesh: &TriangleMesh, mut out: W) -> Result<()> {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} {} {}",
        mesh.num_vertices(),
        mesh.num_triangles(),
        mesh.boundary_edges.len()
    );
    for p in &mesh.vertices {
        let _ = writeln!(s, "{:e} {:e}", p[0], p[1]);
    }
    for t in &mesh.triangles {
        let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
    }
    for e in &mesh.boundary_edges {
        let loop_id = match e.tag {
            BoundaryTag::Sigma => 0,
            BoundaryTag::Gamma(k) => k,
        };
        let _ = writeln!(
            s,
            "{} {} {} {}",
            e.vertices[0], e.vertices[1], e.tag, loop_id
        );
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

fn parse_err(line: usize, msg: &str) -> Error {
    Error::Parse(format!("line {}: {msg}", line + 1))
}

fn fields<T: std::str::FromStr>(line: &str, n: usize, lineno: usize) -> Result<Vec<T>> {
    let v: Vec<T> = line
        .split_whitespace()
        .take(n)
        .map(|t| t.parse::<T>().map_err(|_| parse_err(lineno, "bad number")))
        .collect::<Result<_>>()?;
    if v.len() != n {
        return Err(parse_err(lineno, &format!("expected {n} fields")));
    }
    Ok(v)
}

/// Reads a mesh written by [`write_mesh`]. `h_target` is not stored in the
/// file and is estimated from the mean outer edge length.
pub fn read_mesh<R: BufRead>(input: R) -> Result<TriangleMesh> {
    let lines: Vec<String> = input.lines().collect::<std::io::Result<_>>()?;
    let header = lines
        .first()
        .ok_or_else(|| parse_err(0, "empty mesh file"))?;
    let h: Vec<usize> = fields(header, 3, 0)?;
    let (nv, nt, ne) = (h[0], h[1], h[2]);
    if lines.len() < 1 + nv + nt + ne {
        return Err(parse_err(lines.len(), "truncated mesh file"));
    }
    let mut vertices = Vec::with_capacity(nv);
    for i in 0..nv {
        let v: Vec<f64> = fields(&lines[1 + i], 2, 1 + i)?;
        vertices.push([v[0], v[1]]);
    }
    let mut triangles = Vec::with_capacity(nt);
    for i in 0..nt {
        let l = 1 + nv + i;
        let t: Vec<usize> = fields(&lines[l], 3, l)?;
        triangles.push([t[0], t[1], t[2]]);
    }
    let mut boundary_edges = Vec::with_capacity(ne);
    for i in 0..ne {
        let l = 1 + nv + nt + i;
        let parts: Vec<&str> = lines[l].split_whitespace().collect();
        if parts.len() != 4 {
            return Err(parse_err(l, "expected 'i j tag loop_id'"));
        }
        let a: usize = parts[0].parse().map_err(|_| parse_err(l, "bad index"))?;
        let b: usize = parts[1].parse().map_err(|_| parse_err(l, "bad index"))?;
        let id: usize = parts[3].parse().map_err(|_| parse_err(l, "bad loop id"))?;
        let tag = match parts[2] {
            "SIGMA" => BoundaryTag::Sigma,
            "GAMMA" => BoundaryTag::Gamma(id),
            other => return Err(parse_err(l, &format!("unknown tag '{other}'"))),
        };
        boundary_edges.push((a, b, tag));
    }
    // recover owning triangles
    let mut owner = std::collections::HashMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for k in 0..3 {
            owner.insert((tri[k], tri[(k + 1) % 3]), t);
        }
    }
    let boundary_edges = boundary_edges
        .into_iter()
        .map(|(a, b, tag)| {
            owner
                .get(&(a, b))
                .map(|&t| BoundaryEdge {
                    vertices: [a, b],
                    tag,
                    triangle: t,
                })
                .ok_or_else(|| Error::Mesh(format!("boundary edge ({a}, {b}) has no triangle")))
        })
        .collect::<Result<Vec<_>>>()?;
    let sigma_len: f64 = boundary_edges
        .iter()
        .filter(|e| e.tag == BoundaryTag::Sigma)
        .map(|e| {
            let (p, q) = (vertices[e.vertices[0]], vertices[e.vertices[1]]);
            (q[0] - p[0]).hypot(q[1] - p[1])
        })
        .sum();
    let n_sigma = boundary_edges
        .iter()
        .filter(|e| e.tag == BoundaryTag::Sigma)
        .count();
    let mesh = TriangleMesh {
        vertices,
        triangles,
        boundary_edges,
        h_target: sigma_len / n_sigma.max(1) as f64,
    };
    mesh.validate()?;
    Ok(mesh)
}

pub fn write_polyline<W: Write>(points: &[Point], mut out: W) -> Result<()> {
    let mut s = String::with_capacity(points.len() * 48);
    for p in points {
        let _ = writeln!(s, "{:e} {:e}", p[0], p[1]);
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

pub fn read_polyline<R: BufRead>(input: R) -> Result<Vec<Point>> {
    let mut pts = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v: Vec<f64> = fields(&line, 2, i)?;
        pts.push([v[0], v[1]]);
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_annulus_mesh, BoundaryCurve};

    #[test]
    fn mesh_file_round_trip() {
        let m =
            generate_annulus_mesh(&[BoundaryCurve::circle([0.0, 0.1], 0.3)], 40, 24, 0.15).unwrap();
        let mut buf = Vec::new();
        write_mesh(&m, &mut buf).unwrap();
        let back = read_mesh(buf.as_slice()).unwrap();
        assert_eq!(back.vertices, m.vertices);
        assert_eq!(back.triangles, m.triangles);
        assert_eq!(back.boundary_edges, m.boundary_edges);
    }

    #[test]
    fn truncated_mesh_is_parse_error() {
        assert!(matches!(
            read_mesh("3 1 3\n0 0\n".as_bytes()),
            Err(Error::Parse(_))
        ));
    }
}
