//! XYZ and ASCII PLY input, XYZ output.

use super::{PointCloud, TriangleMesh};
use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

/// Parses whitespace-separated XYZ text. `#` lines are comments, blank lines are skipped.
/// The dimension is taken from the first data line (2 or 3 columns).
pub fn parse_xyz(text: &str) -> Result<PointCloud> {
    let mut dim = None;
    let mut coords = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let start = coords.len();
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                msg: format!("not a number: {tok:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse { line: lineno + 1, msg: "non-finite coordinate".into() });
            }
            coords.push(v);
        }
        let n = coords.len() - start;
        match dim {
            None if n == 2 || n == 3 => dim = Some(n),
            None => {
                return Err(Error::Parse { line: lineno + 1, msg: format!("expected 2 or 3 columns, got {n}") })
            }
            Some(d) if d != n => {
                return Err(Error::Parse { line: lineno + 1, msg: format!("expected {d} columns, got {n}") })
            }
            _ => {}
        }
    }
    PointCloud::from_flat(dim.unwrap_or(3), coords)
}

/// Formats a cloud as XYZ text using shortest round-trip float formatting.
pub fn format_xyz(cloud: &PointCloud) -> String {
    let mut out = String::with_capacity(cloud.len() * 24 * cloud.dim());
    for p in cloud.iter() {
        for (k, c) in p.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            write!(out, "{c}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_xyz(path: impl AsRef<Path>, cloud: &PointCloud) -> Result<()> {
    std::fs::write(path, format_xyz(cloud))?;
    Ok(())
}

#[derive(Debug, Default)]
struct PlyHeader {
    vertex_count: usize,
    vertex_props: Vec<String>,
    face_count: usize,
    /// Elements in file order, with their counts.
    elements: Vec<(String, usize, usize)>,
}

/// ASCII PLY contents: vertex positions and (possibly empty) triangle list.
#[derive(Debug, Clone)]
pub struct PlyData {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<Vec<usize>>,
}

pub fn parse_ply(text: &str) -> Result<PlyData> {
    let mut lines = text.lines().enumerate();
    let perr = |line: usize, msg: &str| Error::Parse { line: line + 1, msg: msg.to_string() };

    match lines.next() {
        Some((_, l)) if l.trim() == "ply" => {}
        _ => return Err(perr(0, "missing 'ply' magic")),
    }
    let mut header = PlyHeader::default();
    let mut current: Option<String> = None;
    let mut ended = false;
    for (n, line) in lines.by_ref() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["format", "ascii", _] => {}
            ["format", ..] => return Err(perr(n, "only ASCII PLY is supported")),
            ["comment", ..] | ["obj_info", ..] | [] => {}
            ["element", name, count] => {
                let count: usize = count.parse().map_err(|_| perr(n, "bad element count"))?;
                match *name {
                    "vertex" => header.vertex_count = count,
                    "face" => header.face_count = count,
                    _ => {}
                }
                header.elements.push((name.to_string(), count, 0));
                current = Some(name.to_string());
            }
            ["property", .., pname] => {
                if let Some(el) = header.elements.last_mut() {
                    el.2 += 1;
                }
                if current.as_deref() == Some("vertex") {
                    header.vertex_props.push(pname.to_string());
                }
            }
            ["end_header"] => {
                ended = true;
                break;
            }
            _ => return Err(perr(n, "unrecognized header line")),
        }
    }
    if !ended {
        return Err(perr(0, "missing end_header"));
    }
    let pos = |name: &str| header.vertex_props.iter().position(|p| p == name);
    let (xi, yi, zi) = match (pos("x"), pos("y"), pos("z")) {
        (Some(x), Some(y), Some(z)) => (x, y, z),
        _ => return Err(perr(0, "vertex element lacks x/y/z properties")),
    };

    let mut body = lines.filter(|(_, l)| !l.trim().is_empty());
    let mut vertices = Vec::with_capacity(header.vertex_count);
    let mut faces = Vec::with_capacity(header.face_count);
    for (name, count, _) in &header.elements {
        for _ in 0..*count {
            let (n, line) = body.next().ok_or_else(|| perr(0, "unexpected end of PLY body"))?;
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| perr(n, "non-numeric PLY value"))?;
            match name.as_str() {
                "vertex" => {
                    let get = |i: usize| vals.get(i).copied().ok_or_else(|| perr(n, "short vertex line"));
                    let v = [get(xi)?, get(yi)?, get(zi)?];
                    if v.iter().any(|c| !c.is_finite()) {
                        return Err(perr(n, "non-finite coordinate"));
                    }
                    vertices.push(v);
                }
                "face" => {
                    let k = *vals.first().ok_or_else(|| perr(n, "empty face line"))? as usize;
                    if vals.len() < k + 1 || k < 3 {
                        return Err(perr(n, "malformed face"));
                    }
                    faces.push(vals[1..=k].iter().map(|&v| v as usize).collect());
                }
                _ => {}
            }
        }
    }
    Ok(PlyData { vertices, faces })
}

impl PlyData {
    pub fn into_cloud(self) -> Result<PointCloud> {
        PointCloud::from_points(&self.vertices)
    }

    /// Polygons are fan-triangulated; degenerate triangles are rejected.
    pub fn into_mesh(self) -> Result<TriangleMesh> {
        let mut tris = Vec::new();
        for f in &self.faces {
            for k in 1..f.len() - 1 {
                tris.push([f[0], f[k], f[k + 1]]);
            }
        }
        TriangleMesh::new(self.vertices, tris)
    }
}

fn is_ply(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("ply"))
}

/// Reads a cloud from `.ply` (ASCII) or any other extension as XYZ.
pub fn read_cloud(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    if is_ply(path) {
        parse_ply(&text)?.into_cloud()
    } else {
        parse_xyz(&text)
    }
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<TriangleMesh> {
    let text = std::fs::read_to_string(path)?;
    parse_ply(&text)?.into_mesh()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xyz_comments_blank_lines() {
        let c = parse_xyz("# header\n\n0 0 0\n  1.5 2 -3 \n# c\n").unwrap();
        assert_eq!(c.dim(), 3);
        assert_eq!(c.as_flat(), &[0.0, 0.0, 0.0, 1.5, 2.0, -3.0]);
        let c2 = parse_xyz("0.5 0\n1 0\n").unwrap();
        assert_eq!(c2.dim(), 2);
    }

    #[test]
    fn xyz_errors() {
        assert!(parse_xyz("0 0 0\n1 1\n").is_err());
        assert!(parse_xyz("0 0 x\n").is_err());
        assert!(parse_xyz("0 0 nan\n").is_err());
        assert!(parse_xyz("0 0 0 0\n").is_err());
    }

    #[test]
    fn xyz_text_round_trips_exactly() {
        let c = PointCloud::from_points(&[[0.1, 1.0 / 3.0, -2e-17], [1e10, 5.0, 0.0]]).unwrap();
        assert_eq!(parse_xyz(&format_xyz(&c)).unwrap(), c);
    }

    const PLY: &str = "ply
format ascii 1.0
comment test
element vertex 4
property float x
property float y
property float z
property uchar red
element face 1
property list uchar int vertex_indices
end_header
0 0 0 255
1 0 0 0
1 1 0 0
0 1 0 0
4 0 1 2 3
";

    #[test]
    fn ply_vertices_and_faces() {
        let data = parse_ply(PLY).unwrap();
        assert_eq!(data.vertices.len(), 4);
        assert_eq!(data.faces, vec![vec![0, 1, 2, 3]]);
        let mesh = data.clone().into_mesh().unwrap();
        assert_eq!(mesh.triangles(), &[[0, 1, 2], [0, 2, 3]]);
        assert!((mesh.distance([0.5, 0.5, 2.0]).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(data.into_cloud().unwrap().len(), 4);
    }

    #[test]
    fn ply_rejects_binary_and_degenerate() {
        assert!(parse_ply("ply\nformat binary_little_endian 1.0\nend_header\n").is_err());
        let degenerate = "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n0 0 0\n1 0 0\n2 0 0\n3 0 1 2\n";
        assert!(parse_ply(degenerate).unwrap().into_mesh().is_err());
    }
}
