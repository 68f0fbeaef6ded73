//! MEDIT ASCII mesh and solution files.
//!
//! The subset handled here: `MeshVersionFormatted`, `Dimension` (2 only),
//! `Vertices`, `Triangles`, optional `Edges`, `End` for meshes, and
//! `SolAtVertices` with type code 1 (scalar) or 3 (symmetric tensor, stored
//! as a11 a12 a22) for solutions. Indices are 1-based on disk. Floats are
//! written with 17 significant digits so a write/read cycle is bit exact.

use super::{build_mesh, TriMesh, VertexKind};
use crate::fields::{ScalarField, TensorField, TensorRole};
use crate::tensor::SymTensor2;
use crate::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

const KEYWORDS: [&str; 6] = [
    "MeshVersionFormatted",
    "Dimension",
    "Vertices",
    "Triangles",
    "Edges",
    "End",
];

/// Serialize a mesh in MEDIT ASCII form.
pub fn write_medit_string(mesh: &TriMesh) -> String {
    let mut out = String::new();
    out.push_str("MeshVersionFormatted 2\n");
    out.push_str("Dimension 2\n");
    let _ = writeln!(out, "Vertices\n{}", mesh.n_vertices());
    for (v, p) in mesh.vertices().iter().enumerate() {
        let r = match mesh.vertex_kind(v) {
            VertexKind::Interior => 0,
            VertexKind::Boundary { tag } => tag,
            VertexKind::Corner => corner_tag(mesh, v),
        };
        let _ = writeln!(out, "{:.16e} {:.16e} {r}", p[0], p[1]);
    }
    let _ = writeln!(out, "Triangles\n{}", mesh.n_triangles());
    for tri in mesh.triangles() {
        let _ = writeln!(out, "{} {} {} 0", tri[0] + 1, tri[1] + 1, tri[2] + 1);
    }
    let _ = writeln!(out, "Edges\n{}", mesh.boundary_edges().len());
    for &([a, b], tag) in mesh.boundary_edges() {
        let _ = writeln!(out, "{} {} {tag}", a + 1, b + 1);
    }
    out.push_str("End\n");
    out
}

fn corner_tag(mesh: &TriMesh, v: usize) -> i32 {
    mesh.boundary_edges()
        .iter()
        .filter(|(e, _)| e.contains(&v))
        .map(|&(_, tag)| tag)
        .min()
        .unwrap_or(0)
}

pub fn write_medit(mesh: &TriMesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_medit_string(mesh))?;
    Ok(())
}

/// Parse a MEDIT mesh file; unknown sections are skipped with a warning.
pub fn read_medit(path: impl AsRef<Path>) -> Result<TriMesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    read_medit_string(&text, &path.display().to_string())
}

pub fn read_medit_string(text: &str, name: &str) -> Result<TriMesh> {
    let mut tok = Tokenizer::new(text, name);
    let mut vertices: Option<Vec<[f64; 2]>> = None;
    let mut triangles: Option<Vec<[usize; 3]>> = None;
    let mut edges: Vec<([usize; 2], i32)> = Vec::new();
    let mut saw_edges = false;

    while let Some(word) = tok.next_word()? {
        match word.as_str() {
            "MeshVersionFormatted" => {
                tok.next_int("format version")?;
            }
            "Dimension" => {
                let d = tok.next_int("dimension")?;
                if d != 2 {
                    return Err(Error::UnsupportedDimension(d.max(0) as usize));
                }
            }
            "Vertices" => {
                let n = tok.next_count("vertex count")?;
                let mut vs = Vec::with_capacity(n);
                for _ in 0..n {
                    let x = tok.next_float("vertex x")?;
                    let y = tok.next_float("vertex y")?;
                    tok.next_int("vertex reference")?;
                    vs.push([x, y]);
                }
                vertices = Some(vs);
            }
            "Triangles" => {
                let n = tok.next_count("triangle count")?;
                let nv = vertices.as_ref().map_or(usize::MAX, Vec::len);
                let mut ts = Vec::with_capacity(n);
                for _ in 0..n {
                    let a = tok.next_index("triangle vertex", nv)?;
                    let b = tok.next_index("triangle vertex", nv)?;
                    let c = tok.next_index("triangle vertex", nv)?;
                    tok.next_int("triangle reference")?;
                    ts.push([a, b, c]);
                }
                triangles = Some(ts);
            }
            "Edges" => {
                saw_edges = true;
                let n = tok.next_count("edge count")?;
                let nv = vertices.as_ref().map_or(usize::MAX, Vec::len);
                for _ in 0..n {
                    let a = tok.next_index("edge vertex", nv)?;
                    let b = tok.next_index("edge vertex", nv)?;
                    let tag = tok.next_int("edge reference")?;
                    edges.push(([a, b], tag as i32));
                }
            }
            "End" => break,
            other => {
                log::warn!("{name}: skipping unknown section {other:?}");
                tok.skip_until_keyword(&KEYWORDS);
            }
        }
    }

    let vertices = vertices.ok_or_else(|| tok.err_here("file has no Vertices section"))?;
    let triangles = triangles.ok_or_else(|| tok.err_here("file has no Triangles section"))?;
    if !saw_edges {
        edges = derive_boundary_edges(&triangles);
    }
    build_mesh(vertices, triangles, edges)
}

/// Single-triangle edges, tagged 1, for files without an Edges section.
fn derive_boundary_edges(triangles: &[[usize; 3]]) -> Vec<([usize; 2], i32)> {
    let mut count = std::collections::BTreeMap::new();
    for tri in triangles {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            *count.entry([a.min(b), a.max(b)]).or_insert(0usize) += 1;
        }
    }
    count
        .into_iter()
        .filter(|&(_, c)| c == 1)
        .map(|(e, _)| (e, 1))
        .collect()
}

/// Serialize a symmetric tensor field in MEDIT .sol form.
pub fn write_sol_tensor_string(field: &TensorField) -> String {
    let mut out = sol_header(field.len(), 3);
    for t in &field.values {
        let _ = writeln!(out, "{:.16e} {:.16e} {:.16e}", t.a11, t.a12, t.a22);
    }
    out.push_str("End\n");
    out
}

/// Serialize a scalar field in MEDIT .sol form.
pub fn write_sol_scalar_string(field: &ScalarField) -> String {
    let mut out = sol_header(field.len(), 1);
    for v in &field.values {
        let _ = writeln!(out, "{v:.16e}");
    }
    out.push_str("End\n");
    out
}

fn sol_header(n: usize, type_code: usize) -> String {
    format!("MeshVersionFormatted 2\nDimension 2\nSolAtVertices\n{n}\n1 {type_code}\n")
}

pub fn write_sol_tensor(field: &TensorField, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_sol_tensor_string(field))?;
    Ok(())
}

pub fn write_sol_scalar(field: &ScalarField, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_sol_scalar_string(field))?;
    Ok(())
}

pub fn read_sol_tensor(path: impl AsRef<Path>, role: TensorRole) -> Result<TensorField> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    read_sol_tensor_string(&text, &path.display().to_string(), role)
}

pub fn read_sol_tensor_string(text: &str, name: &str, role: TensorRole) -> Result<TensorField> {
    let (n, type_code, mut tok) = sol_prelude(text, name)?;
    if type_code != 3 {
        return Err(tok.err_here(&format!("expected tensor type code 3, found {type_code}")));
    }
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let a11 = tok.next_float("tensor a11")?;
        let a12 = tok.next_float("tensor a12")?;
        let a22 = tok.next_float("tensor a22")?;
        values.push(SymTensor2::new(a11, a12, a22));
    }
    Ok(TensorField::new(values, role))
}

pub fn read_sol_scalar(path: impl AsRef<Path>) -> Result<ScalarField> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    read_sol_scalar_string(&text, &path.display().to_string())
}

pub fn read_sol_scalar_string(text: &str, name: &str) -> Result<ScalarField> {
    let (n, type_code, mut tok) = sol_prelude(text, name)?;
    if type_code != 1 {
        return Err(tok.err_here(&format!("expected scalar type code 1, found {type_code}")));
    }
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        values.push(tok.next_float("scalar value")?);
    }
    Ok(ScalarField::new(values))
}

fn sol_prelude<'a>(text: &'a str, name: &'a str) -> Result<(usize, i64, Tokenizer<'a>)> {
    let mut tok = Tokenizer::new(text, name);
    loop {
        match tok.next_word()? {
            Some(w) if w == "MeshVersionFormatted" => {
                tok.next_int("format version")?;
            }
            Some(w) if w == "Dimension" => {
                let d = tok.next_int("dimension")?;
                if d != 2 {
                    return Err(Error::UnsupportedDimension(d.max(0) as usize));
                }
            }
            Some(w) if w == "SolAtVertices" => break,
            Some(other) => {
                log::warn!("{name}: skipping unknown section {other:?}");
                tok.skip_until_keyword(&["SolAtVertices", "End"]);
            }
            None => return Err(tok.err_here("file has no SolAtVertices section")),
        }
    }
    let n = tok.next_count("solution count")?;
    let fields = tok.next_int("field count")?;
    if fields != 1 {
        return Err(tok.err_here(&format!("expected a single field, found {fields}")));
    }
    let type_code = tok.next_int("type code")?;
    Ok((n, type_code, tok))
}

/// Whitespace tokenizer that tracks line numbers for error reporting.
struct Tokenizer<'a> {
    name: &'a str,
    tokens: std::vec::IntoIter<(usize, &'a str)>,
    peeked: Option<(usize, &'a str)>,
    line: usize,
}

impl<'a> Tokenizer<'a> {
    fn new(text: &'a str, name: &'a str) -> Self {
        let mut tokens = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            for tok in line.split_whitespace() {
                tokens.push((i + 1, tok));
            }
        }
        Self {
            name,
            tokens: tokens.into_iter(),
            peeked: None,
            line: 1,
        }
    }

    fn next_token(&mut self) -> Option<(usize, &'a str)> {
        let t = self.peeked.take().or_else(|| self.tokens.next());
        if let Some((line, _)) = t {
            self.line = line;
        }
        t
    }

    fn peek(&mut self) -> Option<(usize, &'a str)> {
        if self.peeked.is_none() {
            self.peeked = self.tokens.next();
        }
        self.peeked
    }

    fn err_here(&self, msg: &str) -> Error {
        Error::Parse {
            path: self.name.to_string(),
            line: self.line,
            msg: msg.to_string(),
        }
    }

    fn next_word(&mut self) -> Result<Option<String>> {
        match self.next_token() {
            None => Ok(None),
            Some((_, tok)) => {
                if tok.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
                    Ok(Some(tok.to_string()))
                } else {
                    Err(self.err_here(&format!("expected a section keyword, found {tok:?}")))
                }
            }
        }
    }

    fn next_int(&mut self, what: &str) -> Result<i64> {
        match self.next_token() {
            Some((_, tok)) => tok
                .parse()
                .map_err(|_| self.err_here(&format!("expected {what}, found {tok:?}"))),
            None => Err(self.err_here(&format!("unexpected end of file, expected {what}"))),
        }
    }

    fn next_count(&mut self, what: &str) -> Result<usize> {
        let v = self.next_int(what)?;
        usize::try_from(v).map_err(|_| self.err_here(&format!("{what} must be non-negative")))
    }

    /// 1-based index from the file, converted and range checked.
    fn next_index(&mut self, what: &str, n: usize) -> Result<usize> {
        let v = self.next_count(what)?;
        if v == 0 || v > n {
            return Err(self.err_here(&format!("{what} {v} out of range 1..={n}")));
        }
        Ok(v - 1)
    }

    fn next_float(&mut self, what: &str) -> Result<f64> {
        match self.next_token() {
            Some((_, tok)) => tok
                .parse()
                .map_err(|_| self.err_here(&format!("expected {what}, found {tok:?}"))),
            None => Err(self.err_here(&format!("unexpected end of file, expected {what}"))),
        }
    }

    /// Drop tokens until the next known keyword.
    fn skip_until_keyword(&mut self, keywords: &[&str]) {
        while let Some((_, tok)) = self.peek() {
            if keywords.contains(&tok) {
                return;
            }
            self.next_token();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::structured_unit_square;

    #[test]
    fn mesh_roundtrip_is_identity() {
        let mesh = structured_unit_square(4);
        let text = write_medit_string(&mesh);
        let back = read_medit_string(&text, "mem").unwrap();
        assert_eq!(mesh.vertices(), back.vertices());
        assert_eq!(mesh.triangles(), back.triangles());
        assert_eq!(mesh.boundary_edges(), back.boundary_edges());
        assert_eq!(mesh.vertex_kinds(), back.vertex_kinds());
        // Write of the reread mesh is byte identical.
        assert_eq!(text, write_medit_string(&back));
    }

    #[test]
    fn irrational_coordinates_roundtrip_bit_exact() {
        let vertices = vec![
            [0.0, 0.0],
            [std::f64::consts::PI, 1.0 / 3.0],
            [2.0f64.sqrt() * 1e-7, 1.0],
        ];
        let triangles = vec![[0, 1, 2]];
        let boundary = vec![([0, 1], 1), ([1, 2], 2), ([2, 0], 3)];
        let mesh = build_mesh(vertices.clone(), triangles, boundary).unwrap();
        let back = read_medit_string(&write_medit_string(&mesh), "mem").unwrap();
        for (a, b) in vertices.iter().zip(back.vertices()) {
            assert_eq!(a[0].to_bits(), b[0].to_bits());
            assert_eq!(a[1].to_bits(), b[1].to_bits());
        }
    }

    #[test]
    fn missing_edges_section_derives_boundary() {
        let text = "MeshVersionFormatted 2\nDimension 2\nVertices\n3\n0 0 0\n1 0 0\n0 1 0\nTriangles\n1\n1 2 3 0\nEnd\n";
        let mesh = read_medit_string(text, "mem").unwrap();
        assert_eq!(mesh.boundary_edges().len(), 3);
        assert!(mesh.boundary_edges().iter().all(|&(_, tag)| tag == 1));
    }

    #[test]
    fn unknown_sections_are_skipped() {
        let text = "MeshVersionFormatted 2\nDimension 2\nCorners\n1\n1\nVertices\n3\n0 0 0\n1 0 0\n0 1 0\nTriangles\n1\n1 2 3 0\nEnd\n";
        let mesh = read_medit_string(text, "mem").unwrap();
        assert_eq!(mesh.n_triangles(), 1);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "MeshVersionFormatted 2\nDimension 2\nVertices\n2\n0 0 0\nnope 0 0\n";
        match read_medit_string(text, "bad.mesh") {
            Err(Error::Parse { path, line, .. }) => {
                assert_eq!(path, "bad.mesh");
                assert_eq!(line, 6);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_wrong_dimension() {
        let text = "MeshVersionFormatted 2\nDimension 3\n";
        assert!(matches!(
            read_medit_string(text, "mem"),
            Err(Error::UnsupportedDimension(3))
        ));
    }

    #[test]
    fn rejects_out_of_range_indices() {
        let text =
            "MeshVersionFormatted 2\nDimension 2\nVertices\n3\n0 0 0\n1 0 0\n0 1 0\nTriangles\n1\n1 2 9 0\nEnd\n";
        assert!(matches!(
            read_medit_string(text, "mem"),
            Err(Error::Parse { line: 10, .. })
        ));
    }

    #[test]
    fn sol_tensor_roundtrip() {
        let field = TensorField::new(
            vec![
                SymTensor2::new(1.0, 0.25, 2.0),
                SymTensor2::new(1e-7, -3.5, 4.0 / 3.0),
            ],
            TensorRole::Metric,
        );
        let text = write_sol_tensor_string(&field);
        let back = read_sol_tensor_string(&text, "mem", TensorRole::Metric).unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in field.values.iter().zip(&back.values) {
            assert_eq!(a.a11.to_bits(), b.a11.to_bits());
            assert_eq!(a.a12.to_bits(), b.a12.to_bits());
            assert_eq!(a.a22.to_bits(), b.a22.to_bits());
        }
    }

    #[test]
    fn sol_scalar_roundtrip() {
        let field = ScalarField::new(vec![0.1, -2.0, 1.0 / 7.0]);
        let text = write_sol_scalar_string(&field);
        let back = read_sol_scalar_string(&text, "mem").unwrap();
        for (a, b) in field.values.iter().zip(&back.values) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn sol_type_mismatch_is_rejected() {
        let field = ScalarField::new(vec![1.0]);
        let text = write_sol_scalar_string(&field);
        assert!(read_sol_tensor_string(&text, "mem", TensorRole::Metric).is_err());
    }
}
