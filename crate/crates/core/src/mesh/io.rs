//! Plain-text mesh format:
//!
//! ```text
//! <vertex count>
//! x y z          (one line per vertex)
//! <cell count>
//! a b c d        (0-based vertex ids)
//! ```

use std::io::{BufRead, Write};

use super::Mesh;
use crate::error::{Error, Result};

pub fn write_mesh<W: Write>(mesh: &Mesh, mut w: W) -> Result<()> {
    writeln!(w, "{}", mesh.vertices.len())?;
    for v in &mesh.vertices {
        writeln!(w, "{:e} {:e} {:e}", v[0], v[1], v[2])?;
    }
    writeln!(w, "{}", mesh.cells.len())?;
    for c in &mesh.cells {
        writeln!(w, "{} {} {} {}", c[0], c[1], c[2], c[3])?;
    }
    Ok(())
}

pub fn read_mesh<R: BufRead>(r: R) -> Result<Mesh> {
    let mut lines = r
        .lines()
        .map(|l| l.map_err(Error::from))
        .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
    let mut next = |what: &str| -> Result<String> {
        lines
            .next()
            .unwrap_or_else(|| Err(Error::Parse(format!("unexpected end of input reading {what}"))))
    };
    let count = |s: String| -> Result<usize> {
        s.trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad count '{s}'")))
    };
    let nv = count(next("vertex count")?)?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let l = next("vertex")?;
        let v: Vec<f64> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("bad vertex line '{l}'")))?;
        let [x, y, z] = v[..] else {
            return Err(Error::Parse(format!("vertex line needs 3 values: '{l}'")));
        };
        vertices.push([x, y, z]);
    }
    let nc = count(next("cell count")?)?;
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let l = next("cell")?;
        let v: Vec<usize> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("bad cell line '{l}'")))?;
        let [a, b, c, d] = v[..] else {
            return Err(Error::Parse(format!("cell line needs 4 ids: '{l}'")));
        };
        cells.push([a, b, c, d]);
    }
    Mesh::from_cells(vertices, cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let m = Mesh::structured_cube(2).unwrap();
        let mut buf = Vec::new();
        write_mesh(&m, &mut buf).unwrap();
        let back = read_mesh(&buf[..]).unwrap();
        assert_eq!(back.vertices, m.vertices);
        assert_eq!(back.cells, m.cells);
        assert_eq!(back.counts(), m.counts());
    }

    #[test]
    fn truncated_input() {
        assert!(matches!(read_mesh("3\n0 0 0\n".as_bytes()), Err(Error::Parse(_))));
    }
}
