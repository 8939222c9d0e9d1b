//! Canonical text format:
//!
//! ```text
//! geometry v1
//! points <P>
//! lines <L>
//! <ascending point ids of line 0>
//! ...
//! ```
//!
//! `#` starts a comment; blank lines are ignored.

use std::io::{BufRead, Write};

use super::Geometry;
use crate::error::{Error, Result};

pub fn write_geometry<W: Write>(g: &Geometry, mut out: W) -> Result<()> {
    writeln!(out, "geometry v1")?;
    writeln!(out, "points {}", g.num_points())?;
    writeln!(out, "lines {}", g.num_lines())?;
    let mut buf = String::new();
    for pts in g.lines() {
        if pts.is_empty() {
            return Err(Error::Malformed("empty lines cannot be serialized".into()));
        }
        buf.clear();
        for (i, p) in pts.iter().enumerate() {
            if i > 0 {
                buf.push(' ');
            }
            buf.push_str(&p.to_string());
        }
        buf.push('\n');
        out.write_all(buf.as_bytes())?;
    }
    Ok(())
}

pub fn read_geometry<R: BufRead>(input: R) -> Result<Geometry> {
    let mut header: Vec<(usize, String)> = Vec::new();
    let mut lines: Vec<Vec<u32>> = Vec::new();
    let mut expected: Option<(usize, usize)> = None;
    for (no, raw) in input.lines().enumerate() {
        let raw = raw?;
        let lineno = no + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        if header.len() < 3 {
            header.push((lineno, text.to_string()));
            if header.len() == 3 {
                expected = Some(parse_header(&header)?);
            }
            continue;
        }
        let mut pts = Vec::new();
        for tok in text.split_whitespace() {
            let id: u32 =
                tok.parse().map_err(|_| Error::Parse { line: lineno, msg: format!("bad point id {tok:?}") })?;
            pts.push(id);
        }
        if pts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse { line: lineno, msg: "point ids not strictly ascending".into() });
        }
        lines.push(pts);
    }
    let (p, l) = expected.ok_or(Error::Parse { line: 0, msg: "missing header".into() })?;
    if lines.len() != l {
        return Err(Error::Parse { line: 0, msg: format!("expected {l} lines, found {}", lines.len()) });
    }
    Geometry::build(lines, p)
}

fn parse_header(h: &[(usize, String)]) -> Result<(usize, usize)> {
    if h[0].1 != "geometry v1" {
        return Err(Error::Parse { line: h[0].0, msg: format!("unknown header {:?}", h[0].1) });
    }
    let field = |(no, s): &(usize, String), key: &str| -> Result<usize> {
        let rest =
            s.strip_prefix(key).ok_or_else(|| Error::Parse { line: *no, msg: format!("expected `{key} <n>`") })?;
        rest.trim().parse().map_err(|_| Error::Parse { line: *no, msg: format!("bad count {rest:?}") })
    };
    Ok((field(&h[1], "points")?, field(&h[2], "lines")?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_grid() {
        let g = Geometry::grid(4, 4);
        let mut buf = Vec::new();
        write_geometry(&g, &mut buf).unwrap();
        let back = read_geometry(&buf[..]).unwrap();
        assert_eq!(back, g);
        let mut again = Vec::new();
        write_geometry(&back, &mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn comments_and_errors() {
        let text = "# a comment\ngeometry v1\npoints 3\nlines 1\n0 1 2 # trailing\n";
        let g = read_geometry(text.as_bytes()).unwrap();
        assert_eq!(g.num_lines(), 1);
        assert!(read_geometry("geometry v1\npoints 3\nlines 1\n0 1 1\n".as_bytes()).is_err());
        assert!(read_geometry("geometry v2\npoints 3\nlines 1\n0 1\n".as_bytes()).is_err());
        assert!(read_geometry("geometry v1\npoints 3\nlines 2\n0 1\n".as_bytes()).is_err());
        assert!(read_geometry("geometry v1\npoints 3\nlines 1\n0 7\n".as_bytes()).is_err());
    }
}
