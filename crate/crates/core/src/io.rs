//! Text formats: grid-function CSV, point lists, spacing literals and face specs.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::cones::Cone;
use crate::conjugate::GridFn;
use crate::error::{Error, Result};
use crate::faces::{lorentz_ray_face, orthant_face, psd_block_face, Face};
use crate::grid::{build_grid, Grid};
use crate::linalg::Mat;
use crate::point::Point;
use crate::value::ExtReal;

/// Parses a positive real, accepting `p/q` fractions such as `1/63`.
pub fn parse_real(s: &str) -> Result<f64> {
    let t = s.trim();
    let v = if let Some((a, b)) = t.split_once('/') {
        let a: f64 = a
            .trim()
            .parse()
            .map_err(|_| Error::parse(t, "bad numerator"))?;
        let b: f64 = b
            .trim()
            .parse()
            .map_err(|_| Error::parse(t, "bad denominator"))?;
        if b == 0.0 {
            return Err(Error::parse(t, "zero denominator"));
        }
        a / b
    } else {
        t.parse().map_err(|_| Error::parse(t, "not a number"))?
    };
    if !v.is_finite() {
        return Err(Error::parse(t, "not finite"));
    }
    Ok(v)
}

fn parse_value(s: &str) -> Result<ExtReal> {
    let t = s.trim();
    match t {
        "inf" | "+inf" | "Inf" | "+Inf" => Ok(ExtReal::PosInf),
        _ => {
            let v: f64 = t.parse().map_err(|_| Error::parse(t, "not a number"))?;
            if v.is_nan() || v == f64::NEG_INFINITY {
                return Err(Error::parse(t, "value must lie in (-inf, +inf]"));
            }
            ExtReal::from_f64(v)
        }
    }
}

fn parse_row(line: &str) -> Result<Vec<&str>> {
    Ok(line.split(',').map(str::trim).collect())
}

/// Serializes `f` as `# cone=<spec> radius=<r> h=<h>` followed by one
/// `c1,...,cd,value` row per node.
pub fn write_gridfn_string(f: &GridFn) -> String {
    let g = f.grid();
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# cone={} radius={} h={}",
        g.cone(),
        g.radius(),
        g.spacing()
    );
    for i in 0..g.len() {
        for c in g.node(i) {
            let _ = write!(s, "{c},");
        }
        let _ = writeln!(s, "{}", f.value(i));
    }
    s
}

pub fn write_gridfn(f: &GridFn, path: &Path) -> Result<()> {
    std::fs::write(path, write_gridfn_string(f))?;
    Ok(())
}

/// Inverse of [`write_gridfn_string`]. Rows covering the full standard grid
/// are placed on it; any other lattice-aligned node set becomes an explicit grid.
pub fn read_gridfn_str(text: &str) -> Result<GridFn> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or(Error::Empty("grid function file"))?;
    let header = header
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| Error::parse(header, "expected `# cone=... radius=... h=...` header"))?;
    let (mut cone, mut radius, mut h) = (None, None, None);
    for tok in header.split_whitespace() {
        match tok.split_once('=') {
            Some(("cone", v)) => cone = Some(v.parse::<Cone>()?),
            Some(("radius", v)) => radius = Some(parse_real(v)?),
            Some(("h", v)) => h = Some(parse_real(v)?),
            _ => return Err(Error::parse(tok, "unknown header field")),
        }
    }
    let cone = cone.ok_or_else(|| Error::parse(header, "missing cone"))?;
    let radius = radius.ok_or_else(|| Error::parse(header, "missing radius"))?;
    let h = h.ok_or_else(|| Error::parse(header, "missing h"))?;
    let d = cone.ambient_dim();

    let mut pts = Vec::new();
    let mut vals = Vec::new();
    for line in lines {
        if line.trim_start().starts_with('#') {
            continue;
        }
        let cells = parse_row(line)?;
        if cells.len() != d + 1 {
            return Err(Error::parse(line, format!("expected {} columns", d + 1)));
        }
        let coords = cells[..d]
            .iter()
            .map(|c| parse_real(c))
            .collect::<Result<Vec<_>>>()?;
        pts.push(Point::new(coords)?);
        vals.push(parse_value(cells[d])?);
    }

    if let Ok(g) = build_grid(cone, radius, h) {
        if g.len() == pts.len() {
            let mut placed = vec![None; g.len()];
            let mut ok = true;
            for (p, v) in pts.iter().zip(&vals) {
                match g.locate(p.coords()) {
                    Some(i) if placed[i].is_none() => placed[i] = Some(*v),
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                let values = placed.into_iter().map(|v| v.expect("all placed")).collect();
                return GridFn::new(Arc::new(g), values);
            }
        }
    }
    let g = Grid::from_nodes(cone, h, &pts)?;
    GridFn::new(Arc::new(g), vals)
}

pub fn read_gridfn(path: &Path) -> Result<GridFn> {
    read_gridfn_str(&read_text(path)?)
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// One point per row, comma-separated coordinates. Blank lines and `#` comments are skipped.
pub fn read_points_str(text: &str) -> Result<Vec<Point>> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|l| {
            let coords = parse_row(l)?
                .iter()
                .map(|c| parse_real(c))
                .collect::<Result<Vec<_>>>()?;
            Point::new(coords)
        })
        .collect()
}

pub fn read_points(path: &Path) -> Result<Vec<Point>> {
    read_points_str(&read_text(path)?)
}

pub fn write_points_string(points: &[Point]) -> String {
    let mut s = String::new();
    for p in points {
        let row: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
        let _ = writeln!(s, "{}", row.join(","));
    }
    s
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::parse(s, "expected a nonnegative integer"))
}

/// Parses `orthant-face:d:S`, `psd-block:n:m[:rotfile]` or `lorentz-ray:d:gfile`.
/// Orthant supports are 0-based; a rotation file holds one orthonormal basis
/// vector per row, a generator file holds a single point.
pub fn parse_face_spec(s: &str, base: Option<&Path>) -> Result<Face> {
    let resolve = |f: &str| match base {
        Some(b) if Path::new(f).is_relative() => b.join(f),
        _ => Path::new(f).to_path_buf(),
    };
    let mut parts = s.splitn(3, ':');
    let kind = parts.next().unwrap_or_default();
    match kind {
        "orthant-face" => {
            let d = parse_usize(
                parts
                    .next()
                    .ok_or_else(|| Error::parse(s, "missing dimension"))?,
            )?;
            let support = match parts.next() {
                None => Vec::new(),
                Some(list) => list
                    .split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(parse_usize)
                    .collect::<Result<Vec<_>>>()?,
            };
            orthant_face(d, &support)
        }
        "psd-block" => {
            let n = parse_usize(
                parts
                    .next()
                    .ok_or_else(|| Error::parse(s, "missing order"))?,
            )?;
            let rest = parts
                .next()
                .ok_or_else(|| Error::parse(s, "missing block size"))?;
            let (m, rot) = match rest.split_once(':') {
                Some((m, file)) => {
                    let rows = read_points(&resolve(file))?;
                    let rows: Vec<Vec<f64>> = rows.into_iter().map(Point::into_coords).collect();
                    (parse_usize(m)?, Mat::from_cols(&rows)?)
                }
                None => (parse_usize(rest)?, Mat::identity(n)),
            };
            psd_block_face(n, m, &rot)
        }
        "lorentz-ray" => {
            let d = parse_usize(
                parts
                    .next()
                    .ok_or_else(|| Error::parse(s, "missing dimension"))?,
            )?;
            let file = parts
                .next()
                .ok_or_else(|| Error::parse(s, "missing generator file"))?;
            let g = read_points(&resolve(file))?;
            let [g] = <[Point; 1]>::try_from(g)
                .map_err(|_| Error::parse(file, "expected exactly one generator row"))?;
            lorentz_ray_face(d, &g)
        }
        other => Err(Error::parse(other, "unknown face kind")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions() {
        assert_eq!(parse_real("1/63").unwrap(), 1.0 / 63.0);
        assert_eq!(parse_real(" 0.5 ").unwrap(), 0.5);
        assert!(matches!(parse_real("1/0"), Err(Error::Parse { .. })));
        assert!(matches!(parse_real("abc"), Err(Error::Parse { token, .. }) if token == "abc"));
    }

    #[test]
    fn gridfn_round_trip() {
        let g = Arc::new(build_grid(Cone::Lorentz(1), 1.0, 0.25).unwrap());
        let f = GridFn::from_fn(g, |x| {
            if x[1] > 0.0 {
                ExtReal::PosInf
            } else {
                ExtReal::finite(x[0] / 3.0)
            }
        })
        .unwrap();
        let text = write_gridfn_string(&f);
        assert!(text.starts_with("# cone=lorentz:1 radius=1 h=0.25\n"));
        assert!(text.contains(",inf\n"));
        let back = read_gridfn_str(&text).unwrap();
        assert_eq!(back.grid().as_ref(), f.grid().as_ref());
        assert_eq!(back.values(), f.values());
    }

    #[test]
    fn partial_node_set() {
        let text = "# cone=orthant:2 radius=1 h=0.5\n0,0,1\n0.5,0,2\n1,0,inf\n";
        let f = read_gridfn_str(text).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.value(1), ExtReal::finite(2.0));
    }

    #[test]
    fn bad_rows() {
        assert!(read_gridfn_str("# cone=orthant:1 radius=1 h=0.5\n0,1,2\n").is_err());
        assert!(read_gridfn_str("cone=orthant:1\n").is_err());
        assert!(read_gridfn_str("# cone=orthant:1 radius=1 h=0.5\n0,-inf\n").is_err());
    }

    #[test]
    fn face_specs() {
        let f = parse_face_spec("orthant-face:3:0,2", None).unwrap();
        assert_eq!(f.span_dim(), 2);
        let f = parse_face_spec("psd-block:3:1", None).unwrap();
        assert_eq!(f.span_dim(), 1);
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("g.csv"), "1,1,0\n").unwrap();
        let f = parse_face_spec("lorentz-ray:2:g.csv", Some(dir.path())).unwrap();
        assert_eq!(f.span_dim(), 1);
        std::fs::write(dir.path().join("q.csv"), "0,1\n1,0\n").unwrap();
        let f = parse_face_spec("psd-block:2:1:q.csv", Some(dir.path())).unwrap();
        assert!(f
            .member(&Point::new(vec![0.0, 1.0, 0.0]).unwrap(), 1e-9)
            .unwrap());
        assert!(matches!(
            parse_face_spec("cube:2", None),
            Err(Error::Parse { .. })
        ));
    }
}
