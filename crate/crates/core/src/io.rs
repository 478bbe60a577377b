//! Versioned text formats for coefficient vectors, frame coefficients, frame
//! descriptions and directionality tables.
//!
//! Numbers are written with `{:.16e}` (17 significant digits), so reading back
//! reproduces every `f64` exactly.

use crate::coeffs::CoefficientVector;
use crate::error::{Error, Result};
use crate::frame::{Frame, FrameCoefficients};
use crate::quadrature::DirectionalRule;
use crate::sphere::HarmonicIndex;
use crate::wavelet::{DirectionalProfile, ProfileKind};
use num_complex::Complex64;
use std::collections::HashSet;
use std::io::{BufRead, Write};

pub const COEFFS_HEADER: &str = "# sphere-frame coefficients v1";
pub const FRAME_COEFFS_HEADER: &str = "# sphere-frame frame-coefficients v1";
pub const FRAME_HEADER: &str = "# sphere-frame description v1";
pub const PROFILE_HEADER: &str = "# sphere-frame profile v1";

fn perr<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

/// Non-blank lines with 1-based line numbers; `#` lines after the header are comments.
fn content_lines<R: BufRead>(reader: R, header: &str) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    let mut seen_header = false;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if !seen_header {
            if t.is_empty() {
                continue;
            }
            if t != header {
                return perr(i + 1, format!("expected header `{header}`"));
            }
            seen_header = true;
            continue;
        }
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        out.push((i + 1, t.to_string()));
    }
    if !seen_header {
        return perr(1, format!("missing header `{header}`"));
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    match tok.map(str::parse::<T>) {
        Some(Ok(v)) => Ok(v),
        Some(Err(_)) => perr(line, format!("invalid {what}")),
        None => perr(line, format!("missing {what}")),
    }
}

/// Parses `key value key value …` with the keys given in order.
fn parse_keyed(line: usize, text: &str, keys: &[&str]) -> Result<Vec<String>> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.len() != 2 * keys.len() {
        return perr(line, format!("expected `{}`", keys.iter().map(|k| format!("{k} <value>")).collect::<Vec<_>>().join(" ")));
    }
    let mut out = Vec::new();
    for (i, k) in keys.iter().enumerate() {
        if toks[2 * i] != *k {
            return perr(line, format!("expected key `{k}`, found `{}`", toks[2 * i]));
        }
        out.push(toks[2 * i + 1].to_string());
    }
    Ok(out)
}

fn keyed_num<T: std::str::FromStr>(v: &str, line: usize, what: &str) -> Result<T> {
    parse_num(Some(v), line, what)
}

pub fn write_coeffs<W: Write>(v: &CoefficientVector, mut out: W) -> Result<()> {
    writeln!(out, "{COEFFS_HEADER}")?;
    writeln!(out, "d {} max_degree {}", v.d(), v.max_degree())?;
    for (idx, c) in v.iter() {
        write!(out, "{}", idx.n())?;
        for k in idx.k() {
            write!(out, " {k}")?;
        }
        writeln!(out, " {:.16e} {:.16e}", c.re, c.im)?;
    }
    Ok(())
}

/// Reads a coefficient file; missing rows are zero.
pub fn read_coeffs<R: BufRead>(reader: R) -> Result<CoefficientVector> {
    let lines = content_lines(reader, COEFFS_HEADER)?;
    let Some((l0, dims)) = lines.first() else {
        return perr(2, "missing `d <d> max_degree <L>` line");
    };
    let v = parse_keyed(*l0, dims, &["d", "max_degree"])?;
    let d: usize = keyed_num(&v[0], *l0, "dimension")?;
    let max_degree: usize = keyed_num(&v[1], *l0, "max_degree")?;
    if d < 3 {
        return perr(*l0, format!("dimension must be at least 3, got {d}"));
    }
    let mut out = CoefficientVector::zeros(d, max_degree);
    let mut seen = HashSet::new();
    for (line, text) in &lines[1..] {
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() != d + 1 {
            return perr(*line, format!("expected {} fields (n, {} k's, re, im), found {}", d + 1, d - 2, toks.len()));
        }
        let n: usize = parse_num(Some(toks[0]), *line, "degree")?;
        let k = toks[1..d - 1]
            .iter()
            .map(|t| parse_num::<i64>(Some(t), *line, "index"))
            .collect::<Result<Vec<_>>>()?;
        let re: f64 = parse_num(Some(toks[d - 1]), *line, "real part")?;
        let im: f64 = parse_num(Some(toks[d]), *line, "imaginary part")?;
        if n > max_degree {
            return perr(*line, format!("degree {n} exceeds max_degree {max_degree}"));
        }
        let idx = HarmonicIndex::new(d, n, k).or_else(|e| perr(*line, e.to_string()))?;
        if !seen.insert(idx.position()) {
            return perr(*line, "duplicate index");
        }
        out.set(&idx, Complex64::new(re, im))?;
    }
    Ok(out)
}

pub fn write_frame_coeffs<W: Write>(frame: &Frame, c: &FrameCoefficients, mut out: W) -> Result<()> {
    writeln!(out, "{FRAME_COEFFS_HEADER}")?;
    writeln!(out, "d {} K {} Jmax {} atoms {}", frame.d(), frame.k(), frame.j_max(), c.len())?;
    for (j, i, v) in c.iter() {
        writeln!(out, "{j} {i} {:.16e} {:.16e}", v.re, v.im)?;
    }
    Ok(())
}

/// Reads frame coefficients laid out for `frame`; missing rows are zero.
pub fn read_frame_coeffs<R: BufRead>(reader: R, frame: &Frame) -> Result<FrameCoefficients> {
    let lines = content_lines(reader, FRAME_COEFFS_HEADER)?;
    let Some((l0, dims)) = lines.first() else {
        return perr(2, "missing `d <d> K <K> Jmax <J> atoms <count>` line");
    };
    let v = parse_keyed(*l0, dims, &["d", "K", "Jmax", "atoms"])?;
    let got: Vec<usize> = v.iter().map(|s| keyed_num(s, *l0, "header value")).collect::<Result<_>>()?;
    let want = [frame.d(), frame.k(), frame.j_max(), frame.atom_count()];
    if got != want {
        return perr(*l0, format!("file is for (d, K, Jmax, atoms) = {got:?}, frame has {want:?}"));
    }
    let mut out = FrameCoefficients::zeros(frame);
    let mut seen = HashSet::new();
    for (line, text) in &lines[1..] {
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() != 4 {
            return perr(*line, format!("expected `j i re im`, found {} fields", toks.len()));
        }
        let j: usize = parse_num(Some(toks[0]), *line, "scale")?;
        let i: usize = parse_num(Some(toks[1]), *line, "atom index")?;
        let re: f64 = parse_num(Some(toks[2]), *line, "real part")?;
        let im: f64 = parse_num(Some(toks[3]), *line, "imaginary part")?;
        if !seen.insert((j, i)) {
            return perr(*line, "duplicate atom");
        }
        out.set(j, i, Complex64::new(re, im)).or_else(|e| perr(*line, e.to_string()))?;
    }
    Ok(out)
}

fn write_row<W: Write>(out: &mut W, tag: &str, r: usize, row: &[Complex64]) -> std::io::Result<()> {
    write!(out, "{tag} {r}")?;
    for v in row {
        write!(out, " {:.16e} {:.16e}", v.re, v.im)?;
    }
    writeln!(out)
}

/// Writes a custom directionality table (`d = 3` or symmetric).
pub fn write_profile<W: Write>(p: &DirectionalProfile, mut out: W) -> Result<()> {
    let kind = match p.kind() {
        ProfileKind::CustomD3 => "d3",
        ProfileKind::CustomSymmetric | ProfileKind::SymmetricOptimal => "symmetric",
        ProfileKind::Zonal => "zonal",
    };
    writeln!(out, "{PROFILE_HEADER}")?;
    writeln!(out, "kind {kind} K {}", p.k())?;
    if p.kind() != ProfileKind::Zonal {
        for (r, row) in p.rows().iter().enumerate() {
            write_row(&mut out, "row", r, row)?;
        }
    }
    Ok(())
}

/// Reads a table written by [`write_profile`]: rows `row r re im …` for `r = 0..=K`.
pub fn read_profile<R: BufRead>(reader: R) -> Result<DirectionalProfile> {
    let lines = content_lines(reader, PROFILE_HEADER)?;
    let Some((l0, head)) = lines.first() else {
        return perr(2, "missing `kind <d3|symmetric|zonal> K <K>` line");
    };
    let v = parse_keyed(*l0, head, &["kind", "K"])?;
    let k: usize = keyed_num(&v[1], *l0, "K")?;
    let width = match v[0].as_str() {
        "zonal" => {
            if k != 0 || lines.len() > 1 {
                return perr(*l0, "a zonal profile has K = 0 and no rows");
            }
            return Ok(DirectionalProfile::zonal());
        }
        "d3" => 2 * k + 1,
        "symmetric" => k + 1,
        other => return perr(*l0, format!("unknown profile kind `{other}`")),
    };
    let mut rows: Vec<Option<Vec<Complex64>>> = vec![None; k + 1];
    for (line, text) in &lines[1..] {
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.first() != Some(&"row") {
            return perr(*line, "expected `row <r> re im …`");
        }
        let r: usize = parse_num(toks.get(1).copied(), *line, "row number")?;
        if r > k {
            return perr(*line, format!("row {r} exceeds K = {k}"));
        }
        if toks.len() != 2 + 2 * width {
            return perr(*line, format!("row needs {width} complex entries"));
        }
        let vals = toks[2..]
            .chunks(2)
            .map(|c| Ok(Complex64::new(parse_num(Some(c[0]), *line, "real part")?, parse_num(Some(c[1]), *line, "imaginary part")?)))
            .collect::<Result<Vec<_>>>()?;
        if rows[r].replace(vals).is_some() {
            return perr(*line, format!("duplicate row {r}"));
        }
    }
    let rows = rows
        .into_iter()
        .enumerate()
        .map(|(r, v)| v.ok_or_else(|| Error::Parse { line: *l0, msg: format!("missing row {r}") }))
        .collect::<Result<Vec<_>>>()?;
    if v[0] == "d3" {
        DirectionalProfile::custom_d3(k, rows)
    } else {
        DirectionalProfile::custom_symmetric(k, rows)
    }
}

/// Frame description: parameters, then per scale the position and direction nodes.
///
/// ```text
/// # sphere-frame description v1
/// d <d> K <K> Jmax <J> filter <name> profile <kind>
/// scale <j> positions <s_j> directions <r_j> position_degree <e> direction_degree <e>
/// position <j> <ℓ> <weight> <angles θ_1 … θ_{d-1}>
/// direction <j> <m> <weight> <γ | angles on 𝕊^{d-2}>
/// ```
pub fn write_frame_description<W: Write>(frame: &Frame, mut out: W) -> Result<()> {
    writeln!(out, "{FRAME_HEADER}")?;
    let profile = match frame.profile().kind() {
        ProfileKind::Zonal => "zonal",
        ProfileKind::SymmetricOptimal => "optimal",
        ProfileKind::CustomD3 => "d3",
        ProfileKind::CustomSymmetric => "symmetric",
    };
    writeln!(
        out,
        "d {} K {} Jmax {} filter {} profile {profile}",
        frame.d(),
        frame.k(),
        frame.j_max(),
        filter_name(frame.filter())
    )?;
    writeln!(out, "scale 0 positions 1 directions 1 position_degree 0 direction_degree 0")?;
    for s in frame.scales() {
        let dir_degree = s.directions().map(DirectionalRule::exact_degree).unwrap_or(0);
        writeln!(
            out,
            "scale {} positions {} directions {} position_degree {} direction_degree {dir_degree}",
            s.j(),
            s.position_count(),
            s.direction_count(),
            s.positions().exact_degree
        )?;
        for (l, (p, w)) in s.positions().points.iter().zip(&s.positions().weights).enumerate() {
            write!(out, "position {} {l} {w:.16e}", s.j())?;
            for a in p.angles() {
                write!(out, " {a:.16e}")?;
            }
            writeln!(out)?;
        }
        match s.directions() {
            None => writeln!(out, "direction {} 0 {:.16e}", s.j(), 1.0)?,
            Some(DirectionalRule::So2 { angles, weights, .. }) => {
                for (m, (g, w)) in angles.iter().zip(weights).enumerate() {
                    writeln!(out, "direction {} {m} {w:.16e} {g:.16e}", s.j())?;
                }
            }
            Some(DirectionalRule::Sphere(r)) => {
                for (m, (p, w)) in r.points.iter().zip(&r.weights).enumerate() {
                    write!(out, "direction {} {m} {w:.16e}", s.j())?;
                    for a in p.angles() {
                        write!(out, " {a:.16e}")?;
                    }
                    writeln!(out)?;
                }
            }
        }
    }
    Ok(())
}

/// Parameters recorded in a frame description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameHeader {
    pub d: usize,
    pub k: usize,
    pub j_max: usize,
    pub filter: String,
    pub profile: String,
}

/// Reads the parameter line of a frame description (node rows are not needed to rebuild it).
pub fn read_frame_header<R: BufRead>(reader: R) -> Result<FrameHeader> {
    let lines = content_lines(reader, FRAME_HEADER)?;
    let Some((l0, head)) = lines.first() else {
        return perr(2, "missing parameter line");
    };
    let v = parse_keyed(*l0, head, &["d", "K", "Jmax", "filter", "profile"])?;
    Ok(FrameHeader {
        d: keyed_num(&v[0], *l0, "d")?,
        k: keyed_num(&v[1], *l0, "K")?,
        j_max: keyed_num(&v[2], *l0, "Jmax")?,
        filter: v[3].clone(),
        profile: v[4].clone(),
    })
}

/// `bump` or `spline:<q>`.
pub fn filter_name(f: crate::filters::FilterProfile) -> String {
    match f {
        crate::filters::FilterProfile::SmoothBump => "bump".into(),
        crate::filters::FilterProfile::Spline { q } => format!("spline:{q}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::random_signal;

    #[test]
    fn coefficient_round_trip_is_exact() {
        let v = random_signal(4, 5, 3).unwrap();
        let mut buf = Vec::new();
        write_coeffs(&v, &mut buf).unwrap();
        assert_eq!(read_coeffs(buf.as_slice()).unwrap(), v);
    }

    #[test]
    fn empty_body_gives_zeros() {
        let text = format!("{COEFFS_HEADER}\nd 3 max_degree 2\n");
        assert_eq!(read_coeffs(text.as_bytes()).unwrap(), CoefficientVector::zeros(3, 2));
    }

    #[test]
    fn bad_rows_report_their_line() {
        let bad_k = format!("{COEFFS_HEADER}\nd 4 max_degree 3\n1 0 0 1.0 0.0\n2 3 0 1.0 0.0\n");
        assert!(matches!(read_coeffs(bad_k.as_bytes()), Err(Error::Parse { line: 4, .. })));
        let dup = format!("{COEFFS_HEADER}\nd 3 max_degree 3\n1 1 1.0 0.0\n\n1 1 2.0 0.0\n");
        assert!(matches!(read_coeffs(dup.as_bytes()), Err(Error::Parse { line: 5, .. })));
        let short = format!("{COEFFS_HEADER}\nd 3 max_degree 3\n1 1 1.0\n");
        assert!(matches!(read_coeffs(short.as_bytes()), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(read_coeffs("d 3 max_degree 1\n".as_bytes()), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn profile_round_trip() {
        let p = DirectionalProfile::d3_convention(3);
        let mut buf = Vec::new();
        write_profile(&p, &mut buf).unwrap();
        let q = read_profile(buf.as_slice()).unwrap();
        assert_eq!(q.rows(), p.rows());
        assert_eq!(q.kind(), ProfileKind::CustomD3);
    }
}
