//! The `.ptri` text format: a line-oriented description of a marked surface
//! with a partial triangulation, `#` comments allowed anywhere.
//!
//! ```text
//! surface genus=0 boundaries=1
//! point A boundary=0:0 m=1 lambda=1
//! point C interior m=2 lambda=1
//! arc CA CA_C@C CA_A@A
//! rotation A: AD_A BA_A CA_A
//! face OUT genus=0 encloses=[0] isolated=[N] side=MN_M.R
//! ```
//!
//! A face annotation may span several `face` lines with the same id, one
//! anchor each (a face can own several traced walks). `side=@c:i` anchors a
//! walk through boundary segment `i` of component `c`, for walks that touch
//! no arc. A face line without `side=` describes the single face of an
//! arc-free surface.

use crate::brauer::{BrauerGraph, BrauerSpec};
use crate::faces;
use crate::scalar::Ring;
use crate::surface::{
    AnchorSpec, FaceSpecLine, Location, PartialTriangulation, Side, SurfaceError, SurfaceSpec,
    ValidationReport,
};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PtriError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("surface construction failed: {0}")]
    Surface(#[from] SurfaceError),
    #[error("validation failed: {0:?}")]
    Validation(ValidationReport),
}

fn syntax(line: usize, message: impl Into<String>) -> PtriError {
    PtriError::Syntax { line, message: message.into() }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_kv<'a>(token: &'a str, key: &str, line: usize) -> Result<&'a str, PtriError> {
    token
        .strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| syntax(line, format!("expected {key}=..., got {token:?}")))
}

fn parse_usize(text: &str, line: usize) -> Result<usize, PtriError> {
    text.parse()
        .map_err(|_| syntax(line, format!("expected integer, got {text:?}")))
}

fn parse_list(text: &str, line: usize) -> Result<Vec<String>, PtriError> {
    let inner = text
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| syntax(line, format!("expected [..], got {text:?}")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    Ok(inner.split(',').map(|s| s.trim().to_string()).collect())
}

/// Parses a `.ptri` document without running validation.
pub fn parse_ptri_unchecked(text: &str, ring: Ring) -> Result<PartialTriangulation, PtriError> {
    let spec = parse_spec(text, ring)?;
    Ok(PartialTriangulation::from_spec(ring, &spec)?)
}

/// Parses and validates; validation violations are an error here.
pub fn parse_ptri(text: &str, ring: Ring) -> Result<PartialTriangulation, PtriError> {
    let t = parse_ptri_unchecked(text, ring)?;
    let report = faces::validate(&t);
    if report.ok() {
        Ok(t)
    } else {
        Err(PtriError::Validation(report))
    }
}

pub fn parse_spec(text: &str, ring: Ring) -> Result<SurfaceSpec, PtriError> {
    let mut spec = SurfaceSpec::default();
    let mut saw_surface = false;
    let mut face_lines: HashMap<String, usize> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap();
        let rest: Vec<&str> = tokens.collect();
        match head {
            "surface" => {
                if rest.len() != 2 {
                    return Err(syntax(line_no, "surface genus=<g> boundaries=<b>"));
                }
                spec.genus = parse_usize(parse_kv(rest[0], "genus", line_no)?, line_no)? as u32;
                spec.boundary_count =
                    parse_usize(parse_kv(rest[1], "boundaries", line_no)?, line_no)? as u32;
                saw_surface = true;
            }
            "point" => {
                if rest.len() != 4 {
                    return Err(syntax(
                        line_no,
                        "point <id> interior|boundary=<c>:<i> m=<m> lambda=<l>",
                    ));
                }
                let name = rest[0].to_string();
                let location = if rest[1] == "interior" {
                    Location::Interior
                } else {
                    let pos = parse_kv(rest[1], "boundary", line_no)?;
                    let (c, i) = pos
                        .split_once(':')
                        .ok_or_else(|| syntax(line_no, "boundary=<component>:<position>"))?;
                    Location::Boundary {
                        component: parse_usize(c, line_no)?,
                        position: parse_usize(i, line_no)?,
                    }
                };
                let m = parse_usize(parse_kv(rest[2], "m", line_no)?, line_no)? as u32;
                let lambda = ring
                    .parse(parse_kv(rest[3], "lambda", line_no)?)
                    .map_err(|e| syntax(line_no, e.to_string()))?;
                spec.points.push((name, location, m, lambda));
            }
            "arc" => {
                if rest.len() != 3 {
                    return Err(syntax(line_no, "arc <id> <h>@<point> <h>@<point>"));
                }
                let parse_end = |tok: &str| -> Result<(String, String), PtriError> {
                    tok.split_once('@')
                        .map(|(h, p)| (h.to_string(), p.to_string()))
                        .ok_or_else(|| syntax(line_no, "arc ends are <halfedge>@<point>"))
                };
                spec.arcs.push((
                    rest[0].to_string(),
                    parse_end(rest[1])?,
                    parse_end(rest[2])?,
                ));
            }
            "rotation" => {
                let joined = rest.join(" ");
                let (point, halves) = joined
                    .split_once(':')
                    .ok_or_else(|| syntax(line_no, "rotation <point>: <halfedges...>"))?;
                spec.rotations.push((
                    point.trim().to_string(),
                    halves.split_whitespace().map(|s| s.to_string()).collect(),
                ));
            }
            "face" => {
                if rest.is_empty() {
                    return Err(syntax(line_no, "face <id> ..."));
                }
                let name = rest[0].to_string();
                let mut genus = 0u32;
                let mut enclosed = Vec::new();
                let mut isolated = Vec::new();
                let mut anchors = Vec::new();
                for tok in &rest[1..] {
                    if let Some(v) = tok.strip_prefix("genus=") {
                        genus = parse_usize(v, line_no)? as u32;
                    } else if let Some(v) = tok.strip_prefix("encloses=") {
                        enclosed = parse_list(v, line_no)?
                            .into_iter()
                            .map(|s| parse_usize(&s, line_no))
                            .collect::<Result<_, _>>()?;
                    } else if let Some(v) = tok.strip_prefix("isolated=") {
                        isolated = parse_list(v, line_no)?;
                    } else if let Some(v) = tok.strip_prefix("side=") {
                        if let Some(seg) = v.strip_prefix('@') {
                            let (c, i) = seg
                                .split_once(':')
                                .ok_or_else(|| syntax(line_no, "side=@<component>:<segment>"))?;
                            anchors.push(AnchorSpec::Segment(
                                parse_usize(c, line_no)?,
                                parse_usize(i, line_no)?,
                            ));
                        } else {
                            let (h, s) = v
                                .rsplit_once('.')
                                .ok_or_else(|| syntax(line_no, "side=<halfedge>.<L|R>"))?;
                            let side = match s {
                                "L" => Side::Left,
                                "R" => Side::Right,
                                _ => return Err(syntax(line_no, "side must end in .L or .R")),
                            };
                            anchors.push(AnchorSpec::Half(h.to_string(), side));
                        }
                    } else {
                        return Err(syntax(line_no, format!("unknown face field {tok:?}")));
                    }
                }
                match face_lines.get(&name) {
                    Some(&i) => {
                        let existing = &mut spec.faces[i];
                        if existing.genus != genus
                            || existing.enclosed != enclosed
                            || existing.isolated != isolated
                        {
                            return Err(syntax(
                                line_no,
                                format!("face {name:?} redeclared with different fields"),
                            ));
                        }
                        existing.anchors.extend(anchors);
                    }
                    None => {
                        face_lines.insert(name.clone(), spec.faces.len());
                        spec.faces.push(FaceSpecLine { name, genus, enclosed, isolated, anchors });
                    }
                }
            }
            other => return Err(syntax(line_no, format!("unknown directive {other:?}"))),
        }
    }
    if !saw_surface {
        return Err(syntax(0, "missing `surface genus=.. boundaries=..` line"));
    }
    Ok(spec)
}

/// Canonical text for a triangulation; `parse_ptri` of the result rebuilds
/// an identical structure.
pub fn serialize_ptri(t: &PartialTriangulation) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "surface genus={} boundaries={}\n",
        t.genus, t.boundary_count
    ));
    for p in &t.points {
        let loc = match p.location {
            Location::Interior => "interior".to_string(),
            Location::Boundary { component, position } => {
                format!("boundary={component}:{position}")
            }
        };
        out.push_str(&format!(
            "point {} {} m={} lambda={}\n",
            p.name, loc, p.multiplicity, p.lambda
        ));
    }
    for arc in &t.arcs {
        let h0 = &t.half_edges[arc.halves[0].0];
        let h1 = &t.half_edges[arc.halves[1].0];
        out.push_str(&format!(
            "arc {} {}@{} {}@{}\n",
            arc.name,
            h0.name,
            t.point_name(h0.point),
            h1.name,
            t.point_name(h1.point)
        ));
    }
    for (p, rot) in t.rotations.iter().enumerate() {
        if rot.is_empty() {
            continue;
        }
        let halves: Vec<&str> = rot.iter().map(|h| t.half_edges[h.0].name.as_str()).collect();
        out.push_str(&format!(
            "rotation {}: {}\n",
            t.point_name(crate::surface::PointId(p)),
            halves.join(" ")
        ));
    }
    for face in &t.faces {
        let enclosed: Vec<String> = face.enclosed.iter().map(|c| c.to_string()).collect();
        let isolated: Vec<String> = face
            .isolated
            .iter()
            .map(|&p| t.point_name(p).to_string())
            .collect();
        let base = format!(
            "face {} genus={} encloses=[{}] isolated=[{}]",
            face.name,
            face.genus,
            enclosed.join(","),
            isolated.join(",")
        );
        if face.anchors.is_empty() {
            out.push_str(&base);
            out.push('\n');
        } else {
            for anchor in &face.anchors {
                match anchor {
                    crate::surface::SideRef::Half { half_edge, side } => {
                        let s = match side {
                            Side::Left => "L",
                            Side::Right => "R",
                        };
                        out.push_str(&format!(
                            "{base} side={}.{s}\n",
                            t.half_edges[half_edge.0].name
                        ));
                    }
                    crate::surface::SideRef::Segment { component, index } => {
                        out.push_str(&format!("{base} side=@{component}:{index}\n"));
                    }
                }
            }
        }
    }
    out
}

/// Reduced dialect for Brauer graphs: `point <id> m=<m> lambda=<l>`, arcs and
/// rotations as above; no surface header, no boundary, no face lines.
pub fn parse_brauer(text: &str, ring: Ring) -> Result<BrauerGraph, PtriError> {
    let mut spec = BrauerSpec::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap();
        let rest: Vec<&str> = tokens.collect();
        match head {
            "point" | "vertex" => {
                if rest.len() != 3 {
                    return Err(syntax(line_no, "point <id> m=<m> lambda=<l>"));
                }
                let m = parse_usize(parse_kv(rest[1], "m", line_no)?, line_no)? as u32;
                let lambda = ring
                    .parse(parse_kv(rest[2], "lambda", line_no)?)
                    .map_err(|e| syntax(line_no, e.to_string()))?;
                spec.vertices.push((rest[0].to_string(), m, lambda));
            }
            "arc" | "edge" => {
                if rest.len() != 3 {
                    return Err(syntax(line_no, "arc <id> <h>@<vertex> <h>@<vertex>"));
                }
                let parse_end = |tok: &str| -> Result<(String, String), PtriError> {
                    tok.split_once('@')
                        .map(|(h, p)| (h.to_string(), p.to_string()))
                        .ok_or_else(|| syntax(line_no, "arc ends are <halfedge>@<vertex>"))
                };
                spec.edges.push((
                    rest[0].to_string(),
                    parse_end(rest[1])?,
                    parse_end(rest[2])?,
                ));
            }
            "rotation" => {
                let joined = rest.join(" ");
                let (v, halves) = joined
                    .split_once(':')
                    .ok_or_else(|| syntax(line_no, "rotation <vertex>: <halfedges...>"))?;
                spec.rotations.push((
                    v.trim().to_string(),
                    halves.split_whitespace().map(|s| s.to_string()).collect(),
                ));
            }
            other => return Err(syntax(line_no, format!("unknown directive {other:?}"))),
        }
    }
    BrauerGraph::from_spec(ring, &spec).map_err(PtriError::from)
}
