//! File formats: instances and trees as JSON with coordinates written as
//! 17-significant-digit strings, result records, orbit and region CSV.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::{DynamicsParams, Orbit, OrbitStatus};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::ladder::{build_input, FamilySpec, InputFamily, LadderParams};
use crate::tree::{EmbeddedTree, Role, Terminal, TerminalSet, Vertex};

pub const SCHEMA: u32 = 1;

/// Exactly round-trips any finite `f64`.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn parse_f64(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: {s:?}")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Parse(format!("not finite: {s:?}")))
    }
}

/// A number, or a multiple of pi such as `pi/36`, `2pi/9`, `-pi/12`, `0.5*pi`.
pub fn parse_angle(s: &str) -> Result<f64> {
    let t: String = s
        .trim()
        .to_ascii_lowercase()
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    let Some(at) = t.find("pi") else {
        return parse_f64(&t);
    };
    let bad = || Error::Parse(format!("cannot read angle {s:?}"));
    let (head, tail) = (&t[..at], &t[at + 2..]);
    let coef = match head.trim_end_matches('*') {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => parse_f64(c).map_err(|_| bad())?,
    };
    let den = match tail {
        "" => 1.0,
        d => parse_f64(d.strip_prefix('/').ok_or_else(bad)?).map_err(|_| bad())?,
    };
    if den == 0.0 {
        return Err(bad());
    }
    Ok(coef * std::f64::consts::PI / den)
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    family: InputFamily,
    alpha: String,
    lambda: String,
    depth: usize,
}

impl From<&FamilySpec> for FamilyJson {
    fn from(f: &FamilySpec) -> Self {
        FamilyJson {
            family: f.family,
            alpha: fmt17(f.params.alpha),
            lambda: fmt17(f.params.lambda),
            depth: f.params.depth,
        }
    }
}

impl FamilyJson {
    fn spec(&self) -> Result<FamilySpec> {
        Ok(FamilySpec {
            family: self.family,
            params: LadderParams::new(parse_f64(&self.alpha)?, parse_f64(&self.lambda)?, self.depth)?,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct TerminalJson {
    label: String,
    x: String,
    y: String,
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    schema: u32,
    terminals: Vec<TerminalJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    accumulation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    segment: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<FamilyJson>,
}

pub fn instance_to_json(ts: &TerminalSet) -> String {
    let label = |i: usize| ts.terminals[i].label.clone();
    let doc = InstanceJson {
        schema: SCHEMA,
        terminals: ts
            .terminals
            .iter()
            .map(|t| TerminalJson {
                label: t.label.clone(),
                x: fmt17(t.pos.x),
                y: fmt17(t.pos.y),
            })
            .collect(),
        accumulation: ts.accumulation.map(label),
        segment: ts.segment.map(|(a, b)| [label(a), label(b)]),
        family: ts.family.as_ref().map(FamilyJson::from),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serialises") + "\n"
}

/// Parses an instance; a family descriptor must regenerate the coordinates bit for bit.
pub fn instance_from_json(s: &str) -> Result<TerminalSet> {
    let doc: InstanceJson = serde_json::from_str(s)?;
    if doc.schema != SCHEMA {
        return Err(Error::Parse(format!("unsupported schema {}", doc.schema)));
    }
    let terminals = doc
        .terminals
        .iter()
        .map(|t| {
            Ok(Terminal {
                label: t.label.clone(),
                pos: Point::new(parse_f64(&t.x)?, parse_f64(&t.y)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut ts = TerminalSet::new(terminals)?;
    let find = |ts: &TerminalSet, l: &str| {
        ts.index_of(l)
            .ok_or_else(|| Error::Parse(format!("unknown label {l:?}")))
    };
    ts.accumulation = doc.accumulation.as_deref().map(|l| find(&ts, l)).transpose()?;
    ts.segment = match &doc.segment {
        Some([a, b]) => Some((find(&ts, a)?, find(&ts, b)?)),
        None => None,
    };
    if let Some(f) = &doc.family {
        let spec = f.spec()?;
        let regenerated = build_input(&spec.params, spec.family)?;
        if regenerated.terminals != ts.terminals {
            return Err(Error::Parse("coordinates do not match the family descriptor".into()));
        }
        ts = regenerated;
    }
    Ok(ts)
}

#[derive(Serialize, Deserialize)]
struct VertexJson {
    x: String,
    y: String,
    role: Role,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct TreeJson {
    schema: u32,
    length: String,
    vertices: Vec<VertexJson>,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<FamilyJson>,
}

pub fn tree_to_json(tree: &EmbeddedTree, family: Option<&FamilySpec>) -> String {
    let doc = TreeJson {
        schema: SCHEMA,
        length: fmt17(tree.length),
        vertices: tree
            .vertices
            .iter()
            .map(|v| VertexJson {
                x: fmt17(v.pos.x),
                y: fmt17(v.pos.y),
                role: v.role,
                label: v.label.clone(),
            })
            .collect(),
        edges: tree.edges.iter().map(|&(a, b)| [a, b]).collect(),
        family: family.map(FamilyJson::from),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serialises") + "\n"
}

pub fn tree_from_json(s: &str) -> Result<(EmbeddedTree, Option<FamilySpec>)> {
    let doc: TreeJson = serde_json::from_str(s)?;
    if doc.schema != SCHEMA {
        return Err(Error::Parse(format!("unsupported schema {}", doc.schema)));
    }
    let vertices = doc
        .vertices
        .iter()
        .map(|v| {
            Ok(Vertex {
                pos: Point::new(parse_f64(&v.x)?, parse_f64(&v.y)?),
                role: v.role,
                label: v.label.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = vertices.len();
    if let Some(e) = doc.edges.iter().find(|e| e[0] >= n || e[1] >= n || e[0] == e[1]) {
        return Err(Error::Parse(format!("bad edge {e:?}")));
    }
    let family = doc.family.as_ref().map(FamilyJson::spec).transpose()?;
    let edges = doc.edges.iter().map(|e| (e[0], e[1])).collect();
    Ok((EmbeddedTree::new(vertices, edges), family))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub id: String,
    pub method: String,
    pub length: f64,
    pub co_optima: usize,
    pub wall_time_s: f64,
}

/// `k,nu,mu,branch`; a final row records where an orbit stopped early.
pub fn orbit_csv(p: &DynamicsParams, orbit: &Orbit) -> String {
    let mut out = String::from("k,nu,mu,branch\n");
    for (k, &nu) in orbit.values.iter().enumerate() {
        let branch = if nu > p.t_star {
            "a"
        } else if nu < p.t_star {
            "b"
        } else {
            "split"
        };
        let _ = writeln!(out, "{k},{},{},{branch}", fmt17(nu), fmt17(p.level_of_nu(nu, k)));
    }
    match orbit.status {
        OrbitStatus::Ok => {}
        OrbitStatus::Escaped(k) => {
            let _ = writeln!(out, "{k},,,escaped");
        }
        OrbitStatus::HitForbidden(k) => {
            let _ = writeln!(out, "{k},,,forbidden");
        }
    }
    out
}

/// Parses the rows written by [`orbit_csv`] back into values.
pub fn orbit_values_from_csv(s: &str) -> Result<Vec<f64>> {
    let mut lines = s.lines();
    if lines.next().map(str::trim) != Some("k,nu,mu,branch") {
        return Err(Error::Parse("missing orbit header".into()));
    }
    let mut out = Vec::new();
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(Error::Parse(format!("bad orbit row {line:?}")));
        }
        if cols[1].is_empty() {
            break;
        }
        out.push(parse_f64(cols[1])?);
    }
    Ok(out)
}

pub fn region_csv(rows: &[(f64, f64, bool, bool)]) -> String {
    let mut out = String::from("alpha,lambda,condition,rhombus\n");
    for &(a, l, c, p) in rows {
        let _ = writeln!(out, "{},{},{},{}", fmt17(a), fmt17(l), c as u8, p as u8);
    }
    out
}

/// Writes through a temporary file in the same directory and renames it.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}
