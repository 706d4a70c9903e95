//! Plain-text truss files.
//!
//! ```text
//! # comment
//! [material]
//! youngs_modulus 6.88e6
//! density 2.7e-3
//!
//! [nodes]
//! # id x y            (cm; ids run 1..n in order)
//! 1 0 910
//!
//! [members]
//! # id node_a node_b area      (cm²)
//! 1 1 5 60.39
//!
//! [supports]
//! # node fix_x fix_y  (0 or 1)
//! 1 1 1
//!
//! [loads]
//! # node fx fy        (N)
//! 3 0 -444822
//! ```
//!
//! Sections may appear in any order, except that `[nodes]` must precede the
//! sections that refer to nodes. Writing then parsing gives back an
//! identical model.

use std::fmt::Write as _;

use super::{Material, TrussError, TrussModel};

pub fn write_truss(model: &TrussModel) -> String {
    let mut out = String::new();
    let m = model.material();
    let _ = writeln!(out, "[material]");
    let _ = writeln!(out, "youngs_modulus {}", m.youngs_modulus);
    let _ = writeln!(out, "density {}", m.density);
    let _ = writeln!(out, "\n[nodes]\n# id x y");
    for (i, [x, y]) in model.nodes().iter().enumerate() {
        let _ = writeln!(out, "{} {x} {y}", i + 1);
    }
    let _ = writeln!(out, "\n[members]\n# id node_a node_b area");
    for (i, mem) in model.members().iter().enumerate() {
        let _ = writeln!(out, "{} {} {} {}", i + 1, mem.a + 1, mem.b + 1, mem.area);
    }
    let _ = writeln!(out, "\n[supports]\n# node fix_x fix_y");
    for (i, s) in model.supports().iter().enumerate() {
        if s[0] || s[1] {
            let _ = writeln!(out, "{} {} {}", i + 1, s[0] as u8, s[1] as u8);
        }
    }
    let _ = writeln!(out, "\n[loads]\n# node fx fy");
    for (i, l) in model.loads().iter().enumerate() {
        if l[0] != 0.0 || l[1] != 0.0 {
            let _ = writeln!(out, "{} {} {}", i + 1, l[0], l[1]);
        }
    }
    out
}

pub fn parse_truss(text: &str) -> Result<TrussModel, TrussError> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Material,
        Nodes,
        Members,
        Supports,
        Loads,
    }
    let mut section = Section::None;
    let mut youngs = None;
    let mut density = None;
    let mut nodes: Vec<[f64; 2]> = Vec::new();
    let mut members: Vec<(usize, usize, f64, usize)> = Vec::new();
    let mut supports: Vec<(usize, bool, bool, usize)> = Vec::new();
    let mut loads: Vec<(usize, f64, f64, usize)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| TrussError::Parse { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = match name.trim() {
                "material" => Section::Material,
                "nodes" => Section::Nodes,
                "members" => Section::Members,
                "supports" => Section::Supports,
                "loads" => Section::Loads,
                other => return Err(err(format!("unknown section [{other}]"))),
            };
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let num = |s: &str| -> Result<f64, TrussError> {
            s.parse::<f64>()
                .map_err(|_| err(format!("'{s}' is not a number")))
        };
        let id = |s: &str| -> Result<usize, TrussError> {
            s.parse::<usize>()
                .ok()
                .filter(|&v| v >= 1)
                .ok_or_else(|| err(format!("'{s}' is not a 1-based id")))
        };
        let flag = |s: &str| -> Result<bool, TrussError> {
            match s {
                "0" => Ok(false),
                "1" => Ok(true),
                _ => Err(err(format!("'{s}' is not 0 or 1"))),
            }
        };
        let expect = |n: usize| -> Result<(), TrussError> {
            if fields.len() != n {
                return Err(err(format!("expected {n} fields, found {}", fields.len())));
            }
            Ok(())
        };
        match section {
            Section::None => return Err(err("data before any section header".into())),
            Section::Material => {
                expect(2)?;
                let v = num(fields[1])?;
                match fields[0] {
                    "youngs_modulus" => youngs = Some(v),
                    "density" => density = Some(v),
                    k => return Err(err(format!("unknown material key '{k}'"))),
                }
            }
            Section::Nodes => {
                expect(3)?;
                let n = id(fields[0])?;
                if n != nodes.len() + 1 {
                    return Err(err(format!("node {n} out of sequence")));
                }
                nodes.push([num(fields[1])?, num(fields[2])?]);
            }
            Section::Members => {
                expect(4)?;
                let n = id(fields[0])?;
                if n != members.len() + 1 {
                    return Err(err(format!("member {n} out of sequence")));
                }
                members.push((id(fields[1])? - 1, id(fields[2])? - 1, num(fields[3])?, line));
            }
            Section::Supports => {
                expect(3)?;
                supports.push((id(fields[0])? - 1, flag(fields[1])?, flag(fields[2])?, line));
            }
            Section::Loads => {
                expect(3)?;
                loads.push((id(fields[0])? - 1, num(fields[1])?, num(fields[2])?, line));
            }
        }
    }

    let missing = |what: &str| TrussError::Parse {
        line: 0,
        message: format!("missing material {what}"),
    };
    let material = Material {
        youngs_modulus: youngs.ok_or_else(|| missing("youngs_modulus"))?,
        density: density.ok_or_else(|| missing("density"))?,
    };
    let mut model = TrussModel::new(material);
    for [x, y] in nodes {
        model.add_node(x, y);
    }
    let at = |line: usize| move |e: TrussError| TrussError::Parse {
        line,
        message: e.to_string(),
    };
    for (a, b, area, line) in members {
        model.add_member(a, b, area).map_err(at(line))?;
    }
    for (n, fx, fy, line) in supports {
        model.fix(n, fx, fy).map_err(at(line))?;
    }
    for (n, px, py, line) in loads {
        model.set_load(n, px, py).map_err(at(line))?;
    }
    Ok(model)
}
