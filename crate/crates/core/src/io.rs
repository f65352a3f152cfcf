//! Stage file formats. Every file starts with `#` comment lines recording the
//! tool version, the stage and the configuration that produced it; readers
//! skip them.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::clique::CliqueSet;
use crate::error::{Error, Result};
use crate::itemset::InterestingPattern;
use crate::model::{Dataset, Dims, ObjectType, SpatialObject};
use crate::relation::{ComplexRelationship, Item};

pub const TOOL: &str = "gcg";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
const UNIVERSE_PREFIX: &str = "# universe:";

/// The comment block opening every output file.
pub fn header(stage: &str, config: &str) -> String {
    format!("# {TOOL} {VERSION} {stage}\n# config: {config}\n")
}

fn parse_err(source: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: source.into(),
        line: line as u64,
        message: message.into(),
    }
}

/// `id,type,x,y[,z]`.
pub fn write_points(out: &mut String, objects: &[SpatialObject], dims: Dims) {
    out.push_str(match dims {
        Dims::Two => "id,type,x,y\n",
        Dims::Three => "id,type,x,y,z\n",
    });
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for o in objects {
        let mut rec = vec![o.id.clone(), o.kind.to_string()];
        rec.extend(o.coords.as_slice().iter().map(f64::to_string));
        w.write_record(&rec).expect("writing to memory");
    }
    let bytes = w.into_inner().expect("writing to memory");
    out.push_str(std::str::from_utf8(&bytes).expect("csv output is utf-8"));
}

/// Reads a points file. When `expected` is given, the file's dimensionality
/// must match it.
pub fn read_points(text: &str, source: &str, expected: Option<Dims>) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| parse_err(source, 1, e.to_string()))?
        .clone();
    let names: Vec<&str> = headers.iter().collect();
    let dims = match names.as_slice() {
        ["id", "type", "x", "y"] => Dims::Two,
        ["id", "type", "x", "y", "z"] => Dims::Three,
        _ => {
            return Err(parse_err(
                source,
                headers.position().map_or(1, |p| p.line() as usize),
                format!("expected columns id,type,x,y[,z], found {}", names.join(",")),
            ))
        }
    };
    if let Some(want) = expected {
        if want != dims {
            return Err(Error::input(format!("{source}: file holds {dims}D points but --dims is {want}")));
        }
    }
    let mut objects = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| parse_err(source, e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let kind = ObjectType::new(&record[1]).map_err(|e| parse_err(source, line, e.to_string()))?;
        let coords = (2..record.len())
            .map(|i| record[i].parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| parse_err(source, line, format!("bad coordinate: {e}")))?;
        let obj = SpatialObject::new(&record[0], kind, &coords).map_err(|e| parse_err(source, line, e.to_string()))?;
        objects.push(obj);
    }
    Dataset::new(dims, objects)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliqueRecord {
    pub members: Vec<String>,
    pub types: Vec<ObjectType>,
    pub size: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CliqueFile {
    pub universe: Option<Vec<ObjectType>>,
    pub cliques: Vec<CliqueRecord>,
}

pub fn clique_records(cliques: &CliqueSet, dataset: &Dataset) -> Vec<CliqueRecord> {
    cliques
        .iter()
        .map(|c| CliqueRecord {
            members: c.ids(dataset).into_iter().map(str::to_owned).collect(),
            types: c.members().iter().map(|&i| dataset.get(i).kind.clone()).collect(),
            size: c.len(),
        })
        .collect()
}

pub fn write_cliques(out: &mut String, universe: &[ObjectType], records: &[CliqueRecord]) {
    let labels: Vec<&str> = universe.iter().map(ObjectType::as_str).collect();
    let _ = writeln!(out, "{UNIVERSE_PREFIX} {}", labels.join(","));
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("clique records serialize"));
        out.push('\n');
    }
}

pub fn read_cliques(text: &str, source: &str) -> Result<CliqueFile> {
    let mut file = CliqueFile::default();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if let Some(rest) = line.strip_prefix(UNIVERSE_PREFIX) {
            let universe = rest
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(ObjectType::new)
                .collect::<Result<Vec<_>>>()
                .map_err(|e| parse_err(source, lineno, e.to_string()))?;
            file.universe = Some(universe);
            continue;
        }
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let rec: CliqueRecord = serde_json::from_str(line).map_err(|e| parse_err(source, lineno, e.to_string()))?;
        if rec.members.len() != rec.types.len() || rec.size != rec.members.len() {
            return Err(parse_err(
                source,
                lineno,
                format!(
                    "clique has {} members, {} types and size {}",
                    rec.members.len(),
                    rec.types.len(),
                    rec.size
                ),
            ));
        }
        file.cliques.push(rec);
    }
    Ok(file)
}

pub fn write_histogram(out: &mut String, hist: &BTreeMap<usize, usize>) {
    out.push_str("cardinality,count\n");
    for (k, v) in hist {
        let _ = writeln!(out, "{k},{v}");
    }
}

pub fn write_transactions(out: &mut String, relationships: &[ComplexRelationship]) {
    for r in relationships {
        out.push_str(&r.render());
        out.push('\n');
    }
}

pub fn read_transactions(text: &str, source: &str) -> Result<Vec<Vec<Item>>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.starts_with('#') {
            continue;
        }
        let items = line
            .split_whitespace()
            .map(str::parse::<Item>)
            .collect::<Result<Vec<_>>>()
            .map_err(|e| parse_err(source, i + 1, e.to_string()))?;
        out.push(items);
    }
    Ok(out)
}

/// `items,support,minpi`; items joined by `;`, minPI to six decimals.
pub fn write_patterns(out: &mut String, patterns: &[InterestingPattern]) {
    out.push_str("items,support,minpi\n");
    for p in patterns {
        let _ = writeln!(out, "{},{},{:.6}", p.render_items(), p.support, p.minpi);
    }
}
