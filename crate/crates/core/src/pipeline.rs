//! Stage functions shared by the CLI and in-process runs. Each stage takes
//! the previous stage's file contents and returns the text of its own output,
//! so running the stages through files and running them back to back in
//! memory yield the same bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use crate::clique::{
    cardinality_histogram, faithful_prune, grid_neighborhoods, mine_maximal_cliques, CliqueSet,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ingest::{read_catalog, HubbleParams, IngestReport, ZConfDirection};
use crate::io::{self, CliqueFile, CliqueRecord};
use crate::itemset::{mine_interesting, InterestingPattern, Thresholds, TransactionDb};
use crate::model::{validate_tau, Dataset, Dims, ObjectType};
use crate::relation::{extract_relationship, ComplexRelationship, Item};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub tau: f64,
    /// Expected dimensionality; `None` accepts whatever the input holds.
    pub dims: Option<Dims>,
    pub hubble: HubbleParams,
    pub thresholds: Thresholds,
    pub seed: u64,
    pub faithful_prune: bool,
    pub no_negatives: bool,
    pub zconf_direction: ZConfDirection,
    /// Fixed type universe; `None` derives it from the data.
    pub universe: Option<Vec<ObjectType>>,
    /// Not echoed into output headers: it never changes results.
    pub exec: Execution,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            tau: 1.0,
            dims: None,
            hubble: HubbleParams::default(),
            thresholds: Thresholds::default(),
            seed: 0,
            faithful_prune: false,
            no_negatives: false,
            zconf_direction: ZConfDirection::default(),
            universe: None,
            exec: Execution::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        validate_tau(self.tau)?;
        HubbleParams::new(self.hubble.c, self.hubble.h0)?;
        Thresholds::new(self.thresholds.min_support, self.thresholds.min_minpi)?;
        if let Some(u) = &self.universe {
            let distinct: BTreeSet<_> = u.iter().collect();
            if distinct.len() != u.len() {
                return Err(Error::input("type universe lists a type twice"));
            }
        }
        Ok(())
    }

    /// `key=value` pairs for output headers.
    pub fn echo(&self) -> String {
        let dims = self.dims.map_or_else(|| "auto".to_string(), |d| d.to_string());
        let universe = self.universe.as_ref().map_or_else(
            || "auto".to_string(),
            |u| u.iter().map(ObjectType::as_str).collect::<Vec<_>>().join(","),
        );
        format!(
            "tau={} dims={} h0={} c={} min_support={} min_minpi={} seed={} faithful_prune={} no_negatives={} zconf_direction={} universe={}",
            self.tau,
            dims,
            self.hubble.h0,
            self.hubble.c,
            self.thresholds.min_support,
            self.thresholds.min_minpi,
            self.seed,
            self.faithful_prune,
            self.no_negatives,
            self.zconf_direction,
            universe,
        )
    }

    fn header(&self, stage: &str) -> String {
        io::header(stage, &self.echo())
    }
}

/// Catalog CSV → points file text.
pub fn ingest_stage<R: Read>(reader: R, source: &str, cfg: &PipelineConfig) -> Result<(String, IngestReport)> {
    cfg.validate()?;
    let report = read_catalog(reader, source, cfg.hubble, cfg.zconf_direction, cfg.exec)?;
    let mut out = cfg.header("ingest");
    io::write_points(&mut out, &report.objects, Dims::Three);
    Ok((out, report))
}

/// Points file text for an already generated object list.
pub fn points_text(stage: &str, cfg: &PipelineConfig, dataset: &Dataset) -> String {
    let mut out = cfg.header(stage);
    io::write_points(&mut out, dataset.objects(), dataset.dims());
    out
}

pub fn load_points(text: &str, source: &str, cfg: &PipelineConfig) -> Result<Dataset> {
    io::read_points(text, source, cfg.dims)
}

/// Mines the dataset's maximal cliques according to `cfg`, checking every
/// result against the neighborhood graph.
pub fn find_cliques(dataset: &Dataset, cfg: &PipelineConfig) -> Result<CliqueSet> {
    cfg.validate()?;
    let (lists, graph) = grid_neighborhoods(dataset, cfg.tau, cfg.exec)?;
    let cliques = if cfg.faithful_prune {
        faithful_prune(&lists, &graph)
    } else {
        mine_maximal_cliques(&lists, &graph, cfg.exec)
    };
    cliques.verify(&graph)?;
    Ok(cliques)
}

pub struct CliqueOutputs {
    pub cliques: String,
    pub histogram: String,
    pub records: Vec<CliqueRecord>,
    pub universe: Vec<ObjectType>,
}

pub fn render_cliques(dataset: &Dataset, cliques: &CliqueSet, cfg: &PipelineConfig) -> CliqueOutputs {
    let universe = cfg.universe.clone().unwrap_or_else(|| dataset.type_universe());
    let records = io::clique_records(cliques, dataset);
    let mut text = cfg.header("mine-cliques");
    io::write_cliques(&mut text, &universe, &records);
    let mut histogram = cfg.header("mine-cliques histogram");
    io::write_histogram(&mut histogram, &cardinality_histogram(cliques));
    CliqueOutputs {
        cliques: text,
        histogram,
        records,
        universe,
    }
}

/// Points file text → cliques JSONL and histogram CSV.
pub fn mine_cliques_stage(points: &str, source: &str, cfg: &PipelineConfig) -> Result<CliqueOutputs> {
    let dataset = load_points(points, source, cfg)?;
    let cliques = find_cliques(&dataset, cfg)?;
    Ok(render_cliques(&dataset, &cliques, cfg))
}

/// Transactions for a list of clique records under `universe`.
pub fn relationships(records: &[CliqueRecord], universe: &[ObjectType], no_negatives: bool) -> Result<Vec<ComplexRelationship>> {
    records
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            let mut rel = extract_relationship(&rec.types, universe)
                .map_err(|e| Error::input(format!("clique {} ({}): {e}", i + 1, rec.members.join(","))))?;
            rel.source = i;
            Ok(if no_negatives { rel.without_negatives() } else { rel })
        })
        .collect()
}

/// Universe precedence: explicit config, then the cliques file header, then
/// the types seen in the cliques.
pub fn resolve_universe(file: &CliqueFile, cfg: &PipelineConfig) -> Vec<ObjectType> {
    if let Some(u) = &cfg.universe {
        return u.clone();
    }
    if let Some(u) = &file.universe {
        return u.clone();
    }
    let seen: BTreeSet<ObjectType> = file.cliques.iter().flat_map(|c| c.types.iter().cloned()).collect();
    seen.into_iter().collect()
}

pub fn render_transactions(rels: &[ComplexRelationship], cfg: &PipelineConfig) -> String {
    let mut out = cfg.header("extract-relations");
    io::write_transactions(&mut out, rels);
    out
}

/// Cliques JSONL text → transactions text.
pub fn extract_relations_stage(cliques: &str, source: &str, cfg: &PipelineConfig) -> Result<String> {
    cfg.validate()?;
    let file = io::read_cliques(cliques, source)?;
    let universe = resolve_universe(&file, cfg);
    let rels = relationships(&file.cliques, &universe, cfg.no_negatives)?;
    Ok(render_transactions(&rels, cfg))
}

pub fn patterns(transactions: Vec<Vec<Item>>, cfg: &PipelineConfig) -> Vec<InterestingPattern> {
    let db = TransactionDb::new(
        transactions
            .into_iter()
            .map(|t| t.into_iter().filter(|i| !(cfg.no_negatives && i.is_negative()))),
    );
    mine_interesting(&db, cfg.thresholds, cfg.exec)
}

pub fn render_patterns(found: &[InterestingPattern], cfg: &PipelineConfig) -> String {
    let mut out = cfg.header("mine-patterns");
    io::write_patterns(&mut out, found);
    out
}

/// Transactions text → patterns CSV.
pub fn mine_patterns_stage(transactions: &str, source: &str, cfg: &PipelineConfig) -> Result<String> {
    cfg.validate()?;
    let txs = io::read_transactions(transactions, source)?;
    Ok(render_patterns(&patterns(txs, cfg), cfg))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndToEnd {
    pub cliques: String,
    pub histogram: String,
    pub transactions: String,
    pub patterns: String,
}

/// Runs clique mining through pattern mining in memory, without re-reading
/// any intermediate text.
pub fn run_end_to_end(dataset: &Dataset, cfg: &PipelineConfig) -> Result<EndToEnd> {
    let cliques = find_cliques(dataset, cfg)?;
    let rendered = render_cliques(dataset, &cliques, cfg);
    let rels = relationships(&rendered.records, &rendered.universe, cfg.no_negatives)?;
    let transactions = render_transactions(&rels, cfg);
    let txs: Vec<Vec<Item>> = rels.iter().map(|r| r.items.iter().cloned().collect()).collect();
    let patterns = render_patterns(&patterns(txs, cfg), cfg);
    Ok(EndToEnd {
        cliques: rendered.cliques,
        histogram: rendered.histogram,
        transactions,
        patterns,
    })
}

/// Object count per type, `type,count`.
pub fn type_distribution(dataset: &Dataset) -> String {
    let mut counts: BTreeMap<&ObjectType, usize> = BTreeMap::new();
    for o in dataset.objects() {
        *counts.entry(&o.kind).or_insert(0) += 1;
    }
    let mut out = String::from("type,count\n");
    for (t, n) in counts {
        out.push_str(&format!("{t},{n}\n"));
    }
    out
}

/// Member-type composition of cliques per cardinality,
/// `cardinality,cliques,type,members`.
pub fn clique_composition(file: &CliqueFile) -> String {
    let mut per_size: BTreeMap<usize, (usize, BTreeMap<&ObjectType, usize>)> = BTreeMap::new();
    for c in &file.cliques {
        let entry = per_size.entry(c.size).or_default();
        entry.0 += 1;
        for t in &c.types {
            *entry.1.entry(t).or_insert(0) += 1;
        }
    }
    let mut out = String::from("cardinality,cliques,type,members\n");
    for (size, (n, types)) in per_size {
        for (t, m) in types {
            out.push_str(&format!("{size},{n},{t},{m}\n"));
        }
    }
    out
}
