//! Source selection: rank candidate sources by ascending discrepancy to the target.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{LabeledDataset, UnlabeledDataset};
use crate::error::Result;

use super::report::Measure;
use super::{estimate_dh, estimate_sdisc, xdisc_bruteforce_capped, EstimatorConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceTag {
    Clean,
    Noisy,
}

#[derive(Debug, Clone)]
pub struct SourceEntry {
    pub name: String,
    pub data: LabeledDataset,
    pub tag: Option<SourceTag>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    /// Position in the input list.
    pub index: usize,
    pub name: String,
    pub tag: Option<SourceTag>,
    pub value: Option<f64>,
    /// 1-based; `None` when the estimator failed on this source.
    pub rank: Option<usize>,
    /// Another source has exactly the same value.
    pub tied: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub measure: Measure,
    /// Ranked entries first, failed ones after, in input order.
    pub entries: Vec<RankEntry>,
    pub top_k: usize,
    /// Clean sources among the first `top_k`, when every source is tagged.
    pub clean_in_top_k: Option<usize>,
}

fn measure_one(
    target: &UnlabeledDataset,
    source: &LabeledDataset,
    measure: Measure,
    cfg: &EstimatorConfig,
) -> Result<f64> {
    let class = cfg.class_for(&[source.features(), target.features()])?;
    let report = match measure {
        Measure::Sdisc => estimate_sdisc(source, target, &class, &cfg.train)?,
        Measure::Dh => estimate_dh(&source.inputs(), target, &class, &cfg.train)?,
        Measure::XdiscBruteforce => {
            let class = cfg.oracle_class_for(&[source.features(), target.features()])?;
            xdisc_bruteforce_capped(&source.inputs(), target, &class, cfg.grid_cap)?
        }
    };
    Ok(report.value)
}

/// Score every source against the target and sort ascending; ties keep input
/// order. A failing source is reported in its entry and does not stop the batch.
pub fn rank_sources(
    target: &UnlabeledDataset,
    sources: &[SourceEntry],
    measure: Measure,
    cfg: &EstimatorConfig,
    top_k: usize,
) -> Result<Ranking> {
    if sources.is_empty() {
        return Err(crate::Error::Empty("no sources to rank".into()));
    }
    let results: Vec<Result<f64>> = sources
        .par_iter()
        .map(|s| measure_one(target, &s.data, measure, cfg))
        .collect();
    let mut ok: Vec<(usize, f64)> = Vec::new();
    let mut failed: Vec<RankEntry> = Vec::new();
    for (index, (s, r)) in sources.iter().zip(results).enumerate() {
        match r {
            Ok(v) => ok.push((index, v)),
            Err(e) => failed.push(RankEntry {
                index,
                name: s.name.clone(),
                tag: s.tag,
                value: None,
                rank: None,
                tied: false,
                error: Some(e.to_string()),
            }),
        }
    }
    ok.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let mut entries: Vec<RankEntry> = ok
        .iter()
        .enumerate()
        .map(|(pos, &(index, value))| RankEntry {
            index,
            name: sources[index].name.clone(),
            tag: sources[index].tag,
            value: Some(value),
            rank: Some(pos + 1),
            tied: ok.iter().filter(|o| o.1 == value).count() > 1,
            error: None,
        })
        .collect();
    let all_tagged = sources.iter().all(|s| s.tag.is_some());
    let clean_in_top_k = all_tagged.then(|| {
        entries
            .iter()
            .take(top_k)
            .filter(|e| e.tag == Some(SourceTag::Clean))
            .count()
    });
    entries.extend(failed);
    Ok(Ranking {
        measure,
        entries,
        top_k,
        clean_in_top_k,
    })
}
