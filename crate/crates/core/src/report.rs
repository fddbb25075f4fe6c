//! Rankings, frequency-loss correlation, invocation summaries, and name
//! frequency tables over finalized aggregates.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::ClassifiedInvocation;
use crate::loss::InvocationClass;
use crate::stats::{spearman, RunningStats, StatsError};

/// One aggregate entry ready for ranking: a display label plus its moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyedStats {
    pub label: String,
    pub count: u64,
    pub mean_ce: f64,
    pub std_ce: f64,
}

impl KeyedStats {
    pub fn from_stats(label: String, stats: &RunningStats<f64>) -> Self {
        KeyedStats {
            label,
            count: stats.count(),
            mean_ce: stats.mean().unwrap_or(0.0),
            std_ce: stats.std().unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Best,
    Worst,
}

/// Top-k keys by mean cross-entropy (ascending for best, descending for
/// worst). Ties prefer the higher count, then the lexicographically smaller
/// label, so the order is total and deterministic.
pub fn rank_keys(
    entries: &[KeyedStats],
    direction: Direction,
    k: usize,
    min_count: u64,
) -> Vec<KeyedStats> {
    let mut rows: Vec<KeyedStats> = entries
        .iter()
        .filter(|e| e.count >= min_count)
        .cloned()
        .collect();
    rows.sort_by(|a, b| {
        let primary = match direction {
            Direction::Best => a.mean_ce.total_cmp(&b.mean_ce),
            Direction::Worst => b.mean_ce.total_cmp(&a.mean_ce),
        };
        primary
            .then_with(|| b.count.cmp(&a.count))
            .then_with(|| a.label.cmp(&b.label))
    });
    rows.truncate(k);
    rows
}

/// Spearman correlation between occurrence count and mean cross-entropy.
pub fn frequency_loss_correlation(entries: &[KeyedStats]) -> Result<f64, StatsError> {
    let counts: Vec<f64> = entries.iter().map(|e| e.count as f64).collect();
    let means: Vec<f64> = entries.iter().map(|e| e.mean_ce).collect();
    spearman(&counts, &means)
}

/// One detail row of the invocation table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvocationRow {
    pub parent_type: String,
    pub node_type: String,
    pub class: InvocationClass,
    pub count: u64,
    pub mean_ce: f64,
    pub std_ce: f64,
}

/// Per-class roll-up: total record count, with mean and population standard
/// deviation taken over the detail rows' means (each node tag weighted
/// equally, not each record).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub class: InvocationClass,
    pub count: u64,
    pub mean_ce: f64,
    pub std_ce: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvocationSummary {
    pub rows: Vec<InvocationRow>,
    pub summary: Vec<SummaryRow>,
}

/// Roll detail rows up into one summary row per class present.
pub fn summarize_rows(rows: &[InvocationRow]) -> Vec<SummaryRow> {
    let mut per_class: BTreeMap<InvocationClass, (u64, RunningStats<f64>)> = BTreeMap::new();
    for row in rows {
        let entry = per_class.entry(row.class).or_default();
        entry.0 += row.count;
        entry.1.push(row.mean_ce);
    }
    per_class
        .into_iter()
        .map(|(class, (count, stats))| SummaryRow {
            class,
            count,
            mean_ce: stats.mean().unwrap_or(0.0),
            std_ce: stats.std().unwrap_or(0.0),
        })
        .collect()
}

/// Assemble the invocation table from `(parent, node, class)` aggregates.
pub fn invocation_summary(
    aggregates: &BTreeMap<(String, String, InvocationClass), RunningStats<f64>>,
) -> InvocationSummary {
    let rows: Vec<InvocationRow> = aggregates
        .iter()
        .map(|((parent, node, class), stats)| InvocationRow {
            parent_type: parent.clone(),
            node_type: node.clone(),
            class: *class,
            count: stats.count(),
            mean_ce: stats.mean().unwrap_or(0.0),
            std_ce: stats.std().unwrap_or(0.0),
        })
        .collect();
    let summary = summarize_rows(&rows);
    InvocationSummary { rows, summary }
}

/// Name frequency tables for internal and external invocations, suitable for
/// word-cloud rendering. Builtin-named sites carry class `None` and are
/// skipped.
pub fn name_frequencies<'a, I>(sites: I) -> (BTreeMap<String, u64>, BTreeMap<String, u64>)
where
    I: IntoIterator<Item = &'a ClassifiedInvocation>,
{
    let mut internal = BTreeMap::new();
    let mut external = BTreeMap::new();
    for site in sites {
        let table = match site.class {
            InvocationClass::Internal => &mut internal,
            InvocationClass::External => &mut external,
            InvocationClass::None => continue,
        };
        *table.entry(site.name.clone()).or_insert(0u64) += 1;
    }
    (internal, external)
}

/// `label,count,mean_ce,std_ce` at full precision.
pub fn write_ranking_csv<W: Write>(out: W, rows: &[KeyedStats]) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["label", "count", "mean_ce", "std_ce"])?;
    for row in rows {
        writer.write_record([
            row.label.as_str(),
            &row.count.to_string(),
            &row.mean_ce.to_string(),
            &row.std_ce.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// `name,count`, names sorted.
pub fn write_name_frequency_csv<W: Write>(
    out: W,
    table: &BTreeMap<String, u64>,
) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["name", "count"])?;
    for (name, count) in table {
        writer.write_record([name.as_str(), &count.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}

/// Human-readable table with cross-entropies at three decimal places.
pub fn format_ranking_table(title: &str, rows: &[KeyedStats]) -> String {
    let mut out = format!("{title}\n");
    out.push_str(&format!(
        "{:<4} {:<24} {:>10} {:>10} {:>10}\n",
        "rank", "label", "count", "mean", "std"
    ));
    for (i, row) in rows.iter().enumerate() {
        out.push_str(&format!(
            "{:<4} {:<24} {:>10} {:>10.3} {:>10.3}\n",
            i + 1,
            row.label,
            row.count,
            row.mean_ce,
            row.std_ce
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ks(label: &str, count: u64, mean: f64) -> KeyedStats {
        KeyedStats {
            label: label.to_string(),
            count,
            mean_ce: mean,
            std_ce: 0.0,
        }
    }

    #[test]
    fn worst_picks_the_highest_mean() {
        let entries = vec![ks("a", 1, 0.1), ks("b", 5, 0.1), ks("c", 2, 9.0)];
        let worst = rank_keys(&entries, Direction::Worst, 1, 1);
        assert_eq!(worst[0].label, "c");
    }

    #[test]
    fn ties_prefer_higher_count_then_label() {
        let entries = vec![ks("a", 1, 0.1), ks("b", 5, 0.1), ks("c", 2, 9.0)];
        let best = rank_keys(&entries, Direction::Best, 2, 1);
        assert_eq!(best[0].label, "b");
        assert_eq!(best[1].label, "a");

        let entries = vec![ks("z", 3, 0.5), ks("m", 3, 0.5)];
        let best = rank_keys(&entries, Direction::Best, 2, 1);
        assert_eq!(best[0].label, "m");
    }

    #[test]
    fn min_count_one_admits_singletons() {
        let entries = vec![ks("rare", 1, 9.0), ks("common", 100, 1.0)];
        let worst = rank_keys(&entries, Direction::Worst, 1, 1);
        assert_eq!(worst[0].label, "rare");
        let filtered = rank_keys(&entries, Direction::Worst, 1, 2);
        assert_eq!(filtered[0].label, "common");
    }

    #[test]
    fn strictly_rarer_means_higher_loss_is_minus_one() {
        let entries: Vec<KeyedStats> = (1..=20)
            .map(|i| ks(&format!("t{i}"), i as u64, 1.0 / i as f64))
            .collect();
        let rho = frequency_loss_correlation(&entries).unwrap();
        assert_eq!(rho, -1.0);
    }

    #[test]
    fn shuffled_counts_show_no_correlation() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut counts: Vec<u64> = (1..=10_000).collect();
        counts.shuffle(&mut rng);
        let entries: Vec<KeyedStats> = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| ks(&format!("t{i}"), c, (i % 977) as f64 / 977.0))
            .collect();
        let rho = frequency_loss_correlation(&entries).unwrap();
        assert!(rho.abs() < 0.05, "rho = {rho}");
    }

    #[test]
    fn constant_means_propagate_the_error() {
        let entries = vec![ks("a", 1, 0.5), ks("b", 2, 0.5)];
        assert_eq!(
            frequency_loss_correlation(&entries).unwrap_err(),
            StatsError::ConstantInput
        );
    }

    #[test]
    fn summary_rows_average_the_row_means() {
        let rows = vec![
            InvocationRow {
                parent_type: "call".into(),
                node_type: "identifier".into(),
                class: InvocationClass::Internal,
                count: 10,
                mean_ce: 1.0,
                std_ce: 0.5,
            },
            InvocationRow {
                parent_type: "argument_list".into(),
                node_type: "string".into(),
                class: InvocationClass::Internal,
                count: 30,
                mean_ce: 3.0,
                std_ce: 0.5,
            },
        ];
        let summary = summarize_rows(&rows);
        assert_eq!(summary.len(), 1);
        assert_eq!(summary[0].count, 40);
        // Unweighted over rows: (1 + 3) / 2, not the record-weighted 2.5.
        assert_eq!(summary[0].mean_ce, 2.0);
        assert_eq!(summary[0].std_ce, 1.0);
    }

    #[test]
    fn name_frequencies_split_by_class_and_drop_builtins() {
        use crate::span::Span;
        let site = |name: &str, class| ClassifiedInvocation {
            name: name.to_string(),
            call_span: Span::new(0, 1),
            name_span: Span::new(0, 1),
            args_span: Span::new(0, 1),
            class,
        };
        let sites = vec![
            site("foo", InvocationClass::Internal),
            site("zeros", InvocationClass::External),
            site("zeros", InvocationClass::External),
            site("print", InvocationClass::None),
        ];
        let (internal, external) = name_frequencies(&sites);
        assert_eq!(internal.get("foo"), Some(&1));
        assert_eq!(external.get("zeros"), Some(&2));
        assert!(!internal.contains_key("print") && !external.contains_key("print"));

        let (i, e) = name_frequencies(&[]);
        assert!(i.is_empty() && e.is_empty());
    }

    #[test]
    fn ranking_csv_is_deterministic() {
        let rows = vec![ks("a,b", 3, 1.5)];
        let mut buf = Vec::new();
        write_ranking_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "label,count,mean_ce,std_ce\n\"a,b\",3,1.5,0\n");
    }
}
