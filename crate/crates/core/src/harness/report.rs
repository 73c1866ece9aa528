//! Accuracy tables over persisted results.
//!
//! Rows are (strategy, backend) pairs; columns are belief order and story
//! category, plus an overall cell. The recursive-simulation row carries
//! signed deltas against the best other strategy in the same backend,
//! column by column.

use super::RunResult;
use crate::engine::Strategy;
use crate::model::Category;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Fixed column set, in rendering order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Column {
    Order(usize),
    Tell,
    NoTell,
    FantomShort,
    FantomLong,
    Overall,
}

impl Column {
    pub const ALL: [Column; 10] = [
        Column::Order(0),
        Column::Order(1),
        Column::Order(2),
        Column::Order(3),
        Column::Order(4),
        Column::Tell,
        Column::NoTell,
        Column::FantomShort,
        Column::FantomLong,
        Column::Overall,
    ];

    pub fn title(self) -> String {
        match self {
            Column::Order(n) => format!("order{n}"),
            Column::Tell => "tell".to_string(),
            Column::NoTell => "no_tell".to_string(),
            Column::FantomShort => "fantom_short".to_string(),
            Column::FantomLong => "fantom_long".to_string(),
            Column::Overall => "overall".to_string(),
        }
    }

    fn matches(self, result: &RunResult) -> bool {
        match self {
            Column::Order(n) => result.order == n,
            Column::Tell => result.category == Category::Tell,
            Column::NoTell => result.category == Category::NoTell,
            Column::FantomShort => result.category == Category::FantomShort,
            Column::FantomLong => result.category == Category::FantomLong,
            Column::Overall => true,
        }
    }
}

/// Correct count over total count for one cell.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReportCell {
    pub correct: usize,
    pub total: usize,
}

impl ReportCell {
    /// Accuracy in percent; `None` for an empty cell.
    pub fn accuracy(self) -> Option<f64> {
        if self.total == 0 {
            None
        } else {
            Some(100.0 * self.correct as f64 / self.total as f64)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub strategy: Strategy,
    pub backend: String,
    pub cells: BTreeMap<Column, ReportCell>,
    /// Per column: this row's accuracy minus the best accuracy among the
    /// other strategies on the same backend. Only present on the
    /// recursive-simulation row.
    pub deltas: BTreeMap<Column, f64>,
}

impl ReportRow {
    pub fn cell(&self, column: Column) -> ReportCell {
        self.cells.get(&column).copied().unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReportTable {
    pub rows: Vec<ReportRow>,
}

/// Aggregates results into the accuracy table.
pub fn build_report(results: &[RunResult]) -> ReportTable {
    let mut keys: Vec<(Strategy, String)> = results
        .iter()
        .map(|r| (r.strategy, r.backend.clone()))
        .collect();
    keys.sort_by(|a, b| (&a.1, a.0).cmp(&(&b.1, b.0)));
    keys.dedup();

    let mut rows: Vec<ReportRow> = keys
        .into_iter()
        .map(|(strategy, backend)| {
            let mut cells: BTreeMap<Column, ReportCell> = BTreeMap::new();
            for r in results
                .iter()
                .filter(|r| r.strategy == strategy && r.backend == backend)
            {
                for column in Column::ALL {
                    if column.matches(r) {
                        let cell = cells.entry(column).or_default();
                        cell.total += 1;
                        cell.correct += usize::from(r.correct);
                    }
                }
            }
            ReportRow {
                strategy,
                backend,
                cells,
                deltas: BTreeMap::new(),
            }
        })
        .collect();

    let snapshot = rows.clone();
    for row in &mut rows {
        if row.strategy != Strategy::Decompose {
            continue;
        }
        for column in Column::ALL {
            let Some(own) = row.cell(column).accuracy() else {
                continue;
            };
            let best_other = snapshot
                .iter()
                .filter(|r| r.backend == row.backend && r.strategy != Strategy::Decompose)
                .filter_map(|r| r.cell(column).accuracy())
                .fold(None::<f64>, |acc, a| Some(acc.map_or(a, |b| b.max(a))));
            if let Some(best) = best_other {
                row.deltas.insert(column, own - best);
            }
        }
    }
    ReportTable { rows }
}

fn format_cell(cell: ReportCell, delta: Option<f64>) -> String {
    match cell.accuracy() {
        None => "—".to_string(),
        Some(acc) => {
            let mut text = format!("{acc:.1}% ({}/{})", cell.correct, cell.total);
            if let Some(d) = delta {
                let _ = write!(text, " ({d:+.1})");
            }
            text
        }
    }
}

/// Aligned plain-text rendering.
pub fn render_text(table: &ReportTable) -> String {
    let headers: Vec<String> = ["strategy".to_string(), "backend".to_string()]
        .into_iter()
        .chain(Column::ALL.iter().map(|c| c.title()))
        .collect();
    let mut grid: Vec<Vec<String>> = vec![headers];
    for row in &table.rows {
        let mut line = vec![row.strategy.to_string(), row.backend.clone()];
        for column in Column::ALL {
            line.push(format_cell(row.cell(column), row.deltas.get(&column).copied()));
        }
        grid.push(line);
    }
    let width: Vec<usize> = (0..grid[0].len())
        .map(|i| grid.iter().map(|row| row[i].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &grid {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(i, cell)| {
                let pad = width[i].saturating_sub(cell.chars().count());
                format!("{cell}{}", " ".repeat(pad))
            })
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Comma-separated rendering: accuracy and count per column, plus delta
/// columns for the recursive-simulation row.
pub fn render_csv(table: &ReportTable) -> String {
    let mut out = String::new();
    out.push_str("strategy,backend");
    for column in Column::ALL {
        let title = column.title();
        let _ = write!(out, ",{title}_acc,{title}_n,{title}_delta");
    }
    out.push('\n');
    for row in &table.rows {
        let _ = write!(out, "{},{}", row.strategy, row.backend);
        for column in Column::ALL {
            let cell = row.cell(column);
            match cell.accuracy() {
                None => out.push_str(",,0,"),
                Some(acc) => {
                    let _ = write!(out, ",{acc:.1},{},", cell.total);
                }
            }
            if let Some(d) = row.deltas.get(&column) {
                let _ = write!(out, "{d:+.1}");
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(
        id: &str,
        strategy: Strategy,
        order: usize,
        category: Category,
        correct: bool,
    ) -> RunResult {
        RunResult {
            record_id: id.to_string(),
            strategy,
            backend: "symbolic".to_string(),
            predicted_label: Some('A'),
            gold_label: Some('A'),
            correct,
            order,
            category,
            reasoner_calls: 1,
            wall_time_ms: 0,
            trace_path: None,
            error: None,
        }
    }

    #[test]
    fn accuracy_is_correct_over_total() {
        let results: Vec<RunResult> = (0..120)
            .map(|i| {
                result(
                    &format!("r{i}"),
                    Strategy::ZeroShotMc,
                    0,
                    Category::Tell,
                    i < 90,
                )
            })
            .collect();
        let table = build_report(&results);
        let cell = table.rows[0].cell(Column::Overall);
        assert_eq!(cell, ReportCell { correct: 90, total: 120 });
        assert_eq!(cell.accuracy(), Some(75.0));
        assert!(render_text(&table).contains("75.0% (90/120)"));
    }

    #[test]
    fn deltas_compare_against_the_best_other_strategy() {
        let mut results = Vec::new();
        for i in 0..10 {
            let id = format!("r{i}");
            results.push(result(&id, Strategy::ZeroShotMc, 2, Category::Tell, i < 2));
            results.push(result(&id, Strategy::ChainOfThought, 2, Category::Tell, i < 5));
            results.push(result(&id, Strategy::Decompose, 2, Category::Tell, i < 9));
        }
        let table = build_report(&results);
        let decompose = table
            .rows
            .iter()
            .find(|r| r.strategy == Strategy::Decompose)
            .unwrap();
        assert_eq!(decompose.deltas.get(&Column::Overall), Some(&40.0));
        assert!(render_text(&table).contains("(+40.0)"));
        assert!(render_csv(&table).contains("+40.0"));
    }

    #[test]
    fn empty_cells_render_as_dashes() {
        let results = vec![result("r0", Strategy::ZeroShotMc, 1, Category::Tell, true)];
        let table = build_report(&results);
        assert_eq!(table.rows[0].cell(Column::Order(4)).total, 0);
        let text = render_text(&table);
        assert!(text.contains('—'));
        let csv = render_csv(&table);
        assert!(csv.lines().nth(1).unwrap().contains(",,0,"));
    }

    #[test]
    fn csv_lines_align_with_the_header() {
        let results = vec![
            result("r0", Strategy::ZeroShotMc, 0, Category::Tell, true),
            result("r0", Strategy::Decompose, 0, Category::Tell, true),
        ];
        let csv = render_csv(&build_report(&results));
        let counts: Vec<usize> = csv.lines().map(|l| l.split(',').count()).collect();
        assert!(counts.windows(2).all(|w| w[0] == w[1]), "{counts:?}");
    }
}
