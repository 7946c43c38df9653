use super::{DetectionSummary, TrajectorySummary};

/// A titled table of string cells, rendered as aligned text or CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(title: &str, columns: &[&str]) -> Self {
        Table { title: title.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, method: &str, cells: Vec<String>) {
        let mut row = vec![method.to_string()];
        row.extend(cells);
        self.rows.push(row);
    }

    pub fn to_text(&self) -> String {
        let width = |k: usize| {
            std::iter::once(&self.columns[k])
                .chain(self.rows.iter().map(|r| &r[k]))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        };
        let widths: Vec<usize> = (0..self.columns.len()).map(width).collect();
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(k, (c, w))| if k == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                .collect();
            padded.join(" | ")
        };
        let mut out = format!("{}\n{}\n", self.title, line(&self.columns));
        let total: usize = widths.iter().sum::<usize>() + 3 * (widths.len().saturating_sub(1));
        out.push_str(&"-".repeat(total));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }
}

pub const DETECTION_TITLE: &str = "3D IoU ≥ 0.5";
pub const DETECTION_COLUMNS: [&str; 6] = ["IoU(sample)", "IoU(box)", "Precision", "Recall", "pred(total)", "gt(total)"];
pub const WAYPOINT_COLUMNS: [&str; 5] = ["ADE 0.5s", "ADE 1s", "ADE 2s", "ADE 3s", "FDE"];
pub const CLOSED_LOOP_COLUMNS: [&str; 2] = ["Driving Score↑", "Success Rate(%)↑"];

pub fn detection_cells(d: &DetectionSummary) -> Vec<String> {
    vec![
        format!("{:.3}", d.iou_sample),
        format!("{:.3}", d.iou_box),
        format!("{:.3}", d.precision),
        format!("{:.3}", d.recall),
        d.pred_total.to_string(),
        d.gt_total.to_string(),
    ]
}

/// Metric cells joined the way a single table row reads.
pub fn detection_row(d: &DetectionSummary) -> String {
    detection_cells(d).join(" | ")
}

pub fn waypoint_cells(t: &TrajectorySummary) -> Vec<String> {
    t.ade.iter().chain(std::iter::once(&t.fde)).map(|v| format!("{v:.3}")).collect()
}

pub fn waypoint_row(t: &TrajectorySummary) -> String {
    waypoint_cells(t).join(" | ")
}

pub fn closed_loop_cells(driving_score: f64, success_rate: f64) -> Vec<String> {
    vec![format!("{driving_score:.1}"), format!("{success_rate:.1}")]
}

pub fn detection_table(rows: &[(String, DetectionSummary)]) -> Table {
    let mut cols = vec!["Method"];
    cols.extend(DETECTION_COLUMNS);
    let mut t = Table::new(DETECTION_TITLE, &cols);
    for (name, d) in rows {
        t.push(name, detection_cells(d));
    }
    t
}

pub fn waypoint_table(rows: &[(String, TrajectorySummary)]) -> Table {
    let mut cols = vec!["Method"];
    cols.extend(WAYPOINT_COLUMNS);
    let mut t = Table::new("Waypoint accuracy (ADE / FDE, m)", &cols);
    for (name, s) in rows {
        t.push(name, waypoint_cells(s));
    }
    t
}

/// Rows are `(policy, mean driving score, success rate %)`.
pub fn closed_loop_table(rows: &[(String, f64, f64)]) -> Table {
    let mut cols = vec!["Method"];
    cols.extend(CLOSED_LOOP_COLUMNS);
    let mut t = Table::new("Closed-loop results", &cols);
    for (name, ds, sr) in rows {
        t.push(name, closed_loop_cells(*ds, *sr));
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detection_row_layout() {
        let d = DetectionSummary {
            iou_sample: 0.724,
            iou_box: 0.806,
            precision: 0.678,
            recall: 0.673,
            pred_total: 3165,
            gt_total: 3191,
        };
        assert_eq!(detection_row(&d), "0.724 | 0.806 | 0.678 | 0.673 | 3165 | 3191");
    }

    #[test]
    fn waypoint_row_layout() {
        let t = TrajectorySummary { ade: [0.679, 0.837, 1.128, 1.488], fde: 2.472 };
        assert_eq!(waypoint_row(&t), "0.679 | 0.837 | 1.128 | 1.488 | 2.472");
    }

    #[test]
    fn closed_loop_header_and_csv() {
        let t = closed_loop_table(&[("oracle".into(), 100.0, 100.0)]);
        let text = t.to_text();
        assert!(text.contains("Driving Score↑ | Success Rate(%)↑"));
        assert_eq!(t.to_csv(), "Method,Driving Score↑,Success Rate(%)↑\noracle,100.0,100.0\n");
    }
}
