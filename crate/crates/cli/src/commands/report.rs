//! `report`: render the CSV curve families of an evaluation directory into
//! self-contained SVG line charts.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};

use crate::svg::{line_chart, ChartSpec, Series};

#[derive(Debug, Clone)]
struct Row {
    method: String,
    spec_kind: String,
    spec_param: String,
    n: Option<usize>,
    x: f64,
    value: f64,
}

fn read_rows(path: &Path) -> Result<Vec<Row>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for line in text.lines() {
        if line.starts_with('#') || line.starts_with("method,") || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            anyhow::bail!("{}: expected 6 columns, got {line:?}", path.display());
        }
        rows.push(Row {
            method: cols[0].to_owned(),
            spec_kind: cols[1].to_owned(),
            spec_param: cols[2].to_owned(),
            n: cols[3].parse().ok(),
            x: cols[4]
                .parse()
                .with_context(|| format!("bad x in {line:?}"))?,
            value: cols[5]
                .parse()
                .with_context(|| format!("bad value in {line:?}"))?,
        });
    }
    Ok(rows)
}

fn write_chart(out: &Path, name: &str, spec: &ChartSpec, series: &[Series]) -> Result<()> {
    if series.is_empty() {
        return Ok(());
    }
    let path = out.join(format!("{name}.svg"));
    std::fs::write(&path, line_chart(spec, series))
        .with_context(|| format!("writing {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn grouped(rows: &[Row], key: impl Fn(&Row) -> String) -> BTreeMap<String, Vec<&Row>> {
    let mut map: BTreeMap<String, Vec<&Row>> = BTreeMap::new();
    for r in rows {
        map.entry(key(r)).or_default().push(r);
    }
    map
}

pub fn run(input: &Path, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let mut rendered = 0usize;

    let auc_csv = input.join("repeatability_auc.csv");
    if auc_csv.exists() {
        let rows = read_rows(&auc_csv)?;
        for (kind, kind_rows) in grouped(&rows, |r| r.spec_kind.clone()) {
            let series: Vec<Series> =
                grouped(&kind_rows.into_iter().cloned().collect::<Vec<_>>(), |r| {
                    r.method.clone()
                })
                .into_iter()
                .map(|(method, rs)| Series {
                    label: method,
                    points: rs.iter().map(|r| (r.x, r.value)).collect(),
                })
                .collect();
            write_chart(
                out,
                &format!("repeatability_auc_{kind}"),
                &ChartSpec {
                    title: format!("Repeatability under {kind}"),
                    x_label: format!("{kind} parameter"),
                    y_label: "repeatability (area under curve)".into(),
                    log_x: kind == "scale",
                },
                &series,
            )?;
            rendered += 1;
        }
    }

    let curves_csv = input.join("repeatability_curves.csv");
    if curves_csv.exists() {
        let rows = read_rows(&curves_csv)?;
        for (kind, kind_rows) in grouped(&rows, |r| r.spec_kind.clone()) {
            let series: Vec<Series> =
                grouped(&kind_rows.into_iter().cloned().collect::<Vec<_>>(), |r| {
                    format!("{} {}", r.method, r.spec_param)
                })
                .into_iter()
                .map(|(label, rs)| Series {
                    label,
                    points: rs.iter().map(|r| (r.x, r.value)).collect(),
                })
                .collect();
            write_chart(
                out,
                &format!("repeatability_curves_{kind}"),
                &ChartSpec {
                    title: format!("Recall vs IoU under {kind}"),
                    x_label: "IoU threshold".into(),
                    y_label: "recall".into(),
                    log_x: false,
                },
                &series,
            )?;
            rendered += 1;
        }
    }

    let recall_csv = input.join("recall_curves.csv");
    if recall_csv.exists() {
        let rows = read_rows(&recall_csv)?;
        for (n, n_rows) in grouped(&rows, |r| r.n.map(|v| v.to_string()).unwrap_or_default()) {
            let series: Vec<Series> =
                grouped(&n_rows.into_iter().cloned().collect::<Vec<_>>(), |r| {
                    r.method.clone()
                })
                .into_iter()
                .map(|(method, rs)| Series {
                    label: method,
                    points: rs.iter().map(|r| (r.x, r.value)).collect(),
                })
                .collect();
            write_chart(
                out,
                &format!("recall_curves_n{n}"),
                &ChartSpec {
                    title: format!("Recall vs IoU threshold, {n} proposals"),
                    x_label: "IoU threshold".into(),
                    y_label: "recall".into(),
                    log_x: false,
                },
                &series,
            )?;
            rendered += 1;
        }
    }

    for (file, title, ylabel) in [
        (
            "recall_auc_vs_n.csv",
            "Recall AUC vs proposal count",
            "area under recall curve",
        ),
        (
            "recall_at_05_vs_n.csv",
            "Recall at IoU 0.5 vs proposal count",
            "recall at IoU 0.5",
        ),
        (
            "recall_at_08_vs_n.csv",
            "Recall at IoU 0.8 vs proposal count",
            "recall at IoU 0.8",
        ),
    ] {
        let path = input.join(file);
        if !path.exists() {
            continue;
        }
        let rows = read_rows(&path)?;
        let series: Vec<Series> = grouped(&rows, |r| r.method.clone())
            .into_iter()
            .map(|(method, rs)| Series {
                label: method,
                points: rs.iter().map(|r| (r.x, r.value)).collect(),
            })
            .collect();
        write_chart(
            out,
            file.trim_end_matches(".csv"),
            &ChartSpec {
                title: title.into(),
                x_label: "number of proposals".into(),
                y_label: ylabel.into(),
                log_x: true,
            },
            &series,
        )?;
        rendered += 1;
    }

    if rendered == 0 {
        anyhow::bail!("no known CSV families under {}", input.display());
    }
    Ok(())
}
