//! Report bundle, CSV tables and SVG plots.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::DatasetProfile;
use crate::features::FeatureGroup;
use crate::models::CVResult;
use crate::pipeline::{Analysis, F1DeltaRow, ImportanceRow, Manifest};
use crate::stats::{GroupZ, RankDeltas, ZOptions};
use crate::util::sha256_hex;

/// Published values for the restricted corpora, shipped for side-by-side
/// reading. Columns: kind, dataset, key, level, model, value.
pub const REFERENCE_VALUES: &str = include_str!("../data/reference_values.csv");

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("bundle is missing: {}", .0.join(", "))]
    Incomplete(Vec<String>),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// All results of one run, with the manifest they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub corpus: String,
    pub run_id: String,
    pub profile: DatasetProfile,
    pub z_options: ZOptions,
    pub zscores: Vec<GroupZ>,
    pub cv: Vec<CVResult>,
    pub f1_deltas: Vec<F1DeltaRow>,
    pub importance: Vec<ImportanceRow>,
    pub rank_deltas: Vec<RankDeltas>,
    pub manifest: Manifest,
}

impl ReportBundle {
    pub fn assemble(profile: DatasetProfile, cv: Vec<CVResult>, analysis: Analysis, manifest: Manifest) -> Self {
        ReportBundle {
            corpus: profile.corpus.clone(),
            run_id: manifest.config_sha256[..12].to_string(),
            profile,
            z_options: analysis.zscores.options,
            zscores: analysis.zscores.levels,
            cv,
            f1_deltas: analysis.f1_deltas,
            importance: analysis.importance,
            rank_deltas: analysis.rank_deltas,
            manifest,
        }
    }

    /// The serialized form written to `bundle.json`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes") + "\n"
    }

    pub fn hash(&self) -> String {
        sha256_hex(self.to_json().as_bytes())
    }

    /// Names of the tables that have no rows.
    pub fn missing(&self) -> Vec<String> {
        let mut m = Vec::new();
        if self.profile.rows.is_empty() {
            m.push("profile".into());
        }
        if self.zscores.is_empty() {
            m.push("zscores".into());
        }
        if self.cv.is_empty() {
            m.push("cv_results".into());
        }
        if self.f1_deltas.is_empty() {
            m.push("f1_deltas".into());
        }
        if self.importance.is_empty() {
            m.push("importance".into());
        }
        if self.rank_deltas.is_empty() {
            m.push("rank_changes".into());
        }
        m
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<String, ReportError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|source| ReportError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, bytes).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(sha256_hex(bytes))
}

fn csv_bytes(header: &[&str], rows: Vec<Vec<String>>) -> Result<Vec<u8>, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| ReportError::Io {
        path: PathBuf::from("<csv>"),
        source: e.into_error(),
    })
}

/// CSV tables keyed by file name. Every table carries the run id of the
/// manifest it belongs to.
pub fn tables(bundle: &ReportBundle) -> Result<BTreeMap<String, Vec<u8>>, ReportError> {
    let run = &bundle.run_id;
    let mut out = BTreeMap::new();

    let rows = bundle
        .profile
        .rows
        .iter()
        .map(|r| vec![r.subgroup.clone(), r.feature.clone(), opt(r.mean), run.clone()])
        .collect();
    out.insert("profile.csv".into(), csv_bytes(&["subgroup", "feature", "mean", "run"], rows)?);

    let rows = bundle
        .zscores
        .iter()
        .map(|g| {
            vec![
                g.alteration_level.to_string(),
                format!("{:.6}", g.z_lexical),
                format!("{:.6}", g.z_syntactic),
                g.n_lexical.to_string(),
                g.n_syntactic.to_string(),
                run.clone(),
            ]
        })
        .collect();
    out.insert(
        "zscores.csv".into(),
        csv_bytes(&["level", "z_lexical", "z_syntactic", "n_lexical", "n_syntactic", "run"], rows)?,
    );

    let mut rows = Vec::new();
    for r in &bundle.cv {
        for f in &r.folds {
            rows.push(vec![
                r.model.kind().to_string(),
                r.alteration_level.to_string(),
                f.fold.to_string(),
                f.n_train.to_string(),
                f.n_test.to_string(),
                f.n_synthetic.to_string(),
                opt(f.f1),
                f.skipped.clone().unwrap_or_default(),
                run.clone(),
            ]);
        }
    }
    out.insert(
        "cv_results.csv".into(),
        csv_bytes(
            &["model", "level", "fold", "n_train", "n_test", "n_synthetic", "f1", "skipped", "run"],
            rows,
        )?,
    );

    let rows = bundle
        .f1_deltas
        .iter()
        .map(|d| vec![d.model.to_string(), d.alteration_level.to_string(), opt(d.f1), opt(d.delta), run.clone()])
        .collect();
    out.insert("f1_deltas.csv".into(), csv_bytes(&["model", "level", "mean_f1", "delta_f1", "run"], rows)?);

    let rows = bundle
        .importance
        .iter()
        .map(|r| {
            let f = r.fit.as_ref();
            vec![
                bundle.corpus.clone(),
                r.model.to_string(),
                opt(f.map(|f| f.alpha)),
                opt(f.map(|f| f.beta)),
                opt(f.and_then(|f| f.ratio)),
                f.map(|f| f.sign_disagreement.to_string()).unwrap_or_default(),
                r.error.clone().unwrap_or_default(),
                run.clone(),
            ]
        })
        .collect();
    out.insert(
        "importance.csv".into(),
        csv_bytes(
            &["dataset", "model", "alpha_syntactic", "beta_lexical", "ratio", "sign_disagreement", "error", "run"],
            rows,
        )?,
    );

    let levels: Vec<String> = bundle.rank_deltas.iter().map(|d| format!("delta_{}", d.alteration_level)).collect();
    let mut header = vec!["feature", "group", "baseline_rank", "baseline_significant"];
    header.extend(levels.iter().map(String::as_str));
    header.push("run");
    let rows = match bundle.rank_deltas.first() {
        None => Vec::new(),
        Some(first) => first
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = vec![
                    r.feature.clone(),
                    r.group.to_string(),
                    r.baseline_rank.to_string(),
                    r.baseline_significant.to_string(),
                ];
                row.extend(bundle.rank_deltas.iter().map(|d| d.rows[i].delta.to_string()));
                row.push(run.clone());
                row
            })
            .collect(),
    };
    out.insert("rank_changes.csv".into(), csv_bytes(&header, rows)?);
    out.insert("reference_values.csv".into(), REFERENCE_VALUES.as_bytes().to_vec());
    Ok(out)
}

/// Writes the tables under `out/tables`. Returns (relative name, sha256).
pub fn write_tables(bundle: &ReportBundle, out: &Path) -> Result<Vec<(String, String)>, ReportError> {
    let mut written = Vec::new();
    for (name, bytes) in tables(bundle)? {
        let hash = write_file(&out.join("tables").join(&name), &bytes)?;
        written.push((format!("tables/{name}"), hash));
    }
    Ok(written)
}

/// Fill colour of a rank-change cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellColour {
    /// Feature not significant in the original data.
    White,
    /// Among the largest rises.
    Blue,
    /// Among the largest falls.
    Red,
    /// Smaller change.
    Yellow,
}

impl CellColour {
    pub fn hex(self) -> &'static str {
        match self {
            CellColour::White => "#ffffff",
            CellColour::Blue => "#4a7bd0",
            CellColour::Red => "#d04a4a",
            CellColour::Yellow => "#f2d45c",
        }
    }
}

/// Colour rule: white for baseline-insignificant features; otherwise blue
/// or red when the move is at least half of the largest move in the panel
/// (`max_abs`), yellow for anything smaller, including no move.
pub fn rank_cell_colour(delta: i64, baseline_significant: bool, max_abs: i64) -> CellColour {
    if !baseline_significant {
        CellColour::White
    } else if delta != 0 && 2 * delta.abs() >= max_abs {
        if delta > 0 {
            CellColour::Blue
        } else {
            CellColour::Red
        }
    } else {
        CellColour::Yellow
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn svg_open(w: f64, h: f64) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    )
}

/// Line chart of the group scores against alteration level.
pub fn z_chart(bundle: &ReportBundle) -> String {
    let (w, h, m) = (480.0, 320.0, 50.0);
    let pts = &bundle.zscores;
    let max_x = pts.iter().map(|g| g.alteration_level as f64).fold(1.0, f64::max);
    let max_y = pts
        .iter()
        .flat_map(|g| [g.z_lexical, g.z_syntactic])
        .fold(0.0, f64::max)
        .max(1e-9)
        * 1.1;
    let sx = |x: f64| m + x / max_x * (w - 2.0 * m);
    let sy = |y: f64| h - m - y / max_y * (h - 2.0 * m);
    let mut s = svg_open(w, h);
    let _ = writeln!(s, "<text x=\"{}\" y=\"20\" text-anchor=\"middle\">Feature change by alteration level</text>", w / 2.0);
    let _ = writeln!(
        s,
        "<line x1=\"{m}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>\n<line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{0}\" stroke=\"black\"/>",
        h - m,
        w - m
    );
    for g in pts {
        let x = sx(g.alteration_level as f64);
        let _ = writeln!(s, "<text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>", h - m + 16.0, g.alteration_level);
    }
    for k in 0..=4 {
        let y = max_y * k as f64 / 4.0;
        let _ = writeln!(s, "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{y:.2}</text>", m - 6.0, sy(y) + 4.0);
    }
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">alteration level (%)</text>", w / 2.0, h - 12.0);
    for (group, colour, ty) in [(FeatureGroup::Lexical, "#d0682a", 40.0), (FeatureGroup::Syntactic, "#2a6fd0", 56.0)] {
        let path: Vec<String> = pts
            .iter()
            .map(|g| format!("{:.1},{:.1}", sx(g.alteration_level as f64), sy(g.get(group))))
            .collect();
        let _ = writeln!(s, "<polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"2\" points=\"{}\"/>", path.join(" "));
        for g in pts {
            let _ = writeln!(
                s,
                "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3\" fill=\"{colour}\"/>",
                sx(g.alteration_level as f64),
                sy(g.get(group))
            );
        }
        let _ = writeln!(s, "<text x=\"{:.1}\" y=\"{ty}\" fill=\"{colour}\">{group}</text>", m + 10.0);
    }
    s.push_str("</svg>\n");
    s
}

/// Bars of the syntactic (α) and lexical (β) coefficients per model.
pub fn importance_chart(bundle: &ReportBundle) -> String {
    let (w, h, m) = (480.0, 320.0, 50.0);
    let fits: Vec<(&str, f64, f64)> = bundle
        .importance
        .iter()
        .filter_map(|r| r.fit.as_ref().map(|f| (r.model.name(), f.alpha, f.beta)))
        .collect();
    let max_abs = fits.iter().flat_map(|f| [f.1.abs(), f.2.abs()]).fold(0.0, f64::max).max(1e-9) * 1.1;
    let zero = h / 2.0;
    let sy = |v: f64| zero - v / max_abs * (h / 2.0 - m);
    let mut s = svg_open(w, h);
    let _ = writeln!(s, "<text x=\"{}\" y=\"20\" text-anchor=\"middle\">Importance coefficients</text>", w / 2.0);
    let _ = writeln!(s, "<line x1=\"{m}\" y1=\"{zero}\" x2=\"{}\" y2=\"{zero}\" stroke=\"black\"/>", w - m);
    let slot = (w - 2.0 * m) / fits.len().max(1) as f64;
    for (i, (name, a, b)) in fits.iter().enumerate() {
        let x0 = m + i as f64 * slot + slot * 0.15;
        let bw = slot * 0.35;
        for (k, (v, colour)) in [(*a, "#2a6fd0"), (*b, "#d0682a")].into_iter().enumerate() {
            let x = x0 + k as f64 * bw;
            let (top, height) = if v >= 0.0 { (sy(v), zero - sy(v)) } else { (zero, sy(v) - zero) };
            let _ = writeln!(s, "<rect x=\"{x:.1}\" y=\"{top:.1}\" width=\"{bw:.1}\" height=\"{height:.1}\" fill=\"{colour}\"/>");
        }
        let _ = writeln!(s, "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>", x0 + bw, h - m + 30.0, esc(name));
    }
    if fits.is_empty() {
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">no importance fit available</text>", w / 2.0, zero - 10.0);
    }
    let _ = writeln!(s, "<text x=\"{m}\" y=\"40\" fill=\"#2a6fd0\">alpha (syntactic)</text>");
    let _ = writeln!(s, "<text x=\"{}\" y=\"40\" fill=\"#d0682a\">beta (lexical)</text>", m + 140.0);
    s.push_str("</svg>\n");
    s
}

/// Rank-change heatmap: one panel per feature group, rows in baseline rank
/// order, one column per altered level.
pub fn rank_heatmap(bundle: &ReportBundle) -> String {
    let (cell_w, cell_h, label_w, top) = (56.0, 16.0, 170.0, 50.0);
    let levels: Vec<u8> = bundle.rank_deltas.iter().map(|d| d.alteration_level).collect();
    let base = bundle.rank_deltas.first().map(|d| d.rows.clone()).unwrap_or_default();
    let panel_w = label_w + cell_w * levels.len() as f64 + 20.0;
    let groups = [FeatureGroup::Lexical, FeatureGroup::Syntactic];
    let max_rows = groups.iter().map(|g| base.iter().filter(|r| r.group == *g).count()).max().unwrap_or(0);
    let (w, h) = (panel_w * 2.0, top + cell_h * (max_rows as f64 + 1.0) + 20.0);
    let mut s = svg_open(w, h);
    for (p, group) in groups.iter().enumerate() {
        let x0 = p as f64 * panel_w;
        let idx: Vec<usize> = (0..base.len()).filter(|&i| base[i].group == *group).collect();
        let max_abs = idx
            .iter()
            .filter(|&&i| base[i].baseline_significant)
            .flat_map(|&i| bundle.rank_deltas.iter().map(move |d| d.rows[i].delta.abs()))
            .max()
            .unwrap_or(0);
        let _ = writeln!(s, "<text x=\"{:.1}\" y=\"20\">{group} features</text>", x0 + 10.0);
        for (c, l) in levels.iter().enumerate() {
            let _ = writeln!(
                s,
                "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{l}%</text>",
                x0 + label_w + (c as f64 + 0.5) * cell_w,
                top - 6.0
            );
        }
        for (r, &i) in idx.iter().enumerate() {
            let y = top + r as f64 * cell_h;
            let _ = writeln!(
                s,
                "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>",
                x0 + label_w - 6.0,
                y + cell_h - 4.0,
                esc(&base[i].feature)
            );
            for (c, d) in bundle.rank_deltas.iter().enumerate() {
                let row = &d.rows[i];
                let colour = rank_cell_colour(row.delta, row.baseline_significant, max_abs);
                let x = x0 + label_w + c as f64 * cell_w;
                let _ = writeln!(
                    s,
                    "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{cell_w}\" height=\"{cell_h}\" fill=\"{}\" stroke=\"#999999\"/><text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
                    colour.hex(),
                    x + cell_w / 2.0,
                    y + cell_h - 4.0,
                    row.delta
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

pub const PLOT_FILES: [&str; 3] = ["z_by_level.svg", "importance.svg", "rank_heatmap.svg"];

/// Writes the three plots into `dir`. Returns (file name, sha256).
pub fn emit_plots(bundle: &ReportBundle, dir: &Path) -> Result<Vec<(String, String)>, ReportError> {
    let missing: Vec<String> = bundle
        .missing()
        .into_iter()
        .filter(|m| ["zscores", "importance", "rank_changes"].contains(&m.as_str()))
        .collect();
    if !missing.is_empty() {
        return Err(ReportError::Incomplete(missing));
    }
    let svgs = [z_chart(bundle), importance_chart(bundle), rank_heatmap(bundle)];
    PLOT_FILES
        .iter()
        .zip(svgs)
        .map(|(name, svg)| Ok((name.to_string(), write_file(&dir.join(name), svg.as_bytes())?)))
        .collect()
}
