//! JSON report schema and bar-chart rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::estimators::EstimatorConfig;
use crate::types::{
    DatasetFingerprint, FeatureEnsembles, PidfReport, Rationale, SelectionResult, Unit,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEcho {
    /// Input path or generator description.
    pub source: String,
    pub estimator: EstimatorConfig,
    pub repetitions: usize,
    pub alpha: f64,
    pub eps_zero: f64,
    pub unit: Unit,
    pub dataset: DatasetFingerprint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub index: usize,
    pub name: String,
    pub mi: f64,
    pub fws: f64,
    pub fwr_total: f64,
    pub fwr_contributions: BTreeMap<String, f64>,
    pub mci: f64,
    pub oci: f64,
    pub max_synergy_set: Vec<String>,
    pub redundant_set: Vec<String>,
    pub selected: bool,
    pub rationale: Rationale,
    pub fws_within_noise: bool,
    pub ensembles: FeatureEnsembles,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub schema_version: u32,
    pub run: RunEcho,
    pub features: Vec<FeatureRecord>,
    pub selected: Vec<String>,
}

impl ReportJson {
    pub fn build(
        report: &PidfReport,
        selection: &SelectionResult,
        source: impl Into<String>,
    ) -> Self {
        let names = &report.dataset.feature_names;
        let name_all =
            |s: &crate::types::FeatureSubset| s.iter().map(|i| names[i].clone()).collect();
        let features = report
            .features
            .iter()
            .map(|f| FeatureRecord {
                index: f.feature,
                name: names[f.feature].clone(),
                mi: f.mi,
                fws: f.fws,
                fwr_total: f.fwr_total,
                fwr_contributions: f
                    .fwr_contributions
                    .iter()
                    .map(|(&j, &v)| (names[j].clone(), v))
                    .collect(),
                mci: f.mci,
                oci: f.oci,
                max_synergy_set: name_all(&f.max_synergy_set),
                redundant_set: name_all(&f.redundant_set),
                selected: selection.selected.contains(f.feature),
                rationale: selection.rationale[f.feature].clone(),
                fws_within_noise: f.fws_within_noise,
                ensembles: f.ensembles.clone(),
            })
            .collect();
        ReportJson {
            schema_version: SCHEMA_VERSION,
            run: RunEcho {
                source: source.into(),
                estimator: report.estimator.clone(),
                repetitions: report.repetitions,
                alpha: report.alpha,
                eps_zero: report.eps_zero,
                unit: report.unit,
                dataset: report.dataset.clone(),
            },
            features,
            selected: name_all(&selection.selected),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values serialise");
        s.push('\n');
        s
    }
}

/// Pixel height of the tallest bar.
pub const PLOT_HEIGHT: f64 = 300.0;
pub const BAR_WIDTH: f64 = 28.0;
pub const GROUP_GAP: f64 = 24.0;
const MARGIN_LEFT: f64 = 56.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 48.0;

const MI_COLOUR: &str = "#d62728";
const FWS_COLOUR: &str = "#2ca02c";
const FWR_COLOUR: &str = "#7b3294";

/// Pixels per unit of information: the tallest stack (MI + FWS, or FWR)
/// spans exactly [`PLOT_HEIGHT`].
pub fn svg_scale(report: &PidfReport) -> f64 {
    let top = report
        .features
        .iter()
        .map(|f| (f.mi.max(0.0) + f.fws.max(0.0)).max(f.fwr_total))
        .fold(0.0, f64::max);
    if top > 0.0 {
        PLOT_HEIGHT / top
    } else {
        1.0
    }
}

#[allow(clippy::too_many_arguments)]
fn rect(
    out: &mut String,
    x: f64,
    y: f64,
    h: f64,
    fill: &str,
    kind: &str,
    feature: usize,
    value: f64,
) {
    let _ = writeln!(
        out,
        r#"  <rect x="{x:.3}" y="{y:.3}" width="{BAR_WIDTH:.3}" height="{h:.3}" fill="{fill}" stroke="white" stroke-width="0.5" data-feature="{feature}" data-kind="{kind}" data-value="{value}"/>"#
    );
}

fn label(out: &mut String, x: f64, y: f64, h: f64, text: &str) {
    if h >= 12.0 {
        let _ = writeln!(
            out,
            r#"  <text x="{:.3}" y="{:.3}" font-size="10" text-anchor="middle" fill="white">{text}</text>"#,
            x + BAR_WIDTH / 2.0,
            y + h / 2.0 + 3.5
        );
    }
}

/// Per feature: a red MI bar with the green synergy stacked on top, and next
/// to it a purple redundancy bar split into one segment per contributor.
/// Synergy is labelled with the max-synergy set indices and each redundancy
/// segment with its contributor index. Negative values are not drawn.
pub fn render_svg(report: &PidfReport) -> String {
    let scale = svg_scale(report);
    let n = report.features.len();
    let group = 2.0 * BAR_WIDTH + GROUP_GAP;
    let width = MARGIN_LEFT + n as f64 * group + GROUP_GAP;
    let height = MARGIN_TOP + PLOT_HEIGHT + MARGIN_BOTTOM;
    let base = MARGIN_TOP + PLOT_HEIGHT;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.3} {height:.3}" data-scale="{scale}">"#
    );
    let _ = writeln!(
        out,
        r#"  <line x1="{MARGIN_LEFT}" y1="{base}" x2="{width:.3}" y2="{base}" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"  <text x="8" y="{:.3}" font-size="11">{}</text>"#,
        MARGIN_TOP + 4.0,
        report.unit
    );
    for (k, f) in report.features.iter().enumerate() {
        let x = MARGIN_LEFT + GROUP_GAP / 2.0 + k as f64 * group;
        let mi_h = f.mi.max(0.0) * scale;
        rect(
            &mut out,
            x,
            base - mi_h,
            mi_h,
            MI_COLOUR,
            "mi",
            f.feature,
            f.mi,
        );
        let fws_h = f.fws.max(0.0) * scale;
        if fws_h > 0.0 {
            let y = base - mi_h - fws_h;
            rect(&mut out, x, y, fws_h, FWS_COLOUR, "fws", f.feature, f.fws);
            let idx: Vec<String> = f.max_synergy_set.iter().map(|j| j.to_string()).collect();
            label(&mut out, x, y, fws_h, &idx.join(","));
        }
        let xr = x + BAR_WIDTH;
        let mut top = base;
        for (&j, &v) in &f.fwr_contributions {
            let h = v.max(0.0) * scale;
            if h <= 0.0 {
                continue;
            }
            top -= h;
            rect(&mut out, xr, top, h, FWR_COLOUR, "fwr", f.feature, v);
            label(&mut out, xr, top, h, &j.to_string());
        }
        let name = &report.dataset.feature_names[f.feature];
        let _ = writeln!(
            out,
            r#"  <text x="{:.3}" y="{:.3}" font-size="11" text-anchor="middle">{}</text>"#,
            x + BAR_WIDTH,
            base + 16.0,
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
