//! Self-contained SVG scatter plots for sweep reports.
//!
//! No plotting dependency: the output is a fixed 800×600 viewport built from
//! `<circle>` markers (one per record), per-dataset dashed reference lines
//! (`H(U)` on the α₁ panel, `log₁₀(population)` on the α₂ panel), and a
//! small legend keyed by scheme kind. All coordinates are formatted to two
//! decimals, so identical reports render to identical bytes.

use std::fmt::Write;

use crate::metrics::EvalRecord;
use crate::padding::SchemeKind;

use super::SweepReport;

/// Which metric goes on the vertical axis (β is always horizontal).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScatterAxis {
    /// Conditional entropy α₁ in bits; reference line at H(U).
    Alpha1,
    /// log₁₀ of the k-anonymity α₂; reference line at log₁₀(population).
    Alpha2Log10,
}

impl ScatterAxis {
    fn title(self) -> &'static str {
        match self {
            ScatterAxis::Alpha1 => "alpha1 (bits)",
            ScatterAxis::Alpha2Log10 => "log10(alpha2)",
        }
    }

    fn value(self, record: &EvalRecord) -> f64 {
        match self {
            ScatterAxis::Alpha1 => record.alpha1,
            ScatterAxis::Alpha2Log10 => (record.alpha2 as f64).log10(),
        }
    }

    /// The per-dataset reference level (the dashed line).
    fn reference(self, summary: &super::DatasetSummary) -> f64 {
        match self {
            ScatterAxis::Alpha1 => summary.h_u,
            ScatterAxis::Alpha2Log10 => (summary.population as f64).log10(),
        }
    }
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;

/// Renders one full-viewport scatter panel for the chosen axis.
pub fn scatter_svg(report: &SweepReport, axis: ScatterAxis) -> String {
    let mut out = header();
    panel(&mut out, report, axis, 0.0, WIDTH, HEIGHT);
    out.push_str("</svg>\n");
    out
}

/// Renders both panels stacked into the same 800×600 viewport.
pub(super) fn combined_svg(report: &SweepReport) -> String {
    let mut out = header();
    panel(
        &mut out,
        report,
        ScatterAxis::Alpha1,
        0.0,
        WIDTH,
        HEIGHT / 2.0,
    );
    panel(
        &mut out,
        report,
        ScatterAxis::Alpha2Log10,
        HEIGHT / 2.0,
        WIDTH,
        HEIGHT / 2.0,
    );
    out.push_str("</svg>\n");
    out
}

fn header() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH:.0}\" height=\"{HEIGHT:.0}\" \
         viewBox=\"0 0 {WIDTH:.0} {HEIGHT:.0}\" font-family=\"monospace\" font-size=\"11\">\n\
         <rect x=\"0\" y=\"0\" width=\"{WIDTH:.0}\" height=\"{HEIGHT:.0}\" fill=\"#ffffff\"/>\n"
    )
}

fn kind_color(kind: SchemeKind) -> &'static str {
    match kind {
        SchemeKind::Identity => "#444444",
        SchemeKind::MaxL => "#e41a1c",
        SchemeKind::Blk => "#377eb8",
        SchemeKind::Pwr => "#4daf4a",
        SchemeKind::RndBlk => "#984ea3",
        SchemeKind::RndLen => "#ff7f00",
        SchemeKind::TaBlk => "#a65628",
    }
}

struct Scale {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    left: f64,
    right: f64,
    top: f64,
    bottom: f64,
}

impl Scale {
    fn x(&self, v: f64) -> f64 {
        self.left + (v - self.x_min) / (self.x_max - self.x_min) * (self.right - self.left)
    }

    fn y(&self, v: f64) -> f64 {
        self.bottom - (v - self.y_min) / (self.y_max - self.y_min) * (self.bottom - self.top)
    }
}

fn panel(out: &mut String, report: &SweepReport, axis: ScatterAxis, y0: f64, w: f64, h: f64) {
    let xs: Vec<f64> = report.records.iter().map(|r| r.beta).collect();
    let ys: Vec<f64> = report.records.iter().map(|r| axis.value(r)).collect();
    let refs: Vec<f64> = report.datasets.iter().map(|d| axis.reference(d)).collect();

    let x_hi = xs.iter().copied().fold(1.0_f64, f64::max);
    let y_hi = ys
        .iter()
        .chain(refs.iter())
        .copied()
        .fold(0.0_f64, f64::max);
    let scale = Scale {
        x_min: 1.0 - 0.05 * (x_hi - 1.0).max(0.5),
        x_max: x_hi + 0.05 * (x_hi - 1.0).max(0.5),
        y_min: 0.0,
        y_max: y_hi.max(0.5) * 1.08,
        left: 56.0,
        right: w - 16.0,
        top: y0 + 30.0,
        bottom: y0 + h - 36.0,
    };

    // Plot frame and axis titles.
    let _ = writeln!(
        out,
        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#999999\"/>",
        scale.left,
        scale.top,
        scale.right - scale.left,
        scale.bottom - scale.top,
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">beta (expansion)</text>",
        (scale.left + scale.right) / 2.0,
        scale.bottom + 28.0,
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 {:.2} {:.2})\">{}</text>",
        14.0,
        (scale.top + scale.bottom) / 2.0,
        14.0,
        (scale.top + scale.bottom) / 2.0,
        axis.title(),
    );

    // Ticks.
    for i in 0..=4 {
        let fx = scale.x_min + (scale.x_max - scale.x_min) * i as f64 / 4.0;
        let px = scale.x(fx);
        let _ = writeln!(
            out,
            "<line x1=\"{px:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"#999999\"/>",
            scale.bottom,
            scale.bottom + 4.0,
        );
        let _ = writeln!(
            out,
            "<text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{fx:.2}</text>",
            scale.bottom + 16.0,
        );
        let fy = scale.y_min + (scale.y_max - scale.y_min) * i as f64 / 4.0;
        let py = scale.y(fy);
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" stroke=\"#999999\"/>",
            scale.left - 4.0,
            scale.left,
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{fy:.2}</text>",
            scale.left - 7.0,
            py + 4.0,
        );
    }

    // Legend: one swatch per scheme kind present in the records.
    let mut legend_x = scale.left;
    for kind in [
        SchemeKind::Identity,
        SchemeKind::MaxL,
        SchemeKind::Blk,
        SchemeKind::Pwr,
        SchemeKind::RndBlk,
        SchemeKind::RndLen,
        SchemeKind::TaBlk,
    ] {
        if !report.records.iter().any(|r| r.scheme.kind() == kind) {
            continue;
        }
        let _ = writeln!(
            out,
            "<rect x=\"{legend_x:.2}\" y=\"{:.2}\" width=\"8\" height=\"8\" fill=\"{}\"/>",
            y0 + 12.0,
            kind_color(kind),
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
            legend_x + 12.0,
            y0 + 20.0,
            kind.token(),
        );
        legend_x += 12.0 + 7.0 * kind.token().len() as f64 + 14.0;
    }

    // Per-dataset dashed reference line with its label at the right edge.
    for (summary, reference) in report.datasets.iter().zip(&refs) {
        let py = scale.y(*reference);
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" stroke=\"#555555\" stroke-dasharray=\"6 4\"/>",
            scale.left, scale.right,
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            scale.right - 4.0,
            py - 4.0,
            escape(&summary.label),
        );
    }

    // One marker per record.
    for record in &report.records {
        let _ = writeln!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{}\" fill-opacity=\"0.75\"/>",
            scale.x(record.beta),
            scale.y(axis.value(record)),
            kind_color(record.scheme.kind()),
        );
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
