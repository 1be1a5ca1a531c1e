//! Report rendering: CSV projections of the engines' results and a small
//! deterministic SVG bar renderer.
//!
//! CSV and SVG are presentation formats; the JSON structures serialized
//! from the result types are the source of truth. Schemas are versioned via
//! [`crate::REPORT_SCHEMA_VERSION`] and documented in the book.

use crate::adapter::ReconciliationRow;
use crate::attributes::{AttributeBreakdown, ProfileSet, BINARY_ATTRIBUTES};
use crate::metrics::BenchmarkReport;
use crate::stats::{CategoryDistribution, Histogram};

fn fmt_opt(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn finish(writer: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(writer.into_inner().expect("csv buffer")).expect("csv is utf-8")
}

/// Per-object, per-video and dataset rows of a benchmark report.
pub fn render_benchmark_csv(report: &BenchmarkReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "scope",
        "video_id",
        "object_id",
        "objects",
        "frames",
        "j",
        "f",
        "f_dot",
        "j_and_f",
        "j_and_f_dot",
    ])
    .expect("csv record");

    let pair_mean = |a: Option<f64>, b: Option<f64>| a.zip(b).map(|(x, y)| (x + y) / 2.0);

    for object in &report.objects {
        w.write_record([
            "object".to_string(),
            object.video_id.clone(),
            object.object_id.to_string(),
            String::new(),
            object.frames.len().to_string(),
            fmt_opt(object.j),
            fmt_opt(object.f),
            fmt_opt(object.f_dot),
            fmt_opt(pair_mean(object.j, object.f)),
            fmt_opt(object.j_and_f_dot()),
        ])
        .expect("csv record");
    }
    for video in &report.videos {
        w.write_record([
            "video".to_string(),
            video.video_id.clone(),
            String::new(),
            video.object_count.to_string(),
            String::new(),
            fmt_opt(video.j),
            fmt_opt(video.f),
            fmt_opt(video.f_dot),
            fmt_opt(pair_mean(video.j, video.f)),
            fmt_opt(pair_mean(video.j, video.f_dot)),
        ])
        .expect("csv record");
    }
    let d = &report.dataset;
    w.write_record([
        "dataset".to_string(),
        String::new(),
        String::new(),
        d.objects_scored.to_string(),
        String::new(),
        fmt_opt(d.j),
        fmt_opt(d.f),
        fmt_opt(d.f_dot),
        fmt_opt(d.j_and_f),
        fmt_opt(d.j_and_f_dot),
    ])
    .expect("csv record");
    finish(w)
}

/// One row per instance with all sixteen attribute columns; unset fields
/// stay blank.
pub fn render_attribute_table_csv(profiles: &ProfileSet) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["video_id".to_string(), "object_id".to_string()];
    header.extend(BINARY_ATTRIBUTES.iter().map(|a| a.code().to_string()));
    header.extend(["UV".to_string(), "US".to_string(), "WC".to_string()]);
    w.write_record(&header).expect("csv record");

    for profile in profiles.iter() {
        let mut row = vec![profile.video_id.clone(), profile.object_id.to_string()];
        for attribute in BINARY_ATTRIBUTES {
            row.push(match profile.flag(attribute) {
                Some((value, _)) => value.to_string(),
                None => String::new(),
            });
        }
        row.push(
            profile
                .visibility()
                .map(|(v, _)| v.code().to_string())
                .unwrap_or_default(),
        );
        row.push(
            profile
                .scene()
                .map(|(v, _)| v.code().to_string())
                .unwrap_or_default(),
        );
        row.push(
            profile
                .water_color()
                .map(|(v, _)| v.code().to_string())
                .unwrap_or_default(),
        );
        w.write_record(&row).expect("csv record");
    }
    finish(w)
}

/// Attribute breakdown rows; empty attributes render an empty mean cell.
pub fn render_breakdown_csv(breakdown: &AttributeBreakdown) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["attribute", "instances", "mean_j_and_f_dot"])
        .expect("csv record");
    for row in &breakdown.rows {
        w.write_record([
            row.attribute.to_string(),
            row.instances.to_string(),
            fmt_opt(row.mean_j_and_f_dot),
        ])
        .expect("csv record");
    }
    finish(w)
}

/// Histogram rows: bin bounds, raw count, and normalized share.
pub fn render_histogram_csv(histogram: &Histogram) -> String {
    let normalized = histogram.normalized();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["bin_start", "bin_end", "count", "share"])
        .expect("csv record");
    for i in 0..histogram.bins() {
        w.write_record([
            histogram.edges[i].to_string(),
            histogram.edges[i + 1].to_string(),
            histogram.counts[i].to_string(),
            normalized.counts[i].to_string(),
        ])
        .expect("csv record");
    }
    finish(w)
}

/// Category rows: superclass, class, instance count.
pub fn render_category_csv(distribution: &CategoryDistribution) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["superclass", "class", "instances"])
        .expect("csv record");
    for (superclass, classes) in &distribution.by_superclass {
        for (class, count) in classes {
            w.write_record([superclass.clone(), class.clone(), count.to_string()])
                .expect("csv record");
        }
    }
    finish(w)
}

/// Parameter-accounting reconciliation rows.
pub fn render_params_csv(rows: &[ReconciliationRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "variant",
        "with_da",
        "with_scg",
        "plan",
        "derived",
        "printed",
        "printed_value",
        "reconciled",
        "trainable_fraction",
    ])
    .expect("csv record");
    for row in rows {
        w.write_record([
            row.variant.clone(),
            row.with_da.to_string(),
            row.with_scg.to_string(),
            row.plan.clone(),
            row.derived.to_string(),
            row.printed.clone(),
            row.printed_value.to_string(),
            row.reconciled.to_string(),
            row.trainable_fraction.to_string(),
        ])
        .expect("csv record");
    }
    finish(w)
}

/// Minimal deterministic SVG bar chart over histogram bins. Numbers in the
/// CSV/JSON outputs are the contract; this is presentation only.
pub fn histogram_svg(title: &str, histogram: &Histogram) -> String {
    let bins = histogram.bins();
    let width = 640.0;
    let height = 360.0;
    let margin = 40.0;
    let plot_w = width - 2.0 * margin;
    let plot_h = height - 2.0 * margin;
    let max = histogram.counts.iter().copied().fold(0.0f64, f64::max);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        width / 2.0,
        xml_escape(title)
    ));
    svg.push_str(&format!(
        "  <line x1=\"{margin}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        height - margin,
        width - margin,
        height - margin
    ));
    if max > 0.0 {
        let bar_w = plot_w / bins as f64;
        for (i, &count) in histogram.counts.iter().enumerate() {
            let bar_h = plot_h * count / max;
            let x = margin + i as f64 * bar_w;
            let y = height - margin - bar_h;
            svg.push_str(&format!(
                "  <rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
                 fill=\"#4477aa\"><title>[{}, {}): {}</title></rect>\n",
                x,
                y,
                (bar_w - 1.0).max(0.5),
                bar_h,
                histogram.edges[i],
                histogram.edges[i + 1],
                count
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
