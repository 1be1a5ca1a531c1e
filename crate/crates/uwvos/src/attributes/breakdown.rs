//! Per-attribute metric breakdowns over a benchmark report.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::BenchmarkReport;

use super::{ProfileSet, BINARY_ATTRIBUTES};

/// One attribute's aggregate score.
#[derive(Debug, Clone, Serialize)]
pub struct BreakdownRow {
    pub attribute: &'static str,
    /// Scored instances carrying the flag that contributed to the mean.
    pub instances: u64,
    /// Mean J&adjusted-F over those instances; `None` (reported as N/A)
    /// when the attribute has no instances — never coerced to 0.
    pub mean_j_and_f_dot: Option<f64>,
}

/// Scores grouped by binary attribute, in canonical attribute order.
#[derive(Debug, Clone, Serialize)]
pub struct AttributeBreakdown {
    pub rows: Vec<BreakdownRow>,
}

impl AttributeBreakdown {
    pub fn row(&self, code: &str) -> Option<&BreakdownRow> {
        self.rows.iter().find(|r| r.attribute == code)
    }
}

/// For each binary attribute, the mean per-object J&adjusted-F over the
/// scored instances carrying the flag. An instance is counted once per
/// attribute it carries. Every scored object must be profiled.
pub fn attribute_breakdown(
    report: &BenchmarkReport,
    profiles: &ProfileSet,
) -> Result<AttributeBreakdown> {
    let mut sums = [0.0f64; 13];
    let mut counts = [0u64; 13];

    for object in &report.objects {
        let profile = profiles
            .get(&object.video_id, object.object_id)
            .ok_or_else(|| Error::MissingProfile {
                video_id: object.video_id.clone(),
                object_id: object.object_id,
            })?;
        // Objects whose window defines neither J nor adjusted F carry no
        // usable score; they still must be profiled.
        let Some(score) = object.j_and_f_dot() else {
            continue;
        };
        for attribute in BINARY_ATTRIBUTES {
            if profile.is_true(attribute) {
                sums[attribute.index()] += score;
                counts[attribute.index()] += 1;
            }
        }
    }

    let rows = BINARY_ATTRIBUTES
        .iter()
        .map(|attribute| {
            let i = attribute.index();
            BreakdownRow {
                attribute: attribute.code(),
                instances: counts[i],
                mean_j_and_f_dot: (counts[i] > 0).then(|| sums[i] / counts[i] as f64),
            }
        })
        .collect();
    Ok(AttributeBreakdown { rows })
}
