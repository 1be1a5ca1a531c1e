//! Flag / config-file / default resolution.
//!
//! Precedence is flags > config file > built-in defaults. The resolved
//! values are echoed verbatim into every report for provenance. The thread
//! cap (`UWVOS_THREADS`) is deliberately not part of the echo: it changes
//! scheduling, never numbers.

use serde::Deserialize;

use uwvos::adapter::BiasMode;
use uwvos::metrics::{BoundaryTolerance, EvalPolicy, EvalStart};

/// Optional JSON config file: any subset of the policy knobs.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub exclude_first: Option<bool>,
    pub exclude_last: Option<bool>,
    /// Fixed pixel tolerance; absent means the diagonal-fraction default.
    pub boundary_tol: Option<f64>,
    pub eval_start: Option<String>,
    pub fdot_empty_credit: Option<bool>,
    pub bias_mode: Option<String>,
    pub format: Option<String>,
}

impl FileConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// A `--flag/--no-flag` pair resolved to a tri-state.
pub fn tri_state(set: bool, unset: bool) -> Option<bool> {
    match (set, unset) {
        (true, _) => Some(true),
        (_, true) => Some(false),
        _ => None,
    }
}

pub fn resolve<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Assemble the evaluation policy from resolved knobs.
pub fn build_policy(
    exclude_first: Option<bool>,
    exclude_last: Option<bool>,
    boundary_tol: Option<f64>,
    eval_start: Option<EvalStart>,
    fdot_empty_credit: Option<bool>,
    file: &FileConfig,
) -> Result<EvalPolicy, String> {
    let file_start = match file.eval_start.as_deref() {
        None => None,
        Some("first-appearance") => Some(EvalStart::FirstAppearance),
        Some("frame0") => Some(EvalStart::FrameZero),
        Some(other) => return Err(format!("config eval_start: unknown value {other:?}")),
    };
    let tolerance = match boundary_tol.or(file.boundary_tol) {
        Some(px) if px >= 0.0 => BoundaryTolerance::Pixels(px),
        Some(px) => return Err(format!("boundary tolerance {px} is negative")),
        None => BoundaryTolerance::default(),
    };
    Ok(EvalPolicy {
        exclude_first: resolve(exclude_first, file.exclude_first, true),
        exclude_last: resolve(exclude_last, file.exclude_last, true),
        boundary_tolerance: tolerance,
        eval_start: resolve(eval_start, file_start, EvalStart::FirstAppearance),
        fdot_empty_gt_credit: resolve(fdot_empty_credit, file.fdot_empty_credit, true),
    })
}

pub fn resolve_bias_mode(flag: Option<BiasMode>, file: &FileConfig) -> Result<BiasMode, String> {
    let from_file = match file.bias_mode.as_deref() {
        None => None,
        Some(text) => Some(text.parse::<BiasMode>()?),
    };
    Ok(resolve(flag, from_file, BiasMode::Full))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beats_default() {
        let file = FileConfig {
            exclude_first: Some(false),
            ..Default::default()
        };
        let policy =
            build_policy(Some(true), None, None, None, None, &file).unwrap();
        assert!(policy.exclude_first, "flag wins");
        let policy = build_policy(None, None, None, None, None, &file).unwrap();
        assert!(!policy.exclude_first, "file wins over default");
        let policy =
            build_policy(None, None, None, None, None, &FileConfig::default()).unwrap();
        assert!(policy.exclude_first, "default");
    }

    #[test]
    fn tri_state_pairs() {
        assert_eq!(tri_state(true, false), Some(true));
        assert_eq!(tri_state(false, true), Some(false));
        assert_eq!(tri_state(false, false), None);
    }
}
