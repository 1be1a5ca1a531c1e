//! Symbolic accounting of trainable adapter parameters over an encoder
//! insertion plan.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::BOTTLENECK_RATIO;

/// Total parameter count of the frozen SAM2 Hiera-B+ backbone, used to
/// express adapter cost as a trainable fraction.
pub const SAM2_HIERA_BPLUS_TOTAL_PARAMS: u64 = 80_800_000;

/// One encoder stage of the insertion plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageSpec {
    pub stage: u8,
    /// Channel dimension of the stage.
    pub dim: usize,
    /// Transformer blocks in the stage.
    pub blocks: usize,
    /// Insert into every `stride`-th block, starting at block 0.
    pub stride: usize,
    /// Frozen stages receive no insertions.
    pub frozen: bool,
}

impl StageSpec {
    /// Blocks receiving an insertion: indices `0, stride, 2*stride, ...`.
    pub fn inserted_blocks(&self) -> usize {
        if self.frozen || self.stride == 0 {
            0
        } else {
            self.blocks.div_ceil(self.stride)
        }
    }
}

/// Insertion configuration over the four encoder stages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdapterPlan {
    pub stages: Vec<StageSpec>,
}

impl AdapterPlan {
    /// Default plan over the Hiera-B+ stage layout (dims 112/224/448/896,
    /// depths 2/3/16/3): stages 1-2 frozen, stage 3 at stride 2, stage 4
    /// every block.
    pub fn hiera_base_plus() -> Self {
        Self {
            stages: vec![
                StageSpec {
                    stage: 1,
                    dim: 112,
                    blocks: 2,
                    stride: 1,
                    frozen: true,
                },
                StageSpec {
                    stage: 2,
                    dim: 224,
                    blocks: 3,
                    stride: 1,
                    frozen: true,
                },
                StageSpec {
                    stage: 3,
                    dim: 448,
                    blocks: 16,
                    stride: 2,
                    frozen: false,
                },
                StageSpec {
                    stage: 4,
                    dim: 896,
                    blocks: 3,
                    stride: 1,
                    frozen: false,
                },
            ],
        }
    }

    /// The default plan restricted to stage 4 (stage 3 frozen as well).
    pub fn stage4_only() -> Self {
        let mut plan = Self::hiera_base_plus();
        for stage in &mut plan.stages {
            if stage.stage != 4 {
                stage.frozen = true;
            }
        }
        plan
    }
}

/// Which biases count as trainable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BiasMode {
    /// Both layers of every bottleneck module carry biases.
    Full,
    /// Only output-projection biases.
    OutOnly,
    /// No biases.
    None,
}

impl std::str::FromStr for BiasMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "full" => Ok(BiasMode::Full),
            "out-only" => Ok(BiasMode::OutOnly),
            "none" => Ok(BiasMode::None),
            other => Err(format!("unknown bias mode {other:?}")),
        }
    }
}

/// Parameters of one bottleneck module (down `d x r`, up `r x d`) under a
/// bias mode.
fn module_params(dim: usize, bottleneck: usize, bias: BiasMode) -> u64 {
    let weights = 2 * (dim as u64) * (bottleneck as u64);
    let biases = match bias {
        BiasMode::Full => bottleneck as u64 + dim as u64,
        BiasMode::OutOnly => dim as u64,
        BiasMode::None => 0,
    };
    weights + biases
}

/// Per-stage accounting breakdown.
#[derive(Debug, Clone, Serialize)]
pub struct StageCount {
    pub stage: u8,
    pub dim: usize,
    pub bottleneck: usize,
    pub inserted_blocks: usize,
    pub da_params: u64,
    pub scg_params: u64,
    pub total: u64,
}

/// Total trainable parameters with the per-stage breakdown.
#[derive(Debug, Clone, Serialize)]
pub struct ParamCount {
    pub total: u64,
    pub stages: Vec<StageCount>,
}

/// Count trainable parameters: per inserted block, two domain adapters
/// (when `with_da`) and one channel gate (when `with_scg`), each a
/// `d -> d/16 -> d` bottleneck.
pub fn count_trainable_params(
    plan: &AdapterPlan,
    with_da: bool,
    with_scg: bool,
    bias: BiasMode,
) -> Result<ParamCount> {
    let mut stages = Vec::with_capacity(plan.stages.len());
    let mut total = 0u64;
    for spec in &plan.stages {
        if spec.dim == 0 || !spec.dim.is_multiple_of(BOTTLENECK_RATIO) {
            return Err(Error::IndivisibleDim(spec.dim));
        }
        let bottleneck = spec.dim / BOTTLENECK_RATIO;
        let inserted = spec.inserted_blocks();
        let module = module_params(spec.dim, bottleneck, bias);
        let da = if with_da { 2 * module * inserted as u64 } else { 0 };
        let scg = if with_scg { module * inserted as u64 } else { 0 };
        total += da + scg;
        stages.push(StageCount {
            stage: spec.stage,
            dim: spec.dim,
            bottleneck,
            inserted_blocks: inserted,
            da_params: da,
            scg_params: scg,
            total: da + scg,
        });
    }
    Ok(ParamCount { total, stages })
}

/// Trainable fraction relative to the frozen backbone total.
pub fn trainable_fraction(trainable: u64) -> f64 {
    trainable as f64 / SAM2_HIERA_BPLUS_TOTAL_PARAMS as f64
}

/// Render a count the way model tables print it: one decimal in millions
/// above 1 M, whole thousands below.
pub fn format_param_count(count: u64) -> String {
    if count >= 1_000_000 {
        format!("{:.1} M", count as f64 / 1_000_000.0)
    } else {
        format!("{} K", (count as f64 / 1_000.0).round() as u64)
    }
}

/// One row of the published-figure reconciliation.
#[derive(Debug, Clone, Serialize)]
pub struct ReconciliationRow {
    /// Which ablation the row reproduces.
    pub variant: String,
    pub with_da: bool,
    pub with_scg: bool,
    pub plan: String,
    pub derived: u64,
    /// The figure as printed in the model's ablation table.
    pub printed: String,
    /// Numeric value of the printed figure.
    pub printed_value: u64,
    /// Resolution of the printed figure (e.g. 100 000 for "1.5 M").
    pub printed_unit: u64,
    /// Derived count within the print precision: inside half a printed
    /// unit or 0.5 % of the printed value, whichever is looser.
    pub reconciled: bool,
    pub trainable_fraction: f64,
}

#[allow(clippy::too_many_arguments)]
fn reconcile_row(
    variant: &str,
    plan: &AdapterPlan,
    plan_name: &str,
    with_da: bool,
    with_scg: bool,
    bias: BiasMode,
    printed: &str,
    printed_value: u64,
    printed_unit: u64,
) -> Result<ReconciliationRow> {
    let derived = count_trainable_params(plan, with_da, with_scg, bias)?.total;
    let diff = derived.abs_diff(printed_value) as f64;
    let tolerance = (0.005 * printed_value as f64).max(printed_unit as f64 / 2.0);
    Ok(ReconciliationRow {
        variant: variant.to_string(),
        with_da,
        with_scg,
        plan: plan_name.to_string(),
        derived,
        printed: printed.to_string(),
        printed_value,
        printed_unit,
        reconciled: diff <= tolerance,
        trainable_fraction: trainable_fraction(derived),
    })
}

/// Reproduce the published ablation parameter figures from the symbolic
/// count: the full configuration, each module removed in turn, and the
/// stage-4-only plan.
pub fn ablation_reconciliation(bias: BiasMode) -> Result<Vec<ReconciliationRow>> {
    let default_plan = AdapterPlan::hiera_base_plus();
    let stage4 = AdapterPlan::stage4_only();
    Ok(vec![
        reconcile_row(
            "full",
            &default_plan,
            "hiera-b+",
            true,
            true,
            bias,
            "1.5 M",
            1_500_000,
            100_000,
        )?,
        reconcile_row(
            "without-scg",
            &default_plan,
            "hiera-b+",
            true,
            false,
            bias,
            "1.0 M",
            1_000_000,
            100_000,
        )?,
        reconcile_row(
            "without-da",
            &default_plan,
            "hiera-b+",
            false,
            true,
            bias,
            "508 K",
            508_000,
            1_000,
        )?,
        reconcile_row(
            "stage4-only",
            &stage4,
            "stage4-only",
            true,
            true,
            bias,
            "911 K",
            911_000,
            1_000,
        )?,
    ])
}
