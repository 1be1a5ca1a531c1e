//! Dense f64 reference kernel for the underwater domain-adaptation block:
//! the bottleneck domain adapter, the spectral channel gate, their block
//! wiring, parameter accounting, and finite-difference verification.
//!
//! This is a verification artifact, not a training runtime: everything is
//! 64-bit, single-threaded per call, and bit-deterministic.

mod gelu;
mod gradcheck;
mod plan;

pub use gelu::{gelu, gelu_grad, gelu_map, normal_cdf};
pub use gradcheck::{
    finite_diff_gradcheck, ChannelGateMap, DifferentiableMap, DomainAdapterMap, LinearMap,
};
pub use plan::{
    ablation_reconciliation, count_trainable_params, format_param_count, trainable_fraction,
    AdapterPlan, BiasMode, ParamCount, ReconciliationRow, StageCount, StageSpec,
    SAM2_HIERA_BPLUS_TOTAL_PARAMS,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ratio between a stage's channel dim and the adapter bottleneck.
pub const BOTTLENECK_RATIO: usize = 16;

/// Dense row-major matrix of 64-bit reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix2D {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix2D {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Wrap a row-major buffer, checking shape and finiteness.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue("matrix entries"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn random(rows: usize, cols: usize, scale: f64, rng: &mut impl Rng) -> Self {
        let data = (0..rows * cols)
            .map(|_| rng.random_range(-scale..scale))
            .collect();
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    /// `out[c] = sum_r x[r] * self[r][c]`: apply with the input indexing
    /// rows, the convention projection weights are stored in.
    pub fn apply_input_major(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.rows {
            return Err(Error::ShapeMismatch(format!(
                "input of {} against {} matrix rows",
                x.len(),
                self.rows
            )));
        }
        let mut out = vec![0.0; self.cols];
        for (r, &xv) in x.iter().enumerate() {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            for (o, &w) in out.iter_mut().zip(row) {
                *o += xv * w;
            }
        }
        Ok(out)
    }
}

/// `channels x positions` feature tensor, channel-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    channels: usize,
    positions: usize,
    data: Vec<f64>,
}

impl FeatureMap {
    pub fn zeros(channels: usize, positions: usize) -> Self {
        Self {
            channels,
            positions,
            data: vec![0.0; channels * positions],
        }
    }

    pub fn from_vec(channels: usize, positions: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != channels * positions {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {channels}x{positions} feature map",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue("feature map entries"));
        }
        Ok(Self {
            channels,
            positions,
            data,
        })
    }

    pub fn random(channels: usize, positions: usize, scale: f64, rng: &mut impl Rng) -> Self {
        let data = (0..channels * positions)
            .map(|_| rng.random_range(-scale..scale))
            .collect();
        Self {
            channels,
            positions,
            data,
        }
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn positions(&self) -> usize {
        self.positions
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, channel: usize, position: usize) -> f64 {
        self.data[channel * self.positions + position]
    }

    /// Channel vector at one spatial position.
    pub fn column(&self, position: usize) -> Vec<f64> {
        (0..self.channels)
            .map(|c| self.data[c * self.positions + position])
            .collect()
    }

    /// Global average pooling over spatial positions.
    pub fn global_average_pool(&self) -> Vec<f64> {
        let n = self.positions as f64;
        (0..self.channels)
            .map(|c| {
                self.data[c * self.positions..(c + 1) * self.positions]
                    .iter()
                    .sum::<f64>()
                    / n
            })
            .collect()
    }

    fn same_shape(&self, other: &FeatureMap) -> Result<()> {
        if self.channels != other.channels || self.positions != other.positions {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.channels, self.positions, other.channels, other.positions
            )));
        }
        Ok(())
    }

    /// Elementwise sum.
    pub fn add(&self, other: &FeatureMap) -> Result<FeatureMap> {
        self.same_shape(other)?;
        Ok(FeatureMap {
            channels: self.channels,
            positions: self.positions,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

/// Bottleneck adapter weights: down-projection, GELU, up-projection, with
/// biases on both layers (see [`BiasMode`] for the accounting variants).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdapterParams {
    /// `d x r` down-projection.
    pub w_in: Matrix2D,
    /// `r` biases.
    pub b_in: Vec<f64>,
    /// `r x d` up-projection.
    pub w_out: Matrix2D,
    /// `d` biases.
    pub b_out: Vec<f64>,
}

fn bottleneck_dim(d: usize) -> Result<usize> {
    if d == 0 || !d.is_multiple_of(BOTTLENECK_RATIO) {
        return Err(Error::IndivisibleDim(d));
    }
    Ok(d / BOTTLENECK_RATIO)
}

impl AdapterParams {
    /// All-zero parameters for channel dim `d` (bottleneck `d/16`).
    pub fn zeros(d: usize) -> Result<Self> {
        let r = bottleneck_dim(d)?;
        Ok(Self {
            w_in: Matrix2D::zeros(d, r),
            b_in: vec![0.0; r],
            w_out: Matrix2D::zeros(r, d),
            b_out: vec![0.0; d],
        })
    }

    pub fn random(d: usize, scale: f64, rng: &mut impl Rng) -> Result<Self> {
        let r = bottleneck_dim(d)?;
        Ok(Self {
            w_in: Matrix2D::random(d, r, scale, rng),
            b_in: (0..r).map(|_| rng.random_range(-scale..scale)).collect(),
            w_out: Matrix2D::random(r, d, scale, rng),
            b_out: (0..d).map(|_| rng.random_range(-scale..scale)).collect(),
        })
    }

    /// Random down-projection but zero up-projection: the adapter
    /// contributes an exact zero delta, the standard insertion-safety
    /// initialization.
    pub fn zero_init(d: usize, scale: f64, rng: &mut impl Rng) -> Result<Self> {
        let mut params = Self::random(d, scale, rng)?;
        params.w_out = Matrix2D::zeros(params.bottleneck(), d);
        params.b_out = vec![0.0; d];
        Ok(params)
    }

    pub fn dim(&self) -> usize {
        self.w_in.rows()
    }

    pub fn bottleneck(&self) -> usize {
        self.w_in.cols()
    }
}

/// Forward pass of the domain adapter on one channel vector:
/// `w_out . gelu(w_in . x + b_in) + b_out`.
pub fn domain_adapter_forward(x: &[f64], params: &AdapterParams) -> Result<Vec<f64>> {
    let mut hidden = params.w_in.apply_input_major(x)?;
    for (h, b) in hidden.iter_mut().zip(&params.b_in) {
        *h += b;
    }
    gelu_map(&mut hidden);
    let mut out = params.w_out.apply_input_major(&hidden)?;
    for (o, b) in out.iter_mut().zip(&params.b_out) {
        *o += b;
    }
    Ok(out)
}

/// Apply the domain adapter at every spatial position of a feature map.
pub fn domain_adapter_map(f: &FeatureMap, params: &AdapterParams) -> Result<FeatureMap> {
    if f.channels() != params.dim() {
        return Err(Error::ShapeMismatch(format!(
            "{} channels vs adapter dim {}",
            f.channels(),
            params.dim()
        )));
    }
    let mut out = FeatureMap::zeros(f.channels(), f.positions());
    for position in 0..f.positions() {
        let y = domain_adapter_forward(&f.column(position), params)?;
        for (c, v) in y.into_iter().enumerate() {
            out.data[c * out.positions + position] = v;
        }
    }
    Ok(out)
}

/// Spectral channel gate weights: two 1x1 convolutions (linear maps on the
/// pooled channel vector) around a GELU, same bottleneck ratio as the
/// adapter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScgParams {
    /// `d x r` reduction.
    pub phi_down: Matrix2D,
    /// `r` biases.
    pub b_down: Vec<f64>,
    /// `r x d` expansion.
    pub phi_up: Matrix2D,
    /// `d` biases.
    pub b_up: Vec<f64>,
    /// Squash the gate through a logistic sigmoid. The literal gate
    /// definition has no outer nonlinearity; this flag is provided for
    /// comparison with classic channel-gating designs and defaults to off.
    pub outer_sigmoid: bool,
}

impl ScgParams {
    pub fn zeros(d: usize) -> Result<Self> {
        let r = bottleneck_dim(d)?;
        Ok(Self {
            phi_down: Matrix2D::zeros(d, r),
            b_down: vec![0.0; r],
            phi_up: Matrix2D::zeros(r, d),
            b_up: vec![0.0; d],
            outer_sigmoid: false,
        })
    }

    pub fn random(d: usize, scale: f64, rng: &mut impl Rng) -> Result<Self> {
        let r = bottleneck_dim(d)?;
        Ok(Self {
            phi_down: Matrix2D::random(d, r, scale, rng),
            b_down: (0..r).map(|_| rng.random_range(-scale..scale)).collect(),
            phi_up: Matrix2D::random(r, d, scale, rng),
            b_up: (0..d).map(|_| rng.random_range(-scale..scale)).collect(),
            outer_sigmoid: false,
        })
    }

    /// Parameters that produce a gate of exactly 1.0 on every channel
    /// (zero expansion weights, unit expansion biases), leaving the gated
    /// feature map bit-identical.
    pub fn identity_gate(d: usize) -> Result<Self> {
        let mut params = Self::zeros(d)?;
        params.b_up = vec![1.0; d];
        Ok(params)
    }

    pub fn dim(&self) -> usize {
        self.phi_down.rows()
    }

    /// The channel gate vector for a feature map.
    pub fn gate(&self, f: &FeatureMap) -> Result<Vec<f64>> {
        let pooled = f.global_average_pool();
        let mut hidden = self.phi_down.apply_input_major(&pooled)?;
        for (h, b) in hidden.iter_mut().zip(&self.b_down) {
            *h += b;
        }
        gelu_map(&mut hidden);
        let mut gate = self.phi_up.apply_input_major(&hidden)?;
        for (g, b) in gate.iter_mut().zip(&self.b_up) {
            *g += b;
        }
        if self.outer_sigmoid {
            for g in &mut gate {
                *g = 1.0 / (1.0 + (-*g).exp());
            }
        }
        Ok(gate)
    }
}

/// Spectral channel gate forward:
/// `out[c, i] = f[c, i] * phi_up(gelu(phi_down(GAP(f))))[c]`.
pub fn scg_forward(f: &FeatureMap, params: &ScgParams) -> Result<FeatureMap> {
    if f.channels() != params.dim() {
        return Err(Error::ShapeMismatch(format!(
            "{} channels vs gate dim {}",
            f.channels(),
            params.dim()
        )));
    }
    let gate = params.gate(f)?;
    let mut out = f.clone();
    for (c, &g) in gate.iter().enumerate() {
        for v in &mut out.data[c * out.positions..(c + 1) * out.positions] {
            *v *= g;
        }
    }
    Ok(out)
}

/// Where the channel gate sits inside the block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScgPlacement {
    /// Gate the final block output (default).
    BlockOutput,
    /// Gate the post-attention features before the feed-forward branch.
    PreFfn,
}

/// Host-block wiring options.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockWiring {
    /// Add the block input `tokens` into the post-attention residual.
    /// Off by default: `attn_out` is then taken as the already-merged
    /// attention-path output.
    pub input_residual: bool,
    pub scg_placement: ScgPlacement,
}

impl Default for BlockWiring {
    fn default() -> Self {
        Self {
            input_residual: false,
            scg_placement: ScgPlacement::BlockOutput,
        }
    }
}

/// The adapter-free host block under the same wiring:
/// `h = attn_out (+ tokens); out = h + ffn(h)`.
pub fn host_block_forward(
    tokens: &FeatureMap,
    attn_out: &FeatureMap,
    ffn: &dyn Fn(&FeatureMap) -> FeatureMap,
    wiring: BlockWiring,
) -> Result<FeatureMap> {
    let h = if wiring.input_residual {
        attn_out.add(tokens)?
    } else {
        attn_out.clone()
    };
    h.add(&ffn(&h))
}

/// One adapted transformer block.
///
/// `h = attn_out (+ tokens) + DA1(attn_out)`; the feed-forward branch runs
/// in parallel with the second adapter: `out = h + ffn(h) + DA2(h)`; the
/// channel gate wraps the block output (or the post-attention features,
/// per wiring). Attention and the FFN are host-supplied opaque values; the
/// kernel never implements them.
pub fn uda_block_forward(
    tokens: &FeatureMap,
    attn_out: &FeatureMap,
    ffn: &dyn Fn(&FeatureMap) -> FeatureMap,
    da1: &AdapterParams,
    da2: &AdapterParams,
    scg: &ScgParams,
    wiring: BlockWiring,
) -> Result<FeatureMap> {
    tokens.same_shape(attn_out)?;
    let mut h = if wiring.input_residual {
        attn_out.add(tokens)?
    } else {
        attn_out.clone()
    };
    h = h.add(&domain_adapter_map(attn_out, da1)?)?;

    match wiring.scg_placement {
        ScgPlacement::BlockOutput => {
            let out = h.add(&ffn(&h))?.add(&domain_adapter_map(&h, da2)?)?;
            scg_forward(&out, scg)
        }
        ScgPlacement::PreFfn => {
            let gated = scg_forward(&h, scg)?;
            gated.add(&ffn(&gated))?.add(&domain_adapter_map(&gated, da2)?)
        }
    }
}
