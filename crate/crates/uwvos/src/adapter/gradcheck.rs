//! Finite-difference verification of the kernel's analytic
//! Jacobian-vector products.

use crate::error::{Error, Result};

use super::gelu::{gelu, gelu_grad};
use super::{domain_adapter_forward, AdapterParams, FeatureMap, ScgParams};

/// A smooth map with a hand-derived Jacobian-vector product.
pub trait DifferentiableMap {
    /// Evaluate at `x`.
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>>;
    /// Analytic directional derivative at `x` along `v`.
    fn jvp(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>>;
}

/// Compare the analytic JVP with the central difference
/// `(op(x + h v) - op(x - h v)) / 2h` and return the maximum relative error
/// over outputs, with the usual `max(1, |a|, |n|)` denominator.
pub fn finite_diff_gradcheck(
    op: &dyn DifferentiableMap,
    point: &[f64],
    direction: &[f64],
    step: f64,
) -> Result<f64> {
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::NonFiniteValue("gradcheck step"));
    }
    if point.iter().chain(direction).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue("gradcheck inputs"));
    }

    let shift = |sign: f64| -> Vec<f64> {
        point
            .iter()
            .zip(direction)
            .map(|(&p, &v)| p + sign * step * v)
            .collect()
    };
    let plus = op.eval(&shift(1.0))?;
    let minus = op.eval(&shift(-1.0))?;
    let analytic = op.jvp(point, direction)?;
    if plus.len() != minus.len() || plus.len() != analytic.len() {
        return Err(Error::ShapeMismatch(format!(
            "gradcheck outputs: {} / {} / {}",
            plus.len(),
            minus.len(),
            analytic.len()
        )));
    }

    let mut worst = 0.0f64;
    for ((&p, &m), &a) in plus.iter().zip(&minus).zip(&analytic) {
        let numeric = (p - m) / (2.0 * step);
        if !numeric.is_finite() || !a.is_finite() {
            return Err(Error::NonFiniteValue("gradcheck outputs"));
        }
        let denom = 1.0f64.max(a.abs()).max(numeric.abs());
        worst = worst.max((a - numeric).abs() / denom);
    }
    Ok(worst)
}

/// A fixed linear map `y = W x`, exact under finite differences for any
/// step; useful as a gradcheck sanity case.
pub struct LinearMap {
    pub weights: super::Matrix2D,
}

impl DifferentiableMap for LinearMap {
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.weights.apply_input_major(x)
    }

    fn jvp(&self, _x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        self.weights.apply_input_major(v)
    }
}

/// The domain adapter as a map of its input vector.
pub struct DomainAdapterMap {
    pub params: AdapterParams,
}

impl DifferentiableMap for DomainAdapterMap {
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        domain_adapter_forward(x, &self.params)
    }

    fn jvp(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        let params = &self.params;
        let mut hidden = params.w_in.apply_input_major(x)?;
        for (h, b) in hidden.iter_mut().zip(&params.b_in) {
            *h += b;
        }
        let d_hidden = params.w_in.apply_input_major(v)?;
        let activated: Vec<f64> = hidden
            .iter()
            .zip(&d_hidden)
            .map(|(&h, &dh)| gelu_grad(h) * dh)
            .collect();
        params.w_out.apply_input_major(&activated)
    }
}

/// The spectral channel gate as a map of its flattened `d x n` feature map.
pub struct ChannelGateMap {
    pub params: ScgParams,
    pub positions: usize,
}

impl ChannelGateMap {
    fn unflatten(&self, x: &[f64]) -> Result<FeatureMap> {
        FeatureMap::from_vec(self.params.dim(), self.positions, x.to_vec())
    }
}

impl DifferentiableMap for ChannelGateMap {
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let f = self.unflatten(x)?;
        Ok(super::scg_forward(&f, &self.params)?.data().to_vec())
    }

    fn jvp(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        let params = &self.params;
        let f = self.unflatten(x)?;
        let dir = self.unflatten(v)?;
        let d = params.dim();
        let n = self.positions;

        let pooled = f.global_average_pool();
        let d_pooled = dir.global_average_pool();

        let mut z = params.phi_down.apply_input_major(&pooled)?;
        for (zv, b) in z.iter_mut().zip(&params.b_down) {
            *zv += b;
        }
        let dz = params.phi_down.apply_input_major(&d_pooled)?;

        let activated: Vec<f64> = z.iter().map(|&zv| gelu(zv)).collect();
        let d_activated: Vec<f64> = z
            .iter()
            .zip(&dz)
            .map(|(&zv, &dzv)| gelu_grad(zv) * dzv)
            .collect();

        let mut gate = params.phi_up.apply_input_major(&activated)?;
        for (g, b) in gate.iter_mut().zip(&params.b_up) {
            *g += b;
        }
        let mut d_gate = params.phi_up.apply_input_major(&d_activated)?;
        if params.outer_sigmoid {
            for (g, dg) in gate.iter_mut().zip(&mut d_gate) {
                let s = 1.0 / (1.0 + (-*g).exp());
                *dg *= s * (1.0 - s);
                *g = s;
            }
        }

        // out[c, i] = f[c, i] * gate[c]  =>
        // d out[c, i] = v[c, i] * gate[c] + f[c, i] * d gate[c].
        let mut out = vec![0.0; d * n];
        for c in 0..d {
            for i in 0..n {
                out[c * n + i] = dir.get(c, i) * gate[c] + f.get(c, i) * d_gate[c];
            }
        }
        Ok(out)
    }
}
