//! Multilayer perceptron split into a shared feature extractor and a private
//! decision head, with softmax cross-entropy, exact backpropagation and
//! heavy-ball SGD.
//!
//! Every affine layer is stored as a `(out, in)` row-major weight matrix
//! followed by an `(out,)` bias. All layers but the last form the extractor
//! and are followed by ReLU; the last layer is the head and produces logits.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::numerics::{Layout, ParamVector, Shape};
use crate::{Error, Result};

/// Probability floor applied inside [`cross_entropy`].
pub const PROB_FLOOR: f64 = 1e-12;

/// Architecture of the MLP.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub input_dim: usize,
    pub hidden_dims: Vec<usize>,
    pub num_classes: usize,
}

/// Extractor parameters `theta` and head parameters `phi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub theta: ParamVector,
    pub phi: ParamVector,
}

impl ModelParams {
    /// `ω = [θ; φ]`.
    pub fn omega(&self) -> ParamVector {
        self.theta.concat(&self.phi)
    }

    /// Inverse of [`ModelParams::omega`].
    pub fn from_omega(spec: &ModelSpec, omega: &ParamVector) -> Result<Self> {
        let (theta, phi) = omega.split(&spec.extractor_layout(), &spec.head_layout())?;
        Ok(ModelParams { theta, phi })
    }
}

/// Heavy-ball velocity over `ω`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentumState {
    pub velocity: ParamVector,
}

impl MomentumState {
    pub fn zeros(layout: Layout) -> Self {
        MomentumState {
            velocity: ParamVector::zeros(layout),
        }
    }

    pub fn reset(&mut self) {
        self.velocity.scale(0.0);
    }
}

/// Dimensions of one affine layer plus the offset of its weights in the flat buffer.
#[derive(Clone, Copy, Debug)]
struct Affine {
    inp: usize,
    out: usize,
    offset: usize,
}

impl Affine {
    fn weights<'a>(&self, p: &'a [f64]) -> &'a [f64] {
        &p[self.offset..self.offset + self.out * self.inp]
    }

    fn bias<'a>(&self, p: &'a [f64]) -> &'a [f64] {
        let b = self.offset + self.out * self.inp;
        &p[b..b + self.out]
    }

    fn numel(&self) -> usize {
        self.out * (self.inp + 1)
    }

    fn apply(&self, p: &[f64], x: &[f64], y: &mut Vec<f64>) {
        let w = self.weights(p);
        let b = self.bias(p);
        y.clear();
        for o in 0..self.out {
            let row = &w[o * self.inp..(o + 1) * self.inp];
            let s = row.iter().zip(x).fold(b[o], |acc, (a, v)| acc + a * v);
            y.push(s);
        }
    }
}

impl ModelSpec {
    pub fn new(input_dim: usize, hidden_dims: Vec<usize>, num_classes: usize) -> Result<Self> {
        if input_dim == 0 || num_classes == 0 {
            return Err(invalid!("input_dim and num_classes must be positive"));
        }
        if hidden_dims.is_empty() || hidden_dims.contains(&0) {
            return Err(invalid!(
                "hidden_dims must have at least one entry and no zeros, got {hidden_dims:?}"
            ));
        }
        Ok(ModelSpec {
            input_dim,
            hidden_dims,
            num_classes,
        })
    }

    /// `[input, hidden.., classes]`.
    pub fn layer_dims(&self) -> Vec<usize> {
        let mut d = Vec::with_capacity(self.hidden_dims.len() + 2);
        d.push(self.input_dim);
        d.extend_from_slice(&self.hidden_dims);
        d.push(self.num_classes);
        d
    }

    fn layers(&self) -> (Vec<Affine>, Affine) {
        let dims = self.layer_dims();
        let mut offset = 0;
        let mut ext = Vec::with_capacity(dims.len() - 2);
        for w in dims[..dims.len() - 1].windows(2) {
            let l = Affine {
                inp: w[0],
                out: w[1],
                offset,
            };
            offset += l.numel();
            ext.push(l);
        }
        let n = dims.len();
        let head = Affine {
            inp: dims[n - 2],
            out: dims[n - 1],
            offset: 0,
        };
        (ext, head)
    }

    fn layout_of(layers: &[(usize, usize)]) -> Layout {
        let mut shapes = Vec::with_capacity(layers.len() * 2);
        for &(inp, out) in layers {
            shapes.push(Shape::Matrix(out, inp));
            shapes.push(Shape::Vector(out));
        }
        Layout::new(shapes)
    }

    pub fn extractor_layout(&self) -> Layout {
        let dims = self.layer_dims();
        let pairs: Vec<_> = dims[..dims.len() - 1]
            .windows(2)
            .map(|w| (w[0], w[1]))
            .collect();
        Self::layout_of(&pairs)
    }

    pub fn head_layout(&self) -> Layout {
        let dims = self.layer_dims();
        let n = dims.len();
        Self::layout_of(&[(dims[n - 2], dims[n - 1])])
    }

    /// Layout of `ω = [θ; φ]`.
    pub fn full_layout(&self) -> Layout {
        self.extractor_layout().concat(&self.head_layout())
    }

    pub fn extractor_len(&self) -> usize {
        self.extractor_layout().numel()
    }

    pub fn head_len(&self) -> usize {
        self.head_layout().numel()
    }

    pub fn total_len(&self) -> usize {
        self.extractor_len() + self.head_len()
    }

    fn init_layout<R: Rng + ?Sized>(layout: Layout, rng: &mut R) -> ParamVector {
        let mut p = ParamVector::zeros(layout.clone());
        let vals = p.values_mut();
        let mut at = 0;
        for shape in layout.shapes() {
            if let Shape::Matrix(out, inp) = *shape {
                let s = libm::sqrt(6.0 / (inp + out) as f64);
                for v in &mut vals[at..at + out * inp] {
                    *v = rng.random_range(-s..=s);
                }
            }
            at += shape.len();
        }
        p
    }

    /// Uniform `[-s, s]` weights with `s = sqrt(6 / (fan_in + fan_out))`, zero biases.
    pub fn init_extractor<R: Rng + ?Sized>(&self, rng: &mut R) -> ParamVector {
        Self::init_layout(self.extractor_layout(), rng)
    }

    pub fn init_head<R: Rng + ?Sized>(&self, rng: &mut R) -> ParamVector {
        Self::init_layout(self.head_layout(), rng)
    }

    pub fn init<R: Rng + ?Sized>(&self, rng: &mut R) -> ModelParams {
        let theta = self.init_extractor(rng);
        let phi = self.init_head(rng);
        ModelParams { theta, phi }
    }

    fn check_params(&self, params: &ModelParams) -> Result<()> {
        if *params.theta.layout() != self.extractor_layout() {
            return Err(Error::LayoutMismatch("extractor parameters"));
        }
        if *params.phi.layout() != self.head_layout() {
            return Err(Error::LayoutMismatch("head parameters"));
        }
        Ok(())
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                context: "model input",
                expected: self.input_dim,
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Representation `z = f(θ; x)`.
    pub fn features(&self, params: &ModelParams, x: &[f64]) -> Result<Vec<f64>> {
        self.check_params(params)?;
        self.check_input(x)?;
        let (ext, _) = self.layers();
        let theta = params.theta.values();
        let mut cur = x.to_vec();
        let mut next = Vec::new();
        for l in &ext {
            l.apply(theta, &cur, &mut next);
            relu(&mut next);
            core::mem::swap(&mut cur, &mut next);
        }
        Ok(cur)
    }

    /// Head logits `h(φ; f(θ; x))`.
    pub fn logits(&self, params: &ModelParams, x: &[f64]) -> Result<Vec<f64>> {
        let z = self.features(params, x)?;
        let (_, head) = self.layers();
        let mut out = Vec::with_capacity(self.num_classes);
        head.apply(params.phi.values(), &z, &mut out);
        Ok(out)
    }

    /// Class probabilities.
    pub fn forward(&self, params: &ModelParams, x: &[f64]) -> Result<Vec<f64>> {
        let mut z = self.logits(params, x)?;
        softmax_in_place(&mut z);
        Ok(z)
    }

    /// Mean cross-entropy over the batch and its gradient over `[θ; φ]`.
    pub fn loss_and_grad(
        &self,
        params: &ModelParams,
        batch: &[(&[f64], usize)],
    ) -> Result<(f64, ParamVector)> {
        self.check_params(params)?;
        if batch.is_empty() {
            return Err(Error::Empty("training batch"));
        }
        let (ext, head) = self.layers();
        let theta = params.theta.values();
        let phi = params.phi.values();
        let mut g_theta = vec![0.0; theta.len()];
        let mut g_phi = vec![0.0; phi.len()];
        let mut loss = 0.0;

        // acts[0] = x, acts[k] = relu output of extractor layer k-1
        let mut acts: Vec<Vec<f64>> = vec![Vec::new(); ext.len() + 1];
        let mut upstream = Vec::new();
        let mut down = Vec::new();
        for &(x, y) in batch {
            self.check_input(x)?;
            if y >= self.num_classes {
                return Err(Error::OutOfRange {
                    context: "class label",
                    index: y,
                    len: self.num_classes,
                });
            }
            acts[0].clear();
            acts[0].extend_from_slice(x);
            for (k, l) in ext.iter().enumerate() {
                let (lo, hi) = acts.split_at_mut(k + 1);
                l.apply(theta, &lo[k], &mut hi[0]);
                relu(&mut hi[0]);
            }
            let z = &acts[ext.len()];
            let mut probs = Vec::with_capacity(self.num_classes);
            head.apply(phi, z, &mut probs);
            softmax_in_place(&mut probs);
            loss += cross_entropy(&probs, y)?;

            // dL/dlogits = p - onehot(y)
            upstream.clear();
            upstream.extend_from_slice(&probs);
            upstream[y] -= 1.0;
            backprop_affine(&head, phi, &mut g_phi, z, &upstream, &mut down);
            for (k, l) in ext.iter().enumerate().rev() {
                // ReLU mask on this layer's output
                for (d, a) in down.iter_mut().zip(&acts[k + 1]) {
                    if *a <= 0.0 {
                        *d = 0.0;
                    }
                }
                core::mem::swap(&mut upstream, &mut down);
                backprop_affine(l, theta, &mut g_theta, &acts[k], &upstream, &mut down);
            }
        }

        let n = batch.len() as f64;
        let mut grad = g_theta;
        grad.extend_from_slice(&g_phi);
        for g in &mut grad {
            *g /= n;
        }
        let grad = ParamVector::new(grad, self.full_layout())?;
        Ok((loss / n, grad))
    }

    /// Gradient of the batch-mean cross-entropy over `[θ; φ]`.
    pub fn backward(&self, params: &ModelParams, batch: &[(&[f64], usize)]) -> Result<ParamVector> {
        self.loss_and_grad(params, batch).map(|(_, g)| g)
    }
}

/// Accumulate weight/bias gradients of one affine layer and write the
/// gradient w.r.t. its input into `down`.
fn backprop_affine(
    l: &Affine,
    params: &[f64],
    grad: &mut [f64],
    input: &[f64],
    upstream: &[f64],
    down: &mut Vec<f64>,
) {
    let w = l.weights(params);
    down.clear();
    down.resize(l.inp, 0.0);
    let bias_at = l.offset + l.out * l.inp;
    for o in 0..l.out {
        let u = upstream[o];
        if u == 0.0 {
            continue;
        }
        let row = l.offset + o * l.inp;
        for i in 0..l.inp {
            grad[row + i] += u * input[i];
            down[i] += u * w[o * l.inp + i];
        }
        grad[bias_at + o] += u;
    }
}

fn relu(v: &mut [f64]) {
    for x in v {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
}

/// Numerically stable softmax.
pub fn softmax_in_place(z: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = libm::exp(*v - max);
        sum += *v;
    }
    for v in z.iter_mut() {
        *v /= sum;
    }
}

/// `-ln(max(probs[y], PROB_FLOOR))`.
pub fn cross_entropy(probs: &[f64], y: usize) -> Result<f64> {
    let p = *probs.get(y).ok_or(Error::OutOfRange {
        context: "cross_entropy class",
        index: y,
        len: probs.len(),
    })?;
    Ok(-libm::log(p.max(PROB_FLOOR)))
}

/// One heavy-ball step: `v <- momentum * v + grad`, `ω <- ω - lr * v`.
pub fn sgd_momentum_step(
    omega: &mut ParamVector,
    grad: &ParamVector,
    state: &mut MomentumState,
    lr: f64,
    momentum: f64,
) -> Result<()> {
    if !(lr >= 0.0) || !(0.0..1.0).contains(&momentum) {
        return Err(invalid!("need lr >= 0 and 0 <= momentum < 1, got lr={lr} momentum={momentum}"));
    }
    if omega.layout() != grad.layout() || omega.layout() != state.velocity.layout() {
        return Err(Error::LayoutMismatch("sgd_momentum_step"));
    }
    state.velocity.scale(momentum);
    state.velocity.axpy(1.0, grad)?;
    omega.axpy(-lr, &state.velocity)?;
    omega.check_finite("sgd_momentum_step")
}
