//! Dense layers and MLPs with hand-staged backward passes.

use ndarray::{Array1, Array2};
use rand::Rng;

/// Elementwise activation. Derivatives are computed from the layer OUTPUT,
/// which is exact for all four kinds (relu's subgradient at 0 is taken as 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Tanh,
    Sigmoid,
    Identity,
}

impl Activation {
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Activation::Relu => {
                if v > 0.0 {
                    v
                } else {
                    0.0
                }
            }
            Activation::Tanh => v.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-v).exp()),
            Activation::Identity => v,
        }
    }

    /// d(activation)/d(pre-activation) as a function of the output value.
    pub fn deriv_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - y * y,
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Identity => 1.0,
        }
    }
}

/// Affine layer y = act(x W' + b) with W of shape out x in.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
    pub act: Activation,
}

/// Glorot-uniform weight matrix: entries uniform in
/// [-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))].
pub fn glorot_init<R: Rng>(out_dim: usize, in_dim: usize, rng: &mut R) -> Array2<f64> {
    let bound = (6.0 / (in_dim + out_dim) as f64).sqrt();
    Array2::from_shape_fn((out_dim, in_dim), |_| rng.random_range(-bound..bound))
}

impl Dense {
    pub fn new<R: Rng>(out_dim: usize, in_dim: usize, act: Activation, rng: &mut R) -> Self {
        Dense {
            w: glorot_init(out_dim, in_dim, rng),
            b: Array1::zeros(out_dim),
            act,
        }
    }

    pub fn zeros(out_dim: usize, in_dim: usize, act: Activation) -> Self {
        Dense {
            w: Array2::zeros((out_dim, in_dim)),
            b: Array1::zeros(out_dim),
            act,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.w.ncols()
    }

    pub fn out_dim(&self) -> usize {
        self.w.nrows()
    }

    /// Batched forward: x is N x in, result N x out.
    pub fn forward(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut y = x.dot(&self.w.t()) + &self.b;
        if self.act != Activation::Identity {
            y.mapv_inplace(|v| self.act.apply(v));
        }
        y
    }

    /// Backward given the forward input `x`, the forward output `y` and the
    /// loss gradient `dy`; returns (dx, dw, db).
    pub fn backward(
        &self,
        x: &Array2<f64>,
        y: &Array2<f64>,
        dy: &Array2<f64>,
    ) -> (Array2<f64>, Array2<f64>, Array1<f64>) {
        let mut dpre = dy.clone();
        if self.act != Activation::Identity {
            dpre.zip_mut_with(y, |g, &out| *g *= self.act.deriv_from_output(out));
        }
        let dw = dpre.t().dot(x);
        let db = dpre.sum_axis(ndarray::Axis(0));
        let dx = dpre.dot(&self.w);
        (dx, dw, db)
    }
}

/// A chain of dense layers.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    pub layers: Vec<Dense>,
}

impl Mlp {
    pub fn forward(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut cur = self.layers[0].forward(x);
        for layer in &self.layers[1..] {
            cur = layer.forward(&cur);
        }
        cur
    }

    /// Forward that keeps every layer output; `cache[0]` is the input clone
    /// and `cache[i+1]` the output of layer i.
    pub fn forward_cached(&self, x: &Array2<f64>) -> Vec<Array2<f64>> {
        let mut cache = Vec::with_capacity(self.layers.len() + 1);
        cache.push(x.clone());
        for layer in &self.layers {
            let y = layer.forward(cache.last().unwrap());
            cache.push(y);
        }
        cache
    }

    /// Backward through all layers; returns the input gradient and per-layer
    /// (dw, db) in layer order.
    pub fn backward(
        &self,
        cache: &[Array2<f64>],
        dy: &Array2<f64>,
    ) -> (Array2<f64>, Vec<(Array2<f64>, Array1<f64>)>) {
        let mut grads = vec![None; self.layers.len()];
        let mut d = dy.clone();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let (dx, dw, db) = layer.backward(&cache[i], &cache[i + 1], &d);
            grads[i] = Some((dw, db));
            d = dx;
        }
        (d, grads.into_iter().map(|g| g.unwrap()).collect())
    }

    pub fn in_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn out_dim(&self) -> usize {
        self.layers.last().unwrap().out_dim()
    }
}
