//! Batched GRU cell (reset-before-candidate formulation):
//!   z = sigmoid(x Wzx' + h Wzh' + bz)
//!   r = sigmoid(x Wrx' + h Wrh' + br)
//!   c = tanh(x Wcx' + (r*h) Wch' + bc)
//!   h' = (1-z)*h + z*c

use ndarray::{Array1, Array2, Axis};
use rand::Rng;

use super::dense::glorot_init;

#[derive(Clone, Debug, PartialEq)]
pub struct GruCell {
    pub wz_x: Array2<f64>,
    pub wz_h: Array2<f64>,
    pub bz: Array1<f64>,
    pub wr_x: Array2<f64>,
    pub wr_h: Array2<f64>,
    pub br: Array1<f64>,
    pub wc_x: Array2<f64>,
    pub wc_h: Array2<f64>,
    pub bc: Array1<f64>,
}

/// Intermediate gate values needed by the backward pass. The forward input
/// `x` and previous hidden `h` are cached by the caller.
#[derive(Clone, Debug)]
pub struct GruCache {
    pub z: Array2<f64>,
    pub r: Array2<f64>,
    pub c: Array2<f64>,
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

impl GruCell {
    pub fn new<R: Rng>(in_dim: usize, hidden: usize, rng: &mut R) -> Self {
        GruCell {
            wz_x: glorot_init(hidden, in_dim, rng),
            wz_h: glorot_init(hidden, hidden, rng),
            bz: Array1::zeros(hidden),
            wr_x: glorot_init(hidden, in_dim, rng),
            wr_h: glorot_init(hidden, hidden, rng),
            br: Array1::zeros(hidden),
            wc_x: glorot_init(hidden, in_dim, rng),
            wc_h: glorot_init(hidden, hidden, rng),
            bc: Array1::zeros(hidden),
        }
    }

    pub fn zeros(in_dim: usize, hidden: usize) -> Self {
        GruCell {
            wz_x: Array2::zeros((hidden, in_dim)),
            wz_h: Array2::zeros((hidden, hidden)),
            bz: Array1::zeros(hidden),
            wr_x: Array2::zeros((hidden, in_dim)),
            wr_h: Array2::zeros((hidden, hidden)),
            br: Array1::zeros(hidden),
            wc_x: Array2::zeros((hidden, in_dim)),
            wc_h: Array2::zeros((hidden, hidden)),
            bc: Array1::zeros(hidden),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.wz_x.ncols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.wz_x.nrows()
    }

    /// Batched step: x is N x in, h is N x hidden; returns (h', cache).
    pub fn forward(&self, x: &Array2<f64>, h: &Array2<f64>) -> (Array2<f64>, GruCache) {
        let mut z = x.dot(&self.wz_x.t()) + h.dot(&self.wz_h.t()) + &self.bz;
        z.mapv_inplace(sigmoid);
        let mut r = x.dot(&self.wr_x.t()) + h.dot(&self.wr_h.t()) + &self.br;
        r.mapv_inplace(sigmoid);
        let rh = &r * h;
        let mut c = x.dot(&self.wc_x.t()) + rh.dot(&self.wc_h.t()) + &self.bc;
        c.mapv_inplace(f64::tanh);
        let h_new = (1.0 - &z) * h + &z * &c;
        (h_new, GruCache { z, r, c })
    }

    /// Backward of one step. `dh_new` is the gradient at the step output;
    /// returns (dx, dh) and accumulates parameter gradients into `grads`.
    pub fn backward(
        &self,
        x: &Array2<f64>,
        h: &Array2<f64>,
        cache: &GruCache,
        dh_new: &Array2<f64>,
        grads: &mut GruCell,
    ) -> (Array2<f64>, Array2<f64>) {
        let GruCache { z, r, c } = cache;

        let dz = dh_new * &(c - h);
        let dc = dh_new * z;
        let mut dh = dh_new * &(1.0 - z);

        // c = tanh(ac), ac = x Wcx' + (r*h) Wch' + bc
        let dac = &dc * &(1.0 - c * c);
        let rh = r * h;
        grads.wc_x += &dac.t().dot(x);
        grads.wc_h += &dac.t().dot(&rh);
        grads.bc += &dac.sum_axis(Axis(0));
        let mut dx = dac.dot(&self.wc_x);
        let drh = dac.dot(&self.wc_h);
        let dr = &drh * h;
        dh += &(&drh * r);

        // z = sigmoid(az)
        let daz = &dz * &(z * &(1.0 - z));
        grads.wz_x += &daz.t().dot(x);
        grads.wz_h += &daz.t().dot(h);
        grads.bz += &daz.sum_axis(Axis(0));
        dx += &daz.dot(&self.wz_x);
        dh += &daz.dot(&self.wz_h);

        // r = sigmoid(ar)
        let dar = &dr * &(r * &(1.0 - r));
        grads.wr_x += &dar.t().dot(x);
        grads.wr_h += &dar.t().dot(h);
        grads.br += &dar.sum_axis(Axis(0));
        dx += &dar.dot(&self.wr_x);
        dh += &dar.dot(&self.wr_h);

        (dx, dh)
    }
}
