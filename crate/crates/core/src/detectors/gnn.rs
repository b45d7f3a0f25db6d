//! Message-passing GNN detectors over the detection graph.
//!
//! Both variants share the skeleton: lift the raw 3-vector node features
//! with MLP1, run T message-passing steps (message, sum-aggregate over
//! active edges, GRU update of a persistent hidden state from the previous
//! node state concatenated with the aggregated message, post-MLP back to
//! the node-state size), then classify each node with a readout MLP and
//! softmax. They differ only in the message function:
//!   egnn : m_{j->i} = eps_ji * MLP2(z_j),      eps_ji = -h_j'h_i
//!   naive: m_{j->i} = M([z_i; z_j; e_ji; s2]), e_ji  = +h_j'h_i
//! Messages are evaluated per directed active edge, so edge drop reduces
//! compute proportionally.
//!
//! The backward pass is a hand-staged adjoint of the unrolled forward; the
//! finite-difference oracle in `nn::fd` is its correctness reference.

use std::time::Instant;

use ndarray::{s, Array1, Array2, Axis};

use crate::detectors::{hard_decision, DetectorMeta, DetectorOutput};
use crate::error::{Error, Result};
use crate::graph::{DetectionGraph, Variant};
use crate::nn::{
    cross_entropy, load_param_vector, save_param_vector, softmax_ce_grad, softmax_rows,
    Activation, Dense, GruCache, GruCell, Mlp, ParamVector,
};
use crate::rng::{substream, Stream};

/// Architecture hyperparameters. `ed_count` records how many directed edges
/// the model expects dropped at inference (the value it was trained with).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArchConfig {
    pub variant: Variant,
    /// Node-state size S.
    pub s: usize,
    /// GRU hidden size.
    pub d_h: usize,
    /// Message-passing steps T.
    pub t: usize,
    /// Alphabet size K.
    pub k: usize,
    pub readout_hidden: usize,
    pub ed_count: usize,
}

impl ArchConfig {
    /// Reference sizes: S=32, hidden 128, T=6, readout 64.
    pub fn reference(variant: Variant, k: usize, ed_count: usize) -> Self {
        ArchConfig {
            variant,
            s: 32,
            d_h: 128,
            t: 6,
            k,
            readout_hidden: 64,
            ed_count,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.s == 0 || self.d_h == 0 || self.k == 0 || self.readout_hidden == 0 {
            return Err(Error::InvalidArgument(
                "all layer sizes must be positive".into(),
            ));
        }
        if self.t < 1 {
            return Err(Error::InvalidArgument(
                "message-passing step count must be >= 1".into(),
            ));
        }
        if self.ed_count % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "edge drop count must be even, got {}",
                self.ed_count
            )));
        }
        Ok(())
    }
}

/// All learnable weights of one GNN detector.
#[derive(Clone, Debug, PartialEq)]
pub struct EgnnParams {
    pub arch: ArchConfig,
    /// Node-feature lift, 3 -> S, relu.
    pub mlp1: Mlp,
    /// Message MLP: egnn S -> S (relu); naive (2S+2) -> S -> S (relu).
    pub msg: Mlp,
    /// Update cell: input [z; aggregated message] (2S), hidden D_h.
    pub gru: GruCell,
    /// Hidden-to-state MLP, D_h -> S, relu.
    pub post: Mlp,
    /// Readout, S -> readout_hidden -> K, relu then identity.
    pub readout: Mlp,
}

enum ParamRef<'a> {
    M(&'a Array2<f64>),
    V(&'a Array1<f64>),
}

enum ParamMut<'a> {
    M(&'a mut Array2<f64>),
    V(&'a mut Array1<f64>),
}

const META_NAME: &str = "meta";
const META_VERSION: f64 = 1.0;

impl EgnnParams {
    /// Glorot-initialized parameters; each component draws from its own
    /// seed substream, so layouts are stable across architectures.
    pub fn new(arch: ArchConfig, seed: u64) -> Result<Self> {
        arch.validate()?;
        let s = arch.s;
        let mlp1 = Mlp {
            layers: vec![Dense::new(
                s,
                3,
                Activation::Relu,
                &mut substream(seed, Stream::Init, 0),
            )],
        };
        let msg = {
            let mut rng = substream(seed, Stream::Init, 1);
            match arch.variant {
                Variant::Egnn => Mlp {
                    layers: vec![Dense::new(s, s, Activation::Relu, &mut rng)],
                },
                Variant::Naive => Mlp {
                    layers: vec![
                        Dense::new(s, 2 * s + 2, Activation::Relu, &mut rng),
                        Dense::new(s, s, Activation::Relu, &mut rng),
                    ],
                },
            }
        };
        let gru = GruCell::new(2 * s, arch.d_h, &mut substream(seed, Stream::Init, 2));
        let post = Mlp {
            layers: vec![Dense::new(
                s,
                arch.d_h,
                Activation::Relu,
                &mut substream(seed, Stream::Init, 3),
            )],
        };
        let readout = {
            let mut rng = substream(seed, Stream::Init, 4);
            Mlp {
                layers: vec![
                    Dense::new(arch.readout_hidden, s, Activation::Relu, &mut rng),
                    Dense::new(arch.k, arch.readout_hidden, Activation::Identity, &mut rng),
                ],
            }
        };
        Ok(EgnnParams {
            arch,
            mlp1,
            msg,
            gru,
            post,
            readout,
        })
    }

    /// All-zero parameters of the same shape (gradient accumulators).
    pub fn zeros(arch: ArchConfig) -> Result<Self> {
        arch.validate()?;
        let s = arch.s;
        let msg = match arch.variant {
            Variant::Egnn => Mlp {
                layers: vec![Dense::zeros(s, s, Activation::Relu)],
            },
            Variant::Naive => Mlp {
                layers: vec![
                    Dense::zeros(s, 2 * s + 2, Activation::Relu),
                    Dense::zeros(s, s, Activation::Relu),
                ],
            },
        };
        Ok(EgnnParams {
            arch,
            mlp1: Mlp {
                layers: vec![Dense::zeros(s, 3, Activation::Relu)],
            },
            msg,
            gru: GruCell::zeros(2 * s, arch.d_h),
            post: Mlp {
                layers: vec![Dense::zeros(s, arch.d_h, Activation::Relu)],
            },
            readout: Mlp {
                layers: vec![
                    Dense::zeros(arch.readout_hidden, s, Activation::Relu),
                    Dense::zeros(arch.k, arch.readout_hidden, Activation::Identity),
                ],
            },
        })
    }

    fn params_ref(&self) -> Vec<(String, ParamRef<'_>)> {
        let mut out = Vec::new();
        let mlps = [
            ("mlp1", &self.mlp1),
            ("msg", &self.msg),
            ("post", &self.post),
            ("readout", &self.readout),
        ];
        for (name, mlp) in mlps {
            for (i, l) in mlp.layers.iter().enumerate() {
                out.push((format!("{name}.{i}.w"), ParamRef::M(&l.w)));
                out.push((format!("{name}.{i}.b"), ParamRef::V(&l.b)));
            }
        }
        let g = &self.gru;
        out.push(("gru.wz_x".into(), ParamRef::M(&g.wz_x)));
        out.push(("gru.wz_h".into(), ParamRef::M(&g.wz_h)));
        out.push(("gru.bz".into(), ParamRef::V(&g.bz)));
        out.push(("gru.wr_x".into(), ParamRef::M(&g.wr_x)));
        out.push(("gru.wr_h".into(), ParamRef::M(&g.wr_h)));
        out.push(("gru.br".into(), ParamRef::V(&g.br)));
        out.push(("gru.wc_x".into(), ParamRef::M(&g.wc_x)));
        out.push(("gru.wc_h".into(), ParamRef::M(&g.wc_h)));
        out.push(("gru.bc".into(), ParamRef::V(&g.bc)));
        out
    }

    fn params_mut(&mut self) -> Vec<(String, ParamMut<'_>)> {
        let mut out = Vec::new();
        let mlps = [
            ("mlp1", &mut self.mlp1 as *mut Mlp),
            ("msg", &mut self.msg as *mut Mlp),
            ("post", &mut self.post as *mut Mlp),
            ("readout", &mut self.readout as *mut Mlp),
        ];
        // The raw pointers only bridge the borrow checker for four disjoint
        // fields of self; they are dereferenced exactly once each.
        for (name, mlp) in mlps {
            let mlp = unsafe { &mut *mlp };
            for (i, l) in mlp.layers.iter_mut().enumerate() {
                out.push((format!("{name}.{i}.w"), ParamMut::M(&mut l.w)));
                out.push((format!("{name}.{i}.b"), ParamMut::V(&mut l.b)));
            }
        }
        let g = &mut self.gru;
        out.push(("gru.wz_x".into(), ParamMut::M(&mut g.wz_x)));
        out.push(("gru.wz_h".into(), ParamMut::M(&mut g.wz_h)));
        out.push(("gru.bz".into(), ParamMut::V(&mut g.bz)));
        out.push(("gru.wr_x".into(), ParamMut::M(&mut g.wr_x)));
        out.push(("gru.wr_h".into(), ParamMut::M(&mut g.wr_h)));
        out.push(("gru.br".into(), ParamMut::V(&mut g.br)));
        out.push(("gru.wc_x".into(), ParamMut::M(&mut g.wc_x)));
        out.push(("gru.wc_h".into(), ParamMut::M(&mut g.wc_h)));
        out.push(("gru.bc".into(), ParamMut::V(&mut g.bc)));
        out
    }

    /// Flattens all learnable parameters into a named vector (row-major
    /// matrices, canonical component order).
    pub fn to_vector(&self) -> ParamVector {
        let mut v = ParamVector::new();
        for (name, p) in self.params_ref() {
            match p {
                ParamRef::M(m) => v.push(&name, m.as_slice().unwrap()).unwrap(),
                ParamRef::V(b) => v.push(&name, b.as_slice().unwrap()).unwrap(),
            }
        }
        v
    }

    /// Copies values back from a vector produced by [`Self::to_vector`]
    /// (extra entries such as "meta" are ignored).
    pub fn set_from_vector(&mut self, v: &ParamVector) -> Result<()> {
        for (name, p) in self.params_mut() {
            let src = v.get(&name).ok_or_else(|| {
                Error::Config(format!("checkpoint is missing parameter '{name}'"))
            })?;
            match p {
                ParamMut::M(m) => {
                    let dst = m.as_slice_mut().unwrap();
                    if dst.len() != src.len() {
                        return Err(Error::Config(format!(
                            "parameter '{name}' has {} values, expected {}",
                            src.len(),
                            dst.len()
                        )));
                    }
                    dst.copy_from_slice(src);
                }
                ParamMut::V(b) => {
                    let dst = b.as_slice_mut().unwrap();
                    if dst.len() != src.len() {
                        return Err(Error::Config(format!(
                            "parameter '{name}' has {} values, expected {}",
                            src.len(),
                            dst.len()
                        )));
                    }
                    dst.copy_from_slice(src);
                }
            }
        }
        Ok(())
    }

    pub fn n_params(&self) -> usize {
        self.to_vector().len()
    }

    fn meta(&self) -> [f64; 8] {
        let a = &self.arch;
        [
            META_VERSION,
            match a.variant {
                Variant::Naive => 0.0,
                Variant::Egnn => 1.0,
            },
            a.s as f64,
            a.d_h as f64,
            a.t as f64,
            a.k as f64,
            a.readout_hidden as f64,
            a.ed_count as f64,
        ]
    }

    fn arch_from_meta(meta: &[f64]) -> Result<ArchConfig> {
        if meta.len() != 8 {
            return Err(Error::Config(format!(
                "checkpoint meta has {} values, expected 8",
                meta.len()
            )));
        }
        if meta[0] != META_VERSION {
            return Err(Error::Config(format!(
                "unsupported checkpoint meta version {}",
                meta[0]
            )));
        }
        let as_count = |v: f64, what: &str| -> Result<usize> {
            if v.fract() != 0.0 || v < 0.0 || v > u32::MAX as f64 {
                return Err(Error::Config(format!("meta field {what} = {v} is not a count")));
            }
            Ok(v as usize)
        };
        let variant = match meta[1] {
            v if v == 0.0 => Variant::Naive,
            v if v == 1.0 => Variant::Egnn,
            v => {
                return Err(Error::Config(format!("unknown variant code {v} in meta")));
            }
        };
        let arch = ArchConfig {
            variant,
            s: as_count(meta[2], "S")?,
            d_h: as_count(meta[3], "D_h")?,
            t: as_count(meta[4], "T")?,
            k: as_count(meta[5], "K")?,
            readout_hidden: as_count(meta[6], "readout_hidden")?,
            ed_count: as_count(meta[7], "ed_count")?,
        };
        arch.validate()?;
        Ok(arch)
    }

    /// Writes a self-describing checkpoint: learnables plus a "meta" entry
    /// holding the architecture.
    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let mut v = self.to_vector();
        v.push(META_NAME, &self.meta())?;
        save_param_vector(&v, path)
    }

    /// Reads a checkpoint written by [`Self::save`].
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let v = load_param_vector(path)?;
        let meta = v
            .get(META_NAME)
            .ok_or_else(|| Error::Config("checkpoint has no 'meta' entry".into()))?;
        let arch = Self::arch_from_meta(meta)?;
        let mut params = Self::zeros(arch)?;
        params.set_from_vector(&v)?;
        Ok(params)
    }
}

/// A batch of same-size detection graphs flattened for vectorized
/// message passing. Edge order is graph-major, then destination-major with
/// ascending sources, which fixes the (serial) reduction order.
#[derive(Clone, Debug)]
pub struct GraphBatch {
    pub batch: usize,
    /// Nodes per graph.
    pub n: usize,
    /// Raw node features, (batch*n) x 3.
    pub feats: Array2<f64>,
    /// Edge attribute eps_ji per directed active edge j -> i.
    pub eps: Array1<f64>,
    /// Global source node index per edge.
    pub src: Vec<usize>,
    /// Global destination node index per edge.
    pub dst: Vec<usize>,
    /// Noise variance of the owning sample, per edge.
    pub edge_sigma2: Array1<f64>,
}

impl GraphBatch {
    pub fn from_graphs(graphs: &[DetectionGraph]) -> Result<GraphBatch> {
        if graphs.is_empty() {
            return Err(Error::InvalidArgument("empty graph batch".into()));
        }
        let n = graphs[0].n;
        let mut feats = Array2::zeros((graphs.len() * n, 3));
        let mut eps = Vec::new();
        let mut src = Vec::new();
        let mut dst = Vec::new();
        let mut edge_sigma2 = Vec::new();
        for (b, g) in graphs.iter().enumerate() {
            if g.n != n {
                return Err(Error::ShapeMismatch(format!(
                    "graph {b} has {} nodes, expected {n}",
                    g.n
                )));
            }
            let base = b * n;
            feats
                .slice_mut(s![base..base + n, ..])
                .assign(&g.raw_node_features);
            let sigma2 = g.sigma2();
            for i in 0..n {
                for j in 0..n {
                    if g.active_mask[[i, j]] {
                        src.push(base + j);
                        dst.push(base + i);
                        eps.push(g.edge_attr[[j, i]]);
                        edge_sigma2.push(sigma2);
                    }
                }
            }
        }
        Ok(GraphBatch {
            batch: graphs.len(),
            n,
            feats,
            eps: Array1::from_vec(eps),
            src,
            dst,
            edge_sigma2: Array1::from_vec(edge_sigma2),
        })
    }

    pub fn n_nodes_total(&self) -> usize {
        self.batch * self.n
    }

    pub fn n_edges(&self) -> usize {
        self.src.len()
    }
}

fn gather_rows(m: &Array2<f64>, idx: &[usize]) -> Array2<f64> {
    m.select(Axis(0), idx)
}

fn scatter_add_rows(target: &mut Array2<f64>, idx: &[usize], rows: &Array2<f64>) {
    for (e, &i) in idx.iter().enumerate() {
        let mut t = target.row_mut(i);
        t += &rows.row(e);
    }
}

/// Per-edge input of the naive message MLP: [z_dst; z_src; eps; sigma2].
fn naive_msg_input(batch: &GraphBatch, z: &Array2<f64>, s_dim: usize) -> Array2<f64> {
    let e = batch.n_edges();
    let mut x = Array2::zeros((e, 2 * s_dim + 2));
    for row in 0..e {
        x.slice_mut(s![row, 0..s_dim]).assign(&z.row(batch.dst[row]));
        x.slice_mut(s![row, s_dim..2 * s_dim])
            .assign(&z.row(batch.src[row]));
        x[[row, 2 * s_dim]] = batch.eps[row];
        x[[row, 2 * s_dim + 1]] = batch.edge_sigma2[row];
    }
    x
}

/// One egnn message stage given node states `z`: eps_ji * MLP2(z_j) per
/// edge. Public as a diagnostic (the per-edge messages are otherwise
/// internal to the forward pass).
pub fn egnn_edge_messages(
    batch: &GraphBatch,
    params: &EgnnParams,
    z: &Array2<f64>,
) -> Result<Array2<f64>> {
    if params.arch.variant != Variant::Egnn {
        return Err(Error::InvalidArgument(
            "edge-message inspection applies to the egnn variant".into(),
        ));
    }
    let zsrc = gather_rows(z, &batch.src);
    let mut m = params.msg.forward(&zsrc);
    for (e, mut row) in m.rows_mut().into_iter().enumerate() {
        row *= batch.eps[e];
    }
    Ok(m)
}

fn messages(batch: &GraphBatch, params: &EgnnParams, z: &Array2<f64>) -> Array2<f64> {
    match params.arch.variant {
        Variant::Egnn => {
            let zsrc = gather_rows(z, &batch.src);
            let mut m = params.msg.forward(&zsrc);
            for (e, mut row) in m.rows_mut().into_iter().enumerate() {
                row *= batch.eps[e];
            }
            m
        }
        Variant::Naive => params.msg.forward(&naive_msg_input(batch, z, params.arch.s)),
    }
}

/// GRU input at each step: the node's previous state next to its aggregated
/// incoming message, so updates condition on both.
fn gru_input(z: &Array2<f64>, agg: &Array2<f64>) -> Array2<f64> {
    let (rows, s_dim) = z.dim();
    let mut x = Array2::zeros((rows, 2 * s_dim));
    x.slice_mut(s![.., 0..s_dim]).assign(z);
    x.slice_mut(s![.., s_dim..2 * s_dim]).assign(agg);
    x
}

/// Inference over a flattened batch; returns (batch*n) x K posteriors.
pub fn gnn_forward_batch(batch: &GraphBatch, params: &EgnnParams) -> Result<Array2<f64>> {
    params.arch.validate()?;
    let nodes = batch.n_nodes_total();
    let mut z = params.mlp1.forward(&batch.feats);
    let mut g = Array2::zeros((nodes, params.arch.d_h));
    for _ in 0..params.arch.t {
        let msg = messages(batch, params, &z);
        let mut agg = Array2::zeros((nodes, params.arch.s));
        scatter_add_rows(&mut agg, &batch.dst, &msg);
        let (g_new, _) = params.gru.forward(&gru_input(&z, &agg), &g);
        g = g_new;
        z = params.post.forward(&g);
    }
    let logits = params.readout.forward(&z);
    Ok(softmax_rows(&logits))
}

struct StepCache {
    /// Concatenated [z_prev; aggregated message] fed to the GRU.
    gin: Array2<f64>,
    gru: GruCache,
    msg_cache: Vec<Array2<f64>>,
    post_cache: Vec<Array2<f64>>,
}

/// Mean cross-entropy of the batch and its exact gradient with respect to
/// every parameter, computed by reverse-mode accumulation through the
/// unrolled steps. `labels` holds the true symbol index per node in batch
/// order.
pub fn gnn_loss_and_grad(
    batch: &GraphBatch,
    params: &EgnnParams,
    labels: &[u8],
) -> Result<(f64, EgnnParams)> {
    let nodes = batch.n_nodes_total();
    if labels.len() != nodes {
        return Err(Error::ShapeMismatch(format!(
            "{} labels for {nodes} nodes",
            labels.len()
        )));
    }
    let arch = params.arch;

    // Forward, keeping per-step caches.
    let mlp1_cache = params.mlp1.forward_cached(&batch.feats);
    let mut g_list = vec![Array2::zeros((nodes, arch.d_h))];
    let mut z_prev = mlp1_cache.last().unwrap().clone();
    let mut steps: Vec<StepCache> = Vec::with_capacity(arch.t);
    for _ in 0..arch.t {
        let msg_input = match arch.variant {
            Variant::Egnn => gather_rows(&z_prev, &batch.src),
            Variant::Naive => naive_msg_input(batch, &z_prev, arch.s),
        };
        let msg_cache = params.msg.forward_cached(&msg_input);
        let mut agg = Array2::zeros((nodes, arch.s));
        match arch.variant {
            Variant::Egnn => {
                let mlp_out = msg_cache.last().unwrap();
                let mut msg = mlp_out.clone();
                for (e, mut row) in msg.rows_mut().into_iter().enumerate() {
                    row *= batch.eps[e];
                }
                scatter_add_rows(&mut agg, &batch.dst, &msg);
            }
            Variant::Naive => {
                scatter_add_rows(&mut agg, &batch.dst, msg_cache.last().unwrap());
            }
        }
        let gin = gru_input(&z_prev, &agg);
        let (g_new, gru_cache) = params.gru.forward(&gin, g_list.last().unwrap());
        let post_cache = params.post.forward_cached(&g_new);
        z_prev = post_cache.last().unwrap().clone();
        g_list.push(g_new);
        steps.push(StepCache {
            gin,
            gru: gru_cache,
            msg_cache,
            post_cache,
        });
    }
    let readout_cache = params.readout.forward_cached(&z_prev);
    let probs = softmax_rows(readout_cache.last().unwrap());
    let loss = cross_entropy(&probs, labels);

    // Backward.
    let mut grads = EgnnParams::zeros(arch)?;
    let dlogits = softmax_ce_grad(&probs, labels);
    let (mut dz, readout_grads) = params.readout.backward(&readout_cache, &dlogits);
    add_mlp_grads(&mut grads.readout, readout_grads);

    let mut dg_next: Option<Array2<f64>> = None;
    for t in (0..arch.t).rev() {
        let step = &steps[t];
        let (dg_from_z, post_grads) = params.post.backward(&step.post_cache, &dz);
        add_mlp_grads(&mut grads.post, post_grads);
        let dg_t = match dg_next.take() {
            Some(d) => dg_from_z + d,
            None => dg_from_z,
        };
        let (dgin, dg_prev) =
            params
                .gru
                .backward(&step.gin, &g_list[t], &step.gru, &dg_t, &mut grads.gru);
        dg_next = Some(dg_prev);

        // z_prev reaches the loss both directly (first half of the GRU
        // input) and through every outgoing message; split and accumulate.
        let s_dim = arch.s;
        let dz_direct = dgin.slice(s![.., 0..s_dim]).to_owned();
        let dagg = dgin.slice(s![.., s_dim..2 * s_dim]).to_owned();

        let dmsg = gather_rows(&dagg, &batch.dst);
        let mut dz_prev = Array2::zeros((nodes, arch.s));
        match arch.variant {
            Variant::Egnn => {
                let mut dmlp_out = dmsg;
                for (e, mut row) in dmlp_out.rows_mut().into_iter().enumerate() {
                    row *= batch.eps[e];
                }
                let (dzsrc, msg_grads) = params.msg.backward(&step.msg_cache, &dmlp_out);
                add_mlp_grads(&mut grads.msg, msg_grads);
                scatter_add_rows(&mut dz_prev, &batch.src, &dzsrc);
            }
            Variant::Naive => {
                let (dinput, msg_grads) = params.msg.backward(&step.msg_cache, &dmsg);
                add_mlp_grads(&mut grads.msg, msg_grads);
                scatter_add_rows(
                    &mut dz_prev,
                    &batch.dst,
                    &dinput.slice(s![.., 0..s_dim]).to_owned(),
                );
                scatter_add_rows(
                    &mut dz_prev,
                    &batch.src,
                    &dinput.slice(s![.., s_dim..2 * s_dim]).to_owned(),
                );
            }
        }
        dz = dz_prev + dz_direct;
    }
    let (_, mlp1_grads) = params.mlp1.backward(&mlp1_cache, &dz);
    add_mlp_grads(&mut grads.mlp1, mlp1_grads);

    Ok((loss, grads))
}

fn add_mlp_grads(target: &mut Mlp, grads: Vec<(Array2<f64>, Array1<f64>)>) {
    for (layer, (dw, db)) in target.layers.iter_mut().zip(grads) {
        layer.w += &dw;
        layer.b += &db;
    }
}

/// Runs one graph through the detector. Edge drop is the caller's choice:
/// pass a graph already sparsified with `edge_drop` if wanted.
pub fn gnn_forward(graph: &DetectionGraph, params: &EgnnParams) -> Result<DetectorOutput> {
    let start = Instant::now();
    let batch = GraphBatch::from_graphs(std::slice::from_ref(graph))?;
    let posteriors = gnn_forward_batch(&batch, params)?;
    let hard_labels = hard_decision(&posteriors);
    Ok(DetectorOutput {
        posteriors,
        hard_labels,
        meta: DetectorMeta {
            name: params.arch.variant.name().into(),
            iterations: params.arch.t,
            wall_s: start.elapsed().as_secs_f64(),
            final_delta: None,
            converged: None,
        },
    })
}
