//! The detection graph: a fully connected 2Nt-node Markov random field over
//! the real symbol components, with raw node features, scalar edge
//! attributes, pairwise potentials, and the edge-drop sparsifier.

use ndarray::{Array2, Array4};

use crate::error::{Error, Result};
use crate::mimo::Alphabet;

/// Message-function variant. The variants differ in the message MLP's input
/// and in the sign convention of the stored edge attribute:
/// `Egnn` stores eps_ji = -h_j'h_i, `Naive` stores +h_j'h_i.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Naive,
    Egnn,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Naive => "naive",
            Variant::Egnn => "egnn",
        }
    }

    pub fn parse(s: &str) -> Result<Variant> {
        match s.to_ascii_lowercase().as_str() {
            "naive" => Ok(Variant::Naive),
            "egnn" => Ok(Variant::Egnn),
            other => Err(Error::InvalidArgument(format!(
                "unknown variant '{other}' (expected naive or egnn)"
            ))),
        }
    }
}

/// Fully connected detection graph for one channel sample.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectionGraph {
    /// Node count, 2Nt.
    pub n: usize,
    /// Per node i: [y'h_i, -h_i'h_i, sigma2], shape n x 3.
    pub raw_node_features: Array2<f64>,
    /// Symmetric edge attributes with zero diagonal; entry [j][i] weights
    /// the message j -> i.
    pub edge_attr: Array2<f64>,
    /// Symmetric adjacency; diagonal is false. Edge drop clears entries.
    pub active_mask: Array2<bool>,
}

impl DetectionGraph {
    /// Noise variance the graph was built with (third raw feature).
    pub fn sigma2(&self) -> f64 {
        self.raw_node_features[[0, 2]]
    }

    /// Number of active directed edges.
    pub fn active_edge_count(&self) -> usize {
        self.active_mask.iter().filter(|&&b| b).count()
    }
}

/// Builds the dense detection graph from (H, y, sigma2).
///
/// Node features are [y'h_i, -h_i'h_i, sigma2]. Edge attributes are
/// -h_j'h_i for `Egnn` and +h_j'h_i for `Naive`; the diagonal is zero and
/// every off-diagonal edge starts active.
pub fn build_graph(
    h: &ndarray::Array2<f64>,
    y: &ndarray::Array1<f64>,
    sigma2: f64,
    variant: Variant,
) -> Result<DetectionGraph> {
    if h.nrows() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "H is {}x{} but y has length {}",
            h.nrows(),
            h.ncols(),
            y.len()
        )));
    }
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(Error::Domain(format!("sigma2 must be > 0, got {sigma2}")));
    }
    let n = h.ncols();
    let gram = h.t().dot(h);
    let yh = h.t().dot(y);

    let mut feats = Array2::zeros((n, 3));
    for i in 0..n {
        feats[[i, 0]] = yh[i];
        feats[[i, 1]] = -gram[[i, i]];
        feats[[i, 2]] = sigma2;
    }

    let sign = match variant {
        Variant::Egnn => -1.0,
        Variant::Naive => 1.0,
    };
    let mut edge_attr = Array2::zeros((n, n));
    let mut active = Array2::from_elem((n, n), false);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                edge_attr[[i, j]] = sign * gram[[i, j]];
                active[[i, j]] = true;
            }
        }
    }

    Ok(DetectionGraph {
        n,
        raw_node_features: feats,
        edge_attr,
        active_mask: active,
    })
}

/// Deactivates the `k` directed edges (k/2 symmetric pairs) with smallest
/// |edge_attr|; ties break by ascending (min(i,j), max(i,j)). The input is
/// not mutated; `k` must be even and at most n(n-1).
pub fn edge_drop(graph: &DetectionGraph, k: usize) -> Result<DetectionGraph> {
    let n = graph.n;
    if k % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "edge drop count must be even (pairs drop symmetrically), got {k}"
        )));
    }
    if k > n * (n - 1) {
        return Err(Error::InvalidArgument(format!(
            "edge drop count {k} exceeds the {} directed edges of a {n}-node graph",
            n * (n - 1)
        )));
    }
    let mut out = graph.clone();
    if k == 0 {
        return Ok(out);
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((graph.edge_attr[[i, j]].abs(), i, j));
        }
    }
    pairs.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    for &(_, i, j) in pairs.iter().take(k / 2) {
        out.active_mask[[i, j]] = false;
        out.active_mask[[j, i]] = false;
    }
    Ok(out)
}

/// Ascending list of active neighbors of node `i`.
pub fn active_neighbors(graph: &DetectionGraph, i: usize) -> Result<Vec<usize>> {
    if i >= graph.n {
        return Err(Error::InvalidArgument(format!(
            "node index {i} out of range [0, {})",
            graph.n
        )));
    }
    Ok((0..graph.n).filter(|&j| graph.active_mask[[i, j]]).collect())
}

/// Log-domain potentials of the pairwise MRF over alphabet symbols.
#[derive(Clone, Debug)]
pub struct MrfPotentials {
    /// log phi_i(s), shape n x K.
    pub log_phi_i: Array2<f64>,
    /// log phi_ij(s_a at i, s_b at j), shape n x n x K x K; diagonal blocks
    /// are zero.
    pub log_phi_ij: Array4<f64>,
    pub k: usize,
}

/// Builds the MRF potentials:
/// log phi_i(s)      = -(1/(2 sigma2)) * (h_i'h_i s^2 - 2 y'h_i s)
/// log phi_ij(sa,sb) = -(1/sigma2) * h_i'h_j * sa * sb
/// The uniform prior is a constant and is absorbed into normalization.
pub fn build_potentials(
    h: &ndarray::Array2<f64>,
    y: &ndarray::Array1<f64>,
    sigma2: f64,
    alphabet: &Alphabet,
) -> Result<MrfPotentials> {
    if h.nrows() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "H is {}x{} but y has length {}",
            h.nrows(),
            h.ncols(),
            y.len()
        )));
    }
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(Error::Domain(format!("sigma2 must be > 0, got {sigma2}")));
    }
    let n = h.ncols();
    let k = alphabet.k;
    let gram = h.t().dot(h);
    let yh = h.t().dot(y);

    let mut log_phi_i = Array2::zeros((n, k));
    for i in 0..n {
        for (a, &s) in alphabet.symbols.iter().enumerate() {
            log_phi_i[[i, a]] = -(gram[[i, i]] * s * s - 2.0 * yh[i] * s) / (2.0 * sigma2);
        }
    }
    let mut log_phi_ij = Array4::zeros((n, n, k, k));
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for (a, &sa) in alphabet.symbols.iter().enumerate() {
                for (b, &sb) in alphabet.symbols.iter().enumerate() {
                    log_phi_ij[[i, j, a, b]] = -gram[[i, j]] * sa * sb / sigma2;
                }
            }
        }
    }
    Ok(MrfPotentials {
        log_phi_i,
        log_phi_ij,
        k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mimo::{build_alphabet, Scheme};
    use ndarray::{arr1, arr2};

    fn worked_graph(variant: Variant) -> DetectionGraph {
        // H = [[1,1],[0,1]], y = [1,0]: y'h_0 = 1, y'h_1 = 1,
        // h_0'h_0 = 1, h_1'h_1 = 2, h_0'h_1 = 1.
        let h = arr2(&[[1.0, 1.0], [0.0, 1.0]]);
        let y = arr1(&[1.0, 0.0]);
        build_graph(&h, &y, 0.1, variant).unwrap()
    }

    #[test]
    fn worked_example_features_and_edges() {
        let g = worked_graph(Variant::Egnn);
        assert_eq!(g.n, 2);
        assert_eq!(g.raw_node_features.row(0).to_vec(), vec![1.0, -1.0, 0.1]);
        assert_eq!(g.raw_node_features.row(1).to_vec(), vec![1.0, -2.0, 0.1]);
        assert_eq!(g.edge_attr[[0, 1]], -1.0);
        assert_eq!(g.edge_attr[[1, 0]], -1.0);
        assert_eq!(g.edge_attr[[0, 0]], 0.0);
        assert!(g.active_mask[[0, 1]] && g.active_mask[[1, 0]]);
        assert!(!g.active_mask[[0, 0]] && !g.active_mask[[1, 1]]);

        let gn = worked_graph(Variant::Naive);
        assert_eq!(gn.edge_attr[[0, 1]], 1.0);
    }

    #[test]
    fn orthonormal_columns_zero_all_edges() {
        let h = arr2(&[[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]);
        let y = arr1(&[1.0, 0.0, 0.0]); // y = h_0
        let g = build_graph(&h, &y, 0.25, Variant::Egnn).unwrap();
        assert_eq!(g.raw_node_features.row(0).to_vec(), vec![1.0, -1.0, 0.25]);
        assert_eq!(g.edge_attr[[0, 1]], 0.0);
        assert_eq!(g.edge_attr[[1, 0]], 0.0);
    }

    #[test]
    fn edge_attr_is_symmetric_on_random_channels() {
        use crate::mimo::sample_channel;
        use crate::rng::{substream, Stream};
        let mut rng = substream(13, Stream::Channel, 0);
        for _ in 0..10 {
            let h = sample_channel(3, 4, &mut rng);
            let y = arr1(&[0.1; 8]);
            let g = build_graph(&h, &y, 0.5, Variant::Egnn).unwrap();
            for i in 0..g.n {
                for j in 0..g.n {
                    assert_eq!(g.edge_attr[[i, j]], g.edge_attr[[j, i]]);
                }
            }
        }
    }

    #[test]
    fn build_graph_rejects_bad_inputs() {
        let h = arr2(&[[1.0, 0.0], [0.0, 1.0]]);
        let y = arr1(&[1.0, 0.0, 0.0]);
        assert!(matches!(
            build_graph(&h, &y, 0.1, Variant::Egnn),
            Err(Error::ShapeMismatch(_))
        ));
        let y2 = arr1(&[1.0, 0.0]);
        assert!(matches!(
            build_graph(&h, &y2, 0.0, Variant::Egnn),
            Err(Error::Domain(_))
        ));
    }

    fn graph_with_weights(n: usize, pair_w: &[((usize, usize), f64)]) -> DetectionGraph {
        let mut edge_attr = Array2::zeros((n, n));
        let mut active = Array2::from_elem((n, n), false);
        for i in 0..n {
            for j in 0..n {
                active[[i, j]] = i != j;
            }
        }
        for &((i, j), w) in pair_w {
            edge_attr[[i, j]] = w;
            edge_attr[[j, i]] = w;
        }
        DetectionGraph {
            n,
            raw_node_features: Array2::zeros((n, 3)),
            edge_attr,
            active_mask: active,
        }
    }

    #[test]
    fn edge_drop_zero_is_identity() {
        let g = worked_graph(Variant::Egnn);
        let g2 = edge_drop(&g, 0).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn edge_drop_smallest_pair_goes_first() {
        let g = graph_with_weights(
            3,
            &[((0, 1), 0.9), ((0, 2), -0.5), ((1, 2), 0.1)],
        );
        let d = edge_drop(&g, 2).unwrap();
        assert!(!d.active_mask[[1, 2]] && !d.active_mask[[2, 1]]);
        assert!(d.active_mask[[0, 1]] && d.active_mask[[0, 2]]);
        // Input untouched.
        assert!(g.active_mask[[1, 2]]);
    }

    #[test]
    fn edge_drop_matches_figure_example() {
        // 4 nodes (0-based); the pairs (1,2) and (1,3) have the two smallest
        // magnitudes, so k=4 removes exactly the edges 1<->2 and 1<->3.
        let g = graph_with_weights(
            4,
            &[
                ((0, 1), 0.8),
                ((0, 2), 0.7),
                ((0, 3), 0.9),
                ((1, 2), 0.05),
                ((1, 3), 0.10),
                ((2, 3), 0.6),
            ],
        );
        let d = edge_drop(&g, 4).unwrap();
        assert!(!d.active_mask[[1, 2]]);
        assert!(!d.active_mask[[1, 3]]);
        assert_eq!(active_neighbors(&d, 1).unwrap(), vec![0]);
        assert_eq!(active_neighbors(&d, 0).unwrap(), vec![1, 2, 3]);
        assert_eq!(d.active_edge_count(), g.active_edge_count() - 4);
    }

    #[test]
    fn edge_drop_breaks_ties_by_index() {
        let g = graph_with_weights(
            3,
            &[((0, 1), 0.5), ((0, 2), 0.5), ((1, 2), 0.5)],
        );
        let d = edge_drop(&g, 2).unwrap();
        assert!(!d.active_mask[[0, 1]]);
        assert!(d.active_mask[[0, 2]] && d.active_mask[[1, 2]]);
    }

    #[test]
    fn edge_drop_validates_k() {
        let g = worked_graph(Variant::Egnn);
        assert!(matches!(edge_drop(&g, 1), Err(Error::InvalidArgument(_))));
        assert!(matches!(edge_drop(&g, 4), Err(Error::InvalidArgument(_))));
        assert!(edge_drop(&g, 2).is_ok());
    }

    #[test]
    fn active_neighbors_checks_range() {
        let g = worked_graph(Variant::Egnn);
        assert_eq!(active_neighbors(&g, 0).unwrap(), vec![1]);
        assert!(active_neighbors(&g, 2).is_err());
        let all_dropped = edge_drop(&g, 2).unwrap();
        assert_eq!(active_neighbors(&all_dropped, 0).unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn potentials_match_formulas() {
        let h = arr2(&[[1.0, 1.0], [0.0, 1.0]]);
        let y = arr1(&[1.0, 0.0]);
        let sigma2 = 0.1;
        let alphabet = build_alphabet(Scheme::Qpsk);
        let p = build_potentials(&h, &y, sigma2, &alphabet).unwrap();
        let s = alphabet.symbols[1];
        // Node 0: h_0'h_0 = 1, y'h_0 = 1.
        let expect = -(1.0 * s * s - 2.0 * 1.0 * s) / (2.0 * sigma2);
        assert!((p.log_phi_i[[0, 1]] - expect).abs() < 1e-12);
        // Pair (0,1): h_0'h_1 = 1.
        let expect_ij = -(1.0 * s * s) / sigma2;
        assert!((p.log_phi_ij[[0, 1, 1, 1]] - expect_ij).abs() < 1e-12);
        assert!((p.log_phi_ij[[0, 1, 0, 1]] + expect_ij).abs() < 1e-12);
        assert!(p.log_phi_i.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn orthogonal_columns_make_unit_pair_potentials() {
        let h = arr2(&[[2.0, 0.0], [0.0, 3.0]]);
        let y = arr1(&[1.0, 1.0]);
        let alphabet = build_alphabet(Scheme::Qam16);
        let p = build_potentials(&h, &y, 0.3, &alphabet).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(p.log_phi_ij[[0, 1, a, b]], 0.0);
            }
        }
    }

    #[test]
    fn doubling_sigma2_halves_log_potentials() {
        let h = arr2(&[[1.0, 1.0], [0.0, 1.0]]);
        let y = arr1(&[1.0, 0.0]);
        let alphabet = build_alphabet(Scheme::Qpsk);
        let p1 = build_potentials(&h, &y, 0.2, &alphabet).unwrap();
        let p2 = build_potentials(&h, &y, 0.4, &alphabet).unwrap();
        for (a, b) in p1.log_phi_i.iter().zip(p2.log_phi_i.iter()) {
            assert!((a - 2.0 * b).abs() < 1e-12);
        }
        for (a, b) in p1.log_phi_ij.iter().zip(p2.log_phi_ij.iter()) {
            assert!((a - 2.0 * b).abs() < 1e-12);
        }
    }

    #[test]
    fn potentials_agree_with_egnn_edge_attr() {
        // Sign bookkeeping across modules: for the egnn variant,
        // log phi_ij(sa, sb) = eps_ij * sa * sb / sigma2.
        use crate::mimo::sample_channel;
        use crate::rng::{substream, Stream};
        let mut rng = substream(4, Stream::Channel, 1);
        let h = sample_channel(2, 3, &mut rng);
        let y = arr1(&[0.3; 6]);
        let sigma2 = 0.7;
        let alphabet = build_alphabet(Scheme::Qpsk);
        let g = build_graph(&h, &y, sigma2, Variant::Egnn).unwrap();
        let p = build_potentials(&h, &y, sigma2, &alphabet).unwrap();
        for i in 0..g.n {
            for j in 0..g.n {
                if i == j {
                    continue;
                }
                for (a, &sa) in alphabet.symbols.iter().enumerate() {
                    for (b, &sb) in alphabet.symbols.iter().enumerate() {
                        let expect = g.edge_attr[[i, j]] * sa * sb / sigma2;
                        assert!((p.log_phi_ij[[i, j, a, b]] - expect).abs() < 1e-12);
                    }
                }
            }
        }
    }
}
