//! Loopy sum-product belief propagation on the pairwise MRF, in the log
//! domain with a flooding schedule and log-space damping.

use std::time::Instant;

use ndarray::{Array2, Array3};

use crate::detectors::{hard_decision, DetectorMeta, DetectorOutput};
use crate::error::{Error, Result};
use crate::graph::{DetectionGraph, MrfPotentials};

#[derive(Clone, Copy, Debug)]
pub struct BpOptions {
    pub iters: usize,
    /// Weight of the previous message in the log-space convex combination.
    pub damping: f64,
    /// Max-abs log-message change below which the run counts as converged.
    pub tol: f64,
}

impl Default for BpOptions {
    fn default() -> Self {
        BpOptions {
            iters: 20,
            damping: 0.3,
            tol: 1e-6,
        }
    }
}

fn log_sum_exp(vals: &[f64]) -> f64 {
    let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + vals.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Sum-product BP over the active edges of `graph`.
///
/// Messages are normalized log distributions, initialized uniform. One
/// iteration updates every directed active edge from the previous
/// iteration's messages (flooding), then applies damped log-space mixing:
/// m = (1-damping) * m_new + damping * m_old.
pub fn bp_detect(
    potentials: &MrfPotentials,
    graph: &DetectionGraph,
    opts: BpOptions,
) -> Result<DetectorOutput> {
    let start = Instant::now();
    let n = graph.n;
    let k = potentials.k;
    if potentials.log_phi_i.nrows() != n {
        return Err(Error::ShapeMismatch(format!(
            "potentials cover {} nodes but the graph has {n}",
            potentials.log_phi_i.nrows()
        )));
    }
    if opts.iters < 1 {
        return Err(Error::InvalidArgument("iters must be >= 1".into()));
    }
    if !(0.0..1.0).contains(&opts.damping) {
        return Err(Error::InvalidArgument(format!(
            "damping must be in [0, 1), got {}",
            opts.damping
        )));
    }

    let uniform = -(k as f64).ln();
    // msgs[j][i][s] = log m_{j->i}(s_i = symbol s).
    let mut msgs = Array3::from_elem((n, n, k), uniform);
    let mut final_delta = f64::INFINITY;
    let mut iterations = 0;

    let mut scratch = vec![0.0; k];
    for _ in 0..opts.iters {
        iterations += 1;
        // tot[j][s] = log phi_j(s) + sum over active incoming messages.
        let mut tot = potentials.log_phi_i.clone();
        for j in 0..n {
            for kk in 0..n {
                if graph.active_mask[[j, kk]] {
                    for s in 0..k {
                        tot[[j, s]] += msgs[[kk, j, s]];
                    }
                }
            }
        }

        let mut new_msgs = msgs.clone();
        let mut delta = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                if !graph.active_mask[[j, i]] {
                    continue;
                }
                for si in 0..k {
                    for (sj, slot) in scratch.iter_mut().enumerate() {
                        *slot = tot[[j, sj]] - msgs[[i, j, sj]]
                            + potentials.log_phi_ij[[j, i, sj, si]];
                    }
                    new_msgs[[j, i, si]] = log_sum_exp(&scratch);
                }
                // Normalize, damp in log space, renormalize.
                let lse = log_sum_exp(
                    new_msgs
                        .slice(ndarray::s![j, i, ..])
                        .as_slice()
                        .unwrap(),
                );
                for s in 0..k {
                    new_msgs[[j, i, s]] -= lse;
                }
                for s in 0..k {
                    new_msgs[[j, i, s]] = (1.0 - opts.damping) * new_msgs[[j, i, s]]
                        + opts.damping * msgs[[j, i, s]];
                }
                let lse2 = log_sum_exp(
                    new_msgs
                        .slice(ndarray::s![j, i, ..])
                        .as_slice()
                        .unwrap(),
                );
                for s in 0..k {
                    new_msgs[[j, i, s]] -= lse2;
                    delta = delta.max((new_msgs[[j, i, s]] - msgs[[j, i, s]]).abs());
                }
            }
        }
        msgs = new_msgs;
        final_delta = delta;
        if delta < opts.tol {
            break;
        }
    }

    // Beliefs: log phi_i + all active incoming messages, softmax-normalized.
    let mut posteriors = Array2::zeros((n, k));
    for i in 0..n {
        let mut logb: Vec<f64> = (0..k).map(|s| potentials.log_phi_i[[i, s]]).collect();
        for j in 0..n {
            if graph.active_mask[[i, j]] {
                for (s, slot) in logb.iter_mut().enumerate() {
                    *slot += msgs[[j, i, s]];
                }
            }
        }
        let lse = log_sum_exp(&logb);
        for s in 0..k {
            posteriors[[i, s]] = (logb[s] - lse).exp();
        }
    }

    let hard_labels = hard_decision(&posteriors);
    Ok(DetectorOutput {
        posteriors,
        hard_labels,
        meta: DetectorMeta {
            name: "bp".into(),
            iterations,
            wall_s: start.elapsed().as_secs_f64(),
            final_delta: Some(final_delta),
            converged: Some(final_delta < opts.tol),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detectors::map_detect_bruteforce;
    use crate::graph::{build_graph, build_potentials, Variant};
    use crate::mimo::{build_alphabet, sample_channel, ChannelSample, Scheme};
    use crate::rng::{substream, Stream};
    use ndarray::arr1;

    #[test]
    fn two_node_beliefs_match_exact_marginals() {
        // BP is exact on trees; a 2-node graph is a tree.
        let alphabet = build_alphabet(Scheme::Qpsk);
        let mut rng = substream(3, Stream::Channel, 0);
        for trial in 0..10u64 {
            let h = sample_channel(1, 2, &mut rng);
            let y = arr1(&[0.2 + trial as f64 * 0.1, -0.4, 0.15, -0.05]);
            let sigma2 = 0.25;
            let graph = build_graph(&h, &y, sigma2, Variant::Egnn).unwrap();
            let pots = build_potentials(&h, &y, sigma2, &alphabet).unwrap();
            let bp = bp_detect(
                &pots,
                &graph,
                BpOptions {
                    iters: 10,
                    damping: 0.0,
                    tol: 1e-12,
                },
            )
            .unwrap();
            let sample = ChannelSample {
                h,
                labels: vec![0, 0],
                y,
                sigma2,
            };
            let map = map_detect_bruteforce(&sample, &alphabet).unwrap();
            for (a, b) in bp.posteriors.iter().zip(map.posteriors.iter()) {
                assert!((a - b).abs() < 1e-8, "trial {trial}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn orthogonal_channel_beliefs_are_normalized_unaries() {
        // All pair potentials are 1, so beliefs equal normalized phi_i
        // after a single iteration.
        let alphabet = build_alphabet(Scheme::Qam16);
        let h = ndarray::arr2(&[[1.0, 0.0], [0.0, 1.0], [0.0, 0.0], [0.0, 0.0]]);
        let y = arr1(&[0.25, -0.7, 0.0, 0.0]);
        let sigma2 = 0.4;
        let graph = build_graph(&h, &y, sigma2, Variant::Egnn).unwrap();
        let pots = build_potentials(&h, &y, sigma2, &alphabet).unwrap();
        let bp = bp_detect(
            &pots,
            &graph,
            BpOptions {
                iters: 1,
                damping: 0.0,
                tol: 0.0,
            },
        )
        .unwrap();
        for i in 0..2 {
            let row: Vec<f64> = (0..4).map(|s| pots.log_phi_i[[i, s]]).collect();
            let lse = log_sum_exp(&row);
            for s in 0..4 {
                let expect = (row[s] - lse).exp();
                assert!((bp.posteriors[[i, s]] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tree_messages_are_stable_after_convergence() {
        // Undamped flooding on a tree converges within its diameter; extra
        // iterations must not change the beliefs.
        let alphabet = build_alphabet(Scheme::Qpsk);
        let mut rng = substream(9, Stream::Channel, 2);
        let h = sample_channel(1, 3, &mut rng);
        let y = arr1(&[0.5, -0.2, 0.8, 0.0, 0.3, -0.6]);
        let sigma2 = 0.3;
        let graph = build_graph(&h, &y, sigma2, Variant::Egnn).unwrap();
        let pots = build_potentials(&h, &y, sigma2, &alphabet).unwrap();
        let one = bp_detect(
            &pots,
            &graph,
            BpOptions {
                iters: 2,
                damping: 0.0,
                tol: 0.0,
            },
        )
        .unwrap();
        let two = bp_detect(
            &pots,
            &graph,
            BpOptions {
                iters: 7,
                damping: 0.0,
                tol: 0.0,
            },
        )
        .unwrap();
        for (a, b) in one.posteriors.iter().zip(two.posteriors.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        // At the fixed point the recomputed messages are bitwise identical.
        assert_eq!(two.meta.final_delta, Some(0.0));
        let tolerant = bp_detect(
            &pots,
            &graph,
            BpOptions {
                iters: 7,
                damping: 0.0,
                tol: 1e-9,
            },
        )
        .unwrap();
        assert_eq!(tolerant.meta.converged, Some(true));
        assert!(tolerant.meta.iterations < 7);
    }

    #[test]
    fn options_are_validated() {
        let alphabet = build_alphabet(Scheme::Qpsk);
        let h = ndarray::Array2::eye(2);
        let y = arr1(&[0.1, 0.2]);
        let graph = build_graph(&h, &y, 0.5, Variant::Egnn).unwrap();
        let pots = build_potentials(&h, &y, 0.5, &alphabet).unwrap();
        assert!(bp_detect(
            &pots,
            &graph,
            BpOptions {
                iters: 0,
                damping: 0.0,
                tol: 0.0
            }
        )
        .is_err());
        assert!(bp_detect(
            &pots,
            &graph,
            BpOptions {
                iters: 1,
                damping: 1.0,
                tol: 0.0
            }
        )
        .is_err());
    }

    #[test]
    fn damped_run_reaches_the_same_fixed_point_on_trees() {
        let alphabet = build_alphabet(Scheme::Qpsk);
        let mut rng = substream(14, Stream::Channel, 5);
        let h = sample_channel(1, 2, &mut rng);
        let y = arr1(&[0.9, 0.1, -0.3, 0.4]);
        let sigma2 = 0.5;
        let graph = build_graph(&h, &y, sigma2, Variant::Egnn).unwrap();
        let pots = build_potentials(&h, &y, sigma2, &alphabet).unwrap();
        let plain = bp_detect(
            &pots,
            &graph,
            BpOptions {
                iters: 10,
                damping: 0.0,
                tol: 1e-12,
            },
        )
        .unwrap();
        let damped = bp_detect(
            &pots,
            &graph,
            BpOptions {
                iters: 80,
                damping: 0.3,
                tol: 1e-13,
            },
        )
        .unwrap();
        for (a, b) in plain.posteriors.iter().zip(damped.posteriors.iter()) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}
