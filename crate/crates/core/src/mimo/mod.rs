//! Real-valued MIMO system model: modulation alphabets, Rayleigh channels,
//! symbol vectors under the unit power constraint, AWGN, and datasets.
//!
//! The complex Nt-in/Nr-out link is handled in its real equivalent form
//! throughout: H is 2Nr x 2Nt, x and the labels have length 2Nt, y has
//! length 2Nr, and sigma2 is the noise variance per real dimension.

mod io;

pub use io::{load_dataset, save_dataset};

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::rng::{substream, Stream};

/// Modulation scheme of the underlying complex constellation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Qpsk,
    Qam16,
}

impl Scheme {
    /// Real alphabet size: the square root of the modulation order.
    pub fn k(self) -> usize {
        match self {
            Scheme::Qpsk => 2,
            Scheme::Qam16 => 4,
        }
    }

    /// Stable numeric code used in the dataset file header.
    pub fn code(self) -> u32 {
        match self {
            Scheme::Qpsk => 0,
            Scheme::Qam16 => 1,
        }
    }

    pub fn from_code(code: u32) -> Option<Scheme> {
        match code {
            0 => Some(Scheme::Qpsk),
            1 => Some(Scheme::Qam16),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Qpsk => "qpsk",
            Scheme::Qam16 => "qam16",
        }
    }

    pub fn parse(s: &str) -> Result<Scheme> {
        match s.to_ascii_lowercase().as_str() {
            "qpsk" => Ok(Scheme::Qpsk),
            "qam16" | "16qam" => Ok(Scheme::Qam16),
            other => Err(Error::InvalidArgument(format!(
                "unknown scheme '{other}' (expected qpsk or qam16)"
            ))),
        }
    }
}

/// Per-dimension real alphabet, sorted ascending, normalized so that a
/// uniform draw has mean square 1/2 (a full 2Nt-vector then has E{x'x}=Nt).
#[derive(Clone, Debug, PartialEq)]
pub struct Alphabet {
    pub scheme: Scheme,
    pub symbols: Vec<f64>,
    pub k: usize,
}

/// Builds the normalized real alphabet for a scheme.
///
/// QPSK: {-1/sqrt(2), +1/sqrt(2)}. 16-QAM: {-3,-1,+1,+3}/sqrt(10).
pub fn build_alphabet(scheme: Scheme) -> Alphabet {
    let symbols = match scheme {
        Scheme::Qpsk => {
            let a = 1.0 / 2f64.sqrt();
            vec![-a, a]
        }
        Scheme::Qam16 => {
            let a = 1.0 / 10f64.sqrt();
            vec![-3.0 * a, -a, a, 3.0 * a]
        }
    };
    Alphabet {
        scheme,
        k: symbols.len(),
        symbols,
    }
}

impl Alphabet {
    /// Index of the symbol nearest to `v`; ties go to the lower index.
    pub fn nearest(&self, v: f64) -> u8 {
        let mut best = 0usize;
        let mut best_d = (v - self.symbols[0]).abs();
        for (i, s) in self.symbols.iter().enumerate().skip(1) {
            let d = (v - s).abs();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best as u8
    }
}

/// Generation-time configuration for a dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct MimoConfig {
    pub nt: usize,
    pub nr: usize,
    pub scheme: Scheme,
    /// Closed SNR interval in dB; each sample draws its SNR uniformly here.
    pub snr_db_range: (f64, f64),
    pub seed: u64,
    /// When set, H is drawn as an augmented complex matrix instead of the
    /// default raw-real i.i.d. draw. See `sample_channel_complex_structured`.
    pub complex_structured: bool,
}

impl MimoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nt < 1 {
            return Err(Error::InvalidArgument("Nt must be >= 1".into()));
        }
        if self.nr < self.nt {
            return Err(Error::InvalidArgument(format!(
                "Nr ({}) must be >= Nt ({})",
                self.nr, self.nt
            )));
        }
        let (lo, hi) = self.snr_db_range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidArgument(format!(
                "SNR range [{lo}, {hi}] dB is empty or non-finite"
            )));
        }
        Ok(())
    }
}

/// One detection instance of y = Hx + n.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSample {
    /// Real channel matrix, 2Nr x 2Nt.
    pub h: Array2<f64>,
    /// Transmitted symbol indices in [0, K), length 2Nt.
    pub labels: Vec<u8>,
    /// Received vector, length 2Nr.
    pub y: Array1<f64>,
    /// Noise variance per real dimension.
    pub sigma2: f64,
}

impl ChannelSample {
    pub fn n_nodes(&self) -> usize {
        self.h.ncols()
    }
}

/// A set of detection instances sharing one system configuration.
///
/// Only the fields below are persisted by the file format; the generating
/// SNR range and the split name live in generation config and file names.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub nt: usize,
    pub nr: usize,
    pub scheme: Scheme,
    pub seed: u64,
    pub samples: Vec<ChannelSample>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn alphabet(&self) -> Alphabet {
        build_alphabet(self.scheme)
    }

    /// Symbol vector of sample `idx` (alphabet values at its labels).
    pub fn symbols_of(&self, idx: usize) -> Array1<f64> {
        let alpha = self.alphabet();
        Array1::from_iter(
            self.samples[idx]
                .labels
                .iter()
                .map(|&l| alpha.symbols[l as usize]),
        )
    }
}

/// Draws a 2Nr x 2Nt real channel with i.i.d. N(0, 1/Nr) entries, row-major
/// draw order.
pub fn sample_channel<R: Rng>(nt: usize, nr: usize, rng: &mut R) -> Array2<f64> {
    let dist = Normal::new(0.0, (1.0 / nr as f64).sqrt()).unwrap();
    Array2::from_shape_fn((2 * nr, 2 * nt), |_| dist.sample(rng))
}

/// Draws the augmented form of a complex Nr x Nt channel with i.i.d.
/// CN(0, 1/Nr) entries: blocks [[Re, -Im], [Im, Re]], each component
/// N(0, 1/(2Nr)).
pub fn sample_channel_complex_structured<R: Rng>(nt: usize, nr: usize, rng: &mut R) -> Array2<f64> {
    let dist = Normal::new(0.0, (1.0 / (2.0 * nr as f64)).sqrt()).unwrap();
    let mut h = Array2::zeros((2 * nr, 2 * nt));
    for r in 0..nr {
        for c in 0..nt {
            let re = dist.sample(rng);
            let im = dist.sample(rng);
            h[[r, c]] = re;
            h[[r, nt + c]] = -im;
            h[[nr + r, c]] = im;
            h[[nr + r, nt + c]] = re;
        }
    }
    h
}

/// Draws 2Nt uniform symbol labels and the matching symbol vector.
pub fn sample_symbols<R: Rng>(
    alphabet: &Alphabet,
    nt: usize,
    rng: &mut R,
) -> (Vec<u8>, Array1<f64>) {
    let n = 2 * nt;
    let mut labels = Vec::with_capacity(n);
    let mut x = Array1::zeros(n);
    for i in 0..n {
        let l = if alphabet.k == 1 {
            0
        } else {
            rng.random_range(0..alphabet.k)
        };
        labels.push(l as u8);
        x[i] = alphabet.symbols[l];
    }
    (labels, x)
}

/// Noise variance per real dimension for a total-power SNR target:
/// sigma2 = Nt / (Nr * 10^(snr_db/10)).
///
/// Derivation: with E{x'x} = Nt and H entries of variance 1/Nr,
/// E{|Hx|^2} = 2Nt; with n of per-dimension variance sigma2,
/// E{|n|^2} = 2Nr*sigma2; their ratio is the linear SNR.
pub fn noise_variance_for_snr(snr_db: f64, nt: usize, nr: usize) -> Result<f64> {
    if !snr_db.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "SNR must be finite, got {snr_db} dB"
        )));
    }
    Ok(nt as f64 / (nr as f64 * 10f64.powf(snr_db / 10.0)))
}

/// y = Hx + n with n i.i.d. N(0, sigma2).
pub fn transmit<R: Rng>(
    h: &Array2<f64>,
    x: &Array1<f64>,
    sigma2: f64,
    rng: &mut R,
) -> Result<Array1<f64>> {
    if h.ncols() != x.len() {
        return Err(Error::ShapeMismatch(format!(
            "H is {}x{} but x has length {}",
            h.nrows(),
            h.ncols(),
            x.len()
        )));
    }
    if !(sigma2 >= 0.0) {
        return Err(Error::Domain(format!("sigma2 must be >= 0, got {sigma2}")));
    }
    let mut y = h.dot(x);
    if sigma2 > 0.0 {
        let dist = Normal::new(0.0, sigma2.sqrt()).unwrap();
        for v in y.iter_mut() {
            *v += dist.sample(rng);
        }
    }
    Ok(y)
}

// Disjoint substream index ranges for the three splits. Each sample owns the
// four streams (snr, channel, symbols, noise) at its global index, so a
// sample's content depends only on (seed, split, position).
const SPLIT_STRIDE: u64 = 1 << 40;

fn sample_at(config: &MimoConfig, global_idx: u64) -> ChannelSample {
    let (lo, hi) = config.snr_db_range;
    let snr_db = if lo == hi {
        lo
    } else {
        substream(config.seed, Stream::Snr, global_idx).random_range(lo..hi)
    };
    let sigma2 = noise_variance_for_snr(snr_db, config.nt, config.nr).unwrap();

    let mut ch_rng = substream(config.seed, Stream::Channel, global_idx);
    let h = if config.complex_structured {
        sample_channel_complex_structured(config.nt, config.nr, &mut ch_rng)
    } else {
        sample_channel(config.nt, config.nr, &mut ch_rng)
    };

    let alphabet = build_alphabet(config.scheme);
    let (labels, x) = sample_symbols(
        &alphabet,
        config.nt,
        &mut substream(config.seed, Stream::Symbols, global_idx),
    );

    let y = transmit(
        &h,
        &x,
        sigma2,
        &mut substream(config.seed, Stream::Noise, global_idx),
    )
    .unwrap();

    ChannelSample {
        h,
        labels,
        y,
        sigma2,
    }
}

fn generate_split(config: &MimoConfig, split_id: u64, count: usize) -> Dataset {
    let base = split_id * SPLIT_STRIDE;
    let samples = (0..count as u64)
        .map(|i| sample_at(config, base + i))
        .collect();
    Dataset {
        nt: config.nt,
        nr: config.nr,
        scheme: config.scheme,
        seed: config.seed,
        samples,
    }
}

/// Generates train/val/test splits with disjoint RNG streams derived from
/// `config.seed`. Regenerating with the same config is bit-identical.
pub fn generate_dataset(
    config: &MimoConfig,
    n_train: usize,
    n_val: usize,
    n_test: usize,
) -> Result<(Dataset, Dataset, Dataset)> {
    config.validate()?;
    Ok((
        generate_split(config, 0, n_train),
        generate_split(config, 1, n_val),
        generate_split(config, 2, n_test),
    ))
}

/// Generates a single split-independent dataset (used for fixed-SNR test
/// sets in sweeps); `salt` separates it from the canonical splits.
pub fn generate_eval_set(config: &MimoConfig, count: usize, salt: u64) -> Result<Dataset> {
    config.validate()?;
    Ok(generate_split(config, 3 + salt, count))
}

/// Seeded Fisher-Yates permutation of 0..n (used for epoch shuffles).
pub fn shuffled_indices(n: usize, seed: u64, epoch: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut substream(seed, Stream::Shuffle, epoch));
    idx
}
