use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::channel::{ChannelRealization, FourierBasis, HmimoChannel};

/// Trials per accumulation chunk. Chunks are reduced in index order, so the
/// result does not depend on how many threads evaluated them.
const CHUNK: u64 = 32;

/// Running sample moments of the MRT effective-channel products
/// `g_sᴴ g_p` over channel draws (`s`, `p` index streams `k·n_r + i`).
#[derive(Debug, Clone)]
pub struct MomentAccumulator {
    count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
    cross_sum: DMatrix<f64>,
}

impl MomentAccumulator {
    pub fn new(streams: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; streams],
            m2: vec![0.0; streams],
            cross_sum: DMatrix::zeros(streams, streams),
        }
    }

    pub fn streams(&self) -> usize {
        self.mean.len()
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Adds one draw of the effective channel `G = H_a U_sᴴ`, whose row `s` is `g_sᴴ`.
    pub fn push(&mut self, g: &DMatrix<Complex64>) {
        assert_eq!(g.nrows(), self.streams(), "effective channel has wrong stream count");
        let gram = g * g.adjoint();
        self.count += 1;
        let n = self.count as f64;
        for s in 0..self.streams() {
            let x = gram[(s, s)].re;
            let delta = x - self.mean[s];
            self.mean[s] += delta / n;
            self.m2[s] += delta * (x - self.mean[s]);
        }
        for (acc, v) in self.cross_sum.iter_mut().zip(gram.iter()) {
            *acc += v.norm_sqr();
        }
    }

    /// Adds a full realization, projecting its angular part onto `bs`.
    pub fn push_realization(&mut self, realization: &ChannelRealization, bs: &FourierBasis) {
        self.push(&(&realization.h_a * bs.matrix().adjoint()));
    }

    /// Combines two accumulators (Chan et al. pairwise update).
    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        for s in 0..self.streams() {
            let delta = other.mean[s] - self.mean[s];
            self.mean[s] += delta * nb / n;
            self.m2[s] += other.m2[s] + delta * delta * na * nb / n;
        }
        self.cross_sum += &other.cross_sum;
        self.count += other.count;
    }

    pub fn finish(&self) -> MomentEstimates {
        let n = self.count as f64;
        let streams = self.streams();
        let mut cross = &self.cross_sum / n;
        for s in 0..streams {
            cross[(s, s)] = 0.0;
        }
        MomentEstimates {
            trials: self.count,
            mean: self.mean.clone(),
            var: self
                .m2
                .iter()
                .map(|m| if self.count > 1 { m / (n - 1.0) } else { f64::NAN })
                .collect(),
            cross,
            trace: self.mean.iter().sum(),
        }
    }
}

/// Sample estimates of the MRT moments.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentEstimates {
    pub trials: u64,
    /// `E[g_sᴴ g_s]` per stream.
    pub mean: Vec<f64>,
    /// `Var[g_sᴴ g_s]` per stream (unbiased).
    pub var: Vec<f64>,
    /// `E[|g_sᴴ g_p|²]` for `s ≠ p`; the diagonal is zero.
    pub cross: DMatrix<f64>,
    /// `E[Tr(H_a U_sᴴ U_s H_aᴴ)]`.
    pub trace: f64,
}

/// Estimates the moments from trials `0..trials` of `channel`, in parallel
/// over fixed-size chunks on the current rayon pool.
pub fn estimate_moments(channel: &HmimoChannel, trials: u64, seed: u64) -> MomentEstimates {
    let streams = channel.profile().n_r() * channel.profile().users();
    let chunks = trials.div_ceil(CHUNK);
    let partials: Vec<MomentAccumulator> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = MomentAccumulator::new(streams);
            for trial in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                let h_a = channel.sample_angular(seed, trial);
                acc.push(&channel.effective_channel(&h_a));
            }
            acc
        })
        .collect();
    let mut total = MomentAccumulator::new(streams);
    for p in &partials {
        total.merge(p);
    }
    total.finish()
}
