//! Dictionary learning for approximate protocols.
//!
//! The data matrix `W` holds every `w ∈ {±1}^k` as a column (bitmask order).
//! K-SVD alternates OMP sparse coding of `W` against the dictionary `D` with
//! rank-1 updates of each atom on the columns that use it, driving down
//! `‖W − DA‖_F²`. The learned `D` is the encoder and the codes are the decoder.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::omp::omp_unchecked;
use crate::{enumerate_sign_vectors, Decoder, Error, Matrix, Protocol, Result, SignVector, SparseCombination};

/// Largest `k` accepted by [`ksvd`].
pub const MAX_KSVD_K: usize = 12;

const OMP_TOL: f64 = 1e-12;
const POWER_MAX_ITERS: usize = 200;
const POWER_TOL: f64 = 1e-12;
const STOP_IMPROVEMENT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KsvdInit {
    /// [`KsvdInit::AntipodalClasses`] when `n ≤ 2^(k−1)`, else [`KsvdInit::Columns`].
    #[default]
    Auto,
    /// `n` distinct `±` classes of `{±1}^k`, each with a random sign.
    AntipodalClasses,
    /// `n` distinct columns of `W`.
    Columns,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KsvdConfig {
    pub k: usize,
    pub n: usize,
    pub ell: usize,
    pub iterations: usize,
    pub seed: u64,
    pub init: KsvdInit,
}

impl KsvdConfig {
    pub fn new(k: usize, n: usize, ell: usize, iterations: usize, seed: u64) -> Self {
        KsvdConfig {
            k,
            n,
            ell,
            iterations,
            seed,
            init: KsvdInit::Auto,
        }
    }
}

/// `‖W − DA‖_F²` before and after one dictionary-update stage (codes fixed).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageObjective {
    pub iteration: usize,
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KsvdOutcome {
    /// Encoder `D` (unit-norm atoms) with one decoder column per `w`.
    pub protocol: Protocol,
    /// `max_w ‖w − D·a_w‖² / k`.
    pub epsilon_measured: f64,
    /// Final `‖W − DA‖_F²`.
    pub objective: f64,
    pub stages: Vec<StageObjective>,
}

type Codes = Vec<Vec<(usize, f64)>>;

struct Problem {
    k: usize,
    ell: usize,
    data: Vec<Vec<f64>>,
}

impl Problem {
    fn residual(&self, dict: &[Vec<f64>], i: usize, code: &[(usize, f64)]) -> Vec<f64> {
        let mut r = self.data[i].clone();
        for &(j, c) in code {
            for (x, d) in r.iter_mut().zip(&dict[j]) {
                *x -= c * d;
            }
        }
        r
    }

    fn residual_sq(&self, dict: &[Vec<f64>], i: usize, code: &[(usize, f64)]) -> f64 {
        self.residual(dict, i, code).iter().map(|x| x * x).sum()
    }

    fn objective(&self, dict: &[Vec<f64>], codes: &Codes) -> f64 {
        codes.iter().enumerate().map(|(i, c)| self.residual_sq(dict, i, c)).sum()
    }

    fn sparse_code(&self, dict: &[Vec<f64>]) -> Result<Codes> {
        let d = Matrix::from_columns(self.k, dict)?;
        self.data
            .iter()
            .map(|w| Ok(omp_unchecked(&d, w, self.ell, OMP_TOL)?.iter().collect()))
            .collect()
    }

    /// Atom-by-atom rank-1 updates, in atom order.
    fn update_dictionary(&self, dict: &mut [Vec<f64>], codes: &mut Codes) {
        for j in 0..dict.len() {
            let users: Vec<(usize, usize)> = codes
                .iter()
                .enumerate()
                .filter_map(|(i, c)| c.iter().position(|&(l, _)| l == j).map(|p| (i, p)))
                .collect();
            if users.is_empty() {
                let worst = (0..self.data.len())
                    .map(|i| (i, self.residual_sq(dict, i, &codes[i])))
                    .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
                    .0;
                let scale = 1.0 / libm::sqrt(self.k as f64);
                dict[j] = self.data[worst].iter().map(|x| x * scale).collect();
                continue;
            }
            // residual of each user with atom j's contribution restored
            let errors: Vec<Vec<f64>> = users
                .iter()
                .map(|&(i, p)| {
                    let mut e = self.residual(dict, i, &codes[i]);
                    let c = codes[i][p].1;
                    for (x, d) in e.iter_mut().zip(&dict[j]) {
                        *x += c * d;
                    }
                    e
                })
                .collect();
            let atom = top_singular_vector(&errors, &dict[j]);
            for (&(i, p), e) in users.iter().zip(&errors) {
                codes[i][p].1 = dot(e, &atom);
            }
            dict[j] = atom;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Leading left singular vector of the matrix with columns `errors`, by power
/// iteration on `E·Eᵀ` from `start`. The Rayleigh quotient never decreases
/// along the way, so the result fits at least as well as `start`.
fn top_singular_vector(errors: &[Vec<f64>], start: &[f64]) -> Vec<f64> {
    let k = start.len();
    let mut gram = vec![0.0; k * k];
    for e in errors {
        for a in 0..k {
            for b in 0..k {
                gram[a * k + b] += e[a] * e[b];
            }
        }
    }
    let mut v = start.to_vec();
    for _ in 0..POWER_MAX_ITERS {
        let mut u: Vec<f64> = (0..k).map(|a| dot(&gram[a * k..(a + 1) * k], &v)).collect();
        let norm = libm::sqrt(dot(&u, &u));
        if norm == 0.0 {
            break;
        }
        u.iter_mut().for_each(|x| *x /= norm);
        let change = libm::sqrt(u.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum());
        v = u;
        if change < POWER_TOL {
            break;
        }
    }
    v
}

fn initial_dictionary(cfg: &KsvdConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<f64>>> {
    let half = 1usize << (cfg.k - 1);
    let classes = match cfg.init {
        KsvdInit::AntipodalClasses => true,
        KsvdInit::Columns => false,
        KsvdInit::Auto => cfg.n <= half,
    };
    let words: Vec<SignVector> = if classes {
        if cfg.n > half {
            return Err(Error::contract(alloc::format!(
                "only {half} antipodal classes for n = {}",
                cfg.n
            )));
        }
        sample(rng, half, cfg.n)
            .into_iter()
            .map(|c| {
                let h = SignVector::from_raw(cfg.k, c as u64);
                if rng.gen::<bool>() {
                    h
                } else {
                    -h
                }
            })
            .collect()
    } else {
        sample(rng, 1 << cfg.k, cfg.n)
            .into_iter()
            .map(|c| SignVector::from_raw(cfg.k, c as u64))
            .collect()
    };
    let scale = 1.0 / libm::sqrt(cfg.k as f64);
    Ok(words
        .iter()
        .map(|w| w.to_f64().into_iter().map(|x| x * scale).collect())
        .collect())
}

/// Learns a `k x n` dictionary with at most `ell` atoms per `w`.
///
/// Stops after `iterations` rounds or once a round improves the objective by
/// less than `1e-10` (OMP coding can make it worse). The round with the lowest
/// objective is kept; the decoder for each `w` is whichever of that round's
/// codes and a fresh OMP pass on its dictionary fits better.
pub fn ksvd(cfg: &KsvdConfig) -> Result<KsvdOutcome> {
    let KsvdConfig { k, n, ell, .. } = *cfg;
    if k == 0 || k > MAX_KSVD_K {
        return Err(Error::budget("K-SVD k", MAX_KSVD_K as u64, k as u64));
    }
    if n == 0 || n >= 1 << k || ell == 0 || ell > n {
        return Err(Error::contract(alloc::format!(
            "K-SVD needs 1 <= ell <= n < 2^k, got k = {k}, n = {n}, ell = {ell}"
        )));
    }
    let problem = Problem {
        k,
        ell,
        data: enumerate_sign_vectors(k)?.map(|w| w.to_f64()).collect(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut dict = initial_dictionary(cfg, &mut rng)?;
    let mut best: Option<(f64, Vec<Vec<f64>>, Codes)> = None;
    let mut stages = Vec::new();
    let mut previous = f64::INFINITY;
    for iteration in 0..cfg.iterations {
        let mut fresh = problem.sparse_code(&dict)?;
        let before = problem.objective(&dict, &fresh);
        problem.update_dictionary(&mut dict, &mut fresh);
        let after = problem.objective(&dict, &fresh);
        stages.push(StageObjective { iteration, before, after });
        if best.as_ref().is_none_or(|b| after < b.0) {
            best = Some((after, dict.clone(), fresh));
        }
        if previous - after < STOP_IMPROVEMENT {
            break;
        }
        previous = after;
    }

    let codes = best.map(|(_, d, c)| {
        dict = d;
        c
    });
    let recoded = problem.sparse_code(&dict)?;
    let last = codes.unwrap_or_else(|| recoded.clone());
    let mut table = Vec::with_capacity(problem.data.len());
    let mut objective = 0.0;
    let mut worst = 0.0f64;
    for (i, (a, b)) in last.into_iter().zip(recoded).enumerate() {
        let (ra, rb) = (problem.residual_sq(&dict, i, &a), problem.residual_sq(&dict, i, &b));
        let (code, r) = if rb <= ra { (b, rb) } else { (a, ra) };
        objective += r;
        worst = worst.max(r);
        table.push(SparseCombination::new(code)?);
    }
    let encoder = Matrix::from_columns(k, &dict)?;
    Ok(KsvdOutcome {
        protocol: Protocol::new(encoder, ell, Decoder::Table(table))?,
        epsilon_measured: worst / k as f64,
        objective,
        stages,
    })
}
