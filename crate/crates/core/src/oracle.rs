//! Independent references for ensemble averages.
//!
//! [`brute_ratio_average`] integrates `Δ(x)² ∏ dμ(x_i)` directly with a
//! tensor-product Gauss rule (`n ≤ 3`). [`mcmc_ratio_average`] samples the
//! ensemble with a Metropolis random walk for moderate `n`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::orthopoly::{recurrence, WeightSpec};
use crate::quadrature::golub_welsch;
use crate::ratios::RatioQuery;

/// Largest ensemble size accepted by the tensor-product oracle.
pub const BRUTE_MAX_N: usize = 3;

/// Minimum `|Im β|` accepted by the Monte Carlo estimator.
pub const MCMC_MIN_IM_BETA: f64 = 0.2;

const ACCEPTANCE_WINDOW: usize = 1000;
const BATCHES: usize = 50;

/// Unnormalized joint density `Δ_n(x)² ∏ w(x_i)` of the ensemble.
#[derive(Debug, Clone)]
pub struct EnsembleDensity {
    spec: WeightSpec,
    n: usize,
}

impl EnsembleDensity {
    pub fn new(spec: WeightSpec, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("ensemble needs at least one particle".into()));
        }
        Ok(Self { spec, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    /// `2 Σ_{i<j} ln|x_i − x_j| + Σ ln w(x_i)`; `−∞` off the support.
    pub fn log_density(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..x.len() {
            acc += self.spec.density(x[i]).ln();
            for j in i + 1..x.len() {
                acc += 2.0 * (x[i] - x[j]).abs().ln();
            }
        }
        acc
    }

    /// `ln Z_n` with `Z_n = ∫ Δ_n(x)² ∏ dμ(x_i)` over unordered `ℝⁿ`, by
    /// `m`-point tensor Gauss quadrature (exact once `m ≥ n`).
    pub fn log_z(&self, m: usize) -> Result<f64> {
        let q = RatioQuery::new(vec![], vec![])?;
        let (_, z) = tensor_average(&self.spec, self.n, &q, m)?;
        Ok(z.ln())
    }

    /// `ln(n! ∏_{j<n} γ_j^{−2})`, the value `ln Z_n` must take.
    pub fn heine_log_z(&self) -> Result<f64> {
        let rec = recurrence(&self.spec, self.n + 1)?;
        let log_fact: f64 = (1..=self.n).map(|k| (k as f64).ln()).sum();
        let log_gammas: f64 = (0..self.n).map(|j| rec.leading_coeff(j).map(f64::ln)).sum::<Result<f64>>()?;
        Ok(log_fact - 2.0 * log_gammas)
    }
}

fn vandermonde_sq(x: &[f64]) -> f64 {
    let mut v = 1.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let d = x[j] - x[i];
            v *= d * d;
        }
    }
    v
}

/// Per-particle factor `∏_j (α_j − t)/(β_j − t)`.
fn ratio_factor(q: &RatioQuery, t: f64) -> Complex64 {
    q.alphas().iter().zip(q.betas()).map(|(a, b)| (a - t) / (b - t)).product()
}

/// Returns (numerator, Z_n) of the tensor quadrature.
fn tensor_average(spec: &WeightSpec, n: usize, q: &RatioQuery, m: usize) -> Result<(Complex64, f64)> {
    if n == 0 {
        return Err(Error::InvalidInput("ensemble needs at least one particle".into()));
    }
    if n > BRUTE_MAX_N {
        return Err(Error::CostGuard(format!(
            "brute-force averages are limited to n ≤ {BRUTE_MAX_N} (got n = {n})"
        )));
    }
    // polynomial part per variable has degree 2(n−1) + k
    if 2 * m < 2 * (n - 1) + q.k() + 1 {
        return Err(Error::InvalidInput(format!(
            "m = {m} nodes cannot integrate the degree-{} polynomial part exactly",
            2 * (n - 1) + q.k()
        )));
    }
    let rule = golub_welsch(&recurrence(spec, m)?, m)?;
    let nodes = rule.nodes();
    let weights = rule.weights();
    let factors: Vec<Complex64> = nodes.iter().map(|&t| ratio_factor(q, t)).collect();

    let mut idx = vec![0usize; n];
    let mut x = vec![0.0; n];
    let mut num = Complex64::new(0.0, 0.0);
    let mut z = 0.0;
    loop {
        let mut w = 1.0;
        let mut f = Complex64::new(1.0, 0.0);
        for (slot, &i) in idx.iter().enumerate() {
            x[slot] = nodes[i];
            w *= weights[i];
            f *= factors[i];
        }
        let v = w * vandermonde_sq(&x);
        let term = v * f;
        if !term.re.is_finite() || !term.im.is_finite() {
            return Err(Error::NonFinite { node: x[0], value: term });
        }
        num += term;
        z += v;

        let mut pos = 0;
        loop {
            if pos == n {
                return Ok((num, z));
            }
            idx[pos] += 1;
            if idx[pos] < m {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// `⟨∏_j ∏_i (α_j − x_i)/(β_j − x_i)⟩` by `m`-point tensor Gauss quadrature
/// with respect to `μ` on each axis, sharing the rule between numerator and
/// `Z_n`.
pub fn brute_ratio_average(spec: &WeightSpec, n: usize, q: &RatioQuery, m: usize) -> Result<Complex64> {
    let (num, z) = tensor_average(spec, n, q, m)?;
    if !(z > 0.0) {
        return Err(Error::NonFinite { node: f64::NAN, value: Complex64::new(z, 0.0) });
    }
    Ok(num / z)
}

/// Post burn-in configurations of a Metropolis chain.
#[derive(Debug, Clone)]
pub struct McmcRun {
    pub samples: Vec<Vec<f64>>,
    pub acceptance_rate: f64,
}

/// Monte Carlo estimate with its batch-means standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McmcEstimate {
    pub estimate: Complex64,
    /// `√(Var Re + Var Im)` of the mean, from batch means.
    pub stderr: f64,
    pub acceptance_rate: f64,
    pub samples: usize,
}

/// Single-site Metropolis chain; one step is a sweep over all particles.
struct Chain {
    density: EnsembleDensity,
    x: Vec<f64>,
    rng: ChaCha8Rng,
    scale: f64,
    lo: f64,
    hi: f64,
    proposed: u64,
    accepted: u64,
}

impl Chain {
    fn new(spec: WeightSpec, n: usize, seed: u64) -> Result<Self> {
        let (lo, hi) = spec.support();
        let width = hi - lo;
        // evenly spread interior start
        let x = (0..n).map(|i| lo + width * (i as f64 + 0.5) / n as f64).collect();
        Ok(Self {
            density: EnsembleDensity::new(spec, n)?,
            x,
            rng: ChaCha8Rng::seed_from_u64(seed),
            scale: 0.5 * width / (n as f64).sqrt(),
            lo,
            hi,
            proposed: 0,
            accepted: 0,
        })
    }

    fn reflect(&self, mut t: f64) -> f64 {
        while t < self.lo || t > self.hi {
            if t < self.lo {
                t = 2.0 * self.lo - t;
            }
            if t > self.hi {
                t = 2.0 * self.hi - t;
            }
        }
        t
    }

    /// Change in log-density when particle `i` moves to `t`.
    fn delta(&self, i: usize, t: f64) -> f64 {
        let old = self.x[i];
        let spec = self.density.spec();
        let mut d = spec.density(t).ln() - spec.density(old).ln();
        for (j, &xj) in self.x.iter().enumerate() {
            if j != i {
                d += 2.0 * ((t - xj).abs().ln() - (old - xj).abs().ln());
            }
        }
        d
    }

    /// One sweep; returns the number of accepted moves.
    fn sweep(&mut self) -> usize {
        let mut accepted = 0;
        for i in 0..self.x.len() {
            let step = self.scale * (2.0 * self.rng.random::<f64>() - 1.0);
            let t = self.reflect(self.x[i] + step);
            self.proposed += 1;
            if t <= self.lo || t >= self.hi {
                continue;
            }
            let d = self.delta(i, t);
            if d.is_nan() {
                continue;
            }
            let u: f64 = self.rng.random();
            if d >= 0.0 || u.ln() < d {
                self.x[i] = t;
                accepted += 1;
            }
        }
        self.accepted += accepted as u64;
        accepted
    }

    fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    /// Runs `steps` sweeps, handing post burn-in states to `visit`.
    fn run<F: FnMut(&[f64])>(&mut self, steps: usize, mut visit: F) -> Result<()> {
        let burn_in = steps / 5;
        let window = ACCEPTANCE_WINDOW.min(steps);
        let mut window_accepts = 0;
        for step in 0..steps {
            window_accepts += self.sweep();
            if (step + 1) % window == 0 {
                if window_accepts == 0 {
                    return Err(Error::ZeroAcceptance { window });
                }
                window_accepts = 0;
            }
            if step >= burn_in {
                visit(&self.x);
            }
        }
        Ok(())
    }
}

fn check_chain_args(n: usize, steps: usize) -> Result<()> {
    if n == 0 || steps == 0 {
        return Err(Error::InvalidInput(format!("need n ≥ 1 and steps ≥ 1 (got n = {n}, steps = {steps})")));
    }
    Ok(())
}

/// Metropolis samples of the ensemble; the first `steps/5` sweeps are discarded.
pub fn mcmc_sample(spec: &WeightSpec, n: usize, steps: usize, seed: u64) -> Result<McmcRun> {
    check_chain_args(n, steps)?;
    let mut chain = Chain::new(spec.clone(), n, seed)?;
    let mut samples = Vec::with_capacity(steps - steps / 5);
    chain.run(steps, |x| samples.push(x.to_vec()))?;
    Ok(McmcRun { samples, acceptance_rate: chain.acceptance_rate() })
}

/// Sample mean of `∏_j D_n(α_j)/D_n(β_j)` over a Metropolis chain.
pub fn mcmc_ratio_average(
    spec: &WeightSpec,
    n: usize,
    q: &RatioQuery,
    steps: usize,
    seed: u64,
) -> Result<McmcEstimate> {
    check_chain_args(n, steps)?;
    if q.k() == 0 {
        return Ok(McmcEstimate {
            estimate: Complex64::new(1.0, 0.0),
            stderr: 0.0,
            acceptance_rate: 1.0,
            samples: 0,
        });
    }
    if let Some(b) = q.betas().iter().find(|b| b.im.abs() < MCMC_MIN_IM_BETA) {
        return Err(Error::InvalidInput(format!(
            "Monte Carlo estimates need |Im β| ≥ {MCMC_MIN_IM_BETA} (got β = {b})"
        )));
    }
    let mut chain = Chain::new(spec.clone(), n, seed)?;
    let mut values = Vec::with_capacity(steps - steps / 5);
    chain.run(steps, |x| values.push(x.iter().map(|&t| ratio_factor(q, t)).product::<Complex64>()))?;

    let count = values.len();
    let mean: Complex64 = values.iter().sum::<Complex64>() / count as f64;
    let batches = BATCHES.min(count);
    let size = count / batches;
    let stderr = if batches < 2 {
        f64::INFINITY
    } else {
        let means: Vec<Complex64> = values
            .chunks_exact(size)
            .take(batches)
            .map(|c| c.iter().sum::<Complex64>() / size as f64)
            .collect();
        let centre: Complex64 = means.iter().sum::<Complex64>() / batches as f64;
        let var = means.iter().map(|m| (m - centre).norm_sqr()).sum::<f64>() / (batches - 1) as f64;
        (var / batches as f64).sqrt()
    };
    Ok(McmcEstimate { estimate: mean, stderr, acceptance_rate: chain.acceptance_rate(), samples: count })
}
