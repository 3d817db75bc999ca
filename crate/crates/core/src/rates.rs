//! Regret-rate benchmark on a stationary synthetic stream.
//!
//! Draws an i.i.d. linear-Gaussian stream (fixed covariate distribution,
//! fixed target map, additive noise), runs each update rule online over it,
//! and reports empirical regret at power-of-two checkpoints. Against this
//! stream, follow-the-leader regret grows logarithmically, online gradient
//! descent with a `1/sqrt(k)` step grows like `sqrt(K)`, and the moving
//! average accumulates regret linearly.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::Result;
use crate::harness::UpdateRuleKind;
use crate::learner::{loss_w, ma_step_w, ogd_step_w, ridge_solve, RlsState};
use crate::rng::{standard_normal, stream, Purpose};
use crate::scalar::{real, Scalar};

/// Configuration of the synthetic-stream benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct RatesConfig {
    /// Checkpoints at which regret is evaluated; the stream length is the
    /// largest entry.
    pub checkpoints: Vec<usize>,
    /// Independent streams averaged per algorithm.
    pub n_streams: usize,
    pub base_seed: u64,
    /// Signal slots of the covariate (plus one bias slot and `d_dim`
    /// velocity-like slots).
    pub n_dim: usize,
    /// Action dimension.
    pub d_dim: usize,
    /// Additive observation noise std.
    pub noise_sigma: f64,
    /// OGD step scale (step at round k is `eta0/sqrt(k)`).
    pub eta0: f64,
    /// Moving-average weight.
    pub lambda: f64,
    /// Ridge coefficient for FTL/MA; OGD applies `reg/K` per round.
    pub reg: f64,
}

impl Default for RatesConfig {
    fn default() -> Self {
        Self {
            checkpoints: (4..=12).map(|e| 1usize << e).collect(),
            n_streams: 8,
            base_seed: 42,
            n_dim: 8,
            d_dim: 2,
            noise_sigma: 0.5,
            eta0: 0.02,
            lambda: 0.9,
            reg: 1e-2,
        }
    }
}

impl RatesConfig {
    pub fn p_dim(&self) -> usize {
        self.n_dim + 1 + self.d_dim
    }

    pub fn k_max(&self) -> usize {
        self.checkpoints.iter().copied().max().unwrap_or(0)
    }
}

/// Least-squares line fit `y ~ slope·x + intercept` with its R².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Fits a line by ordinary least squares.
pub fn line_fit(xs: &[f64], ys: &[f64]) -> LineFit {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2);
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    LineFit {
        slope,
        intercept,
        r2,
    }
}

/// Mean regret curve of one algorithm, with its regret-vs-log-K line fit.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgoRates {
    pub algo: UpdateRuleKind,
    /// `(K, mean regret at K)` per checkpoint.
    pub regrets: Vec<(usize, f64)>,
    /// Fit of regret against ln K.
    pub log_fit: LineFit,
}

impl AlgoRates {
    /// Regret divided by sqrt(K) at each checkpoint.
    pub fn over_sqrt_k(&self) -> Vec<(usize, f64)> {
        self.regrets
            .iter()
            .map(|&(k, r)| (k, r / (k as f64).sqrt()))
            .collect()
    }

    /// Regret divided by K at each checkpoint.
    pub fn over_k(&self) -> Vec<(usize, f64)> {
        self.regrets
            .iter()
            .map(|&(k, r)| (k, r / k as f64))
            .collect()
    }
}

/// Full benchmark output.
#[derive(Debug, Clone, PartialEq)]
pub struct RatesResult {
    pub ogd: AlgoRates,
    pub ma: AlgoRates,
    pub ftl: AlgoRates,
}

impl RatesResult {
    pub fn all(&self) -> [&AlgoRates; 3] {
        [&self.ogd, &self.ma, &self.ftl]
    }
}

struct StreamRegrets {
    ogd: Vec<f64>,
    ma: Vec<f64>,
    ftl: Vec<f64>,
}

/// Runs the three update rules over one shared stream and evaluates regret
/// at every checkpoint.
fn run_stream<T: Scalar>(cfg: &RatesConfig, stream_idx: usize) -> Result<StreamRegrets> {
    let p = cfg.p_dim();
    let d = cfg.d_dim;
    let k_max = cfg.k_max();
    let mut rng = stream(cfg.base_seed, stream_idx as u64, 0, 0, Purpose::Stream);

    let scale = real::<T>(1.0 / (p as f64).sqrt());
    let w_star = DMatrix::<T>::from_fn(d, p, |_, _| standard_normal::<T, _>(&mut rng) * scale);
    let sigma: T = real(cfg.noise_sigma);

    let mut zs: Vec<DVector<T>> = Vec::with_capacity(k_max);
    let mut os: Vec<DVector<T>> = Vec::with_capacity(k_max);
    for _ in 0..k_max {
        let mut z = DVector::<T>::from_fn(p, |_, _| standard_normal::<T, _>(&mut rng));
        z[cfg.n_dim] = T::one();
        let o = &w_star * &z
            + DVector::<T>::from_fn(d, |_, _| standard_normal::<T, _>(&mut rng) * sigma);
        zs.push(z);
        os.push(o);
    }

    let eta0: T = real(cfg.eta0);
    let lambda: T = real(cfg.lambda);
    let reg: T = real(cfg.reg);
    let reg_per_round: T = real(cfg.reg / k_max as f64);

    let mut w_ogd = DMatrix::<T>::zeros(d, p);
    let mut w_ma = DMatrix::<T>::zeros(d, p);
    let mut ftl = RlsState::<T>::new(p, d, reg)?;

    let mut cum_ogd = T::zero();
    let mut cum_ma = T::zero();
    let mut cum_ftl = T::zero();
    let mut out = StreamRegrets {
        ogd: Vec::with_capacity(cfg.checkpoints.len()),
        ma: Vec::with_capacity(cfg.checkpoints.len()),
        ftl: Vec::with_capacity(cfg.checkpoints.len()),
    };

    for k in 1..=k_max {
        let z = &zs[k - 1];
        let o = &os[k - 1];
        cum_ogd += loss_w(&w_ogd, z, o);
        cum_ma += loss_w(&w_ma, z, o);
        cum_ftl += loss_w(ftl.weights(), z, o);

        let round = (std::slice::from_ref(z), std::slice::from_ref(o));
        w_ogd = ogd_step_w(&w_ogd, eta0, reg_per_round, round, k)?;
        w_ma = ma_step_w(&w_ma, lambda, reg, round)?;
        ftl.absorb(z, o)?;

        if cfg.checkpoints.contains(&k) {
            // Best fixed map in hindsight over the realized prefix.
            let hind = ridge_solve(&zs[..k], &os[..k], (p, d), T::zero())?;
            let mut hind_loss = T::zero();
            for (z, o) in zs[..k].iter().zip(&os[..k]) {
                hind_loss += loss_w(&hind, z, o);
            }
            let to_f64 = |x: T| x.to_f64().expect("finite regret");
            out.ogd.push(to_f64(cum_ogd - hind_loss));
            out.ma.push(to_f64(cum_ma - hind_loss));
            out.ftl.push(to_f64(cum_ftl - hind_loss));
        }
    }
    Ok(out)
}

/// Runs the benchmark: mean regret per checkpoint over independent streams,
/// plus the regret-vs-log-K fit per algorithm.
pub fn run_rates<T: Scalar>(cfg: &RatesConfig) -> Result<RatesResult>
where
    T: Send + Sync,
{
    assert!(!cfg.checkpoints.is_empty() && cfg.n_streams >= 1);
    let streams: Vec<Result<StreamRegrets>> = (0..cfg.n_streams)
        .into_par_iter()
        .map(|s| run_stream::<T>(cfg, s))
        .collect();

    let n_cp = cfg.checkpoints.len();
    let mut acc_ogd = vec![0.0; n_cp];
    let mut acc_ma = vec![0.0; n_cp];
    let mut acc_ftl = vec![0.0; n_cp];
    for s in streams {
        let s = s?;
        for i in 0..n_cp {
            acc_ogd[i] += s.ogd[i];
            acc_ma[i] += s.ma[i];
            acc_ftl[i] += s.ftl[i];
        }
    }
    let m = cfg.n_streams as f64;
    let finish = |acc: Vec<f64>, algo: UpdateRuleKind| -> AlgoRates {
        let regrets: Vec<(usize, f64)> = cfg
            .checkpoints
            .iter()
            .zip(&acc)
            .map(|(&k, &r)| (k, r / m))
            .collect();
        let xs: Vec<f64> = regrets.iter().map(|&(k, _)| (k as f64).ln()).collect();
        let ys: Vec<f64> = regrets.iter().map(|&(_, r)| r).collect();
        AlgoRates {
            algo,
            log_fit: line_fit(&xs, &ys),
            regrets,
        }
    };
    Ok(RatesResult {
        ogd: finish(acc_ogd, UpdateRuleKind::Ogd),
        ma: finish(acc_ma, UpdateRuleKind::Ma),
        ftl: finish(acc_ftl, UpdateRuleKind::Ftl),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_fit_recovers_exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [3.0, 5.0, 7.0, 9.0];
        let fit = line_fit(&xs, &ys);
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_benchmark_runs_and_orders_regret() {
        let cfg = RatesConfig {
            checkpoints: vec![16, 64, 256],
            n_streams: 3,
            ..RatesConfig::default()
        };
        let res = run_rates::<f64>(&cfg).unwrap();
        // All regrets finite and FTL no worse than MA at the last checkpoint.
        for a in res.all() {
            for &(_, r) in &a.regrets {
                assert!(r.is_finite());
            }
        }
        let last = |a: &AlgoRates| a.regrets.last().unwrap().1;
        assert!(last(&res.ftl) <= last(&res.ma));
    }
}
