//! Dataset aggregation and decoder update rules.
//!
//! The decoder is the linear map `W = [F_v | b_v | G_v]` acting on covariates
//! `z = [n; 1; v]`, trained against oracle actions under the squared loss
//! `||W z - o||^2`. Updates per reach: online gradient descent on the latest
//! reach, a moving average toward the latest-reach ridge solution,
//! follow-the-leader (ridge on all aggregated data), and recursive least
//! squares as the exact incremental form of follow-the-leader.
//!
//! The update math works on plain weight matrices of any shape; thin
//! wrappers pack and unpack [`DecoderParams`].

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::decoder::DecoderParams;
use crate::error::{Error, Result};
use crate::scalar::{real, real_of_usize, Scalar};

/// All (covariate, oracle action) pairs aggregated across reaches.
///
/// Pairs within a reach are contiguous and time ordered; aggregation is
/// append-only.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedDataset<T: Scalar> {
    covariates: Vec<DVector<T>>,
    actions: Vec<DVector<T>>,
    /// Start offset of each reach; a final sentinel holds the total count.
    boundaries: Vec<usize>,
}

impl<T: Scalar> AggregatedDataset<T> {
    pub fn new() -> Self {
        Self {
            covariates: Vec::new(),
            actions: Vec::new(),
            boundaries: vec![0],
        }
    }

    /// Appends one reach's pairs as the next reach slice.
    pub fn append_reach(&mut self, pairs: impl IntoIterator<Item = (DVector<T>, DVector<T>)>) {
        for (z, o) in pairs {
            self.covariates.push(z);
            self.actions.push(o);
        }
        self.boundaries.push(self.covariates.len());
    }

    pub fn len(&self) -> usize {
        self.covariates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.covariates.is_empty()
    }

    pub fn n_reaches(&self) -> usize {
        self.boundaries.len() - 1
    }

    /// Pairs of reach `k` (1-based).
    pub fn reach_pairs(&self, k: usize) -> (&[DVector<T>], &[DVector<T>]) {
        assert!(k >= 1 && k <= self.n_reaches());
        let (lo, hi) = (self.boundaries[k - 1], self.boundaries[k]);
        (&self.covariates[lo..hi], &self.actions[lo..hi])
    }

    /// Pairs of the most recently appended reach.
    pub fn latest_reach(&self) -> (&[DVector<T>], &[DVector<T>]) {
        self.reach_pairs(self.n_reaches())
    }

    pub fn all_pairs(&self) -> (&[DVector<T>], &[DVector<T>]) {
        (&self.covariates, &self.actions)
    }
}

impl<T: Scalar> Default for AggregatedDataset<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Squared-error loss of a weight matrix on one pair.
pub fn loss_w<T: Scalar>(w: &DMatrix<T>, z: &DVector<T>, o: &DVector<T>) -> T {
    (w * z - o).norm_squared()
}

/// Squared-error loss of decoder params on one covariate/action pair.
pub fn loss<T: Scalar>(params: &DecoderParams<T>, z: &DVector<T>, o: &DVector<T>) -> T {
    loss_w(&params.to_weights(), z, o)
}

/// Ridge regression `min_W sum ||W z - o||^2 + reg ||W||_F^2` over a pair
/// slice, solved through the normal equations `(Z'Z + reg I) W' = Z'O`.
///
/// `dims = (p, d)`: covariate and action dimensions. With `reg = 0` the data
/// must have full column rank.
pub fn ridge_solve<T: Scalar>(
    zs: &[DVector<T>],
    os: &[DVector<T>],
    dims: (usize, usize),
    reg: T,
) -> Result<DMatrix<T>> {
    let (p, d) = dims;
    if reg < T::zero() {
        return Err(Error::InvalidConfig("regularization must be nonnegative".into()));
    }
    let mut gram = DMatrix::<T>::zeros(p, p);
    let mut cross = DMatrix::<T>::zeros(p, d);
    for (z, o) in zs.iter().zip(os) {
        gram.syger(T::one(), z, z, T::one()); // gram += z z' (lower triangle)
        cross.ger(T::one(), z, o, T::one()); // cross += z o'
    }
    for i in 0..p {
        for j in (i + 1)..p {
            gram[(i, j)] = gram[(j, i)];
        }
    }
    for i in 0..p {
        gram[(i, i)] += reg;
    }
    match Cholesky::new(gram.clone()) {
        Some(chol) => Ok(chol.solve(&cross).transpose()),
        None => {
            if reg <= T::zero() {
                return Err(Error::RankDeficient);
            }
            // Numerically indefinite despite reg > 0: SVD pseudo-solve.
            let svd = gram.svd(true, true);
            let wt = svd
                .solve(&cross, real::<T>(1e-300))
                .map_err(|_| Error::RankDeficient)?;
            Ok(wt.transpose())
        }
    }
}

/// One online-gradient-descent step on a weight matrix:
/// `W' = W - (eta0/sqrt(k)) · [ sum 2(Wz - o)z' + 2·reg_per_update·W ]`.
pub fn ogd_step_w<T: Scalar>(
    w: &DMatrix<T>,
    eta0: T,
    reg_per_update: T,
    latest: (&[DVector<T>], &[DVector<T>]),
    k: usize,
) -> Result<DMatrix<T>> {
    assert!(k >= 1);
    let two = real::<T>(2.0);
    let mut grad = w * (two * reg_per_update);
    for (z, o) in latest.0.iter().zip(latest.1) {
        let err = w * z - o;
        grad.ger(two, &err, z, T::one()); // grad += 2 err z'
    }
    let step = eta0 / real_of_usize::<T>(k).sqrt();
    let next = w - grad * step;
    if next.iter().any(|x| !x.is_finite()) {
        return Err(Error::Divergence);
    }
    Ok(next)
}

/// Moving-average step on a weight matrix: `W' = (1-lambda) W + lambda W*`,
/// where `W*` is the ridge solution on the latest reach only.
pub fn ma_step_w<T: Scalar>(
    w: &DMatrix<T>,
    lambda: T,
    reg: T,
    latest: (&[DVector<T>], &[DVector<T>]),
) -> Result<DMatrix<T>> {
    assert!(lambda >= T::zero() && lambda <= T::one());
    if lambda == T::zero() {
        return Ok(w.clone());
    }
    let dims = (w.ncols(), w.nrows());
    let w_star = ridge_solve(latest.0, latest.1, dims, reg)?;
    Ok(w * (T::one() - lambda) + w_star * lambda)
}

/// Online gradient descent on the latest reach, at the decoder level.
pub fn ogd_update<T: Scalar>(
    params: &DecoderParams<T>,
    eta0: T,
    reg_per_update: T,
    latest: (&[DVector<T>], &[DVector<T>]),
    k: usize,
) -> Result<DecoderParams<T>> {
    let next = ogd_step_w(&params.to_weights(), eta0, reg_per_update, latest, k)?;
    Ok(DecoderParams::from_weights(&next, params.n_neurons()))
}

/// Moving-average update at the decoder level.
pub fn ma_update<T: Scalar>(
    params: &DecoderParams<T>,
    lambda: T,
    reg: T,
    latest: (&[DVector<T>], &[DVector<T>]),
) -> Result<DecoderParams<T>> {
    let next = ma_step_w(&params.to_weights(), lambda, reg, latest)?;
    Ok(DecoderParams::from_weights(&next, params.n_neurons()))
}

/// Follow-the-leader: ridge refit on the whole aggregated dataset.
///
/// `dims = (p, d)` with `p = n_neurons + 1 + d`. An empty dataset with
/// positive regularization yields the zero decoder.
pub fn ftl_update<T: Scalar>(
    dataset: &AggregatedDataset<T>,
    dims: (usize, usize),
    reg: T,
) -> Result<DecoderParams<T>> {
    let (p, d) = dims;
    let (zs, os) = dataset.all_pairs();
    let w = ridge_solve(zs, os, (p, d), reg)?;
    Ok(DecoderParams::from_weights(&w, p - 1 - d))
}

/// Recursive least squares over the same objective as [`ftl_update`].
///
/// Maintains `P = (Z'Z + reg I)^-1` by rank-one Sherman-Morrison updates, so
/// the weights match the batch follow-the-leader solve at every point.
#[derive(Debug, Clone, PartialEq)]
pub struct RlsState<T: Scalar> {
    p: DMatrix<T>,
    w: DMatrix<T>,
}

impl<T: Scalar> RlsState<T> {
    /// `P = (1/reg) I`, `W = 0`, for covariate dimension `p_dim` and action
    /// dimension `d_dof`. Requires `reg > 0`.
    pub fn new(p_dim: usize, d_dof: usize, reg: T) -> Result<Self> {
        if reg <= T::zero() {
            return Err(Error::InvalidConfig(
                "RLS initialization requires positive regularization".into(),
            ));
        }
        Ok(Self {
            p: DMatrix::identity(p_dim, p_dim) / reg,
            w: DMatrix::zeros(d_dof, p_dim),
        })
    }

    /// Rebuilds the state from an aggregated dataset by one exact solve; the
    /// recovery path after a numerical breakdown.
    pub fn resolve_from(
        dataset: &AggregatedDataset<T>,
        dims: (usize, usize),
        reg: T,
    ) -> Result<Self> {
        if reg <= T::zero() {
            return Err(Error::InvalidConfig(
                "RLS initialization requires positive regularization".into(),
            ));
        }
        let (p_dim, d) = dims;
        let mut gram = DMatrix::<T>::identity(p_dim, p_dim) * reg;
        let (zs, os) = dataset.all_pairs();
        for z in zs {
            gram.syger(T::one(), z, z, T::one());
        }
        for i in 0..p_dim {
            for j in (i + 1)..p_dim {
                gram[(i, j)] = gram[(j, i)];
            }
        }
        let chol = Cholesky::new(gram).ok_or(Error::RlsBreakdown)?;
        let p = chol.inverse();
        let w = ridge_solve(zs, os, (p_dim, d), reg)?;
        Ok(Self { p, w })
    }

    pub fn weights(&self) -> &DMatrix<T> {
        &self.w
    }

    /// Unpacks the weights into decoder blocks.
    pub fn params(&self, n_neurons: usize) -> DecoderParams<T> {
        DecoderParams::from_weights(&self.w, n_neurons)
    }

    /// Absorbs one pair with a rank-one update.
    pub fn absorb(&mut self, z: &DVector<T>, o: &DVector<T>) -> Result<()> {
        let pz = &self.p * z;
        let denom = T::one() + z.dot(&pz);
        if !denom.is_finite() || denom <= T::zero() {
            return Err(Error::RlsBreakdown);
        }
        let gain = &pz * (T::one() / denom);
        let err = o - &self.w * z;
        self.w.ger(T::one(), &err, &gain, T::one()); // W += err gain'
        self.p.ger(-T::one(), &gain, &pz, T::one()); // P -= gain (Pz)'
        // Symmetrize to keep rounding drift from accumulating.
        let half = real::<T>(0.5);
        for i in 0..self.p.nrows() {
            for j in (i + 1)..self.p.ncols() {
                let avg = (self.p[(i, j)] + self.p[(j, i)]) * half;
                self.p[(i, j)] = avg;
                self.p[(j, i)] = avg;
            }
        }
        if self.p.iter().any(|x| !x.is_finite()) || self.w.iter().any(|x| !x.is_finite()) {
            return Err(Error::RlsBreakdown);
        }
        Ok(())
    }

    /// Absorbs a slice of pairs in order.
    pub fn absorb_all(&mut self, zs: &[DVector<T>], os: &[DVector<T>]) -> Result<()> {
        for (z, o) in zs.iter().zip(os) {
            self.absorb(z, o)?;
        }
        Ok(())
    }
}

/// Cumulative loss, hindsight loss, and their difference.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretReport<T: Scalar> {
    pub cumulative_loss: T,
    pub hindsight_loss: T,
    pub regret: T,
    /// Average regret: regret divided by the number of reaches.
    pub gamma_k: T,
    pub per_reach_loss: Vec<T>,
}

/// Empirical regret of an executed loss sequence against the best fixed
/// decoder in hindsight (a ridge refit on the realized dataset).
///
/// `per_reach_losses[k-1]` must sum the executed per-step losses of reach
/// `k`, aligned with the dataset's reach slices.
pub fn regret<T: Scalar>(
    per_reach_losses: &[T],
    dataset: &AggregatedDataset<T>,
    dims: (usize, usize),
    reg: T,
) -> Result<RegretReport<T>> {
    assert_eq!(
        per_reach_losses.len(),
        dataset.n_reaches(),
        "one executed loss total per reach"
    );
    let (zs, os) = dataset.all_pairs();
    let hindsight = ridge_solve(zs, os, dims, reg)?;
    let mut hindsight_loss = T::zero();
    for (z, o) in zs.iter().zip(os) {
        hindsight_loss += loss_w(&hindsight, z, o);
    }
    let cumulative_loss = per_reach_losses.iter().fold(T::zero(), |a, &b| a + b);
    let regret = cumulative_loss - hindsight_loss;
    let k = dataset.n_reaches().max(1);
    Ok(RegretReport {
        cumulative_loss,
        hindsight_loss,
        regret,
        gamma_k: regret / real_of_usize::<T>(k),
        per_reach_loss: per_reach_losses.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{standard_normal, stream, Purpose};
    use approx::assert_relative_eq;

    fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
        stream(seed, 0, 0, 0, Purpose::Stream)
    }

    fn vec1(x: f64) -> DVector<f64> {
        DVector::from_row_slice(&[x])
    }

    fn dataset_1d(pairs: &[(f64, f64)]) -> AggregatedDataset<f64> {
        let mut d = AggregatedDataset::new();
        d.append_reach(
            pairs
                .iter()
                .map(|&(z, o)| (vec1(z), vec1(o)))
                .collect::<Vec<_>>(),
        );
        d
    }

    #[test]
    fn loss_examples() {
        let w = DMatrix::from_row_slice(1, 1, &[0.5]);
        assert_eq!(loss_w(&w, &vec1(2.0), &vec1(1.0)), 0.0);
        assert_eq!(loss_w(&w, &vec1(2.0), &vec1(3.0)), 4.0);

        // Quadratic homogeneity at W = 0.
        let zero = DMatrix::from_row_slice(1, 1, &[0.0]);
        let base = loss_w(&zero, &vec1(1.5), &vec1(0.7));
        let scaled = loss_w(&zero, &vec1(1.5), &vec1(1.4));
        assert_relative_eq!(scaled, 4.0 * base, epsilon = 1e-12);
    }

    #[test]
    fn ogd_stationary_point_is_fixed() {
        let w = DMatrix::from_row_slice(1, 1, &[1.0]); // fits (1, 1) exactly
        let zs = [vec1(1.0)];
        let os = [vec1(1.0)];
        let next = ogd_step_w(&w, 0.1, 0.0, (&zs, &os), 1).unwrap();
        assert_eq!(next, w);
    }

    #[test]
    fn ogd_hand_computed_step() {
        // 1-D: w=0, z=1, o=1, step 0.1 -> w' = 0 - 0.1*(-2) = 0.2.
        let w = DMatrix::from_row_slice(1, 1, &[0.0]);
        let zs = [vec1(1.0)];
        let os = [vec1(1.0)];
        let next = ogd_step_w(&w, 0.1, 0.0, (&zs, &os), 1).unwrap();
        assert_relative_eq!(next[(0, 0)], 0.2, epsilon = 1e-15);
    }

    #[test]
    fn ogd_gradient_matches_finite_differences() {
        let mut r = rng(3);
        for _ in 0..20 {
            let w = DMatrix::from_fn(2, 4, |_, _| standard_normal::<f64, _>(&mut r));
            let zs: Vec<_> = (0..6)
                .map(|_| DVector::from_fn(4, |_, _| standard_normal::<f64, _>(&mut r)))
                .collect();
            let os: Vec<_> = (0..6)
                .map(|_| DVector::from_fn(2, |_, _| standard_normal::<f64, _>(&mut r)))
                .collect();
            let reg_pu = 0.05;
            let total = |wm: &DMatrix<f64>| -> f64 {
                let fit: f64 = zs.iter().zip(&os).map(|(z, o)| loss_w(wm, z, o)).sum();
                fit + reg_pu * wm.norm_squared()
            };
            // With eta0 = 1 and k = 1 the step is exactly the gradient.
            let next = ogd_step_w(&w, 1.0, reg_pu, (&zs, &os), 1).unwrap();
            let grad_analytic = &w - next;
            let h = 1e-6;
            for i in 0..2 {
                for j in 0..4 {
                    let mut wp = w.clone();
                    let mut wm = w.clone();
                    wp[(i, j)] += h;
                    wm[(i, j)] -= h;
                    let fd = (total(&wp) - total(&wm)) / (2.0 * h);
                    let rel = (grad_analytic[(i, j)] - fd).abs() / fd.abs().max(1e-9);
                    assert!(rel < 1e-6, "grad mismatch {} vs {}", grad_analytic[(i, j)], fd);
                }
            }
        }
    }

    #[test]
    fn ogd_detects_divergence() {
        let w = DMatrix::from_row_slice(1, 1, &[f64::MAX]);
        let zs = [vec1(f64::MAX)];
        let os = [vec1(0.0)];
        let err = ogd_step_w(&w, 1.0, 0.0, (&zs, &os), 1).unwrap_err();
        assert_eq!(err, Error::Divergence);
    }

    #[test]
    fn ma_lambda_endpoints() {
        let w = DMatrix::from_row_slice(1, 1, &[0.7]);
        let zs = [vec1(1.0), vec1(2.0)];
        let os = [vec1(1.0), vec1(2.0)];

        let unchanged = ma_step_w(&w, 0.0, 1.0, (&zs, &os)).unwrap();
        assert_eq!(unchanged, w);

        // lambda = 1 equals the single-reach ridge solution.
        let full = ma_step_w(&w, 1.0, 1.0, (&zs, &os)).unwrap();
        let ridge = ridge_solve(&zs, &os, (1, 1), 1.0).unwrap();
        assert_relative_eq!(full, ridge, epsilon = 1e-14);
    }

    #[test]
    fn ma_midpoint_from_zero() {
        // W = 0, lambda = 0.5: W' = W*/2 with w* = (1 + 4) / (1 + 4 + 1).
        let w = DMatrix::zeros(1, 1);
        let zs = [vec1(1.0), vec1(2.0)];
        let os = [vec1(1.0), vec1(2.0)];
        let next = ma_step_w(&w, 0.5, 1.0, (&zs, &os)).unwrap();
        assert_relative_eq!(next[(0, 0)], 5.0 / 12.0, epsilon = 1e-12);
    }

    #[test]
    fn ftl_empty_dataset_is_zero() {
        let ds = AggregatedDataset::<f64>::new();
        let params = ftl_update(&ds, (4, 1), 0.5).unwrap();
        assert_eq!(params.to_weights(), DMatrix::zeros(1, 4));
    }

    #[test]
    fn ftl_hand_solved_ridge() {
        let ds = dataset_1d(&[(1.0, 1.0), (2.0, 2.0)]);
        let (zs, os) = ds.all_pairs();
        let w = ridge_solve(zs, os, (1, 1), 1.0).unwrap();
        assert_relative_eq!(w[(0, 0)], 5.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn ftl_recovers_realizable_map() {
        let mut r = rng(7);
        let w_star = DMatrix::from_fn(2, 5, |_, _| standard_normal::<f64, _>(&mut r));
        let zs: Vec<_> = (0..40)
            .map(|_| DVector::from_fn(5, |_, _| standard_normal::<f64, _>(&mut r)))
            .collect();
        let os: Vec<_> = zs.iter().map(|z| &w_star * z).collect();
        let fit = ridge_solve(&zs, &os, (5, 2), 1e-10).unwrap();
        let rel = (fit - &w_star).norm() / w_star.norm();
        assert!(rel < 1e-6, "relative error {rel}");
    }

    #[test]
    fn rank_deficient_without_reg_errors() {
        let z = DVector::from_row_slice(&[1.0, 0.0]);
        let zs = [z.clone(), z];
        let os = [vec1(1.0), vec1(1.0)];
        let err = ridge_solve(&zs, &os, (2, 1), 0.0).unwrap_err();
        assert_eq!(err, Error::RankDeficient);
    }

    #[test]
    fn ftl_training_loss_is_monotone_best() {
        // FTL's refit on the aggregate must beat every earlier weight matrix
        // on that same aggregate (up to the tiny reg bias).
        let mut r = rng(11);
        let mut ds = AggregatedDataset::new();
        let mut produced: Vec<DMatrix<f64>> = vec![DMatrix::zeros(1, 4)];
        for _ in 0..5 {
            let pairs: Vec<_> = (0..8)
                .map(|_| {
                    let z = DVector::from_fn(4, |_, _| standard_normal::<f64, _>(&mut r));
                    let o = vec1(z[0] - 0.5 * z[3] + 0.1 * standard_normal::<f64, _>(&mut r));
                    (z, o)
                })
                .collect();
            ds.append_reach(pairs);
            let (zs, os) = ds.all_pairs();
            let w_ftl = ridge_solve(zs, os, (4, 1), 1e-6).unwrap();
            let mean_loss = |w: &DMatrix<f64>| -> f64 {
                zs.iter().zip(os).map(|(z, o)| loss_w(w, z, o)).sum::<f64>() / ds.len() as f64
            };
            let ftl_loss = mean_loss(&w_ftl);
            for earlier in &produced {
                assert!(ftl_loss <= mean_loss(earlier) + 1e-9);
            }
            produced.push(w_ftl);
        }
    }

    #[test]
    fn rls_single_pair_matches_closed_form() {
        let mut rls = RlsState::<f64>::new(1, 1, 2.0).unwrap();
        rls.absorb(&vec1(3.0), &vec1(6.0)).unwrap();
        // w = z o / (z^2 + reg) = 18 / 11.
        assert_relative_eq!(rls.weights()[(0, 0)], 18.0 / 11.0, epsilon = 1e-12);
    }

    #[test]
    fn rls_matches_batch_on_three_pairs() {
        let pairs = [(1.0, 1.0), (2.0, 1.5), (-0.5, 0.2)];
        let mut rls = RlsState::<f64>::new(1, 1, 0.7).unwrap();
        let ds = dataset_1d(&pairs);
        let (zs, os) = ds.all_pairs();
        rls.absorb_all(zs, os).unwrap();
        let batch = ridge_solve(zs, os, (1, 1), 0.7).unwrap();
        let rel = (rls.weights() - &batch).norm() / batch.norm();
        assert!(rel < 1e-6);
    }

    #[test]
    fn rls_drift_stays_small_at_scale() {
        // 10^4 pairs at arm dimensions: drift vs the batch solve <= 1e-4.
        let mut r = rng(13);
        let (n, d) = (75, 26);
        let p_dim = n + 1 + d;
        let reg = 1e-3 * p_dim as f64;
        let mut rls = RlsState::<f64>::new(p_dim, d, reg).unwrap();
        let w_true = DMatrix::from_fn(d, p_dim, |_, _| 0.3 * standard_normal::<f64, _>(&mut r));
        let mut zs = Vec::with_capacity(10_000);
        let mut os = Vec::with_capacity(10_000);
        for _ in 0..10_000 {
            let mut z = DVector::from_fn(p_dim, |_, _| standard_normal::<f64, _>(&mut r));
            z[n] = 1.0;
            let o =
                &w_true * &z + DVector::from_fn(d, |_, _| 0.5 * standard_normal::<f64, _>(&mut r));
            zs.push(z);
            os.push(o);
        }
        rls.absorb_all(&zs, &os).unwrap();
        let batch = ridge_solve(&zs, &os, (p_dim, d), reg).unwrap();
        let rel = (rls.weights() - &batch).norm() / batch.norm();
        assert!(rel < 1e-4, "drift {rel}");
    }

    #[test]
    fn rls_flags_non_finite_input() {
        let mut rls = RlsState::<f64>::new(1, 1, 1.0).unwrap();
        let err = rls.absorb(&vec1(f64::INFINITY), &vec1(0.0)).unwrap_err();
        assert_eq!(err, Error::RlsBreakdown);
    }

    #[test]
    fn rls_resolve_matches_incremental() {
        let pairs = [(1.0, 1.0), (2.0, 1.5), (-0.5, 0.2)];
        let ds = dataset_1d(&pairs);
        let mut inc = RlsState::<f64>::new(1, 1, 0.7).unwrap();
        let (zs, os) = ds.all_pairs();
        inc.absorb_all(zs, os).unwrap();
        let re = RlsState::resolve_from(&ds, (1, 1), 0.7).unwrap();
        assert_relative_eq!(inc.weights(), re.weights(), epsilon = 1e-10);
        assert_relative_eq!(inc.p, re.p, epsilon = 1e-10);
    }

    #[test]
    fn regret_zero_when_executing_hindsight_policy() {
        let ds = dataset_1d(&[(1.0, 0.9), (2.0, 2.1), (0.5, 0.4)]);
        let (zs, os) = ds.all_pairs();
        let hindsight = ridge_solve(zs, os, (1, 1), 0.0).unwrap();
        let executed: f64 = zs.iter().zip(os).map(|(z, o)| loss_w(&hindsight, z, o)).sum();
        let report = regret(&[executed], &ds, (1, 1), 0.0).unwrap();
        assert!(report.regret.abs() < 1e-9);
        assert_relative_eq!(report.gamma_k, report.regret, epsilon = 1e-15);
    }

    #[test]
    fn regret_matches_grid_search_on_tiny_stream() {
        // K = 3 reaches of T = 2 steps, 1-D; hindsight from brute-force grid.
        let reaches = [
            [(1.0, 0.8), (0.5, 0.6)],
            [(-1.2, -1.0), (0.3, 0.1)],
            [(2.0, 1.7), (-0.4, -0.5)],
        ];
        let mut ds = AggregatedDataset::new();
        let mut per_reach = Vec::new();
        let w_exec = 0.4; // fixed executed policy
        for reach in &reaches {
            ds.append_reach(
                reach
                    .iter()
                    .map(|&(z, o)| (vec1(z), vec1(o)))
                    .collect::<Vec<_>>(),
            );
            per_reach.push(
                reach
                    .iter()
                    .map(|&(z, o)| (w_exec * z - o) * (w_exec * z - o))
                    .sum::<f64>(),
            );
        }
        let report = regret(&per_reach, &ds, (1, 1), 0.0).unwrap();

        let mut best = f64::INFINITY;
        let mut w = -5.0;
        while w <= 5.0 {
            let total: f64 = reaches
                .iter()
                .flatten()
                .map(|&(z, o)| (w * z - o) * (w * z - o))
                .sum();
            if total < best {
                best = total;
            }
            w += 1e-4;
        }
        let expected = per_reach.iter().sum::<f64>() - best;
        assert!((report.regret - expected).abs() < 1e-3);
        assert!(report.regret >= -1e-9);
    }
}
