//! Collision (order-2 Renyi) entropy of run-length encoded processes.
//!
//! The encoded image of a Bernoulli or Markov source is itself a Markov
//! chain on (symbol, run length) pairs. Its collision entropy controls the
//! growth rate of longest matches between independent encoded sequences and
//! is computed here by four routes of decreasing exactness:
//!
//! 1. closed forms for binary i.i.d. and two-state chains,
//! 2. the Perron root of an N x N reduction of the squared transition
//!    kernel, exact up to the eigensolve,
//! 3. a truncated oracle that diagonalizes the literal (N * cap)^2 kernel
//!    matrix with run lengths capped, converging to route 2 from above,
//! 4. a plug-in estimator from sampled encoded prefixes.
//!
//! All values are in nats.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::codec::{Run, RunSequence};
use crate::error::{Error, Result};
use crate::process::{sample_rle_prefix, MarkovSpec, Source};

/// Stop when successive Rayleigh quotients agree to this tolerance.
const RAYLEIGH_TOL: f64 = 1e-13;
const MAX_POWER_ITERS: usize = 200_000;
/// Dense truncated-oracle matrices are limited to this dimension.
const MAX_TRUNCATED_DIM: usize = 4096;
/// Raw symbols allowed per sampled prefix before giving up.
const SAMPLE_RAW_CAP_PER_RUN: usize = 1_000_000;

/// How an entropy value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    ClosedForm,
    Eigenvalue,
    TruncatedOracle,
    Plugin,
}

/// Method-specific byproducts, omitted from JSON when absent.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation_cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collision_frequency: Option<f64>,
}

/// An entropy value in nats, tagged with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub value: f64,
    pub kind: EstimateKind,
    pub order: u32,
    pub diagnostics: Diagnostics,
}

impl EntropyEstimate {
    fn exact(value: f64) -> Self {
        EntropyEstimate {
            value,
            kind: EstimateKind::ClosedForm,
            order: 2,
            diagnostics: Diagnostics::default(),
        }
    }
}

fn check_open_unit(value: f64, name: &str) -> Result<()> {
    if value.is_finite() && value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} = {value} must lie strictly in (0, 1)"
        )))
    }
}

/// Collision entropy of the encoded binary i.i.d. source with symbol
/// probabilities `p` and `1 - p`:
///
/// `-1/2 * log( p(1-p) / ((1+p)(2-p)) )`
///
/// Symmetric in `p <-> 1 - p`; equals `log 3` at `p = 1/2`.
pub fn h2_rle_bernoulli(p: f64) -> Result<EntropyEstimate> {
    check_open_unit(p, "p")?;
    let ratio = (p * (1.0 - p)) / ((1.0 + p) * (2.0 - p));
    Ok(EntropyEstimate::exact(-0.5 * ratio.ln()))
}

/// Collision entropy of the encoded two-state chain with self-transition
/// probabilities `p` and `q`:
///
/// `-1/2 * log( (1-p)(1-q) / ((1+p)(1+q)) )`
///
/// Setting `q = 1 - p` recovers [`h2_rle_bernoulli`], since that chain is the
/// binary i.i.d. source in disguise.
pub fn h2_rle_markov2(p: f64, q: f64) -> Result<EntropyEstimate> {
    check_open_unit(p, "p")?;
    check_open_unit(q, "q")?;
    let ratio = ((1.0 - p) * (1.0 - q)) / ((1.0 + p) * (1.0 + q));
    Ok(EntropyEstimate::exact(-0.5 * ratio.ln()))
}

/// The encoded process of a Markov source, as a Markov chain on
/// (state index, run length) pairs.
///
/// Transition probabilities do not depend on the incoming run length, which
/// is what makes the N x N reduction exact: eigenvectors of the squared
/// kernel can be taken constant in the length coordinate, collapsing each
/// geometric family of columns into the closed-form factor
/// `1 / (1 - p_jj^2)`.
#[derive(Debug, Clone)]
pub struct EncodedChainModel {
    base: MarkovSpec,
    reduced: Vec<Vec<f64>>,
}

impl EncodedChainModel {
    pub fn base(&self) -> &MarkovSpec {
        &self.base
    }

    /// Transition probability from run `(i, k)` to run `(j, l)`. Zero for
    /// `i == j` (adjacent runs differ) and independent of `k`.
    pub fn kernel(&self, from: (usize, u64), to: (usize, u64)) -> f64 {
        let (i, _k) = from;
        let (j, l) = to;
        if i == j {
            return 0.0;
        }
        let t = self.base.transition();
        let p_jj = t[j][j];
        t[i][j] * p_jj.powi((l - 1) as i32) * (1.0 - p_jj) / (1.0 - t[i][i])
    }

    /// Stationary probability of starting in run `(i, k)`:
    /// `mu_i * p_ii^(k-1) * (1 - p_ii)`.
    pub fn initial(&self, state: (usize, u64)) -> f64 {
        let (i, k) = state;
        let p_ii = self.base.transition()[i][i];
        self.base.stationary()[i] * p_ii.powi((k - 1) as i32) * (1.0 - p_ii)
    }

    /// The N x N reduction of the squared kernel: summing the geometric run
    /// length coordinate out of `kernel^2` leaves
    /// `R[i][j] = (p_ij (1-p_jj) / (1-p_ii))^2 / (1 - p_jj^2)` off the
    /// diagonal and zero on it. Its Perron root is that of the full squared
    /// kernel.
    pub fn reduced(&self) -> &[Vec<f64>] {
        &self.reduced
    }
}

/// Builds the encoded-chain model. Requires every transition entry strictly
/// inside (0, 1): zeros break the positivity the Perron theory rests on, and
/// a unit diagonal entry would make runs non-terminating.
pub fn build_encoded_chain(spec: &MarkovSpec) -> Result<EncodedChainModel> {
    let n = spec.n_states();
    let t = spec.transition();
    for (i, row) in t.iter().enumerate() {
        for (j, &p_ij) in row.iter().enumerate() {
            if !(p_ij > 0.0 && p_ij < 1.0) {
                return Err(Error::Domain(format!(
                    "transition[{i}][{j}] = {p_ij} must lie strictly in (0, 1) for the encoded chain"
                )));
            }
        }
    }
    // Kernel rows sum to sum_{j != i} p_ij / (1 - p_ii); verify the analytic
    // identity against the spec's row sums.
    for (i, row) in t.iter().enumerate() {
        let off: f64 = row
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &p)| p)
            .sum();
        if (off - (1.0 - row[i])).abs() > 1e-9 {
            return Err(Error::Numerical(format!(
                "kernel row {i} fails to normalize: off-diagonal mass {off} vs {}",
                1.0 - row[i]
            )));
        }
    }
    let mut reduced = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let amp = t[i][j] * (1.0 - t[j][j]) / (1.0 - t[i][i]);
            reduced[i][j] = amp * amp / (1.0 - t[j][j] * t[j][j]);
        }
    }
    Ok(EncodedChainModel { base: spec.clone(), reduced })
}

/// Dominant eigenvalue of a nonnegative matrix by power iteration.
///
/// Iterates on `M + I`: several matrices here are periodic (the two-state
/// reduction is antidiagonal), where plain iteration oscillates forever. The
/// shift leaves eigenvectors untouched, moves the dominant eigenvalue to
/// `1 + lambda` where it strictly dominates, and costs one subtraction at
/// the end.
fn perron_root(matrix: &[Vec<f64>], tol: f64, max_iters: usize) -> Result<(f64, usize)> {
    let n = matrix.len();
    if n == 0 {
        return Err(Error::Domain("empty matrix has no Perron root".into()));
    }
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut w = vec![0.0f64; n];
    let mut lambda_prev = f64::NAN;
    for iter in 1..=max_iters {
        for (i, row) in matrix.iter().enumerate() {
            let mut acc = v[i]; // the +I shift
            for (x, y) in row.iter().zip(&v) {
                acc += x * y;
            }
            w[i] = acc;
        }
        let vv: f64 = v.iter().map(|x| x * x).sum();
        let vw: f64 = v.iter().zip(&w).map(|(x, y)| x * y).sum();
        let lambda = vw / vv - 1.0;
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Numerical(
                "power iteration collapsed to the zero vector".into(),
            ));
        }
        for (dst, src) in v.iter_mut().zip(&w) {
            *dst = *src / norm;
        }
        if (lambda - lambda_prev).abs() < tol {
            return Ok((lambda, iter));
        }
        lambda_prev = lambda;
    }
    Err(Error::Numerical(format!(
        "power iteration did not converge within {max_iters} iterations"
    )))
}

/// Collision entropy of the encoded chain of an N-state Markov source, via
/// the Perron root of the exact N x N reduction.
///
/// Agrees with [`h2_rle_markov2`] for two states and is always positive:
/// the squared kernel has row sums strictly below 1.
pub fn h2_rle_markov_n(spec: &MarkovSpec) -> Result<EntropyEstimate> {
    let model = build_encoded_chain(spec)?;
    let (lambda, iterations) = perron_root(model.reduced(), RAYLEIGH_TOL, MAX_POWER_ITERS)?;
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Numerical(format!(
            "reduced kernel produced Perron root {lambda} outside (0, 1)"
        )));
    }
    Ok(EntropyEstimate {
        value: -lambda.ln(),
        kind: EstimateKind::Eigenvalue,
        order: 2,
        diagnostics: Diagnostics { iterations: Some(iterations), ..Default::default() },
    })
}

/// Brute-force oracle for [`h2_rle_markov_n`]: diagonalizes the literal
/// squared kernel with run lengths capped at `cap`.
///
/// The matrix is the principal submatrix of the infinite squared kernel on
/// states `(i, k)`, `k <= cap`; its Perron root grows with `cap`, so the
/// returned value decreases monotonically toward the reduction's value. The
/// truncation floor is of order `max_j p_jj^(2 cap)`.
pub fn h2_rle_truncated(spec: &MarkovSpec, cap: usize) -> Result<EntropyEstimate> {
    if cap == 0 {
        return Err(Error::Domain("truncation cap must be at least 1".into()));
    }
    let model = build_encoded_chain(spec)?;
    let n = spec.n_states();
    let dim = n
        .checked_mul(cap)
        .filter(|&d| d <= MAX_TRUNCATED_DIM)
        .ok_or_else(|| {
            Error::Range(format!(
                "truncated matrix dimension {n} * {cap} exceeds the dense limit {MAX_TRUNCATED_DIM}"
            ))
        })?;
    let mut matrix = vec![vec![0.0f64; dim]; dim];
    for i in 0..n {
        // Rows are independent of the incoming run length: compute the
        // block row once and copy it across all k.
        let mut row = vec![0.0f64; dim];
        for j in 0..n {
            if j == i {
                continue;
            }
            for l in 1..=cap {
                let q = model.kernel((i, 1), (j, l as u64));
                row[j * cap + (l - 1)] = q * q;
            }
        }
        for k in 0..cap {
            matrix[i * cap + k] = row.clone();
        }
    }
    let (lambda, iterations) = perron_root(&matrix, RAYLEIGH_TOL, MAX_POWER_ITERS)?;
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::Numerical(format!(
            "truncated kernel at cap {cap} is degenerate (dominant eigenvalue {lambda})"
        )));
    }
    Ok(EntropyEstimate {
        value: -lambda.ln(),
        kind: EstimateKind::TruncatedOracle,
        order: 2,
        diagnostics: Diagnostics {
            iterations: Some(iterations),
            truncation_cap: Some(cap),
            ..Default::default()
        },
    })
}

/// Exact sum of squared probabilities of length-`m` encoded cylinders for
/// the binary i.i.d. source with parameter `p`, for even `m`:
///
/// `(p^2 + q^2) * ( p^2 q^2 / ((1-p^2)(1-q^2)) )^(m/2)`, `q = 1 - p`.
///
/// Runs under a binary alphabet alternate strictly, so a length-`m` cylinder
/// has `m/2` runs of each symbol regardless of which symbol starts; odd `m`
/// splits the geometric sums asymmetrically and is not implemented.
/// `-log(value) / m` converges to the collision entropy from above.
pub fn bernoulli_cylinder_sum_exact(p: f64, m: usize) -> Result<f64> {
    check_open_unit(p, "p")?;
    if m < 2 {
        return Err(Error::Domain(format!("cylinder length m = {m} must be at least 2")));
    }
    if !m.is_multiple_of(2) {
        return Err(Error::Unsupported(format!(
            "odd cylinder length m = {m}: the closed form requires equal run counts per symbol"
        )));
    }
    let q = 1.0 - p;
    let a = p * p / (1.0 - p * p);
    let b = q * q / (1.0 - q * q);
    Ok((p * p + q * q) * (a * b).powi((m / 2) as i32))
}

/// Fraction of ordered `order`-tuples of samples whose first `m` runs all
/// coincide: the unbiased U-statistic estimate of the `order`-th collision
/// sum over length-`m` encoded cylinders.
pub fn collision_frequency(prefixes: &[RunSequence], m: usize, order: u32) -> Result<f64> {
    if order < 2 {
        return Err(Error::Domain(format!("order {order} must be at least 2")));
    }
    if m == 0 {
        return Err(Error::Domain("prefix length m must be at least 1".into()));
    }
    let k = order as usize;
    if prefixes.len() < k {
        return Err(Error::Validation(format!(
            "{} samples cannot form {k}-tuples; need at least {k}",
            prefixes.len()
        )));
    }
    for (idx, prefix) in prefixes.iter().enumerate() {
        if prefix.len() < m {
            return Err(Error::Validation(format!(
                "sample {idx} has only {} runs, need {m}",
                prefix.len()
            )));
        }
    }
    let mut counts: HashMap<&[Run], u64> = HashMap::new();
    for prefix in prefixes {
        *counts.entry(&prefix.runs()[..m]).or_insert(0) += 1;
    }
    let falling = |x: f64| -> f64 { (0..k).map(|i| x - i as f64).product() };
    let numerator: f64 = counts.values().map(|&c| falling(c as f64)).sum();
    Ok(numerator / falling(prefixes.len() as f64))
}

/// Plug-in Renyi entropy estimate from sampled encoded prefixes:
/// `-log(U) / ((order - 1) * m)` with `U` the collision frequency.
///
/// Identical samples give exactly zero; no collisions at all make the
/// estimate undefined and surface as [`Error::ZeroCollisions`].
pub fn renyi_plugin_estimate(
    prefixes: &[RunSequence],
    m: usize,
    order: u32,
) -> Result<EntropyEstimate> {
    let u = collision_frequency(prefixes, m, order)?;
    if u == 0.0 {
        return Err(Error::ZeroCollisions { samples: prefixes.len(), prefix_len: m });
    }
    let value = -u.ln() / (f64::from(order - 1) * m as f64);
    Ok(EntropyEstimate {
        value,
        kind: EstimateKind::Plugin,
        order,
        diagnostics: Diagnostics {
            samples: Some(prefixes.len()),
            collision_frequency: Some(u),
            ..Default::default()
        },
    })
}

/// Draws `count` independent encoded prefixes of `m` settled runs each.
/// Sample `s` reads stream `s` of `seed`, so the result does not depend on
/// scheduling and any prefix can be regenerated in isolation.
pub fn sample_rle_prefixes(
    source: &Source,
    m: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<RunSequence>> {
    let max_raw = m.saturating_add(1).saturating_mul(SAMPLE_RAW_CAP_PER_RUN);
    (0..count)
        .into_par_iter()
        .map(|s| sample_rle_prefix(source, m, seed, s as u64, max_raw))
        .collect()
}
