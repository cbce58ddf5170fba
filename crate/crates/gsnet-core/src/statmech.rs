//! Fidelity `F = 2^-N Σ_x <K_x>` and its decay rate, by enumeration,
//! ring transfer matrices, Monte Carlo, first-order expansion and mean field.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::RngCore;
use serde::Serialize;

use crate::correlators::{LeafRule, Model, Purification, RingVariant, Scalar};
use crate::error::{Error, Result};
use crate::noise::{theta, NoiseModel, Semantics};
use crate::par::{block_sum, task_rng, Execution};

/// Largest `N` handled by full enumeration.
pub const MAX_EXACT_N: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    TransferMatrix,
    MonteCarlo,
    GeneratingFunction,
    FirstOrder,
    MeanField,
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayResult {
    pub n: usize,
    /// Absent when it underflows `f64`.
    pub fidelity: Option<f64>,
    /// `-ln F / N`.
    pub beta_f: f64,
    /// `beta_f / β`; absent at `β = 0`.
    pub f: Option<f64>,
    pub method: Method,
    pub stderr: Option<f64>,
    pub n_samples: Option<u64>,
}

impl DecayResult {
    pub fn from_log_fidelity(n: usize, ln_f: f64, beta: f64, method: Method) -> Self {
        let fidelity = Some(ln_f.exp()).filter(|&f| f > 0.0);
        // + 0.0 turns -0.0 into 0.0
        let beta_f = -ln_f / n as f64 + 0.0;
        DecayResult {
            n,
            fidelity,
            beta_f,
            f: (beta > 0.0).then(|| beta_f / beta),
            method,
            stderr: None,
            n_samples: None,
        }
    }

    pub fn from_fidelity(n: usize, fidelity: f64, beta: f64, method: Method) -> Self {
        DecayResult { fidelity: Some(fidelity), ..Self::from_log_fidelity(n, fidelity.ln(), beta, method) }
    }
}

fn words_of(x: u64) -> [u64; 1] {
    [x]
}

/// Exact average over all `2^N` configurations.
pub fn fidelity_exact(model: &Model, noise: &NoiseModel) -> Result<DecayResult> {
    fidelity_exact_with(model, noise, Execution::default())
}

pub fn fidelity_exact_with(model: &Model, noise: &NoiseModel, exec: Execution) -> Result<DecayResult> {
    let n = model.n();
    if n > MAX_EXACT_N {
        return Err(Error::SizeLimit(format!("exact enumeration needs N <= {MAX_EXACT_N}, got {n}; use Monte Carlo")));
    }
    let total = 1u64 << n;
    let (sum, _) = block_sum(exec, total, |x| model.correlator_words(&words_of(x), noise));
    Ok(DecayResult::from_fidelity(n, sum / total as f64, noise.beta(), Method::Exact))
}

/// Uniform sampling of `x`; block `b` draws from stream `b` of `seed`.
pub fn mc_fidelity(model: &Model, noise: &NoiseModel, n_samples: u64, seed: u64) -> Result<DecayResult> {
    mc_fidelity_with(model, noise, n_samples, seed, Execution::default())
}

pub fn mc_fidelity_with(
    model: &Model,
    noise: &NoiseModel,
    n_samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<DecayResult> {
    if n_samples < 2 {
        return Err(Error::Parameter(format!("need at least 2 samples, got {n_samples}")));
    }
    let n = model.n();
    let n_words = n.div_ceil(64).max(1);
    let tail = if n.is_multiple_of(64) { u64::MAX } else { (1u64 << (n % 64)) - 1 };
    let parts = crate::par::blocks(exec, n_samples, |b, range| {
        let mut rng = task_rng(seed, b);
        let mut x = vec![0u64; n_words];
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in range {
            for w in x.iter_mut() {
                *w = rng.next_u64();
            }
            x[n_words - 1] &= tail;
            let v = model.correlator_words(&x, noise);
            s += v;
            s2 += v * v;
        }
        (s, s2)
    });
    let (s, s2) = parts.into_iter().fold((0.0, 0.0), |(a, b), (s, s2)| (a + s, b + s2));
    let m = n_samples as f64;
    let mean = s / m;
    let var = ((s2 - m * mean * mean) / (m - 1.0)).max(0.0);
    let mut r = DecayResult::from_fidelity(n, mean, noise.beta(), Method::MonteCarlo);
    r.stderr = Some((var / m).sqrt());
    r.n_samples = Some(n_samples);
    Ok(r)
}

/// `E_x[H(x)] / N`, exact.
pub fn first_order_decay(model: &Model) -> Result<BigRational> {
    model.first_order_decay()
}

// ---------------------------------------------------------------------------
// Transfer matrices

type Matrix = Vec<Vec<f64>>;

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let d = a.len();
    let mut c = vec![vec![0.0; d]; d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i][k];
            if aik != 0.0 {
                for j in 0..d {
                    c[i][j] += aik * b[k][j];
                }
            }
        }
    }
    c
}

/// `(ln scale, M)` with `T^e = scale · M` and `max |M| = 1`.
fn scaled_power(t: &Matrix, mut e: usize) -> (f64, Matrix) {
    let d = t.len();
    let normalize = |m: &mut Matrix| -> f64 {
        let top = m.iter().flatten().fold(0.0f64, |a, &v| a.max(v.abs()));
        if top > 0.0 {
            m.iter_mut().flatten().for_each(|v| *v /= top);
            top.ln()
        } else {
            0.0
        }
    };
    let mut result: Matrix = (0..d).map(|i| (0..d).map(|j| f64::from(i == j)).collect()).collect();
    let mut log_result = 0.0;
    let mut base = t.clone();
    let mut log_base = normalize(&mut base);
    while e > 0 {
        if e & 1 == 1 {
            result = matmul(&result, &base);
            log_result += log_base + normalize(&mut result);
        }
        e >>= 1;
        if e > 0 {
            base = matmul(&base, &base);
            log_base = 2.0 * log_base + normalize(&mut base);
        }
    }
    (log_result, result)
}

/// `Π (1-p)^e` for integer exponents and purified factors.
struct Weights<'a> {
    noise: &'a NoiseModel,
    purification: &'a Purification,
}

impl Weights<'_> {
    fn p1(&self, e: u8) -> f64 {
        (1.0 - self.noise.p1).powi(e as i32)
    }

    fn p2(&self, e: u8) -> f64 {
        (1.0 - self.noise.p2).powi(e as i32)
    }

    fn star(&self, j: usize, a: u8, w: usize) -> f64 {
        self.purification.value(j, a as usize, w, self.noise)
    }
}

/// Weight of one ring site given the bits of its window.
fn site_weight(v: RingVariant, leaf_rule: LeafRule, w: &Weights, bits: &[u8]) -> f64 {
    match v {
        // window (u-1, u, u+1)
        RingVariant::BipartiteA => {
            let (l, c, r) = (bits[0], bits[1], bits[2]);
            let s = l ^ r;
            w.p1(2 * c + s) * w.p2(theta(&[l, c, r]) * 2) * w.star(1, s, c as usize)
        }
        // window (u-1, u, u+1, u+2)
        RingVariant::BipartiteB => {
            let (l, c) = (bits[0], bits[1]);
            w.p1(c) * w.p2(theta(bits)) * w.star(1, c, (l ^ bits[2]) as usize)
        }
        // window (u-1, u, u+1)
        RingVariant::S1 => {
            let (l, c, r) = (bits[0], bits[1], bits[2]);
            w.p1(l ^ c) * w.p2(theta(bits)) * w.star(1, c, (c ^ r) as usize)
        }
        // pair window (u-1, u, u+1, u+2) for even u
        RingVariant::S2 => {
            let (l, c, r, rr) = (bits[0], bits[1], bits[2], bits[3]);
            let right = match leaf_rule {
                LeafRule::Physical => r,
                LeafRule::Literal => c ^ r,
            };
            let leaves = (c ^ l) as usize + right as usize;
            w.p1(r ^ rr) * w.p2(theta(&[c, r, rr])) * w.star(2, c, leaves)
        }
    }
}

/// `F = 2^-N tr(T^L)` for the closed ring, `L = N` sites (or `N/2` site
/// pairs for S2). Uses the gate-noise reading of the printed correlators.
pub fn transfer_matrix_fidelity(
    variant: RingVariant,
    n: usize,
    noise: &NoiseModel,
    purification: &Purification,
    leaf_rule: LeafRule,
) -> Result<DecayResult> {
    if noise.semantics != Semantics::Or {
        return Err(Error::Unsupported("transfer matrices use OR gate noise".into()));
    }
    if n < 3 {
        return Err(Error::InvalidSize(format!("ring needs n >= 3, got {n}")));
    }
    let weights = Weights { noise, purification };
    let (state_bits, step, sites) = match variant {
        RingVariant::BipartiteA | RingVariant::S1 => (2, 1, n),
        RingVariant::BipartiteB => (3, 1, n),
        RingVariant::S2 => {
            if !n.is_multiple_of(2) {
                return Err(Error::InvalidSize(format!("S2 ring needs even n, got {n}")));
            }
            (2, 2, n / 2)
        }
    };
    let dim = 1usize << state_bits;
    let window = state_bits + step;
    let mut t = vec![vec![0.0; dim]; dim];
    for pattern in 0..1usize << window {
        let bits: Vec<u8> = (0..window).map(|i| (pattern >> i & 1) as u8).collect();
        let from = pattern & (dim - 1);
        let to = pattern >> step;
        t[from][to] = site_weight(variant, leaf_rule, &weights, &bits);
    }
    let (log_scale, m) = scaled_power(&t, sites);
    let trace: f64 = (0..dim).map(|i| m[i][i]).sum();
    let ln_f = log_scale + trace.ln() - n as f64 * std::f64::consts::LN_2;
    Ok(DecayResult::from_log_fidelity(n, ln_f, noise.beta(), Method::TransferMatrix))
}

// ---------------------------------------------------------------------------
// Mean field

/// Model linearized around bit density `s`: `H ≈ Σ_u A_u + Σ_u B_u x_u`.
#[derive(Debug, Clone)]
pub struct MeanFieldSpec {
    model: Model,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanFieldResult {
    pub s_star: f64,
    pub f_mf: f64,
    pub beta_f_mf: f64,
    pub iterations: usize,
    pub residual: f64,
}

pub const MF_DAMPING: f64 = 0.5;
pub const MF_TOL: f64 = 1e-12;
pub const MF_MAX_ITER: usize = 100_000;

impl MeanFieldSpec {
    pub fn new(model: Model) -> Self {
        MeanFieldSpec { model }
    }

    pub fn ring(variant: RingVariant, n: usize, purification: Purification) -> Result<Self> {
        Ok(MeanFieldSpec { model: variant.model(n, purification, Semantics::Or, LeafRule::Physical)? })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    /// Total constant `Σ A_u` and the per-node fields `B_u` at density `s`.
    pub fn coefficients<T: Scalar>(&self, s: &T) -> Result<(T, Vec<T>)> {
        let mut a = T::zero();
        let mut b = vec![T::zero(); self.model.n()];
        for (mean, derivs) in self.model.multilinear_terms(s)? {
            a = a + mean;
            for (v, d) in derivs {
                a = a - s.clone() * d.clone();
                b[v] = b[v].clone() + d;
            }
        }
        Ok((a, b))
    }

    fn update(&self, s: f64, beta: f64) -> Result<f64> {
        let (_, b) = self.coefficients(&s)?;
        let n = b.len() as f64;
        Ok(0.5 - b.iter().map(|&bu| (beta * bu / 2.0).tanh()).sum::<f64>() / (2.0 * n))
    }

    /// `A + B/2 - ln cosh(βB/2) / β` per node at density `s`.
    pub fn decay_at(&self, s: f64, beta: f64) -> Result<f64> {
        let (a, b) = self.coefficients(&s)?;
        let n = b.len() as f64;
        let mut f = a / n;
        for &bu in &b {
            f += bu / (2.0 * n);
            if beta > 0.0 {
                f -= ln_cosh(beta * bu / 2.0) / (beta * n);
            }
        }
        Ok(f)
    }

    /// Exact `A + B/2` at `s = 1/2`: the `p → 0` limit of the mean-field rate.
    pub fn decay_small_p(&self) -> Result<BigRational> {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let (a, b) = self.coefficients(&half)?;
        let n = BigRational::from_integer(BigInt::from(b.len()));
        let total = b.into_iter().fold(a, |acc, bu| acc + bu * half.clone());
        Ok(total / n)
    }
}

fn ln_cosh(x: f64) -> f64 {
    let x = x.abs();
    x + (-2.0 * x).exp().ln_1p() - std::f64::consts::LN_2
}

/// Solves the self-consistency `s = 1/2 - Σ tanh(βB_u/2) / 2N` by damped
/// iteration, falling back to bisection, and evaluates the mean-field rate.
pub fn mean_field_decay(mf: &MeanFieldSpec, p: f64) -> Result<MeanFieldResult> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::Parameter(format!("p = {p} outside [0, 1)")));
    }
    let beta = -(-p).ln_1p();
    let mut s = 0.5;
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while iterations < MF_MAX_ITER {
        let next = mf.update(s, beta)?;
        residual = (next - s).abs();
        iterations += 1;
        if residual <= MF_TOL {
            s = next;
            break;
        }
        s = (1.0 - MF_DAMPING) * s + MF_DAMPING * next;
    }
    if residual > MF_TOL {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mf.update(mid, beta)? - mid > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        s = 0.5 * (lo + hi);
        residual = (mf.update(s, beta)? - s).abs();
        if residual > 1e-9 {
            return Err(Error::NoFixedPoint { residual });
        }
    }
    let f_mf = mf.decay_at(s, beta)?;
    Ok(MeanFieldResult { s_star: s, f_mf, beta_f_mf: beta * f_mf, iterations, residual })
}

/// Exact per-node coefficient of the linear-in-`p` decay: `E_x[H] / N`.
pub fn first_order_decay_ring(variant: RingVariant, n: usize) -> Result<BigRational> {
    variant.model(n, Purification::FirstOrder, Semantics::Or, LeafRule::Physical)?.first_order_decay()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring_model(v: RingVariant, n: usize, pur: Purification) -> Model {
        v.model(n, pur, Semantics::Or, LeafRule::Physical).unwrap()
    }

    #[test]
    fn noiseless_fidelity_is_one() {
        let noise = NoiseModel::noiseless();
        for v in RingVariant::ALL {
            let m = ring_model(v, 8, Purification::Ideal);
            assert_eq!(fidelity_exact(&m, &noise).unwrap().fidelity, Some(1.0));
            let t = transfer_matrix_fidelity(v, 8, &noise, &Purification::Ideal, LeafRule::Physical).unwrap();
            assert!((t.fidelity.unwrap() - 1.0).abs() < 1e-14);
            let mc = mc_fidelity(&m, &noise, 100, 1).unwrap();
            assert_eq!((mc.fidelity, mc.stderr), (Some(1.0), Some(0.0)));
        }
    }

    #[test]
    fn transfer_matches_enumeration() {
        let noise = NoiseModel::new(0.03, 0.05, 0.0, 0.02, Semantics::Or).unwrap();
        for v in RingVariant::ALL {
            for pur in [Purification::Ideal, Purification::FirstOrder] {
                for rule in [LeafRule::Physical, LeafRule::Literal] {
                    for n in [4usize, 6, 9, 12] {
                        if v == RingVariant::S2 && n % 2 == 1 {
                            continue;
                        }
                        let m = v.model(n, pur.clone(), Semantics::Or, rule).unwrap();
                        let e = fidelity_exact(&m, &noise).unwrap().fidelity.unwrap();
                        let t = transfer_matrix_fidelity(v, n, &noise, &pur, rule).unwrap();
                        assert!((e - t.fidelity.unwrap()).abs() < 1e-13, "{v:?} {n} {rule:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn large_ring_rate_converges() {
        let noise = NoiseModel::uniform(1e-3).unwrap();
        let r1 =
            transfer_matrix_fidelity(RingVariant::S1, 5_000, &noise, &Purification::Ideal, LeafRule::Physical).unwrap();
        let r2 = transfer_matrix_fidelity(RingVariant::S1, 10_000, &noise, &Purification::Ideal, LeafRule::Physical)
            .unwrap();
        assert!((r1.beta_f - r2.beta_f).abs() < 1e-12);
        assert!(r2.fidelity.is_some());
        let huge = NoiseModel::uniform(0.3).unwrap();
        let r =
            transfer_matrix_fidelity(RingVariant::S1, 10_000, &huge, &Purification::Ideal, LeafRule::Physical).unwrap();
        assert!(r.fidelity.is_none() && r.beta_f.is_finite());
    }

    #[test]
    fn s1_mean_field_coefficients() {
        // A = (5-2s)s², B = 2(2-4s+s²) + (1-s)² for the ideal S1 ring
        let mf = MeanFieldSpec::ring(RingVariant::S1, 10, Purification::Ideal).unwrap();
        for s in [0.1, 0.37, 0.5, 0.8] {
            let (a, b) = mf.coefficients(&s).unwrap();
            let n = b.len() as f64;
            assert!((a / n - (5.0 - 2.0 * s) * s * s).abs() < 1e-12);
            let expect_b = 2.0 * (2.0 - 4.0 * s + s * s) + (1.0 - s) * (1.0 - s);
            for bu in b {
                assert!((bu - expect_b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mean_field_small_p_limit() {
        for v in RingVariant::ALL {
            let mf = MeanFieldSpec::ring(v, 12, Purification::FirstOrder).unwrap();
            assert_eq!(mf.decay_small_p().unwrap(), first_order_decay_ring(v, 12).unwrap());
            let r = mean_field_decay(&mf, 1e-9).unwrap();
            assert!((r.s_star - 0.5).abs() < 1e-8);
        }
    }

    #[test]
    fn mean_field_rejects_bad_p() {
        let mf = MeanFieldSpec::ring(RingVariant::S1, 6, Purification::Ideal).unwrap();
        assert!(mean_field_decay(&mf, 1.0).is_err());
    }

    #[test]
    fn exact_size_limit() {
        let m = ring_model(RingVariant::S1, 25, Purification::Ideal);
        assert!(matches!(fidelity_exact(&m, &NoiseModel::noiseless()), Err(Error::SizeLimit(_))));
    }
}
