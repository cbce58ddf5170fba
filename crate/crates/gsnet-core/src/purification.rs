//! Recurrence purification of GHZ stars (one center, `j` leaves) and Bell pairs.
//!
//! Correlators of a leaf-symmetric star state are stored as `c[a][w]`: the
//! expectation of the center stabilizer raised to `a` times any product of `w`
//! leaf stabilizers. Each purification round runs the center-colour step
//! followed by the leaf-colour step; both post-select and renormalise by the
//! identity entry.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Leaf-symmetric correlator table of a `j`-leaf star.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorTable {
    j: usize,
    /// `values[a][w]`.
    values: [Vec<f64>; 2],
}

impl CorrelatorTable {
    pub fn new(j: usize, center_off: Vec<f64>, center_on: Vec<f64>) -> Result<Self> {
        if center_off.len() != j + 1 || center_on.len() != j + 1 {
            return Err(Error::Dimension { expected: j + 1, got: center_off.len().min(center_on.len()) });
        }
        Ok(CorrelatorTable { j, values: [center_off, center_on] })
    }

    /// Pure star: every correlator is 1.
    pub fn ideal(j: usize) -> Self {
        CorrelatorTable { j, values: [vec![1.0; j + 1], vec![1.0; j + 1]] }
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn get(&self, a: usize, w: usize) -> f64 {
        self.values[a][w]
    }

    pub fn row(&self, a: usize) -> &[f64] {
        &self.values[a]
    }

    /// Expands to all `2^(j+1)` patterns; bit 0 is the center, bit `i` leaf `i`.
    pub fn to_full(&self) -> Vec<f64> {
        (0..1usize << (self.j + 1)).map(|pat| self.values[pat & 1][(pat >> 1).count_ones() as usize]).collect()
    }

    /// Collapses a full pattern table, checking leaf-permutation symmetry.
    pub fn from_full(j: usize, full: &[f64], tol: f64) -> Result<Self> {
        if full.len() != 1 << (j + 1) {
            return Err(Error::Dimension { expected: 1 << (j + 1), got: full.len() });
        }
        let mut values = [vec![f64::NAN; j + 1], vec![f64::NAN; j + 1]];
        for (pat, &v) in full.iter().enumerate() {
            let slot = &mut values[pat & 1][(pat >> 1).count_ones() as usize];
            if slot.is_nan() {
                *slot = v;
            } else if (*slot - v).abs() > tol {
                return Err(Error::Spec(format!("pattern {pat:b} breaks leaf symmetry")));
            }
        }
        Ok(CorrelatorTable { j, values })
    }

    pub fn max_abs_diff(&self, other: &CorrelatorTable) -> f64 {
        self.values.iter().flatten().zip(other.values.iter().flatten()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// True when `c[1][w]` does not depend on `w`.
    pub fn center_row_constant(&self, tol: f64) -> bool {
        self.values[1].iter().all(|v| (v - self.values[1][0]).abs() <= tol)
    }
}

/// Star whose leaves each crossed a depolarizing channel of strength `pc`.
pub fn initial_distributed_ghz(j: usize, pc: f64) -> Result<CorrelatorTable> {
    check_prob("pc", pc)?;
    let off = (0..=j).map(|w| (1.0 - pc).powi(w as i32)).collect();
    let on = vec![(1.0 - pc).powi(j as i32); j + 1];
    CorrelatorTable::new(j, off, on)
}

/// Low-noise fixed point: `c[0][w] = 1 - p ceil(w/2)`, `c[1][w] = 1 - p (j+1)`.
/// Accurate to first order; meaningful while `p (j+1)` is small.
pub fn first_order_fixed_point(j: usize, p: f64) -> CorrelatorTable {
    CorrelatorTable {
        j,
        values: [(0..=j).map(|w| 1.0 - p * w.div_ceil(2) as f64).collect(), vec![1.0 - p * (j + 1) as f64; j + 1]],
    }
}

/// First-order exponent of the fixed point: `(1 - a) ceil(w/2) + a (j+1)`.
pub fn first_order_exponent(j: usize, a: usize, w: usize) -> usize {
    if a == 1 {
        j + 1
    } else {
        w.div_ceil(2)
    }
}

/// Purified Bell pair at first order (`j = 1`).
pub fn bell_first_order(p: f64) -> CorrelatorTable {
    first_order_fixed_point(1, p)
}

/// Overlap with the pure star, `2^-(j+1) Σ_w C(j,w) (c[0][w] + c[1][w])`.
pub fn ghz_fidelity(t: &CorrelatorTable) -> f64 {
    let j = t.j;
    let mut acc = 0.0;
    let mut binom = 1.0;
    for w in 0..=j {
        acc += binom * (t.values[0][w] + t.values[1][w]);
        binom = binom * (j - w) as f64 / (w + 1) as f64;
    }
    acc / 2f64.powi(j as i32 + 1)
}

/// Exact slope `k` in `F = 1 - k p` for the first-order fixed point.
pub fn first_order_infidelity_slope(j: usize) -> BigRational {
    let mut acc = BigInt::zero();
    let mut binom = BigInt::one();
    for w in 0..=j {
        let e = first_order_exponent(j, 0, w) + first_order_exponent(j, 1, w);
        acc += &binom * BigInt::from(e);
        binom = binom * BigInt::from(j - w) / BigInt::from(w + 1);
    }
    BigRational::new(acc, BigInt::one() << (j + 1))
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if (0.0..1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} = {p} outside [0, 1)")))
    }
}

fn normalize(mut out: [Vec<f64>; 2], j: usize) -> Result<CorrelatorTable> {
    let norm = out[0][0];
    if !(norm > 0.0) {
        return Err(Error::PurificationDiverged(format!("normalisation {norm}")));
    }
    out.iter_mut().flatten().for_each(|v| *v /= norm);
    Ok(CorrelatorTable { j, values: out })
}

fn binomial_row(n: usize) -> Vec<f64> {
    let mut row = vec![1.0; n + 1];
    for k in 1..n {
        row[k] = row[k - 1] * (n - k + 1) as f64 / k as f64;
    }
    row
}

/// Center-colour step: CNOTs from the second copy's center into the first,
/// X/Z readout of the second copy, keep on the trivial syndrome.
pub fn p1_step(t: &CorrelatorTable, p1: f64, p2: f64) -> Result<CorrelatorTable> {
    let j = t.j;
    let (q1, q2) = (1.0 - p1, 1.0 - p2);
    let mut out = [vec![0.0; j + 1], vec![0.0; j + 1]];
    for a in 0..2 {
        for w in 0..=j {
            let mut s = 0.0;
            for a2 in 0..2 {
                let mut v = t.values[a ^ a2][w] * t.values[a2][w];
                let touched = a | a2;
                v *= q2.powi((touched | (w & 1)) as i32);
                v *= q2.powi(if touched == 1 { j } else { w } as i32);
                v *= q1.powi((a2 * (1 + j)) as i32);
                s += 0.5 * v;
            }
            out[a][w] = s;
        }
    }
    normalize(out, j)
}

/// Leaf-colour step. The sum over the second copy's leaf pattern `b2` only
/// depends on how many of its ones fall on ones (`k`) and zeros (`l`) of `b`.
pub fn p2_step(t: &CorrelatorTable, p1: f64, p2: f64) -> Result<CorrelatorTable> {
    let j = t.j;
    let (q1, q2) = (1.0 - p1, 1.0 - p2);
    let binoms: Vec<Vec<f64>> = (0..=j).map(binomial_row).collect();
    let mut out = [vec![0.0; j + 1], vec![0.0; j + 1]];
    for a in 0..2 {
        for w in 0..=j {
            let mut s = 0.0;
            for k in 0..=w {
                for l in 0..=(j - w) {
                    let mult = binoms[w][k] * binoms[j - w][l];
                    let wb2 = k + l;
                    let wx = (w - k) + l;
                    let mut v = t.values[a][wx] * t.values[a][wb2];
                    v *= q2.powi((a | (wb2 & 1) | (w & 1)) as i32);
                    v *= q2.powi(if a == 1 { j } else { w + l } as i32);
                    v *= q1.powi(((wb2 & 1) + wb2) as i32);
                    s += mult * v;
                }
            }
            out[a][w] = s / 2f64.powi(j as i32);
        }
    }
    normalize(out, j)
}

/// Center-colour step on a full pattern table (bit 0 center, bits 1..=j leaves).
pub fn p1_step_full(j: usize, t: &[f64], p1: f64, p2: f64) -> Result<Vec<f64>> {
    let (q1, q2) = (1.0 - p1, 1.0 - p2);
    let size = 1usize << (j + 1);
    let mut out = vec![0.0; size];
    for pat in 0..size {
        let a = pat & 1;
        let b = pat >> 1;
        let mut s = 0.0;
        for a2 in 0..2 {
            let mut v = t[(a ^ a2) | (b << 1)] * t[a2 | (b << 1)];
            let parity = (b.count_ones() & 1) as usize;
            v *= q2.powi((a | a2 | parity) as i32);
            for leaf in 0..j {
                v *= q2.powi((a | a2 | ((b >> leaf) & 1)) as i32);
            }
            v *= q1.powi(a2 as i32);
            for _ in 0..j {
                v *= q1.powi(a2 as i32);
            }
            s += 0.5 * v;
        }
        out[pat] = s;
    }
    normalize_full(out)
}

/// Leaf-colour step on a full pattern table.
pub fn p2_step_full(j: usize, t: &[f64], p1: f64, p2: f64) -> Result<Vec<f64>> {
    let (q1, q2) = (1.0 - p1, 1.0 - p2);
    let size = 1usize << (j + 1);
    let mut out = vec![0.0; size];
    for pat in 0..size {
        let a = pat & 1;
        let b = pat >> 1;
        let mut s = 0.0;
        for b2 in 0..1usize << j {
            let mut v = t[a | ((b ^ b2) << 1)] * t[a | (b2 << 1)];
            let pb2 = (b2.count_ones() & 1) as usize;
            let pb = (b.count_ones() & 1) as usize;
            v *= q2.powi((a | pb2 | pb) as i32);
            for leaf in 0..j {
                v *= q2.powi((a | ((b2 >> leaf) & 1) | ((b >> leaf) & 1)) as i32);
            }
            v *= q1.powi(pb2 as i32);
            for leaf in 0..j {
                v *= q1.powi(((b2 >> leaf) & 1) as i32);
            }
            s += v;
        }
        out[pat] = s / (1usize << j) as f64;
    }
    normalize_full(out)
}

fn normalize_full(mut out: Vec<f64>) -> Result<Vec<f64>> {
    let norm = out[0];
    if !(norm > 0.0) {
        return Err(Error::PurificationDiverged(format!("normalisation {norm}")));
    }
    out.iter_mut().for_each(|v| *v /= norm);
    Ok(out)
}

/// One purification round: center-colour step, then leaf-colour step.
pub fn purification_round(t: &CorrelatorTable, p1: f64, p2: f64) -> Result<CorrelatorTable> {
    p2_step(&p1_step(t, p1, p2)?, p1, p2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPoint {
    pub table: CorrelatorTable,
    pub iterations: usize,
    pub converged: bool,
}

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Iterates purification rounds from the distributed star until the largest
/// entry change drops below `tol`.
pub fn purify_fixed_point(j: usize, p1: f64, p2: f64, pc: f64, tol: f64, max_iter: usize) -> Result<FixedPoint> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance {tol}")));
    }
    check_prob("p1", p1)?;
    check_prob("p2", p2)?;
    let mut t = initial_distributed_ghz(j, pc)?;
    for it in 1..=max_iter {
        let next = purification_round(&t, p1, p2)?;
        if next.values.iter().flatten().any(|v| !(v.abs() <= 1.0 + tol)) {
            return Err(Error::PurificationDiverged(format!("entry left [-1, 1] at round {it}")));
        }
        let delta = next.max_abs_diff(&t);
        t = next;
        if delta < tol {
            return Ok(FixedPoint { table: t, iterations: it, converged: true });
        }
    }
    Ok(FixedPoint { table: t, iterations: max_iter, converged: false })
}

/// What counts as successful purification when locating the noise threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdCriterion {
    /// Converged and the fixed point keeps star fidelity above 1/2, the
    /// genuine multipartite entanglement bound for GHZ states.
    #[default]
    FidelityAboveHalf,
    /// Converged and the fixed point beats the fidelity of the distributed input.
    ImprovesOnInput,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdOptions {
    pub criterion: ThresholdCriterion,
    pub search_max: f64,
    pub tol: f64,
    pub iter_tol: f64,
    pub max_iter: usize,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        ThresholdOptions {
            criterion: ThresholdCriterion::default(),
            search_max: 0.3,
            tol: 1e-4,
            iter_tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// Whether purification succeeds at gate and measurement noise `p`.
pub fn purification_succeeds(j: usize, p: f64, pc: f64, opts: &ThresholdOptions) -> bool {
    let Ok(fp) = purify_fixed_point(j, p, p, pc, opts.iter_tol, opts.max_iter) else {
        return false;
    };
    if !fp.converged {
        return false;
    }
    let f = ghz_fidelity(&fp.table);
    match opts.criterion {
        ThresholdCriterion::FidelityAboveHalf => f > 0.5,
        ThresholdCriterion::ImprovesOnInput => {
            initial_distributed_ghz(j, pc).map(|t| f > ghz_fidelity(&t)).unwrap_or(false)
        }
    }
}

/// Largest `p = p1 = p2` for which purification succeeds, by bisection.
pub fn purification_threshold(j: usize, pc: f64, tol: f64) -> Result<f64> {
    purification_threshold_with(j, pc, &ThresholdOptions { tol, ..Default::default() })
}

pub fn purification_threshold_with(j: usize, pc: f64, opts: &ThresholdOptions) -> Result<f64> {
    check_prob("pc", pc)?;
    if !purification_succeeds(j, 0.0, pc, opts) {
        return Err(Error::InputTooNoisy(format!("j = {j}, pc = {pc} fails even without local noise")));
    }
    let (mut lo, mut hi) = (0.0, opts.search_max);
    if purification_succeeds(j, hi, pc, opts) {
        return Ok(hi);
    }
    while hi - lo > opts.tol {
        let mid = 0.5 * (lo + hi);
        if purification_succeeds(j, mid, pc, opts) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn distributed_star_entries() {
        let t = initial_distributed_ghz(3, 0.1).unwrap();
        assert_eq!(t.get(0, 0), 1.0);
        for w in 0..=3 {
            assert_abs_diff_eq!(t.get(1, w), 0.729, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(initial_distributed_ghz(2, 0.2).unwrap().get(0, 2), 0.64, epsilon = 1e-15);
        assert!(initial_distributed_ghz(2, 1.0).is_err());
    }

    #[test]
    fn first_order_tables() {
        let t = first_order_fixed_point(4, 0.01);
        assert_eq!(t.get(0, 0), 1.0);
        assert_abs_diff_eq!(t.get(0, 3), 0.98, epsilon = 1e-15);
        for w in 0..=4 {
            assert_abs_diff_eq!(t.get(1, w), 0.95, epsilon = 1e-15);
        }
        let b = bell_first_order(0.01);
        assert_eq!(b.get(0, 0), 1.0);
        assert_abs_diff_eq!(b.get(0, 1), 0.99, epsilon = 1e-15);
        assert_abs_diff_eq!(b.get(1, 0), 0.98, epsilon = 1e-15);
        assert_abs_diff_eq!(b.get(1, 1), 0.98, epsilon = 1e-15);
    }

    #[test]
    fn fidelity_values() {
        assert_eq!(ghz_fidelity(&CorrelatorTable::ideal(5)), 1.0);
        let e = 0.01;
        let t = CorrelatorTable::new(1, vec![1.0, 1.0 - e], vec![1.0 - e, 1.0 - e]).unwrap();
        assert_abs_diff_eq!(ghz_fidelity(&t), 1.0 - 0.75 * e, epsilon = 1e-15);
        for j in 1..=10 {
            let p = 1e-3;
            let f = ghz_fidelity(&first_order_fixed_point(j, p));
            assert_abs_diff_eq!(f, 1.0 - 0.625 * (j + 1) as f64 * p, epsilon = 1e-14);
        }
    }

    #[test]
    fn noiseless_steps_keep_pure_table() {
        for j in 1..5 {
            let t = CorrelatorTable::ideal(j);
            assert_eq!(p1_step(&t, 0.0, 0.0).unwrap(), t);
            assert_eq!(p2_step(&t, 0.0, 0.0).unwrap(), t);
        }
    }

    #[test]
    fn noiseless_p1_improves_slightly_noisy_bell() {
        let e = 0.01;
        let t = CorrelatorTable::new(1, vec![1.0, 1.0], vec![1.0 - e, 1.0 - e]).unwrap();
        let out = p1_step(&t, 0.0, 0.0).unwrap();
        for w in 0..2 {
            assert!(out.get(1, w) > t.get(1, w), "w = {w}");
        }
        assert!(ghz_fidelity(&out) > ghz_fidelity(&t));
    }

    #[test]
    fn weight_space_matches_full_patterns() {
        let t = CorrelatorTable::new(2, vec![1.0, 0.93, 0.88], vec![0.9, 0.85, 0.8]).unwrap();
        let a = p2_step(&t, 0.02, 0.03).unwrap();
        let b = p2_step_full(2, &t.to_full(), 0.02, 0.03).unwrap();
        assert!(a.max_abs_diff(&CorrelatorTable::from_full(2, &b, 1e-12).unwrap()) < 1e-14);
    }

    #[test]
    fn first_order_table_is_nearly_invariant() {
        // A round at p1 = p2 = p moves the first-order table by O(p^2) only.
        for j in [1usize, 2, 4] {
            let dev = |p: f64| {
                let t = first_order_fixed_point(j, p);
                purification_round(&t, p, p).unwrap().max_abs_diff(&t)
            };
            let ratio = dev(2e-3) / dev(1e-3);
            assert!((ratio - 4.0).abs() < 0.2, "j={j} ratio {ratio}");
        }
    }

    #[test]
    fn moderate_noise_fidelity() {
        let fp = purify_fixed_point(1, 0.02, 0.02, 0.1, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(fp.converged);
        let target = 1.0 - 0.625 * 2.0 * 0.02;
        assert!((ghz_fidelity(&fp.table) - target).abs() < 0.05 * target);
        let noiseless = purify_fixed_point(3, 0.0, 0.0, 0.3, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(noiseless.converged);
        assert!(noiseless.table.max_abs_diff(&CorrelatorTable::ideal(3)) < 1e-10);
    }

    #[test]
    fn beyond_threshold_fails() {
        let opts = ThresholdOptions::default();
        assert!(!purification_succeeds(1, 0.2, 0.1, &opts));
        assert!(!purification_succeeds(9, 0.05, 0.1, &opts));
    }

    #[test]
    fn infidelity_slope_is_five_eighths() {
        for j in 1..=10usize {
            let expect = BigRational::new(BigInt::from(5 * (j + 1)), BigInt::from(8));
            assert_eq!(first_order_infidelity_slope(j), expect, "j={j}");
        }
    }
}
