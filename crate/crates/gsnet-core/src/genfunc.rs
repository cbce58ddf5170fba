//! Generating functions over ring domain statistics. The coefficient of
//! `z^N` in `G` is `Σ_x <K_x>` on the closed `N`-ring, so `F = [z^N] G / 2^N`.

use std::collections::BTreeMap;
use std::ops::Div;

use serde::Serialize;

use crate::correlators::{Config, Purification, RingVariant, Scalar};
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::purification::CorrelatorTable;
use crate::statmech::{DecayResult, Method};

/// Scalars the series recurrences run in.
pub trait Field: Scalar + Div<Output = Self> + PartialEq + PartialOrd {}
impl<T: Scalar + Div<Output = T> + PartialEq + PartialOrd> Field for T {}

/// Power series of `num(z) / den(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalSeries<T> {
    pub num: Vec<T>,
    pub den: Vec<T>,
}

impl<T: Field> RationalSeries<T> {
    pub fn new(num: Vec<T>, den: Vec<T>) -> Result<Self> {
        match den.first() {
            Some(d0) if !d0.is_zero() => Ok(RationalSeries { num, den }),
            _ => Err(Error::SingularSeries),
        }
    }

    /// Coefficients `0..=n` from `c_k = (num_k - Σ_{i≥1} den_i c_{k-i}) / den_0`.
    pub fn coefficients(&self, n: usize) -> Vec<T> {
        let mut c: Vec<T> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = self.num.get(k).cloned().unwrap_or_else(T::zero);
            for i in 1..self.den.len().min(k + 1) {
                acc = acc - self.den[i].clone() * c[k - i].clone();
            }
            c.push(acc / self.den[0].clone());
        }
        c
    }

    /// Series of `G(λ z)`.
    pub fn rescaled(&self, lambda: T) -> Self {
        let scale = |v: &[T]| {
            let mut pow = T::one();
            v.iter()
                .map(|c| {
                    let out = c.clone() * pow.clone();
                    pow = pow.clone() * lambda.clone();
                    out
                })
                .collect()
        };
        RationalSeries { num: scale(&self.num), den: scale(&self.den) }
    }
}

/// `n`-th Taylor coefficient.
pub fn series_coeff<T: Field>(rs: &RationalSeries<T>, n: usize) -> Result<T> {
    if rs.den.first().is_none_or(|d| d.is_zero()) {
        return Err(Error::SingularSeries);
    }
    Ok(rs.coefficients(n).pop().expect("n + 1 coefficients"))
}

fn lit<T: Field>(v: i64) -> T {
    let mag = T::from_u64(v.unsigned_abs());
    if v < 0 {
        T::zero() - mag
    } else {
        mag
    }
}

/// S1 ring: `x` per one, `y1` / `y2` per domain of ones after a domain of
/// one / at least two zeros.
pub fn gf_s1_series<T: Field>(x: T, y1: T, y2: T) -> Result<RationalSeries<T>> {
    let one = T::one();
    let num = vec![
        one.clone(),
        T::zero(),
        T::zero() - x.clone() * (one.clone() - y1.clone()),
        lit::<T>(-2) * x.clone() * (y1.clone() - y2.clone()),
    ];
    let den = vec![one.clone(), T::zero() - (one.clone() + x.clone()), x.clone() * (one - y1.clone()), x * (y1 - y2)];
    RationalSeries::new(num, den)
}

/// Bipartite B ring: zero domains of size one, two, and three or more are
/// told apart by `y1`, `y2`, `y3`.
pub fn gf_bipartite_b_series<T: Field>(x: T, y1: T, y2: T, y3: T) -> Result<RationalSeries<T>> {
    let one = T::one();
    let num = vec![
        one.clone(),
        T::zero(),
        x.clone() * (y1.clone() - one.clone()),
        lit::<T>(2) * x.clone() * (y2.clone() - y1.clone()),
        lit::<T>(3) * x.clone() * (y3.clone() - y2.clone()),
    ];
    let den = vec![
        one.clone(),
        T::zero() - (one.clone() + x.clone()),
        x.clone() * (one - y1.clone()),
        x.clone() * (y1 - y2.clone()),
        x * (y2 - y3),
    ];
    RationalSeries::new(num, den)
}

/// Bipartite A ring: as S1, plus `w2` per domain of at least two ones.
pub fn gf_bipartite_a_series<T: Field>(x: T, y1: T, y2: T, w2: T) -> Result<RationalSeries<T>> {
    let one = T::one();
    let w = (w2 - one.clone()) * x.clone();
    let num = vec![
        one.clone(),
        T::zero(),
        x.clone() * (y1.clone() - one.clone()),
        lit::<T>(2) * x.clone() * (y2.clone() - y1.clone()) + lit::<T>(2) * w.clone() * x.clone() * y1.clone(),
        lit::<T>(3) * w.clone() * x.clone() * (y2.clone() - y1.clone()),
    ];
    let den = vec![
        one.clone(),
        T::zero() - (one.clone() + x.clone()),
        x.clone() * (one - y1.clone()),
        x.clone() * (y1.clone() - y2.clone() - w.clone() * y1.clone()),
        x * w * (y1 - y2),
    ];
    RationalSeries::new(num, den)
}

/// Determinant by cofactor expansion (matrices here are at most 4×4).
fn det<T: Field>(m: &[Vec<T>]) -> T {
    match m.len() {
        0 => T::one(),
        1 => m[0][0].clone(),
        n => {
            let mut acc = T::zero();
            for col in 0..n {
                let minor: Vec<Vec<T>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(c, _)| c != col).map(|(_, v)| v.clone()).collect())
                    .collect();
                let term = m[0][col].clone() * det(&minor);
                acc = if col % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

/// Coefficients of `det(I - u T)`.
fn det_one_minus<T: Field>(t: &[Vec<T>]) -> Vec<T> {
    let d = t.len();
    let mut coeffs = vec![T::zero(); d + 1];
    for subset in 0usize..1 << d {
        let idx: Vec<usize> = (0..d).filter(|&i| subset >> i & 1 == 1).collect();
        let minor: Vec<Vec<T>> = idx.iter().map(|&i| idx.iter().map(|&j| t[i][j].clone()).collect()).collect();
        let k = idx.len();
        let v = det(&minor);
        coeffs[k] = if k.is_multiple_of(2) { coeffs[k].clone() + v } else { coeffs[k].clone() - v };
    }
    coeffs
}

/// S2 ring, read as a cyclic word of `N/2` pair elements `(odd, even)`.
/// Elements `01`, `10`, `11` carry weights `x01`, `x10`, `x11`; a `00` right
/// after `01`/`11` carries `yl`, a `00` right before `10`/`11` carries `yr`.
/// `G = Σ_M tr(T^M) z^{2M} = (4 d(u) - u d'(u)) / d(u)` with `u = z²` and
/// `d(u) = det(I - u T)`.
pub fn gf_s2_series<T: Field>(x01: T, x10: T, x11: T, yl: T, yr: T) -> Result<RationalSeries<T>> {
    // states 0:00 1:01 2:10 3:11
    let weight = [T::one(), x01, x10, x11];
    let mut t = vec![vec![T::zero(); 4]; 4];
    for (a, row) in t.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            let mut v = weight[b].clone();
            if b == 0 && (a == 1 || a == 3) {
                v = v * yl.clone();
            }
            if a == 0 && (b == 2 || b == 3) {
                v = v * yr.clone();
            }
            *cell = v;
        }
    }
    let d = det_one_minus(&t);
    let mut num = vec![T::zero(); 2 * d.len() - 1];
    let mut den = vec![T::zero(); 2 * d.len() - 1];
    for (i, di) in d.iter().enumerate() {
        num[2 * i] = lit::<T>(4 - i as i64) * di.clone();
        den[2 * i] = di.clone();
    }
    RationalSeries::new(num, den)
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("{name} = {v} must be positive")))
    }
}

fn constant_center(t: &CorrelatorTable) -> Result<f64> {
    if !t.center_row_constant(1e-15) {
        return Err(Error::Unsupported("generating function needs a center-on row independent of the leaves".into()));
    }
    Ok(t.get(1, 0))
}

pub fn gf_s1(noise: &NoiseModel, purification: &Purification) -> Result<RationalSeries<f64>> {
    let t = purification.table(1, noise)?;
    let (q1, q2) = (1.0 - noise.p1, 1.0 - noise.p2);
    let (on, leaf, both) = (t.get(1, 0), t.get(0, 1), t.get(1, 1));
    let on = positive("center-on correlator", on)?;
    let ratio = positive("leaf correlator", leaf)? * positive("joint correlator", both)? / on;
    gf_s1_series(q2 * on, q2 * q1 * q1 * ratio, q2 * q2 * q1 * q1 * ratio)
}

pub fn gf_bipartite_b(noise: &NoiseModel, purification: &Purification) -> Result<RationalSeries<f64>> {
    let t = purification.table(1, noise)?;
    let (q1, q2) = (1.0 - noise.p1, 1.0 - noise.p2);
    let on = positive("center-on correlator", constant_center(&t)?)?;
    let leaf = positive("leaf correlator", t.get(0, 1))?;
    gf_bipartite_b_series(q1 * q2 * on, q2, q2 * q2 * leaf * leaf, q2.powi(3) * leaf * leaf)
}

pub fn gf_bipartite_a(noise: &NoiseModel, purification: &Purification) -> Result<RationalSeries<f64>> {
    let t = purification.table(1, noise)?;
    let (q1, q2) = (1.0 - noise.p1, 1.0 - noise.p2);
    let on = positive("center-on correlator", constant_center(&t)?)?;
    let leaf = positive("leaf correlator", t.get(0, 1))?;
    gf_bipartite_a_series(
        q1 * q1 * q2 * q2 * leaf,
        q2 * q2,
        q1 * q1 * q2.powi(4) * on * on,
        q1 * q1 * on * on / (leaf * leaf),
    )
}

pub fn gf_s2(noise: &NoiseModel, purification: &Purification) -> Result<RationalSeries<f64>> {
    let t = purification.table(2, noise)?;
    let (q1, q2) = (1.0 - noise.p1, 1.0 - noise.p2);
    let on = positive("center-on correlator", constant_center(&t)?)?;
    let leaf = positive("leaf correlator", t.get(0, 1))?;
    if (t.get(0, 2) - leaf).abs() > 1e-15 {
        return Err(Error::Unsupported("S2 generating function needs c[0][1] = c[0][2]".into()));
    }
    gf_s2_series(q1 * q2 * on, q1 * q2 * leaf, q2 * on, q2, leaf)
}

pub fn gf_for(variant: RingVariant, noise: &NoiseModel, purification: &Purification) -> Result<RationalSeries<f64>> {
    match variant {
        RingVariant::BipartiteA => gf_bipartite_a(noise, purification),
        RingVariant::BipartiteB => gf_bipartite_b(noise, purification),
        RingVariant::S1 => gf_s1(noise, purification),
        RingVariant::S2 => gf_s2(noise, purification),
    }
}

/// Ring fidelity from the generating function, via `G(z/2)` so the
/// coefficients stay of order one.
pub fn gf_fidelity(
    variant: RingVariant,
    n: usize,
    noise: &NoiseModel,
    purification: &Purification,
) -> Result<DecayResult> {
    if n < 3 {
        return Err(Error::InvalidSize(format!("ring needs n >= 3, got {n}")));
    }
    if variant == RingVariant::S2 && !n.is_multiple_of(2) {
        return Err(Error::Unsupported(format!("S2 ring needs even N, got {n}")));
    }
    let series = gf_for(variant, noise, purification)?.rescaled(0.5);
    let f = series_coeff(&series, n)?;
    Ok(DecayResult::from_fidelity(n, f, noise.beta(), Method::GeneratingFunction))
}

// ---------------------------------------------------------------------------
// Domain statistics

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "scheme", rename_all = "kebab-case")]
pub enum DomainStats {
    /// Ones; domains of ones after one zero; after two or more zeros.
    S1 { n: usize, c1: usize, c2s: usize },
    /// As S1 with zero domains of size one, two, three or more.
    BipartiteB { n: usize, c1: usize, c2: usize, c3s: usize },
    /// As S1 plus domains of two or more ones.
    BipartiteA { n: usize, c1: usize, c2s: usize, cbar2s: usize },
    /// Pair elements and the `00` runs entered from `01`/`11` (`cl`) or
    /// left into `10`/`11` (`cr`).
    S2 { n01: usize, n10: usize, n11: usize, cl: usize, cr: usize },
}

/// Cyclic runs as `(value, length)`, rotated to start at a run boundary.
fn runs(bits: &[u8]) -> Vec<(u8, usize)> {
    let n = bits.len();
    let Some(start) = (0..n).find(|&i| bits[i] != bits[(i + n - 1) % n]) else {
        return vec![(bits[0], n)];
    };
    let mut out: Vec<(u8, usize)> = Vec::new();
    for k in 0..n {
        let b = bits[(start + k) % n];
        match out.last_mut() {
            Some((v, len)) if *v == b => *len += 1,
            _ => out.push((b, 1)),
        }
    }
    out
}

/// Zero-run length preceding each run of ones, and the lengths of the one runs.
fn one_runs(bits: &[u8]) -> Vec<(usize, usize)> {
    let r = runs(bits);
    if r.len() == 1 {
        return Vec::new();
    }
    let m = r.len();
    (0..m).filter(|&i| r[i].0 == 1).map(|i| (r[(i + m - 1) % m].1, r[i].1)).collect()
}

pub fn domain_stats(x: &Config, scheme: RingVariant) -> Result<DomainStats> {
    let bits = x.bits();
    let n_ones = x.weight();
    if bits.is_empty() {
        return Err(Error::InvalidSize("empty configuration".into()));
    }
    let ones = one_runs(&bits);
    let count = |f: &dyn Fn(usize, usize) -> bool| ones.iter().filter(|&&(z, o)| f(z, o)).count();
    Ok(match scheme {
        RingVariant::S1 => DomainStats::S1 { n: n_ones, c1: count(&|z, _| z == 1), c2s: count(&|z, _| z >= 2) },
        RingVariant::BipartiteB => DomainStats::BipartiteB {
            n: n_ones,
            c1: count(&|z, _| z == 1),
            c2: count(&|z, _| z == 2),
            c3s: count(&|z, _| z >= 3),
        },
        RingVariant::BipartiteA => DomainStats::BipartiteA {
            n: n_ones,
            c1: count(&|z, _| z == 1),
            c2s: count(&|z, _| z >= 2),
            cbar2s: count(&|_, o| o >= 2),
        },
        RingVariant::S2 => {
            let n = bits.len();
            if !n.is_multiple_of(2) {
                return Err(Error::InvalidSize(format!("S2 needs even N, got {n}")));
            }
            let m = n / 2;
            // element k = (x_{2k-1}, x_{2k}) encoded as 2*odd + even
            let el: Vec<u8> = (0..m).map(|k| 2 * bits[(2 * k + n - 1) % n] + bits[2 * k]).collect();
            let (mut n01, mut n10, mut n11, mut cl, mut cr) = (0, 0, 0, 0, 0);
            for k in 0..m {
                let (prev, cur, next) = (el[(k + m - 1) % m], el[k], el[(k + 1) % m]);
                match cur {
                    1 => n01 += 1,
                    2 => n10 += 1,
                    3 => n11 += 1,
                    _ => {
                        cl += usize::from(prev == 1 || prev == 3);
                        cr += usize::from(next == 2 || next == 3);
                    }
                }
            }
            DomainStats::S2 { n01, n10, n11, cl, cr }
        }
    })
}

/// Multiplicity of every statistics value over all `2^N` configurations.
pub fn domain_table(n: usize, scheme: RingVariant) -> Result<BTreeMap<DomainStats, u64>> {
    if n > 30 {
        return Err(Error::SizeLimit(format!("domain table enumerates 2^{n} configurations")));
    }
    let mut table = BTreeMap::new();
    for x in 0u64..1 << n {
        *table.entry(domain_stats(&Config::from_u64(n, x), scheme)?).or_insert(0) += 1;
    }
    Ok(table)
}

impl DomainStats {
    /// The generating-function monomial (without `z^N`) at the given
    /// parameter values, in the order the matching `gf_*_series` takes them.
    pub fn monomial<T: Field>(&self, params: &[T]) -> T {
        let pow = |v: &T, e: usize| (0..e).fold(T::one(), |acc, _| acc * v.clone());
        match *self {
            DomainStats::S1 { n, c1, c2s } => pow(&params[0], n) * pow(&params[1], c1) * pow(&params[2], c2s),
            DomainStats::BipartiteB { n, c1, c2, c3s } => {
                pow(&params[0], n) * pow(&params[1], c1) * pow(&params[2], c2) * pow(&params[3], c3s)
            }
            DomainStats::BipartiteA { n, c1, c2s, cbar2s } => {
                pow(&params[0], n) * pow(&params[1], c1) * pow(&params[2], c2s) * pow(&params[3], cbar2s)
            }
            DomainStats::S2 { n01, n10, n11, cl, cr } => {
                pow(&params[0], n01)
                    * pow(&params[1], n10)
                    * pow(&params[2], n11)
                    * pow(&params[3], cl)
                    * pow(&params[4], cr)
            }
        }
    }
}

/// Series for `scheme` at raw parameter values (same order as [`DomainStats::monomial`]).
pub fn gf_series<T: Field>(scheme: RingVariant, params: &[T]) -> Result<RationalSeries<T>> {
    let need = if scheme == RingVariant::S2 {
        5
    } else if scheme == RingVariant::S1 {
        3
    } else {
        4
    };
    if params.len() != need {
        return Err(Error::Dimension { expected: need, got: params.len() });
    }
    let p = |i: usize| params[i].clone();
    match scheme {
        RingVariant::S1 => gf_s1_series(p(0), p(1), p(2)),
        RingVariant::BipartiteB => gf_bipartite_b_series(p(0), p(1), p(2), p(3)),
        RingVariant::BipartiteA => gf_bipartite_a_series(p(0), p(1), p(2), p(3)),
        RingVariant::S2 => gf_s2_series(p(0), p(1), p(2), p(3), p(4)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn geometric_and_binomial() {
        let g = RationalSeries::new(vec![1.0], vec![1.0, -2.0]).unwrap();
        assert_eq!(series_coeff(&g, 10).unwrap(), 1024.0);
        let b = RationalSeries::new(vec![1.0], vec![1.0, -2.0, 1.0]).unwrap();
        assert_eq!(series_coeff(&b, 5).unwrap(), 6.0);
        assert_eq!(RationalSeries::new(vec![1.0], vec![0.0, 1.0]), Err(Error::SingularSeries));
    }

    #[test]
    fn unit_parameters_count_configurations() {
        for scheme in RingVariant::ALL {
            let k = if scheme == RingVariant::S2 {
                5
            } else if scheme == RingVariant::S1 {
                3
            } else {
                4
            };
            let series = gf_series(scheme, &vec![rat(1, 1); k]).unwrap();
            let c = series.coefficients(20);
            for n in 3..=20usize {
                if scheme == RingVariant::S2 && n % 2 == 1 {
                    assert_eq!(c[n], rat(0, 1));
                } else {
                    assert_eq!(c[n], BigRational::from_integer(BigInt::from(1u64 << n)), "{scheme:?} {n}");
                }
            }
        }
    }

    #[test]
    fn domain_examples() {
        let zero = Config::zeros(6);
        assert_eq!(domain_stats(&zero, RingVariant::S1).unwrap(), DomainStats::S1 { n: 0, c1: 0, c2s: 0 });
        let x = Config::from_bits(&[1, 1, 0, 0, 0]);
        assert_eq!(domain_stats(&x, RingVariant::S1).unwrap(), DomainStats::S1 { n: 2, c1: 0, c2s: 1 });
        let total: u64 = domain_table(8, RingVariant::S2).unwrap().values().sum();
        assert_eq!(total, 256);
    }
}
