//! Correlators as products of noise factors over linear forms of the bits.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::purification::{first_order_exponent, CorrelatorTable};

/// Mean of a term and its partial derivatives, keyed by variable.
pub(crate) type TermExtension<T> = (T, Vec<(usize, T)>);

/// Bit vector `x` labelling the stabilizer element `K_x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Config {
    n: usize,
    words: Vec<u64>,
}

impl Config {
    pub fn zeros(n: usize) -> Self {
        Config { n, words: vec![0; n.div_ceil(64).max(1)] }
    }

    /// Low `n` bits of `bits`; requires `n <= 64`.
    pub fn from_u64(n: usize, bits: u64) -> Self {
        assert!(n <= 64, "from_u64 needs n <= 64");
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Config { n, words: vec![bits & mask] }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut c = Config::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            c.set(i, b != 0);
        }
        c
    }

    pub fn from_words(n: usize, mut words: Vec<u64>) -> Self {
        words.resize(n.div_ceil(64).max(1), 0);
        if !n.is_multiple_of(64) {
            let last = n / 64;
            words[last] &= (1u64 << (n % 64)) - 1;
        }
        Config { n, words }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize) -> u8 {
        ((self.words[i / 64] >> (i % 64)) & 1) as u8
    }

    pub fn set(&mut self, i: usize, on: bool) {
        let bit = 1u64 << (i % 64);
        if on {
            self.words[i / 64] |= bit;
        } else {
            self.words[i / 64] &= !bit;
        }
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// XOR of the bits at `indices`.
    pub fn xor_over(&self, indices: &[usize]) -> u8 {
        indices.iter().fold(0, |acc, &i| acc ^ self.get(i))
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.n).map(|i| self.get(i)).collect()
    }
}

/// XOR of a set of configuration bits.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Form {
    parts: Vec<(usize, u64)>,
}

impl Form {
    pub fn zero() -> Self {
        Form::default()
    }

    pub fn var(i: usize) -> Self {
        Form { parts: vec![(i / 64, 1u64 << (i % 64))] }
    }

    pub fn xor_of<I: IntoIterator<Item = usize>>(vars: I) -> Self {
        vars.into_iter().fold(Form::zero(), |f, v| f.xor(&Form::var(v)))
    }

    pub fn xor(&self, other: &Form) -> Form {
        let mut map: BTreeMap<usize, u64> = self.parts.iter().copied().collect();
        for &(w, m) in &other.parts {
            *map.entry(w).or_default() ^= m;
        }
        Form { parts: map.into_iter().filter(|&(_, m)| m != 0).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    #[inline]
    pub fn eval(&self, x: &[u64]) -> u8 {
        let mut acc = 0u64;
        for &(w, m) in &self.parts {
            acc ^= x[w] & m;
        }
        (acc.count_ones() & 1) as u8
    }

    /// Variables with odd multiplicity, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for &(w, m) in &self.parts {
            let mut m = m;
            while m != 0 {
                let b = m.trailing_zeros() as usize;
                out.push(w * 64 + b);
                m &= m - 1;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rate {
    /// Measurement / single-qubit preparation noise.
    P1,
    /// Two-qubit gate noise.
    P2,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    /// `(1 - p_rate)^(mult * θ(forms))`.
    Noise { rate: Rate, mult: u32, forms: Vec<Form> },
    /// Purified star correlator at center value `center` and leaf weight
    /// `Σ leaves`.
    Purified { center: Form, leaves: Vec<Form> },
}

impl Term {
    pub fn noise(rate: Rate, forms: Vec<Form>) -> Self {
        Term::Noise { rate, mult: 1, forms }
    }

    /// All variables the term depends on, ascending and deduplicated.
    pub fn support(&self) -> Vec<usize> {
        let mut vars: Vec<usize> = match self {
            Term::Noise { forms, .. } => forms.iter().flat_map(Form::support).collect(),
            Term::Purified { center, leaves } => {
                center.support().into_iter().chain(leaves.iter().flat_map(Form::support)).collect()
            }
        };
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    /// Forms rewritten as bit masks over positions in `support`.
    fn local_forms(&self, support: &[usize]) -> Vec<u64> {
        let local = |f: &Form| {
            f.support().iter().fold(0u64, |m, v| m | 1u64 << support.binary_search(v).expect("variable in support"))
        };
        match self {
            Term::Noise { forms, .. } => forms.iter().map(local).collect(),
            Term::Purified { center, leaves } => std::iter::once(center).chain(leaves.iter()).map(local).collect(),
        }
    }
}

/// How purified stars and Bell pairs enter the correlators.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Purification {
    /// Perfect stars.
    #[default]
    Ideal,
    /// First-order fixed point at the noise model's `p`.
    FirstOrder,
    /// Explicit leaf-symmetric tables, keyed by leaf count.
    Tables(BTreeMap<usize, CorrelatorTable>),
}

impl Purification {
    pub fn value(&self, j: usize, a: usize, w: usize, noise: &NoiseModel) -> f64 {
        match self {
            Purification::Ideal => 1.0,
            Purification::FirstOrder => 1.0 - noise.p * first_order_exponent(j, a, w) as f64,
            Purification::Tables(map) => map[&j].get(a, w),
        }
    }

    pub fn table(&self, j: usize, noise: &NoiseModel) -> Result<CorrelatorTable> {
        match self {
            Purification::Ideal => Ok(CorrelatorTable::ideal(j)),
            Purification::FirstOrder => Ok(crate::purification::first_order_fixed_point(j, noise.p)),
            Purification::Tables(map) => {
                map.get(&j).cloned().ok_or_else(|| Error::Spec(format!("no purification table for j = {j}")))
            }
        }
    }

    pub(crate) fn check(&self, needed: impl IntoIterator<Item = usize>) -> Result<()> {
        if let Purification::Tables(map) = self {
            for j in needed {
                match map.get(&j) {
                    None => return Err(Error::Spec(format!("no purification table for j = {j}"))),
                    Some(t) if t.j() != j => return Err(Error::Spec(format!("table keyed {j} has j = {}", t.j()))),
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

/// A compiled correlator: `<K_x> = Π_terms factor(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    n: usize,
    terms: Vec<Term>,
    purification: Purification,
}

impl Model {
    pub fn new(n: usize, terms: Vec<Term>, purification: Purification) -> Result<Self> {
        let needed: Vec<usize> = terms
            .iter()
            .filter_map(|t| match t {
                Term::Purified { leaves, .. } => Some(leaves.len()),
                _ => None,
            })
            .collect();
        purification.check(needed)?;
        Ok(Model { n, terms, purification })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn purification(&self) -> &Purification {
        &self.purification
    }

    fn check_len(&self, x: &Config) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: x.len() });
        }
        Ok(())
    }

    /// Integer noise exponents `(e1, e2)` and the product of purified factors.
    #[inline]
    fn accumulate(&self, x: &[u64], noise: &NoiseModel) -> (i32, i32, f64) {
        let (mut e1, mut e2, mut prod) = (0i32, 0i32, 1.0f64);
        for term in &self.terms {
            match term {
                Term::Noise { rate, mult, forms } => {
                    if forms.iter().any(|f| f.eval(x) != 0) {
                        match rate {
                            Rate::P1 => e1 += *mult as i32,
                            Rate::P2 => e2 += *mult as i32,
                        }
                    }
                }
                Term::Purified { center, leaves } => {
                    let a = center.eval(x) as usize;
                    let w = leaves.iter().map(|f| f.eval(x) as usize).sum();
                    prod *= self.purification.value(leaves.len(), a, w, noise);
                }
            }
        }
        (e1, e2, prod)
    }

    /// `<K_x>` from raw words; no length check.
    #[inline]
    pub fn correlator_words(&self, x: &[u64], noise: &NoiseModel) -> f64 {
        let (e1, e2, prod) = self.accumulate(x, noise);
        (1.0 - noise.p1).powi(e1) * (1.0 - noise.p2).powi(e2) * prod
    }

    pub fn correlator(&self, x: &Config, noise: &NoiseModel) -> Result<f64> {
        self.check_len(x)?;
        Ok(self.correlator_words(x.words(), noise))
    }

    /// Exponent `H(x)` with `<K_x> ≈ (1 - p)^H(x)` when `p1 = p2 = p`.
    /// Exact for gate and measurement factors; purified factors enter through
    /// their first-order exponents.
    pub fn hamiltonian_words(&self, x: &[u64]) -> Result<i64> {
        let mut h = 0i64;
        for term in &self.terms {
            match term {
                Term::Noise { mult, forms, .. } => {
                    if forms.iter().any(|f| f.eval(x) != 0) {
                        h += *mult as i64;
                    }
                }
                Term::Purified { center, leaves } => match self.purification {
                    Purification::Ideal => {}
                    Purification::FirstOrder => {
                        let a = center.eval(x) as usize;
                        let w = leaves.iter().map(|f| f.eval(x) as usize).sum();
                        h += first_order_exponent(leaves.len(), a, w) as i64;
                    }
                    Purification::Tables(_) => {
                        return Err(Error::Unsupported("no exponent form for tabulated purification".into()))
                    }
                },
            }
        }
        Ok(h)
    }

    pub fn hamiltonian(&self, x: &Config) -> Result<i64> {
        self.check_len(x)?;
        self.hamiltonian_words(x.words())
    }

    /// Exact `E_x[H(x)] / n` over uniform bits.
    pub fn first_order_decay(&self) -> Result<BigRational> {
        let mut total = BigRational::zero();
        for term in &self.terms {
            total += self.term_mean(term)?;
        }
        Ok(total / BigRational::from_integer(BigInt::from(self.n)))
    }

    fn term_mean(&self, term: &Term) -> Result<BigRational> {
        let support = term.support();
        let forms = term.local_forms(&support);
        match term {
            Term::Noise { mult, .. } => {
                let r = gf2_rank(&forms);
                let miss = BigRational::new(BigInt::one(), BigInt::one() << r);
                Ok((BigRational::one() - miss) * BigRational::from_integer(BigInt::from(*mult)))
            }
            Term::Purified { leaves, .. } => {
                let j = leaves.len();
                match self.purification {
                    Purification::Ideal => Ok(BigRational::zero()),
                    Purification::Tables(_) => {
                        Err(Error::Unsupported("no exponent form for tabulated purification".into()))
                    }
                    Purification::FirstOrder => {
                        let (basis, count) = image_enumerator(&forms);
                        let mut acc = BigInt::zero();
                        for values in basis.iter().take(count) {
                            let a = (values & 1) as usize;
                            let w = (values >> 1).count_ones() as usize;
                            acc += BigInt::from(first_order_exponent(j, a, w));
                        }
                        Ok(BigRational::new(acc, BigInt::from(count)))
                    }
                }
            }
        }
    }

    /// `E[h]` and `∂h/∂x_v` of each term's multilinear extension at bit
    /// density `s`, with purified factors replaced by their first-order
    /// exponents.
    pub(crate) fn multilinear_terms<T: Scalar>(&self, s: &T) -> Result<Vec<TermExtension<T>>> {
        let one_minus = T::one() - s.clone();
        let mut out = Vec::with_capacity(self.terms.len());
        for term in &self.terms {
            let support = term.support();
            let forms = term.local_forms(&support);
            let k = support.len();
            let mut values = Vec::with_capacity(1 << k);
            for assign in 0..1u64 << k {
                let vals: Vec<usize> = forms.iter().map(|f| ((f & assign).count_ones() & 1) as usize).collect();
                values.push(match term {
                    Term::Noise { mult, .. } => {
                        if vals.iter().any(|&v| v != 0) {
                            *mult as u64
                        } else {
                            0
                        }
                    }
                    Term::Purified { leaves, .. } => match self.purification {
                        Purification::Ideal => 0,
                        Purification::FirstOrder => {
                            first_order_exponent(leaves.len(), vals[0], vals[1..].iter().sum()) as u64
                        }
                        Purification::Tables(_) => {
                            return Err(Error::Unsupported("mean field needs an exponent form for purification".into()))
                        }
                    },
                });
            }
            // weight of `assign` over the bits outside `skip`
            let weight = |assign: u64, skip: Option<usize>| -> T {
                (0..k)
                    .filter(|&i| Some(i) != skip)
                    .fold(T::one(), |w, i| w * if assign >> i & 1 == 1 { s.clone() } else { one_minus.clone() })
            };
            let mut mean = T::zero();
            for (assign, &v) in values.iter().enumerate() {
                if v != 0 {
                    mean = mean + weight(assign as u64, None) * T::from_u64(v);
                }
            }
            let mut derivs = Vec::with_capacity(k);
            for (i, &var) in support.iter().enumerate() {
                let mut d = T::zero();
                for (assign, &v) in values.iter().enumerate() {
                    let assign = assign as u64;
                    if assign >> i & 1 == 1 && v != values[(assign ^ 1 << i) as usize] {
                        let diff = T::from_u64(v) - T::from_u64(values[(assign ^ 1 << i) as usize]);
                        d = d + weight(assign, Some(i)) * diff;
                    }
                }
                derivs.push((var, d));
            }
            out.push((mean, derivs));
        }
        Ok(out)
    }
}

/// Number types the multilinear expansion is evaluated in (`f64` and exact rationals).
pub trait Scalar: Clone + Zero + One + std::ops::Sub<Output = Self> + std::ops::Mul<Output = Self> {
    fn from_u64(v: u64) -> Self;
}

impl Scalar for f64 {
    fn from_u64(v: u64) -> Self {
        v as f64
    }
}

impl Scalar for BigRational {
    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

/// Rank over GF(2) of bit-mask vectors.
pub(crate) fn gf2_rank(rows: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for &r in rows {
        let mut v = r;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// Every value the form tuple takes as the bits range uniformly, each listed
/// once (the image is a subspace, so all values are equally likely). Bit `i`
/// of an entry is the value of form `i`.
fn image_enumerator(forms: &[u64]) -> (Vec<u64>, usize) {
    // Pick an independent subset of forms; the rest are combinations of it.
    let mut chosen: Vec<usize> = Vec::new();
    let mut reduced: Vec<(u64, u64)> = Vec::new(); // (vector, combination of chosen)
    let mut combos = vec![0u64; forms.len()];
    for (i, &f) in forms.iter().enumerate() {
        let mut v = f;
        let mut c = 0u64;
        for &(b, bc) in &reduced {
            if v ^ b < v {
                v ^= b;
                c ^= bc;
            }
        }
        if v == 0 {
            combos[i] = c;
        } else {
            let idx = chosen.len();
            chosen.push(i);
            combos[i] = 1 << idx;
            reduced.push((v, c ^ (1 << idx)));
            reduced.sort_unstable_by_key(|a| std::cmp::Reverse(a.0));
        }
    }
    let r = chosen.len();
    let values = (0..1u64 << r)
        .map(|free| {
            combos.iter().enumerate().fold(0u64, |acc, (i, &c)| acc | ((((c & free).count_ones() & 1) as u64) << i))
        })
        .collect();
    (values, 1usize << r)
}
