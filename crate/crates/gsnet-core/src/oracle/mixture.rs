use crate::error::{Error, Result};
use crate::noise::Semantics;
use crate::par::Execution;

use super::pauli::{Basis, Pauli};

/// Largest generator count the coefficient vector may hold.
pub const MAX_LIVE_QUBITS: usize = 24;
/// Qubit ids are bit positions in a `u64`.
pub const MAX_QUBIT_ID: usize = 64;

/// State diagonal in a stabilizer frame:
/// `ρ = 2^-m Σ_x coeffs[x] Π_i gens[i]^x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureState {
    gens: Vec<Pauli>,
    coeffs: Vec<f64>,
    live: u64,
    exec: Execution,
}

impl Default for MixtureState {
    fn default() -> Self {
        MixtureState { gens: Vec::new(), coeffs: vec![1.0], live: 0, exec: Execution::default() }
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            b
        })
    })
}

impl MixtureState {
    /// `|+>^n` on qubits `0..n`.
    pub fn prepare_plus(n: usize) -> Result<Self> {
        let mut s = MixtureState::default();
        for q in 0..n {
            s.add_plus(q)?;
        }
        Ok(s)
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn generators(&self) -> &[Pauli] {
        &self.gens
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn live(&self) -> u64 {
        self.live
    }

    pub fn add_plus(&mut self, q: usize) -> Result<()> {
        self.inject_graph_state(&[q], &[], &[1.0, 1.0])
    }

    /// Tensor in a star graph state (center joined to every leaf) whose
    /// stabilizer expectations are `full[a | b << 1]`, bit `a` the center
    /// and `b` the leaf pattern.
    pub fn inject_star(&mut self, center: usize, leaves: &[usize], full: &[f64]) -> Result<()> {
        let mut qubits = vec![center];
        qubits.extend_from_slice(leaves);
        let edges: Vec<(usize, usize)> = (1..qubits.len()).map(|l| (0, l)).collect();
        self.inject_graph_state(&qubits, &edges, full)
    }

    /// Tensor in a graph state on fresh `qubits` with edges between local
    /// indices, generator `i` being the stabilizer of `qubits[i]`.
    pub fn inject_graph_state(&mut self, qubits: &[usize], edges: &[(usize, usize)], coeffs: &[f64]) -> Result<()> {
        let k = qubits.len();
        if coeffs.len() != 1 << k {
            return Err(Error::Dimension { expected: 1 << k, got: coeffs.len() });
        }
        let mut fresh = 0u64;
        for &q in qubits {
            if q >= MAX_QUBIT_ID || (self.live | fresh) >> q & 1 == 1 {
                return Err(Error::Spec(format!("qubit {q} unavailable")));
            }
            fresh |= 1 << q;
        }
        if self.gens.len() + k > MAX_LIVE_QUBITS {
            return Err(Error::SizeLimit(format!(
                "{} live qubits exceed the budget of {MAX_LIVE_QUBITS}",
                self.gens.len() + k
            )));
        }
        let mut new: Vec<Pauli> = qubits.iter().map(|&q| Pauli::x(q)).collect();
        for &(a, b) in edges {
            new[a].z |= 1 << qubits[b];
            new[b].z |= 1 << qubits[a];
        }
        let m = self.gens.len();
        let old = std::mem::take(&mut self.coeffs);
        let mut out = vec![0.0; old.len() << k];
        for (y, &cy) in coeffs.iter().enumerate() {
            let base = y << m;
            for (x, &cx) in old.iter().enumerate() {
                out[base | x] = cx * cy;
            }
        }
        self.coeffs = out;
        self.gens.extend(new);
        self.live |= fresh;
        Ok(())
    }

    pub fn h(&mut self, q: usize) {
        self.gens.iter_mut().for_each(|g| g.h(q));
    }

    pub fn s(&mut self, q: usize) {
        self.gens.iter_mut().for_each(|g| g.s(q));
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        self.gens.iter_mut().for_each(|g| g.cz(a, b));
    }

    /// Generator masks `(X at q, Z at q)`.
    fn site_masks(&self, q: usize) -> (u64, u64) {
        let (mut mx, mut mz) = (0u64, 0u64);
        for (i, g) in self.gens.iter().enumerate() {
            mx |= ((g.x >> q) & 1) << i;
            mz |= ((g.z >> q) & 1) << i;
        }
        (mx, mz)
    }

    /// Multiply `coeffs[x]` by `keep` wherever `x` has odd overlap with one
    /// of `parities`.
    fn damp_parities(&mut self, parities: &[u64], keep: f64) {
        if keep == 1.0 {
            return;
        }
        self.exec.for_each_mut(&mut self.coeffs, |x, c| {
            if parities.iter().any(|&p| (x as u64 & p).count_ones() & 1 == 1) {
                *c *= keep;
            }
        });
    }

    /// Multiply `coeffs[x]` by `keep` wherever `x & mask != 0`.
    fn damp_any(&mut self, mask: u64, keep: f64) {
        if keep == 1.0 {
            return;
        }
        self.exec.for_each_mut(&mut self.coeffs, |x, c| {
            if x as u64 & mask != 0 {
                *c *= keep;
            }
        });
    }

    /// Single-qubit depolarizing channel: every Pauli string acting on `q`
    /// keeps a fraction `1 - p`.
    pub fn depolarize(&mut self, q: usize, p: f64) {
        let (mx, mz) = self.site_masks(q);
        self.damp_parities(&[mx, mz], 1.0 - p);
    }

    /// Two-qubit depolarizing channel on `{a, b}`.
    pub fn depolarize_pair(&mut self, a: usize, b: usize, p: f64) {
        let (ax, az) = self.site_masks(a);
        let (bx, bz) = self.site_masks(b);
        self.damp_parities(&[ax, az, bx, bz], 1.0 - p);
    }

    /// CPHASE followed by its gate noise. With [`Semantics::Or`] the
    /// noise hits every correlator with a one on `a`, `b` or any of their
    /// neighbours; this needs the state in graph frame.
    pub fn cphase(&mut self, a: usize, b: usize, p2: f64, semantics: Semantics) -> Result<()> {
        self.cz(a, b);
        match semantics {
            Semantics::ExactXor => self.depolarize_pair(a, b, p2),
            Semantics::Or => {
                let owner = self.graph_owner()?;
                let gen_of = |q: usize| owner.iter().position(|&o| o == q);
                let (ga, gb) = match (gen_of(a), gen_of(b)) {
                    (Some(x), Some(y)) => (x, y),
                    _ => return Err(Error::Spec(format!("qubits {a}, {b} not live"))),
                };
                let hood = (1u64 << a) | (1u64 << b) | self.gens[ga].z | self.gens[gb].z;
                let mask = bits(hood).filter_map(gen_of).fold(0u64, |m, i| m | 1 << i);
                self.damp_any(mask, 1.0 - p2);
            }
        }
        Ok(())
    }

    /// Qubit carrying each generator's single `X`, if the frame is a graph frame.
    fn graph_owner(&self) -> Result<Vec<usize>> {
        self.gens
            .iter()
            .map(|g| {
                if g.x.count_ones() == 1 && g.x & g.z == 0 {
                    Ok(g.x.trailing_zeros() as usize)
                } else {
                    Err(Error::Spec("state is not in graph frame".into()))
                }
            })
            .collect()
    }

    /// Replace the generators by products of the old ones: new generator `i`
    /// is the product over the old indices in `cols[i]`.
    fn rebase(&mut self, gens: Vec<Pauli>, cols: &[u64]) {
        let m = cols.len();
        let mut index = vec![0u64; 1 << m];
        let mut out = vec![0.0; 1 << m];
        out[0] = self.coeffs[0];
        for x in 1usize..1 << m {
            let low = x.trailing_zeros() as usize;
            index[x] = index[x & (x - 1)] ^ cols[low];
            out[x] = self.coeffs[index[x] as usize];
        }
        self.gens = gens;
        self.coeffs = out;
    }

    /// Measure `basis` on `q`, average the two outcome branches after the
    /// Pauli correction that maps each onto the `+1` branch, and drop `q`.
    pub fn measure(&mut self, q: usize, basis: Basis) -> Result<()> {
        if self.live >> q & 1 == 0 {
            return Err(Error::Spec(format!("qubit {q} is not live")));
        }
        let obs = Pauli::single(q, basis);
        let anti: Vec<usize> = (0..self.gens.len()).filter(|&i| !self.gens[i].commutes(obs)).collect();
        let Some(&k) = anti.first() else {
            return Err(Error::DegenerateMeasurement(q));
        };
        let mut gens = Vec::with_capacity(self.gens.len() - 1);
        let mut cols = Vec::with_capacity(self.gens.len() - 1);
        for (i, &g) in self.gens.iter().enumerate() {
            if i == k {
                continue;
            }
            let (mut g, mut col) = (g, 1u64 << i);
            if anti.contains(&i) {
                g = g * self.gens[k];
                col |= 1 << k;
            }
            if g.support() >> q & 1 == 1 {
                g = obs * g;
            }
            debug_assert_eq!(g.support() >> q & 1, 0);
            gens.push(g);
            cols.push(col);
        }
        self.rebase(gens, &cols);
        self.live &= !(1u64 << q);
        Ok(())
    }

    /// Depolarize `q` with `p1`, then [`measure`](Self::measure) it.
    pub fn measure_pauli(&mut self, q: usize, basis: Basis, p1: f64) -> Result<()> {
        self.depolarize(q, p1);
        self.measure(q, basis)
    }

    /// Bring the frame to graph form: generator `i` becomes
    /// `±X_q Π_{r ∈ N(q)} Z_r` for the `i`-th live qubit `q`, using
    /// generator products and local `H`/`S` corrections.
    pub fn to_graph_frame(&mut self) -> Result<()> {
        let qubits: Vec<usize> = bits(self.live).collect();
        let m = self.gens.len();
        if qubits.len() != m {
            return Err(Error::Spec(format!("{m} generators for {} live qubits", qubits.len())));
        }
        let (free, _) = eliminate(&self.gens, &qubits);
        for &q in &free {
            self.h(q);
        }
        let (free, rows) = eliminate(&self.gens, &qubits);
        if !free.is_empty() {
            return Err(Error::Spec("stabilizer X part is rank deficient".into()));
        }
        let gens: Vec<Pauli> =
            rows.iter().map(|&col| bits(col).fold(Pauli::IDENTITY, |p, i| p * self.gens[i])).collect();
        self.rebase(gens, &rows);
        for (i, &q) in qubits.iter().enumerate() {
            if self.gens[i].z >> q & 1 == 1 {
                self.s(q);
            }
        }
        for (i, &q) in qubits.iter().enumerate() {
            for (j, &r) in qubits.iter().enumerate() {
                if (self.gens[i].z >> r & 1) != (self.gens[j].z >> q & 1) {
                    return Err(Error::Spec("graph frame is not symmetric".into()));
                }
            }
        }
        Ok(())
    }

    /// Adjacency lists of the current graph frame over live qubits.
    pub fn graph_adjacency(&self) -> Result<Vec<(usize, Vec<usize>)>> {
        let owner = self.graph_owner()?;
        Ok(owner.iter().zip(&self.gens).map(|(&q, g)| (q, bits(g.z).collect())).collect())
    }

    /// `<K_x>` of the graph-frame stabilizers, `x` given as a set of live
    /// qubits, with the signs each generator's Pauli correction removes.
    pub fn graph_correlator(&self, ones: u64) -> Result<f64> {
        let owner = self.graph_owner()?;
        let mut idx = 0usize;
        let mut sign = 1.0;
        for (i, &q) in owner.iter().enumerate() {
            if ones >> q & 1 == 1 {
                idx |= 1 << i;
                sign *= self.coeffs[1 << i].signum();
            }
        }
        Ok(self.coeffs[idx] * sign)
    }
}

/// Gauss-Jordan on the X part over `qubits`. Returns the qubits without a
/// pivot and, for each output row, the mask of input generators it combines.
/// Rows with a pivot come first, ordered by pivot qubit.
fn eliminate(gens: &[Pauli], qubits: &[usize]) -> (Vec<usize>, Vec<u64>) {
    let mut rows: Vec<(u64, u64)> = gens.iter().enumerate().map(|(i, g)| (g.x, 1u64 << i)).collect();
    let mut rank = 0;
    let mut free = Vec::new();
    for &q in qubits {
        let bit = 1u64 << q;
        match (rank..rows.len()).find(|&r| rows[r].0 & bit != 0) {
            Some(r) => {
                rows.swap(rank, r);
                let pivot = rows[rank];
                for (i, row) in rows.iter_mut().enumerate() {
                    if i != rank && row.0 & bit != 0 {
                        row.0 ^= pivot.0;
                        row.1 ^= pivot.1;
                    }
                }
                rank += 1;
            }
            None => free.push(q),
        }
    }
    (free, rows.into_iter().map(|r| r.1).collect())
}
