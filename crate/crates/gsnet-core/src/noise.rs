//! Depolarizing noise parameters and the indicator used by every noise factor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a two-qubit depolarizing gate decides whether a stabilizer element is hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Semantics {
    /// Hit if any bit of the two qubits or their neighbourhoods is set.
    #[default]
    Or,
    /// Hit if the element restricted to either qubit is a nontrivial Pauli;
    /// stacked Z's from several neighbours cancel pairwise.
    ExactXor,
}

/// Error rates of channels (`pc`), measurements (`p1`), two-qubit gates (`p2`)
/// and the first-order purification model (`p`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
    pub pc: f64,
    pub p: f64,
    pub semantics: Semantics,
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64, pc: f64, p: f64, semantics: Semantics) -> Result<Self> {
        for (name, v) in [("p1", p1), ("p2", p2), ("pc", pc), ("p", p)] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::Parameter(format!("{name} = {v} outside [0, 1)")));
            }
        }
        Ok(NoiseModel { p1, p2, pc, p, semantics })
    }

    /// `p1 = p2 = p`, no channel noise, OR semantics.
    pub fn uniform(p: f64) -> Result<Self> {
        NoiseModel::new(p, p, 0.0, p, Semantics::Or)
    }

    pub fn noiseless() -> Self {
        NoiseModel { p1: 0.0, p2: 0.0, pc: 0.0, p: 0.0, semantics: Semantics::Or }
    }

    pub fn with_semantics(mut self, semantics: Semantics) -> Self {
        self.semantics = semantics;
        self
    }

    /// `β = -ln(1 - p)`.
    pub fn beta(&self) -> f64 {
        -(-self.p).ln_1p()
    }

    pub fn is_uniform(&self) -> bool {
        self.p1 == self.p && self.p2 == self.p
    }
}

/// 1 if any bit is set.
pub fn theta(bits: &[u8]) -> u8 {
    bits.iter().any(|&b| b != 0) as u8
}
