use serde::{Deserialize, Serialize};

/// `i^phase · X^x · Z^z` over up to 64 qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Pauli {
    pub x: u64,
    pub z: u64,
    pub phase: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const IDENTITY: Pauli = Pauli { x: 0, z: 0, phase: 0 };

    pub fn x(q: usize) -> Self {
        Pauli { x: 1 << q, z: 0, phase: 0 }
    }

    pub fn z(q: usize) -> Self {
        Pauli { x: 0, z: 1 << q, phase: 0 }
    }

    pub fn y(q: usize) -> Self {
        Pauli { x: 1 << q, z: 1 << q, phase: 1 }
    }

    pub fn single(q: usize, basis: Basis) -> Self {
        match basis {
            Basis::X => Pauli::x(q),
            Basis::Y => Pauli::y(q),
            Basis::Z => Pauli::z(q),
        }
    }

    pub fn commutes(self, other: Pauli) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    pub fn is_hermitian(self) -> bool {
        self.phase as u32 % 2 == (self.x & self.z).count_ones() % 2
    }

    pub fn support(self) -> u64 {
        self.x | self.z
    }

    /// Sign of a Hermitian string written as `±` times its `X`/`Y`/`Z` factors.
    pub fn sign(self) -> i8 {
        let ys = (self.x & self.z).count_ones();
        // i^phase X Z = i^(phase - 1) Y on each Y site
        let rel = (self.phase as u32 + 4 * ys - ys) % 4;
        if rel == 0 {
            1
        } else {
            -1
        }
    }

    pub fn h(&mut self, q: usize) {
        let bit = 1u64 << q;
        let (xb, zb) = (self.x & bit, self.z & bit);
        if xb != 0 && zb != 0 {
            self.phase = (self.phase + 2) % 4;
        }
        self.x = (self.x & !bit) | zb;
        self.z = (self.z & !bit) | xb;
    }

    pub fn s(&mut self, q: usize) {
        let bit = 1u64 << q;
        if self.x & bit != 0 {
            self.phase = (self.phase + 1) % 4;
            self.z ^= bit;
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        let xa = (self.x >> a) & 1;
        let xb = (self.x >> b) & 1;
        if xa & xb == 1 {
            self.phase = (self.phase + 2) % 4;
        }
        self.z ^= (xb << a) | (xa << b);
    }
}

impl std::ops::Mul for Pauli {
    type Output = Pauli;

    fn mul(self, other: Pauli) -> Pauli {
        let swap = 2 * (self.z & other.x).count_ones();
        Pauli {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            phase: ((self.phase as u32 + other.phase as u32 + swap) % 4) as u8,
        }
    }
}
