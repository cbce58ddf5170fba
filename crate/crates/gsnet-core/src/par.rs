//! Deterministic fan-out over index ranges.
//!
//! Work is split into fixed-size blocks whose results come back in block
//! order, so reductions done by the caller give identical bits regardless of
//! the number of worker threads or whether rayon is enabled at all.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Maps `f` over `0..n`, returning results in index order.
    pub fn map_indexed<T, F>(self, n: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    /// Applies `f` to every element of `data` in place.
    pub fn for_each_mut<T, F>(self, data: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize, &mut T) + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel if data.len() >= PAR_MIN_LEN => {
                use rayon::prelude::*;
                data.par_iter_mut().enumerate().for_each(|(i, v)| f(i, v));
            }
            _ => data.iter_mut().enumerate().for_each(|(i, v)| f(i, v)),
        }
    }
}

const PAR_MIN_LEN: usize = 1 << 12;

/// Number of items handled by one block in Monte Carlo and enumeration loops.
pub const BLOCK: u64 = 1 << 10;

/// Independent random stream for task `stream` under base `seed`.
pub fn task_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `f(block, range)` over consecutive blocks of `0..n`, in block order.
pub fn blocks<T, F>(exec: Execution, n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, std::ops::Range<u64>) -> T + Sync + Send,
{
    let count = n.div_ceil(BLOCK);
    exec.map_indexed(count, |b| {
        let lo = b * BLOCK;
        f(b, lo..(lo + BLOCK).min(n))
    })
}

/// Sum and sum of squares of `f` over `0..n`, reduced block by block in order.
pub fn block_sum<F>(exec: Execution, n: u64, f: F) -> (f64, f64)
where
    F: Fn(u64) -> f64 + Sync + Send,
{
    blocks(exec, n, |_, range| {
        let (mut s, mut s2) = (0.0, 0.0);
        for i in range {
            let v = f(i);
            s += v;
            s2 += v * v;
        }
        (s, s2)
    })
    .into_iter()
    .fold((0.0, 0.0), |(a, b), (s, s2)| (a + s, b + s2))
}
