//! Seeded randomness shared by the budgeted searches.
//!
//! Every search takes an explicit seed; identical seeds give identical runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, Mat};
use crate::rational::{q, qf, Q};

/// Seed used when a caller does not pick one.
pub const DEFAULT_SEED: u64 = 7;

/// Budget for the randomized/enumerative searches.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Integer coefficients are drawn from `[-coeff_bound, coeff_bound]`.
    pub coeff_bound: i64,
    /// Number of seeded random trials.
    pub random_trials: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            coeff_bound: 2,
            random_trials: 200,
            seed: DEFAULT_SEED,
        }
    }
}

impl SearchBudget {
    pub fn with_seed(seed: u64) -> Self {
        SearchBudget {
            seed,
            ..Default::default()
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        rng(self.seed)
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer matrix with determinant ±1, built from `n * 3` random elementary
/// operations with multipliers in `[-bound, bound]` and a random permutation.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize, bound: i64) -> Mat {
    let mut m = linalg::identity(n);
    if n < 2 {
        if n == 1 && rng.random_bool(0.5) {
            m[0][0] = q(-1);
        }
        return m;
    }
    for _ in 0..3 * n {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = q(rng.random_range(-bound..=bound));
        // row_i += c * row_j
        let row_j = m[j].clone();
        for (x, y) in m[i].iter_mut().zip(&row_j) {
            *x += &c * y;
        }
    }
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        m.swap(i, j);
    }
    m
}

/// Random integer matrix with entries in `[-bound, bound]`, retried until
/// invertible (at most 1000 draws, then the identity).
pub fn random_invertible<R: Rng>(rng: &mut R, n: usize, bound: i64) -> Mat {
    for _ in 0..1000 {
        let m: Mat = (0..n)
            .map(|_| (0..n).map(|_| q(rng.random_range(-bound..=bound))).collect())
            .collect();
        if linalg::rank(&m, n) == n {
            return m;
        }
    }
    linalg::identity(n)
}

/// Small random rational `p / q` with `p` in `[-num, num]` and `q` in `[1, den]`.
pub fn random_rational<R: Rng>(rng: &mut R, num: i64, den: i64) -> Q {
    qf(rng.random_range(-num..=num), rng.random_range(1..=den))
}

/// Like [`random_rational`] but never zero.
pub fn random_nonzero_rational<R: Rng>(rng: &mut R, num: i64, den: i64) -> Q {
    let mut p = rng.random_range(1..=num);
    if rng.random_bool(0.5) {
        p = -p;
    }
    qf(p, rng.random_range(1..=den))
}
