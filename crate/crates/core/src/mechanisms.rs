//! Noise primitives: the Laplace mechanism and the Binary (tree-aggregation)
//! Mechanism for continual release of prefix sums.

use rand::RngCore;

use crate::error::{Error, Result};

/// Centered Laplace distribution with density proportional to `exp(-|x| / scale)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaplaceNoise {
    scale: f64,
}

impl LaplaceNoise {
    pub fn new(scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "Laplace scale must be positive and finite, got {scale}"
            )));
        }
        Ok(Self { scale })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn variance(&self) -> f64 {
        2.0 * self.scale * self.scale
    }

    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        // one word: the low bit picks the sign, the top 53 bits give u in [0, 1)
        let bits = rng.next_u64();
        let u = (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let magnitude = -(1.0 - u).ln() * self.scale;
        if bits & 1 == 0 {
            magnitude
        } else {
            -magnitude
        }
    }
}

pub fn laplace_sample<R: RngCore + ?Sized>(scale: f64, rng: &mut R) -> Result<f64> {
    Ok(LaplaceNoise::new(scale)?.sample(rng))
}

/// High-probability bound on `|Y|` for `Y` a sum of `terms` independent
/// `Laplace(scale)` draws: `P(|Y| > bound) <= delta`.
///
/// Uses the sub-exponential tail for Laplace sums,
/// `sqrt(8 ln(2/delta)) * scale * max(sqrt(terms), sqrt(ln(2/delta)))`.
pub fn laplace_sum_bound(scale: f64, terms: u64, delta: f64) -> f64 {
    let log_term = (2.0 / delta).ln();
    (8.0 * log_term).sqrt() * scale * (terms.max(1) as f64).sqrt().max(log_term.sqrt())
}

/// Constant `c` in [`BinaryMechanismCounter::max_error_bound`].
///
/// A release at time `t` sums at most `D = floor(log2 T) + 1` node noises, so the
/// Laplace-sum tail with a union bound over `T` releases gives
/// `sqrt(8) * b * sqrt(D) * ln(2T / beta)`. For `T >= 2` and `beta <= 1/2`,
/// `sqrt(D) <= sqrt(2 log2 T)` and `ln(2T / beta) <= 3 log2(T) ln(1 / beta)`,
/// which yields `c = sqrt(8) * sqrt(2) * 3 = 12`. The `T = 1` case is a single
/// Laplace draw and is covered by the same constant.
pub const BM_ERROR_CONSTANT: f64 = 12.0;

/// Number of tree levels a stream of length `capacity` can use: `floor(log2 capacity) + 1`.
pub fn tree_depth(capacity: u64) -> u32 {
    assert!(capacity >= 1, "capacity must be positive");
    u64::BITS - capacity.leading_zeros()
}

/// Streaming counter that releases noisy prefix sums of a bounded stream.
///
/// Each completed dyadic node at level `i` (ending at a time whose binary
/// representation has exactly `i` trailing zeros) receives one
/// `Laplace(1 / eps_prime)` draw at completion. The release after `t` appends
/// is the exact prefix plus the noise of the nodes in the binary decomposition
/// of `t`. Only the most recent node per level is ever needed again, so the
/// counter keeps one noise value per level.
#[derive(Clone, Debug)]
pub struct BinaryMechanismCounter {
    capacity: u64,
    eps_prime: f64,
    noise: Option<LaplaceNoise>,
    steps: u64,
    true_prefix: f64,
    level_noise: Vec<f64>,
}

impl BinaryMechanismCounter {
    pub fn new(capacity: u64, eps_prime: f64) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::InvalidArgument(
                "counter capacity must be positive".into(),
            ));
        }
        if !(eps_prime > 0.0) || !eps_prime.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "per-node budget must be positive and finite, got {eps_prime}"
            )));
        }
        Ok(Self {
            capacity,
            eps_prime,
            noise: Some(LaplaceNoise::new(1.0 / eps_prime)?),
            steps: 0,
            true_prefix: 0.0,
            level_noise: vec![0.0; tree_depth(capacity) as usize],
        })
    }

    /// Counter whose releases are exact; consumes no randomness.
    pub fn zero_noise(capacity: u64, eps_prime: f64) -> Result<Self> {
        let mut counter = Self::new(capacity, eps_prime)?;
        counter.noise = None;
        Ok(counter)
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn eps_prime(&self) -> f64 {
        self.eps_prime
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn is_zero_noise(&self) -> bool {
        self.noise.is_none()
    }

    pub fn append<R: RngCore + ?Sized>(&mut self, value: f64, rng: &mut R) -> Result<()> {
        if self.steps >= self.capacity {
            return Err(Error::InvalidState(format!(
                "counter capacity {} exhausted",
                self.capacity
            )));
        }
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidArgument(format!(
                "stream values must lie in [0, 1], got {value}"
            )));
        }
        self.steps += 1;
        self.true_prefix += value;
        let level = self.steps.trailing_zeros() as usize;
        self.level_noise[level] = match &self.noise {
            Some(lap) => lap.sample(rng),
            None => 0.0,
        };
        Ok(())
    }

    /// Noisy prefix sum over everything appended so far.
    pub fn release(&self) -> Result<f64> {
        if self.steps == 0 {
            return Err(Error::InvalidState(
                "release before the first append".into(),
            ));
        }
        Ok(self.true_prefix + self.release_noise())
    }

    #[inline]
    fn release_noise(&self) -> f64 {
        let mut t = self.steps;
        let mut total = 0.0;
        while t != 0 {
            let level = t.trailing_zeros() as usize;
            total += self.level_noise[level];
            t &= t - 1;
        }
        total
    }

    /// Number of Laplace terms inside the current release.
    pub fn noise_terms_in_release(&self) -> u32 {
        self.steps.count_ones()
    }

    /// The 1-based dyadic intervals whose noise enters the current release, longest first.
    pub fn release_cover(&self) -> Vec<(u64, u64)> {
        let mut cover = Vec::new();
        let mut start = 1;
        for level in (0..u64::BITS).rev() {
            if self.steps >> level & 1 == 1 {
                let len = 1u64 << level;
                cover.push((start, start + len - 1));
                start += len;
            }
        }
        cover
    }

    /// Bound on `max_t |release(t) - prefix(t)|` over all `t <= capacity`,
    /// holding with probability at least `1 - beta` for `beta <= 1/2`:
    /// `(BM_ERROR_CONSTANT / eps_prime) * max(log2 T, 1)^1.5 * ln(1 / beta)`.
    pub fn max_error_bound(eps_prime: f64, capacity: u64, beta: f64) -> f64 {
        let log_t = (capacity as f64).log2().max(1.0);
        BM_ERROR_CONSTANT / eps_prime * log_t.powf(1.5) * (1.0 / beta).ln()
    }

    #[doc(hidden)]
    pub fn exact_prefix_for_audit(&self) -> f64 {
        self.true_prefix
    }
}

/// Number of noisy tree nodes that contain stream position `k` (1-based) in a
/// counter of the given capacity, i.e. how many released node sums change when
/// that one stream element changes.
pub fn bm_sensitivity_audit(capacity: u64, k: u64) -> Result<u32> {
    if capacity == 0 || k == 0 || k > capacity {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k <= capacity, got k = {k}, capacity = {capacity}"
        )));
    }
    let offset = k - 1;
    let mut touched = 0;
    for level in 0..tree_depth(capacity) {
        let end = ((offset >> level) + 1) << level;
        // a level-`level` node only carries noise when it ends at a time with
        // exactly `level` trailing zeros
        if end <= capacity && (offset >> level) & 1 == 0 {
            touched += 1;
        }
    }
    Ok(touched)
}
