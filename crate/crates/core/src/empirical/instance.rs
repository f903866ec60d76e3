use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One random system `y = A x_true` with a k-sparse `x_true`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub a: DMatrix<f64>,
    pub x_true: DVector<f64>,
    pub support: Vec<usize>,
    pub signs: Vec<f64>,
    pub y: DVector<f64>,
    pub seed: u64,
}

impl ProblemInstance {
    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn k(&self) -> usize {
        self.support.len()
    }
}

/// Sizes of a generated system, kept alongside verification output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub n: usize,
    pub m: usize,
    pub k: usize,
}

pub fn check_dims(n: usize, m: usize, k: usize) -> Result<()> {
    if m == 0 || m >= n {
        return Err(Error::Dimension(format!("need 0 < m < n, got m = {m}, n = {n}")));
    }
    if k > m {
        return Err(Error::Dimension(format!("need k <= m, got k = {k}, m = {m}")));
    }
    Ok(())
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of the `index`-th independent task derived from `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng.next_u64()
}

pub fn gaussian_matrix<R: Rng>(m: usize, n: usize, rng: &mut R) -> DMatrix<f64> {
    // column-major fill, so column j only depends on the draws before it
    DMatrix::from_fn(m, n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Random k-sparse vector: uniform support, magnitudes |N(0,1)| + 0.5,
/// uniform signs unless `nonneg`.
pub fn sparse_vector<R: Rng>(n: usize, k: usize, nonneg: bool, rng: &mut R) -> (DVector<f64>, Vec<usize>, Vec<f64>) {
    let mut support = index::sample(rng, n, k).into_vec();
    support.sort_unstable();
    let mut x = DVector::zeros(n);
    let mut signs = Vec::with_capacity(k);
    for &i in &support {
        let mag = rng.sample::<f64, _>(StandardNormal).abs() + 0.5;
        let s = if nonneg || rng.gen::<bool>() { 1.0 } else { -1.0 };
        signs.push(s);
        x[i] = s * mag;
    }
    (x, support, signs)
}

pub fn generate_instance(n: usize, m: usize, k: usize, nonneg: bool, seed: u64) -> Result<ProblemInstance> {
    check_dims(n, m, k)?;
    let mut rng = rng_from_seed(seed);
    let a = gaussian_matrix(m, n, &mut rng);
    let (x_true, support, signs) = sparse_vector(n, k, nonneg, &mut rng);
    let y = &a * &x_true;
    Ok(ProblemInstance { a, x_true, support, signs, y, seed })
}

/// Place a fresh random k-sparse vector on an existing matrix.
pub fn place_on(a: &DMatrix<f64>, k: usize, nonneg: bool, seed: u64) -> Result<ProblemInstance> {
    let (m, n) = a.shape();
    check_dims(n, m, k)?;
    let mut rng = rng_from_seed(seed);
    let (x_true, support, signs) = sparse_vector(n, k, nonneg, &mut rng);
    let y = a * &x_true;
    Ok(ProblemInstance { a: a.clone(), x_true, support, signs, y, seed })
}
