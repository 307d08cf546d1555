#![allow(dead_code, clippy::needless_range_loop)]

use nonlocality::quantum::MeasurementSettings;
use nonlocality::seesaw::{random_settings, random_unitary};
use nonlocality::tensor::{CMatrix, DensityMatrix, PureState, UnitaryMatrix};
use nonlocality::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex<f64>> {
    (0..n).map(|_| Complex::new(StandardNormal.sample(rng), StandardNormal.sample(rng))).collect()
}

pub fn random_pure(d: usize, rng: &mut ChaCha8Rng) -> PureState<f64> {
    PureState::normalized(d, gaussian_vector(d * d, rng)).unwrap()
}

/// Wishart-type density matrix `G G† / tr(G G†)` with `rank` columns.
pub fn random_density(d: usize, rank: usize, rng: &mut ChaCha8Rng) -> DensityMatrix<f64> {
    let n = d * d;
    let g = CMatrix::from_fn(n, rank, |_, _| Complex::new(StandardNormal.sample(rng), StandardNormal.sample(rng)));
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(d, m.scale(1.0 / tr).hermitian_part()).unwrap()
}

pub fn random_local_density(d: usize, rng: &mut ChaCha8Rng) -> CMatrix<f64> {
    let g = CMatrix::from_fn(d, d, |_, _| Complex::new(StandardNormal.sample(rng), StandardNormal.sample(rng)));
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    m.scale(1.0 / tr).hermitian_part()
}

pub fn random_product_pure(d: usize, rng: &mut ChaCha8Rng) -> DensityMatrix<f64> {
    let a = normalize(gaussian_vector(d, rng));
    let b = normalize(gaussian_vector(d, rng));
    let v = nonlocality::tensor::kron_vec(&a, &b);
    DensityMatrix::new(d, CMatrix::outer(&v, &v).hermitian_part()).unwrap()
}

/// Convex combination of `terms` random product states.
pub fn random_separable(d: usize, terms: usize, rng: &mut ChaCha8Rng) -> DensityMatrix<f64> {
    let weights: Vec<f64> = (0..terms).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut m = CMatrix::zeros(d * d, d * d);
    for w in weights {
        let p = random_local_density(d, rng).kron(&random_local_density(d, rng));
        m.add_scaled(w / total, &p);
    }
    DensityMatrix::new(d, m.hermitian_part()).unwrap()
}

pub fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix<f64> {
    let g = CMatrix::from_fn(n, n, |_, _| Complex::new(StandardNormal.sample(rng), StandardNormal.sample(rng)));
    g.hermitian_part()
}

pub fn normalize(v: Vec<Complex<f64>>) -> Vec<Complex<f64>> {
    let n = nonlocality::tensor::norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

pub fn settings(d: usize, rng: &mut ChaCha8Rng) -> MeasurementSettings<f64> {
    random_settings(d, rng)
}

pub fn unitary(d: usize, rng: &mut ChaCha8Rng) -> UnitaryMatrix<f64> {
    random_unitary(d, rng)
}

/// Phase vectors uniform in (-π, π).
pub fn random_phases(d: usize, rng: &mut ChaCha8Rng) -> [Vec<f64>; 2] {
    let pi = std::f64::consts::PI;
    let mut v = || (0..d).map(|_| rng.random_range(-pi..pi)).collect::<Vec<_>>();
    [v(), v()]
}

/// `⟨m m̃|B|j j̃⟩` at d = 3 written out from the expanded two-qutrit Bell
/// expression in terms of the six free phases; independent of the
/// projector-sum construction.
pub fn closed_form_operator_d3(alice: &[Vec<f64>; 2], bob: &[Vec<f64>; 2]) -> CMatrix<f64> {
    let w = |x: i64| Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * x as f64 / 3.0);
    let e = |x: f64| Complex::from_polar(1.0, x);
    let one = Complex::new(1.0, 0.0);
    CMatrix::from_fn(9, 9, |row, col| {
        let (m, mt) = ((row / 3) as i64, (row % 3) as i64);
        let (j, jt) = ((col / 3) as i64, (col % 3) as i64);
        let sum_k: Complex<f64> = (0..3).map(|k| w(k * (j - m) - k * (jt - mt))).sum();
        let dp = |a: usize| alice[a][j as usize] - alice[a][m as usize];
        let dv = |b: usize| bob[b][jt as usize] - bob[b][mt as usize];
        let bracket = e(dp(0) + dv(0)) * (one - w(-(j - m)))
            + e(dp(1) + dv(0)) * (w(-(jt - mt)) - one)
            + e(dp(1) + dv(1)) * (one - w(-(j - m)))
            + e(dp(0) + dv(1)) * (one - w(jt - mt));
        sum_k * bracket / 9.0
    })
}

/// Joint probability from the phase-and-Fourier amplitude formula,
/// generalized to dimension d with prefactor 1/d² and root 2π/d.
pub fn closed_form_probability(phi: &PureState<f64>, alice: &[f64], bob: &[f64], k: usize, l: usize) -> f64 {
    let d = phi.dim();
    let mut acc = Complex::new(0.0, 0.0);
    for j in 0..d {
        for jt in 0..d {
            let angle = alice[j]
                + bob[jt]
                + ((j * k) as f64 - (jt * l) as f64) * 2.0 * std::f64::consts::PI / d as f64;
            acc += Complex::from_polar(1.0, angle) * phi.amplitude(j, jt);
        }
    }
    acc.norm_sqr() / (d * d) as f64
}
