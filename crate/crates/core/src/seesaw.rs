//! See-saw search for the largest quantum value of a Bell functional over
//! pure states and complete Von Neumann measurements.
//!
//! One iteration makes three half-steps: the state becomes the top
//! eigenvector of the current Bell operator (exactly optimal), then each
//! party's unitaries take gradient-ascent steps with the other party and
//! the state held fixed. Steps are only accepted when they increase the
//! objective, so the value never decreases within a restart.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::bell::{BellFunctional, SETTINGS};
use crate::error::{Error, Result};
use crate::quantum::{bell_operator, MeasurementSettings};
use crate::scalar::{Coefficient, Real};
use crate::spectra::max_violation;
use crate::tensor::{hermitian_spectrum, CMatrix, PureState, Subsystem, UnitaryMatrix};

/// Central finite-difference step in the unitary chart.
pub const FD_STEP: f64 = 1e-5;

/// Gradient-ascent steps per party half-step.
const INNER_STEPS: usize = 25;

/// Backtracking halvings before a line search gives up.
const MAX_HALVINGS: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Stop a restart once one full iteration improves by less than this.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { restarts: 20, max_iterations: 300, tolerance: 1e-11, seed: 0 }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Domain("at least one restart is required".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Domain("max_iterations must be positive".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Domain(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct OptimizationResult<T> {
    pub best_value: T,
    pub best_settings: MeasurementSettings<T>,
    pub best_state: PureState<T>,
    /// Iterations of the winning restart.
    pub iterations_used: usize,
    pub converged: bool,
    /// Index of the winning restart.
    pub restart: usize,
    /// Objective after every half-step of the winning restart.
    pub history: Vec<T>,
}

/// Number of real parameters of a d x d unitary.
pub fn param_count(d: usize) -> usize {
    d * d
}

/// `exp(iH)` where `H` is Hermitian with diagonal `theta[..d]` and upper
/// triangle filled row by row from the `(re, im)` pairs in `theta[d..]`.
pub fn unitary_from_params<T: Real>(d: usize, theta: &[T]) -> Result<UnitaryMatrix<T>> {
    if theta.len() != param_count(d) {
        return Err(Error::Shape(format!("expected {} parameters for d = {d}, got {}", param_count(d), theta.len())));
    }
    let mut h = CMatrix::zeros(d, d);
    for i in 0..d {
        h[(i, i)] = Complex::new(theta[i], T::zero());
    }
    let mut idx = d;
    for p in 0..d {
        for q in p + 1..d {
            let z = Complex::new(theta[idx], theta[idx + 1]);
            h[(p, q)] = z;
            h[(q, p)] = z.conj();
            idx += 2;
        }
    }
    let spec = hermitian_spectrum(&h)?;
    let phases: Vec<_> = spec.values.iter().map(|&l| Complex::from_polar(T::one(), l)).collect();
    let v = &spec.vectors;
    let scaled = CMatrix::from_fn(d, d, |i, j| v[(i, j)] * phases[j]);
    Ok(UnitaryMatrix::from_matrix_unchecked(&scaled * &v.adjoint()))
}

/// Unitary with standard-normal chart parameters.
pub fn random_unitary<T: Real>(d: usize, rng: &mut ChaCha8Rng) -> UnitaryMatrix<T> {
    let theta: Vec<T> = (0..param_count(d)).map(|_| T::lit(StandardNormal.sample(rng))).collect();
    unitary_from_params(d, &theta).expect("parameter count matches")
}

pub fn random_settings<T: Real>(d: usize, rng: &mut ChaCha8Rng) -> MeasurementSettings<T> {
    let mut next = || random_unitary::<T>(d, rng);
    let a = [next(), next()];
    let b = [next(), next()];
    MeasurementSettings::new(a, b).expect("consistent dimensions")
}

/// Quadratic forms seen by one party when the state and the other party
/// are fixed: the objective is `Σ_a Σ_j u_{a,j}† X[a][j] u_{a,j}`.
struct PartyProblem<T> {
    forms: Vec<Vec<CMatrix<T>>>,
}

impl<T: Real> PartyProblem<T> {
    fn new<C: Coefficient>(f: &BellFunctional<C>, settings: &MeasurementSettings<T>, state: &PureState<T>, party: Subsystem) -> Self {
        let d = state.dim();
        let alpha = state.coefficient_matrix();
        // overlap ⟨u ⊗ v|ψ⟩ = u† α conj(v) = v† αᵀ conj(u)
        let (mixer, other) = match party {
            Subsystem::A => (alpha.clone(), Subsystem::B),
            Subsystem::B => (alpha.transpose(), Subsystem::A),
        };
        let mut rank_one = Vec::with_capacity(SETTINGS);
        for s in 0..SETTINGS {
            let row: Vec<CMatrix<T>> = (0..d)
                .map(|l| {
                    let v: Vec<_> = settings.direction(other, s, l).iter().map(|z| z.conj()).collect();
                    let w = mixer.mul_vec(&v);
                    CMatrix::outer(&w, &w)
                })
                .collect();
            rank_one.push(row);
        }
        let forms = (0..SETTINGS)
            .map(|own| {
                (0..d)
                    .map(|j| {
                        let mut x = CMatrix::zeros(d, d);
                        for s in 0..SETTINGS {
                            for l in 0..d {
                                let c = match party {
                                    Subsystem::A => f.coefficient(own, s, j, l),
                                    Subsystem::B => f.coefficient(s, own, l, j),
                                };
                                if !c.is_zero() {
                                    x.add_scaled(c.to_real(), &rank_one[s][l]);
                                }
                            }
                        }
                        x
                    })
                    .collect()
            })
            .collect();
        Self { forms }
    }

    fn value(&self, unitaries: &[UnitaryMatrix<T>; SETTINGS]) -> T {
        let mut total = T::zero();
        for (own, u) in unitaries.iter().enumerate() {
            for (j, x) in self.forms[own].iter().enumerate() {
                total += x.expectation(&u.column(j));
            }
        }
        total
    }
}

fn moved<T: Real>(base: &[UnitaryMatrix<T>; SETTINGS], theta: &[T], d: usize) -> [UnitaryMatrix<T>; SETTINGS] {
    let n = param_count(d);
    let step = |s: usize| base[s].compose(&unitary_from_params(d, &theta[s * n..(s + 1) * n]).expect("length"));
    [step(0), step(1)]
}

/// Gradient ascent for one party; returns the improved unitaries and value.
fn ascend_party<T: Real>(
    problem: &PartyProblem<T>,
    start: [UnitaryMatrix<T>; SETTINGS],
    d: usize,
    tolerance: T,
) -> ([UnitaryMatrix<T>; SETTINGS], T) {
    let n = SETTINGS * param_count(d);
    let h = T::lit(FD_STEP);
    let mut current = start;
    let mut value = problem.value(&current);
    let mut eta = T::one();
    for _ in 0..INNER_STEPS {
        let mut grad = vec![T::zero(); n];
        let mut theta = vec![T::zero(); n];
        for i in 0..n {
            theta[i] = h;
            let up = problem.value(&moved(&current, &theta, d));
            theta[i] = -h;
            let down = problem.value(&moved(&current, &theta, d));
            theta[i] = T::zero();
            grad[i] = (up - down) / (h + h);
        }
        let gnorm = grad.iter().map(|g| *g * *g).sum::<T>().sqrt();
        if gnorm <= T::epsilon() {
            break;
        }
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<T> = grad.iter().map(|g| *g * eta).collect();
            let candidate = moved(&current, &trial, d);
            let v = problem.value(&candidate);
            if v > value {
                accepted = Some((candidate, v));
                break;
            }
            eta = eta * T::lit(0.5);
        }
        match accepted {
            Some((candidate, v)) => {
                let gain = v - value;
                current = candidate;
                value = v;
                eta = (eta * T::lit(2.0)).min(T::lit(1e3));
                if gain < tolerance {
                    break;
                }
            }
            None => break,
        }
    }
    (current, value)
}

struct RestartOutcome<T> {
    value: T,
    settings: MeasurementSettings<T>,
    state: PureState<T>,
    iterations: usize,
    converged: bool,
    history: Vec<T>,
}

fn run_from<C: Coefficient, T: Real>(
    f: &BellFunctional<C>,
    start: MeasurementSettings<T>,
    cfg: &OptimizerConfig,
) -> Result<RestartOutcome<T>> {
    let d = f.outcomes();
    let tol = T::lit(cfg.tolerance);
    let mut settings = start;
    let mut history = Vec::new();
    let mut previous: Option<T> = None;
    let mut state;
    let mut value;
    let mut iterations = 0;
    let mut converged = false;
    loop {
        iterations += 1;
        // state half-step: exact
        let top = max_violation(&bell_operator::<C, T, _>(f, &settings)?)?;
        state = top.state;
        value = top.value;
        history.push(value);
        for party in [Subsystem::A, Subsystem::B] {
            let problem = PartyProblem::new(f, &settings, &state, party);
            let (unitaries, v) = ascend_party(&problem, settings.party(party).clone(), d, tol * T::lit(1e-2));
            if v > value {
                settings = settings.with_party(party, unitaries);
                value = v;
            }
            history.push(value);
        }
        if let Some(prev) = previous {
            if value - prev < tol {
                converged = true;
            }
        }
        previous = Some(value);
        if converged || iterations >= cfg.max_iterations {
            break;
        }
    }
    // final exact state step keeps the reported pair consistent
    let top = max_violation(&bell_operator::<C, T, _>(f, &settings)?)?;
    if top.value >= value {
        value = top.value;
        state = top.state;
        history.push(value);
    }
    Ok(RestartOutcome { value, settings, state, iterations, converged, history })
}

fn check_functional<C: Coefficient>(f: &BellFunctional<C>, d: usize) -> Result<()> {
    if f.outcomes() != d {
        return Err(Error::Shape(format!(
            "Von Neumann measurements on C^{d} have {d} outcomes, the functional has {}",
            f.outcomes()
        )));
    }
    Ok(())
}

fn into_result<T: Real>(best: RestartOutcome<T>, restart: usize) -> OptimizationResult<T> {
    OptimizationResult {
        best_value: best.value,
        best_settings: best.settings,
        best_state: best.state,
        iterations_used: best.iterations,
        converged: best.converged,
        restart,
        history: best.history,
    }
}

/// Best value over `cfg.restarts` random starts. Restart `r` draws its
/// initial settings from ChaCha8 seeded with `cfg.seed` on stream `r`, so
/// results do not depend on thread scheduling.
pub fn optimize_violation<C: Coefficient, T: Real>(
    f: &BellFunctional<C>,
    d: usize,
    cfg: &OptimizerConfig,
) -> Result<OptimizationResult<T>> {
    cfg.validate()?;
    check_functional(f, d)?;
    let outcomes = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(r as u64);
            run_from(f, random_settings::<T>(d, &mut rng), cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let (restart, best) = outcomes
        .into_iter()
        .enumerate()
        .reduce(|acc, cur| if cur.1.value > acc.1.value { cur } else { acc })
        .expect("at least one restart");
    Ok(into_result(best, restart))
}

/// A single see-saw run from the given settings.
pub fn optimize_from<C: Coefficient, T: Real>(
    f: &BellFunctional<C>,
    start: &MeasurementSettings<T>,
    cfg: &OptimizerConfig,
) -> Result<OptimizationResult<T>> {
    cfg.validate()?;
    check_functional(f, start.party(Subsystem::A)[0].dim())?;
    Ok(into_result(run_from(f, start.clone(), cfg)?, 0))
}
