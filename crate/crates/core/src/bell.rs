//! Bell expressions as coefficient tensors over joint outcome probabilities,
//! and their local-variable bounds by deterministic-strategy enumeration.
//!
//! Tensors are indexed `[a][b][j][l]`: `a`, `b` pick the observable of party
//! A and B (0 or 1), `j`, `l` their outcomes.

use crate::error::{Error, Result};
use crate::scalar::{Coefficient, Real};
use crate::tensor::check_dim;

/// Measurements per party.
pub const SETTINGS: usize = 2;

/// Largest number of joint deterministic strategies `lv_bound` will enumerate.
pub const MAX_STRATEGIES: u128 = 10_000_000;

/// Tolerances of [`ProbabilityTable`] validation.
pub const PROB_NEG_TOL: f64 = 1e-12;
pub const PROB_SUM_TOL: f64 = 1e-10;

#[inline]
fn flat(outcomes: usize, a: usize, b: usize, j: usize, l: usize) -> usize {
    ((a * SETTINGS + b) * outcomes + j) * outcomes + l
}

/// Which family a functional was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionalKind {
    Cglmp,
    Chsh,
    Custom,
}

/// Linear functional `Σ M[a][b][j][l] P(A_a = j, B_b = l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BellFunctional<C> {
    kind: FunctionalKind,
    outcomes: usize,
    coefficients: Vec<C>,
    claimed_lv_bound: C,
}

impl<C: Coefficient> BellFunctional<C> {
    /// Wraps a raw coefficient tensor of length `4 * outcomes²`.
    pub fn new(outcomes: usize, coefficients: Vec<C>, claimed_lv_bound: C) -> Result<Self> {
        if outcomes < 2 {
            return Err(Error::InvalidDimension(outcomes));
        }
        let expected = SETTINGS * SETTINGS * outcomes * outcomes;
        if coefficients.len() != expected {
            return Err(Error::Shape(format!("expected {expected} coefficients, got {}", coefficients.len())));
        }
        let finite = |c: &C| c.to_f64().is_some_and(f64::is_finite);
        if !finite(&claimed_lv_bound) || !coefficients.iter().all(finite) {
            return Err(Error::Domain("coefficients and bound must be finite".into()));
        }
        Ok(Self { kind: FunctionalKind::Custom, outcomes, coefficients, claimed_lv_bound })
    }

    fn zeros(kind: FunctionalKind, outcomes: usize, claimed_lv_bound: C) -> Self {
        let n = SETTINGS * SETTINGS * outcomes * outcomes;
        Self { kind, outcomes, coefficients: vec![C::zero(); n], claimed_lv_bound }
    }

    fn add(&mut self, a: usize, b: usize, j: usize, l: usize, w: &C) {
        let i = flat(self.outcomes, a, b, j, l);
        self.coefficients[i] = self.coefficients[i].clone() + w.clone();
    }

    pub fn kind(&self) -> FunctionalKind {
        self.kind
    }

    /// Outcomes per measurement.
    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    #[inline]
    pub fn coefficient(&self, a: usize, b: usize, j: usize, l: usize) -> &C {
        &self.coefficients[flat(self.outcomes, a, b, j, l)]
    }

    pub fn coefficients(&self) -> &[C] {
        &self.coefficients
    }

    /// The bound the construction asserts; [`lv_bound`] recomputes it.
    pub fn claimed_lv_bound(&self) -> &C {
        &self.claimed_lv_bound
    }

    /// Converts the coefficients into another numeric type.
    pub fn map_coefficients<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> BellFunctional<D> {
        BellFunctional {
            kind: self.kind,
            outcomes: self.outcomes,
            coefficients: self.coefficients.iter().map(&f).collect(),
            claimed_lv_bound: f(&self.claimed_lv_bound),
        }
    }

    /// Applies outcome relabelings: outcome `j` of observable `a` of party A
    /// becomes `perm_a[a][j]`, likewise for B.
    pub fn relabel(&self, perm_a: &[Vec<usize>; SETTINGS], perm_b: &[Vec<usize>; SETTINGS]) -> Self {
        let d = self.outcomes;
        let mut out = Self::zeros(self.kind, d, self.claimed_lv_bound.clone());
        for a in 0..SETTINGS {
            for b in 0..SETTINGS {
                for j in 0..d {
                    for l in 0..d {
                        out.coefficients[flat(d, a, b, perm_a[a][j], perm_b[b][l])] = self.coefficient(a, b, j, l).clone();
                    }
                }
            }
        }
        out
    }
}

/// The CGLMP functional for `d` outcomes, local bound 2.
///
/// For each `k < ⌊d/2⌋`, with weight `1 - 2k/(d-1)`, adds
/// `P(A1=B1+k) + P(B1=A2+k+1) + P(A2=B2+k) + P(B2=A1+k)` and subtracts
/// `P(A1=B1-k-1) + P(B1=A2-k) + P(A2=B2-k-1) + P(B2=A1-k-1)`, all modulo `d`.
pub fn cglmp_functional<C: Coefficient>(d: usize) -> Result<BellFunctional<C>> {
    check_dim(d)?;
    let mut f = BellFunctional::zeros(FunctionalKind::Cglmp, d, C::ratio(2, 1));
    let di = d as i64;
    let m = |x: i64| x.rem_euclid(di) as usize;
    for k in 0..(d / 2) as i64 {
        let w = C::ratio(di - 1 - 2 * k, di - 1);
        let nw = C::zero() - w.clone();
        for j in 0..di {
            // positive terms; (a, b) = (observable of A, observable of B)
            f.add(0, 0, m(j + k), m(j), &w); // A1 = B1 + k, j indexes B's outcome
            f.add(1, 0, m(j), m(j + k + 1), &w); // B1 = A2 + k + 1
            f.add(1, 1, m(j + k), m(j), &w); // A2 = B2 + k
            f.add(0, 1, m(j), m(j + k), &w); // B2 = A1 + k
            // negative terms
            f.add(0, 0, m(j - k - 1), m(j), &nw); // A1 = B1 - k - 1
            f.add(1, 0, m(j), m(j - k), &nw); // B1 = A2 - k
            f.add(1, 1, m(j - k - 1), m(j), &nw); // A2 = B2 - k - 1
            f.add(0, 1, m(j), m(j - k - 1), &nw); // B2 = A1 - k - 1
        }
    }
    Ok(f)
}

/// The CHSH correlator `A1(B1+B2) + A2(B1-B2)` over two outcome classes,
/// index 0 standing for +1 and index 1 for -1. `d` is the local dimension
/// the functional will be paired with and only validated here.
pub fn chsh_functional<C: Coefficient>(d: usize) -> Result<BellFunctional<C>> {
    check_dim(d)?;
    let mut f = BellFunctional::zeros(FunctionalKind::Chsh, 2, C::ratio(2, 1));
    let value = |s: usize| if s == 0 { 1 } else { -1 };
    for a in 0..SETTINGS {
        for b in 0..SETTINGS {
            let sign = if a == 1 && b == 1 { -1 } else { 1 };
            for s in 0..2 {
                for t in 0..2 {
                    f.add(a, b, s, t, &C::ratio(sign * value(s) * value(t), 1));
                }
            }
        }
    }
    Ok(f)
}

/// Result of the deterministic-strategy enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct LvBound<C> {
    pub value: C,
    /// Number of joint deterministic strategies covered, `outcomes^4`.
    pub strategies: u128,
    /// A maximizing assignment: outcomes of A1, A2 and of B1, B2.
    pub best_a: [usize; SETTINGS],
    pub best_b: [usize; SETTINGS],
}

/// Maximum of the functional over deterministic local strategies.
///
/// For each of party A's `d²` strategies the best response of B decouples
/// per observable, so the cost is `O(d³)` rather than `O(d⁴)`.
pub fn lv_bound<C: Coefficient>(f: &BellFunctional<C>) -> Result<LvBound<C>> {
    let d = f.outcomes;
    let required = (d as u128).pow((2 * SETTINGS) as u32);
    if required > MAX_STRATEGIES {
        return Err(Error::Capacity { required, limit: MAX_STRATEGIES });
    }
    let mut best: Option<LvBound<C>> = None;
    for ja in 0..d * d {
        let a_out = [ja / d, ja % d];
        let mut total = C::zero();
        let mut b_out = [0; SETTINGS];
        for b in 0..SETTINGS {
            let mut best_l: Option<(usize, C)> = None;
            for l in 0..d {
                let mut v = C::zero();
                for (a, &j) in a_out.iter().enumerate() {
                    v = v + f.coefficient(a, b, j, l).clone();
                }
                if best_l.as_ref().is_none_or(|(_, bv)| v > *bv) {
                    best_l = Some((l, v));
                }
            }
            let (l, v) = best_l.expect("at least one outcome");
            b_out[b] = l;
            total = total + v;
        }
        if best.as_ref().is_none_or(|bst| total > bst.value) {
            best = Some(LvBound { value: total, strategies: required, best_a: a_out, best_b: b_out });
        }
    }
    Ok(best.expect("at least one strategy"))
}

/// Value of the functional on a deterministic strategy.
pub fn deterministic_value<C: Coefficient>(f: &BellFunctional<C>, a_out: [usize; SETTINGS], b_out: [usize; SETTINGS]) -> C {
    let mut v = C::zero();
    for a in 0..SETTINGS {
        for b in 0..SETTINGS {
            v = v + f.coefficient(a, b, a_out[a], b_out[b]).clone();
        }
    }
    v
}

/// Joint outcome probabilities `P[a][b][j][l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable<T> {
    outcomes: usize,
    values: Vec<T>,
}

impl<T: Real> ProbabilityTable<T> {
    /// Validates nonnegativity and per-(a, b) normalization.
    pub fn new(outcomes: usize, values: Vec<T>) -> Result<Self> {
        let expected = SETTINGS * SETTINGS * outcomes * outcomes;
        if values.len() != expected {
            return Err(Error::Shape(format!("expected {expected} probabilities, got {}", values.len())));
        }
        let table = Self { outcomes, values };
        for a in 0..SETTINGS {
            for b in 0..SETTINGS {
                let slice = table.slice(a, b);
                if let Some(p) = slice.iter().find(|p| !(**p >= -T::tol(PROB_NEG_TOL))) {
                    return Err(Error::Domain(format!("negative probability {p} for setting ({a}, {b})")));
                }
                let s: T = slice.iter().copied().sum();
                if (s - T::one()).abs() > T::tol(PROB_SUM_TOL) {
                    return Err(Error::Domain(format!("probabilities for setting ({a}, {b}) sum to {s}")));
                }
            }
        }
        Ok(table)
    }

    /// Every outcome pair equally likely.
    pub fn uniform(outcomes: usize) -> Self {
        let p = T::one() / T::from_usize_lossy(outcomes * outcomes);
        Self { outcomes, values: vec![p; SETTINGS * SETTINGS * outcomes * outcomes] }
    }

    /// `weight * p + (1 - weight) * q`
    pub fn mix(weight: T, p: &Self, q: &Self) -> Result<Self> {
        if p.outcomes != q.outcomes {
            return Err(Error::Shape("tables with different outcome counts".into()));
        }
        let values = p.values.iter().zip(&q.values).map(|(&x, &y)| weight * x + (T::one() - weight) * y).collect();
        Self::new(p.outcomes, values)
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, j: usize, l: usize) -> T {
        self.values[flat(self.outcomes, a, b, j, l)]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// The `outcomes²` block for observables `(a, b)`, row-major in `(j, l)`.
    pub fn slice(&self, a: usize, b: usize) -> &[T] {
        let n = self.outcomes * self.outcomes;
        let start = flat(self.outcomes, a, b, 0, 0);
        &self.values[start..start + n]
    }
}

/// `Σ M[a][b][j][l] P[a][b][j][l]`
pub fn evaluate<C: Coefficient, T: Real>(f: &BellFunctional<C>, p: &ProbabilityTable<T>) -> Result<T> {
    if f.outcomes != p.outcomes {
        return Err(Error::Shape(format!(
            "functional has {} outcomes, probability table has {}",
            f.outcomes, p.outcomes
        )));
    }
    Ok(f.coefficients.iter().zip(&p.values).map(|(c, &v)| c.to_real::<T>() * v).sum())
}
