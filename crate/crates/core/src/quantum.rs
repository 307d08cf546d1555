//! Joint probabilities and Bell operators from states and projective
//! measurements.

use num_complex::Complex;
use num_traits::Zero;

use crate::bell::{BellFunctional, ProbabilityTable, SETTINGS};
use crate::error::{Error, Result};
use crate::scalar::{Coefficient, Real};
use crate::tensor::{check_dim, fourier_matrix, kron_vec, CMatrix, DensityMatrix, Subsystem, UnitaryMatrix};

/// Two projective measurements per party on C^d.
pub trait LocalMeasurements<T: Real>: Sync {
    /// Local Hilbert-space dimension.
    fn dim(&self) -> usize;

    /// Outcomes per measurement.
    fn outcomes(&self) -> usize;

    /// Projector for `outcome` of observable `setting` of `party`.
    fn projector(&self, party: Subsystem, setting: usize, outcome: usize) -> CMatrix<T>;

    /// `Π_j^(a) ⊗ Π_l^(b)`
    fn joint_projector(&self, a: usize, b: usize, j: usize, l: usize) -> CMatrix<T> {
        self.projector(Subsystem::A, a, j).kron(&self.projector(Subsystem::B, b, l))
    }

    /// `tr((Π_j^(a) ⊗ Π_l^(b)) ρ)`
    fn joint_probability(&self, rho: &CMatrix<T>, a: usize, b: usize, j: usize, l: usize) -> T {
        self.joint_projector(a, b, j, l).trace_product(rho).re
    }
}

/// Complete Von Neumann measurements: observable `a` of a party projects
/// onto the columns of its `a`-th unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSettings<T> {
    d: usize,
    party_a: [UnitaryMatrix<T>; SETTINGS],
    party_b: [UnitaryMatrix<T>; SETTINGS],
}

impl<T: Real> MeasurementSettings<T> {
    pub fn new(party_a: [UnitaryMatrix<T>; SETTINGS], party_b: [UnitaryMatrix<T>; SETTINGS]) -> Result<Self> {
        let d = party_a[0].dim();
        check_dim(d)?;
        if party_a.iter().chain(&party_b).any(|u| u.dim() != d) {
            return Err(Error::Shape("all measurement unitaries must share one dimension".into()));
        }
        Ok(Self { d, party_a, party_b })
    }

    pub fn unitary(&self, party: Subsystem, setting: usize) -> &UnitaryMatrix<T> {
        match party {
            Subsystem::A => &self.party_a[setting],
            Subsystem::B => &self.party_b[setting],
        }
    }

    pub fn party(&self, party: Subsystem) -> &[UnitaryMatrix<T>; SETTINGS] {
        match party {
            Subsystem::A => &self.party_a,
            Subsystem::B => &self.party_b,
        }
    }

    /// Replaces the unitaries of one party.
    pub fn with_party(&self, party: Subsystem, unitaries: [UnitaryMatrix<T>; SETTINGS]) -> Self {
        let mut out = self.clone();
        match party {
            Subsystem::A => out.party_a = unitaries,
            Subsystem::B => out.party_b = unitaries,
        }
        out
    }

    /// Measured direction for `outcome`.
    pub fn direction(&self, party: Subsystem, setting: usize, outcome: usize) -> Vec<Complex<T>> {
        self.unitary(party, setting).column(outcome)
    }
}

impl<T: Real> LocalMeasurements<T> for MeasurementSettings<T> {
    fn dim(&self) -> usize {
        self.d
    }

    fn outcomes(&self) -> usize {
        self.d
    }

    fn projector(&self, party: Subsystem, setting: usize, outcome: usize) -> CMatrix<T> {
        let v = self.direction(party, setting, outcome);
        CMatrix::outer(&v, &v)
    }

    fn joint_projector(&self, a: usize, b: usize, j: usize, l: usize) -> CMatrix<T> {
        let w = kron_vec(&self.direction(Subsystem::A, a, j), &self.direction(Subsystem::B, b, l));
        CMatrix::outer(&w, &w)
    }

    fn joint_probability(&self, rho: &CMatrix<T>, a: usize, b: usize, j: usize, l: usize) -> T {
        let w = kron_vec(&self.direction(Subsystem::A, a, j), &self.direction(Subsystem::B, b, l));
        rho.expectation(&w)
    }
}

/// Per-outcome phases applied before the Fourier transforms.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSettings<T> {
    pub d: usize,
    /// Phases of A's two observables.
    pub alice: [Vec<T>; SETTINGS],
    /// Phases of B's two observables.
    pub bob: [Vec<T>; SETTINGS],
}

impl<T: Real> PhaseSettings<T> {
    pub fn new(alice: [Vec<T>; SETTINGS], bob: [Vec<T>; SETTINGS]) -> Result<Self> {
        let d = alice[0].len();
        check_dim(d)?;
        if alice.iter().chain(&bob).any(|p| p.len() != d) {
            return Err(Error::Shape("phase vectors must all have length d".into()));
        }
        if alice.iter().chain(&bob).flatten().any(|p| !p.is_finite()) {
            return Err(Error::Domain("phases must be finite".into()));
        }
        Ok(Self { d, alice, bob })
    }

    /// `φ1(j) = 0`, `φ2(j) = jπ/d`, `ϕ1(j) = jπ/(2d)`, `ϕ2(j) = -jπ/(2d)`.
    pub fn canonical(d: usize) -> Result<Self> {
        check_dim(d)?;
        let dt = T::from_usize_lossy(d);
        let two = T::lit(2.0);
        let line = |scale: T| (0..d).map(|j| T::from_usize_lossy(j) * scale).collect::<Vec<_>>();
        Self::new(
            [line(T::zero()), line(T::PI() / dt)],
            [line(T::PI() / (two * dt)), line(-T::PI() / (two * dt))],
        )
    }

    pub fn zeros(d: usize) -> Result<Self> {
        check_dim(d)?;
        Self::new([vec![T::zero(); d], vec![T::zero(); d]], [vec![T::zero(); d], vec![T::zero(); d]])
    }
}

/// Fourier-type settings: A applies `diag(e^{iφ_a})` then the Fourier
/// transform `F`, B applies `diag(e^{iϕ_b})` then `conj(F)`, and both read
/// out in the computational basis.
///
/// The stored unitaries are the adjoints `(F·D)†`, whose columns are the
/// measured directions pulled back to the input state.
pub fn fourier_settings<T: Real>(p: &PhaseSettings<T>) -> Result<MeasurementSettings<T>> {
    let f = fourier_matrix::<T>(p.d)?;
    let fc = UnitaryMatrix::from_matrix_unchecked(f.matrix().conj());
    let pulled = |transform: &UnitaryMatrix<T>, phases: &[T]| transform.compose(&UnitaryMatrix::phases(phases)).adjoint();
    MeasurementSettings::new(
        [pulled(&f, &p.alice[0]), pulled(&f, &p.alice[1])],
        [pulled(&fc, &p.bob[0]), pulled(&fc, &p.bob[1])],
    )
}

/// Canonical Fourier settings for dimension `d`.
pub fn canonical_settings<T: Real>(d: usize) -> Result<MeasurementSettings<T>> {
    fourier_settings(&PhaseSettings::canonical(d)?)
}

/// Two-outcome measurements: outcome 0 is the `+1` projector, outcome 1
/// its complement `1 - P`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoOutcomeSettings<T> {
    d: usize,
    party_a: [CMatrix<T>; SETTINGS],
    party_b: [CMatrix<T>; SETTINGS],
}

impl<T: Real> TwoOutcomeSettings<T> {
    pub fn new(party_a: [CMatrix<T>; SETTINGS], party_b: [CMatrix<T>; SETTINGS]) -> Result<Self> {
        let d = party_a[0].rows();
        check_dim(d)?;
        for p in party_a.iter().chain(&party_b) {
            if p.rows() != d || !p.is_square() {
                return Err(Error::Shape("projectors must be d x d".into()));
            }
            let idem = (p * p).max_abs_diff(p);
            if idem > T::tol(1e-10) || p.hermiticity_residual() > T::tol(1e-10) {
                return Err(Error::Domain("+1 outcome operator is not an orthogonal projector".into()));
            }
        }
        Ok(Self { d, party_a, party_b })
    }

    /// The `+1` projector.
    pub fn plus(&self, party: Subsystem, setting: usize) -> &CMatrix<T> {
        match party {
            Subsystem::A => &self.party_a[setting],
            Subsystem::B => &self.party_b[setting],
        }
    }
}

impl<T: Real> LocalMeasurements<T> for TwoOutcomeSettings<T> {
    fn dim(&self) -> usize {
        self.d
    }

    fn outcomes(&self) -> usize {
        2
    }

    fn projector(&self, party: Subsystem, setting: usize, outcome: usize) -> CMatrix<T> {
        let plus = self.plus(party, setting);
        match outcome {
            0 => plus.clone(),
            1 => &CMatrix::identity(self.d) - plus,
            _ => panic!("two-outcome measurement has no outcome {outcome}"),
        }
    }
}

/// Projector onto `(|0⟩ + e^{iω}|1⟩)/√2` inside C^d.
pub fn equator_projector<T: Real>(d: usize, omega: T) -> CMatrix<T> {
    let h = T::FRAC_1_SQRT_2();
    let mut v = vec![Complex::zero(); d];
    v[0] = Complex::new(h, T::zero());
    v[1] = Complex::from_polar(h, omega);
    CMatrix::outer(&v, &v)
}

/// CHSH settings acting on the first two levels of C^d:
/// `A1 = P_0`, `A2 = P_{π/2}`, `B1 = P_{-π/4}`, `B2 = P_{π/4}`.
pub fn chsh_embedded_settings<T: Real>(d: usize) -> Result<TwoOutcomeSettings<T>> {
    check_dim(d)?;
    let q = T::FRAC_PI_4();
    TwoOutcomeSettings::new(
        [equator_projector(d, T::zero()), equator_projector(d, T::FRAC_PI_2())],
        [equator_projector(d, -q), equator_projector(d, q)],
    )
}

fn check_state_dim<T: Real, M: LocalMeasurements<T> + ?Sized>(rho: &DensityMatrix<T>, s: &M) -> Result<()> {
    if rho.dim() != s.dim() {
        return Err(Error::Shape(format!("state has d = {}, settings have d = {}", rho.dim(), s.dim())));
    }
    Ok(())
}

/// `P[a][b][j][l] = tr((Π_j^(a) ⊗ Π_l^(b)) ρ)`
pub fn joint_probabilities<T: Real, M: LocalMeasurements<T> + ?Sized>(
    rho: &DensityMatrix<T>,
    s: &M,
) -> Result<ProbabilityTable<T>> {
    check_state_dim(rho, s)?;
    let n = s.outcomes();
    let mut values = Vec::with_capacity(SETTINGS * SETTINGS * n * n);
    for a in 0..SETTINGS {
        for b in 0..SETTINGS {
            for j in 0..n {
                for l in 0..n {
                    values.push(s.joint_probability(rho.matrix(), a, b, j, l));
                }
            }
        }
    }
    ProbabilityTable::new(n, values)
}

/// `B = Σ M[a][b][j][l] Π_j^(a) ⊗ Π_l^(b)`
pub fn bell_operator<C: Coefficient, T: Real, M: LocalMeasurements<T> + ?Sized>(
    f: &BellFunctional<C>,
    s: &M,
) -> Result<CMatrix<T>> {
    if f.outcomes() != s.outcomes() {
        return Err(Error::Shape(format!(
            "functional has {} outcomes, measurements have {}",
            f.outcomes(),
            s.outcomes()
        )));
    }
    let d = s.dim();
    let n = s.outcomes();
    let mut op = CMatrix::zeros(d * d, d * d);
    for a in 0..SETTINGS {
        for b in 0..SETTINGS {
            for j in 0..n {
                for l in 0..n {
                    let c = f.coefficient(a, b, j, l);
                    if c.is_zero() {
                        continue;
                    }
                    op.add_scaled(c.to_real(), &s.joint_projector(a, b, j, l));
                }
            }
        }
    }
    Ok(op.hermitian_part())
}

/// Bell value `Σ M P` of a state under given settings.
pub fn bell_value<C: Coefficient, T: Real, M: LocalMeasurements<T> + ?Sized>(
    f: &BellFunctional<C>,
    rho: &DensityMatrix<T>,
    s: &M,
) -> Result<T> {
    crate::bell::evaluate(f, &joint_probabilities(rho, s)?)
}
