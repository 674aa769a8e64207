//! Hilbert-space arithmetic for a single photon carrying three qubits:
//! polarization, path and wavepacket shape.
//!
//! Basis index layout is pol-major, then path, then shape:
//! `index = 4·pol + 2·path + shape` with `H=0, V=1`, `l=0, r=1`, `1=0, 2=1`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;

/// Dimension of the photon Hilbert space.
pub const DIM: usize = 8;
/// Number of qubit factors in the photon space.
pub const N_FACTORS: usize = 3;
/// Tolerance for analytic identities.
pub const EXACT_TOL: f64 = 1e-12;
/// Tolerance applied to user-supplied inputs.
pub const INPUT_TOL: f64 = 1e-9;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("superposition needs at least one term")]
    EmptySuperposition,
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("cannot normalize a zero vector")]
    ZeroVector,
    #[error("invalid subsystem selection: {0}")]
    InvalidSubsystems(String),
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pol {
    H,
    V,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Path {
    #[serde(rename = "l")]
    L,
    #[serde(rename = "r")]
    R,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Shape {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl Pol {
    pub fn bit(self) -> usize {
        match self {
            Pol::H => 0,
            Pol::V => 1,
        }
    }
}

impl Path {
    pub fn bit(self) -> usize {
        match self {
            Path::L => 0,
            Path::R => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Self {
        if bit == 0 {
            Path::L
        } else {
            Path::R
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Path::L => "l",
            Path::R => "r",
        }
    }
}

impl Shape {
    pub fn bit(self) -> usize {
        match self {
            Shape::One => 0,
            Shape::Two => 1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Shape::One => "1",
            Shape::Two => "2",
        }
    }
}

impl fmt::Display for Pol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pol::H => "H",
            Pol::V => "V",
        })
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// One of the eight computational basis labels `(pol, path, shape)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisLabel {
    pub pol: Pol,
    pub path: Path,
    pub shape: Shape,
}

impl BasisLabel {
    pub const fn new(pol: Pol, path: Path, shape: Shape) -> Self {
        Self { pol, path, shape }
    }

    pub fn index(self) -> usize {
        4 * self.pol.bit() + 2 * self.path.bit() + self.shape.bit()
    }

    pub fn from_index(index: usize) -> Self {
        assert!(index < DIM, "basis index {index} out of range");
        let pol = if index & 4 == 0 { Pol::H } else { Pol::V };
        let path = Path::from_bit((index >> 1) & 1);
        let shape = if index & 1 == 0 { Shape::One } else { Shape::Two };
        Self { pol, path, shape }
    }

    pub fn all() -> [BasisLabel; DIM] {
        std::array::from_fn(Self::from_index)
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.pol, self.path, self.shape)
    }
}

/// A qubit factor of the photon space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Factor {
    Pol,
    Path,
    Shape,
}

impl Factor {
    pub const ALL: [Factor; N_FACTORS] = [Factor::Pol, Factor::Path, Factor::Shape];

    /// Tensor position, 0 being the most significant.
    pub fn position(self) -> usize {
        match self {
            Factor::Pol => 0,
            Factor::Path => 1,
            Factor::Shape => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Factor::Pol => "pol",
            Factor::Path => "path",
            Factor::Shape => "shape",
        }
    }

    pub fn from_name(name: &str) -> Option<Factor> {
        Factor::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Single-qubit kets.
pub mod qubit {
    use super::C64;
    use std::f64::consts::FRAC_1_SQRT_2;

    pub type Qubit = [C64; 2];

    const S: f64 = FRAC_1_SQRT_2;

    pub const ZERO: Qubit = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    pub const ONE: Qubit = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];

    pub const H: Qubit = ZERO;
    pub const V: Qubit = ONE;
    /// `(|H⟩ + |V⟩)/√2`
    pub const D: Qubit = [C64::new(S, 0.0), C64::new(S, 0.0)];
    /// `(|H⟩ − |V⟩)/√2`
    pub const A: Qubit = [C64::new(S, 0.0), C64::new(-S, 0.0)];

    pub const L: Qubit = ZERO;
    pub const R: Qubit = ONE;

    pub const S1: Qubit = ZERO;
    pub const S2: Qubit = ONE;

    pub fn inner(a: &Qubit, b: &Qubit) -> C64 {
        a[0].conj() * b[0] + a[1].conj() * b[1]
    }

    pub fn norm_sqr(a: &Qubit) -> f64 {
        a[0].norm_sqr() + a[1].norm_sqr()
    }
}

use qubit::Qubit;

/// Amplitude vector over the eight labeled basis states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhotonState {
    amps: [C64; DIM],
}

/// Computational basis state for `label`.
pub fn ket(label: BasisLabel) -> PhotonState {
    let mut amps = [ZERO; DIM];
    amps[label.index()] = ONE;
    PhotonState { amps }
}

/// Linear combination `Σ cᵢ ψᵢ`; the result is not normalized.
pub fn superpose(terms: &[(C64, PhotonState)]) -> Result<PhotonState, StateError> {
    if terms.is_empty() {
        return Err(StateError::EmptySuperposition);
    }
    Ok(terms
        .iter()
        .fold(PhotonState::zero(), |acc, (c, s)| acc + s.scale(*c)))
}

/// `⟨a|b⟩`, conjugate-linear in `a`.
pub fn inner(a: &PhotonState, b: &PhotonState) -> C64 {
    a.amps
        .iter()
        .zip(b.amps.iter())
        .map(|(x, y)| x.conj() * y)
        .sum()
}

impl PhotonState {
    pub fn zero() -> Self {
        Self { amps: [ZERO; DIM] }
    }

    pub fn from_amplitudes(amps: [C64; DIM]) -> Self {
        Self { amps }
    }

    /// Product state `|pol⟩ ⊗ |path⟩ ⊗ |shape⟩`.
    pub fn product(pol: Qubit, path: Qubit, shape: Qubit) -> Self {
        let mut amps = [ZERO; DIM];
        for (i, a) in amps.iter_mut().enumerate() {
            *a = pol[(i >> 2) & 1] * path[(i >> 1) & 1] * shape[i & 1];
        }
        Self { amps }
    }

    pub fn amplitudes(&self) -> &[C64; DIM] {
        &self.amps
    }

    pub fn amplitude(&self, label: BasisLabel) -> C64 {
        self.amps[label.index()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub fn normalize(&self) -> Result<Self, StateError> {
        let n = self.norm();
        if n <= f64::EPSILON {
            return Err(StateError::ZeroVector);
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            amps: self.amps.map(|a| a * c),
        }
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &PhotonState) -> f64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Non-zero amplitudes rendered as `amp|H,r,1⟩ + ...`.
    pub fn describe(&self, tol: f64) -> String {
        let terms: Vec<String> = BasisLabel::all()
            .iter()
            .filter(|l| self.amplitude(**l).norm() > tol)
            .map(|l| {
                let a = self.amplitude(*l);
                if a.im.abs() <= tol {
                    format!("{:+.6}|{}⟩", a.re, l)
                } else {
                    format!("({:.6}{:+.6}i)|{}⟩", a.re, a.im, l)
                }
            })
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" ")
        }
    }
}

impl Add for PhotonState {
    type Output = PhotonState;
    fn add(self, rhs: Self) -> Self {
        let mut amps = self.amps;
        amps.iter_mut().zip(rhs.amps).for_each(|(a, b)| *a += b);
        Self { amps }
    }
}

impl Sub for PhotonState {
    type Output = PhotonState;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for PhotonState {
    type Output = PhotonState;
    fn neg(self) -> Self {
        Self {
            amps: self.amps.map(|a| -a),
        }
    }
}

/// Set of qubit positions of an `n`-qubit register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Subsystems(u8);

impl Subsystems {
    pub fn from_positions(positions: &[usize]) -> Self {
        Self(positions.iter().fold(0u8, |m, p| m | (1 << p)))
    }

    pub fn from_factors(factors: &[Factor]) -> Self {
        Self(factors.iter().fold(0u8, |m, f| m | (1 << f.position())))
    }

    pub fn all(n_qubits: usize) -> Self {
        Self(((1u16 << n_qubits) - 1) as u8)
    }

    pub fn contains(self, position: usize) -> bool {
        self.0 & (1 << position) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Positions in ascending order, i.e. most significant first.
    pub fn positions(self) -> Vec<usize> {
        (0..8).filter(|p| self.contains(*p)).collect()
    }

    /// Photon factors contained in the set, in tensor order.
    pub fn factors(self) -> Vec<Factor> {
        Factor::ALL
            .into_iter()
            .filter(|f| self.contains(f.position()))
            .collect()
    }

    pub fn complement(self, n_qubits: usize) -> Self {
        Self(!self.0 & Self::all(n_qubits).0)
    }

    fn is_within(self, n_qubits: usize) -> bool {
        self.0 & !Self::all(n_qubits).0 == 0
    }
}

/// Bit of `index` at tensor `position` in an `n`-qubit register.
fn bit_at(index: usize, position: usize, n_qubits: usize) -> usize {
    (index >> (n_qubits - 1 - position)) & 1
}

/// Packs the bits of `index` at `positions` (most significant first).
fn gather(index: usize, positions: &[usize], n_qubits: usize) -> usize {
    positions
        .iter()
        .fold(0, |acc, p| (acc << 1) | bit_at(index, *p, n_qubits))
}

/// Inverse of [`gather`] for a pair of complementary position lists.
fn scatter(kept: usize, kept_pos: &[usize], rest: usize, rest_pos: &[usize], n_qubits: usize) -> usize {
    let mut index = 0;
    for (k, p) in kept_pos.iter().enumerate() {
        let b = (kept >> (kept_pos.len() - 1 - k)) & 1;
        index |= b << (n_qubits - 1 - p);
    }
    for (k, p) in rest_pos.iter().enumerate() {
        let b = (rest >> (rest_pos.len() - 1 - k)) & 1;
        index |= b << (n_qubits - 1 - p);
    }
    index
}

/// 8×8 complex matrix acting on the photon space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    m: [[C64; DIM]; DIM],
}

impl Operator {
    pub fn zero() -> Self {
        Self {
            m: [[ZERO; DIM]; DIM],
        }
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> C64) -> Self {
        Self {
            m: std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))),
        }
    }

    pub fn from_rows(m: [[C64; DIM]; DIM]) -> Self {
        Self { m }
    }

    /// `|a⟩⟨b|`
    pub fn outer(a: &PhotonState, b: &PhotonState) -> Self {
        Self::from_fn(|i, j| a.amps[i] * b.amps[j].conj())
    }

    /// `|s⟩⟨s|`
    pub fn projector(s: &PhotonState) -> Self {
        Self::outer(s, s)
    }

    /// Embeds a `d×d` row-major matrix acting on `factors` (d = 2^|factors|),
    /// with identity on the remaining factors.
    pub fn on_factors(factors: Subsystems, small: &[C64]) -> Self {
        let kept = factors.positions();
        let rest = factors.complement(N_FACTORS).positions();
        let d = 1 << kept.len();
        assert_eq!(small.len(), d * d, "matrix size does not match factor set");
        Self::from_fn(|i, j| {
            if gather(i, &rest, N_FACTORS) != gather(j, &rest, N_FACTORS) {
                return ZERO;
            }
            small[gather(i, &kept, N_FACTORS) * d + gather(j, &kept, N_FACTORS)]
        })
    }

    /// Applies the 2×2 matrix `u` to `factor` on basis states with
    /// `path == arm`; identity on the other arm.
    pub fn conditioned_on_path(arm: Path, factor: Factor, u: [[C64; 2]; 2]) -> Self {
        assert_ne!(factor, Factor::Path, "cannot condition the path on itself");
        let fp = factor.position();
        let others: Vec<usize> = (0..N_FACTORS).filter(|p| *p != fp).collect();
        Self::from_fn(|i, j| {
            let on_arm = |k: usize| bit_at(k, Factor::Path.position(), N_FACTORS) == arm.bit();
            if on_arm(i) && on_arm(j) {
                if gather(i, &others, N_FACTORS) == gather(j, &others, N_FACTORS) {
                    u[bit_at(i, fp, N_FACTORS)][bit_at(j, fp, N_FACTORS)]
                } else {
                    ZERO
                }
            } else if i == j {
                ONE
            } else {
                ZERO
            }
        })
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.m[row][col]
    }

    pub fn rows(&self) -> &[[C64; DIM]; DIM] {
        &self.m
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(|i, j| self.m[j][i].conj())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_fn(|i, j| self.m[i][j] * c)
    }

    pub fn trace(&self) -> C64 {
        (0..DIM).map(|i| self.m[i][i]).sum()
    }

    /// Matrix-vector product, no unitarity check.
    pub fn act(&self, s: &PhotonState) -> PhotonState {
        let amps = std::array::from_fn(|i| (0..DIM).map(|j| self.m[i][j] * s.amps[j]).sum());
        PhotonState { amps }
    }

    /// `⟨a|self|b⟩`
    pub fn matrix_element(&self, a: &PhotonState, b: &PhotonState) -> C64 {
        inner(a, &self.act(b))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        self.m
            .iter()
            .flatten()
            .zip(other.m.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (&self.dagger() * self).approx_eq(&Operator::identity(), tol)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.dagger().approx_eq(self, tol)
    }

    pub fn is_anti_hermitian(&self, tol: f64) -> bool {
        self.dagger().approx_eq(&-self.clone(), tol)
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && (self * self).approx_eq(self, tol)
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator::from_fn(|i, j| (0..DIM).map(|k| self.m[i][k] * rhs.m[k][j]).sum())
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator::from_fn(|i, j| self.m[i][j] + rhs.m[i][j])
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator::from_fn(|i, j| self.m[i][j] - rhs.m[i][j])
    }
}

impl Neg for Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale(-ONE)
    }
}

/// `ab − ba`
pub fn commutator(a: &Operator, b: &Operator) -> Operator {
    &(a * b) - &(b * a)
}

/// Density matrix over an `n`-qubit register (n = 1, 2 or 3).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity within [`EXACT_TOL`].
    pub fn new(n_qubits: usize, data: Vec<C64>) -> Result<Self, StateError> {
        if !(1..=N_FACTORS).contains(&n_qubits) {
            return Err(StateError::InvalidDensity(format!(
                "unsupported register size {n_qubits}"
            )));
        }
        let d = 1 << n_qubits;
        if data.len() != d * d {
            return Err(StateError::InvalidDensity(format!(
                "expected {} entries, got {}",
                d * d,
                data.len()
            )));
        }
        let rho = Self { n_qubits, data };
        rho.validate(EXACT_TOL)?;
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ|` for an arbitrary normalized amplitude vector of length 2, 4 or 8.
    pub fn from_amplitudes(amps: &[C64]) -> Result<Self, StateError> {
        let n_qubits = amps.len().trailing_zeros() as usize;
        if !amps.len().is_power_of_two() || !(1..=N_FACTORS).contains(&n_qubits) {
            return Err(StateError::InvalidDensity(format!(
                "amplitude vector of length {}",
                amps.len()
            )));
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > INPUT_TOL {
            return Err(StateError::NotNormalized(norm_sqr));
        }
        let data = amps
            .iter()
            .flat_map(|a| amps.iter().map(move |b| a * b.conj()))
            .collect();
        Self::new(n_qubits, data)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim() + col]
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let d = self.dim();
        let m = DMatrix::from_row_slice(d, d, &self.data);
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `⟨a|ρ|a⟩` for a ket over the full register.
    pub fn expectation(&self, a: &[C64]) -> f64 {
        let d = self.dim();
        assert_eq!(a.len(), d, "ket dimension mismatch");
        let mut acc = ZERO;
        for i in 0..d {
            for j in 0..d {
                acc += a[i].conj() * self.entry(i, j) * a[j];
            }
        }
        acc.re
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        assert_eq!(self.n_qubits, other.n_qubits, "register size mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn validate(&self, tol: f64) -> Result<(), StateError> {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                if (self.entry(i, j) - self.entry(j, i).conj()).norm() > tol {
                    return Err(StateError::InvalidDensity(format!(
                        "not hermitian at ({i}, {j})"
                    )));
                }
            }
        }
        let tr = self.trace();
        if (tr - ONE).norm() > tol {
            return Err(StateError::InvalidDensity(format!("trace {tr} ≠ 1")));
        }
        if let Some(min) = self.eigenvalues().first() {
            if *min < -tol {
                return Err(StateError::InvalidDensity(format!(
                    "negative eigenvalue {min}"
                )));
            }
        }
        Ok(())
    }
}

/// `|s⟩⟨s|` over the full photon space.
pub fn density_from_pure(s: &PhotonState) -> Result<DensityMatrix, StateError> {
    DensityMatrix::from_amplitudes(&s.amps)
}

/// Traces out every factor not in `keep`. Positions in `keep` refer to the
/// register of `rho` (for the photon: pol=0, path=1, shape=2).
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystems) -> Result<DensityMatrix, StateError> {
    let n = rho.n_qubits;
    if keep.is_empty() {
        return Err(StateError::InvalidSubsystems(
            "must keep at least one factor".into(),
        ));
    }
    if !keep.is_within(n) {
        return Err(StateError::InvalidSubsystems(format!(
            "factor outside a {n}-qubit register"
        )));
    }
    if keep.len() == n {
        return Err(StateError::InvalidSubsystems(
            "keeping every factor is not a partial trace".into(),
        ));
    }
    let kept = keep.positions();
    let traced = keep.complement(n).positions();
    let dk = 1 << kept.len();
    let dt = 1 << traced.len();
    let mut data = vec![ZERO; dk * dk];
    for i in 0..dk {
        for j in 0..dk {
            data[i * dk + j] = (0..dt)
                .map(|t| {
                    rho.entry(
                        scatter(i, &kept, t, &traced, n),
                        scatter(j, &kept, t, &traced, n),
                    )
                })
                .sum();
        }
    }
    DensityMatrix::new(kept.len(), data)
}
