//! Projective measurement, shot sampling and the system–memory model.
//!
//! A [`MeasurementBasis`] lives on a subset of the photon factors; every
//! element acts as `|k⟩⟨k| ⊗ I` on the factors it leaves untouched, so the
//! probability of an outcome sums over those factors.
//!
//! Sampling uses ChaCha8 seeded with `seed_from_u64(seed)`. Each shot draws one
//! uniform `f64` in `[0, 1)` and picks the first outcome (in basis order)
//! whose cumulative probability exceeds it. Stream 0 of a seed is the
//! canonical sequential result; [`sample_parallel`] gives each worker its own
//! ChaCha stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::qstate::qubit::{self, Qubit};
use crate::qstate::{
    DensityMatrix, Factor, Operator, PhotonState, StateError, Subsystems, C64, EXACT_TOL,
    INPUT_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("measurement basis has no elements")]
    EmptyBasis,
    #[error("measurement basis must act on at least one factor")]
    NoFactors,
    #[error("ket `{label}` has {got} amplitudes, expected {expected}")]
    KetDimension {
        label: String,
        got: usize,
        expected: usize,
    },
    #[error("basis kets are not orthonormal: ⟨{a}|{b}⟩ = {value}")]
    NotOrthonormal { a: String, b: String, value: C64 },
    #[error("duplicate or empty outcome label `{0}`")]
    BadLabel(String),
    #[error("basis covers only {captured} of the state's probability")]
    IncompleteBasis { captured: f64 },
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("shot count must be at least 1")]
    NoShots,
    #[error("joint state is not of the system–memory form (residual {0})")]
    NotMemoryForm(f64),
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BasisElement {
    pub label: String,
    /// Amplitudes over the measured factors only.
    pub ket: Vec<C64>,
}

/// Ordered orthonormal kets on the measured factors. The declared subspace is
/// their span (tensored with the untouched factors).
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementBasis {
    measured: Subsystems,
    elements: Vec<BasisElement>,
    projectors: Vec<Operator>,
}

impl MeasurementBasis {
    pub fn new(measured: &[Factor], elements: Vec<(String, Vec<C64>)>) -> Result<Self, MeasureError> {
        if measured.is_empty() {
            return Err(MeasureError::NoFactors);
        }
        if elements.is_empty() {
            return Err(MeasureError::EmptyBasis);
        }
        let measured = Subsystems::from_factors(measured);
        let d = 1usize << measured.len();
        let mut seen = std::collections::HashSet::new();
        for (label, ket) in &elements {
            if label.is_empty() || !seen.insert(label.as_str()) {
                return Err(MeasureError::BadLabel(label.clone()));
            }
            if ket.len() != d {
                return Err(MeasureError::KetDimension {
                    label: label.clone(),
                    got: ket.len(),
                    expected: d,
                });
            }
        }
        for (i, (la, a)) in elements.iter().enumerate() {
            for (lb, b) in &elements[i..] {
                let value: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                let want = if la == lb { 1.0 } else { 0.0 };
                if (value - C64::new(want, 0.0)).norm() > INPUT_TOL {
                    return Err(MeasureError::NotOrthonormal {
                        a: la.clone(),
                        b: lb.clone(),
                        value,
                    });
                }
            }
        }
        let projectors = elements
            .iter()
            .map(|(_, k)| {
                let small: Vec<C64> = k
                    .iter()
                    .flat_map(|a| k.iter().map(move |b| a * b.conj()))
                    .collect();
                Operator::on_factors(measured, &small)
            })
            .collect();
        let elements = elements
            .into_iter()
            .map(|(label, ket)| BasisElement { label, ket })
            .collect();
        Ok(Self {
            measured,
            elements,
            projectors,
        })
    }

    /// Basis of full photon states.
    pub fn from_states(elements: Vec<(String, PhotonState)>) -> Result<Self, MeasureError> {
        Self::new(
            &Factor::ALL,
            elements
                .into_iter()
                .map(|(l, s)| (l, s.amplitudes().to_vec()))
                .collect(),
        )
    }

    pub fn measured_factors(&self) -> Vec<Factor> {
        self.measured.factors()
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.elements.iter().map(|e| e.label.as_str())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn projector(&self, index: usize) -> &Operator {
        &self.projectors[index]
    }

    pub fn projector_for(&self, label: &str) -> Option<&Operator> {
        self.labels()
            .position(|l| l == label)
            .map(|i| &self.projectors[i])
    }

    /// `Σₖ Pₖ`, the projector onto the declared subspace.
    pub fn support(&self) -> Operator {
        self.projectors
            .iter()
            .fold(Operator::zero(), |acc, p| &acc + p)
    }

    /// Whether the kets span all of the measured factors.
    pub fn is_complete(&self) -> bool {
        self.elements.len() == 1 << self.measured.len()
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn gram_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.elements.iter().enumerate() {
            for (j, b) in self.elements.iter().enumerate() {
                let g: C64 = a.ket.iter().zip(&b.ket).map(|(x, y)| x.conj() * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - C64::new(want, 0.0)).norm());
            }
        }
        worst
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub label: String,
    pub probability: f64,
    /// Normalized projection of the state; zero when unreachable.
    pub post_state: PhotonState,
    pub reachable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeDistribution {
    pub entries: Vec<Outcome>,
}

impl OutcomeDistribution {
    pub fn probability(&self, label: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|o| o.label == label)
            .map(|o| o.probability)
    }

    pub fn outcome(&self, label: &str) -> Option<&Outcome> {
        self.entries.iter().find(|o| o.label == label)
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|o| o.probability).sum()
    }

    pub fn probabilities(&self) -> Vec<(&str, f64)> {
        self.entries
            .iter()
            .map(|o| (o.label.as_str(), o.probability))
            .collect()
    }

    /// Largest absolute probability difference, matched by position.
    pub fn max_abs_diff(&self, other: &OutcomeDistribution) -> f64 {
        assert_eq!(self.entries.len(), other.entries.len(), "tables differ in size");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a.probability - b.probability).abs())
            .fold(0.0, f64::max)
    }
}

/// Born-rule probabilities and collapsed states of `s` in `basis`.
pub fn born_probabilities(
    s: &PhotonState,
    basis: &MeasurementBasis,
) -> Result<OutcomeDistribution, MeasureError> {
    let norm_sqr = s.norm_sqr();
    if (norm_sqr - 1.0).abs() > INPUT_TOL {
        return Err(MeasureError::NotNormalized(norm_sqr));
    }
    let entries: Vec<Outcome> = basis
        .elements
        .iter()
        .zip(&basis.projectors)
        .map(|(e, p)| {
            let projected = p.act(s);
            let mut probability = projected.norm_sqr();
            if probability < EXACT_TOL {
                probability = probability.max(0.0);
            }
            let reachable = probability >= EXACT_TOL;
            let post_state = if reachable {
                projected.scale(C64::new(1.0 / probability.sqrt(), 0.0))
            } else {
                PhotonState::zero()
            };
            Outcome {
                label: e.label.clone(),
                probability,
                post_state,
                reachable,
            }
        })
        .collect();
    let captured: f64 = entries.iter().map(|o| o.probability).sum();
    if captured < 1.0 - INPUT_TOL {
        return Err(MeasureError::IncompleteBasis { captured });
    }
    Ok(OutcomeDistribution { entries })
}

/// Shot counts in basis order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    pub shots: u64,
    pub seed: u64,
    pub counts: Vec<(String, u64)>,
}

impl Histogram {
    pub fn count(&self, label: &str) -> Option<u64> {
        self.counts.iter().find(|(l, _)| l == label).map(|(_, c)| *c)
    }
}

impl Serialize for Histogram {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Count<'a> {
            label: &'a str,
            count: u64,
        }
        #[derive(Serialize)]
        struct Repr<'a> {
            shots: u64,
            seed: u64,
            counts: Vec<Count<'a>>,
        }
        Repr {
            shots: self.shots,
            seed: self.seed,
            counts: self
                .counts
                .iter()
                .map(|(label, count)| Count { label, count: *count })
                .collect(),
        }
        .serialize(s)
    }
}

/// Generator for `stream` of `seed`. Stream 0 drives [`sample`].
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn draw(dist: &OutcomeDistribution, shots: u64, rng: &mut ChaCha8Rng, counts: &mut [u64]) {
    let last_reachable = dist
        .entries
        .iter()
        .rposition(|o| o.probability > 0.0)
        .unwrap_or(dist.entries.len() - 1);
    for _ in 0..shots {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut pick = last_reachable;
        for (i, o) in dist.entries.iter().enumerate() {
            acc += o.probability;
            if u < acc {
                pick = i;
                break;
            }
        }
        counts[pick] += 1;
    }
}

fn histogram(dist: &OutcomeDistribution, shots: u64, seed: u64, counts: Vec<u64>) -> Histogram {
    Histogram {
        shots,
        seed,
        counts: dist
            .entries
            .iter()
            .map(|o| o.label.clone())
            .zip(counts)
            .collect(),
    }
}

/// Sequential sampling; reproducible for a fixed seed.
pub fn sample(dist: &OutcomeDistribution, shots: u64, seed: u64) -> Result<Histogram, MeasureError> {
    if shots < 1 {
        return Err(MeasureError::NoShots);
    }
    let mut counts = vec![0; dist.entries.len()];
    draw(dist, shots, &mut rng_stream(seed, 0), &mut counts);
    Ok(histogram(dist, shots, seed, counts))
}

/// Splits the shots over `workers` threads, worker `k` drawing from stream
/// `k + 1`. Deterministic for fixed `(seed, workers)` but not equal to
/// [`sample`].
pub fn sample_parallel(
    dist: &OutcomeDistribution,
    shots: u64,
    seed: u64,
    workers: u64,
) -> Result<Histogram, MeasureError> {
    if shots < 1 {
        return Err(MeasureError::NoShots);
    }
    let workers = workers.clamp(1, shots);
    let per = shots / workers;
    let extra = shots % workers;
    let partials: Vec<Vec<u64>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|k| {
                let n = per + u64::from(k < extra);
                scope.spawn(move || {
                    let mut counts = vec![0; dist.entries.len()];
                    draw(dist, n, &mut rng_stream(seed, k + 1), &mut counts);
                    counts
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sampling worker panicked"))
            .collect()
    });
    let mut counts = vec![0; dist.entries.len()];
    for part in partials {
        counts.iter_mut().zip(part).for_each(|(c, p)| *c += p);
    }
    Ok(histogram(dist, shots, seed, counts))
}

/// A system qubit `S` whose pointer states are copied into a memory qubit `M`.
#[derive(Clone, Debug, PartialEq)]
pub struct MemoryRegister {
    pub system_factor: String,
    pub memory_factor: String,
    pointer_basis: [Qubit; 2],
}

impl MemoryRegister {
    pub fn new(
        system_factor: impl Into<String>,
        memory_factor: impl Into<String>,
        pointer_basis: [Qubit; 2],
    ) -> Result<Self, MeasureError> {
        check_qubit_basis(&pointer_basis, "pointer")?;
        Ok(Self {
            system_factor: system_factor.into(),
            memory_factor: memory_factor.into(),
            pointer_basis,
        })
    }

    /// Pointer basis `{|0⟩, |1⟩}`.
    pub fn computational() -> Self {
        Self {
            system_factor: "S".into(),
            memory_factor: "M".into(),
            pointer_basis: [qubit::ZERO, qubit::ONE],
        }
    }

    pub fn pointer_basis(&self) -> &[Qubit; 2] {
        &self.pointer_basis
    }
}

fn check_qubit_basis(basis: &[Qubit; 2], what: &str) -> Result<(), MeasureError> {
    for i in 0..2 {
        for j in i..2 {
            let g = qubit::inner(&basis[i], &basis[j]);
            let want = if i == j { 1.0 } else { 0.0 };
            if (g - C64::new(want, 0.0)).norm() > INPUT_TOL {
                return Err(MeasureError::NotOrthonormal {
                    a: format!("{what}{i}"),
                    b: format!("{what}{j}"),
                    value: g,
                });
            }
        }
    }
    Ok(())
}

/// Two-qubit state on `S ⊗ M`, `S` most significant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointState {
    pub amps: [C64; 4],
}

impl JointState {
    fn product_amplitude(&self, s: &Qubit, m: &Qubit) -> C64 {
        (0..4)
            .map(|k| (s[k >> 1] * m[k & 1]).conj() * self.amps[k])
            .sum()
    }
}

/// `c₀|p₀⟩_S|0⟩_M + c₁|p₁⟩_S|1⟩_M` for the register's pointer states `pₖ`.
pub fn entangle_with_memory(coeffs: [C64; 2], reg: &MemoryRegister) -> Result<JointState, MeasureError> {
    let n = qubit::norm_sqr(&coeffs);
    if (n - 1.0).abs() > INPUT_TOL {
        return Err(MeasureError::NotNormalized(n));
    }
    Ok(memory_form(coeffs, reg))
}

fn memory_form(coeffs: [C64; 2], reg: &MemoryRegister) -> JointState {
    let memory = [qubit::ZERO, qubit::ONE];
    let mut amps = [C64::new(0.0, 0.0); 4];
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                amps[2 * i + j] += coeffs[k] * reg.pointer_basis[k][i] * memory[k][j];
            }
        }
    }
    JointState { amps }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CollapseCheck {
    pub p_entangled: [f64; 2],
    pub p_mixture: [f64; 2],
    pub max_abs_diff: f64,
}

/// Compares probe statistics on `S` from the entangled joint state (memory
/// untouched) with those of the collapsed mixture `Σ|cₖ|²|pₖ⟩⟨pₖ|`.
pub fn effective_collapse_check(
    joint: &JointState,
    reg: &MemoryRegister,
    probe: &[Qubit; 2],
) -> Result<CollapseCheck, MeasureError> {
    check_qubit_basis(probe, "probe")?;
    let memory = [qubit::ZERO, qubit::ONE];
    let coeffs: [C64; 2] =
        std::array::from_fn(|k| joint.product_amplitude(&reg.pointer_basis[k], &memory[k]));
    let rebuilt = memory_form(coeffs, reg);
    let residual = joint
        .amps
        .iter()
        .zip(rebuilt.amps)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if residual > INPUT_TOL {
        return Err(MeasureError::NotMemoryForm(residual));
    }

    // Entangled description: Born rule with |a⟩⟨a| ⊗ I_M.
    let p_entangled: [f64; 2] = std::array::from_fn(|a| {
        memory
            .iter()
            .map(|m| joint.product_amplitude(&probe[a], m).norm_sqr())
            .sum()
    });

    // Collapsed description: ρ_S = Σ |cₖ|² |pₖ⟩⟨pₖ|.
    let mut rho = vec![C64::new(0.0, 0.0); 4];
    for (c, p) in coeffs.iter().zip(&reg.pointer_basis) {
        let w = c.norm_sqr();
        for i in 0..2 {
            for j in 0..2 {
                rho[2 * i + j] += p[i] * p[j].conj() * w;
            }
        }
    }
    let rho = DensityMatrix::new(1, rho)?;
    let p_mixture: [f64; 2] = std::array::from_fn(|a| rho.expectation(&probe[a]));

    let max_abs_diff = (0..2)
        .map(|a| (p_entangled[a] - p_mixture[a]).abs())
        .fold(0.0, f64::max);
    Ok(CollapseCheck {
        p_entangled,
        p_mixture,
        max_abs_diff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{ket, BasisLabel, Path, Pol, Shape};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn hv_path() -> MeasurementBasis {
        let mut els = Vec::new();
        for (pl, p) in [("H", qubit::H), ("V", qubit::V)] {
            for (nl, n) in [("l", qubit::L), ("r", qubit::R)] {
                let k: Vec<C64> = (0..4).map(|i| p[i >> 1] * n[i & 1]).collect();
                els.push((format!("{pl},{nl}"), k));
            }
        }
        MeasurementBasis::new(&[Factor::Pol, Factor::Path], els).unwrap()
    }

    #[test]
    fn basis_validation() {
        assert_eq!(
            MeasurementBasis::new(&[], vec![("a".into(), vec![re(1.0)])]),
            Err(MeasureError::NoFactors)
        );
        assert_eq!(
            MeasurementBasis::new(&[Factor::Pol], vec![]),
            Err(MeasureError::EmptyBasis)
        );
        let bad = MeasurementBasis::new(
            &[Factor::Pol],
            vec![("H".into(), qubit::H.to_vec()), ("D".into(), qubit::D.to_vec())],
        );
        assert!(matches!(bad, Err(MeasureError::NotOrthonormal { .. })));
        let dup = MeasurementBasis::new(
            &[Factor::Pol],
            vec![("x".into(), qubit::H.to_vec()), ("x".into(), qubit::V.to_vec())],
        );
        assert_eq!(dup, Err(MeasureError::BadLabel("x".into())));
        let dim = MeasurementBasis::new(&[Factor::Pol, Factor::Path], vec![("x".into(), qubit::H.to_vec())]);
        assert!(matches!(dim, Err(MeasureError::KetDimension { .. })));
    }

    #[test]
    fn complete_basis_sums_to_identity() {
        let b = hv_path();
        assert!(b.is_complete());
        assert!(b.support().approx_eq(&Operator::identity(), EXACT_TOL));
        for i in 0..b.len() {
            assert!(b.projector(i).is_projector(EXACT_TOL));
        }
    }

    #[test]
    fn basis_state_measures_deterministically() {
        let s = ket(BasisLabel::new(Pol::H, Path::R, Shape::One));
        let dist = born_probabilities(&s, &hv_path()).unwrap();
        assert_eq!(dist.probability("H,r"), Some(1.0));
        assert_eq!(dist.total(), 1.0);
        let unreachable = dist.outcome("V,l").unwrap();
        assert!(!unreachable.reachable);
        assert_eq!(unreachable.post_state, PhotonState::zero());
    }

    #[test]
    fn diagonal_polarization_spreads_evenly() {
        let s = PhotonState::product(qubit::D, qubit::L, qubit::S2);
        let dist = born_probabilities(&s, &hv_path()).unwrap();
        assert!((dist.probability("H,l").unwrap() - 0.5).abs() < EXACT_TOL);
        assert!((dist.probability("V,l").unwrap() - 0.5).abs() < EXACT_TOL);
        assert!((dist.total() - 1.0).abs() < EXACT_TOL);
    }

    #[test]
    fn incomplete_basis_and_unnormalized_state_are_rejected() {
        let partial = MeasurementBasis::new(&[Factor::Pol], vec![("H".into(), qubit::H.to_vec())]).unwrap();
        let s = PhotonState::product(qubit::D, qubit::L, qubit::S1);
        assert!(matches!(
            born_probabilities(&s, &partial),
            Err(MeasureError::IncompleteBasis { .. })
        ));
        // A partial basis is fine when the state lives in its span.
        let h = PhotonState::product(qubit::H, qubit::L, qubit::S1);
        assert_eq!(born_probabilities(&h, &partial).unwrap().probability("H"), Some(1.0));
        assert!(matches!(
            born_probabilities(&s.scale(re(2.0)), &hv_path()),
            Err(MeasureError::NotNormalized(_))
        ));
    }

    #[test]
    fn sampling_point_mass_and_determinism() {
        let s = ket(BasisLabel::new(Pol::V, Path::L, Shape::One));
        let dist = born_probabilities(&s, &hv_path()).unwrap();
        let h = sample(&dist, 100, 7).unwrap();
        assert_eq!(h.count("V,l"), Some(100));
        assert_eq!(h.counts.iter().map(|c| c.1).sum::<u64>(), 100);
        assert_eq!(sample(&dist, 0, 1), Err(MeasureError::NoShots));

        let d = PhotonState::product(qubit::D, [re(0.6), re(0.8)], qubit::S1);
        let dist = born_probabilities(&d, &hv_path()).unwrap();
        assert_eq!(sample(&dist, 5000, 3).unwrap(), sample(&dist, 5000, 3).unwrap());
        assert_ne!(sample(&dist, 5000, 3).unwrap(), sample(&dist, 5000, 4).unwrap());
    }

    #[test]
    fn parallel_sampling_is_deterministic_and_complete() {
        let d = PhotonState::product(qubit::D, [re(0.6), re(0.8)], qubit::S1);
        let dist = born_probabilities(&d, &hv_path()).unwrap();
        let a = sample_parallel(&dist, 10_001, 9, 4).unwrap();
        assert_eq!(a, sample_parallel(&dist, 10_001, 9, 4).unwrap());
        assert_eq!(a.counts.iter().map(|c| c.1).sum::<u64>(), 10_001);
        for (label, p) in dist.probabilities() {
            let n = 10_001.0;
            let sigma = (n * p * (1.0 - p)).sqrt();
            let got = a.count(label).unwrap() as f64;
            assert!((got - n * p).abs() <= 5.0 * sigma + 1.0, "{label}: {got}");
        }
    }

    #[test]
    fn memory_entanglement_examples() {
        let reg = MemoryRegister::computational();
        let j = entangle_with_memory([re(1.0), re(0.0)], &reg).unwrap();
        assert_eq!(j.amps, [re(1.0), re(0.0), re(0.0), re(0.0)]);
        let j = entangle_with_memory([re(FRAC_1_SQRT_2), re(FRAC_1_SQRT_2)], &reg).unwrap();
        assert_eq!(j.amps[0], j.amps[3]);
        let (a, b) = (1.0 / 3f64.sqrt(), (2.0f64 / 3.0).sqrt());
        let j = entangle_with_memory([re(a), re(b)], &reg).unwrap();
        assert_eq!(j.amps, [re(a), re(0.0), re(0.0), re(b)]);
        assert!(matches!(
            entangle_with_memory([re(1.0), re(1.0)], &reg),
            Err(MeasureError::NotNormalized(_))
        ));
    }

    #[test]
    fn collapse_check_in_pointer_and_diagonal_bases() {
        let reg = MemoryRegister::computational();
        let (a, b) = (0.6, 0.8);
        let j = entangle_with_memory([re(a), re(b)], &reg).unwrap();
        let c = effective_collapse_check(&j, &reg, &[qubit::ZERO, qubit::ONE]).unwrap();
        assert!((c.p_entangled[0] - a * a).abs() < EXACT_TOL);
        assert!((c.p_mixture[1] - b * b).abs() < EXACT_TOL);
        assert!(c.max_abs_diff < EXACT_TOL);

        let j = entangle_with_memory([re(FRAC_1_SQRT_2), re(FRAC_1_SQRT_2)], &reg).unwrap();
        let c = effective_collapse_check(&j, &reg, &[qubit::D, qubit::A]).unwrap();
        for p in c.p_entangled.iter().chain(&c.p_mixture) {
            assert!((p - 0.5).abs() < EXACT_TOL);
        }
    }

    #[test]
    fn collapse_check_rejects_touched_memory() {
        let reg = MemoryRegister::computational();
        // |0⟩_S |+⟩_M is not of the copied-pointer form.
        let s = FRAC_1_SQRT_2;
        let j = JointState { amps: [re(s), re(s), re(0.0), re(0.0)] };
        assert!(matches!(
            effective_collapse_check(&j, &reg, &[qubit::D, qubit::A]),
            Err(MeasureError::NotMemoryForm(_))
        ));
    }
}
