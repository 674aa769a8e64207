//! The interferometric Wigner's-friend pipeline.
//!
//! A diagonally polarized photon in shape 2 enters a 1/3-transmission beam
//! splitter. The path is the first friend's qubit and the shape is that
//! friend's memory: a mode shaper in arm `r` writes the which-path record.
//! A 45° rotator in arm `r` prepares the second friend's qubit in the
//! polarization. Wigner then measures the two labs in one of two contexts:
//!
//! * **Context 1**: a second shaper in arm `r` undoes the record before the
//!   balanced beam splitter, realizing the entangled path⊗shape `ok/fail`
//!   basis (memory erased).
//! * **Context 2**: no second shaper; the readout acts on the path alone as
//!   `ok'/fail'` and the shape record survives.
//!
//! Three zero-probability properties are tracked:
//! P1 `(H ∧ r) = 0`, P2 `(A ∧ l) = 0`, P3 `(V ∧ ok) = 0`. Only P3 needs a
//! context; P1 and P2 need the which-path record, which Context 1 erases.
//!
//! The second shaper must sit in arm `r`, the only arm carrying shape 1 after
//! the first shaper.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::bases;
use crate::dsl::{Circuit, MeasurementSpec, PolSpec, SourceSpec};
use crate::measure::{born_probabilities, MeasureError, MeasurementBasis, OutcomeDistribution};
use crate::number::Real;
use crate::optics::{self, ElementSpec, OpticsError, ShapeMap};
use crate::qstate::qubit::{self, Qubit};
use crate::qstate::{commutator, Factor, Operator, Path, PhotonState, Shape, C64, EXACT_TOL, INPUT_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("P3 is undefined before a measurement context is chosen")]
    UndefinedBeforeContext,
    #[error("input state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error(transparent)]
    Optics(#[from] OpticsError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ContextId {
    One,
    Two,
}

impl ContextId {
    pub const ALL: [ContextId; 2] = [ContextId::One, ContextId::Two];

    pub fn name(self) -> &'static str {
        match self {
            ContextId::One => "context-1",
            ContextId::Two => "context-2",
        }
    }

    /// Label suffix of the Wigner outcomes (`ok` vs `ok'`).
    fn prime(self) -> &'static str {
        match self {
            ContextId::One => "",
            ContextId::Two => "'",
        }
    }

    /// Label of the `(A, ok)` outcome.
    pub fn a_ok_label(self) -> String {
        format!("A,ok{}", self.prime())
    }

    /// Label of the `(V, ok)` outcome used by P3.
    pub fn v_ok_label(self) -> String {
        format!("V,ok{}", self.prime())
    }
}

impl fmt::Display for ContextId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for ContextId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl FromStr for ContextId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1" | "context-1" | "context1" => Ok(ContextId::One),
            "2" | "context-2" | "context2" => Ok(ContextId::Two),
            other => Err(format!("unknown context `{other}` (expected 1 or 2)")),
        }
    }
}

/// A measurement context: its element pipeline and Wigner's basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Context {
    pub id: ContextId,
    pub pipeline: Circuit,
    pub wigner_basis: MeasurementBasis,
}

fn source() -> SourceSpec {
    SourceSpec {
        pol: PolSpec::D,
        path: Path::R,
        shape: Shape::Two,
    }
}

/// Elements inside the friends' labs: splitter, which-path record, rotator.
fn lab_elements() -> Vec<ElementSpec> {
    vec![
        ElementSpec::BeamSplitter {
            transmission: Real::rational(1, 3),
        },
        ElementSpec::ModeShaper {
            arm: Path::R,
            map: ShapeMap::TwoToOne,
        },
        ElementSpec::PolRotator {
            arm: Path::R,
            angle: Real::decimal(45.0),
        },
    ]
}

fn eraser() -> ElementSpec {
    ElementSpec::ModeShaper {
        arm: Path::R,
        map: ShapeMap::OneToTwo,
    }
}

pub fn context(id: ContextId) -> Context {
    let mut elements = lab_elements();
    let readout = match id {
        ContextId::One => {
            elements.push(eraser());
            "da-okfail"
        }
        ContextId::Two => "da-okfail-prime",
    };
    let pipeline = Circuit::new(source(), elements, MeasurementSpec::Named(readout.into()))
        .expect("built-in context circuits are valid");
    Context {
        id,
        pipeline,
        wigner_basis: wigner_basis(id),
    }
}

/// State after the first beam splitter: `(|D,r,2⟩ + √2|D,l,2⟩)/√3`.
pub fn build_psi0() -> PhotonState {
    let bs = optics::beam_splitter(1.0 / 3.0).expect("1/3 is a valid transmission");
    optics::apply(&bs, &source().state()).expect("beam splitter is unitary")
}

/// Which-path record then rotation in arm `r`:
/// `(|V,r,1⟩ + √2|D,l,2⟩)/√3` from [`build_psi0`].
pub fn evolve_to_psi2(psi0: &PhotonState) -> Result<PhotonState, ScenarioError> {
    let n = psi0.norm_sqr();
    if (n - 1.0).abs() > INPUT_TOL {
        return Err(ScenarioError::NotNormalized(n));
    }
    let shaper = optics::mode_shaper(Path::R, ShapeMap::TwoToOne);
    let rot = optics::pol_rotator(Path::R, 45.0);
    let psi1 = optics::apply(&shaper, psi0)?;
    Ok(optics::apply(&rot, &psi1)?)
}

/// The photon leaving the friends' labs.
pub fn psi2() -> PhotonState {
    evolve_to_psi2(&build_psi0()).expect("psi0 is normalized")
}

/// Polarization basis placed behind one output arm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PolBasis {
    HV,
    DA,
}

impl PolBasis {
    pub fn kets(self) -> [(&'static str, Qubit); 2] {
        match self {
            PolBasis::HV => [("H", qubit::H), ("V", qubit::V)],
            PolBasis::DA => [("D", qubit::D), ("A", qubit::A)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationEntry {
    pub path: Path,
    pub pol: &'static str,
    pub probability: f64,
}

/// Joint path/polarization statistics with a per-arm polarization basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationTable {
    pub entries: Vec<CorrelationEntry>,
}

impl CorrelationTable {
    pub fn get(&self, path: Path, pol: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.path == path && e.pol == pol)
            .map(|e| e.probability)
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.probability).sum()
    }
}

/// Photon counters on both arms, each behind a polarizing splitter set to
/// its own basis; the shape is not read.
pub fn correlation_table(
    psi2: &PhotonState,
    pol_basis_r: PolBasis,
    pol_basis_l: PolBasis,
) -> Result<CorrelationTable, ScenarioError> {
    let mut els = Vec::with_capacity(4);
    let mut meta = Vec::with_capacity(4);
    for (path, arm_ket, basis) in [(Path::L, qubit::L, pol_basis_l), (Path::R, qubit::R, pol_basis_r)] {
        for (name, pol) in basis.kets() {
            let ket: Vec<C64> = pol
                .iter()
                .flat_map(|a| arm_ket.iter().map(move |b| a * b))
                .collect();
            els.push((format!("{name},{path}"), ket));
            meta.push((path, name));
        }
    }
    let basis = MeasurementBasis::new(&[Factor::Pol, Factor::Path], els)?;
    let dist = born_probabilities(psi2, &basis)?;
    Ok(CorrelationTable {
        entries: meta
            .into_iter()
            .zip(dist.entries)
            .map(|((path, pol), o)| CorrelationEntry {
                path,
                pol,
                probability: o.probability,
            })
            .collect(),
    })
}

/// Context 1: `{D,A} × {fail, ok}` on pol ⊗ (path ⊗ shape).
/// Context 2: `{D,A} × {fail', ok'}` on pol ⊗ path, identity on shape.
pub fn wigner_basis(ctx: ContextId) -> MeasurementBasis {
    match ctx {
        ContextId::One => bases::da_okfail_lab(),
        ContextId::Two => bases::da_okfail_prime(),
    }
}

/// State Wigner measures: `Ψ₂`, whose coordinates in the context basis are
/// given by [`context_amplitudes`].
pub fn context_state(_ctx: ContextId) -> PhotonState {
    psi2()
}

/// Coordinates of `Ψ₂` in the context's basis. Context 2 leaves the shape
/// untouched, so its coordinates carry a trailing `,1` / `,2` shape label.
pub fn context_amplitudes(ctx: ContextId) -> Vec<(String, C64)> {
    let psi = context_state(ctx);
    let basis = wigner_basis(ctx);
    match ctx {
        ContextId::One => basis
            .elements()
            .iter()
            .map(|e| (e.label.clone(), dot(&e.ket, psi.amplitudes())))
            .collect(),
        ContextId::Two => {
            let mut out = Vec::with_capacity(8);
            for e in basis.elements() {
                for (s, shape) in [("1", qubit::S1), ("2", qubit::S2)] {
                    let full: Vec<C64> = e
                        .ket
                        .iter()
                        .flat_map(|a| shape.iter().map(move |b| a * b))
                        .collect();
                    out.push((format!("{},{s}", e.label), dot(&full, psi.amplitudes())));
                }
            }
            out
        }
    }
}

fn dot(bra: &[C64], ket: &[C64]) -> C64 {
    bra.iter().zip(ket).map(|(a, b)| a.conj() * b).sum()
}

/// Table from the context's element pipeline and named detector readout.
pub fn pipeline_table(ctx: ContextId) -> Result<OutcomeDistribution, ScenarioError> {
    Ok(context(ctx).pipeline.run()?)
}

/// Table from projecting `Ψ₂` straight onto the context basis.
pub fn basis_change_table(ctx: ContextId) -> Result<OutcomeDistribution, ScenarioError> {
    Ok(born_probabilities(&context_state(ctx), &wigner_basis(ctx))?)
}

/// Table from an explicit balanced splitter and port counters: the port
/// reached by `(|r⟩+|l⟩)/√2` (`r`) reads `fail`, the other (`l`) reads `ok`;
/// polarizing splitters sort `D` from `A`.
pub fn detector_table(ctx: ContextId) -> Result<OutcomeDistribution, ScenarioError> {
    let c = context(ctx);
    let before_readout = c.pipeline.output_state();
    let bs = optics::beam_splitter(0.5)?;
    let at_ports = optics::apply(&bs, &before_readout)?;
    let p = ctx.prime();
    let mut els = Vec::with_capacity(4);
    for (pn, pol) in [("D", qubit::D), ("A", qubit::A)] {
        for (port, outcome) in [(qubit::R, "fail"), (qubit::L, "ok")] {
            let ket: Vec<C64> = pol
                .iter()
                .flat_map(|a| port.iter().map(move |b| a * b))
                .collect();
            els.push((format!("{pn},{outcome}{p}"), ket));
        }
    }
    let ports = MeasurementBasis::new(&[Factor::Pol, Factor::Path], els)?;
    Ok(born_probabilities(&at_ports, &ports)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PropertyId {
    P1,
    P2,
    P3,
}

impl PropertyId {
    pub const ALL: [PropertyId; 3] = [PropertyId::P1, PropertyId::P2, PropertyId::P3];

    pub fn statement(self) -> &'static str {
        match self {
            PropertyId::P1 => "P(H and arm r) = 0",
            PropertyId::P2 => "P(A and arm l) = 0",
            PropertyId::P3 => "P(V and ok) = 0",
        }
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for PropertyId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "P1" | "p1" => Ok(PropertyId::P1),
            "P2" | "p2" => Ok(PropertyId::P2),
            "P3" | "p3" => Ok(PropertyId::P3),
            other => Err(format!("unknown property `{other}` (expected P1, P2 or P3)")),
        }
    }
}

/// Where a property is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scope {
    /// On `Ψ₂`, before Wigner commits to a context.
    PreWigner,
    Context(ContextId),
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::PreWigner => f.write_str("pre-wigner"),
            Scope::Context(c) => f.write_str(c.name()),
        }
    }
}

impl Serialize for Scope {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PropertyStatus {
    Holds,
    Violated,
    /// The record the property talks about does not exist in this context.
    Unverifiable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    #[serde(rename = "property_id")]
    pub property: PropertyId,
    #[serde(rename = "context")]
    pub scope: Scope,
    pub status: PropertyStatus,
    /// Probability of the forbidden event; absent when unverifiable.
    #[serde(rename = "amplitude_magnitude")]
    pub magnitude: Option<f64>,
    pub holds: bool,
}

impl PropertyReport {
    fn evaluated(property: PropertyId, scope: Scope, magnitude: f64) -> Self {
        let holds = magnitude < EXACT_TOL;
        Self {
            property,
            scope,
            status: if holds {
                PropertyStatus::Holds
            } else {
                PropertyStatus::Violated
            },
            magnitude: Some(magnitude),
            holds,
        }
    }

    fn unverifiable(property: PropertyId, scope: Scope) -> Self {
        Self {
            property,
            scope,
            status: PropertyStatus::Unverifiable,
            magnitude: None,
            holds: false,
        }
    }
}

fn label_state(pol: Qubit, path: Qubit, shape: Qubit) -> PhotonState {
    PhotonState::product(pol, path, shape)
}

fn v_ok_lab() -> PhotonState {
    let ok = bases::ok_lab();
    let mut amps = [C64::new(0.0, 0.0); 8];
    for (i, a) in amps.iter_mut().enumerate() {
        *a = qubit::V[i >> 2] * ok[i & 3];
    }
    PhotonState::from_amplitudes(amps)
}

pub fn check_property(p: PropertyId, scope: Scope) -> Result<PropertyReport, ScenarioError> {
    let psi = psi2();
    let report = match (p, scope) {
        (PropertyId::P3, Scope::PreWigner) => return Err(ScenarioError::UndefinedBeforeContext),
        (PropertyId::P1 | PropertyId::P2, Scope::Context(ContextId::One)) => {
            PropertyReport::unverifiable(p, scope)
        }
        (PropertyId::P1, _) => {
            let h_r_1 = label_state(qubit::H, qubit::R, qubit::S1);
            PropertyReport::evaluated(p, scope, crate::qstate::inner(&h_r_1, &psi).norm_sqr())
        }
        (PropertyId::P2, _) => {
            let a_l_2 = label_state(qubit::A, qubit::L, qubit::S2);
            PropertyReport::evaluated(p, scope, crate::qstate::inner(&a_l_2, &psi).norm_sqr())
        }
        (PropertyId::P3, Scope::Context(ContextId::One)) => {
            let proj = Operator::projector(&v_ok_lab());
            PropertyReport::evaluated(p, scope, proj.act(&psi).norm_sqr())
        }
        (PropertyId::P3, Scope::Context(ContextId::Two)) => {
            let ok = bases::ok_prime();
            let ket: Vec<C64> = qubit::V
                .iter()
                .flat_map(|a| ok.iter().map(move |b| a * b))
                .collect();
            let basis = MeasurementBasis::new(&[Factor::Pol, Factor::Path], vec![("V,ok'".into(), ket)])?;
            PropertyReport::evaluated(p, scope, basis.projector(0).act(&psi).norm_sqr())
        }
    };
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommutatorReport {
    pub pair: (u8, u8),
    pub frobenius_norm: f64,
    pub anti_hermitian: bool,
    #[serde(skip)]
    pub matrix: Operator,
}

impl CommutatorReport {
    pub fn vanishes(&self) -> bool {
        self.frobenius_norm < EXACT_TOL
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Observables {
    /// `|H,r,1⟩⟨H,r,1|`
    pub o1: Operator,
    /// `|A,l,2⟩⟨A,l,2|`
    pub o2: Operator,
    /// `|V,ok⟩⟨V,ok|`
    pub o3: Operator,
    /// `[O1,O2]`, `[O1,O3]`, `[O2,O3]` in that order.
    pub commutators: Vec<CommutatorReport>,
}

/// The three projectors whose zero values are P1–P3, and their commutators.
pub fn observables() -> Observables {
    let o1 = Operator::projector(&label_state(qubit::H, qubit::R, qubit::S1));
    let o2 = Operator::projector(&label_state(qubit::A, qubit::L, qubit::S2));
    let o3 = Operator::projector(&v_ok_lab());
    let ops = [&o1, &o2, &o3];
    let commutators = [(0usize, 1usize), (0, 2), (1, 2)]
        .into_iter()
        .map(|(a, b)| {
            let matrix = commutator(ops[a], ops[b]);
            CommutatorReport {
                pair: (a as u8 + 1, b as u8 + 1),
                frobenius_norm: matrix.frobenius_norm(),
                anti_hermitian: matrix.is_anti_hermitian(EXACT_TOL),
                matrix,
            }
        })
        .collect();
    Observables {
        o1,
        o2,
        o3,
        commutators,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParadoxStep {
    pub property: PropertyId,
    pub inference: &'static str,
    pub status: PropertyStatus,
}

/// The three-step argument that rules out `(A, ok)`, evaluated in one
/// context, next to the probability the context actually assigns it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParadoxTrace {
    pub context: ContextId,
    pub steps: Vec<ParadoxStep>,
    pub properties: Vec<PropertyReport>,
    pub all_hold: bool,
    /// First step whose property does not hold.
    pub chain_broken_at: Option<PropertyId>,
    pub a_ok_label: String,
    pub p_a_ok: f64,
}

pub fn paradox_trace(ctx: ContextId) -> Result<ParadoxTrace, ScenarioError> {
    let scope = Scope::Context(ctx);
    let properties = PropertyId::ALL
        .iter()
        .map(|p| check_property(*p, scope))
        .collect::<Result<Vec<_>, _>>()?;
    let status = |p: PropertyId| properties[p as usize].status;
    let steps = vec![
        ParadoxStep {
            property: PropertyId::P2,
            inference: "A is excluded in arm l, so (A,ok) requires arm r",
            status: status(PropertyId::P2),
        },
        ParadoxStep {
            property: PropertyId::P1,
            inference: "arm r excludes H, so the photon is V",
            status: status(PropertyId::P1),
        },
        ParadoxStep {
            property: PropertyId::P3,
            inference: "V excludes ok, so (A,ok) is forbidden",
            status: status(PropertyId::P3),
        },
    ];
    let chain_broken_at = steps
        .iter()
        .find(|s| s.status != PropertyStatus::Holds)
        .map(|s| s.property);
    let a_ok_label = ctx.a_ok_label();
    let p_a_ok = pipeline_table(ctx)?
        .probability(&a_ok_label)
        .expect("context tables carry the (A,ok) label");
    Ok(ParadoxTrace {
        context: ctx,
        steps,
        all_hold: properties.iter().all(|r| r.holds),
        properties,
        chain_broken_at,
        a_ok_label,
        p_a_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{density_from_pure, inner, partial_trace, Subsystems};

    const T: f64 = EXACT_TOL;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < T
    }

    #[test]
    fn psi0_coefficients() {
        let psi0 = build_psi0();
        assert!(close(psi0.norm(), 1.0));
        let d_r_2 = label_state(qubit::D, qubit::R, qubit::S2);
        let d_l_2 = label_state(qubit::D, qubit::L, qubit::S2);
        assert!((inner(&d_r_2, &psi0) - C64::new(1.0 / 3f64.sqrt(), 0.0)).norm() < T);
        assert!((inner(&d_l_2, &psi0) - C64::new((2.0f64 / 3.0).sqrt(), 0.0)).norm() < T);
    }

    #[test]
    fn psi2_coefficients() {
        let psi = psi2();
        let v_r_1 = label_state(qubit::V, qubit::R, qubit::S1);
        assert!((inner(&v_r_1, &psi) - C64::new(1.0 / 3f64.sqrt(), 0.0)).norm() < T);
        assert!(inner(&label_state(qubit::H, qubit::R, qubit::S1), &psi).norm() < T);
        assert!(inner(&label_state(qubit::A, qubit::L, qubit::S2), &psi).norm() < T);
        assert!(matches!(
            evolve_to_psi2(&psi.scale(C64::new(2.0, 0.0))),
            Err(ScenarioError::NotNormalized(_))
        ));
    }

    #[test]
    fn shaper_writes_a_which_path_record() {
        // After the first shaper the path qubit alone is an incoherent mixture.
        let psi1 = optics::mode_shaper(Path::R, ShapeMap::TwoToOne).act(&build_psi0());
        let rho = partial_trace(&density_from_pure(&psi1).unwrap(), Subsystems::from_factors(&[Factor::Path])).unwrap();
        assert!(close(rho.entry(0, 0).re, 2.0 / 3.0));
        assert!(close(rho.entry(1, 1).re, 1.0 / 3.0));
        assert!(rho.entry(0, 1).norm() < T);
        // Without the record the path stays coherent.
        let rho0 = partial_trace(&density_from_pure(&build_psi0()).unwrap(), Subsystems::from_factors(&[Factor::Path])).unwrap();
        assert!(close(rho0.entry(0, 1).re, 2f64.sqrt() / 3.0));
    }

    #[test]
    fn correlations_behind_the_labs() {
        let t = correlation_table(&psi2(), PolBasis::HV, PolBasis::DA).unwrap();
        assert!(close(t.get(Path::R, "H").unwrap(), 0.0));
        assert!(close(t.get(Path::R, "V").unwrap(), 1.0 / 3.0));
        assert!(close(t.get(Path::L, "A").unwrap(), 0.0));
        assert!(close(t.get(Path::L, "D").unwrap(), 2.0 / 3.0));
        assert!(close(t.total(), 1.0));
    }

    #[test]
    fn wigner_basis_coefficients() {
        let b1 = wigner_basis(ContextId::One);
        assert!(b1.gram_defect() < T);
        // ⟨fail | r,1⟩ = 1/√2
        let r1 = bases::fail_lab()[2];
        assert!(close(r1.re, std::f64::consts::FRAC_1_SQRT_2));
        let b2 = wigner_basis(ContextId::Two);
        assert_eq!(b2.measured_factors(), vec![Factor::Pol, Factor::Path]);
        assert!(close(bases::ok_prime()[0].re, -std::f64::consts::FRAC_1_SQRT_2));
    }

    #[test]
    fn context_one_amplitudes() {
        let want = [3.0, -1.0, -1.0, -1.0].map(|x| x / 12f64.sqrt());
        let got = context_amplitudes(ContextId::One);
        let labels: Vec<&str> = got.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(labels, ["D,fail", "D,ok", "A,fail", "A,ok"]);
        for ((_, a), w) in got.iter().zip(want) {
            assert!((a - C64::new(w, 0.0)).norm() < T);
        }
    }

    #[test]
    fn context_two_amplitudes_by_shape() {
        // Hand expansion of Ψ₂ in {D,A} ⊗ {fail',ok'} ⊗ {1,2}, ×√12.
        let want = [
            ("D,fail',1", 1.0),
            ("D,fail',2", 2.0),
            ("D,ok',1", 1.0),
            ("D,ok',2", -2.0),
            ("A,fail',1", -1.0),
            ("A,fail',2", 0.0),
            ("A,ok',1", -1.0),
            ("A,ok',2", 0.0),
        ];
        let got = context_amplitudes(ContextId::Two);
        for ((label, a), (wl, w)) in got.iter().zip(want) {
            assert_eq!(label, wl);
            assert!((a - C64::new(w / 12f64.sqrt(), 0.0)).norm() < T, "{label}");
        }
    }

    #[test]
    fn three_routes_agree() {
        for ctx in ContextId::ALL {
            let a = pipeline_table(ctx).unwrap();
            let b = basis_change_table(ctx).unwrap();
            let c = detector_table(ctx).unwrap();
            let la: Vec<&str> = a.entries.iter().map(|o| o.label.as_str()).collect();
            let lc: Vec<&str> = c.entries.iter().map(|o| o.label.as_str()).collect();
            assert_eq!(la, lc);
            assert!(a.max_abs_diff(&b) < T, "{ctx}");
            assert!(a.max_abs_diff(&c) < T, "{ctx}");
        }
    }

    #[test]
    fn property_checks() {
        let r = check_property(PropertyId::P1, Scope::PreWigner).unwrap();
        assert!(r.holds);
        let r = check_property(PropertyId::P3, Scope::Context(ContextId::One)).unwrap();
        assert!(r.holds);
        let r = check_property(PropertyId::P3, Scope::Context(ContextId::Two)).unwrap();
        assert_eq!(r.status, PropertyStatus::Violated);
        assert!(close(r.magnitude.unwrap(), 1.0 / 3.0));
        let r = check_property(PropertyId::P2, Scope::Context(ContextId::One)).unwrap();
        assert_eq!(r.status, PropertyStatus::Unverifiable);
        assert!(!r.holds);
        assert_eq!(
            check_property(PropertyId::P3, Scope::PreWigner),
            Err(ScenarioError::UndefinedBeforeContext)
        );
    }

    #[test]
    fn observables_are_projectors_with_one_non_commuting_pair() {
        let obs = observables();
        for o in [&obs.o1, &obs.o2, &obs.o3] {
            assert!(o.is_projector(T));
        }
        let nonzero: Vec<_> = obs.commutators.iter().filter(|c| !c.vanishes()).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(nonzero[0].pair, (2, 3));
    }

    #[test]
    fn paradox_traces() {
        let t1 = paradox_trace(ContextId::One).unwrap();
        assert!(!t1.all_hold);
        assert_eq!(t1.chain_broken_at, Some(PropertyId::P2));
        assert!(close(t1.p_a_ok, 1.0 / 12.0));
        let t2 = paradox_trace(ContextId::Two).unwrap();
        assert!(!t2.all_hold);
        assert_eq!(t2.chain_broken_at, Some(PropertyId::P3));
        assert!(t2.properties[0].holds && t2.properties[1].holds);
    }

    #[test]
    fn context_ids_parse() {
        assert_eq!("1".parse::<ContextId>(), Ok(ContextId::One));
        assert_eq!("context-2".parse::<ContextId>(), Ok(ContextId::Two));
        assert!("3".parse::<ContextId>().is_err());
    }
}
