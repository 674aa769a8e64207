//! Optical-element unitaries: beam splitters on the path qubit, mode shapers
//! and polarization rotators conditioned on one interferometer arm.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::number::Real;
use crate::qstate::{Factor, Operator, Path, PhotonState, Subsystems, C64, INPUT_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpticsError {
    #[error("beam-splitter transmission {0} outside [0, 1]")]
    TransmissionOutOfRange(f64),
    #[error("rotation angle {0}° outside (-180, 180]")]
    AngleOutOfRange(f64),
    #[error("operator is not unitary within {INPUT_TOL}")]
    NotUnitary,
    #[error("cannot compose an empty element list")]
    EmptyComposition,
}

/// Direction a mode shaper is described with. Both directions lower to the
/// same conditional swap of the two shapes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ShapeMap {
    #[serde(rename = "1-2")]
    OneToTwo,
    #[serde(rename = "2-1")]
    TwoToOne,
}

impl ShapeMap {
    pub fn symbol(self) -> &'static str {
        match self {
            ShapeMap::OneToTwo => "1-2",
            ShapeMap::TwoToOne => "2-1",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        match s {
            "1-2" => Some(ShapeMap::OneToTwo),
            "2-1" => Some(ShapeMap::TwoToOne),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ElementKind {
    BeamSplitter,
    ModeShaper,
    PolRotator,
}

/// Description of one optical element. Beam splitters act on both arms;
/// shapers and rotators sit in a single arm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum ElementSpec {
    BeamSplitter { transmission: Real },
    ModeShaper { arm: Path, map: ShapeMap },
    /// `angle` in degrees.
    PolRotator { arm: Path, angle: Real },
}

impl ElementSpec {
    pub fn kind(&self) -> ElementKind {
        match self {
            ElementSpec::BeamSplitter { .. } => ElementKind::BeamSplitter,
            ElementSpec::ModeShaper { .. } => ElementKind::ModeShaper,
            ElementSpec::PolRotator { .. } => ElementKind::PolRotator,
        }
    }

    pub fn arm(&self) -> Option<Path> {
        match self {
            ElementSpec::BeamSplitter { .. } => None,
            ElementSpec::ModeShaper { arm, .. } | ElementSpec::PolRotator { arm, .. } => Some(*arm),
        }
    }

    pub fn validate(&self) -> Result<(), OpticsError> {
        match self {
            ElementSpec::BeamSplitter { transmission } => check_transmission(transmission.value()),
            ElementSpec::ModeShaper { .. } => Ok(()),
            ElementSpec::PolRotator { angle, .. } => check_angle(angle.value()),
        }
    }

    pub fn operator(&self) -> Result<Operator, OpticsError> {
        self.validate()?;
        Ok(match self {
            ElementSpec::BeamSplitter { transmission } => beam_splitter(transmission.value())?,
            ElementSpec::ModeShaper { arm, map } => mode_shaper(*arm, *map),
            ElementSpec::PolRotator { arm, angle } => pol_rotator(*arm, angle.value()),
        })
    }
}

impl fmt::Display for ElementSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementSpec::BeamSplitter { transmission } => write!(f, "bs T={transmission}"),
            ElementSpec::ModeShaper { arm, map } => {
                write!(f, "shaper arm={arm} map={}", map.symbol())
            }
            ElementSpec::PolRotator { arm, angle } => write!(f, "rot arm={arm} angle={angle}"),
        }
    }
}

fn check_transmission(t: f64) -> Result<(), OpticsError> {
    if t.is_finite() && (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(OpticsError::TransmissionOutOfRange(t))
    }
}

fn check_angle(deg: f64) -> Result<(), OpticsError> {
    if deg.is_finite() && deg > -180.0 && deg <= 180.0 {
        Ok(())
    } else {
        Err(OpticsError::AngleOutOfRange(deg))
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Real orthogonal beam splitter on the path qubit:
/// `|r⟩ → √T|r⟩ + √(1−T)|l⟩`, `|l⟩ → √(1−T)|r⟩ − √T|l⟩`.
pub fn beam_splitter(transmission: f64) -> Result<Operator, OpticsError> {
    check_transmission(transmission)?;
    let t = transmission.sqrt();
    let r = (1.0 - transmission).sqrt();
    // Rows/columns ordered (l, r).
    let m = [re(-t), re(r), re(r), re(t)];
    Ok(Operator::on_factors(Subsystems::from_factors(&[Factor::Path]), &m))
}

/// Swaps shape 1 ↔ 2 on photons travelling in `arm`.
pub fn mode_shaper(arm: Path, _map: ShapeMap) -> Operator {
    let swap = [[re(0.0), re(1.0)], [re(1.0), re(0.0)]];
    Operator::conditioned_on_path(arm, Factor::Shape, swap)
}

/// Real rotation `|H⟩ → cosθ|H⟩ + sinθ|V⟩`, `|V⟩ → −sinθ|H⟩ + cosθ|V⟩` on
/// photons travelling in `arm`. At 45° this takes `|D⟩` to `|V⟩`.
pub fn pol_rotator(arm: Path, angle_deg: f64) -> Operator {
    let (s, c) = angle_deg.to_radians().sin_cos();
    let u = [[re(c), re(-s)], [re(s), re(c)]];
    Operator::conditioned_on_path(arm, Factor::Pol, u)
}

pub fn apply(op: &Operator, s: &PhotonState) -> Result<PhotonState, OpticsError> {
    if !op.is_unitary(INPUT_TOL) {
        return Err(OpticsError::NotUnitary);
    }
    Ok(op.act(s))
}

/// Single operator for the sequence; the first listed element acts first.
pub fn compose(ops: &[Operator]) -> Result<Operator, OpticsError> {
    let (first, rest) = ops.split_first().ok_or(OpticsError::EmptyComposition)?;
    Ok(rest.iter().fold(first.clone(), |acc, op| op * &acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{qubit, EXACT_TOL};

    fn psi0_reference() -> PhotonState {
        // (1/√3)(|D,r,2⟩ + √2|D,l,2⟩)
        let a = PhotonState::product(qubit::D, qubit::R, qubit::S2).scale(re(1.0 / 3f64.sqrt()));
        let b = PhotonState::product(qubit::D, qubit::L, qubit::S2)
            .scale(re(2f64.sqrt() / 3f64.sqrt()));
        a + b
    }

    #[test]
    fn beam_splitter_prepares_the_unbalanced_superposition() {
        let src = PhotonState::product(qubit::D, qubit::R, qubit::S2);
        let out = apply(&beam_splitter(1.0 / 3.0).unwrap(), &src).unwrap();
        assert!(out.max_abs_diff(&psi0_reference()) < EXACT_TOL);
    }

    #[test]
    fn full_transmission_is_identity_up_to_sign_on_l() {
        let bs = beam_splitter(1.0).unwrap();
        let r = PhotonState::product(qubit::H, qubit::R, qubit::S1);
        let l = PhotonState::product(qubit::H, qubit::L, qubit::S1);
        assert!(bs.act(&r).max_abs_diff(&r) < EXACT_TOL);
        assert!(bs.act(&l).max_abs_diff(&(-l)) < EXACT_TOL);
    }

    #[test]
    fn balanced_splitter_routes_symmetric_input_to_one_port() {
        // Hand-computed: BS(1/2)(|r⟩+|l⟩)/√2 = ((|r⟩+|l⟩) + (|r⟩−|l⟩))/2 = |r⟩.
        let s = 0.5f64.sqrt();
        let input = PhotonState::product(qubit::H, [re(s), re(s)], qubit::S1);
        let out = beam_splitter(0.5).unwrap().act(&input);
        let want = PhotonState::product(qubit::H, qubit::R, qubit::S1);
        assert!(out.max_abs_diff(&want) < EXACT_TOL);
    }

    #[test]
    fn transmission_range_is_enforced() {
        assert_eq!(beam_splitter(2.0), Err(OpticsError::TransmissionOutOfRange(2.0)));
        assert!(beam_splitter(-0.1).is_err());
        assert!(beam_splitter(f64::NAN).is_err());
        assert!(beam_splitter(0.0).unwrap().is_unitary(EXACT_TOL));
    }

    #[test]
    fn shaper_in_arm_r_moves_shape_two_to_one() {
        let psi1 = mode_shaper(Path::R, ShapeMap::TwoToOne).act(&psi0_reference());
        let want = PhotonState::product(qubit::D, qubit::R, qubit::S1).scale(re(1.0 / 3f64.sqrt()))
            + PhotonState::product(qubit::D, qubit::L, qubit::S2).scale(re((2.0f64 / 3.0).sqrt()));
        assert!(psi1.max_abs_diff(&want) < EXACT_TOL);
    }

    #[test]
    fn shaper_ignores_photons_in_the_other_arm() {
        let s = PhotonState::product(qubit::A, qubit::L, [re(0.6), re(0.8)]);
        assert_eq!(mode_shaper(Path::R, ShapeMap::OneToTwo).act(&s), s);
    }

    #[test]
    fn rotator_turns_diagonal_into_vertical() {
        let rot = pol_rotator(Path::R, 45.0);
        let d = PhotonState::product(qubit::D, qubit::R, qubit::S1);
        let v = PhotonState::product(qubit::V, qubit::R, qubit::S1);
        assert!(rot.act(&d).max_abs_diff(&v) < EXACT_TOL);
        // R(45°)|V⟩ = (−|H⟩ + |V⟩)/√2 = −|A⟩
        let a = PhotonState::product(qubit::A, qubit::R, qubit::S2);
        let vr2 = PhotonState::product(qubit::V, qubit::R, qubit::S2);
        assert!(rot.act(&vr2).max_abs_diff(&(-a)) < EXACT_TOL);
    }

    #[test]
    fn zero_angle_rotator_is_identity() {
        for arm in [Path::L, Path::R] {
            assert!(pol_rotator(arm, 0.0).approx_eq(&Operator::identity(), EXACT_TOL));
        }
    }

    #[test]
    fn apply_rejects_non_unitary() {
        let p = Operator::projector(&PhotonState::product(qubit::H, qubit::L, qubit::S1));
        assert_eq!(
            apply(&p, &PhotonState::product(qubit::H, qubit::L, qubit::S1)),
            Err(OpticsError::NotUnitary)
        );
        let s = PhotonState::product(qubit::D, qubit::R, qubit::S1);
        assert_eq!(apply(&Operator::identity(), &s).unwrap(), s);
    }

    #[test]
    fn compose_orders_first_element_first() {
        let bs = beam_splitter(1.0 / 3.0).unwrap();
        assert_eq!(compose(std::slice::from_ref(&bs)).unwrap(), bs);
        let inv = compose(&[bs.clone(), bs.dagger()]).unwrap();
        assert!(inv.approx_eq(&Operator::identity(), EXACT_TOL));
        assert_eq!(compose(&[]), Err(OpticsError::EmptyComposition));

        let shaper = mode_shaper(Path::R, ShapeMap::TwoToOne);
        let rot = pol_rotator(Path::R, 45.0);
        let u = compose(&[bs, shaper, rot]).unwrap();
        let src = PhotonState::product(qubit::D, qubit::R, qubit::S2);
        let psi2 = PhotonState::product(qubit::V, qubit::R, qubit::S1).scale(re(1.0 / 3f64.sqrt()))
            + PhotonState::product(qubit::D, qubit::L, qubit::S2).scale(re((2.0f64 / 3.0).sqrt()));
        assert!(apply(&u, &src).unwrap().max_abs_diff(&psi2) < EXACT_TOL);
    }

    #[test]
    fn element_specs_validate_ranges() {
        let bad = ElementSpec::BeamSplitter { transmission: Real::decimal(2.0) };
        assert!(bad.validate().is_err());
        let bad_angle = ElementSpec::PolRotator { arm: Path::L, angle: Real::decimal(-180.0) };
        assert_eq!(bad_angle.validate(), Err(OpticsError::AngleOutOfRange(-180.0)));
        let edge = ElementSpec::PolRotator { arm: Path::L, angle: Real::decimal(180.0) };
        assert!(edge.operator().unwrap().is_unitary(EXACT_TOL));
        assert_eq!(bad.arm(), None);
        assert_eq!(edge.arm(), Some(Path::L));
    }
}
