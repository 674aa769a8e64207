//! Proptest strategies shared by integration tests.
#![allow(dead_code)]

use mzwigner::dsl::{Circuit, InlineKet, KetTerm, MeasurementSpec, PolSpec, SourceSpec, Symbol};
use mzwigner::number::Real;
use mzwigner::optics::{ElementSpec, ShapeMap};
use mzwigner::qstate::{Factor, Path, PhotonState, Shape, C64, DIM};
use proptest::prelude::*;

pub fn path() -> impl Strategy<Value = Path> {
    prop_oneof![Just(Path::L), Just(Path::R)]
}

pub fn shape() -> impl Strategy<Value = Shape> {
    prop_oneof![Just(Shape::One), Just(Shape::Two)]
}

pub fn pol() -> impl Strategy<Value = PolSpec> {
    prop_oneof![Just(PolSpec::H), Just(PolSpec::V), Just(PolSpec::D), Just(PolSpec::A)]
}

pub fn source() -> impl Strategy<Value = SourceSpec> {
    (pol(), path(), shape()).prop_map(|(pol, path, shape)| SourceSpec { pol, path, shape })
}

/// Transmission in `[0, 1]`, either `p/q` or a decimal.
pub fn transmission() -> impl Strategy<Value = Real> {
    prop_oneof![
        (1u64..=16).prop_flat_map(|den| (0..=den as i64).prop_map(move |num| Real::rational(num, den))),
        (0.0f64..=1.0).prop_map(Real::decimal),
    ]
}

/// Angle in degrees within `(-180, 180]`.
pub fn angle() -> impl Strategy<Value = Real> {
    prop_oneof![
        (1u64..=8).prop_flat_map(|den| {
            let lim = 180 * den as i64;
            (-lim + 1..=lim).prop_map(move |num| Real::rational(num, den))
        }),
        (-179.999f64..=180.0).prop_map(Real::decimal),
    ]
}

pub fn element() -> impl Strategy<Value = ElementSpec> {
    prop_oneof![
        transmission().prop_map(|transmission| ElementSpec::BeamSplitter { transmission }),
        (path(), prop_oneof![Just(ShapeMap::OneToTwo), Just(ShapeMap::TwoToOne)])
            .prop_map(|(arm, map)| ElementSpec::ModeShaper { arm, map }),
        (path(), angle()).prop_map(|(arm, angle)| ElementSpec::PolRotator { arm, angle }),
    ]
}

fn factor_symbols(f: Factor, pol_diag: bool) -> [Symbol; 2] {
    match f {
        Factor::Pol if pol_diag => [Symbol::Pol(PolSpec::D), Symbol::Pol(PolSpec::A)],
        Factor::Pol => [Symbol::Pol(PolSpec::H), Symbol::Pol(PolSpec::V)],
        Factor::Path => [Symbol::Path(Path::L), Symbol::Path(Path::R)],
        Factor::Shape => [Symbol::Shape(Shape::One), Symbol::Shape(Shape::Two)],
    }
}

/// Product basis on a random non-empty factor subset, each ket a single
/// term with an optional sign and positive coefficient.
pub fn inline_measurement() -> impl Strategy<Value = MeasurementSpec> {
    (1u8..8, any::<bool>()).prop_flat_map(|(mask, pol_diag)| {
        let factors: Vec<Factor> = Factor::ALL
            .into_iter()
            .filter(|f| mask & (1 << f.position()) != 0)
            .collect();
        let n = 1usize << factors.len();
        let coeff = prop_oneof![
            Just(None),
            (1u64..10, 1i64..10).prop_map(|(d, n)| Some(Real::rational(n, d))),
            (0.01f64..100.0).prop_map(|x| Some(Real::decimal(x))),
        ];
        proptest::collection::vec((any::<bool>(), coeff), n).prop_map(move |terms| {
            let kets = terms
                .into_iter()
                .enumerate()
                .map(|(i, (negative, coeff))| {
                    let symbols = factors
                        .iter()
                        .enumerate()
                        .map(|(j, f)| {
                            let bit = (i >> (factors.len() - 1 - j)) & 1;
                            factor_symbols(*f, pol_diag)[bit]
                        })
                        .collect();
                    InlineKet {
                        label: format!("k{i}"),
                        terms: vec![KetTerm {
                            negative,
                            coeff,
                            symbols,
                        }],
                    }
                })
                .collect();
            MeasurementSpec::Inline {
                factors: factors.clone(),
                kets,
            }
        })
    })
}

pub fn measurement() -> impl Strategy<Value = MeasurementSpec> {
    prop_oneof![
        3 => prop_oneof![
            Just("hv-path"),
            Just("da-okfail"),
            Just("da-okfail-prime"),
            Just("da-okfail-lab"),
        ]
        .prop_map(|n| MeasurementSpec::Named(n.to_string())),
        1 => inline_measurement(),
    ]
}

pub fn circuit() -> impl Strategy<Value = Circuit> {
    (source(), proptest::collection::vec(element(), 0..8), measurement()).prop_map(
        |(s, els, m)| Circuit::new(s, els, m).expect("generated circuits are valid"),
    )
}

pub fn complex() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im))
}

/// Normalized random state, bounded away from zero before normalizing.
pub fn state() -> impl Strategy<Value = PhotonState> {
    proptest::array::uniform8(complex())
        .prop_filter("non-degenerate", |a| a.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3)
        .prop_map(|a| {
            let s: [C64; DIM] = a;
            PhotonState::from_amplitudes(s).normalize().unwrap()
        })
}
