//! Named measurement bases, looked up at runtime by the circuit language and
//! the CLI.
//!
//! | name              | factors          | outcomes                        |
//! |-------------------|------------------|---------------------------------|
//! | `hv-path`         | pol, path        | `{H,V} × {l,r}`                 |
//! | `da-okfail`       | pol, path        | `{D,A} × {fail,ok}` at the ports |
//! | `da-okfail-prime` | pol, path        | `{D,A} × {fail',ok'}`           |
//! | `da-okfail-lab`   | pol, path, shape | `{D,A} × {fail,ok}` on path⊗shape |
//!
//! `da-okfail` and `da-okfail-prime` are the same detector readout (balanced
//! beam splitter, polarizing splitters, four counters) and differ only in
//! labels: the port reached by `(|r⟩+|l⟩)/√2` is `fail`, the one reached by
//! `(|r⟩−|l⟩)/√2` is `ok`. Preceded by the shaper that returns arm `r` to
//! shape 2, the readout realizes the path⊗shape basis of `da-okfail-lab`.

use std::fmt;

use crate::measure::MeasurementBasis;
use crate::qstate::qubit::{self, Qubit};
use crate::qstate::{Factor, C64};

/// `(|r⟩ + |l⟩)/√2` on the path qubit.
pub fn fail_prime() -> Qubit {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // path order is (l, r)
    [C64::new(s, 0.0), C64::new(s, 0.0)]
}

/// `(|r⟩ − |l⟩)/√2` on the path qubit.
pub fn ok_prime() -> Qubit {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [C64::new(-s, 0.0), C64::new(s, 0.0)]
}

/// `(|r,1⟩ + |l,2⟩)/√2` on path ⊗ shape.
pub fn fail_lab() -> [C64; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // index = 2·path + shape: (l1, l2, r1, r2)
    [C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(0.0, 0.0)]
}

/// `(|r,1⟩ − |l,2⟩)/√2` on path ⊗ shape.
pub fn ok_lab() -> [C64; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [C64::new(0.0, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(0.0, 0.0)]
}

fn tensor(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

fn da_by(rest: [(&str, &[C64]); 2], suffix: &str) -> Vec<(String, Vec<C64>)> {
    let mut out = Vec::with_capacity(4);
    for (p, pol) in [("D", qubit::D), ("A", qubit::A)] {
        for (name, ket) in rest {
            out.push((format!("{p},{name}{suffix}"), tensor(&pol, ket)));
        }
    }
    out
}

/// `{D,A} × {fail, ok}` over pol ⊗ path, labeled for the super-measurement.
pub fn da_okfail_ports() -> MeasurementBasis {
    let (f, o) = (fail_prime(), ok_prime());
    MeasurementBasis::new(
        &[Factor::Pol, Factor::Path],
        da_by([("fail", &f), ("ok", &o)], ""),
    )
    .expect("built-in basis is orthonormal")
}

/// `{D,A} × {fail', ok'}` over pol ⊗ path; shape untouched.
pub fn da_okfail_prime() -> MeasurementBasis {
    let (f, o) = (fail_prime(), ok_prime());
    MeasurementBasis::new(
        &[Factor::Pol, Factor::Path],
        da_by([("fail", &f), ("ok", &o)], "'"),
    )
    .expect("built-in basis is orthonormal")
}

/// `{D,A} × {fail, ok}` with the entangled path⊗shape kets. Spans
/// pol ⊗ span{|r,1⟩, |l,2⟩}.
pub fn da_okfail_lab() -> MeasurementBasis {
    let (f, o) = (fail_lab(), ok_lab());
    MeasurementBasis::new(&Factor::ALL, da_by([("fail", &f), ("ok", &o)], ""))
        .expect("built-in basis is orthonormal")
}

/// `{H,V} × {l,r}` over pol ⊗ path.
pub fn hv_path() -> MeasurementBasis {
    let mut els = Vec::with_capacity(4);
    for (p, pol) in [("H", qubit::H), ("V", qubit::V)] {
        for (n, path) in [("l", qubit::L), ("r", qubit::R)] {
            els.push((format!("{p},{n}"), tensor(&pol, &path)));
        }
    }
    MeasurementBasis::new(&[Factor::Pol, Factor::Path], els).expect("built-in basis is orthonormal")
}

/// A measurement basis selectable by name.
pub trait NamedBasis: Send + Sync {
    fn name(&self) -> &str;
    fn description(&self) -> &str;
    fn build(&self) -> MeasurementBasis;
}

struct Builtin {
    name: &'static str,
    description: &'static str,
    build: fn() -> MeasurementBasis,
}

impl NamedBasis for Builtin {
    fn name(&self) -> &str {
        self.name
    }

    fn description(&self) -> &str {
        self.description
    }

    fn build(&self) -> MeasurementBasis {
        (self.build)()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuplicateBasis(pub String);

impl fmt::Display for DuplicateBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "basis `{}` is already registered", self.0)
    }
}

impl std::error::Error for DuplicateBasis {}

/// Ordered name → basis table.
#[derive(Default)]
pub struct BasisRegistry {
    entries: Vec<Box<dyn NamedBasis>>,
}

impl BasisRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        let builtins = [
            Builtin {
                name: "hv-path",
                description: "polarization H/V and which-path l/r",
                build: hv_path,
            },
            Builtin {
                name: "da-okfail",
                description: "detector readout, D/A x ok/fail ports",
                build: da_okfail_ports,
            },
            Builtin {
                name: "da-okfail-prime",
                description: "detector readout, D/A x ok'/fail' on path only",
                build: da_okfail_prime,
            },
            Builtin {
                name: "da-okfail-lab",
                description: "D/A x ok/fail on the entangled path-shape kets",
                build: da_okfail_lab,
            },
        ];
        for b in builtins {
            r.register(Box::new(b)).expect("built-in names are unique");
        }
        r
    }

    pub fn register(&mut self, basis: Box<dyn NamedBasis>) -> Result<(), DuplicateBasis> {
        if self.get(basis.name()).is_some() {
            return Err(DuplicateBasis(basis.name().to_string()));
        }
        self.entries.push(basis);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&dyn NamedBasis> {
        self.entries
            .iter()
            .find(|b| b.name() == name)
            .map(|b| b.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|b| b.name())
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn NamedBasis> {
        self.entries.iter().map(|b| b.as_ref())
    }
}
