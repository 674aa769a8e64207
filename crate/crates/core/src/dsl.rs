//! Line-oriented circuit language (`.wfc` files).
//!
//! ```text
//! # the super-measurement context
//! source pol=D path=r shape=2
//! bs T=1/3
//! shaper arm=r map=2-1
//! rot arm=r angle=45
//! shaper arm=r map=1-2
//! measure da-okfail
//! ```
//!
//! A circuit is one `source` line, any number of element lines (`bs`,
//! `shaper`, `rot`) and one `measure` line, in that order. `#` starts a
//! comment; blank lines are ignored; CRLF line endings are accepted.
//!
//! `measure` takes either a registered basis name (see [`crate::bases`]) or
//! an inline basis:
//!
//! ```text
//! measure on=path,shape fail=r1+l2 ok=r1-l2
//! ```
//!
//! `on=` lists the measured factors in `pol,path,shape` order. Each
//! `label=expr` is a signed sum of terms `[coeff*]symbols`, with one symbol
//! per measured factor (`H V D A`, `l r`, `1 2`). Coefficients are real
//! literals; every ket is normalized after parsing.
//!
//! [`format`] prints the canonical form: LF line endings, fixed parameter
//! order, no comments, rational literals kept as written.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::bases::BasisRegistry;
use crate::measure::{born_probabilities, MeasureError, MeasurementBasis, OutcomeDistribution};
use crate::number::{NumberError, Real};
use crate::optics::{self, ElementSpec, OpticsError, ShapeMap};
use crate::qstate::qubit::{self, Qubit};
use crate::qstate::{Factor, Operator, Path, PhotonState, Shape, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ErrorKind {
    Lex,
    Syntax,
    Semantic,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Lex => "lex",
            ErrorKind::Syntax => "syntax",
            ErrorKind::Semantic => "semantic",
        })
    }
}

/// Parse failure; `line` and `column` are 1-based and count characters.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[error("line {line}, column {column}: {kind} error: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub kind: ErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error(transparent)]
    Element(#[from] OpticsError),
    #[error("unknown basis `{0}`")]
    UnknownBasis(String),
    #[error("inline ket `{0}` is zero")]
    ZeroKet(String),
    #[error("inline ket `{label}` has {got} symbols per term, expected {expected}")]
    SymbolCount {
        label: String,
        got: usize,
        expected: usize,
    },
    #[error("inline factors must be distinct and listed in pol,path,shape order")]
    FactorOrder,
    #[error(transparent)]
    Basis(#[from] MeasureError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PolSpec {
    H,
    V,
    D,
    A,
}

impl PolSpec {
    pub fn ket(self) -> Qubit {
        match self {
            PolSpec::H => qubit::H,
            PolSpec::V => qubit::V,
            PolSpec::D => qubit::D,
            PolSpec::A => qubit::A,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            PolSpec::H => 'H',
            PolSpec::V => 'V',
            PolSpec::D => 'D',
            PolSpec::A => 'A',
        }
    }

    fn from_symbol(c: char) -> Option<Self> {
        match c {
            'H' => Some(PolSpec::H),
            'V' => Some(PolSpec::V),
            'D' => Some(PolSpec::D),
            'A' => Some(PolSpec::A),
            _ => None,
        }
    }
}

fn path_from_symbol(c: char) -> Option<Path> {
    match c {
        'l' => Some(Path::L),
        'r' => Some(Path::R),
        _ => None,
    }
}

fn shape_from_symbol(c: char) -> Option<Shape> {
    match c {
        '1' => Some(Shape::One),
        '2' => Some(Shape::Two),
        _ => None,
    }
}

fn path_ket(p: Path) -> Qubit {
    match p {
        Path::L => qubit::L,
        Path::R => qubit::R,
    }
}

fn shape_ket(s: Shape) -> Qubit {
    match s {
        Shape::One => qubit::S1,
        Shape::Two => qubit::S2,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SourceSpec {
    pub pol: PolSpec,
    pub path: Path,
    pub shape: Shape,
}

impl SourceSpec {
    pub fn state(&self) -> PhotonState {
        PhotonState::product(self.pol.ket(), path_ket(self.path), shape_ket(self.shape))
    }
}

impl fmt::Display for SourceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "source pol={} path={} shape={}",
            self.pol.symbol(),
            self.path,
            self.shape
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Symbol {
    Pol(PolSpec),
    Path(Path),
    Shape(Shape),
}

impl Symbol {
    fn factor(self) -> Factor {
        match self {
            Symbol::Pol(_) => Factor::Pol,
            Symbol::Path(_) => Factor::Path,
            Symbol::Shape(_) => Factor::Shape,
        }
    }

    fn ket(self) -> Qubit {
        match self {
            Symbol::Pol(p) => p.ket(),
            Symbol::Path(p) => path_ket(p),
            Symbol::Shape(s) => shape_ket(s),
        }
    }

    fn parse(factor: Factor, c: char) -> Option<Self> {
        match factor {
            Factor::Pol => PolSpec::from_symbol(c).map(Symbol::Pol),
            Factor::Path => path_from_symbol(c).map(Symbol::Path),
            Factor::Shape => shape_from_symbol(c).map(Symbol::Shape),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Pol(p) => write!(f, "{}", p.symbol()),
            Symbol::Path(p) => write!(f, "{p}"),
            Symbol::Shape(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KetTerm {
    pub negative: bool,
    pub coeff: Option<Real>,
    pub symbols: Vec<Symbol>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InlineKet {
    pub label: String,
    pub terms: Vec<KetTerm>,
}

impl InlineKet {
    /// Normalized amplitude vector over `factors` (canonical order).
    fn vector(&self, factors: &[Factor]) -> Result<Vec<C64>, CircuitError> {
        let d = 1 << factors.len();
        let mut v = vec![C64::new(0.0, 0.0); d];
        for term in &self.terms {
            if term.symbols.len() != factors.len()
                || term.symbols.iter().zip(factors).any(|(s, f)| s.factor() != *f)
            {
                return Err(CircuitError::SymbolCount {
                    label: self.label.clone(),
                    got: term.symbols.len(),
                    expected: factors.len(),
                });
            }
            let mut c = term.coeff.map_or(1.0, Real::value);
            if term.negative {
                c = -c;
            }
            let mut amps = vec![C64::new(c, 0.0)];
            for s in &term.symbols {
                let k = s.ket();
                amps = amps
                    .iter()
                    .flat_map(|a| k.iter().map(move |b| a * b))
                    .collect();
            }
            v.iter_mut().zip(amps).for_each(|(x, a)| *x += a);
        }
        let n: f64 = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if n <= f64::EPSILON {
            return Err(CircuitError::ZeroKet(self.label.clone()));
        }
        Ok(v.into_iter().map(|a| a / n).collect())
    }
}

impl fmt::Display for InlineKet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}=", self.label)?;
        for (i, t) in self.terms.iter().enumerate() {
            if t.negative {
                f.write_str("-")?;
            } else if i > 0 {
                f.write_str("+")?;
            }
            if let Some(c) = t.coeff {
                write!(f, "{c}*")?;
            }
            for s in &t.symbols {
                write!(f, "{s}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum MeasurementSpec {
    Named(String),
    Inline {
        factors: Vec<Factor>,
        kets: Vec<InlineKet>,
    },
}

impl fmt::Display for MeasurementSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasurementSpec::Named(name) => write!(f, "measure {name}"),
            MeasurementSpec::Inline { factors, kets } => {
                let names: Vec<&str> = factors.iter().map(|f| f.name()).collect();
                write!(f, "measure on={}", names.join(","))?;
                for k in kets {
                    write!(f, " {k}")?;
                }
                Ok(())
            }
        }
    }
}

/// A validated circuit: source, element pipeline and final measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    source: SourceSpec,
    elements: Vec<ElementSpec>,
    measurement: MeasurementSpec,
    basis: MeasurementBasis,
}

/// Objects ready for [`optics::compose`] and [`born_probabilities`].
#[derive(Clone, Debug, PartialEq)]
pub struct Lowered {
    pub source: PhotonState,
    pub operators: Vec<Operator>,
    pub basis: MeasurementBasis,
}

impl Circuit {
    pub fn new(
        source: SourceSpec,
        elements: Vec<ElementSpec>,
        measurement: MeasurementSpec,
    ) -> Result<Self, CircuitError> {
        Self::with_registry(source, elements, measurement, &BasisRegistry::builtin())
    }

    pub fn with_registry(
        source: SourceSpec,
        elements: Vec<ElementSpec>,
        measurement: MeasurementSpec,
        registry: &BasisRegistry,
    ) -> Result<Self, CircuitError> {
        for e in &elements {
            e.validate()?;
        }
        let basis = resolve_measurement(&measurement, registry)?;
        Ok(Self {
            source,
            elements,
            measurement,
            basis,
        })
    }

    pub fn source(&self) -> &SourceSpec {
        &self.source
    }

    pub fn elements(&self) -> &[ElementSpec] {
        &self.elements
    }

    pub fn measurement(&self) -> &MeasurementSpec {
        &self.measurement
    }

    pub fn basis(&self) -> &MeasurementBasis {
        &self.basis
    }

    /// State reaching the measurement.
    pub fn output_state(&self) -> PhotonState {
        let lowered = lower(self);
        if lowered.operators.is_empty() {
            return lowered.source;
        }
        let u = optics::compose(&lowered.operators).expect("non-empty element list");
        u.act(&lowered.source)
    }

    /// Born-rule table of the measurement at the end of the pipeline.
    pub fn run(&self) -> Result<OutcomeDistribution, MeasureError> {
        born_probabilities(&self.output_state(), &self.basis)
    }
}

fn resolve_measurement(
    m: &MeasurementSpec,
    registry: &BasisRegistry,
) -> Result<MeasurementBasis, CircuitError> {
    match m {
        MeasurementSpec::Named(name) => registry
            .get(name)
            .map(|b| b.build())
            .ok_or_else(|| CircuitError::UnknownBasis(name.clone())),
        MeasurementSpec::Inline { factors, kets } => {
            if factors.is_empty() || factors.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CircuitError::FactorOrder);
            }
            let elements = kets
                .iter()
                .map(|k| Ok((k.label.clone(), k.vector(factors)?)))
                .collect::<Result<Vec<_>, CircuitError>>()?;
            Ok(MeasurementBasis::new(factors, elements)?)
        }
    }
}

/// Lowering is total on validated circuits.
pub fn lower(c: &Circuit) -> Lowered {
    Lowered {
        source: c.source.state(),
        operators: c
            .elements
            .iter()
            .map(|e| e.operator().expect("validated element"))
            .collect(),
        basis: c.basis.clone(),
    }
}

/// Canonical text of `c`, LF-terminated.
pub fn format(c: &Circuit) -> String {
    let mut out = format!("{}\n", c.source);
    for e in &c.elements {
        out.push_str(&format!("{e}\n"));
    }
    out.push_str(&format!("{}\n", c.measurement));
    out
}

pub fn parse(text: &str) -> Result<Circuit, ParseError> {
    parse_with(text, &BasisRegistry::builtin())
}

#[derive(Clone, Copy, Debug)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    let mut column = 0;
    for (byte, ch) in line.char_indices() {
        column += 1;
        if ch.is_whitespace() {
            if let Some((b, c)) = start.take() {
                out.push(Token {
                    text: &line[b..byte],
                    column: c,
                });
            }
        } else if start.is_none() {
            start = Some((byte, column));
        }
    }
    if let Some((b, c)) = start {
        out.push(Token {
            text: &line[b..],
            column: c,
        });
    }
    out
}

struct LineCtx {
    line: usize,
}

impl LineCtx {
    fn err(&self, tok: &Token<'_>, kind: ErrorKind, message: impl Into<String>) -> ParseError {
        self.err_at(tok.column, kind, message)
    }

    fn err_at(&self, column: usize, kind: ErrorKind, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column,
            message: message.into(),
            kind,
        }
    }

    /// `key=value` parameters, each key at most once and from `allowed`.
    fn params<'a>(
        &self,
        keyword: &Token<'a>,
        tokens: &[Token<'a>],
        allowed: &[&str],
    ) -> Result<HashMap<&'a str, (Token<'a>, &'a str)>, ParseError> {
        let mut out = HashMap::new();
        for tok in tokens {
            let Some((key, value)) = tok.text.split_once('=') else {
                return Err(self.err(tok, ErrorKind::Syntax, format!("expected key=value, found `{}`", tok.text)));
            };
            if !allowed.contains(&key) {
                return Err(self.err(
                    tok,
                    ErrorKind::Syntax,
                    format!("unknown parameter `{key}` for `{}`", keyword.text),
                ));
            }
            if value.is_empty() {
                return Err(self.err(tok, ErrorKind::Syntax, format!("missing value for `{key}`")));
            }
            if out.insert(key, (*tok, value)).is_some() {
                return Err(self.err(tok, ErrorKind::Syntax, format!("duplicate parameter `{key}`")));
            }
        }
        for key in allowed {
            if !out.contains_key(key) {
                return Err(self.err(
                    keyword,
                    ErrorKind::Syntax,
                    format!("`{}` needs `{key}=`", keyword.text),
                ));
            }
        }
        Ok(out)
    }

    fn number(&self, tok: &Token<'_>, value: &str) -> Result<Real, ParseError> {
        value.parse::<Real>().map_err(|e| match e {
            NumberError::Malformed(_) => self.err(tok, ErrorKind::Lex, e.to_string()),
            NumberError::ZeroDenominator(_) => self.err(tok, ErrorKind::Semantic, e.to_string()),
        })
    }

    fn arm(&self, tok: &Token<'_>, value: &str) -> Result<Path, ParseError> {
        let mut chars = value.chars();
        match (chars.next().and_then(path_from_symbol), chars.next()) {
            (Some(p), None) => Ok(p),
            _ => Err(self.err(tok, ErrorKind::Semantic, format!("arm must be `l` or `r`, found `{value}`"))),
        }
    }

    fn source(&self, kw: &Token<'_>, args: &[Token<'_>]) -> Result<SourceSpec, ParseError> {
        let p = self.params(kw, args, &["pol", "path", "shape"])?;
        let (tok, v) = p["pol"];
        let pol = single_char(v)
            .and_then(PolSpec::from_symbol)
            .ok_or_else(|| self.err(&tok, ErrorKind::Semantic, format!("pol must be H, V, D or A, found `{v}`")))?;
        let (tok, v) = p["path"];
        let path = self.arm(&tok, v)?;
        let (tok, v) = p["shape"];
        let shape = single_char(v)
            .and_then(shape_from_symbol)
            .ok_or_else(|| self.err(&tok, ErrorKind::Semantic, format!("shape must be 1 or 2, found `{v}`")))?;
        Ok(SourceSpec { pol, path, shape })
    }

    fn element(&self, kw: &Token<'_>, args: &[Token<'_>]) -> Result<ElementSpec, ParseError> {
        let (spec, range_tok) = match kw.text {
            "bs" => {
                let p = self.params(kw, args, &["T"])?;
                let (tok, v) = p["T"];
                let transmission = self.number(&tok, v)?;
                (ElementSpec::BeamSplitter { transmission }, tok)
            }
            "shaper" => {
                let p = self.params(kw, args, &["arm", "map"])?;
                let (tok, v) = p["arm"];
                let arm = self.arm(&tok, v)?;
                let (tok, v) = p["map"];
                let map = ShapeMap::from_symbol(v).ok_or_else(|| {
                    self.err(&tok, ErrorKind::Semantic, format!("map must be 1-2 or 2-1, found `{v}`"))
                })?;
                (ElementSpec::ModeShaper { arm, map }, tok)
            }
            "rot" => {
                let p = self.params(kw, args, &["arm", "angle"])?;
                let (tok, v) = p["arm"];
                let arm = self.arm(&tok, v)?;
                let (tok, v) = p["angle"];
                let angle = self.number(&tok, v)?;
                (ElementSpec::PolRotator { arm, angle }, tok)
            }
            _ => unreachable!("caller dispatches element keywords"),
        };
        spec.validate()
            .map_err(|e| self.err(&range_tok, ErrorKind::Semantic, e.to_string()))?;
        Ok(spec)
    }

    fn measure(
        &self,
        kw: &Token<'_>,
        args: &[Token<'_>],
        registry: &BasisRegistry,
    ) -> Result<(MeasurementSpec, MeasurementBasis), ParseError> {
        let Some(first) = args.first() else {
            return Err(self.err(kw, ErrorKind::Syntax, "`measure` needs a basis name or `on=`"));
        };
        if let Some(list) = first.text.strip_prefix("on=") {
            return self.inline_measure(kw, first, list, &args[1..]);
        }
        if first.text.contains('=') {
            return Err(self.err(first, ErrorKind::Syntax, format!("expected basis name or `on=`, found `{}`", first.text)));
        }
        if let Some(extra) = args.get(1) {
            return Err(self.err(extra, ErrorKind::Syntax, format!("unexpected `{}` after basis name", extra.text)));
        }
        let spec = MeasurementSpec::Named(first.text.to_string());
        let basis = resolve_measurement(&spec, registry).map_err(|e| {
            let names: Vec<&str> = registry.names().collect();
            self.err(first, ErrorKind::Semantic, format!("{e}; known: {}", names.join(", ")))
        })?;
        Ok((spec, basis))
    }

    fn inline_measure(
        &self,
        kw: &Token<'_>,
        on: &Token<'_>,
        list: &str,
        kets: &[Token<'_>],
    ) -> Result<(MeasurementSpec, MeasurementBasis), ParseError> {
        let mut factors = Vec::new();
        for name in list.split(',') {
            let f = Factor::from_name(name).ok_or_else(|| {
                self.err(on, ErrorKind::Semantic, format!("unknown factor `{name}` (pol, path, shape)"))
            })?;
            factors.push(f);
        }
        if factors.windows(2).any(|w| w[0] >= w[1]) {
            return Err(self.err(on, ErrorKind::Semantic, CircuitError::FactorOrder.to_string()));
        }
        if kets.is_empty() {
            return Err(self.err(kw, ErrorKind::Syntax, "inline basis needs at least one `label=ket`"));
        }
        let mut parsed = Vec::with_capacity(kets.len());
        let mut seen = HashMap::new();
        for tok in kets {
            let Some((label, expr)) = tok.text.split_once('=') else {
                return Err(self.err(tok, ErrorKind::Syntax, format!("expected label=ket, found `{}`", tok.text)));
            };
            if label.is_empty() {
                return Err(self.err(tok, ErrorKind::Syntax, "empty outcome label"));
            }
            if seen.insert(label, *tok).is_some() {
                return Err(self.err(tok, ErrorKind::Semantic, format!("duplicate outcome label `{label}`")));
            }
            let expr_col = tok.column + label.chars().count() + 1;
            let terms = self.ket_expr(expr, expr_col, &factors)?;
            let ket = InlineKet {
                label: label.to_string(),
                terms,
            };
            if let Err(e) = ket.vector(&factors) {
                return Err(self.err(tok, ErrorKind::Semantic, e.to_string()));
            }
            parsed.push(ket);
        }
        let spec = MeasurementSpec::Inline {
            factors,
            kets: parsed,
        };
        let basis = resolve_measurement(&spec, &BasisRegistry::empty()).map_err(|e| {
            let at = match &e {
                CircuitError::Basis(MeasureError::NotOrthonormal { b, .. }) => {
                    seen.get(b.as_str()).copied().unwrap_or(*kw)
                }
                _ => *kw,
            };
            self.err(&at, ErrorKind::Semantic, e.to_string())
        })?;
        Ok((spec, basis))
    }

    /// Signed sum of `[coeff*]symbols` terms. `column` is where `expr` starts.
    fn ket_expr(&self, expr: &str, column: usize, factors: &[Factor]) -> Result<Vec<KetTerm>, ParseError> {
        let chars: Vec<char> = expr.chars().collect();
        // Split at top-level signs, skipping exponent signs such as `1e-3`.
        let mut pieces: Vec<(bool, usize, usize)> = Vec::new();
        let mut negative = false;
        let mut start = 0;
        for (i, &c) in chars.iter().enumerate() {
            if c != '+' && c != '-' {
                continue;
            }
            let exponent = i >= 2
                && matches!(chars[i - 1], 'e' | 'E')
                && (chars[i - 2].is_ascii_digit() || chars[i - 2] == '.');
            if exponent {
                continue;
            }
            if i > 0 {
                pieces.push((negative, start, i));
            }
            negative = c == '-';
            start = i + 1;
        }
        pieces.push((negative, start, chars.len()));

        let mut terms = Vec::with_capacity(pieces.len());
        for (negative, s, e) in pieces {
            let col = column + s;
            if s >= e {
                return Err(self.err_at(col.min(column + chars.len().saturating_sub(1)), ErrorKind::Syntax, "empty term in ket"));
            }
            let text: String = chars[s..e].iter().collect();
            let (coeff, sym_text, sym_col) = match text.split_once('*') {
                Some((c, rest)) => {
                    let coeff = c.parse::<Real>().map_err(|err| match err {
                        NumberError::Malformed(_) => self.err_at(col, ErrorKind::Lex, err.to_string()),
                        NumberError::ZeroDenominator(_) => self.err_at(col, ErrorKind::Semantic, err.to_string()),
                    })?;
                    (Some(coeff), rest.to_string(), col + c.chars().count() + 1)
                }
                None => (None, text.clone(), col),
            };
            let sym_chars: Vec<char> = sym_text.chars().collect();
            if sym_chars.len() != factors.len() {
                return Err(self.err_at(
                    sym_col.min(column + chars.len().saturating_sub(1)),
                    ErrorKind::Syntax,
                    format!("`{sym_text}` needs one symbol for each of {} factor(s)", factors.len()),
                ));
            }
            let mut symbols = Vec::with_capacity(factors.len());
            for (k, (c, f)) in sym_chars.iter().zip(factors).enumerate() {
                let s = Symbol::parse(*f, *c).ok_or_else(|| {
                    self.err_at(sym_col + k, ErrorKind::Syntax, format!("`{c}` is not a {} symbol", f.name()))
                })?;
                symbols.push(s);
            }
            terms.push(KetTerm {
                negative,
                coeff,
                symbols,
            });
        }
        Ok(terms)
    }
}

fn single_char(v: &str) -> Option<char> {
    let mut it = v.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Some(c),
        _ => None,
    }
}

/// Parses with a caller-supplied basis registry.
pub fn parse_with(text: &str, registry: &BasisRegistry) -> Result<Circuit, ParseError> {
    let mut source: Option<SourceSpec> = None;
    let mut elements = Vec::new();
    let mut measurement: Option<(MeasurementSpec, MeasurementBasis)> = None;
    let mut line_count = 0;
    let mut last_len = 0;

    let mut lines: Vec<&str> = text.split('\n').collect();
    if lines.len() > 1 && lines.last() == Some(&"") {
        lines.pop();
    }
    for (i, raw) in lines.into_iter().enumerate() {
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        line_count = i + 1;
        last_len = raw.chars().count();
        let code = raw.split_once('#').map_or(raw, |(c, _)| c);
        let tokens = tokenize(code);
        let Some((kw, args)) = tokens.split_first() else {
            continue;
        };
        let ctx = LineCtx { line: i + 1 };
        match kw.text {
            "source" => {
                if source.is_some() {
                    return Err(ctx.err(kw, ErrorKind::Semantic, "duplicate `source` line"));
                }
                if !elements.is_empty() || measurement.is_some() {
                    return Err(ctx.err(kw, ErrorKind::Syntax, "`source` must be the first line"));
                }
                source = Some(ctx.source(kw, args)?);
            }
            "bs" | "shaper" | "rot" => {
                if source.is_none() {
                    return Err(ctx.err(kw, ErrorKind::Syntax, "expected `source` before elements"));
                }
                if measurement.is_some() {
                    return Err(ctx.err(kw, ErrorKind::Syntax, "elements cannot follow `measure`"));
                }
                elements.push(ctx.element(kw, args)?);
            }
            "measure" => {
                if measurement.is_some() {
                    return Err(ctx.err(kw, ErrorKind::Semantic, "duplicate `measure` line"));
                }
                if source.is_none() {
                    return Err(ctx.err(kw, ErrorKind::Syntax, "expected `source` before `measure`"));
                }
                measurement = Some(ctx.measure(kw, args, registry)?);
            }
            other => {
                return Err(ctx.err(
                    kw,
                    ErrorKind::Syntax,
                    format!("unknown keyword `{other}` (source, bs, shaper, rot, measure)"),
                ));
            }
        }
    }

    let end = ParseError {
        line: line_count.max(1),
        column: last_len.max(1),
        message: String::new(),
        kind: ErrorKind::Syntax,
    };
    let Some(source) = source else {
        return Err(ParseError {
            message: "missing `source` line".into(),
            ..end
        });
    };
    let Some((measurement, basis)) = measurement else {
        return Err(ParseError {
            message: "missing `measure` line".into(),
            ..end
        });
    };
    Ok(Circuit {
        source,
        elements,
        measurement,
        basis,
    })
}
