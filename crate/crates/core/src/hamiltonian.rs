//! Pauli-decomposed Hamiltonians: parsing, canonical form and synthetic
//! instance generation.
//!
//! Two input formats are accepted. The line format has one term per line,
//! `<coefficient> <pauli-string>`, with `#` comments and blank lines ignored:
//!
//! ```text
//! # H2-like toy
//! -1.05 II
//! 0.5 ZZ
//! -0.25 XI
//! ```
//!
//! The JSON format is `{"num_qubits": 2, "terms": [{"coeff": 0.5, "pauli": "ZZ"}]}`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn from_digit(d: u64) -> Self {
        match d & 3 {
            0 => Pauli::I,
            1 => Pauli::X,
            2 => Pauli::Y,
            _ => Pauli::Z,
        }
    }
}

/// A tensor product of single-qubit Paulis, one axis per qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(axes: Vec<Pauli>) -> Result<Self> {
        if axes.is_empty() {
            return Err(invalid("Pauli string must act on at least one qubit"));
        }
        Ok(Self(axes))
    }

    pub fn identity(num_qubits: usize) -> Self {
        Self(vec![Pauli::I; num_qubits.max(1)])
    }

    pub fn num_qubits(&self) -> usize {
        self.0.len()
    }

    pub fn axes(&self) -> &[Pauli] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }

    /// Number of non-identity axes.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Decodes a base-4 index (qubit 0 is the most significant digit).
    fn from_index(mut idx: u64, num_qubits: usize) -> Self {
        let mut axes = vec![Pauli::I; num_qubits];
        for slot in axes.iter_mut().rev() {
            *slot = Pauli::from_digit(idx);
            idx >>= 2;
        }
        Self(axes)
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let axes = s
            .chars()
            .map(|c| {
                Pauli::from_char(c.to_ascii_uppercase()).ok_or_else(|| invalid(format!("unknown Pauli axis {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(axes)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    /// Weight in Hartree.
    pub coefficient: f64,
    pub pauli: PauliString,
}

/// Weighted sum of distinct Pauli strings on a fixed number of qubits.
///
/// Duplicates are merged by adding coefficients and terms whose merged
/// coefficient is exactly zero are dropped. The identity term, if present, is
/// kept but excluded from every estimation cost.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliHamiltonian {
    num_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliHamiltonian {
    pub fn new(num_qubits: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(invalid("num_qubits must be positive"));
        }
        let mut merged: Vec<PauliTerm> = Vec::new();
        let mut seen: HashMap<PauliString, usize> = HashMap::new();
        for (i, term) in terms.into_iter().enumerate() {
            if !term.coefficient.is_finite() {
                return Err(Error::NonFiniteCoefficient { line: i + 1 });
            }
            if term.pauli.num_qubits() != num_qubits {
                return Err(Error::InconsistentLength {
                    line: i + 1,
                    expected: num_qubits,
                    found: term.pauli.num_qubits(),
                });
            }
            match seen.get(&term.pauli) {
                Some(&slot) => merged[slot].coefficient += term.coefficient,
                None => {
                    seen.insert(term.pauli.clone(), merged.len());
                    merged.push(term);
                }
            }
        }
        merged.retain(|t| t.coefficient != 0.0);
        Ok(Self {
            num_qubits,
            terms: merged,
        })
    }

    /// Builds a Hamiltonian from `(coefficient, pauli)` pairs.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (f64, &'a str)>) -> Result<Self> {
        let terms = pairs
            .into_iter()
            .map(|(c, p)| {
                Ok(PauliTerm {
                    coefficient: c,
                    pauli: p.parse()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let n = terms
            .first()
            .map(|t| t.pauli.num_qubits())
            .ok_or(Error::Empty("Hamiltonian has no terms"))?;
        Self::new(n, terms)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn identity_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .find(|t| t.pauli.is_identity())
            .map_or(0.0, |t| t.coefficient)
    }

    /// Terms that require estimation, paired with their index in [`terms`](Self::terms).
    pub fn measured_terms(&self) -> impl Iterator<Item = (usize, &PauliTerm)> {
        self.terms.iter().enumerate().filter(|(_, t)| !t.pauli.is_identity())
    }

    /// Coefficients of the non-identity terms.
    pub fn measured_coefficients(&self) -> Vec<f64> {
        self.measured_terms().map(|(_, t)| t.coefficient).collect()
    }

    pub fn one_norm(&self, include_identity: bool) -> f64 {
        self.terms
            .iter()
            .filter(|t| include_identity || !t.pauli.is_identity())
            .map(|t| t.coefficient.abs())
            .sum()
    }

    /// Canonical line-format document. Coefficients use the shortest
    /// representation that parses back to the same `f64`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            out.push_str(&format!("{} {}\n", t.coefficient, t.pauli));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = HamiltonianDocument {
            num_qubits: self.num_qubits,
            terms: self
                .terms
                .iter()
                .map(|t| TermDocument {
                    coeff: t.coefficient,
                    pauli: t.pauli.to_string(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HamiltonianDocument {
    num_qubits: usize,
    terms: Vec<TermDocument>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDocument {
    coeff: f64,
    pauli: String,
}

/// Parses either document format; JSON is detected by a leading `{`.
pub fn parse_hamiltonian(source: &str) -> Result<PauliHamiltonian> {
    if source.trim_start().starts_with('{') {
        parse_json(source)
    } else {
        parse_text(source)
    }
}

fn parse_json(source: &str) -> Result<PauliHamiltonian> {
    let doc: HamiltonianDocument = serde_json::from_str(source)?;
    let mut terms = Vec::with_capacity(doc.terms.len());
    for (i, t) in doc.terms.into_iter().enumerate() {
        let pauli: PauliString = t.pauli.parse().map_err(|e: Error| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        terms.push(PauliTerm {
            coefficient: t.coeff,
            pauli,
        });
    }
    PauliHamiltonian::new(doc.num_qubits, terms)
}

fn parse_text(source: &str) -> Result<PauliHamiltonian> {
    let mut terms = Vec::new();
    let mut num_qubits: Option<usize> = None;
    for (i, raw) in source.lines().enumerate() {
        let line_no = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut fields = content.split_whitespace();
        let (Some(coeff), Some(pauli), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected `<coefficient> <pauli-string>`, got {content:?}"),
            });
        };
        let coefficient: f64 = coeff.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad coefficient {coeff:?}"),
        })?;
        if !coefficient.is_finite() {
            return Err(Error::NonFiniteCoefficient { line: line_no });
        }
        let pauli: PauliString = pauli.parse().map_err(|e: Error| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let n = *num_qubits.get_or_insert(pauli.num_qubits());
        if pauli.num_qubits() != n {
            return Err(Error::InconsistentLength {
                line: line_no,
                expected: n,
                found: pauli.num_qubits(),
            });
        }
        terms.push(PauliTerm { coefficient, pauli });
    }
    let n = num_qubits.ok_or(Error::Empty("Hamiltonian document has no terms"))?;
    PauliHamiltonian::new(n, terms)
}

/// Distribution of synthetic coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum CoefficientLaw {
    /// Uniform on `[-scale, scale]`.
    Uniform { scale: f64 },
    /// Magnitudes log-uniform on `[min, max]` with independent random signs.
    LogUniform { min: f64, max: f64 },
}

impl CoefficientLaw {
    fn validate(&self) -> Result<()> {
        match *self {
            CoefficientLaw::Uniform { scale } if scale > 0.0 && scale.is_finite() => Ok(()),
            CoefficientLaw::LogUniform { min, max } if min > 0.0 && max >= min && max.is_finite() => Ok(()),
            _ => Err(invalid(format!("bad coefficient law {self:?}"))),
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            CoefficientLaw::Uniform { scale } => rng.random_range(-scale..=scale),
            CoefficientLaw::LogUniform { min, max } => {
                let mag = if min == max {
                    min
                } else {
                    (rng.random_range(min.ln()..=max.ln())).exp().clamp(min, max)
                };
                if rng.random_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            }
        }
    }
}

/// Draws `num_terms` distinct non-identity Pauli strings with random
/// coefficients. The result depends only on the arguments.
pub fn synthesize_hamiltonian(
    num_qubits: usize,
    num_terms: usize,
    law: CoefficientLaw,
    seed: u64,
) -> Result<PauliHamiltonian> {
    if num_qubits == 0 {
        return Err(invalid("num_qubits must be positive"));
    }
    law.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let strings: Vec<PauliString> = if num_qubits < 32 {
        let available = (1u64 << (2 * num_qubits)) - 1;
        if num_terms as u64 > available {
            return Err(Error::InfeasibleTermCount {
                num_qubits,
                requested: num_terms,
            });
        }
        index::sample(&mut rng, available as usize, num_terms)
            .into_iter()
            .map(|i| PauliString::from_index(i as u64 + 1, num_qubits))
            .collect()
    } else {
        // 4^32 strings: collisions are vanishingly rare, reject them anyway.
        let mut seen = std::collections::HashSet::with_capacity(num_terms);
        let mut out = Vec::with_capacity(num_terms);
        while out.len() < num_terms {
            let axes: Vec<Pauli> = (0..num_qubits)
                .map(|_| Pauli::from_digit(rng.random_range(0..4)))
                .collect();
            let p = PauliString(axes);
            if !p.is_identity() && seen.insert(p.clone()) {
                out.push(p);
            }
        }
        out
    };
    let terms: Vec<PauliTerm> = strings
        .into_iter()
        .map(|pauli| {
            let mut c = law.sample(&mut rng);
            while c == 0.0 {
                c = law.sample(&mut rng);
            }
            PauliTerm { coefficient: c, pauli }
        })
        .collect();
    PauliHamiltonian::new(num_qubits, terms)
}
