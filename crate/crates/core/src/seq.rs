//! Bounded polynomial sequences: finite prefix plus periodic tail, or one
//! of the builtin rule-based sequences, with coefficient bounds (d, K, M)
//! and the derived escape radius.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Degree and coefficient bounds for a sequence: degrees in [2, d], leading
/// coefficient modulus in [1/K, K], lower coefficient moduli at most M.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub d: u32,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "M")]
    pub m: f64,
}

impl Bounds {
    pub fn new(d: u32, k: f64, m: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::SpecInput(format!("bounds.d = {} < 2", d)));
        }
        if k.is_nan() || k < 1.0 {
            return Err(Error::SpecInput(format!("bounds.K = {} < 1", k)));
        }
        if m.is_nan() || m < 0.0 {
            return Err(Error::SpecInput(format!("bounds.M = {} < 0", m)));
        }
        Ok(Bounds { d, k, m })
    }
}

/// Escape radius R = max(1, K (dM + 2)) for the given bounds: every
/// in-bounds polynomial satisfies |P(z)| >= 2|z| once |z| >= R, since
/// |P(z)| >= |z|^(d-1) ((1/K)|z| - M d) for |z| >= 1.
pub fn escape_radius(b: Bounds) -> f64 {
    (b.k * (b.d as f64 * b.m + 2.0)).max(1.0)
}

#[derive(Clone, Debug, PartialEq)]
pub enum SeqKind {
    /// Finite prefix, then the tail repeats forever.
    ExplicitPrefixPeriodicTail,
    /// (z-3)^2 at times m = (j+1)(j+2)/2 - 1 for 1 <= j <= n, z^2 otherwise.
    BuiltinThm72 { n: u32 },
    /// Same rule with j unbounded.
    BuiltinThm72Limit,
}

/// A deterministic, total rule m -> P_m for m >= 1, plus its bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceSpec {
    pub kind: SeqKind,
    pub prefix: Vec<Polynomial>,
    pub tail: Vec<Polynomial>,
    pub bounds: Bounds,
}

/// True when m = (j+1)(j+2)/2 - 1 for some j in [1, n_max] (no cap when
/// n_max is None).
pub fn thm72_special_time(m: usize, n_max: Option<u32>) -> bool {
    // m + 1 must be the k-th triangular number with k >= 2, j = k - 1
    let t = m + 1;
    let k = ((((8 * t + 1) as f64).sqrt() - 1.0) / 2.0).round() as usize;
    for kk in [k.saturating_sub(1), k, k + 1] {
        if kk >= 2 && kk * (kk + 1) / 2 == t {
            let j = (kk - 1) as u32;
            return match n_max {
                Some(n) => j <= n,
                None => true,
            };
        }
    }
    false
}

impl SequenceSpec {
    /// Explicit sequence. The tail must be nonempty; every polynomial is
    /// validated against the bounds (leading coefficient in the closed
    /// interval [1/K, K] up to 1e-12).
    pub fn explicit(prefix: Vec<Polynomial>, tail: Vec<Polynomial>, bounds: Bounds) -> Result<Self> {
        if tail.is_empty() {
            return Err(Error::SpecInput("tail must be nonempty".into()));
        }
        for p in prefix.iter().chain(tail.iter()) {
            validate_poly(p, bounds)?;
        }
        Ok(SequenceSpec {
            kind: SeqKind::ExplicitPrefixPeriodicTail,
            prefix,
            tail,
            bounds,
        })
    }

    /// Constant sequence repeating one polynomial.
    pub fn constant(p: Polynomial, bounds: Bounds) -> Result<Self> {
        Self::explicit(Vec::new(), vec![p], bounds)
    }

    pub fn builtin_thm72(n: u32) -> Self {
        SequenceSpec {
            kind: SeqKind::BuiltinThm72 { n },
            prefix: Vec::new(),
            tail: Vec::new(),
            bounds: Bounds { d: 2, k: 1.0, m: 9.0 },
        }
    }

    pub fn builtin_thm72_limit() -> Self {
        SequenceSpec {
            kind: SeqKind::BuiltinThm72Limit,
            prefix: Vec::new(),
            tail: Vec::new(),
            bounds: Bounds { d: 2, k: 1.0, m: 9.0 },
        }
    }

    /// P_m for m >= 1.
    pub fn term(&self, m: usize) -> Polynomial {
        assert!(m >= 1, "terms are indexed from 1");
        match &self.kind {
            SeqKind::ExplicitPrefixPeriodicTail => {
                if m <= self.prefix.len() {
                    self.prefix[m - 1].clone()
                } else {
                    let i = (m - 1 - self.prefix.len()) % self.tail.len();
                    self.tail[i].clone()
                }
            }
            SeqKind::BuiltinThm72 { n } => {
                if thm72_special_time(m, Some(*n)) {
                    Polynomial::square_shifted(3.0)
                } else {
                    Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap()
                }
            }
            SeqKind::BuiltinThm72Limit => {
                if thm72_special_time(m, None) {
                    Polynomial::square_shifted(3.0)
                } else {
                    Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap()
                }
            }
        }
    }

    pub fn escape_radius(&self) -> f64 {
        escape_radius(self.bounds)
    }
}

fn validate_poly(p: &Polynomial, b: Bounds) -> Result<()> {
    let deg = p.degree();
    if deg < 2 || deg > b.d as usize {
        return Err(Error::SpecInput(format!(
            "degree {} outside [2, {}]",
            deg, b.d
        )));
    }
    let lead = p.leading_coeff().norm();
    if lead < 1.0 / b.k - 1e-12 || lead > b.k + 1e-12 {
        return Err(Error::SpecInput(format!(
            "leading coefficient modulus {} outside [1/{}, {}]",
            lead, b.k, b.k
        )));
    }
    for c in &p.coeffs()[..deg] {
        if c.norm() > b.m + 1e-12 {
            return Err(Error::SpecInput(format!(
                "coefficient modulus {} exceeds M = {}",
                c.norm(),
                b.m
            )));
        }
    }
    Ok(())
}

/// Outcome of a finite composition: either the value, or the step at which
/// the orbit overflowed toward infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ComposeOutcome {
    Value(Complex64),
    Escaped { step: usize },
}

const OVERFLOW_GUARD: f64 = 1e150;

/// Q_{m,n}(z) = P_n o ... o P_{m+1}(z); the empty composition (m = n) is
/// the identity. Overflow is reported as an escaped flag, not a fault.
pub fn compose_eval(seq: &SequenceSpec, m: usize, n: usize, z: Complex64) -> ComposeOutcome {
    assert!(m <= n, "compose_eval needs m <= n");
    let mut w = z;
    for (step, idx) in (m + 1..=n).enumerate() {
        if w.norm() > OVERFLOW_GUARD {
            return ComposeOutcome::Escaped { step };
        }
        w = seq.term(idx).eval(w);
    }
    if w.is_finite() {
        ComposeOutcome::Value(w)
    } else {
        ComposeOutcome::Escaped { step: n - m }
    }
}

/// D_{m,n} = product of the degrees of P_{m+1} ... P_n.
pub fn composition_degree(seq: &SequenceSpec, m: usize, n: usize) -> u128 {
    assert!(m <= n);
    (m + 1..=n)
        .map(|i| seq.term(i).degree() as u128)
        .product()
}

// --- JSON schema -----------------------------------------------------------
//
// {"kind": "...", "bounds": {"d":2,"K":1.0,"M":0.25},
//  "prefix": [[[re,im],...], ...], "tail": [...], "n": 3}

#[derive(Serialize, Deserialize)]
struct SequenceSpecFile {
    kind: String,
    bounds: Bounds,
    #[serde(default)]
    prefix: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    tail: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<u32>,
}

fn poly_from_pairs(pairs: &[[f64; 2]]) -> Result<Polynomial> {
    Polynomial::new(pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect())
}

fn poly_to_pairs(p: &Polynomial) -> Vec<[f64; 2]> {
    p.coeffs().iter().map(|c| [c.re, c.im]).collect()
}

impl SequenceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SequenceSpecFile =
            serde_json::from_str(text).map_err(|e| Error::SpecInput(e.to_string()))?;
        let bounds = Bounds::new(file.bounds.d, file.bounds.k, file.bounds.m)?;
        match file.kind.as_str() {
            "explicit-prefix-with-periodic-tail" => {
                let prefix = file
                    .prefix
                    .iter()
                    .map(|p| poly_from_pairs(p))
                    .collect::<Result<Vec<_>>>()?;
                let tail = file
                    .tail
                    .iter()
                    .map(|p| poly_from_pairs(p))
                    .collect::<Result<Vec<_>>>()?;
                SequenceSpec::explicit(prefix, tail, bounds)
            }
            "builtin-thm72" => {
                let n = file
                    .n
                    .ok_or_else(|| Error::SpecInput("builtin-thm72 requires \"n\"".into()))?;
                Ok(SequenceSpec::builtin_thm72(n))
            }
            "builtin-thm72-limit" => Ok(SequenceSpec::builtin_thm72_limit()),
            other => Err(Error::SpecInput(format!("unknown kind {:?}", other))),
        }
    }

    pub fn to_json(&self) -> String {
        let (kind, n) = match &self.kind {
            SeqKind::ExplicitPrefixPeriodicTail => {
                ("explicit-prefix-with-periodic-tail".to_string(), None)
            }
            SeqKind::BuiltinThm72 { n } => ("builtin-thm72".to_string(), Some(*n)),
            SeqKind::BuiltinThm72Limit => ("builtin-thm72-limit".to_string(), None),
        };
        let file = SequenceSpecFile {
            kind,
            bounds: self.bounds,
            prefix: self.prefix.iter().map(poly_to_pairs).collect(),
            tail: self.tail.iter().map(poly_to_pairs).collect(),
            n,
        };
        serde_json::to_string_pretty(&file).expect("sequence spec serializes")
    }
}
