//! Trigonometric polynomials in one time variable, plus 3-vectors and 3×3
//! matrices of them.
//!
//! Every time-dependent object downstream (translations, rotations, phases,
//! cocycle values) lives in the ring of finite sums
//! `Σ tᵏ·(a·cos(ωt) + b·sin(ωt))` with integer `k ≥ 0` and real `ω ≥ 0`.
//! The ring is closed under addition, multiplication (product-to-sum),
//! differentiation, termwise antiderivatives, and time shifts `t ↦ t+b`,
//! so group-theoretic identities can be checked as coefficient identities
//! instead of through quadrature or ODE integration.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};
use std::str::FromStr;

use thiserror::Error;

/// Coefficient magnitudes below this are flushed to exact zero when a value is
/// brought to canonical form. Sized for O(1)–O(10²) coefficients: a few ulps of
/// the arithmetic that produced them, far below every tolerance used by the
/// verification suites (≥ 1e-10).
pub const COEFF_EPS: f64 = 1e-14;

/// Frequencies closer than this are treated as the same harmonic and their
/// coefficients merged. Distinct physical frequencies in this crate differ by
/// O(0.1); 1e-12 only glues together float jitter from computing the same
/// frequency along different arithmetic routes.
pub const FREQ_MERGE_EPS: f64 = 1e-12;

/// Cap on the power of `t` in any term. Exceeding it means some computation is
/// growing without bound (typically an antiderivative/multiply cycle) and is
/// reported by panicking rather than by an `Err`: it is a usage bug, not an
/// input condition.
pub const MAX_POWER: u32 = 16;

/// Cap on the number of stored terms, in the same spirit as [`MAX_POWER`].
/// The deepest legitimate computations here (cocycle coboundaries on triples
/// of generic two-axis elements, measured in the cocycle tests) peak around
/// 10² terms when frequencies live on a lattice, but reach several thousand
/// for generic real frequencies, where every composition level doubles the
/// number of distinct harmonics. The cap clears both regimes for shallow
/// expressions while still tripping quickly on true runaway growth, which
/// outruns any fixed bound.
pub const MAX_TERMS: usize = 4096;

/// One canonical term `tᵖᵒʷᵉʳ·(cos·cos(freq·t) + sin·sin(freq·t))`.
///
/// Invariants (maintained by [`TrigPoly`], not by this type): `freq ≥ 0`;
/// `freq == 0` forces `sin == 0`; at least one of `cos`, `sin` is nonzero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub power: u32,
    pub freq: f64,
    pub cos: f64,
    pub sin: f64,
}

/// A trigonometric polynomial in canonical form: terms sorted by
/// `(power, freq)`, frequencies non-negative, near-duplicate frequencies
/// merged, negligible coefficients dropped.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrigPoly {
    terms: Vec<Term>,
}

#[derive(Debug)]
enum GrowthError {
    Power(u32),
    Terms(usize),
}

fn canonical(mut raw: Vec<Term>) -> Result<Vec<Term>, GrowthError> {
    for t in &mut raw {
        assert!(
            t.cos.is_finite() && t.sin.is_finite() && t.freq.is_finite(),
            "non-finite coefficient in trig polynomial (cos={}, sin={}, freq={})",
            t.cos,
            t.sin,
            t.freq
        );
        // cos is even and sin is odd, so a negative frequency folds onto the
        // positive axis with the sine coefficient flipped.
        if t.freq < 0.0 {
            t.freq = -t.freq;
            t.sin = -t.sin;
        }
        if t.freq < FREQ_MERGE_EPS {
            t.freq = 0.0;
            t.sin = 0.0; // sin(0·t) ≡ 0
        }
    }
    raw.sort_by(|x, y| x.power.cmp(&y.power).then(x.freq.total_cmp(&y.freq)));
    let mut out: Vec<Term> = Vec::with_capacity(raw.len());
    for t in raw {
        match out.last_mut() {
            Some(last) if last.power == t.power && t.freq - last.freq < FREQ_MERGE_EPS => {
                last.cos += t.cos;
                last.sin += t.sin;
            }
            _ => out.push(t),
        }
    }
    for t in &mut out {
        if t.cos.abs() < COEFF_EPS {
            t.cos = 0.0;
        }
        if t.sin.abs() < COEFF_EPS {
            t.sin = 0.0;
        }
    }
    out.retain(|t| t.cos != 0.0 || t.sin != 0.0);
    if let Some(t) = out.iter().find(|t| t.power > MAX_POWER) {
        return Err(GrowthError::Power(t.power));
    }
    if out.len() > MAX_TERMS {
        return Err(GrowthError::Terms(out.len()));
    }
    Ok(out)
}

impl TrigPoly {
    fn from_raw(raw: Vec<Term>) -> Self {
        match canonical(raw) {
            Ok(terms) => TrigPoly { terms },
            Err(GrowthError::Power(p)) => panic!(
                "trig polynomial degree {p} exceeds the cap {MAX_POWER}: unbounded symbolic \
                 growth (usually a repeated antiderivative or multiply cycle)"
            ),
            Err(GrowthError::Terms(n)) => panic!(
                "trig polynomial has {n} terms, more than the cap {MAX_TERMS}: unbounded \
                 symbolic growth (usually a repeated antiderivative or multiply cycle)"
            ),
        }
    }

    pub fn zero() -> Self {
        TrigPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    /// The identity function `t`.
    pub fn t() -> Self {
        Self::monomial(1, 1.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(0, c)
    }

    /// `coeff·tᵖᵒʷᵉʳ`
    pub fn monomial(power: u32, coeff: f64) -> Self {
        Self::term(power, 0.0, coeff, 0.0)
    }

    /// `coeff·tᵖᵒʷᵉʳ·cos(freq·t)`
    pub fn cosine(power: u32, freq: f64, coeff: f64) -> Self {
        Self::term(power, freq, coeff, 0.0)
    }

    /// `coeff·tᵖᵒʷᵉʳ·sin(freq·t)`
    pub fn sine(power: u32, freq: f64, coeff: f64) -> Self {
        Self::term(power, freq, 0.0, coeff)
    }

    /// `tᵖᵒʷᵉʳ·(cos_coeff·cos(freq·t) + sin_coeff·sin(freq·t))`
    pub fn term(power: u32, freq: f64, cos_coeff: f64, sin_coeff: f64) -> Self {
        Self::from_raw(vec![Term {
            power,
            freq,
            cos: cos_coeff,
            sin: sin_coeff,
        }])
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` if the value stays within `atol` of the constant `c = f(0)`.
    pub fn as_constant(&self, atol: f64) -> Option<f64> {
        let c = self.evaluate(0.0);
        self.approx_equal(&TrigPoly::constant(c), atol).then_some(c)
    }

    pub fn evaluate(&self, time: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let tp = time.powi(t.power as i32);
                if t.freq == 0.0 {
                    tp * t.cos
                } else {
                    let phase = t.freq * time;
                    tp * (t.cos * phase.cos() + t.sin * phase.sin())
                }
            })
            .sum()
    }

    pub fn scale(&self, c: f64) -> TrigPoly {
        let raw = self
            .terms
            .iter()
            .map(|t| Term {
                cos: t.cos * c,
                sin: t.sin * c,
                ..*t
            })
            .collect();
        TrigPoly::from_raw(raw)
    }

    /// Time translation `(Λ_b f)(t) = f(t + b)`, exactly: binomial expansion on
    /// the polynomial part, angle addition on the harmonic part.
    pub fn shift(&self, b: f64) -> TrigPoly {
        let mut raw = Vec::new();
        for t in &self.terms {
            let (cb, sb) = if t.freq == 0.0 {
                (1.0, 0.0)
            } else {
                ((t.freq * b).cos(), (t.freq * b).sin())
            };
            // a·cos(ω(t+b)) + s·sin(ω(t+b)) = (a·cos(ωb)+s·sin(ωb))·cos(ωt)
            //                               + (s·cos(ωb)−a·sin(ωb))·sin(ωt)
            let cos = t.cos * cb + t.sin * sb;
            let sin = t.sin * cb - t.cos * sb;
            for j in 0..=t.power {
                let c = binom(t.power, j) * b.powi((t.power - j) as i32);
                raw.push(Term {
                    power: j,
                    freq: t.freq,
                    cos: c * cos,
                    sin: c * sin,
                });
            }
        }
        TrigPoly::from_raw(raw)
    }

    pub fn differentiate(&self) -> TrigPoly {
        let mut raw = Vec::new();
        for t in &self.terms {
            if t.power > 0 {
                let k = t.power as f64;
                raw.push(Term {
                    power: t.power - 1,
                    freq: t.freq,
                    cos: k * t.cos,
                    sin: k * t.sin,
                });
            }
            if t.freq > 0.0 {
                raw.push(Term {
                    power: t.power,
                    freq: t.freq,
                    cos: t.freq * t.sin,
                    sin: -t.freq * t.cos,
                });
            }
        }
        TrigPoly::from_raw(raw)
    }

    /// The termwise antiderivative, with no integration constant added: each
    /// polynomial term maps to `tᵏ⁺¹/(k+1)` and each harmonic term through the
    /// integration-by-parts ladder
    /// `∫tᵏ(a·cos+s·sin) = tᵏ(−s/ω·cos + a/ω·sin) + ∫tᵏ⁻¹(ks/ω·cos − ka/ω·sin)`.
    ///
    /// Note this is *a* primitive, not the one vanishing at `t = 0`; harmonic
    /// terms keep their natural `±cos/ω` offsets.
    pub fn antiderivative(&self) -> TrigPoly {
        let mut raw = Vec::new();
        for term in &self.terms {
            if term.freq == 0.0 {
                raw.push(Term {
                    power: term.power + 1,
                    freq: 0.0,
                    cos: term.cos / (term.power as f64 + 1.0),
                    sin: 0.0,
                });
            } else {
                let w = term.freq;
                let (mut k, mut a, mut s) = (term.power, term.cos, term.sin);
                loop {
                    raw.push(Term {
                        power: k,
                        freq: w,
                        cos: -s / w,
                        sin: a / w,
                    });
                    if k == 0 {
                        break;
                    }
                    let kf = k as f64;
                    (a, s) = (kf * s / w, -kf * a / w);
                    k -= 1;
                }
            }
        }
        TrigPoly::from_raw(raw)
    }

    /// Conservative gap between two values: the larger of the biggest
    /// coefficient of the difference and the biggest pointwise difference on a
    /// fixed 32-point grid over `[-5, 5]`. Zero only when the canonical forms
    /// agree; the coefficient half catches harmonics the sample grid aliases,
    /// the pointwise half keeps the number meaningful as a function gap.
    pub fn distance(&self, other: &TrigPoly) -> f64 {
        let d = self - other;
        let coeff = d
            .terms
            .iter()
            .map(|t| t.cos.abs().max(t.sin.abs()))
            .fold(0.0, f64::max);
        let eval = sample_times()
            .map(|t| d.evaluate(t).abs())
            .fold(0.0, f64::max);
        coeff.max(eval)
    }

    pub fn approx_equal(&self, other: &TrigPoly, atol: f64) -> bool {
        self.distance(other) < atol
    }
}

fn sample_times() -> impl Iterator<Item = f64> {
    (0..32).map(|i| -5.0 + 10.0 * (i as f64) / 31.0)
}

fn binom(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

impl From<f64> for TrigPoly {
    fn from(c: f64) -> Self {
        TrigPoly::constant(c)
    }
}

// ---------------------------------------------------------------------------
// Arithmetic. Reference operands are primary; owned/mixed forms forward.

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $lhs:ty, $rhs:ty, $out:ty) => {
        impl $trait<$rhs> for $lhs {
            type Output = $out;
            fn $method(self, rhs: $rhs) -> $out {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a $rhs> for $lhs {
            type Output = $out;
            fn $method(self, rhs: &'a $rhs) -> $out {
                (&self).$method(rhs)
            }
        }
        impl<'a> $trait<$rhs> for &'a $lhs {
            type Output = $out;
            fn $method(self, rhs: $rhs) -> $out {
                self.$method(&rhs)
            }
        }
    };
}

impl Add<&TrigPoly> for &TrigPoly {
    type Output = TrigPoly;
    fn add(self, rhs: &TrigPoly) -> TrigPoly {
        let mut raw = self.terms.clone();
        raw.extend_from_slice(&rhs.terms);
        TrigPoly::from_raw(raw)
    }
}
forward_binop!(Add, add, TrigPoly, TrigPoly, TrigPoly);

impl Sub<&TrigPoly> for &TrigPoly {
    type Output = TrigPoly;
    fn sub(self, rhs: &TrigPoly) -> TrigPoly {
        let mut raw = self.terms.clone();
        raw.extend(rhs.terms.iter().map(|t| Term {
            cos: -t.cos,
            sin: -t.sin,
            ..*t
        }));
        TrigPoly::from_raw(raw)
    }
}
forward_binop!(Sub, sub, TrigPoly, TrigPoly, TrigPoly);

impl Neg for &TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        self.scale(-1.0)
    }
}

impl Neg for TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        self.scale(-1.0)
    }
}

impl Mul<&TrigPoly> for &TrigPoly {
    type Output = TrigPoly;
    fn mul(self, rhs: &TrigPoly) -> TrigPoly {
        let mut raw = Vec::with_capacity(self.terms.len() * rhs.terms.len() * 2);
        for x in &self.terms {
            for y in &rhs.terms {
                // Product-to-sum on (a₁cos+s₁sin)(a₂cos+s₂sin) at ω₁∓ω₂:
                //   cos·cos → ½cos(ω₋)+½cos(ω₊)      sin·sin → ½cos(ω₋)−½cos(ω₊)
                //   sin·cos → ½sin(ω₋)+½sin(ω₊)      cos·sin → −½sin(ω₋)+½sin(ω₊)
                let power = x.power + y.power;
                let (cc, ss) = (x.cos * y.cos, x.sin * y.sin);
                let (sc, cs) = (x.sin * y.cos, x.cos * y.sin);
                raw.push(Term {
                    power,
                    freq: x.freq - y.freq,
                    cos: 0.5 * (cc + ss),
                    sin: 0.5 * (sc - cs),
                });
                raw.push(Term {
                    power,
                    freq: x.freq + y.freq,
                    cos: 0.5 * (cc - ss),
                    sin: 0.5 * (sc + cs),
                });
            }
        }
        TrigPoly::from_raw(raw)
    }
}
forward_binop!(Mul, mul, TrigPoly, TrigPoly, TrigPoly);

impl Mul<f64> for &TrigPoly {
    type Output = TrigPoly;
    fn mul(self, c: f64) -> TrigPoly {
        self.scale(c)
    }
}

impl Mul<f64> for TrigPoly {
    type Output = TrigPoly;
    fn mul(self, c: f64) -> TrigPoly {
        self.scale(c)
    }
}

// ---------------------------------------------------------------------------
// Text form. `Display` and `FromStr` share the grammar
//   poly    := ['-'] summand (('+'|'-') summand)*          | "0"
//   summand := factor ('*' factor)*
//   factor  := number | 't' ['^' int] | ('cos'|'sin') '(' [number '*'] 't' ')'
// with at most one trig factor per summand. The printer always writes an
// explicit coefficient and an explicit frequency, e.g.
// `3*t^2 + 0.5*cos(2*t) - 1*t*sin(1*t)`; the parser is more permissive.

impl fmt::Display for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for t in &self.terms {
            for (coeff, trig) in [(t.cos, "cos"), (t.sin, "sin")] {
                if coeff == 0.0 {
                    continue;
                }
                if first {
                    if coeff < 0.0 {
                        write!(f, "-")?;
                    }
                    first = false;
                } else if coeff < 0.0 {
                    write!(f, " - ")?;
                } else {
                    write!(f, " + ")?;
                }
                write!(f, "{}", coeff.abs())?;
                match t.power {
                    0 => {}
                    1 => write!(f, "*t")?,
                    p => write!(f, "*t^{p}")?,
                }
                if t.freq != 0.0 {
                    write!(f, "*{trig}({}*t)", t.freq)?;
                }
            }
        }
        Ok(())
    }
}

/// Why a textual trig polynomial failed to parse. Byte offsets index into the
/// original input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("unexpected character {ch:?} at byte {pos}")]
    UnexpectedChar { ch: char, pos: usize },
    #[error("unknown name {name:?} at byte {pos} (expected t, cos, or sin)")]
    UnknownName { name: String, pos: usize },
    #[error("malformed number at byte {pos}")]
    BadNumber { pos: usize },
    #[error("unexpected end of input (expected {expected})")]
    UnexpectedEnd { expected: &'static str },
    #[error("unexpected token at byte {pos} (expected {expected})")]
    Unexpected { pos: usize, expected: &'static str },
    #[error("second cos/sin factor at byte {pos}: expand products before writing them down")]
    SecondTrigFactor { pos: usize },
    #[error("exponent at byte {pos} must be an integer in 0..={max}", max = MAX_POWER)]
    BadExponent { pos: usize },
    #[error("input describes more than {max} terms", max = MAX_TERMS)]
    TooManyTerms,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Tok {
    Num(f64),
    T,
    Cos,
    Sin,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            c if c.is_ascii_whitespace() => i += 1,
            '+' => {
                toks.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                toks.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                toks.push((i, Tok::Star));
                i += 1;
            }
            '^' => {
                toks.push((i, Tok::Caret));
                i += 1;
            }
            '(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && matches!(bytes[i], b'0'..=b'9' | b'.') {
                    i += 1;
                }
                if i < bytes.len() && matches!(bytes[i], b'e' | b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && matches!(bytes[j], b'+' | b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let val: f64 = src[start..i]
                    .parse()
                    .map_err(|_| ParseError::BadNumber { pos: start })?;
                if !val.is_finite() {
                    return Err(ParseError::BadNumber { pos: start });
                }
                toks.push((start, Tok::Num(val)));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                    i += 1;
                }
                let tok = match &src[start..i] {
                    "t" => Tok::T,
                    "cos" => Tok::Cos,
                    "sin" => Tok::Sin,
                    name => {
                        return Err(ParseError::UnknownName {
                            name: name.to_string(),
                            pos: start,
                        })
                    }
                };
                toks.push((start, tok));
            }
            _ => return Err(ParseError::UnexpectedChar { ch: c, pos: i }),
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> Option<(usize, Tok)> {
        self.toks.get(self.i).copied()
    }

    fn bump(&mut self) -> Option<(usize, Tok)> {
        let t = self.peek();
        if t.is_some() {
            self.i += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, expected: &'static str) -> Result<usize, ParseError> {
        match self.bump() {
            Some((pos, tok)) if tok == want => Ok(pos),
            Some((pos, _)) => Err(ParseError::Unexpected { pos, expected }),
            None => Err(ParseError::UnexpectedEnd { expected }),
        }
    }

    /// `[number '*'] 't'` inside a trig factor's parentheses; an optional
    /// leading minus is folded into the frequency.
    fn frequency(&mut self) -> Result<f64, ParseError> {
        let mut sign = 1.0;
        if let Some((_, Tok::Minus)) = self.peek() {
            self.bump();
            sign = -1.0;
        }
        match self.bump() {
            Some((_, Tok::Num(v))) => {
                self.expect(Tok::Star, "'*' between frequency and t")?;
                self.expect(Tok::T, "t after frequency")?;
                Ok(sign * v)
            }
            Some((_, Tok::T)) => Ok(sign),
            Some((pos, _)) => Err(ParseError::Unexpected {
                pos,
                expected: "frequency (number*t or t)",
            }),
            None => Err(ParseError::UnexpectedEnd {
                expected: "frequency (number*t or t)",
            }),
        }
    }

    fn summand(&mut self, sign: f64) -> Result<Term, ParseError> {
        let mut coeff = 1.0;
        let mut power: u32 = 0;
        let mut trig: Option<(bool, f64)> = None;
        loop {
            match self.bump() {
                Some((_, Tok::Num(v))) => coeff *= v,
                Some((pos, Tok::T)) => {
                    let mut exp = 1;
                    if let Some((_, Tok::Caret)) = self.peek() {
                        self.bump();
                        exp = match self.bump() {
                            Some((epos, Tok::Num(v)))
                                if v.fract() == 0.0 && v >= 0.0 && v <= MAX_POWER as f64 =>
                            {
                                let _ = epos;
                                v as u32
                            }
                            Some((epos, _)) => return Err(ParseError::BadExponent { pos: epos }),
                            None => {
                                return Err(ParseError::UnexpectedEnd {
                                    expected: "integer exponent",
                                })
                            }
                        };
                    }
                    power += exp;
                    if power > MAX_POWER {
                        return Err(ParseError::BadExponent { pos });
                    }
                }
                Some((pos, tok @ (Tok::Cos | Tok::Sin))) => {
                    if trig.is_some() {
                        return Err(ParseError::SecondTrigFactor { pos });
                    }
                    self.expect(Tok::LParen, "'(' after cos/sin")?;
                    let w = self.frequency()?;
                    self.expect(Tok::RParen, "')' closing cos/sin")?;
                    trig = Some((tok == Tok::Sin, w));
                }
                Some((pos, _)) => {
                    return Err(ParseError::Unexpected {
                        pos,
                        expected: "number, t, cos, or sin",
                    })
                }
                None => {
                    return Err(ParseError::UnexpectedEnd {
                        expected: "number, t, cos, or sin",
                    })
                }
            }
            match self.peek() {
                Some((_, Tok::Star)) => {
                    self.bump();
                }
                _ => break,
            }
        }
        let c = sign * coeff;
        Ok(match trig {
            None => Term {
                power,
                freq: 0.0,
                cos: c,
                sin: 0.0,
            },
            Some((false, w)) => Term {
                power,
                freq: w,
                cos: c,
                sin: 0.0,
            },
            Some((true, w)) => Term {
                power,
                freq: w,
                cos: 0.0,
                sin: c,
            },
        })
    }

    fn poly(&mut self) -> Result<TrigPoly, ParseError> {
        let mut raw = Vec::new();
        let mut sign = 1.0;
        if let Some((_, Tok::Minus)) = self.peek() {
            self.bump();
            sign = -1.0;
        } else if let Some((_, Tok::Plus)) = self.peek() {
            self.bump();
        }
        loop {
            raw.push(self.summand(sign)?);
            match self.bump() {
                None => break,
                Some((_, Tok::Plus)) => sign = 1.0,
                Some((_, Tok::Minus)) => sign = -1.0,
                Some((pos, _)) => {
                    return Err(ParseError::Unexpected {
                        pos,
                        expected: "'+', '-', or end of input",
                    })
                }
            }
        }
        match canonical(raw) {
            Ok(terms) => Ok(TrigPoly { terms }),
            // Per-summand checks cap the power, so only the term cap can trip.
            Err(_) => Err(ParseError::TooManyTerms),
        }
    }
}

impl FromStr for TrigPoly {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let toks = lex(s)?;
        if toks.is_empty() {
            return Err(ParseError::UnexpectedEnd {
                expected: "a trig polynomial",
            });
        }
        Parser { toks, i: 0 }.poly()
    }
}

// ---------------------------------------------------------------------------
// Time-dependent 3-vectors and 3×3 matrices.

/// A 3-vector of trig polynomials.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Vec3Fn(pub [TrigPoly; 3]);

impl Vec3Fn {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(x: TrigPoly, y: TrigPoly, z: TrigPoly) -> Self {
        Vec3Fn([x, y, z])
    }

    pub fn constant(v: [f64; 3]) -> Self {
        Vec3Fn(v.map(TrigPoly::constant))
    }

    pub fn evaluate(&self, t: f64) -> [f64; 3] {
        [
            self.0[0].evaluate(t),
            self.0[1].evaluate(t),
            self.0[2].evaluate(t),
        ]
    }

    pub fn shift(&self, b: f64) -> Self {
        Vec3Fn(std::array::from_fn(|i| self.0[i].shift(b)))
    }

    pub fn differentiate(&self) -> Self {
        Vec3Fn(std::array::from_fn(|i| self.0[i].differentiate()))
    }

    pub fn antiderivative(&self) -> Self {
        Vec3Fn(std::array::from_fn(|i| self.0[i].antiderivative()))
    }

    pub fn scale(&self, c: f64) -> Self {
        Vec3Fn(std::array::from_fn(|i| self.0[i].scale(c)))
    }

    pub fn scale_fn(&self, f: &TrigPoly) -> Self {
        Vec3Fn(std::array::from_fn(|i| &self.0[i] * f))
    }

    pub fn dot(&self, other: &Vec3Fn) -> TrigPoly {
        &(&(&self.0[0] * &other.0[0]) + &(&self.0[1] * &other.0[1])) + &(&self.0[2] * &other.0[2])
    }

    pub fn cross(&self, other: &Vec3Fn) -> Vec3Fn {
        let a = &self.0;
        let b = &other.0;
        Vec3Fn([
            &(&a[1] * &b[2]) - &(&a[2] * &b[1]),
            &(&a[2] * &b[0]) - &(&a[0] * &b[2]),
            &(&a[0] * &b[1]) - &(&a[1] * &b[0]),
        ])
    }

    pub fn distance(&self, other: &Vec3Fn) -> f64 {
        (0..3)
            .map(|i| self.0[i].distance(&other.0[i]))
            .fold(0.0, f64::max)
    }

    pub fn approx_equal(&self, other: &Vec3Fn, atol: f64) -> bool {
        self.distance(other) < atol
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(TrigPoly::is_zero)
    }
}

impl Index<usize> for Vec3Fn {
    type Output = TrigPoly;
    fn index(&self, i: usize) -> &TrigPoly {
        &self.0[i]
    }
}

impl Add<&Vec3Fn> for &Vec3Fn {
    type Output = Vec3Fn;
    fn add(self, rhs: &Vec3Fn) -> Vec3Fn {
        Vec3Fn(std::array::from_fn(|i| &self.0[i] + &rhs.0[i]))
    }
}
forward_binop!(Add, add, Vec3Fn, Vec3Fn, Vec3Fn);

impl Sub<&Vec3Fn> for &Vec3Fn {
    type Output = Vec3Fn;
    fn sub(self, rhs: &Vec3Fn) -> Vec3Fn {
        Vec3Fn(std::array::from_fn(|i| &self.0[i] - &rhs.0[i]))
    }
}
forward_binop!(Sub, sub, Vec3Fn, Vec3Fn, Vec3Fn);

impl Neg for &Vec3Fn {
    type Output = Vec3Fn;
    fn neg(self) -> Vec3Fn {
        self.scale(-1.0)
    }
}

impl Neg for Vec3Fn {
    type Output = Vec3Fn;
    fn neg(self) -> Vec3Fn {
        self.scale(-1.0)
    }
}

/// A 3×3 matrix of trig polynomials, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat3Fn(pub [[TrigPoly; 3]; 3]);

impl Mat3Fn {
    pub fn identity() -> Self {
        Self::constant([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    pub fn constant(m: [[f64; 3]; 3]) -> Self {
        Mat3Fn(m.map(|row| row.map(TrigPoly::constant)))
    }

    pub fn evaluate(&self, t: f64) -> [[f64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j].evaluate(t)))
    }

    pub fn shift(&self, b: f64) -> Self {
        Mat3Fn(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[i][j].shift(b))
        }))
    }

    pub fn differentiate(&self) -> Self {
        Mat3Fn(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[i][j].differentiate())
        }))
    }

    pub fn transpose(&self) -> Self {
        Mat3Fn(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[j][i].clone())
        }))
    }

    pub fn scale_fn(&self, f: &TrigPoly) -> Self {
        Mat3Fn(std::array::from_fn(|i| {
            std::array::from_fn(|j| &self.0[i][j] * f)
        }))
    }

    pub fn mul_vec(&self, v: &Vec3Fn) -> Vec3Fn {
        Vec3Fn(std::array::from_fn(|i| {
            &(&(&self.0[i][0] * &v.0[0]) + &(&self.0[i][1] * &v.0[1])) + &(&self.0[i][2] * &v.0[2])
        }))
    }

    pub fn distance(&self, other: &Mat3Fn) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                d = d.max(self.0[i][j].distance(&other.0[i][j]));
            }
        }
        d
    }

    pub fn approx_equal(&self, other: &Mat3Fn, atol: f64) -> bool {
        self.distance(other) < atol
    }
}

impl Index<(usize, usize)> for Mat3Fn {
    type Output = TrigPoly;
    fn index(&self, (i, j): (usize, usize)) -> &TrigPoly {
        &self.0[i][j]
    }
}

impl Mul<&Mat3Fn> for &Mat3Fn {
    type Output = Mat3Fn;
    fn mul(self, rhs: &Mat3Fn) -> Mat3Fn {
        Mat3Fn(std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut acc = TrigPoly::zero();
                for k in 0..3 {
                    acc = &acc + &(&self.0[i][k] * &rhs.0[k][j]);
                }
                acc
            })
        }))
    }
}
forward_binop!(Mul, mul, Mat3Fn, Mat3Fn, Mat3Fn);

impl Mul<&Vec3Fn> for &Mat3Fn {
    type Output = Vec3Fn;
    fn mul(self, rhs: &Vec3Fn) -> Vec3Fn {
        self.mul_vec(rhs)
    }
}
forward_binop!(Mul, mul, Mat3Fn, Vec3Fn, Vec3Fn);

impl Add<&Mat3Fn> for &Mat3Fn {
    type Output = Mat3Fn;
    fn add(self, rhs: &Mat3Fn) -> Mat3Fn {
        Mat3Fn(std::array::from_fn(|i| {
            std::array::from_fn(|j| &self.0[i][j] + &rhs.0[i][j])
        }))
    }
}
forward_binop!(Add, add, Mat3Fn, Mat3Fn, Mat3Fn);

impl Sub<&Mat3Fn> for &Mat3Fn {
    type Output = Mat3Fn;
    fn sub(self, rhs: &Mat3Fn) -> Mat3Fn {
        Mat3Fn(std::array::from_fn(|i| {
            std::array::from_fn(|j| &self.0[i][j] - &rhs.0[i][j])
        }))
    }
}
forward_binop!(Sub, sub, Mat3Fn, Mat3Fn, Mat3Fn);
