//! SL2(Z) arithmetic and the conformal-block representation on the untwisted sector.
//!
//! Generators are `S = (0, -1; 1, 0)` and `T = (1, 1; 0, 1)`. A [`GeneratorWord`]
//! multiplies left to right, and `ρ(S)`, `ρ(T)` are the S-matrix and T-matrix of a
//! modular datum.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::modular_data::ModularDatum;

/// Integer matrix `(a, b; c, d)` with `ad - bc = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Sl2Matrix {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl Sl2Matrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = (a as i128) * (d as i128) - (b as i128) * (c as i128);
        if det != 1 {
            return Err(Error::NotUnimodular { a, b, c, d });
        }
        Ok(Sl2Matrix { a, b, c, d })
    }

    pub const IDENTITY: Sl2Matrix = Sl2Matrix {
        a: 1,
        b: 0,
        c: 0,
        d: 1,
    };
    pub const S: Sl2Matrix = Sl2Matrix {
        a: 0,
        b: -1,
        c: 1,
        d: 0,
    };
    pub const MINUS_IDENTITY: Sl2Matrix = Sl2Matrix {
        a: -1,
        b: 0,
        c: 0,
        d: -1,
    };

    pub fn t_pow(n: i64) -> Self {
        Sl2Matrix {
            a: 1,
            b: n,
            c: 0,
            d: 1,
        }
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn inverse(&self) -> Self {
        Sl2Matrix {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn checked_mul(&self, rhs: &Sl2Matrix) -> Option<Sl2Matrix> {
        let dot = |x: i64, y: i64, z: i64, w: i64| x.checked_mul(y)?.checked_add(z.checked_mul(w)?);
        Some(Sl2Matrix {
            a: dot(self.a, rhs.a, self.b, rhs.c)?,
            b: dot(self.a, rhs.b, self.b, rhs.d)?,
            c: dot(self.c, rhs.a, self.d, rhs.c)?,
            d: dot(self.c, rhs.b, self.d, rhs.d)?,
        })
    }

    pub fn max_abs_entry(&self) -> i64 {
        self.entries().iter().map(|x| x.abs()).max().unwrap()
    }
}

impl Mul for Sl2Matrix {
    type Output = Sl2Matrix;

    /// Panics on `i64` overflow; use [`Sl2Matrix::checked_mul`] for untrusted sizes.
    fn mul(self, rhs: Sl2Matrix) -> Sl2Matrix {
        self.checked_mul(&rhs)
            .expect("SL2(Z) product overflowed i64")
    }
}

impl fmt::Display for Sl2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}; {}, {})", self.a, self.b, self.c, self.d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    S,
    /// `T^n` with `n ≠ 0`.
    T(i64),
}

impl Generator {
    pub fn matrix(&self) -> Sl2Matrix {
        match *self {
            Generator::S => Sl2Matrix::S,
            Generator::T(n) => Sl2Matrix::t_pow(n),
        }
    }
}

/// A product of generators with adjacent `T` powers merged and `T^0` dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GeneratorWord {
    tokens: Vec<Generator>,
}

impl GeneratorWord {
    pub fn new() -> Self {
        GeneratorWord::default()
    }

    pub fn from_tokens<I: IntoIterator<Item = Generator>>(tokens: I) -> Self {
        let mut w = GeneratorWord::new();
        for t in tokens {
            w.push(t);
        }
        w
    }

    pub fn push(&mut self, g: Generator) {
        match g {
            Generator::T(0) => {}
            Generator::T(n) => match self.tokens.last_mut() {
                Some(Generator::T(m)) => {
                    *m += n;
                    if *m == 0 {
                        self.tokens.pop();
                    }
                }
                _ => self.tokens.push(g),
            },
            Generator::S => self.tokens.push(g),
        }
    }

    pub fn tokens(&self) -> &[Generator] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.tokens.is_empty() {
            return f.write_str("1");
        }
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match t {
                Generator::S => f.write_str("S")?,
                Generator::T(1) => f.write_str("T")?,
                Generator::T(n) => write!(f, "T^{n}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for GeneratorWord {
    type Err = Error;

    /// Parses the [`Display`](fmt::Display) form, e.g. `"S T^-2 S"`; `T` alone means `T^1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" || s.is_empty() {
            return Ok(GeneratorWord::new());
        }
        let mut w = GeneratorWord::new();
        for tok in s.split_whitespace() {
            let g = match tok {
                "S" => Generator::S,
                "T" => Generator::T(1),
                _ => {
                    let n = tok
                        .strip_prefix("T^")
                        .and_then(|n| n.parse().ok())
                        .ok_or_else(|| Error::Parse(format!("bad generator token {tok:?}")))?;
                    Generator::T(n)
                }
            };
            w.push(g);
        }
        Ok(w)
    }
}

/// Integer product of the word, left to right.
pub fn evaluate_word_int(w: &GeneratorWord) -> Sl2Matrix {
    w.tokens
        .iter()
        .fold(Sl2Matrix::IDENTITY, |acc, g| acc * g.matrix())
}

/// Factors `m` into `S` and `T` by the Euclidean algorithm on its first column.
///
/// Each step writes `M = T^q S M'` with `q = ⌊a/c⌋`, which replaces the first
/// column `(a, c)` of `M` by `(c, q c - a)`, so `|c|` strictly decreases. The
/// remainder is `±T^n`, and `-I` is emitted as `S S`.
pub fn decompose_to_generators(m: &Sl2Matrix) -> GeneratorWord {
    let mut word = GeneratorWord::new();
    let (mut a, mut b, mut c, mut d) = (m.a, m.b, m.c, m.d);
    while c != 0 {
        let q = a.div_euclid(c);
        // M' = S^{-1} T^{-q} M, with S^{-1} = (0, 1; -1, 0).
        let (a1, b1) = (a - q * c, b - q * d);
        (a, b, c, d) = (c, d, -a1, -b1);
        word.push(Generator::T(q));
        word.push(Generator::S);
    }
    // Now M = ±(1, n; 0, 1).
    if a == -1 {
        word.push(Generator::S);
        word.push(Generator::S);
        word.push(Generator::T(-b));
    } else {
        debug_assert_eq!((a, d), (1, 1));
        word.push(Generator::T(b));
    }
    word
}

/// `ρ(word)` on the untwisted sector of `d`: `ρ(S) = S`, `ρ(T^n) = T^n`.
pub fn rho_of_word(w: &GeneratorWord, d: &ModularDatum) -> CMatrix {
    let t = d.t_matrix();
    let mut acc = linalg::identity(d.rank());
    for g in w.tokens() {
        acc = match *g {
            Generator::S => linalg::matmul(&acc, d.s_matrix()),
            Generator::T(n) => {
                let tn: Vec<_> = t.iter().map(|p| p.pow(n).to_complex()).collect();
                linalg::mul_diag_right(&acc, &tn)
            }
        };
    }
    acc
}

/// `ρ(m)`, evaluated through [`decompose_to_generators`].
pub fn rho_of(m: &Sl2Matrix, d: &ModularDatum) -> CMatrix {
    rho_of_word(&decompose_to_generators(m), d)
}

pub fn is_prime(k: i64) -> bool {
    if k < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= k {
        if k % p == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// Solution of `s ≡ r·a`, `-r ≡ s·b (mod k)` with `0 < a, b < k`, and the matrix
/// `A^{r,s} = (k, -b; -a, (1 + ab)/k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwistMatrix {
    pub a: i64,
    pub b: i64,
    pub matrix: Sl2Matrix,
}

pub fn build_a(k: i64, r: i64, s: i64) -> Result<TwistMatrix> {
    if !is_prime(k) {
        return Err(Error::NotPrime(k));
    }
    for (name, value) in [("r", r), ("s", s)] {
        if value <= 0 || value >= k {
            return Err(Error::OutOfRange {
                name,
                value,
                range: format!("(0, {k})"),
            });
        }
    }
    // k is tiny in practice; a direct search is all we need.
    let a = (1..k)
        .find(|a| (s - r * a).rem_euclid(k) == 0)
        .expect("r is invertible mod a prime");
    let b = (1..k)
        .find(|b| (r + s * b).rem_euclid(k) == 0)
        .expect("s is invertible mod a prime");
    debug_assert_eq!((1 + a * b) % k, 0);
    let matrix = Sl2Matrix::new(k, -b, -a, (1 + a * b) / k)?;
    Ok(TwistMatrix { a, b, matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn m(a: i64, b: i64, c: i64, d: i64) -> Sl2Matrix {
        Sl2Matrix::new(a, b, c, d).unwrap()
    }

    #[test]
    fn evaluate_basic_words() {
        let w = |s: &str| evaluate_word_int(&s.parse().unwrap());
        assert_eq!(w("S"), m(0, -1, 1, 0));
        assert_eq!(w("T^3"), m(1, 3, 0, 1));
        assert_eq!(w("S S"), m(-1, 0, 0, -1));
        assert_eq!(w("1"), Sl2Matrix::IDENTITY);
    }

    #[test]
    fn rejects_non_unimodular() {
        assert!(matches!(
            Sl2Matrix::new(2, 0, 0, 1),
            Err(Error::NotUnimodular { .. })
        ));
    }

    #[test]
    fn decompose_generators() {
        assert_eq!(decompose_to_generators(&Sl2Matrix::S).to_string(), "S");
        assert_eq!(decompose_to_generators(&m(1, 1, 0, 1)).to_string(), "T");
        assert_eq!(
            decompose_to_generators(&Sl2Matrix::MINUS_IDENTITY).to_string(),
            "S S"
        );
        assert!(decompose_to_generators(&Sl2Matrix::IDENTITY).is_empty());
        let target = m(2, -1, -1, 1);
        assert_eq!(evaluate_word_int(&decompose_to_generators(&target)), target);
    }

    #[test]
    fn word_normalisation_merges_t_powers() {
        let w: GeneratorWord = "T^2 T^-2 S T T^4 S S".parse().unwrap();
        assert_eq!(w.to_string(), "S T^5 S S");
        assert!("Q".parse::<GeneratorWord>().is_err());
    }

    #[test]
    fn rho_of_generators() {
        let ising = fixtures::ising();
        let id = rho_of(&Sl2Matrix::IDENTITY, &ising);
        assert!(linalg::max_abs_diff(&id, &linalg::identity(3)) < 1e-15);
        let s = rho_of(&Sl2Matrix::S, &ising);
        assert!(linalg::max_abs_diff(&s, ising.s_matrix()) < 1e-15);
    }

    /// Ceiling-quotient continued fraction: an independent factorization used only
    /// to cross-check that `ρ` does not depend on the chosen word.
    fn ceiling_word(m: &Sl2Matrix) -> GeneratorWord {
        let [mut a, mut b, mut c, mut d] = m.entries();
        let mut tokens = Vec::new();
        while c != 0 {
            let q = -((-a).div_euclid(c));
            let (a1, b1) = (a - q * c, b - q * d);
            (a, b, c, d) = (c, d, -a1, -b1);
            tokens.push(Generator::T(q));
            tokens.push(Generator::S);
        }
        if a == -1 {
            tokens.extend([Generator::S, Generator::S, Generator::T(-b)]);
        } else {
            tokens.push(Generator::T(b));
        }
        GeneratorWord::from_tokens(tokens)
    }

    #[test]
    fn rho_is_independent_of_the_word() {
        let ising = fixtures::ising();
        let target = m(2, -1, -1, 1);
        let w1 = decompose_to_generators(&target);
        let mut w2 = GeneratorWord::from_tokens([Generator::S]);
        for g in ceiling_word(&(Sl2Matrix::S.inverse() * target)).tokens() {
            w2.push(*g);
        }
        assert_eq!(evaluate_word_int(&w2), target);
        assert_ne!(w1, w2);
        let r1 = rho_of_word(&w1, &ising);
        let r2 = rho_of_word(&w2, &ising);
        assert!(linalg::max_abs_diff(&r1, &r2) < 1e-12);
        // S^4 = 1 gives yet another factorisation.
        let mut w3 = GeneratorWord::from_tokens([Generator::S; 4]);
        for g in w1.tokens() {
            w3.push(*g);
        }
        assert!(linalg::max_abs_diff(&rho_of_word(&w3, &ising), &r1) < 1e-12);
    }

    /// Brute-force oracle: scan every pair 0 < a, b < k for both congruences.
    fn oracle(k: i64, r: i64, s: i64) -> Vec<(i64, i64)> {
        let mut out = vec![];
        for a in 1..k {
            for b in 1..k {
                if (s - r * a).rem_euclid(k) == 0 && (-r - s * b).rem_euclid(k) == 0 {
                    out.push((a, b));
                }
            }
        }
        out
    }

    #[test]
    fn build_a_examples() {
        assert_eq!(oracle(2, 1, 1), vec![(1, 1)]);
        let t = build_a(2, 1, 1).unwrap();
        assert_eq!((t.a, t.b, t.matrix), (1, 1, m(2, -1, -1, 1)));

        assert_eq!(oracle(3, 1, 2), vec![(2, 1)]);
        let t = build_a(3, 1, 2).unwrap();
        assert_eq!((t.a, t.b, t.matrix), (2, 1, m(3, -1, -2, 1)));

        assert_eq!(oracle(3, 2, 2), vec![(1, 2)]);
        let t = build_a(3, 2, 2).unwrap();
        assert_eq!((t.a, t.b, t.matrix), (1, 2, m(3, -2, -1, 1)));
    }

    #[test]
    fn build_a_errors() {
        assert!(matches!(build_a(4, 1, 1), Err(Error::NotPrime(4))));
        assert!(matches!(build_a(1, 1, 1), Err(Error::NotPrime(1))));
        assert!(matches!(
            build_a(3, 0, 1),
            Err(Error::OutOfRange { name: "r", .. })
        ));
        assert!(matches!(
            build_a(3, 1, 3),
            Err(Error::OutOfRange { name: "s", .. })
        ));
    }

    #[test]
    fn primes() {
        let ps: Vec<i64> = (0..30).filter(|&k| is_prime(k)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
