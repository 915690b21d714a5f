//! Polynomials over GF(2) packed into a machine word.
//!
//! Bit `j` of the packed word is the coefficient of `x^j`, so `0b1011`
//! is `x^3 + x + 1`. Storage holds degrees up to 63; primitivity testing
//! is limited to degree 32 so that the period `2^m - 1` stays well inside
//! a `u64`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest degree accepted by [`Gf2Poly::is_primitive`].
pub const MAX_PRIMITIVE_DEGREE: u32 = 32;

/// A binary polynomial.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Gf2Poly(u64);

impl Gf2Poly {
    pub const ZERO: Gf2Poly = Gf2Poly(0);
    pub const ONE: Gf2Poly = Gf2Poly(1);
    pub const X: Gf2Poly = Gf2Poly(2);

    pub const fn from_bits(bits: u64) -> Self {
        Gf2Poly(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// Builds a polynomial from the exponents of its monomials.
    pub fn from_exponents(exponents: &[u32]) -> Result<Self> {
        let mut bits = 0u64;
        for &e in exponents {
            if e > 63 {
                return Err(Error::Capability(format!("exponent {e} exceeds 63")));
            }
            bits ^= 1 << e;
        }
        Ok(Gf2Poly(bits))
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(self) -> Option<u32> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros())
    }

    pub fn coeff(self, j: u32) -> bool {
        j < 64 && (self.0 >> j) & 1 == 1
    }

    /// Exponents with non-zero coefficient, descending.
    pub fn exponents(self) -> Vec<u32> {
        (0..64).rev().filter(|&j| self.coeff(j)).collect()
    }

    pub fn weight(self) -> u32 {
        self.0.count_ones()
    }

    /// `a * b mod modulus`.
    pub fn mul_mod(self, other: Gf2Poly, modulus: Gf2Poly) -> Result<Gf2Poly> {
        let m = modulus
            .degree()
            .ok_or_else(|| Error::Domain("zero modulus".into()))?;
        Ok(Gf2Poly(mul_mod_raw(reduce(self.0, modulus.0, m), reduce(other.0, modulus.0, m), modulus.0, m)))
    }

    /// `self mod modulus`.
    pub fn rem(self, modulus: Gf2Poly) -> Result<Gf2Poly> {
        let m = modulus
            .degree()
            .ok_or_else(|| Error::Domain("zero modulus".into()))?;
        Ok(Gf2Poly(reduce(self.0, modulus.0, m)))
    }

    /// `self^exp mod modulus` by square-and-multiply.
    pub fn pow_mod(self, exp: u64, modulus: Gf2Poly) -> Result<Gf2Poly> {
        let m = modulus
            .degree()
            .ok_or_else(|| Error::Domain("zero modulus".into()))?;
        Ok(Gf2Poly(pow_mod_raw(reduce(self.0, modulus.0, m), exp, modulus.0, m)))
    }

    pub fn gcd(self, other: Gf2Poly) -> Gf2Poly {
        let (mut a, mut b) = (self.0, other.0);
        while b != 0 {
            let db = 63 - b.leading_zeros();
            a = reduce(a, b, db);
            std::mem::swap(&mut a, &mut b);
        }
        Gf2Poly(a)
    }

    /// Rabin's test: `x^(2^m) = x (mod f)` and `gcd(x^(2^(m/p)) - x, f) = 1`
    /// for every prime `p | m`.
    pub fn is_irreducible(self) -> bool {
        let Some(m) = self.degree() else {
            return false;
        };
        if m == 0 {
            return false;
        }
        if m == 1 {
            return true;
        }
        let f = self.0;
        let x = 2u64;
        // x^(2^k) mod f for k = 0..=m via repeated squaring.
        let mut frob = Vec::with_capacity(m as usize + 1);
        let mut cur = reduce(x, f, m);
        frob.push(cur);
        for _ in 0..m {
            cur = mul_mod_raw(cur, cur, f, m);
            frob.push(cur);
        }
        if frob[m as usize] != reduce(x, f, m) {
            return false;
        }
        prime_divisors(m as u64).into_iter().all(|p| {
            let k = (m as u64 / p) as usize;
            let diff = frob[k] ^ reduce(x, f, m);
            Gf2Poly(diff).gcd(self) == Gf2Poly::ONE
        })
    }

    /// True iff `self` is irreducible and `x` has multiplicative order
    /// `2^m - 1` modulo `self`.
    pub fn is_primitive(self) -> Result<bool> {
        let m = match self.degree() {
            Some(m) if (1..=MAX_PRIMITIVE_DEGREE).contains(&m) => m,
            Some(m) => {
                return Err(Error::Capability(format!(
                    "primitivity test supports degree 1..={MAX_PRIMITIVE_DEGREE}, got {m}"
                )))
            }
            None => return Err(Error::Capability("zero polynomial has no degree".into())),
        };
        if !self.coeff(0) || !self.is_irreducible() {
            return Ok(false);
        }
        let order = (1u64 << m) - 1;
        if order == 1 {
            return Ok(Gf2Poly::X.rem(self)? == Gf2Poly::ONE);
        }
        for (p, _) in factorize_u64(order) {
            if Gf2Poly::X.pow_mod(order / p, self)? == Gf2Poly::ONE {
                return Ok(false);
            }
        }
        Ok(Gf2Poly::X.pow_mod(order, self)? == Gf2Poly::ONE)
    }

    /// `x^deg(f) * f(1/x)`: the coefficient string reversed.
    pub fn reciprocal(self) -> Gf2Poly {
        match self.degree() {
            None => Gf2Poly::ZERO,
            Some(d) => Gf2Poly(self.0.reverse_bits() >> (63 - d)),
        }
    }

    pub fn is_self_reciprocal(self) -> bool {
        !self.is_zero() && self.reciprocal() == self
    }
}

fn reduce(mut a: u64, f: u64, m: u32) -> u64 {
    while a != 0 {
        let da = 63 - a.leading_zeros();
        if da < m {
            break;
        }
        a ^= f << (da - m);
    }
    a
}

// Both operands already reduced; the running product never exceeds degree m.
fn mul_mod_raw(a: u64, b: u64, f: u64, m: u32) -> u64 {
    let mut acc = 0u64;
    let top = 1u64 << m;
    for j in (0..m).rev() {
        acc <<= 1;
        if acc & top != 0 {
            acc ^= f;
        }
        if (b >> j) & 1 == 1 {
            acc ^= a;
        }
    }
    acc
}

fn pow_mod_raw(base: u64, mut exp: u64, f: u64, m: u32) -> u64 {
    let mut result = reduce(1, f, m);
    let mut b = base;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod_raw(result, b, f, m);
        }
        b = mul_mod_raw(b, b, f, m);
        exp >>= 1;
    }
    result
}

impl fmt::Display for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .exponents()
            .into_iter()
            .map(|e| match e {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{e}"),
            })
            .collect();
        f.write_str(&terms.join("+"))
    }
}

impl fmt::Debug for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Poly({self})")
    }
}

impl FromStr for Gf2Poly {
    type Err = Error;

    /// Accepts `x^13+x^8+x^5+x^3+1`-style sums of monomials or a `0x`
    /// hexadecimal bitmask. Whitespace is ignored.
    fn from_str(text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::parse(text, "empty polynomial"));
        }
        if let Some(hex) = compact
            .strip_prefix("0x")
            .or_else(|| compact.strip_prefix("0X"))
        {
            return u64::from_str_radix(hex, 16)
                .map(Gf2Poly)
                .map_err(|e| Error::parse(&compact, e.to_string()));
        }
        if compact == "0" {
            return Ok(Gf2Poly::ZERO);
        }
        let mut bits = 0u64;
        for token in compact.split('+') {
            let exp = parse_monomial(token)?;
            if bits & (1 << exp) != 0 {
                return Err(Error::parse(token, "duplicate monomial"));
            }
            bits |= 1 << exp;
        }
        Ok(Gf2Poly(bits))
    }
}

fn parse_monomial(token: &str) -> Result<u32> {
    match token {
        "" => Err(Error::parse(token, "empty term")),
        "1" => Ok(0),
        "x" | "X" => Ok(1),
        _ => {
            let rest = token
                .strip_prefix("x^")
                .or_else(|| token.strip_prefix("X^"))
                .ok_or_else(|| Error::parse(token, "expected `1`, `x` or `x^k`"))?;
            let exp: u32 = rest
                .parse()
                .map_err(|_| Error::parse(token, "exponent is not a non-negative integer"))?;
            if exp > 63 {
                return Err(Error::parse(token, "exponent exceeds 63"));
            }
            Ok(exp)
        }
    }
}

impl Serialize for Gf2Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Gf2Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Every primitive polynomial of degree `m`, ascending by bitmask.
pub fn primitive_polynomials(m: u32) -> Result<Vec<Gf2Poly>> {
    if !(1..=MAX_PRIMITIVE_DEGREE).contains(&m) {
        return Err(Error::Capability(format!("degree {m} out of range")));
    }
    let top = 1u64 << m;
    let mut out = Vec::new();
    // Constant term must be 1; an even number of terms means x+1 divides f.
    let mut mid = 0u64;
    while mid < top >> 1 {
        let f = Gf2Poly(top | (mid << 1) | 1);
        if (m == 1 || f.weight() % 2 == 1) && f.is_primitive()? {
            out.push(f);
        }
        mid += 1;
    }
    Ok(out)
}

/// A fixed low-weight primitive polynomial for each degree 2..=32.
///
/// Degrees 13 and 14 use `x^13+x^8+x^5+x^3+1` and `x^14+x^12+x^11+x+1`.
pub fn default_primitive(m: u32) -> Result<Gf2Poly> {
    const TABLE: [&[u32]; 31] = [
        &[2, 1, 0],
        &[3, 1, 0],
        &[4, 1, 0],
        &[5, 2, 0],
        &[6, 1, 0],
        &[7, 1, 0],
        &[8, 4, 3, 2, 0],
        &[9, 4, 0],
        &[10, 3, 0],
        &[11, 2, 0],
        &[12, 6, 4, 1, 0],
        &[13, 8, 5, 3, 0],
        &[14, 12, 11, 1, 0],
        &[15, 1, 0],
        &[16, 12, 3, 1, 0],
        &[17, 3, 0],
        &[18, 7, 0],
        &[19, 5, 2, 1, 0],
        &[20, 3, 0],
        &[21, 2, 0],
        &[22, 1, 0],
        &[23, 5, 0],
        &[24, 7, 2, 1, 0],
        &[25, 3, 0],
        &[26, 6, 2, 1, 0],
        &[27, 5, 2, 1, 0],
        &[28, 3, 0],
        &[29, 2, 0],
        &[30, 23, 2, 1, 0],
        &[31, 3, 0],
        &[32, 22, 2, 1, 0],
    ];
    match m {
        1 => Ok(Gf2Poly(0b11)),
        2..=32 => Gf2Poly::from_exponents(TABLE[(m - 2) as usize]),
        _ => Err(Error::Capability(format!("no primitive polynomial table entry for degree {m}"))),
    }
}

/// Prime factorization of `value` (>= 2), primes ascending.
///
/// Trial division up to `2^16`, then Miller-Rabin plus Pollard's rho on
/// whatever cofactor remains.
pub fn factorize_u64(value: u64) -> Vec<(u64, u32)> {
    let mut factors: Vec<u64> = Vec::new();
    let mut rest = value;
    if rest < 2 {
        return Vec::new();
    }
    let mut d = 2u64;
    while d <= 1 << 16 && d * d <= rest {
        while rest.is_multiple_of(d) {
            factors.push(d);
            rest /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        split_large(rest, &mut factors);
    }
    factors.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in factors {
        match out.last_mut() {
            Some((q, k)) if *q == p => *k += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

fn prime_divisors(value: u64) -> Vec<u64> {
    factorize_u64(value).into_iter().map(|(p, _)| p).collect()
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    split_large(d, out);
    split_large(n / d, out);
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod_u64(r, b, m);
        }
        b = mul_mod_u64(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Brent's variant; n is odd and composite.
fn pollard_rho(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod_u64(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
