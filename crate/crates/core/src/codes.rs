//! Simplex and Hamming codes of an m-sequence, their weight spectra and
//! palindromic subcodes, and the tuple maps `nu` and `tau` relating closed
//! walks on `Z_n` to dual codewords.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitseq::{BitSeq, Doubled};
use crate::error::{Error, Result};
use crate::gf2::{primitive_polynomials, Gf2Poly};
use crate::sequences::MSeq;

/// Largest dimension whose codewords are materialized as a list.
pub const MAX_MATERIALIZED_DIMENSION: usize = 20;
/// Largest dimension whose codewords are streamed (weight spectra etc.).
pub const MAX_STREAMED_DIMENSION: usize = 26;
/// Largest degree for which the simplex code is built.
pub const MAX_SIMPLEX_DEGREE: u32 = 16;
/// Largest degree for which the Hamming basis is built (membership only;
/// enumeration is still bounded by the dimension caps).
pub const MAX_HAMMING_DEGREE: u32 = 12;

/// A binary linear code given by a basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryCode {
    n: usize,
    basis: Vec<BitSeq>,
    /// Reduced basis with the pivot column of each row.
    echelon: Vec<(usize, BitSeq)>,
}

fn lowest_set_bit(w: &BitSeq) -> Option<usize> {
    w.words()
        .iter()
        .enumerate()
        .find(|(_, &x)| x != 0)
        .map(|(i, x)| 64 * i + x.trailing_zeros() as usize)
}

impl BinaryCode {
    /// The span of `generators`; dependent generators are dropped.
    pub fn span(n: usize, generators: impl IntoIterator<Item = BitSeq>) -> Result<Self> {
        let mut code = BinaryCode {
            n,
            basis: Vec::new(),
            echelon: Vec::new(),
        };
        for g in generators {
            if g.len() != n {
                return Err(Error::Domain(format!("generator of length {} in a length-{n} code", g.len())));
            }
            let reduced = code.reduce(g.clone());
            if let Some(p) = lowest_set_bit(&reduced) {
                code.echelon.push((p, reduced));
                code.basis.push(g);
            }
        }
        Ok(code)
    }

    fn reduce(&self, mut w: BitSeq) -> BitSeq {
        for (p, row) in &self.echelon {
            if w.get(*p) {
                w.xor_assign(row);
            }
        }
        w
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BitSeq] {
        &self.basis
    }

    pub fn contains(&self, w: &BitSeq) -> bool {
        w.len() == self.n && self.reduce(w.clone()).is_zero()
    }

    /// Visits every codeword once, in Gray-code order starting from zero.
    pub fn for_each_codeword(&self, mut visit: impl FnMut(&BitSeq)) -> Result<()> {
        let k = self.dimension();
        if k > MAX_STREAMED_DIMENSION {
            return Err(Error::Capability(format!(
                "dimension {k} exceeds the enumeration limit {MAX_STREAMED_DIMENSION}"
            )));
        }
        let mut w = BitSeq::zeros(self.n);
        visit(&w);
        for i in 1u64..(1u64 << k) {
            w.xor_assign(&self.basis[i.trailing_zeros() as usize]);
            visit(&w);
        }
        Ok(())
    }

    /// All `2^k` codewords.
    pub fn codewords(&self) -> Result<Vec<BitSeq>> {
        let k = self.dimension();
        if k > MAX_MATERIALIZED_DIMENSION {
            return Err(Error::Capability(format!(
                "dimension {k} exceeds the materialization limit {MAX_MATERIALIZED_DIMENSION}"
            )));
        }
        let mut out = Vec::with_capacity(1 << k);
        self.for_each_codeword(|w| out.push(w.clone()))?;
        Ok(out)
    }
}

fn check_generator(f: Gf2Poly) -> Result<u32> {
    if !f.is_primitive()? {
        return Err(Error::Domain(format!("{f} is not primitive")));
    }
    Ok(f.degree().expect("primitive polynomials are non-zero"))
}

fn impulse_sequence(f: Gf2Poly, m: u32) -> Result<MSeq> {
    let mut seed = vec![0u8; m as usize];
    seed[0] = 1;
    MSeq::new(f, &seed)
}

/// Zero plus the `n` cyclic shifts of the m-sequence of `f`; dimension `m`.
pub fn simplex_code(f: Gf2Poly) -> Result<BinaryCode> {
    let m = check_generator(f)?;
    if m > MAX_SIMPLEX_DEGREE {
        return Err(Error::Capability(format!("simplex code limited to m <= {MAX_SIMPLEX_DEGREE}")));
    }
    let s = impulse_sequence(f, m)?;
    let n = s.len();
    BinaryCode::span(n, (0..m as usize).map(|a| s.bits().rotated(a)))
}

/// The dual of the simplex code: the cyclic code generated by `f`, with
/// basis `x^i f(x)` for `i < n - m`.
pub fn hamming_code(f: Gf2Poly) -> Result<BinaryCode> {
    let m = check_generator(f)?;
    if m > MAX_HAMMING_DEGREE {
        return Err(Error::Capability(format!("Hamming code limited to m <= {MAX_HAMMING_DEGREE}")));
    }
    let n = (1usize << m) - 1;
    let generators = (0..n - m as usize).map(|i| {
        let mut w = BitSeq::zeros(n);
        for e in f.exponents() {
            w.set(i + e as usize, true);
        }
        w
    });
    BinaryCode::span(n, generators)
}

/// `pi(l)`: number of codewords of weight `l`, for `l = 0..=n`.
pub fn weight_spectrum(code: &BinaryCode) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; code.len() + 1];
    code.for_each_codeword(|w| counts[w.count_ones()] += 1)?;
    Ok(counts)
}

/// Codewords equal to their own reversal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PalindromicSubcode {
    pub words: Vec<BitSeq>,
    pub dimension: usize,
}

/// Enumerates the `2^ceil(n/2)` palindromes of length `n` and keeps the
/// codewords among them; fails unless they form a linear subspace.
pub fn palindromic_subcode(code: &BinaryCode) -> Result<PalindromicSubcode> {
    let n = code.len();
    let free = n.div_ceil(2);
    if free > MAX_STREAMED_DIMENSION {
        return Err(Error::Capability(format!("{free} free palindrome positions exceed the enumeration limit")));
    }
    let mut words = Vec::new();
    for half in 0u64..(1u64 << free) {
        let mut w = BitSeq::zeros(n);
        for i in 0..free {
            if (half >> i) & 1 == 1 {
                w.set(i, true);
                w.set(n - 1 - i, true);
            }
        }
        if code.contains(&w) {
            words.push(w);
        }
    }
    let span = BinaryCode::span(n, words.iter().cloned())?;
    let dimension = span.dimension();
    if words.len() != 1usize << dimension {
        return Err(Error::Verification(format!(
            "{} palindromic codewords do not form a subspace (rank {dimension})",
            words.len()
        )));
    }
    Ok(PalindromicSubcode { words, dimension })
}

/// `(n + 1) / 2 - m`.
pub fn expected_palindromic_dimension(m: u32) -> usize {
    let n = (1usize << m) - 1;
    n.div_ceil(2) - m as usize
}

/// Palindromic subcode of the Hamming code of `f`, checked against
/// `(n + 1) / 2 - m`.
pub fn verify_palindromic_dimension(f: Gf2Poly) -> Result<PalindromicSubcode> {
    let m = check_generator(f)?;
    let sub = palindromic_subcode(&hamming_code(f)?)?;
    let expected = expected_palindromic_dimension(m);
    if sub.dimension != expected {
        return Err(Error::Verification(format!(
            "palindromic subcode of the Hamming code of {f} has dimension {}, expected (n+1)/2 - m = {expected}",
            sub.dimension
        )));
    }
    Ok(sub)
}

/// Primitive polynomials of degree `1..=max_degree` equal to their reciprocal.
pub fn self_reciprocal_primitives(max_degree: u32) -> Result<Vec<Gf2Poly>> {
    let mut out = Vec::new();
    for m in 1..=max_degree {
        out.extend(primitive_polynomials(m)?.into_iter().filter(|f| f.is_self_reciprocal()));
    }
    Ok(out)
}

/// Bit `i` is the parity of the number of occurrences of `i` among
/// `t_q` and `-t_q` mod `n`.
pub fn nu_map(t: &[usize], n: usize) -> BitSeq {
    let mut w = BitSeq::zeros(n);
    for &x in t {
        let x = x % n;
        for i in [x, (n - x) % n] {
            w.set(i, !w.get(i));
        }
    }
    w
}

/// What `tau` evaluates to as a function of the shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauClass {
    Zero,
    /// `tau(a) = phi(a + b)` for all `a`.
    Shift(usize),
}

/// `tau(a) = sum_q phi(t_q + a) + phi(-t_q + a) mod 2`, classified.
pub fn tau_values(s: &MSeq, t: &[usize]) -> Result<(BitSeq, TauClass)> {
    let tau = tau_sequence(s, t);
    let class = classify_tau(s, &Doubled::new(s.bits()), &tau)?;
    Ok((tau, class))
}

fn tau_sequence(s: &MSeq, t: &[usize]) -> BitSeq {
    let n = s.len();
    let mut tau = BitSeq::zeros(n);
    for &x in t {
        let x = x % n;
        tau.xor_assign(&s.bits().rotated(x));
        tau.xor_assign(&s.bits().rotated((n - x) % n));
    }
    tau
}

fn classify_tau(s: &MSeq, doubled: &Doubled, tau: &BitSeq) -> Result<TauClass> {
    if tau.is_zero() {
        return Ok(TauClass::Zero);
    }
    (0..s.len())
        .find(|&b| doubled.rotation_distance(tau, b) == 0)
        .map(TauClass::Shift)
        .ok_or_else(|| Error::NotMSequence(format!("tau is neither zero nor a shift of {}", s.bits())))
}

/// `sum_a (-1)^tau(a)`.
pub fn tau_autocorrelation(tau: &BitSeq) -> i64 {
    tau.len() as i64 - 2 * tau.count_ones() as i64
}

/// Walk `0, t_0, t_0 + t_1, ...` on `Z_n`; true when it returns to 0 and every
/// undirected edge is traversed an even number of times.
pub fn is_even_closed_walk(t: &[usize], n: usize) -> bool {
    let mut pos = 0usize;
    let mut edges = std::collections::HashMap::new();
    for &x in t {
        let next = (pos + x) % n;
        *edges.entry((pos.min(next), pos.max(next))).or_insert(0usize) += 1;
        pos = next;
    }
    pos == 0 && edges.values().all(|c| c % 2 == 0)
}

/// Caps for [`verify_appendix_identities`]: the tuple sweep is exhaustive.
pub const MAX_APPENDIX_TUPLES: u64 = 1 << 24;

/// Outcome of one identity check on one tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub t: Vec<usize>,
    pub identity: String,
    pub detail: String,
}

/// Counts from an exhaustive sweep over tuples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppendixReport {
    pub m: u32,
    pub n: usize,
    pub r: usize,
    /// Whether tuples were restricted to `sum t_q = 0 mod n`.
    pub constrained: bool,
    pub tuples: u64,
    /// Tuples with `nu(t) = 0`.
    pub even_tuples: u64,
    /// `nu(t) != 0` but `tau` identically zero.
    pub gamma_0: u64,
    /// `tau` a non-trivial shift of the sequence.
    pub gamma_g: u64,
    /// (i) `tau = 0` iff `nu(t)` is a Hamming codeword.
    pub dual_membership_pass: u64,
    /// (ii) `sum_a (-1)^tau(a)` is `n` for zero `tau` and `-1` otherwise.
    pub autocorrelation_pass: u64,
    /// (iii) tuples forming an even closed walk, all of which must have `nu = 0`.
    pub even_walks: u64,
    pub even_walk_pass: u64,
    pub violations: u64,
    pub first_counterexample: Option<Counterexample>,
}

impl AppendixReport {
    pub fn pass(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Default)]
struct Tally {
    tuples: u64,
    even: u64,
    gamma_0: u64,
    gamma_g: u64,
    dual: u64,
    autocor: u64,
    walks: u64,
    walk_pass: u64,
    violations: u64,
    first: Option<Counterexample>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.tuples += other.tuples;
        self.even += other.even;
        self.gamma_0 += other.gamma_0;
        self.gamma_g += other.gamma_g;
        self.dual += other.dual;
        self.autocor += other.autocor;
        self.walks += other.walks;
        self.walk_pass += other.walk_pass;
        self.violations += other.violations;
        self.first = self.first.or(other.first);
        self
    }

    fn fail(&mut self, t: &[usize], identity: &str, detail: String) {
        self.violations += 1;
        if self.first.is_none() {
            self.first = Some(Counterexample {
                t: t.to_vec(),
                identity: identity.into(),
                detail,
            });
        }
    }
}

/// Exhaustively checks the `nu`/`tau` identities over all `r`-tuples in
/// `[n]^r`, either restricted to `sum t_q = 0 mod n` (`constrained`, last
/// coordinate solved from the others) or unrestricted.
pub fn verify_appendix_identities(s: &MSeq, r: usize, constrained: bool) -> Result<AppendixReport> {
    let n = s.len();
    let m = s.degree();
    if r == 0 {
        return Err(Error::Domain("tuple length must be at least 1".into()));
    }
    let free = if constrained { r - 1 } else { r };
    let count = (n as u64).checked_pow(free as u32).filter(|&c| c <= MAX_APPENDIX_TUPLES);
    let Some(count) = count else {
        return Err(Error::Capability(format!(
            "n^{free} tuples for n={n} exceeds the exhaustive limit {MAX_APPENDIX_TUPLES}"
        )));
    };
    let dual = hamming_code(s.generator())?;
    let doubled = Doubled::new(s.bits());

    let check = |t: &[usize], tally: &mut Tally| {
        tally.tuples += 1;
        let nu = nu_map(t, n);
        let tau = tau_sequence(s, t);
        let class = match classify_tau(s, &doubled, &tau) {
            Ok(c) => c,
            Err(e) => {
                tally.fail(t, "shift_and_add", e.to_string());
                return;
            }
        };
        match (nu.is_zero(), class) {
            (true, TauClass::Zero) => tally.even += 1,
            (false, TauClass::Zero) => tally.gamma_0 += 1,
            (_, TauClass::Shift(_)) => tally.gamma_g += 1,
        }
        if (class == TauClass::Zero) == dual.contains(&nu) {
            tally.dual += 1;
        } else {
            tally.fail(t, "dual_membership", format!("nu={nu}, tau={class:?}"));
        }
        let sum = tau_autocorrelation(&tau);
        let expected = if class == TauClass::Zero { n as i64 } else { -1 };
        if sum == expected {
            tally.autocor += 1;
        } else {
            tally.fail(t, "autocorrelation", format!("sum={sum}, expected {expected}"));
        }
        if is_even_closed_walk(t, n) {
            tally.walks += 1;
            if nu.is_zero() {
                tally.walk_pass += 1;
            } else {
                tally.fail(t, "even_walk", format!("nu={nu}"));
            }
        }
    };

    let per_lead = |lead: usize| {
        let mut tally = Tally::default();
        let mut t = vec![0usize; r];
        t[0] = lead;
        let inner = count / n as u64;
        for idx in 0..inner {
            let mut rest = idx;
            for slot in t.iter_mut().take(free).skip(1) {
                *slot = (rest % n as u64) as usize;
                rest /= n as u64;
            }
            if constrained {
                let partial: usize = t[..r - 1].iter().sum::<usize>() % n;
                t[r - 1] = (n - partial) % n;
            }
            check(&t, &mut tally);
        }
        tally
    };
    let tally = if free == 0 {
        // r = 1, constrained: only t = (0).
        let mut tally = Tally::default();
        check(&[0], &mut tally);
        tally
    } else {
        (0..n)
            .into_par_iter()
            .map(per_lead)
            .collect::<Vec<_>>()
            .into_iter()
            .fold(Tally::default(), Tally::merge)
    };
    if tally.even + tally.gamma_0 + tally.gamma_g + tally.violations < tally.tuples {
        return Err(Error::Verification("tuple classes do not partition the sweep".into()));
    }
    Ok(AppendixReport {
        m,
        n,
        r,
        constrained,
        tuples: tally.tuples,
        even_tuples: tally.even,
        gamma_0: tally.gamma_0,
        gamma_g: tally.gamma_g,
        dual_membership_pass: tally.dual,
        autocorrelation_pass: tally.autocor,
        even_walks: tally.walks,
        even_walk_pass: tally.walk_pass,
        violations: tally.violations,
        first_counterexample: tally.first,
    })
}
