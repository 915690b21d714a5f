//! LFSR generation of binary m-sequences, Golomb's randomness axioms and
//! the related window/serial/shift-and-add properties, and Berlekamp-Massey.
//!
//! Shift convention: shifting a sequence by `a` means position `i` reads
//! `phi((i + a) mod n)`. Every function in the crate follows it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bitseq::{BitSeq, Doubled};
use crate::error::{Error, Result};
use crate::gf2::Gf2Poly;

/// Largest register length for which a full period is materialized.
pub const MAX_SEQUENCE_DEGREE: u32 = 28;

/// Runs `phi(i+m) = sum_{j<m} f_j phi(i+j) mod 2` from `seed = phi(0..m)`.
///
/// An all-zero seed yields the all-zero stream.
pub fn lfsr_generate(f: Gf2Poly, seed: &[u8], length: usize) -> Result<BitSeq> {
    let m = register_length(f)?;
    if seed.len() != m as usize {
        return Err(Error::Domain(format!(
            "seed has {} bits but the generator has degree {m}",
            seed.len()
        )));
    }
    let mut state = 0u64;
    for (j, &b) in seed.iter().enumerate() {
        match b {
            0 => {}
            1 => state |= 1 << j,
            _ => return Err(Error::Domain(format!("seed bit {j} is {b}, expected 0 or 1"))),
        }
    }
    let taps = f.bits() & ((1u64 << m) - 1);
    let mut out = BitSeq::zeros(length);
    for i in 0..length {
        out.set(i, state & 1 == 1);
        let next = (state & taps).count_ones() as u64 & 1;
        state = (state >> 1) | (next << (m - 1));
    }
    Ok(out)
}

fn register_length(f: Gf2Poly) -> Result<u32> {
    match f.degree() {
        Some(m) if (1..=63).contains(&m) => Ok(m),
        _ => Err(Error::Domain(format!("generator {f} must have degree at least 1"))),
    }
}

/// Parses a seed given as a bit-string (`11010`) or the keyword `ones`.
pub fn parse_seed(text: &str, m: u32) -> Result<Vec<u8>> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("ones") {
        return Ok(vec![1; m as usize]);
    }
    let bits = BitSeq::parse(t)?.to_vec();
    if bits.len() != m as usize {
        return Err(Error::Domain(format!("seed `{t}` has {} bits, expected {m}", bits.len())));
    }
    Ok(bits)
}

/// One period of a binary m-sequence together with its generator and seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MSeq {
    bits: BitSeq,
    generator: Gf2Poly,
    seed: Vec<u8>,
}

impl MSeq {
    /// Generates one period and checks that it really is `2^m - 1` long.
    pub fn new(generator: Gf2Poly, seed: &[u8]) -> Result<Self> {
        let m = register_length(generator)?;
        if m > MAX_SEQUENCE_DEGREE {
            return Err(Error::Capability(format!(
                "sequences of degree {m} exceed the supported {MAX_SEQUENCE_DEGREE}"
            )));
        }
        if !generator.coeff(0) {
            return Err(Error::Domain(format!("generator {generator} has zero constant term")));
        }
        if seed.iter().all(|&b| b == 0) {
            return Err(Error::DegenerateSeed);
        }
        let n = (1usize << m) - 1;
        let bits = lfsr_generate(generator, seed, n)?;
        let observed = minimal_period(&bits);
        if observed != n {
            return Err(Error::PeriodMismatch { expected: n, observed });
        }
        Ok(MSeq {
            bits,
            generator,
            seed: seed.to_vec(),
        })
    }

    /// Wraps an arbitrary bit string without checking anything; used for
    /// negative tests of the axiom battery and for imported sequences.
    pub fn from_bits_unchecked(bits: BitSeq, generator: Gf2Poly) -> Self {
        let m = generator.degree().unwrap_or(0) as usize;
        let seed = bits.iter().take(m).map(u8::from).collect();
        MSeq { bits, generator, seed }
    }

    pub fn bits(&self) -> &BitSeq {
        &self.bits
    }

    pub fn generator(&self) -> Gf2Poly {
        self.generator
    }

    pub fn seed(&self) -> &[u8] {
        &self.seed
    }

    /// Period length n.
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.generator.degree().unwrap_or(0)
    }

    #[inline]
    pub fn phi(&self, i: i64) -> bool {
        self.bits.get_cyclic(i)
    }

    /// The sequence re-based so that position `i` reads `phi(i + shift)`.
    pub fn shifted(&self, shift: usize) -> MSeq {
        MSeq::from_bits_unchecked(self.bits.rotated(shift), self.generator)
    }

    /// `count` concatenated periods.
    pub fn periods(&self, count: usize) -> Vec<u8> {
        let one = self.bits.to_vec();
        one.iter().copied().cycle().take(one.len() * count).collect()
    }

    /// One line of `0`/`1` characters.
    pub fn to_line(&self) -> String {
        self.bits.to_string()
    }
}

/// Smallest p dividing len with `bits` invariant under rotation by p.
fn minimal_period(bits: &BitSeq) -> usize {
    let n = bits.len();
    let doubled = Doubled::new(bits);
    (1..=n)
        .filter(|p| n.is_multiple_of(*p))
        .find(|&p| p == n || doubled.rotation_distance(bits, p) == 0)
        .unwrap_or(n)
}

/// `sum_i (-1)^phi(i)` over one period.
pub fn axiom_balance(s: &MSeq) -> i64 {
    s.len() as i64 - 2 * s.bits().count_ones() as i64
}

/// Per-length run counts over one period (runs wrap around cyclically).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    /// length -> number of blocks (runs of ones)
    pub blocks: BTreeMap<usize, usize>,
    /// length -> number of gaps (runs of zeros)
    pub gaps: BTreeMap<usize, usize>,
    pub total_runs: usize,
    pub pass: bool,
}

impl RunReport {
    pub fn runs_of_length(&self, len: usize) -> usize {
        self.blocks.get(&len).copied().unwrap_or(0) + self.gaps.get(&len).copied().unwrap_or(0)
    }
}

/// Cyclic runs of a bit sequence as (value, length) pairs, starting at the
/// first run boundary. A constant sequence is a single run of length n.
pub fn cyclic_runs(bits: &BitSeq) -> Vec<(bool, usize)> {
    let n = bits.len();
    if n == 0 {
        return Vec::new();
    }
    let Some(start) = (0..n).find(|&i| bits.get(i) != bits.get((i + n - 1) % n)) else {
        return vec![(bits.get(0), n)];
    };
    let mut runs = Vec::new();
    let mut cur = bits.get(start);
    let mut len = 0;
    for k in 0..n {
        let b = bits.get((start + k) % n);
        if b == cur {
            len += 1;
        } else {
            runs.push((cur, len));
            cur = b;
            len = 1;
        }
    }
    runs.push((cur, len));
    runs
}

/// Serial test I: half of the runs have length 1, a quarter length 2, and so
/// on while the indicated count exceeds one, with blocks and gaps equal for
/// each such length.
pub fn axiom_runs(s: &MSeq) -> RunReport {
    let runs = cyclic_runs(s.bits());
    let mut blocks = BTreeMap::new();
    let mut gaps = BTreeMap::new();
    for &(value, len) in &runs {
        *if value { &mut blocks } else { &mut gaps }.entry(len).or_insert(0) += 1;
    }
    let total = runs.len();
    let mut report = RunReport {
        blocks,
        gaps,
        total_runs: total,
        pass: total >= 2,
    };
    let mut len = 1usize;
    // Stop while total / 2^len > 1.
    while len < usize::BITS as usize && total > (1usize << len) {
        let count = report.runs_of_length(len);
        let b = report.blocks.get(&len).copied().unwrap_or(0);
        let g = report.gaps.get(&len).copied().unwrap_or(0);
        if count << len != total || b != g {
            report.pass = false;
            break;
        }
        len += 1;
    }
    report
}

/// `C(a) = sum_i (-1)^(phi(i) + phi(i+a))`.
pub fn autocorrelation(s: &MSeq, shift: usize) -> Result<i64> {
    let n = s.len();
    if shift >= n {
        return Err(Error::Domain(format!("shift {shift} out of range 0..{n}")));
    }
    let doubled = Doubled::new(s.bits());
    Ok(n as i64 - 2 * doubled.rotation_distance(s.bits(), shift) as i64)
}

/// `C(a)` for every shift `a` in `0..n`.
pub fn autocorrelation_all(s: &MSeq) -> Vec<i64> {
    let n = s.len();
    let doubled = Doubled::new(s.bits());
    (0..n)
        .map(|a| n as i64 - 2 * doubled.rotation_distance(s.bits(), a) as i64)
        .collect()
}

/// `table[a] = b` with `phi(i) + phi(i+a) = phi(i+b)` for all i, for
/// `a` in `1..n`; `table[0] = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftAddTable(pub Vec<usize>);

impl ShiftAddTable {
    pub fn get(&self, a: usize) -> usize {
        self.0[a]
    }

    /// True iff `a -> b` permutes `1..n`.
    pub fn is_bijection(&self) -> bool {
        let n = self.0.len();
        let mut seen = vec![false; n];
        for &b in &self.0[1..] {
            if b == 0 || b >= n || seen[b] {
                return false;
            }
            seen[b] = true;
        }
        true
    }
}

/// Finds, for every `a`, the unique shift `b` reproducing `phi + shift_a(phi)`
/// by comparing against all cyclic shifts.
pub fn shift_and_add_table(s: &MSeq) -> Result<ShiftAddTable> {
    let n = s.len();
    let doubled = Doubled::new(s.bits());
    let head_mask = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    let heads: Vec<u64> = (0..n).map(|b| doubled.word_at(b) & head_mask).collect();
    let mut table = vec![0usize; n];
    for a in 1..n {
        let sum = s.bits().xor(&doubled.window(a));
        let head = sum.words().first().copied().unwrap_or(0) & head_mask;
        let mut found = None;
        for b in 1..n {
            if heads[b] == head && doubled.rotation_distance(&sum, b) == 0 {
                if found.is_some() {
                    return Err(Error::NotMSequence(format!(
                        "shift {a} has more than one matching sum shift"
                    )));
                }
                found = Some(b);
            }
        }
        table[a] = found.ok_or_else(|| {
            Error::NotMSequence(format!("phi + shift {a} is not a cyclic shift of phi"))
        })?;
    }
    Ok(ShiftAddTable(table))
}

/// Window property: sliding a width-m window cyclically visits every
/// non-zero m-tuple exactly once.
pub fn window_check(s: &MSeq, m: u32) -> bool {
    let n = s.len();
    if m == 0 || m > 32 || n != (1usize << m) - 1 {
        return false;
    }
    let mut seen = vec![false; 1 << m];
    let mut window = 0usize;
    for j in 0..m as usize {
        window |= usize::from(s.bits().get(j % n)) << j;
    }
    for i in 0..n {
        if window == 0 || seen[window] {
            return false;
        }
        seen[window] = true;
        window = (window >> 1) | (usize::from(s.bits().get((i + m as usize) % n)) << (m - 1));
    }
    true
}

/// Occurrence counts of every k-tuple in one (cyclic) period, indexed by
/// the tuple read as an integer with its first bit least significant.
pub fn tuple_counts(bits: &BitSeq, k: u32) -> Vec<usize> {
    let n = bits.len();
    let mut counts = vec![0usize; 1 << k];
    let mut window = 0usize;
    for j in 0..k as usize {
        window |= usize::from(bits.get(j % n)) << j;
    }
    for i in 0..n {
        counts[window] += 1;
        if k > 0 {
            window = (window >> 1) | (usize::from(bits.get((i + k as usize) % n)) << (k - 1));
        }
    }
    counts
}

/// Serial test II: `max_{b,c} |M(b) - M(c)|` over all k-tuples.
pub fn serial_test(s: &MSeq, k: u32) -> Result<usize> {
    let n = s.len();
    // Bit length of n, i.e. m for n = 2^m - 1.
    let max_k = usize::BITS - n.leading_zeros();
    if k < 1 || k > max_k || k > 24 {
        return Err(Error::Domain(format!("tuple length {k} outside 1..={max_k}")));
    }
    let counts = tuple_counts(s.bits(), k);
    let max = counts.iter().max().copied().unwrap_or(0);
    let min = counts.iter().min().copied().unwrap_or(0);
    Ok(max - min)
}

/// Shortest LFSR generating a bit string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearComplexity {
    /// Register length L.
    pub complexity: usize,
    /// `c_0 = 1, c_1, .., c_L` with `s_i = sum_{j=1}^L c_j s_{i-j}`.
    pub connection: Vec<u8>,
    /// Input shorter than `2L`: the recurrence is only certain for the prefix.
    pub low_confidence: bool,
}

impl LinearComplexity {
    /// The feedback polynomial in generator orientation,
    /// `x^L C(1/x) = sum_j f_j x^j` with `phi(i+L) = sum_{j<L} f_j phi(i+j)`.
    pub fn feedback_poly(&self) -> Option<Gf2Poly> {
        if self.complexity > 63 {
            return None;
        }
        let l = self.complexity;
        let bits = self
            .connection
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c == 1)
            .fold(0u64, |acc, (j, _)| acc | 1 << (l - j));
        Some(Gf2Poly::from_bits(bits))
    }

    /// Regenerates `len` bits from the first L input bits.
    pub fn reproduce(&self, prefix: &[u8], len: usize) -> Vec<u8> {
        let l = self.complexity;
        let mut out: Vec<u8> = prefix.iter().take(l).copied().collect();
        while out.len() < len {
            let i = out.len();
            let bit = (1..=l).fold(0u8, |acc, j| acc ^ (self.connection[j] & out[i - j]));
            out.push(bit);
        }
        out.truncate(len);
        out
    }
}

/// Berlekamp-Massey over GF(2).
pub fn berlekamp_massey(bits: &[u8]) -> LinearComplexity {
    let n = bits.len();
    let mut c = vec![0u8; n + 1];
    let mut b = vec![0u8; n + 1];
    c[0] = 1;
    b[0] = 1;
    let mut l = 0usize;
    let mut m = 1usize;
    for i in 0..n {
        let mut d = bits[i] & 1;
        for j in 1..=l {
            d ^= c[j] & bits[i - j];
        }
        if d == 0 {
            m += 1;
        } else if 2 * l <= i {
            let t = c.clone();
            for j in 0..=n - m {
                c[j + m] ^= b[j];
            }
            l = i + 1 - l;
            b = t;
            m = 1;
        } else {
            for j in 0..=n - m {
                c[j + m] ^= b[j];
            }
            m += 1;
        }
    }
    c.truncate(l + 1);
    LinearComplexity {
        complexity: l,
        connection: c,
        low_confidence: n < 2 * l,
    }
}

/// Outcome of the full axiom/property battery on one sequence.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BatteryReport {
    pub generator: String,
    pub seed: String,
    pub n: usize,
    pub m: u32,
    pub balance: i64,
    pub balance_pass: bool,
    pub runs: RunReport,
    pub autocorrelation_two_valued: bool,
    pub autocorrelation_values: Vec<i64>,
    pub window_pass: bool,
    /// `(k, max discrepancy)` for k in 1..=m
    pub serial: Vec<(u32, usize)>,
    pub serial_pass: bool,
    pub shift_and_add_bijection: bool,
    pub linear_complexity: usize,
    pub linear_complexity_pass: bool,
    /// `2 log2(n+1) - 1` bits: generator (m-1 free coefficients) plus seed.
    pub description_bits: u32,
}

impl BatteryReport {
    pub fn pass(&self) -> bool {
        self.balance_pass
            && self.runs.pass
            && self.autocorrelation_two_valued
            && self.window_pass
            && self.serial_pass
            && self.shift_and_add_bijection
            && self.linear_complexity_pass
    }
}

/// Runs every axiom and property check on an m-sequence.
pub fn run_battery(s: &MSeq) -> BatteryReport {
    let n = s.len();
    let m = s.degree();
    let balance = axiom_balance(s);
    let runs = axiom_runs(s);
    let ac = autocorrelation_all(s);
    let mut distinct: Vec<i64> = ac.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let two_valued = ac.first() == Some(&(n as i64)) && ac[1..].iter().all(|&c| c == -1);
    let serial: Vec<(u32, usize)> = (1..=m)
        .filter_map(|k| serial_test(s, k).ok().map(|d| (k, d)))
        .collect();
    let serial_pass = serial.len() == m as usize && serial.iter().all(|&(_, d)| d <= 1);
    let sat = shift_and_add_table(s).map(|t| t.is_bijection()).unwrap_or(false);
    let lc = berlekamp_massey(&s.periods(2));
    BatteryReport {
        generator: s.generator().to_string(),
        seed: s.seed().iter().map(|b| b.to_string()).collect(),
        n,
        m,
        balance,
        balance_pass: balance == -1,
        runs,
        autocorrelation_two_valued: two_valued,
        autocorrelation_values: distinct,
        window_pass: window_check(s, m),
        serial,
        serial_pass,
        shift_and_add_bijection: sat,
        linear_complexity: lc.complexity,
        linear_complexity_pass: lc.complexity == m as usize,
        description_bits: 2 * m - 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Gf2Poly {
        s.parse().unwrap()
    }

    fn m3() -> MSeq {
        MSeq::new(p("x^3+x+1"), &[1, 0, 0]).unwrap()
    }

    #[test]
    fn lfsr_examples() {
        assert_eq!(lfsr_generate(p("x^3+x+1"), &[1, 0, 0], 7).unwrap().to_vec(), vec![1, 0, 0, 1, 0, 1, 1]);
        assert_eq!(lfsr_generate(p("x^2+x+1"), &[0, 1], 6).unwrap().to_vec(), vec![0, 1, 1, 0, 1, 1]);
        assert!(lfsr_generate(p("x^5+x^2+1"), &[0; 5], 40).unwrap().is_zero());
    }

    #[test]
    fn lfsr_obeys_recurrence() {
        let f = p("x^8+x^4+x^3+x^2+1");
        let s = lfsr_generate(f, &[1, 0, 1, 1, 0, 0, 1, 0], 600).unwrap().to_vec();
        for i in 0..600 - 8 {
            let rhs = (0..8).fold(0, |acc, j| acc ^ (u8::from(f.coeff(j)) & s[i + j as usize]));
            assert_eq!(s[i + 8], rhs);
        }
    }

    #[test]
    fn msequence_examples() {
        assert_eq!(m3().to_line(), "1001011");
        let s5 = MSeq::new(p("x^5+x^2+1"), &[1, 1, 0, 1, 0]).unwrap();
        assert_eq!(s5.len(), 31);
        let s2 = MSeq::new(p("x^2+x+1"), &[1, 1]).unwrap();
        assert_eq!(s2.to_line(), "110");
    }

    #[test]
    fn msequence_errors() {
        assert!(matches!(MSeq::new(p("x^3+x+1"), &[0, 0, 0]), Err(Error::DegenerateSeed)));
        match MSeq::new(p("x^4+x^3+x^2+x+1"), &[1, 0, 0, 0]) {
            Err(Error::PeriodMismatch { expected: 15, observed: 5 }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn balance_examples() {
        assert_eq!(axiom_balance(&m3()), -1);
        assert_eq!(axiom_balance(&MSeq::new(p("x^2+x+1"), &[1, 1]).unwrap()), -1);
        let zeros = MSeq::from_bits_unchecked(BitSeq::zeros(7), p("x^3+x+1"));
        assert_eq!(axiom_balance(&zeros), 7);
    }

    #[test]
    fn runs_examples() {
        let r = axiom_runs(&m3());
        assert!(r.pass);
        assert_eq!(r.total_runs, 4);
        // 1001011 cyclically: gap 00, block 1, gap 0, block 111 (wraps).
        assert_eq!(r.gaps.get(&2), Some(&1));
        assert_eq!(r.blocks.get(&3), Some(&1));
        let s5 = MSeq::new(p("x^5+x^2+1"), &[1, 1, 0, 1, 0]).unwrap();
        assert!(axiom_runs(&s5).pass);
        let alt = MSeq::from_bits_unchecked(BitSeq::parse("1010101").unwrap(), p("x^3+x+1"));
        assert!(!axiom_runs(&alt).pass);
        let ones = MSeq::from_bits_unchecked(BitSeq::parse("1111111").unwrap(), p("x^3+x+1"));
        assert!(!axiom_runs(&ones).pass);
    }

    #[test]
    fn autocorrelation_examples() {
        assert_eq!(autocorrelation(&m3(), 0).unwrap(), 7);
        assert_eq!(autocorrelation(&m3(), 3).unwrap(), -1);
        assert_eq!(autocorrelation(&MSeq::new(p("x^2+x+1"), &[1, 1]).unwrap(), 1).unwrap(), -1);
        assert!(autocorrelation(&m3(), 7).is_err());
    }

    #[test]
    fn shift_and_add_examples() {
        let t = shift_and_add_table(&m3()).unwrap();
        assert_eq!(t.get(1), 3);
        assert!(t.is_bijection());
        let t2 = shift_and_add_table(&MSeq::new(p("x^2+x+1"), &[1, 1]).unwrap()).unwrap();
        assert_eq!(t2.get(1), 2);
        let bad = MSeq::from_bits_unchecked(BitSeq::parse("1101000").unwrap(), p("x^3+x+1"));
        assert!(matches!(shift_and_add_table(&bad), Err(Error::NotMSequence(_))));
    }

    #[test]
    fn window_examples() {
        assert!(window_check(&m3(), 3));
        assert!(window_check(&MSeq::new(p("x^2+x+1"), &[1, 1]).unwrap(), 2));
        let ones = MSeq::from_bits_unchecked(BitSeq::parse("1111111").unwrap(), p("x^3+x+1"));
        assert!(!window_check(&ones, 3));
    }

    #[test]
    fn serial_examples() {
        assert_eq!(serial_test(&m3(), 1).unwrap(), 1);
        assert_eq!(serial_test(&m3(), 3).unwrap(), 1);
        assert_eq!(serial_test(&m3(), 2).unwrap(), 1);
        assert!(serial_test(&m3(), 0).is_err());
        assert!(serial_test(&m3(), 3).is_ok());
        assert!(serial_test(&m3(), 4).is_err());
    }

    #[test]
    fn berlekamp_massey_examples() {
        let lc = berlekamp_massey(&m3().periods(2));
        assert_eq!(lc.complexity, 3);
        assert_eq!(lc.feedback_poly(), Some(p("x^3+x+1")));
        assert!(!lc.low_confidence);
        assert_eq!(berlekamp_massey(&[0; 20]).complexity, 0);
        let s = MSeq::new(p("x^10+x^3+1"), &[1; 10]).unwrap();
        let two = s.periods(2);
        let lc = berlekamp_massey(&two);
        assert_eq!(lc.complexity, 10);
        assert_eq!(lc.reproduce(&two, two.len()), two);
    }

    #[test]
    fn berlekamp_massey_flags_short_input() {
        let lc = berlekamp_massey(&[0, 0, 0, 1]);
        assert_eq!(lc.complexity, 4);
        assert!(lc.low_confidence);
        assert_eq!(lc.reproduce(&[0, 0, 0, 1], 4), vec![0, 0, 0, 1]);
    }

    #[test]
    fn battery_passes_on_every_shift() {
        let s = MSeq::new(p("x^5+x^2+1"), &[1, 1, 0, 1, 0]).unwrap();
        for k in 0..s.len() {
            assert!(run_battery(&s.shifted(k)).pass(), "shift {k}");
        }
    }

    #[test]
    fn seed_keyword() {
        assert_eq!(parse_seed("ones", 4).unwrap(), vec![1, 1, 1, 1]);
        assert_eq!(parse_seed("11010", 5).unwrap(), vec![1, 1, 0, 1, 0]);
        assert!(parse_seed("110", 5).is_err());
    }
}
