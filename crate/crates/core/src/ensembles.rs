//! Matrix families: the m-sequence circulant `A_n(a)`, the Toeplitz variant
//! `D_n`, Wigner sign matrices, random symmetric circulants, Paley graphs
//! and tridiagonal Hermite matrices.
//!
//! Random families draw from a ChaCha8 generator seeded with the master seed
//! and switched to the stream of the member index, so a member is the same
//! whether an ensemble is swept serially or in parallel.

use std::fmt;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{is_prime_u64, Gf2Poly};
use crate::sequences::{parse_seed, MSeq};

/// `1 / (2 sqrt(n))`, the scale that puts the semicircle on `[-1, 1]`.
pub fn canonical_scale(n: usize) -> f64 {
    0.5 / (n as f64).sqrt()
}

/// The generator for member `stream` of an ensemble with master seed `seed`.
pub fn member_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Symmetric circulant sign matrix: entry `(i, j) = scale * first_row[(j - i) mod n]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymCirculant {
    first_row: Vec<i8>,
    scale: f64,
}

impl SymCirculant {
    pub fn new(first_row: Vec<i8>, scale: f64) -> Result<Self> {
        if first_row.is_empty() {
            return Err(Error::Domain("empty first row".into()));
        }
        if first_row.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::Domain("first row entries must be +1 or -1".into()));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Domain(format!("scale {scale} must be positive")));
        }
        let c = SymCirculant { first_row, scale };
        if !c.is_palindromic() {
            return Err(Error::Domain("first row is not palindromic; matrix would not be symmetric".into()));
        }
        Ok(c)
    }

    pub(crate) fn new_unchecked(first_row: Vec<i8>, scale: f64) -> Self {
        SymCirculant { first_row, scale }
    }

    pub fn n(&self) -> usize {
        self.first_row.len()
    }

    pub fn first_row(&self) -> &[i8] {
        &self.first_row
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `row[j] = row[n - j]` for `1 <= j < n`.
    pub fn is_palindromic(&self) -> bool {
        let n = self.n();
        (1..n).all(|j| self.first_row[j] == self.first_row[n - j])
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let n = self.n();
        self.scale * f64::from(self.first_row[(j + n - i % n) % n])
    }

    pub fn negated(&self) -> SymCirculant {
        SymCirculant {
            first_row: self.first_row.iter().map(|v| -v).collect(),
            scale: self.scale,
        }
    }

    pub fn to_dense(&self) -> DenseSym {
        DenseSym::from_fn(self.n(), |i, j| self.entry(i, j))
    }

    /// Single-line export: `scale` followed by the first row, comma separated.
    pub fn to_line(&self) -> String {
        let mut out = format!("{:e}", self.scale);
        for v in &self.first_row {
            out.push(',');
            out.push_str(if *v > 0 { "1" } else { "-1" });
        }
        out
    }

    pub fn from_line(line: &str) -> Result<Self> {
        let mut fields = line.trim().split(',');
        let scale: f64 = fields
            .next()
            .ok_or_else(|| Error::parse(line, "missing scale"))?
            .trim()
            .parse()
            .map_err(|_| Error::parse(line, "bad scale"))?;
        let row = fields
            .map(|f| match f.trim() {
                "1" | "+1" => Ok(1),
                "-1" => Ok(-1),
                other => Err(Error::parse(other, "expected 1 or -1")),
            })
            .collect::<Result<Vec<i8>>>()?;
        SymCirculant::new(row, scale)
    }
}

/// Real symmetric matrix in packed lower-triangular storage: row `i` holds
/// columns `0..=i` at offset `i (i + 1) / 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseSym {
    n: usize,
    packed: Vec<f64>,
}

impl DenseSym {
    pub fn zeros(n: usize) -> Self {
        DenseSym {
            n,
            packed: vec![0.0; n * (n + 1) / 2],
        }
    }

    /// Builds from `f(i, j)` evaluated on the lower triangle `j <= i`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut packed = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..=i {
                packed.push(f(i, j));
            }
        }
        DenseSym { n, packed }
    }

    /// From a full row-major matrix; fails unless it is exactly symmetric.
    pub fn from_full(n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Domain(format!("expected {} entries, got {}", n * n, data.len())));
        }
        for i in 0..n {
            for j in 0..i {
                if data[i * n + j] != data[j * n + i] {
                    return Err(Error::Domain(format!("entry ({i},{j}) differs from ({j},{i})")));
                }
            }
        }
        Ok(DenseSym::from_fn(n, |i, j| data[i * n + j]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn packed(&self) -> &[f64] {
        &self.packed
    }


    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        self.packed[r * (r + 1) / 2 + c]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        self.packed[r * (r + 1) / 2 + c] = value;
    }

    pub fn to_full(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = self.entry(i, j);
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.entry(i, i)).sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..=i {
                let v = self.entry(i, j);
                s += if i == j { v * v } else { 2.0 * v * v };
            }
        }
        s
    }

    pub fn negated(&self) -> DenseSym {
        DenseSym {
            n: self.n,
            packed: self.packed.iter().map(|v| -v).collect(),
        }
    }

    /// Row-per-line CSV of the full matrix.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format!("{:e}", self.entry(i, j))).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Symmetric tridiagonal matrix; eigenvalues are reported multiplied by `scale`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriDiag {
    pub diag: Vec<f64>,
    pub subdiag: Vec<f64>,
    pub scale: f64,
}

impl TriDiag {
    pub fn new(diag: Vec<f64>, subdiag: Vec<f64>, scale: f64) -> Result<Self> {
        if diag.is_empty() || subdiag.len() + 1 != diag.len() {
            return Err(Error::Domain(format!(
                "tridiagonal needs n >= 1 diagonal and n - 1 off-diagonal values, got {} and {}",
                diag.len(),
                subdiag.len()
            )));
        }
        Ok(TriDiag { diag, subdiag, scale })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> DenseSym {
        DenseSym::from_fn(self.n(), |i, j| {
            let v = if i == j {
                self.diag[i]
            } else if i == j + 1 {
                self.subdiag[j]
            } else {
                0.0
            };
            v * self.scale
        })
    }
}

/// A realized matrix of any family.
#[derive(Clone, Debug, PartialEq)]
pub enum Matrix {
    Circulant(SymCirculant),
    Dense(DenseSym),
    Tridiag(TriDiag),
}

impl Matrix {
    pub fn n(&self) -> usize {
        match self {
            Matrix::Circulant(c) => c.n(),
            Matrix::Dense(d) => d.n(),
            Matrix::Tridiag(t) => t.n(),
        }
    }

    pub fn to_dense(&self) -> DenseSym {
        match self {
            Matrix::Circulant(c) => c.to_dense(),
            Matrix::Dense(d) => d.clone(),
            Matrix::Tridiag(t) => t.to_dense(),
        }
    }
}

/// `sign * (1 / (2 sqrt n)) * (-1)^(phi(i-j+a) + phi(j-i+a))`.
pub fn build_pseudo(s: &MSeq, shift: usize, sign: i8) -> Result<SymCirculant> {
    let n = s.len();
    if shift >= n {
        return Err(Error::Domain(format!("shift {shift} out of range 0..{n}")));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::Domain(format!("sign must be +1 or -1, got {sign}")));
    }
    let a = shift as i64;
    let row = (0..n as i64)
        .map(|d| {
            let parity = s.phi(a - d) ^ s.phi(a + d);
            if parity {
                -sign
            } else {
                sign
            }
        })
        .collect();
    Ok(SymCirculant::new_unchecked(row, canonical_scale(n)))
}

/// `(1 / (2 sqrt n)) * (-1)^phi(|i - j|)`. Symmetric Toeplitz; returned as a
/// circulant only in the (non-generic) case where its first row is palindromic.
pub fn build_dn(s: &MSeq) -> Matrix {
    let n = s.len();
    let row: Vec<i8> = (0..n).map(|d| if s.bits().get(d) { -1 } else { 1 }).collect();
    let scale = canonical_scale(n);
    let circ = SymCirculant::new_unchecked(row, scale);
    if circ.is_palindromic() {
        return Matrix::Circulant(circ);
    }
    let row = circ.first_row;
    Matrix::Dense(DenseSym::from_fn(n, |i, j| scale * f64::from(row[i - j])))
}

/// Wigner sign matrix: independent equiprobable `±1/(2 sqrt n)` on and
/// above the diagonal.
pub fn sample_wigner(n: usize, rng: &mut impl Rng) -> Result<DenseSym> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let scale = canonical_scale(n);
    Ok(DenseSym::from_fn(n, |_, _| if rng.random::<bool>() { scale } else { -scale }))
}

/// Symmetric circulant with `(n + 1) / 2` independent Rademacher parameters.
pub fn sample_random_circulant(n: usize, rng: &mut impl Rng) -> Result<SymCirculant> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::Domain(format!("random circulant needs odd n >= 3, got {n}")));
    }
    let half = (n - 1) / 2;
    let mut row = vec![0i8; n];
    for j in 0..=half {
        let v = if rng.random::<bool>() { 1 } else { -1 };
        row[j] = v;
        if j > 0 {
            row[n - j] = v;
        }
    }
    Ok(SymCirculant::new_unchecked(row, canonical_scale(n)))
}

/// Non-zero quadratic residues modulo a prime `q`.
pub fn quadratic_residues(q: u64) -> Vec<bool> {
    let mut qr = vec![false; q as usize];
    for x in 1..q {
        qr[((x * x) % q) as usize] = true;
    }
    qr
}

/// Paley graph on `Z_q`, lifted to signs by `0 -> +1, 1 -> -1`.
pub fn paley_matrix(q: u64, scaled: bool) -> Result<SymCirculant> {
    if !is_prime_u64(q) {
        return Err(Error::Domain(format!("q = {q} is not prime")));
    }
    if q % 4 != 1 {
        return Err(Error::Domain(format!("q = {q} is not 1 mod 4")));
    }
    let qr = quadratic_residues(q);
    let row = qr.iter().map(|&adj| if adj { -1 } else { 1 }).collect();
    let scale = if scaled { canonical_scale(q as usize) } else { 1.0 };
    Ok(SymCirculant::new_unchecked(row, scale))
}

/// Subdiagonal law for the tridiagonal Hermite ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TridiagVariant {
    /// Independent chi values with degrees of freedom `n-1, n-2, .., 1`.
    Standard,
    /// Independent chi-squared(n-1) values. Spectra of this variant do not
    /// stay in `[-1, 1]` after the `1/(2 sqrt n)` scaling.
    PaperLiteral,
}

/// Diagonal i.i.d. `N(0, 2)`, subdiagonal per `variant`; scale `1/(2 sqrt n)`.
pub fn sample_tridiag_hermite(n: usize, rng: &mut impl Rng, variant: TridiagVariant) -> Result<TriDiag> {
    if n < 2 {
        return Err(Error::Domain(format!("tridiagonal Hermite needs n >= 2, got {n}")));
    }
    let normal = Normal::new(0.0, std::f64::consts::SQRT_2).expect("valid normal");
    let diag: Vec<f64> = (0..n).map(|_| normal.sample(rng)).collect();
    let subdiag: Vec<f64> = match variant {
        TridiagVariant::Standard => (1..n)
            .map(|k| {
                let dof = (n - k) as f64;
                ChiSquared::new(dof).expect("positive dof").sample(rng).sqrt()
            })
            .collect(),
        TridiagVariant::PaperLiteral => {
            let chi2 = ChiSquared::new((n - 1) as f64).expect("positive dof");
            (1..n).map(|_| chi2.sample(rng)).collect()
        }
    };
    TriDiag::new(diag, subdiag, canonical_scale(n))
}

/// Fully determines one matrix realization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum EnsembleSpec {
    Pseudo {
        poly: Gf2Poly,
        seed: String,
        shift: usize,
        sign: i8,
    },
    DVariant {
        poly: Gf2Poly,
        seed: String,
        shift: usize,
    },
    Wigner {
        n: usize,
        rng_seed: u64,
        stream: u64,
    },
    RandomCirculant {
        n: usize,
        rng_seed: u64,
        stream: u64,
    },
    Paley {
        q: u64,
        scaled: bool,
    },
    TridiagHermite {
        n: usize,
        rng_seed: u64,
        stream: u64,
        variant: TridiagVariant,
    },
    /// Spectrum is that of `4 A_n(a)^2`.
    SquaredPseudo {
        poly: Gf2Poly,
        seed: String,
        shift: usize,
        sign: i8,
    },
}

fn seed_string(bits: &[u8]) -> String {
    bits.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
}

impl EnsembleSpec {
    pub fn pseudo(s: &MSeq, shift: usize, sign: i8) -> Self {
        EnsembleSpec::Pseudo {
            poly: s.generator(),
            seed: seed_string(s.seed()),
            shift,
            sign,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            EnsembleSpec::Pseudo { .. } => "pseudo",
            EnsembleSpec::DVariant { .. } => "d_variant",
            EnsembleSpec::Wigner { .. } => "wigner",
            EnsembleSpec::RandomCirculant { .. } => "random_circulant",
            EnsembleSpec::Paley { .. } => "paley",
            EnsembleSpec::TridiagHermite { .. } => "tridiag_hermite",
            EnsembleSpec::SquaredPseudo { .. } => "squared_pseudo",
        }
    }

    pub fn is_squared(&self) -> bool {
        matches!(self, EnsembleSpec::SquaredPseudo { .. })
    }

    /// The m-sequence named by a pseudo-family spec.
    pub fn sequence(&self) -> Result<Option<MSeq>> {
        match self {
            EnsembleSpec::Pseudo { poly, seed, .. }
            | EnsembleSpec::DVariant { poly, seed, .. }
            | EnsembleSpec::SquaredPseudo { poly, seed, .. } => {
                let m = poly.degree().unwrap_or(0);
                Ok(Some(MSeq::new(*poly, &parse_seed(seed, m)?)?))
            }
            _ => Ok(None),
        }
    }

    /// Builds the matrix. For `SquaredPseudo` this is `A_n(a)` itself; the
    /// squaring happens on the spectrum.
    pub fn realize(&self) -> Result<Matrix> {
        let seq = self.sequence()?;
        self.realize_with(seq.as_ref())
    }

    /// As [`realize`](Self::realize), reusing an already generated sequence.
    pub fn realize_with(&self, seq: Option<&MSeq>) -> Result<Matrix> {
        let need_seq = || seq.ok_or_else(|| Error::Domain("sequence required".into()));
        match *self {
            EnsembleSpec::Pseudo { shift, sign, .. } | EnsembleSpec::SquaredPseudo { shift, sign, .. } => {
                Ok(Matrix::Circulant(build_pseudo(need_seq()?, shift, sign)?))
            }
            EnsembleSpec::DVariant { shift, .. } => {
                let s = need_seq()?;
                if shift >= s.len() {
                    return Err(Error::Domain(format!("shift {shift} out of range 0..{}", s.len())));
                }
                Ok(build_dn(&s.shifted(shift)))
            }
            EnsembleSpec::Wigner { n, rng_seed, stream } => {
                Ok(Matrix::Dense(sample_wigner(n, &mut member_rng(rng_seed, stream))?))
            }
            EnsembleSpec::RandomCirculant { n, rng_seed, stream } => Ok(Matrix::Circulant(
                sample_random_circulant(n, &mut member_rng(rng_seed, stream))?,
            )),
            EnsembleSpec::Paley { q, scaled } => Ok(Matrix::Circulant(paley_matrix(q, scaled)?)),
            EnsembleSpec::TridiagHermite {
                n,
                rng_seed,
                stream,
                variant,
            } => Ok(Matrix::Tridiag(sample_tridiag_hermite(
                n,
                &mut member_rng(rng_seed, stream),
                variant,
            )?)),
        }
    }
}

impl fmt::Display for EnsembleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serde_json::to_string(self).map_err(|_| fmt::Error)?)
    }
}

/// Every `A_n(a)` and its negative, interleaved `(a, +), (a, -)`.
pub fn pseudo_ensemble(s: &MSeq) -> Vec<EnsembleSpec> {
    (0..s.len())
        .flat_map(|a| [EnsembleSpec::pseudo(s, a, 1), EnsembleSpec::pseudo(s, a, -1)])
        .collect()
}

/// Which shifts of a sequence to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftSelection {
    All,
    /// `k` distinct shifts drawn uniformly without replacement.
    Sample { count: usize, rng_seed: u64 },
}

impl ShiftSelection {
    pub fn shifts(&self, n: usize) -> Result<Vec<usize>> {
        match *self {
            ShiftSelection::All => Ok((0..n).collect()),
            ShiftSelection::Sample { count, rng_seed } => {
                if count > n {
                    return Err(Error::Domain(format!("cannot sample {count} of {n} shifts")));
                }
                let mut rng = member_rng(rng_seed, 0);
                let mut picked = index::sample(&mut rng, n, count).into_vec();
                picked.sort_unstable();
                Ok(picked)
            }
        }
    }
}

/// Pseudo-ensemble members for the selected shifts; `both_signs` adds the
/// negative of each right after it.
pub fn pseudo_members(s: &MSeq, selection: ShiftSelection, both_signs: bool, squared: bool) -> Result<Vec<EnsembleSpec>> {
    let signs: &[i8] = if both_signs { &[1, -1] } else { &[1] };
    let mut out = Vec::new();
    for a in selection.shifts(s.len())? {
        for &sign in signs {
            let spec = EnsembleSpec::pseudo(s, a, sign);
            out.push(if squared {
                match spec {
                    EnsembleSpec::Pseudo { poly, seed, shift, sign } => {
                        EnsembleSpec::SquaredPseudo { poly, seed, shift, sign }
                    }
                    other => other,
                }
            } else {
                spec
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m3() -> MSeq {
        MSeq::new("x^3+x+1".parse().unwrap(), &[1, 0, 0]).unwrap()
    }

    #[test]
    fn pseudo_diagonal_and_entry() {
        let a = build_pseudo(&m3(), 0, 1).unwrap();
        let s = canonical_scale(7);
        for i in 0..7 {
            assert_eq!(a.entry(i, i), s);
        }
        assert_eq!(a.entry(0, 1), -s);
        let neg = build_pseudo(&m3(), 0, -1).unwrap();
        assert_eq!(neg.entry(3, 3), -s);
    }

    #[test]
    fn pseudo_is_symmetric_circulant() {
        let s = MSeq::new("x^5+x^2+1".parse().unwrap(), &[1, 1, 0, 1, 0]).unwrap();
        for a in 0..s.len() {
            let c = build_pseudo(&s, a, 1).unwrap();
            assert!(c.is_palindromic());
            for i in 0..31 {
                for j in 0..31 {
                    assert_eq!(c.entry(i, j), c.entry(j, i));
                    assert_eq!(c.entry(i, j), c.entry((i + 5) % 31, (j + 5) % 31));
                    // Direct evaluation of the defining formula.
                    let e = s.phi(i as i64 - j as i64 + a as i64) ^ s.phi(j as i64 - i as i64 + a as i64);
                    assert_eq!(c.entry(i, j), if e { -1.0 } else { 1.0 } * canonical_scale(31));
                }
            }
        }
        assert!(build_pseudo(&s, 31, 1).is_err());
    }

    #[test]
    fn ensemble_has_distinct_members() {
        let s = m3();
        let members = pseudo_ensemble(&s);
        assert_eq!(members.len(), 14);
        let rows: Vec<Vec<i8>> = (0..7).map(|a| build_pseudo(&s, a, 1).unwrap().first_row().to_vec()).collect();
        for a in 0..7 {
            for b in 0..a {
                assert_ne!(rows[a], rows[b]);
            }
        }
    }

    #[test]
    fn dn_entries() {
        let Matrix::Dense(d) = build_dn(&m3()) else {
            panic!("D_n of an m-sequence is not circulant");
        };
        let s = canonical_scale(7);
        for i in 0..7 {
            assert_eq!(d.entry(i, i), -s);
        }
        assert_eq!(d.entry(0, 1), s);
        assert_eq!(d.entry(0, 3), -s);
        assert_eq!(d.entry(6, 0), -s);
    }

    #[test]
    fn wigner_magnitudes() {
        let w = sample_wigner(40, &mut member_rng(3, 0)).unwrap();
        let s = canonical_scale(40);
        assert!(w.packed().iter().all(|v| v.abs() == s));
        assert!((w.frobenius_sq() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn random_circulant_draws() {
        struct Counting(ChaCha8Rng, usize);
        impl rand::RngCore for Counting {
            fn next_u32(&mut self) -> u32 {
                self.1 += 1;
                self.0.next_u32()
            }
            fn next_u64(&mut self) -> u64 {
                self.1 += 1;
                self.0.next_u64()
            }
            fn fill_bytes(&mut self, dst: &mut [u8]) {
                self.0.fill_bytes(dst)
            }
        }
        let mut rng = Counting(member_rng(1, 0), 0);
        let c = sample_random_circulant(101, &mut rng).unwrap();
        assert_eq!(rng.1, 51);
        assert!(c.is_palindromic());
        assert!(sample_random_circulant(100, &mut member_rng(1, 0)).is_err());
        assert!(sample_random_circulant(1, &mut member_rng(1, 0)).is_err());
    }

    #[test]
    fn paley_validation_and_symmetry() {
        assert!(paley_matrix(13, false).unwrap().is_palindromic());
        assert!(paley_matrix(157, false).unwrap().is_palindromic());
        assert!(paley_matrix(7, false).is_err());
        assert!(paley_matrix(25, false).is_err());
        assert!(paley_matrix(21, false).is_err());
        let p = paley_matrix(13, false).unwrap();
        assert_eq!(p.first_row()[0], 1);
        assert_eq!(p.first_row().iter().filter(|&&v| v == -1).count(), 6);
    }

    #[test]
    fn tridiag_variants() {
        let t = sample_tridiag_hermite(50, &mut member_rng(9, 0), TridiagVariant::Standard).unwrap();
        assert_eq!(t.subdiag.len(), 49);
        assert!(t.subdiag.iter().all(|&v| v >= 0.0));
        let lit = sample_tridiag_hermite(50, &mut member_rng(9, 0), TridiagVariant::PaperLiteral).unwrap();
        let mean: f64 = lit.subdiag.iter().sum::<f64>() / 49.0;
        assert!((mean - 49.0).abs() < 10.0);
        assert!(sample_tridiag_hermite(1, &mut member_rng(9, 0), TridiagVariant::Standard).is_err());
    }

    #[test]
    fn specs_are_replayable() {
        let spec = EnsembleSpec::Wigner { n: 30, rng_seed: 17, stream: 4 };
        let json = serde_json::to_string(&spec).unwrap();
        let back: EnsembleSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        assert_eq!(spec.realize().unwrap(), back.realize().unwrap());
        let p = EnsembleSpec::pseudo(&m3(), 2, -1);
        let json = serde_json::to_value(&p).unwrap();
        assert_eq!(json["family"], "pseudo");
        assert_eq!(json["poly"], "x^3+x+1");
        assert_eq!(json["seed"], "100");
    }

    #[test]
    fn circulant_line_round_trip() {
        let c = build_pseudo(&m3(), 3, 1).unwrap();
        assert_eq!(SymCirculant::from_line(&c.to_line()).unwrap(), c);
        assert!(SymCirculant::from_line("1.0,1,-1,1").is_err());
    }

    #[test]
    fn shift_sampling_is_deterministic() {
        let sel = ShiftSelection::Sample { count: 100, rng_seed: 7 };
        let a = sel.shifts(2047).unwrap();
        assert_eq!(a, sel.shifts(2047).unwrap());
        assert_eq!(a.len(), 100);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert!(ShiftSelection::Sample { count: 8, rng_seed: 1 }.shifts(7).is_err());
    }
}
