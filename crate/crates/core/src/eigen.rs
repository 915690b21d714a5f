//! Real symmetric eigenvalue solvers.
//!
//! Four independent paths: a Fourier sum for symmetric circulants (direct or
//! FFT), Householder tridiagonalization followed by implicit QL for dense
//! matrices, QL alone for tridiagonals, and cyclic Jacobi as a small-n oracle.

use std::cell::RefCell;
use std::fmt;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ensembles::{DenseSym, EnsembleSpec, Matrix, SymCirculant, TriDiag};
use crate::error::{Error, Result};

/// QL iterations allowed per eigenvalue.
pub const QL_MAX_ITERATIONS: usize = 60;
/// Largest matrix accepted by the Jacobi oracle.
pub const JACOBI_MAX_N: usize = 512;

/// Which algorithm produced a spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    CirculantDirect,
    CirculantFft,
    HouseholderQl,
    TridiagQl,
    Jacobi,
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Solver::CirculantDirect => "circulant-direct",
            Solver::CirculantFft => "circulant-fft",
            Solver::HouseholderQl => "householder-ql",
            Solver::TridiagQl => "tridiag-ql",
            Solver::Jacobi => "jacobi",
        })
    }
}

/// Eigenvalues sorted ascending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
    provenance: Solver,
}

impl Spectrum {
    /// Sorts `values` ascending. NaNs are rejected.
    pub fn new(mut values: Vec<f64>, provenance: Solver) -> Result<Self> {
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Domain("spectrum contains NaN".into()));
        }
        values.sort_by(f64::total_cmp);
        Ok(Spectrum { values, provenance })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn provenance(&self) -> Solver {
        self.provenance
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Largest absolute difference between sorted values.
    pub fn max_abs_diff(&self, other: &Spectrum) -> f64 {
        assert_eq!(self.n(), other.n(), "spectra of different sizes");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn negated(&self) -> Spectrum {
        Spectrum {
            values: self.values.iter().rev().map(|v| -v).collect(),
            provenance: self.provenance,
        }
    }

    /// CSV with `#`-prefixed metadata lines, an `eigenvalue` header and one
    /// value per line.
    pub fn to_csv(&self, family: &str, spec_hash: &str) -> String {
        let mut out = format!(
            "# n={}\n# family={}\n# solver={}\n# spec_hash={}\neigenvalue\n",
            self.n(),
            family,
            self.provenance,
            spec_hash
        );
        for v in &self.values {
            out.push_str(&format!("{v:.17e}\n"));
        }
        out
    }

    /// Reads the format written by [`to_csv`](Self::to_csv).
    pub fn from_csv(text: &str) -> Result<Spectrum> {
        let mut solver = Solver::HouseholderQl;
        let mut values = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(meta) = line.strip_prefix('#') {
                if let Some(name) = meta.trim().strip_prefix("solver=") {
                    solver = serde_json::from_value(serde_json::Value::String(name.to_string()))
                        .map_err(|_| Error::parse(name, "unknown solver"))?;
                }
            } else if line != "eigenvalue" {
                values.push(line.parse::<f64>().map_err(|_| Error::parse(line, "not a number"))?);
            }
        }
        Spectrum::new(values, solver)
    }
}

/// Maps each eigenvalue `x` to `4 x^2`: the spectrum of `4 M^2`.
pub fn spectrum_square(sp: &Spectrum) -> Spectrum {
    let mut values: Vec<f64> = sp.values.iter().map(|x| 4.0 * x * x).collect();
    values.sort_by(f64::total_cmp);
    Spectrum {
        values,
        provenance: sp.provenance,
    }
}

/// Backend for symmetric circulants.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CirculantBackend {
    /// Cosine sums against a precomputed table, `O(n^2 / 4)`.
    #[default]
    Direct,
    /// Complex FFT of the first row (Bluestein for non-power-of-two `n`).
    Fft,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// `lambda_k = scale * sum_j row[j] cos(2 pi j k / n)`.
pub fn circulant_eigenvalues(c: &SymCirculant, backend: CirculantBackend) -> Result<Spectrum> {
    if !c.is_palindromic() {
        return Err(Error::Domain("first row is not palindromic; matrix is not symmetric".into()));
    }
    let n = c.n();
    let row = c.first_row();
    let values = match backend {
        CirculantBackend::Direct => {
            let table: Vec<f64> = (0..n)
                .map(|i| (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos())
                .collect();
            let half = n / 2;
            let eval = |k: usize| {
                let mut acc = 0.0;
                let mut idx = 0usize;
                for &r in &row[1..n.div_ceil(2)] {
                    idx += k;
                    if idx >= n {
                        idx -= n;
                    }
                    acc += f64::from(r) * table[idx];
                }
                let mut sum = f64::from(row[0]) + 2.0 * acc;
                if n.is_multiple_of(2) {
                    sum += if k.is_multiple_of(2) { 1.0 } else { -1.0 } * f64::from(row[half]);
                }
                c.scale() * sum
            };
            let head: Vec<f64> = if n >= 1024 {
                (0..=half).into_par_iter().map(eval).collect()
            } else {
                (0..=half).map(eval).collect()
            };
            let mut values = head.clone();
            values.extend(head[1..n - half].iter().rev());
            values
        }
        CirculantBackend::Fft => {
            let mut buf: Vec<Complex<f64>> = row.iter().map(|&r| Complex::new(f64::from(r), 0.0)).collect();
            let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n));
            fft.process(&mut buf);
            buf.iter().map(|z| c.scale() * z.re).collect()
        }
    };
    Spectrum::new(
        values,
        match backend {
            CirculantBackend::Direct => Solver::CirculantDirect,
            CirculantBackend::Fft => Solver::CirculantFft,
        },
    )
}

fn hash_f64s(parts: &[&[f64]]) -> String {
    let mut h = Sha256::new();
    for part in parts {
        for v in *part {
            h.update(v.to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

/// Householder reduction to tridiagonal form followed by implicit QL.
pub fn dense_sym_eigenvalues(m: &DenseSym) -> Result<Spectrum> {
    let n = m.n();
    if n == 0 {
        return Err(Error::Domain("empty matrix".into()));
    }
    let (diag, sub) = tridiagonalize(m.packed().to_vec(), n);
    let values = ql_implicit(diag, sub).map_err(|index| Error::NoConvergence {
        index,
        hash: hash_f64s(&[m.packed()]),
    })?;
    Spectrum::new(values, Solver::HouseholderQl)
}

/// Reduces a packed lower-triangular symmetric matrix in place, returning the
/// diagonal and subdiagonal of the similar tridiagonal matrix.
fn tridiagonalize(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<f64>) {
    let off = |i: usize| i * (i + 1) / 2;
    let mut diag = vec![0.0; n];
    let mut sub = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        diag[k] = a[off(k) + k];
        let len = n - k - 1;
        // Column k below the diagonal.
        for i in 0..len {
            let g = k + 1 + i;
            v[i] = a[off(g) + k];
        }
        let tail_sq: f64 = v[1..len].iter().map(|x| x * x).sum();
        if tail_sq == 0.0 {
            sub[k] = v[0];
            continue;
        }
        let x0 = v[0];
        let norm = (x0 * x0 + tail_sq).sqrt();
        let alpha = if x0 > 0.0 { -norm } else { norm };
        sub[k] = alpha;
        v[0] = x0 - alpha;
        let vtv = v[0] * v[0] + tail_sq;
        let beta = 2.0 / vtv;

        // p = beta * B v using the lower triangle only.
        let v = &v[..len];
        let p = &mut p[..len];
        p.fill(0.0);
        for i in 0..len {
            let g = k + 1 + i;
            let row = &a[off(g) + k + 1..off(g) + k + 2 + i];
            let vi = v[i];
            let mut acc = 0.0;
            for ((pj, &r), &vj) in p[..i].iter_mut().zip(&row[..i]).zip(&v[..i]) {
                acc += r * vj;
                *pj += r * vi;
            }
            p[i] += acc + row[i] * vi;
        }
        let mut pv = 0.0;
        for (pi, &vi) in p.iter_mut().zip(v) {
            *pi *= beta;
            pv += *pi * vi;
        }
        let kk = 0.5 * beta * pv;
        // w = p - kk v, stored in p.
        for (pi, &vi) in p.iter_mut().zip(v) {
            *pi -= kk * vi;
        }
        let w = &*p;
        for i in 0..len {
            let g = k + 1 + i;
            let row = &mut a[off(g) + k + 1..off(g) + k + 2 + i];
            let (vi, wi) = (v[i], w[i]);
            for ((r, &vj), &wj) in row.iter_mut().zip(&v[..=i]).zip(&w[..=i]) {
                *r -= vi * wj + wi * vj;
            }
        }
    }
    if n >= 2 {
        diag[n - 2] = a[off(n - 2) + n - 2];
        sub[n - 2] = a[off(n - 1) + n - 2];
    }
    diag[n - 1] = a[off(n - 1) + n - 1];
    (diag, sub)
}

/// Implicit-shift QL on a symmetric tridiagonal matrix. On failure returns
/// the index of the eigenvalue that did not converge.
fn ql_implicit(mut d: Vec<f64>, sub: Vec<f64>) -> std::result::Result<Vec<f64>, usize> {
    let n = d.len();
    let mut e = sub;
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITERATIONS {
                return Err(l);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

/// Implicit QL applied directly to a tridiagonal matrix; values include `t.scale`.
pub fn tridiag_eigenvalues(t: &TriDiag) -> Result<Spectrum> {
    let values = ql_implicit(t.diag.clone(), t.subdiag.clone()).map_err(|index| Error::NoConvergence {
        index,
        hash: hash_f64s(&[&t.diag, &t.subdiag, &[t.scale]]),
    })?;
    Spectrum::new(values.into_iter().map(|v| v * t.scale).collect(), Solver::TridiagQl)
}

/// Cyclic Jacobi rotations until the off-diagonal norm is below `1e-12 ||M||_F`.
pub fn jacobi_eigenvalues(m: &DenseSym) -> Result<Spectrum> {
    let n = m.n();
    if n > JACOBI_MAX_N {
        return Err(Error::Capability(format!("Jacobi oracle limited to n <= {JACOBI_MAX_N}, got {n}")));
    }
    if n == 0 {
        return Err(Error::Domain("empty matrix".into()));
    }
    let mut a = m.to_full();
    let norm = m.frobenius_sq().sqrt();
    let target = 1e-12 * norm;
    let off_norm = |a: &[f64]| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..i {
                s += 2.0 * a[i * n + j] * a[i * n + j];
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off_norm(&a) > target {
        sweeps += 1;
        if sweeps > 100 {
            return Err(Error::NoConvergence {
                index: 0,
                hash: hash_f64s(&[m.packed()]),
            });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    Spectrum::new((0..n).map(|i| a[i * n + i]).collect(), Solver::Jacobi)
}

/// Spectrum of any realized matrix by its natural fast path.
pub fn matrix_spectrum(m: &Matrix, backend: CirculantBackend) -> Result<Spectrum> {
    match m {
        Matrix::Circulant(c) => circulant_eigenvalues(c, backend),
        Matrix::Dense(d) => dense_sym_eigenvalues(d),
        Matrix::Tridiag(t) => tridiag_eigenvalues(t),
    }
}

impl EnsembleSpec {
    /// The spectrum of this member; for `SquaredPseudo` that of `4 A^2`.
    pub fn spectrum(&self, backend: CirculantBackend) -> Result<Spectrum> {
        let sp = matrix_spectrum(&self.realize()?, backend)?;
        Ok(if self.is_squared() { spectrum_square(&sp) } else { sp })
    }

    /// Hex SHA-256 of the JSON encoding.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("spec serializes");
        hex::encode(Sha256::digest(json))
    }
}

/// A group of numerically coincident eigenvalues.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub center: f64,
    pub multiplicity: usize,
}

/// Groups sorted eigenvalues whose consecutive gaps are at most
/// `1e-6 * (max - min)`.
pub fn cluster_spikes(sp: &Spectrum) -> Vec<Cluster> {
    let vals = sp.values();
    if vals.is_empty() {
        return Vec::new();
    }
    let threshold = 1e-6 * (sp.max() - sp.min());
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=vals.len() {
        if i == vals.len() || vals[i] - vals[i - 1] > threshold {
            let group = &vals[start..i];
            clusters.push(Cluster {
                center: group.iter().sum::<f64>() / group.len() as f64,
                multiplicity: group.len(),
            });
            start = i;
        }
    }
    clusters
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{build_pseudo, member_rng, paley_matrix};
    use crate::sequences::MSeq;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn dense(n: usize, rows: &[f64]) -> DenseSym {
        DenseSym::from_full(n, rows).unwrap()
    }

    #[test]
    fn small_dense_cases() {
        let sp = dense_sym_eigenvalues(&dense(2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert_abs_diff_eq!(sp.values()[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sp.values()[1], 1.0, epsilon = 1e-14);
        let id = DenseSym::from_fn(5, |i, j| if i == j { 1.0 } else { 0.0 });
        assert!(dense_sym_eigenvalues(&id).unwrap().values().iter().all(|&v| v == 1.0));
        let one = dense_sym_eigenvalues(&dense(1, &[3.5])).unwrap();
        assert_eq!(one.values(), &[3.5]);
        let jac = jacobi_eigenvalues(&dense(2, &[2.0, 0.0, 0.0, 3.0])).unwrap();
        assert_eq!(jac.values(), &[2.0, 3.0]);
    }

    #[test]
    fn circulant_examples() {
        let ones = SymCirculant::new(vec![1; 9], 1.0 / 6.0).unwrap();
        for backend in [CirculantBackend::Direct, CirculantBackend::Fft] {
            let sp = circulant_eigenvalues(&ones, backend).unwrap();
            assert_abs_diff_eq!(sp.max(), 1.5, epsilon = 1e-12);
            assert!(sp.values()[..8].iter().all(|v| v.abs() < 1e-12));
            let three = circulant_eigenvalues(&SymCirculant::new(vec![1, -1, -1], 1.0).unwrap(), backend).unwrap();
            for (got, want) in three.values().iter().zip([-1.0, 2.0, 2.0]) {
                assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
            }
        }
        // Even n exercises the Nyquist term.
        let even = SymCirculant::new(vec![1, -1, 1, 1, 1, -1], 1.0).unwrap();
        let direct = circulant_eigenvalues(&even, CirculantBackend::Direct).unwrap();
        let oracle = jacobi_eigenvalues(&even.to_dense()).unwrap();
        assert!(direct.max_abs_diff(&oracle) < 1e-12);
        assert!(SymCirculant::new(vec![1, 1, -1], 1.0).is_err());
    }

    #[test]
    fn pseudo_paths_agree() {
        let s = MSeq::new("x^5+x^2+1".parse().unwrap(), &[1, 0, 0, 0, 0]).unwrap();
        for a in [0, 7, 30] {
            let c = build_pseudo(&s, a, 1).unwrap();
            let direct = circulant_eigenvalues(&c, CirculantBackend::Direct).unwrap();
            let fft = circulant_eigenvalues(&c, CirculantBackend::Fft).unwrap();
            let hh = dense_sym_eigenvalues(&c.to_dense()).unwrap();
            assert!(direct.max_abs_diff(&hh) < 1e-10);
            assert!(direct.max_abs_diff(&fft) < 1e-10);
        }
    }

    #[test]
    fn tridiag_path_graphs() {
        let t3 = TriDiag::new(vec![0.0; 3], vec![1.0; 2], 1.0).unwrap();
        let sp = tridiag_eigenvalues(&t3).unwrap();
        for (got, want) in sp.values().iter().zip([-(2f64.sqrt()), 0.0, 2f64.sqrt()]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-13);
        }
        let t5 = TriDiag::new(vec![0.0; 5], vec![1.0; 4], 1.0).unwrap();
        let sp = tridiag_eigenvalues(&t5).unwrap();
        for (got, want) in sp.values().iter().zip([-(3f64.sqrt()), -1.0, 0.0, 1.0, 3f64.sqrt()]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-13);
        }
        let mut rng = member_rng(5, 0);
        let t = TriDiag::new(
            (0..40).map(|_| rng.random_range(-1.0..1.0)).collect(),
            (0..39).map(|_| rng.random_range(-1.0..1.0)).collect(),
            0.5,
        )
        .unwrap();
        let a = tridiag_eigenvalues(&t).unwrap();
        let b = dense_sym_eigenvalues(&t.to_dense()).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-10);
    }

    #[test]
    fn random_dense_matches_jacobi() {
        let mut rng = member_rng(11, 0);
        let m = DenseSym::from_fn(50, |_, _| rng.random_range(-1.0..1.0));
        let hh = dense_sym_eigenvalues(&m).unwrap();
        let jac = jacobi_eigenvalues(&m).unwrap();
        assert!(hh.max_abs_diff(&jac) < 1e-9);
        let sum: f64 = hh.values().iter().sum();
        assert_abs_diff_eq!(sum, m.trace(), epsilon = 1e-10);
        let sq: f64 = hh.values().iter().map(|v| v * v).sum();
        assert_abs_diff_eq!(sq, m.frobenius_sq(), epsilon = 1e-9);
        let neg = dense_sym_eigenvalues(&m.negated()).unwrap();
        assert!(neg.max_abs_diff(&hh.negated()) < 1e-12);
    }

    #[test]
    fn jacobi_size_cap() {
        let big = DenseSym::zeros(JACOBI_MAX_N + 1);
        assert!(matches!(jacobi_eigenvalues(&big), Err(Error::Capability(_))));
    }

    #[test]
    fn paley_spikes() {
        let p = paley_matrix(13, false).unwrap();
        let sp = jacobi_eigenvalues(&p.to_dense()).unwrap();
        let clusters = cluster_spikes(&sp);
        let r = 13f64.sqrt();
        assert_eq!(clusters.len(), 3);
        for (c, (center, mult)) in clusters.iter().zip([(1.0 - r, 6), (1.0, 1), (1.0 + r, 6)]) {
            assert_abs_diff_eq!(c.center, center, epsilon = 1e-10);
            assert_eq!(c.multiplicity, mult);
        }
    }

    #[test]
    fn squaring_and_csv() {
        let sp = Spectrum::new(vec![0.5, -0.5, 0.0], Solver::Jacobi).unwrap();
        assert_eq!(spectrum_square(&sp).values(), &[0.0, 1.0, 1.0]);
        let csv = sp.to_csv("pseudo", "abc");
        assert!(csv.contains("# n=3\n"));
        assert!(csv.contains("\neigenvalue\n"));
        assert_eq!(Spectrum::from_csv(&csv).unwrap(), sp);
    }
}
