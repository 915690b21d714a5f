//! Reference spectral laws and empirical spectral statistics.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::{CirculantBackend, Spectrum};
use crate::ensembles::{member_rng, DenseSym, EnsembleSpec};
use crate::error::{Error, Result};

/// Largest `r` for which `catalan(r)` is computed.
pub const MAX_CATALAN: u32 = 30;

/// `(2r)! / (r! (r+1)!)`.
pub fn catalan(r: u32) -> Result<u64> {
    if r > MAX_CATALAN {
        return Err(Error::Capability(format!("catalan({r}) beyond exact range r <= {MAX_CATALAN}")));
    }
    let mut c: u128 = 1;
    for k in 0..u128::from(r) {
        c = c * 2 * (2 * k + 1) / (k + 2);
    }
    Ok(c as u64)
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut b: u128 = 1;
    for i in 0..u128::from(k) {
        b = b * (u128::from(n) - i) / (i + 1);
    }
    b
}

/// `(1/r) C(r, k) C(r, k-1)`.
pub fn narayana(r: u32, k: u32) -> Result<u64> {
    if k < 1 || k > r {
        return Err(Error::Domain(format!("narayana({r}, {k}) needs 1 <= k <= r")));
    }
    if r > MAX_CATALAN {
        return Err(Error::Capability(format!("narayana beyond r <= {MAX_CATALAN}")));
    }
    let (r, k) = (u64::from(r), u64::from(k));
    Ok((binomial(r, k) * binomial(r, k - 1) / u128::from(r)) as u64)
}

/// A reference spectral distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RefLaw {
    /// Density `(2/pi) sqrt(1 - x^2)` on `[-1, 1]`.
    Semicircle,
    /// Aspect ratio `gamma` in `(0, 1]`, support `[(1 - sqrt g)^2, (1 + sqrt g)^2]`.
    MarchenkoPastur { gamma: f64 },
    Gaussian { mean: f64, sigma: f64 },
}

impl RefLaw {
    pub fn marchenko_pastur(gamma: f64) -> Result<RefLaw> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::Domain(format!("Marchenko-Pastur ratio must lie in (0, 1], got {gamma}")));
        }
        Ok(RefLaw::MarchenkoPastur { gamma })
    }

    pub fn gaussian(mean: f64, sigma: f64) -> Result<RefLaw> {
        if !(sigma > 0.0 && sigma.is_finite() && mean.is_finite()) {
            return Err(Error::Domain(format!("invalid Gaussian parameters mean={mean}, sigma={sigma}")));
        }
        Ok(RefLaw::Gaussian { mean, sigma })
    }

    /// Gaussian with the sample mean and (population) standard deviation.
    pub fn gaussian_fit(values: &[f64]) -> Result<RefLaw> {
        let (mean, std) = mean_std(values);
        RefLaw::gaussian(mean, std)
    }

    pub fn name(&self) -> &'static str {
        match self {
            RefLaw::Semicircle => "semicircle",
            RefLaw::MarchenkoPastur { .. } => "marchenko_pastur",
            RefLaw::Gaussian { .. } => "gaussian",
        }
    }

    /// Bounded support, if any.
    pub fn support(&self) -> Option<(f64, f64)> {
        match *self {
            RefLaw::Semicircle => Some((-1.0, 1.0)),
            RefLaw::MarchenkoPastur { gamma } => Some(mp_edges(gamma)),
            RefLaw::Gaussian { .. } => None,
        }
    }

    /// `r`-th raw moment.
    pub fn moment(&self, r: u32) -> Result<f64> {
        match *self {
            RefLaw::Semicircle => {
                if r % 2 == 1 {
                    Ok(0.0)
                } else {
                    Ok(catalan(r / 2)? as f64 / 2f64.powi(r as i32))
                }
            }
            RefLaw::MarchenkoPastur { gamma } => {
                if r == 0 {
                    return Ok(1.0);
                }
                let mut acc = 0.0;
                for k in 1..=r {
                    acc += gamma.powi(k as i32) * narayana(r, k)? as f64;
                }
                Ok(acc)
            }
            RefLaw::Gaussian { mean, sigma } => {
                // E[(mean + sigma Z)^r] = sum_j C(r, j) mean^(r-j) sigma^j E[Z^j].
                let mut acc = 0.0;
                for j in (0..=r).step_by(2) {
                    let double_fact: f64 = (1..j).step_by(2).map(f64::from).product();
                    acc += binomial(u64::from(r), u64::from(j)) as f64
                        * mean.powi((r - j) as i32)
                        * sigma.powi(j as i32)
                        * double_fact;
                }
                Ok(acc)
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            RefLaw::Semicircle => {
                if x.abs() >= 1.0 {
                    0.0
                } else {
                    2.0 / PI * (1.0 - x * x).sqrt()
                }
            }
            RefLaw::MarchenkoPastur { gamma } => {
                let (lo, hi) = mp_edges(gamma);
                if x <= lo || x >= hi || x <= 0.0 {
                    0.0
                } else {
                    ((hi - x) * (x - lo)).sqrt() / (2.0 * PI * gamma * x)
                }
            }
            RefLaw::Gaussian { mean, sigma } => {
                let z = (x - mean) / sigma;
                (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            RefLaw::Semicircle => {
                if x <= -1.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    0.5 + (x * (1.0 - x * x).sqrt() + x.asin()) / PI
                }
            }
            RefLaw::MarchenkoPastur { gamma } => mp_cdf(gamma, x),
            RefLaw::Gaussian { mean, sigma } => 0.5 * (1.0 + libm::erf((x - mean) / (sigma * std::f64::consts::SQRT_2))),
        }
    }
}

fn mp_edges(gamma: f64) -> (f64, f64) {
    let s = gamma.sqrt();
    ((1.0 - s) * (1.0 - s), (1.0 + s) * (1.0 + s))
}

/// Density in the angle variable `x = lo + (hi - lo)(1 - cos t) / 2`, which
/// removes the square-root edges (and at `gamma = 1` the pole at zero).
fn mp_angle_density(gamma: f64, theta: f64) -> f64 {
    let (lo, hi) = mp_edges(gamma);
    let half = 0.5 * (hi - lo);
    let x = lo + half * (1.0 - theta.cos());
    if x <= 0.0 {
        // Only reachable at gamma = 1, theta = 0, where the limit is 2/pi.
        return 2.0 / PI;
    }
    let s = theta.sin();
    half * half * s * s / (2.0 * PI * gamma * x)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, 40)
}

const MP_GRID: usize = 1024;
const MP_TOLERANCE: f64 = 1e-9;

/// Cumulative integrals of the angle density at `theta_j = pi j / MP_GRID`.
fn mp_table(gamma: f64) -> Arc<Vec<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("cache lock").get(&gamma.to_bits()) {
        return Arc::clone(t);
    }
    let f = |t: f64| mp_angle_density(gamma, t);
    let step = PI / MP_GRID as f64;
    let mut table = Vec::with_capacity(MP_GRID + 1);
    let mut acc = 0.0;
    table.push(0.0);
    for j in 0..MP_GRID {
        acc += adaptive_simpson(&f, j as f64 * step, (j + 1) as f64 * step, MP_TOLERANCE / MP_GRID as f64);
        table.push(acc);
    }
    let table = Arc::new(table);
    cache
        .lock()
        .expect("cache lock")
        .insert(gamma.to_bits(), Arc::clone(&table));
    table
}

fn mp_cdf(gamma: f64, x: f64) -> f64 {
    let (lo, hi) = mp_edges(gamma);
    if x <= lo {
        return 0.0;
    }
    if x >= hi {
        return 1.0;
    }
    let theta = (1.0 - 2.0 * (x - lo) / (hi - lo)).clamp(-1.0, 1.0).acos();
    let table = mp_table(gamma);
    let step = PI / MP_GRID as f64;
    let j = ((theta / step) as usize).min(MP_GRID - 1);
    let f = |t: f64| mp_angle_density(gamma, t);
    let partial = adaptive_simpson(&f, j as f64 * step, theta, MP_TOLERANCE / MP_GRID as f64);
    (table[j] + partial).clamp(0.0, 1.0)
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / n;
    let var = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean))) / n;
    (mean, var.sqrt())
}

/// `(1/n) sum_i lambda_i^r`.
pub fn empirical_moment(sp: &Spectrum, r: u32) -> f64 {
    compensated_sum(sp.values().iter().map(|v| v.powi(r as i32))) / sp.n() as f64
}

/// Moments `1..=r_max` of a spectrum.
pub fn empirical_moments(sp: &Spectrum, r_max: u32) -> Vec<f64> {
    (1..=r_max).map(|r| empirical_moment(sp, r)).collect()
}

/// `(1/n) Tr(M^r)` by repeated multiplication, independent of any eigensolver.
pub fn trace_moment_oracle(m: &DenseSym, r: u32) -> Result<f64> {
    let n = m.n();
    if n > 512 || r > 12 {
        return Err(Error::Capability(format!("trace oracle limited to n <= 512, r <= 12 (got n={n}, r={r})")));
    }
    if n == 0 {
        return Err(Error::Domain("empty matrix".into()));
    }
    if r == 0 {
        return Ok(1.0);
    }
    let base = m.to_full();
    let mut power = base.clone();
    let mut next = vec![0.0; n * n];
    for _ in 1..r {
        next.fill(0.0);
        for i in 0..n {
            for k in 0..n {
                let pik = power[i * n + k];
                if pik == 0.0 {
                    continue;
                }
                let row = &base[k * n..(k + 1) * n];
                for (dst, &b) in next[i * n..(i + 1) * n].iter_mut().zip(row) {
                    *dst += pik * b;
                }
            }
        }
        std::mem::swap(&mut power, &mut next);
    }
    Ok(compensated_sum((0..n).map(|i| power[i * n + i])) / n as f64)
}

/// One-sample Kolmogorov-Smirnov distance between sorted values and a law.
pub fn ks_distance_sorted(sorted: &[f64], law: &RefLaw) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = law.cdf(x);
        let upper = (i + 1) as f64 / n;
        let lower = i as f64 / n;
        d = d.max((upper - f).abs()).max((lower - f).abs());
    }
    d
}

pub fn ks_distance(sp: &Spectrum, law: &RefLaw) -> f64 {
    ks_distance_sorted(sp.values(), law)
}

/// Equal-width histogram with out-of-range counts kept separately.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Normalized over the in-range values, so `sum density * width = 1`.
    pub density: Vec<f64>,
    pub underflow: usize,
    pub overflow: usize,
}

pub const SEMICIRCLE_RANGE: (f64, f64) = (-1.1, 1.1);
pub const MARCHENKO_PASTUR_RANGE: (f64, f64) = (-0.1, 4.4);
pub const DEFAULT_BINS: usize = 100;

pub fn make_histogram(values: &[f64], bins: usize, range: (f64, f64)) -> Result<Histogram> {
    let (lo, hi) = range;
    if bins == 0 {
        return Err(Error::Domain("histogram needs at least one bin".into()));
    }
    if !(lo < hi) {
        return Err(Error::Domain(format!("empty histogram range [{lo}, {hi}]")));
    }
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();
    let mut counts = vec![0usize; bins];
    let (mut underflow, mut overflow) = (0, 0);
    for &x in values {
        if x < lo {
            underflow += 1;
        } else if x > hi {
            overflow += 1;
        } else {
            counts[(((x - lo) / width) as usize).min(bins - 1)] += 1;
        }
    }
    let inside: usize = counts.iter().sum();
    let density = counts
        .iter()
        .map(|&c| if inside == 0 { 0.0 } else { c as f64 / (inside as f64 * width) })
        .collect();
    Ok(Histogram {
        edges,
        counts,
        density,
        underflow,
        overflow,
    })
}

impl Histogram {
    /// Columns `bin_lo,bin_hi,count,density`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_lo,bin_hi,count,density\n");
        for (i, (&c, &d)) in self.counts.iter().zip(&self.density).enumerate() {
            out.push_str(&format!("{:e},{:e},{},{:e}\n", self.edges[i], self.edges[i + 1], c, d));
        }
        out
    }
}

/// Per-member and aggregate moments of an ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub n: usize,
    pub r_max: u32,
    pub reference_law: RefLaw,
    /// Indices into the input spec list of the members used.
    pub member_indices: Vec<usize>,
    /// `member_moments[i][r - 1]` is the `r`-th moment of member `i`.
    pub member_moments: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub reference: Vec<f64>,
}

impl MomentReport {
    pub fn from_members(
        n: usize,
        r_max: u32,
        reference_law: RefLaw,
        member_indices: Vec<usize>,
        member_moments: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let mut mean = Vec::new();
        let mut std = Vec::new();
        let mut reference = Vec::new();
        for r in 1..=r_max {
            let column: Vec<f64> = member_moments.iter().map(|m| m[r as usize - 1]).collect();
            let (mu, sd) = mean_std(&column);
            mean.push(mu);
            std.push(sd);
            reference.push(reference_law.moment(r)?);
        }
        Ok(MomentReport {
            n,
            r_max,
            reference_law,
            member_indices,
            member_moments,
            mean,
            std,
            reference,
        })
    }

    pub fn mean_of(&self, r: u32) -> f64 {
        self.mean[r as usize - 1]
    }

    pub fn std_of(&self, r: u32) -> f64 {
        self.std[r as usize - 1]
    }

    /// Rows `m,n,r,mean,std,reference,delta`; `m` is left empty when unknown.
    pub fn csv_rows(&self, m: Option<u32>) -> String {
        let m = m.map(|m| m.to_string()).unwrap_or_default();
        let mut out = String::new();
        for r in 1..=self.r_max {
            let i = r as usize - 1;
            out.push_str(&format!(
                "{},{},{},{:e},{:e},{:e},{:e}\n",
                m,
                self.n,
                r,
                self.mean[i],
                self.std[i],
                self.reference[i],
                self.mean[i] - self.reference[i]
            ));
        }
        out
    }
}

pub const MOMENT_CSV_HEADER: &str = "m,n,r,mean,std,reference,delta\n";

/// Moments of (optionally a uniform subsample without replacement of) an
/// ensemble. Members are evaluated in parallel but merged by index, so the
/// result does not depend on the schedule.
pub fn ensemble_stats(
    specs: &[EnsembleSpec],
    r_max: u32,
    sample_count: Option<usize>,
    rng_seed: u64,
    reference_law: RefLaw,
    backend: CirculantBackend,
) -> Result<MomentReport> {
    if specs.is_empty() {
        return Err(Error::Domain("empty ensemble".into()));
    }
    let indices: Vec<usize> = match sample_count {
        None => (0..specs.len()).collect(),
        Some(k) if k > specs.len() => {
            return Err(Error::Domain(format!("cannot sample {k} of {} members", specs.len())));
        }
        Some(k) => {
            let mut picked = index::sample(&mut member_rng(rng_seed, 0), specs.len(), k).into_vec();
            picked.sort_unstable();
            picked
        }
    };
    // Pseudo members share one sequence; generate it once.
    let seq = specs[0].sequence()?;
    let results: Vec<Result<(usize, Vec<f64>)>> = indices
        .par_iter()
        .map(|&i| {
            let spec = &specs[i];
            let m = spec.realize_with(seq.as_ref())?;
            let sp = crate::eigen::matrix_spectrum(&m, backend)?;
            let sp = if spec.is_squared() { crate::eigen::spectrum_square(&sp) } else { sp };
            Ok((sp.n(), empirical_moments(&sp, r_max)))
        })
        .collect();
    let mut n = 0;
    let mut moments = Vec::with_capacity(results.len());
    for r in results {
        let (dim, mm) = r?;
        n = dim;
        moments.push(mm);
    }
    MomentReport::from_members(n, r_max, reference_law, indices, moments)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Domain("slope fit needs at least two paired points".into()));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::Domain("log-log fit needs positive values".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("slope fit needs distinct x values".into()));
    }
    Ok(sxy / sxx)
}
