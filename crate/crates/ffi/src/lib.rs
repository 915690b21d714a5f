//! C ABI over `golomb-rmt`.
//!
//! Objects cross the boundary as opaque handles that the caller releases
//! with the matching `*_free` function. Every fallible call returns a
//! [`GrmStatus`]; the message of the most recent failure on the calling
//! thread is available from [`grm_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use golomb_rmt::eigen::{self, CirculantBackend, Spectrum};
use golomb_rmt::ensembles::{self, EnsembleSpec};
use golomb_rmt::laws::{self, RefLaw};
use golomb_rmt::sequences::{self, MSeq};
use golomb_rmt::{Error, Gf2Poly};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Domain = 4,
    Capability = 5,
    DegenerateSeed = 6,
    PeriodMismatch = 7,
    NotMSequence = 8,
    NoConvergence = 9,
    Verification = 10,
    Io = 11,
    BufferTooSmall = 12,
    Panic = 13,
}

/// Opaque m-sequence.
pub struct GrmSequence(MSeq);

/// Opaque ascending eigenvalue list.
pub struct GrmSpectrum(Spectrum);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> GrmStatus {
    match err {
        Error::Parse { .. } => GrmStatus::Parse,
        Error::Domain(_) => GrmStatus::Domain,
        Error::Capability(_) => GrmStatus::Capability,
        Error::DegenerateSeed => GrmStatus::DegenerateSeed,
        Error::PeriodMismatch { .. } => GrmStatus::PeriodMismatch,
        Error::NotMSequence(_) => GrmStatus::NotMSequence,
        Error::NoConvergence { .. } => GrmStatus::NoConvergence,
        Error::Verification(_) => GrmStatus::Verification,
        Error::Io(_) => GrmStatus::Io,
        Error::Json(_) => GrmStatus::Parse,
    }
}

/// Runs `body`, converting errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), (GrmStatus, String)>) -> GrmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => GrmStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside golomb-rmt".into());
            GrmStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (GrmStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (GrmStatus, String) {
    (GrmStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (GrmStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (GrmStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `cap`) and returns the full message length excluding the NUL.
///
/// # Safety
/// `buf` must be null or point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn grm_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn grm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Generates one period of the m-sequence of `poly` (e.g. `"x^5+x^2+1"`)
/// from `seed` (a bit string or `"ones"`).
///
/// # Safety
/// `poly` and `seed` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn grm_sequence_new(
    poly: *const c_char,
    seed: *const c_char,
    out: *mut *mut GrmSequence,
) -> GrmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let f: Gf2Poly = read_str(poly, "poly")?.parse().map_err(lib_err)?;
        if !f.is_primitive().map_err(lib_err)? {
            return Err((GrmStatus::Domain, format!("{f} is not primitive")));
        }
        let m = f.degree().unwrap_or(0);
        let bits = sequences::parse_seed(read_str(seed, "seed")?, m).map_err(lib_err)?;
        let s = MSeq::new(f, &bits).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(GrmSequence(s)));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a handle from [`grm_sequence_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn grm_sequence_free(s: *mut GrmSequence) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Period length, or 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live sequence handle.
#[no_mangle]
pub unsafe extern "C" fn grm_sequence_len(s: *const GrmSequence) -> usize {
    s.as_ref().map_or(0, |s| s.0.len())
}

/// Writes the period as 0/1 bytes into `out`.
///
/// # Safety
/// `s` must be a live handle and `out` must point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn grm_sequence_bits(s: *const GrmSequence, out: *mut u8, cap: usize) -> GrmStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("sequence"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if cap < s.0.len() {
            return Err((GrmStatus::BufferTooSmall, format!("need {} bytes", s.0.len())));
        }
        for (i, b) in s.0.bits().iter().enumerate() {
            *out.add(i) = u8::from(b);
        }
        Ok(())
    })
}

/// Runs the full randomness battery; `*pass` is true when every check passes.
///
/// # Safety
/// `s` must be a live handle and `pass` writable.
#[no_mangle]
pub unsafe extern "C" fn grm_sequence_battery(s: *const GrmSequence, pass: *mut bool) -> GrmStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("sequence"))?;
        let pass = pass.as_mut().ok_or_else(|| null("pass"))?;
        *pass = sequences::run_battery(&s.0).pass();
        Ok(())
    })
}

/// Berlekamp-Massey linear complexity of `len` bytes, each 0 or 1.
///
/// # Safety
/// `bits` must point to `len` readable bytes and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn grm_linear_complexity(bits: *const u8, len: usize, out: *mut usize) -> GrmStatus {
    guard(|| {
        if bits.is_null() {
            return Err(null("bits"));
        }
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let slice = std::slice::from_raw_parts(bits, len);
        if slice.iter().any(|&b| b > 1) {
            return Err((GrmStatus::Domain, "bits must be 0 or 1".into()));
        }
        *out = sequences::berlekamp_massey(slice).complexity;
        Ok(())
    })
}

/// Spectrum of the circulant `sign * A_n(shift)` built from `s`.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grm_pseudo_spectrum(
    s: *const GrmSequence,
    shift: usize,
    sign: i8,
    out: *mut *mut GrmSpectrum,
) -> GrmStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("sequence"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let c = ensembles::build_pseudo(&s.0, shift, sign).map_err(lib_err)?;
        let sp = eigen::circulant_eigenvalues(&c, CirculantBackend::Direct).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(GrmSpectrum(sp)));
        Ok(())
    })
}

/// Spectrum of the matrix described by a JSON ensemble spec, e.g.
/// `{"family":"wigner","n":64,"rng_seed":1,"stream":0}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grm_spectrum_from_spec(json: *const c_char, out: *mut *mut GrmSpectrum) -> GrmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec: EnsembleSpec = serde_json::from_str(read_str(json, "json")?).map_err(|e| lib_err(e.into()))?;
        let sp = spec.spectrum(CirculantBackend::Direct).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(GrmSpectrum(sp)));
        Ok(())
    })
}

/// # Safety
/// `sp` must be null or a spectrum handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn grm_spectrum_free(sp: *mut GrmSpectrum) {
    if !sp.is_null() {
        drop(Box::from_raw(sp));
    }
}

/// Number of eigenvalues, or 0 for a null handle.
///
/// # Safety
/// `sp` must be null or a live spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn grm_spectrum_len(sp: *const GrmSpectrum) -> usize {
    sp.as_ref().map_or(0, |sp| sp.0.n())
}

/// Copies the ascending eigenvalues into `out`.
///
/// # Safety
/// `sp` must be a live handle and `out` must point to `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn grm_spectrum_values(sp: *const GrmSpectrum, out: *mut f64, cap: usize) -> GrmStatus {
    guard(|| {
        let sp = sp.as_ref().ok_or_else(|| null("spectrum"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let values = sp.0.values();
        if cap < values.len() {
            return Err((GrmStatus::BufferTooSmall, format!("need {} values", values.len())));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
        Ok(())
    })
}

/// `(1/n) sum lambda^r`.
///
/// # Safety
/// `sp` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grm_spectrum_moment(sp: *const GrmSpectrum, r: u32, out: *mut f64) -> GrmStatus {
    guard(|| {
        let sp = sp.as_ref().ok_or_else(|| null("spectrum"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = laws::empirical_moment(&sp.0, r);
        Ok(())
    })
}

/// Kolmogorov-Smirnov distance to the semicircle law on `[-1, 1]`.
///
/// # Safety
/// `sp` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grm_spectrum_ks_semicircle(sp: *const GrmSpectrum, out: *mut f64) -> GrmStatus {
    guard(|| {
        let sp = sp.as_ref().ok_or_else(|| null("spectrum"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = laws::ks_distance(&sp.0, &RefLaw::Semicircle);
        Ok(())
    })
}
