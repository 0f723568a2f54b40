//! C ABI for qmrlab.
//!
//! Every function returns a [`QmrStatus`]. On failure the message is kept
//! per thread and can be read with [`qmr_last_error_message`]. Handles are
//! opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::slice;

use qmrlab::classical::{condorcet_winner, pairwise_expectations, CondorcetOutcome};
use qmrlab::distribution::{Profile, RankingDistribution};
use qmrlab::experiment::{run_sweep, ExperimentConfig};
use qmrlab::metrics::js_divergence;
use qmrlab::preference::{factorial, lehmer_decode, lehmer_encode, Ranking, RankingIndex, MAX_ALTERNATIVES};
use qmrlab::qmr::{qmr_aggregate, winner_from_distribution, GmsSupport, QmrParams};
use qmrlab::qmr2::{run_qmr2, Qmr2Config, Qmr2Histogram};
use qmrlab::Error;

/// Result code of every exported function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BufferTooSmall = 3,
    CapExceeded = 4,
    Degenerate = 5,
    Config = 6,
    Io = 7,
    Panic = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QmrStatus {
    match e {
        Error::CapExceeded { .. } => QmrStatus::CapExceeded,
        Error::Degenerate(_) | Error::EmptySample | Error::RedrawLimit { .. } => QmrStatus::Degenerate,
        Error::Config { .. } | Error::Json(_) => QmrStatus::Config,
        Error::Io(_) => QmrStatus::Io,
        _ => QmrStatus::InvalidArgument,
    }
}

fn fail(status: QmrStatus, message: impl Into<String>) -> QmrStatus {
    set_error(message.into());
    status
}

fn guard(f: impl FnOnce() -> Result<(), QmrStatus>) -> QmrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QmrStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(QmrStatus::Panic, "internal panic"),
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, QmrStatus>;
}

impl<T> OrStatus<T> for qmrlab::Result<T> {
    fn or_status(self) -> Result<T, QmrStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), QmrStatus> {
    if p.is_null() {
        Err(fail(QmrStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

fn check_m(m: usize) -> Result<usize, QmrStatus> {
    if (1..=MAX_ALTERNATIVES).contains(&m) {
        Ok(factorial(m))
    } else {
        Err(fail(
            QmrStatus::InvalidArgument,
            format!("m = {m} is outside 1..={MAX_ALTERNATIVES}"),
        ))
    }
}

unsafe fn read_distribution(m: usize, probs: *const f64, len: usize) -> Result<RankingDistribution, QmrStatus> {
    non_null(probs, "probs")?;
    let count = check_m(m)?;
    if len != count {
        return Err(fail(QmrStatus::InvalidArgument, format!("expected {count} probabilities, got {len}")));
    }
    RankingDistribution::new(m, slice::from_raw_parts(probs, len).to_vec()).or_status()
}

fn winner_code(o: CondorcetOutcome) -> i32 {
    o.winner.map_or(-1, |a| a.0 as i32)
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qmr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Number of rankings of `m` alternatives, or 0 when `m` is unsupported.
#[no_mangle]
pub extern "C" fn qmr_ranking_count(m: usize) -> usize {
    if (1..=MAX_ALTERNATIVES).contains(&m) {
        factorial(m)
    } else {
        0
    }
}

/// Per-voter ranking distributions under construction.
pub struct QmrProfile {
    m: usize,
    voters: Vec<Vec<f64>>,
}

impl QmrProfile {
    fn build(&self) -> Result<Profile, QmrStatus> {
        Profile::from_vectors(self.m, self.voters.clone()).or_status()
    }
}

/// Creates a profile of `n` voters over `m` alternatives. Every voter starts
/// as a zero vector and must be set before use.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qmr_profile_new(m: usize, n: usize, out: *mut *mut QmrProfile) -> QmrStatus {
    guard(|| {
        non_null(out, "out")?;
        let count = check_m(m)?;
        if n == 0 {
            return Err(fail(QmrStatus::InvalidArgument, "profile needs at least one voter"));
        }
        let handle = Box::new(QmrProfile {
            m,
            voters: vec![vec![0.0; count]; n],
        });
        *out = Box::into_raw(handle);
        Ok(())
    })
}

/// Sets voter `voter` to the probability vector `probs` of length `m!`.
///
/// # Safety
/// `profile` must come from [`qmr_profile_new`]; `probs` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qmr_profile_set_voter(
    profile: *mut QmrProfile,
    voter: usize,
    probs: *const f64,
    len: usize,
) -> QmrStatus {
    guard(|| {
        non_null(profile, "profile")?;
        let p = &mut *profile;
        let d = read_distribution(p.m, probs, len)?;
        let slot = p.voters.get_mut(voter).ok_or_else(|| {
            fail(QmrStatus::InvalidArgument, format!("voter {voter} out of range"))
        })?;
        *slot = d.probs().to_vec();
        Ok(())
    })
}

/// # Safety
/// `profile` must come from [`qmr_profile_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn qmr_profile_free(profile: *mut QmrProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Classical Condorcet winner of the expected tallies; `-1` when none.
///
/// # Safety
/// `profile` must be a live handle and `out_winner` writable.
#[no_mangle]
pub unsafe extern "C" fn qmr_classical_winner(profile: *const QmrProfile, out_winner: *mut i32) -> QmrStatus {
    guard(|| {
        non_null(profile, "profile")?;
        non_null(out_winner, "out_winner")?;
        let p = (*profile).build()?;
        let tally = pairwise_expectations(&p).or_status()?;
        *out_winner = winner_code(condorcet_winner(&tally));
        Ok(())
    })
}

/// Writes the societal distribution of the quantum majority rule into `out`
/// (length `m!`).
///
/// # Safety
/// `profile` must be a live handle; `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qmr_aggregate_profile(
    profile: *const QmrProfile,
    delta: f64,
    epsilon: f64,
    global_gms_support: bool,
    out: *mut f64,
    len: usize,
) -> QmrStatus {
    guard(|| {
        non_null(profile, "profile")?;
        non_null(out, "out")?;
        let p = (*profile).build()?;
        let count = factorial(p.m());
        if len < count {
            return Err(fail(QmrStatus::BufferTooSmall, format!("need {count} doubles, got {len}")));
        }
        let params = QmrParams {
            delta,
            epsilon,
            gms_support: if global_gms_support {
                GmsSupport::Global
            } else {
                GmsSupport::Profile
            },
        };
        let rho = qmr_aggregate(&p, &params).or_status()?;
        slice::from_raw_parts_mut(out, count).copy_from_slice(rho.probs());
        Ok(())
    })
}

/// Winner of a societal distribution; `-1` when none.
///
/// # Safety
/// `probs` must point to `len` doubles and `out_winner` be writable.
#[no_mangle]
pub unsafe extern "C" fn qmr_winner_from_distribution(
    m: usize,
    probs: *const f64,
    len: usize,
    out_winner: *mut i32,
) -> QmrStatus {
    guard(|| {
        non_null(out_winner, "out_winner")?;
        let d = read_distribution(m, probs, len)?;
        *out_winner = winner_code(winner_from_distribution(&d));
        Ok(())
    })
}

/// Base-2 Jensen-Shannon divergence of two distributions of length `m!`.
///
/// # Safety
/// `p` and `q` must each point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmr_js_divergence(
    m: usize,
    p: *const f64,
    q: *const f64,
    len: usize,
    out: *mut f64,
) -> QmrStatus {
    guard(|| {
        non_null(out, "out")?;
        let a = read_distribution(m, p, len)?;
        let b = read_distribution(m, q, len)?;
        *out = js_divergence(&a, &b).or_status()?;
        Ok(())
    })
}

/// Lexicographic index of the ranking `order` (alternatives from best to worst).
///
/// # Safety
/// `order` must point to `m` values and `out_index` be writable.
#[no_mangle]
pub unsafe extern "C" fn qmr_lehmer_encode(order: *const u32, m: usize, out_index: *mut usize) -> QmrStatus {
    guard(|| {
        non_null(order, "order")?;
        non_null(out_index, "out_index")?;
        check_m(m)?;
        let order: Vec<usize> = slice::from_raw_parts(order, m).iter().map(|&x| x as usize).collect();
        let r = Ranking::new(order).or_status()?;
        *out_index = lehmer_encode(&r).0;
        Ok(())
    })
}

/// Writes the ranking with lexicographic index `index` into `out_order` (length `m`).
///
/// # Safety
/// `out_order` must point to `m` writable values.
#[no_mangle]
pub unsafe extern "C" fn qmr_lehmer_decode(index: usize, m: usize, out_order: *mut u32) -> QmrStatus {
    guard(|| {
        non_null(out_order, "out_order")?;
        let r = lehmer_decode(RankingIndex(index), m).or_status()?;
        let out = slice::from_raw_parts_mut(out_order, m);
        for (o, &a) in out.iter_mut().zip(r.order()) {
            *o = a as u32;
        }
        Ok(())
    })
}

unsafe fn read_str<'a>(s: *const c_char, name: &str) -> Result<&'a str, QmrStatus> {
    non_null(s, name)?;
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(QmrStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

/// Outcome histogram of a testbed run.
pub struct QmrHistogram {
    inner: Qmr2Histogram,
}

/// Runs the entanglement testbed described by a JSON config.
///
/// # Safety
/// `config_json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qmr2_run_json(config_json: *const c_char, out: *mut *mut QmrHistogram) -> QmrStatus {
    guard(|| {
        non_null(out, "out")?;
        let text = read_str(config_json, "config_json")?;
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: Qmr2Config = serde_path_to_error::deserialize(de)
            .map_err(|e| fail(QmrStatus::Config, format!("invalid config at `{}`: {}", e.path(), e.inner())))?;
        let inner = run_qmr2(&config).or_status()?;
        *out = Box::into_raw(Box::new(QmrHistogram { inner }));
        Ok(())
    })
}

/// Number of histogram slots: one for draws plus one per outcome.
///
/// # Safety
/// `hist` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qmr2_histogram_len(hist: *const QmrHistogram) -> usize {
    if hist.is_null() {
        0
    } else {
        (*hist).inner.counts.len()
    }
}

/// Copies the counts (slot 0 = draws, slot `i + 1` = outcome `i`) and the
/// number of rounds in which every ballot was discarded.
///
/// # Safety
/// `hist` must be a live handle; `out` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn qmr2_histogram_counts(
    hist: *const QmrHistogram,
    out: *mut u64,
    len: usize,
    out_all_discarded: *mut u64,
) -> QmrStatus {
    guard(|| {
        non_null(hist, "hist")?;
        non_null(out, "out")?;
        let h = &(*hist).inner;
        if len < h.counts.len() {
            return Err(fail(
                QmrStatus::BufferTooSmall,
                format!("need {} slots, got {len}", h.counts.len()),
            ));
        }
        slice::from_raw_parts_mut(out, h.counts.len()).copy_from_slice(&h.counts);
        if !out_all_discarded.is_null() {
            *out_all_discarded = h.all_discarded;
        }
        Ok(())
    })
}

/// # Safety
/// `hist` must come from [`qmr2_run_json`] or be null.
#[no_mangle]
pub unsafe extern "C" fn qmr2_histogram_free(hist: *mut QmrHistogram) {
    if !hist.is_null() {
        drop(Box::from_raw(hist));
    }
}

/// Runs a noisy sweep from a JSON experiment config and writes
/// `metrics.csv`, `runs.jsonl` and `manifest.json` into `out_dir`.
///
/// # Safety
/// Both arguments must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn qmr_sweep_json(config_json: *const c_char, out_dir: *const c_char) -> QmrStatus {
    guard(|| {
        let text = read_str(config_json, "config_json")?;
        let dir = read_str(out_dir, "out_dir")?;
        let config = ExperimentConfig::from_json(text).or_status()?;
        run_sweep(&config, Path::new(dir)).or_status()?;
        Ok(())
    })
}
