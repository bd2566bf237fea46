//! C ABI for `fading_stream`.
//!
//! Every fallible function returns an [`FsStatus`] and writes its result
//! through an out-pointer. On failure, [`fs_last_error_message`] describes the
//! most recent error on the calling thread. Objects are opaque handles created
//! by `*_new`/`*_run` functions and released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fading_stream::experiment::{self, ExperimentConfig, ResultTable};
use fading_stream::{analytics, asymptotics, informed, ChannelParams, DecodeVector, Error};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    ConfigError = 3,
    NumericError = 4,
    IoError = 5,
    InvalidUtf8 = 6,
    IndexOutOfRange = 7,
    Panic = 8,
}

/// Channel parameters (SNR, rate, block count) with Rayleigh fading.
pub struct FsChannel {
    params: ChannelParams,
}

/// Output of an experiment run.
pub struct FsResultTable {
    table: ResultTable,
    csv: CString,
    labels: Vec<CString>,
}

/// One row of a result table. `b` is 0 for schemes without a window.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FsRow {
    pub sweep_value: f64,
    pub b: usize,
    pub avg_throughput_bpcu: f64,
    pub avg_decoded_msgs: f64,
    pub avg_max_delay: f64,
    pub stderr_throughput: f64,
    pub stderr_delay: f64,
    pub trials: u64,
}

/// Floor/ceil bounds for windowed time-sharing.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FsWtsBounds {
    pub delay_lower: f64,
    pub delay_upper: f64,
    pub decoded_lower: f64,
    pub decoded_upper: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> FsStatus {
    match e {
        Error::Parameter { .. } => FsStatus::InvalidParameter,
        Error::Numeric(_) => FsStatus::NumericError,
        Error::Config { .. } => FsStatus::ConfigError,
        Error::Io { .. } => FsStatus::IoError,
    }
}

fn fail(status: FsStatus, msg: impl Into<String>) -> FsStatus {
    set_last_error(msg);
    status
}

/// Runs `f`, turning library errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), FsStatus>) -> FsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FsStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(FsStatus::Panic, "internal panic"),
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, FsStatus>;
}

impl<T> OrStatus<T> for fading_stream::Result<T> {
    fn or_status(self) -> Result<T, FsStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), FsStatus> {
    if p.is_null() {
        Err(fail(FsStatus::NullPointer, format!("`{name}` is null")))
    } else {
        Ok(())
    }
}

/// Message of the last error raised on this thread, or an empty string.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a Rayleigh channel handle.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn fs_channel_new(snr_db: f64, rate: f64, blocks: usize, out: *mut *mut FsChannel) -> FsStatus {
    guard(|| {
        non_null(out, "out")?;
        let params = ChannelParams::new(snr_db, rate, blocks).or_status()?;
        *out = Box::into_raw(Box::new(FsChannel { params }));
        Ok(())
    })
}

/// Releases a channel handle. Null is ignored.
///
/// # Safety
/// `channel` must come from [`fs_channel_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fs_channel_free(channel: *mut FsChannel) {
    if !channel.is_null() {
        drop(Box::from_raw(channel));
    }
}

unsafe fn with_channel(
    channel: *const FsChannel,
    out: *mut f64,
    f: impl FnOnce(&ChannelParams) -> fading_stream::Result<f64>,
) -> FsStatus {
    guard(|| {
        non_null(channel, "channel")?;
        non_null(out, "out")?;
        *out = f(&(*channel).params).or_status()?;
        Ok(())
    })
}

/// Probability that one block supports the rate.
///
/// # Safety
/// `channel` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fs_channel_decode_success_prob(channel: *const FsChannel, out: *mut f64) -> FsStatus {
    with_channel(channel, out, |p| Ok(p.decode_success_prob()))
}

/// Probability that `window` blocks jointly deliver one packet.
///
/// # Safety
/// `channel` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fs_channel_window_success_prob(
    channel: *const FsChannel,
    window: usize,
    out: *mut f64,
) -> FsStatus {
    with_channel(channel, out, |p| p.window_success_prob(window))
}

/// Mean capacity in bits per channel use.
///
/// # Safety
/// `channel` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fs_channel_mean_capacity(channel: *const FsChannel, out: *mut f64) -> FsStatus {
    with_channel(channel, out, ChannelParams::mean_capacity)
}

/// Asymptotically optimal pre-buffered fraction `1/(R/C̄ + 1)`.
///
/// # Safety
/// `channel` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fs_channel_alpha_opt(channel: *const FsChannel, out: *mut f64) -> FsStatus {
    with_channel(channel, out, asymptotics::alpha_opt)
}

/// `Pr{longest run of failures ≥ d}` over `m` Bernoulli(`p`) trials, where
/// `p` is the success probability. `degraded` (nullable) reports whether the
/// closed form had to fall back to the matrix recursion.
///
/// # Safety
/// `out` must be valid; `degraded` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn fs_run_tail(m: usize, p: f64, d: usize, out: *mut f64, degraded: *mut bool) -> FsStatus {
    guard(|| {
        non_null(out, "out")?;
        let est = analytics::run_tail_partial_fraction(m, p, d).or_status()?;
        *out = est.value;
        if !degraded.is_null() {
            *degraded = est.degraded;
        }
        Ok(())
    })
}

/// Mean longest run of failures over `m` Bernoulli(`p`) trials.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fs_mt_mean_max_delay(m: usize, p: f64, out: *mut f64) -> FsStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = analytics::mt_mean_max_delay(m, p).or_status()?;
        Ok(())
    })
}

/// Floor/ceil delay and decoded-packet bounds for windows of `b` blocks.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fs_wts_delay_bounds(m: usize, b: usize, p_b: f64, out: *mut FsWtsBounds) -> FsStatus {
    guard(|| {
        non_null(out, "out")?;
        let w = analytics::wts_delay_bounds(m, b, p_b).or_status()?;
        *out = FsWtsBounds {
            delay_lower: w.delay_lower,
            delay_upper: w.delay_upper,
            decoded_lower: w.decoded_lower,
            decoded_upper: w.decoded_upper,
        };
        Ok(())
    })
}

/// Moves the decoding positions of `bits` (length `len`, entries 0 or 1) to
/// minimize the longest gap without losing packets. Writes the new pattern to
/// `out_bits` (length `len`) and the gap to `out_delay`.
///
/// # Safety
/// `bits` and `out_bits` must point to `len` readable/writable bytes;
/// `out_delay` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fs_min_delay_max_rate(
    bits: *const u8,
    len: usize,
    out_bits: *mut u8,
    out_delay: *mut usize,
) -> FsStatus {
    guard(|| {
        non_null(out_delay, "out_delay")?;
        if len > 0 {
            non_null(bits, "bits")?;
            non_null(out_bits, "out_bits")?;
        }
        let input = if len == 0 { &[][..] } else { std::slice::from_raw_parts(bits, len) };
        if let Some(bad) = input.iter().find(|&&b| b > 1) {
            return Err(fail(FsStatus::InvalidParameter, format!("bit value {bad} is not 0 or 1")));
        }
        let (s, delay) = informed::min_delay_max_rate(&DecodeVector::from_bits(input));
        if len > 0 {
            ptr::copy_nonoverlapping(s.to_u8().as_ptr(), out_bits, len);
        }
        *out_delay = delay;
        Ok(())
    })
}

/// Parses a TOML experiment description, runs it and returns the table.
///
/// # Safety
/// `config_toml` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fs_experiment_run_toml(config_toml: *const c_char, out: *mut *mut FsResultTable) -> FsStatus {
    guard(|| {
        non_null(config_toml, "config_toml")?;
        non_null(out, "out")?;
        let text = CStr::from_ptr(config_toml)
            .to_str()
            .map_err(|e| fail(FsStatus::InvalidUtf8, e.to_string()))?;
        let config = ExperimentConfig::from_toml(text).or_status()?;
        let table = experiment::run_experiment(&config).or_status()?;
        let csv = experiment::render_csv(&table).or_status()?;
        let csv = CString::new(csv).map_err(|e| fail(FsStatus::InvalidUtf8, e.to_string()))?;
        let labels = table
            .rows
            .iter()
            .map(|r| CString::new(r.scheme.replace('\0', " ")).unwrap_or_default())
            .collect();
        *out = Box::into_raw(Box::new(FsResultTable { table, csv, labels }));
        Ok(())
    })
}

/// Releases a result table. Null is ignored.
///
/// # Safety
/// `table` must come from [`fs_experiment_run_toml`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fs_result_table_free(table: *mut FsResultTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of rows; 0 for a null handle.
///
/// # Safety
/// `table` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn fs_result_table_len(table: *const FsResultTable) -> usize {
    table.as_ref().map_or(0, |t| t.table.rows.len())
}

/// Copies row `index` into `out`.
///
/// # Safety
/// `table` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fs_result_table_row(table: *const FsResultTable, index: usize, out: *mut FsRow) -> FsStatus {
    guard(|| {
        non_null(table, "table")?;
        non_null(out, "out")?;
        let t = &*table;
        let row = t.table.rows.get(index).ok_or_else(|| {
            fail(FsStatus::IndexOutOfRange, format!("row {index} of {}", t.table.rows.len()))
        })?;
        let m = &row.metrics;
        *out = FsRow {
            sweep_value: row.sweep_value,
            b: row.b.unwrap_or(0),
            avg_throughput_bpcu: m.avg_throughput_bpcu,
            avg_decoded_msgs: m.avg_decoded_msgs,
            avg_max_delay: m.avg_max_delay_blocks,
            stderr_throughput: m.stderr_throughput,
            stderr_delay: m.stderr_delay,
            trials: m.trials,
        };
        Ok(())
    })
}

/// Scheme label of row `index`, owned by the table; null when out of range.
///
/// # Safety
/// `table` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn fs_result_table_scheme(table: *const FsResultTable, index: usize) -> *const c_char {
    table
        .as_ref()
        .and_then(|t| t.labels.get(index))
        .map_or(ptr::null(), |s| s.as_ptr())
}

/// The table as CSV text, owned by the table.
///
/// # Safety
/// `table` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn fs_result_table_csv(table: *const FsResultTable) -> *const c_char {
    table.as_ref().map_or(ptr::null(), |t| t.csv.as_ptr())
}
