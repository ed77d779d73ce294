//! Per-phase peak resident set size.
//!
//! On Linux the kernel high-water mark (`VmHWM`) is reset by writing `5` to
//! `/proc/self/clear_refs`, which gives a true per-phase MaxRSS. Where the
//! reset is refused the mark is process-lifetime and only an upper bound.
//! Other platforms report nothing.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseMemory {
    pub peak_bytes: Option<u64>,
    /// Whether the high-water mark was reset at phase start.
    pub exact: bool,
}

#[cfg(target_os = "linux")]
fn status_field_kb(field: &str) -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    status
        .lines()
        .find_map(|l| l.strip_prefix(field))
        .and_then(|rest| rest.trim().trim_end_matches("kB").trim().parse().ok())
}

#[cfg(target_os = "linux")]
pub fn reset_peak() -> bool {
    std::fs::write("/proc/self/clear_refs", "5").is_ok()
}

#[cfg(not(target_os = "linux"))]
pub fn reset_peak() -> bool {
    false
}

#[cfg(target_os = "linux")]
pub fn peak_rss_bytes() -> Option<u64> {
    status_field_kb("VmHWM:").map(|kb| kb * 1024)
}

#[cfg(not(target_os = "linux"))]
pub fn peak_rss_bytes() -> Option<u64> {
    None
}

#[cfg(target_os = "linux")]
pub fn current_rss_bytes() -> Option<u64> {
    status_field_kb("VmRSS:").map(|kb| kb * 1024)
}

#[cfg(not(target_os = "linux"))]
pub fn current_rss_bytes() -> Option<u64> {
    None
}

/// Runs `f` and records the peak RSS reached while it ran.
pub fn measure_phase<T>(f: impl FnOnce() -> T) -> (T, PhaseMemory) {
    let exact = reset_peak();
    let out = f();
    (
        out,
        PhaseMemory {
            peak_bytes: peak_rss_bytes(),
            exact,
        },
    )
}
