use std::path::PathBuf;

use mwt_core::arith::{parse_fixed_decimal, ScaledInt, DISPLAY_DIGITS, WORK_SCALE};
use mwt_core::layout::Mode;
use mwt_core::skeleton::BETA_PIECES;

/// Settings shared by every subcommand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    /// Fraction digits of interval arithmetic.
    pub precision: u32,
    /// Fraction digits shown in reports.
    pub display: u32,
    pub beta: ScaledInt,
    pub mode: Mode,
    pub workers: Option<usize>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision: WORK_SCALE,
            display: DISPLAY_DIGITS,
            beta: parse_fixed_decimal(BETA_PIECES, 4).expect("constant parses"),
            mode: Mode::Mini,
            workers: None,
            input: None,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn new(
        precision: u32,
        display: u32,
        beta: &str,
        mode: Mode,
        workers: Option<usize>,
    ) -> Result<RunConfig, String> {
        if display > precision {
            return Err(format!(
                "display digits {display} exceed precision {precision}"
            ));
        }
        let beta = parse_fixed_decimal(beta, 9).map_err(|e| format!("threshold {beta}: {e}"))?;
        let env = std::env::var("MWT_WORKERS").ok();
        let workers = match env.as_deref().map(str::trim) {
            Some(v) if !v.is_empty() => Some(
                v.parse::<usize>()
                    .ok()
                    .filter(|&n| n > 0)
                    .ok_or_else(|| format!("MWT_WORKERS={v} is not a positive count"))?,
            ),
            _ => workers,
        };
        Ok(RunConfig {
            precision,
            display,
            beta,
            mode,
            workers,
            input: None,
            output: None,
        })
    }

    /// Size the global worker pool; only the first call in a process counts.
    pub fn apply_workers(&self) {
        if let Some(n) = self.workers {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}
