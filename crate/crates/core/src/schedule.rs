//! Checkpoint horizons for finite-horizon limsup/liminf proxies.

use crate::error::{Error, Result};

pub const DEFAULT_FIRST_CHECKPOINT: usize = 100;
pub const DEFAULT_GROWTH_FACTOR: f64 = 1.4;

/// `n_j = ⌈n0·γ^j⌉` below `horizon`, followed by `horizon` itself.
pub fn geometric_schedule(horizon: usize, n0: usize, gamma: f64) -> Vec<usize> {
    let mut out = Vec::new();
    let mut j = 0;
    loop {
        let n = (n0 as f64 * gamma.powi(j)).ceil() as usize;
        if n >= horizon {
            break;
        }
        if out.last().map_or(true, |&last| n > last) {
            out.push(n);
        }
        j += 1;
    }
    out.push(horizon);
    out
}

/// The default schedule `n0 = 100`, `γ = 1.4`, capped at `horizon`.
pub fn default_schedule(horizon: usize) -> Vec<usize> {
    geometric_schedule(horizon, DEFAULT_FIRST_CHECKPOINT, DEFAULT_GROWTH_FACTOR)
}

pub(crate) fn validate(schedule: &[usize], min_len: usize) -> Result<()> {
    if schedule.len() < min_len {
        return Err(Error::InvalidArgument(format!(
            "schedule needs at least {min_len} checkpoints, got {}",
            schedule.len()
        )));
    }
    if schedule.first() == Some(&0) || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "schedule must be strictly increasing and start at n >= 1".into(),
        ));
    }
    Ok(())
}

/// Index of the first checkpoint inside the tail window `[⌈N/2⌉, N]`.
pub(crate) fn tail_start(schedule: &[usize]) -> usize {
    let horizon = *schedule.last().expect("non-empty schedule");
    let lower = horizon.div_ceil(2);
    schedule
        .iter()
        .position(|&n| n >= lower)
        .unwrap_or(schedule.len() - 1)
}
