//! The per-slot formula chain: channel, delays, fidelity, allocation,
//! mobility, penalties, and utility.
//!
//! Everything here is a pure function of its arguments; the world state
//! composes them in [`crate::world::WorldState::step`].

use crate::config::WorldConfig;
use crate::error::{EnvError, Result};

/// Offset added to shifted step weights so an all-minimum weight vector
/// still normalizes.
pub const WEIGHT_EPS: f64 = 1e-6;

/// Free-space power gain `h0 * d^-2` at 3-D separation `distance_3d`.
pub fn channel_gain(h0: f64, distance_3d: f64) -> Result<f64> {
    if distance_3d <= 0.0 {
        return Err(EnvError::InvalidInput(format!(
            "channel distance must be > 0, got {distance_3d}"
        )));
    }
    Ok(h0 / (distance_3d * distance_3d))
}

/// Achievable uplink rate in bits/second:
/// `bandwidth * log2(1 + tx_power * gain^2 / noise_sq)`.
///
/// The gain enters squared, so the free-space `d^-2` gain becomes an
/// effective `d^-4` law on receive power.
pub fn transmission_rate(tx_power: f64, gain: f64, noise_sq: f64, bandwidth: f64) -> Result<f64> {
    if noise_sq <= 0.0 {
        return Err(EnvError::InvalidInput(format!(
            "noise power must be > 0, got {noise_sq}"
        )));
    }
    if gain < 0.0 {
        return Err(EnvError::InvalidInput(format!("gain must be >= 0, got {gain}")));
    }
    let snr = tx_power * gain * gain / noise_sq;
    Ok(bandwidth * (1.0 + snr).log2())
}

/// Upload time for one task; zero when the task was not offloaded.
pub fn transmission_delay(assigned: bool, data_bits: f64, rate: f64) -> Result<f64> {
    if !assigned {
        return Ok(0.0);
    }
    if rate <= 0.0 {
        return Err(EnvError::DegenerateRate);
    }
    Ok(data_bits / rate)
}

/// Denoising time for `steps` inference steps at `freq` steps/second.
pub fn inference_delay(steps: f64, freq: f64) -> Result<f64> {
    if freq <= 0.0 {
        return Err(EnvError::InvalidInput(format!(
            "inference frequency must be > 0, got {freq}"
        )));
    }
    Ok(steps / freq)
}

/// Twin-quality contribution of running `steps` inference steps: a linear
/// ramp from zero at `s_min` to `f_max` at `s_max`, clamped on both sides.
pub fn fidelity_gain(steps: f64, s_min: f64, s_max: f64, f_max: f64) -> Result<f64> {
    if s_min >= s_max {
        return Err(EnvError::InvalidConfig(format!(
            "step thresholds must satisfy s_min < s_max, got [{s_min}, {s_max}]"
        )));
    }
    if steps < s_min {
        Ok(0.0)
    } else if steps > s_max {
        Ok(f_max)
    } else {
        Ok(f_max * (steps - s_min) / (s_max - s_min))
    }
}

/// Shifts raw weights from [-1, 1] into positive shares and scales them so
/// they sum to `budget`. The result is not yet capped.
pub fn normalize_steps_preclamp(raw_weights: &[f64], budget: f64) -> Vec<f64> {
    let shares: Vec<f64> = raw_weights.iter().map(|w| (w + 1.0) / 2.0 + WEIGHT_EPS).collect();
    let total: f64 = shares.iter().sum();
    shares.into_iter().map(|s| budget * s / total).collect()
}

/// Splits a UAV's slot budget across its assigned tasks.
///
/// Raw weights in [-1, 1] become positive shares via `(w + 1) / 2 + eps`,
/// are scaled to sum to `budget`, then each allocation is clamped to
/// `[0, cap]`. Budget freed by clamping is forfeited, which keeps the
/// per-UAV budget constraint an inequality.
pub fn normalize_steps(raw_weights: &[f64], budget: f64, caps: &[f64]) -> Result<Vec<f64>> {
    if raw_weights.is_empty() {
        return Ok(Vec::new());
    }
    if raw_weights.len() != caps.len() {
        return Err(EnvError::InvalidInput(format!(
            "weights/caps length mismatch: {} vs {}",
            raw_weights.len(),
            caps.len()
        )));
    }
    if budget <= 0.0 {
        return Err(EnvError::InvalidInput(format!("budget must be > 0, got {budget}")));
    }
    let alloc = normalize_steps_preclamp(raw_weights, budget);
    Ok(alloc
        .into_iter()
        .zip(caps)
        .map(|(a, &cap)| a.clamp(0.0, cap))
        .collect())
}

/// Moves a UAV one slot forward and clamps it back into the service area.
///
/// Speed is clamped into `[v_min, v_max]` before use, so there is no error
/// path; the config invariant on the flight-distance bound guarantees the
/// displacement stays legal.
pub fn advance_uav(x: f64, y: f64, angle_rad: f64, speed: f64, cfg: &WorldConfig) -> (f64, f64) {
    let v = speed.clamp(cfg.v_min, cfg.v_max);
    let nx = x + v * cfg.slot_duration * angle_rad.cos();
    let ny = y + v * cfg.slot_duration * angle_rad.sin();
    (nx.clamp(0.0, cfg.area_side), ny.clamp(0.0, cfg.area_side))
}

/// Penalty for missing the completion deadline and/or the fidelity floor.
pub fn violation_penalty(
    delay: f64,
    deadline: f64,
    fidelity: f64,
    fidelity_floor: f64,
    lambda_delay: f64,
    lambda_fidelity: f64,
) -> f64 {
    lambda_delay * (delay - deadline).max(0.0) + lambda_fidelity * (fidelity_floor - fidelity).max(0.0)
}

/// One slot's system utility: the weighted fidelity sum minus the weighted
/// per-task completion-delay sum.
pub fn slot_utility(fidelities: &[f64], delays: &[f64], phi1: f64, phi2: f64) -> Result<f64> {
    if fidelities.len() != delays.len() {
        return Err(EnvError::InvalidInput(format!(
            "fidelity/delay length mismatch: {} vs {}",
            fidelities.len(),
            delays.len()
        )));
    }
    Ok(fidelities
        .iter()
        .zip(delays)
        .map(|(f, d)| phi1 * f - phi2 * d)
        .sum())
}
