use serde::{Deserialize, Serialize};

use crate::error::{EnvError, Result};

/// All physical and economic constants of one scenario.
///
/// Serializes as a flat JSON document; every field keeps its Rust name.
/// Missing fields fall back to the defaults below, unknown fields are
/// rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldConfig {
    /// Number of UAVs serving the area.
    pub num_uavs: usize,
    /// Number of roadside sensors generating one inference task per slot.
    pub num_sensors: usize,
    /// Side length of the square service area, meters.
    pub area_side: f64,
    /// Fixed UAV flight altitude, meters (> 0).
    pub uav_altitude: f64,
    /// Slot duration tau, seconds.
    pub slot_duration: f64,
    /// Slots per episode.
    pub slots_per_episode: usize,
    /// Minimum UAV speed, m/s.
    pub v_min: f64,
    /// Maximum UAV speed, m/s.
    pub v_max: f64,
    /// Maximum per-slot flight distance, meters. `None` derives v_max * tau.
    pub l_max: Option<f64>,
    /// Sensor transmit power, watts.
    pub tx_power: f64,
    /// Channel power gain at 1 m reference distance.
    pub ref_gain: f64,
    /// Interpret `ref_gain` as a dB figure instead of a linear gain.
    pub ref_gain_is_db: bool,
    /// Noise power sigma_0^2, watts.
    pub noise_power: f64,
    /// Channel bandwidth, hertz.
    pub bandwidth: f64,
    /// Per-slot sensing data size range [lo, hi], bits.
    pub data_size_range: [f64; 2],
    /// Inference steps below which a task yields zero fidelity.
    pub steps_min: f64,
    /// Range [lo, hi] the per-sensor saturation step count is drawn from.
    pub steps_max_range: [f64; 2],
    /// Fidelity floor required of every task.
    pub fidelity_min: f64,
    /// Range [lo, hi] the per-sensor maximum fidelity gain is drawn from.
    pub fidelity_max_range: [f64; 2],
    /// Inference steps a UAV can spend per slot.
    pub uav_slot_budget: f64,
    /// UAV inference speed, steps/second.
    pub uav_freq: f64,
    /// Utility weight on fidelity.
    pub phi1: f64,
    /// Utility weight on delay.
    pub phi2: f64,
    /// Per-task completion deadline, seconds (< slot_duration).
    pub deadline: f64,
    /// Penalty weight on deadline violations.
    pub lambda_delay: f64,
    /// Penalty weight on fidelity-floor violations.
    pub lambda_fidelity: f64,
    /// Whether a sensor may skip offloading for a slot.
    pub allow_defer: bool,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            num_uavs: 5,
            num_sensors: 20,
            area_side: 1000.0,
            uav_altitude: 50.0,
            slot_duration: 5.0,
            slots_per_episode: 100,
            v_min: 70.0,
            v_max: 150.0,
            l_max: None,
            tx_power: 0.1,
            ref_gain: 1.0,
            ref_gain_is_db: false,
            noise_power: 1e-13,
            bandwidth: 1e6,
            data_size_range: [0.0, 192_000.0],
            steps_min: 0.0,
            steps_max_range: [400.0, 600.0],
            fidelity_min: 0.0,
            fidelity_max_range: [50.0, 150.0],
            uav_slot_budget: 800.0,
            uav_freq: 400.0,
            phi1: 1.0,
            phi2: 10.0,
            deadline: 4.0,
            lambda_delay: 1.0,
            lambda_fidelity: 1.0,
            allow_defer: true,
        }
    }
}

impl WorldConfig {
    /// Effective maximum per-slot flight distance.
    pub fn max_leg(&self) -> f64 {
        self.l_max.unwrap_or(self.v_max * self.slot_duration)
    }

    /// Reference channel gain as a linear power ratio.
    pub fn ref_gain_linear(&self) -> f64 {
        if self.ref_gain_is_db {
            10f64.powf(self.ref_gain / 10.0)
        } else {
            self.ref_gain
        }
    }

    /// Checks every config invariant, naming the first violated one.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(EnvError::InvalidConfig(msg));
        if self.num_uavs == 0 {
            return fail("num_uavs must be >= 1".into());
        }
        if self.area_side <= 0.0 {
            return fail(format!("area_side must be > 0, got {}", self.area_side));
        }
        if self.uav_altitude <= 0.0 {
            return fail(format!("uav_altitude must be > 0, got {}", self.uav_altitude));
        }
        if self.slot_duration <= 0.0 {
            return fail(format!("slot_duration must be > 0, got {}", self.slot_duration));
        }
        if self.slots_per_episode == 0 {
            return fail("slots_per_episode must be >= 1".into());
        }
        if !(self.v_min > 0.0 && self.v_min <= self.v_max) {
            return fail(format!(
                "speeds must satisfy 0 < v_min <= v_max, got [{}, {}]",
                self.v_min, self.v_max
            ));
        }
        if let Some(l_max) = self.l_max {
            // The distance bound must stay satisfiable at full speed.
            if l_max < self.v_max * self.slot_duration {
                return fail(format!(
                    "l_max {} is below v_max * slot_duration = {}",
                    l_max,
                    self.v_max * self.slot_duration
                ));
            }
        }
        if self.tx_power < 0.0 {
            return fail(format!("tx_power must be >= 0, got {}", self.tx_power));
        }
        if self.ref_gain_linear() < 0.0 {
            return fail(format!("ref_gain must be >= 0, got {}", self.ref_gain));
        }
        if self.noise_power <= 0.0 {
            return fail(format!("noise_power must be > 0, got {}", self.noise_power));
        }
        if self.bandwidth <= 0.0 {
            return fail(format!("bandwidth must be > 0, got {}", self.bandwidth));
        }
        if !(0.0 <= self.data_size_range[0] && self.data_size_range[0] <= self.data_size_range[1]) {
            return fail(format!(
                "data_size_range must satisfy 0 <= lo <= hi, got {:?}",
                self.data_size_range
            ));
        }
        if self.steps_min < 0.0 {
            return fail(format!("steps_min must be >= 0, got {}", self.steps_min));
        }
        if !(self.steps_min < self.steps_max_range[0]
            && self.steps_max_range[0] <= self.steps_max_range[1])
        {
            return fail(format!(
                "steps_max_range must satisfy steps_min < lo <= hi, got {:?} with steps_min {}",
                self.steps_max_range, self.steps_min
            ));
        }
        if self.fidelity_min < 0.0 {
            return fail(format!("fidelity_min must be >= 0, got {}", self.fidelity_min));
        }
        if !(self.fidelity_min <= self.fidelity_max_range[0]
            && self.fidelity_max_range[0] <= self.fidelity_max_range[1])
        {
            return fail(format!(
                "fidelity_max_range must satisfy fidelity_min <= lo <= hi, got {:?}",
                self.fidelity_max_range
            ));
        }
        if self.uav_slot_budget <= 0.0 {
            return fail(format!("uav_slot_budget must be > 0, got {}", self.uav_slot_budget));
        }
        if self.uav_freq <= 0.0 {
            return fail(format!("uav_freq must be > 0, got {}", self.uav_freq));
        }
        if self.phi1 < 0.0 || self.phi2 < 0.0 {
            return fail(format!("utility weights must be >= 0, got {}, {}", self.phi1, self.phi2));
        }
        if !(self.deadline > 0.0 && self.deadline < self.slot_duration) {
            return fail(format!(
                "deadline must satisfy 0 < deadline < slot_duration, got {} vs {}",
                self.deadline, self.slot_duration
            ));
        }
        if self.lambda_delay < 0.0 || self.lambda_fidelity < 0.0 {
            return fail(format!(
                "penalty weights must be >= 0, got {}, {}",
                self.lambda_delay, self.lambda_fidelity
            ));
        }
        Ok(())
    }
}
