//! Episode state and the two-phase slot step.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::WorldConfig;
use crate::error::{EnvError, Result};
use crate::physics;

/// One roadside sensor. Position is fixed for an episode; the data size is
/// redrawn every slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorState {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    /// Steps at which this sensor's task saturates its fidelity ramp.
    pub steps_max: f64,
    /// Fidelity gained at saturation.
    pub fidelity_max: f64,
    /// Bits to upload this slot.
    pub data_size: f64,
}

/// One UAV at the configured fixed altitude.
#[derive(Debug, Clone, PartialEq)]
pub struct UavState {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub slot_budget: f64,
    pub freq: f64,
}

/// Where one sensor's task runs this slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OffloadTarget {
    /// Skip this slot: zero fidelity, zero delay.
    Defer,
    Uav(usize),
}

/// Per-sensor offload choices for one slot. One target (or defer) per
/// sensor, so a task can never run on two UAVs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OffloadAssignment {
    targets: Vec<OffloadTarget>,
}

impl OffloadAssignment {
    pub fn new(targets: Vec<OffloadTarget>) -> Self {
        Self { targets }
    }

    /// All tasks deferred (the empty assignment).
    pub fn all_defer(num_sensors: usize) -> Self {
        Self {
            targets: vec![OffloadTarget::Defer; num_sensors],
        }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn target(&self, sensor: usize) -> OffloadTarget {
        self.targets[sensor]
    }

    pub fn targets(&self) -> &[OffloadTarget] {
        &self.targets
    }

    /// Sensor ids assigned to `uav`, in ascending order.
    pub fn assigned_to(&self, uav: usize) -> Vec<usize> {
        self.targets
            .iter()
            .enumerate()
            .filter_map(|(r, t)| (*t == OffloadTarget::Uav(uav)).then_some(r))
            .collect()
    }

    /// Checks shape and UAV indices against the scenario dimensions.
    pub fn validate(&self, num_sensors: usize, num_uavs: usize) -> Result<()> {
        if self.targets.len() != num_sensors {
            return Err(EnvError::Contract(format!(
                "assignment covers {} sensors, world has {}",
                self.targets.len(),
                num_sensors
            )));
        }
        for (r, t) in self.targets.iter().enumerate() {
            if let OffloadTarget::Uav(n) = t {
                if *n >= num_uavs {
                    return Err(EnvError::Contract(format!(
                        "sensor {r} targets UAV {n}, world has {num_uavs}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Per-UAV action for one slot after decoding.
#[derive(Debug, Clone, PartialEq)]
pub struct UavControl {
    /// Flight heading in radians.
    pub angle: f64,
    /// Requested speed in m/s (clamped to the legal band on use).
    pub speed: f64,
    /// Raw step weights in [-1, 1], one slot per sensor; only entries for
    /// sensors assigned to this UAV are read.
    pub weights: Vec<f64>,
}

/// Everything the world computed for one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotOutcome {
    /// Per-task fidelity gain (zero when deferred).
    pub fidelity: Vec<f64>,
    /// Per-task completion delay, transmission plus inference.
    pub delay: Vec<f64>,
    /// Per-task allocated inference steps.
    pub steps: Vec<f64>,
    /// Per-task constraint-violation penalty.
    pub penalty: Vec<f64>,
    /// Weighted fidelity-minus-delay sum over all tasks.
    pub utility: f64,
}

impl SlotOutcome {
    pub fn total_penalty(&self) -> f64 {
        self.penalty.iter().sum()
    }

    /// Number of tasks that violated a constraint this slot.
    pub fn violation_count(&self) -> usize {
        self.penalty.iter().filter(|p| **p > 0.0).count()
    }
}

/// The single source of truth for one episode: entity states, the slot
/// counter, and the RNG that drives all in-episode sampling.
#[derive(Debug, Clone)]
pub struct WorldState {
    config: WorldConfig,
    pub sensors: Vec<SensorState>,
    pub uavs: Vec<UavState>,
    pub slot: usize,
    rng: ChaCha8Rng,
}

impl WorldState {
    /// Samples a fresh episode. Identical `(config, seed)` pairs produce
    /// bit-identical states.
    pub fn reset(config: &WorldConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = config.area_side;

        let sensors = (0..config.num_sensors)
            .map(|id| SensorState {
                id,
                x: rng.random_range(0.0..=l),
                y: rng.random_range(0.0..=l),
                steps_max: rng.random_range(config.steps_max_range[0]..=config.steps_max_range[1]),
                fidelity_max: rng
                    .random_range(config.fidelity_max_range[0]..=config.fidelity_max_range[1]),
                data_size: rng.random_range(config.data_size_range[0]..=config.data_size_range[1]),
            })
            .collect();

        let uavs = (0..config.num_uavs)
            .map(|id| UavState {
                id,
                x: rng.random_range(0.0..=l),
                y: rng.random_range(0.0..=l),
                slot_budget: config.uav_slot_budget,
                freq: config.uav_freq,
            })
            .collect();

        Ok(Self {
            config: config.clone(),
            sensors,
            uavs,
            slot: 0,
            rng,
        })
    }

    pub fn config(&self) -> &WorldConfig {
        &self.config
    }

    /// 3-D distance from a sensor to a UAV, including altitude.
    pub fn separation(&self, sensor: usize, uav: usize) -> f64 {
        let s = &self.sensors[sensor];
        let u = &self.uavs[uav];
        let dx = u.x - s.x;
        let dy = u.y - s.y;
        let dz = self.config.uav_altitude;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// Advances one slot.
    ///
    /// Task accounting uses the slot-start UAV positions; movement is
    /// applied afterwards, then each sensor's data size is redrawn for the
    /// next slot.
    pub fn step(
        &mut self,
        assignment: &OffloadAssignment,
        controls: &[UavControl],
    ) -> Result<SlotOutcome> {
        let n_sensors = self.sensors.len();
        let n_uavs = self.uavs.len();
        assignment.validate(n_sensors, n_uavs)?;
        if controls.len() != n_uavs {
            return Err(EnvError::Contract(format!(
                "{} controls for {} UAVs",
                controls.len(),
                n_uavs
            )));
        }
        for (n, c) in controls.iter().enumerate() {
            if c.weights.len() != n_sensors {
                return Err(EnvError::Contract(format!(
                    "UAV {n} carries {} step weights, world has {} sensors",
                    c.weights.len(),
                    n_sensors
                )));
            }
        }

        let cfg = &self.config;
        let mut fidelity = vec![0.0; n_sensors];
        let mut delay = vec![0.0; n_sensors];
        let mut steps = vec![0.0; n_sensors];
        let mut penalty = vec![0.0; n_sensors];

        for (n, uav) in self.uavs.iter().enumerate() {
            let assigned = assignment.assigned_to(n);
            if assigned.is_empty() {
                continue;
            }
            let raw: Vec<f64> = assigned.iter().map(|&r| controls[n].weights[r]).collect();
            let caps: Vec<f64> = assigned.iter().map(|&r| self.sensors[r].steps_max).collect();
            let alloc = physics::normalize_steps(&raw, uav.slot_budget, &caps)?;

            for (&r, &a) in assigned.iter().zip(&alloc) {
                let sensor = &self.sensors[r];
                let gain =
                    physics::channel_gain(cfg.ref_gain_linear(), self.separation(r, n))?;
                let rate =
                    physics::transmission_rate(cfg.tx_power, gain, cfg.noise_power, cfg.bandwidth)?;
                let trans = physics::transmission_delay(true, sensor.data_size, rate)?;
                let infer = physics::inference_delay(a, uav.freq)?;
                let fid =
                    physics::fidelity_gain(a, cfg.steps_min, sensor.steps_max, sensor.fidelity_max)?;
                steps[r] = a;
                fidelity[r] = fid;
                delay[r] = trans + infer;
            }
        }

        for r in 0..n_sensors {
            penalty[r] = physics::violation_penalty(
                delay[r],
                cfg.deadline,
                fidelity[r],
                cfg.fidelity_min,
                cfg.lambda_delay,
                cfg.lambda_fidelity,
            );
        }

        let utility = physics::slot_utility(&fidelity, &delay, cfg.phi1, cfg.phi2)?;

        for (uav, control) in self.uavs.iter_mut().zip(controls) {
            let (x, y) = physics::advance_uav(uav.x, uav.y, control.angle, control.speed, cfg);
            uav.x = x;
            uav.y = y;
        }

        let range = cfg.data_size_range;
        for sensor in &mut self.sensors {
            sensor.data_size = self.rng.random_range(range[0]..=range[1]);
        }

        self.slot += 1;

        Ok(SlotOutcome {
            fidelity,
            delay,
            steps,
            penalty,
            utility,
        })
    }
}

/// Deterministically derives a sub-seed from a base seed and a salt.
///
/// SplitMix64 finalizer over the xor; used to give every episode, stream,
/// and evaluation pass its own independent seed.
pub fn mix_seed(base: u64, salt: u64) -> u64 {
    let mut z = base ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
