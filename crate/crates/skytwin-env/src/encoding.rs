//! Fixed-size agent observations, action decoding, and the shared reward.
//!
//! Sensor agents observe their own position plus every UAV; UAV agents
//! observe themselves plus a padded per-sensor block that is zeroed for
//! sensors not assigned to them. All features are normalized by the
//! reference constants below so in-bounds states stay within [0, 1].

use crate::config::WorldConfig;
use crate::error::{EnvError, Result};
use crate::world::{OffloadAssignment, OffloadTarget, SlotOutcome, UavControl, WorldState};

/// Dimensions and normalization constants shared by encoders, decoders,
/// and the networks built on top of them.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationLayout {
    pub num_uavs: usize,
    pub num_sensors: usize,
    pub allow_defer: bool,
    /// Area side used to normalize positions.
    pub area_side: f64,
    /// Step-count normalizer.
    pub step_ref: f64,
    /// Fidelity normalizer.
    pub fidelity_ref: f64,
    /// Slot-budget normalizer.
    pub budget_ref: f64,
}

impl ObservationLayout {
    pub const STEP_REF: f64 = 1000.0;
    pub const FIDELITY_REF: f64 = 150.0;
    pub const BUDGET_REF: f64 = 1000.0;

    pub fn new(config: &WorldConfig) -> Result<Self> {
        let layout = Self {
            num_uavs: config.num_uavs,
            num_sensors: config.num_sensors,
            allow_defer: config.allow_defer,
            area_side: config.area_side,
            step_ref: Self::STEP_REF,
            fidelity_ref: Self::FIDELITY_REF,
            budget_ref: Self::BUDGET_REF,
        };
        if layout.sensor_action_dim() == 0 {
            return Err(EnvError::InvalidConfig(
                "sensor action space is empty (no UAVs and no defer channel)".into(),
            ));
        }
        Ok(layout)
    }

    /// Own task spec + own position + one (x, y, budget) block per UAV.
    pub fn sensor_obs_dim(&self) -> usize {
        3 + 3 * self.num_uavs
    }

    /// Own position + one (flag, x, y, steps, fidelity) block per sensor.
    pub fn uav_obs_dim(&self) -> usize {
        2 + 5 * self.num_sensors
    }

    /// One score per UAV, plus the defer channel when enabled.
    pub fn sensor_action_dim(&self) -> usize {
        self.num_uavs + usize::from(self.allow_defer)
    }

    /// Heading, speed, and one step weight per sensor slot.
    pub fn uav_action_dim(&self) -> usize {
        2 + self.num_sensors
    }

    /// Width of the centralized critic input: every observation block then
    /// every action block, sensors before UAVs in both.
    pub fn critic_input_dim(&self) -> usize {
        self.num_sensors * self.sensor_obs_dim()
            + self.num_uavs * self.uav_obs_dim()
            + self.num_sensors * self.sensor_action_dim()
            + self.num_uavs * self.uav_action_dim()
    }
}

/// Observation for one sensor agent.
pub fn encode_sensor_obs(state: &WorldState, sensor_id: usize, layout: &ObservationLayout) -> Vec<f64> {
    let sensor = &state.sensors[sensor_id];
    let l = layout.area_side;
    let mut obs = Vec::with_capacity(layout.sensor_obs_dim());
    obs.push(sensor.steps_max / layout.step_ref);
    obs.push(sensor.x / l);
    obs.push(sensor.y / l);
    for uav in &state.uavs {
        obs.push(uav.x / l);
        obs.push(uav.y / l);
        obs.push(uav.slot_budget / layout.budget_ref);
    }
    obs
}

/// Observation for one UAV agent, given the slot's resolved assignment.
/// Sensor blocks not assigned to this UAV are zeroed.
pub fn encode_uav_obs(
    state: &WorldState,
    uav_id: usize,
    assignment: &OffloadAssignment,
    layout: &ObservationLayout,
) -> Vec<f64> {
    let uav = &state.uavs[uav_id];
    let l = layout.area_side;
    let mut obs = Vec::with_capacity(layout.uav_obs_dim());
    obs.push(uav.x / l);
    obs.push(uav.y / l);
    for (r, sensor) in state.sensors.iter().enumerate() {
        if assignment.target(r) == OffloadTarget::Uav(uav_id) {
            obs.push(1.0);
            obs.push(sensor.x / l);
            obs.push(sensor.y / l);
            obs.push(sensor.steps_max / layout.step_ref);
            obs.push(sensor.fidelity_max / layout.fidelity_ref);
        } else {
            obs.extend_from_slice(&[0.0; 5]);
        }
    }
    obs
}

/// Maps a raw sensor action to its offload choice by argmax, lowest index
/// winning ties. With the defer channel enabled, component 0 is defer and
/// component k selects UAV k-1.
pub fn decode_offload(raw_action: &[f64], layout: &ObservationLayout) -> Result<OffloadTarget> {
    if raw_action.len() != layout.sensor_action_dim() {
        return Err(EnvError::Contract(format!(
            "sensor action has {} components, layout wants {}",
            raw_action.len(),
            layout.sensor_action_dim()
        )));
    }
    let mut best = 0;
    for (k, v) in raw_action.iter().enumerate() {
        if *v > raw_action[best] {
            best = k;
        }
    }
    Ok(if layout.allow_defer {
        if best == 0 {
            OffloadTarget::Defer
        } else {
            OffloadTarget::Uav(best - 1)
        }
    } else {
        OffloadTarget::Uav(best)
    })
}

/// Maps a raw UAV action to heading, speed, and step weights. Components
/// are clipped to [-1, 1] first; heading spans [-pi, pi] and speed spans
/// the legal band.
pub fn decode_uav_control(raw_action: &[f64], config: &WorldConfig) -> Result<UavControl> {
    let expect = 2 + config.num_sensors;
    if raw_action.len() != expect {
        return Err(EnvError::Contract(format!(
            "UAV action has {} components, expected {expect}",
            raw_action.len()
        )));
    }
    let clip = |v: f64| v.clamp(-1.0, 1.0);
    let angle = clip(raw_action[0]) * std::f64::consts::PI;
    let speed = config.v_min + (clip(raw_action[1]) + 1.0) / 2.0 * (config.v_max - config.v_min);
    let weights = raw_action[2..].iter().map(|w| clip(*w)).collect();
    Ok(UavControl { angle, speed, weights })
}

/// Shared training reward: utility minus the penalty sum, divided by
/// `reward_scale` (1.0 leaves it untouched).
pub fn compute_reward(outcome: &SlotOutcome, reward_scale: f64) -> f64 {
    (outcome.utility - outcome.total_penalty()) / reward_scale
}

/// Concatenates every agent's observation and action into the centralized
/// critic input: sensor observations, UAV observations, sensor actions,
/// UAV actions, each in ascending agent order.
pub fn global_critic_input(
    sensor_obs: &[Vec<f64>],
    uav_obs: &[Vec<f64>],
    sensor_actions: &[Vec<f64>],
    uav_actions: &[Vec<f64>],
    layout: &ObservationLayout,
) -> Result<Vec<f64>> {
    let check = |name: &str, blocks: &[Vec<f64>], count: usize, dim: usize| -> Result<()> {
        if blocks.len() != count {
            return Err(EnvError::Contract(format!(
                "{name}: {} blocks for {count} agents",
                blocks.len()
            )));
        }
        for (i, b) in blocks.iter().enumerate() {
            if b.len() != dim {
                return Err(EnvError::Contract(format!(
                    "{name}[{i}] has {} features, expected {dim}",
                    b.len()
                )));
            }
        }
        Ok(())
    };
    check("sensor obs", sensor_obs, layout.num_sensors, layout.sensor_obs_dim())?;
    check("uav obs", uav_obs, layout.num_uavs, layout.uav_obs_dim())?;
    check(
        "sensor actions",
        sensor_actions,
        layout.num_sensors,
        layout.sensor_action_dim(),
    )?;
    check("uav actions", uav_actions, layout.num_uavs, layout.uav_action_dim())?;

    let mut out = Vec::with_capacity(layout.critic_input_dim());
    for block in sensor_obs.iter().chain(uav_obs).chain(sensor_actions).chain(uav_actions) {
        out.extend_from_slice(block);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::WorldState;

    fn config(n: usize, r: usize) -> WorldConfig {
        WorldConfig {
            num_uavs: n,
            num_sensors: r,
            ..WorldConfig::default()
        }
    }

    #[test]
    fn sensor_obs_matches_hand_normalization() {
        let cfg = config(1, 1);
        let layout = ObservationLayout::new(&cfg).unwrap();
        let mut state = WorldState::reset(&cfg, 0).unwrap();
        state.sensors[0].x = 0.0;
        state.sensors[0].y = 0.0;
        state.sensors[0].steps_max = 400.0;
        state.uavs[0].x = cfg.area_side;
        state.uavs[0].y = cfg.area_side;

        let obs = encode_sensor_obs(&state, 0, &layout);
        assert_eq!(obs, vec![0.4, 0.0, 0.0, 1.0, 1.0, 0.8]);
    }

    #[test]
    fn sensor_obs_center_position() {
        let cfg = config(2, 1);
        let layout = ObservationLayout::new(&cfg).unwrap();
        let mut state = WorldState::reset(&cfg, 0).unwrap();
        state.sensors[0].x = cfg.area_side / 2.0;
        state.sensors[0].y = cfg.area_side / 2.0;
        let obs = encode_sensor_obs(&state, 0, &layout);
        assert_eq!(obs[1], 0.5);
        assert_eq!(obs[2], 0.5);
    }

    #[test]
    fn obs_dims_follow_layout() {
        for (n, r) in [(1, 4), (5, 4), (10, 40)] {
            let cfg = config(n, r);
            let layout = ObservationLayout::new(&cfg).unwrap();
            let state = WorldState::reset(&cfg, 1).unwrap();
            assert_eq!(encode_sensor_obs(&state, 0, &layout).len(), 3 + 3 * n);
            let a = OffloadAssignment::all_defer(r);
            assert_eq!(encode_uav_obs(&state, 0, &a, &layout).len(), 2 + 5 * r);
        }
    }

    #[test]
    fn uav_obs_zero_blocks_and_assigned_block() {
        let cfg = config(2, 2);
        let layout = ObservationLayout::new(&cfg).unwrap();
        let mut state = WorldState::reset(&cfg, 2).unwrap();
        state.sensors[1].x = cfg.area_side;
        state.sensors[1].y = 0.0;
        state.sensors[1].steps_max = 500.0;
        state.sensors[1].fidelity_max = 150.0;

        let none = OffloadAssignment::all_defer(2);
        let obs = encode_uav_obs(&state, 0, &none, &layout);
        assert!(obs[2..].iter().all(|v| *v == 0.0));

        let some = OffloadAssignment::new(vec![OffloadTarget::Defer, OffloadTarget::Uav(0)]);
        let obs = encode_uav_obs(&state, 0, &some, &layout);
        assert_eq!(&obs[7..12], &[1.0, 1.0, 0.0, 0.5, 1.0]);
        // Same sensor is invisible to the other UAV.
        let other = encode_uav_obs(&state, 1, &some, &layout);
        assert!(other[2..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn decode_offload_argmax_and_ties() {
        let cfg = config(2, 1);
        let layout = ObservationLayout::new(&cfg).unwrap();
        assert_eq!(
            decode_offload(&[0.2, 0.9, -0.5], &layout).unwrap(),
            OffloadTarget::Uav(0)
        );
        assert_eq!(
            decode_offload(&[-1.0, -1.0, -1.0], &layout).unwrap(),
            OffloadTarget::Defer
        );
        let no_defer = ObservationLayout::new(&WorldConfig {
            allow_defer: false,
            ..config(2, 1)
        })
        .unwrap();
        assert_eq!(
            decode_offload(&[0.5, 0.5], &no_defer).unwrap(),
            OffloadTarget::Uav(0)
        );
        assert!(decode_offload(&[0.0], &layout).is_err());
    }

    #[test]
    fn decode_uav_control_endpoints() {
        let cfg = WorldConfig {
            v_min: 70.0,
            v_max: 150.0,
            ..config(1, 1)
        };
        let c = decode_uav_control(&[0.0, -1.0, 0.3], &cfg).unwrap();
        assert_eq!(c.angle, 0.0);
        assert_eq!(c.speed, 70.0);
        assert_eq!(c.weights, vec![0.3]);

        let c = decode_uav_control(&[1.0, 1.0, 0.0], &cfg).unwrap();
        assert!((c.angle - std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(c.speed, 150.0);

        let cfg_mid = WorldConfig { v_min: 70.0, v_max: 150.0, ..cfg };
        let c = decode_uav_control(&[0.0, 0.0, 0.0], &cfg_mid).unwrap();
        assert_eq!(c.speed, 110.0);

        // Out-of-range components are clipped before mapping.
        let c = decode_uav_control(&[5.0, -7.0, 2.0], &cfg_mid).unwrap();
        assert!((c.angle - std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(c.speed, 70.0);
        assert_eq!(c.weights, vec![1.0]);
    }

    #[test]
    fn reward_subtracts_penalties() {
        let outcome = SlotOutcome {
            fidelity: vec![0.0, 0.0],
            delay: vec![0.0, 0.0],
            steps: vec![0.0, 0.0],
            penalty: vec![0.2, 0.0],
            utility: 10.0,
        };
        assert!((compute_reward(&outcome, 1.0) - 9.8).abs() < 1e-12);
        let zero = SlotOutcome {
            fidelity: vec![],
            delay: vec![],
            steps: vec![],
            penalty: vec![],
            utility: 0.0,
        };
        assert_eq!(compute_reward(&zero, 1.0), 0.0);
        let scaled = SlotOutcome {
            penalty: vec![30.0],
            utility: 135.0,
            fidelity: vec![0.0],
            delay: vec![0.0],
            steps: vec![0.0],
        };
        assert!((compute_reward(&scaled, 1.0) - 105.0).abs() < 1e-12);
        assert!((compute_reward(&scaled, 10.0) - 10.5).abs() < 1e-12);
    }

    #[test]
    fn critic_input_layout_and_contract() {
        let cfg = config(1, 2);
        let layout = ObservationLayout::new(&cfg).unwrap();
        assert_eq!(layout.sensor_obs_dim(), 6);
        assert_eq!(layout.uav_obs_dim(), 12);
        assert_eq!(layout.sensor_action_dim(), 2);
        assert_eq!(layout.uav_action_dim(), 4);
        assert_eq!(layout.critic_input_dim(), 2 * 6 + 12 + 2 * 2 + 4);

        let so = vec![vec![0.1; 6], vec![0.2; 6]];
        let uo = vec![vec![0.3; 12]];
        let sa = vec![vec![0.4; 2], vec![0.5; 2]];
        let ua = vec![vec![0.6; 4]];
        let joint = global_critic_input(&so, &uo, &sa, &ua, &layout).unwrap();
        assert_eq!(joint.len(), layout.critic_input_dim());
        // Blocks appear in order: sensor obs, uav obs, sensor actions, uav actions.
        assert_eq!(joint[0], 0.1);
        assert_eq!(joint[6], 0.2);
        assert_eq!(joint[12], 0.3);
        assert_eq!(joint[24], 0.4);
        assert_eq!(joint[28], 0.6);

        // Dropping an agent's action is a contract error.
        let missing = global_critic_input(&so, &uo, &sa[..1].to_vec(), &ua, &layout);
        assert!(missing.is_err());
    }

    #[test]
    fn swapping_sensor_blocks_permutes_input_identically() {
        let cfg = config(1, 2);
        let layout = ObservationLayout::new(&cfg).unwrap();
        let so = vec![vec![1.0; 6], vec![2.0; 6]];
        let uo = vec![vec![3.0; 12]];
        let sa = vec![vec![4.0; 2], vec![5.0; 2]];
        let ua = vec![vec![6.0; 4]];
        let a = global_critic_input(&so, &uo, &sa, &ua, &layout).unwrap();
        let so_sw = vec![so[1].clone(), so[0].clone()];
        let sa_sw = vec![sa[1].clone(), sa[0].clone()];
        let b = global_critic_input(&so_sw, &uo, &sa_sw, &ua, &layout).unwrap();
        assert_eq!(&a[0..6], &b[6..12]);
        assert_eq!(&a[24..26], &b[26..28]);
    }
}
