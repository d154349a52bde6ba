//! World model for UAV-assisted inference offloading with digital-twin
//! updating: scenario configuration, slot physics and economics, episode
//! state, and the fixed-size agent encodings used by the learners.

pub mod config;
pub mod encoding;
pub mod error;
pub mod physics;
pub mod world;

pub use config::WorldConfig;
pub use encoding::{
    compute_reward, decode_offload, decode_uav_control, encode_sensor_obs, encode_uav_obs,
    global_critic_input, ObservationLayout,
};
pub use error::{EnvError, Result};
pub use world::{
    mix_seed, OffloadAssignment, OffloadTarget, SensorState, SlotOutcome, UavControl, UavState,
    WorldState,
};
