//! Maps, scenario configuration and declarative rewards.

mod config;
pub mod map;
mod reward;

pub use config::{
    parse_config, parse_config_with, parse_resolution, Button, ConfigError, GameVariable, Mode, Rewards,
    ScenarioConfig, DEFAULT_MAP,
};
pub use map::{parse_map, Cell, CellPos, ItemKind, MapError, MapGrid, CELL_UNITS};
pub use reward::reward_for;
