//! `.cfg` scenario format.
//!
//! ```text
//! # comments start with '#'
//! map = arena.map              # path, relative to the config file
//! mode = SYNC_PLAYER
//! living_reward = -0.01
//! available_buttons = { ATTACK MOVE_FORWARD TURN_LEFT TURN_RIGHT }
//! ```
//!
//! Keys are case-insensitive. A value starting with `{` is a list that may
//! span several lines up to the matching `}`. The map may also be given
//! inline as `map = { <rows> }`; inside that block `#` is a wall, not a
//! comment.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::bots::BotKind;
use crate::render::{PixelFormat, RenderOptions};
use crate::sim::{Buttons, Rules, Weapon};

use super::map::{parse_map, MapError, MapGrid};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: invalid value '{value}' for '{key}': {reason}")]
    BadValue { line: usize, key: String, value: String, reason: String },
    #[error("line {line}: expected 'key = value'")]
    Syntax { line: usize },
    #[error("line {line}: unterminated list")]
    Unterminated { line: usize },
    #[error("duplicate entry '{0}'")]
    Duplicate(String),
    #[error("no map given")]
    MissingMap,
    #[error("cannot read map '{path}': {source}")]
    MapIo { path: String, source: std::io::Error },
    #[error("map: {0}")]
    Map(#[from] MapError),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    SyncPlayer,
    SyncSpectator,
    AsyncPlayer,
    AsyncSpectator,
}

impl Mode {
    pub fn is_sync(self) -> bool {
        matches!(self, Mode::SyncPlayer | Mode::SyncSpectator)
    }

    pub fn is_spectator(self) -> bool {
        matches!(self, Mode::SyncSpectator | Mode::AsyncSpectator)
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::SyncPlayer => "SYNC_PLAYER",
            Mode::SyncSpectator => "SYNC_SPECTATOR",
            Mode::AsyncPlayer => "ASYNC_PLAYER",
            Mode::AsyncSpectator => "ASYNC_SPECTATOR",
        }
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Mode, String> {
        match s.to_ascii_uppercase().as_str() {
            "SYNC_PLAYER" | "PLAYER" => Ok(Mode::SyncPlayer),
            "SYNC_SPECTATOR" | "SPECTATOR" => Ok(Mode::SyncSpectator),
            "ASYNC_PLAYER" => Ok(Mode::AsyncPlayer),
            "ASYNC_SPECTATOR" => Ok(Mode::AsyncSpectator),
            _ => Err("expected SYNC_PLAYER, SYNC_SPECTATOR, ASYNC_PLAYER or ASYNC_SPECTATOR".into()),
        }
    }
}

/// Buttons an agent may be given. `TurnDelta` is the analog turn axis.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Button {
    Attack,
    MoveForward,
    MoveBackward,
    MoveLeft,
    MoveRight,
    TurnLeft,
    TurnRight,
    SelectWeapon1,
    SelectWeapon2,
    TurnDelta,
}

impl Button {
    pub const ALL: [Button; 10] = [
        Button::Attack,
        Button::MoveForward,
        Button::MoveBackward,
        Button::MoveLeft,
        Button::MoveRight,
        Button::TurnLeft,
        Button::TurnRight,
        Button::SelectWeapon1,
        Button::SelectWeapon2,
        Button::TurnDelta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Button::Attack => "ATTACK",
            Button::MoveForward => "MOVE_FORWARD",
            Button::MoveBackward => "MOVE_BACKWARD",
            Button::MoveLeft => "MOVE_LEFT",
            Button::MoveRight => "MOVE_RIGHT",
            Button::TurnLeft => "TURN_LEFT",
            Button::TurnRight => "TURN_RIGHT",
            Button::SelectWeapon1 => "SELECT_WEAPON_1",
            Button::SelectWeapon2 => "SELECT_WEAPON_2",
            Button::TurnDelta => "TURN_DELTA",
        }
    }

    /// Bit in [`Buttons`], or `None` for the analog axis.
    pub fn bit(self) -> Option<u32> {
        Some(match self {
            Button::Attack => Buttons::ATTACK,
            Button::MoveForward => Buttons::MOVE_FORWARD,
            Button::MoveBackward => Buttons::MOVE_BACKWARD,
            Button::MoveLeft => Buttons::MOVE_LEFT,
            Button::MoveRight => Buttons::MOVE_RIGHT,
            Button::TurnLeft => Buttons::TURN_LEFT,
            Button::TurnRight => Buttons::TURN_RIGHT,
            Button::SelectWeapon1 => Buttons::SELECT_WEAPON_1,
            Button::SelectWeapon2 => Buttons::SELECT_WEAPON_2,
            Button::TurnDelta => return None,
        })
    }
}

impl FromStr for Button {
    type Err = String;
    fn from_str(s: &str) -> Result<Button, String> {
        let up = s.to_ascii_uppercase();
        Button::ALL
            .iter()
            .copied()
            .find(|b| b.name() == up)
            .ok_or_else(|| format!("unknown button '{s}'"))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum GameVariable {
    Health,
    Armor,
    SelectedWeapon,
    SelectedWeaponAmmo,
    FragCount,
    KillCount,
    DeathCount,
    HitsTaken,
    DamageTaken,
    ItemCount,
    PositionX,
    PositionY,
    Angle,
}

impl GameVariable {
    pub const ALL: [GameVariable; 13] = [
        GameVariable::Health,
        GameVariable::Armor,
        GameVariable::SelectedWeapon,
        GameVariable::SelectedWeaponAmmo,
        GameVariable::FragCount,
        GameVariable::KillCount,
        GameVariable::DeathCount,
        GameVariable::HitsTaken,
        GameVariable::DamageTaken,
        GameVariable::ItemCount,
        GameVariable::PositionX,
        GameVariable::PositionY,
        GameVariable::Angle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GameVariable::Health => "HEALTH",
            GameVariable::Armor => "ARMOR",
            GameVariable::SelectedWeapon => "SELECTED_WEAPON",
            GameVariable::SelectedWeaponAmmo => "SELECTED_WEAPON_AMMO",
            GameVariable::FragCount => "FRAGCOUNT",
            GameVariable::KillCount => "KILLCOUNT",
            GameVariable::DeathCount => "DEATHCOUNT",
            GameVariable::HitsTaken => "HITS_TAKEN",
            GameVariable::DamageTaken => "DAMAGE_TAKEN",
            GameVariable::ItemCount => "ITEMCOUNT",
            GameVariable::PositionX => "POSITION_X",
            GameVariable::PositionY => "POSITION_Y",
            GameVariable::Angle => "ANGLE",
        }
    }
}

impl FromStr for GameVariable {
    type Err = String;
    fn from_str(s: &str) -> Result<GameVariable, String> {
        let up = s.to_ascii_uppercase();
        GameVariable::ALL
            .iter()
            .copied()
            .find(|v| v.name() == up)
            .ok_or_else(|| format!("unknown game variable '{s}'"))
    }
}

/// Declarative reward terms, all defaulting to zero.
#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct Rewards {
    pub living_reward: f64,
    pub death_penalty: f64,
    pub kill_reward: f64,
    pub suicide_penalty: f64,
    pub item_reward: f64,
    pub damage_taken_penalty_per_hp: f64,
    pub damage_inflicted_reward_per_hp: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    /// Name used for the map in reports (file stem, or `inline`).
    pub map_name: String,
    pub map_text: String,
    pub map: MapGrid,
    pub mode: Mode,
    pub render: RenderOptions,
    pub available_buttons: Vec<Button>,
    pub available_game_variables: Vec<GameVariable>,
    pub rewards: Rewards,
    pub episode_timeout: u32,
    pub frag_limit: u32,
    pub episode_ends_on_death: bool,
    pub respawn_delay: u32,
    pub spawn_protection: u32,
    pub start_weapon: Weapon,
    pub start_bullets: u32,
    pub start_rockets: u32,
    pub seed: u64,
    pub players: usize,
    /// Built-in bots filling player slots 1.. in a local session.
    pub bots: Vec<BotKind>,
    pub player_name: String,
    pub colorset: u8,
}

/// Built-in arena behind [`ScenarioConfig::default`].
pub const DEFAULT_MAP: &str = "\
################
#S.....#......S#
#..a...#...M...#
#......B.......#
#..##......##..#
#..#...RA...#..#
#..#........#..#
#......r.......#
#S.....M......S#
################";

impl ScenarioConfig {
    /// Built-in defaults around the given map.
    pub fn with_map(map_name: &str, map_text: &str) -> Result<ScenarioConfig, ConfigError> {
        let map = parse_map(map_text)?;
        Ok(ScenarioConfig {
            map_name: map_name.to_string(),
            map_text: map.to_text(),
            map,
            mode: Mode::SyncPlayer,
            render: RenderOptions::default(),
            available_buttons: vec![Button::TurnLeft, Button::TurnRight, Button::Attack],
            available_game_variables: vec![GameVariable::Health, GameVariable::SelectedWeaponAmmo],
            rewards: Rewards::default(),
            episode_timeout: 21_000,
            frag_limit: 0,
            episode_ends_on_death: false,
            respawn_delay: 0,
            spawn_protection: 70,
            start_weapon: Weapon::Pistol,
            start_bullets: 50,
            start_rockets: 0,
            seed: 1,
            players: 1,
            bots: Vec::new(),
            player_name: "Player".into(),
            colorset: 0,
        })
    }

    pub fn rules(&self) -> Rules {
        Rules {
            respawn_delay: self.respawn_delay,
            spawn_protection: self.spawn_protection,
            start_weapon: self.start_weapon,
            start_bullets: self.start_bullets,
            start_rockets: self.start_rockets,
        }
    }

    /// Reads a config file; a map path is resolved against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<ScenarioConfig, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        parse_config_with(&text, |p| {
            let full = base.join(p);
            std::fs::read_to_string(&full).map_err(|e| ConfigError::MapIo { path: p.to_string(), source: e })
        })
    }

    /// Checks the cross-field invariants.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.episode_timeout == 0 && self.frag_limit == 0 {
            return Err(ConfigError::Invalid("episode_timeout or frag_limit must be positive".into()));
        }
        if self.players == 0 || self.players > crate::sim::MAX_PLAYERS {
            return Err(ConfigError::Invalid(format!("players must be 1..=16, got {}", self.players)));
        }
        if self.bots.len() >= self.players && !self.bots.is_empty() {
            return Err(ConfigError::Invalid("more bots than free player slots".into()));
        }
        for (i, b) in self.available_buttons.iter().enumerate() {
            if self.available_buttons[..i].contains(b) {
                return Err(ConfigError::Duplicate(b.name().into()));
            }
        }
        for (i, v) in self.available_game_variables.iter().enumerate() {
            if self.available_game_variables[..i].contains(v) {
                return Err(ConfigError::Duplicate(v.name().into()));
            }
        }
        if self.render.width == 0 || self.render.height == 0 {
            return Err(ConfigError::Invalid("screen resolution must be at least 1x1".into()));
        }
        Ok(())
    }

    /// Self-contained text with the map inline.
    pub fn to_text(&self) -> String {
        let mut s = self.header_text();
        let _ = writeln!(s, "map_name = {}", self.map_name);
        s.push_str("map = {\n");
        for row in self.map_text.lines() {
            let _ = writeln!(s, "    {row}");
        }
        s.push_str("}\n");
        s
    }

    /// Config text referencing the map by name, plus the map text. The pair
    /// round-trips through [`ScenarioConfig::from_parts`].
    pub fn to_parts(&self) -> (String, String) {
        let mut s = self.header_text();
        let _ = writeln!(s, "map = {}", self.map_name);
        (s, self.map_text.clone())
    }

    pub fn from_parts(config_text: &str, map_text: &str) -> Result<ScenarioConfig, ConfigError> {
        parse_config_with(config_text, |_| Ok(map_text.to_string()))
    }

    fn header_text(&self) -> String {
        let mut s = String::new();
        let r = &self.rewards;
        let o = &self.render;
        let list = |items: Vec<&str>| format!("{{ {} }}", items.join(" "));
        let _ = writeln!(s, "mode = {}", self.mode.name());
        let _ = writeln!(s, "screen_resolution = {}x{}", o.width, o.height);
        let _ = writeln!(s, "screen_format = {}", o.format.name());
        let _ = writeln!(s, "render_crosshair = {}", o.crosshair);
        let _ = writeln!(s, "render_hud = {}", o.hud);
        let _ = writeln!(s, "depth_buffer_enabled = {}", o.depth_enabled);
        let _ = writeln!(s, "labels_buffer_enabled = {}", o.labels_enabled);
        let _ = writeln!(s, "automap_buffer_enabled = {}", o.automap_enabled);
        let _ = writeln!(s, "automap_full = {}", o.automap_full);
        let _ = writeln!(s, "available_buttons = {}", list(self.available_buttons.iter().map(|b| b.name()).collect()));
        let _ = writeln!(
            s,
            "available_game_variables = {}",
            list(self.available_game_variables.iter().map(|v| v.name()).collect())
        );
        let _ = writeln!(s, "living_reward = {:?}", r.living_reward);
        let _ = writeln!(s, "death_penalty = {:?}", r.death_penalty);
        let _ = writeln!(s, "kill_reward = {:?}", r.kill_reward);
        let _ = writeln!(s, "suicide_penalty = {:?}", r.suicide_penalty);
        let _ = writeln!(s, "item_reward = {:?}", r.item_reward);
        let _ = writeln!(s, "damage_taken_penalty = {:?}", r.damage_taken_penalty_per_hp);
        let _ = writeln!(s, "damage_inflicted_reward = {:?}", r.damage_inflicted_reward_per_hp);
        let _ = writeln!(s, "episode_timeout = {}", self.episode_timeout);
        let _ = writeln!(s, "frag_limit = {}", self.frag_limit);
        let _ = writeln!(s, "episode_ends_on_death = {}", self.episode_ends_on_death);
        let _ = writeln!(s, "respawn_delay = {}", self.respawn_delay);
        let _ = writeln!(s, "spawn_protection = {}", self.spawn_protection);
        let _ = writeln!(
            s,
            "start_weapon = {}",
            match self.start_weapon {
                Weapon::Pistol => "PISTOL",
                Weapon::RocketLauncher => "ROCKET_LAUNCHER",
            }
        );
        let _ = writeln!(s, "start_bullets = {}", self.start_bullets);
        let _ = writeln!(s, "start_rockets = {}", self.start_rockets);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "players = {}", self.players);
        let _ = writeln!(s, "bots = {}", list(self.bots.iter().map(|b| b.name()).collect()));
        let _ = writeln!(s, "name = {}", self.player_name);
        let _ = writeln!(s, "colorset = {}", self.colorset);
        s
    }
}

impl Default for ScenarioConfig {
    fn default() -> ScenarioConfig {
        ScenarioConfig::with_map("arena", DEFAULT_MAP).expect("built-in map parses")
    }
}

/// Parses config text, resolving a map path relative to the working
/// directory.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    parse_config_with(text, |p| {
        std::fs::read_to_string(p).map_err(|e| ConfigError::MapIo { path: p.to_string(), source: e })
    })
}

enum Value {
    Scalar(String),
    List(Vec<String>),
}

struct Entry {
    line: usize,
    key: String,
    value: Value,
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn tokenize(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let lines: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let lineno = i + 1;
        let raw = lines[i];
        i += 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, rest)) = line.split_once('=') else {
            return Err(ConfigError::Syntax { line: lineno });
        };
        let key = key.trim().to_ascii_lowercase();
        if key.is_empty() {
            return Err(ConfigError::Syntax { line: lineno });
        }
        // inside an inline map block '#' is a wall tile, so take the raw line
        let raw_rest = raw.split_once('=').map(|x| x.1).unwrap_or("").trim();
        let verbatim = key == "map" && raw_rest.starts_with('{');
        let rest = if verbatim { raw_rest } else { rest.trim() };
        if let Some(body) = rest.strip_prefix('{') {
            let mut items = Vec::new();
            let mut chunk = body.to_string();
            loop {
                let (content, closed) = match chunk.find('}') {
                    Some(end) => (chunk[..end].to_string(), true),
                    None => (chunk.clone(), false),
                };
                let content = if verbatim { content } else { strip_comment(&content).to_string() };
                items.extend(content.split_whitespace().map(str::to_string));
                if closed {
                    break;
                }
                if i >= lines.len() {
                    return Err(ConfigError::Unterminated { line: lineno });
                }
                chunk = lines[i].to_string();
                i += 1;
            }
            out.push(Entry { line: lineno, key, value: Value::List(items) });
        } else {
            out.push(Entry { line: lineno, key, value: Value::Scalar(rest.to_string()) });
        }
    }
    Ok(out)
}

/// Parses config text; `load_map` resolves a map path to its text.
pub fn parse_config_with<F>(text: &str, load_map: F) -> Result<ScenarioConfig, ConfigError>
where
    F: Fn(&str) -> Result<String, ConfigError>,
{
    let entries = tokenize(text)?;
    let mut map: Option<(String, String)> = None;
    let mut map_name: Option<String> = None;
    for e in &entries {
        if e.key == "map" {
            map = Some(match &e.value {
                Value::List(rows) => ("inline".to_string(), rows.join("\n")),
                Value::Scalar(p) => {
                    let stem = Path::new(p).file_stem().and_then(|s| s.to_str()).unwrap_or(p).to_string();
                    (stem, load_map(p)?)
                }
            });
        } else if e.key == "map_name" {
            if let Value::Scalar(v) = &e.value {
                map_name = Some(v.clone());
            }
        }
    }
    let (stem, map_text) = map.ok_or(ConfigError::MissingMap)?;
    let mut cfg = ScenarioConfig::with_map(map_name.as_deref().unwrap_or(&stem), &map_text)?;

    for e in entries {
        let line = e.line;
        let key = e.key.clone();
        let bad = |value: &str, reason: String| ConfigError::BadValue {
            line,
            key: key.clone(),
            value: value.to_string(),
            reason,
        };
        let scalar = |v: &Value| -> Result<String, ConfigError> {
            match v {
                Value::Scalar(s) => Ok(s.clone()),
                Value::List(_) => Err(bad("{...}", "expected a single value".into())),
            }
        };
        let list = |v: &Value| -> Result<Vec<String>, ConfigError> {
            match v {
                Value::List(items) => Ok(items.clone()),
                Value::Scalar(s) if s.is_empty() => Ok(Vec::new()),
                Value::Scalar(s) => Err(bad(s, "expected a { ... } list".into())),
            }
        };
        let num = |v: &Value| -> Result<f64, ConfigError> {
            let s = scalar(v)?;
            s.parse::<f64>().map_err(|_| bad(&s, "expected a number".into()))
        };
        let int = |v: &Value| -> Result<u64, ConfigError> {
            let s = scalar(v)?;
            s.parse::<u64>().map_err(|_| bad(&s, "expected a non-negative integer".into()))
        };
        let boolean = |v: &Value| -> Result<bool, ConfigError> {
            let s = scalar(v)?;
            match s.to_ascii_lowercase().as_str() {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                _ => Err(bad(&s, "expected true or false".into())),
            }
        };
        let v = &e.value;
        match e.key.as_str() {
            "map" | "map_name" => {}
            "mode" => {
                let s = scalar(v)?;
                cfg.mode = s.parse().map_err(|r| bad(&s, r))?;
            }
            "screen_resolution" => {
                let s = scalar(v)?;
                let (w, h) = parse_resolution(&s).ok_or_else(|| bad(&s, "expected WIDTHxHEIGHT".into()))?;
                cfg.render.width = w;
                cfg.render.height = h;
            }
            "screen_format" => {
                let s = scalar(v)?;
                cfg.render.format = s.parse::<PixelFormat>().map_err(|r| bad(&s, r))?;
            }
            "render_crosshair" => cfg.render.crosshair = boolean(v)?,
            "render_hud" => cfg.render.hud = boolean(v)?,
            "depth_buffer_enabled" => cfg.render.depth_enabled = boolean(v)?,
            "labels_buffer_enabled" => cfg.render.labels_enabled = boolean(v)?,
            "automap_buffer_enabled" => cfg.render.automap_enabled = boolean(v)?,
            "automap_full" => cfg.render.automap_full = boolean(v)?,
            "available_buttons" => {
                cfg.available_buttons = list(v)?
                    .iter()
                    .map(|s| s.parse::<Button>().map_err(|r| bad(s, r)))
                    .collect::<Result<_, _>>()?;
            }
            "available_game_variables" => {
                cfg.available_game_variables = list(v)?
                    .iter()
                    .map(|s| s.parse::<GameVariable>().map_err(|r| bad(s, r)))
                    .collect::<Result<_, _>>()?;
            }
            "living_reward" => cfg.rewards.living_reward = num(v)?,
            "death_penalty" => cfg.rewards.death_penalty = num(v)?,
            "kill_reward" => cfg.rewards.kill_reward = num(v)?,
            "suicide_penalty" => cfg.rewards.suicide_penalty = num(v)?,
            "item_reward" => cfg.rewards.item_reward = num(v)?,
            "damage_taken_penalty" => cfg.rewards.damage_taken_penalty_per_hp = num(v)?,
            "damage_inflicted_reward" => cfg.rewards.damage_inflicted_reward_per_hp = num(v)?,
            "episode_timeout" => cfg.episode_timeout = to_u32(int(v)?, &bad)?,
            "frag_limit" => cfg.frag_limit = to_u32(int(v)?, &bad)?,
            "episode_ends_on_death" => cfg.episode_ends_on_death = boolean(v)?,
            "respawn_delay" => cfg.respawn_delay = to_u32(int(v)?, &bad)?,
            "spawn_protection" => cfg.spawn_protection = to_u32(int(v)?, &bad)?,
            "start_weapon" => {
                let s = scalar(v)?;
                cfg.start_weapon = match s.to_ascii_uppercase().as_str() {
                    "PISTOL" | "1" => Weapon::Pistol,
                    "ROCKET_LAUNCHER" | "2" => Weapon::RocketLauncher,
                    _ => return Err(bad(&s, "expected PISTOL or ROCKET_LAUNCHER".into())),
                };
            }
            "start_bullets" => cfg.start_bullets = to_u32(int(v)?, &bad)?,
            "start_rockets" => cfg.start_rockets = to_u32(int(v)?, &bad)?,
            "seed" => cfg.seed = int(v)?,
            "players" => cfg.players = int(v)? as usize,
            "bots" => {
                cfg.bots = list(v)?
                    .iter()
                    .map(|s| s.parse::<BotKind>().map_err(|r| bad(s, r)))
                    .collect::<Result<_, _>>()?;
            }
            "name" => cfg.player_name = scalar(v)?,
            "colorset" => cfg.colorset = to_u32(int(v)?, &bad)?.min(255) as u8,
            _ => return Err(ConfigError::UnknownKey { line, key: e.key }),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn to_u32(v: u64, bad: &dyn Fn(&str, String) -> ConfigError) -> Result<u32, ConfigError> {
    u32::try_from(v).map_err(|_| bad(&v.to_string(), "out of range".into()))
}

pub fn parse_resolution(s: &str) -> Option<(usize, usize)> {
    let s = s.trim().to_ascii_lowercase();
    let s = s.strip_prefix("res_").unwrap_or(&s);
    let (w, h) = s.split_once('x')?;
    let w: usize = w.parse().ok()?;
    let h: usize = h.parse().ok()?;
    (w >= 1 && h >= 1).then_some((w, h))
}
