//! A random agent playing a few episodes against two built-in bots.
//!
//! cargo run --example random_agent -- 3

use pixelarena::env::Env;
use pixelarena::rng::Rng;
use pixelarena::scenario::DEFAULT_MAP;

const CONFIG: &str = "\
screen_resolution = 160x120
available_buttons = { ATTACK MOVE_FORWARD TURN_LEFT TURN_RIGHT }
available_game_variables = { HEALTH SELECTED_WEAPON_AMMO FRAGCOUNT }
players = 3
bots = { fighter wanderer }
episode_timeout = 2100
living_reward = -0.001
kill_reward = 1
death_penalty = 1
";

fn main() {
    let episodes: u64 = std::env::args().nth(1).and_then(|n| n.parse().ok()).unwrap_or(2);
    let mut env = Env::from_config_text(&format!("map = {{\n{}\n}}\n{CONFIG}", DEFAULT_MAP.trim())).expect("valid config");
    env.init().expect("init");
    let actions: [[f64; 4]; 4] = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];
    let mut rng = Rng::new(7);

    for episode in 0..episodes {
        let mut total = 0.0;
        while !env.is_episode_finished() {
            let s = env.get_state().expect("state");
            if s.tic % 700 < 4 {
                println!("  tic {:>5}  health {:>3}  ammo {:>3}", s.tic, s.game_variables[0], s.game_variables[1]);
            }
            if env.is_player_dead() {
                env.respawn_player().expect("respawn");
                continue;
            }
            let a = &actions[rng.below(actions.len() as u32) as usize];
            total += env.make_action(a, 4).expect("action");
        }
        let frags = env.with_world(|w| w.counters[0].frags()).expect("world");
        println!("episode {episode}: reward {total:.3}, frags {frags}");
        env.new_episode().expect("new episode");
    }
}
