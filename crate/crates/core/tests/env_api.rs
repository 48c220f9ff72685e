mod common;

use std::ffi::{CStr, CString};
use std::sync::Arc;
use std::time::{Duration, Instant};

use pixelarena::env::ffi::*;
use pixelarena::env::{Env, EnvError};
use pixelarena::replay::replay_hashes;
use pixelarena::scenario::Mode;
use pixelarena::sim::{state_hash, RespawnOutcome, WorldState};

const BASE: &str = "map = {\n########\n#S....S#\n#..##..#\n#S....S#\n########\n}\nscreen_resolution = 64x48\navailable_buttons = { ATTACK MOVE_FORWARD TURN_LEFT TURN_DELTA }\navailable_game_variables = { HEALTH SELECTED_WEAPON_AMMO }\n";

fn env(extra: &str) -> Env {
    let mut e = Env::from_config_text(&format!("{BASE}{extra}")).unwrap();
    e.init().unwrap();
    e
}

fn free_port() -> u16 {
    std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port()
}

#[test]
fn actions_are_validated() {
    let mut e = env("");
    assert!(matches!(e.make_action(&[1.0, 0.0], 1), Err(EnvError::Arity { expected: 4, got: 2 })));
    assert!(matches!(e.make_action(&[0.0; 4], 0), Err(EnvError::Skip)));
    assert_eq!(e.tic(), 0);
    e.make_action(&[0.0, 1.0, 0.0, 3.0], 5).unwrap();
    assert_eq!(e.tic(), 5);
    let s = e.get_state().unwrap();
    assert_eq!(s.game_variables, vec![100.0, 50.0]);
}

#[test]
fn uninitialized_env_refuses_to_step() {
    let mut e = Env::from_config_text(BASE).unwrap();
    assert!(matches!(e.make_action(&[0.0; 4], 1), Err(EnvError::NotInitialized)));
    assert!(matches!(e.get_state(), Err(EnvError::NotInitialized)));
}

#[test]
fn finished_episode_rejects_actions_until_restarted() {
    let mut e = env("episode_timeout = 12\n");
    while !e.is_episode_finished() {
        e.make_action(&[0.0; 4], 5).unwrap();
    }
    assert_eq!(e.tic(), 12);
    assert!(matches!(e.make_action(&[0.0; 4], 1), Err(EnvError::EpisodeFinished)));
    assert!(matches!(e.get_state(), Err(EnvError::EpisodeFinished)));
    e.new_episode().unwrap();
    assert_eq!(e.tic(), 0);
    assert!(!e.is_episode_finished());
}

#[test]
fn new_episode_advances_the_seed() {
    let mut e = env("seed = 40\n");
    let cfg = e.config().clone();
    let fresh = |seed| state_hash(&WorldState::new(Arc::new(cfg.map.clone()), cfg.players, cfg.rules(), seed).unwrap());
    assert_eq!(e.state_hash().unwrap(), fresh(40));
    e.make_action(&[0.0, 1.0, 0.0, 0.0], 9).unwrap();
    e.new_episode().unwrap();
    assert_eq!(e.state_hash().unwrap(), fresh(41));
    e.new_episode().unwrap();
    assert_eq!(e.state_hash().unwrap(), fresh(42));
}

#[test]
fn replay_bytes_reproduce_the_episode() {
    let mut e = env("players = 3\nbots = { fighter wanderer }\n");
    for i in 0..300 {
        let a = [(i % 7 == 0) as u8 as f64, 1.0, 0.0, (i % 11) as f64 - 5.0];
        e.make_action(&a, 1 + i % 3).unwrap();
    }
    let (hashes, _) = replay_hashes(&e.replay_bytes().unwrap()).unwrap();
    assert_eq!(hashes.len(), e.tic() as usize);
    assert_eq!(*hashes.last().unwrap(), e.state_hash().unwrap());
}

#[test]
fn respawn_outcomes() {
    let mut e = env("respawn_delay = 20\n");
    assert_eq!(e.respawn_player().unwrap(), RespawnOutcome::AlreadyAlive);
    let mut e = env("players = 2\nbots = { fighter }\nrespawn_delay = 20\nstart_rockets = 20\nstart_weapon = rocket_launcher\n");
    // walk into the wall and fire until our own rocket kills us
    let mut died_at = None;
    for _ in 0..600 {
        if e.is_player_dead() {
            died_at = Some(e.tic());
            break;
        }
        e.make_action(&[1.0, 0.0, 0.0, 0.0], 1).unwrap();
    }
    let died = died_at.expect("player died");
    assert!(matches!(e.respawn_player().unwrap(), RespawnOutcome::NotEligible { allowed_at_tic } if allowed_at_tic >= died));
    while matches!(e.respawn_player().unwrap(), RespawnOutcome::NotEligible { .. }) {
        e.make_action(&[0.0; 4], 1).unwrap();
    }
    assert!(!e.is_player_dead());
}

#[test]
fn async_player_loses_tics_while_thinking() {
    let mut e = env("mode = ASYNC_PLAYER\n");
    let start = Instant::now();
    e.make_action(&[0.0, 1.0, 0.0, 0.0], 2).unwrap();
    std::thread::sleep(Duration::from_millis(300));
    e.make_action(&[0.0, 1.0, 0.0, 0.0], 1).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    assert!(e.missed_tics() >= 7, "missed {}", e.missed_tics());
    let expected = elapsed * 35.0;
    assert!((e.tic() as f64 - expected).abs() <= 3.0, "tic {} after {elapsed:.3} s", e.tic());
}

#[test]
fn async_spectator_follows_the_human() {
    let mut e = env("mode = ASYNC_SPECTATOR\n");
    assert!(matches!(e.make_action(&[0.0; 4], 1), Err(EnvError::Mode(_))));
    let handle = e.spectator_handle().unwrap();
    let cmd = pixelarena::env::action_to_cmd(&e.config().available_buttons, &[0.0, 1.0, 0.0, 0.0]).unwrap();
    let feeder = std::thread::spawn(move || {
        for _ in 0..60 {
            handle.send(cmd);
            std::thread::sleep(Duration::from_millis(5));
        }
    });
    // input is consumed per tic, so sample while the feeder is still running
    e.advance_action(5).unwrap();
    assert!(e.tic() >= 5);
    assert_eq!(e.get_state().unwrap().last_action, Some(vec![0.0, 1.0, 0.0, 0.0]));
    feeder.join().unwrap();
    let moved = e.with_world(|w| w.counters[0].distance_raw).unwrap();
    assert!(moved > 0);
}

#[test]
fn hosted_env_plays_alone() {
    let mut e = Env::from_config_text(&format!("{BASE}episode_timeout = 70\n")).unwrap();
    e.add_game_args(&format!("-host 1 -port {} +name solo +colorset 3", free_port())).unwrap();
    assert_eq!(e.config().player_name, "solo");
    e.init().unwrap();
    while !e.is_episode_finished() {
        e.make_action(&[0.0, 1.0, 0.0, 1.0], 4).unwrap();
    }
    assert_eq!(e.tic(), 70);
    assert!(matches!(e.new_episode(), Err(EnvError::Mode(_))));
}

#[test]
fn hosted_and_joined_envs_stay_in_step() {
    let port = free_port();
    let mut host = Env::from_config_text(&format!("{BASE}episode_timeout = 140\n")).unwrap();
    host.add_game_args(&format!("-host 2 -port {port}")).unwrap();
    host.init().unwrap();
    let joiner = std::thread::spawn(move || {
        let mut e = Env::from_config_text(BASE).unwrap();
        e.add_game_args(&format!("-join 127.0.0.1:{port} +name guest")).unwrap();
        e.init().unwrap();
        assert_eq!(e.player_id(), 1);
        let mut hashes = Vec::new();
        while !e.is_episode_finished() {
            e.make_action(&[1.0, 0.0, 1.0, 0.0], 1).unwrap();
            hashes.push(e.state_hash().unwrap());
        }
        hashes
    });
    let mut hashes = Vec::new();
    while !host.is_episode_finished() {
        host.make_action(&[0.0, 1.0, 0.0, 2.0], 1).unwrap();
        hashes.push(host.state_hash().unwrap());
    }
    assert_eq!(joiner.join().unwrap(), hashes);
    assert_eq!(host.tic(), 140);
}

#[test]
fn unknown_game_args_are_ignored_and_bad_values_rejected() {
    let mut e = Env::from_config_text(BASE).unwrap();
    e.add_game_args("+sv_cheats 1 -deathmatch").unwrap();
    assert!(matches!(e.add_game_args("-host many"), Err(EnvError::GameArg(_))));
    assert!(matches!(e.add_game_args("+name"), Err(EnvError::GameArg(_))));
}

#[test]
fn flat_interface_exposes_every_buffer() {
    let text = format!("{BASE}depth_buffer_enabled = true\nlabels_buffer_enabled = true\nautomap_buffer_enabled = true\nplayers = 2\nbots = {{ idle }}\n");
    let cfg = CString::new(text.clone()).unwrap();
    let mut reference = Env::from_config_text(&text).unwrap();
    reference.init().unwrap();
    reference.make_action(&[0.0, 1.0, 0.0, 4.0], 3).unwrap();
    let expected = reference.get_state().unwrap();
    unsafe {
        let h = pa_env_create(cfg.as_ptr(), c"+name ffi".as_ptr());
        assert!(!h.is_null());
        let mut reward = 0.0;
        assert_eq!(pa_env_make_action(h, [0.0, 1.0, 0.0, 4.0].as_ptr(), 4, 3, &mut reward), 0);
        assert_eq!(pa_env_state_hash(h), reference.state_hash().unwrap());
        let f = &expected.frame;
        for (kind, channels, want) in [
            (0u8, 3usize, &f.screen),
            (1, 1, f.depth.as_ref().unwrap()),
            (2, 1, f.labels.as_ref().unwrap()),
            (3, 3, f.automap.as_ref().unwrap()),
        ] {
            let (mut hh, mut ww, mut cc) = (0, 0, 0);
            let p = pa_env_get_buffer(h, kind, &mut hh, &mut ww, &mut cc);
            assert!(!p.is_null(), "kind {kind}");
            assert_eq!((hh, ww, cc), (48, 64, channels));
            assert_eq!(std::slice::from_raw_parts(p, hh * ww * cc), &want[..]);
        }
        assert!(pa_env_get_buffer(h, 9, std::ptr::null_mut(), std::ptr::null_mut(), std::ptr::null_mut()).is_null());
        assert!(CStr::from_ptr(pa_env_last_error(h)).to_str().unwrap().contains('9'));
        assert_eq!(pa_env_is_player_dead(h), 0);
        assert_eq!(pa_env_respawn_player(h), 0);
        pa_env_destroy(h);
        let bad = CString::new("map = {\n#\n}\n").unwrap();
        assert!(pa_env_create(bad.as_ptr(), std::ptr::null()).is_null());
    }
}

#[test]
fn sync_modes_accept_mode_switch() {
    let mut e = Env::from_config_text(BASE).unwrap();
    e.set_mode(Mode::SyncSpectator);
    e.init().unwrap();
    assert!(e.spectator_handle().is_ok());
    assert!(matches!(e.make_action(&[0.0; 4], 1), Err(EnvError::Mode(_))));
}
