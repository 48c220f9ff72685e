//! Flat C ABI over [`Env`] for foreign-language bindings.
//!
//! A handle owns one environment and the most recent state. Buffer
//! pointers returned by [`pa_env_get_buffer`] borrow that state and stay
//! valid until the next call that advances or restarts the episode. Calls
//! returning `i32` yield 0 on success and -1 on failure, with the message
//! available from [`pa_env_last_error`].

use std::ffi::{c_char, CStr, CString};
use std::sync::Arc;

use super::{Env, EnvError, EnvState};
use crate::render::BufferKind;

pub struct EnvHandle {
    env: Env,
    state: Option<Arc<EnvState>>,
    error: CString,
}

impl EnvHandle {
    fn fail(&mut self, e: impl std::fmt::Display) -> i32 {
        self.error = CString::new(e.to_string().replace('\0', " ")).expect("nul bytes removed");
        -1
    }

    fn refresh(&mut self) -> Result<&EnvState, EnvError> {
        let s = self.env.get_state()?;
        Ok(self.state.insert(s))
    }
}

/// Builds and initializes an environment from config text, applying
/// `game_args` (may be null). Returns null on failure.
///
/// # Safety
/// `config` must be a valid NUL-terminated string; `game_args` null or one.
#[no_mangle]
pub unsafe extern "C" fn pa_env_create(config: *const c_char, game_args: *const c_char) -> *mut EnvHandle {
    if config.is_null() {
        return std::ptr::null_mut();
    }
    let Ok(text) = CStr::from_ptr(config).to_str() else { return std::ptr::null_mut() };
    let args = if game_args.is_null() { "" } else { CStr::from_ptr(game_args).to_str().unwrap_or("") };
    let build = || -> Result<Env, EnvError> {
        let mut env = Env::from_config_text(text)?;
        env.add_game_args(args)?;
        env.init()?;
        Ok(env)
    };
    match build() {
        Ok(env) => Box::into_raw(Box::new(EnvHandle { env, state: None, error: CString::default() })),
        Err(e) => {
            log::error!("pa_env_create: {e}");
            std::ptr::null_mut()
        }
    }
}

/// # Safety
/// `h` must come from [`pa_env_create`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pa_env_destroy(h: *mut EnvHandle) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Applies `action[0..len]` for `skip` tics and writes the summed reward.
///
/// # Safety
/// `h` must be live; `action` must point to `len` doubles; `reward` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pa_env_make_action(h: *mut EnvHandle, action: *const f64, len: usize, skip: u32, reward: *mut f64) -> i32 {
    let Some(h) = h.as_mut() else { return -1 };
    let values = if len == 0 { &[][..] } else { std::slice::from_raw_parts(action, len) };
    match h.env.make_action(values, skip) {
        Ok(r) => {
            h.state = None;
            if !reward.is_null() {
                *reward = r;
            }
            0
        }
        Err(e) => h.fail(e),
    }
}

/// # Safety
/// `h` must be live.
#[no_mangle]
pub unsafe extern "C" fn pa_env_tic(h: *const EnvHandle) -> u32 {
    h.as_ref().map_or(0, |h| h.env.tic())
}

/// # Safety
/// `h` must be live.
#[no_mangle]
pub unsafe extern "C" fn pa_env_is_episode_finished(h: *const EnvHandle) -> i32 {
    h.as_ref().map_or(1, |h| h.env.is_episode_finished() as i32)
}

/// # Safety
/// `h` must be live.
#[no_mangle]
pub unsafe extern "C" fn pa_env_is_player_dead(h: *const EnvHandle) -> i32 {
    h.as_ref().map_or(0, |h| h.env.is_player_dead() as i32)
}

/// # Safety
/// `h` must be live.
#[no_mangle]
pub unsafe extern "C" fn pa_env_respawn_player(h: *mut EnvHandle) -> i32 {
    let Some(h) = h.as_mut() else { return -1 };
    h.state = None;
    match h.env.respawn_player() {
        Ok(_) => 0,
        Err(e) => h.fail(e),
    }
}

/// # Safety
/// `h` must be live.
#[no_mangle]
pub unsafe extern "C" fn pa_env_new_episode(h: *mut EnvHandle) -> i32 {
    let Some(h) = h.as_mut() else { return -1 };
    h.state = None;
    match h.env.new_episode() {
        Ok(()) => 0,
        Err(e) => h.fail(e),
    }
}

/// # Safety
/// `h` must be live.
#[no_mangle]
pub unsafe extern "C" fn pa_env_state_hash(h: *const EnvHandle) -> u64 {
    h.as_ref().and_then(|h| h.env.state_hash().ok()).unwrap_or(0)
}

/// Pointer to buffer `kind` (0 screen, 1 depth, 2 labels, 3 automap) of the
/// current state with its shape, or null if disabled or unavailable.
///
/// # Safety
/// `h` must be live; the shape pointers null or writable.
#[no_mangle]
pub unsafe extern "C" fn pa_env_get_buffer(
    h: *mut EnvHandle,
    kind: u8,
    height: *mut usize,
    width: *mut usize,
    channels: *mut usize,
) -> *const u8 {
    let Some(h) = h.as_mut() else { return std::ptr::null() };
    let Some(kind) = BufferKind::from_code(kind) else {
        h.fail(format!("unknown buffer kind {kind}"));
        return std::ptr::null();
    };
    let state = match h.refresh() {
        Ok(s) => s,
        Err(e) => {
            h.fail(e);
            return std::ptr::null();
        }
    };
    let f = &state.frame;
    let Some(data) = f.buffer(kind) else { return std::ptr::null() };
    let c = data.len() / (f.width * f.height).max(1);
    for (p, v) in [(height, f.height), (width, f.width), (channels, c)] {
        if !p.is_null() {
            *p = v;
        }
    }
    data.as_ptr()
}

/// Copies up to `cap` game variables into `out` and returns how many exist.
///
/// # Safety
/// `h` must be live; `out` must have room for `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn pa_env_game_variables(h: *mut EnvHandle, out: *mut f64, cap: usize) -> usize {
    let Some(h) = h.as_mut() else { return 0 };
    let vars = match h.refresh() {
        Ok(s) => s.game_variables.clone(),
        Err(e) => {
            h.fail(e);
            return 0;
        }
    };
    if !out.is_null() {
        for (i, v) in vars.iter().take(cap).enumerate() {
            *out.add(i) = *v;
        }
    }
    vars.len()
}

/// Message of the last failure on this handle; empty if none.
///
/// # Safety
/// `h` must be live. The string is valid until the next failing call.
#[no_mangle]
pub unsafe extern "C" fn pa_env_last_error(h: *const EnvHandle) -> *const c_char {
    match h.as_ref() {
        Some(h) => h.error.as_ptr(),
        None => c"null handle".as_ptr(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_surface_runs_an_episode() {
        let cfg = CString::new("map = {\n#####\n#S.S#\n#####\n}\nscreen_resolution = 32x24\navailable_buttons = { ATTACK TURN_LEFT }\nepisode_timeout = 10\n").unwrap();
        unsafe {
            let h = pa_env_create(cfg.as_ptr(), std::ptr::null());
            assert!(!h.is_null());
            let (mut hh, mut ww, mut cc) = (0, 0, 0);
            let p = pa_env_get_buffer(h, 0, &mut hh, &mut ww, &mut cc);
            assert!(!p.is_null());
            assert_eq!((hh, ww, cc), (24, 32, 3));
            assert!(pa_env_get_buffer(h, 1, &mut hh, &mut ww, &mut cc).is_null());
            let mut reward = f64::NAN;
            while pa_env_is_episode_finished(h) == 0 {
                assert_eq!(pa_env_make_action(h, [0.0, 1.0].as_ptr(), 2, 3, &mut reward), 0);
            }
            assert_eq!(pa_env_tic(h), 10);
            assert_eq!(reward, 0.0);
            assert_eq!(pa_env_make_action(h, [0.0].as_ptr(), 1, 1, &mut reward), -1);
            assert!(!CStr::from_ptr(pa_env_last_error(h)).to_bytes().is_empty());
            assert_eq!(pa_env_new_episode(h), 0);
            assert_eq!(pa_env_tic(h), 0);
            let mut vars = [0.0; 4];
            assert_eq!(pa_env_game_variables(h, vars.as_mut_ptr(), 4), 2);
            assert_eq!(vars[0], 100.0);
            pa_env_destroy(h);
        }
    }
}
