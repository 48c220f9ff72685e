//! Drives an environment through the flat C interface used by foreign
//! bindings.
//!
//! cargo run --example ffi_env

use std::ffi::{CStr, CString};

use pixelarena::env::ffi::*;
use pixelarena::scenario::DEFAULT_MAP;

fn main() {
    let config = CString::new(format!(
        "map = {{\n{}\n}}\nscreen_resolution = 64x48\ndepth_buffer_enabled = true\navailable_buttons = {{ MOVE_FORWARD TURN_LEFT }}\nepisode_timeout = 140\n",
        DEFAULT_MAP.trim()
    ))
    .expect("no nul");
    unsafe {
        let h = pa_env_create(config.as_ptr(), c"+name ffi".as_ptr());
        assert!(!h.is_null(), "create failed");
        let mut reward = 0.0;
        let mut steps = 0;
        while pa_env_is_episode_finished(h) == 0 {
            if pa_env_make_action(h, [1.0, (steps % 3 == 0) as u8 as f64].as_ptr(), 2, 4, &mut reward) != 0 {
                panic!("{}", CStr::from_ptr(pa_env_last_error(h)).to_string_lossy());
            }
            steps += 1;
        }
        println!("{steps} actions, finished at tic {}, hash {:016x}", pa_env_tic(h), pa_env_state_hash(h));
        pa_env_new_episode(h);
        let (mut rows, mut cols, mut ch) = (0, 0, 0);
        let depth = pa_env_get_buffer(h, 1, &mut rows, &mut cols, &mut ch);
        let depth = std::slice::from_raw_parts(depth, rows * cols * ch);
        println!("depth buffer {rows}x{cols}x{ch}, nearest {}", depth.iter().min().unwrap());
        pa_env_destroy(h);
    }
}
