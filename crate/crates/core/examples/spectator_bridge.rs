//! Serves a match over the websocket bridge and watches it as a spectator.
//!
//! cargo run --example spectator_bridge

use std::time::Duration;

use pixelarena::bots::{BotKind, BotSpec};
use pixelarena::net::{FrameHeader, Host, HostOptions, FRAME_HEADER_LEN};
use pixelarena::net::ws_bridge::DEFAULT_WS_PORT;
use pixelarena::render::RenderOptions;
use pixelarena::scenario::{Mode, ScenarioConfig};
use tungstenite::Message;

fn main() {
    let mut cfg = ScenarioConfig::default();
    cfg.players = 3;
    cfg.mode = Mode::AsyncPlayer;
    cfg.render = RenderOptions::with_size(160, 120).all_buffers();
    let opts = HostOptions {
        ws_bind: Some(format!("127.0.0.1:{DEFAULT_WS_PORT}")),
        bots: [BotKind::Fighter, BotKind::Fighter, BotKind::Wanderer].map(|kind| BotSpec { kind, seed: None }).to_vec(),
        duration: Some(35 * 5),
        lobby_timeout: Duration::from_secs(5),
        ..HostOptions::new(cfg)
    };
    let host = Host::bind(opts).expect("bind");
    let ws = host.ws_addr().expect("bridge");
    println!("open ws://{ws} in a viewer; watching five seconds here");
    let viewer = std::thread::spawn(move || {
        let (mut sock, _) = tungstenite::connect(format!("ws://{ws}")).expect("connect");
        sock.send(Message::text(r#"{"join_as":"spectator","name":"example"}"#)).expect("join");
        let mut bytes = 0usize;
        while let Ok(msg) = sock.read() {
            match msg {
                Message::Binary(b) => {
                    let h = FrameHeader::parse(&b).expect("header");
                    assert_eq!(b.len(), FRAME_HEADER_LEN + h.payload_len());
                    bytes += b.len();
                }
                Message::Text(t) if t.contains("scoreboard") => println!("{t}"),
                Message::Text(t) => println!("host says {t}"),
                Message::Close(_) => break,
                _ => {}
            }
        }
        bytes
    });
    // give the spectator a moment to join before the match starts
    std::thread::sleep(Duration::from_millis(200));
    let out = host.run().expect("match");
    println!("{} tics at {:.1} Hz, {} KiB streamed", out.world.tic, out.tic_rate, viewer.join().expect("viewer") / 1024);
}
