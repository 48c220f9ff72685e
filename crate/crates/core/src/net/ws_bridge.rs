//! Websocket bridge for browser viewers and human players.
//!
//! Text frames carry JSON control messages:
//!
//! ```text
//! client → host  {"join_as": "spectator" | "player", "name": "..."}
//!                {"input": {"buttons": ["ATTACK", "MOVE_FORWARD"], "turn_delta": 2.5}}
//! host → client  {"welcome": {"role", "player_id", "width", "height", "format", "buffers"}}
//!                {"scoreboard": {"tic", "players": [{"id", "name", "frags", "kills", "deaths", "health"}]}}
//! ```
//!
//! `turn_delta` is in degrees, clamped to ±15. A player's input is held
//! until the next input message. Binary frames carry one buffer each behind
//! a 16-byte little-endian header:
//!
//! ```text
//! tic u32 | width u16 | height u16 | buffer kind u8 | pixel format u8 | reserved [u8; 6]
//! ```
//!
//! Buffer kinds: 0 screen, 1 depth, 2 labels, 3 automap. Formats: 0 RGB24,
//! 1 GRAY8. Malformed control messages close the socket with code 1002.

use std::io;
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, Sender, TryRecvError};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::Duration;

use serde_json::{json, Value};
use tungstenite::protocol::frame::coding::CloseCode;
use tungstenite::protocol::CloseFrame;
use tungstenite::{Message as WsMessage, WebSocket};

use super::session::{ConnId, Ev};
use crate::env::{action_to_cmd, MAX_TURN_DELTA_DEG};
use crate::render::{render_frame, BufferKind, PixelFormat, RenderOptions};
use crate::scenario::{Button, ScenarioConfig};
use crate::sim::{PlayerId, TicCmd, WorldState};

pub const DEFAULT_WS_PORT: u16 = 5030;
pub const FRAME_HEADER_LEN: usize = 16;
const POLL: Duration = Duration::from_millis(5);

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct FrameHeader {
    pub tic: u32,
    pub width: u16,
    pub height: u16,
    pub kind: BufferKind,
    pub format: PixelFormat,
}

impl FrameHeader {
    pub fn encode(&self) -> [u8; FRAME_HEADER_LEN] {
        let mut h = [0u8; FRAME_HEADER_LEN];
        h[0..4].copy_from_slice(&self.tic.to_le_bytes());
        h[4..6].copy_from_slice(&self.width.to_le_bytes());
        h[6..8].copy_from_slice(&self.height.to_le_bytes());
        h[8] = self.kind.code();
        h[9] = self.format.code();
        h
    }

    pub fn parse(b: &[u8]) -> Option<FrameHeader> {
        if b.len() < FRAME_HEADER_LEN {
            return None;
        }
        Some(FrameHeader {
            tic: u32::from_le_bytes(b[0..4].try_into().unwrap()),
            width: u16::from_le_bytes([b[4], b[5]]),
            height: u16::from_le_bytes([b[6], b[7]]),
            kind: BufferKind::from_code(b[8])?,
            format: PixelFormat::from_code(b[9])?,
        })
    }

    /// Payload size that should follow the header.
    pub fn payload_len(&self) -> usize {
        self.width as usize * self.height as usize * self.format.channels()
    }
}

/// A parsed client control message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Control {
    Join { player: bool, name: String },
    Input(TicCmd),
}

pub fn parse_control(text: &str) -> Result<Control, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| format!("bad json: {e}"))?;
    if let Some(role) = v.get("join_as") {
        let player = match role.as_str() {
            Some("player") => true,
            Some("spectator") => false,
            _ => return Err("join_as must be \"player\" or \"spectator\"".into()),
        };
        let name = v.get("name").and_then(Value::as_str).unwrap_or("").to_string();
        return Ok(Control::Join { player, name });
    }
    if let Some(input) = v.get("input") {
        let mut buttons = Vec::new();
        let mut action = Vec::new();
        if let Some(list) = input.get("buttons") {
            for b in list.as_array().ok_or("input.buttons must be an array")? {
                let b: Button = b.as_str().ok_or("button names are strings")?.parse()?;
                if b.bit().is_none() {
                    return Err(format!("{} is not a button", b.name()));
                }
                buttons.push(b);
                action.push(1.0);
            }
        }
        let delta = match input.get("turn_delta") {
            None | Some(Value::Null) => 0.0,
            Some(d) => d.as_f64().ok_or("input.turn_delta must be a number")?,
        };
        buttons.push(Button::TurnDelta);
        action.push(delta.clamp(-MAX_TURN_DELTA_DEG, MAX_TURN_DELTA_DEG));
        return action_to_cmd(&buttons, &action).map(Control::Input).map_err(|e| e.to_string());
    }
    Err("expected join_as or input".into())
}

pub fn welcome_json(cfg: &ScenarioConfig, slot: Option<PlayerId>) -> String {
    let o = &cfg.render;
    let buffers: Vec<&str> = BufferKind::ALL.iter().filter(|k| enabled(o, **k)).map(|k| k.name()).collect();
    json!({
        "welcome": {
            "role": if slot.is_some() { "player" } else { "spectator" },
            "player_id": slot,
            "width": o.width,
            "height": o.height,
            "format": o.format.name(),
            "buffers": buffers,
        }
    })
    .to_string()
}

pub fn scoreboard_json(world: &WorldState, names: &[String]) -> String {
    let players: Vec<Value> = world
        .counters
        .iter()
        .zip(&world.actors)
        .enumerate()
        .map(|(i, (c, a))| {
            json!({
                "id": i,
                "name": names.get(i).map(String::as_str).unwrap_or(""),
                "frags": c.frags(),
                "kills": c.kills,
                "deaths": c.deaths,
                "health": if a.alive { a.health } else { 0 },
            })
        })
        .collect();
    json!({ "scoreboard": { "tic": world.tic, "players": players } }).to_string()
}

fn enabled(o: &RenderOptions, k: BufferKind) -> bool {
    match k {
        BufferKind::Screen => true,
        BufferKind::Depth => o.depth_enabled,
        BufferKind::Labels => o.labels_enabled,
        BufferKind::Automap => o.automap_enabled,
    }
}

/// Renders `viewer`'s frame and packs every enabled buffer as a binary message.
pub fn frame_messages(world: &WorldState, viewer: PlayerId, opts: &RenderOptions) -> Vec<Vec<u8>> {
    let frame = render_frame(world, viewer, opts);
    BufferKind::ALL
        .iter()
        .filter_map(|&kind| {
            let data = frame.buffer(kind)?;
            let format = match kind {
                BufferKind::Screen | BufferKind::Automap => frame.format,
                BufferKind::Depth | BufferKind::Labels => PixelFormat::Gray8,
            };
            let h = FrameHeader { tic: frame.tic, width: frame.width as u16, height: frame.height as u16, kind, format };
            let mut out = Vec::with_capacity(FRAME_HEADER_LEN + data.len());
            out.extend_from_slice(&h.encode());
            out.extend_from_slice(data);
            Some(out)
        })
        .collect()
}

/// Outgoing traffic from the session to one websocket peer.
pub(crate) enum WsOut {
    Text(String),
    Binary(Vec<u8>),
    Close(String),
}

pub(crate) fn spawn_acceptor(
    listener: TcpListener,
    tx: Sender<Ev>,
    stop: Arc<AtomicBool>,
    ids: Arc<AtomicU64>,
) -> io::Result<JoinHandle<()>> {
    listener.set_nonblocking(true)?;
    Ok(std::thread::spawn(move || {
        while !stop.load(Ordering::SeqCst) {
            match listener.accept() {
                Ok((stream, _)) => {
                    let id = ids.fetch_add(1, Ordering::SeqCst);
                    let (tx, stop) = (tx.clone(), stop.clone());
                    std::thread::spawn(move || {
                        if let Err(e) = serve(id, stream, &tx, &stop) {
                            log::debug!("websocket {id}: {e}");
                        }
                        let _ = tx.send(Ev::WsClosed(id));
                    });
                }
                Err(e) if e.kind() == io::ErrorKind::WouldBlock => std::thread::sleep(Duration::from_millis(2)),
                Err(e) => {
                    log::warn!("websocket accept failed: {e}");
                    std::thread::sleep(Duration::from_millis(20));
                }
            }
        }
    }))
}

fn close(ws: &mut WebSocket<TcpStream>, code: CloseCode, reason: String) {
    let _ = ws.close(Some(CloseFrame { code, reason: reason.into() }));
    let _ = ws.flush();
}

fn serve(id: ConnId, stream: TcpStream, tx: &Sender<Ev>, stop: &AtomicBool) -> Result<(), String> {
    stream.set_nonblocking(false).map_err(|e| e.to_string())?;
    let mut ws = tungstenite::accept(stream).map_err(|e| e.to_string())?;
    ws.get_ref().set_read_timeout(Some(POLL)).map_err(|e| e.to_string())?;
    let (out_tx, out_rx) = mpsc::channel();
    let mut joined = false;
    while !stop.load(Ordering::SeqCst) {
        if flush(&mut ws, &out_rx)? {
            return Ok(());
        }
        match ws.read() {
            Ok(WsMessage::Text(t)) => match parse_control(&t) {
                Ok(Control::Join { player, name }) if !joined => {
                    joined = true;
                    let _ = tx.send(Ev::WsJoin { id, player, name, out: out_tx.clone() });
                }
                Ok(Control::Join { .. }) => {}
                Ok(Control::Input(cmd)) => {
                    let _ = tx.send(Ev::WsInput { id, cmd });
                }
                Err(e) => {
                    close(&mut ws, CloseCode::Protocol, e.clone());
                    return Err(e);
                }
            },
            Ok(WsMessage::Binary(_)) => {
                close(&mut ws, CloseCode::Protocol, "binary input not accepted".into());
                return Err("binary input".into());
            }
            Ok(_) => {}
            Err(tungstenite::Error::Io(e))
                if matches!(e.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut) => {}
            Err(e) => return Err(e.to_string()),
        }
    }
    // deliver what the session queued before it stopped
    if !flush(&mut ws, &out_rx)? {
        close(&mut ws, CloseCode::Away, "host stopped".into());
    }
    Ok(())
}

/// Sends everything queued for this peer; true once the socket is closed.
fn flush(ws: &mut WebSocket<TcpStream>, out_rx: &Receiver<WsOut>) -> Result<bool, String> {
    loop {
        let sent = match out_rx.try_recv() {
            Ok(WsOut::Text(t)) => ws.send(WsMessage::Text(t)),
            Ok(WsOut::Binary(b)) => ws.send(WsMessage::Binary(b)),
            Ok(WsOut::Close(reason)) => {
                close(ws, CloseCode::Normal, reason);
                return Ok(true);
            }
            Err(TryRecvError::Empty) => return Ok(false),
            Err(TryRecvError::Disconnected) => {
                close(ws, CloseCode::Away, "host stopped".into());
                return Ok(true);
            }
        };
        sent.map_err(|e| e.to_string())?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Buttons;

    #[test]
    fn header_round_trip() {
        let h = FrameHeader { tic: 77, width: 320, height: 240, kind: BufferKind::Depth, format: PixelFormat::Gray8 };
        let b = h.encode();
        assert_eq!(&b[..10], &[77, 0, 0, 0, 64, 1, 240, 0, 1, 1]);
        assert!(b[10..].iter().all(|&x| x == 0));
        assert_eq!(FrameHeader::parse(&b), Some(h));
        assert_eq!(h.payload_len(), 320 * 240);
    }

    #[test]
    fn control_messages() {
        assert_eq!(
            parse_control(r#"{"join_as":"player","name":"ann"}"#),
            Ok(Control::Join { player: true, name: "ann".into() })
        );
        let c = parse_control(r#"{"input":{"buttons":["ATTACK","move_forward"],"turn_delta":-40}}"#).unwrap();
        let Control::Input(cmd) = c else { panic!() };
        assert!(cmd.buttons.has(Buttons::ATTACK) && cmd.buttons.has(Buttons::MOVE_FORWARD));
        assert_eq!(cmd.turn_delta, -1500);
        assert!(parse_control("{nope").is_err());
        assert!(parse_control(r#"{"join_as":"referee"}"#).is_err());
        assert!(parse_control(r#"{"input":{"buttons":["TURN_DELTA"]}}"#).is_err());
    }

    #[test]
    fn frames_match_resolution() {
        let cfg = ScenarioConfig::default();
        let w = WorldState::new(Arc::new(cfg.map.clone()), 2, cfg.rules(), 3).unwrap();
        let opts = RenderOptions::with_size(64, 48).all_buffers();
        let frames = frame_messages(&w, 0, &opts);
        assert_eq!(frames.len(), 4);
        for f in frames {
            let h = FrameHeader::parse(&f).unwrap();
            assert_eq!((h.width, h.height), (64, 48));
            assert_eq!(f.len(), FRAME_HEADER_LEN + h.payload_len());
        }
    }
}
