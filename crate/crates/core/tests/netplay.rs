mod common;

use std::io::{Read, Write};
use std::net::TcpStream;
use std::time::Duration;

use pixelarena::bots::{BotKind, BotSpec};
use pixelarena::net::{
    decode, encode, ByeReason, Client, ClientOptions, Decoder, FrameHeader, HostOptions, Message, NetError,
    FRAME_HEADER_LEN, PROTOCOL_VERSION,
};
use pixelarena::render::RenderOptions;
use pixelarena::replay::{replay_hashes, ReplayFile};
use pixelarena::scenario::Mode;
use pixelarena::sim::{Buttons, Tuning};
use serde_json::Value;
use tungstenite::Message as WsMessage;

fn opts(players: usize, bots: usize, duration: u32) -> HostOptions {
    let mut o = HostOptions::new(common::arena(players, 21));
    o.bots = (0..bots).map(|i| BotSpec { kind: BotKind::Fighter, seed: Some(i as u64) }).collect();
    o.duration = Some(duration);
    o.lobby_timeout = Duration::from_secs(20);
    o
}

fn raw_join(addr: std::net::SocketAddr, proto: u16) -> (TcpStream, Decoder) {
    let mut s = TcpStream::connect(addr).unwrap();
    s.set_read_timeout(Some(Duration::from_secs(10))).unwrap();
    s.write_all(&encode(&Message::Hello { proto, name: "raw".into() })).unwrap();
    (s, Decoder::new())
}

fn raw_recv(s: &mut TcpStream, d: &mut Decoder) -> Message {
    let mut buf = [0u8; 4096];
    loop {
        if let Some(m) = d.next_message().unwrap() {
            return m;
        }
        let n = s.read(&mut buf).unwrap();
        assert!(n > 0, "host closed without a message");
        d.push(&buf[..n]);
    }
}

#[test]
fn lockstep_peers_agree_on_every_hash() {
    let (addr, _, host) = common::start_host(opts(3, 1, 300));
    let a = common::start_client(addr, "a", ClientOptions::default(), BotKind::Fighter);
    let b = common::start_client(addr, "b", ClientOptions::default(), BotKind::Wanderer);
    let out = host.join().unwrap().unwrap();
    let (ha, hb) = (a.join().unwrap().unwrap(), b.join().unwrap().unwrap());
    let (replayed, stats) = replay_hashes(&out.replay).unwrap();
    assert_eq!(replayed.len(), 300);
    assert_eq!(ha, replayed);
    assert_eq!(hb, replayed);
    assert_eq!(stats, out.stats);
    assert_eq!(out.missed, vec![0, 0, 0]);
    assert_eq!(out.names[..2].iter().filter(|n| *n == "a" || *n == "b").count(), 2);
}

#[test]
fn seventeenth_peer_is_turned_away() {
    let (addr, _, host) = common::start_host(opts(16, 0, 20));
    let peers: Vec<Client> = (0..16).map(|i| Client::connect(addr, &format!("p{i}"), ClientOptions::default()).unwrap()).collect();
    let ids: std::collections::BTreeSet<usize> = peers.iter().map(Client::player_id).collect();
    assert_eq!(ids.len(), 16);
    match Client::connect(addr, "late", ClientOptions::default()) {
        Err(NetError::Rejected(ByeReason::Full)) => {}
        Err(e) => panic!("expected Full, got {e}"),
        Ok(_) => panic!("expected Full, got a slot"),
    }
    drop(peers);
    let out = host.join().unwrap().unwrap();
    assert!(out.frozen.iter().all(|&f| f));
    assert!(out.missed.iter().all(|&m| m == 20));
}

#[test]
fn leaving_peer_is_frozen() {
    let (addr, _, host) = common::start_host(opts(2, 1, 200));
    let mut c = Client::connect(addr, "quitter", ClientOptions::default()).unwrap();
    for _ in 0..50 {
        c.send_action(pixelarena::sim::TicCmd::new(Buttons::MOVE_FORWARD)).unwrap();
        c.next_tic().unwrap().unwrap();
    }
    drop(c);
    let out = host.join().unwrap().unwrap();
    assert_eq!(out.world.tic, 200);
    assert_eq!(out.frozen, vec![true, false]);
    assert_eq!(out.missed, vec![150, 0]);
    let f = ReplayFile::parse(&out.replay).unwrap();
    assert!(f.tics[49][0].buttons.has(Buttons::MOVE_FORWARD));
    assert_eq!(f.tics[50][0], pixelarena::sim::TicCmd::EMPTY);
}

#[test]
fn hash_from_the_future_is_a_protocol_error() {
    let (addr, _, host) = common::start_host(opts(1, 0, 30));
    let (mut s, mut d) = raw_join(addr, PROTOCOL_VERSION);
    assert!(matches!(raw_recv(&mut s, &mut d), Message::Welcome { player_id: 0, .. }));
    s.write_all(&encode(&Message::Ready)).unwrap();
    s.write_all(&encode(&Message::Hash { tic: 1000, hash: 1 })).unwrap();
    assert_eq!(raw_recv(&mut s, &mut d), Message::Bye { reason: ByeReason::ProtocolError });
    let out = host.join().unwrap().unwrap();
    assert_eq!(out.frozen, vec![true]);
}

#[test]
fn garbage_bytes_get_a_protocol_bye() {
    let mut o = opts(1, 0, 30);
    o.lobby_timeout = Duration::from_millis(800);
    let (addr, _, host) = common::start_host(o);
    let mut s = TcpStream::connect(addr).unwrap();
    s.set_read_timeout(Some(Duration::from_secs(10))).unwrap();
    s.write_all(&[3, 0, 0, 0, 42, 1, 2, 3]).unwrap();
    let mut d = Decoder::new();
    assert_eq!(raw_recv(&mut s, &mut d), Message::Bye { reason: ByeReason::ProtocolError });
    assert!(matches!(host.join().unwrap(), Err(NetError::LobbyTimeout { ready: 0, needed: 1 })));
}

#[test]
fn wrong_version_is_rejected() {
    let mut o = opts(2, 1, 30);
    o.lobby_timeout = Duration::from_millis(800);
    let (addr, _, host) = common::start_host(o);
    let (mut s, mut d) = raw_join(addr, PROTOCOL_VERSION + 1);
    assert_eq!(raw_recv(&mut s, &mut d), Message::Bye { reason: ByeReason::VersionMismatch });
    assert!(host.join().unwrap().is_err());
}

#[test]
fn diverging_peer_is_caught_at_first_checkpoint() {
    let (addr, _, host) = common::start_host(opts(2, 1, 700));
    let tuning = Tuning { forward_speed: Tuning::default().forward_speed + 1, ..Tuning::default() };
    let bad = std::thread::spawn(move || {
        let mut c = Client::connect(addr, "drifter", ClientOptions { tuning: Some(tuning), ..Default::default() })?;
        loop {
            c.send_action(pixelarena::sim::TicCmd::new(Buttons::MOVE_FORWARD))?;
            if c.next_tic()?.is_none() {
                return Ok::<u32, NetError>(c.world().tic);
            }
        }
    });
    match host.join().unwrap() {
        Err(NetError::Desync(r)) => {
            assert_eq!((r.tic, r.player), (35, 0));
            assert_ne!(r.expected, r.got);
        }
        other => panic!("expected a desync, got {other:?}"),
    }
    assert!(matches!(bad.join().unwrap(), Err(NetError::Ended(ByeReason::Desync)) | Err(_)));
}

fn ws_connect(addr: std::net::SocketAddr, join: &str) -> tungstenite::WebSocket<tungstenite::stream::MaybeTlsStream<TcpStream>> {
    let (mut ws, _) = tungstenite::connect(format!("ws://{addr}")).unwrap();
    ws.send(WsMessage::text(join)).unwrap();
    ws
}

fn read_text(ws: &mut tungstenite::WebSocket<tungstenite::stream::MaybeTlsStream<TcpStream>>) -> Value {
    loop {
        match ws.read().unwrap() {
            WsMessage::Text(t) => return serde_json::from_str(t.as_str()).unwrap(),
            WsMessage::Binary(_) => continue,
            other => panic!("unexpected {other:?}"),
        }
    }
}

#[test]
fn websocket_player_and_spectator() {
    let mut o = opts(3, 1, 70);
    o.config.render = RenderOptions::with_size(64, 48).all_buffers();
    o.ws_bind = Some("127.0.0.1:0".into());
    let (addr, ws_addr, host) = common::start_host(o);
    let ws_addr = ws_addr.unwrap();

    let mut player = ws_connect(ws_addr, r#"{"join_as":"player","name":"web"}"#);
    let welcome = read_text(&mut player);
    let w = &welcome["welcome"];
    assert_eq!((w["role"].as_str(), w["player_id"].as_u64()), (Some("player"), Some(0)));
    assert_eq!((w["width"].as_u64(), w["height"].as_u64()), (Some(64), Some(48)));
    assert_eq!(w["buffers"].as_array().unwrap().len(), 4);
    player.send(WsMessage::text(r#"{"input":{"buttons":["ATTACK"],"turn_delta":5}}"#)).unwrap();

    let mut viewer = ws_connect(ws_addr, r#"{"join_as":"spectator"}"#);
    let welcome = read_text(&mut viewer);
    assert_eq!(welcome["welcome"]["role"].as_str(), Some("spectator"));
    assert!(welcome["welcome"]["player_id"].is_null());
    std::thread::sleep(Duration::from_millis(300));

    let tcp = common::start_client(addr, "tcp", ClientOptions::default(), BotKind::Wanderer);
    let mut frames = 0;
    let mut boards = 0;
    let mut last_tic = 0;
    loop {
        match viewer.read() {
            Ok(WsMessage::Binary(b)) => {
                let h = FrameHeader::parse(&b).unwrap();
                assert_eq!((h.width, h.height), (64, 48));
                assert_eq!(b.len(), FRAME_HEADER_LEN + h.payload_len());
                assert!(h.tic >= last_tic);
                last_tic = h.tic;
                frames += 1;
            }
            Ok(WsMessage::Text(t)) => {
                let v: Value = serde_json::from_str(t.as_str()).unwrap();
                assert_eq!(v["scoreboard"]["players"].as_array().unwrap().len(), 3);
                boards += 1;
            }
            Ok(WsMessage::Close(_)) | Err(_) => break,
            Ok(_) => {}
        }
    }
    let out = host.join().unwrap().unwrap();
    tcp.join().unwrap().unwrap();
    assert_eq!(frames, 70 * 4);
    assert_eq!(boards, 2);
    assert_eq!(last_tic, 70);
    assert_eq!(out.names[0], "web");
    let f = ReplayFile::parse(&out.replay).unwrap();
    for cmds in &f.tics {
        assert!(cmds[0].buttons.has(Buttons::ATTACK));
        assert_eq!(cmds[0].turn_delta, 500);
    }
}

#[test]
fn async_host_keeps_time_and_substitutes_for_slow_peers() {
    let mut o = opts(2, 1, 70);
    o.config.mode = Mode::AsyncPlayer;
    let (addr, _, host) = common::start_host(o);
    let slow = ClientOptions { action_delay: Duration::from_millis(80), ..Default::default() };
    let client = common::start_client(addr, "slow", slow, BotKind::Fighter);
    let out = host.join().unwrap().unwrap();
    let _ = client.join();
    assert!((out.tic_rate - 35.0).abs() < 35.0 * 0.05, "rate {}", out.tic_rate);
    assert!(out.missed[0] > 35, "missed {}", out.missed[0]);
    assert_eq!(out.missed[1], 0);
    assert_eq!(replay_hashes(&out.replay).unwrap().1, out.stats);
}

#[test]
fn decode_reports_consumed_length() {
    let mut b = encode(&Message::Ready);
    b.extend(encode(&Message::Hash { tic: 35, hash: 9 }));
    let (m, n) = decode(&b).unwrap();
    assert_eq!(m, Message::Ready);
    assert_eq!(decode(&b[n..]).unwrap().0, Message::Hash { tic: 35, hash: 9 });
}
