//! Lockstep wire format.
//!
//! Every frame is `u32 len | u8 type | payload[len]`, little-endian, where
//! `len` counts the payload only.
//!
//! | type | message  | payload                                              |
//! |------|----------|------------------------------------------------------|
//! | 1    | HELLO    | proto u16, name utf-8 (rest)                         |
//! | 2    | WELCOME  | player_id u8, seed u64, cfg_len u32, cfg, map (rest) |
//! | 3    | READY    | empty                                                |
//! | 4    | ACTION   | tic u32, buttons u32, turn_delta i16                 |
//! | 5    | TICBATCH | tic u32, n u8, n × (buttons u32, turn_delta i16)     |
//! | 6    | HASH     | tic u32, hash u64                                    |
//! | 7    | BYE      | reason u8                                            |

use thiserror::Error;

use crate::sim::{Buttons, TicCmd};

pub const PROTOCOL_VERSION: u16 = 1;
/// Largest accepted payload.
pub const MAX_PAYLOAD: usize = 1 << 20;
pub const HEADER_LEN: usize = 5;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum ByeReason {
    MatchOver,
    Full,
    Desync,
    ProtocolError,
    PeerLeft,
    VersionMismatch,
    Other(u8),
}

impl ByeReason {
    pub fn code(self) -> u8 {
        match self {
            ByeReason::MatchOver => 0,
            ByeReason::Full => 1,
            ByeReason::Desync => 2,
            ByeReason::ProtocolError => 3,
            ByeReason::PeerLeft => 4,
            ByeReason::VersionMismatch => 5,
            ByeReason::Other(c) => c,
        }
    }

    pub fn from_code(c: u8) -> ByeReason {
        match c {
            0 => ByeReason::MatchOver,
            1 => ByeReason::Full,
            2 => ByeReason::Desync,
            3 => ByeReason::ProtocolError,
            4 => ByeReason::PeerLeft,
            5 => ByeReason::VersionMismatch,
            c => ByeReason::Other(c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Message {
    Hello { proto: u16, name: String },
    Welcome { player_id: u8, seed: u64, config: String, map: String },
    Ready,
    Action { tic: u32, cmd: TicCmd },
    TicBatch { tic: u32, cmds: Vec<TicCmd> },
    Hash { tic: u32, hash: u64 },
    Bye { reason: ByeReason },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtoError {
    #[error("truncated frame: need {needed} bytes, have {available}")]
    Truncated { needed: usize, available: usize },
    #[error("bad length {len} for message type {ty}")]
    BadLength { ty: u8, len: usize },
    #[error("unknown message type {0:#04x}")]
    UnknownType(u8),
    #[error("invalid utf-8 in message type {0}")]
    BadUtf8(u8),
}

impl Message {
    pub fn type_byte(&self) -> u8 {
        match self {
            Message::Hello { .. } => 1,
            Message::Welcome { .. } => 2,
            Message::Ready => 3,
            Message::Action { .. } => 4,
            Message::TicBatch { .. } => 5,
            Message::Hash { .. } => 6,
            Message::Bye { .. } => 7,
        }
    }
}

fn put_cmd(out: &mut Vec<u8>, cmd: &TicCmd) {
    out.extend_from_slice(&cmd.buttons.0.to_le_bytes());
    out.extend_from_slice(&cmd.turn_delta.to_le_bytes());
}

/// Serializes one frame.
///
/// # Panics
/// If a TICBATCH carries more than 255 commands.
pub fn encode(msg: &Message) -> Vec<u8> {
    let mut p = Vec::new();
    match msg {
        Message::Hello { proto, name } => {
            p.extend_from_slice(&proto.to_le_bytes());
            p.extend_from_slice(name.as_bytes());
        }
        Message::Welcome { player_id, seed, config, map } => {
            p.push(*player_id);
            p.extend_from_slice(&seed.to_le_bytes());
            p.extend_from_slice(&(config.len() as u32).to_le_bytes());
            p.extend_from_slice(config.as_bytes());
            p.extend_from_slice(map.as_bytes());
        }
        Message::Ready => {}
        Message::Action { tic, cmd } => {
            p.extend_from_slice(&tic.to_le_bytes());
            put_cmd(&mut p, cmd);
        }
        Message::TicBatch { tic, cmds } => {
            let n = u8::try_from(cmds.len()).expect("at most 255 commands per batch");
            p.extend_from_slice(&tic.to_le_bytes());
            p.push(n);
            cmds.iter().for_each(|c| put_cmd(&mut p, c));
        }
        Message::Hash { tic, hash } => {
            p.extend_from_slice(&tic.to_le_bytes());
            p.extend_from_slice(&hash.to_le_bytes());
        }
        Message::Bye { reason } => p.push(reason.code()),
    }
    let mut out = Vec::with_capacity(HEADER_LEN + p.len());
    out.extend_from_slice(&(p.len() as u32).to_le_bytes());
    out.push(msg.type_byte());
    out.extend_from_slice(&p);
    out
}

fn u32_at(b: &[u8], i: usize) -> u32 {
    u32::from_le_bytes(b[i..i + 4].try_into().unwrap())
}

fn cmd_at(b: &[u8], i: usize) -> TicCmd {
    TicCmd {
        buttons: Buttons(u32_at(b, i)),
        turn_delta: i16::from_le_bytes([b[i + 4], b[i + 5]]),
    }
}

fn payload(ty: u8, p: &[u8]) -> Result<Message, ProtoError> {
    let bad = || ProtoError::BadLength { ty, len: p.len() };
    let text = |b: &[u8]| String::from_utf8(b.to_vec()).map_err(|_| ProtoError::BadUtf8(ty));
    Ok(match ty {
        1 => {
            if p.len() < 2 {
                return Err(bad());
            }
            Message::Hello { proto: u16::from_le_bytes([p[0], p[1]]), name: text(&p[2..])? }
        }
        2 => {
            if p.len() < 13 {
                return Err(bad());
            }
            let cfg_len = u32_at(p, 9) as usize;
            if cfg_len > p.len() - 13 {
                return Err(bad());
            }
            Message::Welcome {
                player_id: p[0],
                seed: u64::from_le_bytes(p[1..9].try_into().unwrap()),
                config: text(&p[13..13 + cfg_len])?,
                map: text(&p[13 + cfg_len..])?,
            }
        }
        3 => {
            if !p.is_empty() {
                return Err(bad());
            }
            Message::Ready
        }
        4 => {
            if p.len() != 10 {
                return Err(bad());
            }
            Message::Action { tic: u32_at(p, 0), cmd: cmd_at(p, 4) }
        }
        5 => {
            if p.len() < 5 || p.len() != 5 + 6 * p[4] as usize {
                return Err(bad());
            }
            Message::TicBatch { tic: u32_at(p, 0), cmds: (0..p[4] as usize).map(|i| cmd_at(p, 5 + 6 * i)).collect() }
        }
        6 => {
            if p.len() != 12 {
                return Err(bad());
            }
            Message::Hash { tic: u32_at(p, 0), hash: u64::from_le_bytes(p[4..12].try_into().unwrap()) }
        }
        7 => {
            if p.len() != 1 {
                return Err(bad());
            }
            Message::Bye { reason: ByeReason::from_code(p[0]) }
        }
        other => return Err(ProtoError::UnknownType(other)),
    })
}

/// Decodes the frame at the start of `bytes`, returning it and the number
/// of bytes consumed.
pub fn decode(bytes: &[u8]) -> Result<(Message, usize), ProtoError> {
    if bytes.len() < HEADER_LEN {
        return Err(ProtoError::Truncated { needed: HEADER_LEN, available: bytes.len() });
    }
    let len = u32_at(bytes, 0) as usize;
    let ty = bytes[4];
    if !(1..=7).contains(&ty) {
        return Err(ProtoError::UnknownType(ty));
    }
    if len > MAX_PAYLOAD {
        return Err(ProtoError::BadLength { ty, len });
    }
    let total = HEADER_LEN + len;
    if bytes.len() < total {
        return Err(ProtoError::Truncated { needed: total, available: bytes.len() });
    }
    Ok((payload(ty, &bytes[HEADER_LEN..total])?, total))
}

/// Reassembles frames from arbitrarily split reads.
#[derive(Debug, Default)]
pub struct Decoder {
    buf: Vec<u8>,
}

impl Decoder {
    pub fn new() -> Decoder {
        Decoder::default()
    }

    pub fn push(&mut self, bytes: &[u8]) {
        self.buf.extend_from_slice(bytes);
    }

    pub fn buffered(&self) -> usize {
        self.buf.len()
    }

    /// Next complete message, `Ok(None)` if more bytes are needed. After an
    /// error the stream is unusable.
    pub fn next_message(&mut self) -> Result<Option<Message>, ProtoError> {
        match decode(&self.buf) {
            Ok((msg, used)) => {
                self.buf.drain(..used);
                Ok(Some(msg))
            }
            Err(ProtoError::Truncated { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }
}
