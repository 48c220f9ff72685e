//! Lockstep multiplayer over TCP plus the websocket bridge.
//!
//! Every peer runs the same deterministic simulation. The host gathers one
//! command per slot for tic T, broadcasts them as TICBATCH T and steps; a
//! client steps only on receiving a batch, so no peer ever runs ahead of
//! the host. Every 35 tics clients report their state hash and the host
//! aborts the match on the first mismatch.

pub mod protocol;
mod session;
pub mod ws_bridge;

pub use protocol::{decode, encode, ByeReason, Decoder, Message, ProtoError, MAX_PAYLOAD, PROTOCOL_VERSION};
pub use session::{
    Client, ClientOptions, DesyncReport, Host, HostOptions, HostOutcome, NetError, DEFAULT_DURATION, DEFAULT_PORT,
};
pub use ws_bridge::{parse_control, Control, FrameHeader, DEFAULT_WS_PORT, FRAME_HEADER_LEN};
