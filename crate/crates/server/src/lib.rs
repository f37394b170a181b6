//! Live selection sessions over a line-delimited JSON protocol.
//!
//! A client sends a `config` message, then streams `input` samples. The
//! server answers with `layout`, `belief`, `decision` and `error` messages.

pub mod protocol;
pub mod session;
pub mod transport;

pub use protocol::{InMsg, OutMsg, SessionConfig, Shape, PROTOCOL_VERSION};
pub use session::{Session, MAX_TARGETS};
pub use transport::{serve_stdio, serve_stream, serve_tcp, Connection};
