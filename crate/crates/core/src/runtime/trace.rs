//! Communication trace records.
//!
//! Text form, one event per line, fields always in this order:
//!
//! ```text
//! kind=<kind> src=<rank> dst=<rank> bytes=<n> seq=<n> tag=<name>
//! ```
//!
//! `seq` counts events on the initiating process: the reader for
//! `onesided-get`, the writer for `onesided-put`, the sender for
//! `channel-send` and `block-transfer`, the receiver for `channel-recv`.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TraceKind {
    OneSidedGet,
    OneSidedPut,
    ChannelSend,
    ChannelRecv,
    BlockTransfer,
}

impl TraceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TraceKind::OneSidedGet => "onesided-get",
            TraceKind::OneSidedPut => "onesided-put",
            TraceKind::ChannelSend => "channel-send",
            TraceKind::ChannelRecv => "channel-recv",
            TraceKind::BlockTransfer => "block-transfer",
        }
    }

    pub fn is_onesided(self) -> bool {
        matches!(self, TraceKind::OneSidedGet | TraceKind::OneSidedPut)
    }

    pub fn is_channel(self) -> bool {
        matches!(self, TraceKind::ChannelSend | TraceKind::ChannelRecv)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TraceEvent {
    pub kind: TraceKind,
    pub src: usize,
    pub dst: usize,
    pub bytes: usize,
    pub seq: u64,
    pub tag: String,
}

impl TraceEvent {
    /// Rank whose sequence counter `seq` belongs to.
    pub fn initiator(&self) -> usize {
        match self.kind {
            TraceKind::OneSidedGet | TraceKind::ChannelRecv => self.dst,
            TraceKind::OneSidedPut | TraceKind::ChannelSend | TraceKind::BlockTransfer => self.src,
        }
    }
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "kind={} src={} dst={} bytes={} seq={} tag={}",
            self.kind.as_str(),
            self.src,
            self.dst,
            self.bytes,
            self.seq,
            self.tag
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed trace record: {0}")]
pub struct TraceParseError(pub String);

impl FromStr for TraceEvent {
    type Err = TraceParseError;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let err = || TraceParseError(line.to_string());
        let mut fields = line.split(' ');
        let mut field = |name: &str| -> Result<&str, TraceParseError> {
            let f = fields.next().ok_or_else(err)?;
            f.strip_prefix(name).and_then(|r| r.strip_prefix('=')).ok_or_else(err)
        };
        let kind = match field("kind")? {
            "onesided-get" => TraceKind::OneSidedGet,
            "onesided-put" => TraceKind::OneSidedPut,
            "channel-send" => TraceKind::ChannelSend,
            "channel-recv" => TraceKind::ChannelRecv,
            "block-transfer" => TraceKind::BlockTransfer,
            _ => return Err(err()),
        };
        let src = field("src")?.parse().map_err(|_| err())?;
        let dst = field("dst")?.parse().map_err(|_| err())?;
        let bytes = field("bytes")?.parse().map_err(|_| err())?;
        let seq = field("seq")?.parse().map_err(|_| err())?;
        let tag = field("tag")?.to_string();
        Ok(TraceEvent { kind, src, dst, bytes, seq, tag })
    }
}

/// Sort events by `(initiator, seq)`; the result does not depend on how
/// processes were interleaved.
pub fn canonical_order(events: &mut [TraceEvent]) {
    events.sort_by(|a, b| (a.initiator(), a.seq).cmp(&(b.initiator(), b.seq)));
}

pub fn render(events: &[TraceEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&e.to_string());
        out.push('\n');
    }
    out
}
