//! AER packets and trace files.
//!
//! A packet is 6 bytes: neuron id as `u16` then timestamp as `u32`, both
//! little-endian. A binary trace file is a bare concatenation of packets. The
//! text form has one `timestamp,neuron_id` pair per line.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PACKET_BYTES: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AerPacket {
    pub neuron_id: u16,
    pub timestamp: u32,
}

impl AerPacket {
    pub fn new(neuron_id: u16, timestamp: u32) -> Self {
        AerPacket {
            neuron_id,
            timestamp,
        }
    }
}

pub fn encode_packet(p: AerPacket) -> [u8; PACKET_BYTES] {
    let mut out = [0u8; PACKET_BYTES];
    out[..2].copy_from_slice(&p.neuron_id.to_le_bytes());
    out[2..].copy_from_slice(&p.timestamp.to_le_bytes());
    out
}

pub fn decode_packet(bytes: &[u8]) -> Result<AerPacket> {
    if bytes.len() != PACKET_BYTES {
        return Err(Error::Packet(format!(
            "packet must be {PACKET_BYTES} bytes, got {}",
            bytes.len()
        )));
    }
    Ok(AerPacket {
        neuron_id: u16::from_le_bytes([bytes[0], bytes[1]]),
        timestamp: u32::from_le_bytes([bytes[2], bytes[3], bytes[4], bytes[5]]),
    })
}

pub fn encode_trace(packets: &[AerPacket]) -> Vec<u8> {
    let mut out = Vec::with_capacity(packets.len() * PACKET_BYTES);
    for &p in packets {
        out.extend_from_slice(&encode_packet(p));
    }
    out
}

pub fn decode_trace(bytes: &[u8]) -> Result<Vec<AerPacket>> {
    if bytes.len() % PACKET_BYTES != 0 {
        return Err(Error::Packet(format!(
            "trace length {} is not a multiple of {PACKET_BYTES}",
            bytes.len()
        )));
    }
    bytes
        .chunks_exact(PACKET_BYTES)
        .map(decode_packet)
        .collect()
}

pub fn write_trace(path: &Path, packets: &[AerPacket]) -> Result<()> {
    fs::write(path, encode_trace(packets)).map_err(|e| Error::io(path, e))
}

pub fn read_trace(path: &Path) -> Result<Vec<AerPacket>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_trace(&bytes)
}

pub fn format_trace_text(packets: &[AerPacket]) -> String {
    let mut out = String::with_capacity(packets.len() * 10);
    for p in packets {
        let _ = writeln!(out, "{},{}", p.timestamp, p.neuron_id);
    }
    out
}

pub fn parse_trace_text(text: &str) -> Result<Vec<AerPacket>> {
    let mut packets = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = || {
            Error::Packet(format!(
                "line {}: expected `timestamp,neuron_id`, got `{line}`",
                n + 1
            ))
        };
        let (ts, id) = line.split_once(',').ok_or_else(bad)?;
        let timestamp = ts.trim().parse().map_err(|_| bad())?;
        let neuron_id = id.trim().parse().map_err(|_| bad())?;
        packets.push(AerPacket {
            neuron_id,
            timestamp,
        });
    }
    Ok(packets)
}

pub fn write_trace_text(path: &Path, packets: &[AerPacket]) -> Result<()> {
    fs::write(path, format_trace_text(packets)).map_err(|e| Error::io(path, e))
}

pub fn read_trace_text(path: &Path) -> Result<Vec<AerPacket>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_trace_text(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn byte_layout() {
        assert_eq!(encode_packet(AerPacket::new(0, 0)), [0; 6]);
        assert_eq!(encode_packet(AerPacket::new(5, 3)), [5, 0, 3, 0, 0, 0]);
        assert_eq!(
            encode_packet(AerPacket::new(0x0102, 0x0A0B0C0D)),
            [0x02, 0x01, 0x0D, 0x0C, 0x0B, 0x0A]
        );
    }

    #[test]
    fn decode_rejects_wrong_length() {
        assert!(decode_packet(&[0; 5]).is_err());
        assert!(decode_packet(&[0; 7]).is_err());
        assert!(decode_trace(&[0; 13]).is_err());
        assert_eq!(decode_trace(&[]).unwrap(), vec![]);
    }

    #[test]
    fn text_form() {
        let packets = vec![AerPacket::new(3, 0), AerPacket::new(17, 42)];
        let text = format_trace_text(&packets);
        assert_eq!(text, "0,3\n42,17\n");
        assert_eq!(parse_trace_text(&text).unwrap(), packets);
        assert!(parse_trace_text("1;2").is_err());
        assert!(parse_trace_text("1,70000").is_err());
    }

    proptest! {
        #[test]
        fn packet_round_trip(id in any::<u16>(), ts in any::<u32>()) {
            let p = AerPacket::new(id, ts);
            prop_assert_eq!(decode_packet(&encode_packet(p)).unwrap(), p);
        }

        #[test]
        fn trace_round_trip(raw in proptest::collection::vec((any::<u16>(), any::<u32>()), 0..64)) {
            let packets: Vec<_> = raw.into_iter().map(|(i, t)| AerPacket::new(i, t)).collect();
            let bytes = encode_trace(&packets);
            prop_assert_eq!(bytes.len(), packets.len() * PACKET_BYTES);
            prop_assert_eq!(decode_trace(&bytes).unwrap(), packets);
        }
    }
}
