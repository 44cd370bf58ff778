//! AER packets: the 6-byte codec and the binary and text trace files.
//!
//! ```text
//! cargo run --example aer_trace -- [out_dir]
//! ```

use std::path::PathBuf;

use aern::engine::aer::{
    decode_trace, encode_trace, format_trace_text, read_trace, read_trace_text, write_trace,
    write_trace_text,
};
use aern::engine::{decode_packet, encode_packet, PACKET_BYTES};
use aern::AerPacket;

fn main() -> aern::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map_or_else(std::env::temp_dir, PathBuf::from);
    let p = AerPacket::new(513, 70_000);
    let bytes = encode_packet(p);
    println!("{p:?} -> {bytes:02x?} ({PACKET_BYTES} bytes, little endian id then timestamp)");
    assert_eq!(decode_packet(&bytes)?, p);
    match decode_packet(&bytes[..4]) {
        Err(e) => println!("short packet rejected: {e}"),
        Ok(_) => unreachable!(),
    }

    let trace: Vec<AerPacket> = (0..12u16)
        .map(|k| AerPacket::new(k % 4, u32::from(k / 3)))
        .collect();
    assert_eq!(decode_trace(&encode_trace(&trace))?, trace);
    let bin = out.join("example_trace.aer");
    let txt = out.join("example_trace.txt");
    write_trace(&bin, &trace)?;
    write_trace_text(&txt, &trace)?;
    assert_eq!(read_trace(&bin)?, read_trace_text(&txt)?);
    println!("wrote {} and {}; text form:", bin.display(), txt.display());
    print!("{}", format_trace_text(&trace[..4]));
    Ok(())
}
