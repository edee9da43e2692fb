//! Trace persistence: newline-delimited text and a packed binary format.
//!
//! Text: one trace per line, each slot a single '0' or '1' character.
//! Binary: the stream is a sequence of records, each `GEB1` magic, a
//! little-endian u32 slot count, then ceil(n/8) bytes of bits packed
//! LSB-first. Round-trips preserve slot values and trace boundaries; the
//! seed/rep provenance of a [`BinaryTrace`] is not stored.

use crate::error::{domain, Result};
use crate::sim::BinaryTrace;
use std::io::{BufRead, Read, Write};

const MAGIC: &[u8; 4] = b"GEB1";

pub fn write_traces_text<W: Write>(mut w: W, traces: &[BinaryTrace]) -> Result<()> {
    let mut line = Vec::new();
    for t in traces {
        line.clear();
        line.extend(t.bits().iter().map(|&b| b + b'0'));
        line.push(b'\n');
        w.write_all(&line)?;
    }
    Ok(())
}

pub fn read_traces_text<R: BufRead>(r: R) -> Result<Vec<BinaryTrace>> {
    let mut traces = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let mut bits = Vec::with_capacity(line.len());
        for ch in line.bytes() {
            match ch {
                b'0' => bits.push(0),
                b'1' => bits.push(1),
                other => {
                    return domain(format!(
                        "trace line {}: unexpected byte 0x{other:02x}",
                        idx + 1
                    ))
                }
            }
        }
        traces.push(BinaryTrace::from_bits(bits));
    }
    Ok(traces)
}

pub fn write_traces_binary<W: Write>(mut w: W, traces: &[BinaryTrace]) -> Result<()> {
    for t in traces {
        let bits = t.bits();
        let n = u32::try_from(bits.len())
            .map_err(|_| crate::Error::TraceFormat("trace longer than u32 slots".into()))?;
        w.write_all(MAGIC)?;
        w.write_all(&n.to_le_bytes())?;
        let mut packed = vec![0u8; bits.len().div_ceil(8)];
        for (i, &b) in bits.iter().enumerate() {
            packed[i / 8] |= b << (i % 8);
        }
        w.write_all(&packed)?;
    }
    Ok(())
}

pub fn read_traces_binary<R: Read>(mut r: R) -> Result<Vec<BinaryTrace>> {
    let mut traces = Vec::new();
    loop {
        let mut magic = [0u8; 4];
        match r.read(&mut magic)? {
            0 => break,
            4 => {}
            k => {
                // tolerate a short read mid-header by filling the rest
                r.read_exact(&mut magic[k..])
                    .map_err(|_| crate::Error::TraceFormat("truncated record header".into()))?;
            }
        }
        if &magic != MAGIC {
            return Err(crate::Error::TraceFormat(format!(
                "bad magic {magic:02x?}, expected {MAGIC:02x?}"
            )));
        }
        let mut len = [0u8; 4];
        r.read_exact(&mut len)
            .map_err(|_| crate::Error::TraceFormat("truncated slot count".into()))?;
        let n = u32::from_le_bytes(len) as usize;
        let mut packed = vec![0u8; n.div_ceil(8)];
        r.read_exact(&mut packed)
            .map_err(|_| crate::Error::TraceFormat("truncated payload".into()))?;
        let bits = (0..n).map(|i| (packed[i / 8] >> (i % 8)) & 1).collect();
        traces.push(BinaryTrace::from_bits(bits));
    }
    Ok(traces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn sample() -> Vec<BinaryTrace> {
        vec![
            BinaryTrace::from_bits(vec![0, 1, 1, 0, 1]),
            BinaryTrace::from_bits(vec![1; 9]),
            BinaryTrace::from_bits(vec![0, 0, 0]),
        ]
    }

    #[test]
    fn text_roundtrip() {
        let traces = sample();
        let mut buf = Vec::new();
        write_traces_text(&mut buf, &traces).unwrap();
        assert_eq!(buf, b"01101\n111111111\n000\n");
        let back = read_traces_text(Cursor::new(&buf)).unwrap();
        assert_eq!(back.len(), 3);
        for (a, b) in traces.iter().zip(&back) {
            assert_eq!(a.bits(), b.bits());
        }
        assert!(read_traces_text(Cursor::new(b"01x\n")).is_err());
        assert!(read_traces_text(Cursor::new(b"")).unwrap().is_empty());
    }

    #[test]
    fn binary_roundtrip() {
        let traces = sample();
        let mut buf = Vec::new();
        write_traces_binary(&mut buf, &traces).unwrap();
        // record 1: magic + len 5 + one byte 0b10110 = 0x16
        assert_eq!(&buf[..4], b"GEB1");
        assert_eq!(&buf[4..8], &5u32.to_le_bytes());
        assert_eq!(buf[8], 0b10110);
        let back = read_traces_binary(Cursor::new(&buf)).unwrap();
        assert_eq!(back.len(), 3);
        for (a, b) in traces.iter().zip(&back) {
            assert_eq!(a.bits(), b.bits());
        }
    }

    #[test]
    fn binary_rejects_corruption() {
        let mut buf = Vec::new();
        write_traces_binary(&mut buf, &sample()).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_traces_binary(Cursor::new(&bad)).is_err());
        let truncated = &buf[..buf.len() - 1];
        assert!(read_traces_binary(Cursor::new(truncated)).is_err());
        assert!(read_traces_binary(Cursor::new(&[][..])).unwrap().is_empty());
    }

    #[test]
    fn binary_handles_multiple_of_eight() {
        let t = vec![BinaryTrace::from_bits(vec![1, 0, 1, 0, 1, 0, 1, 0])];
        let mut buf = Vec::new();
        write_traces_binary(&mut buf, &t).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 1);
        let back = read_traces_binary(Cursor::new(&buf)).unwrap();
        assert_eq!(back[0].bits(), t[0].bits());
    }
}
