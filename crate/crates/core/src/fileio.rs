//! Little-endian binary envelope shared by the index file formats:
//! 4-byte magic, 1-byte format version, payload, trailing CRC-64/XZ over
//! everything before it.

use crc::{Crc, CRC_64_XZ};

use crate::error::{Error, Result};

pub(crate) const SLING_MAGIC: &[u8; 4] = b"SLNG";
pub(crate) const MC_MAGIC: &[u8; 4] = b"SLMC";
pub(crate) const FORMAT_VERSION: u8 = b'1';

const CRC64: Crc<u64> = Crc::<u64>::new(&CRC_64_XZ);

pub(crate) fn crc64(bytes: &[u8]) -> u64 {
    CRC64.checksum(bytes)
}

/// Append-only little-endian buffer; `finish` seals it with the checksum.
pub(crate) struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new(magic: &[u8; 4]) -> Self {
        let mut buf = Vec::new();
        buf.extend_from_slice(magic);
        buf.push(FORMAT_VERSION);
        Self { buf }
    }

    pub fn put_u8(&mut self, x: u8) {
        self.buf.push(x);
    }

    pub fn put_u16(&mut self, x: u16) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }

    pub fn put_u32(&mut self, x: u32) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }

    pub fn put_u64(&mut self, x: u64) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }

    pub fn put_f64(&mut self, x: f64) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }

    pub fn finish(mut self) -> Vec<u8> {
        let sum = crc64(&self.buf);
        self.buf.extend_from_slice(&sum.to_le_bytes());
        self.buf
    }
}

/// Validates magic, version, and checksum; returns the payload between the
/// version byte and the checksum.
pub(crate) fn verify_envelope<'a>(bytes: &'a [u8], magic: &[u8; 4]) -> Result<&'a [u8]> {
    if bytes.len() < 13 {
        return Err(Error::Format("file too short".into()));
    }
    let (payload, crc_bytes) = bytes.split_at(bytes.len() - 8);
    let stored = u64::from_le_bytes(crc_bytes.try_into().unwrap());
    if crc64(payload) != stored {
        return Err(Error::ChecksumMismatch);
    }
    if &payload[..4] != magic {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            &payload[..4],
            magic
        )));
    }
    if payload[4] != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported format version {}",
            payload[4] as char
        )));
    }
    Ok(&payload[5..])
}

/// Bounds-checked little-endian reader over a payload slice.
pub(crate) struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        if self.pos + len > self.buf.len() {
            return Err(Error::Format("unexpected end of payload".into()));
        }
        let out = &self.buf[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }
}
