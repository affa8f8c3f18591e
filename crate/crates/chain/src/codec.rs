//! Length-prefixed big-endian binary encoding shared by every on-chain type.

use zkbid_core::group::{GroupElement, POINT_LEN};
use zkbid_core::hash::Digest32;
use zkbid_core::{AccountSignature, Address};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("unexpected end of input reading {0}")]
    Truncated(&'static str),
    #[error("{0} trailing bytes")]
    TrailingBytes(usize),
    #[error("unknown format id {found:#06x} for {what}, expected {expected:#06x}")]
    FormatId { what: &'static str, found: u16, expected: u16 },
    #[error("invalid {0}")]
    Invalid(&'static str),
    #[error("length {0} exceeds limit")]
    TooLong(usize),
}

/// Upper bound on any single length prefix, to keep hostile input from
/// forcing large allocations.
pub const MAX_FIELD_LEN: usize = 1 << 24;

#[derive(Debug, Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Writer::default()
    }

    pub fn u8(&mut self, v: u8) -> &mut Self {
        self.buf.push(v);
        self
    }

    pub fn u16(&mut self, v: u16) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn u32(&mut self, v: u32) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn i64(&mut self, v: i64) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn raw(&mut self, bytes: &[u8]) -> &mut Self {
        self.buf.extend_from_slice(bytes);
        self
    }

    /// `u32` length prefix followed by the bytes.
    pub fn bytes(&mut self, bytes: &[u8]) -> &mut Self {
        self.u32(bytes.len() as u32).raw(bytes)
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

pub struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf }
    }

    pub fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8], DecodeError> {
        if self.buf.len() < n {
            return Err(DecodeError::Truncated(what));
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    pub fn array<const N: usize>(&mut self, what: &'static str) -> Result<[u8; N], DecodeError> {
        Ok(self.take(N, what)?.try_into().expect("exact length"))
    }

    pub fn u8(&mut self, what: &'static str) -> Result<u8, DecodeError> {
        Ok(self.take(1, what)?[0])
    }

    pub fn u16(&mut self, what: &'static str) -> Result<u16, DecodeError> {
        Ok(u16::from_be_bytes(self.array(what)?))
    }

    pub fn u32(&mut self, what: &'static str) -> Result<u32, DecodeError> {
        Ok(u32::from_be_bytes(self.array(what)?))
    }

    pub fn u64(&mut self, what: &'static str) -> Result<u64, DecodeError> {
        Ok(u64::from_be_bytes(self.array(what)?))
    }

    pub fn i64(&mut self, what: &'static str) -> Result<i64, DecodeError> {
        Ok(i64::from_be_bytes(self.array(what)?))
    }

    pub fn len_prefix(&mut self, what: &'static str) -> Result<usize, DecodeError> {
        let n = self.u32(what)? as usize;
        if n > MAX_FIELD_LEN {
            return Err(DecodeError::TooLong(n));
        }
        Ok(n)
    }

    pub fn bytes(&mut self, what: &'static str) -> Result<&'a [u8], DecodeError> {
        let n = self.len_prefix(what)?;
        self.take(n, what)
    }

    pub fn format_id(&mut self, what: &'static str, expected: u16) -> Result<(), DecodeError> {
        let found = self.u16(what)?;
        if found != expected {
            return Err(DecodeError::FormatId { what, found, expected });
        }
        Ok(())
    }

    pub fn digest(&mut self, what: &'static str) -> Result<Digest32, DecodeError> {
        Ok(Digest32(self.array(what)?))
    }

    pub fn address(&mut self, what: &'static str) -> Result<Address, DecodeError> {
        Ok(Address(self.array(what)?))
    }

    pub fn point(&mut self, what: &'static str) -> Result<GroupElement, DecodeError> {
        GroupElement::from_bytes(self.take(POINT_LEN, what)?).map_err(|_| DecodeError::Invalid(what))
    }

    pub fn account_signature(&mut self, what: &'static str) -> Result<AccountSignature, DecodeError> {
        AccountSignature::from_bytes(self.take(AccountSignature::LEN, what)?).map_err(|_| DecodeError::Invalid(what))
    }

    pub fn remaining(&self) -> usize {
        self.buf.len()
    }

    pub fn finish(self) -> Result<(), DecodeError> {
        match self.buf.len() {
            0 => Ok(()),
            n => Err(DecodeError::TrailingBytes(n)),
        }
    }
}
