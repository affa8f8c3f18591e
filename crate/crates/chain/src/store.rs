//! Append-only chain file and JSON-lines receipt log.
//!
//! Chain file: `"ZKCH" || u16 version || u32 len || genesis`, then one
//! `u32 len || block` record per block.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::block::{Block, Genesis};
use crate::chain::ChainError;
use crate::codec::{DecodeError, Reader, Writer};
use crate::contracts::Receipt;

const MAGIC: &[u8; 4] = b"ZKCH";
const VERSION: u16 = 1;

pub fn create_chain_file(path: &Path, genesis: &Genesis) -> Result<(), ChainError> {
    let mut w = Writer::new();
    w.raw(MAGIC).u16(VERSION).bytes(&genesis.encode());
    let mut f = OpenOptions::new().write(true).create_new(true).open(path)?;
    f.write_all(&w.finish())?;
    f.sync_all()?;
    Ok(())
}

pub fn append_block(path: &Path, block: &Block) -> Result<(), ChainError> {
    let mut w = Writer::new();
    w.bytes(&block.encode());
    let mut f = OpenOptions::new().append(true).open(path)?;
    f.write_all(&w.finish())?;
    f.sync_all()?;
    Ok(())
}

/// Parses a whole chain file image.
pub fn decode_chain_file(bytes: &[u8]) -> Result<(Genesis, Vec<Block>), ChainError> {
    let mut r = Reader::new(bytes);
    if r.take(4, "magic")? != MAGIC {
        return Err(DecodeError::Invalid("chain file magic").into());
    }
    if r.u16("version")? != VERSION {
        return Err(DecodeError::Invalid("chain file version").into());
    }
    let genesis = Genesis::decode(r.bytes("genesis")?)?;
    let mut blocks = Vec::new();
    while r.remaining() > 0 {
        blocks.push(Block::decode(r.bytes("block")?)?);
    }
    Ok((genesis, blocks))
}

pub fn load_chain_file(path: &Path) -> Result<(Genesis, Vec<Block>), ChainError> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    decode_chain_file(&bytes)
}

pub fn append_receipts(path: &Path, receipts: &[Receipt]) -> Result<(), ChainError> {
    let mut f = OpenOptions::new().append(true).create(true).open(path)?;
    for r in receipts {
        let line = serde_json::to_string(r).map_err(|e| ChainError::Io(e.to_string()))?;
        writeln!(f, "{line}")?;
    }
    Ok(())
}

pub fn load_receipts(path: &Path) -> Result<Vec<Receipt>, ChainError> {
    let f = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    BufReader::new(f)
        .lines()
        .filter(|l| !matches!(l, Ok(s) if s.trim().is_empty()))
        .map(|l| {
            let l = l?;
            serde_json::from_str(&l).map_err(|e| ChainError::Io(format!("bad receipt line: {e}")))
        })
        .collect()
}
