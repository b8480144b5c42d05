//! `GRST1` strategy-table files.
//!
//! Layout, little-endian: magic `GRST1`, u16 vertex count, u8 variant id,
//! u8 flags, u64 entry count, then entries sorted by key. A key is the
//! base-3 code of the position (its canonical representative on complete
//! boards of up to eight vertices); with flag bit 0 set it is
//! `2 * code + side`, side 1 meaning Green to move. Entries are a u64 key and
//! a value byte (0 R-WIN, 1 R-LOSS, 2 TIE). When flag bit 1 is set every key
//! is instead written as a u16 byte length followed by that many
//! little-endian bytes.

use std::collections::HashMap;
use std::io::{Read, Write};

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::{StrategyTable, Value};
use crate::error::{Error, Result};
use crate::game::GameSpec;

pub const TABLE_MAGIC: &[u8; 5] = b"GRST1";

const SIDE_IN_KEY: u8 = 1;
const WIDE_KEYS: u8 = 2;

pub(crate) fn file_key(table: &StrategyTable, key: u128) -> BigUint {
    let code = table.compiled().key_code(key);
    if table.side_in_key() {
        code * 2u32 + (key & 1) as u32
    } else {
        code
    }
}

pub fn write_table<W: Write>(table: &StrategyTable, mut out: W) -> Result<()> {
    let mut rows: Vec<(BigUint, Value)> =
        table.sorted_entries().into_iter().map(|(k, v, _)| (file_key(table, k), v)).collect();
    rows.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let wide = rows.iter().any(|(k, _)| k.bits() > 64);
    let n = u16::try_from(table.spec().board().vertex_count())
        .map_err(|_| Error::Format("vertex count exceeds 16 bits".into()))?;
    let mut flags = 0;
    if table.side_in_key() {
        flags |= SIDE_IN_KEY;
    }
    if wide {
        flags |= WIDE_KEYS;
    }
    out.write_all(TABLE_MAGIC)?;
    out.write_all(&n.to_le_bytes())?;
    out.write_all(&[table.spec().variant().id(), flags])?;
    out.write_all(&(rows.len() as u64).to_le_bytes())?;
    for (k, v) in rows {
        if wide {
            let bytes = k.to_bytes_le();
            out.write_all(&(bytes.len() as u16).to_le_bytes())?;
            out.write_all(&bytes)?;
        } else {
            out.write_all(&k.to_u64().expect("narrow key").to_le_bytes())?;
        }
        out.write_all(&[v.byte()])?;
    }
    out.flush()?;
    Ok(())
}

fn take<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(|e| Error::Format(format!("truncated table: {e}")))?;
    Ok(buf)
}

/// Reads a table written for `spec`. The header must match the spec's
/// vertex count, variant and key layout.
pub fn read_table<R: Read>(spec: &GameSpec, mut input: R) -> Result<StrategyTable> {
    if &take::<5, _>(&mut input)? != TABLE_MAGIC {
        return Err(Error::Format("not a GRST1 file".into()));
    }
    let n = u16::from_le_bytes(take(&mut input)?);
    let [variant, flags] = take::<2, _>(&mut input)?;
    let count = u64::from_le_bytes(take(&mut input)?);
    if n as usize != spec.board().vertex_count() || variant != spec.variant().id() {
        return Err(Error::Format("table header does not match the game".into()));
    }
    if flags & !(SIDE_IN_KEY | WIDE_KEYS) != 0 {
        return Err(Error::Format(format!("unknown flags {flags:#04x}")));
    }
    let game = super::CompiledGame::new(spec)?;
    if (flags & SIDE_IN_KEY != 0) != game.side_in_key {
        return Err(Error::Format("side-in-key flag does not match the variant".into()));
    }
    let mut entries = HashMap::new();
    let mut last: Option<BigUint> = None;
    for _ in 0..count {
        let key = if flags & WIDE_KEYS != 0 {
            let len = u16::from_le_bytes(take(&mut input)?) as usize;
            let mut bytes = vec![0u8; len];
            input.read_exact(&mut bytes).map_err(|e| Error::Format(format!("truncated table: {e}")))?;
            BigUint::from_bytes_le(&bytes)
        } else {
            BigUint::from(u64::from_le_bytes(take(&mut input)?))
        };
        let [v] = take::<1, _>(&mut input)?;
        let value = Value::from_byte(v).ok_or_else(|| Error::Format(format!("bad value byte {v}")))?;
        if last.as_ref().is_some_and(|l| *l >= key) {
            return Err(Error::Format("keys are not strictly ascending".into()));
        }
        let (code, side) = if game.side_in_key {
            (&key >> 1u32, key.bit(0))
        } else {
            (key.clone(), false)
        };
        entries.insert(game.key_from_code(&code, side)?, value.byte());
        last = Some(key);
    }
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after the last entry".into()));
    }
    StrategyTable::from_entries(spec, entries)
}
