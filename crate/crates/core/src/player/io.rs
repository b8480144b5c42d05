//! `GRLN1` learning-table files.
//!
//! Little-endian: magic `GRLN1`, u16 vertex count, u8 variant id, u8 flags
//! (bit 0: side in key), the 32-byte SHA-256 spec fingerprint, u64 entry
//! count, then entries of u64 key and i8 value sorted by key.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use super::LearningTable;
use crate::error::{Error, Result};
use crate::game::Variant;

pub const LEARNING_MAGIC: &[u8; 5] = b"GRLN1";

fn fingerprint_bytes(hex: &str) -> Result<[u8; 32]> {
    let mut out = [0u8; 32];
    if hex.len() != 64 {
        return Err(Error::Format("fingerprint is not 64 hex digits".into()));
    }
    for (i, b) in out.iter_mut().enumerate() {
        *b = u8::from_str_radix(&hex[2 * i..2 * i + 2], 16).map_err(|e| Error::Format(e.to_string()))?;
    }
    Ok(out)
}

pub fn write_learning<W: Write>(table: &LearningTable, mut out: W) -> Result<()> {
    out.write_all(LEARNING_MAGIC)?;
    out.write_all(&table.vertex_count.to_le_bytes())?;
    out.write_all(&[table.variant.id(), u8::from(table.side_in_key)])?;
    out.write_all(&fingerprint_bytes(&table.fingerprint)?)?;
    out.write_all(&(table.entries.len() as u64).to_le_bytes())?;
    for (&k, &v) in &table.entries {
        out.write_all(&k.to_le_bytes())?;
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

fn take<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(|e| Error::Format(format!("truncated learning table: {e}")))?;
    Ok(buf)
}

pub fn read_learning<R: Read>(mut input: R) -> Result<LearningTable> {
    if &take::<5, _>(&mut input)? != LEARNING_MAGIC {
        return Err(Error::Format("not a GRLN1 file".into()));
    }
    let vertex_count = u16::from_le_bytes(take(&mut input)?);
    let [variant, flags] = take::<2, _>(&mut input)?;
    let variant = Variant::from_id(variant).ok_or_else(|| Error::Format(format!("unknown variant id {variant}")))?;
    if flags > 1 {
        return Err(Error::Format(format!("unknown flags {flags:#04x}")));
    }
    let fingerprint: String = take::<32, _>(&mut input)?.iter().map(|b| format!("{b:02x}")).collect();
    let count = u64::from_le_bytes(take(&mut input)?);
    let mut entries = BTreeMap::new();
    let mut last = None;
    for _ in 0..count {
        let key = u64::from_le_bytes(take(&mut input)?);
        let [v] = take::<1, _>(&mut input)?;
        let v = v as i8;
        if v == 0 {
            return Err(Error::Format("learned value 0".into()));
        }
        if last.is_some_and(|l| l >= key) {
            return Err(Error::Format("keys are not strictly ascending".into()));
        }
        last = Some(key);
        entries.insert(key, v);
    }
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after the last entry".into()));
    }
    Ok(LearningTable { fingerprint, vertex_count, variant, side_in_key: flags == 1, entries })
}
