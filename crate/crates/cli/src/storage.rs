//! Binary table cache.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic   4 bytes  "ICXT"
//! version u32      currently 1
//! limit   u64
//! payload limit bytes, byte i-1 holding the complexity of i
//! check   u64      FNV-1a 64 over the payload
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use icx_core::ComplexityTable;
use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"ICXT";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a table cache (bad magic)")]
    BadMagic,
    #[error("unsupported cache version {0}")]
    UnsupportedVersion(u32),
    #[error("cache is corrupt: {0}")]
    Corrupt(&'static str),
    #[error(transparent)]
    Table(#[from] icx_core::Error),
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

pub fn save_table(table: &ComplexityTable, path: &Path) -> Result<(), CacheError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&table.limit().to_le_bytes())?;
    w.write_all(table.payload())?;
    w.write_all(&fnv1a64(table.payload()).to_le_bytes())?;
    w.flush()?;
    Ok(())
}

pub fn load_table(path: &Path) -> Result<ComplexityTable, CacheError> {
    let mut r = BufReader::new(File::open(path)?);

    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|_| CacheError::Corrupt("truncated header"))?;
    if magic != MAGIC {
        return Err(CacheError::BadMagic);
    }

    let mut word = [0u8; 4];
    r.read_exact(&mut word).map_err(|_| CacheError::Corrupt("truncated header"))?;
    let version = u32::from_le_bytes(word);
    if version != VERSION {
        return Err(CacheError::UnsupportedVersion(version));
    }

    let mut qword = [0u8; 8];
    r.read_exact(&mut qword).map_err(|_| CacheError::Corrupt("truncated header"))?;
    let limit = u64::from_le_bytes(qword);
    let limit_usize =
        usize::try_from(limit).map_err(|_| CacheError::Corrupt("limit overflows this platform"))?;

    let mut payload = vec![0u8; limit_usize];
    r.read_exact(&mut payload).map_err(|_| CacheError::Corrupt("truncated payload"))?;

    r.read_exact(&mut qword).map_err(|_| CacheError::Corrupt("missing checksum"))?;
    let stored = u64::from_le_bytes(qword);
    if stored != fnv1a64(&payload) {
        return Err(CacheError::Corrupt("checksum mismatch"));
    }

    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(CacheError::Corrupt("trailing bytes after checksum"));
    }

    Ok(ComplexityTable::from_payload(limit, payload)?)
}
