//! Resume files.
//!
//! ```text
//! BROCARD-CHECKPOINT v1
//! max_n=<decimal>
//! n=<decimal>
//! primes=<count>
//! <prime>,<residue>        one line per pool prime, pool order
//! crc32=<8 lowercase hex>  CRC-32 of every preceding byte
//! ```
//!
//! ASCII with LF line endings. The checksum is verified before any field is
//! parsed, so a corrupted byte anywhere shows up as a checksum mismatch.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{CheckpointError, Error, Result};
use crate::factorial_engine::{FactorialState, PrimePool};

pub const VERSION_LINE: &str = "BROCARD-CHECKPOINT v1";

/// The checkpoint text for `state`.
pub fn render_checkpoint(state: &FactorialState, pool: &PrimePool) -> String {
    let mut body = format!(
        "{VERSION_LINE}\nmax_n={}\nn={}\nprimes={}\n",
        pool.max_n(),
        state.n(),
        pool.len()
    );
    for (p, r) in pool.primes().iter().zip(state.residues()) {
        body.push_str(&format!("{p},{r}\n"));
    }
    let crc = crc32fast::hash(body.as_bytes());
    body.push_str(&format!("crc32={crc:08x}\n"));
    body
}

/// Writes the checkpoint to a sibling temp file and renames it over `path`.
pub fn save_checkpoint(state: &FactorialState, pool: &PrimePool, path: &Path) -> Result<()> {
    let text = render_checkpoint(state, pool);
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    let write = || -> std::io::Result<()> {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(text.as_bytes())?;
        file.sync_all()
    };
    write().map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Stored fields of a checkpoint, checksum already verified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckpointBody {
    pub max_n: u64,
    pub n: u64,
    pub entries: Vec<(u64, u64)>,
}

pub fn parse_checkpoint(text: &[u8]) -> Result<CheckpointBody, CheckpointError> {
    let first_end = text.iter().position(|&b| b == b'\n').unwrap_or(text.len());
    let first = String::from_utf8_lossy(&text[..first_end]);
    if first != VERSION_LINE {
        return Err(CheckpointError::VersionMismatch(first.into_owned()));
    }

    let malformed = |what: &str| CheckpointError::Malformed(what.to_string());
    let trimmed = text
        .strip_suffix(b"\n")
        .ok_or_else(|| malformed("missing final newline"))?;
    let crc_start = trimmed
        .iter()
        .rposition(|&b| b == b'\n')
        .map(|i| i + 1)
        .ok_or_else(|| malformed("missing checksum line"))?;
    let crc_line = std::str::from_utf8(&trimmed[crc_start..]).map_err(|_| malformed("non-ASCII checksum"))?;
    let stored = crc_line
        .strip_prefix("crc32=")
        .filter(|hex| hex.len() == 8 && hex.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')))
        .and_then(|hex| u32::from_str_radix(hex, 16).ok())
        .ok_or_else(|| malformed("bad checksum line"))?;
    let body = &text[..crc_start];
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(CheckpointError::ChecksumMismatch { stored, computed });
    }

    let body = std::str::from_utf8(body).map_err(|_| malformed("non-ASCII body"))?;
    let mut lines = body.lines().skip(1);
    let mut field = |key: &str| -> Result<u64, CheckpointError> {
        lines
            .next()
            .and_then(|l| l.strip_prefix(key))
            .and_then(|l| l.strip_prefix('='))
            .and_then(parse_decimal)
            .ok_or_else(|| CheckpointError::Malformed(format!("expected {key}=<decimal>")))
    };
    let max_n = field("max_n")?;
    let n = field("n")?;
    let count = field("primes")?;
    let entries = lines
        .map(|l| {
            l.split_once(',')
                .and_then(|(p, r)| Some((parse_decimal(p)?, parse_decimal(r)?)))
                .ok_or_else(|| malformed("expected <prime>,<residue>"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if entries.len() as u64 != count {
        return Err(malformed("prime count does not match the entries"));
    }
    Ok(CheckpointBody { max_n, n, entries })
}

fn parse_decimal(s: &str) -> Option<u64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || (s.len() > 1 && s.starts_with('0')) {
        return None;
    }
    s.parse().ok()
}

/// Loads a checkpoint and checks it belongs to `expected_pool`. The returned
/// state sits at the stored `n`; the scan resumes at `n + 1`.
pub fn load_checkpoint(path: &Path, expected_pool: &PrimePool) -> Result<FactorialState> {
    let text = fs::read(path).map_err(|e| Error::io(path, e))?;
    let body = parse_checkpoint(&text)?;
    let primes: Vec<u64> = body.entries.iter().map(|&(p, _)| p).collect();
    if body.max_n != expected_pool.max_n() || primes != expected_pool.primes() {
        return Err(CheckpointError::PoolMismatch.into());
    }
    let residues = body.entries.iter().map(|&(_, r)| r).collect();
    FactorialState::from_residues(expected_pool, body.n, residues)
        .map_err(|e| CheckpointError::Malformed(e.to_string()).into())
}
