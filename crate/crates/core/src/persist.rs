//! Binary table cache and text import of external τ tables.
//!
//! Cache layout, all integers little-endian:
//!
//! | offset | size | field                                   |
//! |-------:|-----:|-----------------------------------------|
//! | 0      | 4    | magic `RST1`                            |
//! | 4      | 2    | format version (`1`)                    |
//! | 6      | 8    | `n_max`                                 |
//! | 14     | 2    | weight κ                                |
//! | 16     | 8    | CRC-64/ECMA-182 of the payload          |
//! | 24     | 16·n | payload: τ(1), …, τ(n_max) as `i128`    |
//!
//! Only τ is stored; every derived array is recomputed on load.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crc::{Crc, CRC_64_ECMA_182};

use crate::coefficients::sieve_tau;
use crate::{CoefficientTable, Error, Result, TAU_WEIGHT};

pub const MAGIC: [u8; 4] = *b"RST1";
pub const FORMAT_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 24;
/// Imported values with `n` up to this bound are checked against the sieve.
pub const IMPORT_CROSS_CHECK: usize = 10_000;

const CHECKSUM: Crc<u64> = Crc::<u64>::new(&CRC_64_ECMA_182);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CacheHeader {
    pub version: u16,
    pub n_max: u64,
    pub kappa: u16,
    pub checksum: u64,
}

impl CacheHeader {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[0..4].copy_from_slice(&MAGIC);
        out[4..6].copy_from_slice(&self.version.to_le_bytes());
        out[6..14].copy_from_slice(&self.n_max.to_le_bytes());
        out[14..16].copy_from_slice(&self.kappa.to_le_bytes());
        out[16..24].copy_from_slice(&self.checksum.to_le_bytes());
        out
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::CorruptCache(format!(
                "file has {} bytes, shorter than the {HEADER_LEN}-byte header",
                bytes.len()
            )));
        }
        if bytes[0..4] != MAGIC {
            return Err(Error::CorruptCache("bad magic".into()));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != FORMAT_VERSION {
            return Err(Error::CorruptCache(format!(
                "format version {version}, expected {FORMAT_VERSION}"
            )));
        }
        Ok(Self {
            version,
            n_max: u64::from_le_bytes(bytes[6..14].try_into().expect("8 bytes")),
            kappa: u16::from_le_bytes([bytes[14], bytes[15]]),
            checksum: u64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes")),
        })
    }
}

pub fn encode_table(table: &CoefficientTable) -> Result<Vec<u8>> {
    let kappa = u16::try_from(table.kappa()).map_err(|_| {
        Error::invalid(format!(
            "weight {} does not fit the cache header",
            table.kappa()
        ))
    })?;
    let tau = &table.tau()[1..];
    let mut payload = Vec::with_capacity(16 * tau.len());
    for t in tau {
        payload.extend_from_slice(&t.to_le_bytes());
    }
    let header = CacheHeader {
        version: FORMAT_VERSION,
        n_max: tau.len() as u64,
        kappa,
        checksum: CHECKSUM.checksum(&payload),
    };
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(&header.to_bytes());
    out.extend_from_slice(&payload);
    Ok(out)
}

pub fn decode_table(bytes: &[u8]) -> Result<CoefficientTable> {
    let header = CacheHeader::parse(bytes)?;
    let payload = &bytes[HEADER_LEN..];
    let expected = header
        .n_max
        .checked_mul(16)
        .filter(|&len| len == payload.len() as u64);
    if expected.is_none() {
        return Err(Error::CorruptCache(format!(
            "payload has {} bytes but n_max = {} needs {}",
            payload.len(),
            header.n_max,
            header.n_max as u128 * 16
        )));
    }
    if header.n_max == 0 {
        return Err(Error::CorruptCache("empty table".into()));
    }
    let sum = CHECKSUM.checksum(payload);
    if sum != header.checksum {
        return Err(Error::CorruptCache(format!(
            "checksum {sum:#018x} does not match header {:#018x}",
            header.checksum
        )));
    }
    let mut tau = Vec::with_capacity(payload.len() / 16 + 1);
    tau.push(0i128);
    tau.extend(
        payload
            .chunks_exact(16)
            .map(|ch| i128::from_le_bytes(ch.try_into().expect("16 bytes"))),
    );
    CoefficientTable::from_tau(tau, u32::from(header.kappa))
        .map_err(|e| Error::CorruptCache(format!("stored coefficients rejected: {e}")))
}

/// Writes the cache atomically (temporary file, then rename).
pub fn save_table(path: impl AsRef<Path>, table: &CoefficientTable) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_table(table)?;
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_table(path: impl AsRef<Path>) -> Result<CoefficientTable> {
    decode_table(&fs::read(path)?)
}

/// Reads `n τ(n)` pairs, one per line, contiguous from `n = 1`. Blank lines and
/// lines starting with `#` are ignored. Values with `n ≤ 10⁴` must match the
/// sieve exactly.
pub fn import_external_tau(path: impl AsRef<Path>) -> Result<CoefficientTable> {
    parse_external_tau(BufReader::new(fs::File::open(path)?))
}

pub fn parse_external_tau(reader: impl BufRead) -> Result<CoefficientTable> {
    let mut tau = vec![0i128];
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fail = |msg: String| Error::Format { line: line_no, msg };
        let mut fields = text.split_whitespace();
        let (Some(n), Some(value), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(fail(format!("expected \"n tau(n)\", got {text:?}")));
        };
        let n: usize = n.parse().map_err(|_| fail(format!("bad index {n:?}")))?;
        if n != tau.len() {
            return Err(fail(format!("expected n = {}, got {n}", tau.len())));
        }
        let value: i128 = value.replace('\u{2212}', "-").parse().map_err(|_| {
            fail(format!(
                "tau({n}) = {value:?} is not an integer that fits in 128 bits"
            ))
        })?;
        tau.push(value);
    }
    if tau.len() < 2 {
        return Err(Error::Format {
            line: 0,
            msg: "no coefficients found".into(),
        });
    }
    let check = (tau.len() - 1).min(IMPORT_CROSS_CHECK);
    let sieved = sieve_tau(check)?;
    if let Some(n) = (1..=check).find(|&n| sieved[n] != tau[n]) {
        return Err(Error::CrossCheck {
            n,
            imported: tau[n],
            sieved: sieved[n],
        });
    }
    CoefficientTable::from_tau(tau, TAU_WEIGHT)
}
