//! Raw value dumps.
//!
//! Binary layout, all integers little-endian:
//!
//! ```text
//! "LSUM"            4-byte magic
//! version: u16      currently 1
//! repeated per set:
//!   set_index:  u32
//!   realized_k: u32  (0 when values have individual counts)
//!   count:      u32
//!   values:     count x u64
//! ```
//!
//! The CSV variant has a `set_index,value` header and one row per value.

use std::fs::File;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::Path;

use super::config::RawFormat;
use crate::error::{Error, Result};
use crate::layers::SetResult;

pub const MAGIC: &[u8; 4] = b"LSUM";
pub const FORMAT_VERSION: u16 = 1;

/// One set as read back from a dump.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawSet {
    pub set_index: u32,
    pub realized_k: u32,
    pub values: Vec<u64>,
}

pub struct RawWriter {
    format: RawFormat,
    out: BufWriter<File>,
    values_written: u64,
}

impl RawWriter {
    pub fn create(path: &Path, format: RawFormat) -> Result<Self> {
        if path.as_os_str().is_empty() || path.is_dir() {
            return Err(Error::Path(path.to_path_buf()));
        }
        let mut out = BufWriter::new(File::create(path)?);
        match format {
            RawFormat::Bin => {
                out.write_all(MAGIC)?;
                out.write_all(&FORMAT_VERSION.to_le_bytes())?;
            }
            RawFormat::Csv => out.write_all(b"set_index,value\n")?,
        }
        Ok(RawWriter { format, out, values_written: 0 })
    }

    pub fn write_set(&mut self, set: &SetResult) -> Result<()> {
        match self.format {
            RawFormat::Bin => {
                let count = u32::try_from(set.values.len()).map_err(|_| Error::Format("set too large".into()))?;
                self.out.write_all(&set.set_index.to_le_bytes())?;
                self.out.write_all(&set.realized_k.unwrap_or(0).to_le_bytes())?;
                self.out.write_all(&count.to_le_bytes())?;
                for v in &set.values {
                    self.out.write_all(&v.to_le_bytes())?;
                }
            }
            RawFormat::Csv => {
                for v in &set.values {
                    writeln!(self.out, "{},{}", set.set_index, v)?;
                }
            }
        }
        self.values_written += set.values.len() as u64;
        Ok(())
    }

    pub fn values_written(&self) -> u64 {
        self.values_written
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

fn read_u32(r: &mut impl Read) -> std::io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

/// Reads a binary dump back into memory.
pub fn read_raw(path: &Path) -> Result<Vec<RawSet>> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let mut version = [0u8; 2];
    r.read_exact(&mut version)?;
    let version = u16::from_le_bytes(version);
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let mut sets = Vec::new();
    loop {
        let set_index = match read_u32(&mut r) {
            Ok(v) => v,
            Err(e) if e.kind() == ErrorKind::UnexpectedEof => break,
            Err(e) => return Err(e.into()),
        };
        let realized_k = read_u32(&mut r)?;
        let count = read_u32(&mut r)? as usize;
        let mut values = Vec::with_capacity(count);
        let mut b = [0u8; 8];
        for _ in 0..count {
            r.read_exact(&mut b).map_err(|_| Error::Format("truncated value block".into()))?;
            values.push(u64::from_le_bytes(b));
        }
        sets.push(RawSet { set_index, realized_k, values });
    }
    Ok(sets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(i: u32, k: Option<u32>, values: Vec<u64>) -> SetResult {
        SetResult { set_index: i, values, realized_k: k, per_value_k: None, draws: 0 }
    }

    #[test]
    fn binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("raw.bin");
        let mut w = RawWriter::create(&path, RawFormat::Bin).unwrap();
        w.write_set(&set(1, Some(3), vec![3, 9, u64::MAX])).unwrap();
        w.write_set(&set(2, None, vec![])).unwrap();
        assert_eq!(w.values_written(), 3);
        w.finish().unwrap();
        let back = read_raw(&path).unwrap();
        assert_eq!(back[0], RawSet { set_index: 1, realized_k: 3, values: vec![3, 9, u64::MAX] });
        assert_eq!(back[1], RawSet { set_index: 2, realized_k: 0, values: vec![] });
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..6], b"LSUM\x01\x00");
        assert_eq!(bytes.len(), 6 + 12 + 24 + 12);
    }

    #[test]
    fn invalid_paths_and_data() {
        assert!(matches!(RawWriter::create(Path::new(""), RawFormat::Bin), Err(Error::Path(_))));
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(RawWriter::create(dir.path(), RawFormat::Csv), Err(Error::Path(_))));
        let path = dir.path().join("junk.bin");
        std::fs::write(&path, b"NOPE\x01\x00").unwrap();
        assert!(matches!(read_raw(&path), Err(Error::Format(_))));
        std::fs::write(&path, b"LSUM\x01\x00\x01\x00\x00\x00\x00\x00\x00\x00\x02\x00\x00\x00\x05").unwrap();
        assert!(matches!(read_raw(&path), Err(Error::Format(_))));
    }

    #[test]
    fn csv_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("raw.csv");
        let mut w = RawWriter::create(&path, RawFormat::Csv).unwrap();
        w.write_set(&set(4, Some(1), vec![7, 8])).unwrap();
        w.finish().unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "set_index,value\n4,7\n4,8\n");
    }
}
