//! Shared pieces of the binary file formats (`.dn`, `.mxm`, `.rn`).
//!
//! All formats are little-endian and end with an 8-byte checksum: the XOR of
//! the payload read as consecutive little-endian `u64` words, the final word
//! zero-padded when the payload length is not a multiple of eight.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::{Error, Result};

pub const FORMAT_VERSION: u8 = 1;

#[derive(Debug, Default, Clone)]
pub struct XorFold {
    acc: u64,
    pending: [u8; 8],
    filled: usize,
}

impl XorFold {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn update(&mut self, mut bytes: &[u8]) {
        if self.filled > 0 {
            let take = (8 - self.filled).min(bytes.len());
            self.pending[self.filled..self.filled + take].copy_from_slice(&bytes[..take]);
            self.filled += take;
            bytes = &bytes[take..];
            if self.filled < 8 {
                return;
            }
            self.acc ^= u64::from_le_bytes(self.pending);
            self.filled = 0;
        }
        let mut chunks = bytes.chunks_exact(8);
        for c in &mut chunks {
            self.acc ^= u64::from_le_bytes(c.try_into().unwrap());
        }
        let rest = chunks.remainder();
        self.pending[..rest.len()].copy_from_slice(rest);
        self.filled = rest.len();
    }

    pub fn finish(&self) -> u64 {
        if self.filled == 0 {
            return self.acc;
        }
        let mut last = [0u8; 8];
        last[..self.filled].copy_from_slice(&self.pending[..self.filled]);
        self.acc ^ u64::from_le_bytes(last)
    }
}

pub fn xor_fold(bytes: &[u8]) -> u64 {
    let mut x = XorFold::new();
    x.update(bytes);
    x.finish()
}

/// Writer that folds every payload byte into a checksum as it goes.
pub struct PayloadWriter<W: Write> {
    inner: W,
    sum: XorFold,
}

impl<W: Write> PayloadWriter<W> {
    pub fn new(inner: W) -> Self {
        PayloadWriter {
            inner,
            sum: XorFold::new(),
        }
    }

    pub fn header(&mut self, bytes: &[u8]) -> io::Result<()> {
        self.inner.write_all(bytes)
    }

    pub fn payload(&mut self, bytes: &[u8]) -> io::Result<()> {
        self.sum.update(bytes);
        self.inner.write_all(bytes)
    }

    /// Writes the checksum trailer and flushes.
    pub fn finish(mut self) -> io::Result<W> {
        self.inner.write_all(&self.sum.finish().to_le_bytes())?;
        self.inner.flush()?;
        Ok(self.inner)
    }
}

/// Reader counterpart of [`PayloadWriter`]; maps short reads to format errors.
pub struct PayloadReader<R: Read> {
    inner: R,
    sum: XorFold,
}

impl<R: Read> PayloadReader<R> {
    pub fn new(inner: R) -> Self {
        PayloadReader {
            inner,
            sum: XorFold::new(),
        }
    }

    fn exact(&mut self, buf: &mut [u8], what: &str) -> Result<()> {
        self.inner.read_exact(buf).map_err(|e| {
            if e.kind() == io::ErrorKind::UnexpectedEof {
                Error::Format(format!("truncated file while reading {what}"))
            } else {
                Error::Io(e)
            }
        })
    }

    pub fn header(&mut self, buf: &mut [u8]) -> Result<()> {
        self.exact(buf, "header")
    }

    /// Checks the 4-byte magic and the version byte.
    pub fn magic_and_version(&mut self, magic: &[u8; 4]) -> Result<()> {
        let mut m = [0u8; 5];
        self.header(&mut m)?;
        if &m[..4] != magic {
            return Err(Error::Format(format!(
                "bad magic {:?}, expected {:?}",
                String::from_utf8_lossy(&m[..4]),
                String::from_utf8_lossy(magic)
            )));
        }
        if m[4] != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported format version {}", m[4])));
        }
        Ok(())
    }

    pub fn payload(&mut self, buf: &mut [u8]) -> Result<()> {
        self.exact(buf, "payload")?;
        self.sum.update(buf);
        Ok(())
    }

    /// Reads and checks the trailer, and that nothing follows it.
    pub fn finish(mut self) -> Result<()> {
        let mut t = [0u8; 8];
        self.exact(&mut t, "checksum")?;
        let stored = u64::from_le_bytes(t);
        let actual = self.sum.finish();
        if stored != actual {
            return Err(Error::Format(format!(
                "checksum mismatch: stored {stored:#018x}, computed {actual:#018x}"
            )));
        }
        let mut extra = [0u8; 1];
        match self.inner.read(&mut extra)? {
            0 => Ok(()),
            _ => Err(Error::Format("trailing bytes after checksum".into())),
        }
    }
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::with_capacity(1 << 20, File::create(path)?))
}

pub fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::with_capacity(1 << 20, File::open(path)?))
}
