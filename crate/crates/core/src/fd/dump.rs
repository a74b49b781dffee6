//! Flat little-endian record of a grid solution.
//!
//! ```text
//! magic    8 bytes  "IVFGRID1"
//! version  u32
//! nx, ny   u64, u64
//! h, r_inf f64, f64
//! x        nx × f64   cell-center abscissae
//! y        ny × f64   cell-center ordinates
//! u        ny × nx × (f64 u_x, f64 u_y), row-major with x fastest
//! ```

use std::io::{Read, Write};

use crate::error::{Error, Result};

pub const DUMP_MAGIC: &[u8; 8] = b"IVFGRID1";
pub const DUMP_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DumpHeader {
    pub version: u32,
    pub nx: u64,
    pub ny: u64,
    pub h: f64,
    pub r_inf: f64,
}

pub(crate) fn header_len() -> usize {
    8 + 4 + 8 + 8 + 8 + 8
}

pub(crate) fn write<W: Write>(mut w: W, centers: &[f64], h: f64, r_inf: f64, u: &[(f64, f64)]) -> Result<()> {
    let n = centers.len() as u64;
    let mut buf = Vec::with_capacity(header_len() + 16 * (centers.len() + u.len()));
    buf.extend_from_slice(DUMP_MAGIC);
    buf.extend_from_slice(&DUMP_VERSION.to_le_bytes());
    buf.extend_from_slice(&n.to_le_bytes());
    buf.extend_from_slice(&n.to_le_bytes());
    buf.extend_from_slice(&h.to_le_bytes());
    buf.extend_from_slice(&r_inf.to_le_bytes());
    for _axis in 0..2 {
        for c in centers {
            buf.extend_from_slice(&c.to_le_bytes());
        }
    }
    for (ux, uy) in u {
        buf.extend_from_slice(&ux.to_le_bytes());
        buf.extend_from_slice(&uy.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_dump_header<R: Read>(r: &mut R) -> Result<DumpHeader> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != DUMP_MAGIC {
        return Err(Error::Parse("not a grid dump: bad magic".into()));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4)?;
    let version = u32::from_le_bytes(b4);
    let mut next = |r: &mut R| -> Result<[u8; 8]> {
        r.read_exact(&mut b8)?;
        Ok(b8)
    };
    let nx = u64::from_le_bytes(next(r)?);
    let ny = u64::from_le_bytes(next(r)?);
    let h = f64::from_le_bytes(next(r)?);
    let r_inf = f64::from_le_bytes(next(r)?);
    Ok(DumpHeader { version, nx, ny, h, r_inf })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bad_magic_rejected() {
        let bytes = b"NOTAGRID\x01\0\0\0".to_vec();
        assert!(matches!(read_dump_header(&mut bytes.as_slice()), Err(Error::Parse(_))));
    }

    #[test]
    fn layout() {
        let mut buf = Vec::new();
        write(&mut buf, &[-0.5, 0.5], 1.0, 5.0, &[(1.0, 2.0), (3.0, 4.0), (5.0, 6.0), (7.0, 8.0)]).unwrap();
        assert_eq!(buf.len(), header_len() + 8 * 4 + 16 * 4);
        let h = read_dump_header(&mut buf.as_slice()).unwrap();
        assert_eq!(h, DumpHeader { version: 1, nx: 2, ny: 2, h: 1.0, r_inf: 5.0 });
        let last = f64::from_le_bytes(buf[buf.len() - 8..].try_into().unwrap());
        assert_eq!(last, 8.0);
    }
}
