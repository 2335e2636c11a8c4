//! Matrix dumps.
//!
//! Binary layout: the 4-byte magic `QMAT`, rows and columns as
//! little-endian `u32`, then `rows * cols` complex entries in column-major
//! order, each written as two little-endian `f64` (real, imaginary).
//! The CSV form has header `row,col,re,im` and one line per entry.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};

pub const MAGIC: &[u8; 4] = b"QMAT";

pub fn write_binary<W: Write>(m: &CMatrix, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(m.nrows() as u32).to_le_bytes())?;
    w.write_all(&(m.ncols() as u32).to_le_bytes())?;
    for z in m.iter() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<CMatrix> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::InvalidState("bad matrix dump magic".into()));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let rows = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b4)?;
    let cols = u32::from_le_bytes(b4) as usize;
    let mut data = Vec::with_capacity(rows * cols);
    let mut b8 = [0u8; 8];
    for _ in 0..rows * cols {
        r.read_exact(&mut b8)?;
        let re = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let im = f64::from_le_bytes(b8);
        data.push(c(re, im));
    }
    Ok(CMatrix::from_vec(rows, cols, data))
}

pub fn write_csv<W: Write>(m: &CMatrix, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["row", "col", "re", "im"])?;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            out.write_record([
                i.to_string(),
                j.to_string(),
                format!("{:e}", z.re),
                format!("{:e}", z.im),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip() {
        let m = CMatrix::from_fn(3, 2, |i, j| c(i as f64 + 0.5, -(j as f64)));
        let mut buf = Vec::new();
        write_binary(&m, &mut buf).unwrap();
        assert_eq!(buf.len(), 12 + 6 * 16);
        assert_eq!(read_binary(&buf[..]).unwrap(), m);
    }
}
