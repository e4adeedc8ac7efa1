use std::io::{Read, Write};

use nalgebra::DMatrix;

use super::{FiniteHamiltonian, Kinetic, Spectrum};
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"FERMIHAM";
const VERSION: u32 = 1;

/// Header of the binary matrix layout. All integers and floats are
/// little-endian:
///
/// ```text
/// magic "FERMIHAM" | u32 version | u64 n | u8 kinetic (0 laplacian, 1 adjacency)
/// f64 g | u32 len | len bytes of JSON parameters | n·n f64, row-major
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryHeader {
    pub dimension: usize,
    pub kinetic: Kinetic,
    pub g: f64,
    pub params: serde_json::Value,
}

pub fn write_binary(h: &FiniteHamiltonian, params: &serde_json::Value, mut w: impl Write) -> Result<()> {
    let n = h.len();
    let json = serde_json::to_vec(params)?;
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(n as u64).to_le_bytes())?;
    w.write_all(&[u8::from(h.kinetic == Kinetic::Adjacency)])?;
    w.write_all(&h.g.to_le_bytes())?;
    w.write_all(&(json.len() as u32).to_le_bytes())?;
    w.write_all(&json)?;
    for i in 0..n {
        for j in 0..n {
            w.write_all(&h.matrix[(i, j)].to_le_bytes())?;
        }
    }
    Ok(())
}

fn take<const K: usize>(r: &mut impl Read) -> Result<[u8; K]> {
    let mut buf = [0u8; K];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

pub fn read_binary(mut r: impl Read) -> Result<(BinaryHeader, DMatrix<f64>)> {
    if &take::<8>(&mut r)? != MAGIC {
        return Err(Error::InvalidParameter("not a FERMIHAM file".into()));
    }
    let version = u32::from_le_bytes(take(&mut r)?);
    if version != VERSION {
        return Err(Error::InvalidParameter(format!("unsupported version {version}")));
    }
    let n = u64::from_le_bytes(take(&mut r)?) as usize;
    let kinetic = match take::<1>(&mut r)?[0] {
        0 => Kinetic::Laplacian,
        1 => Kinetic::Adjacency,
        k => return Err(Error::InvalidParameter(format!("unknown kinetic tag {k}"))),
    };
    let g = f64::from_le_bytes(take(&mut r)?);
    let len = u32::from_le_bytes(take(&mut r)?) as usize;
    let mut json = vec![0u8; len];
    r.read_exact(&mut json)?;
    let params = serde_json::from_slice(&json)?;
    let mut data = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        data.push(f64::from_le_bytes(take(&mut r)?));
    }
    Ok((BinaryHeader { dimension: n, kinetic, g, params }, DMatrix::from_row_slice(n, n, &data)))
}

/// `index,eigenvalue` rows.
pub fn write_spectrum_csv(spectrum: &Spectrum, mut w: impl Write) -> Result<()> {
    writeln!(w, "index,eigenvalue")?;
    for (i, e) in spectrum.values.iter().enumerate() {
        writeln!(w, "{i},{e:.17e}")?;
    }
    Ok(())
}
