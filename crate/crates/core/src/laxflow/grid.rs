//! Rectangular grids of loop elements or Cartan vectors, and their binary format.
//!
//! Layout (little-endian): magic `TODAGRD\0`, version `u32`, kind `u8` (0 loop, 1 Cartan),
//! connection flag `u8`, series letter `u8`, rank `u32`, d `u32`, k `u32`, nx `u32`, ny `u32`,
//! h `f64`, real form id `u32`, node width `u32`; then node data row-major by `iy`, each
//! node as `(re, im)` `f64` pairs; then, if flagged, the stored connection per node.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::coxeter::LoopElement;
use crate::error::{Error, Result};
use crate::rootsystem::{CartanVector, Series};

pub const MAGIC: &[u8; 8] = b"TODAGRD\0";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Loop { d: usize },
    Cartan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub kind: GridKind,
    pub series: Series,
    pub rank: usize,
    pub k: usize,
    pub dim: usize,
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub real_form: usize,
    data: Vec<Complex64>,
    /// Per node `A_z` (degrees 0, 1) then `A_zbar` (degrees -1, 0), each `dim` long.
    connection: Option<Vec<Complex64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMeta {
    pub series: Series,
    pub rank: usize,
    pub k: usize,
    pub dim: usize,
    pub h: f64,
    pub real_form: usize,
}

impl FieldGrid {
    pub fn new(kind: GridKind, meta: GridMeta, nx: usize, ny: usize) -> Self {
        let width = Self::width_for(kind, meta.dim, meta.rank);
        FieldGrid {
            kind,
            series: meta.series,
            rank: meta.rank,
            k: meta.k,
            dim: meta.dim,
            nx,
            ny,
            h: meta.h,
            real_form: meta.real_form,
            data: vec![Complex64::new(0.0, 0.0); width * (nx + 1) * (ny + 1)],
            connection: None,
        }
    }

    fn width_for(kind: GridKind, dim: usize, rank: usize) -> usize {
        match kind {
            GridKind::Loop { d } => (2 * d + 1) * dim,
            GridKind::Cartan => rank,
        }
    }

    pub fn meta(&self) -> GridMeta {
        GridMeta { series: self.series, rank: self.rank, k: self.k, dim: self.dim, h: self.h, real_form: self.real_form }
    }

    /// Number of complex values per node.
    pub fn width(&self) -> usize {
        Self::width_for(self.kind, self.dim, self.rank)
    }

    pub fn d(&self) -> Option<usize> {
        match self.kind {
            GridKind::Loop { d } => Some(d),
            GridKind::Cartan => None,
        }
    }

    fn offset(&self, ix: usize, iy: usize) -> usize {
        assert!(ix <= self.nx && iy <= self.ny, "node ({ix},{iy}) outside grid");
        (iy * (self.nx + 1) + ix) * self.width()
    }

    pub fn node(&self, ix: usize, iy: usize) -> &[Complex64] {
        let o = self.offset(ix, iy);
        &self.data[o..o + self.width()]
    }

    pub fn node_mut(&mut self, ix: usize, iy: usize) -> &mut [Complex64] {
        let o = self.offset(ix, iy);
        let w = self.width();
        &mut self.data[o..o + w]
    }

    pub fn loop_at(&self, ix: usize, iy: usize) -> LoopElement {
        let d = self.d().expect("loop grid");
        LoopElement::from_flat(d, self.dim, self.node(ix, iy)).expect("node width matches")
    }

    pub fn set_loop(&mut self, ix: usize, iy: usize, x: &LoopElement) {
        let flat = x.to_flat();
        self.node_mut(ix, iy).copy_from_slice(&flat);
    }

    pub fn cartan_at(&self, ix: usize, iy: usize) -> CartanVector<Complex64> {
        CartanVector(self.node(ix, iy).to_vec())
    }

    pub fn set_cartan(&mut self, ix: usize, iy: usize, x: &CartanVector<Complex64>) {
        self.node_mut(ix, iy).copy_from_slice(&x.0);
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn connection(&self) -> Option<&[Complex64]> {
        self.connection.as_deref()
    }

    pub fn connection_at(&self, ix: usize, iy: usize) -> Option<&[Complex64]> {
        let w = 4 * self.dim;
        let o = (iy * (self.nx + 1) + ix) * w;
        self.connection.as_ref().map(|c| &c[o..o + w])
    }

    pub fn set_connection(&mut self, connection: Vec<Complex64>) -> Result<()> {
        let expected = 4 * self.dim * (self.nx + 1) * (self.ny + 1);
        if connection.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: connection.len() });
        }
        self.connection = Some(connection);
        Ok(())
    }

    pub fn clear_connection(&mut self) {
        self.connection = None;
    }

    /// Keeps nodes with `ix <= nx`, `iy <= ny`.
    pub fn truncated(&self, nx: usize, ny: usize) -> FieldGrid {
        let mut out = FieldGrid::new(self.kind, self.meta(), nx, ny);
        for iy in 0..=ny {
            for ix in 0..=nx {
                out.node_mut(ix, iy).copy_from_slice(self.node(ix, iy));
            }
        }
        if self.connection.is_some() {
            let mut c = Vec::with_capacity(4 * self.dim * (nx + 1) * (ny + 1));
            for iy in 0..=ny {
                for ix in 0..=nx {
                    c.extend_from_slice(self.connection_at(ix, iy).unwrap());
                }
            }
            out.connection = Some(c);
        }
        out
    }

    pub fn x(&self, ix: usize) -> f64 {
        ix as f64 * self.h
    }

    pub fn y(&self, iy: usize) -> f64 {
        iy as f64 * self.h
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        let (kind, d) = match self.kind {
            GridKind::Loop { d } => (0u8, d as u32),
            GridKind::Cartan => (1u8, 0),
        };
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&[kind, u8::from(self.connection.is_some()), self.series.letter() as u8])?;
        for v in [self.rank as u32, d, self.k as u32, self.nx as u32, self.ny as u32] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&self.h.to_le_bytes())?;
        w.write_all(&(self.real_form as u32).to_le_bytes())?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        let mut buf = Vec::with_capacity(16 * self.data.len());
        for c in self.data.iter().chain(self.connection.iter().flatten()) {
            buf.extend_from_slice(&c.re.to_le_bytes());
            buf.extend_from_slice(&c.im.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = read_u32(r)?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let mut flags = [0u8; 3];
        r.read_exact(&mut flags)?;
        let series = Series::from_letter(flags[2] as char).map_err(|e| Error::Format(e.to_string()))?;
        let rank = read_u32(r)? as usize;
        let d = read_u32(r)? as usize;
        let k = read_u32(r)? as usize;
        let nx = read_u32(r)? as usize;
        let ny = read_u32(r)? as usize;
        let mut hb = [0u8; 8];
        r.read_exact(&mut hb)?;
        let h = f64::from_le_bytes(hb);
        let real_form = read_u32(r)? as usize;
        let dim = read_u32(r)? as usize;
        let kind = match flags[0] {
            0 => GridKind::Loop { d },
            1 => GridKind::Cartan,
            other => return Err(Error::Format(format!("unknown grid kind {other}"))),
        };
        let meta = GridMeta { series, rank, k, dim, h, real_form };
        let mut grid = FieldGrid::new(kind, meta, nx, ny);
        read_complex(r, &mut grid.data)?;
        if flags[1] == 1 {
            let mut c = vec![Complex64::new(0.0, 0.0); 4 * dim * (nx + 1) * (ny + 1)];
            read_complex(r, &mut c)?;
            grid.connection = Some(c);
        }
        let mut rest = Vec::new();
        r.read_to_end(&mut rest)?;
        if !rest.is_empty() {
            return Err(Error::Format(format!("{} trailing bytes", rest.len())));
        }
        Ok(grid)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut f)?;
        f.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_from(&mut f)
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_complex<R: Read>(r: &mut R, out: &mut [Complex64]) -> Result<()> {
    let mut buf = vec![0u8; 16 * out.len()];
    r.read_exact(&mut buf).map_err(|e| Error::Format(format!("truncated data: {e}")))?;
    for (c, chunk) in out.iter_mut().zip(buf.chunks_exact(16)) {
        c.re = f64::from_le_bytes(chunk[..8].try_into().unwrap());
        c.im = f64::from_le_bytes(chunk[8..].try_into().unwrap());
    }
    Ok(())
}
