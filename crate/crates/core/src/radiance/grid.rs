use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::Vec3;

use super::sh::sh_coeff_count;

const MAGIC: &[u8; 4] = b"SHVG";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 12 + 12 + 4 + 4 + 8;

/// One stored voxel. Coefficients are channel-major: all of red's basis
/// weights, then green's, then blue's.
#[derive(Debug, Clone, PartialEq)]
pub struct ShRecord {
    pub index: u64,
    pub density: f64,
    pub coeffs: Vec<f64>,
}

/// Sparse voxel grid with spherical-harmonic color per voxel.
///
/// Linear voxel index is `ix + nx * (iy + ny * iz)`.
#[derive(Debug, Clone)]
pub struct ShVoxelGrid {
    dims: [u32; 3],
    origin: Vec3,
    voxel_size: f64,
    sh_degree: u8,
    records: Vec<ShRecord>,
    lookup: HashMap<u64, usize>,
}

impl ShVoxelGrid {
    pub fn new(
        dims: [u32; 3],
        origin: Vec3,
        voxel_size: f64,
        sh_degree: u8,
        records: Vec<ShRecord>,
    ) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::validation("grid dimensions must be positive"));
        }
        if !(voxel_size > 0.0) || !voxel_size.is_finite() {
            return Err(Error::validation("voxel size must be positive"));
        }
        if sh_degree > 2 {
            return Err(Error::validation(format!(
                "sh degree {sh_degree} not supported (max 2)"
            )));
        }
        let total = dims.iter().map(|&d| d as u64).product::<u64>();
        let ncoeff = 3 * sh_coeff_count(sh_degree);
        let mut lookup = HashMap::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if r.index >= total {
                return Err(Error::validation(format!(
                    "record {i}: voxel index {} outside grid of {total} cells",
                    r.index
                )));
            }
            if r.coeffs.len() != ncoeff {
                return Err(Error::validation(format!(
                    "record {i}: {} coefficients, expected {ncoeff}",
                    r.coeffs.len()
                )));
            }
            if !(r.density >= 0.0) {
                return Err(Error::validation(format!(
                    "record {i}: density {} must be non-negative",
                    r.density
                )));
            }
            if lookup.insert(r.index, i).is_some() {
                return Err(Error::validation(format!(
                    "record {i}: duplicate voxel index {}",
                    r.index
                )));
            }
        }
        Ok(Self {
            dims,
            origin,
            voxel_size,
            sh_degree,
            records,
            lookup,
        })
    }

    pub fn dims(&self) -> [u32; 3] {
        self.dims
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn voxel_size(&self) -> f64 {
        self.voxel_size
    }

    pub fn sh_degree(&self) -> u8 {
        self.sh_degree
    }

    pub fn records(&self) -> &[ShRecord] {
        &self.records
    }

    /// Axis-aligned bounds (min corner, max corner).
    pub fn bounds(&self) -> (Vec3, Vec3) {
        let ext = Vec3::new(
            self.dims[0] as f64,
            self.dims[1] as f64,
            self.dims[2] as f64,
        ) * self.voxel_size;
        (self.origin, self.origin + ext)
    }

    pub fn linear_index(&self, cell: [u32; 3]) -> u64 {
        let [nx, ny, _] = self.dims.map(|d| d as u64);
        cell[0] as u64 + nx * (cell[1] as u64 + ny * cell[2] as u64)
    }

    pub fn cell_of_index(&self, index: u64) -> [u32; 3] {
        let [nx, ny, _] = self.dims.map(|d| d as u64);
        [
            (index % nx) as u32,
            ((index / nx) % ny) as u32,
            (index / (nx * ny)) as u32,
        ]
    }

    /// Cell containing `p`, or `None` outside the grid.
    pub fn cell_at(&self, p: &Vec3) -> Option<[u32; 3]> {
        let rel = (p - self.origin) / self.voxel_size;
        let mut cell = [0u32; 3];
        for a in 0..3 {
            let f = rel[a].floor();
            if !(f >= 0.0 && f < self.dims[a] as f64) {
                return None;
            }
            cell[a] = f as u32;
        }
        Some(cell)
    }

    pub fn voxel_center(&self, index: u64) -> Vec3 {
        let c = self.cell_of_index(index);
        self.origin
            + Vec3::new(c[0] as f64 + 0.5, c[1] as f64 + 0.5, c[2] as f64 + 0.5) * self.voxel_size
    }

    /// Position of the record for a linear voxel index.
    pub fn record_slot(&self, index: u64) -> Option<usize> {
        self.lookup.get(&index).copied()
    }

    pub fn encode(&self) -> Vec<u8> {
        let ncoeff = 3 * sh_coeff_count(self.sh_degree);
        let mut out = Vec::with_capacity(HEADER_LEN + self.records.len() * (12 + 4 * ncoeff));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        for d in self.dims {
            out.extend_from_slice(&d.to_le_bytes());
        }
        for v in self.origin.iter() {
            out.extend_from_slice(&(*v as f32).to_le_bytes());
        }
        out.extend_from_slice(&(self.voxel_size as f32).to_le_bytes());
        out.extend_from_slice(&(self.sh_degree as u32).to_le_bytes());
        out.extend_from_slice(&(self.records.len() as u64).to_le_bytes());
        for r in &self.records {
            out.extend_from_slice(&r.index.to_le_bytes());
            out.extend_from_slice(&(r.density as f32).to_le_bytes());
            for c in &r.coeffs {
                out.extend_from_slice(&(*c as f32).to_le_bytes());
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut cur = Cursor { bytes, pos: 0 };
        if cur.take(4)? != MAGIC {
            return Err(Error::format_at(0, "missing SHVG magic"));
        }
        let version = cur.u32()?;
        if version != VERSION {
            return Err(Error::format_at(
                4,
                format!("unsupported SHVG version {version}"),
            ));
        }
        let dims = [cur.u32()?, cur.u32()?, cur.u32()?];
        let origin = Vec3::new(cur.f32()?, cur.f32()?, cur.f32()?);
        let voxel_size = cur.f32()?;
        let degree = cur.u32()?;
        if degree > 2 {
            return Err(Error::format_at(
                36,
                format!("unsupported sh degree {degree}"),
            ));
        }
        let count = cur.u64()?;
        let ncoeff = 3 * sh_coeff_count(degree as u8);
        let rec_len = 12 + 4 * ncoeff as u64;
        let remaining = (bytes.len() - cur.pos) as u64;
        if count.checked_mul(rec_len) != Some(remaining) {
            return Err(Error::format_at(
                cur.pos as u64,
                format!("{count} records of {rec_len} bytes do not match {remaining} body bytes"),
            ));
        }
        let mut records = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let index = cur.u64()?;
            let density = cur.f32()?;
            let coeffs = (0..ncoeff).map(|_| cur.f32()).collect::<Result<Vec<_>>>()?;
            records.push(ShRecord {
                index,
                density,
                coeffs,
            });
        }
        Self::new(dims, origin, voxel_size, degree as u8, records)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::decode(&crate::io::read_bytes(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        crate::io::write_bytes(path, &self.encode())
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let s = self
            .bytes
            .get(self.pos..self.pos + n)
            .ok_or_else(|| Error::format_at(self.pos as u64, "SHVG file truncated"))?;
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f32(&mut self) -> Result<f64> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()) as f64)
    }
}
