use std::io::{self, Read, Write};

use super::GridError;
use crate::report::fmt_f64;

const MAGIC: &[u8; 4] = b"PLF2";

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self, GridError> {
        if !(x1 > x0 && y1 > y0) || [x0, y0, x1, y1].iter().any(|v| !v.is_finite()) {
            return Err(GridError::Domain(format!(
                "rectangle [{x0}, {x1}] x [{y0}, {y1}] is empty or not finite"
            )));
        }
        Ok(Self { x0, y0, x1, y1 })
    }

    pub fn unit_square() -> Self {
        Self {
            x0: 0.0,
            y0: 0.0,
            x1: 1.0,
            y1: 1.0,
        }
    }

    /// Node counts `(nx, ny)` for spacing `h`; the sides must be whole multiples of `h`.
    pub fn nodes(&self, h: f64) -> Result<(usize, usize), GridError> {
        let count = |len: f64| -> Result<usize, GridError> {
            let cells = len / h;
            let rounded = cells.round();
            if !(h > 0.0) || (cells - rounded).abs() > 1e-9 * cells.max(1.0) || rounded < 2.0 {
                return Err(GridError::Domain(format!(
                    "side {len} is not a multiple (>= 2) of h = {h}"
                )));
            }
            Ok(rounded as usize + 1)
        };
        Ok((count(self.x1 - self.x0)?, count(self.y1 - self.y0)?))
    }
}

/// Grid function on nodes `(x0 + i h, y0 + j h)`, stored row-major (`j * nx + i`).
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub x0: f64,
    pub y0: f64,
    pub values: Vec<f64>,
}

impl Field2D {
    pub fn new(nx: usize, ny: usize, h: f64, x0: f64, y0: f64, values: Vec<f64>) -> Result<Self, GridError> {
        if nx < 3 || ny < 3 || !(h > 0.0) || values.len() != nx * ny {
            return Err(GridError::Domain(format!(
                "field needs nx, ny >= 3, h > 0 and nx*ny values; got {nx} x {ny}, h = {h}, {} values",
                values.len()
            )));
        }
        Ok(Self {
            nx,
            ny,
            h,
            x0,
            y0,
            values,
        })
    }

    pub fn zeros_like(other: &Field2D) -> Self {
        Self {
            values: vec![0.0; other.values.len()],
            ..other.clone()
        }
    }

    /// Samples `f(x, y)` on the nodes of `rect` with spacing `h`.
    pub fn sample(rect: &Rect, h: f64, f: impl Fn(f64, f64) -> f64) -> Result<Self, GridError> {
        let (nx, ny) = rect.nodes(h)?;
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(f(rect.x0 + i as f64 * h, rect.y0 + j as f64 * h));
            }
        }
        Self::new(nx, ny, h, rect.x0, rect.y0, values)
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.h
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.h
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }

    pub fn is_positive(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
            ..self.clone()
        }
    }

    /// Largest `|self - f|` over all nodes.
    pub fn sup_distance(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.ny {
            for i in 0..self.nx {
                worst = worst.max((self.at(i, j) - f(self.x(i), self.y(j))).abs());
            }
        }
        worst
    }

    fn same_grid(&self, other: &Field2D) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.h == other.h && self.x0 == other.x0 && self.y0 == other.y0
    }

    pub(crate) fn check_same_grid(&self, other: &Field2D) -> Result<(), GridError> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(GridError::Domain("fields live on different grids".into()))
        }
    }

    /// CSV `x,y,v`, one row per node in storage order.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut buf = String::with_capacity(self.values.len() * 72);
        buf.push_str("x,y,v\n");
        for j in 0..self.ny {
            for i in 0..self.nx {
                buf.push_str(&fmt_f64(self.x(i)));
                buf.push(',');
                buf.push_str(&fmt_f64(self.y(j)));
                buf.push(',');
                buf.push_str(&fmt_f64(self.at(i, j)));
                buf.push('\n');
            }
        }
        out.write_all(buf.as_bytes())
    }

    /// `PLF2` magic, `u64` nx, ny, `f64` h, x0, y0, then the values; all little-endian.
    pub fn write_binary<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut buf = Vec::with_capacity(44 + 8 * self.values.len());
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&(self.nx as u64).to_le_bytes());
        buf.extend_from_slice(&(self.ny as u64).to_le_bytes());
        for v in [self.h, self.x0, self.y0] {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&buf)
    }

    pub fn read_binary<R: Read>(mut input: R) -> io::Result<Self> {
        let bad = |msg: &str| io::Error::new(io::ErrorKind::InvalidData, msg.to_string());
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(bad("missing PLF2 magic"));
        }
        let mut word = [0u8; 8];
        let mut next = |input: &mut R| -> io::Result<[u8; 8]> {
            input.read_exact(&mut word)?;
            Ok(word)
        };
        let nx = u64::from_le_bytes(next(&mut input)?) as usize;
        let ny = u64::from_le_bytes(next(&mut input)?) as usize;
        let h = f64::from_le_bytes(next(&mut input)?);
        let x0 = f64::from_le_bytes(next(&mut input)?);
        let y0 = f64::from_le_bytes(next(&mut input)?);
        let count = nx
            .checked_mul(ny)
            .filter(|&c| c <= 1 << 32)
            .ok_or_else(|| bad("grid size overflows"))?;
        let mut raw = vec![0u8; count * 8];
        input.read_exact(&mut raw)?;
        let values = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        Field2D::new(nx, ny, h, x0, y0, values).map_err(|e| bad(&e.to_string()))
    }
}

/// A grid function defined only where `mask` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedField {
    pub field: Field2D,
    pub mask: Vec<bool>,
}

impl MaskedField {
    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Largest `|value|` over valid nodes; 0 when nothing is valid.
    pub fn sup_norm(&self) -> f64 {
        self.field
            .values
            .iter()
            .zip(&self.mask)
            .filter(|(_, &m)| m)
            .map(|(v, _)| v.abs())
            .fold(0.0, f64::max)
    }

    /// `(min, max)` over valid nodes, `None` when nothing is valid.
    pub fn range(&self) -> Option<(f64, f64)> {
        let mut it = self.field.values.iter().zip(&self.mask).filter(|(_, &m)| m).map(|(v, _)| *v);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v))))
    }
}
