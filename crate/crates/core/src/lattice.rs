//! Beam-splitter-array evolution.
//!
//! A row of `L` unbiased beam splitters couples `2L` modes. Odd time steps
//! pair modes `(1,2), (3,4), …`; even steps pair `(2,3), (4,5), …, (2L,1)`,
//! the last coupler wrapping around so the lattice is periodic.
//!
//! Matrices act on amplitude *row* vectors: entry `(k, q)` of [`evolution`]
//! is the amplitude for a particle entering mode `k+1` to leave in mode
//! `q+1`, and the first step applied is always the odd step.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Result, WalkError};

/// Tolerance accepted by [`UnitaryMatrix::new`].
pub const UNITARITY_TOL: f64 = 1e-10;

/// Dense square complex matrix that is unitary up to rounding.
///
/// Rows index input modes, columns index output modes (0-based storage).
#[derive(Clone, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl UnitaryMatrix {
    /// Builds a matrix from row-major entries, checking unitarity.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(WalkError::RaggedMatrix {
                row: 0,
                expected: dim,
                found: entries.len() / dim.max(1),
            });
        }
        let m = Self { dim, entries };
        let deviation = m.unitarity_deviation();
        if deviation > UNITARITY_TOL {
            return Err(WalkError::NotUnitary { deviation });
        }
        Ok(m)
    }

    /// Builds a matrix from nested rows, checking shape and unitarity.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        for (row, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(WalkError::RaggedMatrix { row, expected: dim, found: r.len() });
            }
        }
        Self::new(dim, rows.concat())
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for k in 0..dim {
            entries[k * dim + k] = Complex64::new(1.0, 0.0);
        }
        Self { dim, entries }
    }

    /// Number of modes.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// 0-based entry access.
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// Transition amplitude from input mode `from` to output mode `to` (1-based labels).
    #[inline]
    pub fn amplitude(&self, from: usize, to: usize) -> Complex64 {
        self.get(from - 1, to - 1)
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.entries[row * self.dim..(row + 1) * self.dim]
    }

    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                entries.push(self.get(c, r).conj());
            }
        }
        Self { dim: n, entries }
    }

    /// Max-norm of `W^dagger W - I`.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.get(k, a).conj() * self.get(k, b);
                }
                if a == b {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let out = &mut entries[r * n..(r + 1) * n];
                for (o, b) in out.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Self { dim: n, entries }
    }
}

impl Mul for &UnitaryMatrix {
    type Output = UnitaryMatrix;

    fn mul(self, rhs: &UnitaryMatrix) -> UnitaryMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for UnitaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "UnitaryMatrix({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for z in self.row(r) {
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Lattice size and number of time steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeConfig {
    /// Beam splitters per row; the lattice has `2 * half_modes` modes.
    pub half_modes: usize,
    pub steps: usize,
}

impl LatticeConfig {
    pub fn new(half_modes: usize, steps: usize) -> Result<Self> {
        if half_modes == 0 {
            return Err(WalkError::EmptyLattice(half_modes));
        }
        Ok(Self { half_modes, steps })
    }

    pub fn modes(&self) -> usize {
        2 * self.half_modes
    }
}

/// The unbiased beam splitter `(1/sqrt 2) [[1, i], [i, 1]]`.
pub fn single_beam_splitter() -> UnitaryMatrix {
    let t = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let r = Complex64::new(0.0, FRAC_1_SQRT_2);
    UnitaryMatrix { dim: 2, entries: vec![t, r, r, t] }
}

/// Direct sum of `L` beam splitters coupling `(1,2), (3,4), …, (2L-1, 2L)`.
pub fn odd_step(half_modes: usize) -> Result<UnitaryMatrix> {
    if half_modes == 0 {
        return Err(WalkError::EmptyLattice(half_modes));
    }
    let n = 2 * half_modes;
    let bs = single_beam_splitter();
    let mut m = UnitaryMatrix { dim: n, entries: vec![Complex64::new(0.0, 0.0); n * n] };
    for block in 0..half_modes {
        let o = 2 * block;
        for a in 0..2 {
            for b in 0..2 {
                m.entries[(o + a) * n + o + b] = bs.get(a, b);
            }
        }
    }
    Ok(m)
}

/// Cyclic shift with `S+[i][j] = 1` iff `i - j - 1 ≡ 0 (mod dim)` (`up = true`),
/// or `S-[i][j] = 1` iff `i - j + 1 ≡ 0` (`up = false`).
fn cyclic_shift(dim: usize, up: bool) -> UnitaryMatrix {
    let mut m = UnitaryMatrix { dim, entries: vec![Complex64::new(0.0, 0.0); dim * dim] };
    for j in 0..dim {
        let i = if up { (j + 1) % dim } else { (j + dim - 1) % dim };
        m.entries[i * dim + j] = Complex64::new(1.0, 0.0);
    }
    m
}

/// Even step `S- V1 S+`, coupling `(2,3), (4,5), …, (2L, 1)`.
pub fn even_step(half_modes: usize) -> Result<UnitaryMatrix> {
    let v1 = odd_step(half_modes)?;
    let n = v1.dim;
    let down = cyclic_shift(n, false);
    let up = cyclic_shift(n, true);
    Ok(&(&down * &v1) * &up)
}

/// Evolution matrix after `cfg.steps` steps: `(V1 V2)^(n/2)` for even `n`,
/// `(V1 V2)^((n-1)/2) V1` for odd `n`, by repeated multiplication.
pub fn evolution(cfg: LatticeConfig) -> Result<UnitaryMatrix> {
    let v1 = odd_step(cfg.half_modes)?;
    let v2 = even_step(cfg.half_modes)?;
    let mut w = UnitaryMatrix::identity(cfg.modes());
    for step in 0..cfg.steps {
        w = if step % 2 == 0 { &w * &v1 } else { &w * &v2 };
    }
    Ok(w)
}
