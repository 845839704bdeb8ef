//! Exact linear algebra over `F_p`: dense matrices, subspaces, bounded
//! cochain complexes, double complexes and the column-filtration spectral
//! sequence.

use std::fmt;

use crate::error::{Error, Result};
use crate::gfp::PrimeField;

/// Dense row-major matrix over a prime field.
#[derive(Clone, PartialEq, Eq)]
pub struct FpMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FpMatrix {}x{} over F_{}", self.rows, self.cols, self.field.p())?;
        for r in 0..self.rows.min(16) {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        Ok(())
    }
}

/// Result of Gaussian elimination.
#[derive(Debug, Clone)]
pub struct RankKernelImage {
    pub rank: usize,
    /// Basis of the null space, one vector per free column.
    pub kernel: Vec<Vec<u32>>,
    /// Pivot columns of the original matrix.
    pub image: Vec<Vec<u32>>,
    pub pivots: Vec<usize>,
}

impl FpMatrix {
    pub fn new(field: PrimeField, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let p = field.p();
        Ok(FpMatrix {
            field,
            rows,
            cols,
            data: data.into_iter().map(|x| x % p).collect(),
        })
    }

    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        FpMatrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: PrimeField, rows: &[Vec<u32>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let data = rows.iter().flatten().map(|&x| x % field.p()).collect();
        FpMatrix {
            field,
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_cols(field: PrimeField, rows: usize, cols: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(field, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, &x) in c.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.field.p();
    }

    #[inline]
    pub fn add_to(&mut self, r: usize, c: usize, v: u32) {
        let idx = r * self.cols + c;
        self.data[idx] = self.field.add(self.data[idx], v % self.field.p());
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn map(&self, f: impl Fn(u32) -> u32) -> Self {
        let p = self.field.p();
        FpMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x) % p).collect(),
        }
    }

    pub fn scale(&self, s: u32) -> Self {
        let f = self.field;
        self.map(|x| f.mul(x, s % f.p()))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    pub fn add(&self, other: &FpMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        FpMatrix { data, ..self.clone() }
    }

    pub fn sub(&self, other: &FpMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        FpMatrix { data, ..self.clone() }
    }

    pub fn mul(&self, other: &FpMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let f = self.field;
        let p = f.p() as u64;
        let mut out = Self::zeros(f, self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        for r in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.get(r, k) as u64;
                if a == 0 {
                    continue;
                }
                for (c, &b) in other.row(k).iter().enumerate() {
                    acc[c] += a * b as u64;
                }
            }
            for (c, a) in acc.iter().enumerate() {
                out.data[r * other.cols + c] = (a % p) as u32;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let p = self.field.p() as u64;
        (0..self.rows)
            .map(|r| {
                let s: u64 = self.row(r).iter().zip(v).map(|(&a, &b)| a as u64 * b as u64).sum();
                (s % p) as u32
            })
            .collect()
    }

    /// Copy `block` into this matrix with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &FpMatrix) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.data[(r0 + r) * self.cols + c0 + c] = block.get(r, c);
            }
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut m = Self::zeros(self.field, rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                m.data[i * cols.len() + j] = self.get(r, c);
            }
        }
        m
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    /// Pivot choice: scan columns left to right, take the first row at or
    /// below the current rank with a nonzero entry.
    fn rref_in_place(&mut self, full: bool) -> Vec<usize> {
        let f = self.field;
        let p = f.p();
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut rank = 0;
        let mut nz = Vec::with_capacity(cols);
        for c in 0..cols {
            if rank == self.rows {
                break;
            }
            let Some(pr) = (rank..self.rows).find(|&r| self.data[r * cols + c] != 0) else {
                continue;
            };
            if pr != rank {
                for k in c..cols {
                    self.data.swap(pr * cols + k, rank * cols + k);
                }
            }
            let inv = f.inv(self.data[rank * cols + c]);
            nz.clear();
            for k in c..cols {
                let v = &mut self.data[rank * cols + k];
                if *v != 0 {
                    *v = f.mul(*v, inv);
                    nz.push(k);
                }
            }
            let start = if full { 0 } else { rank + 1 };
            for r in start..self.rows {
                if r == rank {
                    continue;
                }
                let factor = self.data[r * cols + c];
                if factor == 0 {
                    continue;
                }
                let neg = p - factor;
                for &k in &nz {
                    let pv = self.data[rank * cols + k];
                    let v = &mut self.data[r * cols + k];
                    *v = (*v + neg * pv) % p;
                }
            }
            pivots.push(c);
            rank += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        // eliminate along the shorter side
        if self.rows > self.cols {
            self.transpose().rank()
        } else {
            self.clone().rref_in_place(false).len()
        }
    }

    pub fn rank_kernel_image(&self) -> RankKernelImage {
        let f = self.field;
        let mut r = self.clone();
        let pivots = r.rref_in_place(true);
        let mut is_pivot = vec![None; self.cols];
        for (i, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(i);
        }
        let kernel = (0..self.cols)
            .filter(|&c| is_pivot[c].is_none())
            .map(|free| {
                let mut v = vec![0u32; self.cols];
                v[free] = 1;
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(r.get(i, free));
                }
                v
            })
            .collect();
        let image = pivots.iter().map(|&c| self.col(c)).collect();
        RankKernelImage {
            rank: pivots.len(),
            kernel,
            image,
            pivots,
        }
    }

    pub fn kernel(&self) -> Vec<Vec<u32>> {
        self.rank_kernel_image().kernel
    }

    /// One solution of `self · x = b`, free variables set to zero.
    pub fn solve(&self, b: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let mut aug = FpMatrix::zeros(self.field, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, b[r]);
        }
        let pivots = aug.rref_in_place(true);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0; self.cols];
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(i, self.cols);
        }
        Some(x)
    }
}

/// A linear subspace of `F_p^n`, stored as a reduced echelon basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    field: PrimeField,
    ambient: usize,
    basis: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: PrimeField, ambient: usize) -> Self {
        Subspace {
            field,
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: PrimeField, ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vec![0; ambient];
                v[i] = 1;
                v
            })
            .collect();
        Subspace {
            field,
            ambient,
            basis,
            pivots: (0..ambient).collect(),
        }
    }

    /// Span of coordinate vectors `e_i` for `i` in `coords`.
    pub fn coordinate(field: PrimeField, ambient: usize, coords: impl IntoIterator<Item = usize>) -> Self {
        let vecs = coords
            .into_iter()
            .map(|i| {
                let mut v = vec![0; ambient];
                v[i] = 1;
                v
            })
            .collect();
        Self::from_basis(field, ambient, vecs)
    }

    pub fn from_basis(field: PrimeField, ambient: usize, vectors: Vec<Vec<u32>>) -> Self {
        if vectors.is_empty() {
            return Self::zero(field, ambient);
        }
        let mut m = FpMatrix::from_rows(field, &vectors);
        assert_eq!(m.cols, ambient);
        let pivots = m.rref_in_place(true);
        let basis = (0..pivots.len()).map(|r| m.row(r).to_vec()).collect();
        Subspace {
            field,
            ambient,
            basis,
            pivots,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    /// Reduce `v` against the echelon basis; the result is zero iff `v` lies
    /// in the subspace.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let f = self.field;
        let mut w = v.to_vec();
        for (b, &pc) in self.basis.iter().zip(&self.pivots) {
            let c = w[pc];
            if c != 0 {
                for (x, &y) in w.iter_mut().zip(b) {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Self::from_basis(self.field, self.ambient, vs)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        if self.dim() == 0 || other.dim() == 0 {
            return Self::zero(self.field, self.ambient);
        }
        // columns [A | B]; kernel vectors (a, b) give A a = -B b
        let mut cols = self.basis.clone();
        cols.extend(other.basis.iter().cloned());
        let m = FpMatrix::from_cols(self.field, self.ambient, &cols);
        let f = self.field;
        let vecs = m
            .kernel()
            .into_iter()
            .map(|k| {
                let mut v = vec![0u32; self.ambient];
                for (coef, b) in k[..self.dim()].iter().zip(&self.basis) {
                    for (x, &y) in v.iter_mut().zip(b) {
                        *x = f.add(*x, f.mul(*coef, y));
                    }
                }
                v
            })
            .collect();
        Self::from_basis(self.field, self.ambient, vecs)
    }

    /// Image of this subspace under `m`.
    pub fn image_under(&self, m: &FpMatrix) -> Subspace {
        assert_eq!(m.cols(), self.ambient);
        let vs = self.basis.iter().map(|v| m.mul_vec(v)).collect();
        Self::from_basis(self.field, m.rows(), vs)
    }

    /// Vectors of `candidates` that extend a basis of `self` to a basis of
    /// `self + span(candidates)`, greedily in order.
    pub fn complement_in(&self, candidates: &[Vec<u32>]) -> Vec<Vec<u32>> {
        let mut acc = self.clone();
        let mut out = Vec::new();
        for c in candidates {
            if !acc.contains(c) {
                out.push(c.clone());
                acc = acc.sum(&Subspace::from_basis(self.field, self.ambient, vec![c.clone()]));
            }
        }
        out
    }
}

/// Cohomology of a complex at one degree.
#[derive(Debug, Clone)]
pub struct Cohomology {
    pub dim: usize,
    /// Kernel vectors independent modulo the image of the incoming map.
    pub representatives: Vec<Vec<u32>>,
}

/// Bounded cochain complex `C^lo → … → C^hi`.
///
/// `differential(m)` maps `C^m → C^{m+1}` and has `dim C^{m+1}` rows.
#[derive(Debug, Clone)]
pub struct CochainComplex {
    field: PrimeField,
    start: i64,
    dims: Vec<usize>,
    diffs: Vec<FpMatrix>,
}

impl CochainComplex {
    pub fn new(field: PrimeField, start: i64, dims: Vec<usize>, diffs: Vec<FpMatrix>) -> Result<Self> {
        if dims.is_empty() || diffs.len() + 1 != dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} spaces need {} differentials, got {}",
                dims.len(),
                dims.len().saturating_sub(1),
                diffs.len()
            )));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.cols() != dims[k] || d.rows() != dims[k + 1] {
                return Err(Error::DimensionMismatch(format!(
                    "differential {} is {}x{}, expected {}x{}",
                    start + k as i64,
                    d.rows(),
                    d.cols(),
                    dims[k + 1],
                    dims[k]
                )));
            }
        }
        for k in 1..diffs.len() {
            if !diffs[k].mul(&diffs[k - 1]).is_zero() {
                return Err(Error::InvalidStructure(format!(
                    "d∘d ≠ 0 at degree {}",
                    start + k as i64 - 1
                )));
            }
        }
        Ok(CochainComplex {
            field,
            start,
            dims,
            diffs,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.start + self.dims.len() as i64 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.start..=self.end()
    }

    pub fn dim(&self, m: i64) -> usize {
        if self.degrees().contains(&m) {
            self.dims[(m - self.start) as usize]
        } else {
            0
        }
    }

    /// `d^m : C^m → C^{m+1}`, if both ends lie in the complex.
    pub fn differential(&self, m: i64) -> Option<&FpMatrix> {
        if m < self.start {
            return None;
        }
        self.diffs.get((m - self.start) as usize)
    }

    pub fn differentials(&self) -> &[FpMatrix] {
        &self.diffs
    }

    pub fn cohomology(&self, m: i64) -> Result<Cohomology> {
        if !self.degrees().contains(&m) {
            return Err(Error::DegreeOutOfRange(m));
        }
        let n = self.dim(m);
        let kernel = match self.differential(m) {
            Some(d) => d.kernel(),
            None => Subspace::full(self.field, n).basis().to_vec(),
        };
        let image = match self.differential(m - 1) {
            Some(d) => Subspace::from_basis(self.field, n, d.rank_kernel_image().image),
            None => Subspace::zero(self.field, n),
        };
        let representatives = image.complement_in(&kernel);
        Ok(Cohomology {
            dim: representatives.len(),
            representatives,
        })
    }

    /// Dimensions `dim H^m` for every degree, via ranks only.
    pub fn cohomology_dims(&self) -> Vec<usize> {
        let ranks: Vec<usize> = self.diffs.iter().map(|d| d.rank()).collect();
        (0..self.dims.len())
            .map(|k| {
                let out = ranks.get(k).copied().unwrap_or(0);
                let inc = if k > 0 { ranks[k - 1] } else { 0 };
                self.dims[k] - out - inc
            })
            .collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(k, &d)| if (self.start + k as i64) % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }
}

/// Bounded first-quadrant double complex `C^{i,j}`, `0 ≤ i ≤ imax`,
/// `0 ≤ j ≤ jmax`, with anticommuting differentials.
///
/// The total differential is `d_h + d_v` on the stored (already signed)
/// maps. [`DoubleComplex::from_commuting`] applies the sign `(-1)^i` to the
/// vertical maps of commuting input.
#[derive(Debug, Clone)]
pub struct DoubleComplex {
    field: PrimeField,
    dims: Vec<Vec<usize>>,
    dh: Vec<Vec<FpMatrix>>,
    dv: Vec<Vec<FpMatrix>>,
}

impl DoubleComplex {
    /// `dh[i][j] : C^{i,j} → C^{i+1,j}` for `i < imax`, `dv[i][j] : C^{i,j} →
    /// C^{i,j+1}` for `j < jmax`. The maps must already anticommute.
    pub fn new(
        field: PrimeField,
        dims: Vec<Vec<usize>>,
        dh: Vec<Vec<FpMatrix>>,
        dv: Vec<Vec<FpMatrix>>,
    ) -> Result<Self> {
        let dc = DoubleComplex { field, dims, dh, dv };
        dc.validate()?;
        Ok(dc)
    }

    /// Build from commuting `d_h`, `d_v`, using the total differential
    /// `d = d_h + (-1)^i d_v` on column `i`.
    pub fn from_commuting(
        field: PrimeField,
        dims: Vec<Vec<usize>>,
        dh: Vec<Vec<FpMatrix>>,
        dv: Vec<Vec<FpMatrix>>,
    ) -> Result<Self> {
        let p = field.p();
        let dv = dv
            .into_iter()
            .enumerate()
            .map(|(i, col)| {
                if i % 2 == 0 {
                    col
                } else {
                    col.into_iter().map(|m| m.scale(p - 1)).collect()
                }
            })
            .collect();
        Self::new(field, dims, dh, dv)
    }

    fn validate(&self) -> Result<()> {
        let ni = self.dims.len();
        if ni == 0 {
            return Err(Error::InvalidStructure("empty double complex".into()));
        }
        let nj = self.dims[0].len();
        if nj == 0 || self.dims.iter().any(|c| c.len() != nj) {
            return Err(Error::InvalidStructure("double complex must be a rectangular grid".into()));
        }
        if self.dh.len() + 1 != ni || self.dh.iter().any(|c| c.len() != nj) {
            return Err(Error::DimensionMismatch("horizontal differential grid".into()));
        }
        if self.dv.len() != ni || self.dv.iter().any(|c| c.len() + 1 != nj) {
            return Err(Error::DimensionMismatch("vertical differential grid".into()));
        }
        for i in 0..ni {
            for j in 0..nj {
                if i + 1 < ni {
                    let m = &self.dh[i][j];
                    if m.cols() != self.dims[i][j] || m.rows() != self.dims[i + 1][j] {
                        return Err(Error::DimensionMismatch(format!("d_h at ({i},{j})")));
                    }
                }
                if j + 1 < nj {
                    let m = &self.dv[i][j];
                    if m.cols() != self.dims[i][j] || m.rows() != self.dims[i][j + 1] {
                        return Err(Error::DimensionMismatch(format!("d_v at ({i},{j})")));
                    }
                }
            }
        }
        for i in 0..ni {
            for j in 0..nj {
                if i + 2 < ni && !self.dh[i + 1][j].mul(&self.dh[i][j]).is_zero() {
                    return Err(Error::InvalidStructure(format!("d_h² ≠ 0 at ({i},{j})")));
                }
                if j + 2 < nj && !self.dv[i][j + 1].mul(&self.dv[i][j]).is_zero() {
                    return Err(Error::InvalidStructure(format!("d_v² ≠ 0 at ({i},{j})")));
                }
                if i + 1 < ni && j + 1 < nj {
                    let a = self.dh[i][j + 1].mul(&self.dv[i][j]);
                    let b = self.dv[i + 1][j].mul(&self.dh[i][j]);
                    if !a.add(&b).is_zero() {
                        return Err(Error::InvalidStructure(format!(
                            "d_h d_v + d_v d_h ≠ 0 at ({i},{j})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn imax(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn jmax(&self) -> usize {
        self.dims[0].len() - 1
    }

    pub fn dim(&self, i: usize, j: usize) -> usize {
        self.dims.get(i).and_then(|c| c.get(j)).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &[Vec<usize>] {
        &self.dims
    }

    pub fn dh(&self, i: usize, j: usize) -> &FpMatrix {
        &self.dh[i][j]
    }

    pub fn dv(&self, i: usize, j: usize) -> &FpMatrix {
        &self.dv[i][j]
    }

    /// Blocks `(i, offset, dim)` of `Tot^n`, ordered by increasing `i`.
    pub fn tot_layout(&self, n: usize) -> Vec<(usize, usize, usize)> {
        let mut off = 0;
        let mut out = Vec::new();
        for i in 0..=self.imax().min(n) {
            let j = n - i;
            if j > self.jmax() {
                continue;
            }
            let d = self.dims[i][j];
            out.push((i, off, d));
            off += d;
        }
        out
    }

    pub fn tot_dim(&self, n: usize) -> usize {
        self.tot_layout(n).iter().map(|b| b.2).sum()
    }

    pub fn max_total_degree(&self) -> usize {
        self.imax() + self.jmax()
    }

    /// Total differential `Tot^n → Tot^{n+1}`.
    pub fn total_differential(&self, n: usize) -> FpMatrix {
        let src = self.tot_layout(n);
        let dst = self.tot_layout(n + 1);
        let rows: usize = dst.iter().map(|b| b.2).sum();
        let cols: usize = src.iter().map(|b| b.2).sum();
        let mut m = FpMatrix::zeros(self.field, rows, cols);
        for &(i, coff, _) in &src {
            let j = n - i;
            for &(i2, roff, _) in &dst {
                if i2 == i + 1 && i + 1 <= self.imax() {
                    m.set_block(roff, coff, &self.dh[i][j]);
                } else if i2 == i && j < self.jmax() {
                    m.set_block(roff, coff, &self.dv[i][j]);
                }
            }
        }
        m
    }

    pub fn totalize(&self) -> Result<CochainComplex> {
        let top = self.max_total_degree();
        let dims = (0..=top).map(|n| self.tot_dim(n)).collect();
        let diffs = (0..top).map(|n| self.total_differential(n)).collect();
        CochainComplex::new(self.field, 0, dims, diffs)
    }

    /// Pages `E_1 … E_{max_page}` of the spectral sequence of the column
    /// filtration `F^l = ⊕_{i ≥ l} C^{i,*}`, plus `E_∞` as the last entry.
    pub fn spectral_sequence(&self, max_page: usize) -> Vec<SpectralSequencePage> {
        let ctx = FiltrationContext::new(self);
        let mut pages: Vec<SpectralSequencePage> = (1..=max_page.max(1)).map(|r| ctx.page(r)).collect();
        let mut inf = ctx.page(self.max_total_degree() + 2);
        inf.infinite = true;
        pages.push(inf);
        pages
    }
}

/// One page `E_r` of the column-filtration spectral sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralSequencePage {
    pub r: usize,
    pub infinite: bool,
    /// `dims[i][j] = dim E_r^{i,j}`.
    pub dims: Vec<Vec<usize>>,
    /// `d_rank[i][j]` = rank of `d_r : E_r^{i,j} → E_r^{i+r, j-r+1}`.
    pub d_rank: Vec<Vec<usize>>,
}

impl SpectralSequencePage {
    pub fn total_dim(&self, n: usize) -> usize {
        (0..self.dims.len())
            .filter(|&i| i <= n && n - i < self.dims[i].len())
            .map(|i| self.dims[i][n - i])
            .sum()
    }

    /// True if every nonzero entry lies in row `j = 0`.
    pub fn concentrated_in_row_zero(&self) -> bool {
        self.dims.iter().all(|col| col.iter().skip(1).all(|&d| d == 0))
    }

    /// Dimension of the cohomology of `(E_r, d_r)` at `(i, j)`, computed from
    /// the stored ranks.
    pub fn next_dim(&self, i: usize, j: usize) -> usize {
        let out = self.d_rank[i][j];
        let inc = if i >= self.r && j + self.r >= 1 {
            let (si, sj) = (i - self.r, j + self.r - 1);
            self.d_rank.get(si).and_then(|c| c.get(sj)).copied().unwrap_or(0)
        } else {
            0
        };
        self.dims[i][j] - out - inc
    }
}

// Subspace arithmetic inside Tot^n for the explicit subquotient description
// E_r^p = Z_r^p / (Z_{r-1}^{p+1} + d Z_{r-1}^{p-r+1}).
struct FiltrationContext<'a> {
    dc: &'a DoubleComplex,
    layouts: Vec<Vec<(usize, usize, usize)>>,
    diffs: Vec<FpMatrix>,
}

impl<'a> FiltrationContext<'a> {
    fn new(dc: &'a DoubleComplex) -> Self {
        let top = dc.max_total_degree();
        let layouts = (0..=top + 1).map(|n| dc.tot_layout(n)).collect();
        let diffs = (0..=top).map(|n| dc.total_differential(n)).collect();
        FiltrationContext { dc, layouts, diffs }
    }

    fn tot_dim(&self, n: usize) -> usize {
        self.layouts.get(n).map_or(0, |l| l.iter().map(|b| b.2).sum())
    }

    fn coords_from(&self, n: usize, p: i64) -> Vec<usize> {
        self.layouts[n]
            .iter()
            .filter(|b| b.0 as i64 >= p)
            .flat_map(|&(_, off, d)| off..off + d)
            .collect()
    }

    fn coords_below(&self, n: usize, p: i64) -> Vec<usize> {
        self.layouts[n]
            .iter()
            .filter(|b| (b.0 as i64) < p)
            .flat_map(|&(_, off, d)| off..off + d)
            .collect()
    }

    /// `Z_r^p(n) = { x ∈ F^p Tot^n : d x ∈ F^{p+r} Tot^{n+1} }`.
    fn z(&self, n: i64, p: i64, r: i64) -> Subspace {
        let f = self.dc.field();
        if n < 0 {
            return Subspace::zero(f, 0);
        }
        let n = n as usize;
        let dim = self.tot_dim(n);
        let src = self.coords_from(n, p);
        if src.is_empty() {
            return Subspace::zero(f, dim);
        }
        let bad_rows = if n < self.diffs.len() {
            self.coords_below(n + 1, p + r)
        } else {
            Vec::new()
        };
        if bad_rows.is_empty() {
            return Subspace::coordinate(f, dim, src);
        }
        let m = self.diffs[n].submatrix(&bad_rows, &src);
        let vecs = m
            .kernel()
            .into_iter()
            .map(|k| {
                let mut v = vec![0; dim];
                for (&c, &x) in src.iter().zip(&k) {
                    v[c] = x;
                }
                v
            })
            .collect();
        Subspace::from_basis(f, dim, vecs)
    }

    /// `d Z_r^p(n-1)` as a subspace of `Tot^n`.
    fn dz(&self, n: i64, p: i64, r: i64) -> Subspace {
        let f = self.dc.field();
        let dim = if n >= 0 { self.tot_dim(n as usize) } else { 0 };
        if n <= 0 {
            return Subspace::zero(f, dim);
        }
        self.z(n - 1, p, r).image_under(&self.diffs[n as usize - 1])
    }

    fn denominator(&self, n: i64, p: i64, r: i64) -> Subspace {
        self.z(n, p + 1, r - 1).sum(&self.dz(n, p - r + 1, r - 1))
    }

    fn page(&self, r: usize) -> SpectralSequencePage {
        let (ni, nj) = (self.dc.imax() + 1, self.dc.jmax() + 1);
        let ri = r as i64;
        let mut dims = vec![vec![0; nj]; ni];
        let mut d_rank = vec![vec![0; nj]; ni];
        for i in 0..ni {
            for j in 0..nj {
                let (p, n) = (i as i64, (i + j) as i64);
                let num = self.z(n, p, ri);
                let den = self.denominator(n, p, ri);
                debug_assert!(num.contains_subspace(&den));
                dims[i][j] = num.dim() - den.dim();
                if dims[i][j] > 0 && i + r < ni && j + 1 >= r {
                    let target_den = self.denominator(n + 1, p + ri, ri);
                    let img = self.dz(n + 1, p, ri).sum(&target_den);
                    d_rank[i][j] = img.dim() - target_den.dim();
                }
            }
        }
        SpectralSequencePage {
            r,
            infinite: false,
            dims,
            d_rank,
        }
    }
}
