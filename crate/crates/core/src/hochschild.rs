//! Hochschild cochains of finite-dimensional algebras given by structure
//! constants, the cup product, and the Koszul computation for divided-power
//! operator modules.

use serde::{Deserialize, Serialize};

use crate::dpdo::DPDOperator;
use crate::error::{Error, Result};
use crate::gfp::PrimeField;
use crate::linalg::{CochainComplex, FpMatrix};
use crate::poly::{exponents_up_to, Exponent, MultiPoly};

/// Largest algebra dimension accepted by the bar construction.
pub const MAX_BAR_ALGEBRA_DIM: usize = 12;
/// Largest Hochschild degree for which the bar construction is certified.
pub const MAX_BAR_DEGREE: usize = 3;
/// Guard on the size of the top cochain space built by the bar construction.
pub const MAX_BAR_COCHAIN_DIM: usize = 20_000;

/// Finite-dimensional associative unital algebra, `e_i e_j = Σ_k c[i][j][k] e_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructAlgebra {
    field: PrimeField,
    dim: usize,
    /// Nonzero structure constants per ordered pair `(i, j)`, flattened as `i*dim + j`.
    products: Vec<Vec<(usize, u32)>>,
    unit: Vec<u32>,
}

/// JSON form of a structure-constant algebra.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructAlgebraSpec {
    pub prime: u32,
    pub dim: usize,
    /// `c[i][j][k]`
    pub c: Vec<Vec<Vec<u32>>>,
    pub unit: Vec<u32>,
}

impl StructAlgebra {
    /// Build and check associativity and the unit laws.
    pub fn new(field: PrimeField, dim: usize, c: &[Vec<Vec<u32>>], unit: Vec<u32>) -> Result<Self> {
        let bad = || Error::InvalidStructure("structure constants have the wrong shape".into());
        if c.len() != dim || unit.len() != dim {
            return Err(bad());
        }
        let mut products = vec![Vec::new(); dim * dim];
        for i in 0..dim {
            if c[i].len() != dim {
                return Err(bad());
            }
            for j in 0..dim {
                if c[i][j].len() != dim {
                    return Err(bad());
                }
                for k in 0..dim {
                    let v = c[i][j][k] % field.p();
                    if v != 0 {
                        products[i * dim + j].push((k, v));
                    }
                }
            }
        }
        let unit = unit.into_iter().map(|u| u % field.p()).collect();
        Self::from_sparse(field, dim, products, unit)
    }

    fn from_sparse(field: PrimeField, dim: usize, products: Vec<Vec<(usize, u32)>>, unit: Vec<u32>) -> Result<Self> {
        let a = StructAlgebra {
            field,
            dim,
            products,
            unit,
        };
        a.validate()?;
        Ok(a)
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim;
        for i in 0..d {
            let ei = self.basis_vector(i);
            if self.mul(&self.unit, &ei) != ei || self.mul(&ei, &self.unit) != ei {
                return Err(Error::InvalidStructure(format!("unit law fails on e_{i}")));
            }
            for j in 0..d {
                let eij = self.basis_product(i, j);
                for k in 0..d {
                    let ek = self.basis_vector(k);
                    let left = self.mul(&eij, &ek);
                    let right = self.mul(&ei, &self.basis_product(j, k));
                    if left != right {
                        return Err(Error::InvalidStructure(format!(
                            "associativity fails on (e_{i}, e_{j}, e_{k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn from_spec(spec: &StructAlgebraSpec) -> Result<Self> {
        let field = PrimeField::new(spec.prime)?;
        Self::new(field, spec.dim, &spec.c, spec.unit.clone())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: StructAlgebraSpec = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_spec(&spec)
    }

    pub fn to_spec(&self) -> StructAlgebraSpec {
        let d = self.dim;
        let mut c = vec![vec![vec![0; d]; d]; d];
        for i in 0..d {
            for j in 0..d {
                for &(k, v) in &self.products[i * d + j] {
                    c[i][j][k] = v;
                }
            }
        }
        StructAlgebraSpec {
            prime: self.field.p(),
            dim: d,
            c,
            unit: self.unit.clone(),
        }
    }

    /// The ground field `k`.
    pub fn ground(field: PrimeField) -> Self {
        StructAlgebra {
            field,
            dim: 1,
            products: vec![vec![(0, 1)]],
            unit: vec![1],
        }
    }

    /// `k[x]/(x^m)` on the basis `1, x, …, x^{m-1}`.
    pub fn truncated_poly(field: PrimeField, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidStructure("k[x]/(x^0) is the zero ring".into()));
        }
        let mut products = vec![Vec::new(); m * m];
        for i in 0..m {
            for j in 0..m {
                if i + j < m {
                    products[i * m + j].push((i + j, 1));
                }
            }
        }
        let mut unit = vec![0; m];
        unit[0] = 1;
        Self::from_sparse(field, m, products, unit)
    }

    /// `M_n(k)` on the matrix units `E_{ij}`, indexed `i*n + j`.
    pub fn matrix_algebra(field: PrimeField, n: usize) -> Result<Self> {
        let d = n * n;
        let mut products = vec![Vec::new(); d * d];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    products[(i * n + j) * d + (j * n + l)].push((i * n + l, 1));
                }
            }
        }
        let mut unit = vec![0; d];
        for i in 0..n {
            unit[i * n + i] = 1;
        }
        Self::from_sparse(field, d, products, unit)
    }

    /// `A ⊗ B` on the basis `a_i ⊗ b_j`, indexed `i*dim(B) + j`.
    pub fn tensor(a: &StructAlgebra, b: &StructAlgebra) -> Result<Self> {
        a.check_same_field(b)?;
        let f = a.field;
        let (da, db) = (a.dim, b.dim);
        let d = da * db;
        let mut products = vec![Vec::new(); d * d];
        for i1 in 0..da {
            for j1 in 0..db {
                for i2 in 0..da {
                    for j2 in 0..db {
                        let out = &mut products[(i1 * db + j1) * d + (i2 * db + j2)];
                        for &(ka, ca) in &a.products[i1 * da + i2] {
                            for &(kb, cb) in &b.products[j1 * db + j2] {
                                out.push((ka * db + kb, f.mul(ca, cb)));
                            }
                        }
                    }
                }
            }
        }
        let mut unit = vec![0; d];
        for i in 0..da {
            for j in 0..db {
                unit[i * db + j] = f.mul(a.unit[i], b.unit[j]);
            }
        }
        Self::from_sparse(f, d, products, unit)
    }

    /// `M_n(A) = M_n(k) ⊗ A`.
    pub fn matrices_over(a: &StructAlgebra, n: usize) -> Result<Self> {
        Self::tensor(&Self::matrix_algebra(a.field, n)?, a)
    }

    /// Direct product `A × B`; basis of `A` first.
    pub fn product(a: &StructAlgebra, b: &StructAlgebra) -> Result<Self> {
        a.check_same_field(b)?;
        let d = a.dim + b.dim;
        let mut products = vec![Vec::new(); d * d];
        for i in 0..a.dim {
            for j in 0..a.dim {
                products[i * d + j] = a.products[i * a.dim + j].clone();
            }
        }
        for i in 0..b.dim {
            for j in 0..b.dim {
                products[(a.dim + i) * d + a.dim + j] =
                    b.products[i * b.dim + j].iter().map(|&(k, c)| (a.dim + k, c)).collect();
            }
        }
        let mut unit = a.unit.clone();
        unit.extend_from_slice(&b.unit);
        Self::from_sparse(a.field, d, products, unit)
    }

    fn check_same_field(&self, other: &StructAlgebra) -> Result<()> {
        if self.field != other.field {
            return Err(Error::DimensionMismatch("algebras over different fields".into()));
        }
        Ok(())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit(&self) -> &[u32] {
        &self.unit
    }

    pub fn basis_vector(&self, i: usize) -> Vec<u32> {
        let mut v = vec![0; self.dim];
        v[i] = 1;
        v
    }

    /// Nonzero structure constants of `e_i e_j`.
    pub fn structure(&self, i: usize, j: usize) -> &[(usize, u32)] {
        &self.products[i * self.dim + j]
    }

    pub fn basis_product(&self, i: usize, j: usize) -> Vec<u32> {
        let mut v = vec![0; self.dim];
        for &(k, c) in self.structure(i, j) {
            v[k] = self.field.add(v[k], c);
        }
        v
    }

    pub fn mul(&self, u: &[u32], v: &[u32]) -> Vec<u32> {
        let f = self.field;
        let mut out = vec![0; self.dim];
        for (i, &ui) in u.iter().enumerate().filter(|(_, &x)| x != 0) {
            for (j, &vj) in v.iter().enumerate().filter(|(_, &x)| x != 0) {
                let s = f.mul(ui, vj);
                for &(k, c) in self.structure(i, j) {
                    out[k] = f.add(out[k], f.mul(s, c));
                }
            }
        }
        out
    }

    /// Matrix of left multiplication by `e_i`.
    pub fn left_mult(&self, i: usize) -> FpMatrix {
        let mut m = FpMatrix::zeros(self.field, self.dim, self.dim);
        for j in 0..self.dim {
            for &(k, c) in self.structure(i, j) {
                m.add_to(k, j, c);
            }
        }
        m
    }

    /// Matrix of right multiplication by `e_i`.
    pub fn right_mult(&self, i: usize) -> FpMatrix {
        let mut m = FpMatrix::zeros(self.field, self.dim, self.dim);
        for j in 0..self.dim {
            for &(k, c) in self.structure(j, i) {
                m.add_to(k, j, c);
            }
        }
        m
    }

    /// Check that `phi` (columns are images of the basis of `self`) is a
    /// unital algebra map `self → target`.
    pub fn check_algebra_map(&self, target: &StructAlgebra, phi: &FpMatrix) -> Result<()> {
        if phi.rows() != target.dim || phi.cols() != self.dim {
            return Err(Error::DimensionMismatch("algebra map has the wrong shape".into()));
        }
        if phi.mul_vec(&self.unit) != target.unit {
            return Err(Error::InvalidStructure("algebra map is not unital".into()));
        }
        for i in 0..self.dim {
            for j in 0..self.dim {
                let lhs = phi.mul_vec(&self.basis_product(i, j));
                let rhs = target.mul(&phi.col(i), &phi.col(j));
                if lhs != rhs {
                    return Err(Error::InvalidStructure(format!(
                        "algebra map is not multiplicative on (e_{i}, e_{j})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Bimodule over a [`StructAlgebra`]; `a·m = left[a] m`, `m·a = right[a] m`
/// on column vectors. When the bimodule comes from an algebra map `A → B`
/// it also carries the product of `B`, which the cup product needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bimodule {
    field: PrimeField,
    dim: usize,
    left: Vec<FpMatrix>,
    right: Vec<FpMatrix>,
    product: Option<StructAlgebra>,
}

/// JSON form of a bimodule: `left[i]`, `right[i]` are row-major `dim × dim` matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BimoduleSpec {
    pub dim: usize,
    pub left: Vec<Vec<Vec<u32>>>,
    pub right: Vec<Vec<Vec<u32>>>,
}

impl Bimodule {
    /// Build and check that both actions are unital algebra actions that commute.
    pub fn new(algebra: &StructAlgebra, dim: usize, left: Vec<FpMatrix>, right: Vec<FpMatrix>) -> Result<Self> {
        let m = Bimodule {
            field: algebra.field,
            dim,
            left,
            right,
            product: None,
        };
        m.validate(algebra)?;
        Ok(m)
    }

    pub fn from_spec(algebra: &StructAlgebra, spec: &BimoduleSpec) -> Result<Self> {
        let f = algebra.field;
        let conv = |ms: &[Vec<Vec<u32>>]| -> Vec<FpMatrix> { ms.iter().map(|rows| FpMatrix::from_rows(f, rows)).collect() };
        Self::new(algebra, spec.dim, conv(&spec.left), conv(&spec.right))
    }

    pub fn from_json(algebra: &StructAlgebra, s: &str) -> Result<Self> {
        let spec: BimoduleSpec = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_spec(algebra, &spec)
    }

    fn action(&self, mats: &[FpMatrix], a: &[u32]) -> FpMatrix {
        let mut out = FpMatrix::zeros(self.field, self.dim, self.dim);
        for (i, &c) in a.iter().enumerate() {
            if c != 0 {
                out = out.add(&mats[i].scale(c));
            }
        }
        out
    }

    fn validate(&self, a: &StructAlgebra) -> Result<()> {
        let d = a.dim;
        let shape_ok = |ms: &[FpMatrix]| ms.len() == d && ms.iter().all(|m| m.rows() == self.dim && m.cols() == self.dim);
        if !shape_ok(&self.left) || !shape_ok(&self.right) {
            return Err(Error::DimensionMismatch("bimodule action matrices have the wrong shape".into()));
        }
        let id = FpMatrix::identity(self.field, self.dim);
        if self.action(&self.left, &a.unit) != id || self.action(&self.right, &a.unit) != id {
            return Err(Error::InvalidStructure("bimodule actions are not unital".into()));
        }
        for i in 0..d {
            for j in 0..d {
                let eij = a.basis_product(i, j);
                if self.left[i].mul(&self.left[j]) != self.action(&self.left, &eij) {
                    return Err(Error::InvalidStructure("left action is not multiplicative".into()));
                }
                // m·(e_i e_j) = (m·e_i)·e_j
                if self.right[j].mul(&self.right[i]) != self.action(&self.right, &eij) {
                    return Err(Error::InvalidStructure("right action is not multiplicative".into()));
                }
                if self.left[i].mul(&self.right[j]) != self.right[j].mul(&self.left[i]) {
                    return Err(Error::InvalidStructure("left and right actions do not commute".into()));
                }
            }
        }
        Ok(())
    }

    /// `B` as an `A`-bimodule through a unital algebra map `phi: A → B`.
    pub fn from_algebra_map(a: &StructAlgebra, b: &StructAlgebra, phi: &FpMatrix) -> Result<Self> {
        a.check_algebra_map(b, phi)?;
        let mut left = Vec::with_capacity(a.dim);
        let mut right = Vec::with_capacity(a.dim);
        for i in 0..a.dim {
            let img = phi.col(i);
            let mut l = FpMatrix::zeros(b.field, b.dim, b.dim);
            let mut r = FpMatrix::zeros(b.field, b.dim, b.dim);
            for (k, &c) in img.iter().enumerate() {
                if c != 0 {
                    l = l.add(&b.left_mult(k).scale(c));
                    r = r.add(&b.right_mult(k).scale(c));
                }
            }
            left.push(l);
            right.push(r);
        }
        Ok(Bimodule {
            field: b.field,
            dim: b.dim,
            left,
            right,
            product: Some(b.clone()),
        })
    }

    /// The diagonal bimodule `A`.
    pub fn regular(a: &StructAlgebra) -> Self {
        Self::from_algebra_map(a, a, &FpMatrix::identity(a.field, a.dim)).expect("identity is an algebra map")
    }

    /// `End_k(A)` with `A` acting through left multiplication.
    pub fn endomorphisms(a: &StructAlgebra) -> Result<Self> {
        let n = a.dim;
        let end = StructAlgebra::matrix_algebra(a.field, n)?;
        let mut phi = FpMatrix::zeros(a.field, n * n, n);
        for i in 0..n {
            let l = a.left_mult(i);
            for r in 0..n {
                for c in 0..n {
                    phi.set(r * n + c, i, l.get(r, c));
                }
            }
        }
        Self::from_algebra_map(a, &end, &phi)
    }

    /// Restrict scalars along a unital algebra map `phi: B → A`.
    pub fn restrict_scalars(&self, b: &StructAlgebra, a: &StructAlgebra, phi: &FpMatrix) -> Result<Self> {
        b.check_algebra_map(a, phi)?;
        let left = (0..b.dim).map(|i| self.action(&self.left, &phi.col(i))).collect();
        let right = (0..b.dim).map(|i| self.action(&self.right, &phi.col(i))).collect();
        Ok(Bimodule {
            field: self.field,
            dim: self.dim,
            left,
            right,
            product: self.product.clone(),
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn left(&self, i: usize) -> &FpMatrix {
        &self.left[i]
    }

    pub fn right(&self, i: usize) -> &FpMatrix {
        &self.right[i]
    }

    pub fn product(&self) -> Option<&StructAlgebra> {
        self.product.as_ref()
    }
}

fn pow_checked(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Digits of a tuple index, most significant first.
fn decode_tuple(mut t: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for k in (0..len).rev() {
        out[k] = t % base;
        t /= base;
    }
    out
}

fn encode_tuple(digits: &[usize], base: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * base + d)
}

/// A Hochschild `j`-cochain `A^{⊗j} → M`, stored as `values[t*dim(M) + m]`
/// where `t` is the base-`dim(A)` index of the input tuple, most
/// significant digit first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HochschildCochain {
    pub degree: usize,
    pub dim_a: usize,
    pub dim_m: usize,
    pub values: Vec<u32>,
}

impl HochschildCochain {
    pub fn zero(degree: usize, dim_a: usize, dim_m: usize) -> Self {
        HochschildCochain {
            degree,
            dim_a,
            dim_m,
            values: vec![0; dim_a.pow(degree as u32) * dim_m],
        }
    }

    pub fn from_values(degree: usize, dim_a: usize, dim_m: usize, values: Vec<u32>) -> Result<Self> {
        if values.len() != dim_a.pow(degree as u32) * dim_m {
            return Err(Error::DimensionMismatch("cochain has the wrong length".into()));
        }
        Ok(HochschildCochain {
            degree,
            dim_a,
            dim_m,
            values,
        })
    }

    /// The degree-0 cochain `1_M`.
    pub fn unit(a: &StructAlgebra, m: &Bimodule) -> Result<Self> {
        let prod = m.product().ok_or_else(|| Error::MissingProduct("coefficient bimodule".into()))?;
        Self::from_values(0, a.dim(), m.dim(), prod.unit().to_vec())
    }

    pub fn value_at(&self, tuple: &[usize]) -> &[u32] {
        let t = encode_tuple(tuple, self.dim_a);
        &self.values[t * self.dim_m..(t + 1) * self.dim_m]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    fn check(&self, a: &StructAlgebra, m: &Bimodule) -> Result<()> {
        if self.dim_a != a.dim() || self.dim_m != m.dim() {
            return Err(Error::DimensionMismatch("cochain does not match (A, M)".into()));
        }
        Ok(())
    }
}

/// Hochschild differential evaluated directly from the defining formula
/// `(df)(a_1..a_{j+1}) = a_1 f(a_2..) + Σ (−1)^i f(.., a_i a_{i+1}, ..) + (−1)^{j+1} f(..a_j) a_{j+1}`.
pub fn hochschild_differential(a: &StructAlgebra, m: &Bimodule, f: &HochschildCochain) -> Result<HochschildCochain> {
    f.check(a, m)?;
    let fld = a.field();
    let (da, dm, j) = (a.dim(), m.dim(), f.degree);
    let mut out = HochschildCochain::zero(j + 1, da, dm);
    for s in 0..da.pow(j as u32 + 1) {
        let digits = decode_tuple(s, da, j + 1);
        let mut acc = m.left(digits[0]).mul_vec(f.value_at(&digits[1..]));
        for i in 1..=j {
            let sign = if i % 2 == 0 { 1 } else { fld.p() - 1 };
            for &(k, c) in a.structure(digits[i - 1], digits[i]) {
                let mut merged = digits[..i - 1].to_vec();
                merged.push(k);
                merged.extend_from_slice(&digits[i + 1..]);
                let coef = fld.mul(sign, c);
                for (x, &v) in acc.iter_mut().zip(f.value_at(&merged)) {
                    *x = fld.add(*x, fld.mul(coef, v));
                }
            }
        }
        let last = m.right(digits[j]).mul_vec(f.value_at(&digits[..j]));
        let sign = if (j + 1) % 2 == 0 { 1 } else { fld.p() - 1 };
        for (x, v) in acc.iter_mut().zip(last) {
            *x = fld.add(*x, fld.mul(sign, v));
        }
        out.values[s * dm..(s + 1) * dm].copy_from_slice(&acc);
    }
    Ok(out)
}

/// Matrix of the Hochschild differential `C^j → C^{j+1}` in the tuple basis.
pub fn bar_differential(a: &StructAlgebra, m: &Bimodule, j: usize) -> Result<FpMatrix> {
    let fld = a.field();
    let (da, dm) = (a.dim(), m.dim());
    let cols = pow_checked(da, j).and_then(|x| x.checked_mul(dm));
    let rows = pow_checked(da, j + 1).and_then(|x| x.checked_mul(dm));
    let (Some(rows), Some(cols)) = (rows, cols) else {
        return Err(Error::Capacity("bar cochain dimension overflows".into()));
    };
    if rows > MAX_BAR_COCHAIN_DIM {
        return Err(Error::Capacity(format!(
            "bar cochain space of dimension {rows} exceeds {MAX_BAR_COCHAIN_DIM}"
        )));
    }
    let mut d = FpMatrix::zeros(fld, rows, cols);
    let tail_mod = da.pow(j as u32);
    for s in 0..da.pow(j as u32 + 1) {
        let digits = decode_tuple(s, da, j + 1);
        let tail = s % tail_mod;
        let l = m.left(digits[0]);
        for r in 0..dm {
            for c in 0..dm {
                let v = l.get(r, c);
                if v != 0 {
                    d.add_to(s * dm + r, tail * dm + c, v);
                }
            }
        }
        for i in 1..=j {
            let sign = if i % 2 == 0 { 1 } else { fld.p() - 1 };
            for &(k, c) in a.structure(digits[i - 1], digits[i]) {
                let mut merged = digits[..i - 1].to_vec();
                merged.push(k);
                merged.extend_from_slice(&digits[i + 1..]);
                let t = encode_tuple(&merged, da);
                let coef = fld.mul(sign, c);
                for x in 0..dm {
                    d.add_to(s * dm + x, t * dm + x, coef);
                }
            }
        }
        let head = s / da;
        let rmat = m.right(digits[j]);
        let sign = if (j + 1) % 2 == 0 { 1 } else { fld.p() - 1 };
        for r in 0..dm {
            for c in 0..dm {
                let v = rmat.get(r, c);
                if v != 0 {
                    d.add_to(s * dm + r, head * dm + c, fld.mul(sign, v));
                }
            }
        }
    }
    Ok(d)
}

/// Hochschild cochain complex of `(A, M)` through degree `max_degree + 1`,
/// so that every degree up to `max_degree` carries its outgoing
/// differential and its cohomology is exact.
pub fn bar_complex(a: &StructAlgebra, m: &Bimodule, max_degree: usize) -> Result<CochainComplex> {
    if a.field() != m.field() {
        return Err(Error::DimensionMismatch("algebra and bimodule over different fields".into()));
    }
    if max_degree > MAX_BAR_DEGREE {
        return Err(Error::Capacity(format!("bar degree {max_degree} above {MAX_BAR_DEGREE}")));
    }
    if a.dim() > MAX_BAR_ALGEBRA_DIM {
        return Err(Error::Capacity(format!(
            "algebra dimension {} above {MAX_BAR_ALGEBRA_DIM}",
            a.dim()
        )));
    }
    let diffs = (0..=max_degree).map(|j| bar_differential(a, m, j)).collect::<Result<Vec<_>>>()?;
    let dims = (0..=max_degree + 1).map(|j| a.dim().pow(j as u32) * m.dim()).collect();
    CochainComplex::new(a.field(), 0, dims, diffs)
}

/// `dim HH^j(A, M)` for `j ≤ max_degree`.
pub fn hochschild_dims(a: &StructAlgebra, m: &Bimodule, max_degree: usize) -> Result<Vec<usize>> {
    let c = bar_complex(a, m, max_degree)?;
    let mut dims = c.cohomology_dims();
    dims.truncate(max_degree + 1);
    Ok(dims)
}

/// `(α ∪ β)(a_1..a_{m+n}) = α(a_1..a_m) · β(a_{m+1}..a_{m+n})`, product in `M`.
/// Satisfies `d(α∪β) = dα∪β + (−1)^m α∪dβ`.
pub fn cup_product(
    a: &StructAlgebra,
    m: &Bimodule,
    alpha: &HochschildCochain,
    beta: &HochschildCochain,
) -> Result<HochschildCochain> {
    alpha.check(a, m)?;
    beta.check(a, m)?;
    let prod = m.product().ok_or_else(|| Error::MissingProduct("coefficient bimodule".into()))?;
    let (da, dm) = (a.dim(), m.dim());
    let (p, q) = (alpha.degree, beta.degree);
    let mut out = HochschildCochain::zero(p + q, da, dm);
    let qn = da.pow(q as u32);
    for s in 0..da.pow((p + q) as u32) {
        let (head, tail) = (s / qn, s % qn);
        let x = &alpha.values[head * dm..(head + 1) * dm];
        let y = &beta.values[tail * dm..(tail + 1) * dm];
        out.values[s * dm..(s + 1) * dm].copy_from_slice(&prod.mul(x, y));
    }
    Ok(out)
}

/// One weight block of the Koszul commutator complex: `K^s` has basis
/// `∂^(b) e_S` with `|S| = s` and `|b| = weight − s`.
#[derive(Debug, Clone)]
pub struct KoszulBlock {
    pub weight: u32,
    /// Basis of each `K^s`: `(S as a bitmask, b)`.
    pub basis: Vec<Vec<(u32, Exponent)>>,
    pub complex: CochainComplex,
}

/// `Hom_{O⊗O}(Koszul(x_1..x_n), M)` for the module `M` spanned by
/// `x^a ∂^(b)` with `|b| ≤ q_cap`, realized as the tensor product of the
/// two-term complexes `[x_i, −]`.
///
/// `[x_i, x^a ∂^(b)] = −x^a ∂^(b − e_i)`, so the complex is the `∂`-part
/// tensored with the functions, and splits by the weight `|b| + s`. Weights
/// `≤ q_cap` see the whole untruncated complex and are certified; in terms of
/// divided-power degree this is the window `|b| ∈ [0, q_cap − n]` across all
/// cochain degrees.
#[derive(Debug, Clone)]
pub struct KoszulCommutatorComplex {
    pub field: PrimeField,
    pub nvars: usize,
    pub q_cap: u32,
    pub blocks: Vec<KoszulBlock>,
}

fn subsets_of_size(n: usize, s: usize) -> Vec<u32> {
    (0u32..(1 << n)).filter(|m| m.count_ones() as usize == s).collect()
}

fn dp_monomial(field: PrimeField, nvars: usize, b: &[u32]) -> Result<DPDOperator> {
    DPDOperator::monomial(field, vec![0; nvars], b.to_vec(), 1)
}

/// Differential `K^s → K^{s+1}` on basis vectors `(S, b)`, computed with the
/// operator product: `d(m e_S) = Σ_{i∉S} (−1)^{#{j∈S, j<i}} [x_i, m] e_{S∪i}`.
fn koszul_matrix(
    field: PrimeField,
    nvars: usize,
    src: &[(u32, Exponent)],
    dst: &[(u32, Exponent)],
    apply: impl Fn(&DPDOperator, usize) -> Result<DPDOperator>,
    encode: impl Fn(&Exponent, &Exponent) -> Exponent,
) -> Result<FpMatrix> {
    let mut mat = FpMatrix::zeros(field, dst.len(), src.len());
    for (col, (mask, b)) in src.iter().enumerate() {
        let op = dp_monomial(field, nvars, b)?;
        for i in 0..nvars {
            if mask & (1 << i) != 0 {
                continue;
            }
            let sign = if (mask & ((1 << i) - 1)).count_ones() % 2 == 0 { 1 } else { field.p() - 1 };
            let img = apply(&op, i)?;
            let new_mask = mask | (1 << i);
            for (a, bb, c) in img.terms() {
                let key = (new_mask, encode(a, bb));
                let row = dst
                    .iter()
                    .position(|e| *e == key)
                    .ok_or_else(|| Error::InvalidStructure("commutator leaves the truncated module".into()))?;
                mat.add_to(row, col, field.mul(sign, c));
            }
        }
    }
    Ok(mat)
}

fn commutator_with_coordinate(op: &DPDOperator, i: usize) -> Result<DPDOperator> {
    DPDOperator::coordinate(op.field(), op.nvars(), i).commutator(op)
}

/// Build the weight blocks `0..=q_cap + n` of the Koszul commutator complex.
pub fn koszul_commutator_complex(field: PrimeField, nvars: usize, q_cap: u32) -> Result<KoszulCommutatorComplex> {
    if nvars == 0 {
        return Err(Error::InvalidStructure("Koszul complex needs at least one coordinate".into()));
    }
    if q_cap == 0 || (q_cap as usize) < nvars {
        return Err(Error::Truncation(format!(
            "divided-power cap {q_cap} leaves no certified window for {nvars} coordinates"
        )));
    }
    let mut blocks = Vec::new();
    for w in 0..=q_cap + nvars as u32 {
        let mut basis = Vec::new();
        for s in 0..=nvars {
            let mut level = Vec::new();
            if (s as u32) <= w && w - s as u32 <= q_cap {
                let bdeg = w - s as u32;
                for mask in subsets_of_size(nvars, s) {
                    for b in exponents_up_to(nvars, bdeg).into_iter().filter(|b| b.iter().sum::<u32>() == bdeg) {
                        level.push((mask, b));
                    }
                }
            }
            basis.push(level);
        }
        let diffs = (0..nvars)
            .map(|s| {
                koszul_matrix(field, nvars, &basis[s], &basis[s + 1], commutator_with_coordinate, |a, b| {
                    debug_assert!(a.iter().all(|&k| k == 0));
                    b.clone()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let dims = basis.iter().map(Vec::len).collect();
        let complex = CochainComplex::new(field, 0, dims, diffs)?;
        blocks.push(KoszulBlock { weight: w, basis, complex });
    }
    Ok(KoszulCommutatorComplex {
        field,
        nvars,
        q_cap,
        blocks,
    })
}

impl KoszulCommutatorComplex {
    /// Certified weights: those whose block is the untruncated one.
    pub fn certified(&self, weight: u32) -> bool {
        weight <= self.q_cap
    }

    /// Divided-power window `[0, Q − n]` in which assertions are certified.
    pub fn certified_window(&self) -> (u32, u32) {
        (0, self.q_cap - self.nvars as u32)
    }

    /// Cohomology dimensions of the `∂`-part summed over certified weights;
    /// the full cohomology is this tensored with the functions.
    pub fn certified_cohomology(&self) -> Vec<usize> {
        let mut out = vec![0; self.nvars + 1];
        for b in self.blocks.iter().filter(|b| self.certified(b.weight)) {
            for (s, d) in b.complex.cohomology_dims().into_iter().enumerate() {
                out[s] += d;
            }
        }
        out
    }

    /// Cohomology of the uncertified blocks, where the truncation produces
    /// boundary classes.
    pub fn boundary_cohomology(&self) -> Vec<usize> {
        let mut out = vec![0; self.nvars + 1];
        for b in self.blocks.iter().filter(|b| !self.certified(b.weight)) {
            for (s, d) in b.complex.cohomology_dims().into_iter().enumerate() {
                out[s] += d;
            }
        }
        out
    }

    /// One-variable two-term check: `[x, −]` maps the `Q`-truncated module
    /// onto the `(Q−1)`-truncation with kernel spanned by `∂^(0)`. Returns
    /// `(rank, kernel dimension, target dimension)` of the `∂`-part.
    pub fn two_term_ranks(&self) -> Option<(usize, usize, usize)> {
        if self.nvars != 1 {
            return None;
        }
        let (mut rank, mut src, mut dst) = (0, 0, 0);
        for b in self.blocks.iter().filter(|b| self.certified(b.weight)) {
            let d = b.complex.differential(0).expect("two-term block");
            rank += d.rank();
            src += d.cols();
            dst += d.rows();
        }
        Some((rank, src - rank, dst))
    }
}

/// Full Koszul commutator complex including the functions factor `x^a`,
/// `|a| ≤ x_bound`, for cross-checks against the bar construction.
pub fn koszul_full_complex(field: PrimeField, nvars: usize, q_cap: u32, x_bound: u32) -> Result<CochainComplex> {
    let mods: Vec<(Exponent, Exponent)> = exponents_up_to(nvars, x_bound)
        .into_iter()
        .flat_map(|a| exponents_up_to(nvars, q_cap).into_iter().map(move |b| (a.clone(), b)))
        .collect();
    let mut basis = Vec::new();
    for s in 0..=nvars {
        let mut level = Vec::new();
        for mask in subsets_of_size(nvars, s) {
            for (a, b) in &mods {
                let mut key = a.clone();
                key.extend_from_slice(b);
                level.push((mask, key));
            }
        }
        basis.push(level);
    }
    let split = |key: &Exponent| (key[..nvars].to_vec(), key[nvars..].to_vec());
    let mut diffs = Vec::new();
    for s in 0..nvars {
        let mut mat = FpMatrix::zeros(field, basis[s + 1].len(), basis[s].len());
        for (col, (mask, key)) in basis[s].iter().enumerate() {
            let (a, b) = split(key);
            let op = DPDOperator::monomial(field, a, b, 1)?;
            for i in 0..nvars {
                if mask & (1 << i) != 0 {
                    continue;
                }
                let sign = if (mask & ((1 << i) - 1)).count_ones() % 2 == 0 { 1 } else { field.p() - 1 };
                let img = commutator_with_coordinate(&op, i)?;
                for (ia, ib, c) in img.terms() {
                    let mut k = ia.clone();
                    k.extend_from_slice(ib);
                    let target = (mask | (1 << i), k);
                    let row = basis[s + 1]
                        .iter()
                        .position(|e| *e == target)
                        .ok_or_else(|| Error::InvalidStructure("commutator leaves the truncated module".into()))?;
                    mat.add_to(row, col, field.mul(sign, c));
                }
            }
        }
        diffs.push(mat);
    }
    let dims = basis.iter().map(Vec::len).collect();
    CochainComplex::new(field, 0, dims, diffs)
}

/// Result of the `HH^*(𝒟ʳ(U), 𝒟(V))` computation for the affine model.
#[derive(Debug, Clone)]
pub struct HHPairResult {
    pub depth: u32,
    /// `dim HH^j` within the certified window, `j = 0..=n`.
    pub dims: Vec<usize>,
    /// Basis of `HH^0`: the twisted monomials `x^{p^r a}` with degree ≤ the bound.
    pub hh0_basis: Vec<MultiPoly>,
    /// Number of divided-power basis elements whose compression was checked.
    pub morita_checked: usize,
    pub certified_window: (u32, u32),
    pub truncated: bool,
}

/// `HH^*(𝒟ʳ(U), 𝒟(V))` for `U = V = 𝔸ⁿ`: compress to depth 0 by the
/// Frobenius-twist idempotent, then run the Koszul commutator complex.
/// `q_cap` bounds the divided-power degree in the compressed variables and
/// `degree_bound` the function degree in the original ones.
pub fn hh_of_pair(field: PrimeField, nvars: usize, depth: u32, q_cap: u32, degree_bound: u32) -> Result<HHPairResult> {
    if q_cap == 0 {
        return Err(Error::Truncation("degenerate divided-power window".into()));
    }
    let q = field.p().pow(depth);
    // compression of the twisted basis recovers the divided-power basis in y
    let mut checked = 0;
    let cap = field.p().pow(4);
    for a in exponents_up_to(nvars, degree_bound / q) {
        for b in exponents_up_to(nvars, q_cap) {
            if b.iter().any(|&k| k * q > cap) {
                continue;
            }
            let tw = |e: &Exponent| e.iter().map(|k| k * q).collect::<Exponent>();
            let op = DPDOperator::monomial(field, tw(&a), tw(&b), 1)?;
            let c = op.morita_compress(depth, degree_bound.max(q * q_cap))?;
            if c.value != DPDOperator::monomial(field, a.clone(), b.clone(), 1)? {
                return Err(Error::InvalidStructure(
                    "Frobenius-twist compression does not match the divided-power basis".into(),
                ));
            }
            checked += 1;
        }
    }
    let koszul = koszul_commutator_complex(field, nvars, q_cap)?;
    let functions = exponents_up_to(nvars, degree_bound / q);
    let dims: Vec<usize> = koszul.certified_cohomology().iter().map(|d| d * functions.len()).collect();
    let hh0_basis = functions
        .iter()
        .map(|a| MultiPoly::monomial(field, a.iter().map(|k| k * q).collect(), 1))
        .collect();
    Ok(HHPairResult {
        depth,
        dims,
        hh0_basis,
        morita_checked: checked,
        certified_window: koszul.certified_window(),
        truncated: koszul.boundary_cohomology().iter().any(|&d| d > 0),
    })
}
