//! One-variable divided-power operators with Laurent coefficients,
//! `Σ c · s^a ∂^(b)` with `a ∈ ℤ`, acting on `k[s, s⁻¹]` by
//! `∂^(b) s^m = C(m, b) s^{m-b}`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gfp::PrimeField;
use crate::linalg::FpMatrix;

/// `C(m, j)` for any integer `m`, reduced mod p.
pub fn signed_binomial(field: PrimeField, m: i64, j: u32) -> u32 {
    if m >= 0 {
        field.binomial(m as u64, j as u64)
    } else {
        // C(m, j) = (−1)^j C(j − m − 1, j)
        let c = field.binomial((j as i64 - m - 1) as u64, j as u64);
        if j % 2 == 0 {
            c
        } else {
            field.neg(c)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentOp {
    field: PrimeField,
    terms: BTreeMap<(i64, u32), u32>,
}

impl LaurentOp {
    pub fn zero(field: PrimeField) -> Self {
        LaurentOp {
            field,
            terms: BTreeMap::new(),
        }
    }

    /// `c · s^a ∂^(b)`.
    pub fn monomial(field: PrimeField, a: i64, b: u32, c: u32) -> Self {
        let mut z = Self::zero(field);
        z.add_term(a, b, c);
        z
    }

    /// Multiplication by `s^a`.
    pub fn power(field: PrimeField, a: i64) -> Self {
        Self::monomial(field, a, 0, 1)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, u32, u32)> + '_ {
        self.terms.iter().map(|(&(a, b), &c)| (a, b, c))
    }

    pub fn order(&self) -> u32 {
        self.terms.keys().map(|&(_, b)| b).max().unwrap_or(0)
    }

    /// Torus weight `a − b` of a homogeneous operator.
    pub fn weight(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|&(a, b)| a - b as i64);
        let w = it.next()?;
        it.all(|x| x == w).then_some(w)
    }

    pub fn add_term(&mut self, a: i64, b: u32, c: u32) {
        let c = c % self.field.p();
        if c == 0 {
            return;
        }
        let f = self.field;
        let e = self.terms.entry((a, b)).or_insert(0);
        *e = f.add(*e, c);
        if *e == 0 {
            self.terms.remove(&(a, b));
        }
    }

    pub fn add(&self, other: &LaurentOp) -> LaurentOp {
        let mut out = self.clone();
        for (a, b, c) in other.terms() {
            out.add_term(a, b, c);
        }
        out
    }

    pub fn scale(&self, s: u32) -> LaurentOp {
        let mut out = Self::zero(self.field);
        for (a, b, c) in self.terms() {
            out.add_term(a, b, self.field.mul(c, s % self.field.p()));
        }
        out
    }

    pub fn sub(&self, other: &LaurentOp) -> LaurentOp {
        self.add(&other.scale(self.field.p() - 1))
    }

    /// `(s^a ∂^(b))(s^c ∂^(d)) = Σ_j C(c, j) C(b−j+d, d) s^{a+c−j} ∂^(b−j+d)`.
    pub fn mul(&self, other: &LaurentOp) -> LaurentOp {
        let f = self.field;
        let mut out = Self::zero(f);
        for (a, b, c1) in self.terms() {
            for (c, d, c2) in other.terms() {
                let base = f.mul(c1, c2);
                for j in 0..=b {
                    let coef = f.mul(
                        base,
                        f.mul(signed_binomial(f, c, j), f.binomial((b - j + d) as u64, d as u64)),
                    );
                    out.add_term(a + c - j as i64, b - j + d, coef);
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &LaurentOp) -> LaurentOp {
        self.mul(other).sub(&other.mul(self))
    }

    /// Image of `s^m`, as exponent → coefficient.
    pub fn act_on_power(&self, m: i64) -> BTreeMap<i64, u32> {
        let f = self.field;
        let mut out = BTreeMap::new();
        for (a, b, c) in self.terms() {
            let coef = f.mul(c, signed_binomial(f, m, b));
            if coef != 0 {
                let e = out.entry(a + m - b as i64).or_insert(0);
                *e = f.add(*e, coef);
            }
        }
        out.retain(|_, v| *v != 0);
        out
    }

    /// Recover the operator of order `≤ order` whose action on `s^m` is
    /// `action(m)`, by a triangular solve on `m = 0..=order`.
    pub fn from_action(
        field: PrimeField,
        order: u32,
        action: impl Fn(i64) -> BTreeMap<i64, u32>,
    ) -> Result<LaurentOp> {
        let mut op = Self::zero(field);
        for m in 0..=order as i64 {
            let known = op.act_on_power(m);
            let mut residual = action(m);
            for (e, c) in known {
                let r = residual.entry(e).or_insert(0);
                *r = field.sub(*r, c);
            }
            for (e, c) in residual {
                if c != 0 {
                    // residual is g(s)·s^0 at order m: coefficient s^{e} ↔ s^{e}∂^(m)
                    op.add_term(e, m as u32, c);
                }
            }
        }
        // check on a window of negative and positive powers
        for m in -(order as i64) - 3..=order as i64 + 3 {
            let lhs = op.act_on_power(m);
            let mut rhs = action(m);
            rhs.retain(|_, v| *v != 0);
            if lhs != rhs {
                return Err(Error::InvalidStructure("action is not that of a divided-power operator".into()));
            }
        }
        Ok(op)
    }

    /// `u^c ∂_u^(e)` for `u = s⁻¹`, rewritten in the `s` chart.
    pub fn from_inverse_chart(field: PrimeField, c: i64, e: u32) -> LaurentOp {
        // u^c ∂_u^(e) (u^{−m}) = C(−m, e) u^{c−m−e} = C(−m, e) s^{m+e−c}
        Self::from_action(field, e, |m| {
            let mut out = BTreeMap::new();
            let coef = signed_binomial(field, -m, e);
            if coef != 0 {
                out.insert(m + e as i64 - c, coef);
            }
            out
        })
        .expect("inverse-chart operators are differential operators")
    }
}

/// Coordinates of `v` in a linearly independent family, or `None` if `v`
/// is outside its span.
pub fn coordinates(field: PrimeField, basis: &[LaurentOp], v: &LaurentOp) -> Option<Vec<u32>> {
    let mut keys: Vec<(i64, u32)> = basis.iter().chain(std::iter::once(v)).flat_map(|o| o.terms.keys().copied()).collect();
    keys.sort();
    keys.dedup();
    let n = basis.len();
    let mut m = FpMatrix::zeros(field, keys.len(), n + 1);
    for (col, op) in basis.iter().chain(std::iter::once(v)).enumerate() {
        for (a, b, c) in op.terms() {
            let row = keys.binary_search(&(a, b)).expect("key present");
            m.set(row, col, c);
        }
    }
    let kernel = m.kernel();
    if kernel.len() != 1 {
        return None;
    }
    let w = kernel.iter().find(|k| k[n] != 0)?;
    let scale = field.neg(field.inv(w[n]));
    Some(w[..n].iter().map(|&c| field.mul(c, scale)).collect())
}
