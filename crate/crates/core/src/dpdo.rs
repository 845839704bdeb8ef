//! Divided-power differential operators `Σ c · x^a ∂^(b)` in characteristic p.
//!
//! Operators are kept normal-ordered (functions to the left of all divided
//! powers). Products use the exchange rule
//!
//! ```text
//! ∂^(q) x^m = Σ_j C(m, j) x^{m-j} ∂^(q-j)
//! ```
//!
//! per variable, together with `∂^(q) ∂^(q') = C(q+q', q) ∂^(q+q')`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::gfp::PrimeField;
use crate::poly::{
    check_exponent, exponents_up_to, parse_uint, parse_var_index, render_monomial, split_signed_terms,
    Exponent, MultiPoly, Truncated, TwistSubring,
};

/// Twist depths beyond this are never needed: the divided-power cap is
/// `p^4`, so every admissible operator is central over depth 5.
pub const MAX_DEPTH: u32 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DPDOperator {
    field: PrimeField,
    nvars: usize,
    terms: BTreeMap<(Exponent, Exponent), u32>,
}

/// Iterate over all multi-indices `j` with `0 ≤ j ≤ bound` componentwise.
fn for_each_below(bound: &[u32], mut f: impl FnMut(&[u32])) {
    let mut j = vec![0u32; bound.len()];
    loop {
        f(&j);
        let mut k = 0;
        loop {
            if k == bound.len() {
                return;
            }
            if j[k] < bound[k] {
                j[k] += 1;
                break;
            }
            j[k] = 0;
            k += 1;
        }
    }
}

impl DPDOperator {
    pub fn zero(field: PrimeField, nvars: usize) -> Self {
        DPDOperator {
            field,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(field: PrimeField, nvars: usize) -> Self {
        let mut z = Self::zero(field, nvars);
        z.terms.insert((vec![0; nvars], vec![0; nvars]), 1);
        z
    }

    /// Per-variable cap on divided-power indices.
    pub fn dp_cap(&self) -> u32 {
        self.field.p().pow(4)
    }

    /// The monomial `c · x^a ∂^(b)`.
    pub fn monomial(field: PrimeField, a: Exponent, b: Exponent, c: u32) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch("exponent and divided-power lengths differ".into()));
        }
        let mut z = Self::zero(field, a.len());
        z.check_cap(&b)?;
        check_exponent(&a)?;
        z.add_term(a, b, c);
        Ok(z)
    }

    /// `∂_i^(q)` (0-based variable index).
    pub fn divided_power(field: PrimeField, nvars: usize, i: usize, q: u32) -> Result<Self> {
        let mut b = vec![0; nvars];
        b[i] = q;
        Self::monomial(field, vec![0; nvars], b, 1)
    }

    /// Multiplication by the coordinate `x_i`.
    pub fn coordinate(field: PrimeField, nvars: usize, i: usize) -> Self {
        Self::function(&MultiPoly::var(field, nvars, i))
    }

    /// Multiplication by a polynomial: an order-zero operator.
    pub fn function(f: &MultiPoly) -> Self {
        let mut z = Self::zero(f.field(), f.nvars());
        for (e, c) in f.terms() {
            z.add_term(e.clone(), vec![0; f.nvars()], c);
        }
        z
    }

    fn check_cap(&self, b: &[u32]) -> Result<()> {
        let cap = self.dp_cap();
        if b.iter().any(|&q| q > cap) {
            return Err(Error::Capacity(format!(
                "divided-power index above the cap p^4 = {cap}"
            )));
        }
        Ok(())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms `(a, b, c)` meaning `c · x^a ∂^(b)`, in lexicographic order of `(a, b)`.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponent, &Exponent, u32)> {
        self.terms.iter().map(|((a, b), &c)| (a, b, c))
    }

    pub fn coeff(&self, a: &[u32], b: &[u32]) -> u32 {
        self.terms.get(&(a.to_vec(), b.to_vec())).copied().unwrap_or(0)
    }

    pub(crate) fn add_term(&mut self, a: Exponent, b: Exponent, c: u32) {
        let f = self.field;
        let c = c % f.p();
        if c == 0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((a, b)) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_compatible(&self, other: &DPDOperator) -> Result<()> {
        if self.nvars != other.nvars || self.field != other.field {
            return Err(Error::DimensionMismatch(format!(
                "operators in {} and {} variables",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &DPDOperator) -> Result<DPDOperator> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (a, b, c) in other.terms() {
            out.add_term(a.clone(), b.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, s: u32) -> DPDOperator {
        let mut out = Self::zero(self.field, self.nvars);
        for (a, b, c) in self.terms() {
            out.add_term(a.clone(), b.clone(), self.field.mul(c, s % self.field.p()));
        }
        out
    }

    pub fn neg(&self) -> DPDOperator {
        self.scale(self.field.p() - 1)
    }

    pub fn sub(&self, other: &DPDOperator) -> Result<DPDOperator> {
        self.add(&other.neg())
    }

    /// Normal-ordered product `self · other`.
    pub fn mul(&self, other: &DPDOperator) -> Result<DPDOperator> {
        self.check_compatible(other)?;
        let f = self.field;
        let mut out = Self::zero(f, self.nvars);
        for (a, b, c1) in self.terms() {
            for (cexp, d, c2) in other.terms() {
                let bound: Vec<u32> = b.iter().zip(cexp).map(|(&x, &y)| x.min(y)).collect();
                let base = f.mul(c1, c2);
                let mut err = None;
                for_each_below(&bound, |j| {
                    if err.is_some() {
                        return;
                    }
                    let mut coef = base;
                    for i in 0..self.nvars {
                        // ∂^(b_i) x^{c_i} contributes C(c_i, j_i) x^{c_i - j_i} ∂^(b_i - j_i);
                        // then ∂^(b_i - j_i) ∂^(d_i) = C(b_i - j_i + d_i, d_i) ∂^(…)
                        coef = f.mul(coef, f.binomial(cexp[i] as u64, j[i] as u64));
                        let rest = b[i] - j[i];
                        coef = f.mul(coef, f.binomial((rest + d[i]) as u64, d[i] as u64));
                        if coef == 0 {
                            return;
                        }
                    }
                    let na: Exponent = (0..self.nvars).map(|i| a[i] + cexp[i] - j[i]).collect();
                    let nb: Exponent = (0..self.nvars).map(|i| b[i] - j[i] + d[i]).collect();
                    if let Err(e) = out.check_cap(&nb).and_then(|_| check_exponent(&na)) {
                        err = Some(e);
                        return;
                    }
                    out.add_term(na, nb, coef);
                });
                if let Some(e) = err {
                    return Err(e);
                }
            }
        }
        Ok(out)
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &DPDOperator) -> Result<DPDOperator> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Action on polynomials: `∂^(q) x^m = C(m, q) x^{m-q}`.
    pub fn act(&self, g: &MultiPoly) -> Result<MultiPoly> {
        if g.nvars() != self.nvars || g.field() != self.field {
            return Err(Error::DimensionMismatch("operator and polynomial contexts differ".into()));
        }
        let f = self.field;
        let mut out = MultiPoly::zero(f, self.nvars);
        for (a, b, c) in self.terms() {
            for (m, cm) in g.terms() {
                if m.iter().zip(b).any(|(&mi, &bi)| mi < bi) {
                    continue;
                }
                let mut coef = f.mul(c, cm);
                for i in 0..self.nvars {
                    coef = f.mul(coef, f.binomial(m[i] as u64, b[i] as u64));
                }
                if coef == 0 {
                    continue;
                }
                let e: Exponent = (0..self.nvars).map(|i| a[i] + m[i] - b[i]).collect();
                check_exponent(&e)?;
                out.add_term(e, coef);
            }
        }
        Ok(out)
    }

    /// Order in the divided-power filtration: the largest `|b|` present.
    pub fn order(&self) -> u32 {
        self.terms().map(|(_, b, _)| b.iter().sum()).max().unwrap_or(0)
    }

    /// Check `[f_0, [f_1, …, [f_m, A]]] = 0` for all tuples of monomials of
    /// degree `1..=degree_bound`. Brackets are linear in each `f_k`, so
    /// monomials suffice.
    pub fn is_order_le(&self, m: u32, degree_bound: u32) -> Result<bool> {
        let monomials: Vec<DPDOperator> = exponents_up_to(self.nvars, degree_bound)
            .into_iter()
            .filter(|e| e.iter().any(|&k| k > 0))
            .map(|e| DPDOperator::function(&MultiPoly::monomial(self.field, e, 1)))
            .collect();
        // Brackets are linear, so it is enough to track a basis of each layer.
        let mut layer = vec![self.clone()];
        for _ in 0..=m {
            let mut next = SpanBasis::default();
            for op in &layer {
                for g in &monomials {
                    next.insert(g.commutator(op)?)?;
                }
            }
            if next.pivots.is_empty() {
                return Ok(true);
            }
            layer = next.pivots.into_values().collect();
        }
        Ok(false)
    }

    /// Smallest `r` with `[A, x_i^{p^r}] = 0` for every `i`.
    pub fn centrality_depth(&self) -> Result<u32> {
        for r in 0..=MAX_DEPTH {
            if self.is_central_at(r)? {
                return Ok(r);
            }
        }
        Err(Error::Capacity("centrality depth beyond the supported range".into()))
    }

    pub fn is_central_at(&self, r: u32) -> Result<bool> {
        let q = self.field.p().pow(r);
        for i in 0..self.nvars {
            let mut e = vec![0; self.nvars];
            e[i] = q;
            let g = DPDOperator::function(&MultiPoly::monomial(self.field, e, 1));
            if !self.commutator(&g)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Matrix of the operator on the free basis `{x^a : 0 ≤ a_i < p^r}` of
    /// `k[x]` over the depth-`r` twist subring, with entries truncated at
    /// total degree `degree_bound`.
    pub fn matrix_realize(&self, r: u32, degree_bound: u32) -> Result<MatrixRealization> {
        if !self.is_central_at(r)? {
            return Err(Error::NotCentral { depth: r });
        }
        let basis = free_basis(self.nvars, self.field.p().pow(r));
        let mut out = MatrixRealization::zero(self.field, self.nvars, r, degree_bound);
        for (col, a) in basis.iter().enumerate() {
            let image = self.act(&MultiPoly::monomial(self.field, a.clone(), 1))?;
            for (e, c) in image.terms() {
                let (row, twisted) = out.split_exponent(e);
                let entry = &mut out.entries[row * out.size + col];
                let mut t = entry.clone();
                t.add_term(twisted, c);
                *entry = t;
            }
        }
        for entry in out.entries.iter_mut() {
            let t = entry.truncate(degree_bound);
            out.truncated |= t.truncated;
            *entry = t.value;
        }
        Ok(out)
    }

    /// Compress by the idempotent `e` projecting `k[x]` onto the twist
    /// subring `k[y]`, `y_i = x_i^{p^r}`, along the monomial complement, and
    /// rewrite `e·self·e` as a divided-power operator in the `y` variables.
    ///
    /// The result is exact. The flag is set when certifying it would need
    /// inputs of degree above `degree_bound`.
    pub fn morita_compress(&self, r: u32, degree_bound: u32) -> Result<Truncated<DPDOperator>> {
        let f = self.field;
        let n = self.nvars;
        let q = f.p().pow(r);
        let twist = TwistSubring::new(f, r);
        // e·M·e evaluated on y^m, rewritten in y
        let compressed_action = |m: &[u32]| -> Result<MultiPoly> {
            let x_exp: Exponent = m.iter().map(|k| k * q).collect();
            let img = self.act(&MultiPoly::monomial(f, x_exp, 1))?;
            let mut out = MultiPoly::zero(f, n);
            for (e, c) in img.terms() {
                if e.iter().all(|&k| k % q == 0) {
                    out.add_term(e.iter().map(|k| k / q).collect(), c);
                }
            }
            Ok(out)
        };
        debug_assert!(twist.modulus() == q as u64);
        let order_bound = self.order();
        let mut inputs = exponents_up_to(n, order_bound);
        inputs.sort_by_key(|e| e.iter().sum::<u32>());
        let mut result = DPDOperator::zero(f, n);
        for m in &inputs {
            // residual L(y^m) − Σ_{b < m} c_{a,b} C(m,b) y^{a+m-b}
            let mut residual = compressed_action(m)?;
            let known = result.act(&MultiPoly::monomial(f, m.clone(), 1))?;
            residual = residual.sub(&known)?;
            for (a, c) in residual.terms() {
                result.add_term(a.clone(), m.clone(), c);
            }
        }
        // verify on the whole certified window
        let window = (degree_bound / q).max(order_bound);
        for m in exponents_up_to(n, window) {
            let lhs = compressed_action(&m)?;
            let rhs = result.act(&MultiPoly::monomial(f, m.clone(), 1))?;
            if lhs != rhs {
                return Err(Error::InvalidStructure(
                    "compressed operator is not a differential operator in the twisted variables".into(),
                ));
            }
        }
        Ok(Truncated {
            value: result,
            truncated: order_bound * q > degree_bound,
        })
    }

    /// Parse expressions such as `x1^2*d1^(3) - 2*d2 + 1`. Factors are
    /// multiplied left to right, so non-normal-ordered input is accepted.
    pub fn parse(field: PrimeField, nvars: usize, s: &str) -> Result<DPDOperator> {
        let mut out = Self::zero(field, nvars);
        for (sign, term) in split_signed_terms(s)? {
            let mut acc = Self::one(field, nvars).scale(field.reduce(sign));
            for factor in term.split('*').map(str::trim) {
                let op = if let Ok(c) = factor.parse::<i64>() {
                    Self::one(field, nvars).scale(field.reduce(c))
                } else {
                    let (sym, pow) = match factor.split_once('^') {
                        Some((v, k)) => (v.trim(), parse_uint(k)?),
                        None => (factor, 1),
                    };
                    if sym.starts_with('d') {
                        Self::divided_power(field, nvars, parse_var_index(sym, 'd', nvars)?, pow)?
                    } else {
                        let i = parse_var_index(sym, 'x', nvars)?;
                        let mut e = vec![0; nvars];
                        e[i] = pow;
                        Self::function(&MultiPoly::monomial(field, e, 1))
                    }
                };
                acc = acc.mul(&op)?;
            }
            out = out.add(&acc)?;
        }
        Ok(out)
    }
}

impl fmt::Display for DPDOperator {
    /// Terms in descending lexicographic order of `(a, b)`; divided powers
    /// render as `d1^(q)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .rev()
            .map(|(a, b, c)| {
                let mut s = String::new();
                let trivial = a.iter().chain(b).all(|&k| k == 0);
                if c != 1 || trivial {
                    s.push_str(&c.to_string());
                }
                render_monomial(&mut s, "x", a);
                for (i, &q) in b.iter().enumerate() {
                    if q > 0 {
                        if !s.is_empty() {
                            s.push('*');
                        }
                        s.push_str(&format!("d{}^({q})", i + 1));
                    }
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Echelon basis of a span of operators, keyed by leading term.
#[derive(Default)]
struct SpanBasis {
    pivots: BTreeMap<(Exponent, Exponent), DPDOperator>,
}

impl SpanBasis {
    fn insert(&mut self, mut v: DPDOperator) -> Result<()> {
        loop {
            let Some(((a, b), &c)) = v.terms.iter().next_back() else {
                return Ok(());
            };
            let key = (a.clone(), b.clone());
            match self.pivots.get(&key) {
                Some(piv) => v = v.sub(&piv.scale(c))?,
                None => {
                    let inv = v.field.inv(c);
                    self.pivots.insert(key, v.scale(inv));
                    return Ok(());
                }
            }
        }
    }
}

/// Exponents `a` with `0 ≤ a_i < q`, in lexicographic order.
pub fn free_basis(nvars: usize, q: u32) -> Vec<Exponent> {
    let mut out = Vec::new();
    let bound = vec![q - 1; nvars];
    for_each_below(&bound, |j| out.push(j.to_vec()));
    out.sort();
    out
}

/// Matrix of a depth-`r` central operator over the twist subring, with
/// polynomial entries (in the original variables, exponents divisible by
/// `p^r`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixRealization {
    pub field: PrimeField,
    pub nvars: usize,
    pub depth: u32,
    pub size: usize,
    pub degree_bound: u32,
    /// Basis exponents, lexicographic; column `k` is the image of `x^{basis[k]}`.
    pub basis: Vec<Exponent>,
    entries: Vec<MultiPoly>,
    pub truncated: bool,
}

impl MatrixRealization {
    fn zero(field: PrimeField, nvars: usize, depth: u32, degree_bound: u32) -> Self {
        let basis = free_basis(nvars, field.p().pow(depth));
        let size = basis.len();
        MatrixRealization {
            field,
            nvars,
            depth,
            size,
            degree_bound,
            basis,
            entries: vec![MultiPoly::zero(field, nvars); size * size],
            truncated: false,
        }
    }

    pub fn identity(field: PrimeField, nvars: usize, depth: u32, degree_bound: u32) -> Self {
        let mut m = Self::zero(field, nvars, depth, degree_bound);
        for i in 0..m.size {
            m.entries[i * m.size + i] = MultiPoly::one(field, nvars);
        }
        m
    }

    fn split_exponent(&self, e: &[u32]) -> (usize, Exponent) {
        let q = self.field.p().pow(self.depth);
        let rem: Exponent = e.iter().map(|k| k % q).collect();
        let twisted: Exponent = e.iter().map(|k| k - k % q).collect();
        let row = self.basis.binary_search(&rem).expect("remainder lies in the free basis");
        (row, twisted)
    }

    pub fn get(&self, row: usize, col: usize) -> &MultiPoly {
        &self.entries[row * self.size + col]
    }

    pub fn entries(&self) -> &[MultiPoly] {
        &self.entries
    }

    /// Product with entries truncated at the degree bound.
    pub fn mul(&self, other: &MatrixRealization) -> Result<MatrixRealization> {
        if self.size != other.size || self.depth != other.depth {
            return Err(Error::DimensionMismatch("realizations of different shape".into()));
        }
        let mut out = Self::zero(self.field, self.nvars, self.depth, self.degree_bound);
        out.truncated = self.truncated || other.truncated;
        let trunc = crate::poly::GradedTruncation::new(self.degree_bound);
        for i in 0..self.size {
            for j in 0..self.size {
                let mut acc = MultiPoly::zero(self.field, self.nvars);
                for k in 0..self.size {
                    let t = trunc.mul(self.get(i, k), other.get(k, j))?;
                    out.truncated |= t.truncated;
                    acc = acc.add(&t.value)?;
                }
                out.entries[i * self.size + j] = acc;
            }
        }
        Ok(out)
    }

    /// Largest entry degree; products stay exact while the sum of two such
    /// degrees is within the bound.
    pub fn max_entry_degree(&self) -> u32 {
        self.entries.iter().filter_map(|e| e.total_degree()).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn op(p: u32, s: &str) -> DPDOperator {
        DPDOperator::parse(field(p), 1, s).unwrap()
    }

    fn poly(p: u32, s: &str) -> MultiPoly {
        MultiPoly::parse(field(p), 1, s).unwrap()
    }

    #[test]
    fn product_examples() {
        assert!(op(2, "d1").mul(&op(2, "d1")).unwrap().is_zero());
        assert_eq!(op(3, "d1").mul(&op(3, "d1")).unwrap(), op(3, "2*d1^(2)"));
        assert_eq!(op(5, "d1^(2)*x1"), op(5, "x1*d1^(2) + d1"));
        assert_eq!(op(2, "d1^(2)*x1^2"), op(2, "x1^2*d1^(2) + 1"));
    }

    #[test]
    fn action_examples() {
        assert_eq!(op(2, "d1^(2)").act(&poly(2, "x^3")).unwrap(), poly(2, "x"));
        for q in 0..12 {
            let d = DPDOperator::divided_power(field(3), 1, 0, q).unwrap();
            let xq = MultiPoly::monomial(field(3), vec![q], 1);
            assert_eq!(d.act(&xq).unwrap(), MultiPoly::one(field(3), 1));
        }
        assert!(op(2, "d1").act(&poly(2, "x^2")).unwrap().is_zero());
    }

    #[test]
    fn commutator_examples() {
        assert!(op(3, "x1").commutator(&op(3, "x1^2")).unwrap().is_zero());
        assert_eq!(op(7, "d1^(2)").commutator(&op(7, "x1")).unwrap(), op(7, "d1"));
        assert_eq!(op(2, "d1^(2)").commutator(&op(2, "x1^2")).unwrap(), op(2, "1"));
    }

    #[test]
    fn order_examples() {
        let a = op(3, "x1^3");
        assert_eq!(a.order(), 0);
        assert!(a.is_order_le(0, 4).unwrap());
        let b = op(2, "d1^(2)");
        assert_eq!(b.order(), 2);
        assert!(b.is_order_le(2, 4).unwrap());
        assert!(!b.is_order_le(1, 4).unwrap());
        let c = op(5, "x1*d1 + d1^(3)");
        assert_eq!(c.order(), 3);
        assert!(c.is_order_le(3, 4).unwrap());
        assert!(!c.is_order_le(2, 4).unwrap());
    }

    #[test]
    fn centrality_examples() {
        assert_eq!(op(2, "d1").centrality_depth().unwrap(), 1);
        assert_eq!(op(2, "x1^3 + x1").centrality_depth().unwrap(), 0);
        assert_eq!(op(2, "d1^(2)").centrality_depth().unwrap(), 2);
        assert!(!op(2, "d1^(2)").commutator(&op(2, "x1^2")).unwrap().is_zero());
        assert!(op(2, "d1^(2)").commutator(&op(2, "x1^4")).unwrap().is_zero());
    }

    #[test]
    fn realization_examples() {
        let t = op(2, "x1").matrix_realize(1, 8).unwrap();
        assert_eq!(t.size, 2);
        assert!(t.get(0, 0).is_zero());
        assert_eq!(t.get(0, 1), &poly(2, "x^2"));
        assert_eq!(t.get(1, 0), &poly(2, "1"));
        assert!(t.get(1, 1).is_zero());
        for e in t.entries() {
            assert!(e.twist_membership(1));
        }

        let one = op(3, "1").matrix_realize(1, 4).unwrap();
        assert_eq!(one, MatrixRealization::identity(field(3), 1, 1, 4));

        let d = op(2, "d1").matrix_realize(1, 4).unwrap();
        assert_eq!(d.get(0, 1), &poly(2, "1"));
        assert!(d.get(0, 0).is_zero() && d.get(1, 0).is_zero() && d.get(1, 1).is_zero());

        assert_eq!(
            op(2, "d1^(2)").matrix_realize(1, 4),
            Err(Error::NotCentral { depth: 1 })
        );
    }

    #[test]
    fn compression_examples() {
        let c = op(2, "x1^2").morita_compress(1, 8).unwrap();
        assert_eq!(c.value, op(2, "x1"));
        let c = op(2, "d1^(2)").morita_compress(1, 8).unwrap();
        assert_eq!(c.value, op(2, "d1"));
        assert!(!c.truncated);
        assert!(op(2, "d1").morita_compress(1, 8).unwrap().value.is_zero());
        assert!(op(2, "d1^(4)").morita_compress(1, 2).unwrap().truncated);
    }

    #[test]
    fn capacity_error() {
        let cap = 2u32.pow(4);
        let a = DPDOperator::divided_power(field(2), 1, 0, cap).unwrap();
        let b = DPDOperator::divided_power(field(2), 1, 0, 1).unwrap();
        // C(17, 1) ≡ 1 mod 2: a genuine term above the cap
        assert!(a.mul(&a).unwrap().is_zero());
        assert!(matches!(a.mul(&b), Err(Error::Capacity(_))));
        assert!(DPDOperator::divided_power(field(2), 1, 0, cap + 1).is_err());
    }

    #[test]
    fn display_and_parse() {
        let a = DPDOperator::parse(field(5), 2, "3*x1^2*d2^(4) + x2*d1 + 2").unwrap();
        assert_eq!(a.to_string(), "3*x1^2*d2^(4) + x2*d1^(1) + 2");
        assert_eq!(DPDOperator::parse(field(5), 2, &a.to_string()).unwrap(), a);
        assert!(DPDOperator::parse(field(5), 2, "d3").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_op(p: u32, nvars: usize, max_a: u32, max_b: u32) -> impl Strategy<Value = DPDOperator> {
            prop::collection::vec(
                (
                    prop::collection::vec(0..=max_a, nvars),
                    prop::collection::vec(0..=max_b, nvars),
                    1..p,
                ),
                0..4,
            )
            .prop_map(move |ts| {
                let mut o = DPDOperator::zero(field(p), nvars);
                for (a, b, c) in ts {
                    o.add_term(a, b, c);
                }
                o
            })
        }

        fn arb_case() -> impl Strategy<Value = (u32, DPDOperator, DPDOperator, DPDOperator)> {
            (prop::sample::select(vec![2u32, 3, 5]), 1usize..=2).prop_flat_map(|(p, n)| {
                (
                    Just(p),
                    arb_op(p, n, 4, 5),
                    arb_op(p, n, 4, 5),
                    arb_op(p, n, 4, 5),
                )
            })
        }

        proptest! {
            #[test]
            fn associative((_p, a, b, c) in arb_case()) {
                let l = a.mul(&b).unwrap().mul(&c).unwrap();
                let r = a.mul(&b.mul(&c).unwrap()).unwrap();
                prop_assert_eq!(l, r);
            }

            #[test]
            fn action_is_a_module_structure((p, a, b, _c) in arb_case(), m in prop::collection::vec(0u32..12, 2)) {
                let n = a.nvars();
                let g = MultiPoly::monomial(field(p), m[..n].to_vec(), 1);
                let lhs = a.mul(&b).unwrap().act(&g).unwrap();
                let rhs = a.act(&b.act(&g).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn order_filtration((_p, a, b, _c) in arb_case()) {
                let ab = a.mul(&b).unwrap();
                prop_assert!(ab.order() <= a.order() + b.order());
                // commutator drops the order for functions against anything
                let x = DPDOperator::coordinate(a.field(), a.nvars(), 0);
                let c = x.commutator(&a).unwrap();
                prop_assert!(c.is_zero() || c.order() < a.order());
            }

            #[test]
            fn order_criteria_agree((p, a, _b, _c) in arb_case()) {
                let ord = a.order();
                // ad(fg) = f·ad(g) + ad(f)·g, so low-degree monomials already detect the order
                let bound = 2;
                if ord > 0 {
                    prop_assert!(!a.is_order_le(ord - 1, bound).unwrap(), "p={} a={}", p, a);
                }
                prop_assert!(a.is_order_le(ord, bound).unwrap());
            }

            #[test]
            fn centrality_matches_divided_powers((p, a, _b, _c) in arb_case()) {
                // [∂^(b), x^{p^r}] vanishes exactly when every b_i < p^r
                let depth = a.centrality_depth().unwrap();
                let max_b = a.terms().flat_map(|(_, b, _)| b.iter().copied()).max().unwrap_or(0);
                let expected = (0..=MAX_DEPTH).find(|&r| max_b < p.pow(r)).unwrap();
                prop_assert_eq!(depth, expected);
            }

            #[test]
            fn realization_is_multiplicative((p, a, b, _c) in arb_case()) {
                let r = a.centrality_depth().unwrap().max(b.centrality_depth().unwrap()).max(1);
                prop_assume!(p.pow(r) <= 9 && a.nvars() == 1 || p.pow(r) <= 3);
                let d = 60;
                let ma = a.matrix_realize(r, d).unwrap();
                let mb = b.matrix_realize(r, d).unwrap();
                let mab = a.mul(&b).unwrap().matrix_realize(r, d).unwrap();
                let prod = ma.mul(&mb).unwrap();
                prop_assert!(!ma.truncated && !mb.truncated && !prod.truncated);
                prop_assert_eq!(prod.entries(), mab.entries());
            }

            #[test]
            fn compression_is_multiplicative_on_twisted_operators((p, a, b, _c) in arb_case()) {
                // operators commuting with x^p preserve the twist subring, so e·A·e composes
                let twisted = |o: &DPDOperator| {
                    let mut t = DPDOperator::zero(o.field(), o.nvars());
                    for (x, y, c) in o.terms() {
                        t.add_term(x.iter().map(|k| k * p).collect(), y.iter().map(|k| k * p).collect(), c);
                    }
                    t
                };
                let (ta, tb) = (twisted(&a), twisted(&b));
                prop_assume!(ta.terms().all(|(_, y, _)| y.iter().all(|&k| k <= ta.dp_cap())));
                prop_assume!(tb.terms().all(|(_, y, _)| y.iter().all(|&k| k <= tb.dp_cap())));
                let Ok(tab) = ta.mul(&tb) else { return Ok(()); };
                let ca = ta.morita_compress(1, 0).unwrap().value;
                let cb = tb.morita_compress(1, 0).unwrap().value;
                let cab = tab.morita_compress(1, 0).unwrap().value;
                prop_assert_eq!(ca.mul(&cb).unwrap(), cab);
            }
        }
    }
}
