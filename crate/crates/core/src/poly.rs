//! Sparse multivariate polynomials over `F_p`, Frobenius twists and graded
//! truncation.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::gfp::PrimeField;

pub const MAX_VARS: usize = 8;
pub const MAX_EXPONENT: u32 = 1 << 16;

pub type Exponent = Vec<u32>;

/// Polynomial in `nvars` variables, keyed by exponent vector. Zero
/// coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    field: PrimeField,
    nvars: usize,
    terms: BTreeMap<Exponent, u32>,
}

/// A value together with a flag recording whether terms above a degree bound
/// were discarded while computing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Truncated<T> {
    pub value: T,
    pub truncated: bool,
}

pub(crate) fn check_exponent(e: &[u32]) -> Result<()> {
    if e.iter().any(|&x| x > MAX_EXPONENT) {
        return Err(Error::Capacity(format!("exponent above {MAX_EXPONENT}")));
    }
    Ok(())
}

impl MultiPoly {
    pub fn zero(field: PrimeField, nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables");
        MultiPoly {
            field,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: PrimeField, nvars: usize, c: u32) -> Self {
        Self::monomial(field, vec![0; nvars], c)
    }

    pub fn one(field: PrimeField, nvars: usize) -> Self {
        Self::constant(field, nvars, 1)
    }

    pub fn monomial(field: PrimeField, exps: Exponent, c: u32) -> Self {
        let mut f = Self::zero(field, exps.len());
        f.add_term(exps, c);
        f
    }

    /// The coordinate `x_i` (0-based).
    pub fn var(field: PrimeField, nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(field, e, 1)
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

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponent, u32)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &[u32]) -> u32 {
        self.terms.get(e).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, e: Exponent, c: u32) {
        assert_eq!(e.len(), self.nvars);
        let c = c % self.field.p();
        if c == 0 {
            return;
        }
        let f = self.field;
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    fn check_compatible(&self, other: &MultiPoly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch(format!(
                "polynomials in {} and {} variables",
                self.nvars, other.nvars
            )));
        }
        if self.field != other.field {
            return Err(Error::DimensionMismatch("polynomials over different fields".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> MultiPoly {
        self.scale(self.field.p() - 1)
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: u32) -> MultiPoly {
        let mut out = Self::zero(self.field, self.nvars);
        for (e, c) in self.terms() {
            out.add_term(e.clone(), self.field.mul(c, s % self.field.p()));
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.field, self.nvars);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                let e: Exponent = a.iter().zip(b).map(|(x, y)| x + y).collect();
                check_exponent(&e)?;
                out.add_term(e, self.field.mul(ca, cb));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<MultiPoly> {
        let mut acc = Self::one(self.field, self.nvars);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `f ↦ f^p`: exponents scaled by `p`, coefficients raised to the p-th
    /// power.
    pub fn frobenius_map(&self) -> Result<MultiPoly> {
        let f = self.field;
        let mut out = Self::zero(f, self.nvars);
        for (e, c) in self.terms() {
            let e: Exponent = e.iter().map(|x| x * f.p()).collect();
            check_exponent(&e)?;
            out.add_term(e, f.frobenius(c));
        }
        Ok(out)
    }

    /// True iff every exponent is divisible by `p^r`.
    pub fn twist_membership(&self, r: u32) -> bool {
        TwistSubring::new(self.field, r).contains(self)
    }

    /// Discard terms of total degree above `bound`.
    pub fn truncate(&self, bound: u32) -> Truncated<MultiPoly> {
        let mut value = Self::zero(self.field, self.nvars);
        let mut truncated = false;
        for (e, c) in self.terms() {
            if e.iter().sum::<u32>() <= bound {
                value.terms.insert(e.clone(), c);
            } else {
                truncated = true;
            }
        }
        Truncated { value, truncated }
    }

    /// Evaluate at a point of `F_p^n`.
    pub fn eval(&self, point: &[u32]) -> u32 {
        let f = self.field;
        self.terms().fold(0, |acc, (e, c)| {
            let m = e
                .iter()
                .zip(point)
                .fold(c, |m, (&k, &x)| f.mul(m, f.pow(x, k as u64)));
            f.add(acc, m)
        })
    }

    /// Parse `2*x1^3*x2 + x1 - 1`. Variables are `x1 … xn`; `x` alone means
    /// `x1`.
    pub fn parse(field: PrimeField, nvars: usize, s: &str) -> Result<MultiPoly> {
        let mut out = Self::zero(field, nvars);
        for (sign, term) in split_signed_terms(s)? {
            let mut coeff = field.reduce(sign);
            let mut e = vec![0u32; nvars];
            for factor in term.split('*').map(str::trim) {
                if let Ok(n) = factor.parse::<i64>() {
                    coeff = field.mul(coeff, field.reduce(n));
                    continue;
                }
                let (var, pow) = match factor.split_once('^') {
                    Some((v, k)) => (v.trim(), parse_uint(k)?),
                    None => (factor, 1),
                };
                let idx = parse_var_index(var, 'x', nvars)?;
                e[idx] += pow;
            }
            check_exponent(&e)?;
            out.add_term(e, coeff);
        }
        Ok(out)
    }
}

pub(crate) fn parse_uint(s: &str) -> Result<u32> {
    s.trim()
        .trim_start_matches('(')
        .trim_end_matches(')')
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad exponent `{s}`")))
}

pub(crate) fn parse_var_index(var: &str, prefix: char, nvars: usize) -> Result<usize> {
    let rest = var
        .strip_prefix(prefix)
        .ok_or_else(|| Error::Parse(format!("unknown symbol `{var}`")))?;
    let idx = if rest.is_empty() {
        1
    } else {
        rest.parse::<usize>()
            .map_err(|_| Error::Parse(format!("unknown symbol `{var}`")))?
    };
    if idx == 0 || idx > nvars {
        return Err(Error::Parse(format!("variable `{var}` out of range")));
    }
    Ok(idx - 1)
}

/// Split `a - b + c` into signed terms, ignoring signs inside parentheses.
pub(crate) fn split_signed_terms(s: &str) -> Result<Vec<(i64, String)>> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut sign = 1i64;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                cur.push(ch);
            }
            '+' | '-' if depth == 0 => {
                if !cur.trim().is_empty() {
                    out.push((sign, cur.trim().to_string()));
                }
                cur.clear();
                sign = if ch == '-' { -1 } else { 1 };
            }
            _ => cur.push(ch),
        }
    }
    if cur.trim().is_empty() {
        return Err(Error::Parse(format!("dangling sign in `{s}`")));
    }
    out.push((sign, cur.trim().to_string()));
    if out.len() == 1 && out[0].1 == "0" {
        return Ok(Vec::new());
    }
    Ok(out)
}

pub(crate) fn render_monomial(out: &mut String, prefix: &str, e: &[u32]) {
    for (i, &k) in e.iter().enumerate() {
        if k == 0 {
            continue;
        }
        if !out.is_empty() && !out.ends_with(' ') {
            out.push('*');
        }
        out.push_str(&format!("{prefix}{}", i + 1));
        if k > 1 {
            out.push_str(&format!("^{k}"));
        }
    }
}

impl fmt::Display for MultiPoly {
    /// Terms in descending lexicographic order of exponent vectors.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .rev()
            .map(|(e, c)| {
                let mut s = String::new();
                if c != 1 || e.iter().all(|&k| k == 0) {
                    s.push_str(&c.to_string());
                }
                render_monomial(&mut s, "x", e);
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The subring `k[x_1^{p^r}, …, x_n^{p^r}]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwistSubring {
    pub field: PrimeField,
    pub depth: u32,
}

impl TwistSubring {
    pub fn new(field: PrimeField, depth: u32) -> Self {
        TwistSubring { field, depth }
    }

    pub fn modulus(&self) -> u64 {
        (self.field.p() as u64).pow(self.depth)
    }

    pub fn contains(&self, f: &MultiPoly) -> bool {
        let q = self.modulus();
        f.terms().all(|(e, _)| e.iter().all(|&k| k as u64 % q == 0))
    }

    /// Monomial basis of the subring up to total degree `bound`, in
    /// lexicographic order.
    pub fn basis_up_to(&self, nvars: usize, bound: u32) -> Vec<MultiPoly> {
        let q = self.modulus() as u32;
        exponents_up_to(nvars, bound / q)
            .into_iter()
            .map(|e| MultiPoly::monomial(self.field, e.iter().map(|k| k * q).collect(), 1))
            .collect()
    }
}

/// All exponent vectors of length `n` with total degree ≤ `bound`, in
/// lexicographic order.
pub fn exponents_up_to(n: usize, bound: u32) -> Vec<Exponent> {
    fn rec(n: usize, bound: u32, prefix: &mut Vec<u32>, out: &mut Vec<Exponent>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for k in 0..=bound {
            prefix.push(k);
            rec(n, bound - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, bound, &mut Vec::new(), &mut out);
    out
}

/// Polynomial arithmetic with a hard degree bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GradedTruncation {
    pub degree_bound: u32,
}

impl GradedTruncation {
    pub fn new(degree_bound: u32) -> Self {
        GradedTruncation { degree_bound }
    }

    pub fn apply(&self, f: &MultiPoly) -> Truncated<MultiPoly> {
        f.truncate(self.degree_bound)
    }

    pub fn mul(&self, f: &MultiPoly, g: &MultiPoly) -> Result<Truncated<MultiPoly>> {
        f.check_compatible(g)?;
        let mut value = MultiPoly::zero(f.field, f.nvars);
        let mut truncated = false;
        for (a, ca) in f.terms() {
            for (b, cb) in g.terms() {
                let e: Exponent = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if e.iter().sum::<u32>() > self.degree_bound {
                    truncated = true;
                    continue;
                }
                value.add_term(e, f.field.mul(ca, cb));
            }
        }
        Ok(Truncated { value, truncated })
    }
}
