//! Prime-field arithmetic, Lucas binomials and Frobenius-semilinear maps.
//!
//! Residues are stored as `u32` in `[0, p)`; a [`PrimeField`] is a small
//! `Copy` context carrying the modulus. [`FpScalar`] bundles a residue with
//! its field for code that wants operator overloading.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{FpMatrix, Subspace};

/// Largest supported characteristic.
pub const MAX_PRIME: u32 = 97;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeField {
    p: u32,
}

impl TryFrom<u32> for PrimeField {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        PrimeField::new(p)
    }
}

impl From<PrimeField> for u32 {
    fn from(f: PrimeField) -> u32 {
        f.p
    }
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p > MAX_PRIME {
            return Err(Error::PrimeTooLarge(p));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        (a * b) % self.p
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a % self.p != 0, "inverse of zero in F_{}", self.p);
        self.pow(a, (self.p - 2) as u64)
    }

    /// The absolute Frobenius `x ↦ x^p`. Trivial on a prime field, but every
    /// semilinear computation routes through here.
    #[inline]
    pub fn frobenius(&self, a: u32) -> u32 {
        self.pow(a, self.p as u64)
    }

    pub fn scalar(&self, v: i64) -> FpScalar {
        FpScalar {
            value: self.reduce(v),
            field: *self,
        }
    }

    pub fn zero(&self) -> FpScalar {
        self.scalar(0)
    }

    pub fn one(&self) -> FpScalar {
        self.scalar(1)
    }

    /// `C(m, q) mod p` via Lucas' theorem, digit by digit in base p.
    pub fn binomial(&self, mut m: u64, mut q: u64) -> u32 {
        let p = self.p as u64;
        let mut acc = 1u32;
        while q > 0 || m > 0 {
            let (md, qd) = (m % p, q % p);
            if qd > md {
                return 0;
            }
            acc = self.mul(acc, small_binomial(md, qd, self));
            m /= p;
            q /= p;
        }
        acc
    }
}

// C(m, q) mod p for m < p, by the multiplicative formula.
fn small_binomial(m: u64, q: u64, f: &PrimeField) -> u32 {
    let q = q.min(m - q);
    let mut num = 1u32;
    let mut den = 1u32;
    for i in 0..q {
        num = f.mul(num, ((m - i) % f.p as u64) as u32);
        den = f.mul(den, ((i + 1) % f.p as u64) as u32);
    }
    f.mul(num, f.inv(den))
}

/// `C(m, q) mod p` as a scalar.
pub fn lucas_binomial(m: u64, q: u64, p: u32) -> Result<FpScalar> {
    let f = PrimeField::new(p)?;
    Ok(FpScalar {
        value: f.binomial(m, q),
        field: f,
    })
}

/// An element of `F_p` together with its field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpScalar {
    value: u32,
    field: PrimeField,
}

impl FpScalar {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn inv(&self) -> Option<FpScalar> {
        (!self.is_zero()).then(|| FpScalar {
            value: self.field.inv(self.value),
            field: self.field,
        })
    }

    pub fn pow(&self, e: u64) -> FpScalar {
        FpScalar {
            value: self.field.pow(self.value, e),
            field: self.field,
        }
    }

    fn check(&self, rhs: &FpScalar) {
        assert_eq!(self.field, rhs.field, "mixing scalars from different fields");
    }
}

impl fmt::Display for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FpScalar {
    type Output = FpScalar;
    fn add(self, rhs: FpScalar) -> FpScalar {
        self.check(&rhs);
        FpScalar {
            value: self.field.add(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl Sub for FpScalar {
    type Output = FpScalar;
    fn sub(self, rhs: FpScalar) -> FpScalar {
        self.check(&rhs);
        FpScalar {
            value: self.field.sub(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl Mul for FpScalar {
    type Output = FpScalar;
    fn mul(self, rhs: FpScalar) -> FpScalar {
        self.check(&rhs);
        FpScalar {
            value: self.field.mul(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl Div for FpScalar {
    type Output = FpScalar;
    fn div(self, rhs: FpScalar) -> FpScalar {
        self * rhs.inv().expect("division by zero")
    }
}

impl Neg for FpScalar {
    type Output = FpScalar;
    fn neg(self) -> FpScalar {
        FpScalar {
            value: self.field.neg(self.value),
            field: self.field,
        }
    }
}

/// A p-semilinear endomorphism `F(λv) = λ^p F(v)` of `k^n`.
///
/// Convention: `F(v) = A · v^(p)`, i.e. coordinates are raised to the p-th
/// power entry-wise first and then multiplied by the stored matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemilinearMap {
    matrix: FpMatrix,
}

/// Splitting of a space under a semilinear map into the part where it acts
/// nilpotently and the part where it acts bijectively.
#[derive(Debug, Clone)]
pub struct FittingDecomposition {
    pub nilpotent: Subspace,
    pub semisimple: Subspace,
}

impl SemilinearMap {
    pub fn new(matrix: FpMatrix) -> Result<Self> {
        if matrix.rows() != matrix.cols() {
            return Err(Error::DimensionMismatch(format!(
                "semilinear map needs a square matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(SemilinearMap { matrix })
    }

    pub fn matrix(&self) -> &FpMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn field(&self) -> PrimeField {
        self.matrix.field()
    }

    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        let f = self.field();
        let twisted: Vec<u32> = v.iter().map(|&x| f.frobenius(x)).collect();
        self.matrix.mul_vec(&twisted)
    }

    /// Matrix of the linear map underlying `F^k`: `A · σ(A) · … · σ^{k-1}(A)`
    /// where `σ` twists entries by the p-th power. `F^k(v) = M · σ^k(v)`.
    pub fn iterate_matrix(&self, k: usize) -> FpMatrix {
        let f = self.field();
        let mut acc = FpMatrix::identity(f, self.dim());
        let mut twisted = self.matrix.clone();
        for _ in 0..k {
            acc = acc.mul(&twisted);
            twisted = twisted.map(|x| f.frobenius(x));
        }
        acc
    }

    /// `H_n = ker F^N`, `H_s = im F^N` with `N = dim`.
    pub fn fitting_decomposition(&self) -> FittingDecomposition {
        let n = self.dim();
        let power = self.iterate_matrix(n);
        let rki = power.rank_kernel_image();
        let f = self.field();
        // σ^N is a bijection of coordinates, so the kernel of F^N is the
        // σ^{-N}-preimage of ker(M); over F_p that is ker(M) itself.
        FittingDecomposition {
            nilpotent: Subspace::from_basis(f, n, rki.kernel),
            semisimple: Subspace::from_basis(f, n, rki.image),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial_binomial_mod(m: u64, q: u64, p: u64) -> u64 {
        if q > m {
            return 0;
        }
        // exact binomial in u128 via Pascal rows, fine for m <= 64
        let mut row = vec![1u128];
        for _ in 0..m {
            let mut next = vec![1u128; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            row = next;
        }
        (row[q as usize] % p as u128) as u64
    }

    #[test]
    fn rejects_non_primes_and_large_primes() {
        assert_eq!(PrimeField::new(4), Err(Error::NotPrime(4)));
        assert_eq!(PrimeField::new(1), Err(Error::NotPrime(1)));
        assert_eq!(PrimeField::new(101), Err(Error::PrimeTooLarge(101)));
        assert!(PrimeField::new(97).is_ok());
    }

    #[test]
    fn lucas_examples() {
        assert_eq!(lucas_binomial(3, 2, 2).unwrap().value(), 1);
        assert_eq!(lucas_binomial(5, 2, 2).unwrap().value(), 0);
        for p in [2, 3, 5, 7] {
            for q in 0..30 {
                assert_eq!(lucas_binomial(q, q, p).unwrap().value(), 1);
            }
        }
        assert!(lucas_binomial(3, 2, 6).is_err());
    }

    #[test]
    fn lucas_matches_factorial_oracle() {
        for p in [2u32, 3, 5, 7, 11] {
            let f = PrimeField::new(p).unwrap();
            for m in 0..=64u64 {
                for q in 0..=64u64 {
                    assert_eq!(
                        f.binomial(m, q) as u64,
                        factorial_binomial_mod(m, q, p as u64),
                        "C({m},{q}) mod {p}"
                    );
                }
            }
        }
    }

    #[test]
    fn fitting_examples() {
        let f = PrimeField::new(5).unwrap();
        let id = SemilinearMap::new(FpMatrix::identity(f, 2)).unwrap();
        let d = id.fitting_decomposition();
        assert_eq!((d.nilpotent.dim(), d.semisimple.dim()), (0, 2));

        let zero = SemilinearMap::new(FpMatrix::zeros(f, 2, 2)).unwrap();
        let d = zero.fitting_decomposition();
        assert_eq!((d.nilpotent.dim(), d.semisimple.dim()), (2, 0));

        let diag = SemilinearMap::new(FpMatrix::from_rows(f, &[vec![1, 0], vec![0, 0]])).unwrap();
        let d = diag.fitting_decomposition();
        assert_eq!((d.nilpotent.dim(), d.semisimple.dim()), (1, 1));
    }

    #[test]
    fn semilinear_rejects_rectangular() {
        let f = PrimeField::new(3).unwrap();
        assert!(SemilinearMap::new(FpMatrix::zeros(f, 2, 3)).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn field() -> impl Strategy<Value = PrimeField> {
            prop::sample::select(vec![2u32, 3, 5, 7, 13, 97]).prop_map(|p| PrimeField::new(p).unwrap())
        }

        proptest! {
            #[test]
            fn field_axioms(f in field(), a in 0i64..1000, b in 0i64..1000, c in 0i64..1000) {
                let (a, b, c) = (f.scalar(a), f.scalar(b), f.scalar(c));
                prop_assert_eq!(a + b, b + a);
                prop_assert_eq!(a * b, b * a);
                prop_assert_eq!((a + b) + c, a + (b + c));
                prop_assert_eq!((a * b) * c, a * (b * c));
                prop_assert_eq!(a * (b + c), a * b + a * c);
                prop_assert_eq!(a + f.zero(), a);
                prop_assert_eq!(a * f.one(), a);
                prop_assert_eq!(a + (-a), f.zero());
                prop_assert_eq!(a - b + b, a);
                if let Some(ai) = a.inv() {
                    prop_assert_eq!(a * ai, f.one());
                    prop_assert_eq!(b / a * a, b);
                }
            }

            #[test]
            fn semilinearity(
                f in field(),
                entries in prop::collection::vec(0u32..97, 9),
                v in prop::collection::vec(0u32..97, 3),
                lambda in 0u32..97,
            ) {
                let m = FpMatrix::new(f, 3, 3, entries.iter().map(|x| x % f.p()).collect()).unwrap();
                let map = SemilinearMap::new(m).unwrap();
                let v: Vec<u32> = v.iter().map(|x| x % f.p()).collect();
                let lambda = lambda % f.p();
                let scaled: Vec<u32> = v.iter().map(|&x| f.mul(lambda, x)).collect();
                let lhs = map.apply(&scaled);
                let lp = f.frobenius(lambda);
                let rhs: Vec<u32> = map.apply(&v).iter().map(|&x| f.mul(lp, x)).collect();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn fitting_properties(
                f in prop::sample::select(vec![2u32, 3, 5]).prop_map(|p| PrimeField::new(p).unwrap()),
                n in 1usize..5,
                seed in prop::collection::vec(0u32..5, 16),
            ) {
                let entries: Vec<u32> = seed.iter().take(n * n).map(|x| x % f.p()).collect();
                let m = FpMatrix::new(f, n, n, entries).unwrap();
                let map = SemilinearMap::new(m).unwrap();
                let d = map.fitting_decomposition();
                prop_assert_eq!(d.nilpotent.dim() + d.semisimple.dim(), n);
                prop_assert!(d.nilpotent.intersect(&d.semisimple).dim() == 0);
                // F-stability and bijectivity on H_s
                let images: Vec<Vec<u32>> = d.semisimple.basis().iter().map(|v| map.apply(v)).collect();
                let img = Subspace::from_basis(f, n, images);
                prop_assert_eq!(img.dim(), d.semisimple.dim());
                prop_assert!(d.semisimple.contains_subspace(&img));
                // F^n kills H_n
                for v in d.nilpotent.basis() {
                    let mut w = v.clone();
                    for _ in 0..n { w = map.apply(&w); }
                    prop_assert!(w.iter().all(|&x| x == 0));
                    prop_assert!(d.nilpotent.contains(&map.apply(v)));
                }
            }
        }
    }
}
