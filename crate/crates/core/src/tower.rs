//! Inverse systems of finite-dimensional spaces and their derived limits.
//!
//! A finite tower `M_0 ← M_1 ← … ← M_R` is resolved by the two-term complex
//! `Π_{r≤R} M_r → Π_{r<R} M_r`, `(x_r) ↦ (x_r − f_r(x_{r+1}))`. The last
//! transition has no target and is dropped, so for a finite tower the map is
//! onto: the raw `lim¹` vanishes and the raw `lim` is isomorphic to `M_R`.
//! What the window says about the infinite tower it truncates is recorded
//! per degree by a [`DegreeCertificate`]; uncertified degrees are reported
//! but never asserted.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::dpdo::DPDOperator;
use crate::error::{Error, Result};
use crate::gfp::{PrimeField, SemilinearMap};
use crate::gs::laurent::LaurentOp;
use crate::gs::{CoverModel, SubalgebraModel};
use crate::linalg::{FpMatrix, Subspace};
use crate::poly::{MultiPoly, TwistSubring};

/// Longest tower accepted by the scenario builders.
pub const MAX_TOWER_DEPTH: u32 = 6;

/// `M_0 ← M_1 ← … ← M_R` with `maps[r]: M_{r+1} → M_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tower {
    field: PrimeField,
    dims: Vec<usize>,
    maps: Vec<FpMatrix>,
    degrees: Vec<Vec<i64>>,
    periodic: bool,
    permanent: BTreeSet<i64>,
}

/// Why a degree of a finite tower determines the infinite one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// Every stage is hit by the zero map from some later stage in the
    /// window; zero images stay zero, so `lim = lim¹ = 0`.
    Vanishing,
    /// The tower iterates one endomorphism and the ranks of its powers are
    /// stationary inside the window.
    Periodic,
    /// The caller has shown the degree continues by identities beyond `R`,
    /// and the window maps it injectively to `M_0`.
    Permanent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeCertificate {
    pub degree: i64,
    pub lim_dim: usize,
    pub lim1_dim: usize,
    /// Stage after which the images are stationary.
    pub stage: Option<usize>,
    pub kind: Option<CertificateKind>,
}

impl DegreeCertificate {
    pub fn certified(&self) -> bool {
        self.kind.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimResult {
    /// Image of `M_R` in `M_0`; for certified degrees this is the
    /// projection of the infinite `lim`, which is injective.
    pub lim_basis: Vec<Vec<u32>>,
    pub kernel_dim: usize,
    pub lim1_dim: usize,
    pub certificates: Vec<DegreeCertificate>,
}

impl LimResult {
    pub fn certified(&self) -> bool {
        self.certificates.iter().all(DegreeCertificate::certified)
    }

    pub fn lim_dim(&self) -> usize {
        self.certificates.iter().map(|c| c.lim_dim).sum()
    }

    pub fn certificate(&self, degree: i64) -> Option<&DegreeCertificate> {
        self.certificates.iter().find(|c| c.degree == degree)
    }
}

impl Tower {
    pub fn new(field: PrimeField, dims: Vec<usize>, maps: Vec<FpMatrix>) -> Result<Self> {
        let degrees = dims.iter().map(|&n| vec![0; n]).collect();
        Self::graded(field, degrees, maps)
    }

    /// A tower whose basis vectors carry degrees; maps must preserve them.
    pub fn graded(field: PrimeField, degrees: Vec<Vec<i64>>, maps: Vec<FpMatrix>) -> Result<Self> {
        if degrees.is_empty() || maps.len() + 1 != degrees.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} stages need {} maps, got {}",
                degrees.len(),
                degrees.len().saturating_sub(1),
                maps.len()
            )));
        }
        let dims: Vec<usize> = degrees.iter().map(Vec::len).collect();
        for (r, m) in maps.iter().enumerate() {
            if m.rows() != dims[r] || m.cols() != dims[r + 1] {
                return Err(Error::DimensionMismatch(format!(
                    "map {r} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    dims[r],
                    dims[r + 1]
                )));
            }
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    if m.get(i, j) != 0 && degrees[r][i] != degrees[r + 1][j] {
                        return Err(Error::InvalidStructure(format!("map {r} does not preserve degrees")));
                    }
                }
            }
        }
        Ok(Tower {
            field,
            dims,
            maps,
            degrees,
            periodic: false,
            permanent: BTreeSet::new(),
        })
    }

    /// `M ← M ← ⋯ ← M` (depth `R`) with every transition equal to `m`.
    pub fn from_endomorphism(m: &FpMatrix, depth: usize) -> Result<Self> {
        Self::graded_endomorphism(m, vec![0; m.rows()], depth)
    }

    pub fn graded_endomorphism(m: &FpMatrix, degrees: Vec<i64>, depth: usize) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch("endomorphism must be square".into()));
        }
        let mut t = Self::graded(m.field(), vec![degrees; depth + 1], vec![m.clone(); depth])?;
        t.periodic = true;
        Ok(t)
    }

    pub fn constant(field: PrimeField, dim: usize, depth: usize) -> Self {
        Self::from_endomorphism(&FpMatrix::identity(field, dim), depth).expect("square")
    }

    /// Record that degree `d` continues by identities beyond the window.
    pub fn with_permanent_degree(mut self, d: i64) -> Self {
        self.permanent.insert(d);
        self
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn depth(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dim(&self, r: usize) -> usize {
        self.dims[r]
    }

    pub fn map(&self, r: usize) -> &FpMatrix {
        &self.maps[r]
    }

    pub fn degrees(&self, r: usize) -> &[i64] {
        &self.degrees[r]
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn all_degrees(&self) -> BTreeSet<i64> {
        self.degrees.iter().flatten().copied().collect()
    }

    /// `M_q → M_r` for `r ≤ q`.
    pub fn composite(&self, r: usize, q: usize) -> FpMatrix {
        assert!(r <= q && q <= self.depth(), "composite {r} <- {q}");
        let mut acc = FpMatrix::identity(self.field, self.dims[q]);
        for s in (r..q).rev() {
            acc = self.maps[s].mul(&acc);
        }
        acc
    }

    fn offsets(&self, upto: usize) -> Vec<usize> {
        let mut out = vec![0];
        for r in 0..upto {
            out.push(out[r] + self.dims[r]);
        }
        out
    }

    /// `Δ: Π_{r≤R} M_r → Π_{r<R} M_r`.
    pub fn difference_map(&self) -> FpMatrix {
        let big_r = self.depth();
        let src = self.offsets(big_r + 1);
        let dst = self.offsets(big_r);
        let mut d = FpMatrix::zeros(self.field, dst[big_r], src[big_r + 1]);
        let minus = self.field.p() - 1;
        for r in 0..big_r {
            for i in 0..self.dims[r] {
                d.set(dst[r] + i, src[r] + i, 1);
            }
            d.set_block(dst[r], src[r + 1], &self.maps[r].scale(minus));
        }
        d
    }

    /// Projection `Π_{r≤R} M_r → M_r`.
    pub fn projection(&self, r: usize) -> FpMatrix {
        let src = self.offsets(self.depth() + 1);
        let mut m = FpMatrix::zeros(self.field, self.dims[r], src[self.depth() + 1]);
        for i in 0..self.dims[r] {
            m.set(i, src[r] + i, 1);
        }
        m
    }

    /// The sub-tower spanned by basis vectors of degree `d`.
    pub fn restrict_to_degree(&self, d: i64) -> Tower {
        let idx: Vec<Vec<usize>> = self
            .degrees
            .iter()
            .map(|ds| (0..ds.len()).filter(|&i| ds[i] == d).collect())
            .collect();
        let maps = (0..self.depth())
            .map(|r| self.maps[r].submatrix(&idx[r], &idx[r + 1]))
            .collect();
        let degrees = idx.iter().map(|v| vec![d; v.len()]).collect();
        let mut t = Tower::graded(self.field, degrees, maps).expect("restriction of a valid tower");
        t.periodic = self.periodic;
        if self.permanent.contains(&d) {
            t.permanent.insert(d);
        }
        t
    }

    fn certify(&self, d: i64) -> DegreeCertificate {
        let big_r = self.depth();
        let lim1_dim = {
            let delta = self.difference_map();
            delta.rows() - delta.rank()
        };
        // zero images stay zero further up
        let vanish: Option<Vec<usize>> = (0..=big_r)
            .map(|r| (r..=big_r).find(|&q| self.composite(r, q).is_zero()))
            .collect();
        if let Some(stages) = vanish {
            return DegreeCertificate {
                degree: d,
                lim_dim: 0,
                lim1_dim,
                stage: stages.into_iter().max(),
                kind: Some(CertificateKind::Vanishing),
            };
        }
        let ranks: Vec<usize> = (0..=big_r).map(|q| self.composite(0, q).rank()).collect();
        if self.periodic {
            if let Some(s) = (0..big_r).find(|&q| ranks[q] == ranks[q + 1]) {
                return DegreeCertificate {
                    degree: d,
                    lim_dim: ranks[s],
                    lim1_dim,
                    stage: Some(s),
                    kind: Some(CertificateKind::Periodic),
                };
            }
        }
        if self.permanent.contains(&d) && ranks[big_r] == self.dims[big_r] {
            return DegreeCertificate {
                degree: d,
                lim_dim: self.dims[big_r],
                lim1_dim,
                stage: Some(big_r),
                kind: Some(CertificateKind::Permanent),
            };
        }
        DegreeCertificate {
            degree: d,
            lim_dim: ranks[big_r],
            lim1_dim,
            stage: None,
            kind: None,
        }
    }

    /// `lim` and `lim¹` via the two-term complex, with per-degree
    /// stabilization certificates.
    pub fn lim_and_lim1(&self) -> LimResult {
        let delta = self.difference_map();
        let rank = delta.rank();
        let top = self.composite(0, self.depth());
        LimResult {
            lim_basis: top.rank_kernel_image().image,
            kernel_dim: delta.cols() - rank,
            lim1_dim: delta.rows() - rank,
            certificates: self
                .all_degrees()
                .into_iter()
                .map(|d| self.restrict_to_degree(d).certify(d))
                .collect(),
        }
    }
}

/// One cohomological degree of the proper case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProperDegree {
    pub degree: usize,
    pub dim: usize,
    pub nilpotent_dim: usize,
    pub stable_dim: usize,
    pub lim_dim: usize,
    pub lim1_dim: usize,
    pub stage: Option<usize>,
    /// The computed `lim`, projected to `H^m`, is exactly the stable part.
    pub lim_is_stable_part: bool,
    /// `HH^m = lim_r H^m ⊕ R¹lim_r H^{m−1}` in dimension.
    pub hh_dim: usize,
}

/// The tower `H^m ← H^m ← ⋯` with transition Frobenius, for every degree.
/// Over `F_p` a semilinear map is linear, so the tower is periodic and is
/// certified once the ranks of `F^k` stop dropping.
pub fn proper_case(frobenius: &[SemilinearMap]) -> Result<Vec<ProperDegree>> {
    let mut out: Vec<ProperDegree> = Vec::new();
    for (m, f) in frobenius.iter().enumerate() {
        let n = f.dim();
        let tower = Tower::from_endomorphism(&f.iterate_matrix(1), n + 1)?;
        let lim = tower.lim_and_lim1();
        let fit = f.fitting_decomposition();
        let field = f.field();
        let computed = Subspace::from_basis(field, n, lim.lim_basis.clone());
        // a zero space has no degrees and nothing to certify
        let (lim_dim, stage, certified) = match lim.certificates.first() {
            Some(c) => (c.lim_dim, c.stage, c.certified()),
            None => (0, Some(0), true),
        };
        let prev_lim1 = if m == 0 { 0 } else { out[m - 1].lim1_dim };
        out.push(ProperDegree {
            degree: m,
            dim: n,
            nilpotent_dim: fit.nilpotent.dim(),
            stable_dim: fit.semisimple.dim(),
            lim_dim,
            lim1_dim: lim.lim1_dim,
            stage,
            lim_is_stable_part: computed == fit.semisimple && certified,
            hh_dim: lim_dim + prev_lim1,
        });
    }
    Ok(out)
}

/// `y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WeierstrassCurve {
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a4: i64,
    pub a6: i64,
}

impl WeierstrassCurve {
    /// `y² = x³ + a·x + b`.
    pub fn short(a: i64, b: i64) -> Self {
        WeierstrassCurve {
            a1: 0,
            a2: 0,
            a3: 0,
            a4: a,
            a6: b,
        }
    }

    /// `y² = x³ + a2·x² + a4·x + a6`.
    pub fn cubic(a2: i64, a4: i64, a6: i64) -> Self {
        WeierstrassCurve { a1: 0, a2, a3: 0, a4, a6 }
    }

    /// Coefficients `[c0, c1, c2, 1]` of `f` in `y'² = f(x)` after completing
    /// the square (p odd).
    pub fn monic_cubic(&self, field: PrimeField) -> Result<[u32; 4]> {
        if field.p() == 2 {
            return Err(Error::Unsupported("Hasse invariant in characteristic 2".into()));
        }
        let r = |v: i64| field.reduce(v);
        let quarter = field.inv(r(4));
        let half = field.inv(r(2));
        let (a1, a3) = (r(self.a1), r(self.a3));
        let c2 = field.add(r(self.a2), field.mul(field.mul(a1, a1), quarter));
        let c1 = field.add(r(self.a4), field.mul(field.mul(a1, a3), half));
        let c0 = field.add(r(self.a6), field.mul(field.mul(a3, a3), quarter));
        Ok([c0, c1, c2, 1])
    }

    /// Discriminant of the monic cubic; nonzero iff the curve is smooth.
    pub fn cubic_discriminant(&self, field: PrimeField) -> Result<u32> {
        let [d, c, b, _] = self.monic_cubic(field)?;
        let m = |x: u32, y: u32| field.mul(x, y);
        let k = |v: i64| field.reduce(v);
        // b²c² − 4c³ − 4b³d − 27d² + 18bcd
        let terms = [
            m(m(b, b), m(c, c)),
            m(k(-4), m(c, m(c, c))),
            m(k(-4), m(m(b, m(b, b)), d)),
            m(k(-27), m(d, d)),
            m(k(18), m(m(b, c), d)),
        ];
        Ok(terms.iter().fold(0, |acc, &t| field.add(acc, t)))
    }

    fn checked_cubic(&self, field: PrimeField) -> Result<[u32; 4]> {
        let f = self.monic_cubic(field)?;
        if self.cubic_discriminant(field)? == 0 {
            return Err(Error::InvalidStructure(format!("singular curve over F_{}", field.p())));
        }
        Ok(f)
    }
}

/// Coefficient of `x^{p−1}` in `f(x)^{(p−1)/2}`.
pub fn hasse_invariant(p: u32, curve: &WeierstrassCurve) -> Result<u32> {
    let field = PrimeField::new(p)?;
    let c = curve.checked_cubic(field)?;
    let mut f = MultiPoly::zero(field, 1);
    for (e, &v) in c.iter().enumerate() {
        f.add_term(vec![e as u32], v);
    }
    Ok(f.pow((p - 1) / 2)?.coeff(&[p - 1]))
}

fn dense_mul(field: PrimeField, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = field.add(out[i + j], field.mul(x, y));
        }
    }
    out
}

fn dense_pow(field: PrimeField, a: &[u32], k: u32) -> Vec<u32> {
    (0..k).fold(vec![1], |acc, _| dense_mul(field, &acc, a))
}

/// Remainder modulo a monic polynomial.
fn dense_rem(field: PrimeField, a: &[u32], m: &[u32]) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = r.pop().expect("nonempty");
        let shift = r.len() - dm;
        for (i, &c) in m[..dm].iter().enumerate() {
            r[shift + i] = field.sub(r[shift + i], field.mul(lead, c));
        }
    }
    r
}

/// Frobenius on `H¹(E, 𝒪)` by a Čech computation.
///
/// Cover `E` by `U0 = E ∖ {O}` and `U1 = E ∖ {y = 0}`. A cocycle on
/// `U0 ∩ U1` has the form `(a(x) + b(x)·y)/f^k`; `a/f^k` and the part of `b`
/// of degree `< 3k − 1` modulo `f^k` are regular at `O`, so the class is the
/// coefficient of `x^{3k−1}` in `b mod f^k`, in the basis `[x²y/f]` (pole
/// order 1 at `O`). Frobenius sends it to `x^{2p}·f^{(p−1)/2}·y / f^p`, a
/// cocycle of pole order at most `3p` after reduction.
pub fn hasse_invariant_cech(p: u32, curve: &WeierstrassCurve) -> Result<u32> {
    let field = PrimeField::new(p)?;
    let f = curve.checked_cubic(field)?;
    let mut b = vec![0; 2 * p as usize];
    b.push(1);
    let b = dense_mul(field, &b, &dense_pow(field, &f, (p - 1) / 2));
    let fp = dense_pow(field, &f, p);
    let r = dense_rem(field, &b, &fp);
    Ok(r.get(3 * p as usize - 1).copied().unwrap_or(0))
}

/// `H⁰ = k` with `F = 1` and `H¹ = k` with `F` the Hasse invariant.
pub fn elliptic_frobenius(p: u32, curve: &WeierstrassCurve) -> Result<Vec<SemilinearMap>> {
    let field = PrimeField::new(p)?;
    let h = hasse_invariant(p, curve)?;
    Ok(vec![
        SemilinearMap::new(FpMatrix::identity(field, 1))?,
        SemilinearMap::new(FpMatrix::from_rows(field, &[vec![h]]))?,
    ])
}

/// One degree of the truncated six-term sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SequenceRow {
    pub degree: i64,
    pub certificate: Option<CertificateKind>,
    pub lim_sub: usize,
    pub lim_ambient: usize,
    pub lim_quotient: usize,
    /// `coker(lim B → lim C)`, i.e. the window's `R¹lim` of the subtower.
    pub coker: usize,
    /// The raw finite sequence is exact at all six places.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FilteredSequenceReport {
    pub cover: String,
    pub prime: u32,
    pub depth: u32,
    pub degree_bound: u32,
    /// `dim HH^m(𝒟ʳ, 𝒟)` per stage, `m = 0, 1`.
    pub stage_dims: Vec<Vec<usize>>,
    /// Restriction `HH⁰(𝒟^{r+1}) → HH⁰(𝒟ʳ)` is the inclusion of the twist
    /// subrings, at every stage.
    pub restriction_is_frobenius_inclusion: bool,
    pub hh1_tower_vanishes: bool,
    pub rows: Vec<SequenceRow>,
    pub certified_degrees: Vec<i64>,
    pub uncertified_degrees: Vec<i64>,
    pub exact_at_certified: bool,
    /// `dim HH⁰(𝒟)` summed over certified degrees.
    pub hh0_dim: usize,
    pub note: String,
}

impl FilteredSequenceReport {
    pub fn passed(&self) -> bool {
        self.restriction_is_frobenius_inclusion && self.hh1_tower_vanishes && self.exact_at_certified
    }
}

fn frobenius_pullback(field: PrimeField, op: &LaurentOp) -> Result<LaurentOp> {
    let p = field.p() as i64;
    let mut out = LaurentOp::zero(field);
    for (a, b, c) in op.terms() {
        if b != 0 {
            return Err(Error::InvalidStructure("degree-0 class is not a function".into()));
        }
        out.add_term(p * a, 0, c);
    }
    Ok(out)
}

/// `t^d` is central in `𝒟` iff it commutes with every `∂^(q)`, `q ≤ d`.
fn monomial_is_central(field: PrimeField, d: i64) -> Result<bool> {
    if d < 0 {
        return Ok(false);
    }
    let t = DPDOperator::monomial(field, vec![d as u32], vec![0], 1)?;
    let cap = t.dp_cap();
    if d as u32 > cap {
        return Ok(false);
    }
    for q in 1..=(d as u32).max(1) {
        if !DPDOperator::divided_power(field, 1, 0, q)?.commutator(&t)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rank of the map induced on cokernels: `(im g + im Δ') / im Δ'`.
fn induced_coker_rank(g: &FpMatrix, target_delta: &FpMatrix) -> usize {
    let both = hstack(g, target_delta);
    both.rank() - target_delta.rank()
}

fn hstack(a: &FpMatrix, b: &FpMatrix) -> FpMatrix {
    let mut m = FpMatrix::zeros(a.field(), a.rows(), a.cols() + b.cols());
    m.set_block(0, 0, a);
    m.set_block(0, a.cols(), b);
    m
}

fn block_diag(field: PrimeField, blocks: &[FpMatrix]) -> FpMatrix {
    let rows = blocks.iter().map(FpMatrix::rows).sum();
    let cols = blocks.iter().map(FpMatrix::cols).sum();
    let mut m = FpMatrix::zeros(field, rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        m.set_block(r, c, b);
        r += b.rows();
        c += b.cols();
    }
    m
}

/// The long exact sequence of `0 → A → B → C → 0` for the subtower
/// `A_r ⊆ B` of a constant tower, one degree at a time. `incl[r]: A_r → B`.
fn sequence_row(field: PrimeField, a: &Tower, incl: &[FpMatrix], cert: Option<CertificateKind>, d: i64) -> SequenceRow {
    let big_r = a.depth();
    let nb = incl[0].rows();
    let b = Tower::constant(field, nb, big_r);
    // C_r = B / im ι_r, presented by functionals vanishing on the image
    let quot: Vec<FpMatrix> = incl
        .iter()
        .map(|i| {
            let ann = i.transpose().kernel();
            let mut q = FpMatrix::zeros(field, ann.len(), nb);
            for (k, row) in ann.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    q.set(k, j, v);
                }
            }
            q
        })
        .collect();
    let sections: Vec<FpMatrix> = quot
        .iter()
        .map(|q| {
            let cols: Vec<Vec<u32>> = (0..q.rows())
                .map(|k| {
                    let mut e = vec![0; q.rows()];
                    e[k] = 1;
                    q.solve(&e).expect("quotient map is onto")
                })
                .collect();
            FpMatrix::from_cols(field, nb, &cols)
        })
        .collect();
    let cmaps = (0..big_r).map(|r| quot[r].mul(&sections[r + 1])).collect();
    let cdeg = quot.iter().map(|q| vec![d; q.rows()]).collect();
    let c = Tower::graded(field, cdeg, cmaps).expect("quotient tower");

    let (da, db, dc) = (a.difference_map(), b.difference_map(), c.difference_map());
    let i_full = block_diag(field, incl);
    let i_low = block_diag(field, &incl[..big_r]);
    let p_full = block_diag(field, &quot);
    let p_low = block_diag(field, &quot[..big_r]);
    let chain_maps = db.mul(&i_full) == i_low.mul(&da) && dc.mul(&p_full) == p_low.mul(&db);

    let ka = da.kernel();
    let kb = db.kernel();
    let kc = dc.kernel();
    let (ca, cb, cc) = (da.rows() - da.rank(), db.rows() - db.rank(), dc.rows() - dc.rank());
    let cols = |m: &FpMatrix, vs: &[Vec<u32>]| FpMatrix::from_cols(field, m.rows(), &vs.iter().map(|v| m.mul_vec(v)).collect::<Vec<_>>());
    let i_on_k = cols(&i_full, &ka).rank();
    let p_on_k = cols(&p_full, &kb).rank();
    // connecting map: lift along P, apply Δ_B, pull back along ι
    let mut delta_images = Vec::new();
    let mut connecting_ok = true;
    for v in &kc {
        let Some(lift) = p_full.solve(v) else {
            connecting_ok = false;
            continue;
        };
        match i_low.solve(&db.mul_vec(&lift)) {
            Some(x) => delta_images.push(x),
            None => connecting_ok = false,
        }
    }
    let delta_rank = if delta_images.is_empty() {
        0
    } else {
        induced_coker_rank(&FpMatrix::from_cols(field, da.rows(), &delta_images), &da)
    };
    let i_coker = induced_coker_rank(&i_low, &db);
    let p_coker = induced_coker_rank(&p_low, &dc);
    let exact = chain_maps
        && connecting_ok
        && i_on_k == ka.len()
        && kb.len() - p_on_k == i_on_k
        && kc.len() - delta_rank == p_on_k
        && ca - i_coker == delta_rank
        && cb - p_coker == i_coker
        && p_coker == cc;

    let lim_a = a.lim_and_lim1().lim_dim();
    let lim_c = kc.len();
    SequenceRow {
        degree: d,
        certificate: cert,
        lim_sub: lim_a,
        lim_ambient: nb,
        lim_quotient: lim_c,
        coker: (lim_c + lim_a).saturating_sub(nb),
        exact,
    }
}

/// Assemble the tower `HH*(𝒟ʳ, 𝒟)`, `r ≤ R`, on a built-in cover, check the
/// restriction maps against the Frobenius inclusions and check the
/// truncated six-term sequence degree by degree.
pub fn filtered_hh_sequence(
    field: PrimeField,
    cover: CoverModel,
    depth: u32,
    q_cap: u32,
    degree_bound: u32,
) -> Result<FilteredSequenceReport> {
    if depth > MAX_TOWER_DEPTH {
        return Err(Error::Capacity(format!("tower depth {depth} above {MAX_TOWER_DEPTH}")));
    }
    let p = field.p() as i64;
    let models = (0..=depth)
        .map(|r| SubalgebraModel::build(field, cover.clone(), r, q_cap, degree_bound))
        .collect::<Result<Vec<_>>>()?;

    // basis of HH⁰(𝒟ʳ): (weight, class index), graded by t-degree p^r·w
    let mut bases: Vec<Vec<(i64, usize)>> = Vec::new();
    let mut classes: Vec<BTreeMap<i64, Vec<Vec<LaurentOp>>>> = Vec::new();
    for m in &models {
        let mut basis = Vec::new();
        let mut by_weight = BTreeMap::new();
        for w in -m.weight_bound..=m.weight_bound {
            let cls = m.hh0_classes(w);
            basis.extend((0..cls.len()).map(|k| (w, k)));
            if !cls.is_empty() {
                by_weight.insert(w, cls);
            }
        }
        bases.push(basis);
        classes.push(by_weight);
    }
    let scale = |r: usize| p.pow(r as u32);
    let degrees: Vec<Vec<i64>> = bases
        .iter()
        .enumerate()
        .map(|(r, b)| b.iter().map(|&(w, _)| w * scale(r)).collect())
        .collect();

    let mut maps = Vec::new();
    let mut frobenius_ok = true;
    for r in 0..depth as usize {
        let mut m = FpMatrix::zeros(field, bases[r].len(), bases[r + 1].len());
        for (col, &(w, k)) in bases[r + 1].iter().enumerate() {
            let ops = classes[r + 1][&w][k]
                .iter()
                .map(|op| frobenius_pullback(field, op))
                .collect::<Result<Vec<_>>>()?;
            match models[r].hh0_coordinates(p * w, &ops)? {
                Some(coords) => {
                    let start = bases[r].iter().position(|&(w2, _)| w2 == p * w).expect("weight present");
                    for (j, c) in coords.into_iter().enumerate() {
                        m.set(start + j, col, c);
                    }
                }
                None => frobenius_ok = false,
            }
        }
        // image must be exactly the classes of degree divisible by p^{r+1}
        let target = Subspace::coordinate(
            field,
            bases[r].len(),
            (0..bases[r].len()).filter(|&i| degrees[r][i] % scale(r + 1) == 0),
        );
        let image = Subspace::from_basis(field, bases[r].len(), m.rank_kernel_image().image);
        frobenius_ok &= m.rank() == bases[r + 1].len() && image == target;
        maps.push(m);
    }

    let mut sub = Tower::graded(field, degrees.clone(), maps)?;
    let top = depth as usize;
    for d in sub.all_degrees() {
        let at_top: Vec<i64> = degrees[top].iter().copied().filter(|&x| x == d).collect();
        if !at_top.is_empty() && monomial_is_central(field, d)? {
            sub = sub.with_permanent_degree(d);
        }
    }
    let lim = sub.lim_and_lim1();

    let mut rows = Vec::new();
    for d in degrees[0].iter().copied().collect::<BTreeSet<_>>() {
        let a = sub.restrict_to_degree(d);
        let incl: Vec<FpMatrix> = (0..=top).map(|r| a.composite(0, r)).collect();
        let cert = lim.certificate(d).and_then(|c| c.kind);
        rows.push(sequence_row(field, &a, &incl, cert, d));
    }
    let certified_degrees: Vec<i64> = rows.iter().filter(|r| r.certificate.is_some()).map(|r| r.degree).collect();
    let uncertified_degrees = rows.iter().filter(|r| r.certificate.is_none()).map(|r| r.degree).collect();
    let exact_at_certified = rows
        .iter()
        .filter(|r| r.certificate.is_some())
        .all(|r| r.exact && r.coker == 0);
    let hh0_dim = rows.iter().filter(|r| r.certificate.is_some()).map(|r| r.lim_sub).sum();
    let stage_dims: Vec<Vec<usize>> = models
        .iter()
        .map(|m| {
            let mut t = m.total_dims();
            t.resize(2, 0);
            t.truncate(2);
            t
        })
        .collect();
    let hh1_tower_vanishes = stage_dims.iter().all(|d| d[1] == 0);
    Ok(FilteredSequenceReport {
        cover: cover.name.clone(),
        prime: field.p(),
        depth,
        degree_bound,
        stage_dims,
        restriction_is_frobenius_inclusion: frobenius_ok,
        hh1_tower_vanishes,
        rows,
        certified_degrees,
        uncertified_degrees,
        exact_at_certified,
        hh0_dim,
        note: "finite windows have lim^1 = 0; the infinite R^1 lim is represented by certified exactness, not by a computed number"
            .into(),
    })
}

/// Outcome of the partial-sum check for `ad(t + t^p + t^{p²} + ⋯)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SmithReport {
    pub prime: u32,
    pub depth: u32,
    pub degree_bound: u32,
    pub series: String,
    pub generators: usize,
    /// `ad(f)` satisfies Leibniz on all pairs of generators.
    pub derivation: bool,
    /// On `𝒟ˢ`, `ad(f) = ad(b_s)` with `b_s` the partial sum below `p^s`.
    pub compatible: bool,
    /// Successive differences `b_{s+1} − b_s = t^{p^s}` lie in `k[t^{p^s}]`.
    pub differences_in_twist: bool,
    /// The connecting map sends the family `(b_s mod k[t^{p^s}])` to
    /// `(−t^{p^s})_s`, which the finite window writes as a boundary.
    pub connecting_image: Vec<String>,
    pub boundary_in_window: bool,
}

impl SmithReport {
    pub fn passed(&self) -> bool {
        self.derivation && self.compatible && self.differences_in_twist && self.boundary_in_window
    }
}

/// Check the partial sums of `t + t^p + t^{p²} + ⋯` through `p^R`.
pub fn smith_tower_check(field: PrimeField, depth: u32, degree_bound: u32) -> Result<SmithReport> {
    let p = field.p();
    if depth > 4 || p.pow(depth) > degree_bound {
        return Err(Error::Capacity(format!(
            "need p^R <= D and R <= 4, got p={p}, R={depth}, D={degree_bound}"
        )));
    }
    let minus = p - 1;
    let t_pow = |e: u32| MultiPoly::monomial(field, vec![e], 1);
    // b_s = Σ_{j<s} t^{p^j}, s = 0..=R+1; the series truncation is b_{R+1}
    let mut partial = vec![MultiPoly::zero(field, 1)];
    for j in 0..=depth {
        let next = partial[j as usize].add(&t_pow(p.pow(j)))?;
        partial.push(next);
    }
    let series = partial[depth as usize + 1].clone();
    let ad = DPDOperator::function(&series);

    let qmax = 4.min(p.pow(depth + 1));
    let mut gens = vec![DPDOperator::coordinate(field, 1, 0)];
    for q in 1..=qmax {
        gens.push(DPDOperator::divided_power(field, 1, 0, q)?);
    }
    let mut derivation = true;
    for x in &gens {
        for y in &gens {
            let lhs = ad.commutator(&x.mul(y)?)?;
            let rhs = ad.commutator(x)?.mul(y)?.add(&x.mul(&ad.commutator(y)?)?)?;
            derivation &= lhs == rhs;
        }
    }

    // 𝒟ˢ is generated by t and ∂^(q), q < p^s
    let mut compatible = true;
    for s in 0..=depth {
        let diff = DPDOperator::function(&series.sub(&partial[s as usize])?);
        compatible &= diff.commutator(&DPDOperator::coordinate(field, 1, 0))?.is_zero();
        for q in 1..p.pow(s) {
            compatible &= diff.commutator(&DPDOperator::divided_power(field, 1, 0, q)?)?.is_zero();
        }
    }

    let mut differences_in_twist = true;
    let mut connecting = Vec::new();
    let mut boundary = true;
    // witness x_s = −Σ_{s≤j<R} t^{p^j}, x_R = 0, with x_s − x_{s+1} = δ_s
    let witness: Vec<MultiPoly> = (0..=depth)
        .map(|s| partial[s as usize].sub(&partial[depth as usize]))
        .collect::<Result<_>>()?;
    for s in 0..depth {
        let delta = partial[s as usize].sub(&partial[s as usize + 1])?;
        differences_in_twist &= TwistSubring::new(field, s).contains(&delta);
        boundary &= delta == t_pow(p.pow(s)).scale(minus);
        boundary &= TwistSubring::new(field, s).contains(&witness[s as usize]);
        boundary &= witness[s as usize].sub(&witness[s as usize + 1])? == delta;
        connecting.push(delta.to_string());
    }
    Ok(SmithReport {
        prime: p,
        depth,
        degree_bound,
        series: series.to_string(),
        generators: gens.len(),
        derivation,
        compatible,
        differences_in_twist,
        connecting_image: connecting,
        boundary_in_window: boundary,
    })
}
