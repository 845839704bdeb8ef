//! The GS complex of `(𝒟ʳ, 𝒟)` on the built-in covers of curves.
//!
//! Each column is the Koszul model of `C^*(𝒟ʳ(max σ), 𝒟(min σ))`: after
//! the Frobenius-twist compression (checked by
//! [`crate::hochschild::hh_of_pair`]) the algebra is generated by one
//! coordinate `y`, and the column is the two-term complex
//! `𝒟_{≤Q} --[y,−]--> 𝒟_{≤Q−1}`. The torus weight `a − b` of `s^a ∂^(b)` is
//! preserved by every map, so the double complex splits into finite weight
//! blocks. Dropping the maximum of a simplex changes the coordinate; on a
//! 1-cochain (a derivation determined by its value on the coordinate) the
//! change `y ↦ y⁻¹` acts by `m ↦ −y⁻¹ m y⁻¹`.

use serde::Serialize;

use super::cech::{nerve_vs_cech, CechComparison};
use super::laurent::{coordinates, LaurentOp};
use super::poset::{NerveSimplex, Poset};
use super::presheaf::{CoefficientPresheaf, Restrictions};
use crate::error::{Error, Result};
use crate::gfp::PrimeField;
use crate::hochschild::hh_of_pair;
use crate::linalg::{DoubleComplex, FpMatrix, SpectralSequencePage};

/// Coordinate ring of a chart, in terms of the global coordinate `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    /// `k[s]`, coordinate `s`.
    Polynomial,
    /// `k[s, s⁻¹]`, coordinate `s`.
    Laurent,
    /// `k[u]`, `u = s⁻¹`, coordinate `u`.
    Inverse,
}

impl ChartKind {
    fn coordinate_exponent(self) -> i64 {
        match self {
            ChartKind::Inverse => -1,
            _ => 1,
        }
    }

    fn allows_function_weight(self, w: i64) -> bool {
        match self {
            ChartKind::Polynomial => w >= 0,
            ChartKind::Inverse => w <= 0,
            ChartKind::Laurent => true,
        }
    }

    /// Basis of the weight-`w` part of the operators of order `≤ bmax`.
    fn operator_basis(self, field: PrimeField, w: i64, bmax: i64) -> Vec<LaurentOp> {
        let mut out = Vec::new();
        for b in 0..=bmax {
            match self {
                ChartKind::Polynomial if w + b >= 0 => out.push(LaurentOp::monomial(field, w + b, b as u32, 1)),
                ChartKind::Laurent => out.push(LaurentOp::monomial(field, w + b, b as u32, 1)),
                // u^c ∂_u^(e) has s-weight e − c
                ChartKind::Inverse if b - w >= 0 => out.push(LaurentOp::from_inverse_chart(field, b - w, b as u32)),
                _ => {}
            }
        }
        out
    }
}

/// A cover of a curve by charts, ordered by inclusion.
#[derive(Debug, Clone)]
pub struct CoverModel {
    pub name: String,
    pub poset: Poset,
    pub charts: Vec<ChartKind>,
    pub cover: Vec<usize>,
}

impl CoverModel {
    /// `𝔸¹` as a single open.
    pub fn point() -> Self {
        CoverModel {
            name: "point".into(),
            poset: Poset::point(),
            charts: vec![ChartKind::Polynomial],
            cover: vec![0],
        }
    }

    /// `𝔾_m ⊂ 𝔸¹`.
    pub fn affine_line() -> Self {
        CoverModel {
            name: "affine-line".into(),
            poset: Poset::from_sets(vec!["Gm".into(), "A1".into()], vec![0b01, 0b11]).expect("valid"),
            charts: vec![ChartKind::Laurent, ChartKind::Polynomial],
            cover: vec![0, 1],
        }
    }

    /// `U0 = Spec k[s]`, `U1 = Spec k[s⁻¹]`, `U01 = Spec k[s, s⁻¹]`.
    pub fn projective_line() -> Self {
        CoverModel {
            name: "projective-line".into(),
            poset: Poset::two_chart(),
            charts: vec![ChartKind::Polynomial, ChartKind::Inverse, ChartKind::Laurent],
            cover: vec![0, 1],
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "point" => Ok(Self::point()),
            "affine-line" => Ok(Self::affine_line()),
            "projective-line" => Ok(Self::projective_line()),
            other => Err(Error::Unsupported(format!("unknown cover {other}"))),
        }
    }
}

/// One weight block of the Koszul GS model.
#[derive(Debug, Clone)]
pub struct WeightBlock {
    pub weight: i64,
    pub complex: DoubleComplex,
    /// `bases[i][q][k]`: basis of Koszul degree `q` at the `k`-th simplex of `N^i`.
    bases: Vec<Vec<Vec<Vec<LaurentOp>>>>,
}

/// The assembled model: all weight blocks with `|w| ≤ weight_bound`.
#[derive(Debug, Clone)]
pub struct SubalgebraModel {
    pub field: PrimeField,
    pub cover: CoverModel,
    pub depth: u32,
    pub q_cap: u32,
    pub weight_bound: i64,
    pub nerve: Vec<Vec<NerveSimplex>>,
    pub blocks: Vec<WeightBlock>,
}

fn koszul_change(field: PrimeField, from: i64, to: i64, m: &LaurentOp) -> Result<LaurentOp> {
    if from == to {
        Ok(m.clone())
    } else if from == -to {
        // D(y⁻¹) = −y⁻¹ D(y) y⁻¹ with y = s^from
        let inv = LaurentOp::power(field, to);
        Ok(inv.mul(m).mul(&inv).scale(field.p() - 1))
    } else {
        Err(Error::Unsupported("coordinate change other than y ↦ y⁻¹".into()))
    }
}

fn express(field: PrimeField, basis: &[LaurentOp], v: &LaurentOp) -> Result<Vec<u32>> {
    coordinates(field, basis, v).ok_or_else(|| Error::InvalidStructure("operator leaves the truncated module".into()))
}

fn matrix_from_images(
    field: PrimeField,
    src: &[LaurentOp],
    dst: &[LaurentOp],
    f: impl Fn(&LaurentOp) -> Result<LaurentOp>,
) -> Result<FpMatrix> {
    let cols = src
        .iter()
        .map(|m| express(field, dst, &f(m)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(FpMatrix::from_cols(field, dst.len(), &cols))
}

impl SubalgebraModel {
    pub fn build(field: PrimeField, cover: CoverModel, depth: u32, q_cap: u32, degree_bound: u32) -> Result<Self> {
        if q_cap == 0 {
            return Err(Error::Truncation("degenerate divided-power window".into()));
        }
        let nerve = cover.poset.nerve()?;
        let weight_bound = (degree_bound / field.p().pow(depth)) as i64;
        let blocks = (-weight_bound..=weight_bound)
            .map(|w| Self::block(field, &cover, &nerve, q_cap as i64, w))
            .collect::<Result<Vec<_>>>()?;
        Ok(SubalgebraModel {
            field,
            cover,
            depth,
            q_cap,
            weight_bound,
            nerve,
            blocks,
        })
    }

    fn block(field: PrimeField, cover: &CoverModel, nerve: &[Vec<NerveSimplex>], q: i64, w: i64) -> Result<WeightBlock> {
        let chart = |u: usize| cover.charts[u];
        let bases: Vec<Vec<Vec<Vec<LaurentOp>>>> = nerve
            .iter()
            .map(|level| {
                let k0 = level.iter().map(|s| chart(s.min()).operator_basis(field, w, q)).collect();
                let k1 = level
                    .iter()
                    .map(|s| chart(s.min()).operator_basis(field, w + chart(s.max()).coordinate_exponent(), q - 1))
                    .collect();
                vec![k0, k1]
            })
            .collect();
        let dims: Vec<Vec<usize>> = bases
            .iter()
            .map(|col| col.iter().map(|row| row.iter().map(Vec::len).sum()).collect())
            .collect();
        let offsets = |i: usize, q: usize, k: usize| -> usize { bases[i][q][..k].iter().map(Vec::len).sum() };

        let mut dv = Vec::new();
        for (i, level) in nerve.iter().enumerate() {
            let mut m = FpMatrix::zeros(field, dims[i][1], dims[i][0]);
            for (k, s) in level.iter().enumerate() {
                let y = LaurentOp::power(field, chart(s.max()).coordinate_exponent());
                let block = matrix_from_images(field, &bases[i][0][k], &bases[i][1][k], |m| Ok(y.commutator(m)))?;
                m.set_block(offsets(i, 1, k), offsets(i, 0, k), &block);
            }
            dv.push(vec![m]);
        }

        let mut dh = Vec::new();
        for i in 0..nerve.len() - 1 {
            let mut col = Vec::new();
            for q in 0..2 {
                let mut m = FpMatrix::zeros(field, dims[i + 1][q], dims[i][q]);
                for (t, tau) in nerve[i + 1].iter().enumerate() {
                    let top = tau.dim();
                    for kface in 0..=top {
                        let sigma = tau.face(kface);
                        let s = nerve[i].binary_search_by(|x| x.chain.cmp(&sigma.chain)).expect("face");
                        let src = &bases[i][q][s];
                        let dst = &bases[i + 1][q][t];
                        let block = if kface == top && q == 1 {
                            let from = chart(sigma.max()).coordinate_exponent();
                            let to = chart(tau.max()).coordinate_exponent();
                            matrix_from_images(field, src, dst, |m| koszul_change(field, from, to, m))?
                        } else {
                            // restriction of coefficients, or identity
                            matrix_from_images(field, src, dst, |m| Ok(m.clone()))?
                        };
                        let block = if kface % 2 == 0 { block } else { block.scale(field.p() - 1) };
                        let (r0, c0) = (offsets(i + 1, q, t), offsets(i, q, s));
                        for r in 0..block.rows() {
                            for c in 0..block.cols() {
                                let v = block.get(r, c);
                                if v != 0 {
                                    m.add_to(r0 + r, c0 + c, v);
                                }
                            }
                        }
                    }
                }
                col.push(m);
            }
            dh.push(col);
        }
        let complex = DoubleComplex::from_commuting(field, dims, dh, dv)?;
        Ok(WeightBlock {
            weight: w,
            complex,
            bases,
        })
    }

    /// `𝒪^{(r)}` model on the cover: weight-`w` functions `s^w` on each chart.
    pub fn twist_sheaf(&self) -> Result<CoefficientPresheaf> {
        let poset = &self.cover.poset;
        let basis: Vec<Vec<i64>> = self
            .cover
            .charts
            .iter()
            .map(|c| (-self.weight_bound..=self.weight_bound).filter(|&w| c.allows_function_weight(w)).collect())
            .collect();
        let mut maps = Restrictions::new();
        for u in 0..poset.len() {
            for v in 0..poset.len() {
                if poset.lt(u, v) {
                    let mut m = FpMatrix::zeros(self.field, basis[u].len(), basis[v].len());
                    for (c, w) in basis[v].iter().enumerate() {
                        let r = basis[u].iter().position(|x| x == w).ok_or_else(|| {
                            Error::InvalidStructure("chart functions do not restrict".into())
                        })?;
                        m.set(r, c, 1);
                    }
                    maps.insert((v, u), m);
                }
            }
        }
        CoefficientPresheaf::new(poset, self.field, basis.iter().map(Vec::len).collect(), maps)
    }

    /// Sum of the page dimensions over all weight blocks.
    pub fn pages(&self, max_page: usize) -> Vec<SpectralSequencePage> {
        let mut acc: Option<Vec<SpectralSequencePage>> = None;
        for b in &self.blocks {
            let pages = b.complex.spectral_sequence(max_page);
            acc = Some(match acc {
                None => pages,
                Some(mut prev) => {
                    for (x, y) in prev.iter_mut().zip(pages) {
                        for (i, col) in y.dims.iter().enumerate() {
                            for (j, d) in col.iter().enumerate() {
                                x.dims[i][j] += d;
                                x.d_rank[i][j] += y.d_rank[i][j];
                            }
                        }
                    }
                    prev
                }
            });
        }
        acc.unwrap_or_default()
    }

    pub fn total_dims(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for b in &self.blocks {
            let dims = b.complex.totalize().expect("bounded").cohomology_dims();
            if out.len() < dims.len() {
                out.resize(dims.len(), 0);
            }
            for (o, d) in out.iter_mut().zip(dims) {
                *o += d;
            }
        }
        out
    }

    /// Weights carrying a degree-0 class, i.e. the exponents `w` of the
    /// `HH⁰` generators `y^w = x^{p^r w}`.
    pub fn hh0_weights(&self) -> Vec<i64> {
        self.blocks
            .iter()
            .filter(|b| b.complex.totalize().expect("bounded").cohomology(0).expect("degree 0").dim > 0)
            .map(|b| b.weight)
            .collect()
    }

    /// Degree-0 classes of weight `w`, each given by its operator on every
    /// vertex (a function, for the built-in covers).
    pub fn hh0_classes(&self, w: i64) -> Vec<Vec<LaurentOp>> {
        let Some(block) = self.block_of(w) else {
            return Vec::new();
        };
        let h = block.complex.totalize().expect("bounded").cohomology(0).expect("degree 0");
        h.representatives.iter().map(|v| self.vertex_operators(block, v)).collect()
    }

    /// Coordinates in the basis of [`Self::hh0_classes`] of the degree-0
    /// cochain with the given vertex operators; `None` if it is not a cocycle.
    pub fn hh0_coordinates(&self, w: i64, ops: &[LaurentOp]) -> Result<Option<Vec<u32>>> {
        let block = self
            .block_of(w)
            .ok_or_else(|| Error::Truncation(format!("weight {w} outside the model window")))?;
        let mut v = Vec::new();
        for (basis, op) in block.bases[0][0].iter().zip(ops) {
            v.extend(express(self.field, basis, op)?);
        }
        let tot = block.complex.total_differential(0);
        if !tot.mul_vec(&v).iter().all(|&c| c == 0) {
            return Ok(None);
        }
        let h = block.complex.totalize().expect("bounded").cohomology(0).expect("degree 0");
        let reps = FpMatrix::from_cols(self.field, v.len(), &h.representatives);
        Ok(reps.solve(&v))
    }

    fn block_of(&self, w: i64) -> Option<&WeightBlock> {
        self.blocks.iter().find(|b| b.weight == w)
    }

    /// Degree-0 total cochains of weight `w`, one operator per vertex.
    fn vertex_operators(&self, block: &WeightBlock, v: &[u32]) -> Vec<LaurentOp> {
        let mut out = Vec::new();
        let mut off = 0;
        for basis in &block.bases[0][0] {
            let mut op = LaurentOp::zero(self.field);
            for (b, &c) in basis.iter().zip(&v[off..off + basis.len()]) {
                op = op.add(&b.scale(c));
            }
            off += basis.len();
            out.push(op);
        }
        out
    }

    /// Check that products of degree-0 classes are classes and that the edge
    /// map to `E₂^{0,0} ⊆ ⊕_v 𝒪(v)` is multiplicative, for all pairs of
    /// weights whose sum stays in the window.
    pub fn edge_multiplicativity(&self) -> Result<EdgeReport> {
        let field = self.field;
        let classes: Vec<(i64, Vec<Vec<u32>>)> = self
            .blocks
            .iter()
            .map(|b| {
                let h = b.complex.totalize().expect("bounded").cohomology(0).expect("degree 0");
                (b.weight, h.representatives)
            })
            .filter(|(_, r)| !r.is_empty())
            .collect();
        let mut checked = 0;
        let mut failures = Vec::new();
        for (w1, r1) in &classes {
            for (w2, r2) in &classes {
                let Some(target) = self.block_of(w1 + w2) else {
                    continue;
                };
                let src1 = self.block_of(*w1).expect("weight");
                let src2 = self.block_of(*w2).expect("weight");
                for a in r1 {
                    for b in r2 {
                        let ops_a = self.vertex_operators(src1, a);
                        let ops_b = self.vertex_operators(src2, b);
                        let mut product = Vec::new();
                        for (k, (x, y)) in ops_a.iter().zip(&ops_b).enumerate() {
                            // classes are functions, so edge(α)·edge(β) is the product in 𝒪
                            if x.order() != 0 || y.order() != 0 {
                                failures.push(format!("weight {w1}·{w2}: class is not a function"));
                            }
                            let xy = x.mul(y);
                            product.extend(express(field, &target.bases[0][0][k], &xy)?);
                        }
                        let tot = target.complex.total_differential(0);
                        if !tot.mul_vec(&product).iter().all(|&c| c == 0) {
                            failures.push(format!("weight {w1}·{w2}: product is not a cocycle"));
                        }
                        let again = self.vertex_operators(target, &product);
                        for ((x, y), z) in ops_a.iter().zip(&ops_b).zip(&again) {
                            let edge_product = function_product(x, y);
                            if function_part(z) != edge_product {
                                failures.push(format!("weight {w1}·{w2}: edge map not multiplicative"));
                            }
                        }
                        checked += 1;
                    }
                }
            }
        }
        Ok(EdgeReport {
            pairs_checked: checked,
            failures,
        })
    }

    pub fn report(&self) -> Result<SubalgebraReport> {
        let pages = self.pages(2);
        let e1 = &pages[0];
        let e2 = &pages[1];
        let einf = pages.last().expect("E_inf");
        let tot = self.total_dims();
        let converges = (0..tot.len()).all(|n| einf.total_dim(n) == tot[n]);
        let cech = nerve_vs_cech(&self.cover.poset, &self.cover.cover, &self.twist_sheaf()?)?;
        let row0: Vec<usize> = e2.dims.iter().map(|c| c[0]).collect();
        let mut cmp = row0.clone();
        cmp.resize(cech.nerve_dims.len().max(cmp.len()), 0);
        let mut nd = cech.nerve_dims.clone();
        nd.resize(cmp.len(), 0);
        let q = self.field.p().pow(self.depth) as i64;
        let generators = self
            .hh0_weights()
            .into_iter()
            .map(|w| match w * q {
                0 => "1".to_string(),
                1 => "x".to_string(),
                e => format!("x^{e}"),
            })
            .collect();
        let morita = if self.depth > 0 {
            let cap = self.q_cap.min(self.field.p().pow(4) / q as u32).max(1);
            Some(hh_of_pair(self.field, 1, self.depth, cap, self.weight_bound as u32 * q as u32)?.morita_checked)
        } else {
            None
        };
        Ok(SubalgebraReport {
            cover: self.cover.name.clone(),
            prime: self.field.p(),
            depth: self.depth,
            q_cap: self.q_cap,
            weight_bound: self.weight_bound,
            e1_dims: e1.dims.clone(),
            e2_dims: e2.dims.clone(),
            einf_dims: einf.dims.clone(),
            total_dims: tot,
            e2_row_zero: e2.concentrated_in_row_zero(),
            converges,
            e2_matches_cech: cmp == nd && cech.agree,
            cech,
            hh0_generators: generators,
            morita_checked: morita,
        })
    }
}

fn function_part(op: &LaurentOp) -> LaurentOp {
    let mut out = LaurentOp::zero(op.field());
    for (a, b, c) in op.terms() {
        if b == 0 {
            out.add_term(a, 0, c);
        }
    }
    out
}

fn function_product(x: &LaurentOp, y: &LaurentOp) -> LaurentOp {
    let mut out = LaurentOp::zero(x.field());
    let f = x.field();
    for (a, _, c) in function_part(x).terms() {
        for (b, _, d) in function_part(y).terms() {
            out.add_term(a + b, 0, f.mul(c, d));
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct EdgeReport {
    pub pairs_checked: usize,
    pub failures: Vec<String>,
}

impl EdgeReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.pairs_checked > 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SubalgebraReport {
    pub cover: String,
    pub prime: u32,
    pub depth: u32,
    pub q_cap: u32,
    pub weight_bound: i64,
    pub e1_dims: Vec<Vec<usize>>,
    pub e2_dims: Vec<Vec<usize>>,
    pub einf_dims: Vec<Vec<usize>>,
    pub total_dims: Vec<usize>,
    pub e2_row_zero: bool,
    pub converges: bool,
    pub e2_matches_cech: bool,
    pub cech: CechComparison,
    pub hh0_generators: Vec<String>,
    pub morita_checked: Option<usize>,
}

/// Build the model, run the spectral sequence and compare with Čech
/// cohomology of the twist sheaf.
pub fn gs_for_subalgebra_scenario(
    field: PrimeField,
    cover: CoverModel,
    depth: u32,
    q_cap: u32,
    degree_bound: u32,
) -> Result<SubalgebraReport> {
    SubalgebraModel::build(field, cover, depth, q_cap, degree_bound)?.report()
}
