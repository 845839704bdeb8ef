use super::poset::{NerveSimplex, MAX_NERVE_DIM};
use super::presheaf::{AlgebraPresheaf, BimodulePresheaf};
use crate::error::{Error, Result};
use crate::hochschild::{bar_differential, cup_product, Bimodule, HochschildCochain, StructAlgebra};
use crate::linalg::{DoubleComplex, FpMatrix};

/// Largest certified Hochschild degree inside a GS complex.
pub const MAX_GS_DEGREE: usize = 2;

/// The double complex `C^{i,j} = ∏_{σ ∈ N^i} C^j(𝒜(max σ), ℳ(min σ))`.
///
/// Rows run through `max_j + 1` so that every certified row has its
/// outgoing vertical differential. Horizontal faces: dropping an inner
/// vertex changes nothing, dropping the minimum postcomposes with the
/// restriction of `ℳ`, dropping the maximum precomposes with the restriction
/// of `𝒜` on every tensor factor. The total differential is
/// `d_h + (−1)^i d_v`.
#[derive(Debug, Clone)]
pub struct GSComplex {
    algebras: AlgebraPresheaf,
    modules: BimodulePresheaf,
    nerve: Vec<Vec<NerveSimplex>>,
    coefficients: Vec<Vec<Bimodule>>,
    offsets: Vec<Vec<Vec<usize>>>,
    max_j: usize,
    double: DoubleComplex,
}

/// A GS cochain of bidegree `(i, j)`: the concatenation over `σ ∈ N^i` (in
/// nerve order) of Hochschild cochains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GSCochain {
    pub i: usize,
    pub j: usize,
    pub values: Vec<u32>,
}

impl GSCochain {
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }
}

pub fn build_gs_complex(
    algebras: &AlgebraPresheaf,
    modules: &BimodulePresheaf,
    max_i: usize,
    max_j: usize,
) -> Result<GSComplex> {
    if max_j > MAX_GS_DEGREE {
        return Err(Error::Capacity(format!("Hochschild degree {max_j} above {MAX_GS_DEGREE}")));
    }
    let nerve = algebras.poset().nerve()?;
    if nerve.len() - 1 > max_i.min(MAX_NERVE_DIM) {
        return Err(Error::Capacity(format!(
            "nerve of dimension {} exceeds the requested bound {max_i}",
            nerve.len() - 1
        )));
    }
    let field = algebras.field();
    let coefficients: Vec<Vec<Bimodule>> = nerve
        .iter()
        .map(|level| {
            level
                .iter()
                .map(|s| {
                    modules.module(s.min()).restrict_scalars(
                        algebras.algebra(s.max()),
                        algebras.algebra(s.min()),
                        &algebras.restriction(s.max(), s.min()),
                    )
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let rows = max_j + 2;
    let cochain_dim = |s: &NerveSimplex, j: usize| algebras.algebra(s.max()).dim().pow(j as u32) * modules.module(s.min()).dim();
    let offsets: Vec<Vec<Vec<usize>>> = nerve
        .iter()
        .map(|level| {
            (0..rows)
                .map(|j| {
                    let mut acc = 0;
                    let mut out = Vec::with_capacity(level.len() + 1);
                    for s in level {
                        out.push(acc);
                        acc += cochain_dim(s, j);
                    }
                    out.push(acc);
                    out
                })
                .collect()
        })
        .collect();
    let dims: Vec<Vec<usize>> = offsets
        .iter()
        .map(|col| col.iter().map(|o| *o.last().expect("nonempty")).collect())
        .collect();

    // vertical: block diagonal Hochschild differentials
    let mut dv = Vec::new();
    for (i, level) in nerve.iter().enumerate() {
        let mut col = Vec::new();
        for j in 0..rows - 1 {
            let mut m = FpMatrix::zeros(field, dims[i][j + 1], dims[i][j]);
            for (k, s) in level.iter().enumerate() {
                let block = bar_differential(algebras.algebra(s.max()), &coefficients[i][k], j)?;
                m.set_block(offsets[i][j + 1][k], offsets[i][j][k], &block);
            }
            col.push(m);
        }
        dv.push(col);
    }

    // horizontal: alternating sum of faces
    let mut dh = Vec::new();
    for i in 0..nerve.len() - 1 {
        let mut col = Vec::new();
        for j in 0..rows {
            let mut m = FpMatrix::zeros(field, dims[i + 1][j], dims[i][j]);
            for (t, tau) in nerve[i + 1].iter().enumerate() {
                for k in 0..=i + 1 {
                    let sigma = tau.face(k);
                    let s = nerve[i].binary_search_by(|x| x.chain.cmp(&sigma.chain)).expect("faces lie in the nerve");
                    let block = face_map(algebras, modules, &sigma, tau, k, j);
                    let block = if k % 2 == 0 { block } else { block.scale(field.p() - 1) };
                    let (r0, c0) = (offsets[i + 1][j][t], offsets[i][j][s]);
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
    let double = DoubleComplex::from_commuting(field, dims, dh, dv)?;
    Ok(GSComplex {
        algebras: algebras.clone(),
        modules: modules.clone(),
        nerve,
        coefficients,
        offsets,
        max_j,
        double,
    })
}

/// Matrix of the `k`-th face contribution `C^j(σ) → C^j(τ)`, `σ = ∂_k τ`.
fn face_map(
    algebras: &AlgebraPresheaf,
    modules: &BimodulePresheaf,
    sigma: &NerveSimplex,
    tau: &NerveSimplex,
    k: usize,
    j: usize,
) -> FpMatrix {
    let field = algebras.field();
    let top = tau.dim();
    if k == 0 && top > 0 {
        // min changes: postcompose ℳ(σ_min) → ℳ(τ_min)
        let rho = modules.restriction(sigma.min(), tau.min());
        let tuples = algebras.algebra(tau.max()).dim().pow(j as u32);
        postcompose_matrix(&rho, tuples)
    } else if k == top {
        // max changes: precompose 𝒜(τ_max) → 𝒜(σ_max)
        let rho = algebras.restriction(tau.max(), sigma.max());
        precompose_matrix(&rho, j, modules.module(tau.min()).dim())
    } else {
        let d = algebras.algebra(tau.max()).dim().pow(j as u32) * modules.module(tau.min()).dim();
        FpMatrix::identity(field, d)
    }
}

/// `f ↦ ρ ∘ f` on `j`-cochains with `tuples` input tuples.
fn postcompose_matrix(rho: &FpMatrix, tuples: usize) -> FpMatrix {
    let (dm_out, dm_in) = (rho.rows(), rho.cols());
    let mut m = FpMatrix::zeros(rho.field(), tuples * dm_out, tuples * dm_in);
    for t in 0..tuples {
        m.set_block(t * dm_out, t * dm_in, rho);
    }
    m
}

/// `f ↦ f ∘ ρ^{⊗j}` where `ρ: 𝒜' → 𝒜` and `f` is a cochain on `𝒜`.
fn precompose_matrix(rho: &FpMatrix, j: usize, dm: usize) -> FpMatrix {
    let field = rho.field();
    let (d_small, d_big) = (rho.rows(), rho.cols());
    let n_big = d_big.pow(j as u32);
    let n_small = d_small.pow(j as u32);
    let mut m = FpMatrix::zeros(field, n_big * dm, n_small * dm);
    for t in 0..n_big {
        let td = digits(t, d_big, j);
        for s in 0..n_small {
            let sd = digits(s, d_small, j);
            let mut c = 1;
            for l in 0..j {
                c = field.mul(c, rho.get(sd[l], td[l]));
                if c == 0 {
                    break;
                }
            }
            if c != 0 {
                for x in 0..dm {
                    m.set(t * dm + x, s * dm + x, c);
                }
            }
        }
    }
    m
}

fn digits(mut t: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for k in (0..len).rev() {
        out[k] = t % base;
        t /= base;
    }
    out
}

fn precompose(c: &HochschildCochain, rho: &FpMatrix) -> HochschildCochain {
    let m = precompose_matrix(rho, c.degree, c.dim_m);
    HochschildCochain::from_values(c.degree, rho.cols(), c.dim_m, m.mul_vec(&c.values)).expect("shape")
}

fn postcompose(c: &HochschildCochain, rho: &FpMatrix) -> HochschildCochain {
    let m = postcompose_matrix(rho, c.dim_a.pow(c.degree as u32));
    HochschildCochain::from_values(c.degree, c.dim_a, rho.rows(), m.mul_vec(&c.values)).expect("shape")
}

impl GSComplex {
    pub fn double(&self) -> &DoubleComplex {
        &self.double
    }

    pub fn nerve(&self) -> &[Vec<NerveSimplex>] {
        &self.nerve
    }

    /// Rows `0..=max_j` are certified.
    pub fn max_j(&self) -> usize {
        self.max_j
    }

    pub fn algebras(&self) -> &AlgebraPresheaf {
        &self.algebras
    }

    /// `ℳ(min σ)` as an `𝒜(max σ)`-bimodule.
    pub fn coefficient(&self, i: usize, k: usize) -> &Bimodule {
        &self.coefficients[i][k]
    }

    pub fn zero(&self, i: usize, j: usize) -> GSCochain {
        GSCochain {
            i,
            j,
            values: vec![0; self.double.dim(i, j)],
        }
    }

    pub fn cochain(&self, i: usize, j: usize, values: Vec<u32>) -> Result<GSCochain> {
        if i > self.double.imax() || j > self.double.jmax() || values.len() != self.double.dim(i, j) {
            return Err(Error::DimensionMismatch(format!("no cochain space of this size at ({i},{j})")));
        }
        Ok(GSCochain { i, j, values })
    }

    /// The component of `α` at the `k`-th simplex of `N^i`.
    pub fn component(&self, alpha: &GSCochain, k: usize) -> HochschildCochain {
        let off = &self.offsets[alpha.i][alpha.j];
        let s = &self.nerve[alpha.i][k];
        HochschildCochain::from_values(
            alpha.j,
            self.algebras.algebra(s.max()).dim(),
            self.modules.module(s.min()).dim(),
            alpha.values[off[k]..off[k + 1]].to_vec(),
        )
        .expect("component shape")
    }

    /// The `(0,0)` cochain `σ ↦ 1 ∈ ℳ(σ)`.
    pub fn unit(&self) -> Result<GSCochain> {
        let mut values = Vec::new();
        for k in 0..self.nerve[0].len() {
            let m = self.modules.module(self.nerve[0][k].min());
            let prod = m.product().ok_or_else(|| Error::MissingProduct("coefficient presheaf".into()))?;
            values.extend_from_slice(prod.unit());
        }
        self.cochain(0, 0, values)
    }

    /// `d_h α` in bidegree `(i+1, j)`.
    pub fn horizontal(&self, alpha: &GSCochain) -> Result<GSCochain> {
        if alpha.i >= self.double.imax() {
            return Ok(GSCochain {
                i: alpha.i + 1,
                j: alpha.j,
                values: Vec::new(),
            });
        }
        let v = self.double.dh(alpha.i, alpha.j).mul_vec(&alpha.values);
        self.cochain(alpha.i + 1, alpha.j, v)
    }

    /// The signed vertical part `(−1)^i d_v α` in bidegree `(i, j+1)`.
    pub fn vertical(&self, alpha: &GSCochain) -> Result<GSCochain> {
        if alpha.j >= self.double.jmax() {
            return Err(Error::DegreeOutOfRange(alpha.j as i64 + 1));
        }
        let v = self.double.dv(alpha.i, alpha.j).mul_vec(&alpha.values);
        self.cochain(alpha.i, alpha.j + 1, v)
    }
}

/// `(α ∪ β)^σ = Σ_{σ = τ∪ν} (−1)^{|ν|(m−|τ|)} α^τ φ_𝒜 ∪ φ_ℳ β^ν`, with `τ`
/// the front face of length `|α|_h`, `ν` the back face and `m` the total
/// degree of `α`.
pub fn gs_cup(complex: &GSComplex, alpha: &GSCochain, beta: &GSCochain) -> Result<GSCochain> {
    if !complex.modules.has_products() {
        return Err(Error::MissingProduct("coefficient presheaf".into()));
    }
    let (i, j) = (alpha.i + beta.i, alpha.j + beta.j);
    if i > complex.double.imax() || j > complex.double.jmax() {
        return Err(Error::DegreeOutOfRange((i + j) as i64));
    }
    let field = complex.algebras.field();
    let sign = if (beta.i * alpha.j) % 2 == 0 { 1 } else { field.p() - 1 };
    let mut out = complex.zero(i, j);
    let off = &complex.offsets[i][j];
    for (k, sigma) in complex.nerve[i].iter().enumerate() {
        let tau = sigma.front(alpha.i);
        let nu = sigma.back(alpha.i);
        let kt = complex.nerve[alpha.i].binary_search_by(|x| x.chain.cmp(&tau.chain)).expect("front face");
        let kn = complex.nerve[beta.i].binary_search_by(|x| x.chain.cmp(&nu.chain)).expect("back face");
        let a = precompose(
            &complex.component(alpha, kt),
            &complex.algebras.restriction(sigma.max(), tau.max()),
        );
        let b = postcompose(&complex.component(beta, kn), &complex.modules.restriction(nu.min(), sigma.min()));
        let c = cup_product(complex.algebras.algebra(sigma.max()), &complex.coefficients[i][k], &a, &b)?;
        for (x, v) in out.values[off[k]..off[k + 1]].iter_mut().zip(c.values) {
            *x = field.mul(sign, v);
        }
    }
    Ok(out)
}

/// The GS complex of a single algebra on the one-point poset.
pub fn point_complex(a: &StructAlgebra, m: &Bimodule, max_j: usize) -> Result<GSComplex> {
    let poset = super::poset::Poset::point();
    let alg = AlgebraPresheaf::new(poset, vec![a.clone()], Default::default())?;
    let modules = BimodulePresheaf::new(&alg, vec![m.clone()], Default::default())?;
    build_gs_complex(&alg, &modules, 0, max_j)
}

fn combine(field: crate::gfp::PrimeField, x: &GSCochain, y: &GSCochain, sign: u32) -> GSCochain {
    GSCochain {
        i: x.i,
        j: x.j,
        values: x.values.iter().zip(&y.values).map(|(&a, &b)| field.add(a, field.mul(sign, b))).collect(),
    }
}

/// Check `D(α∪β) = Dα∪β + (−1)^{|α|} α∪Dβ` in every bidegree that lies in
/// the complex. Returns the number of bidegree components compared, or
/// `None` on a mismatch.
pub fn check_leibniz(complex: &GSComplex, alpha: &GSCochain, beta: &GSCochain) -> Result<Option<usize>> {
    let field = complex.algebras.field();
    let sign = if (alpha.i + alpha.j) % 2 == 0 { 1 } else { field.p() - 1 };
    let ab = gs_cup(complex, alpha, beta)?;
    let (imax, jmax) = (complex.double.imax(), complex.double.jmax());
    let mut compared = 0;
    if ab.i < imax {
        let lhs = complex.horizontal(&ab)?;
        let rhs = combine(
            field,
            &gs_cup(complex, &complex.horizontal(alpha)?, beta)?,
            &gs_cup(complex, alpha, &complex.horizontal(beta)?)?,
            sign,
        );
        if lhs != rhs {
            return Ok(None);
        }
        compared += 1;
    }
    if ab.j < jmax {
        let lhs = complex.vertical(&ab)?;
        let rhs = combine(
            field,
            &gs_cup(complex, &complex.vertical(alpha)?, beta)?,
            &gs_cup(complex, alpha, &complex.vertical(beta)?)?,
            sign,
        );
        if lhs != rhs {
            return Ok(None);
        }
        compared += 1;
    }
    Ok(Some(compared))
}
