use std::collections::BTreeMap;

use super::poset::Poset;
use crate::error::{Error, Result};
use crate::gfp::PrimeField;
use crate::hochschild::{Bimodule, StructAlgebra};
use crate::linalg::FpMatrix;

/// Restriction maps `F(v) → F(u)` for `u < v`, keyed by `(v, u)`.
pub type Restrictions = BTreeMap<(usize, usize), FpMatrix>;

fn check_functorial(poset: &Poset, dims: &[usize], maps: &Restrictions, field: PrimeField) -> Result<()> {
    for u in 0..poset.len() {
        for v in 0..poset.len() {
            if poset.lt(u, v) {
                let m = maps
                    .get(&(v, u))
                    .ok_or_else(|| Error::InvalidStructure(format!("missing restriction {} → {}", poset.name(v), poset.name(u))))?;
                if m.rows() != dims[u] || m.cols() != dims[v] || m.field() != field {
                    return Err(Error::DimensionMismatch(format!(
                        "restriction {} → {} has the wrong shape",
                        poset.name(v),
                        poset.name(u)
                    )));
                }
            }
        }
    }
    for w in 0..poset.len() {
        for v in 0..poset.len() {
            for u in 0..poset.len() {
                if poset.lt(u, v) && poset.lt(v, w) && maps[&(v, u)].mul(&maps[&(w, v)]) != maps[&(w, u)] {
                    return Err(Error::InvalidStructure(format!(
                        "restrictions {} → {} → {} do not compose",
                        poset.name(w),
                        poset.name(v),
                        poset.name(u)
                    )));
                }
            }
        }
    }
    Ok(())
}

fn restriction(maps: &Restrictions, field: PrimeField, dim: usize, from: usize, to: usize) -> FpMatrix {
    if from == to {
        FpMatrix::identity(field, dim)
    } else {
        maps[&(from, to)].clone()
    }
}

/// `U ↦ 𝒜(U)` with unital algebra restriction maps.
#[derive(Debug, Clone)]
pub struct AlgebraPresheaf {
    poset: Poset,
    algebras: Vec<StructAlgebra>,
    restrictions: Restrictions,
}

impl AlgebraPresheaf {
    pub fn new(poset: Poset, algebras: Vec<StructAlgebra>, restrictions: Restrictions) -> Result<Self> {
        if algebras.len() != poset.len() {
            return Err(Error::DimensionMismatch("one algebra per open is required".into()));
        }
        let field = algebras[0].field();
        let dims: Vec<usize> = algebras.iter().map(StructAlgebra::dim).collect();
        check_functorial(&poset, &dims, &restrictions, field)?;
        for (&(v, u), m) in &restrictions {
            algebras[v].check_algebra_map(&algebras[u], m)?;
        }
        Ok(AlgebraPresheaf {
            poset,
            algebras,
            restrictions,
        })
    }

    /// The same algebra everywhere, identity restrictions.
    pub fn constant(poset: Poset, a: &StructAlgebra) -> Result<Self> {
        let mut maps = Restrictions::new();
        for u in 0..poset.len() {
            for v in 0..poset.len() {
                if poset.lt(u, v) {
                    maps.insert((v, u), FpMatrix::identity(a.field(), a.dim()));
                }
            }
        }
        Self::new(poset.clone(), vec![a.clone(); poset.len()], maps)
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn field(&self) -> PrimeField {
        self.algebras[0].field()
    }

    pub fn algebra(&self, u: usize) -> &StructAlgebra {
        &self.algebras[u]
    }

    /// `𝒜(from) → 𝒜(to)` for `to ≤ from`.
    pub fn restriction(&self, from: usize, to: usize) -> FpMatrix {
        restriction(&self.restrictions, self.field(), self.algebras[from].dim(), from, to)
    }
}

/// `U ↦ ℳ(U)`, an `𝒜(U)`-bimodule, with bimodule restriction maps along
/// those of `𝒜`. Built from algebra maps `𝒜(U) → ℬ(U)` it carries the
/// products needed for the cup product.
#[derive(Debug, Clone)]
pub struct BimodulePresheaf {
    modules: Vec<Bimodule>,
    restrictions: Restrictions,
}

impl BimodulePresheaf {
    pub fn new(algebras: &AlgebraPresheaf, modules: Vec<Bimodule>, restrictions: Restrictions) -> Result<Self> {
        let poset = algebras.poset();
        if modules.len() != poset.len() {
            return Err(Error::DimensionMismatch("one bimodule per open is required".into()));
        }
        let dims: Vec<usize> = modules.iter().map(Bimodule::dim).collect();
        check_functorial(poset, &dims, &restrictions, algebras.field())?;
        // ρ(a·m·b) = ρ(a)·ρ(m)·ρ(b)
        for (&(v, u), rho) in &restrictions {
            let ra = algebras.restriction(v, u);
            for i in 0..algebras.algebra(v).dim() {
                let img = ra.col(i);
                let mut l = FpMatrix::zeros(algebras.field(), dims[u], dims[u]);
                let mut r = l.clone();
                for (k, &c) in img.iter().enumerate() {
                    if c != 0 {
                        l = l.add(&modules[u].left(k).scale(c));
                        r = r.add(&modules[u].right(k).scale(c));
                    }
                }
                if l.mul(rho) != rho.mul(modules[v].left(i)) || r.mul(rho) != rho.mul(modules[v].right(i)) {
                    return Err(Error::InvalidStructure(format!(
                        "restriction {} → {} is not a bimodule map",
                        poset.name(v),
                        poset.name(u)
                    )));
                }
            }
        }
        Ok(BimodulePresheaf { modules, restrictions })
    }

    /// `ℳ(U) = 𝒜(U)`.
    pub fn regular(algebras: &AlgebraPresheaf) -> Result<Self> {
        let n = algebras.poset().len();
        let modules = (0..n).map(|u| Bimodule::regular(algebras.algebra(u))).collect();
        let mut maps = Restrictions::new();
        for u in 0..n {
            for v in 0..n {
                if algebras.poset().lt(u, v) {
                    maps.insert((v, u), algebras.restriction(v, u));
                }
            }
        }
        Self::new(algebras, modules, maps)
    }

    pub fn module(&self, u: usize) -> &Bimodule {
        &self.modules[u]
    }

    /// `ℳ(from) → ℳ(to)` for `to ≤ from`.
    pub fn restriction(&self, from: usize, to: usize) -> FpMatrix {
        let m = &self.modules[from];
        restriction(&self.restrictions, m.field(), m.dim(), from, to)
    }

    /// True when every `ℳ(U)` carries a product and the restrictions
    /// respect it.
    pub fn has_products(&self) -> bool {
        self.modules.iter().all(|m| m.product().is_some())
            && self.restrictions.iter().all(|(&(v, u), rho)| {
                let (Some(bv), Some(bu)) = (self.modules[v].product(), self.modules[u].product()) else {
                    return false;
                };
                bv.check_algebra_map(bu, rho).is_ok()
            })
    }
}

/// Presheaf of vector spaces `U ↦ 𝓕(U)` with restriction matrices.
#[derive(Debug, Clone)]
pub struct CoefficientPresheaf {
    pub field: PrimeField,
    pub dims: Vec<usize>,
    restrictions: Restrictions,
}

impl CoefficientPresheaf {
    pub fn new(poset: &Poset, field: PrimeField, dims: Vec<usize>, restrictions: Restrictions) -> Result<Self> {
        if dims.len() != poset.len() {
            return Err(Error::DimensionMismatch("one space per open is required".into()));
        }
        check_functorial(poset, &dims, &restrictions, field)?;
        Ok(CoefficientPresheaf {
            field,
            dims,
            restrictions,
        })
    }

    /// `k^d` everywhere with identity restrictions.
    pub fn constant(poset: &Poset, field: PrimeField, d: usize) -> Self {
        let mut maps = Restrictions::new();
        for u in 0..poset.len() {
            for v in 0..poset.len() {
                if poset.lt(u, v) {
                    maps.insert((v, u), FpMatrix::identity(field, d));
                }
            }
        }
        Self::new(poset, field, vec![d; poset.len()], maps).expect("constant presheaf")
    }

    pub fn restriction(&self, from: usize, to: usize) -> FpMatrix {
        restriction(&self.restrictions, self.field, self.dims[from], from, to)
    }
}
