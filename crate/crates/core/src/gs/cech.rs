use serde::Serialize;

use super::poset::Poset;
use super::presheaf::CoefficientPresheaf;
use crate::error::{Error, Result};
use crate::linalg::{CochainComplex, FpMatrix};

/// Dimension tables from the poset nerve and from the Čech complex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CechComparison {
    pub nerve_dims: Vec<usize>,
    pub cech_dims: Vec<usize>,
    pub agree: bool,
}

/// Cochains `C^i = ⊕_{σ ∈ N^i} 𝓕(min σ)` with the alternating face sum;
/// only the face dropping the minimum restricts.
pub fn nerve_complex(poset: &Poset, sheaf: &CoefficientPresheaf) -> Result<CochainComplex> {
    let nerve = poset.nerve()?;
    let field = sheaf.field;
    let dims: Vec<usize> = nerve.iter().map(|l| l.iter().map(|s| sheaf.dims[s.min()]).sum()).collect();
    let offsets: Vec<Vec<usize>> = nerve
        .iter()
        .map(|l| {
            l.iter()
                .scan(0, |acc, s| {
                    let o = *acc;
                    *acc += sheaf.dims[s.min()];
                    Some(o)
                })
                .collect()
        })
        .collect();
    let mut diffs = Vec::new();
    for i in 0..nerve.len() - 1 {
        let mut m = FpMatrix::zeros(field, dims[i + 1], dims[i]);
        for (t, tau) in nerve[i + 1].iter().enumerate() {
            for k in 0..=i + 1 {
                let sigma = tau.face(k);
                let s = nerve[i].binary_search_by(|x| x.chain.cmp(&sigma.chain)).expect("face in nerve");
                let block = sheaf.restriction(sigma.min(), tau.min());
                let block = if k % 2 == 0 { block } else { block.scale(field.p() - 1) };
                add_block(&mut m, offsets[i + 1][t], offsets[i][s], &block);
            }
        }
        diffs.push(m);
    }
    CochainComplex::new(field, 0, dims, diffs)
}

fn add_block(m: &mut FpMatrix, r0: usize, c0: usize, block: &FpMatrix) {
    for r in 0..block.rows() {
        for c in 0..block.cols() {
            let v = block.get(r, c);
            if v != 0 {
                m.add_to(r0 + r, c0 + c, v);
            }
        }
    }
}

/// Alternating Čech complex of the cover `cover` (indices into the poset),
/// with `C^i = ⊕_{c_0 < ⋯ < c_i} 𝓕(U_{c_0} ∩ ⋯ ∩ U_{c_i})` over nonempty
/// intersections.
pub fn cech_complex(poset: &Poset, cover: &[usize], sheaf: &CoefficientPresheaf) -> Result<CochainComplex> {
    let field = sheaf.field;
    let n = cover.len();
    // subsets of the cover, grouped by size, with their intersection element
    let mut levels: Vec<Vec<(u32, usize)>> = vec![Vec::new(); n];
    for mask in 1u32..(1 << n) {
        let inter = (0..n).filter(|b| mask & (1 << b) != 0).fold(!0u64, |acc, b| acc & poset.set(cover[b]));
        if inter == 0 {
            continue;
        }
        let elem = poset
            .index_of(inter)
            .ok_or_else(|| Error::InvalidStructure("cover not intersection-closed".into()))?;
        levels[mask.count_ones() as usize - 1].push((mask, elem));
    }
    while levels.last().is_some_and(Vec::is_empty) {
        levels.pop();
    }
    let dims: Vec<usize> = levels.iter().map(|l| l.iter().map(|&(_, e)| sheaf.dims[e]).sum()).collect();
    let offset = |lvl: &[(u32, usize)], idx: usize| -> usize { lvl[..idx].iter().map(|&(_, e)| sheaf.dims[e]).sum() };
    let mut diffs = Vec::new();
    for i in 0..levels.len().saturating_sub(1) {
        let mut m = FpMatrix::zeros(field, dims[i + 1], dims[i]);
        for (t, &(tmask, telem)) in levels[i + 1].iter().enumerate() {
            let members: Vec<usize> = (0..n).filter(|b| tmask & (1 << b) != 0).collect();
            for (k, &b) in members.iter().enumerate() {
                let smask = tmask & !(1 << b);
                let s = levels[i].iter().position(|&(m, _)| m == smask).expect("faces of nonempty intersections are nonempty");
                let selem = levels[i][s].1;
                let block = sheaf.restriction(selem, telem);
                let block = if k % 2 == 0 { block } else { block.scale(field.p() - 1) };
                add_block(&mut m, offset(&levels[i + 1], t), offset(&levels[i], s), &block);
            }
        }
        diffs.push(m);
    }
    CochainComplex::new(field, 0, dims, diffs)
}

/// Compare the cohomology of the poset nerve with coefficients
/// `σ ↦ 𝓕(min σ)` and the Čech cohomology of the cover.
///
/// The poset must consist exactly of the nonempty intersections of cover
/// members.
pub fn nerve_vs_cech(poset: &Poset, cover: &[usize], sheaf: &CoefficientPresheaf) -> Result<CechComparison> {
    if !poset.is_intersection_closed() {
        return Err(Error::InvalidStructure("cover not intersection-closed".into()));
    }
    for u in 0..poset.len() {
        let inter = cover
            .iter()
            .filter(|&&c| poset.leq(u, c))
            .fold(!0u64, |acc, &c| acc & poset.set(c));
        if inter != poset.set(u) {
            return Err(Error::InvalidStructure(format!(
                "{} is not an intersection of cover members",
                poset.name(u)
            )));
        }
    }
    let mut nerve_dims = nerve_complex(poset, sheaf)?.cohomology_dims();
    let mut cech_dims = cech_complex(poset, cover, sheaf)?.cohomology_dims();
    let len = nerve_dims.len().max(cech_dims.len());
    nerve_dims.resize(len, 0);
    cech_dims.resize(len, 0);
    while len > 1 && nerve_dims.last() == Some(&0) && cech_dims.last() == Some(&0) && nerve_dims.len() > 1 {
        nerve_dims.pop();
        cech_dims.pop();
    }
    Ok(CechComparison {
        agree: nerve_dims == cech_dims,
        nerve_dims,
        cech_dims,
    })
}
