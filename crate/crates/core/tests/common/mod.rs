//! Random double complexes with a known total cohomology.

use hhdx_core::gfp::PrimeField;
use hhdx_core::linalg::{DoubleComplex, FpMatrix};
use rand::Rng;

/// A basis vector at `(i, j)` and the unit edges of `d_h`, `d_v` between them.
#[derive(Default)]
struct Pieces {
    cells: Vec<(usize, usize)>,
    dh: Vec<(usize, usize)>,
    dv: Vec<(usize, usize)>,
}

impl Pieces {
    fn push(&mut self, i: usize, j: usize) -> usize {
        self.cells.push((i, j));
        self.cells.len() - 1
    }
}

fn random_invertible(field: PrimeField, n: usize, rng: &mut impl Rng) -> (FpMatrix, FpMatrix) {
    loop {
        let mut g = FpMatrix::zeros(field, n, n);
        for r in 0..n {
            for c in 0..n {
                g.set(r, c, rng.gen_range(0..field.p()));
            }
        }
        if g.rank() == n {
            let cols: Vec<Vec<u32>> = (0..n)
                .map(|k| {
                    let mut e = vec![0; n];
                    e[k] = 1;
                    g.solve(&e).unwrap()
                })
                .collect();
            return (g.clone(), FpMatrix::from_cols(field, n, &cols));
        }
    }
}

pub struct RandomDoubleComplex {
    pub complex: DoubleComplex,
    /// Total cohomology predicted from the pieces: one class per dot and per
    /// staircase, none from arrows and squares.
    pub expected_total: Vec<usize>,
    pub staircases: usize,
}

/// Dots, arrows, commuting squares and staircases (which carry nonzero
/// higher differentials), mixed by a random change of basis in every cell.
pub fn random_double_complex(rng: &mut impl Rng) -> RandomDoubleComplex {
    let p = [2u32, 3, 5, 7][rng.gen_range(0..4)];
    let field = PrimeField::new(p).unwrap();
    let (imax, jmax) = (rng.gen_range(1..4usize), rng.gen_range(1..4usize));
    let mut pieces = Pieces::default();
    let mut expected = vec![0; imax + jmax + 1];
    let mut staircases = 0;
    for _ in 0..rng.gen_range(1..7) {
        let i = rng.gen_range(0..=imax);
        let j = rng.gen_range(0..=jmax);
        match rng.gen_range(0..5) {
            0 => {
                pieces.push(i, j);
                expected[i + j] += 1;
            }
            1 if i < imax => {
                let a = pieces.push(i, j);
                let b = pieces.push(i + 1, j);
                pieces.dh.push((a, b));
            }
            2 if j < jmax => {
                let a = pieces.push(i, j);
                let b = pieces.push(i, j + 1);
                pieces.dv.push((a, b));
            }
            3 if i < imax && j < jmax => {
                let a = pieces.push(i, j);
                let b = pieces.push(i + 1, j);
                let c = pieces.push(i, j + 1);
                let d = pieces.push(i + 1, j + 1);
                pieces.dh.extend([(a, b), (c, d)]);
                pieces.dv.extend([(a, c), (b, d)]);
            }
            4 => {
                // a_0 → b_0 ← a_1 → b_1 ← … ← a_L, a_k at (i+k, j−k)
                let len = rng.gen_range(1..=j.min(imax - i.min(imax)).max(1));
                if j < len || i + len > imax {
                    continue;
                }
                let mut prev_b = None;
                for k in 0..=len {
                    let a = pieces.push(i + k, j - k);
                    if let Some(b) = prev_b {
                        pieces.dv.push((a, b));
                    }
                    if k < len {
                        let b = pieces.push(i + k + 1, j - k);
                        pieces.dh.push((a, b));
                        prev_b = Some(b);
                    }
                }
                expected[i + j] += 1;
                staircases += 1;
            }
            _ => {}
        }
    }

    // position of each piece vector inside its cell
    let mut dims = vec![vec![0usize; jmax + 1]; imax + 1];
    let slot: Vec<usize> = pieces
        .cells
        .iter()
        .map(|&(i, j)| {
            dims[i][j] += 1;
            dims[i][j] - 1
        })
        .collect();
    let gauge: Vec<Vec<(FpMatrix, FpMatrix)>> = dims
        .iter()
        .map(|col| col.iter().map(|&n| random_invertible(field, n, rng)).collect())
        .collect();
    let assemble = |edges: &[(usize, usize)], di: usize, dj: usize| -> Vec<Vec<FpMatrix>> {
        let (ni, nj) = (imax + 1 - di, jmax + 1 - dj);
        (0..ni)
            .map(|i| {
                (0..nj)
                    .map(|j| {
                        let mut m = FpMatrix::zeros(field, dims[i + di][j + dj], dims[i][j]);
                        for &(s, t) in edges {
                            if pieces.cells[s] == (i, j) {
                                m.set(slot[t], slot[s], 1);
                            }
                        }
                        gauge[i + di][j + dj].0.mul(&m).mul(&gauge[i][j].1)
                    })
                    .collect()
            })
            .collect()
    };
    let dh = assemble(&pieces.dh, 1, 0);
    let dv = assemble(&pieces.dv, 0, 1);
    let complex = DoubleComplex::from_commuting(field, dims, dh, dv).expect("commuting pieces");
    RandomDoubleComplex {
        complex,
        expected_total: expected,
        staircases,
    }
}
