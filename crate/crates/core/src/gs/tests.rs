use super::*;
use crate::gfp::PrimeField;
use crate::hochschild::{bar_complex, bar_differential, Bimodule, StructAlgebra};
use crate::linalg::FpMatrix;

fn field(p: u32) -> PrimeField {
    PrimeField::new(p).unwrap()
}

/// `k[x]/(x^3) → k[x]/(x^2) → k` on the chain `W < V < U`.
pub(super) fn truncation_chain(p: u32) -> (AlgebraPresheaf, BimodulePresheaf) {
    let f = field(p);
    let poset = Poset::from_sets(vec!["W".into(), "V".into(), "U".into()], vec![0b001, 0b011, 0b111]).unwrap();
    let algs = vec![
        StructAlgebra::ground(f),
        StructAlgebra::truncated_poly(f, 2).unwrap(),
        StructAlgebra::truncated_poly(f, 3).unwrap(),
    ];
    let quotient = |rows: usize, cols: usize| {
        let mut m = FpMatrix::zeros(f, rows, cols);
        for k in 0..rows {
            m.set(k, k, 1);
        }
        m
    };
    let mut maps = Restrictions::new();
    maps.insert((1, 0), quotient(1, 2));
    maps.insert((2, 0), quotient(1, 3));
    maps.insert((2, 1), quotient(2, 3));
    let a = AlgebraPresheaf::new(poset, algs, maps).unwrap();
    let m = BimodulePresheaf::regular(&a).unwrap();
    (a, m)
}

#[test]
fn point_poset_is_the_bar_complex() {
    for p in [2, 5] {
        let a = StructAlgebra::matrix_algebra(field(p), 2).unwrap();
        let m = Bimodule::regular(&a);
        let gs = point_complex(&a, &m, 2).unwrap();
        let bar = bar_complex(&a, &m, 2).unwrap();
        for j in 0..3 {
            assert_eq!(gs.double().dv(0, j), &bar_differential(&a, &m, j).unwrap());
            assert_eq!(gs.double().dv(0, j), bar.differential(j as i64).unwrap());
        }
        let tot = gs.double().totalize().unwrap().cohomology_dims();
        assert_eq!(&tot[..3], &[1, 0, 0]);
    }
}

#[test]
fn contractible_chain() {
    let f = field(3);
    let k = StructAlgebra::ground(f);
    let a = AlgebraPresheaf::constant(Poset::chain2(), &k).unwrap();
    let m = BimodulePresheaf::regular(&a).unwrap();
    let gs = build_gs_complex(&a, &m, 4, 2).unwrap();
    let tot = gs.double().totalize().unwrap().cohomology_dims();
    assert_eq!(&tot[..3], &[1, 0, 0]);
}

#[test]
fn two_components() {
    let f = field(2);
    let k = StructAlgebra::ground(f);
    let a = AlgebraPresheaf::constant(Poset::discrete(2).unwrap(), &k).unwrap();
    let m = BimodulePresheaf::regular(&a).unwrap();
    let gs = build_gs_complex(&a, &m, 4, 1).unwrap();
    assert_eq!(gs.double().totalize().unwrap().cohomology_dims()[0], 2);
}

#[test]
fn restrictions_must_be_algebra_maps() {
    let f = field(3);
    let poset = Poset::chain2();
    let algs = vec![StructAlgebra::ground(f), StructAlgebra::truncated_poly(f, 2).unwrap()];
    let mut maps = Restrictions::new();
    maps.insert((1, 0), FpMatrix::from_rows(f, &[vec![0, 1]]));
    assert!(AlgebraPresheaf::new(poset, algs, maps).is_err());
}

#[test]
fn gs_cup_unit_and_point_reduction() {
    let f = field(3);
    let a = StructAlgebra::truncated_poly(f, 2).unwrap();
    let m = Bimodule::regular(&a);
    let gs = point_complex(&a, &m, 2).unwrap();
    let unit = gs.unit().unwrap();
    let beta = gs.cochain(0, 1, vec![1, 2, 0, 1]).unwrap();
    assert_eq!(gs_cup(&gs, &unit, &beta).unwrap(), beta);
    let x = crate::hochschild::HochschildCochain::from_values(1, 2, 2, vec![2, 1, 1, 0]).unwrap();
    let y = crate::hochschild::HochschildCochain::from_values(1, 2, 2, vec![0, 1, 2, 2]).unwrap();
    let direct = crate::hochschild::cup_product(&a, &m, &x, &y).unwrap();
    let via = gs_cup(&gs, &gs.cochain(0, 1, x.values).unwrap(), &gs.cochain(0, 1, y.values).unwrap()).unwrap();
    assert_eq!(via.values, direct.values);
}

#[test]
fn gs_cup_leibniz_on_chain() {
    use rand::{Rng, SeedableRng};
    let (a, m) = truncation_chain(3);
    let gs = build_gs_complex(&a, &m, 4, 1).unwrap();
    assert_eq!(gs.double().imax(), 2);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let mut compared = 0;
    for _ in 0..40 {
        for (i1, j1, i2, j2) in [(0, 0, 0, 0), (0, 1, 1, 0), (1, 0, 0, 1), (1, 0, 0, 0), (0, 0, 1, 1)] {
            let mut rand_cochain = |i: usize, j: usize| {
                let n = gs.double().dim(i, j);
                gs.cochain(i, j, (0..n).map(|_| rng.gen_range(0..3)).collect()).unwrap()
            };
            let x = rand_cochain(i1, j1);
            let y = rand_cochain(i2, j2);
            compared += check_leibniz(&gs, &x, &y).unwrap().expect("Leibniz");
        }
    }
    assert!(compared > 100);
}

#[test]
fn missing_product() {
    let f = field(2);
    let a = StructAlgebra::truncated_poly(f, 2).unwrap();
    let plain = Bimodule::new(&a, 2, (0..2).map(|i| a.left_mult(i)).collect(), (0..2).map(|i| a.right_mult(i)).collect()).unwrap();
    let gs = point_complex(&a, &plain, 1).unwrap();
    let z = gs.zero(0, 0);
    assert!(matches!(gs_cup(&gs, &z, &z), Err(crate::Error::MissingProduct(_))));
}

fn laurent_cech(d: i64, twist: i64) -> (Poset, CoefficientPresheaf) {
    // U0: s^0..s^d; U1: u^0..u^d mapped to s^{-c-twist}; U01: s^{-d-twist}..s^d
    let f = field(5);
    let poset = Poset::two_chart();
    let b0: Vec<i64> = (0..=d).collect();
    let b1: Vec<i64> = (0..=d).map(|c| -c - twist).collect();
    let b01: Vec<i64> = (-d - twist..=d).collect();
    let incl = |src: &[i64]| {
        let mut m = FpMatrix::zeros(f, b01.len(), src.len());
        for (c, e) in src.iter().enumerate() {
            m.set(b01.iter().position(|x| x == e).unwrap(), c, 1);
        }
        m
    };
    let mut maps = Restrictions::new();
    maps.insert((0, 2), incl(&b0));
    maps.insert((1, 2), incl(&b1));
    let sheaf = CoefficientPresheaf::new(&poset, f, vec![b0.len(), b1.len(), b01.len()], maps).unwrap();
    (poset, sheaf)
}

#[test]
fn cech_corpus() {
    let f = field(5);
    let one = Poset::point();
    let r = nerve_vs_cech(&one, &[0], &CoefficientPresheaf::constant(&one, f, 3)).unwrap();
    assert_eq!((r.nerve_dims.clone(), r.agree), (vec![3], true));

    let (p1, o) = laurent_cech(4, 0);
    let r = nerve_vs_cech(&p1, &[0, 1], &o).unwrap();
    assert_eq!(r.cech_dims, vec![1]);
    assert!(r.agree);

    let (p1, o) = laurent_cech(4, 2);
    let r = nerve_vs_cech(&p1, &[0, 1], &o).unwrap();
    assert_eq!(r.cech_dims, vec![0, 1]);
    assert!(r.agree);

    // three opens meeting pairwise with empty triple intersection
    let circle = Poset::from_sets(
        ["A", "B", "C", "ab", "bc", "ca"].iter().map(|s| s.to_string()).collect(),
        vec![0b011, 0b110, 0b101, 0b010, 0b100, 0b001],
    )
    .unwrap();
    let r = nerve_vs_cech(&circle, &[0, 1, 2], &CoefficientPresheaf::constant(&circle, f, 1)).unwrap();
    assert_eq!(r.nerve_dims, vec![1, 1]);
    assert!(r.agree);

    let open = Poset::from_sets(vec!["a".into(), "b".into()], vec![0b011, 0b110]).unwrap();
    assert!(nerve_vs_cech(&open, &[0, 1], &CoefficientPresheaf::constant(&open, f, 1)).is_err());
}

#[test]
fn affine_scenario() {
    let r = gs_for_subalgebra_scenario(field(2), CoverModel::affine_line(), 1, 6, 8).unwrap();
    assert!(r.e2_row_zero && r.converges && r.e2_matches_cech);
    assert_eq!(r.hh0_generators, ["1", "x^2", "x^4", "x^6", "x^8"]);
    assert_eq!(r.total_dims, vec![5, 0, 0]);
    assert!(r.morita_checked.unwrap() > 0);
}

#[test]
fn projective_scenario() {
    for depth in 0..=2 {
        let r = gs_for_subalgebra_scenario(field(2), CoverModel::projective_line(), depth, 6, 8).unwrap();
        assert!(r.e2_row_zero && r.converges && r.e2_matches_cech, "{r:?}");
        assert_eq!(r.total_dims, vec![1, 0, 0]);
        assert_eq!(r.hh0_generators, ["1"]);
    }
}

#[test]
fn point_scenario_matches_hh_pair() {
    let r = gs_for_subalgebra_scenario(field(3), CoverModel::point(), 0, 5, 7).unwrap();
    let direct = crate::hochschild::hh_of_pair(field(3), 1, 0, 5, 7).unwrap();
    assert_eq!(r.total_dims[0], direct.dims[0]);
    assert_eq!(r.total_dims[1], direct.dims[1]);
}

#[test]
fn edge_map_is_multiplicative() {
    let model = SubalgebraModel::build(field(3), CoverModel::affine_line(), 1, 4, 18).unwrap();
    let e = model.edge_multiplicativity().unwrap();
    assert!(e.passed(), "{e:?}");
}
