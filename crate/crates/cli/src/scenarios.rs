use std::collections::BTreeMap;

use clap::ValueEnum;
use hhdx_core::dpdo::{DPDOperator, MatrixRealization};
use hhdx_core::gfp::{SemilinearMap, MAX_PRIME};
use hhdx_core::gs::{check_leibniz, gs_for_subalgebra_scenario, point_complex, CoverModel, SubalgebraModel};
use hhdx_core::hochschild::{
    bar_complex, bar_differential, hh_of_pair, hochschild_dims, koszul_commutator_complex, koszul_full_complex,
    Bimodule, StructAlgebra,
};
use hhdx_core::linalg::FpMatrix;
use hhdx_core::tower::{
    elliptic_frobenius, filtered_hh_sequence, hasse_invariant, hasse_invariant_cech, proper_case, smith_tower_check,
    ProperDegree, WeierstrassCurve, MAX_TOWER_DEPTH,
};
use hhdx_core::{Error, PrimeField};
use serde_json::{json, Value};

use crate::report::{Certificate, ErrorInfo, Report, ScenarioEcho};

pub const MAX_DEGREE_BOUND: u32 = 1024;
pub const MAX_DP_CAP: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Scenario {
    A1Hh,
    PdDerham,
    MoritaMatrix,
    GsPoint,
    P1Cover,
    Elliptic,
    ProperHh,
    SmithTower,
    CupRingMap,
}

impl Scenario {
    pub fn name(self) -> String {
        self.to_possible_value().expect("named").get_name().to_string()
    }

    /// Elliptic curves need odd characteristic, so those scenarios start at 3.
    pub fn default_prime(self) -> u32 {
        match self {
            Scenario::Elliptic | Scenario::ProperHh => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgebraChoice {
    /// 2×2 matrices
    M2,
    /// k × k
    Kxk,
    /// dual numbers k[x]/x²
    Dual,
    /// the ground field
    Ground,
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub prime: u32,
    pub depth: u32,
    pub degree_bound: u32,
    pub dp_cap: u32,
    pub algebra: AlgebraChoice,
    pub curve: WeierstrassCurve,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunError {
    InvalidPrime(String),
    Capacity(String),
    Engine(Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::InvalidPrime(_) => 3,
            RunError::Capacity(_) => 4,
            RunError::Engine(_) => 1,
        }
    }

    fn info(&self) -> ErrorInfo {
        let (kind, message) = match self {
            RunError::InvalidPrime(m) => ("invalid_prime", m.clone()),
            RunError::Capacity(m) => ("capacity", m.clone()),
            RunError::Engine(e) => ("engine", e.to_string()),
        };
        ErrorInfo {
            kind: kind.into(),
            message,
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::NotPrime(_) | Error::PrimeTooLarge(_) => RunError::InvalidPrime(e.to_string()),
            Error::Capacity(m) => RunError::Capacity(m),
            e => RunError::Engine(e),
        }
    }
}

type Run = Result<(), RunError>;

impl ScenarioConfig {
    fn echo(&self) -> ScenarioEcho {
        let mut params = BTreeMap::new();
        match self.scenario {
            Scenario::GsPoint => {
                let a = self.algebra.to_possible_value().expect("named");
                params.insert("algebra".to_string(), a.get_name().to_string());
            }
            Scenario::Elliptic => {
                params.insert("curve".to_string(), curve_string(&self.curve));
            }
            _ => {}
        }
        ScenarioEcho {
            name: self.scenario.name(),
            prime: self.prime,
            depth: self.depth,
            degree_bound: self.degree_bound,
            dp_cap: self.dp_cap,
            params,
        }
    }

    fn field(&self) -> Result<PrimeField, RunError> {
        Ok(PrimeField::new(self.prime)?)
    }

    fn validate(&self) -> Run {
        if self.prime > MAX_PRIME {
            return Err(RunError::InvalidPrime(format!("{} exceeds the supported bound {MAX_PRIME}", self.prime)));
        }
        self.field()?;
        if self.depth > MAX_TOWER_DEPTH {
            return Err(RunError::Capacity(format!("depth {} exceeds {MAX_TOWER_DEPTH}", self.depth)));
        }
        if self.degree_bound > MAX_DEGREE_BOUND {
            return Err(RunError::Capacity(format!("degree bound {} exceeds {MAX_DEGREE_BOUND}", self.degree_bound)));
        }
        if self.dp_cap == 0 || self.dp_cap > MAX_DP_CAP {
            return Err(RunError::Capacity(format!("divided-power cap must lie in 1..={MAX_DP_CAP}")));
        }
        Ok(())
    }
}

/// Run one scenario. The report is always produced; on error it carries the
/// error and the matching exit code is returned alongside.
pub fn run(config: &ScenarioConfig) -> (Report, Option<RunError>) {
    let mut report = Report::new(config.echo());
    let outcome = config.validate().and_then(|_| match config.scenario {
        Scenario::A1Hh => a1_hh(config, &mut report),
        Scenario::PdDerham => pd_derham(config, &mut report),
        Scenario::MoritaMatrix => morita_matrix(config, &mut report),
        Scenario::GsPoint => gs_point(config, &mut report),
        Scenario::P1Cover => p1_cover(config, &mut report),
        Scenario::Elliptic => elliptic(config, &mut report),
        Scenario::ProperHh => proper_hh(config, &mut report),
        Scenario::SmithTower => smith_tower(config, &mut report),
        Scenario::CupRingMap => cup_ring_map(config, &mut report),
    });
    let err = outcome.err();
    report.error = err.as_ref().map(RunError::info);
    (report.finish(), err)
}

fn dims_row(label: impl Into<Value>, dims: &[usize]) -> Vec<Value> {
    std::iter::once(label.into()).chain(dims.iter().map(|&d| json!(d))).collect()
}

fn a1_hh(cfg: &ScenarioConfig, rep: &mut Report) -> Run {
    let f = cfg.field()?;
    let r = filtered_hh_sequence(f, CoverModel::affine_line(), cfg.depth, cfg.dp_cap, cfg.degree_bound)?;
    rep.table(
        "HH dimensions per stage",
        &["stage", "HH0", "HH1"],
        r.stage_dims.iter().enumerate().map(|(s, d)| dims_row(s, d)),
    );
    rep.table(
        "six-term sequence per degree",
        &["degree", "certificate", "lim sub", "lim ambient", "lim quotient", "coker", "exact"],
        r.rows.iter().map(|row| {
            vec![
                json!(row.degree),
                json!(row.certificate.map(kind_name)),
                json!(row.lim_sub),
                json!(row.lim_ambient),
                json!(row.lim_quotient),
                json!(row.coker),
                json!(row.exact),
            ]
        }),
    );
    for row in &r.rows {
        rep.certificates.push(Certificate {
            subject: "HH0 tower".into(),
            degree: row.degree,
            kind: row.certificate.map(|k| kind_name(k).to_string()),
            stage: None,
        });
    }
    rep.check("HH0 = k", r.hh0_dim == 1, format!("dim HH0 = {}", r.hh0_dim));
    rep.check(
        "restrictions are the Frobenius inclusions",
        r.restriction_is_frobenius_inclusion,
        "k[t^(p^(r+1))] in k[t^(p^r)] at every stage",
    );
    rep.check("HH1 tower vanishes", r.hh1_tower_vanishes, "dim HH1 = 0 at every stage");
    rep.check(
        "six-term sequence exact",
        r.exact_at_certified,
        format!("at the certified degrees {:?}", r.certified_degrees),
    );
    for d in &r.uncertified_degrees {
        rep.uncertified(&format!("exactness in degree {d}"), "the window cannot tell whether this degree survives");
    }
    rep.truncation.notes.push(r.note.clone());
    Ok(())
}

fn kind_name(k: hhdx_core::tower::CertificateKind) -> &'static str {
    use hhdx_core::tower::CertificateKind::*;
    match k {
        Vanishing => "vanishing",
        Periodic => "periodic",
        Permanent => "permanent",
    }
}

fn pd_derham(cfg: &ScenarioConfig, rep: &mut Report) -> Run {
    let f = cfg.field()?;
    let q = cfg.dp_cap;
    let x_bound = 2;
    let mut rows = Vec::new();
    for n in 1..=2usize {
        if q < n as u32 {
            rep.uncertified(&format!("Koszul complex, n = {n}"), "the divided-power cap leaves no certified window");
            continue;
        }
        let k = koszul_commutator_complex(f, n, q)?;
        let certified = k.certified_cohomology();
        let boundary = k.boundary_cohomology();
        let (lo, hi) = k.certified_window();
        rows.push(vec![
            json!(n),
            json!(format!("{lo}..={hi}")),
            json!(certified.clone()),
            json!(boundary.clone()),
        ]);
        let mut expect = vec![0; n + 1];
        expect[0] = 1;
        rep.check(
            &format!("PD-de Rham cohomology, n = {n}"),
            certified == expect,
            format!("certified window gives {certified:?}, expected {expect:?}"),
        );
        if boundary.iter().any(|&d| d > 0) {
            rep.truncation.truncated = true;
            rep.truncation.notes.push(format!(
                "n = {n}: classes {boundary:?} at the divided-power boundary are truncation artefacts"
            ));
        }
        if n == 1 {
            let ranks = k.two_term_ranks();
            let (rank, kernel, target) = ranks.unwrap_or_default();
            rep.check(
                "two-term ranks",
                ranks == Some((q as usize, 1, q as usize)),
                format!("rank {rank}, kernel {kernel}, target {target}: onto the (Q-1)-window"),
            );
        }
        let full = koszul_full_complex(f, n, q, x_bound)?;
        let d0 = full.differential(0).expect("degree 0");
        let functions = (0..=x_bound as usize).map(|a| if n == 1 { 1 } else { a + 1 }).sum::<usize>();
        let kernel = d0.kernel().len();
        rep.check(
            &format!("kernel is the function span, n = {n}"),
            kernel == functions,
            format!("dim ker [x, -] = {kernel}, functions of degree <= {x_bound}: {functions}"),
        );
    }
    rep.table("Koszul commutator complex", &["n", "certified weights", "HH", "boundary"], rows);
    Ok(())
}

fn morita_matrix(cfg: &ScenarioConfig, rep: &mut Report) -> Run {
    let f = cfg.field()?;
    let (r, d) = (cfg.depth, cfg.degree_bound);
    let q = f.p().pow(r);
    let pair = hh_of_pair(f, 1, r, cfg.dp_cap, d)?;
    let functions = (d / q + 1) as usize;
    rep.table(
        "HH of the depth-r pair on the affine line",
        &["degree", "dim"],
        pair.dims.iter().enumerate().map(|(j, &n)| vec![json!(j), json!(n)]),
    );
    rep.check(
        "Morita compression matches the divided-power basis",
        pair.morita_checked > 0,
        format!("{} twisted basis elements compressed", pair.morita_checked),
    );
    rep.check(
        "HH0 is the twist subring",
        pair.dims.first() == Some(&functions) && pair.dims.iter().skip(1).all(|&n| n == 0),
        format!("expected k[x^{q}] up to degree {d}: {functions} monomials"),
    );
    if pair.truncated {
        rep.uncertified("HH at the divided-power boundary", "boundary weights are truncation artefacts");
    }

    let ops: Vec<DPDOperator> = (0..=2u32)
        .flat_map(|a| (0..q).map(move |b| (a, b)))
        .map(|(a, b)| DPDOperator::monomial(f, vec![a], vec![b], 1))
        .collect::<Result<_, _>>()?;
    let one = DPDOperator::one(f, 1).matrix_realize(r, d)?;
    rep.check(
        "realization is unital",
        one == MatrixRealization::identity(f, 1, r, d),
        format!("{q}x{q} identity over the twist subring"),
    );
    let (mut exact, mut truncated, mut wrong) = (0, 0, 0);
    for a in &ops {
        let ma = a.matrix_realize(r, d)?;
        for b in &ops {
            let mb = b.matrix_realize(r, d)?;
            let prod = ma.mul(&mb)?;
            if ma.truncated || mb.truncated || prod.truncated {
                truncated += 1;
                continue;
            }
            if prod.entries() == a.mul(b)?.matrix_realize(r, d)?.entries() {
                exact += 1;
            } else {
                wrong += 1;
            }
        }
    }
    rep.table(
        "matrix realization on x^a d^(b), a <= 2, b < p^r",
        &["pairs", "multiplicative", "truncated", "wrong"],
        [vec![json!(ops.len() * ops.len()), json!(exact), json!(truncated), json!(wrong)]],
    );
    rep.check(
        "realization is multiplicative",
        wrong == 0 && exact > 0,
        format!("{exact} pairs below the truncation boundary"),
    );
    if truncated > 0 {
        rep.uncertified("products past the degree bound", format!("{truncated} pairs skipped"));
    }
    Ok(())
}

fn algebra(cfg: &ScenarioConfig, f: PrimeField) -> Result<(StructAlgebra, Option<Vec<usize>>), Error> {
    let p2 = f.p() == 2;
    Ok(match cfg.algebra {
        AlgebraChoice::M2 => (StructAlgebra::matrix_algebra(f, 2)?, Some(vec![1, 0, 0])),
        AlgebraChoice::Kxk => {
            let k = StructAlgebra::ground(f);
            (StructAlgebra::product(&k, &k)?, Some(vec![2, 0, 0]))
        }
        // periodic resolution: HH^odd = ker 2x, HH^even = A / 2x A
        AlgebraChoice::Dual => (
            StructAlgebra::truncated_poly(f, 2)?,
            Some(if p2 { vec![2, 2, 2] } else { vec![2, 1, 1] }),
        ),
        AlgebraChoice::Ground => (StructAlgebra::ground(f), Some(vec![1, 0, 0])),
    })
}

fn gs_point(cfg: &ScenarioConfig, rep: &mut Report) -> Run {
    let f = cfg.field()?;
    let (a, expect) = algebra(cfg, f)?;
    let m = Bimodule::regular(&a);
    let max_j = 2;
    let gs = point_complex(&a, &m, max_j)?;
    let bar = bar_complex(&a, &m, max_j)?;
    let dims: Vec<usize> = (0..=max_j + 1).map(|j| gs.double().dim(0, j)).collect();
    let bar_dims: Vec<usize> = (0..=max_j + 1).map(|j| bar.dim(j as i64)).collect();
    let mut same = true;
    for j in 0..=max_j {
        same &= gs.double().dv(0, j) == &bar_differential(&a, &m, j)?;
    }
    let hh = hochschild_dims(&a, &m, max_j)?;
    let tot = gs.double().totalize()?.cohomology_dims();
    rep.table(
        "cochain dimensions",
        &["complex", "C0", "C1", "C2", "C3"],
        [dims_row("GS", &dims), dims_row("bar", &bar_dims)],
    );
    rep.table("cohomology", &["complex", "H0", "H1", "H2"], [dims_row("GS total", &tot[..=max_j]), dims_row("bar", &hh)]);
    rep.check("cochain spaces agree", dims == bar_dims, format!("{dims:?}"));
    rep.check("differentials agree as matrices", same, format!("d0..d{max_j}"));
    rep.check("GS and bar cohomology agree", tot[..=max_j] == hh[..], format!("{hh:?}"));
    if let Some(e) = expect {
        rep.check("Hochschild dimensions", hh == e, format!("expected {e:?}"));
    }
    Ok(())
}

fn p1_cover(cfg: &ScenarioConfig, rep: &mut Report) -> Run {
    let f = cfg.field()?;
    let r = gs_for_subalgebra_scenario(f, CoverModel::projective_line(), cfg.depth, cfg.dp_cap, cfg.degree_bound)?;
    let page = |name: &str, dims: &[Vec<usize>]| {
        let cols = dims.iter().map(Vec::len).max().unwrap_or(0);
        let mut columns = vec!["i".to_string()];
        columns.extend((0..cols).map(|j| format!("j={j}")));
        crate::report::Table {
            name: name.into(),
            columns,
            rows: dims.iter().enumerate().map(|(i, d)| dims_row(i, d)).collect(),
        }
    };
    rep.tables.push(page("E1", &r.e1_dims));
    rep.tables.push(page("E2", &r.e2_dims));
    rep.tables.push(page("E_inf", &r.einf_dims));
    rep.table(
        "total and Cech cohomology",
        &["source", "H0", "H1", "H2"],
        [
            dims_row("Tot", &r.total_dims),
            dims_row("nerve", &r.cech.nerve_dims),
            dims_row("Cech", &r.cech.cech_dims),
        ],
    );
    rep.check("E2 concentrated in j = 0", r.e2_row_zero, "within the certified weight window");
    rep.check("E_inf matches H(Tot)", r.converges, format!("{:?}", r.total_dims));
    rep.check("nerve and Cech agree", r.cech.agree, format!("{:?}", r.cech.nerve_dims));
    rep.check("E2 row 0 is the Cech cohomology", r.e2_matches_cech, "of the twist sheaf");
    let mut h = r.cech.nerve_dims.clone();
    h.resize(2, 0);
    rep.check("(H0, H1) = (1, 0)", h[..2] == [1, 0], format!("{:?}", &h[..2]));
    rep.check("HH0 = k", r.hh0_generators == ["1"], format!("generators {:?}", r.hh0_generators));
    Ok(())
}

fn curve_string(c: &WeierstrassCurve) -> String {
    format!("{},{},{},{},{}", c.a1, c.a2, c.a3, c.a4, c.a6)
}

pub fn parse_curve(s: &str) -> Result<WeierstrassCurve, String> {
    let v: Vec<i64> = s
        .split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [a1, a2, a3, a4, a6] => Ok(WeierstrassCurve { a1, a2, a3, a4, a6 }),
        [a4, a6] => Ok(WeierstrassCurve::short(a4, a6)),
        _ => Err("expected a1,a2,a3,a4,a6 or a,b".into()),
    }
}

fn count_points(p: u32, c: &WeierstrassCurve) -> u32 {
    let p = p as i64;
    let m = |v: i64| v.rem_euclid(p);
    let mut n = 1;
    for x in 0..p {
        for y in 0..p {
            let lhs = y * y + c.a1 * x * y + c.a3 * y;
            let rhs = x * x * x + c.a2 * x * x + c.a4 * x + c.a6;
            if m(lhs - rhs) == 0 {
                n += 1;
            }
        }
    }
    n
}

fn odd_prime(cfg: &ScenarioConfig) -> Run {
    if cfg.prime == 2 {
        return Err(RunError::InvalidPrime("elliptic scenarios need an odd prime".into()));
    }
    Ok(())
}

fn proper_rows(subject: &str, hh: &[ProperDegree], rep: &mut Report) -> Vec<Vec<Value>> {
    hh.iter()
        .map(|d| {
            rep.certificates.push(Certificate {
                subject: subject.into(),
                degree: d.degree as i64,
                kind: d.stage.map(|_| "periodic".to_string()),
                stage: d.stage,
            });
            vec![
                json!(subject),
                json!(d.degree),
                json!(d.dim),
                json!(d.nilpotent_dim),
                json!(d.stable_dim),
                json!(d.lim_dim),
                json!(d.lim1_dim),
                json!(d.hh_dim),
            ]
        })
        .collect()
}

const PROPER_COLUMNS: [&str; 8] = ["space", "m", "dim H^m", "nilpotent", "stable", "lim", "lim1", "HH^m"];

fn elliptic(cfg: &ScenarioConfig, rep: &mut Report) -> Run {
    odd_prime(cfg)?;
    let p = cfg.prime;
    let c = &cfg.curve;
    let h = hasse_invariant(p, c)?;
    let h_cech = hasse_invariant_cech(p, c)?;
    let points = count_points(p, c);
    let trace = (p + 1) as i64 - points as i64;
    let hh = proper_case(&elliptic_frobenius(p, c)?)?;
    rep.table(
        "Frobenius on H^1(E, O)",
        &["curve", "#E(F_p)", "trace", "Hasse (formula)", "Hasse (Cech)"],
        [vec![json!(curve_string(c)), json!(points), json!(trace), json!(h), json!(h_cech)]],
    );
    let rows = proper_rows("E", &hh, rep);
    rep.table("HH of the Frobenius tower", &PROPER_COLUMNS, rows);
    rep.check("formula matches Cech", h == h_cech, format!("{h} and {h_cech}"));
    rep.check(
        "trace of Frobenius is the Hasse invariant mod p",
        trace.rem_euclid(p as i64) == h as i64,
        format!("a_p = {trace}"),
    );
    let expect = usize::from(h != 0);
    rep.check(
        "HH1 detects ordinarity",
        hh[1].hh_dim == expect && hh[0].hh_dim == 1,
        format!("{} curve, dim HH1 = {}", if h == 0 { "supersingular" } else { "ordinary" }, hh[1].hh_dim),
    );
    rep.check("lim is the stable part", hh.iter().all(|d| d.lim_is_stable_part), "in every degree");
    Ok(())
}

/// Frobenius on `H^*(E × E', O) = H^*(E, O) ⊗ H^*(E', O)`.
fn product_frobenius(f: PrimeField, h: u32, h2: u32) -> Result<Vec<SemilinearMap>, Error> {
    Ok(vec![
        SemilinearMap::new(FpMatrix::identity(f, 1))?,
        SemilinearMap::new(FpMatrix::from_rows(f, &[vec![h, 0], vec![0, h2]]))?,
        SemilinearMap::new(FpMatrix::from_rows(f, &[vec![f.mul(h, h2)]]))?,
    ])
}

fn proper_hh(cfg: &ScenarioConfig, rep: &mut Report) -> Run {
    odd_prime(cfg)?;
    let p = cfg.prime;
    let f = cfg.field()?;
    let (mut ordinary, mut supersingular) = (None, None);
    'search: for a2 in 0..p as i64 {
        for a4 in 0..p as i64 {
            for a6 in 0..p as i64 {
                let c = WeierstrassCurve::cubic(a2, a4, a6);
                let Ok(h) = hasse_invariant(p, &c) else {
                    continue;
                };
                let slot = if h == 0 { &mut supersingular } else { &mut ordinary };
                slot.get_or_insert((c, h));
                if ordinary.is_some() && supersingular.is_some() {
                    break 'search;
                }
            }
        }
    }
    let found: Vec<(&str, (WeierstrassCurve, u32))> =
        [("ordinary", ordinary), ("supersingular", supersingular)].into_iter().filter_map(|(n, c)| c.map(|c| (n, c))).collect();
    rep.table(
        "curves",
        &["kind", "curve", "Hasse"],
        found.iter().map(|(n, (c, h))| vec![json!(n), json!(curve_string(c)), json!(h)]),
    );
    let mut rows = Vec::new();
    for (i, (n1, (_, h1))) in found.iter().enumerate() {
        for (n2, (_, h2)) in &found[i..] {
            let subject = format!("{n1} x {n2}");
            let hh = proper_case(&product_frobenius(f, *h1, *h2)?)?;
            rows.extend(proper_rows(&subject, &hh, rep));
            let units = usize::from(*h1 != 0) + usize::from(*h2 != 0);
            let expect = [1, units, usize::from(units == 2)];
            let got: Vec<usize> = hh.iter().map(|d| d.hh_dim).collect();
            rep.check(&format!("HH of {subject}"), got == expect, format!("{got:?}, expected {expect:?}"));
            rep.check(
                &format!("lim is the stable part, {subject}"),
                hh.iter().all(|d| d.lim_is_stable_part),
                "projection to M_0 is injective onto the stable part",
            );
        }
    }
    rep.table("HH of the Frobenius towers", &PROPER_COLUMNS, rows);
    Ok(())
}

fn smith_tower(cfg: &ScenarioConfig, rep: &mut Report) -> Run {
    let f = cfg.field()?;
    let s = smith_tower_check(f, cfg.depth, cfg.degree_bound)?;
    rep.table(
        "connecting map",
        &["stage", "image"],
        s.connecting_image.iter().enumerate().map(|(i, x)| vec![json!(i), json!(x)]),
    );
    rep.note(format!("series {}", s.series));
    rep.check("ad(series) is a derivation", s.derivation, format!("Leibniz on {} generators", s.generators));
    rep.check("compatible with every stage", s.compatible, "ad(series) = ad(b_s) on each stage");
    rep.check("differences lie in the twist subrings", s.differences_in_twist, "b_(s+1) - b_s = t^(p^s)");
    rep.check("connecting image is a boundary in the window", s.boundary_in_window, "as any finite tower forces");
    rep.uncertified(
        "ad(series) is outer in the limit",
        "a nonzero lim1 class lives only in the infinite tower",
    );
    Ok(())
}

fn cup_ring_map(cfg: &ScenarioConfig, rep: &mut Report) -> Run {
    let f = cfg.field()?;
    let mut rows = Vec::new();
    for cover in [CoverModel::affine_line(), CoverModel::projective_line()] {
        let name = cover.name.clone();
        let model = SubalgebraModel::build(f, cover, cfg.depth, cfg.dp_cap, cfg.degree_bound)?;
        let e = model.edge_multiplicativity()?;
        rows.push(vec![json!(name), json!(e.pairs_checked), json!(e.failures.len())]);
        rep.check(
            &format!("edge map is multiplicative, {name}"),
            e.passed(),
            format!("{} products of HH0 classes", e.pairs_checked),
        );
    }
    rep.table("edge map HH -> H^0", &["cover", "products", "failures"], rows);

    // Leibniz on basis cochains of the point complex of M_2
    let a = StructAlgebra::matrix_algebra(f, 2)?;
    let gs = point_complex(&a, &Bimodule::regular(&a), 2)?;
    let (mut pairs, mut compared, mut bad) = (0, 0, 0);
    for (j1, j2) in [(0, 0), (0, 1), (1, 0)] {
        let basis = |j: usize| -> Result<Vec<_>, Error> {
            let n = gs.double().dim(0, j);
            (0..n)
                .map(|k| {
                    let mut v = vec![0; n];
                    v[k] = 1;
                    gs.cochain(0, j, v)
                })
                .collect()
        };
        for x in &basis(j1)? {
            for y in &basis(j2)? {
                pairs += 1;
                match check_leibniz(&gs, x, y)? {
                    Some(n) => compared += n,
                    None => bad += 1,
                }
            }
        }
    }
    rep.table("Leibniz rule on M_2", &["pairs", "components", "failures"], [vec![json!(pairs), json!(compared), json!(bad)]]);
    rep.check("cup product satisfies Leibniz", bad == 0 && pairs > 0, format!("{pairs} basis pairs"));
    Ok(())
}
