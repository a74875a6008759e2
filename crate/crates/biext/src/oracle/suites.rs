//! Named property suites: deterministic instance sets exercising the solver,
//! pairings, realizations and rank decompositions end to end. The CLI `check`
//! subcommand and the acceptance tests both run these.

use crate::exact::{int_mat, rat, FieldContext, IntLattice, KScalar, Mat};
use crate::hodge::{
    gr_profile, internal_hom, quotient_by_weight, tate, tensor_many, tensor_mhs, validate_mhs,
    Mhs,
};
use crate::homspace::{
    biext_from_map, curry_adjunction, hom_lattice, hom_multilinear, is_antisymmetric_pairing,
    pairing_unimodular, pullback_pairing, sym_antisym_split, rank_decomposition_report,
    uncurry_adjunction, weight_respect_check, weil_pairing, HomLattice, MultilinearMap,
};
use crate::motives::{
    elliptic, kummer, lattice_motive, lattice_part_rank, tensor_weight0,
};
use crate::oracle::{compare_with_oracle, random_motive, InstanceProfile, Rng};
use crate::realize::{commute_check, curvature, de_rham_map, reduce_map_mod_n, tower_compatible};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct CaseOutcome {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub name: String,
    pub cases: Vec<CaseOutcome>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseOutcome> {
        self.cases.iter().filter(|c| !c.passed)
    }
}

pub const SUITE_NAMES: &[&str] = &[
    "oracle",
    "cm",
    "pairing",
    "adjunction",
    "modn",
    "curvature",
    "weight",
    "decompose",
    "multiplicity",
    "copies",
];

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteOutcome> {
    let cases = match name {
        "oracle" => oracle_suite(seed)?,
        "cm" => cm_suite()?,
        "pairing" => pairing_suite()?,
        "adjunction" => adjunction_suite(seed)?,
        "modn" => modn_suite(seed)?,
        "curvature" => curvature_suite(seed)?,
        "weight" => weight_suite(seed)?,
        "decompose" => decompose_suite(seed)?,
        "multiplicity" => multiplicity_suite(seed)?,
        "copies" => copies_suite(seed)?,
        _ => return Err(Error::UnknownSuite(name.to_string())),
    };
    Ok(SuiteOutcome { name: name.to_string(), cases })
}

pub fn run_all(seed: u64) -> Result<Vec<SuiteOutcome>> {
    SUITE_NAMES.iter().map(|n| run_suite(n, seed)).collect()
}

fn case(cases: &mut Vec<CaseOutcome>, label: impl Into<String>, passed: bool, detail: String) {
    cases.push(CaseOutcome { label: label.into(), passed, detail });
}

fn d1() -> FieldContext {
    FieldContext::new(1).expect("1 is squarefree")
}

/// A presentation with the exact shape (r, g, t) and random scalars; unlike
/// [`random_motive`] the lattice rank is not sampled, so instances meant to
/// exercise lattice-weighted decompositions cannot degenerate.
fn random_presentation(r: usize, g: usize, t: usize, height: u32, seed: u64) -> Mhs {
    let mut rng = Rng::new(seed);
    let moduli: Vec<KScalar> =
        (0..g).map(|_| KScalar::new(rng.rat(height), rng.nonzero_rat(height))).collect();
    let abelian_lifts = Mat::from_fn(g, r, |_, _| rng.k_scalar(height));
    let torus_lifts = Mat::from_fn(t, r, |_, _| rng.k_scalar(height));
    let extension_periods = Mat::from_fn(t, 2 * g, |_, _| rng.k_scalar(height));
    let p = crate::motives::PeriodPresentation::new(
        r,
        moduli,
        t,
        abelian_lifts,
        torus_lifts,
        extension_periods,
    )
    .expect("shapes agree");
    crate::motives::build_from_periods(d1(), &p).expect("periods are non-degenerate")
}

/// Deterministic pool of small 1-motives over ℚ(i), ranks ≤ 3.
fn pool(seed: u64) -> Vec<(String, Mhs)> {
    let ctx = d1();
    let mut rng = Rng::new(seed.wrapping_mul(0x9E37_79B9));
    let tau2 = KScalar::new(rng.rat(2), rng.nonzero_rat(2));
    let pi2 = rng.k_scalar(2);
    let p3 = random_motive(&InstanceProfile {
        max_lattice_rank: 1,
        elliptic_factors: 1,
        torus_rank: 0,
        height_bound: 2,
        seed: seed.wrapping_add(11),
    });
    let p2 = random_motive(&InstanceProfile {
        max_lattice_rank: 1,
        elliptic_factors: 0,
        torus_rank: 1,
        height_bound: 2,
        seed: seed.wrapping_add(23),
    });
    vec![
        ("Z0".into(), tate(ctx, 0)),
        ("Z1".into(), tate(ctx, 1)),
        ("E".into(), elliptic(ctx, &KScalar::omega()).expect("omega is non-degenerate")),
        ("E2".into(), elliptic(ctx, &tau2).expect("nonzero omega-part")),
        ("K".into(), kummer(ctx, &KScalar::from_rat(rat(1, 2)))),
        ("K2".into(), kummer(ctx, &pi2)),
        ("L1".into(), lattice_motive(ctx, 1)),
        ("P3".into(), p3.build(ctx).expect("random presentations build")),
        ("P2".into(), p2.build(ctx).expect("random presentations build")),
    ]
}

fn find(pool: &[(String, Mhs)], name: &str) -> Mhs {
    pool.iter().find(|(n, _)| n == name).expect("pool name").1.clone()
}

/// Solver vs. exhaustive enumeration on every oracle-sized instance.
fn oracle_suite(seed: u64) -> Result<Vec<CaseOutcome>> {
    let pool = pool(seed);
    let mut instances: Vec<(String, HomLattice)> = Vec::new();
    let linear_pairs = [
        ("Z0", "Z1"),
        ("Z1", "Z1"),
        ("E", "E"),
        ("E", "E2"),
        ("E2", "E"),
        ("K", "Z1"),
        ("K2", "Z1"),
        ("K", "K2"),
        ("K2", "K"),
        ("E", "K"),
        ("K", "E"),
        ("L1", "K"),
        ("P2", "Z1"),
        ("P3", "E"),
        ("E", "P3"),
        ("P2", "K"),
    ];
    for (a, b) in linear_pairs {
        let lat = hom_lattice(&find(&pool, a), &find(&pool, b))?;
        instances.push((format!("hom({a}, {b})"), lat));
    }
    let bilinear = [
        (("E", "E"), "Z1"),
        (("K", "K2"), "Z1"),
        (("L1", "E"), "E"),
        (("E", "E"), "E"),
        (("K", "K"), "K"),
        (("Z1", "Z1"), "K"),
    ];
    for ((a, b), t) in bilinear {
        let lat = hom_multilinear(&[find(&pool, a), find(&pool, b)], &find(&pool, t))?;
        instances.push((format!("hom({a}, {b}; {t})"), lat));
    }
    // a second field for variety
    let ctx2 = FieldContext::new(2)?;
    let e_d2 = elliptic(ctx2, &KScalar::omega())?;
    let shifted = elliptic(ctx2, &(&KScalar::from_rat(rat(1, 2)) + &KScalar::omega()))?;
    instances.push(("hom(E, E') over d=2".into(), hom_lattice(&e_d2, &shifted)?));

    let mut cases = Vec::new();
    for (label, lat) in instances {
        let report = compare_with_oracle(&lat, 2)?;
        case(
            &mut cases,
            label,
            report.agreed,
            format!(
                "brute {} vs lattice {} box points, solver rank {}",
                report.brute_count,
                report.lattice_count,
                lat.rank()
            ),
        );
    }
    Ok(cases)
}

/// The CM fixed point: End(E_i) = ℤ[i] as the lattice spanned by 1 and J.
fn cm_suite() -> Result<Vec<CaseOutcome>> {
    let ctx = d1();
    let e = elliptic(ctx, &KScalar::omega())?;
    let lat = hom_lattice(&e, &e)?;
    let expected = IntLattice::from_rows(&int_mat(vec![vec![1, 0, 0, 1], vec![0, -1, 1, 0]]));
    let mut cases = Vec::new();
    case(
        &mut cases,
        "rank of End(elliptic(w))",
        lat.rank() == 2,
        format!("rank {}", lat.rank()),
    );
    case(
        &mut cases,
        "HNF basis equals span{identity, J}",
        lat.lattice() == &expected,
        format!("{:?}", lat.lattice().basis_rows()),
    );
    let forms = hom_multilinear(&[e.clone(), e], &tate(ctx, 1))?;
    let i_form = MultilinearMap::new(vec![2, 2], 1, int_mat(vec![vec![1, 0, 0, 1]]))?;
    let j_form = MultilinearMap::new(vec![2, 2], 1, int_mat(vec![vec![0, 1, -1, 0]]))?;
    case(
        &mut cases,
        "bilinear forms are spanned by I and J",
        forms.rank() == 2 && forms.contains(&i_form) && forms.contains(&j_form),
        format!("rank {}", forms.rank()),
    );
    Ok(cases)
}

/// Weil pairings: membership, unimodularity, skewness after the J pullback.
fn pairing_suite() -> Result<Vec<CaseOutcome>> {
    let ctx = d1();
    let mut cases = Vec::new();
    let e = elliptic(ctx, &KScalar::omega())?;
    let (pairing_e, lat_e) = weil_pairing(&e)?;
    case(
        &mut cases,
        "elliptic pairing is unimodular",
        pairing_unimodular(&pairing_e)?,
        String::new(),
    );
    case(
        &mut cases,
        "elliptic pairing lies in Hom(E, E*; Z(1))",
        lat_e.contains(&pairing_e),
        String::new(),
    );
    let k = kummer(ctx, &KScalar::from_rat(rat(1, 2)));
    let (pairing_k, lat_k) = weil_pairing(&k)?;
    case(
        &mut cases,
        "kummer(1/2) pairing is unimodular",
        pairing_unimodular(&pairing_k)? && lat_k.contains(&pairing_k),
        String::new(),
    );
    let bilinear = hom_multilinear(&[e.clone(), e.clone()], &tate(ctx, 1))?;
    let j_form = MultilinearMap::new(vec![2, 2], 1, int_mat(vec![vec![0, 1, -1, 0]]))?;
    let sigma = curry_adjunction(&bilinear, &j_form)?;
    let pulled = pullback_pairing(&e, &sigma)?;
    case(
        &mut cases,
        "pullback along the J self-duality is antisymmetric",
        is_antisymmetric_pairing(&pulled)?,
        String::new(),
    );
    let split = sym_antisym_split(&bilinear)?;
    case(
        &mut cases,
        "pulled-back pairing lies in the antisymmetric part",
        split.antisymmetric.contains(&pulled.flat()),
        String::new(),
    );
    Ok(cases)
}

/// Currying is an exact rank-preserving bijection; tensoring with the unit
/// changes nothing.
fn adjunction_suite(seed: u64) -> Result<Vec<CaseOutcome>> {
    let pool = pool(seed);
    let triples = [
        ("E", "E", "Z1"),
        ("K", "E", "Z1"),
        ("E", "K", "K"),
        ("P2", "E", "Z1"),
        ("K", "K2", "K"),
        ("L1", "P3", "E"),
        ("E", "E2", "K"),
        ("P2", "P2", "Z1"),
        ("K2", "E", "E"),
        ("P3", "K", "Z1"),
    ];
    let mut cases = Vec::new();
    for (a, b, c) in triples {
        let (ma, mb, mc) = (find(&pool, a), find(&pool, b), find(&pool, c));
        let bilinear = hom_multilinear(&[ma.clone(), mb.clone()], &mc)?;
        let hom_side = hom_lattice(&ma, &internal_hom(&mb, &mc)?)?;
        let mut ok = bilinear.lattice() == hom_side.lattice();
        for phi in bilinear.basis_maps() {
            let curried = curry_adjunction(&bilinear, &phi)?;
            ok &= hom_side.contains(&curried);
            ok &= uncurry_adjunction(&curried, mb.rank(), mc.rank())? == phi;
        }
        case(
            &mut cases,
            format!("curry bijection on ({a}, {b}; {c})"),
            ok,
            format!("rank {}", bilinear.rank()),
        );
    }
    for (name, h) in pool.iter().filter(|(n, _)| n != "Z0") {
        let with_unit = hom_multilinear(&[tate(d1(), 0), h.clone()], h)?;
        let plain = hom_lattice(h, h)?;
        case(
            &mut cases,
            format!("unit source on {name}"),
            with_unit.rank() == plain.rank(),
            format!("{} vs {}", with_unit.rank(), plain.rank()),
        );
    }
    Ok(cases)
}

fn bilinear_instances(seed: u64) -> Result<Vec<(String, HomLattice)>> {
    let pool = pool(seed);
    let combos = [
        (("E", "E"), "Z1"),
        (("K", "K2"), "Z1"),
        (("K", "K"), "K"),
        (("P3", "E"), "Z1"),
        (("P2", "K"), "K2"),
    ];
    let mut out = Vec::new();
    for ((a, b), t) in combos {
        let lat = hom_multilinear(&[find(&pool, a), find(&pool, b)], &find(&pool, t))?;
        out.push((format!("hom({a}, {b}; {t})"), lat));
    }
    Ok(out)
}

/// Reduction mod n commutes with every basis morphism, and the reductions fit
/// into the tower (ℤ/nm)^r → (ℤ/n)^r.
fn modn_suite(seed: u64) -> Result<Vec<CaseOutcome>> {
    let mut cases = Vec::new();
    for (label, lat) in bilinear_instances(seed)? {
        let mut commute_ok = true;
        let mut tower_ok = true;
        let mut count = 0usize;
        for phi in lat.basis_maps() {
            for n in [2u64, 3, 4, 5, 12] {
                let reduced = reduce_map_mod_n(&lat, &phi, n)?;
                commute_ok &= commute_check(&phi, &reduced);
            }
            for (n, m) in [(2u64, 6u64), (3, 4), (4, 3), (5, 2), (12, 2)] {
                tower_ok &= tower_compatible(&lat, &phi, n, m)?;
            }
            count += 1;
        }
        case(
            &mut cases,
            format!("mod-n commutation on {label}"),
            commute_ok,
            format!("{count} basis maps, n in {{2,3,4,5,12}}"),
        );
        case(&mut cases, format!("tower compatibility on {label}"), tower_ok, String::new());
    }
    Ok(cases)
}

/// Curvature pairing equals minus the class, independently of the φ₁ split,
/// and matches minus the de Rham matrix.
fn curvature_suite(seed: u64) -> Result<Vec<CaseOutcome>> {
    let mut cases = Vec::new();
    for (label, lat) in bilinear_instances(seed)? {
        let mut identity_ok = true;
        let mut split_ok = true;
        let mut de_rham_ok = true;
        for phi in lat.basis_maps() {
            let canonical = curvature(&biext_from_map(&lat, &phi, None)?)?;
            identity_ok &= canonical.identity_holds;
            let dr = de_rham_map(&lat, &phi)?;
            de_rham_ok &= canonical.upsilon == dr.map(|x| -x);
            // shift φ₁ by an arbitrary bilinear K-form: same class, same Υ
            let phi_k = phi.to_k();
            let shifted = Mat::from_fn(phi_k.rows(), phi_k.cols(), |r, c| {
                &KScalar::omega() + phi_k.at(r, c)
            });
            let alt = curvature(&biext_from_map(&lat, &phi, Some(shifted))?)?;
            split_ok &= alt.upsilon == canonical.upsilon && alt.identity_holds;
        }
        case(&mut cases, format!("curvature identity on {label}"), identity_ok, String::new());
        case(&mut cases, format!("split independence on {label}"), split_ok, String::new());
        case(
            &mut cases,
            format!("curvature equals -deRham on {label}"),
            de_rham_ok,
            String::new(),
        );
    }
    Ok(cases)
}

/// Every solver basis element kills the toric cross terms and maps the
/// abelian square into the toric part of the target.
fn weight_suite(seed: u64) -> Result<Vec<CaseOutcome>> {
    let mut cases = Vec::new();
    for (label, lat) in bilinear_instances(seed)? {
        let mut ok = true;
        for phi in lat.basis_maps() {
            ok &= weight_respect_check(&lat, &phi)?.ok();
        }
        case(
            &mut cases,
            format!("weight respect on {label}"),
            ok,
            format!("{} basis maps", lat.rank()),
        );
    }
    Ok(cases)
}

/// Multilinear rank equals the sum of the bilinear ranks weighted by the
/// lattice parts of the remaining factors.
fn decompose_suite(seed: u64) -> Result<Vec<CaseOutcome>> {
    let ctx = d1();
    let mut cases = Vec::new();
    let e = elliptic(ctx, &KScalar::omega())?;
    let fixed = vec![lattice_motive(ctx, 1), e.clone(), e];
    let report = rank_decomposition_report(&fixed, &tate(ctx, 1))?;
    case(
        &mut cases,
        "fixed instance [lattice(1), E, E] -> Z(1)",
        report.lhs_rank == 2 && report.rhs_rank == 2,
        format!("lhs {} rhs {}", report.lhs_rank, report.rhs_rank),
    );
    // Five random l = 3 instances mixing lattice, elliptic and torus parts.
    // One source carries the lattice part: then every surviving graded piece
    // of the triple quotient arises from a single pair and the rank equality
    // is on the nose. (With two or more lattice-bearing sources the pair sum
    // counts pieces like X⊗X⊗Y(1) once per containing pair and strictly
    // exceeds the left side; see the multiplicity suite.)
    let shapes: [([usize; 3], [usize; 3], [usize; 3]); 5] = [
        ([1, 1, 0], [0, 1, 0], [0, 1, 0]),
        ([1, 0, 1], [0, 1, 1], [0, 1, 0]),
        ([1, 1, 1], [0, 1, 0], [0, 1, 1]),
        ([1, 1, 0], [0, 1, 1], [0, 1, 1]),
        ([1, 0, 1], [0, 1, 0], [0, 1, 0]),
    ];
    for (i, shape) in shapes.iter().enumerate() {
        let sources: Vec<Mhs> = [shape.0, shape.1, shape.2]
            .iter()
            .enumerate()
            .map(|(j, &[r, g, t])| {
                random_presentation(r, g, t, 2, seed.wrapping_add(100 * i as u64 + j as u64))
            })
            .collect();
        let target =
            if i % 2 == 0 { tate(ctx, 1) } else { kummer(ctx, &KScalar::from_rat(rat(1, 2))) };
        let report = rank_decomposition_report(&sources, &target)?;
        case(
            &mut cases,
            format!("random instance {i}"),
            report.ranks_agree(),
            format!(
                "lhs {} rhs {} terms {:?}",
                report.lhs_rank,
                report.rhs_rank,
                report.terms.iter().map(|t| t.rank).collect::<Vec<_>>()
            ),
        );
    }
    Ok(cases)
}

/// The triple tensor quotient is isogenous to the pair-sum motive: the
/// lattice part triples and the abelian part doubles.
fn multiplicity_suite(seed: u64) -> Result<Vec<CaseOutcome>> {
    let ctx = d1();
    let mut rng = Rng::new(seed.wrapping_add(7));
    let mut cases = Vec::new();

    let check_triple = |label: String, sources: [Mhs; 3], cases: &mut Vec<CaseOutcome>| -> Result<()> {
        let triple = tensor_many(&sources)?;
        let direct = quotient_by_weight(&triple, 3)?;
        let direct_profile = gr_profile(&direct);
        let mut parts = Vec::new();
        for (i, j, k) in [(0usize, 1usize, 2usize), (0, 2, 1), (1, 2, 0)] {
            let pair = quotient_by_weight(&tensor_mhs(&sources[i], &sources[j])?, 3)?;
            parts.push(tensor_weight0(&pair, lattice_part_rank(&sources[k])));
        }
        let formula = crate::hodge::direct_sum(ctx, &parts)?;
        let formula_profile = gr_profile(&formula);
        let lattice_ok = formula_profile.rank_at(0) == 3 * direct_profile.rank_at(0);
        let abelian_ok = formula_profile.rank_at(-1) == 2 * direct_profile.rank_at(-1);
        case(
            cases,
            label,
            lattice_ok && abelian_ok,
            format!("formula {formula_profile}, direct {direct_profile}"),
        );
        Ok(())
    };

    for instance in 0..2 {
        let pis = [
            KScalar::from_rat(rat(1, 2)),
            rng.k_scalar(2),
            KScalar::from_rat(rng.rat(2)),
        ];
        let sources = [
            kummer(ctx, &pis[0]),
            kummer(ctx, &pis[1]),
            kummer(ctx, &pis[2]),
        ];
        check_triple(format!("kummer triple {instance}"), sources, &mut cases)?;
    }
    for instance in 0..2u64 {
        // lattice rank pinned to 1 so the abelian multiplicity is nonzero
        let sources: [Mhs; 3] = std::array::from_fn(|j| {
            random_presentation(1, 1, 0, 2, seed.wrapping_add(991 * instance + j as u64))
        });
        check_triple(format!("elliptic-part triple {instance}"), sources, &mut cases)?;
    }
    Ok(cases)
}

/// Graded ranks scale linearly in the number of weight-0 copies.
fn copies_suite(seed: u64) -> Result<Vec<CaseOutcome>> {
    let mut cases = Vec::new();
    for (name, h) in pool(seed) {
        let base = gr_profile(&h);
        let mut ok = true;
        for z in [0usize, 1, 3] {
            let scaled = tensor_weight0(&h, z);
            ok &= gr_profile(&scaled) == base.scale(z);
            ok &= validate_mhs(&scaled).ok();
        }
        case(&mut cases, format!("copies of {name}"), ok, format!("profile {base}"));
    }
    let zero_sum = tensor_weight0(&tate(d1(), 1), 0);
    case(
        &mut cases,
        "zero copies give the zero structure",
        zero_sum.rank() == 0 && gr_profile(&zero_sum).total() == 0,
        String::new(),
    );
    Ok(cases)
}
