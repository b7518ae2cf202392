//! End-to-end acceptance run. Each criterion prints one PASS/FAIL line with
//! its wall time; the process exits non-zero if any criterion fails or
//! overruns its time limit.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rayon::prelude::*;

use cell24::covers::{build_cover, geography, bundled_cover_report, CoverSpec, GeographyReport};
use cell24::cusps::{census, classify_flat, cusp_complexes, label_by_holonomy, label_by_homology, vertex_cycles, FlatLabel};
use cell24::exact::{invariant_factors, lorentz_check, qf, q, smith_normal_form, ExactMatrix, IntegerMatrix};
use cell24::group::{
    abelianized_matrix, eval_word, find_constrained_homs, hom_values_on, hom_vector, cusp_killing_hom, screw_hom, presentation, verify_hom,
    word, words, IntHomomorphism, Letter, Word,
};
use cell24::homology::{truncated_complex, truncated_homology};
use cell24::pairing::{derive_isometry, parse_pairing, ridge_cycles, verify_poincare, SidePairing};
use cell24::polytope::{polytope, symmetry_group};
use cell24::search::{canonicalize, prefix_of, search, Mode, SearchConfig};
use cell24::{Error, BUNDLED_PAIRING};

const GENERATORS: &str = include_str!("data/m_generators.txt");

const RELATORS: [&str; 24] = [
    "g3g10^-1g22^-1g8", "g3g5^-1g22^-1g12", "g7g8g12^-1g11^-1", "g3g11g22^-1g7^-1",
    "g3g8g22^-1g11^-1", "g7g11^-1g12^-1g8", "g1g8g22g12^-1", "g1g7^-1g22g9",
    "g1g12g22g7^-1", "g1g11^-1g22g6", "g3g9g21g5^-1", "g3g6g21g9^-1",
    "g5g6g10^-1g9^-1", "g5g10^-1g11^-1g8", "g6g9^-1g12^-1g7", "g3g12^-1g21g6",
    "g3g7^-1g21g10", "g6g7g12^-1g9^-1", "g5g8g11^-1g10^-1", "g1g6g21^-1g10^-1",
    "g1g5^-1g21^-1g11", "g5g9^-1g10^-1g6", "g1g10g21^-1g5^-1", "g1g9^-1g21^-1g8",
];

fn bundled() -> SidePairing {
    parse_pairing(BUNDLED_PAIRING).unwrap()
}

// ---------------------------------------------------------------------------
// 1

fn published() -> Vec<(usize, ExactMatrix)> {
    GENERATORS
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let (name, body) = l.split_once(':').unwrap();
            let side: usize = name.trim().trim_start_matches('g').parse().unwrap();
            let mut rows = [[0i64; 5]; 5];
            for (i, row) in body.split('|').enumerate() {
                for (j, x) in row.split_whitespace().enumerate() {
                    rows[i][j] = x.parse().unwrap();
                }
            }
            (side - 1, ExactMatrix::from_i64(rows))
        })
        .collect()
}

fn table_fidelity() {
    let sp = bundled();
    let p = polytope();
    let table = published();
    assert_eq!(table.len(), 12);
    let sides: Vec<usize> = table.iter().map(|t| t.0).collect();
    assert_eq!(sides, sp.free_sides());
    for (s, want) in &table {
        let g = derive_isometry(p, *s, sp.partner(*s), &sp.correspondence(*s)).unwrap();
        assert_eq!(g.matrix(), want, "side {}", s + 1);
        assert_eq!(sp.matrix(*s), want);
    }
}

// ---------------------------------------------------------------------------
// 2

/// Key of a relator up to cyclic rotation and inversion.
fn relator_key(w: &Word) -> String {
    let a = w.cyclic_normal_form().to_string();
    let b = w.inverse().cyclic_normal_form().to_string();
    a.min(b)
}

fn relator_identity() {
    let sp = bundled();
    for r in RELATORS {
        assert!(eval_word(&word(r), &sp).is_identity(), "{r}");
    }
    let cycles = ridge_cycles(&sp);
    assert_eq!(cycles.len(), 24);
    for c in &cycles {
        assert!(eval_word(&c.word(&sp), &sp).is_identity());
    }
    let mut ours: Vec<String> = cycles.iter().map(|c| relator_key(&c.word(&sp))).collect();
    let mut table: Vec<String> = RELATORS.iter().map(|r| relator_key(&word(r))).collect();
    ours.sort();
    table.sort();
    assert_eq!(ours, table);
    assert_eq!(presentation(&sp).relators.len(), 24);
}

// ---------------------------------------------------------------------------
// 3

#[derive(Debug, Clone, Copy, PartialEq)]
enum Broken {
    /// The pairing is not a proper involution of isometries; rejected
    /// while building it.
    Proper,
    Ridge,
    Orientation,
}

fn replace_line(text: &str, side: usize, line: &str) -> String {
    let head = format!("side {side} ->");
    let out: Vec<&str> = text
        .lines()
        .map(|l| if l.starts_with(&head) { line } else { l })
        .collect();
    assert!(out.contains(&line));
    out.join("\n")
}

/// Composes side `s` with a symmetry `k` fixing it, and its partner with
/// the inverse, so the pairing stays involutive.
fn twisted(sp: &SidePairing, s: usize, det: i32) -> SidePairing {
    let g = symmetry_group();
    let k = g
        .facet_maps(s, s)
        .iter()
        .copied()
        .find(|&k| k != g.identity() && g.get(k).det == det)
        .unwrap();
    let mut elems: [usize; 24] = std::array::from_fn(|t| sp.symmetry(t));
    elems[s] = g.compose(elems[s], k);
    elems[sp.partner(s)] = g.inverse(elems[s]);
    SidePairing::from_symmetries(*sp.partners(), &elems).unwrap()
}

fn perturbed() -> Vec<(&'static str, Broken, Result<SidePairing, Error>)> {
    let sp = bundled();
    let text = |side, line| parse_pairing(&replace_line(BUNDLED_PAIRING, side, line));
    vec![
        (
            "partner mismatch",
            Broken::Proper,
            text(1, "side 1 -> 3 : 13>7 14>8 15>5 16>6 17>19 19>18"),
        ),
        (
            "side paired with itself",
            Broken::Proper,
            text(1, "side 1 -> 1 : 13>13 14>14 15>15 16>16 17>17 19>19"),
        ),
        (
            "map not inverse to partner's",
            Broken::Proper,
            text(1, "side 1 -> 2 : 13>8 14>7 15>5 16>6 17>19 19>18"),
        ),
        (
            "vertex off its side",
            Broken::Proper,
            text(1, "side 1 -> 2 : 13>7 14>8 15>5 16>6 17>19 20>18"),
        ),
        ("twist at side 1", Broken::Ridge, Ok(twisted(&sp, 0, 1))),
        ("twist at side 5", Broken::Ridge, Ok(twisted(&sp, 4, 1))),
        ("twist at side 9", Broken::Ridge, Ok(twisted(&sp, 8, 1))),
        ("twist at side 21", Broken::Ridge, Ok(twisted(&sp, 20, 1))),
        ("reflection at side 1", Broken::Orientation, Ok(twisted(&sp, 0, -1))),
        ("reflection at side 13", Broken::Orientation, Ok(twisted(&sp, 12, -1))),
    ]
}

fn poincare_verification() {
    let rep = verify_poincare(&bundled());
    assert!(rep.proper && rep.orientable && rep.cusp_complete && rep.overall);
    assert!(rep.ridge_cycles.iter().all(|c| c.pass && c.length == 4 && c.identity_return));
    assert_eq!(rep.ridges_covered, 96);

    let fixtures = perturbed();
    assert_eq!(fixtures.len(), 10);
    for (name, broken, built) in fixtures {
        match (broken, built) {
            (Broken::Proper, Err(e)) => assert!(
                matches!(
                    e,
                    Error::NotInvolutive(_) | Error::FixedSide(_) | Error::VertexNotOnSide { .. } | Error::NotAnIsometry(..)
                ),
                "{name}: {e}"
            ),
            (Broken::Proper, Ok(_)) => panic!("{name}: accepted"),
            (_, Err(e)) => panic!("{name}: {e}"),
            (Broken::Ridge, Ok(sp)) => {
                let r = verify_poincare(&sp);
                assert!(r.proper && r.orientable, "{name}");
                assert!(r.ridge_cycles.iter().any(|c| !c.pass), "{name}");
                assert!(!r.overall, "{name}");
            }
            (Broken::Orientation, Ok(sp)) => {
                let r = verify_poincare(&sp);
                assert!(r.proper, "{name}");
                assert!(!r.orientable, "{name}");
                assert!(!r.overall, "{name}");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// 4

fn cusp_census() {
    let sp = bundled();
    let recs = census(&sp).unwrap();
    assert_eq!(recs.len(), 3);
    let mut all: Vec<usize> = recs.iter().flat_map(|r| r.cycle.clone()).collect();
    all.sort_unstable();
    assert_eq!(all, (1..=24).collect::<Vec<_>>());
    for r in &recs {
        assert_eq!(r.size, 8);
        let mut c = r.cycle.clone();
        c.sort_unstable();
        c.dedup();
        assert_eq!(c.len(), 8);
        if r.flat == FlatLabel::F4 {
            assert_eq!(c, (17..=24).collect::<Vec<_>>());
            assert!(r.handedness.is_some());
        } else {
            assert_eq!(r.flat, FlatLabel::F1);
        }
    }
    assert_eq!(recs.iter().filter(|r| r.flat == FlatLabel::F4).count(), 1);
    for c in cusp_complexes(&sp).unwrap() {
        let a = label_by_homology(&c).unwrap();
        let b = label_by_holonomy(&c).unwrap();
        assert_eq!(a, b);
        assert_eq!(classify_flat(&c).unwrap().label, a);
    }

    let (t1, t2, t3, a) = (words::t1(), words::t2(), words::t3(), words::a());
    let ev = |w: &Word| eval_word(w, &sp);
    let comm = |x: &Word, y: &Word| x.concat(y).concat(&x.inverse()).concat(&y.inverse());
    let relators = [
        a.pow(4).concat(&t3.inverse()),
        a.concat(&t1).concat(&a.inverse()).concat(&t2.inverse()),
        a.concat(&t2).concat(&a.inverse()).concat(&t1),
        a.concat(&t3).concat(&a.inverse()).concat(&t3.inverse()),
        comm(&t1, &t2),
        comm(&t1, &t3),
        comm(&t2, &t3),
    ];
    for r in &relators {
        assert!(ev(r).is_identity(), "{r}");
    }
    // the four elements fix exactly one ideal vertex, on the quarter-twist cusp
    let p = polytope();
    let fixed: Vec<usize> = (0..24)
        .filter(|&v| [&t1, &t2, &t3, &a].iter().all(|w| ev(w).apply(&p.vertices[v]) == p.vertices[v]))
        .collect();
    assert_eq!(fixed.len(), 1);
    assert!((16..24).contains(&fixed[0]));
}

// ---------------------------------------------------------------------------
// 5

fn homology_of_bundled() {
    let sp = bundled();
    let gc = truncated_complex(&sp).unwrap();
    assert!(gc.chain_complex().boundary_squares_to_zero());
    let r = truncated_homology(&sp).unwrap();
    let ranks: Vec<usize> = r.groups.iter().map(|h| h.rank).collect();
    assert_eq!(ranks, vec![1, 3, 5, 2, 0]);
    assert!(r.groups.iter().all(|h| h.torsion.is_empty()));
    assert_eq!(r.euler_characteristic, 1);
    let alternating: i64 = ranks.iter().enumerate().map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) }).sum();
    assert_eq!(alternating, r.euler_characteristic);

    let pres = presentation(&sp);
    let f = invariant_factors(&abelianized_matrix(&pres));
    assert_eq!(pres.generators.len() - f.len(), r.groups[1].rank);
    let torsion: Vec<BigInt> = f.into_iter().filter(|d| !d.is_one()).collect();
    assert_eq!(torsion, r.groups[1].torsion);
}

// ---------------------------------------------------------------------------
// 6

fn homomorphisms() {
    let sp = bundled();
    let p = presentation(&sp);
    let (h, v) = (cusp_killing_hom(&p), screw_hom(&p));
    assert!(verify_hom(&h, &p) && verify_hom(&v, &p));
    let cusp = [words::t1(), words::t2(), words::a()];
    assert_eq!(hom_values_on(&h, &p, &cusp).unwrap(), vec![0, 0, 0]);
    assert_eq!(hom_values_on(&v, &p, &cusp).unwrap(), vec![0, 0, 1]);
    let hl = find_constrained_homs(&p, &[(words::t1(), 0), (words::t2(), 0), (words::a(), 0)]).unwrap();
    assert!(hl.contains(&hom_vector(&h)));
    let vl = find_constrained_homs(&p, &[(words::t1(), 0), (words::t2(), 0), (words::a(), 1)]).unwrap();
    assert!(vl.contains(&hom_vector(&v)));
}

// ---------------------------------------------------------------------------
// 7, 8

fn grid() -> &'static Vec<GeographyReport> {
    static GRID: OnceLock<Vec<GeographyReport>> = OnceLock::new();
    GRID.get_or_init(|| {
        let sp = bundled();
        let cells: Vec<(usize, usize)> = (1..=5).flat_map(|m| (1..=3).map(move |n| (n, m))).collect();
        cells
            .par_iter()
            .map(|&(n, mm)| bundled_cover_report(&sp, n, mm).unwrap().1)
            .collect()
    })
}

fn covers_grid() {
    for r in grid() {
        let (n, m) = (r.n, r.m);
        let at = format!("(m, n) = ({m}, {n})");
        assert_eq!(r.degree, m * n, "{at}");
        assert_eq!(r.chi, (m * n) as i64, "{at}");
        assert!(r.bounds_ok, "{at}");
        let f4: Vec<_> = r.cusps.iter().filter(|c| c.flat == FlatLabel::F4).collect();
        let f2 = r.count(FlatLabel::F2);
        let others_torus = r
            .cusps
            .iter()
            .all(|c| matches!(c.flat, FlatLabel::F1 | FlatLabel::F2 | FlatLabel::F4));
        assert!(others_torus, "{at}");
        match m % 4 {
            1 | 3 => {
                assert_eq!(f4.len(), n, "{at}");
                let hands: BTreeSet<_> = f4.iter().map(|c| c.handedness).collect();
                assert_eq!(hands.len(), 1, "{at}");
                assert_eq!(r.sigma_abs, n as i64, "{at}");
                assert_eq!(f2, 0, "{at}");
            }
            2 => {
                assert_eq!(r.sigma_signed, 0, "{at}");
                assert!(f4.is_empty() && f2 > 0, "{at}");
            }
            _ => {
                assert_eq!(r.sigma_signed, 0, "{at}");
                assert!(r.cusps.iter().all(|c| c.flat == FlatLabel::F1), "{at}");
            }
        }
    }

    // Z/2 × Z/3 and Z/6 labellings give the same cover
    let sp = bundled();
    let p = presentation(&sp);
    let (h, v) = (cusp_killing_hom(&p), screw_hom(&p));
    let product = build_cover(&CoverSpec::of_bundled(sp.clone(), 2, 3)).unwrap();
    let cyclic_hom = IntHomomorphism::new(h.values.iter().zip(&v.values).map(|(a, b)| 3 * a + 2 * b).collect());
    let cyclic = build_cover(&CoverSpec {
        base: sp.clone(),
        n: 6,
        m: 1,
        first: cyclic_hom,
        second: IntHomomorphism::new(vec![0; p.generators.len()]),
    })
    .unwrap();
    let a = geography(&product, 2, 3).unwrap();
    let b = geography(&cyclic, 6, 1).unwrap();
    assert_eq!((a.chi, a.sigma_abs, &a.type_counts), (b.chi, b.sigma_abs, &b.type_counts));
    let ha = truncated_homology(&product).unwrap();
    let hb = truncated_homology(&cyclic).unwrap();
    assert_eq!(ha.groups, hb.groups);
    assert_eq!(ha.boundary_groups, hb.boundary_groups);
}

fn geography_bounds() {
    let sp = bundled();
    // slopes, each manifold built and checked within a second
    for mm in [1usize, 3, 5] {
        let t = Instant::now();
        let (_, r) = bundled_cover_report(&sp, 1, mm).unwrap();
        assert!(t.elapsed() < Duration::from_secs(1), "M_({mm},1) took {:?}", t.elapsed());
        assert_eq!(r.slope.0, qf(1, mm as i64), "m = {mm}");
        if mm == 1 {
            assert_eq!((r.chi, r.sigma_abs), (1, 1));
            assert_eq!(r.slope.0, q(1));
        }
    }
    for r in grid() {
        let sigma = q(r.sigma_abs);
        assert!(q(r.chi) > qf(3_493, 100_000) * &sigma);
        assert!(sigma <= qf(4, 3) * q(r.cusp_count as i64));
        assert!(r.bounds.all());
    }
}

// ---------------------------------------------------------------------------
// 9

fn independently_verified(sp: &SidePairing) -> bool {
    // round trip through the text format so nothing from the search survives
    let fresh = parse_pairing(&sp.to_text()).unwrap();
    verify_poincare(&fresh).overall
}

fn search_soundness() {
    let sp = bundled();
    let target = canonicalize(&sp).unwrap();
    assert_eq!(target.cusp_count, 3);
    assert_eq!(target.h1_rank, 3);
    assert!(target.h1_torsion.is_empty());

    let random = search(&SearchConfig {
        mode: Mode::RandomRestart,
        seed: 2024,
        time_budget: Some(Duration::from_secs(60)),
        prefix: prefix_of(&sp, 6),
        ..SearchConfig::default()
    })
    .unwrap();
    assert!(!random.found.is_empty(), "random restarts found nothing");
    for f in &random.found {
        assert!(independently_verified(&f.pairing));
        assert_eq!(canonicalize(&f.pairing).unwrap(), f.certificate);
    }

    let seeded = search(&SearchConfig {
        prefix: prefix_of(&sp, 10),
        ..SearchConfig::default()
    })
    .unwrap();
    assert!(!seeded.budget_exhausted);
    assert!(seeded.found.iter().any(|f| f.certificate == target));
    assert!(seeded.found.iter().all(|f| independently_verified(&f.pairing)));

    // exhaustion of a fixed subtree does not depend on threads or splitting
    let run = |threads: usize, split_depth: usize, reduce: bool| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let out = pool
            .install(|| {
                search(&SearchConfig {
                    prefix: prefix_of(&sp, 7),
                    split_depth,
                    symmetry_reduction: reduce,
                    ..SearchConfig::default()
                })
            })
            .unwrap();
        assert!(!out.budget_exhausted);
        out.found
            .iter()
            .map(|f| (f.certificate.clone(), f.pairing.to_text()))
            .collect::<Vec<_>>()
    };
    let one = run(1, 1, true);
    assert!(one.iter().any(|f| f.0 == target));
    assert_eq!(one, run(4, 1, true));
    assert_eq!(one, run(4, 3, true));
    let reduced: BTreeSet<_> = one.iter().map(|f| f.0.clone()).collect();
    let full: BTreeSet<_> = run(4, 2, false).into_iter().map(|f| f.0).collect();
    assert_eq!(reduced, full);
}

// ---------------------------------------------------------------------------
// 10

fn check(r: Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>) {
    if let Err(e) = r {
        panic!("{e}");
    }
}

fn integer_matrix() -> impl Strategy<Value = IntegerMatrix> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-20i64..=20, c), r)
            .prop_map(move |rows| IntegerMatrix::from_i64(&rows, c))
    })
}

fn is_unimodular(u: &IntegerMatrix) -> bool {
    u.det().abs().is_one()
}

fn property_suites() {
    let mut runner = TestRunner::new(Config {
        cases: 500,
        ..Config::default()
    });
    check(runner.run(&integer_matrix(), |a| {
        let s = smith_normal_form(&a);
        prop_assert_eq!(&s.u.mul(&a).mul(&s.v), &s.d);
        prop_assert!(is_unimodular(&s.u) && is_unimodular(&s.v));
        prop_assert!(s.u.mul(&s.u_inv) == IntegerMatrix::identity(a.nrows()));
        prop_assert!(s.v.mul(&s.v_inv) == IntegerMatrix::identity(a.ncols()));
        let d = s.diagonal();
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                if i != j || i >= s.rank {
                    prop_assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        prop_assert!(d.iter().all(|x| x.is_positive()));
        prop_assert!(d.windows(2).all(|w| (&w[1] % &w[0]).is_zero()));
        Ok(())
    }));

    let sp = bundled();
    let gens = sp.free_sides();
    let round_trip = |g: &ExactMatrix| -> Result<(), TestCaseError> {
        let inv = g.inverse().ok_or_else(|| TestCaseError::fail("singular"))?;
        prop_assert!(lorentz_check(g) && lorentz_check(&inv));
        prop_assert!(g.mul_ref(&inv).is_identity());
        prop_assert_eq!(g.lorentz_inverse(), inv);
        Ok(())
    };
    for &s in &gens {
        round_trip(sp.matrix(s)).unwrap();
    }
    let letters = prop::collection::vec((prop::sample::select(gens.clone()), prop::bool::ANY), 1..=10);
    let mut runner = TestRunner::new(Config {
        cases: 100,
        ..Config::default()
    });
    check(runner.run(&letters, |ls| {
        let w = Word::new(ls.into_iter().map(|(g, pos)| Letter::new(g, if pos { 1 } else { -1 })).collect());
        let g = eval_word(&w, &sp);
        round_trip(&g)?;
        prop_assert!(eval_word(&w.inverse(), &sp).mul_ref(&g).is_identity());
        Ok(())
    }));

    let sym = symmetry_group();
    let partition = |sp: &SidePairing| -> BTreeSet<Vec<usize>> {
        vertex_cycles(sp).into_iter().map(|c| c.vertices).collect()
    };
    let base = partition(&sp);
    let mut runner = TestRunner::new(Config {
        cases: 20,
        ..Config::default()
    });
    check(runner.run(&(0..sym.order()), |k| {
        let c = sp.conjugate(k).unwrap();
        let got = partition(&c);
        let perm = &sym.get(k).perm;
        let want: BTreeSet<Vec<usize>> = base
            .iter()
            .map(|cl| {
                let mut v: Vec<usize> = cl.iter().map(|&x| perm[x]).collect();
                v.sort_unstable();
                v
            })
            .collect();
        prop_assert_eq!(got, want);
        Ok(())
    }));
}

// ---------------------------------------------------------------------------

fn main() {
    let criteria: [(&str, u64, fn()); 10] = [
        ("table fidelity", 1, table_fidelity),
        ("relator identity", 1, relator_identity),
        ("Poincaré verification and perturbed fixtures", 5, poincare_verification),
        ("cusp census", 5, cusp_census),
        ("homology of the bundled manifold", 30, homology_of_bundled),
        ("homomorphisms h and v", 1, homomorphisms),
        ("covers grid", 300, covers_grid),
        ("geography", 300, geography_bounds),
        ("search soundness", 240, search_soundness),
        ("property suites", 120, property_suites),
    ];
    // optional criterion numbers on the command line select a subset
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();

    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f));
        let dt = t.elapsed();
        let verdict = match outcome {
            Ok(()) if dt <= Duration::from_secs(limit) => "PASS".to_string(),
            Ok(()) => format!("FAIL (over the {limit} s limit)"),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                format!("FAIL ({msg})")
            }
        };
        if !verdict.starts_with("PASS") {
            failed += 1;
        }
        println!("criterion {:>2} {name}: {verdict} [{:.2} s]", i + 1, dt.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all selected criteria passed");
}
