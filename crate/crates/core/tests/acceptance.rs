//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.
//!
//! Tolerances: every comparison is exact (big integers and rationals); runtime
//! budgets are wall-clock limits per criterion as listed next to each check.

use std::time::{Duration, Instant};

use cnkit::congruent::{prop44_scan, search_uvm, tunnell_consistent, uvm_to_point};
use cnkit::curve::CurveA;
use cnkit::descent::{
    build_certificate, cascade_u4v4, enumerate_b1, rank_from_sizes, solve_quartic, subgroup_closure,
    verify_certificate, DescentCertificate, QuarticProblem, QuarticWitness, SearchOptions, Seed, Side,
};
use cnkit::exactnum::{int, rat, rat_sqrt, squarefree_decompose, Int, Rat, SquareClass};
use cnkit::families::{
    family1_certificate, family1_distinctness, family1_instance, family2_certificate, family2_instance,
    family2_orders, family2_quartic, lemma42_param, on_rational_curve, table2_products, Distinctness, TABLE1,
};
use cnkit::isogeny::{alpha, IsogenyPair};
use cnkit::{CurvePoint, TorsionVerdict};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: false,
        detail: detail.into(),
    }
}

fn run(id: u32, name: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    let over = budget.is_some_and(|b| took > b);
    let ok = out.ok && !over;
    let budget_txt = budget.map(|b| format!(" budget {:.0?}", b)).unwrap_or_default();
    let over_txt = if over { " OVER BUDGET" } else { "" };
    println!(
        "{} {id} {name}: {} [{:.2?}{budget_txt}{over_txt}]",
        if ok { "PASS" } else { "FAIL" },
        out.detail,
        took
    );
    ok
}

fn c1_a_values() -> Outcome {
    let spot = [
        ((1, 2), -210i64),
        ((1, 3), -3570),
        ((3, 4), 31050),
        ((1, 40), -24552945606),
    ];
    for ((r, s), a) in spot {
        let got = family1_instance(&int(r), &int(s)).unwrap().a_value;
        if got != int(a) {
            return fail(format!("({r}, {s}) gives {got}, expected {a}"));
        }
    }
    let mut bad = Vec::new();
    for (r, s, a, _) in TABLE1 {
        let got = family1_instance(&int(r), &int(s)).unwrap().a_value;
        if got != int(a) {
            bad.push(format!("({r},{s}): {got} != {a}"));
        }
    }
    if bad.is_empty() {
        pass(format!("{}/{} A-values exact", TABLE1.len(), TABLE1.len()))
    } else {
        fail(bad.join("; "))
    }
}

fn c2_family1(certs: &mut Vec<DescentCertificate>) -> Outcome {
    for (r, s, _, rank) in TABLE1.iter().take(5) {
        let inst = family1_instance(&int(*r), &int(*s)).unwrap();
        let d = family1_distinctness(&inst).unwrap();
        if d != Distinctness::Distinct16 {
            return fail(format!("({r}, {s}): {d:?}"));
        }
        let cert = family1_certificate(&inst, &SearchOptions::with_height(0)).unwrap();
        if cert.rank_lower_bound < 2 || *rank < 2 {
            return fail(format!("({r}, {s}): rank_lower_bound {}", cert.rank_lower_bound));
        }
        certs.push(cert);
    }
    pass("first 5 rows Distinct16 with rank_lower_bound >= 2")
}

fn c3_uv_witnesses(certs: &mut Vec<DescentCertificate>) -> Outcome {
    let a = int(-225);
    let ebar = Side::Ebar.constant(&a);
    let w1 = QuarticWitness::from_i64(255, 2, 15);
    let w10 = QuarticWitness::from_i64(10, 1, 1);
    if let Err(e) = w1.check(&int(1), &ebar, None) {
        return fail(format!("Ebar(1) witness (255,2,15): {e}"));
    }
    if let Err(e) = w10.check(&int(10), &(&ebar / int(10)), None) {
        return fail(format!("Ebar(10) witness (10,1,1): {e}"));
    }
    let (cert, _) = cascade_u4v4(&int(2), &int(1), &SearchOptions::with_height(0)).unwrap();
    if cert.a_curve != a {
        return fail(format!("cascade curve {} != -225", cert.a_curve));
    }
    let has10 = cert.contains(Side::Ebar, &SquareClass::from_squarefree(int(10)).unwrap());
    let rank = cert.rank_lower_bound;
    certs.push(cert);
    if !has10 || rank < 1 {
        return fail(format!("class 10 present: {has10}, rank_lower_bound {rank}"));
    }
    pass("(255,2,15) and (10,1,1) exact, rank_lower_bound >= 1")
}

fn c4_specialization(certs: &mut Vec<DescentCertificate>) -> Outcome {
    let inst = match family2_instance(&int(2), &int(15), &rat(17, 225)) {
        Ok(i) => i,
        Err(e) => return fail(e.to_string()),
    };
    if inst.a_t != rat(692527232, 854296875) {
        return fail(format!("constant {} != 692527232/854296875", inst.a_t));
    }
    let c = -(&inst.a_t * &inst.a_t);
    for (name, p) in [("P", &inst.p), ("Q", &inst.q), ("R", &inst.r)] {
        if !on_rational_curve(&c, p) {
            return fail(format!("{name} off curve"));
        }
    }
    let orders = family2_orders(&inst).unwrap();
    if orders.iter().any(|o| *o != TorsionVerdict::InfiniteOrder) {
        return fail(format!("orders {orders:?}"));
    }
    certs.push(family2_certificate(&inst, &SearchOptions::with_height(0)).unwrap());
    pass("constant exact; P, Q, R on curve with infinite order")
}

fn c5_quartic_point() -> Outcome {
    let t = rat(2, 15);
    let y = rat(17, 225);
    let rhs = family2_quartic(&t);
    let direct = rat(-896, 1) * t.pow(4) - rat(40, 1) * t.pow(2) + Rat::one();
    if &y * &y == rhs && rhs == direct {
        pass("(17/225)^2 = -896 t^4 - 40 t^2 + 1 at t = 2/15")
    } else {
        fail(format!("y^2 = {}, quartic = {rhs}", &y * &y))
    }
}

fn c6_round_trip(certs: &mut Vec<DescentCertificate>) -> Outcome {
    let mut certified = Vec::new();
    for n in 1i64..=50 {
        let (sf, f) = squarefree_decompose(&int(n)).unwrap();
        if !f.is_one() || sf != int(n) {
            continue;
        }
        let Some(w) = search_uvm(&int(n), 200) else {
            continue;
        };
        let p = uvm_to_point(&w).unwrap();
        let seeds = [Seed::Point {
            side: Side::E,
            point: p,
        }];
        let cert = build_certificate(&int(-n * n), &SearchOptions::with_height(0), &seeds).unwrap();
        if cert.rank_lower_bound < 1 {
            return fail(format!("n = {n}: rank_lower_bound 0 despite uvm triple"));
        }
        certified.push(n);
        certs.push(cert);
    }
    for n in [1u64, 2, 3] {
        if tunnell_consistent(n).unwrap() {
            return fail(format!("Tunnell consistent for n = {n}"));
        }
        if search_uvm(&Int::from(n), 200).is_some() {
            return fail(format!("uvm triple found for n = {n}"));
        }
    }
    pass(format!(
        "{} squarefree n certified: {certified:?}; n = 1, 2, 3 excluded",
        certified.len()
    ))
}

fn c7_square_scan() -> Outcome {
    let hits = prop44_scan(100);
    if hits.is_empty() {
        pass("no (u, v) with |u|, |v| <= 100")
    } else {
        fail(format!("{} hits, first {:?}", hits.len(), hits[0]))
    }
}

fn property<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn raw_alpha(c: &CurveA, p: &CurvePoint) -> Rat {
    match p {
        CurvePoint::Infinity => Rat::one(),
        CurvePoint::Affine { x, .. } if x.is_zero() => Rat::from_integer(c.a().clone()),
        CurvePoint::Affine { x, .. } => x.clone(),
    }
}

fn small(p: &CurvePoint) -> bool {
    let limit = Int::from(10u64).pow(20);
    p.x()
        .is_none_or(|x| x.numer().abs() < limit && x.denom() < &limit)
}

fn c8_properties(certs: &[DescentCertificate]) -> Outcome {
    let e36 = CurveA::new(int(-36)).unwrap();
    let g = CurvePoint::from_ints(12, 36);
    let h = CurvePoint::from_ints(-3, 9);
    let t0 = CurvePoint::from_ints(0, 0);
    let pair = IsogenyPair::from_a(int(-36)).unwrap();

    let group = property(1000, (-6i64..6, -6i64..6, -4i64..4), |(i, j, k)| {
        let p = e36.add(&e36.mul(&g, i).unwrap(), &t0).unwrap();
        let q = e36.mul(&h, j).unwrap();
        let r = e36.mul(&g, k).unwrap();
        let pq = e36.add(&p, &q).unwrap();
        prop_assert!(e36.contains(&pq));
        prop_assert_eq!(&pq, &e36.add(&q, &p).unwrap());
        prop_assert_eq!(
            e36.add(&pq, &r).unwrap(),
            e36.add(&p, &e36.add(&q, &r).unwrap()).unwrap()
        );
        prop_assert_eq!(e36.add(&p, &p.neg()).unwrap(), CurvePoint::Infinity);
        prop_assert_eq!(e36.add(&p, &CurvePoint::Infinity).unwrap(), p);
        Ok(())
    });
    let doubling = property(200, (-8i64..8, -3i64..3), |(k, j)| {
        let p = e36
            .add(&e36.mul(&g, k).unwrap(), &e36.mul(&h, j).unwrap())
            .unwrap();
        prop_assert_eq!(pair.psi(&pair.phi(&p).unwrap()).unwrap(), e36.double(&p).unwrap());
        Ok(())
    });
    let homomorphism = property(200, (-5i64..5, -5i64..5, -3i64..3, -3i64..3), |(a, b, c, d)| {
        let p = e36
            .add(&e36.mul(&g, a).unwrap(), &e36.mul(&h, c).unwrap())
            .unwrap();
        let q = e36
            .add(&e36.mul(&g, b).unwrap(), &e36.mul(&h, d).unwrap())
            .unwrap();
        let pq = e36.add(&p, &q).unwrap();
        // equal classes iff the product of representatives is a square; factoring
        // only when the coordinates are small enough for that to be quick
        let prod = raw_alpha(&e36, &p) * raw_alpha(&e36, &q) * raw_alpha(&e36, &pq);
        prop_assert!(rat_sqrt(&prod).is_some());
        if [&p, &q, &pq].iter().all(|t| small(t)) {
            let lhs = alpha(&e36, &pq).unwrap();
            let rhs = alpha(&e36, &p).unwrap().mul(&alpha(&e36, &q).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
        Ok(())
    });
    let lemma = property(1000, (any::<i64>(), any::<i64>()), |(r, s)| {
        let l = lemma42_param(&int(r), &int(s));
        prop_assert_eq!(&l.x * &l.x + &l.y * &l.y, int(2) * &l.z * &l.z);
        Ok(())
    });

    let mut cert_err = None;
    for c in certs {
        let sizes_ok = c.alpha.len().is_power_of_two() && c.alphabar.len().is_power_of_two();
        let closed = subgroup_closure(&c.classes(Side::E)).len() == c.alpha.len()
            && subgroup_closure(&c.classes(Side::Ebar)).len() == c.alphabar.len();
        let rank_ok = rank_from_sizes(c.alpha.len(), c.alphabar.len()) == c.rank_lower_bound;
        if let Err(e) = verify_certificate(c) {
            cert_err = Some(format!("A = {}: {e}", c.a_curve));
        } else if !(sizes_ok && closed && rank_ok) {
            cert_err = Some(format!(
                "A = {}: sizes {sizes_ok} closed {closed} rank {rank_ok}",
                c.a_curve
            ));
        }
        if cert_err.is_some() {
            break;
        }
    }

    let mut quartics = Vec::new();
    'outer: for a in [-36i64, -225, -49, -1, 6, -6, 15, 34, -100, -441, 20, -196] {
        for side in [Side::E, Side::Ebar] {
            for b1 in enumerate_b1(&side.constant(&int(a))).unwrap() {
                quartics.push(QuarticProblem::new(&int(a), side, b1).unwrap());
                if quartics.len() == 50 {
                    break 'outer;
                }
            }
        }
    }
    let mut par_err = None;
    for p in &quartics {
        let par = SearchOptions {
            height: 24,
            parallel: true,
            ..Default::default()
        };
        let seq = SearchOptions {
            parallel: false,
            ..par
        };
        let (x, y) = (solve_quartic(p, &par), solve_quartic(p, &seq));
        if x != y {
            par_err = Some(format!("{p:?}: {x:?} vs {y:?}"));
            break;
        }
    }

    let results = [
        ("group law x1000", group),
        ("psi phi = 2 x200", doubling),
        ("alpha homomorphism x200", homomorphism),
        ("x^2 + y^2 = 2z^2 x1000", lemma),
        ("certificate invariants", cert_err.map_or(Ok(()), Err)),
        ("parallel = sequential", par_err.map_or(Ok(()), Err)),
    ];
    let failed: Vec<String> = results
        .iter()
        .filter_map(|(n, r)| r.as_ref().err().map(|e| format!("{n}: {e}")))
        .collect();
    if failed.is_empty() {
        pass(format!(
            "all suites green; {} certificates checked, {} quartics compared",
            certs.len(),
            quartics.len()
        ))
    } else {
        fail(failed.join("; "))
    }
}

fn c9_product_table() -> Outcome {
    let mut bad = Vec::new();
    for (r1, s) in [(2i64, 15i64), (1, 1), (1, 2), (3, 5), (5, 7)] {
        for row in table2_products(&int(r1), &int(s)).unwrap() {
            if !(row.column2_matches && row.product_matches) {
                bad.push(format!(
                    "({r1},{s}) row {}: class {} vs listed {}, product {} vs listed {}",
                    row.label, row.uv_class, row.r1s_class, row.product, row.new_class
                ));
            }
        }
    }
    if bad.is_empty() {
        pass("8/8 rows match")
    } else {
        let rows: std::collections::BTreeSet<&str> = bad
            .iter()
            .map(|b| b.split(" row ").nth(1).unwrap().split(':').next().unwrap())
            .collect();
        fail(format!("mismatching rows {rows:?}; e.g. {}", bad[0]))
    }
}

fn main() {
    let mut certs = Vec::new();
    let secs = Duration::from_secs;
    let results = [
        run(1, "published A-values", Some(secs(1)), c1_a_values),
        run(2, "family-1 rank bound", Some(secs(5)), || c2_family1(&mut certs)),
        run(3, "u = 2, v = 1 witnesses", Some(secs(1)), || {
            c3_uv_witnesses(&mut certs)
        }),
        run(4, "rank-3 specialization", Some(secs(1)), || {
            c4_specialization(&mut certs)
        }),
        run(5, "quartic point", Some(secs(1)), c5_quartic_point),
        run(6, "n <= 50 round trip", Some(secs(60)), || {
            c6_round_trip(&mut certs)
        }),
        run(7, "uv(u^2-v^2) = +-w^2 scan", Some(secs(30)), c7_square_scan),
        run(8, "property suites", None, || c8_properties(&certs)),
        run(9, "square-class product table", Some(secs(1)), c9_product_table),
    ];
    let passed = results.iter().filter(|r| **r).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
