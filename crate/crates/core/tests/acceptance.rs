//! Runs the twelve acceptance criteria and prints one PASS/FAIL line each.
//!
//! Oracles here are written against the raw tables, not the library's own
//! checkers, wherever the criterion asks for an independent computation.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use unimagma::action::{canonical_point, semidirect_product};
use unimagma::classify::{
    enumerate_actions, enumerate_points, equivalent_points, for_each_action, phi_of_point,
    quotient_points, SearchLimits,
};
use unimagma::gallery::{self, cases, interval, medial, sphere};
use unimagma::magma::{enumerate_magmas, find_isomorphism};
use unimagma::point::{
    bijection_criterion, composability_sufficient_witness, compose_points, composition_witness,
    kernel_identities, pullback_point, ssfl_transport, verify_point,
};
use unimagma::{ElementMap, FiniteMagma, Outcome, RetractionPoint};

type Verdict = Result<String, String>;

fn magmas(order: usize) -> Vec<FiniteMagma> {
    enumerate_magmas(order).unwrap().collect()
}

fn magmas_up_to(order: usize) -> Vec<FiniteMagma> {
    (1..=order).flat_map(magmas).collect()
}

fn limits() -> SearchLimits {
    SearchLimits::default()
}

/// Points at `x_size = 2` over each order-2 magma, `|A| ≤ 4`.
fn base_points() -> Vec<RetractionPoint> {
    magmas(2)
        .iter()
        .flat_map(|b| enumerate_points(2, b, 4, limits()).unwrap())
        .collect()
}

/// Points at `x_size ∈ {1, 2}` over every magma of order ≤ 2, `|A| ≤ 4`.
fn wide_points() -> Vec<RetractionPoint> {
    let mut out = Vec::new();
    for b in magmas_up_to(2) {
        for x in 1..=2 {
            out.extend(enumerate_points(x, &b, 4, limits()).unwrap());
        }
    }
    out
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut shapes: Vec<(usize, FiniteMagma)> =
        magmas_up_to(3).into_iter().map(|b| (1, b)).collect();
    shapes.extend(magmas(2).into_iter().map(|b| (2, b)));
    shapes.extend(magmas(3).into_iter().map(|b| (2, b)));
    shapes.push((3, FiniteMagma::trivial()));
    let mut total = 0usize;
    let mut failure = None;
    for (x, b) in &shapes {
        for_each_action(*x, b, limits(), |a| {
            total += 1;
            if failure.is_none() {
                let back = canonical_point(a).and_then(|pt| phi_of_point(&pt));
                if back.as_ref() != Ok(a) {
                    failure = Some(format!(
                        "x={x}, B={:?}: {a:?} came back as {back:?}",
                        b.table()
                    ));
                }
            }
        })
        .map_err(|e| e.to_string())?;
    }
    if let Some(f) = failure {
        return Err(f);
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(120), || {
        format!("{total} actions round-trip exactly but took {elapsed:?}, over the 2 minute budget")
    })?;
    Ok(format!(
        "{total} actions over {} shapes round-trip exactly",
        shapes.len()
    ))
}

fn criterion_2(points: &[RetractionPoint]) -> Verdict {
    for (i, pt) in points.iter().enumerate() {
        let action = phi_of_point(pt).map_err(|e| e.to_string())?;
        let canon = canonical_point(&action).map_err(|e| e.to_string())?;
        let alpha = equivalent_points(pt, &canon)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("point {i} is not equivalent to F(Phi(pt))"))?;
        match ssfl_transport(pt, &canon, &alpha).map_err(|e| e.to_string())? {
            Outcome::Built(_) => {}
            Outcome::Refuted(v) => return Err(format!("point {i}: transport refuted: {v}")),
        }
    }
    Ok(format!(
        "{} points equivalent to their canonical point",
        points.len()
    ))
}

/// act1–act4 straight from the flat table, zero pinned at 0.
fn is_action_table(t: &[usize], nx: usize, b: &FiniteMagma) -> bool {
    let nb = b.size();
    let e = b.unit();
    let phi = |x: usize, c: usize, x2: usize, c2: usize| t[((x * nb + c) * nx + x2) * nb + c2];
    let phi00 = |x: usize, c: usize| phi(x, e, 0, c);
    for x in 0..nx {
        if phi(x, e, 0, e) != x || phi(0, e, x, e) != x {
            return false;
        }
        for c in 0..nb {
            if phi(x, c, 0, e) != phi00(x, c) || phi(0, e, x, c) != phi00(x, c) {
                return false;
            }
        }
    }
    for c in 0..nb {
        for c2 in 0..nb {
            if phi(0, c, 0, c2) != 0 {
                return false;
            }
        }
    }
    for x in 0..nx {
        for c in 0..nb {
            for x2 in 0..nx {
                for c2 in 0..nb {
                    let inner = phi(phi00(x, c), c, phi00(x2, c2), c2);
                    if phi(x, c, x2, c2) != phi00(inner, b.op(c, c2)) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn criterion_3() -> Verdict {
    let b = FiniteMagma::cyclic(2);
    let oracle: BTreeSet<Vec<usize>> = (0u32..1 << 16)
        .map(|bits| {
            (0..16)
                .map(|i| (bits >> (15 - i) & 1) as usize)
                .collect::<Vec<_>>()
        })
        .filter(|t| is_action_table(t, 2, &b))
        .collect();
    let pruned: BTreeSet<Vec<usize>> = enumerate_actions(2, &b, limits())
        .map_err(|e| e.to_string())?
        .iter()
        .map(|a| a.table().to_vec())
        .collect();
    ensure(oracle == pruned, || {
        format!(
            "pruned search found {} actions, full scan {}",
            pruned.len(),
            oracle.len()
        )
    })?;
    let points = enumerate_points(2, &b, 4, limits()).map_err(|e| e.to_string())?;
    let classes = quotient_points(&points).map_err(|e| e.to_string())?;
    ensure(classes.len() == oracle.len(), || {
        format!("{} classes but {} actions", classes.len(), oracle.len())
    })?;
    Ok(format!(
        "{} points, {} classes = {} actions (full scan of 65536 tables)",
        points.len(),
        classes.len(),
        oracle.len()
    ))
}

/// Exhaustive search over all maps `A -> A'` for a compatible morphism.
fn brute_force_equivalent(pt: &RetractionPoint, pt2: &RetractionPoint) -> bool {
    let (a, a2) = (pt.a(), pt2.a());
    let (n, m) = (a.size(), a2.size());
    let mut alpha = vec![0usize; n];
    loop {
        let compatible = (0..pt.x_size()).all(|x| alpha[pt.k().apply(x)] == pt2.k().apply(x))
            && pt
                .b()
                .elements()
                .all(|c| alpha[pt.s().apply(c)] == pt2.s().apply(c))
            && (0..n).all(|i| {
                pt2.p().apply(alpha[i]) == pt.p().apply(i)
                    && pt2.q().apply(alpha[i]) == pt.q().apply(i)
            })
            && (0..n).all(|i| (0..n).all(|j| alpha[a.op(i, j)] == a2.op(alpha[i], alpha[j])));
        if compatible {
            return true;
        }
        let mut slot = n;
        loop {
            if slot == 0 {
                return false;
            }
            slot -= 1;
            alpha[slot] += 1;
            if alpha[slot] < m {
                break;
            }
            alpha[slot] = 0;
        }
    }
}

fn criterion_4(points: &[RetractionPoint]) -> Verdict {
    const CAP: usize = 100_000;
    let mut pairs = Vec::new();
    for i in 0..points.len() {
        for j in i..points.len() {
            if points[i].b() == points[j].b() && points[i].x_size() == points[j].x_size() {
                pairs.push((i, j));
            }
        }
    }
    let all = pairs.len();
    if all > CAP {
        let mut rng = ChaCha8Rng::seed_from_u64(gallery::DEFAULT_SEED);
        let mut keep = sample(&mut rng, all, CAP).into_vec();
        keep.sort_unstable();
        pairs = keep.into_iter().map(|k| pairs[k]).collect();
    }
    let mut equivalent = 0;
    for &(i, j) in &pairs {
        let decided = equivalent_points(&points[i], &points[j])
            .map_err(|e| e.to_string())?
            .is_some();
        let truth = brute_force_equivalent(&points[i], &points[j]);
        ensure(decided == truth, || {
            format!("points {i} and {j}: Phi says {decided}, exhaustive search says {truth}")
        })?;
        equivalent += usize::from(truth);
    }
    Ok(format!(
        "{} of {all} pairs checked, {equivalent} equivalent, all agree",
        pairs.len()
    ))
}

/// Points `(B, k', q', s', p')` whose middle magma is some order-2 magma.
fn upper_points() -> Vec<RetractionPoint> {
    let mut out = Vec::new();
    for c in magmas_up_to(2) {
        for y in 1..=2 {
            out.extend(
                enumerate_points(y, &c, 2, limits())
                    .unwrap()
                    .into_iter()
                    .filter(|u| u.a().size() == 2),
            );
        }
    }
    out
}

fn criterion_5(points: &[RetractionPoint], uppers: &[RetractionPoint]) -> Verdict {
    let mut sufficient = 0;
    for (i, pt) in points.iter().enumerate() {
        let r = kernel_identities(pt);
        ensure(r.is_valid(), || format!("point {i}: {r}"))?;

        let ks_q =
            (0..pt.x_size()).all(|x| pt.b().elements().all(|c| pt.q().apply(pt.ks(x, c)) == x));
        let mut seen = BTreeSet::new();
        let bijective = pt
            .a()
            .elements()
            .all(|a| seen.insert((pt.q().apply(a), pt.p().apply(a))))
            && seen.len() == pt.x_size() * pt.b().size();
        let (lib_bij, lib_adm) = bijection_criterion(pt);
        ensure(
            ks_q == bijective && lib_bij == bijective && lib_adm == ks_q,
            || {
                format!("point {i}: bijective {bijective}, q(k+s)=1 {ks_q}, library {lib_bij}/{lib_adm}")
            },
        )?;

        if pt.a().is_associative() {
            ensure(composability_sufficient_witness(pt).is_none(), || {
                format!("point {i}: associative A but the sufficient condition fails")
            })?;
        }
        if composability_sufficient_witness(pt).is_none() {
            sufficient += 1;
            for (j, up) in uppers.iter().filter(|u| u.a() == pt.b()).enumerate() {
                let w = composition_witness(pt, up).map_err(|e| e.to_string())?;
                ensure(w.is_none(), || {
                    format!("point {i}, partner {j}: composite condition fails at {w:?}")
                })?;
            }
        }
    }
    Ok(format!(
        "{} points: identities, bijection criterion hold; {sufficient} meet the sufficient condition and compose",
        points.len()
    ))
}

fn is_morphism(g: &[usize], z: &FiniteMagma, b: &FiniteMagma) -> bool {
    g[z.unit()] == b.unit()
        && z.elements()
            .all(|i| z.elements().all(|j| g[z.op(i, j)] == b.op(g[i], g[j])))
}

fn criterion_6(points: &[RetractionPoint]) -> Verdict {
    let zs = magmas_up_to(2);
    let mut small: Vec<RetractionPoint> = points
        .iter()
        .filter(|p| p.a().size() <= 3)
        .cloned()
        .collect();
    for b in magmas(3) {
        small.extend(enumerate_points(1, &b, 3, limits()).map_err(|e| e.to_string())?);
    }
    small.extend(
        enumerate_points(3, &FiniteMagma::trivial(), 3, limits()).map_err(|e| e.to_string())?,
    );
    let mut built = 0;
    for (i, pt) in small.iter().enumerate() {
        let nb = pt.b().size();
        for z in &zs {
            let nz = z.size();
            for code in 0..nb.pow(nz as u32) {
                let g: Vec<usize> = (0..nz)
                    .map(|e| code / nb.pow((nz - 1 - e) as u32) % nb)
                    .collect();
                if !is_morphism(&g, z, pt.b()) {
                    continue;
                }
                let gm = ElementMap::new(nb, g.clone()).unwrap();
                let pb =
                    pullback_point(pt, &gm, z).map_err(|e| format!("point {i}, g={g:?}: {e}"))?;
                let r = verify_point(&pb);
                ensure(r.is_valid(), || format!("point {i}, g={g:?}: {r}"))?;
                let fibre = pt
                    .a()
                    .elements()
                    .map(|a| z.elements().filter(|&e| g[e] == pt.p().apply(a)).count())
                    .sum::<usize>();
                ensure(
                    pb.a().size() == fibre && pb.b() == z && pb.x_size() == pt.x_size(),
                    || format!("point {i}, g={g:?}: pullback has the wrong shape"),
                )?;
                built += 1;
            }
        }
    }
    Ok(format!(
        "{built} pullbacks of {} points, all valid points",
        small.len()
    ))
}

/// `(k(x) + s(k'(y))) + s(s'(c)) = k(x) + s(k'(y) + s'(c))` for all `x, y, c`.
fn composite_condition(pt: &RetractionPoint, up: &RetractionPoint) -> bool {
    let (a, b) = (pt.a(), pt.b());
    (0..pt.x_size()).all(|x| {
        let kx = pt.k().apply(x);
        (0..up.x_size()).all(|y| {
            let ky = up.k().apply(y);
            up.b().elements().all(|c| {
                let sc = up.s().apply(c);
                a.op(a.op(kx, pt.s().apply(ky)), pt.s().apply(sc))
                    == a.op(kx, pt.s().apply(b.op(ky, sc)))
            })
        })
    })
}

/// Compares `compose_points` with the condition on one pair.
fn compose_agrees(pt: &RetractionPoint, up: &RetractionPoint, tag: &str) -> Result<bool, String> {
    let expected = composite_condition(pt, up);
    let got = match compose_points(pt, up).map_err(|e| format!("{tag}: {e}"))? {
        Outcome::Built(c) => {
            let r = verify_point(&c);
            ensure(r.is_valid(), || format!("{tag}: composite {r}"))?;
            true
        }
        Outcome::Refuted(_) => false,
    };
    ensure(got == expected, || {
        format!("{tag}: composed {got}, condition {expected}")
    })?;
    ensure(got || !pt.a().is_associative(), || {
        format!("{tag}: associative A failed to compose")
    })?;
    Ok(got)
}

/// The stated pairs have `|A| ≤ 3`. With a middle magma of order 2 one of
/// `k'(y)`, `s'(c)` is always the unit, so the condition cannot fail there;
/// canonical points over order-3 middle magmas are added so refusals occur.
fn criterion_7(points: &[RetractionPoint], uppers: &[RetractionPoint]) -> Verdict {
    let (mut stated, mut pairs, mut composed) = (0, 0, 0);
    for (i, pt) in points.iter().enumerate() {
        for (j, up) in uppers.iter().enumerate().filter(|(_, u)| u.a() == pt.b()) {
            pairs += 1;
            stated += usize::from(pt.a().size() <= 3);
            composed += usize::from(compose_agrees(pt, up, &format!("point {i}, partner {j}"))?);
        }
    }

    let (mut extra, mut extra_composed) = (0, 0);
    let mut wide_uppers = Vec::new();
    for c in magmas(2) {
        wide_uppers.extend(
            enumerate_points(2, &c, 3, limits())
                .map_err(|e| e.to_string())?
                .into_iter()
                .filter(|u| u.a().size() == 3),
        );
    }
    let middles: BTreeSet<Vec<usize>> =
        wide_uppers.iter().map(|u| u.a().table().to_vec()).collect();
    for table in &middles {
        let b = FiniteMagma::from_flat(3, 0, table.clone()).unwrap();
        let mut lower = Vec::new();
        for_each_action(2, &b, limits(), |a| {
            if lower.len() < 200 {
                lower.push(canonical_point(a).unwrap());
            }
        })
        .map_err(|e| e.to_string())?;
        for (i, pt) in lower.iter().enumerate() {
            for (j, up) in wide_uppers.iter().enumerate().filter(|(_, u)| u.a() == &b) {
                extra += 1;
                extra_composed += usize::from(compose_agrees(
                    pt,
                    up,
                    &format!("B={table:?}, action {i}, partner {j}"),
                )?);
            }
        }
    }
    Ok(format!(
        "{pairs} pairs ({stated} with |A| <= 3), {composed} compose; {extra} pairs over order-3 middles, {} refused; all match the condition",
        extra - extra_composed
    ))
}

fn criterion_8() -> Verdict {
    let start = Instant::now();
    let sdp = semidirect_product(&gallery::inversion_action(3)).map_err(|e| e.to_string())?;
    let m = sdp.magma();
    ensure(m.size() == 6 && m.is_associative(), || {
        format!("order {}, associative {}", m.size(), m.is_associative())
    })?;
    let iso =
        find_isomorphism(m, &FiniteMagma::symmetric_group(3)).ok_or("no isomorphism to S3")?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "isomorphic to S3 via {:?} in {elapsed:?}",
        iso.values()
    ))
}

fn criterion_9() -> Verdict {
    let r =
        sphere::sphere_verify(10_000, 1e-9, gallery::DEFAULT_SEED).map_err(|e| e.to_string())?;
    ensure(r.is_valid(), || r.to_string())?;
    Ok("pole cases exact, 10000 samples within 1e-9, two poles admitted".into())
}

fn criterion_10() -> Verdict {
    use interval::{interval_oplus as plus, IntervalElement as I};
    let r = interval::halfline_transport_check(10_000, 1e-12, gallery::DEFAULT_SEED)
        .map_err(|e| e.to_string())?;
    ensure(r.is_valid(), || r.to_string())?;
    let left = plus(plus(I::PLUS_ONE, I::MINUS_ONE), I::MINUS_ONE);
    let right = plus(I::PLUS_ONE, plus(I::MINUS_ONE, I::MINUS_ONE));
    ensure(left.value() == -1.0 && right.value() == 0.0, || {
        format!(
            "(+1+-1)+-1 = {}, +1+(-1+-1) = {}",
            left.value(),
            right.value()
        )
    })?;
    ensure(
        interval::nonassociativity_witness() == (left, right),
        || "library witness differs".into(),
    )?;
    Ok("transport within 1e-12 on 10000 samples; (+1+-1)+-1 = -1, +1+(-1+-1) = 0".into())
}

fn example_points() -> Vec<RetractionPoint> {
    let z2 = FiniteMagma::cyclic(2);
    let mut out = vec![
        gallery::s3_point(),
        gallery::adjoin_poles_point(&z2, &FiniteMagma::trivial()),
        gallery::adjoin_poles_point(&FiniteMagma::trivial(), &z2),
        gallery::left_loop_point(&FiniteMagma::trivial()),
        gallery::left_loop_point(&z2),
    ];
    let mut medial_bases = vec![z2];
    medial_bases.extend(medial::medial_non_loops(3).unwrap());
    for b in medial_bases {
        if let Ok(r) = medial::medial_order_point(&b, medial::DEFAULT_CHOICE_CAP) {
            out.extend(r.points.into_iter().map(|m| m.point));
        }
    }
    out
}

fn criterion_11(points: &[RetractionPoint], examples: &[RetractionPoint]) -> Verdict {
    let mut met = 0;
    for (i, pt) in points.iter().chain(examples).enumerate() {
        let ladder = cases::particular_case_check(pt).map_err(|e| format!("point {i}: {e}"))?;
        let r = ladder.report();
        ensure(r.is_valid(), || format!("point {i}: {r}"))?;
        met += ladder.items.iter().filter(|c| c.hypothesis_met).count();
    }
    Ok(format!(
        "{} enumerated + {} example points, {met} hypotheses met, no conclusion fails",
        points.len(),
        examples.len()
    ))
}

fn criterion_12(points: &[RetractionPoint]) -> Verdict {
    let s3 = cases::special_structure_check(&gallery::s3_point()).map_err(|e| e.to_string())?;
    ensure(s3.monoid.passed(), || {
        format!("S3 monoid branch: {:?}", s3.monoid)
    })?;
    let mut monoids = 0;
    for (i, pt) in points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.a().is_associative())
    {
        let s = cases::special_structure_check(pt).map_err(|e| e.to_string())?;
        ensure(s.monoid.passed(), || format!("point {i}: {:?}", s.monoid))?;
        monoids += 1;
    }
    let pt = gallery::left_loop_point(&FiniteMagma::trivial());
    let a = pt.a();
    ensure(
        a.size() == 5 && a.is_left_loop() && !a.is_associative(),
        || "no nonassociative left loop of order 5".into(),
    )?;
    let s = cases::special_structure_check(&pt).map_err(|e| e.to_string())?;
    ensure(s.left_loop.passed(), || {
        format!("left-loop branch: {:?}", s.left_loop)
    })?;
    let action = phi_of_point(&pt).map_err(|e| e.to_string())?;
    let rho_trivial = (0..pt.x_size()).all(|x| pt.b().elements().all(|c| action.phi00(x, c) == x));
    let pairs: BTreeSet<_> = a
        .elements()
        .map(|i| (pt.q().apply(i), pt.p().apply(i)))
        .collect();
    ensure(
        rho_trivial && pairs.len() == a.size() && pairs.len() == pt.x_size() * pt.b().size(),
        || "rho is not the identity or the pair map is not onto X x B".into(),
    )?;
    Ok(format!("S3 and {monoids} associative points pass the monoid branch; order-5 loop passes the left-loop branch"))
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

fn main() -> ExitCode {
    let base = base_points();
    let wide = wide_points();
    let uppers = upper_points();
    let examples = example_points();

    let criteria: Vec<Criterion> = vec![
        (
            "Phi(F(a)) = a on every enumerated action",
            Box::new(criterion_1),
        ),
        (
            "every point is equivalent to F(Phi(pt))",
            Box::new(|| criterion_2(&base)),
        ),
        (
            "equivalence classes = actions at x=2, B=Z2",
            Box::new(criterion_3),
        ),
        (
            "Phi decision matches exhaustive map search",
            Box::new(|| criterion_4(&wide)),
        ),
        (
            "kernel identities, sufficient condition, bijection criterion",
            Box::new(|| criterion_5(&base, &uppers)),
        ),
        ("pullbacks are points", Box::new(|| criterion_6(&wide))),
        (
            "composition succeeds exactly under the composite condition",
            Box::new(|| criterion_7(&wide, &uppers)),
        ),
        ("S3 from the inversion action", Box::new(criterion_8)),
        ("sphere action", Box::new(criterion_9)),
        ("interval magma", Box::new(criterion_10)),
        (
            "particular-case ladder",
            Box::new(|| criterion_11(&wide, &examples)),
        ),
        (
            "monoid and left-loop cases",
            Box::new(|| criterion_12(&wide)),
        ),
    ];

    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", n + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.2}s]", n + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
