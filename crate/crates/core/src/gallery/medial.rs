//! Points built from the order `x ≥ b ⇔ x = u + b` on a medial magma.
//!
//! For `B` medial the pairs `(x, b)` with `x ≥ b` form a submagma `A` of
//! `B × B`, and `k(x) = (x, 0)`, `s(b) = (b, b)`, `p(x, b) = b` together with
//! any choice `q(x, b) ∈ {u : u + b = x}` (with `q(b, b) = 0`, `q(x, 0) = x`)
//! give a point from `B` to `B`. Writing `q(x, b)` as `x - b`, the action is
//! `φ(u, b, u', b') = ((u + u') + (b + b')) - (b + b')`.

use crate::action::Action;
use crate::classify::{equivalent_points, phi_of_point, quotient_points};
use crate::error::{Error, Result};
use crate::magma::{ElementMap, FiniteMagma};
use crate::point::RetractionPoint;
use crate::report::{ValidationReport, Violation};

/// Default cap on the number of choice functions tried.
pub const DEFAULT_CHOICE_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct MedialPoint {
    pub point: RetractionPoint,
    pub action: Action,
    /// `q` as a table over the carrier pairs.
    pub choice: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MedialReport {
    /// The carrier of `A` as pairs `(x, b)` of `B × B`, in lexicographic
    /// order; element `i` of every point's middle magma is `carrier[i]`.
    pub carrier: Vec<(usize, usize)>,
    pub choices_tried: usize,
    pub points: Vec<MedialPoint>,
    /// Number of equivalence classes among `points`.
    pub classes: usize,
    /// Formula and isomorphism checks over all points.
    pub report: ValidationReport,
}

/// Builds every point of the construction up to `cap` choice functions and
/// checks the subtraction formula for each.
pub fn medial_order_point(b: &FiniteMagma, cap: usize) -> Result<MedialReport> {
    if let Some(v) = b.verify().first() {
        return Err(Error::precondition(format!("B is not unitary: {v}")));
    }
    if !b.is_medial() {
        return Err(Error::precondition("B is not medial"));
    }
    let n = b.size();
    let e = b.unit();
    let carrier: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (0..n).map(move |c| (x, c)))
        .filter(|&(x, c)| b.elements().any(|u| b.op(u, c) == x))
        .collect();
    let index = |pair: (usize, usize)| carrier.binary_search(&pair).ok();
    let mut table = Vec::with_capacity(carrier.len() * carrier.len());
    for &(x, c) in &carrier {
        for &(x2, c2) in &carrier {
            let prod = (b.op(x, x2), b.op(c, c2));
            let i = index(prod).ok_or_else(|| {
                Error::Invariant(format!(
                    "order pairs not closed: ({x},{c}) + ({x2},{c2}) = {prod:?}"
                ))
            })?;
            table.push(i);
        }
    }
    let unit = index((e, e)).expect("(0, 0) is an order pair");
    let a = FiniteMagma::from_flat(carrier.len(), unit, table)?;
    let k = ElementMap::from_fn(n, a.size(), |x| index((x, e)).unwrap())?;
    let s = ElementMap::from_fn(n, a.size(), |c| index((c, c)).unwrap())?;
    let p = ElementMap::from_fn(a.size(), n, |i| carrier[i].1)?;

    let candidates: Vec<Vec<usize>> = carrier
        .iter()
        .map(|&(x, c)| {
            if c == x {
                vec![e]
            } else if c == e {
                vec![x]
            } else {
                b.elements().filter(|&u| b.op(u, c) == x).collect()
            }
        })
        .collect();
    let total = candidates
        .iter()
        .try_fold(1usize, |acc, c| acc.checked_mul(c.len()))
        .filter(|&t| t <= cap)
        .ok_or_else(|| Error::SearchTooLarge {
            estimate: candidates.iter().map(|c| c.len() as f64).product(),
            bound: cap as f64,
        })?;

    let mut points = Vec::new();
    let mut report = ValidationReport::new();
    for i in 0..total {
        let choice = decode(&candidates, i);
        let q = ElementMap::new(n, choice.clone())?;
        let pt = RetractionPoint::new(a.clone(), b.clone(), n, k.clone(), q, s.clone(), p.clone())?;
        if !pt.is_valid() {
            continue;
        }
        let action = phi_of_point(&pt)?;
        check_formula(b, &carrier, &choice, &action, i, &mut report);
        check_isomorphism(&pt, &action, &carrier, i, &mut report)?;
        points.push(MedialPoint {
            point: pt,
            action,
            choice,
        });
    }
    let just_points: Vec<RetractionPoint> = points.iter().map(|m| m.point.clone()).collect();
    let classes = quotient_points(&just_points)?.len();
    Ok(MedialReport {
        carrier,
        choices_tried: total,
        points,
        classes,
        report,
    })
}

fn decode(candidates: &[Vec<usize>], mut i: usize) -> Vec<usize> {
    let mut out = vec![0; candidates.len()];
    for slot in (0..candidates.len()).rev() {
        let c = &candidates[slot];
        out[slot] = c[i % c.len()];
        i /= c.len();
    }
    out
}

/// `φ(u,b,u',b') = q((u+u') + (b+b'), b+b')`, and where the difference is
/// unique it is the unique solution. Also `(u, b)` is admissible exactly when
/// `(u + b) - b = u`.
fn check_formula(
    b: &FiniteMagma,
    carrier: &[(usize, usize)],
    choice: &[usize],
    action: &Action,
    which: usize,
    report: &mut ValidationReport,
) {
    let minus = |x: usize, c: usize| choice[carrier.binary_search(&(x, c)).unwrap()];
    for u in b.elements() {
        for c in b.elements() {
            for u2 in b.elements() {
                for c2 in b.elements() {
                    let cc = b.op(c, c2);
                    let y = b.op(b.op(u, u2), cc);
                    let got = action.phi(u, c, u2, c2);
                    let chosen = minus(y, cc);
                    let unique = b.right_difference(y, cc);
                    if got != chosen || unique.is_some_and(|v| v != got) {
                        report.push(
                            Violation::new("medial-formula", [which, u, c, u2, c2]).with_detail(
                                format!(
                                "phi = {got}, chosen difference = {chosen}, unique = {unique:?}"
                            ),
                            ),
                        );
                    }
                }
            }
            let admissible = action.is_admissible(u, c);
            if admissible != (minus(b.op(u, c), c) == u) {
                report.push(Violation::new("medial-admissible", [which, u, c]));
            }
        }
    }
}

/// The comparison map to the canonical point is `g(x, b) = (x - b, b)`.
fn check_isomorphism(
    pt: &RetractionPoint,
    action: &Action,
    carrier: &[(usize, usize)],
    which: usize,
    report: &mut ValidationReport,
) -> Result<()> {
    let canon = crate::action::canonical_point(action)?;
    let Some(alpha) = equivalent_points(pt, &canon)? else {
        report.push(Violation::new("medial-iso", [which]));
        return Ok(());
    };
    let sdp = crate::action::semidirect_product(action)?;
    for (i, &(x, c)) in carrier.iter().enumerate() {
        let expected = sdp.index_of(pt.q().apply(i), c);
        if expected != Some(alpha.apply(i)) {
            report.push(Violation::new("medial-iso", [which, x, c]));
        }
    }
    Ok(())
}

/// Medial magmas of the given order (unit 0) that are not left loops, so
/// that some difference `x - b` has several solutions.
pub fn medial_non_loops(order: usize) -> Result<Vec<FiniteMagma>> {
    Ok(crate::magma::enumerate_magmas(order)?
        .filter(|m| m.is_medial() && !m.is_left_loop())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_case_is_unique() {
        let r = medial_order_point(&FiniteMagma::cyclic(2), DEFAULT_CHOICE_CAP).unwrap();
        assert_eq!(r.carrier.len(), 4);
        assert_eq!(r.points.len(), 1);
        assert!(r.report.is_valid(), "{}", r.report);
        let a = &r.points[0].action;
        for (u, c, u2, c2) in [(1, 0, 1, 1), (1, 1, 0, 1), (0, 1, 1, 0)] {
            assert_eq!(a.phi(u, c, u2, c2), (u + u2) % 2);
        }
    }

    #[test]
    fn trivial_case() {
        let r = medial_order_point(&FiniteMagma::trivial(), DEFAULT_CHOICE_CAP).unwrap();
        assert_eq!(r.points.len(), 1);
        assert_eq!(r.classes, 1);
    }

    #[test]
    fn non_loop_choices() {
        let monoids: Vec<_> = medial_non_loops(3)
            .unwrap()
            .into_iter()
            .filter(|m| m.is_associative() && m.is_commutative())
            .collect();
        assert!(!monoids.is_empty());
        let mut exercised = false;
        for m in &monoids {
            let r = medial_order_point(m, DEFAULT_CHOICE_CAP).unwrap();
            assert!(r.report.is_valid(), "{}", r.report);
            exercised |= r.choices_tried > 1;
        }
        assert!(exercised);
    }

    #[test]
    fn refuses_non_medial() {
        let l = crate::magma::find_nonassociative_loop(5).unwrap();
        if !l.is_medial() {
            assert!(matches!(
                medial_order_point(&l, DEFAULT_CHOICE_CAP),
                Err(Error::Precondition(_))
            ));
        }
    }
}
