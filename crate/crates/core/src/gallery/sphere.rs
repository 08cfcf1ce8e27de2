//! The unit sphere as a semidirect product of the circle and the interval.
//!
//! `X` is the circle, stored as an angle in `(-π, π]`, and `B` is the interval
//! magma. The action adds angles when both heights are interior and returns
//! angle 0 when either height is a pole, so the admissible pairs are all
//! `(t, b)` with `b` interior plus the two poles `(0, ±1)`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::interval::{interval_oplus, IntervalElement};
use crate::error::{Error, Result};
use crate::report::{ValidationReport, Violation};

/// A pair `(t, b)`, a candidate point of `X ⋊ B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereElement {
    pub angle: f64,
    pub height: IntervalElement,
}

impl SphereElement {
    /// Interior height, or a pole with angle exactly 0.
    pub fn is_admissible(&self) -> bool {
        self.height.is_interior() || self.angle == 0.0
    }

    /// `(√(1-b²) cos t, √(1-b²) sin t, b)`.
    pub fn to_cartesian(&self) -> [f64; 3] {
        let b = self.height.value();
        let r = (1.0 - b * b).max(0.0).sqrt();
        [r * self.angle.cos(), r * self.angle.sin(), b]
    }
}

/// Representative of `t` in `(-π, π]`.
pub fn normalize_angle(t: f64) -> f64 {
    let r = t.rem_euclid(2.0 * PI);
    let r = if r > PI { r - 2.0 * PI } else { r };
    // rem_euclid can land on exactly -π after the shift.
    if r <= -PI {
        r + 2.0 * PI
    } else {
        r + 0.0
    }
}

/// Distance between two angles on the circle.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    normalize_angle(a - b).abs()
}

pub fn sphere_phi(t: f64, b: IntervalElement, t2: f64, b2: IntervalElement) -> f64 {
    if b.is_pole() || b2.is_pole() {
        0.0
    } else {
        normalize_angle(t + t2)
    }
}

type Phi = fn(f64, IntervalElement, f64, IntervalElement) -> f64;

/// `p(x, y, z) = z`.
pub fn sphere_p(v: [f64; 3]) -> IntervalElement {
    IntervalElement::new(v[2].clamp(-1.0, 1.0)).expect("clamped")
}

/// The angle of `(x, y)`, or 0 at the poles.
pub fn sphere_q(v: [f64; 3]) -> f64 {
    if v[2].abs() == 1.0 {
        0.0
    } else {
        normalize_angle(v[1].atan2(v[0]))
    }
}

/// `s(z) = (√(1-z²), 0, z)`.
pub fn sphere_s(z: IntervalElement) -> [f64; 3] {
    let b = z.value();
    [(1.0 - b * b).max(0.0).sqrt(), 0.0, b]
}

/// `k(t) = (cos t, sin t, 0)`.
pub fn sphere_k(t: f64) -> [f64; 3] {
    [t.cos(), t.sin(), 0.0]
}

fn angles_match(a: f64, b: f64, tol: f64) -> bool {
    angle_distance(a, b) <= tol
}

/// Checks the action axioms and the point maps.
///
/// Every pair of heights with at least one pole (8 pairs over interior, -1
/// and +1) is checked against a fixed angle grid, and must agree exactly.
/// Interior instances are sampled and compared within `tol`. The point maps
/// are checked on sampled unit vectors and on the poles, and the admissible
/// pairs over the grid must be exactly the two poles `(0, ±1)` plus every
/// interior height.
pub fn sphere_verify(samples: usize, tol: f64, seed: u64) -> Result<ValidationReport> {
    if samples == 0 {
        return Err(Error::precondition("need at least one sample"));
    }
    if !(tol > 0.0) {
        return Err(Error::precondition("tolerance must be positive"));
    }
    let mut report = ValidationReport::new();
    check_pole_cases(sphere_phi, &mut report);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..samples {
        let t = sample_angle(&mut rng);
        let t2 = sample_angle(&mut rng);
        let b = sample_height(&mut rng);
        let b2 = sample_height(&mut rng);
        check_instance(sphere_phi, &mut report, i, t, b, t2, b2, Some(tol));
        check_point_maps(&mut report, i, t, b, tol);
    }
    check_census(sphere_phi, &mut report);
    Ok(report)
}

fn sample_angle(rng: &mut ChaCha8Rng) -> f64 {
    normalize_angle(rng.gen_range(-PI..PI))
}

fn sample_height(rng: &mut ChaCha8Rng) -> IntervalElement {
    loop {
        let v: f64 = rng.gen_range(-1.0..1.0);
        if v > -1.0 {
            return IntervalElement::new(v).expect("in range");
        }
    }
}

const GRID: [f64; 7] = [0.0, PI / 3.0, PI / 2.0, PI, -PI / 2.0, -2.0, 2.5];

fn grid_heights() -> [IntervalElement; 3] {
    [
        IntervalElement::new(0.375).unwrap(),
        IntervalElement::MINUS_ONE,
        IntervalElement::PLUS_ONE,
    ]
}

fn check_pole_cases(phi: Phi, report: &mut ValidationReport) {
    let heights = grid_heights();
    let mut case = 0;
    for &b in &heights {
        for &b2 in &heights {
            if b.is_interior() && b2.is_interior() {
                continue;
            }
            for &t in &GRID {
                for &t2 in &GRID {
                    check_instance(phi, report, case, t, b, t2, b2, None);
                }
            }
            case += 1;
        }
    }
    debug_assert_eq!(case, 8);
}

/// act1..act4 at one argument tuple; `tol = None` demands exact equality.
fn check_instance(
    phi: Phi,
    report: &mut ValidationReport,
    index: usize,
    t: f64,
    b: IntervalElement,
    t2: f64,
    b2: IntervalElement,
    tol: Option<f64>,
) {
    let zero = IntervalElement::ZERO;
    let phi0 = |t: f64, b: IntervalElement| phi(t, zero, 0.0, b);
    let same = |a: f64, c: f64| match tol {
        None => a == c,
        Some(tol) => angles_match(a, c, tol),
    };
    let tag = if tol.is_some() { "sampled" } else { "pole" };
    let mut fail = |axiom: &str, detail: String| {
        report.push(Violation::new(format!("{tag}:{axiom}"), [index]).with_detail(detail));
    };
    for x in [t, t2] {
        let (l, r) = (phi(x, zero, 0.0, zero), phi(0.0, zero, x, zero));
        if !same(l, x) || !same(r, x) {
            fail("act1", format!("t = {x}: {l}, {r}"));
        }
    }
    for (x, c) in [(t, b), (t2, b2), (t, b2)] {
        let v1 = phi(x, c, 0.0, zero);
        let v2 = phi(x, zero, 0.0, c);
        let v3 = phi(0.0, zero, x, c);
        if !same(v1, v2) || !same(v2, v3) {
            fail(
                "act2",
                format!("t = {x}, b = {}: {v1}, {v2}, {v3}", c.value()),
            );
        }
    }
    let v = phi(0.0, b, 0.0, b2);
    if v != 0.0 {
        fail("act3", format!("phi(0,b,0,b') = {v}"));
    }
    let lhs = phi(t, b, t2, b2);
    let inner = phi(phi0(t, b), b, phi0(t2, b2), b2);
    let rhs = phi0(inner, interval_oplus(b, b2));
    if !same(lhs, rhs) {
        fail(
            "act4",
            format!(
                "t = {t}, b = {}, t' = {t2}, b' = {}: {lhs} vs {rhs}",
                b.value(),
                b2.value()
            ),
        );
    }
}

fn check_point_maps(
    report: &mut ValidationReport,
    index: usize,
    t: f64,
    b: IntervalElement,
    tol: f64,
) {
    let mut fail = |axiom: &str, detail: String| {
        report.push(Violation::new(axiom.to_string(), [index]).with_detail(detail));
    };
    let v = SphereElement {
        angle: t,
        height: b,
    }
    .to_cartesian();
    let norm = v.iter().map(|c| c * c).sum::<f64>();
    if (norm - 1.0).abs() > tol {
        fail("on-sphere", format!("|v|² = {norm}"));
    }
    if sphere_p(v) != b || !angles_match(sphere_q(v), t, tol) {
        fail(
            "pair-map",
            format!(
                "(t, b) = ({t}, {}) came back as ({}, {})",
                b.value(),
                sphere_q(v),
                sphere_p(v).value()
            ),
        );
    }
    if sphere_p(sphere_s(b)) != b {
        fail("ps=1", format!("b = {}", b.value()));
    }
    if sphere_q(sphere_s(b)) != 0.0 {
        fail("qs=q0", format!("b = {}", b.value()));
    }
    let k = sphere_k(t);
    if !angles_match(sphere_q(k), t, tol) {
        fail("qk=1", format!("t = {t}, qk(t) = {}", sphere_q(k)));
    }
    if sphere_p(k) != IntervalElement::ZERO {
        fail("pk=0", format!("t = {t}"));
    }
    for pole in [IntervalElement::MINUS_ONE, IntervalElement::PLUS_ONE] {
        let s = sphere_s(pole);
        if s != [0.0, 0.0, pole.value()] || sphere_q(s) != 0.0 || sphere_p(s) != pole {
            fail("pole-maps", format!("b = {}", pole.value()));
        }
    }
}

fn check_census(phi: Phi, report: &mut ValidationReport) {
    let mut poles_admitted = Vec::new();
    for (i, &t) in GRID.iter().enumerate() {
        for (j, b) in grid_heights().into_iter().enumerate() {
            let e = SphereElement {
                angle: t,
                height: b,
            };
            let by_phi = phi(t, IntervalElement::ZERO, 0.0, b) == t;
            if by_phi != e.is_admissible() {
                report.push(Violation::new("admissibility", [i, j]));
            }
            if b.is_interior() && !by_phi {
                report.push(Violation::new("interior-admissible", [i, j]));
            }
            if b.is_pole() && by_phi {
                poles_admitted.push((t, b.value()));
            }
        }
    }
    if poles_admitted != [(0.0, -1.0), (0.0, 1.0)] {
        report.push(
            Violation::new("two-poles", [poles_admitted.len()])
                .with_detail(format!("admitted pole pairs: {poles_admitted:?}")),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: f64) -> IntervalElement {
        IntervalElement::new(v).unwrap()
    }

    #[test]
    fn angles_wrap_into_half_open_range() {
        assert_eq!(normalize_angle(PI), PI);
        assert_eq!(normalize_angle(-PI), PI);
        assert!((normalize_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(normalize_angle(0.0), 0.0);
    }

    #[test]
    fn phi_values() {
        assert!((sphere_phi(PI / 2.0, e(0.2), PI / 2.0, e(-0.4)) - PI).abs() < 1e-12);
        assert_eq!(sphere_phi(1.0, e(0.2), 2.0, IntervalElement::PLUS_ONE), 0.0);
        assert_eq!(
            sphere_phi(0.7, IntervalElement::ZERO, 0.0, IntervalElement::ZERO),
            0.7
        );
    }

    #[test]
    fn equator_point() {
        assert_eq!(sphere_s(IntervalElement::ZERO), [1.0, 0.0, 0.0]);
        assert_eq!(sphere_q(sphere_s(IntervalElement::ZERO)), 0.0);
    }

    #[test]
    fn verifies() {
        let r = sphere_verify(500, 1e-9, 3).unwrap();
        assert!(r.is_valid(), "{r}");
    }

    #[test]
    fn keeping_the_sum_at_one_pole_admits_every_pole_pair() {
        // Also an action, but its product is not the sphere.
        fn keep(t: f64, b: IntervalElement, t2: f64, b2: IntervalElement) -> f64 {
            if b.is_pole() && b2.is_pole() {
                0.0
            } else {
                normalize_angle(t + t2)
            }
        }
        let mut axioms = ValidationReport::new();
        check_pole_cases(keep, &mut axioms);
        assert!(axioms.is_valid(), "{axioms}");
        let mut census = ValidationReport::new();
        check_census(keep, &mut census);
        assert!(census.of("two-poles").next().is_some());
    }
}
