//! Traces of associativity in a point and the simplified action formulas
//! they buy.
//!
//! Each flag is one bracketing identity between `k`, `s` and the identity of
//! `A`; for instance `kss` is `k(x) + (s(b) + s(b')) = (k(x) + s(b)) + s(b')`.
//! With `φ` the classifying action, the derived maps are
//!
//! ```text
//! x +_b' x'     = φ(x,0,x',b')      x + x'  = φ(x,0,x',0)
//! ξ^x(b,x')     = φ(x,b,x',0)       ξ(b,x') = φ(0,b,x',0)
//! ξ_b'(b,x')    = φ(0,b,x',b')      ρ_b'(x) = φ(x,0,0,b')
//! ρ^b_b'(x)     = φ(x,b,0,b')
//! ```

use serde::Serialize;

use crate::action::{Action, Condition};
use crate::classify::phi_of_point;
use crate::error::Result;
use crate::point::{composability_sufficient_witness, induced_x_magma, RetractionPoint};
use crate::report::{ValidationReport, Violation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceFlags {
    /// `k + (k + s) = (k + k) + s`
    pub kks: Condition,
    /// `s + (k + s) = (s + k) + s`
    pub sks: Condition,
    /// `1 + (k + s) = (1 + k) + s`
    pub oneks: Condition,
    /// `k + (s + s) = (k + s) + s`
    pub kss: Condition,
    /// `k + (s + k) = (k + s) + k`
    pub ksk: Condition,
    /// `k + (s + 1) = (k + s) + 1`
    pub kso: Condition,
}

impl TraceFlags {
    pub fn all_hold(&self) -> bool {
        [
            &self.kks,
            &self.sks,
            &self.oneks,
            &self.kss,
            &self.ksk,
            &self.kso,
        ]
        .iter()
        .all(|c| c.holds)
    }
}

/// Which of the three slots of a bracketing identity range over `k(X)`,
/// `s(B)` or all of `A`.
#[derive(Clone, Copy)]
enum Slot {
    K,
    S,
    A,
}

fn slot_values(pt: &RetractionPoint, slot: Slot) -> Vec<usize> {
    match slot {
        Slot::K => (0..pt.x_size()).map(|x| pt.k().apply(x)).collect(),
        Slot::S => pt.b().elements().map(|b| pt.s().apply(b)).collect(),
        Slot::A => pt.a().elements().collect(),
    }
}

/// First `(i, j, l)` (indices into `X`, `B` or `A` per slot) where
/// `u + (v + w) != (u + v) + w`.
fn bracketing(pt: &RetractionPoint, name: &str, slots: [Slot; 3]) -> Condition {
    let [us, vs, ws] = slots.map(|s| slot_values(pt, s));
    let a = pt.a();
    for (i, &u) in us.iter().enumerate() {
        for (j, &v) in vs.iter().enumerate() {
            for (l, &w) in ws.iter().enumerate() {
                if a.op(u, a.op(v, w)) != a.op(a.op(u, v), w) {
                    return Condition::fails(Violation::new(name, [i, j, l]));
                }
            }
        }
    }
    Condition::ok()
}

pub fn trace_flags(pt: &RetractionPoint) -> TraceFlags {
    use Slot::*;
    TraceFlags {
        kks: bracketing(pt, "kks", [K, K, S]),
        sks: bracketing(pt, "sks", [S, K, S]),
        oneks: bracketing(pt, "1ks", [A, K, S]),
        kss: bracketing(pt, "kss", [K, S, S]),
        ksk: bracketing(pt, "ksk", [K, S, K]),
        kso: bracketing(pt, "ks1", [K, S, A]),
    }
}

/// One rung of the ladder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseItem {
    pub item: usize,
    pub hypotheses: &'static str,
    pub hypothesis_met: bool,
    /// Whether the conclusion holds, checked whether or not the hypotheses do.
    pub conclusion_verified: bool,
    pub witness: Option<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseLadder {
    pub flags: TraceFlags,
    pub items: Vec<CaseItem>,
}

impl CaseLadder {
    /// Items whose hypotheses hold but whose conclusion fails.
    pub fn report(&self) -> ValidationReport {
        let mut r = ValidationReport::new();
        for it in self
            .items
            .iter()
            .filter(|i| i.hypothesis_met && !i.conclusion_verified)
        {
            r.push(it.witness.clone().expect("failed items carry a witness"));
        }
        r
    }
}

struct Derived<'a> {
    a: &'a Action,
    z: usize,
    e: usize,
}

impl Derived<'_> {
    fn phi(&self, x: usize, b: usize, x2: usize, b2: usize) -> usize {
        self.a.phi(x, b, x2, b2)
    }
    fn plus(&self, x: usize, x2: usize) -> usize {
        self.phi(x, self.e, x2, self.e)
    }
    fn xi(&self, b: usize, x2: usize) -> usize {
        self.phi(self.z, b, x2, self.e)
    }
    fn rho(&self, c: usize, x: usize) -> usize {
        self.phi(x, self.e, self.z, c)
    }
    fn bop(&self, b: usize, b2: usize) -> usize {
        self.a.b().op(b, b2)
    }
}

/// First `(x, b, x', b')` where `lhs != rhs`.
fn identity(
    d: &Derived,
    item: usize,
    f: impl Fn(usize, usize, usize, usize) -> (usize, usize),
) -> Option<Violation> {
    let nx = d.a.x_size();
    let nb = d.a.b().size();
    for x in 0..nx {
        for b in 0..nb {
            for x2 in 0..nx {
                for b2 in 0..nb {
                    let (l, r) = f(x, b, x2, b2);
                    if l != r {
                        return Some(
                            Violation::new(format!("item-{item}"), [x, b, x2, b2])
                                .with_detail(format!("{l} != {r}")),
                        );
                    }
                }
            }
        }
    }
    None
}

/// Evaluates all ten items exhaustively.
pub fn particular_case_check(pt: &RetractionPoint) -> Result<CaseLadder> {
    let action = phi_of_point(pt)?;
    let flags = trace_flags(pt);
    let d = Derived {
        a: &action,
        z: action.zero(),
        e: action.b().unit(),
    };
    let (z, e) = (d.z, d.e);
    let f = &flags;
    type Check<'c> = Box<dyn Fn(usize, usize, usize, usize) -> (usize, usize) + 'c>;
    let rungs: Vec<(&'static str, bool, Check)> = vec![
        (
            "kks",
            f.kks.holds,
            Box::new(|x, _, x2, b2| (d.phi(x, e, x2, b2), d.rho(b2, d.plus(x, x2)))),
        ),
        (
            "sks",
            f.sks.holds,
            Box::new(|_, b, x2, b2| (d.phi(z, b, x2, b2), d.phi(d.xi(b, x2), b, z, b2))),
        ),
        (
            "1ks",
            f.oneks.holds,
            Box::new(|x, b, x2, b2| (d.phi(x, b, x2, b2), d.phi(d.phi(x, b, x2, e), b, z, b2))),
        ),
        (
            "kss",
            f.kss.holds,
            Box::new(|x, b, _, b2| (d.phi(x, b, z, b2), d.rho(d.bop(b, b2), x))),
        ),
        (
            "ksk",
            f.ksk.holds,
            Box::new(|x, b, x2, _| (d.phi(x, b, x2, e), d.phi(x, e, d.xi(b, x2), b))),
        ),
        (
            "ks1",
            f.kso.holds,
            Box::new(|x, b, x2, b2| {
                (
                    d.phi(x, b, x2, b2),
                    d.phi(x, e, d.phi(z, b, x2, b2), d.bop(b, b2)),
                )
            }),
        ),
        (
            "kks,ksk",
            f.kks.holds && f.ksk.holds,
            Box::new(|x, b, x2, _| (d.phi(x, b, x2, e), d.rho(b, d.plus(x, d.xi(b, x2))))),
        ),
        (
            "sks,kss",
            f.sks.holds && f.kss.holds,
            Box::new(|_, b, x2, b2| (d.phi(z, b, x2, b2), d.rho(d.bop(b, b2), d.xi(b, x2)))),
        ),
        (
            "1ks,kss,ksk",
            f.oneks.holds && f.kss.holds && f.ksk.holds,
            Box::new(|x, b, x2, b2| {
                (
                    d.phi(x, b, x2, b2),
                    d.rho(d.bop(b, b2), d.plus(x, d.xi(b, x2))),
                )
            }),
        ),
        (
            "ks1,kks,sks",
            f.kso.holds && f.kks.holds && f.sks.holds,
            Box::new(|x, b, x2, b2| {
                (
                    d.phi(x, b, x2, b2),
                    d.rho(d.bop(b, b2), d.plus(x, d.xi(b, x2))),
                )
            }),
        ),
    ];
    let items = rungs
        .into_iter()
        .enumerate()
        .map(|(i, (hyp, met, check))| {
            let witness = identity(&d, i + 1, check);
            CaseItem {
                item: i + 1,
                hypotheses: hyp,
                hypothesis_met: met,
                conclusion_verified: witness.is_none(),
                witness,
            }
        })
        .collect();
    Ok(CaseLadder { flags, items })
}

/// A branch that only applies to some middle magmas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Branch {
    NotApplicable,
    Checked(ValidationReport),
}

impl Branch {
    pub fn passed(&self) -> bool {
        matches!(self, Branch::Checked(r) if r.is_valid())
    }

    pub fn failed(&self) -> bool {
        matches!(self, Branch::Checked(r) if !r.is_valid())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialStructure {
    pub monoid: Branch,
    pub left_loop: Branch,
}

/// The monoid and left-loop consequences, each checked only when `A` has
/// the structure.
pub fn special_structure_check(pt: &RetractionPoint) -> Result<SpecialStructure> {
    let action = phi_of_point(pt)?;
    let monoid = if pt.a().is_associative() {
        Branch::Checked(monoid_branch(pt, &action)?)
    } else {
        Branch::NotApplicable
    };
    let left_loop = if pt.a().is_left_loop() {
        Branch::Checked(left_loop_branch(pt, &action))
    } else {
        Branch::NotApplicable
    };
    Ok(SpecialStructure { monoid, left_loop })
}

fn monoid_branch(pt: &RetractionPoint, action: &Action) -> Result<ValidationReport> {
    let mut r = ValidationReport::new();
    let (b, e) = (pt.b(), pt.b().unit());
    if let Some(w) = induced_x_magma(pt)?.associativity_witness() {
        r.push(Violation::new("X-monoid", w));
    }
    if let Some(w) = b.associativity_witness() {
        r.push(Violation::new("B-monoid", w));
    }
    let fixed = |x: usize, c: usize| action.phi(x, e, action.zero(), c) == x;
    for a in pt.a().elements() {
        let (x, c) = (pt.q().apply(a), pt.p().apply(a));
        if !fixed(x, c) {
            r.push(Violation::new("pair-map-image", [a]));
        }
        if pt.ks(x, c) != a {
            r.push(Violation::new("pair-map-inverse", [a]));
        }
    }
    for x in 0..pt.x_size() {
        for c in b.elements() {
            if fixed(x, c) {
                let a = pt.ks(x, c);
                if (pt.q().apply(a), pt.p().apply(a)) != (x, c) {
                    r.push(Violation::new("pair-map-onto", [x, c]));
                }
            }
        }
    }
    let d = Derived {
        a: action,
        z: action.zero(),
        e,
    };
    if let Some(v) = identity(&d, 0, |x, c, x2, c2| {
        (
            d.phi(x, c, x2, c2),
            d.rho(d.bop(c, c2), d.plus(x, d.xi(c, x2))),
        )
    }) {
        r.push(Violation::new("monoid-formula", v.witness));
    }
    if let Some(w) = composability_sufficient_witness(pt) {
        r.push(Violation::new("composable", w));
    }
    Ok(r)
}

fn left_loop_branch(pt: &RetractionPoint, action: &Action) -> ValidationReport {
    let mut r = ValidationReport::new();
    let (a, b, e, z) = (pt.a(), pt.b(), pt.b().unit(), action.zero());
    let minus = |x: usize, y: usize| a.right_difference(x, y).expect("A is a left loop");
    let k = |x: usize| pt.k().apply(x);
    let s = |c: usize| pt.s().apply(c);
    for el in a.elements() {
        if k(pt.q().apply(el)) != minus(el, s(pt.p().apply(el))) {
            r.push(Violation::new("kq=1-sp", [el]));
        }
    }
    let nx = pt.x_size();
    for x in 0..nx {
        for c in b.elements() {
            if action.phi(x, e, z, c) != x {
                r.push(Violation::new("rho=1", [x, c]));
            }
            if k(action.phi(z, c, x, e)) != minus(a.op(s(c), k(x)), s(c)) {
                r.push(Violation::new("k.xi", [c, x]));
            }
            let el = pt.ks(x, c);
            if (pt.q().apply(el), pt.p().apply(el)) != (x, c) {
                r.push(Violation::new("pair-map-bijective", [x, c]));
            }
            for x2 in 0..nx {
                for c2 in b.elements() {
                    let lhs = k(action.phi(x, c, x2, c2));
                    let rhs = minus(a.op(pt.ks(x, c), pt.ks(x2, c2)), s(b.op(c, c2)));
                    if lhs != rhs {
                        r.push(Violation::new("k.phi", [x, c, x2, c2]));
                    }
                }
            }
        }
    }
    if a.size() != nx * b.size() {
        r.push(Violation::new(
            "pair-map-bijective",
            [a.size(), nx * b.size()],
        ));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{adjoin_poles_point, left_loop_point, s3_point};
    use crate::magma::FiniteMagma;

    #[test]
    fn associative_points_have_every_flag() {
        let pt = s3_point();
        assert!(trace_flags(&pt).all_hold());
        let ladder = particular_case_check(&pt).unwrap();
        assert!(ladder
            .items
            .iter()
            .all(|i| i.hypothesis_met && i.conclusion_verified));
        let p = RetractionPoint::direct_product(&FiniteMagma::cyclic(3), &FiniteMagma::cyclic(2));
        assert!(trace_flags(&p).all_hold());
    }

    #[test]
    fn pole_point_loses_a_flag() {
        let pt = adjoin_poles_point(&FiniteMagma::cyclic(2), &FiniteMagma::cyclic(2));
        let flags = trace_flags(&pt);
        assert!(!flags.all_hold());
        let ladder = particular_case_check(&pt).unwrap();
        assert!(ladder.report().is_valid(), "{}", ladder.report());
    }

    #[test]
    fn special_structure_branches() {
        let s3 = special_structure_check(&s3_point()).unwrap();
        assert!(s3.monoid.passed());
        assert!(s3.left_loop.passed());
        let lp = special_structure_check(&left_loop_point(&FiniteMagma::cyclic(2))).unwrap();
        assert_eq!(lp.monoid, Branch::NotApplicable);
        assert!(lp.left_loop.passed(), "{:?}", lp.left_loop);
        let pole = adjoin_poles_point(&FiniteMagma::trivial(), &FiniteMagma::trivial());
        let ps = special_structure_check(&pole).unwrap();
        assert_eq!(ps.monoid, Branch::NotApplicable);
        assert_eq!(ps.left_loop, Branch::NotApplicable);
    }
}
