//! Worked examples: the closed interval and the sphere, the finite pole
//! construction, medial orders, and the particular-case ladder.

pub mod cases;
pub mod interval;
pub mod medial;
pub mod sphere;

use crate::action::{canonical_point, Action};
use crate::magma::{adjoin_poles, infinity_pole, zero_pole, ElementMap, FiniteMagma};
use crate::point::RetractionPoint;

/// Seed used by the sampled checks unless the caller picks another.
pub const DEFAULT_SEED: u64 = 0x5eed_0001;

/// `φ(x, b, x', b') = x + (-1)^b x'` on `Z_n`, acted on by `Z2`.
pub fn inversion_action(n: usize) -> Action {
    Action::from_fn(FiniteMagma::cyclic(2), n, 0, |x, b, x2, _| {
        let x2 = if b == 0 { x2 } else { (n - x2) % n };
        (x + x2) % n
    })
    .expect("entries are reduced mod n")
}

/// The canonical point of [`inversion_action`]`(3)`, a copy of `S3`.
pub fn s3_point() -> RetractionPoint {
    canonical_point(&inversion_action(3)).expect("inversion action is valid")
}

/// Finite stand-in for `C ∪ {∞} -> [0, ∞]`.
///
/// `A` is `X × H` with poles adjoined and `B` is `H` with poles adjoined.
/// `k(x) = (x, 1)`, `q(x, h) = x`, `s(h) = (1, h)`, `p(x, h) = h`; poles go to
/// poles under `p` and `s`, and to the unit of `X` under `q`.
pub fn adjoin_poles_point(x: &FiniteMagma, h: &FiniteMagma) -> RetractionPoint {
    let prod = crate::magma::direct_product(x, h);
    let a = adjoin_poles(&prod);
    let b = adjoin_poles(h);
    let nh = h.size();
    let inner = prod.size();
    let pole_of = |i: usize, to: &FiniteMagma| {
        if i == zero_pole(&prod) {
            zero_pole(to)
        } else {
            infinity_pole(to)
        }
    };
    let k = ElementMap::from_fn(x.size(), a.size(), |i| i * nh + h.unit()).unwrap();
    let q = ElementMap::from_fn(a.size(), x.size(), |i| {
        if i < inner {
            i / nh
        } else {
            x.unit()
        }
    })
    .unwrap();
    let s = ElementMap::from_fn(b.size(), a.size(), |j| {
        if j < nh {
            x.unit() * nh + j
        } else if j == zero_pole(h) {
            zero_pole(&prod)
        } else {
            infinity_pole(&prod)
        }
    })
    .unwrap();
    let p = ElementMap::from_fn(a.size(), b.size(), |i| {
        if i < inner {
            i % nh
        } else {
            pole_of(i, h)
        }
    })
    .unwrap();
    RetractionPoint::new(a, b, x.size(), k, q, s, p).expect("shapes agree")
}

/// A point whose middle magma is a nonassociative left loop: the smallest
/// nonassociative loop `L` times `b`, as the product point from `L` to `b`.
pub fn left_loop_point(b: &FiniteMagma) -> RetractionPoint {
    let l = crate::magma::find_nonassociative_loop(5).expect("order 5 has one");
    RetractionPoint::direct_product(&l, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::phi_of_point;
    use crate::magma::find_isomorphism;
    use crate::point::induced_x_magma;

    #[test]
    fn s3_from_the_inversion_action() {
        let pt = s3_point();
        assert_eq!(pt.a().size(), 6);
        assert!(pt.a().is_associative());
        assert!(find_isomorphism(pt.a(), &FiniteMagma::symmetric_group(3)).is_some());
    }

    #[test]
    fn pole_point_is_a_point() {
        let pt = adjoin_poles_point(&FiniteMagma::cyclic(2), &FiniteMagma::cyclic(2));
        assert!(pt.is_valid(), "{}", pt.verify());
        assert!(!pt.a().is_associative());
        assert_eq!(induced_x_magma(&pt).unwrap(), FiniteMagma::cyclic(2));
        let trivial = adjoin_poles_point(&FiniteMagma::trivial(), &FiniteMagma::trivial());
        assert!(trivial.is_valid());
        assert!(phi_of_point(&trivial).is_ok());
    }

    #[test]
    fn left_loop_points() {
        for b in [FiniteMagma::trivial(), FiniteMagma::cyclic(2)] {
            let pt = left_loop_point(&b);
            assert!(pt.is_valid());
            assert!(pt.a().is_left_loop() && !pt.a().is_associative());
        }
    }
}
