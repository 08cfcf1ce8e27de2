//! The closed interval `[-1, 1]` as a unitary magma.
//!
//! Interior values add like rapidities, `b ⊕ b' = (b + b') / (bb' + 1)`. The
//! endpoints are poles: `-1 ⊕ -1 = -1`, `+1 ⊕ +1 = +1`, `-1 ⊕ +1 = 0`, and a
//! pole absorbs any interior value. Through `f(x) = (1+x)/(1-x)` this is the
//! multiplicative half-line `]0, ∞[` with `0` and `∞` adjoined.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::{ValidationReport, Violation};

/// A point of `[-1, 1]`. Exactly `±1` are the poles.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct IntervalElement {
    value: f64,
}

/// Largest double below 1; interior sums are clamped here so rounding never
/// turns an interior value into a pole.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

impl IntervalElement {
    pub const ZERO: Self = IntervalElement { value: 0.0 };
    pub const MINUS_ONE: Self = IntervalElement { value: -1.0 };
    pub const PLUS_ONE: Self = IntervalElement { value: 1.0 };

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value.abs() > 1.0 {
            return Err(Error::precondition(format!("{value} is not in [-1, 1]")));
        }
        // Normalise -0.0 so that equality with ZERO is bitwise.
        Ok(IntervalElement { value: value + 0.0 })
    }

    pub fn value(self) -> f64 {
        self.value
    }

    pub fn is_pole(self) -> bool {
        self.value.abs() == 1.0
    }

    pub fn is_interior(self) -> bool {
        !self.is_pole()
    }
}

pub fn interval_oplus(b: IntervalElement, b2: IntervalElement) -> IntervalElement {
    match (b.is_pole(), b2.is_pole()) {
        (false, false) => {
            let v = (b.value + b2.value) / (b.value * b2.value + 1.0);
            IntervalElement {
                value: v.clamp(-BELOW_ONE, BELOW_ONE) + 0.0,
            }
        }
        (true, false) => b,
        (false, true) => b2,
        (true, true) if b.value == b2.value => b,
        (true, true) => IntervalElement::ZERO,
    }
}

/// `(+1 ⊕ -1) ⊕ -1` and `+1 ⊕ (-1 ⊕ -1)`, which differ.
pub fn nonassociativity_witness() -> (IntervalElement, IntervalElement) {
    use IntervalElement as I;
    (
        interval_oplus(interval_oplus(I::PLUS_ONE, I::MINUS_ONE), I::MINUS_ONE),
        interval_oplus(I::PLUS_ONE, interval_oplus(I::MINUS_ONE, I::MINUS_ONE)),
    )
}

/// `f(x) = (1 + x) / (1 - x)`, from `]-1, 1[` onto `]0, ∞[`.
pub fn to_halfline(x: f64) -> f64 {
    (1.0 + x) / (1.0 - x)
}

/// `g(y) = (y - 1) / (y + 1)`, the inverse of [`to_halfline`].
pub fn from_halfline(y: f64) -> f64 {
    (y - 1.0) / (y + 1.0)
}

/// `[0, ∞]` as the positive reals with the two poles adjoined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HalfLineElement {
    Positive(f64),
    Zero,
    Infinity,
}

impl HalfLineElement {
    /// The pole-adjoined product: poles absorb positive values, each pole
    /// is idempotent, and `0 · ∞ = 1`.
    pub fn mul(self, other: Self) -> Self {
        use HalfLineElement::*;
        match (self, other) {
            (Positive(a), Positive(b)) => Positive(a * b),
            (Positive(_), pole) | (pole, Positive(_)) => pole,
            (Zero, Zero) => Zero,
            (Infinity, Infinity) => Infinity,
            _ => Positive(1.0),
        }
    }

    /// `-1 ↦ 0`, `+1 ↦ ∞`, interior `b ↦ f(b)`.
    pub fn of(b: IntervalElement) -> Self {
        if b == IntervalElement::MINUS_ONE {
            HalfLineElement::Zero
        } else if b == IntervalElement::PLUS_ONE {
            HalfLineElement::Infinity
        } else {
            HalfLineElement::Positive(to_halfline(b.value))
        }
    }
}

/// Compares `⊕` with the half-line product it is transported from.
///
/// Interior pairs are sampled uniformly and compared to `g(f(b)·f(b'))`
/// within `tol`; `g∘f` is checked within `tol` and `f∘g` within `tol`
/// relative to `y`. Every pair with a pole operand is compared exactly
/// against the half-line table under `-1 ↔ 0`, `+1 ↔ ∞`. Witnesses are
/// sample indices.
pub fn halfline_transport_check(samples: usize, tol: f64, seed: u64) -> Result<ValidationReport> {
    if samples == 0 {
        return Err(Error::precondition("need at least one sample"));
    }
    if !(tol > 0.0) {
        return Err(Error::precondition("tolerance must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ValidationReport::new();
    let mut interior = Vec::with_capacity(samples);
    for i in 0..samples {
        let b = IntervalElement::new(sample_interior(&mut rng))?;
        let b2 = IntervalElement::new(sample_interior(&mut rng))?;
        interior.push(b);
        let lhs = interval_oplus(b, b2).value;
        let rhs = from_halfline(to_halfline(b.value) * to_halfline(b2.value));
        if (lhs - rhs).abs() > tol {
            report.push(Violation::new("oplus=g(f*f)", [i]).with_detail(format!(
                "b = {}, b' = {}, oplus = {lhs}, transported = {rhs}",
                b.value, b2.value
            )));
        }
        let back = from_halfline(to_halfline(b.value));
        if (back - b.value).abs() > tol {
            report.push(
                Violation::new("g.f=1", [i])
                    .with_detail(format!("b = {}, g(f(b)) = {back}", b.value)),
            );
        }
        let y = to_halfline(b2.value);
        let there = to_halfline(from_halfline(y));
        if (there - y).abs() > tol * y.max(1.0) {
            report.push(
                Violation::new("f.g=1", [i]).with_detail(format!("y = {y}, f(g(y)) = {there}")),
            );
        }
    }
    let poles = [IntervalElement::MINUS_ONE, IntervalElement::PLUS_ONE];
    let mut operands = vec![IntervalElement::ZERO];
    operands.extend(poles);
    operands.extend(interior.iter().take(16));
    for (i, &b) in operands.iter().enumerate() {
        for (j, &b2) in operands.iter().enumerate() {
            if !(b.is_pole() || b2.is_pole()) {
                continue;
            }
            let lhs = HalfLineElement::of(interval_oplus(b, b2));
            let rhs = HalfLineElement::of(b).mul(HalfLineElement::of(b2));
            if lhs != rhs {
                report.push(Violation::new("pole-table", [i, j]).with_detail(format!(
                    "{} ⊕ {} maps to {lhs:?}, half-line product is {rhs:?}",
                    b.value, b2.value
                )));
            }
        }
    }
    Ok(report)
}

fn sample_interior(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let v: f64 = rng.gen_range(-1.0..1.0);
        if v > -1.0 {
            return v;
        }
    }
}

/// Samples interior triples and checks that `⊕` is associative and
/// commutative there within `tol`. Returns the number of failures.
pub fn interior_associativity_failures(samples: usize, tol: f64, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..samples {
        let [a, b, c] = [(); 3].map(|_| IntervalElement {
            value: sample_interior(&mut rng),
        });
        let l = interval_oplus(interval_oplus(a, b), c).value;
        let r = interval_oplus(a, interval_oplus(b, c)).value;
        let comm = interval_oplus(a, b).value - interval_oplus(b, a).value;
        if (l - r).abs() > tol || comm.abs() > tol {
            failures += 1;
        }
    }
    failures
}
