//! Actions of a unitary magma `B` on a pointed set `X`, and the semidirect
//! products they build.
//!
//! An action is a four-argument map `φ : X×B×X×B -> X`. Writing
//! `φ00(x, b) = φ(x, 0, 0, b)`, the axioms are
//!
//! ```text
//! act1  φ(x,0,0,0) = x = φ(0,0,x,0)
//! act2  φ(x,b,0,0) = φ(x,0,0,b) = φ(0,0,x,b)
//! act3  φ(0,b,0,b') = 0
//! act4  φ(x,b,x',b') = φ00(φ(φ00(x,b), b, φ00(x',b'), b'), b+b')
//! ```
//!
//! The semidirect product keeps the pairs with `φ00(x, b) = x` and multiplies
//! them by `(x,b) + (x',b') = (φ(x,b,x',b'), b+b')`.

use crate::error::{Error, Result};
use crate::magma::{check_morphism, is_morphism, ElementMap, FiniteMagma};
use crate::point::{all_maps, RetractionPoint};
use crate::report::{Checker, Outcome, ValidationReport, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action {
    b: FiniteMagma,
    x_size: usize,
    zero: usize,
    phi: Vec<usize>,
}

impl Action {
    /// `phi` is row-major over `(x, b, x', b')`.
    pub fn new(b: FiniteMagma, x_size: usize, zero: usize, phi: Vec<usize>) -> Result<Self> {
        if x_size == 0 {
            return Err(Error::structural("X must be nonempty"));
        }
        if zero >= x_size {
            return Err(Error::structural(format!(
                "zero {zero} out of range for |X| = {x_size}"
            )));
        }
        let expected = x_size * x_size * b.size() * b.size();
        if phi.len() != expected {
            return Err(Error::structural(format!(
                "phi has {} entries, expected {expected}",
                phi.len()
            )));
        }
        if let Some(pos) = phi.iter().position(|&v| v >= x_size) {
            return Err(Error::structural(format!(
                "phi entry {pos} = {} out of range",
                phi[pos]
            )));
        }
        Ok(Action {
            b,
            x_size,
            zero,
            phi,
        })
    }

    pub fn from_fn(
        b: FiniteMagma,
        x_size: usize,
        zero: usize,
        f: impl Fn(usize, usize, usize, usize) -> usize,
    ) -> Result<Self> {
        let nb = b.size();
        let mut phi = Vec::with_capacity(x_size * x_size * nb * nb);
        for x in 0..x_size {
            for bb in 0..nb {
                for x2 in 0..x_size {
                    for b2 in 0..nb {
                        phi.push(f(x, bb, x2, b2));
                    }
                }
            }
        }
        Self::new(b, x_size, zero, phi)
    }

    /// The only action on a one-point set.
    pub fn trivial(b: FiniteMagma) -> Self {
        Self::from_fn(b, 1, 0, |_, _, _, _| 0).unwrap()
    }

    /// `φ(x, b, x', b') = x + x'`, whose semidirect product is `X×B`.
    pub fn product(x: &FiniteMagma, b: FiniteMagma) -> Self {
        Self::from_fn(b, x.size(), x.unit(), |x1, _, x2, _| x.op(x1, x2)).unwrap()
    }

    pub fn b(&self) -> &FiniteMagma {
        &self.b
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    /// Row-major over `(x, b, x', b')`.
    pub fn table(&self) -> &[usize] {
        &self.phi
    }

    #[inline]
    pub fn phi(&self, x: usize, b: usize, x2: usize, b2: usize) -> usize {
        let nb = self.b.size();
        self.phi[((x * nb + b) * self.x_size + x2) * nb + b2]
    }

    #[inline]
    pub fn phi00(&self, x: usize, b: usize) -> usize {
        self.phi(x, self.b.unit(), self.zero, b)
    }

    pub fn is_admissible(&self, x: usize, b: usize) -> bool {
        self.phi00(x, b) == x
    }

    /// Replaces `φ` by a table of the same shape whose entries lie in `X`.
    pub(crate) fn overwrite_table(&mut self, t: &[usize]) {
        self.phi.copy_from_slice(t);
    }

    /// `X` with `x + x' = φ(x, 0, x', 0)` and unit the zero.
    pub fn x_magma(&self) -> FiniteMagma {
        let e = self.b.unit();
        FiniteMagma::from_fn(self.x_size, self.zero, |x, y| self.phi(x, e, y, e)).unwrap()
    }

    pub fn verify(&self) -> ValidationReport {
        let mut c = Checker::all();
        self.scan(&mut c);
        c.finish()
    }

    pub fn is_valid(&self) -> bool {
        let mut c = Checker::first_only();
        self.scan(&mut c);
        c.finish().is_valid()
    }

    fn scan(&self, c: &mut Checker) {
        self.b.check_unit_laws(c, "B:");
        if c.done() {
            return;
        }
        let (z, e) = (self.zero, self.b.unit());
        let xs = 0..self.x_size;
        for x in xs.clone() {
            let (l, r) = (self.phi(x, e, z, e), self.phi(z, e, x, e));
            if (l != x || r != x)
                && c.fail(
                    Violation::new("act1", [x])
                        .with_detail(format!("phi(x,0,0,0) = {l}, phi(0,0,x,0) = {r}")),
                )
            {
                return;
            }
        }
        for x in xs.clone() {
            for b in self.b.elements() {
                let (v1, v2, v3) = (
                    self.phi(x, b, z, e),
                    self.phi(x, e, z, b),
                    self.phi(z, e, x, b),
                );
                if (v1 != v2 || v2 != v3)
                    && c.fail(Violation::new("act2", [x, b]).with_detail(format!(
                        "phi(x,b,0,0) = {v1}, phi(x,0,0,b) = {v2}, phi(0,0,x,b) = {v3}"
                    )))
                {
                    return;
                }
            }
        }
        for b in self.b.elements() {
            for b2 in self.b.elements() {
                let v = self.phi(z, b, z, b2);
                if v != z
                    && c.fail(
                        Violation::new("act3", [b, b2]).with_detail(format!("phi(0,b,0,b') = {v}")),
                    )
                {
                    return;
                }
            }
        }
        let (nx, nb) = (self.x_size, self.b.size());
        let phi00: Vec<usize> = (0..nx)
            .flat_map(|x| (0..nb).map(move |b| (x, b)))
            .map(|(x, b)| self.phi00(x, b))
            .collect();
        let bt = self.b.table();
        for x in xs.clone() {
            for b in self.b.elements() {
                let y = phi00[x * nb + b];
                let row = (x * nb + b) * nx * nb;
                let inner_row = (y * nb + b) * nx * nb;
                for x2 in xs.clone() {
                    for b2 in self.b.elements() {
                        let y2 = phi00[x2 * nb + b2];
                        let inner = self.phi[inner_row + y2 * nb + b2];
                        let rhs = phi00[inner * nb + bt[b * nb + b2]];
                        let lhs = self.phi[row + x2 * nb + b2];
                        if lhs != rhs
                            && c.fail(Violation::new("act4", [x, b, x2, b2]).with_detail(format!(
                                "lhs = {lhs}, rhs = {rhs}, phi00(x,b) = {y}, phi00(x',b') = {y2}, inner = {inner}"
                            )))
                        {
                            return;
                        }
                    }
                }
            }
        }
    }

    pub(crate) fn require_valid(&self, what: &str) -> Result<()> {
        match self.verify().first() {
            None => Ok(()),
            Some(v) => Err(Error::precondition(format!("{what} is not an action: {v}"))),
        }
    }
}

/// Checks the four action axioms exhaustively.
pub fn verify_action(a: &Action) -> ValidationReport {
    a.verify()
}

/// The admissible pairs of an action with their induced operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemidirectProduct {
    pairs: Vec<(usize, usize)>,
    /// `index[x * |B| + b]` is the position of `(x, b)`, or `usize::MAX`.
    index: Vec<usize>,
    magma: FiniteMagma,
    x_size: usize,
    b_size: usize,
    zero: usize,
    b_unit: usize,
}

impl SemidirectProduct {
    /// Admissible pairs in lexicographic `(x, b)` order.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn magma(&self) -> &FiniteMagma {
        &self.magma
    }

    pub fn into_magma(self) -> FiniteMagma {
        self.magma
    }

    pub fn index_of(&self, x: usize, b: usize) -> Option<usize> {
        if x >= self.x_size || b >= self.b_size {
            return None;
        }
        Some(self.index[x * self.b_size + b]).filter(|&i| i != usize::MAX)
    }

    pub fn pair(&self, i: usize) -> (usize, usize) {
        self.pairs[i]
    }

    /// `x -> (x, 0)`.
    pub fn kernel_map(&self) -> ElementMap {
        ElementMap::from_fn(self.x_size, self.pairs.len(), |x| {
            self.index_of(x, self.b_unit).expect("(x, 0) is admissible")
        })
        .unwrap()
    }

    /// `(x, b) -> x`.
    pub fn x_projection(&self) -> ElementMap {
        ElementMap::new(self.x_size, self.pairs.iter().map(|p| p.0).collect()).unwrap()
    }

    /// `b -> (0, b)`.
    pub fn section(&self) -> ElementMap {
        ElementMap::from_fn(self.b_size, self.pairs.len(), |b| {
            self.index_of(self.zero, b).expect("(0, b) is admissible")
        })
        .unwrap()
    }

    /// `(x, b) -> b`.
    pub fn b_projection(&self) -> ElementMap {
        ElementMap::new(self.b_size, self.pairs.iter().map(|p| p.1).collect()).unwrap()
    }
}

/// Builds `X ⋊ B` for a valid action.
pub fn semidirect_product(a: &Action) -> Result<SemidirectProduct> {
    a.require_valid("input")?;
    sdp_unchecked(a)
}

pub(crate) fn sdp_unchecked(a: &Action) -> Result<SemidirectProduct> {
    let (nx, nb) = (a.x_size, a.b.size());
    let bt = a.b.table();
    let mut pairs = Vec::with_capacity(nx * nb);
    let mut index = vec![usize::MAX; nx * nb];
    for x in 0..nx {
        for b in 0..nb {
            if a.is_admissible(x, b) {
                index[x * nb + b] = pairs.len();
                pairs.push((x, b));
            }
        }
    }
    let n = pairs.len();
    let mut table = Vec::with_capacity(n * n);
    for &(x, b) in &pairs {
        let row = &a.phi[(x * nb + b) * nx * nb..(x * nb + b + 1) * nx * nb];
        let brow = &bt[b * nb..(b + 1) * nb];
        for &(x2, b2) in &pairs {
            let (y, c) = (row[x2 * nb + b2], brow[b2]);
            let i = index[y * nb + c];
            if i == usize::MAX {
                return Err(Error::Invariant(format!(
                    "semidirect product not closed: ({x},{b}) + ({x2},{b2}) = ({y},{c})"
                )));
            }
            table.push(i);
        }
    }
    let unit = Some(index[a.zero * nb + a.b.unit()])
        .filter(|&i| i != usize::MAX)
        .ok_or_else(|| Error::Invariant("(0, 0) is not admissible".into()))?;
    let magma = FiniteMagma::from_flat(n, unit, table)?;
    if !magma.is_unitary() {
        return Err(Error::Invariant("(0, 0) is not a unit".into()));
    }
    Ok(SemidirectProduct {
        pairs,
        index,
        magma,
        x_size: nx,
        b_size: nb,
        zero: a.zero,
        b_unit: a.b.unit(),
    })
}

/// The point `(X ⋊ B, ⟨1,0⟩, π_X, ⟨0,1⟩, π_B)`.
pub fn canonical_point(a: &Action) -> Result<RetractionPoint> {
    a.require_valid("input")?;
    canonical_point_unchecked(a)
}

pub(crate) fn canonical_point_unchecked(a: &Action) -> Result<RetractionPoint> {
    let sdp = sdp_unchecked(a)?;
    let (k, q, s, p) = (
        sdp.kernel_map(),
        sdp.x_projection(),
        sdp.section(),
        sdp.b_projection(),
    );
    RetractionPoint::new(sdp.magma, a.b.clone(), a.x_size, k, q, s, p)
}

fn same_base(a: &Action, a2: &Action) -> Result<()> {
    if a.b != a2.b {
        return Err(Error::structural("actions must be over the same magma B"));
    }
    Ok(())
}

/// Checks `φ'(f(x), b, f(x'), b') = f(φ(x, b, x', b'))` for all arguments.
pub fn b_morphism_check(a: &Action, a2: &Action, f: &ElementMap) -> Result<ValidationReport> {
    same_base(a, a2)?;
    f.expect_shape(a.x_size, a2.x_size, "f")?;
    if f.apply(a.zero) != a2.zero {
        return Err(Error::precondition("f does not preserve the zero"));
    }
    let mut r = ValidationReport::new();
    for x in 0..a.x_size {
        for b in a.b.elements() {
            for x2 in 0..a.x_size {
                for b2 in a.b.elements() {
                    let lhs = a2.phi(f.apply(x), b, f.apply(x2), b2);
                    let rhs = f.apply(a.phi(x, b, x2, b2));
                    if lhs != rhs {
                        r.push(
                            Violation::new("B-morphism", [x, b, x2, b2])
                                .with_detail(format!("phi'(f..) = {lhs}, f(phi(..)) = {rhs}")),
                        );
                    }
                }
            }
        }
    }
    Ok(r)
}

/// `(x, b) -> (f(x), b)` between the semidirect products of a B-morphism.
pub fn induced_sdp_morphism(a: &Action, a2: &Action, f: &ElementMap) -> Result<ElementMap> {
    if let Some(v) = b_morphism_check(a, a2, f)?.first() {
        return Err(Error::precondition(format!("f is not a B-morphism: {v}")));
    }
    let (s1, s2) = (semidirect_product(a)?, semidirect_product(a2)?);
    let g = pair_map(&s1, &s2, |x, b| (f.apply(x), b))?;
    let g =
        g.map_err(|(x, b)| Error::Invariant(format!("({x},{b}) maps outside the target product")))?;
    if let Some(v) = check_morphism(&g, s1.magma(), s2.magma())?.first() {
        return Err(Error::Invariant(format!(
            "induced map is not a morphism: {v}"
        )));
    }
    Ok(g)
}

/// Builds a map between products from a pair formula. The inner `Err`
/// carries the first source pair whose image is not admissible.
fn pair_map(
    s1: &SemidirectProduct,
    s2: &SemidirectProduct,
    f: impl Fn(usize, usize) -> (usize, usize),
) -> Result<Result<ElementMap, (usize, usize)>> {
    let mut values = Vec::with_capacity(s1.pairs.len());
    for &(x, b) in &s1.pairs {
        let (y, c) = f(x, b);
        match s2.index_of(y, c) {
            Some(i) => values.push(i),
            None => return Ok(Err((x, b))),
        }
    }
    Ok(Ok(ElementMap::new(s2.pairs.len(), values)?))
}

/// `w(x, b) = u(x) + v(b)` out of `X ⋊ B`, when it is a morphism.
///
/// The criterion is quantified over admissible pairs, since `w` only lives
/// on the semidirect product.
pub fn hom_out_sdp(
    a: &Action,
    u: &ElementMap,
    v: &ElementMap,
    z: &FiniteMagma,
) -> Result<Outcome<ElementMap>> {
    u.expect_shape(a.x_size, z.size(), "u")?;
    v.expect_shape(a.b.size(), z.size(), "v")?;
    if !is_morphism(u, &a.x_magma(), z) {
        return Err(Error::precondition("u is not a morphism X -> Z"));
    }
    if !is_morphism(v, &a.b, z) {
        return Err(Error::precondition("v is not a morphism B -> Z"));
    }
    let sdp = semidirect_product(a)?;
    for &(x, b) in sdp.pairs() {
        for &(x2, b2) in sdp.pairs() {
            let lhs = z.op(u.apply(a.phi(x, b, x2, b2)), v.apply(a.b.op(b, b2)));
            let rhs = z.op(z.op(u.apply(x), v.apply(b)), z.op(u.apply(x2), v.apply(b2)));
            if lhs != rhs {
                return Ok(Outcome::Refuted(
                    Violation::new("out-criterion", [x, b, x2, b2])
                        .with_detail(format!("lhs = {lhs}, rhs = {rhs}")),
                ));
            }
        }
    }
    let w = ElementMap::new(
        z.size(),
        sdp.pairs()
            .iter()
            .map(|&(x, b)| z.op(u.apply(x), v.apply(b)))
            .collect(),
    )?;
    Ok(Outcome::Built(w))
}

/// Result of [`hom_into_sdp`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntoSdp {
    pub outcome: Outcome<ElementMap>,
    /// When `φ(x,b,x',b') = x + ξ(b,x')`, whether
    /// `f(z₁+z₂) = f(z₁) + ξ(g(z₁), f(z₂))`. `None` when `φ` has another
    /// shape.
    pub crossed_homomorphism: Option<bool>,
}

/// Whether `φ(x,b,x',b') = φ(x,0,φ(0,b,x',0),0)` everywhere.
pub fn is_crossed_form(a: &Action) -> bool {
    let (z, e) = (a.zero, a.b.unit());
    (0..a.x_size).all(|x| {
        a.b.elements().all(|b| {
            (0..a.x_size).all(|x2| {
                a.b.elements()
                    .all(|b2| a.phi(x, b, x2, b2) == a.phi(x, e, a.phi(z, b, x2, e), e))
            })
        })
    })
}

/// `z -> (f(z), g(z))` into `X ⋊ B`, when it is a morphism.
pub fn hom_into_sdp(
    a: &Action,
    f: &ElementMap,
    g: &ElementMap,
    z: &FiniteMagma,
) -> Result<IntoSdp> {
    f.expect_shape(z.size(), a.x_size, "f")?;
    g.expect_shape(z.size(), a.b.size(), "g")?;
    if f.apply(z.unit()) != a.zero {
        return Err(Error::precondition("f does not send the unit to the zero"));
    }
    if !is_morphism(g, z, &a.b) {
        return Err(Error::precondition("g is not a morphism Z -> B"));
    }
    let sdp = semidirect_product(a)?;
    let crossed = is_crossed_form(a).then(|| {
        let (zero, e) = (a.zero, a.b.unit());
        let xi = |b: usize, x2: usize| a.phi(zero, b, x2, e);
        z.elements().all(|z1| {
            z.elements().all(|z2| {
                f.apply(z.op(z1, z2)) == a.phi(f.apply(z1), e, xi(g.apply(z1), f.apply(z2)), e)
            })
        })
    });
    let mut values = Vec::with_capacity(z.size());
    for e in z.elements() {
        match sdp.index_of(f.apply(e), g.apply(e)) {
            Some(i) => values.push(i),
            None => {
                return Ok(IntoSdp {
                    outcome: Outcome::Refuted(Violation::new("admissible-image", [e])),
                    crossed_homomorphism: crossed,
                })
            }
        }
    }
    for z1 in z.elements() {
        for z2 in z.elements() {
            let lhs = f.apply(z.op(z1, z2));
            let rhs = a.phi(f.apply(z1), g.apply(z1), f.apply(z2), g.apply(z2));
            if lhs != rhs {
                return Ok(IntoSdp {
                    outcome: Outcome::Refuted(
                        Violation::new("into-criterion", [z1, z2])
                            .with_detail(format!("f(z1+z2) = {lhs}, phi(..) = {rhs}")),
                    ),
                    crossed_homomorphism: crossed,
                });
            }
        }
    }
    Ok(IntoSdp {
        outcome: Outcome::Built(ElementMap::new(sdp.pairs().len(), values)?),
        crossed_homomorphism: crossed,
    })
}

/// One condition of [`f_transport_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub holds: bool,
    pub witness: Option<Violation>,
}

impl Condition {
    pub(crate) fn ok() -> Self {
        Condition {
            holds: true,
            witness: None,
        }
    }

    pub(crate) fn fails(v: Violation) -> Self {
        Condition {
            holds: false,
            witness: Some(v),
        }
    }

    pub(crate) fn from_first(v: Option<Violation>) -> Self {
        v.map_or_else(Self::ok, Self::fails)
    }
}

/// How a morphism `f` of induced kernel magmas transports to the semidirect
/// products of two actions over the same `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportReport {
    /// A morphism `g` with `π_B g = π_B`, `g(x,0) = (f(x),0)`,
    /// `g(0,b) = (0,b)`, built as `g(x,b) = (φ'00(f(x),b), b)`.
    pub boundary_morphism: Condition,
    /// Same boundary values without the `π_B` condition, by exhaustive search.
    pub boundary_morphism_search: Condition,
    /// Whether the search was exhaustive or fell back to the formula.
    pub search_exhaustive: bool,
    /// `g₁(x,b) = φ'00(f(x),b)` satisfies the transported product equation.
    pub kernel_component: Condition,
    /// `φ'00(f(φ(x,b,x',b')), b+b') = φ'(φ'00(f(x),b), b, φ'00(f(x'),b'), b')`
    /// for every `(x, b, x', b')`.
    pub transport_equation: Condition,
    /// `g(x, b) = (f(x), b)` is a morphism of products.
    pub compatible_morphism: Condition,
    /// `f` is a B-morphism.
    pub b_morphism: Condition,
    /// For a bijective B-morphism, `(x, b) -> (f(x), b)` is an isomorphism.
    /// `None` otherwise.
    pub isomorphism: Option<Condition>,
    pub g: Option<ElementMap>,
}

impl TransportReport {
    pub fn boundary_conditions_agree(&self) -> bool {
        let h = [
            self.boundary_morphism.holds,
            self.boundary_morphism_search.holds,
            self.kernel_component.holds,
            self.transport_equation.holds,
        ];
        h.iter().all(|&v| v == h[0])
    }

    pub fn compatibility_conditions_agree(&self) -> bool {
        self.compatible_morphism.holds == self.b_morphism.holds
    }
}

const SEARCH_LIMIT: u64 = 1 << 20;

/// Evaluates, independently, the conditions under which a morphism `f` of
/// kernel magmas lifts to the semidirect products.
pub fn f_transport_check(a: &Action, a2: &Action, f: &ElementMap) -> Result<TransportReport> {
    same_base(a, a2)?;
    f.expect_shape(a.x_size, a2.x_size, "f")?;
    a.require_valid("first action")?;
    a2.require_valid("second action")?;
    if !is_morphism(f, &a.x_magma(), &a2.x_magma()) {
        return Err(Error::precondition("f is not a morphism of kernel magmas"));
    }
    let (s1, s2) = (sdp_unchecked(a)?, sdp_unchecked(a2)?);
    let bm = &a.b;

    // g(x,b) = (φ'00(f(x),b), b)
    let (boundary_morphism, g) = match pair_map(&s1, &s2, |x, b| (a2.phi00(f.apply(x), b), b))? {
        Err(pair) => (
            Condition::fails(Violation::new("image-admissible", [pair.0, pair.1])),
            None,
        ),
        Ok(g) => match check_morphism(&g, s1.magma(), s2.magma())?.first() {
            Some(v) => (Condition::fails(v.clone()), None),
            None => (Condition::ok(), Some(g)),
        },
    };

    let (boundary_morphism_search, search_exhaustive) = boundary_search(a, &s1, &s2, f)
        .map_or_else(|| (boundary_morphism.clone(), false), |c| (c, true));

    let g1 = |i: usize| {
        let (x, b) = s1.pair(i);
        a2.phi00(f.apply(x), b)
    };
    let mut kc = None;
    'outer: for i in 0..s1.pairs().len() {
        let (x, b) = s1.pair(i);
        if b == bm.unit() && g1(i) != f.apply(x) {
            kc = Some(Violation::new("g1(x,0)=f(x)", [x]));
            break;
        }
        for j in 0..s1.pairs().len() {
            let (x2, b2) = s1.pair(j);
            let k = s1.magma().op(i, j);
            let lhs = g1(k);
            let rhs = a2.phi(g1(i), b, g1(j), b2);
            if lhs != rhs {
                kc = Some(Violation::new("g1-equation", [x, b, x2, b2]));
                break 'outer;
            }
        }
    }
    let kernel_component = Condition::from_first(kc);

    let mut te = None;
    'te: for x in 0..a.x_size {
        for b in bm.elements() {
            for x2 in 0..a.x_size {
                for b2 in bm.elements() {
                    let lhs = a2.phi00(f.apply(a.phi(x, b, x2, b2)), bm.op(b, b2));
                    let rhs = a2.phi(a2.phi00(f.apply(x), b), b, a2.phi00(f.apply(x2), b2), b2);
                    if lhs != rhs {
                        te = Some(
                            Violation::new("transport-equation", [x, b, x2, b2])
                                .with_detail(format!("lhs = {lhs}, rhs = {rhs}")),
                        );
                        break 'te;
                    }
                }
            }
        }
    }
    let transport_equation = Condition::from_first(te);

    let compat = pair_map(&s1, &s2, |x, b| (f.apply(x), b))?;
    let (compatible_morphism, compat_map) = match compat {
        Err(pair) => (
            Condition::fails(Violation::new("image-admissible", [pair.0, pair.1])),
            None,
        ),
        Ok(g) => match check_morphism(&g, s1.magma(), s2.magma())?.first() {
            Some(v) => (Condition::fails(v.clone()), None),
            None => (Condition::ok(), Some(g)),
        },
    };
    let b_morphism =
        Condition::from_first(b_morphism_check(a, a2, f)?.violations.into_iter().next());

    let isomorphism = (f.is_bijective() && b_morphism.holds).then(|| match &compat_map {
        None => Condition::fails(Violation::new(
            "compatible-morphism-missing",
            Vec::<usize>::new(),
        )),
        Some(g) => match g.inverse() {
            None => Condition::fails(Violation::new("bijective", Vec::<usize>::new())),
            Some(inv) => Condition::from_first(
                check_morphism(&inv, s2.magma(), s1.magma())
                    .ok()
                    .and_then(|r| r.violations.into_iter().next()),
            ),
        },
    });

    Ok(TransportReport {
        boundary_morphism,
        boundary_morphism_search,
        search_exhaustive,
        kernel_component,
        transport_equation,
        compatible_morphism,
        b_morphism,
        isomorphism,
        g,
    })
}

/// Exhaustive search for a morphism of products with `g(x,0) = (f(x),0)` and
/// `g(0,b) = (0,b)`. `None` if the search space is too big.
fn boundary_search(
    a: &Action,
    s1: &SemidirectProduct,
    s2: &SemidirectProduct,
    f: &ElementMap,
) -> Option<Condition> {
    let e = a.b.unit();
    let n1 = s1.pairs().len();
    let mut fixed = vec![None; n1];
    for x in 0..a.x_size {
        let i = s1.index_of(x, e)?;
        match s2.index_of(f.apply(x), e) {
            Some(t) => fixed[i] = Some(t),
            None => {
                return Some(Condition::fails(Violation::new("image-admissible", [x, e])));
            }
        }
    }
    for b in a.b.elements() {
        let i = s1.index_of(a.zero, b)?;
        let t = s2.index_of(s2.zero, b)?;
        if fixed[i].is_some_and(|old| old != t) {
            return Some(Condition::fails(Violation::new("boundary-clash", [b])));
        }
        fixed[i] = Some(t);
    }
    let free: Vec<usize> = (0..n1).filter(|&i| fixed[i].is_none()).collect();
    let n2 = s2.pairs().len() as u64;
    let total = n2.checked_pow(free.len() as u32)?;
    if total > SEARCH_LIMIT {
        return None;
    }
    for choice in all_maps(free.len(), n2 as usize) {
        let mut values: Vec<usize> = fixed.iter().map(|v| v.unwrap_or(0)).collect();
        for (slot, &i) in free.iter().enumerate() {
            values[i] = choice.apply(slot);
        }
        let g = ElementMap::new(n2 as usize, values).ok()?;
        if is_morphism(&g, s1.magma(), s2.magma()) {
            return Some(Condition::ok());
        }
    }
    Some(Condition::fails(Violation::new(
        "no-boundary-morphism",
        Vec::<usize>::new(),
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magma::find_isomorphism;

    fn z(n: usize) -> FiniteMagma {
        FiniteMagma::cyclic(n)
    }

    /// x + (-1)^b x' on Z3, acted on by Z2.
    pub(crate) fn inversion() -> Action {
        Action::from_fn(z(2), 3, 0, |x, b, x2, _| {
            let x2 = if b == 1 { (3 - x2) % 3 } else { x2 };
            (x + x2) % 3
        })
        .unwrap()
    }

    #[test]
    fn trivial_and_product_actions_are_valid() {
        for b in [FiniteMagma::trivial(), z(2), z(3)] {
            assert!(verify_action(&Action::trivial(b.clone())).is_valid());
            assert!(verify_action(&Action::product(&z(3), b)).is_valid());
        }
        let m24 = crate::magma::adjoin_poles(&FiniteMagma::trivial());
        assert!(verify_action(&Action::product(&m24, z(2))).is_valid());
    }

    #[test]
    fn inversion_action_is_valid_and_gives_s3() {
        let a = inversion();
        assert!(verify_action(&a).is_valid());
        let sdp = semidirect_product(&a).unwrap();
        assert_eq!(sdp.pairs().len(), 6);
        assert!(sdp.magma().is_associative());
        assert!(!sdp.magma().is_commutative());
        assert!(find_isomorphism(sdp.magma(), &FiniteMagma::symmetric_group(3)).is_some());
    }

    #[test]
    fn act3_failure_reported_with_witness() {
        let a = Action::from_fn(z(2), 2, 0, |x, b, x2, b2| {
            if x == 0 && x2 == 0 && b == 1 && b2 == 1 {
                1
            } else {
                (x + x2) % 2
            }
        })
        .unwrap();
        let r = verify_action(&a);
        assert_eq!(r.of("act3").next().unwrap().witness, vec![1, 1]);
    }

    #[test]
    fn act4_failure_carries_intermediates() {
        // Set phi00(1,1) = 0 in all three linked cells: act1..act3 still hold.
        let base = Action::product(&z(2), z(2));
        let mut phi = base.table().to_vec();
        let cell = |x: usize, b: usize, x2: usize, b2: usize| ((x * 2 + b) * 2 + x2) * 2 + b2;
        for c in [cell(1, 1, 0, 0), cell(1, 0, 0, 1), cell(0, 0, 1, 1)] {
            phi[c] = 0;
        }
        let a = Action::new(z(2), 2, 0, phi).unwrap();
        let r = verify_action(&a);
        let v = r.of("act4").next().unwrap();
        assert_eq!(v.witness, vec![0, 1, 1, 0]);
        assert!(v.detail.as_ref().unwrap().contains("phi00"));
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(
            Action::new(z(2), 2, 0, vec![0; 15]),
            Err(Error::Structural(_))
        ));
        assert!(matches!(
            Action::new(z(2), 2, 2, vec![0; 16]),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn product_sdp_is_full_product() {
        let a = Action::product(&z(2), z(3));
        let sdp = semidirect_product(&a).unwrap();
        assert_eq!(sdp.pairs().len(), 6);
        assert_eq!(sdp.magma(), &crate::magma::direct_product(&z(2), &z(3)));
    }

    #[test]
    fn canonical_point_of_product_action() {
        let a = Action::product(&z(2), z(2));
        let pt = canonical_point(&a).unwrap();
        assert!(pt.is_valid());
        assert_eq!(pt, RetractionPoint::direct_product(&z(2), &z(2)));

        let one = canonical_point(&Action::trivial(z(3))).unwrap();
        assert!(one.is_valid());
        assert_eq!(one.a(), &z(3));
    }

    #[test]
    fn b_morphisms() {
        let a = inversion();
        assert!(b_morphism_check(&a, &a, &ElementMap::identity(3))
            .unwrap()
            .is_valid());
        let t = Action::trivial(z(2));
        let zero = ElementMap::constant(3, 1, 0).unwrap();
        assert!(b_morphism_check(&a, &t, &zero).unwrap().is_valid());
        let neg = ElementMap::from_fn(3, 3, |x| (3 - x) % 3).unwrap();
        // Negation commutes with x + (-1)^b x'.
        assert!(b_morphism_check(&a, &a, &neg).unwrap().is_valid());
        let bad = ElementMap::constant(3, 3, 1).unwrap();
        assert!(matches!(
            b_morphism_check(&a, &a, &bad),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn induced_morphisms_between_products() {
        let a = inversion();
        let id = induced_sdp_morphism(&a, &a, &ElementMap::identity(3)).unwrap();
        assert_eq!(id, ElementMap::identity(6));
        let t = Action::trivial(z(2));
        let zero = ElementMap::constant(3, 1, 0).unwrap();
        let g = induced_sdp_morphism(&a, &t, &zero).unwrap();
        assert_eq!(g.cod(), 2);
        assert_eq!(g.values(), &[0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn hom_out_and_into() {
        let a = inversion();
        let sdp = semidirect_product(&a).unwrap();
        let m = sdp.magma().clone();
        let w = hom_out_sdp(&a, &sdp.kernel_map(), &sdp.section(), &m)
            .unwrap()
            .built()
            .unwrap();
        assert_eq!(w, ElementMap::identity(6));

        let zero = ElementMap::constant(3, 2, 0).unwrap();
        let w = hom_out_sdp(&a, &zero, &ElementMap::identity(2), &z(2))
            .unwrap()
            .built()
            .unwrap();
        assert_eq!(w, sdp.b_projection());

        let into = hom_into_sdp(&a, &sdp.x_projection(), &sdp.b_projection(), &m).unwrap();
        assert_eq!(into.outcome.built().unwrap(), ElementMap::identity(6));
        assert_eq!(into.crossed_homomorphism, Some(true));

        let into = hom_into_sdp(
            &a,
            &ElementMap::constant(2, 3, 0).unwrap(),
            &ElementMap::identity(2),
            &z(2),
        )
        .unwrap();
        assert_eq!(into.outcome.built().unwrap(), sdp.section());
    }

    #[test]
    fn crossed_homomorphism_from_z2() {
        // f(1) = 1, g = id on Z2: f(1+1) = 0 and f(1) + ξ(1, f(1)) = 1 - 1 = 0.
        let a = inversion();
        let f = ElementMap::new(3, vec![0, 1]).unwrap();
        let into = hom_into_sdp(&a, &f, &ElementMap::identity(2), &z(2)).unwrap();
        assert!(into.outcome.is_built());
        assert_eq!(into.crossed_homomorphism, Some(true));
        // g = 0 makes f an ordinary homomorphism Z2 -> Z3, which only the zero map is.
        let into = hom_into_sdp(&a, &f, &ElementMap::constant(2, 2, 0).unwrap(), &z(2)).unwrap();
        assert!(!into.outcome.is_built());
        assert_eq!(into.crossed_homomorphism, Some(false));
    }

    #[test]
    fn transport_identity() {
        let a = inversion();
        let r = f_transport_check(&a, &a, &ElementMap::identity(3)).unwrap();
        assert!(r.boundary_morphism.holds && r.transport_equation.holds);
        assert!(r.compatible_morphism.holds && r.b_morphism.holds);
        assert_eq!(r.isomorphism.as_ref().map(|c| c.holds), Some(true));
        assert_eq!(r.g, Some(ElementMap::identity(6)));
        assert!(r.boundary_conditions_agree());
        assert!(r.compatibility_conditions_agree());
    }

    #[test]
    fn transport_negation_is_an_isomorphism() {
        let a = inversion();
        let neg = ElementMap::from_fn(3, 3, |x| (3 - x) % 3).unwrap();
        let r = f_transport_check(&a, &a, &neg).unwrap();
        assert!(r.b_morphism.holds);
        assert_eq!(r.isomorphism.map(|c| c.holds), Some(true));
    }
}
