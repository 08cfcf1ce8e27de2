//! Retraction points.
//!
//! A retraction point from a set `X` to a unitary magma `B` is a unitary magma
//! `A` with maps
//!
//! ```text
//!        k        p
//!   X ------> A ------> B
//!     <------   <------
//!        q        s
//! ```
//!
//! where `p` and `s` are morphisms, `ps = 1`, `qk = 1`, `pk = 0`,
//! `qs = q(0)`, and every `a` decomposes as `a = kq(a) + sp(a)`. The set `X`
//! carries no structure of its own; its zero is `q(0)` and its operation is
//! pulled back through `k`.

use crate::error::{Error, Result};
use crate::magma::{is_morphism, morphism_scan, ElementMap, FiniteMagma};
use crate::report::{Checker, Outcome, ValidationReport, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RetractionPoint {
    a: FiniteMagma,
    b: FiniteMagma,
    x_size: usize,
    k: ElementMap,
    q: ElementMap,
    s: ElementMap,
    p: ElementMap,
}

impl RetractionPoint {
    /// Assembles a point, checking only that the maps have the right shapes.
    pub fn new(
        a: FiniteMagma,
        b: FiniteMagma,
        x_size: usize,
        k: ElementMap,
        q: ElementMap,
        s: ElementMap,
        p: ElementMap,
    ) -> Result<Self> {
        if x_size == 0 {
            return Err(Error::structural("the kernel set X must be nonempty"));
        }
        k.expect_shape(x_size, a.size(), "k")?;
        q.expect_shape(a.size(), x_size, "q")?;
        s.expect_shape(b.size(), a.size(), "s")?;
        p.expect_shape(a.size(), b.size(), "p")?;
        Ok(RetractionPoint {
            a,
            b,
            x_size,
            k,
            q,
            s,
            p,
        })
    }

    /// The product point `X×B` with injections, first projection as `q` and
    /// second projection as `p`. Pairs are encoded as in
    /// [`direct_product`](crate::magma::direct_product).
    pub fn direct_product(x: &FiniteMagma, b: &FiniteMagma) -> Self {
        let a = crate::magma::direct_product(x, b);
        let nb = b.size();
        let k = ElementMap::from_fn(x.size(), a.size(), |i| i * nb + b.unit()).unwrap();
        let q = ElementMap::from_fn(a.size(), x.size(), |i| i / nb).unwrap();
        let s = ElementMap::from_fn(nb, a.size(), |j| x.unit() * nb + j).unwrap();
        let p = ElementMap::from_fn(a.size(), nb, |i| i % nb).unwrap();
        RetractionPoint::new(a, b.clone(), x.size(), k, q, s, p).unwrap()
    }

    pub fn a(&self) -> &FiniteMagma {
        &self.a
    }

    pub fn b(&self) -> &FiniteMagma {
        &self.b
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn k(&self) -> &ElementMap {
        &self.k
    }

    pub fn q(&self) -> &ElementMap {
        &self.q
    }

    pub fn s(&self) -> &ElementMap {
        &self.s
    }

    pub fn p(&self) -> &ElementMap {
        &self.p
    }

    /// The designated zero of `X`, namely `q(0)`.
    pub fn x_zero(&self) -> usize {
        self.q.apply(self.a.unit())
    }

    #[inline]
    pub(crate) fn add(&self, a1: usize, a2: usize) -> usize {
        self.a.op(a1, a2)
    }

    /// `k(x) + s(b)`.
    #[inline]
    pub fn ks(&self, x: usize, b: usize) -> usize {
        self.a.op(self.k.apply(x), self.s.apply(b))
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
        self.a.check_unit_laws(c, "A:");
        if c.done() {
            return;
        }
        self.b.check_unit_laws(c, "B:");
        if c.done() {
            return;
        }
        morphism_scan(&self.p, &self.a, &self.b, c, "p:");
        if c.done() {
            return;
        }
        morphism_scan(&self.s, &self.b, &self.a, c, "s:");
        if c.done() {
            return;
        }
        for b in self.b.elements() {
            let ps = self.p.apply(self.s.apply(b));
            if ps != b && c.fail(Violation::new("ps=1", [b]).with_detail(format!("ps(b) = {ps}"))) {
                return;
            }
        }
        for x in 0..self.x_size {
            let pk = self.p.apply(self.k.apply(x));
            if pk != self.b.unit()
                && c.fail(Violation::new("pk=0", [x]).with_detail(format!("pk(x) = {pk}")))
            {
                return;
            }
        }
        for x in 0..self.x_size {
            let qk = self.q.apply(self.k.apply(x));
            if qk != x && c.fail(Violation::new("qk=1", [x]).with_detail(format!("qk(x) = {qk}"))) {
                return;
            }
        }
        let zero = self.x_zero();
        for b in self.b.elements() {
            let qs = self.q.apply(self.s.apply(b));
            if qs != zero
                && c.fail(
                    Violation::new("qs=q0", [b])
                        .with_detail(format!("qs(b) = {qs}, q(0) = {zero}")),
                )
            {
                return;
            }
        }
        for a in self.a.elements() {
            let d = self.ks(self.q.apply(a), self.p.apply(a));
            if d != a
                && c.fail(Violation::new("kq+sp=1", [a]).with_detail(format!("kq(a)+sp(a) = {d}")))
            {
                return;
            }
        }
    }

    pub(crate) fn require_valid(&self, what: &str) -> Result<()> {
        match self.verify().first() {
            None => Ok(()),
            Some(v) => Err(Error::precondition(format!(
                "{what} is not a retraction point: {v}"
            ))),
        }
    }

    /// Whether `(x, b)` is hit by the pair map, i.e. `q(k(x) + s(b)) = x`.
    pub fn is_admissible(&self, x: usize, b: usize) -> bool {
        self.q.apply(self.ks(x, b)) == x
    }

    /// `a -> (q(a), p(a))`, with the pair `(x, b)` encoded as `x * |B| + b`.
    pub fn pair_map(&self) -> ElementMap {
        let nb = self.b.size();
        ElementMap::from_fn(self.a.size(), self.x_size * nb, |a| {
            self.q.apply(a) * nb + self.p.apply(a)
        })
        .unwrap()
    }
}

/// Checks the five point equations and morphism-hood of `p` and `s`.
pub fn verify_point(pt: &RetractionPoint) -> ValidationReport {
    pt.verify()
}

/// The unitary magma on `X` with zero `q(0)` and `x + x' = q(k(x) + k(x'))`.
pub fn induced_x_magma(pt: &RetractionPoint) -> Result<FiniteMagma> {
    pt.require_valid("point")?;
    let m = FiniteMagma::from_fn(pt.x_size, pt.x_zero(), |x, y| {
        pt.q.apply(pt.add(pt.k.apply(x), pt.k.apply(y)))
    })?;
    if !m.is_unitary() {
        return Err(Error::Invariant("induced magma on X lost its unit".into()));
    }
    Ok(m)
}

/// The identities every retraction point satisfies, checked exhaustively.
///
/// Covers `kq(0) = 0`, the zero laws of the induced structure on `X`, the
/// three bracketings of `k(x) + s(b)` against padding by units,
/// `q(s(b) + s(b')) = q(0)`, and the reduction of
/// `q((k(x)+s(b)) + (k(x')+s(b')))` to admissible representatives.
pub fn kernel_identities(pt: &RetractionPoint) -> ValidationReport {
    let mut r = ValidationReport::new();
    let (a0, xz) = (pt.a.unit(), pt.x_zero());
    let kq0 = pt.k.apply(xz);
    if kq0 != a0 {
        r.push(Violation::new("1a:kq(0)=0", Vec::<usize>::new()));
    }
    for x in 0..pt.x_size {
        let kx = pt.k.apply(x);
        if pt.q.apply(pt.add(kx, kq0)) != x || pt.q.apply(pt.add(kq0, kx)) != x {
            r.push(Violation::new("1a:zero-laws", [x]));
        }
    }
    for x in 0..pt.x_size {
        for b in pt.b.elements() {
            let (kx, sb) = (pt.k.apply(x), pt.s.apply(b));
            let plain = pt.q.apply(pt.add(kx, sb));
            let padded = pt.q.apply(pt.add(pt.add(kx, a0), pt.add(a0, sb)));
            let right = pt.q.apply(pt.add(pt.add(kx, sb), pt.add(a0, a0)));
            let left = pt.q.apply(pt.add(pt.add(a0, a0), pt.add(kx, sb)));
            if plain != padded || plain != right || plain != left {
                r.push(Violation::new("1b:bracketings", [x, b]));
            }
        }
    }
    for b in pt.b.elements() {
        for b2 in pt.b.elements() {
            if pt.q.apply(pt.add(pt.s.apply(b), pt.s.apply(b2))) != xz {
                r.push(Violation::new("1c:q(s+s)=q0", [b, b2]));
            }
        }
    }
    for x in 0..pt.x_size {
        for b in pt.b.elements() {
            for x2 in 0..pt.x_size {
                for b2 in pt.b.elements() {
                    let lhs = pt.q.apply(pt.add(pt.ks(x, b), pt.ks(x2, b2)));
                    let u = pt.q.apply(pt.ks(x, b));
                    let v = pt.q.apply(pt.ks(x2, b2));
                    let w = pt.q.apply(pt.add(pt.ks(u, b), pt.ks(v, b2)));
                    let rhs = pt.q.apply(pt.ks(w, pt.b.op(b, b2)));
                    if lhs != rhs {
                        r.push(
                            Violation::new("1d:reduction", [x, b, x2, b2])
                                .with_detail(format!("lhs = {lhs}, rhs = {rhs}")),
                        );
                    }
                }
            }
        }
    }
    r
}

/// Every element is `kq(a) + sp(a)`, so a morphism out of `A` is fixed by its
/// values on the images of `k` and `s`. Returns a violating pair of distinct
/// morphisms `A -> z` that agree there, if any exists (exhaustive search).
pub fn joint_epi_counterexample(
    pt: &RetractionPoint,
    z: &FiniteMagma,
) -> Option<(ElementMap, ElementMap)> {
    let morphisms = all_morphisms(pt.a(), z);
    for (i, f) in morphisms.iter().enumerate() {
        for g in &morphisms[i + 1..] {
            let agree_k = (0..pt.x_size).all(|x| f.apply(pt.k.apply(x)) == g.apply(pt.k.apply(x)));
            let agree_s =
                pt.b.elements()
                    .all(|b| f.apply(pt.s.apply(b)) == g.apply(pt.s.apply(b)));
            if agree_k && agree_s {
                return Some((f.clone(), g.clone()));
            }
        }
    }
    None
}

/// All morphisms `m1 -> m2`, by brute force over maps.
pub fn all_morphisms(m1: &FiniteMagma, m2: &FiniteMagma) -> Vec<ElementMap> {
    all_maps(m1.size(), m2.size())
        .filter(|f| is_morphism(f, m1, m2))
        .collect()
}

/// Every map `{0..dom} -> {0..cod}` in lexicographic order.
pub fn all_maps(dom: usize, cod: usize) -> impl Iterator<Item = ElementMap> {
    let total = (cod as u64).checked_pow(dom as u32).unwrap_or(u64::MAX);
    (0..total).map(move |mut i| {
        let mut values = vec![0; dom];
        for slot in (0..dom).rev() {
            values[slot] = (i % cod as u64) as usize;
            i /= cod as u64;
        }
        ElementMap::new(cod, values).unwrap()
    })
}

/// Whether `(q, p)` is a bijection `A -> X×B`, and whether every pair is
/// admissible. The two always agree on a valid point.
pub fn bijection_criterion(pt: &RetractionPoint) -> (bool, bool) {
    let bijective = pt.pair_map().is_bijective();
    let all_admissible = (0..pt.x_size).all(|x| pt.b.elements().all(|b| pt.is_admissible(x, b)));
    (bijective, all_admissible)
}

/// The morphism `w = uq + vp : A -> Z` with `wk = u` and `ws = v`, if it is
/// a morphism.
pub fn out_morphism(
    pt: &RetractionPoint,
    u: &ElementMap,
    v: &ElementMap,
    z: &FiniteMagma,
) -> Result<Outcome<ElementMap>> {
    u.expect_shape(pt.x_size, z.size(), "u")?;
    v.expect_shape(pt.b.size(), z.size(), "v")?;
    if !is_morphism(v, &pt.b, z) {
        return Err(Error::precondition("v is not a morphism B -> Z"));
    }
    if u.apply(pt.x_zero()) != z.unit() {
        return Err(Error::precondition("u does not send q(0) to the unit of Z"));
    }
    let w = ElementMap::from_fn(pt.a.size(), z.size(), |a| {
        z.op(u.apply(pt.q.apply(a)), v.apply(pt.p.apply(a)))
    })?;
    for a in pt.a.elements() {
        for a2 in pt.a.elements() {
            let lhs = w.apply(pt.add(a, a2));
            let rhs = z.op(w.apply(a), w.apply(a2));
            if lhs != rhs {
                return Ok(Outcome::Refuted(
                    Violation::new("out-criterion", [a, a2])
                        .with_detail(format!("w(a+a') = {lhs}, w(a)+w(a') = {rhs}")),
                ));
            }
        }
    }
    Ok(Outcome::Built(w))
}

/// The morphism `h = kf + sg : Z -> A` with `qh = f` and `ph = g`, if it is
/// a morphism and really lifts `f`.
pub fn in_morphism(
    pt: &RetractionPoint,
    f: &ElementMap,
    g: &ElementMap,
    z: &FiniteMagma,
) -> Result<Outcome<ElementMap>> {
    f.expect_shape(z.size(), pt.x_size, "f")?;
    g.expect_shape(z.size(), pt.b.size(), "g")?;
    if !is_morphism(g, z, &pt.b) {
        return Err(Error::precondition("g is not a morphism Z -> B"));
    }
    if f.apply(z.unit()) != pt.x_zero() {
        return Err(Error::precondition("f does not send the unit of Z to q(0)"));
    }
    let h = ElementMap::from_fn(z.size(), pt.a.size(), |e| pt.ks(f.apply(e), g.apply(e)))?;
    for e in z.elements() {
        for e2 in z.elements() {
            let lhs = h.apply(z.op(e, e2));
            let rhs = pt.add(h.apply(e), h.apply(e2));
            if lhs != rhs {
                return Ok(Outcome::Refuted(
                    Violation::new("in-criterion", [e, e2])
                        .with_detail(format!("h(z+z') = {lhs}, h(z)+h(z') = {rhs}")),
                ));
            }
        }
    }
    // h is a morphism; it lifts f only where (f(z), g(z)) is admissible.
    for e in z.elements() {
        let back = pt.q.apply(h.apply(e));
        if back != f.apply(e) {
            return Ok(Outcome::Refuted(
                Violation::new("qh=f", [e]).with_detail(format!("qh(z) = {back}")),
            ));
        }
    }
    Ok(Outcome::Built(h))
}

/// Pulls `pt` back along a morphism `g : Z -> B`.
///
/// The middle object is `{(a, z) : p(a) = g(z)}` inside `A×Z`, listed in
/// lexicographic order, with `k(x) = (k(x), 0)`, `q = q∘π₁`,
/// `s(z) = (s(g(z)), z)` and `p = π₂`.
pub fn pullback_point(
    pt: &RetractionPoint,
    g: &ElementMap,
    z: &FiniteMagma,
) -> Result<RetractionPoint> {
    g.expect_shape(z.size(), pt.b.size(), "g")?;
    if !is_morphism(g, z, &pt.b) {
        return Err(Error::precondition("g is not a morphism Z -> B"));
    }
    pt.require_valid("point")?;
    let pairs: Vec<(usize, usize)> =
        pt.a.elements()
            .flat_map(|a| z.elements().map(move |e| (a, e)))
            .filter(|&(a, e)| pt.p.apply(a) == g.apply(e))
            .collect();
    let index = |pair: (usize, usize)| pairs.binary_search(&pair).ok();
    let lookup = |pair: (usize, usize)| {
        index(pair).ok_or_else(|| Error::Invariant(format!("pullback not closed at {pair:?}")))
    };
    let n = pairs.len();
    let mut table = Vec::with_capacity(n * n);
    for &(a, e) in &pairs {
        for &(a2, e2) in &pairs {
            table.push(lookup((pt.add(a, a2), z.op(e, e2)))?);
        }
    }
    let unit = lookup((pt.a.unit(), z.unit()))?;
    let m = FiniteMagma::from_flat(n, unit, table)?;
    let k = (0..pt.x_size)
        .map(|x| lookup((pt.k.apply(x), z.unit())))
        .collect::<Result<Vec<_>>>()?;
    let s = z
        .elements()
        .map(|e| lookup((pt.s.apply(g.apply(e)), e)))
        .collect::<Result<Vec<_>>>()?;
    let q = pairs.iter().map(|&(a, _)| pt.q.apply(a)).collect();
    let p = pairs.iter().map(|&(_, e)| e).collect();
    RetractionPoint::new(
        m,
        z.clone(),
        pt.x_size,
        ElementMap::new(n, k)?,
        ElementMap::new(pt.x_size, q)?,
        ElementMap::new(n, s)?,
        ElementMap::new(z.size(), p)?,
    )
}

fn expect_composable(pt: &RetractionPoint, upper: &RetractionPoint) -> Result<()> {
    if upper.a != pt.b {
        return Err(Error::structural(
            "the second point's middle magma must be the first point's base",
        ));
    }
    Ok(())
}

/// First `(x, y, c)` with `(k(x) + sk'(y)) + ss'(c) != k(x) + s(k'(y) + s'(c))`.
///
/// `upper` is a point `(B, k', q', s', p')` from `Y` to `C` whose middle magma
/// is the base of `pt`.
pub fn composition_witness(
    pt: &RetractionPoint,
    upper: &RetractionPoint,
) -> Result<Option<[usize; 3]>> {
    expect_composable(pt, upper)?;
    for x in 0..pt.x_size {
        let kx = pt.k.apply(x);
        for y in 0..upper.x_size {
            let ky = upper.k.apply(y);
            for c in upper.b.elements() {
                let sc = upper.s.apply(c);
                let lhs = pt.add(pt.add(kx, pt.s.apply(ky)), pt.s.apply(sc));
                let rhs = pt.add(kx, pt.s.apply(pt.b.op(ky, sc)));
                if lhs != rhs {
                    return Ok(Some([x, y, c]));
                }
            }
        }
    }
    Ok(None)
}

/// First `(x, b, b')` with `k(x) + s(b + b') != (k(x) + s(b)) + s(b')`.
/// When there is none, `pt` composes with every point over its base.
pub fn composability_sufficient_witness(pt: &RetractionPoint) -> Option<[usize; 3]> {
    for x in 0..pt.x_size {
        let kx = pt.k.apply(x);
        for b in pt.b.elements() {
            for b2 in pt.b.elements() {
                let lhs = pt.add(kx, pt.s.apply(pt.b.op(b, b2)));
                let rhs = pt.add(pt.add(kx, pt.s.apply(b)), pt.s.apply(b2));
                if lhs != rhs {
                    return Some([x, b, b2]);
                }
            }
        }
    }
    None
}

/// Builds the would-be composite without checking whether it is a point.
///
/// The kernel set is `A ×_B Y = {(a, y) : p(a) = k'(y)}` in lexicographic
/// order, with `k'' = π₁`, `q''(a) = (kq(a) + sk'q'p(a), q'p(a))`,
/// `s'' = ss'` and `p'' = p'p`.
pub fn composite_candidate(
    pt: &RetractionPoint,
    upper: &RetractionPoint,
) -> Result<RetractionPoint> {
    expect_composable(pt, upper)?;
    let pairs: Vec<(usize, usize)> =
        pt.a.elements()
            .flat_map(|a| (0..upper.x_size).map(move |y| (a, y)))
            .filter(|&(a, y)| pt.p.apply(a) == upper.k.apply(y))
            .collect();
    let n = pairs.len();
    let k = ElementMap::new(pt.a.size(), pairs.iter().map(|&(a, _)| a).collect())?;
    let q =
        pt.a.elements()
            .map(|a| {
                let y = upper.q.apply(pt.p.apply(a));
                let first = pt.add(pt.k.apply(pt.q.apply(a)), pt.s.apply(upper.k.apply(y)));
                pairs
                    .binary_search(&(first, y))
                    .map_err(|_| Error::Invariant(format!("q'' leaves A x_B Y at {a}")))
            })
            .collect::<Result<Vec<_>>>()?;
    RetractionPoint::new(
        pt.a.clone(),
        upper.b.clone(),
        n,
        k,
        ElementMap::new(n, q)?,
        upper.s.then(&pt.s)?,
        pt.p.then(&upper.p)?,
    )
}

/// Composes `pt` with a point over its base, when the composite condition
/// holds.
pub fn compose_points(
    pt: &RetractionPoint,
    upper: &RetractionPoint,
) -> Result<Outcome<RetractionPoint>> {
    pt.require_valid("first point")?;
    upper.require_valid("second point")?;
    if let Some(w) = composition_witness(pt, upper)? {
        return Ok(Outcome::Refuted(Violation::new("composite-condition", w)));
    }
    let composite = composite_candidate(pt, upper)?;
    if let Some(v) = composite.verify().first() {
        return Err(Error::Invariant(format!("composite is not a point: {v}")));
    }
    Ok(Outcome::Built(composite))
}

/// Checks that `alpha : A -> A'` is a morphism compatible with `k`, `s` and
/// `q`; if so returns its inverse `β(y) = kq'(y) + sp'(y)`.
pub fn ssfl_transport(
    pt: &RetractionPoint,
    pt2: &RetractionPoint,
    alpha: &ElementMap,
) -> Result<Outcome<ElementMap>> {
    if pt.x_size != pt2.x_size || pt.b != pt2.b {
        return Err(Error::structural("points must share X and B"));
    }
    alpha.expect_shape(pt.a.size(), pt2.a.size(), "alpha")?;
    if let Some(v) = check_compatible(pt, pt2, alpha) {
        return Ok(Outcome::Refuted(v));
    }
    let beta = ElementMap::from_fn(pt2.a.size(), pt.a.size(), |y| {
        pt.ks(pt2.q.apply(y), pt2.p.apply(y))
    })?;
    for y in pt2.a.elements() {
        if alpha.apply(beta.apply(y)) != y {
            return Ok(Outcome::Refuted(Violation::new("alpha.beta=1", [y])));
        }
    }
    for a in pt.a.elements() {
        if beta.apply(alpha.apply(a)) != a {
            return Ok(Outcome::Refuted(Violation::new("beta.alpha=1", [a])));
        }
    }
    Ok(Outcome::Built(beta))
}

/// First failed condition of `alpha` being a morphism of points that also
/// commutes with the retractions.
pub(crate) fn check_compatible(
    pt: &RetractionPoint,
    pt2: &RetractionPoint,
    alpha: &ElementMap,
) -> Option<Violation> {
    let mut c = Checker::first_only();
    morphism_scan(alpha, &pt.a, &pt2.a, &mut c, "alpha:");
    if let Some(v) = c.finish().violations.pop() {
        return Some(v);
    }
    for x in 0..pt.x_size {
        if alpha.apply(pt.k.apply(x)) != pt2.k.apply(x) {
            return Some(Violation::new("alpha.k=k'", [x]));
        }
    }
    for b in pt.b.elements() {
        if alpha.apply(pt.s.apply(b)) != pt2.s.apply(b) {
            return Some(Violation::new("alpha.s=s'", [b]));
        }
    }
    for a in pt.a.elements() {
        if pt2.q.apply(alpha.apply(a)) != pt.q.apply(a) {
            return Some(Violation::new("q'.alpha=q", [a]));
        }
    }
    None
}
