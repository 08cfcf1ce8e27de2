//! Points versus actions.
//!
//! `Φ` reads an action off a point, `φ(x,b,x',b') = q((k(x)+s(b)) + (k(x')+s(b')))`,
//! and [`canonical_point`](crate::action::canonical_point) goes back. `Φ` of the
//! canonical point is the action itself, and two points are equivalent exactly
//! when `Φ` agrees on them, so actions on a fixed `X` and `B` are the
//! equivalence classes of points.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::action::{canonical_point_unchecked, Action};
use crate::error::{Error, Result};
use crate::magma::{is_morphism, magma_at, magma_count, ElementMap, FiniteMagma};
use crate::point::{all_maps, check_compatible, RetractionPoint};

/// Bounds on the exhaustive searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchLimits {
    /// Largest candidate count an action search will start on, counted after
    /// the cheap axioms have fixed what they fix.
    pub max_candidates: f64,
    /// Largest middle carrier a point search may be asked for.
    pub max_a_bound: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_candidates: 2f64.powi(40),
            max_a_bound: 4,
        }
    }
}

/// The classifying action of a valid point.
pub fn phi_of_point(pt: &RetractionPoint) -> Result<Action> {
    pt.require_valid("point")?;
    Ok(phi_unchecked(pt))
}

pub(crate) fn phi_unchecked(pt: &RetractionPoint) -> Action {
    let nb = pt.b().size();
    let (na, at, q) = (pt.a().size(), pt.a().table(), pt.q().values());
    let ks: Vec<usize> = (0..pt.x_size() * nb)
        .map(|i| pt.ks(i / nb, i % nb))
        .collect();
    let mut phi = Vec::with_capacity(ks.len() * ks.len());
    for &l in &ks {
        let row = &at[l * na..(l + 1) * na];
        phi.extend(ks.iter().map(|&r| q[row[r]]));
    }
    Action::new(pt.b().clone(), pt.x_size(), pt.x_zero(), phi).expect("q lands in X")
}

fn same_ends(pt: &RetractionPoint, pt2: &RetractionPoint) -> Result<()> {
    if pt.x_size() != pt2.x_size() || pt.b() != pt2.b() {
        return Err(Error::structural("points must share X and B"));
    }
    Ok(())
}

/// Decides `pt ∼ pt2` by comparing classifying actions. When they agree the
/// witness `α(a) = k'q(a) + s'p(a)` is built and checked.
pub fn equivalent_points(
    pt: &RetractionPoint,
    pt2: &RetractionPoint,
) -> Result<Option<ElementMap>> {
    same_ends(pt, pt2)?;
    pt.require_valid("first point")?;
    pt2.require_valid("second point")?;
    if phi_unchecked(pt) != phi_unchecked(pt2) {
        return Ok(None);
    }
    let alpha = ElementMap::from_fn(pt.a().size(), pt2.a().size(), |a| {
        pt2.ks(pt.q().apply(a), pt.p().apply(a))
    })?;
    if let Some(v) = check_compatible(pt, pt2, &alpha) {
        return Err(Error::Invariant(format!(
            "equal classifying actions but the comparison map fails: {v}"
        )));
    }
    Ok(Some(alpha))
}

/// A class of equivalent points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceClass {
    /// The canonical point of the shared action.
    pub representative: RetractionPoint,
    /// Positions in the input list.
    pub members: Vec<usize>,
    pub classifying_action: Action,
}

/// Groups points by classifying action. Classes come out ordered by action.
pub fn quotient_points(points: &[RetractionPoint]) -> Result<Vec<EquivalenceClass>> {
    if let Some(first) = points.first() {
        for pt in &points[1..] {
            same_ends(first, pt)?;
        }
    }
    let actions = points
        .par_iter()
        .map(phi_of_point)
        .collect::<Result<Vec<_>>>()?;
    let mut groups: BTreeMap<Action, Vec<usize>> = BTreeMap::new();
    for (i, a) in actions.into_iter().enumerate() {
        groups.entry(a).or_default().push(i);
    }
    groups
        .into_iter()
        .map(|(action, members)| {
            Ok(EquivalenceClass {
                representative: canonical_point_unchecked(&action)?,
                members,
                classifying_action: action,
            })
        })
        .collect()
}

/// Number of table cells an action search has to fill, after the first three
/// axioms are applied, and the resulting candidate count.
pub fn action_search_size(x_size: usize, b: &FiniteMagma) -> (usize, f64) {
    let shape = Shape::new(x_size, b);
    let free = match shape.seed() {
        Some(seed) => seed.free_classes(),
        None => 0,
    };
    (free, (x_size as f64).powi(free as i32))
}

/// Every action on `{0..x_size}` with zero 0, in lexicographic table order.
///
/// The first three axioms fix or identify cells up front. The search then
/// fills `φ00` and treats each act4 instance as a link
/// `cell = φ00(other cell, b+b')`, propagating forced values as it goes.
pub fn enumerate_actions(
    x_size: usize,
    b: &FiniteMagma,
    limits: SearchLimits,
) -> Result<Vec<Action>> {
    check_action_search(x_size, b, limits)?;
    let mut tables = Vec::new();
    search_tables(x_size, b, &mut |t| tables.push(t.to_vec()));
    tables.sort();
    tables
        .into_iter()
        .map(|t| Action::new(b.clone(), x_size, 0, t))
        .collect()
}

/// Calls `f` on every action on `{0..x_size}` with zero 0, in search order
/// rather than table order. Avoids holding the whole list when only a pass
/// over it is needed.
pub fn for_each_action(
    x_size: usize,
    b: &FiniteMagma,
    limits: SearchLimits,
    mut f: impl FnMut(&Action),
) -> Result<usize> {
    check_action_search(x_size, b, limits)?;
    let mut count = 0;
    let mut action: Option<Action> = None;
    search_tables(x_size, b, &mut |t| {
        count += 1;
        match &mut action {
            Some(a) => a.overwrite_table(t),
            None => {
                action = Some(
                    Action::new(b.clone(), x_size, 0, t.to_vec())
                        .expect("search emits well-formed tables"),
                )
            }
        }
        f(action.as_ref().unwrap());
    });
    Ok(count)
}

fn check_action_search(x_size: usize, b: &FiniteMagma, limits: SearchLimits) -> Result<()> {
    if x_size == 0 {
        return Err(Error::structural("X must be nonempty"));
    }
    if let Some(v) = b.verify().first() {
        return Err(Error::precondition(format!("B is not unitary: {v}")));
    }
    let (_, estimate) = action_search_size(x_size, b);
    if estimate > limits.max_candidates {
        return Err(Error::SearchTooLarge {
            estimate,
            bound: limits.max_candidates,
        });
    }
    Ok(())
}

fn search_tables(x_size: usize, b: &FiniteMagma, out: &mut dyn FnMut(&[usize])) {
    let shape = Shape::new(x_size, b);
    if let Some(seed) = shape.seed() {
        seed.search(&shape, out);
    }
}

struct Shape<'a> {
    n: usize,
    b: &'a FiniteMagma,
}

impl<'a> Shape<'a> {
    fn new(n: usize, b: &'a FiniteMagma) -> Self {
        Shape { n, b }
    }

    fn cells(&self) -> usize {
        let m = self.b.size();
        self.n * self.n * m * m
    }

    fn cell(&self, x: usize, b: usize, x2: usize, b2: usize) -> usize {
        let m = self.b.size();
        ((x * m + b) * self.n + x2) * m + b2
    }

    /// Applies act1..act3. `None` if they already contradict each other.
    fn seed(&self) -> Option<Seed> {
        let (n, e) = (self.n, self.b.unit());
        let mut uf = UnionFind::new(self.cells());
        for x in 0..n {
            for b in self.b.elements() {
                uf.union(self.cell(x, b, 0, e), self.cell(x, e, 0, b));
                uf.union(self.cell(x, e, 0, b), self.cell(0, e, x, b));
            }
        }
        let mut class_value: Vec<Option<usize>> = vec![None; self.cells()];
        let mut fix = |uf: &mut UnionFind, c: usize, v: usize| -> bool {
            let r = uf.find(c);
            match class_value[r] {
                Some(old) => old == v,
                None => {
                    class_value[r] = Some(v);
                    true
                }
            }
        };
        for x in 0..n {
            if !fix(&mut uf, self.cell(x, e, 0, e), x) || !fix(&mut uf, self.cell(0, e, x, e), x) {
                return None;
            }
        }
        for b in self.b.elements() {
            for b2 in self.b.elements() {
                if !fix(&mut uf, self.cell(0, b, 0, b2), 0) {
                    return None;
                }
            }
        }
        let class_of: Vec<usize> = (0..self.cells()).map(|c| uf.find(c)).collect();
        // phi00 classes first, then everything else by smallest cell.
        let mut order: Vec<usize> = Vec::new();
        let mut seen = vec![false; self.cells()];
        let phi00_cells = (0..n).flat_map(|x| self.b.elements().map(move |b| (x, b)));
        for (x, b) in phi00_cells {
            let r = class_of[self.cell(x, e, 0, b)];
            if !seen[r] {
                seen[r] = true;
                order.push(r);
            }
        }
        let phi00_count = order.len();
        for &r in &class_of {
            if !seen[r] {
                seen[r] = true;
                order.push(r);
            }
        }
        Some(Seed {
            class_of,
            class_value,
            order,
            phi00_count,
        })
    }
}

struct Seed {
    class_of: Vec<usize>,
    class_value: Vec<Option<usize>>,
    /// Class roots in assignment order.
    order: Vec<usize>,
    phi00_count: usize,
}

impl Seed {
    fn free_classes(&self) -> usize {
        self.order
            .iter()
            .filter(|&&r| self.class_value[r].is_none())
            .count()
    }

    fn search(&self, shape: &Shape, out: &mut dyn FnMut(&[usize])) {
        let mut values = self.class_value.clone();
        self.assign_phi00(shape, 0, &mut values, out);
    }

    fn assign_phi00(
        &self,
        shape: &Shape,
        depth: usize,
        values: &mut Vec<Option<usize>>,
        out: &mut dyn FnMut(&[usize]),
    ) {
        if depth == self.phi00_count {
            self.solve_rest(shape, values, out);
            return;
        }
        let r = self.order[depth];
        if values[r].is_some() {
            self.assign_phi00(shape, depth + 1, values, out);
            return;
        }
        for v in 0..shape.n {
            values[r] = Some(v);
            self.assign_phi00(shape, depth + 1, values, out);
        }
        values[r] = None;
    }

    /// With `φ00` known every act4 instance is a fixed link
    /// `value(class) = rho(value(other))`.
    fn solve_rest(&self, shape: &Shape, values: &[Option<usize>], out: &mut dyn FnMut(&[usize])) {
        let (n, e) = (shape.n, shape.b.unit());
        let phi00 = |x: usize, b: usize| values[self.class_of[shape.cell(x, e, 0, b)]].unwrap();
        let mut links = Vec::with_capacity(shape.cells());
        for x in 0..n {
            for b in shape.b.elements() {
                let y = phi00(x, b);
                for x2 in 0..n {
                    for b2 in shape.b.elements() {
                        let y2 = phi00(x2, b2);
                        links.push(Link {
                            target: self.class_of[shape.cell(x, b, x2, b2)],
                            source: self.class_of[shape.cell(y, b, y2, b2)],
                            rho: shape.b.op(b, b2),
                        });
                    }
                }
            }
        }
        let rho: Vec<Vec<usize>> = shape
            .b
            .elements()
            .map(|c| (0..n).map(|x| phi00(x, c)).collect())
            .collect();
        let mut by_source: Vec<Vec<usize>> = vec![Vec::new(); shape.cells()];
        let mut by_target: Vec<Vec<usize>> = vec![Vec::new(); shape.cells()];
        for (i, l) in links.iter().enumerate() {
            by_source[l.source].push(i);
            by_target[l.target].push(i);
        }
        let mut solver = Solver {
            links: &links,
            rho: &rho,
            by_source: &by_source,
            by_target: &by_target,
            values: values.to_vec(),
            trail: Vec::new(),
            buffer: Vec::new(),
        };
        // Check links already fully determined, and propagate from fixed
        // classes.
        let fixed: Vec<usize> = self
            .order
            .iter()
            .copied()
            .filter(|&r| solver.values[r].is_some())
            .collect();
        if !fixed.into_iter().all(|r| solver.propagate(r)) {
            return;
        }
        let rest: Vec<usize> = self.order[self.phi00_count..].to_vec();
        solver.dfs(&rest, 0, n, &self.class_of, out);
    }
}

struct Link {
    target: usize,
    source: usize,
    rho: usize,
}

struct Solver<'a> {
    links: &'a [Link],
    rho: &'a [Vec<usize>],
    by_source: &'a [Vec<usize>],
    by_target: &'a [Vec<usize>],
    values: Vec<Option<usize>>,
    trail: Vec<usize>,
    buffer: Vec<usize>,
}

impl Solver<'_> {
    fn set(&mut self, r: usize, v: usize) -> bool {
        match self.values[r] {
            Some(old) => old == v,
            None => {
                self.values[r] = Some(v);
                self.trail.push(r);
                self.propagate(r)
            }
        }
    }

    fn propagate(&mut self, r: usize) -> bool {
        let v = self.values[r].expect("propagating an unset class");
        for &i in &self.by_source[r] {
            let l = &self.links[i];
            let forced = self.rho[l.rho][v];
            if !self.set(l.target, forced) {
                return false;
            }
        }
        for &i in &self.by_target[r] {
            let l = &self.links[i];
            if let Some(src) = self.values[l.source] {
                if self.rho[l.rho][src] != v {
                    return false;
                }
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let r = self.trail.pop().unwrap();
            self.values[r] = None;
        }
    }

    fn dfs(
        &mut self,
        order: &[usize],
        depth: usize,
        n: usize,
        class_of: &[usize],
        out: &mut dyn FnMut(&[usize]),
    ) {
        if depth == order.len() {
            self.buffer.clear();
            self.buffer
                .extend(class_of.iter().map(|&r| self.values[r].unwrap()));
            out(&self.buffer);
            return;
        }
        let r = order[depth];
        if self.values[r].is_some() {
            self.dfs(order, depth + 1, n, class_of, out);
            return;
        }
        for v in 0..n {
            let mark = self.trail.len();
            if self.set(r, v) {
                self.dfs(order, depth + 1, n, class_of, out);
            }
            self.undo_to(mark);
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut c: usize) -> usize {
        while self.parent[c] != c {
            self.parent[c] = self.parent[self.parent[c]];
            c = self.parent[c];
        }
        c
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller index as root so roots are stable.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Every valid point from `{0..x_size}` to `b` whose middle magma lives on
/// `{0..n}` with unit 0 for some `n <= max_a`, and whose kernel zero `q(0)`
/// is 0.
///
/// Refuses when `max_a` exceeds the configured bound or the candidate count
/// for some size would exceed `max_candidates`.
///
/// Order: by size of `A`, then `A` in
/// [`enumerate_magmas`](crate::magma::enumerate_magmas) order, then `p`,
/// `s`, `k`, `q` lexicographically.
pub fn enumerate_points(
    x_size: usize,
    b: &FiniteMagma,
    max_a: usize,
    limits: SearchLimits,
) -> Result<Vec<RetractionPoint>> {
    if x_size == 0 {
        return Err(Error::structural("X must be nonempty"));
    }
    if let Some(v) = b.verify().first() {
        return Err(Error::precondition(format!("B is not unitary: {v}")));
    }
    if max_a > limits.max_a_bound {
        return Err(Error::SearchTooLarge {
            estimate: magma_count(max_a).map_or(f64::INFINITY, |c| c as f64),
            bound: magma_count(limits.max_a_bound).map_or(f64::INFINITY, |c| c as f64),
        });
    }
    let mut out = Vec::new();
    for n in 1..=max_a {
        let count = magma_count(n).ok_or(Error::SearchTooLarge {
            estimate: f64::INFINITY,
            bound: limits.max_candidates,
        })?;
        let estimate = count as f64 * (b.size() as f64).powi(n as i32);
        if estimate > limits.max_candidates {
            return Err(Error::SearchTooLarge {
                estimate,
                bound: limits.max_candidates,
            });
        }
        if n < x_size.max(b.size()) {
            continue;
        }
        let found: Vec<Vec<RetractionPoint>> = (0..count)
            .into_par_iter()
            .map(|i| points_over(&magma_at(n, i), x_size, b))
            .collect();
        out.extend(found.into_iter().flatten());
    }
    Ok(out)
}

/// All valid points with the given middle magma (unit at 0) and `q(0) = 0`.
pub fn points_over(a: &FiniteMagma, x_size: usize, b: &FiniteMagma) -> Vec<RetractionPoint> {
    let (na, nb) = (a.size(), b.size());
    let mut out = Vec::new();
    if !a.is_unitary() {
        return out;
    }
    let ps: Vec<ElementMap> = all_maps(na, nb).filter(|p| is_morphism(p, a, b)).collect();
    for p in &ps {
        let sections: Vec<ElementMap> = all_maps(nb, na)
            .filter(|s| b.elements().all(|e| p.apply(s.apply(e)) == e))
            .filter(|s| is_morphism(s, b, a))
            .collect();
        if sections.is_empty() {
            continue;
        }
        let kernel: Vec<usize> = a.elements().filter(|&e| p.apply(e) == b.unit()).collect();
        for s in &sections {
            for k in injections_with_zero(&kernel, x_size, a) {
                // Candidates y with k(y) + s(p(e)) = e, per element e.
                let candidates: Vec<Vec<usize>> = a
                    .elements()
                    .map(|e| {
                        (0..x_size)
                            .filter(|&y| a.op(k.apply(y), s.apply(p.apply(e))) == e)
                            .collect()
                    })
                    .collect();
                if candidates.iter().any(Vec::is_empty) {
                    continue;
                }
                for q in product(&candidates, x_size) {
                    if let Ok(pt) = RetractionPoint::new(
                        a.clone(),
                        b.clone(),
                        x_size,
                        k.clone(),
                        q,
                        s.clone(),
                        p.clone(),
                    ) {
                        if pt.x_zero() == 0 && pt.is_valid() {
                            out.push(pt);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Injective maps `{0..x_size} -> kernel` with `0 -> unit of a`.
fn injections_with_zero(kernel: &[usize], x_size: usize, a: &FiniteMagma) -> Vec<ElementMap> {
    if !kernel.contains(&a.unit()) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current = vec![a.unit()];
    fn go(
        kernel: &[usize],
        x_size: usize,
        cod: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<ElementMap>,
    ) {
        if current.len() == x_size {
            out.push(ElementMap::new(cod, current.clone()).unwrap());
            return;
        }
        for &e in kernel {
            if !current.contains(&e) {
                current.push(e);
                go(kernel, x_size, cod, current, out);
                current.pop();
            }
        }
    }
    go(kernel, x_size, a.size(), &mut current, &mut out);
    out
}

fn product(candidates: &[Vec<usize>], cod: usize) -> impl Iterator<Item = ElementMap> + '_ {
    let total: usize = candidates.iter().map(Vec::len).product();
    (0..total).map(move |mut i| {
        let mut values = vec![0; candidates.len()];
        for slot in (0..candidates.len()).rev() {
            let c = &candidates[slot];
            values[slot] = c[i % c.len()];
            i /= c.len();
        }
        ElementMap::new(cod, values).unwrap()
    })
}

/// Points, classes, and the independent action count for one `(X, B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Census {
    pub x_size: usize,
    pub b: FiniteMagma,
    pub max_a: usize,
    pub points: Vec<RetractionPoint>,
    pub classes: Vec<EquivalenceClass>,
    /// Actions whose semidirect product fits in `max_a` elements.
    pub actions: usize,
}

impl Census {
    pub fn classes_match_actions(&self) -> bool {
        self.classes.len() == self.actions
    }
}

/// Enumerates points up to `max_a`, quotients them, and counts actions
/// independently.
pub fn classification_census(
    x_size: usize,
    b: &FiniteMagma,
    max_a: usize,
    limits: SearchLimits,
) -> Result<Census> {
    let points = enumerate_points(x_size, b, max_a, limits)?;
    let classes = quotient_points(&points)?;
    let actions = enumerate_actions(x_size, b, limits)?
        .iter()
        .map(crate::action::sdp_unchecked)
        .filter(|sdp| sdp.as_ref().is_ok_and(|s| s.pairs().len() <= max_a))
        .count();
    Ok(Census {
        x_size,
        b: b.clone(),
        max_a,
        points,
        classes,
        actions,
    })
}
