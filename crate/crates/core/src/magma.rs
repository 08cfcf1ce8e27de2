//! Finite unitary magmas and maps between finite carriers.
//!
//! Elements are the indices `0..size`. The unit is stored explicitly and need
//! not be index 0; only [`enumerate_magmas`] pins it there.

use crate::error::{Error, Result};
use crate::report::{Checker, ValidationReport, Violation};
use serde::Serialize;

/// A finite carrier with a binary operation table and a designated unit.
///
/// Construction only checks the shape of the table. Whether the unit laws
/// hold is a question for [`FiniteMagma::verify`], so invalid tables can be
/// built on purpose and inspected.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteMagma {
    size: usize,
    unit: usize,
    table: Vec<usize>,
}

impl FiniteMagma {
    /// Builds a magma from its rows (row = left operand).
    pub fn new(unit: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::structural("a magma needs at least one element"));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != size) {
            return Err(Error::structural(format!(
                "row {i} has {} entries, expected {size}",
                r.len()
            )));
        }
        Self::from_flat(size, unit, rows.into_iter().flatten().collect())
    }

    /// Builds a magma from a row-major table of length `size * size`.
    pub fn from_flat(size: usize, unit: usize, table: Vec<usize>) -> Result<Self> {
        if size == 0 {
            return Err(Error::structural("a magma needs at least one element"));
        }
        if table.len() != size * size {
            return Err(Error::structural(format!(
                "table has {} entries, expected {}",
                table.len(),
                size * size
            )));
        }
        if unit >= size {
            return Err(Error::structural(format!(
                "unit {unit} out of range for size {size}"
            )));
        }
        if let Some(pos) = table.iter().position(|&e| e >= size) {
            return Err(Error::structural(format!(
                "entry ({}, {}) = {} out of range",
                pos / size,
                pos % size,
                table[pos]
            )));
        }
        Ok(FiniteMagma { size, unit, table })
    }

    pub fn from_fn(size: usize, unit: usize, op: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let table = (0..size)
            .flat_map(|a| (0..size).map(move |b| (a, b)))
            .map(|(a, b)| op(a, b))
            .collect();
        Self::from_flat(size, unit, table)
    }

    /// The one-element magma.
    pub fn trivial() -> Self {
        FiniteMagma {
            size: 1,
            unit: 0,
            table: vec![0],
        }
    }

    /// Integers modulo `n` under addition.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "cyclic group of order 0");
        Self::from_fn(n, 0, |a, b| (a + b) % n).expect("cyclic table is well formed")
    }

    /// The symmetric group on `n` letters. Permutations are listed in
    /// lexicographic order, so the identity is index 0; `a * b` applies `b`
    /// first.
    pub fn symmetric_group(n: usize) -> Self {
        let perms = permutations(n);
        let index = |p: &[usize]| perms.iter().position(|q| q == p).expect("closed");
        let size = perms.len();
        Self::from_fn(size, 0, |a, b| {
            let composed: Vec<usize> = (0..n).map(|i| perms[a][perms[b][i]]).collect();
            index(&composed)
        })
        .expect("symmetric group table is well formed")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    #[inline]
    pub fn op(&self, a: usize, b: usize) -> usize {
        self.table[a * self.size + b]
    }

    /// Row-major table.
    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table
            .chunks(self.size)
            .map(<[usize]>::to_vec)
            .collect()
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    /// Lists every unit-law violation.
    pub fn verify(&self) -> ValidationReport {
        let mut c = Checker::all();
        self.check_unit_laws(&mut c, "");
        c.finish()
    }

    pub fn is_unitary(&self) -> bool {
        let u = self.unit;
        self.elements()
            .all(|i| self.op(u, i) == i && self.op(i, u) == i)
    }

    pub(crate) fn check_unit_laws(&self, c: &mut Checker, prefix: &str) {
        let u = self.unit;
        for i in self.elements() {
            if self.op(u, i) != i
                && c.fail(
                    Violation::new(format!("{prefix}left-unit"), [i])
                        .with_detail(format!("{u}+{i} = {}", self.op(u, i))),
                )
            {
                return;
            }
            if self.op(i, u) != i
                && c.fail(
                    Violation::new(format!("{prefix}right-unit"), [i])
                        .with_detail(format!("{i}+{u} = {}", self.op(i, u))),
                )
            {
                return;
            }
        }
    }

    pub fn is_associative(&self) -> bool {
        self.associativity_witness().is_none()
    }

    /// First triple with `(a+b)+c != a+(b+c)`.
    pub fn associativity_witness(&self) -> Option<[usize; 3]> {
        let n = self.size;
        for a in 0..n {
            for b in 0..n {
                let ab = self.op(a, b);
                for c in 0..n {
                    if self.op(ab, c) != self.op(a, self.op(b, c)) {
                        return Some([a, b, c]);
                    }
                }
            }
        }
        None
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.size;
        (0..n).all(|a| (a + 1..n).all(|b| self.op(a, b) == self.op(b, a)))
    }

    /// Every right translation `u -> u + b` is a bijection.
    pub fn is_left_loop(&self) -> bool {
        let n = self.size;
        let mut seen = vec![false; n];
        for b in 0..n {
            seen.iter_mut().for_each(|s| *s = false);
            for u in 0..n {
                let x = self.op(u, b);
                if seen[x] {
                    return false;
                }
                seen[x] = true;
            }
        }
        true
    }

    /// Every left translation is a bijection as well as every right one.
    pub fn is_loop(&self) -> bool {
        let n = self.size;
        let left = (0..n).all(|a| {
            let mut seen = vec![false; n];
            (0..n).all(|b| !std::mem::replace(&mut seen[self.op(a, b)], true))
        });
        left && self.is_left_loop()
    }

    pub fn is_medial(&self) -> bool {
        let n = self.size;
        for x in 0..n {
            for y in 0..n {
                let xy = self.op(x, y);
                for z in 0..n {
                    let xz = self.op(x, z);
                    for w in 0..n {
                        if self.op(xy, self.op(z, w)) != self.op(xz, self.op(y, w)) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// The unique `u` with `u + b = x`, when the right translation by `b`
    /// hits `x` exactly once.
    pub fn right_difference(&self, x: usize, b: usize) -> Option<usize> {
        let mut found = None;
        for u in self.elements() {
            if self.op(u, b) == x {
                if found.is_some() {
                    return None;
                }
                found = Some(u);
            }
        }
        found
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// A function between finite carriers, stored as its value sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementMap {
    cod: usize,
    values: Vec<usize>,
}

impl ElementMap {
    pub fn new(cod: usize, values: Vec<usize>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|&v| v >= cod) {
            return Err(Error::structural(format!(
                "map value {} at {pos} out of range for codomain of size {cod}",
                values[pos]
            )));
        }
        Ok(ElementMap { cod, values })
    }

    pub fn from_fn(dom: usize, cod: usize, f: impl Fn(usize) -> usize) -> Result<Self> {
        Self::new(cod, (0..dom).map(f).collect())
    }

    pub fn identity(n: usize) -> Self {
        ElementMap {
            cod: n,
            values: (0..n).collect(),
        }
    }

    pub fn constant(dom: usize, cod: usize, value: usize) -> Result<Self> {
        Self::new(cod, vec![value; dom])
    }

    pub fn dom(&self) -> usize {
        self.values.len()
    }

    pub fn cod(&self) -> usize {
        self.cod
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.values[i]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// `other` after `self`.
    pub fn then(&self, other: &ElementMap) -> Result<ElementMap> {
        if self.cod != other.dom() {
            return Err(Error::structural(format!(
                "cannot compose: codomain {} vs domain {}",
                self.cod,
                other.dom()
            )));
        }
        Ok(ElementMap {
            cod: other.cod,
            values: self.values.iter().map(|&v| other.apply(v)).collect(),
        })
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.cod];
        self.values
            .iter()
            .all(|&v| !std::mem::replace(&mut seen[v], true))
    }

    pub fn is_bijective(&self) -> bool {
        self.dom() == self.cod && self.is_injective()
    }

    pub fn inverse(&self) -> Option<ElementMap> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0; self.cod];
        for (i, &v) in self.values.iter().enumerate() {
            inv[v] = i;
        }
        Some(ElementMap {
            cod: self.dom(),
            values: inv,
        })
    }

    pub(crate) fn expect_shape(&self, dom: usize, cod: usize, name: &str) -> Result<()> {
        if self.dom() != dom || self.cod != cod {
            return Err(Error::structural(format!(
                "{name} has shape {}->{}, expected {dom}->{cod}",
                self.dom(),
                self.cod
            )));
        }
        Ok(())
    }
}

/// Results of the exhaustive structural checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StructureFlags {
    pub associative: bool,
    pub left_loop: bool,
    pub medial: bool,
    pub commutative: bool,
}

/// Checks both unit laws for every element.
pub fn verify_unitary_magma(m: &FiniteMagma) -> ValidationReport {
    m.verify()
}

/// Decides whether `f` is a morphism of unitary magmas `m1 -> m2`.
pub fn check_morphism(
    f: &ElementMap,
    m1: &FiniteMagma,
    m2: &FiniteMagma,
) -> Result<ValidationReport> {
    f.expect_shape(m1.size(), m2.size(), "morphism")?;
    let mut c = Checker::all();
    morphism_scan(f, m1, m2, &mut c, "");
    Ok(c.finish())
}

pub(crate) fn is_morphism(f: &ElementMap, m1: &FiniteMagma, m2: &FiniteMagma) -> bool {
    let mut c = Checker::first_only();
    morphism_scan(f, m1, m2, &mut c, "");
    c.finish().is_valid()
}

pub(crate) fn morphism_scan(
    f: &ElementMap,
    m1: &FiniteMagma,
    m2: &FiniteMagma,
    c: &mut Checker,
    prefix: &str,
) {
    if f.apply(m1.unit()) != m2.unit()
        && c.fail(
            Violation::new(format!("{prefix}preserves-unit"), [m1.unit()])
                .with_detail(format!("maps unit to {}", f.apply(m1.unit()))),
        )
    {
        return;
    }
    for a in m1.elements() {
        for b in m1.elements() {
            let lhs = f.apply(m1.op(a, b));
            let rhs = m2.op(f.apply(a), f.apply(b));
            if lhs != rhs
                && c.fail(
                    Violation::new(format!("{prefix}preserves-op"), [a, b])
                        .with_detail(format!("f(a+b) = {lhs}, f(a)+f(b) = {rhs}")),
                )
            {
                return;
            }
        }
    }
}

pub fn classify_properties(m: &FiniteMagma) -> StructureFlags {
    StructureFlags {
        associative: m.is_associative(),
        left_loop: m.is_left_loop(),
        medial: m.is_medial(),
        commutative: m.is_commutative(),
    }
}

/// Componentwise product; the pair `(i, j)` is encoded as `i * m2.size() + j`.
pub fn direct_product(m1: &FiniteMagma, m2: &FiniteMagma) -> FiniteMagma {
    let n2 = m2.size();
    FiniteMagma::from_fn(m1.size() * n2, m1.unit() * n2 + m2.unit(), |a, b| {
        m1.op(a / n2, b / n2) * n2 + m2.op(a % n2, b % n2)
    })
    .expect("product of well-formed tables is well formed")
}

/// Index of the `0` pole in [`adjoin_poles`] output built from `x`.
pub fn zero_pole(x: &FiniteMagma) -> usize {
    x.size()
}

/// Index of the `∞` pole in [`adjoin_poles`] output built from `x`.
pub fn infinity_pole(x: &FiniteMagma) -> usize {
    x.size() + 1
}

/// Extends `(X, ·, 1)` to `X ⊔ {0, ∞}`.
///
/// Inside `X` the old product is kept. Each pole absorbs every element of
/// `X` and itself, while `0·∞ = ∞·0 = 1`. Indices `0..n` are `X`, then `n` is
/// `0` and `n + 1` is `∞`.
pub fn adjoin_poles(x: &FiniteMagma) -> FiniteMagma {
    let n = x.size();
    FiniteMagma::from_fn(n + 2, x.unit(), |a, b| match (a < n, b < n) {
        (true, true) => x.op(a, b),
        (false, true) => a,
        (true, false) => b,
        (false, false) if a == b => a,
        (false, false) => x.unit(),
    })
    .expect("adjoined table is well formed")
}

/// Number of tables [`enumerate_magmas`] yields for size `n`.
pub fn magma_count(n: usize) -> Option<u64> {
    let free = (n.checked_sub(1)?).pow(2) as u32;
    (n as u64).checked_pow(free)
}

/// Decodes the `index`-th table of size `n` in enumeration order.
pub fn magma_at(n: usize, index: u64) -> FiniteMagma {
    let free = (n - 1) * (n - 1);
    let mut table = vec![0; n * n];
    for i in 0..n {
        table[i] = i;
        table[i * n] = i;
    }
    let mut rest = index;
    for slot in (0..free).rev() {
        let (r, c) = (slot / (n - 1) + 1, slot % (n - 1) + 1);
        table[r * n + c] = (rest % n as u64) as usize;
        rest /= n as u64;
    }
    FiniteMagma {
        size: n,
        unit: 0,
        table,
    }
}

/// Every unitary magma on `{0..n}` with unit 0.
///
/// The `(n-1)^2` entries outside the unit row and column are free; tables
/// come out in lexicographic order of those entries read row by row.
pub fn enumerate_magmas(n: usize) -> Result<MagmaEnumerator> {
    if n == 0 {
        return Err(Error::structural("cannot enumerate magmas of size 0"));
    }
    let count = magma_count(n)
        .ok_or_else(|| Error::structural(format!("magma count overflows for size {n}")))?;
    Ok(MagmaEnumerator { n, next: 0, count })
}

#[derive(Debug, Clone)]
pub struct MagmaEnumerator {
    n: usize,
    next: u64,
    count: u64,
}

impl MagmaEnumerator {
    pub fn total(&self) -> u64 {
        self.count
    }
}

impl Iterator for MagmaEnumerator {
    type Item = FiniteMagma;

    fn next(&mut self) -> Option<FiniteMagma> {
        if self.next >= self.count {
            return None;
        }
        let m = magma_at(self.n, self.next);
        self.next += 1;
        Some(m)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.count - self.next) as usize;
        (left, Some(left))
    }

    fn nth(&mut self, k: usize) -> Option<FiniteMagma> {
        self.next = self.next.saturating_add(k as u64);
        self.next()
    }
}

impl ExactSizeIterator for MagmaEnumerator {}

/// The first loop of order `n` (unit 0, rows filled in index order) that is
/// not associative. There is none below order 5.
pub fn find_nonassociative_loop(n: usize) -> Option<FiniteMagma> {
    if n == 0 {
        return None;
    }
    // Row 0 and column 0 are fixed by the unit laws.
    let mut table = vec![usize::MAX; n * n];
    for i in 0..n {
        table[i] = i;
        table[i * n] = i;
    }
    fn go(n: usize, cell: usize, table: &mut [usize]) -> Option<FiniteMagma> {
        if cell >= n * n {
            let m = FiniteMagma::from_flat(n, 0, table.to_vec()).ok()?;
            return (!m.is_associative()).then_some(m);
        }
        let (r, c) = (cell / n, cell % n);
        if r == 0 || c == 0 {
            return go(n, cell + 1, table);
        }
        for v in 0..n {
            let row_clash = (0..c).any(|j| table[r * n + j] == v);
            let col_clash = (0..r).any(|i| table[i * n + c] == v);
            if row_clash || col_clash {
                continue;
            }
            table[cell] = v;
            if let Some(m) = go(n, cell + 1, table) {
                return Some(m);
            }
        }
        table[cell] = usize::MAX;
        None
    }
    go(n, n + 1, &mut table)
}

/// Searches for a unit-preserving bijective morphism `m1 -> m2`.
pub fn find_isomorphism(m1: &FiniteMagma, m2: &FiniteMagma) -> Option<ElementMap> {
    let n = m1.size();
    if n != m2.size() {
        return None;
    }
    // Unit first, then the rest in index order.
    let order: Vec<usize> = std::iter::once(m1.unit())
        .chain(m1.elements().filter(|&i| i != m1.unit()))
        .collect();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    image[m1.unit()] = m2.unit();
    used[m2.unit()] = true;

    fn consistent(m1: &FiniteMagma, m2: &FiniteMagma, image: &[usize], last: usize) -> bool {
        // `last` may be a factor or the product, so every assigned triple is rechecked.
        let assigned = |i: usize| image[i] != usize::MAX;
        for a in m1.elements().filter(|&a| assigned(a)) {
            for b in m1.elements().filter(|&b| assigned(b)) {
                let ab = m1.op(a, b);
                if (a == last || b == last || ab == last)
                    && assigned(ab)
                    && image[ab] != m2.op(image[a], image[b])
                {
                    return false;
                }
            }
        }
        true
    }

    fn go(
        depth: usize,
        order: &[usize],
        m1: &FiniteMagma,
        m2: &FiniteMagma,
        image: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let e = order[depth];
        for t in m2.elements() {
            if used[t] {
                continue;
            }
            image[e] = t;
            used[t] = true;
            if consistent(m1, m2, image, e) && go(depth + 1, order, m1, m2, image, used) {
                return true;
            }
            used[t] = false;
            image[e] = usize::MAX;
        }
        false
    }

    if !consistent(m1, m2, &image, m1.unit()) {
        return None;
    }
    if go(1, &order, m1, m2, &mut image, &mut used) {
        Some(ElementMap {
            cod: n,
            values: image,
        })
    } else {
        None
    }
}
