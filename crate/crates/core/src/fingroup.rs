//! Exact arithmetic and structure enumeration for small finite groups.
//!
//! A [`FiniteGroup`] is a complete multiplication table over element indices
//! `0..order`, with the identity normalized to index `0`. Construction helpers
//! cover the witness catalog (cyclic, symmetric, dihedral, quaternion,
//! alternating, direct products, permutation closures, raw tables); structure
//! enumeration covers the full subgroup lattice and the automorphism group at
//! desk scale.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest order accepted for any constructed group.
pub const MAX_ORDER: usize = 10_000;
/// Largest order for which `all_subgroups` runs.
pub const MAX_SUBGROUP_ORDER: usize = 128;
/// Largest order for which `automorphisms` runs.
pub const MAX_AUT_ORDER: usize = 64;

/// An exact finite group: element set `0..order`, total multiplication
/// table, identity at index 0, inverse table, and an optional faithful
/// permutation realization (one image array per element).
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    mul: Vec<u16>,
    inv: Vec<u16>,
    perm_realization: Option<Vec<Vec<u16>>>,
}

impl FiniteGroup {
    fn from_parts(
        name: String,
        order: usize,
        mul: Vec<u16>,
        perm_realization: Option<Vec<Vec<u16>>>,
    ) -> Result<Self> {
        let mut g = FiniteGroup {
            name,
            order,
            mul,
            inv: Vec::new(),
            perm_realization,
        };
        g.inv = g.compute_inverses()?;
        Ok(g)
    }

    /// Builds a group from a raw multiplication table, relabelling so the
    /// identity lands at index 0, and validates the axioms exhaustively.
    pub fn from_table(name: impl Into<String>, table: &[Vec<u16>]) -> Result<Self> {
        let order = table.len();
        if order == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if order > 256 {
            return Err(Error::Bound(format!(
                "table groups are limited to order 256, got {order}"
            )));
        }
        for row in table {
            if row.len() != order {
                return Err(Error::InvalidGroup("table is not square".into()));
            }
            if row.iter().any(|&x| usize::from(x) >= order) {
                return Err(Error::InvalidGroup("table entry out of range".into()));
            }
        }
        // locate the two-sided identity
        let identity = (0..order)
            .find(|&e| {
                (0..order).all(|x| {
                    usize::from(table[e][x]) == x && usize::from(table[x][e]) == x
                })
            })
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let mut sigma: Vec<u16> = (0..order as u16).collect();
        sigma.swap(0, identity);
        // sigma is an involution, so it is its own inverse relabelling
        let mut mul = vec![0u16; order * order];
        for x in 0..order {
            for y in 0..order {
                let raw = table[usize::from(sigma[x])][usize::from(sigma[y])];
                let pos = sigma.iter().position(|&s| s == raw).unwrap();
                mul[x * order + y] = pos as u16;
            }
        }
        let g = FiniteGroup::from_parts(name.into(), order, mul, None)?;
        g.validate()?;
        Ok(g)
    }

    fn compute_inverses(&self) -> Result<Vec<u16>> {
        let n = self.order;
        (0..n)
            .map(|x| {
                (0..n)
                    .find(|&y| self.mul[x * n + y] == 0 && self.mul[y * n + x] == 0)
                    .map(|y| y as u16)
                    .ok_or_else(|| {
                        Error::InvalidGroup(format!("element {x} has no two-sided inverse"))
                    })
            })
            .collect()
    }

    /// Exhaustive check of the group axioms; associativity is cubic and
    /// therefore restricted to order <= 256.
    pub fn validate(&self) -> Result<()> {
        let n = self.order;
        for x in 0..n {
            if usize::from(self.mul(0, x as u16)) != x || usize::from(self.mul(x as u16, 0)) != x {
                return Err(Error::InvalidGroup(format!("identity law fails at {x}")));
            }
            if self.mul(x as u16, self.inv(x as u16)) != 0 {
                return Err(Error::InvalidGroup(format!("inverse law fails at {x}")));
            }
        }
        if n <= 256 {
            for a in 0..n as u16 {
                for b in 0..n as u16 {
                    let ab = self.mul(a, b);
                    for c in 0..n as u16 {
                        if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                            return Err(Error::InvalidGroup(format!(
                                "associativity fails at ({a},{b},{c})"
                            )));
                        }
                    }
                }
            }
        }
        if let Some(perms) = &self.perm_realization {
            if perms.len() != n {
                return Err(Error::InvalidGroup(
                    "permutation realization has wrong length".into(),
                ));
            }
            let mut seen = HashSet::new();
            for (x, p) in perms.iter().enumerate() {
                if !seen.insert(p.clone()) {
                    return Err(Error::InvalidGroup(format!(
                        "permutation realization not faithful at {x}"
                    )));
                }
            }
            for a in 0..n as u16 {
                for b in 0..n as u16 {
                    let lhs = &perms[usize::from(self.mul(a, b))];
                    let rhs = compose(&perms[usize::from(a)], &perms[usize::from(b)]);
                    if *lhs != rhs {
                        return Err(Error::InvalidGroup(format!(
                            "permutation realization is not a homomorphism at ({a},{b})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[usize::from(a) * self.order + usize::from(b)]
    }

    #[inline]
    pub fn inv(&self, a: u16) -> u16 {
        self.inv[usize::from(a)]
    }

    pub fn perm_realization(&self) -> Option<&[Vec<u16>]> {
        self.perm_realization.as_deref()
    }

    /// Number of fixed points of an element's permutation realization.
    pub fn fixed_points(&self, a: u16) -> Option<usize> {
        self.perm_realization.as_ref().map(|perms| {
            perms[usize::from(a)]
                .iter()
                .enumerate()
                .filter(|&(i, &img)| usize::from(img) == i)
                .count()
        })
    }

    /// Multiplicative order of an element.
    pub fn element_order(&self, a: u16) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Closure of a generating set, as a sorted element list.
    pub fn closure(&self, gens: &[u16]) -> Vec<u16> {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut out = vec![0u16];
        let mut queue: VecDeque<u16> = VecDeque::new();
        queue.push_back(0);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[usize::from(y)] {
                    seen[usize::from(y)] = true;
                    out.push(y);
                    queue.push_back(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Greedy minimal generating set: scan elements in index order, keep
    /// those that enlarge the closure, then drop redundant members.
    pub fn minimal_generating_set(&self) -> Vec<u16> {
        let mut gens: Vec<u16> = Vec::new();
        let mut cl = self.closure(&gens);
        for x in 1..self.order as u16 {
            if cl.binary_search(&x).is_err() {
                gens.push(x);
                cl = self.closure(&gens);
                if cl.len() == self.order {
                    break;
                }
            }
        }
        let mut i = 0;
        while i < gens.len() {
            let mut trial = gens.clone();
            trial.remove(i);
            if self.closure(&trial).len() == self.order {
                gens = trial;
            } else {
                i += 1;
            }
        }
        gens
    }

    /// Shortest positive words over `gens` reaching every element (BFS from
    /// the identity, generators tried in slice order). Entry `k` lists the
    /// positions into `gens` whose product is element `k`. Returns `None`
    /// when `gens` does not generate.
    pub fn bfs_words(&self, gens: &[u16]) -> Option<Vec<Vec<usize>>> {
        let mut words: Vec<Option<Vec<usize>>> = vec![None; self.order];
        words[0] = Some(Vec::new());
        let mut queue: VecDeque<u16> = VecDeque::new();
        queue.push_back(0);
        let mut reached = 1;
        while let Some(x) = queue.pop_front() {
            for (pos, &g) in gens.iter().enumerate() {
                let y = self.mul(x, g);
                if words[usize::from(y)].is_none() {
                    let mut w = words[usize::from(x)].clone().unwrap();
                    w.push(pos);
                    words[usize::from(y)] = Some(w);
                    reached += 1;
                    queue.push_back(y);
                }
            }
        }
        if reached == self.order {
            Some(words.into_iter().map(|w| w.unwrap()).collect())
        } else {
            None
        }
    }

    /// Relabels the elements by `sigma` (which must fix 0), preserving the
    /// group structure: the new product of `sigma(x)`, `sigma(y)` is
    /// `sigma(xy)`.
    pub fn relabel(&self, sigma: &[u16]) -> Result<FiniteGroup> {
        if sigma.len() != self.order || sigma[0] != 0 {
            return Err(Error::InvalidGroup(
                "relabelling must be a permutation fixing 0".into(),
            ));
        }
        let n = self.order;
        let mut sigma_inv = vec![0u16; n];
        for (x, &s) in sigma.iter().enumerate() {
            sigma_inv[usize::from(s)] = x as u16;
        }
        let mut mul = vec![0u16; n * n];
        for x in 0..n {
            for y in 0..n {
                let a = sigma_inv[x];
                let b = sigma_inv[y];
                mul[x * n + y] = sigma[usize::from(self.mul(a, b))];
            }
        }
        FiniteGroup::from_parts(format!("{}-relabelled", self.name), n, mul, None)
    }

    /// All homomorphisms into `target`, as full element maps, in
    /// lexicographic order of generator images.
    pub fn homs_to(&self, target: &FiniteGroup) -> Vec<Vec<u16>> {
        self.maps_to(target, false)
    }

    /// All isomorphisms onto `target` (empty when none exists).
    pub fn isomorphisms_onto(&self, target: &FiniteGroup) -> Vec<Vec<u16>> {
        if self.order != target.order {
            return Vec::new();
        }
        self.maps_to(target, true)
    }

    fn maps_to(&self, target: &FiniteGroup, bijective: bool) -> Vec<Vec<u16>> {
        let gens = self.minimal_generating_set();
        let words = self
            .bfs_words(&gens)
            .expect("minimal generating set generates");
        let mut candidates: Vec<Vec<u16>> = Vec::new();
        for &g in &gens {
            let ord = self.element_order(g);
            let opts: Vec<u16> = (0..target.order as u16)
                .filter(|&t| {
                    let t_ord = target.element_order(t);
                    if bijective {
                        t_ord == ord
                    } else {
                        ord.is_multiple_of(t_ord)
                    }
                })
                .collect();
            candidates.push(opts);
        }
        let mut found = Vec::new();
        let mut images = vec![0u16; gens.len()];
        self.search_maps(target, &words, &candidates, &mut images, 0, bijective, &mut found);
        found
    }

    #[allow(clippy::too_many_arguments)]
    fn search_maps(
        &self,
        target: &FiniteGroup,
        words: &[Vec<usize>],
        candidates: &[Vec<u16>],
        images: &mut Vec<u16>,
        depth: usize,
        bijective: bool,
        found: &mut Vec<Vec<u16>>,
    ) {
        if depth == candidates.len() {
            let map: Vec<u16> = words
                .iter()
                .map(|w| {
                    w.iter()
                        .fold(0u16, |acc, &pos| target.mul(acc, images[pos]))
                })
                .collect();
            if bijective {
                let mut seen = vec![false; target.order];
                for &m in &map {
                    if seen[usize::from(m)] {
                        return;
                    }
                    seen[usize::from(m)] = true;
                }
            }
            for a in 0..self.order as u16 {
                for b in 0..self.order as u16 {
                    let lhs = map[usize::from(self.mul(a, b))];
                    let rhs = target.mul(map[usize::from(a)], map[usize::from(b)]);
                    if lhs != rhs {
                        return;
                    }
                }
            }
            found.push(map);
            return;
        }
        for &c in &candidates[depth] {
            images[depth] = c;
            self.search_maps(target, words, candidates, images, depth + 1, bijective, found);
        }
    }

    /// Whether the two groups are isomorphic (backtracking over generator
    /// images; intended for small orders).
    pub fn is_isomorphic(&self, other: &FiniteGroup) -> bool {
        !self.isomorphisms_onto(other).is_empty()
    }
}

fn compose(p: &[u16], q: &[u16]) -> Vec<u16> {
    q.iter().map(|&i| p[usize::from(i)]).collect()
}

/// Cyclic group of order `n`, elements as residues, `i * j = (i + j) mod n`.
pub fn make_cyclic(n: usize) -> Result<FiniteGroup> {
    if n == 0 || n > 256 {
        return Err(Error::Bound(format!("cyclic order {n} not in 1..=256")));
    }
    let mut mul = vec![0u16; n * n];
    for i in 0..n {
        for j in 0..n {
            mul[i * n + j] = ((i + j) % n) as u16;
        }
    }
    FiniteGroup::from_parts(format!("cyclic-{n}"), n, mul, None)
}

fn permutations_lex(n: usize) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    let mut cur: Vec<u16> = (0..n as u16).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

fn group_from_perms(name: String, perms: Vec<Vec<u16>>) -> Result<FiniteGroup> {
    let order = perms.len();
    let index: HashMap<Vec<u16>, u16> = perms
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i as u16))
        .collect();
    let mut mul = vec![0u16; order * order];
    for a in 0..order {
        for b in 0..order {
            let prod = compose(&perms[a], &perms[b]);
            let idx = *index
                .get(&prod)
                .ok_or_else(|| Error::InvalidGroup("permutation set not closed".into()))?;
            mul[a * order + b] = idx;
        }
    }
    FiniteGroup::from_parts(name, order, mul, Some(perms))
}

/// Symmetric group on `n` letters with its permutation realization, elements
/// in lexicographic order of image arrays (identity first).
pub fn make_symmetric(n: usize) -> Result<FiniteGroup> {
    if n == 0 || n > 7 {
        return Err(Error::Bound(format!("symmetric degree {n} not in 1..=7")));
    }
    group_from_perms(format!("symmetric-{n}"), permutations_lex(n))
}

fn parity_even(p: &[u16]) -> bool {
    let mut inversions = 0usize;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    inversions.is_multiple_of(2)
}

/// Alternating group on `n` letters (even permutations, lexicographic).
pub fn make_alternating(n: usize) -> Result<FiniteGroup> {
    if n == 0 || n > 7 {
        return Err(Error::Bound(format!("alternating degree {n} not in 1..=7")));
    }
    let perms: Vec<Vec<u16>> = permutations_lex(n)
        .into_iter()
        .filter(|p| parity_even(p))
        .collect();
    group_from_perms(format!("alternating-{n}"), perms)
}

/// Dihedral group of order `2n`: element `i + n*j` is the rotation `r^i`
/// composed with `j` reflections, `s r = r^{-1} s`.
pub fn make_dihedral(n: usize) -> Result<FiniteGroup> {
    if n == 0 || 2 * n > MAX_ORDER {
        return Err(Error::Bound(format!("dihedral parameter {n} out of range")));
    }
    let order = 2 * n;
    let mut mul = vec![0u16; order * order];
    for a in 0..n {
        for e in 0..2 {
            for b in 0..n {
                for f in 0..2 {
                    let rot = if e == 0 { (a + b) % n } else { (a + n - b % n) % n };
                    let refl = (e + f) % 2;
                    mul[(a + n * e) * order + (b + n * f)] = (rot + n * refl) as u16;
                }
            }
        }
    }
    FiniteGroup::from_parts(format!("dihedral-{n}"), order, mul, None)
}

/// Quaternion group of order 8. Index `axis + 4*sign` with axes
/// `1, i, j, k` and sign bit for negation.
pub fn make_quaternion8() -> Result<FiniteGroup> {
    // axis multiplication: entry (a,b) -> (sign, axis)
    const AX: [[(u16, u16); 4]; 4] = [
        [(0, 0), (0, 1), (0, 2), (0, 3)],
        [(0, 1), (1, 0), (0, 3), (1, 2)],
        [(0, 2), (1, 3), (1, 0), (0, 1)],
        [(0, 3), (0, 2), (1, 1), (1, 0)],
    ];
    let order = 8;
    let mut mul = vec![0u16; order * order];
    for s1 in 0..2u16 {
        for a1 in 0..4u16 {
            for s2 in 0..2u16 {
                for a2 in 0..4u16 {
                    let (s3, a3) = AX[usize::from(a1)][usize::from(a2)];
                    let sign = s1 ^ s2 ^ s3;
                    mul[usize::from(a1 + 4 * s1) * order + usize::from(a2 + 4 * s2)] =
                        a3 + 4 * sign;
                }
            }
        }
    }
    let g = FiniteGroup::from_parts("quaternion8".into(), order, mul, None)?;
    g.validate()?;
    Ok(g)
}

/// Direct product, element `(a, b)` at index `a * |B| + b`.
pub fn make_product(a: &FiniteGroup, b: &FiniteGroup) -> Result<FiniteGroup> {
    let order = a.order() * b.order();
    if order > MAX_ORDER {
        return Err(Error::Bound(format!(
            "product order {order} exceeds {MAX_ORDER}"
        )));
    }
    let nb = b.order();
    let mut mul = vec![0u16; order * order];
    for a1 in 0..a.order() as u16 {
        for b1 in 0..nb as u16 {
            for a2 in 0..a.order() as u16 {
                for b2 in 0..nb as u16 {
                    let x = usize::from(a1) * nb + usize::from(b1);
                    let y = usize::from(a2) * nb + usize::from(b2);
                    mul[x * order + y] =
                        a.mul(a1, a2) * nb as u16 + b.mul(b1, b2);
                }
            }
        }
    }
    FiniteGroup::from_parts(format!("{}x{}", a.name(), b.name()), order, mul, None)
}

/// Closes a set of permutations of `0..degree` under composition
/// (Dimino-style breadth-first closure) and returns the generated group.
pub fn from_permutations(degree: usize, generators: &[Vec<u16>]) -> Result<FiniteGroup> {
    for g in generators {
        let mut seen = vec![false; degree];
        if g.len() != degree {
            return Err(Error::InvalidGroup("generator has wrong degree".into()));
        }
        for &img in g {
            if usize::from(img) >= degree || seen[usize::from(img)] {
                return Err(Error::InvalidGroup("generator is not a permutation".into()));
            }
            seen[usize::from(img)] = true;
        }
    }
    let identity: Vec<u16> = (0..degree as u16).collect();
    let mut elements = vec![identity.clone()];
    let mut index: HashMap<Vec<u16>, u16> = HashMap::new();
    index.insert(identity, 0);
    let mut queue: VecDeque<usize> = VecDeque::new();
    queue.push_back(0);
    while let Some(i) = queue.pop_front() {
        for g in generators {
            let prod = compose(&elements[i], g);
            if !index.contains_key(&prod) {
                if elements.len() == MAX_ORDER {
                    return Err(Error::Bound(format!(
                        "permutation closure exceeds {MAX_ORDER}"
                    )));
                }
                index.insert(prod.clone(), elements.len() as u16);
                elements.push(prod);
                queue.push_back(elements.len() - 1);
            }
        }
    }
    let order = elements.len();
    group_from_perms(format!("perm-{degree}-{order}"), elements)
}

/// A subgroup of a parent group, stored as a sorted element list.
#[derive(Clone, Debug)]
pub struct Subgroup<'g> {
    parent: &'g FiniteGroup,
    elements: Vec<u16>,
}

impl<'g> PartialEq for Subgroup<'g> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.parent, other.parent) && self.elements == other.elements
    }
}
impl<'g> Eq for Subgroup<'g> {}

impl<'g> Subgroup<'g> {
    /// Validates closure under multiplication and inverse, and membership
    /// of the identity.
    pub fn new(parent: &'g FiniteGroup, mut elements: Vec<u16>) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        if elements.binary_search(&0).is_err() {
            return Err(Error::InvalidGroup("subgroup must contain identity".into()));
        }
        for &x in &elements {
            if usize::from(x) >= parent.order() {
                return Err(Error::InvalidGroup("subgroup element out of range".into()));
            }
            if elements.binary_search(&parent.inv(x)).is_err() {
                return Err(Error::InvalidGroup("subgroup not closed under inverse".into()));
            }
            for &y in &elements {
                if elements.binary_search(&parent.mul(x, y)).is_err() {
                    return Err(Error::InvalidGroup(
                        "subgroup not closed under multiplication".into(),
                    ));
                }
            }
        }
        Ok(Subgroup { parent, elements })
    }

    /// Subgroup generated by the given elements.
    pub fn generated(parent: &'g FiniteGroup, gens: &[u16]) -> Self {
        Subgroup {
            parent,
            elements: parent.closure(gens),
        }
    }

    pub fn whole(parent: &'g FiniteGroup) -> Self {
        Subgroup {
            parent,
            elements: (0..parent.order() as u16).collect(),
        }
    }

    pub fn trivial(parent: &'g FiniteGroup) -> Self {
        Subgroup {
            parent,
            elements: vec![0],
        }
    }

    pub fn parent(&self) -> &'g FiniteGroup {
        self.parent
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[u16] {
        &self.elements
    }

    pub fn contains(&self, x: u16) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    /// Position of a parent element within this subgroup's element list.
    pub fn index_of(&self, x: u16) -> Option<usize> {
        self.elements.binary_search(&x).ok()
    }

    /// Reindexes the subgroup as a standalone group. Element `k` of the
    /// result is `self.elements()[k]`; the identity stays at 0 because the
    /// element list is sorted and contains 0.
    pub fn to_group(&self) -> Result<FiniteGroup> {
        let n = self.elements.len();
        let mut mul = vec![0u16; n * n];
        for (i, &x) in self.elements.iter().enumerate() {
            for (j, &y) in self.elements.iter().enumerate() {
                let prod = self.parent.mul(x, y);
                let k = self
                    .index_of(prod)
                    .ok_or_else(|| Error::InvalidGroup("subgroup not closed".into()))?;
                mul[i * n + j] = k as u16;
            }
        }
        FiniteGroup::from_parts(
            format!("{}-sub{}", self.parent.name(), n),
            n,
            mul,
            None,
        )
    }
}

/// An isomorphism between two subgroups of a common parent. `map[i]` is the
/// parent index of the image of `source.elements()[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteIso<'g> {
    pub source: Subgroup<'g>,
    pub target: Subgroup<'g>,
    map: Vec<u16>,
}

impl<'g> FiniteIso<'g> {
    pub fn new(source: Subgroup<'g>, target: Subgroup<'g>, map: Vec<u16>) -> Result<Self> {
        let iso = FiniteIso { source, target, map };
        iso.validate()?;
        Ok(iso)
    }

    pub fn identity(sub: Subgroup<'g>) -> Self {
        let map = sub.elements().to_vec();
        FiniteIso {
            source: sub.clone(),
            target: sub,
            map,
        }
    }

    /// Image of a parent element of the source, if it lies in the source.
    pub fn apply(&self, x: u16) -> Option<u16> {
        self.source.index_of(x).map(|i| self.map[i])
    }

    pub fn map(&self) -> &[u16] {
        &self.map
    }

    /// Checks bijectivity onto the target and the multiplication law.
    pub fn validate(&self) -> Result<()> {
        if self.map.len() != self.source.order() || self.source.order() != self.target.order() {
            return Err(Error::NotAHomomorphism("size mismatch".into()));
        }
        let mut seen = HashSet::new();
        for &m in &self.map {
            if !self.target.contains(m) || !seen.insert(m) {
                return Err(Error::NotAHomomorphism(
                    "map is not a bijection onto the target".into(),
                ));
            }
        }
        let p = self.source.parent();
        for &x in self.source.elements() {
            for &y in self.source.elements() {
                let lhs = self.apply(p.mul(x, y)).unwrap();
                let rhs = p.mul(self.apply(x).unwrap(), self.apply(y).unwrap());
                if lhs != rhs {
                    return Err(Error::NotAHomomorphism(format!(
                        "multiplication not preserved at ({x},{y})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Composition `other . self` for automorphisms of the whole group.
    pub fn compose(&self, other: &FiniteIso<'g>) -> Result<FiniteIso<'g>> {
        let map: Vec<u16> = self
            .source
            .elements()
            .iter()
            .map(|&x| other.apply(self.apply(x).unwrap()).unwrap())
            .collect();
        FiniteIso::new(self.source.clone(), other.target.clone(), map)
    }
}

/// Every subgroup of `p`, exactly once, sorted by order then element list.
/// Subgroups are discovered by closing incrementally grown generating sets.
pub fn all_subgroups(p: &FiniteGroup) -> Result<Vec<Subgroup<'_>>> {
    if p.order() > MAX_SUBGROUP_ORDER {
        return Err(Error::Bound(format!(
            "subgroup lattice is limited to order {MAX_SUBGROUP_ORDER}, got {}",
            p.order()
        )));
    }
    let mask_of = |elements: &[u16]| -> u128 {
        elements.iter().fold(0u128, |m, &x| m | (1u128 << x))
    };
    let trivial = vec![0u16];
    let mut seen: HashSet<u128> = HashSet::new();
    seen.insert(mask_of(&trivial));
    let mut queue: VecDeque<Vec<u16>> = VecDeque::new();
    queue.push_back(trivial.clone());
    let mut found: Vec<Vec<u16>> = vec![trivial];
    while let Some(sub) = queue.pop_front() {
        for g in 0..p.order() as u16 {
            if sub.binary_search(&g).is_ok() {
                continue;
            }
            let mut gens = sub.clone();
            gens.push(g);
            let closed = p.closure(&gens);
            if seen.insert(mask_of(&closed)) {
                found.push(closed.clone());
                queue.push_back(closed);
            }
        }
    }
    found.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    found
        .into_iter()
        .map(|elements| Subgroup::new(p, elements))
        .collect()
}

/// All automorphisms of `p`, in lexicographic order of generator images.
pub fn automorphisms(p: &FiniteGroup) -> Result<Vec<FiniteIso<'_>>> {
    if p.order() > MAX_AUT_ORDER {
        return Err(Error::Bound(format!(
            "automorphism enumeration is limited to order {MAX_AUT_ORDER}, got {}",
            p.order()
        )));
    }
    let maps = p.isomorphisms_onto(p);
    maps.into_iter()
        .map(|map| FiniteIso::new(Subgroup::whole(p), Subgroup::whole(p), map))
        .collect()
}

/// All isomorphisms from `h1` onto `h2` (subgroups of a common parent).
pub fn subgroup_isomorphisms<'g>(
    h1: &Subgroup<'g>,
    h2: &Subgroup<'g>,
) -> Result<Vec<FiniteIso<'g>>> {
    if h1.order() != h2.order() {
        return Ok(Vec::new());
    }
    let g1 = h1.to_group()?;
    let g2 = h2.to_group()?;
    let maps = g1.isomorphisms_onto(&g2);
    maps.into_iter()
        .map(|map| {
            let parent_map: Vec<u16> = map
                .iter()
                .map(|&sub_idx| h2.elements()[usize::from(sub_idx)])
                .collect();
            FiniteIso::new(h1.clone(), h2.clone(), parent_map)
        })
        .collect()
}

/// JSON descriptor for constructing a witness group.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupDescriptor {
    Cyclic { n: usize },
    Symmetric { n: usize },
    Dihedral { n: usize },
    Quaternion8,
    Alternating { n: usize },
    Product { factors: Vec<GroupDescriptor> },
    Table { table: Vec<Vec<u16>> },
    Perm { degree: usize, generators: Vec<Vec<u16>> },
}

impl GroupDescriptor {
    pub fn build(&self) -> Result<FiniteGroup> {
        match self {
            GroupDescriptor::Cyclic { n } => make_cyclic(*n),
            GroupDescriptor::Symmetric { n } => make_symmetric(*n),
            GroupDescriptor::Dihedral { n } => make_dihedral(*n),
            GroupDescriptor::Quaternion8 => make_quaternion8(),
            GroupDescriptor::Alternating { n } => make_alternating(*n),
            GroupDescriptor::Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::InvalidGroup("empty product".into()));
                }
                let mut acc = factors[0].build()?;
                for f in &factors[1..] {
                    acc = make_product(&acc, &f.build()?)?;
                }
                Ok(acc)
            }
            GroupDescriptor::Table { table } => FiniteGroup::from_table("table", table),
            GroupDescriptor::Perm { degree, generators } => from_permutations(*degree, generators),
        }
    }
}

/// The default witness catalog: all orders <= 24, abelian and non-abelian
/// families mixed, sorted by order then name. Scans walk it in this order.
pub fn default_catalog() -> Vec<FiniteGroup> {
    let c2 = make_cyclic(2).unwrap();
    let mut groups = vec![
        make_cyclic(2).unwrap(),
        make_cyclic(3).unwrap(),
        make_cyclic(4).unwrap(),
        make_cyclic(5).unwrap(),
        make_cyclic(6).unwrap(),
        make_product(&c2, &c2).unwrap(),
        make_symmetric(3).unwrap(),
        make_dihedral(4).unwrap(),
        make_quaternion8().unwrap(),
        make_alternating(4).unwrap(),
        make_symmetric(4).unwrap(),
    ];
    sort_catalog(&mut groups);
    groups
}

/// Canonical witness order: ascending group order, ties by name.
pub fn sort_catalog(groups: &mut [FiniteGroup]) {
    groups.sort_by(|a, b| {
        a.order()
            .cmp(&b.order())
            .then_with(|| a.name().cmp(b.name()))
    });
}

/// Builds a catalog group from its canonical name, e.g. `cyclic-6`,
/// `symmetric-4`, `quaternion8`, or `cyclic-2xcyclic-2`.
pub fn group_by_name(name: &str) -> Result<FiniteGroup> {
    if name.contains('x') {
        let mut acc: Option<FiniteGroup> = None;
        for part in name.split('x') {
            let g = group_by_name(part)?;
            acc = Some(match acc {
                None => g,
                Some(a) => make_product(&a, &g)?,
            });
        }
        return acc.ok_or_else(|| Error::InvalidGroup(format!("bad group name {name:?}")));
    }
    if name == "quaternion8" {
        return make_quaternion8();
    }
    let (family, n) = name
        .rsplit_once('-')
        .ok_or_else(|| Error::InvalidGroup(format!("unknown group name {name:?}")))?;
    let n: usize = n
        .parse()
        .map_err(|_| Error::InvalidGroup(format!("bad order in group name {name:?}")))?;
    match family {
        "cyclic" => make_cyclic(n),
        "symmetric" => make_symmetric(n),
        "dihedral" => make_dihedral(n),
        "alternating" => make_alternating(n),
        _ => Err(Error::InvalidGroup(format!("unknown group family {family:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    #[test]
    fn cyclic_small_tables() {
        let c1 = make_cyclic(1).unwrap();
        assert_eq!(c1.order(), 1);
        let c2 = make_cyclic(2).unwrap();
        assert_eq!(c2.order(), 2);
        assert_eq!(c2.mul(0, 1), 1);
        assert_eq!(c2.mul(1, 1), 0);
        assert!(make_cyclic(0).is_err());
        assert!(make_cyclic(257).is_err());
    }

    #[test]
    fn cyclic6_is_product_of_c2_c3() {
        let c6 = make_cyclic(6).unwrap();
        let p = make_product(&make_cyclic(2).unwrap(), &make_cyclic(3).unwrap()).unwrap();
        assert!(c6.is_isomorphic(&p));
        let c4 = make_cyclic(4).unwrap();
        let p22 = make_product(&make_cyclic(2).unwrap(), &make_cyclic(2).unwrap()).unwrap();
        assert!(!c4.is_isomorphic(&p22));
    }

    #[test]
    fn symmetric_orders_and_involutions() {
        let s3 = make_symmetric(3).unwrap();
        assert_eq!(s3.order(), 6);
        let s4 = make_symmetric(4).unwrap();
        assert_eq!(s4.order(), 24);
        let squares_to_id = (0..6u16).filter(|&x| s3.mul(x, x) == 0).count();
        assert_eq!(squares_to_id, 4);
        assert!(make_symmetric(8).is_err());
    }

    #[test]
    fn dihedral2_is_klein_four() {
        let d2 = make_dihedral(2).unwrap();
        assert_eq!(d2.order(), 4);
        let v4 = make_product(&make_cyclic(2).unwrap(), &make_cyclic(2).unwrap()).unwrap();
        assert!(d2.is_isomorphic(&v4));
    }

    #[test]
    fn from_permutations_generates_sym3() {
        let g = from_permutations(3, &[vec![1, 0, 2], vec![1, 2, 0]]).unwrap();
        assert_eq!(g.order(), 6);
        assert!(g.is_isomorphic(&make_symmetric(3).unwrap()));
    }

    #[test]
    fn permutation_closure_at_scale() {
        // transposition plus n-cycle generates the full symmetric group
        let sym5 = from_permutations(5, &[vec![1, 0, 2, 3, 4], vec![1, 2, 3, 4, 0]]).unwrap();
        assert_eq!(sym5.order(), 120);
        let sym7 = from_permutations(
            7,
            &[vec![1, 0, 2, 3, 4, 5, 6], vec![1, 2, 3, 4, 5, 6, 0]],
        )
        .unwrap();
        assert_eq!(sym7.order(), 5040);
        // Sym(8) has order 40320 and must hit the closure bound
        let too_big = from_permutations(
            8,
            &[vec![1, 0, 2, 3, 4, 5, 6, 7], vec![1, 2, 3, 4, 5, 6, 7, 0]],
        );
        assert!(matches!(too_big, Err(Error::Bound(_))));
    }

    #[test]
    fn product_c2_c4_has_two_squares() {
        let g = make_product(&make_cyclic(2).unwrap(), &make_cyclic(4).unwrap()).unwrap();
        assert_eq!(g.order(), 8);
        let squares: std::collections::BTreeSet<u16> =
            (0..8u16).map(|x| g.mul(x, x)).collect();
        assert_eq!(squares.len(), 2);
    }

    #[test]
    fn catalog_groups_satisfy_axioms() {
        for g in default_catalog() {
            g.validate().unwrap();
        }
    }

    #[test]
    fn constructor_families_satisfy_axioms() {
        for n in 1..=8 {
            make_cyclic(n).unwrap().validate().unwrap();
        }
        for n in 1..=6 {
            make_dihedral(n).unwrap().validate().unwrap();
        }
        for n in 1..=5 {
            make_symmetric(n).unwrap().validate().unwrap();
            make_alternating(n).unwrap().validate().unwrap();
        }
        let c3 = make_cyclic(3).unwrap();
        let s3 = make_symmetric(3).unwrap();
        make_product(&c3, &s3).unwrap().validate().unwrap();
    }

    #[test]
    fn subgroup_counts() {
        let c2 = make_cyclic(2).unwrap();
        assert_eq!(all_subgroups(&c2).unwrap().len(), 2);
        let s3 = make_symmetric(3).unwrap();
        let subs = all_subgroups(&s3).unwrap();
        assert_eq!(subs.len(), 6);
        let by_order: Vec<usize> = subs.iter().map(|s| s.order()).collect();
        assert_eq!(by_order, vec![1, 2, 2, 2, 3, 6]);
        let v4 = make_product(&make_cyclic(2).unwrap(), &make_cyclic(2).unwrap()).unwrap();
        assert_eq!(all_subgroups(&v4).unwrap().len(), 5);
        assert_eq!(all_subgroups(&make_dihedral(4).unwrap()).unwrap().len(), 10);
        assert_eq!(all_subgroups(&make_quaternion8().unwrap()).unwrap().len(), 6);
        assert_eq!(all_subgroups(&make_alternating(4).unwrap()).unwrap().len(), 10);
        assert_eq!(all_subgroups(&make_symmetric(4).unwrap()).unwrap().len(), 30);
    }

    #[test]
    fn lagrange_over_catalog() {
        for g in default_catalog() {
            for sub in all_subgroups(&g).unwrap() {
                assert_eq!(g.order() % sub.order(), 0, "{}", g.name());
            }
        }
    }

    #[test]
    fn subgroup_count_invariant_under_relabelling() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for g in [
            make_symmetric(3).unwrap(),
            make_dihedral(4).unwrap(),
            make_quaternion8().unwrap(),
        ] {
            let baseline = all_subgroups(&g).unwrap().len();
            for _ in 0..3 {
                let mut sigma: Vec<u16> = (1..g.order() as u16).collect();
                sigma.shuffle(&mut rng);
                sigma.insert(0, 0);
                let relabelled = g.relabel(&sigma).unwrap();
                relabelled.validate().unwrap();
                assert_eq!(all_subgroups(&relabelled).unwrap().len(), baseline);
            }
        }
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(automorphisms(&make_cyclic(2).unwrap()).unwrap().len(), 1);
        let v4 = make_product(&make_cyclic(2).unwrap(), &make_cyclic(2).unwrap()).unwrap();
        assert_eq!(automorphisms(&v4).unwrap().len(), 6);
        let c2c4 = make_product(&make_cyclic(2).unwrap(), &make_cyclic(4).unwrap()).unwrap();
        assert_eq!(automorphisms(&c2c4).unwrap().len(), 8);
        assert_eq!(automorphisms(&make_dihedral(4).unwrap()).unwrap().len(), 8);
        assert_eq!(automorphisms(&make_quaternion8().unwrap()).unwrap().len(), 24);
        // Aut(C6) = C2; Aut(S4) = Inn(S4) = S4
        assert_eq!(automorphisms(&make_cyclic(6).unwrap()).unwrap().len(), 2);
        assert_eq!(automorphisms(&make_symmetric(4).unwrap()).unwrap().len(), 24);
    }

    #[test]
    fn automorphisms_closed_under_composition() {
        for g in default_catalog().into_iter().filter(|g| g.order() <= 24) {
            let auts = automorphisms(&g).unwrap();
            for a in &auts {
                a.validate().unwrap();
                for b in &auts {
                    let c = a.compose(b).unwrap();
                    assert!(auts.iter().any(|x| x == &c), "{}", g.name());
                }
            }
        }
    }

    #[test]
    fn descriptor_round_trip() {
        let d: GroupDescriptor =
            serde_json::from_str(r#"{"kind":"product","factors":[{"kind":"cyclic","n":2},{"kind":"cyclic","n":4}]}"#)
                .unwrap();
        let g = d.build().unwrap();
        assert_eq!(g.order(), 8);
        assert_eq!(g.name(), "cyclic-2xcyclic-4");
        let text = serde_json::to_string(&d).unwrap();
        let back: GroupDescriptor = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
        let q: GroupDescriptor = serde_json::from_str(r#"{"kind":"quaternion8"}"#).unwrap();
        assert_eq!(q.build().unwrap().order(), 8);
        let p: GroupDescriptor =
            serde_json::from_str(r#"{"kind":"perm","degree":3,"generators":[[1,0,2],[1,2,0]]}"#)
                .unwrap();
        assert_eq!(p.build().unwrap().order(), 6);
    }

    #[test]
    fn table_descriptor_normalizes_identity() {
        // C2 with identity at position 1
        let g = FiniteGroup::from_table("t", &[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.mul(0, 0), 0);
        assert_eq!(g.mul(1, 1), 0);
    }

    #[test]
    fn catalog_order_is_deterministic() {
        let names: Vec<String> = default_catalog()
            .iter()
            .map(|g| g.name().to_string())
            .collect();
        assert_eq!(
            names,
            vec![
                "cyclic-2",
                "cyclic-3",
                "cyclic-2xcyclic-2",
                "cyclic-4",
                "cyclic-5",
                "cyclic-6",
                "symmetric-3",
                "dihedral-4",
                "quaternion8",
                "alternating-4",
                "symmetric-4",
            ]
        );
        for g in default_catalog() {
            let rebuilt = group_by_name(g.name()).unwrap();
            assert!(rebuilt.is_isomorphic(&g));
        }
    }

    #[test]
    fn quaternion_structure() {
        let q8 = make_quaternion8().unwrap();
        // exactly one element of order 2
        let order2 = (0..8u16).filter(|&x| q8.element_order(x) == 2).count();
        assert_eq!(order2, 1);
        let order4 = (0..8u16).filter(|&x| q8.element_order(x) == 4).count();
        assert_eq!(order4, 6);
        assert!(!q8.is_isomorphic(&make_dihedral(4).unwrap()));
    }
}
