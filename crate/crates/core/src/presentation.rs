//! Finitely presented groups and the enumeration kernel: count exact numbers
//! of homomorphisms into a finite group under word constraints.
//!
//! Counting is a backtracking search over generator images in declaration
//! order. Every relator and constraint is checked as soon as its last letter
//! is assigned, which prunes without ever changing the count. The top level
//! partitions on the first generator's image and merges partial counts by
//! checked integer addition, so totals are identical for any worker count.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fingroup::FiniteGroup;
use crate::words::Word;
use crate::{Error, Result};

/// A finitely presented group: ordered generator names and reduced relators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    generators: Vec<String>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for g in &generators {
            if !seen.insert(g.clone()) {
                return Err(Error::InvalidPresentation(format!("duplicate generator {g:?}")));
            }
        }
        for r in &relators {
            r.check_generators(&generators)?;
        }
        Ok(Presentation { generators, relators })
    }

    /// Free group of the given rank with generators `x1..xrank`.
    pub fn free(rank: usize) -> Presentation {
        Presentation {
            generators: (1..=rank).map(|i| format!("x{i}")).collect(),
            relators: Vec::new(),
        }
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn is_free(&self) -> bool {
        self.relators.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for g in &self.generators {
            if !seen.insert(g) {
                return Err(Error::InvalidPresentation(format!("duplicate generator {g:?}")));
            }
        }
        for r in &self.relators {
            r.check_generators(&self.generators)?;
            if r.is_empty() {
                return Err(Error::InvalidPresentation("empty relator".into()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}", self.generators.join(", "))?;
        if !self.relators.is_empty() {
            let rels: Vec<String> = self.relators.iter().map(|r| r.to_string()).collect();
            write!(f, " | {}", rels.join(", "))?;
        }
        write!(f, ">")
    }
}

/// Free product of two presentations. Generators of `b` that clash with
/// generators of `a` are renamed with a trailing apostrophe.
pub fn free_product(a: &Presentation, b: &Presentation) -> Presentation {
    let mut generators = a.generators.clone();
    let mut rename: std::collections::BTreeMap<String, Word> = std::collections::BTreeMap::new();
    for g in &b.generators {
        let mut name = g.clone();
        while generators.contains(&name) {
            name.push('\'');
        }
        rename.insert(g.clone(), Word::generator(name.clone()));
        generators.push(name);
    }
    let mut relators = a.relators.clone();
    for r in &b.relators {
        relators.push(r.substitute(&rename).expect("rename map is total"));
    }
    Presentation { generators, relators }
}

/// Pins the value of a word of the presentation to a codomain element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub word: Word,
    pub target: u16,
}

/// Resource limits for a counting run.
#[derive(Clone, Debug)]
pub struct CountOptions {
    /// Hard cap on backtracking nodes; exceeding it is an explicit error.
    pub node_budget: u64,
    /// Maximum number of generators accepted by the kernel.
    pub generator_limit: usize,
    /// Maximum codomain order.
    pub order_limit: usize,
    /// Performance mode: explore one first-generator image per Aut(P)-orbit
    /// and multiply by the orbit size. Off by default; engages only for
    /// constraint-free problems on small codomains, and never changes the
    /// resulting count.
    pub aut_reduction: bool,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            node_budget: 1_000_000_000,
            generator_limit: 8,
            order_limit: 10_000,
            aut_reduction: false,
        }
    }
}

// largest codomain for which the symmetry mode enumerates Aut(P)
const AUT_REDUCTION_MAX_ORDER: usize = 24;

// Aut(P)-orbits on elements, as (representative, orbit size), sorted by
// representative. Postcomposition by an automorphism bijects
// {phi : phi(g1) = v} with {phi : phi(g1) = tau(v)}, so branch counts are
// constant on orbits.
fn element_orbits(p: &FiniteGroup) -> Result<Vec<(u16, u64)>> {
    let auts = crate::fingroup::automorphisms(p)?;
    let mut parent: Vec<u16> = (0..p.order() as u16).collect();
    fn find(parent: &mut [u16], x: u16) -> u16 {
        if parent[usize::from(x)] != x {
            let root = find(parent, parent[usize::from(x)]);
            parent[usize::from(x)] = root;
        }
        parent[usize::from(x)]
    }
    for tau in &auts {
        for x in 0..p.order() as u16 {
            let y = tau.map()[usize::from(x)];
            let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
            if rx != ry {
                let (lo, hi) = (rx.min(ry), rx.max(ry));
                parent[usize::from(hi)] = lo;
            }
        }
    }
    let mut orbits: std::collections::BTreeMap<u16, u64> = std::collections::BTreeMap::new();
    for x in 0..p.order() as u16 {
        *orbits.entry(find(&mut parent, x)).or_insert(0) += 1;
    }
    Ok(orbits.into_iter().collect())
}

/// Result of one exact counting run.
#[derive(Clone, Debug, Serialize)]
pub struct HomCountReport {
    pub codomain: String,
    pub epi: bool,
    pub total: u64,
    pub constraints: Vec<Constraint>,
    pub nodes: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

// letters are +-(generator index + 1); target is the required value
struct Item {
    letters: Vec<i32>,
    target: u16,
}

struct Compiled {
    n_gens: usize,
    // items checkable once the generator with this index is assigned
    buckets: Vec<Vec<Item>>,
    // items with no letters at all
    constant_items: Vec<Item>,
}

fn compile(pres: &Presentation, p: &FiniteGroup, constraints: &[Constraint]) -> Result<Compiled> {
    let n_gens = pres.generators.len();
    let index_of = |name: &str| -> Result<usize> {
        pres.generators
            .iter()
            .position(|g| g == name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    };
    let mut buckets: Vec<Vec<Item>> = (0..n_gens).map(|_| Vec::new()).collect();
    let mut constant_items = Vec::new();
    let mut push = |word: &Word, target: u16| -> Result<()> {
        if usize::from(target) >= p.order() {
            return Err(Error::Bound(format!(
                "constraint target {target} out of range for {}",
                p.name()
            )));
        }
        let mut letters = Vec::with_capacity(word.len());
        let mut last = None;
        for l in word.letters() {
            let idx = index_of(&l.gen)?;
            last = Some(last.map_or(idx, |m: usize| m.max(idx)));
            let v = (idx + 1) as i32;
            letters.push(if l.inv { -v } else { v });
        }
        let item = Item { letters, target };
        match last {
            Some(idx) => buckets[idx].push(item),
            None => constant_items.push(item),
        }
        Ok(())
    };
    for r in &pres.relators {
        push(r, 0)?;
    }
    for c in constraints {
        push(&c.word, c.target)?;
    }
    Ok(Compiled {
        n_gens,
        buckets,
        constant_items,
    })
}

fn checked_sum(counts: &[u64]) -> Result<u64> {
    let mut total: u64 = 0;
    for &c in counts {
        total = total
            .checked_add(c)
            .ok_or_else(|| Error::Overflow("hom count exceeds u64".into()))?;
    }
    Ok(total)
}

fn eval(item: &Item, assign: &[u16], p: &FiniteGroup) -> u16 {
    let mut acc = 0u16;
    for &l in &item.letters {
        let x = assign[l.unsigned_abs() as usize - 1];
        let x = if l < 0 { p.inv(x) } else { x };
        acc = p.mul(acc, x);
    }
    acc
}

struct Search<'a> {
    compiled: &'a Compiled,
    p: &'a FiniteGroup,
    nodes: &'a AtomicU64,
    node_budget: u64,
    epi: bool,
}

impl<'a> Search<'a> {
    fn bump(&self) -> Result<()> {
        let before = self.nodes.fetch_add(1, Ordering::Relaxed);
        if before >= self.node_budget {
            return Err(Error::BudgetExceeded { nodes: before });
        }
        Ok(())
    }

    fn generates(&self, assign: &[u16], memo: &mut HashMap<Vec<u16>, bool>) -> bool {
        let mut image: Vec<u16> = assign.to_vec();
        image.sort_unstable();
        image.dedup();
        if let Some(&hit) = memo.get(&image) {
            return hit;
        }
        let full = self.p.closure(&image).len() == self.p.order();
        memo.insert(image, full);
        full
    }

    fn dfs(
        &self,
        assign: &mut Vec<u16>,
        depth: usize,
        memo: &mut HashMap<Vec<u16>, bool>,
    ) -> Result<u64> {
        if depth == self.compiled.n_gens {
            if self.epi && !self.generates(assign, memo) {
                return Ok(0);
            }
            return Ok(1);
        }
        let mut count: u64 = 0;
        for v in 0..self.p.order() as u16 {
            self.bump()?;
            assign.push(v);
            let ok = self.compiled.buckets[depth]
                .iter()
                .all(|item| eval(item, assign, self.p) == item.target);
            if ok {
                let sub = self.dfs(assign, depth + 1, memo)?;
                count = count
                    .checked_add(sub)
                    .ok_or_else(|| Error::Overflow("hom count exceeds u64".into()))?;
            }
            assign.pop();
        }
        Ok(count)
    }
}

fn run_count(
    pres: &Presentation,
    p: &FiniteGroup,
    constraints: &[Constraint],
    opts: &CountOptions,
    epi: bool,
) -> Result<HomCountReport> {
    let started = Instant::now();
    pres.validate()?;
    if p.order() > opts.order_limit {
        return Err(Error::Bound(format!(
            "codomain order {} exceeds limit {}",
            p.order(),
            opts.order_limit
        )));
    }
    if pres.generators.len() > opts.generator_limit {
        return Err(Error::Bound(format!(
            "{} generators exceed limit {}",
            pres.generators.len(),
            opts.generator_limit
        )));
    }
    let compiled = compile(pres, p, constraints)?;
    let nodes = AtomicU64::new(0);
    let search = Search {
        compiled: &compiled,
        p,
        nodes: &nodes,
        node_budget: opts.node_budget,
        epi,
    };
    let constants_ok = compiled
        .constant_items
        .iter()
        .all(|item| item.target == 0);
    let branch = |v: u16| -> Result<u64> {
        search.bump()?;
        let mut assign = vec![v];
        let ok = compiled.buckets[0]
            .iter()
            .all(|item| eval(item, &assign, p) == item.target);
        if !ok {
            return Ok(0);
        }
        let mut memo = HashMap::new();
        search.dfs(&mut assign, 1, &mut memo)
    };
    let symmetric = opts.aut_reduction
        && constraints.is_empty()
        && p.order() <= AUT_REDUCTION_MAX_ORDER;
    let total = if !constants_ok {
        0
    } else if compiled.n_gens == 0 {
        u64::from(!epi || p.order() == 1)
    } else if symmetric {
        // one branch per Aut(P)-orbit, weighted by orbit size
        let orbits = element_orbits(p)?;
        let weighted: Vec<u64> = orbits
            .into_par_iter()
            .map(|(rep, size)| {
                let count = branch(rep)?;
                count
                    .checked_mul(size)
                    .ok_or_else(|| Error::Overflow("hom count exceeds u64".into()))
            })
            .collect::<Result<Vec<u64>>>()?;
        checked_sum(&weighted)?
    } else {
        // partition on the first generator image; merge by addition
        let branch_counts: Vec<u64> = (0..p.order() as u16)
            .into_par_iter()
            .map(branch)
            .collect::<Result<Vec<u64>>>()?;
        checked_sum(&branch_counts)?
    };
    Ok(HomCountReport {
        codomain: p.name().to_string(),
        epi,
        total,
        constraints: constraints.to_vec(),
        nodes: nodes.load(Ordering::Relaxed),
        elapsed: started.elapsed(),
    })
}

/// Exact number of homomorphisms `pres -> p` satisfying every constraint.
/// With no constraints this is `|Hom(G, P)|`.
pub fn count_homs(
    pres: &Presentation,
    p: &FiniteGroup,
    constraints: &[Constraint],
    opts: &CountOptions,
) -> Result<HomCountReport> {
    run_count(pres, p, constraints, opts, false)
}

/// Exact number of such homomorphisms whose generator images generate `p`.
pub fn count_epis(
    pres: &Presentation,
    p: &FiniteGroup,
    constraints: &[Constraint],
    opts: &CountOptions,
) -> Result<HomCountReport> {
    run_count(pres, p, constraints, opts, true)
}

/// Every satisfying generator-image tuple, in lexicographic order. `cap`
/// bounds the number of collected tuples.
pub fn enumerate_homs(
    pres: &Presentation,
    p: &FiniteGroup,
    constraints: &[Constraint],
    opts: &CountOptions,
    cap: usize,
) -> Result<Vec<Vec<u16>>> {
    pres.validate()?;
    if p.order() > opts.order_limit {
        return Err(Error::Bound(format!(
            "codomain order {} exceeds limit {}",
            p.order(),
            opts.order_limit
        )));
    }
    if pres.generators.len() > opts.generator_limit {
        return Err(Error::Bound(format!(
            "{} generators exceed limit {}",
            pres.generators.len(),
            opts.generator_limit
        )));
    }
    let compiled = compile(pres, p, constraints)?;
    if !compiled
        .constant_items
        .iter()
        .all(|item| item.target == 0)
    {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    if compiled.n_gens == 0 {
        out.push(Vec::new());
        return Ok(out);
    }
    let mut assign: Vec<u16> = Vec::with_capacity(compiled.n_gens);
    enumerate_rec(&compiled, p, &mut assign, 0, cap, &mut out)?;
    Ok(out)
}

fn enumerate_rec(
    compiled: &Compiled,
    p: &FiniteGroup,
    assign: &mut Vec<u16>,
    depth: usize,
    cap: usize,
    out: &mut Vec<Vec<u16>>,
) -> Result<()> {
    if depth == compiled.n_gens {
        if out.len() >= cap {
            return Err(Error::Bound(format!(
                "homomorphism enumeration exceeds cap {cap}"
            )));
        }
        out.push(assign.clone());
        return Ok(());
    }
    for v in 0..p.order() as u16 {
        assign.push(v);
        let ok = compiled.buckets[depth]
            .iter()
            .all(|item| eval(item, assign, p) == item.target);
        if ok {
            enumerate_rec(compiled, p, assign, depth + 1, cap, out)?;
        }
        assign.pop();
    }
    Ok(())
}

/// Verdict of a residual-finiteness probe for a single word.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ResidualVerdict {
    /// Some catalog homomorphism sends the word off the identity.
    Nontrivial { witness: String, hom: Vec<u16> },
    /// No catalog witness separates the word from the identity.
    Unresolved { max_order: usize },
}

/// Searches the catalog, in order, for a homomorphism sending `w` off the
/// identity. Finding one proves `w` is nontrivial in the presented group.
pub fn residual_nontriviality(
    pres: &Presentation,
    w: &Word,
    catalog: &[FiniteGroup],
    opts: &CountOptions,
) -> Result<ResidualVerdict> {
    pres.validate()?;
    w.check_generators(&pres.generators)?;
    for p in catalog {
        let compiled = compile(pres, p, &[])?;
        let target = compile_word(pres, w)?;
        if let Some(hom) = find_hom(&compiled, p, &target, opts)? {
            return Ok(ResidualVerdict::Nontrivial {
                witness: p.name().to_string(),
                hom,
            });
        }
    }
    Ok(ResidualVerdict::Unresolved {
        max_order: catalog.iter().map(|p| p.order()).max().unwrap_or(0),
    })
}

fn compile_word(pres: &Presentation, w: &Word) -> Result<Item> {
    let mut letters = Vec::with_capacity(w.len());
    for l in w.letters() {
        let idx = pres
            .generators
            .iter()
            .position(|g| g == &l.gen)
            .ok_or_else(|| Error::UnknownGenerator(l.gen.clone()))?;
        let v = (idx + 1) as i32;
        letters.push(if l.inv { -v } else { v });
    }
    Ok(Item { letters, target: 0 })
}

fn find_hom(
    compiled: &Compiled,
    p: &FiniteGroup,
    word: &Item,
    opts: &CountOptions,
) -> Result<Option<Vec<u16>>> {
    if !compiled.constant_items.iter().all(|i| i.target == 0) {
        return Ok(None);
    }
    let nodes = AtomicU64::new(0);
    let mut assign = Vec::with_capacity(compiled.n_gens);
    find_rec(compiled, p, word, &nodes, opts.node_budget, &mut assign, 0)
}

fn find_rec(
    compiled: &Compiled,
    p: &FiniteGroup,
    word: &Item,
    nodes: &AtomicU64,
    budget: u64,
    assign: &mut Vec<u16>,
    depth: usize,
) -> Result<Option<Vec<u16>>> {
    if depth == compiled.n_gens {
        if eval(word, assign, p) != 0 {
            return Ok(Some(assign.clone()));
        }
        return Ok(None);
    }
    for v in 0..p.order() as u16 {
        let before = nodes.fetch_add(1, Ordering::Relaxed);
        if before >= budget {
            return Err(Error::BudgetExceeded { nodes: before });
        }
        assign.push(v);
        let ok = compiled.buckets[depth]
            .iter()
            .all(|item| eval(item, assign, p) == item.target);
        if ok {
            if let Some(found) = find_rec(compiled, p, word, nodes, budget, assign, depth + 1)? {
                return Ok(Some(found));
            }
        }
        assign.pop();
    }
    Ok(None)
}
