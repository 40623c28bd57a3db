//! Stallings subgroup graphs: wedge-of-loops construction, iterative
//! folding, membership, rank/index, and a free basis from a spanning tree.
//!
//! The folded graph is compacted through a breadth-first traversal from the
//! base vertex with a fixed edge order, so equal subgroups always produce
//! structurally identical graphs.

use std::collections::HashMap;

use crate::words::{Alphabet, Word};
use crate::Result;

/// Folded core graph of a finitely generated subgroup of a free group. The
/// base vertex is 0. For each vertex `v` and generator `g`, `out[v][g]` is
/// the head of the unique `g`-labelled edge leaving `v` (if any) and
/// `inn[v][g]` the tail of the unique `g`-labelled edge entering `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StallingsGraph {
    alphabet: Alphabet,
    out: Vec<Vec<Option<usize>>>,
    inn: Vec<Vec<Option<usize>>>,
}

type TreeParents = Vec<Option<(usize, i16)>>;

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[rb.max(ra)] = rb.min(ra);
        }
    }
}

/// Folds the wedge of loops spelled by `generators` in the free group of the
/// given rank. Generator words must be freely reduced (guaranteed by
/// [`Word`]); empty words are ignored.
pub fn stallings_fold(generators: &[Word], rank: usize) -> Result<StallingsGraph> {
    let alphabet = Alphabet::infer(generators, rank)?;
    // wedge of loops: edges (tail, head, generator index)
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    let mut next_vertex = 1usize;
    for w in generators {
        let cw = alphabet.to_cword(w)?;
        if cw.is_empty() {
            continue;
        }
        let mut prev = 0usize;
        for (i, &letter) in cw.iter().enumerate() {
            let here = if i + 1 == cw.len() { 0 } else { next_vertex };
            if i + 1 != cw.len() {
                next_vertex += 1;
            }
            let g = letter.unsigned_abs() as usize - 1;
            if letter > 0 {
                edges.push((prev, here, g));
            } else {
                edges.push((here, prev, g));
            }
            prev = here;
        }
    }

    let mut uf = UnionFind::new(next_vertex);
    // fold until no vertex carries two equal-labelled edges in the same
    // direction
    loop {
        let mut by_out: HashMap<(usize, usize), usize> = HashMap::new();
        let mut by_in: HashMap<(usize, usize), usize> = HashMap::new();
        let mut merged = None;
        for &(u, v, g) in &edges {
            let (ru, rv) = (uf.find(u), uf.find(v));
            if let Some(&other) = by_out.get(&(ru, g)) {
                if other != rv {
                    merged = Some((other, rv));
                    break;
                }
            } else {
                by_out.insert((ru, g), rv);
            }
            if let Some(&other) = by_in.get(&(rv, g)) {
                if other != ru {
                    merged = Some((other, ru));
                    break;
                }
            } else {
                by_in.insert((rv, g), ru);
            }
        }
        match merged {
            Some((a, b)) => uf.union(a, b),
            None => break,
        }
    }

    // deterministic transition maps on representatives
    let rank = alphabet.rank();
    let mut out_map: HashMap<(usize, usize), usize> = HashMap::new();
    let mut in_map: HashMap<(usize, usize), usize> = HashMap::new();
    for &(u, v, g) in &edges {
        let (ru, rv) = (uf.find(u), uf.find(v));
        out_map.insert((ru, g), rv);
        in_map.insert((rv, g), ru);
    }

    // canonical renumbering: BFS from the base, generators in order,
    // outgoing before incoming
    let base = uf.find(0);
    let mut number: HashMap<usize, usize> = HashMap::new();
    number.insert(base, 0);
    let mut order = vec![base];
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for g in 0..rank {
            for w in [out_map.get(&(v, g)), in_map.get(&(v, g))].into_iter().flatten() {
                if !number.contains_key(w) {
                    number.insert(*w, order.len());
                    order.push(*w);
                }
            }
        }
    }

    let n = order.len();
    let mut out = vec![vec![None; rank]; n];
    let mut inn = vec![vec![None; rank]; n];
    for (&(u, g), &v) in &out_map {
        if let (Some(&cu), Some(&cv)) = (number.get(&u), number.get(&v)) {
            out[cu][g] = Some(cv);
            inn[cv][g] = Some(cu);
        }
    }
    Ok(StallingsGraph { alphabet, out, inn })
}

impl StallingsGraph {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// The base vertex is always 0 after canonical renumbering.
    pub fn base(&self) -> usize {
        0
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out
            .iter()
            .map(|row| row.iter().filter(|e| e.is_some()).count())
            .sum()
    }

    /// Directed labelled edges `(tail, head, generator index)`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize, usize)> {
        let mut edges = Vec::new();
        for (u, row) in self.out.iter().enumerate() {
            for (g, head) in row.iter().enumerate() {
                if let Some(v) = head {
                    edges.push((u, *v, g));
                }
            }
        }
        edges
    }

    /// A folded graph is a partial deterministic automaton by construction.
    pub fn folded(&self) -> bool {
        true
    }

    /// Whether `w` labels a closed path at the base vertex. Letters that are
    /// not in the alphabet cannot label any path.
    pub fn membership(&self, w: &Word) -> bool {
        let Ok(cw) = self.alphabet.to_cword(w) else {
            return false;
        };
        let mut cur = 0usize;
        for letter in cw {
            let g = letter.unsigned_abs() as usize - 1;
            let step = if letter > 0 {
                self.out[cur][g]
            } else {
                self.inn[cur][g]
            };
            match step {
                Some(v) => cur = v,
                None => return false,
            }
        }
        cur == 0
    }

    /// Rank of the subgroup: `E - V + 1` for the connected core graph.
    pub fn subgroup_rank(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    /// Index in the ambient free group: the vertex count when the graph is a
    /// complete automaton (every vertex has one outgoing and one incoming
    /// edge per generator), infinite otherwise.
    pub fn subgroup_index(&self) -> Option<usize> {
        let complete = self.out.iter().zip(self.inn.iter()).all(|(o, i)| {
            o.iter().all(Option::is_some) && i.iter().all(Option::is_some)
        });
        complete.then(|| self.vertex_count())
    }

    // parent[v] = (parent vertex, signed letter read from parent to v);
    // tree edge set recorded as out-entries (tail, generator)
    fn spanning_tree(&self) -> (TreeParents, Vec<(usize, usize)>) {
        let rank = self.alphabet.rank();
        let mut parent: Vec<Option<(usize, i16)>> = vec![None; self.vertex_count()];
        let mut tree_edges: Vec<(usize, usize)> = Vec::new();
        let mut visited = vec![false; self.vertex_count()];
        visited[0] = true;
        let mut queue = vec![0usize];
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head];
            head += 1;
            for g in 0..rank {
                if let Some(w) = self.out[v][g] {
                    if !visited[w] {
                        visited[w] = true;
                        parent[w] = Some((v, (g + 1) as i16));
                        tree_edges.push((v, g));
                        queue.push(w);
                    }
                }
                if let Some(u) = self.inn[v][g] {
                    if !visited[u] {
                        visited[u] = true;
                        parent[u] = Some((v, -((g + 1) as i16)));
                        tree_edges.push((u, g));
                        queue.push(u);
                    }
                }
            }
        }
        (parent, tree_edges)
    }

    fn path_from_base(&self, parent: &[Option<(usize, i16)>], v: usize) -> Vec<i16> {
        let mut path = Vec::new();
        let mut cur = v;
        while let Some((p, letter)) = parent[cur] {
            path.push(letter);
            cur = p;
        }
        path.reverse();
        path
    }

    /// A free basis of the subgroup: one word per edge outside a spanning
    /// tree, `path(base -> tail) g path(head -> base)`.
    pub fn free_basis(&self) -> Vec<Word> {
        let (parent, tree_edges) = self.spanning_tree();
        let mut basis = Vec::new();
        for (u, v, g) in self.edges() {
            if tree_edges.contains(&(u, g)) {
                continue;
            }
            let mut cw = self.path_from_base(&parent, u);
            cw.push((g + 1) as i16);
            let back: Vec<i16> = self
                .path_from_base(&parent, v)
                .iter()
                .rev()
                .map(|&l| -l)
                .collect();
            cw.extend(back);
            basis.push(self.alphabet.from_cword(&cw));
        }
        basis
    }

    /// DOT rendering for documentation; inverse letters are drawn as the
    /// positive edge in its stored direction.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph stallings {\n  rankdir=LR;\n  0 [shape=doublecircle];\n");
        for (u, v, g) in self.edges() {
            s.push_str(&format!(
                "  {u} -> {v} [label=\"{}\"];\n",
                self.alphabet.names()[g]
            ));
        }
        s.push_str("}\n");
        s
    }
}
