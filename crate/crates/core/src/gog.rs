//! Graphs of finite groups: validation, maximal subtrees, normalization,
//! fundamental-group presentations, vertex-group intersections, and the
//! sufficient free-factor condition for a vertex group.
//!
//! Fundamental groups of finite connected faithful graphs of finite groups
//! are exactly the finitely generated virtually free groups, so this module
//! is the input pipeline for the virtually free case.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::fingroup::{FiniteGroup, GroupDescriptor, Subgroup};
use crate::presentation::Presentation;
use crate::words::{Letter, Word};
use crate::{Error, Result};

/// A directed labelled edge of a graph of groups: an edge group together
/// with its two monomorphisms into the endpoint vertex groups. `iota[a]` and
/// `tau[a]` are the vertex-group element indices of the images of edge-group
/// element `a`.
#[derive(Clone, Debug)]
pub struct GogEdge {
    pub id: String,
    pub from: String,
    pub to: String,
    pub group: FiniteGroup,
    pub iota: Vec<u16>,
    pub tau: Vec<u16>,
}

/// A finite directed multigraph with finite vertex and edge groups. Loops
/// and parallel edges are allowed.
#[derive(Clone, Debug)]
pub struct GraphOfGroups {
    vertices: BTreeMap<String, FiniteGroup>,
    edges: Vec<GogEdge>,
}

/// A maximal subtree, stored as the set of its edge ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaximalTree {
    pub edge_ids: BTreeSet<String>,
}

/// The fundamental-group presentation of a graph of groups with respect to
/// a maximal subtree, together with the data needed to talk about vertex
/// groups inside it: per-vertex canonical words for every element, and the
/// stable-letter generator chosen for each non-tree edge.
#[derive(Clone, Debug, Serialize)]
pub struct FundamentalPresentation {
    pub presentation: Presentation,
    /// vertex name -> canonical word of each vertex-group element
    pub vertex_embeddings: BTreeMap<String, Vec<Word>>,
    /// edge id -> stable-letter generator name (tree edges are eliminated)
    pub stable_letters: BTreeMap<String, String>,
}

impl GraphOfGroups {
    pub fn new(vertices: BTreeMap<String, FiniteGroup>, edges: Vec<GogEdge>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        let mut ids = HashSet::new();
        for e in &edges {
            if !vertices.contains_key(&e.from) || !vertices.contains_key(&e.to) {
                return Err(Error::InvalidGraph(format!(
                    "edge {} references a missing vertex",
                    e.id
                )));
            }
            if !ids.insert(e.id.clone()) {
                return Err(Error::InvalidGraph(format!("duplicate edge id {}", e.id)));
            }
            if e.iota.len() != e.group.order() || e.tau.len() != e.group.order() {
                return Err(Error::InvalidGraph(format!(
                    "edge {} maps have wrong length",
                    e.id
                )));
            }
        }
        Ok(GraphOfGroups { vertices, edges })
    }

    pub fn vertices(&self) -> &BTreeMap<String, FiniteGroup> {
        &self.vertices
    }

    pub fn vertex(&self, name: &str) -> Result<&FiniteGroup> {
        self.vertices
            .get(name)
            .ok_or_else(|| Error::InvalidGraph(format!("no vertex {name:?}")))
    }

    pub fn edges(&self) -> &[GogEdge] {
        &self.edges
    }

    /// Connectivity plus exhaustive monomorphism checks for every edge map.
    /// Returns the list of violations; empty means valid.
    pub fn validate(&self) -> Vec<String> {
        let mut diagnostics = Vec::new();
        // connectivity of the underlying undirected graph
        let first = self.vertices.keys().next().cloned();
        if let Some(seed) = first {
            let mut seen: HashSet<&str> = HashSet::new();
            let mut queue: VecDeque<&str> = VecDeque::new();
            seen.insert(seed.as_str());
            queue.push_back(self.vertices.keys().next().unwrap());
            while let Some(v) = queue.pop_front() {
                for e in &self.edges {
                    for (a, b) in [(&e.from, &e.to), (&e.to, &e.from)] {
                        if a == v && seen.insert(b) {
                            queue.push_back(b);
                        }
                    }
                }
            }
            if seen.len() != self.vertices.len() {
                diagnostics.push("not connected".into());
            }
        }
        for e in &self.edges {
            for (label, map, vertex) in [("iota", &e.iota, &e.from), ("tau", &e.tau, &e.to)] {
                let target = &self.vertices[vertex];
                if map.iter().any(|&x| usize::from(x) >= target.order()) {
                    diagnostics.push(format!("edge {}: {label} image out of range", e.id));
                    continue;
                }
                let mut seen = HashSet::new();
                if map.iter().any(|&x| !seen.insert(x)) {
                    diagnostics.push(format!("edge {}: {label} not injective", e.id));
                }
                if map.first() != Some(&0) {
                    diagnostics.push(format!("edge {}: {label} does not fix identity", e.id));
                }
                for a in 0..e.group.order() as u16 {
                    for b in 0..e.group.order() as u16 {
                        let lhs = map[usize::from(e.group.mul(a, b))];
                        let rhs = target.mul(map[usize::from(a)], map[usize::from(b)]);
                        if lhs != rhs {
                            diagnostics.push(format!(
                                "edge {}: {label} not a homomorphism at ({a},{b})",
                                e.id
                            ));
                        }
                    }
                }
            }
        }
        diagnostics
    }

    fn require_valid(&self) -> Result<()> {
        let diagnostics = self.validate();
        if diagnostics.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(diagnostics.join("; ")))
        }
    }

    /// Breadth-first spanning tree from `seed`, edges explored in
    /// declaration order, so ties break deterministically.
    pub fn maximal_tree(&self, seed: &str) -> Result<MaximalTree> {
        self.vertex(seed)?;
        let mut visited: HashSet<&str> = HashSet::new();
        visited.insert(seed);
        let mut queue: VecDeque<&str> = VecDeque::new();
        queue.push_back(seed);
        let mut edge_ids = BTreeSet::new();
        while let Some(v) = queue.pop_front() {
            for e in &self.edges {
                for (a, b) in [(&e.from, &e.to), (&e.to, &e.from)] {
                    if a == v && !visited.contains(b.as_str()) {
                        visited.insert(b);
                        edge_ids.insert(e.id.clone());
                        queue.push_back(b);
                    }
                }
            }
        }
        if visited.len() != self.vertices.len() {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(MaximalTree { edge_ids })
    }

    /// Every maximal subtree, by exhausting edge subsets of size `V - 1`.
    pub fn maximal_trees(&self) -> Vec<MaximalTree> {
        let need = self.vertices.len() - 1;
        let m = self.edges.len();
        let mut trees = Vec::new();
        if need == 0 {
            trees.push(MaximalTree {
                edge_ids: BTreeSet::new(),
            });
            return trees;
        }
        let names: Vec<&String> = self.vertices.keys().collect();
        let index: BTreeMap<&str, usize> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        for mask in 0u32..(1 << m) {
            if mask.count_ones() as usize != need {
                continue;
            }
            let mut parent: Vec<usize> = (0..names.len()).collect();
            fn find(parent: &mut Vec<usize>, x: usize) -> usize {
                if parent[x] != x {
                    let r = find(parent, parent[x]);
                    parent[x] = r;
                }
                parent[x]
            }
            let mut acyclic = true;
            for (i, e) in self.edges.iter().enumerate() {
                if mask & (1 << i) == 0 {
                    continue;
                }
                let (a, b) = (index[e.from.as_str()], index[e.to.as_str()]);
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra == rb {
                    acyclic = false;
                    break;
                }
                parent[ra] = rb;
            }
            if acyclic {
                let edge_ids = self
                    .edges
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, e)| e.id.clone())
                    .collect();
                trees.push(MaximalTree { edge_ids });
            }
        }
        trees
    }

    /// Contracts tree edges between distinct vertices whose `iota` or `tau`
    /// is onto the whole vertex group, repeating until none remains. The
    /// fundamental group is unchanged; at each step the absorbed vertex
    /// group embeds into the surviving one through the edge group.
    pub fn normalize(&self) -> Result<GraphOfGroups> {
        self.require_valid()?;
        let mut current = self.clone();
        loop {
            let seed = current.vertices.keys().next().unwrap().clone();
            let tree = current.maximal_tree(&seed)?;
            let mut contraction: Option<(usize, bool)> = None;
            for (i, e) in current.edges.iter().enumerate() {
                if !tree.edge_ids.contains(&e.id) || e.from == e.to {
                    continue;
                }
                let iota_onto = e.group.order() == current.vertices[&e.from].order();
                let tau_onto = e.group.order() == current.vertices[&e.to].order();
                if iota_onto {
                    contraction = Some((i, true));
                    break;
                }
                if tau_onto {
                    contraction = Some((i, false));
                    break;
                }
            }
            let Some((idx, absorb_from)) = contraction else {
                return Ok(current);
            };
            current = current.contract(idx, absorb_from)?;
        }
    }

    // contracts edge `idx`; when `absorb_from` the `from` vertex is absorbed
    // into `to` through tau . iota^-1, otherwise symmetrically
    fn contract(&self, idx: usize, absorb_from: bool) -> Result<GraphOfGroups> {
        let e = &self.edges[idx];
        let (absorbed, kept, forth, back) = if absorb_from {
            (&e.from, &e.to, &e.tau, &e.iota)
        } else {
            (&e.to, &e.from, &e.iota, &e.tau)
        };
        // inverse of the onto monomorphism `back`, then compose with `forth`
        let absorbed_group = &self.vertices[absorbed];
        let mut into_kept = vec![0u16; absorbed_group.order()];
        for (edge_elt, &vertex_elt) in back.iter().enumerate() {
            into_kept[usize::from(vertex_elt)] = forth[edge_elt];
        }
        let mut vertices = self.vertices.clone();
        vertices.remove(absorbed);
        let mut edges = Vec::with_capacity(self.edges.len() - 1);
        for (i, f) in self.edges.iter().enumerate() {
            if i == idx {
                continue;
            }
            let mut f = f.clone();
            if &f.from == absorbed {
                f.from = kept.clone();
                f.iota = f.iota.iter().map(|&x| into_kept[usize::from(x)]).collect();
            }
            if &f.to == absorbed {
                f.to = kept.clone();
                f.tau = f.tau.iter().map(|&x| into_kept[usize::from(x)]).collect();
            }
            edges.push(f);
        }
        GraphOfGroups::new(vertices, edges)
    }

    /// The fundamental-group presentation with respect to `tree`.
    ///
    /// Generators are a minimal generating set per vertex group plus one
    /// stable letter per non-tree edge. Relators are the Cayley-word
    /// relators of each vertex group, and for each edge-group generator `a`
    /// the conjugation relator `q i(a) q^-1 t(a)^-1` (with `q = 1`, hence an
    /// identification `i(a) t(a)^-1`, on tree edges).
    pub fn fundamental_presentation(&self, tree: &MaximalTree) -> Result<FundamentalPresentation> {
        self.require_valid()?;
        self.check_tree(tree)?;
        let mut used: HashSet<String> = HashSet::new();
        let uniquify = |base: String, used: &mut HashSet<String>| -> String {
            let mut name = base;
            while used.contains(&name) {
                name.push('\'');
            }
            used.insert(name.clone());
            name
        };

        let mut generators: Vec<String> = Vec::new();
        let mut relators: Vec<Word> = Vec::new();
        let mut vertex_embeddings: BTreeMap<String, Vec<Word>> = BTreeMap::new();

        for (vname, group) in &self.vertices {
            let gens = group.minimal_generating_set();
            let names: Vec<String> = if gens.len() == 1 {
                vec![uniquify(vname.clone(), &mut used)]
            } else {
                gens.iter()
                    .enumerate()
                    .map(|(k, _)| uniquify(format!("{vname}{}", k + 1), &mut used))
                    .collect()
            };
            let words = group
                .bfs_words(&gens)
                .expect("minimal generating set generates");
            let element_words: Vec<Word> = words
                .iter()
                .map(|w| Word::reduce(w.iter().map(|&pos| Letter::new(names[pos].clone(), false))))
                .collect();
            // Cayley relators: w_x w_y w_{xy}^-1 over nonidentity pairs
            let mut vertex_relators: Vec<Word> = Vec::new();
            for x in 1..group.order() as u16 {
                for y in 1..group.order() as u16 {
                    let xy = group.mul(x, y);
                    let relator = element_words[usize::from(x)]
                        .concat(&element_words[usize::from(y)])
                        .concat(&element_words[usize::from(xy)].inverse());
                    if !relator.is_empty() && !vertex_relators.contains(&relator) {
                        vertex_relators.push(relator);
                    }
                }
            }
            generators.extend(names);
            relators.extend(vertex_relators);
            vertex_embeddings.insert(vname.clone(), element_words);
        }

        let mut stable_letters: BTreeMap<String, String> = BTreeMap::new();
        for e in &self.edges {
            if !tree.edge_ids.contains(&e.id) {
                let q = uniquify(format!("q_{}", e.id), &mut used);
                generators.push(q.clone());
                stable_letters.insert(e.id.clone(), q);
            }
        }
        for e in &self.edges {
            let edge_gens = e.group.minimal_generating_set();
            for &a in &edge_gens {
                let i_word = &vertex_embeddings[&e.from][usize::from(e.iota[usize::from(a)])];
                let t_word = &vertex_embeddings[&e.to][usize::from(e.tau[usize::from(a)])];
                let relator = match stable_letters.get(&e.id) {
                    Some(q) => {
                        let q = Word::generator(q.clone());
                        q.concat(i_word).concat(&q.inverse()).concat(&t_word.inverse())
                    }
                    None => i_word.concat(&t_word.inverse()),
                };
                if !relator.is_empty() && !relators.contains(&relator) {
                    relators.push(relator);
                }
            }
        }

        Ok(FundamentalPresentation {
            presentation: Presentation::new(generators, relators)?,
            vertex_embeddings,
            stable_letters,
        })
    }

    fn check_tree(&self, tree: &MaximalTree) -> Result<()> {
        if tree.edge_ids.len() != self.vertices.len() - 1 {
            return Err(Error::InvalidGraph("tree has wrong edge count".into()));
        }
        for id in &tree.edge_ids {
            if !self.edges.iter().any(|e| &e.id == id) {
                return Err(Error::InvalidGraph(format!("tree edge {id:?} not in graph")));
            }
        }
        if !self
            .maximal_trees()
            .iter()
            .any(|t| t.edge_ids == tree.edge_ids)
        {
            return Err(Error::InvalidGraph("edge set is not a spanning tree".into()));
        }
        Ok(())
    }

    // tree geodesic between two vertices, as (edge index, from==cursor) steps
    fn geodesic(&self, tree: &MaximalTree, v: &str, w: &str) -> Result<Vec<(usize, bool)>> {
        let mut prev: BTreeMap<&str, (&str, usize, bool)> = BTreeMap::new();
        let mut queue: VecDeque<&str> = VecDeque::new();
        queue.push_back(v);
        let mut seen: HashSet<&str> = HashSet::new();
        seen.insert(v);
        while let Some(cur) = queue.pop_front() {
            if cur == w {
                break;
            }
            for (i, e) in self.edges.iter().enumerate() {
                if !tree.edge_ids.contains(&e.id) {
                    continue;
                }
                for (a, b, forward) in [(&e.from, &e.to, true), (&e.to, &e.from, false)] {
                    if a == cur && seen.insert(b) {
                        prev.insert(b, (cur, i, forward));
                        queue.push_back(b);
                    }
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = w;
        while cur != v {
            let (p, i, forward) = prev
                .get(cur)
                .ok_or_else(|| Error::InvalidGraph("vertices not tree-connected".into()))?;
            path.push((*i, *forward));
            cur = p;
        }
        path.reverse();
        Ok(path)
    }

    /// Intersection of two distinct vertex groups inside the fundamental
    /// group: the elements of `G_v` that propagate through every edge-group
    /// inclusion along the tree geodesic from `v` to `w`, returned as a
    /// subgroup of `G_v`.
    pub fn vertex_intersection(
        &self,
        tree: &MaximalTree,
        v: &str,
        w: &str,
    ) -> Result<Subgroup<'_>> {
        self.require_valid()?;
        if v == w {
            return Err(Error::InvalidGraph(
                "vertex_intersection needs distinct vertices".into(),
            ));
        }
        let path = self.geodesic(tree, v, w)?;
        let vg = self.vertex(v)?;
        // survivors tracked as (element of G_v, current incarnation)
        let mut survivors: Vec<(u16, u16)> =
            (0..vg.order() as u16).map(|x| (x, x)).collect();
        for (edge_idx, forward) in path {
            let e = &self.edges[edge_idx];
            let (enter, exit) = if forward {
                (&e.iota, &e.tau)
            } else {
                (&e.tau, &e.iota)
            };
            survivors = survivors
                .into_iter()
                .filter_map(|(orig, cur)| {
                    enter
                        .iter()
                        .position(|&img| img == cur)
                        .map(|edge_elt| (orig, exit[edge_elt]))
                })
                .collect();
        }
        let elements: Vec<u16> = survivors.into_iter().map(|(orig, _)| orig).collect();
        Subgroup::new(vg, elements)
    }

    /// Sufficient condition for the vertex group at `v` to be a free factor
    /// of the fundamental group: every incident edge group is trivial.
    pub fn trivial_edge_free_factor_check(&self, v: &str) -> Result<bool> {
        self.vertex(v)?;
        Ok(self
            .edges
            .iter()
            .filter(|e| e.from == v || e.to == v)
            .all(|e| e.group.order() == 1))
    }
}

/// JSON shape of a graph of groups. `iota`/`tau` arrays map edge-group
/// element indices to vertex-group element indices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GogDescriptor {
    pub vertices: BTreeMap<String, GroupDescriptor>,
    pub edges: Vec<GogEdgeDescriptor>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GogEdgeDescriptor {
    pub id: String,
    pub from: String,
    pub to: String,
    pub group: GroupDescriptor,
    pub iota: Vec<u16>,
    pub tau: Vec<u16>,
}

impl GogDescriptor {
    pub fn build(&self) -> Result<GraphOfGroups> {
        let mut vertices = BTreeMap::new();
        for (name, d) in &self.vertices {
            vertices.insert(name.clone(), d.build()?);
        }
        let mut edges = Vec::new();
        for e in &self.edges {
            edges.push(GogEdge {
                id: e.id.clone(),
                from: e.from.clone(),
                to: e.to.clone(),
                group: e.group.build()?,
                iota: e.iota.clone(),
                tau: e.tau.clone(),
            });
        }
        GraphOfGroups::new(vertices, edges)
    }
}
