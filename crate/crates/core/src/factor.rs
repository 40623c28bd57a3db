//! The free-factor criterion as an executable test.
//!
//! For a subgroup `H <= G` given by an abstract presentation and an
//! embedding, and a finite witness group `P`, the extension count
//! `h(G, H, gamma, P)` is the number of homomorphisms `G -> P` restricting
//! to `gamma` on `H`. Constancy of `h` over `Hom(H, P)` for every finite `P`
//! characterizes free factors of virtually free groups, so:
//!
//! * a witness `P` with a non-constant table refutes "free factor";
//! * a clean sweep of the catalog is evidence, never proof; certification
//!   requires an oracle (Whitehead primitivity for cyclic subgroups of free
//!   groups, or the trivial-incident-edge-group condition for vertex groups
//!   of a graph of groups).
//!
//! The module also implements the corestriction identity
//! `h = sum over Q >= im(gamma) of e(..., Q)` and the finite-level
//! isomorphism-extension test, both cross-checked against brute force.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fingroup::{all_subgroups, automorphisms, FiniteGroup, FiniteIso, Subgroup};
use crate::gog::GraphOfGroups;
use crate::presentation::{
    count_epis, count_homs, enumerate_homs, residual_nontriviality, Constraint, CountOptions,
    Presentation, ResidualVerdict,
};
use crate::words::{is_primitive_whitehead, stallings_fold, Word};
use crate::{Error, Result};

/// Hard cap on `|Hom(H, P)|` tuples enumerated by the constancy test.
pub const MAX_GAMMA_TUPLES: usize = 1_000_000;

/// A finitely generated subgroup `H` of a presented group `G`: an abstract
/// presentation of `H` plus one word of `G` per `H`-generator.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubgroupSpec {
    #[serde(rename = "presentation")]
    pub h_presentation: Presentation,
    pub embedding: BTreeMap<String, Word>,
}

impl SubgroupSpec {
    pub fn new(h_presentation: Presentation, embedding: BTreeMap<String, Word>) -> Self {
        SubgroupSpec {
            h_presentation,
            embedding,
        }
    }

    /// Builds the spec for a subgroup of a free group from generating words:
    /// Stallings folding yields a free basis, so `H` is presented as a free
    /// group with one generator `h<k>` per basis word.
    pub fn from_free_words(g: &Presentation, generators: &[Word]) -> Result<SubgroupSpec> {
        if !g.is_free() {
            return Err(Error::InvalidSubgroup(
                "generator-word form requires a free ambient group".into(),
            ));
        }
        for w in generators {
            w.check_generators(g.generators())?;
        }
        let graph = stallings_fold(generators, g.generators().len())?;
        let basis = graph.free_basis();
        let h_presentation = Presentation::new(
            (1..=basis.len()).map(|k| format!("h{k}")).collect(),
            Vec::new(),
        )?;
        let embedding = basis
            .into_iter()
            .enumerate()
            .map(|(k, w)| (format!("h{}", k + 1), w))
            .collect();
        Ok(SubgroupSpec {
            h_presentation,
            embedding,
        })
    }

    /// Checks the embedding data against `G`: every `H`-generator has an
    /// image word over `G`'s generators, and every `H`-relator's image is
    /// trivial in `G`. For free `G` triviality is decided exactly by free
    /// reduction; otherwise only as far as the catalog can see (a necessary
    /// condition).
    pub fn validate(
        &self,
        g: &Presentation,
        catalog: &[FiniteGroup],
        opts: &CountOptions,
    ) -> Result<()> {
        self.h_presentation.validate()?;
        for name in self.h_presentation.generators() {
            let image = self
                .embedding
                .get(name)
                .ok_or_else(|| Error::InvalidSubgroup(format!("no embedding for {name:?}")))?;
            image.check_generators(g.generators())?;
        }
        for r in self.h_presentation.relators() {
            let image = r.substitute(&self.embedding)?;
            if g.is_free() {
                if !image.is_empty() {
                    return Err(Error::InvalidSubgroup(format!(
                        "relator {r} maps to {image}, nontrivial in the free group"
                    )));
                }
            } else if let ResidualVerdict::Nontrivial { witness, .. } =
                residual_nontriviality(g, &image, catalog, opts)?
            {
                return Err(Error::InvalidSubgroup(format!(
                    "relator {r} maps to a word that {witness} separates from the identity"
                )));
            }
        }
        Ok(())
    }

    /// Images of the `H`-generators, in declaration order.
    fn embedding_words(&self) -> Result<Vec<&Word>> {
        self.h_presentation
            .generators()
            .iter()
            .map(|name| {
                self.embedding
                    .get(name)
                    .ok_or_else(|| Error::InvalidSubgroup(format!("no embedding for {name:?}")))
            })
            .collect()
    }

    /// The constraints pinning each `H`-generator's image word to its value
    /// under `gamma`.
    pub fn constraints_for(&self, gamma: &[u16]) -> Result<Vec<Constraint>> {
        let words = self.embedding_words()?;
        if gamma.len() != words.len() {
            return Err(Error::InvalidSubgroup(format!(
                "gamma has {} entries for {} generators",
                gamma.len(),
                words.len()
            )));
        }
        Ok(words
            .into_iter()
            .zip(gamma.iter())
            .map(|(w, &target)| Constraint {
                word: w.clone(),
                target,
            })
            .collect())
    }

    fn check_gamma(&self, gamma: &[u16], p: &FiniteGroup) -> Result<()> {
        if gamma.len() != self.h_presentation.generators().len() {
            return Err(Error::NotAHomomorphism("gamma arity mismatch".into()));
        }
        for r in self.h_presentation.relators() {
            let mut acc = 0u16;
            for l in r.letters() {
                let idx = self
                    .h_presentation
                    .generators()
                    .iter()
                    .position(|g| g == &l.gen)
                    .unwrap();
                let x = if l.inv { p.inv(gamma[idx]) } else { gamma[idx] };
                acc = p.mul(acc, x);
            }
            if acc != 0 {
                return Err(Error::NotAHomomorphism(format!(
                    "gamma violates relator {r} in {}",
                    p.name()
                )));
            }
        }
        Ok(())
    }
}

/// `h(G, H, gamma, P)`: homomorphisms `G -> P` extending `gamma`.
pub fn extension_count(
    g: &Presentation,
    h: &SubgroupSpec,
    gamma: &[u16],
    p: &FiniteGroup,
    opts: &CountOptions,
) -> Result<u64> {
    h.check_gamma(gamma, p)?;
    let constraints = h.constraints_for(gamma)?;
    Ok(count_homs(g, p, &constraints, opts)?.total)
}

/// `e(G, H, gamma, P)`: epimorphisms `G ->> P` extending `gamma`.
pub fn epi_extension_count(
    g: &Presentation,
    h: &SubgroupSpec,
    gamma: &[u16],
    p: &FiniteGroup,
    opts: &CountOptions,
) -> Result<u64> {
    h.check_gamma(gamma, p)?;
    let constraints = h.constraints_for(gamma)?;
    Ok(count_epis(g, p, &constraints, opts)?.total)
}

/// Verifies `h(G,H,gamma,P) = sum over subgroups Q >= im(gamma) of
/// e(G,H,gamma^Q,Q)` exactly, by enumerating the subgroup lattice of `P`
/// and corestricting `gamma` to each eligible `Q`.
pub fn corestriction_identity_check(
    g: &Presentation,
    h: &SubgroupSpec,
    gamma: &[u16],
    p: &FiniteGroup,
    opts: &CountOptions,
) -> Result<bool> {
    let lhs = extension_count(g, h, gamma, p, opts)?;
    let image = Subgroup::generated(p, gamma);
    let mut rhs: u64 = 0;
    for q in all_subgroups(p)? {
        if !image.elements().iter().all(|&x| q.contains(x)) {
            continue;
        }
        let q_group = q.to_group()?;
        let gamma_q: Vec<u16> = gamma
            .iter()
            .map(|&x| q.index_of(x).expect("image lies in q") as u16)
            .collect();
        let constraints = h
            .constraints_for(&gamma_q)?
            .into_iter()
            .collect::<Vec<_>>();
        let e = count_epis(g, &q_group, &constraints, opts)?.total;
        rhs = rhs
            .checked_add(e)
            .ok_or_else(|| Error::Overflow("corestriction sum exceeds u64".into()))?;
    }
    Ok(lhs == rhs)
}

/// One row of a constancy table: a homomorphism `gamma` as the tuple of
/// `H`-generator images, and its extension count.
#[derive(Clone, Debug, Serialize)]
pub struct GammaCount {
    pub gamma: Vec<u16>,
    pub h: u64,
}

/// The full extension-count table of one witness group.
#[derive(Clone, Debug, Serialize)]
pub struct ConstancyReport {
    pub witness: String,
    /// `|Hom(H, P)|`
    pub gamma_count: u64,
    pub counts: Vec<GammaCount>,
    pub constant: bool,
    /// First pair of homomorphisms with different counts, in lexicographic
    /// gamma order.
    pub witness_pair: Option<(Vec<u16>, Vec<u16>)>,
    /// `|Hom(G, P)|`; always the exact sum of the table (partition identity).
    pub total_homs: u64,
    pub nodes: u64,
}

/// Computes `h(G, H, gamma, P)` for every `gamma` in `Hom(H, P)`, in
/// lexicographic gamma order, and reports whether the table is constant.
/// The partition identity `sum_gamma h = |Hom(G, P)|` is enforced; its
/// failure means the subgroup embedding is inconsistent.
pub fn constancy_test(
    g: &Presentation,
    h: &SubgroupSpec,
    p: &FiniteGroup,
    opts: &CountOptions,
) -> Result<ConstancyReport> {
    let gammas = enumerate_homs(&h.h_presentation, p, &[], opts, MAX_GAMMA_TUPLES)?;
    let rows: Vec<GammaCount> = gammas
        .into_par_iter()
        .map(|gamma| {
            let constraints = h.constraints_for(&gamma)?;
            let count = count_homs(g, p, &constraints, opts)?;
            Ok(GammaCount {
                gamma,
                h: count.total,
            })
        })
        .collect::<Result<Vec<GammaCount>>>()?;
    let total_report = count_homs(g, p, &[], opts)?;
    let sum: u64 = rows.iter().try_fold(0u64, |acc, r| {
        acc.checked_add(r.h)
            .ok_or_else(|| Error::Overflow("partition sum exceeds u64".into()))
    })?;
    if sum != total_report.total {
        return Err(Error::PartitionViolation(format!(
            "sum over gamma is {sum} but |Hom(G, {})| = {}; the subgroup \
             embedding does not satisfy its own relators in G",
            p.name(),
            total_report.total
        )));
    }
    let constant = rows.windows(2).all(|w| w[0].h == w[1].h);
    let witness_pair = if constant {
        None
    } else {
        rows.iter()
            .skip(1)
            .find(|r| r.h != rows[0].h)
            .map(|r| (rows[0].gamma.clone(), r.gamma.clone()))
    };
    Ok(ConstancyReport {
        witness: p.name().to_string(),
        gamma_count: rows.len() as u64,
        counts: rows,
        constant,
        witness_pair,
        total_homs: total_report.total,
        nodes: total_report.nodes,
    })
}

/// Scan outcome over a witness catalog.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ScanOutcome {
    /// A witness group with a non-constant table; `H` is not a free factor.
    NotFreeFactor {
        witness: String,
        gamma_pair: (Vec<u16>, Vec<u16>),
    },
    /// Every catalog group has a constant table.
    NoWitnessUpTo { max_order: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanVerdict {
    pub outcome: ScanOutcome,
    pub reports: Vec<ConstancyReport>,
}

impl ScanVerdict {
    pub fn refuted(&self) -> bool {
        matches!(self.outcome, ScanOutcome::NotFreeFactor { .. })
    }
}

/// Walks the catalog in canonical order (ascending order, then name) and
/// returns on the first witness whose table is not constant.
pub fn measure_preservation_scan(
    g: &Presentation,
    h: &SubgroupSpec,
    catalog: &[FiniteGroup],
    opts: &CountOptions,
) -> Result<ScanVerdict> {
    let mut sorted: Vec<&FiniteGroup> = catalog.iter().collect();
    sorted.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.name().cmp(b.name())));
    let mut reports = Vec::new();
    for p in &sorted {
        let report = constancy_test(g, h, p, opts)?;
        let refutation = report.witness_pair.clone();
        reports.push(report);
        if let Some(pair) = refutation {
            return Ok(ScanVerdict {
                outcome: ScanOutcome::NotFreeFactor {
                    witness: p.name().to_string(),
                    gamma_pair: pair,
                },
                reports,
            });
        }
    }
    Ok(ScanVerdict {
        outcome: ScanOutcome::NoWitnessUpTo {
            max_order: sorted.iter().map(|p| p.order()).max().unwrap_or(0),
        },
        reports,
    })
}

/// Certification oracles for the positive direction.
#[derive(Clone, Copy, Debug)]
pub enum OracleMode<'a> {
    /// Whitehead primitivity; applies to cyclic subgroups of free groups.
    Whitehead,
    /// Trivial incident edge groups; applies when `G` is the fundamental
    /// group of a graph of groups and `H` is the vertex group at `vertex`.
    TrivialEdge {
        graph: &'a GraphOfGroups,
        vertex: &'a str,
    },
    /// No oracle: the decision can be at most a refutation.
    None,
}

/// Three-valued verdict of the combined scan + oracle decision.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "decision", rename_all = "snake_case")]
pub enum Decision {
    FreeFactor { certificate: String },
    NotFreeFactor { witness: String },
    Undecided { max_order: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct DecisionReport {
    #[serde(flatten)]
    pub decision: Decision,
    pub scan: ScanVerdict,
}

/// Runs the two semi-decisions together: the scan can refute, the oracle can
/// certify. Mutual exclusion is asserted at runtime; an input on which both
/// fire would contradict the criterion itself.
pub fn free_factor_decision(
    g: &Presentation,
    h: &SubgroupSpec,
    catalog: &[FiniteGroup],
    oracle: OracleMode<'_>,
    opts: &CountOptions,
) -> Result<DecisionReport> {
    let scan = measure_preservation_scan(g, h, catalog, opts)?;
    let certificate: Option<String> = match oracle {
        OracleMode::Whitehead => {
            if !g.is_free() || h.h_presentation.generators().len() != 1
                || !h.h_presentation.is_free()
            {
                return Err(Error::InvalidSubgroup(
                    "Whitehead oracle applies to cyclic subgroups of free groups".into(),
                ));
            }
            let word = h.embedding_words()?[0];
            if is_primitive_whitehead(word, g.generators().len())? {
                Some(format!(
                    "whitehead: {word} descends to cyclic length 1, hence primitive"
                ))
            } else {
                None
            }
        }
        OracleMode::TrivialEdge { graph, vertex } => {
            if graph.trivial_edge_free_factor_check(vertex)? {
                Some(format!(
                    "graph of groups: every edge group incident to vertex {vertex:?} is trivial"
                ))
            } else {
                None
            }
        }
        OracleMode::None => None,
    };
    let decision = match (&scan.outcome, certificate) {
        (ScanOutcome::NotFreeFactor { witness, .. }, Some(cert)) => {
            return Err(Error::Inconsistent(format!(
                "scan refuted with witness {witness} but the oracle certified: {cert}"
            )));
        }
        (ScanOutcome::NotFreeFactor { witness, .. }, None) => Decision::NotFreeFactor {
            witness: witness.clone(),
        },
        (ScanOutcome::NoWitnessUpTo { .. }, Some(certificate)) => {
            Decision::FreeFactor { certificate }
        }
        (ScanOutcome::NoWitnessUpTo { max_order }, None) => Decision::Undecided {
            max_order: *max_order,
        },
    };
    Ok(DecisionReport { decision, scan })
}

/// Finite-level isomorphism-extension test. Decides whether `alpha` extends
/// to an automorphism of the (finite) ambient group by searching the
/// automorphism group, and asserts that the answer agrees with the
/// epimorphism-extension criterion computed over every catalog quotient
/// target plus the group itself.
pub fn aut_extension_test(
    gfin: &FiniteGroup,
    h1: &Subgroup<'_>,
    h2: &Subgroup<'_>,
    alpha: &FiniteIso<'_>,
    catalog: &[FiniteGroup],
) -> Result<bool> {
    if gfin.order() > crate::fingroup::MAX_AUT_ORDER {
        return Err(Error::Bound(format!(
            "aut_extension_test limited to order {}, got {}",
            crate::fingroup::MAX_AUT_ORDER,
            gfin.order()
        )));
    }
    alpha.validate()?;
    if alpha.source != *h1 || alpha.target != *h2 {
        return Err(Error::NotAHomomorphism(
            "alpha must map h1 onto h2".into(),
        ));
    }
    let extends = automorphisms(gfin)?.iter().any(|tau| {
        h1.elements()
            .iter()
            .all(|&x| tau.apply(x) == alpha.apply(x))
    });

    // criterion (d): for every target P and epimorphism phi of G onto P,
    // some epimorphism psi satisfies psi|H1 = (phi|H2) . alpha
    let mut criterion = true;
    'targets: for p in catalog.iter().chain(std::iter::once(gfin)) {
        let homs = gfin.homs_to(p);
        let epis: Vec<&Vec<u16>> = homs
            .iter()
            .filter(|map| {
                let mut image: Vec<u16> = map.to_vec();
                image.sort_unstable();
                image.dedup();
                p.closure(&image).len() == p.order()
            })
            .collect();
        for phi in &epis {
            let wanted: Vec<u16> = h1
                .elements()
                .iter()
                .map(|&x| phi[usize::from(alpha.apply(x).unwrap())])
                .collect();
            let matched = epis.iter().any(|psi| {
                h1.elements()
                    .iter()
                    .zip(wanted.iter())
                    .all(|(&x, &w)| psi[usize::from(x)] == w)
            });
            if !matched {
                criterion = false;
                break 'targets;
            }
        }
    }

    if extends != criterion {
        return Err(Error::Inconsistent(format!(
            "automorphism search says {extends} but the epimorphism-extension \
             criterion says {criterion} on {}",
            gfin.name()
        )));
    }
    Ok(extends)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingroup::{
        default_catalog, make_cyclic, make_product, make_symmetric, subgroup_isomorphisms,
    };
    use crate::presentation::free_product;

    fn opts() -> CountOptions {
        CountOptions::default()
    }

    fn pres(gens: &[&str], relators: &[&str]) -> Presentation {
        let generators: Vec<String> = gens.iter().map(|s| s.to_string()).collect();
        let relators = relators
            .iter()
            .map(|r| Word::parse_checked(r, &generators).unwrap())
            .collect();
        Presentation::new(generators, relators).unwrap()
    }

    fn cyclic_sub(g: &Presentation, word: &str) -> SubgroupSpec {
        SubgroupSpec::from_free_words(g, &[Word::parse(word).unwrap()]).unwrap()
    }

    fn supplied_sub(h: Presentation, embedding: &[(&str, &str)]) -> SubgroupSpec {
        let embedding = embedding
            .iter()
            .map(|(k, v)| (k.to_string(), Word::parse(v).unwrap()))
            .collect();
        SubgroupSpec::new(h, embedding)
    }

    #[test]
    fn extension_counts_in_free_group() {
        let f2 = pres(&["x", "y"], &[]);
        let c2 = make_cyclic(2).unwrap();
        let xy = cyclic_sub(&f2, "x y");
        assert_eq!(extension_count(&f2, &xy, &[0], &c2, &opts()).unwrap(), 2);
        assert_eq!(extension_count(&f2, &xy, &[1], &c2, &opts()).unwrap(), 2);
        let xx = cyclic_sub(&f2, "x x");
        assert_eq!(extension_count(&f2, &xx, &[0], &c2, &opts()).unwrap(), 4);
        assert_eq!(extension_count(&f2, &xx, &[1], &c2, &opts()).unwrap(), 0);
    }

    #[test]
    fn extension_counts_in_modular_quotient() {
        let g = pres(&["a", "b"], &["a a", "b b b"]);
        let s3 = make_symmetric(3).unwrap();
        let h = supplied_sub(pres(&["a"], &["a a"]), &[("a", "a")]);
        let gammas = enumerate_homs(&h.h_presentation, &s3, &[], &opts(), 100).unwrap();
        assert_eq!(gammas.len(), 4);
        for gamma in gammas {
            assert_eq!(extension_count(&g, &h, &gamma, &s3, &opts()).unwrap(), 3);
        }
    }

    #[test]
    fn identity_embedding_has_one_extension() {
        let g = pres(&["a", "b"], &["a a", "b b b"]);
        let s3 = make_symmetric(3).unwrap();
        let h = supplied_sub(g.clone(), &[("a", "a"), ("b", "b")]);
        for gamma in enumerate_homs(&g, &s3, &[], &opts(), 100).unwrap() {
            assert_eq!(extension_count(&g, &h, &gamma, &s3, &opts()).unwrap(), 1);
        }
    }

    #[test]
    fn gamma_must_be_a_homomorphism() {
        let g = pres(&["a"], &["a a"]);
        let s3 = make_symmetric(3).unwrap();
        let h = supplied_sub(pres(&["a"], &["a a"]), &[("a", "a")]);
        let three_cycle = (1..6u16).find(|&x| s3.element_order(x) == 3).unwrap();
        assert!(matches!(
            extension_count(&g, &h, &[three_cycle], &s3, &opts()),
            Err(Error::NotAHomomorphism(_))
        ));
    }

    #[test]
    fn epi_extension_examples() {
        let f2 = pres(&["x", "y"], &[]);
        let c2 = make_cyclic(2).unwrap();
        let hx = cyclic_sub(&f2, "x");
        assert_eq!(epi_extension_count(&f2, &hx, &[1], &c2, &opts()).unwrap(), 2);

        let c2p = pres(&["a"], &["a a"]);
        let whole = supplied_sub(c2p.clone(), &[("a", "a")]);
        assert_eq!(epi_extension_count(&c2p, &whole, &[1], &c2, &opts()).unwrap(), 1);

        let trivial = make_cyclic(1).unwrap();
        assert_eq!(epi_extension_count(&f2, &hx, &[0], &trivial, &opts()).unwrap(), 1);
        assert_eq!(extension_count(&f2, &hx, &[0], &trivial, &opts()).unwrap(), 1);
    }

    #[test]
    fn corestriction_identity_examples() {
        let f2 = pres(&["x", "y"], &[]);
        let c2 = make_cyclic(2).unwrap();
        let hx = cyclic_sub(&f2, "x");
        for gamma in [[0u16], [1u16]] {
            assert!(corestriction_identity_check(&f2, &hx, &gamma, &c2, &opts()).unwrap());
        }

        let g = pres(&["a", "b"], &["a a", "b b b"]);
        let s3 = make_symmetric(3).unwrap();
        let h = supplied_sub(pres(&["a"], &["a a"]), &[("a", "a")]);
        for gamma in enumerate_homs(&h.h_presentation, &s3, &[], &opts(), 100).unwrap() {
            assert!(corestriction_identity_check(&g, &h, &gamma, &s3, &opts()).unwrap());
        }

        let trivial = make_cyclic(1).unwrap();
        assert!(corestriction_identity_check(&f2, &hx, &[0], &trivial, &opts()).unwrap());
    }

    #[test]
    fn constancy_infinite_dihedral() {
        let g = pres(&["a", "b"], &["a a", "b b"]);
        let h = supplied_sub(pres(&["h1"], &[]), &[("h1", "a b")]);
        let c2 = make_cyclic(2).unwrap();
        let report = constancy_test(&g, &h, &c2, &opts()).unwrap();
        assert!(report.constant);
        assert!(report.counts.iter().all(|r| r.h == 2));

        let s3 = make_symmetric(3).unwrap();
        let report = constancy_test(&g, &h, &s3, &opts()).unwrap();
        assert!(!report.constant);
        assert_eq!(report.total_homs, 16);
        // h(identity) = 4; h = 3 at each 3-cycle; h = 2 at each transposition
        for row in &report.counts {
            let expected = match s3.element_order(row.gamma[0]) {
                1 => 4,
                2 => 2,
                3 => 3,
                _ => unreachable!(),
            };
            assert_eq!(row.h, expected);
        }
    }

    #[test]
    fn constancy_commutator() {
        let f2 = pres(&["x", "y"], &[]);
        let h = cyclic_sub(&f2, "x y x^-1 y^-1");
        let s3 = make_symmetric(3).unwrap();
        let report = constancy_test(&f2, &h, &s3, &opts()).unwrap();
        assert!(!report.constant);
        for row in &report.counts {
            let expected = match s3.element_order(row.gamma[0]) {
                1 => 18,
                2 => 0,
                3 => 9,
                _ => unreachable!(),
            };
            assert_eq!(row.h, expected);
        }
    }

    #[test]
    fn scan_examples() {
        let catalog = default_catalog();
        let f2 = pres(&["x", "y"], &[]);

        let xx = cyclic_sub(&f2, "x x");
        let verdict = measure_preservation_scan(&f2, &xx, &catalog, &opts()).unwrap();
        match &verdict.outcome {
            ScanOutcome::NotFreeFactor { witness, .. } => assert_eq!(witness, "cyclic-2"),
            other => panic!("expected refutation, got {other:?}"),
        }

        let xy = cyclic_sub(&f2, "x y");
        let verdict = measure_preservation_scan(&f2, &xy, &catalog, &opts()).unwrap();
        match &verdict.outcome {
            ScanOutcome::NoWitnessUpTo { max_order } => assert_eq!(*max_order, 24),
            other => panic!("expected clean sweep, got {other:?}"),
        }
        // a free-factor sweep sees h = |P| on every witness
        for report in &verdict.reports {
            let order = catalog
                .iter()
                .find(|p| p.name() == report.witness)
                .unwrap()
                .order() as u64;
            assert!(report.counts.iter().all(|r| r.h == order));
        }

        // D-infinity: cyclic-2 passes, cyclic-3 already refutes
        let d = pres(&["a", "b"], &["a a", "b b"]);
        let h = supplied_sub(pres(&["h1"], &[]), &[("h1", "a b")]);
        let verdict = measure_preservation_scan(&d, &h, &catalog, &opts()).unwrap();
        match &verdict.outcome {
            ScanOutcome::NotFreeFactor { witness, .. } => assert_eq!(witness, "cyclic-3"),
            other => panic!("expected refutation, got {other:?}"),
        }
        assert!(verdict.reports[0].constant); // cyclic-2 table is constant
    }

    #[test]
    fn trivial_subgroup_is_a_free_factor() {
        let catalog = default_catalog();
        let f2 = pres(&["x", "y"], &[]);
        let h = SubgroupSpec::from_free_words(&f2, &[]).unwrap();
        assert!(h.h_presentation.generators().is_empty());
        let verdict = measure_preservation_scan(&f2, &h, &catalog, &opts()).unwrap();
        assert!(!verdict.refuted());
        for report in &verdict.reports {
            assert_eq!(report.gamma_count, 1);
            assert_eq!(report.counts[0].h, report.total_homs);
        }
    }

    #[test]
    fn partition_identity_on_free_products() {
        let a = pres(&["a"], &["a a"]);
        let b = pres(&["b"], &["b b b"]);
        let g = free_product(&a, &b);
        let h = supplied_sub(a.clone(), &[("a", "a")]);
        for p in default_catalog().iter().filter(|p| p.order() <= 8) {
            let report = constancy_test(&g, &h, p, &opts()).unwrap();
            assert!(report.constant, "{}", p.name());
            let b_homs = count_homs(&b, p, &[], &opts()).unwrap().total;
            assert!(report.counts.iter().all(|r| r.h == b_homs));
            assert_eq!(
                report.counts[0].h * report.gamma_count,
                report.total_homs
            );
        }
    }

    #[test]
    fn invalid_embedding_is_rejected() {
        let catalog = default_catalog();
        let f2 = pres(&["x", "y"], &[]);
        // claims C2 structure for an infinite-order element
        let h = supplied_sub(pres(&["a"], &["a a"]), &[("a", "x")]);
        assert!(matches!(
            h.validate(&f2, &catalog, &opts()),
            Err(Error::InvalidSubgroup(_))
        ));
        // and the partition identity flags it during a constancy test
        let c2 = make_cyclic(2).unwrap();
        let ok = constancy_test(&f2, &h, &c2, &opts());
        assert!(ok.is_ok()); // C2 cannot see the violation: x^2 maps to 0
        let s3 = make_symmetric(3).unwrap();
        assert!(matches!(
            constancy_test(&f2, &h, &s3, &opts()),
            Err(Error::PartitionViolation(_))
        ));
    }

    #[test]
    fn decision_examples() {
        let catalog = default_catalog();
        let f2 = pres(&["x", "y"], &[]);

        let xy = cyclic_sub(&f2, "x y");
        let report =
            free_factor_decision(&f2, &xy, &catalog, OracleMode::Whitehead, &opts()).unwrap();
        assert!(matches!(report.decision, Decision::FreeFactor { .. }));

        let xxyy = cyclic_sub(&f2, "x x y y");
        let report =
            free_factor_decision(&f2, &xxyy, &catalog, OracleMode::Whitehead, &opts()).unwrap();
        match report.decision {
            Decision::NotFreeFactor { witness } => assert_eq!(witness, "cyclic-2"),
            other => panic!("expected refutation, got {other:?}"),
        }

        let undecided = free_factor_decision(&f2, &xxyy, &catalog, OracleMode::None, &opts());
        assert!(matches!(
            undecided.unwrap().decision,
            Decision::NotFreeFactor { .. }
        ));
    }

    #[test]
    fn decision_with_trivial_edge_oracle() {
        use crate::gog::{GogDescriptor};
        let catalog = default_catalog();
        let json = r#"{
            "vertices": {"a": {"kind":"cyclic","n":2}, "b": {"kind":"cyclic","n":3}},
            "edges": [{"id":"e1","from":"a","to":"b","group":{"kind":"cyclic","n":1},"iota":[0],"tau":[0]}]
        }"#;
        let graph: GogDescriptor = serde_json::from_str(json).unwrap();
        let graph = graph.build().unwrap();
        let fp = graph
            .fundamental_presentation(&graph.maximal_tree("a").unwrap())
            .unwrap();
        let h = supplied_sub(pres(&["a"], &["a a"]), &[("a", "a")]);
        let report = free_factor_decision(
            &fp.presentation,
            &h,
            &catalog,
            OracleMode::TrivialEdge {
                graph: &graph,
                vertex: "a",
            },
            &opts(),
        )
        .unwrap();
        assert!(matches!(report.decision, Decision::FreeFactor { .. }));
    }

    #[test]
    fn aut_extension_examples() {
        let catalog = default_catalog();
        let v4 = make_product(&make_cyclic(2).unwrap(), &make_cyclic(2).unwrap()).unwrap();
        // swap the two factors: (a, b) indices  a*2+b; factor one = {0, 2},
        // factor two = {0, 1}
        let h1 = Subgroup::generated(&v4, &[2]);
        let h2 = Subgroup::generated(&v4, &[1]);
        let alpha = subgroup_isomorphisms(&h1, &h2).unwrap().remove(0);
        assert!(aut_extension_test(&v4, &h1, &h2, &alpha, &catalog).unwrap());

        let c2c4 = make_product(&make_cyclic(2).unwrap(), &make_cyclic(4).unwrap()).unwrap();
        // x = (1, 0) at index 4; y^2 = (0, 2) at index 2
        let hx = Subgroup::generated(&c2c4, &[4]);
        let hy2 = Subgroup::generated(&c2c4, &[2]);
        let alpha = subgroup_isomorphisms(&hx, &hy2).unwrap().remove(0);
        assert!(!aut_extension_test(&c2c4, &hx, &hy2, &alpha, &catalog).unwrap());

        let id = FiniteIso::identity(hx.clone());
        assert!(aut_extension_test(&c2c4, &hx, &hx, &id, &catalog).unwrap());
    }
}
