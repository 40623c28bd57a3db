//! Human-readable table rendering. JSON mode bypasses all of this.

use freefactor::factor::{ConstancyReport, ScanOutcome, ScanVerdict};
use freefactor::gog::{FundamentalPresentation, MaximalTree};
use freefactor::presentation::{Constraint, Presentation};
use freefactor::wordmeasure::{ExactRational, WordDistribution};

pub fn homcount(
    presentation: &Presentation,
    codomain: &str,
    epi: bool,
    constraints: &[Constraint],
    total: u64,
    nodes: u64,
) -> String {
    let mut s = String::new();
    s.push_str(&format!("presentation: {presentation}\n"));
    s.push_str(&format!("codomain:     {codomain}\n"));
    s.push_str(&format!(
        "counting:     {}\n",
        if epi { "epimorphisms" } else { "homomorphisms" }
    ));
    for c in constraints {
        s.push_str(&format!("constraint:   {} -> {}\n", c.word, c.target));
    }
    s.push_str(&format!("total:        {total}\n"));
    s.push_str(&format!("nodes:        {nodes}\n"));
    s
}

fn gamma_string(gamma: &[u16]) -> String {
    let parts: Vec<String> = gamma.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

pub fn constancy(report: &ConstancyReport) -> String {
    let mut s = String::new();
    s.push_str(&format!("witness:    {}\n", report.witness));
    s.push_str(&format!("|Hom(H,P)|: {}\n", report.gamma_count));
    s.push_str(&format!("|Hom(G,P)|: {}\n", report.total_homs));
    s.push_str("  gamma -> h\n");
    for row in &report.counts {
        s.push_str(&format!("  {:<12} {}\n", gamma_string(&row.gamma), row.h));
    }
    s.push_str(&format!(
        "constant:   {}\n",
        if report.constant { "yes" } else { "NO" }
    ));
    if let Some((a, b)) = &report.witness_pair {
        s.push_str(&format!(
            "violation:  h{} != h{}\n",
            gamma_string(a),
            gamma_string(b)
        ));
    }
    s
}

pub fn scan(verdict: &ScanVerdict) -> String {
    let mut s = String::new();
    for report in &verdict.reports {
        s.push_str(&format!(
            "{:<24} |Hom(H,P)| = {:<6} constant: {}\n",
            report.witness,
            report.gamma_count,
            if report.constant { "yes" } else { "NO" }
        ));
    }
    match &verdict.outcome {
        ScanOutcome::NotFreeFactor { witness, gamma_pair } => {
            s.push_str(&format!(
                "verdict: NOT_FREE_FACTOR (witness {witness}, gamma pair {} vs {})\n",
                gamma_string(&gamma_pair.0),
                gamma_string(&gamma_pair.1)
            ));
        }
        ScanOutcome::NoWitnessUpTo { max_order } => {
            s.push_str(&format!(
                "verdict: NO_WITNESS_UP_TO (catalog max order {max_order})\n"
            ));
        }
    }
    s
}

pub fn gog(fp: &FundamentalPresentation, tree: &MaximalTree) -> String {
    let mut s = String::new();
    s.push_str(&format!("presentation: {}\n", fp.presentation));
    let tree_edges: Vec<&str> = tree.edge_ids.iter().map(|s| s.as_str()).collect();
    s.push_str(&format!("tree edges:   [{}]\n", tree_edges.join(", ")));
    for (edge, q) in &fp.stable_letters {
        s.push_str(&format!("stable letter: {edge} -> {q}\n"));
    }
    for (vertex, words) in &fp.vertex_embeddings {
        let rendered: Vec<String> = words
            .iter()
            .enumerate()
            .map(|(i, w)| {
                if w.is_empty() {
                    format!("{i}=1")
                } else {
                    format!("{i}={w}")
                }
            })
            .collect();
        s.push_str(&format!("vertex {vertex}: {}\n", rendered.join("  ")));
    }
    s
}

pub fn measure(
    dist: &WordDistribution,
    deviation: ExactRational,
    expectation: Option<ExactRational>,
) -> String {
    let mut s = String::new();
    s.push_str(&format!("word:     {}\n", dist.word));
    s.push_str(&format!("rank:     {}\n", dist.rank));
    s.push_str(&format!("codomain: {}\n", dist.codomain));
    s.push_str(&format!("total:    {}\n", dist.total));
    s.push_str("  element -> count\n");
    for (elt, count) in dist.counts.iter().enumerate() {
        s.push_str(&format!("  {elt:<8} {count}\n"));
    }
    s.push_str(&format!(
        "uniform:  {}\n",
        if dist.is_uniform() { "yes" } else { "no" }
    ));
    s.push_str(&format!("tv-deviation: {}/{}\n", deviation.num, deviation.den));
    if let Some(e) = expectation {
        s.push_str(&format!("expected fixed points: {}/{}\n", e.num, e.den));
    }
    s
}
