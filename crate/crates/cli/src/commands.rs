//! One function per subcommand. Each returns the JSON value, the human
//! rendering, and the exit code; main picks which view to print.

use anyhow::{anyhow, bail, Context};
use serde_json::json;

use freefactor::factor::{self, ScanOutcome, SubgroupSpec};
use freefactor::fingroup::default_catalog;
use freefactor::presentation::{self, Constraint, Presentation};
use freefactor::wordmeasure::{self, ExactRational};
use freefactor::words::{is_primitive_whitehead, Word};

use crate::cache::Cache;
use crate::job::{
    ConstancyInput, GogInput, HomcountInput, JobSpec, MeasureInput, PrimitiveInput, ScanInput,
};
use crate::render;
use crate::{EXIT_OK, EXIT_REFUTED};

pub struct CmdResult {
    pub json: serde_json::Value,
    pub human: String,
    pub exit_code: i32,
}

fn check_wall(job: &JobSpec, started: std::time::Instant) -> anyhow::Result<()> {
    if let Some(limit) = job.budget_wall {
        if started.elapsed() > limit {
            bail!("wall-clock budget of {limit:?} exceeded");
        }
    }
    Ok(())
}

pub fn cmd_homcount(job: &JobSpec) -> anyhow::Result<CmdResult> {
    let input: HomcountInput = serde_json::from_str(&job.read_input()?)?;
    input.presentation.validate()?;
    let group = input.group.build()?;
    let constraints: Vec<Constraint> = input
        .constraints
        .iter()
        .map(|c| Constraint {
            word: c.word.clone(),
            target: c.target,
        })
        .collect();
    for c in &constraints {
        c.word.check_generators(input.presentation.generators())?;
    }
    let opts = job.count_options();

    let problem = json!({
        "schema": "homcount",
        "presentation": input.presentation,
        "group": input.group,
        "constraints": constraints,
        "epi": input.epi,
    });
    let key = Cache::key_for(&problem);
    let cache = match &job.cache_dir {
        Some(dir) => Some(Cache::open(dir)?),
        None => None,
    };

    let (total, nodes) = match cache.as_ref().and_then(|c| c.get(&key)) {
        Some(entry) => (entry.total, entry.nodes),
        None => {
            let report = if input.epi {
                presentation::count_epis(&input.presentation, &group, &constraints, &opts)?
            } else {
                presentation::count_homs(&input.presentation, &group, &constraints, &opts)?
            };
            if let Some(cache) = &cache {
                cache.put(&key, report.total, report.nodes)?;
            }
            (report.total, report.nodes)
        }
    };

    let json = json!({
        "command": "homcount",
        "presentation": input.presentation,
        "codomain": group.name(),
        "epi": input.epi,
        "constraints": constraints,
        "total": total,
        "nodes": nodes,
    });
    let human = render::homcount(&input.presentation, group.name(), input.epi, &constraints, total, nodes);
    Ok(CmdResult {
        json,
        human,
        exit_code: EXIT_OK,
    })
}

// embeddings into non-free groups are validated by residual probing only,
// which is sound but incomplete; surfaced so reports are read accordingly
fn embedding_caveat(presentation: &Presentation) -> &'static str {
    if presentation.is_free() {
        ""
    } else {
        "note: the ambient group is not free; the subgroup embedding passed \
         the residual check, a necessary but not sufficient condition\n"
    }
}

pub fn cmd_constancy(job: &JobSpec) -> anyhow::Result<CmdResult> {
    let input: ConstancyInput = serde_json::from_str(&job.read_input()?)?;
    input.presentation.validate()?;
    let group = input.group.build()?;
    let subgroup = input.subgroup.resolve(&input.presentation)?;
    let opts = job.count_options();
    subgroup.validate(&input.presentation, &job.catalog, &opts)?;
    let report = factor::constancy_test(&input.presentation, &subgroup, &group, &opts)?;
    let human = format!(
        "{}{}",
        render::constancy(&report),
        embedding_caveat(&input.presentation)
    );
    Ok(CmdResult {
        json: json!({"command": "constancy", "report": report}),
        human,
        exit_code: EXIT_OK,
    })
}

pub fn cmd_scan(job: &JobSpec) -> anyhow::Result<CmdResult> {
    let started = std::time::Instant::now();
    let input: ScanInput = serde_json::from_str(&job.read_input()?)?;
    input.presentation.validate()?;
    let subgroup = input.subgroup.resolve(&input.presentation)?;
    let opts = job.count_options();
    subgroup.validate(&input.presentation, &job.catalog, &opts)?;
    check_wall(job, started)?;
    let verdict = factor::measure_preservation_scan(
        &input.presentation,
        &subgroup,
        &job.catalog,
        &opts,
    )?;
    check_wall(job, started)?;
    let exit_code = if verdict.refuted() { EXIT_REFUTED } else { EXIT_OK };
    let human = format!(
        "{}{}",
        render::scan(&verdict),
        embedding_caveat(&input.presentation)
    );
    Ok(CmdResult {
        json: json!({"command": "scan", "verdict": verdict}),
        human,
        exit_code,
    })
}

pub fn cmd_primitive(job: &JobSpec) -> anyhow::Result<CmdResult> {
    let input: PrimitiveInput = serde_json::from_str(&job.read_input()?)?;
    let primitive = is_primitive_whitehead(&input.word, input.rank)?;
    // cross-report the witness scan for <word> inside the free group
    let alphabet = freefactor::words::Alphabet::infer(
        std::slice::from_ref(&input.word),
        input.rank,
    )?;
    let free = Presentation::new(alphabet.names().to_vec(), Vec::new())?;
    let opts = job.count_options();
    let (scan_json, scan_human, consistent) = if input.word.is_empty() {
        (serde_json::Value::Null, String::from("(empty word: no scan)"), true)
    } else {
        let subgroup = SubgroupSpec::from_free_words(&free, std::slice::from_ref(&input.word))?;
        let verdict =
            factor::measure_preservation_scan(&free, &subgroup, &job.catalog, &opts)?;
        let consistent = !(primitive && verdict.refuted());
        let human = render::scan(&verdict);
        (serde_json::to_value(&verdict)?, human, consistent)
    };
    if !consistent {
        bail!("inconsistency: a primitive word was refuted by a finite witness");
    }
    let json = json!({
        "command": "primitive",
        "word": input.word,
        "rank": input.rank,
        "primitive": primitive,
        "scan": scan_json,
    });
    let human = format!(
        "word: {}\nrank: {}\nprimitive (Whitehead): {}\n--- witness scan ---\n{}",
        input.word, input.rank, primitive, scan_human
    );
    Ok(CmdResult {
        json,
        human,
        exit_code: EXIT_OK,
    })
}

pub fn cmd_gog(job: &JobSpec) -> anyhow::Result<CmdResult> {
    let input: GogInput = serde_json::from_str(&job.read_input()?)?;
    let graph = input.graph.build()?;
    let diagnostics = graph.validate();
    if !diagnostics.is_empty() {
        return Err(anyhow!(
            "graph of groups is invalid: {}",
            diagnostics.join("; ")
        ));
    }
    let graph = if input.normalize {
        graph.normalize()?
    } else {
        graph
    };
    let seed = match &input.tree_seed {
        Some(seed) => seed.clone(),
        None => graph
            .vertices()
            .keys()
            .next()
            .context("graph has no vertices")?
            .clone(),
    };
    let tree = graph.maximal_tree(&seed)?;
    let fp = graph.fundamental_presentation(&tree)?;
    let json = json!({
        "command": "gog",
        "normalized": input.normalize,
        "tree_seed": seed,
        "tree_edges": tree.edge_ids,
        "presentation": fp.presentation,
        "display": fp.presentation.to_string(),
        "stable_letters": fp.stable_letters,
        "vertex_embeddings": fp.vertex_embeddings,
    });
    let human = render::gog(&fp, &tree);
    Ok(CmdResult {
        json,
        human,
        exit_code: EXIT_OK,
    })
}

pub fn cmd_measure(job: &JobSpec) -> anyhow::Result<CmdResult> {
    let input: MeasureInput = serde_json::from_str(&job.read_input()?)?;
    let group = input.group.build()?;
    let dist = wordmeasure::word_value_distribution(&input.word, input.rank, &group)?;
    let deviation: ExactRational =
        wordmeasure::uniformity_deviation(&input.word, input.rank, &group)?.into();
    // expected fixed points only makes sense against a permutation
    // realization; the symmetric family carries one
    let expectation: Option<ExactRational> = match group.perm_realization() {
        Some(perms) => {
            let degree = perms.first().map(|p| p.len()).unwrap_or(0);
            if group.name().starts_with("symmetric-") && degree <= 6 {
                Some(
                    wordmeasure::expected_fixed_points(&input.word, input.rank, degree)?.into(),
                )
            } else {
                None
            }
        }
        None => None,
    };
    let json = json!({
        "command": "measure",
        "word": dist.word,
        "rank": dist.rank,
        "codomain": dist.codomain,
        "counts": dist.counts,
        "total": dist.total,
        "uniform": dist.is_uniform(),
        "deviation": deviation,
        "expected_fixed_points": expectation,
    });
    let human = render::measure(&dist, deviation, expectation);
    Ok(CmdResult {
        json,
        human,
        exit_code: EXIT_OK,
    })
}

pub fn cmd_selftest(job: &JobSpec) -> anyhow::Result<CmdResult> {
    let mut checks: Vec<(String, bool, String)> = Vec::new();
    let opts = job.count_options();
    let record = |checks: &mut Vec<(String, bool, String)>, name: &str, outcome: anyhow::Result<()>| {
        match outcome {
            Ok(()) => checks.push((name.to_string(), true, String::new())),
            Err(e) => checks.push((name.to_string(), false, e.to_string())),
        }
    };

    record(&mut checks, "catalog group axioms", (|| {
        for g in default_catalog() {
            g.validate()?;
        }
        Ok(())
    })());

    record(&mut checks, "free-group counting baselines", (|| {
        for p in default_catalog() {
            for rank in 1..=2usize {
                let f = Presentation::free(rank);
                let total = presentation::count_homs(&f, &p, &[], &opts)?.total;
                if total != (p.order() as u64).pow(rank as u32) {
                    bail!("|Hom(F{rank}, {})| = {total}", p.name());
                }
            }
        }
        Ok(())
    })());

    record(&mut checks, "backtracking equals naive enumeration", (|| {
        let g = Presentation::new(
            vec!["a".into(), "b".into()],
            vec![Word::parse("a a")?, Word::parse("b b b")?],
        )?;
        let s3 = freefactor::fingroup::make_symmetric(3)?;
        let fast = presentation::count_homs(&g, &s3, &[], &opts)?.total;
        let mut slow = 0u64;
        for a in 0..6u16 {
            for b in 0..6u16 {
                if s3.mul(a, a) == 0 && s3.mul(b, s3.mul(b, b)) == 0 {
                    slow += 1;
                }
            }
        }
        if fast != slow {
            bail!("backtracking {fast} != naive {slow}");
        }
        Ok(())
    })());

    record(&mut checks, "partition identity on seeded corpus", (|| {
        use rand::seq::SliceRandom;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(job.seed);
        let catalog = default_catalog();
        let letters = ["a", "b"].as_slice();
        for _ in 0..10 {
            let gens: Vec<String> = letters.iter().map(|s| s.to_string()).collect();
            let len = rng.gen_range(1..=3);
            let word = Word::reduce((0..len).map(|_| {
                freefactor::words::Letter::new(
                    *letters.choose(&mut rng).unwrap(),
                    rng.gen_bool(0.5),
                )
            }));
            if word.is_empty() {
                continue;
            }
            let g = Presentation::new(gens, Vec::new())?;
            let h = SubgroupSpec::from_free_words(&g, std::slice::from_ref(&word))?;
            let p = catalog[rng.gen_range(0..catalog.len())].clone();
            if p.order() > 8 {
                continue;
            }
            let report = factor::constancy_test(&g, &h, &p, &opts)?;
            let sum: u64 = report.counts.iter().map(|r| r.h).sum();
            if sum != report.total_homs {
                bail!("partition identity failed on {} for {word}", p.name());
            }
        }
        Ok(())
    })());

    record(&mut checks, "free-product multiplicativity", (|| {
        let a = Presentation::new(vec!["a".into()], vec![Word::parse("a a")?])?;
        let b = Presentation::new(vec!["b".into()], vec![Word::parse("b b b")?])?;
        let ab = presentation::free_product(&a, &b);
        for p in default_catalog().into_iter().filter(|p| p.order() <= 8) {
            let lhs = presentation::count_homs(&ab, &p, &[], &opts)?.total;
            let rhs = presentation::count_homs(&a, &p, &[], &opts)?.total
                * presentation::count_homs(&b, &p, &[], &opts)?.total;
            if lhs != rhs {
                bail!("multiplicativity failed on {}", p.name());
            }
        }
        Ok(())
    })());

    record(&mut checks, "corestriction identity spot check", (|| {
        let g = Presentation::new(
            vec!["a".into(), "b".into()],
            vec![Word::parse("a a")?, Word::parse("b b b")?],
        )?;
        let h = SubgroupSpec::new(
            Presentation::new(vec!["h1".into()], Vec::new())?,
            [("h1".to_string(), Word::parse("a")?)].into_iter().collect(),
        );
        let s3 = freefactor::fingroup::make_symmetric(3)?;
        for gamma in 0..6u16 {
            if s3.mul(gamma, gamma) != 0 {
                continue;
            }
            if !factor::corestriction_identity_check(&g, &h, &[gamma], &s3, &opts)? {
                bail!("corestriction identity failed at gamma = {gamma}");
            }
        }
        Ok(())
    })());

    record(&mut checks, "whitehead and scan verdicts agree", (|| {
        let free2 = Presentation::new(vec!["x".into(), "y".into()], Vec::new())?;
        for (text, primitive) in [("x y", true), ("x x", false)] {
            let w = Word::parse(text)?;
            if is_primitive_whitehead(&w, 2)? != primitive {
                bail!("Whitehead verdict changed for {text}");
            }
            let h = SubgroupSpec::from_free_words(&free2, std::slice::from_ref(&w))?;
            let verdict =
                factor::measure_preservation_scan(&free2, &h, &default_catalog(), &opts)?;
            if primitive && verdict.refuted() {
                bail!("primitive {text} was refuted");
            }
            if !primitive && !verdict.refuted() {
                bail!("{text} should be refuted within the default catalog");
            }
        }
        Ok(())
    })());

    record(&mut checks, "worker-count independence", (|| {
        let g = Presentation::new(
            vec!["a".into(), "b".into()],
            vec![Word::parse("a a")?],
        )?;
        let s3 = freefactor::fingroup::make_symmetric(3)?;
        let mut outputs = Vec::new();
        for threads in [1usize, 2] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()?;
            let report = pool.install(|| presentation::count_homs(&g, &s3, &[], &opts))?;
            outputs.push(serde_json::to_string(&report)?);
        }
        if outputs[0] != outputs[1] {
            bail!("reports differ across worker counts");
        }
        Ok(())
    })());

    if let Some(dir) = &job.cache_dir {
        record(&mut checks, "cache transparency", (|| {
            let cache = Cache::open(dir)?;
            let problem = serde_json::json!({"schema": "selftest", "seed": job.seed});
            let key = Cache::key_for(&problem);
            let g = Presentation::free(2);
            let s3 = freefactor::fingroup::make_symmetric(3)?;
            let report = presentation::count_homs(&g, &s3, &[], &opts)?;
            cache.put(&key, report.total, report.nodes)?;
            let entry = cache.get(&key).ok_or_else(|| anyhow!("cache miss after put"))?;
            let again = presentation::count_homs(&g, &s3, &[], &opts)?;
            if entry.total != again.total || entry.nodes != again.nodes {
                bail!("cache entry disagrees with recomputation");
            }
            Ok(())
        })());
    }

    let ok = checks.iter().all(|(_, ok, _)| *ok);
    let json = json!({
        "command": "selftest",
        "checks": checks
            .iter()
            .map(|(name, ok, detail)| json!({"name": name, "ok": ok, "detail": detail}))
            .collect::<Vec<_>>(),
        "ok": ok,
    });
    let mut human = String::new();
    for (name, ok, detail) in &checks {
        human.push_str(&format!(
            "selftest {name}: {}{}\n",
            if *ok { "ok" } else { "FAIL" },
            if detail.is_empty() {
                String::new()
            } else {
                format!(" ({detail})")
            }
        ));
    }
    human.push_str(&format!("selftest: {}\n", if ok { "PASS" } else { "FAIL" }));
    Ok(CmdResult {
        json,
        human,
        exit_code: if ok { EXIT_OK } else { crate::EXIT_ERROR },
    })
}

/// Verdict helper used by the scan exit code tests.
pub fn scan_refuted(outcome: &ScanOutcome) -> bool {
    matches!(outcome, ScanOutcome::NotFreeFactor { .. })
}
