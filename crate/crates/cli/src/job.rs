//! Job configuration shared by every subcommand, and the JSON input shapes.

use std::path::PathBuf;
use std::time::Duration;

use anyhow::{bail, Context};
use serde::Deserialize;

use freefactor::factor::SubgroupSpec;
use freefactor::fingroup::{
    default_catalog, group_by_name, sort_catalog, FiniteGroup, GroupDescriptor,
};
use freefactor::gog::GogDescriptor;
use freefactor::presentation::{CountOptions, Presentation};
use freefactor::words::Word;

/// Everything a command run needs besides its input file.
#[derive(Debug)]
pub struct JobSpec {
    pub input: Option<PathBuf>,
    pub catalog: Vec<FiniteGroup>,
    pub budget_nodes: u64,
    pub budget_wall: Option<Duration>,
    pub json: bool,
    pub workers: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub seed: u64,
}

impl JobSpec {
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.budget_nodes == 0 {
            bail!("node budget must be positive");
        }
        if self.catalog.is_empty() {
            bail!("catalog must not be empty");
        }
        Ok(())
    }

    pub fn count_options(&self) -> CountOptions {
        CountOptions {
            node_budget: self.budget_nodes,
            ..CountOptions::default()
        }
    }

    pub fn read_input(&self) -> anyhow::Result<String> {
        let path = self
            .input
            .as_ref()
            .context("this command requires --input FILE")?;
        std::fs::read_to_string(path)
            .with_context(|| format!("cannot read input file {}", path.display()))
    }
}

/// Builds the witness catalog from the flag values: explicit names win,
/// otherwise the default catalog optionally truncated by order. The result
/// is always in canonical scan order.
pub fn resolve_catalog(
    names: Option<&str>,
    max_order: Option<usize>,
) -> anyhow::Result<Vec<FiniteGroup>> {
    let mut groups = match names {
        Some(names) => {
            let mut groups = Vec::new();
            for name in names.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                groups.push(group_by_name(name).with_context(|| format!("--catalog {name:?}"))?);
            }
            groups
        }
        None => default_catalog(),
    };
    if let Some(max) = max_order {
        groups.retain(|g| g.order() <= max);
    }
    sort_catalog(&mut groups);
    Ok(groups)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomcountInput {
    pub presentation: Presentation,
    pub group: GroupDescriptor,
    #[serde(default)]
    pub constraints: Vec<ConstraintInput>,
    #[serde(default)]
    pub epi: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintInput {
    pub word: Word,
    pub target: u16,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstancyInput {
    pub presentation: Presentation,
    pub group: GroupDescriptor,
    #[serde(flatten)]
    pub subgroup: SubgroupInput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanInput {
    pub presentation: Presentation,
    #[serde(flatten)]
    pub subgroup: SubgroupInput,
}

/// A subgroup is either a full spec (presentation + embedding) or, for free
/// ambient groups, a plain list of generating words.
#[derive(Debug, Deserialize)]
pub struct SubgroupInput {
    #[serde(default)]
    pub subgroup: Option<SubgroupSpec>,
    #[serde(default)]
    pub subgroup_generators: Option<Vec<Word>>,
}

impl SubgroupInput {
    pub fn resolve(&self, g: &Presentation) -> anyhow::Result<SubgroupSpec> {
        match (&self.subgroup, &self.subgroup_generators) {
            (Some(spec), None) => Ok(spec.clone()),
            (None, Some(words)) => {
                SubgroupSpec::from_free_words(g, words).map_err(anyhow::Error::from)
            }
            (Some(_), Some(_)) => bail!("give either subgroup or subgroup_generators, not both"),
            (None, None) => bail!("missing subgroup (or subgroup_generators)"),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimitiveInput {
    pub word: Word,
    pub rank: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GogInput {
    pub graph: GogDescriptor,
    #[serde(default)]
    pub normalize: bool,
    #[serde(default)]
    pub tree_seed: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureInput {
    pub word: Word,
    pub rank: usize,
    pub group: GroupDescriptor,
}
