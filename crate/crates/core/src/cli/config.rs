use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use crate::baseline::Hyperparams;
use crate::pipeline::PipelineConfig;
use crate::tlk::CodepageConfig;

/// Talk tables of one game, language code to file path. Relative paths are
/// resolved against the config file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    pub id: String,
    pub tables: BTreeMap<String, PathBuf>,
}

/// Everything a `build` run needs, read from one TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub output_dir: PathBuf,
    #[serde(default)]
    pub pipeline: PipelineConfig,
    #[serde(default)]
    pub codepages: CodepageConfig,
    #[serde(default)]
    pub baseline: Hyperparams,
    #[serde(default)]
    pub games: Vec<GameConfig>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text)?;
        config.check()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    fn check(&self) -> Result<()> {
        self.pipeline.validate()?;
        self.codepages.validate()?;
        if self.games.is_empty() {
            bail!("no [[games]] configured");
        }
        for g in &self.games {
            for language in &self.pipeline.languages {
                if !g.tables.contains_key(language) {
                    bail!("game {:?} has no talk table for language {language:?}", g.id);
                }
            }
        }
        Ok(())
    }
}

/// Commented default configuration printed by `dump-config`.
pub const DEFAULT_CONFIG: &str = r#"# Corpus build configuration.
# Relative paths are resolved against the directory holding this file.

# Directory the corpus is written to. It is replaced atomically; an existing
# non-empty directory without a manifest.json is never overwritten.
output_dir = "corpus"

[pipeline]
# Language codes to include. Every game must provide a table for each.
languages = ["en", "es", "de", "fr", "it"]
# Language whose tags label every line.
pivot_language = "en"
# Regexes matching a complete bracketed persuasion tag, brackets included.
# Any match labels the line persuade; hybrid tags such as [Persuade/Lie]
# are covered by the default.
tag_patterns = ['(?i)\[\s*persua(?:de|sion)\b[^\[\]]*\]']
# Regexes marking developer comments; matching lines are dropped from
# non-pivot languages before alignment.
comment_denylist = ['(?i)do\s+not\s+translate', '(?i)placeholder']
# Target share of persuade lines after balancing. Non-persuade lines are
# subsampled; persuade lines are always kept.
persuade_fraction = 0.2
# Train, validation and test shares of dialogue lines.
split_fractions = [0.7, 0.15, 0.15]
# Seed for balancing and split assignment.
seed = 42

# Encoding of talk-table text by TLK language id. Ids not listed use
# `default`. Labels are WHATWG encoding names.
[codepages]
default = "windows-1252"
languages = { 0 = "windows-1252", 1 = "windows-1252", 2 = "windows-1252", 3 = "windows-1252", 4 = "windows-1252" }

# Logistic-regression baseline used by `train-baseline`.
[baseline]
learning_rate = 0.1
epochs = 200
l2 = 0.0001
seed = 42

# One block per game. Binary .tlk and XML talk tables are both accepted.
[[games]]
id = "game1"
tables = { en = "game1/dialog.en.tlk", es = "game1/dialog.es.tlk", de = "game1/dialog.de.tlk", fr = "game1/dialog.fr.tlk", it = "game1/dialog.it.tlk" }
"#;
