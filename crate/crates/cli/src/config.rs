//! Effective run configuration: defaults, then the config file, then flags.

use std::path::{Path, PathBuf};

use cpgnorm::attack::{AttackKind, AttackSpec};
use cpgnorm::catalog::{NormalizationConfig, TransformationId};
use cpgnorm::compare::corpus::Approach;
use cpgnorm::compare::DEFAULT_MIN_MATCH;
use cpgnorm::evalx::corpus::DEFAULT_PROGRAMS;
use cpgnorm::evalx::experiment::{DEFAULT_ATTACKED, MIN_INTENSITY};
use cpgnorm::pattern::DEFAULT_PASS_CAP;
use serde::{Deserialize, Serialize};

use crate::Common;

pub const DEFAULT_OUT: &str = "out";

/// Keys accepted in a `--config` file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub min_match: Option<usize>,
    pub mode: Option<String>,
    pub disable: Option<Vec<String>>,
    pub reorder: Option<bool>,
    pub dead_code: Option<bool>,
    pub cap: Option<usize>,
    pub seed: Option<u64>,
    pub intensity: Option<usize>,
    pub kind: Option<String>,
    pub attacked: Option<usize>,
    pub count: Option<usize>,
}

impl FileConfig {
    pub fn read(path: &Path) -> Result<FileConfig, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub command: String,
    pub input: Option<PathBuf>,
    pub out: PathBuf,
    pub jobs: Option<usize>,
    pub min_match: usize,
    pub mode: Approach,
    pub normalization: NormalizationConfig,
    pub seed: u64,
    pub intensity: usize,
    pub kind: AttackKind,
    pub attacked: usize,
    pub count: usize,
}

impl RunConfig {
    pub fn resolve(command: &str, cli: &Common, file: &FileConfig) -> Result<RunConfig, String> {
        let mode = match cli.mode.as_ref().or(file.mode.as_ref()) {
            Some(m) => m.parse()?,
            None => Approach::Normalized,
        };
        let kind = match cli.kind.as_ref().or(file.kind.as_ref()) {
            Some(k) => k.parse()?,
            None => AttackKind::Insertion,
        };
        let disabled: &[String] = if cli.disable.is_empty() { file.disable.as_deref().unwrap_or(&[]) } else { &cli.disable };
        let ids = disabled
            .iter()
            .map(|d| d.trim().parse::<TransformationId>().map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        let mut normalization = NormalizationConfig::without(&ids);
        normalization.reorder = !cli.no_reorder && file.reorder.unwrap_or(true);
        normalization.dead_code = !cli.no_dead_code && file.dead_code.unwrap_or(true);
        normalization.cap = file.cap.unwrap_or(DEFAULT_PASS_CAP);
        let min_match = cli.min_match.or(file.min_match).unwrap_or(DEFAULT_MIN_MATCH);
        if min_match == 0 {
            return Err("--min-match must be at least 1".into());
        }
        let intensity = cli.intensity.or(file.intensity).unwrap_or(MIN_INTENSITY);
        if intensity == 0 {
            return Err("--intensity must be at least 1".into());
        }
        if cli.jobs.or(file.jobs) == Some(0) {
            return Err("--jobs must be at least 1".into());
        }
        Ok(RunConfig {
            command: command.to_string(),
            input: cli.input.clone().or(file.input.clone()),
            out: cli.out.clone().or(cli.output.clone()).or(file.out.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            jobs: cli.jobs.or(file.jobs),
            min_match,
            mode,
            normalization,
            seed: cli.seed.or(file.seed).unwrap_or(0),
            intensity,
            kind,
            attacked: cli.attacked.or(file.attacked).unwrap_or(DEFAULT_ATTACKED),
            count: cli.count.or(file.count).unwrap_or(DEFAULT_PROGRAMS),
        })
    }

    pub fn attack_spec(&self) -> AttackSpec {
        AttackSpec { kind: self.kind, intensity: self.intensity, seed: self.seed, ..AttackSpec::default() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: FileConfig = toml::from_str("min_match = 4\nmode = \"baseline\"\ndisable = [\"T5\"]\nseed = 3").unwrap();
        let cli = Common { min_match: Some(7), ..Common::default() };
        let cfg = RunConfig::resolve("detect", &cli, &file).unwrap();
        assert_eq!(cfg.min_match, 7);
        assert_eq!(cfg.mode, Approach::Baseline);
        assert_eq!(cfg.seed, 3);
        assert!(!cfg.normalization.enabled.contains(&TransformationId::T5));
    }

    #[test]
    fn bad_values_rejected() {
        let cli = Common { min_match: Some(0), ..Common::default() };
        assert!(RunConfig::resolve("detect", &cli, &FileConfig::default()).is_err());
        let cli = Common { disable: vec!["T99".into()], ..Common::default() };
        assert!(RunConfig::resolve("detect", &cli, &FileConfig::default()).is_err());
        assert!(toml::from_str::<FileConfig>("bogus = 1").is_err());
    }
}
