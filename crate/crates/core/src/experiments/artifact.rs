use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

/// A named output file held in memory until written.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

impl Artifact {
    /// A CSV whose leading `#` lines record the verb, master seed and resolved config.
    pub fn csv(
        file_name: &str,
        verb: &str,
        config: &ExperimentConfig,
        header: &[String],
        rows: &[Vec<String>],
    ) -> Result<Self> {
        let mut out = format!(
            "# hiddencut {verb}\n# seed: {}\n# config: {}\n",
            config.seed,
            config.to_json_line()
        );
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            if r.len() != header.len() {
                return Err(Error::Dimension(format!(
                    "row with {} fields under a {}-column header",
                    r.len(),
                    header.len()
                )));
            }
            w.write_record(r)?;
        }
        let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        out.push_str(&String::from_utf8(body).expect("csv writer emits utf-8"));
        Ok(Self {
            file_name: file_name.into(),
            contents: out,
        })
    }

    /// A JSON document of the form `{verb, seed, config, data}`.
    pub fn json<T: Serialize>(
        file_name: &str,
        verb: &str,
        config: &ExperimentConfig,
        data: &T,
    ) -> Result<Self> {
        #[derive(Serialize)]
        struct Wrapped<'a, T> {
            verb: &'a str,
            seed: u64,
            config: &'a ExperimentConfig,
            data: &'a T,
        }
        let mut contents = serde_json::to_string_pretty(&Wrapped {
            verb,
            seed: config.seed,
            config,
            data,
        })?;
        contents.push('\n');
        Ok(Self {
            file_name: file_name.into(),
            contents,
        })
    }

    /// Data lines of a CSV artifact, without the `#` preamble.
    pub fn csv_body(&self) -> impl Iterator<Item = &str> {
        self.contents.lines().filter(|l| !l.starts_with('#'))
    }
}

/// Writes every artifact into `dir`, creating it if needed; returns the paths.
pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    artifacts
        .iter()
        .map(|a| {
            let path = dir.join(&a.file_name);
            fs::write(&path, &a.contents)?;
            Ok(path)
        })
        .collect()
}

/// Shortest round-trip decimal form, so reruns print identical bytes.
pub(crate) fn num(x: f64) -> String {
    if x.is_infinite() && x > 0.0 {
        "inf".into()
    } else {
        format!("{x:?}")
    }
}
