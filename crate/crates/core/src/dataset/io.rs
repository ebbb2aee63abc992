use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{sort_records, validate_records, DatasetError, DatasetManifest, FORMAT_VERSION};
use crate::pipeline::{Label, SentenceRecord, Split};

pub const MANIFEST_FILE: &str = "manifest.json";

/// One line of a record file. Field order is the on-disk key order.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordLine {
    str_ref: u32,
    game_id: String,
    sentence_index: u32,
    text: String,
    label: Label,
}

pub fn corpus_file_name(language: &str, split: Split) -> String {
    format!("{language}.{split}.jsonl")
}

fn render_files(records: &[SentenceRecord], manifest: &DatasetManifest) -> Result<Vec<(String, Vec<u8>)>, DatasetError> {
    let mut files = Vec::new();
    for language in manifest.sentence_counts.keys() {
        for split in Split::ALL {
            let mut selected: Vec<&SentenceRecord> = records
                .iter()
                .filter(|r| &r.language == language && r.split == split)
                .collect();
            selected.sort_by(|a, b| (&a.game_id, a.str_ref, a.sentence_index).cmp(&(&b.game_id, b.str_ref, b.sentence_index)));
            let mut body = Vec::new();
            for r in selected {
                let line = RecordLine {
                    str_ref: r.str_ref,
                    game_id: r.game_id.clone(),
                    sentence_index: r.sentence_index,
                    text: r.text.clone(),
                    label: r.label,
                };
                serde_json::to_writer(&mut body, &line).expect("record serializes");
                body.push(b'\n');
            }
            files.push((corpus_file_name(language, split), body));
        }
    }
    let mut manifest_bytes = serde_json::to_vec_pretty(manifest).expect("manifest serializes");
    manifest_bytes.push(b'\n');
    files.push((MANIFEST_FILE.to_string(), manifest_bytes));
    Ok(files)
}

fn staging_dir(destination: &Path) -> PathBuf {
    let name = destination
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".into());
    destination.with_file_name(format!(".{name}.tmp-{}", std::process::id()))
}

/// Writes the corpus into `destination`, replacing a previous corpus there.
///
/// Files are staged in a sibling directory and renamed into place. A
/// non-empty destination that has no manifest is refused rather than
/// overwritten.
pub fn export_corpus(
    records: &[SentenceRecord],
    manifest: &DatasetManifest,
    destination: &Path,
) -> Result<Vec<PathBuf>, DatasetError> {
    validate_records(records)?;
    if let Some(language) = records.iter().map(|r| &r.language).find(|l| !manifest.sentence_counts.contains_key(*l)) {
        return Err(DatasetError::Validation(format!(
            "records for language {language:?} are not covered by the manifest"
        )));
    }
    manifest.verify_counts(records).map_err(DatasetError::Validation)?;

    let files = render_files(records, manifest)?;

    if destination.exists() {
        let mut entries = fs::read_dir(destination).map_err(|e| DatasetError::io(destination, e))?;
        if entries.next().is_some() && !destination.join(MANIFEST_FILE).exists() {
            return Err(DatasetError::Validation(format!(
                "{} exists and is not a corpus directory; refusing to replace it",
                destination.display()
            )));
        }
    }
    if let Some(parent) = destination.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| DatasetError::io(parent, e))?;
    }

    let staging = staging_dir(destination);
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(|e| DatasetError::io(&staging, e))?;
    }
    fs::create_dir(&staging).map_err(|e| DatasetError::io(&staging, e))?;
    for (name, bytes) in &files {
        let path = staging.join(name);
        let mut f = fs::File::create(&path).map_err(|e| DatasetError::io(&path, e))?;
        f.write_all(bytes).map_err(|e| DatasetError::io(&path, e))?;
        f.sync_all().map_err(|e| DatasetError::io(&path, e))?;
    }
    if destination.exists() {
        fs::remove_dir_all(destination).map_err(|e| DatasetError::io(destination, e))?;
    }
    fs::rename(&staging, destination).map_err(|e| DatasetError::io(destination, e))?;

    Ok(files.iter().map(|(name, _)| destination.join(name)).collect())
}

/// Loads a corpus directory, revalidating records and manifest counts.
/// Records come back in canonical order.
pub fn import_corpus(source: &Path) -> Result<(Vec<SentenceRecord>, DatasetManifest), DatasetError> {
    let manifest_path = source.join(MANIFEST_FILE);
    let text = fs::read_to_string(&manifest_path).map_err(|e| DatasetError::io(&manifest_path, e))?;
    let manifest: DatasetManifest = serde_json::from_str(&text).map_err(|e| DatasetError::Schema {
        file: manifest_path.display().to_string(),
        line: e.line(),
        message: e.to_string(),
    })?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(DatasetError::Schema {
            file: manifest_path.display().to_string(),
            line: 0,
            message: format!(
                "unsupported format version {:?} (expected {FORMAT_VERSION:?})",
                manifest.format_version
            ),
        });
    }

    let mut records = Vec::new();
    for language in manifest.sentence_counts.keys() {
        for split in Split::ALL {
            let path = source.join(corpus_file_name(language, split));
            let file = fs::File::open(&path).map_err(|e| DatasetError::io(&path, e))?;
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(|e| DatasetError::io(&path, e))?;
                if line.is_empty() {
                    continue;
                }
                let r: RecordLine = serde_json::from_str(&line).map_err(|e| DatasetError::Schema {
                    file: path.display().to_string(),
                    line: i + 1,
                    message: e.to_string(),
                })?;
                records.push(SentenceRecord {
                    str_ref: r.str_ref,
                    game_id: r.game_id,
                    language: language.clone(),
                    sentence_index: r.sentence_index,
                    text: r.text,
                    label: r.label,
                    split,
                });
            }
        }
    }

    manifest.verify_counts(&records).map_err(DatasetError::CountMismatch)?;
    validate_records(&records)?;
    sort_records(&mut records);
    Ok((records, manifest))
}
