//! Report files and the resumable shard cache.
//!
//! Every report starts with `# config: <json>` so it can be reproduced, then
//! a header row and data rows, and optionally a `# summary: <json>` trailer.
//!
//! The cache is an append-only text file:
//!
//! ```text
//! intpoints-cache 1
//! config <sha256 of the job config>
//! shard <index> <rows>
//! <row>
//! ...
//! summary <json>
//! end <sha256 of the block above>
//! ```
//!
//! A block without its `end` line is an interrupted write and is discarded on
//! resume. A complete block whose checksum does not match is corruption.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::sweep::{self, SweepError, SweepParams, SweepRecord, SweepSummary};

const CACHE_MAGIC: &str = "intpoints-cache 1";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("cache {path} was written by a different configuration")]
    ConfigMismatch { path: PathBuf },
    #[error("cache {path} is corrupt: {msg}")]
    CorruptCache { path: PathBuf, msg: String },
    #[error("malformed report: {0}")]
    Report(String),
    #[error("sweep interrupted after {completed} shards")]
    Interrupted { completed: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the canonical JSON encoding of a configuration.
pub fn config_hash<T: Serialize>(config: &T) -> Result<String, StoreError> {
    Ok(sha256_hex(&serde_json::to_vec(config)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CachedShard {
    pub rows: Vec<String>,
    pub summary: SweepSummary,
}

impl CachedShard {
    fn block_body(&self, index: usize) -> Result<String, StoreError> {
        let mut body = format!("shard {index} {}\n", self.rows.len());
        for row in &self.rows {
            body.push_str(row);
            body.push('\n');
        }
        body.push_str(&format!("summary {}\n", serde_json::to_string(&self.summary)?));
        Ok(body)
    }
}

/// Completed shards recovered from a cache.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResumeState {
    pub shards: BTreeMap<usize, CachedShard>,
}

impl ResumeState {
    /// Number of complete shards; where the sweep resumes.
    pub fn position(&self) -> usize {
        self.shards.len()
    }
}

pub struct ShardCache {
    file: File,
}

fn header(hash: &str) -> String {
    format!("{CACHE_MAGIC}\nconfig {hash}\n")
}

/// Opens or creates the cache for `hash`, recovering complete shards and
/// dropping an interrupted tail.
pub fn cache_resume(path: &Path, hash: &str) -> Result<(ShardCache, ResumeState), StoreError> {
    let corrupt = |msg: String| StoreError::CorruptCache { path: path.to_path_buf(), msg };
    let expected = header(hash);
    let mut text = String::new();
    if path.exists() {
        File::open(path)?.read_to_string(&mut text).map_err(|e| corrupt(e.to_string()))?;
    }
    if text.len() < expected.len() {
        // Fresh file, or a crash while writing the header itself.
        if !expected.starts_with(&text) {
            let first = text.lines().next().unwrap_or("");
            if first == CACHE_MAGIC {
                return Err(StoreError::ConfigMismatch { path: path.to_path_buf() });
            }
            return Err(corrupt("unrecognized header".into()));
        }
        let mut file = File::create(path)?;
        file.write_all(expected.as_bytes())?;
        file.sync_all()?;
        return Ok((ShardCache { file }, ResumeState::default()));
    }
    if !text.starts_with(&format!("{CACHE_MAGIC}\n")) {
        return Err(corrupt("unrecognized header".into()));
    }
    if !text.starts_with(&expected) {
        return Err(StoreError::ConfigMismatch { path: path.to_path_buf() });
    }

    let mut state = ResumeState::default();
    let mut offset = expected.len();
    loop {
        match parse_block(&text[offset..]).map_err(corrupt)? {
            Block::Complete { index, shard, len } => {
                if state.shards.insert(index, shard).is_some() {
                    return Err(corrupt(format!("shard {index} appears twice")));
                }
                offset += len;
            }
            Block::Incomplete => break,
        }
    }
    let file = OpenOptions::new().write(true).open(path)?;
    file.set_len(offset as u64)?;
    file.sync_all()?;
    let file = OpenOptions::new().append(true).open(path)?;
    Ok((ShardCache { file }, state))
}

enum Block {
    Complete { index: usize, shard: CachedShard, len: usize },
    Incomplete,
}

/// Parses one block at the start of `text`. Only newline-terminated lines
/// count; running out of them means the block was cut short.
fn parse_block(text: &str) -> Result<Block, String> {
    let mut pos = 0;
    fn take<'a>(text: &'a str, pos: &mut usize) -> Option<&'a str> {
        let rest = &text[*pos..];
        let end = rest.find('\n')?;
        *pos += end + 1;
        Some(&rest[..end])
    }
    let Some(head) = take(text, &mut pos) else { return Ok(Block::Incomplete) };
    let parts: Vec<&str> = head.split(' ').collect();
    let (index, count) = match parts.as_slice() {
        ["shard", i, n] => (
            i.parse::<usize>().map_err(|_| format!("bad shard line {head:?}"))?,
            n.parse::<usize>().map_err(|_| format!("bad shard line {head:?}"))?,
        ),
        _ => return Err(format!("expected shard line, found {head:?}")),
    };
    let mut rows = Vec::with_capacity(count);
    for _ in 0..count {
        let Some(row) = take(text, &mut pos) else { return Ok(Block::Incomplete) };
        rows.push(row.to_string());
    }
    let Some(summary_line) = take(text, &mut pos) else { return Ok(Block::Incomplete) };
    let body_len = pos;
    let Some(end_line) = take(text, &mut pos) else { return Ok(Block::Incomplete) };
    let summary = summary_line
        .strip_prefix("summary ")
        .ok_or_else(|| format!("shard {index}: expected summary line"))?;
    let checksum = end_line.strip_prefix("end ").ok_or_else(|| format!("shard {index}: expected end line"))?;
    if sha256_hex(text[..body_len].as_bytes()) != checksum {
        return Err(format!("shard {index}: checksum mismatch"));
    }
    let summary: SweepSummary = serde_json::from_str(summary).map_err(|e| format!("shard {index}: {e}"))?;
    Ok(Block::Complete { index, shard: CachedShard { rows, summary }, len: pos })
}

impl ShardCache {
    /// Appends one complete shard block and syncs it to disk.
    pub fn append(&mut self, index: usize, shard: &CachedShard) -> Result<(), StoreError> {
        let body = shard.block_body(index)?;
        let block = format!("{body}end {}\n", sha256_hex(body.as_bytes()));
        self.file.write_all(block.as_bytes())?;
        self.file.sync_data()?;
        Ok(())
    }
}

/// A sweep job as recorded in reports and cache headers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct SweepJob {
    pub command: String,
    #[serde(flatten)]
    pub params: SweepParams,
    pub shards: usize,
}

impl SweepJob {
    pub fn new(params: SweepParams, shards: usize) -> Self {
        Self { command: "sweep".into(), params, shards: shards.max(1) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepReport {
    pub config: String,
    pub header: String,
    pub rows: Vec<String>,
    pub summary: SweepSummary,
}

impl SweepReport {
    pub fn render(&self) -> Result<String, StoreError> {
        let mut out = render_table(&self.config, &self.header, &self.rows);
        out.push_str(&format!("# summary: {}\n", serde_json::to_string(&self.summary)?));
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<Self, StoreError> {
        let table = parse_table(text)?;
        let summary = table.trailer.ok_or_else(|| StoreError::Report("missing summary".into()))?;
        let summary: SweepSummary = serde_json::from_str(&summary)?;
        let report = Self { config: table.config, header: table.header, rows: table.rows, summary };
        report.records()?;
        Ok(report)
    }

    pub fn records(&self) -> Result<Vec<SweepRecord>, StoreError> {
        let marked = self.header == sweep::MARKED_HEADER;
        if !marked && self.header != sweep::WEIERSTRASS_HEADER {
            return Err(StoreError::Report(format!("unknown header {:?}", self.header)));
        }
        Ok(self.rows.iter().map(|r| SweepRecord::parse(r, marked)).collect::<Result<_, _>>()?)
    }
}

/// Runs a sweep, reusing and extending the cache when one is given.
/// `stop_after` aborts once that many new shards are written.
pub fn run_cached_sweep(
    job: &SweepJob,
    cache: Option<&Path>,
    stop_after: Option<usize>,
) -> Result<SweepReport, StoreError> {
    use rayon::prelude::*;

    job.params.family.validate()?;
    let config = serde_json::to_string(job)?;
    let ranges = sweep::shard_ranges(job.params.family.kind, job.params.height_max, job.shards);
    let (mut writer, mut state) = match cache {
        Some(path) => {
            let (w, s) = cache_resume(path, &sha256_hex(config.as_bytes()))?;
            (Some(w), s)
        }
        None => (None, ResumeState::default()),
    };
    if let Some(&bad) = state.shards.keys().find(|&&i| i >= ranges.len()) {
        return Err(StoreError::CorruptCache {
            path: cache.map(Path::to_path_buf).unwrap_or_default(),
            msg: format!("shard {bad} out of range"),
        });
    }
    let pending: Vec<usize> = (0..ranges.len()).filter(|i| !state.shards.contains_key(i)).collect();
    let batch = rayon::current_num_threads().max(1);
    let mut written = 0;
    for chunk in pending.chunks(batch) {
        let outputs: Vec<(usize, CachedShard)> = chunk
            .par_iter()
            .map(|&i| {
                let out = sweep::sweep_shard(&job.params, ranges[i])?;
                let rows = out.records.iter().map(ToString::to_string).collect();
                Ok((i, CachedShard { rows, summary: out.summary }))
            })
            .collect::<Result<_, SweepError>>()?;
        for (i, shard) in outputs {
            if stop_after.is_some_and(|k| written >= k) {
                return Err(StoreError::Interrupted { completed: state.position() });
            }
            if let Some(w) = writer.as_mut() {
                w.append(i, &shard)?;
            }
            state.shards.insert(i, shard);
            written += 1;
        }
    }
    let mut summary = SweepSummary::default();
    let mut rows = Vec::new();
    for shard in state.shards.values() {
        summary.merge(&shard.summary);
        rows.extend(shard.rows.iter().cloned());
    }
    Ok(SweepReport { config, header: sweep::sweep_header(job.params.family.kind).to_string(), rows, summary })
}

/// A parsed self-describing table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub config: String,
    pub header: String,
    pub rows: Vec<String>,
    pub trailer: Option<String>,
}

pub fn render_table(config: &str, header: &str, rows: &[String]) -> String {
    let mut out = format!("# config: {config}\n{header}\n");
    for row in rows {
        out.push_str(row);
        out.push('\n');
    }
    out
}

pub fn parse_table(text: &str) -> Result<Table, StoreError> {
    let mut lines = text.lines();
    let config = lines
        .next()
        .and_then(|l| l.strip_prefix("# config: "))
        .ok_or_else(|| StoreError::Report("missing config line".into()))?;
    serde_json::from_str::<serde_json::Value>(config)?;
    let header = lines.next().ok_or_else(|| StoreError::Report("missing header".into()))?;
    let mut rows = Vec::new();
    let mut trailer = None;
    for line in lines {
        if trailer.is_some() {
            return Err(StoreError::Report("data after summary".into()));
        }
        match line.strip_prefix("# summary: ") {
            Some(s) => trailer = Some(s.to_string()),
            None => rows.push(line.to_string()),
        }
    }
    Ok(Table { config: config.to_string(), header: header.to_string(), rows, trailer })
}

/// Writes `contents` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), StoreError> {
    let tmp = path.with_extension("partial");
    {
        let mut f = File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}
