//! Resumable searches for families with rare properties.
//!
//! The search space is cut into partitions, one per prime and first coefficient. Each finished
//! partition is appended to the checkpoint file as one JSON line carrying a sha256 digest of
//! its results, so an interrupted hunt picks up where it stopped and a damaged file is
//! detected instead of silently recomputed.

use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::orbital_graph_of;
use crate::invariants::{clique_census, component_count};
use crate::planarity::is_planar;
use crate::ring::{FamilyId, FunctionalDigraph, Modulus, QuadraticFamily};
use crate::survey::par_map_ordered;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExceptionPredicate {
    /// More than one connected component; the value is the component count.
    Disconnected,
    /// Planar; the value is 1.
    Planar,
    /// Contains a K5; the value is the number of K5 subgraphs.
    K5,
    /// Attains the largest K4 count seen for its prime (when that count is positive).
    K4Max,
}

impl ExceptionPredicate {
    /// The family's score, or `None` when it is not a candidate.
    fn evaluate(self, family: &QuadraticFamily) -> Option<u64> {
        let graph = orbital_graph_of(&FunctionalDigraph::new(family.clone()));
        match self {
            ExceptionPredicate::Disconnected => {
                let parts = component_count(&graph) as u64;
                (parts > 1).then_some(parts)
            }
            ExceptionPredicate::Planar => is_planar(&graph).planar.then_some(1),
            ExceptionPredicate::K5 => {
                let k5 = clique_census(&graph).0.complete_subgraphs(5);
                (k5 > 0).then_some(k5)
            }
            ExceptionPredicate::K4Max => {
                let k4 = clique_census(&graph).0.complete_subgraphs(4);
                (k4 > 0).then_some(k4)
            }
        }
    }
}

impl FromStr for ExceptionPredicate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disconnected" => Ok(ExceptionPredicate::Disconnected),
            "planar" => Ok(ExceptionPredicate::Planar),
            "k5" => Ok(ExceptionPredicate::K5),
            "k4max" => Ok(ExceptionPredicate::K4Max),
            other => Err(Error::UnknownPredicate(other.to_owned())),
        }
    }
}

impl fmt::Display for ExceptionPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExceptionPredicate::Disconnected => "disconnected",
            ExceptionPredicate::Planar => "planar",
            ExceptionPredicate::K5 => "k5",
            ExceptionPredicate::K4Max => "k4max",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionQuery {
    pub predicate: ExceptionPredicate,
    pub d: usize,
    pub primes: Vec<u64>,
    /// Restricts the first coefficient to `[lo, hi)`; `None` searches all of them.
    pub first_coeffs: Option<(u64, u64)>,
}

impl ExceptionQuery {
    pub fn new(predicate: ExceptionPredicate, d: usize, primes: Vec<u64>) -> Self {
        ExceptionQuery {
            predicate,
            d,
            primes,
            first_coeffs: None,
        }
    }

    /// Partition keys `(p, first coefficient)` in search order.
    pub fn partitions(&self) -> Vec<(u64, u64)> {
        let mut keys = Vec::new();
        for &p in &self.primes {
            if self.d == 0 || self.d as u64 > p {
                continue;
            }
            let (lo, hi) = self.first_coeffs.unwrap_or((0, p));
            for first in lo..hi.min(p - self.d as u64 + 1) {
                keys.push((p, first));
            }
        }
        keys
    }

    fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::EmptyFamily);
        }
        for &p in &self.primes {
            Modulus::new(p)?;
        }
        Ok(())
    }
}

/// One family and its score under the predicate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionMatch {
    pub p: u64,
    pub coeffs: Vec<u64>,
    pub value: u64,
}

impl ExceptionMatch {
    pub fn family(&self) -> FamilyId {
        FamilyId {
            n: self.p,
            coeffs: self.coeffs.clone(),
        }
    }
}

/// Results of one partition, as stored in the checkpoint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionRecord {
    pub p: u64,
    pub first: u64,
    pub families: u64,
    pub matches: Vec<ExceptionMatch>,
    pub digest: String,
}

#[derive(Serialize)]
struct DigestInput<'a> {
    p: u64,
    first: u64,
    families: u64,
    matches: &'a [ExceptionMatch],
}

impl PartitionRecord {
    fn new(p: u64, first: u64, families: u64, matches: Vec<ExceptionMatch>) -> Self {
        let digest = Self::digest_of(p, first, families, &matches);
        PartitionRecord {
            p,
            first,
            families,
            matches,
            digest,
        }
    }

    fn digest_of(p: u64, first: u64, families: u64, matches: &[ExceptionMatch]) -> String {
        let body = serde_json::to_vec(&DigestInput {
            p,
            first,
            families,
            matches,
        })
        .expect("partition results serialize");
        hex::encode(Sha256::digest(&body))
    }

    pub fn digest_holds(&self) -> bool {
        self.digest == Self::digest_of(self.p, self.first, self.families, &self.matches)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HuntOutcome {
    pub query: ExceptionQuery,
    /// False when the partition budget ran out before the search finished.
    pub complete: bool,
    pub partitions_done: usize,
    pub partitions_total: usize,
    pub families_checked: u64,
    /// Matching families in search order.
    pub matches: Vec<ExceptionMatch>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    checkpoint: String,
    query: ExceptionQuery,
}

const CHECKPOINT_TAG: &str = "orbnet-exceptions-v1";

fn corrupt(path: &Path, line: usize, reason: impl Into<String>) -> Error {
    Error::CorruptCheckpoint {
        path: path.to_path_buf(),
        line,
        reason: reason.into(),
    }
}

/// Reads the finished partitions of an existing checkpoint, or writes a fresh header.
fn open_checkpoint(path: &Path, query: &ExceptionQuery) -> Result<Vec<PartitionRecord>> {
    if !path.exists() || std::fs::metadata(path)?.len() == 0 {
        let mut f = File::create(path)?;
        let header = Header {
            checkpoint: CHECKPOINT_TAG.to_owned(),
            query: query.clone(),
        };
        serde_json::to_writer(&mut f, &header)?;
        f.write_all(b"\n")?;
        f.sync_data()?;
        return Ok(Vec::new());
    }

    let text = std::fs::read_to_string(path)?;
    if !text.ends_with('\n') {
        let line = text.lines().count();
        return Err(corrupt(path, line, "truncated final line"));
    }
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, first) = lines.next().expect("non-empty file has a line");
    let header: Header = serde_json::from_str(first).map_err(|e| corrupt(path, 1, format!("bad header: {e}")))?;
    if header.checkpoint != CHECKPOINT_TAG {
        return Err(corrupt(path, 1, format!("unknown checkpoint tag `{}`", header.checkpoint)));
    }
    if header.query != *query {
        return Err(corrupt(path, 1, "checkpoint was written for a different query"));
    }

    let expected = query.partitions();
    let mut done = Vec::new();
    for (no, line) in lines {
        let rec: PartitionRecord = serde_json::from_str(line).map_err(|e| corrupt(path, no, e.to_string()))?;
        if !rec.digest_holds() {
            return Err(corrupt(path, no, "digest does not match partition results"));
        }
        match expected.get(done.len()) {
            Some(&key) if key == (rec.p, rec.first) => done.push(rec),
            _ => {
                return Err(corrupt(
                    path,
                    no,
                    format!("unexpected partition p={} first={}", rec.p, rec.first),
                ))
            }
        }
    }
    Ok(done)
}

fn run_partition(query: &ExceptionQuery, p: u64, first: u64, jobs: usize) -> PartitionRecord {
    let modulus = Modulus::new(p).expect("validated modulus");
    let families: Vec<QuadraticFamily> = (first + 1..p)
        .combinations(query.d - 1)
        .map(|rest| {
            let mut coeffs = Vec::with_capacity(query.d);
            coeffs.push(first);
            coeffs.extend(rest);
            QuadraticFamily::new(modulus, coeffs).expect("increasing residues")
        })
        .collect();
    let scores = par_map_ordered(jobs, &families, |f| query.predicate.evaluate(f));
    let mut matches: Vec<ExceptionMatch> = families
        .iter()
        .zip(scores)
        .filter_map(|(f, s)| {
            s.map(|value| ExceptionMatch {
                p,
                coeffs: f.coeffs().to_vec(),
                value,
            })
        })
        .collect();
    if query.predicate == ExceptionPredicate::K4Max {
        let best = matches.iter().map(|m| m.value).max();
        matches.retain(|m| Some(m.value) == best);
    }
    PartitionRecord::new(p, first, families.len() as u64, matches)
}

/// Per-prime maximum across partitions for `K4Max`; a plain concatenation otherwise.
fn combine(predicate: ExceptionPredicate, parts: &[PartitionRecord]) -> Vec<ExceptionMatch> {
    let all = parts.iter().flat_map(|r| r.matches.iter().cloned());
    if predicate != ExceptionPredicate::K4Max {
        return all.collect();
    }
    let all: Vec<ExceptionMatch> = all.collect();
    let mut out = Vec::new();
    for (_, group) in &all.iter().chunk_by(|m| m.p) {
        let group: Vec<&ExceptionMatch> = group.collect();
        let best = group.iter().map(|m| m.value).max();
        out.extend(group.into_iter().filter(|m| Some(m.value) == best).cloned());
    }
    out
}

/// Runs (or resumes) a hunt. With a checkpoint path, finished partitions are read back
/// and every newly finished one is appended. `budget` caps the number of partitions
/// computed in this call, leaving the rest for a later resume.
pub fn find_exceptions(
    query: &ExceptionQuery,
    checkpoint: Option<&Path>,
    jobs: usize,
    budget: Option<usize>,
) -> Result<HuntOutcome> {
    query.validate()?;
    let keys = query.partitions();
    let mut done = match checkpoint {
        Some(path) => open_checkpoint(path, query)?,
        None => Vec::new(),
    };
    let mut writer = match checkpoint {
        Some(path) => Some(OpenOptions::new().append(true).open(path)?),
        None => None,
    };

    let pending = &keys[done.len()..];
    let todo = budget.map_or(pending.len(), |b| b.min(pending.len()));
    for &(p, first) in &pending[..todo] {
        let rec = run_partition(query, p, first, jobs);
        if let Some(f) = writer.as_mut() {
            let mut line = serde_json::to_vec(&rec)?;
            line.push(b'\n');
            f.write_all(&line)?;
            f.sync_data()?;
        }
        done.push(rec);
    }

    Ok(HuntOutcome {
        query: query.clone(),
        complete: done.len() == keys.len(),
        partitions_done: done.len(),
        partitions_total: keys.len(),
        families_checked: done.iter().map(|r| r.families).sum(),
        matches: combine(query.predicate, &done),
    })
}

/// Reads a checkpoint without computing anything.
pub fn read_checkpoint(path: &Path) -> Result<(ExceptionQuery, Vec<PartitionRecord>)> {
    let f = File::open(path)?;
    let mut first = String::new();
    BufReader::new(f).read_line(&mut first)?;
    let header: Header =
        serde_json::from_str(first.trim_end()).map_err(|e| corrupt(path, 1, format!("bad header: {e}")))?;
    let records = open_checkpoint(path, &header.query)?;
    Ok((header.query, records))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn query(pred: ExceptionPredicate, d: usize, primes: &[u64]) -> ExceptionQuery {
        ExceptionQuery::new(pred, d, primes.to_vec())
    }

    #[test]
    fn partitions_cover_the_space() {
        let q = query(ExceptionPredicate::Planar, 2, &[5, 7]);
        let keys = q.partitions();
        assert_eq!(keys.first(), Some(&(5, 0)));
        assert_eq!(keys.last(), Some(&(7, 5)));
        assert_eq!(keys.len(), 4 + 6);
        let out = find_exceptions(&q, None, 1, None).unwrap();
        assert_eq!(out.families_checked, 10 + 21);
        assert!(out.complete);
    }

    #[test]
    fn window_restricts_first_coefficient() {
        let mut q = query(ExceptionPredicate::Disconnected, 3, &[311]);
        q.first_coeffs = Some((57, 58));
        let out = find_exceptions(&q, None, 1, None).unwrap();
        assert_eq!(out.partitions_total, 1);
        assert!(out.matches.iter().any(|m| m.coeffs == [57, 58, 213] && m.value == 2));
    }

    #[test]
    fn planar_members_of_x23() {
        let out = find_exceptions(&query(ExceptionPredicate::Planar, 2, &[23]), None, 1, None).unwrap();
        let found: Vec<Vec<u64>> = out.matches.iter().map(|m| m.coeffs.clone()).collect();
        assert_eq!(found, vec![vec![4, 20], vec![11, 17]]);
    }

    #[test]
    fn k4max_keeps_only_the_per_prime_maximum() {
        let out = find_exceptions(&query(ExceptionPredicate::K4Max, 2, &[19]), None, 1, None).unwrap();
        assert!(!out.matches.is_empty());
        assert!(out.matches.iter().all(|m| m.value == 2));
        assert!(out.matches.iter().any(|m| m.coeffs == [11, 14]));
    }

    #[test]
    fn resume_after_interruption_matches_full_run() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hunt.jsonl");
        let q = query(ExceptionPredicate::Disconnected, 2, &[11, 13, 17]);
        let full = find_exceptions(&q, None, 1, None).unwrap();

        let part = find_exceptions(&q, Some(&path), 1, Some(7)).unwrap();
        assert!(!part.complete);
        assert_eq!(part.partitions_done, 7);
        let resumed = find_exceptions(&q, Some(&path), 2, None).unwrap();
        assert!(resumed.complete);
        assert_eq!(resumed.matches, full.matches);
        assert_eq!(resumed.families_checked, full.families_checked);

        let (back, recs) = read_checkpoint(&path).unwrap();
        assert_eq!(back, q);
        assert_eq!(recs.len(), q.partitions().len());
    }

    #[test]
    fn corrupt_checkpoints_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hunt.jsonl");
        let q = query(ExceptionPredicate::Disconnected, 2, &[11]);
        find_exceptions(&q, Some(&path), 1, Some(3)).unwrap();
        let good = std::fs::read_to_string(&path).unwrap();

        // tampered results
        let tampered = good.replacen("\"families\":10", "\"families\":11", 1);
        assert_ne!(tampered, good);
        std::fs::write(&path, &tampered).unwrap();
        let err = find_exceptions(&q, Some(&path), 1, None).unwrap_err();
        assert!(matches!(err, Error::CorruptCheckpoint { line: 2, .. }), "{err}");

        // truncated write
        std::fs::write(&path, &good[..good.len() - 5]).unwrap();
        assert!(matches!(
            find_exceptions(&q, Some(&path), 1, None),
            Err(Error::CorruptCheckpoint { .. })
        ));

        // different query
        std::fs::write(&path, &good).unwrap();
        let other = query(ExceptionPredicate::Planar, 2, &[11]);
        assert!(matches!(
            find_exceptions(&other, Some(&path), 1, None),
            Err(Error::CorruptCheckpoint { line: 1, .. })
        ));

        // garbage
        std::fs::write(&path, format!("{good}not json\n")).unwrap();
        assert!(matches!(
            find_exceptions(&q, Some(&path), 1, None),
            Err(Error::CorruptCheckpoint { line: 5, .. })
        ));
    }

    #[test]
    fn predicate_names_round_trip() {
        for p in [
            ExceptionPredicate::Disconnected,
            ExceptionPredicate::Planar,
            ExceptionPredicate::K5,
            ExceptionPredicate::K4Max,
        ] {
            assert_eq!(p.to_string().parse::<ExceptionPredicate>().unwrap(), p);
        }
        assert!("k7".parse::<ExceptionPredicate>().is_err());
    }
}
