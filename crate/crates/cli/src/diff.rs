use serde::Serialize;

use qmalab::adaptive::TranscriptDump;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Divergence {
    pub round: Option<usize>,
    pub bucket: Option<usize>,
    pub set: String,
    pub left: Option<String>,
    pub right: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiffVerdict {
    pub equal: bool,
    pub byte_equal: bool,
    pub differences: usize,
    pub first_divergence: Option<Divergence>,
}

fn split_key(key: &str) -> (Option<usize>, Option<usize>, String) {
    let mut round = None;
    let mut bucket = None;
    let mut set = String::new();
    for part in key.split_whitespace() {
        if let Some(v) = part.strip_prefix("r=") {
            round = v.parse().ok();
        } else if let Some(v) = part.strip_prefix("i=") {
            bucket = v.parse().ok();
        } else {
            set = part.to_string();
        }
    }
    (round, bucket, set)
}

/// Structural comparison in file order of `a`, then keys only in `b`.
pub fn diff_transcripts(a: &str, b: &str) -> qmalab::Result<DiffVerdict> {
    let (da, db) = (TranscriptDump::parse(a)?, TranscriptDump::parse(b)?);
    let differences = da.diff(&db).len();
    let order = a.lines().chain(b.lines()).filter_map(|l| l.rsplit_once('=').map(|(k, _)| k.to_string()));
    let first = order
        .into_iter()
        .find(|k| da.entries.get(k) != db.entries.get(k))
        .map(|k| {
            let (round, bucket, set) = split_key(&k);
            Divergence { round, bucket, set, left: da.entries.get(&k).cloned(), right: db.entries.get(&k).cloned() }
        });
    Ok(DiffVerdict { equal: differences == 0, byte_equal: a == b, differences, first_divergence: first })
}
