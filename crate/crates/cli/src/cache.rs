//! JSONL store of quartic search outcomes keyed by (a_curve, side, b1).

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use cnkit::descent::{
    solve_quartic, GcdRule, QuarticProblem, QuarticSolver, SearchOptions, SearchOutcome, Side,
};
use cnkit::exactnum::int_str;
use cnkit::Int;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    #[serde(with = "int_str")]
    pub a_curve: Int,
    pub side: Side,
    #[serde(with = "int_str")]
    pub b1: Int,
    pub status: SearchOutcome,
    pub height: u64,
    pub gcd_rule: GcdRule,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
}

type Key = (String, Side, String);

fn key_of(a_curve: &Int, side: Side, b1: &Int) -> Key {
    (a_curve.to_string(), side, b1.to_string())
}

fn rank(status: &SearchOutcome) -> u8 {
    match status {
        SearchOutcome::Solved { .. } => 2,
        SearchOutcome::LocallyExcluded { .. } => 1,
        SearchOutcome::Exhausted { .. } => 0,
    }
}

/// Whether `new` replaces `old` for the same key. The first solved record stays.
fn supersedes(new: &CacheRecord, old: &CacheRecord) -> bool {
    match rank(&new.status).cmp(&rank(&old.status)) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => {
            matches!(new.status, SearchOutcome::Exhausted { .. })
                && (new.height > old.height
                    || (new.height == old.height
                        && new.gcd_rule == GcdRule::Standard
                        && old.gcd_rule != GcdRule::Standard))
        }
    }
}

#[derive(Debug)]
pub struct Cache {
    path: PathBuf,
    index: HashMap<Key, CacheRecord>,
    pending: Mutex<Vec<CacheRecord>>,
}

impl Cache {
    pub fn open(path: &Path) -> Result<Cache, String> {
        let mut index: HashMap<Key, CacheRecord> = HashMap::new();
        if path.exists() {
            let f = File::open(path).map_err(|e| format!("cannot read cache {}: {e}", path.display()))?;
            for (i, line) in BufReader::new(f).lines().enumerate() {
                let line = line.map_err(|e| format!("cannot read cache {}: {e}", path.display()))?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: CacheRecord = serde_json::from_str(&line)
                    .map_err(|e| format!("{}:{}: bad cache record: {e}", path.display(), i + 1))?;
                let k = key_of(&rec.a_curve, rec.side, &rec.b1);
                match index.get(&k) {
                    Some(old) if !supersedes(&rec, old) => {}
                    _ => {
                        index.insert(k, rec);
                    }
                }
            }
        }
        Ok(Cache {
            path: path.to_path_buf(),
            index,
            pending: Mutex::new(Vec::new()),
        })
    }

    pub fn get(&self, a_curve: &Int, side: Side, b1: &Int) -> Option<&CacheRecord> {
        self.index.get(&key_of(a_curve, side, b1))
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// The outcome a fresh search with `opts` could report, if the stored record settles it.
    pub fn lookup(&self, a_curve: &Int, p: &QuarticProblem, opts: &SearchOptions) -> Option<SearchOutcome> {
        let rec = self.get(a_curve, p.side, &p.b1)?;
        match &rec.status {
            SearchOutcome::Solved { witness } => {
                let h = Int::from(opts.height);
                let fits = witness.e <= h && witness.m <= h;
                (fits && witness.check(&p.b1, &p.b2, Some(opts.gcd_rule)).is_ok()).then(|| rec.status.clone())
            }
            SearchOutcome::LocallyExcluded { .. } => Some(rec.status.clone()),
            // Standard accepts every Literal witness, so a Standard miss covers both rules
            SearchOutcome::Exhausted { height } => (*height >= opts.height
                && (rec.gcd_rule == opts.gcd_rule || rec.gcd_rule == GcdRule::Standard))
                .then_some(SearchOutcome::Exhausted { height: opts.height }),
        }
    }

    fn record(&self, a_curve: &Int, p: &QuarticProblem, opts: &SearchOptions, status: &SearchOutcome) {
        let created_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        self.pending.lock().unwrap().push(CacheRecord {
            a_curve: a_curve.clone(),
            side: p.side,
            b1: p.b1.clone(),
            status: status.clone(),
            height: opts.height,
            gcd_rule: opts.gcd_rule,
            created_at,
        });
    }

    /// Appends new records under an exclusive lock. Returns how many were written.
    pub fn flush(&self) -> Result<usize, String> {
        let pending = std::mem::take(&mut *self.pending.lock().unwrap());
        if pending.is_empty() {
            return Ok(0);
        }
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
        }
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| format!("cannot open cache {}: {e}", self.path.display()))?;
        f.lock()
            .map_err(|e| format!("cannot lock cache {}: {e}", self.path.display()))?;
        let mut buf = String::new();
        for rec in &pending {
            buf.push_str(&serde_json::to_string(rec).expect("cache record serializes"));
            buf.push('\n');
        }
        let res = f.write_all(buf.as_bytes()).and_then(|_| f.flush());
        let _ = f.unlock();
        res.map_err(|e| format!("cannot write cache {}: {e}", self.path.display()))?;
        Ok(pending.len())
    }
}

impl QuarticSolver for Cache {
    fn solve(&self, a_curve: &Int, problem: &QuarticProblem, opts: &SearchOptions) -> SearchOutcome {
        if let Some(hit) = self.lookup(a_curve, problem, opts) {
            return hit;
        }
        let out = solve_quartic(problem, opts);
        self.record(a_curve, problem, opts, &out);
        out
    }
}
