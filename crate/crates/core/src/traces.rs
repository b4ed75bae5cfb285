//! Ultimately periodic traces `prefix · cycle^ω` and finite teams of them.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::Prop;

pub type PropSet = BTreeSet<Prop>;

/// Default cap on `lcm` of the loop lengths of a team.
pub const DEFAULT_MAX_LCM: u64 = 1_000_000;

/// Stem length and period of an ultimately periodic sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Characteristic {
    pub s: usize,
    pub p: usize,
}

/// The trace `prefix · cycle^ω`. `cycle` is never empty.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct UpTrace {
    prefix: Vec<PropSet>,
    cycle: Vec<PropSet>,
}

impl UpTrace {
    pub fn new(prefix: Vec<PropSet>, cycle: Vec<PropSet>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::EmptyLoop { line: 0 });
        }
        Ok(UpTrace { prefix, cycle })
    }

    /// Builds a trace from letters given as slices of names. Panics on invalid
    /// names or an empty loop; meant for literals in code.
    pub fn from_names(prefix: &[&[&str]], cycle: &[&[&str]]) -> Self {
        let conv = |xs: &[&[&str]]| -> Vec<PropSet> {
            xs.iter()
                .map(|l| l.iter().map(|n| Prop::new(n).expect("valid name")).collect())
                .collect()
        };
        UpTrace::new(conv(prefix), conv(cycle)).expect("non-empty loop")
    }

    pub fn prefix(&self) -> &[PropSet] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[PropSet] {
        &self.cycle
    }

    /// Number of distinct positions of the lasso, `|prefix| + |cycle|`.
    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn characteristic(&self) -> Characteristic {
        Characteristic {
            s: self.prefix.len(),
            p: self.cycle.len(),
        }
    }

    pub fn value_at(&self, i: usize) -> &PropSet {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Position reached from `i` after one step, folded into `0..len()`.
    pub fn next_pos(&self, i: usize) -> usize {
        if i + 1 < self.len() {
            i + 1
        } else {
            self.prefix.len()
        }
    }

    /// Folds an arbitrary position into `0..len()`.
    pub fn fold_pos(&self, i: usize) -> usize {
        if i < self.prefix.len() {
            i
        } else {
            self.prefix.len() + (i - self.prefix.len()) % self.cycle.len()
        }
    }

    /// The suffix starting at position `i`, canonicalized.
    pub fn suffix(&self, i: usize) -> UpTrace {
        if i < self.prefix.len() {
            return UpTrace {
                prefix: self.prefix[i..].to_vec(),
                cycle: self.cycle.clone(),
            }
            .canonicalize();
        }
        let r = (i - self.prefix.len()) % self.cycle.len();
        let mut cycle = self.cycle.clone();
        cycle.rotate_left(r);
        UpTrace {
            prefix: Vec::new(),
            cycle,
        }
        .canonicalize()
    }

    /// Primitive loop, then the shortest prefix. Two encodings denote the same
    /// trace iff their canonical forms are equal.
    pub fn canonicalize(&self) -> UpTrace {
        let n = self.cycle.len();
        let period = (1..=n)
            .find(|&d| n % d == 0 && (d..n).all(|i| self.cycle[i] == self.cycle[i - d]))
            .unwrap_or(n);
        let mut cycle = self.cycle[..period].to_vec();
        let mut prefix = self.prefix.clone();
        while prefix.last().is_some_and(|l| Some(l) == cycle.last()) {
            prefix.pop();
            cycle.rotate_right(1);
        }
        UpTrace { prefix, cycle }
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonicalize()
    }

    /// Every proposition occurring in some letter.
    pub fn props(&self) -> PropSet {
        self.prefix
            .iter()
            .chain(&self.cycle)
            .flat_map(|l| l.iter().cloned())
            .collect()
    }
}

impl fmt::Display for UpTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_trace(self))
    }
}

pub fn value_at(e: &UpTrace, i: usize) -> PropSet {
    e.value_at(i).clone()
}

pub fn suffix_encoding(e: &UpTrace, i: usize) -> UpTrace {
    e.suffix(i)
}

pub fn canonicalize(e: &UpTrace) -> UpTrace {
    e.canonicalize()
}

/// A finite team: a set of canonical traces kept in sorted order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Team {
    traces: Vec<UpTrace>,
}

impl Team {
    pub fn new(traces: impl IntoIterator<Item = UpTrace>) -> Self {
        let mut traces: Vec<UpTrace> = traces.into_iter().map(|t| t.canonicalize()).collect();
        traces.sort();
        traces.dedup();
        Team { traces }
    }

    pub fn empty() -> Self {
        Team::default()
    }

    pub fn traces(&self) -> &[UpTrace] {
        &self.traces
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn prfx(&self) -> usize {
        self.traces.iter().map(|t| t.prefix.len()).max().unwrap_or(0)
    }

    /// Least common multiple of the loop lengths, failing above `cap`.
    pub fn lcm(&self, cap: u64) -> Result<u64> {
        let mut acc: u64 = 1;
        for t in &self.traces {
            let l = t.cycle.len() as u64;
            acc = acc / gcd(acc, l) * l;
            if acc > cap {
                return Err(Error::bound("lcm of the team's loop lengths", cap));
            }
        }
        Ok(acc)
    }

    /// Member-wise suffix; distinct traces may collapse to one.
    pub fn suffix(&self, i: usize) -> Team {
        Team::new(self.traces.iter().map(|t| t.suffix(i)))
    }

    /// The subteam selected by the bits of `mask` (bit `j` = `traces()[j]`).
    pub fn select(&self, mask: u128) -> Team {
        Team {
            traces: self
                .traces
                .iter()
                .enumerate()
                .filter(|(j, _)| mask >> j & 1 == 1)
                .map(|(_, t)| t.clone())
                .collect(),
        }
    }

    pub fn union(&self, other: &Team) -> Team {
        Team::new(self.traces.iter().chain(&other.traces).cloned())
    }

    pub fn props(&self) -> PropSet {
        self.traces.iter().flat_map(|t| t.props()).collect()
    }
}

impl FromIterator<UpTrace> for Team {
    fn from_iter<I: IntoIterator<Item = UpTrace>>(iter: I) -> Self {
        Team::new(iter)
    }
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn prfx(team: &Team) -> usize {
    team.prfx()
}

pub fn lcm(team: &Team) -> Result<u64> {
    team.lcm(DEFAULT_MAX_LCM)
}

pub fn team_suffix(team: &Team, i: usize) -> Team {
    team.suffix(i)
}

fn render_set(s: &PropSet) -> String {
    let names: Vec<&str> = s.iter().map(Prop::as_str).collect();
    format!("{{{}}}", names.join(", "))
}

/// One team-file line, `prefix sets ; loop sets`.
pub fn serialize_trace(t: &UpTrace) -> String {
    let part = |xs: &[PropSet]| xs.iter().map(render_set).collect::<Vec<_>>().join(" ");
    if t.prefix.is_empty() {
        format!("; {}", part(&t.cycle))
    } else {
        format!("{} ; {}", part(&t.prefix), part(&t.cycle))
    }
}

pub fn serialize_team(team: &Team) -> String {
    team.traces
        .iter()
        .map(|t| serialize_trace(t) + "\n")
        .collect()
}

fn parse_sets(text: &str, line: usize, col0: usize) -> Result<Vec<PropSet>> {
    let mut out = Vec::new();
    let mut cur: Option<(PropSet, String)> = None;
    let finish_name = |set: &mut PropSet, name: &mut String, col: usize| -> Result<()> {
        if !name.is_empty() {
            let p = Prop::new(name)
                .map_err(|_| Error::syntax(line, col, format!("invalid proposition `{name}`")))?;
            set.insert(p);
            name.clear();
        }
        Ok(())
    };
    for (k, c) in text.chars().enumerate() {
        let col = col0 + k;
        match (&mut cur, c) {
            (None, '{') => cur = Some((PropSet::new(), String::new())),
            (None, c) if c.is_whitespace() => {}
            (None, c) => return Err(Error::syntax(line, col, format!("expected `{{`, found `{c}`"))),
            (Some((set, name)), '}') => {
                finish_name(set, name, col)?;
                out.push(std::mem::take(set));
                cur = None;
            }
            (Some((set, name)), c) if c.is_whitespace() || c == ',' => finish_name(set, name, col)?,
            (Some((_, name)), c) if c.is_ascii_alphanumeric() || c == '_' => name.push(c),
            (Some(_), c) => {
                return Err(Error::syntax(line, col, format!("unexpected character `{c}` in set")))
            }
        }
    }
    if cur.is_some() {
        return Err(Error::syntax(line, col0 + text.chars().count(), "unclosed `{`"));
    }
    Ok(out)
}

pub fn parse_trace_line(text: &str, line: usize) -> Result<UpTrace> {
    let Some(semi) = text.find(';') else {
        return Err(Error::syntax(line, 1, "expected `;` between prefix and loop"));
    };
    let (pre, rest) = text.split_at(semi);
    let rest = &rest[1..];
    if let Some(k) = rest.find(';') {
        return Err(Error::syntax(line, semi + k + 2, "more than one `;` on a line"));
    }
    let prefix = parse_sets(pre, line, 1)?;
    let cycle = parse_sets(rest, line, semi + 2)?;
    if cycle.is_empty() {
        return Err(Error::EmptyLoop { line });
    }
    Ok(UpTrace { prefix, cycle })
}

/// Parses a team file: one trace per line, `#` comments, blank lines ignored.
pub fn parse_team(text: &str) -> Result<Team> {
    let mut traces = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        traces.push(parse_trace_line(body, i + 1)?);
    }
    Ok(Team::new(traces))
}
