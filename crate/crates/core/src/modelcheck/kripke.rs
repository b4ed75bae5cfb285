use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::formula::Prop;
use crate::traces::PropSet;

/// A finite Kripke structure with worlds `0..len()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kripke {
    pub names: Vec<String>,
    pub labels: Vec<PropSet>,
    pub succ: Vec<Vec<usize>>,
    pub init: usize,
}

impl Kripke {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Left-totality and a valid initial world.
    pub fn validate(&self) -> Result<()> {
        if self.init >= self.len() {
            return Err(Error::MalformedStructure("initial world out of range".into()));
        }
        if self.labels.len() != self.len() || self.succ.len() != self.len() {
            return Err(Error::MalformedStructure("inconsistent world tables".into()));
        }
        for (w, s) in self.succ.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::MalformedStructure(format!(
                    "world `{}` has no successor",
                    self.names[w]
                )));
            }
            if let Some(&bad) = s.iter().find(|&&v| v >= self.len()) {
                return Err(Error::MalformedStructure(format!("edge to unknown world {bad}")));
            }
        }
        Ok(())
    }

    pub fn props(&self) -> PropSet {
        self.labels.iter().flatten().cloned().collect()
    }

    /// Worlds reachable from the initial one, in discovery order.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![self.init];
        seen[self.init] = true;
        while let Some(w) = stack.pop() {
            for &v in &self.succ[w] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}

/// Parses lines `world NAME { p q }`, `edge A B`, `init NAME`; `#` comments.
pub fn parse_kripke(text: &str) -> Result<Kripke> {
    let mut names: Vec<String> = Vec::new();
    let mut labels: Vec<PropSet> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges: Vec<(String, String, usize)> = Vec::new();
    let mut init: Option<(String, usize)> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let spaced = body.replace('{', " { ").replace('}', " } ").replace(',', " ");
        let words: Vec<&str> = spaced.split_whitespace().collect();
        let Some(&head) = words.first() else { continue };
        let col = raw.find(head).map_or(1, |c| c + 1);
        let ident = |w: &str| -> Result<String> {
            if crate::formula::is_identifier(w) {
                Ok(w.to_string())
            } else {
                Err(Error::syntax(line, col, format!("invalid name `{w}`")))
            }
        };
        match head {
            "world" => {
                if words.len() < 4 || words[2] != "{" || words[words.len() - 1] != "}" {
                    return Err(Error::syntax(line, col, "expected `world NAME { props }`"));
                }
                let name = ident(words[1])?;
                if index.contains_key(&name) {
                    return Err(Error::syntax(line, col, format!("world `{name}` declared twice")));
                }
                let mut set = PropSet::new();
                for w in &words[3..words.len() - 1] {
                    set.insert(Prop::raw(ident(w)?));
                }
                index.insert(name.clone(), names.len());
                names.push(name);
                labels.push(set);
            }
            "edge" => {
                if words.len() != 3 {
                    return Err(Error::syntax(line, col, "expected `edge FROM TO`"));
                }
                edges.push((ident(words[1])?, ident(words[2])?, line));
            }
            "init" => {
                if words.len() != 2 {
                    return Err(Error::syntax(line, col, "expected `init NAME`"));
                }
                if init.is_some() {
                    return Err(Error::syntax(line, col, "duplicate `init` line"));
                }
                init = Some((ident(words[1])?, line));
            }
            other => {
                return Err(Error::syntax(line, col, format!("unknown directive `{other}`")))
            }
        }
    }

    let lookup = |name: &str, line: usize| -> Result<usize> {
        index.get(name).copied().ok_or_else(|| {
            Error::MalformedStructure(format!("unknown world `{name}` on line {line}"))
        })
    };
    let mut succ = vec![Vec::new(); names.len()];
    for (a, b, line) in &edges {
        let (a, b) = (lookup(a, *line)?, lookup(b, *line)?);
        if !succ[a].contains(&b) {
            succ[a].push(b);
        }
    }
    let Some((init_name, init_line)) = init else {
        return Err(Error::MalformedStructure("missing `init` line".into()));
    };
    let init = lookup(&init_name, init_line)?;
    let k = Kripke {
        names,
        labels,
        succ,
        init,
    };
    k.validate()?;
    Ok(k)
}

pub fn serialize_kripke(k: &Kripke) -> String {
    let mut out = String::new();
    for (name, label) in k.names.iter().zip(&k.labels) {
        let props: Vec<&str> = label.iter().map(Prop::as_str).collect();
        out.push_str(&format!("world {name} {{ {} }}\n", props.join(" ")));
    }
    for (w, s) in k.succ.iter().enumerate() {
        for &v in s {
            out.push_str(&format!("edge {} {}\n", k.names[w], k.names[v]));
        }
    }
    out.push_str(&format!("init {}\n", k.names[k.init]));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_world_cycle() {
        let k = parse_kripke("# demo\nworld a { p }\nworld b {q}\nedge a b\nedge b a\ninit a\n").unwrap();
        assert_eq!(k.len(), 2);
        assert_eq!(k.succ, vec![vec![1], vec![0]]);
        assert_eq!(parse_kripke(&serialize_kripke(&k)).unwrap(), k);
    }

    #[test]
    fn rejects_bad_structures() {
        assert!(matches!(
            parse_kripke("world a { p }\nworld b {}\nedge a b\ninit a"),
            Err(Error::MalformedStructure(_))
        ));
        assert!(matches!(
            parse_kripke("world a {}\nedge a a\ninit a\ninit a"),
            Err(Error::Syntax { line: 4, .. })
        ));
        assert!(matches!(
            parse_kripke("world a {}\nedge a c\ninit a"),
            Err(Error::MalformedStructure(_))
        ));
        assert!(matches!(
            parse_kripke("world a {}\nedge a a"),
            Err(Error::MalformedStructure(_))
        ));
        assert!(matches!(parse_kripke("world a p\ninit a"), Err(Error::Syntax { .. })));
    }
}
