//! Accepting-lasso search by nested depth-first search over an implicit graph.

use std::collections::HashMap;
use std::hash::Hash;

/// An implicitly given Büchi graph with labelled edges.
pub trait LassoGraph {
    type Node: Clone + Eq + Hash;
    type Label: Clone;

    fn initial(&self) -> Vec<Self::Node>;
    fn successors(&self, n: &Self::Node) -> Vec<(Self::Label, Self::Node)>;
    fn accepting(&self, n: &Self::Node) -> bool;
}

/// Edge labels of an accepting lasso: a stem from an initial node, then a
/// non-empty cycle through an accepting node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso<L> {
    pub stem: Vec<L>,
    pub cycle: Vec<L>,
}

struct Frame<L> {
    node: usize,
    incoming: Option<L>,
    next_edge: usize,
}

struct Search<'g, G: LassoGraph> {
    graph: &'g G,
    ids: HashMap<G::Node, usize>,
    nodes: Vec<G::Node>,
    succ: Vec<Option<Vec<(G::Label, usize)>>>,
    blue: Vec<bool>,
    red: Vec<bool>,
    /// Position on the outer stack, if the node is on it.
    cyan: Vec<Option<usize>>,
}

impl<'g, G: LassoGraph> Search<'g, G> {
    fn intern(&mut self, n: G::Node) -> usize {
        if let Some(&i) = self.ids.get(&n) {
            return i;
        }
        let i = self.nodes.len();
        self.ids.insert(n.clone(), i);
        self.nodes.push(n);
        self.succ.push(None);
        self.blue.push(false);
        self.red.push(false);
        self.cyan.push(None);
        i
    }

    fn edges(&mut self, i: usize) -> usize {
        if self.succ[i].is_none() {
            let raw = self.graph.successors(&self.nodes[i]);
            let list = raw
                .into_iter()
                .map(|(l, n)| (l, self.intern(n)))
                .collect();
            self.succ[i] = Some(list);
        }
        self.succ[i].as_ref().map_or(0, Vec::len)
    }

    fn edge(&self, i: usize, k: usize) -> (G::Label, usize) {
        self.succ[i].as_ref().expect("expanded")[k].clone()
    }

    /// Searches from accepting `seed` for a node on the outer stack. Returns
    /// the labels of the path and the stack position reached.
    fn inner(&mut self, seed: usize) -> Option<(Vec<G::Label>, usize)> {
        let mut stack: Vec<Frame<G::Label>> = vec![Frame {
            node: seed,
            incoming: None,
            next_edge: 0,
        }];
        self.red[seed] = true;
        while let Some(top) = stack.last_mut() {
            let i = top.node;
            let k = top.next_edge;
            top.next_edge += 1;
            if k >= self.edges(i) {
                stack.pop();
                continue;
            }
            let (label, j) = self.edge(i, k);
            if let Some(pos) = self.cyan[j] {
                let mut path: Vec<G::Label> =
                    stack.iter().filter_map(|f| f.incoming.clone()).collect();
                path.push(label);
                return Some((path, pos));
            }
            if !self.red[j] {
                self.red[j] = true;
                stack.push(Frame {
                    node: j,
                    incoming: Some(label),
                    next_edge: 0,
                });
            }
        }
        None
    }

    fn run(&mut self) -> Option<Lasso<G::Label>> {
        for init in self.graph.initial() {
            let root = self.intern(init);
            if self.blue[root] {
                continue;
            }
            let mut stack: Vec<Frame<G::Label>> = vec![Frame {
                node: root,
                incoming: None,
                next_edge: 0,
            }];
            self.blue[root] = true;
            self.cyan[root] = Some(0);
            while let Some(top) = stack.last_mut() {
                let i = top.node;
                let k = top.next_edge;
                top.next_edge += 1;
                if k < self.edges(i) {
                    let (label, j) = self.edge(i, k);
                    if !self.blue[j] {
                        self.blue[j] = true;
                        self.cyan[j] = Some(stack.len());
                        stack.push(Frame {
                            node: j,
                            incoming: Some(label),
                            next_edge: 0,
                        });
                    }
                    continue;
                }
                // Post-order: every node reachable from `i` is now blue or cyan.
                if self.graph.accepting(&self.nodes[i]) {
                    if let Some((tail, pos)) = self.inner(i) {
                        let labels: Vec<G::Label> =
                            stack.iter().map(|f| f.incoming.clone()).skip(1).flatten().collect();
                        let stem = labels[..pos].to_vec();
                        let mut cycle = labels[pos..].to_vec();
                        cycle.extend(tail);
                        return Some(Lasso { stem, cycle });
                    }
                }
                self.cyan[i] = None;
                stack.pop();
            }
        }
        None
    }
}

/// Finds an accepting lasso if one is reachable.
pub fn find_accepting_lasso<G: LassoGraph>(graph: &G) -> Option<Lasso<G::Label>> {
    Search {
        graph,
        ids: HashMap::new(),
        nodes: Vec::new(),
        succ: Vec::new(),
        blue: Vec::new(),
        red: Vec::new(),
        cyan: Vec::new(),
    }
    .run()
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Explicit {
        edges: Vec<Vec<usize>>,
        accepting: Vec<bool>,
    }

    impl LassoGraph for Explicit {
        type Node = usize;
        type Label = (usize, usize);

        fn initial(&self) -> Vec<usize> {
            vec![0]
        }

        fn successors(&self, n: &usize) -> Vec<((usize, usize), usize)> {
            self.edges[*n].iter().map(|&m| ((*n, m), m)).collect()
        }

        fn accepting(&self, n: &usize) -> bool {
            self.accepting[*n]
        }
    }

    fn walk_is_valid(g: &Explicit, l: &Lasso<(usize, usize)>) -> bool {
        let mut at = 0;
        for &(a, b) in l.stem.iter().chain(&l.cycle) {
            if a != at || !g.edges[a].contains(&b) {
                return false;
            }
            at = b;
        }
        let start = l.cycle[0].0;
        at == start && l.cycle.iter().any(|&(a, _)| g.accepting[a])
    }

    #[test]
    fn finds_cycle_through_accepting_node() {
        let g = Explicit {
            edges: vec![vec![1], vec![2, 3], vec![1], vec![3]],
            accepting: vec![false, false, true, false],
        };
        let l = find_accepting_lasso(&g).unwrap();
        assert!(walk_is_valid(&g, &l));
    }

    #[test]
    fn accepting_node_off_cycle_is_not_enough() {
        let g = Explicit {
            edges: vec![vec![1], vec![2], vec![2]],
            accepting: vec![false, true, false],
        };
        assert!(find_accepting_lasso(&g).is_none());
    }

    #[test]
    fn self_loop_at_root() {
        let g = Explicit {
            edges: vec![vec![0]],
            accepting: vec![true],
        };
        let l = find_accepting_lasso(&g).unwrap();
        assert!(l.stem.is_empty());
        assert_eq!(l.cycle, vec![(0, 0)]);
    }
}
