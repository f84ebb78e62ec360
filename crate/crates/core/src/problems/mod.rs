//! The two worked problems: directed graphs and reset words of automata.

mod search;

pub use search::bfs;

use std::sync::Arc;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::pipeline::Pipeline;
use crate::value::{Uset, Value};

/// Directed graphs on `n` nodes: all subsets of `nodes × nodes`.
pub fn digraphs(n: u32) -> Result<Domain> {
    let nodes = Domain::uset(n, "n")?;
    Domain::subsets(&(&nodes * &nodes))
}

/// Keeps graphs without an edge from a node to itself.
pub fn without_loops(graphs: &Domain) -> Domain {
    graphs.filter_labeled(
        "no_loops",
        Arc::new(|g| Ok(has_no_loops(g))),
        crate::domain::DEFAULT_SAMPLE_BUDGET,
    )
}

pub fn has_no_loops(graph: &Value) -> bool {
    graph.as_set().is_some_and(|edges| {
        edges.iter().all(|e| {
            let t = e.as_tuple().expect("edges are pairs");
            t[0] != t[1]
        })
    })
}

/// Deterministic automata as total transition maps
/// `(state, symbol) -> state`.
#[derive(Clone)]
pub struct Automata {
    pub states: Uset,
    pub symbols: Uset,
    pub domain: Domain,
}

pub fn automata(n_states: u32, n_symbols: u32) -> Result<Automata> {
    if n_states == 0 || n_symbols == 0 {
        return Err(Error::invalid("automata need at least one state and one symbol"));
    }
    let states = Uset::new(n_states, "q");
    let symbols = Uset::new(n_symbols, "s");
    let s = Domain::of_uset(states);
    let a = Domain::of_uset(symbols);
    let domain = Domain::mappings(&(&s * &a), &s)?;
    Ok(Automata {
        states,
        symbols,
        domain,
    })
}

/// Transition table indexed by state then symbol.
struct Table {
    next: Vec<Vec<usize>>,
}

impl Table {
    fn from_value(delta: &Value) -> Option<Table> {
        let pairs = delta.as_map()?;
        let mut entries = Vec::with_capacity(pairs.len());
        for (k, v) in pairs.iter() {
            let key = k.as_tuple()?;
            let [s, a] = key else { return None };
            entries.push((
                s.as_atom()?.index() as usize,
                a.as_atom()?.index() as usize,
                v.as_atom()?.index() as usize,
            ));
        }
        let n = entries.iter().map(|e| e.0.max(e.2) + 1).max()?;
        let k = entries.iter().map(|e| e.1 + 1).max()?;
        let mut next = vec![vec![usize::MAX; k]; n];
        for (s, a, t) in entries {
            next[s][a] = t;
        }
        if next.iter().flatten().any(|&t| t == usize::MAX) {
            return None;
        }
        Some(Table { next })
    }
}

/// Set of states as a bit vector.
#[derive(Clone, PartialEq, Eq, Hash)]
struct StateSet(Vec<u64>);

impl StateSet {
    fn full(n: usize) -> StateSet {
        let mut words = vec![0u64; n.div_ceil(64)];
        for i in 0..n {
            words[i / 64] |= 1 << (i % 64);
        }
        StateSet(words)
    }

    fn len(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(wi, &w)| (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| wi * 64 + b))
    }
}

/// Length of a shortest word sending every state to one state, searching
/// up to `(n³ - n) / 6` letters. `Some(0)` for a single state, `None` when
/// no such word exists.
pub fn shortest_reset_word(delta: &Value) -> Option<u64> {
    let table = Table::from_value(delta)?;
    let n = table.next.len();
    let k = table.next[0].len();
    let cap = (n * n * n - n) / 6;
    bfs(
        StateSet::full(n),
        |set: &StateSet| {
            (0..k)
                .map(|a| {
                    let mut words = vec![0u64; set.0.len()];
                    for s in set.iter() {
                        let t = table.next[s][a];
                        words[t / 64] |= 1 << (t % 64);
                    }
                    StateSet(words)
                })
                .collect::<Vec<_>>()
        },
        |set: &StateSet, depth| (set.len() == 1).then_some(Some(depth as u64)),
        cap,
        None,
    )
}

/// Minimal reset word length, or 0 if there is none. A single-state
/// automaton is already synchronized and also gives 0.
pub fn check_automaton(delta: &Value) -> u64 {
    shortest_reset_word(delta).unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResetMode {
    Cnfs,
    Iterate,
}

/// `automata.<mode>().map(check_automaton).max(size=1)`.
pub fn reset_word_pipeline(automata: &Automata, mode: ResetMode) -> Pipeline {
    let base = match mode {
        ResetMode::Cnfs => Pipeline::cnfs(&automata.domain),
        ResetMode::Iterate => Pipeline::iterate(&automata.domain),
    };
    base.map_labeled(
        "check_automaton",
        Arc::new(|d: &Value| Ok(Value::Int(check_automaton(d) as i64))),
    )
    .max_size(1)
}
