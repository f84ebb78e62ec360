//! Flat, order-preserving encoding of objects under relabeling.
//!
//! An object is compiled once into a template whose atoms refer to slots of
//! an assignment. Encoding the template under an assignment yields a token
//! sequence; comparing two such sequences lexicographically agrees with the
//! order on the relabeled objects. Every encoding is self-delimiting:
//! containers write their rank and length before their items and text ends
//! with a zero token, so the lexicographic comparison never runs past one
//! item into the next.

use super::super::value::{AtomGroup, Value};

enum Tpl {
    Fixed(Vec<u64>),
    /// Group index and position among the group's sources.
    Atom(u64, usize, usize),
    Tuple(Vec<Tpl>),
    Set(Vec<Tpl>),
    Map(Vec<(Tpl, Tpl)>),
}

const ATOM: u64 = 4;
const TUPLE: u64 = 5;
const SET: u64 = 6;
const MAP: u64 = 7;

fn fixed(v: &Value, out: &mut Vec<u64>) {
    match v {
        Value::Unit => out.push(0),
        Value::Bool(b) => out.extend([1, *b as u64]),
        Value::Int(i) => out.extend([2, (*i as u64) ^ (1 << 63)]),
        Value::Text(t) => {
            out.push(3);
            out.extend(t.bytes().map(|b| b as u64 + 1));
            out.push(0);
        }
        Value::Atom(a) => out.extend([ATOM, a.uset().id() as u64, a.index() as u64]),
        Value::Tuple(items) => {
            out.extend([TUPLE, items.len() as u64]);
            items.iter().for_each(|x| fixed(x, out));
        }
        Value::Set(items) => {
            out.extend([SET, items.len() as u64]);
            items.iter().for_each(|x| fixed(x, out));
        }
        Value::Map(pairs) => {
            out.extend([MAP, pairs.len() as u64]);
            for (k, v) in pairs.iter() {
                fixed(k, out);
                fixed(v, out);
            }
        }
    }
}

pub(crate) struct Template {
    root: Tpl,
}

/// Reusable buffers for sorting item encodings.
#[derive(Default)]
pub(crate) struct Scratch {
    bounds: Vec<(usize, usize)>,
    region: Vec<u64>,
}

impl Template {
    pub fn compile(v: &Value, groups: &[AtomGroup]) -> Template {
        Template {
            root: compile(v, groups),
        }
    }
}

fn compile(v: &Value, groups: &[AtomGroup]) -> Tpl {
    if v.is_atom_free() {
        return Tpl::Fixed(encode_fixed(v));
    }
    match v {
        Value::Atom(a) => {
            let g = groups
                .iter()
                .position(|g| g.uset == a.uset())
                .expect("atom belongs to a group");
            let p = groups[g].sources.binary_search(&a.index()).expect("atom is a source");
            Tpl::Atom(a.uset().id() as u64, g, p)
        }
        Value::Tuple(items) => Tpl::Tuple(items.iter().map(|x| compile(x, groups)).collect()),
        Value::Set(items) => Tpl::Set(items.iter().map(|x| compile(x, groups)).collect()),
        Value::Map(pairs) => Tpl::Map(
            pairs
                .iter()
                .map(|(k, v)| (compile(k, groups), compile(v, groups)))
                .collect(),
        ),
        _ => unreachable!("scalars are atom-free"),
    }
}

/// Lower bound on the encoding of `t` under a partial assignment.
///
/// `image(g, p)` is `None` for an unassigned atom, which is then known to map
/// to an index of at least `lowest[g]`. Writes tokens up to and including the
/// first unassigned atom (as `lowest[g]`) and returns whether the encoding is
/// complete. An incomplete result is a prefix-wise lower bound of every
/// completion.
fn bound(
    t: &Tpl,
    image: &impl Fn(usize, usize) -> Option<u32>,
    lowest: &[u32],
    out: &mut Vec<u64>,
    scratch: &mut Scratch,
) -> bool {
    match t {
        Tpl::Fixed(tokens) => {
            out.extend_from_slice(tokens);
            true
        }
        Tpl::Atom(uset, g, p) => match image(*g, *p) {
            Some(i) => {
                out.extend([ATOM, *uset, i as u64]);
                true
            }
            None => {
                out.extend([ATOM, *uset, lowest[*g] as u64]);
                false
            }
        },
        Tpl::Tuple(items) => {
            out.extend([TUPLE, items.len() as u64]);
            items.iter().all(|x| bound(x, image, lowest, out, scratch))
        }
        Tpl::Set(items) => {
            out.extend([SET, items.len() as u64]);
            let base = out.len();
            let mark = scratch.bounds.len();
            for x in items {
                let start = out.len();
                if !bound(x, image, lowest, out, scratch) {
                    out.truncate(base);
                    scratch.bounds.truncate(mark);
                    return false;
                }
                scratch.bounds.push((start, out.len()));
            }
            sort_region(out, base, mark, scratch);
            true
        }
        Tpl::Map(pairs) => {
            out.extend([MAP, pairs.len() as u64]);
            let base = out.len();
            let mark = scratch.bounds.len();
            for (k, v) in pairs {
                let start = out.len();
                if !(bound(k, image, lowest, out, scratch) && bound(v, image, lowest, out, scratch)) {
                    out.truncate(base);
                    scratch.bounds.truncate(mark);
                    return false;
                }
                scratch.bounds.push((start, out.len()));
            }
            sort_region(out, base, mark, scratch);
            true
        }
    }
}

/// What a partial assignment can still achieve against the original object.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outlook {
    /// Every completion is at least the original.
    NotSmaller,
    /// This (complete) assignment gives a strictly smaller image.
    Smaller,
    Open,
}

/// An object compiled for comparing its relabelings against itself.
pub(crate) struct Comparator {
    template: Template,
    /// Identity encodings of the top-level items of a set or map, ascending.
    items: Option<Vec<Vec<u64>>>,
    whole: Vec<u64>,
    scratch: Scratch,
    buf: Vec<u64>,
    bounds: Vec<(usize, usize)>,
}

impl Comparator {
    pub fn new(o: &Value, groups: &[AtomGroup]) -> Comparator {
        let template = Template::compile(o, groups);
        let items = match o {
            Value::Set(xs) if !o.is_atom_free() => Some(xs.iter().map(encode_fixed).collect()),
            Value::Map(ps) if !o.is_atom_free() => Some(
                ps.iter()
                    .map(|(k, v)| {
                        let mut out = encode_fixed(k);
                        fixed(v, &mut out);
                        out
                    })
                    .collect(),
            ),
            _ => None,
        };
        Comparator {
            template,
            items,
            whole: encode_fixed(o),
            scratch: Scratch::default(),
            buf: Vec::new(),
            bounds: Vec::new(),
        }
    }

    /// Compares the relabelings reachable from a partial assignment with the
    /// original object.
    pub fn outlook(&mut self, image: &impl Fn(usize, usize) -> Option<u32>, lowest: &[u32]) -> Outlook {
        self.buf.clear();
        let (Some(items), Tpl::Set(_) | Tpl::Map(_)) = (&self.items, &self.template.root) else {
            let exact = bound(&self.template.root, image, lowest, &mut self.buf, &mut self.scratch);
            return verdict(self.buf.as_slice().cmp(&self.whole), exact);
        };
        self.bounds.clear();
        let mut exact = true;
        let mut push = |buf: &mut Vec<u64>, bounds: &mut Vec<(usize, usize)>, ok: bool| {
            exact &= ok;
            let start = bounds.last().map_or(0, |b| b.1);
            bounds.push((start, buf.len()));
        };
        match &self.template.root {
            Tpl::Set(xs) => {
                for x in xs {
                    let ok = bound(x, image, lowest, &mut self.buf, &mut self.scratch);
                    push(&mut self.buf, &mut self.bounds, ok);
                }
            }
            Tpl::Map(ps) => {
                for (k, v) in ps {
                    let ok = bound(k, image, lowest, &mut self.buf, &mut self.scratch)
                        && bound(v, image, lowest, &mut self.buf, &mut self.scratch);
                    push(&mut self.buf, &mut self.bounds, ok);
                }
            }
            _ => unreachable!(),
        }
        let buf = &self.buf;
        self.bounds.sort_unstable_by(|a, b| buf[a.0..a.1].cmp(&buf[b.0..b.1]));
        for (&(s, e), item) in self.bounds.iter().zip(items) {
            match buf[s..e].cmp(item) {
                std::cmp::Ordering::Equal => continue,
                ord => return verdict(ord, exact),
            }
        }
        Outlook::NotSmaller
    }
}

fn verdict(ord: std::cmp::Ordering, exact: bool) -> Outlook {
    match ord {
        std::cmp::Ordering::Less if exact => Outlook::Smaller,
        std::cmp::Ordering::Less => Outlook::Open,
        _ => Outlook::NotSmaller,
    }
}

fn encode_fixed(v: &Value) -> Vec<u64> {
    let mut out = Vec::new();
    fixed(v, &mut out);
    out
}

/// Reorders the item encodings recorded in `scratch.bounds[mark..]`, which
/// together cover `out[base..]`, ascending.
fn sort_region(out: &mut [u64], base: usize, mark: usize, scratch: &mut Scratch) {
    let Scratch { bounds, region } = scratch;
    let items = &mut bounds[mark..];
    if items.windows(2).all(|w| out[w[0].0..w[0].1] <= out[w[1].0..w[1].1]) {
        bounds.truncate(mark);
        return;
    }
    region.clear();
    region.extend_from_slice(&out[base..]);
    items.sort_unstable_by(|a, b| region[a.0 - base..a.1 - base].cmp(&region[b.0 - base..b.1 - base]));
    let mut at = base;
    for &(s, e) in items.iter() {
        let len = e - s;
        out[at..at + len].copy_from_slice(&region[s - base..e - base]);
        at += len;
    }
    bounds.truncate(mark);
}
