#![allow(dead_code)]

use std::collections::BTreeSet;

use canonforge::value::{atoms, canonical_form_oracle, Permutation};
use canonforge::{Domain, Uset, Value};
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;

/// Random strict domain over the given usets with at most `max_size`
/// positions, or `None` if the draw was too large.
pub fn random_strict_domain<R: Rng>(rng: &mut R, usets: &[Uset], depth: u32, max_size: u64) -> Option<Domain> {
    let d = strict(rng, usets, depth)?;
    d.span().to_u64().is_some_and(|s| s <= max_size).then_some(d)
}

fn leaf<R: Rng>(rng: &mut R, usets: &[Uset]) -> Domain {
    match rng.random_range(0..5) {
        0 => Domain::range(rng.random_range(1..4)),
        1 => Domain::boolean(),
        2 => Domain::none(),
        _ => Domain::of_uset(usets[rng.random_range(0..usets.len())]),
    }
}

fn strict<R: Rng>(rng: &mut R, usets: &[Uset], depth: u32) -> Option<Domain> {
    if depth == 0 || rng.random_bool(0.3) {
        return Some(leaf(rng, usets));
    }
    let small = |d: &Domain, n: u64| d.size_u64().is_some_and(|s| s <= n);
    Some(match rng.random_range(0..7) {
        0 => &strict(rng, usets, depth - 1)? * &strict(rng, usets, depth - 1)?,
        1 => Domain::sequences(&strict(rng, usets, depth - 1)?, rng.random_range(0..3)).ok()?,
        2 => {
            let g = strict(rng, usets, depth - 1)?;
            if !small(&g, 9) {
                return None;
            }
            Domain::subsets(&g).ok()?
        }
        3 => {
            let g = strict(rng, usets, depth - 1)?;
            if !small(&g, 12) {
                return None;
            }
            let k = rng.random_range(0..=g.size_u64()? as usize);
            Domain::subsets_of_size(&g, k).ok()?
        }
        4 => {
            let k = strict(rng, usets, depth - 1)?;
            let v = strict(rng, usets, depth - 1)?;
            if !small(&k, 5) || !small(&v, 6) {
                return None;
            }
            Domain::mappings(&k, &v).ok()?
        }
        5 => &strict(rng, usets, depth - 1)? + &strict(rng, usets, depth - 1)?,
        _ => {
            // isomorphism-invariant predicate
            let parity = rng.random_range(0..2);
            strict(rng, usets, depth - 1)?.filter(move |v| Ok(atoms(v).len() % 2 == parity))
        }
    })
}

/// Canonical forms found by filtering full iteration with the brute-force
/// oracle, or `None` if iterating `d` fails (a join of overlapping parts
/// used as subset elements, say).
pub fn oracle_cnfs(d: &Domain) -> Option<Vec<Value>> {
    let mut set = BTreeSet::new();
    for v in d.iter() {
        let v = v.ok()?;
        if canonical_form_oracle(&v) == v {
            set.insert(v);
        }
    }
    Some(set.into_iter().collect())
}

/// A random permutation of every uset in the list.
pub fn random_permutation<R: Rng>(rng: &mut R, usets: &[Uset]) -> Permutation {
    let mut pairs = Vec::new();
    for &u in usets {
        let mut img: Vec<u32> = (0..u.size()).collect();
        img.shuffle(rng);
        pairs.extend((0..u.size()).map(|i| (u.atom(i), u.atom(img[i as usize]))));
    }
    Permutation::from_pairs(pairs).unwrap()
}

/// Digraph classes on `n` nodes by Burnside's lemma: the average over node
/// permutations of `2^(cycles on ordered pairs)`.
pub fn burnside_digraphs(n: usize) -> u128 {
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }
    let all = perms(n);
    let mut total: u128 = 0;
    for p in &all {
        let mut seen = vec![false; n * n];
        let mut cycles = 0;
        for start in 0..n * n {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut e = start;
            while !seen[e] {
                seen[e] = true;
                e = p[e / n] * n + p[e % n];
            }
        }
        total += 1u128 << cycles;
    }
    total / all.len() as u128
}

/// Digraph classes on `n` nodes by minimizing each adjacency bitmask over
/// all node relabelings.
pub fn bitmask_digraph_classes(n: usize) -> usize {
    let perms: Vec<Vec<usize>> = {
        let mut v: Vec<usize> = (0..n).collect();
        let mut out = vec![v.clone()];
        // Heap's algorithm
        let mut c = vec![0; n];
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    v.swap(0, i);
                } else {
                    v.swap(c[i], i);
                }
                out.push(v.clone());
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        out
    };
    let edges = n * n;
    let mut reps = BTreeSet::new();
    for g in 0u64..(1 << edges) {
        let mut best = u64::MAX;
        for p in &perms {
            let mut h = 0u64;
            for e in 0..edges {
                if g >> e & 1 == 1 {
                    h |= 1 << (p[e / n] * n + p[e % n]);
                }
            }
            best = best.min(h);
        }
        reps.insert(best);
    }
    reps.len()
}

/// Longest shortest reset word over every transition table with `n`
/// states and `k` symbols, by plain BFS over state subsets.
pub fn exhaustive_reset_max(n: usize, k: usize) -> u32 {
    let cells = n * k;
    let mut best = 0;
    let mut table = vec![0usize; cells];
    loop {
        best = best.max(reset_length(&table, n, k));
        let mut i = 0;
        loop {
            if i == cells {
                return best;
            }
            table[i] += 1;
            if table[i] < n {
                break;
            }
            table[i] = 0;
            i += 1;
        }
    }
}

fn reset_length(table: &[usize], n: usize, k: usize) -> u32 {
    let full: u32 = (1 << n) - 1;
    let mut dist = vec![u32::MAX; 1 << n];
    dist[full as usize] = 0;
    let mut queue = std::collections::VecDeque::from([full]);
    while let Some(s) = queue.pop_front() {
        if s.count_ones() == 1 {
            return dist[s as usize];
        }
        for a in 0..k {
            let mut t = 0u32;
            for q in 0..n {
                if s >> q & 1 == 1 {
                    t |= 1 << table[q * k + a];
                }
            }
            if dist[t as usize] == u32::MAX {
                dist[t as usize] = dist[s as usize] + 1;
                queue.push_back(t);
            }
        }
    }
    0
}
