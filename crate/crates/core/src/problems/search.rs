use std::collections::HashSet;
use std::hash::Hash;

/// Breadth-first search returning the goal's value at the shallowest depth
/// where it is `Some`, or `not_found` after `max_depth` levels.
///
/// `goal` sees each node with its depth; the initial node has depth 0.
/// Nodes already reached on an earlier level are not expanded again.
pub fn bfs<N, T, S, I, G>(initial: N, mut successors: S, mut goal: G, max_depth: usize, not_found: T) -> T
where
    N: Clone + Eq + Hash,
    S: FnMut(&N) -> I,
    I: IntoIterator<Item = N>,
    G: FnMut(&N, usize) -> Option<T>,
{
    if let Some(v) = goal(&initial, 0) {
        return v;
    }
    let mut visited = HashSet::from([initial.clone()]);
    let mut level = vec![initial];
    for depth in 1..=max_depth {
        let mut next = Vec::new();
        for node in &level {
            for succ in successors(node) {
                if !visited.insert(succ.clone()) {
                    continue;
                }
                if let Some(v) = goal(&succ, depth) {
                    return v;
                }
                next.push(succ);
            }
        }
        if next.is_empty() {
            break;
        }
        level = next;
    }
    not_found
}
