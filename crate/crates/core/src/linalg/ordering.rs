//! Minimum-degree fill-reducing ordering on the symmetrized pattern `A + Aᵀ`.
//!
//! Rows with identical closed adjacency (for DG systems: the 6 unknowns of
//! one element) are merged into weighted supervariables before elimination,
//! which shrinks the graph and keeps each block contiguous in the ordering.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

/// Returns `order` with `order[k]` the original column eliminated at step `k`.
pub fn minimum_degree(dim: usize, row_ptr: &[usize], col_idx: &[usize]) -> Vec<usize> {
    let adjacency = symmetric_adjacency(dim, row_ptr, col_idx);
    let (members, mut adj) = compress(&adjacency);
    let weight: Vec<usize> = members.iter().map(Vec::len).collect();
    let nsuper = members.len();

    let degree_of = |adj: &[usize], weight: &[usize]| adj.iter().map(|&t| weight[t]).sum::<usize>();
    let mut degree: Vec<usize> = adj.iter().map(|a| degree_of(a, &weight)).collect();
    let mut heap: BinaryHeap<(Reverse<usize>, Reverse<usize>)> =
        (0..nsuper).map(|s| (Reverse(degree[s]), Reverse(s))).collect();
    let mut eliminated = vec![false; nsuper];
    let mut order = Vec::with_capacity(dim);
    let mut merged = Vec::new();

    while let Some((Reverse(d), Reverse(p))) = heap.pop() {
        if eliminated[p] || d != degree[p] {
            continue;
        }
        eliminated[p] = true;
        order.extend_from_slice(&members[p]);
        let clique = std::mem::take(&mut adj[p]);
        for &u in &clique {
            merged.clear();
            let (a, b) = (&adj[u], &clique);
            let (mut i, mut j) = (0, 0);
            while i < a.len() || j < b.len() {
                let next = match (a.get(i), b.get(j)) {
                    (Some(&x), Some(&y)) if x == y => {
                        i += 1;
                        j += 1;
                        x
                    }
                    (Some(&x), Some(&y)) if x < y => {
                        i += 1;
                        x
                    }
                    (Some(&x), None) => {
                        i += 1;
                        x
                    }
                    (_, Some(&y)) => {
                        j += 1;
                        y
                    }
                    (None, None) => unreachable!(),
                };
                if next != u && next != p {
                    merged.push(next);
                }
            }
            std::mem::swap(&mut adj[u], &mut merged);
            degree[u] = degree_of(&adj[u], &weight);
            heap.push((Reverse(degree[u]), Reverse(u)));
        }
    }
    debug_assert_eq!(order.len(), dim);
    order
}

fn symmetric_adjacency(dim: usize, row_ptr: &[usize], col_idx: &[usize]) -> Vec<Vec<usize>> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); dim];
    for i in 0..dim {
        for &j in &col_idx[row_ptr[i]..row_ptr[i + 1]] {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    adj
}

/// Groups vertices with identical closed neighborhoods. Groups are numbered
/// by their smallest member, and the returned adjacency is between groups.
fn compress(adjacency: &[Vec<usize>]) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let dim = adjacency.len();
    let mut group_of = vec![usize::MAX; dim];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    for i in 0..dim {
        let mut closed = adjacency[i].clone();
        let pos = closed.partition_point(|&x| x < i);
        closed.insert(pos, i);
        let g = *seen.entry(closed).or_insert_with(|| {
            members.push(Vec::new());
            members.len() - 1
        });
        members[g].push(i);
        group_of[i] = g;
    }
    let adj = members
        .iter()
        .enumerate()
        .map(|(g, m)| {
            let mut a: Vec<usize> = adjacency[m[0]].iter().map(|&j| group_of[j]).filter(|&h| h != g).collect();
            a.sort_unstable();
            a.dedup();
            a
        })
        .collect();
    (members, adj)
}
