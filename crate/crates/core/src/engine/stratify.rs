//! Ground dependency graph and stratum assignment.
//!
//! Nodes are ground atoms. Each rule instance with a positive conclusion adds
//! an edge from every condition atom to the conclusion atom; the edge is
//! negative when the condition is negated. Negative conclusions are never
//! consumed by other rules (negated conditions only test the positive atom),
//! so they add no edges and are layered after their rule's conditions.

use super::ground::{atom_of, is_negative, lit_id, Grounding};
use crate::logic::Polarity;

/// Stratum per literal id, or `None` if a cycle runs through negation.
pub(crate) fn stratify(g: &Grounding) -> Option<Vec<usize>> {
    let n = g.atoms.len();
    let mut edges: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
    for inst in &g.instances {
        if is_negative(inst.head) {
            continue;
        }
        let head = atom_of(inst.head);
        for &(a, neg) in &inst.conditions {
            edges[a].push((head, neg));
        }
    }

    let comp = tarjan(&edges);
    let comp_count = comp.iter().copied().max().map_or(0, |m| m + 1);
    for (src, out) in edges.iter().enumerate() {
        for &(dst, neg) in out {
            if neg && comp[src] == comp[dst] {
                return None;
            }
        }
    }

    // Tarjan numbers components in reverse topological order: a component's
    // successors all carry smaller numbers.
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); comp_count];
    for (a, &c) in comp.iter().enumerate() {
        members[c].push(a);
    }
    let mut comp_stratum = vec![0usize; comp_count];
    for c in (0..comp_count).rev() {
        for &a in &members[c] {
            for &(dst, neg) in &edges[a] {
                let d = comp[dst];
                if d != c {
                    let need = comp_stratum[c] + usize::from(neg);
                    if comp_stratum[d] < need {
                        comp_stratum[d] = need;
                    }
                }
            }
        }
    }

    let mut strata = vec![0usize; g.lit_count()];
    for a in 0..n {
        strata[lit_id(a, Polarity::Positive)] = comp_stratum[comp[a]];
        strata[lit_id(a, Polarity::Negative)] = 0;
    }
    for inst in &g.instances {
        if !is_negative(inst.head) {
            continue;
        }
        let need = inst.conditions.iter().map(|&(a, neg)| comp_stratum[comp[a]] + usize::from(neg)).max().unwrap_or(0);
        let s = &mut strata[inst.head];
        *s = (*s).max(need);
    }
    Some(strata)
}

/// Iterative Tarjan; returns the component number of every node.
fn tarjan(edges: &[Vec<(usize, bool)>]) -> Vec<usize> {
    let n = edges.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![UNSEEN; n];
    let mut next_index = 0;
    let mut next_comp = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut work: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(top) = work.len().checked_sub(1) {
            let (v, i) = work[top];
            if i < edges[v].len() {
                let w = edges[v][i].0;
                work[top].1 += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(parent, _)) = work.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}
