use super::Matrix;

/// Strongly connected components of the digraph with an edge `i → j`
/// whenever `i ≠ j` and `m[i, j] ≠ 0`. Components come out in a
/// topological order of the condensation (sources first).
pub fn strongly_connected_components(m: &Matrix) -> Vec<Vec<usize>> {
    let n = m.rows();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && m[(i, j)] != 0.0).collect())
        .collect();
    let pred: Vec<Vec<usize>> = (0..n)
        .map(|j| (0..n).filter(|&i| i != j && m[(i, j)] != 0.0).collect())
        .collect();

    // Kosaraju: finish order on the graph, then sweep the reverse graph.
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut stack = vec![(root, 0usize)];
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if let Some(&w) = succ[v].get(*next) {
                *next += 1;
                if !visited[w] {
                    visited[w] = true;
                    stack.push((w, 0));
                }
            } else {
                order.push(v);
                stack.pop();
            }
        }
    }

    let mut comp = vec![usize::MAX; n];
    let mut comps = Vec::new();
    for &root in order.iter().rev() {
        if comp[root] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut members = vec![root];
        comp[root] = id;
        let mut k = 0;
        while k < members.len() {
            let v = members[k];
            for &w in &pred[v] {
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    members.push(w);
                }
            }
            k += 1;
        }
        members.sort_unstable();
        comps.push(members);
    }
    comps
}
