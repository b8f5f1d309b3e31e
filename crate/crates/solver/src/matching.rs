//! Equation–variable bipartite graphs, maximum matching, and the
//! Dulmage–Mendelsohn decomposition into over-, under- and well-constrained
//! parts.
//!
//! The decomposition drives two solver decisions: instantiation candidates
//! may only use variables from the under-constrained part, and literal
//! selections whose equations contain an over-constrained subsystem are
//! never robustly satisfiable, so filters can discard them.

use ntacert_formula::{Term, VarId};
use std::collections::VecDeque;

/// One vertex per equation and per variable; an edge wherever the variable
/// occurs syntactically in the equation (occurrence, not multiplicity).
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    /// Variable universe, ascending; columns refer to positions here.
    pub vars: Vec<VarId>,
    /// Per equation, the sorted positions of its variables.
    pub adj: Vec<Vec<usize>>,
}

pub fn build_graph(equations: &[Term], vars: &[VarId]) -> BipartiteGraph {
    let adj = equations
        .iter()
        .map(|f| {
            let occurring = f.vars();
            vars.iter()
                .enumerate()
                .filter(|(_, v)| occurring.contains(v))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    BipartiteGraph {
        vars: vars.to_vec(),
        adj,
    }
}

/// Maximum bipartite matching (Hopcroft–Karp). Returns per-equation and
/// per-variable partners.
pub fn maximum_matching(g: &BipartiteGraph) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let n_eq = g.adj.len();
    let n_var = g.vars.len();
    let mut eq_match: Vec<Option<usize>> = vec![None; n_eq];
    let mut var_match: Vec<Option<usize>> = vec![None; n_var];

    loop {
        // BFS layers from unmatched equations.
        let mut dist = vec![usize::MAX; n_eq];
        let mut queue = VecDeque::new();
        for (e, m) in eq_match.iter().enumerate() {
            if m.is_none() {
                dist[e] = 0;
                queue.push_back(e);
            }
        }
        let mut found_augmenting = false;
        while let Some(e) = queue.pop_front() {
            for &v in &g.adj[e] {
                match var_match[v] {
                    None => found_augmenting = true,
                    Some(e2) => {
                        if dist[e2] == usize::MAX {
                            dist[e2] = dist[e] + 1;
                            queue.push_back(e2);
                        }
                    }
                }
            }
        }
        if !found_augmenting {
            break;
        }
        // DFS along the layering, augmenting vertex-disjoint paths.
        fn try_augment(
            e: usize,
            g: &BipartiteGraph,
            dist: &mut [usize],
            eq_match: &mut [Option<usize>],
            var_match: &mut [Option<usize>],
        ) -> bool {
            for &v in &g.adj[e] {
                let next = var_match[v];
                let ok = match next {
                    None => true,
                    Some(e2) => {
                        dist[e2] == dist[e] + 1
                            && try_augment(e2, g, dist, eq_match, var_match)
                    }
                };
                if ok {
                    eq_match[e] = Some(v);
                    var_match[v] = Some(e);
                    return true;
                }
            }
            dist[e] = usize::MAX;
            false
        }
        for e in 0..n_eq {
            if eq_match[e].is_none() && dist[e] == 0 {
                try_augment(e, g, &mut dist, &mut eq_match, &mut var_match);
            }
        }
    }
    (eq_match, var_match)
}

/// Canonical three-way partition. Equation/variable entries are positions
/// into the graph's equation list and `vars` table, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DmDecomposition {
    pub over_eqs: Vec<usize>,
    pub over_vars: Vec<usize>,
    pub under_eqs: Vec<usize>,
    pub under_vars: Vec<usize>,
    pub well_eqs: Vec<usize>,
    pub well_vars: Vec<usize>,
}

impl DmDecomposition {
    pub fn is_all_well(&self) -> bool {
        self.over_eqs.is_empty()
            && self.over_vars.is_empty()
            && self.under_eqs.is_empty()
            && self.under_vars.is_empty()
    }
}

/// Computes the decomposition from a maximum matching: the over part is what
/// alternating paths reach from unmatched equations, the under part what they
/// reach from unmatched variables, and the well part is the rest.
pub fn dm_decompose(g: &BipartiteGraph) -> DmDecomposition {
    let n_eq = g.adj.len();
    let n_var = g.vars.len();
    let (eq_match, var_match) = maximum_matching(g);

    // Variable adjacency (reverse edges).
    let mut var_adj: Vec<Vec<usize>> = vec![Vec::new(); n_var];
    for (e, vs) in g.adj.iter().enumerate() {
        for &v in vs {
            var_adj[v].push(e);
        }
    }

    // Over side: equation --any edge--> variable --matched edge--> equation.
    let mut eq_over = vec![false; n_eq];
    let mut var_over = vec![false; n_var];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for (e, m) in eq_match.iter().enumerate() {
        if m.is_none() {
            eq_over[e] = true;
            queue.push_back(e);
        }
    }
    while let Some(e) = queue.pop_front() {
        for &v in &g.adj[e] {
            if !var_over[v] {
                var_over[v] = true;
                if let Some(e2) = var_match[v] {
                    if !eq_over[e2] {
                        eq_over[e2] = true;
                        queue.push_back(e2);
                    }
                }
            }
        }
    }

    // Under side: variable --any edge--> equation --matched edge--> variable.
    let mut eq_under = vec![false; n_eq];
    let mut var_under = vec![false; n_var];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for (v, m) in var_match.iter().enumerate() {
        if m.is_none() {
            var_under[v] = true;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &e in &var_adj[v] {
            if !eq_under[e] {
                eq_under[e] = true;
                if let Some(v2) = eq_match[e] {
                    if !var_under[v2] {
                        var_under[v2] = true;
                        queue.push_back(v2);
                    }
                }
            }
        }
    }

    let collect = |flags: &[bool]| -> Vec<usize> {
        flags
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(i, _)| i)
            .collect()
    };
    let complement = |a: &[bool], b: &[bool]| -> Vec<usize> {
        (0..a.len()).filter(|&i| !a[i] && !b[i]).collect()
    };
    DmDecomposition {
        over_eqs: collect(&eq_over),
        over_vars: collect(&var_over),
        under_eqs: collect(&eq_under),
        under_vars: collect(&var_under),
        well_eqs: complement(&eq_over, &eq_under),
        well_vars: complement(&var_over, &var_under),
    }
}

/// True iff the system of equations contains no over-constrained subsystem,
/// i.e. every subset of equations touches at least as many variables
/// (a necessary condition for robust satisfiability).
pub fn is_overconstrained_free(equations: &[Term], vars: &[VarId]) -> bool {
    dm_decompose(&build_graph(equations, vars)).over_eqs.is_empty()
}
