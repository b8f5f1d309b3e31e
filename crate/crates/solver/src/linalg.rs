//! Dense numeric linear algebra for instantiation choices: Jacobians,
//! a one-sided Jacobi SVD, threshold-based rank decisions, and the
//! enumeration of variable subsets to instantiate.
//!
//! Everything here is heuristic in the sense that a bad answer only wastes
//! search effort; soundness rests entirely on the certificate checker.

use crate::dual::{eval_dual, eval_f64};
use crate::matching::{build_graph, dm_decompose};
use ntacert_formula::{Term, VarId};
use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

/// Jacobian of `equations` with respect to `vars` at `point` (indexed by
/// `VarId`), as rows. `None` if any value or derivative fails to be finite.
pub fn jacobian_at(equations: &[Term], vars: &[VarId], point: &[f64]) -> Option<Vec<Vec<f64>>> {
    let mut rows = Vec::with_capacity(equations.len());
    for f in equations {
        let d = eval_dual(f, point, vars);
        if !d.value.is_finite() || d.d.iter().any(|x| !x.is_finite()) {
            return None;
        }
        rows.push(d.d);
    }
    Some(rows)
}

/// Singular values (descending) and the matching right singular vectors.
///
/// `v_cols[k]` has unit length and satisfies `‖A·v_cols[k]‖ = sigma[k]`;
/// in particular the columns with vanishing sigma span the null space.
#[derive(Debug, Clone)]
pub struct Svd {
    pub sigma: Vec<f64>,
    pub v_cols: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One-sided Jacobi: rotate column pairs of A (and of an identity V) until
/// all columns are mutually orthogonal. Works for any shape; on wide
/// matrices the surplus columns converge to zero.
pub fn svd_jacobi(rows: &[Vec<f64>], n_cols: usize) -> Svd {
    let mut a: Vec<Vec<f64>> = (0..n_cols)
        .map(|j| rows.iter().map(|r| r[j]).collect())
        .collect();
    let mut v: Vec<Vec<f64>> = (0..n_cols)
        .map(|j| {
            let mut e = vec![0.0; n_cols];
            e[j] = 1.0;
            e
        })
        .collect();

    let tol = 1e-15;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n_cols {
            for q in (p + 1)..n_cols {
                let alpha = dot(&a[p], &a[p]);
                let beta = dot(&a[q], &a[q]);
                let gamma = dot(&a[p], &a[q]);
                if gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for cols in [&mut a, &mut v] {
                    for i in 0..cols[p].len() {
                        let (x, y) = (cols[p][i], cols[q][i]);
                        cols[p][i] = c * x - s * y;
                        cols[q][i] = s * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let sig: Vec<f64> = a.iter().map(|col| dot(col, col).sqrt()).collect();
    let mut order: Vec<usize> = (0..n_cols).collect();
    order.sort_by(|&i, &j| sig[j].total_cmp(&sig[i]));
    Svd {
        sigma: order.iter().map(|&i| sig[i]).collect(),
        v_cols: order.iter().map(|&i| v[i].clone()).collect(),
    }
}

/// Numeric rank under the conventional threshold
/// `sigma_max * max(rows, cols) * eps`; also returns the threshold so
/// callers can classify null columns consistently.
pub fn rank_with_threshold(svd: &Svd, n_rows: usize, n_cols: usize) -> (usize, f64) {
    let smax = svd.sigma.first().copied().unwrap_or(0.0);
    let threshold = smax * (n_rows.max(n_cols) as f64) * f64::EPSILON;
    let rank = svd.sigma.iter().filter(|&&s| s > threshold).count();
    (rank, threshold)
}

/// Rank of the matrix plus whether it is robustly of full rank
/// (every singular value clears the threshold).
pub fn numeric_rank(rows: &[Vec<f64>], n_cols: usize) -> (usize, bool) {
    let svd = svd_jacobi(rows, n_cols);
    let (rank, _) = rank_with_threshold(&svd, rows.len(), n_cols);
    (rank, rank == rows.len().min(n_cols))
}

/// Ranks variables by how strongly they participate in the Jacobian's null
/// space: weight(i) = sum over null columns k of |V[i][k]|, descending,
/// ties by variable id. Empty when the matrix has full column rank, i.e.
/// when no instantiation is needed to make it regular.
pub fn kearfott_order(svd: &Svd, vars: &[VarId], n_rows: usize) -> Vec<(VarId, f64)> {
    let (_, threshold) = rank_with_threshold(svd, n_rows, vars.len());
    let null_cols: Vec<usize> = (0..svd.sigma.len())
        .filter(|&k| svd.sigma[k] <= threshold)
        .collect();
    if null_cols.is_empty() {
        return Vec::new();
    }
    let mut weighted: Vec<(VarId, f64)> = vars
        .iter()
        .enumerate()
        .map(|(i, &var)| {
            (
                var,
                null_cols.iter().map(|&k| svd.v_cols[k][i].abs()).sum(),
            )
        })
        .collect();
    weighted.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    weighted
}

/// Gauss–Newton refinement of an approximate root: `steps` iterations of
/// `x ← x − J⁺F(x)` with the pseudo-inverse built from the SVD (singular
/// directions below the rank threshold are left untouched). Works for any
/// system shape; `None` if evaluation leaves the finite range.
pub fn newton_polish(
    equations: &[Term],
    vars: &[VarId],
    point: &[f64],
    steps: usize,
) -> Option<Vec<f64>> {
    let mut x = point.to_vec();
    for _ in 0..steps {
        let jac = jacobian_at(equations, vars, &x)?;
        let f: Vec<f64> = equations.iter().map(|t| eval_f64(t, &x)).collect();
        if f.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let svd = svd_jacobi(&jac, vars.len());
        let (_, threshold) = rank_with_threshold(&svd, equations.len(), vars.len());
        let mut delta = vec![0.0; vars.len()];
        for k in 0..svd.sigma.len() {
            let s = svd.sigma[k];
            if s <= threshold {
                continue;
            }
            // u_k = J v_k / s, so the k-th component of J⁺F is (J v_k)·F / s².
            let jv: Vec<f64> = jac.iter().map(|row| dot(row, &svd.v_cols[k])).collect();
            let coeff = dot(&jv, &f) / (s * s);
            for (d, vk) in delta.iter_mut().zip(&svd.v_cols[k]) {
                *d -= coeff * vk;
            }
        }
        if delta.iter().any(|d| !d.is_finite()) {
            return None;
        }
        for (i, &v) in vars.iter().enumerate() {
            x[v.0] += delta[i];
        }
    }
    Some(x)
}

/// A set of variables to fix at point values, with the cumulative null-space
/// weight that ranked it (0 when weighting is disabled).
#[derive(Debug, Clone, PartialEq)]
pub struct InstantiationCandidate {
    pub vars: Vec<VarId>,
    pub score: f64,
}

/// Structural and numeric rejection tests applied to each candidate.
#[derive(Debug, Clone, Copy, Default)]
pub struct CandidateFilters {
    /// Drop candidates whose removal leaves a system that is not perfectly
    /// matchable (some equations would be structurally over-constrained).
    pub drop_unmatchable: bool,
    /// Drop candidates whose remaining square Jacobian is not robustly of
    /// full rank at the evaluation point.
    pub drop_rank_deficient: bool,
}

struct HeapEntry {
    score: f64,
    tuple: Vec<usize>,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Max-heap: larger score first, lexicographically smaller tuple on ties.
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.tuple.cmp(&self.tuple))
    }
}

/// Enumerates candidate instantiation sets of size `s` drawn from `all_vars`.
///
/// Variables that occur in no equation are forced into every candidate (no
/// box axis may be independent of the equation system); the remaining slots
/// are filled from the under-constrained part of the equation/variable
/// graph, best-first by cumulative weight when `use_weights` is set and in
/// ascending variable order otherwise. At most `cap` candidates are
/// returned and at most `raw_cap` subsets are examined.
pub fn instantiation_candidates(
    equations: &[Term],
    all_vars: &[VarId],
    point: &[f64],
    s: usize,
    use_weights: bool,
    filters: CandidateFilters,
    cap: usize,
    raw_cap: usize,
) -> Vec<InstantiationCandidate> {
    let mut eq_vars: Vec<VarId> = Vec::new();
    for f in equations {
        for v in f.vars() {
            if !eq_vars.contains(&v) {
                eq_vars.push(v);
            }
        }
    }
    eq_vars.sort();
    let forced: Vec<VarId> = all_vars
        .iter()
        .copied()
        .filter(|v| !eq_vars.contains(v))
        .collect();
    if forced.len() > s {
        return Vec::new();
    }
    let k = s - forced.len();

    let graph = build_graph(equations, &eq_vars);
    let dm = dm_decompose(&graph);
    let mut pool: Vec<VarId> = dm.under_vars.iter().map(|&i| eq_vars[i]).collect();
    if k > pool.len() {
        return Vec::new();
    }

    let jacobian = jacobian_at(equations, &eq_vars, point);
    let mut weights = vec![0.0; pool.len()];
    if use_weights {
        if let Some(rows) = &jacobian {
            let svd = svd_jacobi(rows, eq_vars.len());
            let ranked = kearfott_order(&svd, &eq_vars, equations.len());
            pool.sort_by(|a, b| {
                let wa = ranked.iter().position(|(v, _)| v == a).unwrap_or(usize::MAX);
                let wb = ranked.iter().position(|(v, _)| v == b).unwrap_or(usize::MAX);
                wa.cmp(&wb)
            });
            for (i, v) in pool.iter().enumerate() {
                if let Some((_, w)) = ranked.iter().find(|(rv, _)| rv == v) {
                    weights[i] = *w;
                }
            }
        }
    }

    let passes = |candidate_vars: &[VarId]| -> bool {
        if filters.drop_unmatchable {
            let rest: Vec<VarId> = eq_vars
                .iter()
                .copied()
                .filter(|v| !candidate_vars.contains(v))
                .collect();
            if !dm_decompose(&build_graph(equations, &rest)).is_all_well() {
                return false;
            }
        }
        if filters.drop_rank_deficient {
            if let Some(rows) = &jacobian {
                let keep: Vec<usize> = eq_vars
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !candidate_vars.contains(v))
                    .map(|(i, _)| i)
                    .collect();
                let sub: Vec<Vec<f64>> = rows
                    .iter()
                    .map(|r| keep.iter().map(|&i| r[i]).collect())
                    .collect();
                let (_, robust) = numeric_rank(&sub, keep.len());
                if !robust {
                    return false;
                }
            }
        }
        true
    };

    // Best-first walk over the k-subset lattice of the ordered pool.
    let mut heap = BinaryHeap::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let first: Vec<usize> = (0..k).collect();
    let score_of = |tuple: &[usize]| tuple.iter().map(|&i| weights[i]).sum::<f64>();
    seen.insert(first.clone());
    heap.push(HeapEntry {
        score: score_of(&first),
        tuple: first,
    });

    let mut out = Vec::new();
    let mut examined = 0usize;
    while let Some(entry) = heap.pop() {
        examined += 1;
        if examined > raw_cap {
            break;
        }
        let mut candidate: Vec<VarId> = forced.clone();
        candidate.extend(entry.tuple.iter().map(|&i| pool[i]));
        candidate.sort();
        if passes(&candidate) {
            out.push(InstantiationCandidate {
                vars: candidate,
                score: entry.score,
            });
            if out.len() >= cap {
                break;
            }
        }
        for j in 0..entry.tuple.len() {
            let bound = if j + 1 < entry.tuple.len() {
                entry.tuple[j + 1]
            } else {
                pool.len()
            };
            if entry.tuple[j] + 1 < bound {
                let mut child = entry.tuple.clone();
                child[j] += 1;
                if seen.insert(child.clone()) {
                    heap.push(HeapEntry {
                        score: score_of(&child),
                        tuple: child,
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ntacert_formula::Func;
    use proptest::prelude::*;

    fn v(i: usize) -> Term {
        Term::var(i)
    }

    #[test]
    fn jacobian_matches_central_differences() {
        // f1 = x*y + sin(z), f2 = exp(x) - z*z
        let eqs = vec![
            Term::add(Term::mul(v(0), v(1)), Term::app(Func::Sin, v(2))),
            Term::sub(Term::app(Func::Exp, v(0)), Term::mul(v(2), v(2))),
        ];
        let vars: Vec<VarId> = (0..3).map(VarId).collect();
        let point = [0.7, -1.3, 2.1];
        let jac = jacobian_at(&eqs, &vars, &point).expect("finite");
        for (r, f) in eqs.iter().enumerate() {
            for (c, &var) in vars.iter().enumerate() {
                let h = 1e-6 * point[var.0].abs().max(1.0);
                let mut hi = point.to_vec();
                let mut lo = point.to_vec();
                hi[var.0] += h;
                lo[var.0] -= h;
                let approx = (crate::dual::eval_f64(f, &hi) - crate::dual::eval_f64(f, &lo))
                    / (2.0 * h);
                let exact = jac[r][c];
                assert!(
                    (approx - exact).abs() <= 1e-4 * exact.abs().max(1.0),
                    "d f{r} / d x{c}: {approx} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn jacobian_is_rejected_where_it_overflows() {
        let eqs = vec![Term::app(Func::Exp, v(0))];
        assert!(jacobian_at(&eqs, &[VarId(0)], &[1000.0]).is_none());
        assert!(jacobian_at(&eqs, &[VarId(0)], &[1.0]).is_some());
    }

    #[test]
    fn diagonal_matrix_recovers_sorted_singular_values() {
        let rows = vec![vec![3.0, 0.0], vec![0.0, 4.0]];
        let svd = svd_jacobi(&rows, 2);
        assert!((svd.sigma[0] - 4.0).abs() < 1e-12);
        assert!((svd.sigma[1] - 3.0).abs() < 1e-12);
        // Leading right vector is the second axis.
        assert!(svd.v_cols[0][1].abs() > 0.999);
    }

    #[test]
    fn wide_matrix_yields_a_null_vector() {
        let rows = vec![vec![1.0, 1.0]];
        let svd = svd_jacobi(&rows, 2);
        assert!((svd.sigma[0] - 2f64.sqrt()).abs() < 1e-12);
        assert!(svd.sigma[1].abs() < 1e-12);
        let null = &svd.v_cols[1];
        assert!((null[0] + null[1]).abs() < 1e-12, "A·v should vanish");
        assert!((null[0].hypot(null[1]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_decisions_on_small_examples() {
        assert_eq!(
            numeric_rank(&[vec![1.0, 0.0], vec![0.0, 1.0]], 2),
            (2, true)
        );
        assert_eq!(
            numeric_rank(&[vec![1.0, 1.0], vec![1.0, 1.0]], 2),
            (1, false)
        );
        // A singular value below the relative threshold does not count.
        assert_eq!(
            numeric_rank(&[vec![1.0, 0.0], vec![0.0, 1e-30]], 2),
            (1, false)
        );
    }

    #[test]
    fn null_space_weights_prefer_the_free_variable() {
        let svd = svd_jacobi(&[vec![1.0, 0.0]], 2);
        let order = kearfott_order(&svd, &[VarId(0), VarId(1)], 1);
        assert_eq!(order[0].0, VarId(1));
        assert!((order[0].1 - 1.0).abs() < 1e-12);
        assert!(order[1].1.abs() < 1e-12);
    }

    #[test]
    fn symmetric_weights_tie_break_by_variable_id() {
        let svd = svd_jacobi(&[vec![1.0, 1.0]], 2);
        let order = kearfott_order(&svd, &[VarId(0), VarId(1)], 1);
        assert_eq!(order[0].0, VarId(0));
        assert!((order[0].1 - order[1].1).abs() < 1e-12);
        assert!((order[0].1 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn full_rank_matrices_need_no_ordering() {
        let svd = svd_jacobi(&[vec![1.0, 0.0], vec![0.0, 1.0]], 2);
        assert!(kearfott_order(&svd, &[VarId(0), VarId(1)], 2).is_empty());
    }

    #[test]
    fn polishing_a_linear_root_is_exact() {
        // x - 1 = 0 from a nearby start lands on 1.0 bit-for-bit.
        let eqs = vec![Term::sub(v(0), Term::int(1))];
        let x = newton_polish(&eqs, &[VarId(0)], &[0.925], 4).unwrap();
        assert_eq!(x[0], 1.0);
    }

    #[test]
    fn polishing_converges_on_a_transcendental_root() {
        // sin(x) = 1/2 near x = pi/6.
        let eqs = vec![Term::sub(Term::app(Func::Sin, v(0)), Term::rat(1, 2))];
        let x = newton_polish(&eqs, &[VarId(0)], &[0.4], 8).unwrap();
        assert!((x[0] - std::f64::consts::FRAC_PI_6).abs() < 1e-12);
    }

    #[test]
    fn polishing_leaves_singular_directions_alone() {
        // x² at 0: the Jacobian is [0], so the step is empty and the point
        // survives untouched rather than dividing by zero.
        let eqs = vec![Term::mul(v(0), v(0))];
        let x = newton_polish(&eqs, &[VarId(0)], &[0.0], 4).unwrap();
        assert_eq!(x[0], 0.0);
    }

    #[test]
    fn unmatchable_candidates_are_dropped() {
        // x+y = 0 and z+w = 0: instantiating {x, y} starves the first
        // equation, so only cross pairs survive the structural filter.
        let eqs = vec![Term::add(v(0), v(1)), Term::add(v(2), v(3))];
        let vars: Vec<VarId> = (0..4).map(VarId).collect();
        let point = [0.0; 4];
        let filters = CandidateFilters {
            drop_unmatchable: true,
            drop_rank_deficient: false,
        };
        let cands = instantiation_candidates(&eqs, &vars, &point, 2, false, filters, 64, 4096);
        assert_eq!(cands.len(), 4);
        for c in &cands {
            assert_ne!(c.vars, vec![VarId(0), VarId(1)]);
            assert_ne!(c.vars, vec![VarId(2), VarId(3)]);
        }
        let loose = instantiation_candidates(
            &eqs,
            &vars,
            &point,
            2,
            false,
            CandidateFilters::default(),
            64,
            4096,
        );
        assert_eq!(loose.len(), 6);
    }

    #[test]
    fn variables_outside_every_equation_are_always_instantiated() {
        // x - 1 = 0 together with an inequality-only variable q: the only
        // valid instantiation set of size 1 is {q}.
        let eqs = vec![Term::sub(v(0), Term::int(1))];
        let vars = vec![VarId(0), VarId(1)];
        let cands = instantiation_candidates(
            &eqs,
            &vars,
            &[1.0, 0.0],
            1,
            false,
            CandidateFilters::default(),
            64,
            4096,
        );
        assert_eq!(cands.len(), 1);
        assert_eq!(cands[0].vars, vec![VarId(1)]);
    }

    #[test]
    fn weighted_enumeration_visits_heaviest_subsets_first() {
        // One equation in three variables with very unequal sensitivities:
        // J = [1, 1e-6, 1e-12] makes z, then y, the preferred choices.
        let eqs = vec![Term::add(
            v(0),
            Term::add(
                Term::mul(Term::rat(1, 1_000_000), v(1)),
                Term::mul(Term::rat(1, 1_000_000_000_000), v(2)),
            ),
        )];
        let vars: Vec<VarId> = (0..3).map(VarId).collect();
        let cands = instantiation_candidates(
            &eqs,
            &vars,
            &[0.0; 3],
            2,
            true,
            CandidateFilters::default(),
            64,
            4096,
        );
        assert_eq!(cands.len(), 3);
        assert_eq!(cands[0].vars, vec![VarId(1), VarId(2)]);
        assert!(cands[0].score >= cands[1].score && cands[1].score >= cands[2].score);
    }

    proptest! {
        #[test]
        fn rank_is_transpose_invariant(
            entries in proptest::collection::vec(-10.0f64..10.0, 12),
            rows in 1usize..=4,
        ) {
            let cols = 12 / 4;
            let m: Vec<Vec<f64>> = (0..rows)
                .map(|r| entries[r * cols..(r + 1) * cols].to_vec())
                .collect();
            let t: Vec<Vec<f64>> = (0..cols)
                .map(|c| (0..rows).map(|r| m[r][c]).collect())
                .collect();
            prop_assert_eq!(numeric_rank(&m, cols).0, numeric_rank(&t, rows).0);
        }

        #[test]
        fn rank_filter_only_tightens_the_structural_filter(
            coeffs in proptest::collection::vec(-5.0f64..5.0, 4),
            point in proptest::collection::vec(-2.0f64..2.0, 4),
        ) {
            // c0*x + c1*y = 0 and c2*z + c3*w = 0: instantiating {x, y} or
            // {z, w} starves an equation, so those sets fail both filters;
            // every set passing the rank filter must pass the structural one.
            let c = |i: usize| Term::Const(
                num_rational::BigRational::from_float(coeffs[i]).unwrap(),
            );
            let eqs = vec![
                Term::add(Term::mul(c(0), v(0)), Term::mul(c(1), v(1))),
                Term::add(Term::mul(c(2), v(2)), Term::mul(c(3), v(3))),
            ];
            let vars: Vec<VarId> = (0..4).map(VarId).collect();
            let rank_filtered = instantiation_candidates(
                &eqs, &vars, &point, 2, false,
                CandidateFilters { drop_unmatchable: false, drop_rank_deficient: true },
                64, 4096,
            );
            let structural = instantiation_candidates(
                &eqs, &vars, &point, 2, false,
                CandidateFilters { drop_unmatchable: true, drop_rank_deficient: false },
                64, 4096,
            );
            for cand in &rank_filtered {
                prop_assert!(structural.iter().any(|s| s.vars == cand.vars));
            }
        }
    }
}
