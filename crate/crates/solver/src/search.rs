//! The four-level certificate search.
//!
//! Level one samples candidate points as local minima of the formula
//! objective; level two selects one approximately satisfiable literal per
//! clause; level three pins a variable subset to the point's coordinates so
//! the remaining equation system is square; level four hunts for a box (or
//! a tiling of one) on which the topological degree certifies a root and
//! interval arithmetic certifies the inequalities. Every `sat` answer is
//! re-validated with the independent checker before it is returned, so a
//! heuristic defect can cost completeness but never soundness.

use crate::basin::basin_hopping;
use crate::forced::{forced_consistency, single_var_linear, Consistency};
use crate::linalg::{
    instantiation_candidates, newton_polish, CandidateFilters, InstantiationCandidate,
};
use crate::matching::is_overconstrained_free;
use crate::objective::{build_objective, literal_penalty};
use ntacert_certificate::{check_certificate, formula_digest, Certificate, Verdict};
use ntacert_formula::{
    conjunct_formula, dnf_selectors, normalize, partition_selected, selected_literals, Formula,
    Literal, Rel, SystemPair, Term, VarId,
};
use ntacert_interval::{eval_term, Interval, NamedBox};
use ntacert_topdeg::{degree, DegreeResult, DEFAULT_FACE_BUDGET};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::time::{Duration, Instant};

/// How level four turns an approximate root into a certified box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxStrategy {
    /// Grow a box around the point, doubling the side until the degree
    /// certifies a root or the side exceeds 1.
    EpsInflation,
    /// Refine a unit start cube breadth-first, discarding refuted cells.
    Gridding,
    /// Inflation first, gridding as the fallback.
    EpsThenGridding,
}

/// All knobs of the search. The named presets (`SearchConfig::preset`)
/// switch the six heuristic flags cumulatively; `Default` is the strongest
/// preset, `7c`.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Order each clause's candidate literals by objective value.
    pub sort_literals: bool,
    /// Abandon points whose forced literals are symbolically contradictory.
    pub check_forced_literals: bool,
    /// Drop selectors whose equations contain an over-constrained subsystem.
    pub filter_overconstr: bool,
    /// Drop instantiations leaving a structurally unmatchable system.
    pub filter_overconstr_v: bool,
    /// Drop instantiations leaving a numerically rank-deficient Jacobian.
    pub filter_rank_deficient: bool,
    /// Order instantiation candidates by null-space weight.
    pub kearfott_ordering: bool,
    pub box_strategy: BoxStrategy,
    /// Threshold under which a literal counts as approximately satisfied.
    pub eps_lit: f64,
    /// Side length of the first inflation box.
    pub eps_box: f64,
    /// Margin by which strict inequalities are weakened during the search.
    pub eps_strict: f64,
    /// Number of level-one points.
    pub k: usize,
    /// Selectors tried per point.
    pub selector_cap: usize,
    /// Instantiations tried per selector.
    pub instantiation_cap: usize,
    /// Total boxes a gridding run may create.
    pub grid_limit: usize,
    /// Side of the gridding start cube.
    pub grid_start_side: f64,
    /// Pieces a degree box may be split into to verify inequalities.
    pub ineq_split_cap: usize,
    /// Cell budget per degree computation (also used by the self-check).
    pub degree_budget: usize,
    /// Total descent steps granted to the level-one optimizer.
    pub optimizer_budget: usize,
    /// Conjuncts examined when restarting on the disjunctive expansion.
    pub dnf_cap: usize,
    pub timeout: Option<Duration>,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            sort_literals: true,
            check_forced_literals: true,
            filter_overconstr: true,
            filter_overconstr_v: true,
            filter_rank_deficient: true,
            kearfott_ordering: true,
            box_strategy: BoxStrategy::EpsThenGridding,
            eps_lit: 1e-6,
            eps_box: 1e-20,
            eps_strict: 1e-20,
            k: 100,
            selector_cap: 64,
            instantiation_cap: 64,
            grid_limit: 10_000,
            grid_start_side: 1.0,
            ineq_split_cap: 256,
            degree_budget: DEFAULT_FACE_BUDGET,
            optimizer_budget: 200_000,
            dnf_cap: 10_000,
            timeout: None,
            seed: 0,
        }
    }
}

impl SearchConfig {
    /// The evaluation ladder: `1` is the bare search, each further rung adds
    /// one heuristic on top of the previous one — `2` sorted literals, `3`
    /// the over-constraint filter, `4` forced-literal checking, `5` weighted
    /// instantiation ordering, `6` the post-instantiation matchability
    /// filter, `7` the rank filter. The letter picks the box strategy:
    /// `a` gridding only (defined for rung 1), `b` inflation only, `c`
    /// inflation with gridding fallback.
    pub fn preset(name: &str) -> Option<SearchConfig> {
        let mut chars = name.chars();
        let level = chars.next()?.to_digit(10)? as usize;
        let letter = chars.next()?;
        if chars.next().is_some() || !(1..=7).contains(&level) {
            return None;
        }
        let box_strategy = match letter {
            'a' if level == 1 => BoxStrategy::Gridding,
            'b' => BoxStrategy::EpsInflation,
            'c' => BoxStrategy::EpsThenGridding,
            _ => return None,
        };
        Some(SearchConfig {
            sort_literals: level >= 2,
            filter_overconstr: level >= 3,
            check_forced_literals: level >= 4,
            kearfott_ordering: level >= 5,
            filter_overconstr_v: level >= 6,
            filter_rank_deficient: level >= 7,
            box_strategy,
            ..SearchConfig::default()
        })
    }
}

/// Node and query counters of one solve call.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub points: usize,
    pub selectors: usize,
    pub instantiations: usize,
    pub boxes: usize,
    pub degree_queries: usize,
    /// Conjuncts attempted after the disjunctive-expansion restart.
    pub dnf_restarts: usize,
    /// Assembled certificates the checker rejected (search continues).
    pub self_check_failures: usize,
    pub timed_out: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveResult {
    Sat(Certificate),
    Unknown,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub result: SolveResult,
    pub stats: SearchStats,
    pub elapsed: Duration,
}

struct Ctx<'a> {
    cfg: &'a SearchConfig,
    deadline: Option<Instant>,
    stats: SearchStats,
}

impl Ctx<'_> {
    fn expired(&mut self) -> bool {
        if self.stats.timed_out {
            return true;
        }
        if let Some(d) = self.deadline {
            if Instant::now() >= d {
                self.stats.timed_out = true;
                return true;
            }
        }
        false
    }
}

/// Searches for a satisfiability certificate of `phi`.
///
/// Returns `Sat` only with a certificate that the independent checker has
/// already accepted; everything else — exhausted levels, caps, budgets,
/// timeout — collapses to `Unknown` with the statistics telling why.
pub fn solve(phi: &Formula, cfg: &SearchConfig) -> SearchOutcome {
    let started = Instant::now();
    let phi = normalize(phi);
    let mut ctx = Ctx {
        cfg,
        deadline: cfg.timeout.map(|t| started + t),
        stats: SearchStats::default(),
    };

    let (mut result, any_full_point) = solve_cnf(&phi, &mut ctx);
    if matches!(result, SolveResult::Unknown) && !any_full_point && !ctx.stats.timed_out {
        result = dnf_restart(&phi, &mut ctx);
    }
    SearchOutcome {
        result,
        stats: ctx.stats,
        elapsed: started.elapsed(),
    }
}

/// Level one: up to `k` distinct local minima of the formula objective,
/// ascending by objective value.
pub fn children_points(phi: &Formula, cfg: &SearchConfig) -> Vec<(Vec<f64>, f64)> {
    let obj = build_objective(phi);
    let ranges = start_ranges(phi);
    basin_hopping(&obj, cfg.k, cfg.seed, cfg.optimizer_budget, &ranges).points
}

/// Per-variable sampling ranges for the optimizer: `[-10, 10]` unless a unit
/// clause bounds the variable linearly, in which case the range is clipped
/// or recentered around the implied bound.
fn start_ranges(phi: &Formula) -> Vec<(f64, f64)> {
    let mut ranges = vec![(-10.0, 10.0); phi.num_vars()];
    for clause in &phi.clauses {
        let [lit] = &clause.literals[..] else { continue };
        let Some((v, a, k)) = single_var_linear(&lit.term) else {
            continue;
        };
        // a·x + k ⋈ 0  ⇔  x ⋈' −k/a (the relation flips when a < 0).
        let Some(bound) = (-k / &a).to_f64() else { continue };
        if !bound.is_finite() {
            continue;
        }
        let (lo, hi) = &mut ranges[v.0];
        match lit.rel {
            Rel::Eq => {
                *lo = bound - 1.0;
                *hi = bound + 1.0;
            }
            Rel::Le | Rel::Lt if a.is_positive() => {
                *hi = hi.min(bound);
                if *lo >= *hi {
                    *lo = bound - 20.0;
                }
            }
            Rel::Le | Rel::Lt => {
                *lo = lo.max(bound);
                if *lo >= *hi {
                    *hi = bound + 20.0;
                }
            }
        }
    }
    ranges
}

/// The per-clause sets of approximately satisfiable literals at `p`, as
/// `(literal index, penalty)` pairs in index order; `None` as soon as one
/// clause has no literal within `eps`.
pub fn approx_sat_literals(
    phi: &Formula,
    p: &[f64],
    eps: f64,
) -> Option<Vec<Vec<(usize, f64)>>> {
    phi.clauses
        .iter()
        .map(|clause| {
            let set: Vec<(usize, f64)> = clause
                .literals
                .iter()
                .enumerate()
                .map(|(i, l)| (i, literal_penalty(l, p)))
                .filter(|&(_, v)| v <= eps)
                .collect();
            if set.is_empty() {
                None
            } else {
                Some(set)
            }
        })
        .collect()
}

/// Level two: literal selectors at `p` — the Cartesian product of the
/// approximately-satisfiable sets, capped, with the configured pruning.
pub fn children_literals(phi: &Formula, p: &[f64], cfg: &SearchConfig) -> Vec<Vec<usize>> {
    match approx_sat_literals(phi, p, cfg.eps_lit) {
        Some(sets) => selectors_from_sets(phi, &sets, cfg),
        None => Vec::new(),
    }
}

fn selectors_from_sets(
    phi: &Formula,
    sets: &[Vec<(usize, f64)>],
    cfg: &SearchConfig,
) -> Vec<Vec<usize>> {
    if cfg.check_forced_literals {
        let forced: Vec<Literal> = sets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.len() == 1)
            .map(|(ci, s)| phi.clauses[ci].literals[s[0].0].clone())
            .collect();
        if forced_consistency(&forced) == Consistency::Inconsistent {
            return Vec::new();
        }
    }

    let per_clause: Vec<Vec<usize>> = sets
        .iter()
        .map(|set| {
            let mut set = set.clone();
            if cfg.sort_literals {
                set.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
            }
            set.into_iter().map(|(i, _)| i).collect()
        })
        .collect();

    // Lexicographic product over the (possibly sorted) per-clause lists,
    // last clause fastest; capped on both emitted and examined tuples.
    let raw_cap = cfg.selector_cap.saturating_mul(64);
    let mut out = Vec::new();
    let mut idx = vec![0usize; per_clause.len()];
    let mut examined = 0usize;
    loop {
        if out.len() >= cfg.selector_cap || examined >= raw_cap {
            return out;
        }
        examined += 1;
        let sigma: Vec<usize> = idx
            .iter()
            .zip(&per_clause)
            .map(|(&i, list)| list[i])
            .collect();
        if selector_passes(phi, &sigma, cfg) {
            out.push(sigma);
        }
        let mut pos = per_clause.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < per_clause[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn selector_passes(phi: &Formula, sigma: &[usize], cfg: &SearchConfig) -> bool {
    if !cfg.filter_overconstr {
        return true;
    }
    let eqs = selected_equations(phi, sigma);
    let mut vars = BTreeSet::new();
    for t in &eqs {
        t.collect_vars(&mut vars);
    }
    let vars: Vec<VarId> = vars.into_iter().collect();
    is_overconstrained_free(&eqs, &vars)
}

fn selected_equations(phi: &Formula, sigma: &[usize]) -> Vec<Term> {
    selected_literals(phi, sigma)
        .expect("selector in range")
        .iter()
        .filter(|l| l.rel == Rel::Eq)
        .map(|l| l.term.clone())
        .collect()
}

/// Level three: candidate variable sets to pin at `p`'s coordinates so the
/// remaining selected equations form a square system.
pub fn children_instantiations(
    phi: &Formula,
    p: &[f64],
    sigma: &[usize],
    cfg: &SearchConfig,
) -> Vec<InstantiationCandidate> {
    let eqs = selected_equations(phi, sigma);
    let n = phi.num_vars();
    if eqs.len() > n {
        return Vec::new();
    }
    instantiation_candidates(
        &eqs,
        &phi.all_vars(),
        p,
        n - eqs.len(),
        cfg.kearfott_ordering,
        CandidateFilters {
            drop_unmatchable: cfg.filter_overconstr_v,
            drop_rank_deficient: cfg.filter_rank_deficient,
        },
        cfg.instantiation_cap,
        4096,
    )
}

fn solve_cnf(phi: &Formula, ctx: &mut Ctx) -> (SolveResult, bool) {
    let all_vars: BTreeSet<VarId> = phi.all_vars().into_iter().collect();
    let points = children_points(phi, ctx.cfg);
    let mut any_full_point = false;

    for (p, _) in &points {
        if ctx.expired() {
            break;
        }
        ctx.stats.points += 1;
        let Some(sets) = approx_sat_literals(phi, p, ctx.cfg.eps_lit) else {
            continue;
        };
        any_full_point = true;
        for sigma in selectors_from_sets(phi, &sets, ctx.cfg) {
            if ctx.expired() {
                break;
            }
            ctx.stats.selectors += 1;
            // A certificate's boxes range over Vars(φ)\V with V ⊆ Vars(σ(φ));
            // a variable missing from the selection would leave a box axis no
            // equation depends on, which the boundary condition always rejects.
            let selected = selected_literals(phi, &sigma).expect("selector in range");
            let mut sel_vars = BTreeSet::new();
            for l in &selected {
                l.term.collect_vars(&mut sel_vars);
            }
            if sel_vars != all_vars {
                continue;
            }
            if let Some(cert) = dim0_attempt(phi, &sigma, &selected, p, ctx) {
                return (SolveResult::Sat(cert), any_full_point);
            }
            for cand in children_instantiations(phi, p, &sigma, ctx.cfg) {
                if ctx.expired() {
                    break;
                }
                ctx.stats.instantiations += 1;
                if cand.vars.iter().any(|v| !p[v.0].is_finite()) {
                    continue;
                }
                let nu: BTreeMap<VarId, f64> =
                    cand.vars.iter().map(|&v| (v, p[v.0])).collect();
                let strict = BigRational::from_float(ctx.cfg.eps_strict)
                    .unwrap_or_else(BigRational::zero);
                let Ok((sys, warnings)) = partition_selected(phi, &sigma, &nu, &strict) else {
                    continue;
                };
                if !warnings.is_empty() {
                    continue;
                }
                if let Some(cert) = box_stage(phi, &sigma, &nu, &sys, p, ctx) {
                    return (SolveResult::Sat(cert), any_full_point);
                }
            }
        }
    }
    (SolveResult::Unknown, any_full_point)
}

/// Tries the zero-dimensional certificate: pin *every* variable. The point
/// is polished with Gauss–Newton on the selected equations and snapped to
/// nearby dyadic grids; a snap counts only if each selected literal holds
/// under exact interval evaluation at the point, which for equations means
/// an exactly representable zero.
fn dim0_attempt(
    phi: &Formula,
    sigma: &[usize],
    selected: &[&Literal],
    p: &[f64],
    ctx: &mut Ctx,
) -> Option<Certificate> {
    let eqs: Vec<Term> = selected
        .iter()
        .filter(|l| l.rel == Rel::Eq)
        .map(|l| l.term.clone())
        .collect();
    let vars = phi.all_vars();
    let polished = if eqs.is_empty() {
        p.to_vec()
    } else {
        newton_polish(&eqs, &vars, p, 8)?
    };

    'snap: for snapped in snap_candidates(&polished) {
        if snapped.iter().any(|v| !v.is_finite()) {
            continue;
        }
        let point = NamedBox::new(
            vars.iter().map(|&v| (v, Interval::point(snapped[v.0]))).collect(),
        );
        for lit in selected {
            let Ok(iv) = eval_term(&lit.term, &point) else {
                continue 'snap;
            };
            let ok = match lit.rel {
                Rel::Eq => iv.is_point() && iv.lo() == 0.0,
                Rel::Le => iv.hi() <= 0.0,
                Rel::Lt => iv.hi() < 0.0,
            };
            if !ok {
                continue 'snap;
            }
        }
        ctx.stats.instantiations += 1;
        let nu: BTreeMap<VarId, f64> = vars.iter().map(|&v| (v, snapped[v.0])).collect();
        let cert = assemble_certificate(phi, sigma, &nu, &[]);
        let report = check_certificate(phi, &cert, ctx.cfg.degree_budget);
        if report.verdict == Verdict::Valid {
            return Some(cert);
        }
        ctx.stats.self_check_failures += 1;
    }
    None
}

/// The point itself, then the point rounded to a fine dyadic grid, then to
/// integers — deduplicated, in that order.
fn snap_candidates(x: &[f64]) -> Vec<Vec<f64>> {
    let mut out = vec![x.to_vec()];
    for scale in [65536.0, 1.0] {
        let snapped: Vec<f64> = x.iter().map(|&v| (v * scale).round() / scale).collect();
        if !out.contains(&snapped) {
            out.push(snapped);
        }
    }
    out
}

fn box_stage(
    phi: &Formula,
    sigma: &[usize],
    nu: &BTreeMap<VarId, f64>,
    sys: &SystemPair,
    p: &[f64],
    ctx: &mut Ctx,
) -> Option<Certificate> {
    let boxes = if sys.domain.is_empty() {
        Some(Vec::new())
    } else {
        match ctx.cfg.box_strategy {
            BoxStrategy::EpsInflation => box_search_eps_inflation(sys, p, ctx),
            BoxStrategy::Gridding => box_search_gridding(sys, p, ctx),
            BoxStrategy::EpsThenGridding => box_search_eps_inflation(sys, p, ctx)
                .or_else(|| box_search_gridding(sys, p, ctx)),
        }
    }?;
    let cert = assemble_certificate(phi, sigma, nu, &boxes);
    let report = check_certificate(phi, &cert, ctx.cfg.degree_budget);
    if report.verdict == Verdict::Valid {
        Some(cert)
    } else {
        ctx.stats.self_check_failures += 1;
        None
    }
}

/// Level four, inflation flavor: boxes centered at the point with side
/// `eps_box · 2^i`, endpoints widened one ulp, until the side passes 1.
/// Inclusion monotonicity lets an inequality failure end the iteration.
fn box_search_eps_inflation(
    sys: &SystemPair,
    center: &[f64],
    ctx: &mut Ctx,
) -> Option<Vec<NamedBox>> {
    for i in 0.. {
        let side = ctx.cfg.eps_box * (2f64).powi(i);
        if side > 1.0 {
            return None;
        }
        if ctx.expired() {
            return None;
        }
        ctx.stats.boxes += 1;
        let half = side / 2.0;
        let b = NamedBox::new(
            sys.domain
                .iter()
                .map(|&v| {
                    let c = center[v.0];
                    (v, Interval::new((c - half).next_down(), (c + half).next_up()))
                })
                .collect(),
        );
        if !inequalities_hold(sys, &b) {
            return None;
        }
        ctx.stats.degree_queries += 1;
        if let DegreeResult::Degree(d) = degree(&sys.f, &b, ctx.cfg.degree_budget) {
            if d != 0 {
                return Some(vec![b]);
            }
        }
    }
    None
}

fn inequalities_hold(sys: &SystemPair, b: &NamedBox) -> bool {
    sys.g.iter().all(|g| match eval_term(g, b) {
        Ok(iv) => iv.hi() <= 0.0,
        Err(_) => false,
    })
}

/// Level four, gridding flavor: breadth-first refinement of a start cube.
/// Cells where an equation cannot vanish or an inequality is violated
/// throughout are discarded; on a cell with nonzero degree the inequalities
/// are verified on a tiling of the cell, which becomes β.
fn box_search_gridding(
    sys: &SystemPair,
    center: &[f64],
    ctx: &mut Ctx,
) -> Option<Vec<NamedBox>> {
    let half = ctx.cfg.grid_start_side / 2.0;
    let start = NamedBox::new(
        sys.domain
            .iter()
            .map(|&v| {
                let c = center[v.0];
                (v, Interval::new(c - half, c + half))
            })
            .collect(),
    );
    let mut queue = VecDeque::from([start]);
    let mut created = 1usize;
    while let Some(b) = queue.pop_front() {
        if ctx.expired() {
            return None;
        }
        ctx.stats.boxes += 1;
        if grid_refuted(sys, &b) {
            continue;
        }
        if let Some(tiles) = split_for_inequalities(sys, &b, ctx.cfg.ineq_split_cap) {
            ctx.stats.degree_queries += 1;
            if let DegreeResult::Degree(d) = degree(&sys.f, &b, ctx.cfg.degree_budget) {
                if d != 0 {
                    return Some(tiles);
                }
            }
        }
        let axis = b.longest_axis();
        let iv = b.interval_at(axis);
        let mid = iv.midpoint();
        if !(mid > iv.lo() && mid < iv.hi()) || created + 2 > ctx.cfg.grid_limit {
            continue;
        }
        let (left, right) = b.split_at(axis, mid);
        queue.push_back(left);
        queue.push_back(right);
        created += 2;
    }
    None
}

fn grid_refuted(sys: &SystemPair, b: &NamedBox) -> bool {
    for f in &sys.f {
        match eval_term(f, b) {
            Ok(iv) if iv.contains_zero() => {}
            _ => return true,
        }
    }
    for g in &sys.g {
        match eval_term(g, b) {
            Ok(iv) if iv.lo() <= 0.0 => {}
            _ => return true,
        }
    }
    false
}

/// Splits `b` into at most `cap` closed boxes that tile it exactly, each
/// verifying every inequality; `None` if an inequality is truly violated
/// somewhere in `b` or the cap does not suffice.
fn split_for_inequalities(
    sys: &SystemPair,
    b: &NamedBox,
    cap: usize,
) -> Option<Vec<NamedBox>> {
    let mut done = Vec::new();
    let mut queue = VecDeque::from([b.clone()]);
    let mut pieces = 1usize;
    while let Some(t) = queue.pop_front() {
        let mut all_hold = true;
        for g in &sys.g {
            let iv = eval_term(g, &t).ok()?;
            if iv.lo() > 0.0 {
                return None;
            }
            if iv.hi() > 0.0 {
                all_hold = false;
            }
        }
        if all_hold {
            done.push(t);
            continue;
        }
        let axis = t.longest_axis();
        let iv = t.interval_at(axis);
        let mid = iv.midpoint();
        if !(mid > iv.lo() && mid < iv.hi()) || pieces + 1 > cap {
            return None;
        }
        let (left, right) = t.split_at(axis, mid);
        queue.push_back(left);
        queue.push_back(right);
        pieces += 1;
    }
    Some(done)
}

fn assemble_certificate(
    phi: &Formula,
    sigma: &[usize],
    nu: &BTreeMap<VarId, f64>,
    boxes: &[NamedBox],
) -> Certificate {
    let beta = if boxes.is_empty() {
        vec![BTreeMap::new()]
    } else {
        boxes
            .iter()
            .map(|b| {
                b.vars()
                    .iter()
                    .zip(b.intervals())
                    .map(|(&v, iv)| (phi.var_name(v).to_string(), (iv.lo(), iv.hi())))
                    .collect()
            })
            .collect()
    };
    Certificate {
        formula_digest: formula_digest(phi),
        sigma: sigma.to_vec(),
        nu: nu
            .iter()
            .map(|(&v, &x)| (phi.var_name(v).to_string(), x))
            .collect(),
        beta,
    }
}

/// Restart on the disjunctive expansion: solve each conjunction of selected
/// literals as its own formula and lift any certificate back to `phi` (same
/// variable names, the conjunct's selector tuple as σ).
fn dnf_restart(phi: &Formula, ctx: &mut Ctx) -> SolveResult {
    if phi.clauses.iter().all(|c| c.literals.len() == 1) {
        return SolveResult::Unknown;
    }
    let (sigmas, _truncated) = dnf_selectors(phi, ctx.cfg.dnf_cap);
    for sigma in sigmas {
        if ctx.expired() {
            break;
        }
        let conjunct = conjunct_formula(phi, &sigma);
        // A conjunct that drops variables cannot certify phi: the dropped
        // variables would become dead box axes.
        if conjunct.num_vars() != phi.num_vars() {
            continue;
        }
        ctx.stats.dnf_restarts += 1;
        if let (SolveResult::Sat(sub), _) = solve_cnf(&conjunct, ctx) {
            let cert = Certificate {
                formula_digest: formula_digest(phi),
                sigma: sigma.clone(),
                nu: sub.nu.clone(),
                beta: sub.beta.clone(),
            };
            let report = check_certificate(phi, &cert, ctx.cfg.degree_budget);
            if report.verdict == Verdict::Valid {
                return SolveResult::Sat(cert);
            }
            ctx.stats.self_check_failures += 1;
        }
    }
    SolveResult::Unknown
}

#[cfg(test)]
mod tests {
    use super::*;
    use ntacert_formula::parse_formula;

    /// Small, fast configuration for unit tests.
    fn quick(strategy: BoxStrategy) -> SearchConfig {
        SearchConfig {
            k: 6,
            optimizer_budget: 12_000,
            box_strategy: strategy,
            grid_limit: 2_000,
            seed: 7,
            ..SearchConfig::default()
        }
    }

    fn parse(text: &str) -> Formula {
        parse_formula(text).unwrap()
    }

    #[test]
    fn planted_linear_root_is_certified() {
        let phi = parse("(declare-fun x () Real)(assert (= (- x (/ 1 2)) 0))");
        let out = solve(&phi, &quick(BoxStrategy::EpsThenGridding));
        let SolveResult::Sat(cert) = out.result else {
            panic!("expected sat, got {:?}", out.stats);
        };
        assert_eq!(cert.sigma, vec![0]);
        assert_eq!(out.stats.self_check_failures, 0);
    }

    #[test]
    fn rootless_polynomial_stays_unknown() {
        let phi = parse("(declare-fun x () Real)(assert (= (+ (* x x) 1) 0))");
        let out = solve(&phi, &quick(BoxStrategy::EpsThenGridding));
        assert_eq!(out.result, SolveResult::Unknown);
    }

    #[test]
    fn active_inequality_forces_the_exact_point_path() {
        // x = 1 with x ≤ 1: no box around the root can verify the
        // inequality, so only the fully pinned certificate works.
        let phi = parse(
            "(declare-fun x () Real)(assert (= (- x 1) 0))(assert (<= (- x 1) 0))",
        );
        let out = solve(&phi, &quick(BoxStrategy::EpsThenGridding));
        let SolveResult::Sat(cert) = out.result else {
            panic!("expected sat, got {:?}", out.stats);
        };
        assert_eq!(cert.nu.get("x"), Some(&1.0));
        assert_eq!(cert.beta, vec![BTreeMap::new()]);
    }

    #[test]
    fn strict_inequality_pair_is_certified_with_a_box() {
        // x < 0 and x + 1/3 = 0: the root -1/3 is strictly feasible but not
        // representable, so no pinned point can satisfy the equation exactly
        // and only a box certificate works.
        let phi = parse(
            "(declare-fun x () Real)(assert (< x 0))(assert (= (+ x (/ 1 3)) 0))",
        );
        let out = solve(&phi, &quick(BoxStrategy::EpsThenGridding));
        let SolveResult::Sat(cert) = out.result else {
            panic!("expected sat, got {:?}", out.stats);
        };
        // β is a real box around the root, strictly left of zero.
        let &(lo, hi) = cert.beta[0].get("x").expect("box certificate");
        let c = -1.0 / 3.0;
        assert!(lo < c && c < hi && hi < 0.0, "box [{lo}, {hi}]");
        assert!(cert.nu.is_empty());
    }

    #[test]
    fn exactly_representable_strict_pair_prefers_the_pinned_point() {
        // x < 0 and x + 1 = 0: -1 satisfies the equation exactly under
        // interval evaluation, so the zero-dimensional certificate fires
        // before any box search.
        let phi = parse(
            "(declare-fun x () Real)(assert (< x 0))(assert (= (+ x 1) 0))",
        );
        let out = solve(&phi, &quick(BoxStrategy::EpsThenGridding));
        let SolveResult::Sat(cert) = out.result else {
            panic!("expected sat, got {:?}", out.stats);
        };
        assert_eq!(cert.nu.get("x"), Some(&-1.0));
        assert_eq!(cert.beta, vec![BTreeMap::new()]);
    }

    #[test]
    fn transcendental_equation_certifies_under_both_strategies() {
        let text = "(declare-fun x () Real)(assert (= (- (sin x) (/ 1 2)) 0))";
        for strategy in [BoxStrategy::EpsInflation, BoxStrategy::Gridding] {
            let phi = parse(text);
            let out = solve(&phi, &quick(strategy));
            assert!(
                matches!(out.result, SolveResult::Sat(_)),
                "{strategy:?} failed: {:?}",
                out.stats
            );
        }
    }

    #[test]
    fn selector_order_changes_but_the_set_does_not() {
        let phi = parse(
            "(declare-fun x () Real)\
             (assert (or (= (- x 2) 0) (<= (- x 2) 0)))",
        );
        // Just below 2 the inequality holds exactly (penalty 0) while the
        // equation carries a small residual; sorting must put the inequality
        // first without changing the selector set.
        let p = [2.0 - 1e-9];
        let mut unsorted = SearchConfig::default();
        unsorted.sort_literals = false;
        unsorted.filter_overconstr = false;
        let mut sorted = unsorted.clone();
        sorted.sort_literals = true;
        let a = children_literals(&phi, &p, &unsorted);
        let b = children_literals(&phi, &p, &sorted);
        assert_eq!(a, vec![vec![0], vec![1]]);
        assert_eq!(b, vec![vec![1], vec![0]]);
    }

    #[test]
    fn forced_contradiction_empties_the_selector_sequence() {
        // x + y = 0 and 1/1000 ≤ x + y admit no common point, but halfway
        // between them both unit clauses look approximately satisfied. The
        // symbolic check on the forced literals sees the exact gap.
        let phi = parse(
            "(declare-fun x () Real)(declare-fun y () Real)\
             (assert (= (+ x y) 0))(assert (<= (- (/ 1 1000) (+ x y)) 0))",
        );
        let p = [0.0005, 0.0];
        let mut cfg = SearchConfig {
            eps_lit: 1e-2,
            ..SearchConfig::default()
        };
        cfg.check_forced_literals = true;
        assert!(children_literals(&phi, &p, &cfg).is_empty());
        cfg.check_forced_literals = false;
        assert_eq!(children_literals(&phi, &p, &cfg).len(), 1);
    }

    #[test]
    fn inflation_iteration_count_is_bounded() {
        // A rootless equation exhausts the inflation ladder: sides double
        // from 1e-20 until they pass 1, which is exactly 67 boxes.
        let phi = parse("(declare-fun x () Real)(assert (= (+ (* x x) 1) 0))");
        let (sys, _) = partition_selected(
            &phi,
            &[0],
            &BTreeMap::new(),
            &BigRational::zero(),
        )
        .unwrap();
        let cfg = quick(BoxStrategy::EpsInflation);
        let mut ctx = Ctx {
            cfg: &cfg,
            deadline: None,
            stats: SearchStats::default(),
        };
        assert!(box_search_eps_inflation(&sys, &[0.0], &mut ctx).is_none());
        assert_eq!(ctx.stats.boxes, 67);
    }

    #[test]
    fn fixed_seeds_reproduce_the_outcome() {
        let text = "(declare-fun x () Real)(declare-fun y () Real)\
                    (assert (or (= (- x 1) 0) (= (+ x 1) 0)))\
                    (assert (= (- y x) 0))(assert (<= x 0))";
        let phi = parse(text);
        let a = solve(&phi, &quick(BoxStrategy::EpsThenGridding));
        let b = solve(&phi, &quick(BoxStrategy::EpsThenGridding));
        assert_eq!(a.result, b.result);
        assert_eq!(a.stats, b.stats);
        let mut other = quick(BoxStrategy::EpsThenGridding);
        other.seed = 8;
        let c = solve(&phi, &other);
        // a different seed may walk differently but must agree on sat
        assert!(matches!(c.result, SolveResult::Sat(_)));
        assert!(matches!(a.result, SolveResult::Sat(_)));
    }

    #[test]
    fn presets_follow_the_ladder() {
        let base = SearchConfig::preset("1a").unwrap();
        assert!(!base.sort_literals && !base.filter_rank_deficient);
        assert_eq!(base.box_strategy, BoxStrategy::Gridding);
        assert!(SearchConfig::preset("2a").is_none());
        assert!(SearchConfig::preset("8b").is_none());
        assert!(SearchConfig::preset("3x").is_none());
        let mid = SearchConfig::preset("4b").unwrap();
        assert!(mid.sort_literals && mid.filter_overconstr && mid.check_forced_literals);
        assert!(!mid.kearfott_ordering);
        assert_eq!(mid.box_strategy, BoxStrategy::EpsInflation);
        let top = SearchConfig::preset("7c").unwrap();
        assert!(top.filter_rank_deficient && top.filter_overconstr_v);
        assert_eq!(top.box_strategy, BoxStrategy::EpsThenGridding);
    }

    #[test]
    fn timeout_reports_instead_of_hanging() {
        let phi = parse("(declare-fun x () Real)(assert (= (+ (* x x) 1) 0))");
        let mut cfg = quick(BoxStrategy::Gridding);
        cfg.timeout = Some(Duration::ZERO);
        let out = solve(&phi, &cfg);
        assert_eq!(out.result, SolveResult::Unknown);
        assert!(out.stats.timed_out);
    }

    #[test]
    fn disjunctive_clause_certifies_through_one_branch() {
        let phi = parse(
            "(declare-fun x () Real)\
             (assert (or (= (- (* x x) 9) 0) (= (- x 3) 0)))",
        );
        let out = solve(&phi, &quick(BoxStrategy::EpsThenGridding));
        assert!(matches!(out.result, SolveResult::Sat(_)));
        assert_eq!(out.stats.dnf_restarts, 0);
    }

    #[test]
    fn restart_walks_the_conjuncts_when_no_point_serves_every_clause() {
        // The four branch combinations pin x to two different values at
        // once, so no sampled point ever has every clause approximately
        // satisfied and the disjunctive expansion is tried — all four
        // conjuncts, each dying quickly at the selector level.
        let phi = parse(
            "(declare-fun x () Real)\
             (assert (or (= x 0) (= (- x 4) 0)))\
             (assert (or (= (- x 1) 0) (= (- x 5) 0)))",
        );
        let out = solve(&phi, &quick(BoxStrategy::EpsThenGridding));
        assert_eq!(out.result, SolveResult::Unknown);
        assert_eq!(out.stats.dnf_restarts, 4);
    }

    #[test]
    fn small_planted_systems_self_check_clean() {
        // A little fuzz: random dyadic roots for a 2-variable system; every
        // solve must either certify (validly, by construction of solve) or
        // admit unknown — and never report a checker rejection as sat.
        for case in 0u64..12 {
            let a = (case as f64) / 4.0 - 1.5;
            let b = 1.0 + (case as f64) / 8.0;
            let text = format!(
                "(declare-fun x () Real)(declare-fun y () Real)\
                 (assert (= (- x {a}) 0))(assert (= (- (+ x y) {b}) 0))",
                a = fmt_const(a),
                b = fmt_const(b),
            );
            let phi = parse(&text);
            let mut cfg = quick(BoxStrategy::EpsThenGridding);
            cfg.k = 4;
            cfg.seed = case;
            let out = solve(&phi, &cfg);
            assert!(
                matches!(out.result, SolveResult::Sat(_)),
                "case {case} unexpectedly unknown: {:?}",
                out.stats
            );
        }
    }

    fn fmt_const(v: f64) -> String {
        // SMT-LIB has no negative numerals, only unary minus.
        if v < 0.0 {
            format!("(- {})", -v)
        } else {
            format!("{v}")
        }
    }
}
