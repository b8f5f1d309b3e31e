//! Topological degree by recursive boundary reduction.
//!
//! The degree of a map F: B ⊆ ℝⁿ → ℝⁿ at 0 is computed from a sign covering
//! of ∂B: the boundary faces are bisected until interval evaluation certifies
//! on every closed sub-face that some component of F keeps one sign. Cells
//! whose certified component is the distinguished one — chosen as the
//! component with the largest accumulated margin from zero — and whose sign
//! is positive form a subcomplex A; the degree of F equals, up to the parity
//! of the distinguished index, the degree of F with that component dropped on
//! the cancelled chain ∂A, one dimension down. At dimension zero the cells
//! are oriented points and the degree is the coefficient sum over the points
//! where the one remaining component is positive. Every interval evaluation
//! runs on a closed cell, so a returned degree comes with an interval proof
//! that 0 ∉ F(∂B).

use std::collections::BTreeSet;

use ntacert_formula::{Term, VarId};
use ntacert_interval::{eval_term, Interval, NamedBox};

use crate::chain::{boundary, cancel_chain, Budget, Cell, Fail};

/// Default cell allowance per degree query.
pub const DEFAULT_FACE_BUDGET: usize = 100_000;

/// Outcome of a degree query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeResult {
    /// The Brouwer degree deg(F, B, 0); interval arithmetic verified
    /// 0 ∉ F(∂B) along the way.
    Degree(i64),
    /// Some part of the boundary could not be verified nonzero even at full
    /// float resolution — F may vanish on ∂B, or come too close to tell.
    BoundaryZeroUnverified,
    /// The cell allowance ran out before the covering was complete.
    BudgetExceeded,
}

/// A cell together with the component and sign that interval evaluation
/// certified on it, and the margin by which zero was excluded.
struct Labeled {
    cell: Cell,
    comp: usize,
    positive: bool,
    margin: f64,
}

fn eval_on(comps: &[Term], cell: &NamedBox, i: usize) -> Interval {
    eval_term(&comps[i], cell).expect("degree query referenced a variable outside the box")
}

/// Extends every cell of the worklist, bisecting along the widest free axis,
/// until each carries a certified sign label for some component.
fn build_covering(comps: &[Term], cells: Vec<Cell>, budget: &mut Budget) -> Result<Vec<Labeled>, Fail> {
    let mut work: Vec<Cell> = cells;
    let mut out = Vec::new();
    while let Some(cell) = work.pop() {
        // Best certified component on this closed cell, by margin; ties to
        // the lowest index for determinism.
        let mut best: Option<(usize, bool, f64)> = None;
        for i in 0..comps.len() {
            let iv = eval_on(comps, &cell.boxx, i);
            let cand = if iv.lo() > 0.0 {
                Some((i, true, iv.lo()))
            } else if iv.hi() < 0.0 {
                Some((i, false, -iv.hi()))
            } else {
                None
            };
            if let Some(c) = cand {
                if best.map_or(true, |b| c.2 > b.2) {
                    best = Some(c);
                }
            }
        }
        if let Some((comp, positive, margin)) = best {
            out.push(Labeled {
                cell,
                comp,
                positive,
                margin,
            });
            continue;
        }
        // No component certifies: bisect the widest splittable free axis.
        let mut split: Option<(usize, f64, f64)> = None;
        for &axis in &cell.free {
            let iv = cell.boxx.interval_at(axis);
            let m = iv.midpoint();
            if m > iv.lo() && m < iv.hi() && split.map_or(true, |s| iv.width() > s.2) {
                split = Some((axis, m, iv.width()));
            }
        }
        let Some((axis, mid, _)) = split else {
            // Point cell, or an interval too thin to bisect: the boundary
            // cannot be certified nonzero here.
            return Err(Fail::Boundary);
        };
        budget.take(2)?;
        let (lo_half, hi_half) = cell.boxx.split_at(axis, mid);
        for half in [lo_half, hi_half] {
            work.push(Cell {
                coeff: cell.coeff,
                boxx: half,
                free: cell.free.clone(),
            });
        }
    }
    Ok(out)
}

/// Degree of `comps` (k components) on a (k−1)-dimensional oriented cycle.
fn deg_cycle(comps: &[Term], cells: Vec<Cell>, budget: &mut Budget) -> Result<i64, Fail> {
    debug_assert!(cells.iter().all(|c| c.dim() + 1 == comps.len()));
    let covering = build_covering(comps, cells, budget)?;
    if comps.len() == 1 {
        return Ok(covering
            .iter()
            .filter(|l| l.positive)
            .map(|l| l.cell.coeff)
            .sum());
    }
    // Distinguished component: the largest accumulated certification margin.
    let mut acc = vec![0.0f64; comps.len()];
    for l in &covering {
        acc[l.comp] += l.margin;
    }
    let dstar = acc
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap();

    let mut rim = Vec::new();
    for l in covering {
        if l.comp == dstar && l.positive {
            rim.extend(boundary(&l.cell));
        }
    }
    let cycle = cancel_chain(rim, budget)?;

    let reduced: Vec<Term> = comps
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != dstar)
        .map(|(_, t)| t.clone())
        .collect();
    let sign: i64 = if dstar % 2 == 0 { 1 } else { -1 };
    Ok(sign * deg_cycle(&reduced, cycle, budget)?)
}

fn check_query(f: &[Term], b: &NamedBox) {
    assert!(b.dim() >= 1, "degree query needs at least one dimension");
    assert_eq!(f.len(), b.dim(), "degree query must be square");
    let domain: BTreeSet<VarId> = b.vars().iter().copied().collect();
    for t in f {
        assert!(
            t.vars().is_subset(&domain),
            "degree query referenced a variable outside the box"
        );
    }
}

fn is_unbounded(b: &NamedBox) -> bool {
    b.intervals()
        .iter()
        .any(|iv| !iv.lo().is_finite() || !iv.hi().is_finite())
}

fn full_cell(b: &NamedBox) -> Cell {
    Cell {
        coeff: 1,
        boxx: b.clone(),
        free: (0..b.dim()).collect(),
    }
}

/// The 2n boundary faces of `b` as an oriented cycle: pinning axis k on the
/// upper side carries (−1)^k, the lower side the negative.
fn initial_cycle(b: &NamedBox, budget: &mut Budget) -> Result<Vec<Cell>, Fail> {
    let n = b.dim();
    budget.take(2 * n)?;
    let mut cells = Vec::with_capacity(2 * n);
    for face in b.boundary_faces() {
        let parity: i64 = if face.axis % 2 == 0 { 1 } else { -1 };
        cells.push(Cell {
            coeff: if face.upper { parity } else { -parity },
            boxx: face.collapsed,
            free: (0..n).filter(|&a| a != face.axis).collect(),
        });
    }
    Ok(cells)
}

/// Computes the Brouwer degree deg(F, B, 0).
///
/// Requires a square query: `f.len() == b.dim() >= 1`, with every variable of
/// `f` bound by `b` (violations panic — they are caller bugs, not properties
/// of the input system). Unbounded boxes are rejected as
/// `BoundaryZeroUnverified`: a boundary through infinity cannot be certified.
/// Boxes with a point axis have topological boundary equal to the box itself,
/// so the degree is 0 whenever F can be verified nonzero on all of B, and
/// unverifiable otherwise.
pub fn degree(f: &[Term], b: &NamedBox, budget: usize) -> DegreeResult {
    check_query(f, b);
    if is_unbounded(b) {
        return DegreeResult::BoundaryZeroUnverified;
    }
    let mut budget = Budget(budget);
    if b.intervals().iter().any(|iv| iv.is_point()) {
        return match budget
            .take(1)
            .and_then(|()| build_covering(f, vec![full_cell(b)], &mut budget))
        {
            Ok(_) => DegreeResult::Degree(0),
            Err(Fail::Budget) => DegreeResult::BudgetExceeded,
            Err(Fail::Boundary) => DegreeResult::BoundaryZeroUnverified,
        };
    }
    let run = initial_cycle(b, &mut budget).and_then(|cells| deg_cycle(f, cells, &mut budget));
    match run {
        Ok(d) => DegreeResult::Degree(d),
        Err(Fail::Budget) => DegreeResult::BudgetExceeded,
        Err(Fail::Boundary) => DegreeResult::BoundaryZeroUnverified,
    }
}

/// Certifies 0 ∉ F(∂B) by building a sign covering of the boundary, without
/// computing the degree. `false` means the covering could not be completed
/// within the budget — an undetermined answer is treated as failure.
pub fn verify_boundary_nonzero(f: &[Term], b: &NamedBox, budget: usize) -> bool {
    check_query(f, b);
    if is_unbounded(b) {
        return false;
    }
    let mut budget = Budget(budget);
    let run = if b.intervals().iter().any(|iv| iv.is_point()) {
        budget
            .take(1)
            .and_then(|()| build_covering(f, vec![full_cell(b)], &mut budget))
    } else {
        initial_cycle(b, &mut budget).and_then(|cells| build_covering(f, cells, &mut budget))
    };
    run.is_ok()
}
