//! Boxes over named variables: interval assignments with a fixed, sorted
//! variable domain, their boundary faces, and an exact union-is-a-box test.

use ntacert_formula::VarId;
use thiserror::Error;

use crate::interval::Interval;

/// Budget for the recursive union coverage check, counted in visited grid
/// slabs. Generous for the aligned subdivisions produced by box search;
/// adversarial certificates that exceed it are reported as an error rather
/// than guessed at.
const UNION_CHECK_BUDGET: usize = 4_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoxesError {
    #[error("empty box set")]
    EmptySet,
    #[error("boxes have differing variable domains")]
    MixedDomains,
    #[error("union check exceeded its work budget")]
    UnionBudgetExceeded,
}

/// An axis-aligned box: one interval per variable, variables sorted.
///
/// The empty domain (dimension zero) is allowed and denotes the single empty
/// assignment, which every formula with all variables instantiated uses.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedBox {
    vars: Vec<VarId>,
    ivals: Vec<Interval>,
}

impl NamedBox {
    /// Builds a box from variable/interval pairs; sorts by variable and
    /// panics on duplicates (duplicates are a construction bug, not input).
    pub fn new(mut pairs: Vec<(VarId, Interval)>) -> NamedBox {
        pairs.sort_by_key(|(v, _)| *v);
        for w in pairs.windows(2) {
            assert!(w[0].0 != w[1].0, "duplicate variable in box: {:?}", w[0].0);
        }
        let (vars, ivals) = pairs.into_iter().unzip();
        NamedBox { vars, ivals }
    }

    /// The zero-dimensional box.
    pub fn empty_domain() -> NamedBox {
        NamedBox {
            vars: Vec::new(),
            ivals: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[VarId] {
        &self.vars
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.ivals
    }

    pub fn get(&self, v: VarId) -> Option<Interval> {
        self.vars
            .binary_search(&v)
            .ok()
            .map(|i| self.ivals[i])
    }

    pub fn interval_at(&self, axis: usize) -> Interval {
        self.ivals[axis]
    }

    /// Same variables in the same order.
    pub fn same_domain(&self, other: &NamedBox) -> bool {
        self.vars == other.vars
    }

    pub fn subset_of(&self, other: &NamedBox) -> bool {
        self.same_domain(other)
            && self
                .ivals
                .iter()
                .zip(&other.ivals)
                .all(|(a, b)| a.subset_of(b))
    }

    pub fn contains_point(&self, point: &[f64]) -> bool {
        point.len() == self.dim()
            && self
                .ivals
                .iter()
                .zip(point)
                .all(|(iv, &p)| iv.contains(p))
    }

    /// Replaces the interval on one axis.
    pub fn with_interval(&self, axis: usize, iv: Interval) -> NamedBox {
        let mut b = self.clone();
        b.ivals[axis] = iv;
        b
    }

    /// Axis of maximal width; ties resolved to the lowest index.
    pub fn longest_axis(&self) -> usize {
        let mut best = 0;
        let mut best_w = f64::NEG_INFINITY;
        for (i, iv) in self.ivals.iter().enumerate() {
            let w = iv.width();
            if w > best_w {
                best_w = w;
                best = i;
            }
        }
        best
    }

    /// Splits along `axis` at `at`, which must lie inside that interval.
    pub fn split_at(&self, axis: usize, at: f64) -> (NamedBox, NamedBox) {
        let iv = self.ivals[axis];
        assert!(iv.contains(at), "split point outside the axis interval");
        (
            self.with_interval(axis, Interval::new(iv.lo(), at)),
            self.with_interval(axis, Interval::new(at, iv.hi())),
        )
    }

    /// All 2n boundary faces in deterministic order: axes ascending, lower
    /// face before upper face. Requires dimension >= 1.
    pub fn boundary_faces(&self) -> Vec<Face> {
        assert!(self.dim() > 0, "zero-dimensional box has no boundary");
        let mut faces = Vec::with_capacity(2 * self.dim());
        for axis in 0..self.dim() {
            let iv = self.ivals[axis];
            for (upper, v) in [(false, iv.lo()), (true, iv.hi())] {
                faces.push(Face {
                    axis,
                    var: self.vars[axis],
                    upper,
                    collapsed: self.with_interval(axis, Interval::new(v, v)),
                });
            }
        }
        faces
    }
}

/// One face of a box: the box with `axis` collapsed to a single endpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    pub axis: usize,
    pub var: VarId,
    pub upper: bool,
    pub collapsed: NamedBox,
}

/// Tests whether the union of the boxes is exactly a box, and returns that
/// box (their hull) if so.
///
/// The test is exact: per axis the hull is cut at every box endpoint, and
/// each resulting slab must be covered, recursively over the axes, by the
/// boxes spanning it. Overlapping boxes are fine. All comparisons are plain
/// f64 comparisons on the given endpoints, with no rounding anywhere.
pub fn union_hull_if_box(boxes: &[NamedBox]) -> Result<Option<NamedBox>, BoxesError> {
    let first = boxes.first().ok_or(BoxesError::EmptySet)?;
    if boxes.iter().any(|b| !b.same_domain(first)) {
        return Err(BoxesError::MixedDomains);
    }
    let dim = first.dim();
    let mut hull = first.clone();
    for b in &boxes[1..] {
        for axis in 0..dim {
            hull.ivals[axis] = Interval::hull(hull.ivals[axis], b.ivals[axis]);
        }
    }
    let active: Vec<&NamedBox> = boxes.iter().collect();
    let mut budget = UNION_CHECK_BUDGET;
    if covers(&hull, &active, 0, &mut budget)? {
        Ok(Some(hull))
    } else {
        Ok(None)
    }
}

/// Does the union of `boxes` cover `hull` on axes `axis..`? Every box in
/// `boxes` already spans the hull slab selected on earlier axes.
fn covers(
    hull: &NamedBox,
    boxes: &[&NamedBox],
    axis: usize,
    budget: &mut usize,
) -> Result<bool, BoxesError> {
    if axis == hull.dim() {
        return Ok(!boxes.is_empty());
    }
    let target = hull.ivals[axis];
    // Cut points: the hull endpoints plus every box endpoint inside.
    let mut cuts: Vec<f64> = vec![target.lo(), target.hi()];
    for b in boxes {
        for v in [b.ivals[axis].lo(), b.ivals[axis].hi()] {
            if target.contains(v) {
                cuts.push(v);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    if cuts.len() == 1 {
        // Degenerate axis: every box pins it to the same point.
        return covers(hull, boxes, axis + 1, budget);
    }
    for w in 0..cuts.len() - 1 {
        let (a, b) = (cuts[w], cuts[w + 1]);
        if *budget == 0 {
            return Err(BoxesError::UnionBudgetExceeded);
        }
        *budget -= 1;
        let spanning: Vec<&NamedBox> = boxes
            .iter()
            .copied()
            .filter(|bx| bx.ivals[axis].lo() <= a && b <= bx.ivals[axis].hi())
            .collect();
        if spanning.is_empty() || !covers(hull, &spanning, axis + 1, budget)? {
            return Ok(false);
        }
    }
    Ok(true)
}
