//! Oriented cubical chains over named boxes.
//!
//! A cell is a sub-box of the query domain in which some axes are pinned to
//! points while the `free` axes still carry width; the integer coefficient is
//! the cell's multiplicity in the chain. Two operations live here: the
//! boundary operator, which pins one more axis per sub-face with the usual
//! alternating signs, and chain cancellation, which cuts all cells lying on a
//! common flat into grid atoms and sums coefficients so that faces shared by
//! adjacent cells cancel exactly. All geometry is bitwise float comparison —
//! pinned values propagate unchanged from the original box corners and
//! bisection midpoints, so equal coordinates really are equal and no rounding
//! can leak a face past its neighbor.

use std::collections::BTreeMap;

use ntacert_interval::{Interval, NamedBox};

/// Why a degree computation gave up. `Budget` means the cell allowance ran
/// out; `Boundary` means some piece of the boundary could not be verified
/// nonzero even at full float resolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Fail {
    Budget,
    Boundary,
}

/// Remaining cell allowance for one query. Every cell the algorithm
/// materializes — initial faces, bisection halves, boundary atoms — draws
/// from the same pool.
pub(crate) struct Budget(pub usize);

impl Budget {
    pub fn take(&mut self, n: usize) -> Result<(), Fail> {
        if self.0 >= n {
            self.0 -= n;
            Ok(())
        } else {
            Err(Fail::Budget)
        }
    }
}

/// One oriented cell of a chain. The box always has the full dimension of
/// the query domain; axes not listed in `free` are point intervals.
#[derive(Clone, Debug)]
pub(crate) struct Cell {
    pub coeff: i64,
    pub boxx: NamedBox,
    /// Ascending axis indices that still carry width.
    pub free: Vec<usize>,
}

impl Cell {
    pub fn dim(&self) -> usize {
        self.free.len()
    }
}

/// Collapses -0.0 to +0.0 so that bitwise grouping of pinned coordinates
/// cannot tell the two zeros apart.
fn pin(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// The 2·dim sub-faces of a cell with induced orientation: pinning the p-th
/// free axis contributes (−1)^p, the upper side +1 and the lower side −1, all
/// times the cell's own coefficient.
pub(crate) fn boundary(cell: &Cell) -> Vec<Cell> {
    let mut out = Vec::with_capacity(2 * cell.free.len());
    for (pos, &axis) in cell.free.iter().enumerate() {
        let iv = cell.boxx.interval_at(axis);
        let parity: i64 = if pos % 2 == 0 { 1 } else { -1 };
        for (endpoint, side) in [(iv.lo(), -1), (iv.hi(), 1)] {
            let v = pin(endpoint);
            out.push(Cell {
                coeff: cell.coeff * parity * side,
                boxx: cell.boxx.with_interval(axis, Interval::point(v)),
                free: cell.free.iter().copied().filter(|&a| a != axis).collect(),
            });
        }
    }
    out
}

/// Canonical form of a chain: cells are grouped by the flat they lie on (the
/// bitwise values of their pinned axes), each flat's cells are cut along the
/// grid generated by every endpoint appearing in the group, and coefficients
/// are summed per grid atom. Atoms that sum to zero disappear — this is how
/// the interior faces of a subcomplex cancel, leaving only its rim.
pub(crate) fn cancel_chain(cells: Vec<Cell>, budget: &mut Budget) -> Result<Vec<Cell>, Fail> {
    // Group by flat. The key lists every pinned axis with the bits of its
    // pinned value; cells with equal keys have equal free sets (the
    // complement), which makes the per-group grid well defined.
    let mut flats: BTreeMap<Vec<(usize, u64)>, Vec<Cell>> = BTreeMap::new();
    for c in cells {
        if c.coeff == 0 {
            continue;
        }
        let dim = c.boxx.dim();
        let mut key = Vec::with_capacity(dim - c.free.len());
        for axis in 0..dim {
            if !c.free.contains(&axis) {
                key.push((axis, pin(c.boxx.interval_at(axis).lo()).to_bits()));
            }
        }
        flats.entry(key).or_default().push(c);
    }

    let mut out = Vec::new();
    for group in flats.into_values() {
        let free = group[0].free.clone();

        // All cut coordinates per free axis, sorted and deduplicated. Sorting
        // by total order is safe: the values are finite and -0.0 has been
        // normalized away.
        let mut cuts: Vec<Vec<f64>> = vec![Vec::new(); free.len()];
        for c in &group {
            for (k, &axis) in free.iter().enumerate() {
                let iv = c.boxx.interval_at(axis);
                cuts[k].push(pin(iv.lo()));
                cuts[k].push(pin(iv.hi()));
            }
        }
        for cs in &mut cuts {
            cs.sort_by(f64::total_cmp);
            cs.dedup();
        }

        // Decompose every cell into the atoms it spans and sum coefficients.
        let mut atoms: BTreeMap<Vec<(u64, u64)>, (i64, NamedBox)> = BTreeMap::new();
        for c in &group {
            // Per-axis runs of consecutive cuts covered by this cell.
            let mut runs: Vec<(usize, usize)> = Vec::with_capacity(free.len());
            for (k, &axis) in free.iter().enumerate() {
                let iv = c.boxx.interval_at(axis);
                let lo = cuts[k]
                    .binary_search_by(|v| v.total_cmp(&pin(iv.lo())))
                    .expect("cell endpoint missing from its own cut set");
                let hi = cuts[k]
                    .binary_search_by(|v| v.total_cmp(&pin(iv.hi())))
                    .expect("cell endpoint missing from its own cut set");
                runs.push((lo, hi));
            }
            // Walk the cartesian product of runs with an odometer.
            let mut idx: Vec<usize> = runs.iter().map(|&(lo, _)| lo).collect();
            'product: loop {
                budget.take(1)?;
                let mut key = Vec::with_capacity(free.len());
                let mut boxx = c.boxx.clone();
                for (k, &axis) in free.iter().enumerate() {
                    let (a, b) = (cuts[k][idx[k]], cuts[k][idx[k] + 1]);
                    key.push((a.to_bits(), b.to_bits()));
                    boxx = boxx.with_interval(axis, Interval::new(a, b));
                }
                atoms
                    .entry(key)
                    .and_modify(|e| e.0 += c.coeff)
                    .or_insert((c.coeff, boxx));
                // Advance the odometer; digit k counts idx[k] in lo..hi.
                for k in 0..free.len() {
                    idx[k] += 1;
                    if idx[k] < runs[k].1 {
                        continue 'product;
                    }
                    idx[k] = runs[k].0;
                }
                break;
            }
        }

        for (coeff, boxx) in atoms.into_values() {
            if coeff != 0 {
                out.push(Cell {
                    coeff,
                    boxx,
                    free: free.clone(),
                });
            }
        }
    }
    Ok(out)
}
