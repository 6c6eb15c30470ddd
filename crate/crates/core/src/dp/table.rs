//! Level tables of the dynamic program and witness reconstruction.
//!
//! Level `i` holds states of the window with index `j = rho - i`. Level 0
//! stores the zero vector and the columns of `A`; level `i` stores every sum
//! of two level `i - 1` states that falls into its window. In optimization
//! mode each state keeps the best objective value and one split realizing
//! it; in feasibility mode only the support is kept and splits are searched
//! when a witness is requested.
//!
//! A level whose window equals the previous one and whose input table did
//! not change reproduces that table exactly, so such levels share one table.

use std::collections::HashMap;

use rustc_hash::FxHashMap;

use super::window::{WindowBounds, WindowGeometry};
use super::Mode;
use crate::conv::{convolve_encoded, SparseBoolFn};
use crate::problem::IlpInstance;
use crate::{Error, Result};

const NONE: u32 = u32::MAX;
/// Largest dense accumulator used by the pair scan.
const DENSE_LIMIT: u128 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Entry {
    key: u64,
    value: i64,
    /// Level 0: column index or `NONE` for the zero vector. Above: index of
    /// the first part in the parent table, `NONE` if not yet known.
    left: u32,
    /// Index of the second part in the parent table.
    right: u32,
}

#[derive(Clone, Debug)]
pub struct Table {
    entries: Vec<Entry>,
    /// `N x` for every entry, `k` values each.
    images: Vec<i64>,
    parent: Option<usize>,
}

impl Table {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    fn find(&self, key: u64) -> Option<usize> {
        self.entries.binary_search_by_key(&key, |e| e.key).ok()
    }

    fn same_content(&self, other: &Table) -> bool {
        self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.key == b.key && a.value == b.value)
    }
}

/// All tables of one run plus the level-to-table map.
#[derive(Clone, Debug)]
pub struct DpRun {
    pub(crate) geom: WindowGeometry,
    pub(crate) mode: Mode,
    pub(crate) rho: u32,
    tables: Vec<Table>,
    level_table: Vec<usize>,
    columns: Vec<Vec<i64>>,
    costs: Vec<i64>,
}

/// Outcome of a full-table witness audit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub states: usize,
    pub failures: Vec<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl DpRun {
    /// Runs all levels. `b` is the right-hand side of `inst`, which is the
    /// (possibly shifted) instance the windows are centered on.
    pub(crate) fn execute(
        inst: &IlpInstance,
        geom: WindowGeometry,
        rho: u32,
        mode: Mode,
        max_states: usize,
    ) -> Result<DpRun> {
        let n = inst.n();
        let columns: Vec<Vec<i64>> = (0..n).map(|j| inst.column(j)).collect();
        let costs = match mode {
            Mode::Optimize => inst.c().to_vec(),
            Mode::Feasibility => vec![0; n],
        };
        let mut run = DpRun {
            geom,
            mode,
            rho,
            tables: Vec::new(),
            level_table: Vec::new(),
            columns,
            costs,
        };

        let mut bounds = run.geom.bounds(rho);
        let first = run.initial_table(&bounds);
        run.tables.push(first);
        run.level_table.push(0);
        // Whether the table of the previous level differs from the one below.
        let mut changed = true;
        for i in 1..=rho {
            let next_bounds = run.geom.bounds(rho - i);
            let prev = *run.level_table.last().expect("level 0 exists");
            if next_bounds == bounds && !changed {
                run.level_table.push(prev);
                continue;
            }
            let table = match mode {
                Mode::Optimize => run.opt_step(prev, rho - i, max_states)?,
                Mode::Feasibility => run.feas_step(prev, &next_bounds, max_states)?,
            };
            bounds = next_bounds;
            if table.same_content(&run.tables[prev]) {
                changed = false;
                run.level_table.push(prev);
            } else {
                changed = true;
                run.tables.push(table);
                run.level_table.push(run.tables.len() - 1);
            }
        }
        Ok(run)
    }

    fn initial_table(&self, bounds: &WindowBounds) -> Table {
        let k = self.geom.k();
        let mut best: FxHashMap<u64, (i64, u32)> = FxHashMap::default();
        let zero = vec![0i64; k];
        if self.geom.in_box(&zero) && bounds.contains_image(&self.geom.image(&zero)) {
            best.insert(self.geom.zero_key(), (0, NONE));
        }
        for (j, col) in self.columns.iter().enumerate() {
            if !self.geom.in_box(col) || !bounds.contains_image(&self.geom.image(col)) {
                continue;
            }
            let key = self.geom.encode(col);
            let cost = self.costs[j];
            match best.get(&key) {
                Some(&(v, _)) if v >= cost => {}
                _ => {
                    best.insert(key, (cost, j as u32));
                }
            }
        }
        let mut entries: Vec<Entry> = best
            .into_iter()
            .map(|(key, (value, left))| Entry {
                key,
                value,
                left,
                right: NONE,
            })
            .collect();
        entries.sort_unstable_by_key(|e| e.key);
        self.finish(entries, None)
    }

    fn finish(&self, entries: Vec<Entry>, parent: Option<usize>) -> Table {
        let images = entries
            .iter()
            .flat_map(|e| self.geom.image(&self.geom.decode(e.key)))
            .collect();
        Table {
            entries,
            images,
            parent,
        }
    }

    /// Scan over unordered pairs of parent states whose sum lies in the
    /// window. The window is a box in image space, so states are bucketed
    /// into an image-space grid and pairs of cells are classified by the
    /// box of their sums: pairs of cells entirely outside are skipped and
    /// entirely inside need no per-pair test. Sums are accumulated in a
    /// dense array over their bounding box when that box is small enough.
    fn opt_step(&self, prev: usize, j: u32, max_states: usize) -> Result<Table> {
        let k = self.geom.k();
        let bounds = self.geom.bounds(j);
        let p = &self.tables[prev];
        let m = p.len();
        if m == 0 {
            return Ok(self.finish(Vec::new(), Some(prev)));
        }
        let grid = Grid::new(&p.images, k, m);
        let order = &grid.order;
        let imgs: Vec<i64> = order
            .iter()
            .flat_map(|&i| p.images[i as usize * k..(i as usize + 1) * k].to_vec())
            .collect();
        let vals: Vec<i64> = order.iter().map(|&i| p.entries[i as usize].value).collect();
        let pts: Vec<Vec<i64>> = order
            .iter()
            .map(|&i| self.geom.decode(p.entries[i as usize].key))
            .collect();

        // Bounding box of all pairwise sums, cut to the window's box.
        let (mut lo, mut hi) = self.geom.coordinate_box(j);
        for t in 0..k {
            let (pl, ph) = pts
                .iter()
                .fold((i64::MAX, i64::MIN), |(l, h), x| (l.min(x[t]), h.max(x[t])));
            lo[t] = lo[t].max(2 * pl);
            hi[t] = hi[t].min(2 * ph);
        }
        let mut strides = vec![0i64; k];
        let mut vol: u128 = 1;
        for t in 0..k {
            strides[t] = vol as i64;
            vol = vol.saturating_mul((hi[t] - lo[t] + 1).max(1) as u128);
        }
        let dense = vol <= DENSE_LIMIT.max(64 * m as u128);
        // idx(a + b) = pos[a] + pos[b] - base
        let base: i64 = (0..k).map(|t| lo[t] * strides[t]).sum();
        let pos: Vec<i64> = pts
            .iter()
            .map(|x| x.iter().zip(&strides).map(|(v, s)| v * s).sum::<i64>())
            .collect();

        let mut acc = Accumulator::new(dense, vol as usize);
        let (blo, bhi) = (&bounds.lo[..], &bounds.hi[..]);
        let tight = grid.tight_bounds(&imgs);
        // Pairs are visited grouped by the sum of their cell coordinates, so
        // consecutive writes stay within a small region of the accumulator.
        let mut slo = vec![0usize; k];
        let mut shi = vec![0usize; k];
        for t in 0..k {
            let (w, base2) = (grid.width[t], 2 * grid.min[t]);
            let top = 2 * grid.cells[t] as i64 - 2;
            let l = (blo[t] - base2 - 2 * w + 2).div_euclid(w) + 1;
            let h = (bhi[t] - base2).div_euclid(w);
            if l.max(0) > h.min(top) {
                return Ok(self.finish(Vec::new(), Some(prev)));
            }
            slo[t] = l.max(0) as usize;
            shi[t] = h.min(top) as usize;
        }
        let mut sigma = slo.clone();
        let mut alo = vec![0usize; k];
        let mut ahi = vec![0usize; k];
        let mut ca = vec![0usize; k];
        let mut cb = vec![0usize; k];
        loop {
            for t in 0..k {
                alo[t] = sigma[t].saturating_sub(grid.cells[t] - 1);
                ahi[t] = sigma[t].min(grid.cells[t] - 1);
            }
            ca.copy_from_slice(&alo);
            loop {
                for t in 0..k {
                    cb[t] = sigma[t] - ca[t];
                }
                let (ia, ib) = (grid.cell_id(&ca), grid.cell_id(&cb));
                let (a0, a1) = (grid.start[ia], grid.start[ia + 1]);
                let (b0, b1) = (grid.start[ib], grid.start[ib + 1]);
                if ia <= ib && a0 < a1 && b0 < b1 {
                    let ((la, ha), (lb, hb)) = (&tight[ia], &tight[ib]);
                    let mut inside = true;
                    let mut outside = false;
                    for t in 0..k {
                        let (sl, sh) = (la[t] + lb[t], ha[t] + hb[t]);
                        inside &= blo[t] <= sl && sh <= bhi[t];
                        outside |= sh < blo[t] || sl > bhi[t];
                    }
                    if !outside {
                        for ai in a0..a1 {
                            let (pa, va) = (pos[ai] - base, vals[ai]);
                            let from = if ia == ib { ai } else { b0 };
                            if inside {
                                for bi in from..b1 {
                                    acc.offer(pa + pos[bi], va + vals[bi], ai as u32, bi as u32);
                                }
                            } else {
                                let wa = &imgs[ai * k..(ai + 1) * k];
                                for bi in from..b1 {
                                    let wb = &imgs[bi * k..(bi + 1) * k];
                                    let mut ok = true;
                                    for t in 0..k {
                                        let s = wa[t] + wb[t];
                                        ok &= blo[t] <= s && s <= bhi[t];
                                    }
                                    if ok {
                                        acc.offer(
                                            pa + pos[bi],
                                            va + vals[bi],
                                            ai as u32,
                                            bi as u32,
                                        );
                                    }
                                }
                            }
                        }
                    }
                }
                if !step(&mut ca, &alo, &ahi) {
                    break;
                }
            }
            if acc.count > max_states {
                return Err(Error::BudgetExceeded(format!(
                    "more than {max_states} states in one level"
                )));
            }
            if !step(&mut sigma, &slo, &shi) {
                break;
            }
        }
        let zero_key = self.geom.zero_key();
        let mut entries: Vec<Entry> = acc
            .drain()
            .map(|(value, a, b)| {
                let (oa, ob) = (order[a as usize], order[b as usize]);
                Entry {
                    key: p.entries[oa as usize].key + p.entries[ob as usize].key - zero_key,
                    value,
                    left: oa,
                    right: ob,
                }
            })
            .collect();
        entries.sort_unstable_by_key(|e| e.key);
        Ok(self.finish(entries, Some(prev)))
    }

    /// Support of the sumset of the parent support with itself, via the
    /// base-q Boolean convolution, filtered to the window.
    fn feas_step(&self, prev: usize, bounds: &WindowBounds, max_states: usize) -> Result<Table> {
        let k = self.geom.k();
        let p = &self.tables[prev];
        let pts: Vec<Vec<i64>> = p.entries.iter().map(|e| self.geom.decode(e.key)).collect();
        // Center the support to keep the encoding base small.
        let mut shift = vec![0i64; k];
        for (t, s) in shift.iter_mut().enumerate() {
            let lo = pts.iter().map(|x| x[t]).min().unwrap_or(0);
            let hi = pts.iter().map(|x| x[t]).max().unwrap_or(0);
            *s = lo + (hi - lo) / 2;
        }
        let centered: Vec<Vec<i64>> = pts
            .iter()
            .map(|x| x.iter().zip(&shift).map(|(v, s)| v - s).collect())
            .collect();
        let f = SparseBoolFn::new(k, centered)?;
        let sum = convolve_encoded(&f, &f)?;
        let mut entries = Vec::new();
        for y in sum.support() {
            let x: Vec<i64> = y.iter().zip(&shift).map(|(v, s)| v + 2 * s).collect();
            if self.geom.in_box(&x) && bounds.contains_image(&self.geom.image(&x)) {
                entries.push(Entry {
                    key: self.geom.encode(&x),
                    value: 0,
                    left: NONE,
                    right: NONE,
                });
                if entries.len() > max_states {
                    return Err(Error::BudgetExceeded(format!(
                        "more than {max_states} states in one level"
                    )));
                }
            }
        }
        entries.sort_unstable_by_key(|e| e.key);
        Ok(self.finish(entries, Some(prev)))
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.level_table
            .iter()
            .map(|&t| self.tables[t].len())
            .collect()
    }

    pub fn computed_tables(&self) -> usize {
        self.tables.len()
    }

    /// Value and witness of state `u` at the root level.
    pub fn root(&mut self, u: &[i64]) -> Option<(i64, Vec<i64>)> {
        if !self.geom.in_box(u) {
            return None;
        }
        let t = *self.level_table.last()?;
        let idx = self.tables[t].find(self.geom.encode(u))?;
        let value = self.tables[t].entries[idx].value;
        let mut memo = HashMap::new();
        let x = self.witness(t, idx, &mut memo);
        Some((value, x))
    }

    /// Decomposes state `idx` of table `t` into level-0 parts, returning the
    /// count of each column. Shared sub-states are expanded once.
    fn witness(
        &mut self,
        t: usize,
        idx: usize,
        memo: &mut HashMap<(usize, usize), Vec<i64>>,
    ) -> Vec<i64> {
        if let Some(x) = memo.get(&(t, idx)) {
            return x.clone();
        }
        let n = self.columns.len();
        let x = match self.tables[t].parent {
            None => {
                let mut x = vec![0i64; n];
                let e = self.tables[t].entries[idx];
                if e.left != NONE {
                    x[e.left as usize] = 1;
                }
                x
            }
            Some(p) => {
                if self.tables[t].entries[idx].left == NONE {
                    let (l, r) = self
                        .find_split(t, idx)
                        .expect("every stored state has a split");
                    let e = &mut self.tables[t].entries[idx];
                    e.left = l;
                    e.right = r;
                }
                let e = self.tables[t].entries[idx];
                let xl = self.witness(p, e.left as usize, memo);
                let xr = self.witness(p, e.right as usize, memo);
                xl.iter().zip(&xr).map(|(a, b)| a + b).collect()
            }
        };
        memo.insert((t, idx), x.clone());
        x
    }

    /// First parent state (in key order) whose complement is also a parent
    /// state.
    fn find_split(&self, t: usize, idx: usize) -> Option<(u32, u32)> {
        let p = &self.tables[self.tables[t].parent?];
        let u = self.geom.decode(self.tables[t].entries[idx].key);
        for (i, e) in p.entries.iter().enumerate() {
            let v = self.geom.decode(e.key);
            let rest: Vec<i64> = u.iter().zip(&v).map(|(a, b)| a - b).collect();
            if !self.geom.in_box(&rest) {
                continue;
            }
            if let Some(r) = p.find(self.geom.encode(&rest)) {
                return Some((i as u32, r as u32));
            }
        }
        None
    }

    /// Backtracks every stored state of every level and checks that the
    /// witness is nonnegative, sums to the state, and (when optimizing)
    /// attains the stored value. Also checks window membership per level.
    pub fn audit(&mut self) -> AuditReport {
        let mut report = AuditReport::default();
        let mut memo = HashMap::new();
        for t in 0..self.tables.len() {
            for idx in 0..self.tables[t].len() {
                let e = self.tables[t].entries[idx];
                let u = self.geom.decode(e.key);
                let x = self.witness(t, idx, &mut memo);
                report.states += 1;
                let sum: Vec<i64> = (0..u.len())
                    .map(|r| self.columns.iter().zip(&x).map(|(c, v)| c[r] * v).sum())
                    .collect();
                let value: i64 = self.costs.iter().zip(&x).map(|(c, v)| c * v).sum();
                if x.iter().any(|&v| v < 0) || sum != u {
                    report
                        .failures
                        .push(format!("table {t}: witness of {u:?} sums to {sum:?}"));
                } else if self.mode == Mode::Optimize && value != e.value {
                    report.failures.push(format!(
                        "table {t}: state {u:?} stores {} but witness gives {value}",
                        e.value
                    ));
                }
            }
        }
        for (i, &t) in self.level_table.iter().enumerate() {
            let bounds = self.geom.bounds(self.rho - i as u32);
            for e in &self.tables[t].entries {
                let u = self.geom.decode(e.key);
                if !bounds.contains_image(&self.geom.image(&u)) {
                    report
                        .failures
                        .push(format!("level {i}: state {u:?} outside its window"));
                }
            }
        }
        report
    }
}

/// Best value and split per sum, dense or hashed.
struct Accumulator {
    dense: bool,
    slots: Vec<(i64, u32, u32)>,
    map: FxHashMap<i64, (i64, u32, u32)>,
    count: usize,
}

impl Accumulator {
    fn new(dense: bool, vol: usize) -> Self {
        let slots = if dense {
            vec![(i64::MIN, NONE, NONE); vol]
        } else {
            Vec::new()
        };
        Accumulator {
            dense,
            slots,
            map: FxHashMap::default(),
            count: 0,
        }
    }

    /// Keeps the first split among those with the largest value.
    #[inline]
    fn offer(&mut self, idx: i64, value: i64, a: u32, b: u32) {
        if self.dense {
            // Branch-free: the comparison outcome is close to random.
            let slot = &mut self.slots[idx as usize];
            self.count += (slot.0 == i64::MIN) as usize;
            let better = value > slot.0;
            slot.0 = if better { value } else { slot.0 };
            slot.1 = if better { a } else { slot.1 };
            slot.2 = if better { b } else { slot.2 };
        } else {
            match self.map.get_mut(&idx) {
                Some(slot) => {
                    if value > slot.0 {
                        *slot = (value, a, b);
                    }
                }
                None => {
                    self.map.insert(idx, (value, a, b));
                    self.count += 1;
                }
            }
        }
    }

    fn drain(self) -> Box<dyn Iterator<Item = (i64, u32, u32)>> {
        if self.dense {
            Box::new(self.slots.into_iter().filter(|s| s.0 != i64::MIN))
        } else {
            Box::new(self.map.into_values())
        }
    }
}

/// Uniform grid over the images of a table, with states sorted by cell.
struct Grid {
    k: usize,
    min: Vec<i64>,
    width: Vec<i64>,
    cells: Vec<usize>,
    /// `order[s]` is the table index of the state at sorted position `s`.
    order: Vec<u32>,
    cell_of_pos: Vec<usize>,
    /// Sorted positions `start[c]..start[c + 1]` belong to cell `c`.
    start: Vec<usize>,
}

impl Grid {
    fn new(images: &[i64], k: usize, m: usize) -> Self {
        // About eight states per cell.
        let per_dim = ((m as f64 / 8.0).powf(1.0 / k as f64).floor() as usize).max(1);
        let mut min = vec![i64::MAX; k];
        let mut max = vec![i64::MIN; k];
        for i in 0..m {
            for t in 0..k {
                min[t] = min[t].min(images[i * k + t]);
                max[t] = max[t].max(images[i * k + t]);
            }
        }
        let mut width = vec![1i64; k];
        let mut cells = vec![1usize; k];
        for t in 0..k {
            let span = max[t] - min[t] + 1;
            width[t] = ((span + per_dim as i64 - 1) / per_dim as i64).max(1);
            cells[t] = ((span + width[t] - 1) / width[t]) as usize;
        }
        let mut grid = Grid {
            k,
            min,
            width,
            cells,
            order: Vec::new(),
            cell_of_pos: Vec::new(),
            start: Vec::new(),
        };
        let cell_of: Vec<usize> = (0..m)
            .map(|i| {
                let c: Vec<usize> = (0..k)
                    .map(|t| ((images[i * k + t] - grid.min[t]) / grid.width[t]) as usize)
                    .collect();
                grid.cell_id(&c)
            })
            .collect();
        let total: usize = grid.cells.iter().product();
        let mut order: Vec<u32> = (0..m as u32).collect();
        order.sort_by_key(|&i| (cell_of[i as usize], i));
        let mut start = vec![0usize; total + 1];
        for &c in &cell_of {
            start[c + 1] += 1;
        }
        for c in 0..total {
            start[c + 1] += start[c];
        }
        grid.cell_of_pos = order.iter().map(|&i| cell_of[i as usize]).collect();
        grid.order = order;
        grid.start = start;
        grid
    }

    /// Per cell, the componentwise min and max image of its states.
    fn tight_bounds(&self, sorted_images: &[i64]) -> Vec<(Vec<i64>, Vec<i64>)> {
        let k = self.k;
        (0..self.start.len() - 1)
            .map(|c| {
                let mut lo = vec![i64::MAX; k];
                let mut hi = vec![i64::MIN; k];
                for s in self.start[c]..self.start[c + 1] {
                    for t in 0..k {
                        lo[t] = lo[t].min(sorted_images[s * k + t]);
                        hi[t] = hi[t].max(sorted_images[s * k + t]);
                    }
                }
                (lo, hi)
            })
            .collect()
    }

    fn cell_id(&self, c: &[usize]) -> usize {
        let mut id = 0;
        for t in (0..self.k).rev() {
            id = id * self.cells[t] + c[t];
        }
        id
    }
}

/// Advances `cur` through the box `[lo, hi]`, first coordinate fastest.
fn step(cur: &mut [usize], lo: &[usize], hi: &[usize]) -> bool {
    for t in 0..cur.len() {
        if cur[t] < hi[t] {
            cur[t] += 1;
            return true;
        }
        cur[t] = lo[t];
    }
    false
}
