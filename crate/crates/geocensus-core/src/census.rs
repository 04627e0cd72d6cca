//! Enumeration of oriented conjugacy classes by translation length, with
//! Milnor–Švarc calibration, a certified word-length cap, a displacement
//! accelerator, and primitivity via canonical power synthesis.
//!
//! Completeness contract: every class with ℓ ≤ L has a geodesic spelling
//! whose prefix path stays close to its axis, hence inside the displacement
//! ball of radius L + slack around the basepoint; the word-length cap comes
//! from the calibrated comparability wl ≤ D·ℓ + D. The displacement prune is
//! an accelerator certified empirically (oracle equality at small L,
//! stability under margin doubling), never the sole completeness criterion.

use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicU64, Ordering};

use crate::error::Error;
use crate::geom::Isometry;
use crate::math;
use crate::surface::SurfacePresentation;
use crate::word::{Letter, Word};

/// Length guard: representatives are admitted up to L + guard and the final
/// decision uses the canonical word's recomputed length.
const LENGTH_GUARD: f64 = 1e-6;

/// Word-length ↔ geodesic-length comparability data for one presentation.
#[derive(Clone, Debug)]
pub struct Calibration {
    /// Comparability constant: wl(canonical) ≤ d·ℓ + d for every class.
    pub d: f64,
    /// Additive margin folded into the sampled ratios.
    pub margin: f64,
    /// Multiplicative safety inflation applied to the sampled maximum.
    pub safety_margin: f64,
    /// Depth the ratios were sampled at.
    pub sample_depth: usize,
}

impl Calibration {
    /// Enumeration depth cap for a census at length cutoff `l`.
    pub fn max_word_length(&self, l: f64) -> usize {
        math::ceil(self.d * (l + 1.0)) as usize
    }
}

/// One oriented conjugacy class of the census.
#[derive(Clone, Debug)]
pub struct GeodesicClass {
    /// Canonical cyclic word; the dedup key.
    pub word: Word,
    /// Translation length, recomputed from the canonical word.
    pub length: f64,
    pub primitive: bool,
    /// Power k ≥ 1 with the class equal to root^k.
    pub power: usize,
    /// Canonical word of the primitive root (the word itself if primitive).
    pub root: Word,
    /// Geometric intersection data, attached by the intersection stage.
    pub geometry: Option<crate::intersect::ClassGeometry>,
}

impl GeodesicClass {
    /// ℓ^# = ℓ / k.
    pub fn primitive_length(&self) -> f64 {
        self.length / self.power as f64
    }
}

/// Census enumeration parameters.
#[derive(Clone, Debug)]
pub struct CensusParams {
    /// Length cutoff L.
    pub l_max: f64,
    /// Displacement-prune slack beyond L.
    pub slack: f64,
    /// Visited-node budget; overrun is an error, never silent truncation.
    pub budget: u64,
}

impl CensusParams {
    pub fn new(l_max: f64) -> Self {
        CensusParams { l_max, slack: DEFAULT_SLACK, budget: DEFAULT_BUDGET }
    }
}

pub const DEFAULT_SLACK: f64 = 6.0;
pub const DEFAULT_BUDGET: u64 = 5_000_000_000;
pub const DEFAULT_SAFETY_MARGIN: f64 = 1.25;
pub const DEFAULT_CALIBRATION_DEPTH: usize = 8;
pub const DEFAULT_CALIBRATION_MARGIN: f64 = 1.0;

/// Sample canonical classes up to word depth `sample_depth` and return the
/// comparability constant D = safety · max (wl + margin)/(ℓ + 1), so that
/// wl ≤ D·ℓ + D holds on the sample with room to spare.
pub fn calibrate(
    s: &SurfacePresentation,
    sample_depth: usize,
    safety_margin: f64,
) -> Result<Calibration, Error> {
    let mut max_ratio: f64 = 0.0;
    let budget = AtomicU64::new(0);
    let mut seen: BTreeMap<Word, ()> = BTreeMap::new();
    let mut stack: Vec<u8> = Vec::new();
    let mut mats: Vec<Isometry> = alloc::vec![Isometry::identity()];
    calibrate_rec(s, sample_depth, &mut stack, &mut mats, &mut seen, &mut max_ratio, &budget)?;
    let d = (safety_margin * max_ratio).max(0.3);
    Ok(Calibration {
        d,
        margin: DEFAULT_CALIBRATION_MARGIN,
        safety_margin,
        sample_depth,
    })
}

fn calibrate_rec(
    s: &SurfacePresentation,
    depth_left: usize,
    stack: &mut Vec<u8>,
    mats: &mut Vec<Isometry>,
    seen: &mut BTreeMap<Word, ()>,
    max_ratio: &mut f64,
    budget: &AtomicU64,
) -> Result<(), Error> {
    if !stack.is_empty() && cyclically_reduced_raw(stack) {
        let m = mats.last().unwrap();
        if m.translation_length().is_ok() {
            let canonical = s.relator.canonical_class(&Word::from_raw(stack.clone()));
            if !canonical.is_empty() {
                if let Entry::Vacant(e) = seen.entry(canonical.clone()) {
                    let ell = s.word_matrix(&canonical).translation_length()?;
                    let ratio = (canonical.len() as f64 + DEFAULT_CALIBRATION_MARGIN)
                        / (ell + 1.0).max(0.5);
                    if ratio > *max_ratio {
                        *max_ratio = ratio;
                    }
                    e.insert(());
                }
            }
        }
    }
    if depth_left == 0 {
        return Ok(());
    }
    for l in 0..s.letter_count() as u8 {
        if stack.last() == Some(&(l ^ 1)) {
            continue;
        }
        stack.push(l);
        if s.relator.suffix_forbidden(stack) {
            stack.pop();
            continue;
        }
        if budget.fetch_add(1, Ordering::Relaxed) > 200_000_000 {
            return Err(Error::BudgetExceeded { visited: 200_000_000, budget: 200_000_000 });
        }
        let m = mats.last().unwrap().mul_raw(s.letter_matrix(Letter(l)));
        mats.push(m);
        calibrate_rec(s, depth_left - 1, stack, mats, seen, max_ratio, budget)?;
        mats.pop();
        stack.pop();
    }
    Ok(())
}

#[inline]
fn cyclically_reduced_raw(w: &[u8]) -> bool {
    w.len() == 1 || (!w.is_empty() && w[0] != w[w.len() - 1] ^ 1)
}

/// The census: every oriented conjugacy class with ℓ ≤ L, keyed by canonical
/// word, powers synthesized from primitive roots.
pub fn enumerate_classes(
    s: &SurfacePresentation,
    cal: &Calibration,
    params: &CensusParams,
) -> Result<BTreeMap<Word, GeodesicClass>, Error> {
    let counter = AtomicU64::new(0);
    let (mut map, roots) = census_roots(s, cal, params, 0, &counter)?;
    debug_assert!(roots.is_empty());
    finalize_powers(s, params.l_max, &mut map);
    Ok(map)
}

/// A prefix of the enumeration tree, resumable as an independent task.
#[derive(Clone, Debug)]
pub struct PrefixTask {
    pub word: Vec<u8>,
    pub matrix: Isometry,
}

/// Walk the tree to `split_depth`, collecting class contributions from the
/// shallow nodes and returning the surviving depth-`split_depth` prefixes as
/// independent tasks. `split_depth = 0` runs the whole census inline.
/// Merging the subtree maps (by key, values identical) with the shallow map
/// and then calling `finalize_powers` reproduces `enumerate_classes`
/// deterministically for any split depth or task order.
pub fn census_roots(
    s: &SurfacePresentation,
    cal: &Calibration,
    params: &CensusParams,
    split_depth: usize,
    counter: &AtomicU64,
) -> Result<(BTreeMap<Word, GeodesicClass>, Vec<PrefixTask>), Error> {
    let mut map = BTreeMap::new();
    let mut tasks = Vec::new();
    let mut ctx = DfsCtx {
        s,
        depth_cap: cal.max_word_length(params.l_max),
        cosh_disp_cap: math::cosh(params.l_max + params.slack),
        l_max: params.l_max,
        budget: params.budget,
        counter,
    };
    let mut stack = Vec::new();
    let mut split = SplitSink { depth: split_depth, tasks: &mut tasks };
    dfs(&mut ctx, &mut stack, Isometry::identity(), &mut map, Some(&mut split))?;
    Ok((map, tasks))
}

/// Run one prefix task to completion.
pub fn census_subtree(
    s: &SurfacePresentation,
    cal: &Calibration,
    params: &CensusParams,
    task: &PrefixTask,
    counter: &AtomicU64,
) -> Result<BTreeMap<Word, GeodesicClass>, Error> {
    let mut map = BTreeMap::new();
    let mut ctx = DfsCtx {
        s,
        depth_cap: cal.max_word_length(params.l_max),
        cosh_disp_cap: math::cosh(params.l_max + params.slack),
        l_max: params.l_max,
        budget: params.budget,
        counter,
    };
    let mut stack = task.word.clone();
    dfs(&mut ctx, &mut stack, task.matrix, &mut map, None)?;
    Ok(map)
}

/// Merge subtree results; on key collisions the records must agree (both
/// sides recomputed their data from the canonical word), so merging is
/// commutative and deterministic.
pub fn merge_census(into: &mut BTreeMap<Word, GeodesicClass>, from: BTreeMap<Word, GeodesicClass>) {
    for (k, v) in from {
        match into.entry(k) {
            Entry::Vacant(e) => {
                e.insert(v);
            }
            Entry::Occupied(e) => {
                debug_assert!(math::abs(e.get().length - v.length) < 1e-12);
            }
        }
    }
}

/// Final census ordering: (length ascending, word lexicographic).
pub fn ordered_records(map: &BTreeMap<Word, GeodesicClass>) -> Vec<&GeodesicClass> {
    let mut v: Vec<&GeodesicClass> = map.values().collect();
    v.sort_by(|a, b| a.length.partial_cmp(&b.length).unwrap().then_with(|| a.word.cmp(&b.word)));
    v
}

struct DfsCtx<'a> {
    s: &'a SurfacePresentation,
    depth_cap: usize,
    /// cosh of the displacement-prune radius (compared against cosh d).
    cosh_disp_cap: f64,
    l_max: f64,
    budget: u64,
    counter: &'a AtomicU64,
}

struct SplitSink<'a> {
    depth: usize,
    tasks: &'a mut Vec<PrefixTask>,
}

fn dfs(
    ctx: &mut DfsCtx,
    stack: &mut Vec<u8>,
    matrix: Isometry,
    map: &mut BTreeMap<Word, GeodesicClass>,
    mut split: Option<&mut SplitSink>,
) -> Result<(), Error> {
    if !stack.is_empty() && cyclically_reduced_raw(stack) {
        record_candidate(ctx.s, ctx.l_max, stack, &matrix, map);
    }
    if let Some(sink) = split.as_deref_mut() {
        if stack.len() == sink.depth && !stack.is_empty() {
            sink.tasks.push(PrefixTask { word: stack.clone(), matrix });
            return Ok(());
        }
    }
    if stack.len() >= ctx.depth_cap {
        return Ok(());
    }
    for l in 0..ctx.s.letter_count() as u8 {
        if stack.last() == Some(&(l ^ 1)) {
            continue;
        }
        stack.push(l);
        if ctx.s.relator.suffix_forbidden(stack) {
            stack.pop();
            continue;
        }
        let visited = ctx.counter.fetch_add(1, Ordering::Relaxed);
        if visited >= ctx.budget {
            return Err(Error::BudgetExceeded { visited, budget: ctx.budget });
        }
        let m = matrix.mul_raw(ctx.s.letter_matrix(Letter(l)));
        if m.cosh_displacement_origin() <= ctx.cosh_disp_cap {
            dfs(ctx, stack, m, map, split.as_deref_mut())?;
        }
        stack.pop();
    }
    Ok(())
}

fn record_candidate(
    s: &SurfacePresentation,
    l_max: f64,
    stack: &[u8],
    matrix: &Isometry,
    map: &mut BTreeMap<Word, GeodesicClass>,
) {
    let det = matrix.det();
    let t = math::abs(matrix.trace()) / math::sqrt(math::abs(det));
    if t <= 2.0 + crate::geom::PARABOLIC_TOL {
        return;
    }
    let ell_rep = 2.0 * math::acosh(t / 2.0);
    if ell_rep > l_max + LENGTH_GUARD {
        return;
    }
    let canonical = s.relator.canonical_class(&Word::from_raw(stack.to_vec()));
    if canonical.is_empty() {
        return;
    }
    if let Entry::Vacant(e) = map.entry(canonical.clone()) {
        // membership and stored length are decided on the canonical word
        if let Ok(ell) = s.word_matrix(&canonical).translation_length() {
            if ell <= l_max {
                e.insert(GeodesicClass {
                    root: canonical.clone(),
                    word: canonical,
                    length: ell,
                    primitive: true,
                    power: 1,
                    geometry: None,
                });
            }
        }
    }
}

/// Mark powers: iterate classes by increasing length; every class not yet
/// marked is primitive, and its powers root^k (k·ℓ ≤ L) are synthesized,
/// inserted when the search missed them, and tagged (power, root).
pub fn finalize_powers(s: &SurfacePresentation, l_max: f64, map: &mut BTreeMap<Word, GeodesicClass>) {
    let mut order: Vec<(Word, f64)> = map.iter().map(|(k, v)| (k.clone(), v.length)).collect();
    order.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    let mut marked: BTreeMap<Word, ()> = BTreeMap::new();
    for (key, ell) in order {
        if marked.contains_key(&key) {
            continue;
        }
        // primitive root; synthesize its powers
        let mut k = 2usize;
        while (k as f64) * ell <= l_max + LENGTH_GUARD {
            let power_word = s.relator.canonical_class(&key.pow(k));
            let ell_k = match s.word_matrix(&power_word).translation_length() {
                Ok(v) => v,
                Err(_) => break,
            };
            if ell_k <= l_max {
                let rec = GeodesicClass {
                    word: power_word.clone(),
                    length: ell_k,
                    primitive: false,
                    power: k,
                    root: key.clone(),
                    geometry: None,
                };
                map.insert(power_word.clone(), rec);
                marked.insert(power_word, ());
            }
            k += 1;
        }
    }
}

/// Brute-force oracle: enumerate every cyclically reduced word to the
/// calibrated depth cap with combinatorial restrictions only (no geometric
/// pruning), canonicalize, and synthesize powers. Equality with the pruned
/// census is the enumeration acceptance check.
pub fn census_oracle(
    s: &SurfacePresentation,
    cal: &Calibration,
    l_max: f64,
    budget: u64,
) -> Result<BTreeMap<Word, GeodesicClass>, Error> {
    let counter = AtomicU64::new(0);
    let (mut map, tasks) = oracle_roots(s, cal, l_max, budget, 0, &counter)?;
    debug_assert!(tasks.is_empty());
    finalize_powers(s, l_max, &mut map);
    Ok(map)
}

/// Oracle subtree splitting, mirroring `census_roots`, so the companion
/// crate can parallelize the oracle as well.
pub fn oracle_roots(
    s: &SurfacePresentation,
    cal: &Calibration,
    l_max: f64,
    budget: u64,
    split_depth: usize,
    counter: &AtomicU64,
) -> Result<(BTreeMap<Word, GeodesicClass>, Vec<PrefixTask>), Error> {
    let mut map = BTreeMap::new();
    let mut tasks = Vec::new();
    let mut ctx = DfsCtx {
        s,
        depth_cap: cal.max_word_length(l_max),
        cosh_disp_cap: f64::INFINITY,
        l_max,
        budget,
        counter,
    };
    let mut stack = Vec::new();
    let mut split = SplitSink { depth: split_depth, tasks: &mut tasks };
    dfs(&mut ctx, &mut stack, Isometry::identity(), &mut map, Some(&mut split))?;
    Ok((map, tasks))
}

/// Run one oracle prefix task.
pub fn oracle_subtree(
    s: &SurfacePresentation,
    cal: &Calibration,
    l_max: f64,
    budget: u64,
    task: &PrefixTask,
    counter: &AtomicU64,
) -> Result<BTreeMap<Word, GeodesicClass>, Error> {
    let mut map = BTreeMap::new();
    let mut ctx = DfsCtx {
        s,
        depth_cap: cal.max_word_length(l_max),
        cosh_disp_cap: f64::INFINITY,
        l_max,
        budget,
        counter,
    };
    let mut stack = task.word.clone();
    dfs(&mut ctx, &mut stack, task.matrix, &mut map, None)?;
    Ok(map)
}

/// Orbital counting for a free subgroup: the number of freely reduced words
/// over `letters` whose displacement of the basepoint is ≤ each grid value
/// (the empty word counts everywhere).
pub fn subgroup_orbital_count(
    s: &SurfacePresentation,
    letters: &[Letter],
    grid: &[f64],
    slack: f64,
    budget: u64,
) -> Result<Vec<u64>, Error> {
    let grid_max = grid.iter().cloned().fold(0.0, f64::max);
    let mut displacements: Vec<f64> = Vec::new();
    let counter = AtomicU64::new(0);
    let cap = math::cosh(grid_max + slack);
    // straight-word depth backstop (letters move the basepoint by ≥ systole)
    let depth_cap = (grid_max * 3.0) as usize + 16;
    orbital_rec(
        s,
        letters,
        &mut Vec::new(),
        Isometry::identity(),
        cap,
        grid_max,
        depth_cap,
        &mut displacements,
        &counter,
        budget,
    )?;
    Ok(grid.iter().map(|&g| displacements.iter().filter(|&&d| d <= g).count() as u64).collect())
}

#[allow(clippy::too_many_arguments)]
fn orbital_rec(
    s: &SurfacePresentation,
    letters: &[Letter],
    stack: &mut Vec<u8>,
    matrix: Isometry,
    cosh_cap: f64,
    grid_max: f64,
    depth_cap: usize,
    out: &mut Vec<f64>,
    counter: &AtomicU64,
    budget: u64,
) -> Result<(), Error> {
    let d = matrix.displacement_origin();
    if d <= grid_max {
        out.push(d);
    }
    if stack.len() >= depth_cap {
        return Ok(());
    }
    for &l in letters {
        if stack.last() == Some(&(l.0 ^ 1)) {
            continue;
        }
        let visited = counter.fetch_add(1, Ordering::Relaxed);
        if visited >= budget {
            return Err(Error::BudgetExceeded { visited, budget });
        }
        let m = matrix.mul_raw(s.letter_matrix(l));
        if m.cosh_displacement_origin() <= cosh_cap {
            stack.push(l.0);
            orbital_rec(s, letters, stack, m, cosh_cap, grid_max, depth_cap, out, counter, budget)?;
            stack.pop();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{bolza_generator_length, bolza_surface};

    fn setup() -> (SurfacePresentation, Calibration) {
        let s = bolza_surface().unwrap();
        let cal = calibrate(&s, 6, DEFAULT_SAFETY_MARGIN).unwrap();
        (s, cal)
    }

    #[test]
    fn calibration_basics() {
        let (s, cal) = setup();
        assert!(cal.d > 0.5 && cal.d < 3.0, "D = {}", cal.d);
        let deeper = calibrate(&s, 7, DEFAULT_SAFETY_MARGIN).unwrap();
        // stability: depth caps at L = 12 differ by at most 2 across depths
        assert!(
            (cal.max_word_length(12.0) as i64 - deeper.max_word_length(12.0) as i64).abs() <= 2,
            "caps {} vs {}",
            cal.max_word_length(12.0),
            deeper.max_word_length(12.0)
        );
    }

    #[test]
    fn empty_below_systole() {
        let (s, cal) = setup();
        let map = enumerate_classes(&s, &cal, &CensusParams::new(2.0)).unwrap();
        assert!(map.is_empty());
    }

    #[test]
    fn systolic_census() {
        let (s, cal) = setup();
        let map = enumerate_classes(&s, &cal, &CensusParams::new(3.1)).unwrap();
        // 12 unoriented systoles = 24 oriented classes on Bolza
        assert_eq!(map.len(), 24);
        let sys = bolza_generator_length();
        for rec in map.values() {
            assert!(math::abs(rec.length - sys) < 1e-8);
            assert!(rec.primitive);
        }
        // orientation pairing: the inverse class is present with equal length
        for rec in map.values() {
            let inv_key = s.relator.canonical_class(&rec.word.inverse());
            let partner = map.get(&inv_key).expect("inverse class missing");
            assert!(math::abs(partner.length - rec.length) < 1e-9);
        }
    }

    #[test]
    fn powers_tagged() {
        let (s, cal) = setup();
        let map = enumerate_classes(&s, &cal, &CensusParams::new(6.2)).unwrap();
        let a1sq = s.relator.canonical_class(&Word::parse("a1a1").unwrap());
        let rec = map.get(&a1sq).expect("a1^2 in census");
        assert!(!rec.primitive);
        assert_eq!(rec.power, 2);
        assert!(math::abs(rec.length - 2.0 * bolza_generator_length()) < 1e-8);
        assert!(math::abs(rec.primitive_length() - bolza_generator_length()) < 1e-8);
        // monotonicity: census at 3.1 is a subset
        let small = enumerate_classes(&s, &cal, &CensusParams::new(3.1)).unwrap();
        for k in small.keys() {
            assert!(map.contains_key(k));
        }
    }

    #[test]
    fn oracle_matches_census_at_small_scale() {
        let (s, cal) = setup();
        let l = 4.5;
        let census = enumerate_classes(&s, &cal, &CensusParams::new(l)).unwrap();
        let oracle = census_oracle(&s, &cal, l, 500_000_000).unwrap();
        assert_eq!(census.len(), oracle.len());
        for (k, v) in &oracle {
            let c = census.get(k).expect("class missing from pruned census");
            assert!(math::abs(c.length - v.length) < 1e-8);
            assert_eq!(c.primitive, v.primitive);
            assert_eq!(c.power, v.power);
        }
    }

    #[test]
    fn split_census_merges_deterministically() {
        let (s, cal) = setup();
        let params = CensusParams::new(4.0);
        let whole = enumerate_classes(&s, &cal, &params).unwrap();
        let counter = AtomicU64::new(0);
        let (mut shallow, tasks) = census_roots(&s, &cal, &params, 2, &counter).unwrap();
        assert!(!tasks.is_empty());
        for t in tasks.iter().rev() {
            let sub = census_subtree(&s, &cal, &params, t, &counter).unwrap();
            merge_census(&mut shallow, sub);
        }
        finalize_powers(&s, params.l_max, &mut shallow);
        assert_eq!(shallow.len(), whole.len());
        for (k, v) in &whole {
            assert_eq!(shallow.get(k).map(|r| r.length), Some(v.length));
        }
    }

    #[test]
    fn budget_overflow_reports() {
        let (s, cal) = setup();
        let mut params = CensusParams::new(4.0);
        params.budget = 50;
        match enumerate_classes(&s, &cal, &params) {
            Err(Error::BudgetExceeded { .. }) => {}
            other => panic!("expected budget error, got {:?}", other.map(|m| m.len())),
        }
    }

    #[test]
    fn orbital_count_cyclic_subgroup() {
        let (s, _) = setup();
        // subset {a1}: count(L) = 1 + 2*floor(L / d(o, a1 o))
        let a1 = Letter::new(0, false);
        let step = s.letter_matrix(a1).displacement_origin();
        let grid = [0.0, step + 0.1, 2.0 * step + 0.1, 3.0 * step + 0.1];
        let counts =
            subgroup_orbital_count(&s, &[a1, a1.inverse()], &grid, 4.0, 10_000_000).unwrap();
        assert_eq!(counts, alloc::vec![1, 3, 5, 7]);
    }

    #[test]
    fn orbital_count_rank_two_growth() {
        let (s, _) = setup();
        let letters = [
            Letter::new(0, false),
            Letter::new(0, true),
            Letter::new(1, false),
            Letter::new(1, true),
        ];
        let grid = [6.0, 8.0, 10.0];
        let counts = subgroup_orbital_count(&s, &letters, &grid, 5.0, 200_000_000).unwrap();
        assert!(counts[0] >= 5 && counts[1] > counts[0] && counts[2] > counts[1]);
        // crude growth-rate sanity: log-increments positive and below h = 1
        let rate = (math::ln(counts[2] as f64) - math::ln(counts[0] as f64)) / 4.0;
        assert!(rate > 0.3 && rate < 1.0, "rank-2 rate {rate}");
    }
}
