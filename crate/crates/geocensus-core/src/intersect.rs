//! Geometric intersection numbers and crossing data (τ, θ, side) by axis
//! linking in the universal cover, region labeling for admissible paths, and
//! the path exponents (h_ω, d_ω).
//!
//! For a census class γ and a marked curve c, the crossings of the closed
//! geodesics are the Γ-translates of axis(c) meeting one fundamental segment
//! [p, γ·p) of axis(γ). Translates are enumerated by a ball search around the
//! segment whose radius grows until the crossing set is stable across two
//! consecutive enlargements; crossing positions are folded modulo ℓ(γ) and
//! deduplicated (lifts of a disjoint multicurve are pairwise disjoint, so a
//! fold position identifies the crossing).

use alloc::vec::Vec;
use core::sync::atomic::{AtomicU64, Ordering};

use crate::census::GeodesicClass;
use crate::error::Error;
use crate::geom::{Isometry, MVec, PlanePoint, TANGENCY_TOL};
use crate::math;
use crate::surface::{CutDecomposition, SurfacePresentation};
use crate::word::{Letter, Word};

const PI: f64 = core::f64::consts::PI;

/// One transversal incidence of a geodesic with a marked curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossingDatum {
    /// Which marked curve is crossed (0-based).
    pub curve_index: usize,
    /// Arc-length position along that curve, in [0, length(curve)).
    pub tau: f64,
    /// Transversal angle in (0, π).
    pub theta: f64,
    /// Crossing direction relative to the curve's co-orientation.
    pub side: i8,
    /// Arc-length position along the geodesic's fundamental period,
    /// in [0, ℓ(γ)); sorting by this field gives the order along γ.
    pub position: f64,
}

impl CrossingDatum {
    /// Full direction angle in (0, 2π): θ on the positive side, θ + π on
    /// the negative side.
    pub fn full_angle(&self) -> f64 {
        if self.side >= 0 {
            self.theta
        } else {
            self.theta + PI
        }
    }
}

/// Cyclic itinerary ω(γ) = (u, v): curve crossed at each step and component
/// traversed between steps, stored at the canonical minimal rotation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissiblePath {
    pub curves: Vec<usize>,
    pub components: Vec<usize>,
}

impl AdmissiblePath {
    /// Canonicalize by the lexicographically minimal simultaneous rotation.
    pub fn canonical(curves: &[usize], components: &[usize]) -> Self {
        let n = curves.len();
        assert_eq!(n, components.len());
        if n == 0 {
            return AdmissiblePath { curves: Vec::new(), components: Vec::new() };
        }
        let mut best = 0usize;
        let key = |rot: usize, k: usize| {
            let i = (rot + k) % n;
            (curves[i], components[i])
        };
        for cand in 1..n {
            for k in 0..n {
                let a = key(cand, k);
                let b = key(best, k);
                if a != b {
                    if a < b {
                        best = cand;
                    }
                    break;
                }
            }
        }
        AdmissiblePath {
            curves: (0..n).map(|k| curves[(best + k) % n]).collect(),
            components: (0..n).map(|k| components[(best + k) % n]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    /// Check the defining conditions against a decomposition:
    /// u_ℓ, u_{ℓ+1} ∈ B_{v_ℓ} and v_ℓ = v_{ℓ+1} ⇒ u_{ℓ+1} ∈ O_{v_ℓ}.
    pub fn validate(&self, cut: &CutDecomposition) -> bool {
        let n = self.len();
        if n == 0 {
            return true;
        }
        for l in 0..n {
            let next = (l + 1) % n;
            let comp = match cut.components.get(self.components[l]) {
                Some(c) => c,
                None => return false,
            };
            if !comp.boundary.contains(&self.curves[l]) || !comp.boundary.contains(&self.curves[next])
            {
                return false;
            }
            if self.components[l] == self.components[next] && !comp.unshared.contains(&self.curves[next]) {
                return false;
            }
        }
        true
    }

    /// (h_ω, d_ω): the maximal component entropy along v and how many steps
    /// attain it.
    pub fn exponents(&self, cut: &CutDecomposition) -> Result<(f64, usize), Error> {
        if self.is_empty() {
            return Err(Error::EmptyPath);
        }
        let hs: Vec<f64> = self
            .components
            .iter()
            .map(|&j| cut.components[j].entropy.ok_or(Error::InsufficientData))
            .collect::<Result<_, _>>()?;
        let h = hs.iter().cloned().fold(f64::MIN, f64::max);
        let d = hs.iter().filter(|&&x| math::abs(x - h) < 1e-9).count();
        Ok((h, d))
    }

    /// Intersection vector n(ω).
    pub fn counts(&self, r: usize) -> Vec<u64> {
        let mut n = alloc::vec![0u64; r];
        for &u in &self.curves {
            n[u] += 1;
        }
        n
    }

    /// Token form "u:1,1|v:1,2" (1-based indices).
    pub fn token(&self) -> alloc::string::String {
        use core::fmt::Write;
        let mut s = alloc::string::String::from("u:");
        for (i, u) in self.curves.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{}", u + 1);
        }
        s.push_str("|v:");
        for (i, v) in self.components.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{}", v + 1);
        }
        s
    }

    /// Parse the token form.
    pub fn parse(tok: &str) -> Option<Self> {
        let rest = tok.strip_prefix("u:")?;
        let (u_part, v_part) = rest.split_once("|v:")?;
        let parse_list = |p: &str| -> Option<Vec<usize>> {
            if p.is_empty() {
                return Some(Vec::new());
            }
            p.split(',').map(|x| x.parse::<usize>().ok().and_then(|v| v.checked_sub(1))).collect()
        };
        let curves = parse_list(u_part)?;
        let components = parse_list(v_part)?;
        if curves.len() != components.len() {
            return None;
        }
        Some(AdmissiblePath { curves, components })
    }
}

/// Geometric data attached to a census record by the intersection stage.
#[derive(Clone, Debug)]
pub struct ClassGeometry {
    /// Per-curve crossing counts n_i.
    pub counts: Vec<u64>,
    /// All crossings, sorted by position along γ.
    pub crossings: Vec<CrossingDatum>,
    /// ω(γ), present when there is at least one crossing.
    pub path: Option<AdmissiblePath>,
    /// The class is a power of a marked curve (counts are zero by
    /// convention and flagged here).
    pub on_curve: bool,
}

impl ClassGeometry {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn min_angle(&self) -> Option<f64> {
        self.crossings
            .iter()
            .map(|c| c.theta.min(PI - c.theta))
            .min_by(|a, b| a.partial_cmp(b).unwrap())
    }
}

/// Precomputed frame of one marked curve: base lift of the axis with an
/// arc-length origin at the foot of the basepoint.
#[derive(Clone, Debug)]
pub(crate) struct CurveFrame {
    pub pole: MVec,
    pub origin: MVec,
    pub tangent: MVec,
    pub length: f64,
    /// Distance from the basepoint to the axis.
    pub rho: f64,
    /// Canonical class words of the curve and its inverse, for the
    /// power-of-curve convention.
    pub class_key: Word,
    pub class_key_inv: Word,
}

/// A marked multicurve with cut decomposition and everything intersection
/// and scattering computations need.
#[derive(Clone, Debug)]
pub struct CurveSystem {
    pub cut: CutDecomposition,
    pub(crate) frames: Vec<CurveFrame>,
    /// Reference point for region labeling (on the a₁ axis) and its label.
    pub(crate) ref_point: MVec,
    pub(crate) ref_label: usize,
}

/// Tuning of the translate ball search.
#[derive(Clone, Copy, Debug)]
pub struct IntersectParams {
    /// Initial padding beyond the geometric minimum ball radius.
    pub pad0: f64,
    /// Radius increment between stability runs.
    pub pad_step: f64,
    /// Give up (RadiusOverflow) beyond this padding.
    pub pad_max: f64,
    /// Node budget per ball search.
    pub budget: u64,
}

impl Default for IntersectParams {
    fn default() -> Self {
        IntersectParams { pad0: 2.0, pad_step: 1.0, pad_max: 12.0, budget: 200_000_000 }
    }
}

impl CurveSystem {
    pub fn new(s: &SurfacePresentation, cut: CutDecomposition) -> Result<Self, Error> {
        let basepoint = PlanePoint::basepoint().vec();
        let mut frames = Vec::with_capacity(cut.curves.len());
        for c in &cut.curves {
            let m = s.word_matrix(&c.word);
            let axis = m.axis()?;
            let pole = axis.pole();
            let origin = basepoint
                .add(&pole.scale(basepoint.dot(&pole)))
                .normalize_point()
                .ok_or(Error::Degenerate)?;
            let tangent = MVec::tangent_at(&origin, &pole);
            let rho = MVec::dist_to_line(&basepoint, &pole);
            let class_key = s.relator.canonical_class(&c.word);
            let class_key_inv = s.relator.canonical_class(&c.word.inverse());
            frames.push(CurveFrame {
                pole,
                origin,
                tangent,
                length: c.length,
                rho,
                class_key,
                class_key_inv,
            });
        }
        // labeling reference: foot of the basepoint on the a₁ axis, labeled
        // with the component whose subgroup contains a₁
        let a1 = Word::parse("a1").unwrap();
        let a1_axis = s.word_matrix(&a1).axis()?;
        let a1_pole = a1_axis.pole();
        let ref_point = basepoint
            .add(&a1_pole.scale(basepoint.dot(&a1_pole)))
            .normalize_point()
            .ok_or(Error::Degenerate)?;
        let a1_letter = Letter::new(0, false);
        let ref_label = cut
            .components
            .iter()
            .position(|c| c.letters.contains(&a1_letter))
            .ok_or(Error::UnsupportedConfiguration)?;
        Ok(CurveSystem { cut, frames, ref_point, ref_label })
    }

    pub fn curve_count(&self) -> usize {
        self.frames.len()
    }

    pub fn curve_length(&self, i: usize) -> f64 {
        self.frames[i].length
    }

    /// Lift of a boundary coordinate (curve, τ) to the base axis lift:
    /// the point and the curve's forward unit tangent there.
    pub(crate) fn lift(&self, curve: usize, tau: f64) -> (MVec, MVec) {
        let f = &self.frames[curve];
        let p = MVec::point_at(&f.origin, &f.tangent, tau);
        let p = p.normalize_point().expect("on-axis point is timelike");
        let t = MVec::tangent_at(&p, &f.pole);
        (p, t)
    }
}

/// Geometric intersection data of one census class with the whole marked
/// multicurve: per-curve counts and all crossing data, τ-sorted.
pub fn intersection_data(
    s: &SurfacePresentation,
    sys: &CurveSystem,
    class: &GeodesicClass,
    params: &IntersectParams,
) -> Result<ClassGeometry, Error> {
    let r = sys.curve_count();
    // power-of-curve convention: n = 0, flagged (the census supplies the
    // primitive root; the cyclic-period root backs it up for direct calls)
    let period_root = s.relator.canonical_class(&class.word.primitive_root().2);
    for f in &sys.frames {
        if class.root == f.class_key
            || class.root == f.class_key_inv
            || period_root == f.class_key
            || period_root == f.class_key_inv
        {
            return Ok(ClassGeometry {
                counts: alloc::vec![0; r],
                crossings: Vec::new(),
                path: None,
                on_curve: true,
            });
        }
    }
    let m = s.word_matrix(&class.word);
    let axis = m.axis()?;
    let pole = axis.pole();
    let basepoint = PlanePoint::basepoint().vec();
    let origin = basepoint
        .add(&pole.scale(basepoint.dot(&pole)))
        .normalize_point()
        .ok_or(Error::Degenerate)?;
    let tangent = MVec::tangent_at(&origin, &pole);
    let ell = class.length;
    let rho_g = MVec::dist_to_line(&basepoint, &pole);

    let mut crossings = stable_crossings(s, sys, &pole, &origin, &tangent, ell, rho_g, params)?;
    crossings.sort_by(|a, b| a.position.partial_cmp(&b.position).unwrap());
    let mut counts = alloc::vec![0u64; r];
    for c in &crossings {
        counts[c.curve_index] += 1;
    }
    let path = if crossings.is_empty() {
        None
    } else {
        Some(label_path(s, sys, &origin, &tangent, ell, &crossings, params)?)
    };
    if let Some(p) = &path {
        if !p.validate(&sys.cut) {
            return Err(Error::ConstructionFailure);
        }
    }
    Ok(ClassGeometry { counts, crossings, path, on_curve: false })
}

/// Crossings of all curve-axis translates with the fundamental segment,
/// folded modulo ℓ and stable under two consecutive ball enlargements.
#[allow(clippy::too_many_arguments)]
fn stable_crossings(
    s: &SurfacePresentation,
    sys: &CurveSystem,
    pole: &MVec,
    origin: &MVec,
    tangent: &MVec,
    ell: f64,
    rho_g: f64,
    params: &IntersectParams,
) -> Result<Vec<CrossingDatum>, Error> {
    let max_rho = sys.frames.iter().map(|f| f.rho + f.length / 2.0).fold(0.0, f64::max);
    let mut pad = params.pad0;
    let mut prev: Option<Vec<CrossingDatum>> = None;
    let mut stable_streak = 0;
    while pad <= params.pad_max {
        let radius = max_rho + rho_g + pad;
        let cur = collect_crossings(s, sys, pole, origin, tangent, ell, radius, params.budget)?;
        if let Some(p) = &prev {
            if same_crossings(p, &cur) {
                stable_streak += 1;
                if stable_streak >= 2 {
                    return Ok(cur);
                }
            } else {
                stable_streak = 0;
            }
        }
        prev = Some(cur);
        pad += params.pad_step;
    }
    Err(Error::RadiusOverflow)
}

fn same_crossings(a: &[CrossingDatum], b: &[CrossingDatum]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut xs: Vec<(usize, f64)> = a.iter().map(|c| (c.curve_index, c.position)).collect();
    let mut ys: Vec<(usize, f64)> = b.iter().map(|c| (c.curve_index, c.position)).collect();
    let by = |u: &(usize, f64), v: &(usize, f64)| {
        u.0.cmp(&v.0).then(u.1.partial_cmp(&v.1).unwrap())
    };
    xs.sort_by(by);
    ys.sort_by(by);
    xs.iter()
        .zip(&ys)
        .all(|(u, v)| u.0 == v.0 && math::abs(u.1 - v.1) < 1e-7)
}

/// Half-open boundary tolerance for positions along the fundamental segment.
const BOUNDARY_EPS: f64 = 1e-9;
/// Crossing dedup tolerance. Genuine crossings are separated along γ by at
/// least twice the marked curve's collar width (≥ 0.04 for the shipped
/// configurations), while re-findings of one lift through long wandering
/// spellings carry position noise well below this.
const DEDUP_EPS: f64 = 1e-3;

#[allow(clippy::too_many_arguments)]
fn collect_crossings(
    s: &SurfacePresentation,
    sys: &CurveSystem,
    pole: &MVec,
    origin: &MVec,
    tangent: &MVec,
    ell: f64,
    radius: f64,
    budget: u64,
) -> Result<Vec<CrossingDatum>, Error> {
    let mut out: Vec<Candidate> = Vec::new();
    let counter = AtomicU64::new(0);
    let mut stack: Vec<u8> = Vec::new();
    let ctx = BallCtx {
        s,
        sys,
        pole: *pole,
        origin: *origin,
        tangent: *tangent,
        ell,
        cosh_radius: math::cosh(radius),
        budget,
    };
    ball_rec(&ctx, &mut stack, Isometry::identity(), &counter, &mut |g, ctx, out| {
        probe_translates(g, ctx, out)
    }, &mut out)?;
    Ok(out.into_iter().map(|c| c.datum).collect())
}

struct BallCtx<'a> {
    s: &'a SurfacePresentation,
    sys: &'a CurveSystem,
    pole: MVec,
    origin: MVec,
    tangent: MVec,
    ell: f64,
    cosh_radius: f64,
    budget: u64,
}

/// DFS over group elements whose orbit point stays within the ball around
/// the fundamental segment; `probe` inspects every visited element.
fn ball_rec<T>(
    ctx: &BallCtx,
    stack: &mut Vec<u8>,
    g: Isometry,
    counter: &AtomicU64,
    probe: &mut impl FnMut(&Isometry, &BallCtx, &mut T) -> Result<(), Error>,
    out: &mut T,
) -> Result<(), Error> {
    probe(&g, ctx, out)?;
    for l in 0..ctx.s.letter_count() as u8 {
        if stack.last() == Some(&(l ^ 1)) {
            continue;
        }
        stack.push(l);
        if ctx.s.relator.suffix_forbidden(stack) {
            stack.pop();
            continue;
        }
        let visited = counter.fetch_add(1, Ordering::Relaxed);
        if visited >= ctx.budget {
            return Err(Error::BudgetExceeded { visited, budget: ctx.budget });
        }
        let m = g.mul_raw(ctx.s.letter_matrix(Letter(l)));
        let q = m.apply_vec(&PlanePoint::basepoint().vec());
        let d = MVec::dist_to_segment(&q, &ctx.pole, &ctx.origin, &ctx.tangent, 0.0, ctx.ell);
        if math::cosh(d) <= ctx.cosh_radius {
            ball_rec(ctx, stack, m, counter, probe, out)?;
        }
        stack.pop();
    }
    Ok(())
}

/// Crossing candidate plus the Frobenius norm of the spelling that produced
/// it; the smallest-norm spelling wins, which both deduplicates and keeps
/// the numerically cleanest values.
struct Candidate {
    datum: CrossingDatum,
    g_norm: f64,
}

fn probe_translates(
    g: &Isometry,
    ctx: &BallCtx,
    out: &mut Vec<Candidate>,
) -> Result<(), Error> {
    let g_norm = {
        let m = &g.m;
        m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1]
    };
    for (ci, f) in ctx.sys.frames.iter().enumerate() {
        let wt = g.apply_vec(&f.pole);
        let q = ctx.pole.dot(&wt);
        if math::abs(q) >= 1.0 - 1e-10 {
            continue;
        }
        let x = match ctx.pole.cross(&wt).normalize_point() {
            Some(x) => x,
            None => continue,
        };
        // Only crossings meeting the fundamental segment [0, ℓ) directly;
        // deck partners one period out would re-find the same crossing with
        // more float noise.
        let sraw = MVec::param_along(&x, &ctx.origin, &ctx.tangent);
        if !(-BOUNDARY_EPS..ctx.ell - BOUNDARY_EPS).contains(&sraw) {
            continue;
        }
        let position = sraw.max(0.0);
        if let Some(existing) = out
            .iter_mut()
            .find(|c| c.datum.curve_index == ci && math::abs(c.datum.position - position) < DEDUP_EPS)
        {
            if g_norm >= existing.g_norm {
                continue;
            }
            // fall through and recompute from the cleaner spelling below
            existing.g_norm = g_norm;
            existing.datum = crossing_datum(g, ctx, ci, f, &wt, &x, position)?;
            continue;
        }
        let datum = crossing_datum(g, ctx, ci, f, &wt, &x, position)?;
        out.push(Candidate { datum, g_norm });
    }
    Ok(())
}

fn crossing_datum(
    g: &Isometry,
    ctx: &BallCtx,
    curve_index: usize,
    f: &CurveFrame,
    wt: &MVec,
    x: &MVec,
    position: f64,
) -> Result<CrossingDatum, Error> {
    let phi = MVec::oriented_angle(&ctx.pole, wt, x);
    let theta = if phi < PI { phi } else { phi - PI };
    if math::abs(math::sin(theta)) < TANGENCY_TOL {
        return Err(Error::Degenerate);
    }
    let side: i8 = if phi < PI { 1 } else { -1 };
    // τ along the curve, pulled back through the translate
    let g_origin = g.apply_vec(&f.origin);
    let g_tangent = g.apply_vec(&f.tangent);
    let traw = MVec::param_along(x, &g_origin, &g_tangent);
    let tau = traw - math::floor(traw / f.length) * f.length;
    Ok(CrossingDatum { curve_index, tau, theta, side, position })
}

/// Component labels of the arcs between consecutive crossings, via crossing
/// parity from the labeled reference region.
#[allow(clippy::too_many_arguments)]
fn label_path(
    s: &SurfacePresentation,
    sys: &CurveSystem,
    origin: &MVec,
    tangent: &MVec,
    ell: f64,
    crossings: &[CrossingDatum],
    params: &IntersectParams,
) -> Result<AdmissiblePath, Error> {
    let n = crossings.len();
    let q = sys.cut.components.len();
    let u: Vec<usize> = crossings.iter().map(|c| c.curve_index).collect();
    if q == 1 {
        return Ok(AdmissiblePath::canonical(&u, &alloc::vec![0usize; n]));
    }
    if q != 2 {
        return Err(Error::UnsupportedConfiguration);
    }
    // arc midpoint after the first crossing
    let next = if n == 1 { crossings[0].position + ell } else { crossings[1].position };
    let mid = (crossings[0].position + next) / 2.0;
    let mid_point = MVec::point_at(origin, tangent, mid)
        .normalize_point()
        .ok_or(Error::Degenerate)?;
    let parity = crossing_parity(s, sys, &sys.ref_point.clone(), &mid_point, params)?;
    let first_label = (sys.ref_label + parity % 2) % 2;
    // labels alternate at each crossing for a two-sided separating system
    let mut v = alloc::vec![0usize; n];
    v[0] = first_label;
    for k in 1..n {
        v[k] = (v[k - 1] + 1) % 2;
    }
    if (v[n - 1] + 1) % 2 != v[0] {
        // odd crossing totals cannot close up over a separating curve
        return Err(Error::ConstructionFailure);
    }
    Ok(AdmissiblePath::canonical(&u, &v))
}

/// Parity of crossings of the geodesic segment [a, b] with all multicurve
/// lifts, stable under two ball enlargements. `LabelingAmbiguity` when an
/// endpoint sits within tolerance of a lift.
fn crossing_parity(
    s: &SurfacePresentation,
    sys: &CurveSystem,
    a: &MVec,
    b: &MVec,
    params: &IntersectParams,
) -> Result<usize, Error> {
    let seg_len = math::acosh(a.dot(b).max(1.0));
    if seg_len < 1e-12 {
        return Ok(0);
    }
    let ab_line = a.cross(b);
    let norm = -ab_line.dot(&ab_line);
    if norm <= 0.0 {
        return Err(Error::Degenerate);
    }
    let pole = ab_line.scale(1.0 / math::sqrt(norm));
    let tangent = MVec::tangent_at(a, &pole);
    // orient from a to b
    let s_b = MVec::param_along(b, a, &tangent);
    let (tangent, seg) = if s_b >= 0.0 { (tangent, s_b) } else { (tangent.scale(-1.0), -s_b) };

    let max_rho = sys.frames.iter().map(|f| f.rho + f.length / 2.0).fold(0.0, f64::max);
    let mut pad = params.pad0;
    let mut prev: Option<usize> = None;
    let mut streak = 0;
    while pad <= params.pad_max {
        let ctx = BallCtx {
            s,
            sys,
            pole,
            origin: *a,
            tangent,
            ell: seg,
            cosh_radius: math::cosh(max_rho + pad),
            budget: params.budget,
        };
        let mut hits: Vec<(usize, f64)> = Vec::new();
        let counter = AtomicU64::new(0);
        let mut stack = Vec::new();
        ball_rec(
            &ctx,
            &mut stack,
            Isometry::identity(),
            &counter,
            &mut |g, ctx, hits: &mut Vec<(usize, f64)>| {
                for (ci, f) in ctx.sys.frames.iter().enumerate() {
                    let wt = g.apply_vec(&f.pole);
                    // endpoint proximity check
                    if math::abs(a.dot(&wt)) < 1e-8 || math::abs(b.dot(&wt)) < 1e-8 {
                        return Err(Error::LabelingAmbiguity);
                    }
                    let qv = ctx.pole.dot(&wt);
                    if math::abs(qv) >= 1.0 - 1e-10 {
                        continue;
                    }
                    let x = match ctx.pole.cross(&wt).normalize_point() {
                        Some(x) => x,
                        None => continue,
                    };
                    let sx = MVec::param_along(&x, &ctx.origin, &ctx.tangent);
                    if sx <= 0.0 || sx >= ctx.ell {
                        continue;
                    }
                    if hits.iter().any(|h| h.0 == ci && math::abs(h.1 - sx) < 1e-9) {
                        continue;
                    }
                    hits.push((ci, sx));
                }
                Ok(())
            },
            &mut hits,
        )?;
        let parity = hits.len();
        if prev == Some(parity) {
            streak += 1;
            if streak >= 2 {
                return Ok(parity);
            }
        } else {
            streak = 0;
        }
        prev = Some(parity);
        pad += params.pad_step;
    }
    Err(Error::RadiusOverflow)
}

/// Label of the component containing the projection of an on-plane point;
/// exposed for the scattering stage.
pub(crate) fn component_of_point(
    s: &SurfacePresentation,
    sys: &CurveSystem,
    p: &MVec,
    params: &IntersectParams,
) -> Result<usize, Error> {
    if sys.cut.components.len() == 1 {
        return Ok(0);
    }
    let parity = crossing_parity(s, sys, &sys.ref_point.clone(), p, params)?;
    Ok((sys.ref_label + parity % 2) % 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::{calibrate, enumerate_classes, CensusParams, DEFAULT_SAFETY_MARGIN};
    use crate::surface::{bolza_surface, curve_nonseparating, curve_separating, cut, CurveConfig};

    fn class_of(s: &SurfacePresentation, w: &str) -> GeodesicClass {
        let word = s.relator.canonical_class(&Word::parse(w).unwrap());
        let length = s.word_matrix(&word).translation_length().unwrap();
        GeodesicClass {
            root: word.clone(),
            word,
            length,
            primitive: true,
            power: 1,
            geometry: None,
        }
    }

    fn nonsep_system(s: &SurfacePresentation) -> CurveSystem {
        let c = curve_nonseparating(s);
        CurveSystem::new(s, cut(s, &[c]).unwrap()).unwrap()
    }

    fn sep_system(s: &SurfacePresentation) -> CurveSystem {
        let c = curve_separating(s);
        CurveSystem::new(s, cut(s, &[c]).unwrap()).unwrap()
    }

    #[test]
    fn single_crossing_class() {
        let s = bolza_surface().unwrap();
        let sys = nonsep_system(&s);
        let g = intersection_data(&s, &sys, &class_of(&s, "b2"), &IntersectParams::default())
            .unwrap();
        assert_eq!(g.counts, alloc::vec![1]);
        let c = &g.crossings[0];
        assert!(c.theta > 0.0 && c.theta < PI);
        assert!(c.tau >= 0.0 && c.tau < sys.curve_length(0));
        // u = (1), v = (1)
        let p = g.path.unwrap();
        assert_eq!(p.curves, alloc::vec![0]);
        assert_eq!(p.components, alloc::vec![0]);
    }

    #[test]
    fn disjoint_classes() {
        let s = bolza_surface().unwrap();
        let sys = nonsep_system(&s);
        for w in ["a1", "b1", "a1b1"] {
            let g = intersection_data(&s, &sys, &class_of(&s, w), &IntersectParams::default())
                .unwrap();
            assert_eq!(g.total(), 0, "i({w}, a2) should vanish");
            assert!(g.path.is_none());
        }
    }

    #[test]
    fn power_of_curve_flagged() {
        let s = bolza_surface().unwrap();
        let sys = nonsep_system(&s);
        let g = intersection_data(&s, &sys, &class_of(&s, "a2a2"), &IntersectParams::default())
            .unwrap();
        assert!(g.on_curve);
        assert_eq!(g.total(), 0);
        let ginv = intersection_data(&s, &sys, &class_of(&s, "A2"), &IntersectParams::default())
            .unwrap();
        assert!(ginv.on_curve);
    }

    #[test]
    fn separating_pair_class() {
        let s = bolza_surface().unwrap();
        let sys = sep_system(&s);
        let g = intersection_data(&s, &sys, &class_of(&s, "a2a1"), &IntersectParams::default())
            .unwrap();
        assert_eq!(g.total(), 2, "i(a2a1, [a1,b1]) = 2");
        let p = g.path.clone().unwrap();
        assert_eq!(p.curves, alloc::vec![0, 0]);
        // the two arcs lie in the two one-holed tori
        let mut comps = p.components.clone();
        comps.sort();
        assert_eq!(comps, alloc::vec![0, 1]);
        assert!(p.validate(&sys.cut));
    }

    #[test]
    fn separating_counts_are_even_on_small_census() {
        let s = bolza_surface().unwrap();
        let cal = calibrate(&s, 6, DEFAULT_SAFETY_MARGIN).unwrap();
        let census = enumerate_classes(&s, &cal, &CensusParams::new(5.0)).unwrap();
        let sys = sep_system(&s);
        for rec in census.values() {
            let g = intersection_data(&s, &sys, rec, &IntersectParams::default()).unwrap();
            assert!(g.total() % 2 == 0, "odd count for {}", rec.word);
        }
    }

    #[test]
    fn crossings_inside_component_classes() {
        let s = bolza_surface().unwrap();
        let sys = sep_system(&s);
        // classes inside a torus do not cross the separating curve
        for w in ["a1", "b1", "a2", "b2", "a1b1", "a2b2"] {
            let g = intersection_data(&s, &sys, &class_of(&s, w), &IntersectParams::default())
                .unwrap();
            assert_eq!(g.total(), 0, "i({w}, sep) = 0");
        }
        // b2a1 mixes the tori: exactly two crossings, alternating components
        let g = intersection_data(&s, &sys, &class_of(&s, "b2a1"), &IntersectParams::default())
            .unwrap();
        assert_eq!(g.total(), 2);
        let p = g.path.unwrap();
        assert_ne!(p.components[0], p.components[1]);
    }

    #[test]
    fn conjugation_and_inverse_invariance() {
        let s = bolza_surface().unwrap();
        let sys = nonsep_system(&s);
        let params = IntersectParams::default();
        for w in ["b2", "b2b2", "a1b2", "b2a1B2b1"] {
            let base = intersection_data(&s, &sys, &class_of(&s, w), &params).unwrap();
            for c in ["a1", "b2a1", "A2b1"] {
                let conj_word = Word::parse(c)
                    .unwrap()
                    .concat(&Word::parse(w).unwrap())
                    .concat(&Word::parse(c).unwrap().inverse());
                let conj = intersection_data(
                    &s,
                    &sys,
                    &class_of(&s, &alloc::format!("{conj_word}")),
                    &params,
                )
                .unwrap();
                assert_eq!(conj.total(), base.total(), "conjugating {w} by {c}");
            }
            let inv = {
                let word = Word::parse(w).unwrap().inverse();
                intersection_data(&s, &sys, &class_of(&s, &alloc::format!("{word}")), &params)
                    .unwrap()
            };
            assert_eq!(inv.total(), base.total(), "inverse of {w}");
        }
    }

    #[test]
    fn twist_preserves_intersection_count() {
        let s = bolza_surface().unwrap();
        let sys = nonsep_system(&s);
        let params = IntersectParams::default();
        for w in ["b2", "a1b2", "b2b2", "b2a1b1"] {
            let base = intersection_data(&s, &sys, &class_of(&s, w), &params).unwrap();
            for k in [-1i64, 1, 2] {
                let tw = crate::word::twist_word(&Word::parse(w).unwrap(), k);
                let twisted =
                    intersection_data(&s, &sys, &class_of(&s, &alloc::format!("{tw}")), &params)
                        .unwrap();
                assert_eq!(twisted.total(), base.total(), "twist({w}, {k})");
            }
        }
    }

    #[test]
    fn power_crossings_repeat_with_primitive_period() {
        let s = bolza_surface().unwrap();
        let sys = nonsep_system(&s);
        let params = IntersectParams::default();
        let root = class_of(&s, "b2");
        let base = intersection_data(&s, &sys, &root, &params).unwrap();
        let sq = {
            let word = s.relator.canonical_class(&Word::parse("b2b2").unwrap());
            let length = s.word_matrix(&word).translation_length().unwrap();
            GeodesicClass {
                root: root.word.clone(),
                word,
                length,
                primitive: false,
                power: 2,
                geometry: None,
            }
        };
        let g = intersection_data(&s, &sys, &sq, &params).unwrap();
        assert_eq!(g.total(), 2 * base.total());
        // crossings repeat with period ℓ^# in position
        let half = sq.length / 2.0;
        let mut pos: Vec<f64> = g.crossings.iter().map(|c| c.position).collect();
        pos.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((pos[1] - pos[0] - half).abs() < 1e-6);
        assert!((g.crossings[0].tau - g.crossings[1].tau).abs() < 1e-6);
    }

    #[test]
    fn path_exponents_cases() {
        let s = bolza_surface().unwrap();
        let sys = sep_system(&s);
        let cut_eq = sys.cut.clone().with_entropies(&[0.7, 0.7]);
        let p = AdmissiblePath { curves: alloc::vec![0, 0], components: alloc::vec![0, 1] };
        assert_eq!(p.exponents(&cut_eq).unwrap(), (0.7, 2));
        let cut_ne = sys.cut.clone().with_entropies(&[0.8, 0.6]);
        assert_eq!(p.exponents(&cut_ne).unwrap(), (0.8, 1));
        let single = AdmissiblePath { curves: alloc::vec![0], components: alloc::vec![0] };
        assert_eq!(single.exponents(&cut_ne).unwrap(), (0.8, 1));
        assert!(AdmissiblePath { curves: alloc::vec![], components: alloc::vec![] }
            .exponents(&cut_eq)
            .is_err());
    }

    #[test]
    fn path_token_roundtrip() {
        let p = AdmissiblePath { curves: alloc::vec![0, 0], components: alloc::vec![0, 1] };
        assert_eq!(p.token(), "u:1,1|v:1,2");
        assert_eq!(AdmissiblePath::parse("u:1,1|v:1,2").unwrap(), p);
        // canonical rotation picks the lexicographically least pairing
        let q = AdmissiblePath::canonical(&[0, 0], &[1, 0]);
        assert_eq!(q.components, alloc::vec![0, 1]);
    }
}
