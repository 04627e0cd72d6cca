//! Exact-formula geometry of the hyperbolic plane in the upper half-plane
//! model: isometries as real 2x2 unit-determinant matrices, boundary points
//! as projective pairs, geodesics by their ideal endpoints.
//!
//! Internally most incidence computations run in the hyperboloid picture:
//! a point maps to a unit timelike vector, an oriented geodesic to a unit
//! spacelike "pole" vector for the Minkowski form t² − a² − b², and meets,
//! angles, distances and arc parameters become algebra in those vectors.
//! The model is conformal, so angles computed this way are hyperbolic angles.

use crate::error::Error;
use crate::math;

/// Determinant drift tolerance after renormalization.
pub const DET_TOL: f64 = 1e-9;
/// |trace| within this of 2 classifies as parabolic.
pub const PARABOLIC_TOL: f64 = 1e-9;
/// Angular tolerance under which two boundary points compare equal.
pub const BOUNDARY_TOL: f64 = 1e-12;
/// Minimum endpoint separation for a valid geodesic line.
pub const LINE_SEP_TOL: f64 = 1e-10;
/// |sin θ| below this at an incidence is a tangency.
pub const TANGENCY_TOL: f64 = 1e-9;

/// Orientation-preserving isometry of the hyperbolic plane: a real 2x2
/// matrix, kept at determinant 1 and canonical sign (trace > 0 when the
/// trace is away from zero). Matrices are PSL(2,R) representatives, so all
/// derived quantities use |trace| or quadratic expressions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Isometry {
    pub m: [[f64; 2]; 2],
}

/// Conjugacy type of an isometry, a pure function of |trace|.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsometryClass {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl Isometry {
    pub fn identity() -> Self {
        Isometry { m: [[1.0, 0.0], [0.0, 1.0]] }
    }

    /// Build from entries, renormalizing to det 1 and canonical sign.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Isometry { m: [[a, b], [c, d]] }.normalized()
    }

    /// Rescale by 1/sqrt|det| and fix the sign convention.
    pub fn normalized(mut self) -> Self {
        let det = self.det();
        let s = 1.0 / math::sqrt(math::abs(det));
        for r in 0..2 {
            for c in 0..2 {
                self.m[r][c] *= s;
            }
        }
        let tr = self.m[0][0] + self.m[1][1];
        let lead = if math::abs(tr) > 1e-7 {
            tr
        } else if math::abs(self.m[0][0]) > 1e-7 {
            self.m[0][0]
        } else if math::abs(self.m[0][1]) > 1e-7 {
            self.m[0][1]
        } else {
            self.m[1][0]
        };
        if lead < 0.0 {
            for r in 0..2 {
                for c in 0..2 {
                    self.m[r][c] = -self.m[r][c];
                }
            }
        }
        self
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn inverse(&self) -> Self {
        Isometry { m: [[self.m[1][1], -self.m[0][1]], [-self.m[1][0], self.m[0][0]]] }
            .normalized()
    }

    /// Plain matrix product without renormalization; enumeration loops use
    /// this and divide by the (drift-free within one word) determinant in
    /// derived quantities.
    #[inline]
    pub fn mul_raw(&self, rhs: &Isometry) -> Self {
        let a = &self.m;
        let b = &rhs.m;
        Isometry {
            m: [
                [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
                [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
            ],
        }
    }

    /// cosh of the basepoint displacement, cheap enough for pruning loops.
    #[inline]
    pub fn cosh_displacement_origin(&self) -> f64 {
        let m = &self.m;
        ((m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1])
            / (2.0 * math::abs(self.det())))
        .max(1.0)
    }

    /// Matrix product, renormalized to stop determinant drift.
    pub fn compose(&self, rhs: &Isometry) -> Self {
        let a = &self.m;
        let b = &rhs.m;
        Isometry {
            m: [
                [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
                [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
            ],
        }
        .normalized()
    }

    /// PSL(2,R) equality: matrices agree up to sign within `tol`.
    pub fn approx_eq(&self, rhs: &Isometry, tol: f64) -> bool {
        let mut dp: f64 = 0.0;
        let mut dm: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                dp = dp.max(math::abs(self.m[r][c] - rhs.m[r][c]));
                dm = dm.max(math::abs(self.m[r][c] + rhs.m[r][c]));
            }
        }
        dp.min(dm) < tol
    }

    pub fn classify(&self) -> IsometryClass {
        let t = math::abs(self.trace());
        if t < 2.0 - PARABOLIC_TOL {
            IsometryClass::Elliptic
        } else if t <= 2.0 + PARABOLIC_TOL {
            IsometryClass::Parabolic
        } else {
            IsometryClass::Hyperbolic
        }
    }

    /// Translation length 2·arccosh(|tr|/2) of a hyperbolic element.
    pub fn translation_length(&self) -> Result<f64, Error> {
        let t = math::abs(self.trace());
        if t <= 2.0 + PARABOLIC_TOL {
            return Err(Error::NonHyperbolic);
        }
        Ok(2.0 * math::acosh(t / 2.0))
    }

    /// Translation axis, oriented from the repelling to the attracting
    /// fixed point (eigenvector directions; attracting has the larger
    /// |eigenvalue|).
    pub fn axis(&self) -> Result<GeodesicLine, Error> {
        let tr = self.trace();
        if math::abs(tr) <= 2.0 + PARABOLIC_TOL {
            return Err(Error::NonHyperbolic);
        }
        let disc = math::sqrt(tr * tr - 4.0);
        let l1 = (tr + disc) / 2.0;
        let l2 = (tr - disc) / 2.0;
        let (att, rep) = if math::abs(l1) > math::abs(l2) { (l1, l2) } else { (l2, l1) };
        Ok(GeodesicLine::from_endpoints(self.eigenvector(rep), self.eigenvector(att)))
    }

    fn eigenvector(&self, lambda: f64) -> BoundaryPoint {
        let v1 = (self.m[0][1], lambda - self.m[0][0]);
        let v2 = (lambda - self.m[1][1], self.m[1][0]);
        let n1 = v1.0 * v1.0 + v1.1 * v1.1;
        let n2 = v2.0 * v2.0 + v2.1 * v2.1;
        let v = if n1 >= n2 { v1 } else { v2 };
        BoundaryPoint::new(v.0, v.1)
    }

    /// d(p, a·p) via the hyperboloid inner product.
    pub fn displacement(&self, p: &PlanePoint) -> f64 {
        let v = p.vec();
        let w = self.apply_vec(&v);
        math::acosh(v.dot(&w).max(1.0))
    }

    /// Displacement of the standard basepoint i; for det-1 matrices
    /// cosh d = (a² + b² + c² + d²)/2.
    pub fn displacement_origin(&self) -> f64 {
        let m = &self.m;
        let s = (m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1])
            / (2.0 * math::abs(self.det()));
        math::acosh(s.max(1.0))
    }

    /// Möbius action on the upper half-plane.
    pub fn apply_point(&self, p: &PlanePoint) -> PlanePoint {
        let [[a, b], [c, d]] = self.m;
        let den = {
            let re = c * p.x + d;
            let im = c * p.y;
            re * re + im * im
        };
        let det = self.det();
        let x = ((a * p.x + b) * (c * p.x + d) + a * c * p.y * p.y) / den;
        let y = p.y * det / den;
        PlanePoint::new(x, y)
    }

    /// Projective-linear action on boundary points.
    pub fn apply_boundary(&self, p: &BoundaryPoint) -> BoundaryPoint {
        let [[a, b], [c, d]] = self.m;
        BoundaryPoint::new(a * p.x + b * p.y, c * p.x + d * p.y)
    }

    pub fn apply_line(&self, l: &GeodesicLine) -> GeodesicLine {
        GeodesicLine::from_endpoints(
            self.apply_boundary(&l.repelling),
            self.apply_boundary(&l.attracting),
        )
    }

    pub(crate) fn apply_vec(&self, v: &MVec) -> MVec {
        // Symmetric-matrix picture: v ↔ S = [[t+b, a], [a, t-b]], S ↦ g S gᵀ.
        let [[g00, g01], [g10, g11]] = self.m;
        let s00 = v.t + v.b;
        let s01 = v.a;
        let s11 = v.t - v.b;
        // g S
        let p00 = g00 * s00 + g01 * s01;
        let p01 = g00 * s01 + g01 * s11;
        let p10 = g10 * s00 + g11 * s01;
        let p11 = g10 * s01 + g11 * s11;
        // (g S) gᵀ
        let r00 = p00 * g00 + p01 * g01;
        let r01 = p00 * g10 + p01 * g11;
        let r11 = p10 * g10 + p11 * g11;
        let inv_det = 1.0 / math::abs(self.det());
        MVec { t: (r00 + r11) / 2.0 * inv_det, a: r01 * inv_det, b: (r00 - r11) / 2.0 * inv_det }
    }
}

/// Point of the upper half-plane (hyperbolic length units), y > 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub fn new(x: f64, y: f64) -> Self {
        debug_assert!(y >= 1e-300, "point left the upper half-plane");
        PlanePoint { x, y }
    }

    /// The standard basepoint i (center of the Bolza octagon).
    pub fn basepoint() -> Self {
        PlanePoint { x: 0.0, y: 1.0 }
    }

    pub fn dist(&self, q: &PlanePoint) -> f64 {
        let dx = self.x - q.x;
        let dy = self.y - q.y;
        math::acosh((1.0 + (dx * dx + dy * dy) / (2.0 * self.y * q.y)).max(1.0))
    }

    pub(crate) fn vec(&self) -> MVec {
        let n = self.x * self.x + self.y * self.y;
        MVec { t: (n + 1.0) / (2.0 * self.y), a: self.x / self.y, b: (n - 1.0) / (2.0 * self.y) }
    }
}

/// Boundary point of the hyperbolic plane as a projective pair (x : y),
/// unit-normalized with canonical sign; (x : y) and (−x : −y) are equal.
/// The point at infinity is (1 : 0), finite u is (u : 1) before scaling.
#[derive(Clone, Copy, Debug)]
pub struct BoundaryPoint {
    pub x: f64,
    pub y: f64,
}

impl BoundaryPoint {
    pub fn new(x: f64, y: f64) -> Self {
        let n = math::sqrt(x * x + y * y);
        debug_assert!(n > 0.0, "zero boundary pair");
        let (mut x, mut y) = (x / n, y / n);
        if y < 0.0 || (y == 0.0 && x < 0.0) {
            x = -x;
            y = -y;
        }
        BoundaryPoint { x, y }
    }

    pub fn infinity() -> Self {
        BoundaryPoint { x: 1.0, y: 0.0 }
    }

    pub fn from_real(u: f64) -> Self {
        BoundaryPoint::new(u, 1.0)
    }

    /// sin of the angular separation on the boundary circle.
    pub fn cross(&self, q: &BoundaryPoint) -> f64 {
        self.x * q.y - self.y * q.x
    }

    pub fn approx_eq(&self, q: &BoundaryPoint, tol: f64) -> bool {
        math::abs(self.cross(q)) < tol && (self.x * q.x + self.y * q.y) != 0.0
    }

    pub(crate) fn vec(&self) -> MVec {
        MVec {
            t: (self.x * self.x + self.y * self.y) / 2.0,
            a: self.x * self.y,
            b: (self.x * self.x - self.y * self.y) / 2.0,
        }
    }
}

/// Oriented complete geodesic, from `repelling` toward `attracting`.
#[derive(Clone, Copy, Debug)]
pub struct GeodesicLine {
    pub repelling: BoundaryPoint,
    pub attracting: BoundaryPoint,
}

impl GeodesicLine {
    pub fn from_endpoints(repelling: BoundaryPoint, attracting: BoundaryPoint) -> Self {
        GeodesicLine { repelling, attracting }
    }

    pub fn is_valid(&self) -> bool {
        math::abs(self.repelling.cross(&self.attracting)) > LINE_SEP_TOL
    }

    pub fn reversed(&self) -> Self {
        GeodesicLine { repelling: self.attracting, attracting: self.repelling }
    }

    /// Unit spacelike pole; orientation flips with the endpoint order and is
    /// independent of the projective sign of either endpoint.
    pub(crate) fn pole(&self) -> MVec {
        let (x1, e1) = (self.repelling.x, self.repelling.y);
        let (x2, e2) = (self.attracting.x, self.attracting.y);
        let den = x1 * e2 - x2 * e1;
        MVec {
            t: (x1 * x2 + e1 * e2) / den,
            a: (x1 * e2 + x2 * e1) / den,
            b: (x1 * x2 - e1 * e2) / den,
        }
    }
}

/// Minkowski 3-vector (t, a, b) for the form t² − a² − b²; points are unit
/// timelike (t > 0), line poles unit spacelike, boundary points null.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct MVec {
    pub t: f64,
    pub a: f64,
    pub b: f64,
}

impl MVec {
    #[inline]
    pub fn dot(&self, o: &MVec) -> f64 {
        self.t * o.t - self.a * o.a - self.b * o.b
    }

    /// Cross product adapted to the form: ⟨u ⊠ v, w⟩ = det[u; v; w].
    #[inline]
    pub fn cross(&self, o: &MVec) -> MVec {
        MVec {
            t: self.a * o.b - self.b * o.a,
            a: self.t * o.b - self.b * o.t,
            b: self.a * o.t - self.t * o.a,
        }
    }

    #[inline]
    pub fn scale(&self, s: f64) -> MVec {
        MVec { t: self.t * s, a: self.a * s, b: self.b * s }
    }

    #[inline]
    pub fn add(&self, o: &MVec) -> MVec {
        MVec { t: self.t + o.t, a: self.a + o.a, b: self.b + o.b }
    }

    /// Normalize a timelike vector to the upper unit hyperboloid.
    /// Returns None when the vector is not timelike beyond rounding.
    pub fn normalize_point(&self) -> Option<MVec> {
        let n = self.dot(self);
        let scale = self.t * self.t + self.a * self.a + self.b * self.b;
        if n <= 1e-9 * scale {
            return None;
        }
        let v = self.scale(1.0 / math::sqrt(n));
        Some(if v.t < 0.0 { v.scale(-1.0) } else { v })
    }

    /// Unit forward tangent at point `p` along the oriented line with pole
    /// `w` (points from the repelling toward the attracting endpoint).
    pub fn tangent_at(p: &MVec, w: &MVec) -> MVec {
        let t = p.cross(w);
        let n = -t.dot(&t);
        t.scale(1.0 / math::sqrt(n))
    }

    /// Point at signed arc length s from `p0` along unit tangent `t0`.
    pub fn point_at(p0: &MVec, t0: &MVec, s: f64) -> MVec {
        p0.scale(math::cosh(s)).add(&t0.scale(math::sinh(s)))
    }

    /// Signed arc-length parameter of on-line point `x` relative to origin
    /// `p0` with forward tangent `t0`.
    pub fn param_along(x: &MVec, p0: &MVec, t0: &MVec) -> f64 {
        let ch = x.dot(p0);
        let sh = -x.dot(t0);
        if ch > 4.0 {
            let s = math::acosh(ch.max(1.0));
            if sh >= 0.0 {
                s
            } else {
                -s
            }
        } else {
            math::asinh(sh)
        }
    }

    /// Unsigned distance from a point to the complete line with pole `w`.
    pub fn dist_to_line(p: &MVec, w: &MVec) -> f64 {
        math::asinh(math::abs(p.dot(w)))
    }

    /// Distance from point `q` to the arc {P(s), s ∈ [s_lo, s_hi]} of the
    /// line (pole `w`, origin `p0`, tangent `t0`).
    pub fn dist_to_segment(q: &MVec, w: &MVec, p0: &MVec, t0: &MVec, s_lo: f64, s_hi: f64) -> f64 {
        let ch = q.dot(p0);
        let sh = -q.dot(t0);
        let ratio = sh / ch;
        if ratio > -1.0 && ratio < 1.0 {
            let foot = math::atanh(ratio);
            if foot >= s_lo && foot <= s_hi {
                return Self::dist_to_line(q, w);
            }
        }
        let d_lo = math::acosh(q.dot(&Self::point_at(p0, t0, s_lo)).max(1.0));
        let d_hi = math::acosh(q.dot(&Self::point_at(p0, t0, s_hi)).max(1.0));
        d_lo.min(d_hi)
    }

    /// Oriented angle in [0, 2π) from line `w1` to line `w2` at their
    /// crossing point `x` (counterclockwise positive).
    pub fn oriented_angle(w1: &MVec, w2: &MVec, x: &MVec) -> f64 {
        let t1 = Self::tangent_at(x, w1);
        let t2 = Self::tangent_at(x, w2);
        let c = -t1.dot(&t2);
        let s = t1.cross(&t2).dot(x);
        let ang = math::atan2(s, c);
        if ang < 0.0 {
            ang + 2.0 * core::f64::consts::PI
        } else {
            ang
        }
    }
}

/// True iff the endpoint pairs of the two lines link on the boundary circle;
/// `Degenerate` when they share an endpoint within tolerance.
pub fn lines_cross(l1: &GeodesicLine, l2: &GeodesicLine) -> Result<bool, Error> {
    let (a, b) = (l1.repelling, l1.attracting);
    let (c, d) = (l2.repelling, l2.attracting);
    let ac = a.cross(&c);
    let ad = a.cross(&d);
    let bc = b.cross(&c);
    let bd = b.cross(&d);
    let tol = LINE_SEP_TOL;
    if math::abs(ac) < tol || math::abs(ad) < tol || math::abs(bc) < tol || math::abs(bd) < tol {
        return Err(Error::Degenerate);
    }
    Ok((ac * ad) * (bc * bd) < 0.0)
}

/// Crossing of line `l` with the half-open arc [p, q) of `seg_line`.
///
/// Returns the arc-length position τ ∈ [0, d(p,q)) from `p` and the crossing
/// angle θ ∈ (0, π) measured from `seg_line`'s orientation to `l`'s, folded
/// by reversing `l` when the oriented angle exceeds π. Tangential incidence
/// is `Degenerate`; no crossing inside the arc returns Ok(None).
pub fn cross_segment(
    l: &GeodesicLine,
    seg_line: &GeodesicLine,
    p: &PlanePoint,
    q: &PlanePoint,
) -> Result<Option<(f64, f64)>, Error> {
    let w_seg = seg_line.pole();
    let w = l.pole();
    let pv = p.vec();
    let qv = q.vec();
    debug_assert!(math::abs(pv.dot(&w_seg)) < 1e-8, "p not on seg_line");
    debug_assert!(math::abs(qv.dot(&w_seg)) < 1e-8, "q not on seg_line");
    let cosang = w_seg.dot(&w);
    if math::abs(cosang) >= 1.0 {
        // Disjoint or sharing an endpoint.
        if math::abs(math::abs(cosang) - 1.0) < LINE_SEP_TOL {
            return Err(Error::Degenerate);
        }
        return Ok(None);
    }
    let x = match w_seg.cross(&w).normalize_point() {
        Some(x) => x,
        None => return Err(Error::Degenerate),
    };
    let t_seg = MVec::tangent_at(&pv, &w_seg);
    // Orient the segment from p toward q.
    let s_q = MVec::param_along(&qv, &pv, &t_seg);
    let (t_seg, seg_len) = if s_q >= 0.0 { (t_seg, s_q) } else { (t_seg.scale(-1.0), -s_q) };
    let tau = MVec::param_along(&x, &pv, &t_seg);
    if !(0.0..seg_len).contains(&tau) {
        return Ok(None);
    }
    let w_oriented = if s_q >= 0.0 { w_seg } else { w_seg.scale(-1.0) };
    let phi = MVec::oriented_angle(&w_oriented, &w, &x);
    let theta = if phi < core::f64::consts::PI { phi } else { phi - core::f64::consts::PI };
    if math::abs(math::sin(theta)) < TANGENCY_TOL {
        return Err(Error::Degenerate);
    }
    Ok(Some((tau, theta)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-10;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        math::abs(a - b) < tol
    }

    #[test]
    fn compose_identity_and_inverse() {
        let a = Isometry::new(2.0, 1.0, 1.0, 1.0);
        let id = Isometry::identity();
        assert!(a.compose(&id).approx_eq(&a, EPS));
        assert!(a.compose(&a.inverse()).approx_eq(&id, 1e-10));
    }

    #[test]
    fn classification_by_trace() {
        assert_eq!(Isometry::identity().classify(), IsometryClass::Parabolic);
        assert_eq!(Isometry::new(1.0, 1.0, 0.0, 1.0).classify(), IsometryClass::Parabolic);
        assert_eq!(Isometry::new(2.0, 0.0, 0.0, 0.5).classify(), IsometryClass::Hyperbolic);
        let c = math::cos(0.3);
        let s = math::sin(0.3);
        assert_eq!(Isometry::new(c, s, -s, c).classify(), IsometryClass::Elliptic);
    }

    #[test]
    fn translation_length_of_diagonal() {
        // diag(e^{1/2}, e^{-1/2}) translates the imaginary axis by 1.
        let e = math::exp(0.5);
        let a = Isometry::new(e, 0.0, 0.0, 1.0 / e);
        assert!(approx(a.translation_length().unwrap(), 1.0, 1e-12));
        assert_eq!(Isometry::identity().translation_length(), Err(Error::NonHyperbolic));
    }

    #[test]
    fn axis_of_diagonal_is_imaginary_axis() {
        let e = math::exp(0.5);
        let a = Isometry::new(e, 0.0, 0.0, 1.0 / e);
        let ax = a.axis().unwrap();
        // repelling (0:1) = 0, attracting (1:0) = infinity
        assert!(ax.repelling.approx_eq(&BoundaryPoint::from_real(0.0), EPS));
        assert!(ax.attracting.approx_eq(&BoundaryPoint::infinity(), EPS));
    }

    #[test]
    fn axis_equivariance_under_conjugation() {
        let e = math::exp(0.7);
        let a = Isometry::new(e, 0.0, 0.0, 1.0 / e);
        let g = Isometry::new(1.3, 0.4, 0.2, 1.1);
        let conj = g.compose(&a).compose(&g.inverse());
        let ax = conj.axis().unwrap();
        let expect = g.apply_line(&a.axis().unwrap());
        assert!(ax.repelling.approx_eq(&expect.repelling, 1e-9));
        assert!(ax.attracting.approx_eq(&expect.attracting, 1e-9));
        assert!(approx(
            conj.translation_length().unwrap(),
            a.translation_length().unwrap(),
            1e-9
        ));
    }

    #[test]
    fn displacement_on_and_off_axis() {
        let e = math::exp(0.5);
        let a = Isometry::new(e, 0.0, 0.0, 1.0 / e);
        let on = a.displacement(&PlanePoint::basepoint());
        assert!(approx(on, 1.0, 1e-12));
        let off = a.displacement(&PlanePoint::new(1.0, 1.0));
        // cosh d = 1 + |z - e z|^2 / (2 Im z Im(e z))
        let expected = {
            let dx = 1.0 - math::exp(1.0);
            let dy = 1.0 - math::exp(1.0);
            math::acosh(1.0 + (dx * dx + dy * dy) / (2.0 * math::exp(1.0)))
        };
        assert!(approx(off, expected, 1e-12));
        assert!(off > on);
        assert!(approx(Isometry::identity().displacement(&PlanePoint::new(3.0, 2.0)), 0.0, EPS));
        assert!(approx(a.displacement_origin(), 1.0, 1e-12));
    }

    #[test]
    fn displacement_approaches_translation_length_near_axis() {
        let e = math::exp(0.5);
        let a = Isometry::new(e, 0.0, 0.0, 1.0 / e);
        let mut last = f64::INFINITY;
        for k in 1..6 {
            let x = 1.0 / math::pow(4.0, k as f64);
            let d = a.displacement(&PlanePoint::new(x, 1.0)) - 1.0;
            assert!(d >= -1e-12 && d < last);
            last = d;
        }
        assert!(last < 1e-4);
    }

    #[test]
    fn boundary_point_projective_identification() {
        let p = BoundaryPoint::new(2.0, -3.0);
        let q = BoundaryPoint::new(-4.0, 6.0);
        assert!(p.approx_eq(&q, BOUNDARY_TOL));
        assert!(approx(p.x * p.x + p.y * p.y, 1.0, 1e-15));
    }

    #[test]
    fn linking_test_cases() {
        let line = |u: f64, v: f64| {
            GeodesicLine::from_endpoints(BoundaryPoint::from_real(u), BoundaryPoint::from_real(v))
        };
        let im_axis = GeodesicLine::from_endpoints(
            BoundaryPoint::from_real(0.0),
            BoundaryPoint::infinity(),
        );
        assert_eq!(lines_cross(&line(-1.0, 1.0), &im_axis), Ok(true));
        assert_eq!(lines_cross(&line(-1.0, 1.0), &line(2.0, 3.0)), Ok(false));
        assert_eq!(lines_cross(&line(0.0, 2.0), &line(2.0, 5.0)), Err(Error::Degenerate));
        // symmetry and isometry invariance
        let g = Isometry::new(1.4, 0.3, 0.1, 0.9);
        let l1 = line(-1.0, 1.0);
        let l2 = line(0.5, 3.0);
        assert_eq!(lines_cross(&l1, &l2), lines_cross(&l2, &l1));
        assert_eq!(
            lines_cross(&g.apply_line(&l1), &g.apply_line(&l2)),
            lines_cross(&l1, &l2)
        );
    }

    #[test]
    fn minkowski_conventions() {
        // meet of the imaginary axis and the unit half-circle is i
        let im = GeodesicLine::from_endpoints(
            BoundaryPoint::from_real(0.0),
            BoundaryPoint::infinity(),
        )
        .pole();
        let circ = GeodesicLine::from_endpoints(
            BoundaryPoint::from_real(-1.0),
            BoundaryPoint::from_real(1.0),
        )
        .pole();
        let x = im.cross(&circ).normalize_point().unwrap();
        let i = PlanePoint::basepoint().vec();
        assert!(approx(x.t, i.t, EPS) && approx(x.a, i.a, EPS) && approx(x.b, i.b, EPS));
        // forward tangent along the imaginary axis at i points up: (0,0,1)
        let t_up = MVec::tangent_at(&i, &im);
        assert!(approx(t_up.t, 0.0, EPS) && approx(t_up.a, 0.0, EPS) && approx(t_up.b, 1.0, EPS));
        // forward tangent along the circle (-1 -> 1) at i points right: (0,1,0)
        let t_right = MVec::tangent_at(&i, &circ);
        assert!(approx(t_right.a, 1.0, EPS) && approx(t_right.b, 0.0, EPS));
        // moving up the axis by s lands on e^s i
        let s = 0.8;
        let up = MVec::point_at(&i, &t_up, s);
        let target = PlanePoint::new(0.0, math::exp(s)).vec();
        assert!(approx(up.t, target.t, 1e-12) && approx(up.b, target.b, 1e-12));
        assert!(approx(MVec::param_along(&up, &i, &t_up), s, 1e-12));
        // counterclockwise angle from "up" to "right" is 3π/2
        let ang = MVec::oriented_angle(&im, &circ, &x);
        assert!(approx(ang, 3.0 * core::f64::consts::PI / 2.0, 1e-12));
    }

    #[test]
    fn cross_segment_examples() {
        let im = GeodesicLine::from_endpoints(
            BoundaryPoint::from_real(0.0),
            BoundaryPoint::infinity(),
        );
        let circ = GeodesicLine::from_endpoints(
            BoundaryPoint::from_real(-1.0),
            BoundaryPoint::from_real(1.0),
        );
        let p = PlanePoint::basepoint();
        let q = PlanePoint::new(0.0, math::exp(1.0));
        // orthogonal crossing at the start of the segment: τ = 0, θ = π/2
        let (tau, theta) = cross_segment(&circ, &im, &p, &q).unwrap().unwrap();
        assert!(approx(tau, 0.0, EPS));
        assert!(approx(theta, core::f64::consts::PI / 2.0, EPS));
        // disjoint lines
        let far = GeodesicLine::from_endpoints(
            BoundaryPoint::from_real(2.0),
            BoundaryPoint::from_real(3.0),
        );
        assert_eq!(cross_segment(&far, &im, &p, &q).unwrap(), None);
        // crossing just past q is excluded by the half-open convention:
        // shift the circle up by conjugation so it crosses at e^1 i exactly
        let e = math::exp(0.5);
        let dil = Isometry::new(e, 0.0, 0.0, 1.0 / e); // z -> e z
        let circ_up = dil.compose(&dil).apply_line(&circ); // crosses at e^2 i... adjust
        let q2 = PlanePoint::new(0.0, math::exp(2.0));
        // segment [p, q2) with crossing exactly at q2 is excluded
        let got = cross_segment(&circ_up, &im, &p, &q2).unwrap();
        assert_eq!(got, None);
        // but [p, anything beyond) includes it
        let q3 = PlanePoint::new(0.0, math::exp(2.1));
        let (tau3, _) = cross_segment(&circ_up, &im, &p, &q3).unwrap().unwrap();
        assert!(approx(tau3, 2.0, 1e-12));
    }

    #[test]
    fn segment_distance_helper() {
        let im = GeodesicLine::from_endpoints(
            BoundaryPoint::from_real(0.0),
            BoundaryPoint::infinity(),
        );
        let w = im.pole();
        let p0 = PlanePoint::basepoint().vec();
        let t0 = MVec::tangent_at(&p0, &w);
        // point at (1, 1): foot is at s=~?; distance to the full line is asinh(1)
        let q = PlanePoint::new(1.0, 1.0).vec();
        let d_line = MVec::dist_to_line(&q, &w);
        assert!(approx(d_line, math::asinh(1.0), 1e-12));
        // segment far above the foot: nearest point is the lower endpoint
        let d_seg = MVec::dist_to_segment(&q, &w, &p0, &t0, 2.0, 3.0);
        let lower = PlanePoint::new(0.0, math::exp(2.0));
        assert!(approx(d_seg, lower.dist(&PlanePoint::new(1.0, 1.0)), 1e-12));
    }

    #[test]
    fn det_stays_normalized_under_long_products() {
        // Determinant measurement in f64 carries absolute noise of order
        // cosh(d)·ε for an element of displacement d, so the 1e-8 bound is
        // asserted through the working envelope (d ≤ 25) and the drift must
        // stay relatively bounded beyond it.
        let a = Isometry::new(2.0, 1.0, 1.0, 1.0);
        let b = Isometry::new(1.0, 0.0, 1.0, 1.0);
        let c = a.inverse();
        let seq = [&a, &b, &a, &c, &b, &a, &b, &c];
        let mut acc = Isometry::identity();
        for k in 0..64 {
            acc = acc.compose(seq[k % seq.len()]);
            let drift = math::abs(acc.det() - 1.0);
            let d = acc.displacement_origin();
            if d <= 25.0 {
                assert!(drift <= 1e-8, "det drift {drift} at displacement {d}");
            }
            assert!(drift <= 1e-8 * math::cosh(d).max(1.0));
        }
    }
}
