//! Concrete Fuchsian surface presentations, marked simple closed curves, and
//! the combinatorics of cutting along them.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;
use crate::geom::{Isometry, IsometryClass, PlanePoint};
use crate::math;
use crate::word::{Letter, Relator, Word};

/// A closed hyperbolic surface given by a standard genus-g presentation with
/// explicit generator matrices.
#[derive(Clone, Debug)]
pub struct SurfacePresentation {
    pub genus: usize,
    /// Generator matrices in marking order a₁, b₁, …, a_g, b_g.
    pub generators: Vec<Isometry>,
    /// Per-letter matrices (generators interleaved with inverses), indexed
    /// by `Letter`.
    letter_matrices: Vec<Isometry>,
    /// The surface relator [a₁,b₁]⋯[a_g,b_g] with its matching tables.
    pub relator: Relator,
    /// Distance from the basepoint i within which every point of the plane
    /// has an orbit representative (circumradius of the fundamental domain).
    pub covering_radius: f64,
}

/// Tolerance for the relator-evaluates-to-identity check.
pub const RELATOR_TOL: f64 = 1e-8;

impl SurfacePresentation {
    /// Build from generator matrices, validating the relator and that every
    /// generator is hyperbolic.
    pub fn from_generators(
        generators: Vec<Isometry>,
        covering_radius: f64,
    ) -> Result<Self, Error> {
        if generators.len() % 2 != 0 || generators.len() < 4 {
            return Err(Error::ConstructionFailure);
        }
        let genus = generators.len() / 2;
        let mut letter_matrices = Vec::with_capacity(4 * genus);
        for g in &generators {
            letter_matrices.push(*g);
            letter_matrices.push(g.inverse());
        }
        let mut relator_letters = Vec::new();
        for h in 0..genus {
            // [a_h, b_h] = a b a⁻¹ b⁻¹
            relator_letters.push(Letter::new(2 * h, false));
            relator_letters.push(Letter::new(2 * h + 1, false));
            relator_letters.push(Letter::new(2 * h, true));
            relator_letters.push(Letter::new(2 * h + 1, true));
        }
        let relator_word = Word::from_letters(relator_letters);
        let surface = SurfacePresentation {
            genus,
            relator: Relator::new(&relator_word),
            generators,
            letter_matrices,
            covering_radius,
        };
        let rel_matrix = surface.word_matrix(&relator_word);
        if !rel_matrix.approx_eq(&Isometry::identity(), RELATOR_TOL) {
            return Err(Error::ConstructionFailure);
        }
        for g in &surface.generators {
            if g.classify() != IsometryClass::Hyperbolic {
                return Err(Error::ConstructionFailure);
            }
        }
        Ok(surface)
    }

    pub fn letter_matrix(&self, l: Letter) -> &Isometry {
        &self.letter_matrices[l.0 as usize]
    }

    pub fn letter_count(&self) -> usize {
        4 * self.genus
    }

    pub fn word_matrix(&self, w: &Word) -> Isometry {
        let mut m = Isometry::identity();
        for l in w.letters() {
            m = m.compose(self.letter_matrix(l));
        }
        m
    }

    /// Geodesic length of the free homotopy class of `w`.
    pub fn class_length(&self, w: &Word) -> Result<f64, Error> {
        self.word_matrix(&w.cyclic_reduced()).translation_length()
    }
}

/// Translation length of every Bolza side-pairing generator,
/// 2·arccosh(1+√2).
pub fn bolza_generator_length() -> f64 {
    2.0 * math::acosh(1.0 + math::sqrt(2.0))
}

/// The Bolza surface: quotient of the regular hyperbolic octagon (vertex
/// angle 2π/8) by its opposite-side pairing translations T₀..T₃, presented
/// on the systolic marking
///   a₁ = T₂, b₁ = T₀⁻¹, a₂ = T₀⁻¹T₁T₂⁻¹, b₂ = T₂T₀⁻¹T₃⁻¹,
/// for which [a₁,b₁][a₂,b₂] = 1 and all four generators are translations of
/// length 2·arccosh(1+√2). The octagon is centered at the basepoint i; its
/// circumradius arccosh(3+2√2) is the covering radius.
pub fn bolza_surface() -> Result<SurfacePresentation, Error> {
    let ell = bolza_generator_length();
    let t: Vec<Isometry> = (0..4)
        .map(|k| translation_through_i(core::f64::consts::PI / 4.0 * (k as f64 + 1.0), ell))
        .collect();
    let a1 = t[2];
    let b1 = t[0].inverse();
    let a2 = t[0].inverse().compose(&t[1]).compose(&t[2].inverse());
    let b2 = t[2].compose(&t[0].inverse()).compose(&t[3].inverse());
    let covering_radius = math::acosh(3.0 + 2.0 * math::sqrt(2.0));
    SurfacePresentation::from_generators(alloc::vec![a1, b1, a2, b2], covering_radius)
}

/// Hyperbolic translation of length `ell` along the geodesic through i whose
/// tangent there makes angle `phi` with the positive x-direction.
fn translation_through_i(phi: f64, ell: f64) -> Isometry {
    let rot = |ang: f64| {
        let (s, c) = (math::sin(ang / 2.0), math::cos(ang / 2.0));
        Isometry::new(c, s, -s, c)
    };
    let e = math::exp(ell / 2.0);
    let diag = Isometry::new(e, 0.0, 0.0, 1.0 / e);
    let half_pi = core::f64::consts::FRAC_PI_2;
    rot(phi - half_pi).compose(&diag).compose(&rot(half_pi - phi))
}

/// A marked simple closed geodesic, given by a word of the presentation.
#[derive(Clone, Debug)]
pub struct MarkedCurve {
    /// Index within the marked multicurve (0-based).
    pub index: usize,
    pub word: Word,
    pub separating: bool,
    /// Geodesic length, from the trace of the word matrix.
    pub length: f64,
}

/// The nonseparating shipped curve: the generator a_g. Cutting along it
/// leaves the surface connected (genus g−1 with two boundary circles).
pub fn curve_nonseparating(s: &SurfacePresentation) -> MarkedCurve {
    let word = Word::from_letters([Letter::new(2 * (s.genus - 1), false)]);
    let length = s.class_length(&word).expect("generator must be hyperbolic");
    MarkedCurve { index: 0, word, separating: false, length }
}

/// The separating shipped curve: the commutator [a₁,b₁], splitting off a
/// one-holed torus on each side (genus 2).
pub fn curve_separating(s: &SurfacePresentation) -> MarkedCurve {
    let word = Word::parse("a1b1A1B1").unwrap();
    let length = s.class_length(&word).expect("separating curve must be hyperbolic");
    MarkedCurve { index: 0, word, separating: true, length }
}

/// One connected component of the cut surface.
#[derive(Clone, Debug)]
pub struct Component {
    pub id: usize,
    /// Letters generating π₁ of the component inside π₁(Σ).
    pub letters: Vec<Letter>,
    /// Curve indices on the boundary of this component.
    pub boundary: Vec<usize>,
    /// Shared boundary curves (also bounding another component).
    pub shared: Vec<usize>,
    /// Unshared boundary curves (both sides on this component).
    pub unshared: Vec<usize>,
    /// Entropy of the open system, filled by the analysis stage.
    pub entropy: Option<f64>,
}

/// Decomposition of the surface along a marked multicurve.
#[derive(Clone, Debug)]
pub struct CutDecomposition {
    pub curves: Vec<MarkedCurve>,
    pub components: Vec<Component>,
}

/// Cut the surface along the marked curves. Exactly the shipped
/// configurations are constructed; anything else is
/// `UnsupportedConfiguration` (callers with bespoke multicurves must supply
/// their own decomposition).
pub fn cut(s: &SurfacePresentation, curves: &[MarkedCurve]) -> Result<CutDecomposition, Error> {
    if curves.len() != 1 {
        return Err(Error::UnsupportedConfiguration);
    }
    let curve = curves[0].clone();
    let nonsep_word = Word::from_letters([Letter::new(2 * (s.genus - 1), false)]);
    if !curve.separating && curve.word == nonsep_word && s.genus == 2 {
        // cutting along a₂: one component, free on {a₁, b₁, a₂}
        let letters = alloc::vec![
            Letter::new(0, false),
            Letter::new(0, true),
            Letter::new(1, false),
            Letter::new(1, true),
            Letter::new(2, false),
            Letter::new(2, true),
        ];
        let comp = Component {
            id: 0,
            letters,
            boundary: alloc::vec![0],
            shared: Vec::new(),
            unshared: alloc::vec![0],
            entropy: None,
        };
        return Ok(CutDecomposition { curves: alloc::vec![curve], components: alloc::vec![comp] });
    }
    if curve.separating && curve.word == Word::parse("a1b1A1B1").unwrap() && s.genus == 2 {
        let torus = |id: usize, base: usize| Component {
            id,
            letters: alloc::vec![
                Letter::new(base, false),
                Letter::new(base, true),
                Letter::new(base + 1, false),
                Letter::new(base + 1, true),
            ],
            boundary: alloc::vec![0],
            shared: alloc::vec![0],
            unshared: Vec::new(),
            entropy: None,
        };
        return Ok(CutDecomposition {
            curves: alloc::vec![curve],
            components: alloc::vec![torus(0, 0), torus(1, 2)],
        });
    }
    Err(Error::UnsupportedConfiguration)
}

impl CutDecomposition {
    pub fn with_entropies(mut self, h: &[f64]) -> Self {
        for (c, &v) in self.components.iter_mut().zip(h) {
            c.entropy = Some(v);
        }
        self
    }

    /// Validate the defining invariant: every curve appears in exactly one
    /// or exactly two boundary sets; in two ⇒ shared on both, in one ⇒
    /// unshared there.
    pub fn validate(&self) -> Result<(), Error> {
        for i in 0..self.curves.len() {
            let holders: Vec<&Component> =
                self.components.iter().filter(|c| c.boundary.contains(&i)).collect();
            let ok = match holders.len() {
                1 => holders[0].unshared.contains(&i),
                2 => holders.iter().all(|c| c.shared.contains(&i)),
                _ => false,
            };
            if !ok {
                return Err(Error::ConstructionFailure);
            }
        }
        Ok(())
    }

    /// Per-component loads ⟨n, Σ_j⟩ = Σ_i n_i (1_shared/2 + 1_unshared) for
    /// an intersection vector n; `NotAdmissible` when no admissible path
    /// realizes n (for the shipped separating configuration: odd totals).
    pub fn loads(&self, n: &[u64]) -> Result<Vec<f64>, Error> {
        if n.len() != self.curves.len() {
            return Err(Error::NotAdmissible);
        }
        if !self.is_admissible(n) {
            return Err(Error::NotAdmissible);
        }
        Ok(self
            .components
            .iter()
            .map(|c| {
                n.iter()
                    .enumerate()
                    .map(|(i, &ni)| {
                        let s = if c.shared.contains(&i) { 0.5 } else { 0.0 };
                        let o = if c.unshared.contains(&i) { 1.0 } else { 0.0 };
                        ni as f64 * (s + o)
                    })
                    .sum()
            })
            .collect())
    }

    /// Is some admissible path compatible with the intersection vector n?
    pub fn is_admissible(&self, n: &[u64]) -> bool {
        if n.len() != self.curves.len() {
            return false;
        }
        // Shipped configurations: a load of a shared curve must be integral
        // per component (separating: even totals); unshared curves are free.
        for c in &self.components {
            let mut half_units = 0u64;
            for &i in &c.shared {
                half_units += n[i];
            }
            if half_units % 2 != 0 {
                return false;
            }
        }
        true
    }

    /// (h_n, d_n): h_n = max{h_j : ⟨n,Σ_j⟩ > 0} (all components when n = 0),
    /// d_n = Σ_{h_j = h_n} ⟨n,Σ_j⟩. Requires entropies to be filled.
    pub fn exponents(&self, n: &[u64]) -> Result<(f64, f64), Error> {
        let loads = self.loads(n)?;
        let hs: Vec<f64> = self
            .components
            .iter()
            .map(|c| c.entropy.ok_or(Error::InsufficientData))
            .collect::<Result<_, _>>()?;
        let positive: Vec<usize> = (0..hs.len()).filter(|&j| loads[j] > 0.0).collect();
        let pool: Vec<usize> =
            if positive.is_empty() { (0..hs.len()).collect() } else { positive };
        let h_n = pool.iter().map(|&j| hs[j]).fold(f64::MIN, f64::max);
        let d_n: f64 = (0..hs.len())
            .filter(|&j| math::abs(hs[j] - h_n) < 1e-9)
            .map(|j| loads[j])
            .sum();
        Ok((h_n, d_n))
    }
}

/// Identifier for the shipped marked-curve configurations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveConfig {
    Nonseparating,
    Separating,
}

impl CurveConfig {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "nonseparating" => Some(CurveConfig::Nonseparating),
            "separating" => Some(CurveConfig::Separating),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CurveConfig::Nonseparating => "nonseparating",
            CurveConfig::Separating => "separating",
        }
    }

    pub fn curve(&self, s: &SurfacePresentation) -> MarkedCurve {
        match self {
            CurveConfig::Nonseparating => curve_nonseparating(s),
            CurveConfig::Separating => curve_separating(s),
        }
    }
}

impl core::fmt::Display for CurveConfig {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Point on the hyperbolic plane used as the common basepoint (the octagon
/// center for the Bolza model).
pub fn basepoint() -> PlanePoint {
    PlanePoint::basepoint()
}

/// Parse a whitespace/comma separated list of eight matrix entries
/// (row-major 2x2 per generator) — the documented structured exchange format
/// for custom surfaces lives in the companion crate; this helper turns one
/// matrix row into an isometry.
pub fn isometry_from_entries(e: &[f64; 4]) -> Isometry {
    Isometry::new(e[0], e[1], e[2], e[3])
}

/// Human-readable summary line used by reports.
pub fn describe(s: &SurfacePresentation) -> String {
    use core::fmt::Write;
    let mut out = String::new();
    let _ = write!(out, "genus {} presentation, {} generators", s.genus, s.generators.len());
    out
}
