use geocensus_core::*;
use geocensus_core::surface::*;
use geocensus_core::intersect::*;
use geocensus_core::census::GeodesicClass;

fn main() {
    let s = bolza_surface().unwrap();
    let c = curve_nonseparating(&s);
    let sys = CurveSystem::new(&s, cut(&s, &[c]).unwrap()).unwrap();
    for w in ["a1b2a2a2", "a1b2A2", "a1b2a2"] {
        let word = s.relator.canonical_class(&Word::parse(w).unwrap());
        let length = s.word_matrix(&word).translation_length().unwrap();
        let class = GeodesicClass { root: word.clone(), word: word.clone(), length, primitive: true, power: 1, geometry: None };
        println!("== {w}: canonical {} ell {:.6}", word, length);
        match intersection_data(&s, &sys, &class, &IntersectParams::default()) {
            Ok(g) => {
                for c in &g.crossings {
                    println!("  pos {:.9} tau {:.9} theta {:.9} side {}", c.position, c.tau, c.theta, c.side);
                }
            }
            Err(e) => println!("  err {e}"),
        }
    }
}
