// focused probe on one high slice
use std::sync::Arc;
use std::time::Instant;
use qcanon_core::canon::solve_bar_invariant_basis;
use qcanon_core::pbw::{PbwBasis, PbwZero};
use qcanon_core::rootdata::{RootDatum, Weight};

fn main() {
    let datum = Arc::new(RootDatum::new("B2".parse().unwrap()).unwrap());
    let word = datum.reference_word().unwrap();
    let basis = PbwBasis::build(&datum, &word, 3).unwrap();
    let mu = Weight(vec![-6, -3]);
    let t = Instant::now();
    let cache = basis.weight_cache(&datum, &mu).unwrap();
    println!("weight cache ({} tuples): {:?}", cache.tuples.len(), t.elapsed());
    let t = Instant::now();
    let solved = solve_bar_invariant_basis(&datum, &basis, &mu).unwrap();
    println!("bar solve: {:?}", t.elapsed());
    let oracle = PbwZero { datum: &datum, basis: &basis };
    for (k, g) in solved.elements.iter().enumerate().take(3) {
        println!("element {k}: {} words", g.term_count());
        for i in 0..2u8 {
            let t = Instant::now();
            let parts = g.i_string_decompose_with(&datum, i, &oracle);
            println!("  decompose i={i}: {} parts {:?}", parts.len(), t.elapsed());
        }
        let s = g.star();
        for i in 0..2u8 {
            let t = Instant::now();
            let parts = s.i_string_decompose_with(&datum, i, &oracle);
            println!("  star decompose i={i}: {} parts {:?}", parts.len(), t.elapsed());
        }
    }
}
