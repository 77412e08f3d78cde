// dev-only timing probe; not part of the deliverable surface
use std::sync::Arc;
use std::time::Instant;

use qcanon_core::canon::CanonicalContext;
use qcanon_core::pbw::weights_up_to_height;
use qcanon_core::rootdata::RootDatum;
use qcanon_core::transition::TransitionEngine;

fn main() {
    let bound: i64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(4);
    let ty: String = std::env::args().nth(2).unwrap_or_else(|| "B2".into());
    let t0 = Instant::now();
    let datum = Arc::new(RootDatum::new(ty.parse().unwrap()).unwrap());
    let ctx = CanonicalContext::new(datum, bound).unwrap();
    println!("basis build: {:?}", t0.elapsed());

    let t1 = Instant::now();
    let mut nlabels = 0;
    for mu in weights_up_to_height(ctx.datum(), bound) {
        nlabels += ctx.slice(&mu).unwrap().len();
    }
    println!("slices ({} labels): {:?}", nlabels, t1.elapsed());

    let eng = TransitionEngine::new(&ctx);
    let basis = ctx.basis().clone();
    // phase probe: all dhat rows (b, i, p<=3) at in-bound labels
    let tp = Instant::now();
    for mu in weights_up_to_height(ctx.datum(), bound) {
        for b in ctx.labels_at(&mu).unwrap() {
            for i in 0..ctx.datum().rank() as u8 {
                for p in 0..=3u32 {
                    let _ = eng.dhat_row(&b, i, p).unwrap();
                }
            }
        }
    }
    println!("dhat rows in-bound: {:?}", tp.elapsed());
    let tp = Instant::now();
    let mut dsum = 0u32;
    for mu in weights_up_to_height(ctx.datum(), bound) {
        for b in ctx.labels_at(&mu).unwrap() {
            let (row, _) = eng.zeta_direct(&basis, &b).unwrap();
            dsum += row.len() as u32;
        }
    }
    println!("zeta_direct all ({dsum} entries): {:?}", tp.elapsed());
    let t2 = Instant::now();
    let mut rows = 0;
    let mut agree = true;
    for mu in weights_up_to_height(ctx.datum(), bound) {
        for b in ctx.labels_at(&mu).unwrap() {
            let row = eng.transition_row(&basis, &b).unwrap();
            agree &= row.all_agree;
            rows += 1;
        }
    }
    println!("transition rows ({rows}, all_agree={agree}): {:?}", t2.elapsed());
    let t3 = Instant::now();
    for mu in weights_up_to_height(ctx.datum(), bound) {
        for b in ctx.labels_at(&mu).unwrap() {
            let _ = eng.transition_row(&basis, &b).unwrap();
        }
    }
    println!("second pass (warm memos): {:?}", t3.elapsed());
    println!("validated entries (c, dhat): {:?}", eng.validation_counts());
    let ws = ctx.cached_slice_weights();
    let maxht = ws.iter().map(|w| -w.height()).max().unwrap_or(0);
    println!("slices cached: {} (max height {})", ws.len(), maxht);
    // fresh context: time each slice build at the weights the run needed
    let datum2 = Arc::new(RootDatum::new(ty.parse().unwrap()).unwrap());
    let ctx2 = CanonicalContext::new(datum2, bound).unwrap();
    let mut order = ws.clone();
    order.sort_by_key(|w| -w.height());
    for w in order {
        let t = Instant::now();
        let s = ctx2.slice(&w).unwrap();
        let dt = t.elapsed();
        if dt.as_millis() > 100 {
            println!("  slice {w} (ht {}, {} labels): {:?}", -w.height(), s.len(), dt);
        }
    }
}
// quick stats accessors used only while profiling
