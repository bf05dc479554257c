use kqcalc::coeffrings::CoefficientProfile;
use kqcalc::ssengine::{apply_first_differential, build_page1, certify_collapse};

fn main() {
    let z = CoefficientProfile::integers();
    for w in 0..4i64 {
        let p1 = build_page1(&z, w, (-9, 25), None).unwrap();
        let p2 = apply_first_differential(&p1).unwrap();
        let report = certify_collapse(&p2);
        println!("weight {}: certified={}", w, report.certified);
        for ((s, q), (ts, tq)) in report.unresolved.iter().take(14) {
            let src = p2.cell(*s, *q).map(|e| e.value.text()).unwrap_or_default();
            let tgt = p2.cell(*ts, *tq).map(|e| e.value.text()).unwrap_or_default();
            println!("  ({}, {}) [{}] -> ({}, {}) [{}]", s, q, src, ts, tq, tgt);
        }
    }
}
