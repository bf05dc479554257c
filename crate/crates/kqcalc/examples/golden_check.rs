fn main() {
    for set in ["coeff-KQZ", "kgl-Z", "coeff-KW", "finite-fields"] {
        match kqcalc::ktables::golden_verify(set) {
            Ok(report) => {
                let m = report.mismatches();
                println!("{}: {} cells, {} mismatches", set, report.verdicts.len(), m.len());
                for (key, v) in m.iter().take(20) {
                    println!("  {:?}: {:?}", key, v);
                }
            }
            Err(e) => println!("{}: ERROR {}", set, e),
        }
    }
}
