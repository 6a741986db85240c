use std::path::Path;

use symsq::lfun::curves::{curve_for_level, normalized_coefficients};
use symsq::lfun::load_coefficients;

#[test]
fn bundled_tables_match_point_counts() {
    for level in [11u64, 17, 19] {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("data/level{level}.txt"));
        let t = load_coefficients(&path).unwrap();
        assert_eq!(t.level, level);
        t.validate().unwrap();
        let fresh = normalized_coefficients(&curve_for_level(level).unwrap(), t.n_max());
        let worst = (1..=t.n_max()).map(|n| (fresh[n] - t.lambda(n).unwrap()).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-14, "level {level}: {worst}");
    }
}
