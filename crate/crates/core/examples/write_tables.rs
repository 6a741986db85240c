//! Writes the bundled coefficient files under `data/`.

use std::path::Path;

use symsq::lfun::curves::{normalized_coefficients, CURVE_11A1, CURVE_17A1, CURVE_19A1};
use symsq::lfun::CoefficientTable;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    std::fs::create_dir_all(&dir)?;
    for (curve, label, n) in [(CURVE_11A1, "11.2.a.a", 32000), (CURVE_17A1, "17.2.a.a", 5000), (CURVE_19A1, "19.2.a.a", 5000)] {
        let level: u64 = label.split('.').next().unwrap().parse()?;
        let t = CoefficientTable::new(level, 2, label, normalized_coefficients(&curve, n))?;
        t.validate()?;
        let path = dir.join(format!("level{level}.txt"));
        std::fs::write(&path, t.to_text())?;
        println!("{} ({n} coefficients)", path.display());
    }
    Ok(())
}
