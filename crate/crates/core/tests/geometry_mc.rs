mod common;

use homlat::{rasterize_hashin, HashinGeometry, HashinPhase, Pattern, PatternMatrix, SymTensor4};
use rand::Rng;

#[test]
fn hashin_fractions_match_monte_carlo() {
    let geom = HashinGeometry::standard(SymTensor4::isotropic(2, 3.0, 0.3).unwrap()).unwrap();
    let pattern = Pattern::new(&PatternMatrix::diagonal(&[256, 256]).unwrap());
    let raster = rasterize_hashin(&pattern, &geom).unwrap().fractions(3);

    let mut rng = common::rng(2024);
    let samples = 1_000_000;
    let mut counts = [0usize; 3];
    for _ in 0..samples {
        let x = [rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)];
        counts[geom.phase_at(&x).index()] += 1;
    }
    for phase in [HashinPhase::Core, HashinPhase::Coating, HashinPhase::Matrix] {
        let mc = counts[phase.index()] as f64 / samples as f64;
        let raster = raster[phase.index()];
        // within one percentage point of area
        assert!((mc - raster).abs() <= 0.01, "{phase:?}: raster {raster}, monte carlo {mc}");
    }
    // the core is an ellipse of area pi c1 c2
    let exact = std::f64::consts::PI * geom.c1 * geom.c2;
    assert!((raster[0] - exact).abs() / exact < 0.01);
}
