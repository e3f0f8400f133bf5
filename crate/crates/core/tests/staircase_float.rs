//! Staircase pair with exponential weights in floating point.

use mixed_mops::fixtures;
use mixed_mops::scalar::ratio;
use mixed_mops::verify::{self, Pipeline, SampleGrid};
use mixed_mops::{Error, Exec, Float};

fn at_twelve(setup: &mixed_mops::measures::ProblemSetup) -> SampleGrid {
    SampleGrid {
        points: vec![ratio(3, 10), ratio(7, 10)],
        pairs: vec![(ratio(3, 10), ratio(7, 10))],
        scales: vec![12],
        z: verify::SampleGrid::default_for(setup, 12).z,
    }
}

#[test]
fn pivot_floor_at_128_bits() {
    let f = fixtures::staircase_exponential();
    let e = Pipeline::<Float>::build(&f.setup, 18, 128, Exec::default()).err();
    assert_eq!(e, Some(Error::SingularMinor(10)));
}

#[test]
fn kernel_at_scale_twelve_with_256_bits() {
    let f = fixtures::staircase_exponential();
    let p = Pipeline::<Float>::build(&f.setup, 18, 256, Exec::default()).unwrap();
    let g = at_twelve(&f.setup);
    for o in [verify::check_cd_alternative(&p, &g).unwrap(), verify::check_cd_classical(&p, &g).unwrap()] {
        assert!(o.residual_f64 <= 1e-15, "{}: {}", o.check.name(), o.residual);
    }
    let o = verify::check_eigen(&p, &g).unwrap();
    assert!(o.residual_f64 <= 1e-15, "eigen: {}", o.residual);
}
