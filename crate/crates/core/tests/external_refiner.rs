//! Exercises the external-refiner file exchange protocol end to end against
//! the bundled refine-stub binary.

use flyover_core::refine::{External, Refiner};
use flyover_core::{synth, Error, Mask};

fn stub() -> String {
    env!("CARGO_BIN_EXE_refine-stub").to_string()
}

fn holed_inputs() -> (ndarray::Array3<f64>, flyover_core::DisparityMap, Mask) {
    let f = synth::constant_frame(12, 16, [0.25, 0.5, 0.75], 0.4);
    let mut rgb = f.rgb.clone();
    let mut d = f.disparity.clone();
    let mut mask = Mask::ones(12, 16);
    for y in 4..8 {
        for x in 5..11 {
            mask.data[[y, x]] = 0;
            d.data[[y, x]] = 0.0;
            for c in 0..3 {
                rgb[[y, x, c]] = 0.0;
            }
        }
    }
    (rgb, d, mask)
}

#[test]
fn stub_fills_holes_with_constant() {
    let (rgb, d, mask) = holed_inputs();
    let refiner = External::new(vec![stub()]);
    let (out_rgb, out_d) = refiner.refine(&rgb, &d, &mask).unwrap();
    for ((y, x), &m) in mask.data.indexed_iter() {
        if m == 0 {
            // The stub's 0.5 fill lands on the nearest u8 grid point.
            let fill = flyover_core::io::quantize_u8(0.5) as f64 / 255.0;
            for c in 0..3 {
                assert_eq!(out_rgb[[y, x, c]], fill, "hole filled with 0.5");
            }
            assert!(out_d.data[[y, x]] > 0.0);
        } else {
            // Valid pixels survive the u8/f32 exchange quantization exactly.
            for c in 0..3 {
                let expected = flyover_core::io::quantize_u8(rgb[[y, x, c]]) as f64 / 255.0;
                assert_eq!(out_rgb[[y, x, c]], expected);
            }
            assert_eq!(out_d.data[[y, x]], d.data[[y, x]] as f32 as f64);
        }
    }
}

#[test]
fn nonzero_exit_is_external_failure() {
    let (rgb, d, mask) = holed_inputs();
    let refiner = External::new(vec![stub(), "--fail".into()]);
    assert!(matches!(
        refiner.refine(&rgb, &d, &mask),
        Err(Error::ExternalFailure(_))
    ));
}

#[test]
fn zero_disparity_output_violates_the_contract() {
    let (rgb, d, mask) = holed_inputs();
    let refiner = External::new(vec![stub(), "--zero-disparity".into()]);
    assert!(matches!(
        refiner.refine(&rgb, &d, &mask),
        Err(Error::ContractViolation(_))
    ));
}

#[test]
fn missing_program_is_external_failure() {
    let (rgb, d, mask) = holed_inputs();
    let refiner = External::new(vec!["/nonexistent/refiner".into()]);
    assert!(matches!(
        refiner.refine(&rgb, &d, &mask),
        Err(Error::ExternalFailure(_))
    ));
}

#[test]
fn fixed_exchange_dir_is_reused() {
    let dir = tempfile::tempdir().unwrap();
    let (rgb, d, mask) = holed_inputs();
    let refiner = External {
        command: vec![stub()],
        strict: true,
        exchange_dir: Some(dir.path().join("xchg")),
    };
    refiner.refine(&rgb, &d, &mask).unwrap();
    assert!(dir.path().join("xchg/refined.png").exists());
    assert!(dir.path().join("xchg/rgb.png").exists());
}
