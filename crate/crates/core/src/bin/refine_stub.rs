//! Minimal external refiner speaking the file-exchange protocol; useful for
//! wiring tests and as a template for real integrations.
//!
//! Usage: refine-stub [--fail | --zero-disparity | --fill VALUE] <exchange_dir>
//!
//! Reads rgb.png, disparity.pfm and mask.png from the exchange directory and
//! writes refined.png and refined_disparity.pfm, filling masked-out pixels
//! with a constant (default 0.5 rgb, median disparity).

use std::path::PathBuf;
use std::process::ExitCode;

use flyover_core::io;

fn main() -> ExitCode {
    let mut args: Vec<String> = std::env::args().skip(1).collect();
    let mut fail = false;
    let mut zero_disparity = false;
    let mut fill = 0.5f64;
    let mut dir = None;
    while let Some(arg) = args.first().cloned() {
        args.remove(0);
        match arg.as_str() {
            "--fail" => fail = true,
            "--zero-disparity" => zero_disparity = true,
            "--fill" => {
                fill = args
                    .first()
                    .and_then(|v| v.parse().ok())
                    .expect("--fill needs a number");
                args.remove(0);
            }
            other => dir = Some(PathBuf::from(other)),
        }
    }
    let Some(dir) = dir else {
        eprintln!("usage: refine-stub [--fail | --zero-disparity | --fill VALUE] <exchange_dir>");
        return ExitCode::from(2);
    };
    if fail {
        eprintln!("refine-stub: failing on request");
        return ExitCode::from(1);
    }

    let run = || -> flyover_core::Result<()> {
        let mut rgb = io::read_rgb_png(&dir.join("rgb.png"))?;
        let mut disparity = io::read_pfm(&dir.join("disparity.pfm"))?;
        let mask = io::read_mask_png(&dir.join("mask.png"))?;

        let valid: Vec<f64> = disparity
            .iter()
            .zip(mask.data.iter())
            .filter(|(_, &m)| m == 1)
            .map(|(&d, _)| d)
            .collect();
        let mut fill_d = if valid.is_empty() {
            1.0
        } else {
            let mut v = valid.clone();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v[(v.len() - 1) / 2]
        };
        if zero_disparity {
            fill_d = 0.0;
            // Also zero one valid pixel's worth? No: contract checks all pixels.
        }

        for ((y, x), &m) in mask.data.indexed_iter() {
            if m == 0 {
                for c in 0..3 {
                    rgb[[y, x, c]] = fill;
                }
                disparity[[y, x]] = fill_d;
            }
        }
        if zero_disparity {
            // Violate the contract on purpose for tests.
            disparity[[0, 0]] = 0.0;
        }
        io::write_rgb_png(&dir.join("refined.png"), &rgb)?;
        io::write_pfm(&dir.join("refined_disparity.pfm"), &disparity)?;
        Ok(())
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("refine-stub: {e}");
            ExitCode::from(1)
        }
    }
}
