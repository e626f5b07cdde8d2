//! `flyover metrics`: sliding-window Fréchet distances over an embedding
//! sequence against reference statistics, and per-frame MSE against ground
//! truth frames.

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use clap::Args;

use flyover_core::metrics::{mse, sliding_fid, WindowSpec};
use flyover_core::{io, Error};

use super::{frame_path, CliError};
use crate::config::{pick, FileConfig};

#[derive(Args, Debug)]
pub struct MetricsArgs {
    /// Embedding file: JSON header line {"n":..,"m":..} + float32 payload.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Reference statistics JSON {"mu": [...], "sigma": [[...]]}.
    #[arg(long, requires = "embeddings")]
    pub reference: Option<PathBuf>,
    /// Window width w (even).
    #[arg(long)]
    pub window: Option<usize>,
    /// Evaluate a single window centered at this frame instead of all valid
    /// centers.
    #[arg(long)]
    pub t: Option<usize>,
    /// Generated frames directory for MSE (frame_%05d.png).
    #[arg(long)]
    pub frames: Option<PathBuf>,
    /// Ground-truth frames directory for MSE.
    #[arg(long, requires = "frames")]
    pub gt: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (writes fid.csv and/or mse.csv).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: MetricsArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.config.as_deref())?;
    if args.embeddings.is_none() && args.gt.is_none() {
        return Err(CliError::Args(
            "nothing to do: pass --embeddings/--reference and/or --frames/--gt".into(),
        ));
    }
    fs::create_dir_all(&args.out).map_err(Error::from)?;

    if let Some(epath) = &args.embeddings {
        let reference_path = args
            .reference
            .as_ref()
            .ok_or_else(|| CliError::Args("--embeddings requires --reference".into()))?;
        let embeddings = io::read_embeddings(epath)?;
        let reference = io::read_stats(reference_path)?;
        let window = pick(&args.window, &file.window, 20);

        let mut rows = Vec::new();
        match args.t {
            Some(t) => {
                let spec = WindowSpec::new(window, t)?;
                rows.push((t, sliding_fid(&embeddings, &reference, &spec)?));
            }
            None => {
                // All centers whose window fits in the sequence.
                for t in 0..embeddings.len() {
                    let spec = WindowSpec::new(window, t)?;
                    let (lo, hi) = spec.bounds();
                    if lo < 0 || hi >= embeddings.len() as i64 {
                        continue;
                    }
                    rows.push((t, sliding_fid(&embeddings, &reference, &spec)?));
                }
            }
        }
        let mut csv = String::from("t,fid\n");
        for (t, fid) in rows {
            csv.push_str(&format!("{t},{fid}\n"));
        }
        let mut f = fs::File::create(args.out.join("fid.csv")).map_err(Error::from)?;
        f.write_all(csv.as_bytes()).map_err(Error::from)?;
    }

    if let Some(gt_dir) = &args.gt {
        let frames_dir = args.frames.as_ref().expect("clap enforces requires");
        let mut csv = String::from("frame,mse\n");
        let mut index = 0usize;
        loop {
            let fp = frame_path(frames_dir, index);
            let gp = frame_path(gt_dir, index);
            if !fp.exists() || !gp.exists() {
                break;
            }
            let a = io::read_rgb_png(&fp)?;
            let b = io::read_rgb_png(&gp)?;
            csv.push_str(&format!("{index},{}\n", mse(&a, &b)?));
            index += 1;
        }
        if index == 0 {
            return Err(CliError::Args("no overlapping frame files for MSE".into()));
        }
        let mut f = fs::File::create(args.out.join("mse.csv")).map_err(Error::from)?;
        f.write_all(csv.as_bytes()).map_err(Error::from)?;
    }
    Ok(())
}
