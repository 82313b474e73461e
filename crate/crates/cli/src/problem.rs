use anyhow::{bail, Context, Result};
use sfm_core::instances::{
    decompose_2d, decompose_3d_chains, decompose_3d_frames_chains, header_path, read_grid_spec, read_volume,
    synth_random_grid, weights_from_intensities, GridSpec, DEFAULT_UNARY_RANGE, DEFAULT_WEIGHT_RANGE,
};
use sfm_core::solvers::Decomposition;

use crate::config::{DecompositionKind, ProblemConfig, Source};

pub struct Problem {
    pub spec: GridSpec<f64>,
    pub decomposition: Decomposition<f64>,
    pub kind: DecompositionKind,
}

fn is_image(path: &std::path::Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")) || header_path(path).exists()
}

pub fn load_spec(cfg: &ProblemConfig, seed: u64) -> Result<GridSpec<f64>> {
    match &cfg.source {
        Source::Synthetic(dims) => Ok(synth_random_grid(dims, DEFAULT_WEIGHT_RANGE, DEFAULT_UNARY_RANGE, seed)?),
        Source::File(path) if is_image(path) => {
            let img = read_volume(path).with_context(|| format!("cannot read image {}", path.display()))?;
            let w = cfg.weights;
            Ok(weights_from_intensities(&img, w.lambda, w.sigma, w.fg, w.bg)?)
        }
        Source::File(path) => {
            read_grid_spec(path).with_context(|| format!("cannot read grid specification {}", path.display()))
        }
    }
}

pub fn load(cfg: &ProblemConfig, seed: u64) -> Result<Problem> {
    let spec = load_spec(cfg, seed)?;
    let three_d = spec.dims().len() == 3;
    let kind = match (cfg.decomposition, three_d) {
        (DecompositionKind::Auto, false) => DecompositionKind::Grid2d,
        (DecompositionKind::Auto, true) => DecompositionKind::FramesChains,
        (k, _) => k,
    };
    let decomposition = match kind {
        DecompositionKind::Grid2d if three_d && !spec.is_2d() => bail!("grid2d decomposition needs a 2D grid"),
        DecompositionKind::Grid2d => decompose_2d(&spec)?,
        DecompositionKind::FramesChains | DecompositionKind::Chains3 if !three_d => {
            bail!("{kind} decomposition needs a 3D grid")
        }
        DecompositionKind::FramesChains => decompose_3d_frames_chains(&spec)?,
        DecompositionKind::Chains3 => decompose_3d_chains(&spec)?,
        DecompositionKind::Auto => unreachable!("resolved above"),
    };
    Ok(Problem { spec, decomposition, kind })
}
