//! Grid-cut problems: specifications, decompositions into chain/frame
//! summands, an intensity-based weight model and a seeded generator.
//!
//! Cells are indexed with `x` fastest: `idx = x + nx (y + ny z)`.

mod format;
mod io;

pub use format::{parse_grid_spec, read_grid_spec, write_grid_spec};
pub use io::{header_path, read_pgm, read_raw_volume, read_volume, write_mask, write_pgm, write_raw_volume};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cut::CutFunction;
use crate::error::{check_len, Error, Result};
use crate::scalar::Scalar;
use crate::solvers::Decomposition;

/// Summand that carries the unary terms in every grid decomposition.
pub const UNARY_SUMMAND: usize = 0;

/// Synthetic weights are multiples of this, so sums of a few thousand of
/// them are exact in `f64`.
pub const QUANTUM: f64 = 1.0 / (1u64 << 20) as f64;

/// An undirected edge between neighbouring cells, `p < q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridEdge<T> {
    pub p: usize,
    pub q: usize,
    pub weight: T,
}

/// A 2D or 3D grid with pairwise weights and unary (modular) terms.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec<T> {
    dims: Vec<usize>,
    edges: Vec<GridEdge<T>>,
    unary: Vec<T>,
}

/// Grayscale image or volume, 8 bits per cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageVolume {
    pub dims: Vec<usize>,
    pub intensities: Vec<u8>,
}

impl ImageVolume {
    pub fn new(dims: Vec<usize>, intensities: Vec<u8>) -> Result<Self> {
        validate_dims(&dims)?;
        check_len(dims.iter().product(), intensities.len())?;
        Ok(ImageVolume { dims, intensities })
    }

    pub fn len(&self) -> usize {
        self.intensities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intensities.is_empty()
    }
}

fn validate_dims(dims: &[usize]) -> Result<()> {
    if dims.len() != 2 && dims.len() != 3 {
        return Err(Error::InvalidArgument(format!("grids have 2 or 3 dimensions, got {}", dims.len())));
    }
    if dims.contains(&0) {
        return Err(Error::InvalidArgument(format!("grid dimensions must be positive, got {dims:?}")));
    }
    Ok(())
}

/// `(nx, ny, nz)` with `nz = 1` for 2D grids.
fn extent(dims: &[usize]) -> (usize, usize, usize) {
    (dims[0], dims[1], dims.get(2).copied().unwrap_or(1))
}

/// Every neighbour pair of the grid, grouped by axis (x, y, z) and in cell
/// order within an axis.
pub fn grid_edges(dims: &[usize]) -> Vec<(usize, usize, usize)> {
    let (nx, ny, nz) = extent(dims);
    let mut out = Vec::new();
    for axis in 0..3 {
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    let p = x + nx * (y + ny * z);
                    let ok = match axis {
                        0 => x + 1 < nx,
                        1 => y + 1 < ny,
                        _ => z + 1 < nz,
                    };
                    if ok {
                        out.push((p, p + stride(dims, axis), axis));
                    }
                }
            }
        }
    }
    out
}

fn stride(dims: &[usize], axis: usize) -> usize {
    let (nx, ny, _) = extent(dims);
    match axis {
        0 => 1,
        1 => nx,
        _ => nx * ny,
    }
}

/// Number of neighbour pairs: `Σ_axis (n_axis - 1) Π_other n`.
pub fn edge_count(dims: &[usize]) -> usize {
    let (nx, ny, nz) = extent(dims);
    (nx - 1) * ny * nz + nx * (ny - 1) * nz + nx * ny * (nz - 1)
}

impl<T: Scalar> GridSpec<T> {
    /// Validates that every edge joins two neighbouring cells, appears once
    /// and has a finite nonnegative weight.
    pub fn new(dims: Vec<usize>, edges: Vec<GridEdge<T>>, unary: Vec<T>) -> Result<Self> {
        validate_dims(&dims)?;
        let n: usize = dims.iter().product();
        check_len(n, unary.len())?;
        if unary.iter().any(|u| !u.is_finite()) {
            return Err(Error::InvalidArgument("unary terms must be finite".into()));
        }
        let mut seen = std::collections::HashSet::new();
        let mut normalized = Vec::with_capacity(edges.len());
        for e in edges {
            let (p, q) = (e.p.min(e.q), e.p.max(e.q));
            if q >= n {
                return Err(Error::InvalidArgument(format!("edge ({}, {}) outside a grid of {n} cells", e.p, e.q)));
            }
            if axis_of(&dims, p, q).is_none() {
                return Err(Error::InvalidArgument(format!("cells {p} and {q} are not grid neighbours")));
            }
            if !(e.weight >= T::zero()) || !e.weight.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "edge weight must be finite and nonnegative, got {}",
                    e.weight
                )));
            }
            if !seen.insert((p, q)) {
                return Err(Error::InvalidArgument(format!("duplicate edge ({p}, {q})")));
            }
            normalized.push(GridEdge { p, q, weight: e.weight });
        }
        Ok(GridSpec { dims, edges: normalized, unary })
    }

    /// All neighbour pairs, with weight `lambda[axis]` (one value per axis,
    /// or a single value for all axes).
    pub fn uniform(dims: Vec<usize>, lambda: &[T], unary: Vec<T>) -> Result<Self> {
        validate_dims(&dims)?;
        let per_axis = axis_weights(lambda, dims.len())?;
        let edges = grid_edges(&dims).into_iter().map(|(p, q, a)| GridEdge { p, q, weight: per_axis[a] }).collect();
        GridSpec::new(dims, edges, unary)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn edges(&self) -> &[GridEdge<T>] {
        &self.edges
    }

    pub fn unary(&self) -> &[T] {
        &self.unary
    }

    pub fn len(&self) -> usize {
        self.unary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unary.is_empty()
    }

    /// True for two dimensions or a single z-slice.
    pub fn is_2d(&self) -> bool {
        self.dims.len() == 2 || self.dims[2] == 1
    }

    pub fn axis(&self, e: &GridEdge<T>) -> usize {
        axis_of(&self.dims, e.p, e.q).expect("validated on construction")
    }

    /// Σ weights + Σ |unary|, an upper bound on `max F - min F`.
    pub fn value_range(&self) -> T {
        self.edges.iter().map(|e| e.weight).sum::<T>() + self.unary.iter().map(|u| u.abs()).sum::<T>()
    }

    /// The whole grid cut as a single function.
    pub fn cut_function(&self) -> Result<CutFunction<T>> {
        let edges: Vec<(usize, usize, T)> = self.edges.iter().map(|e| (e.p, e.q, e.weight)).collect();
        Ok(CutFunction::undirected(self.len(), &edges, self.unary.clone())?.with_name("grid"))
    }

    /// One cut function per group of axes; the first group gets the unary.
    fn split(&self, groups: &[(&[usize], &str)]) -> Result<Decomposition<T>> {
        let n = self.len();
        let mut summands = Vec::with_capacity(groups.len());
        let mut used = 0;
        for (g, (axes, name)) in groups.iter().enumerate() {
            let edges: Vec<(usize, usize, T)> =
                self.edges.iter().filter(|e| axes.contains(&self.axis(e))).map(|e| (e.p, e.q, e.weight)).collect();
            used += edges.len();
            let modular = if g == UNARY_SUMMAND { self.unary.clone() } else { vec![T::zero(); n] };
            summands.push(CutFunction::undirected(n, &edges, modular)?.with_name(*name));
        }
        if used != self.edges.len() {
            return Err(Error::Consistency(format!("decomposition covers {used} of {} edges", self.edges.len())));
        }
        Decomposition::new(summands)
    }
}

fn axis_weights<T: Scalar>(lambda: &[T], ndims: usize) -> Result<Vec<T>> {
    match lambda.len() {
        1 => Ok(vec![lambda[0]; 3]),
        k if k == ndims => {
            let mut v = lambda.to_vec();
            v.resize(3, T::zero());
            Ok(v)
        }
        k => Err(Error::InvalidArgument(format!("expected 1 or {ndims} per-axis weights, got {k}"))),
    }
}

fn axis_of(dims: &[usize], p: usize, q: usize) -> Option<usize> {
    let (nx, ny, nz) = extent(dims);
    if q <= p || q >= nx * ny * nz {
        return None;
    }
    let coords = |i: usize| (i % nx, (i / nx) % ny, i / (nx * ny));
    let (a, b) = (coords(p), coords(q));
    if a.1 == b.1 && a.2 == b.2 && b.0 == a.0 + 1 {
        Some(0)
    } else if a.0 == b.0 && a.2 == b.2 && b.1 == a.1 + 1 {
        Some(1)
    } else if a.0 == b.0 && a.1 == b.1 && b.2 == a.2 + 1 {
        Some(2)
    } else {
        None
    }
}

/// `F_1` = row chains (x edges) + unary, `F_2` = column chains (y edges).
pub fn decompose_2d<T: Scalar>(spec: &GridSpec<T>) -> Result<Decomposition<T>> {
    if !spec.is_2d() {
        return Err(Error::InvalidArgument("decompose_2d needs a 2D grid".into()));
    }
    spec.split(&[(&[0], "horizontal"), (&[1], "vertical")])
}

/// `F_1` = one 2D grid per z-slice + unary, `F_2` = z chains.
pub fn decompose_3d_frames_chains<T: Scalar>(spec: &GridSpec<T>) -> Result<Decomposition<T>> {
    if spec.dims.len() != 3 {
        return Err(Error::InvalidArgument("decompose_3d_frames_chains needs a 3D grid".into()));
    }
    spec.split(&[(&[0, 1], "frames"), (&[2], "z-chains")])
}

/// One summand of chains per axis; unary on the x chains.
pub fn decompose_3d_chains<T: Scalar>(spec: &GridSpec<T>) -> Result<Decomposition<T>> {
    if spec.dims.len() != 3 {
        return Err(Error::InvalidArgument("decompose_3d_chains needs a 3D grid".into()));
    }
    spec.split(&[(&[0], "x-chains"), (&[1], "y-chains"), (&[2], "z-chains")])
}

/// Pairwise weight `λ exp(-(I_p - I_q)² / (2σ²))`; unary
/// `[(I - fg)² - (I - bg)²] / 255²`, negative for cells closer to the
/// foreground mean so the minimizer is the foreground.
pub fn weights_from_intensities<T: Scalar>(
    img: &ImageVolume,
    lambda: T,
    sigma: T,
    fg_mean: T,
    bg_mean: T,
) -> Result<GridSpec<T>> {
    weights_from_intensities_per_axis(img, &[lambda], sigma, fg_mean, bg_mean)
}

/// As [`weights_from_intensities`] with one `λ` per axis.
pub fn weights_from_intensities_per_axis<T: Scalar>(
    img: &ImageVolume,
    lambda: &[T],
    sigma: T,
    fg_mean: T,
    bg_mean: T,
) -> Result<GridSpec<T>> {
    if !(sigma > T::zero()) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    if lambda.iter().any(|l| !(*l >= T::zero()) || !l.is_finite()) {
        return Err(Error::InvalidArgument("lambda must be finite and nonnegative".into()));
    }
    let per_axis = axis_weights(lambda, img.dims.len())?;
    let intensity = |j: usize| T::from_u8(img.intensities[j]).expect("u8 fits");
    let two_sigma_sq = T::lit(2.0) * sigma * sigma;
    let edges = grid_edges(&img.dims)
        .into_iter()
        .map(|(p, q, a)| {
            let d = intensity(p) - intensity(q);
            GridEdge { p, q, weight: per_axis[a] * (-(d * d) / two_sigma_sq).exp() }
        })
        .collect();
    let scale = T::lit(255.0 * 255.0);
    let unary = (0..img.len())
        .map(|j| {
            let i = intensity(j);
            ((i - fg_mean) * (i - fg_mean) - (i - bg_mean) * (i - bg_mean)) / scale
        })
        .collect();
    GridSpec::new(img.dims.clone(), edges, unary)
}

fn quantize(x: f64) -> f64 {
    (x / QUANTUM).round() * QUANTUM
}

/// Seeded random grid: edge weights uniform in `weight_range`, unary terms
/// uniform in `unary_range`, both rounded to multiples of [`QUANTUM`].
pub fn synth_random_grid<T: Scalar>(
    dims: &[usize],
    weight_range: (f64, f64),
    unary_range: (f64, f64),
    seed: u64,
) -> Result<GridSpec<T>> {
    validate_dims(dims)?;
    for (lo, hi) in [weight_range, unary_range] {
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument(format!("invalid range ({lo}, {hi})")));
        }
    }
    if weight_range.0 < 0.0 {
        return Err(Error::InvalidArgument("edge weights must be nonnegative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |(lo, hi): (f64, f64)| -> T {
        let x: f64 = rng.gen();
        T::lit(quantize(lo + (hi - lo) * x).clamp(lo, hi))
    };
    let edges = grid_edges(dims).into_iter().map(|(p, q, _)| GridEdge { p, q, weight: draw(weight_range) }).collect();
    let n: usize = dims.iter().product();
    let unary = (0..n).map(|_| draw(unary_range)).collect();
    GridSpec::new(dims.to_vec(), edges, unary)
}

/// Default ranges used by the command-line generator.
pub const DEFAULT_WEIGHT_RANGE: (f64, f64) = (0.0, 1.0);
pub const DEFAULT_UNARY_RANGE: (f64, f64) = (-1.0, 1.0);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brute::is_submodular;
    use crate::oracle::SetFunctionOracle;
    use crate::set::Subset;

    #[test]
    fn grid2x2_split() {
        let spec: GridSpec<f64> = GridSpec::uniform(vec![2, 2], &[1.0], vec![0.0; 4]).unwrap();
        let d = decompose_2d(&spec).unwrap();
        let e1: Vec<(usize, usize)> =
            d.summand(0).arcs().iter().filter(|a| a.from < a.to).map(|a| (a.from, a.to)).collect();
        let e2: Vec<(usize, usize)> =
            d.summand(1).arcs().iter().filter(|a| a.from < a.to).map(|a| (a.from, a.to)).collect();
        assert_eq!(e1, vec![(0, 1), (2, 3)]);
        assert_eq!(e2, vec![(0, 2), (1, 3)]);
        let direct = spec.cut_function().unwrap();
        for mask in 0..16 {
            let a = Subset::from_mask(4, mask);
            assert_eq!(d.eval(&a), direct.eval(&a));
        }
    }

    #[test]
    fn single_row_has_empty_vertical_summand() {
        let spec: GridSpec<f64> = GridSpec::uniform(vec![5, 1], &[1.0], vec![0.5; 5]).unwrap();
        let d = decompose_2d(&spec).unwrap();
        assert!(d.summand(1).arcs().is_empty());
        assert!(d.summand(1).modular_part().iter().all(|&m| m == 0.0));
    }

    #[test]
    fn center_cell_of_3x3() {
        let spec: GridSpec<f64> = GridSpec::uniform(vec![3, 3], &[1.0], vec![0.0; 9]).unwrap();
        let d = decompose_2d(&spec).unwrap();
        assert_eq!(d.eval(&Subset::from_indices(9, &[4]).unwrap()), 4.0);
    }

    #[test]
    fn edge_counts() {
        assert_eq!(edge_count(&[4, 3]), 17);
        assert_eq!(grid_edges(&[4, 3]).len(), 17);
        assert_eq!(edge_count(&[2, 2, 2]), 12);
        assert_eq!(edge_count(&[4, 3, 2]), grid_edges(&[4, 3, 2]).len());
        let spec: GridSpec<f64> = GridSpec::uniform(vec![2, 2, 2], &[1.0], vec![0.0; 8]).unwrap();
        let fc = decompose_3d_frames_chains(&spec).unwrap();
        assert_eq!(fc.summand(0).arcs().len() / 2, 8);
        assert_eq!(fc.summand(1).arcs().len() / 2, 4);
        let ch = decompose_3d_chains(&spec).unwrap();
        for i in 0..3 {
            assert_eq!(ch.summand(i).arcs().len() / 2, 4);
        }
    }

    #[test]
    fn thin_volume_is_a_chain() {
        let spec: GridSpec<f64> = GridSpec::uniform(vec![1, 1, 6], &[1.0], vec![0.0; 6]).unwrap();
        let fc = decompose_3d_frames_chains(&spec).unwrap();
        assert!(fc.summand(0).arcs().is_empty());
        assert_eq!(fc.summand(1).arcs().len(), 10);
        let ch = decompose_3d_chains(&spec).unwrap();
        assert!(ch.summand(0).arcs().is_empty() && ch.summand(1).arcs().is_empty());
    }

    #[test]
    fn random_3d_matches_direct_cut() {
        let spec: GridSpec<f64> = synth_random_grid(&[3, 3, 3], (0.0, 2.0), (-1.0, 1.0), 11).unwrap();
        let direct = spec.cut_function().unwrap();
        let fc = decompose_3d_frames_chains(&spec).unwrap();
        let ch = decompose_3d_chains(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let a = Subset::from_members((0..27).map(|_| rng.gen_bool(0.5)).collect());
            assert_eq!(fc.eval(&a), direct.eval(&a));
            assert_eq!(ch.eval(&a), direct.eval(&a));
        }
    }

    #[test]
    fn summands_are_submodular() {
        let spec: GridSpec<f64> = synth_random_grid(&[3, 4], (0.0, 1.0), (-1.0, 1.0), 5).unwrap();
        for f in decompose_2d(&spec).unwrap().summands() {
            assert!(is_submodular(f, 1e-12).unwrap());
        }
    }

    #[test]
    fn weight_model() {
        let img = ImageVolume::new(vec![2, 2], vec![100; 4]).unwrap();
        let spec: GridSpec<f64> = weights_from_intensities(&img, 2.0, 10.0, 200.0, 50.0).unwrap();
        assert!(spec.edges().iter().all(|e| e.weight == 2.0));
        assert!(spec.unary().iter().all(|&u| u == spec.unary()[0]));

        // (I_p - I_q)² = 2σ² ln 2 halves the weight
        let sigma = 20.0 / (2.0f64 * std::f64::consts::LN_2).sqrt();
        let img = ImageVolume::new(vec![2, 1], vec![100, 120]).unwrap();
        let spec: GridSpec<f64> = weights_from_intensities(&img, 3.0, sigma, 200.0, 50.0).unwrap();
        assert!((spec.edges()[0].weight - 1.5).abs() < 1e-12);
        // brighter cell is closer to the foreground mean
        assert!(spec.unary()[1] < spec.unary()[0]);
        assert!(weights_from_intensities::<f64>(&img, 1.0, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn generator_is_deterministic() {
        let a: GridSpec<f64> = synth_random_grid(&[4, 3], (0.0, 1.0), (-1.0, 1.0), 7).unwrap();
        let b: GridSpec<f64> = synth_random_grid(&[4, 3], (0.0, 1.0), (-1.0, 1.0), 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 12);
        assert_eq!(a.edges().len(), 17);
        assert!(a.unary().iter().chain(a.edges().iter().map(|e| &e.weight)).all(|&x| (x / QUANTUM).fract() == 0.0));
        let z: GridSpec<f64> = synth_random_grid(&[4, 3], (0.0, 0.0), (-1.0, 1.0), 7).unwrap();
        assert!(z.edges().iter().all(|e| e.weight == 0.0));
    }

    #[test]
    fn rejects_non_neighbours() {
        let bad = GridSpec::<f64>::new(vec![3, 3], vec![GridEdge { p: 0, q: 4, weight: 1.0 }], vec![0.0; 9]);
        assert!(bad.is_err());
        let wrap = GridSpec::<f64>::new(vec![3, 3], vec![GridEdge { p: 2, q: 3, weight: 1.0 }], vec![0.0; 9]);
        assert!(wrap.is_err());
        let dup = GridSpec::<f64>::new(
            vec![3, 3],
            vec![GridEdge { p: 0, q: 1, weight: 1.0 }, GridEdge { p: 1, q: 0, weight: 1.0 }],
            vec![0.0; 9],
        );
        assert!(dup.is_err());
    }
}
