//! Band/gap structure of the spectrum from a sweep of the Floquet fiber
//! over the unit circle.
//!
//! Sorted eigenvalue branches are continuous in the phase even through
//! crossings, so the range of each branch is an interval and the union of
//! those ranges is the spectrum. The grid extrema are sharpened by a
//! golden-section search on the bracketing cell, which removes the
//! O(1/samples^2) grid bias.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floquet::{floquet_eigenvalues, floquet_eigenvalues_general};
use crate::operator::{BlockJacobiOperator, GeneralBlockJacobi};
use crate::scalar::{unit_circle, Scalar};

/// Minimum admissible sample count for a band sweep.
pub const MIN_SAMPLES: usize = 16;

/// Sorted disjoint closed bands with the open gaps between them.
#[derive(Debug, Clone)]
pub struct BandStructure<T: Scalar> {
    pub bands: Vec<(T, T)>,
    pub gaps: Vec<(T, T)>,
    pub sample_count: usize,
}

impl<T: Scalar> BandStructure<T> {
    pub fn band_count(&self) -> usize {
        self.bands.len()
    }

    /// Leftmost and rightmost spectrum endpoints.
    pub fn extent(&self) -> (T, T) {
        (
            self.bands.first().map(|b| b.0).unwrap_or(T::zero()),
            self.bands.last().map(|b| b.1).unwrap_or(T::zero()),
        )
    }

    /// Whether `z` lies in some closed band, within `slack`.
    pub fn contains(&self, z: T, slack: T) -> bool {
        self.bands
            .iter()
            .any(|&(lo, hi)| z >= lo - slack && z <= hi + slack)
    }

    pub fn summary(&self) -> BandSummary {
        let pair = |&(a, b): &(T, T)| {
            [
                a.to_f64().unwrap_or(f64::NAN),
                b.to_f64().unwrap_or(f64::NAN),
            ]
        };
        BandSummary {
            band_count: self.bands.len(),
            bands: self.bands.iter().map(pair).collect(),
            gaps: self.gaps.iter().map(pair).collect(),
            sample_count: self.sample_count,
        }
    }
}

/// JSON form of the band summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandSummary {
    pub band_count: usize,
    pub bands: Vec<[f64; 2]>,
    pub gaps: Vec<[f64; 2]>,
    pub sample_count: usize,
}

/// Golden-section refinement of one branch extremum over the cell around
/// grid index `k0`; `sign = +1` sharpens a maximum, `-1` a minimum.
fn refine_extremum<T: Scalar>(
    eig_at: &dyn Fn(T) -> Result<Vec<T>>,
    branch: usize,
    k0: usize,
    samples: usize,
    grid_value: T,
    sign: T,
) -> Result<T> {
    let two_pi = T::PI() + T::PI();
    let h = two_pi / T::of(samples as f64);
    let x0 = h * T::of(k0 as f64);
    let mut lo = x0 - h;
    let mut hi = x0 + h;
    let ratio = T::of(0.618_033_988_749_894_9);
    let f = |x: T| -> Result<T> { Ok(sign * eig_at(x)?[branch]) };
    let mut best = sign * grid_value;
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..20 {
        best = best.max(fc).max(fd);
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d)?;
        }
    }
    best = best.max(fc).max(fd);
    Ok(sign * best)
}

/// Band structure with the default merge tolerance,
/// `1e-9 * max(1, sampled spectral radius)` (epsilon-scaled for narrower
/// scalars).
pub fn band_structure<T: Scalar>(
    j: &BlockJacobiOperator<T>,
    samples: usize,
) -> Result<BandStructure<T>> {
    band_structure_opts(j, samples, None)
}

pub fn band_structure_opts<T: Scalar>(
    j: &BlockJacobiOperator<T>,
    samples: usize,
    merge_tol: Option<T>,
) -> Result<BandStructure<T>> {
    let eig_at = |x: T| floquet_eigenvalues(j, unit_circle(x));
    band_structure_from_fiber(&eig_at, samples, merge_tol)
}

/// Band structure of an operator with invertible (not necessarily
/// positive) off-diagonal blocks, through the general fiber.
pub fn general_band_structure<T: Scalar>(
    g: &GeneralBlockJacobi<T>,
    samples: usize,
) -> Result<BandStructure<T>> {
    let eig_at = |x: T| floquet_eigenvalues_general(g, unit_circle(x));
    band_structure_from_fiber(&eig_at, samples, None)
}

fn band_structure_from_fiber<T: Scalar>(
    eig_at: &dyn Fn(T) -> Result<Vec<T>>,
    samples: usize,
    merge_tol: Option<T>,
) -> Result<BandStructure<T>> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidResolution {
            got: samples,
            min: MIN_SAMPLES,
        });
    }
    let two_pi = T::PI() + T::PI();
    let h = two_pi / T::of(samples as f64);
    let grid: Vec<Vec<T>> = (0..samples)
        .map(|k| eig_at(h * T::of(k as f64)))
        .collect::<Result<_>>()?;
    let n = grid[0].len();

    let mut radius = T::zero();
    for row in &grid {
        for v in row {
            radius = radius.max(v.abs());
        }
    }
    let tol = merge_tol
        .unwrap_or_else(|| T::of(1e-9).max(T::epsilon() * T::of(100.0)) * radius.max(T::one()));

    let mut ranges: Vec<(T, T)> = Vec::with_capacity(n);
    for branch in 0..n {
        let mut kmin = 0;
        let mut kmax = 0;
        let mut vmin = grid[0][branch];
        let mut vmax = grid[0][branch];
        for (k, row) in grid.iter().enumerate() {
            let v = row[branch];
            if v < vmin {
                vmin = v;
                kmin = k;
            }
            if v > vmax {
                vmax = v;
                kmax = k;
            }
        }
        let lo = refine_extremum(eig_at, branch, kmin, samples, vmin, -T::one())?;
        let hi = refine_extremum(eig_at, branch, kmax, samples, vmax, T::one())?;
        ranges.push((lo, hi));
    }

    ranges.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut bands: Vec<(T, T)> = Vec::new();
    for (lo, hi) in ranges {
        match bands.last_mut() {
            Some(last) if lo <= last.1 + tol => {
                last.1 = last.1.max(hi);
            }
            _ => bands.push((lo, hi)),
        }
    }
    let gaps = bands
        .windows(2)
        .map(|w| (w[0].1, w[1].0))
        .collect();
    Ok(BandStructure {
        bands,
        gaps,
        sample_count: samples,
    })
}

/// Sorted eigenvalue branches on the phase grid `x_k = 2 pi k / samples`.
pub fn branch_grid<T: Scalar>(
    j: &BlockJacobiOperator<T>,
    samples: usize,
) -> Result<Vec<Vec<T>>> {
    let two_pi = T::PI() + T::PI();
    let h = two_pi / T::of(samples as f64);
    (0..samples)
        .map(|k| floquet_eigenvalues(j, unit_circle(h * T::of(k as f64))))
        .collect()
}

/// Phase grid values matching [`branch_grid`].
pub fn phase_grid<T: Scalar>(samples: usize) -> Vec<T> {
    let two_pi = T::PI() + T::PI();
    let h = two_pi / T::of(samples as f64);
    (0..samples).map(|k| h * T::of(k as f64)).collect()
}

/// CSV table of the branch sweep: header `x,lambda_1..lambda_n`, one row
/// per sample, LF line endings.
pub fn branch_csv<T: Scalar>(xs: &[T], rows: &[Vec<T>]) -> String {
    let n = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut out = String::from("x");
    for i in 1..=n {
        out.push_str(&format!(",lambda_{i}"));
    }
    out.push('\n');
    for (x, row) in xs.iter().zip(rows) {
        out.push_str(&format!("{x}"));
        for v in row {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

/// True iff both structures have the same band count and every endpoint
/// matches within `tol`.
pub fn spectrum_equal<T: Scalar>(
    b1: &BandStructure<T>,
    b2: &BandStructure<T>,
    tol: T,
) -> bool {
    b1.bands.len() == b2.bands.len()
        && b1
            .bands
            .iter()
            .zip(&b2.bands)
            .all(|(x, y)| (x.0 - y.0).abs() <= tol && (x.1 - y.1).abs() <= tol)
}

/// Single band symmetric about zero: the spectral fingerprint of the free
/// operator up to scaling.
pub fn is_single_symmetric_band<T: Scalar>(b: &BandStructure<T>, tol: T) -> bool {
    if b.bands.len() != 1 {
        return false;
    }
    let (lo, hi) = b.bands[0];
    (lo + hi).abs() <= tol
}
