//! Sparse linear array geometry, difference coarray, steering matrices and
//! the direction-of-arrival ↔ spatial-frequency map.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fmath;
use crate::linalg::CMatrix;

/// Sensor positions (half-wavelength units) inside a virtual ULA of
/// `n_virtual` elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlaGeometry {
    omega: Vec<usize>,
    n_virtual: usize,
}

impl SlaGeometry {
    /// Validates strictly increasing positions, at least two sensors, and
    /// positions inside the virtual array. `n_virtual` defaults to
    /// `max(Ω) + 1`.
    pub fn new(omega: Vec<usize>, n_virtual: Option<usize>) -> Result<Self> {
        if omega.len() < 2 {
            return Err(Error::Geometry(format!(
                "need at least 2 sensors, got {}",
                omega.len()
            )));
        }
        if let Some(w) = omega.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Geometry(format!(
                "positions must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        let last = omega[omega.len() - 1];
        let n_virtual = n_virtual.unwrap_or(last + 1);
        if last >= n_virtual {
            return Err(Error::Geometry(format!(
                "position {last} outside a {n_virtual}-element virtual array"
            )));
        }
        Ok(Self { omega, n_virtual })
    }

    /// Parses a comma-separated position list such as `0,1,6,9,11,13`.
    pub fn parse(text: &str, n_virtual: Option<usize>) -> Result<Self> {
        let mut omega = Vec::new();
        for tok in text.split(',') {
            let tok = tok.trim();
            let pos = tok
                .parse::<usize>()
                .map_err(|_| Error::Geometry(format!("bad sensor position {tok:?}")))?;
            omega.push(pos);
        }
        Self::new(omega, n_virtual)
    }

    /// Six-sensor minimum redundancy array `{0,1,6,9,11,13}`.
    pub fn mra6() -> Self {
        Self::new([0, 1, 6, 9, 11, 13].to_vec(), None).expect("valid preset")
    }

    pub fn ula(n: usize) -> Result<Self> {
        Self::new((0..n).collect(), None)
    }

    /// Two-level nested array: a dense ULA of `n1` sensors followed by `n2`
    /// sensors spaced `n1 + 1` apart.
    pub fn nested(n1: usize, n2: usize) -> Result<Self> {
        let mut omega: Vec<usize> = (0..n1).collect();
        omega.extend((1..=n2).map(|k| k * (n1 + 1) - 1));
        omega.dedup();
        Self::new(omega, None)
    }

    /// Extended coprime array `{n·i : 0 ≤ i < 2m} ∪ {m·j : 0 ≤ j < n}` for
    /// coprime `m`, `n`.
    pub fn coprime(m: usize, n: usize) -> Result<Self> {
        if gcd(m, n) != 1 {
            return Err(Error::Geometry(format!("{m} and {n} are not coprime")));
        }
        let mut omega: Vec<usize> = (0..2 * m).map(|i| n * i).chain((0..n).map(|j| m * j)).collect();
        omega.sort_unstable();
        omega.dedup();
        Self::new(omega, None)
    }

    pub fn positions(&self) -> &[usize] {
        &self.omega
    }

    /// Number of physical sensors `N_S`.
    pub fn num_sensors(&self) -> usize {
        self.omega.len()
    }

    pub fn n_virtual(&self) -> usize {
        self.n_virtual
    }

    pub fn coarray(&self) -> Coarray {
        coarray(self)
    }

    /// Same geometry shifted by `offset` positions.
    pub fn translated(&self, offset: usize) -> Self {
        Self {
            omega: self.omega.iter().map(|&p| p + offset).collect(),
            n_virtual: self.n_virtual + offset,
        }
    }
}

impl fmt::Display for SlaGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", join(&self.omega))
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn join(xs: &[usize]) -> String {
    let mut s = String::new();
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&format!("{x}"));
    }
    s
}

/// Non-negative difference set of a geometry and its contiguous aperture.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coarray {
    /// Sorted, distinct lags `Ω_j − Ω_l ≥ 0`.
    pub differences: Vec<usize>,
    /// Largest `M` with `{0, …, M−1}` inside the difference set.
    pub m_contig: usize,
}

impl Coarray {
    pub fn contains(&self, lag: usize) -> bool {
        self.differences.binary_search(&lag).is_ok()
    }
}

pub fn coarray(geom: &SlaGeometry) -> Coarray {
    let omega = geom.positions();
    let mut differences: Vec<usize> = Vec::with_capacity(omega.len() * (omega.len() + 1) / 2);
    for (j, &hi) in omega.iter().enumerate() {
        for &lo in &omega[..=j] {
            differences.push(hi - lo);
        }
    }
    differences.sort_unstable();
    differences.dedup();
    let m_contig = differences
        .iter()
        .enumerate()
        .take_while(|&(i, &d)| i == d)
        .count();
    Coarray {
        differences,
        m_contig,
    }
}

/// Maps a frequency onto `[0, 1)`.
#[inline]
pub fn canonical_freq(f: f64) -> f64 {
    fmath::wrap_unit(f)
}

/// Matrix with `(j, k)` entry `exp(i·2π·indices[j]·freqs[k])`.
///
/// Frequencies are reduced mod 1 first; two that coincide after reduction
/// (within [`FREQ_COINCIDENCE_TOL`]) are rejected.
pub fn steering_matrix(indices: &[usize], freqs: &[f64]) -> Result<CMatrix> {
    let f: Vec<f64> = freqs.iter().map(|&x| canonical_freq(x)).collect();
    if let Some(dup) = first_duplicate(&f) {
        return Err(Error::Precondition(format!("duplicate frequency {dup}")));
    }
    if indices.is_empty() || f.is_empty() {
        return Err(Error::Dimension("steering matrix needs rows and columns".into()));
    }
    Ok(CMatrix::from_fn(indices.len(), f.len(), |j, k| {
        unit_phasor(indices[j] as f64 * f[k])
    }))
}

/// `exp(i·2π·x)` with the argument reduced mod 1 before the trig call.
#[inline]
pub fn unit_phasor(x: f64) -> Complex64 {
    let phase = 2.0 * PI * fmath::wrap_unit(x);
    Complex64::new(fmath::cos(phase), fmath::sin(phase))
}

/// Frequencies closer than this on the unit circle count as duplicates.
pub const FREQ_COINCIDENCE_TOL: f64 = 1e-12;

pub(crate) fn first_duplicate(f: &[f64]) -> Option<f64> {
    for (i, &a) in f.iter().enumerate() {
        let clash = f[i + 1..].iter().any(|&b| {
            let d = (a - b).abs();
            d.min(1.0 - d) <= FREQ_COINCIDENCE_TOL
        });
        if clash {
            return Some(a);
        }
    }
    None
}

/// `f = (½·sin θ) mod 1` for `θ ∈ [−90°, 90°)`.
pub fn doa_to_freq(theta_deg: f64) -> Result<f64> {
    if !(-90.0..90.0).contains(&theta_deg) {
        return Err(Error::Precondition(format!(
            "DOA {theta_deg}° outside [-90°, 90°)"
        )));
    }
    Ok(canonical_freq(0.5 * fmath::sin(theta_deg.to_radians())))
}

/// Inverse of [`doa_to_freq`]. Frequencies at or above ½ map to negative
/// angles, so `f = 0.5` lands exactly on −90°.
pub fn freq_to_doa(f: f64) -> f64 {
    let f = canonical_freq(f);
    let centered = if f < 0.5 { f } else { f - 1.0 };
    fmath::asin((2.0 * centered).clamp(-1.0, 1.0)).to_degrees()
}
