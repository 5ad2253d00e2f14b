//! The iterated-similarity construction of the disk Cantor sets.
//!
//! A degree-`d` figure starts from the closed unit disk. Every disk of
//! generation `k - 1` is replaced by `d` disks of a `1/d` times smaller
//! radius, internally tangent to it and equally spaced around its boundary.
//! Level `k` rotates the placement of the children by an angle `ω_k`;
//! the rotation moves only the child centres, never the orientation of
//! the inner structure.
//!
//! The disk with digit string `(j_1, …, j_n)` has centre
//!
//! ```text
//! Σ_{k=1}^{n} (d-1)/d^k · exp(i(2πj_k/d - ω_k))
//! ```
//!
//! and radius `d^{-n}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Absolute tolerance for the tangency and disjointness checks.
pub const GEOMETRY_TOL: f64 = 1e-12;

/// How rotation angles are attached to the construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RotationMode {
    /// One angle per level, shared by every node of that level.
    SharedRotation,
    /// An independent angle for every node of the tree.
    PerNode,
    /// Every angle is zero.
    Deterministic,
}

impl fmt::Display for RotationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RotationMode::SharedRotation => "shared-rotation",
            RotationMode::PerNode => "per-node",
            RotationMode::Deterministic => "deterministic",
        })
    }
}

impl FromStr for RotationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "shared" | "shared-rotation" | "sharedrotation" => Ok(RotationMode::SharedRotation),
            "per-node" | "pernode" | "node" => Ok(RotationMode::PerNode),
            "deterministic" | "det" => Ok(RotationMode::Deterministic),
            other => Err(invalid(format!("unknown rotation mode `{other}`"))),
        }
    }
}

/// Degree, generation count and randomness mode of a figure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FractalSpec {
    degree: u32,
    generations: u32,
    mode: RotationMode,
}

impl FractalSpec {
    pub fn new(degree: u32, generations: u32, mode: RotationMode) -> Result<Self> {
        if degree < 3 {
            return Err(invalid(format!("degree must be at least 3, got {degree}")));
        }
        Ok(FractalSpec {
            degree,
            generations,
            mode,
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn generations(&self) -> u32 {
        self.generations
    }

    pub fn mode(&self) -> RotationMode {
        self.mode
    }

    /// Same degree and mode with a different generation count.
    pub fn with_generations(&self, generations: u32) -> Self {
        FractalSpec {
            generations,
            ..*self
        }
    }

    /// Upper end of the half-open angle range `[0, 2π/d)`.
    pub fn angle_range<T: Real>(&self) -> T {
        T::TAU() / T::from_u32(self.degree).unwrap()
    }

    /// `d^level`, or `None` on overflow.
    pub fn disks_at(&self, level: u32) -> Option<u128> {
        (self.degree as u128).checked_pow(level)
    }

    /// Number of stored angles a word for this spec must carry.
    pub fn word_len(&self) -> Option<usize> {
        match self.mode {
            RotationMode::SharedRotation | RotationMode::Deterministic => {
                Some(self.generations as usize)
            }
            RotationMode::PerNode => {
                let total = (0..self.generations)
                    .try_fold(0u128, |acc, k| acc.checked_add(self.disks_at(k)?))?;
                usize::try_from(total).ok()
            }
        }
    }
}

/// Breadth-first slot of a node in a per-node word.
///
/// Level `k` (1-based) holds the `d^{k-1}` nodes that are subdivided at
/// that level, in lexicographic order of their digit strings; the node
/// with digits `(j_1, …, j_{k-1})` has index `Σ j_i d^{k-1-i}` within the
/// level. Slots of level `k` start at `(d^{k-1} - 1)/(d - 1)`.
pub fn per_node_slot(degree: u32, level: u32, node: usize) -> usize {
    debug_assert!(level >= 1);
    let d = degree as usize;
    (d.pow(level - 1) - 1) / (d - 1) + node
}

/// The rotation angles of one realization.
///
/// For [`RotationMode::SharedRotation`] and [`RotationMode::Deterministic`]
/// the word holds `ω_1, …, ω_n` (outermost level first). For
/// [`RotationMode::PerNode`] it holds one angle per node in the order given
/// by [`per_node_slot`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RotationWord<T> {
    angles: Vec<T>,
}

impl<T: Real> RotationWord<T> {
    pub fn new(spec: &FractalSpec, angles: Vec<T>) -> Result<Self> {
        let expected = spec
            .word_len()
            .ok_or_else(|| invalid("rotation word length overflows usize"))?;
        if angles.len() != expected {
            return Err(invalid(format!(
                "rotation word has {} angles, {} mode with d={} n={} needs {expected}",
                angles.len(),
                spec.mode(),
                spec.degree(),
                spec.generations()
            )));
        }
        let range: T = spec.angle_range();
        if let Some((i, a)) = angles
            .iter()
            .enumerate()
            .find(|(_, a)| !(a.is_finite() && **a >= T::zero() && **a < range))
        {
            return Err(invalid(format!(
                "angle {i} = {a} is outside [0, 2π/{})",
                spec.degree()
            )));
        }
        Ok(RotationWord { angles })
    }

    /// The all-zero word.
    pub fn zeros(spec: &FractalSpec) -> Result<Self> {
        let len = spec
            .word_len()
            .ok_or_else(|| invalid("rotation word length overflows usize"))?;
        Ok(RotationWord {
            angles: vec![T::zero(); len],
        })
    }

    pub fn angles(&self) -> &[T] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Angle used when subdividing `node` at `level` (1-based).
    pub fn angle(&self, spec: &FractalSpec, level: u32, node: usize) -> T {
        match spec.mode() {
            RotationMode::Deterministic => T::zero(),
            RotationMode::SharedRotation => self.angles[level as usize - 1],
            RotationMode::PerNode => self.angles[per_node_slot(spec.degree(), level, node)],
        }
    }
}

/// A closed disk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disk<T> {
    pub cx: T,
    pub cy: T,
    pub r: T,
}

impl<T: Real> Disk<T> {
    pub fn unit() -> Self {
        Disk {
            cx: T::zero(),
            cy: T::zero(),
            r: T::one(),
        }
    }

    pub fn center_distance(&self, other: &Disk<T>) -> T {
        (self.cx - other.cx).hypot(self.cy - other.cy)
    }
}

/// Translation `((d-1)/d) e^{i(2πj/d - ω)}` of branch `j`.
pub fn branch_offset<T: Real>(degree: u32, j: u32, omega: T) -> (T, T) {
    let d = T::from_u32(degree).unwrap();
    let phase = T::TAU() * T::from_u32(j).unwrap() / d - omega;
    let scale = (d - T::one()) / d;
    (scale * phase.cos(), scale * phase.sin())
}

/// Image of `z` under the branch map `z ↦ z/d + ((d-1)/d) e^{i(2πj/d - ω)}`.
pub fn subdisk_map<T: Real>(degree: u32, j: u32, omega: T, z: (T, T)) -> Result<(T, T)> {
    if degree < 3 {
        return Err(invalid(format!("degree must be at least 3, got {degree}")));
    }
    if j >= degree {
        return Err(invalid(format!(
            "branch index {j} out of range 0..{degree}"
        )));
    }
    let range = T::TAU() / T::from_u32(degree).unwrap();
    if !(omega.is_finite() && omega >= T::zero() && omega < range) {
        return Err(invalid(format!("angle {omega} outside [0, 2π/{degree})")));
    }
    let d = T::from_u32(degree).unwrap();
    let (tx, ty) = branch_offset(degree, j, omega);
    Ok((z.0 / d + tx, z.1 / d + ty))
}

/// All `d^n` disks of generation `n`, in lexicographic digit order.
///
/// Fails with [`Error::ResourceLimit`] when `d^n` exceeds `max_disks`.
pub fn enumerate_disks<T: Real>(
    spec: &FractalSpec,
    word: &RotationWord<T>,
    max_disks: usize,
) -> Result<Vec<Disk<T>>> {
    enumerate_level(spec, word, spec.generations(), max_disks)
}

/// Disks of generation `level ≤ n`, built from the outer `level` angles.
pub fn enumerate_level<T: Real>(
    spec: &FractalSpec,
    word: &RotationWord<T>,
    level: u32,
    max_disks: usize,
) -> Result<Vec<Disk<T>>> {
    if level > spec.generations() {
        return Err(invalid(format!(
            "level {level} exceeds generation count {}",
            spec.generations()
        )));
    }
    check_word(spec, word)?;
    let needed = spec.disks_at(level).unwrap_or(u128::MAX);
    if needed > max_disks as u128 {
        return Err(Error::ResourceLimit {
            what: "disk enumeration",
            needed,
            cap: max_disks,
        });
    }

    let d = spec.degree();
    let df = T::from_u32(d).unwrap();
    let mut centers: Vec<(T, T)> = vec![(T::zero(), T::zero())];
    let mut radius = T::one();
    for k in 1..=level {
        radius = radius / df;
        let mut next = Vec::with_capacity(centers.len() * d as usize);
        for (node, &(cx, cy)) in centers.iter().enumerate() {
            let omega = word.angle(spec, k, node);
            for j in 0..d {
                let (ox, oy) = branch_offset(d, j, omega);
                // scale (d-1)/d^k = ((d-1)/d) · d^{-(k-1)}
                let s = radius * df;
                next.push((cx + s * ox, cy + s * oy));
            }
        }
        centers = next;
    }
    Ok(centers
        .into_iter()
        .map(|(cx, cy)| Disk { cx, cy, r: radius })
        .collect())
}

pub(crate) fn check_word<T: Real>(spec: &FractalSpec, word: &RotationWord<T>) -> Result<()> {
    let expected = spec
        .word_len()
        .ok_or_else(|| invalid("rotation word length overflows usize"))?;
    if word.len() != expected {
        return Err(invalid(format!(
            "rotation word has {} angles, spec needs {expected}",
            word.len()
        )));
    }
    Ok(())
}

/// Outcome of [`validate_geometry`].
#[derive(Clone, Debug, Default, Serialize)]
pub struct GeometryReport {
    pub parents: usize,
    pub children: usize,
    pub count_mismatch: bool,
    pub max_tangency_error: f64,
    pub tangency_failures: Vec<usize>,
    pub sibling_overlaps: Vec<(usize, usize)>,
    pub global_overlaps: Vec<(usize, usize)>,
    pub radius_failures: Vec<usize>,
}

impl GeometryReport {
    pub fn passed(&self) -> bool {
        !self.count_mismatch
            && self.tangency_failures.is_empty()
            && self.sibling_overlaps.is_empty()
            && self.global_overlaps.is_empty()
            && self.radius_failures.is_empty()
    }
}

/// Checks the tangency and disjointness promised by the construction.
///
/// `children[i]` must be a child of `parents[i / d]`, which holds for the
/// output of [`enumerate_level`] at consecutive levels.
pub fn validate_geometry<T: Real>(
    degree: u32,
    parents: &[Disk<T>],
    children: &[Disk<T>],
    tol: f64,
) -> GeometryReport {
    let d = degree as usize;
    let mut report = GeometryReport {
        parents: parents.len(),
        children: children.len(),
        ..Default::default()
    };
    if children.len() != parents.len() * d {
        report.count_mismatch = true;
        return report;
    }
    let tol_t = T::lit(tol);

    for (i, child) in children.iter().enumerate() {
        let parent = &parents[i / d];
        let err = (child.center_distance(parent) + child.r - parent.r).abs();
        report.max_tangency_error = report.max_tangency_error.max(err.to_f64_lossy());
        if err > tol_t {
            report.tangency_failures.push(i);
        }
        let expected_r = parent.r / T::from_u32(degree).unwrap();
        if (child.r - expected_r).abs() > tol_t {
            report.radius_failures.push(i);
        }
    }

    for group in 0..parents.len() {
        let base = group * d;
        for a in base..base + d {
            for b in a + 1..base + d {
                if overlapping(&children[a], &children[b], tol_t) {
                    report.sibling_overlaps.push((a, b));
                }
            }
        }
    }

    // Sweep over x to find any intersecting pair.
    let mut order: Vec<usize> = (0..children.len()).collect();
    order.sort_by(|&a, &b| {
        let ka = children[a].cx - children[a].r;
        let kb = children[b].cx - children[b].r;
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });
    for (pos, &a) in order.iter().enumerate() {
        let right = children[a].cx + children[a].r;
        for &b in &order[pos + 1..] {
            if children[b].cx - children[b].r > right + tol_t {
                break;
            }
            if overlapping(&children[a], &children[b], tol_t) {
                report.global_overlaps.push((a.min(b), a.max(b)));
            }
        }
    }
    report.global_overlaps.sort_unstable();
    report
}

fn overlapping<T: Real>(a: &Disk<T>, b: &Disk<T>, tol: T) -> bool {
    a.center_distance(b) + tol < a.r + b.r
}
