//! Orthogonal projections of the generation-`n` figure onto a line.
//!
//! Two engines compute the same interval set:
//!
//! * [`projection_set_recursive`] uses the self-similarity of the shared
//!   rotation model. At unit scale the level-`k` figure is `d` translated
//!   copies of the level-`(k-1)` figure shrunk by `1/d`, so
//!
//!   ```text
//!   R_0 = [-1, 1]
//!   R_k = ∪_j ( R_{k-1}/d + ((d-1)/d)·cos(2πj/d - ω_{n-k+1} - θ) )
//!   ```
//!
//!   Angles are consumed from the innermost level outward, so one pass over
//!   a word of length `n` yields every `L_k = |R_k|`.
//!
//! * [`projection_set_enumerated`] enumerates the `d^n` disks and unions
//!   their projected intervals. It works for every mode and serves as the
//!   oracle for the recursive engine.

use crate::error::{invalid, Error, Result};
use crate::fractal::{enumerate_disks, Disk, FractalSpec, RotationMode, RotationWord};
use crate::interval::{Interval, IntervalSet};
use crate::scalar::Real;
use crate::stats::NeumaierSum;

/// Which engine produced a projection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Recursive,
    Enumerated,
}

impl Engine {
    pub fn for_mode(mode: RotationMode) -> Engine {
        match mode {
            RotationMode::PerNode => Engine::Enumerated,
            _ => Engine::Recursive,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Engine::Recursive => "recursive",
            Engine::Enumerated => "enumerated",
        }
    }
}

/// `[⟨c, e_θ⟩ - r, ⟨c, e_θ⟩ + r]`.
pub fn project_disk<T: Real>(disk: &Disk<T>, theta: T) -> Interval<T> {
    let p = disk.cx * theta.cos() + disk.cy * theta.sin();
    Interval {
        lo: p - disk.r,
        hi: p + disk.r,
    }
}

/// Final projection set together with the level measures `L_1, …, L_n`.
#[derive(Clone, Debug)]
pub struct RecursiveProjection<T: Copy> {
    pub set: IntervalSet<T>,
    pub level_measures: Vec<T>,
}

/// Projection of the unit-scale figure via the translate-scale recursion.
///
/// Supports [`RotationMode::SharedRotation`] and
/// [`RotationMode::Deterministic`]; per-node words have no common
/// sub-figure and must go through [`projection_set_enumerated`].
pub fn projection_set_recursive<T: Real>(
    spec: &FractalSpec,
    word: &RotationWord<T>,
    theta: T,
    max_intervals: usize,
) -> Result<RecursiveProjection<T>> {
    recursive_pass(spec, word, theta, max_intervals, true)
}

/// Level measures `L_1, …, L_n` of the recursion without storing the final
/// set, which is the largest one.
pub fn projection_measures_recursive<T: Real>(
    spec: &FractalSpec,
    word: &RotationWord<T>,
    theta: T,
    max_intervals: usize,
) -> Result<Vec<T>> {
    Ok(recursive_pass(spec, word, theta, max_intervals, false)?.level_measures)
}

fn recursive_pass<T: Real>(
    spec: &FractalSpec,
    word: &RotationWord<T>,
    theta: T,
    max_intervals: usize,
    keep_last: bool,
) -> Result<RecursiveProjection<T>> {
    if spec.mode() == RotationMode::PerNode {
        return Err(Error::UnsupportedMode {
            op: "projection_set_recursive",
            mode: spec.mode(),
            hint: "use the enumerated engine for per-node words",
        });
    }
    crate::fractal::check_word(spec, word)?;
    if !theta.is_finite() {
        return Err(invalid("projection angle must be finite"));
    }
    let n = spec.generations() as usize;
    let d = spec.degree();
    let df = T::from_u32(d).unwrap();
    let scale = T::one() / df;
    let amp = (df - T::one()) / df;

    let mut current = IntervalSet::from_canonical(vec![Interval::new(-T::one(), T::one())]);
    let mut level_measures = Vec::with_capacity(n);
    let mut offsets = vec![T::zero(); d as usize];
    for k in 1..=n {
        let level = (n - k + 1) as u32;
        let omega = word.angle(spec, level, 0);
        for (j, off) in offsets.iter_mut().enumerate() {
            let phase = T::TAU() * T::from_usize_lossy(j) / df - omega - theta;
            *off = amp * phase.cos();
        }
        let keep = keep_last || k < n;
        let (next, measure) = union_of_translates(&current, scale, &offsets, max_intervals, keep)?;
        level_measures.push(measure);
        current = next;
    }
    Ok(RecursiveProjection {
        set: current,
        level_measures,
    })
}

/// `∪_j (scale·src + offsets[j])` and its measure.
///
/// Each translate is sorted, so the union is a `d`-way merge by left
/// endpoint with on-the-fly coalescing. With `keep == false` only the
/// measure is accumulated and nothing is stored.
fn union_of_translates<T: Real>(
    src: &IntervalSet<T>,
    scale: T,
    offsets: &[T],
    cap: usize,
    keep: bool,
) -> Result<(IntervalSet<T>, T)> {
    let ivs = src.intervals();
    let m = ivs.len();
    let copies = offsets.len();
    let mut pos = vec![0usize; copies];
    // left endpoint of each copy's next interval; +inf once exhausted
    let mut heads: Vec<T> = offsets
        .iter()
        .map(|&o| {
            if m > 0 {
                scale * ivs[0].lo + o
            } else {
                T::infinity()
            }
        })
        .collect();
    let mut out: Vec<Interval<T>> = if keep {
        Vec::with_capacity((m * copies).min(cap))
    } else {
        Vec::new()
    };
    let mut measure = NeumaierSum::new();
    let mut cur: Option<Interval<T>> = None;
    let overflow = || Error::ResourceLimit {
        what: "projection interval set",
        needed: cap as u128 + 1,
        cap,
    };

    loop {
        let mut c = 0;
        for i in 1..copies {
            if heads[i] < heads[c] {
                c = i;
            }
        }
        let lo = heads[c];
        if lo == T::infinity() {
            break;
        }
        let hi = scale * ivs[pos[c]].hi + offsets[c];
        pos[c] += 1;
        heads[c] = if pos[c] < m {
            scale * ivs[pos[c]].lo + offsets[c]
        } else {
            T::infinity()
        };
        match cur.as_mut() {
            Some(open) if lo <= open.hi => {
                if hi > open.hi {
                    open.hi = hi;
                }
            }
            _ => {
                if let Some(done) = cur.take() {
                    measure.add(done.hi - done.lo);
                    if keep {
                        if out.len() == cap {
                            return Err(overflow());
                        }
                        out.push(done);
                    }
                }
                cur = Some(Interval { lo, hi });
            }
        }
    }
    if let Some(done) = cur {
        measure.add(done.hi - done.lo);
        if keep {
            if out.len() == cap {
                return Err(overflow());
            }
            out.push(done);
        }
    }
    Ok((IntervalSet::from_canonical(out), measure.value()))
}

/// Union of the projections of all generation-`n` disks.
pub fn projection_set_enumerated<T: Real>(
    spec: &FractalSpec,
    word: &RotationWord<T>,
    theta: T,
    max_intervals: usize,
) -> Result<IntervalSet<T>> {
    let disks = enumerate_disks(spec, word, max_intervals)?;
    Ok(project_disks(&disks, theta))
}

pub fn project_disks<T: Real>(disks: &[Disk<T>], theta: T) -> IntervalSet<T> {
    let mut raw: Vec<Interval<T>> = disks.iter().map(|d| project_disk(d, theta)).collect();
    raw.sort_unstable_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap_or(std::cmp::Ordering::Equal));
    IntervalSet::from_sorted(raw)
}

/// Projection set with the engine suited to the spec's mode.
pub fn projection_set<T: Real>(
    spec: &FractalSpec,
    word: &RotationWord<T>,
    theta: T,
    max_intervals: usize,
) -> Result<IntervalSet<T>> {
    match Engine::for_mode(spec.mode()) {
        Engine::Recursive => Ok(projection_set_recursive(spec, word, theta, max_intervals)?.set),
        Engine::Enumerated => projection_set_enumerated(spec, word, theta, max_intervals),
    }
}

/// Parameters in `[lo, hi]` at which the union length of equal-width
/// moving intervals can have a kink.
///
/// Interval `i` is centred at `a_i cos t + b_i sin t` with half-width
/// `half_width`. The union length is smooth except where two endpoints
/// cross, i.e. where a centre difference equals `0` or `±2·half_width`.
pub fn endpoint_crossings<T: Real>(coeffs: &[(T, T)], half_width: T, lo: T, hi: T) -> Vec<T> {
    let two_pi = T::TAU();
    let mut out = Vec::new();
    for i in 0..coeffs.len() {
        for j in i + 1..coeffs.len() {
            let a = coeffs[i].0 - coeffs[j].0;
            let b = coeffs[i].1 - coeffs[j].1;
            let amp = a.hypot(b);
            if amp <= T::epsilon() {
                continue;
            }
            let phase = b.atan2(a);
            for target in [-half_width - half_width, T::zero(), half_width + half_width] {
                let ratio = target / amp;
                if ratio.abs() > T::one() {
                    continue;
                }
                let spread = ratio.acos();
                for base in [phase + spread, phase - spread] {
                    // all representatives of base + 2πm inside [lo, hi]
                    let mut t = base + ((lo - base) / two_pi).ceil() * two_pi;
                    while t <= hi {
                        if t > lo && t < hi {
                            out.push(t);
                        }
                        t = t + two_pi;
                    }
                }
            }
        }
    }
    out.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    out.dedup_by(|a, b| (*a - *b).abs() <= T::epsilon() * T::lit(16.0));
    out
}
