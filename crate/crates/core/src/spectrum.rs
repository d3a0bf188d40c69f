//! Compactly supported piecewise-constant frequency-side functions.
//!
//! A `StepSpectrum` is a finite union of half-open intervals with exact
//! rational-multiple-of-pi endpoints; on each interval the function is
//! `value * exp(-i*modulation*xi)`. Interval algebra (dilation, translation,
//! refinement) is exact; only piece values and the modulation exponential are
//! floating point.

use num::complex::Complex64;
use num::{One, Signed, Zero};

use crate::error::Error;
use crate::rational::{integer_range, ratio_from_f64_exact, ratio_to_f64, Ratio, RationalPi};

/// One maximal interval of the support with its constant (modulated) value.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub left: RationalPi,
    pub right: RationalPi,
    pub value: Complex64,
    pub modulation: Ratio,
}

impl Segment {
    fn value_at(&self, x: &RationalPi) -> Complex64 {
        if self.modulation.is_zero() {
            self.value
        } else {
            let arg = -(ratio_to_f64(&self.modulation) * x.to_f64());
            self.value * Complex64::from_polar(1.0, arg)
        }
    }
}

/// A compactly supported step function of frequency. Canonical form: segments
/// sorted, pairwise disjoint, values nonzero, touching segments with equal
/// (value, modulation) merged. The function is 0 outside the segments.
#[derive(Clone, Debug, PartialEq)]
pub struct StepSpectrum {
    segments: Vec<Segment>,
}

impl StepSpectrum {
    pub fn zero() -> Self {
        StepSpectrum { segments: Vec::new() }
    }

    /// Builds the canonical spectrum from raw (left, right, value, modulation)
    /// pieces. Pieces may arrive unsorted; overlap of nonzero pieces is an
    /// error, zero pieces are dropped, touching equal pieces are merged.
    pub fn from_pieces(
        raw: Vec<(RationalPi, RationalPi, Complex64, Ratio)>,
    ) -> Result<Self, Error> {
        let mut segments = Vec::with_capacity(raw.len());
        for (left, right, value, modulation) in raw {
            if left >= right {
                return Err(Error::EmptyInterval {
                    left: left.to_string(),
                    right: right.to_string(),
                });
            }
            if value == Complex64::ZERO {
                continue;
            }
            segments.push(Segment {
                left,
                right,
                value,
                modulation,
            });
        }
        segments.sort_by(|a, b| a.left.cmp(&b.left));
        for pair in segments.windows(2) {
            if pair[1].left < pair[0].right {
                return Err(Error::OverlappingPieces {
                    left_a: pair[0].left.to_string(),
                    right_a: pair[0].right.to_string(),
                    left_b: pair[1].left.to_string(),
                    right_b: pair[1].right.to_string(),
                });
            }
        }
        Ok(StepSpectrum {
            segments: merge_touching(segments),
        })
    }

    /// Indicator of `[left, right)`.
    pub fn indicator(left: RationalPi, right: RationalPi) -> Self {
        StepSpectrum::from_pieces(vec![(left, right, Complex64::ONE, Ratio::zero())])
            .expect("indicator interval")
    }

    /// Indicator of `[-right, -left) ∪ [left, right)` for `0 <= left < right`.
    pub fn symmetric_indicator(left: RationalPi, right: RationalPi) -> Self {
        StepSpectrum::from_pieces(vec![
            (-&right, -&left, Complex64::ONE, Ratio::zero()),
            (left, right, Complex64::ONE, Ratio::zero()),
        ])
        .expect("symmetric indicator")
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_zero(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn is_modulation_free(&self) -> bool {
        self.segments.iter().all(|s| s.modulation.is_zero())
    }

    /// Point evaluation under the half-open convention.
    pub fn evaluate(&self, x: &RationalPi) -> Complex64 {
        let idx = self.segments.partition_point(|s| s.left <= *x);
        if idx == 0 {
            return Complex64::ZERO;
        }
        let seg = &self.segments[idx - 1];
        if *x < seg.right {
            seg.value_at(x)
        } else {
            Complex64::ZERO
        }
    }

    /// `xi -> self(c*xi)` for exact `c > 0`.
    pub fn dilate_arg(&self, c: &Ratio) -> Self {
        assert!(c.is_positive(), "dilation factor must be positive");
        let segments = self
            .segments
            .iter()
            .map(|s| Segment {
                left: s.left.unscale(c),
                right: s.right.unscale(c),
                value: s.value,
                modulation: &s.modulation * c,
            })
            .collect();
        StepSpectrum { segments }
    }

    /// `xi -> self(xi + a)`.
    pub fn translate_arg(&self, a: &RationalPi) -> Self {
        let segments = self
            .segments
            .iter()
            .map(|s| {
                let value = if s.modulation.is_zero() {
                    s.value
                } else {
                    let arg = -(ratio_to_f64(&s.modulation) * a.to_f64());
                    s.value * Complex64::from_polar(1.0, arg)
                };
                Segment {
                    left: &s.left - a,
                    right: &s.right - a,
                    value,
                    modulation: s.modulation.clone(),
                }
            })
            .collect();
        StepSpectrum { segments }
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        let segments = self
            .segments
            .iter()
            .map(|s| Segment {
                left: s.left.clone(),
                right: s.right.clone(),
                value: s.value.conj(),
                modulation: -&s.modulation,
            })
            .collect();
        StepSpectrum { segments }
    }

    fn combine_overlaps(
        &self,
        other: &StepSpectrum,
        combine: impl Fn(&Segment, &Segment) -> (Complex64, Ratio),
    ) -> StepSpectrum {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.segments.len() && j < other.segments.len() {
            let a = &self.segments[i];
            let b = &other.segments[j];
            let left = a.left.clone().max(b.left.clone());
            let right = a.right.clone().min(b.right.clone());
            if left < right {
                let (value, modulation) = combine(a, b);
                if value != Complex64::ZERO {
                    out.push(Segment {
                        left,
                        right,
                        value,
                        modulation,
                    });
                }
            }
            if a.right <= b.right {
                i += 1;
            } else {
                j += 1;
            }
        }
        StepSpectrum {
            segments: merge_touching(out),
        }
    }

    /// Pointwise `self * conj(other)`: values multiply, modulations subtract.
    pub fn pointwise_product_conj(&self, other: &StepSpectrum) -> Self {
        self.combine_overlaps(other, |a, b| {
            (a.value * b.value.conj(), &a.modulation - &b.modulation)
        })
    }

    /// Pointwise `self * other`: values multiply, modulations add.
    pub fn pointwise_product(&self, other: &StepSpectrum) -> Self {
        self.combine_overlaps(other, |a, b| {
            (a.value * b.value, &a.modulation + &b.modulation)
        })
    }

    /// `|self|^2`, always modulation-free.
    pub fn modulus_squared(&self) -> Self {
        let segments = self
            .segments
            .iter()
            .map(|s| Segment {
                left: s.left.clone(),
                right: s.right.clone(),
                value: Complex64::new(s.value.norm_sqr(), 0.0),
                modulation: Ratio::zero(),
            })
            .collect();
        StepSpectrum {
            segments: merge_touching(segments),
        }
    }

    /// Piecewise sum on the common refinement. Overlapping pieces whose
    /// modulations differ have no single-piece representation and are
    /// rejected; all modulation-free inputs always combine. Values cancelling
    /// exactly to 0 drop out, without any epsilon snapping.
    pub fn add(&self, other: &StepSpectrum) -> Result<Self, Error> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let mut points: Vec<RationalPi> = Vec::new();
        for s in self.segments.iter().chain(other.segments.iter()) {
            points.push(s.left.clone());
            points.push(s.right.clone());
        }
        points.sort();
        points.dedup();
        let mut out = Vec::new();
        for pair in points.windows(2) {
            let (left, right) = (&pair[0], &pair[1]);
            let a = self.segment_covering(left);
            let b = other.segment_covering(left);
            let piece = match (a, b) {
                (None, None) => None,
                (Some(s), None) | (None, Some(s)) => Some((s.value, s.modulation.clone())),
                (Some(s), Some(t)) => {
                    if s.modulation != t.modulation {
                        return Err(Error::IncompatibleModulations);
                    }
                    Some((s.value + t.value, s.modulation.clone()))
                }
            };
            if let Some((value, modulation)) = piece {
                if value != Complex64::ZERO {
                    out.push(Segment {
                        left: left.clone(),
                        right: right.clone(),
                        value,
                        modulation,
                    });
                }
            }
        }
        Ok(StepSpectrum {
            segments: merge_touching(out),
        })
    }

    /// Scales every value by `c`.
    pub fn scale(&self, c: Complex64) -> Self {
        if c == Complex64::ZERO {
            return StepSpectrum::zero();
        }
        let segments = self
            .segments
            .iter()
            .map(|s| Segment {
                left: s.left.clone(),
                right: s.right.clone(),
                value: s.value * c,
                modulation: s.modulation.clone(),
            })
            .collect();
        StepSpectrum {
            segments: merge_touching(segments),
        }
    }

    /// Multiplies by `exp(-i*omega*xi)`: adds `omega` to every modulation.
    pub fn modulate(&self, omega: &Ratio) -> Self {
        let segments = self
            .segments
            .iter()
            .map(|s| Segment {
                left: s.left.clone(),
                right: s.right.clone(),
                value: s.value,
                modulation: &s.modulation + omega,
            })
            .collect();
        StepSpectrum { segments }
    }

    /// Restriction to `[window.left, window.right)`.
    pub fn restrict(&self, window: &Window) -> Self {
        let mut out = Vec::new();
        for s in &self.segments {
            let left = s.left.clone().max(window.left.clone());
            let right = s.right.clone().min(window.right.clone());
            if left < right {
                out.push(Segment {
                    left,
                    right,
                    value: s.value,
                    modulation: s.modulation.clone(),
                });
            }
        }
        StepSpectrum { segments: out }
    }

    fn segment_covering(&self, x: &RationalPi) -> Option<&Segment> {
        let idx = self.segments.partition_point(|s| s.left <= *x);
        if idx == 0 {
            return None;
        }
        let seg = &self.segments[idx - 1];
        (*x < seg.right).then_some(seg)
    }

    /// Outer support radius: `max(|x_0|, |x_M|)` over the support hull, 0 for
    /// the zero spectrum.
    pub fn support_outer_radius(&self) -> RationalPi {
        match (self.segments.first(), self.segments.last()) {
            (Some(first), Some(last)) => first.left.abs().max(last.right.abs()),
            _ => RationalPi::zero(),
        }
    }

    /// Inner support radius: distance from 0 to the closed support, 0 when 0
    /// lies in it (and, by convention, for the zero spectrum).
    pub fn support_inner_radius(&self) -> RationalPi {
        let zero = RationalPi::zero();
        self.segments
            .iter()
            .map(|s| {
                if s.left <= zero && zero <= s.right {
                    RationalPi::zero()
                } else {
                    s.left.abs().min(s.right.abs())
                }
            })
            .min()
            .unwrap_or_else(RationalPi::zero)
    }

    /// All segment endpoints, sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<RationalPi> {
        let mut points: Vec<RationalPi> = Vec::with_capacity(2 * self.segments.len());
        for s in &self.segments {
            points.push(s.left.clone());
            points.push(s.right.clone());
        }
        points.sort();
        points.dedup();
        points
    }

    /// `(1/2pi) * integral |self|^2`, exact in rational support arithmetic
    /// (piece values enter through their exact dyadic squares).
    pub fn l2_norm_sq_exact(&self) -> Ratio {
        let two = Ratio::from_integer(2.into());
        let mut total = Ratio::zero();
        for s in &self.segments {
            let len = s.right.coefficient() - s.left.coefficient();
            total += ratio_from_f64_exact(s.value.norm_sqr()) * len / &two;
        }
        total
    }

    pub fn l2_norm_sq(&self) -> f64 {
        ratio_to_f64(&self.l2_norm_sq_exact())
    }

    /// Sums `self` over its 2*pi translates that meet `[-pi, pi)`.
    pub fn periodize(&self) -> Result<PeriodicStep, Error> {
        if !self.is_modulation_free() {
            return Err(Error::ModulatedInput);
        }
        let window = Window::fundamental();
        let mut acc = StepSpectrum::zero();
        for s in &self.segments {
            // [left + 2k*pi, right + 2k*pi) meets [-pi, pi) iff
            // left + 2k < 1 and right + 2k > -1 (pi-coefficients).
            let lo = (Ratio::from_integer((-1).into()) - s.right.coefficient())
                / Ratio::from_integer(2.into());
            let hi = (Ratio::one() - s.left.coefficient()) / Ratio::from_integer(2.into());
            for k in integer_range(&lo, &hi) {
                let shift = RationalPi::from_integer(2 * k);
                let piece = StepSpectrum {
                    segments: vec![Segment {
                        left: &s.left + &shift,
                        right: &s.right + &shift,
                        value: s.value,
                        modulation: Ratio::zero(),
                    }],
                }
                .restrict(&window);
                acc = acc.add(&piece)?;
            }
        }
        PeriodicStep::new(acc)
    }

    /// The set `{m : xi -> self(scale^m * xi) is nonzero somewhere on window}`,
    /// finite whenever the support stays away from 0 and the window away from
    /// both 0 and infinity. Exact interval intersections, no float.
    pub fn dilation_levels(&self, scale: u32, window: &Window) -> Result<Vec<i64>, Error> {
        if self.is_zero() {
            return Ok(Vec::new());
        }
        let zero = RationalPi::zero();
        if window.left <= zero && zero < window.right {
            return Err(Error::InvalidIndex {
                reason: "window must be bounded away from 0".into(),
            });
        }
        let inner = self.support_inner_radius();
        if inner.is_zero() {
            return Err(Error::ZeroInnerRadius);
        }
        let outer = self.support_outer_radius();
        let (win_min_abs, win_max_abs) = window.abs_bounds();
        let bounds = level_bounds(
            inner.coefficient(),
            outer.coefficient(),
            &win_min_abs,
            &win_max_abs,
            scale,
        );
        let Some(bounds) = bounds else {
            return Ok(Vec::new());
        };
        let n = Ratio::from_integer(scale.into());
        let mut out = Vec::new();
        for m in bounds {
            let factor = ratio_power(&n, m);
            // scale^m * window, kept in order (factor > 0).
            let lo = window.left.scale(&factor);
            let hi = window.right.scale(&factor);
            let hit = self
                .segments
                .iter()
                .any(|s| s.left < hi && lo < s.right);
            if hit {
                out.push(m);
            }
        }
        Ok(out)
    }
}

fn merge_touching(mut segments: Vec<Segment>) -> Vec<Segment> {
    segments.sort_by(|a, b| a.left.cmp(&b.left));
    let mut out: Vec<Segment> = Vec::with_capacity(segments.len());
    for seg in segments {
        if let Some(last) = out.last_mut() {
            if last.right == seg.left
                && last.value == seg.value
                && last.modulation == seg.modulation
            {
                last.right = seg.right;
                continue;
            }
        }
        out.push(seg);
    }
    out
}

/// Exact `base^exp` for integer (possibly negative) exponents.
pub fn ratio_power(base: &Ratio, exp: i64) -> Ratio {
    let mut acc = Ratio::one();
    if exp >= 0 {
        for _ in 0..exp {
            acc *= base;
        }
    } else {
        for _ in 0..(-exp) {
            acc /= base;
        }
    }
    acc
}

/// Largest `m` with `scale^m <= x` (requires `x > 0`).
pub fn floor_log(scale: u32, x: &Ratio) -> i64 {
    assert!(x.is_positive());
    let n = Ratio::from_integer(scale.into());
    let mut m: i64 = 0;
    let mut p = Ratio::one();
    if *x >= Ratio::one() {
        while &p * &n <= *x {
            p *= &n;
            m += 1;
        }
    } else {
        while p > *x {
            p /= &n;
            m -= 1;
        }
    }
    m
}

/// Smallest `m` with `scale^m >= x` (requires `x > 0`).
pub fn ceil_log(scale: u32, x: &Ratio) -> i64 {
    let f = floor_log(scale, x);
    let n = Ratio::from_integer(scale.into());
    if ratio_power(&n, f) == *x {
        f
    } else {
        f + 1
    }
}

/// The inclusive range of levels `m` with
/// `scale^m * [win_min, win_max] ∩ [inner, outer] != ∅`, i.e.
/// `scale^m * win_min <= outer` and `scale^m * win_max >= inner`.
/// `None` when empty. All bounds are pi-coefficients.
pub fn level_bounds(
    inner: &Ratio,
    outer: &Ratio,
    win_min: &Ratio,
    win_max: &Ratio,
    scale: u32,
) -> Option<std::ops::RangeInclusive<i64>> {
    if !outer.is_positive() || !win_max.is_positive() {
        return None;
    }
    assert!(win_min.is_positive(), "window must avoid 0");
    assert!(inner.is_positive(), "support must avoid 0");
    let hi = floor_log(scale, &(outer / win_min));
    let lo = ceil_log(scale, &(inner / win_max));
    (lo <= hi).then_some(lo..=hi)
}

/// A half-open window `[left, right)` on the frequency axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    pub left: RationalPi,
    pub right: RationalPi,
}

impl Window {
    pub fn new(left: RationalPi, right: RationalPi) -> Self {
        assert!(left < right, "window must be nonempty");
        Window { left, right }
    }

    /// The fundamental window `[-pi, pi)`.
    pub fn fundamental() -> Self {
        Window::new(RationalPi::from_integer(-1), RationalPi::pi())
    }

    pub fn contains(&self, x: &RationalPi) -> bool {
        self.left <= *x && *x < self.right
    }

    /// `(min |xi|, max |xi|)` over the closed window, as pi-coefficients.
    pub fn abs_bounds(&self) -> (Ratio, Ratio) {
        let zero = RationalPi::zero();
        let la = self.left.abs();
        let ra = self.right.abs();
        let max = la.clone().max(ra.clone());
        let min = if self.left <= zero && zero <= self.right {
            RationalPi::zero()
        } else {
            la.min(ra)
        };
        (min.coefficient().clone(), max.coefficient().clone())
    }
}

/// One cell of a common refinement, with its exact midpoint.
#[derive(Clone, Debug)]
pub struct Cell {
    pub left: RationalPi,
    pub right: RationalPi,
    pub mid: RationalPi,
}

impl Cell {
    fn new(left: RationalPi, right: RationalPi) -> Self {
        let mid = RationalPi::midpoint(&left, &right);
        Cell { left, right, mid }
    }
}

/// Partition of `window` by the given breakpoints. Midpoints never coincide
/// with any supplied breakpoint.
pub fn refine_from_breakpoints(mut points: Vec<RationalPi>, window: &Window) -> Vec<Cell> {
    points.retain(|p| window.left < *p && *p < window.right);
    points.push(window.left.clone());
    points.push(window.right.clone());
    points.sort();
    points.dedup();
    points
        .windows(2)
        .map(|pair| Cell::new(pair[0].clone(), pair[1].clone()))
        .collect()
}

/// Common refinement of `window` by the breakpoints of the given spectra.
pub fn common_refinement(spectra: &[&StepSpectrum], window: &Window) -> Vec<Cell> {
    let mut points = Vec::new();
    for s in spectra {
        points.extend(s.breakpoints());
    }
    refine_from_breakpoints(points, window)
}

/// At least `min_count` exact probe points: each refinement cell is split
/// uniformly and the sub-midpoints collected. Probe points never hit a cell
/// boundary.
pub fn subdivide_midpoints(cells: &[Cell], min_count: usize) -> Vec<RationalPi> {
    if cells.is_empty() {
        return Vec::new();
    }
    let per_cell = min_count.div_ceil(cells.len()).max(1);
    let mut out = Vec::with_capacity(cells.len() * per_cell);
    for cell in cells {
        let span = &cell.right - &cell.left;
        for t in 0..per_cell {
            let frac = Ratio::new((2 * t as i64 + 1).into(), (2 * per_cell as i64).into());
            out.push(&cell.left + &span.scale(&frac));
        }
    }
    out
}

/// The fixed rational offset used by grid mode to dodge breakpoints.
pub fn default_grid_offset() -> Ratio {
    Ratio::new(1.into(), 1024.into()) + Ratio::new(1.into(), 9973.into())
}

/// `count` equispaced points in `window`, each shifted by `offset` of a step.
pub fn grid_points(window: &Window, count: usize, offset: &Ratio) -> Vec<RationalPi> {
    assert!(count > 0);
    let span = &window.right - &window.left;
    (0..count)
        .map(|t| {
            let frac = (Ratio::from_integer((t as i64).into()) + offset)
                / Ratio::from_integer((count as i64).into());
            &window.left + &span.scale(&frac)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rp(n: i64, d: i64) -> RationalPi {
        RationalPi::new(n, d)
    }

    fn shannon() -> StepSpectrum {
        StepSpectrum::symmetric_indicator(RationalPi::pi(), rp(2, 1))
    }

    #[test]
    fn empty_input_is_zero_spectrum() {
        let s = StepSpectrum::from_pieces(vec![]).unwrap();
        assert!(s.is_zero());
        assert!(s.support_outer_radius().is_zero());
        assert!(s.support_inner_radius().is_zero());
    }

    #[test]
    fn shannon_support_radii() {
        let s = shannon();
        assert_eq!(s.support_outer_radius(), rp(2, 1));
        assert_eq!(s.support_inner_radius(), RationalPi::pi());
        assert_eq!(s.segments().len(), 2);
    }

    #[test]
    fn touching_equal_pieces_merge() {
        let s = StepSpectrum::from_pieces(vec![
            (RationalPi::zero(), RationalPi::pi(), Complex64::ONE, Ratio::zero()),
            (RationalPi::pi(), rp(2, 1), Complex64::ONE, Ratio::zero()),
        ])
        .unwrap();
        assert_eq!(s.segments().len(), 1);
        assert_eq!(s.segments()[0].left, RationalPi::zero());
        assert_eq!(s.segments()[0].right, rp(2, 1));
    }

    #[test]
    fn overlap_rejected() {
        let err = StepSpectrum::from_pieces(vec![
            (RationalPi::zero(), rp(2, 1), Complex64::ONE, Ratio::zero()),
            (RationalPi::pi(), rp(3, 1), Complex64::ONE, Ratio::zero()),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::OverlappingPieces { .. }));
    }

    #[test]
    fn evaluate_half_open() {
        let s = shannon();
        assert_eq!(s.evaluate(&rp(3, 2)), Complex64::ONE);
        assert_eq!(s.evaluate(&rp(2, 1)), Complex64::ZERO);
        assert_eq!(s.evaluate(&RationalPi::pi()), Complex64::ONE);
        assert_eq!(s.evaluate(&rp(-2, 1)), Complex64::ONE);
        assert_eq!(s.evaluate(&RationalPi::zero()), Complex64::ZERO);
    }

    #[test]
    fn evaluate_modulated_unit() {
        // value 1, modulation 1 at x = pi gives exp(-i*pi) = -1.
        let s = StepSpectrum::from_pieces(vec![(
            RationalPi::zero(),
            rp(2, 1),
            Complex64::ONE,
            Ratio::one(),
        )])
        .unwrap();
        let v = s.evaluate(&RationalPi::pi());
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn dilate_identity_and_halving() {
        let s = shannon();
        assert_eq!(s.dilate_arg(&Ratio::one()), s);
        let halved = s.dilate_arg(&Ratio::from_integer(2.into()));
        assert_eq!(halved.support_inner_radius(), rp(1, 2));
        assert_eq!(halved.support_outer_radius(), RationalPi::pi());
    }

    #[test]
    fn dilate_by_three_hits_oversampled_point() {
        let eta = shannon().dilate_arg(&Ratio::from_integer(3.into()));
        assert_eq!(eta.evaluate(&rp(1, 2)), Complex64::ONE);
        assert_eq!(eta.l2_norm_sq_exact(), Ratio::new(1.into(), 3.into()));
    }

    #[test]
    fn translate_round_trip() {
        let s = shannon();
        let a = rp(5, 3);
        assert_eq!(s.translate_arg(&a).translate_arg(&(-&a)), s);
    }

    #[test]
    fn product_conj_modulations_subtract() {
        let omega = Ratio::from_integer(2.into());
        let s = StepSpectrum::from_pieces(vec![(
            RationalPi::zero(),
            RationalPi::pi(),
            Complex64::ONE,
            omega.clone(),
        )])
        .unwrap();
        let p = s.pointwise_product_conj(&s);
        assert_eq!(p.segments().len(), 1);
        assert!(p.segments()[0].modulation.is_zero());
        assert_eq!(p.segments()[0].value, Complex64::ONE);
    }

    #[test]
    fn modulus_squared_of_shannon_is_indicator() {
        let m = shannon().modulus_squared();
        assert_eq!(m, shannon());
    }

    #[test]
    fn add_cancellation_gives_zero() {
        let s = shannon();
        let sum = s.add(&s.scale(Complex64::new(-1.0, 0.0))).unwrap();
        assert!(sum.is_zero());
    }

    #[test]
    fn periodize_shannon_modulus() {
        // [pi,2pi)-2pi = [-pi,0) and [-2pi,-pi)+2pi = [0,pi): constant 1.
        let p = shannon().modulus_squared().periodize().unwrap();
        let base = p.base();
        assert_eq!(base.segments().len(), 1);
        assert_eq!(base.segments()[0].left, RationalPi::from_integer(-1));
        assert_eq!(base.segments()[0].right, RationalPi::pi());
        assert_eq!(base.segments()[0].value, Complex64::ONE);
    }

    #[test]
    fn periodize_rejects_modulated() {
        let s = StepSpectrum::from_pieces(vec![(
            RationalPi::zero(),
            RationalPi::pi(),
            Complex64::ONE,
            Ratio::one(),
        )])
        .unwrap();
        assert!(matches!(s.periodize(), Err(Error::ModulatedInput)));
    }

    #[test]
    fn zero_periodizes_to_zero() {
        let p = StepSpectrum::zero().periodize().unwrap();
        assert!(p.base().is_zero());
    }

    #[test]
    fn refinement_basic() {
        let s = StepSpectrum::indicator(RationalPi::zero(), rp(2, 1));
        let cells = common_refinement(&[&s], &Window::fundamental());
        assert_eq!(cells.len(), 2);
        assert_eq!(cells[0].left, RationalPi::from_integer(-1));
        assert_eq!(cells[0].right, RationalPi::zero());
        assert_eq!(cells[1].left, RationalPi::zero());
        assert_eq!(cells[1].right, RationalPi::pi());
    }

    #[test]
    fn refinement_of_empty_list_is_single_cell() {
        let cells = common_refinement(&[], &Window::new(RationalPi::zero(), RationalPi::pi()));
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].mid, rp(1, 2));
    }

    #[test]
    fn shannon_dilates_leave_narrow_window_unrefined() {
        // Breakpoints pi*{1,2}/2^m for m in -2..=2 miss (pi/8, pi/4).
        let window = Window::new(rp(1, 8), rp(1, 4));
        let mut points = Vec::new();
        for m in -2i64..=2 {
            let factor = ratio_power(&Ratio::from_integer(2.into()), m);
            points.extend(shannon().dilate_arg(&factor).breakpoints());
        }
        let interior: Vec<_> = points
            .iter()
            .filter(|p| window.left < **p && **p < window.right)
            .collect();
        assert!(interior.is_empty());
        let cells = refine_from_breakpoints(points, &window);
        assert_eq!(cells.len(), 1);
    }

    #[test]
    fn norms() {
        assert_eq!(shannon().l2_norm_sq_exact(), Ratio::one());
        let chi = StepSpectrum::indicator(RationalPi::from_integer(-1), RationalPi::pi());
        assert_eq!(chi.l2_norm_sq_exact(), Ratio::one());
    }

    #[test]
    fn dilation_levels_exact_enumeration() {
        let s = shannon();
        // 2^m*[1/8, 1/4) meets the half-open support [1, 2) only for m = 3:
        // m = 2 touches at the left endpoint 1, m = 4 starts exactly at 2.
        let window = Window::new(rp(1, 8), rp(1, 4));
        let levels = s.dilation_levels(2, &window).unwrap();
        assert_eq!(levels, vec![3]);
        // A window in generic position fills the closed-annulus bound range.
        let generic = Window::new(rp(1, 7), rp(2, 7));
        let levels = s.dilation_levels(2, &generic).unwrap();
        assert_eq!(levels, vec![2, 3]);
    }

    #[test]
    fn dilation_levels_zero_inner_radius_rejected() {
        let s = StepSpectrum::indicator(RationalPi::zero(), RationalPi::pi());
        let window = Window::new(rp(1, 8), rp(1, 4));
        assert!(matches!(
            s.dilation_levels(2, &window),
            Err(Error::ZeroInnerRadius)
        ));
    }

    #[test]
    fn floor_and_ceil_logs() {
        let x = Ratio::new(8.into(), 1.into());
        assert_eq!(floor_log(2, &x), 3);
        assert_eq!(ceil_log(2, &x), 3);
        let y = Ratio::new(9.into(), 1.into());
        assert_eq!(floor_log(2, &y), 3);
        assert_eq!(ceil_log(2, &y), 4);
        let z = Ratio::new(1.into(), 3.into());
        assert_eq!(floor_log(2, &z), -2);
        assert_eq!(ceil_log(2, &z), -1);
    }

    #[test]
    fn grid_points_avoid_endpoints() {
        let window = Window::fundamental();
        let pts = grid_points(&window, 16, &default_grid_offset());
        assert_eq!(pts.len(), 16);
        for p in &pts {
            assert!(window.contains(p));
            assert!(*p != RationalPi::zero());
        }
    }
}

/// A step function on the fundamental window `[-pi, pi)`, understood as
/// extended 2*pi-periodically. Modulations must be zero.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicStep {
    base: StepSpectrum,
}

impl PeriodicStep {
    pub fn new(base: StepSpectrum) -> Result<Self, Error> {
        if !base.is_modulation_free() {
            return Err(Error::ModulatedInput);
        }
        let window = Window::fundamental();
        let ok = base
            .segments()
            .iter()
            .all(|s| s.left >= window.left && s.right <= window.right);
        if !ok {
            return Err(Error::ModeUnsupported {
                reason: "periodic step must live on [-pi, pi)".into(),
            });
        }
        Ok(PeriodicStep { base })
    }

    /// Constant function on the window.
    pub fn constant(value: Complex64) -> Self {
        let base = if value == Complex64::ZERO {
            StepSpectrum::zero()
        } else {
            StepSpectrum::indicator(RationalPi::from_integer(-1), RationalPi::pi()).scale(value)
        };
        PeriodicStep { base }
    }

    pub fn base(&self) -> &StepSpectrum {
        &self.base
    }

    /// Point evaluation of the periodic extension.
    pub fn evaluate_periodic(&self, x: &RationalPi) -> Complex64 {
        self.base.evaluate(&x.reduce_mod_2pi())
    }

    /// Materializes the periodic extension on an arbitrary window as a plain
    /// spectrum (finite union of shifted copies).
    pub fn materialize(&self, window: &Window) -> StepSpectrum {
        if self.base.is_zero() {
            return StepSpectrum::zero();
        }
        // Copies [-pi+2k*pi, pi+2k*pi) meeting [left, right).
        let lo = (window.left.coefficient() - Ratio::one()) / Ratio::from_integer(2.into());
        let hi = (window.right.coefficient() + Ratio::one()) / Ratio::from_integer(2.into());
        let mut acc = StepSpectrum::zero();
        for k in integer_range(&lo, &hi) {
            let shifted = self
                .base
                .translate_arg(&RationalPi::from_integer(-2 * k))
                .restrict(window);
            acc = acc.add(&shifted).expect("disjoint translates");
        }
        acc
    }

    pub fn add(&self, other: &PeriodicStep) -> Self {
        PeriodicStep {
            base: self.base.add(&other.base).expect("modulation-free"),
        }
    }
}
