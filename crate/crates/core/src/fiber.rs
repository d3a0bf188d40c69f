//! Fibers: finitely supported doubly-indexed vectors, the pointwise values of
//! the fiberization map, and the generator families derived from a vector
//! function.

use std::collections::BTreeMap;

use num::complex::Complex64;
use num::Zero;

use crate::error::Error;
use crate::rational::{integer_range, Ratio, RationalPi};
use crate::spectrum::{ratio_power, PeriodicStep, StepSpectrum, Window};
use crate::structure::AffineStructure;

/// Index into the n-fold sum of l2(Z): lattice index `k`, component `comp`
/// (1-based, matching document serialization).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FiberIndex {
    pub k: i64,
    pub comp: usize,
}

impl FiberIndex {
    pub fn new(k: i64, comp: usize) -> Self {
        FiberIndex { k, comp }
    }
}

/// A finitely supported element of l2(Z)^n. Zero entries are never stored;
/// iteration order is lexicographic in (k, comp) for reproducible sums.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Fiber {
    entries: BTreeMap<FiberIndex, Complex64>,
}

impl Fiber {
    pub fn zero() -> Self {
        Fiber::default()
    }

    /// The basis fiber with a single unit entry.
    pub fn delta(k: i64, comp: usize) -> Self {
        let mut f = Fiber::zero();
        f.set(FiberIndex::new(k, comp), Complex64::ONE);
        f
    }

    pub fn set(&mut self, index: FiberIndex, value: Complex64) {
        if value == Complex64::ZERO {
            self.entries.remove(&index);
        } else {
            self.entries.insert(index, value);
        }
    }

    pub fn get(&self, index: &FiberIndex) -> Complex64 {
        self.entries.get(index).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FiberIndex, &Complex64)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// Sesquilinear inner product, linear in `self`.
    pub fn inner(&self, other: &Fiber) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for (index, value) in &self.entries {
            let w = other.get(index);
            if w != Complex64::ZERO {
                acc += value * w.conj();
            }
        }
        acc
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.values().map(|v| v.norm_sqr()).sum()
    }

    pub fn scale(&self, c: Complex64) -> Fiber {
        let mut out = Fiber::zero();
        for (index, value) in &self.entries {
            out.set(*index, value * c);
        }
        out
    }

    pub fn add(&self, other: &Fiber) -> Fiber {
        let mut out = self.clone();
        for (index, value) in &other.entries {
            out.set(*index, out.get(index) + value);
        }
        out
    }

    pub fn sub(&self, other: &Fiber) -> Fiber {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// The lattice shift `(lambda(s) v)(k, i) = v(k - s, i)`.
    pub fn shift(&self, s: i64) -> Fiber {
        let mut out = Fiber::zero();
        for (index, value) in &self.entries {
            out.set(FiberIndex::new(index.k + s, index.comp), *value);
        }
        out
    }

    /// Union of supports, sorted.
    pub fn union_support(fibers: &[&Fiber]) -> Vec<FiberIndex> {
        let mut support: Vec<FiberIndex> = fibers
            .iter()
            .flat_map(|f| f.entries.keys().copied())
            .collect();
        support.sort();
        support.dedup();
        support
    }
}

/// One concrete fiber-space map used to conjugate operators.
#[derive(Clone, Debug)]
pub enum FiberMap {
    /// The lattice shift `lambda(s)`.
    Shift(i64),
    /// The component permutation `S`.
    Permute,
    /// The congruence-class embedding `D_l`.
    Upsample(u32),
}

impl FiberMap {
    pub fn apply(&self, structure: &AffineStructure, v: &Fiber) -> Fiber {
        match self {
            FiberMap::Shift(s) => v.shift(*s),
            FiberMap::Permute => structure.permute_components(v),
            FiberMap::Upsample(l) => structure.upsample(*l, v),
        }
    }

    pub fn apply_adjoint(&self, structure: &AffineStructure, v: &Fiber) -> Fiber {
        match self {
            FiberMap::Shift(s) => v.shift(-*s),
            FiberMap::Permute => structure.permute_components_adjoint(v),
            FiberMap::Upsample(l) => structure.downsample(*l, v),
        }
    }
}

/// A finitely supported operator on fiber space.
#[derive(Clone, Debug)]
pub enum FiberOperator {
    Identity,
    Zero,
    /// `P_f(v) = <v, f> f`.
    RankOne(Fiber),
    /// Explicit entries `(row, col, value)`.
    Matrix(Vec<(FiberIndex, FiberIndex, Complex64)>),
    /// `pre_adjoint ∘ inner ∘ pre`, `pre` applied left to right.
    Conjugated {
        pre: Vec<FiberMap>,
        inner: Box<FiberOperator>,
    },
}

impl FiberOperator {
    /// Rank-one projection-style operator `v -> <v, delta_ki> delta_lj`.
    pub fn cross_projection(row: FiberIndex, col: FiberIndex) -> Self {
        FiberOperator::Matrix(vec![(row, col, Complex64::ONE)])
    }

    pub fn apply(&self, structure: &AffineStructure, v: &Fiber) -> Fiber {
        match self {
            FiberOperator::Identity => v.clone(),
            FiberOperator::Zero => Fiber::zero(),
            FiberOperator::RankOne(f) => f.scale(v.inner(f)),
            FiberOperator::Matrix(entries) => {
                let mut out = Fiber::zero();
                for (row, col, value) in entries {
                    let coeff = v.get(col);
                    if coeff != Complex64::ZERO {
                        out.set(*row, out.get(row) + value * coeff);
                    }
                }
                out
            }
            FiberOperator::Conjugated { pre, inner } => {
                let mut w = v.clone();
                for map in pre {
                    w = map.apply(structure, &w);
                }
                let mut u = inner.apply(structure, &w);
                for map in pre.iter().rev() {
                    u = map.apply_adjoint(structure, &u);
                }
                u
            }
        }
    }

    /// `<T v, v>`, evaluated without materializing the conjugated operator.
    pub fn quadratic_form(&self, structure: &AffineStructure, v: &Fiber) -> Complex64 {
        match self {
            FiberOperator::Identity => Complex64::new(v.norm_sq(), 0.0),
            FiberOperator::Zero => Complex64::ZERO,
            FiberOperator::RankOne(f) => {
                let c = v.inner(f);
                Complex64::new(c.norm_sqr(), 0.0)
            }
            FiberOperator::Matrix(_) => self.apply(structure, v).inner(v),
            FiberOperator::Conjugated { pre, inner } => {
                let mut w = v.clone();
                for map in pre {
                    w = map.apply(structure, &w);
                }
                inner.quadratic_form(structure, &w)
            }
        }
    }
}

/// `delta_(0,l) + alpha * delta_(k,j)` with `k != 0`; the probe vectors of the
/// rank-detecting trace identities.
pub fn special_fiber(k: i64, l: usize, j: usize, alpha: Complex64) -> Result<Fiber, Error> {
    if k == 0 {
        return Err(Error::InvalidIndex {
            reason: "special fiber requires k != 0".into(),
        });
    }
    let mut f = Fiber::delta(0, l);
    f.set(FiberIndex::new(k, j), alpha);
    Ok(f)
}

/// A vector-valued frequency-side function: one spectrum per component.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFunction {
    pub label: String,
    pub components: Vec<StepSpectrum>,
}

impl VectorFunction {
    pub fn new(label: impl Into<String>, components: Vec<StepSpectrum>) -> Self {
        VectorFunction {
            label: label.into(),
            components,
        }
    }

    /// Single-component function.
    pub fn scalar(label: impl Into<String>, spectrum: StepSpectrum) -> Self {
        VectorFunction::new(label, vec![spectrum])
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn is_modulation_free(&self) -> bool {
        self.components.iter().all(|c| c.is_modulation_free())
    }

    /// Max outer support radius over components.
    pub fn outer_radius(&self) -> RationalPi {
        self.components
            .iter()
            .map(|c| c.support_outer_radius())
            .max()
            .unwrap_or_else(RationalPi::zero)
    }

    /// Min inner support radius over nonzero components; `None` when all
    /// components vanish.
    pub fn inner_radius(&self) -> Option<RationalPi> {
        self.components
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| c.support_inner_radius())
            .min()
    }

    /// Sum of component norms: the norm of the direct-sum vector.
    pub fn l2_norm_sq_exact(&self) -> Ratio {
        self.components
            .iter()
            .map(|c| c.l2_norm_sq_exact())
            .fold(Ratio::zero(), |acc, x| acc + x)
    }

    fn check_against(&self, structure: &AffineStructure) -> Result<(), Error> {
        if self.n() != structure.n() {
            return Err(Error::ComponentMismatch {
                expected: structure.n(),
                found: self.n(),
            });
        }
        Ok(())
    }
}

/// The fiber of `phi` at `xi`: entry `(k, i)` is `phi_i(xi - theta_i + 2k*pi)`.
/// The k-range comes from exact support bounds, never from a fixed cutoff.
pub fn fiber_at(
    phi: &VectorFunction,
    structure: &AffineStructure,
    xi: &RationalPi,
) -> Fiber {
    phi.check_against(structure).expect("component count");
    let mut out = Fiber::zero();
    for (comp_idx, spectrum) in phi.components.iter().enumerate() {
        let comp = comp_idx + 1;
        if spectrum.is_zero() {
            continue;
        }
        let segs = spectrum.segments();
        let hull_left = &segs[0].left;
        let hull_right = &segs[segs.len() - 1].right;
        let theta = structure.theta(comp);
        // hull_left <= xi - theta + 2k*pi < hull_right
        let base = xi - theta;
        let lo = (hull_left.coefficient() - base.coefficient()) / Ratio::from_integer(2.into());
        let hi = (hull_right.coefficient() - base.coefficient()) / Ratio::from_integer(2.into());
        for k in integer_range(&lo, &hi) {
            let x = &base + &RationalPi::from_integer(2 * k);
            let value = spectrum.evaluate(&x);
            if value != Complex64::ZERO {
                out.set(FiberIndex::new(k, comp), value);
            }
        }
    }
    out
}

/// The multiplier action: component `i` is multiplied by the periodic symbol
/// shifted by `theta_i`, so that fibers transform by the scalar `f(xi)`.
pub fn apply_multiplier(
    symbol: &PeriodicStep,
    phi: &VectorFunction,
    structure: &AffineStructure,
) -> VectorFunction {
    phi.check_against(structure).expect("component count");
    let components = phi
        .components
        .iter()
        .enumerate()
        .map(|(comp_idx, spectrum)| {
            if spectrum.is_zero() {
                return StepSpectrum::zero();
            }
            let theta = structure.theta(comp_idx + 1);
            let segs = spectrum.segments();
            let pad = RationalPi::from_integer(2);
            let window = Window::new(
                &(&segs[0].left + theta) - &pad,
                &(&segs[segs.len() - 1].right + theta) + &pad,
            );
            // g(xi) = symbol(xi + theta_i)
            let shifted = symbol.materialize(&window).translate_arg(theta);
            spectrum.pointwise_product(&shifted)
        })
        .collect();
    VectorFunction::new(format!("{}·mult", phi.label), components)
}

/// The scale-space generator family: for each input function and each
/// `r in {0..N-1}`, the function whose component `i` is
/// `(1/sqrt(N)) * exp(-i r (xi/N + theta_{sigma^{-1}(i)})) * phi_{sigma^{-1}(i)}(xi/N)`.
/// Together their translates generate the inverse-dilated space.
pub fn inverse_dilate_generators(
    phis: &[VectorFunction],
    structure: &AffineStructure,
) -> Vec<VectorFunction> {
    let scale = structure.scale();
    let inv_n = Ratio::new(1.into(), (scale as i64).into());
    let root = Complex64::new(1.0 / (scale as f64).sqrt(), 0.0);
    let mut out = Vec::with_capacity(phis.len() * scale as usize);
    for phi in phis {
        phi.check_against(structure).expect("component count");
        for r in 0..scale {
            let components = (1..=structure.n())
                .map(|i| {
                    let src = structure.sigma_inv(i);
                    let theta_src = structure.theta(src);
                    let phase =
                        Complex64::from_polar(1.0, -(r as f64) * theta_src.to_f64());
                    phi.components[src - 1]
                        .dilate_arg(&inv_n)
                        .scale(root * phase)
                        .modulate(&(Ratio::from_integer((r as i64).into()) * &inv_n))
                })
                .collect();
            out.push(VectorFunction::new(
                format!("{}·U^-1T^{}", phi.label, r),
                components,
            ));
        }
    }
    out
}

/// Generators of the truncated quasi-affine family for levels
/// `-level_bound ..= level_bound`. Level `m <= 0` contributes one generator
/// with components `psi_{sigma^{-m}(i)}(N^{-m} xi)`; level `m >= 1`
/// contributes `N^m` modulated generators.
pub fn quasi_affine_generators(
    psis: &[VectorFunction],
    structure: &AffineStructure,
    level_bound: u32,
) -> Vec<VectorFunction> {
    let scale = structure.scale();
    let n_ratio = Ratio::from_integer((scale as i64).into());
    let mut out = Vec::new();
    for psi in psis {
        psi.check_against(structure).expect("component count");
        for m in -(level_bound as i64)..=(level_bound as i64) {
            // factor N^{-m}: component i is psi_{sigma^{-m}(i)}(N^{-m} xi).
            let factor = ratio_power(&n_ratio, -m);
            if m <= 0 {
                let components = (1..=structure.n())
                    .map(|i| {
                        let src = structure.apply_sigma_pow(-m, i);
                        psi.components[src - 1].dilate_arg(&factor)
                    })
                    .collect();
                out.push(VectorFunction::new(
                    format!("{}·qa[{},0]", psi.label, m),
                    components,
                ));
            } else {
                let count = (scale as i64).pow(m as u32);
                let amp = Complex64::new((scale as f64).powi(-(m as i32) ).sqrt(), 0.0);
                for r in 0..count {
                    let components = (1..=structure.n())
                        .map(|i| {
                            let src = structure.apply_sigma_pow(-m, i);
                            let theta_src = structure.theta(src);
                            let phase = Complex64::from_polar(
                                1.0,
                                -(r as f64) * theta_src.to_f64(),
                            );
                            psi.components[src - 1]
                                .dilate_arg(&factor)
                                .scale(amp * phase)
                                .modulate(&(Ratio::from_integer(r.into()) * &factor))
                        })
                        .collect();
                    out.push(VectorFunction::new(
                        format!("{}·qa[{},{}]", psi.label, m, r),
                        components,
                    ));
                }
            }
        }
    }
    out
}

/// Relative singular-value threshold below which directions count as null.
pub const RANK_REL_TOL: f64 = 1e-8;

/// Builds the matrix whose columns are the fibers of `phis` at `xi` and
/// returns `(A, B, rank)`: the smallest nonzero and largest squared singular
/// values, and the numerical rank. All-zero fibers give `(0, 0, 0)`.
pub fn fiber_frame_bounds(
    phis: &[VectorFunction],
    structure: &AffineStructure,
    xi: &RationalPi,
) -> (f64, f64, usize) {
    let fibers: Vec<Fiber> = phis
        .iter()
        .map(|phi| fiber_at(phi, structure, xi))
        .collect();
    fiber_family_bounds(&fibers, RANK_REL_TOL)
}

/// Frame bounds and rank of an explicit fiber family.
pub fn fiber_family_bounds(fibers: &[Fiber], rel_tol: f64) -> (f64, f64, usize) {
    let refs: Vec<&Fiber> = fibers.iter().collect();
    let support = Fiber::union_support(&refs);
    if support.is_empty() || fibers.is_empty() {
        return (0.0, 0.0, 0);
    }
    let rows = support.len();
    let cols = fibers.len();
    let matrix = nalgebra::DMatrix::<Complex64>::from_fn(rows, cols, |r, c| {
        fibers[c].get(&support[r])
    });
    let svd = matrix.svd(false, false);
    let mut singular: Vec<f64> = svd.singular_values.iter().copied().collect();
    singular.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    let sigma_max = singular.first().copied().unwrap_or(0.0);
    if sigma_max == 0.0 {
        return (0.0, 0.0, 0);
    }
    let threshold = rel_tol * sigma_max;
    let rank = singular.iter().filter(|s| **s > threshold).count();
    let smallest_nonzero = singular[rank - 1];
    (
        smallest_nonzero * smallest_nonzero,
        sigma_max * sigma_max,
        rank,
    )
}
