//! Invariants of a shift invariant space computed through a generator set:
//! local trace, dual Gramian, spectral/dimension/multiplicity functions,
//! per-cell orthogonalization, and the dilation identities.
//!
//! The range function is never materialized; every quantity is a finite sum
//! over generator fibers, valid when the generators are a verified normalized
//! tight frame family.

use num::complex::Complex64;
use num::Zero;

use crate::error::Error;
use crate::fiber::{
    fiber_at, fiber_family_bounds, inverse_dilate_generators, Fiber, FiberIndex, FiberOperator,
    FiberMap, VectorFunction,
};
use crate::rational::{integer_range, Ratio, RationalPi};
use crate::spectrum::{
    refine_from_breakpoints, Cell, PeriodicStep, StepSpectrum, Window,
};
use crate::structure::AffineStructure;

/// Residual tolerance for exact-mode identities (pure float-summation noise).
pub const EXACT_TOL: f64 = 1e-12;
/// Residual tolerance for grid-mode (modulated) identities.
pub const GRID_TOL: f64 = 1e-9;
/// Default relative rank tolerance.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// A shift invariant space, represented extensionally by generators. The
/// `ntf_verified` flag is granted only by the characterization checkers.
#[derive(Clone, Debug)]
pub struct ShiftInvariantSpace {
    generators: Vec<VectorFunction>,
    ntf_verified: bool,
}

impl ShiftInvariantSpace {
    pub fn new(generators: Vec<VectorFunction>) -> Self {
        ShiftInvariantSpace {
            generators,
            ntf_verified: false,
        }
    }

    pub fn generators(&self) -> &[VectorFunction] {
        &self.generators
    }

    pub fn ntf_verified(&self) -> bool {
        self.ntf_verified
    }

    pub(crate) fn mark_ntf_verified(&mut self) {
        self.ntf_verified = true;
    }

    pub fn is_modulation_free(&self) -> bool {
        self.generators.iter().all(|g| g.is_modulation_free())
    }
}

/// `tau_{V,f}(xi) = sum_phi |<f, fiber(phi, xi)>|^2`.
pub fn local_trace_vector(
    space: &ShiftInvariantSpace,
    structure: &AffineStructure,
    f: &Fiber,
    xi: &RationalPi,
) -> f64 {
    space
        .generators
        .iter()
        .map(|phi| f.inner(&fiber_at(phi, structure, xi)).norm_sqr())
        .sum()
}

/// `tau_{V,T}(xi) = sum_phi <T fiber(phi, xi), fiber(phi, xi)>`.
pub fn local_trace_operator(
    space: &ShiftInvariantSpace,
    structure: &AffineStructure,
    operator: &FiberOperator,
    xi: &RationalPi,
) -> Complex64 {
    space
        .generators
        .iter()
        .map(|phi| operator.quadratic_form(structure, &fiber_at(phi, structure, xi)))
        .fold(Complex64::ZERO, |acc, x| acc + x)
}

/// Dual Gramian entry
/// `sum_phi phi_i(xi - theta_i + 2k pi) * conj(phi_j(xi - theta_j + 2l pi))`.
pub fn dual_gramian_entry(
    space: &ShiftInvariantSpace,
    structure: &AffineStructure,
    row: FiberIndex,
    col: FiberIndex,
    xi: &RationalPi,
) -> Complex64 {
    space
        .generators
        .iter()
        .map(|phi| {
            let u = fiber_at(phi, structure, xi);
            u.get(&row) * u.get(&col).conj()
        })
        .fold(Complex64::ZERO, |acc, x| acc + x)
}

/// All dual Gramian entries with `|k|, |l| <= k_bound`, in deterministic
/// lexicographic order of `((k, i), (l, j))`.
pub fn dual_gramian_matrix(
    space: &ShiftInvariantSpace,
    structure: &AffineStructure,
    xi: &RationalPi,
    k_bound: i64,
) -> Vec<(FiberIndex, FiberIndex, Complex64)> {
    let fibers: Vec<Fiber> = space
        .generators
        .iter()
        .map(|phi| fiber_at(phi, structure, xi))
        .collect();
    let mut out = Vec::new();
    for k in -k_bound..=k_bound {
        for i in 1..=structure.n() {
            for l in -k_bound..=k_bound {
                for j in 1..=structure.n() {
                    let row = FiberIndex::new(k, i);
                    let col = FiberIndex::new(l, j);
                    let value = fibers
                        .iter()
                        .map(|u| u.get(&row) * u.get(&col).conj())
                        .fold(Complex64::ZERO, |acc, x| acc + x);
                    out.push((row, col, value));
                }
            }
        }
    }
    out
}

/// The i-th spectral function `sum_phi |phi_i|^2(xi - theta_i)`, exact.
pub fn spectral_function(
    space: &ShiftInvariantSpace,
    structure: &AffineStructure,
    i: usize,
) -> StepSpectrum {
    let minus_theta = -structure.theta(i);
    let mut acc = StepSpectrum::zero();
    for phi in &space.generators {
        let term = phi.components[i - 1]
            .modulus_squared()
            .translate_arg(&minus_theta);
        acc = acc.add(&term).expect("modulation-free squares");
    }
    acc
}

/// The dimension function `sum_i Per(sigma_{V,i})`, an exact periodic step.
pub fn dimension_function(
    space: &ShiftInvariantSpace,
    structure: &AffineStructure,
) -> Result<PeriodicStep, Error> {
    let mut acc = PeriodicStep::constant(Complex64::ZERO);
    for i in 1..=structure.n() {
        acc = acc.add(&spectral_function(space, structure, i).periodize()?);
    }
    Ok(acc)
}

/// Rank of the fiber family at `xi` (equivalently of the dual Gramian on the
/// union support).
pub fn multiplicity_at(
    space: &ShiftInvariantSpace,
    structure: &AffineStructure,
    xi: &RationalPi,
    tol: f64,
) -> usize {
    let fibers: Vec<Fiber> = space
        .generators
        .iter()
        .map(|phi| fiber_at(phi, structure, xi))
        .collect();
    fiber_family_bounds(&fibers, tol).2
}

/// Breakpoints of all generator fibers, as functions of `xi`, inside
/// `window`: entry `(k, i)` jumps at `b + theta_i - 2k pi` for each component
/// breakpoint `b`. Returns the induced refinement.
pub fn fiber_refinement(
    generators: &[VectorFunction],
    structure: &AffineStructure,
    window: &Window,
) -> Vec<Cell> {
    let two = Ratio::from_integer(2.into());
    let mut points = Vec::new();
    for phi in generators {
        for (comp_idx, spectrum) in phi.components.iter().enumerate() {
            let theta = structure.theta(comp_idx + 1);
            for b in spectrum.breakpoints() {
                let base = &b + theta;
                // base - 2k pi in (left, right)
                let lo = (base.coefficient() - window.right.coefficient()) / &two;
                let hi = (base.coefficient() - window.left.coefficient()) / &two;
                for k in integer_range(&lo, &hi) {
                    points.push(&base - &RationalPi::from_integer(2 * k));
                }
            }
        }
    }
    refine_from_breakpoints(points, window)
}

/// Per-cell orthogonalization of the generator fibers over `[-pi, pi)`.
///
/// On each refinement cell the fibers are constant; Gram-Schmidt in list
/// order (dropping residuals below `tol`) produces orthonormal fibers, which
/// are reassembled into step-built functions. The j-th output has unit fiber
/// norm exactly on the set where the family has rank >= j.
pub fn extract_quasi_orthogonal(
    space: &ShiftInvariantSpace,
    structure: &AffineStructure,
    tol: f64,
) -> Result<Vec<VectorFunction>, Error> {
    if !space.is_modulation_free() {
        return Err(Error::ModeUnsupported {
            reason: "quasi-orthogonal extraction requires modulation-free generators".into(),
        });
    }
    let window = Window::fundamental();
    let cells = fiber_refinement(&space.generators, structure, &window);
    let mut outputs: Vec<Vec<(Cell, Fiber)>> = Vec::new();
    for cell in cells {
        let mut basis: Vec<Fiber> = Vec::new();
        for phi in &space.generators {
            let v = fiber_at(phi, structure, &cell.mid);
            let mut residual = v;
            for e in &basis {
                let coeff = residual.inner(e);
                residual = residual.sub(&e.scale(coeff));
            }
            let norm = residual.norm_sq().sqrt();
            if norm >= tol {
                basis.push(residual.scale(Complex64::new(1.0 / norm, 0.0)));
            }
        }
        for (j, e) in basis.into_iter().enumerate() {
            if outputs.len() <= j {
                outputs.push(Vec::new());
            }
            outputs[j].push((cell.clone(), e));
        }
    }
    let mut functions = Vec::with_capacity(outputs.len());
    for (j, patches) in outputs.into_iter().enumerate() {
        let mut raw: Vec<Vec<(RationalPi, RationalPi, Complex64, Ratio)>> =
            vec![Vec::new(); structure.n()];
        for (cell, fiber) in patches {
            for (index, value) in fiber.iter() {
                let shift = &RationalPi::from_integer(2 * index.k) - structure.theta(index.comp);
                raw[index.comp - 1].push((
                    &cell.left + &shift,
                    &cell.right + &shift,
                    *value,
                    Ratio::zero(),
                ));
            }
        }
        let components = raw
            .into_iter()
            .map(StepSpectrum::from_pieces)
            .collect::<Result<Vec<_>, _>>()?;
        functions.push(VectorFunction::new(format!("qo{}", j + 1), components));
    }
    Ok(functions)
}

/// Max residual of the trace dilation identity over the given points:
/// the trace of `T` on the inverse-dilated space against the sum of traces of
/// the conjugated operators on the original space.
pub fn dilation_check(
    space: &ShiftInvariantSpace,
    structure: &AffineStructure,
    operator: &FiberOperator,
    points: &[RationalPi],
) -> f64 {
    let scale = structure.scale();
    let dil_gens = inverse_dilate_generators(&space.generators, structure);
    let conjugated: Vec<FiberOperator> = (0..scale)
        .map(|l| FiberOperator::Conjugated {
            pre: vec![FiberMap::Permute, FiberMap::Upsample(l)],
            inner: Box::new(operator.clone()),
        })
        .collect();
    let mut worst: f64 = 0.0;
    for xi in points {
        let lhs = dil_gens
            .iter()
            .map(|g| operator.quadratic_form(structure, &fiber_at(g, structure, xi)))
            .fold(Complex64::ZERO, |acc, x| acc + x);
        let mut rhs = Complex64::ZERO;
        for (l, conj_op) in conjugated.iter().enumerate() {
            let arg = (xi + &RationalPi::from_integer(2 * l as i64))
                .unscale(&Ratio::from_integer((scale as i64).into()));
            for phi in &space.generators {
                rhs += conj_op.quadratic_form(structure, &fiber_at(phi, structure, &arg));
            }
        }
        worst = worst.max((lhs - rhs).norm());
    }
    worst
}

fn sup_norm(spectrum: &StepSpectrum) -> f64 {
    spectrum
        .segments()
        .iter()
        .map(|s| s.value.norm())
        .fold(0.0, f64::max)
}

/// The j-th spectral function of the inverse-dilated space, exact: the N
/// generators indexed by r differ only by unimodular phases, so their
/// modulus-squared sum collapses to `sum_phi |phi_{sigma^{-1}(j)}|^2(xi/N)`
/// and the `1/sqrt(N)` amplitudes never reach floating point.
fn inverse_dilated_spectral(
    space: &ShiftInvariantSpace,
    structure: &AffineStructure,
    j: usize,
) -> StepSpectrum {
    let inv_n = Ratio::new(1.into(), (structure.scale() as i64).into());
    let src = structure.sigma_inv(j);
    let minus_theta = -structure.theta(j);
    let mut acc = StepSpectrum::zero();
    for phi in &space.generators {
        let term = phi.components[src - 1]
            .modulus_squared()
            .dilate_arg(&inv_n)
            .translate_arg(&minus_theta);
        acc = acc.add(&term).expect("modulation-free squares");
    }
    acc
}

/// Exact check of the spectral-function dilation identity; returns the sup of
/// the difference (0 when the computed step functions agree exactly).
pub fn spectral_dilation_check(
    space: &ShiftInvariantSpace,
    structure: &AffineStructure,
) -> f64 {
    let inv_n = Ratio::new(1.into(), (structure.scale() as i64).into());
    let mut worst: f64 = 0.0;
    for j in 1..=structure.n() {
        let lhs = inverse_dilated_spectral(space, structure, j);
        let src = structure.sigma_inv(j);
        // sigma_{V, sigma^{-1}(j)}((xi - theta_j + N theta_src) / N)
        let offset = structure.theta(src) - &structure.theta(j).scale(&inv_n);
        let rhs = spectral_function(space, structure, src)
            .translate_arg(&offset)
            .dilate_arg(&inv_n);
        let diff = lhs.add(&rhs.scale(Complex64::new(-1.0, 0.0)))
            .expect("modulation-free spectral functions");
        worst = worst.max(sup_norm(&diff));
    }
    worst
}

/// Exact check of the dimension-function dilation identity on `[-pi, pi)`.
pub fn dim_dilation_check(
    space: &ShiftInvariantSpace,
    structure: &AffineStructure,
) -> Result<f64, Error> {
    let scale = structure.scale();
    let mut lhs = PeriodicStep::constant(Complex64::ZERO);
    for j in 1..=structure.n() {
        lhs = lhs.add(&inverse_dilated_spectral(space, structure, j).periodize()?);
    }
    let dim = dimension_function(space, structure)?;
    let inv_n = Ratio::new(1.into(), (scale as i64).into());
    // arguments (xi + 2 l pi)/N for xi in [-pi, pi) cover
    // [-pi/N, (2N-1) pi / N).
    let ext_window = Window::new(
        RationalPi::new(-1, scale as i64),
        RationalPi::new(2 * scale as i64 - 1, scale as i64),
    );
    let ext = dim.materialize(&ext_window);
    let mut rhs = StepSpectrum::zero();
    for l in 0..scale {
        let term = ext
            .translate_arg(&RationalPi::new(2 * l as i64, scale as i64))
            .dilate_arg(&inv_n);
        rhs = rhs.add(&term)?;
    }
    let fundamental = Window::fundamental();
    let diff = lhs
        .base()
        .add(&rhs.restrict(&fundamental).scale(Complex64::new(-1.0, 0.0)))?
        .restrict(&fundamental);
    Ok(sup_norm(&diff))
}

/// Partial values of the scaling-limit sum `sum_phi |phi_i|^2(xi / N^m)` for
/// `m = 0..=m_max`, with the first index from which the value stays within
/// `1e-12` of 1.
pub struct LimitProbe {
    pub values: Vec<f64>,
    pub settled_at: Option<usize>,
}

pub fn scaling_limit_probe(
    space: &ShiftInvariantSpace,
    structure: &AffineStructure,
    i: usize,
    xi: &RationalPi,
    m_max: usize,
) -> Result<LimitProbe, Error> {
    if xi.is_zero() {
        return Err(Error::InvalidPoint);
    }
    let n_ratio = Ratio::from_integer((structure.scale() as i64).into());
    let mut values = Vec::with_capacity(m_max + 1);
    let mut arg = xi.clone();
    for _ in 0..=m_max {
        let value: f64 = space
            .generators
            .iter()
            .map(|phi| phi.components[i - 1].evaluate(&arg).norm_sqr())
            .sum();
        values.push(value);
        arg = arg.unscale(&n_ratio);
    }
    let mut settled_at = None;
    for (m, value) in values.iter().enumerate() {
        if (value - 1.0).abs() <= EXACT_TOL {
            if settled_at.is_none() {
                settled_at = Some(m);
            }
        } else {
            settled_at = None;
        }
    }
    Ok(LimitProbe { values, settled_at })
}
