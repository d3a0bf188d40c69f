//! The permutative affine structure `(n, N, sigma, theta)` and the concrete
//! operators it induces on fiber space.

use num::integer::gcd;
use num::ToPrimitive;

use crate::error::Error;
use crate::fiber::{Fiber, FiberIndex};
use crate::rational::{Ratio, RationalPi};

/// Validation finding: which index failed and the exact angle defect when the
/// scaling congruence is violated.
#[derive(Clone, Debug)]
pub struct Violation {
    pub index: usize,
    pub description: String,
    pub defect: Option<RationalPi>,
}

/// The structure data: `n` components, integer scale `N >= 2`, a permutation
/// `sigma` of `{1..n}` and angles `theta_k in [-pi, pi)` with
/// `N*theta_k == theta_{sigma(k)} (mod 2 pi)` exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineStructure {
    scale: u32,
    sigma: Vec<usize>,
    theta: Vec<RationalPi>,
}

impl AffineStructure {
    /// Builds the structure, checking only shape (sizes and index ranges);
    /// use `validate` for the semantic invariants.
    pub fn new(scale: u32, sigma: Vec<usize>, theta: Vec<RationalPi>) -> Result<Self, Error> {
        if scale < 2 {
            return Err(Error::InvalidStructure(format!(
                "scale must be >= 2, got {scale}"
            )));
        }
        let n = sigma.len();
        if n == 0 {
            return Err(Error::InvalidStructure("n must be positive".into()));
        }
        if theta.len() != n {
            return Err(Error::InvalidStructure(format!(
                "sigma has {n} entries but theta has {}",
                theta.len()
            )));
        }
        if let Some(bad) = sigma.iter().find(|&&image| image == 0 || image > n) {
            return Err(Error::InvalidStructure(format!(
                "sigma image {bad} out of range 1..={n}"
            )));
        }
        Ok(AffineStructure { scale, sigma, theta })
    }

    /// The classical structure on a single copy: `n=1`, identity, `theta=0`.
    pub fn classical(scale: u32) -> Self {
        AffineStructure::new(scale, vec![1], vec![RationalPi::zero()]).expect("classical")
    }

    /// The oversampling structure: `theta_k = 2 pi k / p` reduced to
    /// `[-pi, pi)` and `sigma(i) = N*i mod p`, defined when `gcd(N, p) = 1`.
    pub fn oversampling(scale: u32, p: u32) -> Result<Self, Error> {
        if scale < 2 || p == 0 {
            return Err(Error::InvalidStructure(
                "need scale >= 2 and p >= 1".into(),
            ));
        }
        if gcd(scale as u64, p as u64) != 1 {
            return Err(Error::NotCoprime { scale, p });
        }
        let sigma = (1..=p as usize)
            .map(|i| {
                let image = (scale as usize * i) % p as usize;
                if image == 0 {
                    p as usize
                } else {
                    image
                }
            })
            .collect();
        let theta = (1..=p as i64)
            .map(|k| RationalPi::new(2 * k, p as i64).reduce_mod_2pi())
            .collect();
        let structure = AffineStructure::new(scale, sigma, theta)?;
        debug_assert!(structure.validate().is_empty());
        Ok(structure)
    }

    pub fn n(&self) -> usize {
        self.sigma.len()
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn sigma_images(&self) -> &[usize] {
        &self.sigma
    }

    pub fn thetas(&self) -> &[RationalPi] {
        &self.theta
    }

    /// `sigma(i)` (1-based).
    pub fn sigma(&self, i: usize) -> usize {
        self.sigma[i - 1]
    }

    /// `sigma^{-1}(i)`; requires a bijective sigma.
    pub fn sigma_inv(&self, i: usize) -> usize {
        self.sigma
            .iter()
            .position(|&image| image == i)
            .map(|pos| pos + 1)
            .expect("sigma is a bijection")
    }

    /// `sigma^t(i)` for any integer `t` (negative powers via the inverse).
    pub fn apply_sigma_pow(&self, t: i64, i: usize) -> usize {
        let order = self.order() as i64;
        let t = t.rem_euclid(order);
        let mut out = i;
        for _ in 0..t {
            out = self.sigma(out);
        }
        out
    }

    /// Order of sigma as a permutation.
    pub fn order(&self) -> usize {
        let mut order = 1usize;
        for cycle in self.cycle_decomposition() {
            order = num::integer::lcm(order, cycle.members.len());
        }
        order
    }

    pub fn theta(&self, i: usize) -> &RationalPi {
        &self.theta[i - 1]
    }

    /// Checks every invariant, returning one entry per violation (empty means
    /// the structure is valid).
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        let n = self.n();
        let mut seen = vec![false; n];
        for (pos, &image) in self.sigma.iter().enumerate() {
            if seen[image - 1] {
                violations.push(Violation {
                    index: pos + 1,
                    description: format!("sigma is not injective: image {image} repeats"),
                    defect: None,
                });
            }
            seen[image - 1] = true;
        }
        let minus_pi = RationalPi::from_integer(-1);
        let pi = RationalPi::pi();
        for k in 1..=n {
            let theta = self.theta(k);
            if *theta < minus_pi || *theta >= pi {
                violations.push(Violation {
                    index: k,
                    description: format!("theta_{k} = {theta}·π outside [-pi, pi)"),
                    defect: None,
                });
            }
            let image = self.sigma(k);
            let defect = (&theta.scale(&Ratio::from_integer((self.scale as i64).into()))
                - self.theta(image))
                .reduce_mod_2pi();
            if !defect.is_zero() {
                violations.push(Violation {
                    index: k,
                    description: format!(
                        "N·theta_{k} != theta_{image} (mod 2π), defect {defect}·π"
                    ),
                    defect: Some(defect),
                });
            }
        }
        violations
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Disjoint cycles of sigma, each annotated with the orbit length of its
    /// theta value under `theta -> N*theta (mod 2 pi)`. The theta orbit can be
    /// strictly shorter than the sigma cycle (repeated points).
    pub fn cycle_decomposition(&self) -> Vec<Cycle> {
        let n = self.n();
        let mut visited = vec![false; n];
        let mut cycles = Vec::new();
        for start in 1..=n {
            if visited[start - 1] {
                continue;
            }
            let mut members = Vec::new();
            let mut current = start;
            loop {
                visited[current - 1] = true;
                members.push(current);
                current = self.sigma(current);
                if current == start || visited[current - 1] {
                    break;
                }
            }
            let theta_orbit_len = self.theta_orbit_len(start);
            cycles.push(Cycle {
                members,
                theta_orbit_len,
            });
        }
        cycles
    }

    fn theta_orbit_len(&self, start: usize) -> usize {
        let scale = Ratio::from_integer((self.scale as i64).into());
        let origin = self.theta(start).clone();
        let mut current = origin.scale(&scale).reduce_mod_2pi();
        let mut len = 1;
        while current != origin {
            current = current.scale(&scale).reduce_mod_2pi();
            len += 1;
            assert!(len <= self.n() + 1, "theta orbit exceeded structure size");
        }
        len
    }

    /// `S(v_1,..,v_n) = (v_{sigma^{-1}(1)},..,v_{sigma^{-1}(n)})`: component
    /// `i` of the output is component `sigma^{-1}(i)` of the input.
    pub fn permute_components(&self, v: &Fiber) -> Fiber {
        let mut out = Fiber::zero();
        for (index, value) in v.iter() {
            out.set(FiberIndex::new(index.k, self.sigma(index.comp)), *value);
        }
        out
    }

    /// Adjoint (= inverse) of `permute_components`.
    pub fn permute_components_adjoint(&self, v: &Fiber) -> Fiber {
        let mut out = Fiber::zero();
        for (index, value) in v.iter() {
            out.set(FiberIndex::new(index.k, self.sigma_inv(index.comp)), *value);
        }
        out
    }

    /// Exact integer `d_i = (theta_i - N*theta_{sigma^{-1}(i)}) / 2 pi`;
    /// defined exactly when the structure is valid.
    pub fn dilation_offset(&self, i: usize) -> i64 {
        let src = self.sigma_inv(i);
        let diff = self.theta(i)
            - &self
                .theta(src)
                .scale(&Ratio::from_integer((self.scale as i64).into()));
        let half = diff.coefficient() / Ratio::from_integer(2.into());
        assert!(half.is_integer(), "structure violates the scaling congruence");
        half.to_integer().to_i64().expect("offset fits i64")
    }

    /// The congruence-class embedding `D_l`: the entry of `v` at `(s, i)`
    /// moves to lattice index `l + d_i + N*s`. A partial isometry; the ranges
    /// over `l = 0..N-1` are orthogonal and jointly exhaust fiber space.
    pub fn upsample(&self, l: u32, v: &Fiber) -> Fiber {
        assert!(l < self.scale, "l must lie in 0..N-1");
        let n_i64 = self.scale as i64;
        let mut out = Fiber::zero();
        for (index, value) in v.iter() {
            let d = self.dilation_offset(index.comp);
            out.set(
                FiberIndex::new(l as i64 + d + n_i64 * index.k, index.comp),
                *value,
            );
        }
        out
    }

    /// Adjoint `D_l^*`: picks out the congruence class `l + d_i (mod N)`.
    pub fn downsample(&self, l: u32, v: &Fiber) -> Fiber {
        assert!(l < self.scale, "l must lie in 0..N-1");
        let n_i64 = self.scale as i64;
        let mut out = Fiber::zero();
        for (index, value) in v.iter() {
            let d = self.dilation_offset(index.comp);
            let shifted = index.k - l as i64 - d;
            if shifted.rem_euclid(n_i64) == 0 {
                out.set(FiberIndex::new(shifted.div_euclid(n_i64), index.comp), *value);
            }
        }
        out
    }
}

/// One cycle of sigma with the orbit length of its theta values.
#[derive(Clone, Debug, PartialEq)]
pub struct Cycle {
    pub members: Vec<usize>,
    pub theta_orbit_len: usize,
}
