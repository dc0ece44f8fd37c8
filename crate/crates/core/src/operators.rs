//! Catalog of monotone cost operators `F`.

use std::fmt;
use std::sync::Arc;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::grid::UniformGrid;
use crate::matrix::Matrix;
use crate::vector::{dot, DenseVector};

type EvalFn = dyn Fn(&DenseVector) -> DenseVector + Send + Sync;

/// `F(x) = M x + q`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePart {
    pub matrix: Matrix,
    pub offset: DenseVector,
}

/// A cost operator together with whatever structure is known about it.
#[derive(Clone)]
pub struct OperatorSpec {
    name: String,
    dim: usize,
    eval: Arc<EvalFn>,
    affine: Option<AffinePart>,
    lipschitz_estimate: Option<f64>,
    discrete_norm: Option<f64>,
}

impl fmt::Debug for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorSpec")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("affine", &self.affine.is_some())
            .field("lipschitz_estimate", &self.lipschitz_estimate)
            .field("discrete_norm", &self.discrete_norm)
            .finish()
    }
}

impl OperatorSpec {
    /// Wraps an arbitrary map. The closure must return vectors of dimension `dim`.
    pub fn from_fn<F>(name: impl Into<String>, dim: usize, f: F) -> Self
    where
        F: Fn(&DenseVector) -> DenseVector + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            dim,
            eval: Arc::new(f),
            affine: None,
            lipschitz_estimate: None,
            discrete_norm: None,
        }
    }

    pub fn with_lipschitz_estimate(mut self, l: f64) -> Self {
        self.lipschitz_estimate = Some(l);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &DenseVector) -> Result<DenseVector> {
        check_dim(self.dim, x.dim())?;
        let y = (self.eval)(x);
        check_dim(self.dim, y.dim())?;
        Ok(y)
    }

    pub fn affine_part(&self) -> Option<&AffinePart> {
        self.affine.as_ref()
    }

    pub fn lipschitz_estimate(&self) -> Option<f64> {
        self.lipschitz_estimate
    }

    /// Spectral norm of the discretized operator, when it differs from the analytic estimate.
    pub fn discrete_norm(&self) -> Option<f64> {
        self.discrete_norm
    }

    /// Constant used to size fixed steps: the larger of the analytic and discrete estimates.
    pub fn step_size_constant(&self) -> Option<f64> {
        match (self.lipschitz_estimate, self.discrete_norm) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        }
    }
}

/// `F(x) = M x + q`, with the Lipschitz estimate `‖M‖₂`.
pub fn make_affine_operator(m: Matrix, q: DenseVector) -> Result<OperatorSpec> {
    if !m.is_square() {
        return Err(Error::InvalidParameter(format!(
            "affine operator needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    check_dim(m.rows(), q.dim())?;
    let lipschitz = spectral_norm(&m)?.value;
    let (mm, qq) = (m.clone(), q.clone());
    let mut op = OperatorSpec::from_fn("affine", q.dim(), move |x| {
        let q = qq.as_slice();
        (0..mm.rows())
            .map(|i| dot(mm.row(i), x.as_slice()) + q[i])
            .collect()
    });
    op.affine = Some(AffinePart { matrix: m, offset: q });
    op.lipschitz_estimate = Some(lipschitz);
    Ok(op)
}

/// `F(x) = eˣ` on the real line. Monotone, not globally Lipschitz.
pub fn make_exponential_operator() -> OperatorSpec {
    OperatorSpec::from_fn("exponential", 1, |x| DenseVector::new(vec![x[0].exp()]))
}

/// Parameters of the electricity-market oligopoly model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashCournotParams {
    /// Price slopes β_j > 0.
    pub beta: Vec<f64>,
    /// Price intercept α of `p(s) = α − β s`.
    pub alpha_price: f64,
    /// Quadratic cost coefficients `D_j`: `c_j(x) = ½ D_j x² + d_j x`.
    pub cost_quad: Vec<f64>,
    /// Linear cost coefficients `d_j`.
    pub cost_lin: Vec<f64>,
}

impl NashCournotParams {
    pub fn n_units(&self) -> usize {
        self.beta.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_units();
        if n == 0 {
            return Err(Error::InvalidParameter("at least one generating unit required".into()));
        }
        check_dim(n, self.cost_quad.len())?;
        check_dim(n, self.cost_lin.len())?;
        if self.beta.iter().any(|b| !(*b > 0.0)) {
            return Err(Error::InvalidParameter("price slopes must be positive".into()));
        }
        if self.cost_quad.iter().chain(&self.cost_lin).any(|c| !(*c > 0.0)) {
            return Err(Error::InvalidParameter("cost coefficients must be positive".into()));
        }
        if !(self.alpha_price > 0.0) {
            return Err(Error::InvalidParameter("price intercept must be positive".into()));
        }
        Ok(())
    }
}

/// `F(x) = (B + 2B₁ + diag(D)) x + (d − a)` where `B₁ = diag(β)`, `B` has zero
/// diagonal and `β_i` everywhere else in row `i`, and `a = (α, …, α)`.
pub fn make_nash_cournot_operator(p: &NashCournotParams) -> Result<OperatorSpec> {
    p.validate()?;
    let n = p.n_units();
    let m = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * p.beta[i] + p.cost_quad[i]
        } else {
            p.beta[i]
        }
    });
    let q: DenseVector = p.cost_lin.iter().map(|d| d - p.alpha_price).collect();
    let mut op = make_affine_operator(m, q)?;
    op.name = "nash_cournot".into();
    Ok(op)
}

/// Discretized Volterra operator `(F x)(t) = ∫₀ᵗ x(s) ds` on `grid`.
///
/// Uses the cumulative right-endpoint rule `(F x)_i = h Σ_{j≤i} x_j`. The
/// symmetric part of its matrix is `(h/2)(11ᵀ + I)`, positive definite, and the
/// rule integrates constants exactly.
pub fn make_volterra_operator(grid: UniformGrid) -> Result<OperatorSpec> {
    let n = grid.len();
    let h = grid.spacing();
    let a = Matrix::from_fn(n, n, |i, j| if j <= i { h } else { 0.0 });
    if !a.symmetric_part_is_psd(1e-10)? {
        return Err(Error::InvalidParameter(
            "Volterra quadrature matrix lost monotonicity".into(),
        ));
    }
    let discrete = spectral_norm(&a)?.value;
    let mut op = OperatorSpec::from_fn("volterra", n, move |x| {
        let mut acc = 0.0;
        x.iter()
            .map(|v| {
                acc += h * v;
                acc
            })
            .collect()
    });
    op.affine = Some(AffinePart {
        matrix: a,
        offset: DenseVector::zeros(n),
    });
    op.lipschitz_estimate = Some(2.0 / std::f64::consts::PI);
    op.discrete_norm = Some(discrete);
    Ok(op)
}

/// Result of power iteration for `‖M‖₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralNorm {
    pub value: f64,
    pub iterations: usize,
    /// False when the iteration cap was hit; `value` is then the best estimate.
    pub converged: bool,
}

const POWER_TOL: f64 = 1e-8;
const POWER_CAP: usize = 10_000;

/// Largest singular value via power iteration on `MᵀM`.
pub fn spectral_norm(m: &Matrix) -> Result<SpectralNorm> {
    if !m.is_square() {
        return Err(Error::InvalidParameter("spectral norm needs a square matrix".into()));
    }
    let n = m.cols();
    if n == 0 {
        return Ok(SpectralNorm {
            value: 0.0,
            iterations: 0,
            converged: true,
        });
    }
    // A fixed pseudo-random start is almost surely not orthogonal to the top singular vector.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: DenseVector = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
    let nv = v.norm();
    v = v.scale(1.0 / nv);

    let mut prev = 0.0;
    for it in 1..=POWER_CAP {
        let w = m.transpose_mul_vec(&m.mul_vec(&v)?)?;
        // Rayleigh quotient of MᵀM at unit v.
        let rayleigh = dot(v.as_slice(), w.as_slice());
        let wn = w.norm();
        if wn == 0.0 {
            return Ok(SpectralNorm {
                value: 0.0,
                iterations: it,
                converged: true,
            });
        }
        v = w.scale(1.0 / wn);
        let sigma = rayleigh.max(0.0).sqrt();
        if it > 1 && (sigma - prev).abs() <= POWER_TOL * sigma {
            // One more Rayleigh quotient at the refined vector.
            let mv = m.mul_vec(&v)?;
            return Ok(SpectralNorm {
                value: mv.norm().max(sigma),
                iterations: it,
                converged: true,
            });
        }
        prev = sigma;
    }
    warn!("power iteration hit the {POWER_CAP} iteration cap");
    Ok(SpectralNorm {
        value: prev,
        iterations: POWER_CAP,
        converged: false,
    })
}

/// Region from which random probe points are drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum SampleRegion {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Points are drawn from the cube inscribed in the ball of this radius around the origin.
    Ball { dim: usize, radius: f64 },
}

impl SampleRegion {
    fn dim(&self) -> usize {
        match self {
            SampleRegion::Box { lo, .. } => lo.len(),
            SampleRegion::Ball { dim, .. } => *dim,
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> DenseVector {
        match self {
            SampleRegion::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| if l < h { rng.gen_range(*l..*h) } else { *l })
                .collect(),
            SampleRegion::Ball { dim, radius } => {
                let half = radius / (*dim as f64).sqrt();
                (0..*dim).map(|_| rng.gen_range(-half..half)).collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityReport {
    pub pairs: usize,
    /// Minimum of ⟨F(x) − F(y), x − y⟩ over the sampled pairs.
    pub min_value: f64,
    /// Pairs with ⟨F(x) − F(y), x − y⟩ < −1e−10·(1 + ‖x − y‖²).
    pub failures: usize,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Samples `n_pairs` random pairs and probes ⟨F(x) − F(y), x − y⟩ ≥ 0.
pub fn check_monotone(
    op: &OperatorSpec,
    region: &SampleRegion,
    n_pairs: usize,
    seed: u64,
) -> Result<MonotonicityReport> {
    if n_pairs == 0 {
        return Err(Error::InvalidParameter("n_pairs must be >= 1".into()));
    }
    check_dim(op.dim(), region.dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_value = f64::INFINITY;
    let mut failures = 0;
    for _ in 0..n_pairs {
        let x = region.sample(&mut rng);
        let y = region.sample(&mut rng);
        let d = x.sub(&y)?;
        let val = op.eval(&x)?.sub(&op.eval(&y)?)?.inner_product(&d)?;
        min_value = min_value.min(val);
        if val < -1e-10 * (1.0 + d.norm_squared()) {
            failures += 1;
        }
    }
    Ok(MonotonicityReport {
        pairs: n_pairs,
        min_value,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn identity_affine_operator() {
        let op = make_affine_operator(Matrix::identity(2), DenseVector::zeros(2)).unwrap();
        let fx = op.eval(&DenseVector::new(vec![1.0, 2.0])).unwrap();
        assert_eq!(fx.into_inner(), vec![1.0, 2.0]);
        assert!((op.lipschitz_estimate().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn affine_operator_rejects_bad_shapes() {
        let rect = Matrix::zeros(2, 3);
        assert!(make_affine_operator(rect, DenseVector::zeros(2)).is_err());
        assert!(make_affine_operator(Matrix::identity(3), DenseVector::zeros(2)).is_err());
    }

    #[test]
    fn exponential_values_and_monotonicity() {
        let op = make_exponential_operator();
        assert_eq!(op.eval(&DenseVector::new(vec![0.0])).unwrap()[0], 1.0);
        assert!((op.eval(&DenseVector::new(vec![1.0])).unwrap()[0] - std::f64::consts::E).abs() < 1e-15);
        assert!(op.lipschitz_estimate().is_none());
        let report = check_monotone(
            &op,
            &SampleRegion::Box {
                lo: vec![0.0],
                hi: vec![10.0],
            },
            10_000,
            7,
        )
        .unwrap();
        assert!(report.passed());
        assert!(report.min_value >= 0.0);
    }

    #[test]
    fn nash_cournot_single_unit() {
        // N = 1: B vanishes, F(x) = (2β + D) x + (d − α).
        let p = NashCournotParams {
            beta: vec![0.3],
            alpha_price: 100.0,
            cost_quad: vec![5.0],
            cost_lin: vec![7.0],
        };
        let op = make_nash_cournot_operator(&p).unwrap();
        let fx = op.eval(&DenseVector::new(vec![2.0])).unwrap()[0];
        assert!((fx - ((2.0 * 0.3 + 5.0) * 2.0 + (7.0 - 100.0))).abs() < 1e-12);
        let f0 = op.eval(&DenseVector::zeros(1)).unwrap()[0];
        assert_eq!(f0, 7.0 - 100.0);
    }

    #[test]
    fn nash_cournot_rejects_nonpositive_slopes() {
        let p = NashCournotParams {
            beta: vec![0.0, 0.5],
            alpha_price: 100.0,
            cost_quad: vec![1.0, 1.0],
            cost_lin: vec![1.0, 1.0],
        };
        assert!(make_nash_cournot_operator(&p).is_err());
    }

    #[test]
    fn volterra_integrates_constants_and_linears() {
        let grid = UniformGrid::new(50).unwrap();
        let h = grid.spacing();
        let op = make_volterra_operator(grid).unwrap();
        let t = grid.nodes();

        let zero = op.eval(&DenseVector::zeros(50)).unwrap();
        assert!(zero.iter().all(|v| *v == 0.0));

        let ones = op.eval(&DenseVector::filled(50, 1.0)).unwrap();
        let err1 = ones.iter().zip(&t).map(|(f, t)| (f - t).abs()).fold(0.0, f64::max);
        assert!(err1 <= h, "max error {err1}");

        let lin = op.eval(&DenseVector::new(t.clone())).unwrap();
        let err2 = lin
            .iter()
            .zip(&t)
            .map(|(f, t)| (f - t * t / 2.0).abs())
            .fold(0.0, f64::max);
        assert!(err2 <= h, "max error {err2}");
    }

    #[test]
    fn volterra_matches_its_matrix_and_constants() {
        let grid = UniformGrid::new(30).unwrap();
        let op = make_volterra_operator(grid).unwrap();
        let a = &op.affine_part().unwrap().matrix;
        let x: DenseVector = (0..30).map(|i| ((i * 7) % 11) as f64 - 5.0).collect();
        let direct = a.mul_vec(&x).unwrap();
        let fast = op.eval(&x).unwrap();
        for (p, q) in direct.iter().zip(fast.iter()) {
            assert!((p - q).abs() <= 1e-12 * (1.0 + p.abs()));
        }
        assert!((op.lipschitz_estimate().unwrap() - 2.0 / std::f64::consts::PI).abs() < 1e-15);
        let dn = op.discrete_norm().unwrap();
        assert!(dn > 0.6 && dn < 0.7, "discrete norm {dn}");
        assert_eq!(op.step_size_constant(), Some(dn.max(2.0 / std::f64::consts::PI)));
    }

    #[test]
    fn spectral_norm_simple_cases() {
        let s = spectral_norm(&Matrix::identity(3)).unwrap();
        assert!(s.converged);
        assert!(rel_err(s.value, 1.0) < 1e-8);
        let d = spectral_norm(&Matrix::diagonal(&[1.0, 2.0, 5.0])).unwrap();
        assert!(rel_err(d.value, 5.0) < 1e-8);
        assert_eq!(spectral_norm(&Matrix::zeros(2, 2)).unwrap().value, 0.0);
    }

    #[test]
    fn identity_passes_monotone_probe() {
        let op = OperatorSpec::from_fn("id", 3, |x| x.clone());
        let r = check_monotone(&op, &SampleRegion::Ball { dim: 3, radius: 100.0 }, 500, 1).unwrap();
        assert!(r.passed());
        assert!(r.min_value >= 0.0);
    }

    #[test]
    fn non_monotone_map_is_flagged() {
        let op = OperatorSpec::from_fn("neg", 2, |x| x.scale(-1.0));
        let r = check_monotone(&op, &SampleRegion::Ball { dim: 2, radius: 10.0 }, 100, 3).unwrap();
        assert!(!r.passed());
        assert!(r.min_value < 0.0);
    }
}
