//! Seeded generators for the benchmark families.
//!
//! Each generator draws from `ChaCha8Rng::seed_from_u64(seed)` with a fixed
//! stream per component: stream 0 for matrices, stream 1 for vectors, stream 2
//! for the initial point. Draws within a stream are taken in row-major order.

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::matrix::Matrix;
use crate::operators::{
    make_affine_operator, make_exponential_operator, make_nash_cournot_operator,
    make_volterra_operator, NashCournotParams, OperatorSpec,
};
use crate::sets::FeasibleSet;
use crate::solvers::KnownSolutionInfo;
use crate::vector::DenseVector;

const STREAM_MATRICES: u64 = 0;
const STREAM_VECTORS: u64 = 1;
const STREAM_START: u64 = 2;

/// Price intercept of the oligopoly model.
pub const NASH_COURNOT_PRICE: f64 = 100.0;
/// Level of the moment constraint `∫ t x(t) dt = 2`.
pub const VOLTERRA_LEVEL: f64 = 2.0;

fn stream(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

fn draw(rng: &mut ChaCha8Rng, lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let dist = Uniform::new_inclusive(lo, hi);
    (0..count).map(|_| dist.sample(rng)).collect()
}

#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub operator: OperatorSpec,
    pub feasible: FeasibleSet,
    pub known: KnownSolutionInfo,
    pub label: String,
    pub seed: u64,
    /// `x_1`; the solver also uses it as `x_0`.
    pub initial_point: DenseVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarkerPangParams {
    pub m_dim: usize,
    pub k_cons: usize,
    pub seed: u64,
}

impl HarkerPangParams {
    pub fn validate(&self) -> Result<()> {
        if self.m_dim == 0 || self.k_cons == 0 {
            return Err(Error::InvalidParameter(format!(
                "dimension and constraint count must be positive, got m = {}, k = {}",
                self.m_dim, self.k_cons
            )));
        }
        Ok(())
    }
}

/// Raw random data of a Harker–Pang instance.
#[derive(Debug, Clone, PartialEq)]
pub struct HarkerPangParts {
    pub b: Matrix,
    /// Skew-symmetric part `(G − Gᵀ)/2`.
    pub s: Matrix,
    pub d: Vec<f64>,
    pub constraint_matrix: Matrix,
    pub rhs: DenseVector,
    pub initial_point: DenseVector,
}

impl HarkerPangParts {
    /// `M = BBᵀ + S + D`
    pub fn matrix(&self) -> Result<Matrix> {
        self.b
            .matmul(&self.b.transpose())?
            .add(&self.s)?
            .add(&Matrix::diagonal(&self.d))
    }
}

pub fn harker_pang_parts(p: &HarkerPangParams) -> Result<HarkerPangParts> {
    p.validate()?;
    let (m, k) = (p.m_dim, p.k_cons);
    let mut mats = stream(p.seed, STREAM_MATRICES);
    let b = Matrix::from_row_major(m, m, draw(&mut mats, -1.0, 1.0, m * m))?;
    let g = Matrix::from_row_major(m, m, draw(&mut mats, -1.0, 1.0, m * m))?;
    let s = Matrix::from_fn(m, m, |i, j| 0.5 * (g.get(i, j) - g.get(j, i)));
    let d = draw(&mut mats, 0.5, 1.5, m);
    let constraint_matrix = Matrix::from_row_major(k, m, draw(&mut mats, -1.0, 1.0, k * m))?;
    let rhs = DenseVector::new(draw(&mut stream(p.seed, STREAM_VECTORS), 0.0, 1.0, k));
    let initial_point = DenseVector::new(draw(&mut stream(p.seed, STREAM_START), -1.0, 1.0, m));
    Ok(HarkerPangParts {
        b,
        s,
        d,
        constraint_matrix,
        rhs,
        initial_point,
    })
}

/// `F(x) = Mx` with `M = BBᵀ + S + D` on `{x : B_c x ≤ b}`; the unique solution is 0.
pub fn gen_harker_pang(p: &HarkerPangParams) -> Result<ProblemInstance> {
    let parts = harker_pang_parts(p)?;
    let operator = make_affine_operator(parts.matrix()?, DenseVector::zeros(p.m_dim))?;
    let feasible = FeasibleSet::polyhedron(parts.constraint_matrix, parts.rhs)?;
    Ok(ProblemInstance {
        operator,
        feasible,
        known: KnownSolutionInfo::unique(DenseVector::zeros(p.m_dim)),
        label: format!("harker_pang_m{}_k{}", p.m_dim, p.k_cons),
        seed: p.seed,
        initial_point: parts.initial_point,
    })
}

/// Oligopoly parameters: `β` in (0, 1], cost coefficients in [1, 40].
pub fn nash_cournot_params(n_units: usize, seed: u64) -> Result<NashCournotParams> {
    if n_units == 0 {
        return Err(Error::InvalidParameter("at least one generating unit required".into()));
    }
    let mut rng = stream(seed, STREAM_VECTORS);
    let unit = Uniform::new(0.0, 1.0);
    let beta = (0..n_units).map(|_| 1.0 - unit.sample(&mut rng)).collect();
    let cost_quad = draw(&mut rng, 1.0, 40.0, n_units);
    let cost_lin = draw(&mut rng, 1.0, 40.0, n_units);
    Ok(NashCournotParams {
        beta,
        alpha_price: NASH_COURNOT_PRICE,
        cost_quad,
        cost_lin,
    })
}

/// Oligopoly equilibrium on the production box `[1, 40]^N`; `x_1` uniform in the box.
pub fn gen_nash_cournot(n_units: usize, seed: u64) -> Result<ProblemInstance> {
    let params = nash_cournot_params(n_units, seed)?;
    let operator = make_nash_cournot_operator(&params)?;
    let initial_point = DenseVector::new(draw(&mut stream(seed, STREAM_START), 1.0, 40.0, n_units));
    Ok(ProblemInstance {
        operator,
        feasible: FeasibleSet::uniform_box(n_units, 1.0, 40.0)?,
        known: KnownSolutionInfo::none(),
        label: format!("nash_cournot_n{n_units}"),
        seed,
        initial_point,
    })
}

/// Volterra operator on `{x : ∫ t x(t) dt = 2}` over a grid of `grid_size`
/// nodes, started from `x_1 = 0` (projected onto the constraint by the solver).
pub fn gen_volterra(grid_size: usize) -> Result<ProblemInstance> {
    let grid = UniformGrid::new(grid_size)?;
    Ok(ProblemInstance {
        operator: make_volterra_operator(grid)?,
        feasible: FeasibleSet::moment_hyperplane(grid, VOLTERRA_LEVEL),
        known: KnownSolutionInfo::none(),
        label: format!("volterra_n{grid_size}"),
        seed: 0,
        initial_point: DenseVector::zeros(grid_size),
    })
}

/// `F(x) = eˣ` on `[0, ∞)` from `x_1 = 2`; the solution is 0.
pub fn gen_exponential() -> Result<ProblemInstance> {
    Ok(ProblemInstance {
        operator: make_exponential_operator(),
        feasible: FeasibleSet::new_box(vec![0.0], vec![f64::INFINITY])?,
        known: KnownSolutionInfo::unique(DenseVector::zeros(1)),
        label: "exponential".into(),
        seed: 0,
        initial_point: DenseVector::new(vec![2.0]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harker_pang_is_deterministic() {
        let p = HarkerPangParams {
            m_dim: 6,
            k_cons: 4,
            seed: 11,
        };
        assert_eq!(harker_pang_parts(&p).unwrap(), harker_pang_parts(&p).unwrap());
        let q = HarkerPangParams { seed: 12, ..p };
        assert_ne!(harker_pang_parts(&p).unwrap(), harker_pang_parts(&q).unwrap());
    }

    #[test]
    fn harker_pang_structure() {
        let p = HarkerPangParams {
            m_dim: 8,
            k_cons: 5,
            seed: 3,
        };
        let parts = harker_pang_parts(&p).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(parts.s.get(i, j), -parts.s.get(j, i));
            }
        }
        assert!(parts.d.iter().all(|d| (0.5..=1.5).contains(d)));
        assert!(parts.rhs.iter().all(|b| (0.0..=1.0).contains(b)));
        assert!(parts.initial_point.iter().all(|x| (-1.0..=1.0).contains(x)));
    }

    #[test]
    fn nash_cournot_ranges() {
        let p = nash_cournot_params(20, 5).unwrap();
        assert!(p.beta.iter().all(|b| *b > 0.0 && *b <= 1.0));
        assert!(p.cost_quad.iter().chain(&p.cost_lin).all(|c| (1.0..=40.0).contains(c)));
        let inst = gen_nash_cournot(20, 5).unwrap();
        assert!(inst.initial_point.iter().all(|x| (1.0..=40.0).contains(x)));
        assert_eq!(inst.feasible.dim(), 20);
    }

    #[test]
    fn exponential_instance() {
        let inst = gen_exponential().unwrap();
        let p = inst.feasible.project(&DenseVector::new(vec![-3.0])).unwrap();
        assert_eq!(p.point[0], 0.0);
        let p = inst.feasible.project(&DenseVector::new(vec![2.0])).unwrap();
        assert_eq!(p.point[0], 2.0);
    }

    #[test]
    fn volterra_dimensions_agree() {
        let inst = gen_volterra(50).unwrap();
        assert_eq!(inst.operator.dim(), 50);
        assert_eq!(inst.feasible.dim(), 50);
        assert!(gen_volterra(1).is_err());
    }
}
