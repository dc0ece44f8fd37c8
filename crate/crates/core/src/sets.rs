//! Feasible sets and their metric projectors.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::grid::UniformGrid;
use crate::matrix::Matrix;
use crate::vector::{dot, DenseVector};

/// Stopping controls for Dykstra's alternating projections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DykstraSettings {
    /// Stop once a full sweep moves the iterate less than this.
    pub move_tol: f64,
    pub max_sweeps: usize,
}

impl Default for DykstraSettings {
    fn default() -> Self {
        Self {
            move_tol: 1e-10,
            max_sweeps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    WholeSpace,
    Box,
    Halfspace,
    HyperplaneMoment,
    Polyhedron,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet {
    WholeSpace {
        dim: usize,
    },
    /// `lo ≤ x ≤ hi` entrywise; infinite bounds allowed.
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    /// `{x : ⟨normal, x − anchor⟩ ≤ 0}`
    Halfspace {
        normal: DenseVector,
        anchor: DenseVector,
    },
    /// `{x : ∫₀¹ t x(t) dt = level}` on a uniform grid.
    HyperplaneMoment {
        grid: UniformGrid,
        level: f64,
    },
    /// `{x : A x ≤ b}`
    Polyhedron {
        matrix: Matrix,
        rhs: DenseVector,
        settings: DykstraSettings,
    },
}

/// Output of [`FeasibleSet::project`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionReport {
    pub point: DenseVector,
    /// True for closed-form projectors.
    pub exact: bool,
    /// Full sweeps used by an iterative projector (0 for closed forms).
    pub sweeps: usize,
    /// Largest constraint violation at `point`.
    pub residual_infeasibility: f64,
    pub converged: bool,
}

impl FeasibleSet {
    pub fn whole_space(dim: usize) -> Self {
        FeasibleSet::WholeSpace { dim }
    }

    pub fn new_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        check_dim(lo.len(), hi.len())?;
        if lo.iter().zip(&hi).any(|(l, h)| !(l <= h) || l.is_nan()) {
            return Err(Error::InvalidParameter("box needs lo <= hi entrywise".into()));
        }
        Ok(FeasibleSet::Box { lo, hi })
    }

    pub fn uniform_box(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new_box(vec![lo; dim], vec![hi; dim])
    }

    pub fn halfspace(normal: DenseVector, anchor: DenseVector) -> Result<Self> {
        check_dim(normal.dim(), anchor.dim())?;
        if normal.norm() == 0.0 {
            return Err(Error::ZeroNormal);
        }
        Ok(FeasibleSet::Halfspace { normal, anchor })
    }

    pub fn moment_hyperplane(grid: UniformGrid, level: f64) -> Self {
        FeasibleSet::HyperplaneMoment { grid, level }
    }

    pub fn polyhedron(matrix: Matrix, rhs: DenseVector) -> Result<Self> {
        check_dim(matrix.rows(), rhs.dim())?;
        for i in 0..matrix.rows() {
            if matrix.row(i).iter().all(|a| *a == 0.0) && rhs[i] < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "constraint row {i} is 0 <= {} and empties the polyhedron",
                    rhs[i]
                )));
            }
        }
        Ok(FeasibleSet::Polyhedron {
            matrix,
            rhs,
            settings: DykstraSettings::default(),
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::WholeSpace { dim } => *dim,
            FeasibleSet::Box { lo, .. } => lo.len(),
            FeasibleSet::Halfspace { normal, .. } => normal.dim(),
            FeasibleSet::HyperplaneMoment { grid, .. } => grid.len(),
            FeasibleSet::Polyhedron { matrix, .. } => matrix.cols(),
        }
    }

    pub fn kind(&self) -> SetKind {
        match self {
            FeasibleSet::WholeSpace { .. } => SetKind::WholeSpace,
            FeasibleSet::Box { .. } => SetKind::Box,
            FeasibleSet::Halfspace { .. } => SetKind::Halfspace,
            FeasibleSet::HyperplaneMoment { .. } => SetKind::HyperplaneMoment,
            FeasibleSet::Polyhedron { .. } => SetKind::Polyhedron,
        }
    }

    pub fn is_affine(&self) -> bool {
        matches!(
            self,
            FeasibleSet::WholeSpace { .. } | FeasibleSet::HyperplaneMoment { .. }
        )
    }

    /// For affine sets, the orthogonal projection of `v` onto the direction space.
    pub fn tangent_projection(&self, v: &DenseVector) -> Result<Option<DenseVector>> {
        check_dim(self.dim(), v.dim())?;
        Ok(match self {
            FeasibleSet::WholeSpace { .. } => Some(v.clone()),
            FeasibleSet::HyperplaneMoment { grid, .. } => {
                let c = grid.moment_weights();
                let coef = dot(&c, v.as_slice()) / dot(&c, &c);
                Some(
                    v.iter()
                        .zip(&c)
                        .map(|(vi, ci)| vi - coef * ci)
                        .collect(),
                )
            }
            _ => None,
        })
    }

    /// Largest constraint violation of `x` (0 when feasible).
    pub fn infeasibility(&self, x: &DenseVector) -> Result<f64> {
        check_dim(self.dim(), x.dim())?;
        Ok(match self {
            FeasibleSet::WholeSpace { .. } => 0.0,
            FeasibleSet::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(v, (l, h))| (l - v).max(v - h).max(0.0))
                .fold(0.0, f64::max),
            FeasibleSet::Halfspace { normal, anchor } => {
                normal.inner_product(&x.sub(anchor)?)?.max(0.0) / normal.norm()
            }
            FeasibleSet::HyperplaneMoment { grid, level } => {
                let c = grid.moment_weights();
                (dot(&c, x.as_slice()) - level).abs() / dot(&c, &c).sqrt()
            }
            FeasibleSet::Polyhedron { matrix, rhs, .. } => polyhedron_violation(matrix, rhs, x),
        })
    }

    pub fn contains(&self, x: &DenseVector, tol: f64) -> Result<bool> {
        Ok(self.infeasibility(x)? <= tol)
    }

    /// Nearest point of the set to `x`.
    ///
    /// Fails with [`Error::ProjectionNotConverged`] when an iterative projector hits its sweep cap.
    pub fn project(&self, x: &DenseVector) -> Result<ProjectionReport> {
        check_dim(self.dim(), x.dim())?;
        let exact = |point: DenseVector| ProjectionReport {
            point,
            exact: true,
            sweeps: 0,
            residual_infeasibility: 0.0,
            converged: true,
        };
        match self {
            FeasibleSet::WholeSpace { .. } => Ok(exact(x.clone())),
            FeasibleSet::Box { lo, hi } => Ok(exact(
                x.iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(v, (l, h))| v.max(*l).min(*h))
                    .collect(),
            )),
            FeasibleSet::Halfspace { normal, anchor } => {
                Ok(exact(project_halfspace(normal, anchor, x)?))
            }
            FeasibleSet::HyperplaneMoment { grid, level } => {
                let p = project_moment_hyperplane(x, grid, *level)?;
                let mut report = exact(p);
                report.residual_infeasibility = self.infeasibility(&report.point)?;
                Ok(report)
            }
            FeasibleSet::Polyhedron {
                matrix,
                rhs,
                settings,
            } => {
                let report = project_polyhedron_dykstra(matrix, rhs, x, settings)?;
                if report.converged {
                    Ok(report)
                } else {
                    Err(Error::ProjectionNotConverged {
                        sweeps: report.sweeps,
                        infeasibility: report.residual_infeasibility,
                    })
                }
            }
        }
    }
}

/// Projection of `w` onto `{x : ⟨g, x − y0⟩ ≤ 0}`:
/// `w − (max(0, ⟨g, w − y0⟩) / ‖g‖²) g`.
pub fn project_halfspace(g: &DenseVector, y0: &DenseVector, w: &DenseVector) -> Result<DenseVector> {
    check_dim(g.dim(), y0.dim())?;
    check_dim(g.dim(), w.dim())?;
    let gg = g.norm_squared();
    if gg == 0.0 {
        return Err(Error::ZeroNormal);
    }
    let excess: f64 = g
        .iter()
        .zip(w.iter().zip(y0.iter()))
        .map(|(gi, (wi, yi))| gi * (wi - yi))
        .sum();
    if excess <= 0.0 {
        return Ok(w.clone());
    }
    w.add_scaled(-excess / gg, g)
}

/// Projection onto `{x : ⟨c, x⟩ = level}` with `c` the moment weights of `grid`:
/// `x − ((⟨c, x⟩ − level) / ⟨c, t⟩) t`, the discrete form of
/// `x(t) − (∫ t x − level)/(∫ t²) · t`.
pub fn project_moment_hyperplane(
    x: &DenseVector,
    grid: &UniformGrid,
    level: f64,
) -> Result<DenseVector> {
    check_dim(grid.len(), x.dim())?;
    let c = grid.moment_weights();
    let coef = (dot(&c, x.as_slice()) - level) / dot(&c, &c);
    Ok(x.iter().zip(&c).map(|(xi, ci)| xi - coef * ci).collect())
}

fn polyhedron_violation(a: &Matrix, b: &DenseVector, x: &DenseVector) -> f64 {
    (0..a.rows())
        .map(|i| dot(a.row(i), x.as_slice()) - b[i])
        .fold(0.0, f64::max)
}

/// Dykstra's alternating projections onto `⋂ {x : ⟨a_i, x⟩ ≤ b_i}`.
pub fn project_polyhedron_dykstra(
    a: &Matrix,
    b: &DenseVector,
    x: &DenseVector,
    settings: &DykstraSettings,
) -> Result<ProjectionReport> {
    check_dim(a.rows(), b.dim())?;
    check_dim(a.cols(), x.dim())?;
    let (k, n) = (a.rows(), a.cols());
    let row_norms: Vec<f64> = (0..k).map(|i| dot(a.row(i), a.row(i))).collect();

    let mut cur = x.as_slice().to_vec();
    let mut prev = vec![0.0; n];
    let mut v = vec![0.0; n];
    // Dykstra correction for each constraint.
    let mut incr = vec![0.0; k * n];

    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < settings.max_sweeps {
        sweeps += 1;
        prev.copy_from_slice(&cur);
        // x can stall for a whole sweep while the corrections still change, so
        // both must settle before stopping.
        let mut incr_change = 0.0;
        for i in 0..k {
            let p = &mut incr[i * n..(i + 1) * n];
            for ((vj, cj), pj) in v.iter_mut().zip(&cur).zip(p.iter()) {
                *vj = cj + pj;
            }
            if row_norms[i] == 0.0 {
                incr_change += p.iter().map(|q| q * q).sum::<f64>();
                p.fill(0.0);
                cur.copy_from_slice(&v);
                continue;
            }
            let row = a.row(i);
            let viol = dot(row, &v) - b[i];
            let step = if viol > 0.0 { viol / row_norms[i] } else { 0.0 };
            for j in 0..n {
                let new = v[j] - step * row[j];
                let corr = v[j] - new;
                incr_change += (corr - p[j]) * (corr - p[j]);
                p[j] = corr;
                cur[j] = new;
            }
        }
        let moved = cur
            .iter()
            .zip(&prev)
            .map(|(c, q)| (c - q) * (c - q))
            .sum::<f64>()
            .sqrt();
        if !(moved.is_finite() && incr_change.is_finite()) {
            return Err(Error::NonFinite {
                context: "polyhedron projection",
            });
        }
        if moved < settings.move_tol && incr_change.sqrt() < settings.move_tol {
            converged = true;
            break;
        }
    }
    let point = DenseVector::new(cur);
    let residual_infeasibility = polyhedron_violation(a, b, &point);
    Ok(ProjectionReport {
        point,
        exact: false,
        sweeps,
        residual_infeasibility,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DenseVector {
        DenseVector::from(x)
    }

    #[test]
    fn box_clamps_entrywise() {
        let set = FeasibleSet::uniform_box(10, 1.0, 40.0).unwrap();
        let pattern = [0.0, 20.0, 99.0];
        let x: DenseVector = (0..10).map(|i| pattern[i % 3]).collect();
        let p = set.project(&x).unwrap();
        assert!(p.exact);
        let expected = [1.0, 20.0, 40.0];
        for (i, pi) in p.point.iter().enumerate() {
            assert_eq!(*pi, expected[i % 3]);
        }
    }

    #[test]
    fn box_with_infinite_upper_bound() {
        let set = FeasibleSet::new_box(vec![0.0], vec![f64::INFINITY]).unwrap();
        assert_eq!(set.project(&v(&[-3.0])).unwrap().point[0], 0.0);
        assert_eq!(set.project(&v(&[2.0])).unwrap().point[0], 2.0);
    }

    #[test]
    fn invalid_sets_rejected() {
        assert!(FeasibleSet::new_box(vec![2.0], vec![1.0]).is_err());
        assert_eq!(
            FeasibleSet::halfspace(v(&[0.0, 0.0]), v(&[1.0, 1.0])).unwrap_err(),
            Error::ZeroNormal
        );
        let a = Matrix::from_rows(&[vec![0.0, 0.0]]).unwrap();
        assert!(FeasibleSet::polyhedron(a, v(&[-1.0])).is_err());
    }

    #[test]
    fn feasible_points_are_fixed() {
        let grid = UniformGrid::new(8).unwrap();
        let on_plane = project_moment_hyperplane(&DenseVector::zeros(8), &grid, 2.0).unwrap();
        let sets = [
            (FeasibleSet::uniform_box(2, -1.0, 1.0).unwrap(), v(&[0.5, -0.25])),
            (
                FeasibleSet::halfspace(v(&[1.0, 1.0]), v(&[0.0, 0.0])).unwrap(),
                v(&[-1.0, 0.5]),
            ),
            (FeasibleSet::whole_space(2), v(&[3.0, 4.0])),
            (FeasibleSet::moment_hyperplane(grid, 2.0), on_plane.clone()),
        ];
        for (set, x) in sets {
            let p = set.project(&x).unwrap();
            assert!(p.point.distance(&x).unwrap() <= 1e-12 * (1.0 + x.norm()), "{:?}", set.kind());
            assert!(p.residual_infeasibility <= 1e-12);
        }
    }

    #[test]
    fn halfspace_examples() {
        let g = v(&[1.0, 0.0]);
        let y0 = v(&[0.0, 0.0]);
        assert_eq!(project_halfspace(&g, &y0, &v(&[2.0, 3.0])).unwrap(), v(&[0.0, 3.0]));
        assert_eq!(project_halfspace(&g, &y0, &v(&[-2.0, 3.0])).unwrap(), v(&[-2.0, 3.0]));
        assert_eq!(
            project_halfspace(&v(&[0.0, 0.0]), &y0, &v(&[1.0, 1.0])).unwrap_err(),
            Error::ZeroNormal
        );
    }

    #[test]
    fn halfspace_projection_is_optimal() {
        // ⟨w − p, q − p⟩ ≤ 0 for every feasible q.
        let g = v(&[1.0, 0.0]);
        let y0 = v(&[0.0, 0.0]);
        let w = v(&[2.0, 3.0]);
        let p = project_halfspace(&g, &y0, &w).unwrap();
        let wp = w.sub(&p).unwrap();
        for i in 0..50 {
            let q = v(&[-(i as f64) * 0.37, (i as f64) * 0.53 - 7.0]);
            assert!(wp.inner_product(&q.sub(&p).unwrap()).unwrap() <= 0.0);
        }
    }

    #[test]
    fn moment_projection_of_zero_is_six_t() {
        let grid = UniformGrid::new(100).unwrap();
        let p = project_moment_hyperplane(&DenseVector::zeros(100), &grid, 2.0).unwrap();
        let c = grid.moment_weights();
        assert!((dot(&c, p.as_slice()) - 2.0).abs() < 1e-12);
        // Discrete ∫t² = h Σ t_i² = 1/3 + h/2 + h²/6, so p = 2t / that ≈ 6t up to O(h).
        let h = grid.spacing();
        let denom = 1.0 / 3.0 + h / 2.0 + h * h / 6.0;
        for (pi, t) in p.iter().zip(grid.nodes()) {
            assert!((pi - 2.0 * t / denom).abs() < 1e-12);
            assert!((pi - 6.0 * t).abs() <= 9.0 * h * t);
        }
        let again = project_moment_hyperplane(&p, &grid, 2.0).unwrap();
        assert!(again.distance(&p).unwrap() < 1e-12);
    }

    #[test]
    fn tangent_projection_is_orthogonal_to_weights() {
        let grid = UniformGrid::new(20).unwrap();
        let set = FeasibleSet::moment_hyperplane(grid, 2.0);
        let x: DenseVector = (0..20).map(|i| (i as f64).sin()).collect();
        let t = set.tangent_projection(&x).unwrap().unwrap();
        assert!(dot(&grid.moment_weights(), t.as_slice()).abs() < 1e-14);
        assert!(FeasibleSet::uniform_box(20, 0.0, 1.0)
            .unwrap()
            .tangent_projection(&x)
            .unwrap()
            .is_none());
    }

    #[test]
    fn dykstra_two_constraints() {
        let a = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let r = project_polyhedron_dykstra(&a, &v(&[1.0, 1.0]), &v(&[2.0, 2.0]), &Default::default())
            .unwrap();
        assert!(r.converged);
        assert!(r.point.distance(&v(&[1.0, 1.0])).unwrap() < 1e-12);
    }

    #[test]
    fn dykstra_feasible_input_takes_one_sweep() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![-1.0, 0.5], vec![0.3, -0.7]]).unwrap();
        let x = v(&[0.1, 0.1]);
        let r = project_polyhedron_dykstra(&a, &v(&[1.0, 1.0, 1.0]), &x, &Default::default()).unwrap();
        assert_eq!(r.sweeps, 1);
        assert_eq!(r.point, x);
        assert_eq!(r.residual_infeasibility, 0.0);
    }

    #[test]
    fn dykstra_single_constraint_matches_halfspace() {
        let g = v(&[0.6, -1.3, 2.0]);
        let y0 = v(&[0.5, 0.25, 1.0]);
        let b = g.inner_product(&y0).unwrap();
        let a = Matrix::from_rows(&[g.as_slice().to_vec()]).unwrap();
        for w in [v(&[3.0, -1.0, 4.0]), v(&[-2.0, 0.0, 0.0]), v(&[10.0, 10.0, 10.0])] {
            let d = project_polyhedron_dykstra(&a, &v(&[b]), &w, &Default::default()).unwrap();
            let h = project_halfspace(&g, &y0, &w).unwrap();
            assert!(d.point.distance(&h).unwrap() < 1e-12);
        }
    }

    #[test]
    fn dykstra_reports_sweep_cap() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        let settings = DykstraSettings {
            move_tol: 0.0,
            max_sweeps: 3,
        };
        let set = FeasibleSet::Polyhedron {
            matrix: a.clone(),
            rhs: v(&[1.0, 0.0, 0.0]),
            settings,
        };
        let r = project_polyhedron_dykstra(&a, &v(&[1.0, 0.0, 0.0]), &v(&[5.0, -3.0]), &settings)
            .unwrap();
        assert!(!r.converged);
        assert_eq!(r.sweeps, 3);
        assert!(matches!(
            set.project(&v(&[5.0, -3.0])),
            Err(Error::ProjectionNotConverged { sweeps: 3, .. })
        ));
    }
}
