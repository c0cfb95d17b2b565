//! Trilinear hexahedral element integrals by mapped Gauss quadrature.

use crate::error::{Error, Result};
use crate::mesh::shape::{det3, inv3, jacobian, shape_gradients, shape_values};
use crate::physics::Vec3;

/// Tensor-product Gauss rule on [-1, 1]³.
#[derive(Debug, Clone)]
pub struct QuadRule {
    points: Vec<(Vec3, f64)>,
}

impl QuadRule {
    /// `order` Gauss points per direction; supported orders are 2 and 3.
    pub fn gauss(order: usize) -> Result<QuadRule> {
        let line: Vec<(f64, f64)> = match order {
            2 => {
                let p = 1.0 / 3.0f64.sqrt();
                vec![(-p, 1.0), (p, 1.0)]
            }
            3 => {
                let p = (3.0f64 / 5.0).sqrt();
                vec![(-p, 5.0 / 9.0), (0.0, 8.0 / 9.0), (p, 5.0 / 9.0)]
            }
            other => {
                return Err(Error::config(format!(
                    "quadrature order must be 2 or 3, got {other}"
                )))
            }
        };
        let mut points = Vec::with_capacity(order * order * order);
        for &(z, wz) in &line {
            for &(y, wy) in &line {
                for &(x, wx) in &line {
                    points.push(([x, y, z], wx * wy * wz));
                }
            }
        }
        Ok(QuadRule { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[(Vec3, f64)] {
        &self.points
    }
}

/// Per-quadrature-point geometry of one cell: shape values, physical
/// gradients and the weighted Jacobian determinant.
pub(crate) struct CellGeometry {
    pub n: Vec<[f64; 8]>,
    pub grad: Vec<[[f64; 3]; 8]>,
    pub weight: Vec<f64>,
}

impl CellGeometry {
    /// Returns `None` if the Jacobian is nonpositive at any point.
    pub fn new(nodes: &[[f64; 3]; 8], rule: &QuadRule) -> Option<CellGeometry> {
        let m = rule.len();
        let mut geo = CellGeometry {
            n: Vec::with_capacity(m),
            grad: Vec::with_capacity(m),
            weight: Vec::with_capacity(m),
        };
        for &(xi, w) in rule.points() {
            let j = jacobian(nodes, xi);
            let det = det3(&j);
            if det <= 0.0 {
                return None;
            }
            let jinv = inv3(&j, det);
            let gref = shape_gradients(xi);
            let mut gphys = [[0.0; 3]; 8];
            for a in 0..8 {
                for d in 0..3 {
                    // dN/dx_d = dN/dxi_e * dxi_e/dx_d = jinv[e][d] convention:
                    // jinv is the inverse of dx/dxi, so dxi/dx = jinv and
                    // dN/dx = (dN/dxi) · jinv.
                    gphys[a][d] = gref[a][0] * jinv[0][d]
                        + gref[a][1] * jinv[1][d]
                        + gref[a][2] * jinv[2][d];
                }
            }
            geo.n.push(shape_values(xi));
            geo.grad.push(gphys);
            geo.weight.push(w * det);
        }
        Some(geo)
    }

    /// Gradient of a nodal field at quadrature point `q`.
    pub fn field_gradient(&self, q: usize, nodal: &[f64; 8]) -> Vec3 {
        let g = &self.grad[q];
        let mut out = [0.0; 3];
        for a in 0..8 {
            for d in 0..3 {
                out[d] += g[a][d] * nodal[a];
            }
        }
        out
    }
}

/// Element matrices of one hexahedron, stored row-major as flat 64-vectors.
///
/// `mass[a][b] = ∫ N_a N_b`, `stiffness[a][b] = ∫ ∇N_a·∇N_b`,
/// `advection[a][b] = ∫ N_a (v·∇N_b)` with the supplied per-point velocity,
/// and `load[a] = ∫ ∂N_a/∂z` (the body-force integral the buoyant term
/// scales).
#[derive(Debug, Clone)]
pub struct ElementMatrices {
    pub mass: [f64; 64],
    pub stiffness: [f64; 64],
    pub advection: [f64; 64],
    pub load: [f64; 8],
}

pub(crate) fn element_integrals(
    geo: &CellGeometry,
    velocity_at_qp: Option<&[Vec3]>,
) -> ElementMatrices {
    let mut m = [0.0; 64];
    let mut a_ = [0.0; 64];
    let mut c = [0.0; 64];
    let mut load = [0.0; 8];
    for q in 0..geo.weight.len() {
        let w = geo.weight[q];
        let n = &geo.n[q];
        let g = &geo.grad[q];
        for a in 0..8 {
            load[a] += w * g[a][2];
            for b in 0..8 {
                let idx = a * 8 + b;
                m[idx] += w * n[a] * n[b];
                a_[idx] += w * (g[a][0] * g[b][0] + g[a][1] * g[b][1] + g[a][2] * g[b][2]);
            }
        }
        if let Some(velocities) = velocity_at_qp {
            let v = velocities[q];
            let mut vdotg = [0.0; 8];
            for b in 0..8 {
                vdotg[b] = v[0] * g[b][0] + v[1] * g[b][1] + v[2] * g[b][2];
            }
            for a in 0..8 {
                for b in 0..8 {
                    c[a * 8 + b] += w * n[a] * vdotg[b];
                }
            }
        }
    }
    ElementMatrices {
        mass: m,
        stiffness: a_,
        advection: c,
        load,
    }
}

/// Mapped Gauss integration of the element mass, stiffness and advection
/// matrices. `velocity_at_qp` supplies the advective velocity at each
/// quadrature point of `rule` (in rule order).
pub fn element_matrices(
    nodes: &[[f64; 3]; 8],
    velocity_at_qp: &[Vec3],
    rule: &QuadRule,
) -> Result<ElementMatrices> {
    if velocity_at_qp.len() != rule.len() {
        return Err(Error::config(format!(
            "expected {} quadrature-point velocities, got {}",
            rule.len(),
            velocity_at_qp.len()
        )));
    }
    let geo = CellGeometry::new(nodes, rule)
        .ok_or_else(|| Error::mesh("nonpositive Jacobian in element".to_string()))?;
    Ok(element_integrals(&geo, Some(velocity_at_qp)))
}

/// Streamline-upwind terms: a mass-like matrix `∫ τ(v·∇N_a) N_b` and a
/// stabilization matrix `∫ τ(v·∇N_a)(v·∇N_b)`, with
/// `τ = h_s/(2|v|)·min(1, Pe/3)` and the streamline length
/// `h_s = 2|v| / Σ_a |v·∇N_a|`.
pub(crate) fn element_supg_terms(
    geo: &CellGeometry,
    velocity_at_qp: &[Vec3],
    diffusivity: f64,
) -> ([f64; 64], [f64; 64]) {
    let mut ms = [0.0; 64];
    let mut cs = [0.0; 64];
    for q in 0..geo.weight.len() {
        let v = velocity_at_qp[q];
        let speed = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if speed == 0.0 {
            continue;
        }
        let g = &geo.grad[q];
        let n = &geo.n[q];
        let w = geo.weight[q];
        let mut vdotg = [0.0; 8];
        let mut denom = 0.0;
        for a in 0..8 {
            vdotg[a] = v[0] * g[a][0] + v[1] * g[a][1] + v[2] * g[a][2];
            denom += vdotg[a].abs();
        }
        if denom == 0.0 {
            continue;
        }
        let h_s = 2.0 * speed / denom;
        let peclet = speed * h_s / (2.0 * diffusivity);
        let tau = h_s / (2.0 * speed) * (peclet / 3.0).min(1.0);
        for a in 0..8 {
            let wa = w * tau * vdotg[a];
            for b in 0..8 {
                let idx = a * 8 + b;
                ms[idx] += wa * n[b];
                cs[idx] += wa * vdotg[b];
            }
        }
    }
    (ms, cs)
}

/// ∫ N_a dA over a boundary quad for its four corner nodes, by 2×2 Gauss on
/// the bilinear surface map.
pub fn quad_face_integrals(corners: &[[f64; 3]; 4]) -> [f64; 4] {
    let gp = 1.0 / 3.0f64.sqrt();
    let mut out = [0.0; 4];
    for &u in &[-gp, gp] {
        for &v in &[-gp, gp] {
            let n = [
                0.25 * (1.0 - u) * (1.0 - v),
                0.25 * (1.0 + u) * (1.0 - v),
                0.25 * (1.0 + u) * (1.0 + v),
                0.25 * (1.0 - u) * (1.0 + v),
            ];
            let dn_du = [
                -0.25 * (1.0 - v),
                0.25 * (1.0 - v),
                0.25 * (1.0 + v),
                -0.25 * (1.0 + v),
            ];
            let dn_dv = [
                -0.25 * (1.0 - u),
                -0.25 * (1.0 + u),
                0.25 * (1.0 + u),
                0.25 * (1.0 - u),
            ];
            let mut tu = [0.0; 3];
            let mut tv = [0.0; 3];
            for a in 0..4 {
                for d in 0..3 {
                    tu[d] += dn_du[a] * corners[a][d];
                    tv[d] += dn_dv[a] * corners[a][d];
                }
            }
            let cross = [
                tu[1] * tv[2] - tu[2] * tv[1],
                tu[2] * tv[0] - tu[0] * tv[2],
                tu[0] * tv[1] - tu[1] * tv[0],
            ];
            let area = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
            for a in 0..4 {
                out[a] += n[a] * area;
            }
        }
    }
    out
}
