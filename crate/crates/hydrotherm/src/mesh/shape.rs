//! Trilinear (Q1) shape functions on the reference cube [-1, 1]³ and the
//! isoparametric geometry map. Node ordering follows the VTK hexahedron:
//! nodes 0-3 run counterclockwise on the bottom face, 4-7 above them.

/// Reference coordinates of the 8 nodes.
pub const NODE_XI: [[f64; 3]; 8] = [
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0],
    [1.0, 1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
];

/// Local node ids of the six faces: x−, x+, y−, y+, z− (bottom), z+ (top).
pub const HEX_FACES: [[usize; 4]; 6] = [
    [0, 3, 7, 4],
    [1, 2, 6, 5],
    [0, 1, 5, 4],
    [3, 2, 6, 7],
    [0, 1, 2, 3],
    [4, 5, 6, 7],
];

pub fn shape_values(xi: [f64; 3]) -> [f64; 8] {
    let mut n = [0.0; 8];
    for (a, na) in n.iter_mut().enumerate() {
        let s = NODE_XI[a];
        *na = 0.125 * (1.0 + s[0] * xi[0]) * (1.0 + s[1] * xi[1]) * (1.0 + s[2] * xi[2]);
    }
    n
}

/// Gradients with respect to the reference coordinates.
pub fn shape_gradients(xi: [f64; 3]) -> [[f64; 3]; 8] {
    let mut g = [[0.0; 3]; 8];
    for (a, ga) in g.iter_mut().enumerate() {
        let s = NODE_XI[a];
        ga[0] = 0.125 * s[0] * (1.0 + s[1] * xi[1]) * (1.0 + s[2] * xi[2]);
        ga[1] = 0.125 * (1.0 + s[0] * xi[0]) * s[1] * (1.0 + s[2] * xi[2]);
        ga[2] = 0.125 * (1.0 + s[0] * xi[0]) * (1.0 + s[1] * xi[1]) * s[2];
    }
    g
}

/// Physical position of a reference point under the isoparametric map.
pub fn map_point(nodes: &[[f64; 3]; 8], xi: [f64; 3]) -> [f64; 3] {
    let n = shape_values(xi);
    let mut x = [0.0; 3];
    for a in 0..8 {
        for d in 0..3 {
            x[d] += n[a] * nodes[a][d];
        }
    }
    x
}

/// Jacobian dx/dxi of the isoparametric map.
pub fn jacobian(nodes: &[[f64; 3]; 8], xi: [f64; 3]) -> [[f64; 3]; 3] {
    let g = shape_gradients(xi);
    let mut j = [[0.0; 3]; 3];
    for a in 0..8 {
        for row in 0..3 {
            for col in 0..3 {
                j[row][col] += nodes[a][row] * g[a][col];
            }
        }
    }
    j
}

pub fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Inverse of a 3x3 matrix given its (nonzero) determinant.
pub fn inv3(m: &[[f64; 3]; 3], det: f64) -> [[f64; 3]; 3] {
    let d = 1.0 / det;
    [
        [
            (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * d,
            (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * d,
            (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * d,
        ],
        [
            (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * d,
            (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * d,
            (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * d,
        ],
        [
            (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * d,
            (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * d,
            (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * d,
        ],
    ]
}

/// Invert the isoparametric map by Newton iteration. Returns the reference
/// coordinates if the point lies inside the cell (within `tol` in reference
/// space).
pub fn invert_map(nodes: &[[f64; 3]; 8], x: [f64; 3], tol: f64) -> Option<[f64; 3]> {
    let mut xi = [0.0; 3];
    for _ in 0..20 {
        let pos = map_point(nodes, xi);
        let res = [x[0] - pos[0], x[1] - pos[1], x[2] - pos[2]];
        let j = jacobian(nodes, xi);
        let det = det3(&j);
        if det.abs() < 1e-300 {
            return None;
        }
        let inv = inv3(&j, det);
        let mut delta = [0.0; 3];
        for row in 0..3 {
            delta[row] = inv[row][0] * res[0] + inv[row][1] * res[1] + inv[row][2] * res[2];
        }
        for d in 0..3 {
            xi[d] += delta[d];
            // Keep Newton from wandering far outside the cell.
            xi[d] = xi[d].clamp(-4.0, 4.0);
        }
        if delta[0].abs() + delta[1].abs() + delta[2].abs() < 1e-13 {
            break;
        }
    }
    let inside = xi.iter().all(|&c| c.abs() <= 1.0 + tol);
    if !inside {
        return None;
    }
    // Reject if Newton did not actually converge to the query point.
    let pos = map_point(nodes, xi);
    let scale = nodes
        .iter()
        .flat_map(|n| n.iter())
        .fold(1.0f64, |m, &v| m.max(v.abs()));
    let err = (0..3).map(|d| (pos[d] - x[d]).abs()).fold(0.0f64, f64::max);
    if err > 1e-8 * scale {
        return None;
    }
    Some(xi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_cube() -> [[f64; 3]; 8] {
        let mut n = [[0.0; 3]; 8];
        for a in 0..8 {
            for d in 0..3 {
                n[a][d] = 0.5 * (NODE_XI[a][d] + 1.0);
            }
        }
        n
    }

    #[test]
    fn partition_of_unity() {
        let n = shape_values([0.3, -0.7, 0.1]);
        let sum: f64 = n.iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
        let g = shape_gradients([0.3, -0.7, 0.1]);
        for d in 0..3 {
            let s: f64 = g.iter().map(|ga| ga[d]).sum();
            assert!(s.abs() < 1e-15);
        }
    }

    #[test]
    fn nodes_interpolate_kronecker() {
        for a in 0..8 {
            let n = shape_values(NODE_XI[a]);
            for b in 0..8 {
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((n[b] - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn unit_cube_jacobian_is_half_identity() {
        let j = jacobian(&unit_cube(), [0.0, 0.0, 0.0]);
        for r in 0..3 {
            for c in 0..3 {
                let expect = if r == c { 0.5 } else { 0.0 };
                assert!((j[r][c] - expect).abs() < 1e-15);
            }
        }
        assert!((det3(&j) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn invert_map_recovers_interior_point() {
        let nodes = unit_cube();
        let xi = invert_map(&nodes, [0.25, 0.5, 0.75], 1e-10).unwrap();
        assert!((xi[0] + 0.5).abs() < 1e-12);
        assert!((xi[1] - 0.0).abs() < 1e-12);
        assert!((xi[2] - 0.5).abs() < 1e-12);
        assert!(invert_map(&nodes, [1.5, 0.5, 0.5], 1e-10).is_none());
    }
}
