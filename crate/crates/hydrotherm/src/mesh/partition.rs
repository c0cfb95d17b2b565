//! Recursive coordinate bisection over cell centroids: deterministic,
//! dependency-free, and balanced to within one cell per worker. Each worker
//! also gets its ghost layer — the non-owned cells that share a node with an
//! owned cell — mirroring how a distributed assembly sees its neighbourhood.

use crate::error::{Error, Result};

use super::Mesh;

/// Assigns every cell an owner in `0..workers` and rebuilds the ghost
/// layers. Deterministic: repartitioning the same mesh with the same worker
/// count is bitwise identical.
pub fn partition(mesh: &mut Mesh, workers: usize) -> Result<()> {
    if workers == 0 {
        return Err(Error::config("worker count must be at least 1".to_string()));
    }
    if workers > mesh.cell_count() {
        return Err(Error::config(format!(
            "cannot partition {} cells over {workers} workers",
            mesh.cell_count()
        )));
    }

    let centroids: Vec<[f64; 3]> = (0..mesh.cell_count()).map(|c| mesh.cell_centroid(c)).collect();
    let mut owners = vec![0u32; mesh.cell_count()];
    let mut cells: Vec<u32> = (0..mesh.cell_count() as u32).collect();
    let n = cells.len();
    // Per-worker targets floor(n(i+1)/w) - floor(ni/w); every target is
    // floor(n/w) or ceil(n/w).
    let targets: Vec<usize> = (0..workers)
        .map(|i| n * (i + 1) / workers - n * i / workers)
        .collect();
    bisect(&centroids, &mut cells, &targets, 0, &mut owners);
    mesh.partition = owners;

    let adjacency = mesh.node_to_cells();
    let mut ghosts: Vec<Vec<u32>> = vec![Vec::new(); workers];
    for (cell, conn) in mesh.cells.iter().enumerate() {
        let owner = mesh.partition[cell];
        for &node in conn {
            for &neighbor in &adjacency[node as usize] {
                let w = mesh.partition[neighbor as usize];
                if w != owner {
                    // `neighbor` touches a cell owned by `owner`, so it is a
                    // ghost for that worker.
                    ghosts[owner as usize].push(neighbor);
                }
            }
        }
    }
    for g in &mut ghosts {
        g.sort_unstable();
        g.dedup();
    }
    mesh.ghost_cells = ghosts;
    Ok(())
}

fn bisect(
    centroids: &[[f64; 3]],
    cells: &mut [u32],
    targets: &[usize],
    first_worker: usize,
    owners: &mut [u32],
) {
    if targets.len() == 1 {
        for &c in cells.iter() {
            owners[c as usize] = first_worker as u32;
        }
        return;
    }
    // Longest axis of the centroid bounding box of this subset.
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for &c in cells.iter() {
        for d in 0..3 {
            lo[d] = lo[d].min(centroids[c as usize][d]);
            hi[d] = hi[d].max(centroids[c as usize][d]);
        }
    }
    let axis = (0..3)
        .max_by(|&a, &b| (hi[a] - lo[a]).partial_cmp(&(hi[b] - lo[b])).unwrap())
        .unwrap();
    cells.sort_unstable_by(|&a, &b| {
        centroids[a as usize][axis]
            .partial_cmp(&centroids[b as usize][axis])
            .unwrap()
            .then(a.cmp(&b))
    });
    let wl = targets.len() / 2;
    let nl: usize = targets[..wl].iter().sum();
    let (left, right) = cells.split_at_mut(nl);
    bisect(centroids, left, &targets[..wl], first_worker, owners);
    bisect(centroids, right, &targets[wl..], first_worker + wl, owners);
}
