//! Lattice grids over truncated cone regions.

use std::collections::HashMap;
use std::sync::OnceLock;

use sha2::{Digest, Sha256};

use crate::cones::Cone;
use crate::error::{Error, Result};
use crate::point::Point;

/// Membership slack used when deciding which lattice points belong to the grid.
pub const GRID_TOL: f64 = 1e-9;

/// Default hard cap on the number of nodes.
pub const NODE_BUDGET: usize = 2_000_000;

/// Lattice points of pitch `h` inside a truncation region, filtered by cone membership.
///
/// The region is the box `[0, R]^d` for the orthant and the Euclidean ball of
/// radius `R` (in vectorized coordinates) for the PSD and Lorentz cones. Nodes
/// are stored in lexicographic order of their lattice indices, last axis fastest.
#[derive(Debug)]
pub struct Grid {
    cone: Cone,
    radius: f64,
    spacing: f64,
    dim: usize,
    coords: Vec<f64>,
    lattice: Vec<i32>,
    /// Points per axis when the grid is a full orthant box.
    box_side: Option<usize>,
    index: OnceLock<HashMap<Vec<i32>, usize>>,
}

impl Clone for Grid {
    fn clone(&self) -> Self {
        Grid {
            cone: self.cone,
            radius: self.radius,
            spacing: self.spacing,
            dim: self.dim,
            coords: self.coords.clone(),
            lattice: self.lattice.clone(),
            box_side: self.box_side,
            index: OnceLock::new(),
        }
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.cone == other.cone
            && self.radius == other.radius
            && self.spacing == other.spacing
            && self.lattice == other.lattice
    }
}

pub fn build_grid(cone: Cone, radius: f64, spacing: f64) -> Result<Grid> {
    build_grid_with_budget(cone, radius, spacing, NODE_BUDGET)
}

pub fn build_grid_with_budget(
    cone: Cone,
    radius: f64,
    spacing: f64,
    budget: usize,
) -> Result<Grid> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "radius must be positive, got {radius}"
        )));
    }
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "spacing must be positive, got {spacing}"
        )));
    }
    if spacing > radius * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "spacing {spacing} exceeds radius {radius}"
        )));
    }
    let dim = cone.ambient_dim();
    let k = (radius / spacing + 1e-9).floor() as i64;
    if k > i32::MAX as i64 / 2 {
        return Err(Error::NodeBudgetExceeded { budget });
    }
    let k = k as i32;

    // per-axis index ranges; axes that the cone forces nonnegative start at 0
    let ranges: Vec<(i32, i32)> = match cone {
        Cone::Orthant(_) => vec![(0, k); dim],
        Cone::Psd(n) => (0..dim)
            .map(|a| if a < n { (0, k) } else { (-k, k) })
            .collect(),
        Cone::Lorentz(_) => (0..dim)
            .map(|a| if a == 0 { (0, k) } else { (-k, k) })
            .collect(),
    };
    let mut candidates: f64 = 1.0;
    for &(lo, hi) in &ranges {
        candidates *= (hi - lo + 1) as f64;
    }
    let is_box = matches!(cone, Cone::Orthant(_));
    // the ball-and-cone filter keeps a bounded fraction; refuse hopeless enumerations early
    let cap = if is_box {
        budget as f64
    } else {
        64.0 * budget as f64
    };
    if candidates > cap {
        return Err(Error::NodeBudgetExceeded { budget });
    }

    let r2 = radius * radius * (1.0 + 1e-12) + GRID_TOL;
    let mut coords = Vec::new();
    let mut lattice = Vec::new();
    let mut idx: Vec<i32> = ranges.iter().map(|r| r.0).collect();
    let mut x = vec![0.0; dim];
    let mut count = 0usize;
    loop {
        for a in 0..dim {
            x[a] = idx[a] as f64 * spacing;
        }
        let keep = is_box || {
            let n2: f64 = x.iter().map(|c| c * c).sum();
            n2 <= r2 && cone.contains_slice(&x, GRID_TOL)
        };
        if keep {
            count += 1;
            if count > budget {
                return Err(Error::NodeBudgetExceeded { budget });
            }
            coords.extend_from_slice(&x);
            lattice.extend_from_slice(&idx);
        }
        // odometer, last axis fastest
        let mut a = dim;
        loop {
            if a == 0 {
                let box_side = is_box.then_some(k as usize + 1);
                return Ok(Grid {
                    cone,
                    radius,
                    spacing,
                    dim,
                    coords,
                    lattice,
                    box_side,
                    index: OnceLock::new(),
                });
            }
            a -= 1;
            if idx[a] < ranges[a].1 {
                idx[a] += 1;
                break;
            }
            idx[a] = ranges[a].0;
        }
    }
}

impl Grid {
    /// A grid from explicit lattice-aligned cone members, kept in the given order.
    /// The origin must be among them.
    pub fn from_nodes(cone: Cone, spacing: f64, nodes: &[Point]) -> Result<Grid> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "spacing must be positive, got {spacing}"
            )));
        }
        if nodes.is_empty() {
            return Err(Error::Empty("grid nodes"));
        }
        let dim = cone.ambient_dim();
        let mut coords = Vec::with_capacity(nodes.len() * dim);
        let mut lattice = Vec::with_capacity(nodes.len() * dim);
        let mut radius: f64 = 0.0;
        let mut seen = HashMap::with_capacity(nodes.len());
        for (i, p) in nodes.iter().enumerate() {
            cone.check_dim(p.coords())?;
            if !cone.contains_slice(p.coords(), GRID_TOL) {
                return Err(Error::NotInCone(cone.to_string()));
            }
            let mut key = Vec::with_capacity(dim);
            for &c in p.coords() {
                let q = c / spacing;
                let r = q.round();
                if (q - r).abs() > 1e-6 || r.abs() > i32::MAX as f64 {
                    return Err(Error::InvalidParameter(format!(
                        "coordinate {c} is not on the lattice of spacing {spacing}"
                    )));
                }
                key.push(r as i32);
            }
            if seen.insert(key.clone(), i).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate node {i}")));
            }
            radius = radius.max(p.norm());
            coords.extend(key.iter().map(|&k| k as f64 * spacing));
            lattice.extend_from_slice(&key);
        }
        if !seen.contains_key(&vec![0; dim]) {
            return Err(Error::InvalidParameter(
                "grid nodes must include the origin".into(),
            ));
        }
        let box_side = detect_box(cone, dim, &lattice);
        if let Some(side) = box_side {
            radius = (side - 1) as f64 * spacing;
        }
        let index = OnceLock::new();
        let _ = index.set(seen);
        Ok(Grid {
            cone,
            radius: radius.max(spacing),
            spacing,
            dim,
            coords,
            lattice,
            box_side,
            index,
        })
    }

    pub fn cone(&self) -> Cone {
        self.cone
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.lattice.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn point(&self, i: usize) -> Point {
        Point::from_vec_unchecked(self.node(i).to_vec())
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub(crate) fn flat_coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn lattice_index(&self, i: usize) -> &[i32] {
        &self.lattice[i * self.dim..(i + 1) * self.dim]
    }

    /// Points per axis if this is a full orthant box grid.
    pub fn box_side(&self) -> Option<usize> {
        self.box_side
    }

    fn index(&self) -> &HashMap<Vec<i32>, usize> {
        self.index.get_or_init(|| {
            self.lattice
                .chunks_exact(self.dim)
                .enumerate()
                .map(|(i, k)| (k.to_vec(), i))
                .collect()
        })
    }

    pub fn lookup(&self, key: &[i32]) -> Option<usize> {
        if let Some(side) = self.box_side {
            let mut i = 0usize;
            for &k in key {
                if k < 0 || k as usize >= side {
                    return None;
                }
                i = i * side + k as usize;
            }
            return Some(i);
        }
        self.index().get(key).copied()
    }

    /// Index of the node at `x`, if `x` sits on the lattice (relative slack 1e-6).
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        if x.len() != self.dim {
            return None;
        }
        let mut key = Vec::with_capacity(self.dim);
        for &c in x {
            let q = c / self.spacing;
            let r = q.round();
            if (q - r).abs() > 1e-6 || r.abs() > i32::MAX as f64 {
                return None;
            }
            key.push(r as i32);
        }
        self.lookup(&key)
    }

    pub fn origin_index(&self) -> usize {
        self.lookup(&vec![0; self.dim])
            .expect("origin is always a node")
    }

    /// Neighbor `delta` steps along `axis`, if present.
    pub fn neighbor(&self, i: usize, axis: usize, delta: i32) -> Option<usize> {
        let mut key = self.lattice_index(i).to_vec();
        key[axis] += delta;
        self.lookup(&key)
    }

    /// Node whose lattice index is the sum of two nodes' indices, if present.
    pub fn sum_index(&self, i: usize, j: usize) -> Option<usize> {
        let key: Vec<i32> = self
            .lattice_index(i)
            .iter()
            .zip(self.lattice_index(j))
            .map(|(a, b)| a + b)
            .collect();
        self.lookup(&key)
    }

    /// Node at the midpoint of two nodes, if the midpoint is on the lattice and present.
    pub fn midpoint_index(&self, i: usize, j: usize) -> Option<usize> {
        let mut key = Vec::with_capacity(self.dim);
        for (a, b) in self.lattice_index(i).iter().zip(self.lattice_index(j)) {
            let s = a + b;
            if s % 2 != 0 {
                return None;
            }
            key.push(s / 2);
        }
        self.lookup(&key)
    }

    /// SHA-256 over the cone spec, spacing, and node coordinates.
    pub fn hash_hex(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.cone.to_string().as_bytes());
        h.update(self.spacing.to_bits().to_le_bytes());
        h.update(self.radius.to_bits().to_le_bytes());
        for c in &self.coords {
            h.update(c.to_bits().to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn detect_box(cone: Cone, dim: usize, lattice: &[i32]) -> Option<usize> {
    if !matches!(cone, Cone::Orthant(_)) {
        return None;
    }
    let n = lattice.len() / dim;
    let max = *lattice.iter().max()? as usize;
    let side = max + 1;
    if side.checked_pow(dim as u32)? != n {
        return None;
    }
    // must match the canonical lexicographic order exactly
    for (i, key) in lattice.chunks_exact(dim).enumerate() {
        let mut rem = i;
        for a in (0..dim).rev() {
            if key[a] as usize != rem % side {
                return None;
            }
            rem /= side;
        }
    }
    Some(side)
}
