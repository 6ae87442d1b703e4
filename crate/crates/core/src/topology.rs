//! User deployment in one BS sector and edge/center pairing.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::hungarian;

/// Annular sector around the BS. Cell-center users live in
/// `[min_radius, center_radius]`, cell-edge users in
/// `(center_radius, edge_radius]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellGeometry {
    pub center_radius: f64,
    pub edge_radius: f64,
    /// Keeps users out of the d -> 0 path-loss singularity.
    pub min_radius: f64,
    pub sector_start: f64,
    pub sector_end: f64,
}

impl Default for CellGeometry {
    fn default() -> Self {
        CellGeometry {
            center_radius: 3.0,
            edge_radius: 5.0,
            min_radius: 0.5,
            sector_start: -PI / 6.0,
            sector_end: PI / 2.0,
        }
    }
}

impl CellGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.min_radius
            && self.min_radius < self.center_radius
            && self.center_radius < self.edge_radius
            && self.edge_radius.is_finite())
        {
            return Err(Error::domain(
                "geometry needs 0 < min_radius < center_radius < edge_radius",
            ));
        }
        if !(self.sector_start < self.sector_end
            && self.sector_start >= -PI
            && self.sector_end <= PI)
        {
            return Err(Error::domain("sector must satisfy -pi <= start < end <= pi"));
        }
        Ok(())
    }
}

/// Polar position relative to the BS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserPosition {
    pub radius: f64,
    pub angle: f64,
}

impl UserPosition {
    pub fn cartesian(&self) -> [f64; 2] {
        [self.radius * self.angle.cos(), self.radius * self.angle.sin()]
    }

    pub fn distance_to(&self, other: &UserPosition) -> f64 {
        let [x0, y0] = self.cartesian();
        let [x1, y1] = other.cartesian();
        (x0 - x1).hypot(y0 - y1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub center_users: Vec<UserPosition>,
    pub edge_users: Vec<UserPosition>,
}

impl Deployment {
    pub fn pair_count(&self) -> usize {
        self.center_users.len()
    }
}

/// RNG for one Monte-Carlo trial: a fixed seed with one ChaCha stream per
/// trial, so trials can run in any order or in parallel.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Drops `pair_count` center users and as many edge users uniformly (by
/// area) over the sector.
pub fn deploy_users(seed: u64, geometry: &CellGeometry, pair_count: usize) -> Result<Deployment> {
    deploy_users_with(&mut trial_rng(seed, 0), geometry, pair_count)
}

/// Same as [`deploy_users`] but draws from `rng`. Users are drawn pair by
/// pair, so the first `K` pairs of a larger deployment from the same stream
/// coincide with a `K`-pair deployment.
pub fn deploy_users_with<R: Rng + ?Sized>(
    rng: &mut R,
    geometry: &CellGeometry,
    pair_count: usize,
) -> Result<Deployment> {
    if pair_count == 0 {
        return Err(Error::domain("need at least one user pair"));
    }
    geometry.validate()?;
    let mut center_users = Vec::with_capacity(pair_count);
    let mut edge_users = Vec::with_capacity(pair_count);
    for _ in 0..pair_count {
        // u in [0, 1): closed at min_radius
        let u = rng.gen::<f64>();
        let a = rng.gen::<f64>();
        center_users.push(UserPosition {
            radius: area_uniform_radius(u, geometry.min_radius, geometry.center_radius),
            angle: sector_angle(a, geometry),
        });
        // u in (0, 1]: open at center_radius
        let u = 1.0 - rng.gen::<f64>();
        let a = rng.gen::<f64>();
        edge_users.push(UserPosition {
            radius: area_uniform_radius(u, geometry.center_radius, geometry.edge_radius),
            angle: sector_angle(a, geometry),
        });
    }
    Ok(Deployment {
        center_users,
        edge_users,
    })
}

fn area_uniform_radius(u: f64, inner: f64, outer: f64) -> f64 {
    (u * (outer * outer - inner * inner) + inner * inner)
        .sqrt()
        .clamp(inner, outer)
}

fn sector_angle(u: f64, g: &CellGeometry) -> f64 {
    g.sector_start + u * (g.sector_end - g.sector_start)
}

/// Edge/center pairs with the minimum total side-link distance.
#[derive(Debug, Clone, PartialEq)]
pub struct Pairing {
    /// `(edge_index, center_index)`, ordered by edge index.
    pub assignments: Vec<(usize, usize)>,
    pub sidelink_distances: Vec<f64>,
    pub total_distance: f64,
}

pub fn distance_matrix(deployment: &Deployment) -> Vec<Vec<f64>> {
    deployment
        .edge_users
        .iter()
        .map(|e| deployment.center_users.iter().map(|c| e.distance_to(c)).collect())
        .collect()
}

pub fn pair_users(deployment: &Deployment) -> Result<Pairing> {
    if deployment.edge_users.len() != deployment.center_users.len() {
        return Err(Error::domain(format!(
            "need equal edge and center counts, got {} and {}",
            deployment.edge_users.len(),
            deployment.center_users.len()
        )));
    }
    let cost = distance_matrix(deployment);
    let a = hungarian(&cost)?;
    let assignments: Vec<(usize, usize)> = a.columns.iter().copied().enumerate().collect();
    let sidelink_distances = assignments.iter().map(|&(e, c)| cost[e][c]).collect();
    Ok(Pairing {
        assignments,
        sidelink_distances,
        total_distance: a.total_cost,
    })
}
