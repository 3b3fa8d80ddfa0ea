//! Evaluation of `beta~(y) = -int (Pa dPb/dn + Pb dPa/dn) / (2 int Pa Pb)`
//! with `dP/dn (x) = P'(r) (y - x).n / r`, `r = |y - x|`.

use crate::error::{Error, Result};
use crate::geometry;
use crate::greens::{k0_k1, radial_greens_profile, FreeSpaceGreens, GreensParams, RadialProfile};
use crate::mesh::{BoundarySet, Mesh};

use super::{Cutoff, QuadratureKind, QuadratureMethod};

/// Closer than this to a quadrature point and the point is rejected.
const MIN_DISTANCE: f64 = 1e-12;

/// Precomputed data for evaluating `beta~` at many boundary points of one
/// mesh. Shareable across threads.
#[derive(Debug)]
pub struct BetaIntegrator<'a> {
    mesh: &'a Mesh,
    cutoff: Option<f64>,
    rule: Rule,
}

#[derive(Debug)]
enum Rule {
    Centers {
        centroids: Vec<f64>,
        volumes: Vec<f64>,
        a: FreeSpaceGreens,
        b: FreeSpaceGreens,
        dim: usize,
    },
    Radial {
        profile: RadialProfile,
        same: bool,
    },
}

impl<'a> BetaIntegrator<'a> {
    /// `params.p` selects the pair: `(Phi_1, Phi_2)` for `p = 2`,
    /// `(Phi_1, Phi_1)` for `p = 1`.
    pub fn new(
        mesh: &'a Mesh,
        boundary: &BoundarySet,
        params: &GreensParams,
        method: &QuadratureMethod,
    ) -> Result<Self> {
        if params.dim != mesh.dim() {
            return Err(Error::InvalidArgument(format!(
                "parameters are for d = {}, mesh has d = {}",
                params.dim,
                mesh.dim()
            )));
        }
        let ell = params.with_power(2)?.char_length()?;
        let cutoff = match method.cutoff {
            Cutoff::Full => None,
            Cutoff::Radius(r) => Some(r),
            Cutoff::CharLengths(c) => Some(c * ell),
        };
        if let Some(r) = cutoff {
            if !(r > 0.0) {
                return Err(Error::InvalidArgument(format!("cutoff radius must be > 0, got {r}")));
            }
        }
        let same = params.p == 1;
        let rule = match method.kind {
            QuadratureKind::ElementCenters => {
                let dim = mesh.dim();
                let mut centroids = Vec::with_capacity(mesh.num_cells() * dim);
                let mut volumes = Vec::with_capacity(mesh.num_cells());
                for c in 0..mesh.num_cells() {
                    centroids.extend(mesh.cell_centroid(c));
                    volumes.push(mesh.cell_volume(c));
                }
                let a = FreeSpaceGreens::new(params, 1)?;
                let b = FreeSpaceGreens::new(params, if same { 1 } else { 2 })?;
                Rule::Centers {
                    centroids,
                    volumes,
                    a,
                    b,
                    dim,
                }
            }
            QuadratureKind::RadialProjection => {
                let h = method.radial_h.unwrap_or_else(|| min_facet_edge(mesh, boundary));
                let r_max = method.radial_radius.unwrap_or(15.0 * ell);
                let profile = radial_greens_profile(mesh.dim(), params.gamma, params.alpha, h, r_max)?;
                Rule::Radial { profile, same }
            }
        };
        Ok(BetaIntegrator { mesh, cutoff, rule })
    }

    pub fn cutoff(&self) -> Option<f64> {
        self.cutoff
    }

    /// The radial profile, for the radial projection rule.
    pub fn profile(&self) -> Option<&RadialProfile> {
        match &self.rule {
            Rule::Radial { profile, .. } => Some(profile),
            Rule::Centers { .. } => None,
        }
    }

    /// `beta~(y)` for outward unit normal `n` (unclamped).
    pub fn beta_tilde(&self, y: &[f64], n: &[f64]) -> Result<f64> {
        let (num, den) = match &self.rule {
            Rule::Centers {
                centroids,
                volumes,
                a,
                b,
                dim,
            } => self.centers(y, n, centroids, volumes, a, b, *dim)?,
            Rule::Radial { profile, same } => self.radial(y, n, profile, *same),
        };
        if !(den > 0.0) || !den.is_finite() || !num.is_finite() {
            return Err(Error::DegenerateQuadrature {
                point: y.to_vec(),
                reason: format!("denominator {den:e}, numerator {num:e}"),
            });
        }
        Ok(-num / (2.0 * den))
    }

    #[allow(clippy::too_many_arguments)]
    fn centers(
        &self,
        y: &[f64],
        n: &[f64],
        centroids: &[f64],
        volumes: &[f64],
        a: &FreeSpaceGreens,
        b: &FreeSpaceGreens,
        dim: usize,
    ) -> Result<(f64, f64)> {
        let cut2 = self.cutoff.map_or(f64::INFINITY, |r| r * r);
        let kappa = a.kappa();
        let mut num = 0.0;
        let mut den = 0.0;
        for (c, &vol) in volumes.iter().enumerate() {
            let x = &centroids[c * dim..(c + 1) * dim];
            let mut r2 = 0.0;
            let mut proj = 0.0;
            for k in 0..dim {
                let d = y[k] - x[k];
                r2 += d * d;
                proj += d * n[k];
            }
            if r2 > cut2 {
                continue;
            }
            let r = r2.sqrt();
            if r < MIN_DISTANCE {
                return Err(Error::DegenerateQuadrature {
                    point: y.to_vec(),
                    reason: format!("cell {c} centroid coincides with the evaluation point"),
                });
            }
            let bessel = if dim == 2 { k0_k1(kappa * r) } else { (0.0, 0.0) };
            let (pa, da) = a.eval_with(r, bessel);
            let (pb, db) = b.eval_with(r, bessel);
            let s = proj / r;
            num += vol * (pa * db + pb * da) * s;
            den += vol * pa * pb;
        }
        Ok((num, den))
    }

    fn radial(&self, y: &[f64], n: &[f64], profile: &RadialProfile, same: bool) -> (f64, f64) {
        let mesh = self.mesh;
        let dim = mesh.dim();
        let rule = cell_rule(dim);
        let cut2 = self.cutoff.map_or(f64::INFINITY, |r| r * r);
        let mut num = 0.0;
        let mut den = 0.0;
        let mut x = [0.0; 3];
        for c in 0..mesh.num_cells() {
            let cell = mesh.cell(c);
            if self.cutoff.is_some() && geometry::distance(&mesh.cell_centroid(c), y).powi(2) > cut2 {
                continue;
            }
            let vol = mesh.cell_volume(c);
            for (lam, w) in rule {
                x[..dim].iter_mut().for_each(|v| *v = 0.0);
                for (k, &v) in cell.iter().enumerate() {
                    for (r, xr) in mesh.vertex(v).iter().enumerate() {
                        x[r] += lam[k] * xr;
                    }
                }
                let mut r2 = 0.0;
                let mut proj = 0.0;
                for k in 0..dim {
                    let d = y[k] - x[k];
                    r2 += d * d;
                    proj += d * n[k];
                }
                let r = r2.sqrt();
                let s = profile.eval(r);
                let t = if r > 0.0 { proj / r } else { 0.0 };
                let (pb, dpb) = if same { (s.phi1, s.dphi1) } else { (s.phi2, s.dphi2) };
                num += w * vol * (s.phi1 * dpb + pb * s.dphi1) * t;
                den += w * vol * s.phi1 * pb;
            }
        }
        (num, den)
    }
}

/// Barycentric points and weights (summing to one), exact for quadratics.
fn cell_rule(dim: usize) -> &'static [([f64; 4], f64)] {
    const G: f64 = 0.211_324_865_405_187_1;
    const A: f64 = 0.585_410_196_624_968_5;
    const B: f64 = 0.138_196_601_125_010_5;
    const LINE: [([f64; 4], f64); 2] = [([1.0 - G, G, 0.0, 0.0], 0.5), ([G, 1.0 - G, 0.0, 0.0], 0.5)];
    const TRI: [([f64; 4], f64); 3] = [
        ([0.5, 0.5, 0.0, 0.0], 1.0 / 3.0),
        ([0.0, 0.5, 0.5, 0.0], 1.0 / 3.0),
        ([0.5, 0.0, 0.5, 0.0], 1.0 / 3.0),
    ];
    const TET: [([f64; 4], f64); 4] = [
        ([A, B, B, B], 0.25),
        ([B, A, B, B], 0.25),
        ([B, B, A, B], 0.25),
        ([B, B, B, A], 0.25),
    ];
    match dim {
        1 => &LINE,
        2 => &TRI,
        _ => &TET,
    }
}

/// Shortest edge among boundary facets (shortest mesh edge in 1D).
fn min_facet_edge(mesh: &Mesh, boundary: &BoundarySet) -> f64 {
    if mesh.dim() == 1 {
        return mesh.min_edge_length();
    }
    let mut h = f64::INFINITY;
    for f in 0..boundary.num_facets() {
        let v = boundary.facet(f);
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                h = h.min(geometry::distance(mesh.vertex(v[i]), mesh.vertex(v[j])));
            }
        }
    }
    h
}
