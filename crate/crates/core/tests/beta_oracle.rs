//! Optimal Robin coefficients on a non-rectangular polygon against the
//! adaptive polar-quadrature reference.

use grf_core::greens::{make_params, phi_eval};
use grf_core::mesh::{affine_transform, build_structured_mesh, extract_boundary, parallelogram_map, MeshKind};
use grf_core::robin::{optimal_beta_field, QuadratureMethod};
use grf_oracle::beta::beta_tilde_polygon;

#[test]
fn parallelogram_edge_matches_reference() {
    let square = build_structured_mesh(MeshKind::Square, 128).unwrap();
    let (a, b) = parallelogram_map();
    let mesh = affine_transform(&square, &a, &b).unwrap();
    let boundary = extract_boundary(&mesh);
    let p = make_params(1.0, 121.0, 2, 2).unwrap();
    let p1 = p.with_power(1).unwrap();
    let phi = move |r: f64| {
        let (x, dx) = phi_eval(&p1, 1, r).unwrap();
        let (y, dy) = phi_eval(&p, 2, r).unwrap();
        [x, dx, y, dy]
    };
    let polygon = [[0.0, 0.0], [a[0], a[2]], [a[0] + a[1], a[2] + a[3]], [a[1], a[3]]];
    let centers = optimal_beta_field(&mesh, &boundary, &p, &QuadratureMethod::element_centers()).unwrap();
    let radial = optimal_beta_field(&mesh, &boundary, &p, &QuadratureMethod::radial_projection()).unwrap();

    // points on the edge leaving the acute corner at the origin
    for t in [0.0, 0.0625, 0.25, 0.5] {
        let x = [t * a[0], t * a[2]];
        let q = (0..boundary.num_quad_points())
            .find(|&q| {
                let y = mesh.vertex(boundary.quad_vertex(q));
                let n = boundary.normal(q / 2);
                (y[0] - x[0]).abs() < 1e-12 && (y[1] - x[1]).abs() < 1e-12 && n[1] < 0.0 && n[0] > 0.0
            })
            .unwrap();
        let n = boundary.normal(q / 2);
        let reference = beta_tilde_polygon(&polygon, x, [n[0], n[1]], &phi, 1e-8);
        let ec = (centers.values()[q] / reference - 1.0).abs();
        let rp = (radial.values()[q] / reference - 1.0).abs();
        assert!(ec < 0.03, "t = {t}: element centers off by {ec}");
        assert!(rp < 0.015, "t = {t}: radial projection off by {rp}");
    }
}
