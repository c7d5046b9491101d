use std::f64::consts::PI;
use std::sync::Arc;

use slepian_core::experiment::sample_rhs;
use slepian_core::problems::{circle_identity, circle_ill_posed, coupled_fields, sphere_downward_continuation};
use slepian_core::regularization::{scaling_coefficients, tsvd_solve, FilterSpec};
use slepian_core::report::write_spectrum;
use slepian_core::rng::NormalStream;
use slepian_core::Layout;

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[test]
fn noiseless_data_from_kept_modes_is_recovered() {
    for instance in [circle_identity(50, 1001).unwrap(), circle_ill_posed(50, 1001).unwrap()] {
        let sys = instance.build().unwrap();
        let c = NormalStream::new(1, 21).normals(sys.kept());
        let f = sys.synthesize(&c).unwrap();
        let data = sample_rhs(&instance, &f, Arc::clone(&instance.region), 0.0, 0).unwrap();

        let mut last = f64::INFINITY;
        for scale in 0..=7 {
            let phi = scaling_coefficients(&sys, &data, &FilterSpec::Shannon, scale).unwrap();
            let err = distance(phi.coefficients(), &f);
            assert!(err <= last + 1e-10, "{} J={scale}: {err} > {last}", instance.name);
            last = err;
        }
        let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(last < 1e-8 * norm, "{}: {last}", instance.name);
        let tsvd = tsvd_solve(&sys, &data, sys.kept()).unwrap();
        assert!(distance(tsvd.coefficients(), &f) < 1e-8 * norm);
    }
}

#[test]
fn eigenvalues_bounded_by_largest_squared_sigma() {
    let instances = [
        circle_identity(30, 601).unwrap(),
        circle_ill_posed(30, 601).unwrap(),
        sphere_downward_continuation(8, 6371.0, 6771.0, PI / 4.0).unwrap(),
    ];
    for p in instances {
        let sys = p.build_with_threshold(0.0).unwrap();
        let top = p.operator.sigmas().iter().fold(0.0f64, |m, s| m.max(s * s));
        assert!(sys.rhos().iter().all(|r| *r >= 0.0 && *r <= top + 1e-12), "{}", p.name);
    }
}

#[test]
fn spectra_are_deterministic() {
    let csv = || {
        let sys = coupled_fields(4, 6371.0, 6771.0, 10_000.0, PI / 3.0, Layout::Interleaved)
            .unwrap()
            .build()
            .unwrap();
        let mut buf = Vec::new();
        write_spectrum(&mut buf, sys.rhos(), sys.taus()).unwrap();
        buf
    };
    assert_eq!(csv(), csv());
}

#[test]
fn singular_values_diagonalize_the_projected_operator() {
    // P T g_k = τ_k h_k at every region node
    let instance = circle_ill_posed(20, 401).unwrap();
    let sys = instance.build().unwrap();
    let nodes = sys.region().nodes();
    let h = sys.h_matrix(nodes).unwrap();
    for k in 0..sys.kept() {
        let g = sys.coefficients().column(k).iter().copied().collect::<Vec<_>>();
        let ptg = instance.operator.restrict_on(&g, sys.region()).unwrap();
        for (i, v) in ptg.iter().enumerate() {
            assert!((v - sys.taus()[k] * h[(i, k)]).abs() < 1e-9, "mode {k} node {i}");
        }
    }
}
