//! Symmetry and consistency properties over random shapes and designs.

use std::f64::consts::TAU;

use nalgebra::{Rotation3, Vector3};
use proptest::prelude::*;
use sandglass::geometry::{volume, Coords, DesignSpec, EdgeClass, Mesh, Realization, Skeleton};
use sandglass::origami::{crease_pattern, fold_assignment, CreaseStyle};
use sandglass::realize::realize;

fn shape() -> impl Strategy<Value = (usize, Coords)> {
    (3usize..=8, 0.05f64..1.5, -1.0f64..1.0, -1.5f64..1.5).prop_map(|(n, a, b, c)| (n, Coords::new(a, b, c)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mirror_is_the_same_shape((n, x) in shape()) {
        let sk = Skeleton::new(n).unwrap();
        let spec = DesignSpec::sandglass(n, 1.0, 1.0, 1.0).unwrap();
        let (a, b) = (Realization::new(spec, x), Realization::new(spec, x.mirror()));
        let (sa, sb) = (a.squared_edge_lengths(), b.squared_edge_lengths());
        for k in 0..3 {
            prop_assert!((sa[k] - sb[k]).abs() < 1e-12);
        }
        let (va, vb) = (volume(&Mesh::sandglass(&sk, &x)).unwrap(), volume(&Mesh::sandglass(&sk, &x.mirror())).unwrap());
        prop_assert!((va - vb).abs() < 1e-12 * (1.0 + va.abs()));
        prop_assert_eq!(x.canonical(), x.mirror().canonical());
    }

    #[test]
    fn rotation_by_one_step_permutes_vertices((n, x) in shape()) {
        let sk = Skeleton::new(n).unwrap();
        let v = Mesh::sandglass_vertices(&sk, &x);
        let rot = Rotation3::from_axis_angle(&Vector3::z_axis(), TAU / n as f64);
        for i in 0..n {
            for idx in [Mesh::a as fn(usize, usize) -> usize, Mesh::b, Mesh::c, Mesh::d] {
                let moved = rot * v[idx(n, i)];
                prop_assert!((moved - v[idx(n, i + 1)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn edge_classes_share_lengths((n, x) in shape()) {
        let sk = Skeleton::new(n).unwrap();
        let mesh = Mesh::sandglass(&sk, &x);
        let s = sandglass::geometry::squared_edge_lengths(&sk, &x);
        for e in &mesh.edges {
            let l2 = (mesh.vertices[e.a] - mesh.vertices[e.b]).norm_squared();
            let expected = match e.class {
                EdgeClass::L1 | EdgeClass::L4 => s[0],
                EdgeClass::L2 => s[1],
                EdgeClass::L3 => s[2],
                EdgeClass::Skeleton => 1.0,
                EdgeClass::Spoke => sk.radius * sk.radius,
                EdgeClass::Other => continue,
            };
            prop_assert!((l2 - expected).abs() < 1e-12 * (1.0 + expected), "{:?}: {} vs {}", e.class, l2, expected);
        }
        prop_assert_eq!(mesh.edges.len(), 12 * n);
        mesh.check_closed().unwrap();
    }

    #[test]
    fn realizations_solve_the_equations(n in 3usize..=6, q1 in 0.3f64..3.0, q2 in 0.1f64..3.0) {
        let Ok(spec) = DesignSpec::origami(n, q1, q2) else { return Ok(()) };
        if let Ok(set) = realize(&spec) {
            for real in set.realizations() {
                prop_assert!(real.max_residual() < 1e-9);
                prop_assert!(real.coords.cap_z >= 0.0);
            }
        }
    }
}

fn crease_labels(svg: &str) -> Vec<String> {
    svg.lines()
        .filter_map(|l| l.split("class=\"crease ").nth(1))
        .map(|rest| rest.split('"').next().unwrap().to_string())
        .collect()
}

#[test]
fn crease_pattern_flips_under_mirror() {
    let mut checked = 0;
    for (n, q1, q2) in [(3, 0.75, 0.3), (4, 0.6, 0.4), (5, 1.2, 0.5)] {
        let spec = DesignSpec::origami(n, q1, q2).unwrap();
        let Ok(set) = realize(&spec) else { continue };
        for real in set.realizations() {
            let style = CreaseStyle::default();
            let a = crease_labels(&crease_pattern(&real, None, &style).unwrap());
            let b = crease_labels(&crease_pattern(&real.mirror(), None, &style).unwrap());
            assert_eq!(a.len(), 6 * n);
            assert_eq!(b.len(), 6 * n);
            for (x, y) in a.iter().zip(&b) {
                let flipped = if x.ends_with("mountain") {
                    x.replace("mountain", "valley")
                } else if x.ends_with("valley") {
                    x.replace("valley", "mountain")
                } else {
                    x.clone()
                };
                assert_eq!(&flipped, y);
            }
            let fa = fold_assignment(&real, None).unwrap();
            let fb = fold_assignment(&real.mirror(), None).unwrap();
            for (edge, fold) in &fa {
                assert_eq!(fold.swapped(), fb[edge]);
            }
            checked += 1;
        }
    }
    assert!(checked >= 3, "only {checked} realizations");
}
