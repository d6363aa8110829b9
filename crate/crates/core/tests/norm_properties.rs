use std::path::Path;

use normsphere::fixtures;
use normsphere::specfile::{parse_matrix, parse_spec};
use normsphere::{LinearMap2x2, Norm2D, NormSpec, Vector2};
use proptest::prelude::*;

fn any_direction() -> impl Strategy<Value = Vector2> {
    (0.0..std::f64::consts::TAU, 1e-3..1e3f64).prop_map(|(a, r)| Vector2::unit(a) * r)
}

fn norms() -> Vec<Norm2D> {
    fixtures::all().iter().map(|f| f.norm().unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn scaled_vectors_land_on_the_sphere(v in any_direction()) {
        for n in norms() {
            let q = n.scale_to_sphere(v).unwrap();
            prop_assert!((n.gauge(q) - 1.0).abs() <= 1e-10, "{:?}: {}", n.spec(), n.gauge(q));
        }
    }

    #[test]
    fn gauge_is_homogeneous_and_symmetric(v in any_direction(), k in -50.0..50.0f64) {
        prop_assume!(k.abs() > 1e-3);
        for n in norms() {
            let g = n.gauge(v);
            prop_assert!((n.gauge(v * k) - k.abs() * g).abs() <= 1e-10 * k.abs() * g);
            prop_assert!((n.gauge(-v) - g).abs() <= 1e-10 * g);
        }
    }

    #[test]
    fn triangle_inequality(u in any_direction(), v in any_direction()) {
        for n in norms() {
            prop_assert!(n.gauge(u + v) <= (n.gauge(u) + n.gauge(v)) * (1.0 + 1e-10));
        }
    }

    #[test]
    fn pushforward_moves_the_ball(v in any_direction(), e in prop::array::uniform4(-2.0..2.0f64)) {
        let m = LinearMap2x2::new(e[0], e[1], e[2], e[3]);
        prop_assume!(m.det().abs() > 0.1);
        let base = NormSpec::Lens { beta: 0.2 };
        let x = Norm2D::new(base.clone()).unwrap();
        let y = Norm2D::new(NormSpec::transform(base, m)).unwrap();
        let g = x.gauge(v);
        prop_assert!((y.gauge(m.apply(v)) - g).abs() <= 1e-10 * g.max(1.0));
        let z = x.pushforward(m).unwrap();
        prop_assert!((z.gauge(m.apply(v)) - g).abs() <= 1e-10 * g.max(1.0));
    }

    #[test]
    fn matrix_text_round_trips(e in prop::array::uniform4(-1e6..1e6f64)) {
        let text = format!("{:e},{:e},{:e},{:e}", e[0], e[1], e[2], e[3]);
        let m = parse_matrix(&text).unwrap();
        prop_assert_eq!(m.entries(), e);
    }

    #[test]
    fn lens_text_round_trips(beta in -0.3..0.3f64) {
        let spec = parse_spec(&format!("kind=lens\nbeta={beta:e}\n"), Path::new(".")).unwrap();
        prop_assert_eq!(spec, NormSpec::Lens { beta });
    }
}

#[test]
fn shipped_fixtures_satisfy_the_axioms() {
    for f in fixtures::all() {
        let r = f.norm().unwrap().validate_axioms(512).unwrap();
        assert!(r.passes(1e-8), "{}: {r:?}", f.name);
    }
}

#[test]
fn transform_files_resolve_their_base() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("lens0.norm"), "kind=lens\nbeta=0\n").unwrap();
    let sub = dir.path().join("sub");
    std::fs::create_dir(&sub).unwrap();
    std::fs::write(
        sub.join("sheared.norm"),
        "kind=transform\nbase=../lens0.norm\nmatrix=2,1,0,1\n",
    )
    .unwrap();
    let spec = normsphere::specfile::load_spec(&sub.join("sheared.norm")).unwrap();
    assert_eq!(
        spec,
        NormSpec::transform(
            NormSpec::Lens { beta: 0.0 },
            LinearMap2x2::new(2.0, 1.0, 0.0, 1.0)
        )
    );
}

#[test]
fn self_referencing_base_is_cut_off() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("loop.norm");
    std::fs::write(&p, "kind=transform\nbase=loop.norm\nmatrix=1,0,0,1\n").unwrap();
    let err = normsphere::specfile::load_spec(&p).unwrap_err();
    assert!(matches!(err, normsphere::Error::Parse { line: 2, .. }), "{err:?}");
}
