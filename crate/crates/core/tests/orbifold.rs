use modorb::fixtures;
use modorb::linalg::{self, Complex};
use modorb::modular_data::{self, checks, Tolerances};
use modorb::perm_orbifold::{
    self, build_orbifold_datum, build_orbifold_datum_auto, canonical_rotation,
    orbifold_module_count, Convention, OrbifoldModuleLabel,
};
use modorb::restricted::{holomorphic_assemble, FiniteAbelianGroup, HolomorphicInput};
use modorb::{Error, ModularDatum};
use ndarray::array;

fn tol() -> Tolerances {
    Tolerances::default()
}

#[test]
fn module_count_matches_enumeration() {
    for n in 1usize..=4 {
        for k in [2, 3, 5, 7] {
            if n.pow(k as u32) > 3000 {
                continue;
            }
            let labels = perm_orbifold::orbifold_labels(n, k).unwrap();
            assert_eq!(labels.len(), orbifold_module_count(n, k), "n={n} k={k}");
        }
    }
}

#[test]
fn off_diagonal_orbits_cover_every_tuple_once() {
    // Each non-constant tuple lies in exactly one orbit of size k.
    let (n, k) = (3usize, 3usize);
    let labels = perm_orbifold::orbifold_labels(n, k).unwrap();
    let reps: Vec<Vec<usize>> = labels
        .iter()
        .filter_map(|l| match l {
            OrbifoldModuleLabel::OffDiagonal(t) => Some(t.clone()),
            _ => None,
        })
        .collect();
    let mut hit = 0;
    for x in 0..n.pow(k as u32) {
        let t: Vec<usize> = (0..k).map(|p| (x / n.pow(p as u32)) % n).collect();
        if t.iter().all(|&v| v == t[0]) {
            continue;
        }
        assert!(reps.contains(&canonical_rotation(&t)));
        hit += 1;
    }
    assert_eq!(hit, reps.len() * k);
}

#[test]
fn pipeline_validates_on_every_fixture_and_small_prime() {
    for name in fixtures::NAMES {
        let d = fixtures::by_name(name).unwrap();
        for k in [2, 3] {
            let o = build_orbifold_datum(&d, k, Convention::Minus, tol()).unwrap();
            assert!(o.report.passed(), "{name} k={k}\n{}", o.report);
        }
    }
    let o = build_orbifold_datum(&fixtures::e8(), 5, Convention::Minus, tol()).unwrap();
    assert_eq!(o.datum.rank(), 25);
    assert!(o.report.passed(), "{}", o.report);
    let o = build_orbifold_datum(&fixtures::fibonacci(), 5, Convention::Minus, tol()).unwrap();
    assert_eq!(o.datum.rank(), orbifold_module_count(2, 5));
    assert!(o.report.passed(), "{}", o.report);
}

#[test]
fn untwisted_entries_do_not_depend_on_eigencomponents() {
    let d = fixtures::ising();
    let k = 3;
    let o = build_orbifold_datum(&d, k, Convention::Minus, tol()).unwrap();
    let s = o.datum.s_matrix();
    let idx = |l: OrbifoldModuleLabel| o.index_of(&l).unwrap();
    for i in 0..d.rank() {
        for j in 0..d.rank() {
            let base = s[[
                idx(OrbifoldModuleLabel::Diagonal { i, a: 0 }),
                idx(OrbifoldModuleLabel::Diagonal { i: j, a: 0 }),
            ]];
            for a in 0..k {
                for b in 0..k {
                    let z = s[[
                        idx(OrbifoldModuleLabel::Diagonal { i, a }),
                        idx(OrbifoldModuleLabel::Diagonal { i: j, a: b }),
                    ]];
                    assert!((z - base).norm() < 1e-15);
                }
            }
        }
    }
    let off = idx(OrbifoldModuleLabel::OffDiagonal(vec![0, 1, 2]));
    for j in 0..d.rank() {
        let want: Complex = [0, 1, 2].iter().map(|&m| d.s(m, j)).product();
        for b in 0..k {
            let z = s[[off, idx(OrbifoldModuleLabel::Diagonal { i: j, a: b })]];
            assert!((z - want).norm() < 1e-15);
        }
    }
}

#[test]
fn vacuum_row_and_global_dimension() {
    for (d, k) in [(fixtures::ising(), 3), (fixtures::fibonacci(), 2)] {
        let o = build_orbifold_datum(&d, k, Convention::Minus, tol()).unwrap();
        let s = o.datum.s_matrix();
        for j in 0..o.datum.rank() {
            assert!(s[[0, j]].re > 0.0 && s[[0, j]].im.abs() < 1e-12);
        }
        let (_, g) = modular_data::quantum_dimensions(&d);
        let (_, go) = modular_data::quantum_dimensions(&o.datum);
        assert!((go - (k * k) as f64 * g.powi(k as i32)).abs() / go < 1e-9);
        assert!(
            o.report
                .get(perm_orbifold::checks::GLOBAL_DIMENSION)
                .unwrap()
                .passed
        );
    }
}

#[test]
fn plus_convention_is_rejected_by_modular_relation_at_k3_and_auto_recovers() {
    let d = fixtures::ising();
    let plus = build_orbifold_datum(&d, 3, Convention::Plus, tol()).unwrap();
    assert!(!plus.report.get(checks::MODULAR_RELATION).unwrap().passed);
    // S itself does not depend on the convention, only the weights do.
    let minus = build_orbifold_datum(&d, 3, Convention::Minus, tol()).unwrap();
    assert_eq!(plus.datum.s_matrix(), minus.datum.s_matrix());
    let auto = build_orbifold_datum_auto(&d, 3, Convention::Plus, tol()).unwrap();
    assert_eq!(auto.convention, Convention::Minus);
    // At k = 2 the two conventions coincide.
    let p2 = build_orbifold_datum(&d, 2, Convention::Plus, tol()).unwrap();
    assert!(p2.report.passed());
}

#[test]
fn output_is_deterministic() {
    let a = build_orbifold_datum(&fixtures::fibonacci(), 3, Convention::Minus, tol())
        .unwrap()
        .to_json();
    let b = build_orbifold_datum(&fixtures::fibonacci(), 3, Convention::Minus, tol())
        .unwrap()
        .to_json();
    assert_eq!(a, b);
}

#[test]
fn rejects_composite_k() {
    for k in [0, 1, 4, 6, 9] {
        assert!(matches!(
            build_orbifold_datum(&fixtures::ising(), k, Convention::Minus, tol()),
            Err(Error::NotPrime(_))
        ));
    }
}

#[test]
fn holomorphic_specialization_matches_pipeline() {
    let e8 = fixtures::e8();
    let (_, s) = perm_orbifold::assemble_orbifold_s(&e8, 2).unwrap();
    let b = perm_orbifold::twisted_block_s(&e8, 2, 1, 1).unwrap()[[0, 0]];
    let one = Complex::new(1.0, 0.0);
    let input = HolomorphicInput {
        group: FiniteAbelianGroup::cyclic(2).unwrap(),
        s: array![[one, one], [one, b]],
    };
    let out = holomorphic_assemble(&input).unwrap();
    assert!(linalg::max_abs_diff(&out.s, &s) < 1e-12);
}

#[test]
fn trivial_stabilizer_data_through_the_generic_evaluator() {
    // Fibonacci k=2 exercises an off-diagonal orbit with trivial stabilizer.
    let d: ModularDatum = fixtures::fibonacci();
    let (_, s) = perm_orbifold::assemble_orbifold_s(&d, 2).unwrap();
    let input = perm_orbifold::restricted_input(&d, 2).unwrap();
    let out = modorb::restricted::assemble_restricted_s(&input).unwrap();
    assert!(linalg::max_abs_diff(&out.s, &s) < 1e-12);
    let report = modorb::restricted::validate_group_data(&input.group, &input.orbits, 1e-9);
    assert!(report.passed(), "{report}");
}
