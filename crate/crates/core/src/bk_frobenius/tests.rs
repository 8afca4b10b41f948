use super::*;
use crate::root_data::Presentation;
use crate::tame_types::build_type;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn all_degrees(ty: &TameInertialType) -> Vec<(usize, usize)> {
    (0..ty.orbit_groups().len())
        .flat_map(|g| {
            let first = ty.orbits()[ty.orbit_groups()[g][0]][0];
            let class = ty.classes().iter().find(|c| c.contains(&first)).unwrap().len();
            (1..=class).map(move |d| (g, d))
        })
        .collect()
}

fn all_f(fam: &FrobFamily) -> Vec<SymbolicScalar> {
    all_degrees(fam.ty()).into_iter().map(|(g, d)| f_function(fam, g, d).unwrap()).collect()
}

fn level_two_type() -> TameInertialType {
    build_type(3, 1, 1, 2, &[1, 3], &Perm::new(vec![1, 0]).unwrap()).unwrap()
}

#[test]
fn identity_and_scalar_gauge() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let ty = random_type(5, 1, 2, 3, &mut rng).unwrap();
    let fam = random_levi_c_family(&ty, 12, false, &mut rng).unwrap();
    let id: Vec<Mat<TruncPoly>> = (0..ty.f()).map(|_| Mat::identity(3)).collect();
    assert_eq!(change_eigenbasis(&fam, &id).unwrap(), fam);
    let minus: Vec<Mat<TruncPoly>> =
        (0..ty.f()).map(|_| Mat::identity(3).scale(&TruncPoly::constant(SymbolicScalar::int(-1)))).collect();
    assert_eq!(all_f(&change_eigenbasis(&fam, &minus).unwrap()), all_f(&fam));
}

#[test]
fn diagonal_rank_two_values() {
    let ty = build_type(5, 1, 1, 2, &[3, 1], &Perm::identity(2)).unwrap();
    let c1 = SymbolicScalar::var("c1").mul(&SymbolicScalar::pi_pow(1));
    let c2 = SymbolicScalar::var("c2");
    let fam = FrobFamily::from_c_diagonal(ty.clone(), &[vec![c1.clone(), c2.clone()]], 4).unwrap();
    let group_of = |label: usize| {
        let orbit = ty.orbits().iter().position(|o| o.contains(&label)).unwrap();
        ty.orbit_groups().iter().position(|g| g.contains(&orbit)).unwrap()
    };
    assert_eq!(f_function(&fam, group_of(0), 1).unwrap(), c1);
    assert_eq!(f_function(&fam, group_of(1), 1).unwrap(), c2);
    assert!(matches!(f_function(&fam, 0, 2), Err(FrobError::DegreeOutOfRange(_))));
    assert!(matches!(f_function(&fam, 7, 1), Err(FrobError::DegreeOutOfRange(_))));
}

#[test]
fn levi_projection_ignores_non_levi_entries() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let ty = random_type(3, 1, 1, 3, &mut rng).unwrap();
    let fam = random_levi_c_family(&ty, 6, true, &mut rng).unwrap();
    let m = levi_frob_product(&fam);
    for r in 0..3 {
        for c in 0..3 {
            if ty.a_prime()[r] != ty.a_prime()[c] {
                assert!(m.get(r, c).is_zero());
            }
        }
    }
}

#[test]
fn orientation_independence() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    // equal characters give several orientations
    let ty = build_type(5, 1, 2, 3, &[7, 7, 2], &Perm::identity(3)).unwrap();
    assert!(ty.all_orientations().len() > 1);
    let fam = random_levi_c_family(&ty, 8, false, &mut rng).unwrap();
    let base = all_f(&fam);
    for or in ty.all_orientations() {
        let moved = reorient(&fam, or).unwrap();
        assert_eq!(all_f(&moved), base);
    }
}

#[test]
fn gauge_change_leaves_parabolic_loop_group() {
    let ty = level_two_type();
    let fam = FrobFamily::from_c_diagonal(ty.clone(), &[vec![SymbolicScalar::one(), SymbolicScalar::one()]], 6).unwrap();
    let pat = parabolic_pattern(&ty, 0);
    assert_ne!(pat[0], pat[1]);
    // lower triangular constant entry is outside P_0
    let bad = Mat::from_rows(vec![
        vec![TruncPoly::one(), TruncPoly::zero()],
        vec![TruncPoly::one(), TruncPoly::one()],
    ]);
    assert!(matches!(change_eigenbasis(&fam, &[bad]), Err(FrobError::NotInParabolic(_))));
}

#[test]
fn wd_dictionary_and_literal_sign() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let ty = level_two_type();
    let fam = random_levi_c_family(&ty, 6, true, &mut rng).unwrap();
    let wd = wd_datum(&fam).unwrap();
    let f = f_function(&fam, 0, 1).unwrap();
    assert_eq!(f, wd.sym_value(&[0], &[1]).unwrap());
    // the determinant of Frobenius on an orbit of even size carries a sign
    assert_eq!(f, wd.literal_sym_value(&[0], &[1]).unwrap().neg());
    let p = random_gauge(&ty, &mut rng);
    assert_eq!(f_function(&change_eigenbasis(&fam, &p).unwrap(), 0, 1).unwrap(), f);
}

#[test]
fn wd_requires_block_scalar() {
    let ty = build_type(5, 1, 1, 2, &[3, 3], &Perm::identity(2)).unwrap();
    let c = Mat::from_rows(vec![
        vec![SymbolicScalar::one(), SymbolicScalar::int(2)],
        vec![SymbolicScalar::zero(), SymbolicScalar::one()],
    ]);
    let fam = FrobFamily::from_c_levi(ty, &[c], 4).unwrap();
    assert!(matches!(wd_datum(&fam), Err(FrobError::NotBlockScalar(_))));
    assert_eq!(f_function(&fam, 0, 2).unwrap(), SymbolicScalar::one());
    assert_eq!(f_function(&fam, 0, 1).unwrap(), SymbolicScalar::int(2));
}

#[test]
fn reducibility_of_lift_data() {
    let ty = build_type(7, 1, 1, 3, &[5, 3, 1], &Perm::identity(3)).unwrap();
    let wd = WDDatum::principal_series_lift(&ty).unwrap();
    let ctx = FieldCtx::new(7, 1, 1);
    let lambda = Weight::zero(3, 1);
    let group_of_label = |label: usize| {
        let orbit = ty.orbits().iter().position(|o| o.contains(&label)).unwrap();
        ty.orbit_groups().iter().position(|g| g.contains(&orbit)).unwrap()
    };
    assert!(reducibility_check(&wd, &[group_of_label(0)], &[1], &lambda, &ctx).unwrap());
    assert!(!reducibility_check(&wd, &[group_of_label(1)], &[1], &lambda, &ctx).unwrap());
    let first_two = [group_of_label(0), group_of_label(1)];
    assert!(reducibility_check(&wd, &first_two, &[1, 1], &lambda, &ctx).unwrap());
}

#[test]
fn bounded_families_divisible() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..6 {
        let ty = random_type(5, 1, 2, 3, &mut rng).unwrap();
        let lambda = Weight::new(3, vec![vec![2, 1, 0], vec![1, 1, 0]]).unwrap();
        let spec = BoundedSpec { ty: ty.clone(), lambda: lambda.clone(), trunc: None, unit_vars: true };
        let fam = construct_bounded(&spec, &mut rng).unwrap();
        for (g, d) in all_degrees(&ty) {
            assert!(divisibility_check(&fam, &[g], &[d], &lambda).unwrap());
            let ft = f_tilde(&fam, &[g], &[d], &lambda).unwrap();
            let ctx = FieldCtx::new(5, 1, 2);
            assert!(ft.valuation(&ctx).is_none_or(|v| v.doubled() >= 0));
        }
    }
}

#[test]
fn bounded_degree_audit() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let ty = random_type(5, 1, 1, 2, &mut rng).unwrap();
    let lambda = Weight::new(2, vec![vec![3, 0]]).unwrap();
    let spec = BoundedSpec { ty: ty.clone(), lambda: lambda.clone(), trunc: Some(3), unit_vars: false };
    assert!(matches!(construct_bounded(&spec, &mut rng), Err(FrobError::TruncationOverflow(_))));
    let fam = construct_bounded(&BoundedSpec { trunc: None, ..spec }, &mut rng).unwrap();
    assert_eq!(fam.trunc(), default_trunc(1, 4, 1));
    let det = frob_product(&fam).map(TruncPoly::constant_term).det();
    let ctx = FieldCtx::new(5, 1, 1);
    // det mod v is a unit times pi^{sum(lambda + eta)}
    assert_eq!(det.valuation(&ctx).unwrap().doubled(), 2 * 4);
}

#[test]
fn ramified_bounded_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let ty = random_type(5, 2, 1, 2, &mut rng).unwrap();
    let lambda = Weight::new(2, vec![vec![1, 0], vec![0, 0]]).unwrap();
    let spec = BoundedSpec { ty: ty.clone(), lambda: lambda.clone(), trunc: None, unit_vars: false };
    let fam = construct_bounded(&spec, &mut rng).unwrap();
    for (g, d) in all_degrees(&ty) {
        assert!(divisibility_check(&fam, &[g], &[d], &lambda).unwrap());
    }
}

#[test]
fn factorization_block_diagonal() {
    let one = TruncPoly::one();
    let two = TruncPoly::constant(SymbolicScalar::int(-1)).add(&TruncPoly::monomial(SymbolicScalar::int(3), 1));
    let a = Mat::from_rows(vec![
        vec![two.clone(), TruncPoly::zero(), TruncPoly::zero()],
        vec![TruncPoly::zero(), one.clone(), TruncPoly::monomial(SymbolicScalar::int(1), 1)],
        vec![TruncPoly::zero(), one.clone(), one.clone().add(&one)],
    ]);
    let fac = parabolic_factorization(&a, &Perm::identity(3), (1, 2));
    // the constant diagonal entry 2 is not a unit symbol
    assert!(matches!(fac, Err(FrobError::NotFactorizable(_))));
    let a = Mat::from_rows(vec![
        vec![two, TruncPoly::zero(), TruncPoly::zero()],
        vec![TruncPoly::zero(), one.clone(), TruncPoly::monomial(SymbolicScalar::int(1), 1)],
        vec![TruncPoly::zero(), one.clone(), one.clone()],
    ]);
    let fac = parabolic_factorization(&a, &Perm::identity(3), (1, 2)).unwrap();
    assert!(fac.x.is_zero());
    assert_eq!(fac.d_a, vec![SymbolicScalar::int(-1)]);
    assert_eq!(fac.recompose(), a);
}

#[test]
fn factorization_failures() {
    let z = TruncPoly::zero;
    let one = TruncPoly::one;
    let singular = Mat::from_rows(vec![
        vec![TruncPoly::monomial(SymbolicScalar::int(1), 1), z(), z()],
        vec![one(), one(), z()],
        vec![one(), z(), one()],
    ]);
    assert!(matches!(parabolic_factorization(&singular, &Perm::identity(3), (1, 2)), Err(FrobError::NotFactorizable(_))));
    let upper = Mat::from_rows(vec![vec![one(), one(), z()], vec![z(), one(), z()], vec![z(), z(), one()]]);
    assert!(matches!(parabolic_factorization(&upper, &Perm::identity(3), (1, 2)), Err(FrobError::NotFactorizable(_))));
}

#[test]
fn factorization_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for blocks in [(1, 2), (2, 1)] {
        for w in crate::root_data::wm_reps(3, &[blocks.0, blocks.1]).unwrap() {
            let (a, fac) = random_factorizable(&w, blocks, &mut rng);
            let got = parabolic_factorization(&a, &w, blocks).unwrap();
            assert_eq!(got.recompose(), a);
            assert_eq!(got, fac);
        }
    }
}

#[test]
fn shape_principal_series_trivial() {
    let input = ShapeInput {
        p: 29,
        tau_a: Presentation { s: vec![Perm::identity(1)], mu: Weight::single(vec![20]) },
        tau_b: Presentation { s: vec![Perm::identity(2)], mu: Weight::single(vec![12, 3]) },
        w_prime_a: vec![Perm::identity(1)],
        nu_prime_a: Weight::single(vec![0]),
        w_prime_b: vec![Perm::identity(2)],
        nu_prime_b: Weight::single(vec![1, 0]),
    };
    // mu + eta = (20 - 2 + 2, 12 + 1, 3) = (20, 13, 3) is already in the lowest alcove
    let setup = shape_setup(&input).unwrap();
    assert!(setup.w_tilde.is_identity());
    assert!(setup.w_upper.iter().all(Perm::is_identity));
    assert_eq!(setup.lhs, setup.rhs);
    assert_eq!(setup.twisted_tau, setup.tau);
}

#[test]
fn shape_with_levi_w() {
    // mu + eta = (5, 20, 3): w swaps the first two entries only
    let input = ShapeInput {
        p: 29,
        tau_a: Presentation { s: vec![Perm::new(vec![1, 0]).unwrap()], mu: Weight::single(vec![5, 19]) },
        tau_b: Presentation { s: vec![Perm::identity(1)], mu: Weight::single(vec![3]) },
        w_prime_a: vec![Perm::new(vec![1, 0]).unwrap()],
        nu_prime_a: Weight::single(vec![1, 0]),
        w_prime_b: vec![Perm::identity(1)],
        nu_prime_b: Weight::single(vec![1]),
    };
    let setup = shape_setup(&input).unwrap();
    assert!(!setup.w_tilde.finite_part[0].is_identity());
    assert!(setup.w_upper[0].is_identity());
    assert_eq!(setup.w_levi, setup.w_tilde.finite_part);
}

#[test]
fn shape_random_setups() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for blocks in [(1, 2), (2, 1)] {
        for f in 1..=2 {
            for _ in 0..10 {
                let input = shape::random_shape_input(31, f, blocks, 6, &mut rng).unwrap();
                let setup = shape_setup(&input).unwrap();
                assert_eq!(setup.lhs, setup.rhs);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn gauge_invariance(seed in any::<u64>(), n in 2usize..=3, f in 1usize..=2, p in prop::sample::select(vec![3u64, 5])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ty = random_type(p, 1, f, n, &mut rng).unwrap();
        let fam = random_levi_c_family(&ty, 12, false, &mut rng).unwrap();
        let base = all_f(&fam);
        for _ in 0..3 {
            let gauge = random_gauge(&ty, &mut rng);
            let moved = change_eigenbasis(&fam, &gauge).unwrap();
            prop_assert_eq!(all_f(&moved), base.clone());
        }
    }
}
