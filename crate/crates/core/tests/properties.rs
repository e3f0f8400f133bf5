use mixed_mops::cd::{block_splitting, cd_alternative_rhs, cd_kernel_direct, sigma_escapes, sigma_sets, KernelPoint};
use mixed_mops::combinatorics::*;
use mixed_mops::factorization::{build_moment_matrix, gauss_borel, triangular_inverse};
use mixed_mops::jacobi::{jacobi_entry_from_factors, jacobi_operator, two_route_residual};
use mixed_mops::measures::{MeasureSpec, ProblemSetup, Weight};
use mixed_mops::polynomials::LinearForms;
use mixed_mops::scalar::ratio;
use mixed_mops::{Error, Exec, Matrix, Rational};
use proptest::prelude::*;

fn composition() -> impl Strategy<Value = Composition> {
    prop::collection::vec(1usize..5, 1..4).prop_map(|p| Composition::new(p).unwrap())
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-9i64..10, 1i64..6).prop_map(|(n, d)| ratio(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (1i64..10, 1i64..6, any::<bool>()).prop_map(|(n, d, neg)| ratio(if neg { -n } else { n }, d))
}

proptest! {
    #[test]
    fn compose_inverts_decompose(n in composition(), seed in 0usize..1000) {
        let l = seed % (10 * n.total());
        prop_assert_eq!(compose(&n, decompose(&n, l)).unwrap(), l);
    }

    #[test]
    fn string_exponent_is_nu_degree(n in composition(), seed in 0usize..1000) {
        let l = seed % (10 * n.total());
        prop_assert_eq!(Some(exponent(&n, l)), nu_degree(&n, l, family(&n, l)));
    }

    #[test]
    fn multi_index_total(n in composition(), seed in 0usize..1000) {
        let l = seed % (10 * n.total());
        prop_assert_eq!(multi_index(&n, l as i64).total(), l + 1);
    }

    #[test]
    fn associated_integers_are_nearest(n in composition(), seed in 0usize..1000, a_seed in 0usize..8) {
        let l = seed % (10 * n.total());
        let a = a_seed % n.families() + 1;
        let up = assoc_plus(&n, l, a);
        prop_assert!(up >= l);
        prop_assert_eq!(family(&n, up), a);
        prop_assert!((l..up).all(|i| family(&n, i) != a));
        match assoc_minus(&n, l, a) {
            Some(down) => {
                prop_assert!(down <= l);
                prop_assert_eq!(family(&n, down), a);
                prop_assert!((down + 1..=l).all(|i| family(&n, i) != a));
            }
            None => prop_assert!((0..=l).all(|i| family(&n, i) != a)),
        }
    }

    #[test]
    fn shift_raises_exponent_within_family(n in composition(), size in 1usize..40) {
        let up = shift_matrix(&n, size);
        for l in 0..size {
            if let Some(t) = up.target(l) {
                prop_assert!(t < size);
                prop_assert_eq!(family(&n, t), family(&n, l));
                prop_assert_eq!(exponent(&n, t), exponent(&n, l) + 1);
            }
        }
    }

    #[test]
    fn elimination_recovers_triangular_factors(
        lower in prop::collection::vec(small_rational(), 15),
        upper in prop::collection::vec(small_rational(), 15),
        diag in prop::collection::vec(nonzero_rational(), 5),
    ) {
        let n = 5;
        let mut li = lower.into_iter();
        let mut ui = upper.into_iter();
        let l = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Greater => li.next().unwrap(),
            std::cmp::Ordering::Equal => ratio(1, 1),
            std::cmp::Ordering::Less => ratio(0, 1),
        });
        let u = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Less => ui.next().unwrap(),
            std::cmp::Ordering::Equal => diag[i].clone(),
            std::cmp::Ordering::Greater => ratio(0, 1),
        });
        let g = l.mul(&u);
        let fp = gauss_borel(&g, Exec::Sequential).unwrap();
        prop_assert_eq!(&fp.s_inv, &l);
        prop_assert_eq!(&fp.sbar, &u);
        prop_assert_eq!(fp.s.mul(&fp.s_inv), Matrix::identity(n, ()));
        prop_assert_eq!(fp.sbar.mul(&fp.sbar_inv), Matrix::identity(n, ()));
        prop_assert_eq!(triangular_inverse(&u, Exec::Parallel).unwrap(), fp.sbar_inv);
    }

    #[test]
    fn row_scaling_only_scales_sbar(c in nonzero_rational(), size in 2usize..8) {
        let w = vec![Weight::one(), Weight::Power(ratio(1, 2))];
        let setup = setup(w, vec![Weight::one()], &[1, 1], &[1]);
        let g = build_moment_matrix::<Rational>(&setup, size, (), Exec::Sequential).unwrap().g;
        let a = gauss_borel(&g, Exec::Sequential).unwrap();
        let b = gauss_borel(&g.map(|x| x.clone() * c.clone()), Exec::Sequential).unwrap();
        prop_assert_eq!(a.s, b.s);
        prop_assert_eq!(a.sbar.map(|x| x.clone() * c.clone()), b.sbar);
    }
}

fn setup(w1: Vec<Weight>, w2: Vec<Weight>, n1: &[usize], n2: &[usize]) -> ProblemSetup {
    ProblemSetup::new(
        MeasureSpec::lebesgue(ratio(0, 1), ratio(1, 1)).unwrap(),
        w1,
        w2,
        Composition::new(n1.to_vec()).unwrap(),
        Composition::new(n2.to_vec()).unwrap(),
    )
    .unwrap()
}

// Power weights with pairwise non-integer exponent gaps give a perfect system.
const SIDE1: [(i64, i64); 3] = [(0, 1), (1, 3), (2, 3)];
const SIDE2: [(i64, i64); 2] = [(0, 1), (1, 2)];

fn power_setup() -> impl Strategy<Value = ProblemSetup> {
    (
        prop::collection::vec(1usize..4, 1..=3),
        prop::collection::vec(1usize..4, 1..=2),
    )
        .prop_map(|(n1, n2)| {
            let w1 = SIDE1[..n1.len()].iter().map(|&(a, b)| Weight::Power(ratio(a, b))).collect();
            let w2 = SIDE2[..n2.len()].iter().map(|&(a, b)| Weight::Power(ratio(a, b))).collect();
            setup(w1, w2, &n1, &n2)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn equal_systems_give_symmetric_moments(n in composition(), size in 2usize..12) {
        let w: Vec<Weight> = (0..n.families()).map(|a| Weight::Power(ratio(a as i64, 5))).collect();
        let s = setup(w.clone(), w, n.parts(), n.parts());
        let g = build_moment_matrix::<Rational>(&s, size, (), Exec::Sequential).unwrap().g;
        prop_assert_eq!(g.transpose(), g);
    }

    #[test]
    fn jacobi_routes_band_and_kernel(s in power_setup(), extra in 0usize..6, xi in 1i64..8, yi in 1i64..8) {
        let size = s.comp1.total() + s.comp2.total() + s.comp1.total().max(s.comp2.total()) + 2 + extra;
        let g = build_moment_matrix::<Rational>(&s, size, (), Exec::default()).unwrap();
        let fp = match gauss_borel(&g.g, Exec::default()) {
            Ok(fp) => fp,
            Err(Error::SingularMinor(_)) => return Err(TestCaseError::reject("not perfect")),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let (a, b, m) = jacobi_operator(&fp, &s.comp1, &s.comp2, Exec::default());
        prop_assert_eq!(two_route_residual(&a, &b).unwrap(), ratio(0, 1));
        for i in 0..size {
            for j in 0..size {
                if !m.is_exact(i, j) {
                    continue;
                }
                match jacobi_entry_from_factors(&fp, &s.comp1, &s.comp2, i, j) {
                    Ok(v) => prop_assert_eq!(&v, &m.j[(i, j)]),
                    Err(Error::OutsideBand { .. }) => prop_assert_eq!(&m.j[(i, j)], &ratio(0, 1)),
                    Err(Error::WindowTooSmall(_)) => {}
                    Err(e) => return Err(TestCaseError::fail(e.to_string())),
                }
            }
        }
        // evaluation points are sixth powers so every weight is rational there
        let x = ratio(xi, 8).pow(6);
        let y = ratio(yi, 8).pow(6);
        let forms = LinearForms::new(&s, &fp);
        let pt = KernelPoint::new(&forms, &x, &y).unwrap();
        let lmin = s.comp1.total().max(s.comp2.total());
        for l in lmin..=m.splitting_limit() {
            let direct = cd_kernel_direct(&pt, l).unwrap();
            let split = block_splitting(&m, &pt, l).unwrap();
            prop_assert_eq!(split, (y.clone() - x.clone()) * direct.clone());
            let sets = sigma_sets(&s.comp1, &s.comp2, l).unwrap();
            prop_assert!(sigma_escapes(&m, &sets).is_empty());
            match cd_alternative_rhs(&m, &pt, &s.comp1, &s.comp2, l) {
                Ok(v) => prop_assert_eq!(v, direct),
                Err(Error::WindowTooSmall(_)) => {}
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
    }
}
