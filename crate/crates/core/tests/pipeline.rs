//! End-to-end properties through the public API, each checked against an
//! exhaustive reference.

use ldilp::dp::{self, DpConfig, Mode};
use ldilp::linalg::{det, hnf, inverse, IntMatrix};
use ldilp::oracle::{ilp_brute, lp_l1_radius, OracleBudget};
use ldilp::precond;
use ldilp::problem::{IlpInstance, Status};
use ldilp::Rational;
use num_traits::Signed;
use proptest::prelude::*;

fn one() -> Rational {
    Rational::from_integer(1.into())
}

/// Bounded instances: the first row is positive.
fn bounded_instance() -> impl Strategy<Value = IlpInstance> {
    (1usize..=2, 0usize..=3).prop_flat_map(|(k, extra)| {
        let n = k + 1 + extra;
        (
            prop::collection::vec(1i64..=3, n),
            prop::collection::vec(prop::collection::vec(-3i64..=3, n), k - 1),
            prop::collection::vec(0i64..=2, n),
            prop::collection::vec(-4i64..=4, n),
            -1i64..=1,
        )
            .prop_filter_map("full row rank", move |(first, rest, x, c, shift)| {
                let mut a = vec![first];
                a.extend(rest);
                let mut b: Vec<i64> = a
                    .iter()
                    .map(|row| row.iter().zip(&x).map(|(p, q)| p * q).sum())
                    .collect();
                b[k - 1] += shift;
                IlpInstance::new(a, b, c).ok()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn optimum_matches_exhaustive_search(inst in bounded_instance()) {
        let r = lp_l1_radius(&inst).unwrap().unwrap();
        let truth = ilp_brute(&inst, &OracleBudget::new(r)).unwrap();
        let got = dp::solve(&inst, &DpConfig::default()).unwrap();
        prop_assert_eq!(got.status, truth.status);
        prop_assert_eq!(got.objective, truth.objective);
        if let Some(x) = &got.x {
            prop_assert!(inst.is_feasible(x));
        }
        let feas = dp::solve(&inst, &DpConfig::default().with_mode(Mode::Feasibility)).unwrap();
        prop_assert_eq!(feas.status.has_solution(), truth.status == Status::Optimal);
    }

    #[test]
    fn preconditioner_invariants(
        k in 1usize..=3,
        extra in 0usize..=3,
        seed in prop::collection::vec(-4i64..=4, 24),
    ) {
        let n = k + extra;
        let rows: Vec<Vec<i64>> = (0..k).map(|i| seed[i * n..(i + 1) * n].to_vec()).collect();
        let a = IntMatrix::from_i64_rows(&rows).unwrap();
        prop_assume!(ldilp::linalg::rank(&a) == k);
        let p = precond::build(&a, &DpConfig::default().precond_eps).unwrap();
        let m = inverse(&p.b_prime).unwrap().mul(&a.to_rational()).unwrap();
        prop_assert_eq!(&m, &p.m);
        for j in 0..n {
            prop_assert!(m.column(j).iter().map(|v| v * v).sum::<Rational>() <= one());
        }
        prop_assert_eq!(det(&p.b_prime).unwrap().abs(), p.delta.clone());
        let f = hnf(&p.b_prime).unwrap();
        prop_assert_eq!(f.h, p.h_enum.clone());
        prop_assert!((0..k).all(|i| *p.h_enum.get(i, i) >= one()));
    }
}
