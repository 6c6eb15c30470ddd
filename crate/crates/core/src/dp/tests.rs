use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;

use super::*;
use crate::linalg::{inverse, IntMatrix, RatMatrix};
use crate::oracle::{herdisc_brute, ilp_brute, lp_l1_radius, OracleBudget};

fn inst(a: &[&[i64]], b: &[i64], c: &[i64]) -> IlpInstance {
    IlpInstance::new(
        a.iter().map(|r| r.to_vec()).collect(),
        b.to_vec(),
        c.to_vec(),
    )
    .unwrap()
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[test]
fn eta_policies() {
    assert_eq!(choose_eta(1, EtaPolicy::Safe).unwrap(), 2);
    assert_eq!(choose_eta(2, EtaPolicy::Safe).unwrap(), 3);
    assert_eq!(choose_eta(3, EtaPolicy::Safe).unwrap(), 4);
    assert_eq!(choose_eta(4, EtaPolicy::Safe).unwrap(), 4);
    // 2 sqrt(ln 3) = 2.096..., 2 sqrt(ln 6) = 2.676...
    assert_eq!(choose_eta(1, EtaPolicy::Aggressive).unwrap(), 3);
    assert_eq!(choose_eta(4, EtaPolicy::Aggressive).unwrap(), 3);
    assert_eq!(choose_eta(3, EtaPolicy::Explicit(7)).unwrap(), 7);
    assert_eq!(
        choose_eta(3, EtaPolicy::Explicit(0)),
        Err(Error::NonPositiveInput)
    );
}

#[test]
fn safe_eta_dominates_herdisc() {
    let a = IntMatrix::from_i64_rows(&[
        vec![1, 2, 0, 1, 3],
        vec![0, 1, 1, -2, 1],
        vec![2, 0, 1, 1, -1],
    ])
    .unwrap();
    let pre = precond::build(&a, &BigRational::new(1.into(), 8.into())).unwrap();
    let hd = herdisc_brute(&pre.m).unwrap();
    assert!(rat(choose_eta(3, EtaPolicy::Safe).unwrap() as i64) >= hd);
}

#[test]
fn rho_single_variable() {
    let p = inst(&[&[1]], &[5], &[1]);
    let r = choose_rho(&p, &[rat(5)], &BigInt::from(1), RhoPolicy::Proximity, 3, 6).unwrap();
    // chi = 3, shift 2, remaining solution 3
    assert_eq!(r.chi, BigInt::from(3));
    assert_eq!(r.shift, vec![2]);
    assert_eq!(r.shifted.b(), &[3]);
    let limit = 1.2f64.powi(r.rho as i32);
    assert!(limit >= 3.0 && 1.2f64.powi(r.rho as i32 - 1) < 6.0 * 3.0);
}

#[test]
fn rho_zero_rhs_has_no_shift() {
    let p = inst(&[&[1, 1, -1]], &[0], &[-1, -1, -1]);
    let r = choose_rho(
        &p,
        &[rat(0), rat(0), rat(0)],
        &BigInt::from(1),
        RhoPolicy::Proximity,
        3,
        6,
    )
    .unwrap();
    assert_eq!(r.shift, vec![0, 0, 0]);
    let s = solve(&p, &DpConfig::default()).unwrap();
    assert_eq!(s.status, Status::Optimal);
    assert_eq!(s.objective, Some(0));
}

#[test]
fn rho_explicit_and_invalid() {
    let p = inst(&[&[1]], &[5], &[1]);
    let r = choose_rho(
        &p,
        &[rat(5)],
        &BigInt::from(1),
        RhoPolicy::Explicit(4),
        3,
        6,
    )
    .unwrap();
    assert_eq!((r.rho, r.shift.clone()), (4, vec![0]));
    assert!(choose_rho(
        &p,
        &[rat(5)],
        &BigInt::from(1),
        RhoPolicy::Explicit(0),
        3,
        6
    )
    .is_err());
    assert!(choose_rho(&p, &[rat(5)], &BigInt::from(0), RhoPolicy::Proximity, 3, 6).is_err());
}

fn window_oracle(b_prime: &RatMatrix, b: &[i64], j: u32, eta: u64) -> BTreeSet<Vec<i64>> {
    // Exact membership: B'^{-1} (x - b / 2^j) in [-4 eta, 4 eta]^k.
    let k = b.len();
    let inv = inverse(b_prime).unwrap();
    let r = 4 * eta as i64;
    let reach: Vec<i64> = (0..k)
        .map(|i| (0..k).map(|l| b_prime.get(i, l).abs()).sum::<BigRational>() * rat(r))
        .map(|v| v.ceil().to_integer().to_i64().unwrap() + 1)
        .collect();
    let scale = BigRational::new(1.into(), BigInt::from(1) << j);
    let mut out = BTreeSet::new();
    let mut x: Vec<i64> = (0..k).map(|i| b[i] / (1 << j) - reach[i]).collect();
    loop {
        let d: Vec<BigRational> = (0..k).map(|i| rat(x[i]) - rat(b[i]) * &scale).collect();
        let w = inv.mul_vec(&d).unwrap();
        if w.iter().all(|v| v.abs() <= rat(r)) {
            out.insert(x.clone());
        }
        let mut i = 0;
        loop {
            if i == k {
                return out;
            }
            x[i] += 1;
            if x[i] <= b[i] / (1 << j) + reach[i] {
                break;
            }
            x[i] = b[i] / (1 << j) - reach[i];
            i += 1;
        }
    }
}

fn window_set(pre: &LdPreconditioner, b: &[i64], j: u32, eta: u64) -> BTreeSet<Vec<i64>> {
    let pts = build_window(j, pre, b, eta).unwrap();
    let n = pts.len();
    let set: BTreeSet<Vec<i64>> = pts
        .into_iter()
        .map(|p| p.iter().map(|v| v.to_i64().unwrap()).collect())
        .collect();
    assert_eq!(set.len(), n, "duplicates in window");
    set
}

#[test]
fn window_identity() {
    let pre = LdPreconditioner::from_b_prime(&RatMatrix::identity(2)).unwrap();
    let w = window_set(&pre, &[0, 0], 0, 1);
    assert_eq!(w.len(), 81);
    assert!(w.contains(&vec![-4, 4]) && !w.contains(&vec![5, 0]));
}

#[test]
fn window_diagonal() {
    let bp = RatMatrix::diagonal(&[rat(2), rat(1)]);
    let pre = LdPreconditioner::from_b_prime(&bp).unwrap();
    let w = window_set(&pre, &[8, 0], 1, 1);
    let expect: BTreeSet<Vec<i64>> = (-4..=12)
        .flat_map(|x| (-4..=4).map(move |y| vec![x, y]))
        .collect();
    assert_eq!(w, expect);
}

#[test]
fn window_geometry_agrees_with_enumeration() {
    let a = IntMatrix::from_i64_rows(&[vec![3, 1, 2, -1], vec![1, 4, -2, 2]]).unwrap();
    let pre = precond::build(&a, &BigRational::new(1.into(), 8.into())).unwrap();
    let b = [13, -7];
    let geom = WindowGeometry::new(&pre, &b, 1).unwrap();
    for j in 0..4 {
        let w = window_set(&pre, &b, j, 1);
        assert_eq!(w, window_oracle(&pre.b_prime, &b, j, 1));
        let bounds = geom.bounds(j);
        for x in &w {
            assert!(bounds.contains_image(&geom.image(x)));
            assert_eq!(geom.decode(geom.encode(x)), *x);
        }
    }
}

#[test]
fn keys_are_additive() {
    let pre = LdPreconditioner::from_b_prime(&RatMatrix::identity(3)).unwrap();
    let geom = WindowGeometry::new(&pre, &[5, -3, 2], 1).unwrap();
    let (x, y) = ([1, -2, 3], [2, 4, -1]);
    let s: Vec<i64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
    assert_eq!(
        geom.encode(&s),
        geom.encode(&x) + geom.encode(&y) - geom.zero_key()
    );
}

#[test]
fn solve_examples() {
    let s = solve(&inst(&[&[1, 1]], &[3], &[1, 2]), &DpConfig::default()).unwrap();
    assert_eq!(
        (s.status, s.objective, s.x),
        (Status::Optimal, Some(6), Some(vec![0, 3]))
    );
    let s = solve(&inst(&[&[2]], &[3], &[1]), &DpConfig::default()).unwrap();
    assert_eq!(s.status, Status::Infeasible);
    let f = solve(
        &inst(&[&[2]], &[3], &[1]),
        &DpConfig::default().with_mode(Mode::Feasibility),
    )
    .unwrap();
    assert_eq!(f.status, Status::Infeasible);
}

#[test]
fn unbounded_and_lp_unbounded_infeasible() {
    let s = solve(&inst(&[&[1, -1]], &[0], &[1, 0]), &DpConfig::default()).unwrap();
    assert_eq!(s.status, Status::Unbounded);
    // Relaxation unbounded, but 2 (x1 - x2) = 1 has no integer solution.
    let s = solve(&inst(&[&[2, -2]], &[1], &[1, 0]), &DpConfig::default()).unwrap();
    assert_eq!(s.status, Status::Infeasible);
}

#[test]
fn two_rows() {
    let p = inst(&[&[1, 1, 1, 0], &[1, 2, 0, 1]], &[4, 6], &[3, 4, 0, 0]);
    let s = solve(&p, &DpConfig::default()).unwrap();
    let o = ilp_brute(&p, &OracleBudget::new(10)).unwrap();
    assert_eq!(s.objective, o.objective);
    assert!(p.is_feasible(s.x.as_ref().unwrap()));
}

#[test]
fn audit_passes_and_windows_hold() {
    let p = inst(&[&[2, 3, 1, 1], &[1, -1, 2, 0]], &[9, 3], &[1, 2, -1, 0]);
    for mode in [Mode::Optimize, Mode::Feasibility] {
        let mut d = solve_detailed(&p, &DpConfig::default().with_mode(mode)).unwrap();
        let report = d.run.as_mut().unwrap().audit();
        assert!(report.passed(), "{:?}", report.failures);
        assert!(report.states > 0);
    }
}

#[test]
fn escalation_agrees() {
    for b in [[10, 4], [11, 4]] {
        let p = inst(&[&[3, 1, 2], &[1, 2, -1]], &b, &[2, 1, 1]);
        let s = solve(
            &p,
            &DpConfig::default()
                .with_eta(EtaPolicy::Aggressive)
                .with_escalate(true),
        )
        .unwrap();
        let o = ilp_brute(&p, &OracleBudget::new(lp_l1_radius(&p).unwrap().unwrap())).unwrap();
        assert_eq!((s.status, s.objective), (o.status, o.objective));
    }
}

#[test]
fn level_sizes_within_reference_bound() {
    let p = inst(&[&[3, 1, 2, 4], &[1, 2, -1, 0]], &[17, 5], &[2, 1, 1, 3]);
    let s = solve(&p, &DpConfig::default()).unwrap();
    let bound = state_space_bound(2, s.stats.eta, s.stats.delta.as_ref().unwrap());
    assert!(rat(s.stats.max_level() as i64) <= bound);
    assert_eq!(s.stats.level_sizes.len(), s.stats.rho as usize + 1);
}

fn arb_instance() -> impl Strategy<Value = IlpInstance> {
    (1usize..=2, 2usize..=4).prop_flat_map(|(k, extra)| {
        let n = k + extra;
        (
            proptest::collection::vec(1i64..=3, n),
            proptest::collection::vec(-3i64..=3, (k - 1) * n),
            proptest::collection::vec(0i64..=3, n),
            proptest::collection::vec(-3i64..=3, n),
            -1i64..=1,
        )
            .prop_filter_map("rank", move |(top, rest, x0, c, noise)| {
                let mut a = vec![top];
                a.extend(rest.chunks(n).map(|r| r.to_vec()));
                let mut b: Vec<i64> = a
                    .iter()
                    .map(|r| r.iter().zip(&x0).map(|(u, v)| u * v).sum())
                    .collect();
                b[0] += noise;
                IlpInstance::new(a, b, c).ok()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn matches_oracle(p in arb_instance()) {
        let radius = lp_l1_radius(&p).unwrap().unwrap_or(0);
        let o = ilp_brute(&p, &OracleBudget::new(radius)).unwrap();
        let s = solve(&p, &DpConfig::default()).unwrap();
        prop_assert_eq!(s.status, o.status);
        prop_assert_eq!(s.objective, o.objective);
        let f = solve(&p, &DpConfig::default().with_mode(Mode::Feasibility)).unwrap();
        prop_assert_eq!(f.status.has_solution(), o.status.has_solution());
        if let Some(x) = &f.x {
            prop_assert!(p.is_feasible(x));
        }
    }
}
