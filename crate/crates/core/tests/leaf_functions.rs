use leaf_duffing::leaf::{Basis, LeafError, LeafKind, LeafKind::*};
use proptest::prelude::*;
use std::sync::OnceLock;

// Reference values from 30-digit arbitrary-precision quadrature and ODE
// integration, rounded to double precision.
const PI: [(u32, f64); 4] = [
    (1, std::f64::consts::PI),
    (2, 2.622_057_554_292_119_8),
    (3, 2.428_650_647_887_581_6),
    (4, 2.327_185_142_436_538_7),
];
const ETA: [(u32, f64); 3] = [(2, 1.311_028_777_146_059_9), (3, 0.701_091_052_662_727_1), (4, 0.481_975_824_075_188_7)];
const ZETA: [(u32, f64); 3] = [(2, 1.854_074_677_301_371_9), (3, 1.402_182_105_325_454_3), (4, 1.259_463_523_404_826_7)];
const VALUES: [(LeafKind, u32, f64, f64); 6] = [
    (Cleafh, 2, 0.5, 1.286_737_281_214_568),
    (Sleafh, 2, 1.0, 1.109_103_649_955_459_1),
    (Sleaf, 3, 1.0, 0.934_767_700_403_381_1),
    (Cleaf, 3, 2.0, -0.772_765_837_801_056_7),
    (Sleaf, 2, 2.0, 0.612_857_967_451_666_3),
    (Cleaf, 2, 1.0, 0.310_737_930_333_856_2),
];

fn basis(n: u32) -> &'static Basis {
    static CACHE: OnceLock<Vec<Basis>> = OnceLock::new();
    &CACHE.get_or_init(|| (1..=4).map(|n| Basis::new(n).unwrap()).collect())[n as usize - 1]
}

#[test]
fn constants_match_reference() {
    for (n, v) in PI {
        assert!((basis(n).pi_n() - v).abs() < 1e-14, "pi_{n}");
    }
    for (n, v) in ETA {
        assert!((basis(n).eta_n().unwrap() - v).abs() < 1e-14, "eta_{n}");
    }
    for (n, v) in ZETA {
        assert!((basis(n).zeta_n().unwrap() - v).abs() < 1e-14, "zeta_{n}");
    }
    assert_eq!(basis(1).eta_n(), None);
    assert_eq!(basis(1).zeta_n(), None);
}

#[test]
fn values_match_reference() {
    for (kind, n, t, v) in VALUES {
        let got = basis(n).eval(kind, t).unwrap();
        assert!((got - v).abs() < 1e-14, "{kind}_{n}({t}) = {got}, expected {v}");
    }
}

#[test]
fn basis_one_is_trigonometric() {
    let b = basis(1);
    for i in -300..300 {
        let t = 0.041 * i as f64;
        assert!((b.eval(Sleaf, t).unwrap() - t.sin()).abs() < 1e-12);
        assert!((b.eval(Cleaf, t).unwrap() - t.cos()).abs() < 1e-12);
        assert!((b.eval(Sleafh, t).unwrap() / t.sinh() - 1.0).abs() < 1e-12 || t == 0.0);
        assert!((b.eval(Cleafh, t).unwrap() / t.cosh() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn lemniscatic_curiosity() {
    // For n = 2 the tail substitution maps eta_2 onto the quarter period.
    let b = basis(2);
    assert!((b.eta_n().unwrap() - 0.5 * b.pi_n()).abs() < 1e-15);
}

#[test]
fn quarter_period_landmarks() {
    let b = basis(2);
    let q = 0.25 * b.pi_n();
    let s = b.eval(Sleaf, q).unwrap();
    let c = b.eval(Cleaf, q).unwrap();
    let expected = (2f64.sqrt() - 1.0).sqrt();
    assert!((s - expected).abs() < 1e-14 && (c - expected).abs() < 1e-14);
    assert!((b.eval(Sleaf, 0.5 * b.pi_n()).unwrap() - 1.0).abs() < 1e-15);
    assert!(b.eval(Cleaf, 0.5 * b.pi_n()).unwrap().abs() < 1e-15);
}

#[test]
fn domain_errors() {
    let b = basis(2);
    let zeta = b.zeta_n().unwrap();
    let eta = b.eta_n().unwrap();
    assert!(matches!(b.eval(Sleafh, zeta + 0.1), Err(LeafError::OutsideDomain { .. })));
    assert!(matches!(b.eval(Sleafh, -zeta), Err(LeafError::OutsideDomain { .. })));
    let err = b.eval(Cleafh, 3.0 * eta).unwrap_err();
    assert!((err.singularity().unwrap() - 3.0 * eta).abs() < 1e-12);
    assert!(err.to_string().contains("pole"));
    assert!(b.eval(Cleafh, eta - 2e-8).is_ok());
    assert!(matches!(b.inverse(Sleaf, 1.5), Err(LeafError::OutOfRange { .. })));
    assert!(matches!(b.inverse(Cleafh, 0.5), Err(LeafError::OutOfRange { .. })));
    assert!(matches!(basis(1).inverse(Cleafh, -2.0), Err(LeafError::OutOfRange { .. })));
    assert!(matches!(b.eval(Sleaf, f64::NAN), Err(LeafError::NonFinite(_))));
}

#[test]
fn cleafh_is_accurate_next_to_a_pole() {
    // cleafh_2(eta - d) = 1 / sleaf_2(d) with sleaf_2(d) = d - d^5/10 + ...
    let b = basis(2);
    let eta = b.eta_n().unwrap();
    for t in [eta - 1e-3, eta - 1e-5, eta - 5e-8] {
        let d = eta - t;
        let x = b.eval(Cleafh, t).unwrap();
        let expected = 1.0 + d.powi(4) / 10.0;
        assert!((x * d - expected).abs() < 1e-14, "t = {t}: x d = {}", x * d);
    }
}

#[test]
fn cleafh_pole_grows_like_power_law() {
    // Near a pole cleafh_n ~ ((n-1) d)^(-1/(n-1)).
    let b = basis(3);
    let eta = b.eta_n().unwrap();
    let d = 1e-6;
    let x = b.eval(Cleafh, eta - d).unwrap();
    assert!((x * (2.0 * d).sqrt() - 1.0).abs() < 1e-9);
}

fn energy_residual(kind: LeafKind, n: u32, x: f64, v: f64) -> f64 {
    let p = x.abs().powi(2 * n as i32);
    let r = match kind {
        Sleaf | Cleaf => v * v + p - 1.0,
        Sleafh => v * v - p - 1.0,
        Cleafh => v * v - p + 1.0,
    };
    r / (1.0 + p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leaf_periodicity_and_parity(n in 1u32..=4, t in -20.0f64..20.0) {
        let b = basis(n);
        let p = 2.0 * b.pi_n();
        let s = b.eval(Sleaf, t).unwrap();
        let c = b.eval(Cleaf, t).unwrap();
        prop_assert!((b.eval(Sleaf, t + p).unwrap() - s).abs() < 1e-9);
        prop_assert!((b.eval(Cleaf, t + p).unwrap() - c).abs() < 1e-9);
        prop_assert!((b.eval(Sleaf, -t).unwrap() + s).abs() < 1e-12);
        prop_assert!((b.eval(Cleaf, -t).unwrap() - c).abs() < 1e-12);
        prop_assert!((b.eval(Sleaf, t + 0.5 * b.pi_n()).unwrap() - c).abs() < 1e-9);
        prop_assert!(s.abs() <= 1.0 && c.abs() <= 1.0);
    }

    #[test]
    fn lemniscatic_identity(t in -30.0f64..30.0) {
        let b = basis(2);
        let s = b.eval(Sleaf, t).unwrap();
        let c = b.eval(Cleaf, t).unwrap();
        prop_assert!((s * s + c * c + s * s * c * c - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cleafh_antiperiodicity(n in 2u32..=4, t in -6.0f64..6.0) {
        let b = basis(n);
        let eta = b.eta_n().unwrap();
        if let (Ok(x), Ok(y)) = (b.eval(Cleafh, t), b.eval(Cleafh, t + 2.0 * eta)) {
            prop_assert!((x + y).abs() <= 1e-9 * x.abs().max(1.0), "{} vs {}", x, y);
            prop_assert!(x.abs() >= 1.0);
            prop_assert!((b.eval(Cleafh, -t).unwrap() - x).abs() <= 1e-12 * x.abs());
        }
    }

    #[test]
    fn first_integrals_hold(n in 1u32..=4, t in -5.0f64..5.0, k in 0usize..4) {
        let b = basis(n);
        let kind = LeafKind::ALL[k];
        if let Ok(p) = b.point(kind, t) {
            prop_assert!(energy_residual(kind, n, p.x, p.dx).abs() < 1e-12);
        }
    }

    #[test]
    fn finite_difference_matches_equation(n in 1u32..=4, t in -4.0f64..4.0, k in 0usize..4) {
        let b = basis(n);
        let kind = LeafKind::ALL[k];
        let h = 1e-4;
        let (Ok(p), Ok(lo), Ok(hi)) = (b.point(kind, t), b.eval(kind, t - h), b.eval(kind, t + h)) else {
            return Ok(());
        };
        // Truncation error grows like (h / distance to a pole)^2; stay clear of poles.
        let clearance = match kind {
            Cleafh => b.eta_n().map_or(f64::INFINITY, |e| e - b.branch_of(kind, t).unwrap().local_t),
            Sleafh => b.zeta_n().map_or(f64::INFINITY, |z| z - t.abs()),
            _ => f64::INFINITY,
        };
        prop_assume!(clearance > 0.05);
        let scale = 1.0 + p.x.abs().powi(2 * n as i32 - 1);
        let fd2 = (hi - 2.0 * p.x + lo) / (h * h);
        prop_assert!((fd2 - p.d2x).abs() / scale < 1e-4, "fd {} vs {}", fd2, p.d2x);
        let fd1 = (hi - lo) / (2.0 * h);
        prop_assert!((fd1 - p.dx).abs() / scale < 1e-4);
    }

    #[test]
    fn inverse_round_trip(n in 1u32..=4, u in -1.0f64..1.0, k in 0usize..4) {
        let b = basis(n);
        let kind = LeafKind::ALL[k];
        let t = match kind {
            Sleaf => u * 0.5 * b.pi_n(),
            Cleaf => (u + 1.0) * 0.5 * b.pi_n(),
            Sleafh => u * b.zeta_n().map_or(4.0, |z| 0.99 * z),
            Cleafh => b.eta_n().map_or(3.0 * u.abs(), |e| (u + 1.0) * e * 0.995),
        };
        if let Ok(x) = b.eval(kind, t) {
            let back = b.inverse(kind, x).unwrap();
            prop_assert!((back - t).abs() < 1e-9, "{}: {} -> {} -> {}", kind, t, x, back);
        }
    }

    #[test]
    fn sleaf_is_monotone_on_each_branch(n in 1u32..=4, a in 0.0f64..1.0, gap in 1e-6f64..0.5) {
        let b = basis(n);
        let ta = a * 0.5 * b.pi_n();
        let tb = (ta + gap).min(0.5 * b.pi_n());
        prop_assert!(b.eval(Sleaf, tb).unwrap() >= b.eval(Sleaf, ta).unwrap());
        prop_assert!(b.eval(Cleaf, tb).unwrap() <= b.eval(Cleaf, ta).unwrap());
    }
}
