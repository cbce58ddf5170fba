#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

use gsnet_core::correlators::{LeafRule, Purification, RingVariant};
use gsnet_core::genfunc::{domain_table, gf_fidelity, gf_series};
use gsnet_core::noise::{NoiseModel, Semantics};
use gsnet_core::statmech::fidelity_exact;
use num_bigint::BigInt;
use num_rational::BigRational;

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn params(scheme: RingVariant) -> Vec<BigRational> {
    let all = [rat(2, 3), rat(5, 7), rat(3, 11), rat(13, 10), rat(7, 9)];
    let k = match scheme {
        RingVariant::S1 => 3,
        RingVariant::S2 => 5,
        _ => 4,
    };
    all[..k].to_vec()
}

#[test]
fn series_matches_domain_counts_exactly() {
    for scheme in RingVariant::ALL {
        let p = params(scheme);
        let coeffs = gf_series(scheme, &p).unwrap().coefficients(14);
        for n in 3..=14usize {
            if scheme == RingVariant::S2 && n % 2 == 1 {
                continue;
            }
            let table = domain_table(n, scheme).unwrap();
            let sum = table
                .iter()
                .fold(rat(0, 1), |acc, (s, &m)| acc + s.monomial(&p) * BigRational::from_integer(BigInt::from(m)));
            assert_eq!(sum, coeffs[n], "{scheme:?} N={n}");
        }
    }
}

#[test]
fn gf_matches_enumeration() {
    for v in RingVariant::ALL {
        for (pur, p) in
            [(Purification::Ideal, 0.05), (Purification::FirstOrder, 0.01), (Purification::FirstOrder, 0.05)]
        {
            let noise = NoiseModel::uniform(p).unwrap();
            for n in [8usize, 10, 12, 14] {
                let m = v.model(n, pur.clone(), Semantics::Or, LeafRule::Physical).unwrap();
                let e = fidelity_exact(&m, &noise).unwrap().fidelity.unwrap();
                let g = gf_fidelity(v, n, &noise, &pur).unwrap().fidelity.unwrap();
                assert!((e - g).abs() < 1e-10, "{v:?} {n} {p}: {e} vs {g}");
            }
        }
    }
}

/// Solving the implicit S2 equation `G = (R + G) / (1 - P)` for `G` gives
/// `-R/P`, and `P` has no constant term, so there is no power series. At unit
/// parameters `R = 1 - 3z^4` and `P = 3z^4` (over a common denominator).
#[test]
fn implicit_s2_equation_has_no_series_solution() {
    use gsnet_core::error::Error;
    use gsnet_core::genfunc::RationalSeries;
    let s = 3.0;
    let (b, c) = (2.0, 2.0);
    let r_num = [1.0, 0.0, 0.0, 0.0, -s];
    // [3 z^2 (1 - s z^2) + b c z^4] z^2
    let p_num = vec![0.0, 0.0, 0.0, 0.0, 3.0, 0.0, -3.0 * s + b * c + 1.0 - 1.0];
    let neg_r: Vec<f64> = r_num.iter().map(|v| -v).collect();
    assert_eq!(RationalSeries::new(neg_r, p_num), Err(Error::SingularSeries));
}
