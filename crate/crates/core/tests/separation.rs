use prodsep::certificate::{emit, parse, verify, Certificate, FactorizationCertificate, HallCertificate, ProductCertificate};
use prodsep::random::{random_generators, random_reduced_word, random_subgroup_word, rng};
use prodsep::rational::member_product;
use prodsep::separate::{factorize, hall_separator, product_separator, FactorizeOptions, SeparationStatus};
use prodsep::stallings::{stallings_graph, PointedImmersion};
use prodsep::word::Alphabet;
use rand::Rng;

const CAP: usize = 20_000;

#[test]
fn factorize_agrees_with_the_oracle() {
    let mut r = rng(11);
    let (mut found, mut none) = (0, 0);
    for _ in 0..60 {
        let hs = vec![random_generators(&mut r, 2, 1, 3), random_generators(&mut r, 2, 1, 3)];
        let w = if r.gen_bool(0.5) {
            random_subgroup_word(&mut r, &hs[0], 2).concat(&random_subgroup_word(&mut r, &hs[1], 2))
        } else {
            let len = r.gen_range(1..=5);
            random_reduced_word(&mut r, 2, len).into_word()
        };
        let subs: Vec<PointedImmersion> = hs.iter().map(|g| stallings_graph(2, g)).collect();
        let member = member_product(&subs, &w);
        let options = FactorizeOptions {
            primes: None,
            cap: CAP,
        };
        match factorize(2, &hs, &w, None, &options) {
            Ok(Some((f, _))) => {
                assert!(member, "factorized a non-member");
                assert!(f.verify(&subs, &w));
                found += 1;
            }
            Ok(None) => {
                assert!(!member, "missed a member");
                none += 1;
            }
            Err(e) => assert!(e.is_cap(), "{e}"),
        }
    }
    assert!(found > 0 && none > 0);
}

#[test]
fn certificates_round_trip_and_verify() {
    let a = Alphabet::new("xy").unwrap();
    let mut r = rng(12);
    let mut kinds = [0; 3];
    while kinds.iter().any(|&k| k < 5) {
        let hs = vec![random_generators(&mut r, 2, 2, 3), random_generators(&mut r, 2, 1, 3)];
        let len = r.gen_range(1..=5);
        let w = random_reduced_word(&mut r, 2, len).into_word();
        let subs: Vec<PointedImmersion> = hs.iter().map(|g| stallings_graph(2, g)).collect();
        let mut certs = Vec::new();
        if !subs[0].contains(&w.reduce()) {
            let wit = hall_separator(2, &hs[0], &w).unwrap();
            certs.push(Certificate::Hall(HallCertificate::from_witness(&wit, &a)));
            kinds[0] += 1;
        }
        if !member_product(&subs, &w) {
            let wit = product_separator(2, &hs, &w, &[2], 1_000_000).unwrap();
            assert_ne!(wit.status, SeparationStatus::NotSeparated);
            certs.push(Certificate::Product(ProductCertificate::from_witness(&wit, &a)));
            kinds[1] += 1;
        }
        let h1 = random_subgroup_word(&mut r, &hs[0], 2);
        let h2 = random_subgroup_word(&mut r, &hs[1], 2);
        let v = h1.concat(&h2);
        let options = FactorizeOptions {
            primes: None,
            cap: CAP,
        };
        if let Ok(Some((f, _))) = factorize(2, &hs, &v, Some(&[h1, h2]), &options) {
            certs.push(Certificate::Factorization(FactorizationCertificate::new(&a, &hs, &v, &f)));
            kinds[2] += 1;
        }
        for c in certs {
            let text = emit(&c);
            let back = parse(&text).unwrap();
            assert_eq!(back, c, "{text}");
            assert!(!matches!(verify(&back, 1_000_000), prodsep::certificate::Verdict::Invalid(_)), "{text}");
        }
    }
}
