//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nonlocal::classify::{
    duan_three_state_sep, eigenvalue_ratio, elimination_split, gamma_star,
    min_copies_adaptive_locc, min_copies_adaptive_sep, region, Region, ANTIPARALLEL_TOL,
};
use nonlocal::entanglement::{
    concurrence, pair_projector, pt_spectrum_cross_closed, pt_spectrum_p12_closed,
    separability_certificate, ProjectorSide, PRODUCT_TOL,
};
use nonlocal::linalg::{hermitian_eigenvalues, partial_transpose, Mat4};
use nonlocal::protocols::{
    bell_grouping_protocol, elimination_tournament, exact_success_probability, sample_success,
    walgate_split, z_parity_guess_protocol,
};
use nonlocal::secretshare::{decode_full_collaboration, encode_2bit, strong_pair_shares};
use nonlocal::states::{
    a_basis, random, theta_basis, BipartiteKet, FamilyParams, OrthonormalBasis,
};

type Verdict = (bool, String);
type Criterion = (&'static str, fn() -> Verdict);

fn fam(alpha: f64, beta: f64, gamma: f64) -> OrthonormalBasis {
    a_basis(&FamilyParams::new(alpha, beta, gamma).unwrap())
}

fn interior(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|k| FRAC_PI_2 * k as f64 / (n + 1) as f64)
        .collect()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

fn sorted(mut v: [f64; 4]) -> [f64; 4] {
    v.sort_by(f64::total_cmp);
    v
}

fn pt_spectrum(b: &OrthonormalBasis, i: usize, j: usize) -> [f64; 4] {
    let p: Mat4 = pair_projector(b, i, j, ProjectorSide::Span).unwrap();
    hermitian_eigenvalues(&partial_transpose(&p)).unwrap()
}

fn max_dev(a: [f64; 4], b: [f64; 4]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn closed_spectra() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_p12, mut worst_cross) = (0.0f64, 0.0f64);
    let grid = interior(100);
    for &alpha in &grid {
        for &beta in &grid {
            let want = sorted(pt_spectrum_p12_closed(alpha, beta));
            for _ in 0..5 {
                let b = fam(alpha, beta, rng.gen_range(0.0..FRAC_PI_2));
                worst_p12 = worst_p12
                    .max(max_dev(want, pt_spectrum(&b, 0, 1)))
                    .max(max_dev(want, pt_spectrum(&b, 2, 3)));
            }
            let want = sorted(pt_spectrum_cross_closed(alpha, beta));
            let b = fam(alpha, beta, FRAC_PI_4);
            for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
                worst_cross = worst_cross.max(max_dev(want, pt_spectrum(&b, i, j)));
            }
        }
    }
    (
        worst_p12 < 1e-10 && worst_cross < 1e-10,
        format!("max deviation P12/P34 {worst_p12:.2e}, cross {worst_cross:.2e}"),
    )
}

fn all_pairs_npt() -> Verdict {
    let grid = linspace(0.05, FRAC_PI_2 - 0.05, 30);
    let (mut checked, mut worst) = (0usize, f64::NEG_INFINITY);
    for &alpha in &grid {
        for &beta in &grid {
            if (alpha - beta).abs() < 0.05 || (alpha + beta - FRAC_PI_2).abs() < 0.05 {
                continue;
            }
            let b = fam(alpha, beta, FRAC_PI_4);
            for (i, j) in nonlocal::classify::PAIRS {
                let p = pair_projector(&b, i, j, ProjectorSide::Span).unwrap();
                worst = worst.max(separability_certificate(&p).unwrap().min_pt_eigenvalue);
            }
            checked += 1;
        }
    }
    (
        checked > 0 && worst < -1e-9,
        format!("{checked} grid points, largest min PT eigenvalue {worst:.3e}"),
    )
}

fn classification_table() -> Verdict {
    let gs = gamma_star(0.4, 0.8).unwrap();
    let cases: [(&str, OrthonormalBasis, (u8, u8)); 5] = [
        ("B[0]", theta_basis(0.0).unwrap(), (1, 1)),
        ("B[pi/4]", theta_basis(FRAC_PI_4).unwrap(), (2, 2)),
        ("A(0.3,0.9,pi/4)", fam(0.3, 0.9, FRAC_PI_4), (3, 2)),
        ("A(0.4,0.8,gamma*)", fam(0.4, 0.8, gs), (3, 2)),
        ("A(0.5,0.6,pi/6)", fam(0.5, 0.6, FRAC_PI_6), (3, 3)),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, b, want) in cases {
        let got = (
            min_copies_adaptive_locc(&b).unwrap(),
            min_copies_adaptive_sep(&b).unwrap(),
        );
        ok &= got == want;
        parts.push(format!("{name}=({},{})", got.0, got.1));
    }
    (ok, parts.join(" "))
}

/// `|a b>` and an orthogonal product partner, sharing one party's factor.
fn orthogonal_product_pair(rng: &mut ChaCha8Rng) -> [BipartiteKet; 2] {
    let a = random::qubit(rng);
    let b = random::qubit(rng);
    let c = random::qubit(rng);
    let perp = |v: [nonlocal::linalg::C64; 2]| [-v[1].conj(), v[0].conj()];
    let k = |x, y| BipartiteKet::normalized(nonlocal::linalg::kron2(&x, &y)).unwrap();
    if rng.gen_bool(0.5) {
        [k(a, b), k(perp(a), c)]
    } else {
        [k(b, a), k(c, perp(a))]
    }
}

fn few_entangled_bases() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0u8;
    let mut counterexamples = 0;
    for n in 0..200 {
        let b = if n % 10 == 9 {
            let u = random::unitary2(&mut rng);
            let v = random::unitary2(&mut rng);
            nonlocal::states::computational_basis().apply_local(&u, &v)
        } else {
            let seed = orthogonal_product_pair(&mut rng);
            random::complete_basis(&mut rng, &seed, "two product states")
        };
        let entangled = b
            .states()
            .iter()
            .filter(|k| concurrence(k) >= PRODUCT_TOL)
            .count();
        assert!(
            entangled <= 2,
            "generator produced {entangled} entangled states"
        );
        let m = min_copies_adaptive_locc(&b).unwrap();
        worst = worst.max(m);
        if m > 2 {
            counterexamples += 1;
        }
    }
    (
        counterexamples == 0,
        format!("200 bases, max min_copies_locc {worst}, counterexamples {counterexamples}"),
    )
}

fn duan_consistency() -> Verdict {
    let mut ok = true;
    let (mut worst_sum, mut worst_im, mut worst_re) = (0.0f64, 0.0f64, f64::NEG_INFINITY);
    for &alpha in &linspace(0.05, 0.5, 20) {
        for &beta in &linspace(0.6, 0.97, 20) {
            let p = FamilyParams::new(alpha, beta, FRAC_PI_4).unwrap();
            let b = a_basis(&p);
            ok &= region(&p).unwrap() == Region::RI;
            let (rest, comp) = elimination_split(&b, 1);
            let sum: f64 = rest.iter().map(concurrence).sum();
            worst_sum = worst_sum.max((sum - concurrence(&comp)).abs());
            for k in &rest {
                let r = eigenvalue_ratio(k, &comp).expect("invertible complement");
                worst_im = worst_im.max(r.im.abs());
                worst_re = worst_re.max(r.re);
            }
            ok &= duan_three_state_sep(&rest, &comp);
        }
    }
    ok &= worst_sum < 1e-9 && worst_im < ANTIPARALLEL_TOL && worst_re < 0.0;

    let mut r4_hits = 0;
    for &alpha in &linspace(0.4, 1.17, 20) {
        for &beta in &linspace(0.4, 1.17, 20) {
            let p = FamilyParams::new(alpha, beta, FRAC_PI_6).unwrap();
            let b = a_basis(&p);
            ok &= region(&p).unwrap() == Region::RIV;
            for l in 0..4 {
                let (rest, comp) = elimination_split(&b, l);
                if duan_three_state_sep(&rest, &comp) {
                    r4_hits += 1;
                }
            }
        }
    }
    ok &= r4_hits == 0;
    (
        ok,
        format!(
            "R_I: max |sum C - C(a2)| {worst_sum:.2e}, max |Im ratio| {worst_im:.2e}, max Re ratio {worst_re:.3}; R_IV: {r4_hits} Duan passes"
        ),
    )
}

fn protocol_exactness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_tournament = 0.0f64;
    for _ in 0..1000 {
        let b = random::basis(&mut rng);
        let p = exact_success_probability(&elimination_tournament(&b, 3).unwrap(), &b).unwrap();
        worst_tournament = worst_tournament.max((p - 1.0).abs());
    }
    let family_instances = [
        theta_basis(0.0).unwrap(),
        theta_basis(FRAC_PI_4).unwrap(),
        fam(0.3, 0.9, FRAC_PI_4),
        fam(0.4, 0.8, gamma_star(0.4, 0.8).unwrap()),
        fam(0.5, 0.6, FRAC_PI_6),
    ];
    for b in &family_instances {
        let p = exact_success_probability(&elimination_tournament(b, 3).unwrap(), b).unwrap();
        worst_tournament = worst_tournament.max((p - 1.0).abs());
    }
    let mut worst_bell = 0.0f64;
    for theta in linspace(0.0, FRAC_PI_2, 50) {
        let t = bell_grouping_protocol(theta).unwrap();
        let p = exact_success_probability(&t, &theta_basis(theta).unwrap()).unwrap();
        worst_bell = worst_bell.max((p - 1.0).abs());
    }
    let mut worst_residual = 0.0f64;
    for _ in 0..1000 {
        let b = random::basis(&mut rng);
        let i = rng.gen_range(0..4);
        let j = (i + rng.gen_range(1..4)) % 4;
        let s = walgate_split(b.state(i), b.state(j)).unwrap();
        worst_residual =
            worst_residual.max(s.conditional_overlaps[0].max(s.conditional_overlaps[1]));
    }
    (
        worst_tournament < 1e-9 && worst_bell < 1e-9 && worst_residual < 1e-9,
        format!(
            "tournament |1-p| {worst_tournament:.2e}, bell grouping |1-p| {worst_bell:.2e}, pair residual {worst_residual:.2e}"
        ),
    )
}

fn sampling_calibration() -> Verdict {
    let b = theta_basis(FRAC_PI_4).unwrap();
    let t = z_parity_guess_protocol();
    let exact = exact_success_probability(&t, &b).unwrap();
    let runs = 100_000u64;
    let s = sample_success(&t, &b, runs, 2024).unwrap();
    let sigma = (0.25 / runs as f64).sqrt();
    let z = (s.empirical_rate - 0.5) / sigma;
    (
        (exact - 0.5).abs() < 1e-12 && z.abs() < 4.0,
        format!(
            "exact {exact}, empirical {:.5} over {runs} runs, z = {z:.2}",
            s.empirical_rate
        ),
    )
}

fn secret_sharing() -> Verdict {
    let b = fam(0.3, 0.9, FRAC_PI_4);
    let mut ok = true;
    for m in 0..4 {
        let shares = encode_2bit(m, &b).unwrap();
        ok &= shares.warnings.is_empty();
        let d = decode_full_collaboration(&shares, &b).unwrap();
        ok &= d.message == m && (d.probability - 1.0).abs() < 1e-9;
    }
    let pass = strong_pair_shares(&b, 1, 3, 0.5, 0.5)
        .unwrap()
        .security_pass();
    let bell_fail = !strong_pair_shares(&theta_basis(FRAC_PI_4).unwrap(), 1, 2, 0.5, 0.5)
        .unwrap()
        .security_pass();
    (
        ok && pass && bell_fail,
        format!(
            "round trip {ok}, family strong pair PASS {pass}, Bell strong pair FAIL {bell_fail}"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("closed-form PT spectra", closed_spectra),
        ("all pair projectors NPT", all_pairs_npt),
        ("classification table", classification_table),
        (
            "two entangled states need at most two copies",
            few_entangled_bases,
        ),
        ("Duan consistency in R_I and R_IV", duan_consistency),
        ("protocol exactness", protocol_exactness),
        ("sampling calibration", sampling_calibration),
        ("secret sharing", secret_sharing),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check();
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {}: {} {name}: {detail}",
            n + 1,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
