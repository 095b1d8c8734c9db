//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

use std::time::{Duration, Instant};

use sla_esprit::analysis::{
    da_error_amplification, matched_distance, matched_distance_cyclic, sample_covariance_bound, BoundIngredients,
};
use sla_esprit::covariance::{sample_covariance, ss_covariance};
use sla_esprit::esprit::{da_ss_share_subspace, esprit_freqs, estimate_from_covariance, signal_subspace, signal_subspace_with_eig};
use sla_esprit::linalg::{hermitian_eig, spectral_norm, subspace_dist};
use sla_esprit::signal_sim::{complex_gaussian_matrix, derive_trial_seed, sample_snapshots, true_covariance_sla, true_covariance_ula};
use sla_esprit::{CMatrix, CovarianceSet, SlaGeometry, SourceScene, Variant};
use sla_esprit_harness::config::{exp1_preset, exp3_preset, ConfigBuilder};
use sla_esprit_harness::{execute, fit_loglog_slope, SweepOutcome, TrialResult};

const TRIALS: &str = "200";
const VARIANTS: [Variant; 2] = [Variant::Da, Variant::Ss];

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: u32, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failures += 1;
        }
        println!("[{}] {id:>2}. {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

/// Uniform draw in [0, 1) from a hashed counter.
fn unit(seed: u64, i: u64) -> f64 {
    (derive_trial_seed(seed, i) >> 11) as f64 / (1u64 << 53) as f64
}

fn log_uniform(seed: u64, i: u64, lo: f64, hi: f64) -> f64 {
    (lo.ln() + unit(seed, i) * (hi.ln() - lo.ln())).exp()
}

fn random_hermitian(p: usize, seed: u64) -> CMatrix {
    let g = complex_gaussian_matrix(p, p, seed).unwrap();
    g.add(&g.adjoint()).unwrap().scale(0.5)
}

fn sweep(builder: &mut ConfigBuilder, pairs: &[(&str, &str)]) -> SweepOutcome {
    builder.set("variant", "both").unwrap();
    builder.set("trials", TRIALS).unwrap();
    for (k, v) in pairs {
        builder.set(k, v).unwrap();
    }
    execute(&builder.build().unwrap()).unwrap()
}

fn mean(outcome: &SweepOutcome, v: Variant, l: usize, sigma2: f64, delta: Option<f64>) -> f64 {
    outcome
        .aggregate(v, l, sigma2, delta)
        .unwrap_or_else(|| panic!("no aggregate for {v} L={l} sigma2={sigma2} delta={delta:?}"))
        .mean_md
}

fn exact_recovery(rep: &mut Report) {
    let start = Instant::now();
    let scene = SourceScene::reference(1.0);
    let r_da = true_covariance_ula(&scene, 14).unwrap();
    let r_ss = ss_covariance(&r_da).unwrap();
    let md_da = matched_distance(&esprit_freqs(&signal_subspace(&r_da, 8).unwrap()).unwrap().freqs, scene.freqs()).unwrap();
    let md_ss = matched_distance(&esprit_freqs(&signal_subspace(&r_ss, 8).unwrap()).unwrap().freqs, scene.freqs()).unwrap();
    let elapsed = start.elapsed();
    rep.line(
        1,
        "exact recovery from exact R_DA",
        md_da <= 1e-8 && md_ss <= 1e-8 && elapsed < Duration::from_secs(1),
        format!("md DA {md_da:.2e}, SS {md_ss:.2e} (<= 1e-8); {:.1} ms (< 1 s)", elapsed.as_secs_f64() * 1e3),
    );
}

fn snapshot_slope(rep: &mut Report, bound_rows: &mut Vec<TrialResult>) {
    let start = Instant::now();
    let grid = [100usize, 316, 1000, 3162, 10000];
    let out = sweep(&mut exp1_preset(false), &[("l_grid", "100,316,1000,3162,10000"), ("sigma_grid", "1")]);
    let elapsed = start.elapsed();
    let slopes: Vec<f64> = VARIANTS
        .iter()
        .map(|&v| {
            let pts: Vec<(f64, f64)> = grid.iter().map(|&l| (l as f64, mean(&out, v, l, 1.0, None))).collect();
            fit_loglog_slope(&pts).unwrap()
        })
        .collect();
    bound_rows.extend(out.rows);
    rep.line(
        2,
        "snapshot-sweep log-log slope",
        slopes.iter().all(|s| (-0.65..=-0.35).contains(s)) && elapsed < Duration::from_secs(120),
        format!(
            "slope DA {:.4}, SS {:.4} (in [-0.65, -0.35]); {:.1} s (< 120 s)",
            slopes[0],
            slopes[1],
            elapsed.as_secs_f64()
        ),
    );
}

fn saturation(rep: &mut Report, bound_rows: &mut Vec<TrialResult>) {
    let out = sweep(&mut ConfigBuilder::new(), &[("l_grid", "100,10000"), ("sigma_grid", "0")]);
    let mut pass = true;
    let mut detail = Vec::new();
    for v in VARIANTS {
        let (lo, hi) = (mean(&out, v, 100, 0.0, None), mean(&out, v, 10000, 0.0, None));
        pass &= lo > 1e-4 && hi < lo;
        detail.push(format!("{v} mean md L=1e2 {lo:.3e} (> 1e-4), L=1e4 {hi:.3e}"));
    }
    bound_rows.extend(out.rows);
    rep.line(3, "noiseless saturation error", pass, detail.join("; "));
}

fn noise_plateau(rep: &mut Report, bound_rows: &mut Vec<TrialResult>) {
    let out = sweep(&mut ConfigBuilder::new(), &[("l_grid", "1000"), ("sigma2_grid", "0.01,0.1")]);
    let s2: Vec<f64> = out.points.iter().map(|p| p.sigma2()).collect();
    let mut pass = true;
    let mut detail = Vec::new();
    for v in VARIANTS {
        let ratio = mean(&out, v, 1000, s2[0], None) / mean(&out, v, 1000, s2[1], None);
        pass &= (0.5..=2.0).contains(&ratio);
        detail.push(format!("{v} ratio {ratio:.4}"));
    }
    bound_rows.extend(out.rows);
    rep.line(4, "small-noise plateau at L = 1e3", pass, format!("{} (in [0.5, 2])", detail.join(", ")));
}

fn separation_monotone(rep: &mut Report, bound_rows: &mut Vec<TrialResult>) {
    let deltas = [0.018, 0.036, 0.071, 0.143];
    let out = sweep(&mut exp3_preset(), &[("l_grid", "10000")]);
    let mut pass = true;
    let mut detail = Vec::new();
    for v in VARIANTS {
        let means: Vec<f64> = deltas.iter().map(|&d| mean(&out, v, 10000, 1.0, Some(d))).collect();
        pass &= means.windows(2).all(|w| w[1] <= w[0]);
        let text: Vec<String> = means.iter().map(|m| format!("{m:.3e}")).collect();
        detail.push(format!("{v} [{}]", text.join(", ")));
    }
    bound_rows.extend(out.rows);
    rep.line(5, "separation monotonicity at L = 1e4", pass, format!("mean md for increasing delta: {}", detail.join("; ")));
}

fn da_ss_equivalence(rep: &mut Report) {
    let geom = SlaGeometry::mra6();
    let (mut held, mut mismatches, mut worst) = (0, 0, 0.0f64);
    for t in 0..200u64 {
        let l = log_uniform(61, 2 * t, 8.0, 1e4).round() as usize;
        let s2 = log_uniform(61, 2 * t + 1, 1e-2, 1e1);
        let scene = SourceScene::reference(s2);
        let cov = CovarianceSet::from_snapshots(&sample_snapshots(&geom, &scene, l, derive_trial_seed(62, t)).unwrap()).unwrap();
        let (_, eig) = signal_subspace_with_eig(&cov.r_da_hat, 8).unwrap();
        if !da_ss_share_subspace(&eig, 8) {
            continue;
        }
        held += 1;
        let da = estimate_from_covariance(&cov, 8, Variant::Da);
        let ss = estimate_from_covariance(&cov, 8, Variant::Ss);
        match (da, ss) {
            (Ok(a), Ok(b)) => {
                let d = matched_distance(&a.freqs, &b.freqs).unwrap();
                worst = worst.max(d);
                mismatches += usize::from(d > 1e-10);
            }
            (Err(_), Err(_)) => {}
            _ => mismatches += 1,
        }
    }
    rep.line(
        6,
        "DA/SS agreement when lambda_K > |lambda_M|",
        mismatches == 0 && held > 0,
        format!("condition held in {held}/200 trials; max disagreement {worst:.2e} (<= 1e-10); {mismatches} mismatches"),
    );
}

fn perturbation_suite(rep: &mut Report) {
    let (mut weyl_fail, mut dk_fail, mut dk_checked) = (0, 0, 0);
    for case in 0..1000u64 {
        let p = 2 + (case % 12) as usize;
        let r = 1 + (case as usize) % (p - 1);
        let base = random_hermitian(p, derive_trial_seed(71, case));
        let e = random_hermitian(p, derive_trial_seed(72, case)).scale(10f64.powf(-4.0 + 4.0 * unit(73, case)));
        let eig = hermitian_eig(&base).unwrap();
        let eig_hat = hermitian_eig(&base.add(&e).unwrap()).unwrap();
        let e_norm = spectral_norm(&e).unwrap();
        if eig.eigenvalues.iter().zip(&eig_hat.eigenvalues).any(|(a, b)| (a - b).abs() > e_norm + 1e-9) {
            weyl_fail += 1;
        }
        let gap = eig.eigenvalues[r - 1] - eig.eigenvalues[r];
        if e_norm <= 0.293 * gap {
            dk_checked += 1;
            let d = subspace_dist(&eig_hat.leading_vectors(r), &eig.leading_vectors(r)).unwrap();
            if d > 2.0 * e_norm / gap + 1e-9 {
                dk_fail += 1;
            }
        }
    }
    rep.line(
        7,
        "Weyl and Davis-Kahan on 1000 random perturbations",
        weyl_fail == 0 && dk_fail == 0,
        format!("Weyl failures {weyl_fail}/1000, Davis-Kahan failures {dk_fail}/{dk_checked} cases meeting the gap condition"),
    );
}

fn da_amplification(rep: &mut Report) {
    let geom = SlaGeometry::mra6();
    let mut failures = 0;
    let mut worst_ratio = 0.0f64;
    let factor = da_error_amplification(14, 6);
    for t in 0..500u64 {
        let l = log_uniform(81, 2 * t, 6.0, 5e3).round() as usize;
        let sigma = 3.0 * unit(81, 2 * t + 1);
        let scene = SourceScene::reference(sigma * sigma);
        let y = sample_snapshots(&geom, &scene, l, derive_trial_seed(82, t)).unwrap();
        let cov = CovarianceSet::from_snapshots(&y).unwrap();
        let da_err = spectral_norm(&cov.r_da_hat.sub(&true_covariance_ula(&scene, 14).unwrap()).unwrap()).unwrap();
        let omega_err = spectral_norm(&cov.r_omega_hat.sub(&true_covariance_sla(&scene, &geom).unwrap()).unwrap()).unwrap();
        if da_err > factor * omega_err + 1e-9 {
            failures += 1;
        }
        worst_ratio = worst_ratio.max(da_err / omega_err);
    }
    rep.line(
        8,
        "DA error amplification",
        failures == 0,
        format!("{failures}/500 violations; max ratio {worst_ratio:.3} vs factor sqrt(M N_S) = {factor:.3}"),
    );
}

fn sample_covariance_concentration(rep: &mut Report) {
    let geom = SlaGeometry::mra6();
    let scene = SourceScene::reference(1.0);
    let l = 10 * geom.num_sensors();
    let bound = sample_covariance_bound(&BoundIngredients::compute(&geom, &scene, l as f64).unwrap());
    let r_true = true_covariance_sla(&scene, &geom).unwrap();
    let violations = (0..200u64)
        .filter(|&t| {
            let y = sample_snapshots(&geom, &scene, l, derive_trial_seed(91, t)).unwrap();
            spectral_norm(&sample_covariance(&y).unwrap().sub(&r_true).unwrap()).unwrap() > bound
        })
        .count();
    rep.line(
        9,
        "sample covariance concentration at L = 10 N_S",
        violations <= 20,
        format!("{violations}/200 violations (<= 10%); bound {bound:.3}"),
    );
}

fn brute_force_md(est: &[f64], truth: &[f64]) -> f64 {
    fn permute(i: usize, perm: &mut [usize], est: &[f64], truth: &[f64], best: &mut f64) {
        if i == perm.len() {
            let worst = perm
                .iter()
                .zip(truth)
                .map(|(&p, t)| {
                    let d = (est[p] - t).abs();
                    d.min(1.0 - d)
                })
                .fold(0.0, f64::max);
            *best = best.min(worst);
            return;
        }
        for j in i..perm.len() {
            perm.swap(i, j);
            permute(i + 1, perm, est, truth, best);
            perm.swap(i, j);
        }
    }
    let mut perm: Vec<usize> = (0..est.len()).collect();
    let mut best = f64::INFINITY;
    permute(0, &mut perm, est, truth, &mut best);
    best
}

fn matched_distance_oracle(rep: &mut Report) {
    let mut mismatches = 0;
    for case in 0..500u64 {
        let k = 1 + (case % 6) as usize;
        let a: Vec<f64> = (0..k as u64).map(|i| unit(101, case * 16 + i)).collect();
        let b: Vec<f64> = (0..k as u64).map(|i| unit(102, case * 16 + i)).collect();
        if matched_distance_cyclic(&a, &b).unwrap() != brute_force_md(&a, &b) {
            mismatches += 1;
        }
    }
    rep.line(
        10,
        "cyclic alignment equals brute-force matching",
        mismatches == 0,
        format!("{mismatches}/500 mismatches (exact equality, K <= 6)"),
    );
}

fn bound_dominance(rep: &mut Report, rows: &[TrialResult]) {
    let violations = rows.iter().filter(|r| r.md > r.md_bound).count();
    let errors = rows.iter().filter(|r| r.error).count();
    let geom = SlaGeometry::mra6();
    let unclamped: Vec<f64> = rows
        .iter()
        .map(|r| {
            let mut scene = SourceScene::reference(r.sigma2);
            if let Some(d) = r.delta {
                scene = scene.with_trailing_separation(d).unwrap();
            }
            let ing = BoundIngredients::compute(&geom, &scene, r.snapshots as f64).unwrap();
            sla_esprit::analysis::md_bound_unclamped(&ing)
        })
        .collect();
    let lo = unclamped.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = unclamped.iter().copied().fold(0.0, f64::max);
    rep.line(
        11,
        "md <= md_bound in every trial of criteria 2-5",
        violations == 0 && !rows.is_empty(),
        format!(
            "{violations}/{} violations, {errors} failed trials; unclamped bound ranges {lo:.3e} .. {hi:.3e} (clamped to 1)",
            rows.len()
        ),
    );
}

fn main() {
    let mut rep = Report { failures: 0 };
    let mut bound_rows = Vec::new();
    exact_recovery(&mut rep);
    snapshot_slope(&mut rep, &mut bound_rows);
    saturation(&mut rep, &mut bound_rows);
    noise_plateau(&mut rep, &mut bound_rows);
    separation_monotone(&mut rep, &mut bound_rows);
    da_ss_equivalence(&mut rep);
    perturbation_suite(&mut rep);
    da_amplification(&mut rep);
    sample_covariance_concentration(&mut rep);
    matched_distance_oracle(&mut rep);
    bound_dominance(&mut rep, &bound_rows);
    println!("acceptance: {} of 11 criteria passed", 11 - rep.failures);
    if rep.failures > 0 {
        std::process::exit(1);
    }
}
