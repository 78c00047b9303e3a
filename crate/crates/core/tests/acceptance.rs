//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//! Run with `cargo test --test acceptance`.

mod common;

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use catsynth::baseline::{fit_independent, PrivacyBudget};
use catsynth::copula::{fit_copula, sample_copula};
use catsynth::eval::{
    column_chi_square, column_kl, column_tvd, evaluate_pair, node_entropy, pair_mutual_information, rank_methods,
    EvalOptions, EvalReport, MethodScore, DEFAULT_GATE_ALPHA, DEFAULT_KL_SMOOTHING,
};
use catsynth::fixture::{
    fixture_dag, fixture_edges, fixture_model, make_fixture, AGE, AGE_65_PLUS, DEVELOPMENTAL, DISABILITY,
    INTERACTION_FAMILY, SURVEY_ROWS,
};
use catsynth::inference::{evidence_shift_report, posterior, Direction, Evidence, Query};
use catsynth::io::export_csv;
use catsynth::pipeline::{fit_and_sample, method_seed, run_pipeline, Method, MethodSpec, PipelineConfig};
use catsynth::{BayesNet, DataTable, Distribution, Execution, VariableKind};
use common::{brute_joint, brute_pair_tables, brute_posterior, decode, labelled_schema, random_network};

type Outcome = Result<String, String>;

/// Seeds are fixed up front; they are never tuned to make a criterion pass.
const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const NETWORKS: u64 = 60;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn network_suite() -> Vec<BayesNet> {
    (0..NETWORKS).map(|s| random_network(1_000 + s, 6, 10, false)).collect()
}

fn c1_inference_matches_enumeration() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut queries = 0usize;
    for model in network_suite() {
        let joint = brute_joint(&model);
        let pairs = brute_pair_tables(&model, &joint);
        let cards = model.schema().cardinalities();
        let n = cards.len();
        for e in 0..n {
            for x in 0..cards[e] {
                for t in (0..n).filter(|&t| t != e) {
                    let row = &pairs[e][t][x * cards[t]..(x + 1) * cards[t]];
                    let mass: f64 = row.iter().sum();
                    let q = Query::new(t, Evidence::new(model.schema(), &[(e, x)]).unwrap(), Direction::Diagnostic)
                        .unwrap();
                    let got = posterior(&model, &q).map_err(|err| format!("query failed: {err}"))?;
                    for (a, b) in row.iter().zip(got.probs()) {
                        worst = worst.max((a / mass - b).abs());
                    }
                    queries += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= 1e-10 && secs < 30.0,
        format!("{NETWORKS} networks, {queries} queries, max error {worst:.2e}, {secs:.1}s"),
    )
}

fn c2_joint_normalizes() -> Outcome {
    let mut worst = 0.0f64;
    for model in network_suite() {
        let cards = model.schema().cardinalities();
        let size: usize = cards.iter().product();
        let mut x = vec![0; cards.len()];
        let mut total = 0.0;
        for i in 0..size {
            decode(&cards, i, &mut x);
            total += model.joint_probability(&x).map_err(|e| e.to_string())?;
        }
        worst = worst.max((total - 1.0).abs());
    }
    check(worst <= 1e-9, format!("{NETWORKS} networks, max |sum - 1| = {worst:.2e}"))
}

fn bn_report(seed: u64) -> Result<(DataTable, EvalReport), String> {
    let (_, real) = make_fixture(seed, SURVEY_ROWS).map_err(|e| e.to_string())?;
    let method = Method::BayesNet { alpha: 1.0 };
    let (_, synth) = fit_and_sample(
        &method,
        &real,
        Some(&fixture_dag()),
        SURVEY_ROWS,
        method_seed(seed, &method.label()),
        Execution::default(),
    )
    .map_err(|e| e.to_string())?;
    let report = evaluate_pair(&real, &synth, &fixture_edges(), EvalOptions::default()).map_err(|e| e.to_string())?;
    Ok((real, report))
}

fn c3_bn_round_trip() -> Outcome {
    let start = Instant::now();
    let mut min_tvd = f64::INFINITY;
    let mut max_kl = 0.0f64;
    let mut low_p = Vec::new();
    for seed in SEEDS {
        let (_, r) = bn_report(seed)?;
        min_tvd = min_tvd.min(r.aggregates.tvd_mean);
        max_kl = max_kl.max(r.aggregates.kl_median);
        for c in r.columns.iter().filter(|c| c.p_value < DEFAULT_GATE_ALPHA) {
            low_p.push(format!("seed {seed} {} p={:.3}", c.name, c.p_value));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        min_tvd >= 0.99 && max_kl <= 1e-3 && low_p.is_empty() && secs < 60.0,
        format!(
            "seeds {SEEDS:?}: min mean TVD {min_tvd:.5}, max KL median {max_kl:.2e}, columns with p < 0.05: [{}], {secs:.1}s",
            low_p.join("; ")
        ),
    )
}

fn c4_ranking() -> Outcome {
    let methods =
        [Method::BayesNet { alpha: 1.0 }, Method::Copula, Method::Independent { budget: PrivacyBudget::Off }];
    let mut bn_first = 0;
    let mut bn_beats_independent = 0;
    let mut lines = Vec::new();
    for seed in SEEDS {
        let (_, real) = make_fixture(seed, SURVEY_ROWS).map_err(|e| e.to_string())?;
        let mut scores = Vec::new();
        for m in &methods {
            let label = m.label();
            let (_, synth) = fit_and_sample(
                m,
                &real,
                Some(&fixture_dag()),
                SURVEY_ROWS,
                method_seed(seed, &label),
                Execution::default(),
            )
            .map_err(|e| e.to_string())?;
            let report = evaluate_pair(&real, &synth, &[], EvalOptions::default()).map_err(|e| e.to_string())?;
            scores.push(MethodScore::from_report(m.id(), &m.parameters(), &label, &report));
        }
        let tvd = |id: &str| scores.iter().find(|s| s.method == id).unwrap().aggregates.unwrap().tvd_mean;
        let (bn, ind) = (tvd("bn"), tvd("independent"));
        if bn > ind {
            bn_beats_independent += 1;
        }
        let ranked = rank_methods(scores, DEFAULT_GATE_ALPHA).map_err(|e| e.to_string())?;
        let first = ranked.iter().find(|s| s.rank == Some(1)).map_or("none", |s| s.method.as_str()).to_string();
        if first == "bn" {
            bn_first += 1;
        }
        lines.push(format!("seed {seed}: first={first} bn={bn:.5} ind={ind:.5}"));
    }
    check(
        bn_first >= 4 && bn_beats_independent == SEEDS.len(),
        format!(
            "bn first in {bn_first}/5, bn TVD > independent in {bn_beats_independent}/5 ({})",
            lines.join(", ")
        ),
    )
}

fn c5_entropy_and_mi() -> Outcome {
    let (_, r) = bn_report(SEEDS[0])?;
    let dh = r.structure.entropy.iter().map(|e| (e.real - e.synthetic).abs()).fold(0.0, f64::max);
    let dmi = r.structure.mutual_information.iter().map(|e| (e.real - e.synthetic).abs()).fold(0.0, f64::max);
    check(
        dh <= 0.02 && dmi <= 0.005,
        format!("max |dH| = {dh:.5} bits, max |dMI| = {dmi:.5} bits over {} edges", r.structure.mutual_information.len()),
    )
}

fn mi_of(t: &DataTable, a: usize, b: usize) -> f64 {
    let joint: Vec<f64> = t.pair_counts(a, b).iter().map(|&c| c as f64).collect();
    pair_mutual_information(&joint, t.schema().cardinality(a), t.schema().cardinality(b)).unwrap()
}

fn c6_independent_destroys_dependence() -> Outcome {
    let model = fixture_model();
    let joint = brute_joint(&model);
    let pairs = brute_pair_tables(&model, &joint);
    let cards = model.schema().cardinalities();
    let (a, b, true_mi) = fixture_edges()
        .into_iter()
        .map(|(a, b)| (a, b, pair_mutual_information(&pairs[a][b], cards[a], cards[b]).unwrap()))
        .max_by(|x, y| x.2.total_cmp(&y.2))
        .unwrap();
    let (_, real) = make_fixture(SEEDS[0], SURVEY_ROWS).map_err(|e| e.to_string())?;
    let m = Method::Independent { budget: PrivacyBudget::Off };
    let (_, synth) =
        fit_and_sample(&m, &real, None, SURVEY_ROWS, method_seed(SEEDS[0], &m.label()), Execution::default())
            .map_err(|e| e.to_string())?;
    let observed = mi_of(&synth, a, b);
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut perm: Vec<usize> = (0..synth.n_rows()).collect();
    let mut null: Vec<f64> = (0..200)
        .map(|_| {
            perm.shuffle(&mut rng);
            mi_of(&synth.with_permuted_column(b, &perm).unwrap(), a, b)
        })
        .collect();
    null.sort_by(f64::total_cmp);
    let p95 = null[189];
    let names = model.schema().names().collect::<Vec<_>>();
    check(
        true_mi >= 0.05 && observed <= p95,
        format!(
            "{}->{}: true MI {true_mi:.4}, synthetic MI {observed:.2e}, permutation 95th pct {p95:.2e}",
            names[a], names[b]
        ),
    )
}

fn c7_privacy_monotone() -> Outcome {
    let (_, real) = make_fixture(SEEDS[0], SURVEY_ROWS).map_err(|e| e.to_string())?;
    let exact: Vec<Vec<f64>> = (0..real.n_cols())
        .map(|c| real.column_counts(c).iter().map(|&n| n as f64 / real.n_rows() as f64).collect())
        .collect();
    let draws = 500u64;
    let mut means = Vec::new();
    for eps in [1.0, 5.0, 10.0] {
        let budget = PrivacyBudget::epsilon(eps).map_err(|e| e.to_string())?;
        let mut total = 0.0;
        for d in 0..draws {
            let model = fit_independent(&real, budget, d).map_err(|e| e.to_string())?;
            total += (0..real.n_cols())
                .map(|c| model.cpt(c).row(0).probs().iter().zip(&exact[c]).map(|(a, b)| (a - b).abs()).sum::<f64>())
                .sum::<f64>();
        }
        means.push(total / draws as f64);
    }
    check(
        means[0] > means[1] && means[1] > means[2],
        format!("mean L1 error over {draws} draws: eps=1 {:.3e}, eps=5 {:.3e}, eps=10 {:.3e}", means[0], means[1], means[2]),
    )
}

fn random_distribution(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..k).map(|_| if rng.random_bool(0.1) { 0.0 } else { rng.random::<f64>() }).collect();
    if w.iter().all(|&x| x == 0.0) {
        w[0] = 1.0;
    }
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

/// Upper tail of the chi-square density by adaptive Simpson integration.
fn chi_square_tail_oracle(x: f64, dof: usize) -> f64 {
    let k = dof as f64 / 2.0;
    let ln_norm = -(k * 2f64.ln() + statrs::function::gamma::ln_gamma(k));
    let f = |t: f64| if t <= 0.0 { 0.0 } else { (ln_norm + (k - 1.0) * t.ln() - t / 2.0).exp() };
    // (a, b, f(a), f(mid), f(b)) per panel
    fn simpson(f: &dyn Fn(f64) -> f64, p: [f64; 5], whole: f64, tol: f64, depth: u32) -> f64 {
        let [a, b, fa, fm, fb] = p;
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        simpson(f, [a, m, fa, flm, fm], left, tol / 2.0, depth - 1)
            + simpson(f, [m, b, fm, frm, fb], right, tol / 2.0, depth - 1)
    }
    let mut total = 0.0;
    let mut a = x;
    let step = 4.0 + dof as f64;
    while a < x + 400.0 + 10.0 * dof as f64 {
        let b = a + step;
        let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
        total += simpson(&f, [a, b, fa, fm, fb], (b - a) / 6.0 * (fa + 4.0 * fm + fb), 1e-13, 40);
        a = b;
    }
    total
}

fn c8_metric_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut e_tvd, mut e_kl, mut e_h, mut e_mi) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let pairs = 1_000;
    for _ in 0..pairs {
        let k = rng.random_range(2..=12);
        let r = random_distribution(&mut rng, k);
        let s = random_distribution(&mut rng, k);
        let (dr, ds) = (Distribution::new(r.clone()).unwrap(), Distribution::new(s.clone()).unwrap());

        let mut l1 = 0.0;
        for i in 0..k {
            l1 += (r[i] - s[i]).abs();
        }
        e_tvd = e_tvd.max((column_tvd(&dr, &ds).unwrap() - (1.0 - l1 / 2.0)).abs());

        let delta = DEFAULT_KL_SMOOTHING;
        let z: f64 = s.iter().map(|q| q + delta).sum();
        let mut kl = 0.0;
        for i in 0..k {
            if r[i] > 0.0 {
                kl += r[i] * r[i].ln() - r[i] * ((s[i] + delta) / z).ln();
            }
        }
        e_kl = e_kl.max((column_kl(&dr, &ds, delta).unwrap() - kl).abs());

        let mut h = 0.0;
        for &p in &r {
            if p > 0.0 {
                h -= p * p.ln();
            }
        }
        e_h = e_h.max((node_entropy(&dr) - h / 2f64.ln()).abs());

        let (nx, ny) = (rng.random_range(2..=6), rng.random_range(2..=6));
        let joint = random_distribution(&mut rng, nx * ny);
        let ent = |p: &[f64]| -> f64 { p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.log2()).sum() };
        let px: Vec<f64> = (0..nx).map(|x| (0..ny).map(|y| joint[x * ny + y]).sum()).collect();
        let py: Vec<f64> = (0..ny).map(|y| (0..nx).map(|x| joint[x * ny + y]).sum()).collect();
        let mi = ent(&px) + ent(&py) - ent(&joint);
        e_mi = e_mi.max((pair_mutual_information(&joint, nx, ny).unwrap() - mi.max(0.0)).abs());
    }

    // p-values through the public chi-square test: expected counts equal to
    // the real counts, so the statistic is the plain Pearson sum.
    let mut e_p = 0.0f64;
    let mut tests = 0;
    for dof in [1usize, 2, 3, 5, 9] {
        for _ in 0..12 {
            let real: Vec<u64> = (0..=dof).map(|_| rng.random_range(200..2_000)).collect();
            let synth: Vec<u64> = real.iter().map(|&c| (c as i64 + rng.random_range(-60i64..=60)) as u64).collect();
            let (rt, st) = (real.iter().sum::<u64>() as f64, synth.iter().sum::<u64>() as f64);
            let stat: f64 = real
                .iter()
                .zip(&synth)
                .map(|(&r, &s)| {
                    let e = r as f64 / rt * st;
                    (s as f64 - e).powi(2) / e
                })
                .sum();
            let t = column_chi_square(&real, &synth, VariableKind::Nominal).unwrap();
            if t.degrees_of_freedom != dof || (t.statistic - stat).abs() > 1e-9 * stat.max(1.0) {
                return Err(format!("chi-square statistic mismatch at dof {dof}"));
            }
            e_p = e_p.max((t.p_value - chi_square_tail_oracle(stat, dof)).abs());
            tests += 1;
        }
    }
    let boundary = catsynth::special::chi_square_sf(3.8415, 1);
    e_p = e_p.max((boundary - chi_square_tail_oracle(3.8415, 1)).abs());
    check(
        e_tvd <= 1e-12 && e_kl <= 1e-12 && e_h <= 1e-12 && e_mi <= 1e-12 && e_p <= 1e-6 && (boundary - 0.05).abs() < 1e-4,
        format!(
            "{pairs} pairs: TVD {e_tvd:.1e}, KL {e_kl:.1e}, H {e_h:.1e}, MI {e_mi:.1e}; {tests} chi-square p-values max error {e_p:.1e}; p(3.8415, 1) = {boundary:.6}"
        ),
    )
}

fn c9_copula() -> Outcome {
    let (_, real) = make_fixture(SEEDS[0], SURVEY_ROWS).map_err(|e| e.to_string())?;
    let model = fit_copula(&real).map_err(|e| e.to_string())?;
    let n = 100_000;
    let synth = sample_copula(&model, n, 9).map_err(|e| e.to_string())?;
    let mut worst_z = 0.0f64;
    for c in 0..real.n_cols() {
        let fitted = real.column_counts(c);
        let got = synth.column_counts(c);
        for (&f, &g) in fitted.iter().zip(&got) {
            let p = f as f64 / real.n_rows() as f64;
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            if sigma > 0.0 {
                worst_z = worst_z.max((g as f64 / n as f64 - p).abs() / sigma);
            }
        }
    }

    // Duplicated column.
    let dup_schema = Arc::new(
        catsynth::CategoricalSchema::new(vec![
            real.schema().variable(AGE).clone(),
            catsynth::VariableSpec { name: "AgeCopy".into(), ..real.schema().variable(AGE).clone() },
        ])
        .unwrap(),
    );
    let dup = DataTable::new(dup_schema, real.column(AGE).map(|v| vec![v, v]).collect()).unwrap();
    let dup_model = fit_copula(&dup).map_err(|e| e.to_string())?;
    let rho_dup = dup_model.correlation().get(0, 1);
    let dup_synth = sample_copula(&dup_model, n, 10).map_err(|e| e.to_string())?;
    let identical = dup_synth.rows().all(|r| r[0] == r[1]);

    // Independent columns.
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let ind_schema = Arc::new(labelled_schema(&[3, 4]));
    let rows: Vec<Vec<usize>> = (0..n).map(|_| vec![rng.random_range(0..3), rng.random_range(0..4)]).collect();
    let ind = DataTable::new(ind_schema, rows).unwrap();
    let rho_ind = fit_copula(&ind).map_err(|e| e.to_string())?.correlation().get(0, 1);

    check(
        worst_z <= 3.0 && (rho_dup - 1.0).abs() < 1e-9 && identical && rho_ind.abs() <= 0.02,
        format!(
            "worst marginal deviation {worst_z:.2} sigma; duplicate rho {rho_dup:.12}, identical samples {identical}; independent rho {rho_ind:.4}"
        ),
    )
}

fn c10_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (_, real) = make_fixture(SEEDS[0], 5_000).map_err(|e| e.to_string())?;
    export_csv(&real, &dir.path().join("real.csv")).map_err(|e| e.to_string())?;
    std::fs::write(dir.path().join("dag.json"), serde_json::to_string(&fixture_dag()).unwrap()).unwrap();
    let spec = |m: &str| MethodSpec::named(m);
    let mut ind = spec("independent");
    ind.epsilon = Some(catsynth::pipeline::EpsilonSetting::Value(10.0));
    let mut cor = spec("correlated");
    cor.max_parents = Some(2);
    cor.epsilon = Some(catsynth::pipeline::EpsilonSetting::Value(5.0));
    let config = |out: &str| PipelineConfig {
        dataset: dir.path().join("real.csv"),
        schema: None,
        expert_dag: Some(dir.path().join("dag.json")),
        methods: vec![spec("bn"), ind.clone(), cor.clone(), spec("copula")],
        n_rows: None,
        seed: 2024,
        output_dir: dir.path().join(out),
        edges: None,
        gate_alpha: DEFAULT_GATE_ALPHA,
        kl_smoothing: DEFAULT_KL_SMOOTHING,
    };
    let a = run_pipeline(&config("seq"), Execution::Sequential).map_err(|e| e.to_string())?;
    let b = run_pipeline(&config("par"), Execution::Parallel).map_err(|e| e.to_string())?;
    let c = run_pipeline(&config("par2"), Execution::Parallel).map_err(|e| e.to_string())?;
    let mut compared = 0;
    let mut differing = Vec::new();
    for art in &a.manifest.artifacts {
        let read = |d: &str| std::fs::read(dir.path().join(d).join(art)).ok();
        let x = read("seq");
        if x.is_none() || x != read("par") || x != read("par2") {
            differing.push(art.clone());
        }
        compared += 1;
    }
    let same_lists = a.manifest.artifacts == b.manifest.artifacts && b.manifest.artifacts == c.manifest.artifacts;
    check(
        differing.is_empty() && same_lists && compared > 0,
        format!("{compared} artifacts byte-identical across sequential and parallel runs; differing: {differing:?}"),
    )
}

fn c11_scenarios() -> Outcome {
    let model = fixture_model();
    let joint = brute_joint(&model);
    let ev = [(DISABILITY, DEVELOPMENTAL)];
    let mut worst = 0.0f64;
    let mut shift = |target: usize| -> Result<(Vec<f64>, Vec<f64>), String> {
        let q = Query::new(target, Evidence::new(model.schema(), &ev).unwrap(), Direction::Diagnostic).unwrap();
        let r = evidence_shift_report(&model, &q).map_err(|e| e.to_string())?;
        let want_post = brute_posterior(&model, &joint, target, &ev).unwrap();
        let want_prior = brute_posterior(&model, &joint, target, &[]).unwrap();
        for i in 0..want_post.len() {
            let want_delta = want_post[i] - want_prior[i];
            worst = worst.max((r.delta[i] - want_delta).abs()).max((r.posterior.probs()[i] - want_post[i]).abs());
        }
        Ok((r.prior.probs().to_vec(), r.posterior.probs().to_vec()))
    };
    let (age_prior, age_post) = shift(AGE)?;
    let age_delta = age_post[AGE_65_PLUS] - age_prior[AGE_65_PLUS];
    let (fam_prior, fam_post) = shift(INTERACTION_FAMILY)?;
    let often_always = |p: &[f64]| p[3] + p[4];
    let fam_delta = often_always(&fam_post) - often_always(&fam_prior);
    check(
        age_delta > 0.0 && fam_delta > 0.0 && worst <= 1e-10,
        format!(
            "P(65+) {:.4} -> {:.4}; P(Often or Always) {:.4} -> {:.4}; max deviation from enumeration {worst:.1e}",
            age_prior[AGE_65_PLUS],
            age_post[AGE_65_PLUS],
            often_always(&fam_prior),
            often_always(&fam_post)
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 11] = [
        ("exact inference equals enumeration", c1_inference_matches_enumeration),
        ("joint probability normalizes", c2_joint_normalizes),
        ("bn round-trip fidelity", c3_bn_round_trip),
        ("ranking places bn first", c4_ranking),
        ("entropy and MI preserved", c5_entropy_and_mi),
        ("independent mode destroys dependence", c6_independent_destroys_dependence),
        ("privacy knob is monotone", c7_privacy_monotone),
        ("metric formula oracles", c8_metric_oracles),
        ("copula behavior", c9_copula),
        ("pipeline determinism", c10_determinism),
        ("inference scenarios", c11_scenarios),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
