//! Acceptance suite: one test per criterion, each printing a single
//! `PASS`/`FAIL criterion N: ...` line before asserting.
//!
//! Run with `cargo test -p dynreg --test acceptance -- --nocapture` to see the
//! lines. The tests share a lock so the wall-clock comparison in criterion 1
//! is not distorted by concurrent work.

mod common;

use std::sync::{Mutex, MutexGuard};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use common::{clamp_box, dist, norm_sq, project_ball, softmax_weights, QuadStream};
use dynreg::bandit::{estimate_gradient, finite_difference, BanditOptions, OptimismMode, SwordBandit};
use dynreg::envs::{Environment, PiecewiseRegression, PiecewiseRegressionSpec, QuadraticInstance, StationaryQuadratic};
use dynreg::experiment::{run_experiment, ExperimentConfig};
use dynreg::learners::{
    Ader, Oegd, Ogd, OnlineLearner, Problem, RoundOutcome, StepSizePool, Sword, SwordPlusPlus, SwordPlusPlusOptions,
};
use dynreg::metrics::{gradient_variation, ComparatorKind, VariationMethod};
use dynreg::omd::{hedge_closed_form, mirror_step, OmdState, OptimisticHedge, Regularizer};
use dynreg::oracle::{Objective, QueryCounter, SeparableQuadratic, SquaredResidual};
use dynreg::{DecisionVector, FeasibleDomain, SmoothConvexOracle};

/// A test-local closed form: value and gradient at a point.
type HandOracle = Box<dyn Fn(&[f64]) -> (f64, Vec<f64>)>;
/// A test-local Euclidean projection.
type HandProjection = Box<dyn Fn(&[f64]) -> Vec<f64>>;

static LOCK: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn verdict(criterion: u32, pass: bool, detail: String) {
    println!("{} criterion {criterion}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {criterion} failed: {detail}");
}

/// Plays every round, all oracles counting into one shared counter.
fn play(learner: &mut dyn OnlineLearner, env: &dyn Environment, counter: &QueryCounter) -> Vec<RoundOutcome> {
    (1..=env.horizon())
        .map(|t| {
            let oracle = env.next_round(t).unwrap().with_counter(counter);
            learner.round(&oracle).unwrap()
        })
        .collect()
}

fn total_loss(outcomes: &[RoundOutcome]) -> f64 {
    outcomes.iter().map(|o| o.loss).sum()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gauss<R: Rng>(r: &mut R) -> f64 {
    StandardNormal.sample(r)
}

/// `Σ_t ½(a_t u_t − b_t)²` with `u_t` the clipped scalar minimiser.
fn scalar_minimizer_loss(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| 0.5 * (a * (b / a).clamp(-1.0, 1.0) - b).powi(2)).sum()
}

/// `Σ_{t≥2} (|Δa²| + |Δ(ab)|)²`, the scalar gradient variation on `[−1, 1]`.
fn scalar_gradient_variation(a: &[f64], b: &[f64]) -> f64 {
    (1..a.len())
        .map(|t| {
            let da2 = a[t] * a[t] - a[t - 1] * a[t - 1];
            let dab = a[t] * b[t] - a[t - 1] * b[t - 1];
            (da2.abs() + dab.abs()).powi(2)
        })
        .sum()
}

fn scalar_regret<L: OnlineLearner>(make: impl Fn(&Problem) -> L, inst: &QuadraticInstance) -> f64 {
    let problem = inst.problem().unwrap();
    let mut learner = make(&problem);
    let outcomes = play(&mut learner, inst, &QueryCounter::new());
    total_loss(&outcomes) - scalar_minimizer_loss(inst.a(), inst.b())
}

#[test]
fn criterion_1_piecewise_regression_ordering() {
    let _guard = serial();
    let config = ExperimentConfig::from_toml(
        r#"
horizon = 50000
seeds = [1, 2, 3, 4, 5]
algorithms = ["ogd", "ader", "sword", "swordpp"]
variation_samples = 0
jobs = 1

[environment]
kind = "piecewise"
dim = 5
stage_length = 1000
feature_radius = 1.0
diameter = 2.0
"#,
    )
    .unwrap();
    let records = run_experiment(&config).unwrap();
    let stats = |alg: &str| {
        let losses: Vec<f64> =
            records.iter().filter(|r| r.algorithm == alg).map(|r| r.report.final_loss()).collect();
        let secs: f64 = records.iter().filter(|r| r.algorithm == alg).map(|r| r.report.wall_clock_seconds).sum();
        assert_eq!(losses.len(), 5);
        let se = common::sample_std(&losses) / (losses.len() as f64).sqrt();
        (common::mean(&losses), se, secs)
    };
    let (ogd, ogd_se, _) = stats("ogd");
    let (ader, ader_se, _) = stats("ader");
    let (sword, sword_se, sword_time) = stats("sword");
    let (swordpp, swordpp_se, swordpp_time) = stats("swordpp");

    let ogd_vs_ader = ogd - ader >= 2.0 * ogd_se.hypot(ader_se);
    let ader_vs_sword = ader >= sword;
    let ader_vs_swordpp = ader - swordpp >= 2.0 * ader_se.hypot(swordpp_se);
    let time_ratio = sword_time / swordpp_time;
    let pass = ogd_vs_ader && ader_vs_sword && ader_vs_swordpp && time_ratio >= 3.0;
    verdict(
        1,
        pass,
        format!(
            "mean final loss ogd {ogd:.1}±{ogd_se:.1}, ader {ader:.1}±{ader_se:.1}, sword {sword:.1}±{sword_se:.1}, \
             swordpp {swordpp:.1}±{swordpp_se:.1} (sword/swordpp loss {:.3}); ogd>ader {ogd_vs_ader}, \
             ader>=sword {ader_vs_sword}, ader>swordpp by 2se {ader_vs_swordpp}; wall-clock sword/swordpp \
             {time_ratio:.2} (need >= 3)",
            sword / swordpp
        ),
    );
}

#[test]
fn criterion_2_gradient_query_budgets() {
    let _guard = serial();
    let piecewise = PiecewiseRegression::new(
        PiecewiseRegressionSpec { horizon: 3000, ..PiecewiseRegressionSpec::default() },
        7,
    )
    .unwrap();
    let instance = QuadraticInstance::instance1(501).unwrap();
    let envs: [&dyn Environment; 2] = [&piecewise, &instance];
    let mut lines = Vec::new();
    let mut pass = true;
    for env in envs {
        let problem = env.problem().unwrap();
        let t = env.horizon() as u64;
        let eta = 1.0 / (4.0 * problem.smoothness);
        let sword = Sword::new(&problem).unwrap();
        let n = sword.pool_size() as u64;
        let cases: Vec<(Box<dyn OnlineLearner>, u64)> = vec![
            (Box::new(Ogd::new(&problem).unwrap()), t),
            (Box::new(Oegd::new(&problem, eta).unwrap()), t),
            (Box::new(Ader::new(&problem).unwrap()), t),
            (Box::new(SwordPlusPlus::new(&problem).unwrap()), t),
            (Box::new(sword), (n + 1) * t),
        ];
        for (mut learner, expected) in cases {
            let counter = QueryCounter::new();
            play(learner.as_mut(), env, &counter);
            let got = counter.gradient_queries();
            let ok = got == expected;
            pass &= ok;
            lines.push(format!("{}/{}: {got} (expected {expected}){}", env.name(), learner.name(), if ok { "" } else { " MISMATCH" }));
        }
    }
    verdict(2, pass, lines.join("; "));
}

#[test]
fn criterion_3_instance1_bounded_regret() {
    let _guard = serial();
    let mut swordpp = Vec::new();
    let mut ogd = Vec::new();
    let mut variation_ok = true;
    let mut variation_detail = Vec::new();
    for t in [501, 1001, 2001] {
        let inst = QuadraticInstance::instance1(t).unwrap();
        let hand = scalar_gradient_variation(inst.a(), inst.b());
        let lib = gradient_variation(inst.functions(), inst.domain(), VariationMethod::AnalyticQuadratic).unwrap();
        let ok = (lib - hand).abs() <= 1e-12 * hand.max(1e-300) && hand <= 4.0 / t as f64;
        variation_ok &= ok;
        variation_detail.push(format!("V_{t} = {hand:.3e} (4/T = {:.3e})", 4.0 / t as f64));
        swordpp.push(scalar_regret(|p| SwordPlusPlus::new(p).unwrap(), &inst));
        ogd.push(scalar_regret(|p| Ogd::new(p).unwrap(), &inst));
    }
    let swordpp_ratio = swordpp[2] / swordpp[0];
    let ogd_ratio = ogd[2] / ogd[0];
    let pass = swordpp_ratio <= 1.25 && ogd_ratio > 1.8 && variation_ok;
    verdict(
        3,
        pass,
        format!(
            "swordpp regret {:.4}/{:.4}/{:.4} ratio {swordpp_ratio:.3} (<= 1.25); ogd regret {:.4}/{:.4}/{:.4} \
             ratio {ogd_ratio:.3} (> 1.8); {}",
            swordpp[0], swordpp[1], swordpp[2], ogd[0], ogd[1], ogd[2],
            variation_detail.join(", ")
        ),
    );
}

#[test]
fn criterion_4_instance2_zero_comparator_loss() {
    let _guard = serial();
    let mut small_loss_ok = true;
    for t in (2..=400).step_by(2).chain([500, 1000, 2000]) {
        let inst = QuadraticInstance::instance2(t).unwrap();
        let comparators = inst.comparators(ComparatorKind::Minimizers).unwrap();
        let lib: f64 = inst.functions().iter().zip(comparators.points()).map(|(f, u)| f.value(u)).sum();
        let hand = scalar_minimizer_loss(inst.a(), inst.b());
        small_loss_ok &= lib == 0.0 && hand == 0.0;
    }
    let r500 = scalar_regret(|p| SwordPlusPlus::new(p).unwrap(), &QuadraticInstance::instance2(500).unwrap());
    let r2000 = scalar_regret(|p| SwordPlusPlus::new(p).unwrap(), &QuadraticInstance::instance2(2000).unwrap());
    let ratio = r2000 / r500;
    verdict(
        4,
        small_loss_ok && ratio <= 1.25,
        format!("F_T == 0 at every even T checked: {small_loss_ok}; swordpp regret(500) {r500:.4}, regret(2000) {r2000:.4}, ratio {ratio:.3} (<= 1.25)"),
    )
}

#[test]
fn criterion_5_oegd_dynamic_regret_certificate() {
    let _guard = serial();
    let horizon = 200;
    let mut worst = f64::INFINITY;
    let mut checks = 0usize;
    for k in 0..100u64 {
        let mut r = rng(500 + k);
        let dim = r.gen_range(1..=3);
        let stream = QuadStream::random(&mut r, dim, horizon, 0.05);
        let g = stream.box_gradient_bound(1.0);
        let l = stream.smoothness();
        let d = 2.0 * (dim as f64).sqrt();
        let v = stream.box_gradient_variation(1.0);
        let domain = FeasibleDomain::cube(dim, -1.0, 1.0).unwrap();
        let lib_v = gradient_variation(&stream.functions(), &domain, VariationMethod::AnalyticQuadratic).unwrap();
        assert!((lib_v - v).abs() <= 1e-9 * (1.0 + v), "variation mismatch {lib_v} vs {v}");
        let env = stream.env(domain, g);
        let problem = Problem::new(env.domain().clone(), g, l, horizon).unwrap();
        let minimizers: Vec<Vec<f64>> = (0..horizon)
            .map(|t| (0..dim).map(|j| (stream.b[t][j] / stream.a[t][j]).clamp(-1.0, 1.0)).collect())
            .collect();
        for &eta in StepSizePool::sword(g, d, l, horizon).unwrap().etas() {
            let mut learner = Oegd::new(&problem, eta).unwrap();
            let outcomes = play(&mut learner, &env, &QueryCounter::new());
            let learner_loss: f64 = outcomes.iter().enumerate().map(|(t, o)| stream.value(t, o.decision.as_slice())).sum();
            for c in 0..50 {
                let spread = [0.0, 0.02, 0.2, 1.0][c % 4];
                let comparators: Vec<Vec<f64>> = minimizers
                    .iter()
                    .map(|u| clamp_box(&u.iter().map(|x| x + spread * gauss(&mut r)).collect::<Vec<_>>(), -1.0, 1.0))
                    .collect();
                let path: f64 = comparators.windows(2).map(|w| dist(&w[0], &w[1])).sum();
                let comparator_loss: f64 = comparators.iter().enumerate().map(|(t, u)| stream.value(t, u)).sum();
                let regret = learner_loss - comparator_loss;
                let bound = eta * (g * g + 2.0 * v) + (d * d + 2.0 * d * path) / (2.0 * eta);
                worst = worst.min(bound - regret);
                checks += 1;
            }
        }
    }
    verdict(5, worst >= -1e-6, format!("{checks} (sequence, step, comparator) cases, minimum slack {worst:.4e} (>= -1e-6)"));
}

#[test]
fn criterion_6_optimistic_hedge_certificate() {
    let _guard = serial();
    let (n, horizon) = (8usize, 500usize);
    let mut worst = f64::INFINITY;
    let mut closed_form_gap = 0.0f64;
    for k in 0..100u64 {
        let mut r = rng(600 + k);
        let rate = r.gen_range(0.05..2.0);
        let noise = [0.0, 0.1, 0.5, 1.0][k as usize % 4];
        let losses: Vec<Vec<f64>> = (0..horizon).map(|_| (0..n).map(|_| r.gen_range(0.0..1.0)).collect()).collect();
        let optimism: Vec<Vec<f64>> = (0..horizon)
            .map(|t| {
                (0..n)
                    .map(|i| if t == 0 { 0.0 } else { losses[t - 1][i] + noise * r.gen_range(-1.0..1.0) })
                    .collect()
            })
            .collect();
        let mut hedge = OptimisticHedge::new(n, rate).unwrap();
        let mut cumulative = vec![0.0; n];
        let mut learner_loss = 0.0;
        let mut deviation = 0.0;
        let mut movement = 0.0;
        let mut previous: Option<Vec<f64>> = None;
        for t in 0..horizon {
            let p = hedge.weights(&optimism[t]).unwrap();
            let hand = softmax_weights(&cumulative, &optimism[t], rate);
            closed_form_gap = closed_form_gap.max(p.iter().zip(&hand).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
            learner_loss += p.iter().zip(&losses[t]).map(|(p, l)| p * l).sum::<f64>();
            deviation += losses[t].iter().zip(&optimism[t]).map(|(l, m)| (l - m).abs()).fold(0.0, f64::max).powi(2);
            if let Some(q) = &previous {
                movement += p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>().powi(2);
            }
            hedge.observe(&losses[t]).unwrap();
            cumulative.iter_mut().zip(&losses[t]).for_each(|(c, l)| *c += l);
            previous = Some(p);
        }
        let best = cumulative.iter().copied().fold(f64::INFINITY, f64::min);
        let bound = rate * deviation + (n as f64).ln() / rate - movement / (4.0 * rate);
        worst = worst.min(bound - (learner_loss - best));
    }
    let pass = worst >= -1e-9 && closed_form_gap <= 1e-12;
    verdict(6, pass, format!("100 streams, minimum slack {worst:.4e} (>= -1e-9); weights vs softmax max gap {closed_form_gap:.2e}"));
}

#[test]
fn criterion_7_mirror_step_stability() {
    let _guard = serial();
    let mut r = rng(7);
    let mut euclid_worst = f64::INFINITY;
    for k in 0..1000 {
        let dim = r.gen_range(1..=6);
        let domain = if k % 2 == 0 {
            let lo: Vec<f64> = (0..dim).map(|_| r.gen_range(-2.0..0.0)).collect();
            let hi: Vec<f64> = lo.iter().map(|l| l + r.gen_range(0.1..3.0)).collect();
            FeasibleDomain::bounded_box(DecisionVector::new(lo).unwrap(), DecisionVector::new(hi).unwrap()).unwrap()
        } else {
            let center: Vec<f64> = (0..dim).map(|_| gauss(&mut r)).collect();
            FeasibleDomain::ball(DecisionVector::new(center).unwrap(), r.gen_range(0.1..3.0)).unwrap()
        };
        let scale = [0.1, 1.0, 10.0][k % 3];
        let c = domain.project(&(0..dim).map(|_| 2.0 * gauss(&mut r)).collect::<Vec<_>>()).unwrap();
        let a: Vec<f64> = (0..dim).map(|_| scale * gauss(&mut r)).collect();
        let a2: Vec<f64> = (0..dim).map(|_| scale * gauss(&mut r)).collect();
        let x = mirror_step(Regularizer::Euclidean, &domain, c.as_slice(), &a).unwrap();
        let x2 = mirror_step(Regularizer::Euclidean, &domain, c.as_slice(), &a2).unwrap();
        euclid_worst = euclid_worst.min(dist(&a, &a2) - dist(x.as_slice(), x2.as_slice()));
    }
    let mut entropy_worst = f64::INFINITY;
    for k in 0..1000 {
        let n = r.gen_range(2..=16);
        let domain = FeasibleDomain::simplex(n).unwrap();
        let raw: Vec<f64> = (0..n).map(|_| r.gen_range(0.01..1.0)).collect();
        let s: f64 = raw.iter().sum();
        let c: Vec<f64> = raw.iter().map(|v| v / s).collect();
        let scale = [0.1, 1.0, 5.0][k % 3];
        let a: Vec<f64> = (0..n).map(|_| scale * gauss(&mut r)).collect();
        let a2: Vec<f64> = (0..n).map(|_| scale * gauss(&mut r)).collect();
        let x = mirror_step(Regularizer::NegativeEntropy, &domain, &c, &a).unwrap();
        let x2 = mirror_step(Regularizer::NegativeEntropy, &domain, &c, &a2).unwrap();
        let l1: f64 = x.as_slice().iter().zip(x2.as_slice()).map(|(p, q)| (p - q).abs()).sum();
        let linf = a.iter().zip(&a2).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        entropy_worst = entropy_worst.min(linf - l1);
    }
    let pass = euclid_worst >= -1e-9 && entropy_worst >= -1e-9;
    verdict(
        7,
        pass,
        format!("minimum slack euclidean {euclid_worst:.4e}, entropy on simplex {entropy_worst:.4e} (>= -1e-9), 1000 instances each"),
    );
}

#[test]
fn criterion_8_self_bounding_gradients() {
    let _guard = serial();
    let mut r = rng(8);
    let mut worst = f64::INFINITY;
    for k in 0..500 {
        let dim = r.gen_range(1..=6);
        let (f, l, hand): (Box<dyn Objective>, f64, HandOracle) = if k % 2 == 0 {
            let a: Vec<f64> = (0..dim).map(|_| r.gen_range(-2.0..2.0)).collect();
            let b: Vec<f64> = (0..dim).map(|_| r.gen_range(-2.0..2.0)).collect();
            let offset = r.gen_range(0.0..0.5);
            let l = a.iter().map(|a| a * a).fold(0.0, f64::max);
            let (ha, hb) = (a.clone(), b.clone());
            let hand = move |x: &[f64]| {
                let v = (0..x.len()).map(|j| 0.5 * (ha[j] * x[j] - hb[j]).powi(2)).sum::<f64>() + offset;
                let g = (0..x.len()).map(|j| ha[j] * (ha[j] * x[j] - hb[j])).collect();
                (v, g)
            };
            (Box::new(SeparableQuadratic::new(a, b, offset).unwrap()), l, Box::new(hand))
        } else {
            let w: Vec<f64> = (0..dim).map(|_| gauss(&mut r)).collect();
            let y = 2.0 * gauss(&mut r);
            let l = norm_sq(&w);
            let hw = w.clone();
            let hand = move |x: &[f64]| {
                let res = hw.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - y;
                (0.5 * res * res, hw.iter().map(|a| a * res).collect())
            };
            (Box::new(SquaredResidual::new(w, y).unwrap()), l, Box::new(hand))
        };
        for _ in 0..10 {
            let x: Vec<f64> = (0..dim).map(|_| 3.0 * gauss(&mut r)).collect();
            let (v, g) = hand(&x);
            assert!((f.value(&x) - v).abs() <= 1e-12 * (1.0 + v.abs()));
            let lib_g = f.gradient(&x);
            assert!(dist(&lib_g, &g) <= 1e-12 * (1.0 + norm_sq(&g).sqrt()));
            worst = worst.min(4.0 * l * f.value(&x) + 1e-9 - norm_sq(&lib_g));
        }
    }
    verdict(8, worst >= 0.0, format!("500 nonnegative quadratics x 10 points, minimum of 4Lf + 1e-9 - |grad|^2 = {worst:.4e}"));
}

/// Random stream on `[−1, 1]^d` for the bandit checks, with its problem.
fn bandit_setup(seed: u64, horizon: usize) -> (QuadStream, dynreg::envs::SequenceEnv, Problem) {
    let mut r = rng(seed);
    let dim = r.gen_range(1..=4);
    let stream = QuadStream::random(&mut r, dim, horizon, 0.05);
    let g = stream.box_gradient_bound(1.0);
    let env = stream.env(FeasibleDomain::cube(dim, -1.0, 1.0).unwrap(), g);
    let problem = env.problem().unwrap();
    (stream, env, problem)
}

#[test]
fn criterion_9_bandit_estimator() {
    let _guard = serial();
    let mut r = rng(9);
    let mut unbiased_gap = 0.0f64;
    for _ in 0..200 {
        let d = r.gen_range(1..=6);
        let b_mat: Vec<Vec<f64>> = (0..d).map(|_| (0..d).map(|_| gauss(&mut r)).collect()).collect();
        let a_mat: Vec<Vec<f64>> =
            (0..d).map(|i| (0..d).map(|j| (0..d).map(|k| b_mat[k][i] * b_mat[k][j]).sum()).collect()).collect();
        let lin: Vec<f64> = (0..d).map(|_| gauss(&mut r)).collect();
        let f = |x: &[f64]| {
            let quad: f64 = (0..d).map(|i| (0..d).map(|j| x[i] * a_mat[i][j] * x[j]).sum::<f64>()).sum();
            0.5 * quad - lin.iter().zip(x).map(|(b, x)| b * x).sum::<f64>()
        };
        let y: Vec<f64> = (0..d).map(|_| gauss(&mut r)).collect();
        let m: Vec<f64> = (0..d).map(|_| gauss(&mut r)).collect();
        let delta = r.gen_range(0.01..0.5);
        let mut average = vec![0.0; d];
        for i in 0..d {
            let (mut plus, mut minus) = (y.clone(), y.clone());
            plus[i] += delta;
            minus[i] -= delta;
            let v = finite_difference(f(&plus), f(&minus), delta).unwrap();
            let (estimate, _) = estimate_gradient(v, i, &m).unwrap();
            average.iter_mut().zip(estimate.as_slice()).for_each(|(s, e)| *s += e / d as f64);
        }
        let grad: Vec<f64> = (0..d).map(|i| (0..d).map(|j| a_mat[i][j] * y[j]).sum::<f64>() - lin[i]).collect();
        unbiased_gap = unbiased_gap.max(average.iter().zip(&grad).map(|(a, g)| (a - g).abs()).fold(0.0, f64::max));
    }

    let horizon = 300;
    let mut best_worst = f64::INFINITY;
    for k in 0..50u64 {
        let (stream, env, problem) = bandit_setup(900 + k, horizon);
        let d = stream.dim() as f64;
        let mut learner = SwordBandit::new(&problem, BanditOptions::with_mode(OptimismMode::Best), k).unwrap();
        learner.set_diagnostics(true);
        let outcomes = play(&mut learner, &env, &QueryCounter::new());
        let (mut best, mut var, mut zero) = (0.0, 0.0, 0.0);
        for o in &outcomes {
            let b = o.diagnostics.as_ref().unwrap().bandit.as_ref().unwrap();
            let g = b.estimator.as_slice();
            best += norm_sq(&g.iter().zip(b.optimism.as_slice()).map(|(a, m)| a - m).collect::<Vec<_>>());
            var += norm_sq(&g.iter().zip(b.variation_optimism.as_slice()).map(|(a, m)| a - m).collect::<Vec<_>>());
            zero += norm_sq(g);
        }
        let g = problem.gradient_bound;
        let bound = var.min(zero) + 4.0 * d * d * g * g * 2f64.ln() + 1e-6;
        best_worst = best_worst.min(bound - best);
    }

    let mut zero_worst = f64::INFINITY;
    for k in 0..50u64 {
        let (stream, env, problem) = bandit_setup(950 + k, horizon);
        let dim = stream.dim();
        let d = dim as f64;
        let l = problem.smoothness;
        let mut learner = SwordBandit::new(&problem, BanditOptions::with_mode(OptimismMode::Zero), k).unwrap();
        learner.set_diagnostics(true);
        let delta = learner.delta();
        let outcomes = play(&mut learner, &env, &QueryCounter::new());
        let (mut second_moment, mut base_loss) = (0.0, 0.0);
        for (t, o) in outcomes.iter().enumerate() {
            let b = o.diagnostics.as_ref().unwrap().bandit.as_ref().unwrap();
            let [p, q] = &b.committed;
            let y: Vec<f64> = p.as_slice().iter().zip(q.as_slice()).map(|(a, b)| 0.5 * (a + b)).collect();
            for i in 0..dim {
                let (mut plus, mut minus) = (y.clone(), y.clone());
                plus[i] += delta;
                minus[i] -= delta;
                let v = (stream.value(t, &plus) - stream.value(t, &minus)) / (2.0 * delta);
                second_moment += d * v * v;
            }
            base_loss += stream.value(t, &y);
        }
        let bound = 8.0 * d * l * base_loss + 2.0 * d * d * l * l * delta * delta * horizon as f64 + 1e-6;
        zero_worst = zero_worst.min(bound - second_moment);
    }

    let pass = unbiased_gap <= 1e-9 && best_worst >= 0.0 && zero_worst >= 0.0;
    verdict(
        9,
        pass,
        format!(
            "unbiasedness max error {unbiased_gap:.2e} (<= 1e-9) over 200 quadratics; best-optimism certificate \
             minimum slack {best_worst:.4e} over 50 runs; zero-optimism second-moment certificate minimum slack \
             {zero_worst:.4e} over 50 runs"
        ),
    );
}

#[test]
fn criterion_10_oracle_equivalences() {
    let _guard = serial();
    let mut r = rng(10);

    let mut entropy_gap = 0.0f64;
    for _ in 0..50 {
        let n = r.gen_range(2..=16);
        let horizon = r.gen_range(1..=200);
        let rate = r.gen_range(0.01..1.0);
        let domain = FeasibleDomain::simplex(n).unwrap();
        let mut state = OmdState::new(DecisionVector::new(vec![1.0 / n as f64; n]).unwrap(), rate).unwrap();
        let mut cumulative = vec![0.0; n];
        for _ in 0..horizon {
            let m: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
            let loss: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..1.0)).collect();
            let p = state.decide(&m, &domain, Regularizer::NegativeEntropy).unwrap();
            let hand = softmax_weights(&cumulative, &m, rate);
            let lib = hedge_closed_form(&cumulative, &m, rate, &vec![1.0 / n as f64; n]).unwrap();
            for ((a, b), c) in p.as_slice().iter().zip(&hand).zip(&lib) {
                entropy_gap = entropy_gap.max((a - b).abs()).max((c - b).abs());
            }
            state.update(&loss, &domain, Regularizer::NegativeEntropy).unwrap();
            cumulative.iter_mut().zip(&loss).for_each(|(c, l)| *c += l);
        }
    }

    let mut euclid_gap = 0.0f64;
    for k in 0..50 {
        let dim = r.gen_range(1..=5);
        let (domain, project): (FeasibleDomain, HandProjection) = if k % 2 == 0 {
            (FeasibleDomain::cube(dim, -1.0, 1.0).unwrap(), Box::new(|x| clamp_box(x, -1.0, 1.0)))
        } else {
            (FeasibleDomain::centered_ball(dim, 1.5).unwrap(), Box::new(|x| project_ball(x, 1.5)))
        };
        let eta = r.gen_range(0.01..1.0);
        let mut state = OmdState::new(DecisionVector::zeros(dim), eta).unwrap();
        let mut x_hat = vec![0.0; dim];
        for _ in 0..200 {
            let m: Vec<f64> = (0..dim).map(|_| 2.0 * gauss(&mut r)).collect();
            let g: Vec<f64> = (0..dim).map(|_| 2.0 * gauss(&mut r)).collect();
            let x = state.decide(&m, &domain, Regularizer::Euclidean).unwrap();
            let hand_x = project(&x_hat.iter().zip(&m).map(|(a, b)| a - eta * b).collect::<Vec<_>>());
            state.update(&g, &domain, Regularizer::Euclidean).unwrap();
            x_hat = project(&x_hat.iter().zip(&g).map(|(a, b)| a - eta * b).collect::<Vec<_>>());
            euclid_gap = euclid_gap.max(dist(x.as_slice(), &hand_x)).max(dist(state.x_hat().as_slice(), &x_hat));
        }
    }

    let mut trace_gap = 0.0f64;
    for k in 0..20u64 {
        let mut rr = rng(1000 + k);
        let dim = rr.gen_range(1..=4);
        let horizon = 200;
        let stream = QuadStream::random(&mut rr, dim, horizon, 0.1);
        let (domain, project): (FeasibleDomain, HandProjection) = if k % 2 == 0 {
            (FeasibleDomain::cube(dim, -1.0, 1.0).unwrap(), Box::new(|x| clamp_box(x, -1.0, 1.0)))
        } else {
            (FeasibleDomain::centered_ball(dim, 1.0).unwrap(), Box::new(|x| project_ball(x, 1.0)))
        };
        let g = stream.ball_gradient_bound(dim as f64);
        let env = stream.env(domain, g);
        let problem = env.problem().unwrap();
        let eta = rr.gen_range(0.05..1.0) / problem.smoothness;
        let options = SwordPlusPlusOptions { pool: Some(StepSizePool::single(eta).unwrap()), ..Default::default() };
        let mut swordpp = SwordPlusPlus::with_options(&problem, options).unwrap();
        let mut oegd = Oegd::new(&problem, eta).unwrap();
        let (mut x_hat, mut x) = (vec![0.0; dim], vec![0.0; dim]);
        for t in 1..=horizon {
            let oracle: SmoothConvexOracle = env.next_round(t).unwrap();
            let a = swordpp.round(&oracle).unwrap();
            let b = oegd.round(&oracle).unwrap();
            let grad = stream.gradient(t - 1, &x);
            trace_gap = trace_gap.max(dist(a.decision.as_slice(), &x)).max(dist(b.decision.as_slice(), &x));
            x_hat = project(&x_hat.iter().zip(&grad).map(|(p, q)| p - eta * q).collect::<Vec<_>>());
            x = project(&x_hat.iter().zip(&grad).map(|(p, q)| p - eta * q).collect::<Vec<_>>());
        }
    }

    let pass = entropy_gap <= 1e-10 && euclid_gap <= 1e-12 && trace_gap <= 1e-12;
    verdict(
        10,
        pass,
        format!(
            "entropy OMD vs softmax closed form {entropy_gap:.2e} (<= 1e-10); euclidean OMD vs projected steps \
             {euclid_gap:.2e} (<= 1e-12); single-base swordpp and oegd vs hand recursion {trace_gap:.2e} (<= 1e-12)"
        ),
    );
}

#[test]
fn criterion_11_bandit_stationary_regret_growth() {
    let _guard = serial();
    let center = vec![0.3, -0.2];
    let mut feasible = true;
    let mut mean_regret = |horizon: usize| {
        let env = StationaryQuadratic::new(center.clone(), 1.0, horizon).unwrap();
        let problem = env.problem().unwrap();
        let mut total = 0.0;
        for seed in 1..=20u64 {
            let mut learner = SwordBandit::new(&problem, BanditOptions::with_mode(OptimismMode::Zero), seed).unwrap();
            learner.set_diagnostics(true);
            let outcomes = play(&mut learner, &env, &QueryCounter::new());
            for o in &outcomes {
                let b = o.diagnostics.as_ref().unwrap().bandit.as_ref().unwrap();
                let mut observed = 0.0;
                for x in &b.committed {
                    feasible &= norm_sq(x.as_slice()) <= 1.0 && env.domain().contains(x.as_slice(), 0.0);
                    observed += 0.5 * norm_sq(&x.as_slice().iter().zip(&center).map(|(a, c)| a - c).collect::<Vec<_>>());
                }
                total += 0.5 * observed;
            }
        }
        total / 20.0
    };
    let r500 = mean_regret(500);
    let r2000 = mean_regret(2000);
    let ratio = r2000 / r500;
    verdict(
        11,
        ratio < 2.0 && feasible,
        format!("mean regret T=500 {r500:.4}, T=2000 {r2000:.4}, ratio {ratio:.3} (< 2); committed points feasible every round: {feasible}"),
    );
}
