//! The eleven acceptance criteria, one line each.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use ergodic_core::ergopt::{
    aubry_set, barrier_components, calibrated_subaction, ground_state, peierls_matrix, rate_function_cylinder,
    GroundState,
};
use ergodic_core::matrix::Matrix;
use ergodic_core::maxplus::{karp_max_cycle_mean, mp_eigen, mp_eigen_check, MaxPlusMatrix, MaxPlusScalar};
use ergodic_core::measures::{kl_nonneg, MarkovMeasure, ProbabilityVector, StochasticMatrix};
use ergodic_core::shift_space::{cylinder_refinement_children, enumerate_simple_cycles, Symbol, TransitionMatrix};
use ergodic_core::thermo::{
    free_energy, gibbs_cylinder_mass, perron_eigendata, pressure, thermo_state, PotentialMatrix,
};
use ergodic_core::zero_temp::{
    limit_selection_chapter7, log_mu_ratio_chapter7, rho_chapter7, two_state_closed_forms, Chapter7Params, LimitClass,
};
use ergodic_core::Word;
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn perron_correctness() -> Outcome {
    let mut rng = rng(1);
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let d = 1 + k % 6;
        let m = random_positive(&mut rng, d);
        let p = perron_eigendata(&m).map_err(|e| e.to_string())?;
        let (lam, r, l) = (p.lambda(), p.r(), p.l());
        let mr = m.mul_vec(&r);
        let lm = m.vec_mul(&l);
        let rmax = r.iter().cloned().fold(0.0, f64::max);
        let lmax = l.iter().cloned().fold(0.0, f64::max);
        for i in 0..d {
            worst = worst.max((mr[i] - lam * r[i]).abs() / (lam * rmax));
            worst = worst.max((lm[i] - lam * l[i]).abs() / (lam * lmax));
        }
    }
    ensure(worst <= 1e-10, || format!("eigen residual {worst:e}"))?;
    let mut worst_lambda: f64 = 0.0;
    for k in 0..200 {
        let d = 1 + k % 6;
        let rows = random_stochastic_rows(&mut rng, d);
        let p = perron_eigendata(&Matrix::from_rows(&rows).unwrap()).map_err(|e| e.to_string())?;
        worst_lambda = worst_lambda.max((p.lambda() - 1.0).abs());
    }
    ensure(worst_lambda <= 1e-10, || format!("stochastic |λ - 1| = {worst_lambda:e}"))?;
    Ok(format!("max residual {worst:.1e}, max |λ-1| {worst_lambda:.1e}"))
}

fn gibbs_is_markov() -> Outcome {
    let mut rng = rng(2);
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let d = 1 + k % 4;
        let a = random_potential(&mut rng, d);
        let beta = rng.random_range(0.1..10.0);
        let s = thermo_state(&a, beta).map_err(|e| e.to_string())?;
        let pi = s.pi().as_slice();
        let p = s.p_a();
        for n in 1..=6 {
            for w in Word::all_of_length(d, n) {
                let first = w.first().unwrap().zero_based();
                let markov = pi[first] * w.transitions().map(|(i, j)| p.get(i, j)).product::<f64>();
                let gibbs = gibbs_cylinder_mass(&s, &a, &w).map_err(|e| e.to_string())?;
                worst = worst.max(rel(gibbs, markov));
            }
        }
    }
    ensure(worst <= 1e-12, || format!("relative error {worst:e}"))?;
    Ok(format!("max relative error {worst:.1e}"))
}

fn variational_principle() -> Outcome {
    let mut rng = rng(3);
    let mut worst_eq: f64 = 0.0;
    let mut worst_gap = f64::NEG_INFINITY;
    for k in 0..100 {
        let d = 2 + k % 4;
        let a = random_potential(&mut rng, d);
        let beta = rng.random_range(0.1..10.0);
        let s = thermo_state(&a, beta).map_err(|e| e.to_string())?;
        let fe = free_energy(s.equilibrium(), &a, beta).map_err(|e| e.to_string())?;
        worst_eq = worst_eq.max((fe - s.pressure()).abs());
        let q = StochasticMatrix::from_rows(&random_stochastic_rows(&mut rng, d)).unwrap();
        let other = MarkovMeasure::from_matrix(q).map_err(|e| e.to_string())?;
        let fo = free_energy(&other, &a, beta).map_err(|e| e.to_string())?;
        worst_gap = worst_gap.max(fo - s.pressure());
    }
    ensure(worst_eq <= 1e-9, || format!("|F(μ_eq) - P| = {worst_eq:e}"))?;
    ensure(worst_gap <= 1e-10, || format!("F(μ) - P = {worst_gap:e}"))?;
    Ok(format!("|F(eq) - P| {worst_eq:.1e}, max F(μ) - P {worst_gap:.3}"))
}

fn maxplus_eigenvalue() -> Outcome {
    let mut rng = rng(4);
    let mut worst: f64 = 0.0;
    for k in 0..500 {
        let d = 1 + k % 8;
        let m = MaxPlusMatrix::from_f64_rows(
            &(0..d).map(|_| (0..d).map(|_| rng.random_range(-5.0..5.0)).collect::<Vec<f64>>()).collect::<Vec<_>>(),
        )
        .unwrap();
        let e = mp_eigen(&m).map_err(|e| e.to_string())?;
        let karp = karp_max_cycle_mean(&m).unwrap();
        worst = worst.max((e.lambda - karp).abs());
        let check = mp_eigen_check(&m, e.lambda, &e.v, 1e-9).map_err(|e| e.to_string())?;
        ensure(check.holds, || format!("eigenvector check failed, residual {:e}", check.residual))?;
    }
    ensure(worst <= 1e-9, || format!("|λ - karp| = {worst:e}"))?;

    let ni = f64::NEG_INFINITY;
    let f = MaxPlusScalar::Finite;
    let ex1 = MaxPlusMatrix::from_f64_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
    let ex2 = MaxPlusMatrix::from_f64_rows(&[[ni, 3.0], [-1.0, ni]]).unwrap();
    let ex3 =
        MaxPlusMatrix::from_f64_rows(&[[1.0, 1.0, ni, ni], [1.0, 1.0, ni, ni], [ni, ni, 2.0, 2.0], [ni, ni, 2.0, 2.0]])
            .unwrap();
    let ni = MaxPlusScalar::NegInf;
    let checks = [
        (&ex1, 1.0, vec![f(0.0), f(-1.0)]),
        (&ex1, 1.0, vec![f(-1.0), f(0.0)]),
        (&ex2, 1.0, vec![f(0.0), f(-2.0)]),
        (&ex3, 1.0, vec![f(1.0), f(1.0), ni, ni]),
        (&ex3, 2.0, vec![ni, ni, f(1.0), f(1.0)]),
    ];
    for (m, lam, v) in checks {
        let c = mp_eigen_check(m, lam, &v, 0.0).map_err(|e| e.to_string())?;
        ensure(c.holds, || format!("worked example fails: λ = {lam}, v = {v:?}"))?;
    }
    Ok(format!("max |λ - karp| {worst:.1e}; worked examples exact"))
}

fn triple_agreement() -> Outcome {
    let mut rng = rng(5);
    let (mut w_mp, mut w_slope) = (0.0f64, f64::NEG_INFINITY);
    for k in 0..50 {
        let d = 1 + k % 5;
        let a = random_potential(&mut rng, d);
        let by_cycles =
            enumerate_simple_cycles(d, None).iter().map(|c| c.mean(|i, j| a[(i, j)])).fold(f64::NEG_INFINITY, f64::max);
        let by_mp = mp_eigen(&MaxPlusMatrix::from_real(a.matrix())).map_err(|e| e.to_string())?.lambda;
        let b0 = 200.0;
        let slope =
            (pressure(&a, 2.0 * b0).map_err(|e| e.to_string())? - pressure(&a, b0).map_err(|e| e.to_string())?) / b0;
        w_mp = w_mp.max((by_cycles - by_mp).abs());
        let slack = (slope - by_cycles).abs() - (d as f64).ln() / b0;
        w_slope = w_slope.max(slack);
    }
    ensure(w_mp <= 1e-9, || format!("cycles vs max-plus {w_mp:e}"))?;
    ensure(w_slope <= 1e-3, || format!("slope excess over log d / beta: {w_slope:e}"))?;
    Ok(format!("cycles vs max-plus {w_mp:.1e}; slope within log d/200 + {:.1e}", w_slope.max(0.0)))
}

fn subaction_selection() -> Outcome {
    let mut rng = rng(6);
    let (mut found, mut worst, mut worst_res) = (0, 0.0f64, 0.0f64);
    while found < 20 {
        let a = random_potential(&mut rng, 3);
        let aubry = aubry_set(&a).map_err(|e| e.to_string())?;
        if !aubry.unique_maximizing_measure() {
            continue;
        }
        found += 1;
        let v = calibrated_subaction(&a).map_err(|e| e.to_string())?;
        worst_res = worst_res.max(v.calibration_residual(&a, aubry.m_a));
        let beta = 200.0;
        let s = thermo_state(&a, beta).map_err(|e| e.to_string())?;
        let mut h: Vec<f64> = s.perron.log_l.iter().map(|x| x / beta).collect();
        let top = h.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        h.iter_mut().for_each(|x| *x -= top);
        for (x, y) in h.iter().zip(&v.v) {
            worst = worst.max((x - y).abs());
        }
    }
    ensure(worst <= 5e-2, || format!("‖(1/β) log l - V‖ = {worst:e}"))?;
    ensure(worst_res <= 1e-9, || format!("calibration residual {worst_res:e}"))?;
    Ok(format!("max distance {worst:.1e}, max residual {worst_res:.1e}"))
}

fn brick_aubry() -> Outcome {
    let a = brick_aubry_potential();
    let aubry = aubry_set(&a).map_err(|e| e.to_string())?;
    let expected = TransitionMatrix::from_rows(&BRICK_T).unwrap();
    ensure(aubry.t_aubry == expected, || format!("T = {:?}", aubry.t_aubry.to_rows()))?;
    ensure(aubry.components.len() == 2, || format!("{} components", aubry.components.len()))?;
    let first = &aubry.components[aubry.component_of(Symbol::new(1).unwrap()).unwrap()];
    let second = &aubry.components[aubry.component_of(Symbol::new(6).unwrap()).unwrap()];
    let h1 = 2f64.ln() / 3.0;
    let h2 = quartic_root().ln();
    ensure((first.entropy - h1).abs() <= 1e-6, || format!("first entropy {}", first.entropy))?;
    ensure((second.entropy - 0.3990).abs() <= 1e-3, || format!("second entropy {}", second.entropy))?;
    ensure((second.entropy - h2).abs() <= 1e-6, || format!("second entropy {} vs root {}", second.entropy, h2))?;
    match ground_state(&a).map_err(|e| e.to_string())? {
        GroundState::Unique { component, .. } => {
            let syms: Vec<usize> = aubry.components[component].symbols.iter().map(|s| s.index()).collect();
            ensure(syms == vec![6, 7, 8, 9, 10], || format!("ground state on {syms:?}"))?;
        }
        GroundState::Tie { .. } => return Err("ground state tie".into()),
    }
    Ok(format!("T exact; entropies {:.7}, {:.4}; ground state on f..j", first.entropy, second.entropy))
}

fn chapter7_case(name: &str, p: &Chapter7Params, oracle: Option<&[(f64, f64, f64)]>) -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for beta in [10.0, 50.0, 100.0, 200.0, 300.0] {
        let closed = log_mu_ratio_chapter7(p, beta).map_err(|e| e.to_string())?;
        let s = thermo_state(&p.potential(), beta).map_err(|e| e.to_string())?;
        let direct = s.log_pi[0] - s.log_pi[1];
        worst = worst.max((closed - direct).exp_m1().abs());
        if let Some(o) = oracle {
            let &(_, want, _) = o.iter().find(|t| t.0 == beta).unwrap();
            worst = worst.max((closed - want).exp_m1().abs());
        }
    }
    ensure(worst <= 1e-9, || format!("{name}: μ-ratio relative error {worst:e}"))?;
    let rho = rho_chapter7(p).rho;
    let s = thermo_state(&p.potential(), 300.0).map_err(|e| e.to_string())?;
    let decay = s.log_expm1_pressure.ok_or("pressure not resolved")? / 300.0;
    ensure((decay + rho).abs() <= 2e-2, || format!("{name}: decay {decay} vs -ρ = {}", -rho))?;
    let an = limit_selection_chapter7(p).map_err(|e| e.to_string())?;
    ensure(an.agree, || format!("{name}: asymptotic {:?} vs numeric {:?}", an.asymptotic, an.numeric))?;
    let class = match an.numeric {
        LimitClass::Zero => "0".to_string(),
        LimitClass::Infinite => "inf".to_string(),
        LimitClass::Finite(a) => format!("{a:.4}"),
    };
    Ok(format!("{name} α={class}"))
}

fn chapter7() -> Outcome {
    let start = Instant::now();
    let parts = [
        chapter7_case("symmetric", &ch7_symmetric(), None)?,
        chapter7_case("asymmetric", &ch7_asymmetric(), Some(&CH7_ORACLE_ASYMMETRIC))?,
        chapter7_case("tie", &ch7_tie(), Some(&CH7_ORACLE_TIE))?,
    ];
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 30.0, || format!("took {elapsed:.1} s"))?;
    Ok(format!("{} ({elapsed:.2} s)", parts.join(", ")))
}

fn two_state() -> Outcome {
    let mut worst: f64 = 0.0;
    for (a12, a21) in [(-1.0, -1.0), (-2.0, -1.0), (-0.3, -1.7)] {
        let a = PotentialMatrix::from_rows(&[[0.0, a12], [a21, 0.0]]).unwrap();
        for beta in [0.5, 1.0, 10.0, 50.0, 100.0, 200.0, 300.0, 400.0] {
            let c = two_state_closed_forms(&a, beta).map_err(|e| e.to_string())?;
            let s = thermo_state(&a, beta).map_err(|e| e.to_string())?;
            worst = worst.max(rel(s.pressure(), c.pressure));
            let h = s.perron.log_l[0] - s.perron.log_l[1];
            worst = worst.max((h - c.log_h_ratio).abs() / c.log_h_ratio.abs().max(1.0));
            for i in 0..2 {
                worst = worst.max((s.pi()[i] - c.mu[i]).abs());
            }
        }
        let c = two_state_closed_forms(&a, 1.0).map_err(|e| e.to_string())?;
        ensure(c.v_diff == 0.5 * (a21 - a12), || "V(1) - V(2) not exact".into())?;
    }
    ensure(worst <= 1e-12, || format!("max discrepancy {worst:e}"))?;
    Ok(format!("max discrepancy {worst:.1e}"))
}

fn ldp() -> Outcome {
    let a = PotentialMatrix::from_rows(&[[0.0, -1.0], [-1.0, -1.0]]).unwrap();
    let v = calibrated_subaction(&a).map_err(|e| e.to_string())?;
    let i2 = rate_function_cylinder(&a, &v, &Word::new(&[2]).unwrap()).map_err(|e| e.to_string())?.value;
    ensure((i2 - 2.0).abs() <= 1e-12, || format!("I([2]) = {i2}"))?;
    let s = thermo_state(&a, 200.0).map_err(|e| e.to_string())?;
    let slope = -s.log_pi[1] / 200.0;
    ensure((1.95..=2.05).contains(&slope), || format!("-(1/β) log μ[2] = {slope}"))?;
    for n in 1..=3 {
        for w in Word::all_of_length(2, n) {
            let parent = rate_function_cylinder(&a, &v, &w).map_err(|e| e.to_string())?.value;
            let best = cylinder_refinement_children(&w, 2)
                .iter()
                .map(|c| rate_function_cylinder(&a, &v, c).map(|r| r.value))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            ensure((parent - best).abs() <= 1e-12, || format!("refinement fails at {w}: {parent} vs {best}"))?;
        }
    }
    Ok(format!("I([2]) = {i2}, -(1/200) log μ[2] = {slope:.4}"))
}

fn property_suites() -> Outcome {
    let mut rng = rng(11);
    let mut min_kl = f64::INFINITY;
    for k in 0..1000 {
        let d = 2 + k % 5;
        let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
            let v: Vec<f64> = (0..d).map(|_| rng.random_range(0.001..1.0)).collect();
            let s: f64 = v.iter().sum();
            ProbabilityVector::new(v.iter().map(|x| x / s).collect()).unwrap()
        };
        let (q, p) = (draw(&mut rng), draw(&mut rng));
        min_kl = min_kl.min(kl_nonneg(&q, &p).map_err(|e| e.to_string())?);
    }
    ensure(min_kl >= 0.0, || format!("KL = {min_kl:e}"))?;

    let mut worst_tri = f64::NEG_INFINITY;
    for k in 0..20 {
        let d = 1 + k % 6;
        let a = random_potential(&mut rng, d);
        let h = peierls_matrix(&a).map_err(|e| e.to_string())?;
        for i in 0..d {
            for j in 0..d {
                for l in 0..d {
                    worst_tri = worst_tri.max(h[(i, l)] + h[(l, j)] - h[(i, j)]);
                }
            }
        }
    }
    ensure(worst_tri <= 1e-12, || format!("triangle violated by {worst_tri:e}"))?;

    let mut potentials: Vec<PotentialMatrix> = (0..20).map(|k| random_potential(&mut rng, 1 + k % 6)).collect();
    potentials.push(brick_aubry_potential());
    potentials.push(ch7_sample().potential());
    potentials.push(PotentialMatrix::constant(4, 0.0));
    for a in &potentials {
        let aubry = aubry_set(a).map_err(|e| e.to_string())?;
        let mut scc: Vec<Vec<Symbol>> = aubry.components.iter().map(|c| c.symbols.clone()).collect();
        let mut barrier = barrier_components(a).map_err(|e| e.to_string())?;
        scc.sort();
        barrier.sort();
        ensure(scc == barrier, || format!("components differ: {scc:?} vs {barrier:?}"))?;
    }

    let mut worst_conv = f64::INFINITY;
    for k in 0..10 {
        let a = if k == 0 { ch7_sample().potential() } else { random_potential(&mut rng, 1 + k % 5) };
        let grid: Vec<f64> = (0..40).map(|t| -5.0 + 15.0 * t as f64 / 39.0).collect();
        let p: Vec<f64> = grid.iter().map(|&b| pressure(&a, b)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        for t in 1..39 {
            worst_conv = worst_conv.min(p[t + 1] - 2.0 * p[t] + p[t - 1]);
        }
    }
    ensure(worst_conv >= -1e-9, || format!("second difference {worst_conv:e}"))?;
    Ok(format!(
        "min KL {min_kl:.1e}, triangle slack {worst_tri:.1e}, {} component checks, min second difference {worst_conv:.1e}",
        potentials.len()
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("Perron correctness", perron_correctness),
        ("Gibbs = Markov", gibbs_is_markov),
        ("variational principle", variational_principle),
        ("max-plus eigenvalue = Karp", maxplus_eigenvalue),
        ("triple agreement on m(A)", triple_agreement),
        ("subaction selection", subaction_selection),
        ("brick Aubry example", brick_aubry),
        ("three-symbol closed forms", chapter7),
        ("two-state example", two_state),
        ("large deviations", ldp),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{ms} ms]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{ms} ms]", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
