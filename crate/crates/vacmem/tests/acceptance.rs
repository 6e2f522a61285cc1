//! Acceptance suite. Prints one PASS/FAIL line per criterion, then fails if
//! any criterion failed. Run with `--nocapture` to see the lines.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vacmem_core::fock_oracle::{build_squeezed, oracle_numbers, oracle_overlap, run_suite, SUITE_THETAS};
use vacmem_core::{
    balance_residual, entropy, lifetime_profile, log_overlap, overlap, solve_dwq, squeeze_to_code, BankParams, Damping,
    Error, FrequencySchedule, LifetimeBackend, MemoryBank, MemoryCode, MemoryState, MemoryStatus, ModeGrid,
    RecallResult, SqueezeVector, Stimulus,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !($cond) {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn schedule() -> FrequencySchedule {
    FrequencySchedule::exp_decay(1.0).unwrap()
}

fn gamma2() -> Damping {
    Damping::new(2.0).unwrap()
}

/// `L = π`: k = 2, 4, .., 2M, all lifetimes finite and positive.
fn bank(modes: usize, dissipative: bool) -> MemoryBank {
    let grid = ModeGrid::new(PI, modes).unwrap();
    let params = BankParams::for_grid(&grid, dissipative);
    MemoryBank::new(grid, gamma2(), schedule(), params).unwrap()
}

fn random_code(rng: &mut ChaCha8Rng, id: &str, modes: usize) -> MemoryCode {
    let occ = (0..modes).map(|_| rng.gen_range(0.0..3.0)).collect();
    MemoryCode::new(id, occ, 0.0).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let dim = 64;
    let mut worst_n = 0.0f64;
    for &theta in &SUITE_THETAS {
        let (n, _) = oracle_numbers(&build_squeezed(theta, dim).map_err(err)?);
        worst_n = worst_n.max((n - theta.sinh().powi(2)).abs());
    }
    ensure!(worst_n < 1e-8, "occupation error {worst_n:e}");
    let mut pairs = 0;
    let mut worst_o = 0.0f64;
    for (i, &a) in SUITE_THETAS.iter().enumerate() {
        for &b in &SUITE_THETAS[i + 1..] {
            let o = oracle_overlap(a, b, dim).map_err(err)?;
            worst_o = worst_o.max((o - 1.0 / (a - b).cosh()).abs());
            pairs += 1;
        }
    }
    ensure!(pairs == 15, "{pairs} pairs");
    ensure!(worst_o < 1e-8, "overlap error {worst_o:e}");
    let report = run_suite(dim, 1.2).map_err(err)?;
    let failed: Vec<_> = report
        .checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| c.name.clone())
        .collect();
    ensure!(failed.is_empty(), "suite failures: {failed:?}");
    Ok(format!(
        "max |N err| {worst_n:.1e}, max overlap err {worst_o:.1e} over {pairs} pairs, {} suite checks",
        report.checks.len()
    ))
}

fn balance_constraint() -> Outcome {
    for &theta in &SUITE_THETAS {
        let (plain, tilde) = oracle_numbers(&build_squeezed(theta, 64).map_err(err)?);
        ensure!(plain - tilde == 0.0, "oracle θ={theta}: {:e}", plain - tilde);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut bank = bank(32, true);
    let ids: Vec<String> = (0..8).map(|i| format!("m{i}")).collect();
    for id in &ids {
        bank.record(random_code(&mut rng, id, 32), 0.0).map_err(err)?;
    }
    for step in 0..1000u64 {
        match step % 3 {
            0 => {
                bank.advance_to(bank.clock() + 0.01).map_err(err)?;
            }
            1 => {
                bank.perturb(0.1, 0.0, step);
            }
            _ => {
                let id = &ids[(step as usize / 3) % ids.len()];
                if bank.get(id).unwrap().is_alive() {
                    bank.refresh(id).map_err(err)?;
                }
            }
        }
        for s in bank.states() {
            let r = balance_residual(s.current()).max_abs_residual;
            ensure!(r == 0.0, "step {step}, {}: residual {r:e}", s.id());
        }
    }
    Ok("oracle residual 0 for 6 θ, bank residual 0 through 1000 steps".into())
}

fn capacity_vs_overprinting() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut codes: Vec<MemoryCode> = Vec::new();
    while codes.len() < 20 {
        let c = random_code(&mut rng, &format!("c{}", codes.len()), 32);
        if codes.iter().all(|o| overlap(o, &c).unwrap() < 0.5) {
            codes.push(c);
        }
    }
    let count = |dissipative: bool| -> Result<(usize, usize), String> {
        let mut b = bank(32, dissipative);
        for c in &codes {
            b.record(c.clone(), 0.0).map_err(err)?;
        }
        let m_eff = b.params().m_eff;
        let mut hits = 0;
        for c in &codes {
            let stim = Stimulus::new(c.clone(), m_eff).map_err(err)?;
            if let RecallResult::Recalled { code_id, .. } = b.recall(&stim, 0.0).map_err(err)? {
                ensure!(code_id == c.id(), "stimulus {} recalled {code_id}", c.id());
                hits += 1;
            }
        }
        Ok((hits, b.overprint_count()))
    };
    let (d_hits, d_over) = count(true)?;
    let (n_hits, n_over) = count(false)?;
    ensure!(
        d_hits == 20 && d_over == 0,
        "dissipative recalled {d_hits}/20, {d_over} overprints"
    );
    ensure!(
        n_hits == 1 && n_over == 19,
        "non-dissipative recalled {n_hits}/20, {n_over} overprints"
    );
    Ok(format!(
        "dissipative {d_hits}/20, non-dissipative {n_hits}/20 with {n_over} overprints"
    ))
}

fn lifetime_hierarchy() -> Outcome {
    let grid = ModeGrid::new(4.0 * PI, 100).map_err(err)?;
    let k = grid.momenta();
    ensure!(
        (k[0] - 0.5).abs() < 1e-12 && (k[99] - 50.0).abs() < 1e-12,
        "grid spans {}..{}",
        k[0],
        k[99]
    );
    let analytic = lifetime_profile(&grid, gamma2(), schedule(), LifetimeBackend::Analytic).map_err(err)?;
    let numeric = lifetime_profile(&grid, gamma2(), schedule(), LifetimeBackend::Numeric).map_err(err)?;
    let (a, n) = (analytic.lifetimes(), numeric.lifetimes());
    ensure!(a.windows(2).all(|w| w[1] >= w[0]), "analytic not nondecreasing");
    ensure!(n.windows(2).all(|w| w[1] >= w[0]), "numeric not nondecreasing");
    let mut worst = 0.0f64;
    for i in 0..100 {
        let want = if 2.0 * k[i] > 2.0 { (2.0 * k[i] / 2.0).ln() } else { 0.0 };
        if 2.0 * k[i] <= 2.0 {
            ensure!(a[i] == 0.0 && n[i] == 0.0, "k={} τ={}/{}", k[i], a[i], n[i]);
        }
        worst = worst
            .max((a[i] - want).abs())
            .max((n[i] - want).abs())
            .max((a[i] - n[i]).abs());
    }
    ensure!(worst < 1e-8, "max deviation {worst:e}");
    Ok(format!(
        "100 modes, max |analytic − bisection − T ln(2k/Γ)| {worst:.1e}"
    ))
}

fn inequivalence_scaling() -> Outcome {
    let mut last = 1.0;
    for m in [1usize, 10, 50] {
        let a = squeeze_to_code(&SqueezeVector::new(vec![0.2; m]).map_err(err)?, "a", 0.0).map_err(err)?;
        let b = squeeze_to_code(&SqueezeVector::new(vec![0.7; m]).map_err(err)?, "b", 0.0).map_err(err)?;
        let got = log_overlap(&a, &b).map_err(err)?;
        let want = m as f64 * (1.0 / 0.5f64.cosh()).ln();
        ensure!((got - want).abs() < 1e-9, "M={m}: {got} vs {want}");
        last = overlap(&a, &b).map_err(err)?;
    }
    ensure!(last < 2.5e-3, "overlap at M=50 is {last:e}");
    Ok(format!(
        "log overlap exact for M ∈ {{1, 10, 50}}, overlap(M=50) = {last:.3e}"
    ))
}

fn entropy_arrow() -> Outcome {
    let b = bank(8, true);
    let eps = b.params().epsilon_forget;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut samples = 0;
    for trial in 0..5 {
        let mut state = MemoryState::new(random_code(&mut rng, "e", 8), eps);
        ensure!(state.evolve(0.0, b.profile(), eps).is_err(), "dt = 0 accepted");
        ensure!(
            matches!(state.evolve(-0.1, b.profile(), eps), Err(Error::NonPositiveTimeStep(_))),
            "dt < 0 accepted"
        );
        let dt = 0.05 * (trial + 1) as f64;
        while state.is_alive() {
            let before = entropy(state.current());
            let live = state.current().max_occupation() > eps;
            state = state.evolve(dt, b.profile(), eps).map_err(err)?;
            let after = entropy(state.current());
            ensure!(after <= before, "entropy rose {before} → {after} at t={}", state.t());
            ensure!(!live || after < before, "entropy flat at t={} with N > ε", state.t());
            samples += 1;
        }
    }
    Ok(format!(
        "{samples} steps over 5 trajectories, all strictly decreasing until forgotten"
    ))
}

fn recall_gates() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut b = bank(16, true);
    let codes: Vec<MemoryCode> = (0..5).map(|i| random_code(&mut rng, &format!("g{i}"), 16)).collect();
    for c in &codes {
        b.record(c.clone(), 0.0).map_err(err)?;
    }
    let m_eff = b.params().m_eff;
    ensure!((m_eff - 1.0).abs() < 1e-15, "m_eff = π/L should be 1, got {m_eff}");
    for i in 0..200 {
        let address = if i % 2 == 0 {
            codes[i % 5].clone()
        } else {
            random_code(&mut rng, "s", 16)
        };
        let energy = rng.gen_range(0.0..m_eff);
        let r = b
            .recall(&Stimulus::new(address, energy).map_err(err)?, 0.0)
            .map_err(err)?;
        ensure!(r == RecallResult::BelowEnergyThreshold, "energy {energy}: {r:?}");
    }

    let grid = b.grid().clone();
    let mut params = BankParams::for_grid(&grid, true);
    params.m_eff = 0.0;
    let mut flow = MemoryBank::new(grid, gamma2(), schedule(), params).map_err(err)?;
    for c in &codes {
        flow.record(c.clone(), 0.0).map_err(err)?;
    }
    let mut flows = 0;
    for i in 0..200 {
        let address = if i % 2 == 0 {
            codes[i % 5].clone()
        } else {
            random_code(&mut rng, "s", 16)
        };
        let energy = rng.gen_range(0.0..2.0);
        let expected: Vec<String> = codes
            .iter()
            .filter(|c| overlap(&address, c).unwrap() > params.assoc_threshold)
            .map(|c| c.id().to_string())
            .collect();
        let r = flow
            .recall(&Stimulus::new(address, energy).map_err(err)?, 0.0)
            .map_err(err)?;
        match r {
            RecallResult::ContinuousFlow { code_ids } => {
                ensure!(code_ids == expected, "flow {code_ids:?} vs {expected:?}");
                flows += usize::from(!code_ids.is_empty());
            }
            other => return Err(format!("m_eff = 0 gave {other:?}")),
        }
    }
    ensure!(flows >= 100, "only {flows} stimuli overlapped a memory");
    Ok(format!(
        "200 sub-threshold stimuli rejected, {flows} continuous-flow recalls at m_eff = 0"
    ))
}

fn forget_refresh_lifecycle() -> Outcome {
    let b = bank(8, true);
    let eps = b.params().epsilon_forget;
    let taus = b.profile().lifetimes();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..5 {
        let code = random_code(&mut rng, "f", 8);
        let t_star = code
            .occupations()
            .iter()
            .zip(taus)
            .filter(|(n, _)| **n > eps)
            .map(|(n, tau)| tau * (n / eps).ln())
            .fold(0.0, f64::max);
        let state = MemoryState::new(code.clone(), eps);

        let early = state.evolve(0.99 * t_star, b.profile(), eps).map_err(err)?;
        ensure!(early.is_alive(), "forgotten before t* = {t_star}");
        let refreshed = early.refresh().map_err(err)?;
        ensure!(
            refreshed.current() == refreshed.code0(),
            "refresh did not restore code0"
        );
        ensure!(refreshed.current().occupations() == code.occupations(), "code0 drifted");

        let late = state.evolve(1.01 * t_star, b.profile(), eps).map_err(err)?;
        ensure!(late.status() == MemoryStatus::Forgotten, "alive past t* = {t_star}");
        ensure!(late.current().is_empty_vacuum(), "forgotten slot not empty");
        ensure!(
            matches!(late.refresh(), Err(Error::RefreshForgotten(_))),
            "late refresh accepted"
        );
    }
    Ok("5 codes: alive at 0.99 t*, exact refresh; empty vacuum at 1.01 t*, late refresh rejected".into())
}

fn damped_closed_form(gamma: f64, omega: f64, t: f64) -> f64 {
    let wd = (omega * omega - gamma * gamma / 4.0).sqrt();
    (-gamma * t / 2.0).exp() * ((wd * t).cos() + gamma / (2.0 * wd) * (wd * t).sin())
}

fn integrator_correctness() -> Outcome {
    let k = 1.0;
    let period = 2.0 * PI / k;
    let tr = solve_dwq(
        k,
        Damping::NONE,
        FrequencySchedule::Constant,
        100.0 * period,
        period / 200.0,
        1.0,
        0.0,
    )
    .map_err(err)?;
    let energy = |i: usize| 0.5 * (tr.u_dot[i].powi(2) + k * k * tr.u[i].powi(2));
    let drift = (0..tr.u.len())
        .map(|i| ((energy(i) - energy(0)) / energy(0)).abs())
        .fold(0.0, f64::max);
    ensure!(drift < 1e-6, "energy drift {drift:e}");

    let gamma = 0.2;
    let damping = Damping::new(gamma).map_err(err)?;
    let tr = solve_dwq(k, damping, FrequencySchedule::Constant, 20.0, period / 200.0, 1.0, 0.0).map_err(err)?;
    let worst = tr
        .times
        .iter()
        .zip(&tr.u)
        .map(|(t, u)| (u - damped_closed_form(gamma, k, *t)).abs())
        .fold(0.0, f64::max);
    ensure!(worst < 1e-6, "closed-form error {worst:e}");

    let end_err = |dt: f64| -> Result<f64, String> {
        let tr = solve_dwq(k, damping, FrequencySchedule::Constant, 10.0, dt, 1.0, 0.0).map_err(err)?;
        Ok((tr.final_state().1 - damped_closed_form(gamma, k, 10.0)).abs())
    };
    let mut ratios = Vec::new();
    for dt in [0.2, 0.1, 0.05] {
        let ratio = end_err(dt)? / end_err(dt / 2.0)?;
        ensure!((12.0..=20.0).contains(&ratio), "dt={dt}: error ratio {ratio}");
        ratios.push(format!("{ratio:.2}"));
    }
    Ok(format!(
        "drift {drift:.1e}, closed-form error {worst:.1e}, ratios [{}]",
        ratios.join(", ")
    ))
}

fn determinism() -> Outcome {
    let demo = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/demo.cfg");
    let dir = tempfile::tempdir().map_err(err)?;
    let mut files = 0;
    for format in ["csv", "json"] {
        let outs: Vec<_> = ["a", "b"]
            .iter()
            .map(|r| dir.path().join(format!("{format}-{r}")))
            .collect();
        for out in &outs {
            let status = Command::new(env!("CARGO_BIN_EXE_vacmem"))
                .args([
                    "--quiet",
                    "run",
                    demo.to_str().unwrap(),
                    "--out",
                    out.to_str().unwrap(),
                    "--format",
                    format,
                ])
                .status()
                .map_err(err)?;
            ensure!(status.success(), "run exited with {status}");
        }
        for entry in fs::read_dir(&outs[0]).map_err(err)? {
            let name = entry.map_err(err)?.file_name();
            let a = fs::read(outs[0].join(&name)).map_err(err)?;
            let b = fs::read(outs[1].join(&name)).map_err(err)?;
            ensure!(a == b, "{name:?} differs between runs");
            files += 1;
        }
    }
    ensure!(files == 5, "expected 5 output files, compared {files}");
    Ok(format!("{files} files byte-identical across two runs"))
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("balance constraint", balance_constraint),
        ("capacity vs overprinting", capacity_vs_overprinting),
        ("lifetime hierarchy", lifetime_hierarchy),
        ("inequivalence scaling", inequivalence_scaling),
        ("entropy arrow", entropy_arrow),
        ("recall gates", recall_gates),
        ("forget/refresh lifecycle", forget_refresh_lifecycle),
        ("integrator correctness", integrator_correctness),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({ms} ms)", i + 1),
            Err(why) => {
                println!("FAIL {:>2} {name}: {why} ({ms} ms)", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
