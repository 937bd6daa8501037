//! End-to-end acceptance suite: one line per criterion, nonzero exit on any
//! failure.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use ggm_core::connection::{lambda_compare, Connection, ConnectionMatrix, LambdaVerdict};
use ggm_core::model::{Caps, Model, ModelKind, ModelSpec};
use ggm_core::retract::Retraction;
use ggm_core::verify::{
    closed_matrix_check, cohomology_parity_check, compatibility_check, exhaustive_sdr_check, flatness_check,
    induced_differential_check, invariant_forms, maurer_cartan_check, mixed_complex_check, random_smash_chains,
    random_twisted_chains, representative_checks, sdr_check, stabilization_check, Check, Status,
};
use ggm_core::Q;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const KINDS: [ModelKind; 2] = [ModelKind::Aorb, ModelKind::D];
const SEED: u64 = 20240611;

struct Outcome {
    ok: bool,
    detail: String,
}

fn gather(checks: &[(String, Check)], accept: impl Fn(&Check) -> bool) -> Outcome {
    let bad: Vec<String> =
        checks.iter().filter(|(_, c)| !accept(c)).map(|(tag, c)| format!("{} {}: {}", tag, c.status.name(), c.detail)).collect();
    if bad.is_empty() {
        let first = checks.first().map(|(t, c)| format!("{}: {}", t, c.detail)).unwrap_or_default();
        Outcome { ok: true, detail: format!("{} runs; {}", checks.len(), first) }
    } else {
        Outcome { ok: false, detail: bad.join("; ") }
    }
}

fn passed(c: &Check) -> bool {
    c.status == Status::Pass
}

fn model(kind: ModelKind, n: u16, caps: Caps) -> Arc<Model<Q>> {
    Arc::new(Model::build(ModelSpec { kind, n, caps, seed: SEED }).expect("model"))
}

struct Computed {
    conn: Connection<Q>,
    mats: Vec<ConnectionMatrix<Q>>,
}

type Runs = BTreeMap<(ModelKind, u16), Computed>;

fn tag(kind: ModelKind, n: u16, c: &Computed) -> String {
    let caps = c.conn.caps();
    format!("{} n={} (K={}, U={})", kind.name(), n, caps.k_max, caps.u_max)
}

fn compute(caps: Caps) -> Runs {
    let mut out = BTreeMap::new();
    for kind in KINDS {
        for n in [2, 3] {
            let conn = Connection::new(Retraction::new(model(kind, n, caps))).expect("connection");
            let mats = conn.matrices().expect("matrices");
            out.insert((kind, n), Computed { conn, mats });
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let mut checks = Vec::new();
    for n in [2, 3] {
        let m = model(ModelKind::Aorb, n, Caps::with_order(4, 2));
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let chains = random_twisted_chains(&m, 200, 3, 4, &mut rng);
        checks.push((format!("aorb n={}", n), mixed_complex_check(&m, &chains)));
    }
    gather(&checks, passed)
}

fn criterion_2() -> Outcome {
    let mut checks = Vec::new();
    for kind in KINDS {
        let m = model(kind, 2, Caps::default());
        let r = Retraction::new(m.clone());
        checks.push((format!("{} n=2", kind.name()), exhaustive_sdr_check(&r, 12, 6)));
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let samples = random_twisted_chains(&m, 24, 3, m.k_max(), &mut rng);
        let forms = invariant_forms(&r, 4);
        checks.push((format!("{} n=2 perturbed", kind.name()), sdr_check(&r, &samples, &forms)));
    }
    gather(&checks, passed)
}

fn criterion_3() -> Outcome {
    let mut checks = Vec::new();
    for kind in KINDS {
        for n in [2, 3] {
            let r = Retraction::new(model(kind, n, Caps::default()));
            let forms = invariant_forms(&r, 2 * n as u32 + 2);
            checks.push((format!("{} n={}", kind.name(), n), induced_differential_check(&r, &forms)));
        }
    }
    gather(&checks, passed)
}

fn criterion_4() -> Outcome {
    let mut checks = Vec::new();
    for kind in KINDS {
        for n in [2, 3] {
            let m = model(kind, n, Caps::with_order(4, 2));
            let mut rng = ChaCha8Rng::seed_from_u64(SEED);
            let twisted = random_twisted_chains(&m, 100, 3, 4, &mut rng);
            let smash = random_smash_chains(&m, 100, 3, 4, &mut rng);
            checks.push((format!("{} n={}", kind.name(), n), compatibility_check(&m, &twisted, &smash)));
        }
    }
    gather(&checks, passed)
}

fn criterion_5() -> Outcome {
    let mut checks = Vec::new();
    for kind in KINDS {
        for n in 2..=5 {
            let r = Retraction::new(model(kind, n, Caps::with_order(1, 1)));
            let (c, t) = cohomology_parity_check(&r);
            let ok = c.status == Status::Pass && t.even == n as usize + 1 && t.odd == 0;
            let c = Check { status: if ok { Status::Pass } else { Status::Fail }, ..c };
            checks.push((format!("{} n={}", kind.name(), n), c));
        }
    }
    gather(&checks, passed)
}

fn criterion_6() -> Outcome {
    let mut checks = Vec::new();
    for kind in KINDS {
        for n in [2, 3] {
            let m = model(kind, n, Caps::with_order(4, 2));
            checks.push((format!("{} n={}", kind.name(), n), maurer_cartan_check(&m)));
        }
    }
    gather(&checks, passed)
}

fn criterion_7(computed: &Runs) -> Outcome {
    let mut checks = Vec::new();
    for ((kind, n), c) in computed {
        for check in representative_checks(&c.conn) {
            if check.name == "leading-terms" || check.name == "closed-form beta(2)" {
                checks.push((format!("{} n={} {}", kind.name(), n, check.name), check));
            }
        }
    }
    let verdicts: Vec<String> = checks
        .iter()
        .filter(|(_, c)| c.name.starts_with("closed-form"))
        .map(|(t, c)| format!("{} {}", t, c.detail))
        .collect();
    let out = gather(&checks, |c| matches!(c.status, Status::Pass | Status::ModBoundary));
    Outcome { detail: format!("{}; {}", out.detail, verdicts.join(", ")), ..out }
}

fn criterion_8(computed: &Runs) -> Outcome {
    let checks: Vec<(String, Check)> = computed
        .iter()
        .map(|((kind, n), c)| (format!("{} n={}", kind.name(), n), closed_matrix_check(&c.conn, &c.mats)))
        .collect();
    gather(&checks, passed)
}

fn criterion_9(runs: &[&Runs]) -> Outcome {
    let checks: Vec<(String, Check)> = runs
        .iter()
        .flat_map(|r| r.iter())
        .map(|((kind, n), c)| (tag(*kind, *n, c), flatness_check(&c.conn, &c.mats)))
        .collect();
    gather(&checks, passed)
}

fn criterion_10(runs: &[&Runs]) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for computed in runs {
        for n in [2, 3] {
            let (a, d) = (&computed[&(ModelKind::Aorb, n)], &computed[&(ModelKind::D, n)]);
            let t = tag(ModelKind::Aorb, n, a).replacen("aorb ", "", 1);
            match lambda_compare(&a.conn, &a.mats, &d.conn, &d.mats) {
                Ok(rep) => {
                    ok &= rep.verdict != LambdaVerdict::Inequivalent;
                    parts.push(format!("{} {}", t, rep.verdict.name()));
                }
                Err(e) => {
                    ok = false;
                    parts.push(format!("{} error {}", t, e));
                }
            }
        }
    }
    Outcome { ok, detail: parts.join(", ") }
}

fn criterion_11(computed: &Runs) -> Outcome {
    let checks: Vec<(String, Check)> = computed
        .iter()
        .map(|((kind, n), c)| {
            let check = stabilization_check(&c.conn, &c.mats).unwrap_or_else(|e| Check {
                name: "stabilization".into(),
                status: Status::Fail,
                mandatory: true,
                detail: e.to_string(),
            });
            (format!("{} n={}", kind.name(), n), check)
        })
        .collect();
    gather(&checks, passed)
}

fn main() {
    let mut all_ok = true;
    let mut report = |idx: usize, name: &str, run: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = run();
        all_ok &= o.ok;
        let line = format!(
            "criterion {:>2} {:<28} {} ({:.1}s) {}",
            idx,
            name,
            if o.ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "{}", line);
        let _ = out.flush();
    };
    report(1, "mixed-complex identities", &mut criterion_1);
    report(2, "retraction side conditions", &mut criterion_2);
    report(3, "induced differential", &mut criterion_3);
    report(4, "psi/gamma compatibilities", &mut criterion_4);
    report(5, "rank and parity", &mut criterion_5);
    report(6, "maurer-cartan", &mut criterion_6);

    let computed = compute(Caps::default());
    let deep = compute(Caps::with_order(4, 3));
    report(7, "representative leading terms", &mut || criterion_7(&computed));
    report(8, "connection matrices", &mut || criterion_8(&computed));
    report(9, "flatness", &mut || criterion_9(&[&computed, &deep]));
    report(10, "model comparison", &mut || criterion_10(&[&computed, &deep]));
    report(11, "stabilization", &mut || criterion_11(&computed));
    if !all_ok {
        std::process::exit(1);
    }
}
