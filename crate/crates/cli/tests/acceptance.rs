//! Acceptance criteria, one line each. Run with
//! `cargo test -p nongauss --test acceptance`.
//!
//! Criterion 6 is expected to fail: the stated closed form for the mean after
//! gaussify-then-project disagrees with direct integration. The run counts
//! it as known only while its failure keeps exactly that shape.

use std::collections::HashMap;
use std::process::Command;
use std::time::{Duration, Instant};

use nongauss_core::fock::{apply_map, build_state, delta_g, FockConfig, StateKind};
use nongauss_core::maps;
use nongauss_core::C64;
use serde_json::Value;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

struct Run {
    code: i32,
    json: Value,
    stderr: String,
    elapsed: Duration,
}

fn nongauss(args: &str) -> Run {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_nongauss"))
        .args(args.split_whitespace())
        .output()
        .expect("binary runs");
    let elapsed = start.elapsed();
    Run {
        code: out.status.code().unwrap_or(-1),
        json: serde_json::from_slice(&out.stdout).unwrap_or(Value::Null),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
        elapsed,
    }
}

fn num(v: &Value) -> f64 {
    v["value"].as_f64().unwrap_or(f64::NAN)
}

/// Verify-suite assertions keyed by name.
struct Suite {
    code: i32,
    by_name: HashMap<String, Value>,
}

impl Suite {
    fn load(name: &str) -> Suite {
        let run = nongauss(&format!("verify {name}"));
        let by_name = run.json["result"]["assertions"]
            .as_array()
            .map(|list| list.iter().map(|a| (a["name"].as_str().unwrap_or_default().to_string(), a.clone())).collect())
            .unwrap_or_default();
        Suite { code: run.code, by_name }
    }

    fn passed(&self, name: &str) -> bool {
        self.by_name.get(name).and_then(|a| a["passed"].as_bool()).unwrap_or(false)
    }

    fn measured(&self, name: &str) -> f64 {
        self.by_name.get(name).and_then(|a| a["measured"].as_f64()).unwrap_or(f64::NAN)
    }

    fn all_passed(&self) -> bool {
        self.code == 0 && !self.by_name.is_empty() && self.by_name.values().all(|a| a["passed"] == Value::Bool(true))
    }

    fn failures(&self) -> Vec<&str> {
        let mut f: Vec<&str> =
            self.by_name.iter().filter(|(_, a)| a["passed"] != Value::Bool(true)).map(|(k, _)| k.as_str()).collect();
        f.sort_unstable();
        f
    }
}

fn c1() -> Outcome {
    let run = nongauss("state-ng fock:1 --cutoff 30");
    let d = num(&run.json["result"]["delta_g"]);
    let secs = run.json["timestamp"]["wall_time_s"].as_f64().unwrap_or(f64::INFINITY);
    outcome(
        run.code == 0 && (d - 2.0).abs() < 1e-3 && secs < 1.0,
        format!("δ_G = {d:.9} at D=30 in {secs:.3} s (process {:.3} s)", run.elapsed.as_secs_f64()),
    )
}

fn conditional_unitary(spec: &str, prefix: &str, props: &Suite) -> Outcome {
    let run = nongauss(&format!("map-ng {spec}"));
    let r = &run.json["result"];
    let v = num(&r["value"]);
    let alpha = num(&r["argmax"]["alpha_re"]).hypot(num(&r["argmax"]["alpha_im"]));
    let spread = props.measured(&format!("{prefix}.stationarity"));
    let ok = run.code == 0
        && (v - 2.0).abs() <= 1e-2
        && alpha <= 0.05
        && props.passed(&format!("{prefix}.stationarity"))
        && spread <= 1e-3
        && run.elapsed < Duration::from_secs(60);
    outcome(
        ok,
        format!(
            "δ̃_G = {v:.9}, |α*| = {alpha:.2e}, spread at α=0 over 10 draws {spread:.2e}, {:.2} s",
            run.elapsed.as_secs_f64()
        ),
    )
}

fn c4(props: &Suite) -> Outcome {
    let name = "analytic_vs_fock_covariance";
    outcome(props.passed(name), format!("max covariance entry deviation {:.2e} over 20 draws", props.measured(name)))
}

fn c5(lemma: &Suite) -> Outcome {
    outcome(
        lemma.all_passed(),
        format!(
            "closed-form loss {:.2e}, Fock-route loss {:.2e} over 10 channels",
            lemma.measured("lemma1.closed_form"),
            lemma.measured("lemma1.fock_route")
        ),
    )
}

/// `(criterion met, failure has the documented shape, detail)`.
fn c6(ce: &Suite) -> (Outcome, bool) {
    let mut met = true;
    let mut known = true;
    let mut parts = Vec::new();
    for a in ["0.5", "1"] {
        let first = ce.passed(&format!("appendix_b.gaussify_after_projection.alpha_{a}"));
        let closed = ce.passed(&format!("appendix_b.projection_after_gaussify.closed_form.alpha_{a}"));
        let quad = ce.passed(&format!("appendix_b.projection_after_gaussify.quadrature.alpha_{a}"));
        met &= first && closed;
        known &= first && !closed && quad;
        parts.push(format!(
            "α={a}: λ_G∘T {} | T∘λ_G vs 2α³/(1+α²) off by {:.3e} | vs quadrature {:.1e}",
            if first { "ok" } else { "BAD" },
            ce.measured(&format!("appendix_b.projection_after_gaussify.closed_form.alpha_{a}")),
            ce.measured(&format!("appendix_b.projection_after_gaussify.quadrature.alpha_{a}")),
        ));
    }
    let mut detail = parts.join("; ");
    if !met && known {
        detail.push_str("; known: the computed mean is 2α³/(1+2α²)");
    }
    (outcome(met, detail), known)
}

fn c7(ce: &Suite) -> Outcome {
    let name = "appendix_c.projection_raises_nongaussianity";
    outcome(ce.passed(name), format!("δ_G increase {:.4} bits (needs > 0.5)", ce.measured(name)))
}

/// `g(N)` in bits, written out here so the bound does not reuse the library.
fn g(n: f64) -> f64 {
    if n <= 0.0 {
        0.0
    } else {
        (n + 1.0) * (n + 1.0).log2() - n * n.log2()
    }
}

fn c8() -> Outcome {
    let fc = FockConfig::default();
    let bps = maps::bps();
    let mut gaps = Vec::new();
    for alpha in [0.5f64, 1.0, 2.0, 3.0] {
        let gap = build_state(StateKind::Coherent(C64::new(alpha, 0.0)), 60, &fc)
            .and_then(|rho| apply_map(&rho, &bps.map, &fc))
            .and_then(|out| delta_g(&out.state, &fc))
            .map(|d| d - (g(((4.0 * alpha * alpha + 1.0).sqrt() - 1.0) / 2.0) - 1.0));
        match gap {
            Ok(g) => gaps.push(g),
            Err(e) => return outcome(false, format!("α={alpha}: {e}")),
        }
    }
    let bounded = gaps.iter().all(|&g| (-1e-9..=1.0).contains(&g));
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    outcome(bounded && decreasing, format!("gaps over α ∈ {{0.5, 1, 2, 3}}: {}", gaps.iter().map(|g| format!("{g:.3e}")).collect::<Vec<_>>().join(", ")))
}

fn c9() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (spec, finite) in [("pns", true), ("pna", true), ("bps", false), ("kerr:0.5", false)] {
        let run = nongauss(&format!("sweep {spec}"));
        let r = &run.json["result"];
        let class = r["classification"].as_str().unwrap_or("?").to_string();
        let deltas: Vec<f64> = r["points"].as_array().map(|p| p.iter().map(|x| num(&x["delta"])).collect()).unwrap_or_default();
        let slope = num(&r["slope_fit"]);
        let this = run.code == 0
            && !deltas.is_empty()
            && if finite {
                class == "finite" && deltas.iter().all(|d| (d - 2.0).abs() <= 0.05)
            } else {
                class == "diverging" && slope >= 0.5
            };
        ok &= this;
        parts.push(format!("{spec} {class} slope {slope:.3}"));
    }
    let total = start.elapsed();
    ok &= total < Duration::from_secs(600);
    outcome(ok, format!("{}; total {:.1} s", parts.join(", "), total.as_secs_f64()))
}

fn c10() -> Outcome {
    let run = nongauss("map-ng gd:bs0.5,env=fock:1 --bound");
    let r = &run.json["result"];
    let sampled = num(&r["sampled_max"]);
    let bound = num(&r["bound"]);
    outcome(
        run.code == 0 && sampled <= 2.0 + 1e-3 && (bound - 2.0).abs() < 1e-9,
        format!(
            "sampled max {sampled:.6} over {} inputs, environment δ_G {bound:.6}{}",
            r["samples"],
            if run.code == 0 { String::new() } else { format!(" ({})", run.stderr.trim()) }
        ),
    )
}

fn c11(props: &Suite) -> Outcome {
    let (p, a) = ("pns.theorem1_chain", "pna.theorem1_chain");
    outcome(
        props.passed(p) && props.passed(a),
        format!("d_G − δ̃_G: pns {:.2e}, pna {:.2e} (≤ 1e-3)", props.measured(p), props.measured(a)),
    )
}

fn c12(state: &Suite, relent: &Suite, props: &Suite) -> Outcome {
    let ok = state.all_passed()
        && relent.all_passed()
        && props.passed("b3.gaussian_unitaries_around_pns")
        && props.passed("b6.loss_after_pns");
    let mut failed: Vec<&str> = state.failures();
    failed.extend(relent.failures());
    failed.extend(props.failures());
    outcome(
        ok,
        format!(
            "{} state, {} relative-entropy, {} monotone assertions; failing: {}",
            state.by_name.len(),
            relent.by_name.len(),
            props.by_name.len(),
            if failed.is_empty() { "none".to_string() } else { failed.join(", ") }
        ),
    )
}

fn main() {
    let props = Suite::load("monotone-props");
    let lemma = Suite::load("lemma1");
    let ce = Suite::load("counterexamples");
    let state = Suite::load("state-props");
    let relent = Suite::load("relent");

    let (o6, known6) = c6(&ce);
    let results = [
        (1, c1(), false),
        (2, conditional_unitary("pns", "pns", &props), false),
        (3, conditional_unitary("pna", "pna", &props), false),
        (4, c4(&props), false),
        (5, c5(&lemma), false),
        (6, o6, known6),
        (7, c7(&ce), false),
        (8, c8(), false),
        (9, c9(), false),
        (10, c10(), false),
        (11, c11(&props), false),
        (12, c12(&state, &relent, &props), false),
    ];
    let mut unexpected = 0;
    for (n, o, known) in &results {
        let tag = match (o.passed, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("criterion {n}: {tag} - {}", o.detail);
        if !o.passed && !known {
            unexpected += 1;
        }
    }
    let passed = results.iter().filter(|r| r.1.passed).count();
    println!("acceptance: {passed}/{} criteria pass, {unexpected} unexpected failures", results.len());
    if unexpected > 0 {
        std::process::exit(1);
    }
}
