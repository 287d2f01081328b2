//! Acceptance suite: one line per criterion, nonzero exit if any criterion fails.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sector_algebra::adams::{
    check_endpoint_preserving, cube_structure_map, cubical_chains, flow_profile, integrate_profile, morse_index, CubeMapKind,
};
use sector_algebra::bimodule::{diagonal_bimodule, hochschild_complex};
use sector_algebra::chains::{FreeComplex, HomologyProfile};
use sector_algebra::cli::run_args;
use sector_algebra::hocolim::{classical_hocolim, hocolim_with_mode, HocolimMode};
use sector_algebra::io::{parse_document, Document, Format, Ref, Registry, Report, Verdict};
use sector_algebra::lemmas::{
    directed_instances, seeded_instance, verify_lemma, zero_invariance_instance, Certificate, Generation, Instance, LemmaError, LemmaId,
    LemmaInput, LemmaOptions, LemmaReport,
};
use sector_algebra::library::{example_library, linear_category, random_directed_dg};
use sector_algebra::linalg::{smith_normal_form, IntMatrix};
use sector_algebra::simplicial::SimplicialSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

type Outcome = Result<Vec<String>, String>;

struct Criterion {
    id: usize,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn cli(args: &str) -> Result<Report, String> {
    let args: Vec<String> = args.split_whitespace().map(String::from).collect();
    run_args(&args, &corpus()).map(|(r, _)| r).map_err(|e| format!("{}: {e}", args.join(" ")))
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn exact_pass(r: &LemmaReport) -> Result<(), String> {
    ensure(r.passed && r.exact, format!("{} not an exact pass: {:?}", r.summary(), r.checks.iter().find(|c| !c.passed)))
}

fn lemma(id: LemmaId, inst: &Instance) -> Result<LemmaReport, String> {
    verify_lemma(id, LemmaInput::Instance(inst), LemmaOptions::default()).map_err(|e| format!("{} on {}: {e}", id, inst.label))
}

fn squares_to_zero(c: &FreeComplex) -> bool {
    (0..c.rank()).all(|g| c.apply_d(c.d_gen(g)).is_empty())
}

fn load(files: &[&str]) -> Result<Registry, String> {
    let mut reg = Registry::new();
    for f in files {
        let text = std::fs::read_to_string(corpus().join(f)).map_err(|e| format!("{f}: {e}"))?;
        reg.insert(parse_document(&text).map_err(|e| format!("{f}: {e}"))?).map_err(|e| e.to_string())?;
    }
    Ok(reg)
}

fn exact_chains() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..500 {
        let (r, c) = (rng.gen_range(1..=12), rng.gen_range(1..=12));
        let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        let m = IntMatrix::from_rows(&rows);
        let s = smith_normal_form(&m);
        ensure(s.u.mul(&m).mul(&s.v) == s.s_matrix(), format!("U M V != S on matrix {i}"))?;
        let divides = s.diag.windows(2).all(|w| (&w[1] % &w[0]) == BigInt::from(0));
        ensure(divides && s.diag.iter().all(|d| *d > BigInt::from(0)), format!("invariant factors of matrix {i} do not form a chain"))?;
    }
    let torus = load(&["torus.json"])?.simplicial(&Ref::Label("torus".into())).map_err(|e| e.to_string())?;
    let spaces = [
        ("S1", SimplicialSet::boundary_simplex(2), HomologyProfile::free(1, 1)),
        ("S2", SimplicialSet::boundary_simplex(3), HomologyProfile::free(2, 0)),
        ("T2", torus, HomologyProfile::free(2, 2)),
    ];
    let mut out = vec!["500 random matrices: U M V = S".to_string()];
    for (name, x, expected) in spaces {
        let h = x.chains().map_err(|e| e.to_string())?.homology();
        ensure(h == expected, format!("{name}: {h:?}"))?;
        out.push(format!("{name}: {h}"));
    }
    Ok(out)
}

fn identity_idempotent() -> Outcome {
    let mut n = 0;
    for (name, c) in example_library() {
        exact_pass(&lemma(LemmaId::IdentityIdempotent, &Instance::plain(&name, c, vec![]))?)?;
        n += 1;
    }
    for seed in 0..50u64 {
        let objects = 1 + (seed % 5) as usize;
        let c = random_directed_dg(seed, objects, 3);
        exact_pass(&lemma(LemmaId::IdentityIdempotent, &Instance::plain(&format!("random-{seed}"), c, vec![]))?)?;
    }
    Ok(vec![format!("{n} curated diagonals and 50 seeded directed dg categories: collapse cones acyclic, exact")])
}

fn annihilation_and_locality() -> Outcome {
    let mut a3 = Instance::plain("A3", linear_category(3), vec![1]);
    a3.local = vec![2];
    exact_pass(&lemma(LemmaId::QuotientAnnihilates, &a3)?)?;
    exact_pass(&lemma(LemmaId::LocalGood, &a3)?)?;
    for seed in 0..20 {
        let inst = seeded_instance(seed).map_err(|e| e.to_string())?;
        exact_pass(&lemma(LemmaId::QuotientAnnihilates, &inst)?)?;
        exact_pass(&lemma(LemmaId::LocalGood, &inst)?)?;
    }
    let unchecked = LemmaOptions { check_hypotheses: false, ..Default::default() };
    let mut false_member = Instance::plain("A3", linear_category(3), vec![0]);
    false_member.generated.push(Generation { object: 1, certificate: Certificate::Member });
    let mut false_local = Instance::plain("A3", linear_category(3), vec![1]);
    false_local.local = vec![0];
    for (id, inst) in [(LemmaId::QuotientAnnihilates, &false_member), (LemmaId::LocalGood, &false_local)] {
        let checked = verify_lemma(id, LemmaInput::Instance(inst), LemmaOptions::default());
        ensure(matches!(checked, Err(LemmaError::HypothesisUnmet(_))), format!("{id}: injected violation not caught"))?;
        let r = verify_lemma(id, LemmaInput::Instance(inst), unchecked).map_err(|e| e.to_string())?;
        ensure(!r.passed, format!("{id}: injected violation passed without hypothesis checks"))?;
    }
    Ok(vec![
        "A3 and 20 seeded instances: exact pass".into(),
        "injected violations: hypothesis unmet, and failing checks when forced".into(),
    ])
}

fn quotient_tensor_and_hochschild() -> Outcome {
    let instances = directed_instances();
    for inst in &instances {
        ensure(inst.category.n_objects() <= 4, format!("{} has too many objects", inst.label))?;
        for id in [LemmaId::QuotientTensor, LemmaId::HochschildQuotient] {
            exact_pass(&lemma(id, inst)?)?;
        }
    }
    Ok(vec![format!("{} directed instances: exact quasi-isomorphisms", instances.len())])
}

fn wrapped_colimit() -> Outcome {
    let r = cli("wrapped -i wrap.json -i wrap-system.json --scan 3")?;
    ensure(r.verdict == Verdict::Pass, format!("verdict {:?}", r.verdict))?;
    let at = r.results["stabilized_at"].as_u64().ok_or("no stabilization")?;
    ensure(at <= 3, format!("stabilized at {at}"))?;
    Ok(vec![
        format!("wrapped colimit {} = localization {}", r.results["wrapped_colimit"]["summary"], r.results["localized"]["summary"]),
        format!("truncated localization stabilizes at word length {at}"),
        r.render(Format::Json, false),
    ])
}

fn hochschild() -> Outcome {
    let a2 = Arc::new(linear_category(2));
    let hh = hochschild_complex(&diagonal_bimodule(&a2).map_err(|e| e.to_string())?, true, None, 0).map_err(|e| e.to_string())?;
    let h = hh.complex.homology();
    ensure(h == HomologyProfile::free(2, 0) && hh.finiteness.is_exact(), format!("HH(A2) = {h}"))?;
    let inst = zero_invariance_instance().map_err(|e| e.to_string())?;
    ensure(inst.category.n_objects() == 3, "invariance instance is not 3-object")?;
    exact_pass(&lemma(LemmaId::HochschildInvariance, &inst)?)?;
    let r = cli("hochschild -i a2.json")?;
    Ok(vec![format!("HH(A2) = {h}, exact"), format!("invariance on {}: exact", inst.label), r.render(Format::Json, false)])
}

fn hocolim() -> Outcome {
    let files = [
        "circle.json",
        "point.json",
        "circle-collapse.json",
        "interval.json",
        "span-cone.json",
        "cone-triangle.json",
        "cylinder.json",
        "collapse-cylinder.json",
        "cone-diagram.json",
        "cone-triangle-diagram.json",
    ];
    let reg = load(&files)?;
    let mut out = Vec::new();
    let mut final_checked = 0;
    let mut strict_checked = 0;
    for doc in reg.documents() {
        let Document::Diagram(d) = doc else { continue };
        let built = reg.diagram(&Ref::Label(d.label.clone())).map_err(|e| e.to_string())?;
        for mode in [HocolimMode::Direct, HocolimMode::Barycentric] {
            let h = hocolim_with_mode(&built.dg, mode).map_err(|e| e.to_string())?;
            ensure(squares_to_zero(&h.complex), format!("{}: d^2 != 0 in {mode:?} mode", d.label))?;
        }
        let h = hocolim_with_mode(&built.dg, HocolimMode::Direct).map_err(|e| e.to_string())?;
        let base = built.dg.base();
        let terminal = match &built.poset {
            Some(p) => p.terminal(),
            None => (0..base.count(0)).find(|v| base.name(0, *v) == "∗"),
        };
        if let Some(t) = terminal {
            let inc = h.vertex_inclusion(t).map_err(|e| e.to_string())?;
            ensure(
                inc.is_quasi_iso().map_err(|e| e.to_string())?,
                format!("{}: final vertex inclusion is not a quasi-isomorphism", d.label),
            )?;
            final_checked += 1;
        }
        if let Some(s) = &built.strict {
            let classical = classical_hocolim(s).map_err(|e| e.to_string())?;
            ensure(classical.homology() == h.complex.homology(), format!("{}: classical homology differs", d.label))?;
            if base.dim() == 1 && base.count(0) == 2 {
                ensure(classical.entries() == h.complex.entries(), format!("{}: mapping cylinder differs", d.label))?;
                ensure(h.complex.homology() == built.dg.complex(1).homology(), format!("{}: cylinder not the target", d.label))?;
            }
            strict_checked += 1;
        }
        out.push(format!("{}: rank {}, {}", d.label, h.complex.rank(), h.complex.homology()));
    }
    ensure(final_checked >= 2 && strict_checked >= 3, "too few diagrams checked")?;
    out.push(format!("{final_checked} cone diagrams: final vertex exact; {strict_checked} strict diagrams match the classical model"));
    Ok(out)
}

fn hypercover() -> Outcome {
    let good = cli("hypercover -i hexagon.json -i subsets-2.json -i circle-cover.json")?;
    ensure(good.verdict == Verdict::Pass, "circle cover rejected")?;
    let witness = good.results["witness"].as_array().ok_or("circle cover has no witness")?;
    ensure(!witness.is_empty(), "empty witness")?;
    let torus = cli("hypercover -i torus.json -i subsets-2.json -i torus-cover.json")?;
    ensure(torus.verdict == Verdict::Pass, "torus cover rejected")?;
    let shrunk = cli("hypercover -i hexagon.json -i subsets-2.json -i circle-cover-shrunk.json")?;
    ensure(shrunk.verdict == Verdict::Fail, "shrunk cover accepted")?;
    let unit = cli("hypercover --mode unit -i hexagon.json -i subsets-2.json -i circle-cover.json")?;
    ensure(unit.verdict == Verdict::Pass, "circle cover rejected in unit mode")?;
    Ok(vec![
        format!("circle: pass with a {}-term witness", witness.len()),
        "torus: pass".into(),
        "shrunk circle: fail".into(),
        good.render(Format::Text, false),
    ])
}

fn local_to_global() -> Outcome {
    let good = cli("local-to-global -i local-to-global.json")?;
    ensure(good.verdict == Verdict::Pass && good.results["conclusion"] == true, "toy inference not reproduced")?;
    let broken = cli("local-to-global -i local-to-global-broken.json")?;
    ensure(broken.verdict == Verdict::Undetermined && broken.results["conclusion"].is_null(), "broken hypothesis not refused")?;
    Ok(vec!["toy: conclusion drawn".into(), "broken local quasi-isomorphism: no conclusion".into(), good.render(Format::Json, false)])
}

fn monotone(len: usize, top: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0]];
    for _ in 1..len {
        out = out.into_iter().flat_map(|f| (*f.last().unwrap()..=top).map(move |x| [f.clone(), vec![x]].concat())).collect();
    }
    out.retain(|f| f[len - 1] == top);
    out
}

fn adams() -> Outcome {
    ensure(flow_profile(0.0) == 0.5, "f(0) != 0.5")?;
    let mut worst = 0.0f64;
    for i in 0..=80 {
        let x = -10.0 + 0.25 * i as f64;
        worst = worst.max((integrate_profile(x).map_err(|e| e.to_string())? - flow_profile(x)).abs());
    }
    ensure(worst < 1e-8, format!("ODE residual {worst:e}"))?;
    for n in 1..=5 {
        let rank = cubical_chains(n).map_err(|e| e.to_string())?.rank();
        ensure(rank == 3usize.pow(n as u32 - 1), format!("cubical rank {rank} for n = {n}"))?;
    }
    for n in 1..=3 {
        for i in 0..=n {
            let idx = morse_index(n, i, 1e-4).map_err(|e| e.to_string())?;
            ensure(idx == n - i, format!("Morse index {idx} at vertex {i} of the {n}-simplex"))?;
        }
    }
    let mut kinds = Vec::new();
    for n in 2..=5 {
        for k in 1..n {
            kinds.push(CubeMapKind::Face { k, n });
            kinds.push(CubeMapKind::Product { k, n });
        }
    }
    for r in 1..=4 {
        for q in 1..=4 {
            for f in monotone(r + 1, q) {
                if check_endpoint_preserving(&f).is_ok() {
                    kinds.push(CubeMapKind::Pushforward { f });
                }
            }
        }
    }
    for kind in &kinds {
        let m = cube_structure_map(kind).map_err(|e| format!("{kind:?}: {e}"))?;
        m.check_chain_map().map_err(|e| format!("{kind:?}: {e}"))?;
    }
    Ok(vec![
        "f(0) = 0.5".into(),
        format!("max ODE residual on [-10, 10] below 1e-8 ({} sample points)", 81),
        "cubical ranks 1, 3, 9, 27, 81".into(),
        "Morse index n - i for n <= 3".into(),
        format!("{} structure maps are exact chain maps", kinds.len()),
    ])
}

fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, name: "exact chains", budget: Some(Duration::from_secs(10)), run: exact_chains },
        Criterion { id: 2, name: "identity idempotent", budget: Some(Duration::from_secs(60)), run: identity_idempotent },
        Criterion { id: 3, name: "quotient annihilation and locality", budget: None, run: annihilation_and_locality },
        Criterion {
            id: 4,
            name: "quotient tensor and Hochschild quotient",
            budget: Some(Duration::from_secs(120)),
            run: quotient_tensor_and_hochschild,
        },
        Criterion { id: 5, name: "wrapped colimit", budget: None, run: wrapped_colimit },
        Criterion { id: 6, name: "Hochschild homology", budget: None, run: hochschild },
        Criterion { id: 7, name: "homotopy colimits", budget: None, run: hocolim },
        Criterion { id: 8, name: "hypercovers", budget: Some(Duration::from_secs(10)), run: hypercover },
        Criterion { id: 9, name: "local to global", budget: None, run: local_to_global },
        Criterion { id: 10, name: "Adams families", budget: Some(Duration::from_secs(5)), run: adams },
    ]
}

/// Runs every criterion once; the transcript excludes timings.
fn suite() -> (Vec<(usize, &'static str, bool, String, Duration)>, String) {
    let mut rows = Vec::new();
    let mut transcript = String::new();
    for c in criteria() {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (ok, detail) = match &outcome {
            Ok(lines) => (true, lines.first().cloned().unwrap_or_default()),
            Err(e) => (false, e.clone()),
        };
        let over = c.budget.is_some_and(|b| elapsed > b);
        let detail = if over { format!("{detail}; over budget of {:?}", c.budget.unwrap()) } else { detail };
        transcript.push_str(&format!("criterion {}\n", c.id));
        match outcome {
            Ok(lines) => lines.iter().for_each(|l| transcript.push_str(&format!("{l}\n"))),
            Err(e) => transcript.push_str(&format!("error: {e}\n")),
        }
        rows.push((c.id, c.name, ok && !over, detail, elapsed));
    }
    (rows, transcript)
}

fn main() {
    let (rows, first) = suite();
    let mut all = true;
    for (id, name, ok, detail, elapsed) in &rows {
        all &= ok;
        println!("criterion {id:>2} {} {name}: {detail} ({:.2} s)", if *ok { "PASS" } else { "FAIL" }, elapsed.as_secs_f64());
    }
    let start = Instant::now();
    let (_, second) = suite();
    let same = first == second;
    all &= same;
    println!(
        "criterion 11 {} determinism: {} ({:.2} s)",
        if same { "PASS" } else { "FAIL" },
        if same { format!("two full runs, {} identical bytes", first.len()) } else { "transcripts differ".into() },
        start.elapsed().as_secs_f64()
    );
    if !all {
        std::process::exit(1);
    }
}
