//! Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polyderive::algebras::{check_homomorphism, FiniteAlgebra, Label};
use polyderive::clones::{eval_benabou, eval_hall, CloneEnv, HallSymbol};
use polyderive::hallbenabou::{
    benabou_counit, benabou_spec, benabou_unit, bop_model, f_bh, f_hb, hall_spec, hall_submodel, hop_model, verify_equivalence,
    FreeExtension,
};
use polyderive::kernel::{Signature, Sort, SortedSet, Word};
use polyderive::morphisms::{check_translation_soundness, satisfaction_condition, Verdict};
use polyderive::random;
use polyderive::speclang::{SpecEntry, Workspace};
use polyderive::terms::{Equation, Specification, Term, TermFamily};
use polyderive::transformations::{
    check_transformation_mod, check_transformation_strict, horizontal_compose, horizontal_compose_both, identity_transformation,
    vertical_compose, Transformation,
};

const SEED: u64 = 0x5eed;

const STONE: &str = include_str!("../fixtures/stone.spec");
const HIGMAN_NEUMANN: &str = include_str!("../fixtures/higman_neumann.spec");
const GODEL: &str = include_str!("../fixtures/godel.spec");
const DIRECT_POWER: &str = include_str!("../fixtures/direct_power.spec");

type Outcome = Result<String, String>;

fn s() -> Sort {
    Sort::new("s").unwrap()
}

fn boolean_ring() -> Signature {
    let ws = Workspace::parse(STONE).unwrap();
    ws.signature("BR").unwrap().clone()
}

fn two_element() -> IndexMap<Sort, Vec<Label>> {
    let mut m = IndexMap::new();
    m.insert(s(), vec![Label::from("0"), Label::from("1")]);
    m
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

/// Random environment for the clone variables of `ctx`: terms of depth at most 2.
fn random_env(rng: &mut ChaCha8Rng, sig: &Signature, ctx: &SortedSet, hall: bool) -> CloneEnv {
    let families = ctx
        .vars()
        .iter()
        .map(|v| {
            let (dom, cod) = if hall {
                let (w, t) = v.sort.as_hall().unwrap();
                (w.clone(), Word::singleton(t.clone()))
            } else {
                let (u, w) = v.sort.as_benabou().unwrap();
                (u.clone(), w.clone())
            };
            random::family(rng, sig, &dom, &cod, 2).expect("constants exist")
        })
        .collect();
    CloneEnv::new(families)
}

fn clone_suite(spec: &Specification, hall: bool, envs: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let sig = boolean_ring();
    let mut checked = 0usize;
    for (name, eq) in &spec.equations {
        for _ in 0..envs {
            let env = random_env(rng, &sig, eq.context(), hall);
            let (l, r) = (eq.lhs().term(0).map_err(e)?, eq.rhs().term(0).map_err(e)?);
            let (a, b) = if hall {
                (eval_hall(&l, &env).map_err(e)?, eval_hall(&r, &env).map_err(e)?)
            } else {
                (eval_benabou(&l, &env).map_err(e)?, eval_benabou(&r, &env).map_err(e)?)
            };
            ensure(a == b, || format!("{name}: {a} != {b}"))?;
            checked += 1;
        }
    }
    Ok(format!("{} equations, {checked} evaluations", spec.equations.len()))
}

fn ac1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    clone_suite(&hall_spec(&[s()], 3).map_err(e)?, true, 100, &mut rng)
}

fn ac2() -> Outcome {
    let spec = hall_spec(&[s()], 2).map_err(e)?;
    let model = hop_model(&two_element(), 2).map_err(e)?;
    if let Some(bad) = model.algebra.first_violation(&spec.equations).map_err(e)? {
        return Err(format!("{bad} fails"));
    }
    Ok(format!("{} equations over {} rows", spec.equations.len(), model.algebra.total_rows()))
}

fn ac3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let free = clone_suite(&benabou_spec(&[s()], 3).map_err(e)?, false, 100, &mut rng)?;
    let spec = benabou_spec(&[s()], 2).map_err(e)?;
    let model = bop_model(&two_element(), 2).map_err(e)?;
    if let Some(bad) = model.algebra.first_violation(&spec.equations).map_err(e)? {
        return Err(format!("{bad} fails in bop"));
    }
    Ok(format!("terms: {free}; bop: {} equations", spec.equations.len()))
}

fn ac4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let model = hop_model(&two_element(), 2).map_err(e)?;
    let a = &model.algebra;
    let mut inputs = 0;
    for _ in 0..20 {
        let sig = random::small_signature(&mut rng, &[s()], 3, 2);
        let mut f = IndexMap::new();
        for op in sig.ops() {
            let n = a.carrier_size(&Sort::hall(op.arity.clone(), op.coarity.clone())).map_err(e)?;
            f.insert(op.name.clone(), rng.gen_range(0..n as u32));
        }
        let ext = FreeExtension::new(&model, &sig, f.clone()).map_err(e)?;
        for op in sig.ops() {
            let ctx = SortedSet::canonical(&op.arity);
            let vars = (0..op.arity.len()).map(|i| Term::var(&ctx, i)).collect::<Result<Vec<_>, _>>().map_err(e)?;
            let h = Term::app(&ctx, op, vars).map_err(e)?;
            ensure(ext.extend(&h).map_err(e)? == f[&op.name], || format!("f̂(h({})) != f({})", op.name, op.name))?;
        }
        let mut done = 0;
        while done < 200 {
            let u = random::word(&mut rng, &[s()], 0, 2);
            let w = random::word(&mut rng, &[s()], 0, 2);
            let Some(p) = random::term(&mut rng, &sig, &w, &s(), 2) else { continue };
            let Some(qs) = w.iter().map(|t| random::term(&mut rng, &sig, &u, t, 2)).collect::<Option<Vec<_>>>() else { continue };
            let fam = TermFamily::from_terms(u.clone(), qs.clone()).map_err(e)?;
            let composite = polyderive::terms::substitute(&p, &fam).map_err(e)?;
            let mut args = vec![ext.extend(&p).map_err(e)?];
            for q in &qs {
                args.push(ext.extend(q).map_err(e)?);
            }
            let xi = HallSymbol::Substitute { u: u.clone(), w: w.clone(), s: s() }.name();
            let rhs = a.apply(&xi, &args).map_err(e)?;
            ensure(ext.extend(&composite).map_err(e)? == rhs, || format!("f̂ is not a homomorphism at {p} with {fam}"))?;
            for i in 0..w.len() {
                let v = Term::var(&SortedSet::canonical(&w), i).map_err(e)?;
                let pi = a.apply(&HallSymbol::Project { word: w.clone(), index: i }.name(), &[]).map_err(e)?;
                ensure(ext.extend(&v).map_err(e)? == pi, || "projection not preserved".into())?;
            }
            done += 1;
            inputs += 1;
        }
    }
    Ok(format!("20 signatures, {inputs} clone inputs"))
}

fn ac5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let a = hop_model(&two_element(), 2).map_err(e)?;
    let round = f_bh(&f_hb(&a).map_err(e)?).map_err(e)?;
    ensure(round.algebra.same_tables(&a.algebra), || "f_bh(f_hb(hop)) differs".into())?;
    let sorts: Vec<Sort> = a.algebra.signature().sorts().iter().cloned().collect();
    let gens: Vec<(Sort, u32)> = (0..2)
        .map(|_| {
            let t = sorts.choose(&mut rng).unwrap().clone();
            let n = a.algebra.carrier_size(&t).unwrap() as u32;
            (t, rng.gen_range(0..n))
        })
        .collect();
    let sub = hall_submodel(&a, &gens).map_err(e)?;
    let sub_round = f_bh(&f_hb(&sub).map_err(e)?).map_err(e)?;
    ensure(sub_round.algebra.same_tables(&sub.algebra), || "f_bh(f_hb(sub)) differs".into())?;
    let b = bop_model(&two_element(), 2).map_err(e)?;
    let (f, g) = (benabou_unit(&b).map_err(e)?, benabou_counit(&b).map_err(e)?);
    let fb = f_hb(&f_bh(&b).map_err(e)?).map_err(e)?;
    ensure(check_homomorphism(&f, &b.algebra, &fb.algebra).map_err(e)?, || "f is not a homomorphism".into())?;
    for (t, fx) in &f {
        let gx = &g[t];
        ensure(fx.iter().enumerate().all(|(x, &y)| gx[y as usize] == x as u32), || format!("g∘f != 1 at {t}"))?;
        ensure(gx.iter().enumerate().all(|(y, &x)| fx[x as usize] == y as u32), || format!("f∘g != 1 at {t}"))?;
    }
    let sub_sizes: usize = sub.algebra.signature().sorts().iter().map(|t| sub.algebra.carrier_size(t).unwrap()).sum();
    Ok(format!("hop and a submodel with {sub_sizes} elements; unit and counit inverse on {} sorts", f.len()))
}

fn ac6() -> Outcome {
    let mut out = Vec::new();
    for sorts in [vec![s()], vec![s(), Sort::new("t").unwrap()]] {
        let r = verify_equivalence(&sorts, 3).map_err(e)?;
        ensure(r.holds(), || format!("{r:?}"))?;
        out.push(format!("|S|={}: {}+{} equations", sorts.len(), r.hall_equations, r.benabou_equations));
    }
    Ok(out.join("; "))
}

struct Instance {
    d: polyderive::morphisms::Polyderivator,
    b: FiniteAlgebra,
    eq: Equation,
}

fn instances(n: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let mut out = Vec::new();
    while out.len() < n {
        let src = { let n = rng.gen_range(1..=2); random::signature(&mut rng, n, 3, 2, "a") };
        let tgt = { let n = rng.gen_range(1..=2); random::signature(&mut rng, n, 3, 2, "b") };
        let Some(d) = random::polyderivator(&mut rng, &src, &tgt, 0, 2, 2) else { continue };
        let b = random::algebra(&mut rng, &tgt, 3);
        let Some(eq) = random::equation(&mut rng, &src, 3, 3) else { continue };
        out.push(Instance { d, b, eq });
    }
    out
}

fn ac7() -> Outcome {
    let mut holding = 0;
    for (k, i) in instances(200).iter().enumerate() {
        let (lhs, rhs) = satisfaction_condition(&i.d, &i.b, &i.eq).map_err(e)?;
        ensure(lhs == rhs, || format!("instance {k}: {lhs} vs {rhs}"))?;
        holding += lhs as usize;
    }
    Ok(format!("200 instances, {holding} satisfied"))
}

fn ac8() -> Outcome {
    for (k, i) in instances(200).iter().enumerate() {
        for side in [i.eq.lhs(), i.eq.rhs()] {
            let p = side.term(0).map_err(e)?;
            ensure(check_translation_soundness(&i.d, &i.b, &p).map_err(e)?, || format!("instance {k}: {p}"))?;
        }
    }
    Ok("200 instances, both sides".into())
}

fn law(name: &str, ok: bool) -> Result<(), String> {
    ensure(ok, || format!("{name} fails"))
}

fn strict_conjugates(rng: &mut ChaCha8Rng) -> (random::Conjugates, random::Conjugates) {
    loop {
        let a = { let n = rng.gen_range(1..=2); random::signature(rng, n, 2, 2, "a") };
        let b = { let n = rng.gen_range(1..=2); random::signature(rng, n, 2, 2, "b") };
        let c = { let n = rng.gen_range(1..=2); random::signature(rng, n, 2, 2, "c") };
        let (Some(d), Some(h)) = (random::polyderivator(rng, &a, &b, 1, 2, 1), random::polyderivator(rng, &b, &c, 1, 2, 1)) else {
            continue;
        };
        return (random::Conjugates::new(rng, d, 1), random::Conjugates::new(rng, h, 1));
    }
}

fn two_cell_laws(xi: &Transformation, xi2: &Transformation, xi3: &Transformation, chi: &Transformation, chi2: &Transformation) -> Result<(), String> {
    for t in [xi, xi2, xi3, chi, chi2] {
        law("strict naturality", check_transformation_strict(t).map_err(e)?)?;
    }
    let assoc_l = vertical_compose(&vertical_compose(xi3, xi2).map_err(e)?, xi).map_err(e)?;
    let assoc_r = vertical_compose(xi3, &vertical_compose(xi2, xi).map_err(e)?).map_err(e)?;
    law("associativity", assoc_l == assoc_r)?;
    law("left unit", vertical_compose(&identity_transformation(xi.target()), xi).map_err(e)? == *xi)?;
    law("right unit", vertical_compose(xi, &identity_transformation(xi.source())).map_err(e)? == *xi)?;
    let (h1, h2) = horizontal_compose_both(chi, xi).map_err(e)?;
    law("horizontal formulas", h1 == h2)?;
    let left = horizontal_compose(&vertical_compose(chi2, chi).map_err(e)?, &vertical_compose(xi2, xi).map_err(e)?).map_err(e)?;
    let right = vertical_compose(&horizontal_compose(chi2, xi2).map_err(e)?, &horizontal_compose(chi, xi).map_err(e)?).map_err(e)?;
    law("interchange", left == right)
}

fn ac9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let mut nontrivial = 0;
    for k in 0..100 {
        let (lower, upper) = strict_conjugates(&mut rng);
        if lower.tau.values().chain(upper.tau.values()).any(|t| !matches!(t, polyderive::terms::Tree::Var(_))) {
            nontrivial += 1;
        }
        let (k1, k2, k3) = (rng.gen_range(0..=1), rng.gen_range(0..=1), rng.gen_range(0..=1));
        let a = rng.gen_range(0..=1);
        let b = k1 + k2 + k3;
        let xi = lower.shift(a, b, k1).map_err(e)?;
        let xi2 = lower.shift(a + k1, b - k1, k2).map_err(e)?;
        let xi3 = lower.shift(a + k1 + k2, b - k1 - k2, k3).map_err(e)?;
        let (j1, j2) = (rng.gen_range(0..=1), rng.gen_range(0..=1));
        let chi = upper.shift(0, j1 + j2, j1).map_err(e)?;
        let chi2 = upper.shift(j1, j2, j2).map_err(e)?;
        two_cell_laws(&xi, &xi2, &xi3, &chi, &chi2).map_err(|m| format!("conjugate instance {k}: {m}"))?;
    }
    for k in 0..100 {
        let sig = random::signature(&mut rng, 1, 3, 2, "f");
        let mut sel = |m: usize, n: usize| -> Vec<usize> { (0..n).map(|_| rng.gen_range(0..m)).collect() };
        let (m0, m1, m2, m3) = (3, 2, 2, 1);
        let s1 = sel(m0, m1);
        let s2 = sel(m1, m2);
        let s3 = sel(m2, m3);
        let (c0, c1, c2) = (2, 2, 1);
        let t1 = sel(c0, c1);
        let t2 = sel(c1, c2);
        let xi = random::selection(&sig, m0, &s1).map_err(e)?;
        let xi2 = random::selection(&sig, m1, &s2).map_err(e)?;
        let xi3 = random::selection(&sig, m2, &s3).map_err(e)?;
        let chi = random::selection(&sig, c0, &t1).map_err(e)?;
        let chi2 = random::selection(&sig, c1, &t2).map_err(e)?;
        two_cell_laws(&xi, &xi2, &xi3, &chi, &chi2).map_err(|m| format!("selection instance {k}: {m}"))?;
    }
    Ok(format!("100 conjugation instances ({nontrivial} with a non-variable τ) and 100 selection instances"))
}

fn ac10() -> Outcome {
    let hn = Workspace::parse(HIGMAN_NEUMANN).map_err(e)?;
    let groups = hn.algebras_over("GD");
    let sizes: Vec<usize> = groups.iter().map(|(_, g)| g.carrier_size(&s()).unwrap()).collect();
    ensure(groups.len() == 8 && sizes.iter().all(|&n| n <= 6), || format!("group list {sizes:?}"))?;
    let l = &hn.transformation("L").map_err(e)?.transformation;
    let v = check_transformation_mod(l, &hn.spec("HN").map_err(e)?.spec, &groups).map_err(e)?;
    ensure(v == Verdict::VerifiedOnModels(8), || format!("Higman–Neumann: {v}"))?;
    let (_, law) = hn.equation("composite_law").map_err(e)?;
    for (name, g) in &groups {
        ensure(g.satisfies(law).map_err(e)?, || format!("composite law fails in {name}"))?;
    }

    let stone = Workspace::parse(STONE).map_err(e)?;
    let rings: Vec<(&str, &FiniteAlgebra)> = ["z2", "z2xz2"].iter().map(|n| (*n, &stone.algebra(n).unwrap().algebra)).collect();
    let l = &stone.transformation("L").map_err(e)?.transformation;
    let v2 = check_transformation_mod(l, &stone.spec("BRing").map_err(e)?.spec, &rings).map_err(e)?;
    ensure(v2 == Verdict::VerifiedOnModels(2), || format!("Stone: {v2}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 10);
    let mut searched = 0;
    for k in 0..500 {
        let sig = { let n = rng.gen_range(1..=2); random::signature(&mut rng, n, 3, 2, "f") };
        let a = random::algebra(&mut rng, &sig, 3);
        let (src, tgt, f) = {
            let other = random::algebra(&mut rng, &sig, 3);
            match random::homomorphism(&mut rng, &other, &a, 20_000) {
                Ok(Some(f)) if k % 2 == 0 => {
                    searched += 1;
                    (other, a.clone(), f)
                }
                _ => {
                    let p = a.product(&other).map_err(e)?;
                    let f = random::first_projection(&a, &other).map_err(e)?;
                    (p, a.clone(), f)
                }
            }
        };
        ensure(check_homomorphism(&f, &src, &tgt).map_err(e)?, || format!("instance {k}: not a homomorphism"))?;
        let sorts: Vec<Sort> = sig.sorts().iter().cloned().collect();
        let ctx = random::word(&mut rng, &sorts, 0, 3);
        let target_sort = sorts.choose(&mut rng).unwrap().clone();
        let Some(p) = random::term(&mut rng, &sig, &ctx, &target_sort, 3) else { continue };
        for vals in random::valuations(&mut rng, &src, &ctx, 64).map_err(e)? {
            let direct = src.realize(&p, &vals).map_err(e)?;
            ensure(direct == src.extend_valuation(p.tree(), &vals).map_err(e)?, || format!("instance {k}: exchange law"))?;
            let mapped: Vec<u32> = ctx.iter().zip(&vals).map(|(t, &x)| f[t][x as usize]).collect();
            let rhs = tgt.realize(&p, &mapped).map_err(e)?;
            ensure(f[&target_sort][direct as usize] == rhs, || format!("instance {k}: homomorphism does not commute with {p}"))?;
        }
    }
    Ok(format!("{v} over groups of order ≤ 6; Stone {v2}; 500 triples ({searched} searched homomorphisms)"))
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_polyderive")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn ac11(start: Instant) -> Outcome {
    let mut docs: Vec<(&str, Workspace)> = Vec::new();
    for (name, src) in [("stone", STONE), ("higman_neumann", HIGMAN_NEUMANN), ("godel", GODEL), ("direct_power", DIRECT_POWER)] {
        docs.push((name, Workspace::parse(src).map_err(|err| format!("{name}: {err}"))?));
    }
    for (sig, name, spec) in [("HTer", "Hall", hall_spec(&[s()], 1).map_err(e)?), ("BTer", "Benabou", benabou_spec(&[s()], 1).map_err(e)?)] {
        let mut ws = Workspace::default();
        ws.signatures.insert(sig.into(), spec.signature.clone());
        ws.specs.insert(name.into(), SpecEntry { signature: sig.into(), spec });
        docs.push((name, ws));
    }
    ensure(Workspace::default().print().is_empty(), || "empty workspace prints text".into())?;
    for (name, ws) in &docs {
        let text = ws.print();
        let back = Workspace::parse(&text).map_err(|err| format!("{name} reparse: {err}"))?;
        ensure(&back == ws, || format!("{name}: parse(print(w)) != w"))?;
        ensure(back.print() == text, || format!("{name}: printing is not stable"))?;
    }

    let dir = std::env::temp_dir().join(format!("polyderive-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(e)?;
    let broken = dir.join("broken.spec");
    std::fs::write(&broken, "signature X { sort s; op f : s s s; }").map_err(e)?;
    let broken = broken.to_string_lossy().into_owned();
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/stone.spec");
    let cases: Vec<(Vec<&str>, i32, Option<&str>)> = vec![
        (
            vec!["check-transformation", "--file", fixture, "--xi", "L", "--from", "dcomp", "--to", "idB", "--models", "z2,z2xz2"],
            0,
            Some("VerifiedOnModels(2)"),
        ),
        (vec!["hall-benabou", "--sorts", "s", "--bound", "2", "verify"], 0, Some("equivalence: holds")),
        (vec!["satisfy", "--algebra", "z2", "--equation", "comm_add"], 0, Some("true")),
        (vec!["satisfy", "--algebra", "z2", "--equation", "neg_is_one_plus"], 1, None),
        (vec!["check", "--file", &broken], 2, None),
        (vec!["eval", "--algebra", "nope", "--term", "ring_or"], 2, None),
        (vec!["frobnicate"], 2, None),
    ];
    for (args, code, needle) in &cases {
        let (got, stdout) = cli(args);
        ensure(got == *code, || format!("`{}` exited {got}, expected {code}", args.join(" ")))?;
        if let Some(n) = needle {
            ensure(stdout.contains(n), || format!("`{}` printed {stdout:?}", args.join(" ")))?;
        }
    }
    std::fs::remove_dir_all(&dir).ok();
    let total = start.elapsed();
    ensure(total < Duration::from_secs(300), || format!("harness took {total:?}"))?;
    Ok(format!("{} documents round-trip; {} CLI cases; harness total {:.1}s", docs.len(), cases.len(), total.as_secs_f64()))
}

fn main() {
    let start = Instant::now();
    let criteria: Vec<(&str, &str, Option<u64>, Box<dyn Fn() -> Outcome>)> = vec![
        ("AC1", "Hall axioms in the term clone", Some(10), Box::new(ac1)),
        ("AC2", "Hall axioms in hop_model", Some(30), Box::new(ac2)),
        ("AC3", "Bénabou axioms in terms and bop_model", Some(30), Box::new(ac3)),
        ("AC4", "freeness of the term clone", None, Box::new(ac4)),
        ("AC5", "Hall/Bénabou round trips", None, Box::new(ac5)),
        ("AC6", "specification equivalence, bound 3", Some(60), Box::new(ac6)),
        ("AC7", "satisfaction condition", None, Box::new(ac7)),
        ("AC8", "translation soundness", None, Box::new(ac8)),
        ("AC9", "2-category laws", None, Box::new(ac9)),
        ("AC10", "worked examples and commutation", None, Box::new(ac10)),
        ("AC11", "speclang round trip and CLI", None, Box::new(move || ac11(start))),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let t = Instant::now();
        let outcome = run();
        let dt = t.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if dt > Duration::from_secs(l) => Err(format!("took {:.1}s, limit {l}s", dt.as_secs_f64())),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("{id} PASS {name} ({:.2}s): {detail}", dt.as_secs_f64()),
            Err(detail) => {
                failed += 1;
                println!("{id} FAIL {name} ({:.2}s): {detail}", dt.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
