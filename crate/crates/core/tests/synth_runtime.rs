use std::collections::BTreeMap;

use ratsynth::algebra::poly::{cst, var};
use ratsynth::algebra::rat::{int, rat};
use ratsynth::algebra::{Assignment, Poly, Rat, Var};
use ratsynth::formula::{normalize, Formula, Rel, Spec};
use ratsynth::qe::Engine;
use ratsynth::realroots::{decide_exists_real, signed_rationals};
use ratsynth::runtime::{run_program, run_single, verify_output, RunMode, RunOptions, RuntimeError};
use ratsynth::synth::{
    rsolve, synth_modenum, synth_multi, synth_single, Completeness, ProgIR, RsolveOutcome, RsolveState,
    SynthConfig,
};

fn v(n: &str) -> Var {
    Var::new(n)
}

fn sq(p: &Poly) -> Poly {
    p * p
}

fn x_is(r: Rat) -> Assignment {
    [(v("x"), r)].into_iter().collect()
}

fn circle() -> Spec {
    let s = &sq(&var("x")) + &sq(&var("y"));
    let f = Formula::and([
        Formula::atom(&s - &cst(rat(9, 10)), Rel::Ge),
        Formula::atom(&s - &cst(int(1)), Rel::Le),
    ]);
    Spec::new(f, vec![v("x")], vec![v("y")]).unwrap()
}

fn ellipsoid() -> Spec {
    let e = &(&(&sq(&var("x")) + &sq(&var("y")).scale(&rat(1, 9))) + &sq(&var("z")).scale(&rat(1, 16))) - &cst(int(1));
    let g = &(&(&(&sq(&var("x")).scale(&rat(-1, 9)) - &sq(&var("y")).scale(&rat(1, 16))) - &sq(&var("z")))
        + &var("z").scale(&int(4)))
        - &cst(int(2));
    let f = Formula::and([Formula::atom(-e, Rel::Ge), Formula::atom(-g, Rel::Gt)]);
    Spec::new(f, vec![v("x")], vec![v("y"), v("z")]).unwrap()
}

fn replay_cfg() -> SynthConfig {
    let m = |x: Rat, y: Rat, z: Rat| -> BTreeMap<Var, Rat> {
        [(v("x"), x), (v("y"), y), (v("z"), z)].into_iter().collect()
    };
    SynthConfig {
        replay: vec![m(rat(1, 8), rat(1, 2), int(-3)), m(rat(-127, 128), int(0), rat(1, 8))],
        ..SynthConfig::default()
    }
}

fn grid(n: i64, lo: i64, hi: i64) -> Vec<Rat> {
    (0..=n).map(|i| Rat::from_integer(lo.into()) + rat((hi - lo) * i, n)).collect()
}

#[test]
fn circle_single_branch() {
    let (ir, rep) = synth_multi(&circle(), &SynthConfig::default());
    assert_eq!(ir.branches.len(), 1);
    assert_eq!(rep.completeness, Completeness::Complete);
    let opts = RunOptions::default();
    let r = run_program(&ir, &x_is(int(1)), &opts).unwrap();
    assert_eq!(r.outcome.unwrap()[&v("y")], int(0));
    assert!(run_program(&ir, &x_is(int(2)), &opts).unwrap().outcome.is_none());
    let half = run_program(&ir, &x_is(rat(1, 2)), &opts).unwrap().outcome.unwrap();
    let a = &half[&v("y")];
    let a2 = a * a;
    assert!(a2 > rat(13, 20) && a2 <= rat(3, 4));
}

#[test]
fn single_output_program_fields() {
    let y = v("y");
    let p = synth_single(&circle().formula, &y, &Default::default());
    assert_eq!(p.nonstrict.len(), 2);
    let psi = p.psi.clone().unwrap();
    for s in signed_rationals(200) {
        assert_eq!(psi.eval(&x_is(s.clone())).unwrap(), &s * &s < int(1));
    }
    // y >= x
    let lin = Formula::atom(&var("y") - &var("x"), Rel::Ge);
    let p = synth_single(&lin, &y, &Default::default());
    assert_eq!(p.nonstrict, vec![(&var("y") - &var("x")).normalize_up_to_constant()]);
    assert_eq!(p.psi, Some(Formula::True));
    // y^2 <= -1 - x^2
    let inf = Formula::atom(&(&sq(&var("y")) + &sq(&var("x"))) + &cst(int(1)), Rel::Le);
    let p = synth_single(&inf, &y, &Default::default());
    assert_eq!(p.psi, Some(Formula::False));
}

#[test]
fn rsolve_examples() {
    let spec = circle();
    let cfg = SynthConfig::default();
    let mut st = RsolveState::new(&cfg);
    let phi = normalize(&spec.formula);
    match rsolve(&phi, &spec.inputs, &spec.outputs, &mut st, None) {
        RsolveOutcome::Model(m) => assert!(phi.eval(&m.values).unwrap()),
        other => panic!("{other:?}"),
    }
    let contra = Formula::and([Formula::atom(var("x"), Rel::Gt), Formula::atom(var("x"), Rel::Lt)]);
    let mut st = RsolveState::new(&cfg);
    assert_eq!(rsolve(&contra, &[v("x")], &[v("y")], &mut st, None), RsolveOutcome::ProvedUnsat);
    let e = ellipsoid();
    let mut st = RsolveState::new(&replay_cfg());
    let RsolveOutcome::Model(m) = rsolve(&normalize(&e.formula), &e.inputs, &e.outputs, &mut st, None) else {
        panic!()
    };
    assert_eq!(m.values[&v("x")], rat(1, 8));
    assert_eq!(m.values[&v("y")], rat(1, 2));
    assert_eq!(m.values[&v("z")], int(-3));
}

#[test]
fn ellipsoid_trace() {
    let (ir, rep) = synth_multi(&ellipsoid(), &replay_cfg());
    assert_eq!(rep.completeness, Completeness::Complete, "{}", rep.to_json());
    assert_eq!(ir.branches.len(), 4);
    let x2 = sq(&var("x"));
    let want = [
        Formula::atom(&x2.scale(&int(16)) - &cst(int(7)), Rel::Le),
        Formula::atom(&x2.scale(&int(36)) - &cst(int(35)), Rel::Le),
        Formula::atom(&x2.scale(&int(1024)) - &cst(int(1023)), Rel::Le),
        Formula::and([
            Formula::atom(&var("x") + &cst(int(1)), Rel::Ge),
            Formula::atom(&var("x") - &cst(int(1)), Rel::Le),
        ]),
    ];
    for s in grid(400, -2, 2) {
        let a = x_is(s);
        for (b, w) in ir.branches.iter().zip(&want) {
            assert!(b.guard_exact);
            assert_eq!(b.guard.eval(&a).unwrap(), w.eval(&a).unwrap());
        }
    }
    let opts = RunOptions::default();
    let r = run_program(&ir, &x_is(rat(1, 8)), &opts).unwrap();
    let out = r.outcome.unwrap();
    assert_eq!(out[&v("z")], int(-3));
    assert!(verify_output(&ir.spec, &x_is(rat(1, 8)), &out));
    assert!(run_program(&ir, &x_is(int(3)), &opts).unwrap().outcome.is_none());
}

#[test]
fn guard_and_fallthrough_agree_on_soundness() {
    let (mut ir, _) = synth_multi(&ellipsoid(), &replay_cfg());
    let opts = RunOptions::default();
    for s in signed_rationals(150) {
        let a = x_is(s);
        ir.mode = RunMode::Guard;
        let g = run_program(&ir, &a, &opts).unwrap().outcome;
        ir.mode = RunMode::Fallthrough;
        let f = run_program(&ir, &a, &opts).unwrap().outcome;
        if g.is_some() {
            assert!(f.is_some());
        }
        for o in [g, f].into_iter().flatten() {
            assert!(verify_output(&ir.spec, &a, &o));
        }
    }
}

#[test]
fn ir_round_trip_is_bit_exact() {
    let (ir, rep) = synth_multi(&ellipsoid(), &replay_cfg());
    let text = ir.to_json();
    let back = ProgIR::from_json(&text).unwrap();
    assert_eq!(back, ir);
    assert_eq!(back.to_json(), text);
    let (ir2, rep2) = synth_multi(&ellipsoid(), &replay_cfg());
    assert_eq!(ir2.to_json(), text);
    assert_eq!(rep2.to_json(), rep.to_json());
}

#[test]
fn unsat_spec_gives_empty_program() {
    let f = Formula::and([Formula::atom(&sq(&var("y")) + &sq(&var("z")), Rel::Lt), Formula::atom(var("x"), Rel::Gt)]);
    let spec = Spec::new(f, vec![v("x")], vec![v("y"), v("z")]).unwrap();
    let (ir, rep) = synth_multi(&spec, &SynthConfig::default());
    assert!(ir.branches.is_empty());
    assert_eq!(rep.completeness, Completeness::Complete);
    assert!(run_program(&ir, &x_is(int(1)), &RunOptions::default()).unwrap().outcome.is_none());
    let single = Spec::new(Formula::atom(&sq(&var("y")) + &cst(int(1)), Rel::Le), vec![v("x")], vec![v("y")]).unwrap();
    let (ir, rep) = synth_multi(&single, &SynthConfig::default());
    assert!(ir.branches.is_empty());
    assert_eq!(rep.completeness, Completeness::Complete);
}

#[test]
fn inexact_qe_is_flagged() {
    // three inputs, quartic in the output
    let p = &(&(&sq(&sq(&var("y"))) - &(&var("a") * &var("b"))) - &var("c")) - &var("z");
    let f = Formula::and([Formula::atom(p, Rel::Le), Formula::atom(&var("z") - &cst(int(1)), Rel::Le)]);
    let spec = Spec::new(f, vec![v("a"), v("b"), v("c")], vec![v("y"), v("z")]).unwrap();
    let cfg = SynthConfig { iteration_budget: 3, ..SynthConfig::default() };
    let (ir, rep) = synth_multi(&spec, &cfg);
    assert!(ir.branches.iter().any(|b| !b.guard_exact));
    assert!(rep.guards.iter().any(|g| !g.exact && g.engine == Engine::None));
    assert_eq!(ir.mode, RunMode::Fallthrough);
    assert_ne!(rep.completeness, Completeness::Complete);
    let a: Assignment = [(v("a"), int(1)), (v("b"), int(2)), (v("c"), int(3))].into_iter().collect();
    if let Some(o) = run_program(&ir, &a, &RunOptions::default()).unwrap().outcome {
        assert!(verify_output(&ir.spec, &a, &o));
    }
}

#[test]
fn modenum_guards_are_points() {
    let m: BTreeMap<Var, Rat> = [(v("x"), int(0)), (v("y"), int(1))].into_iter().collect();
    let cfg = SynthConfig { iteration_budget: 1, replay: vec![m], ..SynthConfig::default() };
    let (ir, rep) = synth_modenum(&circle(), &cfg);
    assert_eq!(ir.branches.len(), 1);
    assert_eq!(rep.completeness, Completeness::BudgetExhausted);
    let samples = grid(2000, -1, 1);
    let hits: Vec<&Rat> = samples.iter().filter(|s| ir.branches[0].guard.eval(&x_is((*s).clone())).unwrap()).collect();
    assert_eq!(hits, vec![&int(0)]);
    assert_eq!(ir.branches[0].fixed[&v("y")], int(1));
    // y = x as a pair of inequalities never terminates
    let eq = Formula::and([
        Formula::atom(&var("y") - &var("x"), Rel::Le),
        Formula::atom(&var("y") - &var("x"), Rel::Ge),
    ]);
    let spec = Spec::new(eq, vec![v("x")], vec![v("y")]).unwrap();
    let (_, rep) = synth_modenum(&spec, &SynthConfig { iteration_budget: 4, ..SynthConfig::default() });
    assert_eq!(rep.completeness, Completeness::BudgetExhausted);
    assert_eq!(rep.iterations, 4);
}

#[test]
fn degenerate_substitution_repair() {
    // x*y >= 0 and y^2 <= 1 + x: at x = 0 the first atom vanishes identically
    let f = Formula::and([
        Formula::atom(&var("x") * &var("y"), Rel::Ge),
        Formula::atom(&(&sq(&var("y")) - &var("x")) - &cst(int(1)), Rel::Lt),
    ]);
    let p = synth_single(&f, &v("y"), &Default::default());
    let (val, _) = run_single(&p, &x_is(int(0)), &RunOptions::default()).unwrap();
    let y = val.expect("a witness exists at x = 0");
    assert!(&y * &y < int(1));
}

#[test]
fn progress_and_completeness_on_strict_spec() {
    // strict two-output annulus slice: 1 < x^2 + y^2 + z^2 < 4, y > z
    let s = &(&sq(&var("x")) + &sq(&var("y"))) + &sq(&var("z"));
    let f = Formula::and([
        Formula::atom(&s - &cst(int(1)), Rel::Gt),
        Formula::atom(&s - &cst(int(4)), Rel::Lt),
        Formula::atom(&var("y") - &var("z"), Rel::Gt),
    ]);
    let spec = Spec::new(f.clone(), vec![v("x")], vec![v("y"), v("z")]).unwrap();
    let (ir, rep) = synth_multi(&spec, &SynthConfig::default());
    assert_eq!(rep.completeness, Completeness::Complete);
    for (k, m) in rep.models.iter().enumerate().skip(1) {
        for g in rep.guards.iter().filter(|g| g.iteration <= k && g.exact) {
            assert!(!g.guard.eval(&m.values).unwrap());
        }
    }
    let opts = RunOptions::default();
    for s in signed_rationals(300) {
        let a = x_is(s.clone());
        let out = run_program(&ir, &a, &opts).unwrap().outcome;
        let fx = normalize(&f.substitute(&a));
        // real solvability in (y, z): some rational z sample plus exact y decision
        let exists = signed_rationals(60).iter().any(|z| {
            let g = fx.substitute(&[(v("z"), z.clone())].into_iter().collect());
            decide_exists_real(&g, &v("y")).unwrap()
        });
        if exists {
            assert!(out.is_some(), "x = {s}");
        }
    }
}

#[test]
fn missing_input_is_an_error() {
    let (ir, _) = synth_multi(&circle(), &SynthConfig::default());
    let e = run_program(&ir, &Assignment::new(), &RunOptions::default());
    assert!(matches!(e, Err(RuntimeError::InputArity(_))));
}

#[test]
fn corrupted_branch_fails_verification() {
    let (mut ir, _) = synth_modenum(&circle(), &SynthConfig { iteration_budget: 1, ..SynthConfig::default() });
    ir.branches[0].guard = Formula::True;
    let e = run_program(&ir, &x_is(int(5)), &RunOptions::default());
    assert!(matches!(e, Err(RuntimeError::VerificationFailure { branch: 0 })));
}
