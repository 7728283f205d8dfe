//! Deterministic generator of geometric synthesis problems.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::poly::{cst, var};
use crate::algebra::rat::{int, rat};
use crate::algebra::{Poly, Var};
use crate::formula::{Formula, Rel};
use crate::smtlib::{print_script, Sidecar};

pub const CIRCLE: &str = "\
(set-logic QF_NRA)
(declare-const x Real)
(declare-const y Real)
(assert (<= 0.9 (+ (* x x) (* y y))))
(assert (<= (+ (* x x) (* y y)) 1))
(check-sat)
";

pub const ELLIPSOID: &str = "\
(set-logic QF_NRA)
(declare-const x Real)
(declare-const y Real)
(declare-const z Real)
(assert (>= 0 (- (+ (* x x) (/ (* y y) 9) (/ (* z z) 16)) 1)))
(assert (> 0 (- (+ (- (/ (* x x) 9)) (- (/ (* y y) 16)) (- (* z z)) (* 4 z)) 2)))
(check-sat)
";

pub struct Generated {
    pub name: String,
    pub script: String,
    pub sidecar: Sidecar,
}

fn side(ins: &[&str], outs: &[&str]) -> Sidecar {
    Sidecar {
        inputs: ins.iter().map(|s| s.to_string()).collect(),
        outputs: outs.iter().map(|s| s.to_string()).collect(),
    }
}

fn sq(p: &Poly) -> Poly {
    p * p
}

fn shifted(name: &str, c: i64) -> Poly {
    &var(name) - &cst(int(c))
}

fn script(f: &Formula, names: &[&str]) -> String {
    let vars: Vec<Var> = names.iter().map(|n| Var::new(n)).collect();
    print_script(f, &vars, false)
}

const DEGREES: [u32; 3] = [100, 20, 50];

fn family(i: usize, rng: &mut ChaCha8Rng) -> Generated {
    let kind = i % 6;
    let (name, f, names, io) = match kind {
        0 => {
            let (a, b) = (rng.gen_range(-3..=3), rng.gen_range(-3..=3));
            let r1 = rng.gen_range(1..=3);
            let r2 = r1 + rng.gen_range(1..=2);
            let d = &sq(&shifted("x", a)) + &sq(&shifted("y", b));
            let f = Formula::and([
                Formula::atom(&d - &cst(int(r1 * r1)), Rel::Ge),
                Formula::atom(&d - &cst(int(r2 * r2)), Rel::Le),
            ]);
            ("annulus", f, vec!["x", "y"], side(&["x"], &["y"]))
        }
        1 => {
            let (a, c) = (rng.gen_range(-2..=2), rng.gen_range(-2..=2));
            let r = rng.gen_range(2..=4);
            let s = &(&sq(&shifted("x", a)) + &sq(&var("y"))) + &sq(&shifted("z", c));
            let f = Formula::atom(&s - &cst(int(r * r)), Rel::Le);
            ("sphere", f, vec!["x", "y", "z"], side(&["x"], &["y", "z"]))
        }
        2 => {
            let (a, c) = (rng.gen_range(-3..=3), rng.gen_range(-2..=2));
            let top = c + rng.gen_range(1..=9);
            let f = Formula::and([
                Formula::atom(&var("y") - &(&sq(&shifted("x", a)) + &cst(int(c))), Rel::Ge),
                Formula::atom(&var("y") - &cst(int(top)), Rel::Le),
            ]);
            ("parabola", f, vec!["x", "y"], side(&["x"], &["y"]))
        }
        3 => {
            let k = rng.gen_range(1..=4);
            let m = rng.gen_range(1..=5);
            let f = Formula::and([
                Formula::atom(&(&var("x") * &var("y")) - &cst(int(k)), Rel::Ge),
                Formula::atom(&sq(&var("y")) - &cst(int(m * m)), Rel::Lt),
            ]);
            ("hyperbola", f, vec!["x", "y"], side(&["x"], &["y"]))
        }
        4 => {
            let d = DEGREES[(i / 6) % DEGREES.len()];
            let f = Formula::and([
                Formula::atom(&(&var("y").pow(d) + &sq(&var("x"))) - &cst(int(1)), Rel::Le),
                Formula::atom(var("y"), Rel::Gt),
            ]);
            ("highdeg", f, vec!["x", "y"], side(&["x"], &["y"]))
        }
        _ => {
            let r = rng.gen_range(2..=4);
            let lo = rng.gen_range(0..=1);
            let s = &(&sq(&var("x1")) + &sq(&var("x2"))) + &sq(&var("y"));
            let f = Formula::and([
                Formula::atom(&s - &cst(int(r * r)), Rel::Le),
                Formula::atom(&var("y") - &cst(rat(lo, 2)), Rel::Ge),
            ]);
            ("ball", f, vec!["x1", "x2", "y"], side(&["x1", "x2"], &["y"]))
        }
    };
    Generated { name: format!("geo_{i:03}_{name}"), script: script(&f, &names), sidecar: io }
}

/// The two fixed examples followed by `count` seeded instances.
pub fn generate(count: usize, seed: u64) -> Vec<Generated> {
    let mut out = vec![
        Generated { name: "circle".into(), script: CIRCLE.into(), sidecar: side(&["x"], &["y"]) },
        Generated { name: "ellipsoid".into(), script: ELLIPSOID.into(), sidecar: side(&["x"], &["y", "z"]) },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        out.push(family(i, &mut rng));
    }
    out
}

pub fn cmd_gen_geometric(dir: &Path, count: usize, seed: u64) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut paths = Vec::new();
    for g in generate(count, seed) {
        let p = dir.join(format!("{}.smt2", g.name));
        std::fs::write(&p, &g.script)?;
        std::fs::write(p.with_extension("json"), serde_json::to_string(&g.sidecar)? + "\n")?;
        paths.push(p);
    }
    Ok(paths)
}
