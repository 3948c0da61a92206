//! Acceptance suite: one PASS/FAIL line per criterion. All comparisons are
//! exact (dyadic arithmetic, zero tolerance); only the runtime bounds below
//! are numeric.

mod common;

use std::time::{Duration, Instant};

use common::*;
use isometrize::au::{au_distance, au_oracle, verify_sandwich, verify_star_ball_inclusions};
use isometrize::cover::{is_development, is_k_development, is_star_refinement, Cover, Development};
use isometrize::dyadic::{Dist, Dyadic};
use isometrize::examples;
use isometrize::gauge::{crevasse_partition, ExtGauge};
use isometrize::invariance::{
    default_targets, equiregularity_check, exhaustion_decomposition, is_invariant_cover, is_invariant_gauge, metrize,
    near_properness_check, near_properness_from_gauge, proper_metrize, saturate_cover, stone_star_refine,
};
use isometrize::space::{enumerate_group, orbit_quotient, regular, Bornology, GroupAction, SpaceInstance};
use isometrize::tunnels::{
    g_saturate_tunnels, is_invariant_tunnels, is_proper_tunnel_system, tunnel_distance, validate_tunnel_system,
    verify_tunnel_agreement, verify_tunnel_properness, TunnelSystem,
};
use isometrize::{PointSet, Status};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const ORACLE_INSTANCES: usize = 200;
const ORACLE_MAX_POINTS: usize = 8;
const ORACLE_MAX_MEMBERS: usize = 12;
const ORACLE_BUDGET: usize = 20_000_000;
const ORACLE_TIME: Duration = Duration::from_secs(30);
const SANDWICH_INSTANCES: usize = 200;
const NON_THREE_INSTANCES: usize = 100;
const SANDWICH_MAX_DEPTH: usize = 4;
const STAR_BALL_MAX_N: u32 = 3;
const AGREEMENT_INSTANCES: usize = 200;
const GRID_PER_QUADRANT: usize = 12;
const COVERING_MAX_N: u64 = 4;
const SATURATION_INSTANCES: usize = 100;
const REFINE_INSTANCES: usize = 100;
const EXHAUSTION_INSTANCES: usize = 50;
const COHERENCE_INSTANCES: usize = 200;
const EXAMPLES_TIME: Duration = Duration::from_secs(10);
const DEPTH: usize = 3;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Developments whose levels are valid and whose `𝒰*` stays small.
fn small_development(rng: &mut ChaCha8Rng, max_depth: usize) -> Development {
    let n = rng.gen_range(1..=ORACLE_MAX_POINTS);
    let levels = rng.gen_range(1..=max_depth);
    if rng.gen_bool(0.5) {
        star_development(rng, n, levels)
    } else {
        random_development(rng, n, levels, ORACLE_MAX_MEMBERS)
    }
}

fn members(dev: &Development) -> usize {
    let mut all: Vec<PointSet> = dev.levels().iter().flat_map(|c| c.iter()).collect();
    all.sort_by_key(|s| s.search_key());
    all.dedup();
    all.len()
}

fn c1_oracle() -> Outcome {
    let start = Instant::now();
    let (mut done, mut mismatches, mut seed) = (0, 0, 0u64);
    while done < ORACLE_INSTANCES && seed < 100 * ORACLE_INSTANCES as u64 {
        let mut r = rng(1_000_000 + seed);
        seed += 1;
        let dev = small_development(&mut r, 4);
        let m = members(&dev);
        if m > ORACLE_MAX_MEMBERS || is_development(&dev).is_fail() {
            continue;
        }
        let fast = au_distance(&dev).expect("valid development");
        let slow = au_oracle(&dev, m, ORACLE_BUDGET).expect("oracle budget");
        if fast != slow {
            mismatches += 1;
        }
        done += 1;
    }
    let t = start.elapsed();
    outcome(
        done >= ORACLE_INSTANCES && mismatches == 0 && t < ORACLE_TIME,
        format!("{done} instances, {mismatches} mismatches, {:.2}s (bound {}s)", t.as_secs_f64(), ORACLE_TIME.as_secs()),
    )
}

/// Seeded corpora of 3-developments and of developments that are not.
fn sandwich_corpus() -> (Vec<Development>, Vec<Development>) {
    let (mut three, mut other) = (Vec::new(), Vec::new());
    let mut seed = 0u64;
    while (three.len() < SANDWICH_INSTANCES || other.len() < NON_THREE_INSTANCES) && seed < 200_000 {
        let mut r = rng(2_000_000 + seed);
        seed += 1;
        let n = r.gen_range(1..=8);
        let depth = r.gen_range(1..=SANDWICH_MAX_DEPTH);
        let dev = if seed.is_multiple_of(2) { star_development(&mut r, n, depth) } else { random_development(&mut r, n, depth, 16) };
        if is_development(&dev).is_fail() {
            continue;
        }
        if is_k_development(&dev, 3).is_pass() {
            if three.len() < SANDWICH_INSTANCES {
                three.push(dev);
            }
        } else if other.len() < NON_THREE_INSTANCES {
            other.push(dev);
        }
    }
    (three, other)
}

fn c2_sandwich(three: &[Development], other: &[Development]) -> Outcome {
    let mut left = 0;
    let mut right = 0;
    for dev in three {
        let rep = verify_sandwich(&au_distance(dev).unwrap(), dev);
        left += rep.left.is_fail() as usize;
        right += rep.right.is_fail() as usize;
    }
    let mut right_other = 0;
    for dev in other {
        right_other += verify_sandwich(&au_distance(dev).unwrap(), dev).right.is_fail() as usize;
    }
    outcome(
        three.len() >= SANDWICH_INSTANCES && other.len() >= NON_THREE_INSTANCES && left + right + right_other == 0,
        format!(
            "{} 3-developments: {left} left / {right} right failures; {} other developments: {right_other} right failures",
            three.len(),
            other.len()
        ),
    )
}

fn c3_star_ball(three: &[Development]) -> Outcome {
    let mut failures = 0;
    for dev in three {
        let rho = au_distance(dev).unwrap();
        let all: Vec<PointSet> = (0..1u128 << dev.n()).map(PointSet::from_bits).collect();
        failures += verify_star_ball_inclusions(&rho, dev, &all, STAR_BALL_MAX_N).both().is_fail() as usize;
    }
    outcome(
        three.len() >= SANDWICH_INSTANCES && failures == 0,
        format!("{} instances, every subset A and n <= {STAR_BALL_MAX_N}: {failures} failures", three.len()),
    )
}

fn c4_agreement() -> Outcome {
    let mut done = 0;
    let mut failures = Vec::new();
    let mut seed = 0u64;
    while done < AGREEMENT_INSTANCES && seed < 10_000 {
        let mut r = rng(3_000_000 + seed);
        seed += 1;
        let n = r.gen_range(2..=8);
        let rho = random_inf_gauge(&mut r, n, 4);
        let t = random_tunnels(&mut r, &rho);
        if validate_tunnel_system(&rho, &t).all().is_fail() {
            continue;
        }
        let sigma = tunnel_distance(&rho, &t).expect("valid tunnels");
        let rep = verify_tunnel_agreement(&rho, &t, &sigma, &SpaceInstance::discrete(n));
        let v = rep.sigma_le_rho.clone().and(rep.equal_below_lambda0.clone()).and(rep.balls_equal.clone());
        if v.is_fail() {
            failures.push(seed - 1);
        }
        done += 1;
    }
    outcome(
        done >= AGREEMENT_INSTANCES && failures.is_empty(),
        format!("{done} instances, {} failures {:?}", failures.len(), failures),
    )
}

/// One cell of the properness grid. Two groups of blocks generate the
/// bornology separately, so a set meeting both is unbounded; a final block is
/// the frontier. Within-block distances stay below 4 and tunnel lengths are at
/// least 8, except for two short tunnels out of the first block, into both
/// groups, that make `T` improper. `ρ` is made improper by dropping one point from its generator.
fn grid_instance(r: &mut ChaCha8Rng, rho_proper: bool, t_proper: bool) -> (ExtGauge, TunnelSystem, SpaceInstance) {
    let k1 = r.gen_range(2..=3);
    let k2 = r.gen_range(1..=2);
    let k = k1 + k2 + 1;
    let mut sizes: Vec<usize> = (0..k).map(|_| r.gen_range(1..=3)).collect();
    if !rho_proper {
        sizes[k1 - 1] = sizes[k1 - 1].max(2);
    }
    let mut block = Vec::new();
    for (b, &s) in sizes.iter().enumerate() {
        block.extend(std::iter::repeat_n(b, s));
    }
    let n = block.len();
    let start = |b: usize| block.iter().position(|&x| x == b).unwrap();
    let mut rho = ExtGauge::from_fn(n, |x, y| if x == y { Dist::ZERO } else { Dist::Inf });
    for x in 0..n {
        if x + 1 < n && block[x] == block[x + 1] {
            let w = Dist::Fin(dy(r.gen_range(1..=8), 2));
            rho.set(x, x + 1, w);
            rho.set(x + 1, x, w);
        }
    }
    for m in 0..n {
        for x in 0..n {
            for y in 0..n {
                let via = rho.get(x, m) + rho.get(m, y);
                if via < rho.get(x, y) {
                    rho.set(x, y, via);
                }
            }
        }
    }
    let mut first: PointSet = (0..n).filter(|&x| block[x] < k1).collect();
    if !rho_proper {
        first.remove(start(k1) - 1);
    }
    let second: PointSet = (0..n).filter(|&x| (k1..k - 1).contains(&block[x])).collect();
    let frontier: PointSet = (0..n).filter(|&x| block[x] == k - 1).collect();
    let space = SpaceInstance::discrete(n)
        .with_bornology(Bornology::generated(vec![first, second]))
        .unwrap()
        .with_frontier(frontier)
        .unwrap();
    let long = |r: &mut ChaCha8Rng| dy(r.gen_range(8..=16), 0);
    let mut t = Vec::new();
    for b in (1..k - 1).filter(|&b| b != k1) {
        let l = if b == 1 && !t_proper { dy(4, 0) } else { long(r) };
        t.push((start(b - 1), start(b), l));
    }
    t.push((start(0), start(k - 1), long(r)));
    t.push((start(k1), start(k - 1), long(r)));
    if !t_proper {
        t.push((start(0), start(k1), dy(4, 0)));
    }
    (rho, TunnelSystem::new(t).unwrap(), space)
}

fn c5_grid() -> Outcome {
    let mut table = Vec::new();
    let mut ok = true;
    for (q, &(rp, tp)) in [(true, true), (true, false), (false, true), (false, false)].iter().enumerate() {
        let (mut matched, mut covering) = (0, 0);
        for i in 0..GRID_PER_QUADRANT {
            let mut r = rng(4_000_000 + (q * 1000 + i) as u64);
            let (rho, t, space) = grid_instance(&mut r, rp, tp);
            let sigma = tunnel_distance(&rho, &t).unwrap();
            let rep = verify_tunnel_properness(&rho, &t, &sigma, &space, COVERING_MAX_N);
            let designed = rep.rho_proper.holds() == rp && rep.tunnels_proper.holds() == tp;
            let expect_sigma = rp && tp;
            if designed && rep.biconditional && rep.sigma_proper.holds() == expect_sigma {
                matched += 1;
            }
            if rep.covering_inclusion.holds() && rep.rho_balls_inside.holds() && rep.tunnels_inside.holds() {
                covering += 1;
            }
        }
        ok &= matched == GRID_PER_QUADRANT && covering == GRID_PER_QUADRANT;
        table.push(format!("rho {} x T {}: {matched}/{GRID_PER_QUADRANT} match, {covering} inclusions", yn(rp), yn(tp)));
    }
    outcome(ok, format!("{} instances; {}", 4 * GRID_PER_QUADRANT, table.join("; ")))
}

fn yn(b: bool) -> &'static str {
    if b {
        "proper"
    } else {
        "improper"
    }
}

/// An invariant gauge: the maximum of a random gauge over the whole group.
fn invariant_gauge(r: &mut ChaCha8Rng, group: &GroupAction, n: usize) -> ExtGauge {
    let base = random_inf_gauge(r, n, 3);
    ExtGauge::from_fn(n, |x, y| group.elements().iter().map(|g| base.get(g.apply(x), g.apply(y))).max().unwrap())
}

fn c6_saturation() -> Outcome {
    let (mut done, mut failures, mut seed) = (0, Vec::new(), 0u64);
    while done < SATURATION_INSTANCES && seed < 10_000 {
        let mut r = rng(5_000_000 + seed);
        seed += 1;
        let n = r.gen_range(2..=7);
        let gens = (0..r.gen_range(1..=2)).map(|_| sparse_perm(&mut r, n)).collect();
        let plain = SpaceInstance::discrete(n);
        let group = enumerate_group(&plain, gens, GROUP_CAP).unwrap();
        if !group.is_complete() {
            continue;
        }
        let rho = invariant_gauge(&mut r, &group, n);
        if crevasse_partition(&rho).len() < 2 {
            continue;
        }
        // Half the instances bound an invariant set and put the rest at the
        // frontier; the others use the full bornology.
        let space = if seed % 2 == 0 {
            plain
        } else {
            let orbits = group.orbits();
            let b = orbits.iter().take(orbits.len().div_ceil(2)).fold(PointSet::empty(), |a, &o| a.union(o));
            let f = PointSet::full(n).difference(b);
            let s = SpaceInstance::discrete(n).with_bornology(Bornology::generated(vec![b])).unwrap();
            if f.is_empty() { s } else { s.with_frontier(f).unwrap() }
        };
        let t = random_tunnels(&mut r, &rho);
        let Ok(gt) = g_saturate_tunnels(&group, &rho, &t, &space) else {
            failures.push(seed - 1);
            done += 1;
            continue;
        };
        let again = g_saturate_tunnels(&group, &rho, &gt, &space);
        let ok = validate_tunnel_system(&rho, &gt).all().is_pass()
            && is_invariant_tunnels(&group, &gt).is_pass()
            && is_proper_tunnel_system(&gt, &space).holds()
            && again.is_ok_and(|a| a == gt);
        if !ok {
            failures.push(seed - 1);
        }
        done += 1;
    }
    outcome(
        done >= SATURATION_INSTANCES && failures.is_empty(),
        format!("{done} instances, {} failures {:?}", failures.len(), failures),
    )
}

fn c7_refine() -> Outcome {
    let (mut done, mut failures, mut capped, mut seed) = (0, Vec::new(), 0, 0u64);
    while done < REFINE_INSTANCES && seed < 10_000 {
        let mut r = rng(6_000_000 + seed);
        seed += 1;
        let n = r.gen_range(2..=8);
        let gi = group_instance(&mut r, n, BornologyKind::Full, seed % 2 == 0);
        let (inst, group) = (&gi.inst, &gi.group);
        if !equiregularity_check(inst, group).verdict.is_pass() || regular(orbit_quotient(inst, group).space()).is_fail() {
            continue;
        }
        // An invariant open cover: saturated unions of minimal neighbourhoods.
        let mut sets: Vec<PointSet> = Vec::new();
        for x in 0..n {
            let mut s = inst.min_nbhd(x);
            if r.gen_bool(0.4) {
                s = s.union(inst.min_nbhd(r.gen_range(0..n)));
            }
            sets.push(s);
        }
        let u = saturate_cover(group, &Cover::new(sets));
        capped += !group.is_complete() as usize;
        let ok = stone_star_refine(inst, group, &u)
            .is_ok_and(|s| is_star_refinement(&s.cover, &u, 1).is_pass() && is_invariant_cover(group, &s.cover).is_pass());
        if !ok {
            failures.push(seed - 1);
        }
        done += 1;
    }
    outcome(
        done >= REFINE_INSTANCES && failures.is_empty(),
        format!("{done} equiregular instances ({capped} with a capped group), {} failures {:?}", failures.len(), failures),
    )
}

fn c8_exhaustion() -> Outcome {
    let (mut done, mut failures, mut long, mut seed) = (0, Vec::new(), 0, 0u64);
    while done < EXHAUSTION_INSTANCES && seed < 10_000 {
        let mut r = rng(7_000_000 + seed);
        seed += 1;
        let n = r.gen_range(2..=8);
        // A partition space; the exhaustion grows by whole blocks.
        let mut blocks: Vec<PointSet> = Vec::new();
        for x in 0..n {
            if blocks.is_empty() || r.gen_bool(0.6) {
                blocks.push(PointSet::singleton(x));
            } else {
                let i = r.gen_range(0..blocks.len());
                blocks[i].insert(x);
            }
        }
        let mut d: Vec<PointSet> = Vec::new();
        let mut cur = PointSet::empty();
        for b in &blocks {
            cur = cur.union(*b);
            if r.gen_bool(0.6) || cur == PointSet::full(n) {
                d.push(cur);
            }
        }
        let bounded = if d.len() > 1 { d[d.len() - 2] } else { PointSet::full(n) };
        let space = SpaceInstance::new(n, blocks.clone(), Bornology::generated(vec![bounded])).unwrap();
        let ok = exhaustion_decomposition(&space, &d).is_ok_and(|dec| {
            let c = &dec.checks;
            [&c.union, &c.compact, &c.disjoint, &c.inside, &c.collar_k, &c.collar_l].iter().all(|v| v.is_pass())
        });
        long += (d.len() >= 3) as usize;
        if !ok {
            failures.push(seed - 1);
        }
        done += 1;
    }
    outcome(
        done >= EXHAUSTION_INSTANCES && failures.is_empty(),
        format!("{done} instances ({long} with three or more steps), {} failures {:?}", failures.len(), failures),
    )
}

/// Directed-bornology corpus shared by the two coherence criteria.
fn coherence_corpus() -> Vec<GroupInstance> {
    (0..COHERENCE_INSTANCES as u64)
        .map(|seed| {
            let mut r = rng(8_000_000 + seed);
            let n = r.gen_range(2..=7);
            let kind = if seed % 2 == 0 { BornologyKind::Full } else { BornologyKind::Horizon };
            group_instance(&mut r, n, kind, seed % 3 != 0)
        })
        .collect()
}

fn c9_metrize(directed: &[GroupInstance]) -> Outcome {
    // Metrization needs no directed bornology, so local ones join the corpus.
    let local: Vec<GroupInstance> = (0..COHERENCE_INSTANCES as u64 / 2)
        .map(|seed| {
            let mut r = rng(9_000_000 + seed);
            let n = r.gen_range(2..=7);
            group_instance(&mut r, n, BornologyKind::Local, seed % 3 != 0)
        })
        .collect();
    let corpus: Vec<&GroupInstance> = directed.iter().chain(&local).collect();
    let (mut succeeded, mut failures) = (0, Vec::new());
    for (i, gi) in corpus.iter().enumerate() {
        let er = equiregularity_check(&gi.inst, &gi.group).verdict;
        let targets = default_targets(&gi.inst);
        let m = metrize(&gi.inst, &gi.group, &targets, DEPTH);
        let ok = match &m {
            Ok(m) => {
                succeeded += 1;
                er.holds()
                    && m.family.gauges.iter().all(|g| is_invariant_gauge(&gi.group, g).is_pass())
                    && m.targets.iter().all(|t| {
                        let g = &m.family.gauges[t.gauge];
                        g.ball(t.x, Dist::Fin(Dyadic::pow2_neg(1))).is_subset(t.u)
                    })
            }
            Err(_) => !er.holds(),
        };
        if !ok {
            failures.push(i);
        }
    }
    outcome(
        failures.is_empty(),
        format!("{} instances ({succeeded} metrized), {} incoherent {:?}", corpus.len(), failures.len(), failures),
    )
}

fn c10_proper(corpus: &[GroupInstance]) -> Outcome {
    let (mut succeeded, mut converse, mut failures) = (0, 0, Vec::new());
    for (i, gi) in corpus.iter().enumerate() {
        let (inst, group) = (&gi.inst, &gi.group);
        let expected = equiregularity_check(inst, group).verdict.holds() && near_properness_check(inst, group).holds();
        let family = match metrize(inst, group, &default_targets(inst), DEPTH) {
            Ok(m) => m.family,
            Err(_) => {
                if expected {
                    failures.push(i);
                }
                continue;
            }
        };
        let d = quotient_exhaustion(inst, group);
        let ok = match proper_metrize(inst, group, &d, &family, DEPTH) {
            Ok(p) => {
                succeeded += 1;
                let outputs = p.family.gauges.iter().all(|g| {
                    isometrize::gauge::is_proper_gauge(g, inst).holds() && is_invariant_gauge(group, g).is_pass()
                });
                let conv = p.family.gauges.iter().all(|g| near_properness_from_gauge(inst, group, g).holds());
                converse += conv as usize;
                expected && outputs && conv
            }
            Err(_) => !expected,
        };
        if !ok {
            failures.push(i);
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} instances ({succeeded} proper-metrized, converse verified on {converse}), {} incoherent {:?}",
            corpus.len(),
            failures.len(),
            failures
        ),
    )
}

fn c11_examples() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for name in examples::NAMES {
        let rep = examples::run(name, isometrize::invariance::DEFAULT_DEPTH, GROUP_CAP).expect("built-in runs");
        for c in rep.checks.iter().filter(|c| !c.matches) {
            bad.push(format!("{name}/{}", c.check));
        }
    }
    let ex11 = examples::run("ex1.1", isometrize::invariance::DEFAULT_DEPTH, GROUP_CAP).unwrap();
    let np = &ex11.check("near-proper").unwrap().verdict;
    let c_ok = np.status == Status::Fail
        && np.witness.as_ref().and_then(|w| w.get("C")) == Some(&serde_json::json!([0, 1]));
    let ex12 = examples::run("ex1.2-analogue", isometrize::invariance::DEFAULT_DEPTH, GROUP_CAP).unwrap();
    let er = &ex12.check("equiregular").unwrap().verdict;
    let xu_ok = er.witness.as_ref().is_some_and(|w| w.get("x").is_some() && w.get("U").is_some());
    let t = start.elapsed();
    outcome(
        bad.is_empty() && c_ok && xu_ok && t < EXAMPLES_TIME,
        format!(
            "{} examples, mismatches {:?}, ex1.1 witness C={{0,1}}: {c_ok}, ex1.2 (x,U) witness: {xu_ok}, {:.2}s (bound {}s)",
            examples::NAMES.len(),
            bad,
            t.as_secs_f64(),
            EXAMPLES_TIME.as_secs()
        ),
    )
}

fn c12_determinism() -> Outcome {
    let dir = tempfile::TempDir::new().unwrap();
    let doc = dir.path().join("instance.json");
    std::fs::write(
        &doc,
        r#"{
  "points": 6,
  "basis": [[0, 1], [2, 3], [4, 5]],
  "bornology": {"generators": [[0, 1, 2, 3]], "frontier": [4, 5]},
  "group": {"generators": [[2, 3, 0, 1, 4, 5]]},
  "gauges": {"rho": [["0","0","inf","inf","inf","inf"],["0","0","inf","inf","inf","inf"],["inf","inf","0","0","inf","inf"],["inf","inf","0","0","inf","inf"],["inf","inf","inf","inf","0","0"],["inf","inf","inf","inf","0","0"]]},
  "tunnels": {"rho": [[0, 2, "1"], [0, 4, "3/2^1"], [2, 4, "3/2^1"]]},
  "developments": {"d": [[[0, 1, 2, 3], [4, 5]], [[0, 1], [2, 3], [4, 5]]]}
}"#,
    )
    .unwrap();
    let doc = doc.to_str().unwrap().to_string();
    let trace = dir.path().join("trace.json").to_str().unwrap().to_string();
    let runs: Vec<Vec<&str>> = vec![
        vec!["validate", "--instance", &doc],
        vec!["au", "--instance", &doc, "--emit-matrix"],
        vec!["tunnel", "--instance", &doc, "--emit-matrix"],
        vec!["check", "--instance", &doc],
        vec!["metrize", "--instance", &doc, "--emit-matrix", "--emit-trace", &trace],
        vec!["proper-metrize", "--instance", &doc, "--emit-matrix"],
        vec!["single-metrize", "--instance", &doc, "--emit-matrix"],
        vec!["verify", "thm3.7", "--instance", &doc],
        vec!["verify", "lem5.1", "--instance", &doc],
        vec!["verify", "thm1.3", "--instance", "ex1.3-window"],
        vec!["example", "ex1.1"],
        vec!["example", "ex3.2-surrogate"],
    ];
    let exe = env!("CARGO_BIN_EXE_isometrize");
    let mut differing = Vec::new();
    let mut traces_equal = true;
    for args in &runs {
        let once = |_: ()| {
            let out = std::process::Command::new(exe)
                .args(args)
                .args(["--format", "machine"])
                .output()
                .expect("binary runs");
            let t = std::fs::read(&trace).unwrap_or_default();
            (out.status.code(), out.stdout, t)
        };
        let (a, b) = (once(()), once(()));
        if a.0 != b.0 || a.1 != b.1 || a.1.is_empty() {
            differing.push(args.join(" "));
        }
        traces_equal &= a.2 == b.2;
    }
    outcome(
        differing.is_empty() && traces_equal,
        format!("{} commands run twice, {} differ {:?}, traces identical: {traces_equal}", runs.len(), differing.len(), differing),
    )
}

fn main() {
    let (three, other) = sandwich_corpus();
    let corpus = coherence_corpus();
    let results: Vec<(&str, Outcome)> = vec![
        ("oracle equivalence", c1_oracle()),
        ("ball/star sandwich", c2_sandwich(&three, &other)),
        ("star/ball inclusions", c3_star_ball(&three)),
        ("tunnel distance agreement", c4_agreement()),
        ("tunnel properness grid", c5_grid()),
        ("tunnel saturation", c6_saturation()),
        ("invariant star-refinement", c7_refine()),
        ("exhaustion decomposition", c8_exhaustion()),
        ("metrize coherence", c9_metrize(&corpus)),
        ("proper-metrize coherence", c10_proper(&corpus)),
        ("built-in examples", c11_examples()),
        ("determinism", c12_determinism()),
    ];
    for (i, (name, o)) in results.iter().enumerate() {
        println!("{} criterion {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, (_, o))| !o.pass).map(|(i, _)| i + 1).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
