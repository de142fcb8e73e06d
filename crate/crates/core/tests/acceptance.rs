//! Release acceptance checks.
//!
//! Each test covers one gate for a release and prints a single
//! `acceptance N (...): PASS/FAIL` line, so the whole gate reads off
//! `cargo test --test acceptance -- --nocapture`:
//!
//! 1. the benchmark table reproduces the published verdicts,
//! 2. the checked-in example files match their generators,
//! 3. the zone checker agrees with a region-graph oracle on small instances,
//! 4. zone and federation operations agree with point-sampling oracles and
//!    extrapolation does not change which control states are reachable,
//! 5. the relativised time operators collapse to the plain ones for the
//!    trivial relativiser,
//! 6. the three equivalent encodings of the same toy system get the same
//!    verdict.

use std::collections::{BTreeMap, BTreeSet};

use pesmc_core::benchgen::{min_n, BenchSpec, Category, Family};
use pesmc_core::bound::Bound;
use pesmc_core::checker::region::check_file_region;
use pesmc_core::checker::{check_str, CheckOptions, Evaluator, StateSet, Universe, Verdict};
use pesmc_core::fed::Federation;
use pesmc_core::lex::token_kinds;
use pesmc_core::mes::{LFormula, LVarRef, Mes};
use pesmc_core::model::{Location, Model};
use pesmc_core::suite;
use pesmc_core::zone::Zone;
use pesmc_core::{check_file, parse_pes};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn report(label: &str, outcome: Result<String, String>) {
    match outcome {
        Ok(detail) => println!("{label}: PASS - {detail}"),
        Err(why) => {
            println!("{label}: FAIL - {why}");
            panic!("{label} failed: {why}");
        }
    }
}

// ---------------------------------------------------------------------------
// 1. Benchmark verdict table
// ---------------------------------------------------------------------------

#[test]
fn acceptance_1_verdict_table() {
    report("acceptance 1 (benchmark verdict table)", verdict_table());
}

fn verdict_table() -> Result<String, String> {
    let cells = suite::table_cells();
    let results = suite::run_cells(&cells, &CheckOptions::default());
    let failures: Vec<String> = results
        .iter()
        .filter(|r| !r.pass())
        .map(|r| {
            format!(
                "{} n={} {}: expected {}, got {:?}",
                r.cell.family, r.cell.n, r.cell.category, r.expected, r.got
            )
        })
        .collect();
    if failures.is_empty() {
        Ok(format!("all {} cells match the published verdicts", results.len()))
    } else {
        Err(failures.join("; "))
    }
}

// ---------------------------------------------------------------------------
// 2. Checked-in examples match their generators
// ---------------------------------------------------------------------------

#[test]
fn acceptance_2_golden_files_match_generators() {
    report("acceptance 2 (golden files match generators)", golden_equivalence());
}

fn golden_pairs() -> [(&'static str, &'static str, Family, u32, Category); 5] {
    [
        ("csma2.pes", include_str!("golden/csma2.pes"), Family::Csma, 2, Category::As),
        ("fischer2.pes", include_str!("golden/fischer2.pes"), Family::Fischer, 2, Category::As),
        ("grc2.pes", include_str!("golden/grc2.pes"), Family::Grc, 2, Category::As),
        ("leader2.pes", include_str!("golden/leader2.pes"), Family::Leader, 2, Category::As),
        ("leader4bs.pes", include_str!("golden/leader4bs.pes"), Family::Leader, 4, Category::Bs),
    ]
}

fn golden_equivalence() -> Result<String, String> {
    for (name, golden, family, n, category) in golden_pairs() {
        let generated = BenchSpec::new(family, n, category)
            .generate()
            .map_err(|e| format!("{name}: generator failed: {e}"))?;
        let golden_tokens =
            token_kinds(golden).map_err(|e| format!("{name}: golden file does not lex: {e}"))?;
        let generated_tokens = token_kinds(&generated)
            .map_err(|e| format!("{name}: generated file does not lex: {e}"))?;
        if golden_tokens != generated_tokens {
            return Err(format!(
                "{name}: token stream differs from `gen {family} {n} {category}`"
            ));
        }
        let golden_file =
            parse_pes(golden).map_err(|e| format!("{name}: golden file does not parse: {e}"))?;
        let generated_file = parse_pes(&generated)
            .map_err(|e| format!("{name}: generated file does not parse: {e}"))?;
        if golden_file != generated_file {
            return Err(format!(
                "{name}: parsed syntax differs from `gen {family} {n} {category}`"
            ));
        }
    }
    Ok("5 checked-in files match their generators as token streams and as parsed syntax".into())
}

// ---------------------------------------------------------------------------
// 3. Zone checker vs. region-graph oracle
// ---------------------------------------------------------------------------

#[test]
fn acceptance_3_region_oracle_agreement() {
    report("acceptance 3 (region-graph oracle agreement)", oracle_equivalence());
}

fn oracle_equivalence() -> Result<String, String> {
    // The region oracle only handles few clocks and small constants, so the
    // sweep uses FISCHER with shrunken constants and LEADER, whose default
    // constants are already tiny.
    let mut cases: Vec<(Family, u32, Category, Vec<(&str, i64)>)> = Vec::new();
    for &cat in Family::Fischer.categories() {
        if min_n(Family::Fischer, cat) <= 2 {
            cases.push((Family::Fischer, 2, cat, vec![("CA", 2), ("CB", 3)]));
        }
    }
    for n in [2, 3] {
        for &cat in Family::Leader.categories() {
            if min_n(Family::Leader, cat) <= n {
                cases.push((Family::Leader, n, cat, Vec::new()));
            }
        }
    }
    let mut compared = 0usize;
    let mut skipped = Vec::new();
    for (family, n, category, params) in cases {
        let mut spec = BenchSpec::new(family, n, category);
        for (name, value) in params {
            spec = spec.with_param(name, value);
        }
        let src = spec.generate().map_err(|e| format!("{family} {n} {category}: {e}"))?;
        let file = parse_pes(&src).map_err(|e| format!("{family} {n} {category}: {e}"))?;
        let zone_verdict = check_file(&file, &CheckOptions::default())
            .map_err(|e| format!("{family} {n} {category}: zone checker failed: {e}"))?
            .verdict;
        match check_file_region(&file) {
            Ok(region_verdict) => {
                compared += 1;
                if region_verdict != zone_verdict {
                    return Err(format!(
                        "{family} {n} {category}: zone checker says {zone_verdict}, \
                         region oracle says {region_verdict}"
                    ));
                }
            }
            Err(e) => skipped.push(format!("{family} {n} {category} ({e})")),
        }
    }
    if compared < 12 {
        return Err(format!(
            "only {compared} instances fit the oracle envelope; skipped: {}",
            skipped.join(", ")
        ));
    }
    let skipped_note = if skipped.is_empty() {
        String::new()
    } else {
        format!(" ({} outside the oracle envelope)", skipped.len())
    };
    Ok(format!("{compared} instances agree with the region-graph oracle{skipped_note}"))
}

// ---------------------------------------------------------------------------
// 4. Zone/federation operations vs. point-sampling oracles
// ---------------------------------------------------------------------------

#[test]
fn acceptance_4_zone_property_suite() {
    report("acceptance 4 (zone property suite)", zone_property_suite());
}

const INSTANCES: usize = 10_000;
const POINTS: usize = 24;
/// Sampled coordinates are doubled, so `0..=SCALE_MAX` covers the reals
/// `0..=12` on the half-integer grid.
const SCALE_MAX: i64 = 24;

/// Does `x_i - x_j <= b` (or `<`) admit the doubled difference `d2`?
/// Doubling puts the sample grid strictly finer than the constraint grid, so
/// strict and non-strict bounds classify sampled points differently.
fn admits2(b: Bound, d2: i64) -> bool {
    if b.is_inf() {
        return true;
    }
    let twice = 2 * b.value();
    if b.is_nonstrict() {
        d2 <= twice
    } else {
        d2 <= twice - 1
    }
}

fn zone_has(z: &Zone, p: &[i64]) -> bool {
    let d = z.dim();
    (0..d).all(|i| (0..d).all(|j| admits2(z.bound(i, j), p[i] - p[j])))
}

fn fed_has(f: &Federation, p: &[i64]) -> bool {
    f.zones().iter().any(|z| zone_has(z, p))
}

fn sample(rng: &mut ChaCha8Rng, dim: usize) -> Vec<i64> {
    let mut p = vec![0i64; dim];
    for c in p.iter_mut().skip(1) {
        *c = rng.gen_range(0..=SCALE_MAX);
    }
    p
}

fn random_zone(rng: &mut ChaCha8Rng, dim: usize) -> Zone {
    let mut z = Zone::universe(dim);
    for _ in 0..rng.gen_range(0usize..=6) {
        let i = rng.gen_range(0..dim);
        let mut j = rng.gen_range(0..dim);
        if j == i {
            j = (j + 1) % dim;
        }
        let v = rng.gen_range(-10..=10i64);
        let b = if rng.gen_bool(0.5) { Bound::le(v) } else { Bound::lt(v) };
        if let Some(tightened) = z.with_constraint(i, j, b) {
            z = tightened;
        }
    }
    z
}

fn random_fed(rng: &mut ChaCha8Rng, dim: usize) -> Federation {
    let zones: Vec<Zone> = (0..rng.gen_range(0usize..=3)).map(|_| random_zone(rng, dim)).collect();
    Federation::from_zones(dim, zones)
}

/// Is the doubled point `p` in `up(z)`, i.e. is `p - t` in `z` for some delay
/// `t >= 0`? Decided exactly: the feasible delays form an interval whose
/// endpoints come from `z`'s bounds, so emptiness is one bound composition.
fn in_up(z: &Zone, p: &[i64]) -> bool {
    let d = z.dim();
    for i in 1..d {
        for j in 1..d {
            if !admits2(z.bound(i, j), p[i] - p[j]) {
                return false;
            }
        }
    }
    let mut hi = Bound::INF; // upper bounds on t, doubled
    let mut lo = Bound::LE_ZERO; // upper bounds on -t, doubled (t >= 0)
    for i in 1..d {
        // p_i - t >= 0
        hi = hi.min(Bound::le(p[i]));
        let b = z.bound(i, 0); // p_i - t <= v  =>  -t <= v - p_i
        if !b.is_inf() {
            let c = 2 * b.value() - p[i];
            lo = lo.min(if b.is_nonstrict() { Bound::le(c) } else { Bound::lt(c) });
        }
        let b = z.bound(0, i); // t - p_i <= v  =>  t <= v + p_i
        if !b.is_inf() {
            let c = 2 * b.value() + p[i];
            hi = hi.min(if b.is_nonstrict() { Bound::le(c) } else { Bound::lt(c) });
        }
    }
    hi.add(lo).admits(0)
}

/// Is the doubled point `p` in `down(z)`, i.e. is `p + t` in `z` for some
/// delay `t >= 0`?
fn in_down(z: &Zone, p: &[i64]) -> bool {
    let d = z.dim();
    for i in 1..d {
        for j in 1..d {
            if !admits2(z.bound(i, j), p[i] - p[j]) {
                return false;
            }
        }
    }
    let mut hi = Bound::INF;
    let mut lo = Bound::LE_ZERO;
    for i in 1..d {
        let b = z.bound(i, 0); // p_i + t <= v  =>  t <= v - p_i
        if !b.is_inf() {
            let c = 2 * b.value() - p[i];
            hi = hi.min(if b.is_nonstrict() { Bound::le(c) } else { Bound::lt(c) });
        }
        let b = z.bound(0, i); // -p_i - t <= v  =>  -t <= v + p_i
        if !b.is_inf() {
            let c = 2 * b.value() + p[i];
            lo = lo.min(if b.is_nonstrict() { Bound::le(c) } else { Bound::lt(c) });
        }
    }
    hi.add(lo).admits(0)
}

/// Is there a value for clock `r` that puts `p` (doubled) into `z`? This is
/// membership in the projection of `z` along `r`, again decided exactly.
fn exists_coord(z: &Zone, r: usize, p: &[i64]) -> bool {
    let d = z.dim();
    for i in 0..d {
        for j in 0..d {
            if i != r && j != r && !admits2(z.bound(i, j), p[i] - p[j]) {
                return false;
            }
        }
    }
    let mut hi = Bound::INF; // upper bounds on the witness value v, doubled
    let mut lo = Bound::LE_ZERO; // upper bounds on -v (v >= 0)
    for j in 0..d {
        if j == r {
            continue;
        }
        let b = z.bound(r, j); // v - p_j <= c  =>  v <= c + p_j
        if !b.is_inf() {
            let c = 2 * b.value() + p[j];
            hi = hi.min(if b.is_nonstrict() { Bound::le(c) } else { Bound::lt(c) });
        }
        let b = z.bound(j, r); // p_j - v <= c  =>  -v <= c - p_j
        if !b.is_inf() {
            let c = 2 * b.value() - p[j];
            lo = lo.min(if b.is_nonstrict() { Bound::le(c) } else { Bound::lt(c) });
        }
    }
    hi.add(lo).admits(0)
}

fn zone_property_suite() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2024);
    canonical_form_agrees(&mut rng).map_err(|e| format!("canonical form: {e}"))?;
    intersection_agrees(&mut rng).map_err(|e| format!("intersection: {e}"))?;
    delay_ops_agree(&mut rng).map_err(|e| format!("up/down: {e}"))?;
    reset_and_free_agree(&mut rng).map_err(|e| format!("reset/free: {e}"))?;
    subtraction_agrees(&mut rng).map_err(|e| format!("subtraction: {e}"))?;
    federation_ops_agree(&mut rng).map_err(|e| format!("federations: {e}"))?;
    extrapolation_preserves_reachability().map_err(|e| format!("extrapolation: {e}"))?;
    Ok(format!(
        "{INSTANCES} random instances per operation agree with point sampling; \
         extrapolation preserves the reachable control states of 4 models"
    ))
}

/// `Zone::from_bounds` must describe exactly the conjunction of the raw
/// bounds, including detecting emptiness.
fn canonical_form_agrees(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for case in 0..INSTANCES {
        let dim = rng.gen_range(2usize..=4);
        let mut m = vec![Bound::INF; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = Bound::LE_ZERO;
            m[i] = Bound::LE_ZERO; // row 0: 0 - x_j <= 0
        }
        for _ in 0..rng.gen_range(0usize..=8) {
            let i = rng.gen_range(0..dim);
            let mut j = rng.gen_range(0..dim);
            if j == i {
                j = (j + 1) % dim;
            }
            let v = rng.gen_range(-10..=10i64);
            let b = if rng.gen_bool(0.5) { Bound::le(v) } else { Bound::lt(v) };
            let entry = &mut m[i * dim + j];
            *entry = (*entry).min(b);
        }
        let raw = m.clone();
        let zone = Zone::from_bounds(dim, m);
        for _ in 0..POINTS {
            let p = sample(rng, dim);
            let raw_admits =
                (0..dim).all(|i| (0..dim).all(|j| admits2(raw[i * dim + j], p[i] - p[j])));
            let canonical_admits = zone.as_ref().map_or(false, |z| zone_has(z, &p));
            if raw_admits != canonical_admits {
                return Err(format!(
                    "case {case}: point {p:?} raw={raw_admits} canonical={canonical_admits}"
                ));
            }
        }
    }
    Ok(())
}

fn intersection_agrees(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for case in 0..INSTANCES {
        let dim = rng.gen_range(2usize..=4);
        let a = random_zone(rng, dim);
        let b = random_zone(rng, dim);
        let both = a.intersect(&b);
        for _ in 0..POINTS {
            let p = sample(rng, dim);
            let want = zone_has(&a, &p) && zone_has(&b, &p);
            let got = both.as_ref().map_or(false, |z| zone_has(z, &p));
            if want != got {
                return Err(format!("case {case}: point {p:?} want={want} got={got}"));
            }
        }
    }
    Ok(())
}

fn delay_ops_agree(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for case in 0..INSTANCES {
        let dim = rng.gen_range(2usize..=4);
        let z = random_zone(rng, dim);
        let up = z.up();
        let down = z.down();
        let fed = random_fed(rng, dim);
        let fed_up = fed.up();
        let fed_down = fed.down();
        for _ in 0..POINTS {
            let p = sample(rng, dim);
            if zone_has(&up, &p) != in_up(&z, &p) {
                return Err(format!("case {case}: up disagrees at {p:?}"));
            }
            if zone_has(&down, &p) != in_down(&z, &p) {
                return Err(format!("case {case}: down disagrees at {p:?}"));
            }
            if fed_has(&fed_up, &p) != fed.zones().iter().any(|z| in_up(z, &p)) {
                return Err(format!("case {case}: federation up disagrees at {p:?}"));
            }
            if fed_has(&fed_down, &p) != fed.zones().iter().any(|z| in_down(z, &p)) {
                return Err(format!("case {case}: federation down disagrees at {p:?}"));
            }
        }
    }
    Ok(())
}

fn reset_and_free_agree(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for case in 0..INSTANCES {
        let dim = rng.gen_range(2usize..=4);
        let z = random_zone(rng, dim);
        let r = rng.gen_range(1..dim);
        let image = z.reset(&[r]);
        let freed = z.free(&[r]);
        for _ in 0..POINTS {
            let p = sample(rng, dim);
            let want_reset = p[r] == 0 && exists_coord(&z, r, &p);
            if zone_has(&image, &p) != want_reset {
                return Err(format!("case {case}: reset x{r} disagrees at {p:?}"));
            }
            if zone_has(&freed, &p) != exists_coord(&z, r, &p) {
                return Err(format!("case {case}: free x{r} disagrees at {p:?}"));
            }
        }
        if dim > 2 {
            let s = 1 + (r % (dim - 1)); // a clock distinct from r
            if z.reset(&[r, s]) != z.reset(&[r]).reset(&[s]) {
                return Err(format!("case {case}: reset of {{x{r},x{s}}} is not composed resets"));
            }
            if z.free(&[r, s]) != z.free(&[r]).free(&[s]) {
                return Err(format!("case {case}: free of {{x{r},x{s}}} is not composed frees"));
            }
        }
    }
    Ok(())
}

fn subtraction_agrees(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for case in 0..INSTANCES {
        let dim = rng.gen_range(2usize..=4);
        let a = random_zone(rng, dim);
        let b = random_zone(rng, dim);
        let pieces = a.subtract(&b);
        let fa = random_fed(rng, dim);
        let fb = random_fed(rng, dim);
        let diff = fa.subtract(&fb);
        for _ in 0..POINTS {
            let p = sample(rng, dim);
            let want = zone_has(&a, &p) && !zone_has(&b, &p);
            if pieces.iter().any(|piece| zone_has(piece, &p)) != want {
                return Err(format!("case {case}: zone subtraction disagrees at {p:?}"));
            }
            let want = fed_has(&fa, &p) && !fed_has(&fb, &p);
            if fed_has(&diff, &p) != want {
                return Err(format!("case {case}: federation subtraction disagrees at {p:?}"));
            }
        }
    }
    Ok(())
}

fn federation_ops_agree(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for case in 0..INSTANCES {
        let dim = rng.gen_range(2usize..=4);
        let zones: Vec<Zone> = (0..rng.gen_range(0usize..=3)).map(|_| random_zone(rng, dim)).collect();
        let fa = Federation::from_zones(dim, zones.clone());
        let fb = random_fed(rng, dim);
        let union = fa.union(&fb);
        let inter = fa.intersect(&fb);
        let fa_includes_fb = fa.includes(&fb);
        for _ in 0..POINTS {
            let p = sample(rng, dim);
            let in_fa = fed_has(&fa, &p);
            let in_fb = fed_has(&fb, &p);
            // reduction/merging inside from_zones must not change the set
            if in_fa != zones.iter().any(|z| zone_has(z, &p)) {
                return Err(format!("case {case}: from_zones changed membership at {p:?}"));
            }
            if fed_has(&union, &p) != (in_fa || in_fb) {
                return Err(format!("case {case}: union disagrees at {p:?}"));
            }
            if fed_has(&inter, &p) != (in_fa && in_fb) {
                return Err(format!("case {case}: intersection disagrees at {p:?}"));
            }
            if fa_includes_fb && in_fb && !in_fa {
                return Err(format!("case {case}: includes() claimed a superset falsely"));
            }
        }
        if !union.includes(&fa) || !union.includes(&fb) {
            return Err(format!("case {case}: union does not include its operands"));
        }
        if !fa.includes(&inter) || !fb.includes(&inter) {
            return Err(format!("case {case}: operands do not include their intersection"));
        }
        if !fa.set_eq(&fa.union(&fa)) {
            return Err(format!("case {case}: union with itself changed the set"));
        }
    }
    Ok(())
}

/// Forward reachability with and without extrapolation must visit the same
/// control states. Constants are shrunk so the unextrapolated exploration
/// also settles.
fn extrapolation_preserves_reachability() -> Result<(), String> {
    let models = [
        (
            "fischer n=2 (CA=2, CB=3)",
            BenchSpec::new(Family::Fischer, 2, Category::As).with_param("CA", 2).with_param("CB", 3),
        ),
        (
            "fischer n=3 (CA=2, CB=3)",
            BenchSpec::new(Family::Fischer, 3, Category::As).with_param("CA", 2).with_param("CB", 3),
        ),
        ("leader n=2", BenchSpec::new(Family::Leader, 2, Category::As)),
        ("leader n=3", BenchSpec::new(Family::Leader, 3, Category::As)),
    ];
    for (name, spec) in models {
        let src = spec.generate().map_err(|e| format!("{name}: {e}"))?;
        let file = parse_pes(&src).map_err(|e| format!("{name}: {e}"))?;
        let model = Model::from_file(&file).map_err(|e| format!("{name}: {e}"))?;
        let k = ceilings(&model);
        let plain = reach_locations(&model, None, 200_000)
            .ok_or(format!("{name}: exploration without extrapolation did not settle"))?;
        let extrapolated = reach_locations(&model, Some(&k), 200_000)
            .ok_or(format!("{name}: extrapolated exploration did not settle"))?;
        if plain != extrapolated {
            return Err(format!(
                "{name}: reachable control states differ ({} plain vs {} extrapolated)",
                plain.len(),
                extrapolated.len()
            ));
        }
    }
    Ok(())
}

/// Per-clock maxima over every constant the model compares the clock with.
fn ceilings(model: &Model) -> Vec<i64> {
    let mut k = vec![0i64; model.dim()];
    let note = |constraints: &[(usize, pesmc_core::ast::CmpOp, i64)], k: &mut Vec<i64>| {
        for &(clock, _, v) in constraints {
            if v > k[clock] {
                k[clock] = v;
            }
        }
    };
    for inv in &model.invariants {
        note(&inv.bounds, &mut k);
    }
    for t in &model.transitions {
        note(&t.clock_guard, &mut k);
    }
    if let Some(init) = &model.initial_constraints {
        note(init, &mut k);
    }
    k
}

/// The set of control states reachable by alternating delay and discrete
/// steps, or `None` if the exploration exceeds `cap` expansions.
fn reach_locations(model: &Model, k: Option<&[i64]>, cap: usize) -> Option<BTreeSet<Location>> {
    let l0 = model.initial_location();
    let z0 = model.initial_zone()?;
    let inv0 = model.invariant_zone(&l0)?;
    let mut start = z0.intersect(&inv0)?.up().intersect(&inv0)?;
    if let Some(k) = k {
        start = start.extrapolate(k);
    }
    let mut seen: BTreeMap<Location, Federation> = BTreeMap::new();
    seen.insert(l0.clone(), Federation::from_zone(start.clone()));
    let mut stack = vec![(l0, start)];
    let mut pops = 0usize;
    while let Some((loc, zone)) = stack.pop() {
        pops += 1;
        if pops > cap {
            return None;
        }
        for (target, landed) in model.discrete_post(&loc, &zone) {
            let Some(inv) = model.invariant_zone(&target) else { continue };
            let Some(mut next) = landed.up().intersect(&inv) else { continue };
            if let Some(k) = k {
                next = next.extrapolate(k);
            }
            let covered = seen.get(&target).map_or(false, |fed| {
                fed.includes(&Federation::from_zone(next.clone()))
            });
            if covered {
                continue;
            }
            let entry =
                seen.entry(target.clone()).or_insert_with(|| Federation::empty(model.dim()));
            *entry = entry.union(&Federation::from_zone(next.clone()));
            stack.push((target, next));
        }
    }
    Some(seen.keys().cloned().collect())
}

// ---------------------------------------------------------------------------
// 5. Relativised time operators collapse for trivial relativisers
// ---------------------------------------------------------------------------

#[test]
fn acceptance_5_reduction_identities() {
    report("acceptance 5 (relativised-operator reductions)", reduction_identities());
}

fn reduction_identities() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1de_2024);
    let mut trials = 0usize;
    let models = [
        ("csma", include_str!("golden/csma2.pes")),
        ("fischer", include_str!("golden/fischer2.pes")),
        ("grc", include_str!("golden/grc2.pes")),
        ("leader", include_str!("golden/leader2.pes")),
    ];
    for (name, golden) in models {
        let file = parse_pes(golden).map_err(|e| format!("{name}: {e}"))?;
        let model = Model::from_file(&file).map_err(|e| format!("{name}: {e}"))?;
        let mes = Mes::from_file(&file, &model).map_err(|e| format!("{name}: {e}"))?;
        let universe =
            Universe::build(&model, &mes, 200_000).map_err(|e| format!("{name}: {e}"))?;
        let full = universe.full_set();
        // Slot 0 carries the random operand, slot 1 the relativising set.
        let operand = || LFormula::Var(LVarRef { var: 0, assignments: vec![], resets: vec![] });
        let relativiser = || LFormula::Var(LVarRef { var: 1, assignments: vec![], resets: vec![] });
        let forall_rel =
            LFormula::ForallTimeRel(Box::new(relativiser()), Box::new(operand()));
        let forall_plain = LFormula::ForallTime(Box::new(operand()));
        let exists_rel =
            LFormula::ExistsTimeRel(Box::new(relativiser()), Box::new(operand()));
        let exists_plain = LFormula::ExistsTime(Box::new(operand()));
        let mut ev = Evaluator::new(&model, &universe, u64::MAX);
        for _ in 0..250 {
            let t = random_state_set(&mut rng, &universe);
            let env = [t.clone(), StateSet::empty()];
            let lhs = ev.eval(&forall_rel, &env).map_err(|e| format!("{name}: {e}"))?;
            let rhs = ev.eval(&forall_plain, &env).map_err(|e| format!("{name}: {e}"))?;
            if !lhs.set_eq(&rhs) {
                return Err(format!(
                    "{name}: forall-rel with an empty relativiser differs from plain forall"
                ));
            }
            let env = [t, full.clone()];
            let lhs = ev.eval(&exists_rel, &env).map_err(|e| format!("{name}: {e}"))?;
            let rhs = ev.eval(&exists_plain, &env).map_err(|e| format!("{name}: {e}"))?;
            if !lhs.set_eq(&rhs) {
                return Err(format!(
                    "{name}: exists-rel with the full relativiser differs from plain exists"
                ));
            }
            trials += 1;
        }
    }
    Ok(format!("{trials} random state sets satisfy both collapse identities across 4 models"))
}

fn random_state_set(rng: &mut ChaCha8Rng, universe: &Universe) -> StateSet {
    let mut s = StateSet::empty();
    for (loc, inv) in universe.iter() {
        if !rng.gen_bool(0.6) {
            continue;
        }
        let dim = inv.dim();
        let mut zones = Vec::new();
        for _ in 0..rng.gen_range(1usize..=2) {
            let mut z = inv.clone();
            for _ in 0..rng.gen_range(0usize..=4) {
                let i = rng.gen_range(0..dim);
                let mut j = rng.gen_range(0..dim);
                if j == i {
                    j = (j + 1) % dim;
                }
                let v = rng.gen_range(-20..=20i64);
                let b = if rng.gen_bool(0.5) { Bound::le(v) } else { Bound::lt(v) };
                if let Some(tightened) = z.with_constraint(i, j, b) {
                    z = tightened;
                }
            }
            zones.push(z);
        }
        let fed = Federation::from_zones(dim, zones);
        if !fed.is_empty() {
            s.insert(loc.clone(), fed);
        }
    }
    s
}

// ---------------------------------------------------------------------------
// 6. Equivalent encodings of the same toy system
// ---------------------------------------------------------------------------

#[test]
fn acceptance_6_toy_encodings() {
    report("acceptance 6 (equivalent toy encodings)", toy_encodings());
}

/// The same two-state ping-pong system written three ways: with a transition
/// section, with the edges substituted into the equation as variable jumps,
/// and split across two equation variables.
fn toy_sources(parity: &str) -> [(&'static str, String); 3] {
    let transitions = format!(
        r"
CLOCKS: {{x1}}
CONTROL: {{p1}}
INITIALLY: x1 == 0
PREDICATE: {{X}}
START: X
EQUATIONS: {{
1: {parity} X =\ExistAct(X)
}}
TRANSITIONS:
(p1 == 0)->(p1=1){{x1}};
(p1 == 1)->(p1=0);
"
    );
    let substituted = format!(
        r"
CLOCKS: {{x1}}
CONTROL: {{p1}}
INITIALLY: x1 == 0
PREDICATE: {{X}}
START: X
EQUATIONS: {{
1: {parity} X =((p1 == 0)->X[p1=1]{{x1}}) && ((p1 == 1)->X[p1=0])
}}
"
    );
    let split = format!(
        r"
CLOCKS: {{x1}}
CONTROL: {{p1}}
INITIALLY: x1 == 0
PREDICATE: {{X1, X2}}
START: X1
EQUATIONS: {{
1: {parity} X1 = X2{{x1}}
1: {parity} X2 = X1
}}
"
    );
    [
        ("transition section", transitions),
        ("substituted edges", substituted),
        ("split variables", split),
    ]
}

fn toy_encodings() -> Result<String, String> {
    let mut detail = Vec::new();
    for (parity, want) in [("nu", Verdict::Valid), ("mu", Verdict::Invalid)] {
        let mut verdicts = Vec::new();
        for (label, src) in toy_sources(parity) {
            let out = check_str(&src, &CheckOptions::default())
                .map_err(|e| format!("{parity} / {label}: {e}"))?;
            verdicts.push((label, out.verdict));
        }
        let first = verdicts[0].1;
        if first != want {
            return Err(format!("{parity} encodings give {first}, expected {want}"));
        }
        if verdicts.iter().any(|&(_, v)| v != first) {
            return Err(format!("{parity} encodings disagree: {verdicts:?}"));
        }
        detail.push(format!("{parity}: {first}"));
    }
    Ok(format!("all three encodings agree for each parity ({})", detail.join(", ")))
}
