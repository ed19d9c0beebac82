//! Acceptance criteria. Runs sequentially (timing is measured in-process) and
//! prints one PASS/FAIL line per criterion; exits non-zero if any fails.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;

use ordlevel::barcode::{barcode, Barcode};
use ordlevel::boxsnake::{build_box_snake, BoxSnake, Side, Snake, SurgeryReport};
use ordlevel::domain::rank_quantize;
use ordlevel::filtration::{beta0_balance_check, run_filtration};
use ordlevel::generate::{exhaustive, random_levels, random_plateaus, rng};
use ordlevel::oracle::{brute_force_beta0, graph_realization};
use ordlevel::suite::morse_events_hold;
use ordlevel::{Direction, Domain, IndexSubset, OrderedSequence, Rank, Rule};

const EXHAUSTIVE_N: usize = 8;
const EXHAUSTIVE_M: u32 = 4;
const RANDOM_TRIALS: usize = 1000;
const RULES: [Rule; 2] = [Rule::ElderLeftmost, Rule::LocalNeighbor];
const DIRECTIONS: [Direction; 2] = [Direction::Sub, Direction::Super];
const DOMAINS: [Domain; 2] = [Domain::Linear, Domain::Circular];

/// Outcome of one criterion: failure count plus a short summary.
struct Outcome {
    checks: usize,
    failures: usize,
    first: Option<String>,
    note: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome { checks: 0, failures: 0, first: None, note: String::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(what());
            }
        }
    }
}

fn each_exhaustive(mut f: impl FnMut(&OrderedSequence)) {
    for (v, m) in exhaustive(EXHAUSTIVE_N, EXHAUSTIVE_M) {
        for d in DOMAINS {
            f(&OrderedSequence::from_ranks(v.clone(), m, d).unwrap());
        }
    }
}

fn random_sequence(r: &mut impl Rng, max_n: usize, max_m: u32) -> OrderedSequence {
    let n = r.random_range(1..=max_n);
    let m = r.random_range(1..=(n as u32).min(max_m));
    let v = if r.random_bool(0.5) { random_levels(r, n, m) } else { random_plateaus(r, n, m) };
    let d = if r.random_bool(0.5) { Domain::Linear } else { Domain::Circular };
    OrderedSequence::from_ranks(v, m, d).unwrap()
}

fn show(seq: &OrderedSequence) -> String {
    format!("{:?} {:?}", seq.domain(), seq.levels())
}

fn c1_oracle_equivalence() -> Outcome {
    let mut o = Outcome::new();
    each_exhaustive(|seq| {
        for dir in DIRECTIONS {
            let f = run_filtration(seq, dir);
            let engine: HashMap<Rank, usize> = f.beta0_by_level().into_iter().collect();
            let bars: Vec<Barcode> = RULES.iter().map(|&r| barcode(seq, r, dir)).collect();
            for l in 0..seq.universe().size() {
                let brute = brute_force_beta0(seq, l, dir).unwrap();
                o.check(engine.get(&l) == Some(&brute), || format!("beta0 {dir:?} l={l} {}", show(seq)));
                for bc in &bars {
                    o.check(bc.alive_after(l) == brute, || {
                        format!("alive {:?} {dir:?} l={l} {}", bc.rule, show(seq))
                    });
                }
            }
            o.check(beta0_balance_check(&f), || format!("balance {dir:?} {}", show(seq)));
        }
    });
    o.note = format!("{} checks over N<={EXHAUSTIVE_N}, M<={EXHAUSTIVE_M}", o.checks);
    o
}

fn c2_morse_events() -> Outcome {
    let mut o = Outcome::new();
    each_exhaustive(|seq| {
        for dir in DIRECTIONS {
            o.check(morse_events_hold(&run_filtration(seq, dir)), || format!("{dir:?} {}", show(seq)));
        }
    });
    o.note = format!("{} filtrations", o.checks);
    o
}

/// One sample per flat; a wrapping flat on a circle keeps a single sample.
fn collapse_flats(seq: &OrderedSequence) -> OrderedSequence {
    let mut v = seq.levels().to_vec();
    if seq.domain().is_circular() {
        if let Some(k) = (0..v.len()).find(|&i| v[i] != v[(i + v.len() - 1) % v.len()]) {
            v.rotate_left(k);
        }
    }
    v.dedup();
    if seq.domain().is_circular() && v.len() > 1 && v.first() == v.last() {
        v.pop();
    }
    OrderedSequence::from_ranks(v, seq.universe().size(), seq.domain()).unwrap()
}

fn c3_flat_robustness() -> Outcome {
    let mut o = Outcome::new();
    let mut r = rng(3);
    for _ in 0..RANDOM_TRIALS {
        let seq = random_sequence(&mut r, 256, 32);
        let collapsed = collapse_flats(&seq);
        for rule in RULES {
            for dir in DIRECTIONS {
                o.check(
                    barcode(&seq, rule, dir).level_multiset() == barcode(&collapsed, rule, dir).level_multiset(),
                    || format!("{rule:?} {dir:?} {}", show(&seq)),
                );
            }
        }
    }
    o.note = format!("{RANDOM_TRIALS} sequences, both rules and filtrations");
    o
}

fn inversion_holds(seq: &OrderedSequence, rule: Rule) -> bool {
    let top = seq.universe().size() - 1;
    let mapped: Vec<_> = barcode(&seq.invert_order(), rule, Direction::Sub)
        .bars
        .into_iter()
        .map(|b| (top - b.birth_level, top - b.death_level, b.birth_index, b.death_index, b.essential))
        .collect();
    let direct: Vec<_> = barcode(seq, rule, Direction::Super)
        .bars
        .into_iter()
        .map(|b| (b.birth_level, b.death_level, b.birth_index, b.death_index, b.essential))
        .collect();
    mapped == direct
}

fn c4_inversion() -> Outcome {
    let mut o = Outcome::new();
    each_exhaustive(|seq| {
        for rule in RULES {
            o.check(inversion_holds(seq, rule), || format!("{rule:?} {}", show(seq)));
        }
    });
    let exhaustive_checks = o.checks;
    let mut r = rng(4);
    for _ in 0..RANDOM_TRIALS {
        let seq = random_sequence(&mut r, 256, 256);
        for rule in RULES {
            o.check(inversion_holds(&seq, rule), || format!("{rule:?} {}", show(&seq)));
        }
    }
    o.note = format!("{exhaustive_checks} exhaustive + {} random checks", o.checks - exhaustive_checks);
    o
}

fn c5_circular_symmetry() -> Outcome {
    let mut o = Outcome::new();
    let rule = Rule::ElderLeftmost;
    each_exhaustive(|seq| {
        if !seq.domain().is_circular() {
            return;
        }
        let sub = barcode(seq, rule, Direction::Sub).level_multiset();
        let mut sup: Vec<_> = barcode(seq, rule, Direction::Super)
            .bars
            .iter()
            .map(|b| (b.death_level, b.birth_level, b.essential))
            .collect();
        sup.sort_unstable();
        o.check(sub == sup, || show(seq));
    });
    // Linear cosine-like shape: two sublevel components, three superlevel ones.
    let cosine = OrderedSequence::from_ranks(vec![2, 0, 3, 1, 2], 4, Domain::Linear).unwrap();
    for rule in RULES {
        let sub = barcode(&cosine, rule, Direction::Sub).len();
        let sup = barcode(&cosine, rule, Direction::Super).len();
        o.check((sub, sup) == (2, 3), || format!("cosine {rule:?}: sub {sub}, super {sup}"));
    }
    o.note = format!("{} circular instances (elder rule); cosine shape 2 vs 3 bars", o.checks - 2);
    o
}

fn extremum_count(snakes: &[&Snake]) -> (isize, isize) {
    snakes.iter().fold((0, 0), |(a, b), s| {
        let (m, x) = s.box_snake().extremum_counts();
        (a + m as isize, b + x as isize)
    })
}

fn deltas_match(before: (isize, isize), after: (isize, isize), rep: &SurgeryReport) -> bool {
    (after.0 - before.0, after.1 - before.1) == (rep.delta_minima, rep.delta_maxima)
}

fn fresh(s: &Snake) -> bool {
    s.box_snake() == &build_box_snake(s.sequence())
}

fn c6_surgery() -> Outcome {
    let mut o = Outcome::new();
    each_exhaustive(|seq| {
        let whole = Snake::new(seq.clone());
        let before = extremum_count(&[&whole]);
        let n = seq.len();
        if seq.domain().is_circular() {
            for p in 0..n {
                let (open, cut) = whole.clone().linearize_at(p).unwrap();
                o.check(fresh(&open), || format!("linearize fresh p={p} {}", show(seq)));
                let mid = extremum_count(&[&open]);
                o.check(deltas_match(before, mid, &cut), || format!("linearize delta p={p} {}", show(seq)));
                let (closed, glue) = open.glue_ends().unwrap();
                let mut rotated = seq.levels().to_vec();
                rotated.rotate_left((p + 1) % n);
                o.check(closed.sequence().levels() == &rotated[..] && fresh(&closed), || {
                    format!("circle round trip p={p} {}", show(seq))
                });
                o.check(deltas_match(mid, extremum_count(&[&closed]), &glue), || {
                    format!("circularize delta p={p} {}", show(seq))
                });
            }
            return;
        }
        for p in 0..n.saturating_sub(1) {
            let (a, b, cut) = whole.clone().cut(p).unwrap();
            o.check(fresh(&a) && fresh(&b), || format!("cut fresh p={p} {}", show(seq)));
            let mid = extremum_count(&[&a, &b]);
            o.check(deltas_match(before, mid, &cut), || format!("cut delta p={p} {}", show(seq)));
            let (g, glue) = Snake::glue(a.clone(), b.clone()).unwrap();
            o.check(g == whole, || format!("glue(cut) p={p} {}", show(seq)));
            o.check(deltas_match(mid, extremum_count(&[&g]), &glue), || {
                format!("glue delta p={p} {}", show(seq))
            });
            let (a2, b2, _) = g.cut(a.len() - 1).unwrap();
            o.check(a2 == a && b2 == b, || format!("cut(glue) p={p} {}", show(seq)));
        }
    });
    o.note = format!("{} checks, every position", o.checks);
    o
}

fn shifted_levels(v: &[Rank], side: Side, block: &[Rank]) -> Vec<Rank> {
    let m = block.len();
    match side {
        Side::Left => v[m..].iter().chain(block).copied().collect(),
        Side::Right => block.iter().chain(&v[..v.len() - m]).copied().collect(),
    }
}

fn c7_streaming() -> Outcome {
    let mut o = Outcome::new();
    let mut r = rng(7);
    for _ in 0..RANDOM_TRIALS {
        let n = r.random_range(1..=512);
        let size = r.random_range(1..=64);
        let d = if r.random_bool(0.5) { Domain::Linear } else { Domain::Circular };
        let v = random_plateaus(&mut r, n, size);
        let m = r.random_range(1..=n);
        let block = random_levels(&mut r, m, size);
        let side = if r.random_bool(0.5) { Side::Left } else { Side::Right };
        let seq = OrderedSequence::from_ranks(v.clone(), size, d).unwrap();
        let moved = Snake::new(seq).shift(side, block.clone()).unwrap();
        let expect = OrderedSequence::from_ranks(shifted_levels(&v, side, &block), size, d).unwrap();
        let reference: BoxSnake = build_box_snake(&expect);
        let what = || format!("{d:?} n={n} m={m} {side:?}");
        o.check(moved.sequence() == &expect && moved.box_snake() == &reference, what);
        for rule in RULES {
            for dir in DIRECTIONS {
                o.check(moved.barcode(rule, dir) == barcode(&expect, rule, dir), what);
            }
        }
    }
    o.note = format!("{RANDOM_TRIALS} shifts, N<=512");
    o
}

fn c8_monotone_edits() -> Outcome {
    let mut o = Outcome::new();
    let mut r = rng(8);
    let mut edits = 0;
    while edits < RANDOM_TRIALS {
        let seq = random_sequence(&mut r, 128, 32);
        let mut snake = Snake::new(seq.clone());
        let i = r.random_range(0..seq.len());
        let level = r.random_range(0..seq.universe().size());
        if snake.validate_monotone_edit(i, level).is_err() {
            continue;
        }
        edits += 1;
        let before: Vec<Barcode> =
            RULES.iter().flat_map(|&rule| DIRECTIONS.map(|dir| barcode(&seq, rule, dir))).collect();
        snake.apply_monotone_edit(i, level).unwrap();
        let edited = snake.sequence().clone();
        let after: Vec<Barcode> =
            RULES.iter().flat_map(|&rule| DIRECTIONS.map(|dir| barcode(&edited, rule, dir))).collect();
        o.check(before == after && fresh(&snake), || format!("i={i} l={level} {}", show(&seq)));
    }
    o.note = format!("{edits} valid edits");
    o
}

/// Number of bars as counted by brute force: every component of the closed
/// sublevel (superlevel) set at `l` that lies entirely at `l` is a birth.
fn brute_force_bar_count(seq: &OrderedSequence, dir: Direction) -> usize {
    let n = seq.len();
    (0..seq.universe().size())
        .map(|l| {
            let inside = |x: Rank| match dir {
                Direction::Sub => x <= l,
                Direction::Super => x >= l,
            };
            let members = (0..n).filter(|&i| inside(seq.level(i)));
            let s = IndexSubset::from_indices(n, seq.domain(), members);
            let g = graph_realization(&s);
            let mut fresh_components = 0;
            let mut seen = vec![false; n];
            for start in s.iter() {
                if seen[start] {
                    continue;
                }
                let mut stack = vec![start];
                let mut all_at_l = true;
                seen[start] = true;
                while let Some(i) = stack.pop() {
                    all_at_l &= seq.level(i) == l;
                    for &(a, b) in &g.edges {
                        let j = if a == i { b } else if b == i { a } else { continue };
                        if !seen[j] {
                            seen[j] = true;
                            stack.push(j);
                        }
                    }
                }
                fresh_components += usize::from(all_at_l);
            }
            fresh_components
        })
        .sum()
}

fn c9_figures() -> Outcome {
    let mut o = Outcome::new();
    let samples: Vec<f64> =
        (0..32).map(|i| (2.0 * std::f64::consts::PI * i as f64 / 16.0).sin()).collect();
    let sine = rank_quantize(&samples, Domain::Circular).unwrap();
    for dir in DIRECTIONS {
        let brute = brute_force_bar_count(&sine, dir);
        for rule in RULES {
            let got = barcode(&sine, rule, dir).len();
            o.check(brute == 2 && got == brute, || format!("sine {rule:?} {dir:?}: {got} bars, brute {brute}"));
        }
    }
    for d in DOMAINS {
        let flat = rank_quantize(&[1.5; 7], d).unwrap();
        for rule in RULES {
            for dir in DIRECTIONS {
                let bc = barcode(&flat, rule, dir);
                let ok = bc.len() == 1 && bc.bars[0].essential && bc.bars[0].is_zero_length();
                o.check(ok, || format!("constant {d:?} {rule:?} {dir:?}: {:?}", bc.bars));
            }
        }
    }
    // Global minimum at 0, global maximum at 3.
    let shape = OrderedSequence::from_ranks(vec![0, 2, 1, 3, 1], 4, Domain::Linear).unwrap();
    let partner = |rule| {
        let bc = barcode(&shape, rule, Direction::Sub);
        bc.bars.iter().find(|b| b.birth_index == 0).map(|b| (b.death_level, b.death_index))
    };
    let elder = partner(Rule::ElderLeftmost);
    let local = partner(Rule::LocalNeighbor);
    o.check(elder == Some((3, 3)), || format!("elder pairs global min with {elder:?}"));
    o.check(local == Some((2, 1)), || format!("local pairs global min with {local:?}"));
    o.note = "sine 2+2 bars, constant bar, elder/local divergence".into();
    o
}

fn timed_barcode(values: &[f64]) -> (Duration, BoxSnake) {
    let start = Instant::now();
    let seq = rank_quantize(values, Domain::Linear).unwrap();
    let bc = barcode(&seq, Rule::ElderLeftmost, Direction::Sub);
    let elapsed = start.elapsed();
    assert!(!bc.is_empty());
    (elapsed, build_box_snake(&seq))
}

fn best_of(values: &[f64], runs: usize) -> (Duration, BoxSnake) {
    let mut best = timed_barcode(values);
    for _ in 1..runs {
        let t = timed_barcode(values);
        if t.0 < best.0 {
            best = t;
        }
    }
    best
}

fn hierarchy_holds(n: usize, bs: &BoxSnake) -> bool {
    n >= bs.boxes.len() && bs.boxes.len() >= bs.extrema().count()
}

fn c10_cost() -> Outcome {
    let mut o = Outcome::new();
    let mut r = rng(10);
    let million: Vec<f64> = (0..1_000_000).map(|_| r.random()).collect();
    let (t, bs) = best_of(&million, 3);
    o.check(t < Duration::from_secs(1), || format!("1e6 samples took {t:?}"));
    o.check(hierarchy_holds(million.len(), &bs), || "hierarchy at 1e6".into());
    let sizes = [100_000, 200_000, 400_000, 800_000];
    let times: Vec<Duration> = sizes
        .iter()
        .map(|&n| {
            let values: Vec<f64> = (0..n).map(|_| r.random()).collect();
            let (t, bs) = best_of(&values, 5);
            o.check(hierarchy_holds(n, &bs), || format!("hierarchy at {n}"));
            t
        })
        .collect();
    let ratios: Vec<f64> = times.windows(2).map(|w| w[1].as_secs_f64() / w[0].as_secs_f64()).collect();
    for (k, ratio) in ratios.iter().enumerate() {
        o.check(*ratio < 3.0, || format!("time({})/time({}) = {ratio:.2}", sizes[k + 1], sizes[k]));
    }
    each_exhaustive(|seq| o.check(hierarchy_holds(seq.len(), &build_box_snake(seq)), || show(seq)));
    o.note = format!(
        "1e6 in {:.0} ms; doubling ratios {}",
        t.as_secs_f64() * 1e3,
        ratios.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(", ")
    );
    o
}

fn c11_graph_realization() -> Outcome {
    let mut o = Outcome::new();
    for n in 1..=12usize {
        for d in DOMAINS {
            for mask in 0u32..(1 << n) {
                let s = IndexSubset::from_indices(n, d, (0..n).filter(|&i| mask >> i & 1 == 1));
                let g = graph_realization(&s);
                o.check(g.component_count() == s.betti().b0, || format!("b0 {d:?} n={n} {mask:#b}"));
                for i in (0..n).filter(|&i| mask >> i & 1 == 0) {
                    let bigger = graph_realization(&s.union(&IndexSubset::from_indices(n, d, [i])));
                    o.check(g.is_subgraph_of(&bigger), || format!("nesting {d:?} n={n} {mask:#b} +{i}"));
                }
            }
        }
    }
    o.note = format!("{} checks over subsets of I_n, n<=12", o.checks);
    o
}

type Criterion = fn() -> Outcome;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 11] = [
        ("oracle equivalence", c1_oracle_equivalence),
        ("morse-like events", c2_morse_events),
        ("flat robustness", c3_flat_robustness),
        ("order-inversion duality", c4_inversion),
        ("circular symmetry", c5_circular_symmetry),
        ("surgery round trips", c6_surgery),
        ("incremental streaming", c7_streaming),
        ("monotone-edit invariance", c8_monotone_edits),
        ("desk-scale figures", c9_figures),
        ("linear cost", c10_cost),
        ("graph realization", c11_graph_realization),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let secs = start.elapsed().as_secs_f64();
        if o.failures == 0 {
            println!("PASS criterion {}: {name} ({}; {secs:.1} s)", k + 1, o.note);
        } else {
            failed += 1;
            println!(
                "FAIL criterion {}: {name} ({} of {} checks failed; first: {})",
                k + 1,
                o.failures,
                o.checks,
                o.first.unwrap_or_default()
            );
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
