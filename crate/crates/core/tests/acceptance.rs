//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use canonforge::parallel::{execute_parallel, Strategy};
use canonforge::problems::{automata, digraphs, reset_word_pipeline, without_loops, ResetMode};
use canonforge::value::is_isomorphic;
use canonforge::{cnfs, Domain, Output, Pipeline, PoolConfig, Uset, Value};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Outcome {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))
}

fn collect(d: &Domain) -> Vec<Value> {
    cnfs(d).unwrap().map(|v| v.unwrap()).collect()
}

fn digraphs_two() -> Outcome {
    let start = Instant::now();
    let g = digraphs(2).unwrap();
    let all = Pipeline::iterate(&g).count().run().unwrap();
    ensure(all == Output::Count(16), || format!("iterate gave {all:?}"))?;
    let mut values = collect(&g);
    values.sort();
    let got: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    let mut sorted = got.clone();
    sorted.sort();
    let mut want: Vec<String> = [
        "{}",
        "{(n0, n0)}",
        "{(n0, n0), (n1, n1)}",
        "{(n0, n0), (n0, n1)}",
        "{(n0, n0), (n0, n1), (n1, n1)}",
        "{(n0, n0), (n0, n1), (n1, n0)}",
        "{(n0, n0), (n0, n1), (n1, n0), (n1, n1)}",
        "{(n0, n0), (n1, n0)}",
        "{(n0, n1)}",
        "{(n0, n1), (n1, n0)}",
    ]
    .map(String::from)
    .to_vec();
    want.sort();
    ensure(sorted == want, || format!("cnfs rendering {got:?}"))?;
    ensure(got[0] == "{}" && got[1] == "{(n0, n0)}", || {
        "listing starts wrong".into()
    })?;
    within(Duration::from_secs(1), start)
}

fn small_fixtures() -> Outcome {
    let start = Instant::now();
    let a = Domain::uset(3, "a").unwrap();
    let b = Domain::uset(2, "b").unwrap();
    let pairs: Vec<String> = collect(&(&a * &a)).iter().map(|v| v.to_string()).collect();
    ensure(pairs == ["(a0, a0)", "(a0, a1)"], || format!("a*a gave {pairs:?}"))?;
    let join: Vec<String> = collect(&(&a + &b)).iter().map(|v| v.to_string()).collect();
    ensure(join == ["a0", "b0"], || format!("a+b gave {join:?}"))?;
    let subsets = collect(&Domain::subsets(&a).unwrap());
    let mut sizes: Vec<usize> = subsets.iter().map(|s| s.as_set().unwrap().len()).collect();
    sizes.sort();
    ensure(sizes == [0, 1, 2, 3], || format!("subset sizes {sizes:?}"))?;
    within(Duration::from_secs(1), start)
}

fn scale() -> Outcome {
    let start = Instant::now();
    let u = Domain::uset(1000, "big").unwrap();
    let n = collect(&(&u * &u)).len();
    ensure(n == 2, || format!("got {n} classes"))?;
    within(Duration::from_secs(1), start)
}

fn size_table() -> Outcome {
    let a = Domain::range(2);
    let b = Domain::values(["a", "b", "c"].map(Value::text));
    let cases = [
        ("product", &a * &b, 6),
        ("subsets", Domain::subsets(&a).unwrap(), 4),
        ("mappings", Domain::mappings(&a, &a).unwrap(), 4),
        ("sequences", Domain::sequences(&a, 3).unwrap(), 8),
        ("join", &a + &b, 5),
    ];
    for (name, d, want) in cases {
        ensure(d.size_u64() == Some(want), || format!("{name} size {:?}", d.size_u64()))?;
        let n = d.iter().count() as u64;
        ensure(n == want, || format!("{name} iterates {n}"))?;
    }
    Ok(())
}

fn isomorphism_fixtures() -> Outcome {
    let a = Uset::new(3, "a");
    let b = Uset::new(2, "b");
    let av = |i| Value::from(a.atom(i));
    let bv = |i| Value::from(b.atom(i));
    let cases = [
        (av(0), av(2), true),
        (bv(1), bv(0), true),
        (av(0), bv(0), false),
        (Value::tuple([av(0), bv(0)]), Value::tuple([av(2), bv(1)]), true),
        (Value::tuple([av(0), av(0)]), Value::tuple([av(0), av(2)]), false),
    ];
    for (x, y, want) in cases {
        ensure(is_isomorphic(&x, &y) == want, || {
            format!("is_isomorphic({x}, {y}) != {want}")
        })?;
    }
    Ok(())
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let pool = [Uset::new(2, "p"), Uset::new(3, "r"), Uset::new(4, "s")];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    let mut attempts = 0;
    while checked < 30 {
        attempts += 1;
        if attempts > 100_000 {
            return Err(format!("only {checked} domains drawn"));
        }
        let Some(d) = common::random_strict_domain(&mut rng, &pool, 3, 20_000) else {
            continue;
        };
        if d.span() < &40u32.into() {
            continue;
        }
        let Some(want) = common::oracle_cnfs(&d) else {
            continue;
        };
        if want.len() as u64 == d.iter().count() as u64 {
            continue;
        }
        let mut got = collect(&d);
        let n = got.len();
        got.sort();
        got.dedup();
        ensure(got.len() == n, || format!("duplicates in cnfs of {d}"))?;
        ensure(got == want, || {
            format!("cnfs of {d}: {} vs oracle {}", got.len(), want.len())
        })?;
        checked += 1;
    }
    within(Duration::from_secs(60), start)
}

fn digraphs_three() -> Outcome {
    let oracle = common::bitmask_digraph_classes(3);
    ensure(oracle == 104, || format!("oracle gave {oracle}"))?;
    let n = collect(&digraphs(3).unwrap()).len();
    ensure(n == oracle, || format!("engine gave {n}"))
}

fn reset_words() -> Outcome {
    let start = Instant::now();
    let oracle = common::exhaustive_reset_max(3, 2) as i64;
    ensure(oracle == 4, || format!("oracle gave {oracle}"))?;
    let a = automata(3, 2).unwrap();
    for mode in [ResetMode::Cnfs, ResetMode::Iterate] {
        let best = reset_word_pipeline(&a, mode).run().unwrap().into_list().unwrap();
        ensure(best == [Value::Int(oracle)], || format!("{mode:?} gave {best:?}"))?;
    }
    within(Duration::from_secs(30), start)
}

fn serial_parallel() -> Outcome {
    let grid = &Domain::range(5) * &Domain::range(3);
    let listing = Pipeline::iterate(&grid).run().unwrap();
    let no_loops = without_loops(&digraphs(3).unwrap());
    let serial_count = Pipeline::iterate(&no_loops).count().run().unwrap();
    let graphs = digraphs(2).unwrap();
    let mut serial_cnfs = collect(&graphs);
    serial_cnfs.sort();
    for w in [1, 2, 4, 8] {
        let mut cfg = PoolConfig::new(w);
        cfg.limits.initial = 4;
        cfg.limits.min = 1;
        let got = execute_parallel(&Pipeline::iterate(&grid), &cfg, 0).unwrap().output;
        ensure(got == listing, || format!("{w} workers collect {got:?}"))?;
        let got = execute_parallel(&Pipeline::iterate(&no_loops).count(), &cfg, 0)
            .unwrap()
            .output;
        ensure(got == serial_count, || format!("{w} workers count {got:?}"))?;
        let report = execute_parallel(&Pipeline::cnfs(&graphs), &cfg, 0).unwrap();
        ensure(report.strategy == Strategy::Fallback, || "cnfs not on fallback".into())?;
        let mut got = report.output.into_list().unwrap();
        got.sort();
        ensure(got == serial_cnfs, || format!("{w} workers cnfs {got:?}"))?;
    }
    Ok(())
}

fn filtered_conservation() -> Outcome {
    let odd = Domain::range(30).filter(|x| Ok(x.as_int().unwrap() % 2 == 1));
    let thirds = Domain::range(12).filter(|x| Ok(x.as_int().unwrap() % 3 == 0));
    let d = &odd * &thirds;
    let serial = Pipeline::iterate(&d).run().unwrap();
    let mut cfg = PoolConfig::new(3);
    cfg.limits.initial = 7;
    cfg.limits.min = 1;
    let report = execute_parallel(&Pipeline::iterate(&d), &cfg, 0).unwrap();
    ensure(report.strategy == Strategy::Filtered, || {
        format!("strategy {:?}", report.strategy)
    })?;
    for r in &report.jobs {
        let s = r.stats;
        ensure(s.produced + s.skipped == s.span, || {
            format!("job {} broke conservation", r.job.id)
        })?;
    }
    ensure(report.output == serial, || "job outputs differ from serial".into())
}

fn digraphs_five() -> Outcome {
    let start = Instant::now();
    let oracle = common::burnside_digraphs(5) as usize;
    let n = cnfs(&digraphs(5).unwrap()).unwrap().count();
    ensure(n == oracle, || format!("engine gave {n}, oracle {oracle}"))?;
    within(Duration::from_secs(120), start)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("1 digraphs n=2 iterate 16, cnfs 10", digraphs_two),
        ("2 small canonical-form fixtures", small_fixtures),
        ("3 uset(1000)^2 has 2 classes in < 1 s", scale),
        ("4 composition sizes match iteration", size_table),
        ("5 isomorphism fixtures", isomorphism_fixtures),
        ("6 cnfs equals oracle on random strict domains", oracle_equivalence),
        ("7 digraphs n=3 cnfs count 104", digraphs_three),
        ("8 reset words (3,2) maximum 4", reset_words),
        ("9 serial and parallel agree", serial_parallel),
        ("10 filtered slicing conserves positions", filtered_conservation),
        ("11 digraphs n=5 cnfs in < 120 s", digraphs_five),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        let start = Instant::now();
        match check() {
            Ok(()) => println!("PASS {name} ({:.2?})", start.elapsed()),
            Err(e) => {
                println!("FAIL {name}: {e}");
                failed.push(name);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed {failed:?}");
        ExitCode::FAILURE
    }
}
