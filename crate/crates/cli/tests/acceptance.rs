//! Acceptance run: one line per criterion, nonzero exit if any fails. A
//! criterion the host cannot exercise (too few cores) prints UNVERIFIED with
//! its measurements and does not fail the run.
//!
//! `cargo test --test acceptance -- 3 4` runs only criteria 3 and 4.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use qsplit_core::pipeline::{chunk_sizes, partition, CompileReport};
use qsplit_core::{
    build_permutation, check_nna, compile_parallel, compute_metrics, fidelity_under_layout, generate_with_density,
    parse_qasm, profile_run, serialize_qasm, simulate, Circuit, CouplingMap, DensitySpec, GateKind, Instruction,
    Layout, ProfileOptions, RouterMode,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

enum Verdict {
    Pass(String),
    /// The host cannot exercise the criterion; the detail says why.
    Unverified(String),
}

type Check = Result<Verdict, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

const LOOKAHEAD: RouterMode = RouterMode::Lookahead { window: 20 };

fn swaps_in(c: &Circuit) -> u64 {
    c.instructions.iter().filter(|i| i.kind == GateKind::Swap).count() as u64
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// Generates a width-`width` density-1.0 circuit and keeps its first `gates`
/// instructions.
fn dense_prefix(width: u32, gates: usize, seed: u64) -> Circuit {
    let depth = (gates as u32 * 2).div_ceil(width) + 16;
    let mut c = generate_with_density(&DensitySpec::new(width, depth, 1.0, seed)).unwrap();
    assert!(c.instructions.len() >= gates);
    c.instructions.truncate(gates);
    c.name = format!("dense_w{width}_g{gates}_s{seed}");
    c
}

fn write_input(dir: &Path, c: &Circuit) -> PathBuf {
    let p = dir.join(format!("{}.qasm", c.name));
    std::fs::write(&p, serialize_qasm(c)).unwrap();
    p
}

fn profile(input: &Path, map: &CouplingMap, n_sc: usize, router: RouterMode, dir: &Path) -> CompileReport {
    let opts = ProfileOptions {
        n_sc,
        router,
        workers: None,
        parallel_output: dir.join("parallel.qasm"),
        monolithic_output: Some(dir.join("monolithic.qasm")),
    };
    profile_run(input, map, &opts).unwrap().report
}

fn c1_density_exactness() -> Check {
    let widths = [6u32, 20, 50];
    let depths = [100u32, 10_000];
    let tenths = [10u64, 7, 5, 2];
    for i in 0..40u64 {
        let w = widths[i as usize % 3];
        let d = depths[i as usize / 3 % 2];
        let t = tenths[i as usize / 6 % 4];
        let spec = DensitySpec::new(w, d, t as f64 / 10.0, i);
        let c = generate_with_density(&spec).map_err(|e| format!("{spec:?}: {e}"))?;
        let m = compute_metrics(&c).unwrap();
        let max_ops = w as u64 * d as u64;
        let target = (max_ops * t).div_ceil(10);
        ensure!(m.width == w && m.depth == d as u64, "{spec:?}: width {} depth {}", m.width, m.depth);
        ensure!(m.occupied_slots() == target, "{spec:?}: {} slots, want {target}", m.occupied_slots());
        ensure!(
            m.density == target as f64 / max_ops as f64,
            "{spec:?}: density {} want {}/{max_ops}",
            m.density,
            target
        );
    }
    for w in widths {
        let floor = DensitySpec::new(w, 100, 1.0 / w as f64, 1);
        let m = compute_metrics(&generate_with_density(&floor).map_err(|e| format!("floor w={w}: {e}"))?).unwrap();
        ensure!(m.occupied_slots() == 100, "floor w={w}: {} slots", m.occupied_slots());
        let below = DensitySpec::new(w, 100, 0.99 / w as f64, 1);
        ensure!(generate_with_density(&below).is_err(), "density below 1/{w} accepted");
    }
    Ok(Verdict::Pass("40 circuits exact; 1/width floor accepted, below rejected".into()))
}

fn c2_partitioning() -> Check {
    for (n_g, n_sc) in [(29usize, 3usize), (100, 1), (1_000_003, 16)] {
        let g = n_g / n_sc;
        let mut want = vec![g; n_sc - 1];
        want.push(n_g - g * (n_sc - 1));
        let got = chunk_sizes(n_g, n_sc).map_err(|e| e.to_string())?;
        ensure!(got == want, "({n_g}, {n_sc}): {got:?}");
    }
    ensure!(chunk_sizes(29, 3).unwrap() == [9, 9, 11], "29/3");

    let fixture = common::six_qubit_example();
    ensure!(fixture.gate_count() == 29, "fixture has {} gates", fixture.gate_count());
    let plan = partition(&fixture, 3).map_err(|e| e.to_string())?;
    ensure!(plan.gate_counts == [9, 9, 11], "fixture chunks {:?}", plan.gate_counts);

    let mut big = Circuit::new("big", 4);
    for i in 0..1_000_003u32 {
        big.push(Instruction::one(GateKind::H, i % 4));
    }
    let plan = partition(&big, 16).map_err(|e| e.to_string())?;
    let lens: Vec<usize> = plan.sub_circuits(&big).iter().map(|c| c.gate_count()).collect();
    ensure!(lens[..15].iter().all(|&l| l == 62_500) && lens[15] == 62_503, "{lens:?}");
    Ok(Verdict::Pass("all chunk sizes match; 29/3 -> 9, 9, 11".into()))
}

fn permutations(n: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn restores(map: &CouplingMap, phys_to_logical: Vec<u32>) -> Result<usize, String> {
    let layout = Layout::from_phys_to_logical(phys_to_logical.clone()).unwrap();
    let plan = build_permutation(&layout, map).map_err(|e| format!("{phys_to_logical:?}: {e}"))?;
    let mut v = phys_to_logical;
    for &(a, b) in &plan.swaps {
        ensure!(map.is_coupled(a, b), "swap ({a}, {b}) is not an edge");
        v.swap(a as usize, b as usize);
    }
    ensure!(v.iter().enumerate().all(|(p, &l)| p as u32 == l), "ends at {v:?}");
    Ok(plan.len())
}

fn c3_permutation_restoration() -> Check {
    let g6 = CouplingMap::grid(6).unwrap();
    let all = permutations(6);
    ensure!(all.len() == 720, "{} permutations", all.len());
    let mut swaps6 = 0;
    for p in all {
        swaps6 += restores(&g6, p)?;
    }
    let g40 = CouplingMap::grid(40).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let mut swaps40 = 0;
    for _ in 0..500 {
        let mut p: Vec<u32> = (0..40).collect();
        p.shuffle(&mut rng);
        swaps40 += restores(&g40, p)?;
    }
    Ok(Verdict::Pass(format!("720 grid(6) layouts ({swaps6} swaps), 500 grid(40) layouts ({swaps40} swaps)")))
}

fn c4_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut runs = 0;
    for i in 0..50u64 {
        let width = 3 + (i % 6) as u32;
        let density = [1.0, 0.5][i as usize / 6 % 2];
        let depth = rng.gen_range(20..=2000 / width);
        let spec = DensitySpec::new(width, depth, density, 1000 + i);
        let c = generate_with_density(&spec).unwrap();
        ensure!(c.gate_count() <= 2000, "{spec:?}: {} gates", c.gate_count());
        for map in [CouplingMap::grid(width).unwrap(), CouplingMap::linear(width).unwrap()] {
            for router in [RouterMode::Basic, LOOKAHEAD] {
                for n_sc in [1, 2, 4, 8] {
                    let out = compile_parallel(&c, &map, n_sc, router, Some(n_sc)).map_err(|e| e.to_string())?;
                    let f = fidelity_under_layout(&c, &out.circuit, &out.final_layout).map_err(|e| e.to_string())?;
                    let tag = format!("{spec:?} {} {} n_sc={n_sc}", map.kind(), router.name());
                    ensure!(f >= 1.0 - 1e-9, "{tag}: fidelity {f}");
                    let v = check_nna(&out.circuit, &map);
                    ensure!(v.is_empty(), "{tag}: {} NNA violations", v.len());
                    runs += 1;
                }
            }
        }
    }
    Ok(Verdict::Pass(format!("{runs} compilations equivalent and NNA-compliant")))
}

fn reconcile(input: &Circuit, dir: &Path, r: &CompileReport) -> Result<(), String> {
    let read = |name: &str| parse_qasm(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap();
    let (par, mono) = (read("parallel.qasm"), read("monolithic.qasm"));
    let a = &r.accounting;
    let chunk_routing: u64 = r.chunks.iter().map(|c| c.routing_swaps).sum();
    let chunk_perm: u64 = r.chunks.iter().map(|c| c.permutation_swaps).sum();
    let base = swaps_in(input);
    ensure!(r.reconciles(), "report does not reconcile itself");
    ensure!(chunk_routing == a.parallel_routing_swaps, "chunk routing {chunk_routing}");
    ensure!(chunk_perm == a.permutation_swaps, "chunk permutation {chunk_perm}");
    ensure!(a.routing_swap_delta == chunk_routing as i64 - a.monolithic_routing_swaps as i64, "delta");
    ensure!(swaps_in(&par) == base + chunk_routing + chunk_perm, "parallel file swaps {}", swaps_in(&par));
    ensure!(swaps_in(&mono) == base + a.monolithic_routing_swaps, "monolithic file swaps {}", swaps_in(&mono));
    let gate_diff = par.gate_count() as i64 - mono.gate_count() as i64;
    ensure!(
        gate_diff == a.permutation_swaps as i64 + a.routing_swap_delta,
        "gates {} - {} != {} + {}",
        par.gate_count(),
        mono.gate_count(),
        a.permutation_swaps,
        a.routing_swap_delta
    );
    ensure!(r.parallel.gate_count == par.gate_count() as u64, "report parallel gates");
    ensure!(r.monolithic.gate_count == mono.gate_count() as u64, "report monolithic gates");
    Ok(())
}

fn c5_accounting() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let mut inputs = vec![common::six_qubit_example()];
    for i in 0..12u64 {
        let width = 4 + (i % 5) as u32;
        inputs.push(generate_with_density(&DensitySpec::new(width, 60 + 20 * i as u32, [1.0, 0.5][i as usize % 2], i)).unwrap());
    }
    inputs.push(dense_prefix(20, 20_000, 5));
    let mut runs = 0;
    for c in &inputs {
        let path = write_input(dir.path(), c);
        for map in [CouplingMap::grid(c.width).unwrap(), CouplingMap::linear(c.width).unwrap()] {
            for router in [RouterMode::Basic, LOOKAHEAD] {
                for n_sc in [1, 3, 8] {
                    let r = profile(&path, &map, n_sc, router, dir.path());
                    reconcile(c, dir.path(), &r)
                        .map_err(|e| format!("{} {} {} n_sc={n_sc}: {e}", c.name, map.kind(), router.name()))?;
                    runs += 1;
                }
            }
        }
    }
    Ok(Verdict::Pass(format!("{runs} pipeline runs reconcile exactly against their output files")))
}

fn c6_speedup_trend() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let c = dense_prefix(20, 100_000, 6);
    let path = write_input(dir.path(), &c);
    let map = CouplingMap::grid(20).unwrap();
    // Warm the page cache and allocator before timing.
    profile(&path, &map, 1, LOOKAHEAD, dir.path());
    let mut t = Vec::new();
    for n_sc in [1usize, 2, 4, 8] {
        let samples = (0..3).map(|_| profile(&path, &map, n_sc, LOOKAHEAD, dir.path()).wall_time_parallel).collect();
        t.push(median(samples));
    }
    let s: Vec<f64> = t.iter().map(|&x| t[0] / x).collect();
    let table = format!("speedup vs n_sc=1: 2 -> {:.2}, 4 -> {:.2}, 8 -> {:.2}", s[1], s[2], s[3]);
    let monotone = s[2] >= 0.9 * s[1] && s[3] >= 0.9 * s[2];
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    if cores < 8 {
        // With fewer cores than sub-circuits the workers time-share, so
        // neither the trend nor the 2.0 bound measures parallel speedup.
        return Ok(Verdict::Unverified(format!(
            "{table}; needs 8 cores, {cores} available (trend {})",
            if monotone { "holds" } else { "does not hold" }
        )));
    }
    ensure!(monotone, "not monotone within 10%: {table}");
    ensure!(s[3] >= 2.0, "speedup at n_sc=8 below 2.0: {table}");
    Ok(Verdict::Pass(format!("{table} on {cores} cores")))
}

/// Overheads at one depth are dominated by how the chunk routings happen to
/// diverge from the monolithic one, so the depth trend is judged on the mean
/// over a fixed set of seeds. Every individual run must stay under 5%.
fn c7_overhead_at_depth() -> Check {
    const SEEDS: std::ops::Range<u64> = 0..5;
    let dir = tempfile::tempdir().unwrap();
    let map = CouplingMap::grid(20).unwrap();
    let mut means = Vec::new();
    for depth in [50_000u32, 100_000] {
        let mut sum = [0.0; 3];
        for seed in SEEDS {
            let c = generate_with_density(&DensitySpec::new(20, depth, 1.0, seed)).unwrap();
            let path = write_input(dir.path(), &c);
            drop(c);
            let r = profile(&path, &map, 8, LOOKAHEAD, dir.path());
            let o = [r.overhead_gate, r.overhead_swap, r.overhead_depth];
            ensure!(o.iter().all(|&x| x < 0.05), "depth {depth} seed {seed}: overheads {o:?} not all < 5%");
            for (acc, x) in sum.iter_mut().zip(o) {
                *acc += x / SEEDS.count() as f64;
            }
            std::fs::remove_file(path).unwrap();
        }
        means.push(sum);
    }
    let (a, b) = (means[0], means[1]);
    let pct = |o: [f64; 3]| format!("{:+.3}%/{:+.3}%/{:+.3}%", o[0] * 100.0, o[1] * 100.0, o[2] * 100.0);
    let table = format!("mean gate/swap/depth overhead at 50k {}, at 100k {}", pct(a), pct(b));
    ensure!(b.iter().zip(&a).all(|(x, y)| x <= y), "100k mean exceeds 50k mean: {table}");
    Ok(Verdict::Pass(table))
}

fn c8_simulator_oracle() -> Check {
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let c = common::random_circuit(6, 60, 800 + seed);
        let got = simulate(&c).map_err(|e| e.to_string())?;
        let want = common::dense_state(&c);
        for (a, b) in got.amplitudes.iter().zip(&want) {
            worst = worst.max((a - b).norm());
        }
    }
    ensure!(worst <= 1e-10, "max amplitude error {worst:e}");
    Ok(Verdict::Pass(format!("20 circuits, max amplitude error {worst:.1e}")))
}

fn qsplit(dir: &Path, args: &[&str], workers: &str) -> Result<Output, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qsplit"))
        .args(args)
        .current_dir(dir)
        .env("QSPLIT_WORKERS", workers)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        out.status.success(),
        "qsplit {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    Ok(out)
}

/// Drops fields that measure time, memory or the thread count.
fn normalized_report(path: &Path) -> Value {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let o = v.as_object_mut().unwrap();
    for k in ["wall_time_sequential", "wall_time_parallel", "speedup", "phase_times", "peak_memory", "workers"] {
        o.remove(k);
    }
    for c in o["chunks"].as_array_mut().unwrap() {
        let c = c.as_object_mut().unwrap();
        c.remove("route_seconds");
        c.remove("permute_seconds");
    }
    v
}

const SWEEP: &str = r#"
version = 1
output_dir = "sweep"
seed_base = 90
densities = [1.0, 0.5]
n_sc = [1, 4]
router = "lookahead"
widths = { start = 6, stop = 12, step = 6 }
depths = { start = 200, stop = 400, step = 200 }
"#;

fn c9_determinism() -> Check {
    let root = tempfile::tempdir().unwrap();
    let dirs = [root.path().join("a"), root.path().join("b")];
    let mut stdout = [Vec::new(), Vec::new()];
    for (k, (dir, workers)) in dirs.iter().zip(["1", "8"]).enumerate() {
        std::fs::create_dir_all(dir).unwrap();
        let out = &mut stdout[k];
        for (w, d, p, seed) in [("12", "500", "0.7", "3"), ("6", "80", "1.0", "4")] {
            let name = format!("g{w}.qasm");
            out.push(qsplit(dir, &["gen", "--width", w, "--depth", d, "--density", p, "--seed", seed, "-o", &name, "--manifest", "m.json"], workers)?.stdout);
            out.push(qsplit(dir, &["compile", &name, "--n-sc", "5", "-o", &format!("c{w}.qasm"), "--baseline-output", &format!("b{w}.qasm")], workers)?.stdout);
            out.push(qsplit(dir, &["compile", &name, "--router", "basic", "--n-sc", "3", "-o", &format!("cb{w}.qasm")], workers)?.stdout);
            out.push(qsplit(dir, &["stats", &format!("c{w}.qasm")], workers)?.stdout);
            out.push(qsplit(dir, &["verify", &name, &format!("c{w}.qasm")], workers)?.stdout);
        }
        std::fs::write(dir.join("sweep.toml"), SWEEP).unwrap();
        let jobs = if k == 0 { "1" } else { "2" };
        qsplit(dir, &["sweep", "sweep.toml", "--jobs", jobs], workers)?;
    }
    ensure!(stdout[0] == stdout[1], "command stdout differs between runs");

    let mut files = 0;
    for entry in std::fs::read_dir(&dirs[0]).unwrap() {
        let name = entry.unwrap().file_name();
        let (a, b) = (dirs[0].join(&name), dirs[1].join(&name));
        if a.is_dir() {
            continue;
        }
        if name.to_string_lossy().ends_with(".report.json") {
            ensure!(normalized_report(&a) == normalized_report(&b), "{name:?} differs");
        } else {
            ensure!(std::fs::read(&a).unwrap() == std::fs::read(&b).unwrap(), "{name:?} differs");
        }
        files += 1;
    }

    let columns = |dir: &Path| -> Vec<Vec<String>> {
        let mut r = csv::Reader::from_path(dir.join("sweep/sweep.csv")).unwrap();
        let h = r.headers().unwrap().clone();
        let cols: Vec<usize> = qsplit_cli::sweep::DETERMINISTIC_COLUMNS
            .iter()
            .map(|c| h.iter().position(|x| x == *c).unwrap())
            .collect();
        r.records().map(|rec| cols.iter().map(|&i| rec.as_ref().unwrap()[i].to_string()).collect()).collect()
    };
    let sweep = columns(&dirs[0]);
    ensure!(sweep.len() == 16 && sweep == columns(&dirs[1]), "sweep tables differ");

    // In-process: the same chunks on every worker count.
    let c = dense_prefix(16, 30_000, 9);
    let map = CouplingMap::grid(16).unwrap();
    let reference = serialize_qasm(&compile_parallel(&c, &map, 8, LOOKAHEAD, Some(1)).unwrap().circuit);
    for workers in [2, 3, 8, 16] {
        let out = compile_parallel(&c, &map, 8, LOOKAHEAD, Some(workers)).unwrap();
        ensure!(serialize_qasm(&out.circuit) == reference, "workers={workers} output differs");
    }
    Ok(Verdict::Pass(format!("{files} files, all stdout, and 16 sweep rows identical across runs and worker counts")))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "density exactness", limit: Duration::from_secs(120), run: c1_density_exactness },
        Criterion { id: 2, name: "partitioning", limit: Duration::from_secs(10), run: c2_partitioning },
        Criterion { id: 3, name: "permutation restoration", limit: Duration::from_secs(60), run: c3_permutation_restoration },
        Criterion { id: 4, name: "end-to-end equivalence", limit: Duration::from_secs(600), run: c4_equivalence },
        Criterion { id: 5, name: "overhead accounting identity", limit: Duration::from_secs(600), run: c5_accounting },
        Criterion { id: 6, name: "speedup trend", limit: Duration::from_secs(1200), run: c6_speedup_trend },
        Criterion { id: 7, name: "overhead at depth", limit: Duration::from_secs(1800), run: c7_overhead_at_depth },
        Criterion { id: 8, name: "simulator oracle", limit: Duration::from_secs(60), run: c8_simulator_oracle },
        Criterion { id: 9, name: "determinism", limit: Duration::from_secs(300), run: c9_determinism },
    ];
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for c in criteria.iter().filter(|c| only.is_empty() || only.contains(&c.id)) {
        let start = Instant::now();
        let result = std::panic::catch_unwind(c.run).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(_) if elapsed > c.limit => Err(format!("took {elapsed:.1?}, limit {:?}", c.limit)),
            r => r,
        };
        let (status, detail) = match result {
            Ok(Verdict::Pass(d)) => ("PASS", d),
            Ok(Verdict::Unverified(d)) => ("UNVERIFIED", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{status} criterion {} ({}) [{:.1}s]: {detail}", c.id, c.name, elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
