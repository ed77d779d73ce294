use std::path::{Path, PathBuf};

use qsplit_core::densitygen::{generate_with_stats, RemovalStats};
use qsplit_core::metrics::CircuitMetrics;
use qsplit_core::qasm::parse_final_layout;
use qsplit_core::verifier::NnaViolation;
use qsplit_core::{
    check_nna, compute_metrics, fidelity_under_layout, parse_qasm, profile_run, serialize_qasm, Circuit, CorpusGrid,
    CouplingMap, DensitySpec, Layout, ProfileOptions,
};
use serde::{Deserialize, Serialize};

use crate::args::{CompileArgs, GenArgs, StatsArgs, VerifyArgs};
use crate::error::CliError;

pub fn read_circuit(path: &Path) -> Result<(Circuit, String), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let circuit = parse_qasm(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    Ok((circuit, text))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// `grid`, `linear`, or a path to a JSON coupling map.
pub fn coupling_map(topology: &str, width: u32) -> Result<CouplingMap, CliError> {
    Ok(match topology {
        "grid" => CouplingMap::grid(width)?,
        "linear" => CouplingMap::linear(width)?,
        path => CouplingMap::from_json_file(Path::new(path))?,
    })
}

/// One generated circuit, as recorded in a manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub spec: DensitySpec,
    pub output: PathBuf,
    pub metrics: CircuitMetrics,
    pub removal: RemovalStats,
}

fn generate_one(spec: &DensitySpec, output: &Path) -> Result<ManifestEntry, CliError> {
    let (circuit, removal) = generate_with_stats(spec)?;
    let metrics = compute_metrics(&circuit).map_err(|e| CliError::Invalid(e.to_string()))?;
    write_file(output, &serialize_qasm(&circuit))?;
    Ok(ManifestEntry {
        spec: *spec,
        output: output.to_path_buf(),
        metrics,
        removal,
    })
}

/// Adds entries to a JSON array file, replacing any with the same output path.
pub fn update_manifest(path: &Path, entries: &[ManifestEntry]) -> Result<(), CliError> {
    let mut all: Vec<ManifestEntry> = match std::fs::read_to_string(path) {
        Ok(text) => serde_json::from_str(&text)
            .map_err(|e| CliError::Invalid(format!("{}: not a manifest: {e}", path.display())))?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(CliError::io(path, e)),
    };
    for entry in entries {
        all.retain(|e| e.output != entry.output);
        all.push(entry.clone());
    }
    write_file(path, &(serde_json::to_string_pretty(&all).expect("manifest serialises") + "\n"))
}

pub fn gen(args: &GenArgs) -> Result<(), CliError> {
    let entries = if let Some(dir) = &args.reference_corpus {
        let mut out = Vec::new();
        for mut spec in CorpusGrid::reference(args.seed).specs() {
            spec.two_qubit_fraction = args.two_qubit_fraction;
            let file = dir.join(format!("w{}_d{}_p{}_s{}.qasm", spec.width, spec.depth, spec.density, spec.seed));
            log::info!("generating {}", file.display());
            out.push(generate_one(&spec, &file)?);
        }
        out
    } else {
        let (Some(width), Some(depth), Some(output)) = (args.width, args.depth, &args.output) else {
            return Err(CliError::Invalid("--width, --depth and --output are required".into()));
        };
        let spec = DensitySpec {
            width,
            depth,
            density: args.density,
            seed: args.seed,
            two_qubit_fraction: args.two_qubit_fraction,
        };
        vec![generate_one(&spec, output)?]
    };
    if let Some(manifest) = &args.manifest {
        update_manifest(manifest, &entries)?;
    }
    if let [entry] = &entries[..] {
        println!("{}", serde_json::to_string(&entry.metrics).expect("metrics serialise"));
    }
    Ok(())
}

pub fn report_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".report.json");
    PathBuf::from(name)
}

pub fn compile(args: &CompileArgs) -> Result<(), CliError> {
    // The map depends on the register size, so peek at the header first.
    let (circuit, _) = read_circuit(&args.input)?;
    let map = coupling_map(&args.topology, circuit.width)?;
    if args.n_sc == 0 {
        return Err(CliError::Invalid("--n-sc must be at least 1".into()));
    }
    if let Some(dir) = args.output.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let opts = ProfileOptions {
        n_sc: args.n_sc,
        router: args.router.mode(),
        workers: args.workers,
        parallel_output: args.output.clone(),
        monolithic_output: args.baseline_output.clone(),
    };
    let outcome = profile_run(&args.input, &map, &opts)?;
    let report = outcome.report;
    if !report.reconciles() {
        return Err(CliError::Invalid("internal error: swap accounting does not reconcile".into()));
    }
    write_file(&report_path(&args.output), &(report.to_json() + "\n"))?;
    log::info!(
        "{} gates -> {} (baseline {}), speedup {:.3}",
        report.input_gates,
        report.parallel.gate_count,
        report.monolithic.gate_count,
        report.speedup
    );
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct VerifyOutput {
    pub fidelity: f64,
    pub violations: Vec<NnaViolation>,
}

/// Fidelity uses the compiled file's `final_layout` comment when present.
pub fn verify(args: &VerifyArgs) -> Result<bool, CliError> {
    let (original, _) = read_circuit(&args.original)?;
    let (compiled, text) = read_circuit(&args.compiled)?;
    let layout = match parse_final_layout(&text) {
        Some(v) => Layout::from_phys_to_logical(v).map_err(|e| CliError::Invalid(format!("final_layout: {e}")))?,
        None => Layout::trivial(compiled.width),
    };
    let map = coupling_map(&args.topology, original.width)?;
    let out = VerifyOutput {
        fidelity: fidelity_under_layout(&original, &compiled, &layout)?,
        violations: check_nna(&compiled, &map),
    };
    println!("{}", serde_json::to_string(&out).expect("verify output serialises"));
    Ok(out.violations.is_empty() && out.fidelity >= 1.0 - 1e-9)
}

pub fn stats(args: &StatsArgs) -> Result<(), CliError> {
    let (circuit, _) = read_circuit(&args.input)?;
    let m = compute_metrics(&circuit).map_err(|e| CliError::Invalid(e.to_string()))?;
    println!("{}", serde_json::to_string(&m).expect("metrics serialise"));
    Ok(())
}
