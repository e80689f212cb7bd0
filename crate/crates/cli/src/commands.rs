use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use asep_core::gap::{lower_bound_report, solve_gap};
use asep_core::io::{
    load_certificate, load_orbit_index, load_vertex, save_certificate, save_orbit_index, save_vertex,
    scale_to_integers, to_stsp, write_tsplib, Tsplib, VertexFile,
};
use asep_core::loops::{break_loop, collapse, detect_loops, CollapseSpec};
use asep_core::pivot::{enumerate, explore, Budget, Event, ExploreConfig, ExploreError, ExploreOutcome, StopReason};
use asep_core::polytope::{is_vertex, tight_sets, NodeSet};
use asep_core::symmetry::{apply, canonical, factorial, stabilizer, OrbitRecord};
use serde_json::json;
use thiserror::Error;

use crate::manifest::{RunManifest, Summary};
use crate::{Command, Format};

pub const PARTIAL: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or unreadable input; exit code 2.
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Failed(String),
}

fn invalid(e: impl ToString) -> CliError {
    CliError::Invalid(e.to_string())
}

fn failed(e: impl ToString) -> CliError {
    CliError::Failed(e.to_string())
}

fn progress(value: serde_json::Value) {
    eprintln!("{value}");
}

fn event_json(e: &Event) -> serde_json::Value {
    match e {
        Event::OrbitRegistered { key, zero_count } => {
            json!({"event": "orbit", "key": key, "zero_count": zero_count})
        }
        Event::Pivoted { key, neighbors, complete } => {
            json!({"event": "pivot", "key": key, "neighbors": neighbors, "complete": complete})
        }
        Event::GapComputed { key, gap } => {
            json!({"event": "gap", "key": key, "gap": gap.to_string()})
        }
        Event::GapFailed { key, reason } => json!({"event": "gap_failed", "key": key, "reason": reason}),
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "vertex".into())
}

fn read_vertex(path: &Path) -> Result<VertexFile, CliError> {
    load_vertex(path).map_err(invalid)
}

fn parse_bitmask(s: &str) -> Result<NodeSet, CliError> {
    let parsed = if let Some(hex) = s.strip_prefix("0x") {
        u32::from_str_radix(hex, 16)
    } else if let Some(bin) = s.strip_prefix("0b") {
        u32::from_str_radix(bin, 2)
    } else {
        s.parse()
    };
    parsed.map(NodeSet).map_err(|_| invalid(format!("bad bitmask {s:?}")))
}

fn parse_pair(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || invalid(format!("bad loop {s:?}, expected v1,v2"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn start_files(path: &Path) -> Result<Vec<PathBuf>, CliError> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let entries = fs::read_dir(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(invalid(format!("{}: no start vertices", path.display())));
    }
    Ok(files)
}

fn create_out(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| failed(format!("{}: {e}", out.display())))
}

/// Saves the index and one vertex file for the best witness.
fn archive(out: &Path, records: &[OrbitRecord]) -> Result<(), CliError> {
    save_orbit_index(out, records).map_err(failed)?;
    for row in lower_bound_report(records) {
        let Some(rec) = records.iter().find(|r| r.key == row.witness) else {
            continue;
        };
        let mut v = VertexFile::new(rec.representative.clone());
        v.gap = rec.gap.clone();
        v.orbit_size = Some(rec.orbit_size);
        v.stabilizer_order = Some(rec.stabilizer_order);
        save_vertex(&out.join(format!("best-n{}.txt", row.n)), &v).map_err(failed)?;
    }
    Ok(())
}

fn exit_for(outcome: &ExploreOutcome) -> u8 {
    if outcome.stop != StopReason::Exhausted || outcome.truncated {
        PARTIAL
    } else {
        0
    }
}

fn print_summary(outcome: &ExploreOutcome) {
    let stop = match outcome.stop {
        StopReason::Exhausted => "exhausted",
        StopReason::MaxIterations => "iteration limit",
        StopReason::TimeLimit => "time limit",
    };
    println!(
        "{} vertices in {} orbits after {} pivots ({stop}{})",
        outcome.vertex_count(),
        outcome.records.len(),
        outcome.iterations,
        if outcome.truncated { ", some neighborhoods partial" } else { "" }
    );
    for row in lower_bound_report(&outcome.records) {
        println!("n={} best {} ({})", row.n, row.ig, row.decimal());
    }
}

pub fn run(cmd: &Command, out: &Path, jobs: Option<usize>) -> Result<u8, CliError> {
    let started = Instant::now();
    let config = serde_json::to_value(cmd).expect("command serializes");
    let name = config
        .as_object()
        .and_then(|o| o.keys().next().cloned())
        .unwrap_or_default();
    let mut manifest = RunManifest::new(&name, json!({"command": config, "jobs": jobs}), out);
    create_out(out)?;
    let code = match cmd {
        Command::Enumerate { n } => {
            if !(4..=5).contains(n) {
                return Err(invalid(format!("enumerate supports n = 4 or 5, got {n}")));
            }
            let outcome = enumerate(*n, |e| progress(event_json(e))).map_err(failed)?;
            archive(out, &outcome.records)?;
            print_summary(&outcome);
            manifest.summary = Summary::from_records(&outcome.records);
            0
        }
        Command::Explore {
            n,
            starts,
            max_iters,
            t_total,
            t_iter,
            work,
            seed,
            no_gaps,
        } => {
            let files = start_files(starts)?;
            let mut points = Vec::new();
            for f in &files {
                points.push(read_vertex(f)?.point);
                manifest.starts.push(f.display().to_string());
            }
            let mut cfg = ExploreConfig::new(*n);
            cfg.max_iters = max_iters.unwrap_or(usize::MAX);
            cfg.total_time = t_total.map(Duration::from_secs_f64);
            cfg.per_vertex = Budget {
                work: *work,
                wall: t_iter.map(Duration::from_secs_f64),
            };
            cfg.seed = *seed;
            cfg.solve_gaps = !no_gaps;
            manifest.seed = Some(*seed);
            let outcome = explore(&points, &cfg, |e| progress(event_json(e))).map_err(|e| match e {
                ExploreError::StartSize { .. } => invalid(e),
                _ => failed(e),
            })?;
            archive(out, &outcome.records)?;
            print_summary(&outcome);
            manifest.summary = Summary::from_records(&outcome.records);
            exit_for(&outcome)
        }
        Command::Gap { vertex } => {
            let v = read_vertex(vertex)?;
            let cert = solve_gap(&v.point).map_err(invalid)?;
            let path = out.join(format!("{}.cert", stem(vertex)));
            save_certificate(&path, &cert).map_err(failed)?;
            println!("{} ({})", cert.ig_value, cert.ig_value.to_decimal(6));
            println!("certificate {}", path.display());
            let mut rec = OrbitRecord::from_point(&v.point);
            rec.gap = Some(cert.gap_value.clone());
            manifest.starts.push(vertex.display().to_string());
            manifest.summary = Summary::from_records(&[rec]);
            0
        }
        Command::Break { vertex, pair } => {
            let v = read_vertex(vertex)?;
            let mut loops = detect_loops(&v.point);
            if let Some(p) = pair {
                let (a, b) = parse_pair(p)?;
                loops.retain(|l| (l.v1, l.v2) == (a, b) || (l.v1, l.v2) == (b, a));
                if loops.is_empty() {
                    return Err(invalid(format!("no loop on {a},{b}")));
                }
            }
            let mut children = Vec::new();
            for l in &loops {
                let y = break_loop(&v.point, l).map_err(invalid)?;
                let mut child = VertexFile::new(y.clone());
                child.provenance = v.provenance.clone();
                child.provenance.push(format!("break {},{}", l.v1, l.v2));
                let path = out.join(format!("{}-break-{}-{}.txt", stem(vertex), l.v1, l.v2));
                save_vertex(&path, &child).map_err(failed)?;
                println!("{}", path.display());
                children.push(OrbitRecord::from_point(&y));
            }
            if loops.is_empty() {
                println!("no loops");
            }
            manifest.starts.push(vertex.display().to_string());
            manifest.summary = Summary::from_records(&children);
            0
        }
        Command::Collapse { vertex, set, target } => {
            let v = read_vertex(vertex)?;
            let spec = CollapseSpec {
                set: parse_bitmask(set)?,
                target: *target,
            };
            let c = collapse(&v.point, &spec).map_err(invalid)?;
            let mut child = VertexFile::new(c.point.clone());
            child.provenance = v.provenance.clone();
            child.provenance.push(format!("collapse {}", spec.set.bits()));
            let path = out.join(format!("{}-collapse-{}.txt", stem(vertex), spec.set.bits()));
            save_vertex(&path, &child).map_err(failed)?;
            println!("n {} vertex {}", c.point.n(), c.is_vertex);
            println!("{}", path.display());
            manifest.starts.push(vertex.display().to_string());
            manifest.summary = Summary::from_records(&[OrbitRecord::from_point(&c.point)]);
            0
        }
        Command::Canon { vertex } => {
            let v = read_vertex(vertex)?;
            let rec = OrbitRecord::from_point(&v.point);
            let form = canonical(&v.point);
            println!("key {}", rec.key);
            println!("witness {}", form.witness());
            println!("orbit_size {}", rec.orbit_size);
            println!("stabilizer_order {}", rec.stabilizer_order);
            for g in &rec.generators {
                println!("generator {g}");
            }
            manifest.starts.push(vertex.display().to_string());
            manifest.summary = Summary::from_records(&[rec]);
            0
        }
        Command::Export { certificate, format } => {
            let cert = load_certificate(certificate).map_err(invalid)?;
            let a = scale_to_integers(&cert.costs);
            let name = stem(certificate);
            let (path, t) = match format {
                Format::Atsp => (out.join(format!("{name}.atsp")), Tsplib::from_atsp(&name, &a)),
                Format::Stsp => (out.join(format!("{name}.tsp")), Tsplib::from_stsp(&name, &to_stsp(&a))),
            };
            write_tsplib(&path, &t).map_err(failed)?;
            println!("{}", path.display());
            println!("optimum {}", a.claimed_optimum());
            manifest.starts.push(certificate.display().to_string());
            0
        }
        Command::Report { index } => {
            let records = load_orbit_index(index).map_err(invalid)?;
            println!("{:>3}  {:>10}  {:>9}  {:>6}  witness", "n", "IG", "decimal", "orbits");
            for row in lower_bound_report(&records) {
                println!(
                    "{:>3}  {:>10}  {:>9}  {:>6}  {}",
                    row.n,
                    row.ig.to_string(),
                    row.decimal(),
                    row.orbits,
                    row.witness
                );
            }
            manifest.summary = Summary::from_records(&records);
            0
        }
        Command::Verify { index } => {
            let records = load_orbit_index(index).map_err(invalid)?;
            let mut failures = 0;
            for r in &records {
                let problems = check_record(r);
                if problems.is_empty() {
                    println!("ok {}", r.key);
                } else {
                    failures += 1;
                    println!("FAIL {}: {}", r.key, problems.join("; "));
                }
            }
            println!("{} of {} records pass", records.len() - failures, records.len());
            manifest.summary = Summary::from_records(&records);
            if failures > 0 {
                2
            } else {
                0
            }
        }
    };
    manifest.summary.wall_seconds = started.elapsed().as_secs_f64();
    manifest.write(out).map_err(failed)?;
    progress(json!({"event": "done", "command": name, "exit": code}));
    Ok(code)
}

/// Largest n at which `verify` re-solves the gap LP.
const VERIFY_GAP_LIMIT: usize = 8;

fn check_record(r: &OrbitRecord) -> Vec<String> {
    let x = &r.representative;
    let n = x.n();
    let mut problems = Vec::new();
    match is_vertex(x) {
        Ok(true) => {}
        Ok(false) => problems.push("not a vertex".to_string()),
        Err(e) => problems.push(e.to_string()),
    }
    let stab = stabilizer(x);
    if stab.order != r.stabilizer_order {
        problems.push(format!("stabilizer order {} recorded as {}", stab.order, r.stabilizer_order));
    }
    if r.orbit_size * r.stabilizer_order as u128 != factorial(n) {
        problems.push("orbit size times stabilizer order is not n!".to_string());
    }
    for g in &r.generators {
        if apply(g, x).ok().as_ref() != Some(x) {
            problems.push(format!("generator {g} moves the representative"));
        }
    }
    if tight_sets(x).len() != r.tight_sets {
        problems.push("tight set count".to_string());
    }
    if x.zero_count() != r.zero_count {
        problems.push("zero count".to_string());
    }
    if let (Some(g), true) = (&r.gap, n <= VERIFY_GAP_LIMIT) {
        match solve_gap(x) {
            Ok(c) if &c.gap_value == g => {}
            Ok(c) => problems.push(format!("gap {} recorded as {g}", c.gap_value)),
            Err(e) => problems.push(e.to_string()),
        }
    }
    problems
}
