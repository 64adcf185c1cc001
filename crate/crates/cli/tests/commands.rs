use std::path::Path;
use std::process::{Command, Output};

use gdrp_core::milp::{expected_row_counts, parse_lp, MilpOptions};
use gdrp_core::model::{appendix_d_instance, Fleet};
use gdrp_core::solver::SolutionFile;
use serde_json::Value;

fn gdrp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gdrp")).args(args).env_remove("GDRP_THREADS").output().expect("run gdrp")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_baseline_writes_a_solution() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = gdrp(&["solve", "--builtin", "appendix-d:10", "--table3", "--objective", "energy", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let file: SolutionFile = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(file.proven_optimal);
    assert_eq!(file.solution.tours.len(), 5);
    assert!((file.solution.total_energy - 2158.9476).abs() < 1e-3);
    let text = stdout(&o);
    assert!(text.contains("total energy: 2158.9476"));
    assert!(text.contains("large 2 unit 2: 0 -> 3 -> 6 -> 4 -> 5 -> 0"));
}

#[test]
fn outputs_are_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let oa = gdrp(&["solve", "appendix-d:11", "--threads", "1", "--out", path_str(&a)]);
    let ob = gdrp(&["solve", "appendix-d:11", "--threads", "4", "--out", path_str(&b)]);
    assert_eq!(oa.stdout, ob.stdout);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn fleet_variants_and_exit_codes() {
    let large = gdrp(&["solve", "--builtin", "appendix-d:10", "--fleet", "large-only"]);
    assert_eq!(code(&large), 0);
    assert!(stdout(&large).contains("total energy: 2460.9026"));
    let small = gdrp(&["solve", "--builtin", "appendix-d:10", "--fleet", "small-only"]);
    assert_eq!(code(&small), 3);
    assert_eq!(code(&gdrp(&["solve", "/nonexistent/instance.json"])), 1);
    assert_eq!(code(&gdrp(&["solve", "--builtin", "appendix-d:10", "--time-limit=0"])), 1);
    assert_eq!(code(&gdrp(&["solve", "--builtin", "appendix-d:10", "--objective", "speed"])), 1);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"objective":"min_distance","tie_break":"lexicographic"}"#).unwrap();
    let by_file = stdout(&gdrp(&["solve", "appendix-d:10", "--config", path_str(&cfg)]));
    let by_flag = stdout(&gdrp(&["solve", "appendix-d:10", "--config", path_str(&cfg), "--objective", "energy"]));
    assert!(by_flag.contains("total energy: 2158.9476"));
    assert!(!by_file.contains("total energy: 2158.9476"));
    std::fs::write(&cfg, r#"{"objectiv":"min_energy"}"#).unwrap();
    assert_eq!(code(&gdrp(&["solve", "appendix-d:10", "--config", path_str(&cfg)])), 1);
}

#[test]
fn geometry_polylines_close_at_the_depot() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("s.json");
    let geo = dir.path().join("g.json");
    assert_eq!(code(&gdrp(&["solve", "appendix-d:10", "--out", path_str(&sol)])), 0);
    assert_eq!(code(&gdrp(&["geometry", "--solution", path_str(&sol), "--instance", "appendix-d:10", "--out", path_str(&geo)])), 0);
    let g: Value = serde_json::from_str(&std::fs::read_to_string(&geo).unwrap()).unwrap();
    let lines = g["polylines"].as_array().unwrap();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines.iter().filter(|l| l["type"] == 1).count(), 3);
    for l in lines {
        let pts = l["points"].as_array().unwrap();
        assert_eq!(pts.first(), Some(&g["depot"]));
        assert_eq!(pts.last(), Some(&g["depot"]));
    }
    assert_eq!(g["nodes"].as_array().unwrap().len(), 11);
    let mismatch = gdrp(&["geometry", "--solution", path_str(&sol), "--instance", "appendix-d:4", "--out", path_str(&geo)]);
    assert_eq!(code(&mismatch), 1);
}

#[test]
fn export_milp_counts_and_symmetry_flag() {
    let dir = tempfile::tempdir().unwrap();
    let lp = dir.path().join("m.lp");
    let o = gdrp(&["export-milp", "appendix-d:10", "--out", path_str(&lp)]);
    assert_eq!(code(&o), 0);
    let parsed = parse_lp(&std::fs::read_to_string(&lp).unwrap()).unwrap();
    let units: Vec<usize> = Fleet::table3().types().iter().map(|t| t.count).collect();
    let expected = expected_row_counts(10, &units, &MilpOptions { symmetry_breaking: true, ..Default::default() });
    for (tag, n) in &expected {
        let prefix = format!("c{tag}_");
        assert_eq!(parsed.rows.iter().filter(|r| r.name.starts_with(&prefix)).count(), *n, "tag {tag}");
        assert!(stdout(&o).contains(&format!("  ({tag}): {n}\n")));
    }
    assert_eq!(parsed.rows.len(), expected.values().sum::<usize>());

    let off = gdrp(&["export-milp", "appendix-d:10", "--symmetry", "off", "--out", path_str(&lp)]);
    assert_eq!(code(&off), 0);
    let text = std::fs::read_to_string(&lp).unwrap();
    for tag in ["cB14_", "cB15_", "cB16_"] {
        assert!(!text.contains(tag));
    }

    let one = gdrp(&["export-milp", "appendix-d:1", "--symmetry", "off", "--out", path_str(&lp)]);
    assert!(stdout(&one).contains("  (6): 1\n"));
    let parsed = parse_lp(&std::fs::read_to_string(&lp).unwrap()).unwrap();
    assert_eq!(parsed.rows.iter().filter(|r| r.name.starts_with("c6_")).count(), 1);
}

#[test]
fn reproduce_examples_and_unknown_target() {
    for t in ["example1", "example2", "example3", "baseline", "large-only", "table4:18", "weights:all", "area:all", "params-sweep"] {
        let o = gdrp(&["reproduce", t]);
        assert_eq!(code(&o), 0, "{t}: {}", stdout(&o));
        assert!(!stdout(&o).contains("FAIL"));
    }
    let o = gdrp(&["reproduce", "table4:13"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("[ok  ] n=").count(), 4);
    assert_eq!(code(&gdrp(&["reproduce", "example9"])), 1);
}

#[test]
fn params_sweep_grid_comes_from_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"params_sweep":[{"parameter":"type.1.ef","values":[9.0,11.0]}]}"#).unwrap();
    let o = gdrp(&["reproduce", "params-sweep", "--config", path_str(&cfg)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("type.1.ef=9 "));
    assert!(stdout(&o).contains("type.1.ef=11 "));
    std::fs::write(&cfg, r#"{"params_sweep":[{"parameter":"type.1.ef","values":[]}]}"#).unwrap();
    assert_eq!(code(&gdrp(&["reproduce", "params-sweep", "--config", path_str(&cfg)])), 1);
}

#[test]
fn reproduce_reports_a_mismatch_with_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"fleet_usage":"at_most"}"#).unwrap();
    let o = gdrp(&["reproduce", "large-only", "--config", path_str(&cfg)]);
    // idle drones allowed: the published plan no longer holds
    assert_eq!(code(&o), 4, "{}", stdout(&o));
    assert!(stdout(&o).contains("mismatch:"));
    assert!(stdout(&o).lines().any(|l| l.starts_with("- ")));
}

#[test]
fn compare_single_instance_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    let inst = dir.path().join("i.json");
    std::fs::write(&inst, appendix_d_instance(8).unwrap().to_json()).unwrap();
    let o = gdrp(&["compare", "--instance", path_str(&inst), "--out", path_str(&csv)]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "instance,E_dist,E_energy,saving_pct,tie_break,status");
    assert_eq!(lines.len(), 2);
    let cols: Vec<&str> = lines[1].split(',').collect();
    assert!(cols[3].parse::<f64>().unwrap() >= 0.0);
    assert_eq!(cols[4], "lexicographic");
    assert!(stdout(&o).contains("published: savers 20/30"));
}

#[test]
fn gen_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a.json"), dir.path().join("b.json"), dir.path().join("c.json"));
    gdrp(&["gen", "--customers", "6", "--seed", "9", "--out", path_str(&a)]);
    gdrp(&["gen", "--customers", "6", "--seed", "9", "--out", path_str(&b)]);
    gdrp(&["gen", "--customers", "6", "--seed", "10", "--out", path_str(&c)]);
    let (ta, tb, tc) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), std::fs::read(&c).unwrap());
    assert_eq!(ta, tb);
    assert_ne!(ta, tc);
    let inst = gdrp_core::model::Instance::from_json(std::str::from_utf8(&ta).unwrap()).unwrap();
    assert_eq!(inst.len(), 6);
}

#[test]
fn time_limit_with_incumbent_exits_two() {
    let o = gdrp(&["solve", "appendix-d:18", "--time-limit", "0.05"]);
    assert_eq!(code(&o), 2, "{}", stdout(&o));
}
