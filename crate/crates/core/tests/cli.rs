use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn portwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_portwalk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("portwalk-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn hunt_on_two_nodes() {
    let o = portwalk(&[
        "hunt",
        "--graph",
        "two_node",
        "--base",
        "u",
        "--treasure",
        "v",
        "--mode",
        "fixed",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("steps: 1\n"), "{out}");
    assert!(
        out.contains("PASS [hunt.time]") && out.contains("<= 4"),
        "{out}"
    );

    let o = portwalk(&[
        "hunt",
        "--graph",
        "two_node",
        "--base",
        "u",
        "--treasure",
        "u",
    ]);
    assert!(stdout(&o).contains("steps: 0\n"));
}

#[test]
fn hunt_on_a_graph_file_with_trace() {
    let graph = scratch("path3.pg");
    fs::write(&graph, "# u - x - v\nedge u 1 x 1\nedge x 2 v 1\n").unwrap();
    let trace = scratch("path3.csv");
    let report = scratch("path3-report.csv");
    let o = portwalk(&[
        "hunt",
        "--graph",
        graph.to_str().unwrap(),
        "--base",
        "u",
        "--treasure",
        "v",
        "--trace",
        trace.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("in phase 32"));
    let t = fs::read_to_string(&trace).unwrap();
    assert!(t.starts_with("step,phase_value,type_m,type_delta,action,port,result\n"));
    assert!(t.trim_end().ends_with(",treasure"));
    let r = fs::read_to_string(&report).unwrap();
    assert!(r.starts_with("line,check,instance,measured,oracle,bound,pass\n"));
    assert!(!r.contains(",false"));
}

#[test]
fn exit_codes() {
    let unknown = portwalk(&[
        "hunt",
        "--graph",
        "two_node",
        "--base",
        "u",
        "--treasure",
        "w",
    ]);
    assert_eq!(unknown.status.code(), Some(2));
    let bad_graph = portwalk(&[
        "hunt",
        "--graph",
        "no_such_family",
        "--base",
        "u",
        "--treasure",
        "v",
    ]);
    assert_eq!(bad_graph.status.code(), Some(2));
    let budget = portwalk(&[
        "hunt",
        "--graph",
        "ring:8",
        "--base",
        "v0",
        "--treasure",
        "v4",
        "--max-steps",
        "3",
    ]);
    assert_eq!(budget.status.code(), Some(3));
    let cap = portwalk(&[
        "weight", "--graph", "ring:3", "--from", "v0", "--to", "v1", "--cap", "1",
    ]);
    assert_eq!(cap.status.code(), Some(3));
    let same_label = portwalk(&[
        "rv", "--graph", "two_node", "--start1", "u", "--label1", "4", "--start2", "v", "--label2",
        "4",
    ]);
    assert_eq!(same_label.status.code(), Some(2));
    let rounds = portwalk(&[
        "rv",
        "--graph",
        "two_node",
        "--start1",
        "u",
        "--label1",
        "1",
        "--start2",
        "v",
        "--label2",
        "2",
        "--max-rounds",
        "10",
    ]);
    assert_eq!(rounds.status.code(), Some(3));
    let flag = portwalk(&[
        "hunt",
        "--graph",
        "two_node",
        "--base",
        "u",
        "--treasure",
        "v",
        "--mode",
        "loose",
    ]);
    assert_eq!(flag.status.code(), Some(2));
}

#[test]
fn weight_printout() {
    let o = portwalk(&[
        "weight",
        "--graph",
        "tree_omega",
        "--from",
        "r",
        "--to",
        "r.7",
    ]);
    assert_eq!(
        stdout(&o),
        "character: (7,1)\nweight: 14\nwitness: (7)\nindex: 8\n"
    );
}

#[test]
fn rendezvous_summary_and_trace() {
    let trace = scratch("rv.csv");
    let summary = scratch("rv-summary.csv");
    let o = portwalk(&[
        "rv",
        "--graph",
        "two_node",
        "--start1",
        "u",
        "--label1",
        "1",
        "--start2",
        "v",
        "--label2",
        "2",
        "--trace",
        trace.to_str().unwrap(),
        "--out",
        summary.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("met,meeting_round,meeting_node\ntrue,43,v\n"));
    assert_eq!(
        fs::read_to_string(&summary).unwrap(),
        "met,meeting_round,meeting_node\ntrue,43,v\n"
    );
    let t = fs::read_to_string(&trace).unwrap();
    assert_eq!(t.lines().count(), 1 + 2 * 43);
    assert!(t.lines().last().unwrap().starts_with("43,2,1,v,wait,"));
}

#[test]
fn ring_rendezvous_with_delay() {
    let o = portwalk(&[
        "rv", "--graph", "ring:4", "--start1", "v0", "--label1", "3", "--start2", "v2", "--label2",
        "5", "--delay", "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS [rv.time]"));
}

#[test]
fn lowerbound_and_sleeper() {
    let o = portwalk(&["lowerbound", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("FAIL"));
    let o = portwalk(&[
        "sleeper", "--graph", "two_node", "--start1", "u", "--label1", "1", "--start2", "v",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("true,1,v"));
}

#[test]
fn phase_listing() {
    assert_eq!(stdout(&portwalk(&["phase", "128"])), "(4,2)\n(64,1)\n");
    assert_eq!(
        stdout(&portwalk(&["phase", "2", "--mode", "fixed"])),
        "(1,1)\n"
    );
    assert_eq!(stdout(&portwalk(&["phase", "24"])), "(1,3)\n(12,1)\n");
    assert_eq!(stdout(&portwalk(&["phase", "2", "--mode", "strict"])), "");
}

#[test]
fn bench_suites() {
    let empty = scratch("empty.suite");
    fs::write(&empty, "# nothing\n").unwrap();
    let o = portwalk(&["bench", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "line,check,instance,measured,oracle,bound,pass\n"
    );

    let broken = scratch("broken.suite");
    fs::write(
        &broken,
        "hunt graph=two_node base=u treasure=v\nweight graph=ring:5 from=v0 to=v2 cap=4\n",
    )
    .unwrap();
    let o = portwalk(&["bench", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("2,weight,ring:5 v0->v2,no path of value at most 4"));

    let smoke = concat!(env!("CARGO_MANIFEST_DIR"), "/suites/smoke.suite");
    let first = portwalk(&["bench", smoke]);
    assert_eq!(first.status.code(), Some(0), "{}", stdout(&first));
    assert_eq!(stdout(&first), stdout(&portwalk(&["bench", smoke])));
}
