use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempocent_testkit::validate_schema;

fn tempocent(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tempocent"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn tempocent")
}

fn ok(args: &[&str]) -> Output {
    let out = tempocent(args, &[]);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

fn schema(name: &str) -> Value {
    json(
        &Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("schemas")
            .join(name),
    )
}

fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            (
                path.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&path).unwrap(),
            )
        })
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn scores(path: &Path) -> Vec<f64> {
    json(path)["scores"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["score"].as_f64().unwrap())
        .collect()
}

#[test]
fn ingest_two_events() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = write(
        tmp.path(),
        "t.csv",
        "node_a,node_b,timestamp\na,b,10\nb,a,500\n",
    );
    let out = tmp.path().join("out");
    ok(&["ingest", "--input", p(&csv), "--outdir", p(&out)]);
    assert_eq!(
        fs::read_to_string(out.join("registry.json")).unwrap(),
        "[\"a\",\"b\"]\n"
    );
    assert_eq!(
        fs::read_to_string(out.join("slot_0.json")).unwrap(),
        "{\"slot\":0,\"n\":2,\"weights\":[[0.0,2.0],[2.0,0.0]]}\n"
    );
    assert_eq!(dir_bytes(&out).len(), 2);
}

#[test]
fn empty_input_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = write(tmp.path(), "empty.csv", "");
    let out = tempocent(
        &[
            "ingest",
            "--input",
            p(&csv),
            "--outdir",
            p(&tmp.path().join("o")),
        ],
        &[],
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no events"));
    assert!(!tmp.path().join("o").exists());
}

#[test]
fn parse_error_names_line_and_lenient_skips() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = write(tmp.path(), "bad.csv", "a,b,1\nc,c,2\nb,c,3\n");
    let out = tempocent(
        &[
            "ingest",
            "--input",
            p(&csv),
            "--outdir",
            p(&tmp.path().join("o")),
        ],
        &[],
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("self-contact at line 2"));

    let out = ok(&[
        "ingest",
        "--input",
        p(&csv),
        "--outdir",
        p(&tmp.path().join("o")),
        "--lenient",
    ]);
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2: skipped line"));
}

#[test]
fn ingest_is_idempotent_and_clears_stale_slots() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("trace.csv");
    ok(&["synth", "--output", p(&csv), "--seed", "42"]);
    let out = tmp.path().join("out");
    ok(&["ingest", "--input", p(&csv), "--outdir", p(&out)]);
    let first = dir_bytes(&out);
    fs::write(out.join("slot_99.json"), "stale").unwrap();
    ok(&["ingest", "--input", p(&csv), "--outdir", p(&out)]);
    assert_eq!(dir_bytes(&out), first);
}

#[test]
fn history_lifts_the_endpoint_of_a_vanished_edge() {
    let tmp = tempfile::tempdir().unwrap();
    // Slot 0: triangle a-b-c plus c-d. Slot 1: the c-d edge is gone.
    let csv = write(
        tmp.path(),
        "t.csv",
        "a,b,0\nb,c,0\na,c,0\nc,d,0\na,b,1000\nb,c,1000\na,c,1000\n",
    );
    let base = [
        "centrality",
        "--input",
        p(&csv),
        "--slot-duration",
        "1000",
        "--interval",
        "100",
        "--measure",
        "eigenvector",
    ];
    let plain = tmp.path().join("plain");
    let evo = tmp.path().join("evo");
    ok(&[&base[..], &["--alpha", "0", "--outdir", p(&plain)]].concat());
    ok(&[&base[..], &["--alpha", "0.5", "--outdir", p(&evo)]].concat());
    let d_plain = scores(&plain.join("centrality_eigenvector_slot_1.json"))[3];
    let d_evo = scores(&evo.join("centrality_eigenvector_slot_1.json"))[3];
    assert_eq!(d_plain, 0.0);
    assert!(d_evo > d_plain);
}

#[test]
fn single_slot_ignores_alpha() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = write(tmp.path(), "t.csv", "a,b,1\nb,c,2\nc,d,3\nd,a,4\na,c,5\n");
    for alpha in ["0.3", "1"] {
        let zero = tmp.path().join("zero");
        let other = tmp.path().join(format!("a{alpha}"));
        ok(&[
            "centrality",
            "--input",
            p(&csv),
            "--alpha",
            "0",
            "--outdir",
            p(&zero),
        ]);
        ok(&[
            "centrality",
            "--input",
            p(&csv),
            "--alpha",
            alpha,
            "--outdir",
            p(&other),
        ]);
        for (name, _) in dir_bytes(&zero) {
            let (a, b) = (json(&zero.join(&name)), json(&other.join(&name)));
            assert_eq!(a["scores"], b["scores"], "{name}");
        }
    }
}

#[test]
fn every_measure_scores_every_node_and_validates() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("trace.csv");
    ok(&[
        "synth",
        "--output",
        p(&csv),
        "--nodes",
        "10",
        "--slots",
        "1",
        "--communities",
        "2",
        "--intra-rate",
        "2",
        "--inter-rate",
        "0.2",
    ]);
    let out = tmp.path().join("out");
    ok(&["report", "--input", p(&csv), "--outdir", p(&out)]);

    let centrality_schema = schema("centrality.schema.json");
    for measure in [
        "degree",
        "closeness",
        "betweenness",
        "eigenvector",
        "pagerank",
    ] {
        let record = json(&out.join(format!("centrality_{measure}_slot_0.json")));
        validate_schema(&centrality_schema, &record).unwrap();
        let entries = record["scores"].as_array().unwrap();
        assert_eq!(entries.len(), 10);
        let mut ranks: Vec<u64> = entries
            .iter()
            .map(|e| e["rank"].as_u64().unwrap())
            .collect();
        ranks.sort_unstable();
        assert_eq!(ranks, (1..=10).collect::<Vec<_>>());
    }
    validate_schema(
        &schema("registry.schema.json"),
        &json(&out.join("registry.json")),
    )
    .unwrap();
    validate_schema(&schema("slot.schema.json"), &json(&out.join("slot_0.json"))).unwrap();
    validate_schema(
        &schema("sentinels.schema.json"),
        &json(&out.join("sentinels.json")),
    )
    .unwrap();
}

#[test]
fn csv_output_and_max_normalization() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = write(tmp.path(), "t.csv", "a,b,1\nb,c,2\nb,d,3\n");
    let out = tmp.path().join("out");
    ok(&[
        "centrality",
        "--input",
        p(&csv),
        "--outdir",
        p(&out),
        "--measure",
        "degree",
        "--format",
        "csv",
        "--normalize",
        "max",
    ]);
    assert_eq!(
        fs::read_to_string(out.join("centrality_degree.csv")).unwrap(),
        "slot,measure,label,score,rank\n0,degree,a,0.3333333333333333,2\n0,degree,b,1,1\n0,degree,c,0.3333333333333333,3\n0,degree,d,0.3333333333333333,4\n"
    );
}

#[test]
fn thirteen_clique_slot() {
    let tmp = tempfile::tempdir().unwrap();
    let mut text = String::new();
    for u in 0..13 {
        for v in u + 1..13 {
            text.push_str(&format!("k{u:02},k{v:02},{}\n", u * 13 + v));
        }
    }
    let csv = write(tmp.path(), "k13.csv", &text);
    let out = tmp.path().join("out");
    ok(&["cliques", "--input", p(&csv), "--outdir", p(&out)]);
    let lines = fs::read_to_string(out.join("cliques.tsv")).unwrap();
    let labels: Vec<String> = (0..13).map(|i| format!("k{i:02}")).collect();
    assert_eq!(lines, format!("0\t13\t{}\n", labels.join(",")));
    assert_eq!(
        fs::read_to_string(out.join("histogram.csv")).unwrap(),
        "size,count\n13,1\n"
    );
}

#[test]
fn empty_slot_has_no_cliques_above_min_size() {
    let tmp = tempfile::tempdir().unwrap();
    // Slot 1 has no events and is all isolated nodes.
    let csv = write(tmp.path(), "t.csv", "a,b,5\nb,c,6\na,c,250\n");
    let out = tmp.path().join("out");
    ok(&[
        "cliques",
        "--input",
        p(&csv),
        "--outdir",
        p(&out),
        "--slot-duration",
        "100",
        "--interval",
        "10",
        "--min-clique-size",
        "2",
    ]);
    let lines = fs::read_to_string(out.join("cliques.tsv")).unwrap();
    assert_eq!(lines, "0\t2\ta,b\n0\t2\tb,c\n2\t2\ta,c\n");
    let sentinels = json(&out.join("sentinels.json"));
    assert_eq!(sentinels[1]["clique_count"], 0);
    assert_eq!(sentinels[0]["common_nodes"], serde_json::json!(["b"]));
}

#[test]
fn histogram_matches_clique_line_count() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("trace.csv");
    ok(&["synth", "--output", p(&csv), "--slots", "5"]);
    let out = tmp.path().join("out");
    ok(&[
        "cliques",
        "--input",
        p(&csv),
        "--outdir",
        p(&out),
        "--no-pivot",
    ]);
    let lines = fs::read_to_string(out.join("cliques.tsv")).unwrap();
    let hist = fs::read_to_string(out.join("histogram.csv")).unwrap();
    let total: usize = hist
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(total, lines.lines().count());
    for line in lines.lines() {
        let fields: Vec<&str> = line.split('\t').collect();
        assert_eq!(
            fields[1].parse::<usize>().unwrap(),
            fields[2].split(',').count()
        );
    }
}

#[test]
fn synth_contracts() {
    let tmp = tempfile::tempdir().unwrap();
    let quiet = tmp.path().join("quiet.csv");
    ok(&[
        "synth",
        "--output",
        p(&quiet),
        "--intra-rate",
        "0",
        "--inter-rate",
        "0",
    ]);
    assert_eq!(
        fs::read_to_string(&quiet).unwrap(),
        "node_a,node_b,timestamp\n"
    );

    let (a, b) = (tmp.path().join("a.csv"), tmp.path().join("b.csv"));
    ok(&["synth", "--output", p(&a), "--seed", "9"]);
    ok(&["synth", "--output", p(&b), "--seed", "9"]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let dense = tmp.path().join("dense.csv");
    ok(&[
        "synth",
        "--output",
        p(&dense),
        "--nodes",
        "6",
        "--communities",
        "1",
        "--slots",
        "1",
        "--intra-rate",
        "20",
        "--hubs",
        "0",
        "--seed",
        "42",
    ]);
    let out = tmp.path().join("out");
    ok(&["cliques", "--input", p(&dense), "--outdir", p(&out)]);
    assert_eq!(
        fs::read_to_string(out.join("cliques.tsv")).unwrap(),
        "0\t6\tu0,u1,u2,u3,u4,u5\n"
    );

    let stdout = ok(&[
        "synth",
        "--nodes",
        "3",
        "--communities",
        "1",
        "--slots",
        "1",
    ])
    .stdout;
    assert!(stdout.starts_with(b"node_a,node_b,timestamp\n"));
}

#[test]
fn convergence_failure_leaves_no_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = write(tmp.path(), "path.csv", "a,b,1\nb,c,2\n");
    let out = tmp.path().join("out");
    let res = tempocent(
        &[
            "centrality",
            "--input",
            p(&csv),
            "--outdir",
            p(&out),
            "--damping",
            "1",
        ],
        &[],
    );
    assert!(!res.status.success());
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("pagerank") && err.contains("slot 0"), "{err}");
    assert!(!out.exists() || dir_bytes(&out).is_empty());
}

#[test]
fn invalid_parameters_fail() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = write(tmp.path(), "t.csv", "a,b,1\n");
    let out = tmp.path().join("out");
    for extra in [
        ["--alpha", "1.5"],
        ["--damping", "-0.1"],
        ["--threshold", "-1"],
    ] {
        let res = tempocent(
            &[
                &["centrality", "--input", p(&csv), "--outdir", p(&out)][..],
                &extra[..],
            ]
            .concat(),
            &[],
        );
        assert!(!res.status.success(), "{extra:?}");
    }
    let res = tempocent(
        &[
            "cliques",
            "--input",
            p(&csv),
            "--outdir",
            p(&out),
            "--phi",
            "0",
        ],
        &[],
    );
    assert!(!res.status.success());
    let res = tempocent(
        &["report", "--input", p(&csv), "--outdir", p(&out)],
        &[("TEMPOCENT_THREADS", "lots")],
    );
    assert!(!res.status.success());
}

#[test]
fn worker_count_does_not_change_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("trace.csv");
    ok(&["synth", "--output", p(&csv), "--slots", "4"]);
    let mut runs = Vec::new();
    for threads in ["1", "4", "0"] {
        let out = tmp.path().join(format!("t{threads}"));
        let res = tempocent(
            &["report", "--input", p(&csv), "--outdir", p(&out)],
            &[("TEMPOCENT_THREADS", threads)],
        );
        assert!(res.status.success());
        runs.push(dir_bytes(&out));
    }
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn centrality_reads_ingested_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("trace.csv");
    ok(&["synth", "--output", p(&csv), "--slots", "3"]);
    let ingested = tmp.path().join("ingested");
    ok(&["ingest", "--input", p(&csv), "--outdir", p(&ingested)]);
    let (from_dir, from_csv) = (tmp.path().join("d"), tmp.path().join("c"));
    ok(&[
        "centrality",
        "--input",
        p(&ingested),
        "--outdir",
        p(&from_dir),
    ]);
    ok(&["centrality", "--input", p(&csv), "--outdir", p(&from_csv)]);
    assert_eq!(dir_bytes(&from_dir), dir_bytes(&from_csv));
}
