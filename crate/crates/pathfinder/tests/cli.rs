// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

use std::path::Path;
use std::process::Command;

use pathfinder::workload::{self, Band, QueryVector, Shape, WorkloadSpec};
use pathfinder::{attrs, catalog, fvecs, truth};
use pathfinder_core::{brute_force_topk, parse_filter, to_dnf};

fn run(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_pathfinder"))
        .args(args)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "pathfinder {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn end_to_end_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let data = d.join("data");
    run(&[
        "gen-data",
        "--out",
        p(&data),
        "--n",
        "1500",
        "--queries",
        "40",
        "--dim",
        "16",
        "--seed",
        "3",
    ]);
    let base = data.join("base.fvecs");
    let attrs_csv = data.join("attrs.csv");
    let queries = data.join("queries.fvecs");
    assert_eq!(fvecs::read(&base).unwrap().len(), 1500);
    assert_eq!(fvecs::read(&queries).unwrap().len(), 40);

    let cat_dir = d.join("cat");
    let out = run(&[
        "build",
        "--data",
        p(&base),
        "--attrs",
        p(&attrs_csv),
        "--index",
        "tree:a:2:3",
        "--index",
        "hash:cat",
        "--out",
        p(&cat_dir),
        "--seed",
        "5",
        "--threads",
        "1",
        "--max-degree",
        "16",
        "--build-queue",
        "48",
    ]);
    assert!(out.contains("built 2 indexes"), "{out}");
    let m = catalog::read_manifest(&cat_dir).unwrap();
    assert_eq!(m.card, 1500);
    assert_eq!(m.indexes.len(), 2);
    assert_eq!(m.indexes[0].nodes.len(), 7);
    assert_eq!(m.indexes[1].nodes.len(), 21);

    let explain = run(&[
        "explain",
        "--catalog",
        p(&cat_dir),
        "--filter",
        "cat IN (\"c01\", \"c02\") OR a > 1.5",
    ]);
    assert!(explain.starts_with("dnf: "), "{explain}");
    assert!(explain.contains("candidate ["), "{explain}");
    assert!(
        explain.contains("plan:\n  index\tnode\tcard\n"),
        "{explain}"
    );
    assert_eq!(explain.matches("hash:cat\t").count(), 2, "{explain}");

    // A query at exhaustive queue length equals the brute-force answer.
    let qv = format!("{}:3", p(&queries));
    let json = run(&[
        "query",
        "--catalog",
        p(&cat_dir),
        "--filter",
        "cat = \"c07\"",
        "--query-vec",
        &qv,
        "--k",
        "5",
        "--l",
        "1500",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let got: Vec<u64> = v["hits"]
        .as_array()
        .unwrap()
        .iter()
        .map(|h| h[0].as_u64().unwrap())
        .collect();
    let r = attrs::load_relation(&base, &attrs_csv).unwrap();
    let f = to_dnf(&parse_filter("cat = \"c07\"", r.schema()).unwrap()).unwrap();
    let q = fvecs::read(&queries).unwrap().row(3).to_vec();
    let want: Vec<u64> = brute_force_topk(&r, &q, 5, &f)
        .iter()
        .map(|n| n.pk as u64)
        .collect();
    assert_eq!(got, want);
    assert!(v["stats"]["visited"].as_u64().unwrap() > 0);

    let wl = d.join("w.jsonl");
    run(&[
        "gen-workload",
        "--data",
        p(&base),
        "--attrs",
        p(&attrs_csv),
        "--queries",
        p(&queries),
        "--shape",
        "conjunctive-2",
        "--band",
        "medium",
        "--n",
        "30",
        "--seed",
        "9",
        "--out",
        p(&wl),
    ]);
    let lines = workload::read(&wl).unwrap();
    assert_eq!(lines.len(), 30);
    assert!(matches!(lines[0].qvec, QueryVector::File { .. }));

    let gt = d.join("t.jsonl");
    let cache = d.join("cache");
    run(&[
        "ground-truth",
        "--catalog",
        p(&cat_dir),
        "--workload",
        p(&wl),
        "--out",
        p(&gt),
        "--cache",
        p(&cache),
    ]);
    let t = truth::read(&gt).unwrap();
    assert_eq!(t.len(), 30);
    assert!(t.iter().all(|l| l.topk.len() == 10));
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    // A second run is served from the cache and writes the same file.
    let gt2 = d.join("t2.jsonl");
    run(&[
        "ground-truth",
        "--catalog",
        p(&cat_dir),
        "--workload",
        p(&wl),
        "--out",
        p(&gt2),
        "--cache",
        p(&cache),
    ]);
    assert_eq!(std::fs::read(&gt).unwrap(), std::fs::read(&gt2).unwrap());

    let csv = d.join("bench.csv");
    run(&[
        "bench",
        "--catalog",
        p(&cat_dir),
        "--workload",
        p(&wl),
        "--truth",
        p(&gt),
        "--ls",
        "10,100,1500",
        "--threads",
        "1",
        "--out",
        p(&csv),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut rows = text.lines();
    assert_eq!(
        rows.next(),
        Some("workload,shape,band,L,recall@10,qps,plan_frac")
    );
    let recalls: Vec<f64> = rows
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f[0], "w");
            assert_eq!(f[1], "conjunctive-2");
            assert_eq!(f[2], "medium");
            assert!(f[5].parse::<f64>().unwrap() > 0.0);
            f[4].parse().unwrap()
        })
        .collect();
    assert_eq!(recalls.len(), 3);
    assert!(recalls.windows(2).all(|w| w[0] <= w[1]), "{recalls:?}");
    assert_eq!(recalls[2], 1.0);
}

#[test]
fn rejects_bad_arguments() {
    let out = Command::new(env!("CARGO_BIN_EXE_pathfinder"))
        .args([
            "build", "--data", "x", "--attrs", "y", "--index", "tree:a", "--out", "z",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

fn small() -> (pathfinder_core::Relation, fvecs::Vectors) {
    let ds = pathfinder::datagen::gen_dataset(&pathfinder::datagen::DataConfig {
        n: 3000,
        queries: 20,
        dim: 8,
        ..Default::default()
    });
    let r = attrs::relation_from(ds.vectors, ds.attrs).unwrap();
    (r, ds.queries)
}

#[test]
fn workloads_hit_their_bands_exactly() {
    let (r, qs) = small();
    for shape in Shape::ALL {
        for band in Band::ALL {
            let spec = WorkloadSpec::new(25, shape, band, 17);
            let g = workload::gen_workload(&r, &spec, &qs, None).unwrap();
            assert!(g.failed.is_empty(), "{shape}/{band}");
            for q in &g.queries {
                // Re-scan the text form.
                let f = to_dnf(&parse_filter(&q.filter, r.schema()).unwrap()).unwrap();
                let s = workload::selectivity(&r, &f);
                assert!(band.contains(s), "{shape}/{band}: {} has {s}", q.filter);
                assert_eq!(q.selectivity, Some(s));
                if shape == Shape::DisjunctiveMixed {
                    let depth_zero_ors = {
                        let (mut depth, mut n) = (0i32, 0);
                        for (i, c) in q.filter.bytes().enumerate() {
                            match c {
                                b'(' => depth += 1,
                                b')' => depth -= 1,
                                b'O' if depth == 0 && q.filter[i..].starts_with("OR ") => n += 1,
                                _ => {}
                            }
                        }
                        n
                    };
                    assert_eq!(depth_zero_ors, 1, "{}", q.filter);
                } else {
                    assert!(!q.filter.contains(" OR "));
                    let want = match shape {
                        Shape::SingleAttr => 1,
                        Shape::Conjunctive2 => 2,
                        _ => 3,
                    };
                    assert_eq!(q.filter.matches(" AND ").count(), want - 1, "{}", q.filter);
                }
            }
        }
    }
}

#[test]
fn workloads_are_reproducible() {
    let (r, qs) = small();
    let spec = WorkloadSpec::new(20, Shape::DisjunctiveMixed, Band::Low, 4);
    let bytes = |_: ()| {
        let g = workload::gen_workload(&r, &spec, &qs, None).unwrap();
        let mut buf = Vec::new();
        workload::write_jsonl(&mut buf, &g.queries).unwrap();
        buf
    };
    let a = bytes(());
    assert_eq!(a, bytes(()));
    let parsed = workload::read_jsonl(&a[..]).unwrap();
    assert_eq!(parsed.len(), 20);
    assert!(matches!(parsed[0].qvec, QueryVector::Inline(ref v) if v.len() == 8));
    let other = WorkloadSpec {
        seed: 5,
        ..spec.clone()
    };
    let g = workload::gen_workload(&r, &other, &qs, None).unwrap();
    let mut buf = Vec::new();
    workload::write_jsonl(&mut buf, &g.queries).unwrap();
    assert_ne!(a, buf);
}

#[test]
fn workload_json_accepts_minimal_lines() {
    let text = "{\"qid\": 4, \"filter\": \"a < 1\", \"qvec\": [0.5, 1.5]}\n\n{\"qid\": 5, \"filter\": \"cat = \\\"c01\\\"\", \"qvec\": {\"file\": \"q.fvecs\", \"idx\": 2}}\n";
    let qs = workload::read_jsonl(text.as_bytes()).unwrap();
    assert_eq!(qs.len(), 2);
    assert_eq!(qs[0].qvec, QueryVector::Inline(vec![0.5, 1.5]));
    assert_eq!(
        qs[1].qvec,
        QueryVector::File {
            file: "q.fvecs".into(),
            idx: 2
        }
    );
    assert!(qs[0].shape.is_none());
    assert!(workload::read_jsonl("{\"qid\": 1}".as_bytes()).is_err());
}

#[test]
fn unreachable_band_is_reported_per_query() {
    // One category of three: no IN-set can land below 10%.
    let schema =
        pathfinder_core::Schema::new([("t", pathfinder_core::AttributeKind::Categorical)]).unwrap();
    let n = 300;
    let values: Vec<&str> = (0..n).map(|i| ["x", "y", "z"][i % 3]).collect();
    let r = pathfinder_core::Relation::from_columns(
        schema,
        1,
        (0..n).map(|i| i as f32).collect(),
        vec![pathfinder_core::Column::categorical(values)],
    )
    .unwrap();
    let qs = fvecs::Vectors {
        dim: 1,
        data: vec![0.0],
    };
    let mut spec = WorkloadSpec::new(3, Shape::SingleAttr, Band::Low, 1);
    spec.max_attempts = 50;
    let g = workload::gen_workload(&r, &spec, &qs, None).unwrap();
    assert!(g.queries.is_empty());
    assert_eq!(g.failed, vec![0, 1, 2]);
}
