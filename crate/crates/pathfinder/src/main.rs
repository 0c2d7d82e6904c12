// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use pathfinder::bench::{run_bench, BenchConfig};
use pathfinder::datagen::{gen_dataset, DataConfig};
use pathfinder::runner::{RayonRunner, StdClock};
use pathfinder::workload::{self, Band, Shape, WorkloadSpec};
use pathfinder::{attrs, build_catalog, catalog, explain, fvecs, parse_index_spec, truth};
use pathfinder_core::{
    answer, parse_filter, plan_query, to_dnf, BuildParams, PlannerConfig, QueryRequest,
};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "pathfinder",
    version,
    about = "Filtered vector search over attribute-partitioned proximity graphs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate the synthetic desk dataset.
    GenData(GenData),
    /// Build a catalog of attribute indexes.
    Build(Build),
    /// Show how a filter is planned.
    Explain(Explain),
    /// Run one filtered query.
    Query(Query),
    /// Generate a filtered query workload.
    GenWorkload(GenWorkload),
    /// Compute exact answers for a workload.
    GroundTruth(GroundTruth),
    /// Sweep the search queue length and report recall and throughput.
    Bench(Bench),
}

#[derive(Args)]
struct GenData {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 1_000)]
    queries: usize,
    #[arg(long, default_value_t = 128)]
    dim: usize,
    /// Noise scale of `b` around `a`.
    #[arg(long, default_value_t = 0.5)]
    k: f64,
    #[arg(long, default_value_t = 20)]
    categories: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct Build {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    attrs: PathBuf,
    /// `tree:<attr>:<fanout>:<height>` or `hash:<attr>`; repeatable.
    #[arg(long = "index")]
    indexes: Vec<String>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, default_value_t = BuildParams::default().max_degree)]
    max_degree: usize,
    #[arg(long, default_value_t = BuildParams::default().build_queue)]
    build_queue: usize,
}

#[derive(Args, Clone)]
struct Planner {
    #[arg(long, default_value_t = PlannerConfig::default().alpha)]
    alpha: f64,
    #[arg(long)]
    no_borrowing: bool,
    #[arg(long, default_value_t = PlannerConfig::default().correlation_threshold)]
    correlation_threshold: f64,
}

impl Planner {
    fn config(&self) -> PlannerConfig {
        PlannerConfig {
            alpha: self.alpha,
            borrowing: !self.no_borrowing,
            correlation_threshold: self.correlation_threshold,
        }
    }
}

#[derive(Args)]
struct Explain {
    #[arg(long)]
    catalog: PathBuf,
    #[arg(long)]
    filter: String,
    #[command(flatten)]
    planner: Planner,
}

#[derive(Args)]
struct Query {
    #[arg(long)]
    catalog: PathBuf,
    #[arg(long)]
    filter: String,
    /// `<fvecs file>:<row>`.
    #[arg(long)]
    query_vec: String,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 200)]
    l: usize,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    planner: Planner,
}

#[derive(Args)]
struct GenWorkload {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    attrs: PathBuf,
    /// Query vectors; referenced by path and row in the output.
    #[arg(long)]
    queries: PathBuf,
    #[arg(long)]
    shape: Shape,
    #[arg(long)]
    band: Band,
    #[arg(long, default_value_t = 1_000)]
    n: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Restrict predicates to these attributes; repeatable.
    #[arg(long = "attr")]
    attrs_used: Vec<String>,
    /// Embed query vectors instead of referencing the query file.
    #[arg(long)]
    inline: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GroundTruth {
    #[arg(long)]
    catalog: PathBuf,
    #[arg(long)]
    workload: PathBuf,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long)]
    out: PathBuf,
    /// Directory for the content-addressed binary cache.
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args)]
struct Bench {
    #[arg(long)]
    catalog: PathBuf,
    /// Repeatable; each needs a matching `--truth`.
    #[arg(long = "workload", required = true)]
    workloads: Vec<PathBuf>,
    #[arg(long = "truth", required = true)]
    truths: Vec<PathBuf>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "10,20,50,100,200,400,800,1600,3000"
    )]
    ls: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// CSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    planner: Planner,
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::GenData(a) => gen_data(a),
        Cmd::Build(a) => build(a),
        Cmd::Explain(a) => explain_cmd(a),
        Cmd::Query(a) => query(a),
        Cmd::GenWorkload(a) => gen_workload(a),
        Cmd::GroundTruth(a) => ground_truth(a),
        Cmd::Bench(a) => bench(a),
    }
}

fn gen_data(a: GenData) -> Result<()> {
    let ds = gen_dataset(&DataConfig {
        n: a.n,
        queries: a.queries,
        dim: a.dim,
        k: a.k,
        categories: a.categories,
        seed: a.seed,
        ..DataConfig::default()
    });
    std::fs::create_dir_all(&a.out)?;
    fvecs::write(&a.out.join("base.fvecs"), &ds.vectors)?;
    fvecs::write(&a.out.join("queries.fvecs"), &ds.queries)?;
    attrs::write(
        &a.out.join("attrs.csv"),
        &ds.attrs.schema,
        &ds.attrs.columns,
    )?;
    println!(
        "wrote {} base and {} query vectors of dimension {} to {}",
        ds.vectors.len(),
        ds.queries.len(),
        a.dim,
        a.out.display()
    );
    Ok(())
}

fn build(a: Build) -> Result<()> {
    let r = Arc::new(attrs::load_relation(&a.data, &a.attrs)?);
    let specs = a
        .indexes
        .iter()
        .map(|s| parse_index_spec(s))
        .collect::<Result<Vec<_>>>()?;
    let params = BuildParams {
        max_degree: a.max_degree,
        build_queue: a.build_queue,
        ..BuildParams::default()
    };
    let start = std::time::Instant::now();
    let cat = build_catalog(r, &specs, params, a.seed, a.threads)?;
    let secs = start.elapsed().as_secs_f64();
    catalog::save(&cat, &a.out, params, a.seed)?;
    let graphs: usize = cat
        .indexes()
        .iter()
        .map(|i| i.nodes().len() - 1)
        .sum::<usize>()
        + 1;
    println!(
        "built {} indexes ({graphs} graphs) over {} tuples in {secs:.1}s -> {}",
        cat.indexes().len(),
        cat.relation().len(),
        a.out.display()
    );
    Ok(())
}

fn explain_cmd(a: Explain) -> Result<()> {
    let (cat, _) = catalog::load(&a.catalog)?;
    let p = to_dnf(&parse_filter(&a.filter, cat.relation().schema())?)?;
    let plan = plan_query(&p, &cat, &a.planner.config())?;
    print!("{}", explain::render(&plan, &cat));
    Ok(())
}

fn query_vector(spec: &str) -> Result<Vec<f32>> {
    let (file, idx) = spec
        .rsplit_once(':')
        .context("--query-vec must be <file>:<row>")?;
    let idx: usize = idx.parse().context("query row must be an integer")?;
    let v = fvecs::read(Path::new(file))?;
    if idx >= v.len() {
        bail!("row {idx} out of range: {file} has {} vectors", v.len());
    }
    Ok(v.row(idx).to_vec())
}

fn query(a: Query) -> Result<()> {
    let (cat, _) = catalog::load(&a.catalog)?;
    let p = to_dnf(&parse_filter(&a.filter, cat.relation().schema())?)?;
    let req = QueryRequest::new(query_vector(&a.query_vec)?, a.k, a.l, p);
    let (plan, res) = answer(&cat, &req, &a.planner.config(), &StdClock::new())?;
    if a.json {
        let hits: Vec<_> = res.hits.iter().map(|h| json!([h.pk, h.distance])).collect();
        let graphs: Vec<_> = res
            .stats
            .per_graph
            .iter()
            .map(|g| json!({"graph": explain::graph_label(g.graph), "visited": g.visited}))
            .collect();
        let out = json!({
            "hits": hits,
            "found": res.found,
            "stats": {
                "graphs": graphs,
                "visited": res.stats.visited(),
                "plan_nanos": res.stats.plan_nanos,
                "search_nanos": res.stats.search_nanos,
            }
        });
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        for (rank, h) in res.hits.iter().enumerate() {
            println!("{rank}\tpk={}\tdist={}", h.pk, h.distance);
        }
        let graphs: Vec<String> = plan.graphs().map(explain::graph_label).collect();
        println!(
            "found {} of {}; graphs [{}]; visited {}; plan {:.3} ms; search {:.3} ms",
            res.found,
            a.k,
            graphs.join(", "),
            res.stats.visited(),
            res.stats.plan_nanos as f64 / 1e6,
            res.stats.search_nanos as f64 / 1e6
        );
    }
    Ok(())
}

fn gen_workload(a: GenWorkload) -> Result<()> {
    let r = attrs::load_relation(&a.data, &a.attrs)?;
    let queries = fvecs::read(&a.queries)?;
    let mut spec = WorkloadSpec::new(a.n, a.shape, a.band, a.seed);
    spec.attrs = a.attrs_used;
    let qpath = if a.inline {
        None
    } else {
        Some(a.queries.as_path())
    };
    let g = workload::gen_workload(&r, &spec, &queries, qpath)?;
    workload::write(&a.out, &g.queries)?;
    println!("wrote {} queries to {}", g.queries.len(), a.out.display());
    if !g.failed.is_empty() {
        eprintln!(
            "{} queries could not reach the {} band: qids {:?}",
            g.failed.len(),
            a.band,
            g.failed
        );
    }
    Ok(())
}

fn workload_base(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn ground_truth(a: GroundTruth) -> Result<()> {
    let (cat, _) = catalog::load(&a.catalog)?;
    let wl = workload::read(&a.workload)?;
    let qs = workload::resolve(cat.relation(), &wl, &workload_base(&a.workload))?;
    let lines = truth::compute_cached(cat.relation(), &qs, a.k, a.cache.as_deref())?;
    truth::write(&a.out, &lines)?;
    println!(
        "wrote ground truth for {} queries to {}",
        lines.len(),
        a.out.display()
    );
    Ok(())
}

fn bench(a: Bench) -> Result<()> {
    if a.workloads.len() != a.truths.len() {
        bail!("every --workload needs one --truth");
    }
    let (cat, _) = catalog::load(&a.catalog)?;
    let runner = RayonRunner::new(a.threads)?;
    let mut out: Box<dyn std::io::Write> = match &a.out {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    };
    for (i, (w, t)) in a.workloads.iter().zip(&a.truths).enumerate() {
        let wl = workload::read(w)?;
        let qs = workload::resolve(cat.relation(), &wl, &workload_base(w))?;
        let gt = truth::read(t)?;
        let name = w
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let mut cfg = BenchConfig::new(name, a.ls.clone());
        cfg.planner = a.planner.config();
        let res = run_bench(&cat, &qs, &gt, &cfg, runner.pool())?;
        res.write_csv(&mut out, i == 0)?;
    }
    Ok(())
}
