//! End-to-end checks of the compiled binary: exit codes, flag plumbing,
//! and stdout contracts. Library-level behavior is covered by unit tests;
//! here we verify the executable wires it together faithfully.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ragprune::pipeline::{run_filter_pipeline, SweepConfig};
use ragprune::prompt::PromptBundle;
use ragprune::vector_store::{ingest_jsonl, top_k};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ragprune"))
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("failed to spawn ragprune")
}

/// 20 documents: 17 spread over two nearby blobs, 3 far strays.
fn write_corpus(path: &Path) {
    let mut lines = Vec::new();
    for i in 0..17 {
        let center = if i % 2 == 0 { 0.0 } else { 2.0 };
        let t = i as f64;
        let v = [
            center + 0.05 * t,
            center - 0.03 * t + 0.1,
            center + 0.02 * t * t * 0.1,
        ];
        lines.push(
            serde_json::json!({
                "id": format!("doc{i:02}"),
                "text": format!("body of document {i}"),
                "vector": v,
            })
            .to_string(),
        );
    }
    for (i, far) in [25.0f64, -30.0, 40.0].iter().enumerate() {
        lines.push(
            serde_json::json!({
                "id": format!("far{i}"),
                "text": format!("stray document {i}"),
                "vector": [far, far * 0.5, -far],
            })
            .to_string(),
        );
    }
    fs::write(path, lines.join("\n") + "\n").unwrap();
}

fn write_query(path: &Path) {
    fs::write(path, "[1.0, 0.9, 1.1]").unwrap();
}

#[test]
fn ingest_check_prints_the_corpus_shape() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.jsonl");
    write_corpus(&corpus);
    let out = run(bin().args(["ingest-check", "--corpus", corpus.to_str().unwrap()]));
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("ok: 20 records, dimension 3"), "{stdout}");
}

#[test]
fn conflicting_embedding_sources_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.jsonl");
    write_corpus(&corpus);
    let out = run(bin().args([
        "filter",
        "--corpus",
        corpus.to_str().unwrap(),
        "--query",
        "q",
        "--embedder-url",
        "http://localhost:1",
        "--embedding-cache",
        "/tmp/whatever.jsonl",
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]));
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("exactly one embedding source"), "{stderr}");
}

#[test]
fn missing_corpus_exits_3_with_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let query = dir.path().join("query.json");
    write_query(&query);
    let out = run(bin().args([
        "filter",
        "--corpus",
        "/nonexistent/corpus.jsonl",
        "--query",
        "q",
        "--query-embedding",
        query.to_str().unwrap(),
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]));
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("/nonexistent/corpus.jsonl"), "{stderr}");
}

#[test]
fn unknown_query_text_against_a_cache_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.jsonl");
    write_corpus(&corpus);
    let cache = dir.path().join("cache.jsonl");
    fs::write(
        &cache,
        "{\"hash\":\"00\",\"text_preview\":\"x\",\"vector\":[1.0,2.0,3.0]}\n",
    )
    .unwrap();
    let out = run(bin().args([
        "filter",
        "--corpus",
        corpus.to_str().unwrap(),
        "--query",
        "a question the cache has never seen",
        "--embedding-cache",
        cache.to_str().unwrap(),
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]));
    assert_eq!(out.status.code(), Some(4));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("missing embedding"), "{stderr}");
}

#[test]
fn method_and_alpha_flags_show_up_in_the_config_echo() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.jsonl");
    let query = dir.path().join("query.json");
    write_corpus(&corpus);
    write_query(&query);
    let out_dir = dir.path().join("out");
    let out = run(bin().args([
        "filter",
        "--corpus",
        corpus.to_str().unwrap(),
        "--query",
        "what do the documents say?",
        "--query-embedding",
        query.to_str().unwrap(),
        "--method",
        "weighted_sum",
        "--alpha",
        "0.9",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let echo: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("config_echo.json")).unwrap())
            .unwrap();
    assert_eq!(echo["method"], "weighted_sum");
    assert_eq!(echo["alpha"], 0.9);
    assert_eq!(echo["percentile"], 15.0);
    assert_eq!(echo["derived_cell_seeds"].as_array().unwrap().len(), 6);
}

#[test]
fn prompt_prints_the_same_bytes_the_library_builds() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_path = dir.path().join("corpus.jsonl");
    let query_path = dir.path().join("query.json");
    write_corpus(&corpus_path);
    write_query(&query_path);
    let question = "what do the documents say?";

    let out = run(bin().args([
        "prompt",
        "--corpus",
        corpus_path.to_str().unwrap(),
        "--query",
        question,
        "--query-embedding",
        query_path.to_str().unwrap(),
    ]));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let corpus = ingest_jsonl(&corpus_path).unwrap();
    let query: Vec<f64> =
        serde_json::from_str(&fs::read_to_string(&query_path).unwrap()).unwrap();
    let config = SweepConfig::default();
    let retrieved = top_k(&corpus, &query, config.num_docs).unwrap();
    let result = run_filter_pipeline(&retrieved, &config).unwrap();
    let kept_texts: Vec<String> = result
        .kept_ids
        .iter()
        .map(|id| {
            retrieved
                .hits
                .iter()
                .find(|h| &h.record.id == id)
                .unwrap()
                .record
                .text
                .clone()
        })
        .collect();
    let bundle = PromptBundle::assemble(&kept_texts, &retrieved.texts(), question).unwrap();
    assert_eq!(out.stdout, bundle.filtered_prompt.as_bytes());
}

#[test]
fn eval_on_an_empty_triples_file_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let triples = dir.path().join("triples.jsonl");
    fs::write(&triples, "").unwrap();
    let out = run(bin().args([
        "eval",
        "--triples",
        triples.to_str().unwrap(),
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]));
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("no questions"), "{stderr}");
}

#[test]
fn report_concatenates_summaries_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let header = "experiment_id,method,alpha,min_freq,percentile,question_category,\
                  n_questions,n_effective,emb_pct,tfidf_pct,avg_docs_kept";
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    fs::write(&a, format!("{header}\nexp-a,interaction,0.5,2,15,c,4,4,1,2,\n")).unwrap();
    fs::write(&b, format!("{header}\nexp-b,interaction,0.5,2,15,c,4,4,3,4,\n")).unwrap();
    let out = run(bin().args(["report", a.to_str().unwrap(), b.to_str().unwrap()]));
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], header);
    assert!(lines[1].starts_with("exp-a,"));
    assert!(lines[2].starts_with("exp-b,"));
}
