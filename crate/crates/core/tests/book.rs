//! Non-Rust snippets of the guide that should stay valid.

use std::path::Path;

use exregen::pipeline::{Method, RunConfig};

fn chapter(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../book/src").join(name)).unwrap()
}

fn fenced<'a>(text: &'a str, lang: &str) -> Vec<&'a str> {
    let open = format!("```{lang}\n");
    text.split(&open)
        .skip(1)
        .map(|rest| &rest[..rest.find("```").unwrap()])
        .collect()
}

#[test]
fn config_example_parses() {
    let text = chapter("cli.md");
    let blocks = fenced(&text, "toml");
    assert_eq!(blocks.len(), 1);
    let cfg = RunConfig::from_toml(blocks[0], Path::new("/cfg")).unwrap();
    assert_eq!(cfg.data_root.as_deref(), Some(Path::new("/cfg/data")));
    assert_eq!(cfg.method, Method::Iterated);
    assert_eq!(cfg.iter.decay(), 0.8);
    cfg.check().unwrap();
}

#[test]
fn shell_example_uses_known_subcommands() {
    let text = chapter("cli.md");
    let known = ["gen-fixture", "rank", "evaluate", "report", "ensemble", "rerank-apply", "sweep", "export"];
    for line in fenced(&text, "sh").concat().lines() {
        let mut words = line.split_whitespace();
        assert_eq!(words.next(), Some("exregen"));
        assert!(known.contains(&words.next().unwrap()), "{line}");
    }
}
