//! Command-line front end: graph file parsing, subcommands over the
//! engine and the family constructors, deterministic text/JSON output.
//!
//! Graph files are plain text: `#` starts a comment line, `vertex <name>`
//! optionally pins declaration order, exactly one `sink <name>` picks the
//! sink, and `edge <u> <v> <+|->` adds a signed edge. Vertices are
//! ordered by first appearance; `--config` values follow the nonsink
//! declaration order.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::engine::{ChipFiringPair, Configuration};
use crate::error::{Error, Result};
use crate::families::{self, FamilyKind, FamilySpec, Variant};
use crate::graph::{Sign, SignedGraph};
use crate::linalg::format_rational;

#[derive(Parser)]
#[command(name = "chipfire", version, about = "Chip-firing on signed graphs")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Cap each coordinate of enumeration search boxes.
    #[arg(long, global = true)]
    pub bound: Option<i64>,
    /// Cap the dimension of subset superstability tests.
    #[arg(long, global = true)]
    pub chi_cap: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
pub enum Command {
    /// Invariant factors and order of the critical group.
    Group { file: PathBuf },
    /// All critical configurations, one per class.
    Criticals { file: PathBuf },
    /// All z-superstable configurations, one per class.
    Superstables { file: PathBuf },
    /// Identity of the critical group.
    Identity { file: PathBuf },
    /// Stabilize a configuration; prints the result and firing vector.
    Stabilize {
        file: PathBuf,
        #[arg(long)]
        config: String,
    },
    /// Test whether a configuration is critical.
    CheckCritical {
        file: PathBuf,
        #[arg(long)]
        config: String,
    },
    /// Test whether a configuration is z-superstable.
    CheckSuperstable {
        file: PathBuf,
        #[arg(long)]
        config: String,
    },
    /// Test whether a configuration is valid.
    Valid {
        file: PathBuf,
        #[arg(long)]
        config: String,
    },
    /// Switch one vertex and print the resulting edge list.
    Switch {
        file: PathBuf,
        #[arg(long)]
        vertex: String,
    },
    /// Canonical switching-class representative's edge list.
    Canonical { file: PathBuf },
    /// Balance test.
    Balanced { file: PathBuf },
    /// Weighted TU-subgraph count (negative graphs).
    TuCount { file: PathBuf },
    /// Build a graph family and report its predicted critical group.
    Family {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        n: usize,
        /// all_positive | all_negative | balanced_class |
        /// unbalanced_class | a +/- string, one sign per edge
        #[arg(long)]
        variant: String,
        /// Also compute the group and compare with the prediction.
        #[arg(long)]
        verify: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum KindArg {
    Cycle,
    Wheel,
    Fan,
    Complete,
}

impl From<KindArg> for FamilyKind {
    fn from(k: KindArg) -> FamilyKind {
        match k {
            KindArg::Cycle => FamilyKind::Cycle,
            KindArg::Wheel => FamilyKind::Wheel,
            KindArg::Fan => FamilyKind::Fan,
            KindArg::Complete => FamilyKind::Complete,
        }
    }
}

/// Parses the graph file format.
pub fn parse_graph_text(text: &str) -> Result<SignedGraph> {
    let mut names: Vec<String> = Vec::new();
    let mut sink: Option<(usize, usize)> = None; // (index, line)
    let mut edges: Vec<(usize, usize, Sign)> = Vec::new();
    let intern = |names: &mut Vec<String>, name: &str| -> usize {
        match names.iter().position(|n| n == name) {
            Some(i) => i,
            None => {
                names.push(name.to_string());
                names.len() - 1
            }
        }
    };
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "vertex" => {
                if tokens.len() != 2 {
                    return Err(Error::Parse { line: lineno, msg: "vertex takes one name".into() });
                }
                intern(&mut names, tokens[1]);
            }
            "sink" => {
                if tokens.len() != 2 {
                    return Err(Error::Parse { line: lineno, msg: "sink takes one name".into() });
                }
                if let Some((_, prev)) = sink {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("second sink directive (first at line {prev})"),
                    });
                }
                let i = intern(&mut names, tokens[1]);
                sink = Some((i, lineno));
            }
            "edge" => {
                if tokens.len() != 4 {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "edge takes two names and a sign".into(),
                    });
                }
                let s = match tokens[3] {
                    "+" => Sign::Positive,
                    "-" => Sign::Negative,
                    other => {
                        return Err(Error::Parse {
                            line: lineno,
                            msg: format!("unknown sign token {other:?}"),
                        })
                    }
                };
                let u = intern(&mut names, tokens[1]);
                let v = intern(&mut names, tokens[2]);
                if u == v {
                    return Err(Error::Parse { line: lineno, msg: format!("loop at {}", tokens[1]) });
                }
                let key = (u.min(v), u.max(v));
                if edges.iter().any(|&(a, b, _)| (a, b) == key) {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("duplicate edge {} {}", tokens[1], tokens[2]),
                    });
                }
                edges.push((key.0, key.1, s));
            }
            other => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("unknown directive {other:?}"),
                })
            }
        }
    }
    let Some((sink, _)) = sink else {
        return Err(Error::Parse { line: text.lines().count(), msg: "missing sink directive".into() });
    };
    SignedGraph::new(names, sink, edges)
}

/// Writes a graph back in the file format; reparsing yields an
/// identical graph (vertex lines pin the declaration order).
pub fn serialize_graph(g: &SignedGraph) -> String {
    let mut out = String::new();
    for name in g.vertex_names() {
        out.push_str(&format!("vertex {name}\n"));
    }
    out.push_str(&format!("sink {}\n", g.vertex_names()[g.sink()]));
    for &(u, v, s) in g.edges() {
        let sign = match s {
            Sign::Positive => "+",
            Sign::Negative => "-",
        };
        out.push_str(&format!(
            "edge {} {} {sign}\n",
            g.vertex_names()[u],
            g.vertex_names()[v]
        ));
    }
    out
}

fn parse_config(s: &str, dim: usize) -> Result<Configuration> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != dim {
        return Err(Error::Dimension(format!(
            "--config has {} entries, graph has {} nonsink vertices",
            parts.len(),
            dim
        )));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<BigInt>()
                .map_err(|_| Error::Precondition(format!("bad config entry {p:?}")))
        })
        .collect()
}

fn parse_variant(s: &str, kind: FamilyKind, n: usize) -> Result<Variant> {
    match s {
        "all_positive" => Ok(Variant::AllPositive),
        "all_negative" => Ok(Variant::AllNegative),
        "balanced_class" | "balanced" => Ok(Variant::BalancedClass),
        "unbalanced_class" | "unbalanced" => Ok(Variant::UnbalancedClass),
        other if other.chars().all(|c| c == '+' || c == '-') && !other.is_empty() => {
            let signs = other
                .chars()
                .map(|c| if c == '+' { Sign::Positive } else { Sign::Negative })
                .collect();
            Ok(Variant::Explicit(signs))
        }
        other => Err(Error::Precondition(format!(
            "unknown variant {other:?} for {kind:?} of size {n}"
        ))),
    }
}

fn bigint_value(b: &BigInt) -> Value {
    match i64::try_from(b) {
        Ok(v) => json!(v),
        Err(_) => json!(b.to_string()),
    }
}

fn config_value(c: &Configuration) -> Value {
    Value::Array(c.iter().map(bigint_value).collect())
}

fn config_list_value(cs: &[Configuration]) -> Value {
    Value::Array(cs.iter().map(config_value).collect())
}

fn edges_value(g: &SignedGraph) -> Value {
    Value::Array(
        g.edges()
            .iter()
            .map(|&(u, v, s)| {
                let sign = if s == Sign::Positive { "+" } else { "-" };
                json!(format!("{} {} {sign}", g.vertex_names()[u], g.vertex_names()[v]))
            })
            .collect(),
    )
}

/// Result of one subcommand: sorted key/value pairs.
pub type Document = BTreeMap<String, Value>;

fn load_pair(file: &PathBuf, cli_bound: Option<i64>, chi_cap: Option<usize>) -> Result<ChipFiringPair> {
    let g = load_graph(file)?;
    let mut pair = ChipFiringPair::new(g)?;
    if let Some(b) = cli_bound {
        pair = pair.with_scan_bound(BigInt::from(b));
    }
    if let Some(c) = chi_cap {
        pair = pair.with_chi_cap(c);
    }
    Ok(pair)
}

fn load_graph(file: &PathBuf) -> Result<SignedGraph> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| Error::Precondition(format!("cannot read {}: {e}", file.display())))?;
    parse_graph_text(&text)
}

fn vertex_index(g: &SignedGraph, name: &str) -> Result<usize> {
    g.vertex_names()
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::UnknownVertex(name.to_string()))
}

pub fn execute(cli: &Cli) -> Result<Document> {
    let mut doc = Document::new();
    match &cli.command {
        Command::Group { file } => {
            let pair = load_pair(file, cli.bound, cli.chi_cap)?;
            let g = pair.critical_group();
            doc.insert("order".into(), bigint_value(&g.order));
            doc.insert(
                "invariant_factors".into(),
                Value::Array(g.invariant_factors.iter().map(bigint_value).collect()),
            );
        }
        Command::Criticals { file } => {
            let pair = load_pair(file, cli.bound, cli.chi_cap)?;
            doc.insert("criticals".into(), config_list_value(&pair.enumerate_criticals()?));
        }
        Command::Superstables { file } => {
            let pair = load_pair(file, cli.bound, cli.chi_cap)?;
            doc.insert(
                "superstables".into(),
                config_list_value(&pair.enumerate_superstables()?),
            );
        }
        Command::Identity { file } => {
            let pair = load_pair(file, cli.bound, cli.chi_cap)?;
            doc.insert("identity".into(), config_value(&pair.identity()?));
        }
        Command::Stabilize { file, config } => {
            let pair = load_pair(file, cli.bound, cli.chi_cap)?;
            let c = parse_config(config, pair.dim())?;
            let (stable, fired) = pair.stabilize(&c)?;
            doc.insert("stable".into(), config_value(&stable));
            doc.insert("firing_vector".into(), config_value(&fired));
        }
        Command::CheckCritical { file, config } => {
            let pair = load_pair(file, cli.bound, cli.chi_cap)?;
            let c = parse_config(config, pair.dim())?;
            doc.insert("critical".into(), json!(pair.is_critical(&c)?));
        }
        Command::CheckSuperstable { file, config } => {
            let pair = load_pair(file, cli.bound, cli.chi_cap)?;
            let c = parse_config(config, pair.dim())?;
            doc.insert("superstable".into(), json!(pair.is_z_superstable(&c)?));
        }
        Command::Valid { file, config } => {
            let pair = load_pair(file, cli.bound, cli.chi_cap)?;
            let c = parse_config(config, pair.dim())?;
            let valid = pair.is_valid(&c)?;
            doc.insert("valid".into(), json!(valid));
            if valid {
                let x = pair.to_r(&c)?;
                doc.insert(
                    "image".into(),
                    Value::Array(x.iter().map(|r| json!(format_rational(r))).collect()),
                );
            }
        }
        Command::Switch { file, vertex } => {
            let g = load_graph(file)?;
            let v = vertex_index(&g, vertex)?;
            doc.insert("edges".into(), edges_value(&g.switch_vertex(v)?));
        }
        Command::Canonical { file } => {
            let g = load_graph(file)?;
            doc.insert("canonical_edges".into(), edges_value(&g.canonical_switch_rep()?));
        }
        Command::Balanced { file } => {
            let g = load_graph(file)?;
            doc.insert("balanced".into(), json!(g.is_balanced()?));
        }
        Command::TuCount { file } => {
            let g = load_graph(file)?;
            let tu = g.tu_subgraph_sum()?;
            doc.insert("tu_total".into(), bigint_value(&tu.total));
            let by: BTreeMap<String, Value> = tu
                .by_cycle_count
                .iter()
                .map(|(k, v)| (k.to_string(), bigint_value(v)))
                .collect();
            doc.insert("tu_by_cycles".into(), json!(by));
        }
        Command::Family { kind, n, variant, verify } => {
            let kind: FamilyKind = (*kind).into();
            let spec = FamilySpec {
                kind,
                n: *n,
                variant: parse_variant(variant, kind, *n)?,
            };
            let predicted = families::predicted_group(&spec)?;
            doc.insert(
                "predicted".into(),
                Value::Array(predicted.invariant_factors.iter().map(bigint_value).collect()),
            );
            doc.insert("source".into(), json!(predicted.source));
            if *verify {
                let pair = ChipFiringPair::new(families::build(&spec)?)?;
                let computed = pair.critical_group();
                doc.insert(
                    "invariant_factors".into(),
                    Value::Array(computed.invariant_factors.iter().map(bigint_value).collect()),
                );
                doc.insert("order".into(), bigint_value(&computed.order));
                doc.insert(
                    "matches".into(),
                    json!(computed.invariant_factors == predicted.invariant_factors),
                );
            }
        }
    }
    Ok(doc)
}

fn render_text_value(v: &Value) -> String {
    match v {
        Value::Array(items) if items.iter().all(Value::is_array) => {
            // list of configurations: one tuple per line
            items
                .iter()
                .map(|c| {
                    let parts: Vec<String> = c
                        .as_array()
                        .unwrap()
                        .iter()
                        .map(|e| e.to_string().trim_matches('"').to_string())
                        .collect();
                    format!("  ({})", parts.join(", "))
                })
                .collect::<Vec<_>>()
                .join("\n")
        }
        Value::Array(items) => {
            let parts: Vec<String> = items
                .iter()
                .map(|e| e.to_string().trim_matches('"').to_string())
                .collect();
            format!("({})", parts.join(", "))
        }
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" "),
        other => other.to_string().trim_matches('"').to_string(),
    }
}

pub fn render(doc: &Document, format: Format) -> String {
    match format {
        Format::Json => {
            let map: serde_json::Map<String, Value> =
                doc.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
            let mut s =
                serde_json::to_string_pretty(&Value::Object(map)).expect("document serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            for (k, v) in doc {
                let rendered = render_text_value(v);
                if rendered.contains('\n') {
                    out.push_str(&format!("{k}:\n{rendered}\n"));
                } else {
                    out.push_str(&format!("{k}: {rendered}\n"));
                }
            }
            out
        }
    }
}

/// Entry point: returns the process exit code (0 success, 1 domain
/// error, 2 usage error — the latter handled by the argument parser).
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(doc) => {
            print!("{}", render(&doc, cli.format));
            0
        }
        Err(err) => {
            let obj = json!({ "error": { "code": err.code(), "message": err.to_string() } });
            match cli.format {
                Format::Json => eprintln!("{}", serde_json::to_string_pretty(&obj).unwrap()),
                Format::Text => eprintln!("error[{}]: {err}", err.code()),
            }
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::IntMatrix;

    const G_EXAMPLE: &str = "\
# 4-cycle with a chord to the sink, one negative edge
sink q
edge v1 v2 -
edge v2 v3 +
edge v1 q +
edge v2 q +
edge v3 q +
";

    #[test]
    fn parses_single_edge() {
        let g = parse_graph_text("sink q\nedge q v1 +\n").unwrap();
        let (l, _) = g.reduced_laplacians().unwrap();
        assert_eq!(l, IntMatrix::from_i64(1, 1, &[1]));
    }

    #[test]
    fn parses_worked_example_file() {
        let g = parse_graph_text(G_EXAMPLE).unwrap();
        // q appears first, so nonsink order is v1, v2, v3 after it
        let (l, _) = g.reduced_laplacians().unwrap();
        assert_eq!(l, IntMatrix::from_i64(3, 3, &[2, 1, 0, 1, 3, -1, 0, -1, 2]));
    }

    #[test]
    fn rejects_malformed_files() {
        let two_sinks = "sink q\nsink r\nedge q r +\n";
        match parse_graph_text(two_sinks) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(
            parse_graph_text("edge a b +\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_graph_text("sink q\nedge q q +\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_graph_text("sink q\nedge q a +\nedge a q -\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_graph_text("sink q\nedge q a *\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_graph_text("wat q\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn round_trip() {
        let g = parse_graph_text(G_EXAMPLE).unwrap();
        let text = serialize_graph(&g);
        let g2 = parse_graph_text(&text).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn config_parsing() {
        assert_eq!(
            parse_config("6, 6,2", 3).unwrap(),
            vec![BigInt::from(6), BigInt::from(6), BigInt::from(2)]
        );
        assert!(parse_config("1,2", 3).is_err());
        assert!(parse_config("1,x,3", 3).is_err());
    }

    #[test]
    fn variant_parsing() {
        assert_eq!(
            parse_variant("all_negative", FamilyKind::Cycle, 5).unwrap(),
            Variant::AllNegative
        );
        assert_eq!(
            parse_variant("+-+", FamilyKind::Cycle, 3).unwrap(),
            Variant::Explicit(vec![Sign::Positive, Sign::Negative, Sign::Positive])
        );
        assert!(parse_variant("sideways", FamilyKind::Cycle, 3).is_err());
    }

    #[test]
    fn json_rendering_is_deterministic_and_sorted() {
        let mut doc = Document::new();
        doc.insert("order".into(), json!(8));
        doc.insert("invariant_factors".into(), json!([8]));
        let a = render(&doc, Format::Json);
        let b = render(&doc, Format::Json);
        assert_eq!(a, b);
        let inv = a.find("invariant_factors").unwrap();
        let ord = a.find("order").unwrap();
        assert!(inv < ord);
    }
}
