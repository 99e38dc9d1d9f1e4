//! Golden-file tests for every subcommand. Set `UPDATE_GOLDEN=1` to rewrite
//! the expected outputs.

use std::path::{Path, PathBuf};
use std::process::Command;

struct Case {
    name: &'static str,
    args: &'static [&'static str],
    env: &'static [(&'static str, &'static str)],
    code: i32,
    schema: Option<&'static str>,
}

const fn case(
    name: &'static str,
    args: &'static [&'static str],
    code: i32,
    schema: Option<&'static str>,
) -> Case {
    Case {
        name,
        args,
        env: &[],
        code,
        schema,
    }
}

const CASES: &[Case] = &[
    case(
        "parse_text",
        &["parse", "--formula", "E y . x=y^2 & !(x = 1)"],
        0,
        None,
    ),
    case(
        "parse_json",
        &[
            "parse",
            "--formula",
            "E y . x = y^2 | x != 0",
            "--format",
            "json",
        ],
        0,
        Some("parse"),
    ),
    case(
        "parse_file",
        &["parse", "--file", "tests/fixtures/two_squares.txt"],
        0,
        None,
    ),
    case(
        "parse_order",
        &["parse", "--order", "--formula", "x < y & (E z . z < x)"],
        0,
        None,
    ),
    case(
        "parse_syntax_error",
        &["parse", "--formula", "x = = 1"],
        2,
        None,
    ),
    case(
        "parse_order_disabled",
        &["parse", "--formula", "x < y"],
        2,
        None,
    ),
    case(
        "fmt_text",
        &["fmt", "--formula", "E y . E z . (x = y^2 & (y = z))"],
        0,
        None,
    ),
    case(
        "fmt_canonical",
        &[
            "fmt",
            "--canonical",
            "--formula",
            "E u . E v . x = u^2 + v^2",
        ],
        0,
        None,
    ),
    case(
        "fmt_json",
        &["fmt", "--format", "json", "--formula", "x*(y+1) = 0"],
        0,
        Some("formula"),
    ),
    case(
        "rank_q",
        &[
            "rank",
            "--profile",
            "Q",
            "--formula",
            "E y1 y2 . x1=y1^2 & x2=y2^2",
        ],
        0,
        Some("rank_report"),
    ),
    case(
        "rank_f5_single_eq",
        &[
            "rank",
            "--profile",
            "F5",
            "--pipeline",
            "prenex,pp,single_eq",
            "--formula",
            "(E y . x = y^2) & x != 0 | x = 1",
        ],
        0,
        Some("rank_report"),
    ),
    case(
        "rank_rcf_order",
        &[
            "rank",
            "--profile",
            "RCF",
            "--order",
            "--pipeline",
            "order_elim,prenex,pp",
            "--formula",
            "0 < x & x < 1",
        ],
        0,
        Some("rank_report"),
    ),
    case(
        "rank_text",
        &[
            "rank",
            "--format",
            "text",
            "--profile",
            "Q",
            "--formula",
            "(E y . x = y^2) | (E z . x = z^3)",
        ],
        0,
        None,
    ),
    case(
        "rank_bad_pass",
        &[
            "rank",
            "--profile",
            "Q",
            "--pipeline",
            "prenex,frobnicate",
            "--formula",
            "x = 1",
        ],
        2,
        None,
    ),
    case(
        "rank_bad_profile",
        &["rank", "--profile", "F6", "--formula", "x = 1"],
        2,
        None,
    ),
    case(
        "transform_text",
        &[
            "transform",
            "--profile",
            "Q",
            "--pipeline",
            "prenex,pp",
            "--formula",
            "x != 0 & y != 0 | x = y",
        ],
        0,
        None,
    ),
    case(
        "transform_json",
        &[
            "transform",
            "--format",
            "json",
            "--profile",
            "F3",
            "--pipeline",
            "prenex,pp,single_eq",
            "--formula",
            "x = 1 & y = 2",
        ],
        0,
        Some("transform"),
    ),
    case(
        "pi_collapse_ufd",
        &[
            "pi-collapse",
            "--p",
            "2",
            "--n",
            "3",
            "--k",
            "1",
            "--mode",
            "ufd",
        ],
        0,
        None,
    ),
    case(
        "pi_collapse_witness",
        &[
            "pi-collapse",
            "--p",
            "2",
            "--n",
            "2",
            "--mode",
            "ufd",
            "--witness",
            "t^2,(t+1)^2",
        ],
        0,
        None,
    ),
    case(
        "pi_collapse_not_power",
        &[
            "pi-collapse",
            "--p",
            "2",
            "--n",
            "2",
            "--mode",
            "ufd",
            "--witness",
            "t,1",
        ],
        1,
        None,
    ),
    case(
        "pi_collapse_json",
        &[
            "pi-collapse",
            "--format",
            "json",
            "--p",
            "3",
            "--n",
            "2",
            "--k",
            "2",
            "--witness",
            "1,t^9",
        ],
        0,
        Some("pi_collapse"),
    ),
    case(
        "pi_collapse_general",
        &[
            "pi-collapse",
            "--p",
            "3",
            "--n",
            "2",
            "--mode",
            "general",
            "--r",
            "2",
        ],
        0,
        None,
    ),
    case(
        "pi_collapse_bad_r",
        &[
            "pi-collapse",
            "--p",
            "3",
            "--n",
            "2",
            "--mode",
            "general",
            "--r",
            "3",
        ],
        2,
        None,
    ),
    case(
        "pi_collapse_too_large",
        &["pi-collapse", "--p", "3", "--n", "12"],
        3,
        None,
    ),
    case(
        "collapse_check",
        &[
            "collapse-check",
            "--p",
            "2",
            "--n",
            "2",
            "--bound",
            "2",
            "--samples",
            "200",
            "--seed",
            "42",
        ],
        0,
        Some("equiv_report"),
    ),
    case(
        "collapse_check_mutation",
        &[
            "collapse-check",
            "--p",
            "2",
            "--n",
            "2",
            "--bound",
            "3",
            "--samples",
            "1000",
            "--seed",
            "42",
            "--variant",
            "without-linear-term",
        ],
        1,
        Some("equiv_report"),
    ),
    case(
        "eval_table",
        &[
            "eval",
            "--profile",
            "F5",
            "--formula",
            "E y . x = y^2",
            "--table",
        ],
        0,
        None,
    ),
    case(
        "eval_table_f9",
        &[
            "eval",
            "--profile",
            "F9",
            "--formula",
            "E y . x = y^4",
            "--format",
            "json",
        ],
        0,
        Some("definable_set"),
    ),
    case(
        "eval_assign",
        &[
            "eval",
            "--profile",
            "F4",
            "--formula",
            "E y . y^2 + y = x",
            "--assign",
            "x=[a]",
        ],
        0,
        None,
    ),
    case(
        "eval_assign_json",
        &[
            "eval",
            "--profile",
            "F7",
            "--formula",
            "E y . x = y^3",
            "--assign",
            "x=6",
            "--format",
            "json",
        ],
        0,
        Some("eval_value"),
    ),
    case(
        "eval_ratfunc",
        &[
            "eval",
            "--profile",
            "F2t",
            "--bound",
            "1",
            "--formula",
            "E y . x = y^2",
        ],
        0,
        None,
    ),
    case(
        "eval_ratfunc_json",
        &[
            "eval",
            "--profile",
            "F3t",
            "--bound",
            "1",
            "--formula",
            "E y . x = y^3 + c:t",
            "--assign",
            "x=t+1",
            "--format",
            "json",
        ],
        0,
        Some("eval_rows"),
    ),
    case(
        "eval_q_assign",
        &[
            "eval",
            "--profile",
            "Q",
            "--formula",
            "4*x^2 = 1",
            "--assign",
            "x=-1/2",
        ],
        0,
        None,
    ),
    case(
        "eval_q_quantified",
        &[
            "eval",
            "--profile",
            "Q",
            "--formula",
            "E y . x = y^2",
            "--assign",
            "x=2",
        ],
        3,
        None,
    ),
    case(
        "eval_rcf",
        &[
            "eval",
            "--profile",
            "RCF",
            "--formula",
            "x = 1",
            "--assign",
            "x=1",
        ],
        3,
        None,
    ),
    Case {
        name: "eval_cap",
        args: &["eval", "--profile", "F5", "--formula", "E y . x = y^2"],
        env: &[("ERANK_MAX_STATES", "10")],
        code: 3,
        schema: None,
    },
    case(
        "equiv_inverse",
        &[
            "equiv",
            "--f1",
            "x != 0",
            "--f2",
            "E z . x*z = 1",
            "--battery",
            "default",
        ],
        0,
        Some("equiv_report"),
    ),
    case(
        "equiv_refuted",
        &[
            "equiv",
            "--f1",
            "E y . x = y^2",
            "--f2",
            "E y . x = y^4",
            "--battery",
            "5",
        ],
        1,
        Some("equiv_report"),
    ),
    case(
        "equiv_text",
        &[
            "equiv",
            "--format",
            "text",
            "--f1",
            "E y . x = y^2",
            "--f2",
            "E y . x = y^2*y^2",
            "--battery",
            "3,7,9",
        ],
        1,
        None,
    ),
    case(
        "geom_to_system",
        &["geom", "to-system", "--formula", "E y . x = y^2"],
        0,
        Some("system"),
    ),
    case(
        "geom_to_system_pp",
        &[
            "geom",
            "to-system",
            "--pp",
            "--formula",
            "E y . x = y^2 & y != 0",
        ],
        0,
        Some("system"),
    ),
    case(
        "geom_to_system_not_pp",
        &["geom", "to-system", "--formula", "x != 0"],
        2,
        None,
    ),
    case(
        "geom_from_system",
        &[
            "geom",
            "from-system",
            "--system",
            "tests/fixtures/parabola.json",
        ],
        0,
        None,
    ),
    case(
        "geom_from_system_json",
        &[
            "geom",
            "from-system",
            "--format",
            "json",
            "--system-json",
            "{\"x_vars\":[\"x\"],\"y_vars\":[],\"generators\":[]}",
        ],
        0,
        Some("formula"),
    ),
    case(
        "geom_image",
        &[
            "geom",
            "image",
            "--system",
            "tests/fixtures/parabola.json",
            "--profile",
            "F7",
        ],
        0,
        None,
    ),
    case(
        "geom_image_json",
        &[
            "geom",
            "image",
            "--format",
            "json",
            "--system",
            "tests/fixtures/hyperbola.json",
            "--profile",
            "F4",
        ],
        0,
        Some("definable_set"),
    ),
    case(
        "geom_fibre",
        &[
            "geom",
            "fibre",
            "--system",
            "tests/fixtures/parabola.json",
            "--profile",
            "F3",
            "--point",
            "1",
            "--max-k",
            "2",
        ],
        0,
        None,
    ),
    case(
        "geom_fibre_json",
        &[
            "geom",
            "fibre",
            "--format",
            "json",
            "--system",
            "tests/fixtures/hyperbola.json",
            "--profile",
            "F2",
            "--point",
            "0",
            "--max-k",
            "2",
        ],
        0,
        Some("fibre"),
    ),
    case(
        "geom_fibre_dim",
        &[
            "geom",
            "fibre-dim",
            "--system",
            "tests/fixtures/hyperbola.json",
            "--profile",
            "F2",
            "--point",
            "0",
            "--max-k",
            "4",
        ],
        0,
        Some("fibre_dim"),
    ),
    case(
        "geom_fibre_dim_text",
        &[
            "geom",
            "fibre-dim",
            "--format",
            "text",
            "--system",
            "tests/fixtures/parabola.json",
            "--profile",
            "F3",
            "--point",
            "2",
            "--max-k",
            "3",
        ],
        0,
        None,
    ),
    case(
        "pair_encode_nat",
        &["pair", "encode", "--profile", "N", "3", "4"],
        0,
        None,
    ),
    case(
        "pair_decode_nat",
        &[
            "pair",
            "decode",
            "--profile",
            "N",
            "--n",
            "3",
            "1000",
            "--format",
            "json",
        ],
        0,
        Some("pair"),
    ),
    case(
        "pair_encode_charp",
        &[
            "pair",
            "encode",
            "--profile",
            "F3t",
            "--format",
            "json",
            "t",
            "t^2+1",
            "2",
        ],
        0,
        Some("pair"),
    ),
    case(
        "pair_decode_charp",
        &["pair", "decode", "--profile", "F2t", "t^6 + t^4 + t^2 + t"],
        0,
        None,
    ),
    case(
        "pair_decode_not_code",
        &[
            "pair",
            "decode",
            "--profile",
            "F3t",
            "--format",
            "json",
            "t^2",
        ],
        1,
        Some("pair"),
    ),
    case(
        "pair_bad_profile",
        &["pair", "encode", "--profile", "F5", "1", "2"],
        3,
        None,
    ),
    case("usage_error", &["rank", "--formula", "x = 1"], 2, None),
];

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn run(c: &Case) -> (i32, Vec<u8>, Vec<u8>) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_erank"));
    cmd.args(c.args)
        .current_dir(manifest_dir())
        .env_remove("ERANK_MAX_STATES");
    for (k, v) in c.env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        out.stdout,
        out.stderr,
    )
}

fn load_schema(name: &str) -> jsonschema::JSONSchema {
    let path = manifest_dir()
        .join("schemas")
        .join(format!("{name}.schema.json"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let schema: serde_json::Value = serde_json::from_str(&text).expect("schema is JSON");
    jsonschema::JSONSchema::compile(&schema).expect("schema compiles")
}

fn golden_path(name: &str, ext: &str) -> PathBuf {
    manifest_dir()
        .join("tests/golden")
        .join(format!("{name}.{ext}"))
}

fn check(c: &Case, update: bool) -> Result<(), String> {
    let (code, stdout, stderr) = run(c);
    if code != c.code {
        return Err(format!("{}: exit code {code}, expected {}", c.name, c.code));
    }
    let (_, again, again_err) = run(c);
    if again != stdout || again_err != stderr {
        return Err(format!("{}: output differs between two runs", c.name));
    }
    if let Some(schema) = c.schema {
        let v: serde_json::Value = serde_json::from_slice(&stdout)
            .map_err(|e| format!("{}: stdout is not JSON: {e}", c.name))?;
        let compiled = load_schema(schema);
        let msgs: Vec<String> = match compiled.validate(&v) {
            Ok(()) => Vec::new(),
            Err(errors) => errors
                .map(|e| format!("{e} at {}", e.instance_path))
                .collect(),
        };
        if !msgs.is_empty() {
            return Err(format!("{}: schema {schema}: {}", c.name, msgs.join("; ")));
        }
    }
    compare(&golden_path(c.name, "out"), &stdout, update)?;
    let err_path = golden_path(c.name, "err");
    if stderr.is_empty() && !err_path.exists() {
        return Ok(());
    }
    compare(&err_path, &stderr, update)
}

fn compare(path: &Path, got: &[u8], update: bool) -> Result<(), String> {
    if update {
        return std::fs::write(path, got).map_err(|e| e.to_string());
    }
    let expected = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected != got {
        return Err(format!(
            "{} differs\n--- got ---\n{}",
            path.display(),
            String::from_utf8_lossy(got)
        ));
    }
    Ok(())
}

#[test]
fn golden_outputs() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let failures: Vec<String> = CASES
        .iter()
        .filter_map(|c| check(c, update).err())
        .collect();
    assert!(failures.is_empty(), "{}", failures.join("\n\n"));
}

#[test]
fn every_subcommand_has_a_case() {
    let covered: Vec<String> = CASES
        .iter()
        .map(|c| {
            let sub = c.args[0];
            if sub == "geom" || sub == "pair" {
                format!("{sub} {}", c.args[1])
            } else {
                sub.to_string()
            }
        })
        .collect();
    for sub in [
        "parse",
        "fmt",
        "rank",
        "transform",
        "pi-collapse",
        "collapse-check",
        "eval",
        "equiv",
        "geom to-system",
        "geom from-system",
        "geom image",
        "geom fibre",
        "geom fibre-dim",
        "pair encode",
        "pair decode",
    ] {
        assert!(
            covered.iter().any(|c| c == sub),
            "no golden case for `{sub}`"
        );
    }
}

#[test]
fn every_shipped_schema_is_used() {
    let dir = manifest_dir().join("schemas");
    for entry in std::fs::read_dir(&dir).unwrap() {
        let file = entry.unwrap().file_name().into_string().unwrap();
        let name = file.trim_end_matches(".schema.json");
        load_schema(name);
        assert!(
            CASES.iter().any(|c| c.schema == Some(name)),
            "schema {name} is not exercised"
        );
    }
    assert!(Path::new(&dir).is_dir());
}
