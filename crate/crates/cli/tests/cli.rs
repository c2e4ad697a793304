use std::path::{Path, PathBuf};
use std::process::Command;

use hecc_cli::archive::{Archive, ArchiveHeader};
use hecc_core::{Elem, Field};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const EXAMPLE: &str = "m = 4\nprim_poly = 0x13\np = 2\n\
    block.1.k = 3\nblock.1.r = 3\nblock.1.delta = 1\n\
    block.1.rows = 1 2 3 4\nblock.1.cols = 8 9 10 11\n\
    block.2.k = 3\nblock.2.r = 3\nblock.2.delta = 1\n\
    block.2.rows = 1 2 3 4\nblock.2.cols = 8 9 10 11\n";

/// Messages (b, 0, b^4) and (0, 1, 0) as packed nibbles.
const EXAMPLE_PAYLOAD: [u8; 3] = [0x20, 0x30, 0x10];

struct Dir(tempfile::TempDir);

impl Dir {
    fn new() -> Dir {
        Dir(tempfile::tempdir().unwrap())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }

    fn s(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }

    fn write(&self, name: &str, data: &[u8]) -> String {
        std::fs::write(self.path(name), data).unwrap();
        self.s(name)
    }
}

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn hecc(args: &[&str]) -> Out {
    let o = Command::new(env!("CARGO_BIN_EXE_hecc"))
        .args(args)
        .output()
        .unwrap();
    Out {
        code: o.status.code().unwrap(),
        stdout: String::from_utf8(o.stdout).unwrap(),
        stderr: String::from_utf8(o.stderr).unwrap(),
    }
}

fn json(o: &Out) -> Value {
    serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", o.stdout))
}

fn encode_example(d: &Dir) -> String {
    let input = d.write("in.bin", &EXAMPLE_PAYLOAD);
    let cfg = d.write("ex.cfg", EXAMPLE.as_bytes());
    let o = hecc(&["encode", &input, "--config", &cfg, "-o", &d.s("a.hecc")]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    d.s("a.hecc")
}

fn read(path: &str) -> Archive {
    Archive::from_bytes(&std::fs::read(path).unwrap()).unwrap()
}

fn write(path: &Path, a: &Archive) {
    std::fs::write(path, a.to_bytes()).unwrap();
}

fn gf16() -> Field {
    Field::new(4, 0x13).unwrap()
}

fn pows(f: &Field, logs: &[Option<i64>]) -> Vec<Elem> {
    logs.iter()
        .map(|l| l.map_or(Elem::ZERO, |l| f.exp(l)))
        .collect()
}

#[test]
fn example_stripe_layout() {
    let d = Dir::new();
    let a = read(&encode_example(&d));
    let f = gf16();
    let want = pows(
        &f,
        &[
            Some(1),
            None,
            Some(4),
            Some(1),
            Some(11),
            Some(13),
            None,
            Some(0),
            None,
            Some(13),
            Some(6),
            Some(2),
        ],
    );
    assert_eq!(a.header.stripe_count, 1);
    assert_eq!(a.header.pad_symbols(), 0);
    assert_eq!(a.symbols, want);
}

#[test]
fn empty_input_gives_header_only_archive() {
    let d = Dir::new();
    let input = d.write("empty", b"");
    let cfg = d.write("ex.cfg", EXAMPLE.as_bytes());
    assert_eq!(
        hecc(&["encode", &input, "--config", &cfg, "-o", &d.s("a")]).code,
        0
    );
    let a = read(&d.s("a"));
    assert_eq!(a.header.stripe_count, 0);
    assert_eq!(std::fs::read(d.s("a")).unwrap(), a.header.to_bytes());
    assert_eq!(hecc(&["decode", &d.s("a"), "-o", &d.s("out")]).code, 0);
    assert!(std::fs::read(d.s("out")).unwrap().is_empty());
}

#[test]
fn padding_is_stripped() {
    let d = Dir::new();
    let cfg = d.write("ex.cfg", EXAMPLE.as_bytes());
    for len in [1usize, 2, 4, 5, 7, 100] {
        let data: Vec<u8> = (0..len as u8).map(|x| x.wrapping_mul(37)).collect();
        let input = d.write("in", &data);
        let o = hecc(&[
            "encode",
            &input,
            "--config",
            &cfg,
            "-o",
            &d.s("a"),
            "--report",
            "json",
        ]);
        assert_eq!(o.code, 0);
        let h =
            ArchiveHeader::for_payload(hecc_core::HierConfig::parse(EXAMPLE).unwrap(), len as u64);
        assert_eq!(json(&o)["pad_symbols"], h.pad_symbols());
        assert_eq!(hecc(&["decode", &d.s("a"), "-o", &d.s("out")]).code, 0);
        assert_eq!(std::fs::read(d.s("out")).unwrap(), data);
    }
}

#[test]
fn corruption_is_deterministic() {
    let d = Dir::new();
    let a = encode_example(&d);
    let run = |out: &str, seed: &str| {
        let o = hecc(&[
            "corrupt",
            &a,
            "-o",
            &d.s(out),
            "--errors",
            "rand:1",
            "--erasures",
            "rand:1",
            "--seed",
            seed,
        ]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        (
            std::fs::read(d.s(out)).unwrap(),
            std::fs::read(format!("{}.erasures.json", d.s(out))).unwrap(),
        )
    };
    assert_eq!(run("x", "7"), run("y", "7"));
    assert_ne!(run("x", "7").0, std::fs::read(&a).unwrap());
}

#[test]
fn erasure_sidecar() {
    let d = Dir::new();
    let a = encode_example(&d);
    let o = hecc(&["corrupt", &a, "-o", &d.s("b"), "--erasures", "1:4"]);
    assert_eq!(o.code, 0);
    let map: Value =
        serde_json::from_slice(&std::fs::read(d.s("b.erasures.json")).unwrap()).unwrap();
    assert_eq!(
        map,
        serde_json::json!({"erasures": [{"stripe": 1, "block": 1, "symbol": 4}]})
    );
    // erased symbols are zeroed in the archive
    assert_eq!(read(&d.s("b")).symbols[3], Elem::ZERO);
    let o = hecc(&[
        "decode",
        &d.s("b"),
        "-o",
        &d.s("out"),
        "--erasure-map",
        &d.s("b.erasures.json"),
    ]);
    assert_eq!(o.code, 0, "{}", o.stdout);
    assert_eq!(std::fs::read(d.s("out")).unwrap(), EXAMPLE_PAYLOAD);

    let custom = d.s("map.json");
    let o = hecc(&[
        "corrupt",
        &a,
        "-o",
        &d.s("c"),
        "--erasures",
        "2:1",
        "--erasure-map",
        &custom,
    ]);
    assert_eq!(o.code, 0);
    assert!(Path::new(&custom).exists());
}

#[test]
fn budget_enforcement() {
    let d = Dir::new();
    let a = encode_example(&d);
    // one block per stripe may use the global budget 2s + t <= 4
    let over = hecc(&[
        "corrupt",
        &a,
        "-o",
        &d.s("b"),
        "--errors",
        "1:1,1:2,1:3",
        "--enforce-budget",
    ]);
    assert_eq!(over.code, 1);
    assert!(over.stderr.contains("budget"), "{}", over.stderr);
    let global = hecc(&[
        "corrupt",
        &a,
        "-o",
        &d.s("b"),
        "--errors",
        "1:1,1:2",
        "--enforce-budget",
    ]);
    assert_eq!(global.code, 0, "{}", global.stderr);
    let both = hecc(&[
        "corrupt",
        &a,
        "-o",
        &d.s("b"),
        "--errors",
        "1:1,2:1",
        "--enforce-budget",
    ]);
    assert_eq!(both.code, 0, "{}", both.stderr);
    let two_global = hecc(&[
        "corrupt",
        &a,
        "-o",
        &d.s("b"),
        "--errors",
        "1:1,1:2,2:1,2:2",
        "--enforce-budget",
    ]);
    assert_eq!(two_global.code, 1);
    let range = hecc(&["corrupt", &a, "-o", &d.s("b"), "--errors", "3:1"]);
    assert_eq!(range.code, 1);
}

/// Writes the example archive with the listed symbols of block 1 replaced.
fn with_block1(d: &Dir, name: &str, changes: &[(usize, Option<i64>)]) -> String {
    let path = encode_example(d);
    let mut a = read(&path);
    let f = gf16();
    for &(j, l) in changes {
        a.symbols[j] = pows(&f, &[l])[0];
    }
    write(&d.path(name), &a);
    d.s(name)
}

#[test]
fn local_example_decodes() {
    let d = Dir::new();
    let b = with_block1(&d, "b", &[(1, Some(2))]);
    for mode in ["local", "auto"] {
        let o = hecc(&[
            "decode",
            &b,
            "-o",
            &d.s("out"),
            "--mode",
            mode,
            "--report",
            "json",
        ]);
        assert_eq!(o.code, 0, "{}", o.stdout);
        let r = json(&o);
        assert_eq!(r["summary"]["corrected_local"], 1);
        assert_eq!(r["blocks"][0]["status"], "corrected-local");
        assert_eq!(r["blocks"][0]["positions"], serde_json::json!([2]));
        assert_eq!(std::fs::read(d.s("out")).unwrap(), EXAMPLE_PAYLOAD);
    }
}

#[test]
fn global_example_decodes() {
    let d = Dir::new();
    let b = with_block1(&d, "b", &[(1, Some(0)), (4, Some(9))]);
    let local = hecc(&["decode", &b, "-o", &d.s("out"), "--mode", "local"]);
    assert_eq!(local.code, 2, "{}", local.stdout);
    assert!(local.stdout.contains("decode FAILED"));
    for mode in ["auto", "global"] {
        let o = hecc(&[
            "decode",
            &b,
            "-o",
            &d.s("out"),
            "--mode",
            mode,
            "--report",
            "json",
        ]);
        assert_eq!(o.code, 0, "{}", o.stdout);
        let r = json(&o);
        assert_eq!(r["summary"]["corrected_global"], 1);
        assert_eq!(r["blocks"][0]["block"], 1);
        assert_eq!(r["blocks"][0]["positions"], serde_json::json!([2, 5]));
        assert_eq!(std::fs::read(d.s("out")).unwrap(), EXAMPLE_PAYLOAD);
    }
}

#[test]
fn unrecoverable_stripe_fails() {
    let d = Dir::new();
    let b = with_block1(
        &d,
        "b",
        &[(0, Some(3)), (1, Some(3)), (2, Some(3)), (3, Some(3))],
    );
    let o = hecc(&["decode", &b, "-o", &d.s("out"), "--report", "json"]);
    assert_eq!(o.code, 2);
    assert_eq!(json(&o)["ok"], false);
    assert!(!d.path("out").exists());
}

#[test]
fn inspect_budgets() {
    let d = Dir::new();
    let a = encode_example(&d);
    let o = hecc(&["inspect", &a, "--report", "json"]);
    assert_eq!(o.code, 0);
    let r = json(&o);
    assert_eq!(r["magic"], "HECC1");
    assert_eq!(r["delta"], 2);
    let b = &r["blocks"][0];
    assert_eq!(b["local_distance"], 3);
    assert_eq!(b["local_max_errors"], 1);
    assert_eq!(b["global_distance"], 5);
    assert_eq!(b["global_max_errors"], 2);
    assert_eq!(b["global_hybrid_budget"], 4);
    let text = hecc(&["inspect", &a]);
    assert!(text.stdout.contains("GF(2^4)"));
}

#[test]
fn bad_inputs() {
    let d = Dir::new();
    let a = encode_example(&d);
    let bytes = std::fs::read(&a).unwrap();
    let cut = d.write("cut", &bytes[..bytes.len() - 1]);
    assert_eq!(hecc(&["inspect", &cut]).code, 3);
    assert_eq!(hecc(&["decode", &cut, "-o", &d.s("o")]).code, 3);
    assert_eq!(hecc(&["inspect", &d.s("missing")]).code, 1);
    assert_eq!(hecc(&["frobnicate"]).code, 1);
    assert_eq!(hecc(&["--help"]).code, 0);

    let bad_cfg = d.write(
        "bad.cfg",
        b"m = 4\np = 1\nblock.1.k = 3\nblock.1.r = 1\nblock.1.delta = 1\n",
    );
    let input = d.write("in", b"x");
    assert_eq!(
        hecc(&["encode", &input, "--config", &bad_cfg, "-o", &d.s("o")]).code,
        3
    );

    let map = d.write(
        "map.json",
        br#"{"erasures": [{"stripe": 1, "block": 1, "symbol": 99}]}"#,
    );
    assert_eq!(
        hecc(&["decode", &a, "-o", &d.s("o"), "--erasure-map", &map]).code,
        3
    );
    let junk = d.write("junk.json", b"not json");
    assert_eq!(
        hecc(&["decode", &a, "-o", &d.s("o"), "--erasure-map", &junk]).code,
        3
    );
}

#[test]
fn reported_positions_match_injection() {
    let d = Dir::new();
    let cfg = d.write(
        "c.cfg",
        b"m = 8\np = 3\nblock.1.k = 20\nblock.1.r = 8\nblock.1.delta = 2\n\
          block.2.k = 16\nblock.2.r = 10\nblock.2.delta = 1\n\
          block.3.k = 24\nblock.3.r = 6\nblock.3.delta = 2\n",
    );
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let data: Vec<u8> = (0..5000).map(|_| rng.gen()).collect();
    let input = d.write("in", &data);
    assert_eq!(
        hecc(&["encode", &input, "--config", &cfg, "-o", &d.s("a")]).code,
        0
    );
    for seed in 0..10 {
        let seed = seed.to_string();
        let o = hecc(&[
            "corrupt",
            &d.s("a"),
            "-o",
            &d.s("b"),
            "--errors",
            "rand:2",
            "--erasures",
            "rand:2",
            "--seed",
            &seed,
            "--enforce-budget",
            "--report",
            "json",
        ]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        let injected = json(&o);
        let mut want: Vec<[u64; 3]> = ["errors", "erasures"]
            .iter()
            .flat_map(|k| injected[k].as_array().unwrap().clone())
            .map(|v| serde_json::from_value(v).unwrap())
            .collect();
        want.sort();
        let o = hecc(&[
            "decode",
            &d.s("b"),
            "-o",
            &d.s("out"),
            "--erasure-map",
            &d.s("b.erasures.json"),
            "--report",
            "json",
        ]);
        assert_eq!(o.code, 0, "{}", o.stdout);
        let mut got: Vec<[u64; 3]> = json(&o)["blocks"]
            .as_array()
            .unwrap()
            .iter()
            .flat_map(|b| {
                let (s, blk) = (b["stripe"].as_u64().unwrap(), b["block"].as_u64().unwrap());
                b["positions"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(move |p| [s, blk, p.as_u64().unwrap()])
            })
            .collect();
        got.sort();
        assert_eq!(got, want, "seed {seed}");
        assert_eq!(std::fs::read(d.s("out")).unwrap(), data);
    }
}
