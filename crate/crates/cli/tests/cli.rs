use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn colt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_colt")).args(args).output().expect("spawn colt")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn workdir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

/// 8x8 grid in DIMACS form with a few heavier edges, ids 1-based.
fn write_dimacs(dir: &Path) -> (PathBuf, PathBuf) {
    let (w, h) = (8u32, 8u32);
    let id = |x: u32, y: u32| y * w + x + 1;
    let mut arcs = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if x + 1 < w {
                let c = 10 + (x * 7 + y * 3) % 13;
                arcs.push((id(x, y), id(x + 1, y), c));
                arcs.push((id(x + 1, y), id(x, y), c));
            }
            if y + 1 < h {
                let c = 10 + (x * 5 + y * 11) % 17;
                arcs.push((id(x, y), id(x, y + 1), c));
                arcs.push((id(x, y + 1), id(x, y), c));
            }
        }
    }
    let mut gr = format!("c grid\np sp {} {}\n", w * h, arcs.len());
    for (u, v, c) in arcs {
        gr += &format!("a {u} {v} {c}\n");
    }
    let mut co = format!("p aux sp co {}\n", w * h);
    for y in 0..h {
        for x in 0..w {
            co += &format!("v {} {} {}\n", id(x, y), x * 10, y * 10);
        }
    }
    let (grp, cop) = (dir.join("g.gr"), dir.join("g.co"));
    fs::write(&grp, gr).unwrap();
    fs::write(&cop, co).unwrap();
    (grp, cop)
}

struct Setup {
    dir: PathBuf,
    graph: String,
    objects: String,
}

fn setup(name: &str) -> Setup {
    let dir = workdir(name);
    let (gr, co) = write_dimacs(&dir);
    let graph = dir.join("g.bin");
    let out = colt(&["ingest", "--gr", gr.to_str().unwrap(), "--co", co.to_str().unwrap(), "-o", graph.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let objects = dir.join("objects.txt");
    let out = colt(&["gen-objects", "--graph", graph.to_str().unwrap(), "--density", "0.2", "--seed", "5", "-o", objects.to_str().unwrap()]);
    assert!(out.status.success());
    Setup { graph: graph.to_str().unwrap().into(), objects: objects.to_str().unwrap().into(), dir }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(colt(&["--help"]).status.code(), Some(0));
    assert_eq!(colt(&["--version"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(colt(&[]).status.code(), Some(1));
    assert_eq!(colt(&["query", "teleport"]).status.code(), Some(1));
    assert_eq!(colt(&["ingest", "--gr", "/nonexistent/x.gr", "-o", "/tmp/never"]).status.code(), Some(1));
}

#[test]
fn gen_objects_is_deterministic() {
    let s = setup("gen_objects");
    let a = colt(&["gen-objects", "--graph", &s.graph, "--density", "0.2", "--seed", "5"]);
    assert_eq!(stdout(&a), fs::read_to_string(&s.objects).unwrap());
    assert_eq!(stdout(&a).lines().count(), 12);
}

#[test]
fn every_query_kind_matches_brute_force() {
    let s = setup("queries");
    let sul = s.dir.join("s.bin");
    let col = s.dir.join("c.bin");
    let (sul, col) = (sul.to_str().unwrap(), col.to_str().unwrap());
    let out = colt(&["build-sultree", "--graph", &s.graph, "-o", sul, "--b", "4", "--alpha", "8", "--m-root", "4", "--lazy-depth", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = colt(&["build-coltree", "--graph", &s.graph, "--sultree", sul, "--objects", &s.objects, "--lambda", "2", "-o", col]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let cases: &[&[&str]] = &[
        &["aknn", "--q", "3,17,40", "--k", "4", "--agg", "sum"],
        &["aknn", "--q", "3,17,40", "--k", "4"],
        &["knn", "--q", "60", "--k", "3"],
        &["kfn", "--q", "0", "--k", "5"],
        &["range", "--q", "27", "--radius", "40"],
    ];
    for case in cases {
        let mut brute = vec!["query"];
        brute.extend_from_slice(case);
        brute.extend_from_slice(&["--graph", &s.graph, "--objects", &s.objects, "--method", "brute"]);
        let expected = colt(&brute);
        assert!(expected.status.success());
        for backend in ["bidijkstra", "alt"] {
            let mut args = vec!["query"];
            args.extend_from_slice(case);
            args.extend_from_slice(&["--graph", &s.graph, "--objects", &s.objects, "--sultree", sul, "--coltree", col]);
            args.extend_from_slice(&["--backend", backend, "--check"]);
            let out = colt(&args);
            assert_eq!(out.status.code(), Some(0), "{case:?}: {}", String::from_utf8_lossy(&out.stderr));
            assert_eq!(stdout(&out), stdout(&expected), "{case:?} with {backend}");
        }
    }
}

#[test]
fn baselines_answer_what_they_support() {
    let s = setup("baselines");
    let base = ["--graph", s.graph.as_str(), "--objects", s.objects.as_str()];
    let run = |extra: &[&str]| {
        let mut args = vec!["query"];
        args.extend_from_slice(extra);
        args.extend_from_slice(&base);
        colt(&args)
    };
    assert_eq!(run(&["kfn", "--q", "9", "--method", "aub", "--check"]).status.code(), Some(0));
    assert_eq!(run(&["aknn", "--q", "9,30", "--method", "ier", "--check"]).status.code(), Some(0));
    assert_eq!(run(&["range", "--q", "9", "--radius", "30", "--method", "ier", "--check"]).status.code(), Some(0));
    assert_eq!(run(&["kfn", "--q", "9", "--method", "ier"]).status.code(), Some(1));
    assert_eq!(run(&["aknn", "--q", "9", "--method", "aub"]).status.code(), Some(1));
    assert_eq!(run(&["kfn", "--q", "9,10"]).status.code(), Some(1));
    assert_eq!(run(&["range", "--q", "9"]).status.code(), Some(1));
}

#[test]
fn coltree_from_another_sultree_is_rejected() {
    let s = setup("mismatch");
    let (a, b, col) = (s.dir.join("a.bin"), s.dir.join("b.bin"), s.dir.join("c.bin"));
    let (a, b, col) = (a.to_str().unwrap(), b.to_str().unwrap(), col.to_str().unwrap());
    assert!(colt(&["build-sultree", "--graph", &s.graph, "-o", a, "--seed", "1"]).status.success());
    assert!(colt(&["build-sultree", "--graph", &s.graph, "-o", b, "--b", "4", "--seed", "2"]).status.success());
    assert!(colt(&["build-coltree", "--graph", &s.graph, "--sultree", a, "--objects", &s.objects, "-o", col]).status.success());
    let out = colt(&["query", "knn", "--q", "1", "--graph", &s.graph, "--objects", &s.objects, "--sultree", b, "--coltree", col]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("checksum"));
}

#[test]
fn bench_writes_csv() {
    let s = setup("bench");
    let spec = s.dir.join("spec.txt");
    let csv = s.dir.join("out.csv");
    fs::write(
        &spec,
        format!(
            "graph = {}\nkind = aknn\nk = 3\ndensity = 0.2\nquery_size = 2\nlocality = 50\n\
             object_sets = 2\nquery_sets = 3\nb = 4\nalpha = 8\nlambda = 2\nm_root = 4\nmethods = coltree,brute,ier\n\
             oracle_sample = 1\n",
            s.graph
        ),
    )
    .unwrap();
    let out = colt(&["bench", "--spec", spec.to_str().unwrap(), "-o", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("method,kind,status"));
    assert_eq!(lines.len(), 4);
    assert!(lines[1..].iter().all(|l| l.contains(",ok,")), "{text}");

    fs::write(&spec, "kind = teleport\n").unwrap();
    assert_eq!(colt(&["bench", "--spec", spec.to_str().unwrap()]).status.code(), Some(1));
}
