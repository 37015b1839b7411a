use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use so3_pca::io;
use so3_pca::VoxelGridF64;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_so3pca")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn expand_constant_volume() {
    let dir = tempfile::tempdir().unwrap();
    let vol = dir.path().join("ball.raw");
    let grid = VoxelGridF64::new(16, vec![1.0; 16 * 16 * 16]).unwrap();
    io::write_voxels(&vol, &grid).unwrap();
    let out = dir.path().join("ball.bhc");

    let o = run(&["expand", "--in", s(&vol), "--spec", "L=4,band=8pi", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let frac: f64 = text.lines().find(|l| l.starts_with("l>0 energy")).unwrap().rsplit(' ').next().unwrap().parse().unwrap();
    assert!(frac < 1e-3, "{text}");
    assert!(io::read_coeffs::<f64>(&out).is_ok());

    let o = run(&["expand", "--in", s(&vol), "--nyquist", "--lmax", "2", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let expected = format!("band_limit = {}", 16.0 * std::f64::consts::PI / 2.0);
    assert!(stdout(&o).contains(&expected), "{}", stdout(&o));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.raw");
    let out = dir.path().join("x.bhc");
    assert_eq!(run(&["expand", "--in", s(&missing), "--spec", "L=2,band=4pi", "--out", s(&out)]).status.code(), Some(2));

    let vol = dir.path().join("v.raw");
    io::write_voxels(&vol, &VoxelGridF64::new(8, vec![0.5; 512]).unwrap()).unwrap();
    assert_eq!(run(&["expand", "--in", s(&vol), "--spec", "L=2,band=0.5", "--out", s(&out)]).status.code(), Some(3));

    fs::write(&vol, [0u8; 10]).unwrap();
    let o = run(&["expand", "--in", s(&vol), "--spec", "L=2,band=4pi", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("expected 2048"));

    // mixed specs in one pca run
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(run(&["gen-dataset", "--spec", "L=2,band=3pi", "--n", "2", "--rank", "1", "--out", s(&a)]).status.success());
    assert!(run(&["gen-dataset", "--spec", "L=2,band=4pi", "--n", "2", "--rank", "1", "--out", s(&b)]).status.success());
    fs::copy(b.join("sample_0000.bhc"), a.join("zz.bhc")).unwrap();
    assert_eq!(run(&["pca", "--in", s(&a), "--out", s(&dir.path().join("p.pcb"))]).status.code(), Some(3));

    assert_eq!(run(&["gen-dataset", "--spec", "L=1,band=2pi", "--n", "2", "--rank", "99", "--out", s(&a)]).status.code(), Some(3));
}

#[test]
fn pca_variants_and_wrappers() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("ds");
    let o = run(&["gen-dataset", "--spec", "L=3,band=5pi", "--n", "20", "--rank", "3", "--seed", "3", "--out", s(&ds)]);
    assert!(o.status.success());
    let rank: usize = stdout(&o).rsplit('=').next().unwrap().trim().parse().unwrap();

    let plain = dir.path().join("plain.pcb");
    let o3 = dir.path().join("o3.pcb");
    let o = run(&["pca", "--in", s(&ds), "--out", s(&plain), "--gap"]);
    assert!(stdout(&o).contains(&format!("selected d = {rank}")), "{}", stdout(&o));
    assert!(run(&["pca", "--in", s(&ds), "--out", s(&o3), "--gap", "--o3"]).status.success());
    assert_eq!(fs::read(&plain).unwrap(), fs::read(&o3).unwrap());

    let e = dir.path().join("e.pcb");
    assert!(run(&["pca", "--in", s(&ds), "--out", s(&e), "--energy", "0.9"]).status.success());
    assert_eq!(run(&["pca", "--in", s(&ds), "--out", s(&e), "--d", "0"]).status.code(), Some(3));

    let sample = ds.join("sample_0003.bhc");
    let rot = dir.path().join("rot.bhc");
    assert!(run(&["rotate", "--in", s(&sample), "--alpha", "0", "--beta", "0", "--gamma", "0", "--out", s(&rot)]).status.success());
    assert_eq!(fs::read(&rot).unwrap(), fs::read(&sample).unwrap());
    assert!(run(&["rotate", "--in", s(&sample), "--alpha", "0.5", "--beta", "-1.2", "--gamma", "2", "--out", s(&rot)]).status.success());
    assert_ne!(fs::read(&rot).unwrap(), fs::read(&sample).unwrap());

    let csv = dir.path().join("e.csv");
    for kind in ["pca", "bh-abs", "bh-uls"] {
        let o = run(&["energy", "--in", s(&sample), "--basis", kind, "--basis-file", s(&plain), "--out", s(&csv)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let w = io::read_energy_csv(&csv).unwrap();
        assert_eq!(*w.last().unwrap(), 1.0);
    }
    assert_eq!(run(&["energy", "--in", s(&sample), "--basis", "pca", "--out", s(&csv)]).status.code(), Some(3));

    let model = dir.path().join("model.json");
    assert!(run(&["fit-model", "--in", s(&ds), "--basis", s(&plain), "--out", s(&model)]).status.success());
    let a = dir.path().join("a.bhc");
    let b = dir.path().join("b.bhc");
    assert!(run(&["synth", "--model", s(&model), "--seed", "11", "--out", s(&a)]).status.success());
    assert!(run(&["synth", "--model", s(&model), "--seed", "11", "--out", s(&b)]).status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn single_volume_pca() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("ds");
    assert!(run(&["gen-dataset", "--spec", "L=2,band=4pi", "--n", "1", "--rank", "2", "--seed", "9", "--out", s(&ds)]).status.success());
    let p = dir.path().join("b.pcb");
    let o = run(&["pca", "--in", s(&ds), "--out", s(&p), "--energy", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let basis = io::read_basis::<f64>(&p).unwrap().basis;
    assert!(basis.entries().iter().filter(|e| e.l == 0).all(|e| e.eigenvalue == 0.0));
}
