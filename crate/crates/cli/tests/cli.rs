use serde_json::Value;
use std::process::{Command, Output};

fn gibbs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gibbs")).args(args).env_remove("GIBBS_PRECISION").output().expect("spawn")
}

fn report(args: &[&str]) -> (Value, i32) {
    let out = gibbs(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)));
    (v, out.status.code().unwrap())
}

#[test]
fn fixed_points_at_chebyshev() {
    let (v, code) = report(&["fixed-points", "--c=-2"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["alpha"][0], -1.0);
    assert_eq!(v["result"]["beta"][0], 2.0);
    assert_eq!(v["config"]["precision_bits"], 256);
    assert_eq!(v["config"]["margins"]["d3"], 1.5);
}

#[test]
fn keys_are_sorted_and_output_is_deterministic() {
    let a = gibbs(&["series-oracle", "--tau", "1", "--lambda", "0.5", "--k-max", "50"]);
    let b = gibbs(&["series-oracle", "--tau", "1", "--lambda", "0.5", "--k-max", "50"]);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let top: Vec<&str> = text.lines().filter(|l| l.starts_with("  \"")).map(|l| l.trim()).collect();
    let mut sorted = top.clone();
    sorted.sort();
    assert_eq!(top, sorted);
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_gibbs"))
        .args(["series-oracle", "--tau", "2", "--lambda", "0", "--k-max", "10"])
        .env("GIBBS_PRECISION", "128")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["precision_bits"], 128);
    assert_eq!(v["result"]["sum"]["plus"]["lo"]["precision_bits"], 128);
    assert_eq!(gibbs(&["--precision", "32", "fixed-points", "--c=0"]).status.code(), Some(1));
}

#[test]
fn series_verify_passes_with_margins() {
    let (v, code) = report(&["series-verify", "--xi=1", "--tau-grid=2,5,10,20,50"]);
    assert_eq!(code, 0);
    assert_eq!(v["pass"], true);
    let checks = v["result"]["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks.iter().filter(|c| c["in_hypothesis"] == true) {
        assert_eq!(c["pass"], true);
        // infinite margins serialize as null
        assert!(c["margin_log2"].as_f64().map_or(true, |m| m >= 0.0));
    }
    assert_eq!(v["result"]["scheme"]["q"], 200);
}

#[test]
fn pressure_on_found_parameter() {
    let (v, code) = report(&["pressure", "--c=found", "--n=8", "--t=4"]);
    assert_eq!(code, 0);
    let b = &v["result"][0];
    let (lo, hi) = (b["p_low"].as_f64().unwrap(), b["p_high"].as_f64().unwrap());
    assert!(hi - lo < 1e-6 && lo < hi);
    assert!(b["enclosure_low"].as_f64().unwrap() <= lo && hi <= b["enclosure_high"].as_f64().unwrap());
    assert_eq!(b["t"], 4.0);
}

#[test]
fn csv_rows_carry_configuration() {
    let out = gibbs(&["--format", "csv", "pressure", "--c=found", "--t=1,2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    assert!(headers.iter().any(|h| h == "config.margins.d3"));
    assert!(headers.iter().any(|h| h == "p_low"));
    assert_eq!(rdr.records().count(), 2);
}

#[test]
fn exit_codes() {
    // confinement fails past k = 10 on this parameter
    let (v, code) = report(&["itinerary", "--c=found", "--n=8", "--k-max=14"]);
    assert_eq!(code, 2);
    assert_eq!(v["pass"], false);
    assert_eq!(gibbs(&["itinerary", "--c=-1.5"]).status.code(), Some(1));
    let out = gibbs(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    assert_eq!(gibbs(&["fixed-points", "--c=0", "--bogus=1"]).status.code(), Some(1));
}

#[test]
fn schedule_end_to_end() {
    let (v, code) = report(&["schedule", "--betas=4,16,64,256,1024,4096,16384", "--a-sup=4", "--a-inf=2", "--len=100"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["predictions_alternate"], true);
    assert_eq!(v["result"]["schedule"]["m"][6], 4096);
    assert_eq!(v["result"]["window"]["check"]["leading_zeros"], true);
}

fn read_ppm(path: &std::path::Path) -> (usize, usize, Vec<u8>) {
    let bytes = std::fs::read(path).unwrap();
    let header: Vec<&[u8]> = bytes.splitn(4, |b| *b == b'\n').collect();
    assert_eq!(header[0], b"P6");
    let dims: Vec<usize> = std::str::from_utf8(header[1]).unwrap().split(' ').map(|x| x.parse().unwrap()).collect();
    assert_eq!(header[2], b"255");
    (dims[0], dims[1], header[3].to_vec())
}

#[test]
fn render_disk_is_flat_inside() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("disk.ppm");
    let p = path.to_str().unwrap();
    let out = gibbs(&["render", "--c=0", "--width=64", "--height=64", "--span=4", "--output", p]);
    assert!(out.status.success());
    let (w, h, rgb) = read_ppm(&path);
    assert_eq!((w, h, rgb.len()), (64, 64, 64 * 64 * 3));
    let mut inside = None;
    let mut seen = 0;
    for j in 0..h {
        for i in 0..w {
            let x = -2.0 + (i as f64 + 0.5) * 4.0 / 64.0;
            let y = 2.0 - (j as f64 + 0.5) * 4.0 / 64.0;
            if x * x + y * y < 1.0 {
                let px = &rgb[3 * (j * w + i)..3 * (j * w + i) + 3];
                assert_eq!(*inside.get_or_insert(px.to_vec()), px);
                seen += 1;
            }
        }
    }
    assert!(seen > 700);
    // byte-identical on a rerun
    let again = dir.path().join("again.ppm");
    gibbs(&["render", "--c=0", "--width=64", "--height=64", "--span=4", "--output", again.to_str().unwrap()]);
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn render_chebyshev_segment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("seg.ppm");
    gibbs(&["render", "--c=-2", "--width=101", "--height=101", "--span=5", "--output", path.to_str().unwrap()]);
    let (w, _, rgb) = read_ppm(&path);
    // the middle row crosses [−2, 2]: its non-escaping pixels span that segment and nothing off the axis does
    let row = 50;
    let inside = |i: usize, j: usize| rgb[3 * (j * w + i)..3 * (j * w + i) + 3] == [20, 20, 40];
    let cols: Vec<usize> = (0..w).filter(|&i| inside(i, row)).collect();
    assert!(!cols.is_empty());
    let x = |i: usize| -2.5 + (i as f64 + 0.5) * 5.0 / 101.0;
    assert!(x(cols[0]) < -1.9 && x(*cols.last().unwrap()) > 1.9);
    assert!((0..w).all(|i| !inside(i, 10)));
}

#[test]
fn rays_one_third_and_two_thirds_meet_at_alpha() {
    let alpha = (1.0 - 5f64.sqrt()) / 2.0;
    for angle in ["1/3", "2/3"] {
        let (v, code) = report(&["ray", "--c=-1", "--angle", angle, "--v-min=1e-9", "--max-steps=5000"]);
        assert_eq!(code, 0);
        let last = v["result"]["vertices"].as_array().unwrap().last().unwrap().clone();
        let (re, im) = (last[0].as_f64().unwrap(), last[1].as_f64().unwrap());
        assert!(((re - alpha).powi(2) + im * im).sqrt() < 5e-3, "{angle}: {re} {im}");
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rays.ppm");
    let (v, code) = report(&["render", "--scene=puzzle", "--c=-1", "--width=60", "--height=60", "--output", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["rays"].as_array().unwrap().len(), 2);
    assert_eq!(v["result"]["equipotential"], 0.5);
}
