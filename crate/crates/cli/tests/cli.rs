use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_supercoeff"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn example(dir: &Path, name: &str) -> PathBuf {
    let path = dir.join(format!("{name}.toml"));
    let o = run(&["examples", name, "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    path
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// Data rows of a versioned CSV as (header, rows).
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn lists_examples() {
    let o = run(&["examples"]);
    assert!(o.status.success());
    let names = stdout(&o);
    for n in ["kerr-cat-configA", "kerr-cat-configD", "beam-splitter", "sweep-kerr-cat"] {
        assert!(names.lines().any(|l| l == n), "{n}");
    }
}

#[test]
fn unknown_example_exits_one() {
    let o = run(&["examples", "nope"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("kerr-cat-configA"));
}

#[test]
fn kerr_cat_reference_designs() {
    let dir = TempDir::new().unwrap();
    for (name, omega0, kerr) in [("A", 5.6, 6.76), ("B", 5.2, -2.58), ("C", 5.9, 1.15), ("D", 6.3, 0.72)] {
        let cfg = example(dir.path(), &format!("kerr-cat-config{name}"));
        let o = run(&["kerrcat", "-c", cfg.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        let text = stdout(&o);
        assert!(text.starts_with("# supercoeff kerrcat v1\r\n"));
        let (h, rows) = table(&text);
        let w: f64 = rows[0][column(&h, "omega0_GHz")].parse().unwrap();
        let k: f64 = rows[0][column(&h, "K_MHz")].parse().unwrap();
        assert!((w / omega0 - 1.0).abs() < 0.03, "{name}: {w}");
        assert!((k / kerr - 1.0).abs() < 0.10, "{name}: {k}");
    }
}

#[test]
fn json_output_reproduces_itself() {
    let dir = TempDir::new().unwrap();
    let cfg = example(dir.path(), "kerr-cat-configB");
    let edited = std::fs::read_to_string(&cfg).unwrap().replace("pi_tilde = 0.0", "pi_tilde = 0.7");
    let cfg = write(dir.path(), "b.toml", &edited);
    let first = dir.path().join("first.json");
    let second = dir.path().join("second.json");
    let a = run(&["kerrcat", "-c", cfg.to_str().unwrap(), "--json", first.to_str().unwrap()]);
    assert!(a.status.success(), "{}", stderr(&a));
    let b = run(&["kerrcat", "-c", first.to_str().unwrap(), "--json", second.to_str().unwrap()]);
    assert!(b.status.success(), "{}", stderr(&b));
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    assert_eq!(a.stdout, b.stdout);
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&first).unwrap()).unwrap();
    assert!(doc["result"]["eps2_MHz"].as_f64().unwrap() > 0.0);
    assert!(doc["result"]["cat_size"].as_f64().unwrap() > 0.0);
}

#[test]
fn sweep_csv_is_byte_identical_across_runs_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = example(dir.path(), "sweep-kerr-cat");
    let out = |threads: Option<&str>| {
        let mut c = bin();
        c.args(["sweep", "-c", cfg.to_str().unwrap()]);
        if let Some(t) = threads {
            c.env("SUPERCOEFF_THREADS", t);
        }
        let o = c.output().unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        o.stdout
    };
    let a = out(None);
    assert_eq!(a, out(None));
    assert_eq!(a, out(Some("1")));
    let text = String::from_utf8(a).unwrap();
    let (h, rows) = table(&text);
    assert_eq!(rows.len(), 44 * 3);
    assert_eq!(&h[..3], ["index", "phi_e_flux", "x_J"]);
}

#[test]
fn bad_thread_count_is_rejected() {
    let o = bin().args(["examples"]).env("SUPERCOEFF_THREADS", "many").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_without_feasible_point_exits_one() {
    let dir = TempDir::new().unwrap();
    let cfg = example(dir.path(), "sweep-kerr-cat");
    let text = std::fs::read_to_string(&cfg).unwrap();
    let text = text.replace("min = 1.0", "min = 1000.0");
    let cfg = write(dir.path(), "strict.toml", &text);
    let json = dir.path().join("s.json");
    let o = run(&["sweep", "-c", cfg.to_str().unwrap(), "--json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&json).unwrap()).unwrap();
    assert!(doc["result"]["best"].is_null());
}

#[test]
fn unknown_key_is_reported_with_location() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "bad.toml",
        "[circuit]\nkind = \"transmon\"\nEJ_GHz = 20.0\nEC_GHz = 0.2\nEJ_Ghz = 1.0\n\n[drive]\nkind = \"capacitive\"\npi_tilde = 0.1\n",
    );
    let o = run(&["kerrcat", "-c", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("EJ_Ghz") && err.contains("line 5"), "{err}");
}

#[test]
fn keys_of_another_circuit_kind_are_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "bad.toml",
        "[circuit]\nkind = \"snail\"\nM = 1\nN = 3\nalpha = 0.29\nEJ_GHz = 60.0\nphi_e_flux = 0.4\nx_J = 10.0\nEC_GHz = 0.2\n",
    );
    let o = run(&["sc", "-c", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("x_J"), "{}", stderr(&o));
}

#[test]
fn missing_physical_quantity_is_an_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "bad.toml", "[circuit]\nkind = \"transmon\"\nEJ_GHz = 20.0\n");
    let o = run(&["sc", "-c", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("charging energy"));
}

#[test]
fn sc_table_layout() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "t.toml",
        "[circuit]\nkind = \"snail\"\nM = 1\nN = 3\nalpha = 0.29\nEJ_GHz = 60.0\nphi_e_flux = 0.4\nEC_GHz = 0.2\n\n[drive]\nkind = \"capacitive\"\npi_tilde = 0.5\n",
    );
    let csv_path = dir.path().join("sc.csv");
    let o = run(&["sc", "-c", cfg.to_str().unwrap(), "--nmax", "4", "--pmax", "2", "--csv", csv_path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = table(&std::fs::read_to_string(csv_path).unwrap());
    assert_eq!(h, ["n", "l", "p", "value_GHz", "engine", "convergence"]);
    // (n, l) with 2n + l <= 4: 9 pairs, times p = 0, 1, 2
    assert_eq!(rows.len(), 27);
    assert!(rows.iter().all(|r| r[4] == "closed"));
    let digits = rows[2][3].trim_start_matches('-').replace('.', "");
    let digits = digits.split('e').next().unwrap().trim_start_matches('0');
    assert_eq!(digits.len(), 12, "{}", rows[2][3]);
}

#[test]
fn series_override_from_the_command_line() {
    let dir = TempDir::new().unwrap();
    let cfg = example(dir.path(), "kerr-cat-configA");
    let a = run(&["sc", "-c", cfg.to_str().unwrap(), "--s-max", "5"]);
    let b = run(&["sc", "-c", cfg.to_str().unwrap(), "--s-max", "13"]);
    assert!(a.status.success() && b.status.success());
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn beam_splitter_example_runs() {
    let dir = TempDir::new().unwrap();
    let cfg = example(dir.path(), "beam-splitter");
    let o = run(&["beamsplitter", "-c", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = table(&stdout(&o));
    let g: f64 = rows[0][column(&h, "g_BS_MHz")].parse().unwrap();
    let chi: f64 = rows[0][column(&h, "chi_bc_Hz")].parse().unwrap();
    assert!(g > 0.0 && chi.abs() > 30.0);
}

#[test]
fn eigen_table_for_a_transmon() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "e.toml",
        "[circuit]\nkind = \"transmon\"\nEJ_GHz = 20.0\nEC_GHz = 0.25\n\n[eigen]\nbasis = \"charge\"\nstates = 3\np_max = 1\n",
    );
    let o = run(&["eigen", "-c", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = table(&stdout(&o));
    assert_eq!(h, ["j", "k", "p", "value_GHz", "value_imag_GHz"]);
    assert_eq!(rows.len(), 3 * 3 * 2);
}

#[test]
fn grid_basis_rejects_charge_offset() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "e.toml",
        "[circuit]\nkind = \"transmon\"\nEJ_GHz = 20.0\nEC_GHz = 0.25\n\n[eigen]\nbasis = \"grid\"\nn_g = 0.3\n",
    );
    assert_eq!(run(&["eigen", "-c", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn verify_quick_passes() {
    let o = run(&["verify", "--suite", "quick"]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("PASS") && !stdout(&o).contains("FAIL"));
}

#[test]
fn verify_exits_two_on_mismatch() {
    let dir = TempDir::new().unwrap();
    // an oracle truncated far below the coefficient order cannot match
    let cfg = write(
        dir.path(),
        "v.toml",
        "[circuit]\nkind = \"transmon\"\nEJ_GHz = 20.0\nEC_GHz = 2.0\n\n[drive]\nkind = \"capacitive\"\npi_tilde = 1.5\n\n[numerics]\noracle_dim = 8\n",
    );
    let o = run(&["verify", "-c", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
