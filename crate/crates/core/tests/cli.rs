use std::process::{Command, Output};

use ddcontrol::theory;

fn ddcontrol(args: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddcontrol"))
        .args(args.split_whitespace())
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Data rows below the first line that equals `header`.
fn table<'a>(csv: &'a str, header: &str) -> Vec<Vec<&'a str>> {
    csv.lines()
        .skip_while(|l| *l != header)
        .skip(1)
        .take_while(|l| !l.is_empty() && !l.starts_with('#') && l.chars().next().is_some_and(|c| c.is_ascii_digit() || c == 'l' || c == 'd' || c == 'n'))
        .map(|l| l.split(',').collect())
        .collect()
}

#[test]
fn unaligned_alpha_is_a_usage_error() {
    let o = ddcontrol("dn --nu 1 --alpha 0.3333333333 --N 100");
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("alpha") && err.contains("grid-aligned"), "{err}");
}

#[test]
fn malformed_and_unknown_flags_exit_one() {
    for args in ["dn --nu abc", "dn --frobnicate 2", "theory --method xy", "solve --reg l3"] {
        let o = ddcontrol(args);
        assert_eq!(o.status.code(), Some(1), "{args}");
        assert_eq!(stderr(&o).lines().count(), 1, "{args}: {}", stderr(&o));
    }
    assert_eq!(ddcontrol("--help").status.code(), Some(0));
}

#[test]
fn optimal_theta_is_resolved_and_echoed() {
    let o = ddcontrol("dn --nu 1 --N 99 --m 33 --theta optimal");
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let first = out.lines().next().unwrap();
    let theta: f64 = first.rsplit("theta=").next().unwrap().parse().unwrap();
    assert_eq!(theta, theory::theta_star_dn_1d(1.0, 1.0 / 3.0));
    assert!(out.contains("converged"));
}

#[test]
fn runs_are_byte_identical() {
    for args in [
        "dn --nu 0.1 --N 60 --m 20 --theta 0.4 --trace0 random --seed 7",
        "nn --dim 2 --N 12 --m 4 --theta 0.2 --trace0 random --seed 3",
        "sweep --nu 1e-2,1 --theta 0.2:0.6:0.2 --N 20,40 --alpha 0.25 --jobs 4",
    ] {
        assert_eq!(ddcontrol(args).stdout, ddcontrol(args).stdout, "{args}");
    }
    let serial = ddcontrol("sweep --nu 1e-2,1 --theta 0.2:0.6:0.2 --N 20,40 --alpha 0.25 --jobs 1");
    let parallel = ddcontrol("sweep --nu 1e-2,1 --theta 0.2:0.6:0.2 --N 20,40 --alpha 0.25 --jobs 8");
    assert_eq!(serial.stdout, parallel.stdout);
}

#[test]
fn theory_scan_row_count() {
    let out = stdout(&ddcontrol("theory --method nn --nu 1 --m 33 --N 99 --scan-k 40"));
    let rows = table(&out, "k,rho");
    assert_eq!(rows.len(), 42);
    assert_eq!(rows[41][0], "limit");
    assert!(out.contains("method,nu,alpha,theta_star,sup_rho\nnn,"));
}

#[test]
fn divergent_nn_run_exits_two() {
    let o = ddcontrol("nn --nu 1 --N 99 --m 33 --theta 0.5");
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("diverged"));
}

#[test]
fn figure_one_error_columns() {
    let o = ddcontrol("nn --nu 1 --N 99 --m 33 --theta 0.3,0.5,0.7,optimal --iters 15");
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    let header = out.lines().nth(1).unwrap();
    assert_eq!(header.split(',').count(), 5, "{header}");
    let rows = table(&out, header);
    assert_eq!(rows.len(), 15);
    for col in [2, 3] {
        let v: Vec<f64> = rows.iter().map(|r| r[col].parse().unwrap()).collect();
        assert!(v.windows(2).all(|w| w[1] > w[0]), "column {col} not increasing");
    }
    let dn = ddcontrol("dn --nu 1 --N 99 --m 33 --theta 0.3,0.5,0.7,optimal --iters 15");
    assert_eq!(dn.status.code(), Some(0));
}

#[test]
fn l2_and_energy_controls_differ() {
    let h1 = stdout(&ddcontrol("solve --reg h1 --target bump --N 64"));
    let l2 = stdout(&ddcontrol("solve --reg l2 --target bump --N 64"));
    assert_eq!(h1.lines().count(), 66);
    assert_eq!(l2.lines().count(), 66);
    assert_ne!(h1, l2);
    assert_eq!(ddcontrol("solve --reg l2 --dim 2 --N 8").status.code(), Some(1));
}

#[test]
fn symmetric_sweep_matches_exact_rate() {
    let out = stdout(&ddcontrol("sweep --method dn --nu 1e-4,1,1e4 --theta 0.1:0.9:0.1 --m 50 --N 100"));
    let rows = table(&out, "nu,alpha,theta,method,verdict,measured_rate,predicted_rate");
    assert_eq!(rows.len(), 27);
    for r in rows {
        let theta: f64 = r[2].parse().unwrap();
        let expected = (1.0 - 2.0 * theta).abs();
        if expected < 1e-9 {
            continue;
        }
        let measured: f64 = r[5].parse().unwrap();
        assert!((measured - expected).abs() <= 1e-10, "theta={theta}: {measured}");
    }
}

#[test]
fn unit_relaxation_flips_at_the_centre() {
    let out = stdout(&ddcontrol("sweep --method dn --theta 1 --alpha 0.2:0.8:0.1 --N 30 --iters 200"));
    let rows = table(&out, "nu,alpha,theta,method,verdict,measured_rate,predicted_rate");
    assert_eq!(rows.len(), 7);
    for r in rows {
        let alpha: f64 = r[1].parse().unwrap();
        if alpha < 0.5 - 1e-9 {
            assert_eq!(r[4], "diverged", "alpha={alpha}");
        } else if alpha > 0.5 + 1e-9 {
            assert_eq!(r[4], "converged", "alpha={alpha}");
        }
    }
}

#[test]
fn predicted_rate_is_the_theory_value() {
    let out = stdout(&ddcontrol("sweep --nu 0.01,1 --theta 0.2,0.45 --m 7 --N 21"));
    for r in table(&out, "nu,alpha,theta,method,verdict,measured_rate,predicted_rate") {
        let [nu, alpha, theta]: [f64; 3] = [r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap()];
        let expected = match r[3] {
            "dn" => theory::rho_dn_1d(nu, alpha, theta),
            _ => theory::rho_nn_1d(nu, alpha, theta),
        };
        let predicted: f64 = r[6].parse().unwrap();
        assert!((predicted - expected).abs() <= 1e-14);
    }
}

#[test]
fn empty_theta_range_is_a_usage_error() {
    let o = ddcontrol("sweep --theta 0.9:0.1:0.1");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("theta"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# error run\nnu = 1\nN = 99\nm = 33\ntheta = 0.3\n").unwrap();
    let from_file = stdout(&ddcontrol(&format!("dn --config {}", cfg.display())));
    assert!(from_file.starts_with("# method=dn,nu=1.0000000000000000e0,alpha=3.3333333333333331e-1,N=99,theta=2.9999999999999999e-1"));
    let overridden = stdout(&ddcontrol(&format!("dn --config {} --theta 0.4", cfg.display())));
    assert!(overridden.lines().next().unwrap().ends_with("theta=4.0000000000000002e-1"));

    std::fs::write(&cfg, "nu = 1\nspeed = 3\n").unwrap();
    let o = ddcontrol(&format!("dn --config {}", cfg.display()));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("speed"));
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("y.csv");
    let o = ddcontrol(&format!("solve --field state --target sine --N 10 --out {}", path.display()));
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("x,value\n"));
}

#[test]
fn csv_target_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("target.csv");
    std::fs::write(&target, stdout(&ddcontrol("solve --field state --target bump --N 12 --nu 1e-6"))).unwrap();
    let via_file = stdout(&ddcontrol(&format!("solve --target {} --N 12", target.display())));
    assert_eq!(via_file.lines().count(), 14);
    let bad = ddcontrol(&format!("solve --target {} --N 10", target.display()));
    assert_eq!(bad.status.code(), Some(1));
}
