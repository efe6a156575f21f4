//! End-to-end behavior of the `qpsnet` binary: every subcommand is driven
//! through a real process, and outputs are checked against the library's
//! own results so the CLI glue cannot drift from the engine.

use std::io::Write as _;
use std::process::{Command, Output, Stdio};

use qpsnet::frame_codec::{
    encode, EncodingScheme, FrameHeader, Multiplexing, QduDescriptor, QuantumFrame,
};
use qpsnet::qkd::{qkd_sweep, QkdParams};

fn qpsnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpsnet"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn run_ok(args: &[&str]) -> String {
    let out = qpsnet(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("stdout should be UTF-8")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process should exit normally")
}

fn reference_header() -> QuantumFrame {
    QuantumFrame::Header(FrameHeader {
        dest: "aa:bb:cc:dd:ee:ff".parse().unwrap(),
        src: "11:22:33:44:55:66".parse().unwrap(),
        ttl_secs: 120,
        qdu: QduDescriptor {
            payload_len: 10,
            encoding: EncodingScheme::EprHalf,
            emission_period_ns: 5_000,
            multiplexing: Multiplexing::Tdm,
        },
        guard_time_ns: 500_000,
        elapsed_memory_ns: 1_000,
        max_cutoff_ns: 250_000,
        qec_protocol: 7,
    })
}

#[test]
fn encode_defaults_match_the_library_encoding() {
    let stdout = run_ok(&["frame", "encode"]);
    let expected = hex::encode(encode(&reference_header()).unwrap());
    assert_eq!(stdout.trim(), expected);
}

#[test]
fn encode_decode_round_trip_with_custom_fields() {
    let hex_frame = run_ok(&[
        "frame",
        "encode",
        "--dest",
        "02:00:00:00:00:0a",
        "--src",
        "02:00:00:00:00:0b",
        "--ttl-secs",
        "60",
        "--payload-len",
        "25",
        "--encoding",
        "bb84",
        "--period-ns",
        "800",
        "--multiplexing",
        "wdm",
        "--guard-ns",
        "75000",
        "--elapsed-ns",
        "0",
        "--cutoff-ns",
        "0",
        "--qec",
        "3",
    ]);
    let listing = run_ok(&["frame", "decode", hex_frame.trim()]);
    for line in [
        "role: header",
        "dest: 02:00:00:00:00:0a",
        "src: 02:00:00:00:00:0b",
        "ttl_secs: 60",
        "payload_len: 25",
        "encoding: bb84-polarization",
        "emission_period_ns: 800",
        "multiplexing: wdm",
        "guard_time_ns: 75000",
        "elapsed_memory_ns: 0",
        "max_cutoff_ns: 0",
        "qec_protocol: 3",
        "live: true",
    ] {
        assert!(listing.contains(line), "missing '{line}' in:\n{listing}");
    }
}

#[test]
fn trailer_round_trips() {
    let hex_frame = run_ok(&["frame", "encode", "--trailer"]);
    let listing = run_ok(&["frame", "decode", hex_frame.trim()]);
    assert!(listing.contains("role: trailer"));
    assert!(listing.contains("dest: aa:bb:cc:dd:ee:ff"));
    assert!(!listing.contains("payload_len"));
}

#[test]
fn decode_reads_standard_input_when_no_argument_is_given() {
    let hex_frame = run_ok(&["frame", "encode"]);
    let mut child = Command::new(env!("CARGO_BIN_EXE_qpsnet"))
        .args(["frame", "decode"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(hex_frame.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("role: header"));
}

#[test]
fn decode_truncation_exits_two_and_names_the_offset() {
    let out = qpsnet(&["frame", "decode", "aabbccddeeff11223344556688cc0207"]);
    assert_eq!(exit_code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("offset 14"), "stderr was: {stderr}");
}

#[test]
fn decode_bad_hex_exits_two_with_position() {
    let out = qpsnet(&["frame", "decode", "zz12"]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("position 0"));
}

#[test]
fn invalid_frame_contents_exit_two() {
    let out = qpsnet(&["frame", "encode", "--payload-len", "0"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn unknown_encoding_name_exits_two() {
    let out = qpsnet(&["frame", "encode", "--encoding", "photon"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn qkd_sweep_matches_the_library_row_for_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    run_ok(&["qkd-sweep", "--out", path.to_str().unwrap()]);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("L_km,n,Q,e,K,R"));

    let lengths: Vec<f64> = (0..=40).map(|i| i as f64 * 5.0).collect();
    let rows = qkd_sweep(&QkdParams::default(), &lengths, &[0, 1, 2, 3]).unwrap();
    let mut count = 0;
    for (line, row) in lines.zip(&rows) {
        let expected = format!(
            "{},{},{},{},{},{}",
            row.length_km, row.switch_count, row.gain, row.qber, row.routing_factor, row.key_rate
        );
        assert_eq!(line, expected);
        count += 1;
    }
    assert_eq!(count, 164);
}

#[test]
fn sweeps_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    for path in [&first, &second] {
        run_ok(&[
            "entdist",
            "--sweep",
            "length-hops",
            "--lengths",
            "0,40,80",
            "--hops",
            "0,2",
            "--qubits",
            "2",
            "--out",
            path.to_str().unwrap(),
        ]);
    }
    let a = std::fs::read(&first).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, std::fs::read(&second).unwrap());
}

#[test]
fn mc_k_depends_only_on_the_seed() {
    let args = &["mc-k", "--trials", "20000", "--seed", "7"];
    let first = run_ok(args);
    let second = run_ok(args);
    assert_eq!(first, second);
    assert!(first.contains("analytic_k = 0.245\n"));
    assert!(first.contains("seed = 7"));
    let other = run_ok(&["mc-k", "--trials", "20000", "--seed", "8"]);
    assert_ne!(first, other);
}

#[test]
fn compare_prints_crossings_and_writes_both_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cmp.csv");
    let stdout = run_ok(&[
        "entdist",
        "--sweep",
        "compare",
        "--qubits",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    let central: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("central_crossing_km = "))
        .expect("central crossing line")
        .parse()
        .unwrap();
    let sender: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("sender_crossing_km = "))
        .expect("sender crossing line")
        .parse()
        .unwrap();
    assert!((central - 34.6919).abs() < 1e-3);
    assert!((sender - 23.8830).abs() < 1e-3);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("scenario,total_length_km,hops,T1_ns,T2_ns,proc_ns,pair_index,fidelity\n"));
    assert!(text.contains("\ncentral,"));
    assert!(text.contains("\nsender,"));
}

#[test]
fn noise_off_delivers_unit_fidelity_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("off.csv");
    run_ok(&[
        "entdist",
        "--sweep",
        "length-hops",
        "--noise",
        "off",
        "--lengths",
        "0,50,100",
        "--hops",
        "0,3",
        "--qubits",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&path).unwrap();
    let data_lines: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(data_lines.len(), 6);
    for line in data_lines {
        assert!(line.ends_with(",1"), "expected unit fidelity in: {line}");
        assert!(line.contains(",inf,inf,"));
    }
}

#[test]
fn config_values_apply_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("params.toml");
    std::fs::write(&config_path, "[qkd]\nattenuation_db_per_km = 0.5\n").unwrap();
    let config = config_path.to_str().unwrap();

    let from_config = dir.path().join("c.csv");
    run_ok(&[
        "qkd-sweep",
        "--config",
        config,
        "--lengths",
        "10",
        "--switches",
        "0",
        "--out",
        from_config.to_str().unwrap(),
    ]);
    let overridden = dir.path().join("o.csv");
    run_ok(&[
        "qkd-sweep",
        "--config",
        config,
        "--attenuation",
        "0.2",
        "--lengths",
        "10",
        "--switches",
        "0",
        "--out",
        overridden.to_str().unwrap(),
    ]);
    let plain = dir.path().join("p.csv");
    run_ok(&[
        "qkd-sweep",
        "--lengths",
        "10",
        "--switches",
        "0",
        "--out",
        plain.to_str().unwrap(),
    ]);

    let from_config = std::fs::read(&from_config).unwrap();
    let overridden = std::fs::read(&overridden).unwrap();
    let plain = std::fs::read(&plain).unwrap();
    assert_ne!(from_config, plain, "config attenuation must change the sweep");
    assert_eq!(overridden, plain, "the flag must beat the config file");
}

#[test]
fn config_seed_feeds_mc_k_and_the_flag_beats_it() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("seed.toml");
    std::fs::write(&config_path, "seed = 5\n").unwrap();
    let config = config_path.to_str().unwrap();

    let from_config = run_ok(&["mc-k", "--config", config, "--trials", "1000"]);
    assert!(from_config.contains("seed = 5"));
    let from_flag = run_ok(&["mc-k", "--config", config, "--seed", "9", "--trials", "1000"]);
    assert!(from_flag.contains("seed = 9"));
}

#[test]
fn config_typos_exit_two_and_missing_files_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "attenuatoin = 0.5\n").unwrap();
    let out = qpsnet(&["mc-k", "--config", bad.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);

    let missing = dir.path().join("missing.toml");
    let out = qpsnet(&["mc-k", "--config", missing.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(exit_code(&qpsnet(&["qkd-sweep"])), 2);
    assert_eq!(exit_code(&qpsnet(&["no-such-command"])), 2);
    let out = qpsnet(&[
        "entdist",
        "--sweep",
        "compare",
        "--hops",
        "1,2",
        "--out",
        "/tmp/unused.csv",
    ]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn out_of_domain_parameters_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    let out = qpsnet(&[
        "qkd-sweep",
        "--availability",
        "1.5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    let out = qpsnet(&[
        "entdist",
        "--sweep",
        "length-hops",
        "--t2-ns",
        "2e6",
        "--t1-ns",
        "5e5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
}
