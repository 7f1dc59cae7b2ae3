use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use aes_eqclass::aes;
use aes_eqclass::class_algebra::{trace_full, trace_linearized};
use aes_eqclass::keyschedule_classes::audit_schedule_classes;
use aes_eqclass::sbox_distribution::{
    compute_counts_fast, counts_stats, expected_row_sum, naive_partial, transpose_check,
    CountsMatrix, Sbox,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cli::{create, Format, Mode, RunConfig};
use crate::formats::{write_counts_csv, write_counts_json, AuditJson, AuditReportJson, StatsJson};
use crate::hexblock::{format_block, parse_block};
use crate::suite::{run_suite, StepMatrices, SuiteOptions};
use crate::CliError;

pub fn verify_properties(cfg: &RunConfig, corrupt_matrix: bool) -> Result<bool, CliError> {
    if cfg.format == Some(Format::Csv) {
        return Err(CliError::Usage("verify-properties writes JSON only".into()));
    }
    if cfg.trials == 0 {
        eprintln!("warning: --trials 0, randomized properties pass vacuously");
    }
    let matrices = if corrupt_matrix {
        StepMatrices::corrupted()
    } else {
        StepMatrices::standard()
    };
    let (report, failure) = run_suite(&SuiteOptions {
        seed: cfg.seed,
        trials: cfg.trials,
        matrices,
    });
    if let Some(c) = &failure {
        eprintln!("{c}");
    }
    cfg.with_output(|w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        writeln!(w)?;
        Ok(())
    })?;
    Ok(report.pass)
}

/// The four published counts, checked against `P_counts`.
pub const HEADLINES: [(&str, u64); 4] = [
    ("P_counts[0][0]", 198_136),
    ("max over rows 1..255", 68_392),
    ("min of row 0", 65_016),
    ("min over rows 1..255", 64_128),
];

/// Exhaustive count with one partial per first-byte value, merged by addition.
pub fn naive_counts_parallel(pool: &rayon::ThreadPool, sbox: &Sbox) -> CountsMatrix {
    pool.install(|| {
        (0..sbox.size())
            .into_par_iter()
            .map(|x1| naive_partial(sbox, x1))
            .reduce(
                || CountsMatrix::zeros(sbox.size()),
                |mut a, b| {
                    a.merge(&b).expect("same dimension");
                    a
                },
            )
    })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn write_matrix(
    dir: &Path,
    stem: &str,
    m: &CountsMatrix,
    format: Format,
    header: bool,
) -> Result<(), CliError> {
    let path = dir.join(match format {
        Format::Csv => format!("{stem}.csv"),
        Format::Json => format!("{stem}.json"),
    });
    let mut w = BufWriter::new(create(&path)?);
    match format {
        Format::Csv => write_counts_csv(&mut w, m, header).map_err(|e| CliError::io(&path, e))?,
        Format::Json => write_counts_json(&mut w, m)?,
    }
    w.flush().map_err(|e| CliError::io(&path, e))
}

fn write_json(path: PathBuf, value: &impl Serialize) -> Result<(), CliError> {
    let mut w = BufWriter::new(create(&path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).map_err(|e| CliError::io(&path, e))?;
    w.flush().map_err(|e| CliError::io(&path, e))
}

#[derive(Serialize)]
struct Equivalence {
    p_counts: bool,
    invp_counts: bool,
    pass: bool,
}

pub fn sbox_dist(cfg: &RunConfig, mode: Mode, csv_header: bool) -> Result<bool, CliError> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let format = cfg.format.unwrap_or(Format::Csv);
    let forward = Sbox::aes();
    let inverse = Sbox::aes_inverse();

    let fast = match mode {
        Mode::Fast | Mode::Both => {
            let start = Instant::now();
            let pair = (
                compute_counts_fast(&forward)?,
                compute_counts_fast(&inverse)?,
            );
            eprintln!("fast path: {:.3?}", start.elapsed());
            Some(pair)
        }
        Mode::Naive => None,
    };
    let naive = match mode {
        Mode::Naive | Mode::Both => {
            let pool = cfg.thread_pool()?;
            let start = Instant::now();
            let pair = (
                naive_counts_parallel(&pool, &forward),
                naive_counts_parallel(&pool, &inverse),
            );
            eprintln!(
                "naive path: {:.3?} on {} thread(s)",
                start.elapsed(),
                pool.current_num_threads()
            );
            Some(pair)
        }
        Mode::Fast => None,
    };

    let equivalence = match (&fast, &naive) {
        (Some(f), Some(n)) => {
            let p = f.0.first_difference(&n.0).is_none();
            let inv = f.1.first_difference(&n.1).is_none();
            Some(Equivalence {
                p_counts: p,
                invp_counts: inv,
                pass: p && inv,
            })
        }
        _ => None,
    };
    let (p, invp) = fast.or(naive).expect("at least one path ran");

    let p_stats = counts_stats(&p);
    let invp_stats = counts_stats(&invp);
    write_matrix(&dir, "p_counts", &p, format, csv_header)?;
    write_matrix(&dir, "invp_counts", &invp, format, csv_header)?;
    write_json(dir.join("p_counts_stats.json"), &StatsJson::from(&p_stats))?;
    write_json(
        dir.join("invp_counts_stats.json"),
        &StatsJson::from(&invp_stats),
    )?;
    if let Some(eq) = &equivalence {
        write_json(dir.join("equivalence.json"), eq)?;
    }

    let h = p_stats.headline();
    let observed = [h.row0_max, h.other_max, h.row0_min, h.other_min];
    let mut all = h.row0_argmax == 0;
    let mut lines = vec![format!("mode: {}", format!("{mode:?}").to_lowercase())];
    for ((label, want), got) in HEADLINES.iter().zip(observed) {
        all &= got == *want;
        lines.push(format!(
            "{label} = {got} (expected {want}): {}",
            verdict(got == *want)
        ));
    }
    let rows_ok = p.check_row_sums(expected_row_sum(&forward)).is_ok()
        && invp.check_row_sums(expected_row_sum(&inverse)).is_ok()
        && p.total() == 1 << 32
        && invp.total() == 1 << 32;
    all &= rows_ok;
    lines.push(format!("row sums 2^24, total 2^32: {}", verdict(rows_ok)));
    let transposed = transpose_check(&p, &invp);
    all &= transposed;
    lines.push(format!(
        "P_counts == InvP_counts^T: {}",
        verdict(transposed)
    ));
    lines.push(format!("P_counts symmetric: {}", p.is_symmetric()));
    if let Some(eq) = &equivalence {
        all &= eq.pass;
        lines.push(format!("oracle equivalence: {}", verdict(eq.pass)));
    }
    let mut stdout = std::io::stdout().lock();
    for line in lines {
        writeln!(stdout, "{line}")?;
    }
    Ok(all)
}

#[derive(Serialize)]
struct FullRow {
    round: usize,
    stage: &'static str,
    phase: usize,
    class: String,
    state: String,
}

#[derive(Serialize)]
struct LinearRow {
    round: usize,
    stage: &'static str,
    phase: usize,
    class: String,
    predicted: String,
    #[serde(rename = "match")]
    matches: bool,
}

fn write_table(
    w: &mut dyn Write,
    format: Option<Format>,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<(), CliError> {
    match format {
        Some(Format::Csv) => {
            writeln!(w, "{}", header.join(","))?;
            for r in rows {
                writeln!(w, "{}", r.join(","))?;
            }
        }
        _ => {
            let widths: Vec<usize> = (0..header.len())
                .map(|i| {
                    rows.iter()
                        .map(|r| r[i].len())
                        .chain([header[i].len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |cells: Vec<&str>| {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect();
                padded.join("  ").trim_end().to_owned()
            };
            writeln!(w, "{}", line(header.to_vec()))?;
            for r in rows {
                writeln!(w, "{}", line(r.iter().map(String::as_str).collect()))?;
            }
        }
    }
    Ok(())
}

pub fn trace(
    cfg: &RunConfig,
    key: &str,
    plaintext: &str,
    linearized: bool,
    rounds: usize,
) -> Result<bool, CliError> {
    let key = parse_block(key)?;
    let p = parse_block(plaintext)?;
    if linearized {
        let trace = trace_linearized(&p, &key, rounds)
            .map_err(|e| CliError::Usage(format!("--rounds: {e}")))?;
        let rows: Vec<LinearRow> = trace
            .iter()
            .map(|r| LinearRow {
                round: r.round,
                stage: if r.round == aes::ROUNDS {
                    "shift_rows"
                } else {
                    "mix_columns"
                },
                phase: r.phase.get(),
                class: r.observed.to_string(),
                predicted: r.predicted.to_string(),
                matches: r.matches(),
            })
            .collect();
        let pass = rows.iter().all(|r| r.matches);
        cfg.with_output(|w| {
            if cfg.format == Some(Format::Json) {
                serde_json::to_writer_pretty(&mut *w, &rows)?;
                writeln!(w)?;
                return Ok(());
            }
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.round.to_string(),
                        r.stage.to_owned(),
                        r.phase.to_string(),
                        r.class.clone(),
                        r.predicted.clone(),
                        if r.matches { "yes" } else { "NO" }.to_owned(),
                    ]
                })
                .collect();
            write_table(
                w,
                cfg.format,
                &["round", "stage", "phase", "class", "predicted", "match"],
                &table,
            )
        })?;
        Ok(pass)
    } else {
        let rows: Vec<FullRow> = trace_full(&p, &key)
            .iter()
            .map(|e| FullRow {
                round: e.round,
                stage: e.stage.label(),
                phase: e.phase.get(),
                class: e.class.to_string(),
                state: format_block(e.state.as_block()),
            })
            .collect();
        cfg.with_output(|w| {
            if cfg.format == Some(Format::Json) {
                serde_json::to_writer_pretty(&mut *w, &rows)?;
                writeln!(w)?;
                return Ok(());
            }
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.round.to_string(),
                        r.stage.to_owned(),
                        r.phase.to_string(),
                        r.class.clone(),
                        r.state.clone(),
                    ]
                })
                .collect();
            write_table(
                w,
                cfg.format,
                &["round", "stage", "phase", "class", "state"],
                &table,
            )
        })?;
        Ok(true)
    }
}

pub fn keysched(cfg: &RunConfig, key: Option<&str>, random: Option<u64>) -> Result<bool, CliError> {
    if cfg.format == Some(Format::Csv) {
        return Err(CliError::Usage("keysched writes JSON only".into()));
    }
    let mut keys = Vec::new();
    if let Some(k) = key {
        keys.push(parse_block(k)?);
    }
    if let Some(n) = random {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        keys.extend((0..n).map(|_| rng.gen::<[u8; 16]>()));
    }
    if keys.is_empty() {
        return Err(CliError::Usage(
            "keysched needs --key and/or --random".into(),
        ));
    }
    let audits: Vec<AuditJson> = keys
        .iter()
        .map(|k| AuditJson::from(&audit_schedule_classes(k)))
        .collect();
    let all_pass = audits.iter().all(|a| a.pass);
    let report = AuditReportJson { audits, all_pass };
    cfg.with_output(|w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        writeln!(w)?;
        Ok(())
    })?;
    Ok(all_pass)
}

pub fn encrypt(cfg: &RunConfig, key: &str, block: &str, forward: bool) -> Result<bool, CliError> {
    let key = parse_block(key)?;
    let block = parse_block(block)?;
    let out = if forward {
        aes::encrypt_block(&block, &key)
    } else {
        aes::decrypt_block(&block, &key)
    };
    cfg.with_output(|w| {
        writeln!(w, "{}", format_block(&out))?;
        Ok(())
    })?;
    Ok(true)
}
