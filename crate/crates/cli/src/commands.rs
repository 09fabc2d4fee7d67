use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use gcos::eval::format_table;
use gcos::{
    annotations_to_roll, degrade, frame_stream, load_annotations, load_audio, normalized,
    resample_if_needed, save_wav_f32, score_splits, snr_sweep, ActivationVariant, DegradeSpec,
    FeatureMode, LayerConfig, NoiseKind, PianoRoll, SalienceExtractor, SplitReports, SweepRow,
    Transcriber,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::args::{required_path, Command, Params};
use crate::failure::Failure;

pub fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Transcribe { audio, params } => transcribe(audio, &params),
        Command::Evaluate {
            pred,
            truth,
            params,
        } => evaluate(&pred, &truth, &params),
        Command::Degrade {
            audio,
            noise,
            params,
        } => degrade_file(audio, noise, &params),
        Command::Sweep {
            corpus,
            levels,
            noise,
            params,
        } => sweep(&corpus, &levels, noise, &params),
        Command::Features {
            audio,
            time,
            params,
        } => features(audio, time, &params),
    }
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn to_json(value: &impl Serialize) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Failure::Internal(e.to_string()))
}

fn transcribe(audio: Option<PathBuf>, params: &Params) -> Result<(), Failure> {
    let cfg = params.resolve()?;
    let audio = required_path(audio, cfg.input.clone(), "input audio path")?;
    let out = required_path(None, cfg.out.clone(), "output path (--out)")?;
    let clip = load_audio(&audio)?;
    let roll = Transcriber::new(cfg.transcribe_config())?.transcribe(&clip)?;
    roll.save(&out)?;
    println!(
        "{}: {} frames, {} active cells ({}) -> {}",
        audio.display(),
        roll.n_frames(),
        roll.active_count(),
        cfg.mode,
        out.display()
    );
    Ok(())
}

fn is_annotation_file(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("txt") || e.eq_ignore_ascii_case("tsv"))
}

fn evaluate(pred_path: &Path, truth_path: &Path, params: &Params) -> Result<(), Failure> {
    let cfg = params.resolve()?;
    let pred = PianoRoll::load(pred_path)?;
    let truth = if is_annotation_file(truth_path) {
        let notes = load_annotations(truth_path)?;
        annotations_to_roll(&notes, pred.frame_times(), (0, 127))
    } else {
        PianoRoll::load(truth_path)?
    };
    let reports = score_splits(&pred, &truth)?;
    let name = pred_path
        .file_stem()
        .map_or_else(|| "prediction".into(), |s| s.to_string_lossy().into_owned());
    let table = format_table(&[(name, reports)]);
    print!("{table}");
    if let Some(out) = &cfg.out {
        let report = json!({
            "prediction": pred_path,
            "truth": truth_path,
            "n_frames": pred.n_frames(),
            "reports": reports,
        });
        write_file(out, to_json(&report)?)?;
        let table_path = out.with_extension("txt");
        if table_path != *out {
            write_file(&table_path, &table)?;
        }
    }
    Ok(())
}

fn degrade_file(
    audio: Option<PathBuf>,
    noise: Option<NoiseKind>,
    params: &Params,
) -> Result<(), Failure> {
    let cfg = params.resolve()?;
    let audio = required_path(audio, cfg.input.clone(), "input audio path")?;
    let out = required_path(None, cfg.out.clone(), "output path (--out)")?;
    let spec = DegradeSpec {
        noise_kind: noise.unwrap_or(cfg.noise),
        snr_db: cfg.snr_db.unwrap_or(f64::INFINITY),
        seed: cfg.seed,
    };
    let clip = load_audio(&audio)?;
    let degraded = degrade(&clip, &spec)?;
    save_wav_f32(&degraded.clip, &out)?;

    let sidecar = if spec.is_clean() {
        json!({
            "input": audio,
            "noise_kind": spec.noise_kind,
            "snr_db": "clean",
            "seed": spec.seed,
        })
    } else {
        json!({
            "input": audio,
            "noise_kind": spec.noise_kind,
            "snr_db": spec.snr_db,
            "seed": spec.seed,
            "measured_snr_db": degraded.measured_snr_db(&clip),
        })
    };
    let sidecar_path = out.with_extension("json");
    write_file(&sidecar_path, to_json(&sidecar)?)?;
    println!(
        "{} -> {} ({})",
        audio.display(),
        out.display(),
        if spec.is_clean() {
            "clean".to_string()
        } else {
            format!("{} noise at {} dB", spec.noise_kind, spec.snr_db)
        }
    );
    Ok(())
}

fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let entries =
        std::fs::read_dir(dir).map_err(|e| Failure::Data(format!("{}: {e}", dir.display())))?;
    let mut wavs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("wav")))
        .collect();
    wavs.sort();
    Ok(wavs)
}

fn snr_label(snr: Option<f64>) -> String {
    snr.map_or_else(|| "clean".into(), |s| s.to_string())
}

fn csv_row(out: &mut String, file: &str, mode: FeatureMode, snr: Option<f64>, r: &SplitReports) {
    let a = &r.all;
    let _ = writeln!(
        out,
        "{file},{mode},{},{:.6},{:.6},{:.6},{},{},{}",
        snr_label(snr),
        a.precision,
        a.recall,
        a.f_score,
        a.n_tp,
        a.n_fp,
        a.n_fn
    );
}

const POOLED: &str = "POOLED";

fn sweep(
    corpus: &Path,
    levels: &[f64],
    noise: Option<NoiseKind>,
    params: &Params,
) -> Result<(), Failure> {
    let cfg = params.resolve()?;
    let out = required_path(None, cfg.out.clone(), "output path (--out)")?;
    let modes = match params.mode {
        Some(m) => vec![m],
        None => vec![FeatureMode::Gcos, FeatureMode::SpectrumBaseline],
    };
    let noise = noise.unwrap_or(cfg.noise);
    let base = cfg.transcribe_config();
    let files = corpus_files(corpus)?;

    let results: Vec<(String, Result<Vec<SweepRow>, String>)> = files
        .par_iter()
        .map(|wav| {
            let name = wav
                .file_name()
                .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            let rows = (|| {
                let clip = load_audio(wav)?;
                let notes = load_annotations(wav.with_extension("txt"))?;
                snr_sweep(&clip, &notes, levels, &modes, &base, noise, cfg.seed)
            })()
            .map_err(|e| e.to_string());
            (name, rows)
        })
        .collect();

    let mut csv = String::from("file,mode,snr_db,precision,recall,f_score,n_tp,n_fp,n_fn\n");
    let mut failures = vec![];
    let mut done: Vec<&Vec<SweepRow>> = vec![];
    for (name, rows) in &results {
        match rows {
            Ok(rows) => {
                for row in rows {
                    csv_row(&mut csv, name, row.mode, row.snr_db, &row.reports);
                }
                done.push(rows);
            }
            Err(message) => {
                eprintln!("failed: {name}: {message}");
                failures.push(name.as_str());
            }
        }
    }
    if let Some(first) = done.first() {
        for (i, row) in first.iter().enumerate() {
            let pooled = SplitReports::pooled(done.iter().map(|rows| &rows[i].reports));
            csv_row(&mut csv, POOLED, row.mode, row.snr_db, &pooled);
        }
    }
    write_file(&out, csv)?;
    println!(
        "{} file(s) swept, {} failed -> {}",
        done.len(),
        failures.len(),
        out.display()
    );
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Data(format!(
            "failed files: {}",
            failures.join(", ")
        )))
    }
}

#[derive(Serialize)]
struct FeatureDump {
    audio: PathBuf,
    time_requested: f64,
    frame_index: usize,
    frame_time: f64,
    sample_rate: u32,
    n_fft: usize,
    gammas: [f64; 3],
    frequency_hz: Vec<f64>,
    quefrency_s: Vec<f64>,
    spectrum: Vec<f64>,
    generalized_cepstrum: Vec<f64>,
    gcos: Vec<f64>,
    acf_of_spectrum: Vec<f64>,
}

fn features(audio: Option<PathBuf>, time: f64, params: &Params) -> Result<(), Failure> {
    let cfg = params.resolve()?;
    let audio = required_path(audio, cfg.input.clone(), "input audio path")?;
    let out = required_path(None, cfg.out.clone(), "output path (--out)")?;
    let rate = cfg.analysis.sample_rate;
    let clip = resample_if_needed(&load_audio(&audio)?, rate)?;
    let frames = frame_stream(&clip, cfg.analysis.window_seconds, cfg.analysis.hop_seconds)?;
    let index = frames.nearest(time).ok_or_else(|| {
        Failure::Data(format!(
            "time {time} s is outside the clip (0 to {:.3} s)",
            clip.duration()
        ))
    })?;
    let frame = frames.frame(index);

    let ex = SalienceExtractor::new(rate, &cfg.analysis, &cfg.layers)?;
    let f = ex.extract_all(&frame.samples)?;
    let acf_layers = LayerConfig {
        variant1: ActivationVariant::Power,
        variant2: ActivationVariant::Power,
        variant3: ActivationVariant::Power,
        ..cfg.layers.with_gammas(2.0, 1.0, 1.0)
    };
    let acf =
        SalienceExtractor::new(rate, &cfg.analysis, &acf_layers)?.extract_all(&frame.samples)?;

    let half = ex.half_len();
    let dump = FeatureDump {
        audio: audio.clone(),
        time_requested: time,
        frame_index: index,
        frame_time: frame.center_time,
        sample_rate: rate,
        n_fft: ex.n_fft(),
        gammas: [cfg.layers.gamma1, cfg.layers.gamma2, cfg.layers.gamma3],
        frequency_hz: (0..half).map(|k| k as f64 * ex.bin_hz()).collect(),
        quefrency_s: (0..half).map(|n| n as f64 / rate as f64).collect(),
        spectrum: normalized(&f.z1.values),
        generalized_cepstrum: normalized(&f.z2.values),
        gcos: normalized(&f.z3.values),
        acf_of_spectrum: normalized(&acf.z3.values),
    };
    write_file(&out, to_json(&dump)?)?;
    println!(
        "{}: frame {index} at {:.3} s -> {}",
        audio.display(),
        frame.center_time,
        out.display()
    );
    Ok(())
}
