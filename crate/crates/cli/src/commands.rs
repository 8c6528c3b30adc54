use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use fbod::io::{load_csv, load_frames, read_labels, write_atomically, write_csv, write_frames, write_scores};
use fbod::io::{CsvSchema, LabelColumn};
use fbod::synth::{make_clusters, make_frames, ClusterSpec, FrameSpec, Patch};
use fbod::{detect, evaluate, rank_auc, Dataset64, EvalReport, FbodParams64, Normalization, ScoreReport64};

use crate::args::*;

fn load(args: &InputArgs) -> Result<Dataset64> {
    let path = &args.input;
    let mut data = if path.is_dir() {
        let frames = load_frames(path)?;
        let mut data: Dataset64 = frames.to_dataset()?;
        let sidecar = path.join("labels.txt");
        if args.labels.is_none() && sidecar.is_file() {
            data = data.with_labels(read_labels(&sidecar)?)?;
        }
        data
    } else {
        let schema = CsvSchema {
            has_header: !args.no_header,
            label_column: args.label_column.as_deref().map(|c| match c.parse() {
                Ok(i) => LabelColumn::Index(i),
                Err(_) => LabelColumn::Name(c.to_string()),
            }),
            delimiter: args.delimiter,
        };
        load_csv(path, &schema)?
    };
    if let Some(labels) = &args.labels {
        data = data.with_labels(read_labels(labels)?)?;
    }
    Ok(data)
}

fn params(model: &ModelArgs, k: usize, graphs: usize, top_p: usize, seed: u64) -> FbodParams64 {
    let normalize = match model.normalize {
        NormalizeArg::None => Normalization::None,
        NormalizeArg::Minmax => Normalization::MinMax,
    };
    FbodParams64::new(k, graphs, top_p, seed)
        .with_normalization(normalize)
        .with_guard(model.guard)
}

fn resolve_top_p(top_p: Option<usize>, data: &Dataset64) -> Result<usize> {
    match top_p.or(data.outlier_count()) {
        Some(p) => Ok(p),
        None => bail!("--top-p is required when the input has no labels"),
    }
}

fn labels(data: &Dataset64) -> Result<&[bool]> {
    data.labels()
        .context("the input has no labels; pass --labels or --label-column")
}

fn timed_detect(data: &Dataset64, params: &FbodParams64) -> Result<(ScoreReport64, f64)> {
    let start = Instant::now();
    let report = detect(data, params)?;
    Ok((report, start.elapsed().as_secs_f64() * 1e3))
}

/// Writes `text` to `path` atomically, or prints it when no path is given.
fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => write_atomically(p, |out| out.write_all(text.as_bytes()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn join(values: &[usize]) -> String {
    values.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

pub fn run_detect(args: &DetectArgs) -> Result<()> {
    let data = load(&args.input)?;
    let top_p = resolve_top_p(args.top_p, &data)?;
    let params = params(&args.model, args.model.k, args.model.graphs, top_p, args.model.seed);
    let (report, ms) = timed_detect(&data, &params)?;
    if let Some(out) = &args.output {
        write_scores(&report, out)?;
    }
    println!("n={}", data.len());
    println!("dim={}", data.dim());
    println!("time_ms={ms:.3}");
    println!("top={}", join(report.top()));
    Ok(())
}

fn report_lines(r: &EvalReport, ms: f64) -> String {
    let c = r.counts;
    format!(
        "auc={}\nacc={}\ndr={}\nfar={}\ntp={}\ntn={}\nfp={}\nfn={}\ntime_ms={ms:.3}\n",
        r.auc, r.acc, r.dr, r.far, c.tp, c.tn, c.fp, c.fn_
    )
}

pub fn run_eval(args: &EvalArgs) -> Result<()> {
    let data = load(&args.input)?;
    let labels = labels(&data)?;
    let top_p = resolve_top_p(args.top_p, &data)?;
    let params = params(&args.model, args.model.k, args.model.graphs, top_p, args.model.seed);
    let (report, ms) = timed_detect(&data, &params)?;
    let metrics = evaluate(report.outlier_factors(), report.predicted(), labels)?;
    let lines = report_lines(&metrics, ms);
    if let Some(out) = &args.output {
        write_scores(&report, out)?;
    }
    if let Some(path) = &args.report {
        emit(&lines, Some(path))?;
    }
    if let Some(path) = &args.csv {
        let c = metrics.counts;
        let csv = format!(
            "auc,acc,dr,far,tp,tn,fp,fn,time_ms\n{},{},{},{},{},{},{},{},{ms:.3}\n",
            metrics.auc, metrics.acc, metrics.dr, metrics.far, c.tp, c.tn, c.fp, c.fn_
        );
        emit(&csv, Some(path))?;
    }
    print!("{lines}");
    Ok(())
}

pub fn run_sweep(args: &SweepArgs) -> Result<()> {
    let data = load(&args.input)?;
    let labels = labels(&data)?;
    let top_p = resolve_top_p(args.top_p, &data)?;
    let ks: Vec<usize> = args
        .k_range
        .unwrap_or(StepRange::single(args.model.k))
        .values()
        .collect();
    let ts: Vec<usize> = args
        .t_range
        .unwrap_or(StepRange::single(args.model.graphs))
        .values()
        .collect();
    let n = data.len();
    if let Some(&k) = ks.iter().find(|&&k| k == 0 || k >= n) {
        bail!("k = {k} is out of range: need 1 <= k <= n - 1 = {}", n - 1);
    }
    if ts.contains(&0) {
        bail!("graph counts must be at least 1");
    }
    let mut csv = String::from("k,T,auc,time_ms\n");
    let grid = ks.iter().flat_map(|&k| ts.iter().map(move |&t| (k, t)));
    for (index, (k, t)) in grid.enumerate() {
        let seed = args.model.seed.wrapping_add(index as u64);
        let (report, ms) = timed_detect(&data, &params(&args.model, k, t, top_p, seed))?;
        let auc = rank_auc(report.outlier_factors(), labels)?;
        writeln!(csv, "{k},{t},{auc},{ms:.3}")?;
    }
    emit(&csv, args.output.as_deref())
}

/// Seeded benchmark data: one Gaussian cluster with 1% planted outliers.
pub fn bench_dataset(n: usize, dim: usize, seed: u64) -> Result<Dataset64> {
    let n_outliers = if n >= 4 { (n / 100).max(1) } else { 0 };
    let spec = ClusterSpec {
        n_normal: n - n_outliers,
        n_outliers,
        center: vec![100.0; dim],
        spread: 2.0,
        outlier_offset: 10.0,
        seed,
    };
    Ok(make_clusters(&spec)?)
}

fn median(mut samples: Vec<f64>) -> f64 {
    samples.sort_by(f64::total_cmp);
    let mid = samples.len() / 2;
    if samples.len().is_multiple_of(2) {
        (samples[mid - 1] + samples[mid]) / 2.0
    } else {
        samples[mid]
    }
}

pub fn run_bench(args: &BenchArgs) -> Result<()> {
    ensure!(
        args.sizes.windows(2).all(|w| w[0] < w[1]),
        "--sizes must be strictly increasing"
    );
    for &n in &args.sizes {
        ensure!(
            n >= 2 && args.k < n,
            "size {n} is out of range for k = {}: need 1 <= k <= n - 1",
            args.k
        );
    }
    let data: Vec<Dataset64> = args
        .sizes
        .iter()
        .map(|&n| bench_dataset(n, args.dim, args.seed))
        .collect::<Result<_>>()?;
    let params = FbodParams64::new(args.k, args.graphs, 0, args.seed);
    // one untimed pass warms caches and the thread pool; sizes are then
    // interleaved so drift hits every size alike
    for d in &data {
        detect(d, &params)?;
    }
    let mut samples = vec![Vec::new(); data.len()];
    for _ in 0..args.reps {
        for (d, s) in data.iter().zip(&mut samples) {
            s.push(timed_detect(d, &params)?.1);
        }
    }
    let mut csv = String::from("n,time_ms\n");
    for (n, s) in args.sizes.iter().zip(samples) {
        writeln!(csv, "{n},{:.3}", median(s))?;
    }
    emit(&csv, args.output.as_deref())
}

pub fn run_synth(command: &SynthCommand) -> Result<()> {
    match command {
        SynthCommand::Clusters(a) => {
            let spec = ClusterSpec {
                n_normal: a.n_normal,
                n_outliers: a.n_outliers,
                center: vec![a.center; a.dims],
                spread: a.spread,
                outlier_offset: a.offset,
                seed: a.seed,
            };
            let data: Dataset64 = make_clusters(&spec)?;
            write_csv(&data, &a.output)?;
            println!("wrote {} objects to {}", data.len(), a.output.display());
        }
        SynthCommand::Frames(a) => {
            let [x, y, width, height] = a.patch;
            let spec = FrameSpec {
                width: a.width,
                height: a.height,
                n_normal: a.n_normal,
                n_anomalous: a.n_anomalous,
                noise_amplitude: a.noise,
                patch: Patch {
                    x,
                    y,
                    width,
                    height,
                    delta: a.delta,
                },
                seed: a.seed,
            };
            let frames = make_frames(&spec)?;
            write_frames(&frames, &a.output)?;
            println!("wrote {} frames to {}", frames.frame_count(), a.output.display());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    #[test]
    fn bench_data_sizes() {
        for n in [2, 3, 4, 1000] {
            let d = bench_dataset(n, 8, 1).unwrap();
            assert_eq!((d.len(), d.dim()), (n, 8));
        }
    }
}
