//! Training loop, label assignment, classification, metrics and sweeps.
//!
//! After unsupervised training every excitatory neuron is labelled with the
//! class it responds to most on a held-out labelling set. A test sample is
//! classified by the class whose labelled neurons have the highest mean spike
//! count.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{DatasetKind, RunConfig};
use crate::encoding::{
    load_ecg_beats, load_mnist_range, mnist_count, mnist_paths, poisson_encode, EncodingPlan,
    MnistSplit, Sample, Stream, ECG_CLASSES,
};
use crate::engine::{Engine, EngineOptions};
use crate::error::{Error, Result};
use crate::numerics::{Arithmetic, FixedArith, FloatArith, NumericMode};
use crate::topology::build_network;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeuronLabels {
    pub label: Vec<usize>,
    /// `response[j][c]`: mean spike count of neuron `j` over class `c`.
    pub response: Vec<Vec<f64>>,
    /// Neurons that never fired during labelling.
    pub silent: Vec<bool>,
}

impl NeuronLabels {
    pub fn n_classes(&self) -> usize {
        self.response.first().map_or(0, Vec::len)
    }

    /// Labels each neuron by its argmax response, ties to the lowest class.
    /// All-zero rows get class 0 and are flagged silent.
    pub fn from_response(response: Vec<Vec<f64>>) -> Self {
        let mut label = Vec::with_capacity(response.len());
        let mut silent = Vec::with_capacity(response.len());
        for row in &response {
            let mut best = 0;
            for (c, &r) in row.iter().enumerate() {
                if r > row[best] {
                    best = c;
                }
            }
            label.push(best);
            silent.push(row.iter().all(|&r| r == 0.0));
        }
        let n_silent = silent.iter().filter(|&&s| s).count();
        if n_silent > 0 {
            log::warn!(
                "{n_silent} of {} neurons silent during labelling; labelled 0",
                response.len()
            );
        }
        NeuronLabels {
            label,
            response,
            silent,
        }
    }

    /// One CSV line per neuron: `neuron,label,silent,r0,r1,...`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("neuron,label,silent");
        for c in 0..self.n_classes() {
            out.push_str(&format!(",r{c}"));
        }
        out.push('\n');
        for (j, row) in self.response.iter().enumerate() {
            out.push_str(&format!(
                "{j},{},{}",
                self.label[j],
                u8::from(self.silent[j])
            ));
            for r in row {
                out.push_str(&format!(",{r:?}"));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<u64>>,
    pub per_class_recall: Vec<f64>,
    pub total: u64,
}

impl Metrics {
    /// Builds metrics from `(truth, prediction)` pairs.
    pub fn from_predictions(pairs: &[(usize, usize)], n_classes: usize) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Evaluation("empty evaluation set".into()));
        }
        let mut confusion = vec![vec![0u64; n_classes]; n_classes];
        for &(t, p) in pairs {
            if t >= n_classes || p >= n_classes {
                return Err(Error::Evaluation(format!(
                    "class ({t}, {p}) outside 0..{n_classes}"
                )));
            }
            confusion[t][p] += 1;
        }
        let correct: u64 = (0..n_classes).map(|c| confusion[c][c]).sum();
        let per_class_recall = confusion
            .iter()
            .enumerate()
            .map(|(c, row)| {
                let n: u64 = row.iter().sum();
                if n == 0 {
                    0.0
                } else {
                    row[c] as f64 / n as f64
                }
            })
            .collect();
        Ok(Metrics {
            accuracy: correct as f64 / pairs.len() as f64,
            confusion,
            per_class_recall,
            total: pairs.len() as u64,
        })
    }
}

/// Predicts the class whose labelled neurons have the highest mean count.
/// Classes without labelled neurons score 0; silent neurons do not vote.
pub fn classify(counts: &[u32], labels: &NeuronLabels) -> usize {
    let n_classes = labels.n_classes().max(1);
    let mut sum = vec![0.0f64; n_classes];
    let mut members = vec![0u32; n_classes];
    for (j, &n) in counts.iter().enumerate() {
        if labels.silent.get(j).copied().unwrap_or(true) {
            continue;
        }
        let c = labels.label[j];
        sum[c] += f64::from(n);
        members[c] += 1;
    }
    let score = |c: usize| {
        if members[c] == 0 {
            0.0
        } else {
            sum[c] / f64::from(members[c])
        }
    };
    let mut best = 0;
    for c in 1..n_classes {
        if score(c) > score(best) {
            best = c;
        }
    }
    best
}

/// Spike counts per excitatory neuron for one sample with frozen weights.
/// The engine's neuron state is reset first; weights are never touched.
pub fn sample_counts<A: Arithmetic>(
    engine: &mut Engine<A>,
    sample: &Sample,
    plan: &EncodingPlan,
    stream: Stream,
    index: usize,
) -> Result<Vec<u32>> {
    let enc = plan.params(stream, index);
    let packets = poisson_encode(sample, &enc)?;
    engine.set_learning(false);
    engine.reset_sample(0);
    let out = engine.run(packets, enc.timesteps)?;
    let mut counts = vec![0u32; engine.store().n_exc()];
    for s in &out.spikes {
        counts[usize::from(s.neuron_id)] += 1;
    }
    Ok(counts)
}

/// Counts for every sample, in sample order. Work is spread over engine
/// clones; the result does not depend on the thread count.
pub fn batch_counts<A: Arithmetic>(
    engine: &Engine<A>,
    samples: &[Sample],
    plan: &EncodingPlan,
    stream: Stream,
) -> Result<Vec<Vec<u32>>> {
    samples
        .par_iter()
        .enumerate()
        .map_init(
            || engine.clone(),
            |e, (k, s)| sample_counts(e, s, plan, stream, k),
        )
        .collect()
}

pub fn assign_labels<A: Arithmetic>(
    engine: &Engine<A>,
    samples: &[Sample],
    n_classes: usize,
    plan: &EncodingPlan,
) -> Result<NeuronLabels> {
    if samples.is_empty() {
        return Err(Error::Evaluation("empty labelling set".into()));
    }
    let counts = batch_counts(engine, samples, plan, Stream::Label)?;
    let n_exc = engine.store().n_exc();
    let mut total = vec![vec![0.0f64; n_classes]; n_exc];
    let mut per_class = vec![0u32; n_classes];
    for (s, c) in samples.iter().zip(&counts) {
        if s.label >= n_classes {
            return Err(Error::Evaluation(format!(
                "label {} outside 0..{n_classes}",
                s.label
            )));
        }
        per_class[s.label] += 1;
        for (j, &n) in c.iter().enumerate() {
            total[j][s.label] += f64::from(n);
        }
    }
    for row in &mut total {
        for (c, r) in row.iter_mut().enumerate() {
            if per_class[c] > 0 {
                *r /= f64::from(per_class[c]);
            }
        }
    }
    Ok(NeuronLabels::from_response(total))
}

pub fn evaluate<A: Arithmetic>(
    engine: &Engine<A>,
    labels: &NeuronLabels,
    samples: &[Sample],
    plan: &EncodingPlan,
) -> Result<Metrics> {
    if samples.is_empty() {
        return Err(Error::Evaluation("empty test set".into()));
    }
    let counts = batch_counts(engine, samples, plan, Stream::Test)?;
    let pairs: Vec<(usize, usize)> = samples
        .iter()
        .zip(&counts)
        .map(|(s, c)| (s.label, classify(c, labels)))
        .collect();
    Metrics::from_predictions(&pairs, labels.n_classes())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainStats {
    pub samples: u64,
    pub input_spikes: u64,
    pub output_spikes: u64,
    pub handler_activations: u64,
}

/// Streams training samples with learning on. `range` indexes the global
/// sample sequence, where index `g` is sample `g % n` of epoch `g / n`, so a
/// resumed run continues exactly where a checkpoint stopped.
///
/// With `batch_size > 1`, weight changes are accumulated against frozen
/// weights and applied every `batch_size` samples.
pub fn train<A: Arithmetic>(
    engine: &mut Engine<A>,
    samples: &[Sample],
    plan: &EncodingPlan,
    batch_size: usize,
    range: std::ops::Range<u64>,
) -> Result<TrainStats> {
    let mut stats = TrainStats::default();
    if samples.is_empty() || range.is_empty() {
        return Ok(stats);
    }
    let n = samples.len() as u64;
    let batched = batch_size > 1;
    engine.set_learning(true);
    for g in range.clone() {
        let (epoch, k) = ((g / n) as u32, (g % n) as usize);
        if batched && (g % batch_size as u64 == 0 || g == range.start) {
            engine.begin_batch();
        }
        let enc = plan.params(Stream::Train { epoch }, k);
        let packets = poisson_encode(&samples[k], &enc)?;
        stats.input_spikes += packets.len() as u64;
        engine.reset_sample(0);
        let out = engine.run(packets, enc.timesteps)?;
        stats.output_spikes += out.spikes.len() as u64;
        stats.handler_activations += out.stats.handler_activations();
        stats.samples += 1;
        if batched && (g + 1) % batch_size as u64 == 0 {
            engine.commit_batch();
        }
        if stats.samples % 1000 == 0 {
            log::info!("trained {} samples", stats.samples);
        }
    }
    engine.commit_batch();
    engine.reset_sample(0);
    Ok(stats)
}

/// Samples for one run: the learning stream, the held-out labelling slice
/// (tail of the training set) and the test set.
#[derive(Clone, Debug, PartialEq)]
pub struct Datasets {
    pub learn: Vec<Sample>,
    pub label: Vec<Sample>,
    pub test: Vec<Sample>,
    pub n_classes: usize,
}

impl Datasets {
    /// Splits an in-memory training set: the last `label_samples` label,
    /// up to `train_samples` of the rest learn (0 = all).
    pub fn split(
        mut train: Vec<Sample>,
        test: Vec<Sample>,
        train_samples: usize,
        label_samples: usize,
        n_classes: usize,
    ) -> Result<Self> {
        if train.len() <= label_samples {
            return Err(Error::Config(format!(
                "training set has {} samples; {label_samples} are held out for labelling",
                train.len()
            )));
        }
        let label = train.split_off(train.len() - label_samples);
        if train_samples > 0 {
            train.truncate(train_samples);
        }
        Ok(Datasets {
            learn: train,
            label,
            test,
            n_classes,
        })
    }

    pub fn load(cfg: &RunConfig) -> Result<Self> {
        let d = &cfg.data;
        let test_limit = (d.test_samples > 0).then_some(d.test_samples);
        match d.kind {
            DatasetKind::Mnist => {
                let (img, lab) = mnist_paths(&d.train, MnistSplit::Train);
                let total = mnist_count(&img)?;
                if total <= d.label_samples {
                    return Err(Error::Config(format!(
                        "training set has {total} samples; {} are held out for labelling",
                        d.label_samples
                    )));
                }
                let label_start = total - d.label_samples;
                let learn_n = if d.train_samples == 0 {
                    label_start
                } else {
                    d.train_samples.min(label_start)
                };
                let learn = load_mnist_range(&img, &lab, 0, Some(learn_n))?;
                let label = load_mnist_range(&img, &lab, label_start, None)?;
                let (img, lab) = mnist_paths(&d.test, MnistSplit::Test);
                let test = load_mnist_range(&img, &lab, 0, test_limit)?;
                Ok(Datasets {
                    learn,
                    label,
                    test,
                    n_classes: 10,
                })
            }
            DatasetKind::Ecg => {
                let train = load_ecg_beats(&d.train)?;
                let mut test = load_ecg_beats(&d.test)?;
                if let Some(n) = test_limit {
                    test.truncate(n);
                }
                Datasets::split(train, test, d.train_samples, d.label_samples, ECG_CLASSES)
            }
        }
    }

    pub fn check_width(&self, n_input: usize) -> Result<()> {
        for s in self.learn.iter().chain(&self.label).chain(&self.test) {
            if s.features.len() != n_input {
                return Err(Error::Config(format!(
                    "sample has {} features but topology.n_input = {n_input}",
                    s.features.len()
                )));
            }
        }
        Ok(())
    }
}

/// Everything a train-then-evaluate run produces.
#[derive(Clone, Debug)]
pub struct Experiment<A: Arithmetic> {
    pub engine: Engine<A>,
    pub train: TrainStats,
    pub labels: NeuronLabels,
    pub metrics: Metrics,
}

/// Trains a fresh network on `data.learn`, labels it, and evaluates it.
pub fn run_experiment<A: Arithmetic>(
    arith: A,
    cfg: &RunConfig,
    data: &Datasets,
) -> Result<Experiment<A>> {
    cfg.validate()?;
    data.check_width(cfg.network.topology.n_input)?;
    let store = build_network(&arith, &cfg.network, cfg.init_seed())?;
    let mut engine = Engine::with_options(arith, &cfg.network, store, engine_options(cfg))?;
    let plan = cfg.encoding_plan();
    let total = (data.learn.len() * cfg.train.epochs) as u64;
    let train_stats = train(
        &mut engine,
        &data.learn,
        &plan,
        cfg.train.batch_size,
        0..total,
    )?;
    let labels = assign_labels(&engine, &data.label, data.n_classes, &plan)?;
    let metrics = evaluate(&engine, &labels, &data.test, &plan)?;
    Ok(Experiment {
        engine,
        train: train_stats,
        labels,
        metrics,
    })
}

pub fn engine_options(cfg: &RunConfig) -> EngineOptions {
    EngineOptions {
        learning: true,
        input_capacity: cfg.input_fifo,
        output_capacity: cfg.output_fifo,
        log_activations: false,
    }
}

/// Runs an experiment in the configured numeric mode and returns its metrics.
pub fn run_metrics(cfg: &RunConfig, data: &Datasets) -> Result<Metrics> {
    Ok(match cfg.mode {
        NumericMode::Float => run_experiment(FloatArith::new(), cfg, data)?.metrics,
        NumericMode::Fixed => {
            run_experiment(
                FixedArith::new(cfg.state_format, cfg.weight_format),
                cfg,
                data,
            )?
            .metrics
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    NExc,
    BatchSize,
    VThresh,
    Timesteps,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::NExc => "n_exc",
            SweepParam::BatchSize => "batch_size",
            SweepParam::VThresh => "v_thresh",
            SweepParam::Timesteps => "timesteps",
        }
    }

    /// Returns a copy of `cfg` with this parameter set to `value`.
    pub fn apply(self, cfg: &RunConfig, value: f64) -> Result<RunConfig> {
        let mut c = cfg.clone();
        let integral = || -> Result<u64> {
            if value >= 1.0 && value.fract() == 0.0 && value <= f64::from(u32::MAX) {
                Ok(value as u64)
            } else {
                Err(Error::Config(format!(
                    "{} needs a positive integer, got {value}",
                    self.as_str()
                )))
            }
        };
        match self {
            SweepParam::NExc => c.network.topology.n_exc = integral()? as usize,
            SweepParam::BatchSize => c.train.batch_size = integral()? as usize,
            SweepParam::Timesteps => c.timesteps = integral()? as u32,
            SweepParam::VThresh => c.network.lif.v_thresh = value,
        }
        c.validate()?;
        Ok(c)
    }
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n_exc" => Ok(SweepParam::NExc),
            "batch_size" => Ok(SweepParam::BatchSize),
            "v_thresh" => Ok(SweepParam::VThresh),
            "timesteps" => Ok(SweepParam::Timesteps),
            other => Err(Error::Config(format!(
                "unknown sweep parameter `{other}` (expected n_exc, batch_size, v_thresh or timesteps)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub metrics: Metrics,
    pub runtime_secs: f64,
}

/// One train/evaluate run per value, in the given order.
pub fn sweep(
    cfg: &RunConfig,
    param: SweepParam,
    values: &[f64],
    data: &Datasets,
) -> Result<Vec<SweepPoint>> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    let configs = values
        .iter()
        .map(|&v| param.apply(cfg, v))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(values.len());
    for (c, &value) in configs.iter().zip(values) {
        let start = Instant::now();
        let metrics = run_metrics(c, data)?;
        let runtime_secs = start.elapsed().as_secs_f64();
        log::info!(
            "{} = {value}: accuracy {:.4}",
            param.as_str(),
            metrics.accuracy
        );
        out.push(SweepPoint {
            value,
            metrics,
            runtime_secs,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{NetworkParams, SynapseMatrix, TopologyParams};
    use proptest::prelude::*;

    fn labels(label: Vec<usize>, n_classes: usize) -> NeuronLabels {
        let response = label
            .iter()
            .map(|&c| {
                let mut r = vec![0.0; n_classes];
                r[c] = 1.0;
                r
            })
            .collect();
        NeuronLabels::from_response(response)
    }

    #[test]
    fn label_examples() {
        let l = NeuronLabels::from_response(vec![
            vec![0.0, 0.0, 0.0, 4.0],
            vec![0.0; 4],
            vec![2.0, 2.0, 1.0, 0.0],
        ]);
        assert_eq!(l.label, vec![3, 0, 0]);
        assert_eq!(l.silent, vec![false, true, false]);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&[0, 0], &labels(vec![0, 1], 2)), 0);
        assert_eq!(classify(&[5, 2], &labels(vec![0, 1], 2)), 0);
        assert_eq!(classify(&[1, 1, 3], &labels(vec![0, 0, 1], 2)), 1);
    }

    #[test]
    fn silent_neurons_do_not_vote() {
        let l = NeuronLabels::from_response(vec![vec![0.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(classify(&[0, 2], &l), 1);
    }

    #[test]
    fn metrics_examples() {
        let pairs: Vec<(usize, usize)> = (0..8).map(|k| (k % 4, k % 4)).collect();
        let m = Metrics::from_predictions(&pairs, 4).unwrap();
        assert_eq!(m.accuracy, 1.0);
        for c in 0..4 {
            assert_eq!(m.confusion[c][c], 2);
        }
        assert!(Metrics::from_predictions(&[], 4).is_err());

        let majority: Vec<(usize, usize)> = (0..400).map(|k| (k % 4, 0)).collect();
        let m = Metrics::from_predictions(&majority, 4).unwrap();
        assert_eq!(m.accuracy, 0.25);
        assert_eq!(m.per_class_recall, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn labels_csv_layout() {
        let l = labels(vec![1, 0], 2);
        assert_eq!(
            l.to_csv(),
            "neuron,label,silent,r0,r1\n0,1,0,0.0,1.0\n1,0,0,1.0,0.0\n"
        );
    }

    #[test]
    fn sweep_param_names() {
        assert_eq!(
            "v_thresh".parse::<SweepParam>().unwrap(),
            SweepParam::VThresh
        );
        assert!("tau".parse::<SweepParam>().is_err());
        let cfg = RunConfig::default();
        assert_eq!(
            SweepParam::NExc
                .apply(&cfg, 25.0)
                .unwrap()
                .network
                .topology
                .n_exc,
            25
        );
        assert!(SweepParam::NExc.apply(&cfg, 2.5).is_err());
        assert!(SweepParam::VThresh.apply(&cfg, -1.0).is_err());
    }

    fn toy_engine(n_input: usize, w: Vec<f64>) -> Engine<FloatArith> {
        let p = NetworkParams {
            topology: TopologyParams {
                n_input,
                n_exc: 2,
                w_inh: 0.0,
            },
            ..NetworkParams::default()
        };
        let arith = FloatArith::new();
        let res = p.resolve(&arith).unwrap();
        let m = SynapseMatrix::from_vec(n_input, 2, w).unwrap();
        Engine::new(
            arith,
            &p,
            crate::topology::StateStore::with_weights(m, &res),
        )
        .unwrap()
    }

    fn toy_samples() -> Vec<Sample> {
        (0..20)
            .map(|k| Sample {
                features: if k % 2 == 0 {
                    vec![1.0, 0.0]
                } else {
                    vec![0.0, 1.0]
                },
                label: k % 2,
            })
            .collect()
    }

    fn plan() -> EncodingPlan {
        EncodingPlan {
            timesteps: 20,
            max_rate: 1.0,
            seed: 9,
        }
    }

    #[test]
    fn selective_neurons_get_their_class() {
        let e = toy_engine(2, vec![0.6, 0.0, 0.0, 0.6]);
        let l = assign_labels(&e, &toy_samples(), 2, &plan()).unwrap();
        assert_eq!(l.label, vec![0, 1]);
        assert!(l.response[0][1] == 0.0 && l.response[0][0] > 0.0);
        let m = evaluate(&e, &l, &toy_samples(), &plan()).unwrap();
        assert_eq!(m.accuracy, 1.0);
        assert!(assign_labels(&e, &[], 2, &plan()).is_err());
        assert!(evaluate(&e, &l, &[], &plan()).is_err());
    }

    #[test]
    fn evaluation_leaves_weights_untouched() {
        let e = toy_engine(2, vec![0.6, 0.1, 0.2, 0.6]);
        let before = e.store().clone();
        let l = assign_labels(&e, &toy_samples(), 2, &plan()).unwrap();
        evaluate(&e, &l, &toy_samples(), &plan()).unwrap();
        assert_eq!(e.store(), &before);
    }

    #[test]
    fn training_with_zero_samples_is_a_no_op() {
        let mut e = toy_engine(2, vec![0.6, 0.1, 0.2, 0.6]);
        let before = e.store().clone();
        let s = train(&mut e, &toy_samples(), &plan(), 1, 0..0).unwrap();
        assert_eq!(s.samples, 0);
        assert_eq!(e.store(), &before);
    }

    #[test]
    fn resumed_training_matches_single_pass() {
        let mut a = toy_engine(2, vec![0.6, 0.1, 0.2, 0.6]);
        let mut b = a.clone();
        train(&mut a, &toy_samples(), &plan(), 1, 0..30).unwrap();
        train(&mut b, &toy_samples(), &plan(), 1, 0..12).unwrap();
        train(&mut b, &toy_samples(), &plan(), 1, 12..30).unwrap();
        assert_eq!(a.store(), b.store());
    }

    #[test]
    fn batched_training_defers_updates() {
        let mut online = toy_engine(2, vec![0.6, 0.1, 0.2, 0.6]);
        let mut batched = online.clone();
        train(&mut online, &toy_samples(), &plan(), 1, 0..4).unwrap();
        train(&mut batched, &toy_samples(), &plan(), 4, 0..4).unwrap();
        assert_ne!(online.store().weights, batched.store().weights);

        let initial = toy_engine(2, vec![0.6, 0.1, 0.2, 0.6]);
        let mut partial = initial.clone();
        train(&mut partial, &toy_samples(), &plan(), 8, 0..3).unwrap();
        assert_ne!(partial.store().weights, initial.store().weights);
    }

    #[test]
    fn split_holds_out_tail() {
        let d = Datasets::split(toy_samples(), toy_samples(), 5, 4, 2).unwrap();
        assert_eq!(d.learn.len(), 5);
        assert_eq!(d.label.len(), 4);
        assert!(Datasets::split(toy_samples(), vec![], 0, 20, 2).is_err());
        let all = Datasets::split(toy_samples(), vec![], 0, 4, 2).unwrap();
        assert_eq!(all.learn.len(), 16);
    }

    proptest! {
        #[test]
        fn labels_invariant_under_scaling(
            rows in prop::collection::vec(prop::collection::vec(0.0f64..10.0, 4), 1..8),
            k in 0.01f64..100.0,
        ) {
            let a = NeuronLabels::from_response(rows.clone());
            let scaled = rows.iter().map(|r| r.iter().map(|x| x * k).collect()).collect();
            let b = NeuronLabels::from_response(scaled);
            prop_assert_eq!(a.label, b.label);
        }

        #[test]
        fn classify_permutation_equivariant(
            entries in prop::collection::vec((0usize..3, 0u32..20), 1..10),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let l = labels(entries.iter().map(|e| e.0).collect(), 3);
            let counts: Vec<u32> = entries.iter().map(|e| e.1).collect();
            let mut perm: Vec<usize> = (0..entries.len()).collect();
            perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let l2 = labels(perm.iter().map(|&p| entries[p].0).collect(), 3);
            let c2: Vec<u32> = perm.iter().map(|&p| counts[p]).collect();
            prop_assert_eq!(classify(&counts, &l), classify(&c2, &l2));
        }

        #[test]
        fn confusion_sums_to_total(pairs in prop::collection::vec((0usize..4, 0usize..4), 1..100)) {
            let m = Metrics::from_predictions(&pairs, 4).unwrap();
            prop_assert_eq!(m.confusion.iter().flatten().sum::<u64>(), pairs.len() as u64);
            prop_assert!((0.0..=1.0).contains(&m.accuracy));
        }
    }
}
