use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use xlingua::corpus::load_corpus;
use xlingua::dedupe::DEFAULT_DEDUPE_THRESHOLD;
use xlingua::experiment::{sweep_to_tsv, LengthFactorUse, REPORT_HEADER};
use xlingua::similarity::{DEFAULT_SAME_LANGUAGE_BIAS, DEFAULT_THRESHOLD};
use xlingua::{
    assign, dedupe, detect_translation, find_most_similar, generate_synthetic, normalize,
    run_experiment, sweep_threshold, train_profiles, Benchmark, ExperimentMode, ExperimentOptions,
    IdfVariant, LanguageResources, LengthModel, ParallelCorpus, ProfileSet, RawDocument, SearchDoc,
    SimilarityOptions, SyntheticSpec, Thesaurus, TrainingConfig, DEFAULT_TOP_K,
};

#[derive(Parser)]
#[command(
    name = "xlingua",
    version,
    about = "Cross-lingual document similarity through thesaurus descriptors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train associate profiles for one language.
    Train(TrainArgs),
    /// Print the ranked descriptors of a document.
    Assign(AssignArgs),
    /// Rank candidates by similarity to one query document.
    Similar(SimilarArgs),
    /// Report the best candidate of each query when it passes the threshold.
    FindTranslations(FindArgs),
    /// Remove near-duplicate documents by character shingles.
    Dedupe(DedupeArgs),
    /// Estimate a length model from a parallel corpus directory.
    LengthModel(LengthModelArgs),
    /// Generate a synthetic parallel corpus.
    GenCorpus(GenArgs),
    /// Run translation-recognition experiments.
    Evaluate(EvaluateArgs),
}

#[derive(Args)]
struct TrainOpts {
    #[arg(long, default_value_t = 2)]
    min_doc_freq: u32,
    #[arg(long, default_value_t = 3.84)]
    g2_threshold: f64,
    #[arg(long, default_value_t = 300)]
    max_associates: usize,
    /// `plus-one` for log(N/df) + 1, `plain` for log(N/df).
    #[arg(long, default_value = "plus-one", value_parser = parse_idf)]
    idf: IdfVariant,
}

impl TrainOpts {
    fn config(&self) -> TrainingConfig {
        TrainingConfig {
            min_doc_freq: self.min_doc_freq,
            g2_threshold: self.g2_threshold,
            max_associates: self.max_associates,
            idf_variant: self.idf,
        }
    }
}

fn parse_idf(s: &str) -> Result<IdfVariant, String> {
    match s {
        "plus-one" => Ok(IdfVariant::LogNOverDfPlusOne),
        "plain" => Ok(IdfVariant::LogNOverDf),
        _ => Err(format!(
            "unknown idf variant {s:?}, expected plus-one or plain"
        )),
    }
}

#[derive(Args)]
struct TrainArgs {
    /// Manifest of labelled training documents.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    thesaurus: PathBuf,
    /// Resource directory, or a directory holding one per language.
    #[arg(long)]
    resources: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Language to train; required when the manifest mixes languages.
    #[arg(long)]
    lang: Option<String>,
    #[command(flatten)]
    training: TrainOpts,
}

#[derive(Args)]
struct AssignArgs {
    #[arg(long)]
    profiles: PathBuf,
    /// Plain-text document in the profiles' language.
    #[arg(long)]
    doc: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOP_K)]
    top: usize,
    /// Document id; defaults to the file stem.
    #[arg(long)]
    id: Option<String>,
    /// Without resources, tokens are used as lemmas and nothing is removed.
    #[arg(long)]
    resources: Option<PathBuf>,
    /// Thesaurus for the label column; empty labels without it.
    #[arg(long)]
    thesaurus: Option<PathBuf>,
}

#[derive(Args)]
struct SearchOpts {
    #[arg(long)]
    profiles_src: PathBuf,
    #[arg(long)]
    profiles_tgt: PathBuf,
    /// The length factor is applied when a model is given, unless `--no-lf`.
    #[arg(long)]
    length_model: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SAME_LANGUAGE_BIAS)]
    bias: f64,
    #[arg(long)]
    no_lf: bool,
    #[arg(long)]
    resources: Option<PathBuf>,
    /// Descriptors kept per document vector.
    #[arg(long, default_value_t = DEFAULT_TOP_K)]
    assign_top: usize,
}

#[derive(Args)]
struct SimilarArgs {
    #[command(flatten)]
    search: SearchOpts,
    /// Id of the query document, which must appear in the candidates.
    #[arg(long)]
    query: String,
    #[arg(long)]
    candidates: PathBuf,
    #[arg(long, default_value_t = 10)]
    top: usize,
}

#[derive(Args)]
struct FindArgs {
    #[command(flatten)]
    search: SearchOpts,
    #[arg(long)]
    queries: PathBuf,
    #[arg(long)]
    candidates: PathBuf,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DedupeArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = DEFAULT_DEDUPE_THRESHOLD)]
    threshold: f64,
    /// Removed-pair report; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for the surviving documents and their manifest.
    #[arg(long)]
    kept: Option<PathBuf>,
}

#[derive(Args)]
struct LengthModelArgs {
    /// Directory with `manifest.tsv` and `pairs.tsv`.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    /// TOML spec; defaults are used for missing keys or without a file.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Experiment mode, or `all`.
    #[arg(long)]
    mode: String,
    #[arg(long)]
    out: PathBuf,
    /// Generate the benchmark from this spec.
    #[arg(long, conflicts_with = "corpus")]
    spec: Option<PathBuf>,
    /// Load the benchmark from a directory written by `gen-corpus`.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Recall/noise sweep of the first mode's length-factor row.
    #[arg(long)]
    sweep_out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SAME_LANGUAGE_BIAS)]
    bias: f64,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Seed for the half-set draws of the TH1 modes.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    training: TrainOpts,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for filesystem failures, 1 for everything else.
fn exit_code(e: &anyhow::Error) -> u8 {
    let io = e.chain().any(|c| {
        c.downcast_ref::<xlingua::Error>()
            .is_some_and(|e| e.is_io())
            || c.downcast_ref::<std::io::Error>().is_some()
    });
    if io {
        2
    } else {
        1
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Train(a) => train(a),
        Command::Assign(a) => assign_doc(a),
        Command::Similar(a) => similar(a),
        Command::FindTranslations(a) => find_translations(a),
        Command::Dedupe(a) => dedupe_corpus(a),
        Command::LengthModel(a) => length_model(a),
        Command::GenCorpus(a) => gen_corpus(a),
        Command::Evaluate(a) => evaluate(a),
    }
}

/// `dir/<lang>` when it exists, else `dir` itself.
fn load_resources(dir: &Path, lang: &str) -> Result<LanguageResources> {
    let nested = dir.join(lang);
    let dir = if nested.is_dir() {
        nested
    } else {
        dir.to_path_buf()
    };
    LanguageResources::load_dir(&dir, lang)
        .with_context(|| format!("loading {lang} resources from {}", dir.display()))
}

fn resources_or_empty(dir: Option<&Path>, lang: &str) -> Result<LanguageResources> {
    match dir {
        Some(dir) => load_resources(dir, lang),
        None => Ok(LanguageResources::empty(lang)),
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn train(a: TrainArgs) -> Result<()> {
    let docs = load_corpus(&a.corpus)?;
    let langs: BTreeSet<&str> = docs.iter().map(|d| d.lang.as_str()).collect();
    let lang = match (&a.lang, langs.len()) {
        (Some(l), _) => l.clone(),
        (None, 1) => langs.first().unwrap().to_string(),
        (None, 0) => bail!("corpus {} is empty", a.corpus.display()),
        (None, _) => bail!("corpus mixes languages {langs:?}; choose one with --lang"),
    };
    let thesaurus = Thesaurus::load(&a.thesaurus)?;
    let res = load_resources(&a.resources, &lang)?;
    let normalized = docs
        .iter()
        .filter(|d| d.lang == lang)
        .map(|d| normalize(d, &res))
        .collect::<xlingua::Result<Vec<_>>>()?;
    let profiles = train_profiles(&normalized, &thesaurus, &a.training.config())?;
    profiles.save(&a.out)?;
    eprintln!(
        "trained {} profiles for {lang} from {} documents",
        profiles.len(),
        normalized.len()
    );
    Ok(())
}

fn assign_doc(a: AssignArgs) -> Result<()> {
    let profiles = ProfileSet::load(&a.profiles)?;
    let lang = profiles.lang().to_string();
    let res = resources_or_empty(a.resources.as_deref(), &lang)?;
    let thesaurus = a.thesaurus.as_ref().map(Thesaurus::load).transpose()?;
    let text =
        std::fs::read_to_string(&a.doc).with_context(|| format!("reading {}", a.doc.display()))?;
    let id = match a.id {
        Some(id) => id,
        None => a
            .doc
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
    };
    let doc = normalize(&RawDocument::new(id, lang.as_str(), text), &res)?;
    let vector = assign(&doc, &profiles, a.top)?;
    let mut out = String::new();
    for (code, score) in vector.entries() {
        let label = match &thesaurus {
            Some(t) => t.label_of(*code, &lang)?,
            None => "",
        };
        writeln!(out, "{}\t{code}\t{score:.6}\t{label}", vector.doc_id)?;
    }
    print!("{out}");
    Ok(())
}

struct SearchSetup {
    profiles: Vec<ProfileSet>,
    resources: Vec<LanguageResources>,
    model: LengthModel,
    opts: SimilarityOptions,
    assign_top: usize,
}

impl SearchSetup {
    fn new(s: &SearchOpts, threshold: f64, top_k: usize) -> Result<Self> {
        let profiles = vec![
            ProfileSet::load(&s.profiles_src)?,
            ProfileSet::load(&s.profiles_tgt)?,
        ];
        let resources = profiles
            .iter()
            .map(|p| resources_or_empty(s.resources.as_deref(), p.lang()))
            .collect::<Result<_>>()?;
        let model = match &s.length_model {
            Some(p) => LengthModel::load(p)?,
            None => LengthModel::new(),
        };
        let opts = SimilarityOptions {
            use_length_factor: s.length_model.is_some() && !s.no_lf,
            same_language_bias: s.bias,
            threshold,
            top_k,
            ..SimilarityOptions::default()
        };
        opts.validate()?;
        Ok(SearchSetup {
            profiles,
            resources,
            model,
            opts,
            assign_top: s.assign_top,
        })
    }

    fn search_docs(&self, manifest: &Path) -> Result<Vec<SearchDoc>> {
        load_corpus(manifest)?
            .iter()
            .map(|d| {
                let i = self
                    .profiles
                    .iter()
                    .position(|p| p.lang() == d.lang)
                    .with_context(|| {
                        format!("no profiles for language {:?} of {}", d.lang, d.id)
                    })?;
                let doc = normalize(d, &self.resources[i])?;
                let vector = assign(&doc, &self.profiles[i], self.assign_top)?;
                Ok(SearchDoc::new(vector, doc.char_length))
            })
            .collect()
    }
}

fn similar(a: SimilarArgs) -> Result<()> {
    let setup = SearchSetup::new(&a.search, DEFAULT_THRESHOLD, a.top)?;
    let candidates = setup.search_docs(&a.candidates)?;
    let query = candidates
        .iter()
        .find(|c| c.id() == a.query)
        .with_context(|| format!("query {:?} is not in {}", a.query, a.candidates.display()))?;
    let mut out = String::new();
    for m in find_most_similar(query, &candidates, &setup.opts, &setup.model)? {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}",
            a.query,
            m.rank,
            m.candidate_id,
            m.candidate_lang,
            m.raw_cosine,
            m.length_factor,
            m.final_score
        )?;
    }
    print!("{out}");
    Ok(())
}

fn find_translations(a: FindArgs) -> Result<()> {
    let setup = SearchSetup::new(&a.search, a.threshold, 1)?;
    let queries = setup.search_docs(&a.queries)?;
    let candidates = setup.search_docs(&a.candidates)?;
    let mut out = String::from("query_id\tcandidate_id\tcand_lang\tfinal_score\n");
    for q in &queries {
        if let Some(m) = detect_translation(q, &candidates, &setup.opts, &setup.model)? {
            writeln!(
                out,
                "{}\t{}\t{}\t{:.6}",
                q.id(),
                m.candidate_id,
                m.candidate_lang,
                m.final_score
            )?;
        }
    }
    write_output(a.out.as_deref(), &out)
}

fn dedupe_corpus(a: DedupeArgs) -> Result<()> {
    let docs = load_corpus(&a.corpus)?;
    let result = dedupe(&docs, a.threshold)?;
    let mut out = String::from("kept_id\tremoved_id\tjaccard\n");
    for r in &result.removed {
        writeln!(out, "{}\t{}\t{:.6}", r.kept_id, r.removed_id, r.jaccard)?;
    }
    write_output(a.out.as_deref(), &out)?;
    if let Some(dir) = &a.kept {
        xlingua::corpus::write_corpus(dir, &result.kept)?;
    }
    eprintln!("kept {} of {} documents", result.kept.len(), docs.len());
    Ok(())
}

fn length_model(a: LengthModelArgs) -> Result<()> {
    let corpus = ParallelCorpus::load(&a.corpus)?;
    LengthModel::from_parallel(&corpus)?.save(&a.out)?;
    Ok(())
}

fn gen_corpus(a: GenArgs) -> Result<()> {
    let mut spec = match &a.spec {
        Some(p) => SyntheticSpec::load(p)?,
        None => SyntheticSpec::default(),
    };
    if let Some(seed) = a.seed {
        spec.rng_seed = seed;
    }
    let corpus = generate_synthetic(&spec)?;
    corpus.save(&a.out)?;
    eprintln!(
        "wrote {} training and {} test pairs to {}",
        corpus.train.len(),
        corpus.test.len(),
        a.out.display()
    );
    Ok(())
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let modes: Vec<ExperimentMode> = if a.mode.eq_ignore_ascii_case("all") {
        ExperimentMode::ALL.to_vec()
    } else {
        a.mode
            .split(',')
            .map(|m| m.trim().parse())
            .collect::<xlingua::Result<_>>()?
    };
    let config = a.training.config();
    let bench = match (&a.corpus, &a.spec) {
        (Some(dir), _) => Benchmark::load_dir(dir, &config)?,
        (None, spec) => {
            let spec = match spec {
                Some(p) => SyntheticSpec::load(p)?,
                None => SyntheticSpec::default(),
            };
            Benchmark::from_synthetic(&generate_synthetic(&spec)?, &config)?
        }
    };
    let opts = ExperimentOptions {
        bias: a.bias,
        threshold: a.threshold,
        seed: a.seed,
    };
    let mut out = format!("{REPORT_HEADER}\n");
    let mut sweep = None;
    for mode in modes {
        let report = run_experiment(mode, &bench, &opts)?;
        report.write_rows(&mut out);
        if sweep.is_none() {
            let row = report
                .row(LengthFactorUse::On)
                .or_else(|| report.rows.first())
                .context("experiment produced no rows")?;
            sweep = Some(sweep_threshold(&row.outcomes)?);
        }
    }
    write_output(Some(&a.out), &out)?;
    if let (Some(path), Some(rows)) = (&a.sweep_out, &sweep) {
        write_output(Some(path), &sweep_to_tsv(rows))?;
    }
    Ok(())
}
