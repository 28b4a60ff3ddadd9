use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bridging_drt::drs::MarkerSupply;
use bridging_drt::grammar::{
    build_sentence_drs, default_config, parse_sentence_with, process_discourse_with, split_sentences, tokenize,
    Derivation, DerivationKind, DiscourseError, DiscourseState, GrammarError, Policy,
};
use bridging_drt::lexicon::{builtin_fragment, load_lexicon, Lexicon};
use bridging_drt::model::{verify, Model};
use bridging_drt::render::{render, RenderStyle};
use bridging_drt::resolution::ResolutionConfig;

#[derive(Parser)]
#[command(name = "bdrt")]
#[command(about = "Build DRSs for a small English fragment and resolve their presuppositions")]
#[command(version)]
struct Cli {
    /// DRS layout: box or linear.
    #[arg(long, global = true, default_value = "box")]
    render: RenderStyle,

    /// Print every reading instead of the first one.
    #[arg(long, global = true)]
    all_readings: bool,

    /// Print resolution steps to stderr.
    #[arg(long, global = true)]
    trace: bool,

    /// Lexicon file merged over the builtin fragment.
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,

    /// Model file (required by `verify`).
    #[arg(long, global = true)]
    model: Option<PathBuf>,

    /// Largest domain size tried when checking acceptability.
    #[arg(long, global = true, default_value_t = 4)]
    domain_bound: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resolve a discourse file (`-` for stdin) and print the readings.
    Resolve { file: PathBuf },
    /// Show the composition steps of one sentence.
    Derive {
        #[arg(required = true, num_args = 1..)]
        sentence: Vec<String>,
    },
    /// Resolve a discourse and check each reading against `--model`.
    Verify { file: PathBuf },
}

const PARSE_ERROR: u8 = 1;
const RESOLUTION_FAILURE: u8 = 2;
const LEXICON_ERROR: u8 = 3;
const MODEL_ERROR: u8 = 4;

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure { code, message: message.into() }
    }
}

fn grammar_code(e: &GrammarError) -> u8 {
    match e {
        GrammarError::UnknownWord(_) | GrammarError::MissingTense => LEXICON_ERROR,
        _ => PARSE_ERROR,
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    let result = if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map(|_| s)
    } else {
        fs::read_to_string(path)
    };
    result.map_err(|e| Failure::new(PARSE_ERROR, format!("cannot read {}: {e}", path.display())))
}

fn lexicon(cli: &Cli) -> Result<Lexicon, Failure> {
    let Some(path) = &cli.lexicon else {
        return Ok(builtin_fragment());
    };
    let src = fs::read_to_string(path)
        .map_err(|e| Failure::new(LEXICON_ERROR, format!("cannot read {}: {e}", path.display())))?;
    load_lexicon(&src).map_err(|e| Failure::new(LEXICON_ERROR, format!("{}: {e}", path.display())))
}

fn config(cli: &Cli, lex: &Lexicon) -> ResolutionConfig {
    ResolutionConfig { domain_bound: cli.domain_bound, ..default_config(lex) }
}

fn resolve_discourse(cli: &Cli, file: &Path, lex: &Lexicon) -> Result<Vec<DiscourseState>, Failure> {
    let text = read_input(file)?;
    let policy = if cli.all_readings { Policy::AllReadings { limit: 64 } } else { Policy::BestFirst };
    let states = process_discourse_with(&split_sentences(&text), lex, policy, &config(cli, lex)).map_err(|e| {
        let code = match &e {
            DiscourseError::Grammar { source, .. } => grammar_code(source),
            DiscourseError::Resolution { .. } => RESOLUTION_FAILURE,
        };
        Failure::new(code, e.to_string())
    })?;
    for (n, state) in states.iter().enumerate() {
        for (i, (sentence, reading)) in state.history.iter().enumerate() {
            if cli.trace {
                eprintln!("reading {} sentence {}: {sentence}", n + 1, i + 1);
                for step in &reading.steps {
                    eprintln!("  {step}");
                }
            }
            for note in &reading.felicity_notes {
                eprintln!("warning: reading {} sentence {}: {note}", n + 1, i + 1);
            }
        }
    }
    Ok(states)
}

fn mechanism_summary(state: &DiscourseState) -> String {
    let parts: Vec<String> = state
        .history
        .iter()
        .map(|(_, r)| {
            let ms: Vec<String> = r.mechanisms().iter().map(|m| m.to_string()).collect();
            if ms.is_empty() {
                "-".to_string()
            } else {
                ms.join(", ")
            }
        })
        .collect();
    parts.join(" | ")
}

fn cmd_resolve(cli: &Cli, file: &Path) -> Result<(), Failure> {
    let lex = lexicon(cli)?;
    let states = resolve_discourse(cli, file, &lex)?;
    for (n, state) in states.iter().enumerate() {
        println!("reading {}: {}", n + 1, mechanism_summary(state));
        print!("{}", render(&state.main_drs, cli.render));
        if cli.render == RenderStyle::Linear {
            println!();
        }
    }
    Ok(())
}

fn print_steps(d: &Derivation, counter: &mut usize) {
    let DerivationKind::Composition { functor, argument, coercion } = &d.kind else {
        return;
    };
    print_steps(functor, counter);
    print_steps(argument, counter);
    *counter += 1;
    let label = |d: &Derivation| match d.words() {
        w if w.is_empty() => d.phrase.to_string(),
        w => w,
    };
    println!("step {}: {} = [{}] ⊙ [{}]", counter, d.phrase, label(functor), label(argument));
    println!("  functor:  {}", functor.semantics);
    println!("  argument: {}", argument.semantics);
    if let Some(c) = coercion {
        println!("  coercion: {} quale {}", c.role, c.quale);
        println!("  coerced:  {}", c.coerced);
    }
    println!("  result:   {}", d.semantics);
}

fn cmd_derive(cli: &Cli, sentence: &str) -> Result<(), Failure> {
    let lex = lexicon(cli)?;
    let tokens = tokenize(sentence);
    let derivations = parse_sentence_with(&tokens, &lex, &mut MarkerSupply::new())
        .map_err(|e| Failure::new(grammar_code(&e), e.to_string()))?;
    for (n, d) in derivations.iter().enumerate() {
        let coercions = d.coercions();
        println!(
            "derivation {} ({} coercion step{})",
            n + 1,
            coercions.len(),
            if coercions.len() == 1 { "" } else { "s" }
        );
        let mut counter = 0;
        print_steps(d, &mut counter);
        let k = build_sentence_drs(d).map_err(|e| Failure::new(PARSE_ERROR, e.to_string()))?;
        println!("sentence DRS:");
        print!("{}", render(&k, cli.render));
        if cli.render == RenderStyle::Linear {
            println!();
        }
    }
    Ok(())
}

fn cmd_verify(cli: &Cli, file: &Path) -> Result<(), Failure> {
    let Some(model_path) = &cli.model else {
        return Err(Failure::new(MODEL_ERROR, "verify needs --model FILE"));
    };
    let src = fs::read_to_string(model_path)
        .map_err(|e| Failure::new(MODEL_ERROR, format!("cannot read {}: {e}", model_path.display())))?;
    let model = Model::parse(&src).map_err(|e| Failure::new(MODEL_ERROR, format!("{}: {e}", model_path.display())))?;
    let lex = lexicon(cli)?;
    model
        .check_arities(lex.arities())
        .map_err(|e| Failure::new(MODEL_ERROR, format!("{}: {e}", model_path.display())))?;
    let states = resolve_discourse(cli, file, &lex)?;
    for (n, state) in states.iter().enumerate() {
        let truth = verify(&state.main_drs, &model).map_err(|e| Failure::new(RESOLUTION_FAILURE, e.to_string()))?;
        println!("reading {}: {}", n + 1, if truth { "TRUE" } else { "FALSE" });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Resolve { file } => cmd_resolve(&cli, file),
        Command::Derive { sentence } => cmd_derive(&cli, &sentence.join(" ")),
        Command::Verify { file } => cmd_verify(&cli, file),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
