//! `retune`: parse, translate, refactor, check and report on FRETISH
//! requirement sets stored as JSON.
//!
//! Exit status: 0 on success, 1 when a verdict falls short of what was
//! expected, 2 on any input or validation error.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use retune_core::abstraction::AtomMap;
use retune_core::analysis::{
    duplication_csv, duplication_markdown, duplication_report, summary, summary_csv, summary_markdown,
};
use retune_core::fretish::{parse_expr, parse_requirement, render_requirement};
use retune_core::refactor::{
    apply_catalog, compare_sets, definition_sites, extract_requirement, inline_requirement,
    merge_part_definitions, pull_up_definition, remove_redundant_children, rename_requirement,
    CatalogOptions, CheckedObligation, ExtractOptions, Obligation, RefactorError, Resolution, Selection,
};
use retune_core::store::{load_set, save_set, Fragment, RequirementSet, StoreError};
use retune_core::translate::{translate, FragmentEnv, FragmentResolution};
use retune_ltl::{CheckError, VerdictKind};

use output::Painter;

#[derive(Parser)]
#[command(name = "retune", version, about = "Check and refactor FRETISH requirement sets")]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse one requirement and print its canonical form.
    Parse {
        /// Requirement text; read from stdin when omitted.
        text: Option<String>,
    },
    /// Load a set and check every structural invariant.
    Validate {
        #[arg(long)]
        set: PathBuf,
    },
    /// Translate requirements to LTL.
    Translate {
        #[arg(long)]
        set: PathBuf,
        /// Requirement to translate; all when omitted.
        #[arg(long)]
        id: Option<String>,
        #[arg(long, value_enum, default_value_t = ResolutionArg::Atom)]
        resolution: ResolutionArg,
    },
    /// Apply a refactoring.
    #[command(subcommand)]
    Refactor(RefactorCommand),
    /// Compare requirements behaviourally.
    Check(CheckArgs),
    /// Dependency and duplication tables.
    Report {
        #[arg(long)]
        before: PathBuf,
        /// Refactored set; when omitted the catalog pipeline is run on `before`.
        #[arg(long)]
        after: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Markdown)]
        format: ReportFormat,
    },
    /// Collapse identical children of the same parents.
    Dedupe {
        #[command(flatten)]
        io: SetIo,
    },
}

#[derive(Subcommand)]
enum RefactorCommand {
    /// Move one repeated definition into a new fragment requirement.
    Extract {
        #[command(flatten)]
        io: SetIo,
        #[command(flatten)]
        target: NewFragment,
        /// Site to replace, as ID:field[:path]. Repeatable.
        #[arg(long = "site")]
        sites: Vec<Selection>,
        /// Replace every occurrence of this expression instead of listing sites.
        #[arg(long = "match", conflicts_with = "sites")]
        pattern: Option<String>,
    },
    /// Combine differing part-definitions into one fragment.
    Merge {
        #[command(flatten)]
        io: SetIo,
        #[command(flatten)]
        target: NewFragment,
        #[arg(long = "site", required = true)]
        sites: Vec<Selection>,
    },
    /// Rename a requirement and everything that points at it.
    Rename {
        #[command(flatten)]
        io: SetIo,
        #[arg(long)]
        old: String,
        #[arg(long)]
        new: String,
    },
    /// Move a conjunct from a child into a parent.
    Pullup {
        #[command(flatten)]
        io: SetIo,
        #[arg(long)]
        site: Selection,
        #[arg(long)]
        parent: String,
    },
    /// Replace references to a fragment by its definition and delete it.
    Inline {
        #[command(flatten)]
        io: SetIo,
        #[arg(long)]
        id: String,
        /// Inline even where the referencing component differs.
        #[arg(long)]
        allow_component_mismatch: bool,
    },
    /// Collapse identical children of the same parents.
    Dedupe {
        #[command(flatten)]
        io: SetIo,
    },
    /// Extract or merge every fragment of the set's catalog, then dedupe.
    Catalog {
        #[command(flatten)]
        io: SetIo,
        /// Leave multi-part fragments alone.
        #[arg(long)]
        no_merge: bool,
        #[arg(long)]
        no_dedupe: bool,
    },
}

#[derive(Args)]
struct SetIo {
    #[arg(long)]
    set: PathBuf,
    /// Write the result here (stdout when neither this nor --in-place).
    #[arg(long, conflicts_with = "in_place")]
    out: Option<PathBuf>,
    #[arg(long)]
    in_place: bool,
    /// Check obligations before writing (the default).
    #[arg(long, overrides_with = "no_verify")]
    verify: bool,
    #[arg(long)]
    no_verify: bool,
}

#[derive(Args)]
struct NewFragment {
    /// Id of the new fragment requirement.
    #[arg(long)]
    id: String,
    /// Component of the new fragment requirement.
    #[arg(long)]
    component: String,
    /// Boolean variable standing for the fragment; replaced everywhere.
    #[arg(long)]
    placeholder: Option<String>,
    /// Response flag of the fragment.
    #[arg(long)]
    flag: Option<String>,
}

#[derive(Args)]
struct CheckArgs {
    /// The (refactored) set.
    #[arg(long)]
    set: PathBuf,
    /// Set holding the originals; defaults to --set.
    #[arg(long)]
    baseline: Option<PathBuf>,
    #[arg(long, requires = "refactored", conflicts_with = "all")]
    original: Option<String>,
    #[arg(long, requires = "original")]
    refactored: Option<String>,
    /// Compare every requirement present in both --baseline and --set.
    #[arg(long, requires = "baseline", required_unless_present = "original")]
    all: bool,
    #[arg(long, value_enum, default_value_t = ResolutionArg::Inline)]
    resolution: ResolutionArg,
    #[arg(long, value_enum, default_value_t = Expect::Equivalent)]
    expect: Expect,
}

#[derive(Clone, Copy, ValueEnum)]
enum ResolutionArg {
    Inline,
    Atom,
}

impl From<ResolutionArg> for Resolution {
    fn from(r: ResolutionArg) -> Self {
        match r {
            ResolutionArg::Inline => Resolution::Inline,
            ResolutionArg::Atom => Resolution::AsAtom,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Expect {
    Equivalent,
    /// The refactored requirement implies the original.
    Implies,
    Any,
}

impl From<Expect> for VerdictKind {
    fn from(e: Expect) -> Self {
        match e {
            Expect::Equivalent => VerdictKind::Equivalent,
            Expect::Implies => VerdictKind::RefactoredImpliesOriginal,
            Expect::Any => VerdictKind::Incomparable,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Markdown,
    Csv,
    Json,
}

#[derive(Debug, Error)]
enum Failure {
    #[error("{0}")]
    Input(String),
    #[error("verification failed")]
    Verification,
}

macro_rules! input_error {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::Input(e.to_string())
            }
        }
    )*};
}
input_error!(StoreError, RefactorError, CheckError, retune_core::translate::TranslateError, std::io::Error);

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let painter = Painter::from_env();
    match run(cli, &painter) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("{}: {msg}", painter.red("error"));
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli, p: &Painter) -> Outcome {
    let json = cli.json;
    match cli.command {
        Command::Parse { text } => parse_cmd(text, json),
        Command::Validate { set } => {
            let s = load_set(&set)?;
            let sum = summary(&s);
            if json {
                print_json(&json!({"valid": true, "requirements": s.len(), "children": sum.total_children}));
            } else {
                println!("{}: {} requirements, {} children, valid", set.display(), s.len(), sum.total_children);
            }
            Ok(())
        }
        Command::Translate { set, id, resolution } => translate_cmd(&set, id.as_deref(), resolution.into(), json),
        Command::Refactor(cmd) => refactor_cmd(cmd, json, p),
        Command::Check(args) => check_cmd(args, json, p),
        Command::Report { before, after, format } => report_cmd(&before, after.as_deref(), format, json),
        Command::Dedupe { io } => refactor_cmd(RefactorCommand::Dedupe { io }, json, p),
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("values serialize"));
}

fn parse_cmd(text: Option<String>, json: bool) -> Outcome {
    let text = match text {
        Some(t) => t,
        None => std::io::read_to_string(std::io::stdin())?,
    };
    let req = parse_requirement(text.trim()).map_err(|e| Failure::Input(e.to_string()))?;
    let canonical = render_requirement(&req);
    if json {
        let mut fields = serde_json::Map::new();
        for (field, e) in req.fields() {
            fields.insert(field.name().to_string(), json!(retune_core::fretish::render_expr(e)));
        }
        print_json(&json!({"text": canonical, "component": req.component, "fields": fields}));
    } else {
        println!("{canonical}");
    }
    Ok(())
}

fn atoms_json(atoms: &AtomMap) -> Value {
    serde_json::to_value(atoms).expect("atom maps serialize")
}

fn translate_cmd(path: &Path, id: Option<&str>, resolution: Resolution, json: bool) -> Outcome {
    let set = load_set(path)?;
    let env = FragmentEnv::from_set(&set);
    let res = match resolution {
        Resolution::Inline => FragmentResolution::Inline(&env),
        Resolution::AsAtom => FragmentResolution::AsAtom(&env),
    };
    let targets: Vec<&str> = match id {
        Some(id) if set.contains(id) => vec![id],
        Some(id) => return Err(Failure::Input(format!("unknown requirement {id}"))),
        None => set.ids().collect(),
    };
    let mut out = Vec::new();
    for id in targets {
        let mut atoms = AtomMap::new();
        let f = translate(set.get(id).expect("listed"), res, &mut atoms)?;
        if json {
            out.push(json!({"id": id, "formula": f.to_string(), "atoms": atoms_json(&atoms)}));
        } else {
            println!("{id}: {f}");
            for (prop, atom) in atoms.entries() {
                if prop != atom {
                    println!("  {prop} = {atom}");
                }
            }
        }
    }
    if json {
        print_json(&Value::Array(out));
    }
    Ok(())
}

/// Checks obligations in parallel; results keep the input order.
fn check_all(obligations: &[Obligation]) -> Result<Vec<CheckedObligation>, Failure> {
    obligations
        .par_iter()
        .map(|o| o.check())
        .collect::<Result<Vec<_>, _>>()
        .map_err(Failure::from)
}

fn report_checks(checked: &[CheckedObligation], p: &Painter) {
    for c in checked {
        let o = &c.obligation;
        let tag = if c.passed { p.green("PASS") } else { p.red("FAIL") };
        let label = if o.original_id == o.refactored_id {
            o.refactored_id.clone()
        } else {
            format!("{} vs {}", o.refactored_id, o.original_id)
        };
        println!(
            "{tag} {} {label}: {} (expected {})",
            o.refactoring, c.verdict.kind, o.expected
        );
        if !c.passed {
            println!("     original:   {}", o.original);
            println!("     refactored: {}", o.refactored);
            if let Some(w) = &c.verdict.refactored_only {
                println!("     refactored but not original on {w}");
            }
            if let Some(w) = &c.verdict.original_only {
                println!("     original but not refactored on {w}");
            }
        }
    }
}

struct RefactorResult {
    set: RequirementSet,
    obligations: Vec<Obligation>,
    notes: Value,
}

fn refactor_cmd(cmd: RefactorCommand, json: bool, p: &Painter) -> Outcome {
    let (io, result) = match cmd {
        RefactorCommand::Extract { io, target, sites, pattern } => {
            let set = load_set(&io.set)?;
            let sites = match pattern {
                Some(text) => {
                    let expr = parse_expr(&text).map_err(|e| Failure::Input(e.to_string()))?;
                    let probe = Fragment {
                        id: target.id.clone(),
                        label: String::new(),
                        name: String::new(),
                        placeholder: None,
                        parts: vec![expr],
                    };
                    definition_sites(&set, &probe)
                }
                None => sites,
            };
            let (out, obligations) = extract_requirement(&set, &sites, &target.id, &target.component, &target.options())?;
            let notes = json!({"sites": sites.iter().map(ToString::to_string).collect::<Vec<_>>()});
            (io, RefactorResult { set: out, obligations, notes })
        }
        RefactorCommand::Merge { io, target, sites } => {
            let set = load_set(&io.set)?;
            let (out, obligations) = merge_part_definitions(&set, &sites, &target.id, &target.component, &target.options())?;
            (io, RefactorResult { set: out, obligations, notes: Value::Null })
        }
        RefactorCommand::Rename { io, old, new } => {
            let set = load_set(&io.set)?;
            let out = rename_requirement(&set, &old, &new)?;
            (io, RefactorResult { set: out, obligations: Vec::new(), notes: Value::Null })
        }
        RefactorCommand::Pullup { io, site, parent } => {
            let set = load_set(&io.set)?;
            let (out, obligation) = pull_up_definition(&set, &site, &parent)?;
            (io, RefactorResult { set: out, obligations: vec![obligation], notes: Value::Null })
        }
        RefactorCommand::Inline { io, id, allow_component_mismatch } => {
            let set = load_set(&io.set)?;
            let (out, obligations) = inline_requirement(&set, &id, allow_component_mismatch)?;
            (io, RefactorResult { set: out, obligations, notes: Value::Null })
        }
        RefactorCommand::Dedupe { io } => {
            let set = load_set(&io.set)?;
            let (out, removed) = remove_redundant_children(&set);
            if !json {
                for r in &removed {
                    eprintln!("kept {}, removed {}", r.kept, r.removed.join(", "));
                }
            }
            let notes = json!({"removed": removed});
            (io, RefactorResult { set: out, obligations: Vec::new(), notes })
        }
        RefactorCommand::Catalog { io, no_merge, no_dedupe } => {
            let set = load_set(&io.set)?;
            let opts = CatalogOptions {
                merge_parts: !no_merge,
                dedupe: !no_dedupe,
            };
            let outcome = apply_catalog(&set, opts)?;
            let obligations: Vec<Obligation> = outcome.obligations().cloned().collect();
            let notes = json!({"steps": outcome.steps, "removed": outcome.removed});
            if !json {
                for s in &outcome.steps {
                    eprintln!("{} {}: {} sites", s.refactoring, s.fragment, s.sites.len());
                }
                for r in &outcome.removed {
                    eprintln!("kept {}, removed {}", r.kept, r.removed.join(", "));
                }
            }
            (io, RefactorResult { set: outcome.set, obligations, notes })
        }
    };
    finish_refactor(&io, result, json, p)
}

impl NewFragment {
    fn options(&self) -> ExtractOptions {
        ExtractOptions {
            placeholder: self.placeholder.clone(),
            flag: self.flag.clone(),
        }
    }
}

fn finish_refactor(io: &SetIo, result: RefactorResult, json: bool, p: &Painter) -> Outcome {
    let to_stdout = io.out.is_none() && !io.in_place;
    let checked = if io.no_verify { Vec::new() } else { check_all(&result.obligations)? };
    let passed = checked.iter().all(|c| c.passed);
    let target = if io.in_place { Some(io.set.clone()) } else { io.out.clone() };

    if passed {
        if let Some(path) = &target {
            save_set(&result.set, path)?;
        }
    }
    if json {
        let mut v = json!({
            "verified": !io.no_verify,
            "passed": passed,
            "obligations": if io.no_verify { json!(result.obligations) } else { json!(checked) },
            "written": if passed { target.as_ref().map(|t| t.display().to_string()) } else { None },
            "details": result.notes,
        });
        if to_stdout && passed {
            v["set"] = serde_json::from_str(&result.set.to_json()).expect("own output parses");
        }
        print_json(&v);
    } else {
        if to_stdout {
            // keep stdout a clean set file; the verification log goes to stderr
            if passed {
                print!("{}", result.set.to_json());
            }
            for line in render_checks(&checked) {
                eprintln!("{line}");
            }
        } else {
            report_checks(&checked, p);
            match (&target, passed) {
                (Some(t), true) => println!("wrote {}", t.display()),
                (_, false) => println!("{}: nothing written", p.red("verification failed")),
                _ => {}
            }
        }
        if io.no_verify && !result.obligations.is_empty() {
            eprintln!("{} obligations not checked (--no-verify)", result.obligations.len());
        }
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn render_checks(checked: &[CheckedObligation]) -> Vec<String> {
    checked
        .iter()
        .map(|c| {
            let o = &c.obligation;
            format!(
                "{} {} {}: {} (expected {})",
                if c.passed { "PASS" } else { "FAIL" },
                o.refactoring,
                o.refactored_id,
                c.verdict.kind,
                o.expected
            )
        })
        .collect()
}

fn check_cmd(args: CheckArgs, json: bool, p: &Painter) -> Outcome {
    let set = load_set(&args.set)?;
    let baseline = match &args.baseline {
        Some(path) => load_set(path)?,
        None => set.clone(),
    };
    let expected: VerdictKind = args.expect.into();
    let resolution: Resolution = args.resolution.into();
    let obligations = match (&args.original, &args.refactored) {
        (Some(orig), Some(refac)) => {
            let original = baseline
                .get(orig)
                .ok_or_else(|| Failure::Input(format!("unknown original requirement {orig}")))?;
            let refactored = set
                .get(refac)
                .ok_or_else(|| Failure::Input(format!("unknown refactored requirement {refac}")))?;
            let env = FragmentEnv::layered(&set, &baseline);
            vec![Obligation::build_with("check", original, refactored, &env, expected, resolution)?]
        }
        _ => compare_sets(&baseline, &set, expected, resolution)?,
    };
    let mut checked = check_all(&obligations)?;
    checked.sort_by(|a, b| a.obligation.refactored_id.cmp(&b.obligation.refactored_id));
    let passed = checked.iter().all(|c| c.passed);

    let mut counts: Vec<(VerdictKind, usize)> = Vec::new();
    for c in &checked {
        match counts.iter_mut().find(|(k, _)| *k == c.verdict.kind) {
            Some((_, n)) => *n += 1,
            None => counts.push((c.verdict.kind, 1)),
        }
    }
    counts.sort();
    if json {
        let summary: serde_json::Map<String, Value> =
            counts.iter().map(|(k, n)| (k.to_string(), json!(n))).collect();
        print_json(&json!({"passed": passed, "summary": summary, "results": checked}));
    } else {
        for c in &checked {
            let tag = if c.passed { p.green("PASS") } else { p.red("FAIL") };
            println!("{tag} {:<14} {}", c.obligation.refactored_id, c.verdict.kind);
            if args.original.is_some() {
                println!("     original:   {}", c.obligation.original);
                println!("     refactored: {}", c.obligation.refactored);
                for (prop, atom) in c.obligation.atoms.entries() {
                    if prop != atom {
                        println!("     {prop} = {atom}");
                    }
                }
            }
        }
        let parts: Vec<String> = counts.iter().map(|(k, n)| format!("{n} {k}")).collect();
        println!("{}", parts.join(", "));
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn report_cmd(before: &Path, after: Option<&Path>, format: ReportFormat, json: bool) -> Outcome {
    let before_set = load_set(before)?;
    let after_set = match after {
        Some(path) => load_set(path)?,
        None => apply_catalog(&before_set, CatalogOptions::default())?.set,
    };
    let fragments = before_set.catalog();
    if fragments.is_empty() {
        return Err(Failure::Input(format!("{} has no fragment catalog", before.display())));
    }
    let dup = duplication_report(&before_set, &after_set, fragments);
    let (sb, sa) = (summary(&before_set), summary(&after_set));
    let format = if json { ReportFormat::Json } else { format };
    match format {
        ReportFormat::Markdown => {
            println!("## Requirements\n\n{}", summary_markdown(&sb, &sa));
            print!("## Fragment definitions\n\n{}", duplication_markdown(&dup));
        }
        ReportFormat::Csv => {
            print!("{}\n{}", summary_csv(&sb, &sa), duplication_csv(&dup));
        }
        ReportFormat::Json => {
            print_json(&json!({"before": sb, "after": sa, "duplication": dup, "reduction": dup.reduction()}));
        }
    }
    Ok(())
}
