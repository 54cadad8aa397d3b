use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use fibertype::affine::{affine_corpus, affine_ss_check, intersection_poset, AffineArrangement};
use fibertype::families::{
    classical, deck_action, dowling_poset, finite_index_rewrite, graphic_arrangement, Classical,
    FiniteGroupTable, SimpleGraph,
};
use fibertype::formats::{
    affine_doc, arrangement_doc, certificate_doc, int_to_json, layer_poset_doc, parse_affine,
    parse_arrangement, parse_certificate, parse_graph, parse_group, parse_poset_input,
    parse_sublattice, poly_to_json, poset_doc, to_pretty, PosetInput, FORMAT,
};
use fibertype::invariants::{charpoly_factored, lcs_ranks, poincare_checked};
use fibertype::layers::{build_layers, Arrangement};
use fibertype::poset::FinitePoset;
use fibertype::ssolv::{
    strictly_supersolvable_chain, supersolvable_chain, tower_report, verify_chain, IdealChain,
    TowerReport,
};

#[derive(Parser)]
#[command(
    name = "fibertype",
    version,
    about = "Posets of layers, supersolvability and fiber-type towers"
)]
struct Cli {
    /// Worker threads for enumeration (0 picks the number of cores).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Poset of layers of an arrangement.
    Layers {
        input: PathBuf,
        /// Emit the Hasse diagram as DOT instead of JSON.
        #[arg(long)]
        dot: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a (strictly) supersolvable chain.
    Ssolve {
        input: PathBuf,
        /// Only accept chains of TM-ideals.
        #[arg(long)]
        strict: bool,
    },
    /// Fiber-type tower of an arrangement.
    Tower { input: PathBuf },
    /// Characteristic polynomial, Poincaré polynomial and LCS ranks.
    Invariants {
        input: PathBuf,
        #[arg(long, default_value_t = 5)]
        jmax: usize,
    },
    /// Re-check a certificate against an arrangement or poset.
    Verify {
        certificate: PathBuf,
        input: PathBuf,
    },
    /// Emit example inputs.
    Gen {
        #[command(subcommand)]
        family: GenCommand,
    },
    /// Compare supersolvability upstairs, downstairs and on the deck quotient.
    QuotientCheck { input: PathBuf, sublattice: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphShape {
    Complete,
    Cycle,
    Path,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Graphic arrangement of a graph file or a named shape.
    Graphic {
        #[arg(long, conflicts_with = "shape")]
        graph: Option<PathBuf>,
        #[arg(long, value_enum)]
        shape: Option<GraphShape>,
        #[arg(long, default_value_t = 3)]
        vertices: usize,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        v: usize,
    },
    /// Dowling poset over a cyclic group or a group file.
    Dowling {
        #[arg(long)]
        n: usize,
        #[arg(long, conflicts_with = "cyclic")]
        group: Option<PathBuf>,
        /// Order of a cyclic group acting trivially on `--points` points.
        #[arg(long, default_value_t = 1)]
        cyclic: usize,
        #[arg(long, default_value_t = 0)]
        points: usize,
    },
    /// Partition lattice of an n-set.
    Partition { n: usize },
    /// Boolean lattice of an n-set.
    Boolean { n: usize },
    /// Affine arrangement from the built-in corpus.
    Affine {
        /// Corpus entry; omit to list the names.
        name: Option<String>,
        /// Emit the intersection poset instead of the arrangement.
        #[arg(long)]
        intersection_poset: bool,
    },
}

/// Failure of a check, as opposed to bad input.
#[derive(Debug)]
struct VerificationFailed(String);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for VerificationFailed {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<VerificationFailed>() => {
            eprintln!("verification failed: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Layers { input, dot, out } => {
            let a = parse_arrangement(&read(&input)?)?;
            let lp = build_layers(&a)?;
            let text = if dot {
                lp.poset.to_dot()
            } else {
                to_pretty(&layer_poset_doc(&lp))
            };
            emit(&text, out.as_deref())
        }
        Command::Ssolve { input, strict } => ssolve(&read(&input)?, strict),
        Command::Tower { input } => {
            let a = parse_arrangement(&read(&input)?)?;
            let r = tower_report(&a)?;
            print!("{}", render_tower(&a, &r));
            Ok(())
        }
        Command::Invariants { input, jmax } => invariants(&read(&input)?, jmax),
        Command::Verify { certificate, input } => {
            let chain = parse_certificate(&read(&certificate)?)?;
            let p = load_poset(&read(&input)?)?;
            match verify_chain(&p, &chain) {
                Ok(()) => {
                    println!("certificate verified");
                    Ok(())
                }
                Err(v) => Err(VerificationFailed(v.to_string()).into()),
            }
        }
        Command::Gen { family } => generate(family),
        Command::QuotientCheck { input, sublattice } => {
            quotient_check(&read(&input)?, &read(&sublattice)?)
        }
    }
}

fn load_poset(text: &str) -> Result<FinitePoset> {
    Ok(match parse_poset_input(text)? {
        PosetInput::Arrangement(a) => build_layers(&a)?.poset,
        PosetInput::Poset(p) => p,
    })
}

fn find_chain(p: &FinitePoset, strict_only: bool) -> Result<Option<IdealChain>> {
    if let Some(c) = strictly_supersolvable_chain(p)? {
        return Ok(Some(c));
    }
    if strict_only {
        return Ok(None);
    }
    Ok(supersolvable_chain(p)?)
}

fn ssolve(text: &str, strict: bool) -> Result<()> {
    let v: Value = serde_json::from_str(text)?;
    if v.get("hyperplanes").is_some() {
        let a = parse_affine(text)?;
        let verdict = affine_ss_check(&a)?;
        let ip = intersection_poset(&a)?;
        let chain = find_chain(&ip.poset, strict)?;
        let doc = json!({
            "format": FORMAT,
            "supersolvable": verdict.ss,
            "cone_supersolvable_through_h0": verdict.cone_ss_through_h0,
            "certificate": chain.as_ref().map(|c| serde_json::to_value(certificate_doc(c)).expect("serializable")),
        });
        print!("{}", to_pretty(&doc));
        return Ok(());
    }
    let p = load_poset(text)?;
    match find_chain(&p, strict)? {
        Some(c) => print!("{}", to_pretty(&certificate_doc(&c))),
        None => {
            let what = if strict {
                "strictly supersolvable"
            } else {
                "supersolvable"
            };
            let doc = json!({
                "format": FORMAT,
                "supersolvable": false,
                "note": format!("not {what}: every corank-one candidate ideal was tried at every level"),
            });
            print!("{}", to_pretty(&doc));
        }
    }
    Ok(())
}

fn invariants(text: &str, jmax: usize) -> Result<()> {
    let input = parse_poset_input(text)?;
    let (p, ambient) = match input {
        PosetInput::Arrangement(a) => (build_layers(&a)?.poset, Some(a.ambient)),
        PosetInput::Poset(p) => (p, None),
    };
    let chi = p.char_poly()?;
    let mut doc = serde_json::Map::new();
    doc.insert("format".into(), json!(FORMAT));
    doc.insert("charpoly".into(), poly_to_json(&chi));
    doc.insert("charpoly_text".into(), json!(chi.to_string()));
    let Some(chain) = strictly_supersolvable_chain(&p)? else {
        doc.insert(
            "note".into(),
            json!(
                "no chain of TM-ideals; the factorization, Poincaré and LCS formulas do not apply"
            ),
        );
        print!("{}", to_pretty(&Value::Object(doc)));
        return Ok(());
    };
    let f = charpoly_factored(&p, &chain)?;
    let a: Vec<BigInt> = f.roots.clone();
    doc.insert(
        "a".into(),
        Value::Array(a.iter().map(int_to_json).collect()),
    );
    let Some(amb) = ambient else {
        print!("{}", to_pretty(&Value::Object(doc)));
        return Ok(());
    };
    if amb.v == 0 {
        doc.insert(
            "poincare_note".into(),
            json!("Poincaré polynomial requires v > 0"),
        );
    } else {
        let pp = poincare_checked(&a, &chi, amb.d, amb.v)?;
        doc.insert("poincare".into(), poly_to_json(&pp));
        doc.insert("poincare_text".into(), json!(pp.to_string()));
    }
    if (amb.d, amb.v) == (1, 1) {
        let phi = lcs_ranks(&a, jmax)?;
        doc.insert(
            "lcs_ranks".into(),
            Value::Array(phi.iter().map(int_to_json).collect()),
        );
    } else {
        doc.insert(
            "lcs_note".into(),
            json!("LCS ranks require d = 1 and v = 1"),
        );
    }
    print!("{}", to_pretty(&Value::Object(doc)));
    Ok(())
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

fn render_tower(a: &Arrangement, r: &TowerReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "arrangement: n = {}, d = {}, v = {}, {} vectors",
        r.n,
        r.d,
        r.v,
        a.len()
    );
    let _ = writeln!(s, "essential: {}", yes(r.essential));
    let _ = writeln!(s, "irredundant: {}", yes(r.irredundant));
    let _ = writeln!(s, "supersolvable: {}", yes(r.supersolvable));
    let _ = writeln!(
        s,
        "strictly supersolvable: {}",
        yes(r.strictly_supersolvable)
    );
    if let Some(c) = &r.chain {
        let sets: Vec<String> = c
            .atom_sets
            .iter()
            .map(|x| format!("{{{}}}", join(x)))
            .collect();
        let _ = writeln!(s, "chain: {}", sets.join(" < "));
        let _ = writeln!(s, "a: [{}]", join(&r.a));
        let _ = writeln!(s, "ell: [{}]", join(&r.ell));
        let _ = writeln!(s, "tower:");
        for st in &r.steps {
            let vecs: Vec<String> = st
                .vectors
                .iter()
                .map(|v| format!("({})", join(v)))
                .collect();
            let ker: Vec<String> = st.kernel.iter().map(|v| format!("({})", join(v))).collect();
            let _ = writeln!(
                s,
                "  level {}: vectors [{}], kernel <{}>, c = [{}], fiber G minus {} point{}, atoms added {}",
                st.level,
                vecs.join(", "),
                ker.join(", "),
                join(&st.c_values),
                st.punctures,
                if st.punctures == BigInt::from(1) { "" } else { "s" },
                st.atoms_added
            );
        }
        let _ = writeln!(s, "fiber-type: {}", yes(r.fiber_type));
        let _ = writeln!(s, "K(pi,1): {}", yes(r.kpi1));
        let _ = writeln!(
            s,
            "Fadell-Neuwirth pullback: {}",
            yes(r.fadell_neuwirth_pullback)
        );
        let _ = writeln!(s, "section: {}", yes(r.section));
        match &r.pi1_free_ranks {
            Some(ranks) => {
                let _ = writeln!(
                    s,
                    "pi1: iterated semidirect product of free groups of ranks [{}]",
                    join(ranks)
                );
            }
            None => {
                let _ = writeln!(s, "pi1: not determined");
            }
        }
    }
    for n in &r.notes {
        let _ = writeln!(s, "note: {n}");
    }
    s
}

fn generate(family: GenCommand) -> Result<()> {
    match family {
        GenCommand::Graphic {
            graph,
            shape,
            vertices,
            d,
            v,
        } => {
            let g = match (graph, shape) {
                (Some(path), _) => parse_graph(&read(&path)?)?,
                (None, Some(GraphShape::Complete)) => SimpleGraph::complete(vertices),
                (None, Some(GraphShape::Cycle)) => SimpleGraph::cycle(vertices),
                (None, Some(GraphShape::Path)) => SimpleGraph::path(vertices),
                (None, None) => bail!("give --graph <file> or --shape"),
            };
            print!(
                "{}",
                to_pretty(&arrangement_doc(&graphic_arrangement(&g, d, v)?))
            );
        }
        GenCommand::Dowling {
            n,
            group,
            cyclic,
            points,
        } => {
            let g = match group {
                Some(path) => parse_group(&read(&path)?)?,
                None => {
                    if cyclic == 0 {
                        bail!("--cyclic must be at least 1");
                    }
                    FiniteGroupTable::cyclic(cyclic, points)
                }
            };
            print!("{}", to_pretty(&poset_doc(&dowling_poset(n, &g)?)));
        }
        GenCommand::Partition { n } => {
            print!(
                "{}",
                to_pretty(&poset_doc(&classical(Classical::Partition, n)?))
            )
        }
        GenCommand::Boolean { n } => {
            print!(
                "{}",
                to_pretty(&poset_doc(&classical(Classical::Boolean, n)?))
            )
        }
        GenCommand::Affine {
            name,
            intersection_poset: as_poset,
        } => {
            let corpus = affine_corpus();
            let Some(name) = name else {
                for (n, _) in &corpus {
                    println!("{n}");
                }
                return Ok(());
            };
            let a: &AffineArrangement = &corpus
                .iter()
                .find(|(n, _)| *n == name)
                .ok_or_else(|| anyhow!("no corpus entry named {name}"))?
                .1;
            if as_poset {
                print!("{}", to_pretty(&poset_doc(&intersection_poset(a)?.poset)));
            } else {
                print!("{}", to_pretty(&affine_doc(a)));
            }
        }
    }
    Ok(())
}

fn quotient_check(arr: &str, sub: &str) -> Result<()> {
    let a = parse_arrangement(arr)?;
    let basis = parse_sublattice(sub)?;
    let up = build_layers(&a)?;
    let down = build_layers(&finite_index_rewrite(&a, &basis)?)?;
    let gens = deck_action(&up, &basis)?;
    let q = up
        .poset
        .quotient(&gens)
        .map_err(|e| VerificationFailed(format!("deck quotient: {e}")))?;
    let iso = q.poset.find_isomorphism(&down.poset).is_some();
    let joins = q.check_join_formula(&up.poset);
    let ss_up = supersolvable_chain(&up.poset)?.is_some();
    let ss_down = supersolvable_chain(&down.poset)?.is_some();
    let ss_quot = supersolvable_chain(&q.poset)?.is_some();
    let doc = json!({
        "format": FORMAT,
        "upstairs_elements": up.poset.len(),
        "downstairs_elements": down.poset.len(),
        "deck_generators": gens.len(),
        "orbits": q.orbits.len(),
        "quotient_isomorphic_to_downstairs": iso,
        "local_isomorphisms": true,
        "join_formula": joins.is_ok(),
        "supersolvable_upstairs": ss_up,
        "supersolvable_downstairs": ss_down,
        "supersolvable_quotient": ss_quot,
    });
    print!("{}", to_pretty(&doc));
    if !iso || joins.is_err() || ss_up != ss_down || ss_down != ss_quot {
        return Err(VerificationFailed("quotient report shows a disagreement".into()).into());
    }
    Ok(())
}
