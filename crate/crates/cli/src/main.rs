use std::fs;
use std::io::{BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qcap_core::algebra_fp::{haemers_rank, monomial_count};
use qcap_core::alpha::{alpha_lower_via_power, max_independent_set, verify_independent, Budget};
use qcap_core::bitgraph::{BitGraph, Family, Graph};
use qcap_core::channel::{
    canonical_channel, confusability_graph, pentagon_channel, protocol_from_cert, run_trials, simulate_transmission,
    Channel,
};
use qcap_core::entcert::{cert_from_packing, classical_embedding, verify, CertExport, EntCert, VerifyReport};
use qcap_core::geometry::{
    clique_from_hadamard_g, clique_from_hadamard_h, ortho_rep_g, ortho_rep_h, pack_cliques, restricted_independent_set,
    CliquePacking, HadamardClique, OrthoRep, PackOptions, DEFAULT_PACKING_BUDGET,
};
use qcap_core::hadamard::{find_hadamard, is_prime, normalize, paley_one, sylvester, HadamardMatrix};
use qcap_core::report::{attach_artifacts, capacity_report, ArtifactNumbers};

#[derive(Parser)]
#[command(name = "qcap", version, about = "Zero-error capacity bounds for the G_n and H_n distance graphs")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Time budget for searches, in milliseconds.
    #[arg(long, global = true)]
    budget_ms: Option<u64>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GraphArgs {
    /// Graph such as G11, H_7, O4, C5 or K3.
    #[arg(long)]
    graph: Option<String>,
    /// Graph family (with --n).
    #[arg(long, value_enum, ignore_case = true)]
    family: Option<FamilyArg>,
    #[arg(long)]
    n: Option<usize>,
    /// Read the graph from a DIMACS edge file.
    #[arg(long)]
    dimacs: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    G,
    H,
    O,
    C,
    K,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dimacs,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Build a graph and print it.
    GenGraph {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_enum, default_value = "dimacs")]
        format: GraphFormat,
    },
    /// Construct and verify a Hadamard matrix.
    Hadamard {
        /// Any size covered by the Sylvester and Paley constructions.
        #[arg(long, conflicts_with_all = ["paley", "sylvester"])]
        size: Option<usize>,
        /// Paley construction for a prime q ≡ 3 (mod 4).
        #[arg(long, conflicts_with = "sylvester")]
        paley: Option<u64>,
        /// Sylvester construction of size 2^k.
        #[arg(long)]
        sylvester: Option<u32>,
        #[arg(long)]
        normalize: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: MatrixFormat,
    },
    /// Orthonormal representation of G_n or H_n.
    Orthorep {
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Clique of G_n or H_n read off a Hadamard matrix of size n + 1.
    Clique {
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Pack disjoint Hadamard cliques into G_n or H_n.
    Pack {
        #[command(flatten)]
        graph: GraphArgs,
        /// Candidate images to try.
        #[arg(long, default_value_t = DEFAULT_PACKING_BUDGET)]
        candidates: u64,
    },
    /// Build and verify an entanglement certificate.
    Cert {
        #[command(flatten)]
        graph: GraphArgs,
        /// Use the classical one-dimensional certificate of this independent set.
        #[arg(long, value_delimiter = ',')]
        set: Option<Vec<usize>>,
    },
    /// Re-verify a certificate file against a graph.
    VerifyCert {
        #[arg(long)]
        cert: PathBuf,
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Haemers fitting matrix over F_p and its rank.
    Haemers {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        p: Option<u32>,
        /// Write the matrix as a binary dump.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Independence number, optionally of a strong power.
    Alpha {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1)]
        power: usize,
    },
    /// Simulate the entanglement-assisted protocol on the canonical channel.
    ChannelSim {
        /// Graph, or `pentagon` for the five-cycle channel.
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Send one message and print its transcript.
        #[arg(long)]
        message: Option<usize>,
    },
    /// Exact bound comparison for n = 4p - 1.
    Report {
        #[arg(long, value_enum, ignore_case = true)]
        family: FamilyArg,
        #[arg(long)]
        p: u64,
    },
    /// Full chain for one graph: clique, packing, certificate, rank bound,
    /// independent sets, protocol and report.
    Pipeline {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
}

/// A verification that ran and failed; maps to exit code 2.
#[derive(Debug)]
struct VerificationFailed(String);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "verification failed: {}", self.0)
    }
}

impl std::error::Error for VerificationFailed {}

struct Outcome {
    body: String,
    failure: Option<String>,
}

impl Outcome {
    fn json(v: Value) -> Self {
        Self { body: serde_json::to_string_pretty(&v).expect("serializable") + "\n", failure: None }
    }

    fn text(s: String) -> Self {
        Self { body: s, failure: None }
    }

    fn failing(mut self, reason: Option<String>) -> Self {
        self.failure = reason;
        self
    }
}

impl FamilyArg {
    fn letter(self) -> char {
        match self {
            FamilyArg::G => 'G',
            FamilyArg::H => 'H',
            FamilyArg::O => 'O',
            FamilyArg::C => 'C',
            FamilyArg::K => 'K',
        }
    }
}

fn build_named(letter: char, n: usize) -> Result<BitGraph> {
    Ok(match letter.to_ascii_uppercase() {
        'G' => BitGraph::build_g(n)?,
        'H' => BitGraph::build_h(n)?,
        'O' => BitGraph::build_orthogonality(n)?,
        'C' => BitGraph::build_cycle(n)?,
        'K' => BitGraph::complete(n)?,
        other => bail!("unknown graph family `{other}`"),
    })
}

fn parse_graph_ref(s: &str) -> Result<BitGraph> {
    let mut chars = s.chars();
    let letter = chars.next().ok_or_else(|| anyhow!("empty graph name"))?;
    let rest = chars.as_str().trim_start_matches('_');
    let n: usize = rest.parse().with_context(|| format!("graph `{s}` should look like G11, H_7 or C5"))?;
    build_named(letter, n)
}

impl GraphArgs {
    fn resolve(&self) -> Result<BitGraph> {
        match (&self.graph, self.family, self.n, &self.dimacs) {
            (Some(g), None, None, None) => parse_graph_ref(g),
            (None, Some(f), Some(n), None) => build_named(f.letter(), n),
            (None, None, None, Some(path)) => {
                let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
                let name = path.file_stem().map_or("dimacs".into(), |s| s.to_string_lossy().into_owned());
                Ok(BitGraph::from_dimacs(BufReader::new(file), name)?)
            }
            _ => bail!("give exactly one of --graph, --family with --n, or --dimacs"),
        }
    }
}

fn budget(cli_ms: Option<u64>, default_ms: Option<u64>) -> Budget {
    match cli_ms.or(default_ms) {
        Some(ms) => Budget::millis(ms),
        None => Budget::unlimited(),
    }
}

fn hadamard_for(g: &BitGraph) -> Result<HadamardMatrix> {
    let size = g.n() + 1;
    find_hadamard(size).ok_or_else(|| anyhow!("no covered Hadamard construction of size {size}"))
}

fn clique_for(g: &BitGraph) -> Result<(HadamardMatrix, HadamardClique)> {
    let h = hadamard_for(g)?;
    let clique = match g.family() {
        Family::G => clique_from_hadamard_g(&h)?,
        Family::H => clique_from_hadamard_h(&h)?,
        _ => bail!("{} is not a G_n or H_n graph", g.name()),
    };
    Ok((h, clique))
}

fn representation(g: &BitGraph) -> Result<OrthoRep> {
    Ok(match g.family() {
        Family::G => ortho_rep_g(g)?.0,
        Family::H => ortho_rep_h(g)?,
        _ => bail!("{} is not a G_n or H_n graph", g.name()),
    })
}

fn packing_for(g: &BitGraph, seed: u64, candidates: u64) -> Result<CliquePacking> {
    let (_, clique) = clique_for(g)?;
    let opts = PackOptions { budget: candidates, seed, stop_at_target: true };
    Ok(pack_cliques(g, &clique.vertices()?, opts)?)
}

/// Hadamard packing certificate for `G_n`/`H_n`, classical certificate from a
/// maximum independent set otherwise.
fn certificate_for(g: &BitGraph, cli: &Cli, set: Option<&[usize]>) -> Result<(EntCert, VerifyReport, &'static str)> {
    if let Some(set) = set {
        let (c, r) = classical_embedding(g, set)?;
        return Ok((c, r, "independent-set"));
    }
    match g.family() {
        Family::G | Family::H => {
            let packing = packing_for(g, cli.seed, DEFAULT_PACKING_BUDGET)?;
            let (c, r) = cert_from_packing(&representation(g)?, &packing, g)?;
            Ok((c, r, "clique-packing"))
        }
        _ => {
            let mis = max_independent_set(g, budget(cli.budget_ms, None), None)?;
            let (c, r) = classical_embedding(g, &mis.witness)?;
            Ok((c, r, "independent-set"))
        }
    }
}

macro_rules! to_value {
    ($e:expr) => {
        serde_json::to_value($e).expect("serializable")
    };
}

fn cmd_gen_graph(graph: &GraphArgs, format: GraphFormat) -> Result<Outcome> {
    let g = graph.resolve()?;
    Ok(match format {
        GraphFormat::Dimacs => Outcome::text(g.to_dimacs()),
        GraphFormat::Json => Outcome::json(json!({
            "descriptor": to_value!(&g.descriptor()),
            "vertices": (0..g.vertex_count()).map(|v| g.vertex_label(v)).collect::<Vec<_>>(),
            "edges": g.edges(),
        })),
    })
}

fn cmd_hadamard(
    size: Option<usize>,
    paley: Option<u64>,
    syl: Option<u32>,
    norm: bool,
    format: MatrixFormat,
) -> Result<Outcome> {
    let h = match (size, paley, syl) {
        (Some(m), None, None) => find_hadamard(m).ok_or_else(|| anyhow!("no covered Hadamard construction of size {m}"))?,
        (None, Some(q), None) => paley_one(q)?,
        (None, None, Some(k)) => sylvester(k)?,
        _ => bail!("give one of --size, --paley or --sylvester"),
    };
    let h = if norm { normalize(&h) } else { h };
    if !h.verify() {
        return Err(VerificationFailed(format!("{} is not a Hadamard matrix", h.construction())).into());
    }
    Ok(match format {
        MatrixFormat::Text => Outcome::text(h.to_text()),
        MatrixFormat::Json => Outcome::json(json!({
            "construction": h.construction(),
            "verified": true,
            "matrix": to_value!(&h.export()),
        })),
    })
}

fn cmd_orthorep(graph: &GraphArgs) -> Result<Outcome> {
    let g = graph.resolve()?;
    let rep = representation(&g)?;
    rep.verify(&g, 100_000, 0).map_err(|e| VerificationFailed(e.to_string()))?;
    Ok(Outcome::json(json!({
        "representation": to_value!(&rep),
        "hyperplane": to_value!(&rep.hyperplane_check()),
        "verified": true,
    })))
}

fn cmd_clique(graph: &GraphArgs) -> Result<Outcome> {
    let g = graph.resolve()?;
    let (h, clique) = clique_for(&g)?;
    Ok(Outcome::json(json!({
        "graph": g.name(),
        "hadamard": h.construction(),
        "size": clique.len(),
        "members": clique.members.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
        "verified": true,
    })))
}

fn cmd_pack(graph: &GraphArgs, cli: &Cli, candidates: u64) -> Result<Outcome> {
    let g = graph.resolve()?;
    let packing = packing_for(&g, cli.seed, candidates)?;
    Ok(Outcome::json(to_value!(&packing.export(&g))))
}

fn cmd_cert(graph: &GraphArgs, cli: &Cli, set: Option<&[usize]>) -> Result<Outcome> {
    let g = graph.resolve()?;
    let (cert, report, _) = certificate_for(&g, cli, set)?;
    Ok(Outcome::json(to_value!(&cert.export(&g, Some(report)))))
}

fn cmd_verify_cert(path: &PathBuf, graph: &GraphArgs) -> Result<Outcome> {
    let g = graph.resolve()?;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let export: CertExport = serde_json::from_str(&text).context("parsing certificate JSON")?;
    let cert = EntCert::from_export(&export)?;
    let report = verify(&cert, &g);
    let failure = report.first_failure().map(|(c, w)| format!("{c}: {w}"));
    Ok(Outcome::json(to_value!(&report)).failing(failure))
}

fn prime_for(g: &BitGraph, p: Option<u32>) -> Result<u32> {
    if let Some(p) = p {
        return Ok(p);
    }
    let n = g.n() as u32;
    if (n + 1).is_multiple_of(4) && is_prime(((n + 1) / 4) as u64) {
        Ok((n + 1) / 4)
    } else {
        bail!("n = {n} is not 4p - 1 for a prime p; pass --p")
    }
}

fn cmd_haemers(graph: &GraphArgs, p: Option<u32>, dump: Option<&PathBuf>) -> Result<Outcome> {
    let g = graph.resolve()?;
    let p = prime_for(&g, p)?;
    let (report, a) = haemers_rank(&g, p)?;
    if let Some(path) = dump {
        fs::write(path, a.to_bytes()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(Outcome::json(to_value!(&report)))
}

fn cmd_alpha(graph: &GraphArgs, cli: &Cli, power: usize) -> Result<Outcome> {
    let g = graph.resolve()?;
    let b = budget(cli.budget_ms, None);
    let (pb, power_graph) = alpha_lower_via_power(Arc::new(g), power, b)?;
    let mut v = to_value!(&pb.result.export(power_graph.as_ref()));
    v["power"] = json!(power);
    v["rate"] = json!({"value": pb.value, "root": power, "approx": pb.rate()});
    Ok(Outcome::json(v))
}

fn channel_and_graph(graph: &GraphArgs) -> Result<(Channel, BitGraph)> {
    if graph.graph.as_deref() == Some("pentagon") {
        let c = pentagon_channel();
        let g = confusability_graph(&c)?;
        return Ok((c, g));
    }
    let g = graph.resolve()?;
    Ok((canonical_channel(&g)?, g))
}

fn cmd_channel_sim(graph: &GraphArgs, cli: &Cli, trials: usize, message: Option<usize>) -> Result<Outcome> {
    let (channel, g) = channel_and_graph(graph)?;
    let (cert, _, source) = certificate_for(&g, cli, None)?;
    let (protocol, check) = protocol_from_cert(&cert, &channel)?;
    if let Some(i) = message {
        let t = simulate_transmission(&protocol, &channel, i, cli.seed)?;
        let ok = t.decoded == t.message;
        return Ok(Outcome::json(json!({
            "graph": g.name(),
            "messages": protocol.messages,
            "dim": protocol.dim,
            "check": to_value!(&check),
            "transcript": to_value!(&t),
        }))
        .failing((!ok).then(|| format!("message {i} decoded as {}", t.decoded))));
    }
    let summary = run_trials(&protocol, &channel, trials, cli.seed)?;
    let failure = (summary.failures > 0).then(|| format!("{} failed trials", summary.failures));
    Ok(Outcome::json(json!({
        "graph": g.name(),
        "certificate": source,
        "messages": protocol.messages,
        "dim": protocol.dim,
        "check": to_value!(&check),
        "summary": to_value!(&summary),
    }))
    .failing(failure))
}

fn report_family(f: FamilyArg) -> Result<Family> {
    match f {
        FamilyArg::G => Ok(Family::G),
        FamilyArg::H => Ok(Family::H),
        _ => bail!("reports exist for the G and H families only"),
    }
}

fn cmd_report(family: FamilyArg, p: u64) -> Result<Outcome> {
    let r = capacity_report(report_family(family)?, p)?;
    Ok(Outcome::json(to_value!(&r)))
}

fn cmd_pipeline(graph: &GraphArgs, cli: &Cli, trials: usize) -> Result<Outcome> {
    let g = graph.resolve()?;
    if !matches!(g.family(), Family::G | Family::H) {
        bail!("the pipeline runs on G_n or H_n");
    }
    let mut failures = Vec::new();
    let (h, clique) = clique_for(&g)?;
    let rep = representation(&g)?;
    let packing = packing_for(&g, cli.seed, DEFAULT_PACKING_BUDGET)?;
    let (cert, cert_report) = cert_from_packing(&rep, &packing, &g)?;
    let channel = canonical_channel(&g)?;
    let (protocol, check) = protocol_from_cert(&cert, &channel)?;
    let summary = run_trials(&protocol, &channel, trials, cli.seed)?;
    if summary.failures > 0 {
        failures.push(format!("{} failed protocol trials", summary.failures));
    }

    let mut out = json!({
        "graph": to_value!(&g.descriptor()),
        "hadamard": {"size": h.size(), "construction": h.construction(), "verified": h.verify()},
        "clique": {"size": clique.len(), "verified": true},
        "packing": {
            "count": packing.count(), "target": packing.target,
            "target_met": packing.target_met, "candidates_tried": packing.candidates_tried,
        },
        "certificate": {"M": cert.m, "dim": cert.dim, "denominator": cert.denominator, "verification": to_value!(&cert_report)},
        "protocol": {"check": to_value!(&check), "trials": to_value!(&summary)},
    });

    let n = g.n();
    let mut initial = None;
    if g.family() == Family::G {
        let set = restricted_independent_set(n, None)?;
        let idx: Vec<usize> = set.vertices.iter().filter_map(|v| g.index_of(v)).collect();
        let ok = set.verified && idx.len() == set.vertices.len() && verify_independent(&g, &idx).0;
        if !ok {
            failures.push("restricted set is not independent".into());
        }
        out["restricted_set"] = json!({"k": set.k, "size": idx.len(), "verified": ok});
        initial = Some(idx);
    }
    let mis = max_independent_set(&g, budget(cli.budget_ms, Some(2000)), initial.as_deref())?;
    out["alpha"] = json!({"lower": mis.lower, "upper": mis.upper, "exact": mis.exact, "nodes": mis.nodes});

    let p = (n + 1) / 4;
    if (n + 1) % 4 == 0 && is_prime(p as u64) && p > 2 {
        let (rank, _) = haemers_rank(&g, p as u32)?;
        out["haemers"] = to_value!(&rank);
        out["sandwich"] = json!({"lower": mis.lower, "upper": mis.upper.min(rank.rank)});
        let mut report = capacity_report(g.family(), p as u64)?;
        let numbers = ArtifactNumbers {
            vertex_count: g.vertex_count(),
            clique_size: clique.len(),
            certified_messages: cert.m,
            rank: rank.rank,
            monomial_count: monomial_count(n, p as u32) as usize,
        };
        let refs = vec![
            format!("hadamard:{}", h.construction()),
            format!("packing:{}x{}", packing.count(), packing.clique_size),
            format!("certificate:M={}", cert.m),
            format!("rank:{}<={}", rank.rank, rank.bound),
        ];
        let mismatches = attach_artifacts(&mut report, &numbers, refs);
        failures.extend(mismatches);
        out["report"] = to_value!(&report);
    }
    let failure = (!failures.is_empty()).then(|| failures.join("; "));
    Ok(Outcome::json(out).failing(failure))
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::GenGraph { graph, format } => cmd_gen_graph(graph, *format),
        Command::Hadamard { size, paley, sylvester, normalize, format } => {
            cmd_hadamard(*size, *paley, *sylvester, *normalize, *format)
        }
        Command::Orthorep { graph } => cmd_orthorep(graph),
        Command::Clique { graph } => cmd_clique(graph),
        Command::Pack { graph, candidates } => cmd_pack(graph, cli, *candidates),
        Command::Cert { graph, set } => cmd_cert(graph, cli, set.as_deref()),
        Command::VerifyCert { cert, graph } => cmd_verify_cert(cert, graph),
        Command::Haemers { graph, p, dump } => cmd_haemers(graph, *p, dump.as_ref()),
        Command::Alpha { graph, power } => cmd_alpha(graph, cli, *power),
        Command::ChannelSim { graph, trials, message } => cmd_channel_sim(graph, cli, *trials, *message),
        Command::Report { family, p } => cmd_report(*family, *p),
        Command::Pipeline { graph, trials } => cmd_pipeline(graph, cli, *trials),
    }
}

/// Exit code for an error: 2 when a check ran and failed, 1 otherwise.
fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<VerificationFailed>().is_some() {
        return 2;
    }
    match e.downcast_ref::<qcap_core::Error>() {
        Some(
            qcap_core::Error::Certificate { .. }
            | qcap_core::Error::Protocol(_)
            | qcap_core::Error::Internal(_)
            | qcap_core::Error::Construction(_),
        ) => 2,
        _ => 1,
    }
}

fn emit(cli: &Cli, body: &str) -> Result<()> {
    match &cli.output {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(body.as_bytes()).and_then(|_| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            if let Err(e) = emit(&cli, &outcome.body) {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
            match outcome.failure {
                Some(reason) => {
                    eprintln!("verification failed: {reason}");
                    ExitCode::from(2)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
