//! Command-line front end. Exit codes: 0 success or equivalent,
//! 1 not equivalent or a failed check, 2 unknown, 64 usage, 65 malformed
//! input, 66 unreadable file.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};
use num_bigint::{BigInt, BigUint};
use num_traits::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagram::{limit_leq, BratteliSequence, LimitContext, PeriodicTail};
use crate::equiv::{
    self, canonicalize_q, limit_cardinality, surjectivize, Canonicalization, CardinalityWitness, Claim, ClaimRecord,
    EquivVerdict, EquivalenceCertificate, IndexSystem, Justification,
};
use crate::format::{parse, serialize};
use crate::intertwine::{self, DiagonalMap, Recurrence, Strategy, UnitChangeCertificate};
use crate::par::Execution;
use crate::sample::{self, Shape};
use crate::simplicial::IntVector;
use crate::states::{distinct_image_vertices, Rational};
use crate::supernat::SupernaturalNumber;
use crate::tensor::{tensor_qn, tensor_seq};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NOINPUT: i32 = 66;

#[derive(Parser, Debug)]
#[command(name = "bratteli", version, about = "Exact computations with Bratteli diagrams and dimension groups")]
struct Cli {
    /// Run every check on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a diagram and report its shape.
    Validate { file: PathBuf },
    /// Keep only the listed levels (1-based, ascending, starting at 1).
    Telescope {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        keep: Vec<usize>,
    },
    /// Drop coordinates that die in the limit.
    Injectivize { file: PathBuf },
    /// Levelwise tensor product of two diagrams.
    Tensor { a: PathBuf, b: PathBuf },
    /// Tensor with the subgroup of ℚ of a supernatural number.
    Tensorq {
        file: PathBuf,
        #[arg(long)]
        n: String,
        #[arg(long)]
        depth: usize,
    },
    /// Build or check an order-unit change ladder.
    UnitChange {
        #[arg(required_unless_present = "verify")]
        file: Option<PathBuf>,
        /// New unit at level 1, comma separated.
        #[arg(long, value_delimiter = ',', required_unless_present = "verify")]
        unit: Vec<String>,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value = "minimal")]
        strategy: String,
        /// Re-verify a certificate instead.
        #[arg(long, conflicts_with_all = ["file", "unit"])]
        verify: Option<PathBuf>,
    },
    /// Images at a level of the extreme states of a deeper level.
    States {
        file: PathBuf,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        depth: usize,
        /// Also print lossy decimal approximations.
        #[arg(long)]
        decimal: bool,
    },
    /// Index system and diagonal conjugations after tensoring with ℚ.
    Canon { file: PathBuf },
    /// Decide A ⊗ ℚ ≅ B ⊗ ℚ by bounded search.
    Equiv {
        #[arg(required_unless_present = "verify")]
        a: Option<PathBuf>,
        #[arg(required_unless_present = "verify")]
        b: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, conflicts_with_all = ["a", "b"])]
        verify: Option<PathBuf>,
    },
    /// Randomized check that ∀n n·x ≤ y forces x ≤ 0.
    ArchCheck {
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
}

/// A failure that ends the command with an exit code.
#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    NoInput(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
            Failure::NoInput(_) => EXIT_NOINPUT,
        }
    }
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = std::result::Result<i32, Failure>;

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match dispatch(cli.command, exec, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {f}");
            f.code()
        }
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::NoInput(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> std::result::Result<BratteliSequence, Failure> {
    let text = read(path)?;
    parse(&text).map_err(|e| Failure::Data(format!("{}:{e}", path.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> Outcome {
    out.write_all(text.as_bytes()).map_err(|e| Failure::NoInput(e.to_string()))?;
    Ok(EXIT_OK)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data");
    s.push('\n');
    s
}

fn dispatch(command: Command, exec: Execution, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Validate { file } => {
            let seq = load(&file)?;
            let ranks: Vec<String> = seq.ranks().iter().map(|r| r.to_string()).collect();
            let mut line = format!("ok: {} levels, ranks {}", seq.len(), ranks.join(" "));
            if let Some(t) = seq.tail() {
                line.push_str(&format!(", repeats from level {}", t.start));
            }
            emit(out, &format!("{line}\n"))
        }
        Command::Telescope { file, keep } => {
            let seq = load(&file)?;
            emit(out, &serialize(&seq.telescope(&keep)?))
        }
        Command::Injectivize { file } => {
            let seq = load(&file)?;
            emit(out, &serialize(&seq.injectivize()?.seq))
        }
        Command::Tensor { a, b } => {
            let (a, b) = (load(&a)?, load(&b)?);
            emit(out, &serialize(&tensor_seq(&a, &b)?))
        }
        Command::Tensorq { file, n, depth } => {
            let seq = load(&file)?;
            let n: SupernaturalNumber = n.parse()?;
            emit(out, &serialize(&tensor_qn(&seq, &n, depth)?))
        }
        Command::UnitChange { file, unit, depth, strategy, verify } => match verify {
            Some(cert) => verify_unit_change(&read(&cert)?, exec, out),
            None => {
                let seq = load(file.as_deref().expect("required"))?;
                let w1 = parse_vector(&unit)?;
                let strategy = Strategy::from_str(&strategy).map_err(Failure::Usage)?;
                let cert = intertwine::unit_change(&seq, &w1, depth, strategy)?;
                if let Err(e) = intertwine::verify_certificate(&cert, exec) {
                    return Err(Failure::Data(format!("constructed ladder does not verify: {e}")));
                }
                emit(out, &json(&UnitChangeDoc::from_cert(&cert)))
            }
        },
        Command::States { file, level, depth, decimal } => {
            let seq = load(&file)?;
            let vertices = distinct_image_vertices(&seq, level, depth)?;
            let doc = StatesDoc {
                level,
                depth,
                vertices: vertices.iter().map(|v| strings(&v.0)).collect(),
                decimal_lossy: decimal.then(|| vertices.iter().map(|v| v.to_f64s()).collect()),
            };
            emit(out, &json(&doc))
        }
        Command::Canon { file } => {
            let seq = load(&file)?;
            let canon = canonicalize_q(&seq)?;
            let surj = surjectivize(&canon.index);
            let doc = CanonReport {
                canonical: CanonDoc::from_canon(&canon),
                surjective: IndexDoc::from_index(&surj),
                cardinality: limit_cardinality(&surj).to_string(),
            };
            emit(out, &json(&doc))
        }
        Command::Equiv { a, b, depth, verify } => match verify {
            Some(cert) => verify_equiv(&read(&cert)?, out),
            None => {
                let (a, b) = (load(a.as_deref().expect("required"))?, load(b.as_deref().expect("required"))?);
                let verdict = equiv::equivalent_q(&a, &b, depth, exec)?;
                emit(out, &json(&EquivDoc::from_verdict(&a, &b, depth, &verdict)))?;
                Ok(verdict.exit_code())
            }
        },
        Command::ArchCheck { samples, seed } => {
            let report = arch_check(samples, 20, seed);
            emit(out, &format!("{report}\n"))?;
            Ok(if report.failures == 0 { EXIT_OK } else { EXIT_FAIL })
        }
    }
}

fn parse_vector(items: &[String]) -> std::result::Result<IntVector, Failure> {
    items
        .iter()
        .map(|s| BigInt::from_str(s.trim()).map_err(|_| Failure::Usage(format!("not an integer: `{s}`"))))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(IntVector::new)
}

fn strings<T: ToString>(items: &[T]) -> Vec<String> {
    items.iter().map(|x| x.to_string()).collect()
}

fn parse_all<T: FromStr>(items: &[String]) -> std::result::Result<Vec<T>, Failure> {
    items
        .iter()
        .map(|s| s.parse().map_err(|_| Failure::Data(format!("malformed number `{s}`"))))
        .collect()
}

/// Result of [`arch_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchReport {
    pub pairs: usize,
    /// Pairs for which `∀n n·x ≤ y` held.
    pub premises: usize,
    pub failures: usize,
}

impl std::fmt::Display for ArchReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "checked {} pairs, {} with n·x ≤ y for all n, {} failures",
            self.pairs, self.premises, self.failures
        )
    }
}

/// Draws `samples` injective sequences and, for each, a `ℚ_n` version; on
/// both checks `pairs_each` random pairs for `∀n n·x ≤ y ⇒ x ≤ 0`.
pub fn arch_check(samples: usize, pairs_each: usize, seed: u64) -> ArchReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ArchReport { pairs: 0, premises: 0, failures: 0 };
    for _ in 0..samples {
        let seq = sample::injective_sequence(&mut rng, Shape::default()).injectivize().expect("valid").seq;
        let n = sample::supernatural(&mut rng);
        let depth = seq.len() + 2;
        let tensored = tensor_qn(&seq, &n, depth).expect("levels available");
        for s in [&seq, &tensored] {
            let levels = s.available_levels().unwrap_or(depth).min(depth);
            let ctx = LimitContext::new(s);
            for k in 0..pairs_each / 2 {
                let mut x = sample::element(&mut rng, s, levels, 4);
                // every other x is non-positive so the premise is met often
                if k % 2 == 0 {
                    x.vec = IntVector::new(x.vec.entries().iter().map(|e| -e.abs()).collect());
                }
                let y = sample::element(&mut rng, s, x.level, 4);
                let premise = ctx.forall_n_leq(&x, &y).expect("levels in range");
                let zero = ctx.zero_at(x.level).expect("level in range");
                report.pairs += 1;
                if premise {
                    report.premises += 1;
                    if !limit_leq(s, &x, &zero).expect("levels in range") {
                        report.failures += 1;
                    }
                }
            }
        }
    }
    report
}

#[derive(Serialize)]
struct StatesDoc {
    level: usize,
    depth: usize,
    vertices: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decimal_lossy: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
struct RecurrenceDoc {
    from: usize,
    period: usize,
    scalars: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct SupernaturalsDoc {
    n: String,
    m: String,
    exact: bool,
}

#[derive(Serialize, Deserialize)]
struct UnitChangeDoc {
    kind: String,
    sequence: String,
    w1: Vec<String>,
    strategy: String,
    m1: String,
    diagonals: Vec<Vec<String>>,
    scalars: Vec<String>,
    recurrence: Option<RecurrenceDoc>,
    supernaturals: Option<SupernaturalsDoc>,
}

impl UnitChangeDoc {
    fn from_cert(c: &UnitChangeCertificate) -> Self {
        Self {
            kind: "unit-change".into(),
            sequence: serialize(&c.seq),
            w1: strings(c.w1.entries()),
            strategy: c.strategy.to_string(),
            m1: c.m1.to_string(),
            diagonals: c.diagonals.iter().map(|d| strings(d.entries())).collect(),
            scalars: strings(&c.scalars),
            recurrence: c.recurrence.as_ref().map(|r| RecurrenceDoc {
                from: r.from,
                period: r.period,
                scalars: strings(&r.scalars),
            }),
            supernaturals: c.supernaturals().map(|s| SupernaturalsDoc {
                n: s.n.to_string(),
                m: s.m.to_string(),
                exact: s.exact,
            }),
        }
    }

    fn to_cert(&self) -> std::result::Result<UnitChangeCertificate, Failure> {
        let seq = parse(&self.sequence).map_err(|e| Failure::Data(format!("embedded sequence: {e}")))?;
        let diagonals = self
            .diagonals
            .iter()
            .map(|d| DiagonalMap::new(parse_all::<BigUint>(d)?).map_err(|e| Failure::Data(e.to_string())))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let recurrence = match &self.recurrence {
            None => None,
            Some(r) => Some(Recurrence { from: r.from, period: r.period, scalars: parse_all(&r.scalars)? }),
        };
        Ok(UnitChangeCertificate {
            seq,
            w1: IntVector::new(parse_all(&self.w1)?),
            strategy: Strategy::from_str(&self.strategy).map_err(Failure::Data)?,
            m1: self.m1.parse().map_err(|_| Failure::Data(format!("malformed number `{}`", self.m1)))?,
            diagonals,
            scalars: parse_all(&self.scalars)?,
            recurrence,
        })
    }
}

fn verify_unit_change(text: &str, exec: Execution, out: &mut dyn Write) -> Outcome {
    let doc: UnitChangeDoc = serde_json::from_str(text).map_err(|e| Failure::Data(format!("certificate: {e}")))?;
    if doc.kind != "unit-change" {
        return Err(Failure::Data(format!("expected a unit-change certificate, found `{}`", doc.kind)));
    }
    let cert = doc.to_cert()?;
    if let Err(e) = intertwine::verify_certificate(&cert, exec) {
        emit(out, &format!("rejected: {e}\n"))?;
        return Ok(EXIT_FAIL);
    }
    let claimed = doc.supernaturals.map(|s| (s.n, s.m, s.exact));
    let actual = cert.supernaturals().map(|s| (s.n.to_string(), s.m.to_string(), s.exact));
    if claimed != actual {
        emit(out, "rejected: reported supernaturals do not match the ladder\n")?;
        return Ok(EXIT_FAIL);
    }
    emit(out, &format!("verified: {} rungs\n", cert.depth()))
}

#[derive(Serialize, Deserialize, PartialEq, Eq)]
struct TailDoc {
    start: usize,
    types: Vec<usize>,
}

/// Node indices are 0-based.
#[derive(Serialize, Deserialize, PartialEq, Eq)]
struct IndexDoc {
    sizes: Vec<usize>,
    parents: Vec<Vec<usize>>,
    tail: Option<TailDoc>,
}

impl IndexDoc {
    fn from_index(idx: &IndexSystem) -> Self {
        Self {
            sizes: idx.sizes().to_vec(),
            parents: idx.parents().to_vec(),
            tail: idx.tail().map(|t| TailDoc { start: t.start, types: t.types.clone() }),
        }
    }

    fn to_index(&self) -> std::result::Result<IndexSystem, Failure> {
        let tail = self.tail.as_ref().map(|t| PeriodicTail { start: t.start, types: t.types.clone() });
        IndexSystem::new(self.sizes.clone(), self.parents.clone(), tail).map_err(|e| Failure::Data(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct CanonDoc {
    index: IndexDoc,
    diagonals: Vec<Vec<String>>,
}

impl CanonDoc {
    fn from_canon(c: &Canonicalization) -> Self {
        Self { index: IndexDoc::from_index(&c.index), diagonals: c.diagonals.iter().map(|d| strings(d)).collect() }
    }

    fn to_canon(&self) -> std::result::Result<Canonicalization, Failure> {
        let diagonals = self.diagonals.iter().map(|d| parse_all::<Rational>(d)).collect::<std::result::Result<_, _>>()?;
        Ok(Canonicalization { index: self.index.to_index()?, diagonals })
    }
}

#[derive(Serialize)]
struct CanonReport {
    canonical: CanonDoc,
    surjective: IndexDoc,
    cardinality: String,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
enum JustificationDoc {
    Bisimilar,
    Split { expand_a: usize, expand_b: usize, pieces: Vec<usize> },
}

#[derive(Serialize, Deserialize)]
struct ClaimDoc {
    a: Vec<usize>,
    b: Vec<usize>,
    #[serde(flatten)]
    justification: JustificationDoc,
}

#[derive(Serialize, Deserialize)]
struct EquivCertDoc {
    canon_a: CanonDoc,
    canon_b: CanonDoc,
    classes_a: Vec<usize>,
    classes_b: Vec<usize>,
    root: Vec<usize>,
    claims: Vec<ClaimDoc>,
}

#[derive(Serialize, Deserialize)]
struct WitnessDoc {
    cardinality_a: String,
    cardinality_b: String,
}

#[derive(Serialize, Deserialize)]
struct EquivDoc {
    kind: String,
    verdict: String,
    depth: usize,
    a: String,
    b: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    certificate: Option<EquivCertDoc>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    witness: Option<WitnessDoc>,
}

impl EquivDoc {
    fn from_verdict(a: &BratteliSequence, b: &BratteliSequence, depth: usize, v: &EquivVerdict) -> Self {
        let certificate = match v {
            EquivVerdict::Equivalent(c) => Some(EquivCertDoc {
                canon_a: CanonDoc::from_canon(&c.canon_a),
                canon_b: CanonDoc::from_canon(&c.canon_b),
                classes_a: c.classes_a.clone(),
                classes_b: c.classes_b.clone(),
                root: c.root.clone(),
                claims: c
                    .claims
                    .iter()
                    .map(|r| ClaimDoc {
                        a: r.claim.a.clone(),
                        b: r.claim.b.clone(),
                        justification: match &r.justification {
                            Justification::Bisimilar => JustificationDoc::Bisimilar,
                            Justification::Split { expand_a, expand_b, pieces } => JustificationDoc::Split {
                                expand_a: *expand_a,
                                expand_b: *expand_b,
                                pieces: pieces.clone(),
                            },
                        },
                    })
                    .collect(),
            }),
            _ => None,
        };
        let witness = match v {
            EquivVerdict::NotEquivalent(w) => {
                Some(WitnessDoc { cardinality_a: w.a.to_string(), cardinality_b: w.b.to_string() })
            }
            _ => None,
        };
        Self {
            kind: "equiv".into(),
            verdict: v.name().into(),
            depth,
            a: serialize(a),
            b: serialize(b),
            certificate,
            witness,
        }
    }
}

fn verify_equiv(text: &str, out: &mut dyn Write) -> Outcome {
    let doc: EquivDoc = serde_json::from_str(text).map_err(|e| Failure::Data(format!("certificate: {e}")))?;
    if doc.kind != "equiv" {
        return Err(Failure::Data(format!("expected an equiv certificate, found `{}`", doc.kind)));
    }
    let a = parse(&doc.a).map_err(|e| Failure::Data(format!("embedded A: {e}")))?;
    let b = parse(&doc.b).map_err(|e| Failure::Data(format!("embedded B: {e}")))?;
    match doc.verdict.as_str() {
        "equivalent" => {
            let c = doc.certificate.ok_or_else(|| Failure::Data("missing certificate".into()))?;
            let cert = EquivalenceCertificate {
                a,
                b,
                canon_a: c.canon_a.to_canon()?,
                canon_b: c.canon_b.to_canon()?,
                classes_a: c.classes_a,
                classes_b: c.classes_b,
                root: c.root,
                claims: c
                    .claims
                    .into_iter()
                    .map(|d| ClaimRecord {
                        claim: Claim { a: d.a, b: d.b },
                        justification: match d.justification {
                            JustificationDoc::Bisimilar => Justification::Bisimilar,
                            JustificationDoc::Split { expand_a, expand_b, pieces } => {
                                Justification::Split { expand_a, expand_b, pieces }
                            }
                        },
                    })
                    .collect(),
            };
            match equiv::verify_equivalence(&cert) {
                Ok(()) => emit(out, &format!("verified: equivalent, {} claims\n", cert.claims.len())),
                Err(e) => {
                    emit(out, &format!("rejected: {e}\n"))?;
                    Ok(EXIT_FAIL)
                }
            }
        }
        "not-equivalent" => {
            let w = doc.witness.ok_or_else(|| Failure::Data("missing witness".into()))?;
            let witness = recompute_witness(&a, &b);
            let matches = witness
                .as_ref()
                .is_some_and(|x| x.a.to_string() == w.cardinality_a && x.b.to_string() == w.cardinality_b);
            if matches && equiv::verify_witness(&a, &b, witness.as_ref().unwrap()) {
                emit(out, &format!("verified: not equivalent, cardinalities {} vs {}\n", w.cardinality_a, w.cardinality_b))
            } else {
                emit(out, "rejected: witness does not match the recomputed cardinalities\n")?;
                Ok(EXIT_FAIL)
            }
        }
        "unknown" => {
            emit(out, "unknown verdicts carry no certificate\n")?;
            Ok(EXIT_UNKNOWN)
        }
        other => Err(Failure::Data(format!("unknown verdict `{other}`"))),
    }
}

fn recompute_witness(a: &BratteliSequence, b: &BratteliSequence) -> Option<CardinalityWitness> {
    let ca = limit_cardinality(&surjectivize(&canonicalize_q(a).ok()?.index));
    let cb = limit_cardinality(&surjectivize(&canonicalize_q(b).ok()?.index));
    Some(CardinalityWitness { a: ca, b: cb })
}
