use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "concordia", version, about = "Schema matching workbench")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a DDL, XSD or canonical file into a canonical schema file.
    Ingest(IngestArgs),
    /// Score every element pair of two schemata and start a session.
    Match(MatchArgs),
    /// List, suggest or assign concept labels for one schema.
    Summarize(SummarizeArgs),
    /// Print the incremental link list for one concept.
    Review(ReviewArgs),
    /// Record an accept/reject decision on one element pair.
    Decide(DecideArgs),
    /// Partition, vocabulary, clustering and search reports.
    Analyze(AnalyzeArgs),
    /// Write a concept sheet, element sheet or match matrix as CSV.
    Export(ExportArgs),
    /// Serve the sessions of a directory over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Ddl,
    Xsd,
    Canonical,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    pub file: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: PathBuf,
    /// Schema id (defaults to the file stem).
    #[arg(long)]
    pub id: Option<String>,
    /// Display name (defaults to the file stem).
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    /// Canonical schema file.
    pub left: PathBuf,
    /// Canonical schema file.
    pub right: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Session file to create.
    #[arg(long)]
    pub out: PathBuf,
    /// Session id (defaults to the output file stem).
    #[arg(long)]
    pub id: Option<String>,
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    pub session: PathBuf,
    #[arg(long)]
    pub schema: String,
    /// Print suggested concepts (depth-1 containers, largest first).
    #[arg(long, conflicts_with = "assign")]
    pub suggest: bool,
    /// With --suggest: assign every suggestion as a concept.
    #[arg(long, requires = "suggest")]
    pub apply: bool,
    /// `<concept>=<element-id>,...`; repeatable.
    #[arg(long, value_name = "CONCEPT=IDS")]
    pub assign: Vec<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ReviewArgs {
    pub session: PathBuf,
    /// Concept id, `<schema>/<name>`.
    #[arg(long)]
    pub concept: String,
    #[arg(long, allow_hyphen_values = true)]
    pub min_score: Option<f64>,
    /// Opposing schema, needed when the concept's schema has several matrices.
    #[arg(long)]
    pub against: Option<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatusArg {
    Accepted,
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnnotationArg {
    Equivalent,
    #[value(name = "is-a")]
    IsA,
    #[value(name = "part-of")]
    PartOf,
    Related,
    None,
}

#[derive(Debug, Args)]
pub struct DecideArgs {
    pub session: PathBuf,
    /// `<left-id>:<right-id>`.
    #[arg(long)]
    pub pair: String,
    #[arg(long, value_enum)]
    pub status: StatusArg,
    #[arg(long, value_enum, default_value = "equivalent")]
    pub annotation: AnnotationArg,
    #[arg(long, env = "USER", default_value = "unknown")]
    pub author: String,
    #[arg(long, default_value = "")]
    pub assignee: String,
    /// Decision time (RFC 3339); defaults to now.
    #[arg(long)]
    pub at: Option<String>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("report").required(true).args(["partition", "vocabulary", "cluster", "search"])))]
#[group(skip)]
pub struct AnalyzeArgs {
    pub session: PathBuf,
    #[arg(long)]
    pub partition: bool,
    /// Further sessions whose schemata join the vocabulary.
    #[arg(long, num_args = 0.., value_name = "SESSION")]
    pub vocabulary: Option<Vec<PathBuf>>,
    #[arg(long)]
    pub cluster: bool,
    /// Query schema file and repository directory of canonical schema files.
    #[arg(long, num_args = 2, value_names = ["QUERY", "REPO_DIR"])]
    pub search: Option<Vec<PathBuf>>,
    #[arg(long, requires = "cluster")]
    pub cutoff: Option<f64>,
    /// Further sessions for --cluster.
    #[arg(long = "with", value_name = "SESSION")]
    pub with: Vec<PathBuf>,
    /// Count links at or above the threshold instead of accepted decisions.
    #[arg(long)]
    pub auto: bool,
    /// Link threshold for --auto and --search (defaults to the session's).
    #[arg(long, allow_hyphen_values = true)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub left: Option<String>,
    #[arg(long)]
    pub right: Option<String>,
    #[arg(long)]
    pub json: bool,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("sheet").required(true).args(["concepts", "elements", "matrix"])))]
#[group(skip)]
pub struct ExportArgs {
    pub session: PathBuf,
    #[arg(long)]
    pub concepts: bool,
    #[arg(long)]
    pub elements: bool,
    #[arg(long)]
    pub matrix: bool,
    /// Lowest score included in --matrix.
    #[arg(long, allow_hyphen_values = true)]
    pub min_score: Option<f64>,
    #[arg(long)]
    pub left: Option<String>,
    #[arg(long)]
    pub right: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    pub dir: PathBuf,
    #[arg(long, env = "CONCORDIA_LISTEN", default_value = "127.0.0.1:8080")]
    pub listen: SocketAddr,
}
