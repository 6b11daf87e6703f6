use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use shex_atlas_cli::commands::{self, CliError, Format, ReportFormat, WikidataMode};
use shex_atlas_cli::server::{self, ServiceConfig};

#[derive(Parser)]
#[command(name = "shex-atlas", version, about = "Visualise ShEx schemas as class diagrams and 3D graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct WikidataArgs {
    /// Where tooltip lookups come from.
    #[arg(long, value_enum, env = "SHEX_ATLAS_WIKIDATA_MODE", default_value = "fixture")]
    wikidata_mode: WikidataMode,
    /// id → {label, description} table for fixture mode; defaults to the bundled one.
    #[arg(long)]
    wikidata_fixture: Option<PathBuf>,
    /// Directory for the on-disk lookup cache.
    #[arg(long, env = "SHEX_ATLAS_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a schema to a class diagram or a 3D graph document.
    Convert {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "classdiagram")]
        format: Format,
        /// Write the document here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the identifier sanitization map (TSV) here.
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Classify nodes and edges as highlighted or dimmed for a focus set.
    Focus {
        input: PathBuf,
        /// Comma-separated node ids; empty for no focus.
        #[arg(long, default_value = "")]
        nodes: String,
        #[arg(long)]
        include_incoming: bool,
    },
    /// Reduce the graph to one node and its neighbours.
    Collapse {
        input: PathBuf,
        #[arg(long)]
        node: String,
    },
    /// Score a notation's perceptual discriminability.
    Metrics {
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        format: ReportFormat,
    },
    /// Compute per-participant precision from study records.
    Study {
        records: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        format: ReportFormat,
    },
    /// Resolve a Wikidata term such as wd:Q42944 to tooltip text.
    Entity {
        term: String,
        #[arg(long, default_value = "en")]
        lang: String,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        wikidata: WikidataArgs,
    },
    /// Serve the HTTP API and viewer assets.
    Serve {
        input: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long)]
        include_incoming: bool,
        /// Directory of viewer assets served at /.
        #[arg(long)]
        static_dir: Option<PathBuf>,
        #[command(flatten)]
        wikidata: WikidataArgs,
    },
}

fn client(args: &WikidataArgs) -> Result<Option<shex_atlas::wikidata::WikidataClient>, CliError> {
    commands::wikidata_client(args.wikidata_mode, args.wikidata_fixture.as_deref(), args.cache_dir.as_deref())
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Convert { input, format, out, map } => {
            let converted = commands::convert(&input, format)?;
            if let (Some(path), Some(tsv)) = (map, &converted.map_tsv) {
                commands::write_file(&path, tsv)?;
            }
            match out {
                Some(path) => {
                    commands::write_file(&path, &converted.document)?;
                    Ok(String::new())
                }
                None => Ok(converted.document),
            }
        }
        Command::Focus {
            input,
            nodes,
            include_incoming,
        } => commands::focus(&input, &commands::node_list(&nodes), include_incoming),
        Command::Collapse { input, node } => commands::collapse(&input, &node),
        Command::Metrics { spec, format } => commands::metrics(&spec, format),
        Command::Study { records, format } => commands::study(&records, format),
        Command::Entity {
            term,
            lang,
            json,
            wikidata,
        } => commands::entity(client(&wikidata)?.as_ref(), &term, &lang, json),
        Command::Serve {
            input,
            port,
            host,
            include_incoming,
            static_dir,
            wikidata,
        } => {
            let wikidata = client(&wikidata)?;
            let config = ServiceConfig {
                host,
                port,
                input_path: input,
                include_incoming_focus: include_incoming,
                static_dir,
            };
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Server(e.to_string()))?;
            rt.block_on(server::serve(config, wikidata))?;
            Ok(String::new())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
