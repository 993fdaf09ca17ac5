use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use freycond::classify::RowTag;
use freycond::conductor::ExponentTable;
use freycond::signatures::Signature;
use freycond_cli::{parse_int, run, run_batch, FieldSel, Format, Int, Request};

/// Cluster pictures and odd conductors of Frey hyperelliptic curves.
#[derive(Parser, Debug)]
#[command(name = "freycond", version, allow_negative_numbers = true)]
struct Cli {
    /// text or json
    #[arg(long, global = true, default_value = "text", value_parser = parse_format)]
    format: Format,
    /// Batch file, one JSON request per line.
    #[arg(long)]
    input: Option<std::path::PathBuf>,
    /// Add one to the exponents of a table row (harness self-test).
    #[arg(long, global = true, hide = true, value_parser = parse_row)]
    mutate_row: Option<RowTag>,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Args, Debug)]
struct Family {
    #[arg(long)]
    r: u64,
    #[arg(long, value_parser = parse_big, allow_hyphen_values = true)]
    z: Int,
    #[arg(long, value_parser = parse_big, allow_hyphen_values = true)]
    s: Int,
    /// Q, K or both
    #[arg(long, default_value = "Q", value_parser = parse_field)]
    field: FieldSel,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Per-prime rows and the odd conductor.
    Conductor(Family),
    /// Cluster picture at one prime.
    Cluster {
        #[command(flatten)]
        fam: Family,
        #[arg(long)]
        q: u64,
        /// Compare with the root-difference oracle.
        #[arg(long)]
        check_oracle: bool,
    },
    /// Frey curve of a generalized Fermat equation.
    #[allow(non_snake_case)]
    Signature {
        /// ppr, rrp, 2rp or qrp
        #[arg(value_parser = parse_sig)]
        signature: Signature,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long = "A", default_value = "1", value_parser = parse_big, allow_hyphen_values = true)]
        A: Int,
        #[arg(long = "B", default_value = "1", value_parser = parse_big, allow_hyphen_values = true)]
        B: Int,
        #[arg(long = "C", default_value = "1", value_parser = parse_big, allow_hyphen_values = true)]
        C: Int,
        #[arg(long, value_parser = parse_big, allow_hyphen_values = true)]
        a: Option<Int>,
        #[arg(long, value_parser = parse_big, allow_hyphen_values = true)]
        b: Option<Int>,
        #[arg(long, value_parser = parse_big, allow_hyphen_values = true)]
        c: Option<Int>,
        /// value of a^p
        #[arg(long, value_parser = parse_big, allow_hyphen_values = true)]
        ap: Option<Int>,
        /// value of b^p
        #[arg(long, value_parser = parse_big, allow_hyphen_values = true)]
        bp: Option<Int>,
        /// value of c^p
        #[arg(long, value_parser = parse_big, allow_hyphen_values = true)]
        cp: Option<Int>,
    },
    /// Random instances through the six self-check suites.
    Verify {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [5u64, 7])]
        r: Vec<u64>,
    },
}

fn parse_big(s: &str) -> Result<Int, String> {
    parse_int(s).map_err(|e| e.to_string())
}

fn parse_field(s: &str) -> Result<FieldSel, String> {
    s.parse().map_err(|e: freycond::Error| e.to_string())
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: freycond::Error| e.to_string())
}

fn parse_sig(s: &str) -> Result<Signature, String> {
    s.parse().map_err(|e: freycond::Error| e.to_string())
}

fn parse_row(s: &str) -> Result<RowTag, String> {
    s.parse().map_err(|e: freycond::Error| e.to_string())
}

fn request(cmd: Cmd) -> Request {
    match cmd {
        Cmd::Conductor(f) => Request::Conductor { r: f.r, z: f.z, s: f.s, field: f.field },
        Cmd::Cluster { fam, q, check_oracle } => {
            Request::Cluster { r: fam.r, z: fam.z, s: fam.s, q, field: fam.field, check_oracle }
        }
        Cmd::Signature { signature, r, q, p, A, B, C, a, b, c, ap, bp, cp } => {
            Request::Signature { signature, r, q, p, A, B, C, a, b, c, ap, bp, cp }
        }
        Cmd::Verify { seed, count, r } => Request::Verify { seed, count, r },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let table = ExponentTable { mutated: cli.mutate_row };
    let outcome = match (cli.input, cli.command) {
        (Some(path), None) => match std::fs::read_to_string(&path) {
            Ok(text) => Ok(run_batch(&text, cli.format, &table)),
            Err(e) => Err(freycond::Error::Domain(format!("cannot read {}: {}", path.display(), e))),
        },
        (None, Some(cmd)) => run(&request(cmd), cli.format, &table),
        (Some(_), Some(_)) => Err(freycond::Error::Domain("--input and a subcommand are exclusive".into())),
        (None, None) => Err(freycond::Error::Domain("give a subcommand or --input FILE".into())),
    };
    match outcome {
        Ok(o) => {
            if !o.text.is_empty() {
                println!("{}", o.text);
            }
            ExitCode::from(o.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
