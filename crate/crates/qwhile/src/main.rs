use clap::Parser;

use qwhile::cli::{execute, Invocation};

fn main() {
    let outcome = execute(Invocation::parse());
    if !outcome.stdout.is_empty() {
        print!("{}", outcome.stdout);
    }
    if !outcome.stderr.is_empty() {
        eprint!("{}", outcome.stderr);
    }
    std::process::exit(outcome.exit_code);
}
