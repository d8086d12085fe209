#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod config;
mod error;

use args::{Cli, Command};
use clap::Parser;

fn init_threads() {
    if let Some(n) = std::env::var("MELLIN_PRICER_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            // ignore the error if a pool already exists
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() {
    let cli = Cli::parse();
    init_threads();
    let result = match cli.command {
        Command::Price(a) => commands::price(a),
        Command::Greeks(a) => commands::greeks(a),
        Command::Surface(a) => commands::surface(a),
        Command::Boundary(a) => commands::boundary(a),
        Command::Table1(a) => commands::table1(a),
    };
    if let Err(e) = result {
        eprintln!("mellin: {e}");
        std::process::exit(e.exit_code());
    }
}
