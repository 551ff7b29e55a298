use clap::Parser;

fn main() -> std::process::ExitCode {
    growai::main_with(growai::Cli::parse())
}
