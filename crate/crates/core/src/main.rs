fn main() -> std::process::ExitCode {
    neron_torsors::cli::run(std::env::args_os())
}
