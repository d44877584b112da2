fn main() -> std::process::ExitCode {
    competition::cli::main_with_args(std::env::args_os())
}
