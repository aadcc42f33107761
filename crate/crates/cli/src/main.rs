fn main() -> std::process::ExitCode {
    wrv_cli::run_cli(std::env::args_os())
}
