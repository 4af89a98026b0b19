fn main() -> std::process::ExitCode {
    interwave::cli::main()
}
