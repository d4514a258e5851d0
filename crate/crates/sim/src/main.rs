fn main() -> std::process::ExitCode {
    fedapa_sim::cli::main()
}
