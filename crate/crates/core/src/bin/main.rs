fn main() -> std::process::ExitCode {
    rydberg_cz::cli::main()
}
